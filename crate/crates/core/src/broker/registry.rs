//! The slice registry: grants, lifecycle states, and materialized
//! per-(cell, slot) commitments over a rolling horizon.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::domain::{CellId, RequestId, SliceGrant, SliceId};
use crate::ransim::{ActiveGrantView, Topology};

use super::BrokerError;

/// Lifecycle of an admitted slice.
///
/// `PENDING -> ACTIVE <-> DORMANT -> EXPIRED`, and any state may move to
/// `RELEASED`; no other edges exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SliceState {
    #[serde(rename = "PENDING")]
    Pending,
    #[serde(rename = "ACTIVE")]
    Active,
    /// Between recurrences of a periodic slice.
    #[serde(rename = "DORMANT")]
    Dormant,
    #[serde(rename = "EXPIRED")]
    Expired,
    #[serde(rename = "RELEASED")]
    Released,
}

/// Registry state; two registries that processed the same decision sequence
/// compare equal. Rejected admissions leave a registry bit-identical (the
/// decision counter lives on the broker, outside this struct).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceRegistry {
    grants: BTreeMap<SliceId, SliceGrant>,
    states: BTreeMap<SliceId, SliceState>,
    /// Sum of granted PRBs per (cell, slot), materialized for slots
    /// `0..=horizon_slot`. Entries for past slots are retained for charging.
    committed: BTreeMap<(CellId, u64), u32>,
    /// Request ids of granted slices; rejected ids may be resubmitted.
    seen_request_ids: BTreeSet<RequestId>,
    arrival_seq: BTreeMap<SliceId, u64>,
    released_at: BTreeMap<SliceId, u64>,
    next_slice_number: u64,
    horizon_slot: u64,
    clock: Option<u64>,
}

impl SliceRegistry {
    pub fn new(horizon_slot: u64) -> Self {
        Self {
            grants: BTreeMap::new(),
            states: BTreeMap::new(),
            committed: BTreeMap::new(),
            seen_request_ids: BTreeSet::new(),
            arrival_seq: BTreeMap::new(),
            released_at: BTreeMap::new(),
            next_slice_number: 1,
            horizon_slot,
            clock: None,
        }
    }

    pub fn horizon_slot(&self) -> u64 {
        self.horizon_slot
    }

    pub fn clock(&self) -> Option<u64> {
        self.clock
    }

    /// Next slot the broker will process (last ticked + 1).
    pub fn now_slot(&self) -> u64 {
        self.clock.map(|c| c + 1).unwrap_or(0)
    }

    pub(super) fn set_clock(&mut self, slot: u64) {
        self.clock = Some(slot);
    }

    pub fn grant(&self, slice: &SliceId) -> Option<&SliceGrant> {
        self.grants.get(slice)
    }

    pub fn grants(&self) -> impl Iterator<Item = &SliceGrant> {
        self.grants.values()
    }

    pub fn state(&self, slice: &SliceId) -> Option<SliceState> {
        self.states.get(slice).copied()
    }

    pub fn states(&self) -> &BTreeMap<SliceId, SliceState> {
        &self.states
    }

    pub fn arrival_seq_of(&self, slice: &SliceId) -> Option<u64> {
        self.arrival_seq.get(slice).copied()
    }

    pub fn released_at(&self, slice: &SliceId) -> Option<u64> {
        self.released_at.get(slice).copied()
    }

    pub fn committed_at(&self, cell: &CellId, slot: u64) -> u32 {
        self.committed
            .get(&(cell.clone(), slot))
            .copied()
            .unwrap_or(0)
    }

    pub fn has_request_id(&self, id: &RequestId) -> bool {
        self.seen_request_ids.contains(id)
    }

    pub(super) fn note_request_id(&mut self, id: RequestId) {
        self.seen_request_ids.insert(id);
    }

    pub(super) fn allocate_slice_id(&mut self) -> SliceId {
        let id = SliceId::new(format!("sl-{:06}", self.next_slice_number)).expect("valid id");
        self.next_slice_number += 1;
        id
    }

    /// Restore the slice-id counter when replaying logged grants.
    pub(super) fn bump_slice_counter_for(&mut self, slice: &SliceId) {
        if let Some(num) = slice
            .as_str()
            .strip_prefix("sl-")
            .and_then(|n| n.parse::<u64>().ok())
        {
            self.next_slice_number = self.next_slice_number.max(num + 1);
        }
    }

    /// Slots (within the horizon, optionally from `from_slot` on) where the
    /// grant holds capacity.
    pub(super) fn materialized_slots(grant: &SliceGrant, horizon: u64, from_slot: u64) -> Vec<u64> {
        let mut slots = Vec::new();
        for (start, end) in grant.time.active_intervals(horizon) {
            let lo = start.max(from_slot);
            let hi = end.min(horizon + 1);
            for t in lo..hi {
                slots.push(t);
            }
        }
        slots
    }

    /// Insert a grant and materialize its commitments. The feasibility check
    /// happened before; this is the atomic commit step.
    pub(super) fn apply_grant(&mut self, grant: SliceGrant, arrival: u64) {
        for slot in Self::materialized_slots(&grant, self.horizon_slot, 0) {
            for (cell, prb) in &grant.per_cell_prb {
                *self.committed.entry((cell.clone(), slot)).or_insert(0) += prb;
            }
        }
        self.arrival_seq.insert(grant.slice_id.clone(), arrival);
        self.states
            .insert(grant.slice_id.clone(), SliceState::Pending);
        self.grants.insert(grant.slice_id.clone(), grant);
    }

    /// Remove a released grant's future capacity (slots >= `from_slot`);
    /// past accounting entries stay for charging.
    pub(super) fn remove_future_commitments(&mut self, slice: &SliceId, from_slot: u64) {
        let Some(grant) = self.grants.get(slice) else {
            return;
        };
        let slots = Self::materialized_slots(grant, self.horizon_slot, from_slot);
        let per_cell: Vec<(CellId, u32)> = grant
            .per_cell_prb
            .iter()
            .map(|(c, p)| (c.clone(), *p))
            .collect();
        for slot in slots {
            for (cell, prb) in &per_cell {
                let key = (cell.clone(), slot);
                if let Some(v) = self.committed.get_mut(&key) {
                    *v = v.saturating_sub(*prb);
                    if *v == 0 {
                        self.committed.remove(&key);
                    }
                }
            }
        }
    }

    pub(super) fn set_state(&mut self, slice: &SliceId, state: SliceState) {
        self.states.insert(slice.clone(), state);
    }

    pub(super) fn note_release(&mut self, slice: &SliceId, slot: u64) {
        self.released_at.insert(slice.clone(), slot);
    }

    /// Grants currently in the ACTIVE state, as scheduler views.
    pub fn active_grant_views(&self) -> Vec<ActiveGrantView> {
        self.grants
            .values()
            .filter(|g| self.states.get(&g.slice_id) == Some(&SliceState::Active))
            .map(|g| ActiveGrantView {
                slice_id: g.slice_id.clone(),
                tenant: g.tenant.clone(),
                per_cell_prb: g.per_cell_prb.clone(),
                spare_eligible: g.spare_eligible(),
                priority: g.qos.priority,
                arrival_seq: self.arrival_seq.get(&g.slice_id).copied().unwrap_or(0),
                mode: g.mode,
            })
            .collect()
    }

    /// The safety invariant: no (cell, slot) entry exceeds nominal capacity.
    pub fn check_capacity(&self, topology: &Topology) -> Result<(), BrokerError> {
        for ((cell, slot), total) in &self.committed {
            let capacity = topology
                .cells
                .get(cell)
                .map(|c| c.capacity_prb_per_slot)
                .unwrap_or(0);
            if *total > capacity {
                return Err(BrokerError::CapacityInvariantBroken {
                    cell: cell.clone(),
                    slot: *slot,
                    committed: *total,
                    capacity,
                });
            }
        }
        Ok(())
    }

    /// Extend the materialized horizon, re-committing unbounded periodic
    /// grants into the new window. All-or-nothing: if any renewal would
    /// break the capacity invariant the registry is left untouched and the
    /// offending slices are reported.
    pub fn advance_horizon(
        &mut self,
        new_horizon: u64,
        topology: &Topology,
    ) -> Result<(), BrokerError> {
        if new_horizon <= self.horizon_slot {
            return Ok(());
        }
        let old_horizon = self.horizon_slot;

        // Renewable grants in admission order.
        let mut renewable: Vec<&SliceGrant> = self
            .grants
            .values()
            .filter(|g| !g.time.is_finite())
            .filter(|g| {
                !matches!(
                    self.states.get(&g.slice_id),
                    Some(SliceState::Released) | Some(SliceState::Expired)
                )
            })
            .collect();
        renewable.sort_by_key(|g| self.arrival_seq.get(&g.slice_id).copied().unwrap_or(0));

        let mut additions: BTreeMap<(CellId, u64), u32> = BTreeMap::new();
        let mut refused = Vec::new();
        for grant in &renewable {
            let mut grant_adds: Vec<((CellId, u64), u32)> = Vec::new();
            let mut feasible = true;
            'check: for (start, end) in grant.time.active_intervals(new_horizon) {
                let lo = start.max(old_horizon + 1);
                let hi = end.min(new_horizon + 1);
                for slot in lo..hi {
                    for (cell, prb) in &grant.per_cell_prb {
                        let key = (cell.clone(), slot);
                        let base = self.committed.get(&key).copied().unwrap_or(0)
                            + additions.get(&key).copied().unwrap_or(0);
                        let capacity = topology
                            .cells
                            .get(cell)
                            .map(|c| c.capacity_prb_per_slot)
                            .unwrap_or(0);
                        if base + prb > capacity {
                            feasible = false;
                            break 'check;
                        }
                        grant_adds.push((key, *prb));
                    }
                }
            }
            if feasible {
                for (key, prb) in grant_adds {
                    *additions.entry(key).or_insert(0) += prb;
                }
            } else {
                refused.push(grant.slice_id.clone());
            }
        }

        if !refused.is_empty() {
            return Err(BrokerError::RenewalRefused { slices: refused });
        }
        for (key, prb) in additions {
            *self.committed.entry(key).or_insert(0) += prb;
        }
        self.horizon_slot = new_horizon;
        Ok(())
    }
}
