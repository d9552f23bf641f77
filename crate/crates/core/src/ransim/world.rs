//! The simulated world: topology, devices, background traffic, and the
//! per-slot scheduling step.
//!
//! One logical event loop owns the world; everything here is deterministic
//! for a fixed topology, scenario, and seed. Cells are processed in id
//! order, flows in device-id order, and every random draw comes from a
//! per-cell seeded stream.

use std::collections::BTreeMap;

use crate::domain::{CellId, EndpointId, SliceId, SliceMode, TenantId, UeId};
use crate::scheduler::{
    allocate_quotas, intra_slice_schedule, pooled_schedule, GrantShare, PoolDemand, PoolPolicy,
    SparePolicy,
};
use crate::telemetry::MeasurementRecord;

use super::traffic::{BackgroundProfile, BackgroundTraffic};
use super::ue::UeModel;
use super::{RanError, Topology};

/// What the scheduler needs to know about one active grant in one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveGrantView {
    pub slice_id: SliceId,
    pub tenant: TenantId,
    pub per_cell_prb: BTreeMap<CellId, u32>,
    pub spare_eligible: bool,
    pub priority: u8,
    pub arrival_seq: u64,
    pub mode: SliceMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttachResult {
    pub ue_id: UeId,
    pub cell_id: CellId,
    pub core_endpoint: EndpointId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HandoverResult {
    pub ue_id: UeId,
    pub source_cell: CellId,
    pub target_cell: CellId,
    pub core_endpoint: EndpointId,
}

/// Everything measured in one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotOutcome {
    pub slot: u64,
    pub records: Vec<MeasurementRecord>,
    /// PRBs delivered to each device this slot (devices with zero omitted).
    pub ue_delivered: Vec<(UeId, u32)>,
    pub effective_capacity: BTreeMap<CellId, u32>,
}

#[derive(Debug, Clone)]
pub struct World {
    topology: Topology,
    ues: BTreeMap<UeId, UeModel>,
    background: BTreeMap<CellId, BackgroundTraffic>,
    rr_pointers: BTreeMap<(CellId, SliceId), usize>,
    clock: Option<u64>,
}

impl World {
    /// Build a world over a validated topology. Cells without an explicit
    /// profile get zero background traffic.
    pub fn new(
        topology: Topology,
        profiles: BTreeMap<CellId, BackgroundProfile>,
        slots_per_day: u64,
        seed: u64,
    ) -> Result<Self, RanError> {
        topology.validate()?;
        let mut background = BTreeMap::new();
        for cell_id in topology.cells.keys() {
            let profile = profiles.get(cell_id).cloned().unwrap_or_default();
            background.insert(
                cell_id.clone(),
                BackgroundTraffic::new(cell_id, profile, slots_per_day, seed),
            );
        }
        Ok(Self {
            topology,
            ues: BTreeMap::new(),
            background,
            rr_pointers: BTreeMap::new(),
            clock: None,
        })
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn clock(&self) -> Option<u64> {
        self.clock
    }

    pub fn ues(&self) -> impl Iterator<Item = &UeModel> {
        self.ues.values()
    }

    pub fn ue(&self, id: &UeId) -> Result<&UeModel, RanError> {
        self.ues
            .get(id)
            .ok_or_else(|| RanError::UnknownUe { ue: id.clone() })
    }

    /// Register a device (detached until [`World::attach`]).
    pub fn add_ue(&mut self, ue: UeModel) -> Result<(), RanError> {
        if self.ues.contains_key(&ue.ue_id) {
            return Err(RanError::DuplicateUe { ue: ue.ue_id });
        }
        self.ues.insert(ue.ue_id.clone(), ue);
        Ok(())
    }

    /// Add an operator to a cell's broadcast list (at most six).
    pub fn add_operator(
        &mut self,
        cell: &CellId,
        plmn: crate::domain::PlmnId,
    ) -> Result<(), RanError> {
        let model = self
            .topology
            .cells
            .get_mut(cell)
            .ok_or_else(|| RanError::UnknownCell { cell: cell.clone() })?;
        model.add_operator(plmn)
    }

    /// Attach a device to a cell. The cell must broadcast the device's home
    /// PLMN; the resolved core endpoint follows the sharing mode.
    pub fn attach(&mut self, ue_id: &UeId, cell_id: &CellId) -> Result<AttachResult, RanError> {
        let cell = self.topology.cell(cell_id)?;
        let ue = self
            .ues
            .get(ue_id)
            .ok_or_else(|| RanError::UnknownUe { ue: ue_id.clone() })?;
        if !cell.broadcasts(&ue.home_plmn) {
            return Err(RanError::PlmnNotBroadcast {
                cell: cell_id.clone(),
                plmn: ue.home_plmn.clone(),
            });
        }
        let endpoint = self.topology.core_endpoint(&ue.home_plmn)?.clone();
        self.ues.get_mut(ue_id).expect("checked").serving_cell = Some(cell_id.clone());
        Ok(AttachResult {
            ue_id: ue_id.clone(),
            cell_id: cell_id.clone(),
            core_endpoint: endpoint,
        })
    }

    /// Hand a device over to a neighboring cell that broadcasts its home PLMN.
    pub fn handover(
        &mut self,
        ue_id: &UeId,
        target_cell: &CellId,
    ) -> Result<HandoverResult, RanError> {
        let ue = self
            .ues
            .get(ue_id)
            .ok_or_else(|| RanError::UnknownUe { ue: ue_id.clone() })?;
        let source = ue
            .serving_cell
            .clone()
            .ok_or_else(|| RanError::UeNotAttached { ue: ue_id.clone() })?;
        let target = self.topology.cell(target_cell)?;
        let serving = self.topology.cell(&source)?;
        if !serving.neighbors.contains(target_cell) {
            return Err(RanError::NotNeighbor {
                serving: source,
                target: target_cell.clone(),
            });
        }
        if !target.broadcasts(&ue.home_plmn) {
            return Err(RanError::HandoverRejected {
                target: target_cell.clone(),
                plmn: ue.home_plmn.clone(),
            });
        }
        let endpoint = self.topology.core_endpoint(&ue.home_plmn)?.clone();
        self.ues.get_mut(ue_id).expect("checked").serving_cell = Some(target_cell.clone());
        Ok(HandoverResult {
            ue_id: ue_id.clone(),
            source_cell: source,
            target_cell: target_cell.clone(),
            core_endpoint: endpoint,
        })
    }

    /// Cells currently serving each tenant's devices.
    pub fn ue_locations(&self) -> BTreeMap<TenantId, Vec<CellId>> {
        let mut out: BTreeMap<TenantId, Vec<CellId>> = BTreeMap::new();
        for ue in self.ues.values() {
            if let Some(cell) = &ue.serving_cell {
                let cells = out.entry(ue.owner.clone()).or_default();
                if !cells.contains(cell) {
                    cells.push(cell.clone());
                }
            }
        }
        for cells in out.values_mut() {
            cells.sort();
        }
        out
    }

    /// Advance one slot: generate demand, schedule every cell, and report
    /// per-slice and background measurements.
    pub fn step(
        &mut self,
        slot: u64,
        active_grants: &[ActiveGrantView],
        spare_policy: SparePolicy,
    ) -> Result<SlotOutcome, RanError> {
        match self.clock {
            Some(prev) if slot != prev + 1 => {
                return Err(RanError::ClockSkew {
                    expected: prev + 1,
                    got: slot,
                })
            }
            _ => {}
        }
        self.clock = Some(slot);

        let mut records = Vec::new();
        let mut ue_delivered: BTreeMap<UeId, u32> = BTreeMap::new();
        let mut effective_capacity = BTreeMap::new();

        let cell_ids: Vec<CellId> = self.topology.cells.keys().cloned().collect();
        for cell_id in cell_ids {
            let effective = self.topology.cells[&cell_id].effective_capacity(slot);
            effective_capacity.insert(cell_id.clone(), effective);

            let bg_demand = self
                .background
                .get_mut(&cell_id)
                .expect("stream per cell")
                .demand(slot);

            // Grants covering this cell, in slice-id order.
            let grants_here: Vec<&ActiveGrantView> = active_grants
                .iter()
                .filter(|g| g.per_cell_prb.contains_key(&cell_id))
                .collect();

            // Attribute each backlogged device to at most one slice.
            let mut flows: BTreeMap<SliceId, Vec<(UeId, u32)>> = BTreeMap::new();
            for g in &grants_here {
                flows.insert(g.slice_id.clone(), Vec::new());
            }
            for ue in self.ues.values() {
                if ue.serving_cell.as_ref() != Some(&cell_id) || ue.demand_prb_per_slot == 0 {
                    continue;
                }
                let chosen = grants_here
                    .iter()
                    .filter(|g| g.tenant == ue.owner)
                    .filter(|g| {
                        ue.slice_binding.is_none() || ue.slice_binding.as_ref() == Some(&g.slice_id)
                    })
                    .map(|g| g.slice_id.clone())
                    .min();
                if let Some(slice) = chosen {
                    flows
                        .get_mut(&slice)
                        .expect("slice present")
                        .push((ue.ue_id.clone(), ue.demand_prb_per_slot));
                }
            }

            let demands: BTreeMap<SliceId, u32> = flows
                .iter()
                .map(|(s, f)| (s.clone(), f.iter().map(|(_, b)| *b).sum()))
                .collect();

            // Assigned share per slice this slot.
            let mut assigned: BTreeMap<SliceId, u32> = BTreeMap::new();
            if !grants_here.is_empty() {
                let mode = grants_here[0].mode;
                match mode {
                    SliceMode::TwoLayer => {
                        let shares: Vec<GrantShare> = grants_here
                            .iter()
                            .map(|g| GrantShare {
                                slice_id: g.slice_id.clone(),
                                granted_prb: g.per_cell_prb[&cell_id],
                                spare_eligible: g.spare_eligible,
                            })
                            .collect();
                        let quotas =
                            allocate_quotas(&cell_id, slot, &shares, effective, spare_policy);
                        assigned = quotas.per_slice_quota;
                    }
                    SliceMode::Pooled => {
                        let mut policy = PoolPolicy::default();
                        let mut pool_demands = Vec::new();
                        for g in &grants_here {
                            policy
                                .demand_caps
                                .insert(g.slice_id.clone(), g.per_cell_prb[&cell_id]);
                            pool_demands.push(PoolDemand {
                                slice_id: g.slice_id.clone(),
                                priority: g.priority,
                                arrival_seq: g.arrival_seq,
                                demand_prb: demands.get(&g.slice_id).copied().unwrap_or(0),
                            });
                        }
                        assigned = pooled_schedule(&policy, &pool_demands, effective);
                    }
                }
            }

            // Serve each slice inside its share; slices never see each other.
            let mut delivered_total: u64 = 0;
            for g in &grants_here {
                let quota = assigned.get(&g.slice_id).copied().unwrap_or(0);
                let slice_flows = &flows[&g.slice_id];
                let key = (cell_id.clone(), g.slice_id.clone());
                let pointer = self.rr_pointers.get(&key).copied().unwrap_or(0);
                let schedule = intra_slice_schedule(quota, slice_flows, pointer);
                self.rr_pointers.insert(key, schedule.next_pointer);

                let delivered: u32 = schedule.per_flow_prb.values().sum();
                delivered_total += delivered as u64;
                for (ue, prb) in &schedule.per_flow_prb {
                    *ue_delivered.entry(ue.clone()).or_insert(0) += prb;
                }

                let demanded = demands.get(&g.slice_id).copied().unwrap_or(0);
                let granted = g.per_cell_prb[&cell_id];
                let due = granted.min(demanded);
                records.push(MeasurementRecord {
                    slot,
                    cell_id: cell_id.clone(),
                    slice_id: Some(g.slice_id.clone()),
                    tenant: Some(g.tenant.clone()),
                    demanded_prb: demanded,
                    quota_prb: quota,
                    delivered_prb: delivered,
                    deficit_prb: due.saturating_sub(delivered),
                });
            }

            debug_assert!(delivered_total <= effective as u64);
            let bg_delivered = bg_demand.min(effective.saturating_sub(delivered_total as u32));
            records.push(MeasurementRecord {
                slot,
                cell_id: cell_id.clone(),
                slice_id: None,
                tenant: None,
                demanded_prb: bg_demand,
                quota_prb: 0,
                delivered_prb: bg_delivered,
                deficit_prb: 0,
            });
        }

        Ok(SlotOutcome {
            slot,
            records,
            ue_delivered: ue_delivered.into_iter().filter(|(_, d)| *d > 0).collect(),
            effective_capacity,
        })
    }
}
