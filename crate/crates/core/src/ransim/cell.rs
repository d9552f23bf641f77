//! A shared RAN cell: capacity, PLMN broadcast, adjacency, outages.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::domain::{CellId, PlmnId};

use super::RanError;

/// Broadcast information lets a UE distinguish at most this many sharing
/// operators per cell.
pub const MAX_BROADCAST_PLMNS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellModel {
    pub cell_id: CellId,
    pub capacity_prb_per_slot: u32,
    /// Operators this cell broadcasts, in configuration order; length <= 6.
    pub broadcast_plmns: Vec<PlmnId>,
    /// X2 adjacency for handover purposes.
    pub neighbors: BTreeSet<CellId>,
    /// Slots where capacity is reduced (value replaces nominal capacity).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub outage_schedule: BTreeMap<u64, u32>,
}

impl CellModel {
    pub fn new(cell_id: CellId, capacity_prb_per_slot: u32) -> Self {
        Self {
            cell_id,
            capacity_prb_per_slot,
            broadcast_plmns: Vec::new(),
            neighbors: BTreeSet::new(),
            outage_schedule: BTreeMap::new(),
        }
    }

    /// Add an operator to the broadcast list; at most six, no duplicates.
    pub fn add_operator(&mut self, plmn: PlmnId) -> Result<(), RanError> {
        if self.broadcast_plmns.contains(&plmn) {
            return Err(RanError::DuplicatePlmn {
                cell: self.cell_id.clone(),
                plmn,
            });
        }
        if self.broadcast_plmns.len() >= MAX_BROADCAST_PLMNS {
            return Err(RanError::MaxPlmnExceeded {
                cell: self.cell_id.clone(),
            });
        }
        self.broadcast_plmns.push(plmn);
        Ok(())
    }

    pub fn broadcasts(&self, plmn: &PlmnId) -> bool {
        self.broadcast_plmns.contains(plmn)
    }

    /// Capacity available at `slot`: nominal unless an outage entry reduces it.
    pub fn effective_capacity(&self, slot: u64) -> u32 {
        self.outage_schedule
            .get(&slot)
            .copied()
            .unwrap_or(self.capacity_prb_per_slot)
    }
}
