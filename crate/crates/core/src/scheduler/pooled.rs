//! Shared-pool scheduling: policy-ordered selection from pooled spectrum.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domain::SliceId;

/// Total order applied to pooled demands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum PoolOrdering {
    /// QoS priority first (1 is served first), admission order breaks ties.
    #[serde(rename = "PRIORITY_THEN_ARRIVAL")]
    #[default]
    PriorityThenArrival,
}

/// Policy for the pooled mode: ordering plus optional per-slice demand caps
/// (a slice never draws more than its cap from the pool).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PoolPolicy {
    pub ordering: PoolOrdering,
    pub demand_caps: BTreeMap<SliceId, u32>,
}

/// One slice's demand on the pool for a (cell, slot).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoolDemand {
    pub slice_id: SliceId,
    /// 1 (highest) ..= 15.
    pub priority: u8,
    /// Admission order of the grant; earlier wins on equal priority.
    pub arrival_seq: u64,
    pub demand_prb: u32,
}

/// Serve pooled demands in policy order; each takes the smaller of its
/// (capped) demand and what is left of the pool.
pub fn pooled_schedule(
    policy: &PoolPolicy,
    demands: &[PoolDemand],
    capacity: u32,
) -> BTreeMap<SliceId, u32> {
    let mut ordered: Vec<&PoolDemand> = demands.iter().collect();
    match policy.ordering {
        PoolOrdering::PriorityThenArrival => ordered.sort_by(|a, b| {
            a.priority
                .cmp(&b.priority)
                .then_with(|| a.arrival_seq.cmp(&b.arrival_seq))
                .then_with(|| a.slice_id.cmp(&b.slice_id))
        }),
    }

    let mut remaining = capacity;
    let mut out = BTreeMap::new();
    for d in ordered {
        let want = match policy.demand_caps.get(&d.slice_id) {
            Some(cap) => d.demand_prb.min(*cap),
            None => d.demand_prb,
        };
        let take = want.min(remaining);
        out.insert(d.slice_id.clone(), take);
        remaining -= take;
    }
    out
}
