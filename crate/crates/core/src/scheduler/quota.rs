//! Upper-layer inter-slice quota allocation for one (cell, slot).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domain::{CellId, SliceId};

use super::apportion::apportion_largest_remainder;

/// How unused capacity is treated after every grant got its share.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SparePolicy {
    /// Strict isolation: quotas equal grants, spare stays idle.
    #[serde(rename = "NONE")]
    None,
    /// Spare is split among spare-eligible slices proportional to grant size.
    #[serde(rename = "PROPORTIONAL")]
    Proportional,
}

/// One active grant's claim on a cell in one slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrantShare {
    pub slice_id: SliceId,
    pub granted_prb: u32,
    pub spare_eligible: bool,
}

/// Per-slice quotas decided for one (cell, slot).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotaAssignment {
    pub cell_id: CellId,
    pub slot: u64,
    pub per_slice_quota: BTreeMap<SliceId, u32>,
    /// Granted-but-unassignable PRBs per shorted slice; non-empty only when
    /// an outage pushed effective capacity below the committed total.
    pub deficits: BTreeMap<SliceId, u32>,
    pub overcommit_under_outage: bool,
}

/// Decide per-slice quotas for one cell and slot.
///
/// When committed grants fit the effective capacity every slice receives
/// exactly its grant, plus (under [`SparePolicy::Proportional`]) a
/// largest-remainder share of the spare proportional to grant size, limited
/// to spare-eligible slices. When an outage leaves less capacity than the
/// committed total, quotas are scaled down with the same largest-remainder
/// rounding and the shortfall is reported per slice instead of erroring.
pub fn allocate_quotas(
    cell_id: &CellId,
    slot: u64,
    grants: &[GrantShare],
    effective_capacity: u32,
    spare_policy: SparePolicy,
) -> QuotaAssignment {
    let committed: u64 = grants.iter().map(|g| g.granted_prb as u64).sum();

    if committed > effective_capacity as u64 {
        let weights: Vec<(SliceId, u64)> = grants
            .iter()
            .map(|g| (g.slice_id.clone(), g.granted_prb as u64))
            .collect();
        let scaled = apportion_largest_remainder(effective_capacity, &weights);
        let mut deficits = BTreeMap::new();
        let mut quotas = BTreeMap::new();
        for g in grants {
            let quota = scaled.get(&g.slice_id).copied().unwrap_or(0);
            quotas.insert(g.slice_id.clone(), quota);
            if quota < g.granted_prb {
                deficits.insert(g.slice_id.clone(), g.granted_prb - quota);
            }
        }
        return QuotaAssignment {
            cell_id: cell_id.clone(),
            slot,
            per_slice_quota: quotas,
            deficits,
            overcommit_under_outage: true,
        };
    }

    let mut quotas: BTreeMap<SliceId, u32> = grants
        .iter()
        .map(|g| (g.slice_id.clone(), g.granted_prb))
        .collect();

    if spare_policy == SparePolicy::Proportional {
        let spare = effective_capacity - committed as u32;
        if spare > 0 {
            let weights: Vec<(SliceId, u64)> = grants
                .iter()
                .filter(|g| g.spare_eligible && g.granted_prb > 0)
                .map(|g| (g.slice_id.clone(), g.granted_prb as u64))
                .collect();
            for (id, extra) in apportion_largest_remainder(spare, &weights) {
                *quotas.entry(id).or_insert(0) += extra;
            }
        }
    }

    QuotaAssignment {
        cell_id: cell_id.clone(),
        slot,
        per_slice_quota: quotas,
        deficits: BTreeMap::new(),
        overcommit_under_outage: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sid(s: &str) -> SliceId {
        SliceId::new(s).unwrap()
    }

    fn cid() -> CellId {
        CellId::new("C1").unwrap()
    }

    fn share(id: &str, granted: u32) -> GrantShare {
        GrantShare {
            slice_id: sid(id),
            granted_prb: granted,
            spare_eligible: true,
        }
    }

    #[test]
    fn proportional_spare_split() {
        let out = allocate_quotas(
            &cid(),
            0,
            &[share("A", 30), share("B", 50)],
            100,
            SparePolicy::Proportional,
        );
        assert_eq!(out.per_slice_quota[&sid("A")], 38);
        assert_eq!(out.per_slice_quota[&sid("B")], 62);
        assert!(out.deficits.is_empty());
        assert!(!out.overcommit_under_outage);
    }

    #[test]
    fn none_policy_returns_grants_exactly() {
        let out = allocate_quotas(&cid(), 0, &[share("A", 30)], 100, SparePolicy::None);
        assert_eq!(out.per_slice_quota[&sid("A")], 30);
        assert_eq!(out.per_slice_quota.len(), 1);
    }

    #[test]
    fn outage_scales_down_and_reports_deficits() {
        let out = allocate_quotas(
            &cid(),
            7,
            &[share("A", 60), share("B", 60)],
            100,
            SparePolicy::None,
        );
        assert!(out.overcommit_under_outage);
        assert_eq!(out.per_slice_quota[&sid("A")], 50);
        assert_eq!(out.per_slice_quota[&sid("B")], 50);
        assert_eq!(out.deficits[&sid("A")], 10);
        assert_eq!(out.deficits[&sid("B")], 10);
    }

    #[test]
    fn spare_goes_only_to_eligible_slices() {
        let gbr = GrantShare {
            slice_id: sid("A"),
            granted_prb: 30,
            spare_eligible: false,
        };
        let out = allocate_quotas(
            &cid(),
            0,
            &[gbr, share("B", 50)],
            100,
            SparePolicy::Proportional,
        );
        assert_eq!(out.per_slice_quota[&sid("A")], 30);
        assert_eq!(out.per_slice_quota[&sid("B")], 70);
    }

    prop_compose! {
        fn arb_grants()(raw in proptest::collection::vec((1u32..80, any::<bool>()), 0..6)) -> Vec<GrantShare> {
            raw.into_iter()
                .enumerate()
                .map(|(i, (g, e))| GrantShare {
                    slice_id: sid(&format!("s{i}")),
                    granted_prb: g,
                    spare_eligible: e,
                })
                .collect()
        }
    }

    proptest! {
        #[test]
        fn conservation_and_quota_floor(
            grants in arb_grants(),
            capacity in 0u32..300,
            proportional in any::<bool>(),
        ) {
            let policy = if proportional { SparePolicy::Proportional } else { SparePolicy::None };
            let out = allocate_quotas(&cid(), 3, &grants, capacity, policy);
            let total: u64 = out.per_slice_quota.values().map(|q| *q as u64).sum();
            prop_assert!(total <= capacity as u64);

            let committed: u64 = grants.iter().map(|g| g.granted_prb as u64).sum();
            if committed <= capacity as u64 {
                prop_assert!(!out.overcommit_under_outage);
                prop_assert!(out.deficits.is_empty());
                for g in &grants {
                    prop_assert!(out.per_slice_quota[&g.slice_id] >= g.granted_prb);
                }
            } else {
                prop_assert!(out.overcommit_under_outage);
                prop_assert_eq!(total, capacity as u64);
                // Shortfall accounting is exact.
                for g in &grants {
                    let q = out.per_slice_quota[&g.slice_id];
                    let d = out.deficits.get(&g.slice_id).copied().unwrap_or(0);
                    prop_assert_eq!(q + d, g.granted_prb);
                }
            }
        }
    }
}
