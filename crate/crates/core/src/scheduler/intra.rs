//! Lower-layer scheduling inside one slice's quota.
//!
//! Round robin, one PRB at a time, starting at the slice's persistent
//! pointer and skipping flows with no backlog. The outcome depends only on
//! the slice's own quota, flows, and pointer, never on other slices.

use std::collections::BTreeMap;

use crate::domain::UeId;

/// Allocation for each flow plus the advanced pointer (index of the next
/// flow to serve).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntraSliceSchedule {
    pub per_flow_prb: BTreeMap<UeId, u32>,
    pub next_pointer: usize,
}

/// Distribute `quota` PRBs round-robin over `flows` (an ordered backlog
/// list), resuming at `rr_pointer`.
///
/// Implemented in whole-round batches; equivalent to handing out one PRB at
/// a time. The returned pointer is one past the flow that received the last
/// PRB, so a later slot resumes where this one stopped.
pub fn intra_slice_schedule(
    quota: u32,
    flows: &[(UeId, u32)],
    rr_pointer: usize,
) -> IntraSliceSchedule {
    let n = flows.len();
    if n == 0 {
        return IntraSliceSchedule {
            per_flow_prb: BTreeMap::new(),
            next_pointer: rr_pointer,
        };
    }

    let mut backlog: Vec<u32> = flows.iter().map(|(_, b)| *b).collect();
    let mut alloc: Vec<u32> = vec![0; n];
    let mut remaining = quota;
    let mut pointer = rr_pointer % n;

    loop {
        // Active flows in cyclic service order from the pointer.
        let order: Vec<usize> = (0..n)
            .map(|k| (pointer + k) % n)
            .filter(|&i| backlog[i] > 0)
            .collect();
        if order.is_empty() || remaining == 0 {
            break;
        }
        let active = order.len() as u32;
        let min_backlog = order.iter().map(|&i| backlog[i]).min().expect("non-empty");
        let rounds = (remaining / active).min(min_backlog);
        if rounds > 0 {
            for &i in &order {
                alloc[i] += rounds;
                backlog[i] -= rounds;
            }
            remaining -= rounds * active;
            // A completed round ends at the last active flow before the
            // pointer wraps back; the next PRB would go to the first active
            // flow again.
            pointer = (order[order.len() - 1] + 1) % n;
            continue;
        }
        // Fewer PRBs left than active flows: one each, in order.
        let last = order[remaining as usize - 1];
        for &i in order.iter().take(remaining as usize) {
            alloc[i] += 1;
            backlog[i] -= 1;
        }
        remaining = 0;
        pointer = (last + 1) % n;
    }

    let per_flow_prb = flows
        .iter()
        .zip(alloc)
        .filter(|(_, a)| *a > 0)
        .map(|((id, _), a)| (id.clone(), a))
        .collect();
    IntraSliceSchedule {
        per_flow_prb,
        next_pointer: pointer,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn flow(id: &str, backlog: u32) -> (UeId, u32) {
        (UeId::new(id).unwrap(), backlog)
    }

    /// Reference oracle: literally one PRB per step, skipping empty backlogs.
    fn one_prb_at_a_time(
        quota: u32,
        flows: &[(UeId, u32)],
        rr_pointer: usize,
    ) -> IntraSliceSchedule {
        let n = flows.len();
        let mut per_flow_prb: BTreeMap<UeId, u32> = BTreeMap::new();
        if n == 0 {
            return IntraSliceSchedule {
                per_flow_prb,
                next_pointer: rr_pointer,
            };
        }
        let mut backlog: Vec<u32> = flows.iter().map(|(_, b)| *b).collect();
        let mut pointer = rr_pointer % n;
        let mut served = 0;
        while served < quota && backlog.iter().any(|b| *b > 0) {
            // Find the next flow with backlog, starting at the pointer.
            let mut i = pointer;
            while backlog[i] == 0 {
                i = (i + 1) % n;
            }
            backlog[i] -= 1;
            *per_flow_prb.entry(flows[i].0.clone()).or_insert(0) += 1;
            pointer = (i + 1) % n;
            served += 1;
        }
        IntraSliceSchedule {
            per_flow_prb,
            next_pointer: pointer,
        }
    }

    #[test]
    fn splits_three_prbs_over_two_flows() {
        let flows = vec![flow("f1", 10), flow("f2", 10)];
        let out = intra_slice_schedule(3, &flows, 0);
        assert_eq!(out.per_flow_prb[&UeId::new("f1").unwrap()], 2);
        assert_eq!(out.per_flow_prb[&UeId::new("f2").unwrap()], 1);
        assert_eq!(out.next_pointer, 1);
    }

    #[test]
    fn leaves_quota_unused_when_backlog_is_short() {
        let flows = vec![flow("f1", 2)];
        let out = intra_slice_schedule(5, &flows, 0);
        assert_eq!(out.per_flow_prb[&UeId::new("f1").unwrap()], 2);
        assert_eq!(out.per_flow_prb.len(), 1);
        assert_eq!(out.next_pointer, 0);
    }

    #[test]
    fn resumes_from_pointer() {
        let flows = vec![flow("f1", 10), flow("f2", 10)];
        let out = intra_slice_schedule(3, &flows, 1);
        assert_eq!(out.per_flow_prb[&UeId::new("f1").unwrap()], 1);
        assert_eq!(out.per_flow_prb[&UeId::new("f2").unwrap()], 2);
        assert_eq!(out.next_pointer, 0);
    }

    #[test]
    fn empty_flow_list_is_a_no_op() {
        let out = intra_slice_schedule(10, &[], 3);
        assert!(out.per_flow_prb.is_empty());
        assert_eq!(out.next_pointer, 3);
    }

    proptest! {
        // The batched implementation must be indistinguishable from the
        // one-PRB-at-a-time definition.
        #[test]
        fn equals_single_prb_oracle(
            quota in 0u32..200,
            backlogs in proptest::collection::vec(0u32..40, 0..7),
            pointer in 0usize..8,
        ) {
            let flows: Vec<(UeId, u32)> = backlogs
                .iter()
                .enumerate()
                .map(|(i, b)| flow(&format!("u{i}"), *b))
                .collect();
            let fast = intra_slice_schedule(quota, &flows, pointer);
            let slow = one_prb_at_a_time(quota, &flows, pointer);
            prop_assert_eq!(fast, slow);
        }

        #[test]
        fn never_exceeds_quota_or_backlog(
            quota in 0u32..200,
            backlogs in proptest::collection::vec(0u32..40, 1..7),
            pointer in 0usize..8,
        ) {
            let flows: Vec<(UeId, u32)> = backlogs
                .iter()
                .enumerate()
                .map(|(i, b)| flow(&format!("u{i}"), *b))
                .collect();
            let out = intra_slice_schedule(quota, &flows, pointer);
            let total: u32 = out.per_flow_prb.values().sum();
            prop_assert!(total <= quota);
            for (id, b) in &flows {
                prop_assert!(out.per_flow_prb.get(id).copied().unwrap_or(0) <= *b);
            }
        }
    }
}
