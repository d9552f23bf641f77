//! Largest-remainder (Hamilton) apportionment of integer PRBs.

use std::collections::BTreeMap;

use crate::domain::SliceId;

/// Split `total` units across `weights` proportionally, exactly.
///
/// Each slice gets `floor(total * w / W)` plus, for the units still missing,
/// one extra in order of largest fractional remainder; remainder ties go to
/// the lexicographically smaller slice id. The output always sums to `total`
/// when the weight sum is positive, and is empty otherwise.
pub fn apportion_largest_remainder(
    total: u32,
    weights: &[(SliceId, u64)],
) -> BTreeMap<SliceId, u32> {
    let weight_sum: u128 = weights.iter().map(|(_, w)| *w as u128).sum();
    if weight_sum == 0 {
        return BTreeMap::new();
    }

    let mut shares: BTreeMap<SliceId, u32> = BTreeMap::new();
    let mut remainders: Vec<(u128, SliceId)> = Vec::with_capacity(weights.len());
    let mut assigned: u64 = 0;
    for (id, w) in weights {
        let scaled = total as u128 * *w as u128;
        let base = (scaled / weight_sum) as u32;
        let rem = scaled % weight_sum;
        assigned += base as u64;
        shares.insert(id.clone(), base);
        remainders.push((rem, id.clone()));
    }

    let mut leftover = total as u64 - assigned;
    // Largest remainder first; ties favor the smaller id.
    remainders.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    for (_, id) in remainders {
        if leftover == 0 {
            break;
        }
        *shares.get_mut(&id).expect("share present") += 1;
        leftover -= 1;
    }
    debug_assert_eq!(leftover, 0);
    shares
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sid(s: &str) -> SliceId {
        SliceId::new(s).unwrap()
    }

    #[test]
    fn spare_split_with_remainder_tie_goes_to_smaller_id() {
        // 20 split 30:50 -> raw 7.5 / 12.5, floors 7 / 12, one unit left,
        // equal remainders, smaller id takes it.
        let got = apportion_largest_remainder(20, &[(sid("A"), 30), (sid("B"), 50)]);
        assert_eq!(got[&sid("A")], 8);
        assert_eq!(got[&sid("B")], 12);
    }

    #[test]
    fn exact_proportions_stay_exact() {
        let got = apportion_largest_remainder(100, &[(sid("A"), 60), (sid("B"), 60)]);
        assert_eq!(got[&sid("A")], 50);
        assert_eq!(got[&sid("B")], 50);
    }

    #[test]
    fn zero_weights_yield_empty() {
        assert!(apportion_largest_remainder(10, &[]).is_empty());
        assert!(apportion_largest_remainder(10, &[(sid("A"), 0)]).is_empty());
    }

    proptest! {
        #[test]
        fn sums_exactly_to_total(
            total in 0u32..10_000,
            raw in proptest::collection::vec(0u64..1_000, 1..8),
        ) {
            let weights: Vec<(SliceId, u64)> = raw
                .iter()
                .enumerate()
                .map(|(i, w)| (sid(&format!("s{i}")), *w))
                .collect();
            let got = apportion_largest_remainder(total, &weights);
            if weights.iter().any(|(_, w)| *w > 0) {
                let sum: u64 = got.values().map(|v| *v as u64).sum();
                prop_assert_eq!(sum, total as u64);
                // No share exceeds its ideal by more than one unit.
                let weight_sum: u128 = raw.iter().map(|w| *w as u128).sum();
                for (id, w) in &weights {
                    let ideal = total as u128 * *w as u128 / weight_sum;
                    let share = got[id] as u128;
                    prop_assert!(share == ideal || share == ideal + 1);
                }
            } else {
                prop_assert!(got.is_empty());
            }
        }
    }
}
