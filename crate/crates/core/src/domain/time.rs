//! Slot-based timing of slice requests.
//!
//! Time is discretized into uniform slots (one simulated second by default).
//! A request is either one-shot (`[start, start+duration)`) or periodic with
//! period `P > duration`, recurring at `start + k*P` for as long as the
//! recurrence start stays within the optional window end.

use serde::{Deserialize, Serialize};

/// When a slice is active: start, duration, optional periodicity and window.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TimeSpec {
    pub start_slot: u64,
    pub duration_slots: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periodicity_slots: Option<u64>,
    /// Last slot index at which a recurrence may begin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_end_slot: Option<u64>,
}

impl TimeSpec {
    pub fn once(start_slot: u64, duration_slots: u64) -> Self {
        Self {
            start_slot,
            duration_slots,
            periodicity_slots: None,
            window_end_slot: None,
        }
    }

    pub fn periodic(start_slot: u64, duration_slots: u64, periodicity_slots: u64) -> Self {
        Self {
            start_slot,
            duration_slots,
            periodicity_slots: Some(periodicity_slots),
            window_end_slot: None,
        }
    }

    pub fn with_window_end(mut self, window_end_slot: u64) -> Self {
        self.window_end_slot = Some(window_end_slot);
        self
    }

    /// Structural validity: positive duration, `P > duration`, window not
    /// before the first start.
    pub fn is_valid(&self) -> bool {
        if self.duration_slots == 0 {
            return false;
        }
        if let Some(p) = self.periodicity_slots {
            if p <= self.duration_slots {
                return false;
            }
        }
        if let Some(w) = self.window_end_slot {
            if w < self.start_slot {
                return false;
            }
        }
        true
    }

    /// A finite spec has a last recurrence; an unbounded periodic spec does not.
    pub fn is_finite(&self) -> bool {
        self.periodicity_slots.is_none() || self.window_end_slot.is_some()
    }

    /// End (exclusive) of the last interval, for finite specs.
    pub fn final_end_slot(&self) -> Option<u64> {
        match self.periodicity_slots {
            None => Some(self.start_slot + self.duration_slots),
            Some(p) => {
                let window_end = self.window_end_slot?;
                let k = (window_end - self.start_slot) / p;
                Some(self.start_slot + k * p + self.duration_slots)
            }
        }
    }

    /// All `[start, end)` intervals whose start slot is `<= horizon_slot`
    /// (and within the window end, if set), sorted and pairwise disjoint.
    pub fn active_intervals(&self, horizon_slot: u64) -> Vec<(u64, u64)> {
        let cap = match self.window_end_slot {
            Some(w) => w.min(horizon_slot),
            None => horizon_slot,
        };
        let mut out = Vec::new();
        match self.periodicity_slots {
            None => {
                if self.start_slot <= cap {
                    out.push((self.start_slot, self.start_slot + self.duration_slots));
                }
            }
            Some(p) => {
                let mut s = self.start_slot;
                while s <= cap {
                    out.push((s, s + self.duration_slots));
                    s += p;
                }
            }
        }
        out
    }

    /// Does any interval (start `<=` window end) cover `slot`?
    pub fn active_at(&self, slot: u64) -> bool {
        if slot < self.start_slot {
            return false;
        }
        match self.periodicity_slots {
            None => slot < self.start_slot + self.duration_slots,
            Some(p) => {
                let offset = (slot - self.start_slot) % p;
                let k_start = slot - offset;
                if let Some(w) = self.window_end_slot {
                    if k_start > w {
                        return false;
                    }
                }
                offset < self.duration_slots
            }
        }
    }

    /// Does an interval begin exactly at `slot`?
    pub fn starts_at(&self, slot: u64) -> bool {
        if slot < self.start_slot {
            return false;
        }
        if let Some(w) = self.window_end_slot {
            if slot > w {
                return false;
            }
        }
        match self.periodicity_slots {
            None => slot == self.start_slot,
            Some(p) => (slot - self.start_slot).is_multiple_of(p),
        }
    }

    /// Does an interval end exactly at `slot` (i.e. `slot` is the first slot
    /// after an active stretch)?
    pub fn ends_at(&self, slot: u64) -> bool {
        let first_end = self.start_slot + self.duration_slots;
        if slot < first_end {
            return false;
        }
        match self.periodicity_slots {
            None => slot == first_end,
            Some(p) => {
                if !(slot - first_end).is_multiple_of(p) {
                    return false;
                }
                let interval_start = slot - self.duration_slots;
                match self.window_end_slot {
                    Some(w) => interval_start <= w,
                    None => true,
                }
            }
        }
    }

    /// Is there a recurrence starting strictly after `slot`?
    pub fn recurs_after(&self, slot: u64) -> bool {
        match self.periodicity_slots {
            None => slot < self.start_slot,
            Some(p) => {
                let next = if slot < self.start_slot {
                    self.start_slot
                } else {
                    let k = (slot - self.start_slot) / p + 1;
                    self.start_slot + k * p
                };
                match self.window_end_slot {
                    Some(w) => next <= w,
                    None => true,
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn periodic_intervals_up_to_horizon() {
        let t = TimeSpec::periodic(0, 5, 20);
        assert_eq!(
            t.active_intervals(100),
            vec![(0, 5), (20, 25), (40, 45), (60, 65), (80, 85), (100, 105)]
        );
    }

    #[test]
    fn one_shot_interval() {
        let t = TimeSpec::once(7, 3);
        assert_eq!(t.active_intervals(100), vec![(7, 10)]);
        assert_eq!(t.active_intervals(6), Vec::<(u64, u64)>::new());
    }

    #[test]
    fn window_end_excludes_later_recurrences() {
        let t = TimeSpec::periodic(0, 5, 20).with_window_end(39);
        assert_eq!(t.active_intervals(100), vec![(0, 5), (20, 25)]);
    }

    #[test]
    fn validity_rules() {
        assert!(!TimeSpec::periodic(0, 10, 5).is_valid());
        assert!(!TimeSpec::periodic(0, 10, 10).is_valid());
        assert!(TimeSpec::periodic(0, 10, 11).is_valid());
        assert!(!TimeSpec::once(5, 0).is_valid());
        assert!(!TimeSpec::once(5, 1).with_window_end(4).is_valid());
    }

    #[test]
    fn boundary_predicates_agree_with_intervals() {
        let t = TimeSpec::periodic(3, 4, 10).with_window_end(23);
        let intervals = t.active_intervals(1000);
        assert_eq!(intervals, vec![(3, 7), (13, 17), (23, 27)]);
        for slot in 0..40 {
            let in_interval = intervals.iter().any(|&(a, b)| slot >= a && slot < b);
            assert_eq!(t.active_at(slot), in_interval, "slot {slot}");
            let starts = intervals.iter().any(|&(a, _)| slot == a);
            assert_eq!(t.starts_at(slot), starts, "slot {slot}");
            let ends = intervals.iter().any(|&(_, b)| slot == b);
            assert_eq!(t.ends_at(slot), ends, "slot {slot}");
        }
    }

    prop_compose! {
        fn arb_timespec()(
            start in 0u64..50,
            dur in 1u64..12,
            periodic in proptest::option::of(0u64..30),
            window in proptest::option::of(0u64..120),
        ) -> TimeSpec {
            TimeSpec {
                start_slot: start,
                duration_slots: dur,
                periodicity_slots: periodic.map(|extra| dur + 1 + extra),
                window_end_slot: window.map(|w| start + w),
            }
        }
    }

    proptest! {
        #[test]
        fn intervals_sorted_and_disjoint(t in arb_timespec(), horizon in 0u64..300) {
            prop_assume!(t.is_valid());
            let intervals = t.active_intervals(horizon);
            for w in intervals.windows(2) {
                prop_assert!(w[0].1 <= w[1].0, "{:?}", intervals);
            }
            for &(a, b) in &intervals {
                prop_assert!(a < b);
                prop_assert!(a <= horizon);
            }
        }

        #[test]
        fn active_at_matches_interval_membership(t in arb_timespec(), slot in 0u64..400) {
            prop_assume!(t.is_valid());
            let intervals = t.active_intervals(slot);
            let member = intervals.iter().any(|&(a, b)| slot >= a && slot < b);
            prop_assert_eq!(t.active_at(slot), member);
        }
    }
}
