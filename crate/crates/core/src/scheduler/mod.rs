//! Radio-resource assignment: inter-slice quotas with isolated per-slice
//! round robin below (two-layer), or policy-ordered pooled selection.

mod apportion;
mod intra;
mod pooled;
mod quota;

pub use apportion::apportion_largest_remainder;
pub use intra::{intra_slice_schedule, IntraSliceSchedule};
pub use pooled::{pooled_schedule, PoolDemand, PoolOrdering, PoolPolicy};
pub use quota::{allocate_quotas, GrantShare, QuotaAssignment, SparePolicy};
