//! Shared vocabulary types, validation, and unit conversions.

mod grant;
mod ids;
mod qos;
mod request;
mod resources;
mod service;
mod template;
mod time;

pub use grant::{SliceGrant, SliceMode};
pub use ids::{CellId, EndpointId, PlmnId, RequestId, ServiceId, SliceId, TenantId, UeId};
pub use qos::{BearerKind, QosProfile, PRIORITY_MAX, PRIORITY_MIN};
pub use request::{
    required_prb_per_cell, validate_request, SliceRequest, ValidatedRequest, ValidationCode,
    ValidationError,
};
pub use resources::{rate_to_prb, EfficiencyTable, ResourceSpec};
pub use service::{MobilityClass, OffloadingPolicy, ServiceInfo, VolumeDescriptor};
pub use template::SliceTemplate;
pub use time::TimeSpec;

/// Errors from constructing domain values.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DomainError {
    #[error("invalid {kind} {value:?}: {detail}")]
    BadIdentifier {
        kind: &'static str,
        value: String,
        detail: &'static str,
    },
    #[error("resource spec must carry exactly the payload matching its kind")]
    BadResourceSpec,
}
