//! Deterministic functional model of the shared RAN: cells with PLMN
//! broadcast, MOCN/GWCN core selection, attach/handover, background traffic,
//! and the per-slot scheduling step.

mod cell;
mod topology;
mod traffic;
mod ue;
mod world;

pub use cell::{CellModel, MAX_BROADCAST_PLMNS};
pub use topology::{CoreConfig, ScenarioArchetype, SharingMode, Topology};
pub use traffic::{BackgroundProfile, BackgroundTraffic, NoiseKind, ProfileSegment};
pub use ue::UeModel;
pub use world::{ActiveGrantView, AttachResult, HandoverResult, SlotOutcome, World};

use crate::domain::{CellId, PlmnId, UeId};

/// Errors from RAN operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RanError {
    #[error("unknown cell {cell}")]
    UnknownCell { cell: CellId },
    #[error("unknown UE {ue}")]
    UnknownUe { ue: UeId },
    #[error("UE {ue} already registered")]
    DuplicateUe { ue: UeId },
    #[error("cell {cell} already broadcasts 6 PLMNs")]
    MaxPlmnExceeded { cell: CellId },
    #[error("cell {cell} already broadcasts PLMN {plmn}")]
    DuplicatePlmn { cell: CellId, plmn: PlmnId },
    #[error("cell {cell} does not broadcast PLMN {plmn}")]
    PlmnNotBroadcast { cell: CellId, plmn: PlmnId },
    #[error("cell {target} is not a neighbor of {serving}")]
    NotNeighbor { serving: CellId, target: CellId },
    #[error("handover rejected: cell {target} does not broadcast PLMN {plmn}")]
    HandoverRejected { target: CellId, plmn: PlmnId },
    #[error("UE {ue} is not attached")]
    UeNotAttached { ue: UeId },
    #[error("clock skew: expected slot {expected}, got {got}")]
    ClockSkew { expected: u64, got: u64 },
    #[error("no core endpoint for PLMN {plmn}")]
    MissingCoreEndpoint { plmn: PlmnId },
    #[error("inconsistent topology: {detail}")]
    InconsistentTopology { detail: String },
}
