//! The broker's committed reservation for an admitted slice.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ids::{CellId, RequestId, SliceId, TenantId};
use super::qos::{BearerKind, QosProfile};
use super::time::TimeSpec;

/// Radio-resource assignment mode configured for a grant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SliceMode {
    /// Inter-slice quotas with isolated per-tenant scheduling below.
    #[serde(rename = "TWO_LAYER")]
    TwoLayer,
    /// Policy-ordered selection from a shared pool.
    #[serde(rename = "POOLED")]
    Pooled,
}

/// An isolated amount of per-cell capacity committed to one tenant for the
/// admitted time windows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceGrant {
    pub slice_id: SliceId,
    pub request_id: RequestId,
    pub tenant: TenantId,
    /// PRB per slot reserved on each cell of the slice; values are positive.
    pub per_cell_prb: BTreeMap<CellId, u32>,
    pub time: TimeSpec,
    pub qos: QosProfile,
    pub mode: SliceMode,
}

impl SliceGrant {
    /// NON_GBR grants may take a share of unused capacity when the scenario
    /// enables proportional spare sharing.
    pub fn spare_eligible(&self) -> bool {
        self.qos.bearer == BearerKind::NonGbr
    }
}
