//! Admission outcomes.

use serde::{Deserialize, Serialize};

use crate::domain::{RequestId, SliceGrant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DecisionOutcome {
    #[serde(rename = "GRANTED")]
    Granted,
    #[serde(rename = "REJECTED")]
    Rejected,
}

/// Machine-readable rejection reasons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RejectReason {
    #[serde(rename = "CAPACITY_EXCEEDED")]
    CapacityExceeded,
    #[serde(rename = "NO_FEASIBLE_CELLS")]
    NoFeasibleCells,
    #[serde(rename = "VALIDATION_FAILED")]
    ValidationFailed,
    #[serde(rename = "HORIZON_EXCEEDED")]
    HorizonExceeded,
}

/// One serialized admission decision. Granted decisions carry the grant and
/// no reason; rejected decisions carry a reason and no grant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    /// Position in the broker's total decision order.
    pub seq: u64,
    /// Slot at which the decision was taken.
    pub slot: u64,
    pub request_id: RequestId,
    pub outcome: DecisionOutcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grant: Option<SliceGrant>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<RejectReason>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Decision {
    pub fn granted(seq: u64, slot: u64, grant: SliceGrant) -> Self {
        Self {
            seq,
            slot,
            request_id: grant.request_id.clone(),
            outcome: DecisionOutcome::Granted,
            grant: Some(grant),
            reason: None,
            detail: None,
        }
    }

    pub fn rejected(
        seq: u64,
        slot: u64,
        request_id: RequestId,
        reason: RejectReason,
        detail: impl Into<String>,
    ) -> Self {
        Self {
            seq,
            slot,
            request_id,
            outcome: DecisionOutcome::Rejected,
            grant: None,
            reason: Some(reason),
            detail: Some(detail.into()),
        }
    }

    pub fn is_granted(&self) -> bool {
        self.outcome == DecisionOutcome::Granted
    }
}
