//! QoS profile carried by slice requests and grants.

use serde::{Deserialize, Serialize};

/// Radio/core bearer kind. GBR grants keep their reservation even when idle;
/// NON_GBR grants are additionally eligible for spare-capacity sharing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BearerKind {
    #[serde(rename = "GBR")]
    Gbr,
    #[serde(rename = "NON_GBR")]
    NonGbr,
}

/// Requested service quality. Delay/jitter/loss are carried and range-checked;
/// only `priority` affects ordering (pooled mode).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QosProfile {
    pub bearer: BearerKind,
    /// 1 (highest) ..= 15 (lowest).
    pub priority: u8,
    pub delay_budget_ms: f64,
    pub jitter_ms: f64,
    pub loss_rate: f64,
}

pub const PRIORITY_MIN: u8 = 1;
pub const PRIORITY_MAX: u8 = 15;

impl QosProfile {
    /// First out-of-range field name, if any.
    pub fn first_invalid_field(&self) -> Option<&'static str> {
        if !(PRIORITY_MIN..=PRIORITY_MAX).contains(&self.priority) {
            return Some("qos.priority");
        }
        if !(self.delay_budget_ms.is_finite() && self.delay_budget_ms > 0.0) {
            return Some("qos.delay_budget_ms");
        }
        if !(self.jitter_ms.is_finite() && self.jitter_ms >= 0.0) {
            return Some("qos.jitter_ms");
        }
        if !(self.loss_rate.is_finite() && (0.0..=1.0).contains(&self.loss_rate)) {
            return Some("qos.loss_rate");
        }
        None
    }
}
