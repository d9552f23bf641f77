//! Slice archetype templates: broadband, automotive, massive IoT.
//!
//! A template is optional metadata on a request. Scenario files may use it to
//! fill in default QoS/service fields, and the broker's cell-set fallback
//! treats MIOT slices as network-wide.

use serde::{Deserialize, Serialize};

use super::qos::{BearerKind, QosProfile};
use super::service::{MobilityClass, OffloadingPolicy, ServiceInfo};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SliceTemplate {
    /// Mobile broadband: rate-hungry, moderate priority.
    #[serde(rename = "EMBB")]
    Embb,
    /// Automotive: latency and reliability critical, high mobility.
    #[serde(rename = "AUTOMOTIVE")]
    Automotive,
    /// Massive IoT: huge numbers of stationary devices with small data.
    #[serde(rename = "MIOT")]
    Miot,
}

impl SliceTemplate {
    pub fn default_qos(self) -> QosProfile {
        match self {
            SliceTemplate::Embb => QosProfile {
                bearer: BearerKind::NonGbr,
                priority: 8,
                delay_budget_ms: 100.0,
                jitter_ms: 20.0,
                loss_rate: 0.01,
            },
            SliceTemplate::Automotive => QosProfile {
                bearer: BearerKind::Gbr,
                priority: 2,
                delay_budget_ms: 10.0,
                jitter_ms: 1.0,
                loss_rate: 0.0001,
            },
            SliceTemplate::Miot => QosProfile {
                bearer: BearerKind::NonGbr,
                priority: 12,
                delay_budget_ms: 1000.0,
                jitter_ms: 100.0,
                loss_rate: 0.05,
            },
        }
    }

    pub fn default_service(self) -> ServiceInfo {
        match self {
            SliceTemplate::Embb => ServiceInfo {
                mobility: MobilityClass::Medium,
                offloading_policy: OffloadingPolicy::WifiPreferred,
                disruption_tolerance_slots: 5,
                volume: None,
            },
            SliceTemplate::Automotive => ServiceInfo {
                mobility: MobilityClass::High,
                offloading_policy: OffloadingPolicy::None,
                disruption_tolerance_slots: 0,
                volume: None,
            },
            SliceTemplate::Miot => ServiceInfo {
                mobility: MobilityClass::Stationary,
                offloading_policy: OffloadingPolicy::None,
                disruption_tolerance_slots: 600,
                volume: None,
            },
        }
    }
}
