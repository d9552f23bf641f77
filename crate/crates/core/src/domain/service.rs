//! Service-related request information: mobility, offloading, volume.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MobilityClass {
    #[serde(rename = "STATIONARY")]
    Stationary,
    #[serde(rename = "LOW")]
    Low,
    #[serde(rename = "MEDIUM")]
    Medium,
    #[serde(rename = "HIGH")]
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OffloadingPolicy {
    #[serde(rename = "NONE")]
    None,
    #[serde(rename = "WIFI_PREFERRED")]
    WifiPreferred,
    #[serde(rename = "EDGE_PREFERRED")]
    EdgePreferred,
}

/// A file (or bulk transfer) to complete by a deadline; spread evenly over
/// the slots up to the deadline it yields an equivalent data rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeDescriptor {
    pub file_size_mb: f64,
    pub deadline_slot: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceInfo {
    pub mobility: MobilityClass,
    pub offloading_policy: OffloadingPolicy,
    pub disruption_tolerance_slots: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume: Option<VolumeDescriptor>,
}

impl ServiceInfo {
    pub fn new(mobility: MobilityClass) -> Self {
        Self {
            mobility,
            offloading_policy: OffloadingPolicy::None,
            disruption_tolerance_slots: 0,
            volume: None,
        }
    }

    /// Equivalent Mbps of a volume descriptor relative to `start_slot`
    /// (one slot = one second). None when absent.
    pub fn volume_rate_mbps(&self, start_slot: u64) -> Option<f64> {
        let v = self.volume.as_ref()?;
        if v.deadline_slot <= start_slot {
            return None;
        }
        Some(v.file_size_mb / (v.deadline_slot - start_slot) as f64)
    }
}
