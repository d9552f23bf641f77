//! Resource sizing of a slice request and the rate→PRB conversion.

use serde::{Deserialize, Serialize};

use super::service::MobilityClass;
use super::DomainError;

/// How a request sizes its slice: directly in PRB/slot or as a data rate
/// converted at admission time through the per-mobility efficiency table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ResourceSpecRepr", into = "ResourceSpecRepr")]
pub enum ResourceSpec {
    PhysicalPrb { prb_per_slot: u32 },
    DataRate { rate_mbps: f64 },
}

impl ResourceSpec {
    pub fn physical(prb_per_slot: u32) -> Self {
        ResourceSpec::PhysicalPrb { prb_per_slot }
    }

    pub fn data_rate(rate_mbps: f64) -> Self {
        ResourceSpec::DataRate { rate_mbps }
    }

    /// Non-empty: a positive PRB count or a positive finite rate.
    pub fn is_populated(&self) -> bool {
        match self {
            ResourceSpec::PhysicalPrb { prb_per_slot } => *prb_per_slot > 0,
            ResourceSpec::DataRate { rate_mbps } => rate_mbps.is_finite() && *rate_mbps > 0.0,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ResourceSpecRepr {
    kind: ResourceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prb_per_slot: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rate_mbps: Option<f64>,
}

#[derive(Serialize, Deserialize)]
enum ResourceKind {
    #[serde(rename = "PHYSICAL_PRB")]
    PhysicalPrb,
    #[serde(rename = "DATA_RATE")]
    DataRate,
}

impl TryFrom<ResourceSpecRepr> for ResourceSpec {
    type Error = DomainError;
    fn try_from(repr: ResourceSpecRepr) -> Result<Self, Self::Error> {
        match (repr.kind, repr.prb_per_slot, repr.rate_mbps) {
            (ResourceKind::PhysicalPrb, Some(prb), None) => {
                Ok(ResourceSpec::PhysicalPrb { prb_per_slot: prb })
            }
            (ResourceKind::DataRate, None, Some(rate)) => {
                Ok(ResourceSpec::DataRate { rate_mbps: rate })
            }
            _ => Err(DomainError::BadResourceSpec),
        }
    }
}

impl From<ResourceSpec> for ResourceSpecRepr {
    fn from(spec: ResourceSpec) -> Self {
        match spec {
            ResourceSpec::PhysicalPrb { prb_per_slot } => ResourceSpecRepr {
                kind: ResourceKind::PhysicalPrb,
                prb_per_slot: Some(prb_per_slot),
                rate_mbps: None,
            },
            ResourceSpec::DataRate { rate_mbps } => ResourceSpecRepr {
                kind: ResourceKind::DataRate,
                prb_per_slot: None,
                rate_mbps: Some(rate_mbps),
            },
        }
    }
}

/// Spectral efficiency per mobility class, in Mbps carried by one PRB per slot.
/// Faster-moving devices get a more conservative figure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyTable {
    pub stationary: f64,
    pub low: f64,
    pub medium: f64,
    pub high: f64,
}

impl Default for EfficiencyTable {
    fn default() -> Self {
        Self {
            stationary: 1.0,
            low: 0.8,
            medium: 0.6,
            high: 0.4,
        }
    }
}

impl EfficiencyTable {
    pub fn mbps_per_prb(&self, mobility: MobilityClass) -> f64 {
        match mobility {
            MobilityClass::Stationary => self.stationary,
            MobilityClass::Low => self.low,
            MobilityClass::Medium => self.medium,
            MobilityClass::High => self.high,
        }
    }

    pub fn is_valid(&self) -> bool {
        [self.stationary, self.low, self.medium, self.high]
            .iter()
            .all(|e| e.is_finite() && *e > 0.0)
    }
}

/// Smallest PRB/slot count whose carried rate covers `rate_mbps`: exact
/// ceiling division `ceil(rate / efficiency)`.
///
/// The float ceil is adjusted by at most one step so the result is the true
/// minimal integer with `n * efficiency >= rate`, immune to f64 rounding
/// landing on either side of an integer boundary. Always >= 1 for positive
/// rates, and monotone non-decreasing in `rate_mbps`.
pub fn rate_to_prb(rate_mbps: f64, mobility: MobilityClass, table: &EfficiencyTable) -> u32 {
    debug_assert!(rate_mbps > 0.0 && rate_mbps.is_finite());
    let eff = table.mbps_per_prb(mobility);
    debug_assert!(eff > 0.0);
    let mut n = (rate_mbps / eff).ceil().max(1.0) as u64;
    while n > 1 && (n - 1) as f64 * eff >= rate_mbps {
        n -= 1;
    }
    while (n as f64) * eff < rate_mbps {
        n += 1;
    }
    n.min(u32::MAX as u64) as u32
}
