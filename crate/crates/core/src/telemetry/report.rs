//! Privacy-filtered per-tenant KPI reports.
//!
//! A report contains exclusively the requesting tenant's own slices: their
//! aggregates and raw records inside the queried range. Background traffic,
//! other tenants' slices, and cell capacities are withheld.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domain::{SliceId, TenantId};

use super::{MeasurementRecord, TelemetryError, TelemetryStore};

/// Per-slice aggregate KPIs over the queried range's records.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceKpi {
    pub demanded_prb: u64,
    pub delivered_prb: u64,
    pub deficit_prb: u64,
    pub sla_events: u64,
    /// Completed handovers attributed to this slice (whole run, not ranged).
    pub handovers: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KpiReport {
    pub tenant: TenantId,
    pub from_slot: u64,
    pub to_slot: u64,
    pub slices: BTreeMap<SliceId, SliceKpi>,
    pub records: Vec<MeasurementRecord>,
}

/// Build the tenant's report over `[from_slot, to_slot]` (inclusive).
pub fn build_tenant_report(
    store: &TelemetryStore,
    tenant: &TenantId,
    from_slot: u64,
    to_slot: u64,
) -> Result<KpiReport, TelemetryError> {
    if !store.is_registered(tenant) {
        return Err(TelemetryError::UnknownTenant {
            tenant: tenant.clone(),
        });
    }

    let mut slices: BTreeMap<SliceId, SliceKpi> = BTreeMap::new();
    let mut records = Vec::new();
    for record in store.records() {
        if record.slot < from_slot || record.slot > to_slot {
            continue;
        }
        let (Some(slice_id), Some(record_tenant)) = (&record.slice_id, &record.tenant) else {
            continue;
        };
        if record_tenant != tenant {
            continue;
        }
        let kpi = slices.entry(slice_id.clone()).or_default();
        kpi.demanded_prb += record.demanded_prb as u64;
        kpi.delivered_prb += record.delivered_prb as u64;
        kpi.deficit_prb += record.deficit_prb as u64;
        if record.deficit_prb > 0 {
            kpi.sla_events += 1;
        }
        records.push(record.clone());
    }
    for (slice_id, kpi) in &mut slices {
        if let Some(totals) = store.totals(slice_id) {
            kpi.handovers = totals.handovers;
        }
    }

    Ok(KpiReport {
        tenant: tenant.clone(),
        from_slot,
        to_slot,
        slices,
        records,
    })
}
