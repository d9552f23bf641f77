//! SLA violation detection over slot measurements.

use serde::{Deserialize, Serialize};

use crate::domain::{CellId, SliceId, TenantId};

use super::MeasurementRecord;

/// A slice received less than it was due in one (cell, slot).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlaEvent {
    pub slot: u64,
    pub cell_id: CellId,
    pub slice_id: SliceId,
    pub tenant: TenantId,
    pub deficit_prb: u32,
}

/// One event per slice record with a positive deficit; background rows never
/// produce events.
pub fn detect_sla_violations(records: &[MeasurementRecord]) -> Vec<SlaEvent> {
    records
        .iter()
        .filter(|r| r.deficit_prb > 0)
        .filter_map(|r| {
            let slice_id = r.slice_id.clone()?;
            let tenant = r.tenant.clone()?;
            Some(SlaEvent {
                slot: r.slot,
                cell_id: r.cell_id.clone(),
                slice_id,
                tenant,
                deficit_prb: r.deficit_prb,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(slot: u64, cell: &str, slice: Option<&str>, deficit: u32) -> MeasurementRecord {
        MeasurementRecord {
            slot,
            cell_id: CellId::new(cell).unwrap(),
            slice_id: slice.map(|s| SliceId::new(s).unwrap()),
            tenant: slice.map(|_| TenantId::operator("00101").unwrap()),
            demanded_prb: 50,
            quota_prb: 50 - deficit,
            delivered_prb: 50 - deficit,
            deficit_prb: deficit,
        }
    }

    #[test]
    fn full_delivery_produces_no_events() {
        let records = vec![record(1, "C1", Some("sl-000001"), 0)];
        assert!(detect_sla_violations(&records).is_empty());
    }

    #[test]
    fn deficit_produces_one_event_with_the_amount() {
        let records = vec![record(1, "C1", Some("sl-000001"), 10)];
        let events = detect_sla_violations(&records);
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].deficit_prb, 10);
        assert_eq!(events[0].slice_id.as_str(), "sl-000001");
    }

    #[test]
    fn background_rows_never_raise_events() {
        let records = vec![record(1, "C1", None, 0)];
        assert!(detect_sla_violations(&records).is_empty());
    }
}
