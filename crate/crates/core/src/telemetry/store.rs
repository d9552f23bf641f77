//! Measurement ingestion and the seasonal background-load forecaster.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::domain::{CellId, SliceId, TenantId, UeId};

use super::TelemetryError;

/// One (slot, cell, slice-or-background) measurement. `slice_id == None`
/// marks background (non-sliced) traffic, which is never exported to tenants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub slot: u64,
    pub cell_id: CellId,
    pub slice_id: Option<SliceId>,
    pub tenant: Option<TenantId>,
    pub demanded_prb: u32,
    /// Share assigned by the scheduler this slot (0 for background rows).
    pub quota_prb: u32,
    pub delivered_prb: u32,
    /// Granted-but-undelivered PRBs: `max(0, min(granted, demanded) - delivered)`.
    pub deficit_prb: u32,
}

impl MeasurementRecord {
    pub fn is_background(&self) -> bool {
        self.slice_id.is_none()
    }
}

/// Running totals per slice.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceTotals {
    pub demanded_prb: u64,
    pub delivered_prb: u64,
    pub deficit_prb: u64,
    pub sla_events: u64,
    pub handovers: u64,
}

/// Window of recent per-device deliveries used for average-rate context.
pub const UE_RATE_WINDOW_SLOTS: u64 = 10;

/// Serialized single-writer measurement store with per-(cell, slot-of-day)
/// background history for forecasting.
#[derive(Debug, Clone)]
pub struct TelemetryStore {
    slots_per_day: u64,
    /// Seasonal window: how many past days to average per slot-of-day.
    window_days: usize,
    /// `default_background_fraction * capacity` is the forecast with no history.
    default_background_fraction: f64,
    cell_capacity: BTreeMap<CellId, u32>,
    registered_tenants: BTreeSet<TenantId>,
    records: Vec<MeasurementRecord>,
    last_slot: Option<u64>,
    background_history: BTreeMap<(CellId, u64), VecDeque<f64>>,
    totals: BTreeMap<SliceId, SliceTotals>,
    slice_tenant: BTreeMap<SliceId, TenantId>,
    ue_recent: BTreeMap<UeId, VecDeque<(u64, u32)>>,
}

impl TelemetryStore {
    pub fn new(
        slots_per_day: u64,
        window_days: usize,
        default_background_fraction: f64,
        cell_capacity: BTreeMap<CellId, u32>,
        registered_tenants: BTreeSet<TenantId>,
    ) -> Self {
        Self {
            slots_per_day: slots_per_day.max(1),
            window_days: window_days.max(1),
            default_background_fraction,
            cell_capacity,
            registered_tenants,
            records: Vec::new(),
            last_slot: None,
            background_history: BTreeMap::new(),
            totals: BTreeMap::new(),
            slice_tenant: BTreeMap::new(),
            ue_recent: BTreeMap::new(),
        }
    }

    pub fn slots_per_day(&self) -> u64 {
        self.slots_per_day
    }

    pub fn window_days(&self) -> usize {
        self.window_days
    }

    pub fn last_slot(&self) -> Option<u64> {
        self.last_slot
    }

    pub fn records(&self) -> &[MeasurementRecord] {
        &self.records
    }

    pub fn record_count(&self) -> usize {
        self.records.len()
    }

    pub fn is_registered(&self, tenant: &TenantId) -> bool {
        self.registered_tenants.contains(tenant)
    }

    pub fn totals(&self, slice: &SliceId) -> Option<&SliceTotals> {
        self.totals.get(slice)
    }

    /// Append a batch of records. Batches must not go back in time relative
    /// to what was already ingested.
    pub fn ingest(&mut self, batch: &[MeasurementRecord]) -> Result<(), TelemetryError> {
        if batch.is_empty() {
            return Ok(());
        }
        let min_slot = batch.iter().map(|r| r.slot).min().expect("non-empty");
        if let Some(last) = self.last_slot {
            if min_slot < last {
                return Err(TelemetryError::OutOfOrderBatch {
                    last_slot: last,
                    batch_slot: min_slot,
                });
            }
        }
        let max_slot = batch.iter().map(|r| r.slot).max().expect("non-empty");

        for record in batch {
            match (&record.slice_id, &record.tenant) {
                (Some(slice), Some(tenant)) => {
                    let totals = self.totals.entry(slice.clone()).or_default();
                    totals.demanded_prb += record.demanded_prb as u64;
                    totals.delivered_prb += record.delivered_prb as u64;
                    totals.deficit_prb += record.deficit_prb as u64;
                    if record.deficit_prb > 0 {
                        totals.sla_events += 1;
                    }
                    self.slice_tenant.insert(slice.clone(), tenant.clone());
                }
                (None, None) => {
                    let key = (record.cell_id.clone(), record.slot % self.slots_per_day);
                    let history = self.background_history.entry(key).or_default();
                    history.push_back(record.demanded_prb as f64);
                    while history.len() > self.window_days {
                        history.pop_front();
                    }
                }
                _ => {
                    return Err(TelemetryError::MalformedRecord {
                        slot: record.slot,
                        detail: "slice_id and tenant must be both set or both absent",
                    })
                }
            }
            self.records.push(record.clone());
        }
        self.last_slot = Some(max_slot.max(self.last_slot.unwrap_or(0)));
        Ok(())
    }

    /// Record per-device deliveries for average-rate context answers.
    pub fn ingest_ue_deliveries(&mut self, slot: u64, delivered: &[(UeId, u32)]) {
        for (ue, prb) in delivered {
            let window = self.ue_recent.entry(ue.clone()).or_default();
            window.push_back((slot, *prb));
            while let Some((s, _)) = window.front() {
                if slot.saturating_sub(*s) >= UE_RATE_WINDOW_SLOTS {
                    window.pop_front();
                } else {
                    break;
                }
            }
        }
    }

    /// Count a completed handover against a slice (the device's slice at the
    /// time, when known).
    pub fn record_handover(&mut self, slice: Option<&SliceId>) {
        if let Some(slice) = slice {
            self.totals.entry(slice.clone()).or_default().handovers += 1;
        }
    }

    /// Mean delivered PRB/slot for a device over the last
    /// [`UE_RATE_WINDOW_SLOTS`] slots ending at the store's last slot.
    pub fn ue_average_delivered_prb(&self, ue: &UeId) -> f64 {
        let Some(now) = self.last_slot else {
            return 0.0;
        };
        let Some(window) = self.ue_recent.get(ue) else {
            return 0.0;
        };
        let from = now.saturating_sub(UE_RATE_WINDOW_SLOTS - 1);
        let total: u64 = window
            .iter()
            .filter(|(s, _)| *s >= from && *s <= now)
            .map(|(_, p)| *p as u64)
            .sum();
        total as f64 / UE_RATE_WINDOW_SLOTS as f64
    }

    pub fn tenant_of_slice(&self, slice: &SliceId) -> Option<&TenantId> {
        self.slice_tenant.get(slice)
    }

    /// Seasonal moving average of background load at (cell, slot-of-day):
    /// the mean of the last `k` observations, or the configured default
    /// fraction of the cell's capacity when nothing was observed yet.
    pub fn forecast_background_windowed(&self, cell: &CellId, slot_of_day: u64, k: usize) -> f64 {
        let k = k.max(1);
        let history = self
            .background_history
            .get(&(cell.clone(), slot_of_day % self.slots_per_day));
        match history {
            Some(h) if !h.is_empty() => {
                let take = h.len().min(k);
                let sum: f64 = h.iter().rev().take(take).sum();
                sum / take as f64
            }
            _ => {
                let capacity = self.cell_capacity.get(cell).copied().unwrap_or(0);
                self.default_background_fraction * capacity as f64
            }
        }
    }
}

impl super::BackgroundForecaster for TelemetryStore {
    fn forecast_background(&self, cell: &CellId, slot_of_day: u64) -> f64 {
        self.forecast_background_windowed(cell, slot_of_day, self.window_days)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::telemetry::BackgroundForecaster;

    fn cid(s: &str) -> CellId {
        CellId::new(s).unwrap()
    }

    fn store() -> TelemetryStore {
        TelemetryStore::new(
            10,
            3,
            0.0,
            BTreeMap::from([(cid("C1"), 100)]),
            BTreeSet::from([TenantId::operator("00101").unwrap()]),
        )
    }

    fn background(slot: u64, demanded: u32) -> MeasurementRecord {
        MeasurementRecord {
            slot,
            cell_id: cid("C1"),
            slice_id: None,
            tenant: None,
            demanded_prb: demanded,
            quota_prb: 0,
            delivered_prb: demanded,
            deficit_prb: 0,
        }
    }

    #[test]
    fn empty_batch_changes_nothing() {
        let mut s = store();
        s.ingest(&[]).unwrap();
        assert_eq!(s.record_count(), 0);
        assert_eq!(s.last_slot(), None);
    }

    #[test]
    fn out_of_order_batches_are_rejected() {
        let mut s = store();
        s.ingest(&[background(9, 5)]).unwrap();
        let err = s.ingest(&[background(5, 5)]).unwrap_err();
        assert!(matches!(err, TelemetryError::OutOfOrderBatch { .. }));
    }

    #[test]
    fn forecast_is_mean_of_last_k_observations() {
        let mut s = store();
        // Same slot-of-day (slot % 10 == 3) across four days.
        for (day, load) in [(0u64, 40u32), (1, 10), (2, 20), (3, 30)] {
            s.ingest(&[background(day * 10 + 3, load)]).unwrap();
        }
        // Window of 3 days drops the oldest observation (40).
        assert_eq!(s.forecast_background(&cid("C1"), 3), 20.0);
        assert_eq!(s.forecast_background_windowed(&cid("C1"), 3, 2), 25.0);
    }

    #[test]
    fn forecast_without_history_uses_default_fraction() {
        let s = store();
        assert_eq!(s.forecast_background(&cid("C1"), 3), 0.0);
        let s2 = TelemetryStore::new(
            10,
            3,
            0.25,
            BTreeMap::from([(cid("C1"), 100)]),
            BTreeSet::new(),
        );
        assert_eq!(s2.forecast_background(&cid("C1"), 3), 25.0);
    }

    #[test]
    fn aggregates_match_naive_recomputation() {
        let mut s = store();
        let slice = SliceId::new("sl-000001").unwrap();
        let tenant = TenantId::operator("00101").unwrap();
        let mut batch = Vec::new();
        for slot in 0..20u64 {
            batch.push(MeasurementRecord {
                slot,
                cell_id: cid("C1"),
                slice_id: Some(slice.clone()),
                tenant: Some(tenant.clone()),
                demanded_prb: 10 + slot as u32,
                quota_prb: 10,
                delivered_prb: 10,
                deficit_prb: if slot % 4 == 0 { 2 } else { 0 },
            });
        }
        s.ingest(&batch).unwrap();
        let naive_demand: u64 = batch.iter().map(|r| r.demanded_prb as u64).sum();
        let naive_deficit: u64 = batch.iter().map(|r| r.deficit_prb as u64).sum();
        let naive_events = batch.iter().filter(|r| r.deficit_prb > 0).count() as u64;
        let totals = s.totals(&slice).unwrap();
        assert_eq!(totals.demanded_prb, naive_demand);
        assert_eq!(totals.deficit_prb, naive_deficit);
        assert_eq!(totals.sla_events, naive_events);
        assert_eq!(s.record_count(), batch.len());
    }

    #[test]
    fn ue_rate_window_covers_last_ten_slots() {
        let mut s = store();
        for slot in 0..30u64 {
            s.ingest(&[background(slot, 0)]).unwrap();
            s.ingest_ue_deliveries(slot, &[(UeId::new("u1").unwrap(), 5)]);
        }
        // 5 PRB in each of the last 10 slots.
        assert_eq!(s.ue_average_delivered_prb(&UeId::new("u1").unwrap()), 5.0);
        assert_eq!(s.ue_average_delivered_prb(&UeId::new("u2").unwrap()), 0.0);
    }
}

#[cfg(test)]
mod forecast_bounds {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        // History within [0, capacity] keeps every forecast within bounds.
        #[test]
        fn forecast_stays_within_capacity(
            history in proptest::collection::vec(0u32..=100, 0..12),
            k in 1usize..6,
        ) {
            let cell = CellId::new("C1").unwrap();
            let mut store = TelemetryStore::new(
                10,
                k,
                0.3,
                BTreeMap::from([(cell.clone(), 100u32)]),
                BTreeSet::new(),
            );
            for (day, load) in history.iter().enumerate() {
                store
                    .ingest(&[MeasurementRecord {
                        slot: day as u64 * 10 + 4,
                        cell_id: cell.clone(),
                        slice_id: None,
                        tenant: None,
                        demanded_prb: *load,
                        quota_prb: 0,
                        delivered_prb: *load,
                        deficit_prb: 0,
                    }])
                    .unwrap();
            }
            let forecast = store.forecast_background_windowed(&cell, 4, k);
            prop_assert!(forecast >= 0.0);
            prop_assert!(forecast <= 100.0, "forecast {forecast}");
        }
    }
}
