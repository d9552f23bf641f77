//! Measurement collection, SLA violation detection, load forecasting for
//! admission, and privacy-filtered tenant reports.

mod report;
mod sla;
mod store;

pub use report::{build_tenant_report, KpiReport, SliceKpi};
pub use sla::{detect_sla_violations, SlaEvent};
pub use store::{MeasurementRecord, SliceTotals, TelemetryStore, UE_RATE_WINDOW_SLOTS};

use crate::domain::{CellId, TenantId};

/// Background load predictor consulted by admission control.
pub trait BackgroundForecaster {
    /// Predicted background PRB demand at (cell, slot-of-day).
    fn forecast_background(&self, cell: &CellId, slot_of_day: u64) -> f64;
}

/// Forecasts zero background everywhere.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroForecast;

impl BackgroundForecaster for ZeroForecast {
    fn forecast_background(&self, _cell: &CellId, _slot_of_day: u64) -> f64 {
        0.0
    }
}

/// Fixed per-(cell, slot-of-day) forecast table; unlisted entries are zero.
#[derive(Debug, Clone, Default)]
pub struct FixedForecast {
    pub loads: std::collections::BTreeMap<(CellId, u64), f64>,
}

impl BackgroundForecaster for FixedForecast {
    fn forecast_background(&self, cell: &CellId, slot_of_day: u64) -> f64 {
        self.loads
            .get(&(cell.clone(), slot_of_day))
            .copied()
            .unwrap_or(0.0)
    }
}

/// Errors from telemetry operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TelemetryError {
    #[error("batch at slot {batch_slot} arrived after slot {last_slot} was ingested")]
    OutOfOrderBatch { last_slot: u64, batch_slot: u64 },
    #[error("malformed record at slot {slot}: {detail}")]
    MalformedRecord { slot: u64, detail: &'static str },
    #[error("unknown tenant {tenant}")]
    UnknownTenant { tenant: TenantId },
}
