//! The simulation engine: one serialized decision order over the broker,
//! the world event loop, telemetry, and the append-only logs.
//!
//! Scenario runs and the signaling server both drive this engine; all
//! mutation funnels through it in a single total order, which is what makes
//! runs deterministic and the decision log replayable.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::broker::{
    AdmissionContext, Broker, BrokerError, Decision, DecisionLogRecord, LifecycleEvent,
    LifecycleKind, RejectReason, SliceState,
};
use crate::domain::{
    CellId, EfficiencyTable, RequestId, SliceId, SliceMode, SliceRequest, TenantId, UeId,
    ValidationError,
};
use crate::interfaces::charging::{charging_records, ChargingConfig};
use crate::interfaces::wire::{ChargingRecord, ConfigItfBBody, ConfigItfNBody, UeContextRecord};
use crate::ransim::{BackgroundProfile, RanError, Topology, UeModel, World};
use crate::scheduler::SparePolicy;
use crate::telemetry::{
    build_tenant_report, detect_sla_violations, KpiReport, SlaEvent, TelemetryError, TelemetryStore,
};

/// Scenario-level engine parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub mode: SliceMode,
    pub spare_policy: SparePolicy,
    /// Last materialized slot of the commitment horizon.
    pub horizon_slot: u64,
    pub slots_per_day: u64,
    /// Seasonal forecast window, in days.
    pub forecast_window_days: usize,
    /// Forecast with no history: this fraction of cell capacity.
    pub default_background_fraction: f64,
    pub efficiency: EfficiencyTable,
    pub charging: ChargingConfig,
    pub seed: u64,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            mode: SliceMode::TwoLayer,
            spare_policy: SparePolicy::None,
            horizon_slot: 7 * 86_400,
            slots_per_day: 86_400,
            forecast_window_days: 3,
            default_background_fraction: 0.0,
            efficiency: EfficiencyTable::default(),
            charging: ChargingConfig::default(),
            seed: 0,
        }
    }
}

/// Append-only run events (everything except per-slot measurements, which
/// go to the metrics rows).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum EventRecord {
    #[serde(rename = "LIFECYCLE")]
    Lifecycle(LifecycleEvent),
    #[serde(rename = "CONFIG_ITFN")]
    ConfigItfN(ConfigItfNBody),
    #[serde(rename = "CONFIG_ITFB")]
    ConfigItfB(ConfigItfBBody),
    #[serde(rename = "SLA_VIOLATION")]
    Sla(SlaEvent),
    #[serde(rename = "ATTACH")]
    Attach {
        slot: u64,
        ue_id: UeId,
        cell_id: CellId,
        core_endpoint: String,
    },
    #[serde(rename = "HANDOVER")]
    Handover {
        slot: u64,
        ue_id: UeId,
        source_cell: CellId,
        target_cell: CellId,
    },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Broker(#[from] BrokerError),
    #[error(transparent)]
    Ran(#[from] RanError),
    #[error(transparent)]
    Telemetry(#[from] TelemetryError),
    #[error("conservation violated on cell {cell} at slot {slot}: delivered {delivered} > capacity {capacity}")]
    ConservationViolated {
        cell: CellId,
        slot: u64,
        delivered: u64,
        capacity: u32,
    },
}

/// Counters reported at the end of a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub slots_run: u64,
    pub grants: u64,
    pub rejections: BTreeMap<String, u64>,
    pub sla_events: u64,
    pub activations: u64,
    pub deactivations: u64,
    pub handovers: u64,
    pub charging_total: f64,
}

pub struct Simulation {
    params: SimParams,
    world: World,
    broker: Broker,
    store: TelemetryStore,
    decision_log: Vec<DecisionLogRecord>,
    event_log: Vec<EventRecord>,
    sla_events: Vec<SlaEvent>,
    summary: RunSummary,
}

impl Simulation {
    pub fn new(
        topology: Topology,
        background: BTreeMap<CellId, BackgroundProfile>,
        registered_tenants: impl IntoIterator<Item = TenantId>,
        params: SimParams,
    ) -> Result<Self, SimError> {
        let capacities: BTreeMap<CellId, u32> = topology
            .cells
            .iter()
            .map(|(id, c)| (id.clone(), c.capacity_prb_per_slot))
            .collect();
        let world = World::new(topology, background, params.slots_per_day, params.seed)?;
        let store = TelemetryStore::new(
            params.slots_per_day,
            params.forecast_window_days,
            params.default_background_fraction,
            capacities,
            registered_tenants.into_iter().collect(),
        );
        let broker = Broker::new(params.mode, params.horizon_slot);
        Ok(Self {
            params,
            world,
            broker,
            store,
            decision_log: Vec::new(),
            event_log: Vec::new(),
            sla_events: Vec::new(),
            summary: RunSummary::default(),
        })
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn broker(&self) -> &Broker {
        &self.broker
    }

    pub fn store(&self) -> &TelemetryStore {
        &self.store
    }

    pub fn decision_log(&self) -> &[DecisionLogRecord] {
        &self.decision_log
    }

    pub fn event_log(&self) -> &[EventRecord] {
        &self.event_log
    }

    pub fn sla_events(&self) -> &[SlaEvent] {
        &self.sla_events
    }

    /// Slot the next submission or step belongs to.
    pub fn now_slot(&self) -> u64 {
        self.broker.now_slot()
    }

    pub fn add_ue(&mut self, ue: UeModel) -> Result<(), SimError> {
        self.world.add_ue(ue)?;
        Ok(())
    }

    pub fn attach(&mut self, ue_id: &UeId, cell_id: &CellId) -> Result<(), SimError> {
        let result = self.world.attach(ue_id, cell_id)?;
        self.event_log.push(EventRecord::Attach {
            slot: self.now_slot(),
            ue_id: result.ue_id,
            cell_id: result.cell_id,
            core_endpoint: result.core_endpoint.as_str().to_string(),
        });
        Ok(())
    }

    /// Hand a device over; counts toward the slice currently carrying it.
    pub fn handover(&mut self, ue_id: &UeId, target_cell: &CellId) -> Result<(), SimError> {
        let slice = self.attributed_slice(ue_id);
        let result = self.world.handover(ue_id, target_cell)?;
        self.store.record_handover(slice.as_ref());
        self.summary.handovers += 1;
        self.event_log.push(EventRecord::Handover {
            slot: self.now_slot(),
            ue_id: result.ue_id,
            source_cell: result.source_cell,
            target_cell: result.target_cell,
        });
        Ok(())
    }

    /// The slice a device's traffic currently counts toward, if any.
    fn attributed_slice(&self, ue_id: &UeId) -> Option<SliceId> {
        let ue = self.world.ue(ue_id).ok()?;
        if let Some(bound) = &ue.slice_binding {
            return Some(bound.clone());
        }
        let cell = ue.serving_cell.as_ref()?;
        self.broker
            .registry()
            .active_grant_views()
            .into_iter()
            .filter(|g| g.tenant == ue.owner && g.per_cell_prb.contains_key(cell))
            .map(|g| g.slice_id)
            .min()
    }

    /// Validate and admit a slice request; every outcome (including
    /// validation failures) becomes a logged decision.
    pub fn submit_request(&mut self, request: &SliceRequest) -> Decision {
        let known_cells = self.world.topology().cell_ids();
        let decision = match crate::domain::validate_request(request, &known_cells) {
            Ok(validated) => {
                let locations = self.world.ue_locations();
                let ctx = AdmissionContext {
                    topology: self.world.topology(),
                    forecaster: &self.store,
                    ue_locations: &locations,
                    efficiency: &self.params.efficiency,
                    slots_per_day: self.params.slots_per_day,
                };
                self.broker.admit(&validated, &ctx)
            }
            Err(err) => self.reject_for_validation(request.request_id.clone(), &err),
        };
        match decision.reason {
            None => self.summary.grants += 1,
            Some(reason) => {
                let key = serde_json::to_value(reason)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_else(|| format!("{reason:?}"));
                *self.summary.rejections.entry(key).or_insert(0) += 1;
            }
        }
        self.decision_log.push(DecisionLogRecord::Decision {
            decision: decision.clone(),
            request: request.clone(),
        });
        decision
    }

    fn reject_for_validation(&mut self, request_id: RequestId, err: &ValidationError) -> Decision {
        self.broker.reject_validation(request_id, format!("{err}"))
    }

    /// Release a slice; the release joins the decision order and log.
    pub fn release(&mut self, slice_id: &SliceId) -> Result<(), BrokerError> {
        let seq = self.broker.release(slice_id)?;
        self.decision_log.push(DecisionLogRecord::Release {
            seq,
            slot: self.broker.now_slot(),
            slice_id: slice_id.clone(),
        });
        Ok(())
    }

    /// Advance one slot: broker lifecycle first, then the RAN scheduling
    /// step, then telemetry ingestion and SLA detection.
    pub fn step_slot(&mut self) -> Result<u64, SimError> {
        let slot = self.broker.now_slot();
        let tick = self.broker.tick(slot)?;
        for event in &tick.events {
            match event.transition {
                LifecycleKind::Activate => self.summary.activations += 1,
                LifecycleKind::Deactivate { .. } => self.summary.deactivations += 1,
            }
            self.event_log.push(EventRecord::Lifecycle(event.clone()));
        }
        for push in &tick.pushes {
            let (itf_n, itf_bs) = crate::interfaces::push_config(push);
            self.event_log.push(EventRecord::ConfigItfN(itf_n));
            for itf_b in itf_bs {
                self.event_log.push(EventRecord::ConfigItfB(itf_b));
            }
        }

        let active = self.broker.registry().active_grant_views();
        let outcome = self.world.step(slot, &active, self.params.spare_policy)?;

        for (cell, capacity) in &outcome.effective_capacity {
            let delivered: u64 = outcome
                .records
                .iter()
                .filter(|r| &r.cell_id == cell)
                .map(|r| r.delivered_prb as u64)
                .sum();
            if delivered > *capacity as u64 {
                return Err(SimError::ConservationViolated {
                    cell: cell.clone(),
                    slot,
                    delivered,
                    capacity: *capacity,
                });
            }
        }

        self.store.ingest(&outcome.records)?;
        self.store.ingest_ue_deliveries(slot, &outcome.ue_delivered);
        let sla = detect_sla_violations(&outcome.records);
        self.summary.sla_events += sla.len() as u64;
        for event in sla {
            self.event_log.push(EventRecord::Sla(event.clone()));
            self.sla_events.push(event);
        }
        self.summary.slots_run += 1;
        Ok(slot)
    }

    pub fn kpi_report(
        &self,
        tenant: &TenantId,
        from_slot: u64,
        to_slot: u64,
    ) -> Result<KpiReport, TelemetryError> {
        build_tenant_report(&self.store, tenant, from_slot, to_slot)
    }

    /// Own devices only: serving cell, mobility, recent average rate.
    pub fn context_records(
        &self,
        tenant: &TenantId,
        ue_filter: Option<&[UeId]>,
    ) -> Result<Vec<UeContextRecord>, SimError> {
        let mut records = Vec::new();
        match ue_filter {
            Some(ids) => {
                for id in ids {
                    let ue = self.world.ue(id)?;
                    if &ue.owner != tenant {
                        return Err(SimError::Ran(RanError::UnknownUe { ue: id.clone() }));
                    }
                    records.push(self.context_of(ue));
                }
            }
            None => {
                for ue in self.world.ues() {
                    if &ue.owner == tenant {
                        records.push(self.context_of(ue));
                    }
                }
            }
        }
        Ok(records)
    }

    fn context_of(&self, ue: &UeModel) -> UeContextRecord {
        let avg_prb = self.store.ue_average_delivered_prb(&ue.ue_id);
        let rate = avg_prb * self.params.efficiency.mbps_per_prb(ue.mobility);
        UeContextRecord {
            ue_id: ue.ue_id.clone(),
            serving_cell: ue.serving_cell.clone(),
            mobility: ue.mobility,
            avg_rate_mbps: rate,
        }
    }

    pub fn charging(&self, tenant: Option<&TenantId>, from: u64, to: u64) -> Vec<ChargingRecord> {
        charging_records(
            self.broker.registry(),
            tenant,
            from,
            to,
            &self.params.charging,
        )
    }

    /// Whether a device named in a context filter belongs to the tenant.
    pub fn ue_owner(&self, ue_id: &UeId) -> Option<&TenantId> {
        self.world.ue(ue_id).ok().map(|u| &u.owner)
    }

    /// Close the run: mark the final clock in the decision log and total the
    /// charges.
    pub fn finish(&mut self) -> RunSummary {
        if let Some(clock) = self.broker.registry().clock() {
            self.decision_log
                .push(DecisionLogRecord::Clock { slot: clock });
        }
        let all_charges = self.charging(None, 0, self.broker.registry().horizon_slot());
        self.summary.charging_total = all_charges.iter().map(|r| r.amount).sum();
        self.summary.clone()
    }

    pub fn summary(&self) -> &RunSummary {
        &self.summary
    }

    /// Fixed-column metrics rows for every ingested record:
    /// `slot,cell,slice,tenant,demanded,quota,delivered,deficit`.
    pub fn metrics_csv(&self) -> String {
        let mut out = String::from("slot,cell,slice,tenant,demanded,quota,delivered,deficit\n");
        for r in self.store.records() {
            let slice = r
                .slice_id
                .as_ref()
                .map(|s| s.as_str().to_string())
                .unwrap_or_else(|| "BACKGROUND".to_string());
            let tenant = r
                .tenant
                .as_ref()
                .map(|t| t.to_string())
                .unwrap_or_else(|| "-".to_string());
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.slot,
                r.cell_id,
                slice,
                tenant,
                r.demanded_prb,
                r.quota_prb,
                r.delivered_prb,
                r.deficit_prb
            ));
        }
        out
    }

    /// The registry safety invariant, checked on demand (fail-fast runs call
    /// this after every slot batch).
    pub fn check_invariants(&self) -> Result<(), SimError> {
        self.broker
            .registry()
            .check_capacity(self.world.topology())?;
        Ok(())
    }

    /// Release state for inspection in tests and the replay tool.
    pub fn slice_state(&self, slice: &SliceId) -> Option<SliceState> {
        self.broker.registry().state(slice)
    }

    /// Map a granted request id back to its slice (for scripted releases).
    pub fn slice_of_request(&self, request_id: &RequestId) -> Option<SliceId> {
        self.broker
            .registry()
            .grants()
            .find(|g| &g.request_id == request_id)
            .map(|g| g.slice_id.clone())
    }

    pub fn reject_reason_name(reason: RejectReason) -> &'static str {
        match reason {
            RejectReason::CapacityExceeded => "CAPACITY_EXCEEDED",
            RejectReason::NoFeasibleCells => "NO_FEASIBLE_CELLS",
            RejectReason::ValidationFailed => "VALIDATION_FAILED",
            RejectReason::HorizonExceeded => "HORIZON_EXCEEDED",
        }
    }
}
