//! The network slice broker: serialized admission control, slice registry
//! and lifecycle, cell-set determination, and configuration push toward the
//! RAN.
//!
//! The broker is a single logical decision engine: admissions, releases, and
//! clock ticks execute in one total order, and replaying the decision log
//! reconstructs the registry exactly.

mod decision;
mod log;
mod registry;

pub use decision::{Decision, DecisionOutcome, RejectReason};
pub use log::{replay_decisions, DecisionLogRecord};
pub use registry::{SliceRegistry, SliceState};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domain::{
    required_prb_per_cell, CellId, EfficiencyTable, SliceGrant, SliceId, SliceMode, SliceTemplate,
    TenantId, ValidatedRequest,
};
use crate::ransim::Topology;
use crate::telemetry::BackgroundForecaster;

/// Errors from broker operations (admission failures are [`Decision`]s, not
/// errors).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BrokerError {
    #[error("unknown slice {slice}")]
    UnknownSlice { slice: SliceId },
    #[error("slice {slice} already released")]
    AlreadyReleased { slice: SliceId },
    #[error("clock skew: expected slot {expected}, got {got}")]
    ClockSkew { expected: u64, got: u64 },
    #[error("committed {committed} PRB on cell {cell} at slot {slot} exceeds capacity {capacity}")]
    CapacityInvariantBroken {
        cell: CellId,
        slot: u64,
        committed: u32,
        capacity: u32,
    },
    #[error("horizon renewal refused for {slices:?}")]
    RenewalRefused { slices: Vec<SliceId> },
    #[error("malformed decision log: {detail}")]
    BadDecisionLog { detail: String },
}

/// Everything admission needs besides the registry itself.
pub struct AdmissionContext<'a> {
    pub topology: &'a Topology,
    pub forecaster: &'a dyn BackgroundForecaster,
    /// Cells currently serving each tenant's devices (sorted, deduplicated).
    pub ue_locations: &'a BTreeMap<TenantId, Vec<CellId>>,
    pub efficiency: &'a EfficiencyTable,
    pub slots_per_day: u64,
}

/// A slice entering or leaving an active interval.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LifecycleEvent {
    pub slot: u64,
    pub slice_id: SliceId,
    pub transition: LifecycleKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action")]
pub enum LifecycleKind {
    #[serde(rename = "ACTIVATE")]
    Activate,
    /// Deactivation; the slice becomes DORMANT if recurrences remain,
    /// EXPIRED otherwise.
    #[serde(rename = "DEACTIVATE")]
    Deactivate { next: SliceState },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PushAction {
    #[serde(rename = "ACTIVATE")]
    Activate,
    #[serde(rename = "DEACTIVATE")]
    Deactivate,
}

/// Slice configuration to fan out toward the RAN (one Itf-N message at the
/// grant level, one Itf-B message per cell; encoding lives in the
/// interfaces module).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigPush {
    pub slot: u64,
    pub action: PushAction,
    pub slice_id: SliceId,
    pub tenant: TenantId,
    pub per_cell_prb: BTreeMap<CellId, u32>,
    pub mode: SliceMode,
}

/// Result of advancing the broker clock by one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct TickOutcome {
    pub events: Vec<LifecycleEvent>,
    pub pushes: Vec<ConfigPush>,
}

/// Determine the cell set that should accommodate a request: the explicit
/// set when provided, otherwise the cells serving the tenant's devices;
/// massive-IoT slices with no registered devices fall back to every cell.
pub fn determine_cells(
    req: &ValidatedRequest,
    topology: &Topology,
    ue_locations: &BTreeMap<TenantId, Vec<CellId>>,
) -> Result<Vec<CellId>, RejectReason> {
    if let Some(cells) = &req.cells {
        if !cells.is_empty() {
            return Ok(cells.clone());
        }
    }
    let located = ue_locations.get(&req.tenant).cloned().unwrap_or_default();
    if !located.is_empty() {
        return Ok(located);
    }
    if req.template == Some(SliceTemplate::Miot) {
        return Ok(topology.cells.keys().cloned().collect());
    }
    Err(RejectReason::NoFeasibleCells)
}

/// The serialized decision engine.
#[derive(Debug, Clone, PartialEq)]
pub struct Broker {
    mode: SliceMode,
    next_seq: u64,
    registry: SliceRegistry,
}

impl Broker {
    pub fn new(mode: SliceMode, horizon_slot: u64) -> Self {
        Self {
            mode,
            next_seq: 0,
            registry: SliceRegistry::new(horizon_slot),
        }
    }

    pub fn mode(&self) -> SliceMode {
        self.mode
    }

    pub fn registry(&self) -> &SliceRegistry {
        &self.registry
    }

    /// Slot the next submission or tick belongs to.
    pub fn now_slot(&self) -> u64 {
        self.registry.now_slot()
    }

    fn take_seq(&mut self) -> u64 {
        let seq = self.next_seq;
        self.next_seq += 1;
        seq
    }

    pub(crate) fn restore_seq(&mut self, next_seq: u64) {
        self.next_seq = self.next_seq.max(next_seq);
    }

    /// Serialized admission: GRANTED iff every (cell, slot) of the request
    /// keeps committed + forecast + requested within nominal capacity. On
    /// grant the registry is updated atomically; any rejection leaves it
    /// untouched.
    pub fn admit(&mut self, req: &ValidatedRequest, ctx: &AdmissionContext<'_>) -> Decision {
        let slot = self.registry.now_slot();
        let seq = self.take_seq();

        if self.registry.has_request_id(&req.request_id) {
            return Decision::rejected(
                seq,
                slot,
                req.request_id.clone(),
                RejectReason::ValidationFailed,
                "request_id already granted",
            );
        }

        if req.time.start_slot < slot {
            return Decision::rejected(
                seq,
                slot,
                req.request_id.clone(),
                RejectReason::ValidationFailed,
                format!(
                    "start_slot {} is in the past (now {})",
                    req.time.start_slot, slot
                ),
            );
        }

        let cells = match determine_cells(req, ctx.topology, ctx.ue_locations) {
            Ok(cells) => cells,
            Err(reason) => {
                return Decision::rejected(
                    seq,
                    slot,
                    req.request_id.clone(),
                    reason,
                    "no cells serve this tenant's devices",
                )
            }
        };

        let horizon = self.registry.horizon_slot();
        if req.time.is_finite() {
            let final_end = req.time.final_end_slot().expect("finite spec");
            if final_end > horizon + 1 {
                return Decision::rejected(
                    seq,
                    slot,
                    req.request_id.clone(),
                    RejectReason::HorizonExceeded,
                    format!("request ends at slot {final_end}, horizon is {horizon}"),
                );
            }
        }

        let needed = required_prb_per_cell(req, ctx.efficiency);
        for cell_id in &cells {
            let capacity = match ctx.topology.cells.get(cell_id) {
                Some(c) => c.capacity_prb_per_slot,
                None => {
                    return Decision::rejected(
                        seq,
                        slot,
                        req.request_id.clone(),
                        RejectReason::ValidationFailed,
                        format!("unknown cell {cell_id}"),
                    )
                }
            };
            for (start, end) in req.time.active_intervals(horizon) {
                for t in start..end.min(horizon + 1) {
                    let committed = self.registry.committed_at(cell_id, t);
                    let forecast = ctx
                        .forecaster
                        .forecast_background(cell_id, t % ctx.slots_per_day)
                        .ceil()
                        .max(0.0) as u32;
                    if committed as u64 + forecast as u64 + needed as u64 > capacity as u64 {
                        return Decision::rejected(
                            seq,
                            slot,
                            req.request_id.clone(),
                            RejectReason::CapacityExceeded,
                            format!(
                                "cell {cell_id} slot {t}: committed {committed} + forecast {forecast} + requested {needed} > capacity {capacity}"
                            ),
                        );
                    }
                }
            }
        }

        let slice_id = self.registry.allocate_slice_id();
        let grant = SliceGrant {
            slice_id,
            request_id: req.request_id.clone(),
            tenant: req.tenant.clone(),
            per_cell_prb: cells.iter().map(|c| (c.clone(), needed)).collect(),
            time: req.time.clone(),
            qos: req.qos.clone(),
            mode: self.mode,
        };
        self.registry.note_request_id(req.request_id.clone());
        self.registry.apply_grant(grant.clone(), seq);
        Decision::granted(seq, slot, grant)
    }

    /// Record a validation failure as a rejected decision in the total
    /// order; the registry is untouched.
    pub fn reject_validation(
        &mut self,
        request_id: crate::domain::RequestId,
        detail: String,
    ) -> Decision {
        let slot = self.registry.now_slot();
        let seq = self.take_seq();
        Decision::rejected(
            seq,
            slot,
            request_id,
            RejectReason::ValidationFailed,
            detail,
        )
    }

    /// Release a slice: future commitments are removed, past accounting
    /// stays for charging. Returns the release's position in the decision
    /// order.
    pub fn release(&mut self, slice_id: &SliceId) -> Result<u64, BrokerError> {
        match self.registry.state(slice_id) {
            None => {
                return Err(BrokerError::UnknownSlice {
                    slice: slice_id.clone(),
                })
            }
            Some(SliceState::Released) => {
                return Err(BrokerError::AlreadyReleased {
                    slice: slice_id.clone(),
                })
            }
            Some(_) => {}
        }
        let now = self.registry.now_slot();
        let seq = self.take_seq();
        self.registry.remove_future_commitments(slice_id, now);
        self.registry.set_state(slice_id, SliceState::Released);
        self.registry.note_release(slice_id, now);
        Ok(seq)
    }

    /// Advance the broker clock to `slot`, emitting lifecycle transitions
    /// and the corresponding configuration pushes. Deactivations are
    /// reported before activations.
    pub fn tick(&mut self, slot: u64) -> Result<TickOutcome, BrokerError> {
        if let Some(prev) = self.registry.clock() {
            if slot != prev + 1 {
                return Err(BrokerError::ClockSkew {
                    expected: prev + 1,
                    got: slot,
                });
            }
        }
        self.registry.set_clock(slot);

        let mut events = Vec::new();
        let mut pushes = Vec::new();
        let slices: Vec<SliceId> = self.registry.states().keys().cloned().collect();

        for slice_id in &slices {
            let state = self.registry.state(slice_id).expect("listed");
            if state != SliceState::Active {
                continue;
            }
            let grant = self
                .registry
                .grant(slice_id)
                .expect("grant per state")
                .clone();
            if grant.time.ends_at(slot) {
                let next = if grant.time.recurs_after(slot) {
                    SliceState::Dormant
                } else {
                    SliceState::Expired
                };
                self.registry.set_state(slice_id, next);
                events.push(LifecycleEvent {
                    slot,
                    slice_id: slice_id.clone(),
                    transition: LifecycleKind::Deactivate { next },
                });
                pushes.push(ConfigPush {
                    slot,
                    action: PushAction::Deactivate,
                    slice_id: slice_id.clone(),
                    tenant: grant.tenant.clone(),
                    per_cell_prb: grant.per_cell_prb.clone(),
                    mode: grant.mode,
                });
            }
        }

        for slice_id in &slices {
            let state = self.registry.state(slice_id).expect("listed");
            if !matches!(state, SliceState::Pending | SliceState::Dormant) {
                continue;
            }
            let grant = self
                .registry
                .grant(slice_id)
                .expect("grant per state")
                .clone();
            if grant.time.starts_at(slot) {
                self.registry.set_state(slice_id, SliceState::Active);
                events.push(LifecycleEvent {
                    slot,
                    slice_id: slice_id.clone(),
                    transition: LifecycleKind::Activate,
                });
                pushes.push(ConfigPush {
                    slot,
                    action: PushAction::Activate,
                    slice_id: slice_id.clone(),
                    tenant: grant.tenant.clone(),
                    per_cell_prb: grant.per_cell_prb.clone(),
                    mode: grant.mode,
                });
            }
        }

        Ok(TickOutcome { events, pushes })
    }

    /// Extend the commitment horizon (auto-renews unbounded periodic grants).
    pub fn advance_horizon(
        &mut self,
        new_horizon: u64,
        topology: &Topology,
    ) -> Result<(), BrokerError> {
        self.registry.advance_horizon(new_horizon, topology)
    }
}
