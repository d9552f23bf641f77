//! The signaling endpoint: one state machine per connection translating
//! wire messages into engine calls.
//!
//! A connection authenticates first (AUTH_REQ), then sends scoped requests;
//! every request gets exactly one response carrying the same sequence
//! number, in submission order.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use crate::sim::Simulation;

use super::session::{authenticate, scope_allows, PartyDirectory, Session};
use super::wire::{
    AuthRespBody, ChargingRespBody, ContextRespBody, Envelope, ErrorBody, ErrorCode, Message,
    SliceDecisionBody, SliceReleaseBody,
};

/// Shared service state: the engine plus the registered-party directory.
pub struct ServiceState {
    pub sim: Mutex<Simulation>,
    pub directory: PartyDirectory,
    session_counter: AtomicU64,
}

impl ServiceState {
    pub fn new(sim: Simulation, directory: PartyDirectory) -> Arc<Self> {
        Arc::new(Self {
            sim: Mutex::new(sim),
            directory,
            session_counter: AtomicU64::new(1),
        })
    }
}

/// Per-connection session handler (one per TCP connection or loopback).
pub struct SessionHandler {
    state: Arc<ServiceState>,
    session: Option<Session>,
}

impl SessionHandler {
    pub fn new(state: Arc<ServiceState>) -> Self {
        Self {
            state,
            session: None,
        }
    }

    pub fn session(&self) -> Option<&Session> {
        self.session.as_ref()
    }

    fn error(seq: u64, code: ErrorCode, detail: impl Into<String>) -> Envelope {
        Envelope::new(
            seq,
            Message::Error(ErrorBody {
                code,
                detail: detail.into(),
            }),
        )
    }

    /// Handle one request message, producing exactly one response with the
    /// same sequence number.
    pub fn handle(&mut self, request: Envelope) -> Envelope {
        let seq = request.seq;
        match (&self.session, &request.msg) {
            (None, Message::AuthReq(body)) => {
                let number = self.state.session_counter.fetch_add(1, Ordering::SeqCst);
                match authenticate(&self.state.directory, &body.tenant, &body.secret, number) {
                    Ok(session) => {
                        let resp = AuthRespBody {
                            session_id: session.session_id.clone(),
                            scope: session.scope,
                            token: session.auth_token.clone(),
                        };
                        self.session = Some(session);
                        Envelope::new(seq, Message::AuthResp(resp))
                    }
                    Err(_) => {
                        Self::error(seq, ErrorCode::AuthFailed, "unknown party or bad secret")
                    }
                }
            }
            (None, _) => Self::error(seq, ErrorCode::NotAuthenticated, "authenticate first"),
            (Some(_), Message::AuthReq(_)) => {
                Self::error(seq, ErrorCode::BadMessage, "session already authenticated")
            }
            (Some(session), msg) => {
                if !scope_allows(session.scope, msg) {
                    return Self::error(
                        seq,
                        ErrorCode::ScopeViolation,
                        format!("{} not allowed in this scope", msg.type_name()),
                    );
                }
                let session = session.clone();
                self.dispatch(seq, &session, msg.clone())
            }
        }
    }

    fn dispatch(&mut self, seq: u64, session: &Session, msg: Message) -> Envelope {
        match msg {
            Message::SliceReq(body) => {
                if body.request.tenant != session.tenant {
                    return Self::error(
                        seq,
                        ErrorCode::TenantMismatch,
                        "request tenant differs from session tenant",
                    );
                }
                let decision = self.state.sim.lock().unwrap().submit_request(&body.request);
                Envelope::new(seq, Message::SliceDecision(SliceDecisionBody { decision }))
            }
            Message::SliceRelease(body) => {
                let mut sim = self.state.sim.lock().unwrap();
                let owner = sim
                    .broker()
                    .registry()
                    .grant(&body.slice_id)
                    .map(|g| g.tenant.clone());
                match owner {
                    None => Self::error(
                        seq,
                        ErrorCode::UnknownSlice,
                        format!("no slice {}", body.slice_id),
                    ),
                    Some(owner) if owner != session.tenant => Self::error(
                        seq,
                        ErrorCode::ScopeViolation,
                        "slice belongs to another tenant",
                    ),
                    Some(_) => match sim.release(&body.slice_id) {
                        Ok(()) => Envelope::new(
                            seq,
                            Message::SliceRelease(SliceReleaseBody {
                                slice_id: body.slice_id,
                                released: Some(true),
                            }),
                        ),
                        Err(crate::broker::BrokerError::AlreadyReleased { .. }) => {
                            Self::error(seq, ErrorCode::AlreadyReleased, "slice already released")
                        }
                        Err(e) => Self::error(seq, ErrorCode::BadMessage, e.to_string()),
                    },
                }
            }
            Message::KpiReport(body) => {
                if body.tenant != session.tenant {
                    return Self::error(
                        seq,
                        ErrorCode::TenantMismatch,
                        "report tenant differs from session tenant",
                    );
                }
                let sim = self.state.sim.lock().unwrap();
                match sim.kpi_report(&session.tenant, body.from_slot, body.to_slot) {
                    Ok(report) => Envelope::new(
                        seq,
                        Message::KpiReport(super::wire::KpiReportBody {
                            tenant: body.tenant,
                            from_slot: body.from_slot,
                            to_slot: body.to_slot,
                            report: Some(report),
                        }),
                    ),
                    Err(e) => Self::error(seq, ErrorCode::UnknownTenant, e.to_string()),
                }
            }
            Message::ContextQuery(body) => {
                let sim = self.state.sim.lock().unwrap();
                // Naming a foreign device is a scope violation, not a lookup
                // failure: the response must not reveal whether it exists.
                if let Some(ids) = &body.ue_ids {
                    for id in ids {
                        if sim.ue_owner(id) != Some(&session.tenant) {
                            return Self::error(
                                seq,
                                ErrorCode::ScopeViolation,
                                "device does not belong to this tenant",
                            );
                        }
                    }
                }
                match sim.context_records(&session.tenant, body.ue_ids.as_deref()) {
                    Ok(records) => {
                        Envelope::new(seq, Message::ContextResp(ContextRespBody { records }))
                    }
                    Err(e) => Self::error(seq, ErrorCode::BadMessage, e.to_string()),
                }
            }
            Message::ChargingQuery(body) => {
                let sim = self.state.sim.lock().unwrap();
                let records = sim.charging(Some(&session.tenant), body.from_slot, body.to_slot);
                Envelope::new(seq, Message::ChargingResp(ChargingRespBody { records }))
            }
            other => Self::error(
                seq,
                ErrorCode::BadMessage,
                format!("{} is not a client request", other.type_name()),
            ),
        }
    }
}
