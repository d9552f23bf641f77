//! Random wire messages of every type, for round-trip checks.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use slicebroker_core::broker::{Decision, PushAction, RejectReason};
use slicebroker_core::domain::{
    BearerKind, CellId, MobilityClass, OffloadingPolicy, PlmnId, QosProfile, RequestId,
    ResourceSpec, ServiceInfo, SliceGrant, SliceId, SliceMode, SliceRequest, SliceTemplate,
    TenantId, TimeSpec, UeId, VolumeDescriptor,
};
use slicebroker_core::interfaces::wire::{
    AuthReqBody, AuthRespBody, ChargingQueryBody, ChargingRecord, ChargingRespBody, ConfigItfBBody,
    ConfigItfNBody, ContextQueryBody, ContextRespBody, ErrorBody, ErrorCode, KpiReportBody,
    Message, SessionScope, SliceDecisionBody, SliceReleaseBody, SliceReqBody, UeContextRecord,
};
use slicebroker_core::telemetry::{KpiReport, MeasurementRecord, SliceKpi};

fn ident(rng: &mut ChaCha8Rng, prefix: &str) -> String {
    let len = rng.random_range(1..=8);
    let mut s = String::from(prefix);
    for _ in 0..len {
        let c = b"abcdefghijklmnopqrstuvwxyz0123456789-_."[rng.random_range(0..39)];
        s.push(c as char);
    }
    s
}

fn plmn(rng: &mut ChaCha8Rng) -> PlmnId {
    let digits = if rng.random_bool(0.5) {
        format!("{:05}", rng.random_range(0..100_000))
    } else {
        format!("{:06}", rng.random_range(0..1_000_000))
    };
    PlmnId::new(digits).unwrap()
}

fn tenant(rng: &mut ChaCha8Rng) -> TenantId {
    if rng.random_bool(0.5) {
        TenantId::Operator(plmn(rng))
    } else {
        TenantId::Service(slicebroker_core::domain::ServiceId::new(ident(rng, "svc-")).unwrap())
    }
}

fn cell(rng: &mut ChaCha8Rng) -> CellId {
    CellId::new(ident(rng, "cell-")).unwrap()
}

fn slice(rng: &mut ChaCha8Rng) -> SliceId {
    SliceId::new(format!("sl-{:06}", rng.random_range(0..1_000_000u32))).unwrap()
}

fn ue(rng: &mut ChaCha8Rng) -> UeId {
    UeId::new(ident(rng, "ue-")).unwrap()
}

fn finite_f64(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(0.0..10_000.0) * if rng.random_bool(0.2) { 0.001 } else { 1.0 }
}

fn time_spec(rng: &mut ChaCha8Rng) -> TimeSpec {
    let start = rng.random_range(0..100_000u64);
    let duration = rng.random_range(1..1_000u64);
    let mut t = if rng.random_bool(0.5) {
        TimeSpec::periodic(start, duration, duration + rng.random_range(1..1_000u64))
    } else {
        TimeSpec::once(start, duration)
    };
    if rng.random_bool(0.4) {
        t.window_end_slot = Some(start + rng.random_range(0..10_000u64));
    }
    t
}

fn qos(rng: &mut ChaCha8Rng) -> QosProfile {
    QosProfile {
        bearer: if rng.random_bool(0.5) {
            BearerKind::Gbr
        } else {
            BearerKind::NonGbr
        },
        priority: rng.random_range(1..=15),
        delay_budget_ms: finite_f64(rng).max(0.001),
        jitter_ms: finite_f64(rng),
        loss_rate: rng.random_range(0.0..=1.0),
    }
}

fn mobility(rng: &mut ChaCha8Rng) -> MobilityClass {
    [
        MobilityClass::Stationary,
        MobilityClass::Low,
        MobilityClass::Medium,
        MobilityClass::High,
    ][rng.random_range(0..4)]
}

fn service_info(rng: &mut ChaCha8Rng) -> ServiceInfo {
    ServiceInfo {
        mobility: mobility(rng),
        offloading_policy: [
            OffloadingPolicy::None,
            OffloadingPolicy::WifiPreferred,
            OffloadingPolicy::EdgePreferred,
        ][rng.random_range(0..3)],
        disruption_tolerance_slots: rng.random_range(0..10_000),
        volume: if rng.random_bool(0.4) {
            Some(VolumeDescriptor {
                file_size_mb: finite_f64(rng).max(0.001),
                deadline_slot: rng.random_range(1..1_000_000),
            })
        } else {
            None
        },
    }
}

fn slice_request(rng: &mut ChaCha8Rng) -> SliceRequest {
    SliceRequest {
        request_id: RequestId::new(ident(rng, "req-")).unwrap(),
        tenant: tenant(rng),
        resources: if rng.random_bool(0.5) {
            ResourceSpec::physical(rng.random_range(1..=200))
        } else {
            ResourceSpec::data_rate(finite_f64(rng).max(0.001))
        },
        time: time_spec(rng),
        qos: qos(rng),
        service: service_info(rng),
        cells: if rng.random_bool(0.5) {
            Some((0..rng.random_range(1..=4)).map(|_| cell(rng)).collect())
        } else {
            None
        },
        template: match rng.random_range(0..4) {
            0 => Some(SliceTemplate::Embb),
            1 => Some(SliceTemplate::Automotive),
            2 => Some(SliceTemplate::Miot),
            _ => None,
        },
    }
}

fn grant(rng: &mut ChaCha8Rng) -> SliceGrant {
    let cells: BTreeMap<CellId, u32> = (0..rng.random_range(1..=4))
        .map(|_| (cell(rng), rng.random_range(1..=100)))
        .collect();
    SliceGrant {
        slice_id: slice(rng),
        request_id: RequestId::new(ident(rng, "req-")).unwrap(),
        tenant: tenant(rng),
        per_cell_prb: cells,
        time: time_spec(rng),
        qos: qos(rng),
        mode: if rng.random_bool(0.5) {
            SliceMode::TwoLayer
        } else {
            SliceMode::Pooled
        },
    }
}

fn decision(rng: &mut ChaCha8Rng) -> Decision {
    if rng.random_bool(0.5) {
        Decision::granted(rng.random(), rng.random_range(0..100_000), grant(rng))
    } else {
        let reason = [
            RejectReason::CapacityExceeded,
            RejectReason::NoFeasibleCells,
            RejectReason::ValidationFailed,
            RejectReason::HorizonExceeded,
        ][rng.random_range(0..4)];
        Decision::rejected(
            rng.random(),
            rng.random_range(0..100_000),
            RequestId::new(ident(rng, "req-")).unwrap(),
            reason,
            ident(rng, "detail-"),
        )
    }
}

fn measurement(rng: &mut ChaCha8Rng) -> MeasurementRecord {
    let background = rng.random_bool(0.3);
    MeasurementRecord {
        slot: rng.random_range(0..100_000),
        cell_id: cell(rng),
        slice_id: if background { None } else { Some(slice(rng)) },
        tenant: if background { None } else { Some(tenant(rng)) },
        demanded_prb: rng.random_range(0..=200),
        quota_prb: rng.random_range(0..=200),
        delivered_prb: rng.random_range(0..=200),
        deficit_prb: rng.random_range(0..=50),
    }
}

fn kpi_report(rng: &mut ChaCha8Rng) -> KpiReport {
    let owner = tenant(rng);
    let slices: BTreeMap<SliceId, SliceKpi> = (0..rng.random_range(0..=3))
        .map(|_| {
            (
                slice(rng),
                SliceKpi {
                    demanded_prb: rng.random(),
                    delivered_prb: rng.random(),
                    deficit_prb: rng.random(),
                    sla_events: rng.random_range(0..100),
                    handovers: rng.random_range(0..100),
                },
            )
        })
        .collect();
    KpiReport {
        tenant: owner,
        from_slot: rng.random_range(0..1_000),
        to_slot: rng.random_range(1_000..10_000),
        slices,
        records: (0..rng.random_range(0..=4))
            .map(|_| measurement(rng))
            .collect(),
    }
}

fn push_action(rng: &mut ChaCha8Rng) -> PushAction {
    if rng.random_bool(0.5) {
        PushAction::Activate
    } else {
        PushAction::Deactivate
    }
}

fn slice_mode(rng: &mut ChaCha8Rng) -> SliceMode {
    if rng.random_bool(0.5) {
        SliceMode::TwoLayer
    } else {
        SliceMode::Pooled
    }
}

/// Build a random message of the given type (0..13).
pub fn random_message(rng: &mut ChaCha8Rng, type_index: usize) -> Message {
    match type_index {
        0 => Message::AuthReq(AuthReqBody {
            tenant: tenant(rng),
            secret: ident(rng, "secret-"),
        }),
        1 => Message::AuthResp(AuthRespBody {
            session_id: format!("S{}", rng.random_range(1..10_000u32)),
            scope: if rng.random_bool(0.5) {
                SessionScope::Operator
            } else {
                SessionScope::ThirdParty
            },
            token: ident(rng, "tok-"),
        }),
        2 => Message::SliceReq(SliceReqBody {
            request: slice_request(rng),
        }),
        3 => Message::SliceDecision(SliceDecisionBody {
            decision: decision(rng),
        }),
        4 => Message::SliceRelease(SliceReleaseBody {
            slice_id: slice(rng),
            released: match rng.random_range(0..3) {
                0 => None,
                1 => Some(true),
                _ => Some(false),
            },
        }),
        5 => Message::KpiReport(KpiReportBody {
            tenant: tenant(rng),
            from_slot: rng.random_range(0..1_000),
            to_slot: rng.random_range(1_000..100_000),
            report: if rng.random_bool(0.6) {
                Some(kpi_report(rng))
            } else {
                None
            },
        }),
        6 => Message::ContextQuery(ContextQueryBody {
            ue_ids: if rng.random_bool(0.5) {
                Some((0..rng.random_range(1..=4)).map(|_| ue(rng)).collect())
            } else {
                None
            },
        }),
        7 => Message::ContextResp(ContextRespBody {
            records: (0..rng.random_range(0..=4))
                .map(|_| UeContextRecord {
                    ue_id: ue(rng),
                    serving_cell: if rng.random_bool(0.8) {
                        Some(cell(rng))
                    } else {
                        None
                    },
                    mobility: mobility(rng),
                    avg_rate_mbps: finite_f64(rng),
                })
                .collect(),
        }),
        8 => Message::ChargingQuery(ChargingQueryBody {
            from_slot: rng.random_range(0..1_000),
            to_slot: rng.random_range(1_000..100_000),
        }),
        9 => Message::ChargingResp(ChargingRespBody {
            records: (0..rng.random_range(0..=4))
                .map(|_| {
                    let consumed = rng.random_range(0..1_000_000u64);
                    let multiplier = [1.0, 1.5][rng.random_range(0..2)];
                    ChargingRecord {
                        slice_id: slice(rng),
                        tenant: tenant(rng),
                        prb_slots_consumed: consumed,
                        qos_multiplier: multiplier,
                        amount: consumed as f64 * multiplier,
                    }
                })
                .collect(),
        }),
        10 => Message::ConfigItfN(ConfigItfNBody {
            slot: rng.random_range(0..100_000),
            action: push_action(rng),
            slice_id: slice(rng),
            tenant: tenant(rng),
            cells: (0..rng.random_range(1..=4)).map(|_| cell(rng)).collect(),
            mode: slice_mode(rng),
        }),
        11 => Message::ConfigItfB(ConfigItfBBody {
            slot: rng.random_range(0..100_000),
            action: push_action(rng),
            cell_id: cell(rng),
            slice_id: slice(rng),
            tenant: tenant(rng),
            prb_per_slot: rng.random_range(1..=200),
            mode: slice_mode(rng),
        }),
        12 => Message::Error(ErrorBody {
            code: [
                ErrorCode::AuthFailed,
                ErrorCode::NotAuthenticated,
                ErrorCode::ScopeViolation,
                ErrorCode::TenantMismatch,
                ErrorCode::UnknownTenant,
                ErrorCode::UnknownSlice,
                ErrorCode::AlreadyReleased,
                ErrorCode::BadMessage,
            ][rng.random_range(0..8)],
            detail: ident(rng, "detail "),
        }),
        _ => unreachable!("13 message types"),
    }
}
