//! Canonical newline-delimited wire format.
//!
//! Every message is one UTF-8 JSON object per line with fields `v` (protocol
//! version), `seq` (per-session counter), `type`, and a type-specific
//! `body`. Canonical encoding sorts keys lexicographically and carries no
//! insignificant whitespace, so `decode(encode(m)) == m` and re-encoding is
//! byte-identical.

use serde::{Deserialize, Serialize};

use crate::broker::{Decision, PushAction};
use crate::domain::{CellId, MobilityClass, SliceId, SliceMode, SliceRequest, TenantId, UeId};
use crate::telemetry::KpiReport;

pub const PROTOCOL_VERSION: u32 = 1;

/// Session scope: operator signaling or third-party service exposure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SessionScope {
    #[serde(rename = "OPERATOR")]
    Operator,
    #[serde(rename = "THIRD_PARTY")]
    ThirdParty,
}

/// Machine-readable error codes carried by `ERROR` messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ErrorCode {
    #[serde(rename = "AUTH_FAILED")]
    AuthFailed,
    #[serde(rename = "NOT_AUTHENTICATED")]
    NotAuthenticated,
    #[serde(rename = "SCOPE_VIOLATION")]
    ScopeViolation,
    #[serde(rename = "TENANT_MISMATCH")]
    TenantMismatch,
    #[serde(rename = "UNKNOWN_TENANT")]
    UnknownTenant,
    #[serde(rename = "UNKNOWN_SLICE")]
    UnknownSlice,
    #[serde(rename = "ALREADY_RELEASED")]
    AlreadyReleased,
    #[serde(rename = "BAD_MESSAGE")]
    BadMessage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuthReqBody {
    pub tenant: TenantId,
    pub secret: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuthRespBody {
    pub session_id: String,
    pub scope: SessionScope,
    pub token: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceReqBody {
    pub request: SliceRequest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceDecisionBody {
    pub decision: Decision,
}

/// Release request (client) and confirmation (server, `released = true`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceReleaseBody {
    pub slice_id: SliceId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub released: Option<bool>,
}

/// KPI report solicitation (client, `report` absent) and answer (server,
/// `report` present).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpiReportBody {
    pub tenant: TenantId,
    pub from_slot: u64,
    pub to_slot: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<KpiReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextQueryBody {
    /// Restrict to these devices; absent means all of the tenant's devices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ue_ids: Option<Vec<UeId>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UeContextRecord {
    pub ue_id: UeId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub serving_cell: Option<CellId>,
    pub mobility: MobilityClass,
    /// Mean delivered rate over the recent window, in Mbps.
    pub avg_rate_mbps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextRespBody {
    pub records: Vec<UeContextRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargingQueryBody {
    pub from_slot: u64,
    pub to_slot: u64,
}

/// PRB-slot consumption of one slice and the resulting amount.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargingRecord {
    pub slice_id: SliceId,
    pub tenant: TenantId,
    /// Granted PRBs summed over cells and elapsed active slots in range.
    pub prb_slots_consumed: u64,
    pub qos_multiplier: f64,
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargingRespBody {
    pub records: Vec<ChargingRecord>,
}

/// Grant-level slice configuration toward the domain manager.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigItfNBody {
    pub slot: u64,
    pub action: PushAction,
    pub slice_id: SliceId,
    pub tenant: TenantId,
    pub cells: Vec<CellId>,
    pub mode: SliceMode,
}

/// Per-cell slice configuration toward one base station; always carries the
/// tenant identifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigItfBBody {
    pub slot: u64,
    pub action: PushAction,
    pub cell_id: CellId,
    pub slice_id: SliceId,
    pub tenant: TenantId,
    pub prb_per_slot: u32,
    pub mode: SliceMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: ErrorCode,
    pub detail: String,
}

/// The thirteen message types.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "body")]
pub enum Message {
    #[serde(rename = "AUTH_REQ")]
    AuthReq(AuthReqBody),
    #[serde(rename = "AUTH_RESP")]
    AuthResp(AuthRespBody),
    #[serde(rename = "SLICE_REQ")]
    SliceReq(SliceReqBody),
    #[serde(rename = "SLICE_DECISION")]
    SliceDecision(SliceDecisionBody),
    #[serde(rename = "SLICE_RELEASE")]
    SliceRelease(SliceReleaseBody),
    #[serde(rename = "KPI_REPORT")]
    KpiReport(KpiReportBody),
    #[serde(rename = "CONTEXT_QUERY")]
    ContextQuery(ContextQueryBody),
    #[serde(rename = "CONTEXT_RESP")]
    ContextResp(ContextRespBody),
    #[serde(rename = "CHARGING_QUERY")]
    ChargingQuery(ChargingQueryBody),
    #[serde(rename = "CHARGING_RESP")]
    ChargingResp(ChargingRespBody),
    #[serde(rename = "CONFIG_ITFN")]
    ConfigItfN(ConfigItfNBody),
    #[serde(rename = "CONFIG_ITFB")]
    ConfigItfB(ConfigItfBBody),
    #[serde(rename = "ERROR")]
    Error(ErrorBody),
}

impl Message {
    pub fn type_name(&self) -> &'static str {
        match self {
            Message::AuthReq(_) => "AUTH_REQ",
            Message::AuthResp(_) => "AUTH_RESP",
            Message::SliceReq(_) => "SLICE_REQ",
            Message::SliceDecision(_) => "SLICE_DECISION",
            Message::SliceRelease(_) => "SLICE_RELEASE",
            Message::KpiReport(_) => "KPI_REPORT",
            Message::ContextQuery(_) => "CONTEXT_QUERY",
            Message::ContextResp(_) => "CONTEXT_RESP",
            Message::ChargingQuery(_) => "CHARGING_QUERY",
            Message::ChargingResp(_) => "CHARGING_RESP",
            Message::ConfigItfN(_) => "CONFIG_ITFN",
            Message::ConfigItfB(_) => "CONFIG_ITFB",
            Message::Error(_) => "ERROR",
        }
    }
}

/// One framed message: version, per-session sequence number, payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub v: u32,
    pub seq: u64,
    #[serde(flatten)]
    pub msg: Message,
}

impl Envelope {
    pub fn new(seq: u64, msg: Message) -> Self {
        Self {
            v: PROTOCOL_VERSION,
            seq,
            msg,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WireError {
    #[error("malformed message: {detail}")]
    Malformed { detail: String },
    #[error("unsupported protocol version {got} (expected {expected})")]
    BadVersion { got: u32, expected: u32 },
}

/// Canonical encoding: keys sorted, no insignificant whitespace, no newline.
pub fn encode(envelope: &Envelope) -> Result<String, WireError> {
    // Round-tripping through Value sorts object keys.
    let value = serde_json::to_value(envelope).map_err(|e| WireError::Malformed {
        detail: e.to_string(),
    })?;
    serde_json::to_string(&value).map_err(|e| WireError::Malformed {
        detail: e.to_string(),
    })
}

pub fn decode(line: &str) -> Result<Envelope, WireError> {
    let envelope: Envelope =
        serde_json::from_str(line.trim_end_matches(['\r', '\n'])).map_err(|e| {
            WireError::Malformed {
                detail: e.to_string(),
            }
        })?;
    if envelope.v != PROTOCOL_VERSION {
        return Err(WireError::BadVersion {
            got: envelope.v,
            expected: PROTOCOL_VERSION,
        });
    }
    Ok(envelope)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_encoding_sorts_keys_and_strips_whitespace() {
        let env = Envelope::new(
            3,
            Message::AuthReq(AuthReqBody {
                tenant: TenantId::operator("00101").unwrap(),
                secret: "hunter2".to_string(),
            }),
        );
        let line = encode(&env).unwrap();
        assert_eq!(
            line,
            r#"{"body":{"secret":"hunter2","tenant":{"kind":"OPERATOR","value":"00101"}},"seq":3,"type":"AUTH_REQ","v":1}"#
        );
        let back = decode(&line).unwrap();
        assert_eq!(back, env);
        assert_eq!(encode(&back).unwrap(), line);
    }

    #[test]
    fn wrong_version_is_rejected() {
        let line = r#"{"body":{"code":"BAD_MESSAGE","detail":"x"},"seq":0,"type":"ERROR","v":2}"#;
        assert!(matches!(decode(line), Err(WireError::BadVersion { .. })));
    }

    #[test]
    fn garbage_is_malformed() {
        assert!(matches!(
            decode("not json"),
            Err(WireError::Malformed { .. })
        ));
        assert!(matches!(
            decode(r#"{"seq":0,"type":"NO_SUCH_TYPE","v":1,"body":{}}"#),
            Err(WireError::Malformed { .. })
        ));
    }

    #[test]
    fn trailing_newline_is_tolerated() {
        let env = Envelope::new(
            1,
            Message::Error(ErrorBody {
                code: ErrorCode::BadMessage,
                detail: "d".into(),
            }),
        );
        let line = encode(&env).unwrap();
        assert_eq!(decode(&format!("{line}\n")).unwrap(), env);
        assert_eq!(decode(&format!("{line}\r\n")).unwrap(), env);
    }

    #[test]
    fn large_sequence_numbers_survive() {
        let env = Envelope::new(
            u64::MAX - 1,
            Message::ChargingQuery(ChargingQueryBody {
                from_slot: u64::MAX - 7,
                to_slot: u64::MAX,
            }),
        );
        let line = encode(&env).unwrap();
        assert_eq!(decode(&line).unwrap(), env);
    }
}
