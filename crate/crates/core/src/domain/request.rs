//! Slice requests and the validation gate in front of admission.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::ids::{CellId, RequestId, TenantId};
use super::qos::QosProfile;
use super::resources::{rate_to_prb, EfficiencyTable, ResourceSpec};
use super::service::ServiceInfo;
use super::template::SliceTemplate;
use super::time::TimeSpec;

/// A tenant's signaled demand for an on-demand network slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceRequest {
    pub request_id: RequestId,
    pub tenant: TenantId,
    pub resources: ResourceSpec,
    pub time: TimeSpec,
    pub qos: QosProfile,
    pub service: ServiceInfo,
    /// Explicit cell set; absent means the broker determines it from the
    /// tenant's device locations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<Vec<CellId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template: Option<SliceTemplate>,
}

/// Why a request failed validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ValidationCode {
    #[serde(rename = "UNKNOWN_CELL")]
    UnknownCell,
    #[serde(rename = "BAD_TIME_SPEC")]
    BadTimeSpec,
    #[serde(rename = "BAD_QOS_RANGE")]
    BadQosRange,
    #[serde(rename = "EMPTY_RESOURCES")]
    EmptyResources,
}

/// First violated field of an invalid request.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{code:?} at {field}")]
pub struct ValidationError {
    pub code: ValidationCode,
    pub field: String,
}

impl ValidationError {
    fn new(code: ValidationCode, field: impl Into<String>) -> Self {
        Self {
            code,
            field: field.into(),
        }
    }
}

/// A request that passed [`validate_request`]; cells are sorted and deduped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidatedRequest(SliceRequest);

impl ValidatedRequest {
    pub fn request(&self) -> &SliceRequest {
        &self.0
    }

    pub fn into_request(self) -> SliceRequest {
        self.0
    }
}

impl std::ops::Deref for ValidatedRequest {
    type Target = SliceRequest;
    fn deref(&self) -> &SliceRequest {
        &self.0
    }
}

/// Schema gate in front of admission: range checks every field against the
/// deployed cell set and returns the normalized request, or the first
/// violation found.
///
/// Normalization only sorts and dedupes the explicit cell list, so validating
/// an already-validated request returns it unchanged.
pub fn validate_request(
    req: &SliceRequest,
    known_cells: &BTreeSet<CellId>,
) -> Result<ValidatedRequest, ValidationError> {
    if !req.resources.is_populated() {
        return Err(ValidationError::new(
            ValidationCode::EmptyResources,
            "resources",
        ));
    }
    if req.time.duration_slots == 0 {
        return Err(ValidationError::new(
            ValidationCode::BadTimeSpec,
            "time.duration_slots",
        ));
    }
    if let Some(p) = req.time.periodicity_slots {
        if p <= req.time.duration_slots {
            return Err(ValidationError::new(
                ValidationCode::BadTimeSpec,
                "time.periodicity_slots",
            ));
        }
    }
    if let Some(w) = req.time.window_end_slot {
        if w < req.time.start_slot {
            return Err(ValidationError::new(
                ValidationCode::BadTimeSpec,
                "time.window_end_slot",
            ));
        }
    }
    if let Some(field) = req.qos.first_invalid_field() {
        return Err(ValidationError::new(ValidationCode::BadQosRange, field));
    }
    if let Some(v) = &req.service.volume {
        if !(v.file_size_mb.is_finite() && v.file_size_mb > 0.0) {
            return Err(ValidationError::new(
                ValidationCode::EmptyResources,
                "service.volume.file_size_mb",
            ));
        }
        if v.deadline_slot <= req.time.start_slot {
            return Err(ValidationError::new(
                ValidationCode::BadTimeSpec,
                "service.volume.deadline_slot",
            ));
        }
    }
    if let Some(cells) = &req.cells {
        for cell in cells {
            if !known_cells.contains(cell) {
                return Err(ValidationError::new(
                    ValidationCode::UnknownCell,
                    format!("cells[{cell}]"),
                ));
            }
        }
    }

    let mut normalized = req.clone();
    if let Some(cells) = normalized.cells.take() {
        let set: BTreeSet<CellId> = cells.into_iter().collect();
        normalized.cells = Some(set.into_iter().collect());
    }
    Ok(ValidatedRequest(normalized))
}

/// PRB/slot this request needs on every cell of its set.
///
/// Physical requests carry the count directly. Data-rate requests convert the
/// larger of the explicit rate and the volume-equivalent rate through the
/// efficiency table for the request's mobility class.
pub fn required_prb_per_cell(req: &SliceRequest, table: &EfficiencyTable) -> u32 {
    match &req.resources {
        ResourceSpec::PhysicalPrb { prb_per_slot } => *prb_per_slot,
        ResourceSpec::DataRate { rate_mbps } => {
            let mut rate = *rate_mbps;
            if let Some(vol_rate) = req.service.volume_rate_mbps(req.time.start_slot) {
                rate = rate.max(vol_rate);
            }
            rate_to_prb(rate, req.service.mobility, table)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::qos::BearerKind;
    use crate::domain::service::MobilityClass;

    fn cells(names: &[&str]) -> BTreeSet<CellId> {
        names.iter().map(|n| CellId::new(*n).unwrap()).collect()
    }

    fn embb_request() -> SliceRequest {
        SliceRequest {
            request_id: RequestId::new("r1").unwrap(),
            tenant: TenantId::operator("00101").unwrap(),
            resources: ResourceSpec::physical(10),
            time: TimeSpec::once(0, 100),
            qos: SliceTemplate::Embb.default_qos(),
            service: SliceTemplate::Embb.default_service(),
            cells: Some(vec![CellId::new("C1").unwrap()]),
            template: Some(SliceTemplate::Embb),
        }
    }

    #[test]
    fn period_not_longer_than_duration_is_rejected() {
        let mut req = embb_request();
        req.time = TimeSpec::periodic(0, 10, 5);
        let err = validate_request(&req, &cells(&["C1", "C2"])).unwrap_err();
        assert_eq!(err.code, ValidationCode::BadTimeSpec);
    }

    #[test]
    fn unknown_cell_is_rejected() {
        let mut req = embb_request();
        req.cells = Some(vec![CellId::new("C9").unwrap()]);
        let err = validate_request(&req, &cells(&["C1", "C2"])).unwrap_err();
        assert_eq!(err.code, ValidationCode::UnknownCell);
        assert_eq!(err.field, "cells[C9]");
    }

    #[test]
    fn well_formed_request_passes_unchanged() {
        let req = embb_request();
        let validated = validate_request(&req, &cells(&["C1", "C2"])).unwrap();
        assert_eq!(validated.request(), &req);
    }

    #[test]
    fn validation_is_idempotent() {
        let mut req = embb_request();
        req.cells = Some(vec![
            CellId::new("C2").unwrap(),
            CellId::new("C1").unwrap(),
            CellId::new("C2").unwrap(),
        ]);
        let known = cells(&["C1", "C2"]);
        let once = validate_request(&req, &known).unwrap();
        let twice = validate_request(once.request(), &known).unwrap();
        assert_eq!(once, twice);
        assert_eq!(
            once.cells.as_deref().unwrap(),
            &[CellId::new("C1").unwrap(), CellId::new("C2").unwrap()]
        );
    }

    #[test]
    fn zero_resources_rejected() {
        let mut req = embb_request();
        req.resources = ResourceSpec::physical(0);
        let err = validate_request(&req, &cells(&["C1"])).unwrap_err();
        assert_eq!(err.code, ValidationCode::EmptyResources);
    }

    #[test]
    fn volume_deadline_must_exceed_start() {
        let mut req = embb_request();
        req.time = TimeSpec::once(50, 10);
        req.service.volume = Some(crate::domain::service::VolumeDescriptor {
            file_size_mb: 10.0,
            deadline_slot: 50,
        });
        let err = validate_request(&req, &cells(&["C1"])).unwrap_err();
        assert_eq!(err.code, ValidationCode::BadTimeSpec);
        assert_eq!(err.field, "service.volume.deadline_slot");
    }

    #[test]
    fn required_prb_uses_max_of_rate_and_volume() {
        let table = EfficiencyTable::default();
        let mut req = embb_request();
        req.resources = ResourceSpec::data_rate(2.0);
        req.service.mobility = MobilityClass::Stationary;
        assert_eq!(required_prb_per_cell(&req, &table), 2);
        // Volume of 300 over slots 0..50 is 6 Mbps, dominating the 2 Mbps rate.
        req.service.volume = Some(crate::domain::service::VolumeDescriptor {
            file_size_mb: 300.0,
            deadline_slot: 50,
        });
        assert_eq!(required_prb_per_cell(&req, &table), 6);
        // Physical sizing wins regardless of volume.
        req.resources = ResourceSpec::physical(3);
        assert_eq!(required_prb_per_cell(&req, &table), 3);
        assert_eq!(req.qos.bearer, BearerKind::NonGbr);
    }
}
