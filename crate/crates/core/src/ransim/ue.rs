//! User equipment in the simulated RAN.

use serde::{Deserialize, Serialize};

use crate::domain::{CellId, MobilityClass, PlmnId, SliceId, TenantId, UeId};

/// A device with a home operator, an owner tenant (operator or third party),
/// and a constant per-slot backlog intensity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UeModel {
    pub ue_id: UeId,
    pub home_plmn: PlmnId,
    /// The tenant whose slices this device's traffic counts toward. Devices
    /// of a vertical/OTT service still attach via their home operator.
    pub owner: TenantId,
    pub mobility: MobilityClass,
    /// PRBs this device wants every slot while attached.
    pub demand_prb_per_slot: u32,
    /// Serving cell once attached.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub serving_cell: Option<CellId>,
    /// Optional pin to one slice; unset means the device follows its owner's
    /// active slice on the serving cell.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slice_binding: Option<SliceId>,
}

impl UeModel {
    pub fn new(ue_id: UeId, home_plmn: PlmnId, owner: TenantId) -> Self {
        Self {
            ue_id,
            home_plmn,
            owner,
            mobility: MobilityClass::Stationary,
            demand_prb_per_slot: 0,
            serving_cell: None,
            slice_binding: None,
        }
    }

    pub fn is_attached(&self) -> bool {
        self.serving_cell.is_some()
    }
}
