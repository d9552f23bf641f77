//! Parsing and validation of scenario files (same JSON object grammar as
//! the wire format, pretty-printing allowed on input).

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domain::{
    CellId, EfficiencyTable, MobilityClass, PlmnId, QosProfile, RequestId, ResourceSpec,
    ServiceInfo, SliceId, SliceMode, SliceRequest, SliceTemplate, TenantId, TimeSpec, UeId,
};
use crate::interfaces::charging::ChargingConfig;
use crate::interfaces::PartyDirectory;
use crate::ransim::{
    BackgroundProfile, CellModel, CoreConfig, ScenarioArchetype, SharingMode, Topology, UeModel,
};
use crate::scheduler::SparePolicy;
use crate::sim::{SimParams, Simulation};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("CONFIG_INVALID at {path}: {detail}")]
    Invalid { path: String, detail: String },
    #[error("cannot read config: {detail}")]
    Io { detail: String },
    #[error("cannot parse config: {detail}")]
    Parse { detail: String },
}

fn invalid(path: impl Into<String>, detail: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        path: path.into(),
        detail: detail.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchedulerConfig {
    pub mode: SliceMode,
    #[serde(default = "default_spare_policy")]
    pub spare_policy: SparePolicy,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        Self {
            mode: SliceMode::TwoLayer,
            spare_policy: SparePolicy::None,
        }
    }
}

fn default_spare_policy() -> SparePolicy {
    SparePolicy::None
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastConfig {
    #[serde(default = "default_window_days")]
    pub window_days: usize,
    #[serde(default)]
    pub default_background_fraction: f64,
}

impl Default for ForecastConfig {
    fn default() -> Self {
        Self {
            window_days: default_window_days(),
            default_background_fraction: 0.0,
        }
    }
}

fn default_window_days() -> usize {
    3
}

/// Capacity reduced to `capacity` for slots `from_slot..=to_slot`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutageWindow {
    pub from_slot: u64,
    pub to_slot: u64,
    pub capacity: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellConfig {
    pub cell_id: CellId,
    pub capacity_prb_per_slot: u32,
    pub broadcast_plmns: Vec<PlmnId>,
    #[serde(default)]
    pub neighbors: Vec<CellId>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outages: Vec<OutageWindow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub background: Option<BackgroundProfile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyConfig {
    pub sharing_mode: SharingMode,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub core_endpoints: BTreeMap<PlmnId, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shared_endpoint: Option<String>,
    pub cells: Vec<CellConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TenantEntry {
    pub tenant: TenantId,
    pub secret: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UeConfig {
    pub ue_id: UeId,
    pub home_plmn: PlmnId,
    pub initial_cell: CellId,
    /// Defaults to the operator of `home_plmn`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub owner: Option<TenantId>,
    #[serde(default = "default_mobility")]
    pub mobility: MobilityClass,
    #[serde(default)]
    pub demand_prb_per_slot: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slice_binding: Option<SliceId>,
}

fn default_mobility() -> MobilityClass {
    MobilityClass::Stationary
}

/// A scripted slice request; `qos`/`service` may be omitted when a template
/// provides them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRequest {
    pub submit_slot: u64,
    pub request_id: RequestId,
    pub tenant: TenantId,
    pub resources: ResourceSpec,
    pub time: TimeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qos: Option<QosProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub service: Option<ServiceInfo>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<Vec<CellId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template: Option<SliceTemplate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReleaseEntry {
    pub slot: u64,
    pub request_id: RequestId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandoverEntry {
    pub slot: u64,
    pub ue_id: UeId,
    pub target_cell: CellId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub version: u32,
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default = "default_archetype")]
    pub archetype: ScenarioArchetype,
    #[serde(default)]
    pub seed: u64,
    pub run_slots: u64,
    #[serde(default = "default_horizon")]
    pub horizon_slots: u64,
    #[serde(default = "default_slots_per_day")]
    pub slots_per_day: u64,
    #[serde(default)]
    pub scheduler: SchedulerConfig,
    #[serde(default)]
    pub forecast: ForecastConfig,
    #[serde(default)]
    pub efficiency: EfficiencyTable,
    #[serde(default)]
    pub charging: ChargingConfig,
    pub topology: TopologyConfig,
    #[serde(default)]
    pub tenants: Vec<TenantEntry>,
    #[serde(default)]
    pub ues: Vec<UeConfig>,
    #[serde(default)]
    pub requests: Vec<ScenarioRequest>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub releases: Vec<ReleaseEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub handovers: Vec<HandoverEntry>,
}

fn default_name() -> String {
    "scenario".to_string()
}

fn default_archetype() -> ScenarioArchetype {
    ScenarioArchetype::Custom
}

fn default_horizon() -> u64 {
    7 * 86_400
}

fn default_slots_per_day() -> u64 {
    86_400
}

/// A fully validated scenario, ready to build an engine.
#[derive(Debug, Clone)]
pub struct ValidatedScenario {
    pub config: ScenarioConfig,
    pub topology: Topology,
    pub profiles: BTreeMap<CellId, BackgroundProfile>,
    pub params: SimParams,
    /// Requests grouped by submission slot, in file order.
    pub requests_by_slot: BTreeMap<u64, Vec<SliceRequest>>,
    pub releases_by_slot: BTreeMap<u64, Vec<RequestId>>,
    pub handovers_by_slot: BTreeMap<u64, Vec<(UeId, CellId)>>,
}

pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, ConfigError> {
    serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        detail: e.to_string(),
    })
}

pub fn load_scenario_file(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        detail: format!("{}: {e}", path.display()),
    })?;
    parse_scenario(&text)
}

/// Canonical single-line form (sorted keys); parse -> serialize -> parse is
/// the identity.
pub fn scenario_to_canonical_json(config: &ScenarioConfig) -> Result<String, ConfigError> {
    let value = serde_json::to_value(config).map_err(|e| ConfigError::Parse {
        detail: e.to_string(),
    })?;
    serde_json::to_string(&value).map_err(|e| ConfigError::Parse {
        detail: e.to_string(),
    })
}

impl ScenarioConfig {
    /// Check every invariant and assemble the runtime pieces.
    pub fn validate(&self) -> Result<ValidatedScenario, ConfigError> {
        if self.version != CONFIG_VERSION {
            return Err(invalid(
                "version",
                format!("expected {CONFIG_VERSION}, got {}", self.version),
            ));
        }
        if self.run_slots == 0 {
            return Err(invalid("run_slots", "must be at least 1"));
        }
        if self.slots_per_day == 0 {
            return Err(invalid("slots_per_day", "must be at least 1"));
        }
        if self.run_slots > self.horizon_slots + 1 {
            return Err(invalid(
                "run_slots",
                format!(
                    "run of {} slots exceeds the commitment horizon {}",
                    self.run_slots, self.horizon_slots
                ),
            ));
        }
        if !self.efficiency.is_valid() {
            return Err(invalid("efficiency", "entries must be positive and finite"));
        }
        if self.forecast.window_days == 0 {
            return Err(invalid("forecast.window_days", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.forecast.default_background_fraction) {
            return Err(invalid(
                "forecast.default_background_fraction",
                "must lie in [0, 1]",
            ));
        }

        let (topology, profiles) = self.build_topology()?;
        self.check_archetype(&topology)?;

        let mut tenants: BTreeSet<TenantId> = BTreeSet::new();
        for (i, entry) in self.tenants.iter().enumerate() {
            if entry.secret.is_empty() {
                return Err(invalid(format!("tenants[{i}].secret"), "must not be empty"));
            }
            if !tenants.insert(entry.tenant.clone()) {
                return Err(invalid(
                    format!("tenants[{i}].tenant"),
                    "registered more than once",
                ));
            }
        }

        let mut ue_ids = BTreeSet::new();
        for (i, ue) in self.ues.iter().enumerate() {
            if !ue_ids.insert(ue.ue_id.clone()) {
                return Err(invalid(format!("ues[{i}].ue_id"), "duplicate device id"));
            }
            let cell = topology.cells.get(&ue.initial_cell).ok_or_else(|| {
                invalid(
                    format!("ues[{i}].initial_cell"),
                    format!("unknown cell {}", ue.initial_cell),
                )
            })?;
            if !cell.broadcasts(&ue.home_plmn) {
                return Err(invalid(
                    format!("ues[{i}].initial_cell"),
                    format!(
                        "cell {} does not broadcast home PLMN {}",
                        ue.initial_cell, ue.home_plmn
                    ),
                ));
            }
            let owner = ue
                .owner
                .clone()
                .unwrap_or(TenantId::Operator(ue.home_plmn.clone()));
            if !tenants.contains(&owner) {
                return Err(invalid(
                    format!("ues[{i}].owner"),
                    format!("owner {owner} is not a registered tenant"),
                ));
            }
        }

        let mut request_ids = BTreeSet::new();
        let mut requests_by_slot: BTreeMap<u64, Vec<SliceRequest>> = BTreeMap::new();
        for (i, sr) in self.requests.iter().enumerate() {
            if !request_ids.insert(sr.request_id.clone()) {
                return Err(invalid(
                    format!("requests[{i}].request_id"),
                    "duplicate request id",
                ));
            }
            if sr.submit_slot >= self.run_slots {
                return Err(invalid(
                    format!("requests[{i}].submit_slot"),
                    format!("beyond the run of {} slots", self.run_slots),
                ));
            }
            if !tenants.contains(&sr.tenant) {
                return Err(invalid(
                    format!("requests[{i}].tenant"),
                    format!("{} is not a registered tenant", sr.tenant),
                ));
            }
            let request = sr
                .resolve()
                .map_err(|detail| invalid(format!("requests[{i}]"), detail))?;
            requests_by_slot
                .entry(sr.submit_slot)
                .or_default()
                .push(request);
        }

        let mut releases_by_slot: BTreeMap<u64, Vec<RequestId>> = BTreeMap::new();
        for (i, rel) in self.releases.iter().enumerate() {
            if !request_ids.contains(&rel.request_id) {
                return Err(invalid(
                    format!("releases[{i}].request_id"),
                    "does not match any scripted request",
                ));
            }
            if rel.slot >= self.run_slots {
                return Err(invalid(
                    format!("releases[{i}].slot"),
                    "beyond the end of the run",
                ));
            }
            releases_by_slot
                .entry(rel.slot)
                .or_default()
                .push(rel.request_id.clone());
        }

        let mut handovers_by_slot: BTreeMap<u64, Vec<(UeId, CellId)>> = BTreeMap::new();
        for (i, h) in self.handovers.iter().enumerate() {
            if !ue_ids.contains(&h.ue_id) {
                return Err(invalid(format!("handovers[{i}].ue_id"), "unknown device"));
            }
            if !topology.cells.contains_key(&h.target_cell) {
                return Err(invalid(
                    format!("handovers[{i}].target_cell"),
                    format!("unknown cell {}", h.target_cell),
                ));
            }
            if h.slot >= self.run_slots {
                return Err(invalid(
                    format!("handovers[{i}].slot"),
                    "beyond the end of the run",
                ));
            }
            handovers_by_slot
                .entry(h.slot)
                .or_default()
                .push((h.ue_id.clone(), h.target_cell.clone()));
        }

        let params = SimParams {
            mode: self.scheduler.mode,
            spare_policy: self.scheduler.spare_policy,
            horizon_slot: self.horizon_slots,
            slots_per_day: self.slots_per_day,
            forecast_window_days: self.forecast.window_days,
            default_background_fraction: self.forecast.default_background_fraction,
            efficiency: self.efficiency.clone(),
            charging: self.charging,
            seed: self.seed,
        };

        Ok(ValidatedScenario {
            config: self.clone(),
            topology,
            profiles,
            params,
            requests_by_slot,
            releases_by_slot,
            handovers_by_slot,
        })
    }

    fn build_topology(
        &self,
    ) -> Result<(Topology, BTreeMap<CellId, BackgroundProfile>), ConfigError> {
        let core = match self.topology.sharing_mode {
            SharingMode::Mocn => {
                if self.topology.shared_endpoint.is_some() {
                    return Err(invalid(
                        "topology.shared_endpoint",
                        "not allowed under MOCN",
                    ));
                }
                if self.topology.core_endpoints.is_empty() {
                    return Err(invalid(
                        "topology.core_endpoints",
                        "MOCN requires one endpoint per operator",
                    ));
                }
                let mut endpoints = BTreeMap::new();
                for (plmn, name) in &self.topology.core_endpoints {
                    let endpoint = crate::domain::EndpointId::new(name.clone())
                        .map_err(|e| invalid("topology.core_endpoints", e.to_string()))?;
                    endpoints.insert(plmn.clone(), endpoint);
                }
                CoreConfig::Mocn { endpoints }
            }
            SharingMode::Gwcn => {
                if !self.topology.core_endpoints.is_empty() {
                    return Err(invalid(
                        "topology.core_endpoints",
                        "not allowed under GWCN (one shared endpoint)",
                    ));
                }
                let name =
                    self.topology.shared_endpoint.as_ref().ok_or_else(|| {
                        invalid("topology.shared_endpoint", "required under GWCN")
                    })?;
                CoreConfig::Gwcn {
                    shared_endpoint: crate::domain::EndpointId::new(name.clone())
                        .map_err(|e| invalid("topology.shared_endpoint", e.to_string()))?,
                }
            }
        };

        let mut cells = BTreeMap::new();
        let mut profiles = BTreeMap::new();
        for (i, cc) in self.topology.cells.iter().enumerate() {
            if cells.contains_key(&cc.cell_id) {
                return Err(invalid(
                    format!("topology.cells[{i}].cell_id"),
                    "duplicate cell id",
                ));
            }
            let mut cell = CellModel::new(cc.cell_id.clone(), cc.capacity_prb_per_slot);
            for plmn in &cc.broadcast_plmns {
                cell.add_operator(plmn.clone()).map_err(|e| {
                    invalid(
                        format!("topology.cells[{i}].broadcast_plmns"),
                        e.to_string(),
                    )
                })?;
            }
            cell.neighbors = cc.neighbors.iter().cloned().collect();
            for (j, outage) in cc.outages.iter().enumerate() {
                if outage.to_slot < outage.from_slot {
                    return Err(invalid(
                        format!("topology.cells[{i}].outages[{j}]"),
                        "to_slot before from_slot",
                    ));
                }
                for slot in outage.from_slot..=outage.to_slot {
                    cell.outage_schedule.insert(slot, outage.capacity);
                }
            }
            if let Some(profile) = &cc.background {
                if !profile.is_valid() {
                    return Err(invalid(
                        format!("topology.cells[{i}].background"),
                        "segments must be sorted with non-negative finite means",
                    ));
                }
                profiles.insert(cc.cell_id.clone(), profile.clone());
            }
            cells.insert(cc.cell_id.clone(), cell);
        }

        let topology = Topology {
            core,
            cells,
            archetype: self.archetype,
        };
        topology
            .validate()
            .map_err(|e| invalid("topology", e.to_string()))?;
        Ok((topology, profiles))
    }

    fn check_archetype(&self, topology: &Topology) -> Result<(), ConfigError> {
        let shared_cells = topology
            .cells
            .values()
            .filter(|c| c.broadcast_plmns.len() >= 2)
            .count();
        let exclusive_cells = topology
            .cells
            .values()
            .filter(|c| c.broadcast_plmns.len() == 1)
            .count();
        let distinct_plmns: BTreeSet<&PlmnId> = topology
            .cells
            .values()
            .flat_map(|c| c.broadcast_plmns.iter())
            .collect();

        match self.archetype {
            ScenarioArchetype::MultiCoreSharedRan => {
                if topology.sharing_mode() != SharingMode::Mocn {
                    return Err(invalid("archetype", "MULTI_CORE_SHARED_RAN requires MOCN"));
                }
                if exclusive_cells > 0 {
                    return Err(invalid(
                        "archetype",
                        "MULTI_CORE_SHARED_RAN requires every cell to broadcast at least 2 PLMNs",
                    ));
                }
            }
            ScenarioArchetype::CoverageCollaboration => {
                if distinct_plmns.len() < 2 {
                    return Err(invalid(
                        "archetype",
                        "COVERAGE_COLLABORATION requires at least 2 operators",
                    ));
                }
            }
            ScenarioArchetype::RegionalSharing => {
                if shared_cells == 0 || exclusive_cells == 0 {
                    return Err(invalid(
                        "archetype",
                        "REGIONAL_SHARING requires both shared and exclusive cells",
                    ));
                }
            }
            ScenarioArchetype::CommonSpectrum => {
                if self.scheduler.mode != SliceMode::Pooled {
                    return Err(invalid(
                        "archetype",
                        "COMMON_SPECTRUM requires the POOLED scheduler mode",
                    ));
                }
                if shared_cells == 0 {
                    return Err(invalid(
                        "archetype",
                        "COMMON_SPECTRUM requires at least one shared cell",
                    ));
                }
            }
            ScenarioArchetype::MultiRanSharedCore => {
                if topology.sharing_mode() != SharingMode::Gwcn {
                    return Err(invalid("archetype", "MULTI_RAN_SHARED_CORE requires GWCN"));
                }
            }
            ScenarioArchetype::Custom => {}
        }
        Ok(())
    }
}

impl ScenarioRequest {
    /// Fill QoS/service from the template when omitted.
    pub fn resolve(&self) -> Result<SliceRequest, String> {
        let qos = match (&self.qos, self.template) {
            (Some(q), _) => q.clone(),
            (None, Some(t)) => t.default_qos(),
            (None, None) => return Err("qos required when no template is set".to_string()),
        };
        let service = match (&self.service, self.template) {
            (Some(s), _) => s.clone(),
            (None, Some(t)) => t.default_service(),
            (None, None) => return Err("service required when no template is set".to_string()),
        };
        Ok(SliceRequest {
            request_id: self.request_id.clone(),
            tenant: self.tenant.clone(),
            resources: self.resources.clone(),
            time: self.time.clone(),
            qos,
            service,
            cells: self.cells.clone(),
            template: self.template,
        })
    }
}

impl ValidatedScenario {
    /// Build the engine: world, telemetry, broker, registered parties, and
    /// the initial device attachments.
    pub fn build(&self) -> Result<(Simulation, PartyDirectory), ConfigError> {
        let mut sim = Simulation::new(
            self.topology.clone(),
            self.profiles.clone(),
            self.config.tenants.iter().map(|t| t.tenant.clone()),
            self.params.clone(),
        )
        .map_err(|e| invalid("topology", e.to_string()))?;

        for (i, ue) in self.config.ues.iter().enumerate() {
            let owner = ue
                .owner
                .clone()
                .unwrap_or(TenantId::Operator(ue.home_plmn.clone()));
            let mut model = UeModel::new(ue.ue_id.clone(), ue.home_plmn.clone(), owner);
            model.mobility = ue.mobility;
            model.demand_prb_per_slot = ue.demand_prb_per_slot;
            model.slice_binding = ue.slice_binding.clone();
            sim.add_ue(model)
                .map_err(|e| invalid(format!("ues[{i}]"), e.to_string()))?;
            sim.attach(&ue.ue_id, &ue.initial_cell)
                .map_err(|e| invalid(format!("ues[{i}].initial_cell"), e.to_string()))?;
        }

        let mut directory = PartyDirectory::default();
        for entry in &self.config.tenants {
            directory.register(entry.tenant.clone(), entry.secret.clone());
        }
        Ok((sim, directory))
    }
}
