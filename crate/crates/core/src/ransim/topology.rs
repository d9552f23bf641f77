//! The deployed topology: sharing architecture, cells, core endpoints.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::domain::{CellId, EndpointId, PlmnId};

use super::cell::{CellModel, MAX_BROADCAST_PLMNS};
use super::RanError;

/// Active RAN sharing architecture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SharingMode {
    /// Every operator keeps its own core; shared cells connect to each.
    #[serde(rename = "MOCN")]
    Mocn,
    /// Operators additionally share the mobility management entity.
    #[serde(rename = "GWCN")]
    Gwcn,
}

/// Core-network routing: per-operator endpoints (MOCN) or one shared
/// endpoint (GWCN).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoreConfig {
    Mocn {
        endpoints: BTreeMap<PlmnId, EndpointId>,
    },
    Gwcn {
        shared_endpoint: EndpointId,
    },
}

/// The five sharing business scenarios plus free-form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioArchetype {
    /// Operators share a RAN but keep their own cores and carriers.
    #[serde(rename = "MULTI_CORE_SHARED_RAN")]
    MultiCoreSharedRan,
    /// Operators with disjoint footprints jointly cover a country.
    #[serde(rename = "COVERAGE_COLLABORATION")]
    CoverageCollaboration,
    /// One operator hosts others inside a specific region only.
    #[serde(rename = "REGIONAL_SHARING")]
    RegionalSharing,
    /// Spectrum itself is pooled and shared.
    #[serde(rename = "COMMON_SPECTRUM")]
    CommonSpectrum,
    /// Several RANs share one core network.
    #[serde(rename = "MULTI_RAN_SHARED_CORE")]
    MultiRanSharedCore,
    #[serde(rename = "CUSTOM")]
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub core: CoreConfig,
    pub cells: BTreeMap<CellId, CellModel>,
    pub archetype: ScenarioArchetype,
}

impl Topology {
    pub fn sharing_mode(&self) -> SharingMode {
        match self.core {
            CoreConfig::Mocn { .. } => SharingMode::Mocn,
            CoreConfig::Gwcn { .. } => SharingMode::Gwcn,
        }
    }

    pub fn cell(&self, id: &CellId) -> Result<&CellModel, RanError> {
        self.cells
            .get(id)
            .ok_or_else(|| RanError::UnknownCell { cell: id.clone() })
    }

    pub fn cell_ids(&self) -> BTreeSet<CellId> {
        self.cells.keys().cloned().collect()
    }

    /// Core endpoint serving `plmn`: the operator's own under MOCN, the
    /// shared one under GWCN.
    pub fn core_endpoint(&self, plmn: &PlmnId) -> Result<&EndpointId, RanError> {
        match &self.core {
            CoreConfig::Mocn { endpoints } => endpoints
                .get(plmn)
                .ok_or_else(|| RanError::MissingCoreEndpoint { plmn: plmn.clone() }),
            CoreConfig::Gwcn { shared_endpoint } => Ok(shared_endpoint),
        }
    }

    /// Structural invariants:
    /// - every cell broadcasts 1..=6 PLMNs and positive capacity;
    /// - outage capacities never exceed nominal;
    /// - neighbors reference deployed cells;
    /// - MOCN: every broadcast PLMN has its own distinct core endpoint;
    /// - GWCN: exactly one shared endpoint (by construction).
    pub fn validate(&self) -> Result<(), RanError> {
        for (id, cell) in &self.cells {
            if *id != cell.cell_id {
                return Err(RanError::InconsistentTopology {
                    detail: format!("cell map key {id} != cell_id {}", cell.cell_id),
                });
            }
            if cell.capacity_prb_per_slot == 0 {
                return Err(RanError::InconsistentTopology {
                    detail: format!("cell {id} has zero capacity"),
                });
            }
            if cell.broadcast_plmns.is_empty() || cell.broadcast_plmns.len() > MAX_BROADCAST_PLMNS {
                return Err(RanError::InconsistentTopology {
                    detail: format!("cell {id} must broadcast 1..=6 PLMNs"),
                });
            }
            let unique: BTreeSet<&PlmnId> = cell.broadcast_plmns.iter().collect();
            if unique.len() != cell.broadcast_plmns.len() {
                return Err(RanError::InconsistentTopology {
                    detail: format!("cell {id} broadcasts a duplicate PLMN"),
                });
            }
            for (slot, reduced) in &cell.outage_schedule {
                if *reduced > cell.capacity_prb_per_slot {
                    return Err(RanError::InconsistentTopology {
                        detail: format!("cell {id} outage at slot {slot} exceeds nominal capacity"),
                    });
                }
            }
            for n in &cell.neighbors {
                if !self.cells.contains_key(n) {
                    return Err(RanError::UnknownCell { cell: n.clone() });
                }
            }
            if let CoreConfig::Mocn { endpoints } = &self.core {
                for plmn in &cell.broadcast_plmns {
                    if !endpoints.contains_key(plmn) {
                        return Err(RanError::MissingCoreEndpoint { plmn: plmn.clone() });
                    }
                }
            }
        }
        if let CoreConfig::Mocn { endpoints } = &self.core {
            let distinct: BTreeSet<&EndpointId> = endpoints.values().collect();
            if distinct.len() != endpoints.len() {
                return Err(RanError::InconsistentTopology {
                    detail: "MOCN operators must not share a core endpoint".to_string(),
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plmn(s: &str) -> PlmnId {
        PlmnId::new(s).unwrap()
    }

    fn cid(s: &str) -> CellId {
        CellId::new(s).unwrap()
    }

    fn mocn_two_cells() -> Topology {
        let mut c1 = CellModel::new(cid("C1"), 100);
        c1.add_operator(plmn("00101")).unwrap();
        c1.add_operator(plmn("00102")).unwrap();
        c1.neighbors.insert(cid("C2"));
        let mut c2 = CellModel::new(cid("C2"), 100);
        c2.add_operator(plmn("00101")).unwrap();
        c2.neighbors.insert(cid("C1"));
        Topology {
            core: CoreConfig::Mocn {
                endpoints: BTreeMap::from([
                    (plmn("00101"), EndpointId::new("mme-00101").unwrap()),
                    (plmn("00102"), EndpointId::new("mme-00102").unwrap()),
                ]),
            },
            cells: BTreeMap::from([(cid("C1"), c1), (cid("C2"), c2)]),
            archetype: ScenarioArchetype::Custom,
        }
    }

    #[test]
    fn valid_mocn_topology_passes() {
        assert!(mocn_two_cells().validate().is_ok());
    }

    #[test]
    fn mocn_requires_endpoint_per_broadcast_plmn() {
        let mut topo = mocn_two_cells();
        if let CoreConfig::Mocn { endpoints } = &mut topo.core {
            endpoints.remove(&plmn("00102"));
        }
        assert!(matches!(
            topo.validate(),
            Err(RanError::MissingCoreEndpoint { .. })
        ));
    }

    #[test]
    fn mocn_endpoints_must_be_distinct() {
        let mut topo = mocn_two_cells();
        if let CoreConfig::Mocn { endpoints } = &mut topo.core {
            endpoints.insert(plmn("00102"), EndpointId::new("mme-00101").unwrap());
        }
        assert!(topo.validate().is_err());
    }

    #[test]
    fn gwcn_routes_everyone_to_the_shared_endpoint() {
        let mut topo = mocn_two_cells();
        topo.core = CoreConfig::Gwcn {
            shared_endpoint: EndpointId::new("mme-shared").unwrap(),
        };
        assert!(topo.validate().is_ok());
        assert_eq!(
            topo.core_endpoint(&plmn("00101")).unwrap().as_str(),
            "mme-shared"
        );
        assert_eq!(
            topo.core_endpoint(&plmn("00102")).unwrap().as_str(),
            "mme-shared"
        );
    }

    #[test]
    fn outage_above_nominal_is_invalid() {
        let mut topo = mocn_two_cells();
        topo.cells
            .get_mut(&cid("C1"))
            .unwrap()
            .outage_schedule
            .insert(3, 101);
        assert!(topo.validate().is_err());
    }
}
