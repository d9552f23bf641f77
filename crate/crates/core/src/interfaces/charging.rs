//! Charging: PRB-slot consumption per slice, recomputable from the decision
//! and lifecycle state.

use serde::{Deserialize, Serialize};

use crate::broker::SliceRegistry;
use crate::domain::{BearerKind, SliceGrant, TenantId};

use super::wire::ChargingRecord;

/// Linear PRB-slot tariff per bearer kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChargingConfig {
    pub gbr_multiplier: f64,
    pub non_gbr_multiplier: f64,
}

impl Default for ChargingConfig {
    fn default() -> Self {
        Self {
            gbr_multiplier: 1.5,
            non_gbr_multiplier: 1.0,
        }
    }
}

impl ChargingConfig {
    pub fn multiplier(&self, bearer: BearerKind) -> f64 {
        match bearer {
            BearerKind::Gbr => self.gbr_multiplier,
            BearerKind::NonGbr => self.non_gbr_multiplier,
        }
    }
}

/// Granted PRBs summed over cells and the grant's elapsed active slots
/// inside `[from_slot, to_slot]`. A slot counts once it lies strictly before
/// `now_slot` and before the slice's release, if any.
fn consumed_prb_slots(
    grant: &SliceGrant,
    horizon: u64,
    released_at: Option<u64>,
    from_slot: u64,
    to_slot: u64,
    now_slot: u64,
) -> u64 {
    let cutoff = released_at.unwrap_or(u64::MAX).min(now_slot);
    let mut active_slots: u64 = 0;
    for (start, end) in grant.time.active_intervals(horizon) {
        let lo = start.max(from_slot);
        let hi = end
            .min(horizon + 1)
            .min(cutoff)
            .min(to_slot.saturating_add(1));
        if hi > lo {
            active_slots += hi - lo;
        }
    }
    let prb_per_slot: u64 = grant.per_cell_prb.values().map(|p| *p as u64).sum();
    active_slots * prb_per_slot
}

/// One record per owned slice whose schedule touches `[from_slot, to_slot]`
/// (released slices always report, possibly with zero consumption).
pub fn charging_records(
    registry: &SliceRegistry,
    tenant: Option<&TenantId>,
    from_slot: u64,
    to_slot: u64,
    config: &ChargingConfig,
) -> Vec<ChargingRecord> {
    let now_slot = registry.now_slot();
    let horizon = registry.horizon_slot();
    let mut records = Vec::new();
    for grant in registry.grants() {
        if let Some(t) = tenant {
            if &grant.tenant != t {
                continue;
            }
        }
        let released_at = registry.released_at(&grant.slice_id);
        let scheduled_in_range = grant
            .time
            .active_intervals(horizon.min(to_slot))
            .iter()
            .any(|(start, end)| *start <= to_slot && *end > from_slot);
        if !scheduled_in_range && released_at.is_none() {
            continue;
        }
        let consumed =
            consumed_prb_slots(grant, horizon, released_at, from_slot, to_slot, now_slot);
        let multiplier = config.multiplier(grant.qos.bearer);
        records.push(ChargingRecord {
            slice_id: grant.slice_id.clone(),
            tenant: grant.tenant.clone(),
            prb_slots_consumed: consumed,
            qos_multiplier: multiplier,
            amount: consumed as f64 * multiplier,
        });
    }
    records
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::broker::{AdmissionContext, Broker};
    use crate::domain::{
        validate_request, CellId, EfficiencyTable, QosProfile, RequestId, ResourceSpec, SliceMode,
        SliceRequest, SliceTemplate, TimeSpec,
    };
    use crate::ransim::{CellModel, CoreConfig, ScenarioArchetype, Topology};
    use crate::telemetry::ZeroForecast;
    use std::collections::BTreeMap;

    fn topo() -> Topology {
        let plmn = crate::domain::PlmnId::new("00101").unwrap();
        let mut c1 = CellModel::new(CellId::new("C1").unwrap(), 100);
        c1.add_operator(plmn.clone()).unwrap();
        let mut c2 = CellModel::new(CellId::new("C2").unwrap(), 100);
        c2.add_operator(plmn.clone()).unwrap();
        Topology {
            core: CoreConfig::Mocn {
                endpoints: BTreeMap::from([(
                    plmn,
                    crate::domain::EndpointId::new("mme-1").unwrap(),
                )]),
            },
            cells: BTreeMap::from([
                (CellId::new("C1").unwrap(), c1),
                (CellId::new("C2").unwrap(), c2),
            ]),
            archetype: ScenarioArchetype::Custom,
        }
    }

    fn gbr_qos() -> QosProfile {
        let mut q = SliceTemplate::Automotive.default_qos();
        q.priority = 1;
        q
    }

    fn admit(
        broker: &mut Broker,
        topo: &Topology,
        id: &str,
        prb: u32,
        time: TimeSpec,
        cells: &[&str],
    ) -> crate::domain::SliceId {
        let req = SliceRequest {
            request_id: RequestId::new(id).unwrap(),
            tenant: TenantId::operator("00101").unwrap(),
            resources: ResourceSpec::physical(prb),
            time,
            qos: gbr_qos(),
            service: SliceTemplate::Automotive.default_service(),
            cells: Some(cells.iter().map(|c| CellId::new(*c).unwrap()).collect()),
            template: None,
        };
        let validated = validate_request(&req, &topo.cell_ids()).unwrap();
        let locations = BTreeMap::new();
        let ctx = AdmissionContext {
            topology: topo,
            forecaster: &ZeroForecast,
            ue_locations: &locations,
            efficiency: &EfficiencyTable::default(),
            slots_per_day: 86_400,
        };
        let d = broker.admit(&validated, &ctx);
        d.grant.unwrap().slice_id
    }

    #[test]
    fn gbr_slice_active_hundred_slots_bills_ten_times_hundred_times_multiplier() {
        let topo = topo();
        let mut broker = Broker::new(SliceMode::TwoLayer, 1000);
        admit(
            &mut broker,
            &topo,
            "r1",
            10,
            TimeSpec::once(0, 100),
            &["C1"],
        );
        for slot in 0..100 {
            broker.tick(slot).unwrap();
        }
        let records = charging_records(broker.registry(), None, 0, 999, &ChargingConfig::default());
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].prb_slots_consumed, 10 * 100);
        assert_eq!(records[0].qos_multiplier, 1.5);
        assert_eq!(records[0].amount, 1500.0);
    }

    #[test]
    fn released_before_start_yields_zero_consumption_record() {
        let topo = topo();
        let mut broker = Broker::new(SliceMode::TwoLayer, 1000);
        let slice = admit(
            &mut broker,
            &topo,
            "r1",
            10,
            TimeSpec::once(50, 100),
            &["C1"],
        );
        broker.tick(0).unwrap();
        broker.release(&slice).unwrap();
        for slot in 1..100 {
            broker.tick(slot).unwrap();
        }
        let records = charging_records(broker.registry(), None, 0, 999, &ChargingConfig::default());
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].prb_slots_consumed, 0);
        assert_eq!(records[0].amount, 0.0);
    }

    #[test]
    fn multi_cell_consumption_sums_per_cell_grants() {
        let topo = topo();
        let mut broker = Broker::new(SliceMode::TwoLayer, 1000);
        admit(
            &mut broker,
            &topo,
            "r1",
            7,
            TimeSpec::once(0, 20),
            &["C1", "C2"],
        );
        for slot in 0..50 {
            broker.tick(slot).unwrap();
        }
        let records = charging_records(broker.registry(), None, 0, 999, &ChargingConfig::default());
        // 7 PRB on each of 2 cells over 20 slots.
        assert_eq!(records[0].prb_slots_consumed, 7 * 2 * 20);
    }

    #[test]
    fn consumption_counts_only_elapsed_slots() {
        let topo = topo();
        let mut broker = Broker::new(SliceMode::TwoLayer, 1000);
        admit(
            &mut broker,
            &topo,
            "r1",
            10,
            TimeSpec::once(0, 100),
            &["C1"],
        );
        for slot in 0..30 {
            broker.tick(slot).unwrap();
        }
        let records = charging_records(broker.registry(), None, 0, 999, &ChargingConfig::default());
        assert_eq!(records[0].prb_slots_consumed, 10 * 30);
    }

    #[test]
    fn tenant_filter_hides_foreign_slices() {
        let topo = topo();
        let mut broker = Broker::new(SliceMode::TwoLayer, 1000);
        admit(&mut broker, &topo, "r1", 10, TimeSpec::once(0, 10), &["C1"]);
        let other = TenantId::service("grid-util").unwrap();
        let records = charging_records(
            broker.registry(),
            Some(&other),
            0,
            999,
            &ChargingConfig::default(),
        );
        assert!(records.is_empty());
    }
}
