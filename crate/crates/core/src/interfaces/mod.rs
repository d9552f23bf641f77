//! Northbound signaling (operator Type-5 style and third-party service
//! exposure), the southbound per-cell configuration fan-out, and the wire
//! format for all of it.

pub mod charging;
pub mod server;
pub mod service;
pub mod session;
pub mod wire;

pub use charging::{charging_records, ChargingConfig};
pub use service::{ServiceState, SessionHandler};
pub use session::{authenticate, scope_allows, PartyDirectory, Session, SessionError};
pub use wire::{decode, encode, Envelope, Message, SessionScope, WireError, PROTOCOL_VERSION};

use crate::broker::ConfigPush;
use wire::{ConfigItfBBody, ConfigItfNBody};

/// Fan a slice configuration out toward the RAN: one grant-level message
/// for the domain manager and one per-cell message for each base station,
/// every one of them carrying the tenant identifier.
pub fn push_config(push: &ConfigPush) -> (ConfigItfNBody, Vec<ConfigItfBBody>) {
    let itf_n = ConfigItfNBody {
        slot: push.slot,
        action: push.action,
        slice_id: push.slice_id.clone(),
        tenant: push.tenant.clone(),
        cells: push.per_cell_prb.keys().cloned().collect(),
        mode: push.mode,
    };
    let itf_bs = push
        .per_cell_prb
        .iter()
        .map(|(cell, prb)| ConfigItfBBody {
            slot: push.slot,
            action: push.action,
            cell_id: cell.clone(),
            slice_id: push.slice_id.clone(),
            tenant: push.tenant.clone(),
            prb_per_slot: *prb,
            mode: push.mode,
        })
        .collect();
    (itf_n, itf_bs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::broker::PushAction;
    use crate::domain::{CellId, SliceId, SliceMode, TenantId};
    use std::collections::BTreeMap;

    #[test]
    fn push_fans_out_one_message_per_cell() {
        let push = ConfigPush {
            slot: 9,
            action: PushAction::Activate,
            slice_id: SliceId::new("sl-000001").unwrap(),
            tenant: TenantId::operator("00101").unwrap(),
            per_cell_prb: BTreeMap::from([
                (CellId::new("C1").unwrap(), 10),
                (CellId::new("C2").unwrap(), 10),
            ]),
            mode: SliceMode::TwoLayer,
        };
        let (itf_n, itf_bs) = push_config(&push);
        assert_eq!(itf_n.cells.len(), 2);
        assert_eq!(itf_bs.len(), 2);
        // Every per-cell message carries the tenant identifier.
        for b in &itf_bs {
            assert_eq!(b.tenant, push.tenant);
            assert_eq!(b.prb_per_slot, 10);
        }

        let deactivate = ConfigPush {
            action: PushAction::Deactivate,
            ..push
        };
        let (_, down) = push_config(&deactivate);
        assert_eq!(down.len(), itf_bs.len());
    }
}
