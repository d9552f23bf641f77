//! Append-only decision log and its replay.
//!
//! One record per decision, release, and a final clock mark. Replaying a log
//! through a fresh broker reconstructs the registry exactly: grants are
//! re-applied (not re-decided), releases re-cut, and the clock re-ticked.

use serde::{Deserialize, Serialize};

use crate::domain::{SliceId, SliceMode, SliceRequest};

use super::{Broker, BrokerError, Decision, SliceState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
#[allow(clippy::large_enum_variant)] // one record per decision; boxing buys nothing
pub enum DecisionLogRecord {
    /// An admission decision, with the request it answered.
    #[serde(rename = "DECISION")]
    Decision {
        decision: Decision,
        request: SliceRequest,
    },
    /// A release, with its position in the decision order.
    #[serde(rename = "RELEASE")]
    Release {
        seq: u64,
        slot: u64,
        slice_id: SliceId,
    },
    /// Clock mark: the log's owner had ticked up to this slot.
    #[serde(rename = "CLOCK")]
    Clock { slot: u64 },
}

impl DecisionLogRecord {
    fn slot(&self) -> u64 {
        match self {
            DecisionLogRecord::Decision { decision, .. } => decision.slot,
            DecisionLogRecord::Release { slot, .. } => *slot,
            DecisionLogRecord::Clock { slot } => *slot,
        }
    }
}

/// Rebuild a broker by replaying a decision log.
///
/// `mode` and `horizon_slot` must match the original configuration (they are
/// scenario parameters, not logged per record).
pub fn replay_decisions(
    records: &[DecisionLogRecord],
    mode: SliceMode,
    horizon_slot: u64,
) -> Result<Broker, BrokerError> {
    let mut broker = Broker::new(mode, horizon_slot);

    for record in records {
        // Records at slot s were produced before tick(s); catch the clock up
        // to s-1 first.
        let slot = record.slot();
        if slot > 0 {
            tick_to(&mut broker, slot - 1)?;
        }
        match record {
            DecisionLogRecord::Decision { decision, .. } => {
                broker.restore_seq(decision.seq + 1);
                if let Some(grant) = &decision.grant {
                    broker.registry.note_request_id(grant.request_id.clone());
                    broker.registry.bump_slice_counter_for(&grant.slice_id);
                    broker.registry.apply_grant(grant.clone(), decision.seq);
                }
            }
            DecisionLogRecord::Release {
                seq,
                slot,
                slice_id,
            } => {
                broker.restore_seq(seq + 1);
                match broker.registry.state(slice_id) {
                    None => {
                        return Err(BrokerError::BadDecisionLog {
                            detail: format!("release of unknown slice {slice_id}"),
                        })
                    }
                    Some(SliceState::Released) => {
                        return Err(BrokerError::BadDecisionLog {
                            detail: format!("double release of slice {slice_id}"),
                        })
                    }
                    Some(_) => {}
                }
                broker.registry.remove_future_commitments(slice_id, *slot);
                broker.registry.set_state(slice_id, SliceState::Released);
                broker.registry.note_release(slice_id, *slot);
            }
            DecisionLogRecord::Clock { slot } => {
                tick_to(&mut broker, *slot)?;
            }
        }
    }
    Ok(broker)
}

fn tick_to(broker: &mut Broker, slot: u64) -> Result<(), BrokerError> {
    let mut next = match broker.registry.clock() {
        Some(c) => c + 1,
        None => 0,
    };
    while next <= slot {
        broker.tick(next)?;
        next += 1;
    }
    Ok(())
}
