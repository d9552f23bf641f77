//! Scenario runs: drive the engine slot by slot from a validated scenario
//! and produce the run artifacts (metrics CSV, decision/event/charging
//! logs, summary).

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::broker::{replay_decisions, Broker, DecisionLogRecord};
use crate::domain::SliceMode;
use crate::scenario::{ConfigError, ValidatedScenario};
use crate::sim::{RunSummary, SimError, Simulation};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    /// An invariant broke mid-run (fail-fast).
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// Everything a run produces, in memory.
pub struct RunArtifacts {
    pub summary: RunSummary,
    pub metrics_csv: String,
    pub decision_log: String,
    pub event_log: String,
    pub charging_log: String,
    pub decisions: Vec<DecisionLogRecord>,
    pub final_broker: Broker,
    pub mode: SliceMode,
    pub horizon_slot: u64,
}

fn ndjson<T: Serialize>(records: impl IntoIterator<Item = T>) -> String {
    let mut out = String::new();
    for record in records {
        let value = serde_json::to_value(&record).expect("serializable record");
        out.push_str(&serde_json::to_string(&value).expect("canonical json"));
        out.push('\n');
    }
    out
}

/// Execute a validated scenario deterministically.
///
/// Per slot: scripted handovers, then request submissions, then releases,
/// then the engine step (broker lifecycle + RAN scheduling + telemetry).
pub fn run_validated(validated: &ValidatedScenario) -> Result<RunArtifacts, RunError> {
    let (mut sim, _directory) = validated.build()?;

    for slot in 0..validated.config.run_slots {
        if let Some(handovers) = validated.handovers_by_slot.get(&slot) {
            for (ue, target) in handovers {
                // A refused handover (non-neighbor, missing broadcast) is a
                // simulation outcome, not a run failure.
                let _ = sim.handover(ue, target);
            }
        }
        if let Some(requests) = validated.requests_by_slot.get(&slot) {
            for request in requests {
                sim.submit_request(request);
            }
        }
        if let Some(releases) = validated.releases_by_slot.get(&slot) {
            for request_id in releases {
                if let Some(slice) = sim.slice_of_request(request_id) {
                    let _ = sim.release(&slice);
                }
            }
        }
        sim.step_slot()?;
    }
    sim.check_invariants()?;
    let summary = sim.finish();
    Ok(collect_artifacts(sim, summary))
}

fn collect_artifacts(sim: Simulation, summary: RunSummary) -> RunArtifacts {
    let charging = sim.charging(None, 0, sim.broker().registry().horizon_slot());
    RunArtifacts {
        metrics_csv: sim.metrics_csv(),
        decision_log: ndjson(sim.decision_log().iter()),
        event_log: ndjson(sim.event_log().iter()),
        charging_log: ndjson(charging.iter()),
        decisions: sim.decision_log().to_vec(),
        mode: sim.params().mode,
        horizon_slot: sim.params().horizon_slot,
        final_broker: sim.broker().clone(),
        summary,
    }
}

/// Run and write artifacts into `out_dir` (created if needed).
pub fn run_to_directory(
    validated: &ValidatedScenario,
    out_dir: &Path,
) -> Result<RunArtifacts, RunError> {
    let artifacts = run_validated(validated)?;
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("metrics.csv"), &artifacts.metrics_csv)?;
    std::fs::write(out_dir.join("decisions.log"), &artifacts.decision_log)?;
    std::fs::write(out_dir.join("events.log"), &artifacts.event_log)?;
    std::fs::write(out_dir.join("charging.log"), &artifacts.charging_log)?;
    let summary_json =
        serde_json::to_string_pretty(&artifacts.summary).expect("serializable summary");
    std::fs::write(out_dir.join("summary.json"), summary_json)?;
    Ok(artifacts)
}

/// Canonical single-line form of one decision-log record.
pub fn encode_decision_record(record: &DecisionLogRecord) -> String {
    let value = serde_json::to_value(record).expect("serializable record");
    serde_json::to_string(&value).expect("canonical json")
}

/// Parse a newline-delimited decision log.
pub fn parse_decision_log(text: &str) -> Result<Vec<DecisionLogRecord>, ConfigError> {
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: DecisionLogRecord =
            serde_json::from_str(line).map_err(|e| ConfigError::Invalid {
                path: format!("line {}", i + 1),
                detail: e.to_string(),
            })?;
        records.push(record);
    }
    Ok(records)
}

/// Rebuild a broker from a decision log (see the broker module for the
/// replay semantics).
pub fn replay_log(
    records: &[DecisionLogRecord],
    mode: SliceMode,
    horizon_slot: u64,
) -> Result<Broker, RunError> {
    let broker = replay_decisions(records, mode, horizon_slot).map_err(SimError::Broker)?;
    Ok(broker)
}

/// Per-slice-state counts plus totals, for the replay tool's summary.
pub fn registry_digest(broker: &Broker) -> BTreeMap<String, u64> {
    let mut digest: BTreeMap<String, u64> = BTreeMap::new();
    for state in broker.registry().states().values() {
        let key = format!("{state:?}").to_uppercase();
        *digest.entry(key).or_insert(0) += 1;
    }
    digest.insert("TOTAL".to_string(), broker.registry().states().len() as u64);
    digest
}
