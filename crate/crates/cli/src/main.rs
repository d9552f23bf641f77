//! Scenario runner and operator tooling for the slice broker simulator.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};

use slicebroker_core::domain::SliceMode;
use slicebroker_core::interfaces::server::Server;
use slicebroker_core::interfaces::ServiceState;
use slicebroker_core::runner::{
    encode_decision_record, parse_decision_log, registry_digest, replay_log, run_to_directory,
    RunError,
};
use slicebroker_core::scenario::{load_scenario_file, ConfigError, ScenarioConfig};

const EXIT_OK: u8 = 0;
const EXIT_CONFIG: u8 = 1;
const EXIT_INVARIANT: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(
    name = "slicebroker",
    version,
    about = "Multi-tenant shared-RAN simulator with an on-demand network slice broker"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario to completion and write artifacts into --out.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the commitment horizon (slots).
        #[arg(long)]
        horizon: Option<u64>,
    },
    /// Serve the signaling endpoints over TCP, advancing slots in
    /// (accelerated) wall-clock time.
    Serve {
        config: PathBuf,
        #[arg(long)]
        port: u16,
        /// Simulated slots per wall-clock second.
        #[arg(long, default_value_t = 1.0)]
        speedup: f64,
        /// Append decision-log records here while serving.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse and validate a scenario file.
    Validate { config: PathBuf },
    /// Rebuild a registry from a decision log and print its digest.
    Replay {
        log: PathBuf,
        /// Scenario file providing mode/horizon (defaults otherwise).
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run {
            config,
            out,
            seed,
            horizon,
        } => cmd_run(&config, &out, seed, horizon),
        Command::Serve {
            config,
            port,
            speedup,
            out,
        } => cmd_serve(&config, port, speedup, out.as_deref()),
        Command::Validate { config } => cmd_validate(&config),
        Command::Replay { log, config } => cmd_replay(&log, config.as_deref()),
    };
    ExitCode::from(code)
}

fn load_with_overrides(
    path: &Path,
    seed: Option<u64>,
    horizon: Option<u64>,
) -> Result<ScenarioConfig, ConfigError> {
    let mut config = load_scenario_file(path)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    if let Some(horizon) = horizon {
        config.horizon_slots = horizon;
    }
    Ok(config)
}

fn config_exit(err: &ConfigError) -> u8 {
    match err {
        ConfigError::Io { .. } => EXIT_IO,
        _ => EXIT_CONFIG,
    }
}

fn run_exit(err: &RunError) -> u8 {
    match err {
        RunError::Config(e) => config_exit(e),
        RunError::Sim(_) => EXIT_INVARIANT,
        RunError::Io(_) => EXIT_IO,
    }
}

fn cmd_run(config_path: &Path, out: &Path, seed: Option<u64>, horizon: Option<u64>) -> u8 {
    let config = match load_with_overrides(config_path, seed, horizon) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return config_exit(&e);
        }
    };
    let validated = match config.validate() {
        Ok(v) => v,
        Err(e) => {
            eprintln!("{e}");
            return config_exit(&e);
        }
    };
    match run_to_directory(&validated, out) {
        Ok(artifacts) => {
            let s = &artifacts.summary;
            println!("scenario:    {}", validated.config.name);
            println!("slots run:   {}", s.slots_run);
            println!("grants:      {}", s.grants);
            for (reason, count) in &s.rejections {
                println!("rejected:    {count} ({reason})");
            }
            println!("activations: {}", s.activations);
            println!("sla events:  {}", s.sla_events);
            println!("handovers:   {}", s.handovers);
            println!("charged:     {:.1}", s.charging_total);
            println!("artifacts:   {}", out.display());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("{e}");
            run_exit(&e)
        }
    }
}

fn cmd_validate(config_path: &Path) -> u8 {
    match load_scenario_file(config_path).and_then(|c| c.validate().map(|v| (c, v))) {
        Ok((config, validated)) => {
            println!(
                "ok: {} ({} cells, {} tenants, {} scripted requests)",
                config.name,
                validated.topology.cells.len(),
                config.tenants.len(),
                config.requests.len()
            );
            EXIT_OK
        }
        Err(e) => {
            eprintln!("{e}");
            config_exit(&e)
        }
    }
}

fn cmd_serve(config_path: &Path, port: u16, speedup: f64, out: Option<&Path>) -> u8 {
    if !(speedup.is_finite() && speedup > 0.0) {
        eprintln!("CONFIG_INVALID at --speedup: must be positive");
        return EXIT_CONFIG;
    }
    let validated = match load_scenario_file(config_path).and_then(|c| c.validate()) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("{e}");
            return config_exit(&e);
        }
    };
    let (sim, directory) = match validated.build() {
        Ok(pair) => pair,
        Err(e) => {
            eprintln!("{e}");
            return config_exit(&e);
        }
    };
    let state = ServiceState::new(sim, directory);
    let slot_duration = Duration::from_secs_f64(1.0 / speedup);
    let server = match Server::start(
        std::sync::Arc::clone(&state),
        &format!("127.0.0.1:{port}"),
        Some(slot_duration),
    ) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("BIND_FAILED: {e}");
            return EXIT_IO;
        }
    };
    println!(
        "serving {} on {} ({} slots/s)",
        validated.config.name,
        server.local_addr(),
        speedup
    );

    let log_path = out.map(|dir| {
        std::fs::create_dir_all(dir).ok();
        dir.join("decisions.log")
    });
    let mut flushed = 0usize;
    loop {
        std::thread::sleep(Duration::from_millis(200));
        if let Some(path) = &log_path {
            if let Err(e) = flush_decisions(&state, path, &mut flushed) {
                eprintln!("log write failed: {e}");
                server.shutdown();
                return EXIT_IO;
            }
        }
        if let Some(e) = server.clock_error() {
            eprintln!("invariant violation stopped the clock: {e}");
            server.shutdown();
            return EXIT_INVARIANT;
        }
    }
}

fn flush_decisions(state: &ServiceState, path: &Path, flushed: &mut usize) -> std::io::Result<()> {
    use std::io::Write;
    let pending: Vec<String> = {
        let sim = state.sim.lock().unwrap();
        let log = sim.decision_log();
        log[*flushed..].iter().map(encode_decision_record).collect()
    };
    if pending.is_empty() {
        return Ok(());
    }
    let mut file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)?;
    for line in &pending {
        writeln!(file, "{line}")?;
    }
    file.flush()?;
    *flushed += pending.len();
    Ok(())
}

fn cmd_replay(log_path: &Path, config_path: Option<&Path>) -> u8 {
    let text = match std::fs::read_to_string(log_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", log_path.display());
            return EXIT_IO;
        }
    };
    let records = match parse_decision_log(&text) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_CONFIG;
        }
    };
    let (mode, horizon) = match config_path {
        Some(path) => match load_scenario_file(path).and_then(|c| c.validate()) {
            Ok(v) => (v.params.mode, v.params.horizon_slot),
            Err(e) => {
                eprintln!("{e}");
                return config_exit(&e);
            }
        },
        None => (SliceMode::TwoLayer, 7 * 86_400),
    };
    match replay_log(&records, mode, horizon) {
        Ok(broker) => {
            println!("replayed {} records", records.len());
            for (state, count) in registry_digest(&broker) {
                println!("{state:>9}: {count}");
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("{e}");
            run_exit(&e)
        }
    }
}
