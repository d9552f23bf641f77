//! Scenario configuration: the versioned, human-readable description of a
//! run — topology, tenants, devices, scripted behavior — validated against
//! every domain invariant before anything executes.

mod config;

pub use config::{
    load_scenario_file, parse_scenario, scenario_to_canonical_json, CellConfig, ConfigError,
    OutageWindow, ScenarioConfig, ScenarioRequest, TenantEntry, UeConfig, ValidatedScenario,
};
