//! Multi-tenant shared-RAN simulator with an on-demand network slice broker.
//!
//! Tenants (operators identified by PLMN-id, verticals and OTT providers by
//! service id) lease isolated slices of shared radio capacity over a
//! line-oriented signaling protocol. The broker admits requests against
//! per-cell commitments plus a background-load forecast, configures the
//! RAN through grant-level and per-cell push messages, meters consumption
//! for charging, and exports privacy-filtered per-tenant KPI reports.

pub mod broker;
pub mod domain;
pub mod interfaces;
pub mod ransim;
pub mod runner;
pub mod scenario;
pub mod scheduler;
pub mod sim;
pub mod telemetry;
