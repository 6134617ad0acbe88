//! Experiment engine behind the `alohacr` binary.
//!
//! Each subcommand is a pure function of its configuration and seed to a set
//! of output bytes: a CSV table (the normative artifact) and a best-effort
//! SVG rendering of the same numbers.

pub mod config;
pub mod csv;
pub mod measure;
pub mod plot;

pub mod commands {
    pub mod analytic;
    pub mod ber_sweep;
    pub mod mac_sweep;
    pub mod prop1_scan;
}

pub use config::{AnalyticConfig, BerSweepConfig, MacSweepConfig, Prop1Config};
