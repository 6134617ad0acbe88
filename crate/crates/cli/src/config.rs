//! Experiment configuration files: JSON with defaults matching the bundled
//! reproduction recipes.

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use std::path::Path;

use alohacr_mac_analytic::LinkProbs;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbsConfig {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
}

impl Default for ProbsConfig {
    fn default() -> Self {
        let p = LinkProbs::testbed_reference();
        ProbsConfig {
            p0: p.p0,
            p1: p.p1,
            p2: p.p2,
        }
    }
}

impl ProbsConfig {
    pub fn link_probs(&self) -> Result<LinkProbs> {
        LinkProbs::new(self.p0, self.p1, self.p2).context("invalid link probabilities")
    }
}

fn default_snr_grid() -> Vec<f64> {
    vec![5.0, 10.0, 15.0, 20.0, 25.0, 30.0]
}

fn default_modes() -> Vec<String> {
    vec!["blind".into(), "training".into(), "sic_only".into()]
}

fn default_packets() -> usize {
    600
}

fn default_cfo() -> f64 {
    0.001
}

fn default_natural_sigma() -> f64 {
    1.6
}

fn default_seed() -> u64 {
    1
}

/// Raw-BER comparison of the three separation schemes over two-user slots.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BerSweepConfig {
    #[serde(default = "default_snr_grid")]
    pub snr_db: Vec<f64>,
    #[serde(default = "default_modes")]
    pub modes: Vec<String>,
    /// Transmitted packets per (SNR, mode) point; two per slot.
    #[serde(default = "default_packets")]
    pub packets_per_point: usize,
    /// Keep only slots whose total delay difference falls in this window,
    /// in fractions of the symbol interval.
    #[serde(default)]
    pub delay_filter: Option<[f64; 2]>,
    /// Maximum CFO as a fraction of the symbol rate, drawn uniformly.
    #[serde(default = "default_cfo")]
    pub cfo_max_frac: f64,
    /// Natural-delay sigma in samples (folded Gaussian).
    #[serde(default = "default_natural_sigma")]
    pub natural_delay_sigma: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl Default for BerSweepConfig {
    fn default() -> Self {
        serde_json::from_str("{}").unwrap()
    }
}

impl BerSweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.snr_db.is_empty() {
            bail!("snr_db grid is empty");
        }
        if self.modes.is_empty() {
            bail!("modes list is empty");
        }
        for m in &self.modes {
            if !matches!(m.as_str(), "blind" | "training" | "sic_only") {
                bail!("unknown mode {m:?} (expected blind, training or sic_only)");
            }
        }
        if self.packets_per_point == 0 {
            bail!("packets_per_point must be positive");
        }
        if let Some([lo, hi]) = self.delay_filter {
            if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo >= hi {
                bail!("delay_filter must be an increasing pair within [0, 1] symbol");
            }
        }
        Ok(())
    }
}

fn default_users() -> usize {
    4
}

fn default_r_grid() -> Vec<f64> {
    vec![0.5, 0.25, 0.125, 0.0625, 0.03125]
}

fn default_p_grid() -> Vec<f64> {
    (1..=19).map(|i| 0.05 * i as f64).collect()
}

fn default_warmup() -> usize {
    100_000
}

fn default_mode() -> String {
    "abstract".into()
}

/// Buffered-ALOHA sweep over arrival-rate and contention grids.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MacSweepConfig {
    #[serde(default = "default_users")]
    pub users: usize,
    #[serde(default)]
    pub probs: ProbsConfig,
    #[serde(default = "default_r_grid")]
    pub r_grid: Vec<f64>,
    #[serde(default = "default_p_grid")]
    pub p_grid: Vec<f64>,
    /// "abstract" or "phy".
    #[serde(default = "default_mode")]
    pub mode: String,
    #[serde(default = "default_warmup")]
    pub warmup_slots: usize,
    /// Defaults to 100000 for abstract mode, 3000 for phy mode.
    #[serde(default)]
    pub measure_slots: Option<usize>,
    /// Physical-layer SNR when mode = "phy".
    #[serde(default)]
    pub snr_db: Option<f64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl Default for MacSweepConfig {
    fn default() -> Self {
        serde_json::from_str("{}").unwrap()
    }
}

impl MacSweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.users < 2 {
            bail!("need at least two users");
        }
        if self.r_grid.is_empty() || self.p_grid.is_empty() {
            bail!("r and p grids must be non-empty");
        }
        for &r in &self.r_grid {
            if !(0.0..=1.0).contains(&r) {
                bail!("arrival rate {r} outside [0, 1]");
            }
        }
        for &p in &self.p_grid {
            if !(p > 0.0 && p < 1.0) {
                bail!("contention probability {p} outside (0, 1)");
            }
        }
        if !matches!(self.mode.as_str(), "abstract" | "phy") {
            bail!("mode must be \"abstract\" or \"phy\"");
        }
        self.probs.link_probs()?;
        Ok(())
    }

    pub fn measure_slots(&self) -> usize {
        self.measure_slots
            .unwrap_or(if self.mode == "phy" { 3_000 } else { 100_000 })
    }
}

fn default_t_grid() -> Vec<f64> {
    (0..=12).map(|i| 0.7 + 0.05 * i as f64).collect()
}

fn default_delta() -> f64 {
    0.125
}

fn default_f_delta_kind() -> String {
    "gaussian".into()
}

fn default_f_delta_param() -> f64 {
    0.05
}

/// Non-resolvable-collision probability versus intentional-delay spread.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Prop1Config {
    /// Spread grid in units of the symbol interval.
    #[serde(default = "default_t_grid")]
    pub t_grid: Vec<f64>,
    /// Resolvability window, units of the symbol interval.
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// "dirac", "gaussian" or "uniform".
    #[serde(default = "default_f_delta_kind")]
    pub f_delta: String,
    /// Sigma (gaussian) or width (uniform), units of the symbol interval.
    #[serde(default = "default_f_delta_param")]
    pub f_delta_param: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl Default for Prop1Config {
    fn default() -> Self {
        serde_json::from_str("{}").unwrap()
    }
}

impl Prop1Config {
    pub fn validate(&self) -> Result<()> {
        if self.t_grid.len() < 2 {
            bail!("t_grid needs at least two points");
        }
        if !(self.t_grid.iter().any(|&t| t < 1.0) && self.t_grid.iter().any(|&t| t > 1.0)) {
            bail!("t_grid must straddle T = Ts");
        }
        if !(self.delta > 0.0) {
            bail!("delta must be positive");
        }
        if !matches!(self.f_delta.as_str(), "dirac" | "gaussian" | "uniform") {
            bail!("f_delta must be dirac, gaussian or uniform");
        }
        Ok(())
    }
}

/// Closed-form model evaluation without simulation.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyticConfig {
    #[serde(default = "default_users")]
    pub users: usize,
    #[serde(default)]
    pub probs: ProbsConfig,
    #[serde(default = "default_r_grid")]
    pub r_grid: Vec<f64>,
    #[serde(default = "default_p_grid")]
    pub p_grid: Vec<f64>,
}

impl Default for AnalyticConfig {
    fn default() -> Self {
        serde_json::from_str("{}").unwrap()
    }
}

impl AnalyticConfig {
    pub fn validate(&self) -> Result<()> {
        if self.users < 2 {
            bail!("need at least two users");
        }
        if self.r_grid.is_empty() || self.p_grid.is_empty() {
            bail!("r and p grids must be non-empty");
        }
        self.probs.link_probs()?;
        Ok(())
    }
}

pub fn load<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}
