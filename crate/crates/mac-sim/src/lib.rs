//! Discrete-time buffered slotted-ALOHA simulator where the receiver can
//! resolve two-user collisions.
//!
//! Each user holds a FIFO queue with Bernoulli arrivals; active queues
//! contend with a fixed probability each slot. Slot outcomes come either
//! from Bernoulli draws against the measured link probabilities (`Abstract`)
//! or from actually synthesizing the contenders' bursts and running the
//! blind receive chain (`Phy`). The measurement protocol warms the system up
//! in abstract mode and gathers statistics afterwards, mirroring how the
//! testbed runs were staged.

pub mod phy_link;
pub mod queue;
pub mod slot;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use alohacr_mac_analytic::LinkProbs;
pub use phy_link::{calibrate_link_probs, PhyLink, PhySimConfig};
pub use queue::QueueState;
pub use slot::{step_slot, SlotClassification, SlotOutcome};

/// How slot outcomes are decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeMode {
    /// Bernoulli draws from the configured link probabilities.
    Abstract,
    /// Synthesized bursts through the blind receive chain.
    Phy,
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    /// Number of users J.
    pub users: usize,
    /// Per-queue Bernoulli arrival rate r.
    pub arrival_rate: f64,
    /// Contention probability p.
    pub contention: f64,
    /// Link probabilities for abstract outcomes (and warmup).
    pub probs: LinkProbs,
    pub mode: OutcomeMode,
    pub warmup_slots: usize,
    pub measure_slots: usize,
    pub seed: u64,
    /// Physical-layer parameters, required when `mode` is `Phy`.
    pub phy: Option<PhySimConfig>,
}

impl SimConfig {
    /// Abstract-mode configuration with the protocol's default windows.
    pub fn abstract_mode(
        users: usize,
        arrival_rate: f64,
        contention: f64,
        probs: LinkProbs,
        seed: u64,
    ) -> SimConfig {
        SimConfig {
            users,
            arrival_rate,
            contention,
            probs,
            mode: OutcomeMode::Abstract,
            warmup_slots: 100_000,
            measure_slots: 100_000,
            seed,
            phy: None,
        }
    }
}

/// Histogram over slot classifications.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OutcomeCounts {
    pub empty: u64,
    pub single_ok: u64,
    pub single_fail: u64,
    pub pair_both: u64,
    pub pair_one: u64,
    pub pair_none: u64,
    pub collision: u64,
}

impl OutcomeCounts {
    fn add(&mut self, c: SlotClassification) {
        match c {
            SlotClassification::Empty => self.empty += 1,
            SlotClassification::SingleOk => self.single_ok += 1,
            SlotClassification::SingleFail => self.single_fail += 1,
            SlotClassification::PairBoth => self.pair_both += 1,
            SlotClassification::PairOne => self.pair_one += 1,
            SlotClassification::PairNone => self.pair_none += 1,
            SlotClassification::Collision => self.collision += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.empty
            + self.single_ok
            + self.single_fail
            + self.pair_both
            + self.pair_one
            + self.pair_none
            + self.collision
    }
}

/// Measured statistics for one (r, p) operating point.
#[derive(Debug, Clone)]
pub struct SimStats {
    /// Fraction of user-slots with a non-empty queue (after arrivals).
    pub q_measured: f64,
    /// Delivered packets per slot over the measurement window.
    pub throughput: f64,
    /// Mean slots from arrival to delivery (inclusive), measurement-window
    /// packets only; `None` when nothing was delivered.
    pub mean_total_delay: Option<f64>,
    /// Mean slots spent at the head of the queue (inclusive).
    pub mean_service_delay: Option<f64>,
    pub delivered_per_user: Vec<u64>,
    pub outcomes: OutcomeCounts,
    /// Whole-run packet accounting (warmup included).
    pub arrivals_total: u64,
    pub delivered_total: u64,
    pub final_backlog: u64,
    /// Standard error of `q_measured` (slot-level, ignores correlation).
    pub q_standard_error: f64,
    /// Standard error of `throughput`.
    pub throughput_standard_error: f64,
    pub measured_slots: usize,
}

fn derive_seed(seed: u64, tag: u64) -> u64 {
    // splitmix64 step over seed ^ golden * tag
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Run one operating point: abstract warmup, then measurement in the
/// configured mode. Bit-reproducible for a fixed config.
pub fn run(config: &SimConfig) -> SimStats {
    assert!(config.users >= 1);
    assert!((0.0..=1.0).contains(&config.arrival_rate));
    assert!((0.0..=1.0).contains(&config.contention));
    assert!(config.measure_slots > 0, "need a measurement window");

    let mut state = QueueState::new(config.users);
    let mut arrivals_total = 0u64;
    let mut delivered_total = 0u64;

    // warmup always runs in abstract mode on its own stream
    let mut warmup_rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, 1));
    for slot in 0..config.warmup_slots {
        let outcome = step_slot(
            &mut state,
            config,
            OutcomeMode::Abstract,
            None,
            slot as u64,
            &mut warmup_rng,
        );
        arrivals_total += outcome.arrivals as u64;
        delivered_total += outcome.delivered.len() as u64;
    }

    let phy_link = match (config.mode, &config.phy) {
        (OutcomeMode::Phy, Some(phy)) => Some(PhyLink::new(config.users, phy.clone())),
        (OutcomeMode::Phy, None) => panic!("phy mode requires phy parameters"),
        _ => None,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, 2));
    let mut active_user_slots = 0u64;
    let mut outcomes = OutcomeCounts::default();
    let mut delivered_per_user = vec![0u64; config.users];
    let mut delivered_measured = 0u64;
    let mut total_delay_sum = 0u64;
    let mut service_delay_sum = 0u64;
    let mut delay_packets = 0u64;

    let measure_start = config.warmup_slots as u64;
    for i in 0..config.measure_slots {
        let slot = measure_start + i as u64;
        let outcome = step_slot(
            &mut state,
            config,
            config.mode,
            phy_link.as_ref(),
            slot,
            &mut rng,
        );
        arrivals_total += outcome.arrivals as u64;
        delivered_total += outcome.delivered.len() as u64;
        active_user_slots += outcome.active_users as u64;
        outcomes.add(outcome.classification);
        for d in &outcome.delivered {
            delivered_per_user[d.user] += 1;
            delivered_measured += 1;
            if d.enqueued_slot >= measure_start {
                total_delay_sum += slot - d.enqueued_slot + 1;
                service_delay_sum += slot - d.head_of_line_slot + 1;
                delay_packets += 1;
            }
        }
    }

    let slots = config.measure_slots as f64;
    let q_measured = active_user_slots as f64 / (slots * config.users as f64);
    let throughput = delivered_measured as f64 / slots;
    SimStats {
        q_measured,
        throughput,
        mean_total_delay: (delay_packets > 0).then(|| total_delay_sum as f64 / delay_packets as f64),
        mean_service_delay: (delay_packets > 0)
            .then(|| service_delay_sum as f64 / delay_packets as f64),
        delivered_per_user,
        outcomes,
        arrivals_total,
        delivered_total,
        final_backlog: state.total_backlog(),
        q_standard_error: (q_measured * (1.0 - q_measured)
            / (slots * config.users as f64))
            .sqrt(),
        throughput_standard_error: (throughput * 2.0 / slots).sqrt(),
        measured_slots: config.measure_slots,
    }
}

/// One row of a parameter sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub arrival_rate: f64,
    pub contention: f64,
    pub stats: SimStats,
}

/// Cartesian sweep over arrival-rate and contention grids. Every cell runs on
/// its own derived seed, so results do not depend on evaluation order; cells
/// run in parallel.
pub fn sweep(base: &SimConfig, r_grid: &[f64], p_grid: &[f64]) -> Vec<SweepRow> {
    let cells: Vec<(usize, f64, f64)> = r_grid
        .iter()
        .enumerate()
        .flat_map(|(i, &r)| {
            p_grid
                .iter()
                .enumerate()
                .map(move |(j, &p)| (i * 10_000 + j, r, p))
        })
        .collect();
    let mut rows: Vec<(usize, SweepRow)> = cells
        .into_par_iter()
        .map(|(tag, r, p)| {
            let mut cfg = base.clone();
            cfg.arrival_rate = r;
            cfg.contention = p;
            cfg.seed = derive_seed(base.seed, 1000 + tag as u64);
            let stats = run(&cfg);
            (
                tag,
                SweepRow {
                    arrival_rate: r,
                    contention: p,
                    stats,
                },
            )
        })
        .collect();
    rows.sort_by_key(|(tag, _)| *tag);
    rows.into_iter().map(|(_, row)| row).collect()
}
