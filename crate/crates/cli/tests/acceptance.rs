//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line with the measured numbers (run with `--nocapture` to see
//! the lines on success).

use std::sync::OnceLock;

use alohacr_cli::measure::{measure_ber_point, BerTally, SlotScenario};
use alohacr_delay_design::{
    nonresolvable_probability, nonresolvable_probability_monte_carlo, scan_spread, DelayModel,
    NaturalDelaySpread,
};
use alohacr_mac_analytic::{
    active_probability, approx_throughput, asymptotic_throughput, optimal_contention,
    saturated_success, service_delay, stability_profile, throughput_finite, total_delay,
    DelayPrediction, LinkProbs,
};
use alohacr_mac_sim::{run as run_sim, sweep, SimConfig, SweepRow};
use alohacr_phy_core::{CodeBook, Complex64};
use alohacr_phy_receiver::{ReceiveMode, ReceiverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(criterion: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {criterion} ({name}): {} - {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} ({name}): {detail}");
}

fn paper_probs() -> LinkProbs {
    LinkProbs::testbed_reference()
}

/// Criterion 1: with P0 = 1 and no pair resolution the model collapses to
/// classical slotted ALOHA and its 1/e limit.
#[test]
fn criterion_1_classical_aloha_limit() {
    let classical = LinkProbs::classical(1.0);
    let asymptotic = asymptotic_throughput(&classical).unwrap();
    let inv_e = (-1.0f64).exp();
    let asymptotic_ok = (asymptotic - inv_e).abs() < 1e-6;

    let j = 100;
    let finite = throughput_finite(j, 1.0 / j as f64, &classical);
    let finite_ok = (finite - inv_e).abs() / inv_e < 0.01;

    verdict(
        1,
        "classical ALOHA limit",
        asymptotic_ok && finite_ok,
        &format!("asymptotic {asymptotic:.8} vs 1/e {inv_e:.8}; C(100, 1/100) = {finite:.6}"),
    );
}

/// Criterion 2: the closed-form optimal contention equals the grid argmax of
/// the finite-network throughput.
#[test]
fn criterion_2_optimal_contention_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for j in [3usize, 5, 10, 50] {
        for _ in 0..20 {
            let p0 = rng.random_range(0.05..1.0);
            let p1 = rng.random_range(0.0..1.0);
            let p2 = rng.random_range(0.0..(1.0 - p1));
            let probs = LinkProbs::new(p0, p1, p2).unwrap();
            let formula = optimal_contention(j, &probs).unwrap();
            let mut best = (0.0f64, f64::MIN);
            let mut p = 0.0005;
            while p <= 1.0 {
                let c = throughput_finite(j, p, &probs);
                if c > best.1 {
                    best = (p, c);
                }
                p += 0.001;
            }
            let target = if formula.clamped { 1.0 } else { formula.p_star };
            worst = worst.max((target - best.0).abs());
            checked += 1;
        }
    }
    verdict(
        2,
        "optimal contention vs grid argmax",
        worst <= 1.5e-3,
        &format!("{checked} draws, worst |formula - argmax| = {worst:.2e}"),
    );
}

const GUARD: f64 = 0.05;

struct GridCell {
    r: f64,
    p: f64,
    q_sim: f64,
    tput_sim: f64,
    dtot_sim: Option<f64>,
    dsrv_sim: Option<f64>,
    q_pred: f64,
    tput_pred: f64,
    dtot_pred: DelayPrediction,
    dsrv_pred: f64,
    stable: bool,
    /// Distance of p from the nearest stability boundary.
    boundary_margin: f64,
}

fn paper_grid() -> &'static Vec<GridCell> {
    static GRID: OnceLock<Vec<GridCell>> = OnceLock::new();
    GRID.get_or_init(|| {
        let probs = paper_probs();
        let j = 4;
        let r_grid = [0.5, 0.25, 0.125, 0.0625, 0.03125];
        let p_grid: Vec<f64> = (1..=19).map(|i| 0.05 * i as f64).collect();
        let mut base = SimConfig::abstract_mode(j, 0.0, 0.5, probs, 20_260_101);
        // generous warmup so knife-edge cells reach their steady state; the
        // measurement window itself stays at 1e5 slots
        base.warmup_slots = 1_000_000;
        base.measure_slots = 100_000;
        let rows: Vec<SweepRow> = sweep(&base, &r_grid, &p_grid);
        rows.into_iter()
            .map(|row| {
                let (r, p) = (row.arrival_rate, row.contention);
                let profile = stability_profile(j, r, p, &probs).unwrap();
                let boundary_margin = match (profile.p_min, profile.p_max) {
                    (Some(lo), Some(hi)) => (p - lo).abs().min((p - hi).abs()),
                    _ => f64::INFINITY,
                };
                GridCell {
                    r,
                    p,
                    q_sim: row.stats.q_measured,
                    tput_sim: row.stats.throughput,
                    dtot_sim: row.stats.mean_total_delay,
                    dsrv_sim: row.stats.mean_service_delay,
                    q_pred: active_probability(&profile, p),
                    tput_pred: approx_throughput(j, r, p, &probs).unwrap(),
                    dtot_pred: total_delay(j, r, p, &probs).unwrap(),
                    dsrv_pred: service_delay(j, r, p, &probs).unwrap(),
                    stable: profile.stable,
                    boundary_margin,
                }
            })
            .collect()
    })
}

/// Criterion 3: the measured active probability and throughput reproduce the
/// closed forms over the full measurement grid; the heaviest arrival rate is
/// unstable everywhere. Cells within 0.05 of the stability boundary are
/// exempt from the 0.02 match (the knife edge, where the fixed-point
/// approximation is not claimed), mirroring the delay criterion's guard.
#[test]
fn criterion_3_active_probability_and_throughput() {
    let cells = paper_grid();
    let mut worst_q: (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut worst_t: (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut excluded = 0;
    let mut failures = Vec::new();
    for cell in cells {
        if cell.r == 0.5 && cell.q_sim < 0.999 {
            failures.push(format!("r=1/2 p={:.2} q={:.4} not saturated", cell.p, cell.q_sim));
        }
        if cell.boundary_margin < GUARD {
            excluded += 1;
            continue;
        }
        let dq = (cell.q_sim - cell.q_pred).abs();
        let dt = (cell.tput_sim - cell.tput_pred).abs();
        if dq > worst_q.0 {
            worst_q = (dq, cell.r, cell.p);
        }
        if dt > worst_t.0 {
            worst_t = (dt, cell.r, cell.p);
        }
        if dq > 0.02 {
            failures.push(format!("q at (r={}, p={:.2}): {:.4} vs {:.4}", cell.r, cell.p, cell.q_sim, cell.q_pred));
        }
        if dt > 0.02 {
            failures.push(format!("tput at (r={}, p={:.2}): {:.4} vs {:.4}", cell.r, cell.p, cell.tput_sim, cell.tput_pred));
        }
    }
    verdict(
        3,
        "active probability and throughput grid",
        failures.is_empty(),
        &format!(
            "{} cells ({} knife-edge exempt), worst dq {:.4} at (r={}, p={:.2}), worst dtput {:.4} at (r={}, p={:.2}){}",
            cells.len(),
            excluded,
            worst_q.0,
            worst_q.1,
            worst_q.2,
            worst_t.0,
            worst_t.1,
            worst_t.2,
            if failures.is_empty() {
                String::new()
            } else {
                format!("; failures: {failures:?}")
            }
        ),
    );
}

/// Criterion 4: measured delays match the geom/geom/1 forms on stable cells
/// away from the boundary.
#[test]
fn criterion_4_delay_reproduction() {
    let cells = paper_grid();
    let mut n = 0;
    let mut worst_tot: f64 = 0.0;
    let mut worst_srv: f64 = 0.0;
    let mut failures = Vec::new();
    for cell in cells {
        if !cell.stable || cell.boundary_margin < GUARD {
            continue;
        }
        let DelayPrediction::Finite(dtot_pred) = cell.dtot_pred else {
            continue;
        };
        let (Some(dtot_sim), Some(dsrv_sim)) = (cell.dtot_sim, cell.dsrv_sim) else {
            failures.push(format!("no delivered packets at (r={}, p={:.2})", cell.r, cell.p));
            continue;
        };
        n += 1;
        let rel_tot = (dtot_sim - dtot_pred).abs() / dtot_pred;
        let rel_srv = (dsrv_sim - cell.dsrv_pred).abs() / cell.dsrv_pred;
        worst_tot = worst_tot.max(rel_tot);
        worst_srv = worst_srv.max(rel_srv);
        if rel_tot > 0.10 {
            failures.push(format!(
                "total delay at (r={}, p={:.2}): {dtot_sim:.3} vs {dtot_pred:.3}",
                cell.r, cell.p
            ));
        }
        if rel_srv > 0.10 {
            failures.push(format!(
                "service delay at (r={}, p={:.2}): {dsrv_sim:.3} vs {:.3}",
                cell.r, cell.p, cell.dsrv_pred
            ));
        }
    }
    verdict(
        4,
        "delay reproduction",
        failures.is_empty() && n > 20,
        &format!(
            "{n} stable interior cells, worst total-delay error {:.1}%, worst service-delay error {:.1}%{}",
            worst_tot * 100.0,
            worst_srv * 100.0,
            if failures.is_empty() {
                String::new()
            } else {
                format!("; failures: {failures:?}")
            }
        ),
    );
}

/// Criterion 5: the non-resolvable-collision probability has a local minimum
/// at T = Ts, a flat derivative there, and the quadrature agrees with Monte
/// Carlo.
#[test]
fn criterion_5_delay_spread_minimum() {
    let model = DelayModel::new(
        1.0,
        1.0,
        0.125,
        NaturalDelaySpread::Gaussian { sigma: 1.0 / 20.0 },
    )
    .unwrap();
    let grid: Vec<f64> = (0..=12).map(|i| 0.7 + 0.05 * i as f64).collect();
    let scan = scan_spread(&model, &grid).unwrap();
    let p_at = |t: f64| -> f64 {
        scan.points
            .iter()
            .find(|pt| (pt.spread - t).abs() < 1e-9)
            .unwrap()
            .probability
    };
    let local_min =
        scan.local_min_at_ts && scan.probability_at_ts < p_at(0.9) && scan.probability_at_ts < p_at(1.1);
    let derivative_bound = 1e-3 * scan.probability_at_ts / 1.0;
    let flat = scan.derivative_at_ts.abs() < derivative_bound;

    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let quad = nonresolvable_probability(&model).unwrap();
    let (mc, se) = nonresolvable_probability_monte_carlo(&model, 1_000_000, &mut rng);
    let mc_ok = (quad - mc).abs() <= 3.0 * se;

    verdict(
        5,
        "delay-spread local minimum",
        local_min && flat && mc_ok,
        &format!(
            "P_c(Ts) = {:.6} < P_c(0.9 Ts) = {:.6}, P_c(1.1 Ts) = {:.6}; |dP_c/dT| = {:.2e} < {:.2e}; quadrature {quad:.6} vs MC {mc:.6} (3 SE = {:.1e})",
            scan.probability_at_ts,
            p_at(0.9),
            p_at(1.1),
            scan.derivative_at_ts.abs(),
            derivative_bound,
            3.0 * se
        ),
    );
}

/// Criterion 6: the blind pipeline is bit-exact without noise or CFO at a
/// half-symbol delay difference, for one and two users.
#[test]
fn criterion_6_noiseless_pipeline_exactness() {
    use alohacr_phy_core::{mix_channel, random_packet, synthesize_waveform, UserProfile};
    use alohacr_phy_receiver::receive_slot;

    let config = ReceiverConfig::standard();
    let book = CodeBook::standard(4).unwrap();
    let ids = book.user_ids();
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let trials = 100;
    let mut exact = 0;
    for trial in 0..trials {
        let two_users = trial % 2 == 0;
        let d1 = rng.random_range(0..=16usize);
        let mut txs = vec![(random_packet(&book, ids[0], &mut rng).unwrap(), d1)];
        if two_users {
            txs.push((random_packet(&book, ids[1], &mut rng).unwrap(), d1 + 16));
        }
        let waves: Vec<_> = txs
            .iter()
            .map(|(p, d)| synthesize_waveform(p, &config.format, *d).unwrap())
            .collect();
        let profiles: Vec<UserProfile> = txs
            .iter()
            .map(|(p, _)| {
                let theta = rng.random_range(0.0..std::f64::consts::TAU);
                UserProfile {
                    user_id: p.user_id,
                    gain: Complex64::new(theta.cos(), theta.sin()),
                    delay_samples: 0,
                    cfo_hz: 0.0,
                }
            })
            .collect();
        let rx = mix_channel(&waves, &profiles, 0.0, config.format.slot_len(), &mut rng);
        let report = receive_slot(&rx, &book, ReceiveMode::Blind, &config);
        let all_exact = txs.iter().all(|(p, _)| {
            report
                .recovered
                .iter()
                .any(|rec| rec.user_id == p.user_id && rec.payload == p.payload)
        });
        exact += usize::from(all_exact);
    }
    verdict(
        6,
        "noiseless pipeline exactness",
        exact == trials,
        &format!("{exact}/{trials} slots recovered with zero bit errors"),
    );
}

fn ber_point(mode: ReceiveMode, snr_db: f64, packets: usize, seed: u64) -> BerTally {
    static BOOK: OnceLock<(CodeBook, ReceiverConfig)> = OnceLock::new();
    let (book, config) =
        BOOK.get_or_init(|| (CodeBook::standard(4).unwrap(), ReceiverConfig::standard()));
    let scenario = SlotScenario {
        snr_db,
        cfo_max_frac: 0.001,
        natural_delay_sigma: 1.6,
        intentional_delays: true,
        delay_filter: Some([0.375, 0.625]),
    };
    measure_ber_point(book, config, mode, &scenario, packets, seed)
}

fn mean_and_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Criterion 7: qualitative BER structure of the three schemes.
#[test]
fn criterion_7_ber_structure() {
    let packets = 500;
    let blind20 = ber_point(ReceiveMode::Blind, 20.0, packets, 70);
    let train20 = ber_point(ReceiveMode::Training, 20.0, packets, 71);
    let sic20 = ber_point(ReceiveMode::SicOnly, 20.0, packets, 72);
    let sic30 = ber_point(ReceiveMode::SicOnly, 30.0, packets, 73);
    let blind25 = ber_point(ReceiveMode::Blind, 25.0, packets, 74);

    // (a) blind raw BER at 20 dB
    let a_ok = blind20.raw_ber() <= 1e-2;

    // (b) ordering with statistical significance over per-packet BERs
    let (mb, sb) = mean_and_se(&blind20.per_packet_ber);
    let (mt, st) = mean_and_se(&train20.per_packet_ber);
    let (ms, ss) = mean_and_se(&sic20.per_packet_ber);
    let z_bt = (mt - mb) / (sb * sb + st * st).sqrt();
    let z_ts = (ms - mt) / (st * st + ss * ss).sqrt();
    let b_ok = mb < mt && mt < ms && z_bt > 3.0 && z_ts > 3.0;

    // (c) SIC-only error floor
    let c_ok = sic30.raw_ber() >= 0.5 * sic20.raw_ber();

    // (d) per-user delivery fairness at 25 dB
    let u = blind25.per_user_exact;
    let fairness = (u[0] as f64 - u[1] as f64).abs() / (u[0].max(u[1]).max(1) as f64);
    let d_ok = fairness < 0.05;

    verdict(
        7,
        "BER structure",
        a_ok && b_ok && c_ok && d_ok,
        &format!(
            "blind@20 {:.2e} (<= 1e-2: {a_ok}); ordering blind {:.2e} < training {:.2e} < sic {:.2e} (z = {:.1}, {:.1}); sic floor 30 dB {:.2e} vs 0.5x20 dB {:.2e}; fairness {:.3} ({}/{} vs {}/{})",
            blind20.raw_ber(),
            mb,
            mt,
            ms,
            z_bt,
            z_ts,
            sic30.raw_ber(),
            0.5 * sic20.raw_ber(),
            fairness,
            u[0],
            packets / 2,
            u[1],
            packets / 2
        ),
    );
}

/// Criterion 8: intentional delays at least double the pair-resolution
/// success probability against natural delays alone.
#[test]
fn criterion_8_intentional_delay_ablation() {
    let book = CodeBook::standard(4).unwrap();
    let config = ReceiverConfig::standard();
    let slots = 400;
    let with = measure_ber_point(
        &book,
        &config,
        ReceiveMode::Blind,
        &SlotScenario {
            snr_db: 20.0,
            cfo_max_frac: 0.001,
            natural_delay_sigma: 1.6,
            intentional_delays: true,
            delay_filter: None,
        },
        slots * 2,
        80,
    );
    let without = measure_ber_point(
        &book,
        &config,
        ReceiveMode::Blind,
        &SlotScenario {
            snr_db: 20.0,
            cfo_max_frac: 0.001,
            natural_delay_sigma: 1.6,
            intentional_delays: false,
            delay_filter: None,
        },
        slots * 2,
        81,
    );
    let p_with = with.both_exact_slots as f64 / with.slots as f64;
    let p_without = without.both_exact_slots as f64 / without.slots as f64;
    let ok = p_with >= 2.0 * p_without && p_with > 0.0;
    verdict(
        8,
        "intentional delay ablation",
        ok,
        &format!(
            "pair resolution with intentional delays {:.3} ({}/{}), without {:.3} ({}/{}), ratio {:.1}",
            p_with,
            with.both_exact_slots,
            with.slots,
            p_without,
            without.both_exact_slots,
            without.slots,
            p_with / p_without.max(1e-9)
        ),
    );
}

/// Criterion 9: the per-module property suites, re-run compactly.
#[test]
fn criterion_9_property_suites() {
    let mut results: Vec<(&str, bool, String)> = Vec::new();

    // round-trip coding
    {
        use alohacr_phy_core::coding::{deinterleave, viterbi_decode};
        use alohacr_phy_core::{dqpsk_demodulate, encode_packet, DQPSK_REF};
        let book = CodeBook::standard(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(90);
        let mut ok = true;
        for _ in 0..5 {
            let data: Vec<u8> = (0..382).map(|_| rng.random_range(0..2u8)).collect();
            let pkt = encode_packet(&book, book.user_ids()[1], &data).unwrap();
            let mut stream = vec![DQPSK_REF];
            stream.extend_from_slice(&pkt.symbols);
            let decoded = viterbi_decode(&deinterleave(&dqpsk_demodulate(&stream)));
            ok &= decoded == pkt.payload;
        }
        results.push(("coding round trip", ok, String::new()));
    }

    // equalizer identity on a random full-rank mixing
    {
        use alohacr_phy_receiver::{ls_equalize, MixingEstimate, PolyphaseObservation};
        use nalgebra::DMatrix;
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        let a = DMatrix::from_fn(4, 4, |_, _| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let s = DMatrix::from_fn(4, 300, |_, _| {
            let k = rng.random_range(0..4u8);
            Complex64::new(0.0, std::f64::consts::FRAC_PI_2 * k as f64).exp()
        });
        let y = &a * &s;
        let obs = PolyphaseObservation {
            vectors: (0..300).map(|i| (0..4).map(|m| y[(m, i)]).collect()).collect(),
            offsets: vec![57, 62, 67, 72],
            anchor: 0,
            samples_per_symbol: 32,
            symbol_interval: 32.0 / 40.0e6,
        };
        let out = ls_equalize(&MixingEstimate::from_matrix(a), &obs).unwrap();
        let mut worst: f64 = 0.0;
        for k in 0..4 {
            for i in 0..300 {
                worst = worst.max((out[k][i] - s[(k, i)]).norm());
            }
        }
        results.push(("equalizer identity", worst < 1e-10, format!("worst {worst:.1e}")));
    }

    // blind ambiguity contract: permuted/rotated mixing gives matching sources
    {
        use alohacr_phy_receiver::{jade_separate, PolyphaseObservation};
        use nalgebra::DMatrix;
        let mut rng = ChaCha8Rng::seed_from_u64(92);
        let a = DMatrix::from_fn(4, 4, |_, _| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let mut a2 = a.clone();
        a2.swap_columns(0, 2);
        a2.swap_columns(1, 3);
        for (j, phase) in [0.9f64, 2.0, 3.7, 5.5].iter().enumerate() {
            let rot = Complex64::new(0.0, *phase).exp();
            for i in 0..4 {
                a2[(i, j)] *= rot;
            }
        }
        let s = DMatrix::from_fn(4, 600, |_, _| {
            let k = rng.random_range(0..4u8);
            Complex64::new(
                0.0,
                std::f64::consts::FRAC_PI_4 + std::f64::consts::FRAC_PI_2 * k as f64,
            )
            .exp()
        });
        let observe = |m: &DMatrix<Complex64>| PolyphaseObservation {
            vectors: {
                let y = m * &s;
                (0..600).map(|i| (0..4).map(|r| y[(r, i)]).collect()).collect()
            },
            offsets: vec![57, 62, 67, 72],
            anchor: 0,
            samples_per_symbol: 32,
            symbol_interval: 32.0 / 40.0e6,
        };
        let r1 = jade_separate(&observe(&a), 4).unwrap();
        let r2 = jade_separate(&observe(&a2), 4).unwrap();
        let mut min_best: f64 = 1.0;
        for s1 in &r1.sources {
            let mut best: f64 = 0.0;
            for s2 in &r2.sources {
                let dot: Complex64 = s1.iter().zip(s2.iter()).map(|(x, y)| x * y.conj()).sum();
                best = best.max(dot.norm() / s1.len() as f64);
            }
            min_best = min_best.min(best);
        }
        results.push(("ambiguity contract", min_best > 0.98, format!("min match {min_best:.4}")));
    }

    // packet conservation
    {
        let mut cfg = SimConfig::abstract_mode(4, 0.2, 0.35, paper_probs(), 93);
        cfg.warmup_slots = 2_000;
        cfg.measure_slots = 20_000;
        let stats = run_sim(&cfg);
        let ok = stats.arrivals_total == stats.delivered_total + stats.final_backlog;
        results.push((
            "packet conservation",
            ok,
            format!(
                "{} arrivals = {} delivered + {} backlog",
                stats.arrivals_total, stats.delivered_total, stats.final_backlog
            ),
        ));
    }

    // monotone P_c in delta
    {
        let mut last = 0.0;
        let mut ok = true;
        for delta in [0.05, 0.125, 0.25, 0.4] {
            let model = DelayModel::new(
                1.0,
                1.0,
                delta,
                NaturalDelaySpread::Gaussian { sigma: 0.05 },
            )
            .unwrap();
            let p = nonresolvable_probability(&model).unwrap();
            ok &= p >= last - 1e-12;
            last = p;
        }
        results.push(("monotone P_c in delta", ok, String::new()));
    }

    // stability fixed point: f(q p) = r on the stable branch
    {
        let probs = paper_probs();
        let mut worst: f64 = 0.0;
        for (r, p) in [(0.125, 0.4), (0.0625, 0.3), (0.03125, 0.6)] {
            let profile = stability_profile(4, r, p, &probs).unwrap();
            let q = active_probability(&profile, p);
            worst = worst.max((saturated_success(q * p, 4, &probs) - r).abs());
        }
        results.push(("f(qp) = r residual", worst < 1e-8, format!("worst {worst:.1e}")));
    }

    let all = results.iter().all(|(_, ok, _)| *ok);
    let detail = results
        .iter()
        .map(|(name, ok, extra)| {
            if extra.is_empty() {
                format!("{name}: {}", if *ok { "ok" } else { "FAIL" })
            } else {
                format!("{name}: {} ({extra})", if *ok { "ok" } else { "FAIL" })
            }
        })
        .collect::<Vec<_>>()
        .join("; ");
    verdict(9, "property suites", all, &detail);
}
