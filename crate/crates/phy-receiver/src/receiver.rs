//! Per-slot receive pipeline.
//!
//! Every slot is treated as if it held two users. After pilot
//! synchronization the payload window is decomposed into polyphase vectors
//! and separated — blindly (JADE), from the model matrix built out of the
//! sync estimates (training), or not at all (SIC-only, which decodes the
//! strongest user against the other as interference). The strongest decoded
//! user is re-encoded, fitted and deflated from the signal, and the residual
//! is decoded for the second user. Absent or unresolvable users simply
//! produce no recovered packet.

use num_complex::Complex64;

use alohacr_phy_core::waveform::shape_symbols;
use alohacr_phy_core::{encode_packet, BasebandSignal, BurstFormat, CodeBook, DQPSK_REF};
use alohacr_phy_core::packet::PAYLOAD_SYMBOLS;

use crate::decode::{decode_stream, DecodedPacket, SymbolShift};
use crate::equalize::ls_equalize;
use crate::filter::receive_lowpass;
use crate::jade::jade_separate;
use crate::pll::{pll_track, PllResult};
use crate::polyphase::{build_mixing_matrix, polyphase_decompose, PolyphaseObservation, DEFAULT_OFFSETS};
use crate::sic::{
    delay_scatter_landscape, estimate_payload_delay, fit_payload, payload_template, sic_deflate,
    two_grid_minima,
};
use crate::sync::{detect_pilots, synchronize_excluding, SyncResult, DEFAULT_SYNC_THRESHOLD};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReceiveMode {
    Blind,
    Training,
    SicOnly,
}

#[derive(Debug, Clone)]
pub struct ReceiverConfig {
    pub format: BurstFormat,
    pub offsets: Vec<usize>,
    /// Pilot search window in samples.
    pub sync_search: usize,
    pub sync_threshold: f64,
}

impl ReceiverConfig {
    pub fn standard() -> ReceiverConfig {
        let format = BurstFormat::standard();
        let sync_search = 2 * format.samples_per_symbol();
        ReceiverConfig {
            format,
            offsets: DEFAULT_OFFSETS.to_vec(),
            sync_search,
            sync_threshold: DEFAULT_SYNC_THRESHOLD,
        }
    }
}

/// One separated stream as the decoder saw it, kept for diagnostics and raw
/// error-rate accounting.
#[derive(Debug, Clone)]
pub struct RawStream {
    /// Post-PLL symbols.
    pub symbols: Vec<Complex64>,
    pub claimed_user: Option<u32>,
    pub shift: Option<SymbolShift>,
    pub accepted: bool,
    pub constellation_variance: f64,
}

#[derive(Debug, Clone)]
pub struct RecoveredPacket {
    pub user_id: u32,
    pub payload: Vec<u8>,
    pub shift: SymbolShift,
    /// Demodulated coded bits of the winning alignment (interleaved domain).
    pub demod_bits: Vec<u8>,
}

#[derive(Debug, Clone, Default)]
pub struct Diagnostics {
    pub sync: Vec<SyncResult>,
    /// Three or more pilots were detected and the slot was discarded.
    pub collision_declared: bool,
    pub jade_converged: bool,
    pub jade_sweeps: usize,
    pub freq_hats_hz: Vec<f64>,
    pub chosen_variance: Option<f64>,
    pub mixing_condition: Option<f64>,
    pub raw_streams: Vec<RawStream>,
}

#[derive(Debug, Clone)]
pub struct ReceiverReport {
    pub mode: ReceiveMode,
    pub recovered: Vec<RecoveredPacket>,
    pub diagnostics: Diagnostics,
}

impl ReceiverReport {
    fn empty(mode: ReceiveMode) -> ReceiverReport {
        ReceiverReport {
            mode,
            recovered: Vec::new(),
            diagnostics: Diagnostics::default(),
        }
    }
}

/// Observation vectors needed for both decode alignments plus slack.
fn wanted_vectors() -> usize {
    PAYLOAD_SYMBOLS + 3
}

fn anchor_for(config: &ReceiverConfig, lag: usize) -> usize {
    lag + config.format.payload_base() + config.format.payload_pulse.peak_index()
}

fn observe(
    signal: &BasebandSignal,
    config: &ReceiverConfig,
    anchor: usize,
) -> Option<PolyphaseObservation> {
    let sps = config.format.samples_per_symbol();
    let max_delta = 7i64; // largest forward offset of the default mapping
    let available = signal
        .samples
        .len()
        .saturating_sub(anchor + max_delta as usize + 1)
        / sps
        + 1;
    let n = wanted_vectors().min(available);
    if n < PAYLOAD_SYMBOLS + 2 {
        return None;
    }
    polyphase_decompose(signal, anchor, &config.offsets, n).ok()
}

struct Attempt {
    decoded: Option<DecodedPacket>,
    pll: PllResult,
    symbols: Vec<Complex64>,
}

/// PLL-correct each stream and try to decode them in ascending order of
/// constellation variance; the first id-gate pass wins, with later streams
/// still tracked for diagnostics.
fn rank_and_decode(
    streams: Vec<Vec<Complex64>>,
    codebook: &CodeBook,
    config: &ReceiverConfig,
) -> (Vec<Attempt>, Option<usize>) {
    let ts = config.format.symbol_interval;
    let mut attempts: Vec<Attempt> = streams
        .into_iter()
        .map(|s| {
            let pll = pll_track(&s, ts);
            Attempt {
                decoded: None,
                symbols: pll.corrected.clone(),
                pll,
            }
        })
        .collect();
    let mut order: Vec<usize> = (0..attempts.len()).collect();
    order.sort_by(|&a, &b| {
        attempts[a]
            .pll
            .error_variance
            .partial_cmp(&attempts[b].pll.error_variance)
            .unwrap()
    });
    let mut winner = None;
    for &idx in &order {
        if let Some(dec) = decode_stream(&attempts[idx].symbols, codebook) {
            attempts[idx].decoded = Some(dec);
            winner = Some(idx);
            break;
        }
    }
    (attempts, winner)
}

fn record_attempts(diag: &mut Diagnostics, attempts: &[Attempt], winner: Option<usize>) {
    for (i, att) in attempts.iter().enumerate() {
        diag.freq_hats_hz.push(att.pll.freq_hat_hz);
        diag.raw_streams.push(RawStream {
            symbols: att.symbols.clone(),
            claimed_user: att.decoded.as_ref().map(|d| d.user_id),
            shift: att.decoded.as_ref().map(|d| d.shift),
            accepted: winner == Some(i),
            constellation_variance: att.pll.error_variance,
        });
        if winner == Some(i) {
            diag.chosen_variance = Some(att.pll.error_variance);
        }
    }
}

/// Fractional delay the grid centering aims for: mid-symbol, where the
/// sampling offsets of a user never straddle a pulse peak and the two-tap
/// channel model is exact.
fn centering_target(sps: usize) -> usize {
    sps / 2
}

/// Shift of the sampling grid that moves payload grids at `grids` (delays
/// modulo one symbol) as close to mid-symbol as possible.
fn centering_shift(grids: &[usize], sps: usize) -> i64 {
    let sps_i = sps as i64;
    let center = match grids {
        [g] => *g as i64,
        [a, b] => {
            // circular midpoint of the two grids
            let d = (*b as i64 - *a as i64).rem_euclid(sps_i);
            if d <= sps_i / 2 {
                (*a as i64 + d / 2).rem_euclid(sps_i)
            } else {
                (*b as i64 + (sps_i - d) / 2).rem_euclid(sps_i)
            }
        }
        _ => 0,
    };
    center - centering_target(sps) as i64
}

/// Decode one user from `signal` using only its sync estimates: a
/// single-user model matrix on a mid-symbol-centered grid, anything else in
/// the slot left in as interference.
fn single_user_decode(
    signal: &BasebandSignal,
    codebook: &CodeBook,
    config: &ReceiverConfig,
    entry: &SyncResult,
    diag: &mut Diagnostics,
) -> Option<(DecodedPacket, PllResult, usize)> {
    let sps = config.format.samples_per_symbol();
    let grid = estimate_payload_delay(signal, &config.format, entry.delay_hat);
    let shift = centering_shift(&[grid], sps);
    let anchor = (anchor_for(config, entry.delay_hat) as i64 + shift).max(0) as usize;
    let obs = observe(signal, config, anchor)?;
    let mixing = build_mixing_matrix(
        &config.format.payload_pulse,
        &[centering_target(sps) as f64],
        &[entry.gain_hat],
        &config.offsets,
    );
    let streams = ls_equalize(&mixing, &obs).ok()?;
    let (mut attempts, winner) = rank_and_decode(streams, codebook, config);
    record_attempts(diag, &attempts, winner);
    let idx = winner?;
    let decoded = attempts[idx].decoded.take()?;
    let pll = attempts.swap_remove(idx).pll;
    Some((decoded, pll, entry.delay_hat))
}

/// Reconstruct the decoded user's burst, fit its payload placement and gain,
/// and deflate payload and pilot from the signal.
fn deflate_user(
    signal: &BasebandSignal,
    codebook: &CodeBook,
    config: &ReceiverConfig,
    decoded: &DecodedPacket,
    f_hat_hz: f64,
    base_lag: usize,
) -> BasebandSignal {
    let Ok(packet) = encode_packet(codebook, decoded.user_id, &decoded.payload[32..]) else {
        return signal.clone();
    };
    let mut symbols = Vec::with_capacity(PAYLOAD_SYMBOLS + 1);
    symbols.push(DQPSK_REF);
    symbols.extend_from_slice(&packet.symbols);

    let sps = config.format.samples_per_symbol();
    let base = base_lag + config.format.payload_base();
    let lo = base.saturating_sub(2);
    let hi = base + sps + 2;
    let Some((start, gain)) = fit_payload(signal, &config.format, &symbols, f_hat_hz, lo..=hi)
    else {
        return signal.clone();
    };
    let template = payload_template(&config.format, &symbols, f_hat_hz, start);
    let mut residual = sic_deflate(signal, &template, gain, start);

    // the pilot rides the same channel; deflate it at the sync lag
    let pilot_symbols: Vec<Complex64> = packet
        .pilot_chips
        .iter()
        .map(|&c| Complex64::new(c as f64, 0.0))
        .collect();
    let pilot = shape_symbols(&pilot_symbols, &config.format.pilot_pulse);
    residual = sic_deflate(&residual, &pilot, gain, base_lag);
    residual
}

/// After the first user is out, look for a second one in the residual and
/// decode it the single-user way.
fn second_user_pass(
    residual: &BasebandSignal,
    codebook: &CodeBook,
    config: &ReceiverConfig,
    exclude: u32,
    prior_syncs: &[SyncResult],
    diag: &mut Diagnostics,
) -> Option<DecodedPacket> {
    let resync = synchronize_excluding(
        residual,
        codebook,
        &config.format,
        config.sync_search,
        config.sync_threshold,
        &[exclude],
    );
    let entry = resync
        .first()
        .cloned()
        .or_else(|| prior_syncs.iter().find(|s| s.user_id != exclude).cloned())?;
    let (decoded, _, _) = single_user_decode(residual, codebook, config, &entry, diag)?;
    if decoded.user_id == exclude {
        return None;
    }
    Some(decoded)
}

fn push_recovered(report: &mut ReceiverReport, decoded: DecodedPacket) {
    if report.recovered.len() >= 2
        || report.recovered.iter().any(|r| r.user_id == decoded.user_id)
    {
        return;
    }
    report.recovered.push(RecoveredPacket {
        user_id: decoded.user_id,
        payload: decoded.payload,
        shift: decoded.shift,
        demod_bits: decoded.demod_bits,
    });
}

/// Run the full receive chain on one slot.
pub fn receive_slot(
    signal: &BasebandSignal,
    codebook: &CodeBook,
    mode: ReceiveMode,
    config: &ReceiverConfig,
) -> ReceiverReport {
    let mut report = ReceiverReport::empty(mode);
    // strip out-of-band noise before anything touches the samples
    let signal = &receive_lowpass(signal);
    // probe one pass past the resolvable order: a third detected pilot means
    // a collision the protocol cannot resolve, and the slot is discarded
    let mut syncs = detect_pilots(
        signal,
        codebook,
        &config.format,
        config.sync_search,
        config.sync_threshold,
        &[],
        3,
    );
    if syncs.len() > 2 {
        report.diagnostics.sync = syncs;
        report.diagnostics.collision_declared = true;
        return report;
    }
    syncs.truncate(2);
    report.diagnostics.sync = syncs.clone();
    if syncs.is_empty() {
        return report;
    }

    match mode {
        ReceiveMode::Blind => receive_blind(signal, codebook, config, &syncs, &mut report),
        ReceiveMode::Training => receive_training(signal, codebook, config, &syncs, &mut report),
        ReceiveMode::SicOnly => receive_sic_only(signal, codebook, config, &syncs, &mut report),
    }
    report
}

fn receive_blind(
    signal: &BasebandSignal,
    codebook: &CodeBook,
    config: &ReceiverConfig,
    syncs: &[SyncResult],
    report: &mut ReceiverReport,
) {
    // anchor the grid at the earliest detected burst, then center the
    // detected payload grids mid-symbol so each user's samples stay within
    // one adjacent-symbol pair
    let sps = config.format.samples_per_symbol();
    let anchor_lag = syncs.iter().map(|s| s.delay_hat).min().unwrap();
    let landscape = delay_scatter_landscape(signal, &config.format, anchor_lag);
    let (g1, g2) = two_grid_minima(&landscape, 3);
    let grids: Vec<usize> = match g2 {
        Some(g2) if syncs.len() > 1 => vec![g1, g2],
        _ => vec![g1],
    };
    let shift = centering_shift(&grids, sps);
    let anchor = (anchor_for(config, anchor_lag) as i64 + shift).max(0) as usize;
    let Some(obs) = observe(signal, config, anchor) else {
        return;
    };
    let jade = match jade_separate(&obs, 2 * 2) {
        Ok(j) => j,
        Err(_) => {
            report.diagnostics.jade_converged = false;
            return;
        }
    };
    report.diagnostics.jade_converged = true;
    report.diagnostics.jade_sweeps = jade.sweeps;
    report.diagnostics.mixing_condition = Some(jade.mixing.condition_number);

    let (mut attempts, winner) = rank_and_decode(jade.sources, codebook, config);
    record_attempts(&mut report.diagnostics, &attempts, winner);
    let Some(idx) = winner else {
        return;
    };
    let decoded = attempts[idx].decoded.take().unwrap();
    let f_hat = attempts[idx].pll.freq_hat_hz;
    let first_uid = decoded.user_id;
    let base_lag = syncs
        .iter()
        .find(|s| s.user_id == first_uid)
        .map(|s| s.delay_hat)
        .unwrap_or(anchor_lag);
    let residual = deflate_user(signal, codebook, config, &decoded, f_hat, base_lag);
    push_recovered(report, decoded);
    if let Some(second) = second_user_pass(
        &residual,
        codebook,
        config,
        first_uid,
        syncs,
        &mut report.diagnostics,
    ) {
        push_recovered(report, second);
    }
}

fn receive_training(
    signal: &BasebandSignal,
    codebook: &CodeBook,
    config: &ReceiverConfig,
    syncs: &[SyncResult],
    report: &mut ReceiverReport,
) {
    let sps = config.format.samples_per_symbol();
    let anchor_lag = syncs.iter().map(|s| s.delay_hat).min().unwrap();

    // payload grids from the scatter landscape of the raw signal (mutual
    // interference included: this is where the training method's estimation
    // error comes from), assigned to users by amplitude against the
    // pilot-stage gains, then centered mid-symbol
    let landscape = delay_scatter_landscape(signal, &config.format, anchor_lag);
    let (d_first, d_second) = two_grid_minima(&landscape, 3);
    let mut grids = Vec::with_capacity(syncs.len());
    let mut gains: Vec<Complex64> = syncs.iter().map(|s| s.gain_hat).collect();
    match d_second {
        Some(d_second) if syncs.len() > 1 => {
            let (amp_a, amp_b) = (
                landscape[d_first].mean_amplitude,
                landscape[d_second].mean_amplitude,
            );
            // syncs are strongest-first; hand the higher-amplitude grid to
            // the stronger user
            if (amp_a >= amp_b) == (gains[0].norm() >= gains[1].norm()) {
                grids.push(d_first);
                grids.push(d_second);
            } else {
                grids.push(d_second);
                grids.push(d_first);
            }
        }
        _ => {
            grids.push(d_first);
            gains.truncate(1);
        }
    }
    let shift = centering_shift(&grids, sps);
    let anchor = (anchor_for(config, anchor_lag) as i64 + shift).max(0) as usize;
    let fracs: Vec<f64> = grids
        .iter()
        .map(|&g| (g as i64 - shift).rem_euclid(sps as i64) as f64)
        .collect();

    let first = (|| {
        let obs = observe(signal, config, anchor)?;
        let mixing = build_mixing_matrix(&config.format.payload_pulse, &fracs, &gains, &config.offsets);
        report.diagnostics.mixing_condition = Some(mixing.condition_number);
        let streams = ls_equalize(&mixing, &obs).ok()?;
        let (mut attempts, winner) = rank_and_decode(streams, codebook, config);
        record_attempts(&mut report.diagnostics, &attempts, winner);
        let idx = winner?;
        let decoded = attempts[idx].decoded.take()?;
        let f_hat = attempts[idx].pll.freq_hat_hz;
        Some((decoded, f_hat))
    })();

    // an ill-conditioned model matrix (near-equal delays) falls back to the
    // single-user path against interference
    let (decoded, f_hat) = match first {
        Some(v) => v,
        None => {
            match single_user_decode(signal, codebook, config, &syncs[0], &mut report.diagnostics)
            {
                Some((d, pll, _)) => (d, pll.freq_hat_hz),
                None => return,
            }
        }
    };

    let first_uid = decoded.user_id;
    let base_lag = syncs
        .iter()
        .find(|s| s.user_id == first_uid)
        .map(|s| s.delay_hat)
        .unwrap_or(anchor_lag);
    let residual = deflate_user(signal, codebook, config, &decoded, f_hat, base_lag);
    push_recovered(report, decoded);
    if let Some(second) = second_user_pass(
        &residual,
        codebook,
        config,
        first_uid,
        syncs,
        &mut report.diagnostics,
    ) {
        push_recovered(report, second);
    }
}

fn receive_sic_only(
    signal: &BasebandSignal,
    codebook: &CodeBook,
    config: &ReceiverConfig,
    syncs: &[SyncResult],
    report: &mut ReceiverReport,
) {
    // decode the strongest user directly, the other treated as interference
    let mut first = None;
    for entry in syncs {
        if let Some(hit) = single_user_decode(signal, codebook, config, entry, &mut report.diagnostics)
        {
            first = Some(hit);
            break;
        }
    }
    let Some((decoded, pll, base_lag)) = first else {
        return;
    };
    let first_uid = decoded.user_id;
    let residual = deflate_user(signal, codebook, config, &decoded, pll.freq_hat_hz, base_lag);
    push_recovered(report, decoded);
    if let Some(second) = second_user_pass(
        &residual,
        codebook,
        config,
        first_uid,
        syncs,
        &mut report.diagnostics,
    ) {
        push_recovered(report, second);
    }
}
