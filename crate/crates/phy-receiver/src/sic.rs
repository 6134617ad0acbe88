//! Successive interference cancellation: waveform reconstruction, gain
//! refinement and deflation.

use num_complex::Complex64;

use alohacr_phy_core::waveform::shape_symbols;
use alohacr_phy_core::{BasebandSignal, BurstFormat};

/// Shaped payload waveform (reference symbol first) with the CFO ramp applied
/// for placement at absolute sample `start`.
pub fn payload_template(
    format: &BurstFormat,
    symbols_with_ref: &[Complex64],
    f_hat_hz: f64,
    start: usize,
) -> Vec<Complex64> {
    let base = shape_symbols(symbols_with_ref, &format.payload_pulse);
    if f_hat_hz == 0.0 {
        return base;
    }
    let dt = format.symbol_interval / format.samples_per_symbol() as f64;
    base.into_iter()
        .enumerate()
        .map(|(i, v)| {
            let ang = 2.0 * std::f64::consts::PI * f_hat_hz * ((start + i) as f64 * dt);
            v * Complex64::new(0.0, ang).exp()
        })
        .collect()
}

/// Least-squares gain of `template` placed at `start` inside `signal`.
pub fn refine_gain(signal: &BasebandSignal, template: &[Complex64], start: usize) -> Complex64 {
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0f64;
    for (i, t) in template.iter().enumerate() {
        let idx = start + i;
        if idx >= signal.samples.len() {
            break;
        }
        num += t.conj() * signal.samples[idx];
        den += t.norm_sqr();
    }
    if den > 0.0 {
        num / den
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// Best placement of a reconstructed payload: maximizes the correlation
/// magnitude over candidate start positions. Returns `(start, gain)`.
pub fn fit_payload(
    signal: &BasebandSignal,
    format: &BurstFormat,
    symbols_with_ref: &[Complex64],
    f_hat_hz: f64,
    candidates: impl Iterator<Item = usize>,
) -> Option<(usize, Complex64)> {
    let mut best: Option<(usize, Complex64, f64)> = None;
    for start in candidates {
        let template = payload_template(format, symbols_with_ref, f_hat_hz, start);
        if start + template.len() > signal.samples.len() {
            continue;
        }
        let gain = refine_gain(signal, &template, start);
        let metric = gain.norm();
        if best.as_ref().is_none_or(|(_, _, m)| metric > *m) {
            best = Some((start, gain, metric));
        }
    }
    best.map(|(s, g, _)| (s, g))
}

/// Subtract `gain * template` at `start`; the residual keeps the remaining
/// users plus noise.
pub fn sic_deflate(
    signal: &BasebandSignal,
    template: &[Complex64],
    gain: Complex64,
    start: usize,
) -> BasebandSignal {
    let mut samples = signal.samples.clone();
    for (i, t) in template.iter().enumerate() {
        let idx = start + i;
        if idx >= samples.len() {
            break;
        }
        samples[idx] -= gain * t;
    }
    BasebandSignal {
        samples,
        samples_per_symbol: signal.samples_per_symbol,
        symbol_interval: signal.symbol_interval,
    }
}

/// Alignment quality of one candidate payload grid.
#[derive(Debug, Clone, Copy)]
pub struct GridScore {
    /// Normalized scatter of sample magnitudes (small when aligned: the
    /// unit-modulus symbols land at near-constant amplitude).
    pub scatter: f64,
    /// Mean sample magnitude, proportional to the channel gain when aligned.
    pub mean_amplitude: f64,
}

/// Score every candidate payload delay `d` in `0..sps` for a user
/// synchronized at `base_lag`. A full-symbol offset is the same grid, so the
/// scan folds modulo one symbol; the decoder's shift hypotheses absorb the
/// integer part.
pub fn delay_scatter_landscape(
    signal: &BasebandSignal,
    format: &BurstFormat,
    base_lag: usize,
) -> Vec<GridScore> {
    let sps = format.samples_per_symbol();
    let pulse = &format.payload_pulse;
    // probe a mid-burst stretch; skip the reference-symbol edge
    let probe_symbols = 80usize;
    let first_symbol = 4usize;
    let deltas: [i64; 4] = [-8, -3, 2, 7];
    let weights: Vec<f64> = deltas.iter().map(|&d| pulse.sample_at(d)).collect();
    let weight_norm: f64 = weights.iter().map(|w| w * w).sum();

    (0..sps)
        .map(|d| {
            let anchor = base_lag + format.payload_base() + d + pulse.peak_index();
            let mut mags = Vec::with_capacity(probe_symbols);
            for i in first_symbol..first_symbol + probe_symbols {
                let base = anchor as i64 + (i * sps) as i64;
                let mut acc = Complex64::new(0.0, 0.0);
                for (w, &dd) in weights.iter().zip(deltas.iter()) {
                    let idx = base + dd;
                    if idx < 0 || idx as usize >= signal.samples.len() {
                        acc = Complex64::new(0.0, 0.0);
                        break;
                    }
                    acc += w * signal.samples[idx as usize];
                }
                mags.push(acc.norm() / weight_norm);
            }
            let mean = mags.iter().sum::<f64>() / mags.len() as f64;
            if mean <= 0.0 {
                return GridScore {
                    scatter: f64::INFINITY,
                    mean_amplitude: 0.0,
                };
            }
            let var =
                mags.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / mags.len() as f64;
            GridScore {
                scatter: var / (mean * mean),
                mean_amplitude: mean,
            }
        })
        .collect()
}

/// Best-aligned payload delay (in `0..sps`) for a user synchronized at
/// `base_lag`.
pub fn estimate_payload_delay(
    signal: &BasebandSignal,
    format: &BurstFormat,
    base_lag: usize,
) -> usize {
    delay_scatter_landscape(signal, format, base_lag)
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.scatter.partial_cmp(&b.1.scatter).unwrap())
        .map(|(d, _)| d)
        .unwrap_or(0)
}

/// The two best-separated scatter minima of the landscape (modular distance
/// of at least `min_separation` samples); the second is `None` when nothing
/// distinct stands out.
pub fn two_grid_minima(landscape: &[GridScore], min_separation: usize) -> (usize, Option<usize>) {
    let n = landscape.len();
    let first = landscape
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.scatter.partial_cmp(&b.1.scatter).unwrap())
        .map(|(d, _)| d)
        .unwrap_or(0);
    let second = landscape
        .iter()
        .enumerate()
        .filter(|(d, _)| {
            let dist = (*d as i64 - first as i64).rem_euclid(n as i64) as usize;
            dist.min(n - dist) >= min_separation
        })
        .min_by(|a, b| a.1.scatter.partial_cmp(&b.1.scatter).unwrap())
        .map(|(d, _)| d);
    (first, second)
}
