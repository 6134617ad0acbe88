//! Pulse shaping waveforms.
//!
//! Two families are supported:
//!
//! * `Rrc` — a square-root Nyquist pulse for the pilot preamble. The taps
//!   start from the closed-form root-raised-cosine and are then adjusted by a
//!   Gauss-Newton pass that zero-forces the self-convolution at all nonzero
//!   multiples of the symbol interval, so the matched-filter cascade is
//!   Nyquist on the discrete grid to machine precision despite the finite
//!   span.
//! * `Iota` — a low-sidelobe pulse for the payload, built by iterative
//!   time/frequency orthogonalization of a Gaussian on a circular grid. Its
//!   mainlobe occupies [-Ts, Ts] (neighboring pulses overlap by 50%) and the
//!   taps outside +/-2 Ts are below 1% of the peak, which is what makes the
//!   two-tap discrete channel model of the receiver hold.

use thiserror::Error;

use crate::fft::fft_in_place;
use num_complex::Complex64;

const PI: f64 = std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseKind {
    Rrc,
    Iota,
}

#[derive(Debug, Error)]
pub enum PulseError {
    #[error("rolloff {0} outside [0, 1]")]
    InvalidRolloff(f64),
    #[error("RRC requires a rolloff factor")]
    MissingRolloff,
    #[error("IOTA takes no rolloff factor")]
    UnexpectedRolloff,
    #[error("samples_per_symbol must be >= 4, got {0}")]
    SamplesPerSymbolTooSmall(usize),
    #[error("span_symbols must be >= 4, got {0}")]
    SpanTooSmall(usize),
}

/// A peak-normalized pulse sampled at `samples_per_symbol` points per symbol
/// over a total span of `span_symbols` symbols (`span * sps + 1` taps, peak
/// at the center tap).
#[derive(Debug, Clone)]
pub struct PulseShape {
    pub kind: PulseKind,
    pub samples_per_symbol: usize,
    pub span_symbols: usize,
    pub rolloff: Option<f64>,
    pub taps: Vec<f64>,
}

impl PulseShape {
    /// Index of the peak tap.
    pub fn peak_index(&self) -> usize {
        self.span_symbols * self.samples_per_symbol / 2
    }

    /// Tap value at a signed sample offset from the peak (zero outside the span).
    pub fn sample_at(&self, offset_samples: i64) -> f64 {
        let idx = self.peak_index() as i64 + offset_samples;
        if idx < 0 || idx as usize >= self.taps.len() {
            0.0
        } else {
            self.taps[idx as usize]
        }
    }

    /// Pulse value at a time offset in symbol intervals, linearly
    /// interpolated between taps.
    pub fn value_at(&self, t_symbols: f64) -> f64 {
        let pos = t_symbols * self.samples_per_symbol as f64;
        let base = pos.floor();
        let frac = pos - base;
        let a = self.sample_at(base as i64);
        let b = self.sample_at(base as i64 + 1);
        a + frac * (b - a)
    }

    /// Sum of squared taps.
    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|v| v * v).sum()
    }

    /// Mean per-sample power of a shaped stream of unit-modulus symbols.
    pub fn nominal_symbol_power(&self) -> f64 {
        self.energy() / self.samples_per_symbol as f64
    }
}

/// Design a pulse. `rolloff` is required for `Rrc` and must be absent for `Iota`.
pub fn design_pulse(
    kind: PulseKind,
    samples_per_symbol: usize,
    span_symbols: usize,
    rolloff: Option<f64>,
) -> Result<PulseShape, PulseError> {
    if samples_per_symbol < 4 {
        return Err(PulseError::SamplesPerSymbolTooSmall(samples_per_symbol));
    }
    if span_symbols < 4 {
        return Err(PulseError::SpanTooSmall(span_symbols));
    }
    let taps = match kind {
        PulseKind::Rrc => {
            let beta = rolloff.ok_or(PulseError::MissingRolloff)?;
            if !(0.0..=1.0).contains(&beta) || !beta.is_finite() {
                return Err(PulseError::InvalidRolloff(beta));
            }
            design_rrc(samples_per_symbol, span_symbols, beta)
        }
        PulseKind::Iota => {
            if rolloff.is_some() {
                return Err(PulseError::UnexpectedRolloff);
            }
            design_iota(samples_per_symbol, span_symbols)
        }
    };
    Ok(PulseShape {
        kind,
        samples_per_symbol,
        span_symbols,
        rolloff: if kind == PulseKind::Rrc { rolloff } else { None },
        taps,
    })
}

/// Closed-form root-raised-cosine, time in symbol intervals.
fn rrc_ideal(t: f64, beta: f64) -> f64 {
    if t.abs() < 1e-12 {
        return 1.0 - beta + 4.0 * beta / PI;
    }
    if beta > 0.0 && (t.abs() - 1.0 / (4.0 * beta)).abs() < 1e-9 {
        return (beta / 2f64.sqrt())
            * ((1.0 + 2.0 / PI) * (PI / (4.0 * beta)).sin()
                + (1.0 - 2.0 / PI) * (PI / (4.0 * beta)).cos());
    }
    ((PI * t * (1.0 - beta)).sin() + 4.0 * beta * t * (PI * t * (1.0 + beta)).cos())
        / (PI * t * (1.0 - (4.0 * beta * t).powi(2)))
}

fn self_corr(taps: &[f64], lag: usize) -> f64 {
    taps.iter()
        .zip(taps[lag..].iter())
        .map(|(a, b)| a * b)
        .sum()
}

/// Truncated ideal RRC followed by Gauss-Newton zero-forcing of the
/// matched-filter ISI at lags Ts, 2 Ts, ..., span Ts.
fn design_rrc(sps: usize, span: usize, beta: f64) -> Vec<f64> {
    let len = span * sps + 1;
    let half = (len - 1) / 2;
    let mut taps: Vec<f64> = (0..len)
        .map(|i| rrc_ideal((i as f64 - half as f64) / sps as f64, beta))
        .collect();

    let n_constraints = span;
    for _ in 0..40 {
        let residual: Vec<f64> = (1..=n_constraints).map(|k| self_corr(&taps, k * sps)).collect();
        let worst = residual.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if worst < 1e-15 {
            break;
        }
        // J[k][i] = d corr(k*sps) / d taps[i] = taps[i + k*sps] + taps[i - k*sps]
        let jac: Vec<Vec<f64>> = (1..=n_constraints)
            .map(|k| {
                (0..len)
                    .map(|i| {
                        let mut v = 0.0;
                        if i + k * sps < len {
                            v += taps[i + k * sps];
                        }
                        if i >= k * sps {
                            v += taps[i - k * sps];
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        // minimum-norm update: taps -= J^T (J J^T)^{-1} residual
        let mut normal = vec![vec![0.0; n_constraints + 1]; n_constraints];
        for a in 0..n_constraints {
            for b in 0..n_constraints {
                normal[a][b] = jac[a].iter().zip(jac[b].iter()).map(|(x, y)| x * y).sum();
            }
            normal[a][n_constraints] = residual[a];
        }
        let solution = solve_dense(&mut normal);
        for (k, x) in solution.iter().enumerate() {
            for i in 0..len {
                taps[i] -= jac[k][i] * x;
            }
        }
    }

    let peak = taps[half];
    for v in taps.iter_mut() {
        *v /= peak;
    }
    taps
}

/// Gaussian elimination with partial pivoting on an augmented system.
fn solve_dense(aug: &mut [Vec<f64>]) -> Vec<f64> {
    let n = aug.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| aug[a][col].abs().partial_cmp(&aug[b][col].abs()).unwrap())
            .unwrap();
        aug.swap(col, pivot);
        let d = aug[col][col];
        for j in col..=n {
            aug[col][j] /= d;
        }
        for r in 0..n {
            if r != col {
                let f = aug[r][col];
                for j in col..=n {
                    aug[r][j] -= f * aug[col][j];
                }
            }
        }
    }
    (0..n).map(|r| aug[r][n]).collect()
}

/// IOTA by alternating time- and frequency-domain orthogonalization of a
/// Gaussian on a circular grid, then truncation to the requested span.
///
/// The time step normalizes the folded power at symbol spacing Ts; the
/// frequency step does the same at spacing 1/(2 Ts), the lattice on which the
/// orthogonalized Gaussian is defined.
fn design_iota(sps: usize, span: usize) -> Vec<f64> {
    let grid_symbols = (4 * span).max(64).next_power_of_two();
    let n = grid_symbols * sps;
    let n = n.next_power_of_two();

    let mut p: Vec<f64> = (0..n)
        .map(|i| {
            let centered = if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
            let t = centered / sps as f64;
            (-PI * t * t).exp()
        })
        .collect();

    let bins_per_nu0 = n / (2 * sps);
    for _ in 0..30 {
        // time orthogonalization, period one symbol
        let mut folded = vec![0.0; sps];
        for (i, v) in p.iter().enumerate() {
            folded[i % sps] += v * v;
        }
        for (i, v) in p.iter_mut().enumerate() {
            *v /= folded[i % sps].sqrt();
        }
        // frequency orthogonalization, period 1/(2 Ts)
        let mut spec: Vec<Complex64> = p.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft_in_place(&mut spec, false);
        let mut folded = vec![0.0; bins_per_nu0];
        for (k, v) in spec.iter().enumerate() {
            folded[k % bins_per_nu0] += v.norm_sqr();
        }
        for (k, v) in spec.iter_mut().enumerate() {
            *v /= folded[k % bins_per_nu0].sqrt();
        }
        fft_in_place(&mut spec, true);
        for (v, s) in p.iter_mut().zip(spec.iter()) {
            *v = s.re;
        }
    }

    let len = span * sps + 1;
    let half = (len - 1) / 2;
    let mut taps: Vec<f64> = (0..len)
        .map(|i| {
            let idx = (i as i64 - half as i64).rem_euclid(n as i64) as usize;
            p[idx]
        })
        .collect();
    let peak = taps[half];
    for v in taps.iter_mut() {
        *v /= peak;
    }
    taps
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rrc_peak_is_one_and_symmetric() {
        let p = design_pulse(PulseKind::Rrc, 32, 8, Some(0.25)).unwrap();
        assert_eq!(p.taps.len(), 8 * 32 + 1);
        assert!((p.taps[p.peak_index()] - 1.0).abs() < 1e-15);
        let l = p.taps.len();
        for i in 0..l / 2 {
            assert!((p.taps[i] - p.taps[l - 1 - i]).abs() < 1e-12);
        }
    }

    #[test]
    fn rrc_self_convolution_is_nyquist() {
        let p = design_pulse(PulseKind::Rrc, 32, 8, Some(0.25)).unwrap();
        let peak = self_corr(&p.taps, 0);
        for k in 1..=8 {
            let leak = self_corr(&p.taps, k * 32).abs() / peak;
            assert!(leak < 1e-9, "lag {k} Ts leak {leak:.3e}");
        }
    }

    #[test]
    fn rrc_stays_close_to_ideal() {
        let p = design_pulse(PulseKind::Rrc, 32, 8, Some(0.25)).unwrap();
        let half = p.peak_index();
        let scale = rrc_ideal(0.0, 0.25);
        for (i, &v) in p.taps.iter().enumerate() {
            let t = (i as f64 - half as f64) / 32.0;
            let ideal = rrc_ideal(t, 0.25) / scale;
            assert!((v - ideal).abs() < 0.06, "tap {i}: {v} vs {ideal}");
        }
    }

    #[test]
    fn rrc_zero_rolloff_accepted() {
        let p = design_pulse(PulseKind::Rrc, 16, 8, Some(0.0)).unwrap();
        let peak = self_corr(&p.taps, 0);
        for k in 1..=4 {
            assert!(self_corr(&p.taps, k * 16).abs() / peak < 1e-9);
        }
    }

    #[test]
    fn iota_mainlobe_and_sidelobes() {
        let p = design_pulse(PulseKind::Iota, 32, 8, None).unwrap();
        let half = p.peak_index();
        assert!((p.taps[half] - 1.0).abs() < 1e-15);
        // mainlobe support [-Ts, Ts]: monotone-ish decay to near zero at +/-Ts
        assert!(p.sample_at(32).abs() < 0.05);
        assert!(p.sample_at(16) > 0.5);
        // low sidelobe outside +/- 2 Ts
        for (i, &v) in p.taps.iter().enumerate() {
            let off = i as i64 - half as i64;
            if off.unsigned_abs() > 64 {
                assert!(v.abs() < 1e-2, "tap at {off}: {v}");
            }
        }
    }

    #[test]
    fn iota_supports_length_two_channel_at_receiver_offsets() {
        let p = design_pulse(PulseKind::Iota, 32, 8, None).unwrap();
        // receiver sampling offsets relative to the pulse peak, in samples
        let deltas = [-8i64, -3, 2, 7];
        let next: f64 = deltas
            .iter()
            .map(|d| p.sample_at(d - 32).abs())
            .fold(0.0, f64::max);
        let after_next: f64 = deltas
            .iter()
            .map(|d| p.sample_at(d - 64).abs())
            .fold(0.0, f64::max);
        assert!(next > 0.05, "adjacent symbol must interfere, got {next}");
        assert!(after_next < 1e-2, "two-away symbol leak {after_next}");
    }

    #[test]
    fn parameter_validation() {
        assert!(matches!(
            design_pulse(PulseKind::Rrc, 32, 8, Some(1.5)),
            Err(PulseError::InvalidRolloff(_))
        ));
        assert!(matches!(
            design_pulse(PulseKind::Rrc, 32, 8, None),
            Err(PulseError::MissingRolloff)
        ));
        assert!(matches!(
            design_pulse(PulseKind::Iota, 32, 8, Some(0.2)),
            Err(PulseError::UnexpectedRolloff)
        ));
        assert!(matches!(
            design_pulse(PulseKind::Rrc, 2, 8, Some(0.2)),
            Err(PulseError::SamplesPerSymbolTooSmall(2))
        ));
        assert!(matches!(
            design_pulse(PulseKind::Iota, 32, 2, None),
            Err(PulseError::SpanTooSmall(2))
        ));
    }

    #[test]
    fn deterministic_for_fixed_inputs() {
        let a = design_pulse(PulseKind::Iota, 32, 8, None).unwrap();
        let b = design_pulse(PulseKind::Iota, 32, 8, None).unwrap();
        assert_eq!(a.taps, b.taps);
        let c = design_pulse(PulseKind::Rrc, 32, 8, Some(0.25)).unwrap();
        let d = design_pulse(PulseKind::Rrc, 32, 8, Some(0.25)).unwrap();
        assert_eq!(c.taps, d.taps);
    }
}
