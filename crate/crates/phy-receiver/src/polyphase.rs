//! Polyphase decomposition and the model-based mixing matrix.
//!
//! The receiver samples each symbol interval at P offsets. The offsets are
//! tap indices (1-based) into the central four-symbol window of a received
//! pulse, whose peak sits at tap `2 * sps + 1`; the defaults [57, 62, 67, 72]
//! at 32 samples/symbol are offsets {-8, -3, +2, +7} around the peak.
//! Stacking the P samples of symbol i gives the observation vector y(i),
//! an instantaneous mixture of each user's current and previous symbol.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use alohacr_phy_core::{BasebandSignal, PulseShape};

/// Default sampling offsets for 32 samples/symbol.
pub const DEFAULT_OFFSETS: [usize; 4] = [57, 62, 67, 72];

#[derive(Debug, Error)]
pub enum PolyphaseError {
    #[error("sampling index out of bounds (anchor {anchor}, vector {vector})")]
    OutOfBounds { anchor: usize, vector: usize },
    #[error("need at least one offset")]
    NoOffsets,
}

/// Stacked P-vector observations y(i), i = 0..n.
#[derive(Debug, Clone)]
pub struct PolyphaseObservation {
    /// `vectors[i][m]`: offset m of symbol interval i.
    pub vectors: Vec<Vec<Complex64>>,
    pub offsets: Vec<usize>,
    /// Sample index of the symbol-0 pulse peak in the underlying signal.
    pub anchor: usize,
    pub samples_per_symbol: usize,
    pub symbol_interval: f64,
}

impl PolyphaseObservation {
    pub fn n_vectors(&self) -> usize {
        self.vectors.len()
    }

    pub fn n_phases(&self) -> usize {
        self.offsets.len()
    }

    /// Observations as a P x T matrix.
    pub fn as_matrix(&self) -> DMatrix<Complex64> {
        let p = self.n_phases();
        let t = self.n_vectors();
        DMatrix::from_fn(p, t, |m, i| self.vectors[i][m])
    }
}

/// Signed sample offsets relative to the pulse peak.
pub fn offset_deltas(offsets: &[usize], samples_per_symbol: usize) -> Vec<i64> {
    let center = 2 * samples_per_symbol as i64 + 1;
    offsets.iter().map(|&o| o as i64 - center).collect()
}

/// Sample the signal at `anchor + i * sps + delta_m` for each symbol `i` and
/// offset `m`.
pub fn polyphase_decompose(
    signal: &BasebandSignal,
    anchor: usize,
    offsets: &[usize],
    n_vectors: usize,
) -> Result<PolyphaseObservation, PolyphaseError> {
    if offsets.is_empty() {
        return Err(PolyphaseError::NoOffsets);
    }
    let sps = signal.samples_per_symbol;
    let deltas = offset_deltas(offsets, sps);
    let mut vectors = Vec::with_capacity(n_vectors);
    for i in 0..n_vectors {
        let base = anchor as i64 + (i * sps) as i64;
        let mut v = Vec::with_capacity(offsets.len());
        for &d in &deltas {
            let idx = base + d;
            if idx < 0 || idx as usize >= signal.samples.len() {
                return Err(PolyphaseError::OutOfBounds { anchor, vector: i });
            }
            v.push(signal.samples[idx as usize]);
        }
        vectors.push(v);
    }
    Ok(PolyphaseObservation {
        vectors,
        offsets: offsets.to_vec(),
        anchor,
        samples_per_symbol: sps,
        symbol_interval: signal.symbol_interval,
    })
}

/// A P x 2K mixing matrix together with its conditioning.
#[derive(Debug, Clone)]
pub struct MixingEstimate {
    pub matrix: DMatrix<Complex64>,
    pub condition_number: f64,
}

impl MixingEstimate {
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> MixingEstimate {
        let svd = matrix.clone().svd(false, false);
        let max = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
        let min = svd.singular_values.iter().cloned().fold(f64::MAX, f64::min);
        let condition_number = if min > 0.0 { max / min } else { f64::INFINITY };
        MixingEstimate {
            matrix,
            condition_number,
        }
    }
}

/// Build the model mixing matrix for users at fractional delays
/// `frac_delays[k]` (samples, in [0, sps)) with gains `gains[k]`.
///
/// Column 2k holds the current-symbol taps `p(delta_m - tau)`, column 2k+1
/// the previous-symbol taps `p(delta_m - tau + Ts)`; the pair multiplies
/// `[s_k(i), s_k(i-1)]`.
pub fn build_mixing_matrix(
    pulse: &PulseShape,
    frac_delays: &[f64],
    gains: &[Complex64],
    offsets: &[usize],
) -> MixingEstimate {
    assert_eq!(frac_delays.len(), gains.len());
    assert!(matches!(frac_delays.len(), 1 | 2), "one or two users");
    let sps = pulse.samples_per_symbol as f64;
    let deltas = offset_deltas(offsets, pulse.samples_per_symbol);
    let p = offsets.len();
    let k = frac_delays.len();
    let mut m = DMatrix::from_element(p, 2 * k, Complex64::new(0.0, 0.0));
    for (user, (&tau, &gain)) in frac_delays.iter().zip(gains.iter()).enumerate() {
        for (row, &d) in deltas.iter().enumerate() {
            let t_current = (d as f64 - tau) / sps;
            let t_previous = t_current + 1.0;
            m[(row, 2 * user)] = gain * pulse.value_at(t_current);
            m[(row, 2 * user + 1)] = gain * pulse.value_at(t_previous);
        }
    }
    MixingEstimate::from_matrix(m)
}
