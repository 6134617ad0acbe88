//! Receive front-end filter.
//!
//! The capture grid runs at 32 samples/symbol while the burst occupies less
//! than a tenth of that bandwidth, so the station low-passes the slot before
//! any processing. The passband comfortably covers both pulse spectra
//! (RRC rolloff 0.25 tops out at 0.625/Ts), leaving the sampled pulse values
//! - and with them the mixing-matrix model - intact while stripping
//! out-of-band noise.

use num_complex::Complex64;

use alohacr_phy_core::BasebandSignal;

/// Passband edge in cycles per symbol.
const CUTOFF_PER_SYMBOL: f64 = 1.5;

/// Zero-phase windowed-sinc lowpass over one slot.
pub fn receive_lowpass(signal: &BasebandSignal) -> BasebandSignal {
    let sps = signal.samples_per_symbol;
    let taps = design_lowpass(sps);
    let half = (taps.len() - 1) as i64 / 2;
    let n = signal.samples.len() as i64;
    let mut out = vec![Complex64::new(0.0, 0.0); signal.samples.len()];
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &h) in taps.iter().enumerate() {
            let idx = i as i64 + k as i64 - half;
            if idx >= 0 && idx < n {
                acc += h * signal.samples[idx as usize];
            }
        }
        *o = acc;
    }
    BasebandSignal {
        samples: out,
        samples_per_symbol: sps,
        symbol_interval: signal.symbol_interval,
    }
}

fn design_lowpass(sps: usize) -> Vec<f64> {
    let len = 6 * sps + 1;
    let half = (len - 1) as f64 / 2.0;
    let fc = CUTOFF_PER_SYMBOL / sps as f64; // cycles per sample
    let mut taps: Vec<f64> = (0..len)
        .map(|i| {
            let t = i as f64 - half;
            let sinc = if t.abs() < 1e-12 {
                2.0 * fc
            } else {
                (2.0 * std::f64::consts::PI * fc * t).sin() / (std::f64::consts::PI * t)
            };
            // Hamming window
            let w = 0.54
                - 0.46 * (2.0 * std::f64::consts::PI * i as f64 / (len - 1) as f64).cos();
            sinc * w
        })
        .collect();
    let dc: f64 = taps.iter().sum();
    for t in taps.iter_mut() {
        *t /= dc;
    }
    taps
}
