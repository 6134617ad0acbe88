//! Burst assembly.
//!
//! A burst is an RRC-shaped BPSK pilot preamble followed by the IOTA-shaped
//! payload (one reference symbol plus 414 DQPSK symbols). The intentional
//! delay prepends zero samples to the payload only; the pilot position is
//! fixed so synchronization sees every user's preamble at its natural delay.

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::channel::BasebandSignal;
use crate::codebook::PILOT_CHIPS;
use crate::modulation::DQPSK_REF;
use crate::packet::{Packet, PAYLOAD_SYMBOLS};
use crate::pulse::{design_pulse, PulseKind, PulseShape};

#[derive(Debug, Error)]
pub enum WaveformError {
    #[error("pilot and payload pulses disagree on samples per symbol ({0} vs {1})")]
    SampleRateMismatch(usize, usize),
    #[error("intentional delay {delay} exceeds one symbol ({sps} samples)")]
    DelayTooLarge { delay: usize, sps: usize },
}

/// Pulse pair and symbol timing shared by transmitters and the receiver.
#[derive(Debug, Clone)]
pub struct BurstFormat {
    pub pilot_pulse: PulseShape,
    pub payload_pulse: PulseShape,
    /// Symbol interval in seconds.
    pub symbol_interval: f64,
}

impl BurstFormat {
    /// The default format: RRC(rolloff 0.25) pilots and IOTA payload, both at
    /// 32 samples/symbol over an 8-symbol span, 1.25 Msymbol/s.
    pub fn standard() -> BurstFormat {
        let pilot_pulse = design_pulse(PulseKind::Rrc, 32, 8, Some(0.25)).expect("valid RRC");
        let payload_pulse = design_pulse(PulseKind::Iota, 32, 8, None).expect("valid IOTA");
        BurstFormat {
            pilot_pulse,
            payload_pulse,
            symbol_interval: 32.0 / 40.0e6,
        }
    }

    pub fn samples_per_symbol(&self) -> usize {
        self.pilot_pulse.samples_per_symbol
    }

    /// Length of the shaped pilot segment in samples.
    pub fn pilot_len(&self) -> usize {
        (PILOT_CHIPS - 1) * self.samples_per_symbol() + self.pilot_pulse.taps.len()
    }

    /// Sample index where the payload segment starts at zero intentional delay.
    pub fn payload_base(&self) -> usize {
        self.pilot_len()
    }

    /// Number of payload symbols including the differential reference.
    pub fn payload_symbol_count(&self) -> usize {
        PAYLOAD_SYMBOLS + 1
    }

    /// Length of the shaped payload segment in samples.
    pub fn payload_len(&self) -> usize {
        (self.payload_symbol_count() - 1) * self.samples_per_symbol() + self.payload_pulse.taps.len()
    }

    /// Burst length covering the maximum intentional delay.
    pub fn burst_len(&self) -> usize {
        self.payload_base() + self.samples_per_symbol() + self.payload_len()
    }

    /// Slot length: burst plus a two-symbol guard for natural delays.
    pub fn slot_len(&self) -> usize {
        self.burst_len() + 2 * self.samples_per_symbol()
    }

    /// Peak sample of pilot chip `c` within the burst.
    pub fn pilot_chip_peak(&self, chip: usize) -> usize {
        chip * self.samples_per_symbol() + self.pilot_pulse.peak_index()
    }

    /// Peak sample of payload symbol `sym` (0 = reference) for a given
    /// intentional delay.
    pub fn payload_symbol_peak(&self, delay_samples: usize, sym: usize) -> usize {
        self.payload_base()
            + delay_samples
            + sym * self.samples_per_symbol()
            + self.payload_pulse.peak_index()
    }

    /// Per-sample noise power that realizes `snr_db` against the nominal
    /// payload power of a unit-gain user.
    pub fn noise_power_for_snr_db(&self, snr_db: f64) -> f64 {
        self.payload_pulse.nominal_symbol_power() / 10f64.powf(snr_db / 10.0)
    }
}

/// Upsample-and-filter a symbol stream with the given pulse. Output length is
/// `(n - 1) * sps + taps`.
pub fn shape_symbols(symbols: &[Complex64], pulse: &PulseShape) -> Vec<Complex64> {
    let sps = pulse.samples_per_symbol;
    let mut out = vec![Complex64::new(0.0, 0.0); (symbols.len() - 1) * sps + pulse.taps.len()];
    for (j, s) in symbols.iter().enumerate() {
        if s.re == 0.0 && s.im == 0.0 {
            continue;
        }
        let base = j * sps;
        for (k, &tap) in pulse.taps.iter().enumerate() {
            out[base + k] += s * tap;
        }
    }
    out
}

/// Assemble the baseband burst for one packet.
pub fn synthesize_waveform(
    packet: &Packet,
    format: &BurstFormat,
    delay_samples: usize,
) -> Result<BasebandSignal, WaveformError> {
    let sps = format.samples_per_symbol();
    if format.payload_pulse.samples_per_symbol != sps {
        return Err(WaveformError::SampleRateMismatch(
            sps,
            format.payload_pulse.samples_per_symbol,
        ));
    }
    if delay_samples > sps {
        return Err(WaveformError::DelayTooLarge {
            delay: delay_samples,
            sps,
        });
    }

    let mut samples = vec![Complex64::new(0.0, 0.0); format.burst_len()];

    let pilot_symbols: Vec<Complex64> = packet
        .pilot_chips
        .iter()
        .map(|&c| Complex64::new(c as f64, 0.0))
        .collect();
    let pilot = shape_symbols(&pilot_symbols, &format.pilot_pulse);
    for (i, v) in pilot.into_iter().enumerate() {
        samples[i] += v;
    }

    let mut payload_symbols = Vec::with_capacity(format.payload_symbol_count());
    payload_symbols.push(DQPSK_REF);
    payload_symbols.extend_from_slice(&packet.symbols);
    let payload = shape_symbols(&payload_symbols, &format.payload_pulse);
    let base = format.payload_base() + delay_samples;
    for (i, v) in payload.into_iter().enumerate() {
        samples[base + i] += v;
    }

    Ok(BasebandSignal {
        samples,
        samples_per_symbol: sps,
        symbol_interval: format.symbol_interval,
    })
}

/// Intentional delay in samples, uniform over {0, ..., sps} inclusive.
pub fn draw_intentional_delay<R: Rng>(rng: &mut R, samples_per_symbol: usize) -> usize {
    rng.random_range(0..=samples_per_symbol)
}
