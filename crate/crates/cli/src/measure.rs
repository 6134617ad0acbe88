//! Two-user slot synthesis and raw bit-error accounting.
//!
//! Raw BER is measured the way a bench measurement would: for each
//! transmitted packet, the demodulated coded bits of the best-matching
//! separated stream (over every symbol alignment) are compared against the
//! packet's true coded bits, whether or not the decoder ultimately accepted
//! the stream. A slot that produced no streams at all counts half its bits
//! in error.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use alohacr_phy_core::packet::{CODED_BITS, PAYLOAD_SYMBOLS};
use alohacr_phy_core::{
    dqpsk_demodulate, mix_channel, random_packet, synthesize_waveform, CodeBook, Packet,
    UserProfile,
};
use alohacr_phy_receiver::{receive_slot, ReceiveMode, ReceiverConfig, ReceiverReport};

/// Channel parameters of one experiment point.
#[derive(Debug, Clone)]
pub struct SlotScenario {
    pub snr_db: f64,
    /// CFO bound as a fraction of the symbol rate.
    pub cfo_max_frac: f64,
    /// Folded-Gaussian natural delay sigma, in samples.
    pub natural_delay_sigma: f64,
    /// Intentional delays drawn uniformly over one symbol when true.
    pub intentional_delays: bool,
    /// Keep only slots whose delay difference (modulo a symbol, centered)
    /// falls inside this window, in symbol fractions.
    pub delay_filter: Option<[f64; 2]>,
}

pub struct TwoUserSlot {
    pub packets: [Packet; 2],
    pub report: ReceiverReport,
}

#[derive(Debug, Clone, Default)]
pub struct BerTally {
    pub bit_errors: u64,
    pub bits: u64,
    pub packets: u64,
    pub exact_packets: u64,
    pub per_user_exact: [u64; 2],
    /// Slots where both packets came back bit-exact.
    pub both_exact_slots: u64,
    pub slots: u64,
    /// Per-packet raw error fractions, for significance tests.
    pub per_packet_ber: Vec<f64>,
}

impl BerTally {
    pub fn raw_ber(&self) -> f64 {
        self.bit_errors as f64 / self.bits.max(1) as f64
    }

    fn merge(mut self, other: BerTally) -> BerTally {
        self.bit_errors += other.bit_errors;
        self.bits += other.bits;
        self.packets += other.packets;
        self.exact_packets += other.exact_packets;
        for k in 0..2 {
            self.per_user_exact[k] += other.per_user_exact[k];
        }
        self.both_exact_slots += other.both_exact_slots;
        self.slots += other.slots;
        self.per_packet_ber.extend(other.per_packet_ber);
        self
    }
}

fn demod_alignment(stream: &[Complex64], start: usize, len: usize) -> Vec<u8> {
    let window = &stream[start..(start + len).min(stream.len())];
    let mut bits = dqpsk_demodulate(window);
    if bits.len() < CODED_BITS {
        let mut padded = vec![0u8; CODED_BITS - bits.len()];
        padded.append(&mut bits);
        bits = padded;
    }
    bits.truncate(CODED_BITS);
    bits
}

/// Minimum raw bit errors of any separated stream, over all alignments,
/// against this packet's coded bits.
pub fn genie_bit_errors(report: &ReceiverReport, packet: &Packet) -> usize {
    let mut best = CODED_BITS / 2;
    for raw in &report.diagnostics.raw_streams {
        let s = &raw.symbols;
        if s.len() < PAYLOAD_SYMBOLS + 1 {
            continue;
        }
        for (start, len) in [
            (0usize, PAYLOAD_SYMBOLS + 1),
            (1, PAYLOAD_SYMBOLS + 1),
            (2, PAYLOAD_SYMBOLS + 1),
            (0, PAYLOAD_SYMBOLS),
        ] {
            if start + len > s.len() {
                continue;
            }
            let bits = demod_alignment(s, start, len);
            let errors = bits
                .iter()
                .zip(packet.coded_bits.iter())
                .filter(|(a, b)| a != b)
                .count();
            best = best.min(errors);
        }
    }
    best
}

/// Synthesize one two-user slot honoring the scenario's delay filter.
pub fn run_two_user_slot(
    book: &CodeBook,
    config: &ReceiverConfig,
    mode: ReceiveMode,
    scenario: &SlotScenario,
    rng: &mut ChaCha8Rng,
) -> TwoUserSlot {
    let format = &config.format;
    let sps = format.samples_per_symbol() as i64;
    let ids = book.user_ids();
    let noise = format.noise_power_for_snr_db(scenario.snr_db);
    let cfo_max = scenario.cfo_max_frac / format.symbol_interval;

    let draw_natural = |rng: &mut ChaCha8Rng| -> usize {
        if scenario.natural_delay_sigma <= 0.0 {
            return 0;
        }
        use rand_distr::Distribution;
        rand_distr::Normal::new(0.0, scenario.natural_delay_sigma)
            .unwrap()
            .sample(rng)
            .abs()
            .round() as usize
    };

    // draw delays until they satisfy the filter window
    let (d1, d2, n1, n2) = loop {
        let draw_intentional = |rng: &mut ChaCha8Rng| -> usize {
            if scenario.intentional_delays {
                alohacr_phy_core::draw_intentional_delay(rng, sps as usize)
            } else {
                0
            }
        };
        let d1 = draw_intentional(rng);
        let d2 = draw_intentional(rng);
        let n1 = draw_natural(rng);
        let n2 = draw_natural(rng);
        match scenario.delay_filter {
            None => break (d1, d2, n1, n2),
            Some([lo, hi]) => {
                let diff = (d2 as i64 + n2 as i64) - (d1 as i64 + n1 as i64);
                let mut m = diff.rem_euclid(sps);
                if m > sps / 2 {
                    m -= sps;
                }
                let frac = m.abs() as f64 / sps as f64;
                if frac >= lo && frac <= hi {
                    break (d1, d2, n1, n2);
                }
            }
        }
    };

    let p1 = random_packet(book, ids[0], rng).unwrap();
    let p2 = random_packet(book, ids[1], rng).unwrap();
    let w1 = synthesize_waveform(&p1, format, d1).unwrap();
    let w2 = synthesize_waveform(&p2, format, d2).unwrap();
    let mk_gain = |rng: &mut ChaCha8Rng| {
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        Complex64::new(theta.cos(), theta.sin())
    };
    let profiles = [
        UserProfile {
            user_id: p1.user_id,
            gain: mk_gain(rng),
            delay_samples: n1,
            cfo_hz: rng.random_range(-cfo_max..=cfo_max),
        },
        UserProfile {
            user_id: p2.user_id,
            gain: mk_gain(rng),
            delay_samples: n2,
            cfo_hz: rng.random_range(-cfo_max..=cfo_max),
        },
    ];
    let rx = mix_channel(&[w1, w2], &profiles, noise, format.slot_len(), rng);
    let report = receive_slot(&rx, book, mode, config);
    TwoUserSlot {
        packets: [p1, p2],
        report,
    }
}

fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Raw-BER and delivery statistics for one (mode, scenario) point; slots run
/// in parallel on derived seeds, aggregation is order-independent.
pub fn measure_ber_point(
    book: &CodeBook,
    config: &ReceiverConfig,
    mode: ReceiveMode,
    scenario: &SlotScenario,
    packets: usize,
    seed: u64,
) -> BerTally {
    let slots = packets.div_ceil(2);
    let mut tallies: Vec<(usize, BerTally)> = (0..slots)
        .into_par_iter()
        .map(|slot_idx| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, slot_idx as u64));
            let slot = run_two_user_slot(book, config, mode, scenario, &mut rng);
            let mut tally = BerTally::default();
            tally.slots = 1;
            let mut exact_here = 0;
            for (k, packet) in slot.packets.iter().enumerate() {
                let errors = genie_bit_errors(&slot.report, packet) as u64;
                tally.bit_errors += errors;
                tally.bits += CODED_BITS as u64;
                tally.packets += 1;
                tally.per_packet_ber.push(errors as f64 / CODED_BITS as f64);
                let exact = slot
                    .report
                    .recovered
                    .iter()
                    .any(|r| r.user_id == packet.user_id && r.payload == packet.payload);
                if exact {
                    tally.exact_packets += 1;
                    tally.per_user_exact[k] += 1;
                    exact_here += 1;
                }
            }
            if exact_here == 2 {
                tally.both_exact_slots = 1;
            }
            (slot_idx, tally)
        })
        .collect();
    tallies.sort_by_key(|(i, _)| *i);
    tallies
        .into_iter()
        .map(|(_, t)| t)
        .fold(BerTally::default(), BerTally::merge)
}
