//! Pilot synchronization.
//!
//! The pilot portion is correlated against every code book entry's shaped
//! template. The strongest peak identifies the first user and its delay and
//! gain; that pilot is rebuilt and deflated, and a second pass finds the
//! second user if its peak clears the detection threshold. CFO is ignored
//! over the short pilot.

use num_complex::Complex64;

use alohacr_phy_core::waveform::shape_symbols;
use alohacr_phy_core::{BasebandSignal, BurstFormat, CodeBook};

/// Peak-over-median factor a correlation peak must clear to declare a user.
pub const DEFAULT_SYNC_THRESHOLD: f64 = 4.0;

#[derive(Debug, Clone)]
pub struct SyncResult {
    pub user_id: u32,
    /// Estimated burst start (natural delay) in samples.
    pub delay_hat: usize,
    pub gain_hat: Complex64,
    /// Peak magnitude over the median correlation magnitude.
    pub peak_ratio: f64,
}

fn pilot_template(format: &BurstFormat, chips: &[i8]) -> Vec<Complex64> {
    let symbols: Vec<Complex64> = chips
        .iter()
        .map(|&c| Complex64::new(c as f64, 0.0))
        .collect();
    shape_symbols(&symbols, &format.pilot_pulse)
}

/// Correlations of `template` against `work` at every lag in `0..=search`.
fn correlate(work: &[Complex64], template: &[Complex64], search: usize) -> Vec<Complex64> {
    let energy: f64 = template.iter().map(|t| t.norm_sqr()).sum();
    (0..=search)
        .map(|lag| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, w) in template.iter().zip(work[lag..].iter()) {
                acc += t.conj() * w;
            }
            acc / energy
        })
        .collect()
}

/// Peak lag plus the median magnitude outside a one-symbol guard around the
/// peak; excluding the guard keeps the correlation mainlobe from inflating
/// the floor estimate.
fn peak_and_floor(corr: &[Complex64], guard: usize) -> (usize, f64, f64) {
    let mags: Vec<f64> = corr.iter().map(|c| c.norm()).collect();
    let best = mags
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let peak = mags[best];
    let mut floor: Vec<f64> = mags
        .iter()
        .enumerate()
        .filter(|(i, _)| i.abs_diff(best) > guard)
        .map(|(_, &m)| m)
        .collect();
    if floor.is_empty() {
        floor = mags;
    }
    floor.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = floor[floor.len() / 2];
    (best, peak, median)
}

/// Two-pass pilot detection; at most two users are returned, strongest first.
pub fn synchronize(
    signal: &BasebandSignal,
    codebook: &CodeBook,
    format: &BurstFormat,
    search: usize,
    threshold: f64,
) -> Vec<SyncResult> {
    synchronize_excluding(signal, codebook, format, search, threshold, &[])
}

/// Like [`synchronize`] but skipping already-resolved users.
pub fn synchronize_excluding(
    signal: &BasebandSignal,
    codebook: &CodeBook,
    format: &BurstFormat,
    search: usize,
    threshold: f64,
    exclude: &[u32],
) -> Vec<SyncResult> {
    detect_pilots(signal, codebook, format, search, threshold, exclude, 2)
}

/// Pilot detection with up to `max_users` deflation passes. The receiver
/// probes a third pass to spot collisions of order three or more, which the
/// protocol discards wholesale.
pub fn detect_pilots(
    signal: &BasebandSignal,
    codebook: &CodeBook,
    format: &BurstFormat,
    search: usize,
    threshold: f64,
    exclude: &[u32],
    max_users: usize,
) -> Vec<SyncResult> {
    let region = (format.pilot_len() + search).min(signal.samples.len());
    let mut work: Vec<Complex64> = signal.samples[..region].to_vec();
    let mut found: Vec<SyncResult> = Vec::new();
    let guard = format.samples_per_symbol();
    let mut first_peak = 0.0f64;

    for pass in 0..max_users {
        let mut best: Option<(SyncResult, Vec<Complex64>)> = None;
        for (user_id, chips) in codebook.iter() {
            if exclude.contains(&user_id) || found.iter().any(|f| f.user_id == user_id) {
                continue;
            }
            let template = pilot_template(format, chips);
            if template.len() + search > work.len() {
                continue;
            }
            let corr = correlate(&work, &template, search);
            let (lag, peak, median) = peak_and_floor(&corr, guard);
            let ratio = if median > 0.0 { peak / median } else { f64::INFINITY };
            if ratio < threshold {
                continue;
            }
            // a second user cannot be orders of magnitude below the first:
            // that is the numerical residue of the deflation, not a pilot.
            // A third pilot must carry real strength before it condemns the
            // slot as an unresolvable collision; mis-cancellation residue of
            // two overlapping pilots cross-correlates at a few percent.
            let floor = if pass >= 2 { 0.25 } else { 1e-6 };
            if pass > 0 && peak < floor * first_peak {
                continue;
            }
            let candidate = SyncResult {
                user_id,
                delay_hat: lag,
                gain_hat: corr[lag],
                peak_ratio: ratio,
            };
            let stronger = best
                .as_ref()
                .is_none_or(|(b, _)| candidate.gain_hat.norm() > b.gain_hat.norm());
            if stronger {
                best = Some((candidate, template));
            }
        }
        let Some((result, template)) = best else { break };
        if pass == 0 {
            first_peak = result.gain_hat.norm();
        }
        // deflate this user's pilot from the working copy
        for (i, t) in template.iter().enumerate() {
            let idx = result.delay_hat + i;
            if idx < work.len() {
                work[idx] -= result.gain_hat * t;
            }
        }
        found.push(result);
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use alohacr_phy_core::{
        encode_packet, mix_channel, synthesize_waveform, UserProfile,
    };
    use rand::SeedableRng;

    fn setup() -> (BurstFormat, CodeBook) {
        (BurstFormat::standard(), CodeBook::standard(4).unwrap())
    }

    fn burst(
        format: &BurstFormat,
        book: &CodeBook,
        user: u32,
        delay: usize,
    ) -> alohacr_phy_core::BasebandSignal {
        let pkt = encode_packet(book, user, &[0u8; 382]).unwrap();
        synthesize_waveform(&pkt, format, delay).unwrap()
    }

    #[test]
    fn single_user_noiseless_exact() {
        let (format, book) = setup();
        let ids = book.user_ids();
        let wave = burst(&format, &book, ids[0], 0);
        let gain = Complex64::new(0.8, -0.4);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let rx = mix_channel(
            &[wave],
            &[UserProfile {
                user_id: ids[0],
                gain,
                delay_samples: 20,
                cfo_hz: 0.0,
            }],
            0.0,
            format.slot_len(),
            &mut rng,
        );
        let res = synchronize(&rx, &book, &format, 64, DEFAULT_SYNC_THRESHOLD);
        assert_eq!(res.len(), 1);
        assert_eq!(res[0].user_id, ids[0]);
        assert_eq!(res[0].delay_hat, 20);
        assert!((res[0].gain_hat - gain).norm() < 0.01 * gain.norm());
    }

    #[test]
    fn two_users_detected_at_20db() {
        let (format, book) = setup();
        let ids = book.user_ids();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let noise = format.noise_power_for_snr_db(20.0);
        let mut hits = 0;
        let trials = 40;
        for trial in 0..trials {
            let w1 = burst(&format, &book, ids[0], 0);
            let w2 = burst(&format, &book, ids[1], 0);
            let profiles = [
                UserProfile {
                    user_id: ids[0],
                    gain: Complex64::new(0.9, 0.1),
                    delay_samples: 4,
                    cfo_hz: 0.0,
                },
                UserProfile {
                    user_id: ids[1],
                    gain: Complex64::new(-0.2, 0.95),
                    delay_samples: 20,
                    cfo_hz: 0.0,
                },
            ];
            let rx = mix_channel(&[w1, w2], &profiles, noise, format.slot_len(), &mut rng);
            let res = synchronize(&rx, &book, &format, 64, DEFAULT_SYNC_THRESHOLD);
            let ok = res.len() == 2
                && res.iter().any(|r| {
                    r.user_id == ids[0] && (r.delay_hat as i64 - 4).abs() <= 1
                })
                && res.iter().any(|r| {
                    r.user_id == ids[1] && (r.delay_hat as i64 - 20).abs() <= 1
                });
            if ok {
                hits += 1;
            } else if trial < 3 {
                eprintln!("trial {trial}: {res:?}");
            }
        }
        assert!(hits * 100 >= trials * 95, "only {hits}/{trials} detections");
    }

    #[test]
    fn pure_noise_yields_nothing() {
        let (format, book) = setup();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let rx = mix_channel(&[], &[], 0.1, format.slot_len(), &mut rng);
        let rx = alohacr_phy_core::BasebandSignal {
            samples: rx.samples,
            samples_per_symbol: format.samples_per_symbol(),
            symbol_interval: format.symbol_interval,
        };
        let res = synchronize(&rx, &book, &format, 64, DEFAULT_SYNC_THRESHOLD);
        assert!(res.is_empty(), "{res:?}");
    }
}
