//! Flat-fading multi-user channel.
//!
//! Each user's burst is scaled by a complex gain, shifted by its natural
//! delay, rotated by its CFO and summed; circular complex white Gaussian
//! noise is added at the requested per-sample power.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// A complex baseband sample sequence at a fixed oversampling rate.
#[derive(Debug, Clone)]
pub struct BasebandSignal {
    pub samples: Vec<Complex64>,
    pub samples_per_symbol: usize,
    /// Symbol interval in seconds.
    pub symbol_interval: f64,
}

impl BasebandSignal {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Seconds per sample.
    pub fn sample_interval(&self) -> f64 {
        self.symbol_interval / self.samples_per_symbol as f64
    }

    /// Mean per-sample power.
    pub fn mean_power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }
}

/// Channel-facing description of one transmitting user.
#[derive(Debug, Clone)]
pub struct UserProfile {
    pub user_id: u32,
    /// Channel coefficient; |gain| > 0.
    pub gain: Complex64,
    /// Natural propagation delay in samples (>= 0).
    pub delay_samples: usize,
    /// Carrier frequency offset in Hz.
    pub cfo_hz: f64,
}

/// Mix `waveforms[k]` (delayed, scaled, CFO-rotated per `profiles[k]`) into an
/// `out_len`-sample slot and add complex AWGN of per-sample power
/// `noise_power`. An empty user list yields pure noise.
pub fn mix_channel<R: Rng>(
    waveforms: &[BasebandSignal],
    profiles: &[UserProfile],
    noise_power: f64,
    out_len: usize,
    rng: &mut R,
) -> BasebandSignal {
    assert_eq!(waveforms.len(), profiles.len());
    let (sps, ts) = waveforms
        .first()
        .map(|w| (w.samples_per_symbol, w.symbol_interval))
        .unwrap_or((1, 1.0));
    for w in waveforms {
        assert_eq!(w.samples_per_symbol, sps, "sample rates must agree");
    }

    let mut out = vec![Complex64::new(0.0, 0.0); out_len];
    for (wave, profile) in waveforms.iter().zip(profiles.iter()) {
        let dt = wave.sample_interval();
        for (i, &x) in wave.samples.iter().enumerate() {
            let t_idx = i + profile.delay_samples;
            if t_idx >= out_len {
                break;
            }
            let phase = 2.0 * std::f64::consts::PI * profile.cfo_hz * (t_idx as f64 * dt);
            let rot = Complex64::new(phase.cos(), phase.sin());
            out[t_idx] += profile.gain * x * rot;
        }
    }

    if noise_power > 0.0 {
        let sigma = (noise_power / 2.0).sqrt();
        let normal = Normal::new(0.0, sigma).expect("valid sigma");
        for v in out.iter_mut() {
            *v += Complex64::new(normal.sample(rng), normal.sample(rng));
        }
    }

    BasebandSignal {
        samples: out,
        samples_per_symbol: sps,
        symbol_interval: ts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn tone(len: usize) -> BasebandSignal {
        let samples = (0..len)
            .map(|i| Complex64::new((i as f64 * 0.1).cos(), (i as f64 * 0.1).sin()))
            .collect();
        BasebandSignal {
            samples,
            samples_per_symbol: 32,
            symbol_interval: 32.0 / 40.0e6,
        }
    }

    #[test]
    fn single_user_no_noise_is_scaled_shift() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let x = tone(256);
        let gain = Complex64::new(0.3, -0.8);
        let profile = UserProfile {
            user_id: 1,
            gain,
            delay_samples: 5,
            cfo_hz: 0.0,
        };
        let y = mix_channel(&[x.clone()], &[profile], 0.0, 300, &mut rng);
        for i in 0..256 {
            assert!((y.samples[i + 5] - gain * x.samples[i]).norm() < 1e-12);
        }
        for i in 0..5 {
            assert_eq!(y.samples[i], Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn two_users_superpose() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let x1 = tone(128);
        let x2 = tone(128);
        let p1 = UserProfile {
            user_id: 1,
            gain: Complex64::new(1.0, 0.0),
            delay_samples: 0,
            cfo_hz: 0.0,
        };
        let p2 = UserProfile {
            user_id: 2,
            gain: Complex64::new(0.0, 1.0),
            delay_samples: 7,
            cfo_hz: 0.0,
        };
        let y = mix_channel(
            &[x1.clone(), x2.clone()],
            &[p1.clone(), p2.clone()],
            0.0,
            200,
            &mut rng,
        );
        let y1 = mix_channel(&[x1], &[p1], 0.0, 200, &mut rng);
        let y2 = mix_channel(&[x2], &[p2], 0.0, 200, &mut rng);
        for i in 0..200 {
            assert!((y.samples[i] - (y1.samples[i] + y2.samples[i])).norm() < 1e-12);
        }
    }

    #[test]
    fn empty_user_list_yields_pure_noise() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let y = mix_channel(&[], &[], 0.5, 10_000, &mut rng);
        let measured = y.mean_power();
        assert!((measured - 0.5).abs() < 0.05, "noise power {measured}");
    }

    #[test]
    fn requested_snr_is_realized() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let x = tone(100_000);
        let signal_power = x.mean_power();
        let snr_db = 20.0;
        let noise_power = signal_power / 10f64.powf(snr_db / 10.0);
        let profile = UserProfile {
            user_id: 1,
            gain: Complex64::new(1.0, 0.0),
            delay_samples: 0,
            cfo_hz: 0.0,
        };
        let y = mix_channel(&[x.clone()], &[profile], noise_power, 100_000, &mut rng);
        let noise_est: f64 = y
            .samples
            .iter()
            .zip(x.samples.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            / x.samples.len() as f64;
        let snr_est = 10.0 * (signal_power / noise_est).log10();
        assert!((snr_est - snr_db).abs() < 0.2, "empirical SNR {snr_est}");
    }

    #[test]
    fn cfo_rotates_linearly() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let x = tone(64);
        let cfo = 1000.0;
        let profile = UserProfile {
            user_id: 1,
            gain: Complex64::new(1.0, 0.0),
            delay_samples: 0,
            cfo_hz: cfo,
        };
        let y = mix_channel(&[x.clone()], &[profile], 0.0, 64, &mut rng);
        let dt = x.sample_interval();
        for i in 0..64 {
            let phase = 2.0 * std::f64::consts::PI * cfo * (i as f64) * dt;
            let expect = x.samples[i] * Complex64::new(phase.cos(), phase.sin());
            assert!((y.samples[i] - expect).norm() < 1e-12);
        }
    }
}
