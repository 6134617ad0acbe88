//! Physical-layer slot resolution: synthesize the contenders' bursts and run
//! the blind receive chain; a packet is delivered when it comes back
//! id-verified and bit-exact.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use alohacr_mac_analytic::LinkProbs;
use alohacr_phy_core::{
    draw_intentional_delay, mix_channel, random_packet, synthesize_waveform, CodeBook,
    UserProfile,
};
use alohacr_phy_receiver::{receive_slot, ReceiveMode, ReceiverConfig};

#[derive(Debug, Clone)]
pub struct PhySimConfig {
    pub snr_db: f64,
    /// CFO drawn uniformly in `[-cfo_max_hz, cfo_max_hz]` per burst.
    pub cfo_max_hz: f64,
    /// Natural delay: folded Gaussian with this sigma, in samples.
    pub natural_delay_sigma: f64,
    /// Draw intentional delays uniformly over one symbol; disabled for the
    /// no-intentional-delay ablation.
    pub intentional_delays: bool,
}

impl PhySimConfig {
    pub fn standard(snr_db: f64) -> PhySimConfig {
        PhySimConfig {
            snr_db,
            cfo_max_hz: 0.0005 * 40.0e6 / 32.0,
            natural_delay_sigma: 32.0 / 20.0,
            intentional_delays: true,
        }
    }
}

/// Reusable physical-layer context for one simulation run.
pub struct PhyLink {
    codebook: CodeBook,
    receiver: ReceiverConfig,
    noise_power: f64,
    config: PhySimConfig,
    /// user index -> code book id
    ids: Vec<u32>,
}

impl PhyLink {
    pub fn new(users: usize, config: PhySimConfig) -> PhyLink {
        let codebook = CodeBook::standard(users).expect("code book size");
        let receiver = ReceiverConfig::standard();
        let noise_power = receiver.format.noise_power_for_snr_db(config.snr_db);
        let ids = codebook.user_ids();
        PhyLink {
            codebook,
            receiver,
            noise_power,
            config,
            ids,
        }
    }

    pub fn codebook(&self) -> &CodeBook {
        &self.codebook
    }

    pub fn receiver(&self) -> &ReceiverConfig {
        &self.receiver
    }

    fn draw_natural_delay(&self, rng: &mut ChaCha8Rng) -> usize {
        if self.config.natural_delay_sigma <= 0.0 {
            return 0;
        }
        use rand_distr::Distribution;
        let normal = rand_distr::Normal::new(0.0, self.config.natural_delay_sigma).unwrap();
        normal.sample(rng).abs().round() as usize
    }

    /// Synthesize the contenders' bursts, push them through the channel and
    /// the blind receiver, and return which contenders' packets came back
    /// bit-exact.
    pub fn resolve_slot(&self, contenders: &[usize], rng: &mut ChaCha8Rng) -> Vec<usize> {
        debug_assert!(matches!(contenders.len(), 1 | 2));
        let format = &self.receiver.format;
        let sps = format.samples_per_symbol();
        let mut waves = Vec::with_capacity(contenders.len());
        let mut profiles = Vec::with_capacity(contenders.len());
        let mut truths = Vec::with_capacity(contenders.len());
        for &user in contenders {
            let id = self.ids[user];
            let packet = random_packet(&self.codebook, id, rng).expect("known user");
            let intentional = if self.config.intentional_delays {
                draw_intentional_delay(rng, sps)
            } else {
                0
            };
            let wave = synthesize_waveform(&packet, format, intentional).expect("valid burst");
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            profiles.push(UserProfile {
                user_id: id,
                gain: Complex64::new(theta.cos(), theta.sin()),
                delay_samples: self.draw_natural_delay(rng),
                cfo_hz: rng.random_range(-self.config.cfo_max_hz..=self.config.cfo_max_hz),
            });
            waves.push(wave);
            truths.push((user, packet));
        }
        let rx = mix_channel(&waves, &profiles, self.noise_power, format.slot_len(), rng);
        let report = receive_slot(&rx, &self.codebook, ReceiveMode::Blind, &self.receiver);
        truths
            .into_iter()
            .filter(|(_, packet)| {
                report
                    .recovered
                    .iter()
                    .any(|r| r.user_id == packet.user_id && r.payload == packet.payload)
            })
            .map(|(user, _)| user)
            .collect()
    }
}

/// Measure (P0, P1, P2) off-line for a physical configuration by running
/// dedicated single- and pair-contention slots.
pub fn calibrate_link_probs(
    users: usize,
    config: &PhySimConfig,
    single_slots: usize,
    pair_slots: usize,
    seed: u64,
) -> LinkProbs {
    assert!(users >= 2);
    use rand::SeedableRng;
    let link = PhyLink::new(users, config.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut single_ok = 0usize;
    for _ in 0..single_slots {
        let winners = link.resolve_slot(&[0], &mut rng);
        single_ok += usize::from(!winners.is_empty());
    }
    let mut both = 0usize;
    let mut one = 0usize;
    for _ in 0..pair_slots {
        let winners = link.resolve_slot(&[0, 1], &mut rng);
        match winners.len() {
            2 => both += 1,
            1 => one += 1,
            _ => {}
        }
    }
    LinkProbs {
        p0: single_ok as f64 / single_slots as f64,
        p1: both as f64 / pair_slots as f64,
        p2: one as f64 / pair_slots as f64,
    }
}
