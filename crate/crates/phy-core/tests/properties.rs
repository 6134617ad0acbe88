//! Cross-module properties of the transmit chain.

use alohacr_phy_core::coding::{deinterleave, viterbi_decode};
use alohacr_phy_core::{
    dqpsk_demodulate, encode_packet, mix_channel, synthesize_waveform, BurstFormat, CodeBook,
    Complex64, UserProfile, DQPSK_REF,
};
use proptest::prelude::*;
use rand::SeedableRng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// decode(encode(bits)) = bits for any payload at infinite SNR.
    #[test]
    fn coding_round_trip(data in prop::collection::vec(0u8..2, 382)) {
        let book = CodeBook::standard(4).unwrap();
        let id = book.user_ids()[2];
        let pkt = encode_packet(&book, id, &data).unwrap();
        let mut stream = vec![DQPSK_REF];
        stream.extend_from_slice(&pkt.symbols);
        let demod = dqpsk_demodulate(&stream);
        let decoded = viterbi_decode(&deinterleave(&demod));
        prop_assert_eq!(&decoded[32..], &data[..]);
    }

    /// Multiplying every payload symbol by a common unit phasor leaves the
    /// differential demodulation output unchanged.
    #[test]
    fn dqpsk_global_phase_cancels(data in prop::collection::vec(0u8..2, 382), theta in 0.0..std::f64::consts::TAU) {
        let book = CodeBook::standard(1).unwrap();
        let id = book.user_ids()[0];
        let pkt = encode_packet(&book, id, &data).unwrap();
        let rot = Complex64::new(theta.cos(), theta.sin());
        let mut stream = vec![DQPSK_REF * rot];
        stream.extend(pkt.symbols.iter().map(|s| s * rot));
        prop_assert_eq!(dqpsk_demodulate(&stream), pkt.coded_bits);
    }
}

/// mix_channel is linear at zero noise: mixing the per-user sum equals the
/// sum of separately mixed users, pointwise.
#[test]
fn channel_linearity() {
    let fmt = BurstFormat::standard();
    let book = CodeBook::standard(2).unwrap();
    let ids = book.user_ids();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let p1 = alohacr_phy_core::random_packet(&book, ids[0], &mut rng).unwrap();
    let p2 = alohacr_phy_core::random_packet(&book, ids[1], &mut rng).unwrap();
    let w1 = synthesize_waveform(&p1, &fmt, 3).unwrap();
    let w2 = synthesize_waveform(&p2, &fmt, 19).unwrap();
    let prof1 = UserProfile {
        user_id: ids[0],
        gain: Complex64::new(0.9, 0.2),
        delay_samples: 2,
        cfo_hz: 150.0,
    };
    let prof2 = UserProfile {
        user_id: ids[1],
        gain: Complex64::new(-0.4, 0.7),
        delay_samples: 11,
        cfo_hz: -90.0,
    };
    let len = fmt.slot_len();

    let mut rng0 = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let joint = mix_channel(
        &[w1.clone(), w2.clone()],
        &[prof1.clone(), prof2.clone()],
        0.0,
        len,
        &mut rng0,
    );
    let a = mix_channel(&[w1], &[prof1], 0.0, len, &mut rng0);
    let b = mix_channel(&[w2], &[prof2], 0.0, len, &mut rng0);
    for i in 0..len {
        assert!(
            (joint.samples[i] - (a.samples[i] + b.samples[i])).norm() < 1e-12,
            "sample {i}"
        );
    }
}
