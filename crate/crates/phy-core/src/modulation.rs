//! DQPSK mapping.
//!
//! Coded bit pairs select Gray-coded phase increments; a known reference
//! symbol starts the differential chain, so an arbitrary constant phase
//! rotation of the whole stream cancels in demodulation.

use num_complex::Complex64;

/// Differential reference symbol prepended to every burst.
pub const DQPSK_REF: Complex64 = Complex64::new(1.0, 0.0);

const INCREMENTS: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),  // 00 ->   0
    Complex64::new(0.0, 1.0),  // 01 ->  pi/2
    Complex64::new(-1.0, 0.0), // 11 ->  pi
    Complex64::new(0.0, -1.0), // 10 -> -pi/2
];

fn pair_to_index(b0: u8, b1: u8) -> usize {
    match (b0, b1) {
        (0, 0) => 0,
        (0, 1) => 1,
        (1, 1) => 2,
        (1, 0) => 3,
        _ => panic!("bits must be 0 or 1"),
    }
}

fn index_to_pair(idx: usize) -> (u8, u8) {
    match idx {
        0 => (0, 0),
        1 => (0, 1),
        2 => (1, 1),
        3 => (1, 0),
        _ => unreachable!(),
    }
}

/// Map coded bits (even count) to DQPSK symbols. The reference symbol is not
/// included in the output; the first output symbol is already differential
/// with respect to [`DQPSK_REF`].
pub fn dqpsk_modulate(coded: &[u8]) -> Vec<Complex64> {
    assert_eq!(coded.len() % 2, 0);
    let mut prev = DQPSK_REF;
    coded
        .chunks_exact(2)
        .map(|pair| {
            prev *= INCREMENTS[pair_to_index(pair[0], pair[1])];
            prev
        })
        .collect()
}

/// Demodulate a stream whose first element is the reference symbol; returns
/// `2 * (len - 1)` hard bits.
pub fn dqpsk_demodulate(stream: &[Complex64]) -> Vec<u8> {
    assert!(!stream.is_empty());
    let mut out = Vec::with_capacity(2 * (stream.len() - 1));
    for w in stream.windows(2) {
        let rot = w[1] * w[0].conj();
        // nearest increment by angle quadrant
        let ang = rot.im.atan2(rot.re);
        let idx = ((ang / std::f64::consts::FRAC_PI_2).round().rem_euclid(4.0)) as usize % 4;
        let (b0, b1) = index_to_pair(idx);
        out.push(b0);
        out.push(b1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn round_trip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let bits: Vec<u8> = (0..828).map(|_| rng.random_range(0..2) as u8).collect();
        let symbols = dqpsk_modulate(&bits);
        assert_eq!(symbols.len(), 414);
        let mut stream = vec![DQPSK_REF];
        stream.extend_from_slice(&symbols);
        assert_eq!(dqpsk_demodulate(&stream), bits);
    }

    #[test]
    fn rotation_invariant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let bits: Vec<u8> = (0..200).map(|_| rng.random_range(0..2) as u8).collect();
        let symbols = dqpsk_modulate(&bits);
        let theta = 1.234f64;
        let rot = Complex64::new(theta.cos(), theta.sin());
        let mut stream = vec![DQPSK_REF];
        stream.extend_from_slice(&symbols);
        let rotated: Vec<Complex64> = stream.iter().map(|s| s * rot).collect();
        assert_eq!(dqpsk_demodulate(&rotated), bits);
    }

    #[test]
    fn symbols_stay_on_unit_circle() {
        let bits = vec![0, 1, 1, 1, 1, 0, 0, 0, 1, 1];
        for s in dqpsk_modulate(&bits) {
            assert!((s.norm() - 1.0).abs() < 1e-12);
        }
    }
}
