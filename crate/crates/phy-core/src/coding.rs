//! Rate-1/2 convolutional code and block interleaver.
//!
//! Constraint length 7 with the (133, 171) octal generator pair, encoded from
//! the zero state and truncated (no tail bits), so 414 payload bits map to
//! exactly 828 coded bits. Decoding is hard-decision Viterbi with traceback
//! from the best final state. The interleaver writes the 828 coded bits into
//! a 23 x 36 matrix row-wise and reads them column-wise.

pub const CONSTRAINT_LENGTH: usize = 7;
pub const GENERATORS: [u32; 2] = [0o133, 0o171];
pub const INTERLEAVER_ROWS: usize = 23;
pub const INTERLEAVER_COLS: usize = 36;

const STATES: usize = 1 << (CONSTRAINT_LENGTH - 1);

/// Rate-1/2 encode; output has twice the input length.
pub fn conv_encode(bits: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(bits.len() * 2);
    let mut shift: u32 = 0;
    for &b in bits {
        debug_assert!(b <= 1);
        shift = (shift >> 1) | ((b as u32) << (CONSTRAINT_LENGTH - 1));
        for g in GENERATORS {
            out.push(((shift & g).count_ones() & 1) as u8);
        }
    }
    out
}

/// Hard-decision Viterbi decode of a truncated rate-1/2 stream.
pub fn viterbi_decode(coded: &[u8]) -> Vec<u8> {
    assert_eq!(coded.len() % 2, 0, "coded stream must pair up");
    let steps = coded.len() / 2;
    if steps == 0 {
        return Vec::new();
    }

    // expected outputs per (predecessor state, input); states pack the most
    // recent input at the LSB
    let mut expected = [[0u8; 2]; STATES * 2];
    for prev in 0..STATES {
        for input in 0..2u32 {
            let full = ((prev as u32) << 1 | input) & ((1 << CONSTRAINT_LENGTH) - 1);
            // `full` has the newest bit as LSB; mirror into the encoder's
            // shift-register convention (newest at MSB).
            let mut reg = 0u32;
            for i in 0..CONSTRAINT_LENGTH {
                reg |= ((full >> i) & 1) << (CONSTRAINT_LENGTH - 1 - i);
            }
            for (gi, g) in GENERATORS.iter().enumerate() {
                expected[prev * 2 + input as usize][gi] = ((reg & g).count_ones() & 1) as u8;
            }
        }
    }

    let mut metrics = vec![u32::MAX / 2; STATES];
    metrics[0] = 0;
    let mut decisions: Vec<u64> = Vec::with_capacity(steps);

    for pair in coded.chunks_exact(2) {
        let mut next = vec![u32::MAX / 2; STATES];
        let mut decision: u64 = 0;
        for state in 0..STATES {
            // predecessors of `state`: state = (prev << 1 | input) & mask
            // so prev = (state >> 1) | (old_bit << (K-2)), input = state & 1
            let input = (state & 1) as u32;
            for old_bit in 0..2usize {
                let prev = (state >> 1) | (old_bit << (CONSTRAINT_LENGTH - 2));
                let exp = expected[prev * 2 + input as usize];
                let branch = u32::from(exp[0] != pair[0]) + u32::from(exp[1] != pair[1]);
                let cand = metrics[prev].saturating_add(branch);
                if cand < next[state] {
                    next[state] = cand;
                    if old_bit == 1 {
                        decision |= 1 << state;
                    } else {
                        decision &= !(1 << state);
                    }
                }
            }
        }
        metrics = next;
        decisions.push(decision);
    }

    // traceback from the best final state (ties break to the lowest index)
    let mut state = metrics
        .iter()
        .enumerate()
        .min_by_key(|(i, &m)| (m, *i))
        .map(|(i, _)| i)
        .unwrap();
    let mut bits = vec![0u8; steps];
    for (i, decision) in decisions.iter().enumerate().rev() {
        bits[i] = (state & 1) as u8;
        let old_bit = (decision >> state) & 1;
        state = (state >> 1) | ((old_bit as usize) << (CONSTRAINT_LENGTH - 2));
    }
    bits
}

/// Row-write / column-read block interleave of exactly 828 bits.
pub fn interleave(bits: &[u8]) -> Vec<u8> {
    assert_eq!(bits.len(), INTERLEAVER_ROWS * INTERLEAVER_COLS);
    let mut out = Vec::with_capacity(bits.len());
    for col in 0..INTERLEAVER_COLS {
        for row in 0..INTERLEAVER_ROWS {
            out.push(bits[row * INTERLEAVER_COLS + col]);
        }
    }
    out
}

pub fn deinterleave(bits: &[u8]) -> Vec<u8> {
    assert_eq!(bits.len(), INTERLEAVER_ROWS * INTERLEAVER_COLS);
    let mut out = vec![0u8; bits.len()];
    let mut it = bits.iter();
    for col in 0..INTERLEAVER_COLS {
        for row in 0..INTERLEAVER_ROWS {
            out[row * INTERLEAVER_COLS + col] = *it.next().unwrap();
        }
    }
    out
}
