//! Pilot code book.
//!
//! Each user owns a +/-1 pilot sequence built from a degree-5 maximal-length
//! LFSR (period 31) cyclically extended by one chip to 32, plus a 32-bit user
//! id word. Distinct users use distinct primitive feedback polynomials; the
//! seeds below were chosen so the worst pairwise aperiodic cross-correlation
//! over all lags stays under 0.35 of the peak, which is what the two-pass
//! pilot-deflation synchronizer relies on.

use std::collections::BTreeMap;

use thiserror::Error;

pub const PILOT_CHIPS: usize = 32;
pub const ID_BITS: usize = 32;

/// (feedback mask, seed) per user slot. All six degree-5 primitive feedback
/// masks, seeds picked by cross-correlation search.
const PILOT_LFSR: [(u8, u8); 6] = [(0x12, 1), (0x14, 6), (0x17, 5), (0x1b, 11), (0x1d, 1), (0x1e, 1)];

#[derive(Debug, Error)]
pub enum CodeBookError {
    #[error("at most {max} users supported, requested {requested}")]
    TooManyUsers { max: usize, requested: usize },
    #[error("need at least one user")]
    Empty,
}

/// Map from user id to its pilot chip sequence.
#[derive(Debug, Clone)]
pub struct CodeBook {
    entries: BTreeMap<u32, Vec<i8>>,
}

impl CodeBook {
    /// The standard code book for `n_users` users (1..=6).
    pub fn standard(n_users: usize) -> Result<CodeBook, CodeBookError> {
        if n_users == 0 {
            return Err(CodeBookError::Empty);
        }
        if n_users > PILOT_LFSR.len() {
            return Err(CodeBookError::TooManyUsers {
                max: PILOT_LFSR.len(),
                requested: n_users,
            });
        }
        let mut entries = BTreeMap::new();
        for slot in 0..n_users {
            let (mask, seed) = PILOT_LFSR[slot];
            entries.insert(user_id_for_slot(slot), padded_msequence(mask, seed));
        }
        Ok(CodeBook { entries })
    }

    pub fn pilot(&self, user_id: u32) -> Option<&[i8]> {
        self.entries.get(&user_id).map(|v| v.as_slice())
    }

    pub fn user_ids(&self) -> Vec<u32> {
        self.entries.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &[i8])> {
        self.entries.iter().map(|(id, chips)| (*id, chips.as_slice()))
    }
}

/// Fixed id word for a user slot (golden-ratio multiples keep the pairwise
/// Hamming distance of the id fields >= 10).
pub fn user_id_for_slot(slot: usize) -> u32 {
    0x9E37_79B9u32.wrapping_mul(slot as u32 + 1)
}

/// 32-bit id word as MSB-first bits.
pub fn id_bits(user_id: u32) -> [u8; ID_BITS] {
    let mut out = [0u8; ID_BITS];
    for (i, bit) in out.iter_mut().enumerate() {
        *bit = ((user_id >> (31 - i)) & 1) as u8;
    }
    out
}

pub fn id_from_bits(bits: &[u8]) -> u32 {
    debug_assert_eq!(bits.len(), ID_BITS);
    bits.iter().fold(0u32, |acc, &b| (acc << 1) | u32::from(b != 0))
}

/// Length-31 m-sequence cyclically extended to 32 +/-1 chips.
fn padded_msequence(mask: u8, seed: u8) -> Vec<i8> {
    let mut state = seed & 0x1f;
    let mut chips = Vec::with_capacity(PILOT_CHIPS);
    for _ in 0..31 {
        let bit = (state >> 4) & 1;
        chips.push(if bit == 1 { -1 } else { 1 });
        let feedback = (state & mask).count_ones() as u8 & 1;
        state = ((state << 1) | feedback) & 0x1f;
    }
    chips.push(chips[0]);
    chips
}
