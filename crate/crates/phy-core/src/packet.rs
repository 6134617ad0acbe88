//! Packet construction: id + data bits through the coding chain to symbols.

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::codebook::{id_bits, CodeBook};
use crate::coding::{conv_encode, interleave};
use crate::modulation::dqpsk_modulate;

pub const DATA_BITS: usize = 382;
pub const PAYLOAD_BITS: usize = 414;
pub const CODED_BITS: usize = 828;
pub const PAYLOAD_SYMBOLS: usize = 414;

#[derive(Debug, Error)]
pub enum PacketError {
    #[error("user id {0:#010x} has no code book entry")]
    UnknownUser(u32),
    #[error("expected {expected} data bits, got {got}")]
    WrongDataLength { expected: usize, got: usize },
    #[error("data bits must be 0 or 1")]
    NotABit,
}

/// A fully encoded packet ready for pulse shaping.
#[derive(Debug, Clone)]
pub struct Packet {
    pub user_id: u32,
    /// 414 bits: 32-bit id word followed by 382 data bits.
    pub payload: Vec<u8>,
    /// 828 interleaved coded bits.
    pub coded_bits: Vec<u8>,
    /// 32 +/-1 pilot chips from the code book.
    pub pilot_chips: Vec<i8>,
    /// 414 DQPSK symbols (reference symbol not included).
    pub symbols: Vec<Complex64>,
}

/// Encode `data_bits` (exactly 382) for `user_id`.
pub fn encode_packet(
    codebook: &CodeBook,
    user_id: u32,
    data_bits: &[u8],
) -> Result<Packet, PacketError> {
    if data_bits.len() != DATA_BITS {
        return Err(PacketError::WrongDataLength {
            expected: DATA_BITS,
            got: data_bits.len(),
        });
    }
    if data_bits.iter().any(|&b| b > 1) {
        return Err(PacketError::NotABit);
    }
    let pilot_chips = codebook
        .pilot(user_id)
        .ok_or(PacketError::UnknownUser(user_id))?
        .to_vec();

    let mut payload = Vec::with_capacity(PAYLOAD_BITS);
    payload.extend_from_slice(&id_bits(user_id));
    payload.extend_from_slice(data_bits);

    let coded_bits = interleave(&conv_encode(&payload));
    let symbols = dqpsk_modulate(&coded_bits);

    Ok(Packet {
        user_id,
        payload,
        coded_bits,
        pilot_chips,
        symbols,
    })
}

/// Encode a packet with random data bits.
pub fn random_packet<R: Rng>(
    codebook: &CodeBook,
    user_id: u32,
    rng: &mut R,
) -> Result<Packet, PacketError> {
    let data: Vec<u8> = (0..DATA_BITS).map(|_| rng.random_range(0..2u8)).collect();
    encode_packet(codebook, user_id, &data)
}
