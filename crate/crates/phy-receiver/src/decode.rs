//! Stream decoding with the user-id gate.
//!
//! A separated stream is either `s_u(i)` or `s_u(i+1)`; both alignments are
//! demodulated, de-interleaved and Viterbi-decoded, and the one whose id
//! field matches a code book entry (within a small Hamming slack) wins.

use num_complex::Complex64;

use alohacr_phy_core::codebook::{id_bits, CodeBook, ID_BITS};
use alohacr_phy_core::coding::{deinterleave, viterbi_decode};
use alohacr_phy_core::dqpsk_demodulate;
use alohacr_phy_core::packet::{CODED_BITS, PAYLOAD_SYMBOLS};

/// Maximum id-field bit mismatches the gate accepts (code book ids are at
/// least 10 apart).
pub const ID_GATE_MAX_MISMATCH: usize = 3;

/// Which alignment of the stream decoded. Separated streams carry each
/// user's current or previous symbol on a grid the receiver re-centers, so
/// the decoder probes a window of adjacent alignments: delayed streams put
/// the reference symbol one or two positions in, an advanced stream has it
/// just before the window (its bit pair is then left to the decoder).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolShift {
    Aligned,
    DelayedByOne,
    DelayedByTwo,
    AdvancedByOne,
}

#[derive(Debug, Clone)]
pub struct DecodedPacket {
    pub user_id: u32,
    /// 414 decoded payload bits (id word + data).
    pub payload: Vec<u8>,
    pub shift: SymbolShift,
    /// Demodulated coded bits (interleaved domain) of the winning alignment.
    pub demod_bits: Vec<u8>,
    pub id_mismatches: usize,
}

fn try_alignment(window: &[Complex64], codebook: &CodeBook) -> Option<(u32, Vec<u8>, Vec<u8>, usize)> {
    let mut demod = dqpsk_demodulate(window);
    if demod.len() < CODED_BITS {
        // advanced window: the first symbol's bit pair is missing; seed it
        // with zeros and let the convolutional decoder absorb the damage
        let mut padded = vec![0u8; CODED_BITS - demod.len()];
        padded.append(&mut demod);
        demod = padded;
    }
    let payload = viterbi_decode(&deinterleave(&demod));
    let id_field = &payload[..ID_BITS];
    let mut best: Option<(u32, usize)> = None;
    for (uid, _) in codebook.iter() {
        let mismatches = id_bits(uid)
            .iter()
            .zip(id_field.iter())
            .filter(|(a, b)| a != b)
            .count();
        if best.is_none_or(|(_, m)| mismatches < m) {
            best = Some((uid, mismatches));
        }
    }
    let (uid, mismatches) = best?;
    if mismatches <= ID_GATE_MAX_MISMATCH {
        Some((uid, payload, demod, mismatches))
    } else {
        None
    }
}

/// Windows to probe, as (shift, start, length) over the stream.
fn alignment_windows(len: usize) -> Vec<(SymbolShift, usize, usize)> {
    let mut out = vec![
        (SymbolShift::Aligned, 0, PAYLOAD_SYMBOLS + 1),
        (SymbolShift::DelayedByOne, 1, PAYLOAD_SYMBOLS + 1),
    ];
    if len >= PAYLOAD_SYMBOLS + 3 {
        out.push((SymbolShift::DelayedByTwo, 2, PAYLOAD_SYMBOLS + 1));
    }
    out.push((SymbolShift::AdvancedByOne, 0, PAYLOAD_SYMBOLS));
    out
}

/// Decode a separated stream; the alignment whose decoded id field matches a
/// code book entry wins. Requires `PAYLOAD_SYMBOLS + 2` symbols.
pub fn decode_stream(stream: &[Complex64], codebook: &CodeBook) -> Option<DecodedPacket> {
    if stream.len() < PAYLOAD_SYMBOLS + 2 {
        return None;
    }
    for (shift, start, len) in alignment_windows(stream.len()) {
        let window = &stream[start..start + len];
        if let Some((user_id, payload, demod_bits, id_mismatches)) = try_alignment(window, codebook)
        {
            return Some(DecodedPacket {
                user_id,
                payload,
                shift,
                demod_bits,
                id_mismatches,
            });
        }
    }
    None
}
