//! Transmit side of the ALOHA-CR physical layer.
//!
//! The crate builds everything a user node needs to put a burst on the air,
//! and the flat-fading multi-user channel that mixes concurrent bursts at the
//! base station:
//!
//! * pulse shapes ([`PulseShape`]): a square-root-Nyquist RRC for the pilot
//!   preamble and a low-sidelobe IOTA pulse for the payload,
//! * packet encoding ([`encode_packet`]): rate-1/2 convolutional code, block
//!   interleaver and DQPSK mapping,
//! * the pilot code book ([`CodeBook`]) of near-orthogonal m-sequences,
//! * burst assembly ([`synthesize_waveform`]) with the intentional payload
//!   delay, and
//! * channel mixing ([`mix_channel`]) with per-user gain, delay, CFO and
//!   circular complex AWGN.
//!
//! Everything is a pure function of its inputs plus an explicit random
//! source, so Monte Carlo trials can split seeds and run in parallel.

pub mod channel;
pub mod codebook;
pub mod coding;
pub mod modulation;
pub mod packet;
pub mod pulse;
pub mod waveform;

mod fft;

pub use channel::{mix_channel, BasebandSignal, UserProfile};
pub use codebook::CodeBook;
pub use modulation::{dqpsk_demodulate, dqpsk_modulate, DQPSK_REF};
pub use packet::{encode_packet, random_packet, Packet};
pub use pulse::{design_pulse, PulseKind, PulseShape};
pub use waveform::{draw_intentional_delay, synthesize_waveform, BurstFormat};

pub use num_complex::Complex64;
