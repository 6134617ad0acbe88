//! Base-station receive chain for two-user collision resolution.
//!
//! The station oversamples the collided burst into polyphase components and
//! treats them as an instantaneous mixture of each user's adjacent symbols.
//! Three separation strategies are exposed through [`receive_slot`]:
//!
//! * `Blind` — the mixing matrix is estimated from the data itself by JADE,
//! * `Training` — the matrix is built from pilot-stage gain/delay estimates,
//! * `SicOnly` — the strongest user is decoded against the other as
//!   interference.
//!
//! All three finish with successive interference cancellation: the decoded
//! user is re-encoded, fitted and deflated, and the residual is decoded for
//! the second user.

pub mod decode;
pub mod equalize;
pub mod filter;
pub mod jade;
pub mod pll;
pub mod polyphase;
pub mod receiver;
pub mod sic;
pub mod sync;

pub use decode::{decode_stream, DecodedPacket, SymbolShift, ID_GATE_MAX_MISMATCH};
pub use equalize::{ls_equalize, EqualizeError};
pub use filter::receive_lowpass;
pub use jade::{jade_separate, JadeError, JadeResult};
pub use pll::{constellation_variance, pll_track, select_strongest, PllResult};
pub use polyphase::{
    build_mixing_matrix, offset_deltas, polyphase_decompose, MixingEstimate, PolyphaseError,
    PolyphaseObservation, DEFAULT_OFFSETS,
};
pub use receiver::{
    receive_slot, Diagnostics, RawStream, ReceiveMode, ReceiverConfig, ReceiverReport,
    RecoveredPacket,
};
pub use sic::{
    delay_scatter_landscape, estimate_payload_delay, fit_payload, payload_template, refine_gain,
    sic_deflate, two_grid_minima, GridScore,
};
pub use sync::{detect_pilots, synchronize, synchronize_excluding, SyncResult, DEFAULT_SYNC_THRESHOLD};
