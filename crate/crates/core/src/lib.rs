//! Binary polar codes decoded through the symmetric parametrization
//! `θ = P(0) − P(1)`.
//!
//! * [`index`]: bit-string indices, the polar transform, code specifications.
//! * [`theta`]: the θ combination rules, real-valued and ternary.
//! * [`sc`]: fixed-address successive-cancellation decoding.
//! * [`scl`]: successive-cancellation list decoding over a fixed path pool.
//! * [`systematic`]: systematic channel encoding.
//! * [`construction`]: frozen-set constructors (exact BEC, Monte-Carlo).
//! * [`oracle`]: brute-force references for small block lengths.
//! * [`codec`]: source coding, systematic and non-systematic channel coding,
//!   CRC outer parity.
//! * [`channel`]: channel models and the priors they induce.

pub mod channel;
pub mod codec;
pub mod construction;
pub mod error;
pub mod index;
pub mod oracle;
pub mod sc;
pub mod scl;
pub mod systematic;
pub mod theta;

pub use error::{PolarError, Result};
pub use index::{bit_reverse, derive_systematic_sets, polar_transform, BinaryVector, BitIndex, CodeSpec};
pub use sc::{sc_decode, DecodeResult, DecoderMemory, ScDecoder};
pub use scl::{scl_decode, PathPool, SclDecoder, SclOutput};
pub use theta::{map_decision, theta_from_prior, TernaryTheta, Theta};
