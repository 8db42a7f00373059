//! Polar coding for binary-input symmetric wiretap channels.
//!
//! The crate covers the whole pipeline at desk scale: GF(2) generator
//! matrices, channel models, the polar transform with exhaustive oracles,
//! code construction for the legitimate user and the eavesdropper, the
//! randomized coset encoder with its successive cancellation decoder, and
//! secrecy measurements (exact and rank-based equivocation, the Fano-style
//! lower bound, and per-index mutual information scans).
//!
//! Index sets are 0-based in the API. Serialized specs and reports use
//! 1-based index lists.

pub mod channels;
pub mod codec;
pub mod construction;
pub mod error;
pub mod gf2;
pub mod info;
pub mod polar;
pub mod rng;
pub mod secrecy;
pub mod sim;

pub use error::{Error, Result};
