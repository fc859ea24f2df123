//! A desk-scale laboratory for the quantum reduction from finding short dual
//! codewords to decoding random linear codes.
//!
//! The crate simulates the full reduction pipeline exactly on small instances
//! (dense statevectors over F_q^n x F_q^n x coin bits), implements the exact
//! Krawtchouk polynomial machinery behind the dual-weight analysis, and exposes
//! closed-form parameter maps (q-ary entropy, Gilbert-Varshamov, tau-perp,
//! omega-easy) for scanning where the reduction is useful.

pub mod analytic;
pub mod cli;
pub mod codes;
pub mod error;
pub mod field;
pub mod kravchuk;
pub mod presets;
pub mod quantum;
pub mod reduction;
pub mod rng;

pub use error::{Error, Result};
