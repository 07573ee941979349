//! Multi-rate sequential erasure codes.
//!
//! One encoded stream lets receivers of different erasure capacities decode
//! growing prefixes of the same message at capacity-dependent rates. This
//! crate provides the GF(2) machinery, the code constructions, exact
//! rate-region evaluators and a seeded erasure-channel simulator.

pub mod codec;
pub mod error;
pub mod gf2;
pub mod lp;
pub mod rate;
pub mod rational;
pub mod region;
pub mod sim;

pub use error::{Error, Result};
