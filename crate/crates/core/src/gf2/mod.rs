//! Linear algebra over GF(2): packed vectors and matrices, a counter-mode
//! pseudorandom stream, and the incremental solver behind every decoder.

mod bitvec;
mod matrix;
mod prf;
mod solver;

pub use bitvec::BitVector;
pub use matrix::BitMatrix;
pub use prf::{derive_key, hash_label, mix64, prf_bits, PrfStream};
pub use solver::{IncrementalSolver, InsertOutcome, SparseRow};
