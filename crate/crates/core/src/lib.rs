//! Reversible logic synthesis over the CNTS gate library (NOT, CNOT,
//! TOFFOLI, SWAP).
//!
//! - [`perm`]: permutations of bit-strings, parity, cycle notation.
//! - [`gate`]: gates, circuits, simulation and the text circuit format.
//! - [`gf2`]: linear reversible functions and CNOT synthesis.
//! - [`constructive`]: T|C|T|N synthesis of arbitrary even permutations.
//! - [`rewrite`]: commutators, control lifting, NOT pushing.
//! - [`optimal`]: optimal circuit libraries and iterative-deepening search.
//! - [`oracle`]: Grover oracles and ROM-based circuits.

pub mod constructive;
pub mod error;
pub mod exec;
pub mod gate;
pub mod gf2;
pub mod optimal;
pub mod oracle;
pub mod perm;
pub mod rewrite;

pub use error::{Error, ErrorCategory, Result};
pub use exec::Exec;
pub use gate::{Circuit, Gate, GateKind, GateLibrary};
pub use gf2::BitMatrix;
pub use perm::{CycleNotation, Parity, Permutation, TranspositionPair};
