//! Loss landscapes of parametrized Clifford circuits.
//!
//! A circuit is a sequence of constant Clifford gates and independent Pauli
//! rotations `exp(-i P phi / 2)`. At points where every angle is a multiple of
//! pi/2 the whole circuit is Clifford and single-Pauli losses take the values
//! -1, 0 or +1 exactly; [`eval`] exploits this next to a dense statevector
//! reference and a Pauli-propagation Fourier analyzer. [`landscape`] finds
//! null directions and searches for minima that optimize only a few Pauli
//! terms, and [`experiment`] wraps everything in seeded, reproducible runs.

pub mod circuit;
pub mod clifford;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod landscape;
pub mod par;
pub mod pauli;
pub mod rng;

pub use circuit::{CliffordPoint, ParamCircuit, ParamPoint, SplitPoint};
pub use clifford::{CliffordGate, StabilizerState};
pub use error::{Error, Result};
pub use pauli::{FamilyKind, Observable, PauliString};
