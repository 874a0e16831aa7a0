//! Two coherently driven quantum dots coupled through the lossy normal modes
//! of a photonic-crystal dimer.
//!
//! The crate assembles the rotating-frame Lindblad generator for the
//! `(QD1, QD2, mode1, mode2)` system, solves for steady states and transient
//! dynamics, and measures the entanglement of the two dots through the
//! negativity of their reduced density matrix.
//!
//! Units: energies and rates are ħ-scaled and stored in μeV, times in ps.

pub mod cli;
pub mod entanglement;
pub mod error;
pub mod experiments;
pub mod hilbert;
pub mod linalg;
pub mod liouvillian;
pub mod model;
pub mod numeric;
pub mod solvers;
pub mod sparse;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
