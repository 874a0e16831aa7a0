//! Steady states, transient dynamics and Fock-truncation checks.

mod convergence;
mod evolve;
mod observables;
mod steady;

pub use convergence::{convergence_scan, convergence_scan_with, ConvergenceReport, CONVERGENCE_THRESHOLD};
pub use evolve::{
    evolve, evolve_generators, evolve_with, EvolveOptions, Schedule, Segment, Trajectory, TRAJECTORY_TRACE_TOL,
};
pub use observables::{Observable, StandardObservables};
pub use steady::{kernel_dimension, steady_state, steady_state_with, SteadyState};
