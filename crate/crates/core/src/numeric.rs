//! Numerical tolerances shared by every module.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericPolicy {
    /// Hermiticity and other algebraic identities.
    pub algebraic_tol: f64,
    /// Allowed deviation of a density matrix trace from one.
    pub trace_tol: f64,
    /// Smallest eigenvalue a density matrix may have.
    pub positivity_slack: f64,
    /// Positivity slack along integrated trajectories.
    pub trajectory_positivity_slack: f64,
    /// Eigenvalues of a partial transpose within this of zero count as zero.
    pub eigen_noise_floor: f64,
    /// Bound on `||L vec(rho)||` for an accepted steady state.
    pub steady_residual: f64,
    /// Relative singular-value threshold for kernel detection.
    pub degeneracy_rel: f64,
    /// Per-step relative tolerance of the adaptive integrator.
    pub ode_rtol: f64,
    /// Per-step absolute tolerance of the adaptive integrator.
    pub ode_atol: f64,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self {
            algebraic_tol: 1e-10,
            trace_tol: 1e-10,
            positivity_slack: 1e-9,
            trajectory_positivity_slack: 1e-8,
            eigen_noise_floor: 1e-12,
            steady_residual: 1e-9,
            degeneracy_rel: 1e-12,
            ode_rtol: 1e-8,
            ode_atol: 1e-12,
        }
    }
}
