use serde::{Deserialize, Serialize};

use super::observables::Observable;
use super::steady::steady_state_with;
use crate::error::{Error, Result};
use crate::liouvillian::build_liouvillian;
use crate::model::SystemParams;
use crate::numeric::NumericPolicy;

/// Largest relative change between consecutive cutoffs that still counts as
/// converged.
pub const CONVERGENCE_THRESHOLD: f64 = 0.01;

/// Values below this are treated as zero when forming relative differences.
const ZERO_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub observable: Observable,
    pub cutoffs: Vec<usize>,
    pub values: Vec<f64>,
    /// `|v[k+1] - v[k]| / |v[k]|`, one entry per consecutive pair.
    pub relative_differences: Vec<f64>,
    pub threshold: f64,
}

impl ConvergenceReport {
    /// Whether `cutoffs[k]` agrees with the next cutoff within the threshold;
    /// `None` for the last cutoff.
    pub fn converged_at(&self, k: usize) -> Option<bool> {
        self.relative_differences.get(k).map(|&d| d < self.threshold)
    }

    /// Every consecutive pair agrees.
    pub fn converged(&self) -> bool {
        self.relative_differences.iter().all(|&d| d < self.threshold)
    }
}

pub(crate) fn relative_difference(prev: f64, next: f64) -> f64 {
    if prev.abs() < ZERO_FLOOR {
        if next.abs() < ZERO_FLOOR {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (next - prev).abs() / prev.abs()
    }
}

/// Steady-state `observable` at each cutoff (applied to both modes).
pub fn convergence_scan(params: &SystemParams, observable: Observable, cutoffs: &[usize]) -> Result<ConvergenceReport> {
    convergence_scan_with(params, observable, cutoffs, &NumericPolicy::default())
}

pub fn convergence_scan_with(
    params: &SystemParams,
    observable: Observable,
    cutoffs: &[usize],
    policy: &NumericPolicy,
) -> Result<ConvergenceReport> {
    if cutoffs.len() < 2 {
        return Err(Error::domain("a convergence scan needs at least two cutoffs"));
    }
    if cutoffs.windows(2).any(|w| w[1] <= w[0]) || cutoffs[0] < 1 {
        return Err(Error::domain("cutoffs must be positive and strictly increasing"));
    }
    let mut values = Vec::with_capacity(cutoffs.len());
    for &c in cutoffs {
        let p = params.clone().with_truncation(c);
        let rho = steady_state_with(&build_liouvillian(&p)?, policy)?.rho;
        values.push(observable.evaluate(&rho)?);
    }
    let relative_differences = values.windows(2).map(|w| relative_difference(w[0], w[1])).collect();
    Ok(ConvergenceReport {
        observable,
        cutoffs: cutoffs.to_vec(),
        values,
        relative_differences,
        threshold: CONVERGENCE_THRESHOLD,
    })
}
