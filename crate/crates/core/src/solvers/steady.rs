use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, Operator};
use crate::liouvillian::{devectorize_matrix, trace_functional, Superoperator};
use crate::linalg::{self, LuSolver};
use crate::numeric::NumericPolicy;

/// Stationary state together with its solve diagnostics.
#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    /// `||L vec(rho)||₂` in 1/ps.
    pub residual: f64,
    /// Pivot-ratio condition estimate of the bordered system.
    pub condition: f64,
}

/// Unique normalized `rho` with `L vec(rho) = 0`.
pub fn steady_state(l: &Superoperator) -> Result<DensityMatrix> {
    Ok(steady_state_with(l, &NumericPolicy::default())?.rho)
}

/// Replaces the first row of `L` by the trace functional and solves
/// `A x = e₀` with one refinement step.
pub fn steady_state_with(l: &Superoperator, policy: &NumericPolicy) -> Result<SteadyState> {
    let n = l.dim();
    let dense = l.to_dense();
    let mut a = dense.clone();
    for (j, w) in trace_functional(l.space()).into_iter().enumerate() {
        a[(0, j)] = w;
    }
    let mut b = DVector::<C64>::zeros(n);
    b[0] = C64::new(1.0, 0.0);

    let lu = match LuSolver::new(&a) {
        Ok(lu) => lu,
        Err(Error::Singular { condition }) => return Err(diagnose_singular(&dense, condition, policy)),
        Err(e) => return Err(e),
    };
    let mut x = lu.solve(&b)?;
    let r = &b - &a * &x;
    x += lu.solve(&r)?;

    let m = devectorize_matrix(x.as_slice())?;
    let mut m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    let tr = m.trace();
    if !(tr.norm() > 0.5) {
        return Err(Error::SteadyState(format!("trace of solution is {tr}")));
    }
    m /= C64::new(tr.re, 0.0);

    let v = crate::liouvillian::vectorize_matrix(&m);
    let residual = l.apply(&v).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(residual < policy.steady_residual) {
        if lu.condition_estimate() > 1.0 / policy.degeneracy_rel {
            return Err(diagnose_singular(&dense, lu.condition_estimate(), policy));
        }
        return Err(Error::SteadyState(format!(
            "residual {residual:.3e} exceeds {:.1e}",
            policy.steady_residual
        )));
    }
    let rho = DensityMatrix::with_policy(Operator::new(l.space().clone(), m)?, policy)
        .map_err(|e| Error::SteadyState(e.to_string()))?;
    Ok(SteadyState {
        rho,
        residual,
        condition: lu.condition_estimate(),
    })
}

fn diagnose_singular(dense: &DMatrix<C64>, condition: f64, policy: &NumericPolicy) -> Error {
    let kernel_dim = kernel_dimension_dense(dense, policy.degeneracy_rel);
    if kernel_dim >= 2 {
        Error::DegenerateKernel { kernel_dim }
    } else {
        Error::Singular { condition }
    }
}

fn kernel_dimension_dense(dense: &DMatrix<C64>, rel: f64) -> usize {
    let s = linalg::singular_values(dense);
    let top = s.first().copied().unwrap_or(0.0);
    s.iter().filter(|&&v| v <= rel * top).count()
}

/// Number of singular values of `L` below `rel · σ_max`.
pub fn kernel_dimension(l: &Superoperator, rel: f64) -> usize {
    kernel_dimension_dense(&l.to_dense(), rel)
}
