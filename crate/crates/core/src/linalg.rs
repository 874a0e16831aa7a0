//! Dense complex kernels: Hermitian and general eigenvalues, linear solves.
//!
//! Backed by `nalgebra`; this module adds the input checks, ordering
//! conventions and failure reporting the rest of the crate relies on.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen, SVD};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// `max |m_ij - conj(m_ji)| <= tol * max(1, max |m_ij|)`.
pub fn is_hermitian(m: &DMatrix<C64>, tol: f64) -> bool {
    if m.nrows() != m.ncols() {
        return false;
    }
    let scale = m.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
    let n = m.nrows();
    for j in 0..n {
        for i in 0..=j {
            if (m[(i, j)] - m[(j, i)].conj()).norm() > tol * scale {
                return false;
            }
        }
    }
    true
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: DMatrix<C64>,
}

pub fn hermitian_eigen(m: &DMatrix<C64>, tol: f64) -> Result<HermitianEigen> {
    if !is_hermitian(m, tol) {
        return Err(Error::domain("matrix is not Hermitian"));
    }
    Ok(hermitian_eigen_unchecked(m))
}

pub fn hermitian_eigenvalues(m: &DMatrix<C64>, tol: f64) -> Result<Vec<f64>> {
    if !is_hermitian(m, tol) {
        return Err(Error::domain("matrix is not Hermitian"));
    }
    Ok(hermitian_eigenvalues_unchecked(m))
}

fn symmetrized(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

pub(crate) fn hermitian_eigen_unchecked(m: &DMatrix<C64>) -> HermitianEigen {
    let eig = SymmetricEigen::new(symmetrized(m));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |i, j| eig.eigenvectors[(i, order[j])]);
    HermitianEigen { values, vectors }
}

pub(crate) fn hermitian_eigenvalues_unchecked(m: &DMatrix<C64>) -> Vec<f64> {
    let mut v: Vec<f64> = symmetrized(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Eigenvalues of a general complex square matrix, in no particular order.
pub fn general_eigenvalues(m: &DMatrix<C64>) -> Result<Vec<C64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::domain("eigenvalues need a square matrix"));
    }
    let schur = Schur::try_new(m.clone(), 1e-14, 100_000)
        .ok_or_else(|| Error::domain("Schur iteration did not converge"))?;
    let (_, t) = schur.unpack();
    Ok(t.diagonal().iter().copied().collect())
}

/// Singular values, descending.
pub fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    let mut s: Vec<f64> = SVD::new(m.clone(), false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// LU factorization with partial pivoting and a crude condition estimate.
#[derive(Debug, Clone)]
pub struct LuSolver {
    lu: nalgebra::LU<C64, nalgebra::Dyn, nalgebra::Dyn>,
    condition: f64,
}

/// Pivot ratio below which a factorization is treated as singular.
const PIVOT_RATIO_FLOOR: f64 = 1e-14;

impl LuSolver {
    pub fn new(a: &DMatrix<C64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::domain("linear solve needs a square matrix"));
        }
        let lu = a.clone().lu();
        let u = lu.u();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
        for k in 0..u.nrows() {
            let p = u[(k, k)].norm();
            lo = lo.min(p);
            hi = hi.max(p);
        }
        let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        if !(lo > PIVOT_RATIO_FLOOR * hi) {
            return Err(Error::Singular { condition });
        }
        Ok(Self { lu, condition })
    }

    /// Ratio of the largest to the smallest pivot magnitude.
    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    pub fn solve(&self, b: &DVector<C64>) -> Result<DVector<C64>> {
        self.lu.solve(b).ok_or(Error::Singular {
            condition: self.condition,
        })
    }
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Solves `A x = b` with one round of iterative refinement.
///
/// Fails when `A` is singular to working precision or the residual bound
/// `||Ax - b|| <= 1e-10 (||A|| ||x|| + ||b||)` cannot be met.
pub fn solve_linear(a: &DMatrix<C64>, b: &DVector<C64>) -> Result<DVector<C64>> {
    if b.len() != a.nrows() {
        return Err(Error::domain("right-hand side length does not match the matrix"));
    }
    let lu = LuSolver::new(a)?;
    let mut x = lu.solve(b)?;
    let r = b - a * &x;
    x += lu.solve(&r)?;
    let resid = (a * &x - b).norm();
    let bound = 1e-10 * (max_abs(a) * (a.nrows() as f64).sqrt() * x.norm() + b.norm());
    if !(resid <= bound) {
        return Err(Error::Singular {
            condition: lu.condition_estimate(),
        });
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Small deterministic generator for test matrices.
    struct Lcg(u64);
    impl Lcg {
        fn next(&mut self) -> f64 {
            self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((self.0 >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        }
        fn complex_matrix(&mut self, n: usize) -> DMatrix<C64> {
            DMatrix::from_fn(n, n, |_, _| C64::new(self.next(), self.next()))
        }
    }

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn pauli_z_and_diagonal_spectra() {
        let z = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]);
        assert_eq!(hermitian_eigenvalues(&z, 1e-10).unwrap(), vec![-1.0, 1.0]);
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![c(3.0), c(1.0), c(2.0)]));
        let ev = hermitian_eigenvalues(&d, 1e-10).unwrap();
        for (got, want) in ev.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn random_hermitian_reconstruction() {
        let mut rng = Lcg(7);
        let a = rng.complex_matrix(8);
        let h = &a + a.adjoint();
        let eig = hermitian_eigen(&h, 1e-10).unwrap();
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        let lam = DMatrix::from_diagonal(&DVector::from_iterator(8, eig.values.iter().map(|&v| c(v))));
        let rec = &eig.vectors * lam * eig.vectors.adjoint();
        assert!((rec - h).norm() < 1e-10);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        assert!(matches!(hermitian_eigenvalues(&m, 1e-10), Err(Error::Domain(_))));
    }

    #[test]
    fn solve_identity_and_diagonal() {
        let b = DVector::from_vec(vec![c(1.0), C64::new(2.0, -1.0), c(-3.0)]);
        let x = solve_linear(&DMatrix::identity(3, 3), &b).unwrap();
        assert!((x - &b).norm() < 1e-15);
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![c(2.0), C64::new(0.0, 1.0), c(-4.0)]));
        let x = solve_linear(&d, &b).unwrap();
        for i in 0..3 {
            assert!((x[i] - b[i] / d[(i, i)]).norm() < 1e-15);
        }
    }

    #[test]
    fn random_well_conditioned_residual_bound() {
        let mut rng = Lcg(42);
        let n = 64;
        let a = rng.complex_matrix(n) + DMatrix::<C64>::identity(n, n) * c(8.0);
        let b = DVector::from_fn(n, |_, _| C64::new(rng.next(), rng.next()));
        let x = solve_linear(&a, &b).unwrap();
        let resid = (&a * &x - &b).norm();
        assert!(resid <= 1e-10 * (a.norm() * x.norm() + b.norm()));
    }

    #[test]
    fn singular_matrix_reports_condition() {
        let a = DMatrix::from_row_slice(2, 2, &[c(1.0), c(2.0), c(2.0), c(4.0)]);
        let b = DVector::from_vec(vec![c(1.0), c(1.0)]);
        match solve_linear(&a, &b) {
            Err(Error::Singular { condition }) => assert!(condition > 1e14),
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn general_eigenvalues_of_triangular_matrix() {
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[c(1.0), c(5.0), c(2.0), c(0.0), C64::new(0.0, 2.0), c(1.0), c(0.0), c(0.0), c(-3.0)],
        );
        let mut ev = general_eigenvalues(&m).unwrap();
        ev.sort_by(|a, b| a.re.total_cmp(&b.re));
        let want = [c(-3.0), C64::new(0.0, 2.0), c(1.0)];
        for (g, w) in ev.iter().zip(want) {
            assert!((g - w).norm() < 1e-12);
        }
    }
}
