//! Composite Hilbert spaces, elementary operators, tensor embeddings and
//! partial traces.
//!
//! Subsystems are ordered as given at construction; the first subsystem is
//! the most significant factor of the Kronecker product. Qubits use the basis
//! order `(ground, excited)`, bosons `(0, 1, ..., n_max)`.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::numeric::NumericPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsystemKind {
    Qubit,
    Boson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubsystemSpec {
    kind: SubsystemKind,
    dim: usize,
}

impl SubsystemSpec {
    pub fn qubit() -> Self {
        Self {
            kind: SubsystemKind::Qubit,
            dim: 2,
        }
    }

    /// Truncated boson holding at most `cutoff` quanta.
    pub fn boson(cutoff: usize) -> Result<Self> {
        if cutoff < 1 {
            return Err(Error::domain("boson cutoff must be at least 1"));
        }
        Ok(Self {
            kind: SubsystemKind::Boson,
            dim: cutoff + 1,
        })
    }

    pub fn kind(&self) -> SubsystemKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Ordered tensor product of subsystems.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CompositeSpace {
    subsystems: Vec<SubsystemSpec>,
    total_dim: usize,
}

impl CompositeSpace {
    pub fn new(subsystems: Vec<SubsystemSpec>) -> Result<Self> {
        if subsystems.is_empty() {
            return Err(Error::domain("a composite space needs at least one subsystem"));
        }
        let total_dim = subsystems.iter().map(|s| s.dim).product();
        Ok(Self {
            subsystems,
            total_dim,
        })
    }

    /// The `(QD1, QD2, mode1, mode2)` space with the given Fock cutoffs.
    pub fn qd_dimer(cutoffs: [usize; 2]) -> Result<Self> {
        Self::new(vec![
            SubsystemSpec::qubit(),
            SubsystemSpec::qubit(),
            SubsystemSpec::boson(cutoffs[0])?,
            SubsystemSpec::boson(cutoffs[1])?,
        ])
    }

    pub fn subsystems(&self) -> &[SubsystemSpec] {
        &self.subsystems
    }

    pub fn subsystem(&self, position: usize) -> Result<SubsystemSpec> {
        self.subsystems.get(position).copied().ok_or_else(|| {
            Error::domain(format!(
                "subsystem position {position} out of range for {} subsystems",
                self.subsystems.len()
            ))
        })
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.subsystems.iter().map(|s| s.dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    /// Flat basis index of a product state given per-subsystem levels.
    pub fn index(&self, levels: &[usize]) -> Result<usize> {
        if levels.len() != self.subsystems.len() {
            return Err(Error::domain(format!(
                "expected {} levels, got {}",
                self.subsystems.len(),
                levels.len()
            )));
        }
        let mut idx = 0;
        for (lvl, s) in levels.iter().zip(&self.subsystems) {
            if *lvl >= s.dim {
                return Err(Error::domain(format!(
                    "level {lvl} exceeds subsystem dimension {}",
                    s.dim
                )));
            }
            idx = idx * s.dim + lvl;
        }
        Ok(idx)
    }

    /// Inverse of [`CompositeSpace::index`].
    pub fn levels(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.subsystems.len()];
        for (k, s) in self.subsystems.iter().enumerate().rev() {
            out[k] = index % s.dim;
            index /= s.dim;
        }
        out
    }

    /// Space made of the subsystems at `keep`, in their original order.
    pub fn restrict(&self, keep: &[usize]) -> Result<Self> {
        let keep = normalize_keep(self, keep)?;
        Self::new(keep.iter().map(|&k| self.subsystems[k]).collect())
    }
}

fn normalize_keep(space: &CompositeSpace, keep: &[usize]) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(Error::domain("partial trace needs a nonempty keep set"));
    }
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&bad) = keep.iter().find(|&&k| k >= space.len()) {
        return Err(Error::domain(format!(
            "keep index {bad} out of range for {} subsystems",
            space.len()
        )));
    }
    Ok(keep)
}

/// Square complex matrix acting on a [`CompositeSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: CompositeSpace,
    matrix: DMatrix<C64>,
}

impl Operator {
    pub fn new(space: CompositeSpace, matrix: DMatrix<C64>) -> Result<Self> {
        let d = space.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::domain(format!(
                "matrix is {}x{} but the space has dimension {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { space, matrix })
    }

    pub fn zeros(space: &CompositeSpace) -> Self {
        let d = space.total_dim();
        Self {
            space: space.clone(),
            matrix: DMatrix::zeros(d, d),
        }
    }

    pub fn identity(space: &CompositeSpace) -> Self {
        let d = space.total_dim();
        Self {
            space: space.clone(),
            matrix: DMatrix::identity(d, d),
        }
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn dagger(&self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            space: self.space.clone(),
            matrix: &self.matrix * factor,
        }
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        linalg::is_hermitian(&self.matrix, tol)
    }

    pub fn commutator(&self, other: &Operator) -> Operator {
        &(self * other) - &(other * self)
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operator space mismatch");
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operator space mismatch");
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operator space mismatch");
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

/// Kronecker product of `local` at `position` with identities elsewhere.
pub fn embed(local: &DMatrix<C64>, space: &CompositeSpace, position: usize) -> Result<Operator> {
    let sub = space.subsystem(position)?;
    if local.nrows() != sub.dim() || local.ncols() != sub.dim() {
        return Err(Error::domain(format!(
            "local operator is {}x{} but subsystem {position} has dimension {}",
            local.nrows(),
            local.ncols(),
            sub.dim()
        )));
    }
    let dims = space.dims();
    let before: usize = dims[..position].iter().product();
    let after: usize = dims[position + 1..].iter().product();
    let inner = local.kronecker(&DMatrix::<C64>::identity(after, after));
    let matrix = DMatrix::<C64>::identity(before, before).kronecker(&inner);
    Operator::new(space.clone(), matrix)
}

fn local_annihilation(dim: usize) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(dim, dim);
    for k in 1..dim {
        m[(k - 1, k)] = C64::new((k as f64).sqrt(), 0.0);
    }
    m
}

/// Truncated photon annihilation operator of the boson at `position`.
pub fn boson_annihilation(space: &CompositeSpace, position: usize) -> Result<Operator> {
    let sub = space.subsystem(position)?;
    if sub.kind() != SubsystemKind::Boson {
        return Err(Error::domain(format!("subsystem {position} is not a boson")));
    }
    embed(&local_annihilation(sub.dim()), space, position)
}

/// Lowering operator `|g><e|` of the qubit at `position`.
pub fn qubit_lowering(space: &CompositeSpace, position: usize) -> Result<Operator> {
    let sub = space.subsystem(position)?;
    if sub.kind() != SubsystemKind::Qubit {
        return Err(Error::domain(format!("subsystem {position} is not a qubit")));
    }
    embed(&local_annihilation(2), space, position)
}

/// `c^dagger c` for a lowering/annihilation operator `c`.
pub fn number_of(lowering: &Operator) -> Operator {
    &lowering.dagger() * lowering
}

/// Partial trace of an arbitrary operator, keeping the listed subsystems.
pub fn partial_trace_operator(op: &Operator, keep: &[usize]) -> Result<Operator> {
    let space = op.space();
    let keep = normalize_keep(space, keep)?;
    let reduced_space = space.restrict(&keep)?;
    let dims = space.dims();
    let traced: Vec<usize> = (0..space.len()).filter(|k| !keep.contains(k)).collect();

    let d = space.total_dim();
    // (kept index, traced index) for every full basis index
    let split: Vec<(usize, usize)> = (0..d)
        .map(|i| {
            let lv = space.levels(i);
            let k = keep.iter().fold(0, |acc, &p| acc * dims[p] + lv[p]);
            let t = traced.iter().fold(0, |acc, &p| acc * dims[p] + lv[p]);
            (k, t)
        })
        .collect();

    let rd = reduced_space.total_dim();
    let mut out = DMatrix::<C64>::zeros(rd, rd);
    let m = op.matrix();
    for j in 0..d {
        let (kj, tj) = split[j];
        for i in 0..d {
            let (ki, ti) = split[i];
            if ti == tj {
                out[(ki, kj)] += m[(i, j)];
            }
        }
    }
    Operator::new(reduced_space, out)
}

/// Density matrix: Hermitian, unit trace, positive semidefinite within the
/// configured slack.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: Operator,
}

impl DensityMatrix {
    /// Validates with the default policy.
    pub fn new(op: Operator) -> Result<Self> {
        Self::with_policy(op, &NumericPolicy::default())
    }

    pub fn with_policy(op: Operator, policy: &NumericPolicy) -> Result<Self> {
        Self::validated(op, policy.algebraic_tol, policy.trace_tol, policy.positivity_slack)
    }

    pub(crate) fn validated(
        op: Operator,
        herm_tol: f64,
        trace_tol: f64,
        positivity_slack: f64,
    ) -> Result<Self> {
        if !op.is_hermitian(herm_tol) {
            return Err(Error::domain("density matrix is not Hermitian"));
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > trace_tol || tr.im.abs() > trace_tol {
            return Err(Error::domain(format!("density matrix trace is {tr}, expected 1")));
        }
        let lo = linalg::hermitian_eigenvalues_unchecked(op.matrix())[0];
        if lo < -positivity_slack {
            return Err(Error::domain(format!(
                "density matrix has eigenvalue {lo:.3e} below the positivity slack"
            )));
        }
        Ok(Self { op })
    }

    /// Projector onto a basis state given per-subsystem levels.
    pub fn basis_state(space: &CompositeSpace, levels: &[usize]) -> Result<Self> {
        let i = space.index(levels)?;
        let mut op = Operator::zeros(space);
        op.matrix[(i, i)] = C64::new(1.0, 0.0);
        Ok(Self { op })
    }

    /// `|psi><psi|` for a state vector (normalized here).
    pub fn pure(space: &CompositeSpace, psi: &DVector<C64>) -> Result<Self> {
        if psi.len() != space.total_dim() {
            return Err(Error::domain("state vector length does not match the space"));
        }
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::domain("zero state vector"));
        }
        let psi = psi / C64::new(norm, 0.0);
        let op = Operator::new(space.clone(), &psi * psi.adjoint())?;
        Ok(Self { op })
    }

    pub fn maximally_mixed(space: &CompositeSpace) -> Self {
        let d = space.total_dim() as f64;
        Self {
            op: Operator::identity(space).scale(C64::new(1.0 / d, 0.0)),
        }
    }

    /// Tensor product of density matrices, in argument order.
    pub fn product(factors: &[&DensityMatrix]) -> Result<Self> {
        let (first, rest) = factors
            .split_first()
            .ok_or_else(|| Error::domain("empty product"))?;
        let mut subs = first.space().subsystems().to_vec();
        let mut m = first.matrix().clone();
        for f in rest {
            subs.extend_from_slice(f.space().subsystems());
            m = m.kronecker(f.matrix());
        }
        Ok(Self {
            op: Operator::new(CompositeSpace::new(subs)?, m)?,
        })
    }

    pub fn space(&self) -> &CompositeSpace {
        self.op.space()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        self.op.matrix()
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn into_operator(self) -> Operator {
        self.op
    }

    /// `Re tr(rho O)`.
    pub fn expectation(&self, obs: &Operator) -> f64 {
        assert_eq!(self.space(), obs.space(), "operator space mismatch");
        (self.matrix() * obs.matrix()).trace().re
    }

    pub fn purity(&self) -> f64 {
        (self.matrix() * self.matrix()).trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::hermitian_eigenvalues_unchecked(self.matrix())[0]
    }

    /// Trace distance `||rho - sigma||_1 / 2`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        let diff = self.matrix() - other.matrix();
        0.5 * linalg::hermitian_eigenvalues_unchecked(&diff)
            .iter()
            .map(|v| v.abs())
            .sum::<f64>()
    }
}

/// Reduced density matrix on the kept subsystems.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let op = partial_trace_operator(rho.operator(), keep)?;
    Ok(DensityMatrix { op })
}
