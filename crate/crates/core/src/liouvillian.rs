//! Column-stacking vectorization and sparse Lindblad generators.
//!
//! `vec(ρ)[i + j·D] = ρ[i, j]`, so `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`. Generators
//! act on vectorized density matrices and are expressed in ps⁻¹: every
//! ħ-scaled energy or rate passes through [`per_ps`] exactly once, at
//! assembly.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::{CompositeSpace, DensityMatrix, Operator, SubsystemKind};
use crate::model::{self, SystemOperators, SystemParams, HBAR_UEV_PS};
use crate::sparse::{CsrMatrix, Triplets};

/// μeV → ps⁻¹.
fn per_ps(energy: f64) -> f64 {
    energy / HBAR_UEV_PS
}

pub fn vectorize_matrix(m: &DMatrix<C64>) -> Vec<C64> {
    // nalgebra storage is column-major already
    m.as_slice().to_vec()
}

pub fn devectorize_matrix(v: &[C64]) -> Result<DMatrix<C64>> {
    let d = (v.len() as f64).sqrt().round() as usize;
    if d * d != v.len() || d == 0 {
        return Err(Error::domain(format!(
            "vector of length {} is not a vectorized square matrix",
            v.len()
        )));
    }
    Ok(DMatrix::from_column_slice(d, d, v))
}

/// A vectorized density matrix (or any operator) on a known space.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorizedState {
    space: CompositeSpace,
    data: Vec<C64>,
}

impl VectorizedState {
    pub fn new(space: CompositeSpace, data: Vec<C64>) -> Result<Self> {
        let d = space.total_dim();
        if data.len() != d * d {
            return Err(Error::domain(format!(
                "vector length {} does not match space dimension {d}",
                data.len()
            )));
        }
        Ok(Self { space, data })
    }

    pub fn from_density(rho: &DensityMatrix) -> Self {
        Self {
            space: rho.space().clone(),
            data: vectorize_matrix(rho.matrix()),
        }
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn to_operator(&self) -> Operator {
        let d = self.space.total_dim();
        Operator::new(self.space.clone(), DMatrix::from_column_slice(d, d, &self.data))
            .expect("length checked at construction")
    }

    /// `<<I|vec(ρ)>>`.
    pub fn trace(&self) -> C64 {
        let d = self.space.total_dim();
        (0..d).map(|i| self.data[i + i * d]).sum()
    }
}

/// Vectorized identity `<<I|`, the trace functional.
pub fn trace_functional(space: &CompositeSpace) -> Vec<C64> {
    let d = space.total_dim();
    let mut v = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        v[i + i * d] = C64::new(1.0, 0.0);
    }
    v
}

/// Sparse generator acting on column-stacked density matrices, in ps⁻¹.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    space: CompositeSpace,
    matrix: CsrMatrix,
}

impl Superoperator {
    pub fn zeros(space: &CompositeSpace) -> Self {
        let n = space.total_dim().pow(2);
        Self {
            space: space.clone(),
            matrix: CsrMatrix::zeros(n, n),
        }
    }

    fn from_triplets(space: &CompositeSpace, t: Triplets) -> Self {
        Self {
            space: space.clone(),
            matrix: t.into_csr(),
        }
    }

    /// `-(i/ħ)[H, ·]` for a Hamiltonian in μeV.
    pub fn hamiltonian(h: &Operator) -> Self {
        let space = h.space();
        let mut t = new_triplets(space);
        push_hamiltonian(&mut t, h.matrix());
        Self::from_triplets(space, t)
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    /// Side length `D²` of the generator.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.matrix.mul_vec(v)
    }

    pub fn apply_into(&self, v: &[C64], out: &mut [C64]) {
        self.matrix.mul_vec_into(v, out)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        self.matrix.to_dense()
    }

    pub fn add(&self, other: &Superoperator) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::domain("superoperators act on different spaces"));
        }
        Ok(Self {
            space: self.space.clone(),
            matrix: self.matrix.add(&other.matrix),
        })
    }

    /// Largest `|<<I|L>>_k|`; zero for a trace-preserving generator.
    pub fn trace_defect(&self) -> f64 {
        self.matrix
            .left_mul_vec(&trace_functional(&self.space))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

fn new_triplets(space: &CompositeSpace) -> Triplets {
    let n = space.total_dim().pow(2);
    Triplets::new(n, n)
}

/// Adds `factor · (A ⊗ B)` over the nonzero entries of both factors.
fn push_kron(t: &mut Triplets, a: &DMatrix<C64>, b: &DMatrix<C64>, factor: C64) {
    let nb = b.nrows();
    let nz_b: Vec<(usize, usize, C64)> = nonzeros(b).collect();
    for (ia, ja, va) in nonzeros(a) {
        let va = va * factor;
        for &(ib, jb, vb) in &nz_b {
            t.push(ia * nb + ib, ja * nb + jb, va * vb);
        }
    }
}

fn nonzeros(m: &DMatrix<C64>) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
    let n = m.nrows();
    m.iter()
        .enumerate()
        .filter(|(_, v)| **v != C64::new(0.0, 0.0))
        .map(move |(k, v)| (k % n, k / n, *v))
}

fn push_hamiltonian(t: &mut Triplets, h: &DMatrix<C64>) {
    let d = h.nrows();
    let id = DMatrix::<C64>::identity(d, d);
    let coef = C64::new(0.0, -per_ps(1.0));
    push_kron(t, &id, h, coef);
    push_kron(t, &h.transpose(), &id, -coef);
}

fn push_dissipator(t: &mut Triplets, c: &DMatrix<C64>, rate: f64) {
    if rate == 0.0 {
        return;
    }
    let d = c.nrows();
    let id = DMatrix::<C64>::identity(d, d);
    let k = per_ps(rate);
    let cdc = c.adjoint() * c;
    push_kron(t, &c.map(|z| z.conj()), c, C64::new(k, 0.0));
    push_kron(t, &id, &cdc, C64::new(-0.5 * k, 0.0));
    push_kron(t, &cdc.transpose(), &id, C64::new(-0.5 * k, 0.0));
}

fn check_rate(rate: f64) -> Result<()> {
    if !rate.is_finite() || rate < 0.0 {
        return Err(Error::domain(format!("rate must be finite and nonnegative, got {rate}")));
    }
    Ok(())
}

/// `rate · (CρC† − C†Cρ/2 − ρC†C/2)` with `rate` in μeV.
pub fn dissipator(jump: &Operator, rate: f64) -> Result<Superoperator> {
    check_rate(rate)?;
    let space = jump.space();
    let mut t = new_triplets(space);
    push_dissipator(&mut t, jump.matrix(), rate);
    Ok(Superoperator::from_triplets(space, t))
}

/// Position of the `k`-th subsystem of the given kind.
fn nth_of_kind(space: &CompositeSpace, kind: SubsystemKind, k: usize) -> Result<usize> {
    space
        .subsystems()
        .iter()
        .enumerate()
        .filter(|(_, s)| s.kind() == kind)
        .nth(k)
        .map(|(pos, _)| pos)
        .ok_or_else(|| Error::domain(format!("space has no {kind:?} number {k}")))
}

/// Pure dephasing of dot `dot` (the `dot`-th qubit), jump operator `σ⁺σ⁻`.
pub fn dephasing_dissipator(dot: usize, rate: f64, space: &CompositeSpace) -> Result<Superoperator> {
    let pos = nth_of_kind(space, SubsystemKind::Qubit, dot)?;
    let sm = crate::hilbert::qubit_lowering(space, pos)?;
    dissipator(&crate::hilbert::number_of(&sm), rate)
}

/// Incoherent pumping of mode `mode` (the `mode`-th boson), jump operator `a†`.
pub fn incoherent_pump_dissipator(mode: usize, rate: f64, space: &CompositeSpace) -> Result<Superoperator> {
    let pos = nth_of_kind(space, SubsystemKind::Boson, mode)?;
    let a = crate::hilbert::boson_annihilation(space, pos)?;
    dissipator(&a.dagger(), rate)
}

/// Full rotating-frame generator: coherent part plus photon loss, incoherent
/// mode pumping, exciton decay and pure dephasing for both modes and dots.
pub fn build_liouvillian(params: &SystemParams) -> Result<Superoperator> {
    let space = params.space()?;
    let h = model::build_effective_hamiltonian(params, &space)?;
    let ops = SystemOperators::new(&space)?;
    let mut t = new_triplets(&space);
    push_hamiltonian(&mut t, h.matrix());
    for m in 0..2 {
        let a = ops.a[m].matrix();
        push_dissipator(&mut t, a, params.modes[m].gamma);
        push_dissipator(&mut t, &a.adjoint(), params.modes[m].pump);
    }
    for n in 0..2 {
        let sm = ops.sigma[n].matrix();
        push_dissipator(&mut t, sm, params.dots[n].gamma);
        push_dissipator(&mut t, &(sm.adjoint() * sm), params.dots[n].dephasing);
    }
    Ok(Superoperator::from_triplets(&space, t))
}
