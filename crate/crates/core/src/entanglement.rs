//! Two-qubit negativity via the partial transpose, Bell states, and the
//! reduction of a full `(QD1, QD2, mode1, mode2)` state to the dots.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{partial_trace, CompositeSpace, DensityMatrix, Operator, SubsystemKind, SubsystemSpec};
use crate::linalg;
use crate::model::DOT_POSITIONS;
use crate::numeric::NumericPolicy;

/// Density matrix of two qubits in the basis `|00>, |01>, |10>, |11>`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState(DensityMatrix);

pub fn two_qubit_space() -> CompositeSpace {
    CompositeSpace::new(vec![SubsystemSpec::qubit(), SubsystemSpec::qubit()]).expect("static space")
}

impl TwoQubitState {
    pub fn new(rho: DensityMatrix) -> Result<Self> {
        let subs = rho.space().subsystems();
        if subs.len() != 2 || subs.iter().any(|s| s.kind() != SubsystemKind::Qubit) {
            return Err(Error::domain("a two-qubit state needs a (qubit, qubit) space"));
        }
        Ok(Self(rho))
    }

    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        Self::new(DensityMatrix::new(Operator::new(two_qubit_space(), m)?)?)
    }

    pub fn density(&self) -> &DensityMatrix {
        &self.0
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        self.0.matrix()
    }
}

/// `<a₁a₂|ρ^{T1}|a₁'a₂'> = <a₁'a₂|ρ|a₁a₂'>`.
pub fn partial_transpose_first(rho: &TwoQubitState) -> DMatrix<C64> {
    partial_transpose_first_matrix(rho.matrix())
}

pub(crate) fn partial_transpose_first_matrix(m: &DMatrix<C64>) -> DMatrix<C64> {
    DMatrix::from_fn(4, 4, |r, c| {
        let (a1, a2) = (r / 2, r % 2);
        let (b1, b2) = (c / 2, c % 2);
        m[(b1 * 2 + a2, a1 * 2 + b2)]
    })
}

/// Transpose with respect to the second qubit.
pub fn partial_transpose_second(rho: &TwoQubitState) -> DMatrix<C64> {
    let m = rho.matrix();
    DMatrix::from_fn(4, 4, |r, c| {
        let (a1, a2) = (r / 2, r % 2);
        let (b1, b2) = (c / 2, c % 2);
        m[(a1 * 2 + b2, b1 * 2 + a2)]
    })
}

fn negativity_of_pt(pt: &DMatrix<C64>, noise_floor: f64) -> f64 {
    let sum: f64 = linalg::hermitian_eigenvalues_unchecked(pt)
        .into_iter()
        .filter(|&l| l < -noise_floor)
        .sum();
    sum.abs()
}

/// `|Σ negative eigenvalues of ρ^{T1}|`, in `[0, 0.5]`.
pub fn negativity(rho: &TwoQubitState) -> f64 {
    negativity_with(rho, &NumericPolicy::default())
}

pub fn negativity_with(rho: &TwoQubitState, policy: &NumericPolicy) -> f64 {
    negativity_of_pt(&partial_transpose_first(rho), policy.eigen_noise_floor)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [BellKind::PhiPlus, BellKind::PhiMinus, BellKind::PsiPlus, BellKind::PsiMinus];
}

pub fn bell_state(kind: BellKind) -> TwoQubitState {
    let (i, j, sign) = match kind {
        BellKind::PhiPlus => (0, 3, 1.0),
        BellKind::PhiMinus => (0, 3, -1.0),
        BellKind::PsiPlus => (1, 2, 1.0),
        BellKind::PsiMinus => (1, 2, -1.0),
    };
    let mut m = DMatrix::<C64>::zeros(4, 4);
    m[(i, i)] = C64::new(0.5, 0.0);
    m[(j, j)] = C64::new(0.5, 0.0);
    m[(i, j)] = C64::new(0.5 * sign, 0.0);
    m[(j, i)] = C64::new(0.5 * sign, 0.0);
    TwoQubitState::from_matrix(m).expect("Bell states are valid")
}

/// Bell state vector, for building larger pure states.
pub fn bell_vector(kind: BellKind) -> DVector<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = DVector::<C64>::zeros(4);
    match kind {
        BellKind::PhiPlus | BellKind::PhiMinus => {
            v[0] = C64::new(s, 0.0);
            v[3] = C64::new(if kind == BellKind::PhiPlus { s } else { -s }, 0.0);
        }
        BellKind::PsiPlus | BellKind::PsiMinus => {
            v[1] = C64::new(s, 0.0);
            v[2] = C64::new(if kind == BellKind::PsiPlus { s } else { -s }, 0.0);
        }
    }
    v
}

/// Reduced state of the two dots of a `(qubit, qubit, boson, boson)` state.
pub fn reduce_to_dots(rho_full: &DensityMatrix) -> Result<TwoQubitState> {
    let kinds: Vec<SubsystemKind> = rho_full.space().subsystems().iter().map(|s| s.kind()).collect();
    if kinds != [SubsystemKind::Qubit, SubsystemKind::Qubit, SubsystemKind::Boson, SubsystemKind::Boson] {
        return Err(Error::domain("expected a (qubit, qubit, boson, boson) space"));
    }
    TwoQubitState::new(partial_trace(rho_full, &DOT_POSITIONS)?)
}

/// Negativity of the dots after tracing out both modes.
pub fn qd_negativity(rho_full: &DensityMatrix) -> Result<f64> {
    Ok(negativity(&reduce_to_dots(rho_full)?))
}
