use serde::{Deserialize, Serialize};

use crate::entanglement;
use crate::error::{Error, Result};
use crate::hilbert::{CompositeSpace, DensityMatrix, SubsystemKind};
use crate::model::{DOT_POSITIONS, MODE_POSITIONS};

/// Scalar functionals of a full-system state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Negativity,
    PopQd1,
    PopQd2,
    PopM1,
    PopM2,
}

impl Observable {
    pub const ALL: [Observable; 5] = [
        Observable::Negativity,
        Observable::PopQd1,
        Observable::PopQd2,
        Observable::PopM1,
        Observable::PopM2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::Negativity => "negativity",
            Observable::PopQd1 => "pop_qd1",
            Observable::PopQd2 => "pop_qd2",
            Observable::PopM1 => "pop_m1",
            Observable::PopM2 => "pop_m2",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|o| o.name() == name)
            .ok_or_else(|| Error::domain(format!("unknown observable `{name}`")))
    }

    pub fn evaluate(self, rho: &DensityMatrix) -> Result<f64> {
        let table = StandardObservables::new(rho.space())?;
        Ok(table.evaluate(self, rho.matrix()))
    }
}

/// Precomputed diagonal occupation numbers for the `(QD1, QD2, mode1, mode2)`
/// basis.
#[derive(Debug, Clone)]
pub struct StandardObservables {
    occupations: [Vec<f64>; 4],
}

impl StandardObservables {
    pub fn new(space: &CompositeSpace) -> Result<Self> {
        let kinds: Vec<SubsystemKind> = space.subsystems().iter().map(|s| s.kind()).collect();
        if kinds != [SubsystemKind::Qubit, SubsystemKind::Qubit, SubsystemKind::Boson, SubsystemKind::Boson] {
            return Err(Error::domain("observables need a (qubit, qubit, boson, boson) space"));
        }
        let d = space.total_dim();
        let positions = [DOT_POSITIONS[0], DOT_POSITIONS[1], MODE_POSITIONS[0], MODE_POSITIONS[1]];
        let occupations = positions.map(|p| (0..d).map(|i| space.levels(i)[p] as f64).collect());
        Ok(Self { occupations })
    }

    /// Works on any matrix with the right dimension; negativity is evaluated
    /// on the reduced dot state without revalidating it.
    pub fn evaluate(&self, obs: Observable, m: &nalgebra::DMatrix<num_complex::Complex64>) -> f64 {
        let occ = |k: usize| -> f64 {
            self.occupations[k]
                .iter()
                .enumerate()
                .map(|(i, n)| n * m[(i, i)].re)
                .sum()
        };
        match obs {
            Observable::Negativity => {
                // dots are the two most significant factors
                let nb = m.nrows() / 4;
                let mut red = nalgebra::DMatrix::zeros(4, 4);
                for a in 0..4 {
                    for b in 0..4 {
                        let mut acc = num_complex::Complex64::new(0.0, 0.0);
                        for t in 0..nb {
                            acc += m[(a * nb + t, b * nb + t)];
                        }
                        red[(a, b)] = acc;
                    }
                }
                let pt = entanglement::partial_transpose_first_matrix(&red);
                let floor = crate::numeric::NumericPolicy::default().eigen_noise_floor;
                crate::linalg::hermitian_eigenvalues_unchecked(&pt)
                    .into_iter()
                    .filter(|&l| l < -floor)
                    .sum::<f64>()
                    .abs()
            }
            Observable::PopQd1 => occ(0),
            Observable::PopQd2 => occ(1),
            Observable::PopM1 => occ(2),
            Observable::PopM2 => occ(3),
        }
    }
}
