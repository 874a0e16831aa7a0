mod common;

use common::*;
use dimerqd::entanglement::{
    bell_state, negativity, partial_transpose_first, partial_transpose_second, BellKind, TwoQubitState,
};
use dimerqd::linalg::hermitian_eigenvalues;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

/// Monic characteristic polynomial coefficients `[c0, c1, .., c_n]` by
/// Faddeev–LeVerrier.
fn char_poly(a: &DMatrix<C64>) -> Vec<C64> {
    let n = a.nrows();
    let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
    coeffs[n] = c(1.0);
    let id = DMatrix::<C64>::identity(n, n);
    let mut m = DMatrix::<C64>::zeros(n, n);
    for k in 1..=n {
        m = a * &m + &id * coeffs[n - k + 1];
        coeffs[n - k] = -(a * &m).trace() / c(k as f64);
    }
    coeffs
}

fn product(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

#[test]
fn bell_partial_transpose_spectrum_and_polynomial() {
    // (λ − ½)³(λ + ½) = λ⁴ − λ³ + λ/4 − 1/16
    let want = [-0.0625, 0.25, 0.0, -1.0, 1.0];
    for kind in BellKind::ALL {
        let pt = partial_transpose_first(&bell_state(kind));
        let ev = hermitian_eigenvalues(&pt, 1e-12).unwrap();
        for (got, w) in ev.iter().zip([-0.5, 0.5, 0.5, 0.5]) {
            assert!((got - w).abs() < 1e-10);
        }
        for (got, w) in char_poly(&pt).iter().zip(want) {
            assert!((got - c(w)).norm() < 1e-12, "{kind:?}");
        }
        assert!((negativity(&bell_state(kind)) - 0.5).abs() < 1e-10);
    }
}

#[test]
fn product_states_transpose_factorwise() {
    let mut rng = Lcg(41);
    for _ in 0..10 {
        let (a, b) = (rng.density(2), rng.density(2));
        let rho = TwoQubitState::from_matrix(product(&a, &b)).unwrap();
        let pt = partial_transpose_first(&rho);
        assert!((pt - product(&a.transpose(), &b)).norm() < 1e-14);
        assert_eq!(negativity(&rho), 0.0);
    }
}

#[test]
fn separable_mixtures_have_zero_negativity() {
    let mut rng = Lcg(43);
    for _ in 0..20 {
        let mut m = DMatrix::<C64>::zeros(4, 4);
        let weights: Vec<f64> = (0..4).map(|_| rng.uniform()).collect();
        let total: f64 = weights.iter().sum();
        for w in weights {
            m += product(&rng.density(2), &rng.density(2)) * c(w / total);
        }
        assert_eq!(negativity(&TwoQubitState::from_matrix(m).unwrap()), 0.0);
    }
}

fn random_state(rng: &mut Lcg) -> TwoQubitState {
    // mix a random pure state with a random mixed state to cover both
    let u = rng.unitary(4);
    let psi = u.column(0).into_owned();
    let pure = &psi * psi.adjoint();
    let w = rng.uniform();
    TwoQubitState::from_matrix(pure * c(w) + rng.density(4) * c(1.0 - w)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn local_unitaries_leave_negativity_unchanged(seed in any::<u64>()) {
        let mut rng = Lcg(seed);
        let rho = random_state(&mut rng);
        let u = product(&rng.unitary(2), &rng.unitary(2));
        let rotated = TwoQubitState::from_matrix(&u * rho.matrix() * u.adjoint()).unwrap();
        prop_assert!((negativity(&rho) - negativity(&rotated)).abs() < 1e-10);
    }

    #[test]
    fn negativity_is_bounded_and_symmetric(seed in any::<u64>()) {
        let mut rng = Lcg(seed);
        let rho = random_state(&mut rng);
        let n = negativity(&rho);
        prop_assert!((0.0..=0.5 + 1e-12).contains(&n));
        let n2: f64 = hermitian_eigenvalues(&partial_transpose_second(&rho), 1e-10)
            .unwrap()
            .into_iter()
            .filter(|&l| l < -1e-12)
            .sum::<f64>()
            .abs();
        prop_assert!((n - n2).abs() < 1e-10);
    }
}
