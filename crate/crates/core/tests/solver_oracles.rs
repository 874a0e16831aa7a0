mod common;

use common::*;
use dimerqd::hilbert::{boson_annihilation, qubit_lowering, CompositeSpace, DensityMatrix, SubsystemSpec};
use dimerqd::liouvillian::{build_liouvillian, dissipator, Superoperator};
use dimerqd::linalg::general_eigenvalues;
use dimerqd::model::preset_params;
use dimerqd::solvers::{
    convergence_scan, evolve, evolve_generators, steady_state, EvolveOptions, Observable, Schedule,
};
use dimerqd::Error;

/// Closed-form excited population of a resonantly driven, damped two-level
/// system with `H = Ω(σ⁺ + σ⁻)`.
fn bloch_population(omega: f64, gamma: f64) -> f64 {
    omega * omega / (gamma * gamma / 4.0 + 2.0 * omega * omega)
}

#[test]
fn optical_bloch_grid() {
    let space = CompositeSpace::new(vec![SubsystemSpec::qubit()]).unwrap();
    let sm = qubit_lowering(&space, 0).unwrap();
    for omega in [0.1, 0.5, 1.0, 5.0, 20.0] {
        for gamma in [0.5, 1.0, 6.6, 37.0, 67.0] {
            let h = (&sm + &sm.dagger()).scale(c(omega));
            let l = Superoperator::hamiltonian(&h).add(&dissipator(&sm, gamma).unwrap()).unwrap();
            let pe = steady_state(&l).unwrap().matrix()[(1, 1)].re;
            let want = bloch_population(omega, gamma);
            assert!((pe - want).abs() < 1e-8, "Ω={omega} γ={gamma}: {pe} vs {want}");
        }
    }
}

fn jc_pair(g: f64) -> (CompositeSpace, Superoperator) {
    let space = CompositeSpace::new(vec![SubsystemSpec::qubit(), SubsystemSpec::boson(1).unwrap()]).unwrap();
    let sm = qubit_lowering(&space, 0).unwrap();
    let a = boson_annihilation(&space, 1).unwrap();
    let t = &a.dagger() * &sm;
    let h = (&t + &t.dagger()).scale(c(g));
    (space.clone(), Superoperator::hamiltonian(&h))
}

#[test]
fn jaynes_cummings_half_cycle() {
    let g = 110.0;
    let (space, l) = jc_pair(g);
    let t_star = std::f64::consts::PI * HBAR / (2.0 * g);
    assert!((t_star - 9.40).abs() < 5e-3);
    let rho0 = DensityMatrix::basis_state(&space, &[1, 0]).unwrap();
    let grid: Vec<f64> = (0..=40).map(|k| t_star * k as f64 / 40.0).collect();
    let traj = evolve_generators(&[(t_star, l)], &rho0, &grid, &EvolveOptions::default()).unwrap();
    let photon = space.index(&[0, 1]).unwrap();
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let want = (g * t / HBAR).sin().powi(2);
        assert!((s.matrix()[(photon, photon)].re - want).abs() < 1e-6);
    }
    let last = traj.states.last().unwrap();
    assert!((last.matrix()[(photon, photon)].re - 1.0).abs() < 1e-6);
}

#[test]
fn zero_generator_keeps_state() {
    let p = preset_params("dimer30_dc901").unwrap();
    let space = p.space().unwrap();
    let mut rng = Lcg(9);
    let rho0 = DensityMatrix::new(dimerqd::hilbert::Operator::new(space.clone(), rng.density(16)).unwrap()).unwrap();
    let traj = evolve_generators(
        &[(50.0, Superoperator::zeros(&space))],
        &rho0,
        &[0.0, 10.0, 50.0],
        &EvolveOptions::default(),
    )
    .unwrap();
    for s in &traj.states {
        assert_eq!(s, &rho0);
    }
}

#[test]
fn decaying_dot_population_is_exponential() {
    let mut p = preset_params("dimer30_dc901").unwrap();
    p.drive.amplitude = 0.0;
    p.coupling = dimerqd::model::CouplingMatrix([[c(0.0); 2]; 2]);
    p.dots[0].gamma = 6.6;
    let rho0 = DensityMatrix::basis_state(&p.space().unwrap(), &[1, 0, 0, 0]).unwrap();
    let grid: Vec<f64> = (0..=10).map(|k| 50.0 * k as f64).collect();
    let traj = evolve(&Schedule::constant(p, 500.0).unwrap(), &rho0, &grid).unwrap();
    let pop = traj.observable(Observable::PopQd1).unwrap();
    for (t, v) in grid.iter().zip(pop) {
        assert!((v - (-6.6 * t / HBAR).exp()).abs() < 1e-6);
    }
}

#[test]
fn undriven_lossless_dimer_has_degenerate_kernel() {
    let mut p = preset_params("dimer30_dc901").unwrap();
    p.drive.amplitude = 0.0;
    p.modes[0].gamma = 0.0;
    p.modes[1].gamma = 0.0;
    match steady_state(&build_liouvillian(&p).unwrap()) {
        Err(Error::DegenerateKernel { kernel_dim }) => assert!(kernel_dim >= 2),
        other => panic!("expected a degenerate kernel, got {other:?}"),
    }
}

#[test]
fn steady_state_is_the_long_time_limit() {
    let p = preset_params("dimer30_dc901").unwrap();
    let l = build_liouvillian(&p).unwrap();
    let rho_ss = steady_state(&l).unwrap();
    // slowest nonzero relaxation rate sets the horizon
    let ev = general_eigenvalues(&l.to_dense()).unwrap();
    let slowest = ev
        .iter()
        .filter(|z| z.norm() > 1e-9)
        .map(|z| -z.re)
        .fold(f64::INFINITY, f64::min);
    let horizon = 50.0 / slowest;
    let rho0 = DensityMatrix::basis_state(&p.space().unwrap(), &[0, 0, 0, 0]).unwrap();
    let traj = evolve(&Schedule::constant(p, horizon).unwrap(), &rho0, &[horizon]).unwrap();
    let d = traj.final_state.trace_distance(&rho_ss);
    assert!(d < 1e-5, "trace distance {d:e} after {horizon} ps");
}

#[test]
fn preset_truncation_scan() {
    let p = preset_params("dimer30_dc901").unwrap();
    let r = convergence_scan(&p, Observable::Negativity, &[1, 2]).unwrap();
    assert_eq!(r.values.len(), 2);
    assert!(r.values[0] > 0.05);
    // the relative change shrinks as the drive weakens, a sign the
    // difference comes from two-photon states
    let mut weak = p.clone();
    weak.drive.amplitude = 0.25;
    let rw = convergence_scan(&weak, Observable::Negativity, &[1, 2]).unwrap();
    assert!(rw.relative_differences[0] < r.relative_differences[0]);
}

#[test]
fn zero_drive_gives_zero_at_every_cutoff() {
    let mut p = preset_params("dimer30_dc901").unwrap();
    p.drive.amplitude = 0.0;
    for o in Observable::ALL {
        let r = convergence_scan(&p, o, &[1, 2]).unwrap();
        assert!(r.values.iter().all(|&v| v.abs() < 1e-12), "{r:?}");
        assert!(r.converged());
    }
}

#[test]
fn strong_drive_not_converged_at_cutoff_one() {
    // at 50 μeV the dots are no longer entangled at either cutoff, so the
    // truncation error shows in the photon number
    let mut p = preset_params("dimer30_dc901").unwrap();
    p.drive.amplitude = 50.0;
    let r = convergence_scan(&p, Observable::PopM1, &[1, 2]).unwrap();
    assert_eq!(r.converged_at(0), Some(false), "{r:?}");
    p.drive.amplitude = 20.0;
    let r = convergence_scan(&p, Observable::Negativity, &[1, 2]).unwrap();
    assert_eq!(r.converged_at(0), Some(false), "{r:?}");
}
