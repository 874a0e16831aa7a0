//! One line per acceptance criterion. Exits non-zero if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use common::*;
use dimerqd::cli::{parse_config, run, RunOptions};
use dimerqd::entanglement::{bell_state, negativity, partial_transpose_first, BellKind, TwoQubitState};
use dimerqd::experiments::*;
use dimerqd::hilbert::{boson_annihilation, qubit_lowering, CompositeSpace, DensityMatrix, Operator, SubsystemSpec};
use dimerqd::linalg::{general_eigenvalues, hermitian_eigenvalues};
use dimerqd::liouvillian::{build_liouvillian, dissipator, Superoperator};
use dimerqd::model::{preset_params, Preset, SystemParams};
use dimerqd::solvers::{
    convergence_scan, evolve, evolve_generators, steady_state, EvolveOptions, Observable, Schedule,
};
use nalgebra::DMatrix;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn max_abs(m: &DMatrix<num_complex::Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn dc901() -> SystemParams {
    preset_params("dimer30_dc901").unwrap()
}

fn with(mut p: SystemParams, path: ParamPath, v: f64) -> SystemParams {
    path.apply(&mut p, v).unwrap();
    p
}

fn bell_negativity() -> Verdict {
    let mut worst_neg: f64 = 0.0;
    let mut worst_spec: f64 = 0.0;
    for kind in BellKind::ALL {
        let b = bell_state(kind);
        worst_neg = worst_neg.max((negativity(&b) - 0.5).abs());
        let mut ev = hermitian_eigenvalues(&partial_transpose_first(&b), 1e-12).unwrap();
        ev.sort_by(f64::total_cmp);
        for (got, want) in ev.iter().zip([-0.5, 0.5, 0.5, 0.5]) {
            worst_spec = worst_spec.max((got - want).abs());
        }
    }
    verdict(
        worst_neg < 1e-10 && worst_spec < 1e-10,
        format!("max |N - 0.5| = {worst_neg:.1e}, max PT spectrum error = {worst_spec:.1e} (tol 1e-10)"),
    )
}

fn phase_detuning_map() -> Verdict {
    let base = dc901();
    let phis = default_phi_grid();
    let deltas = default_delta_grid(&base);
    let dark = base.pump_detuning();
    let r = sweep_phase_detuning(&base, &phis, &deltas).unwrap();
    let (k, v) = r.argmax().unwrap();
    let at = r.coords(k);
    let (dphi, ddelta) = (phis[1] - phis[0], deltas[1] - deltas[0]);
    let phi_ok = (at[0] - PI).abs() <= dphi + 1e-12;
    let delta_ok = (at[1] - dark).abs() <= ddelta + 1e-12;
    let value_ok = (v - 0.103).abs() <= 0.02;
    verdict(
        phi_ok && delta_ok && value_ok && r.failures() == 0,
        format!(
            "{}x{} grid, max {v:.4} at phi = {:.4} (pi ± {dphi:.4}), delta = {:.2} (dark {dark:.2} ± {ddelta:.2}); value tol 0.103 ± 0.02; {} failed points",
            phis.len(),
            deltas.len(),
            at[0],
            at[1],
            r.failures()
        ),
    )
}

fn truncation_convergence() -> Verdict {
    let r = convergence_scan(&dc901(), Observable::Negativity, &[1, 2]).unwrap();
    let d = r.relative_differences[0];
    verdict(
        d < 0.01,
        format!("negativity {:.6} (cutoff 1) vs {:.6} (cutoff 2), relative difference {:.2}% (tol < 1%)", r.values[0], r.values[1], 100.0 * d),
    )
}

fn dephasing_ratio() -> Verdict {
    let base = with(dc901(), ParamPath::DotGamma, 0.0);
    let r = sweep_dephasing(&base, &[0.0, 1.0], &[0.0]).unwrap();
    let (n0, n1) = (r.get(&[0, 0]).unwrap(), r.get(&[0, 1]).unwrap());
    let ratio = n1 / n0;
    verdict((ratio - 0.82).abs() <= 0.05, format!("N(1)/N(0) = {n1:.5}/{n0:.5} = {ratio:.4} (tol 0.82 ± 0.05)"))
}

fn detuning_collapse() -> Verdict {
    let base = dc901();
    let grid = default_qd_detuning_grid();
    let r = sweep_detuning(&base, &grid, &[0.0]).unwrap();
    let at = |x: f64| r.get(&[0, grid.iter().position(|&g| (g - x).abs() < 1e-9).unwrap()]).unwrap();
    let ratio = at(10.0) / at(0.0);
    let far = grid
        .iter()
        .enumerate()
        .filter(|(_, &g)| g.abs() > 40.0)
        .map(|(j, _)| r.get(&[0, j]).unwrap())
        .fold(0.0, f64::max);
    verdict(
        (0.20..=0.30).contains(&ratio) && far < 0.01,
        format!("N(10)/N(0) = {ratio:.4} (tol 0.20-0.30), max N for |Δ| > 40 = {far:.5} (tol < 0.01)"),
    )
}

fn optical_bloch() -> Verdict {
    let space = CompositeSpace::new(vec![SubsystemSpec::qubit()]).unwrap();
    let sm = qubit_lowering(&space, 0).unwrap();
    let mut worst: f64 = 0.0;
    for omega in [0.1, 0.5, 1.0, 5.0, 20.0] {
        for gamma in [0.5, 1.0, 6.6, 37.0, 67.0] {
            let h = (&sm + &sm.dagger()).scale(c(omega));
            let l = Superoperator::hamiltonian(&h).add(&dissipator(&sm, gamma).unwrap()).unwrap();
            let pe = steady_state(&l).unwrap().matrix()[(1, 1)].re;
            let want = omega * omega / (gamma * gamma / 4.0 + 2.0 * omega * omega);
            worst = worst.max((pe - want).abs());
        }
    }
    verdict(worst < 1e-8, format!("5x5 (Ω, γ) grid, max population error {worst:.1e} (tol 1e-8)"))
}

fn jaynes_cummings() -> Verdict {
    let g = 110.0;
    let space = CompositeSpace::new(vec![SubsystemSpec::qubit(), SubsystemSpec::boson(1).unwrap()]).unwrap();
    let sm = qubit_lowering(&space, 0).unwrap();
    let a = boson_annihilation(&space, 1).unwrap();
    let t = &a.dagger() * &sm;
    let l = Superoperator::hamiltonian(&(&t + &t.dagger()).scale(c(g)));
    let t_star = PI * HBAR / (2.0 * g);
    let rho0 = DensityMatrix::basis_state(&space, &[1, 0]).unwrap();
    let traj = evolve_generators(&[(t_star, l)], &rho0, &[0.0, t_star], &EvolveOptions::default()).unwrap();
    let photon = space.index(&[0, 1]).unwrap();
    let err = (traj.states[1].matrix()[(photon, photon)].re - 1.0).abs();
    verdict(
        err < 1e-6 && (t_star - 9.40).abs() < 5e-3,
        format!("transfer time {t_star:.4} ps, photon population error {err:.1e} (tol 1e-6)"),
    )
}

fn dynamics_peaks() -> Verdict {
    let photon_base = with(dc901(), ParamPath::DotGamma, 0.0);
    let fine = dynamics_run(&photon_base, InitialState::PhotonMode1, 200.0, 4001).unwrap();
    let (t_peak, peak) = fine.peak(Observable::Negativity).unwrap();

    let stark_base = with(dc901(), ParamPath::DotGamma, 0.66);
    let stark = stark_protocol(&stark_base, 9.0, DEFAULT_STARK_DETUNING, 3000.0, 3001).unwrap();
    let (t_stark, stark_peak) = stark.peak(Observable::Negativity).unwrap();

    let long = dynamics_run(&photon_base, InitialState::PhotonMode1, 20000.0, 20001).unwrap();
    let period = oscillation_period(&long.times, long.observable(Observable::Negativity).unwrap());
    let omega0 = photon_base.drive.amplitude;
    let expected = 4.0 * PI * HBAR / omega0;
    let period_ok = period.is_some_and(|p| (p - expected).abs() <= 0.15 * expected);

    verdict(
        peak > 0.45 && (stark_peak - 0.2).abs() <= 0.05 && period_ok,
        format!(
            "photon peak {peak:.4} at {t_peak:.2} ps (tol > 0.45); stark peak {stark_peak:.4} at {t_stark:.1} ps (tol 0.2 ± 0.05); period {} ps vs {expected:.0} ps (tol 15%)",
            period.map_or("none".into(), |p| format!("{p:.0}"))
        ),
    )
}

fn property_suites() -> Verdict {
    let mut rng = Lcg(41);
    let mut trace: f64 = 0.0;
    let mut sparse: f64 = 0.0;
    let mut cases: Vec<SystemParams> = Preset::ALL.iter().map(|p| p.params()).collect();
    cases.extend((0..4).map(|k| random_params(&mut rng, 1 + k % 2)));
    for p in &cases {
        let l = build_liouvillian(p).unwrap();
        trace = trace.max(l.trace_defect());
        sparse = sparse.max(max_abs(&(l.to_dense() - oracle_liouvillian(p))));
    }

    let ev = general_eigenvalues(&build_liouvillian(&dc901()).unwrap().to_dense()).unwrap();
    let top = ev.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);

    let p = random_params(&mut rng, 1);
    let lo = oracle_liouvillian(&p);
    let rho0 = DensityMatrix::new(Operator::new(p.space().unwrap(), rng.density(16)).unwrap()).unwrap();
    let times = [0.0, 1.5, 9.4, 45.0, 150.0, 300.0];
    let traj = evolve(&Schedule::constant(p.clone(), 300.0).unwrap(), &rho0, &times).unwrap();
    let mut expm_err: f64 = 0.0;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let want = expm(&(&lo * c(*t))) * vec_of(rho0.matrix());
        expm_err = expm_err.max((vec_of(s.matrix()) - want).iter().map(|z| z.norm()).fold(0.0, f64::max));
    }

    let mut lu: f64 = 0.0;
    for _ in 0..50 {
        let rho = TwoQubitState::from_matrix(rng.density(4)).unwrap();
        let u = kron(&rng.unitary(2), &rng.unitary(2));
        let rotated = TwoQubitState::from_matrix(&u * rho.matrix() * u.adjoint()).unwrap();
        lu = lu.max((negativity(&rho) - negativity(&rotated)).abs());
    }

    let identical = byte_identical_sweep();

    verdict(
        trace < 1e-10 && top <= 1e-9 && sparse < 1e-12 && expm_err < 1e-7 && lu < 1e-10 && identical,
        format!(
            "trace {trace:.1e} (1e-10), max Re λ {top:.1e} (1e-9), sparse-dense {sparse:.1e} (1e-12), evolve-expm {expm_err:.1e} (1e-7), local unitary {lu:.1e} (1e-10), byte-identical sweep {identical}"
        ),
    )
}

fn byte_identical_sweep() -> bool {
    let config = parse_config(
        "command = \"sweep\"\n[system]\npreset = \"dimer30_dc901\"\n[sweep]\n\
         [[sweep.axes]]\nparam = \"phi\"\nstart = 0\nstop = 6.283185307179586\npoints = 7\n\
         [[sweep.axes]]\nparam = \"delta\"\nstart = -60\nstop = 20\npoints = 9\n",
    )
    .unwrap();
    let tmp = tempfile::TempDir::new().unwrap();
    let mut outputs = Vec::new();
    for threads in [None, Some(1)] {
        let dir = tmp.path().join(format!("{threads:?}"));
        let opts = RunOptions {
            output_dir: Some(dir),
            threads,
        };
        let report = run(&config, &opts).unwrap();
        outputs.push(std::fs::read(&report.files[0]).unwrap());
    }
    outputs[0] == outputs[1]
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("Bell-state negativity", bell_negativity),
        ("phase-detuning map maximum", phase_detuning_map),
        ("truncation convergence", truncation_convergence),
        ("dephasing ratio", dephasing_ratio),
        ("QD-detuning collapse", detuning_collapse),
        ("optical-Bloch oracle", optical_bloch),
        ("Jaynes-Cummings transfer", jaynes_cummings),
        ("dynamics peaks", dynamics_peaks),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        if !v.pass {
            failed += 1;
        }
        println!(
            "{} criterion {} ({name}): {} [{:.1} s]",
            if v.pass { "PASS" } else { "FAIL" },
            k + 1,
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
