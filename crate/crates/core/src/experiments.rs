//! Parameter sweeps over steady states and the time-domain protocols.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::DensityMatrix;
use crate::liouvillian::build_liouvillian;
use crate::model::SystemParams;
use crate::numeric::NumericPolicy;
use crate::solvers::{
    evolve_with, steady_state_with, EvolveOptions, Observable, Schedule, Segment, Trajectory,
};

/// Exciton loss rates (μeV) swept as a family of curves.
pub const DOT_GAMMA_FAMILY: [f64; 4] = [0.0, 0.66, 3.3, 6.6];

/// Mode linewidth pairs `(γ₁, γ₂)` addressed by [`ParamPath::LinewidthSet`].
pub const LINEWIDTH_SETS: [(f64, f64); 2] = [(67.0, 37.0), (17.0, 16.0)];

/// Detuning of dot 2 before the switch in the Stark protocol, μeV.
pub const DEFAULT_STARK_DETUNING: f64 = 3000.0;

/// `n` evenly spaced points on `[a, b]`, endpoints included.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|k| if k == n - 1 { b } else { a + (b - a) * k as f64 / (n - 1) as f64 })
            .collect(),
    }
}

pub fn default_phi_grid() -> Vec<f64> {
    linspace(0.0, 2.0 * PI, 61)
}

/// `[-3g, 3g]` at 121 points, with `g` the largest coupling magnitude.
pub fn default_delta_grid(base: &SystemParams) -> Vec<f64> {
    let g = base.coupling.max_abs();
    linspace(-3.0 * g, 3.0 * g, 121)
}

pub fn default_qd_detuning_grid() -> Vec<f64> {
    linspace(-50.0, 50.0, 101)
}

pub fn default_dephasing_grid() -> Vec<f64> {
    linspace(0.0, 5.0, 51)
}

/// A scalar knob of [`SystemParams`] that a sweep axis can set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamPath {
    /// `φ₁` with `φ₂ = 0`, rad.
    Phi,
    /// Pump detuning from mode 1.
    Delta,
    /// `ω⁽²⁾ − ω⁽¹⁾`.
    QdDetuning,
    /// Pure dephasing of both dots.
    Dephasing,
    /// Exciton loss of both dots.
    DotGamma,
    /// `ω₂ − ω₁`.
    Splitting,
    Mode1Gamma,
    Mode2Gamma,
    DriveAmplitude,
    /// Incoherent pump of both modes.
    ModePump,
    /// Index into [`LINEWIDTH_SETS`].
    LinewidthSet,
}

impl ParamPath {
    pub const ALL: [ParamPath; 11] = [
        ParamPath::Phi,
        ParamPath::Delta,
        ParamPath::QdDetuning,
        ParamPath::Dephasing,
        ParamPath::DotGamma,
        ParamPath::Splitting,
        ParamPath::Mode1Gamma,
        ParamPath::Mode2Gamma,
        ParamPath::DriveAmplitude,
        ParamPath::ModePump,
        ParamPath::LinewidthSet,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ParamPath::Phi => "phi",
            ParamPath::Delta => "delta",
            ParamPath::QdDetuning => "qd_detuning",
            ParamPath::Dephasing => "dephasing",
            ParamPath::DotGamma => "dot_gamma",
            ParamPath::Splitting => "splitting",
            ParamPath::Mode1Gamma => "mode1_gamma",
            ParamPath::Mode2Gamma => "mode2_gamma",
            ParamPath::DriveAmplitude => "drive_amplitude",
            ParamPath::ModePump => "mode_pump",
            ParamPath::LinewidthSet => "linewidth_set",
        }
    }

    /// Unit suffix for CSV headers.
    pub fn unit(self) -> &'static str {
        match self {
            ParamPath::Phi => "rad",
            ParamPath::LinewidthSet => "index",
            _ => "ueV",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|p| p.name()).collect();
            Error::domain(format!("unknown sweep parameter `{name}` (expected one of: {})", names.join(", ")))
        })
    }

    pub fn apply(self, p: &mut SystemParams, v: f64) -> Result<()> {
        if !v.is_finite() {
            return Err(Error::domain(format!("{} value must be finite", self.name())));
        }
        match self {
            ParamPath::Phi => {
                p.drive.phase1 = v;
                p.drive.phase2 = 0.0;
            }
            ParamPath::Delta => p.set_pump_detuning(v),
            ParamPath::QdDetuning => p.set_dot_detuning(v),
            ParamPath::Dephasing => p.dots.iter_mut().for_each(|d| d.dephasing = v),
            ParamPath::DotGamma => p.dots.iter_mut().for_each(|d| d.gamma = v),
            ParamPath::Splitting => p.set_splitting(v),
            ParamPath::Mode1Gamma => p.modes[0].gamma = v,
            ParamPath::Mode2Gamma => p.modes[1].gamma = v,
            ParamPath::DriveAmplitude => p.drive.amplitude = v,
            ParamPath::ModePump => p.modes.iter_mut().for_each(|m| m.pump = v),
            ParamPath::LinewidthSet => {
                let k = v as usize;
                if v < 0.0 || v.fract() != 0.0 || k >= LINEWIDTH_SETS.len() {
                    return Err(Error::domain(format!(
                        "linewidth_set must be an integer in 0..{}, got {v}",
                        LINEWIDTH_SETS.len()
                    )));
                }
                let (g1, g2) = LINEWIDTH_SETS[k];
                p.modes[0].gamma = g1;
                p.modes[1].gamma = g2;
            }
        }
        Ok(())
    }
}

/// How the pump frequency follows the swept parameters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DrivePolicy {
    /// Keep the pump of the base parameters (or the swept `delta`).
    #[default]
    Fixed,
    /// Re-tune the pump onto the dark state at every point.
    DarkState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub path: ParamPath,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(path: ParamPath, values: Vec<f64>) -> Self {
        Self { path, values }
    }
}

fn flat_coords(axes: &[Axis], k: usize) -> Vec<f64> {
    let mut rem = k;
    let mut out = vec![0.0; axes.len()];
    for (ax, a) in axes.iter().enumerate().rev() {
        out[ax] = a.values[rem % a.values.len()];
        rem /= a.values.len();
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: SystemParams,
    /// One or two axes; the last varies fastest.
    pub axes: Vec<Axis>,
    pub observable: Observable,
    pub drive: DrivePolicy,
}

impl SweepSpec {
    pub fn new(base: SystemParams, axes: Vec<Axis>) -> Self {
        Self {
            base,
            axes,
            observable: Observable::Negativity,
            drive: DrivePolicy::Fixed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::domain("a sweep needs one or two axes"));
        }
        if self.axes.len() == 2 && self.axes[0].path == self.axes[1].path {
            return Err(Error::domain("sweep axes must be distinct"));
        }
        for a in &self.axes {
            if a.values.is_empty() {
                return Err(Error::domain(format!("{} grid is empty", a.path.name())));
            }
            if a.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::domain(format!("{} grid has non-finite values", a.path.name())));
            }
        }
        Ok(())
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.values.len()).collect()
    }

    pub fn len(&self) -> usize {
        self.shape().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Axis values of flat (row-major) point `k`.
    pub fn coords(&self, k: usize) -> Vec<f64> {
        flat_coords(&self.axes, k)
    }

    /// Parameters at flat point `k`, with the drive policy applied.
    pub fn params_at(&self, k: usize) -> Result<SystemParams> {
        let mut p = self.base.clone();
        for (axis, v) in self.axes.iter().zip(self.coords(k)) {
            axis.path.apply(&mut p, v)?;
        }
        if self.drive == DrivePolicy::DarkState {
            p.drive_at_dark_state()?;
        }
        p.validate()?;
        Ok(p)
    }
}

/// Outcome of one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    /// NaN when the point failed.
    pub value: f64,
    /// `||L vec(rho)||`, NaN when the point failed.
    pub residual: f64,
    pub converged: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axes: Vec<Axis>,
    pub observable: Observable,
    /// Row-major over `axes`, last axis fastest.
    pub points: Vec<PointResult>,
}

impl SweepResult {
    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.values.len()).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    pub fn coords(&self, k: usize) -> Vec<f64> {
        flat_coords(&self.axes, k)
    }

    /// Value at grid indices, one per axis.
    pub fn get(&self, idx: &[usize]) -> Option<f64> {
        let shape = self.shape();
        if idx.len() != shape.len() || idx.iter().zip(&shape).any(|(i, n)| i >= n) {
            return None;
        }
        let k = idx.iter().zip(&shape).fold(0, |acc, (i, n)| acc * n + i);
        Some(self.points[k].value)
    }

    /// Flat index and value of the largest converged point.
    pub fn argmax(&self) -> Option<(usize, f64)> {
        self.points
            .iter()
            .enumerate()
            .filter(|(_, p)| p.converged)
            .max_by(|a, b| a.1.value.total_cmp(&b.1.value))
            .map(|(k, p)| (k, p.value))
    }

    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| !p.converged).count()
    }
}

fn solve_point(spec: &SweepSpec, k: usize, policy: &NumericPolicy) -> PointResult {
    let run = || -> Result<(f64, f64)> {
        let p = spec.params_at(k)?;
        let s = steady_state_with(&build_liouvillian(&p)?, policy)?;
        Ok((spec.observable.evaluate(&s.rho)?, s.residual))
    };
    match run() {
        Ok((value, residual)) => PointResult {
            value,
            residual,
            converged: true,
            error: None,
        },
        Err(e) => PointResult {
            value: f64::NAN,
            residual: f64::NAN,
            converged: false,
            error: Some(e.to_string()),
        },
    }
}

/// Steady-state observable at every grid point. Point failures are recorded
/// and the sweep continues; the result is identical with or without
/// `parallel`.
pub fn run_sweep(spec: &SweepSpec, policy: &NumericPolicy, parallel: bool) -> Result<SweepResult> {
    spec.validate()?;
    let n = spec.len();
    let points = if parallel {
        (0..n).into_par_iter().map(|k| solve_point(spec, k, policy)).collect()
    } else {
        (0..n).map(|k| solve_point(spec, k, policy)).collect()
    };
    Ok(SweepResult {
        axes: spec.axes.clone(),
        observable: spec.observable,
        points,
    })
}

fn require_dot1_resonant(base: &SystemParams) -> Result<()> {
    if (base.dots[0].omega - base.modes[0].omega).abs() > 1e-9 * base.modes[0].omega.abs().max(1.0) {
        return Err(Error::domain("dot 1 must be resonant with mode 1"));
    }
    Ok(())
}

/// Negativity over `(φ, δ)` with `φ₂ = 0` and `ω_p = ω₁ + δ`.
pub fn sweep_phase_detuning(base: &SystemParams, phi_grid: &[f64], delta_grid: &[f64]) -> Result<SweepResult> {
    require_dot1_resonant(base)?;
    if (base.dots[1].omega - base.modes[0].omega).abs() > 1e-9 * base.modes[0].omega.abs().max(1.0) {
        return Err(Error::domain("both dots must be resonant with mode 1"));
    }
    let spec = SweepSpec::new(
        base.clone(),
        vec![Axis::new(ParamPath::Phi, phi_grid.to_vec()), Axis::new(ParamPath::Delta, delta_grid.to_vec())],
    );
    run_sweep(&spec, &NumericPolicy::default(), true)
}

/// Negativity over dot-2 detuning for each exciton loss rate, with the pump
/// held at the base frequency.
pub fn sweep_detuning(base: &SystemParams, delta_grid: &[f64], dot_gammas: &[f64]) -> Result<SweepResult> {
    require_dot1_resonant(base)?;
    let spec = SweepSpec::new(
        base.clone(),
        vec![
            Axis::new(ParamPath::DotGamma, dot_gammas.to_vec()),
            Axis::new(ParamPath::QdDetuning, delta_grid.to_vec()),
        ],
    );
    run_sweep(&spec, &NumericPolicy::default(), true)
}

/// Negativity over joint pure dephasing for each exciton loss rate.
pub fn sweep_dephasing(base: &SystemParams, gamma_d_grid: &[f64], dot_gammas: &[f64]) -> Result<SweepResult> {
    let spec = SweepSpec::new(
        base.clone(),
        vec![
            Axis::new(ParamPath::DotGamma, dot_gammas.to_vec()),
            Axis::new(ParamPath::Dephasing, gamma_d_grid.to_vec()),
        ],
    );
    run_sweep(&spec, &NumericPolicy::default(), true)
}

/// Negativity over the normal-mode splitting, pump re-tuned to the dark
/// state at each point. `linewidth_sets` indexes [`LINEWIDTH_SETS`]; when
/// empty the base linewidths are kept.
pub fn sweep_splitting(base: &SystemParams, splitting_grid: &[f64], linewidth_sets: &[usize]) -> Result<SweepResult> {
    require_dot1_resonant(base)?;
    let mut axes = Vec::new();
    if !linewidth_sets.is_empty() {
        axes.push(Axis::new(
            ParamPath::LinewidthSet,
            linewidth_sets.iter().map(|&k| k as f64).collect(),
        ));
    }
    axes.push(Axis::new(ParamPath::Splitting, splitting_grid.to_vec()));
    let mut spec = SweepSpec::new(base.clone(), axes);
    spec.drive = DrivePolicy::DarkState;
    run_sweep(&spec, &NumericPolicy::default(), true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    Qd1Excited,
    PhotonMode1,
    Vacuum,
}

impl InitialState {
    pub const ALL: [InitialState; 3] = [InitialState::Qd1Excited, InitialState::PhotonMode1, InitialState::Vacuum];

    pub fn name(self) -> &'static str {
        match self {
            InitialState::Qd1Excited => "qd1_excited",
            InitialState::PhotonMode1 => "photon_mode1",
            InitialState::Vacuum => "vacuum",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| Error::domain(format!("unknown initial state `{name}`")))
    }

    pub fn density(self, params: &SystemParams) -> Result<DensityMatrix> {
        let levels = match self {
            InitialState::Qd1Excited => [1, 0, 0, 0],
            InitialState::PhotonMode1 => [0, 0, 1, 0],
            InitialState::Vacuum => [0, 0, 0, 0],
        };
        DensityMatrix::basis_state(&params.space()?, &levels)
    }
}

fn sample_grid(horizon: f64, samples: usize) -> Result<Vec<f64>> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::domain(format!("horizon must be positive, got {horizon}")));
    }
    if samples < 2 {
        return Err(Error::domain("need at least two samples"));
    }
    Ok(linspace(0.0, horizon, samples))
}

fn dark_driven(base: &SystemParams) -> Result<SystemParams> {
    let mut p = base.clone();
    p.drive.phase1 = PI;
    p.drive.phase2 = 0.0;
    p.drive_at_dark_state()?;
    Ok(p)
}

fn trajectory_options(policy: &NumericPolicy) -> EvolveOptions {
    EvolveOptions {
        policy: *policy,
        store_states: false,
    }
}

/// Free evolution under constant antisymmetric driving at the dark state.
pub fn dynamics_run(base: &SystemParams, initial: InitialState, horizon: f64, samples: usize) -> Result<Trajectory> {
    dynamics_run_with(base, initial, horizon, samples, &NumericPolicy::default())
}

pub fn dynamics_run_with(
    base: &SystemParams,
    initial: InitialState,
    horizon: f64,
    samples: usize,
    policy: &NumericPolicy,
) -> Result<Trajectory> {
    let grid = sample_grid(horizon, samples)?;
    let p = dark_driven(base)?;
    let rho0 = initial.density(&p)?;
    evolve_with(&Schedule::constant(p, horizon)?, &rho0, &grid, &trajectory_options(policy))
}

fn stark_segments(base: &SystemParams, tau: f64, initial_detuning: f64, horizon: f64) -> Result<Schedule> {
    if !(tau.is_finite() && tau > 0.0 && tau < horizon) {
        return Err(Error::domain(format!("switch time must lie in (0, {horizon}), got {tau}")));
    }
    if !initial_detuning.is_finite() {
        return Err(Error::domain("initial detuning must be finite"));
    }
    let resonant = dark_driven(base)?;
    let mut detuned = resonant.clone();
    detuned.set_dot_detuning(initial_detuning);
    Schedule::new(vec![
        Segment {
            duration: tau,
            params: detuned,
        },
        Segment {
            duration: horizon - tau,
            params: resonant,
        },
    ])
}

/// Starts from `|1000⟩` with dot 2 detuned, then brings dot 2 into resonance
/// at `tau`. The pump sits at the dark state of the resonant configuration
/// throughout.
pub fn stark_protocol(
    base: &SystemParams,
    tau: f64,
    initial_detuning: f64,
    horizon: f64,
    samples: usize,
) -> Result<Trajectory> {
    stark_protocol_with(base, tau, initial_detuning, horizon, samples, &NumericPolicy::default())
}

pub fn stark_protocol_with(
    base: &SystemParams,
    tau: f64,
    initial_detuning: f64,
    horizon: f64,
    samples: usize,
    policy: &NumericPolicy,
) -> Result<Trajectory> {
    let mut grid = sample_grid(horizon, samples)?;
    if !grid.iter().any(|&t| t == tau) {
        // sample the switch itself so the handoff shows up in the series
        let at = grid.partition_point(|&t| t < tau);
        grid.insert(at, tau);
    }
    let schedule = stark_segments(base, tau, initial_detuning, horizon)?;
    let rho0 = InitialState::Qd1Excited.density(base)?;
    evolve_with(&schedule, &rho0, &grid, &trajectory_options(policy))
}

/// Switch time that maximizes the mode-1 population handed over at the
/// switch, from a scan of `samples` times over `(0, t_max]` during the
/// detuned segment. Returns `(tau, pop_m1)`.
pub fn optimal_switch_time(
    base: &SystemParams,
    initial_detuning: f64,
    t_max: f64,
    samples: usize,
) -> Result<(f64, f64)> {
    let grid = sample_grid(t_max, samples)?;
    let mut detuned = dark_driven(base)?;
    detuned.set_dot_detuning(initial_detuning);
    let rho0 = InitialState::Qd1Excited.density(&detuned)?;
    let opts = trajectory_options(&NumericPolicy::default());
    let traj = evolve_with(&Schedule::constant(detuned, t_max)?, &rho0, &grid, &opts)?;
    traj.peak(Observable::PopM1)
        .ok_or_else(|| Error::domain("trajectory has no mode populations"))
}

/// Period of a series as the median spacing between alternate crossings of
/// its late-time level, the mean of the final tenth of the samples. Damped oscillations that relax onto a steady value measure
/// against that value, and the median discards an irregular first transient.
///
/// The series must leave the level by 0.1% of its range between crossings,
/// which suppresses noise chatter. Crossing times are linearly interpolated.
/// `None` with fewer than three crossings.
pub fn oscillation_period(times: &[f64], values: &[f64]) -> Option<f64> {
    if times.len() != values.len() || values.len() < 3 {
        return None;
    }
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if !(hi > lo) {
        return None;
    }
    let tail = &values[values.len() - (values.len() / 10).max(1)..];
    let level = tail.iter().sum::<f64>() / tail.len() as f64;
    let band = 1e-3 * (hi - lo);
    // +1 after a clear excursion above the level, -1 below
    let mut side = 0;
    let mut crossings = Vec::new();
    for k in 1..values.len() {
        let now = if values[k] > level + band {
            1
        } else if values[k] < level - band {
            -1
        } else {
            continue;
        };
        if side != 0 && now != side {
            let j = (1..=k).rev().find(|&j| (values[j - 1] - level).signum() != (values[j] - level).signum()).unwrap_or(k);
            let f = (level - values[j - 1]) / (values[j] - values[j - 1]);
            crossings.push(times[j - 1] + f * (times[j] - times[j - 1]));
        }
        side = now;
    }
    if crossings.len() < 3 {
        return None;
    }
    let mut gaps: Vec<f64> = crossings.windows(3).map(|w| w[2] - w[0]).collect();
    gaps.sort_by(f64::total_cmp);
    let n = gaps.len();
    Some(if n % 2 == 1 { gaps[n / 2] } else { 0.5 * (gaps[n / 2 - 1] + gaps[n / 2]) })
}
