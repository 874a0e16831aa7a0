use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use super::observables::{Observable, StandardObservables};
use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, Operator};
use crate::liouvillian::{build_liouvillian, devectorize_matrix, vectorize_matrix, Superoperator};
use crate::model::SystemParams;
use crate::numeric::NumericPolicy;

/// Trace drift tolerated along an integrated trajectory.
pub const TRAJECTORY_TRACE_TOL: f64 = 1e-7;

const MAX_STEPS: usize = 50_000_000;

/// Constant parameters held for `duration` ps.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub duration: f64,
    pub params: SystemParams,
}

/// Piecewise-constant parameter schedule starting at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    segments: Vec<Segment>,
}

impl Schedule {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let first = segments
            .first()
            .ok_or_else(|| Error::domain("a schedule needs at least one segment"))?;
        for s in &segments {
            if !(s.duration.is_finite() && s.duration > 0.0) {
                return Err(Error::domain(format!("segment duration must be positive, got {}", s.duration)));
            }
            s.params.validate()?;
            if s.params.truncation != first.params.truncation {
                return Err(Error::domain("all segments must share one Fock truncation"));
            }
        }
        Ok(Self { segments })
    }

    pub fn constant(params: SystemParams, duration: f64) -> Result<Self> {
        Self::new(vec![Segment { duration, params }])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    pub fn generators(&self) -> Result<Vec<(f64, Superoperator)>> {
        self.segments
            .iter()
            .map(|s| Ok((s.duration, build_liouvillian(&s.params)?)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub policy: NumericPolicy,
    /// Keep every sampled density matrix, not only the observables.
    pub store_states: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            policy: NumericPolicy::default(),
            store_states: true,
        }
    }
}

/// Sampled solution of the master equation.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Empty unless states were requested.
    pub states: Vec<DensityMatrix>,
    /// Keyed by [`Observable::name`]; empty for spaces other than the dimer.
    pub observables: BTreeMap<String, Vec<f64>>,
    pub final_state: DensityMatrix,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn observable(&self, obs: Observable) -> Option<&[f64]> {
        self.observables.get(obs.name()).map(Vec::as_slice)
    }

    /// `(t, value)` of the largest sample.
    pub fn peak(&self, obs: Observable) -> Option<(f64, f64)> {
        let v = self.observable(obs)?;
        v.iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, &x)| (self.times[i], x))
    }
}

pub fn evolve(schedule: &Schedule, rho0: &DensityMatrix, t_grid: &[f64]) -> Result<Trajectory> {
    evolve_with(schedule, rho0, t_grid, &EvolveOptions::default())
}

pub fn evolve_with(
    schedule: &Schedule,
    rho0: &DensityMatrix,
    t_grid: &[f64],
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    evolve_generators(&schedule.generators()?, rho0, t_grid, opts)
}

/// Integrates `dρ/dt = L_k ρ` through consecutive `(duration, L_k)` pieces,
/// sampling at each time of `t_grid` (ps, strictly increasing, within the
/// schedule).
pub fn evolve_generators(
    segments: &[(f64, Superoperator)],
    rho0: &DensityMatrix,
    t_grid: &[f64],
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    if segments.is_empty() {
        return Err(Error::domain("no generators to integrate"));
    }
    for (d, l) in segments {
        if l.space() != rho0.space() {
            return Err(Error::domain("generator and initial state live on different spaces"));
        }
        if !(d.is_finite() && *d > 0.0) {
            return Err(Error::domain(format!("segment duration must be positive, got {d}")));
        }
    }
    let total: f64 = segments.iter().map(|s| s.0).sum();
    let grid = check_grid(t_grid, total)?;

    let table = StandardObservables::new(rho0.space()).ok();
    let mut observables: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    if table.is_some() {
        for o in Observable::ALL {
            observables.insert(o.name().to_string(), Vec::with_capacity(grid.len()));
        }
    }
    let mut states = Vec::new();

    let space = rho0.space().clone();
    let mut y = vectorize_matrix(rho0.matrix());
    let mut stepper = Dopri5::new(y.len(), opts.policy.ode_rtol, opts.policy.ode_atol);
    let mut seg = 0;
    let mut seg_start = 0.0;
    let mut t = 0.0;
    let mut last_state = rho0.clone();

    for &target in &grid {
        while target > seg_start + segments[seg].0 && seg + 1 < segments.len() {
            let end = seg_start + segments[seg].0;
            stepper.advance(&segments[seg].1, &mut y, &mut t, end)?;
            seg_start = end;
            seg += 1;
            stepper.reset_derivative();
        }
        stepper.advance(&segments[seg].1, &mut y, &mut t, target)?;

        let m = devectorize_matrix(&y)?;
        let op = Operator::new(space.clone(), m)?;
        let state = DensityMatrix::validated(
            op,
            opts.policy.algebraic_tol,
            TRAJECTORY_TRACE_TOL,
            opts.policy.trajectory_positivity_slack,
        )
        .map_err(|e| Error::Integration {
            time: t,
            reason: format!("state left the physical set: {e}"),
            error_estimate: stepper.last_error,
        })?;
        if let Some(table) = &table {
            for o in Observable::ALL {
                observables.get_mut(o.name()).unwrap().push(table.evaluate(o, state.matrix()));
            }
        }
        if opts.store_states {
            states.push(state.clone());
        }
        last_state = state;
    }

    Ok(Trajectory {
        times: grid,
        states,
        observables,
        final_state: last_state,
        accepted_steps: stepper.accepted,
        rejected_steps: stepper.rejected,
    })
}

fn check_grid(t_grid: &[f64], total: f64) -> Result<Vec<f64>> {
    if t_grid.is_empty() {
        return Err(Error::domain("time grid is empty"));
    }
    let slack = 1e-12 * total.max(1.0);
    let mut out = Vec::with_capacity(t_grid.len());
    for (i, &t) in t_grid.iter().enumerate() {
        if !t.is_finite() || t < 0.0 || t > total + slack {
            return Err(Error::domain(format!("grid time {t} outside [0, {total}]")));
        }
        if i > 0 && t <= t_grid[i - 1] {
            return Err(Error::domain("time grid must be strictly increasing"));
        }
        out.push(t.min(total));
    }
    Ok(out)
}

// Dormand–Prince 5(4) tableau; the generator is time independent within a
// segment so the nodes are not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Dopri5 {
    k: [Vec<C64>; 7],
    stage: Vec<C64>,
    rtol: f64,
    atol: f64,
    h: f64,
    have_derivative: bool,
    last_error: f64,
    accepted: usize,
    rejected: usize,
}

impl Dopri5 {
    fn new(n: usize, rtol: f64, atol: f64) -> Self {
        let z = vec![C64::new(0.0, 0.0); n];
        Self {
            k: std::array::from_fn(|_| z.clone()),
            stage: z,
            rtol,
            atol,
            h: 0.0,
            have_derivative: false,
            last_error: 0.0,
            accepted: 0,
            rejected: 0,
        }
    }

    fn reset_derivative(&mut self) {
        self.have_derivative = false;
    }

    fn weight(&self, a: C64, b: C64) -> f64 {
        self.atol + self.rtol * a.norm().max(b.norm())
    }

    fn initial_step(&self, y: &[C64], span: f64) -> f64 {
        let (mut d0, mut d1) = (0.0, 0.0);
        for (yi, fi) in y.iter().zip(&self.k[0]) {
            let w = self.weight(*yi, *yi);
            d0 += (yi.norm() / w).powi(2);
            d1 += (fi.norm() / w).powi(2);
        }
        let n = y.len() as f64;
        let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
        let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h.min(span)
    }

    /// Steps from `*t` to exactly `t_end`.
    fn advance(&mut self, l: &Superoperator, y: &mut Vec<C64>, t: &mut f64, t_end: f64) -> Result<()> {
        if t_end <= *t {
            return Ok(());
        }
        if !self.have_derivative {
            l.apply_into(y, &mut self.k[0]);
            self.have_derivative = true;
        }
        if self.h <= 0.0 {
            self.h = self.initial_step(y, t_end - *t);
        }
        let n = y.len();
        let mut y_new = vec![C64::new(0.0, 0.0); n];
        while *t < t_end {
            if self.accepted + self.rejected >= MAX_STEPS {
                return Err(Error::Integration {
                    time: *t,
                    reason: "step budget exhausted".into(),
                    error_estimate: self.last_error,
                });
            }
            let remaining = t_end - *t;
            let last = self.h >= remaining;
            let h = if last { remaining } else { self.h };

            for s in 1..7 {
                for i in 0..n {
                    let mut acc = C64::new(0.0, 0.0);
                    for (j, a) in A[s].iter().enumerate().take(s) {
                        if *a != 0.0 {
                            acc += self.k[j][i] * *a;
                        }
                    }
                    self.stage[i] = y[i] + acc * h;
                }
                l.apply_into(&self.stage, &mut self.k[s]);
                if s == 6 {
                    y_new.copy_from_slice(&self.stage);
                }
            }
            let mut err = 0.0;
            for i in 0..n {
                let mut e = C64::new(0.0, 0.0);
                for (j, ej) in E.iter().enumerate() {
                    if *ej != 0.0 {
                        e += self.k[j][i] * *ej;
                    }
                }
                err += ((e * h).norm() / self.weight(y[i], y_new[i])).powi(2);
            }
            let err = (err / n as f64).sqrt();
            self.last_error = err;

            if err <= 1.0 {
                self.accepted += 1;
                *t = if last { t_end } else { *t + h };
                std::mem::swap(y, &mut y_new);
                self.k.swap(0, 6);
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                self.h = if last { self.h.max(h * factor) } else { h * factor };
            } else {
                self.rejected += 1;
                let factor = if err.is_finite() { (0.9 * err.powf(-0.2)).max(0.2) } else { 0.2 };
                self.h = h * factor;
                if self.h < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::Integration {
                        time: *t,
                        reason: "step size underflow".into(),
                        error_estimate: err,
                    });
                }
            }
        }
        Ok(())
    }
}
