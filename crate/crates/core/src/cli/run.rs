use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use serde_json::json;

use super::config::{to_config_text, Command, RunConfig, SwitchTime};
use super::output::{format_number, run_hash, sha256_hex, write_file, CsvTable, FileRecord, Manifest, TOOL_NAME};
use crate::error::{Error, Result};
use crate::experiments::{
    dynamics_run_with, optimal_switch_time, run_sweep, stark_protocol_with, SweepResult, SweepSpec,
};
use crate::liouvillian::build_liouvillian;
use crate::model::HBAR_UEV_PS;
use crate::solvers::{convergence_scan_with, steady_state_with, Observable, Trajectory};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Replaces the configured output directory.
    pub output_dir: Option<PathBuf>,
    /// Worker threads for sweeps; all cores when unset.
    pub threads: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub run_hash: String,
    pub files: Vec<PathBuf>,
    pub manifest: PathBuf,
    pub summary: String,
}

/// Process exit status for an error: 2 config, 3 solver, 4 I/O.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::UnknownPreset(..) => 2,
        Error::Io { .. } => 4,
        _ => 3,
    }
}

struct Outcome {
    table: CsvTable,
    diagnostics: serde_json::Value,
    summary: String,
}

/// Executes the configured command and writes `<name>.csv` and
/// `<name>.manifest.json` into the output directory.
pub fn run(config: &RunConfig, opts: &RunOptions) -> Result<RunReport> {
    let dir = opts.output_dir.clone().unwrap_or_else(|| config.output.dir.clone());
    let start = Instant::now();
    let outcome = match opts.threads {
        Some(n) => {
            if n == 0 {
                return Err(Error::Config("--threads must be at least 1".into()));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
            pool.install(|| execute(config))?
        }
        None => execute(config)?,
    };
    let wall_time_s = start.elapsed().as_secs_f64();

    fs::create_dir_all(&dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let hash = run_hash(config);
    let csv_name = format!("{}.csv", config.output.name);
    let bytes = outcome.table.to_bytes(&hash)?;
    let csv_path = dir.join(&csv_name);
    write_file(&csv_path, &bytes)?;

    let manifest = Manifest {
        tool: TOOL_NAME.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        run_hash: hash.clone(),
        command: config.command.name().into(),
        config: serde_json::to_value(config).expect("config serializes to JSON"),
        config_text: to_config_text(config)?,
        wall_time_s,
        diagnostics: outcome.diagnostics,
        outputs: vec![FileRecord {
            file: csv_name,
            sha256: sha256_hex(&bytes),
            rows: outcome.table.rows.len(),
        }],
    };
    let manifest_path = dir.join(format!("{}.manifest.json", config.output.name));
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes to JSON");
    text.push('\n');
    write_file(&manifest_path, text.as_bytes())?;

    Ok(RunReport {
        run_hash: hash,
        files: vec![csv_path],
        manifest: manifest_path,
        summary: outcome.summary,
    })
}

fn execute(config: &RunConfig) -> Result<Outcome> {
    match config.command {
        Command::Steady => steady(config),
        Command::Sweep => sweep(config),
        Command::Dynamics => {
            let d = config.dynamics.as_ref().expect("resolved dynamics section");
            let traj = dynamics_run_with(&config.params, d.initial, d.horizon, d.samples, &config.numeric)?;
            Ok(trajectory_outcome(&traj, json!({ "initial": d.initial.name() })))
        }
        Command::Protocol => {
            let p = config.protocol.as_ref().expect("resolved protocol section");
            let tau = match p.tau {
                SwitchTime::Fixed(t) => t,
                SwitchTime::Optimal => {
                    // scan up to twice the lossless transfer time πħ/(2g)
                    let t_max = (PI_HBAR / config.params.coupling.max_abs()).min(p.horizon);
                    optimal_switch_time(&config.params, p.initial_detuning, t_max, 2001)?.0
                }
            };
            let traj =
                stark_protocol_with(&config.params, tau, p.initial_detuning, p.horizon, p.samples, &config.numeric)?;
            Ok(trajectory_outcome(&traj, json!({ "tau_ps": tau })))
        }
        Command::Convergence => {
            let c = config.convergence.as_ref().expect("resolved convergence section");
            let r = convergence_scan_with(&config.params, c.observable, &c.cutoffs, &config.numeric)?;
            let mut table = CsvTable::new(vec![
                "cutoff".into(),
                c.observable.name().into(),
                "rel_diff_next".into(),
                "converged".into(),
            ]);
            for (k, (&cut, &v)) in r.cutoffs.iter().zip(&r.values).enumerate() {
                let (diff, conv) = match r.relative_differences.get(k) {
                    Some(&d) => (format_number(d), (d < r.threshold).to_string()),
                    None => (String::new(), String::new()),
                };
                table.push(vec![cut.to_string(), format_number(v), diff, conv]);
            }
            let summary = format!(
                "{} at cutoffs {:?}: {:?} ({})",
                c.observable.name(),
                r.cutoffs,
                r.values,
                if r.converged() { "converged" } else { "not converged" }
            );
            Ok(Outcome {
                table,
                diagnostics: json!({ "converged": r.converged(), "threshold": r.threshold }),
                summary,
            })
        }
    }
}

const PI_HBAR: f64 = std::f64::consts::PI * HBAR_UEV_PS;

fn steady(config: &RunConfig) -> Result<Outcome> {
    let s = steady_state_with(&build_liouvillian(&config.params)?, &config.numeric)?;
    let mut header = vec!["delta_ueV".to_string()];
    let mut row = vec![format_number(config.params.pump_detuning())];
    for o in Observable::ALL {
        header.push(o.name().into());
        row.push(format_number(o.evaluate(&s.rho)?));
    }
    header.push("residual_per_ps".into());
    row.push(format_number(s.residual));
    let negativity = Observable::Negativity.evaluate(&s.rho)?;
    let mut table = CsvTable::new(header);
    table.push(row);
    Ok(Outcome {
        table,
        diagnostics: json!({ "residual_per_ps": s.residual, "condition_estimate": s.condition }),
        summary: format!("steady-state negativity {negativity:.6}"),
    })
}

fn sweep(config: &RunConfig) -> Result<Outcome> {
    let s = config.sweep.as_ref().expect("resolved sweep section");
    let spec = SweepSpec {
        base: config.params.clone(),
        axes: s.axes.clone(),
        observable: s.observable,
        drive: s.drive,
    };
    let r = run_sweep(&spec, &config.numeric, true)?;
    if r.failures() > 0 && !s.allow_failures {
        let (k, p) = r.points.iter().enumerate().find(|(_, p)| !p.converged).unwrap();
        return Err(Error::SteadyState(format!(
            "{} of {} sweep points failed; first at {:?}: {}",
            r.failures(),
            r.points.len(),
            r.coords(k),
            p.error.as_deref().unwrap_or("unknown")
        )));
    }
    Ok(sweep_outcome(&r))
}

fn sweep_outcome(r: &SweepResult) -> Outcome {
    let mut header: Vec<String> = r.axes.iter().map(|a| format!("{}_{}", a.path.name(), a.path.unit())).collect();
    header.extend([r.observable.name().into(), "residual_per_ps".into(), "converged".into()]);
    let mut table = CsvTable::new(header);
    for (k, p) in r.points.iter().enumerate() {
        let mut row: Vec<String> = r.coords(k).into_iter().map(format_number).collect();
        row.extend([format_number(p.value), format_number(p.residual), p.converged.to_string()]);
        table.push(row);
    }
    let max_residual = r
        .points
        .iter()
        .filter(|p| p.converged)
        .map(|p| p.residual)
        .fold(0.0, f64::max);
    let failures: Vec<serde_json::Value> = r
        .points
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.converged)
        .map(|(k, p)| json!({ "coords": r.coords(k), "error": p.error }))
        .collect();
    let summary = match r.argmax() {
        Some((k, v)) => format!("{} points, max {} {v:.6} at {:?}", r.points.len(), r.observable.name(), r.coords(k)),
        None => format!("{} points, none converged", r.points.len()),
    };
    Outcome {
        table,
        diagnostics: json!({
            "points": r.points.len(),
            "failures": failures,
            "max_residual_per_ps": max_residual,
        }),
        summary,
    }
}

fn trajectory_outcome(traj: &Trajectory, mut diagnostics: serde_json::Value) -> Outcome {
    let mut header = vec!["t_ps".to_string()];
    header.extend(Observable::ALL.iter().map(|o| o.name().to_string()));
    let mut table = CsvTable::new(header);
    let series: Vec<&[f64]> = Observable::ALL
        .iter()
        .map(|&o| traj.observable(o).expect("dimer trajectories carry every observable"))
        .collect();
    for (k, &t) in traj.times.iter().enumerate() {
        let mut row = vec![format_number(t)];
        row.extend(series.iter().map(|s| format_number(s[k])));
        table.push(row);
    }
    let (t_peak, peak) = traj.peak(Observable::Negativity).unwrap_or((f64::NAN, f64::NAN));
    diagnostics["accepted_steps"] = json!(traj.accepted_steps);
    diagnostics["rejected_steps"] = json!(traj.rejected_steps);
    diagnostics["peak_negativity"] = json!(peak);
    diagnostics["peak_time_ps"] = json!(t_peak);
    Outcome {
        table,
        diagnostics,
        summary: format!("{} samples, peak negativity {peak:.6} at {t_peak} ps", traj.times.len()),
    }
}
