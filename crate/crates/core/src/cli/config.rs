//! Run configuration: TOML text in, fully resolved [`RunConfig`] out.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{
    default_delta_grid, default_dephasing_grid, default_phi_grid, default_qd_detuning_grid, linspace, Axis,
    DrivePolicy, InitialState, ParamPath, DEFAULT_STARK_DETUNING, DOT_GAMMA_FAMILY,
};
use crate::model::{self, CouplingMatrix, DriveParams, ModeParams, QdParams, SystemParams};
use crate::numeric::NumericPolicy;
use crate::solvers::Observable;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Steady,
    Dynamics,
    Sweep,
    Protocol,
    Convergence,
}

impl Command {
    pub const ALL: [Command; 5] = [
        Command::Steady,
        Command::Dynamics,
        Command::Sweep,
        Command::Protocol,
        Command::Convergence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Steady => "steady",
            Command::Dynamics => "dynamics",
            Command::Sweep => "sweep",
            Command::Protocol => "protocol",
            Command::Convergence => "convergence",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Command::ALL.iter().map(|c| c.name()).collect();
            Error::Config(format!("unknown command `{s}` (expected one of: {})", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub axes: Vec<Axis>,
    pub observable: Observable,
    pub drive: DrivePolicy,
    /// Record failed points in the output instead of aborting the run.
    pub allow_failures: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DynamicsConfig {
    pub initial: InitialState,
    pub horizon: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SwitchTime {
    Fixed(f64),
    /// Located by a scan of the mode-1 population before the switch.
    Optimal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolConfig {
    pub tau: SwitchTime,
    pub initial_detuning: f64,
    pub horizon: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceConfig {
    pub cutoffs: Vec<usize>,
    pub observable: Observable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// File stem shared by the CSV and the manifest.
    pub name: String,
}

/// Fully resolved run. Only the section belonging to `command` is set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub params: SystemParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub protocol: Option<ProtocolConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceConfig>,
    /// Where results go; not part of the run identity.
    #[serde(skip)]
    pub output: OutputConfig,
    pub numeric: NumericPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Pair {
    Both(f64),
    Each([f64; 2]),
}

impl Pair {
    fn get(self) -> [f64; 2] {
        match self {
            Pair::Both(v) => [v, v],
            Pair::Each(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Cutoff {
    Both(i64),
    Each([i64; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum NumberOrWord {
    Number(f64),
    Word(String),
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    command: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    system: Option<RawSystem>,
    #[serde(skip_serializing_if = "Option::is_none")]
    drive: Option<RawDrive>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<RawSweep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dynamics: Option<RawDynamics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    protocol: Option<RawProtocol>,
    #[serde(skip_serializing_if = "Option::is_none")]
    convergence: Option<RawConvergence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<RawOutput>,
    #[serde(skip_serializing_if = "Option::is_none")]
    numeric: Option<NumericPolicy>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    #[serde(skip_serializing_if = "Option::is_none")]
    preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mode_omega: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mode_gamma: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dot_omega: Option<[f64; 2]>,
    /// `coupling[m][n]` is `ħg_{mn}` (real part).
    #[serde(skip_serializing_if = "Option::is_none")]
    coupling: Option<[[f64; 2]; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coupling_imag: Option<[[f64; 2]; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mode_pump: Option<Pair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dot_gamma: Option<Pair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dot_dephasing: Option<Pair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mode_splitting: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dot_detuning: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    truncation: Option<Cutoff>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDrive {
    #[serde(skip_serializing_if = "Option::is_none")]
    amplitude: Option<f64>,
    /// Phase of the dot-1 drive, rad.
    #[serde(skip_serializing_if = "Option::is_none")]
    phi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phase2: Option<f64>,
    /// Pump detuning from mode 1 in μeV, or "dark".
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<NumberOrWord>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAxis {
    param: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stop: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    points: Option<usize>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    #[serde(skip_serializing_if = "Option::is_none")]
    kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    axes: Option<Vec<RawAxis>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    observable: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    drive_policy: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    allow_failures: Option<bool>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDynamics {
    #[serde(skip_serializing_if = "Option::is_none")]
    initial: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<usize>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProtocol {
    #[serde(skip_serializing_if = "Option::is_none")]
    tau: Option<NumberOrWord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    initial_detuning: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<usize>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConvergence {
    #[serde(skip_serializing_if = "Option::is_none")]
    cutoffs: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    observable: Option<String>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    #[serde(skip_serializing_if = "Option::is_none")]
    dir: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

pub const DEFAULT_HORIZON: f64 = 6000.0;
pub const DEFAULT_SAMPLES: usize = 601;
pub const DEFAULT_SWITCH_TIME: f64 = 9.0;
pub const DEFAULT_CUTOFFS: [usize; 3] = [1, 2, 3];
pub const DEFAULT_OUTPUT_DIR: &str = "output";

const EXPLICIT_KEYS: [&str; 4] = ["mode_omega", "mode_gamma", "dot_omega", "coupling"];

fn cfg(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses and resolves config text. `truncation` overrides the configured
/// Fock cutoff of both modes.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with(text, None)
}

pub fn parse_config_with(text: &str, truncation: Option<usize>) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| match e.span() {
        Some(span) => cfg(format!("line {}: {}", line_of(text, span.start), e.message().trim())),
        None => cfg(e.message().trim().to_string()),
    })?;
    resolve(raw, truncation)
}

fn resolve(raw: RawConfig, truncation_override: Option<usize>) -> Result<RunConfig> {
    let mut missing = Vec::new();
    if raw.command.is_none() {
        missing.push("command".to_string());
    }
    let has_system = raw
        .system
        .as_ref()
        .is_some_and(|s| s.preset.is_some() || EXPLICIT_KEYS.iter().any(|k| explicit_key_set(s, k)));
    if !has_system {
        missing.push(format!("[system] preset, or [system] {}", EXPLICIT_KEYS.join(", ")));
    }
    if !missing.is_empty() {
        return Err(cfg(format!("missing required keys: {}", missing.join("; "))));
    }
    let command: Command = raw.command.as_deref().unwrap().parse()?;

    let mut params = resolve_system(raw.system.as_ref().unwrap())?;
    if let Some(t) = truncation_override {
        if t < 1 {
            return Err(cfg("truncation must be at least 1, got 0"));
        }
        params.truncation = [t, t];
    }
    resolve_drive(&mut params, raw.drive.as_ref())?;
    params.validate().map_err(|e| cfg(e.to_string()))?;

    let sections = [
        ("sweep", raw.sweep.is_some(), Command::Sweep),
        ("dynamics", raw.dynamics.is_some(), Command::Dynamics),
        ("protocol", raw.protocol.is_some(), Command::Protocol),
        ("convergence", raw.convergence.is_some(), Command::Convergence),
    ];
    for (name, present, owner) in sections {
        if present && owner != command {
            return Err(cfg(format!("section [{name}] is not used by command `{command}`")));
        }
    }

    let mut config = RunConfig {
        command,
        params,
        sweep: None,
        dynamics: None,
        protocol: None,
        convergence: None,
        output: resolve_output(raw.output.as_ref(), command),
        numeric: raw.numeric.unwrap_or_default(),
    };
    match command {
        Command::Steady => {}
        Command::Sweep => {
            let s = raw
                .sweep
                .as_ref()
                .ok_or_else(|| cfg("missing required keys: [sweep] kind or [sweep] axes"))?;
            config.sweep = Some(resolve_sweep(s, &config.params)?);
        }
        Command::Dynamics => {
            let d = raw.dynamics.unwrap_or_default();
            let initial = match d.initial.as_deref() {
                None => InitialState::PhotonMode1,
                Some(name) => InitialState::from_name(name).map_err(|e| cfg(e.to_string()))?,
            };
            let horizon = positive("dynamics.horizon", d.horizon.unwrap_or(DEFAULT_HORIZON))?;
            let samples = at_least("dynamics.samples", d.samples.unwrap_or(DEFAULT_SAMPLES), 2)?;
            config.dynamics = Some(DynamicsConfig {
                initial,
                horizon,
                samples,
            });
        }
        Command::Protocol => {
            let p = raw.protocol.unwrap_or_default();
            let tau = match p.tau {
                None => SwitchTime::Fixed(DEFAULT_SWITCH_TIME),
                Some(NumberOrWord::Number(t)) => SwitchTime::Fixed(positive("protocol.tau", t)?),
                Some(NumberOrWord::Word(w)) if w == "optimal" => SwitchTime::Optimal,
                Some(NumberOrWord::Word(w)) => {
                    return Err(cfg(format!("protocol.tau must be a time in ps or \"optimal\", got \"{w}\"")))
                }
            };
            let horizon = positive("protocol.horizon", p.horizon.unwrap_or(DEFAULT_HORIZON))?;
            if let SwitchTime::Fixed(t) = tau {
                if t >= horizon {
                    return Err(cfg(format!("protocol.tau = {t} must be below the horizon {horizon}")));
                }
            }
            let initial_detuning = p.initial_detuning.unwrap_or(DEFAULT_STARK_DETUNING);
            if !initial_detuning.is_finite() {
                return Err(cfg("protocol.initial_detuning must be finite"));
            }
            let samples = at_least("protocol.samples", p.samples.unwrap_or(DEFAULT_SAMPLES), 2)?;
            config.protocol = Some(ProtocolConfig {
                tau,
                initial_detuning,
                horizon,
                samples,
            });
        }
        Command::Convergence => {
            let c = raw.convergence.unwrap_or_default();
            let cutoffs = c.cutoffs.unwrap_or_else(|| DEFAULT_CUTOFFS.to_vec());
            if cutoffs.len() < 2 || cutoffs[0] < 1 || cutoffs.windows(2).any(|w| w[1] <= w[0]) {
                return Err(cfg(
                    "convergence.cutoffs must hold at least two strictly increasing values, each at least 1",
                ));
            }
            config.convergence = Some(ConvergenceConfig {
                cutoffs,
                observable: observable(c.observable.as_deref())?,
            });
        }
    }
    Ok(config)
}

fn explicit_key_set(s: &RawSystem, key: &str) -> bool {
    match key {
        "mode_omega" => s.mode_omega.is_some(),
        "mode_gamma" => s.mode_gamma.is_some(),
        "dot_omega" => s.dot_omega.is_some(),
        "coupling" => s.coupling.is_some(),
        _ => false,
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(cfg(format!("{name} must be positive, got {v}")))
    }
}

fn at_least(name: &str, v: usize, min: usize) -> Result<usize> {
    if v >= min {
        Ok(v)
    } else {
        Err(cfg(format!("{name} must be at least {min}, got {v}")))
    }
}

fn observable(name: Option<&str>) -> Result<Observable> {
    match name {
        None => Ok(Observable::Negativity),
        Some(n) => Observable::from_name(n).map_err(|e| cfg(e.to_string())),
    }
}

fn resolve_system(s: &RawSystem) -> Result<SystemParams> {
    let mut p = match &s.preset {
        Some(name) => {
            if let Some(k) = EXPLICIT_KEYS.iter().find(|k| explicit_key_set(s, k)) {
                return Err(cfg(format!("[system] sets both preset and `{k}`; use one or the other")));
            }
            if s.coupling_imag.is_some() {
                return Err(cfg("[system] coupling_imag needs explicit couplings, not a preset"));
            }
            model::preset_params(name).map_err(|e| cfg(e.to_string()))?
        }
        None => {
            let missing: Vec<&str> = EXPLICIT_KEYS
                .iter()
                .copied()
                .filter(|k| !explicit_key_set(s, k))
                .collect();
            if !missing.is_empty() {
                return Err(cfg(format!("missing required keys: [system] {}", missing.join(", "))));
            }
            let (mo, mg, dw, re) = (
                s.mode_omega.unwrap(),
                s.mode_gamma.unwrap(),
                s.dot_omega.unwrap(),
                s.coupling.unwrap(),
            );
            let im = s.coupling_imag.unwrap_or([[0.0; 2]; 2]);
            SystemParams {
                modes: [0, 1].map(|m| ModeParams {
                    omega: mo[m],
                    gamma: mg[m],
                    pump: 0.0,
                }),
                dots: [0, 1].map(|n| QdParams {
                    omega: dw[n],
                    gamma: 0.0,
                    dephasing: 0.0,
                }),
                coupling: CouplingMatrix([0, 1].map(|m| [0, 1].map(|n| C64::new(re[m][n], im[m][n])))),
                drive: DriveParams {
                    amplitude: model::PRESET_DRIVE,
                    phase1: PI,
                    phase2: 0.0,
                    pump_freq: mo[0],
                },
                truncation: [1, 1],
            }
        }
    };
    if let Some(v) = s.mode_pump {
        let v = v.get();
        p.modes[0].pump = v[0];
        p.modes[1].pump = v[1];
    }
    if let Some(v) = s.dot_gamma {
        let v = v.get();
        p.dots[0].gamma = v[0];
        p.dots[1].gamma = v[1];
    }
    if let Some(v) = s.dot_dephasing {
        let v = v.get();
        p.dots[0].dephasing = v[0];
        p.dots[1].dephasing = v[1];
    }
    if let Some(v) = s.mode_splitting {
        p.set_splitting(v);
    }
    if let Some(v) = s.dot_detuning {
        p.set_dot_detuning(v);
    }
    if let Some(t) = s.truncation {
        let t = match t {
            Cutoff::Both(v) => [v, v],
            Cutoff::Each(v) => v,
        };
        for v in t {
            if v < 1 {
                return Err(cfg(format!("system.truncation must be at least 1, got {v}")));
            }
        }
        p.truncation = t.map(|v| v as usize);
    }
    Ok(p)
}

fn resolve_drive(p: &mut SystemParams, d: Option<&RawDrive>) -> Result<()> {
    let d = match d {
        Some(d) => d,
        None => {
            p.drive_at_dark_state().map_err(|e| cfg(e.to_string()))?;
            return Ok(());
        }
    };
    if let Some(a) = d.amplitude {
        p.drive.amplitude = a;
    }
    if let Some(v) = d.phi {
        p.drive.phase1 = v;
    }
    if let Some(v) = d.phase2 {
        p.drive.phase2 = v;
    }
    match &d.delta {
        None => {
            p.drive_at_dark_state().map_err(|e| cfg(e.to_string()))?;
        }
        Some(NumberOrWord::Word(w)) if w == "dark" => {
            p.drive_at_dark_state().map_err(|e| cfg(e.to_string()))?;
        }
        Some(NumberOrWord::Word(w)) => {
            return Err(cfg(format!("drive.delta must be a detuning in ueV or \"dark\", got \"{w}\"")));
        }
        Some(NumberOrWord::Number(v)) => p.set_pump_detuning(*v),
    }
    Ok(())
}

fn resolve_axis(a: &RawAxis) -> Result<Axis> {
    let path = ParamPath::from_name(&a.param).map_err(|e| cfg(e.to_string()))?;
    let values = match (&a.values, a.start, a.stop, a.points) {
        (Some(v), None, None, None) => v.clone(),
        (None, Some(start), Some(stop), Some(points)) => linspace(start, stop, points),
        _ => {
            return Err(cfg(format!(
                "sweep axis `{}` needs either `values` or all of `start`, `stop`, `points`",
                a.param
            )))
        }
    };
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(cfg(format!("sweep axis `{}` needs a nonempty grid of finite values", a.param)));
    }
    Ok(Axis::new(path, values))
}

fn resolve_sweep(s: &RawSweep, base: &SystemParams) -> Result<SweepConfig> {
    let (mut axes, mut drive) = match s.kind.as_deref() {
        None => (Vec::new(), DrivePolicy::Fixed),
        Some("phase_detuning") => (
            vec![
                Axis::new(ParamPath::Phi, default_phi_grid()),
                Axis::new(ParamPath::Delta, default_delta_grid(base)),
            ],
            DrivePolicy::Fixed,
        ),
        Some("detuning") => (
            vec![
                Axis::new(ParamPath::DotGamma, DOT_GAMMA_FAMILY.to_vec()),
                Axis::new(ParamPath::QdDetuning, default_qd_detuning_grid()),
            ],
            DrivePolicy::Fixed,
        ),
        Some("dephasing") => (
            vec![
                Axis::new(ParamPath::DotGamma, DOT_GAMMA_FAMILY.to_vec()),
                Axis::new(ParamPath::Dephasing, default_dephasing_grid()),
            ],
            DrivePolicy::Fixed,
        ),
        Some("splitting") => (
            vec![Axis::new(ParamPath::Splitting, linspace(0.0, 3000.0, 61))],
            DrivePolicy::DarkState,
        ),
        Some(k) => {
            return Err(cfg(format!(
                "unknown sweep kind `{k}` (expected one of: phase_detuning, detuning, dephasing, splitting)"
            )))
        }
    };
    if let Some(raw_axes) = &s.axes {
        axes = raw_axes.iter().map(resolve_axis).collect::<Result<_>>()?;
    }
    if axes.is_empty() || axes.len() > 2 {
        return Err(cfg("a sweep needs [sweep] kind or one or two [[sweep.axes]] entries"));
    }
    if axes.len() == 2 && axes[0].path == axes[1].path {
        return Err(cfg("sweep axes must be distinct"));
    }
    match s.drive_policy.as_deref() {
        None => {}
        Some("fixed") => drive = DrivePolicy::Fixed,
        Some("dark_state") => drive = DrivePolicy::DarkState,
        Some(w) => return Err(cfg(format!("sweep.drive_policy must be \"fixed\" or \"dark_state\", got \"{w}\""))),
    }
    Ok(SweepConfig {
        axes,
        observable: observable(s.observable.as_deref())?,
        drive,
        allow_failures: s.allow_failures.unwrap_or(false),
    })
}

fn resolve_output(o: Option<&RawOutput>, command: Command) -> OutputConfig {
    let dir = o.and_then(|o| o.dir.clone()).unwrap_or_else(|| DEFAULT_OUTPUT_DIR.into());
    let name = o.and_then(|o| o.name.clone()).unwrap_or_else(|| command.name().into());
    OutputConfig {
        dir: PathBuf::from(dir),
        name,
    }
}

/// Explicit config text that parses back to an equivalent [`RunConfig`].
pub fn to_config_text(config: &RunConfig) -> Result<String> {
    let p = &config.params;
    let g = &p.coupling.0;
    let has_imag = g.iter().flatten().any(|z| z.im != 0.0);
    let raw = RawConfig {
        command: Some(config.command.name().into()),
        system: Some(RawSystem {
            preset: None,
            mode_omega: Some([p.modes[0].omega, p.modes[1].omega]),
            mode_gamma: Some([p.modes[0].gamma, p.modes[1].gamma]),
            dot_omega: Some([p.dots[0].omega, p.dots[1].omega]),
            coupling: Some(g.map(|row| row.map(|z| z.re))),
            coupling_imag: has_imag.then(|| g.map(|row| row.map(|z| z.im))),
            mode_pump: Some(Pair::Each([p.modes[0].pump, p.modes[1].pump])),
            dot_gamma: Some(Pair::Each([p.dots[0].gamma, p.dots[1].gamma])),
            dot_dephasing: Some(Pair::Each([p.dots[0].dephasing, p.dots[1].dephasing])),
            mode_splitting: None,
            dot_detuning: None,
            truncation: Some(Cutoff::Each(p.truncation.map(|t| t as i64))),
        }),
        drive: Some(RawDrive {
            amplitude: Some(p.drive.amplitude),
            phi: Some(p.drive.phase1),
            phase2: Some(p.drive.phase2),
            delta: Some(NumberOrWord::Number(p.pump_detuning())),
        }),
        sweep: config.sweep.as_ref().map(|s| RawSweep {
            kind: None,
            axes: Some(
                s.axes
                    .iter()
                    .map(|a| RawAxis {
                        param: a.path.name().into(),
                        values: Some(a.values.clone()),
                        ..RawAxis::default()
                    })
                    .collect(),
            ),
            observable: Some(s.observable.name().into()),
            drive_policy: Some(
                match s.drive {
                    DrivePolicy::Fixed => "fixed",
                    DrivePolicy::DarkState => "dark_state",
                }
                .into(),
            ),
            allow_failures: Some(s.allow_failures),
        }),
        dynamics: config.dynamics.as_ref().map(|d| RawDynamics {
            initial: Some(d.initial.name().into()),
            horizon: Some(d.horizon),
            samples: Some(d.samples),
        }),
        protocol: config.protocol.as_ref().map(|p| RawProtocol {
            tau: Some(match p.tau {
                SwitchTime::Fixed(t) => NumberOrWord::Number(t),
                SwitchTime::Optimal => NumberOrWord::Word("optimal".into()),
            }),
            initial_detuning: Some(p.initial_detuning),
            horizon: Some(p.horizon),
            samples: Some(p.samples),
        }),
        convergence: config.convergence.as_ref().map(|c| RawConvergence {
            cutoffs: Some(c.cutoffs.clone()),
            observable: Some(c.observable.name().into()),
        }),
        output: Some(RawOutput {
            dir: Some(config.output.dir.to_string_lossy().into_owned()),
            name: Some(config.output.name.clone()),
        }),
        numeric: Some(config.numeric),
    };
    toml::to_string(&raw).map_err(|e| cfg(format!("cannot serialize config: {e}")))
}

/// Same command, parameters, options and output target.
pub fn equivalent(a: &RunConfig, b: &RunConfig) -> bool {
    a == b
}
