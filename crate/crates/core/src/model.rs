//! Physical parameters, Hamiltonians and presets of the two-dot / two-mode
//! system.
//!
//! All energies are ħ-scaled and stored in μeV. Mode `m` couples to dot `n`
//! with strength `g[m][n]`; the coupling term of the Hamiltonian is
//! `g*[m][n] a†_m σ⁻_n + g[m][n] a_m σ⁺_n`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{boson_annihilation, number_of, qubit_lowering, CompositeSpace, Operator};
use crate::linalg;

/// Reduced Planck constant in μeV·ps.
pub const HBAR_UEV_PS: f64 = 658.2119569;

/// Subsystem positions in the `(QD1, QD2, mode1, mode2)` ordering.
pub const DOT_POSITIONS: [usize; 2] = [0, 1];
pub const MODE_POSITIONS: [usize; 2] = [2, 3];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeParams {
    /// Mode energy ħω_m.
    pub omega: f64,
    /// Loss rate ħγ_m.
    pub gamma: f64,
    /// Incoherent pump rate ħP_m.
    pub pump: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QdParams {
    /// Exciton energy.
    pub omega: f64,
    /// Radiative decay rate outside the cavity modes.
    pub gamma: f64,
    /// Pure dephasing rate.
    pub dephasing: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    /// ħΩ₀, common to both dots.
    pub amplitude: f64,
    /// Phase of the dot-1 drive in radians.
    pub phase1: f64,
    /// Phase of the dot-2 drive in radians.
    pub phase2: f64,
    /// Pump energy ħω_p (absolute, same reference as the mode energies).
    pub pump_freq: f64,
}

/// `g[m][n]`: coupling of mode `m` to dot `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingMatrix(pub [[C64; 2]; 2]);

impl CouplingMatrix {
    /// Mode 1 bonding `(+g, +g)`, mode 2 antibonding `(+g, -g)`.
    pub fn bonding_antibonding(g: f64) -> Self {
        let p = C64::new(g, 0.0);
        Self([[p, p], [p, -p]])
    }

    pub fn get(&self, mode: usize, dot: usize) -> C64 {
        self.0[mode][dot]
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|g| g.norm()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub modes: [ModeParams; 2],
    pub dots: [QdParams; 2],
    pub coupling: CouplingMatrix,
    pub drive: DriveParams,
    /// Maximum photon number kept per mode.
    pub truncation: [usize; 2],
}

fn check_rate(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::domain(format!("{name} must be finite and nonnegative, got {v}")));
    }
    Ok(())
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::domain(format!("{name} must be finite, got {v}")));
    }
    Ok(())
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        for (m, mode) in self.modes.iter().enumerate() {
            check_finite(&format!("mode {} energy", m + 1), mode.omega)?;
            check_rate(&format!("mode {} linewidth", m + 1), mode.gamma)?;
            check_rate(&format!("mode {} pump", m + 1), mode.pump)?;
        }
        for (n, dot) in self.dots.iter().enumerate() {
            check_finite(&format!("dot {} energy", n + 1), dot.omega)?;
            check_rate(&format!("dot {} decay", n + 1), dot.gamma)?;
            check_rate(&format!("dot {} dephasing", n + 1), dot.dephasing)?;
        }
        for g in self.coupling.0.iter().flatten() {
            check_finite("coupling", g.re)?;
            check_finite("coupling", g.im)?;
        }
        check_rate("drive amplitude", self.drive.amplitude)?;
        check_finite("drive phase", self.drive.phase1)?;
        check_finite("drive phase", self.drive.phase2)?;
        check_finite("pump energy", self.drive.pump_freq)?;
        if self.truncation.iter().any(|&t| t < 1) {
            return Err(Error::domain("Fock truncation must be at least 1"));
        }
        Ok(())
    }

    pub fn space(&self) -> Result<CompositeSpace> {
        CompositeSpace::qd_dimer(self.truncation)
    }

    /// `Ω_n = Ω₀ e^{iφ_n}`.
    pub fn drive_amplitudes(&self) -> [C64; 2] {
        let d = &self.drive;
        [
            C64::from_polar(d.amplitude, d.phase1),
            C64::from_polar(d.amplitude, d.phase2),
        ]
    }

    /// `ω₂ − ω₁`.
    pub fn splitting(&self) -> f64 {
        self.modes[1].omega - self.modes[0].omega
    }

    pub fn set_splitting(&mut self, splitting: f64) {
        self.modes[1].omega = self.modes[0].omega + splitting;
    }

    /// δ in `ω_p = ω₁ + δ`.
    pub fn pump_detuning(&self) -> f64 {
        self.drive.pump_freq - self.modes[0].omega
    }

    pub fn set_pump_detuning(&mut self, delta: f64) {
        self.drive.pump_freq = self.modes[0].omega + delta;
    }

    /// Δ in `ω⁽²⁾ = ω⁽¹⁾ + Δ`.
    pub fn set_dot_detuning(&mut self, delta: f64) {
        self.dots[1].omega = self.dots[0].omega + delta;
    }

    /// Moves the pump onto the dark state of the current parameters.
    pub fn drive_at_dark_state(&mut self) -> Result<f64> {
        let dark = identify_dark_state(self)?;
        self.set_pump_detuning(dark.offset);
        Ok(dark.offset)
    }

    pub fn with_truncation(mut self, cutoff: usize) -> Self {
        self.truncation = [cutoff, cutoff];
        self
    }
}

/// ħg from the dipole/field coupling formula.
///
/// `omega0_ev` is ħω₀ in eV, `d2` the squared dipole moment in eV·nm³ and
/// `field` the normalized mode field amplitude in nm^(-3/2). Returns μeV.
pub fn coupling_from_field(omega0_ev: f64, d2: f64, field: f64) -> Result<f64> {
    if !(omega0_ev > 0.0) {
        return Err(Error::domain("exciton energy must be positive"));
    }
    if !(d2 >= 0.0) {
        return Err(Error::domain("squared dipole moment must be nonnegative"));
    }
    Ok((2.0 * PI * omega0_ev * d2).sqrt() * field * 1e6)
}

/// Field amplitude producing the coupling `g_uev`; inverse of
/// [`coupling_from_field`].
pub fn field_for_coupling(omega0_ev: f64, d2: f64, g_uev: f64) -> Result<f64> {
    let unit = coupling_from_field(omega0_ev, d2, 1.0)?;
    if unit == 0.0 {
        return Err(Error::domain("zero dipole moment cannot produce a coupling"));
    }
    Ok(g_uev / unit)
}

/// Lowering/annihilation operators of the `(QD1, QD2, mode1, mode2)` space.
#[derive(Debug, Clone)]
pub struct SystemOperators {
    pub sigma: [Operator; 2],
    pub a: [Operator; 2],
}

impl SystemOperators {
    pub fn new(space: &CompositeSpace) -> Result<Self> {
        Ok(Self {
            sigma: [
                qubit_lowering(space, DOT_POSITIONS[0])?,
                qubit_lowering(space, DOT_POSITIONS[1])?,
            ],
            a: [
                boson_annihilation(space, MODE_POSITIONS[0])?,
                boson_annihilation(space, MODE_POSITIONS[1])?,
            ],
        })
    }

    /// Total excitation number `Σ a†a + Σ σ⁺σ⁻`.
    pub fn excitation_number(&self) -> Operator {
        let mut n = number_of(&self.a[0]);
        for op in [&self.a[1], &self.sigma[0], &self.sigma[1]] {
            n = &n + &number_of(op);
        }
        n
    }
}

fn check_space(params: &SystemParams, space: &CompositeSpace) -> Result<()> {
    params.validate()?;
    let want = params.space()?;
    if *space != want {
        return Err(Error::domain(format!(
            "space {:?} does not match the parameter truncation {:?}",
            space.dims(),
            want.dims()
        )));
    }
    Ok(())
}

/// Shared builder: energies measured from `frame`, drive multiplied by
/// `drive_phase` (`e^{-iω_p t}` in the lab frame, 1 in the rotating frame).
fn assemble(params: &SystemParams, ops: &SystemOperators, frame: f64, drive_phase: C64) -> Operator {
    let space = ops.a[0].space();
    let mut h = DMatrix::<C64>::zeros(space.total_dim(), space.total_dim());
    let re = |x: f64| C64::new(x, 0.0);
    for m in 0..2 {
        h += number_of(&ops.a[m]).matrix() * re(params.modes[m].omega - frame);
        h += number_of(&ops.sigma[m]).matrix() * re(params.dots[m].omega - frame);
    }
    for m in 0..2 {
        let a = ops.a[m].matrix();
        for n in 0..2 {
            let g = params.coupling.get(m, n);
            let sm = ops.sigma[n].matrix();
            let term = a.adjoint() * sm * g.conj();
            h += &term + term.adjoint();
        }
    }
    let omegas = params.drive_amplitudes();
    for n in 0..2 {
        let sp = ops.sigma[n].matrix().adjoint() * (omegas[n] * drive_phase);
        h += &sp + sp.adjoint();
    }
    Operator::new(space.clone(), h).expect("dimension fixed by the space")
}

/// Rotating-frame Hamiltonian (frame at the pump frequency), in μeV.
pub fn build_effective_hamiltonian(params: &SystemParams, space: &CompositeSpace) -> Result<Operator> {
    check_space(params, space)?;
    let ops = SystemOperators::new(space)?;
    Ok(assemble(params, &ops, params.drive.pump_freq, C64::new(1.0, 0.0)))
}

/// Lab-frame Hamiltonian at time `t` (ps), drive phases `e^{∓iω_p t}`.
pub fn build_lab_hamiltonian(params: &SystemParams, space: &CompositeSpace, t: f64) -> Result<Operator> {
    check_space(params, space)?;
    let ops = SystemOperators::new(space)?;
    let phase = C64::from_polar(1.0, -params.drive.pump_freq * t / HBAR_UEV_PS);
    Ok(assemble(params, &ops, 0.0, phase))
}

/// Drive-free single-excitation block in the basis
/// `(dot 1, dot 2, mode 1, mode 2)`, energies relative to ω₁.
pub fn single_excitation_block(params: &SystemParams) -> DMatrix<C64> {
    let w1 = params.modes[0].omega;
    let mut b = DMatrix::<C64>::zeros(4, 4);
    for n in 0..2 {
        b[(n, n)] = C64::new(params.dots[n].omega - w1, 0.0);
    }
    for m in 0..2 {
        b[(2 + m, 2 + m)] = C64::new(params.modes[m].omega - w1, 0.0);
        for n in 0..2 {
            let g = params.coupling.get(m, n);
            b[(2 + m, n)] = g.conj();
            b[(n, 2 + m)] = g;
        }
    }
    b
}

/// Eigenstate of the single-excitation block with the least photonic weight.
#[derive(Debug, Clone, PartialEq)]
pub struct DarkState {
    /// Energy relative to ω₁; driving at `ω_p = ω₁ + offset` is resonant.
    pub offset: f64,
    /// Amplitudes on `(dot 1, dot 2, mode 1, mode 2)`; the first
    /// non-negligible entry is real and positive.
    pub amplitudes: [C64; 4],
    pub photonic_weight: f64,
    /// All four single-excitation energies (ascending), relative to ω₁.
    pub branches: [f64; 4],
}

impl DarkState {
    pub fn exciton_amplitudes(&self) -> [C64; 2] {
        [self.amplitudes[0], self.amplitudes[1]]
    }
}

/// Photonic weights closer than this are treated as tied.
const DARK_TIE_TOL: f64 = 1e-12;

pub fn identify_dark_state(params: &SystemParams) -> Result<DarkState> {
    if params.coupling.max_abs() == 0.0 {
        return Err(Error::DegenerateDarkState(
            "all couplings vanish, every exciton state is dark".into(),
        ));
    }
    let eig = linalg::hermitian_eigen_unchecked(&single_excitation_block(params));
    let weight = |k: usize| eig.vectors[(2, k)].norm_sqr() + eig.vectors[(3, k)].norm_sqr();
    // eigenvalues ascending, so the first minimum wins ties (lower energy)
    let mut best = 0;
    for k in 1..4 {
        if weight(k) < weight(best) - DARK_TIE_TOL {
            best = k;
        }
    }
    let mut amps = [C64::new(0.0, 0.0); 4];
    for (i, a) in amps.iter_mut().enumerate() {
        *a = eig.vectors[(i, best)];
    }
    if let Some(lead) = amps.iter().find(|a| a.norm() > 1e-9).copied() {
        let phase = lead.conj() / lead.norm();
        amps.iter_mut().for_each(|a| *a *= phase);
    }
    Ok(DarkState {
        offset: eig.values[best],
        amplitudes: amps,
        photonic_weight: weight(best),
        branches: [eig.values[0], eig.values[1], eig.values[2], eig.values[3]],
    })
}

/// Named parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// 30° dimer, 901 nm cavity separation.
    Dimer30Dc901,
    /// 30° dimer, 2252 nm cavity separation.
    Dimer30Dc2252,
    /// Symmetric linewidths, lossy dots; a generic weak-pumping configuration.
    GenericWeakPump,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Dimer30Dc901, Preset::Dimer30Dc2252, Preset::GenericWeakPump];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Dimer30Dc901 => "dimer30_dc901",
            Preset::Dimer30Dc2252 => "dimer30_dc2252",
            Preset::GenericWeakPump => "generic_weak_pump",
        }
    }

    pub fn params(self) -> SystemParams {
        // (γ₁, γ₂, ω₂ − ω₁, dot decay)
        let (g1, g2, splitting, dot_gamma) = match self {
            Preset::Dimer30Dc901 => (67.0, 37.0, 700.0, 0.0),
            Preset::Dimer30Dc2252 => (17.0, 16.0, 300.0, 0.0),
            Preset::GenericWeakPump => (40.0, 40.0, 1000.0, 0.66),
        };
        let mut p = SystemParams {
            modes: [
                ModeParams {
                    omega: PRESET_MODE1_ENERGY,
                    gamma: g1,
                    pump: 0.0,
                },
                ModeParams {
                    omega: PRESET_MODE1_ENERGY + splitting,
                    gamma: g2,
                    pump: 0.0,
                },
            ],
            dots: [QdParams {
                omega: PRESET_MODE1_ENERGY,
                gamma: dot_gamma,
                dephasing: 0.0,
            }; 2],
            coupling: CouplingMatrix::bonding_antibonding(PRESET_COUPLING),
            drive: DriveParams {
                amplitude: PRESET_DRIVE,
                phase1: PI,
                phase2: 0.0,
                pump_freq: PRESET_MODE1_ENERGY,
            },
            truncation: [1, 1],
        };
        p.drive_at_dark_state()
            .expect("presets have nonzero couplings");
        p
    }
}

/// Lower normal-mode energy of the presets, 1.3 eV.
pub const PRESET_MODE1_ENERGY: f64 = 1.3e6;
/// ħg shared by every dot/mode pair of the presets.
pub const PRESET_COUPLING: f64 = 110.0;
/// ħΩ₀ of the presets.
pub const PRESET_DRIVE: f64 = 1.0;

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
                Error::UnknownPreset(s.to_string(), names.join(", "))
            })
    }
}

pub fn preset_params(name: &str) -> Result<SystemParams> {
    Ok(name.parse::<Preset>()?.params())
}
