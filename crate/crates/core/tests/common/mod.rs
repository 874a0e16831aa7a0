#![allow(dead_code)]

use dimerqd::model::{preset_params, SystemParams};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

pub const HBAR: f64 = 658.2119569;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Small deterministic generator so oracle inputs are reproducible.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn uniform(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn complex_matrix(&mut self, n: usize) -> DMatrix<C64> {
        DMatrix::from_fn(n, n, |_, _| C64::new(self.range(-1.0, 1.0), self.range(-1.0, 1.0)))
    }

    /// Haar-ish unitary from the QR of a random complex matrix.
    pub fn unitary(&mut self, n: usize) -> DMatrix<C64> {
        self.complex_matrix(n).qr().q()
    }

    /// Random density matrix of dimension `n` with full rank.
    pub fn density(&mut self, n: usize) -> DMatrix<C64> {
        let a = self.complex_matrix(n);
        let m = &a * a.adjoint();
        let tr = m.trace();
        m / tr
    }
}

/// A perturbed preset: random rates, splittings, drive and a complex coupling.
pub fn random_params(rng: &mut Lcg, truncation: usize) -> SystemParams {
    let mut p = preset_params("dimer30_dc901").unwrap();
    p.modes[0].gamma = rng.range(1.0, 80.0);
    p.modes[1].gamma = rng.range(1.0, 80.0);
    p.modes[0].pump = rng.range(0.0, 1.0);
    p.modes[1].pump = rng.range(0.0, 1.0);
    p.set_splitting(rng.range(50.0, 1500.0));
    for d in &mut p.dots {
        d.gamma = rng.range(0.0, 5.0);
        d.dephasing = rng.range(0.0, 5.0);
    }
    p.set_dot_detuning(rng.range(-30.0, 30.0));
    p.coupling.0[0][1] = C64::from_polar(rng.range(50.0, 150.0), rng.range(0.0, 6.0));
    p.drive.amplitude = rng.range(0.1, 5.0);
    p.drive.phase1 = rng.range(0.0, 6.3);
    p.drive.phase2 = rng.range(0.0, 6.3);
    p.set_pump_detuning(rng.range(-100.0, 100.0));
    p.with_truncation(truncation)
}

pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

/// `op` on factor `pos` of a product space with local dimensions `dims`.
pub fn local(op: &DMatrix<C64>, dims: &[usize], pos: usize) -> DMatrix<C64> {
    let mut out = DMatrix::<C64>::identity(1, 1);
    for (k, &d) in dims.iter().enumerate() {
        let f = if k == pos { op.clone() } else { DMatrix::identity(d, d) };
        out = kron(&out, &f);
    }
    out
}

pub fn lowering(levels: usize) -> DMatrix<C64> {
    DMatrix::from_fn(levels, levels, |i, j| if j == i + 1 { c((j as f64).sqrt()) } else { c(0.0) })
}

/// Operators of the dimer built directly from Kronecker products:
/// `(σ₁, σ₂, a₁, a₂)`.
pub fn dimer_operators(p: &SystemParams) -> [DMatrix<C64>; 4] {
    let dims = [2, 2, p.truncation[0] + 1, p.truncation[1] + 1];
    [
        local(&lowering(2), &dims, 0),
        local(&lowering(2), &dims, 1),
        local(&lowering(dims[2]), &dims, 2),
        local(&lowering(dims[3]), &dims, 3),
    ]
}

/// Rotating-frame Hamiltonian written out term by term.
pub fn oracle_hamiltonian(p: &SystemParams) -> DMatrix<C64> {
    let [s1, s2, a1, a2] = dimer_operators(p);
    let wp = p.drive.pump_freq;
    let sig = [s1, s2];
    let a = [a1, a2];
    let mut h = DMatrix::<C64>::zeros(sig[0].nrows(), sig[0].nrows());
    for m in 0..2 {
        h += a[m].adjoint() * &a[m] * c(p.modes[m].omega - wp);
        h += sig[m].adjoint() * &sig[m] * c(p.dots[m].omega - wp);
    }
    for m in 0..2 {
        for n in 0..2 {
            let g = p.coupling.0[m][n];
            let t = a[m].adjoint() * &sig[n] * g.conj();
            h += &t + t.adjoint();
        }
    }
    let phases = [p.drive.phase1, p.drive.phase2];
    for n in 0..2 {
        let t = sig[n].adjoint() * C64::from_polar(p.drive.amplitude, phases[n]);
        h += &t + t.adjoint();
    }
    h
}

/// Dense generator in 1/ps from column-stacking Kronecker identities.
pub fn oracle_liouvillian(p: &SystemParams) -> DMatrix<C64> {
    let h = oracle_hamiltonian(p);
    let n = h.nrows();
    let id = DMatrix::<C64>::identity(n, n);
    let mut l = (kron(&id, &h) - kron(&h.transpose(), &id)) * C64::new(0.0, -1.0 / HBAR);
    let [s1, s2, a1, a2] = dimer_operators(p);
    let mut jumps: Vec<(DMatrix<C64>, f64)> = vec![
        (a1.clone(), p.modes[0].gamma),
        (a2.clone(), p.modes[1].gamma),
        (a1.adjoint(), p.modes[0].pump),
        (a2.adjoint(), p.modes[1].pump),
        (s1.clone(), p.dots[0].gamma),
        (s2.clone(), p.dots[1].gamma),
    ];
    jumps.push((s1.adjoint() * &s1, p.dots[0].dephasing));
    jumps.push((s2.adjoint() * &s2, p.dots[1].dephasing));
    for (cj, rate) in jumps {
        if rate == 0.0 {
            continue;
        }
        let cdc = cj.adjoint() * &cj;
        let d = kron(&cj.map(|z| z.conj()), &cj) - kron(&id, &cdc) * c(0.5) - kron(&cdc.transpose(), &id) * c(0.5);
        l += d * c(rate / HBAR);
    }
    l
}

/// `exp(m)` by scaling and squaring with a Taylor core; independent of
/// the crate's integrator.
pub fn expm(m: &DMatrix<C64>) -> DMatrix<C64> {
    let norm = m.iter().map(|z| z.norm()).sum::<f64>();
    let s = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
    let a = m / c(2f64.powi(s));
    let n = m.nrows();
    let mut term = DMatrix::<C64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..=24 {
        term = &term * &a / c(k as f64);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Column-stacked vector of a matrix.
pub fn vec_of(m: &DMatrix<C64>) -> nalgebra::DVector<C64> {
    nalgebra::DVector::from_column_slice(m.as_slice())
}
