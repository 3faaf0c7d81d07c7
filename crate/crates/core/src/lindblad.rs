//! Single-mode driven-dissipative dynamics.
//!
//! `dρ/dt = −i[H, ρ] + Σ γ/2 (2zρz† − z†zρ − ρz†z)` with
//! `H = Δ a†a + λ a† + λ* a` and `z = a` (loss) or `z = a†` (pump).
//! Superoperators use column stacking: `vec(AρB) = (Bᵀ ⊗ A) vec ρ`.

use faer::Mat;

use crate::error::{Error, Result};
use crate::fock::{displacement_matrix, ladder_matrix, FockBasis};
use crate::ladder::{ph_substitute, Direction, LadderPolynomial};
use crate::linalg::{self, c, dagger, kron, transpose, C64, CMat, ONE, ZERO};

/// Largest `dim²` accepted for a dense superoperator.
pub const SUPEROPERATOR_DIM_LIMIT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Jump {
    Loss,
    Pump,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    pub jump: Jump,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DissipativeModel {
    pub delta: f64,
    pub lambda: C64,
    pub channels: Vec<Channel>,
}

impl DissipativeModel {
    pub fn new(delta: f64, lambda: C64, channels: Vec<Channel>) -> Result<Self> {
        for ch in &channels {
            if !(ch.rate > 0.0) || !ch.rate.is_finite() {
                return Err(Error::InvalidArgument(format!("rate must be positive, got {}", ch.rate)));
            }
        }
        if !delta.is_finite() || !lambda.is_finite() {
            return Err(Error::InvalidArgument("detuning and drive must be finite".into()));
        }
        Ok(Self { delta, lambda, channels })
    }

    pub fn loss(delta: f64, lambda: C64, gamma: f64) -> Result<Self> {
        Self::new(delta, lambda, vec![Channel { jump: Jump::Loss, rate: gamma }])
    }

    pub fn pump(delta: f64, lambda: C64, gamma: f64) -> Result<Self> {
        Self::new(delta, lambda, vec![Channel { jump: Jump::Pump, rate: gamma }])
    }

    pub fn hamiltonian(&self) -> LadderPolynomial {
        let mut h = LadderPolynomial::number(1, 0).scale(c(self.delta, 0.0));
        h = &h + &LadderPolynomial::creation(1, 0).scale(self.lambda);
        &h + &LadderPolynomial::annihilation(1, 0).scale(self.lambda.conj())
    }

    fn single_channel(&self, want: Jump) -> Result<f64> {
        match self.channels.as_slice() {
            [ch] if ch.jump == want => Ok(ch.rate),
            _ => Err(Error::WrongChannel(format!("expected a single {want:?} channel, got {:?}", self.channels))),
        }
    }

    /// Coherent-state amplitude `−iλ/(γ/2 + iΔ)` of the loss steady state.
    pub fn loss_amplitude(&self) -> Result<C64> {
        let g = self.single_channel(Jump::Loss)?;
        Ok(c(0.0, -1.0) * self.lambda / c(g / 2.0, self.delta))
    }

    /// Displacement `iλ/(γ/2 − iΔ)` of the formal pump fixed point.
    pub fn pump_amplitude(&self) -> Result<C64> {
        let g = self.single_channel(Jump::Pump)?;
        Ok(c(0.0, 1.0) * self.lambda / c(g / 2.0, -self.delta))
    }
}

fn jump_poly(j: Jump) -> LadderPolynomial {
    match j {
        Jump::Loss => LadderPolynomial::annihilation(1, 0),
        Jump::Pump => LadderPolynomial::creation(1, 0),
    }
}

/// Truncated matrices `(H, [(γ, z)])` of the model.
fn model_matrices(m: &DissipativeModel, basis: &FockBasis) -> Result<(CMat, Vec<(f64, CMat)>)> {
    if basis.n_modes() != 1 {
        return Err(Error::InvalidArgument("the dissipative model is single-mode".into()));
    }
    let a = ladder_matrix(basis, 0)?;
    let ad = dagger(&a);
    let mut h = linalg::scale(&(&ad * &a), c(m.delta, 0.0));
    linalg::add_scaled(&mut h, &ad, m.lambda);
    linalg::add_scaled(&mut h, &a, m.lambda.conj());
    let jumps = m
        .channels
        .iter()
        .map(|ch| (ch.rate, if ch.jump == Jump::Loss { a.clone() } else { ad.clone() }))
        .collect();
    Ok((h, jumps))
}

pub fn liouvillian(m: &DissipativeModel, basis: &FockBasis) -> Result<CMat> {
    let d = basis.dim();
    if d * d > SUPEROPERATOR_DIM_LIMIT {
        return Err(Error::DimensionLimit { dim: d * d, limit: SUPEROPERATOR_DIM_LIMIT });
    }
    let (h, jumps) = model_matrices(m, basis)?;
    let id = linalg::identity(d);
    let mut l = linalg::scale(&kron(&id, &h), c(0.0, -1.0));
    linalg::add_scaled(&mut l, &kron(&transpose(&h), &id), c(0.0, 1.0));
    for (g, z) in jumps {
        let zd = dagger(&z);
        let zdz = &zd * &z;
        linalg::add_scaled(&mut l, &kron(&linalg::conj(&z), &z), c(g, 0.0));
        linalg::add_scaled(&mut l, &kron(&id, &zdz), c(-g / 2.0, 0.0));
        linalg::add_scaled(&mut l, &kron(&transpose(&zdz), &id), c(-g / 2.0, 0.0));
    }
    Ok(l)
}

pub fn vectorize(rho: &CMat) -> Vec<C64> {
    let d = rho.nrows();
    (0..d * d).map(|k| rho.read(k % d, k / d)).collect()
}

pub fn unvectorize(v: &[C64]) -> CMat {
    let d = (v.len() as f64).sqrt().round() as usize;
    Mat::from_fn(d, d, |i, j| v[i + d * j])
}

pub fn trace(rho: &CMat) -> C64 {
    (0..rho.nrows()).map(|i| rho.read(i, i)).sum()
}

/// `dρ/dt` in matrix form for an arbitrary (possibly non-adjoint) jump pair.
fn lindblad_rhs(h: &CMat, jumps: &[(f64, CMat, CMat)], rho: &CMat) -> CMat {
    let mut out = linalg::scale(&(&(h * rho) - &(rho * h)), c(0.0, -1.0));
    for (g, z, zd) in jumps {
        let zdz = zd * z;
        linalg::add_scaled(&mut out, &(&(z * rho) * zd), c(*g, 0.0));
        linalg::add_scaled(&mut out, &(&zdz * rho), c(-g / 2.0, 0.0));
        linalg::add_scaled(&mut out, &(rho * &zdz), c(-g / 2.0, 0.0));
    }
    out
}

/// `L(ρ)` evaluated directly on the density matrix.
pub fn apply_liouvillian(m: &DissipativeModel, basis: &FockBasis, rho: &CMat) -> Result<CMat> {
    let (h, jumps) = model_matrices(m, basis)?;
    let jumps: Vec<(f64, CMat, CMat)> = jumps.into_iter().map(|(g, z)| (g, dagger(&z), z)).map(|(g, zd, z)| (g, z, zd)).collect();
    Ok(lindblad_rhs(&h, &jumps, rho))
}

fn hermitize(a: &CMat) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| (a.read(i, j) + a.read(j, i).conj()) * 0.5)
}

/// RK4 integration of the master equation with Hermitian projection after each step.
pub fn integrate(m: &DissipativeModel, basis: &FockBasis, rho0: &CMat, t: f64, steps: usize) -> Result<CMat> {
    let (h, jumps) = model_matrices(m, basis)?;
    let jumps: Vec<(f64, CMat, CMat)> = jumps.into_iter().map(|(g, z)| { let zd = dagger(&z); (g, z, zd) }).collect();
    let dt = t / steps.max(1) as f64;
    let mut rho = rho0.clone();
    for _ in 0..steps.max(1) {
        let k1 = lindblad_rhs(&h, &jumps, &rho);
        let mut tmp = rho.clone();
        linalg::add_scaled(&mut tmp, &k1, c(dt / 2.0, 0.0));
        let k2 = lindblad_rhs(&h, &jumps, &tmp);
        let mut tmp = rho.clone();
        linalg::add_scaled(&mut tmp, &k2, c(dt / 2.0, 0.0));
        let k3 = lindblad_rhs(&h, &jumps, &tmp);
        let mut tmp = rho.clone();
        linalg::add_scaled(&mut tmp, &k3, c(dt, 0.0));
        let k4 = lindblad_rhs(&h, &jumps, &tmp);
        linalg::add_scaled(&mut rho, &k1, c(dt / 6.0, 0.0));
        linalg::add_scaled(&mut rho, &k2, c(dt / 3.0, 0.0));
        linalg::add_scaled(&mut rho, &k3, c(dt / 3.0, 0.0));
        linalg::add_scaled(&mut rho, &k4, c(dt / 6.0, 0.0));
        rho = hermitize(&rho);
        if !linalg::all_finite(&rho) {
            return Err(Error::NonFinite("master-equation integrator"));
        }
    }
    Ok(rho)
}

/// Largest real part of the linear moment dynamics of `⟨a⟩` and `⟨a†a⟩`,
/// computed exactly from the adjoint generator
/// `L†(A) = i[H, A] + Σ γ/2 (2z†Az − z†zA − Az†z)`.
pub fn moment_abscissa(m: &DissipativeModel) -> f64 {
    let h = m.hamiltonian();
    let adjoint = |a: &LadderPolynomial| {
        let mut out = h.commutator(a).scale(c(0.0, 1.0));
        for ch in &m.channels {
            let z = jump_poly(ch.jump);
            let zd = z.adjoint();
            let zdz = &zd * &z;
            let term = &(&(&(&zd * a) * &z).scale(c(2.0, 0.0)) - &(&zdz * a)) - &(a * &zdz);
            out = &out + &term.scale(c(ch.rate / 2.0, 0.0));
        }
        out
    };
    let ra = adjoint(&LadderPolynomial::annihilation(1, 0)).coefficient(&[(0, 1)]).re;
    let rn = adjoint(&LadderPolynomial::number(1, 0)).coefficient(&[(1, 1)]).re;
    ra.max(rn)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteadyMethod {
    NullSpace,
    TimeIntegration,
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: CMat,
    pub method: SteadyMethod,
    /// `‖L vec ρ‖₂`.
    pub residual: f64,
}

/// Sparse null-space solve with the first row replaced by the trace functional;
/// falls back to time integration when the solve is singular or inaccurate.
pub fn steady_state(l: &CMat) -> Result<SteadyState> {
    let n = l.nrows();
    let d = (n as f64).sqrt().round() as usize;
    if d * d != n || l.ncols() != n {
        return Err(Error::DimensionMismatch("superoperator must be d² x d²".into()));
    }
    let mut a = l.clone();
    for j in 0..n {
        a.write(0, j, if j % (d + 1) == 0 { ONE } else { ZERO });
    }
    let mut rhs = vec![ZERO; n];
    rhs[0] = ONE;
    if let Ok(v) = linalg::sparse_solve(&a, &rhs) {
        let residual = linalg::vnorm(&linalg::matvec(l, &v));
        if residual < 1e-8 {
            return Ok(SteadyState { rho: hermitize(&unvectorize(&v)), method: SteadyMethod::NullSpace, residual });
        }
    }
    steady_by_integration(l, d)
}

fn steady_by_integration(l: &CMat, d: usize) -> Result<SteadyState> {
    let mut v = vec![ZERO; d * d];
    v[0] = ONE;
    let step = linalg::scale(l, c(1.0, 0.0));
    for _ in 0..10_000 {
        v = linalg::expm_multiply(&step, &v)?.vector();
        let tr: C64 = (0..d).map(|i| v[i * (d + 1)]).sum();
        for x in v.iter_mut() {
            *x /= tr;
        }
        let residual = linalg::vnorm(&linalg::matvec(l, &v));
        if residual < 1e-10 {
            return Ok(SteadyState { rho: hermitize(&unvectorize(&v)), method: SteadyMethod::TimeIntegration, residual });
        }
    }
    Err(Error::NotConverged("time integration did not reach a steady state".into()))
}

/// `⌈|ā|² + 10|ā| + 10⌉`.
pub fn adequate_cutoff(abar: C64) -> usize {
    let r = abar.norm();
    (r * r + 10.0 * r + 10.0).ceil() as usize
}

/// Coherent-state amplitudes `e^{−|α|²/2} αⁿ/√n!` up to `cutoff`.
pub fn coherent_amplitudes(alpha: C64, cutoff: usize) -> Vec<C64> {
    let mut v = Vec::with_capacity(cutoff + 1);
    let mut cur = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..=cutoff {
        v.push(cur);
        cur = cur * alpha / ((n + 1) as f64).sqrt();
    }
    v
}

#[derive(Debug, Clone)]
pub struct SteadyStateReport {
    pub a_bar: C64,
    pub expected_a_bar: C64,
    pub mean_n: f64,
    pub fidelity: f64,
    pub cutoff: usize,
    pub residual: f64,
    pub min_eigenvalue: f64,
    pub method: SteadyMethod,
}

impl SteadyStateReport {
    /// `key = value` lines: a_bar_re, a_bar_im, mean_n, fidelity, cutoff, residual.
    pub fn to_kv(&self) -> String {
        format!(
            "a_bar_re = {:e}\na_bar_im = {:e}\nmean_n = {:e}\nfidelity = {:e}\ncutoff = {}\nresidual = {:e}\n",
            self.a_bar.re, self.a_bar.im, self.mean_n, self.fidelity, self.cutoff, self.residual
        )
    }
}

/// Solves the loss steady state and compares it with the coherent state `|ā⟩`.
/// A cutoff of `None` applies the adequacy rule.
pub fn solve_loss_steady_state(m: &DissipativeModel, cutoff: Option<usize>) -> Result<SteadyStateReport> {
    let abscissa = moment_abscissa(m);
    if abscissa >= 0.0 {
        return Err(Error::NoNormalizableSteadyState { abscissa });
    }
    let expected = m.loss_amplitude()?;
    let rule = adequate_cutoff(expected);
    let cutoff = cutoff.unwrap_or(rule);
    if cutoff < rule {
        return Err(Error::InadequateCutoff { cutoff, required: rule });
    }
    let basis = FockBasis::single(cutoff)?;
    let l = liouvillian(m, &basis)?;
    let ss = steady_state(&l)?;
    let a = ladder_matrix(&basis, 0)?;
    let a_bar = trace(&(&a * &ss.rho));
    let mean_n = trace(&(&(&dagger(&a) * &a) * &ss.rho)).re;
    let coh = coherent_amplitudes(expected, cutoff);
    let fidelity = linalg::vdot(&coh, &linalg::matvec(&ss.rho, &coh)).re;
    let (ev, _) = linalg::eigh(&ss.rho);
    Ok(SteadyStateReport {
        a_bar,
        expected_a_bar: expected,
        mean_n,
        fidelity,
        cutoff,
        residual: ss.residual,
        min_eigenvalue: ev.first().copied().unwrap_or(0.0),
        method: ss.method,
    })
}

/// General entry point: rejects pump-dominated models, otherwise solves the null space.
pub fn steady_state_for(m: &DissipativeModel, basis: &FockBasis) -> Result<SteadyState> {
    let abscissa = moment_abscissa(m);
    if abscissa >= 0.0 {
        return Err(Error::NoNormalizableSteadyState { abscissa });
    }
    steady_state(&liouvillian(m, basis)?)
}

#[derive(Debug, Clone)]
pub struct PumpResidualRow {
    pub cutoff: usize,
    /// Interior Frobenius norm of `L(ρ)` in the hole frame.
    pub residual: f64,
    pub trace: C64,
    /// Same quantity from explicit truncated `Ω` vectors in the particle frame.
    pub explicit_residual: f64,
}

#[derive(Debug, Clone)]
pub struct PumpResidualReport {
    pub a_bar: C64,
    pub theta: f64,
    pub rows: Vec<PumpResidualRow>,
    /// Residuals never increase across the sweep, up to `floor`.
    pub non_increasing: bool,
    pub floor: f64,
}

/// Roundoff floor below which residual fluctuations are not counted as increases.
pub const PUMP_RESIDUAL_FLOOR: f64 = 1e-12;

fn substituted_matrix(p: &LadderPolynomial, theta: f64, basis: &FockBasis) -> Result<CMat> {
    let s = ph_substitute(p, 0, theta, Direction::Inverse)?;
    crate::fock::second_quantize_poly(&s, basis)
}

/// Residual table of the displaced hole vacuum `D(ā)|0⟩_h ⟨0|_h̄ D⁻¹(ā)` under the pump Liouvillian.
///
/// The candidate and the generator are both mapped to the hole frame by
/// conjugation with `Ω`, so the hole vacuum becomes `|0⟩⟨0|` and the
/// displacement becomes `exp(βa† + β*a)` with `β = −iā*e^{iθ}`. Matrix
/// elements there converge with the cutoff.
pub fn pump_formal_residual(m: &DissipativeModel, theta: f64, cutoffs: &[usize]) -> Result<PumpResidualReport> {
    let gamma = m.single_channel(Jump::Pump)?;
    let a_bar = m.pump_amplitude()?;
    let beta = c(0.0, -1.0) * a_bar.conj() * C64::from_polar(1.0, theta);
    let h = m.hamiltonian();
    let z = LadderPolynomial::creation(1, 0);
    let zd = LadderPolynomial::annihilation(1, 0);
    let mut rows = Vec::with_capacity(cutoffs.len());
    for &cut in cutoffs {
        let basis = FockBasis::single(cut)?;
        let a = ladder_matrix(&basis, 0)?;
        let mut g = linalg::scale(&dagger(&a), beta);
        linalg::add_scaled(&mut g, &a, beta.conj());
        let d = linalg::expm(&g)?;
        let dinv = linalg::expm(&linalg::scale(&g, -ONE))?;
        let mut vac = linalg::zeros(cut + 1, cut + 1);
        vac.write(0, 0, ONE);
        let sigma = &(&d * &vac) * &dinv;
        let hh = substituted_matrix(&h, theta, &basis)?;
        let zh = substituted_matrix(&z, theta, &basis)?;
        let zdh = substituted_matrix(&zd, theta, &basis)?;
        let rhs = lindblad_rhs(&hh, &[(gamma, zh, zdh)], &sigma);
        let levels = basis.interior_levels()[0];
        let residual = block_norm(&rhs, levels);

        let explicit_residual = explicit_pump_residual(m, &basis, theta, a_bar).unwrap_or(f64::INFINITY);
        rows.push(PumpResidualRow { cutoff: cut, residual, trace: trace(&sigma), explicit_residual });
    }
    let non_increasing = rows.windows(2).all(|w| w[1].residual <= w[0].residual.max(PUMP_RESIDUAL_FLOOR));
    Ok(PumpResidualReport { a_bar, theta, rows, non_increasing, floor: PUMP_RESIDUAL_FLOOR })
}

fn block_norm(a: &CMat, levels: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..levels.min(a.nrows()) {
        for j in 0..levels.min(a.ncols()) {
            s += a.read(i, j).norm_sqr();
        }
    }
    s.sqrt()
}

/// Particle-frame residual from explicit truncated hole vectors; grows with the cutoff.
fn explicit_pump_residual(m: &DissipativeModel, basis: &FockBasis, theta: f64, a_bar: C64) -> Result<f64> {
    let om = crate::fock::omega_matrix(basis, theta)?;
    let pair = crate::fock::hole_fock_pair(&om, 0)?;
    let d = displacement_matrix(basis, 0, a_bar)?;
    let ket = linalg::matvec(&d, &pair.right_fock());
    let bra = linalg::matvec(&d, &pair.left_fock());
    let rho = Mat::from_fn(ket.len(), bra.len(), |i, j| ket[i] * bra[j].conj());
    let rhs = apply_liouvillian(m, basis, &rho)?;
    Ok(block_norm(&rhs, basis.interior_levels()[0]))
}
