//! Covariance-matrix dynamics and entanglement of Gaussian states.
//!
//! Quadratures are ordered `ξ = (x₁, p₁, x₂, p₂, …)` with `a = (x + ip)/√2`,
//! `[ξ_j, ξ_k] = iJ_jk` and vacuum covariance `I/2`. Entanglement uses the
//! natural logarithm, so a two-mode squeezed vacuum with parameter `r` has
//! `E_N = 2|r|`.

use faer::Mat;

use crate::bdg::{build_bdg, spectrum, Regime};
use crate::error::{Error, Result};
use crate::fock::{evolve, fock_state, second_quantize, FockBasis};
use crate::ladder::{dual_quadratic, FrameTag};
use crate::linalg::{self, c, C64, CMat, RMat};
use crate::quadratic::QuadraticForm;

/// Tolerance for the physicality test `cov + iJ/2 ≥ 0`.
pub const PHYSICALITY_TOL: f64 = 1e-10;

/// Symplectic form `⊕ [[0, 1], [−1, 0]]`.
pub fn symplectic_form(n_modes: usize) -> RMat {
    Mat::from_fn(2 * n_modes, 2 * n_modes, |i, j| {
        if i / 2 != j / 2 {
            0.0
        } else if i % 2 == 0 && j % 2 == 1 {
            1.0
        } else if i % 2 == 1 && j % 2 == 0 {
            -1.0
        } else {
            0.0
        }
    })
}

/// Matrix `W` with `α = Wξ` for the Nambu array `α = (a₁…a_N, a₁†…a_N†)`.
pub fn nambu_to_quadrature(n_modes: usize) -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut w = linalg::zeros(2 * n_modes, 2 * n_modes);
    for i in 0..n_modes {
        w.write(i, 2 * i, c(s, 0.0));
        w.write(i, 2 * i + 1, c(0.0, s));
        w.write(n_modes + i, 2 * i, c(s, 0.0));
        w.write(n_modes + i, 2 * i + 1, c(0.0, -s));
    }
    w
}

fn real_fro(a: &RMat) -> f64 {
    let mut s = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            s += a.read(i, j) * a.read(i, j);
        }
    }
    s.sqrt()
}

fn real_transpose(a: &RMat) -> RMat {
    Mat::from_fn(a.ncols(), a.nrows(), |i, j| a.read(j, i))
}

#[derive(Debug, Clone)]
pub struct GaussianState {
    mean: Vec<f64>,
    cov: RMat,
}

impl GaussianState {
    /// Validates symmetry and `cov + iJ/2 ≥ 0`.
    pub fn new(mean: Vec<f64>, cov: RMat) -> Result<Self> {
        let n = cov.nrows();
        if n % 2 != 0 || cov.ncols() != n || mean.len() != n {
            return Err(Error::DimensionMismatch("covariance must be 2N x 2N with a 2N mean".into()));
        }
        let asym = real_fro(&(&cov - &real_transpose(&cov)));
        if asym > 1e-12 * (1.0 + real_fro(&cov)) {
            return Err(Error::InvalidArgument(format!("covariance is not symmetric (residual {asym:e})")));
        }
        let s = Self { mean, cov };
        let min = s.physicality();
        if min < -PHYSICALITY_TOL {
            return Err(Error::Unphysical { min_eigenvalue: min });
        }
        Ok(s)
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self { mean: vec![0.0; 2 * n_modes], cov: Mat::from_fn(2 * n_modes, 2 * n_modes, |i, j| if i == j { 0.5 } else { 0.0 }) }
    }

    pub fn n_modes(&self) -> usize {
        self.cov.nrows() / 2
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn cov(&self) -> &RMat {
        &self.cov
    }

    /// Smallest eigenvalue of `cov + iJ/2`.
    pub fn physicality(&self) -> f64 {
        let j = symplectic_form(self.n_modes());
        let a = Mat::from_fn(self.cov.nrows(), self.cov.ncols(), |r, s| c(self.cov.read(r, s), 0.5 * j.read(r, s)));
        linalg::eigh(&a).0[0]
    }

    /// `det(2·cov)`, equal to 1 for pure states.
    pub fn purity_determinant(&self) -> f64 {
        let two = Mat::from_fn(self.cov.nrows(), self.cov.ncols(), |i, j| 2.0 * self.cov.read(i, j));
        linalg::eigh_real(&two).0.iter().product()
    }

    /// Symplectic eigenvalues, sorted ascending.
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        symplectic_eigenvalues(&self.cov)
    }

    /// `(S ξ̄, S σ Sᵀ)`.
    pub fn transform(&self, s: &RMat) -> Self {
        let mean = (0..self.mean.len()).map(|i| (0..self.mean.len()).map(|k| s.read(i, k) * self.mean[k]).sum()).collect();
        let cov = &(s * &self.cov) * &real_transpose(s);
        let cov = Mat::from_fn(cov.nrows(), cov.ncols(), |i, j| 0.5 * (cov.read(i, j) + cov.read(j, i)));
        Self { mean, cov }
    }
}

fn symplectic_eigenvalues(cov: &RMat) -> Vec<f64> {
    let n = cov.nrows() / 2;
    let j = symplectic_form(n);
    let ijs = linalg::scale(&linalg::to_complex(&(&j * cov)), c(0.0, 1.0));
    let mut ev: Vec<f64> = linalg::eigvals(&ijs).iter().map(|z| z.re).filter(|x| *x > 0.0).collect();
    if ev.len() != n {
        // Degenerate zero modes; fall back to absolute values of all eigenvalues.
        let mut all: Vec<f64> = linalg::eigvals(&ijs).iter().map(|z| z.norm()).collect();
        all.sort_by(|a, b| a.total_cmp(b));
        ev = all.chunks(2).map(|p| p[0]).collect();
    }
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Real generator `G = J·H_ξ` of the quadrature flow `dξ/dt = Gξ`.
#[derive(Debug, Clone)]
pub struct SymplecticGenerator {
    g: RMat,
}

impl SymplecticGenerator {
    pub fn matrix(&self) -> &RMat {
        &self.g
    }

    pub fn n_modes(&self) -> usize {
        self.g.nrows() / 2
    }

    /// `exp(Gt)`.
    pub fn propagator(&self, t: f64) -> Result<RMat> {
        let gt = linalg::scale(&linalg::to_complex(&self.g), c(t, 0.0));
        Ok(linalg::re_part(&linalg::expm(&gt)?))
    }

    pub fn evolve(&self, s: &GaussianState, t: f64) -> Result<GaussianState> {
        if s.n_modes() != self.n_modes() {
            return Err(Error::DimensionMismatch("state and generator mode counts differ".into()));
        }
        Ok(s.transform(&self.propagator(t)?))
    }
}

/// `‖S J Sᵀ − J‖_F`.
pub fn symplectic_residual(s: &RMat) -> f64 {
    let j = symplectic_form(s.nrows() / 2);
    real_fro(&(&(&(s * &j) * &real_transpose(s)) - &j))
}

/// Real symmetric quadrature Hamiltonian `H_ξ` with `Ĥ = ½ ξᵀ H_ξ ξ + const`.
pub fn quadrature_hamiltonian(q: &QuadraticForm) -> Result<RMat> {
    if !q.is_hermitian() {
        return Err(Error::NonHermitian(format!("residual {:e}", q.hermiticity_residual())));
    }
    let w = nambu_to_quadrature(q.n_modes());
    let hq = linalg::re_part(&(&(&linalg::dagger(&w) * &q.block_matrix()) * &w));
    Ok(Mat::from_fn(hq.nrows(), hq.ncols(), |i, j| 0.5 * (hq.read(i, j) + hq.read(j, i))))
}

pub fn generator_from_quadratic(q: &QuadraticForm) -> Result<SymplecticGenerator> {
    let hq = quadrature_hamiltonian(q)?;
    Ok(SymplecticGenerator { g: &symplectic_form(q.n_modes()) * &hq })
}

/// Two-mode squeezed vacuum.
pub fn tmsv(r: f64) -> GaussianState {
    let (ch, sh) = ((2.0 * r).cosh() / 2.0, (2.0 * r).sinh() / 2.0);
    #[rustfmt::skip]
    let v = [
        ch, 0.0, sh, 0.0,
        0.0, ch, 0.0, -sh,
        sh, 0.0, ch, 0.0,
        0.0, -sh, 0.0, ch,
    ];
    GaussianState { mean: vec![0.0; 4], cov: Mat::from_fn(4, 4, |i, j| v[4 * i + j]) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Natural,
    Two,
}

fn check_partition(n_modes: usize, partition: &[usize]) -> Result<()> {
    if partition.is_empty() || partition.len() >= n_modes {
        return Err(Error::InvalidPartition(format!("{partition:?} does not split {n_modes} modes")));
    }
    let mut seen = vec![false; n_modes];
    for &m in partition {
        if m >= n_modes || seen[m] {
            return Err(Error::InvalidPartition(format!("{partition:?} is not a subset of 0..{n_modes}")));
        }
        seen[m] = true;
    }
    Ok(())
}

/// `Σ max(0, −ln 2ν̃)` over the symplectic eigenvalues of the partially transposed covariance.
pub fn log_negativity(s: &GaussianState, partition: &[usize]) -> Result<f64> {
    log_negativity_with_base(s, partition, LogBase::Natural)
}

pub fn log_negativity_with_base(s: &GaussianState, partition: &[usize], base: LogBase) -> Result<f64> {
    check_partition(s.n_modes(), partition)?;
    let min = s.physicality();
    if min < -PHYSICALITY_TOL {
        return Err(Error::Unphysical { min_eigenvalue: min });
    }
    let flip: Vec<f64> = (0..2 * s.n_modes()).map(|k| if k % 2 == 1 && partition.contains(&(k / 2)) { -1.0 } else { 1.0 }).collect();
    let pt = Mat::from_fn(s.cov.nrows(), s.cov.ncols(), |i, j| flip[i] * flip[j] * s.cov.read(i, j));
    let e: f64 = symplectic_eigenvalues(&pt).iter().map(|nu| (-(2.0 * nu).ln()).max(0.0)).sum();
    Ok(match base {
        LogBase::Natural => e,
        LogBase::Two => e / std::f64::consts::LN_2,
    })
}

/// Bogoliubov vacuum covariance `σ = (i/2)·sign(iJH_ξ)·J` via Newton sign iteration.
pub fn ground_state(q: &QuadraticForm) -> Result<GaussianState> {
    let hq = quadrature_hamiltonian(q)?;
    let rep = spectrum(&build_bdg(q), 1e-9)?;
    if rep.regime != Regime::Real {
        let worst = rep.eigenvalues.iter().copied().max_by(|a, b| a.im.abs().total_cmp(&b.im.abs())).unwrap_or_default();
        return Err(Error::Unstable { eigenvalue: worst });
    }
    let (hev, _) = linalg::eigh_real(&hq);
    if hev[0] <= 0.0 {
        return Err(Error::Unstable { eigenvalue: c(hev[0], 0.0) });
    }
    let n = q.n_modes();
    let j = symplectic_form(n);
    let mut x = linalg::scale(&linalg::to_complex(&(&j * &hq)), c(0.0, 1.0));
    let mut converged = false;
    for _ in 0..100 {
        let inv = linalg::inverse(&x)?;
        let mut next = linalg::scale(&x, c(0.5, 0.0));
        linalg::add_scaled(&mut next, &inv, c(0.5, 0.0));
        let delta = linalg::fro_diff(&next, &x);
        x = next;
        if delta <= 1e-14 * linalg::fro(&x) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NotConverged("matrix sign iteration".into()));
    }
    let sigma = linalg::re_part(&linalg::scale(&(&x * &linalg::to_complex(&j)), c(0.0, 0.5)));
    let cov = Mat::from_fn(2 * n, 2 * n, |i, k| 0.5 * (sigma.read(i, k) + sigma.read(k, i)));
    GaussianState::new(vec![0.0; 2 * n], cov)
}

/// `r = ½ artanh(2|P₁₂| / (M₁₁ + M₂₂))` for a two-mode pairing form.
pub fn two_mode_squeezing(q: &QuadraticForm) -> Result<f64> {
    if q.n_modes() != 2 || !q.is_hermitian() {
        return Err(Error::InvalidArgument("expected a Hermitian two-mode form".into()));
    }
    let m = q.m();
    if m.read(0, 1).norm() > 0.0 || q.p().read(0, 0).norm() > 0.0 || q.p().read(1, 1).norm() > 0.0 {
        return Err(Error::InvalidArgument("expected diagonal detunings and inter-mode pairing only".into()));
    }
    let x = 2.0 * q.p().read(0, 1).norm() / (m.read(0, 0).re + m.read(1, 1).re);
    if !(x.abs() < 1.0) {
        return Err(Error::Unstable { eigenvalue: c(x, 0.0) });
    }
    Ok(0.5 * x.atanh())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntanglementScenario {
    Ground,
    ResonantEvolution { t: f64 },
}

#[derive(Debug, Clone)]
pub struct DualEntanglementReport {
    /// Entanglement computed in the Hermitian frame.
    pub e_n: f64,
    /// Hamiltonian of the dual system whose PH entanglement this is.
    pub dual: QuadraticForm,
    /// Frame tags of the dual state.
    pub frames: Vec<FrameTag>,
    pub scenario: EntanglementScenario,
}

/// PH entanglement of the dual of `q` on `mode`, computed through the
/// Hermitian system `q` itself. Duality makes the two numbers equal.
pub fn dual_frame_entanglement(
    q: &QuadraticForm,
    mode: usize,
    theta: f64,
    scenario: EntanglementScenario,
) -> Result<DualEntanglementReport> {
    let dual = dual_quadratic(q, mode, theta)?;
    let state = match scenario {
        EntanglementScenario::Ground => ground_state(q)?,
        EntanglementScenario::ResonantEvolution { t } => {
            generator_from_quadratic(q)?.evolve(&GaussianState::vacuum(q.n_modes()), t)?
        }
    };
    let e_n = log_negativity(&state, &[mode])?;
    let frames = (0..q.n_modes()).map(|k| if k == mode { FrameTag::hole(theta) } else { FrameTag::Particle }).collect();
    Ok(DualEntanglementReport { e_n, dual, frames, scenario })
}

/// `(t, E_N)` along the Hamiltonian flow of `q`.
pub fn entanglement_trace(
    q: &QuadraticForm,
    initial: &GaussianState,
    partition: &[usize],
    times: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let g = generator_from_quadratic(q)?;
    times.iter().map(|&t| Ok((t, log_negativity(&g.evolve(initial, t)?, partition)?))).collect()
}

pub fn format_entanglement_trace(rows: &[(f64, f64)]) -> String {
    let mut out = String::from("t,E_N\n");
    for (t, e) in rows {
        out.push_str(&format!("{t:e},{e:e}\n"));
    }
    out
}

/// Log-negativity `2 ln Σ sᵢ` of a pure two-mode Fock state, from the
/// singular values of its coefficient matrix.
pub fn pure_state_log_negativity(basis: &FockBasis, psi: &[C64]) -> Result<f64> {
    if basis.n_modes() != 2 || psi.len() != basis.dim() {
        return Err(Error::DimensionMismatch("expected a two-mode state vector".into()));
    }
    let norm = linalg::vnorm(psi);
    let (r, s) = (basis.cutoffs()[0] + 1, basis.cutoffs()[1] + 1);
    let cm = Mat::from_fn(r, s, |i, j| psi[basis.index(&[i, j]).expect("in range")] / norm);
    let sum: f64 = linalg::singular_values(&cm).iter().sum();
    Ok(2.0 * sum.ln())
}

/// Truncated-Fock evolution of the two-mode vacuum under `q`, followed by
/// [`pure_state_log_negativity`].
pub fn fock_log_negativity(q: &QuadraticForm, t: f64, cutoff: usize) -> Result<f64> {
    let basis = FockBasis::uniform(2, cutoff)?;
    let h = second_quantize(q, &basis)?;
    let psi = evolve(&h, &fock_state(&basis, &[0, 0])?, t, true)?;
    pure_state_log_negativity(&basis, &psi.state)
}
