use faer::Mat;

use crate::bdg::build_bdg;
use crate::error::{Error, Result};
use crate::fock::basis::FockBasis;
use crate::fock::omega::omega_on_mode;
use crate::fock::ops::{ladder_matrix, second_quantize};
use crate::ladder::dual_quadratic;
use crate::linalg::{self, c, dagger, C64, CMat, ONE, ZERO};
use crate::quadratic::QuadraticForm;

/// Result of a (possibly non-unitary) evolution.
#[derive(Debug, Clone)]
pub struct Evolved {
    /// `ψ(t)`, or its unit-norm direction when renormalized.
    pub state: Vec<C64>,
    /// `ln ‖exp(−iHt) ψ0‖`.
    pub log_norm: f64,
}

/// `ψ(t) = exp(−iHt) ψ0`.
pub fn evolve(h: &CMat, psi0: &[C64], t: f64, renormalize: bool) -> Result<Evolved> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time must be finite, got {t}")));
    }
    if h.nrows() != psi0.len() || h.ncols() != psi0.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} generator applied to a length-{} state",
            h.nrows(),
            h.ncols(),
            psi0.len()
        )));
    }
    let gen = linalg::scale(h, c(0.0, -t));
    let act = linalg::expm_multiply(&gen, psi0)?;
    let state = if renormalize { act.direction.clone() } else { act.vector() };
    if state.iter().any(|x| !x.is_finite()) || !act.log_norm.is_finite() {
        return Err(Error::NonFinite("evolve"));
    }
    Ok(Evolved { state, log_norm: act.log_norm })
}

pub fn fock_state(basis: &FockBasis, occupation: &[usize]) -> Result<Vec<C64>> {
    let idx = basis
        .index(occupation)
        .ok_or_else(|| Error::InvalidArgument(format!("occupation {occupation:?} is outside the basis")))?;
    let mut v = vec![ZERO; basis.dim()];
    v[idx] = ONE;
    Ok(v)
}

/// Frame-exchange matrix `K` with `β = Kα`: rows `i` and `N+i` swapped with
/// phases `−ie^{iθ}` and `−ie^{−iθ}`.
pub fn frame_exchange_matrix(n_modes: usize, mode: usize, theta: f64) -> CMat {
    let n = n_modes;
    let e = C64::from_polar(1.0, theta);
    let mi = c(0.0, -1.0);
    Mat::from_fn(2 * n, 2 * n, |r, col| {
        if r == mode {
            if col == n + mode {
                mi * e
            } else {
                ZERO
            }
        } else if r == n + mode {
            if col == mode {
                mi * e.conj()
            } else {
                ZERO
            }
        } else if r == col {
            ONE
        } else {
            ZERO
        }
    })
}

#[derive(Debug, Clone)]
pub struct DualityEvolutionReport {
    /// `‖exp(−i𝓗̃t) − K⁻¹ exp(−i𝓗t) K‖` (Frobenius).
    pub heisenberg_residual: f64,
    /// `‖𝓗̃ − K⁻¹𝓗K‖` (Frobenius).
    pub generator_residual: f64,
    /// `(cutoff, interior ‖exp(−iH̃t)Ω⁻¹ψ0 − Ω⁻¹exp(−iHt)ψ0‖)`.
    pub schrodinger_table: Vec<(usize, f64)>,
    /// Whether the Schrödinger-level residual is non-increasing across the table.
    pub schrodinger_converged: bool,
}

/// Two-level duality check for `q` and `dual_quadratic(q, mode, θ)`.
pub fn duality_evolution_check(
    q: &QuadraticForm,
    mode: usize,
    theta: f64,
    t: f64,
    cutoffs: &[usize],
    initial: &[usize],
) -> Result<DualityEvolutionReport> {
    let dual = dual_quadratic(q, mode, theta)?;
    let h = build_bdg(q);
    let hd = build_bdg(&dual);
    let k = frame_exchange_matrix(q.n_modes(), mode, theta);
    let kinv = linalg::inverse(&k)?;
    let similar = &(&kinv * h.matrix()) * &k;
    let generator_residual = linalg::fro_diff(hd.matrix(), &similar);
    let u = linalg::expm(&linalg::scale(h.matrix(), c(0.0, -t)))?;
    let ud = linalg::expm(&linalg::scale(hd.matrix(), c(0.0, -t)))?;
    let heisenberg_residual = linalg::fro_diff(&ud, &(&(&kinv * &u) * &k));

    let mut schrodinger_table = Vec::with_capacity(cutoffs.len());
    for &cut in cutoffs {
        let basis = FockBasis::uniform(q.n_modes(), cut)?;
        let psi0 = fock_state(&basis, initial)?;
        let hm = second_quantize(q, &basis)?;
        let hdm = second_quantize(&dual, &basis)?;
        let (_, omega_inv) = omega_on_mode(&basis, mode, theta)?;
        let lhs = evolve(&hdm, &linalg::matvec(&omega_inv, &psi0), t, false)?.state;
        let rhs = linalg::matvec(&omega_inv, &evolve(&hm, &psi0, t, false)?.state);
        let interior = basis.interior_indices(None);
        let r = interior.iter().map(|&i| (lhs[i] - rhs[i]).norm_sqr()).sum::<f64>().sqrt();
        schrodinger_table.push((cut, r));
    }
    let schrodinger_converged = schrodinger_table.windows(2).all(|w| w[1].1 <= w[0].1);
    Ok(DualityEvolutionReport { heisenberg_residual, generator_residual, schrodinger_table, schrodinger_converged })
}

/// Truncated displacement `D(ā) = exp(ā a† − ā* a)` on `mode`.
pub fn displacement_matrix(basis: &FockBasis, mode: usize, abar: C64) -> Result<CMat> {
    let a = ladder_matrix(basis, mode)?;
    let mut gen = linalg::scale(&dagger(&a), abar);
    linalg::add_scaled(&mut gen, &a, -abar.conj());
    linalg::expm(&gen)
}

/// `⟨ψ|A|ψ⟩ / ⟨ψ|ψ⟩`.
pub fn expectation(a: &CMat, psi: &[C64]) -> C64 {
    linalg::vdot(psi, &linalg::matvec(a, psi)) / linalg::vdot(psi, psi)
}
