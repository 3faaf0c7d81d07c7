//! Bogoliubov-de Gennes dynamical matrix, its symmetries, spectrum and eigenmodes.
//!
//! Nambu order is `(a_1 … a_N, a_1† … a_N†)` and `τ_i = σ_i ⊗ I_N`. The
//! dynamical matrix is `𝓗 = τ₃ H` with `H = [[M, P], [Q, Mᵀ]]`, so the
//! Heisenberg equation reads `i ∂_t α = 𝓗 α`.

use faer::Mat;

use crate::error::{Error, Result};
use crate::fock::{self, FockBasis};
use crate::linalg::{self, c, dagger, fro, fro_diff, C64, CMat, ONE, ZERO};
use crate::quadratic::QuadraticForm;

pub const SYMMETRY_TOL: f64 = 1e-12;
pub const DEFAULT_REGIME_TOL: f64 = 1e-9;
const DEFECTIVE_TOL: f64 = 1e-6;
const NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct DynamicalMatrix {
    h: CMat,
    n_modes: usize,
    hermitian_source: bool,
}

impl DynamicalMatrix {
    /// Wraps a raw `2N × 2N` matrix. No symmetry is assumed.
    pub fn from_matrix(h: CMat) -> Result<Self> {
        if h.nrows() != h.ncols() || h.nrows() % 2 != 0 || h.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "dynamical matrix must be 2N x 2N, got {}x{}",
                h.nrows(),
                h.ncols()
            )));
        }
        let n_modes = h.nrows() / 2;
        Ok(Self { h, n_modes, hermitian_source: false })
    }

    pub fn matrix(&self) -> &CMat {
        &self.h
    }
    pub fn n_modes(&self) -> usize {
        self.n_modes
    }
    pub fn hermitian_source(&self) -> bool {
        self.hermitian_source
    }
}

pub fn tau1(n: usize) -> CMat {
    Mat::from_fn(2 * n, 2 * n, |i, j| if (i + n) % (2 * n) == j { ONE } else { ZERO })
}

pub fn tau3(n: usize) -> CMat {
    Mat::from_fn(2 * n, 2 * n, |i, j| match (i == j, i < n) {
        (true, true) => ONE,
        (true, false) => -ONE,
        _ => ZERO,
    })
}

/// Applies `τ₃` to a Nambu vector.
pub fn tau3_vec(v: &[C64]) -> Vec<C64> {
    let n = v.len() / 2;
    v.iter().enumerate().map(|(k, x)| if k < n { *x } else { -x }).collect()
}

/// `v†τ₃w`.
pub fn tau3_inner(v: &[C64], w: &[C64]) -> C64 {
    linalg::vdot(v, &tau3_vec(w))
}

pub fn build_bdg(q: &QuadraticForm) -> DynamicalMatrix {
    let n = q.n_modes();
    let block = q.block_matrix();
    let h = Mat::from_fn(2 * n, 2 * n, |i, j| if i < n { block.read(i, j) } else { -block.read(i, j) });
    DynamicalMatrix { h, n_modes: n, hermitian_source: q.is_hermitian() }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryReport {
    pub pseudo_hermitian: bool,
    pub ph_symmetric: bool,
    pub transposition: bool,
    /// `‖τ₃𝓗τ₃ − 𝓗†‖`
    pub pseudo_hermitian_residual: f64,
    /// `‖τ₁𝓗τ₁ + 𝓗*‖`
    pub ph_residual: f64,
    /// `‖τ₃τ₁𝓗τ₁τ₃ + 𝓗ᵀ‖`
    pub transposition_residual: f64,
}

impl SymmetryReport {
    pub fn max_residual(&self) -> f64 {
        self.pseudo_hermitian_residual.max(self.ph_residual).max(self.transposition_residual)
    }
}

pub fn check_symmetries(d: &DynamicalMatrix) -> SymmetryReport {
    let n = d.n_modes;
    let h = &d.h;
    let t1 = tau1(n);
    let t3 = tau3(n);
    let ph_lhs = &t3 * h * &t3;
    let pseudo = fro_diff(&ph_lhs, &dagger(h));
    let phs = fro(&(&(&t1 * h * &t1) + &linalg::conj(h)));
    let t31 = &t3 * &t1;
    let t13 = &t1 * &t3;
    let trans = fro(&(&(&t31 * h * &t13) + &linalg::transpose(h)));
    SymmetryReport {
        pseudo_hermitian: pseudo < SYMMETRY_TOL,
        ph_symmetric: phs < SYMMETRY_TOL,
        transposition: trans < SYMMETRY_TOL,
        pseudo_hermitian_residual: pseudo,
        ph_residual: phs,
        transposition_residual: trans,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Real,
    Complex,
    Mixed,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::Real => "Real",
            Regime::Complex => "Complex",
            Regime::Mixed => "Mixed",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<C64>,
    /// Index pairs `(n, n̄)` with `ε_n̄ ≈ −ε_n`.
    pub pairing: Vec<(usize, usize)>,
    pub regime: Regime,
    /// Right eigenvectors as columns.
    pub eigenvectors: CMat,
    /// `v†τ₃v` per eigenvector (unit Euclidean norm vectors).
    pub symplectic_norms: Vec<f64>,
    pub tol: f64,
    /// Worst `|ε_n + ε_n̄|` over the pairing.
    pub pairing_residual: f64,
}

pub fn classify(eigenvalues: &[C64], tol: f64) -> Regime {
    let nonzero: Vec<&C64> = eigenvalues.iter().filter(|e| e.norm() >= tol).collect();
    if nonzero.iter().all(|e| e.im.abs() < tol) {
        Regime::Real
    } else if nonzero.iter().all(|e| e.im.abs() >= tol) {
        Regime::Complex
    } else {
        Regime::Mixed
    }
}

/// Greedy negation pairing. Returns the pairs and the worst residual.
pub fn pair_eigenvalues(eigenvalues: &[C64]) -> (Vec<(usize, usize)>, f64) {
    let k = eigenvalues.len();
    let mut used = vec![false; k];
    let mut pairs = Vec::with_capacity(k / 2);
    let mut worst: f64 = 0.0;
    for i in 0..k {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut best = None;
        let mut best_d = f64::INFINITY;
        for j in 0..k {
            if !used[j] {
                let d = (eigenvalues[i] + eigenvalues[j]).norm();
                if d < best_d {
                    best_d = d;
                    best = Some(j);
                }
            }
        }
        if let Some(j) = best {
            used[j] = true;
            pairs.push((i, j));
            worst = worst.max(best_d);
        }
    }
    (pairs, worst)
}

/// Greedy matching distance between two eigenvalue multisets: the worst
/// `|x − y|` over the matched pairs, or infinity when the sizes differ.
pub fn spectral_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let mut best = None;
        let mut best_d = f64::INFINITY;
        for (k, y) in b.iter().enumerate() {
            let d = (x - y).norm();
            if !used[k] && d < best_d {
                best = Some(k);
                best_d = d;
            }
        }
        if let Some(k) = best {
            used[k] = true;
        }
        worst = worst.max(best_d);
    }
    worst
}

pub fn spectrum(d: &DynamicalMatrix, tol: f64) -> Result<SpectrumReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let (eigenvalues, mut vecs) = linalg::eig(&d.h);
    if eigenvalues.iter().any(|e| !e.is_finite()) {
        return Err(Error::NonFinite("eigensolver"));
    }
    for j in 0..vecs.ncols() {
        let nrm = (0..vecs.nrows()).map(|i| vecs.read(i, j).norm_sqr()).sum::<f64>().sqrt();
        for i in 0..vecs.nrows() {
            vecs.write(i, j, vecs.read(i, j) / nrm);
        }
    }
    let (pairing, pairing_residual) = pair_eigenvalues(&eigenvalues);
    let scale = 1.0 + eigenvalues.iter().map(|e| e.norm()).fold(0.0, f64::max);
    if pairing_residual > tol * scale {
        return Err(Error::PairingFailure { residual: pairing_residual });
    }
    let symplectic_norms = (0..vecs.ncols())
        .map(|j| {
            let v = column(&vecs, j);
            tau3_inner(&v, &v).re
        })
        .collect();
    Ok(SpectrumReport {
        regime: classify(&eigenvalues, tol),
        eigenvalues,
        pairing,
        eigenvectors: vecs,
        symplectic_norms,
        tol,
        pairing_residual,
    })
}

fn column(m: &CMat, j: usize) -> Vec<C64> {
    (0..m.nrows()).map(|i| m.read(i, j)).collect()
}

fn row(m: &CMat, i: usize) -> Vec<C64> {
    (0..m.ncols()).map(|j| m.read(i, j)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Real regime, Hermitian source: `ψ†τ₃ψ = +1` and the partner is `ψ` itself.
    Symplectic,
    /// General case: `χψ = 1` with `χ` the left eigenvector; the partner is
    /// `τ₃χ†`, so `⟨partner|τ₃|ψ⟩ = 1`. Right vectors carry `|ψ†τ₃ψ| = 1`
    /// in the real regime and unit Euclidean norm otherwise.
    Biorthogonal,
}

#[derive(Debug, Clone)]
pub struct QuasiMode {
    pub frequency: C64,
    /// Right eigenvector `|ψ_n⟩` of `𝓗`.
    pub right: Vec<C64>,
    /// Left eigenvector `χ_n` (row), with `χ_n 𝓗 = ε_n χ_n` and `χ_n ψ_n = 1`.
    pub left: Vec<C64>,
    /// `|ψ_{n*}⟩ = τ₃χ_n†`.
    pub partner: Vec<C64>,
}

impl QuasiMode {
    /// Per-mode `τ₃`-weighted content `conj(p_i)ψ_i − conj(p_{N+i})ψ_{N+i}` with `p` the partner.
    pub fn composition(&self) -> Vec<C64> {
        composition_weights(&self.partner, &self.right)
    }

    /// `ψ†τ₃ψ`.
    pub fn symplectic_norm(&self) -> f64 {
        tau3_inner(&self.right, &self.right).re
    }

    /// The redundant `−ε` eigenvector `τ₁τ₃χᵀ`.
    pub fn redundant_partner(&self) -> Vec<C64> {
        let n = self.left.len() / 2;
        let t = tau3_vec(&self.left);
        (0..2 * n).map(|k| t[(k + n) % (2 * n)]).collect()
    }
}

#[derive(Debug, Clone)]
pub struct QuasiModeSet {
    pub n_modes: usize,
    pub modes: Vec<QuasiMode>,
    pub regime: Regime,
    pub normalization: Normalization,
}

/// Composition weights of `v` against a partner `p`.
pub fn composition_weights(p: &[C64], v: &[C64]) -> Vec<C64> {
    let n = v.len() / 2;
    (0..n).map(|i| p[i].conj() * v[i] - p[n + i].conj() * v[n + i]).collect()
}

/// Per-mode `|v_i|² − |v_{N+i}|²`: positive means particle content, negative hole content.
pub fn composition_diagnostic(v: &[C64]) -> Vec<C64> {
    composition_weights(v, v)
}

fn check_defective(eigenvalues: &[C64], vecs: &CMat) -> Result<()> {
    let sv = linalg::singular_values(vecs);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if smin < DEFECTIVE_TOL {
        // The eigenvalue whose eigenvectors are nearly parallel to another.
        let k = vecs.ncols();
        let mut worst = (0usize, 0.0f64);
        for a in 0..k {
            for b in (a + 1)..k {
                let ov = linalg::vdot(&column(vecs, a), &column(vecs, b)).norm();
                if ov > worst.1 {
                    worst = (a, ov);
                }
            }
        }
        return Err(Error::Defective { eigenvalue: eigenvalues[worst.0] });
    }
    Ok(())
}

fn clusters(eigenvalues: &[C64]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (k, e) in eigenvalues.iter().enumerate() {
        let tol = 1e-7 * (1.0 + e.norm());
        if let Some(cl) = out.iter_mut().find(|cl| (eigenvalues[cl[0]] - e).norm() < tol) {
            cl.push(k);
        } else {
            out.push(vec![k]);
        }
    }
    out
}

fn mode_label_weights(n: usize) -> CMat {
    Mat::from_fn(2 * n, 2 * n, |i, j| {
        if i != j {
            ZERO
        } else if i < n {
            c((i + 1) as f64, 0.0)
        } else {
            c(-((i - n + 1) as f64), 0.0)
        }
    })
}

/// Real regime, Hermitian source: diagonalize the `τ₃` metric inside each
/// degenerate eigenspace and keep the `N` positive-norm vectors.
fn symplectic_modes(d: &DynamicalMatrix, report: &SpectrumReport) -> Option<Vec<QuasiMode>> {
    let n = d.n_modes;
    let t3 = tau3(n);
    let label = mode_label_weights(n);
    let mut positive: Vec<Vec<C64>> = Vec::new();
    for cl in clusters(&report.eigenvalues) {
        let psi = Mat::from_fn(2 * n, cl.len(), |i, j| report.eigenvectors.read(i, cl[j]));
        let g = &dagger(&psi) * &t3 * &psi;
        let g = Mat::from_fn(g.nrows(), g.ncols(), |i, j| (g.read(i, j) + g.read(j, i).conj()) * 0.5);
        let (gv, u) = linalg::eigh(&g);
        if gv.iter().any(|x| x.abs() < NORM_TOL) {
            return None;
        }
        let rotated = &psi * &u;
        for sign in [1.0, -1.0] {
            let idx: Vec<usize> = (0..gv.len()).filter(|&k| gv[k] * sign > 0.0).collect();
            if idx.is_empty() {
                continue;
            }
            let group = Mat::from_fn(2 * n, idx.len(), |i, j| {
                rotated.read(i, idx[j]) / gv[idx[j]].abs().sqrt()
            });
            // Break remaining degeneracy by mode label so the basis is canonical.
            let k = &dagger(&group) * &label * &group;
            let k = Mat::from_fn(k.nrows(), k.ncols(), |i, j| (k.read(i, j) + k.read(j, i).conj()) * 0.5);
            let (_, w) = linalg::eigh(&k);
            let canon = &group * &w;
            if sign > 0.0 {
                for j in 0..canon.ncols() {
                    positive.push(fix_phase(column(&canon, j)));
                }
            }
        }
    }
    if positive.len() != n {
        return None;
    }
    let modes = positive
        .into_iter()
        .map(|psi| {
            let left: Vec<C64> = tau3_vec(&psi).iter().map(|x| x.conj()).collect();
            let h_psi = linalg::matvec(&d.h, &psi);
            let frequency = left.iter().zip(&h_psi).map(|(a, b)| a * b).sum::<C64>();
            QuasiMode { frequency: c(frequency.re, 0.0), partner: psi.clone(), right: psi, left }
        })
        .collect();
    Some(modes)
}

/// Rotates a vector so its largest component is real and positive.
fn fix_phase(mut v: Vec<C64>) -> Vec<C64> {
    let mut best = 0;
    for k in 0..v.len() {
        if v[k].norm() > v[best].norm() + 1e-12 {
            best = k;
        }
    }
    let ph = v[best].conj() / v[best].norm();
    if v[best].norm() > 0.0 {
        for x in v.iter_mut() {
            *x *= ph;
        }
    }
    v
}

fn biorthogonal_modes(d: &DynamicalMatrix, report: &SpectrumReport) -> Result<Vec<QuasiMode>> {
    let vecs = &report.eigenvectors;
    let inv = linalg::inverse(vecs)?;
    let sel_tol = report.tol;
    let mut modes = Vec::with_capacity(d.n_modes);
    for &(k, kb) in &report.pairing {
        let e = report.eigenvalues[k];
        let pick_k = if e.re > sel_tol {
            true
        } else if e.re < -sel_tol {
            false
        } else {
            e.im >= 0.0
        };
        let s = if pick_k { k } else { kb };
        let mut psi = column(vecs, s);
        let mut chi = row(&inv, s);
        let g = tau3_inner(&psi, &psi).re;
        let scale = if report.regime == Regime::Real && g.abs() > NORM_TOL {
            1.0 / g.abs().sqrt()
        } else {
            1.0 / linalg::vnorm(&psi)
        };
        for x in psi.iter_mut() {
            *x *= scale;
        }
        for x in chi.iter_mut() {
            *x /= scale;
        }
        let partner = tau3_vec(&chi.iter().map(|x| x.conj()).collect::<Vec<_>>());
        modes.push(QuasiMode { frequency: report.eigenvalues[s], right: psi, left: chi, partner });
    }
    Ok(modes)
}

pub fn quasimodes(d: &DynamicalMatrix, report: &SpectrumReport) -> Result<QuasiModeSet> {
    check_defective(&report.eigenvalues, &report.eigenvectors)?;
    if d.hermitian_source && report.regime == Regime::Real {
        if let Some(modes) = symplectic_modes(d, report) {
            return Ok(QuasiModeSet {
                n_modes: d.n_modes,
                modes,
                regime: report.regime,
                normalization: Normalization::Symplectic,
            });
        }
    }
    let modes = biorthogonal_modes(d, report)?;
    Ok(QuasiModeSet { n_modes: d.n_modes, modes, regime: report.regime, normalization: Normalization::Biorthogonal })
}

/// Operator `ψ̂_n† = α†τ₃ψ = Σ ψ_i a_i† − Σ ψ_{N+i} a_i` on a Fock basis.
fn creation_like(basis: &FockBasis, psi: &[C64]) -> Result<CMat> {
    let n = basis.n_modes();
    let mut out = linalg::zeros(basis.dim(), basis.dim());
    for i in 0..n {
        let a = fock::ladder_matrix(basis, i)?;
        let ad = dagger(&a);
        linalg::add_scaled(&mut out, &ad, psi[i]);
        linalg::add_scaled(&mut out, &a, -psi[n + i]);
    }
    Ok(out)
}

/// Operator `ψ̂_{n*} = χα = Σ χ_i a_i + Σ χ_{N+i} a_i†`.
fn annihilation_like(basis: &FockBasis, chi: &[C64]) -> Result<CMat> {
    let n = basis.n_modes();
    let mut out = linalg::zeros(basis.dim(), basis.dim());
    for i in 0..n {
        let a = fock::ladder_matrix(basis, i)?;
        let ad = dagger(&a);
        linalg::add_scaled(&mut out, &a, chi[i]);
        linalg::add_scaled(&mut out, &ad, chi[n + i]);
    }
    Ok(out)
}

/// Interior-projected Frobenius deviation between `Σ ε_n(ψ̂_n†ψ̂_{n*} + ½) + offset`
/// and the direct second quantization of `q`.
pub fn reconstruct_check(q: &QuadraticForm, modes: &QuasiModeSet, basis: &FockBasis) -> Result<f64> {
    if basis.n_modes() != q.n_modes() {
        return Err(Error::DimensionMismatch("basis and form have different mode counts".into()));
    }
    let dim = basis.dim();
    let mut rebuilt = linalg::identity(dim);
    rebuilt = linalg::scale(&rebuilt, q.nambu_offset());
    for m in &modes.modes {
        let cr = creation_like(basis, &m.right)?;
        let an = annihilation_like(basis, &m.left)?;
        let prod = &cr * &an;
        linalg::add_scaled(&mut rebuilt, &prod, m.frequency);
        linalg::add_scaled(&mut rebuilt, &linalg::identity(dim), m.frequency * 0.5);
    }
    let direct = fock::second_quantize(q, basis)?;
    let interior = basis.interior_indices(None);
    let mut s = 0.0;
    for &i in &interior {
        for &j in &interior {
            s += (rebuilt.read(i, j) - direct.read(i, j)).norm_sqr();
        }
    }
    Ok(s.sqrt())
}

/// Runs [`reconstruct_check`] over increasing cutoffs and flags an inadequate
/// cutoff when the residual grows and stays above `tol`.
pub fn reconstruct_sweep(
    q: &QuadraticForm,
    modes: &QuasiModeSet,
    cutoffs: &[usize],
    tol: f64,
) -> Result<Vec<(usize, f64)>> {
    let mut table = Vec::with_capacity(cutoffs.len());
    for &cut in cutoffs {
        let basis = FockBasis::uniform(q.n_modes(), cut)?;
        table.push((cut, reconstruct_check(q, modes, &basis)?));
    }
    for w in table.windows(2) {
        if w[1].1 > w[0].1 && w[1].1 > tol {
            return Err(Error::NotConverged(format!(
                "reconstruction residual rose from {:e} (cutoff {}) to {:e} (cutoff {})",
                w[0].1, w[0].0, w[1].1, w[1].0
            )));
        }
    }
    Ok(table)
}
