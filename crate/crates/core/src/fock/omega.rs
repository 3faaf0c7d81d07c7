//! Explicit truncated particle-hole transformation.
//!
//! `Ω = exp(X)` with `X = i(π/4)(e^{−iθ}a² − e^{iθ}a†²)` Hermitian, so `Ω` is
//! Hermitian, positive and not unitary. The truncated `Ω` does not converge as
//! the cutoff grows: the hole vacuum `Ω⁻¹|0⟩` has no normalizable Fock
//! expansion. This module is a validation tool and is capped at cutoff 64.
//! Hole-frame physics in production goes through ladder substitution.

use faer::Mat;

use crate::error::{Error, Result};
use crate::fock::basis::FockBasis;
use crate::fock::ops::ladder_matrix;
use crate::linalg::{self, c, dagger, C64, CMat, ZERO};

pub const MAX_OMEGA_CUTOFF: usize = 64;

/// `Ω`, `Ω⁻¹` and the spectral data of the generator on a single-mode basis.
#[derive(Debug, Clone)]
pub struct OmegaMatrix {
    pub theta: f64,
    pub omega: CMat,
    pub omega_inv: CMat,
    /// Eigenvalues of `X`, ascending.
    pub generator_eigenvalues: Vec<f64>,
    /// Eigenvectors of `X` as columns (unitary).
    pub generator_eigenvectors: CMat,
    /// `exp(w_max − w_min)`.
    pub condition: f64,
}

fn check_single(basis: &FockBasis) -> Result<usize> {
    if basis.n_modes() != 1 {
        return Err(Error::InvalidArgument(
            "explicit Ω is built on a single-mode basis; use omega_on_mode for tensor factors".into(),
        ));
    }
    let cut = basis.cutoffs()[0];
    if cut > MAX_OMEGA_CUTOFF {
        return Err(Error::CutoffTooLarge { what: "explicit Ω", cutoff: cut, max: MAX_OMEGA_CUTOFF });
    }
    Ok(cut)
}

pub fn omega_generator(basis: &FockBasis, theta: f64) -> Result<CMat> {
    check_single(basis)?;
    let a = ladder_matrix(basis, 0)?;
    let ad = dagger(&a);
    let a2 = &a * &a;
    let ad2 = &ad * &ad;
    let pref = c(0.0, std::f64::consts::FRAC_PI_4);
    let e = C64::from_polar(1.0, theta);
    let mut x = linalg::scale(&a2, pref * e.conj());
    linalg::add_scaled(&mut x, &ad2, -pref * e);
    Ok(x)
}

fn spectral_function(v: &CMat, w: &[f64], f: impl Fn(f64) -> f64) -> CMat {
    let n = w.len();
    let scaled = Mat::from_fn(n, n, |i, j| v.read(i, j) * f(w[j]));
    let m = &scaled * &dagger(v);
    // Symmetrize so the result is Hermitian to the last bit.
    Mat::from_fn(n, n, |i, j| (m.read(i, j) + m.read(j, i).conj()) * 0.5)
}

pub fn omega_matrix(basis: &FockBasis, theta: f64) -> Result<OmegaMatrix> {
    let x = omega_generator(basis, theta)?;
    let (w, v) = linalg::eigh(&x);
    let spread = w.last().copied().unwrap_or(0.0) - w.first().copied().unwrap_or(0.0);
    let condition = spread.exp();
    if !condition.is_finite() {
        return Err(Error::IllConditioned { what: "explicit Ω", condition });
    }
    let omega = spectral_function(&v, &w, f64::exp);
    let omega_inv = spectral_function(&v, &w, |x| (-x).exp());
    if !linalg::all_finite(&omega) || !linalg::all_finite(&omega_inv) {
        return Err(Error::NonFinite("explicit Ω"));
    }
    Ok(OmegaMatrix {
        theta,
        omega,
        omega_inv,
        generator_eigenvalues: w,
        generator_eigenvectors: v,
        condition,
    })
}

/// `I ⊗ … ⊗ Ω ⊗ … ⊗ I` on `mode` of a multi-mode basis; returns `(Ω, Ω⁻¹)`.
pub fn omega_on_mode(basis: &FockBasis, mode: usize, theta: f64) -> Result<(CMat, CMat)> {
    if mode >= basis.n_modes() {
        return Err(Error::ModeOutOfRange { mode, n_modes: basis.n_modes() });
    }
    let single = FockBasis::single(basis.cutoffs()[mode])?;
    let om = omega_matrix(&single, theta)?;
    Ok((embed(basis, mode, &om.omega), embed(basis, mode, &om.omega_inv)))
}

/// Lifts a single-mode operator to `mode` of `basis`.
pub fn embed(basis: &FockBasis, mode: usize, op: &CMat) -> CMat {
    let dim = basis.dim();
    let stride = basis.stride(mode);
    let levels = basis.cutoffs()[mode] + 1;
    let mut out = linalg::zeros(dim, dim);
    for j in 0..dim {
        let nj = (j / stride) % levels;
        let base = j - nj * stride;
        for ni in 0..levels {
            let v = op.read(ni, nj);
            if v != ZERO {
                out.write(base + ni * stride, j, v);
            }
        }
    }
    out
}

/// Biorthogonal hole Fock pair `|n⟩_h = Ω⁻¹|n⟩`, `|n⟩_h̄ = Ω|n⟩`.
///
/// Vectors are stored in the eigenbasis of the generator `X`, which is a
/// unitary change of coordinates from the Fock basis. There the pair is
/// `e^{∓w} ⊙ u` with `u = V†|n⟩`, so the pairing is exact up to rounding,
/// whereas Fock coordinates lose about `log10(condition)` digits.
#[derive(Debug, Clone)]
pub struct BiorthogonalPair {
    pub n: usize,
    pub right: Vec<C64>,
    pub left: Vec<C64>,
    /// `left† · right`.
    pub pairing: C64,
    eigenvectors: CMat,
}

impl BiorthogonalPair {
    pub fn right_fock(&self) -> Vec<C64> {
        linalg::matvec(&self.eigenvectors, &self.right)
    }

    pub fn left_fock(&self) -> Vec<C64> {
        linalg::matvec(&self.eigenvectors, &self.left)
    }

    pub fn right_norm(&self) -> f64 {
        linalg::vnorm(&self.right)
    }
}

pub fn hole_fock_pair(om: &OmegaMatrix, n: usize) -> Result<BiorthogonalPair> {
    let dim = om.generator_eigenvalues.len();
    if n >= dim {
        return Err(Error::InvalidArgument(format!("occupation {n} exceeds cutoff {}", dim - 1)));
    }
    let v = &om.generator_eigenvectors;
    let u: Vec<C64> = (0..dim).map(|k| v.read(n, k).conj()).collect();
    let w = &om.generator_eigenvalues;
    let right: Vec<C64> = u.iter().zip(w).map(|(x, wk)| x * (-wk).exp()).collect();
    let left: Vec<C64> = u.iter().zip(w).map(|(x, wk)| x * wk.exp()).collect();
    let pairing = linalg::vdot(&left, &right);
    if (pairing - c(1.0, 0.0)).norm() > 1e-10 {
        return Err(Error::IllConditioned { what: "hole Fock pair", condition: om.condition });
    }
    Ok(BiorthogonalPair { n, right, left, pairing, eigenvectors: v.clone() })
}

/// `P_mn = ⟨m|_h̄ |n⟩_h` for `m, n ≤ nmax`.
pub fn pairing_matrix(om: &OmegaMatrix, nmax: usize) -> Result<CMat> {
    let pairs: Vec<BiorthogonalPair> = (0..=nmax).map(|n| hole_fock_pair(om, n)).collect::<Result<_>>()?;
    Ok(Mat::from_fn(nmax + 1, nmax + 1, |m, n| linalg::vdot(&pairs[m].left, &pairs[n].right)))
}

/// `⟨m|_h̄ A |n⟩_h` from explicit truncated vectors (`A` in Fock coordinates).
/// Diverges with the cutoff; kept to document that behavior.
pub fn explicit_hole_element(om: &OmegaMatrix, a: &CMat, m: usize, n: usize) -> Result<C64> {
    let bra = hole_fock_pair(om, m)?.left_fock();
    let ket = hole_fock_pair(om, n)?.right_fock();
    Ok(linalg::vdot(&bra, &linalg::matvec(a, &ket)))
}

/// Interior residual `‖(Ω⁻¹aΩ + i e^{iθ}a†) P_int‖` of the explicit transformation.
pub fn interior_transformation_residual(om: &OmegaMatrix, levels: usize) -> Result<f64> {
    let dim = om.omega.nrows();
    let basis = FockBasis::single(dim - 1)?;
    let a = ladder_matrix(&basis, 0)?;
    let ad = dagger(&a);
    let mut t = &(&om.omega_inv * &a) * &om.omega;
    linalg::add_scaled(&mut t, &ad, c(0.0, 1.0) * C64::from_polar(1.0, om.theta));
    let mut s = 0.0;
    for j in 0..levels.min(dim) {
        for i in 0..dim {
            s += t.read(i, j).norm_sqr();
        }
    }
    Ok(s.sqrt())
}
