use crate::error::{Error, Result};
use crate::fock::basis::FockBasis;
use crate::ladder::LadderPolynomial;
use crate::linalg::{c, zeros, CMat};
use crate::quadratic::QuadraticForm;

/// Truncated annihilation matrix of `mode`, `⟨n−1|a|n⟩ = √n`.
pub fn ladder_matrix(basis: &FockBasis, mode: usize) -> Result<CMat> {
    if mode >= basis.n_modes() {
        return Err(Error::ModeOutOfRange { mode, n_modes: basis.n_modes() });
    }
    let stride = basis.stride(mode);
    let mut a = zeros(basis.dim(), basis.dim());
    for j in 0..basis.dim() {
        let n = basis.occupation(j)[mode];
        if n > 0 {
            a.write(j - stride, j, c((n as f64).sqrt(), 0.0));
        }
    }
    Ok(a)
}

pub fn number_matrix(basis: &FockBasis, mode: usize) -> Result<CMat> {
    if mode >= basis.n_modes() {
        return Err(Error::ModeOutOfRange { mode, n_modes: basis.n_modes() });
    }
    let mut n = zeros(basis.dim(), basis.dim());
    for j in 0..basis.dim() {
        n.write(j, j, c(basis.occupation(j)[mode] as f64, 0.0));
    }
    Ok(n)
}

/// Dense matrix of a normal-ordered polynomial, equal to the products of
/// truncated ladder matrices term by term.
pub fn second_quantize_poly(p: &LadderPolynomial, basis: &FockBasis) -> Result<CMat> {
    if p.n_modes() != basis.n_modes() {
        return Err(Error::DimensionMismatch(format!(
            "polynomial has {} modes, basis has {}",
            p.n_modes(),
            basis.n_modes()
        )));
    }
    let dim = basis.dim();
    let mut out = zeros(dim, dim);
    let occs: Vec<Vec<usize>> = (0..dim).map(|j| basis.occupation(j)).collect();
    for (key, coeff) in p.terms() {
        for (j, occ) in occs.iter().enumerate() {
            let mut amp = 1.0;
            let mut target = occ.clone();
            let mut ok = true;
            for m in 0..basis.n_modes() {
                let (pm, qm) = (key[m].0 as usize, key[m].1 as usize);
                let n = occ[m];
                if qm > n || n - qm + pm > basis.cutoffs()[m] {
                    ok = false;
                    break;
                }
                // One square root of an integer product keeps diagonal elements exact.
                let low = n - qm;
                let down: f64 = (0..qm).map(|k| (n - k) as f64).product();
                let up: f64 = (1..=pm).map(|k| (low + k) as f64).product();
                amp *= (down * up).sqrt();
                target[m] = low + pm;
            }
            if ok {
                let i = basis.index(&target).expect("target occupation is within the basis");
                out.write(i, j, out.read(i, j) + coeff * amp);
            }
        }
    }
    Ok(out)
}

pub fn second_quantize(q: &QuadraticForm, basis: &FockBasis) -> Result<CMat> {
    second_quantize_poly(&LadderPolynomial::from_quadratic(q), basis)
}
