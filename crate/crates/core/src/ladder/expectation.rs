use crate::error::{Error, Result};
use crate::ladder::poly::LadderPolynomial;
use crate::ladder::substitution::{frame_represent, FrameTag};
use crate::linalg::{C64, ZERO};

fn falling(n: u32, k: u32) -> f64 {
    (0..k).map(|i| (n - i) as f64).product()
}

/// `⟨m|(a†)^p a^q|n⟩` on a single particle mode.
fn single_element(m: u32, n: u32, p: u32, q: u32) -> f64 {
    if q > n || n - q + p != m {
        return 0.0;
    }
    if m == n {
        // Both factors equal n!/(n−q)!, an exact integer.
        return falling(n, q);
    }
    (falling(n, q) * falling(m, p)).sqrt()
}

/// `⟨bra|p|ket⟩` between ordinary particle Fock states.
pub fn fock_matrix_element(p: &LadderPolynomial, bra: &[u32], ket: &[u32]) -> Result<C64> {
    let n = p.n_modes();
    if bra.len() != n || ket.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "occupations have lengths {} and {}, expected {n}",
            bra.len(),
            ket.len()
        )));
    }
    let mut total = ZERO;
    for (key, coeff) in p.terms() {
        let mut w = 1.0;
        for i in 0..n {
            w *= single_element(bra[i], ket[i], key[i].0, key[i].1);
            if w == 0.0 {
                break;
            }
        }
        if w != 0.0 {
            total += coeff * w;
        }
    }
    Ok(total)
}

/// Exact `⟨bra| obs |ket⟩` with bra and ket taken in the biorthogonal bases of each mode's frame.
pub fn hole_frame_expectation(
    obs: &LadderPolynomial,
    bra: &[u32],
    ket: &[u32],
    frames: &[FrameTag],
) -> Result<C64> {
    let rep = frame_represent(obs, frames)?;
    fock_matrix_element(&rep, bra, ket)
}

/// `D⁻¹(ā) a†a D(ā)` for a single mode.
pub fn displaced_number(abar: C64) -> LadderPolynomial {
    LadderPolynomial::number(1, 0).displace(&[abar])
}
