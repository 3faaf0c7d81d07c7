use crate::error::Result;
use crate::ladder::substitution::{check_mode, Direction};
use crate::linalg::C64;
use crate::quadratic::QuadraticForm;

/// Coefficient-level image of `Ω⁻¹ H Ω` on `mode`, constant shift included.
pub fn dual_quadratic(q: &QuadraticForm, mode: usize, theta: f64) -> Result<QuadraticForm> {
    dual_quadratic_with(q, mode, theta, Direction::Forward)
}

/// Same as [`dual_quadratic`] for either substitution direction.
pub fn dual_quadratic_with(
    q: &QuadraticForm,
    mode: usize,
    theta: f64,
    direction: Direction,
) -> Result<QuadraticForm> {
    let n = q.n_modes();
    check_mode(mode, n)?;
    let (ca, cd) = direction.factors(theta);
    let m = mode;
    let mut out = QuadraticForm::zeros(n);
    let (qm, qp, qq) = (q.m(), q.p(), q.q());
    out.add_constant(q.c0());

    for i in 0..n {
        for j in 0..n {
            let v = qm.read(i, j);
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            match (i == m, j == m) {
                (false, false) => out.add_hopping(i, j, v),
                // a_m† a_j → c_d a_m a_j
                (true, false) => out.add_pair_annihilation(m, j, v * cd),
                // a_i† a_m → c_a a_i† a_m†
                (false, true) => out.add_pair_creation(i, m, v * ca),
                // a_m† a_m → −a_m† a_m − 1
                (true, true) => {
                    out.add_hopping(m, m, -v);
                    out.add_constant(-v);
                }
            }
        }
    }

    // ½ Σ P_ij a_i†a_j†: off-diagonal entries touching m combine to P_mj a_m† a_j†.
    for i in 0..n {
        for j in i..n {
            let v = qp.read(i, j);
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            match (i == m, j == m) {
                (false, false) => out.add_pair_creation(i, j, if i == j { v * 0.5 } else { v }),
                (true, true) => out.add_pair_annihilation(m, m, v * 0.5 * cd * cd),
                (true, false) => out.add_hopping(j, m, v * cd),
                (false, true) => out.add_hopping(i, m, v * cd),
            }
        }
    }

    for i in 0..n {
        for j in i..n {
            let v = qq.read(i, j);
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            match (i == m, j == m) {
                (false, false) => out.add_pair_annihilation(i, j, if i == j { v * 0.5 } else { v }),
                (true, true) => out.add_pair_creation(m, m, v * 0.5 * ca * ca),
                (true, false) => out.add_hopping(m, j, v * ca),
                (false, true) => out.add_hopping(m, i, v * ca),
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ladder::poly::LadderPolynomial;
    use crate::ladder::substitution::ph_substitute;
    use crate::linalg::c;

    #[test]
    fn uncoupled_mode_keeps_frequency() {
        let mut q = QuadraticForm::zeros(1);
        q.add_hopping(0, 0, c(1.7, 0.0));
        q.add_constant(c(0.85, 0.0));
        let d = dual_quadratic(&q, 0, 0.4).unwrap();
        // Δ(a†a + ½) → −Δ(a†a + ½), i.e. Δ(h̄†h + ½) in the hole frame.
        assert_eq!(d.m().read(0, 0), c(-1.7, 0.0));
        assert!((d.c0() - c(-0.85, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn matches_polynomial_substitution() {
        let mut q = QuadraticForm::zeros(3);
        q.add_hopping(0, 1, c(0.3, 0.7));
        q.add_hopping(1, 0, c(-0.2, 0.1));
        q.add_hopping(0, 0, c(1.1, 0.0));
        q.add_hopping(2, 0, c(0.5, -0.5));
        q.add_pair_creation(0, 2, c(0.4, 0.0));
        q.add_pair_creation(0, 0, c(0.0, 0.9));
        q.add_pair_annihilation(1, 0, c(-0.6, 0.2));
        q.add_pair_annihilation(0, 0, c(0.25, 0.0));
        q.add_pair_annihilation(1, 2, c(0.1, 0.1));
        for dir in [Direction::Forward, Direction::Inverse] {
            let coeff = dual_quadratic_with(&q, 0, 0.9, dir).unwrap();
            let poly = ph_substitute(&LadderPolynomial::from_quadratic(&q), 0, 0.9, dir)
                .unwrap()
                .to_quadratic()
                .unwrap();
            assert!(coeff.max_abs_diff(&poly) < 1e-15, "{:?}", dir);
        }
    }
}
