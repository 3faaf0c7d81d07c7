#![allow(dead_code)]

use qbh_core::ladder::{Ladder, RawExpr};
use qbh_core::linalg::{c, C64, CMat};
use qbh_core::{LadderPolynomial, QuadraticForm};
use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cplx(r: &mut ChaCha8Rng) -> C64 {
    c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

pub fn random_matrix(r: &mut ChaCha8Rng, n: usize) -> CMat {
    let v: Vec<C64> = (0..n * n).map(|_| cplx(r)).collect();
    Mat::from_fn(n, n, |i, j| v[i * n + j])
}

pub fn random_hermitian(r: &mut ChaCha8Rng, n: usize) -> QuadraticForm {
    let a = random_matrix(r, n);
    let m = Mat::from_fn(n, n, |i, j| (a.read(i, j) + a.read(j, i).conj()) * 0.5);
    let b = random_matrix(r, n);
    let c0 = r.gen_range(-1.0..1.0);
    QuadraticForm::hermitian(m, b, c0).unwrap()
}

/// Hermitian form whose BdG spectrum is real: `M = A A† + sI` dominates a small `P`.
pub fn random_stable(r: &mut ChaCha8Rng, n: usize) -> QuadraticForm {
    let a = random_matrix(r, n);
    let mut m = &a * &qbh_core::linalg::dagger(&a);
    for i in 0..n {
        m.write(i, i, m.read(i, i) + c(1.0 + n as f64, 0.0));
    }
    let p = qbh_core::linalg::scale(&random_matrix(r, n), c(0.3, 0.0));
    QuadraticForm::hermitian(m, p, r.gen_range(-1.0..1.0)).unwrap()
}

pub fn random_general(r: &mut ChaCha8Rng, n: usize) -> QuadraticForm {
    QuadraticForm::new(random_matrix(r, n), random_matrix(r, n), random_matrix(r, n), cplx(r)).unwrap()
}

pub fn random_word(r: &mut ChaCha8Rng, n_modes: usize, max_len: usize) -> Vec<Ladder> {
    let len = r.gen_range(0..=max_len);
    (0..len)
        .map(|_| {
            let m = r.gen_range(0..n_modes);
            if r.gen_bool(0.5) {
                Ladder::Create(m)
            } else {
                Ladder::Annihilate(m)
            }
        })
        .collect()
}

pub fn random_expr(r: &mut ChaCha8Rng, n_modes: usize, max_len: usize, terms: usize) -> RawExpr {
    let mut e = RawExpr::new();
    for _ in 0..terms {
        let w = random_word(r, n_modes, max_len);
        e = e.term(cplx(r), w);
    }
    e
}

pub fn random_poly(r: &mut ChaCha8Rng, n_modes: usize, max_len: usize, terms: usize) -> LadderPolynomial {
    qbh_core::normal_order(&random_expr(r, n_modes, max_len, terms), n_modes)
}

/// Greedy matching distance between two complex multisets.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

/// Raw expression evaluated as products of truncated ladder matrices.
pub fn expr_matrix(expr: &RawExpr, basis: &qbh_core::FockBasis) -> CMat {
    use qbh_core::linalg;
    let a: Vec<CMat> = (0..basis.n_modes()).map(|m| qbh_core::fock::ladder_matrix(basis, m).unwrap()).collect();
    let ad: Vec<CMat> = a.iter().map(linalg::dagger).collect();
    let dim = basis.dim();
    let mut out = linalg::zeros(dim, dim);
    for (coeff, word) in &expr.terms {
        let mut m = linalg::identity(dim);
        for l in word {
            m = match l {
                Ladder::Create(k) => &m * &ad[*k],
                Ladder::Annihilate(k) => &m * &a[*k],
            };
        }
        linalg::add_scaled(&mut out, &m, *coeff);
    }
    out
}
