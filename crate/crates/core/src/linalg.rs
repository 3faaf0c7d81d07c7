//! Dense complex linear algebra on top of `faer`.
//!
//! Everything here works on `Mat<Complex64>`. The matrix exponential uses
//! Padé-13 scaling and squaring; the action of an exponential on a vector uses
//! a substepped Taylor series so that large truncated Fock matrices never have
//! to be exponentiated densely.

use faer::prelude::*;
use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = Mat<Complex64>;
pub type RMat = Mat<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn zeros(rows: usize, cols: usize) -> CMat {
    Mat::zeros(rows, cols)
}

pub fn identity(n: usize) -> CMat {
    Mat::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
}

pub fn dagger(a: &CMat) -> CMat {
    Mat::from_fn(a.ncols(), a.nrows(), |i, j| a.read(j, i).conj())
}

pub fn transpose(a: &CMat) -> CMat {
    Mat::from_fn(a.ncols(), a.nrows(), |i, j| a.read(j, i))
}

pub fn conj(a: &CMat) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a.read(i, j).conj())
}

pub fn scale(a: &CMat, s: C64) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a.read(i, j) * s)
}

pub fn add_scaled(a: &mut CMat, b: &CMat, s: C64) {
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            a.write(i, j, a.read(i, j) + s * b.read(i, j));
        }
    }
}

/// Frobenius norm.
pub fn fro(a: &CMat) -> f64 {
    let mut s = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            s += a.read(i, j).norm_sqr();
        }
    }
    s.sqrt()
}

/// Frobenius norm of `a - b`.
pub fn fro_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut s = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            s += (a.read(i, j) - b.read(i, j)).norm_sqr();
        }
    }
    s.sqrt()
}

/// Maximum absolute column sum.
pub fn norm1(a: &CMat) -> f64 {
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| a.read(i, j).norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac, br, bc) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    Mat::from_fn(ar * br, ac * bc, |i, j| {
        a.read(i / br, j / bc) * b.read(i % br, j % bc)
    })
}

pub fn col_from(v: &[C64]) -> CMat {
    Mat::from_fn(v.len(), 1, |i, _| v[i])
}

pub fn col_to_vec(m: &CMat) -> Vec<C64> {
    (0..m.nrows()).map(|i| m.read(i, 0)).collect()
}

pub fn matvec(a: &CMat, v: &[C64]) -> Vec<C64> {
    col_to_vec(&(a * col_from(v)))
}

pub fn vdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vnorm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn all_finite(a: &CMat) -> bool {
    (0..a.ncols()).all(|j| (0..a.nrows()).all(|i| a.read(i, j).is_finite()))
}

pub fn inverse(a: &CMat) -> Result<CMat> {
    let inv = a.partial_piv_lu().inverse();
    if all_finite(&inv) {
        Ok(inv)
    } else {
        Err(Error::Singular("matrix inverse"))
    }
}

pub fn solve(a: &CMat, b: &CMat) -> Result<CMat> {
    let x = a.partial_piv_lu().solve(b);
    if all_finite(&x) {
        Ok(x)
    } else {
        Err(Error::Singular("linear solve"))
    }
}

/// Solves `a x = b` with a sparse LU built from the nonzero entries of `a`.
pub fn sparse_solve(a: &CMat, b: &[C64]) -> Result<Vec<C64>> {
    use faer::sparse::SparseColMat;
    let mut triplets = Vec::new();
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let v = a.read(i, j);
            if v != ZERO {
                triplets.push((i, j, v));
            }
        }
    }
    let sp = SparseColMat::<usize, C64>::try_new_from_triplets(a.nrows(), a.ncols(), &triplets)
        .map_err(|_| Error::Singular("sparse assembly"))?;
    let lu = sp.sp_lu().map_err(|_| Error::Singular("sparse LU"))?;
    let rhs = Mat::from_fn(b.len(), 1, |i, _| b[i]);
    let x = lu.solve(&rhs);
    let v = col_to_vec(&x);
    if v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(v)
    } else {
        Err(Error::Singular("sparse solve"))
    }
}

/// Eigendecomposition of a general complex matrix: `(eigenvalues, right eigenvectors as columns)`.
pub fn eig(a: &CMat) -> (Vec<C64>, CMat) {
    let evd = a.eigendecomposition::<C64>();
    let s = evd.s();
    let vals = (0..a.nrows()).map(|i| s.column_vector().read(i)).collect();
    (vals, evd.u().to_owned())
}

pub fn eigvals(a: &CMat) -> Vec<C64> {
    let vals = a.eigenvalues::<C64>();
    vals
}

/// Eigendecomposition of a Hermitian matrix (lower triangle is read). Eigenvalues ascend.
pub fn eigh(a: &CMat) -> (Vec<f64>, CMat) {
    let evd = a.selfadjoint_eigendecomposition(faer::Side::Lower);
    let s = evd.s();
    let vals = (0..a.nrows()).map(|i| s.column_vector().read(i).re).collect();
    (vals, evd.u().to_owned())
}

/// Eigendecomposition of a real symmetric matrix.
pub fn eigh_real(a: &RMat) -> (Vec<f64>, RMat) {
    let evd = a.selfadjoint_eigendecomposition(faer::Side::Lower);
    let s = evd.s();
    let vals = (0..a.nrows()).map(|i| s.column_vector().read(i)).collect();
    (vals, evd.u().to_owned())
}

pub fn singular_values(a: &CMat) -> Vec<f64> {
    a.singular_values()
}

pub fn to_complex(a: &RMat) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| c(a.read(i, j), 0.0))
}

/// Real part; caller is responsible for checking the imaginary part is negligible.
pub fn re_part(a: &CMat) -> RMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a.read(i, j).re)
}

pub fn max_abs_imag(a: &CMat) -> f64 {
    let mut m: f64 = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a.read(i, j).im.abs());
        }
    }
    m
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Dense matrix exponential (Padé-13 with scaling and squaring).
pub fn expm(a: &CMat) -> Result<CMat> {
    let n = a.nrows();
    let norm = norm1(a);
    if !norm.is_finite() {
        return Err(Error::NonFinite("expm input"));
    }
    if norm == 0.0 {
        return Ok(identity(a.nrows()));
    }
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = scale(a, c(0.5f64.powi(s), 0.0));
    let id = identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = |k: usize| c(PADE13[k], 0.0);

    let mut inner_u = scale(&a6, b(13));
    add_scaled(&mut inner_u, &a4, b(11));
    add_scaled(&mut inner_u, &a2, b(9));
    let mut u = &a6 * &inner_u;
    add_scaled(&mut u, &a6, b(7));
    add_scaled(&mut u, &a4, b(5));
    add_scaled(&mut u, &a2, b(3));
    add_scaled(&mut u, &id, b(1));
    let u = &a * &u;

    let mut inner_v = scale(&a6, b(12));
    add_scaled(&mut inner_v, &a4, b(10));
    add_scaled(&mut inner_v, &a2, b(8));
    let mut v = &a6 * &inner_v;
    add_scaled(&mut v, &a6, b(6));
    add_scaled(&mut v, &a4, b(4));
    add_scaled(&mut v, &a2, b(2));
    add_scaled(&mut v, &id, b(0));

    let p = &v + &u;
    let q = &v - &u;
    let mut r = solve(&q, &p)?;
    for _ in 0..s {
        r = &r * &r;
    }
    if all_finite(&r) {
        Ok(r)
    } else {
        Err(Error::NonFinite("expm"))
    }
}

/// Result of applying `exp(a)` to a vector, with the accumulated log-norm kept separate.
#[derive(Debug, Clone)]
pub struct ExpAction {
    /// Unit-norm direction of `exp(a) v`.
    pub direction: Vec<C64>,
    /// `ln ‖exp(a) v‖`.
    pub log_norm: f64,
}

impl ExpAction {
    pub fn vector(&self) -> Vec<C64> {
        let s = self.log_norm.exp();
        self.direction.iter().map(|x| x * s).collect()
    }
}

/// `exp(a) v` by a Taylor series over `ceil(‖a‖₁)` substeps, renormalizing
/// after each substep so growing non-unitary evolutions never overflow.
pub fn expm_multiply(a: &CMat, v: &[C64]) -> Result<ExpAction> {
    let norm = norm1(a);
    if !norm.is_finite() {
        return Err(Error::NonFinite("expm_multiply input"));
    }
    let steps = norm.ceil().max(1.0) as usize;
    let step = scale(a, c(1.0 / steps as f64, 0.0));
    let mut cur = col_from(v);
    let mut log_norm = 0.0;
    let n0 = fro(&cur);
    if n0 == 0.0 {
        return Ok(ExpAction { direction: v.to_vec(), log_norm: f64::NEG_INFINITY });
    }
    cur = scale(&cur, c(1.0 / n0, 0.0));
    log_norm += n0.ln();
    for _ in 0..steps {
        let mut term = cur.clone();
        let mut sum = cur.clone();
        for k in 1..80 {
            term = scale(&(&step * &term), c(1.0 / k as f64, 0.0));
            sum = &sum + &term;
            let tn = fro(&term);
            if tn <= 1e-17 * fro(&sum) {
                break;
            }
        }
        let sn = fro(&sum);
        if !sn.is_finite() || sn == 0.0 {
            return Err(Error::NonFinite("expm_multiply"));
        }
        log_norm += sn.ln();
        cur = scale(&sum, c(1.0 / sn, 0.0));
    }
    Ok(ExpAction { direction: col_to_vec(&cur), log_norm })
}
