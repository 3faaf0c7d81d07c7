use faer::Mat;

use crate::error::{Error, Result};
use crate::linalg::{dagger, fro_diff, C64, CMat, ZERO};

/// Tolerance used by [`QuadraticForm::is_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Normal-ordered quadratic Hamiltonian over `N` bosonic modes:
///
/// `H = Σ M_ij a_i†a_j + ½ Σ P_ij a_i†a_j† + ½ Σ Q_ij a_i a_j + c0`.
///
/// `P` and `Q` are symmetrized on construction. The form need not be Hermitian.
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    n_modes: usize,
    m: CMat,
    p: CMat,
    q: CMat,
    c0: C64,
}

fn symmetrize(a: &CMat) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| (a.read(i, j) + a.read(j, i)) * 0.5)
}

impl QuadraticForm {
    pub fn new(m: CMat, p: CMat, q: CMat, c0: C64) -> Result<Self> {
        let n = m.nrows();
        if n == 0 {
            return Err(Error::DimensionMismatch("a quadratic form needs at least one mode".into()));
        }
        for (name, a) in [("M", &m), ("P", &p), ("Q", &q)] {
            if a.nrows() != n || a.ncols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "{name} is {}x{}, expected {n}x{n}",
                    a.nrows(),
                    a.ncols()
                )));
            }
        }
        Ok(Self { n_modes: n, p: symmetrize(&p), q: symmetrize(&q), m, c0 })
    }

    pub fn zeros(n_modes: usize) -> Self {
        Self {
            n_modes,
            m: Mat::zeros(n_modes, n_modes),
            p: Mat::zeros(n_modes, n_modes),
            q: Mat::zeros(n_modes, n_modes),
            c0: ZERO,
        }
    }

    /// Hermitian form from particle-conserving block `a` (must be Hermitian) and pairing block `b`.
    pub fn hermitian(a: CMat, b: CMat, c0: f64) -> Result<Self> {
        let q = crate::linalg::conj(&b);
        let form = Self::new(a, b, q, C64::new(c0, 0.0))?;
        if !form.is_hermitian() {
            return Err(Error::NonHermitian("particle-conserving block is not Hermitian".into()));
        }
        Ok(form)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }
    pub fn m(&self) -> &CMat {
        &self.m
    }
    pub fn p(&self) -> &CMat {
        &self.p
    }
    pub fn q(&self) -> &CMat {
        &self.q
    }
    pub fn c0(&self) -> C64 {
        self.c0
    }

    pub fn with_c0(mut self, c0: C64) -> Self {
        self.c0 = c0;
        self
    }

    /// Adds `value` to the coefficient of `a_i†a_j`.
    pub fn add_hopping(&mut self, i: usize, j: usize, value: C64) {
        self.m.write(i, j, self.m.read(i, j) + value);
    }

    /// Adds `value · a_i†a_j†` (both symmetric entries are updated).
    pub fn add_pair_creation(&mut self, i: usize, j: usize, value: C64) {
        if i == j {
            self.p.write(i, i, self.p.read(i, i) + value * 2.0);
        } else {
            self.p.write(i, j, self.p.read(i, j) + value);
            self.p.write(j, i, self.p.read(j, i) + value);
        }
    }

    /// Adds `value · a_i a_j` (both symmetric entries are updated).
    pub fn add_pair_annihilation(&mut self, i: usize, j: usize, value: C64) {
        if i == j {
            self.q.write(i, i, self.q.read(i, i) + value * 2.0);
        } else {
            self.q.write(i, j, self.q.read(i, j) + value);
            self.q.write(j, i, self.q.read(j, i) + value);
        }
    }

    pub fn add_constant(&mut self, value: C64) {
        self.c0 += value;
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_residual() < HERMITIAN_TOL
    }

    /// Largest of `‖M − M†‖`, `‖Q − P*‖` (Frobenius) and `|Im c0|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let rm = fro_diff(&self.m, &dagger(&self.m));
        let rq = fro_diff(&self.q, &crate::linalg::conj(&self.p));
        rm.max(rq).max(self.c0.im.abs())
    }

    pub fn is_pairing_free(&self) -> bool {
        (0..self.n_modes).all(|i| {
            (0..self.n_modes).all(|j| self.p.read(i, j) == ZERO && self.q.read(i, j) == ZERO)
        })
    }

    /// Largest absolute coefficient difference, constants included.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n_modes, other.n_modes, "mode count mismatch");
        let mut d = (self.c0 - other.c0).norm();
        for (a, b) in [(&self.m, &other.m), (&self.p, &other.p), (&self.q, &other.q)] {
            for i in 0..self.n_modes {
                for j in 0..self.n_modes {
                    d = d.max((a.read(i, j) - b.read(i, j)).norm());
                }
            }
        }
        d
    }

    /// Exact equality of every coefficient.
    pub fn bit_equal(&self, other: &Self) -> bool {
        self.n_modes == other.n_modes && self.max_abs_diff(other) == 0.0
    }

    pub fn trace_m(&self) -> C64 {
        (0..self.n_modes).map(|i| self.m.read(i, i)).sum()
    }

    /// Block matrix `H = [[M, P], [Q, Mᵀ]]` with `Ĥ = ½ α†Hα − ½ tr M + c0`.
    pub fn block_matrix(&self) -> CMat {
        let n = self.n_modes;
        Mat::from_fn(2 * n, 2 * n, |r, c| match (r < n, c < n) {
            (true, true) => self.m.read(r, c),
            (true, false) => self.p.read(r, c - n),
            (false, true) => self.q.read(r - n, c),
            (false, false) => self.m.read(c - n, r - n),
        })
    }

    /// Constant left over when writing the form as `½ α†Hα + const`.
    pub fn nambu_offset(&self) -> C64 {
        self.c0 - self.trace_m() * 0.5
    }
}
