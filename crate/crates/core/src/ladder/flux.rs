use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::ladder::poly::LadderPolynomial;
use crate::ladder::substitution::{frame_represent, FrameTag};
use crate::linalg::C64;
use crate::quadratic::QuadraticForm;

/// Reduces an angle to `(−π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y <= -PI {
        y + 2.0 * PI
    } else {
        y
    }
}

/// Equality modulo `2π`.
pub fn angles_equal(a: f64, b: f64, tol: f64) -> bool {
    wrap_angle(a - b).abs() <= tol
}

/// Directed hopping network. Edge `i → j` carries the coefficient of `a_j†a_i`
/// in the frame representation of the Hamiltonian.
#[derive(Debug, Clone)]
pub struct HoppingGraph {
    frames: Vec<FrameTag>,
    edges: BTreeMap<(usize, usize), C64>,
}

impl HoppingGraph {
    pub fn new(frames: Vec<FrameTag>) -> Self {
        Self { frames, edges: BTreeMap::new() }
    }

    pub fn n_nodes(&self) -> usize {
        self.frames.len()
    }

    pub fn frames(&self) -> &[FrameTag] {
        &self.frames
    }

    pub fn add_edge(&mut self, from: usize, to: usize, amplitude: C64) {
        if amplitude != C64::new(0.0, 0.0) {
            *self.edges.entry((from, to)).or_insert(C64::new(0.0, 0.0)) += amplitude;
        }
    }

    pub fn amplitude(&self, from: usize, to: usize) -> Option<C64> {
        self.edges.get(&(from, to)).copied()
    }

    pub fn edges(&self) -> &BTreeMap<(usize, usize), C64> {
        &self.edges
    }

    /// Edge phase `φ_ij = arg t_ji`.
    pub fn phase(&self, from: usize, to: usize) -> Option<f64> {
        self.amplitude(from, to).map(|t| t.arg())
    }

    /// Reads hopping terms after mapping hole-tagged modes into their frame.
    /// Pairing and on-site terms are ignored.
    pub fn from_polynomial(p: &LadderPolynomial, frames: &[FrameTag]) -> Result<Self> {
        let rep = frame_represent(p, frames)?;
        let mut g = Self::new(frames.to_vec());
        for (key, coeff) in rep.terms() {
            let nz: Vec<(usize, (u32, u32))> =
                key.iter().cloned().enumerate().filter(|(_, e)| *e != (0, 0)).collect();
            if let [(x, ex), (y, ey)] = nz.as_slice() {
                match (ex, ey) {
                    ((1, 0), (0, 1)) => g.add_edge(*y, *x, *coeff),
                    ((0, 1), (1, 0)) => g.add_edge(*x, *y, *coeff),
                    _ => {}
                }
            }
        }
        Ok(g)
    }

    pub fn from_quadratic(q: &QuadraticForm, frames: &[FrameTag]) -> Result<Self> {
        Self::from_polynomial(&LadderPolynomial::from_quadratic(q), frames)
    }
}

/// Sum of edge phases along `cycle` (closed back to its first node), in `(−π, π]`.
pub fn loop_flux(g: &HoppingGraph, cycle: &[usize]) -> Result<f64> {
    if cycle.len() < 2 {
        return Err(Error::InvalidArgument("a cycle needs at least two nodes".into()));
    }
    let mut total = 0.0;
    for k in 0..cycle.len() {
        let (from, to) = (cycle[k], cycle[(k + 1) % cycle.len()]);
        let ph = g.phase(from, to).ok_or(Error::MissingEdge { from, to })?;
        total += ph;
    }
    Ok(wrap_angle(total))
}

/// Local phase rotation `M_ij → M_ij e^{i(φ_i − φ_j)}`, `P_ij → P_ij e^{i(φ_i + φ_j)}`,
/// `Q_ij → Q_ij e^{−i(φ_i + φ_j)}`; a hopping `g e^{−iφ} a_1†a_2` picks up `φ − χ_1 + χ_2`.
pub fn gauge_transform(q: &QuadraticForm, phases: &[f64]) -> Result<QuadraticForm> {
    let n = q.n_modes();
    if phases.len() != n {
        return Err(Error::DimensionMismatch(format!("{} phases for {n} modes", phases.len())));
    }
    let rot = |x: f64| C64::from_polar(1.0, x);
    let m = faer::Mat::from_fn(n, n, |i, j| {
        if i == j {
            q.m().read(i, i)
        } else {
            q.m().read(i, j) * rot(phases[i] - phases[j])
        }
    });
    let p = faer::Mat::from_fn(n, n, |i, j| q.p().read(i, j) * rot(phases[i] + phases[j]));
    let qq = faer::Mat::from_fn(n, n, |i, j| q.q().read(i, j) * rot(-(phases[i] + phases[j])));
    QuadraticForm::new(m, p, qq, q.c0())
}
