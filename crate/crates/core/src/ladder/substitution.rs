use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::ladder::poly::{antinormal_to_normal, LadderPolynomial};
use crate::linalg::{C64, I};

/// Representation space of one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrameTag {
    Particle,
    /// Hole frame with gauge phase in `[0, 2π)`.
    Hole(f64),
}

impl FrameTag {
    pub fn hole(theta: f64) -> Self {
        FrameTag::Hole(theta.rem_euclid(2.0 * PI))
    }

    pub fn is_hole(&self) -> bool {
        matches!(self, FrameTag::Hole(_))
    }
}

impl std::fmt::Display for FrameTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FrameTag::Particle => f.write_str("particle"),
            FrameTag::Hole(t) => write!(f, "hole({t:e})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `a → −i e^{iθ} a†`, `a† → −i e^{−iθ} a` (conjugation `Ω⁻¹ · Ω`).
    Forward,
    /// `a → i e^{iθ} a†`, `a† → i e^{−iθ} a` (conjugation `Ω · Ω⁻¹`).
    Inverse,
}

impl Direction {
    pub fn inverted(self) -> Self {
        match self {
            Direction::Forward => Direction::Inverse,
            Direction::Inverse => Direction::Forward,
        }
    }

    /// `(c_a, c_d)` with `a → c_a a†` and `a† → c_d a`.
    pub fn factors(self, theta: f64) -> (C64, C64) {
        let s = match self {
            Direction::Forward => -I,
            Direction::Inverse => I,
        };
        let e = C64::from_polar(1.0, theta);
        (s * e, s * e.conj())
    }
}

pub(crate) fn check_mode(mode: usize, n_modes: usize) -> Result<()> {
    if mode >= n_modes {
        Err(Error::ModeOutOfRange { mode, n_modes })
    } else {
        Ok(())
    }
}

/// Replaces the ladder operators of `mode` by the rotated opposite operators and re-normal-orders.
pub fn ph_substitute(
    p: &LadderPolynomial,
    mode: usize,
    theta: f64,
    direction: Direction,
) -> Result<LadderPolynomial> {
    check_mode(mode, p.n_modes())?;
    let s = match direction {
        Direction::Forward => -I,
        Direction::Inverse => I,
    };
    let mut out = LadderPolynomial::zero(p.n_modes());
    for (key, coeff) in p.terms() {
        let (pm, qm) = key[mode];
        // (a†)^p a^q → s^{p+q} e^{i(q−p)θ} a^p (a†)^q; the net phase is formed once so
        // excitation-balanced terms pick up no rounding.
        let net = qm as i64 - pm as i64;
        let phase = if net == 0 { C64::new(1.0, 0.0) } else { C64::from_polar(1.0, net as f64 * theta) };
        let base = coeff * s.powi((pm + qm) as i32) * phase;
        for (w, exps) in antinormal_to_normal(pm, qm) {
            let mut k = key.clone();
            k[mode] = exps;
            out.add_term(k, base * (w as f64));
        }
    }
    Ok(out)
}

/// Operator whose particle-Fock matrix elements are the frame matrix elements
/// `⟨m|_frame A |n⟩_frame`; each hole mode is mapped with the inverse substitution.
pub fn frame_represent(p: &LadderPolynomial, frames: &[FrameTag]) -> Result<LadderPolynomial> {
    if frames.len() != p.n_modes() {
        return Err(Error::DimensionMismatch(format!(
            "{} frame tags for {} modes",
            frames.len(),
            p.n_modes()
        )));
    }
    let mut out = p.clone();
    for (m, f) in frames.iter().enumerate() {
        if let FrameTag::Hole(theta) = *f {
            out = ph_substitute(&out, m, theta, Direction::Inverse)?;
        }
    }
    Ok(out)
}

/// First term that changes the total excitation number, if any.
pub fn excitation_violation(p: &LadderPolynomial) -> Option<String> {
    p.terms().iter().find_map(|(k, v)| {
        let created: u32 = k.iter().map(|e| e.0).sum();
        let destroyed: u32 = k.iter().map(|e| e.1).sum();
        (created != destroyed).then(|| format!("{:e}{:+e}i {:?}", v.re, v.im, k))
    })
}
