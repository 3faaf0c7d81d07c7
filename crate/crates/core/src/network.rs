//! Two-mode dimers, three-mode rings and their single-excitation experiments.
//!
//! Time is measured in units of `1/g`.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::fock::{evolve, fock_state, second_quantize, FockBasis};
use crate::ladder::{
    angles_equal, excitation_violation, frame_represent, loop_flux, ph_substitute, wrap_angle, Direction, FrameTag, HoppingGraph,
    LadderPolynomial,
};
use crate::linalg::{self, c, C64, CMat, I, ZERO};
use crate::quadratic::QuadraticForm;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimerKind {
    /// Pairing: `−Δ₁a₁†a₁ + Δ₂a₂†a₂ + g(a₁†a₂† + a₁a₂)`.
    P,
    /// Dissipative pairing: `−Δ₁a₁†a₁ + Δ₂a₂†a₂ + g(a₁†a₂† − a₁a₂)`.
    Dp,
    /// Beamsplitter: `Δ₁a₁†a₁ + Δ₂a₂†a₂ + ig(a₁a₂† − a₁†a₂)`.
    Bs,
    /// Dissipative beamsplitter: `Δ₁a₁†a₁ + Δ₂a₂†a₂ + ig(a₁a₂† + a₁†a₂)`.
    Dbs,
}

impl DimerKind {
    /// Partner reached by a particle-hole substitution on the first mode.
    pub fn dual(self) -> Self {
        match self {
            DimerKind::P => DimerKind::Dbs,
            DimerKind::Dbs => DimerKind::P,
            DimerKind::Dp => DimerKind::Bs,
            DimerKind::Bs => DimerKind::Dp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimerSpec {
    pub kind: DimerKind,
    pub delta1: f64,
    pub delta2: f64,
    pub g: f64,
}

impl DimerSpec {
    pub fn new(kind: DimerKind, delta1: f64, delta2: f64, g: f64) -> Result<Self> {
        if !(g >= 0.0) || !g.is_finite() || !delta1.is_finite() || !delta2.is_finite() {
            return Err(Error::InvalidArgument(format!("dimer needs finite detunings and g >= 0, got g = {g}")));
        }
        Ok(Self { kind, delta1, delta2, g })
    }

    /// The anti-PT symmetric dimer `DBS(−Δ, Δ, g)`.
    pub fn apt(delta: f64, g: f64) -> Result<Self> {
        Self::new(DimerKind::Dbs, -delta, delta, g)
    }
}

pub fn build_dimer(d: &DimerSpec) -> QuadraticForm {
    let mut q = QuadraticForm::zeros(2);
    let g = c(d.g, 0.0);
    match d.kind {
        DimerKind::P | DimerKind::Dp => {
            q.add_hopping(0, 0, c(-d.delta1, 0.0));
            q.add_hopping(1, 1, c(d.delta2, 0.0));
            q.add_pair_creation(0, 1, g);
            q.add_pair_annihilation(0, 1, if d.kind == DimerKind::P { g } else { -g });
        }
        DimerKind::Bs | DimerKind::Dbs => {
            q.add_hopping(0, 0, c(d.delta1, 0.0));
            q.add_hopping(1, 1, c(d.delta2, 0.0));
            q.add_hopping(1, 0, I * d.g);
            q.add_hopping(0, 1, if d.kind == DimerKind::Dbs { I * d.g } else { -I * d.g });
        }
    }
    q
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrimerKind {
    /// Beamsplitter ring `Σ g e^{−iφ_ij} a_i†a_j`.
    Bst,
    /// The ring with node 1 replaced by a hole.
    Sht,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GaugeStyle {
    /// `φ₁₂ = φ₂₃ = φ₃₁ = Φ/3`.
    #[default]
    Symmetric,
    /// `φ₁₂ = Φ`, the other two zero.
    Concentrated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrimerSpec {
    pub kind: TrimerKind,
    pub g: f64,
    pub delta: f64,
    /// `[φ₁₂, φ₂₃, φ₃₁]`.
    pub phases: [f64; 3],
    pub theta: f64,
    pub gauge_style: GaugeStyle,
}

impl TrimerSpec {
    pub fn with_flux(kind: TrimerKind, g: f64, flux: f64, gauge_style: GaugeStyle) -> Self {
        let phases = match gauge_style {
            GaugeStyle::Symmetric => [flux / 3.0; 3],
            GaugeStyle::Concentrated => [flux, 0.0, 0.0],
        };
        Self { kind, g, delta: 0.0, phases, theta: 0.0, gauge_style }
    }

    pub fn bst(g: f64, flux: f64) -> Self {
        Self::with_flux(TrimerKind::Bst, g, flux, GaugeStyle::Symmetric)
    }

    pub fn sht(g: f64, delta: f64, flux: f64, theta: f64) -> Self {
        Self { delta, theta, ..Self::with_flux(TrimerKind::Sht, g, flux, GaugeStyle::Symmetric) }
    }

    /// `Φ = φ₁₂ + φ₂₃ + φ₃₁` wrapped to `(−π, π]`.
    pub fn flux(&self) -> f64 {
        wrap_angle(self.phases.iter().sum())
    }

    /// `φ_ij` for nodes `i, j ∈ {0, 1, 2}` with `φ_ji = −φ_ij`.
    pub fn phase(&self, i: usize, j: usize) -> f64 {
        match (i, j) {
            (0, 1) => self.phases[0],
            (1, 2) => self.phases[1],
            (2, 0) => self.phases[2],
            (1, 0) | (2, 1) | (0, 2) => -self.phase(j, i),
            _ => 0.0,
        }
    }

    pub fn frames(&self) -> Vec<FrameTag> {
        match self.kind {
            TrimerKind::Bst => vec![FrameTag::Particle; 3],
            TrimerKind::Sht => vec![FrameTag::hole(self.theta), FrameTag::Particle, FrameTag::Particle],
        }
    }

    pub fn is_symmetric_gauge(&self) -> bool {
        self.phases[0] == self.phases[1] && self.phases[1] == self.phases[2]
    }

    fn with_kind(&self, kind: TrimerKind) -> Self {
        Self { kind, ..*self }
    }
}

impl fmt::Display for TrimerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "kind={:?} g={:e} delta={:e} phi12={:e} phi23={:e} phi31={:e} theta={:e} gauge={:?}",
            self.kind, self.g, self.delta, self.phases[0], self.phases[1], self.phases[2], self.theta, self.gauge_style
        )
    }
}

/// Ring Hamiltonian in particle operators, with the frame tags of its natural representation.
///
/// The single-hole ring is written out directly: node 1 carries `−Δ(a₁†a₁ + 1)`,
/// and its couplings to nodes 2, 3 become pairing terms
/// `−ig e^{i(θ+φ₁ᵢ)} a_i†a₁†` and `−ig e^{−i(θ+φ₁ᵢ)} a₁a_i`.
pub fn build_trimer(t: &TrimerSpec) -> (QuadraticForm, Vec<FrameTag>) {
    let mut q = QuadraticForm::zeros(3);
    let g = t.g;
    let hop = |i: usize, j: usize| C64::from_polar(g, -t.phase(i, j));
    match t.kind {
        TrimerKind::Bst => {
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        q.add_hopping(i, j, hop(i, j));
                    }
                }
            }
        }
        TrimerKind::Sht => {
            q.add_hopping(0, 0, c(-t.delta, 0.0));
            q.add_constant(c(-t.delta, 0.0));
            for i in 1..3 {
                q.add_hopping(i, i, c(t.delta, 0.0));
                let j = 3 - i;
                q.add_hopping(i, j, hop(i, j));
                let phi = t.theta + t.phase(0, i);
                q.add_pair_creation(i, 0, -I * C64::from_polar(g, phi));
                q.add_pair_annihilation(0, i, -I * C64::from_polar(g, -phi));
            }
        }
    }
    (q, t.frames())
}

/// Restriction to single-excitation states of the tagged frame:
/// `B_ij = ⟨1_i|Ĥ|1_j⟩`, including the vacuum energy on the diagonal.
pub fn single_excitation_block(q: &QuadraticForm, frames: &[FrameTag]) -> Result<CMat> {
    let p = frame_represent(&LadderPolynomial::from_quadratic(q), frames)?;
    if let Some(term) = excitation_violation(&p) {
        return Err(Error::NotExcitationConserving { term });
    }
    let n = q.n_modes();
    let c0 = p.coefficient(&vec![(0, 0); n]);
    let mut b = linalg::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut key = vec![(0u32, 0u32); n];
            key[i].0 += 1;
            key[j].1 += 1;
            let mut v = p.coefficient(&key);
            if i == j {
                v += c0;
            }
            b.write(i, j, v);
        }
    }
    Ok(b)
}

/// Amplitudes `exp(−iBt) e_start` of a Hermitian block, via its eigenbasis.
#[derive(Debug, Clone)]
pub struct BlockPropagator {
    values: Vec<f64>,
    vectors: CMat,
}

impl BlockPropagator {
    pub fn new(b: &CMat) -> Result<Self> {
        let r = linalg::fro_diff(b, &linalg::dagger(b));
        if r > 1e-12 {
            return Err(Error::NonHermitian(format!("single-excitation block residual {r:e}")));
        }
        let (values, vectors) = linalg::eigh(b);
        Ok(Self { values, vectors })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    pub fn amplitudes(&self, start: usize, t: f64) -> Vec<C64> {
        let n = self.values.len();
        let w: Vec<C64> =
            (0..n).map(|k| self.vectors.read(start, k).conj() * C64::from_polar(1.0, -self.values[k] * t)).collect();
        (0..n).map(|i| (0..n).map(|k| self.vectors.read(i, k) * w[k]).sum()).collect()
    }

    pub fn populations(&self, start: usize, t: f64) -> Vec<f64> {
        self.amplitudes(start, t).iter().map(|a| a.norm_sqr()).collect()
    }

    /// `dp_node/dt = 2 Im(ψ_node* (Bψ)_node)`.
    pub fn population_rate(&self, start: usize, node: usize, t: f64) -> f64 {
        let n = self.values.len();
        let psi = self.amplitudes(start, t);
        let w: Vec<C64> = (0..n)
            .map(|k| {
                let proj: C64 = (0..n).map(|i| self.vectors.read(i, k).conj() * psi[i]).sum();
                proj * self.values[k]
            })
            .collect();
        let bpsi: C64 = (0..n).map(|k| self.vectors.read(node, k) * w[k]).sum();
        2.0 * (psi[node].conj() * bpsi).im
    }
}

#[derive(Debug, Clone)]
pub struct FlowTrace {
    pub spec: TrimerSpec,
    pub times: Vec<f64>,
    /// `populations[k] = [p₁, p₂, p₃]` at `times[k]`.
    pub populations: Vec<[f64; 3]>,
}

impl FlowTrace {
    pub fn node(&self, i: usize) -> Vec<f64> {
        self.populations.iter().map(|p| p[i]).collect()
    }

    pub fn max_population_error(&self) -> f64 {
        self.populations.iter().map(|p| (p.iter().sum::<f64>() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Columns `t,p1,p2,p3`, preceded by a comment line with the ring parameters.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# {}\nt,p1,p2,p3\n", self.spec);
        for (t, p) in self.times.iter().zip(&self.populations) {
            out.push_str(&format!("{t:e},{:e},{:e},{:e}\n", p[0], p[1], p[2]));
        }
        out
    }
}

fn trimer_propagator(t: &TrimerSpec) -> Result<BlockPropagator> {
    let (q, frames) = build_trimer(t);
    BlockPropagator::new(&single_excitation_block(&q, &frames)?)
}

/// Populations after one excitation is placed on node 1 of the ring's own frame.
pub fn chiral_flow(t: &TrimerSpec, times: &[f64]) -> Result<FlowTrace> {
    let prop = trimer_propagator(t)?;
    let populations = times
        .iter()
        .map(|&s| {
            let p = prop.populations(0, s);
            [p[0], p[1], p[2]]
        })
        .collect();
    Ok(FlowTrace { spec: *t, times: times.to_vec(), populations })
}

pub fn uniform_grid(t_max: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|k| t_max * k as f64 / steps as f64).collect()
}

/// Earliest strict local maximum of `p_node` above ½ on the grid, refined by
/// bisection on `dp/dt`.
pub fn first_maximum(t: &TrimerSpec, node: usize, times: &[f64]) -> Result<Option<f64>> {
    let prop = trimer_propagator(t)?;
    let p: Vec<f64> = times.iter().map(|&s| prop.populations(0, s)[node]).collect();
    for k in 1..p.len().saturating_sub(1) {
        if p[k] > 0.5 && p[k] > p[k - 1] && p[k] >= p[k + 1] {
            let (mut lo, mut hi) = (times[k - 1], times[k + 1]);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if prop.population_rate(0, node, mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-14 {
                    break;
                }
            }
            return Ok(Some(0.5 * (lo + hi)));
        }
    }
    Ok(None)
}

/// Nodes in the order their populations first peak, starting from node 1 (1-based labels).
pub fn first_maximum_order(t: &TrimerSpec, times: &[f64]) -> Result<Vec<usize>> {
    let mut peaks = Vec::new();
    for node in 1..3 {
        if let Some(tm) = first_maximum(t, node, times)? {
            peaks.push((tm, node + 1));
        }
    }
    peaks.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut order = vec![1];
    order.extend(peaks.into_iter().map(|p| p.1));
    Ok(order)
}

pub fn format_order(order: &[usize]) -> String {
    order.iter().map(|n| n.to_string()).collect::<Vec<_>>().join("→")
}

/// Time of the first return of the excitation to node 1.
pub fn revival_period(t: &TrimerSpec, times: &[f64]) -> Result<Option<f64>> {
    first_maximum(t, 0, times)
}

#[derive(Debug, Clone, Copy)]
pub struct TimeReversalReport {
    pub max_asymmetry: f64,
    /// `true` when `max|p₂ − p₃| < 1e-9`.
    pub symmetric: bool,
}

pub fn time_reversal_check(t: &TrimerSpec, times: &[f64]) -> Result<TimeReversalReport> {
    if !t.is_symmetric_gauge() {
        return Err(Error::InvalidArgument("time-reversal check needs the symmetric gauge".into()));
    }
    let tr = chiral_flow(t, times)?;
    let max_asymmetry = tr.populations.iter().map(|p| (p[1] - p[2]).abs()).fold(0.0, f64::max);
    Ok(TimeReversalReport { max_asymmetry, symmetric: max_asymmetry < 1e-9 })
}

/// Largest deviation between the single-hole ring traces (hole frame) and
/// the beamsplitter ring traces with the same phases.
pub fn hole_frame_trace_deviation(t: &TrimerSpec, times: &[f64]) -> Result<f64> {
    let a = chiral_flow(&t.with_kind(TrimerKind::Sht), times)?;
    let b = chiral_flow(&t.with_kind(TrimerKind::Bst), times)?;
    Ok(a.populations
        .iter()
        .zip(&b.populations)
        .flat_map(|(x, y)| (0..3).map(move |k| (x[k] - y[k]).abs()))
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy)]
pub struct FluxDualReport {
    pub phi: f64,
    pub phi_prime: f64,
    pub expected: f64,
    pub holds: bool,
}

/// Loop flux before and after mapping all three ring modes to holes.
pub fn hole_loop_flux_check(t: &TrimerSpec) -> Result<FluxDualReport> {
    let (q, frames) = build_trimer(&t.with_kind(TrimerKind::Bst));
    let cycle = [0, 1, 2];
    let phi = loop_flux(&HoppingGraph::from_quadratic(&q, &frames)?, &cycle)?;
    let mut p = LadderPolynomial::from_quadratic(&q);
    for mode in 0..3 {
        p = ph_substitute(&p, mode, t.theta, Direction::Forward)?;
    }
    let phi_prime = loop_flux(&HoppingGraph::from_polynomial(&p, &frames)?, &cycle)?;
    let expected = wrap_angle(PI - phi);
    Ok(FluxDualReport { phi, phi_prime, expected, holds: angles_equal(phi_prime, expected, 1e-12) })
}

/// `1/(1 + e^{−4gt})`.
pub fn bell_fidelity_closed_form(g: f64, t: f64) -> f64 {
    1.0 / (1.0 + (-4.0 * g * t).exp())
}

/// Fidelity of the renormalized `H_DBS(Δ, Δ, g)` evolution of `|01⟩` with `(|01⟩ + |10⟩)/√2`.
pub fn bell_fidelity(delta: f64, g: f64, t: f64, cutoff: usize) -> Result<f64> {
    let q = build_dimer(&DimerSpec::new(DimerKind::Dbs, delta, delta, g)?);
    let basis = FockBasis::uniform(2, cutoff)?;
    let h = second_quantize(&q, &basis)?;
    let psi = evolve(&h, &fock_state(&basis, &[0, 1])?, t, true)?.state;
    let bell: Vec<C64> = {
        let mut v = vec![ZERO; basis.dim()];
        let s = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        v[basis.index(&[0, 1]).expect("cutoff >= 1")] = s;
        v[basis.index(&[1, 0]).expect("cutoff >= 1")] = s;
        v
    };
    let n = linalg::vnorm(&psi);
    Ok((linalg::vdot(&bell, &psi) / n).norm_sqr())
}

/// Eigenvalues `2g cos(2πk/3 − Φ/3)` of the symmetric-gauge ring.
pub fn ring_eigenvalues(g: f64, flux: f64) -> [f64; 3] {
    let mut e = [0.0; 3];
    for (k, v) in e.iter_mut().enumerate() {
        *v = 2.0 * g * (2.0 * PI * k as f64 / 3.0 - flux / 3.0).cos();
    }
    e.sort_by(|a, b| a.total_cmp(b));
    e
}
