mod common;

use common::*;
use faer::Mat;
use proptest::prelude::*;
use qbh_core::gaussian::{
    entanglement_trace, fock_log_negativity, format_entanglement_trace, log_negativity_with_base, symplectic_form,
    symplectic_residual, two_mode_squeezing, LogBase,
};
use qbh_core::linalg::{c, RMat};
use qbh_core::network::{build_dimer, DimerKind, DimerSpec};
use qbh_core::*;
use rand::Rng;
use std::f64::consts::LN_2;

fn dimer(kind: DimerKind, d1: f64, d2: f64, g: f64) -> QuadraticForm {
    build_dimer(&DimerSpec::new(kind, d1, d2, g).unwrap())
}

/// `Δ₁n₁ + Δ₂n₂ + ig(a₁†a₂ + a₂†a₁) + c0` with a coupling of either sign.
fn dissipative_beamsplitter(d1: f64, d2: f64, g: f64, c0: f64) -> QuadraticForm {
    let mut q = QuadraticForm::zeros(2);
    q.add_hopping(0, 0, c(d1, 0.0));
    q.add_hopping(1, 1, c(d2, 0.0));
    q.add_hopping(0, 1, c(0.0, g));
    q.add_hopping(1, 0, c(0.0, g));
    q.with_c0(c(c0, 0.0))
}

fn rmat(n: usize, v: &[f64]) -> RMat {
    Mat::from_fn(n, n, |i, j| v[n * i + j])
}

fn max_diff(a: &RMat, b: &RMat) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            m = m.max((a.read(i, j) - b.read(i, j)).abs());
        }
    }
    m
}

/// `R(φ)·diag(eˢ, e⁻ˢ)·R(ψ)` on one mode, identity elsewhere.
fn local_symplectic(n_modes: usize, mode: usize, phi: f64, s: f64, psi: f64) -> RMat {
    let rot = |a: f64| rmat(2, &[a.cos(), a.sin(), -a.sin(), a.cos()]);
    let sq = rmat(2, &[s.exp(), 0.0, 0.0, (-s).exp()]);
    let block = &(&rot(phi) * &sq) * &rot(psi);
    Mat::from_fn(2 * n_modes, 2 * n_modes, |i, j| {
        if i / 2 == mode && j / 2 == mode {
            block.read(i % 2, j % 2)
        } else if i == j {
            1.0
        } else {
            0.0
        }
    })
}

#[test]
fn free_boson_generates_rotation() {
    let mut q = QuadraticForm::zeros(1);
    q.add_hopping(0, 0, c(1.3, 0.0));
    let s = generator_from_quadratic(&q).unwrap().propagator(0.7).unwrap();
    let (co, si) = ((1.3f64 * 0.7).cos(), (1.3f64 * 0.7).sin());
    assert!(max_diff(&s, &rmat(2, &[co, si, -si, co])) < 1e-14);
}

#[test]
fn resonant_pairing_generates_two_mode_squeezing() {
    let (g, t) = (0.8, 0.9);
    let s = generator_from_quadratic(&dimer(DimerKind::P, 0.0, 0.0, g)).unwrap().propagator(t).unwrap();
    let (ch, sh) = ((g * t).cosh(), (g * t).sinh());
    #[rustfmt::skip]
    let want = rmat(4, &[
        ch, 0.0, 0.0, -sh,
        0.0, ch, -sh, 0.0,
        0.0, -sh, ch, 0.0,
        -sh, 0.0, 0.0, ch,
    ]);
    assert!(max_diff(&s, &want) < 1e-12);
}

#[test]
fn beamsplitter_generates_rotation_between_modes() {
    let (g, t) = (0.6, 1.1);
    let s = generator_from_quadratic(&dimer(DimerKind::Bs, 0.0, 0.0, g)).unwrap().propagator(t).unwrap();
    let (co, si) = ((g * t).cos(), (g * t).sin());
    #[rustfmt::skip]
    let want = rmat(4, &[
        co, 0.0, -si, 0.0,
        0.0, co, 0.0, -si,
        si, 0.0, co, 0.0,
        0.0, si, 0.0, co,
    ]);
    assert!(max_diff(&s, &want) < 1e-14);
}

#[test]
fn non_hermitian_forms_are_rejected() {
    assert!(matches!(generator_from_quadratic(&dimer(DimerKind::Dbs, 1.0, 1.0, 0.5)), Err(Error::NonHermitian(_))));
}

#[test]
fn tmsv_examples() {
    let v = tmsv(0.0);
    assert!(max_diff(v.cov(), GaussianState::vacuum(2).cov()) == 0.0);
    assert!(log_negativity(&v, &[0]).unwrap() < 1e-15);
    assert!((log_negativity(&tmsv(0.5), &[0]).unwrap() - 1.0).abs() < 1e-10);
    assert!((log_negativity(&tmsv(-0.7), &[1]).unwrap() - 1.4).abs() < 1e-10);
    for nu in tmsv(1.2).symplectic_eigenvalues() {
        assert!((nu - 0.5).abs() < 1e-12);
    }
    let bits = log_negativity_with_base(&tmsv(0.5), &[0], LogBase::Two).unwrap();
    assert!((bits - 1.0 / LN_2).abs() < 1e-10);
}

#[test]
fn resonant_pairing_entangles_linearly() {
    let q = dimer(DimerKind::P, 0.0, 0.0, 1.0);
    let s = generator_from_quadratic(&q).unwrap().evolve(&GaussianState::vacuum(2), 0.6).unwrap();
    assert!((log_negativity(&s, &[0]).unwrap() - 1.2).abs() < 1e-8);
    assert!((s.purity_determinant() - 1.0).abs() < 1e-8);
}

#[test]
fn gaussian_and_fock_entanglement_agree() {
    let q = dimer(DimerKind::P, 0.0, 0.0, 1.0);
    for t in [0.1, 0.3, 0.5] {
        let gauss = generator_from_quadratic(&q).unwrap().evolve(&GaussianState::vacuum(2), t).unwrap();
        let eg = log_negativity(&gauss, &[0]).unwrap();
        let ef = fock_log_negativity(&q, t, 30).unwrap();
        assert!((eg - ef).abs() < 1e-4, "t={t}: {eg} vs {ef}");
        assert!((eg - 2.0 * t).abs() < 1e-8);
    }
}

#[test]
fn ground_state_of_pairing_dimer() {
    let q = dimer(DimerKind::P, -1.0, 1.0, 0.6);
    let r = two_mode_squeezing(&q).unwrap();
    assert!((r - 0.5 * LN_2).abs() < 1e-15);
    let gs = ground_state(&q).unwrap();
    assert!((log_negativity(&gs, &[0]).unwrap() - LN_2).abs() < 1e-9);
    assert!(max_diff(gs.cov(), tmsv(r).cov()) < 1e-12 || max_diff(gs.cov(), tmsv(-r).cov()) < 1e-12);
    assert!((gs.purity_determinant() - 1.0).abs() < 1e-10);
}

#[test]
fn uncoupled_ground_state_is_vacuum() {
    let gs = ground_state(&dimer(DimerKind::P, -1.0, 1.0, 0.0)).unwrap();
    assert!(max_diff(gs.cov(), GaussianState::vacuum(2).cov()) < 1e-15);
    assert!(log_negativity(&gs, &[0]).unwrap() < 1e-15);
}

#[test]
fn ground_entanglement_diverges_toward_instability() {
    let gs = [0.1, 0.3, 0.5, 0.7, 0.9, 0.95, 0.99, 0.999];
    let e: Vec<f64> = gs
        .iter()
        .map(|&g| log_negativity(&ground_state(&dimer(DimerKind::P, -1.0, 1.0, g)).unwrap(), &[0]).unwrap())
        .collect();
    assert!(e.windows(2).all(|w| w[1] > w[0]), "{e:?}");
    for (g, en) in gs.iter().zip(&e) {
        assert!((en - g.atanh()).abs() < 1e-8 * (1.0 + en));
    }
    assert!(e.last().unwrap() > &3.5);
}

#[test]
fn unstable_pairing_is_rejected() {
    let q = dimer(DimerKind::P, -1.0, 1.0, 1.2);
    match ground_state(&q) {
        Err(Error::Unstable { eigenvalue }) => assert!((eigenvalue.im.abs() - (1.2f64.powi(2) - 1.0).sqrt()).abs() < 1e-9),
        other => panic!("unexpected {other:?}"),
    }
    assert!(two_mode_squeezing(&q).is_err());
}

#[test]
fn invalid_inputs() {
    let v = GaussianState::vacuum(2);
    assert!(matches!(log_negativity(&v, &[]), Err(Error::InvalidPartition(_))));
    assert!(matches!(log_negativity(&v, &[0, 1]), Err(Error::InvalidPartition(_))));
    assert!(matches!(log_negativity(&v, &[2]), Err(Error::InvalidPartition(_))));
    let squashed = rmat(2, &[0.1, 0.0, 0.0, 0.1]);
    assert!(GaussianState::new(vec![0.0; 2], squashed).is_err());
    let asym = rmat(2, &[1.0, 0.2, 0.0, 1.0]);
    assert!(GaussianState::new(vec![0.0; 2], asym).is_err());
}

#[test]
fn dual_frame_entanglement_of_anti_pt_dimer() {
    let q = dimer(DimerKind::P, -1.0, 1.0, 0.6);
    let rep = dual_frame_entanglement(&q, 0, 0.0, EntanglementScenario::Ground).unwrap();
    assert!((rep.e_n - LN_2).abs() < 1e-9);
    assert_eq!(rep.frames, vec![FrameTag::hole(0.0), FrameTag::Particle]);
    // The dual is the anti-PT dissipative beamsplitter with couplings −ig and
    // the tracked constant −1.
    assert!(rep.dual.bit_equal(&dissipative_beamsplitter(-1.0, 1.0, -0.6, -1.0)));
    for g in [0.2, 0.4, 0.8] {
        let rep = dual_frame_entanglement(&dimer(DimerKind::P, -1.0, 1.0, g), 0, 0.0, EntanglementScenario::Ground).unwrap();
        assert!((rep.e_n - 2.0 * 0.5 * g.atanh()).abs() < 1e-9);
    }
}

#[test]
fn dual_frame_entanglement_of_resonant_evolution() {
    let q = dimer(DimerKind::P, 0.0, 0.0, 1.0);
    let rep = dual_frame_entanglement(&q, 0, 0.0, EntanglementScenario::ResonantEvolution { t: 0.6 }).unwrap();
    assert!((rep.e_n - 1.2).abs() < 1e-8);
    assert!(rep.dual.bit_equal(&dissipative_beamsplitter(0.0, 0.0, -1.0, 0.0)));
    let free = dimer(DimerKind::P, 0.0, 0.0, 0.0);
    let rep = dual_frame_entanglement(&free, 0, 0.0, EntanglementScenario::ResonantEvolution { t: 0.6 }).unwrap();
    assert!(rep.e_n < 1e-15);
}

#[test]
fn entanglement_trace_file() {
    let q = dimer(DimerKind::P, 0.0, 0.0, 0.5);
    let rows = entanglement_trace(&q, &GaussianState::vacuum(2), &[0], &[0.0, 0.5, 1.0]).unwrap();
    for (t, e) in &rows {
        assert!((e - t).abs() < 1e-10);
    }
    let text = format_entanglement_trace(&rows);
    assert!(text.starts_with("t,E_N\n"));
    assert_eq!(text.lines().count(), 4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn propagators_are_symplectic(seed in any::<u64>(), n in 1usize..=3, t in 0.0f64..=10.0) {
        let q = random_stable(&mut rng(seed), n);
        let s = generator_from_quadratic(&q).unwrap().propagator(t).unwrap();
        prop_assert!(symplectic_residual(&s) < 1e-10);
        let g = generator_from_quadratic(&q).unwrap();
        let jg = &symplectic_form(n) * g.matrix();
        prop_assert!(max_diff(&jg, &jg.transpose().to_owned()) < 1e-12);
    }

    #[test]
    fn evolution_preserves_purity(seed in any::<u64>(), t in 0.0f64..=10.0, r in 0.0f64..1.0) {
        let q = random_stable(&mut rng(seed), 2);
        let s = generator_from_quadratic(&q).unwrap().evolve(&tmsv(r), t).unwrap();
        prop_assert!((s.purity_determinant() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn local_operations_keep_entanglement(seed in any::<u64>()) {
        let mut rg = rng(seed);
        let q = random_stable(&mut rg, 2);
        let state = generator_from_quadratic(&q).unwrap().evolve(&tmsv(rg.gen_range(0.0..1.0)), rg.gen_range(0.0..5.0)).unwrap();
        let e0 = log_negativity(&state, &[0]).unwrap();
        let mode = rg.gen_range(0..2);
        let local = local_symplectic(2, mode, rg.gen_range(-3.0..3.0), rg.gen_range(-1.0..1.0), rg.gen_range(-3.0..3.0));
        let e1 = log_negativity(&state.transform(&local), &[0]).unwrap();
        prop_assert!((e0 - e1).abs() < 1e-9);
    }
}
