mod common;

use common::*;
use proptest::prelude::*;
use qbh_core::fock::{ladder_matrix, second_quantize_poly};
use qbh_core::ladder::{
    angles_equal, dual_quadratic_with, excitation_violation, frame_represent, wrap_angle, Ladder, RawExpr,
};
use qbh_core::linalg::{c, dagger, C64, ONE};
use qbh_core::network::{build_dimer, DimerKind, DimerSpec};
use qbh_core::*;
use rand::Rng;
use std::f64::consts::PI;

fn dimer(kind: DimerKind, d1: f64, d2: f64, g: f64) -> QuadraticForm {
    build_dimer(&DimerSpec::new(kind, d1, d2, g).unwrap())
}

fn n1() -> LadderPolynomial {
    LadderPolynomial::number(1, 0)
}

#[test]
fn commutator_reorders() {
    let p = normal_order(&RawExpr::new().term(ONE, vec![Ladder::Annihilate(0), Ladder::Create(0)]), 1);
    assert_eq!(p, &n1() + &LadderPolynomial::identity(1));
}

#[test]
fn squared_words_reorder() {
    use Ladder::*;
    let p = normal_order(&RawExpr::new().term(ONE, vec![Annihilate(0), Annihilate(0), Create(0), Create(0)]), 1);
    let mut want = LadderPolynomial::monomial(1, vec![(2, 2)], ONE);
    want.add_term(vec![(1, 1)], c(4.0, 0.0));
    want.add_term(vec![(0, 0)], c(2.0, 0.0));
    assert_eq!(p, want);
    // Brute-force check on a cutoff-12 block, built at cutoff 16 so no word hits the edge.
    let big = FockBasis::single(16).unwrap();
    let a = ladder_matrix(&big, 0).unwrap();
    let ad = dagger(&a);
    let direct = &(&(&a * &a) * &ad) * &ad;
    let m = second_quantize_poly(&p, &big).unwrap();
    for i in 0..=12 {
        for j in 0..=12 {
            assert!((direct.read(i, j) - m.read(i, j)).norm() < 1e-9);
        }
    }
}

#[test]
fn normal_ordering_is_idempotent() {
    let mut r = rng(7);
    let p = random_poly(&mut r, 2, 4, 6);
    let mut expr = RawExpr::new();
    for (key, coeff) in p.terms() {
        let mut word = Vec::new();
        for (m, &(pp, _)) in key.iter().enumerate() {
            word.extend(std::iter::repeat(Ladder::Create(m)).take(pp as usize));
        }
        for (m, &(_, qq)) in key.iter().enumerate() {
            word.extend(std::iter::repeat(Ladder::Annihilate(m)).take(qq as usize));
        }
        expr = expr.term(*coeff, word);
    }
    assert_eq!(normal_order(&expr, 2), p);
}

#[test]
fn forward_number_gives_negative_hole_number() {
    let got = ph_substitute(&n1(), 0, 0.0, Direction::Forward).unwrap();
    let want = &n1().scale(c(-1.0, 0.0)) - &LadderPolynomial::identity(1);
    assert_eq!(got, want);
}

#[test]
fn forward_keeps_symmetrized_oscillator_up_to_sign() {
    let half = &n1() + &LadderPolynomial::constant(1, c(0.5, 0.0));
    for theta in [0.0, 0.4, 2.0, -1.1] {
        let got = ph_substitute(&half, 0, theta, Direction::Forward).unwrap();
        assert!(got.max_abs_diff(&half.scale(c(-1.0, 0.0))) < 1e-15);
    }
}

#[test]
fn four_forward_substitutions_are_identity() {
    let mut r = rng(11);
    for _ in 0..20 {
        let p = random_poly(&mut r, 2, 4, 5);
        let theta = r.gen_range(-PI..PI);
        let mode = r.gen_range(0..2);
        let mut x = p.clone();
        for _ in 0..4 {
            x = ph_substitute(&x, mode, theta, Direction::Forward).unwrap();
        }
        assert!(x.max_abs_diff(&p) < 1e-13);
        let mut y = p.clone();
        for _ in 0..4 {
            y = ph_substitute(&y, mode, 0.0, Direction::Forward).unwrap();
        }
        assert_eq!(y, p);
    }
}

#[test]
fn mode_out_of_range() {
    assert!(matches!(ph_substitute(&n1(), 1, 0.0, Direction::Forward), Err(Error::ModeOutOfRange { .. })));
}

#[test]
fn dual_of_dissipative_beamsplitter_is_pairing_dimer() {
    for (d1, d2, g) in [(1.0, 1.0, 0.5), (0.3, -0.7, 0.2), (-1.0, 1.0, 0.6)] {
        let dual = dual_quadratic(&dimer(DimerKind::Dbs, d1, d2, g), 0, 0.0).unwrap();
        let want = dimer(DimerKind::P, d1, d2, g).with_c0(c(-d1, 0.0));
        assert!(dual.bit_equal(&want), "{dual:?}");
        let back = dual_quadratic_with(&want, 0, 0.0, Direction::Inverse).unwrap();
        assert!(back.bit_equal(&dimer(DimerKind::Dbs, d1, d2, g)));
    }
}

#[test]
fn dual_of_beamsplitter_is_dissipative_pairing_dimer() {
    let dual = dual_quadratic(&dimer(DimerKind::Bs, 0.9, 1.4, 0.3), 0, 0.0).unwrap();
    let want = dimer(DimerKind::Dp, 0.9, 1.4, 0.3).with_c0(c(-0.9, 0.0));
    assert!(dual.bit_equal(&want));
}

#[test]
fn uncoupled_mode_keeps_its_frequency() {
    let mut q = QuadraticForm::zeros(1);
    q.add_hopping(0, 0, c(1.3, 0.0));
    q.add_constant(c(0.65, 0.0));
    let dual = dual_quadratic(&q, 0, 0.8).unwrap();
    assert!((dual.m().read(0, 0) - c(-1.3, 0.0)).norm() < 1e-15);
    assert!((dual.c0() - c(-0.65, 0.0)).norm() < 1e-15);
    // Its BdG frequencies are unchanged.
    let a = spectrum(&build_bdg(&q), 1e-9).unwrap().eigenvalues;
    let b = spectrum(&build_bdg(&dual), 1e-9).unwrap().eigenvalues;
    assert!(multiset_distance(&a, &b) < 1e-15);
}

#[test]
fn hole_occupation() {
    let frames = [FrameTag::hole(0.0)];
    assert_eq!(hole_frame_expectation(&n1(), &[3], &[3], &frames).unwrap(), c(-4.0, 0.0));
    assert_eq!(hole_frame_expectation(&n1(), &[3], &[3], &[FrameTag::Particle]).unwrap(), c(3.0, 0.0));
    let displaced = qbh_core::ladder::displaced_number(c(2f64.sqrt(), 0.0));
    let v = hole_frame_expectation(&displaced, &[0], &[0], &frames).unwrap();
    assert!((v - ONE).norm() <= 4.0 * f64::EPSILON);
}

#[test]
fn displaced_hole_occupation_general() {
    for (abar, n) in [(c(0.3, -1.2), 0u32), (c(1.5, 0.5), 2), (c(0.0, 2.0), 5)] {
        let v = hole_frame_expectation(&qbh_core::ladder::displaced_number(abar), &[n], &[n], &[FrameTag::hole(1.0)])
            .unwrap();
        let want = abar.norm_sqr() - (n as f64 + 1.0);
        assert!((v.re - want).abs() < 1e-13 && v.im.abs() < 1e-13);
    }
}

#[test]
fn loop_flux_examples() {
    let mut g = HoppingGraph::new(vec![FrameTag::Particle; 3]);
    for (i, j) in [(0, 1), (1, 2), (2, 0)] {
        g.add_edge(i, j, C64::from_polar(1.0, -PI / 6.0));
    }
    assert!(angles_equal(loop_flux(&g, &[0, 1, 2]).unwrap(), -PI / 2.0, 1e-12));
    assert!(matches!(loop_flux(&g, &[0, 2, 1]), Err(Error::MissingEdge { .. })));
}

#[test]
fn gauge_transform_of_single_hopping() {
    let (phi, chi1, chi2) = (0.7, 0.25, -1.1);
    let mut q = QuadraticForm::zeros(2);
    q.add_hopping(0, 1, C64::from_polar(1.0, -phi));
    q.add_hopping(1, 0, C64::from_polar(1.0, phi));
    let t = gauge_transform(&q, &[chi1, chi2]).unwrap();
    assert!((t.m().read(0, 1).arg() - wrap_angle(-(phi - chi1 + chi2))).abs() < 1e-14);
    let same = gauge_transform(&q, &[0.3, 0.3]).unwrap();
    assert!(same.max_abs_diff(&q) < 1e-15);
}

#[test]
fn trimer_flux_survives_gauge_and_hole_map() {
    let mut r = rng(5);
    let trimer = qbh_core::network::build_trimer(&qbh_core::network::TrimerSpec::bst(1.0, PI / 2.0)).0;
    let frames = [FrameTag::Particle; 3];
    let base = loop_flux(&HoppingGraph::from_quadratic(&trimer, &frames).unwrap(), &[0, 1, 2]).unwrap();
    let phases: Vec<f64> = (0..3).map(|_| r.gen_range(-PI..PI)).collect();
    let moved = gauge_transform(&trimer, &phases).unwrap();
    let flux = loop_flux(&HoppingGraph::from_quadratic(&moved, &frames).unwrap(), &[0, 1, 2]).unwrap();
    assert!(angles_equal(base, flux, 1e-12));

    let quarter = qbh_core::network::build_trimer(&qbh_core::network::TrimerSpec::bst(1.0, PI / 4.0)).0;
    let mut p = LadderPolynomial::from_quadratic(&quarter);
    for m in 0..3 {
        p = ph_substitute(&p, m, 0.0, Direction::Forward).unwrap();
    }
    let flux = loop_flux(&HoppingGraph::from_polynomial(&p, &frames).unwrap(), &[0, 1, 2]).unwrap();
    assert!(angles_equal(flux, 3.0 * PI / 4.0, 1e-12));
}

#[test]
fn text_round_trip() {
    let p = random_poly(&mut rng(3), 3, 4, 8);
    let text = p.to_text();
    assert_eq!(LadderPolynomial::from_text(3, &text).unwrap(), p);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines.iter().all(|l| l.contains(" : (")));
}

#[test]
fn excitation_check_reports_terms() {
    let q = dimer(DimerKind::P, 1.0, 1.0, 0.4);
    let p = LadderPolynomial::from_quadratic(&q);
    assert!(excitation_violation(&p).is_some());
    let rep = frame_represent(&p, &[FrameTag::hole(0.0), FrameTag::Particle]).unwrap();
    assert!(excitation_violation(&rep).is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn normal_order_matches_matrix_products(seed in any::<u64>()) {
        let mut r = rng(seed);
        let expr = random_expr(&mut r, 1, 4, 4);
        let p = normal_order(&expr, 1);
        let big = FockBasis::single(16).unwrap();
        let direct = expr_matrix(&expr, &big);
        let m = second_quantize_poly(&p, &big).unwrap();
        for i in 0..=12 {
            for j in 0..=12 {
                prop_assert!((direct.read(i, j) - m.read(i, j)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn substitution_preserves_commutator(theta in -PI..PI, forward in any::<bool>()) {
        let dir = if forward { Direction::Forward } else { Direction::Inverse };
        let a = ph_substitute(&LadderPolynomial::annihilation(1, 0), 0, theta, dir).unwrap();
        let ad = ph_substitute(&LadderPolynomial::creation(1, 0), 0, theta, dir).unwrap();
        let comm = &a.commutator(&ad) - &LadderPolynomial::identity(1);
        prop_assert!(comm.max_abs_diff(&LadderPolynomial::zero(1)) < 1e-15);
    }

    #[test]
    fn dual_then_inverse_restores_form(seed in any::<u64>(), n in 1usize..=4, theta in -PI..PI) {
        let mut r = rng(seed);
        let q = random_general(&mut r, n);
        let mode = r.gen_range(0..n);
        let exact = dual_quadratic_with(&dual_quadratic(&q, mode, 0.0).unwrap(), mode, 0.0, Direction::Inverse).unwrap();
        prop_assert!(exact.bit_equal(&q));
        let back = dual_quadratic_with(&dual_quadratic(&q, mode, theta).unwrap(), mode, theta, Direction::Inverse).unwrap();
        prop_assert!(back.max_abs_diff(&q) < 1e-14);
    }

    #[test]
    fn dual_matches_polynomial_substitution(seed in any::<u64>(), n in 1usize..=4, theta in -PI..PI) {
        let mut r = rng(seed);
        let q = random_general(&mut r, n);
        let mode = r.gen_range(0..n);
        let coeff = LadderPolynomial::from_quadratic(&dual_quadratic(&q, mode, theta).unwrap());
        let poly = ph_substitute(&LadderPolynomial::from_quadratic(&q), mode, theta, Direction::Forward).unwrap();
        prop_assert!(coeff.max_abs_diff(&poly) < 1e-14);
    }

    #[test]
    fn dual_preserves_bdg_spectrum(seed in any::<u64>(), n in 1usize..=4, theta in -PI..PI) {
        let mut r = rng(seed);
        let q = random_hermitian(&mut r, n);
        let mode = r.gen_range(0..n);
        let a = spectrum(&build_bdg(&q), 1e-9).unwrap().eigenvalues;
        let b = spectrum(&build_bdg(&dual_quadratic(&q, mode, theta).unwrap()), 1e-9).unwrap().eigenvalues;
        prop_assert!(multiset_distance(&a, &b) < 1e-10);
    }

    #[test]
    fn flux_is_gauge_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let phases = [r.gen_range(-PI..PI), r.gen_range(-PI..PI), r.gen_range(-PI..PI)];
        let spec = qbh_core::network::TrimerSpec { phases, ..qbh_core::network::TrimerSpec::bst(1.0, 0.0) };
        let q = qbh_core::network::build_trimer(&spec).0;
        let frames = [FrameTag::Particle; 3];
        let f0 = loop_flux(&HoppingGraph::from_quadratic(&q, &frames).unwrap(), &[0, 1, 2]).unwrap();
        let chi: Vec<f64> = (0..3).map(|_| r.gen_range(-PI..PI)).collect();
        let moved = gauge_transform(&q, &chi).unwrap();
        let f1 = loop_flux(&HoppingGraph::from_quadratic(&moved, &frames).unwrap(), &[0, 1, 2]).unwrap();
        prop_assert!(angles_equal(f0, f1, 1e-12));
    }

    #[test]
    fn hole_number_is_minus_n_minus_one(n in 0u32..=20, theta in -PI..PI) {
        let v = hole_frame_expectation(&n1(), &[n], &[n], &[FrameTag::hole(theta)]).unwrap();
        prop_assert_eq!(v, c(-(n as f64) - 1.0, 0.0));
    }
}
