use proptest::prelude::*;
use qbh_core::fock::{ladder_matrix, FockBasis};
use qbh_core::lindblad::{
    adequate_cutoff, coherent_amplitudes, integrate, liouvillian, moment_abscissa, pump_formal_residual,
    solve_loss_steady_state, steady_state, steady_state_for, trace, unvectorize, vectorize, SteadyMethod,
    SUPEROPERATOR_DIM_LIMIT,
};
use qbh_core::linalg::{self, c, dagger, C64, ONE, ZERO};
use qbh_core::{Channel, DissipativeModel, Error, Jump};

#[test]
fn undriven_loss_has_vacuum_null_vector() {
    let m = DissipativeModel::loss(1.3, ZERO, 0.8).unwrap();
    let b = FockBasis::single(12).unwrap();
    let l = liouvillian(&m, &b).unwrap();
    let mut vac = linalg::zeros(13, 13);
    vac.write(0, 0, ONE);
    assert_eq!(linalg::vnorm(&linalg::matvec(&l, &vectorize(&vac))), 0.0);
}

#[test]
fn trace_row_annihilates_the_generator() {
    for m in [
        DissipativeModel::loss(0.4, c(1.0, 0.3), 2.0).unwrap(),
        DissipativeModel::pump(-0.2, c(0.5, 0.0), 1.0).unwrap(),
    ] {
        let d = 9;
        let l = liouvillian(&m, &FockBasis::single(d - 1).unwrap()).unwrap();
        let worst = (0..d * d)
            .map(|j| (0..d).map(|i| l.read(i * (d + 1), j)).sum::<C64>().norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-10, "{worst:e}");
    }
}

#[test]
fn loss_generator_has_a_single_zero_mode() {
    let m = DissipativeModel::loss(0.5, ONE, 2.0).unwrap();
    let ev = linalg::eigvals(&liouvillian(&m, &FockBasis::single(15).unwrap()).unwrap());
    let abscissa = ev.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    assert!(abscissa.abs() < 1e-9, "{abscissa:e}");
    let zeros = ev.iter().filter(|z| z.norm() < 1e-8).count();
    assert_eq!(zeros, 1);
}

#[test]
fn resonant_loss_gives_coherent_state() {
    let m = DissipativeModel::loss(0.0, ONE, 2.0).unwrap();
    let rep = solve_loss_steady_state(&m, Some(25)).unwrap();
    assert!((rep.expected_a_bar - c(0.0, -1.0)).norm() < 1e-15);
    assert!((rep.a_bar - c(0.0, -1.0)).norm() < 1e-8);
    assert!((rep.mean_n - 1.0).abs() < 1e-8);
    assert!(rep.fidelity >= 1.0 - 1e-8);
    assert_eq!(rep.method, SteadyMethod::NullSpace);
}

#[test]
fn detuned_loss_amplitude() {
    let m = DissipativeModel::loss(1.0, ONE, 1.0).unwrap();
    let want = c(0.0, -1.0) / c(0.5, 1.0);
    assert!((m.loss_amplitude().unwrap() - want).norm() < 1e-15);
    assert!((want.norm_sqr() - 0.8).abs() < 1e-15);
    let rep = solve_loss_steady_state(&m, None).unwrap();
    assert_eq!(rep.cutoff, adequate_cutoff(want));
    assert!((rep.a_bar - want).norm() < 1e-8);
    assert!((rep.mean_n - 0.8).abs() < 1e-8);
    assert!(rep.fidelity >= 1.0 - 1e-8);
}

#[test]
fn inadequate_cutoff_is_rejected() {
    let m = DissipativeModel::loss(0.0, ONE, 2.0).unwrap();
    assert!(matches!(solve_loss_steady_state(&m, Some(5)), Err(Error::InadequateCutoff { required: 21, .. })));
}

#[test]
fn pump_has_no_normalizable_steady_state() {
    let m = DissipativeModel::pump(0.0, ONE, 2.0).unwrap();
    assert!(moment_abscissa(&m) > 0.0);
    let b = FockBasis::single(10).unwrap();
    match steady_state_for(&m, &b) {
        Err(Error::NoNormalizableSteadyState { abscissa }) => assert_eq!(abscissa, 2.0),
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(solve_loss_steady_state(&m, None), Err(Error::NoNormalizableSteadyState { .. })));
    // Balanced gain and loss: ⟨a†a⟩ grows linearly, no fixed point either.
    let both = DissipativeModel::new(
        0.0,
        ONE,
        vec![Channel { jump: Jump::Loss, rate: 1.0 }, Channel { jump: Jump::Pump, rate: 1.0 }],
    )
    .unwrap();
    assert!(steady_state_for(&both, &b).is_err());
}

#[test]
fn pump_candidate_residual_decreases() {
    let m = DissipativeModel::pump(0.0, ONE, 2.0).unwrap();
    assert!((m.pump_amplitude().unwrap() - c(0.0, 1.0)).norm() < 1e-15);
    let rep = pump_formal_residual(&m, 0.0, &[20, 30, 40]).unwrap();
    assert!(rep.non_increasing, "{:?}", rep.rows);
    for row in &rep.rows {
        assert!((row.trace - ONE).norm() < 1e-10);
    }
    assert!(rep.rows.last().unwrap().residual < 1e-8, "{:?}", rep.rows);
}

#[test]
fn undriven_pump_candidate_is_hole_vacuum() {
    let m = DissipativeModel::pump(0.3, ZERO, 1.0).unwrap();
    let rep = pump_formal_residual(&m, 0.7, &[10, 20]).unwrap();
    assert_eq!(rep.a_bar, ZERO);
    assert!(rep.rows.iter().all(|r| r.residual < 1e-14 && (r.trace - ONE).norm() < 1e-15), "{:?}", rep.rows);
}

#[test]
fn explicit_pump_candidate_diverges() {
    let m = DissipativeModel::pump(0.0, ONE, 2.0).unwrap();
    let rep = pump_formal_residual(&m, 0.0, &[10, 20, 30]).unwrap();
    let ex: Vec<f64> = rep.rows.iter().map(|r| r.explicit_residual).collect();
    assert!(ex.windows(2).all(|w| w[1] > w[0]), "{ex:?}");
}

#[test]
fn loss_channel_is_not_a_pump() {
    let m = DissipativeModel::loss(0.0, ONE, 2.0).unwrap();
    assert!(matches!(pump_formal_residual(&m, 0.0, &[20]), Err(Error::WrongChannel(_))));
    assert!(matches!(m.pump_amplitude(), Err(Error::WrongChannel(_))));
}

#[test]
fn invalid_models_are_rejected() {
    assert!(DissipativeModel::loss(0.0, ONE, -1.0).is_err());
    assert!(DissipativeModel::pump(f64::NAN, ONE, 1.0).is_err());
    assert!(DissipativeModel::loss(0.0, c(f64::INFINITY, 0.0), 1.0).is_err());
}

#[test]
fn superoperator_limit() {
    let m = DissipativeModel::loss(0.0, ONE, 1.0).unwrap();
    let cut = (SUPEROPERATOR_DIM_LIMIT as f64).sqrt() as usize;
    assert!(matches!(liouvillian(&m, &FockBasis::single(cut).unwrap()), Err(Error::DimensionLimit { .. })));
}

#[test]
fn loss_steady_state_is_physical_and_unique() {
    let m = DissipativeModel::loss(0.6, c(0.8, -0.4), 1.5).unwrap();
    let b = FockBasis::single(24).unwrap();
    let l = liouvillian(&m, &b).unwrap();
    let ss = steady_state(&l).unwrap();
    let (ev, _) = linalg::eigh(&ss.rho);
    assert!(ev[0] >= -1e-10);
    assert!((trace(&ss.rho) - ONE).norm() < 1e-12);
    let sv = linalg::singular_values(&l);
    let small = sv.iter().filter(|s| **s < 1e-8).count();
    assert_eq!(small, 1);
}

#[test]
fn time_integration_preserves_trace_and_hermiticity() {
    let m = DissipativeModel::loss(0.5, c(0.7, 0.2), 1.2).unwrap();
    let b = FockBasis::single(15).unwrap();
    let mut rho0 = linalg::zeros(16, 16);
    let v = coherent_amplitudes(c(0.3, 0.4), 15);
    for i in 0..16 {
        for j in 0..16 {
            rho0.write(i, j, v[i] * v[j].conj());
        }
    }
    let n0 = trace(&rho0);
    let rho = integrate(&m, &b, &rho0, 3.0, 600).unwrap();
    assert!((trace(&rho) - n0).norm() < 1e-9);
    assert_eq!(linalg::fro_diff(&rho, &dagger(&rho)), 0.0);
    // Long runs approach the null-space solution.
    let long = integrate(&m, &b, &rho, 40.0, 8000).unwrap();
    let ss = steady_state(&liouvillian(&m, &b).unwrap()).unwrap();
    assert!(linalg::fro_diff(&long, &ss.rho) < 1e-6);
}

#[test]
fn report_format() {
    let m = DissipativeModel::loss(0.0, ONE, 2.0).unwrap();
    let kv = solve_loss_steady_state(&m, None).unwrap().to_kv();
    let keys: Vec<&str> = kv.lines().map(|l| l.split(" = ").next().unwrap()).collect();
    assert_eq!(keys, ["a_bar_re", "a_bar_im", "mean_n", "fidelity", "cutoff", "residual"]);
}

#[test]
fn vectorization_is_column_stacking() {
    let b = FockBasis::single(2).unwrap();
    let a = ladder_matrix(&b, 0).unwrap();
    let v = vectorize(&a);
    assert_eq!(v[3], ONE);
    assert_eq!(linalg::fro_diff(&unvectorize(&v), &a), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(9))]

    #[test]
    fn loss_mean_matches_closed_form(i in 0usize..3, j in 0usize..3) {
        let delta = [-1.0, 0.0, 1.5][i];
        let gamma = [0.5, 1.0, 3.0][j];
        let m = DissipativeModel::loss(delta, ONE, gamma).unwrap();
        let rep = solve_loss_steady_state(&m, None).unwrap();
        let want = c(0.0, -1.0) / c(gamma / 2.0, delta);
        prop_assert!((rep.a_bar - want).norm() < 1e-7);
        prop_assert!(rep.fidelity >= 1.0 - 1e-8);
        prop_assert!(rep.min_eigenvalue >= -1e-10);
    }
}
