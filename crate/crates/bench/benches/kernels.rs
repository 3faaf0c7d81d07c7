use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qbh_core::ladder::{Ladder, RawExpr};
use qbh_core::lindblad::solve_loss_steady_state;
use qbh_core::linalg::{self, c};
use qbh_core::network::uniform_grid;
use qbh_core::*;

/// Deterministic dense Hermitian form on `n` modes.
fn dense_form(n: usize) -> QuadraticForm {
    let mut a = linalg::zeros(n, n);
    let mut b = linalg::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let x = (i * n + j) as f64;
            let y = (j * n + i) as f64;
            a.write(i, j, c((0.3 * x).sin() + (0.3 * y).sin(), (0.7 * x).cos() - (0.7 * y).cos()));
            b.write(i, j, c(0.1 * (1.3 * x).cos(), 0.1 * (0.4 * x).sin()));
        }
        a.write(i, i, c(2.0 + i as f64, 0.0));
    }
    QuadraticForm::hermitian(a, b, 0.0).unwrap()
}

fn bdg(cr: &mut Criterion) {
    let mut group = cr.benchmark_group("bdg");
    for n in [2, 4, 8] {
        let d = build_bdg(&dense_form(n));
        group.bench_with_input(BenchmarkId::new("spectrum", n), &d, |bch, d| {
            bch.iter(|| spectrum(black_box(d), 1e-9).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("symmetries", n), &d, |bch, d| bch.iter(|| check_symmetries(black_box(d))));
    }
    group.finish();
}

fn ladder(cr: &mut Criterion) {
    let q = dense_form(4);
    cr.bench_function("ladder/dual_quadratic_4", |bch| bch.iter(|| dual_quadratic(black_box(&q), 0, 0.4).unwrap()));
    let n_op = LadderPolynomial::number(1, 0);
    cr.bench_function("ladder/hole_number_n20", |bch| {
        bch.iter(|| hole_frame_expectation(black_box(&n_op), &[20], &[20], &[FrameTag::hole(0.7)]).unwrap())
    });
    let p = LadderPolynomial::from_quadratic(&q);
    cr.bench_function("ladder/quadratic_cubed", |bch| bch.iter(|| black_box(&p).pow(3)));
    let mut word = vec![Ladder::Annihilate(0); 6];
    word.extend(vec![Ladder::Create(0); 6]);
    let raw = RawExpr::new().term(c(1.0, 0.0), word);
    cr.bench_function("ladder/normal_order_a6_ad6", |bch| bch.iter(|| normal_order(black_box(&raw), 1)));
}

fn lindblad(cr: &mut Criterion) {
    let mut group = cr.benchmark_group("lindblad");
    group.sample_size(10);
    for gamma in [2.0, 1.0] {
        let m = DissipativeModel::loss(0.0, c(1.0, 0.0), gamma).unwrap();
        group.bench_with_input(BenchmarkId::new("loss_steady_state", gamma), &m, |bch, m| {
            bch.iter(|| solve_loss_steady_state(black_box(m), None).unwrap())
        });
    }
    group.finish();
}

fn gaussian(cr: &mut Criterion) {
    let q = build_dimer(&DimerSpec::new(DimerKind::P, 0.0, 0.0, 1.0).unwrap());
    let g = generator_from_quadratic(&q).unwrap();
    let vac = GaussianState::vacuum(2);
    cr.bench_function("gaussian/evolve_log_negativity", |bch| {
        bch.iter(|| log_negativity(&g.evolve(black_box(&vac), 0.5).unwrap(), &[0]).unwrap())
    });
}

fn network(cr: &mut Criterion) {
    let spec = TrimerSpec::bst(1.0, -PI / 2.0);
    let times = uniform_grid(6.0, 600);
    cr.bench_function("network/chiral_flow_600", |bch| bch.iter(|| chiral_flow(black_box(&spec), &times).unwrap()));
}

criterion_group!(benches, bdg, ladder, lindblad, gaussian, network);
criterion_main!(benches);
