use clickhd_bench::{eight_port, even_cat, fig4_arm};
use clickhd_core::*;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

fn bench_expectation(c: &mut Criterion) {
    let cat = even_cat();
    let product = FactorProduct::single(0, 0.16, Complex64::new(0.0, 3.0)).unwrap();
    c.bench_function("factor_product_expectation", |b| {
        b.iter(|| cat.expect_product(criterion::black_box(&product)).unwrap())
    });
}

fn bench_click_statistics(c: &mut Criterion) {
    let cat = even_cat();
    let mut group = c.benchmark_group("click_statistics");
    for n in [8usize, 32, 128] {
        let arm = fig4_arm(n).at_phase(FRAC_PI_2);
        group.bench_with_input(BenchmarkId::from_parameter(n), &arm, |b, arm| {
            b.iter(|| click_statistics(&cat, arm).unwrap())
        });
    }
    group.finish();
}

fn bench_joint_statistics(c: &mut Criterion) {
    let cat = even_cat();
    let scheme = eight_port().at_phase(FRAC_PI_2);
    let arms = scheme.descriptors();
    c.bench_function("joint_click_statistics_eight_port", |b| {
        b.iter(|| joint_click_statistics(&cat, criterion::black_box(&arms)).unwrap())
    });
}

fn bench_moment_matrix(c: &mut Criterion) {
    let cat = even_cat();
    let arm = fig4_arm(8).at_phase(FRAC_PI_2);
    c.bench_function("moment_matrix_order_4", |b| {
        b.iter(|| moment_matrix(&cat, criterion::black_box(&arm), 4, 0.0, 1.0).unwrap())
    });
}

fn bench_fock_oracle(c: &mut Criterion) {
    let cat = even_cat();
    let fock = FockVector::from_superposition(&cat, 40).unwrap();
    let product = FactorProduct::single(0, 0.16, Complex64::new(0.0, 3.0)).unwrap();
    c.bench_function("fock_oracle_expectation", |b| {
        b.iter(|| fock.fock_expectation(criterion::black_box(&product)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_expectation,
    bench_click_statistics,
    bench_joint_statistics,
    bench_moment_matrix,
    bench_fock_oracle
);
criterion_main!(benches);
