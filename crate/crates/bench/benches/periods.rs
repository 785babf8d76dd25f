use criterion::{black_box, criterion_group, criterion_main, Criterion};
use toric_period::operator_algebra::{normal_order, ExactComplex, Word};
use toric_period::{
    build_series, evaluate_period, verify_annihilator, QuadratureSettings, SpectralParams, ToricData,
};

fn periods(c: &mut Criterion) {
    let settings = QuadratureSettings::with_tolerance(1e-10);
    let p1 = ToricData::projective_space(1).unwrap();
    let lambda = SpectralParams::with_lambda(vec![0.5, -0.3]).unwrap();
    c.bench_function("period P^1", |b| {
        b.iter(|| evaluate_period(&p1, &lambda, black_box(&[0.5]), &settings).unwrap())
    });

    let p2 = ToricData::projective_space(2).unwrap();
    let lambda = SpectralParams::with_lambda(vec![0.3, -0.2, 0.1]).unwrap();
    c.bench_function("period P^2", |b| {
        b.iter(|| evaluate_period(&p2, &lambda, black_box(&[0.0]), &settings).unwrap())
    });
}

fn algebra(c: &mut Criterion) {
    let word = Word::parse(2, "E1 E1 F1 F1 H2 E2 F2 C").unwrap();
    c.bench_function("normal order, 8 letters", |b| {
        b.iter(|| normal_order::<ExactComplex>(black_box(&word)))
    });

    let data = ToricData::new(&[vec![1, 1, 1, 0], vec![0, 0, 1, 1]]).unwrap();
    let params = SpectralParams::with_lambda(vec![0.5, -0.75, 0.625, 1.25]).unwrap();
    c.bench_function("annihilator check", |b| {
        b.iter(|| verify_annihilator(&data.charge, &params, black_box(0)))
    });
}

fn series(c: &mut Criterion) {
    let data = ToricData::new(&[vec![1, 1, 0, 0], vec![0, 0, 1, 1]]).unwrap();
    let params = SpectralParams::with_lambda(vec![0.3, -0.5, 0.2, 0.1]).unwrap();
    c.bench_function("series (16, 16)", |b| {
        b.iter(|| build_series(&data, &params, black_box(&[16, 16])).unwrap())
    });
}

criterion_group!(benches, periods, algebra, series);
criterion_main!(benches);
