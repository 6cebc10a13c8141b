use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use synmom::codes;
use synmom::estimate::{run_estimation, EstimationOptions, MomentSource};
use synmom::fourier::{fourier_transform, DenseFunction};
use synmom::gf2::{BitMatrix, BitVec};
use synmom::identify::{
    build_coefficient_matrix, certify_full_rank, intersection_matrix, schur_chain, LabelOrder,
    RowSource,
};
use synmom::noise::{gamma_hat, make_weight_t_supports, SupportMetric};
use synmom_bench::planted_five_qubit;

fn gf2_ops(c: &mut Criterion) {
    let mut group = c.benchmark_group("gf2");
    // Deterministic pseudo-random 64x64 matrix.
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut matrix = BitMatrix::zeros(64, 64);
    for i in 0..64 {
        for j in 0..64 {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            matrix.set(i, j, state & 1 == 1);
        }
    }
    group.bench_function("rank_64x64", |b| b.iter(|| black_box(&matrix).rank()));
    group.bench_function("nullspace_64x64", |b| {
        b.iter(|| black_box(&matrix).nullspace())
    });

    let toric = codes::toric(3).unwrap();
    group.bench_function("row_span_2^16", |b| {
        b.iter(|| black_box(toric.check()).row_span(24).unwrap().len())
    });
    group.finish();
}

fn fourier_ops(c: &mut Criterion) {
    let mut group = c.benchmark_group("fourier");
    for bits in [10usize, 16] {
        let values: Vec<f64> = (0..1usize << bits).map(|i| (i as f64).sin()).collect();
        let f = DenseFunction::from_values(bits, values).unwrap();
        group.bench_function(format!("transform_2^{bits}"), |b| {
            b.iter(|| fourier_transform(black_box(&f)))
        });
    }
    group.finish();
}

fn identify_ops(c: &mut Criterion) {
    let mut group = c.benchmark_group("identify");
    let (code, _) = planted_five_qubit();
    let shape = code.shape();
    let supports = make_weight_t_supports(shape, 1, SupportMetric::Pauli);
    let barred: Vec<BitVec> = supports.iter().map(|s| shape.bar(s)).collect();
    let labels = gamma_hat(&barred);
    group.bench_function("build_and_certify_five_qubit", |b| {
        b.iter(|| {
            let ms = build_coefficient_matrix(
                black_box(&code),
                black_box(&labels),
                RowSource::FullGroup,
                LabelOrder::SizeLex,
            )
            .unwrap();
            certify_full_rank(&ms).full_rank
        })
    });
    group.bench_function("schur_chain_n8_t3", |b| {
        b.iter(|| {
            let im = intersection_matrix(8, 3).unwrap();
            schur_chain(&im).unwrap().len()
        })
    });
    group.finish();
}

fn sampling_ops(c: &mut Criterion) {
    let mut group = c.benchmark_group("noise");
    let (code, model) = planted_five_qubit();
    group.bench_function("sample_100k_shots", |b| {
        b.iter(|| model.sample(&code, 100_000, 7).unwrap().shots())
    });
    let s = code.check().row(0).clone();
    group.bench_function("exact_moment", |b| {
        b.iter(|| model.exact_moment(black_box(&s), true))
    });
    group.finish();
}

fn estimation_pipeline(c: &mut Criterion) {
    let mut group = c.benchmark_group("estimate");
    let (code, model) = planted_five_qubit();
    group.bench_function("exact_pipeline_five_qubit", |b| {
        b.iter(|| {
            run_estimation(
                &code,
                &model,
                MomentSource::ExactOracle,
                &EstimationOptions::default(),
            )
            .unwrap()
            .residual_norm
        })
    });
    group.finish();
}

criterion_group!(
    benches,
    gf2_ops,
    fourier_ops,
    identify_ops,
    sampling_ops,
    estimation_pipeline
);
criterion_main!(benches);
