use criterion::{black_box, criterion_group, criterion_main, Criterion};

use ncreal::coding::kc_assign;
use ncreal::harness::{brute_min_modulus, check_modulus};
use ncreal::{pair, unpair, Modulus, Probe};
use ncreal_bench::{standard_compression, standard_input};

fn bench_pairing(c: &mut Criterion) {
    c.bench_function("pair_unpair_roundtrip_4096", |b| {
        b.iter(|| {
            for n in 0..4096u64 {
                let (i, j) = unpair(black_box(n));
                black_box(pair(i, j));
            }
        })
    });
}

fn bench_compression(c: &mut Criterion) {
    c.bench_function("compression_boundary_10", |b| {
        b.iter(|| {
            let comp = standard_compression(black_box(7));
            black_box(comp.boundary(10).unwrap());
        })
    });
    c.bench_function("compression_pointwise_64", |b| {
        b.iter(|| {
            let comp = standard_compression(black_box(7));
            let seq = comp.compressed();
            for j in 0..64 {
                black_box(seq.eval(j).unwrap());
            }
        })
    });
}

fn bench_coding(c: &mut Criterion) {
    let lengths: Vec<u64> = (0..256).map(|i| 9 + (i % 4)).collect();
    c.bench_function("kc_assign_256", |b| {
        b.iter(|| black_box(kc_assign(black_box(&lengths)).unwrap()))
    });
}

fn bench_harness(c: &mut Criterion) {
    let x = standard_input(5);
    c.bench_function("check_modulus_horizon_64", |b| {
        b.iter(|| {
            black_box(
                check_modulus(
                    black_box(&x),
                    &Probe::identity(),
                    &Modulus::identity(),
                    64,
                )
                .unwrap(),
            )
        })
    });
    c.bench_function("brute_min_modulus_horizon_64", |b| {
        b.iter(|| black_box(brute_min_modulus(black_box(&x), &Probe::identity(), 64).unwrap()))
    });
}

criterion_group!(
    benches,
    bench_pairing,
    bench_compression,
    bench_coding,
    bench_harness
);
criterion_main!(benches);
