//! Shifted-integration throughput: one digital shift pass over 2^12 points.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use wafom_core::net::NetParams;
use wafom_core::{qmc_integrate, random_net_strict, rmse_estimate, sample_shift, Integrand};

fn passes(c: &mut Criterion) {
    let p = NetParams::new(2, 4, 32, 12).unwrap();
    let net = (1..).find_map(|seed| random_net_strict(p, seed).ok()).unwrap();
    let sigma = sample_shift(p, 1, 0, 0);
    for id in ["f1", "f7"] {
        let f = Integrand::by_id(id, 4).unwrap();
        c.bench_function(&format!("qmc_shift_pass_{id}_m12"), |b| {
            b.iter(|| qmc_integrate(black_box(&net), &sigma, &f).unwrap().value)
        });
    }
    let f1 = Integrand::by_id("f1", 4).unwrap();
    c.bench_function("qmc_rmse_16shifts_f1_m12", |b| {
        b.iter(|| rmse_estimate(black_box(&net), &f1, 16, 1).unwrap().e_value)
    });
}

criterion_group!(benches, passes);
criterion_main!(benches);
