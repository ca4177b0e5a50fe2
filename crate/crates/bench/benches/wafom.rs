//! Merit engine throughput at the experiment scale (s = 4, n = 32).

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use wafom_core::net::NetParams;
use wafom_core::{random_net_strict, wafom_inversion, DigitalNet, FastWafomEngine, WafomEngine, WeightSpec};

fn net(m: usize) -> DigitalNet {
    let p = NetParams::new(2, 4, 32, m).unwrap();
    (1..).find_map(|seed| random_net_strict(p, seed).ok()).unwrap()
}

fn engines(c: &mut Criterion) {
    let weight = WeightSpec::dick_plus_hamming(4, 32);
    let dd = WafomEngine::new(4, 32, &weight).unwrap();
    let fast = FastWafomEngine::new(4, 32, &weight).unwrap();
    for m in [10usize, 12, 14] {
        let net = net(m);
        c.bench_function(&format!("wafom_engine_dd_m{m}"), |b| {
            b.iter(|| dd.wafom(black_box(&net)).unwrap().lg_w)
        });
        c.bench_function(&format!("wafom_engine_fast_m{m}"), |b| {
            b.iter(|| fast.lg_w(black_box(&net)).unwrap())
        });
    }
    // One-shot path: table construction amortized over a single evaluation.
    let one = net(10);
    c.bench_function("wafom_inversion_oneshot_m10", |b| {
        b.iter(|| wafom_inversion(black_box(&one), &weight).unwrap().lg_w)
    });
}

criterion_group!(benches, engines);
criterion_main!(benches);
