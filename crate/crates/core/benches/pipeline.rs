// SPDX-License-Identifier: Apache-2.0

//! Sequential against parallel execution of the three hot loops.
//!
//! `cargo bench -p mqclass`; with `--no-default-features` only the
//! sequential rows exist.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mqclass::biquadratic::{stage1_candidates, stage2_filter};
use mqclass::multiquad::vet_segment;
use mqclass::par::Exec;
use mqclass::quadratic::{build_census, count_reduced_forms_bulk, ClassNumberCache};

fn strategies() -> Vec<(&'static str, Exec)> {
    #[cfg_attr(not(feature = "parallel"), allow(unused_mut))]
    let mut v = vec![("sequential", Exec::Sequential)];
    #[cfg(feature = "parallel")]
    v.push(("parallel", Exec::Parallel));
    v
}

fn sieve(c: &mut Criterion) {
    let mut g = c.benchmark_group("reduced_form_sieve");
    g.sample_size(10);
    for (name, exec) in strategies() {
        g.bench_with_input(BenchmarkId::new(name, 200_000), &exec, |b, &exec| {
            b.iter(|| count_reduced_forms_bulk(200_000, exec))
        });
    }
    g.finish();
}

fn stage2(c: &mut Criterion) {
    let census = build_census(6_500, 3, Exec::default()).unwrap();
    let cands = stage1_candidates(&census, 2).unwrap();
    let mut g = c.benchmark_group("stage2_real_class_numbers");
    g.sample_size(10);
    for (name, exec) in strategies() {
        g.bench_with_input(BenchmarkId::new(name, cands.len()), &exec, |b, &exec| {
            // fresh cache so every iteration computes
            b.iter(|| stage2_filter(&cands, 2, &ClassNumberCache::new(), exec).unwrap())
        });
    }
    g.finish();
}

fn vetting(c: &mut Criterion) {
    let census = build_census(6_500, 3, Exec::default()).unwrap();
    let cache = ClassNumberCache::new();
    let b2 = mqclass::biquadratic::census_biquad(&census, 2, &cache, Exec::default()).unwrap();
    let mut g = c.benchmark_group("vet_segment_n3");
    g.sample_size(10);
    for (name, exec) in strategies() {
        g.bench_with_input(BenchmarkId::new(name, b2.fields.len()), &exec, |b, &exec| {
            b.iter(|| vet_segment(&b2.fields, &census, &cache, 3, 2, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, sieve, stage2, vetting);
criterion_main!(benches);
