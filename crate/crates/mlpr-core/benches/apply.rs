//! Tensor apply kernel: sequential vs rayon-chunked reduction.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use mlpr_core::generators::random_stochastic_tensor_seeded;
use mlpr_core::tensor::ApplyMode;
use mlpr_core::vector::DistributionVector;

fn bench_apply(c: &mut Criterion) {
    // n = 220, m = 3: ~48k unfolding columns, enough nonzeros to cross
    // the parallel cutoff.
    let tensor = random_stochastic_tensor_seeded(220, 3, 7).expect("generator");
    let s = DistributionVector::uniform(tensor.dim());

    let mut group = c.benchmark_group("apply");
    group.throughput(criterion::Throughput::Elements(tensor.nnz()));
    let seq = tensor.clone().with_apply_mode(ApplyMode::Sequential);
    group.bench_function("sequential", |b| {
        b.iter(|| black_box(seq.apply(black_box(&s)).unwrap()))
    });
    #[cfg(feature = "parallel")]
    {
        let par = tensor.clone().with_apply_mode(ApplyMode::Parallel);
        group.bench_function("parallel", |b| {
            b.iter(|| black_box(par.apply(black_box(&s)).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_apply);
criterion_main!(benches);
