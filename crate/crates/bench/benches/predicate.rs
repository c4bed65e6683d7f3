use colgraph::{evaluate, parse};
use colgraph_bench::powerlaw;
use criterion::{criterion_group, criterion_main, Criterion};

fn pushdown(c: &mut Criterion) {
    let g = powerlaw(8.0, 20_000);
    let mut group = c.benchmark_group("evaluate");
    for text in ["*", "type=e", "weight>=3", "weight>=3 and not weight>50"] {
        let p = parse(text).unwrap();
        group.bench_function(text, |b| b.iter(|| evaluate(&p, &g.edges, None).unwrap().len()));
    }
    group.finish();
}

criterion_group!(benches, pushdown);
criterion_main!(benches);
