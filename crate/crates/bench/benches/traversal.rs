use colgraph::{FragmentPolicy, Operator, Traverser};
use colgraph_bench::{grid, powerlaw, query};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn traversal(c: &mut Criterion) {
    let workloads = [("grid", grid(), "v5050"), ("powerlaw", powerlaw(8.0, 20_000), "v00100")];
    for (name, g, start) in &workloads {
        let t = Traverser::new(g).with_fragments(FragmentPolicy::Fixed(128), 0.01).unwrap();
        t.index(colgraph::Direction::Forward).unwrap();
        let mut group = c.benchmark_group(format!("traverse/{name}"));
        for r in [1, 3, 6] {
            let cfg = query(start, "*", r);
            for op in [Operator::Ls, Operator::Fi] {
                group.bench_with_input(BenchmarkId::new(op.to_string(), r), &cfg, |b, cfg| {
                    b.iter(|| t.traverse(cfg, Some(op)).unwrap().report.result_size)
                });
            }
        }
        group.finish();
    }
}

criterion_group!(benches, traversal);
criterion_main!(benches);
