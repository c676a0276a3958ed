use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dnnf_forge::families::delta_a;
use dnnf_forge::pipeline::{self, PipelineOptions};
use dnnf_forge::transform::bva;
use dnnf_forge::{compile, PipelineInput, TransformKind};
use dnnf_forge_bench::{compiled_rewrite, SIZES};

fn bench_bva(c: &mut Criterion) {
    let mut group = c.benchmark_group("bva");
    for n in SIZES {
        let cnf = delta_a(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &cnf, |b, cnf| {
            b.iter(|| bva(cnf, 8))
        });
    }
    group.finish();
}

fn bench_compile(c: &mut Criterion) {
    let mut group = c.benchmark_group("compile");
    for n in SIZES {
        let cnf = delta_a(n);
        group.bench_with_input(BenchmarkId::new("plain", n), &cnf, |b, cnf| {
            b.iter(|| compile(cnf))
        });
        let (g, _) = compiled_rewrite(n, 8);
        group.bench_with_input(BenchmarkId::new("rewritten", n), &g, |b, g| {
            b.iter(|| compile(g))
        });
    }
    group.finish();
}

fn bench_forget(c: &mut Criterion) {
    let mut group = c.benchmark_group("forget");
    for n in SIZES {
        let (g, dag) = compiled_rewrite(n, 8);
        let aux = g.aux_vars();
        group.bench_function(BenchmarkId::from_parameter(n), |b| {
            b.iter(|| dag.forget(&aux))
        });
    }
    group.finish();
}

fn bench_pipeline(c: &mut Criterion) {
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    for n in SIZES {
        let input = PipelineInput::Cnf(delta_a(n));
        for kind in [TransformKind::Bva { max_steps: 8 }, TransformKind::None] {
            let mut options = PipelineOptions::new(kind.clone());
            options.verify = false;
            group.bench_function(BenchmarkId::new(kind.to_string(), n), |b| {
                b.iter(|| pipeline::run(&input, &options).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_bva,
    bench_compile,
    bench_forget,
    bench_pipeline
);
criterion_main!(benches);
