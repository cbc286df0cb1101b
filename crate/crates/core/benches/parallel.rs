use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lorentz_lab::concave::ConcaveFn;
use lorentz_lab::harness::{gaussian_corpus, run_suite, CorpusParams, Experiment, SuiteConfig};
use lorentz_lab::optimal_range::{PsiTable, PsiTableConfig};
use lorentz_lab::par::Exec;
use lorentz_lab::spectral::truncation_range_probe;

const MODES: [(&str, Exec); 2] = [("serial", Exec::Serial), ("parallel", Exec::Parallel)];

fn psi_table(c: &mut Criterion) {
    let phi = ConcaveFn::Log1p;
    let mut g = c.benchmark_group("psi_table");
    for (name, exec) in MODES {
        let cfg = PsiTableConfig {
            per_decade: 10,
            exec,
            ..PsiTableConfig::default()
        };
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| PsiTable::build(black_box(&phi), &cfg).unwrap())
        });
    }
    g.finish();
}

fn truncation_probe(c: &mut Criterion) {
    let phi = ConcaveFn::power(0.5).unwrap();
    let psi = PsiTable::build(&phi, &PsiTableConfig::default())
        .unwrap()
        .as_concave()
        .clone();
    let params = CorpusParams {
        dim: 24,
        ..CorpusParams::default()
    };
    let ms = gaussian_corpus(7, 16, params).unwrap();
    let mut g = c.benchmark_group("truncation_range_probe");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                truncation_range_probe(black_box(&ms), &phi, &psi, serde_json::Value::Null, exec)
                    .unwrap()
            })
        });
    }
    g.finish();
}

fn suite(c: &mut Criterion) {
    let mut g = c.benchmark_group("suite");
    g.sample_size(10);
    for (name, exec) in MODES {
        let cfg = SuiteConfig {
            samples: 40,
            experiments: vec![
                Experiment::WitnessGeneral,
                Experiment::HilbertDomination,
                Experiment::WeakL1,
            ],
            exec,
            ..SuiteConfig::default()
        };
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run_suite(black_box(&cfg)))
        });
    }
    g.finish();
}

criterion_group!(benches, psi_table, truncation_probe, suite);
criterion_main!(benches);
