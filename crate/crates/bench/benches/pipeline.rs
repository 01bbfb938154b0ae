//! Throughput of the simulation, interpretation, sampling and tokenizer
//! hot paths.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use metadesign_core::circuit::build_graph_state;
use metadesign_core::datagen::{attempt_seed, generate_sample, GenConfig};
use metadesign_core::optics::{Edge, Setup};
use metadesign_core::targets::{reference_code, TargetClass};
use metadesign_core::tokenizer;
use metadesign_core::{MetaCode, Task};

fn complete_graph(n: usize, dim: u8) -> Setup {
    let edges = (0..n).flat_map(|u| {
        (u + 1..n).flat_map(move |v| {
            (0..dim).flat_map(move |a| (0..dim).map(move |b| Edge::unit(u, v, a, b)))
        })
    });
    Setup::from_edges(n, dim, edges).unwrap()
}

fn compute_state(c: &mut Criterion) {
    let mut group = c.benchmark_group("compute_state");
    for n in [4, 6, 8] {
        let setup = complete_graph(n, 2);
        group.bench_with_input(BenchmarkId::new("complete_dim2", n), &setup, |b, s| {
            b.iter(|| s.compute_state())
        });
    }
    let w = MetaCode::parse(
        reference_code(Task::Optics, TargetClass::W).unwrap(),
        Task::Optics,
    )
    .unwrap();
    for n in [3, 5, 7] {
        let setup = w.instantiate_setup(n).unwrap();
        group.bench_with_input(BenchmarkId::new("w_reference", n), &setup, |b, s| {
            b.iter(|| s.compute_state())
        });
    }
    group.finish();
}

fn circuits(c: &mut Criterion) {
    let mut group = c.benchmark_group("circuit");
    for q in [8, 14, 20] {
        let edges: Vec<_> = (0..q - 1).map(|v| (v, v + 1)).collect();
        let prog = build_graph_state(q, &edges).unwrap();
        group.bench_with_input(BenchmarkId::new("linear_graph_state", q), &prog, |b, p| {
            b.iter(|| p.run().unwrap().postprocess().unwrap())
        });
    }
    group.finish();
}

fn sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("datagen_sample");
    for config in [
        GenConfig::optics_grid()[0],
        GenConfig::Circuit,
        GenConfig::Graph,
    ] {
        let mut attempt = 0u64;
        group.bench_function(config.tag(), |b| {
            b.iter(|| {
                attempt += 1;
                black_box(generate_sample(config, attempt_seed(0, 0, attempt)).is_ok())
            })
        });
    }
    group.finish();
}

fn tokenize(c: &mut Criterion) {
    let text = reference_code(Task::Optics, TargetClass::W).unwrap();
    let code = MetaCode::parse(text, Task::Optics).unwrap();
    let states: Vec<_> = (0..3)
        .map(|n| {
            code.instantiate_setup(n)
                .unwrap()
                .compute_state()
                .canonical()
        })
        .collect();
    c.bench_function("tokenize/encode_code", |b| {
        b.iter(|| tokenizer::encode_code(black_box(&code)).unwrap())
    });
    c.bench_function("tokenize/encode_states", |b| {
        b.iter(|| tokenizer::encode_states(black_box(&states), Task::Optics).unwrap())
    });
    let seq = tokenizer::encode_states(&states, Task::Optics).unwrap();
    c.bench_function("tokenize/decode_states", |b| {
        b.iter(|| tokenizer::decode_states(black_box(&seq), Task::Optics).unwrap())
    });
    c.bench_function("dsl/parse", |b| {
        b.iter(|| MetaCode::parse(black_box(text), Task::Optics).unwrap())
    });
}

criterion_group!(benches, compute_state, circuits, sampling, tokenize);
criterion_main!(benches);
