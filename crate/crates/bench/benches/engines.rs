//! Benchmarks for the three delay engines: analytic formulas, absorbing
//! chains, and Monte Carlo. Sizes mirror the preset workloads so the
//! numbers answer "how long until the CSV appears".

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use rlnc_lab::markov::DEFAULT_STATE_CAP;
use rlnc_lab::sim::{run_batch, RngSpec, Scheme};
use rlnc_lab::{analytic, markov};
use rlnc_lab_bench::{hundred_receivers, ten_receivers, two_receivers};

fn analytic_engines(c: &mut Criterion) {
    c.bench_function("single_receiver_recursion_200_packets", |b| {
        b.iter(|| analytic::delay_withbuffer_single_recursive(black_box(200), 0.8, 0.75))
    });
    c.bench_function("single_receiver_closed_rational_30_packets", |b| {
        b.iter(|| analytic::delay_withbuffer_single_closed(black_box(30), 0.8, 0.75))
    });
    let large = hundred_receivers(50);
    c.bench_function("broadcast_series_100_receivers_50_packets", |b| {
        b.iter(|| {
            analytic::delay_broadcast_system(
                black_box(50),
                large.p_recv(),
                1e-12,
            )
        })
    });
    c.bench_function("lower_bound_100_receivers_50_packets", |b| {
        b.iter(|| analytic::lower_bound_system(black_box(&large), 1e-12))
    });
}

fn chain_engines(c: &mut Criterion) {
    let pair = two_receivers(50);
    c.bench_function("joint_chain_2_receivers_50_packets", |b| {
        b.iter(|| markov::withbuffer_system_delay_chain(black_box(&pair), DEFAULT_STATE_CAP))
    });
    let trio = ten_receivers(10);
    c.bench_function("broadcast_chain_10_receivers_4_packets", |b| {
        let s = rlnc_lab::Scenario::new(4, trio.p_relay(), trio.p_recv().to_vec()).unwrap();
        b.iter(|| markov::nobuffer_system_delay_chain(black_box(&s), DEFAULT_STATE_CAP))
    });
}

fn simulation_engines(c: &mut Criterion) {
    let s = ten_receivers(10);
    for scheme in Scheme::ALL {
        c.bench_function(&format!("simulate_{scheme}_10x10_2000_trials"), |b| {
            b.iter(|| run_batch(black_box(scheme), &s, 2000, RngSpec::new(1)))
        });
    }
}

criterion_group!(benches, analytic_engines, chain_engines, simulation_engines);
criterion_main!(benches);
