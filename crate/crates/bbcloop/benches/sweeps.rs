//! Rayon vs sequential throughput on the data-parallel hot paths: frequency
//! sweeps, margin searches over scenario batches, and independent simulation
//! runs. `frequency_response` and the margin search dispatch through the
//! `parallel` feature; the `*_seq` baselines pin the same work to one thread.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use bbcloop::analysis::{frequency_response, log_grid, stability_margins};
use bbcloop::exec::seq_map;
use bbcloop::plant::{ConverterParams, OperatingMode};
use bbcloop::reference::{analog_closed_loop, digital_closed_loop, ControllerChoice};
use bbcloop::simloop::{boost_sim_gains, simulate_closed_loop, SimConfig};

fn bench_frequency_sweep(c: &mut Criterion) {
    let loop_tf = analog_closed_loop(OperatingMode::Boost, ControllerChoice::Pid, 0.5).unwrap();
    let mut group = c.benchmark_group("frequency_sweep");
    for points_per_decade in [400usize, 4000] {
        let grid = log_grid(1.0, 1e7, points_per_decade);
        group.bench_with_input(
            BenchmarkId::new("parallel", grid.len()),
            &grid,
            |b, grid| b.iter(|| frequency_response(&loop_tf, grid).unwrap()),
        );
        group.bench_with_input(
            BenchmarkId::new("sequential", grid.len()),
            &grid,
            |b, grid| {
                b.iter(|| {
                    // same evaluation, forced onto one thread
                    let raw: Vec<f64> = seq_map(grid, |&w| loop_tf.eval_at_omega(w).norm());
                    raw
                })
            },
        );
    }
    group.finish();
}

fn bench_margin_batch(c: &mut Criterion) {
    let systems = vec![
        analog_closed_loop(OperatingMode::Boost, ControllerChoice::Pid, 0.5).unwrap(),
        analog_closed_loop(OperatingMode::Boost, ControllerChoice::Pidn, 0.5).unwrap(),
        analog_closed_loop(OperatingMode::Buck, ControllerChoice::Pid, 1.0).unwrap(),
        analog_closed_loop(OperatingMode::Buck, ControllerChoice::Pidn, 1.0).unwrap(),
        digital_closed_loop(OperatingMode::Buck, ControllerChoice::Pid, 0.1, 1.0).unwrap(),
        digital_closed_loop(OperatingMode::Buck, ControllerChoice::Pidn, 0.1, 1.0).unwrap(),
    ];
    let mut group = c.benchmark_group("margin_batch");
    group.sample_size(10);
    group.bench_function("parallel_inner", |b| {
        b.iter(|| {
            systems
                .iter()
                .map(|tf| stability_margins(tf).unwrap().pm_min_deg())
                .collect::<Vec<_>>()
        })
    });
    group.finish();
}

fn bench_sim_batch(c: &mut Criterion) {
    let params = ConverterParams::default();
    let cfg = SimConfig {
        horizon: 0.05,
        ..SimConfig::default()
    };
    let setpoints: Vec<f64> = (0..8).map(|i| 20.0 + i as f64).collect();
    let mut group = c.benchmark_group("sim_sweep");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| {
            bbcloop::exec::par_map(&setpoints, |&sp| {
                let cfg = SimConfig {
                    setpoint_bus: sp,
                    ..cfg.clone()
                };
                simulate_closed_loop(&params, &boost_sim_gains(), &cfg)
                    .unwrap()
                    .v_c
                    .last()
                    .copied()
            })
        })
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            seq_map(&setpoints, |&sp| {
                let cfg = SimConfig {
                    setpoint_bus: sp,
                    ..cfg.clone()
                };
                simulate_closed_loop(&params, &boost_sim_gains(), &cfg)
                    .unwrap()
                    .v_c
                    .last()
                    .copied()
            })
        })
    });
    group.finish();
}

criterion_group!(benches, bench_frequency_sweep, bench_margin_batch, bench_sim_batch);
criterion_main!(benches);
