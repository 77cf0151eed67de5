//! Solver throughput: AC power flow, sequential AC/DC solve and a short
//! optimizer run.

use std::hint::black_box;

use acdc_mopf::ac_power_flow::{solve_ac_pf, AcInjectionOverlay, AcOptions};
use acdc_mopf::{run_cmopso, shipped_case, solve_acdc, ControlSettings, OpfProblem, OptimizerConfig};
use criterion::{criterion_group, criterion_main, Criterion};

fn ac_power_flow(c: &mut Criterion) {
    for name in ["case14_ac", "case118_ac"] {
        let case = shipped_case(name).expect("bundled case");
        let controls = ControlSettings::from_case(&case);
        let overlay = AcInjectionOverlay::zero(case.buses.len());
        let opts = AcOptions::default();
        c.bench_function(&format!("ac_pf/{name}"), |b| {
            b.iter(|| solve_ac_pf(black_box(&case), &controls, &overlay, &opts, None).expect("converges"))
        });
    }
}

fn acdc(c: &mut Criterion) {
    for name in ["case14_2t", "case14_3t", "case118_3t"] {
        let case = shipped_case(name).expect("bundled case");
        let controls = ControlSettings::from_case(&case);
        c.bench_function(&format!("acdc/{name}"), |b| b.iter(|| solve_acdc(black_box(&case), &controls)));
    }
}

fn optimizer(c: &mut Criterion) {
    let case = shipped_case("case14_2t").expect("bundled case");
    let problem = OpfProblem::new(&case, true);
    let cfg = OptimizerConfig { s_pop: 20, s_sub: 5, i_max: 5, ..OptimizerConfig::default() };
    let mut group = c.benchmark_group("cmopso");
    group.sample_size(10);
    group.bench_function("case14_2t/pop20x5", |b| b.iter(|| run_cmopso(&problem, &cfg).expect("valid config")));
    group.finish();
}

criterion_group!(benches, ac_power_flow, acdc, optimizer);
criterion_main!(benches);
