//! End-to-end acceptance checks, one PASS/FAIL line per criterion.
//!
//! Runs every criterion by default; pass criterion numbers as arguments
//! (`cargo test --test acceptance -- 1 3 8`) to run a subset. Optimizer runs
//! are cached and shared between the criteria that need them.

use std::collections::BTreeSet;
use std::sync::OnceLock;
use std::time::Instant;

use acdc_mopf::ac_power_flow::{newton_system, solve_ac_pf, AcInjectionOverlay, AcOptions};
use acdc_mopf::case_model::{
    AcBranch, AcBus, BusKind, CaseData, ControlMode, Converter, DcBranch, DcBus, Generator, PqCircle, DEFAULT_LOSS_A,
    DEFAULT_LOSS_B, DEFAULT_LOSS_C,
};
use acdc_mopf::cmopso::{hypervolume_2d, nadir_reference, run_nsga2, OpfProblem, OptimizerConfig};
use acdc_mopf::decision_support::{fcm_cluster, grp_priority};
use acdc_mopf::objectives_constraints::{evaluate, voltage_deviation};
use acdc_mopf::study::{default_config, median, run_pipeline, run_study, study_variants, PipelineResult, PipelineSettings, StudyRow};
use acdc_mopf::vsc_dc_grid::{
    converter_loss, converter_powers, solve_dc_grid, ActiveTarget, ConverterTarget, DcOptions,
};
use acdc_mopf::{shipped_case, solve_acdc, ControlSettings, ParetoArchive, RunStats};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEEDS: [u64; 10] = [42, 43, 44, 45, 46, 47, 48, 49, 50, 51];
/// The 118-bus study is run on fewer seeds to keep the suite's runtime bounded.
const SEEDS_118: [u64; 3] = [42, 43, 44];

type Criterion = (u32, &'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    details: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Self { pass: true, details: Vec::new() }
    }

    /// Records a sub-check; any failing sub-check fails the criterion.
    fn check(&mut self, ok: bool, what: String) {
        self.pass &= ok;
        self.details.push(format!("[{}] {what}", if ok { "ok" } else { "FAIL" }));
    }

    fn note(&mut self, what: String) {
        self.details.push(format!("[info] {what}"));
    }
}

fn main() {
    let selected: BTreeSet<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria: [Criterion; 9] = [
        (1, "converter equations vs complex-arithmetic oracle", criterion_1),
        (2, "DC grid vs brute-force oracle", criterion_2),
        (3, "AC power flow correctness", criterion_3),
        (4, "baseline reproduction (case14_2t)", criterion_4),
        (5, "optimization reproduction at desk scale", criterion_5),
        (6, "CMOPSO vs NSGA-II at equal budget", criterion_6),
        (7, "structural orderings of the case studies", criterion_7),
        (8, "decision-stage properties", criterion_8),
        (9, "DC-voltage containment and objective variants", criterion_9),
    ];
    let mut lines = Vec::new();
    for (n, title, run) in criteria {
        if !selected.is_empty() && !selected.contains(&n) {
            continue;
        }
        let started = Instant::now();
        let v = run();
        let secs = started.elapsed().as_secs_f64();
        for d in &v.details {
            println!("  criterion {n}: {d}");
        }
        let line = format!("criterion {n}: {} - {title} ({secs:.1} s)", if v.pass { "PASS" } else { "FAIL" });
        println!("{line}");
        lines.push((v.pass, line));
    }
    println!();
    println!("acceptance summary");
    for (_, line) in &lines {
        println!("{line}");
    }
    if lines.iter().any(|(pass, _)| !pass) {
        std::process::exit(1);
    }
}

// ---------------------------------------------------------------- criterion 1

/// Powers leaving both ends into the coupling branch, by complex arithmetic.
fn branch_powers_oracle(us: Complex64, uc: Complex64, z: Complex64) -> (Complex64, Complex64) {
    let i_sc = (us - uc) / z;
    (us * i_sc.conj(), uc * (-i_sc).conj())
}

fn loss_oracle(s_c: Complex64, uc: f64, a: f64, b: f64, c: f64) -> f64 {
    let i = s_c.norm() / (3f64.sqrt() * uc);
    a + b * i + c * i * i
}

fn criterion_1() -> Verdict {
    let mut v = Verdict::new();
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (u_s, u_c) = (rng.random_range(0.85..1.15), rng.random_range(0.85..1.15));
        let (d_s, d_c) = (rng.random_range(-0.6..0.6), rng.random_range(-0.6..0.6));
        let z = Complex64::new(rng.random_range(0.0005..0.05), rng.random_range(0.02..0.3));
        let y = 1.0 / z;
        let got = converter_powers(u_s, d_s, u_c, d_c, y.re, y.im);
        let (ss, sc) = branch_powers_oracle(Complex64::from_polar(u_s, d_s), Complex64::from_polar(u_c, d_c), z);
        for (a, b) in [(got.p_s, ss.re), (got.q_s, ss.im), (got.p_c, sc.re), (got.q_c, sc.im)] {
            worst = worst.max((a - b).abs());
        }
        let (a, b, c) = (rng.random_range(0.0..0.02), rng.random_range(0.0..0.01), rng.random_range(0.0..0.01));
        let loss = converter_loss(got.p_c, got.q_c, u_c, a, b, c).expect("positive voltage");
        worst = worst.max((loss.p_loss - loss_oracle(sc, u_c, a, b, c)).abs());
    }
    let secs = started.elapsed().as_secs_f64();
    v.check(worst <= 1e-10, format!("max deviation over 1000 random inputs {worst:.3e} (tolerance 1e-10)"));
    let idle = converter_loss(0.0, 0.0, 1.0, DEFAULT_LOSS_A, DEFAULT_LOSS_B, DEFAULT_LOSS_C).expect("positive voltage");
    v.check(idle.p_loss == 0.011033, format!("no-load loss {} (expected 0.011033 exactly)", idle.p_loss));
    v.check(secs < 1.0, format!("runtime {secs:.3} s (< 1 s)"));
    v
}

// ---------------------------------------------------------------- criterion 2

fn dc_converter(dc_bus: u32, mode: ControlMode, rng: &mut ChaCha8Rng) -> Converter {
    Converter {
        ac_bus: 1,
        dc_bus,
        r_xfmr: rng.random_range(0.0005..0.01),
        x_xfmr: rng.random_range(0.05..0.2),
        b_filter: 0.0,
        loss_a: DEFAULT_LOSS_A,
        loss_b: DEFAULT_LOSS_B,
        loss_c: DEFAULT_LOSS_C,
        mode,
        p_s_min: -2.0,
        p_s_max: 2.0,
        q_s_min: -2.0,
        q_s_max: 2.0,
        pq_circle: PqCircle::default(),
        init: None,
    }
}

/// DC power delivered into the grid by a converter drawing `s` from terminal `us`.
fn p_dc_oracle(conv: &Converter, us: Complex64, s: Complex64) -> f64 {
    let z = Complex64::new(conv.r_xfmr, conv.x_xfmr);
    let i = (s / us).conj();
    let uc = us - i * z;
    let s_c = uc * (-i).conj();
    -s_c.re - loss_oracle(s_c, uc.norm(), conv.loss_a, conv.loss_b, conv.loss_c)
}

/// Bus voltages of a resistive network with bus 0 held at `u0` and fixed
/// power injections elsewhere: bisection for two buses, finite-difference
/// Newton otherwise.
fn dc_oracle(n: usize, branches: &[(usize, usize, f64)], u0: f64, p: &[f64]) -> Vec<f64> {
    let current = |u: &[f64], i: usize| -> f64 {
        branches
            .iter()
            .map(|&(a, b, r)| if a == i { (u[a] - u[b]) / r } else if b == i { (u[b] - u[a]) / r } else { 0.0 })
            .sum()
    };
    if n == 2 {
        let r = branches[0].2;
        let f = |x: f64| x * (x - u0) / r - p[1];
        let (mut lo, mut hi) = (0.5 * u0, 2.0 * u0);
        let flo = f(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (flo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return vec![u0, 0.5 * (lo + hi)];
    }
    let residual = |u: &[f64]| -> Vec<f64> { (1..n).map(|i| u[i] * current(u, i) - p[i]).collect() };
    let mut u = vec![u0; n];
    for _ in 0..100 {
        let f = residual(&u);
        if f.iter().all(|e| e.abs() < 1e-14) {
            break;
        }
        let mut jac = DMatrix::zeros(n - 1, n - 1);
        for c in 1..n {
            let (mut up, mut dn) = (u.clone(), u.clone());
            up[c] += 1e-7;
            dn[c] -= 1e-7;
            let (fp, fm) = (residual(&up), residual(&dn));
            for r in 0..n - 1 {
                jac[(r, c - 1)] = (fp[r] - fm[r]) / 2e-7;
            }
        }
        let dx = jac.lu().solve(&DVector::from_vec(f)).expect("oracle Jacobian is regular");
        for i in 1..n {
            u[i] -= dx[i - 1];
        }
    }
    u
}

fn criterion_2() -> Verdict {
    let mut v = Verdict::new();
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for trial in 0..200 {
        let n = if trial % 2 == 0 { 2 } else { 3 };
        let branches: Vec<(usize, usize, f64)> = if n == 2 {
            vec![(0, 1, rng.random_range(0.005..0.1))]
        } else {
            vec![(0, 1, rng.random_range(0.005..0.1)), (1, 2, rng.random_range(0.005..0.1)), (0, 2, rng.random_range(0.005..0.1))]
        };
        let u0 = rng.random_range(0.97..1.03);
        let mut modes = vec![ControlMode::ConstUdcConstQs { u_dc: u0, q_s: rng.random_range(-0.3..0.3) }];
        for _ in 1..n {
            modes.push(ControlMode::ConstPsConstQs { p_s: rng.random_range(-0.5..0.5), q_s: rng.random_range(-0.3..0.3) });
        }
        let converters: Vec<Converter> =
            modes.iter().enumerate().map(|(k, &m)| dc_converter(k as u32 + 1, m, &mut rng)).collect();
        let terminals: Vec<Complex64> =
            (0..n).map(|_| Complex64::from_polar(rng.random_range(0.95..1.05), rng.random_range(-0.3..0.3))).collect();
        let case = CaseData {
            name: format!("dc{trial}"),
            s_base: 100.0,
            buses: vec![AcBus {
                id: 1,
                kind: BusKind::Slack,
                p_load: 0.0,
                q_load: 0.0,
                shunt_g: 0.0,
                shunt_b: 0.0,
                v_min: 0.9,
                v_max: 1.1,
                v_ref: 1.0,
            }],
            branches: vec![],
            generators: vec![],
            shunts: vec![],
            dc_buses: (1..=n as u32).map(|id| DcBus { id, u_min: 0.9, u_max: 1.1, u_ref: 1.0, i_max: None }).collect(),
            dc_branches: branches
                .iter()
                .map(|&(a, b, r)| DcBranch { from: a as u32 + 1, to: b as u32 + 1, r, i_max: 10.0 })
                .collect(),
            converters,
        };
        let targets: Vec<ConverterTarget> = modes
            .iter()
            .map(|m| match *m {
                ControlMode::ConstUdcConstQs { u_dc, q_s } => {
                    ConverterTarget { active: ActiveTarget::DcVoltage(u_dc), q_s, p_s_guess: 0.0 }
                }
                ControlMode::ConstPsConstQs { p_s, q_s } => ConverterTarget { active: ActiveTarget::Power(p_s), q_s, p_s_guess: p_s },
                _ => unreachable!(),
            })
            .collect();
        let Ok(sol) = solve_dc_grid(&case, &targets, &terminals, None, &DcOptions::default()) else {
            failures += 1;
            continue;
        };
        let mut p = vec![0.0; n];
        for k in 1..n {
            let ControlMode::ConstPsConstQs { p_s, q_s } = modes[k] else { unreachable!() };
            p[k] = p_dc_oracle(&case.converters[k], terminals[k], Complex64::new(p_s, q_s));
        }
        let u = dc_oracle(n, &branches, u0, &p);
        for (got, want) in sol.dc.u_dc.iter().zip(&u) {
            worst = worst.max((got - want).abs());
        }
        let p0: f64 = u[0] * branches.iter().map(|&(a, b, r)| if a == 0 { (u[0] - u[b]) / r } else if b == 0 { (u[0] - u[a]) / r } else { 0.0 }).sum::<f64>();
        worst = worst.max((sol.converters[0].p_dc - p0).abs());
    }
    let secs = started.elapsed().as_secs_f64();
    v.check(failures == 0, format!("{failures} of 200 random grids failed to solve"));
    v.check(worst <= 1e-7, format!("max deviation from oracle {worst:.3e} (tolerance 1e-7)"));
    v.check(secs < 5.0, format!("runtime {secs:.3} s (< 5 s)"));
    v
}

// ---------------------------------------------------------------- criterion 3

/// Gauss-Seidel solution of a slack bus feeding one load through `z`.
fn gauss_seidel_two_bus(z: Complex64, s_load: Complex64) -> Complex64 {
    let y = 1.0 / z;
    let v1 = Complex64::new(1.0, 0.0);
    let mut v2 = Complex64::new(1.0, 0.0);
    for _ in 0..100_000 {
        let next = ((-s_load).conj() / v2.conj() + y * v1) / y;
        if (next - v2).norm() < 1e-14 {
            return next;
        }
        v2 = next;
    }
    v2
}

fn criterion_3() -> Verdict {
    let mut v = Verdict::new();
    // Jacobian against central differences
    let case = shipped_case("case14_2t").expect("shipped case");
    let controls = ControlSettings::from_case(&case);
    let sys = newton_system(&case, &controls, &AcInjectionOverlay::zero(case.buses.len())).expect("valid case");
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_rel: f64 = 0.0;
    for _ in 0..10 {
        let vm: Vec<f64> = (0..case.buses.len()).map(|_| rng.random_range(0.9..1.1)).collect();
        let va: Vec<f64> = (0..case.buses.len()).map(|_| rng.random_range(-0.3..0.3)).collect();
        let jac = sys.jacobian_dense(&vm, &va);
        let x0 = sys.unknowns(&vm, &va);
        let h = 1e-6;
        let mut fd = DMatrix::zeros(x0.len(), x0.len());
        for c in 0..x0.len() {
            let eval = |dx: f64| {
                let (mut vv, mut aa) = (vm.clone(), va.clone());
                let mut x = x0.clone();
                x[c] += dx;
                sys.set_unknowns(&x, &mut vv, &mut aa);
                sys.mismatch(&vv, &aa)
            };
            let (fp, fm) = (eval(h), eval(-h));
            for r in 0..x0.len() {
                // mismatch is specified minus calculated
                fd[(r, c)] = -(fp[r] - fm[r]) / (2.0 * h);
            }
        }
        worst_rel = worst_rel.max((&jac - &fd).amax() / jac.amax());
    }
    v.check(worst_rel <= 1e-5, format!("Jacobian vs central differences, worst relative error {worst_rel:.3e} (<= 1e-5)"));

    // two-bus case against Gauss-Seidel
    let (z, s_load) = (Complex64::new(0.02, 0.06), Complex64::new(0.8, 0.3));
    let two = CaseData {
        name: "two_bus".into(),
        s_base: 100.0,
        buses: vec![
            AcBus { id: 1, kind: BusKind::Slack, p_load: 0.0, q_load: 0.0, shunt_g: 0.0, shunt_b: 0.0, v_min: 0.9, v_max: 1.1, v_ref: 1.0 },
            AcBus { id: 2, kind: BusKind::Pq, p_load: s_load.re, q_load: s_load.im, shunt_g: 0.0, shunt_b: 0.0, v_min: 0.9, v_max: 1.1, v_ref: 1.0 },
        ],
        branches: vec![AcBranch { from: 1, to: 2, r: z.re, x: z.im, b_charging: 0.0, tap: None, s_max: 9.0 }],
        generators: vec![Generator {
            bus: 1,
            p_min: 0.0,
            p_max: 10.0,
            q_min: -10.0,
            q_max: 10.0,
            cost_a: 0.0,
            cost_b: 1.0,
            cost_c: 0.0,
            p_set: 0.0,
            v_set: 1.0,
        }],
        shunts: vec![],
        dc_buses: vec![],
        dc_branches: vec![],
        converters: vec![],
    };
    let st = solve_ac_pf(&two, &ControlSettings::from_case(&two), &AcInjectionOverlay::zero(2), &AcOptions::default(), None)
        .expect("two-bus case converges");
    let gs = gauss_seidel_two_bus(z, s_load);
    let err = (Complex64::from_polar(st.v[1], st.theta[1]) - gs).norm();
    v.check(err <= 1e-6, format!("two-bus voltage vs Gauss-Seidel, |dV| = {err:.3e} (<= 1e-6)"));

    // flat start on the 14-bus system
    let ac = shipped_case("case14_ac").expect("shipped case");
    let st = solve_ac_pf(&ac, &ControlSettings::from_case(&ac), &AcInjectionOverlay::zero(14), &AcOptions::default(), None)
        .expect("case14 converges");
    v.check(st.iterations <= 10, format!("case14 flat start converged in {} Newton iterations (<= 10)", st.iterations));
    v
}

// ---------------------------------------------------------------- criterion 4

fn criterion_4() -> Verdict {
    let mut v = Verdict::new();
    let case = shipped_case("case14_2t").expect("shipped case");
    let state = solve_acdc(&case, &ControlSettings::from_case(&case)).expect("baseline solves");
    v.check(state.converged, "baseline AC/DC power flow converges".into());
    let (point, report) = evaluate(&state, &case, true);
    let f_err = (point.f_cost - 8287.68) / 8287.68;
    v.check(f_err.abs() <= 0.02, format!("F = {:.2} $/h vs 8287.68 ({:+.2}%, tolerance 2%)", point.f_cost, 100.0 * f_err));
    let v_err = (point.v_dev - 0.0232) / 0.0232;
    v.check(v_err.abs() <= 0.15, format!("V_de = {:.6} vs 0.0232 ({:+.1}%, tolerance 15%)", point.v_dev, 100.0 * v_err));
    v.note(format!("baseline constraint violation {:.4} over {} items", report.total, report.items.len()));
    v
}

// ------------------------------------------------------------- shared runs

fn case14_2t() -> &'static CaseData {
    static CASE: OnceLock<CaseData> = OnceLock::new();
    CASE.get_or_init(|| shipped_case("case14_2t").expect("shipped case"))
}

fn desk_config(seed: u64) -> OptimizerConfig {
    OptimizerConfig { s_pop: 100, s_sub: 25, i_max: 50, i_t: 5, seed, ..OptimizerConfig::default() }
}

/// Full pipeline on case14_2t for every seed, with `include_dc` deviation.
fn pipelines(include_dc: bool) -> &'static (Vec<PipelineResult>, f64) {
    static WITH_DC: OnceLock<(Vec<PipelineResult>, f64)> = OnceLock::new();
    static AC_ONLY: OnceLock<(Vec<PipelineResult>, f64)> = OnceLock::new();
    let cell = if include_dc { &WITH_DC } else { &AC_ONLY };
    cell.get_or_init(|| {
        let settings = PipelineSettings { include_dc, ..PipelineSettings::default() };
        let started = Instant::now();
        let runs = SEEDS
            .iter()
            .map(|&s| run_pipeline(case14_2t(), &desk_config(s), &settings).expect("pipeline runs"))
            .collect();
        (runs, started.elapsed().as_secs_f64())
    })
}

fn nsga2_runs() -> &'static Vec<(ParetoArchive, RunStats)> {
    static RUNS: OnceLock<Vec<(ParetoArchive, RunStats)>> = OnceLock::new();
    RUNS.get_or_init(|| {
        let problem = OpfProblem::new(case14_2t(), true);
        SEEDS.iter().map(|&s| run_nsga2(&problem, &desk_config(s)).expect("valid config")).collect()
    })
}

fn modes_study() -> &'static Vec<StudyRow> {
    static ROWS: OnceLock<Vec<StudyRow>> = OnceLock::new();
    ROWS.get_or_init(|| {
        let variants = study_variants("case14-modes").expect("known study");
        run_study(&variants, &SEEDS, &PipelineSettings::default(), |_, s| desk_config(s)).expect("study runs")
    })
}

fn min_feasible_cost(archive: &ParetoArchive) -> f64 {
    archive.entries.iter().filter(|e| e.point.feasible).map(|e| e.point.f_cost).fold(f64::INFINITY, f64::min)
}

// ---------------------------------------------------------------- criterion 5

fn criterion_5() -> Verdict {
    let mut v = Verdict::new();
    let (runs, secs) = pipelines(true);
    let per_seed: Vec<f64> = runs.iter().map(|r| min_feasible_cost(&r.archive)).collect();
    let med = median(&per_seed);
    let rows = modes_study();
    let best_known = per_seed
        .iter()
        .copied()
        .chain(nsga2_runs().iter().map(|(a, _)| min_feasible_cost(a)))
        .chain(rows.iter().filter(|r| r.label == "Case 1").map(|r| r.best_cost))
        .fold(f64::INFINITY, f64::min);
    v.check(
        med <= 1.005 * best_known,
        format!("median minimum cost {med:.2} vs best known {best_known:.2} (ratio {:.5}, limit 1.005)", med / best_known),
    );
    v.note(format!("per-seed minimum costs: {:?}", per_seed.iter().map(|c| (c * 100.0).round() / 100.0).collect::<Vec<_>>()));
    v.note(format!("reference 8170.53 $/h: median is {:+.2}%", 100.0 * (med - 8170.53) / 8170.53));
    v.check(*secs < 300.0, format!("10 seeds x 5100 evaluations took {secs:.1} s (target < 300 s)"));
    for r in rows {
        v.note(format!(
            "{} {:<40} F {:>10.2} V_de {:.6} IMP_F {:+.3}% IMP_V {:+.2}%",
            r.label, r.description, r.f_cost, r.v_dev, r.imp_f, r.imp_v
        ));
    }
    for r in rows.iter().filter(|r| r.terminals > 0) {
        v.check(r.imp_f > 0.0 && r.imp_v > 0.0, format!("{}: IMP_F {:+.3}% and IMP_V {:+.2}% both positive", r.label, r.imp_f, r.imp_v));
    }
    v
}

// ---------------------------------------------------------------- criterion 6

fn criterion_6() -> Verdict {
    let mut v = Verdict::new();
    let (runs, _) = pipelines(true);
    let nsga = nsga2_runs();
    let mut wins = 0;
    for ((p, (na, _)), seed) in runs.iter().zip(nsga).zip(SEEDS) {
        let (fc, fn_) = (p.archive.feasible_objectives(), na.feasible_objectives());
        let Some(r) = nadir_reference(&[fc.as_slice(), fn_.as_slice()], 1.1) else {
            v.note(format!("seed {seed}: no feasible solutions"));
            continue;
        };
        let (hc, hn) = (hypervolume_2d(&fc, r), hypervolume_2d(&fn_, r));
        if hc >= hn {
            wins += 1;
        }
        v.note(format!("seed {seed}: HV cmopso {hc:.4e} nsga2 {hn:.4e}"));
    }
    v.check(wins >= 7, format!("CMOPSO hypervolume >= NSGA-II in {wins} of 10 seeds (need 7)"));
    let tc = median(&runs.iter().map(|r| r.stats.wall_time_s).collect::<Vec<_>>());
    let tn = median(&nsga.iter().map(|(_, s)| s.wall_time_s).collect::<Vec<_>>());
    v.check(tc <= tn, format!("median wall time CMOPSO {tc:.2} s vs NSGA-II {tn:.2} s"));
    v
}

// ---------------------------------------------------------------- criterion 7

fn criterion_7() -> Verdict {
    let mut v = Verdict::new();
    let rows = modes_study();
    let pooled = |t: usize| -> f64 {
        median(&rows.iter().filter(|r| r.terminals == t).flat_map(|r| r.per_seed.iter().map(|p| p[1])).collect::<Vec<_>>())
    };
    let (v0, v2, v3) = (pooled(0), pooled(2), pooled(3));
    v.check(v3 < v2, format!("14-bus median V_de: 3-terminal {v3:.6} < 2-terminal {v2:.6}"));
    v.check(v2 < v0, format!("14-bus median V_de: 2-terminal {v2:.6} < AC-only {v0:.6}"));

    let started = Instant::now();
    let variants = study_variants("case118-terminals").expect("known study");
    let rows = run_study(&variants, &SEEDS_118, &PipelineSettings::default(), |var, s| default_config(&var.case, s))
        .expect("study runs");
    v.note(format!("118-bus study over {} seeds took {:.0} s", SEEDS_118.len(), started.elapsed().as_secs_f64()));
    for r in &rows {
        v.note(format!(
            "{} {:<36} F {:>11.2} V_de {:.6} IMP_F {:+.3}% IMP_V {:+.2}%",
            r.label, r.description, r.f_cost, r.v_dev, r.imp_f, r.imp_v
        ));
    }
    for r in rows.iter().filter(|r| r.terminals > 0) {
        v.check(
            r.imp_f > 0.0 && r.imp_v > 0.0 && r.imp_f < 0.2,
            format!("118-bus {}: 0 < IMP_F {:+.3}% < 0.2% and IMP_V {:+.2}% > 0", r.label, r.imp_f, r.imp_v),
        );
    }
    v
}

// ---------------------------------------------------------------- criterion 8

fn criterion_8() -> Verdict {
    let mut v = Verdict::new();
    let (runs, _) = pipelines(true);
    let (mut worst_row, mut loss_ok, mut d_ok) = (0.0_f64, true, true);
    for (r, seed) in runs.iter().zip(SEEDS) {
        let points = r.archive.feasible_objectives();
        let fcm = fcm_cluster(&points, 2, 2.0, seed).expect("clusterable front");
        for row in &fcm.memberships {
            worst_row = worst_row.max((row.iter().sum::<f64>() - 1.0).abs());
        }
        loss_ok &= fcm.loss_history.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
        d_ok &= r.decision.clusters.iter().flat_map(|c| &c.members).all(|m| (0.0..=1.0).contains(&m.d));
    }
    v.check(worst_row <= 1e-12, format!("FCM membership row sums within {worst_row:.2e} of 1 (<= 1e-12)"));
    v.check(loss_ok, "FCM loss history non-increasing on every run".into());
    v.check(d_ok, "GRP d within [0, 1] for every ranked solution".into());

    let mut front = runs[0].archive.feasible_objectives();
    let ideal = [
        front.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min),
        front.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min),
    ];
    front.push(ideal);
    let ranking = grp_priority(&front, &[0.5, 0.5]).expect("valid weights");
    let d_ideal = *ranking.d.last().expect("non-empty");
    v.check((d_ideal - 1.0).abs() <= 1e-12, format!("ideal point gets d = {d_ideal}"));

    let check_shape = |r: &PipelineResult| -> (bool, String) {
        let c = r.decision.compromises();
        let ok = c.len() == 2 && c[0].f_cost < c[1].f_cost && c.iter().all(|m| m.d > 0.5 && m.d < 1.0);
        let desc = c.iter().map(|m| format!("F {:.2} V_de {:.6} d {:.4}", m.f_cost, m.v_dev, m.d)).collect::<Vec<_>>().join("; ");
        (ok, desc)
    };
    let (ok, desc) = check_shape(&runs[0]);
    v.check(ok, format!("seed 42 compromise rows (2 rows, lower-cost first, d in (0.5, 1)): {desc}"));
    let holds = runs.iter().filter(|r| check_shape(r).0).count();
    v.note(format!("compromise shape holds for {holds} of 10 seeds"));
    v
}

// ---------------------------------------------------------------- criterion 9

fn criterion_9() -> Verdict {
    let mut v = Verdict::new();
    let case = case14_2t();
    let (with_dc, _) = pipelines(true);
    let (ac_only, _) = pipelines(false);
    let problem = OpfProblem::new(case, true);
    let (mut checked, mut outside, mut worst) = (0, 0, (f64::INFINITY, f64::NEG_INFINITY));
    for r in with_dc {
        for e in &r.archive.entries {
            let Some(state) = problem.solve(&e.x) else { continue };
            checked += 1;
            let lo = state.dc.u_dc.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = state.dc.u_dc.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            worst = (worst.0.min(lo), worst.1.max(hi));
            if lo < 0.94 || hi > 1.06 {
                outside += 1;
            }
        }
    }
    v.check(outside == 0 && checked > 0, format!("{outside} of {checked} archive solutions have DC voltages outside [0.94, 1.06] (range seen {:.4}..{:.4})", worst.0, worst.1));

    // representative solution of each run, re-measured both ways
    let measure = |r: &PipelineResult| -> Option<(f64, f64)> {
        let rep = &r.representative;
        let e = r.archive.entries.iter().find(|e| e.point.f_cost == rep.f_cost && e.point.v_dev == rep.v_dev)?;
        let state = problem.solve(&e.x)?;
        Some((voltage_deviation(&state, case, false), voltage_deviation(&state, case, true)))
    };
    let (mut ac_better, mut full_worse) = (0, 0);
    for ((a, d), seed) in ac_only.iter().zip(with_dc).zip(SEEDS) {
        let (Some((a_ac, a_full)), Some((d_ac, d_full))) = (measure(a), measure(d)) else {
            v.note(format!("seed {seed}: representative could not be re-solved"));
            continue;
        };
        ac_better += usize::from(a_ac < d_ac);
        full_worse += usize::from(a_full > d_full);
        v.note(format!(
            "seed {seed}: AC-only objective V_de,ac {a_ac:.6} V_de {a_full:.6} | full objective V_de,ac {d_ac:.6} V_de {d_full:.6}"
        ));
    }
    v.check(ac_better >= 6, format!("AC-only objective gives lower V_de,ac in {ac_better} of 10 seeds (majority)"));
    v.check(full_worse >= 6, format!("AC-only objective gives higher full V_de in {full_worse} of 10 seeds (majority)"));
    v
}
