//! Subcommand implementations.

use std::path::Path;

use acdc_mopf::objectives_constraints::FEASIBILITY_TOL;
use acdc_mopf::study::{default_config, run_study, study_variants, PipelineSettings, StudyRow};
use acdc_mopf::{
    evaluate, run_cmopso, run_nsga2, select_compromise, solve_acdc, validate_case, CaseData, ControlSettings,
    DecisionSpace, OpfProblem, OptimizerConfig, ParetoArchive,
};
use anyhow::{anyhow, Context};
use serde::Serialize;

use crate::files::{self, ParetoRow, COST_COLUMN, DEV_COLUMN};
use crate::{Algorithm, CliError};

type Outcome = Result<(), CliError>;

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// Loads a case and rejects it when any model invariant is broken.
fn checked_case(arg: &str) -> Result<CaseData, CliError> {
    let case = files::resolve_case(arg)?;
    let violations = validate_case(&case);
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(|v| format!("  {v}")).collect();
        return Err(usage(format!("case '{}' is invalid:\n{}", case.name, list.join("\n"))));
    }
    Ok(case)
}

pub fn pf(case_arg: &str, overrides: &[String], out: &Path) -> Outcome {
    let case = checked_case(case_arg)?;
    let mut controls = ControlSettings::from_case(&case);
    for item in overrides {
        let (key, value) = item.split_once('=').ok_or_else(|| usage(format!("--set {item}: expected NAME=VALUE")))?;
        let value: f64 = value.trim().parse().map_err(|_| usage(format!("--set {item}: bad number")))?;
        controls.apply_override(&case, key.trim(), value).map_err(usage)?;
    }
    let state = solve_acdc(&case, &controls).map_err(usage)?;
    files::ensure_dir(out)?;
    files::write_json(&out.join("state.json"), &state)?;

    let (point, report) = evaluate(&state, &case, true);
    println!("case            {}", case.name);
    println!("converged       {}", state.converged);
    println!("outer iter.     {}", state.outer_iterations);
    println!("AC iterations   {}", state.ac.iterations);
    println!("F [$/h]         {:.4}", point.f_cost);
    println!("V_de [p.u.^2]   {:.6}", point.v_dev);
    println!("violation       {:.6}", report.total);
    let mut worst = report.items.clone();
    worst.sort_by(|a, b| b.normalized.total_cmp(&a.normalized));
    for item in worst.iter().take(5) {
        println!("  {:<22} {:<16} excess {:.5}  normalized {:.5}", item.constraint, item.entity, item.excess, item.normalized);
    }
    if worst.len() > 5 {
        println!("  ... {} more", worst.len() - 5);
    }
    if state.converged {
        Ok(())
    } else {
        let why = state.failure.as_deref().unwrap_or("coupling loop did not settle");
        Err(CliError::NonConvergence(format!("non-convergence: {why}")))
    }
}

pub struct OptimizeArgs {
    pub algo: Algorithm,
    pub pop: usize,
    pub iters: Option<usize>,
    pub subswarms: usize,
    pub exchange: usize,
    pub archive: usize,
    pub seed: u64,
    pub include_dc: bool,
}

#[derive(Serialize)]
struct ParetoJsonEntry<'a> {
    controls: Vec<(&'a str, f64)>,
    f_cost: f64,
    v_dev: f64,
    violation: f64,
    feasible: bool,
}

pub fn optimize(case_arg: &str, args: &OptimizeArgs, out: &Path) -> Outcome {
    let case = checked_case(case_arg)?;
    if args.subswarms == 0 || args.pop % args.subswarms != 0 {
        return Err(usage(format!("pop not divisible by subswarms (pop {}, subswarms {})", args.pop, args.subswarms)));
    }
    let cfg = OptimizerConfig {
        s_pop: args.pop,
        s_sub: args.pop / args.subswarms,
        i_max: args.iters.unwrap_or_else(|| default_config(&case, args.seed).i_max),
        i_t: args.exchange,
        seed: args.seed,
        archive_capacity: args.archive,
        ..OptimizerConfig::default()
    };
    cfg.validate().map_err(usage)?;
    let problem = OpfProblem::new(&case, args.include_dc);
    let (mut archive, stats) = match args.algo {
        Algorithm::Cmopso => run_cmopso(&problem, &cfg),
        Algorithm::Nsga2 => run_nsga2(&problem, &cfg),
    }
    .map_err(usage)?;
    archive.sort_by_cost();

    files::ensure_dir(out)?;
    let space = &problem.space;
    let names = space.names();
    let rows: Vec<ParetoRow> =
        archive.entries.iter().map(|e| ParetoRow { controls: space.physical(&e.x), point: e.point }).collect();
    files::write_pareto_csv(&out.join("pareto.csv"), &names, &rows)?;
    let json: Vec<ParetoJsonEntry> = rows
        .iter()
        .map(|r| ParetoJsonEntry {
            controls: names.iter().copied().zip(r.controls.iter().copied()).collect(),
            f_cost: r.point.f_cost,
            v_dev: r.point.v_dev,
            violation: r.point.violation,
            feasible: r.point.feasible,
        })
        .collect();
    files::write_json(&out.join("pareto.json"), &json)?;
    files::write_json(&out.join("stats.json"), &stats)?;
    files::write_dat(
        &out.join("front.dat"),
        &[COST_COLUMN, DEV_COLUMN],
        archive.entries.iter().map(|e| vec![e.point.f_cost.to_string(), e.point.v_dev.to_string()]),
    )?;
    print_archive_summary(&archive, &stats.algorithm, stats.evaluations, stats.wall_time_s);
    Ok(())
}

fn print_archive_summary(archive: &ParetoArchive, algorithm: &str, evaluations: usize, wall: f64) {
    let feasible = archive.entries.iter().filter(|e| e.point.feasible).count();
    println!("algorithm       {algorithm}");
    println!("evaluations     {evaluations}");
    println!("wall time [s]   {wall:.2}");
    println!("archive         {} solutions ({feasible} feasible)", archive.len());
    if let Some(first) = archive.entries.first() {
        let last = archive.entries.last().unwrap_or(first);
        println!("cost range      {:.4} .. {:.4} $/h", first.point.f_cost, last.point.f_cost);
        println!("deviation range {:.6} .. {:.6} p.u.^2", last.point.v_dev, first.point.v_dev);
    }
}

pub fn decide(pareto: &Path, clusters: usize, weights: &[f64], seed: u64, out: &Path) -> Outcome {
    let rows = files::read_pareto_csv(pareto)?;
    if rows.len() < 2 {
        return Err(usage(format!("{}: need at least 2 solutions, found {}", pareto.display(), rows.len())));
    }
    if clusters == 0 {
        return Err(usage("--clusters must be at least 1"));
    }
    // rank the feasible part of the front when there is one
    let feasible: Vec<[f64; 2]> = rows.iter().filter(|r| r[2] <= FEASIBILITY_TOL).map(|r| [r[0], r[1]]).collect();
    let points = if feasible.is_empty() { rows.iter().map(|r| [r[0], r[1]]).collect() } else { feasible };
    let report = select_compromise(&points, clusters.min(points.len()), weights, seed).map_err(usage)?;

    files::ensure_dir(out)?;
    files::write_json(&out.join("decision.json"), &report)?;
    let path = out.join("compromise.csv");
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("cannot write {}", path.display()))?;
    w.write_record(["cluster", COST_COLUMN, DEV_COLUMN, "priority_d"]).map_err(|e| anyhow!(e))?;
    for c in &report.clusters {
        let m = c.members.iter().find(|m| m.index == c.compromise).expect("compromise is a member");
        w.write_record([c.label.clone(), m.f_cost.to_string(), m.v_dev.to_string(), m.d.to_string()])
            .map_err(|e| anyhow!(e))?;
    }
    w.flush().map_err(|e| anyhow!(e))?;
    let mut labelled: Vec<(usize, Vec<String>)> = report
        .clusters
        .iter()
        .flat_map(|c| {
            c.members.iter().map(move |m| {
                (m.index, vec![m.f_cost.to_string(), m.v_dev.to_string(), c.label.clone(), m.d.to_string()])
            })
        })
        .collect();
    labelled.sort_by_key(|(i, _)| *i);
    files::write_dat(
        &out.join("front_clustered.dat"),
        &[COST_COLUMN, DEV_COLUMN, "cluster", "priority_d"],
        labelled.into_iter().map(|(_, r)| r),
    )?;

    println!("{:<24} {:>14} {:>12} {:>8}", "cluster", "F [$/h]", "V_de", "d");
    for c in &report.clusters {
        let m = c.members.iter().find(|m| m.index == c.compromise).expect("compromise is a member");
        println!("{:<24} {:>14.4} {:>12.6} {:>8.4}", c.label, m.f_cost, m.v_dev, m.d);
    }
    Ok(())
}

pub fn study(name: &str, seeds: u64, iters: Option<usize>, out: Option<&Path>) -> Outcome {
    let variants = study_variants(name).map_err(usage)?;
    if seeds == 0 {
        return Err(usage("--seeds must be at least 1"));
    }
    let seed_list: Vec<u64> = (0..seeds).map(|k| 42 + k).collect();
    let rows = run_study(&variants, &seed_list, &PipelineSettings::default(), |v, seed| {
        let mut cfg = default_config(&v.case, seed);
        if let Some(i) = iters {
            cfg.i_max = i;
        }
        cfg
    })
    .map_err(usage)?;
    print_study(&rows);
    if let Some(dir) = out {
        files::ensure_dir(dir)?;
        files::write_json(&dir.join("study.json"), &rows)?;
    }
    Ok(())
}

fn print_study(rows: &[StudyRow]) {
    println!("{:<8} {:<44} {:>12} {:>10} {:>8} {:>8}", "case", "description", "F [$/h]", "V_de", "IMP_F%", "IMP_V%");
    for r in rows {
        println!(
            "{:<8} {:<44} {:>12.2} {:>10.6} {:>8.3} {:>8.3}",
            r.label, r.description, r.f_cost, r.v_dev, r.imp_f, r.imp_v
        );
    }
}

pub fn validate(case_arg: &str) -> Outcome {
    let case = files::resolve_case(case_arg)?;
    let violations = validate_case(&case);
    if violations.is_empty() {
        let space = DecisionSpace::for_case(&case);
        println!(
            "{}: valid ({} AC buses, {} DC buses, {} converters, {} decision variables)",
            case.name,
            case.buses.len(),
            case.dc_buses.len(),
            case.converters.len(),
            space.len()
        );
        return Ok(());
    }
    for v in &violations {
        println!("{v}");
    }
    Err(usage(format!("{}: {} violation(s)", case.name, violations.len())))
}
