//! End-to-end pipeline (optimize, cluster, rank) and the case-variant
//! studies comparing AC-only, two- and three-terminal systems.

use serde::{Deserialize, Serialize};

use crate::case_model::{shipped_case, CaseData, CaseError, ControlMode};
use crate::cmopso::{run_cmopso, ConfigError, OpfProblem, OptimizerConfig, ParetoArchive, RunStats};
use crate::decision_support::{select_compromise, DecisionError, DecisionReport, Member};

#[derive(Debug, thiserror::Error)]
pub enum StudyError {
    #[error("unknown study '{0}' (expected case14-modes or case118-terminals)")]
    UnknownStudy(String),
    #[error(transparent)]
    Case(#[from] CaseError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Decision(#[from] DecisionError),
}

pub const STUDIES: [&str; 2] = ["case14-modes", "case118-terminals"];

#[derive(Debug, Clone, PartialEq)]
pub struct StudyVariant {
    pub label: String,
    pub description: String,
    /// Converter count, 0 for the AC-only reference.
    pub terminals: usize,
    pub case: CaseData,
}

/// Makes converter `k` the DC slack and every other converter
/// power-controlled at its initial operating point.
pub fn with_dc_slack(mut case: CaseData, k: usize) -> CaseData {
    for (i, c) in case.converters.iter_mut().enumerate() {
        let init = c.init.unwrap_or_default();
        let q_s = mode_q_s(&c.mode).or(init.q_s).unwrap_or(0.0);
        c.mode = if i == k {
            ControlMode::ConstUdcConstQs { u_dc: init.u_dc.unwrap_or(1.0), q_s }
        } else {
            ControlMode::ConstPsConstQs { p_s: init.p_s.unwrap_or(0.0), q_s }
        };
    }
    case
}

/// Puts every converter under droop control with the given slope.
pub fn with_droop(mut case: CaseData, slope: f64) -> CaseData {
    for c in &mut case.converters {
        let init = c.init.unwrap_or_default();
        let q_s = mode_q_s(&c.mode).or(init.q_s).unwrap_or(0.0);
        c.mode = ControlMode::Droop { slope, u_dc: init.u_dc.unwrap_or(1.0), p_s: init.p_s.unwrap_or(0.0), q_s };
    }
    case
}

fn mode_q_s(mode: &ControlMode) -> Option<f64> {
    match *mode {
        ControlMode::ConstUdcConstQs { q_s, .. } | ControlMode::ConstPsConstQs { q_s, .. } | ControlMode::Droop { q_s, .. } => {
            Some(q_s)
        }
        _ => None,
    }
}

fn variant(label: &str, description: &str, case: CaseData) -> StudyVariant {
    StudyVariant { label: label.into(), description: description.into(), terminals: case.converters.len(), case }
}

/// Case variants of a named study; the first is always the AC-only reference.
pub fn study_variants(name: &str) -> Result<Vec<StudyVariant>, StudyError> {
    match name {
        "case14-modes" => {
            let ac = shipped_case("case14_ac")?;
            let two = shipped_case("case14_2t")?;
            let three = shipped_case("case14_3t")?;
            let swapped = {
                let slack = two.converters.iter().position(|c| c.mode.is_dc_slack()).unwrap_or(0);
                with_dc_slack(two.clone(), 1 - slack.min(1))
            };
            Ok(vec![
                variant("Case 0", "AC only", ac),
                variant("Case 1", "2-terminal, shipped control modes", two),
                variant("Case 2", "2-terminal, control modes swapped", swapped),
                variant("Case 3", "3-terminal, VSC1 holds U_dc", with_dc_slack(three.clone(), 0)),
                variant("Case 4", "3-terminal, VSC2 holds U_dc", with_dc_slack(three.clone(), 1)),
                variant("Case 5", "3-terminal, VSC3 holds U_dc", with_dc_slack(three.clone(), 2)),
                variant("Case 6", "3-terminal, all droop (slope 0.005)", with_droop(three, 0.005)),
            ])
        }
        "case118-terminals" => {
            let three = shipped_case("case118_3t")?;
            Ok(vec![
                variant("Case 0", "AC only", shipped_case("case118_ac")?),
                variant("Case 1", "2-terminal", shipped_case("case118_2t")?),
                variant("Case 2", "3-terminal", three.clone()),
                variant("Case 3", "3-terminal, all droop (slope 0.005)", with_droop(three, 0.005)),
            ])
        }
        other => Err(StudyError::UnknownStudy(other.into())),
    }
}

/// Default optimizer settings for a case: 100 iterations on large systems.
pub fn default_config(case: &CaseData, seed: u64) -> OptimizerConfig {
    let i_max = if case.buses.len() > 50 { 100 } else { 50 };
    OptimizerConfig { seed, i_max, ..OptimizerConfig::default() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineSettings {
    pub include_dc: bool,
    pub n_clusters: usize,
    pub weights: Vec<f64>,
}

impl Default for PipelineSettings {
    fn default() -> Self {
        Self { include_dc: true, n_clusters: 2, weights: vec![0.5, 0.5] }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub archive: ParetoArchive,
    pub stats: RunStats,
    pub decision: DecisionReport,
    /// Highest-priority compromise over all clusters.
    pub representative: Member,
}

/// Optimizes the case, clusters the feasible part of the archive (the whole
/// archive if nothing is feasible) and ranks each cluster.
pub fn run_pipeline(case: &CaseData, cfg: &OptimizerConfig, settings: &PipelineSettings) -> Result<PipelineResult, StudyError> {
    let problem = OpfProblem::new(case, settings.include_dc);
    let (archive, stats) = run_cmopso(&problem, cfg)?;
    let feasible = archive.feasible_objectives();
    let points = if feasible.is_empty() { archive.objectives() } else { feasible };
    let n_clusters = settings.n_clusters.min(points.len());
    let decision = select_compromise(&points, n_clusters, &settings.weights, cfg.seed)?;
    let representative = decision
        .compromises()
        .into_iter()
        .fold(None::<&Member>, |best, m| match best {
            Some(b) if b.d >= m.d => Some(b),
            _ => Some(m),
        })
        .cloned()
        .expect("at least one cluster");
    Ok(PipelineResult { archive, stats, decision, representative })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub label: String,
    pub description: String,
    pub terminals: usize,
    /// Median over seeds of the representative solution's cost.
    pub f_cost: f64,
    pub v_dev: f64,
    /// Improvement over the AC-only reference, percent.
    pub imp_f: f64,
    pub imp_v: f64,
    /// Lowest feasible archive cost seen over all seeds.
    pub best_cost: f64,
    pub per_seed: Vec<[f64; 2]>,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Runs the pipeline for every variant and seed; `configure` supplies the
/// optimizer settings per (variant, seed).
pub fn run_study(
    variants: &[StudyVariant],
    seeds: &[u64],
    settings: &PipelineSettings,
    configure: impl Fn(&StudyVariant, u64) -> OptimizerConfig,
) -> Result<Vec<StudyRow>, StudyError> {
    let mut rows: Vec<StudyRow> = Vec::with_capacity(variants.len());
    for v in variants {
        let mut per_seed = Vec::with_capacity(seeds.len());
        let mut best_cost = f64::INFINITY;
        for &seed in seeds {
            let r = run_pipeline(&v.case, &configure(v, seed), settings)?;
            per_seed.push([r.representative.f_cost, r.representative.v_dev]);
            if let Some(e) = r.archive.min_cost() {
                best_cost = best_cost.min(e.point.f_cost);
            }
        }
        let f_cost = median(&per_seed.iter().map(|p| p[0]).collect::<Vec<_>>());
        let v_dev = median(&per_seed.iter().map(|p| p[1]).collect::<Vec<_>>());
        rows.push(StudyRow {
            label: v.label.clone(),
            description: v.description.clone(),
            terminals: v.terminals,
            f_cost,
            v_dev,
            imp_f: 0.0,
            imp_v: 0.0,
            best_cost,
            per_seed,
        });
    }
    if let Some((f0, v0)) = rows.first().map(|r| (r.f_cost, r.v_dev)) {
        for r in &mut rows {
            r.imp_f = 100.0 * (f0 - r.f_cost) / f0;
            r.imp_v = 100.0 * (v0 - r.v_dev) / v0;
        }
    }
    Ok(rows)
}
