//! Objective functions (generation cost, voltage deviation) and the
//! aggregate constraint-violation measure used by the optimizers.

use serde::{Deserialize, Serialize};

use crate::acdc_sequential::SystemState;
use crate::case_model::CaseData;
use crate::vsc_dc_grid::{check_pq_capability, Capability};

/// Violations at or below this are treated as satisfied.
pub const FEASIBILITY_TOL: f64 = 1e-6;
/// Flat penalty added when the power flow did not converge.
pub const NON_CONVERGENCE_SURCHARGE: f64 = 10.0;
/// Stand-in for objective values of a diverged solve, so sorting stays total.
pub const DIVERGED_OBJECTIVE: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectivePoint {
    /// Generation cost, $/h.
    pub f_cost: f64,
    /// Squared voltage deviation, p.u.².
    pub v_dev: f64,
    pub violation: f64,
    pub feasible: bool,
}

impl ObjectivePoint {
    pub fn new(f_cost: f64, v_dev: f64, violation: f64) -> Self {
        Self { f_cost, v_dev, violation, feasible: violation <= FEASIBILITY_TOL }
    }

    pub fn objectives(&self) -> [f64; 2] {
        [self.f_cost, self.v_dev]
    }
}

/// One violated constraint: `excess` is raw (limit units), `normalized` is
/// the excess divided by the constraint's range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationItem {
    pub constraint: String,
    pub entity: String,
    pub excess: f64,
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ViolationReport {
    pub total: f64,
    pub items: Vec<ViolationItem>,
}

/// Quadratic generation cost over every generator, slack included.
pub fn generation_cost(state: &SystemState, case: &CaseData) -> f64 {
    case.generators
        .iter()
        .zip(&state.ac.p_gen)
        .map(|(g, &p)| g.cost_a * p * p + g.cost_b * p + g.cost_c)
        .sum()
}

/// Sum of squared deviations from the reference voltages; DC buses are
/// included when `include_dc` is set.
pub fn voltage_deviation(state: &SystemState, case: &CaseData, include_dc: bool) -> f64 {
    let ac: f64 = case.buses.iter().zip(&state.ac.v).map(|(b, v)| (v - b.v_ref).powi(2)).sum();
    if !include_dc {
        return ac;
    }
    let dc: f64 = case.dc_buses.iter().zip(&state.dc.u_dc).map(|(b, u)| (u - b.u_ref).powi(2)).sum();
    ac + dc
}

struct Collector {
    report: ViolationReport,
}

impl Collector {
    /// Records `value` against `[lo, hi]`.
    fn bounds(&mut self, constraint: &str, entity: impl FnOnce() -> String, value: f64, lo: f64, hi: f64) {
        let excess = if !value.is_finite() {
            f64::INFINITY
        } else if value > hi {
            value - hi
        } else if value < lo {
            lo - value
        } else {
            return;
        };
        let range = hi - lo;
        self.push(constraint, entity(), excess, range);
    }

    fn push(&mut self, constraint: &str, entity: String, excess: f64, range: f64) {
        if excess <= FEASIBILITY_TOL {
            return;
        }
        let normalized = if !excess.is_finite() {
            1.0
        } else if range > 0.0 {
            excess / range
        } else {
            // fixed quantities: scale by the set value itself
            excess
        };
        self.report.total += normalized;
        self.report.items.push(ViolationItem { constraint: constraint.into(), entity, excess, normalized });
    }
}

/// Aggregate normalized violation of every operating limit, plus the
/// non-convergence surcharge.
pub fn constraint_violation(state: &SystemState, case: &CaseData) -> ViolationReport {
    let mut c = Collector { report: ViolationReport::default() };
    if !state.converged {
        c.report.total += NON_CONVERGENCE_SURCHARGE;
        c.report.items.push(ViolationItem {
            constraint: "power flow convergence".into(),
            entity: state.failure.clone().unwrap_or_else(|| "solver".into()),
            excess: 1.0,
            normalized: NON_CONVERGENCE_SURCHARGE,
        });
    }

    for (k, g) in case.generators.iter().enumerate() {
        let name = || format!("generator {} at bus {}", k + 1, g.bus);
        if let Some(&p) = state.ac.p_gen.get(k) {
            c.bounds("generator P", name, p, g.p_min, g.p_max);
        }
        if let Some(&q) = state.ac.q_gen.get(k) {
            c.bounds("generator Q", name, q, g.q_min, g.q_max);
        }
    }
    for (b, &v) in case.buses.iter().zip(&state.ac.v) {
        c.bounds("bus voltage", || format!("bus {}", b.id), v, b.v_min, b.v_max);
    }
    for (br, f) in case.branches.iter().zip(&state.ac.flows) {
        let s = f.s_from().max(f.s_to());
        let s = if f.s_from().is_finite() && f.s_to().is_finite() { s } else { f64::NAN };
        c.bounds("branch flow", || format!("branch {}-{}", br.from, br.to), s, 0.0, br.s_max);
    }
    for (k, (conv, st)) in case.converters.iter().zip(&state.converters).enumerate() {
        let name = || format!("converter {}", k + 1);
        c.bounds("converter P_s", name, st.p_s, conv.p_s_min, conv.p_s_max);
        c.bounds("converter Q_s", name, st.q_s, conv.q_s_min, conv.q_s_max);
        let ring = conv.pq_circle.r_max - conv.pq_circle.r_min;
        match check_pq_capability(st.p_s, st.q_s, &conv.pq_circle) {
            Capability::Inside => {}
            Capability::BelowMin { deficit } => c.push("converter capability", name(), deficit, ring),
            Capability::AboveMax { excess } => c.push("converter capability", name(), excess, ring),
        }
    }
    for (j, b) in case.dc_buses.iter().enumerate() {
        let name = || format!("DC bus {}", b.id);
        if let Some(&u) = state.dc.u_dc.get(j) {
            c.bounds("DC bus voltage", name, u, b.u_min, b.u_max);
        }
        if let (Some(i_max), Some(&i)) = (b.i_max, state.dc.i_inj.get(j)) {
            c.bounds("DC bus current", name, i, -i_max, i_max);
        }
    }
    for (br, &i) in case.dc_branches.iter().zip(&state.dc.i_branch) {
        c.bounds("DC branch current", || format!("DC branch {}-{}", br.from, br.to), i, -br.i_max, br.i_max);
    }
    c.report
}

/// Objectives and violation of a solved state. `include_dc` selects whether
/// DC voltages enter the deviation objective.
pub fn evaluate(state: &SystemState, case: &CaseData, include_dc: bool) -> (ObjectivePoint, ViolationReport) {
    let report = constraint_violation(state, case);
    let sane = |x: f64| if x.is_finite() { x } else { DIVERGED_OBJECTIVE };
    let point = ObjectivePoint::new(
        sane(generation_cost(state, case)),
        sane(voltage_deviation(state, case, include_dc)),
        report.total,
    );
    (point, report)
}
