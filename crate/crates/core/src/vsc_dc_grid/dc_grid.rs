//! Resistive DC network solve with converter power balance.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::{ConverterState, DcError, DroopLaw};
use crate::case_model::CaseData;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcOptions {
    pub tol: f64,
    pub iter_max: usize,
}

impl Default for DcOptions {
    fn default() -> Self {
        Self { tol: 1e-8, iter_max: 30 }
    }
}

/// What a converter holds on its active-power side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ActiveTarget {
    Power(f64),
    DcVoltage(f64),
    Droop(DroopLaw),
}

/// Resolved per-converter set-point for the DC solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConverterTarget {
    pub active: ActiveTarget,
    pub q_s: f64,
    /// Starting guess for `p_s` where it is an unknown (DC slack).
    pub p_s_guess: f64,
}

/// Solved DC network, per-bus vectors in `case.dc_buses` order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DcState {
    pub bus_ids: Vec<u32>,
    pub u_dc: Vec<f64>,
    /// Current injected into the network at each bus.
    pub i_inj: Vec<f64>,
    /// Current from `from` to `to` on each branch.
    pub i_branch: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

impl DcState {
    pub fn empty() -> Self {
        Self { bus_ids: vec![], u_dc: vec![], i_inj: vec![], i_branch: vec![], converged: true, iterations: 0 }
    }

    /// Total resistive loss of the DC branches.
    pub fn line_losses(&self, case: &CaseData) -> f64 {
        self.i_branch.iter().zip(&case.dc_branches).map(|(i, br)| i * i * br.r).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DcIssue {
    /// A power-controlled converter drives its DC bus outside the voltage bounds.
    InfeasibleSetpoint { converter: usize, u_dc: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DcSolution {
    pub dc: DcState,
    pub converters: Vec<ConverterState>,
    pub issues: Vec<DcIssue>,
}

/// Nodal conductance matrix of the DC network.
pub fn dc_conductance(case: &CaseData) -> Result<DMatrix<f64>, DcError> {
    let n = case.dc_buses.len();
    let mut g = DMatrix::zeros(n, n);
    for br in &case.dc_branches {
        let f = dc_index(case, br.from)?;
        let t = dc_index(case, br.to)?;
        let y = 1.0 / br.r;
        g[(f, f)] += y;
        g[(t, t)] += y;
        g[(f, t)] -= y;
        g[(t, f)] -= y;
    }
    Ok(g)
}

fn dc_index(case: &CaseData, id: u32) -> Result<usize, DcError> {
    case.dc_bus_index(id).ok_or_else(|| DcError::InvalidInput(format!("unknown DC bus {id}")))
}

/// Converter DC injection as a function of its bus voltage.
enum Injection {
    Fixed(f64),
    Droop { law: DroopLaw, q_s: f64 },
}

/// Solves the DC grid for the given converter targets and AC terminal phasors
/// (one per converter, `case.converters` order).
///
/// Power-controlled converters inject a fixed DC power after losses; the DC
/// voltage of every free bus then follows from Newton iteration on
/// `u_i * sum_j G_ij u_j = p_dc_i(u_i)`; DC-slack converters take up the
/// balance and their AC-side `p_s` is recovered by a scalar solve.
pub fn solve_dc_grid(
    case: &CaseData,
    targets: &[ConverterTarget],
    terminals: &[Complex64],
    u_guess: Option<&[f64]>,
    opts: &DcOptions,
) -> Result<DcSolution, DcError> {
    let n = case.dc_buses.len();
    let m = case.converters.len();
    if targets.len() != m || terminals.len() != m {
        return Err(DcError::InvalidInput(format!("expected {m} converter targets and terminals")));
    }
    if m == 0 {
        return Ok(DcSolution { dc: DcState::empty(), converters: vec![], issues: vec![] });
    }
    let g = dc_conductance(case)?;
    let mut conv_at = vec![None; n];
    for (k, c) in case.converters.iter().enumerate() {
        let j = dc_index(case, c.dc_bus)?;
        if conv_at[j].replace(k).is_some() {
            return Err(DcError::InvalidInput(format!("several converters on DC bus {}", c.dc_bus)));
        }
    }

    let mut u = match u_guess {
        Some(u0) if u0.len() == n && u0.iter().all(|&x| x > 0.0) => u0.to_vec(),
        _ => (0..n)
            .map(|j| {
                conv_at[j]
                    .and_then(|k: usize| case.converters[k].init.and_then(|i| i.u_dc))
                    .unwrap_or(case.dc_buses[j].u_ref)
            })
            .collect(),
    };
    let mut fixed = vec![false; n];
    let mut inj: Vec<Option<Injection>> = (0..n).map(|_| None).collect();
    let mut states: Vec<Option<ConverterState>> = vec![None; m];
    for j in 0..n {
        let Some(k) = conv_at[j] else {
            inj[j] = Some(Injection::Fixed(0.0));
            continue;
        };
        let t = &targets[k];
        match t.active {
            ActiveTarget::Power(p_s) => {
                let st = ConverterState::from_ac_side(&case.converters[k], terminals[k], p_s, t.q_s)?;
                inj[j] = Some(Injection::Fixed(st.p_dc));
                states[k] = Some(st);
            }
            ActiveTarget::DcVoltage(u_set) => {
                u[j] = u_set;
                fixed[j] = true;
            }
            ActiveTarget::Droop(law) => inj[j] = Some(Injection::Droop { law, q_s: t.q_s }),
        }
    }
    if !fixed.iter().any(|&f| f) && !inj.iter().any(|i| matches!(i, Some(Injection::Droop { .. }))) {
        return Err(DcError::InvalidInput("DC grid has neither a voltage-holding nor a droop converter".into()));
    }

    let free: Vec<usize> = (0..n).filter(|&j| !fixed[j]).collect();
    let p_dc_at = |j: usize, uj: f64| -> Result<f64, DcError> {
        match inj[j].as_ref().unwrap() {
            Injection::Fixed(p) => Ok(*p),
            Injection::Droop { law, q_s } => {
                let k = conv_at[j].unwrap();
                Ok(ConverterState::from_ac_side(&case.converters[k], terminals[k], law.p_s_at(uj), *q_s)?.p_dc)
            }
        }
    };

    let mut iterations = 0;
    let mut converged = free.is_empty();
    let mut max_mismatch = 0.0;
    while !converged {
        let gu = &g * DVector::from_column_slice(&u);
        let mut f = DVector::zeros(free.len());
        for (a, &j) in free.iter().enumerate() {
            f[a] = u[j] * gu[j] - p_dc_at(j, u[j])?;
        }
        max_mismatch = f.amax();
        if !max_mismatch.is_finite() {
            break;
        }
        if max_mismatch <= opts.tol {
            converged = true;
            break;
        }
        if iterations == opts.iter_max {
            break;
        }
        let mut jac = DMatrix::zeros(free.len(), free.len());
        for (a, &j) in free.iter().enumerate() {
            for (b, &k) in free.iter().enumerate() {
                jac[(a, b)] = u[j] * g[(j, k)];
            }
            jac[(a, a)] += gu[j];
            if let Some(Injection::Droop { .. }) = inj[j] {
                let h = 1e-6;
                let d = (p_dc_at(j, u[j] + h)? - p_dc_at(j, u[j] - h)?) / (2.0 * h);
                jac[(a, a)] -= d;
            }
        }
        let Some(dx) = jac.lu().solve(&f) else { break };
        for (a, &j) in free.iter().enumerate() {
            u[j] -= dx[a];
        }
        iterations += 1;
        if u.iter().any(|&x| !(x > 0.0)) {
            break;
        }
    }
    if !converged {
        return Err(DcError::NonConvergence { iterations, max_mismatch });
    }

    let i_inj: Vec<f64> = (&g * DVector::from_column_slice(&u)).iter().copied().collect();
    let mut i_branch = Vec::with_capacity(case.dc_branches.len());
    for br in &case.dc_branches {
        let (f, t) = (dc_index(case, br.from)?, dc_index(case, br.to)?);
        i_branch.push((u[f] - u[t]) / br.r);
    }

    let mut issues = Vec::new();
    for j in 0..n {
        let Some(k) = conv_at[j] else { continue };
        let t = &targets[k];
        let mut st = match (t.active, states[k].take()) {
            (ActiveTarget::Power(_), Some(st)) => st,
            (ActiveTarget::Droop(law), _) => {
                ConverterState::from_ac_side(&case.converters[k], terminals[k], law.p_s_at(u[j]), t.q_s)?
            }
            _ => slack_state(case, k, terminals[k], t, u[j] * i_inj[j])?,
        };
        st.u_dc = u[j];
        st.i_dc = st.p_dc / u[j];
        let bus = &case.dc_buses[j];
        if !matches!(t.active, ActiveTarget::DcVoltage(_)) && (u[j] < bus.u_min || u[j] > bus.u_max) {
            issues.push(DcIssue::InfeasibleSetpoint { converter: k, u_dc: u[j] });
        }
        states[k] = Some(st);
    }

    Ok(DcSolution {
        dc: DcState {
            bus_ids: case.dc_buses.iter().map(|b| b.id).collect(),
            u_dc: u,
            i_inj,
            i_branch,
            converged: true,
            iterations,
        },
        converters: states.into_iter().map(|s| s.expect("every converter resolved")).collect(),
        issues,
    })
}

/// AC-side `p_s` of a DC-slack converter whose DC injection is `p_dc`.
fn slack_state(
    case: &CaseData,
    k: usize,
    terminal: Complex64,
    t: &ConverterTarget,
    p_dc: f64,
) -> Result<ConverterState, DcError> {
    let conv = &case.converters[k];
    let eval = |p_s: f64| ConverterState::from_ac_side(conv, terminal, p_s, t.q_s);
    let mut p_s = t.p_s_guess;
    let h = 1e-7;
    for _ in 0..50 {
        let st = eval(p_s)?;
        let r = st.p_dc - p_dc;
        if r.abs() <= 1e-13 {
            return Ok(st);
        }
        let d = (eval(p_s + h)?.p_dc - eval(p_s - h)?.p_dc) / (2.0 * h);
        if !(d.abs() > 1e-12) || !d.is_finite() {
            break;
        }
        p_s -= r / d;
        if !p_s.is_finite() {
            break;
        }
    }
    let st = eval(p_s)?;
    if (st.p_dc - p_dc).abs() <= 1e-10 {
        Ok(st)
    } else {
        Err(DcError::NonConvergence { iterations: 50, max_mismatch: (st.p_dc - p_dc).abs() })
    }
}
