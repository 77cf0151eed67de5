//! Alternating AC/DC power flow.
//!
//! Each outer iteration solves the AC network with the converters' latest
//! AC-side injections, resolves converters and the DC grid from the fresh
//! terminal voltages, and repeats until the injections stop moving.

use num_complex::Complex64;
use serde::Serialize;

use crate::ac_power_flow::{solve_ac_pf, solve_ac_pf_from, AcError, AcInjectionOverlay, AcOptions, AcState};
use crate::case_model::{CaseData, ControlMode};
use crate::controls::ControlSettings;
use crate::vsc_dc_grid::{
    resolve_control_mode, solve_dc_grid, ActiveTarget, Ambient, ConverterState, ConverterTarget, DcIssue,
    DcOptions, DcState,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcDcOptions {
    /// Largest change of any converter AC-side injection accepted as converged.
    pub tol_couple: f64,
    pub outer_max: usize,
    pub ac: AcOptions,
    pub dc: DcOptions,
}

impl Default for AcDcOptions {
    fn default() -> Self {
        Self { tol_couple: 1e-6, outer_max: 20, ac: AcOptions::default(), dc: DcOptions::default() }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AcDcError {
    #[error("invalid AC/DC input: {0}")]
    InvalidInput(String),
}

/// Joint AC/DC operating point. `converged = false` marks a best-effort
/// iterate; `failure` then says which stage gave up.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemState {
    pub ac: AcState,
    pub dc: DcState,
    pub converters: Vec<ConverterState>,
    pub outer_iterations: usize,
    pub converged: bool,
    pub coupling_mismatch: f64,
    pub dc_issues: Vec<DcIssue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

/// Solves the case at `controls` from a flat start with default options.
pub fn solve_acdc(case: &CaseData, controls: &ControlSettings) -> Result<SystemState, AcDcError> {
    solve_acdc_with(case, controls, &AcDcOptions::default(), None)
}

/// Solves the case, optionally warm-started from a previous (converged) state
/// of the same case.
pub fn solve_acdc_with(
    case: &CaseData,
    controls: &ControlSettings,
    opts: &AcDcOptions,
    warm: Option<&SystemState>,
) -> Result<SystemState, AcDcError> {
    controls.check_shape(case).map_err(AcDcError::InvalidInput)?;
    let n = case.buses.len();
    let m = case.converters.len();
    let mut ac_bus = Vec::with_capacity(m);
    for c in &case.converters {
        ac_bus.push(
            case.bus_index(c.ac_bus)
                .ok_or_else(|| AcDcError::InvalidInput(format!("converter at unknown bus {}", c.ac_bus)))?,
        );
    }
    let warm = warm.filter(|w| w.converged && w.ac.v.len() == n && w.converters.len() == m);

    let (mut ps, mut qs) = initial_injections(case, &controls.modes);
    let mut previous_ac: Option<AcState> = None;
    let mut u_guess: Option<Vec<f64>> = None;
    if let Some(w) = warm {
        ps = w.converters.iter().map(|c| c.p_s).collect();
        qs = w.converters.iter().map(|c| c.q_s).collect();
        previous_ac = Some(w.ac.clone());
        u_guess = Some(w.dc.u_dc.clone());
    }

    let mut last: Option<(AcState, DcState, Vec<ConverterState>, Vec<DcIssue>)> = None;
    let mut mismatch = f64::INFINITY;
    for outer in 1..=opts.outer_max.max(1) {
        let mut overlay = AcInjectionOverlay::zero(n);
        for (k, mode) in controls.modes.iter().enumerate() {
            let i = ac_bus[k];
            overlay.p[i] -= ps[k];
            match mode {
                ControlMode::ConstUdcConstUs { u_s, .. } | ControlMode::ConstPsConstUs { u_s, .. } => {
                    overlay.pin[i] = Some(*u_s)
                }
                _ => overlay.q[i] -= qs[k],
            }
        }
        let solved = match &previous_ac {
            Some(prev) => solve_ac_pf_from(case, controls, &overlay, &opts.ac, prev),
            None => solve_ac_pf(case, controls, &overlay, &opts.ac, None),
        };
        let ac = match solved {
            Ok(ac) => ac,
            Err(AcError::NonConvergence { last: ac, .. }) => {
                return Ok(failed(case, *ac, last, &ps, &qs, outer, "AC power flow did not converge"));
            }
            Err(AcError::InvalidInput(msg)) => return Err(AcDcError::InvalidInput(msg)),
        };
        if m == 0 {
            return Ok(SystemState {
                ac,
                dc: DcState::empty(),
                converters: vec![],
                outer_iterations: outer,
                converged: true,
                coupling_mismatch: 0.0,
                dc_issues: vec![],
                failure: None,
            });
        }

        let terminals: Vec<Complex64> =
            ac_bus.iter().map(|&i| Complex64::from_polar(ac.v[i], ac.theta[i])).collect();
        let mut q_change: f64 = 0.0;
        for (k, mode) in controls.modes.iter().enumerate() {
            if mode.pins_ac_voltage() {
                // the converter supplies whatever reactive power holds the pin
                let i = ac_bus[k];
                let q = -(ac.q_inj[i] + case.buses[i].q_load);
                q_change = q_change.max((q - qs[k]).abs());
                qs[k] = q;
            }
        }
        let targets = targets_for(&controls.modes, &ps, &qs);
        previous_ac = Some(ac.clone());
        let dc = match solve_dc_grid(case, &targets, &terminals, u_guess.as_deref(), &opts.dc) {
            Ok(dc) => dc,
            Err(e) => {
                return Ok(failed(case, ac, last, &ps, &qs, outer, &format!("{e}")));
            }
        };
        let new_ps: Vec<f64> = dc.converters.iter().map(|c| c.p_s).collect();
        let p_change = new_ps.iter().zip(&ps).fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()));
        mismatch = p_change.max(q_change);
        ps = new_ps;
        u_guess = Some(dc.dc.u_dc.clone());
        if mismatch <= opts.tol_couple {
            return Ok(SystemState {
                ac,
                dc: dc.dc,
                converters: dc.converters,
                outer_iterations: outer,
                converged: true,
                coupling_mismatch: mismatch,
                dc_issues: dc.issues,
                failure: None,
            });
        }
        last = Some((ac, dc.dc, dc.converters, dc.issues));
    }
    let (ac, dc, converters, dc_issues) = last.expect("at least one outer iteration ran");
    Ok(SystemState {
        ac,
        dc,
        converters,
        outer_iterations: opts.outer_max,
        converged: false,
        coupling_mismatch: mismatch,
        dc_issues,
        failure: Some("AC/DC coupling did not converge".into()),
    })
}

/// Starting AC-side injections: set-points where the mode fixes them, the
/// case's `init` record otherwise; a DC slack defaults to balancing the others.
fn initial_injections(case: &CaseData, modes: &[ControlMode]) -> (Vec<f64>, Vec<f64>) {
    let mut ps = vec![0.0; modes.len()];
    let mut qs = vec![0.0; modes.len()];
    let mut fixed_sum = 0.0;
    for (k, mode) in modes.iter().enumerate() {
        let init = case.converters[k].init.unwrap_or_default();
        let amb = Ambient { u_dc: init.u_dc.unwrap_or(1.0), u_s: 1.0 };
        let r = resolve_control_mode(mode, amb);
        if let Some(p) = r.p_s {
            ps[k] = p;
            fixed_sum += p;
        }
        qs[k] = r.q_s.or(init.q_s).unwrap_or(0.0);
    }
    for (k, mode) in modes.iter().enumerate() {
        if mode.is_dc_slack() {
            ps[k] = case.converters[k].init.and_then(|i| i.p_s).unwrap_or(-fixed_sum);
        }
    }
    (ps, qs)
}

fn targets_for(modes: &[ControlMode], ps: &[f64], qs: &[f64]) -> Vec<ConverterTarget> {
    modes
        .iter()
        .enumerate()
        .map(|(k, mode)| {
            let r = resolve_control_mode(mode, Ambient { u_dc: 1.0, u_s: 1.0 });
            let active = if let Some(law) = r.droop {
                ActiveTarget::Droop(law)
            } else if let Some(u) = r.u_dc {
                ActiveTarget::DcVoltage(u)
            } else {
                ActiveTarget::Power(r.p_s.unwrap_or(ps[k]))
            };
            ConverterTarget { active, q_s: qs[k], p_s_guess: ps[k] }
        })
        .collect()
}

fn failed(
    case: &CaseData,
    ac: AcState,
    last: Option<(AcState, DcState, Vec<ConverterState>, Vec<DcIssue>)>,
    ps: &[f64],
    qs: &[f64],
    outer: usize,
    why: &str,
) -> SystemState {
    let (dc, converters, dc_issues) = match last {
        Some((_, dc, conv, issues)) => (dc, conv, issues),
        None => {
            let mut dc = DcState::empty();
            dc.bus_ids = case.dc_buses.iter().map(|b| b.id).collect();
            dc.u_dc = case.dc_buses.iter().map(|b| b.u_ref).collect();
            dc.i_inj = vec![0.0; case.dc_buses.len()];
            dc.i_branch = vec![0.0; case.dc_branches.len()];
            let conv = ps
                .iter()
                .zip(qs)
                .map(|(&p_s, &q_s)| ConverterState { p_s, q_s, ..ConverterState::default() })
                .collect();
            (dc, conv, vec![])
        }
    };
    let mut dc = dc;
    dc.converged = false;
    SystemState {
        ac,
        dc,
        converters,
        outer_iterations: outer,
        converged: false,
        coupling_mismatch: f64::INFINITY,
        dc_issues,
        failure: Some(why.to_string()),
    }
}
