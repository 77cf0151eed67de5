//! Newton-Raphson AC power flow with generator Q-limit enforcement.
//!
//! Converter terminals enter as an [`AcInjectionOverlay`]: extra bus
//! injections, or a voltage pin that turns a PQ bus into a PV-like bus.

mod newton;
mod ybus;

pub use newton::NewtonSystem;
pub use ybus::{build_ybus, SingularityWarning, YBus};

pub(crate) use newton::phasors;
pub(crate) use ybus::{branch_admittance, branch_taps};

use num_complex::Complex64;
use serde::Serialize;

use crate::case_model::{BusKind, CaseData};
use crate::controls::ControlSettings;

#[derive(Debug, thiserror::Error)]
pub enum AcError {
    #[error("invalid power-flow input: {0}")]
    InvalidInput(String),
    #[error("AC power flow did not converge after {iterations} iterations (max mismatch {max_mismatch:.3e} p.u.)")]
    NonConvergence {
        iterations: usize,
        max_mismatch: f64,
        /// Last iterate, for callers that want a best-effort state.
        last: Box<AcState>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcOptions {
    pub tol: f64,
    /// Newton iterations allowed per solve (per Q-limit round).
    pub iter_max: usize,
    pub q_limits: bool,
}

impl Default for AcOptions {
    fn default() -> Self {
        Self { tol: 1e-6, iter_max: 30, q_limits: true }
    }
}

/// Extra per-bus injections and optional voltage pins, indexed like `case.buses`.
///
/// A pinned bus has free reactive injection, so its `q` entry is ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct AcInjectionOverlay {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub pin: Vec<Option<f64>>,
}

impl AcInjectionOverlay {
    pub fn zero(n: usize) -> Self {
        Self { p: vec![0.0; n], q: vec![0.0; n], pin: vec![None; n] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchFlow {
    pub p_from: f64,
    pub q_from: f64,
    pub p_to: f64,
    pub q_to: f64,
}

impl BranchFlow {
    pub fn s_from(&self) -> f64 {
        self.p_from.hypot(self.q_from)
    }

    pub fn s_to(&self) -> f64 {
        self.p_to.hypot(self.q_to)
    }

    pub fn p_loss(&self) -> f64 {
        self.p_from + self.p_to
    }
}

/// Solved AC operating point. Per-bus vectors follow `case.buses` order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcState {
    pub bus_ids: Vec<u32>,
    pub v: Vec<f64>,
    pub theta: Vec<f64>,
    /// Net injection into the network at each bus.
    pub p_inj: Vec<f64>,
    pub q_inj: Vec<f64>,
    pub p_gen: Vec<f64>,
    pub q_gen: Vec<f64>,
    pub flows: Vec<BranchFlow>,
    pub converged: bool,
    /// Newton updates, summed over Q-limit rounds.
    pub iterations: usize,
    pub max_mismatch: f64,
    /// Buses left at a reactive limit (PV switched to PQ).
    pub q_limited: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Slack,
    Pv,
    Pq,
    Pinned,
}

/// Pre-resolved bus roles and generator set-points of one solve.
struct Setup {
    role: Vec<Role>,
    v_set: Vec<f64>,
    gens_at: Vec<Vec<usize>>,
    p_spec: Vec<f64>,
    q_base: Vec<f64>,
}

fn setup(case: &CaseData, controls: &ControlSettings, overlay: &AcInjectionOverlay) -> Result<Setup, AcError> {
    let n = case.buses.len();
    if overlay.p.len() != n || overlay.q.len() != n || overlay.pin.len() != n {
        return Err(AcError::InvalidInput(format!("overlay must have {n} entries")));
    }
    if controls.gen_p.len() != case.generators.len() || controls.gen_v.len() != case.generators.len() {
        return Err(AcError::InvalidInput("generator controls do not match the case".into()));
    }
    if controls.shunts.len() != case.shunts.len() {
        return Err(AcError::InvalidInput("shunt controls do not match the case".into()));
    }
    let mut gens_at = vec![Vec::new(); n];
    for (g, gen) in case.generators.iter().enumerate() {
        let i = case
            .bus_index(gen.bus)
            .ok_or_else(|| AcError::InvalidInput(format!("generator at unknown bus {}", gen.bus)))?;
        gens_at[i].push(g);
    }
    let mut role = Vec::with_capacity(n);
    let mut v_set = vec![1.0; n];
    let mut p_spec = vec![0.0; n];
    let mut q_base = vec![0.0; n];
    for (i, b) in case.buses.iter().enumerate() {
        let r = match (b.kind, gens_at[i].first()) {
            (BusKind::Slack, g) => {
                v_set[i] = g.map_or(b.v_ref, |&g| controls.gen_v[g]);
                Role::Slack
            }
            (BusKind::Pv, Some(&g)) => {
                v_set[i] = controls.gen_v[g];
                Role::Pv
            }
            _ => Role::Pq,
        };
        let r = match (overlay.pin[i], r) {
            (None, r) => r,
            (Some(u), Role::Pq) => {
                v_set[i] = u;
                Role::Pinned
            }
            (Some(_), _) => {
                return Err(AcError::InvalidInput(format!(
                    "voltage pin on regulated bus {}",
                    b.id
                )))
            }
        };
        role.push(r);
        let gen_p: f64 = gens_at[i].iter().map(|&g| controls.gen_p[g]).sum();
        p_spec[i] = gen_p - b.p_load + overlay.p[i];
        q_base[i] = -b.q_load + if r == Role::Pinned { 0.0 } else { overlay.q[i] };
    }
    if role.iter().filter(|&&r| r == Role::Slack).count() == 0 {
        return Err(AcError::InvalidInput("no slack bus".into()));
    }
    Ok(Setup { role, v_set, gens_at, p_spec, q_base })
}

/// Admittance matrix including switched shunt banks at their settings.
pub fn network_ybus(case: &CaseData, controls: &ControlSettings) -> Result<YBus, AcError> {
    let mut y = build_ybus(case, &controls.taps)?;
    for (s, &q) in case.shunts.iter().zip(&controls.shunts) {
        let i = case.bus_index(s.bus).ok_or_else(|| AcError::InvalidInput(format!("shunt at unknown bus {}", s.bus)))?;
        y.add(i, i, Complex64::new(0.0, q));
    }
    Ok(y)
}

/// Builds the Newton system of the given controls and overlay, with the
/// case's PV buses holding voltage (no Q-limit switching).
pub fn newton_system(
    case: &CaseData,
    controls: &ControlSettings,
    overlay: &AcInjectionOverlay,
) -> Result<NewtonSystem, AcError> {
    let s = setup(case, controls, overlay)?;
    let ybus = network_ybus(case, controls)?;
    let q_limit = vec![None; case.buses.len()];
    Ok(system_for(&s, ybus, &q_limit))
}

fn system_for(s: &Setup, ybus: YBus, q_limit: &[Option<f64>]) -> NewtonSystem {
    let n = s.role.len();
    let mut pvpq = Vec::new();
    let mut pq = Vec::new();
    let mut q_spec = s.q_base.clone();
    for i in 0..n {
        if s.role[i] != Role::Slack {
            pvpq.push(i);
        }
        let is_pq = match s.role[i] {
            Role::Pq => true,
            Role::Pv => q_limit[i].is_some(),
            _ => false,
        };
        if is_pq {
            pq.push(i);
            if let Some(q) = q_limit[i] {
                q_spec[i] += q;
            }
        }
    }
    NewtonSystem::new(ybus, s.p_spec.clone(), q_spec, pvpq, pq)
}

struct NewtonOutcome {
    converged: bool,
    iterations: usize,
    max_mismatch: f64,
}

fn newton(sys: &NewtonSystem, v: &mut [f64], theta: &mut [f64], opts: &AcOptions) -> NewtonOutcome {
    let mut x = sys.unknowns(v, theta);
    let mut linear = newton::LinearSolver::default();
    for it in 0..=opts.iter_max {
        let f = sys.mismatch(v, theta);
        let max_mismatch = f.iter().fold(0.0_f64, |m, e| if e.is_nan() { f64::INFINITY } else { m.max(e.abs()) });
        if max_mismatch <= opts.tol {
            return NewtonOutcome { converged: true, iterations: it, max_mismatch };
        }
        if it == opts.iter_max || !max_mismatch.is_finite() {
            return NewtonOutcome { converged: false, iterations: it, max_mismatch };
        }
        let jac = sys.jacobian_triplets(v, theta);
        let Some(dx) = linear.solve(sys.dim(), &jac, &f) else {
            return NewtonOutcome { converged: false, iterations: it, max_mismatch };
        };
        for (xi, d) in x.iter_mut().zip(&dx) {
            *xi += d;
        }
        sys.set_unknowns(&x, v, theta);
        if v.iter().any(|&m| !(m > 0.0 && m < 3.0)) {
            return NewtonOutcome { converged: false, iterations: it + 1, max_mismatch: f64::INFINITY };
        }
    }
    unreachable!("loop returns on its last pass")
}

/// Solves the AC network from a flat start (or from `warm` = `(v, theta)`).
///
/// Slack buses absorb the residual power; PV buses hold their set-point until
/// a generator reactive limit is hit, at which point they are switched to PQ
/// in ascending bus order (and may switch back once).
pub fn solve_ac_pf(
    case: &CaseData,
    controls: &ControlSettings,
    overlay: &AcInjectionOverlay,
    opts: &AcOptions,
    warm: Option<(&[f64], &[f64])>,
) -> Result<AcState, AcError> {
    solve(case, controls, overlay, opts, warm, None)
}

/// [`solve_ac_pf`] started from a previous solution of the same network:
/// its voltages, and its generator buses held at reactive limits start out
/// switched to PQ (they may still be released).
pub fn solve_ac_pf_from(
    case: &CaseData,
    controls: &ControlSettings,
    overlay: &AcInjectionOverlay,
    opts: &AcOptions,
    previous: &AcState,
) -> Result<AcState, AcError> {
    solve(case, controls, overlay, opts, Some((&previous.v, &previous.theta)), Some(previous))
}

fn solve(
    case: &CaseData,
    controls: &ControlSettings,
    overlay: &AcInjectionOverlay,
    opts: &AcOptions,
    warm: Option<(&[f64], &[f64])>,
    previous: Option<&AcState>,
) -> Result<AcState, AcError> {
    let s = setup(case, controls, overlay)?;
    let ybus = network_ybus(case, controls)?;
    let n = case.buses.len();
    let (mut v, mut theta) = match warm {
        Some((v0, t0)) if v0.len() == n && t0.len() == n => (v0.to_vec(), t0.to_vec()),
        _ => (vec![1.0; n], vec![0.0; n]),
    };
    let (q_lo, q_hi): (Vec<f64>, Vec<f64>) = (0..n)
        .map(|i| {
            s.gens_at[i].iter().fold((0.0, 0.0), |(lo, hi), &g| {
                (lo + case.generators[g].q_min, hi + case.generators[g].q_max)
            })
        })
        .unzip();
    let mut q_limit: Vec<Option<f64>> = vec![None; n];
    if let Some(prev) = previous.filter(|p| p.q_inj.len() == n && opts.q_limits) {
        for (i, b) in case.buses.iter().enumerate() {
            if s.role[i] == Role::Pv && prev.q_limited.contains(&b.id) {
                // the limit the previous solution sat on
                let q = prev.q_inj[i] - s.q_base[i];
                q_limit[i] = Some(if (q - q_hi[i]).abs() <= (q - q_lo[i]).abs() { q_hi[i] } else { q_lo[i] });
            }
        }
    }
    for i in 0..n {
        if s.role[i] != Role::Pq && q_limit[i].is_none() {
            v[i] = s.v_set[i];
        }
        if s.role[i] == Role::Slack {
            theta[i] = 0.0;
        }
    }
    let mut released = vec![false; n];
    let mut iterations = 0;
    let max_rounds = 2 * n + 2;
    let mut round = 0;
    // limit checks during the switching rounds only need approximate
    // reactive outputs; the final round is always solved to `opts.tol`
    let mut round_opts = AcOptions { tol: if opts.q_limits { opts.tol.max(1e-3) } else { opts.tol }, ..*opts };
    loop {
        let sys = system_for(&s, ybus.clone(), &q_limit);
        let out = newton(&sys, &mut v, &mut theta, &round_opts);
        iterations += out.iterations;
        let state = finish(case, controls, overlay, &s, &sys, &v, &theta, &q_limit, out.converged, iterations, out.max_mismatch);
        if !out.converged {
            return Err(AcError::NonConvergence {
                iterations,
                max_mismatch: out.max_mismatch,
                last: Box::new(state),
            });
        }
        round += 1;
        if !opts.q_limits || (round > max_rounds && round_opts.tol <= opts.tol) {
            return Ok(state);
        }
        if round > max_rounds {
            round_opts.tol = opts.tol;
            continue;
        }
        let mut changed = false;
        for i in 0..n {
            if s.role[i] != Role::Pv {
                continue;
            }
            match q_limit[i] {
                None => {
                    let q = state.q_inj[i] - s.q_base[i];
                    let tol = opts.tol;
                    if q > q_hi[i] + tol {
                        q_limit[i] = Some(q_hi[i]);
                        changed = true;
                    } else if q < q_lo[i] - tol {
                        q_limit[i] = Some(q_lo[i]);
                        changed = true;
                    }
                }
                Some(limit) if !released[i] => {
                    // back to PV when the voltage drifts to the side the limit cannot support
                    let at_max = limit == q_hi[i];
                    let back = if at_max { v[i] > s.v_set[i] } else { v[i] < s.v_set[i] };
                    if back {
                        q_limit[i] = None;
                        released[i] = true;
                        v[i] = s.v_set[i];
                        changed = true;
                    }
                }
                Some(_) => {}
            }
        }
        if !changed {
            if round_opts.tol <= opts.tol {
                return Ok(state);
            }
            round_opts.tol = opts.tol;
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    case: &CaseData,
    controls: &ControlSettings,
    overlay: &AcInjectionOverlay,
    s: &Setup,
    sys: &NewtonSystem,
    v: &[f64],
    theta: &[f64],
    q_limit: &[Option<f64>],
    converged: bool,
    iterations: usize,
    max_mismatch: f64,
) -> AcState {
    let n = case.buses.len();
    let inj = sys.injections(v, theta);
    let p_inj: Vec<f64> = inj.iter().map(|c| c.re).collect();
    let q_inj: Vec<f64> = inj.iter().map(|c| c.im).collect();

    let mut p_gen = controls.gen_p.clone();
    let mut q_gen = vec![0.0; case.generators.len()];
    for i in 0..n {
        let gens = &s.gens_at[i];
        if gens.is_empty() {
            continue;
        }
        let b = &case.buses[i];
        if s.role[i] == Role::Slack {
            let total = p_inj[i] + b.p_load - overlay.p[i];
            let others: f64 = gens[1..].iter().map(|&g| controls.gen_p[g]).sum();
            p_gen[gens[0]] = total - others;
        }
        let q_total = match (s.role[i], q_limit[i]) {
            (_, Some(q)) => q,
            (Role::Slack | Role::Pv, None) => q_inj[i] - s.q_base[i],
            _ => continue,
        };
        let lo: f64 = gens.iter().map(|&g| case.generators[g].q_min).sum();
        let range: f64 = gens.iter().map(|&g| case.generators[g].q_max - case.generators[g].q_min).sum();
        for &g in gens {
            let gen = &case.generators[g];
            q_gen[g] = if range > 0.0 {
                gen.q_min + (q_total - lo) * (gen.q_max - gen.q_min) / range
            } else {
                q_total / gens.len() as f64
            };
        }
    }

    let u = phasors(v, theta);
    let ratios = branch_taps(case, &controls.taps).unwrap_or_else(|_| vec![1.0; case.branches.len()]);
    let flows = case
        .branches
        .iter()
        .zip(&ratios)
        .map(|(br, &tap)| {
            let f = case.bus_index(br.from).unwrap();
            let t = case.bus_index(br.to).unwrap();
            let a = branch_admittance(br.r, br.x, br.b_charging, tap);
            let sf = u[f] * (a.yff * u[f] + a.yft * u[t]).conj();
            let st = u[t] * (a.ytf * u[f] + a.ytt * u[t]).conj();
            BranchFlow { p_from: sf.re, q_from: sf.im, p_to: st.re, q_to: st.im }
        })
        .collect();

    AcState {
        bus_ids: case.buses.iter().map(|b| b.id).collect(),
        v: v.to_vec(),
        theta: theta.to_vec(),
        p_inj,
        q_inj,
        p_gen,
        q_gen,
        flows,
        converged,
        iterations,
        max_mismatch,
        q_limited: (0..n).filter(|&i| q_limit[i].is_some()).map(|i| case.buses[i].id).collect(),
    }
}
