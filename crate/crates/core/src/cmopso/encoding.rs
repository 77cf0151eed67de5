//! Mixed real/integer decision vector and its mapping to control settings.

use serde::{Deserialize, Serialize};

use crate::case_model::{BusKind, CaseData, ControlMode};
use crate::controls::ControlSettings;

/// Which physical control a decision slot drives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Slot {
    GenP { gen: usize },
    GenV { gen: usize },
    ConvPs { conv: usize },
    ConvQs { conv: usize },
    ConvUs { conv: usize },
    ConvUdc { conv: usize },
    /// Index into the branch's tap grid; `tap` counts tapped branches.
    Tap { tap: usize, branch: usize },
    Shunt { shunt: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarKind {
    Continuous,
    /// Grid position stored relaxed; decoded as `origin + round(x)·step`.
    Integer { origin: f64, step: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lo: f64,
    pub hi: f64,
    pub slot: Slot,
}

impl Variable {
    fn continuous(name: String, lo: f64, hi: f64, slot: Slot) -> Self {
        Self { name, kind: VarKind::Continuous, lo, hi, slot }
    }

    pub fn range(&self) -> f64 {
        self.hi - self.lo
    }

    /// Physical value of relaxed storage `x` (rounded and clamped for grid slots).
    pub fn physical(&self, x: f64) -> f64 {
        match self.kind {
            VarKind::Continuous => x.clamp(self.lo, self.hi),
            VarKind::Integer { origin, step } => origin + x.round().clamp(self.lo, self.hi) * step,
        }
    }

    /// Relaxed storage for physical value `v` (nearest grid point for grid slots).
    pub fn storage(&self, v: f64) -> f64 {
        match self.kind {
            VarKind::Continuous => v.clamp(self.lo, self.hi),
            VarKind::Integer { origin, step } => ((v - origin) / step).round().clamp(self.lo, self.hi),
        }
    }
}

/// Ordered decision variables of a case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionSpace {
    pub vars: Vec<Variable>,
}

impl DecisionSpace {
    /// Controls of `case` under its own converter modes: non-slack dispatchable
    /// generator outputs, every generator voltage, each converter's free
    /// set-points, tap positions and shunt positions.
    pub fn for_case(case: &CaseData) -> Self {
        let mut vars = Vec::new();
        let slack_gen = slack_generator(case);
        for (k, g) in case.generators.iter().enumerate() {
            if Some(k) != slack_gen && g.is_dispatchable() {
                vars.push(Variable::continuous(format!("pg.{}", g.bus), g.p_min, g.p_max, Slot::GenP { gen: k }));
            }
        }
        for (k, g) in case.generators.iter().enumerate() {
            let bus = case.bus_index(g.bus).map(|i| &case.buses[i]);
            let (lo, hi) = bus.map(|b| (b.v_min, b.v_max)).unwrap_or((0.94, 1.06));
            vars.push(Variable::continuous(format!("vg.{}", g.bus), lo, hi, Slot::GenV { gen: k }));
        }
        for (k, c) in case.converters.iter().enumerate() {
            let name = |q: &str| format!("vsc{}.{q}", k + 1);
            let (u_lo, u_hi) = case.dc_bus_index(c.dc_bus).map(|j| &case.dc_buses[j]).map_or((0.94, 1.06), |b| (b.u_min, b.u_max));
            let (s_lo, s_hi) = case.bus_index(c.ac_bus).map(|i| &case.buses[i]).map_or((0.94, 1.06), |b| (b.v_min, b.v_max));
            let ps = Variable::continuous(name("p_s"), c.p_s_min, c.p_s_max, Slot::ConvPs { conv: k });
            let qs = Variable::continuous(name("q_s"), c.q_s_min, c.q_s_max, Slot::ConvQs { conv: k });
            let us = Variable::continuous(name("u_s"), s_lo, s_hi, Slot::ConvUs { conv: k });
            let udc = Variable::continuous(name("u_dc"), u_lo, u_hi, Slot::ConvUdc { conv: k });
            match c.mode {
                ControlMode::ConstUdcConstQs { .. } => vars.extend([udc, qs]),
                ControlMode::ConstUdcConstUs { .. } => vars.extend([udc, us]),
                ControlMode::ConstPsConstQs { .. } => vars.extend([ps, qs]),
                ControlMode::ConstPsConstUs { .. } => vars.extend([ps, us]),
                ControlMode::Droop { .. } => vars.extend([ps, qs, udc]),
            }
        }
        for (t, &b) in case.tapped_branches().iter().enumerate() {
            let br = &case.branches[b];
            let tap = br.tap.as_ref().expect("tapped branch");
            vars.push(Variable {
                name: format!("tap.{}-{}", br.from, br.to),
                kind: VarKind::Integer { origin: tap.ratio_min, step: tap.step },
                lo: 0.0,
                hi: tap.steps() as f64,
                slot: Slot::Tap { tap: t, branch: b },
            });
        }
        for (k, s) in case.shunts.iter().enumerate() {
            vars.push(Variable {
                name: format!("qc.{}", s.bus),
                kind: VarKind::Integer { origin: s.q_min, step: s.step },
                lo: 0.0,
                hi: s.steps() as f64,
                slot: Slot::Shunt { shunt: k },
            });
        }
        Self { vars }
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn names(&self) -> Vec<&str> {
        self.vars.iter().map(|v| v.name.as_str()).collect()
    }

    pub fn bounds(&self) -> Vec<(f64, f64)> {
        self.vars.iter().map(|v| (v.lo, v.hi)).collect()
    }

    /// Physical value of every slot.
    pub fn physical(&self, x: &[f64]) -> Vec<f64> {
        self.vars.iter().zip(x).map(|(v, &xi)| v.physical(xi)).collect()
    }

    /// Control settings for `x`, starting from the case-file operating point.
    pub fn decode(&self, x: &[f64], case: &CaseData) -> ControlSettings {
        let mut c = ControlSettings::from_case(case);
        for (var, &xi) in self.vars.iter().zip(x) {
            let v = var.physical(xi);
            match var.slot {
                Slot::GenP { gen } => c.gen_p[gen] = v,
                Slot::GenV { gen } => c.gen_v[gen] = v,
                Slot::Tap { tap, .. } => c.taps[tap] = v,
                Slot::Shunt { shunt } => c.shunts[shunt] = v,
                Slot::ConvPs { conv } => {
                    set_mode(&mut c.modes[conv], Field::Ps, v);
                }
                Slot::ConvQs { conv } => {
                    set_mode(&mut c.modes[conv], Field::Qs, v);
                }
                Slot::ConvUs { conv } => {
                    set_mode(&mut c.modes[conv], Field::Us, v);
                }
                Slot::ConvUdc { conv } => {
                    set_mode(&mut c.modes[conv], Field::Udc, v);
                }
            }
        }
        c
    }

    /// Relaxed storage reproducing `controls` as closely as the grids allow.
    pub fn encode(&self, controls: &ControlSettings) -> Vec<f64> {
        self.vars
            .iter()
            .map(|var| {
                let v = match var.slot {
                    Slot::GenP { gen } => controls.gen_p[gen],
                    Slot::GenV { gen } => controls.gen_v[gen],
                    Slot::Tap { tap, .. } => controls.taps[tap],
                    Slot::Shunt { shunt } => controls.shunts[shunt],
                    Slot::ConvPs { conv } => get_mode(&controls.modes[conv], Field::Ps),
                    Slot::ConvQs { conv } => get_mode(&controls.modes[conv], Field::Qs),
                    Slot::ConvUs { conv } => get_mode(&controls.modes[conv], Field::Us),
                    Slot::ConvUdc { conv } => get_mode(&controls.modes[conv], Field::Udc),
                };
                var.storage(v)
            })
            .collect()
    }
}

/// The generator that balances the AC system (first unit on the slack bus).
pub fn slack_generator(case: &CaseData) -> Option<usize> {
    let slack = case.buses.iter().find(|b| b.kind == BusKind::Slack)?.id;
    case.generators.iter().position(|g| g.bus == slack)
}

#[derive(Clone, Copy)]
pub(crate) enum Field {
    Ps,
    Qs,
    Us,
    Udc,
}

/// Sets `field` of `mode`; `false` if the mode has no such set-point.
pub(crate) fn set_mode(mode: &mut ControlMode, field: Field, v: f64) -> bool {
    match (mode, field) {
        (ControlMode::ConstUdcConstQs { u_dc, .. }, Field::Udc)
        | (ControlMode::ConstUdcConstUs { u_dc, .. }, Field::Udc)
        | (ControlMode::Droop { u_dc, .. }, Field::Udc) => *u_dc = v,
        (ControlMode::ConstUdcConstQs { q_s, .. }, Field::Qs)
        | (ControlMode::ConstPsConstQs { q_s, .. }, Field::Qs)
        | (ControlMode::Droop { q_s, .. }, Field::Qs) => *q_s = v,
        (ControlMode::ConstPsConstQs { p_s, .. }, Field::Ps)
        | (ControlMode::ConstPsConstUs { p_s, .. }, Field::Ps)
        | (ControlMode::Droop { p_s, .. }, Field::Ps) => *p_s = v,
        (ControlMode::ConstUdcConstUs { u_s, .. }, Field::Us) | (ControlMode::ConstPsConstUs { u_s, .. }, Field::Us) => {
            *u_s = v
        }
        _ => return false,
    }
    true
}

fn get_mode(mode: &ControlMode, field: Field) -> f64 {
    match (*mode, field) {
        (ControlMode::ConstUdcConstQs { u_dc, .. }, Field::Udc)
        | (ControlMode::ConstUdcConstUs { u_dc, .. }, Field::Udc)
        | (ControlMode::Droop { u_dc, .. }, Field::Udc) => u_dc,
        (ControlMode::ConstUdcConstQs { q_s, .. }, Field::Qs)
        | (ControlMode::ConstPsConstQs { q_s, .. }, Field::Qs)
        | (ControlMode::Droop { q_s, .. }, Field::Qs) => q_s,
        (ControlMode::ConstPsConstQs { p_s, .. }, Field::Ps)
        | (ControlMode::ConstPsConstUs { p_s, .. }, Field::Ps)
        | (ControlMode::Droop { p_s, .. }, Field::Ps) => p_s,
        (ControlMode::ConstUdcConstUs { u_s, .. }, Field::Us) | (ControlMode::ConstPsConstUs { u_s, .. }, Field::Us) => u_s,
        _ => 0.0,
    }
}
