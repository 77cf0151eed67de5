//! Physical control settings consumed by the power-flow solvers.

use serde::{Deserialize, Serialize};

use crate::case_model::{CaseData, ControlMode};
use crate::cmopso::{set_mode, Field};

/// Values for every adjustable quantity of a case.
///
/// Vectors are aligned with the case: `gen_p`/`gen_v` per generator,
/// `taps` per tapped branch (branch order), `shunts` per shunt bank and
/// `modes` per converter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlSettings {
    pub gen_p: Vec<f64>,
    pub gen_v: Vec<f64>,
    pub taps: Vec<f64>,
    pub shunts: Vec<f64>,
    pub modes: Vec<ControlMode>,
}

impl ControlSettings {
    /// The case-file operating point.
    pub fn from_case(case: &CaseData) -> Self {
        Self {
            gen_p: case.generators.iter().map(|g| g.p_set).collect(),
            gen_v: case.generators.iter().map(|g| g.v_set).collect(),
            taps: case.branches.iter().filter_map(|b| b.tap.as_ref().map(|t| t.ratio)).collect(),
            shunts: case.shunts.iter().map(|s| s.q_set).collect(),
            modes: case.converters.iter().map(|c| c.mode).collect(),
        }
    }

    /// Checks vector lengths against the case.
    pub fn check_shape(&self, case: &CaseData) -> Result<(), String> {
        let taps = case.branches.iter().filter(|b| b.tap.is_some()).count();
        let pairs = [
            ("gen_p", self.gen_p.len(), case.generators.len()),
            ("gen_v", self.gen_v.len(), case.generators.len()),
            ("taps", self.taps.len(), taps),
            ("shunts", self.shunts.len(), case.shunts.len()),
            ("modes", self.modes.len(), case.converters.len()),
        ];
        for (what, got, want) in pairs {
            if got != want {
                return Err(format!("{what}: expected {want} entries, got {got}"));
            }
        }
        Ok(())
    }

    /// Overrides one set-point by name.
    ///
    /// Accepted keys: `converter.<k>.<p_s|q_s|u_s|u_dc>` (or `vsc<k>.<field>`)
    /// with 1-based converter numbering, and `pg.<bus>` / `vg.<bus>` for the
    /// first generator at an AC bus.
    pub fn apply_override(&mut self, case: &CaseData, key: &str, value: f64) -> Result<(), String> {
        let parts: Vec<&str> = key.split('.').collect();
        let converter = match parts.as_slice() {
            ["converter", k, field] => Some((k.parse::<usize>().ok(), *field)),
            [vsc, field] if vsc.starts_with("vsc") => Some((vsc[3..].parse::<usize>().ok(), *field)),
            _ => None,
        };
        if let Some((k, field)) = converter {
            let k = k.filter(|&k| k >= 1 && k <= self.modes.len()).ok_or_else(|| format!("{key}: no such converter"))?;
            let field = match field {
                "p_s" => Field::Ps,
                "q_s" => Field::Qs,
                "u_s" => Field::Us,
                "u_dc" => Field::Udc,
                other => return Err(format!("{key}: unknown converter quantity '{other}'")),
            };
            let mode = &mut self.modes[k - 1];
            let name = mode.name();
            return if set_mode(mode, field, value) {
                Ok(())
            } else {
                Err(format!("{key}: converter {k} in mode {name} has no such set-point"))
            };
        }
        let (target, bus) = match parts.as_slice() {
            ["pg", bus] => (&mut self.gen_p, bus),
            ["vg", bus] => (&mut self.gen_v, bus),
            _ => return Err(format!("{key}: unrecognised control name")),
        };
        let bus: u32 = bus.parse().map_err(|_| format!("{key}: bad bus number"))?;
        let g = case.generators.iter().position(|g| g.bus == bus).ok_or_else(|| format!("{key}: no generator at bus {bus}"))?;
        target[g] = value;
        Ok(())
    }
}
