//! Control-mode resolution: which converter quantities are pinned.

use serde::Serialize;

use crate::case_model::ControlMode;

/// Linear droop `p_s = p_s_set - (u_dc - u_dc_set) / slope`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DroopLaw {
    pub slope: f64,
    pub u_dc_set: f64,
    pub p_s_set: f64,
}

impl DroopLaw {
    pub fn p_s_at(&self, u_dc: f64) -> f64 {
        self.p_s_set - (u_dc - self.u_dc_set) / self.slope
    }
}

/// Measured quantities a mode may be evaluated at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ambient {
    pub u_dc: f64,
    pub u_s: f64,
}

/// Pinned quantities of a converter; `None` means free.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolvedControl {
    pub p_s: Option<f64>,
    pub q_s: Option<f64>,
    pub u_s: Option<f64>,
    pub u_dc: Option<f64>,
    /// Present for droop units; `p_s` then holds the droop value at the ambient DC voltage.
    pub droop: Option<DroopLaw>,
}

pub fn resolve_control_mode(mode: &ControlMode, ambient: Ambient) -> ResolvedControl {
    let free = ResolvedControl { p_s: None, q_s: None, u_s: None, u_dc: None, droop: None };
    match *mode {
        ControlMode::ConstUdcConstQs { u_dc, q_s } => ResolvedControl { u_dc: Some(u_dc), q_s: Some(q_s), ..free },
        ControlMode::ConstUdcConstUs { u_dc, u_s } => ResolvedControl { u_dc: Some(u_dc), u_s: Some(u_s), ..free },
        ControlMode::ConstPsConstQs { p_s, q_s } => ResolvedControl { p_s: Some(p_s), q_s: Some(q_s), ..free },
        ControlMode::ConstPsConstUs { p_s, u_s } => ResolvedControl { p_s: Some(p_s), u_s: Some(u_s), ..free },
        ControlMode::Droop { slope, u_dc, p_s, q_s } => {
            let law = DroopLaw { slope, u_dc_set: u_dc, p_s_set: p_s };
            ResolvedControl { p_s: Some(law.p_s_at(ambient.u_dc)), q_s: Some(q_s), droop: Some(law), ..free }
        }
    }
}
