//! Grid data model: AC buses/branches/generators, switched shunts, the DC grid
//! and its VSC converters, plus case-file loading and validation.
//!
//! All electrical quantities are per-unit on the case's `s_base`; the DC grid
//! shares the AC per-unit system.

mod io;
mod validate;

pub use io::{load_case, parse_case, shipped_case, to_json, CaseError, SHIPPED_CASES};
pub use validate::{validate_case, Violation};

use serde::{Deserialize, Serialize};

/// Default converter loss coefficients (no-load, linear and quadratic terms).
pub const DEFAULT_LOSS_A: f64 = 11.033e-3;
pub const DEFAULT_LOSS_B: f64 = 3.464e-3;
pub const DEFAULT_LOSS_C: f64 = 5.534e-3;

fn one() -> f64 {
    1.0
}
fn minus_one() -> f64 {
    -1.0
}
fn default_loss_a() -> f64 {
    DEFAULT_LOSS_A
}
fn default_loss_b() -> f64 {
    DEFAULT_LOSS_B
}
fn default_loss_c() -> f64 {
    DEFAULT_LOSS_C
}
fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BusKind {
    Slack,
    Pv,
    Pq,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcBus {
    pub id: u32,
    pub kind: BusKind,
    #[serde(default)]
    pub p_load: f64,
    #[serde(default)]
    pub q_load: f64,
    #[serde(default)]
    pub shunt_g: f64,
    #[serde(default)]
    pub shunt_b: f64,
    pub v_min: f64,
    pub v_max: f64,
    /// Reference magnitude used by the voltage-deviation objective.
    #[serde(default = "one")]
    pub v_ref: f64,
}

/// Off-nominal tap on the from-side of a branch, adjustable on a fixed grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TapChanger {
    /// Ratio used when no control overrides it.
    #[serde(default = "one")]
    pub ratio: f64,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub step: f64,
}

impl TapChanger {
    pub fn steps(&self) -> usize {
        grid_steps(self.ratio_min, self.ratio_max, self.step)
    }

    pub fn value_at(&self, index: usize) -> f64 {
        self.ratio_min + index as f64 * self.step
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcBranch {
    pub from: u32,
    pub to: u32,
    pub r: f64,
    pub x: f64,
    #[serde(default)]
    pub b_charging: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tap: Option<TapChanger>,
    pub s_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub bus: u32,
    pub p_min: f64,
    pub p_max: f64,
    pub q_min: f64,
    pub q_max: f64,
    /// Quadratic cost coefficient, $/h per p.u.².
    pub cost_a: f64,
    /// Linear cost coefficient, $/h per p.u.
    pub cost_b: f64,
    /// Constant cost, $/h.
    pub cost_c: f64,
    /// Scheduled active output (ignored for the slack unit).
    #[serde(default)]
    pub p_set: f64,
    /// Terminal voltage set-point for PV/slack buses.
    #[serde(default = "one")]
    pub v_set: f64,
}

impl Generator {
    /// A unit whose active output can be moved by the optimizer.
    pub fn is_dispatchable(&self) -> bool {
        self.p_max > self.p_min
    }
}

/// Switched capacitor bank; `q_set` is the reactive injection at 1.0 p.u. voltage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShuntCapacitorBank {
    pub bus: u32,
    pub q_min: f64,
    pub q_max: f64,
    pub step: f64,
    #[serde(default)]
    pub q_set: f64,
}

impl ShuntCapacitorBank {
    pub fn steps(&self) -> usize {
        grid_steps(self.q_min, self.q_max, self.step)
    }

    pub fn value_at(&self, index: usize) -> f64 {
        self.q_min + index as f64 * self.step
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DcBus {
    pub id: u32,
    pub u_min: f64,
    pub u_max: f64,
    #[serde(default = "one")]
    pub u_ref: f64,
    /// Bound on the magnitude of the current injected at this bus.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DcBranch {
    pub from: u32,
    pub to: u32,
    pub r: f64,
    pub i_max: f64,
}

/// Converter control-mode pairs. Powers are AC-side (`p_s`, `q_s`), positive
/// when flowing from the AC bus into the converter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ControlMode {
    ConstUdcConstQs { u_dc: f64, q_s: f64 },
    ConstUdcConstUs { u_dc: f64, u_s: f64 },
    ConstPsConstQs { p_s: f64, q_s: f64 },
    ConstPsConstUs { p_s: f64, u_s: f64 },
    /// `p_s = p_s_set - (u_dc - u_dc_set) / slope`, reactive side at `q_s`.
    Droop {
        slope: f64,
        u_dc: f64,
        p_s: f64,
        #[serde(default)]
        q_s: f64,
    },
}

impl ControlMode {
    /// Holds the DC voltage of its bus (a classical DC slack).
    pub fn is_dc_slack(&self) -> bool {
        matches!(self, Self::ConstUdcConstQs { .. } | Self::ConstUdcConstUs { .. })
    }

    pub fn is_droop(&self) -> bool {
        matches!(self, Self::Droop { .. })
    }

    /// Pins the AC terminal voltage magnitude instead of reactive power.
    pub fn pins_ac_voltage(&self) -> bool {
        matches!(self, Self::ConstUdcConstUs { .. } | Self::ConstPsConstUs { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::ConstUdcConstQs { .. } => "const_udc_const_qs",
            Self::ConstUdcConstUs { .. } => "const_udc_const_us",
            Self::ConstPsConstQs { .. } => "const_ps_const_qs",
            Self::ConstPsConstUs { .. } => "const_ps_const_us",
            Self::Droop { .. } => "droop",
        }
    }
}

/// Annular P-Q capability region centred on `(p0, q0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PqCircle {
    pub p0: f64,
    pub q0: f64,
    pub r_min: f64,
    pub r_max: f64,
}

impl Default for PqCircle {
    fn default() -> Self {
        Self { p0: 0.0, q0: 0.0, r_min: 0.0, r_max: 1.0 }
    }
}

/// Starting guesses for quantities a control mode leaves free.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ConverterInit {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_dc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Converter {
    pub ac_bus: u32,
    pub dc_bus: u32,
    pub r_xfmr: f64,
    pub x_xfmr: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub b_filter: f64,
    #[serde(default = "default_loss_a")]
    pub loss_a: f64,
    #[serde(default = "default_loss_b")]
    pub loss_b: f64,
    #[serde(default = "default_loss_c")]
    pub loss_c: f64,
    pub mode: ControlMode,
    #[serde(default = "minus_one")]
    pub p_s_min: f64,
    #[serde(default = "one")]
    pub p_s_max: f64,
    #[serde(default = "minus_one")]
    pub q_s_min: f64,
    #[serde(default = "one")]
    pub q_s_max: f64,
    #[serde(default)]
    pub pq_circle: PqCircle,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<ConverterInit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseData {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub name: String,
    pub s_base: f64,
    pub buses: Vec<AcBus>,
    pub branches: Vec<AcBranch>,
    pub generators: Vec<Generator>,
    #[serde(default)]
    pub shunts: Vec<ShuntCapacitorBank>,
    #[serde(default)]
    pub dc_buses: Vec<DcBus>,
    #[serde(default)]
    pub dc_branches: Vec<DcBranch>,
    #[serde(default)]
    pub converters: Vec<Converter>,
}

impl CaseData {
    /// Position of AC bus `id` in `buses`.
    pub fn bus_index(&self, id: u32) -> Option<usize> {
        self.buses.iter().position(|b| b.id == id)
    }

    /// Position of DC bus `id` in `dc_buses`.
    pub fn dc_bus_index(&self, id: u32) -> Option<usize> {
        self.dc_buses.iter().position(|b| b.id == id)
    }

    pub fn has_dc_grid(&self) -> bool {
        !self.converters.is_empty()
    }

    /// Indices of branches carrying a tap changer, in branch order.
    pub fn tapped_branches(&self) -> Vec<usize> {
        self.branches
            .iter()
            .enumerate()
            .filter_map(|(i, br)| br.tap.as_ref().map(|_| i))
            .collect()
    }
}

/// Number of grid steps in `[lo, hi]`, rounded to the nearest integer.
pub(crate) fn grid_steps(lo: f64, hi: f64, step: f64) -> usize {
    if !(step > 0.0) || !(hi > lo) {
        return 0;
    }
    ((hi - lo) / step).round() as usize
}
