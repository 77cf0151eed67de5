//! Multi-objective optimal power flow for hybrid AC/DC grids with VSC-HVDC links.
//!
//! The pipeline runs from a case description ([`CaseData`]) through a
//! sequential AC/DC power flow ([`solve_acdc`]), objective and constraint
//! evaluation ([`evaluate`]), a cooperative multi-subswarm PSO
//! ([`run_cmopso`], with [`run_nsga2`] as a baseline) to fuzzy clustering and
//! grey-relational ranking of the resulting Pareto front ([`select_compromise`]).

// `!(x > 0.0)` style checks are deliberate: they reject NaN along with bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ac_power_flow;
pub mod acdc_sequential;
pub mod case_model;
pub mod cmopso;
pub mod controls;
pub mod decision_support;
pub mod objectives_constraints;
pub mod study;
pub mod vsc_dc_grid;

pub use ac_power_flow::{solve_ac_pf, solve_ac_pf_from, AcError, AcInjectionOverlay, AcOptions, AcState};
pub use acdc_sequential::{solve_acdc, solve_acdc_with, AcDcError, AcDcOptions, SystemState};
pub use case_model::{load_case, shipped_case, validate_case, CaseData, CaseError, ControlMode, Converter};
pub use cmopso::{
    run_cmopso, run_nsga2, ConfigError, DecisionSpace, OpfProblem, OptimizerConfig, ParetoArchive, RunStats,
};
pub use controls::ControlSettings;
pub use decision_support::{select_compromise, DecisionError, DecisionReport};
pub use objectives_constraints::{evaluate, ObjectivePoint, ViolationReport};
pub use vsc_dc_grid::{solve_dc_grid, ConverterState, DcError};
