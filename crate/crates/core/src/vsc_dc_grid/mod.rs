//! VSC converter model, control modes and the resistive DC-grid solver.
//!
//! Sign conventions: `p_s`/`q_s` flow from the AC bus into the converter
//! branch, `p_c`/`q_c` from the converter toward the AC side, and `p_dc` is
//! injected into the DC grid, so each converter satisfies
//! `p_c + p_dc + p_loss = 0`.

mod control;
mod converter;
mod dc_grid;

pub use control::{resolve_control_mode, Ambient, DroopLaw, ResolvedControl};
pub use converter::{
    check_pq_capability, converter_loss, converter_powers, Capability, ConverterLoss, ConverterPowers,
    ConverterState,
};
pub use dc_grid::{
    dc_conductance, solve_dc_grid, ActiveTarget, ConverterTarget, DcIssue, DcOptions, DcSolution, DcState,
};

#[derive(Debug, thiserror::Error)]
pub enum DcError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid DC-grid input: {0}")]
    InvalidInput(String),
    #[error("DC grid did not converge after {iterations} iterations (max mismatch {max_mismatch:.3e} p.u.)")]
    NonConvergence { iterations: usize, max_mismatch: f64 },
}
