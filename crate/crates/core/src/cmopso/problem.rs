//! Evaluation interface shared by the optimizers.

use crate::acdc_sequential::{solve_acdc_with, AcDcOptions, SystemState};
use crate::case_model::CaseData;
use crate::objectives_constraints::{evaluate, ObjectivePoint, DIVERGED_OBJECTIVE, NON_CONVERGENCE_SURCHARGE};

use super::DecisionSpace;

pub struct Evaluation<H> {
    pub point: ObjectivePoint,
    /// State a later evaluation of a nearby vector may start from.
    pub hint: Option<H>,
}

/// A bi-objective minimization problem over a box-bounded relaxed vector.
pub trait Problem: Sync {
    type Hint: Clone + Send + Sync;

    fn space(&self) -> &DecisionSpace;

    fn evaluate(&self, x: &[f64], hint: Option<&Self::Hint>) -> Evaluation<Self::Hint>;
}

/// Optimal power flow over a case: decode, solve the AC/DC system, score.
pub struct OpfProblem<'a> {
    pub case: &'a CaseData,
    pub space: DecisionSpace,
    /// Whether DC voltages count towards the deviation objective.
    pub include_dc: bool,
    pub opts: AcDcOptions,
}

impl<'a> OpfProblem<'a> {
    pub fn new(case: &'a CaseData, include_dc: bool) -> Self {
        Self { case, space: DecisionSpace::for_case(case), include_dc, opts: AcDcOptions::default() }
    }

    /// Solves the system at `x` (cold start).
    pub fn solve(&self, x: &[f64]) -> Option<SystemState> {
        let controls = self.space.decode(x, self.case);
        solve_acdc_with(self.case, &controls, &self.opts, None).ok()
    }
}

impl Problem for OpfProblem<'_> {
    type Hint = SystemState;

    fn space(&self) -> &DecisionSpace {
        &self.space
    }

    fn evaluate(&self, x: &[f64], hint: Option<&SystemState>) -> Evaluation<SystemState> {
        let controls = self.space.decode(x, self.case);
        let mut state = solve_acdc_with(self.case, &controls, &self.opts, hint);
        if hint.is_some() && !matches!(&state, Ok(s) if s.converged) {
            // a poor starting point must not cost a candidate its solution
            state = solve_acdc_with(self.case, &controls, &self.opts, None);
        }
        match state {
            Ok(s) => {
                let (point, _) = evaluate(&s, self.case, self.include_dc);
                let hint = s.converged.then_some(s);
                Evaluation { point, hint }
            }
            Err(_) => Evaluation {
                point: ObjectivePoint::new(DIVERGED_OBJECTIVE, DIVERGED_OBJECTIVE, 10.0 * NON_CONVERGENCE_SURCHARGE),
                hint: None,
            },
        }
    }
}
