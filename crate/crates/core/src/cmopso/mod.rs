//! Cooperative multi-objective particle swarm optimizer and an NSGA-II
//! baseline, both over a mixed real/integer decision vector.

mod archive;
mod encoding;
mod metrics;
mod nsga2;
mod problem;
mod pso;

use serde::{Deserialize, Serialize};

pub use archive::{crowding_distances, dominates, update_archive, ArchiveEntry, ParetoArchive};
pub use encoding::{slack_generator, DecisionSpace, Slot, VarKind, Variable};
pub(crate) use encoding::{set_mode, Field};
pub use metrics::{generational_distance, hypervolume_2d, nadir_reference};
pub use nsga2::run_nsga2;
pub use problem::{Evaluation, OpfProblem, Problem};
pub use pso::{run_cmopso, run_observed, Particle};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("pop not divisible by subswarms (pop {pop}, subswarm size {sub})")]
    NotDivisible { pop: usize, sub: usize },
    #[error("invalid optimizer setting: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Total population (particles or individuals).
    pub s_pop: usize,
    /// Particles per subswarm.
    pub s_sub: usize,
    pub i_max: usize,
    /// Exchange interval between neighbouring subswarms.
    pub i_t: usize,
    pub seed: u64,
    pub archive_capacity: usize,
    pub w_start: f64,
    pub w_end: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            s_pop: 100,
            s_sub: 25,
            i_max: 50,
            i_t: 5,
            seed: 42,
            archive_capacity: 100,
            w_start: 0.9,
            w_end: 0.4,
            c1: 2.0,
            c2: 2.0,
        }
    }
}

impl OptimizerConfig {
    pub fn subswarms(&self) -> usize {
        self.s_pop / self.s_sub.max(1)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.s_pop < 2 {
            return Err(ConfigError::Invalid("population must hold at least 2 members".into()));
        }
        if self.s_sub == 0 || self.s_pop % self.s_sub != 0 {
            return Err(ConfigError::NotDivisible { pop: self.s_pop, sub: self.s_sub });
        }
        if self.i_t == 0 {
            return Err(ConfigError::Invalid("exchange interval must be at least 1".into()));
        }
        if self.archive_capacity == 0 {
            return Err(ConfigError::Invalid("archive capacity must be positive".into()));
        }
        let finite = [self.w_start, self.w_end, self.c1, self.c2].iter().all(|v| v.is_finite() && *v >= 0.0);
        if !finite {
            return Err(ConfigError::Invalid("inertia and acceleration weights must be finite and non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub algorithm: String,
    pub seed: u64,
    pub evaluations: usize,
    pub wall_time_s: f64,
    /// Archive hypervolume after initialization and after every iteration,
    /// all against one reference point (1.1 × the nadir over the whole run).
    pub hypervolume_trace: Vec<f64>,
    pub hypervolume_reference: Option<[f64; 2]>,
}

/// Builds the hypervolume trace from per-iteration feasible fronts.
pub(crate) fn hypervolume_trace(fronts: &[Vec<[f64; 2]>]) -> (Vec<f64>, Option<[f64; 2]>) {
    let refs: Vec<&[[f64; 2]]> = fronts.iter().map(|f| f.as_slice()).collect();
    let Some(r) = nadir_reference(&refs, 1.1) else {
        return (vec![0.0; fronts.len()], None);
    };
    (fronts.iter().map(|f| hypervolume_2d(f, r)).collect(), Some(r))
}
