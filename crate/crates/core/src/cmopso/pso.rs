//! The cooperative swarm: subswarms draw leaders from their own cost-ordered
//! slice of the global archive and periodically hand their best to the next
//! subswarm on a ring.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{crowding_distances, dominates, hypervolume_trace, ArchiveEntry, ConfigError, OptimizerConfig, ParetoArchive, Problem, RunStats};
use crate::objectives_constraints::ObjectivePoint;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub pbest: Vec<f64>,
    pub pbest_point: ObjectivePoint,
    pub subswarm_id: usize,
}

/// Binary tournament on crowding distance over an archive slice.
fn tournament<'a>(rng: &mut ChaCha8Rng, archive: &'a ParetoArchive, crowd: &[f64]) -> &'a ArchiveEntry {
    let n = archive.len();
    let a = rng.random_range(0..n);
    let b = rng.random_range(0..n);
    if crowd[b] > crowd[a] {
        &archive.entries[b]
    } else {
        &archive.entries[a]
    }
}

pub(crate) fn random_position(rng: &mut ChaCha8Rng, bounds: &[(f64, f64)]) -> Vec<f64> {
    bounds.iter().map(|&(lo, hi)| if hi > lo { rng.random_range(lo..=hi) } else { lo }).collect()
}

/// Evaluates all positions, warm-starting each from its own previous state.
pub(crate) fn evaluate_all<P: Problem>(
    problem: &P,
    xs: &[Vec<f64>],
    hints: &mut [Option<P::Hint>],
) -> Vec<ObjectivePoint> {
    let results: Vec<_> = xs.par_iter().zip(hints.par_iter()).map(|(x, h)| problem.evaluate(x, h.as_ref())).collect();
    let mut points = Vec::with_capacity(results.len());
    for (slot, r) in hints.iter_mut().zip(results) {
        *slot = r.hint;
        points.push(r.point);
    }
    points
}

/// Runs the cooperative swarm for exactly `cfg.i_max` iterations and returns
/// the global archive sorted by cost.
pub fn run_cmopso<P: Problem>(problem: &P, cfg: &OptimizerConfig) -> Result<(ParetoArchive, RunStats), ConfigError> {
    run_observed(problem, cfg, |_, _| {})
}

/// [`run_cmopso`] with a hook called after every iteration with the swarm
/// and the global archive.
pub fn run_observed<P: Problem>(
    problem: &P,
    cfg: &OptimizerConfig,
    mut observe: impl FnMut(&[Particle], &ParetoArchive),
) -> Result<(ParetoArchive, RunStats), ConfigError> {
    cfg.validate()?;
    let started = Instant::now();
    let space = problem.space();
    let bounds = space.bounds();
    let dim = bounds.len();
    let v_max: Vec<f64> = bounds.iter().map(|(lo, hi)| 0.2 * (hi - lo)).collect();
    let n_sub = cfg.subswarms();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let positions: Vec<Vec<f64>> = (0..cfg.s_pop).map(|_| random_position(&mut rng, &bounds)).collect();
    // particles move far between iterations, so their previous state is a
    // poor starting point; every evaluation starts cold
    let cold = || -> Vec<Option<P::Hint>> { vec![None; cfg.s_pop] };
    let points = evaluate_all(problem, &positions, &mut cold());
    let mut evaluations = cfg.s_pop;
    let mut swarm: Vec<Particle> = positions
        .into_iter()
        .zip(&points)
        .enumerate()
        .map(|(i, (x, &p))| Particle {
            pbest: x.clone(),
            position: x,
            velocity: vec![0.0; dim],
            pbest_point: p,
            subswarm_id: i / cfg.s_sub,
        })
        .collect();

    let mut global = ParetoArchive::new(cfg.archive_capacity);
    merge(&mut global, &swarm, &points);
    let mut fronts = vec![global.feasible_objectives()];
    // leader handed over by the neighbouring subswarm at the last exchange
    let mut handed: Vec<Option<Vec<f64>>> = vec![None; n_sub];

    for it in 0..cfg.i_max {
        let w = if cfg.i_max > 1 {
            cfg.w_start - (cfg.w_start - cfg.w_end) * it as f64 / (cfg.i_max - 1) as f64
        } else {
            cfg.w_start
        };
        let slices = archive_slices(&global, n_sub);
        for s in 0..n_sub {
            let crowd = crowding_distances(&slices[s].objectives());
            let forced = handed[s].take();
            for p in swarm.iter_mut().filter(|p| p.subswarm_id == s) {
                let leader = match &forced {
                    Some(x) => x.clone(),
                    None => tournament(&mut rng, &slices[s], &crowd).x.clone(),
                };
                for d in 0..dim {
                    let (lo, hi) = bounds[d];
                    let r1: f64 = rng.random();
                    let r2: f64 = rng.random();
                    let x = p.position[d];
                    let mut v = w * p.velocity[d] + cfg.c1 * r1 * (p.pbest[d] - x) + cfg.c2 * r2 * (leader[d] - x);
                    v = v.clamp(-v_max[d], v_max[d]);
                    let mut nx = x + v;
                    if nx > hi {
                        nx = hi - (nx - hi);
                        v = -v;
                    } else if nx < lo {
                        nx = lo + (lo - nx);
                        v = -v;
                    }
                    p.position[d] = nx.clamp(lo, hi);
                    p.velocity[d] = v;
                }
            }
        }

        let positions: Vec<Vec<f64>> = swarm.iter().map(|p| p.position.clone()).collect();
        let points = evaluate_all(problem, &positions, &mut cold());
        evaluations += cfg.s_pop;
        for (p, &pt) in swarm.iter_mut().zip(&points) {
            let replace = if dominates(&pt, &p.pbest_point) {
                true
            } else if dominates(&p.pbest_point, &pt) {
                false
            } else {
                rng.random::<bool>()
            };
            if replace {
                p.pbest = p.position.clone();
                p.pbest_point = pt;
            }
        }
        merge(&mut global, &swarm, &points);

        if (it + 1) % cfg.i_t == 0 && n_sub > 1 {
            let slices = archive_slices(&global, n_sub);
            let bests: Vec<Vec<f64>> = slices
                .iter()
                .map(|slice| {
                    let crowd = crowding_distances(&slice.objectives());
                    tournament(&mut rng, slice, &crowd).x.clone()
                })
                .collect();
            for (s, best) in bests.into_iter().enumerate() {
                handed[(s + 1) % n_sub] = Some(best);
            }
        }
        fronts.push(global.feasible_objectives());
        observe(&swarm, &global);
    }

    global.sort_by_cost();
    let (trace, reference) = hypervolume_trace(&fronts);
    let stats = RunStats {
        algorithm: "cmopso".into(),
        seed: cfg.seed,
        evaluations,
        wall_time_s: started.elapsed().as_secs_f64(),
        hypervolume_trace: trace,
        hypervolume_reference: reference,
    };
    Ok((global, stats))
}

/// Archive updates in particle (hence subswarm-id) order.
fn merge(global: &mut ParetoArchive, swarm: &[Particle], points: &[ObjectivePoint]) {
    for (p, &pt) in swarm.iter().zip(points) {
        global.insert(&p.position, pt);
    }
}

/// Splits the cost-ordered archive into `n` contiguous slices, one per
/// subswarm; when the archive is smaller than `n`, neighbouring subswarms
/// share entries.
pub(crate) fn archive_slices(global: &ParetoArchive, n: usize) -> Vec<ParetoArchive> {
    let mut sorted = global.clone();
    sorted.sort_by_cost();
    let len = sorted.len();
    (0..n)
        .map(|s| {
            let lo = s * len / n;
            let hi = ((s + 1) * len / n).max(lo + 1).min(len);
            let lo = lo.min(hi - 1);
            ParetoArchive { entries: sorted.entries[lo..hi].to_vec(), capacity: global.capacity }
        })
        .collect()
}
