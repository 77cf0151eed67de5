//! NSGA-II baseline on the relaxed decision vector.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::pso::{evaluate_all, random_position};
use super::{crowding_distances, dominates, hypervolume_trace, ConfigError, OptimizerConfig, ParetoArchive, Problem, RunStats};
use crate::objectives_constraints::ObjectivePoint;

const ETA_C: f64 = 20.0;
const ETA_M: f64 = 20.0;
const P_CROSS: f64 = 0.9;

/// Fast non-dominated sort under constrained dominance; returns fronts of indices.
pub(crate) fn non_dominated_fronts(points: &[ObjectivePoint]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by = vec![0usize; n];
    let mut dominating: Vec<Vec<usize>> = vec![vec![]; n];
    for i in 0..n {
        for j in i + 1..n {
            if dominates(&points[i], &points[j]) {
                dominating[i].push(j);
                dominated_by[j] += 1;
            } else if dominates(&points[j], &points[i]) {
                dominating[j].push(i);
                dominated_by[i] += 1;
            }
        }
    }
    let mut fronts = vec![];
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = vec![];
        for &i in &current {
            for &j in &dominating[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Rank and crowding of every member.
fn rank_and_crowd(points: &[ObjectivePoint]) -> (Vec<usize>, Vec<f64>) {
    let mut rank = vec![0; points.len()];
    let mut crowd = vec![0.0; points.len()];
    for (r, front) in non_dominated_fronts(points).iter().enumerate() {
        let objs: Vec<[f64; 2]> = front.iter().map(|&i| points[i].objectives()).collect();
        for (&i, d) in front.iter().zip(crowding_distances(&objs)) {
            rank[i] = r;
            crowd[i] = d;
        }
    }
    (rank, crowd)
}

fn sbx(rng: &mut ChaCha8Rng, a: f64, b: f64, lo: f64, hi: f64) -> (f64, f64) {
    if (a - b).abs() < 1e-14 || hi <= lo {
        return (a, b);
    }
    let u: f64 = rng.random();
    let beta = if u <= 0.5 { (2.0 * u).powf(1.0 / (ETA_C + 1.0)) } else { (1.0 / (2.0 * (1.0 - u))).powf(1.0 / (ETA_C + 1.0)) };
    let c1 = 0.5 * ((1.0 + beta) * a + (1.0 - beta) * b);
    let c2 = 0.5 * ((1.0 - beta) * a + (1.0 + beta) * b);
    (c1.clamp(lo, hi), c2.clamp(lo, hi))
}

fn poly_mutation(rng: &mut ChaCha8Rng, x: f64, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return x;
    }
    let u: f64 = rng.random();
    let delta = if u < 0.5 {
        (2.0 * u).powf(1.0 / (ETA_M + 1.0)) - 1.0
    } else {
        1.0 - (2.0 * (1.0 - u)).powf(1.0 / (ETA_M + 1.0))
    };
    (x + delta * (hi - lo)).clamp(lo, hi)
}

/// NSGA-II with the same evaluation budget as [`super::run_cmopso`]:
/// `s_pop` individuals for `i_max` generations. Returns the first front of
/// the final population as an archive sorted by cost.
pub fn run_nsga2<P: Problem>(problem: &P, cfg: &OptimizerConfig) -> Result<(ParetoArchive, RunStats), ConfigError> {
    cfg.validate()?;
    let started = Instant::now();
    let bounds = problem.space().bounds();
    let dim = bounds.len();
    let n = cfg.s_pop;
    let p_mut = 1.0 / dim.max(1) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut pop: Vec<Vec<f64>> = (0..n).map(|_| random_position(&mut rng, &bounds)).collect();
    let mut hints = vec![None; n];
    let mut points = evaluate_all(problem, &pop, &mut hints);
    let mut evaluations = n;
    let mut fronts_trace = vec![first_front(&points)];

    for _ in 0..cfg.i_max {
        let (rank, crowd) = rank_and_crowd(&points);
        let better = |a: usize, b: usize| rank[a] < rank[b] || (rank[a] == rank[b] && crowd[a] > crowd[b]);
        let pick = |rng: &mut ChaCha8Rng| {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            if better(b, a) {
                b
            } else {
                a
            }
        };
        let mut children: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut child_hints = Vec::with_capacity(n);
        while children.len() < n {
            let (pa, pb) = (pick(&mut rng), pick(&mut rng));
            let (mut ca, mut cb) = (pop[pa].clone(), pop[pb].clone());
            if rng.random::<f64>() < P_CROSS {
                for d in 0..dim {
                    if rng.random::<bool>() {
                        let (lo, hi) = bounds[d];
                        (ca[d], cb[d]) = sbx(&mut rng, ca[d], cb[d], lo, hi);
                    }
                }
            }
            for child in [&mut ca, &mut cb] {
                for d in 0..dim {
                    if rng.random::<f64>() < p_mut {
                        child[d] = poly_mutation(&mut rng, child[d], bounds[d].0, bounds[d].1);
                    }
                }
            }
            children.push(ca);
            child_hints.push(hints[pa].clone());
            if children.len() < n {
                children.push(cb);
                child_hints.push(hints[pb].clone());
            }
        }
        let child_points = evaluate_all(problem, &children, &mut child_hints);
        evaluations += n;

        pop.extend(children);
        points.extend(child_points);
        hints.extend(child_hints);
        let mut keep = Vec::with_capacity(n);
        for front in non_dominated_fronts(&points) {
            if keep.len() + front.len() <= n {
                keep.extend(front);
            } else {
                let objs: Vec<[f64; 2]> = front.iter().map(|&i| points[i].objectives()).collect();
                let d = crowding_distances(&objs);
                let mut order: Vec<usize> = (0..front.len()).collect();
                order.sort_by(|&a, &b| d[b].total_cmp(&d[a]).then(a.cmp(&b)));
                keep.extend(order.into_iter().take(n - keep.len()).map(|k| front[k]));
            }
            if keep.len() == n {
                break;
            }
        }
        pop = keep.iter().map(|&i| pop[i].clone()).collect();
        points = keep.iter().map(|&i| points[i]).collect();
        hints = keep.iter().map(|&i| hints[i].clone()).collect();
        fronts_trace.push(first_front(&points));
    }

    let mut archive = ParetoArchive::new(cfg.archive_capacity);
    for (x, &p) in pop.iter().zip(&points) {
        archive.insert(x, p);
    }
    archive.sort_by_cost();
    let (trace, reference) = hypervolume_trace(&fronts_trace);
    let stats = RunStats {
        algorithm: "nsga2".into(),
        seed: cfg.seed,
        evaluations,
        wall_time_s: started.elapsed().as_secs_f64(),
        hypervolume_trace: trace,
        hypervolume_reference: reference,
    };
    Ok((archive, stats))
}

fn first_front(points: &[ObjectivePoint]) -> Vec<[f64; 2]> {
    non_dominated_fronts(points)
        .first()
        .map(|f| f.iter().filter(|&&i| points[i].feasible).map(|&i| points[i].objectives()).collect())
        .unwrap_or_default()
}
