//! Fuzzy C-means by alternating optimization on min-max-normalized objectives.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::DecisionError;

const MAX_ITER: usize = 300;
const CENTER_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FcmResult {
    /// One row per point, one column per cluster; rows sum to one.
    pub memberships: Vec<Vec<f64>>,
    /// Cluster centers in raw objective units.
    pub centers: Vec<[f64; 2]>,
    /// Objective value at the final memberships (normalized space).
    pub loss: f64,
    /// Objective value after every iteration.
    pub loss_history: Vec<f64>,
    pub iterations: usize,
}

fn dist2(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

/// Membership row of point `s` for the given centers.
fn memberships_for(s: &[f64; 2], centers: &[[f64; 2]], fuzziness: f64) -> Vec<f64> {
    let d: Vec<f64> = centers.iter().map(|c| dist2(s, c)).collect();
    if let Some(hit) = d.iter().position(|&x| x == 0.0) {
        let mut row = vec![0.0; centers.len()];
        row[hit] = 1.0;
        return row;
    }
    let e = 1.0 / (fuzziness - 1.0);
    // (‖s−c_j‖/‖s−c_k‖)^(2/(n−1)) on squared distances
    let row: Vec<f64> = (0..d.len()).map(|j| 1.0 / d.iter().map(|dk| (d[j] / dk).powf(e)).sum::<f64>()).collect();
    let sum: f64 = row.iter().sum();
    row.into_iter().map(|u| u / sum).collect()
}

fn loss(points: &[[f64; 2]], u: &[Vec<f64>], centers: &[[f64; 2]], fuzziness: f64) -> f64 {
    points
        .iter()
        .zip(u)
        .map(|(s, row)| row.iter().zip(centers).map(|(m, c)| m.powf(fuzziness) * dist2(s, c)).sum::<f64>())
        .sum()
}

fn update_centers(points: &[[f64; 2]], u: &[Vec<f64>], k: usize, fuzziness: f64) -> Vec<[f64; 2]> {
    (0..k)
        .map(|j| {
            let (mut num, mut den) = ([0.0; 2], 0.0);
            for (s, row) in points.iter().zip(u) {
                let w = row[j].powf(fuzziness);
                num[0] += w * s[0];
                num[1] += w * s[1];
                den += w;
            }
            if den > 0.0 {
                [num[0] / den, num[1] / den]
            } else {
                [0.0, 0.0]
            }
        })
        .collect()
}

/// Clusters `points` into `n_clusters` fuzzy groups with fuzziness `fuzziness`.
pub fn fcm_cluster(points: &[[f64; 2]], n_clusters: usize, fuzziness: f64, seed: u64) -> Result<FcmResult, DecisionError> {
    if !(fuzziness > 1.0) {
        return Err(DecisionError::InvalidInput(format!("fuzziness must exceed 1, got {fuzziness}")));
    }
    if n_clusters == 0 {
        return Err(DecisionError::InvalidInput("need at least one cluster".into()));
    }
    if points.iter().any(|p| !(p[0].is_finite() && p[1].is_finite())) {
        return Err(DecisionError::InvalidInput("non-finite objective value".into()));
    }
    let mut distinct: Vec<[f64; 2]> = points.to_vec();
    distinct.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    distinct.dedup();
    if distinct.len() <= 1 {
        return Err(DecisionError::DegenerateInput("all points are identical".into()));
    }
    if distinct.len() < n_clusters {
        return Err(DecisionError::DegenerateInput(format!(
            "{} distinct points cannot form {n_clusters} clusters",
            distinct.len()
        )));
    }

    let (lo, span) = normalization(points);
    let norm: Vec<[f64; 2]> =
        points.iter().map(|p| [(p[0] - lo[0]) / span[0], (p[1] - lo[1]) / span[1]]).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u: Vec<Vec<f64>> = norm
        .iter()
        .map(|_| {
            let row: Vec<f64> = (0..n_clusters).map(|_| rng.random::<f64>() + 1e-3).collect();
            let sum: f64 = row.iter().sum();
            row.into_iter().map(|x| x / sum).collect()
        })
        .collect();
    let mut centers = update_centers(&norm, &u, n_clusters, fuzziness);
    let mut history = Vec::new();
    let mut iterations = 0;
    while iterations < MAX_ITER {
        iterations += 1;
        u = norm.iter().map(|s| memberships_for(s, &centers, fuzziness)).collect();
        let next = update_centers(&norm, &u, n_clusters, fuzziness);
        let moved = centers.iter().zip(&next).map(|(a, b)| dist2(a, b).sqrt()).fold(0.0, f64::max);
        centers = next;
        history.push(loss(&norm, &u, &centers, fuzziness));
        if moved <= CENTER_TOL {
            break;
        }
    }
    u = norm.iter().map(|s| memberships_for(s, &centers, fuzziness)).collect();
    let final_loss = loss(&norm, &u, &centers, fuzziness);
    history.push(final_loss);
    Ok(FcmResult {
        memberships: u,
        centers: centers.iter().map(|c| [lo[0] + c[0] * span[0], lo[1] + c[1] * span[1]]).collect(),
        loss: final_loss,
        loss_history: history,
        iterations,
    })
}

/// Per-objective minimum and range (a constant objective gets range 1).
fn normalization(points: &[[f64; 2]]) -> ([f64; 2], [f64; 2]) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in points {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = [0, 1].map(|k| if hi[k] > lo[k] { hi[k] - lo[k] } else { 1.0 });
    (lo, span)
}

#[cfg(test)]
pub(super) mod tests_support {
    pub fn row(s: &[f64; 2], centers: &[[f64; 2]]) -> Vec<f64> {
        super::memberships_for(s, centers, 2.0)
    }
}
