//! Grey relation projection priority of the solutions in one cluster.

use serde::{Deserialize, Serialize};

use super::{ranking_weights, DecisionError, RHO};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrpRanking {
    /// Normalized weights (sum 1).
    pub weights: Vec<f64>,
    /// Larger-is-better index of each objective, per solution.
    pub index: Vec<[f64; 2]>,
    pub gamma_plus: Vec<[f64; 2]>,
    pub gamma_minus: Vec<[f64; 2]>,
    pub v_plus: Vec<f64>,
    pub v_minus: Vec<f64>,
    pub v_0: f64,
    /// Priority membership in [0, 1].
    pub d: Vec<f64>,
    /// Single-solution cluster: `d = 1` by convention.
    pub degenerate: bool,
}

/// Deng coefficients of every solution against one reference row.
fn deng(deltas: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let flat = deltas.iter().flat_map(|r| r.iter().copied());
    let (dmin, dmax) = flat.fold((f64::INFINITY, 0.0_f64), |(a, b), x| (a.min(x), b.max(x)));
    deltas
        .iter()
        .map(|r| r.map(|x| if dmax > 0.0 { (dmin + RHO * dmax) / (x + RHO * dmax) } else { 1.0 }))
        .collect()
}

/// Ranks the solutions (both objectives minimized) of one cluster.
pub fn grp_priority(points: &[[f64; 2]], weights: &[f64]) -> Result<GrpRanking, DecisionError> {
    let w = ranking_weights(weights)?;
    if points.is_empty() {
        return Err(DecisionError::InvalidInput("empty cluster".into()));
    }
    let norm_w = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    let project = |g: &[f64; 2]| (g[0] * w[0] * w[0] + g[1] * w[1] * w[1]) / norm_w;
    let v_0 = project(&[1.0, 1.0]);
    if points.len() == 1 {
        return Ok(GrpRanking {
            weights: w,
            index: vec![[1.0, 1.0]],
            gamma_plus: vec![[1.0, 1.0]],
            gamma_minus: vec![[RHO / (1.0 + RHO); 2]],
            v_plus: vec![v_0],
            v_minus: vec![0.0],
            v_0,
            d: vec![1.0],
            degenerate: true,
        });
    }

    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in points {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let index: Vec<[f64; 2]> =
        points.iter().map(|p| [0, 1].map(|k| if hi[k] > lo[k] { (hi[k] - p[k]) / (hi[k] - lo[k]) } else { 1.0 })).collect();
    let gamma_plus = deng(&index.iter().map(|x| x.map(|v| (1.0 - v).abs())).collect::<Vec<_>>());
    let gamma_minus = deng(&index.iter().map(|x| x.map(f64::abs)).collect::<Vec<_>>());
    let v_plus: Vec<f64> = gamma_plus.iter().map(project).collect();
    let v_minus: Vec<f64> = gamma_minus.iter().map(project).collect();
    let d = v_plus
        .iter()
        .zip(&v_minus)
        .map(|(vp, vm)| {
            let a = (v_0 - vm).powi(2);
            let b = (v_0 - vp).powi(2);
            if a + b > 0.0 {
                (a / (a + b)).clamp(0.0, 1.0)
            } else {
                0.5
            }
        })
        .collect();
    Ok(GrpRanking { weights: w, index, gamma_plus, gamma_minus, v_plus, v_minus, v_0, d, degenerate: false })
}
