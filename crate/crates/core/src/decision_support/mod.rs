//! Decision stage: fuzzy C-means clustering of a Pareto set and grey
//! relation projection ranking inside each cluster.

mod fcm;
mod grp;

use serde::{Deserialize, Serialize};

pub use fcm::{fcm_cluster, FcmResult};
pub use grp::{grp_priority, GrpRanking};

/// Resolution coefficient of the grey relational coefficient.
pub const RHO: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DecisionError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("invalid decision input: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Member {
    /// Position in the input list.
    pub index: usize,
    pub f_cost: f64,
    pub v_dev: f64,
    pub d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub cluster: usize,
    pub label: String,
    /// Center in raw objective units.
    pub center: [f64; 2],
    pub members: Vec<Member>,
    /// Input index of the highest-priority member.
    pub compromise: usize,
    pub compromise_d: f64,
    /// Other members sharing the maximal priority, if any.
    pub tied_with: Vec<usize>,
    /// Set when the cluster has a single member (priority 1 by convention).
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionReport {
    pub weights: Vec<f64>,
    pub fuzziness: f64,
    pub fcm_iterations: usize,
    pub fcm_loss: f64,
    /// Non-empty clusters ordered by ascending center cost.
    pub clusters: Vec<ClusterReport>,
}

impl DecisionReport {
    /// Compromise member of every cluster, in cluster order.
    pub fn compromises(&self) -> Vec<&Member> {
        self.clusters
            .iter()
            .map(|c| c.members.iter().find(|m| m.index == c.compromise).expect("compromise is a member"))
            .collect()
    }
}

fn label(rank: usize, n: usize) -> String {
    if rank == 0 {
        "cost-preferring".into()
    } else if rank + 1 == n {
        "deviation-preferring".into()
    } else {
        format!("intermediate-{rank}")
    }
}

/// Clusters `points` (cost, deviation) with FCM, hard-assigns each point to
/// its strongest cluster and picks the highest-priority member of each.
pub fn select_compromise(
    points: &[[f64; 2]],
    n_clusters: usize,
    weights: &[f64],
    seed: u64,
) -> Result<DecisionReport, DecisionError> {
    const FUZZINESS: f64 = 2.0;
    if points.is_empty() {
        return Err(DecisionError::InvalidInput("empty solution set".into()));
    }
    let fcm = fcm_cluster(points, n_clusters, FUZZINESS, seed)?;
    let mut groups: Vec<Vec<usize>> = vec![vec![]; n_clusters];
    for (i, row) in fcm.memberships.iter().enumerate() {
        let best = (0..n_clusters).fold(0, |b, j| if row[j] > row[b] { j } else { b });
        groups[best].push(i);
    }
    let mut order: Vec<usize> = (0..n_clusters).filter(|&j| !groups[j].is_empty()).collect();
    order.sort_by(|&a, &b| fcm.centers[a][0].total_cmp(&fcm.centers[b][0]).then(a.cmp(&b)));

    let mut clusters = Vec::with_capacity(order.len());
    for (rank, &j) in order.iter().enumerate() {
        let idx = &groups[j];
        let pts: Vec<[f64; 2]> = idx.iter().map(|&i| points[i]).collect();
        let ranking = grp_priority(&pts, weights)?;
        let members: Vec<Member> = idx
            .iter()
            .zip(&ranking.d)
            .map(|(&i, &d)| Member { index: i, f_cost: points[i][0], v_dev: points[i][1], d })
            .collect();
        let best = (0..members.len()).fold(0, |b, k| if members[k].d > members[b].d { k } else { b });
        let tied_with =
            members.iter().enumerate().filter(|&(k, m)| k != best && m.d == members[best].d).map(|(_, m)| m.index).collect();
        clusters.push(ClusterReport {
            cluster: j,
            label: label(rank, order.len()),
            center: fcm.centers[j],
            compromise: members[best].index,
            compromise_d: members[best].d,
            members,
            tied_with,
            degenerate: ranking.degenerate,
        });
    }
    Ok(DecisionReport {
        weights: ranking_weights(weights)?,
        fuzziness: FUZZINESS,
        fcm_iterations: fcm.iterations,
        fcm_loss: fcm.loss,
        clusters,
    })
}

/// Weights scaled to sum to one.
pub(crate) fn ranking_weights(weights: &[f64]) -> Result<Vec<f64>, DecisionError> {
    let sum: f64 = weights.iter().sum();
    if weights.len() != 2 || weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || !(sum > 0.0) {
        return Err(DecisionError::InvalidInput(format!("need two non-negative weights with a positive sum, got {weights:?}")));
    }
    Ok(weights.iter().map(|w| w / sum).collect())
}
