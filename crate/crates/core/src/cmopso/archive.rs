//! Constrained dominance, crowding distance and the bounded Pareto archive.

use serde::{Deserialize, Serialize};

use crate::objectives_constraints::ObjectivePoint;

/// Feasibility-first dominance: feasible beats infeasible, infeasible points
/// compare by violation, feasible points by Pareto order on (cost, deviation).
pub fn dominates(a: &ObjectivePoint, b: &ObjectivePoint) -> bool {
    match (a.feasible, b.feasible) {
        (true, false) => true,
        (false, true) => false,
        (false, false) => a.violation < b.violation,
        (true, true) => {
            a.f_cost <= b.f_cost && a.v_dev <= b.v_dev && (a.f_cost < b.f_cost || a.v_dev < b.v_dev)
        }
    }
}

/// Crowding distance of each point in objective space; the extreme points
/// of every objective get infinity.
pub fn crowding_distances(points: &[[f64; 2]]) -> Vec<f64> {
    let n = points.len();
    let mut d = vec![0.0; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    for m in 0..2 {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| points[a][m].total_cmp(&points[b][m]).then(a.cmp(&b)));
        let (lo, hi) = (points[order[0]][m], points[order[n - 1]][m]);
        d[order[0]] = f64::INFINITY;
        d[order[n - 1]] = f64::INFINITY;
        let span = hi - lo;
        if !(span > 0.0) {
            continue;
        }
        for w in 1..n - 1 {
            d[order[w]] += (points[order[w + 1]][m] - points[order[w - 1]][m]) / span;
        }
    }
    d
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveEntry {
    /// Relaxed decision vector.
    pub x: Vec<f64>,
    pub point: ObjectivePoint,
}

/// Mutually non-dominated solutions, at most `capacity` of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoArchive {
    pub entries: Vec<ArchiveEntry>,
    pub capacity: usize,
}

impl ParetoArchive {
    pub fn new(capacity: usize) -> Self {
        Self { entries: Vec::new(), capacity: capacity.max(1) }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn objectives(&self) -> Vec<[f64; 2]> {
        self.entries.iter().map(|e| e.point.objectives()).collect()
    }

    /// Offers a candidate; returns whether it was admitted.
    ///
    /// Candidates with objectives identical to an existing entry are
    /// rejected so the archive never holds duplicates.
    pub fn insert(&mut self, x: &[f64], point: ObjectivePoint) -> bool {
        for e in &self.entries {
            if dominates(&e.point, &point) || same_point(&e.point, &point) {
                return false;
            }
        }
        self.entries.retain(|e| !dominates(&point, &e.point));
        self.entries.push(ArchiveEntry { x: x.to_vec(), point });
        if self.entries.len() > self.capacity {
            let d = crowding_distances(&self.objectives());
            let worst = (0..d.len()).fold(0, |w, i| if d[i] < d[w] { i } else { w });
            self.entries.remove(worst);
            return worst != self.entries.len();
        }
        true
    }

    /// Entries ordered by ascending cost (ties by deviation).
    pub fn sort_by_cost(&mut self) {
        self.entries
            .sort_by(|a, b| a.point.f_cost.total_cmp(&b.point.f_cost).then(a.point.v_dev.total_cmp(&b.point.v_dev)));
    }

    pub fn feasible_objectives(&self) -> Vec<[f64; 2]> {
        self.entries.iter().filter(|e| e.point.feasible).map(|e| e.point.objectives()).collect()
    }

    /// Lowest-cost feasible entry.
    pub fn min_cost(&self) -> Option<&ArchiveEntry> {
        self.entries.iter().filter(|e| e.point.feasible).min_by(|a, b| a.point.f_cost.total_cmp(&b.point.f_cost))
    }
}

fn same_point(a: &ObjectivePoint, b: &ObjectivePoint) -> bool {
    a.f_cost == b.f_cost && a.v_dev == b.v_dev && a.violation == b.violation
}

/// Functional form of [`ParetoArchive::insert`].
pub fn update_archive(mut archive: ParetoArchive, x: &[f64], point: ObjectivePoint) -> ParetoArchive {
    archive.insert(x, point);
    archive
}
