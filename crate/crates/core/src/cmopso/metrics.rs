//! Front-quality indicators for bi-objective minimization.

/// Area dominated by `points` and bounded by `reference`; points not
/// strictly better than the reference in both objectives contribute nothing.
pub fn hypervolume_2d(points: &[[f64; 2]], reference: [f64; 2]) -> f64 {
    let mut pts: Vec<[f64; 2]> =
        points.iter().copied().filter(|p| p[0] < reference[0] && p[1] < reference[1]).collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut hv = 0.0;
    let mut ceiling = reference[1];
    for p in pts {
        if p[1] < ceiling {
            hv += (reference[0] - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    hv
}

/// Component-wise maximum of the given fronts, scaled by `factor`.
pub fn nadir_reference(fronts: &[&[[f64; 2]]], factor: f64) -> Option<[f64; 2]> {
    let mut nadir: Option<[f64; 2]> = None;
    for p in fronts.iter().flat_map(|f| f.iter()) {
        let n = nadir.get_or_insert(*p);
        n[0] = n[0].max(p[0]);
        n[1] = n[1].max(p[1]);
    }
    nadir.map(|n| [n[0] * factor, n[1] * factor])
}

/// Generational distance `sqrt(sum d_i^2) / N` of `points` to the sampled
/// reference front.
pub fn generational_distance(points: &[[f64; 2]], front: &[[f64; 2]]) -> f64 {
    if points.is_empty() || front.is_empty() {
        return f64::INFINITY;
    }
    let sum: f64 = points
        .iter()
        .map(|p| front.iter().map(|q| (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).fold(f64::INFINITY, f64::min))
        .sum();
    sum.sqrt() / points.len() as f64
}
