//! Bus admittance matrix with sparse row storage.

use num_complex::Complex64;
use serde::Serialize;

use super::AcError;
use crate::case_model::CaseData;

/// Bus with an all-zero diagonal entry (isolated or purely series-compensated).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingularityWarning {
    pub bus: u32,
}

/// Complex admittance matrix, one sorted sparse row per AC bus (case bus order).
#[derive(Debug, Clone)]
pub struct YBus {
    rows: Vec<Vec<(usize, Complex64)>>,
    pub warnings: Vec<SingularityWarning>,
}

impl YBus {
    pub fn zeros(n: usize) -> Self {
        Self { rows: vec![Vec::new(); n], warnings: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[(usize, Complex64)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        match self.rows[i].binary_search_by_key(&j, |e| e.0) {
            Ok(k) => self.rows[i][k].1,
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn add(&mut self, i: usize, j: usize, y: Complex64) {
        let row = &mut self.rows[i];
        match row.binary_search_by_key(&j, |e| e.0) {
            Ok(k) => row[k].1 += y,
            Err(k) => row.insert(k, (j, y)),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let n = self.n();
        let mut out = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, y) in row {
                out[i][j] = y;
            }
        }
        out
    }

    fn refresh_warnings(&mut self, case: &CaseData) {
        self.warnings = (0..self.n())
            .filter(|&i| self.get(i, i) == Complex64::new(0.0, 0.0))
            .map(|i| SingularityWarning { bus: case.buses[i].id })
            .collect();
    }
}

/// Series admittance and the four two-port terms of a branch.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BranchAdmittance {
    pub yff: Complex64,
    pub yft: Complex64,
    pub ytf: Complex64,
    pub ytt: Complex64,
}

/// Off-nominal tap `tap` sits on the from-side, in series with the from terminal.
pub(crate) fn branch_admittance(r: f64, x: f64, b_charging: f64, tap: f64) -> BranchAdmittance {
    let y = Complex64::new(1.0, 0.0) / Complex64::new(r, x);
    let half_b = Complex64::new(0.0, b_charging / 2.0);
    BranchAdmittance {
        yff: (y + half_b) / (tap * tap),
        yft: -y / tap,
        ytf: -y / tap,
        ytt: y + half_b,
    }
}

/// Tap ratio of every branch (1.0 where untapped) given per-tap settings.
pub(crate) fn branch_taps(case: &CaseData, taps: &[f64]) -> Result<Vec<f64>, AcError> {
    let n_taps = case.branches.iter().filter(|b| b.tap.is_some()).count();
    if taps.len() != n_taps {
        return Err(AcError::InvalidInput(format!(
            "expected {n_taps} tap settings, got {}",
            taps.len()
        )));
    }
    let mut it = taps.iter();
    let mut out = Vec::with_capacity(case.branches.len());
    for br in &case.branches {
        match &br.tap {
            Some(t) => {
                let ratio = *it.next().unwrap();
                let slack = 1e-9 * t.step.max(1.0);
                if !(ratio >= t.ratio_min - slack && ratio <= t.ratio_max + slack) {
                    return Err(AcError::InvalidInput(format!(
                        "tap ratio {ratio} on branch {}-{} outside [{}, {}]",
                        br.from, br.to, t.ratio_min, t.ratio_max
                    )));
                }
                out.push(ratio);
            }
            None => out.push(1.0),
        }
    }
    Ok(out)
}

/// Builds the admittance matrix: branches (with line charging and from-side
/// taps), bus shunts and converter filter susceptances.
///
/// `taps` holds one ratio per tapped branch in branch order.
pub fn build_ybus(case: &CaseData, taps: &[f64]) -> Result<YBus, AcError> {
    let n = case.buses.len();
    let ratios = branch_taps(case, taps)?;
    let index = |id: u32| {
        case.bus_index(id).ok_or_else(|| AcError::InvalidInput(format!("unknown bus {id}")))
    };
    let mut y = YBus::zeros(n);
    for (br, &tap) in case.branches.iter().zip(&ratios) {
        let (f, t) = (index(br.from)?, index(br.to)?);
        let a = branch_admittance(br.r, br.x, br.b_charging, tap);
        y.add(f, f, a.yff);
        y.add(f, t, a.yft);
        y.add(t, f, a.ytf);
        y.add(t, t, a.ytt);
    }
    for (i, b) in case.buses.iter().enumerate() {
        if b.shunt_g != 0.0 || b.shunt_b != 0.0 {
            y.add(i, i, Complex64::new(b.shunt_g, b.shunt_b));
        }
    }
    for c in &case.converters {
        if c.b_filter != 0.0 {
            y.add(index(c.ac_bus)?, index(c.ac_bus)?, Complex64::new(0.0, c.b_filter));
        }
    }
    // keep every diagonal present so the Jacobian pattern is stable
    for i in 0..n {
        y.add(i, i, Complex64::new(0.0, 0.0));
    }
    y.refresh_warnings(case);
    Ok(y)
}
