//! Polar Newton-Raphson equations: power mismatch and its Jacobian.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::YBus;

/// Unknowns `x = [theta(non-slack), |V|(PQ)]`, equations `[P(non-slack), Q(PQ)]`.
///
/// [`mismatch`](Self::mismatch) is `specified - calculated`; the Jacobian is the
/// derivative of the *calculated* injections, so `d(mismatch)/dx = -J`.
#[derive(Debug, Clone)]
pub struct NewtonSystem {
    pub ybus: YBus,
    pub p_spec: Vec<f64>,
    pub q_spec: Vec<f64>,
    /// Buses with an angle unknown (all but the slack), ascending.
    pub pvpq: Vec<usize>,
    /// Buses with a magnitude unknown, ascending.
    pub pq: Vec<usize>,
    theta_col: Vec<Option<usize>>,
    v_col: Vec<Option<usize>>,
}

impl NewtonSystem {
    pub fn new(ybus: YBus, p_spec: Vec<f64>, q_spec: Vec<f64>, pvpq: Vec<usize>, pq: Vec<usize>) -> Self {
        let n = ybus.n();
        let mut theta_col = vec![None; n];
        let mut v_col = vec![None; n];
        for (k, &i) in pvpq.iter().enumerate() {
            theta_col[i] = Some(k);
        }
        for (k, &i) in pq.iter().enumerate() {
            v_col[i] = Some(pvpq.len() + k);
        }
        Self { ybus, p_spec, q_spec, pvpq, pq, theta_col, v_col }
    }

    pub fn dim(&self) -> usize {
        self.pvpq.len() + self.pq.len()
    }

    /// Net complex power injected into the network at every bus.
    pub fn injections(&self, v: &[f64], theta: &[f64]) -> Vec<Complex64> {
        let u = phasors(v, theta);
        (0..self.ybus.n())
            .map(|i| {
                let current: Complex64 = self.ybus.row(i).iter().map(|&(j, y)| y * u[j]).sum();
                u[i] * current.conj()
            })
            .collect()
    }

    pub fn mismatch(&self, v: &[f64], theta: &[f64]) -> Vec<f64> {
        let s = self.injections(v, theta);
        let mut f = Vec::with_capacity(self.dim());
        f.extend(self.pvpq.iter().map(|&i| self.p_spec[i] - s[i].re));
        f.extend(self.pq.iter().map(|&i| self.q_spec[i] - s[i].im));
        f
    }

    pub fn unknowns(&self, v: &[f64], theta: &[f64]) -> Vec<f64> {
        self.pvpq.iter().map(|&i| theta[i]).chain(self.pq.iter().map(|&i| v[i])).collect()
    }

    pub fn set_unknowns(&self, x: &[f64], v: &mut [f64], theta: &mut [f64]) {
        for (k, &i) in self.pvpq.iter().enumerate() {
            theta[i] = x[k];
        }
        for (k, &i) in self.pq.iter().enumerate() {
            v[i] = x[self.pvpq.len() + k];
        }
    }

    /// Jacobian entries `(row, col, value)` of the calculated injections.
    pub fn jacobian_triplets(&self, v: &[f64], theta: &[f64]) -> Vec<(usize, usize, f64)> {
        let u = phasors(v, theta);
        let n = self.ybus.n();
        let current: Vec<Complex64> = (0..n)
            .map(|i| self.ybus.row(i).iter().map(|&(j, y)| y * u[j]).sum())
            .collect();
        let mut out = Vec::with_capacity(4 * n * 4);
        let mut emit = |eq_p: Option<usize>, eq_q: Option<usize>, col: usize, ds: Complex64| {
            if let Some(r) = eq_p {
                out.push((r, col, ds.re));
            }
            if let Some(r) = eq_q {
                out.push((r, col, ds.im));
            }
        };
        let j = Complex64::new(0.0, 1.0);
        for i in 0..n {
            let eq_p = self.theta_col[i];
            let eq_q = self.v_col[i];
            if eq_p.is_none() && eq_q.is_none() {
                continue;
            }
            let un_i = u[i] / v[i];
            for &(k, y) in self.ybus.row(i) {
                let un_k = u[k] / v[k];
                let diag = i == k;
                if let Some(col) = self.theta_col[k] {
                    // dS_i/dtheta_k = j U_i conj(delta_ik I_i - Y_ik U_k)
                    let mut a = -(y * u[k]);
                    if diag {
                        a += current[i];
                    }
                    emit(eq_p, eq_q, col, j * u[i] * a.conj());
                }
                if let Some(col) = self.v_col[k] {
                    // dS_i/d|V_k| = U_i conj(Y_ik U_k/|V_k|) + delta_ik conj(I_i) U_i/|V_i|
                    let mut ds = u[i] * (y * un_k).conj();
                    if diag {
                        ds += current[i].conj() * un_i;
                    }
                    emit(eq_p, eq_q, col, ds);
                }
            }
        }
        out
    }

    pub fn jacobian_dense(&self, v: &[f64], theta: &[f64]) -> DMatrix<f64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for (r, c, x) in self.jacobian_triplets(v, theta) {
            m[(r, c)] += x;
        }
        m
    }
}

pub(crate) fn phasors(v: &[f64], theta: &[f64]) -> Vec<Complex64> {
    v.iter().zip(theta).map(|(&m, &a)| Complex64::from_polar(m, a)).collect()
}

/// Systems up to this size are factored densely.
const DENSE_LIMIT: usize = 80;

/// Solves `J dx = rhs` from Jacobian triplets; `None` if singular.
///
/// Large systems are factored sparsely; the fill-reducing ordering depends
/// only on the pattern, so it is computed on the first solve and reused.
#[derive(Debug, Default)]
pub(crate) struct LinearSolver {
    ordering: Option<rsparse::data::Symb>,
}

impl LinearSolver {
    pub fn solve(&mut self, dim: usize, triplets: &[(usize, usize, f64)], rhs: &[f64]) -> Option<Vec<f64>> {
        if dim == 0 {
            return Some(Vec::new());
        }
        let x = if dim <= DENSE_LIMIT {
            let mut m = DMatrix::zeros(dim, dim);
            for &(r, c, x) in triplets {
                m[(r, c)] += x;
            }
            m.lu().solve(&DVector::from_column_slice(rhs))?.as_slice().to_vec()
        } else {
            let mut t = rsparse::data::Trpl::new();
            for &(r, c, x) in triplets {
                t.append(r, c, x);
            }
            // pattern entries are unique, so no duplicate summation is needed
            t.m = dim;
            t.n = dim;
            let a = t.to_sprs();
            // symmetric (A + A') minimum-degree ordering suits the Newton pattern
            let mut symb = self.ordering.get_or_insert_with(|| rsparse::sqr(&a, 0, false)).clone();
            let f = rsparse::lu(&a, &mut symb, 1.0).ok()?;
            let pinv = f.pinv.as_ref()?;
            let mut y = vec![0.0; dim];
            for k in 0..dim {
                y[pinv[k] as usize] = rhs[k];
            }
            rsparse::lsolve(&f.l, &mut y);
            rsparse::usolve(&f.u, &mut y);
            match &symb.q {
                Some(q) => {
                    let mut x = vec![0.0; dim];
                    for k in 0..dim {
                        x[q[k] as usize] = y[k];
                    }
                    x
                }
                None => y,
            }
        };
        x.iter().all(|v| v.is_finite()).then_some(x)
    }
}
