//! Steady-state converter equations: coupling-branch powers, losses and the
//! P-Q capability region.

use num_complex::Complex64;
use serde::Serialize;

use super::DcError;
use crate::case_model::{Converter, PqCircle};

/// Powers at both ends of the converter coupling branch.
///
/// `p_s`, `q_s` leave the AC bus into the branch; `p_c`, `q_c` leave the
/// converter into the branch (toward the AC side). Their sum is the branch
/// loss: `p_s + p_c = |I|^2 r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConverterPowers {
    pub p_s: f64,
    pub q_s: f64,
    pub p_c: f64,
    pub q_c: f64,
}

/// Coupling-branch powers from terminal and converter voltage phasors, with
/// `g + jb = 1/(r + jx)` the coupling admittance.
pub fn converter_powers(u_s: f64, delta_s: f64, u_c: f64, delta_c: f64, g: f64, b: f64) -> ConverterPowers {
    let (sin, cos) = (delta_s - delta_c).sin_cos();
    let uu = u_s * u_c;
    ConverterPowers {
        p_s: u_s * u_s * g - uu * (g * cos + b * sin),
        q_s: -u_s * u_s * b - uu * (g * sin - b * cos),
        p_c: u_c * u_c * g - uu * (g * cos - b * sin),
        q_c: -u_c * u_c * b + uu * (g * sin + b * cos),
    }
}

/// Converter current and loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConverterLoss {
    pub i_c: f64,
    pub p_loss: f64,
}

/// `i_c = |S_c| / (sqrt(3) u_c)`, `p_loss = a + b i_c + c i_c^2`.
pub fn converter_loss(p_c: f64, q_c: f64, u_c: f64, a: f64, b: f64, c: f64) -> Result<ConverterLoss, DcError> {
    if !(u_c > 0.0) {
        return Err(DcError::Domain(format!("converter voltage must be positive, got {u_c}")));
    }
    let i_c = p_c.hypot(q_c) / (3f64.sqrt() * u_c);
    Ok(ConverterLoss { i_c, p_loss: a + b * i_c + c * i_c * i_c })
}

/// Full operating point of one converter.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ConverterState {
    pub p_s: f64,
    pub q_s: f64,
    pub p_c: f64,
    pub q_c: f64,
    pub u_s: f64,
    pub delta_s: f64,
    pub u_c: f64,
    pub delta_c: f64,
    pub i_c: f64,
    pub p_loss: f64,
    /// Power injected into the DC grid.
    pub p_dc: f64,
    pub u_dc: f64,
    /// Current injected into the DC grid.
    pub i_dc: f64,
}

impl ConverterState {
    /// Resolves the converter from its AC terminal phasor and AC-side powers;
    /// the DC injection follows from the power balance `p_c + p_dc + p_loss = 0`.
    /// DC voltage and current are left at zero.
    pub fn from_ac_side(conv: &Converter, terminal: Complex64, p_s: f64, q_s: f64) -> Result<Self, DcError> {
        if !(terminal.norm() > 0.0) {
            return Err(DcError::Domain("AC terminal voltage must be positive".into()));
        }
        let z = Complex64::new(conv.r_xfmr, conv.x_xfmr);
        let current = (Complex64::new(p_s, q_s) / terminal).conj();
        let internal = terminal - current * z;
        let y = Complex64::new(1.0, 0.0) / z;
        let (u_s, delta_s) = terminal.to_polar();
        let (u_c, delta_c) = internal.to_polar();
        let pw = converter_powers(u_s, delta_s, u_c, delta_c, y.re, y.im);
        let loss = converter_loss(pw.p_c, pw.q_c, u_c, conv.loss_a, conv.loss_b, conv.loss_c)?;
        Ok(Self {
            p_s,
            q_s,
            p_c: pw.p_c,
            q_c: pw.q_c,
            u_s,
            delta_s,
            u_c,
            delta_c,
            i_c: loss.i_c,
            p_loss: loss.p_loss,
            p_dc: -pw.p_c - loss.p_loss,
            u_dc: 0.0,
            i_dc: 0.0,
        })
    }

    /// Residual of the converter power balance.
    pub fn balance_residual(&self) -> f64 {
        self.p_c + self.p_dc + self.p_loss
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Capability {
    Inside,
    BelowMin { deficit: f64 },
    AboveMax { excess: f64 },
}

/// Classifies `(p_s, q_s)` against the annulus `r_min <= |(p, q) - (p0, q0)| <= r_max`.
pub fn check_pq_capability(p_s: f64, q_s: f64, circle: &PqCircle) -> Capability {
    let r2 = (p_s - circle.p0).powi(2) + (q_s - circle.q0).powi(2);
    if r2 > circle.r_max * circle.r_max {
        Capability::AboveMax { excess: r2.sqrt() - circle.r_max }
    } else if r2 < circle.r_min * circle.r_min {
        Capability::BelowMin { deficit: circle.r_min - r2.sqrt() }
    } else {
        Capability::Inside
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::case_model::shipped_case;
    use proptest::prelude::*;

    fn admittance(r: f64, x: f64) -> (f64, f64) {
        let y = Complex64::new(1.0, 0.0) / Complex64::new(r, x);
        (y.re, y.im)
    }

    /// Complex-power oracle on the coupling branch.
    fn oracle(us: Complex64, uc: Complex64, r: f64, x: f64) -> (Complex64, Complex64) {
        let y = Complex64::new(1.0, 0.0) / Complex64::new(r, x);
        let i_sc = (us - uc) * y;
        (us * i_sc.conj(), uc * (-i_sc).conj())
    }

    #[test]
    fn identical_phasors_carry_no_power() {
        let (g, b) = admittance(0.0015, 0.1121);
        let p = converter_powers(1.0, 0.2, 1.0, 0.2, g, b);
        for v in [p.p_s, p.q_s, p.p_c, p.q_c] {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn matches_complex_oracle_at_reference_point() {
        let (r, x) = (0.0015, 0.1121);
        let (g, b) = admittance(r, x);
        let p = converter_powers(1.0, 0.0, 1.0, -0.05, g, b);
        let (ss, sc) = oracle(Complex64::from_polar(1.0, 0.0), Complex64::from_polar(1.0, -0.05), r, x);
        assert!((p.p_s - ss.re).abs() < 1e-10);
        assert!((p.q_s - ss.im).abs() < 1e-10);
        assert!((p.p_c - sc.re).abs() < 1e-10);
        assert!((p.q_c - sc.im).abs() < 1e-10);
        // the AC terminal leads, so power flows into the converter
        assert!(p.p_s > 0.0);
    }

    #[test]
    fn lossless_branch_conserves_active_power() {
        let (g, b) = admittance(0.0, 0.15);
        assert_eq!(g, 0.0);
        let p = converter_powers(1.02, 0.1, 0.97, -0.3, g, b);
        assert_eq!(p.p_s, -p.p_c);
    }

    #[test]
    fn no_load_loss() {
        let l = converter_loss(0.0, 0.0, 1.0, 11.033e-3, 3.464e-3, 5.534e-3).unwrap();
        assert_eq!(l.p_loss, 0.011033);
        assert_eq!(l.i_c, 0.0);
    }

    #[test]
    fn unit_current_loss() {
        let l = converter_loss(3f64.sqrt(), 0.0, 1.0, 11.033e-3, 3.464e-3, 5.534e-3).unwrap();
        assert!((l.i_c - 1.0).abs() < 1e-15);
        assert!((l.p_loss - 0.020031).abs() < 1e-15);
    }

    #[test]
    fn higher_converter_voltage_lowers_loss() {
        let a = converter_loss(0.6, 0.2, 1.0, 11.033e-3, 3.464e-3, 5.534e-3).unwrap();
        let b = converter_loss(0.6, 0.2, 2.0, 11.033e-3, 3.464e-3, 5.534e-3).unwrap();
        assert!((b.i_c - a.i_c / 2.0).abs() < 1e-15);
        assert!(b.p_loss < a.p_loss);
    }

    #[test]
    fn loss_rejects_non_positive_voltage() {
        assert!(matches!(converter_loss(0.1, 0.0, 0.0, 0.01, 0.0, 0.0), Err(DcError::Domain(_))));
    }

    #[test]
    fn capability_classes() {
        let unit = PqCircle { p0: 0.0, q0: 0.0, r_min: 0.0, r_max: 1.0 };
        assert_eq!(check_pq_capability(0.0, 0.0, &unit), Capability::Inside);
        match check_pq_capability(0.9, 0.9, &unit) {
            Capability::AboveMax { excess } => assert!((excess - (1.62f64.sqrt() - 1.0)).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        let ring = PqCircle { r_min: 0.2, ..unit };
        match check_pq_capability(0.1, 0.0, &ring) {
            Capability::BelowMin { deficit } => assert!((deficit - 0.1).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn state_from_ac_side_reproduces_set_points() {
        let case = shipped_case("case14_2t").unwrap();
        let conv = &case.converters[0];
        let st = ConverterState::from_ac_side(conv, Complex64::from_polar(1.01, -0.18), -0.492, 0.116).unwrap();
        let (g, b) = admittance(conv.r_xfmr, conv.x_xfmr);
        let p = converter_powers(st.u_s, st.delta_s, st.u_c, st.delta_c, g, b);
        assert!((p.p_s + 0.492).abs() < 1e-12);
        assert!((p.q_s - 0.116).abs() < 1e-12);
        assert!(st.balance_residual().abs() < 1e-15);
        // inverter mode: the DC grid feeds the AC bus
        assert!(st.p_dc < 0.0);
    }

    proptest! {
        #[test]
        fn powers_match_oracle_and_conserve(
            us in 0.8..1.2f64, ds in -0.5..0.5f64, uc in 0.8..1.2f64, dc in -0.5..0.5f64,
            r in 0.0..0.01f64, x in 0.05..0.2f64,
        ) {
            let (g, b) = admittance(r, x);
            let p = converter_powers(us, ds, uc, dc, g, b);
            let (s_us, s_uc) = (Complex64::from_polar(us, ds), Complex64::from_polar(uc, dc));
            let (ss, sc) = oracle(s_us, s_uc, r, x);
            prop_assert!((p.p_s - ss.re).abs() < 1e-10);
            prop_assert!((p.q_s - ss.im).abs() < 1e-10);
            prop_assert!((p.p_c - sc.re).abs() < 1e-10);
            prop_assert!((p.q_c - sc.im).abs() < 1e-10);
            let i = (s_us - s_uc) / Complex64::new(r, x);
            prop_assert!((p.p_s + p.p_c - i.norm_sqr() * r).abs() < 1e-10);
        }

        #[test]
        fn loss_is_at_least_no_load(p in -2.0..2.0f64, q in -2.0..2.0f64, u in 0.5..1.5f64) {
            let l = converter_loss(p, q, u, 11.033e-3, 3.464e-3, 5.534e-3).unwrap();
            prop_assert!(l.i_c >= 0.0);
            prop_assert!(l.p_loss >= 11.033e-3);
        }
    }
}
