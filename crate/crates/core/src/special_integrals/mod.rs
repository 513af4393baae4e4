//! Oscillatory integrals `∫ e^{-itρ} ρ^{-1+ib} dρ`, their closed forms and
//! the bound envelopes they are compared against.

mod engine;
mod envelopes;
mod gamma;
mod sweeps;

pub use engine::{sin_over_x, sine_integral, QuadratureOptions, TailMethod};
pub use envelopes::{c1, c3, c4, h_constant, hyperbolic_ratio, power_envelope, Envelope};
pub use gamma::{
    euler_product, gamma_complex, gamma_imag_abs, gamma_imag_abs_weierstrass, gamma_imag_weierstrass,
    EULER_GAMMA, PRODUCT_TERMS,
};
pub use sweeps::{bound_sweep, BoundKind, SweepGrid, SweepPoint, SweepReport};

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Integration range for [`IntegralSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Range {
    /// The whole line; principal value at the origin when `b = 0`.
    FullLinePv,
    /// `[a, ∞)` with `a ≥ 0`.
    HalfLine { a: f64 },
    /// `(-∞, -a]` with `a ≥ 0`.
    NegHalfLine { a: f64 },
    /// `ε ≤ |ρ| ≤ M`.
    Annulus { eps: f64, m: f64 },
    /// `[c, d]`, possibly containing the origin.
    Finite { c: f64, d: f64 },
}

impl Range {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Range::FullLinePv => Ok(()),
            Range::HalfLine { a } | Range::NegHalfLine { a } => {
                if a >= 0.0 && a.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Precondition(format!("half-line needs finite a >= 0, got {a}")))
                }
            }
            Range::Annulus { eps, m } => {
                if eps > 0.0 && m > eps && m.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Precondition(format!("annulus needs 0 < eps < M, got ({eps}, {m})")))
                }
            }
            Range::Finite { c, d } => {
                if c < d && c.is_finite() && d.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Precondition(format!("finite range needs c < d, got [{c}, {d}]")))
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralSpec {
    pub t: f64,
    pub b: f64,
    pub range: Range,
}

impl IntegralSpec {
    pub fn new(t: f64, b: f64, range: Range) -> Self {
        Self { t, b, range }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureReport {
    pub value: Complex64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Integrate `spec` to absolute tolerance `tol`.
pub fn oscillatory_quadrature(spec: &IntegralSpec, tol: f64) -> Result<QuadratureReport> {
    engine::evaluate(spec, &QuadratureOptions::new(tol))
}

/// As [`oscillatory_quadrature`] with explicit options.
pub fn oscillatory_quadrature_with(spec: &IntegralSpec, opts: &QuadratureOptions) -> Result<QuadratureReport> {
    engine::evaluate(spec, opts)
}

/// Full-line value `C0(b)` of `∫ e^{-itρ} ρ^{-1+ib} dρ`.
///
/// For `b = 0` the principal value is `-iπ sgn t`: the cosine part is odd and
/// `∫ sin(tρ)/ρ dρ = π sgn t` enters with the factor `-i`.
pub fn pv_integral_closed_form(t: f64, b: f64) -> Complex64 {
    if t == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    if b == 0.0 {
        return Complex64::new(0.0, -PI * t.signum());
    }
    if t < 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let g = gamma_complex(Complex64::new(0.0, b));
    let t_pow = Complex64::from_polar(1.0, -b * t.ln());
    let factor = (0.5 * b * PI).exp() - (-1.5 * b * PI).exp();
    t_pow * g * factor
}

/// `|C0(b)|`: `π` for `b = 0, t ≠ 0`, `(2π(1 - e^{-2πb})/b)^{1/2}` for
/// `t > 0, b ≠ 0`, zero otherwise.
pub fn pv_integral_modulus(t: f64, b: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    if b == 0.0 {
        return PI;
    }
    if t < 0.0 {
        return 0.0;
    }
    (2.0 * PI * (-(-2.0 * PI * b).exp_m1()) / b).sqrt()
}

/// Unit-scale Abel-regularized ranges with elementary values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnitRange {
    /// `∫_0^1 ρ^{-1+ib} dρ`
    UnitInterval,
    /// `∫_{-1}^0 ρ^{-1+ib} dρ`
    NegativeUnit,
    /// `∫_1^∞ ρ^{-1+ib} dρ`
    Tail,
    /// `∫_{-∞}^{-1} ρ^{-1+ib} dρ`
    NegativeTail,
}

impl UnitRange {
    pub const ALL: [UnitRange; 4] = [
        UnitRange::UnitInterval,
        UnitRange::NegativeUnit,
        UnitRange::Tail,
        UnitRange::NegativeTail,
    ];

    /// The same range as an [`IntegralSpec`] at `t = 0`.
    pub fn spec(self, b: f64) -> IntegralSpec {
        let range = match self {
            UnitRange::UnitInterval => Range::Finite { c: 0.0, d: 1.0 },
            UnitRange::NegativeUnit => Range::Finite { c: -1.0, d: 0.0 },
            UnitRange::Tail => Range::HalfLine { a: 1.0 },
            UnitRange::NegativeTail => Range::NegHalfLine { a: 1.0 },
        };
        IntegralSpec::new(0.0, b, range)
    }
}

pub fn finite_closed_forms(b: f64, which: UnitRange) -> Result<Complex64> {
    if b == 0.0 {
        return Err(Error::Domain("closed forms need b != 0".into()));
    }
    let e = (-PI * b).exp();
    Ok(match which {
        UnitRange::UnitInterval => Complex64::new(0.0, -1.0 / b),
        UnitRange::NegativeUnit => Complex64::new(0.0, e / b),
        UnitRange::Tail => Complex64::new(0.0, 1.0 / b),
        UnitRange::NegativeTail => Complex64::new(0.0, -e / b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(t: f64, b: f64, range: Range, tol: f64) -> QuadratureReport {
        oscillatory_quadrature(&IntegralSpec::new(t, b, range), tol).unwrap()
    }

    #[test]
    fn closed_form_cases() {
        assert_eq!(pv_integral_closed_form(-1.0, 0.7), Complex64::new(0.0, 0.0));
        assert_eq!(pv_integral_closed_form(0.0, 0.7), Complex64::new(0.0, 0.0));
        let v = pv_integral_closed_form(2.0, 0.0);
        assert!(v.re == 0.0 && (v.im.abs() - PI).abs() < 1e-15);
        assert_eq!(v.im, -PI);
        let m = pv_integral_closed_form(1.0, 1.0).norm();
        assert!((m - (2.0 * PI * (1.0 - (-2.0 * PI).exp())).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn closed_form_phase_matches_weierstrass() {
        let b = 1.0;
        let g = gamma_imag_weierstrass(b, 200_000).unwrap();
        let expected = g * ((0.5 * b * PI).exp() - (-1.5 * b * PI).exp());
        assert!((pv_integral_closed_form(1.0, b) - expected).norm() < 1e-9);
    }

    #[test]
    fn modulus_identity() {
        for &b in &[-3.0, -0.4, 0.2, 1.0, 2.5] {
            for &t in &[0.3, 1.0, 7.0] {
                let d = pv_integral_closed_form(t, b).norm() - pv_integral_modulus(t, b);
                assert!(d.abs() < 1e-12 * pv_integral_modulus(t, b).max(1.0), "t={t} b={b}: {d}");
            }
        }
    }

    #[test]
    fn finite_forms_cancel() {
        for b in [0.3, 1.0, -2.0] {
            let s = finite_closed_forms(b, UnitRange::UnitInterval).unwrap()
                + finite_closed_forms(b, UnitRange::Tail).unwrap();
            assert!(s.norm() < 1e-15);
        }
        assert_eq!(finite_closed_forms(1.0, UnitRange::UnitInterval).unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(finite_closed_forms(1.0, UnitRange::Tail).unwrap(), Complex64::new(0.0, 1.0));
        assert!(finite_closed_forms(0.0, UnitRange::Tail).is_err());
    }

    #[test]
    fn quadrature_matches_full_line_closed_form() {
        for &(t, b) in &[(1.0, 1.0), (2.0, -0.5), (-1.0, 0.7), (0.5, 0.0), (-2.0, 0.0), (3.0, 2.0)] {
            let r = quad(t, b, Range::FullLinePv, 1e-8);
            let exact = pv_integral_closed_form(t, b);
            assert!(r.converged, "t={t} b={b}: {r:?}");
            assert!((r.value - exact).norm() < 1e-8 * exact.norm().max(1.0), "t={t} b={b}: {} vs {exact}", r.value);
        }
    }

    #[test]
    fn unit_ranges_match_closed_forms() {
        for b in [2.0, -0.7, 0.3] {
            for which in UnitRange::ALL {
                let r = oscillatory_quadrature(&which.spec(b), 1e-10).unwrap();
                let exact = finite_closed_forms(b, which).unwrap();
                assert!((r.value - exact).norm() < 1e-10, "{which:?} b={b}");
            }
        }
        let r = quad(0.0, 2.0, Range::Finite { c: 0.0, d: 1.0 }, 1e-10);
        assert!((r.value - Complex64::new(0.0, -0.5)).norm() < 1e-12);
    }

    #[test]
    fn symmetric_annulus_b0_is_imaginary() {
        let r = quad(5.0, 0.0, Range::Annulus { eps: 0.1, m: 10.0 }, 1e-10);
        assert!(r.value.re.abs() < 1e-10, "{}", r.value);
        let si = -2.0 * (sine_integral(50.0) - sine_integral(0.5));
        assert!((r.value.im - si).abs() < 1e-9);
    }

    #[test]
    fn divergent_cases_error() {
        let e = oscillatory_quadrature(&IntegralSpec::new(0.0, 0.0, Range::FullLinePv), 1e-6);
        assert!(matches!(e, Err(Error::Divergent(_))));
        let e = oscillatory_quadrature(&IntegralSpec::new(1.0, 0.0, Range::HalfLine { a: 0.0 }), 1e-6);
        assert!(matches!(e, Err(Error::Divergent(_))));
        let e = oscillatory_quadrature(&IntegralSpec::new(1.0, 0.0, Range::Annulus { eps: 2.0, m: 1.0 }), 1e-6);
        assert!(matches!(e, Err(Error::Precondition(_))));
    }

    #[test]
    fn tail_methods_agree() {
        for &(t, b, a) in &[(1.0, 0.5, 2.0), (-3.0, -1.0, 0.5), (0.7, 0.0, 1.0)] {
            let spec = IntegralSpec::new(t, b, Range::HalfLine { a });
            let asym = oscillatory_quadrature(&spec, 1e-10).unwrap();
            let mut opts = QuadratureOptions::new(1e-10);
            opts.tail = TailMethod::Accelerated;
            let acc = oscillatory_quadrature_with(&spec, &opts).unwrap();
            assert!((asym.value - acc.value).norm() < 1e-8, "{} vs {}", asym.value, acc.value);
        }
    }

    #[test]
    fn half_line_from_origin_matches_gamma() {
        // ∫_0^∞ e^{-itρ} ρ^{-1+ib} dρ = Γ(ib) t^{-ib} e^{bπ/2} for t > 0
        let (t, b) = (1.3, 0.8);
        let r = quad(t, b, Range::HalfLine { a: 0.0 }, 1e-10);
        let exact = gamma_complex(Complex64::new(0.0, b)) * Complex64::from_polar(1.0, -b * t.ln()) * (0.5 * b * PI).exp();
        assert!((r.value - exact).norm() < 1e-9);
    }

    #[test]
    fn sine_integral_limit() {
        assert!((sin_over_x(0.0, f64::INFINITY) - PI / 2.0).abs() < 1e-12);
        assert!((sine_integral(1.0) - 0.946_083_070_367_183).abs() < 1e-14);
        assert!((sine_integral(10.0) - 1.658_347_594_218_874).abs() < 1e-13);
    }
}
