use super::pv_integral_modulus;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Right-hand sides of the integral bounds, as functions of `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Envelope {
    /// `|C0(b)|` at time `t`.
    C0 { t: f64 },
    /// `C1(b)` at time `t`.
    C1 { t: f64 },
    /// `|C2(b)|` at time `t` (`b ≠ 0`).
    C2 { t: f64 },
    /// `C3(b)` for the range `[c, d]`.
    C3 { c: f64, d: f64 },
    /// `C4(b)` for the range `[c, d]`.
    C4 { c: f64, d: f64 },
    /// `H(b)` with exponent `q`.
    H { q: f64 },
}

impl Envelope {
    pub fn value_at(&self, b: f64) -> f64 {
        match *self {
            Envelope::C0 { t } | Envelope::C2 { t } => pv_integral_modulus(t, b),
            Envelope::C1 { t } => c1(t, b),
            Envelope::C3 { c, d } => c3(b, c, d),
            Envelope::C4 { c, d } => c4(b, c, d),
            Envelope::H { q } => h_constant(b, q),
        }
    }

    /// Whether `b` lies where the envelope is defined and positive.
    pub fn in_domain(&self, b: f64) -> bool {
        match *self {
            Envelope::C0 { t } => t > 0.0 || (t != 0.0 && b == 0.0),
            Envelope::C2 { t } => t > 0.0 && b != 0.0,
            Envelope::C1 { t } => t != 0.0 || b != 0.0,
            Envelope::C3 { c, d } | Envelope::C4 { c, d } => b != 0.0 && c != d,
            Envelope::H { q } => b != 0.0 && q >= 1.0,
        }
    }
}

/// `(√|b| + 1/√|b|)² = |b| + 2 + 1/|b|`.
pub fn power_envelope(b: f64) -> f64 {
    let a = b.abs();
    a + 2.0 + 1.0 / a
}

pub fn c1(t: f64, b: f64) -> f64 {
    if b == 0.0 {
        if t == 0.0 {
            0.0
        } else {
            8.0
        }
    } else {
        (1.0 + (-PI * b).exp()) * power_envelope(b)
    }
}

fn side_factor(b: f64, c: f64, d: f64) -> f64 {
    if c > 0.0 && d > 0.0 {
        1.0
    } else if c < 0.0 && d < 0.0 {
        (-PI * b).exp()
    } else {
        1.0 + (-PI * b).exp()
    }
}

pub fn c3(b: f64, c: f64, d: f64) -> f64 {
    if b == 0.0 {
        return 0.0;
    }
    side_factor(b, c, d) * (1.0 + b.abs()).powi(2)
}

pub fn c4(b: f64, c: f64, d: f64) -> f64 {
    side_factor(b, c, d) * power_envelope(b)
}

/// `(e^{πb} + e^{-πb})^{1/q} (√|b| + 1/√|b|)^{2/q}`.
pub fn h_constant(b: f64, q: f64) -> f64 {
    (2.0 * (PI * b).cosh()).powf(1.0 / q) * power_envelope(b).powf(1.0 / q)
}

/// `|2x e^{-x} / (e^x - e^{-x})| = |2x / (e^{2x} - 1)|`.
pub fn hyperbolic_ratio(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    (2.0 * x / (2.0 * x).exp_m1()).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelopes_positive_on_domain() {
        let kinds = [
            Envelope::C0 { t: 1.0 },
            Envelope::C1 { t: -1.0 },
            Envelope::C2 { t: 2.0 },
            Envelope::C3 { c: -1.0, d: 2.0 },
            Envelope::C4 { c: 1.0, d: 2.0 },
            Envelope::H { q: 2.0 },
        ];
        for k in kinds {
            for b in [-5.0, -0.1, 0.1, 1.0, 5.0] {
                if k.in_domain(b) {
                    assert!(k.value_at(b) > 0.0, "{k:?} at {b}");
                }
            }
        }
    }

    #[test]
    fn c0_and_c2_agree() {
        for b in [-2.0, 0.5, 3.0] {
            assert_eq!(Envelope::C0 { t: 1.5 }.value_at(b), Envelope::C2 { t: 1.5 }.value_at(b));
        }
    }

    #[test]
    fn piecewise_values() {
        assert_eq!(c1(0.0, 0.0), 0.0);
        assert_eq!(c1(3.0, 0.0), 8.0);
        assert_eq!(c3(0.0, 1.0, 2.0), 0.0);
        assert_eq!(c3(1.0, 1.0, 2.0), 4.0);
        assert!((c3(1.0, -2.0, -1.0) - 4.0 * (-PI).exp()).abs() < 1e-15);
        assert!((c4(1.0, -1.0, 1.0) - 4.0 * (1.0 + (-PI).exp())).abs() < 1e-14);
    }

    #[test]
    fn hyperbolic_ratio_limit_and_bound() {
        assert!((hyperbolic_ratio(1e-9) - 1.0).abs() < 1e-8);
        for x in [-30.0, -2.0, -0.1, 0.1, 5.0, 700.0] {
            assert!(hyperbolic_ratio(x) <= 2.0 * f64::abs(x) + 1.0);
        }
    }
}
