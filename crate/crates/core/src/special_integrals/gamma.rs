//! Gamma function on the imaginary axis.

use crate::error::{Error, Result};
use crate::quadrature::CompensatedSum;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Default truncation of the infinite products.
pub const PRODUCT_TERMS: usize = 1_000_000;

/// `|Γ(ib)| = (π / (b sinh πb))^{1/2}`, evaluated in log form so large `|b|`
/// does not overflow.
pub fn gamma_imag_abs(b: f64) -> Result<f64> {
    if b == 0.0 || !b.is_finite() {
        return Err(Error::Domain(format!("Gamma(ib) has a pole at b = {b}")));
    }
    let x = PI * b.abs();
    // ln sinh x = x + ln(1 - e^{-2x}) - ln 2
    let ln_sinh = x + (-(-2.0 * x).exp()).ln_1p() - std::f64::consts::LN_2;
    Ok((0.5 * (PI.ln() - b.abs().ln() - ln_sinh)).exp())
}

/// `Π_{n ≤ terms} (1 + b²/n²)` times an Euler-Maclaurin estimate of the
/// omitted factors. Tends to `sinh(πb)/(πb)`.
pub fn euler_product(b: f64, terms: usize) -> f64 {
    log_euler_product(b, terms).exp()
}

fn log_euler_product(b: f64, terms: usize) -> f64 {
    let b2 = b * b;
    let mut acc = CompensatedSum::new();
    for n in 1..=terms {
        let nf = n as f64;
        acc.add((b2 / (nf * nf)).ln_1p());
    }
    acc.add(log_product_tail(b, terms as f64));
    acc.value()
}

// Σ_{n>N} ln(1 + b²/n²) by Euler-Maclaurin about x = N.
fn log_product_tail(b: f64, n: f64) -> f64 {
    let b2 = b * b;
    let integral = 2.0 * b.abs() * (b.abs() / n).atan() - n * (b2 / (n * n)).ln_1p();
    let g = (b2 / (n * n)).ln_1p();
    let dg = -2.0 * b2 / (n * (n * n + b2));
    integral - 0.5 * g - dg / 12.0
}

/// `|Γ(ib)|` from the truncated Weierstrass product
/// `|1/Γ(ib)| = |b| Π (1 + b²/n²)^{1/2}` with tail correction.
pub fn gamma_imag_abs_weierstrass(b: f64, terms: usize) -> Result<f64> {
    if b == 0.0 || !b.is_finite() {
        return Err(Error::Domain(format!("Gamma(ib) has a pole at b = {b}")));
    }
    Ok((-b.abs().ln() - 0.5 * log_euler_product(b, terms)).exp())
}

/// Complex `Γ(ib)` from the Weierstrass product
/// `1/Γ(z) = z e^{γz} Π (1 + z/n) e^{-z/n}` truncated at `terms`.
pub fn gamma_imag_weierstrass(b: f64, terms: usize) -> Result<Complex64> {
    if b == 0.0 || !b.is_finite() {
        return Err(Error::Domain(format!("Gamma(ib) has a pole at b = {b}")));
    }
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for n in 1..=terms {
        let w = b / n as f64;
        // ln(1 + iw) - iw
        re.add(0.5 * (w * w).ln_1p());
        im.add(w.atan() - w);
    }
    // Σ_{n>N} [ln(1+z/n) - z/n] ≈ ∫_N^∞ g - g(N)/2 - g'(N)/12
    let z = Complex64::new(0.0, b);
    let nf = terms as f64;
    let zn = z / nf;
    let ln1p_zn = Complex64::new(0.5 * (zn.norm_sqr() + 2.0 * zn.re).ln_1p(), zn.im.atan2(1.0 + zn.re));
    let g = ln1p_zn - zn;
    let integral = z - (nf + z) * ln1p_zn;
    let dg = z * z / (nf * nf * (nf + z));
    let tail = integral - g * 0.5 - dg / 12.0;
    let log_inv = z.ln() + z * EULER_GAMMA + Complex64::new(re.value(), im.value()) + tail;
    Ok((-log_inv).exp())
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Complex Gamma by the Lanczos approximation with reflection.
pub fn gamma_complex(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return Complex64::new(PI, 0.0) / (s * gamma_complex(Complex64::new(1.0, 0.0) - z));
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x += *c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * ((z + 0.5) * t.ln() - t).exp() * x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_value_at_one() {
        let g = gamma_imag_abs(1.0).unwrap();
        assert!((g - 0.521_564).abs() < 1e-6, "{g}");
        assert!((g - (PI / PI.sinh()).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn even_in_b() {
        for b in [0.1, 0.7, 3.0, 40.0] {
            assert_eq!(gamma_imag_abs(b).unwrap(), gamma_imag_abs(-b).unwrap());
        }
    }

    #[test]
    fn pole_is_domain_error() {
        assert!(matches!(gamma_imag_abs(0.0), Err(Error::Domain(_))));
        assert!(gamma_imag_weierstrass(0.0, 10).is_err());
    }

    #[test]
    fn weierstrass_modulus_agrees() {
        for b in [0.1, 0.5, 1.0, 2.0, 5.0] {
            let exact = gamma_imag_abs(b).unwrap();
            let w = gamma_imag_abs_weierstrass(b, 100_000).unwrap();
            assert!((w / exact - 1.0).abs() < 1e-9, "b={b}: {w} vs {exact}");
        }
    }

    #[test]
    fn euler_product_matches_sinh() {
        for b in [0.3, 1.0, 4.0] {
            let p = euler_product(b, 50_000);
            let exact = (PI * b).sinh() / (PI * b);
            assert!((p / exact - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn complex_weierstrass_matches_lanczos() {
        for b in [0.25, 1.0, 3.0, -2.0] {
            let w = gamma_imag_weierstrass(b, 100_000).unwrap();
            let l = gamma_complex(Complex64::new(0.0, b));
            assert!((w / l - 1.0).norm() < 1e-9, "b={b}: {w} vs {l}");
        }
    }

    #[test]
    fn lanczos_on_real_axis() {
        assert!((gamma_complex(Complex64::new(5.0, 0.0)).re - 24.0).abs() < 1e-12);
        assert!((gamma_complex(Complex64::new(0.5, 0.0)).re - PI.sqrt()).abs() < 1e-13);
    }
}
