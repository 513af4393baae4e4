//! Free propagator kernels for e^{-itP(D)} and their decay.

mod contour;
mod decay;
mod strichartz;

pub use contour::{boussinesq_phase, PhaseIntegrand};
pub use decay::{decay_fit, sup_kernel, DecayFit};
pub use strichartz::{single_function_strichartz, StrichartzLine};

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Dispersion symbol `P(ξ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Symbol {
    /// `|ξ|²`
    Elliptic,
    /// `Σ_{j≤k} ξ_j² − Σ_{j>k} ξ_j²`
    NonElliptic { k: usize },
    /// `ξ √(1+ξ²)`, one dimension only.
    Boussinesq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeometryKind {
    /// ℝ^d; discretized on a large periodic box.
    Euclidean,
    /// 𝕋^d = [0, 2π)^d.
    Torus,
    /// Radial functions on the unit ball of ℝ³ with Dirichlet condition.
    BallRadial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagatorSpec {
    pub symbol: Symbol,
    pub dim: usize,
    pub geometry: GeometryKind,
    /// Frequency cutoff `N`: modes with `max_j |k_j| ≤ N` (torus, box) or
    /// `m ≤ N` (ball).
    #[serde(default)]
    pub cutoff: Option<usize>,
}

impl PropagatorSpec {
    pub fn elliptic(dim: usize) -> Self {
        Self {
            symbol: Symbol::Elliptic,
            dim,
            geometry: GeometryKind::Euclidean,
            cutoff: None,
        }
    }

    pub fn non_elliptic(dim: usize, k: usize) -> Self {
        Self {
            symbol: Symbol::NonElliptic { k },
            ..Self::elliptic(dim)
        }
    }

    pub fn boussinesq() -> Self {
        Self {
            symbol: Symbol::Boussinesq,
            ..Self::elliptic(1)
        }
    }

    pub fn torus(symbol: Symbol, dim: usize, cutoff: usize) -> Self {
        Self {
            symbol,
            dim,
            geometry: GeometryKind::Torus,
            cutoff: Some(cutoff),
        }
    }

    pub fn ball(cutoff: usize) -> Self {
        Self {
            symbol: Symbol::Elliptic,
            dim: 3,
            geometry: GeometryKind::BallRadial,
            cutoff: Some(cutoff),
        }
    }

    pub fn with_geometry(mut self, geometry: GeometryKind) -> Self {
        self.geometry = geometry;
        self
    }

    pub fn with_cutoff(mut self, cutoff: Option<usize>) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Precondition("dimension must be positive".into()));
        }
        match self.symbol {
            Symbol::NonElliptic { k } if k < 1 || k > self.dim => {
                return Err(Error::Precondition(format!(
                    "signature k = {k} outside 1..={}",
                    self.dim
                )))
            }
            Symbol::Boussinesq if self.dim != 1 => {
                return Err(Error::Precondition("the Boussinesq symbol is one-dimensional".into()))
            }
            _ => {}
        }
        if self.geometry == GeometryKind::BallRadial && (self.dim != 3 || self.symbol != Symbol::Elliptic) {
            return Err(Error::Precondition(
                "ball-radial geometry needs d = 3 and the Laplacian".into(),
            ));
        }
        if self.cutoff == Some(0) {
            return Err(Error::Precondition("cutoff must be positive".into()));
        }
        Ok(())
    }

    /// `P(ξ)` at a real frequency vector.
    pub fn symbol_value(&self, xi: &[f64]) -> f64 {
        match self.symbol {
            Symbol::Elliptic => xi.iter().map(|v| v * v).sum(),
            Symbol::NonElliptic { k } => xi
                .iter()
                .enumerate()
                .map(|(j, v)| if j < k { v * v } else { -v * v })
                .sum(),
            Symbol::Boussinesq => boussinesq_phase(xi[0]),
        }
    }

    /// Sign of each quadratic term (all `+1` for the Laplacian).
    fn signs(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|j| match self.symbol {
                Symbol::NonElliptic { k } if j >= k => -1.0,
                _ => 1.0,
            })
            .collect()
    }
}

/// Kernel `K(t, x)` of `e^{-itP(D)}`.
///
/// On ℝ^d this is `(2π)^{-d/2} ∫ e^{-itP(ξ)} e^{ix·ξ} dξ`; on 𝕋^d it is
/// `(4π²)^{-1} Σ_{k ∈ S_{d,N}} e^{i(x·k − tP(k))}`; for the ball it is the
/// radial kernel against the origin, `Σ_{m≤N} e^{-it(mπ)²} e_m(r) e_m(0)` with
/// `r = |x|`.
pub fn kernel_value(spec: &PropagatorSpec, t: f64, x: &[f64]) -> Result<Complex64> {
    spec.validate()?;
    if x.len() != spec.dim && spec.geometry != GeometryKind::BallRadial {
        return Err(Error::GeometryMismatch(format!(
            "point has {} coordinates, spec has d = {}",
            x.len(),
            spec.dim
        )));
    }
    match spec.geometry {
        GeometryKind::Euclidean => {
            if t == 0.0 {
                return Err(Error::SingularKernel("continuous kernel at t = 0 is a Dirac mass".into()));
            }
            match spec.symbol {
                Symbol::Boussinesq => {
                    let integral = contour::boussinesq_kernel_integral(t, x[0], 1e-10)?;
                    Ok(integral / (2.0 * PI).sqrt())
                }
                _ => Ok(fresnel_kernel(&spec.signs(), t, x)),
            }
        }
        GeometryKind::Torus => {
            let n = spec
                .cutoff
                .ok_or_else(|| Error::Precondition("torus kernel needs a finite cutoff".into()))?;
            Ok(torus_kernel(spec, n, t, x))
        }
        GeometryKind::BallRadial => {
            let n = spec
                .cutoff
                .ok_or_else(|| Error::Precondition("ball kernel needs a finite cutoff".into()))?;
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let mut acc = Complex64::new(0.0, 0.0);
            for m in 1..=n {
                let k = m as f64 * PI;
                let em_r = if r == 0.0 { k } else { (k * r).sin() / r } / (2.0 * PI).sqrt();
                let em_0 = k / (2.0 * PI).sqrt();
                acc += Complex64::from_polar(em_r * em_0, -t * k * k);
            }
            Ok(acc)
        }
    }
}

/// `(2π)^{-d/2} Π_j (π/(i s_j t))^{1/2} e^{i x_j²/(4 s_j t)}`.
fn fresnel_kernel(signs: &[f64], t: f64, x: &[f64]) -> Complex64 {
    let mut out = Complex64::new((2.0 * PI).powf(-(signs.len() as f64) / 2.0), 0.0);
    for (s, xj) in signs.iter().zip(x) {
        let a = Complex64::new(0.0, s * t);
        out *= (Complex64::new(PI, 0.0) / a).sqrt() * Complex64::from_polar(1.0, xj * xj / (4.0 * s * t));
    }
    out
}

fn torus_kernel(spec: &PropagatorSpec, n: usize, t: f64, x: &[f64]) -> Complex64 {
    let d = spec.dim;
    let side = 2 * n + 1;
    let total = side.pow(d as u32);
    let mut k = vec![0.0; d];
    let mut acc = Complex64::new(0.0, 0.0);
    for idx in 0..total {
        let mut rem = idx;
        for kj in k.iter_mut() {
            *kj = (rem % side) as f64 - n as f64;
            rem /= side;
        }
        let dot: f64 = k.iter().zip(x).map(|(a, b)| a * b).sum();
        acc += Complex64::from_polar(1.0, dot - t * spec.symbol_value(&k));
    }
    acc / (4.0 * PI * PI)
}

/// `|∫ e^{ixξ − s·itφ(ξ)} |φ''(ξ)|^{1/2+iβ} dξ| · t^{1/2}` with `s = ±1`.
pub fn weighted_vdc_check_signed(beta: f64, t: f64, x: f64, sign: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::Precondition(format!("weighted check needs 0 < t <= 1, got {t}")));
    }
    let phase = PhaseIntegrand::boussinesq(sign * t, x).with_weight(beta);
    let v = contour::line_integral(&phase, None, 1e-9 * t.powf(-0.5))?;
    Ok(v.norm() * t.sqrt())
}

/// [`weighted_vdc_check_signed`] with the `e^{-itφ}` sign used throughout.
pub fn weighted_vdc_check(beta: f64, t: f64, x: f64) -> Result<f64> {
    weighted_vdc_check_signed(beta, t, x, 1.0)
}

/// Half-line piece `∫_a^∞ e^{i(xξ − tφ(ξ))} dξ` against its two-term
/// integration-by-parts expansion `e^{iΦ(a)} (i/Φ'(a) + Φ''(a)/Φ'(a)³)`.
///
/// Returns `(quadrature, expansion)`. `a` must lie beyond every stationary
/// point of `Φ`.
pub fn boussinesq_tail_ibp(t: f64, x: f64, a: f64) -> Result<(Complex64, Complex64)> {
    let phase = PhaseIntegrand::boussinesq(t, x);
    if phase.stationary_points().iter().any(|&s| s >= a) {
        return Err(Error::Precondition(format!("stationary point beyond a = {a}")));
    }
    let q = contour::line_integral(&phase, Some(a), 1e-11)?;
    let (d1, d2) = (phase.d1(a), phase.d2(a));
    let e = Complex64::from_polar(1.0, phase.value_real(a));
    Ok((q, e * (Complex64::new(0.0, 1.0 / d1) + d2 / d1.powi(3))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{adaptive, lin_space};

    #[test]
    fn elliptic_modulus_is_fresnel() {
        let spec = PropagatorSpec::elliptic(1);
        for t in [0.01, 0.3, 1.0, 7.0] {
            for x in [-5.0, 0.0, 0.4, 30.0] {
                let k = kernel_value(&spec, t, &[x]).unwrap();
                assert!((k.norm() * (2.0 * PI).sqrt() - (PI / t).sqrt()).abs() < 1e-12 * (PI / t).sqrt());
            }
        }
    }

    #[test]
    fn elliptic_matches_contour_quadrature() {
        let spec = PropagatorSpec::elliptic(1);
        for (t, x) in [(1.0, 0.0), (0.5, 1.3), (2.0, -3.0)] {
            let closed = kernel_value(&spec, t, &[x]).unwrap();
            let phase = PhaseIntegrand::quadratic(t, x);
            let q = contour::line_integral(&phase, None, 1e-11).unwrap() / (2.0 * PI).sqrt();
            assert!((q - closed).norm() < 1e-8, "t={t} x={x}: {q} vs {closed}");
        }
    }

    #[test]
    fn non_elliptic_modulus_equals_elliptic() {
        let e = PropagatorSpec::elliptic(2);
        let n = PropagatorSpec::non_elliptic(2, 1);
        for t in [-0.7, 0.2, 3.0] {
            for x in [[0.0, 0.0], [1.0, -2.0], [5.0, 0.3]] {
                let a = kernel_value(&e, t, &x).unwrap().norm();
                let b = kernel_value(&n, t, &x).unwrap().norm();
                assert!((a - b).abs() < 1e-10 * a);
            }
        }
    }

    #[test]
    fn continuous_kernel_singular_at_zero() {
        assert!(matches!(
            kernel_value(&PropagatorSpec::elliptic(1), 0.0, &[0.0]),
            Err(Error::SingularKernel(_))
        ));
    }

    #[test]
    fn torus_kernel_at_origin() {
        let spec = PropagatorSpec::torus(Symbol::Elliptic, 1, 2);
        let k = kernel_value(&spec, 0.0, &[0.0]).unwrap();
        assert!((k.re - 5.0 / (4.0 * PI * PI)).abs() < 1e-15 && k.im.abs() < 1e-15);
        assert!(kernel_value(&PropagatorSpec { cutoff: None, ..spec }, 0.0, &[0.0]).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(PropagatorSpec::non_elliptic(2, 3).validate().is_err());
        assert!(PropagatorSpec::non_elliptic(2, 0).validate().is_err());
        assert!(PropagatorSpec { dim: 2, ..PropagatorSpec::boussinesq() }.validate().is_err());
        assert!(PropagatorSpec::ball(8).validate().is_ok());
        assert!(PropagatorSpec { dim: 2, ..PropagatorSpec::ball(8) }.validate().is_err());
    }

    #[test]
    fn boussinesq_kernel_against_direct_window() {
        // With a Gaussian damping factor the integral is absolutely convergent;
        // compare the undamped contour value with a slowly vanishing damping.
        let (t, x) = (0.5, 0.8);
        let k = kernel_value(&PropagatorSpec::boussinesq(), t, &[x]).unwrap() * (2.0 * PI).sqrt();
        let mut prev = None;
        for eps in [4e-3, 2e-3, 1e-3] {
            let f = |xi: f64| {
                Complex64::from_polar((-eps * xi * xi).exp(), x * xi - t * boussinesq_phase(xi))
            };
            let lim = (40.0 / eps).sqrt();
            let v = adaptive(&f, -lim, lim, 1e-9, 50_000_000).value;
            prev = Some(v);
        }
        assert!((prev.unwrap() - k).norm() < 2e-2 * k.norm(), "{:?} vs {k}", prev);
    }

    #[test]
    fn weighted_check_uniform_in_x_and_beta() {
        let t = 0.01;
        let mut max = 0.0f64;
        for x in lin_space(-2.0, 2.0, 9) {
            let r0 = weighted_vdc_check(0.0, t, x).unwrap();
            let r3 = weighted_vdc_check(3.0, t, x).unwrap();
            assert!(r0.is_finite() && r3.is_finite());
            max = max.max(r0).max(r3);
        }
        assert!(max < 20.0, "{max}");
    }

    #[test]
    fn weighted_ratio_stable_when_t_halves() {
        let x = 0.05;
        let a = weighted_vdc_check(0.0, 0.02, x).unwrap();
        let b = weighted_vdc_check(0.0, 0.01, x).unwrap();
        assert!((a / b - 1.0).abs() < 0.2, "{a} {b}");
    }

    #[test]
    fn tail_matches_two_term_expansion() {
        let (t, x) = (0.1, -20.0);
        for a in [5.0, 10.0, 20.0] {
            let (q, ibp) = boussinesq_tail_ibp(t, x, a).unwrap();
            assert!((q - ibp).norm() < 0.1 * q.norm(), "a={a}: {q} vs {ibp}");
        }
    }
}
