//! Line integrals `∫ e^{iΦ(ξ)} w(ξ) dξ` for phases that grow quadratically.
//!
//! A finite window is split into panels no wider than a fraction of the local
//! oscillation length; both tails are rotated onto vertical rays on which the
//! integrand decays like `e^{-u|Φ'(X)|}`.

use crate::error::{Error, Result};
use crate::quadrature::{adaptive, adaptive_panels};
use num_complex::Complex64;
use std::f64::consts::PI;

const BUDGET: usize = 40_000_000;

/// `φ(ξ) = ξ √(1+ξ²)`.
pub fn boussinesq_phase(xi: f64) -> f64 {
    xi * (1.0 + xi * xi).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Model {
    Boussinesq,
    Quadratic,
}

/// `e^{i(xξ − t p(ξ))}` times an optional `|p''(ξ)|^{1/2+iβ}` weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseIntegrand {
    model: Model,
    t: f64,
    x: f64,
    beta: Option<f64>,
}

impl PhaseIntegrand {
    pub fn boussinesq(t: f64, x: f64) -> Self {
        Self {
            model: Model::Boussinesq,
            t,
            x,
            beta: None,
        }
    }

    pub fn quadratic(t: f64, x: f64) -> Self {
        Self {
            model: Model::Quadratic,
            t,
            x,
            beta: None,
        }
    }

    pub fn with_weight(mut self, beta: f64) -> Self {
        self.beta = Some(beta);
        self
    }

    fn p1(&self, xi: f64) -> f64 {
        match self.model {
            Model::Boussinesq => (1.0 + 2.0 * xi * xi) / (1.0 + xi * xi).sqrt(),
            Model::Quadratic => 2.0 * xi,
        }
    }

    fn p2(&self, xi: f64) -> f64 {
        match self.model {
            Model::Boussinesq => xi * (2.0 * xi * xi + 3.0) / (1.0 + xi * xi).powf(1.5),
            Model::Quadratic => 2.0,
        }
    }

    fn p3(&self, xi: f64) -> f64 {
        match self.model {
            Model::Boussinesq => 3.0 / (1.0 + xi * xi).powf(2.5),
            Model::Quadratic => 0.0,
        }
    }

    pub fn value_real(&self, xi: f64) -> f64 {
        let p = match self.model {
            Model::Boussinesq => boussinesq_phase(xi),
            Model::Quadratic => xi * xi,
        };
        self.x * xi - self.t * p
    }

    pub fn d1(&self, xi: f64) -> f64 {
        self.x - self.t * self.p1(xi)
    }

    pub fn d2(&self, xi: f64) -> f64 {
        -self.t * self.p2(xi)
    }

    fn d3(&self, xi: f64) -> f64 {
        -self.t * self.p3(xi)
    }

    fn value(&self, z: Complex64) -> Complex64 {
        let p = match self.model {
            // principal sqrt is analytic off the imaginary axis, where all
            // evaluation points lie
            Model::Boussinesq => z * (z * z + 1.0).sqrt(),
            Model::Quadratic => z * z,
        };
        z * self.x - p * self.t
    }

    fn weight(&self, z: Complex64) -> Complex64 {
        let Some(beta) = self.beta else {
            return Complex64::new(1.0, 0.0);
        };
        if z.norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        // log |p''| continued analytically from each half-axis
        let lead = if z.re >= 0.0 { z.ln() } else { (-z).ln() };
        let log = match self.model {
            Model::Boussinesq => lead + (z * z * 2.0 + 3.0).ln() - (z * z + 1.0).ln() * 1.5,
            Model::Quadratic => Complex64::new(2f64.ln(), 0.0),
        };
        (log * Complex64::new(0.5, beta)).exp()
    }

    fn integrand(&self, z: Complex64) -> Complex64 {
        (self.value(z) * Complex64::i()).exp() * self.weight(z)
    }

    /// Real solutions of `Φ'(ξ) = 0`.
    pub fn stationary_points(&self) -> Vec<f64> {
        if self.t == 0.0 {
            return Vec::new();
        }
        let a = self.x / self.t;
        match self.model {
            Model::Quadratic => vec![a / 2.0],
            Model::Boussinesq => {
                if a < 1.0 {
                    Vec::new()
                } else {
                    let a2 = a * a;
                    let s = ((a2 - 4.0 + (a2 * a2 + 8.0 * a2).sqrt()) / 8.0).max(0.0).sqrt();
                    if s == 0.0 {
                        vec![0.0]
                    } else {
                        vec![-s, s]
                    }
                }
            }
        }
    }

    fn forced_breaks(&self) -> Vec<f64> {
        let mut b = self.stationary_points();
        if self.beta.is_some() {
            b.push(0.0);
        }
        b
    }

    /// Panel width: a fraction of the distance over which the phase turns by π.
    fn step(&self, xi: f64) -> f64 {
        let lim = |v: f64, pow: f64, c: f64| if v == 0.0 { f64::INFINITY } else { (c / v.abs()).powf(pow) };
        let h = 1.0f64
            .min(lim(self.d1(xi), 1.0, PI))
            .min(lim(self.d2(xi), 0.5, 2.0 * PI))
            .min(lim(self.d3(xi), 1.0 / 3.0, 6.0 * PI));
        0.5 * h
    }
}

/// Window endpoint beyond which `|Φ'| ≥ 1` on both sides.
fn window_edge(phase: &PhaseIntegrand, lo: Option<f64>) -> Result<f64> {
    let far = phase.forced_breaks().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut x = 3.0f64.max(1.5 * far);
    if let Some(a) = lo {
        x = x.max(a + 1.0);
    }
    for _ in 0..400 {
        let right = phase.d1(x).abs() >= 1.0;
        let left = lo.is_some() || phase.d1(-x).abs() >= 1.0;
        if right && left {
            return Ok(x);
        }
        x *= 1.25;
    }
    Err(Error::Unsupported(format!(
        "phase derivative stays below 1 out to {x:.3e}; no decaying contour"
    )))
}

fn window_breaks(phase: &PhaseIntegrand, lo: f64, hi: f64) -> Vec<f64> {
    let mut forced: Vec<f64> = phase
        .forced_breaks()
        .into_iter()
        .filter(|v| *v > lo && *v < hi)
        .collect();
    forced.sort_by(f64::total_cmp);
    let mut out = vec![lo];
    let mut xi = lo;
    let mut fi = 0;
    while xi < hi {
        let mut next = xi + phase.step(xi);
        if fi < forced.len() && next >= forced[fi] {
            next = forced[fi];
            fi += 1;
        }
        if next >= hi {
            next = hi;
        }
        out.push(next);
        xi = next;
    }
    out
}

fn ray(phase: &PhaseIntegrand, start: f64, tol: f64) -> Result<Complex64> {
    let slope = phase.d1(start);
    let sigma = slope.signum();
    let dir = Complex64::new(0.0, sigma);
    let span = 45.0 / slope.abs();
    let f = |u: f64| phase.integrand(Complex64::new(start, 0.0) + dir * u) * dir;
    let r = adaptive(&f, 0.0, span, tol, BUDGET);
    if !r.converged {
        return Err(Error::Unsupported(format!("ray integral from {start} did not converge")));
    }
    Ok(r.value)
}

/// `∫_ℝ` (`lo = None`) or `∫_lo^∞` of the phase integrand.
pub(crate) fn line_integral(phase: &PhaseIntegrand, lo: Option<f64>, tol: f64) -> Result<Complex64> {
    let edge = window_edge(phase, lo)?;
    let left = lo.unwrap_or(-edge);
    let breaks = window_breaks(phase, left, edge);
    let f = |xi: f64| phase.integrand(Complex64::new(xi, 0.0));
    let window = adaptive_panels(&f, &breaks, tol / 2.0, BUDGET);
    if !window.converged {
        return Err(Error::Unsupported(format!(
            "window quadrature did not converge (t = {}, x = {})",
            phase.t, phase.x
        )));
    }
    let mut total = window.value + ray(phase, edge, tol / 4.0)?;
    if lo.is_none() {
        total -= ray(phase, -edge, tol / 4.0)?;
    }
    Ok(total)
}

/// `∫ e^{i(xξ − tφ(ξ))} dξ` to relative accuracy `rel` of the kernel scale.
pub(crate) fn boussinesq_kernel_integral(t: f64, x: f64, rel: f64) -> Result<Complex64> {
    let scale = t.abs().powf(-0.5).max(t.abs().powf(-1.0 / 3.0));
    line_integral(&PhaseIntegrand::boussinesq(t, x), None, rel * scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stationary_points_solve_the_phase_equation() {
        for (t, x) in [(1.0, 3.0), (0.01, 0.5), (100.0, 140.0)] {
            let p = PhaseIntegrand::boussinesq(t, x);
            let s = p.stationary_points();
            assert_eq!(s.len(), 2);
            for v in s {
                assert!(p.d1(v).abs() < 1e-9 * x.abs().max(1.0), "{t} {x} {v}");
            }
        }
        assert!(PhaseIntegrand::boussinesq(1.0, 0.5).stationary_points().is_empty());
    }

    #[test]
    fn analytic_phase_agrees_on_real_axis() {
        let p = PhaseIntegrand::boussinesq(0.7, -1.2).with_weight(1.5);
        for xi in [-4.0, -0.3, 0.2, 5.0] {
            let z = Complex64::new(xi, 0.0);
            assert!((p.value(z).re - p.value_real(xi)).abs() < 1e-12);
            let w = p.weight(z);
            let abs2 = p.p2(xi).abs();
            assert!((w.norm() - abs2.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn fresnel_integral_by_contour() {
        // ∫ e^{-iξ²} dξ = √π e^{-iπ/4}
        let v = line_integral(&PhaseIntegrand::quadratic(1.0, 0.0), None, 1e-12).unwrap();
        let exact = Complex64::from_polar(PI.sqrt(), -PI / 4.0);
        assert!((v - exact).norm() < 1e-9, "{v}");
    }

    #[test]
    fn negative_time_is_conjugate_mirror() {
        // K(-t, x) = conj K(t, -x) since φ is odd
        let a = boussinesq_kernel_integral(0.3, 0.9, 1e-10).unwrap();
        let b = boussinesq_kernel_integral(-0.3, -0.9, 1e-10).unwrap();
        assert!((a - b.conj()).norm() < 1e-7, "{a} {b}");
    }
}
