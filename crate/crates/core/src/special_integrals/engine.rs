//! Quadrature for `∫ e^{-itρ} ρ^{-1+ib} dρ` over the supported ranges.
//!
//! Everything reduces to the positive-side primitive
//! `P(σ; lo, hi) = ∫_lo^hi e^{-iσs} s^{-1+ib} ds` with `0 ≤ lo < hi ≤ ∞`.
//! The negative axis maps onto it through `ρ = -s`, which contributes the
//! factor `(-1)^{-1+ib} = -e^{-πb}` and flips the sign of the frequency.
//! Origin endpoints with `b ≠ 0` use the Abel value `∫_0^δ s^{-1+ib} = δ^{ib}/(ib)`.

use super::{IntegralSpec, QuadratureReport, Range};
use crate::error::{Error, Result};
use crate::quadrature::{adaptive, adaptive_panels, panel_rule, wynn_epsilon, Integral};
use num_complex::Complex64;
use std::f64::consts::PI;

/// How the infinite oscillatory tail is summed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailMethod {
    /// Truncate where the integration-by-parts remainder is below tolerance
    /// and add the asymptotic series.
    #[default]
    Asymptotic,
    /// Wynn's epsilon over half-period partial sums.
    Accelerated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub tol: f64,
    pub max_evaluations: usize,
    pub tail: TailMethod,
}

impl QuadratureOptions {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            max_evaluations: 20_000_000,
            tail: TailMethod::Asymptotic,
        }
    }
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ASYMPTOTIC_TERMS: usize = 8;
const HALF_PERIODS: usize = 48;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `x^{ib}` for `x > 0`.
fn pow_ib(x: f64, b: f64) -> Complex64 {
    Complex64::from_polar(1.0, b * x.ln())
}

pub(crate) struct Engine {
    b: f64,
    budget: usize,
    tail: TailMethod,
}

impl Engine {
    pub(crate) fn new(b: f64, opts: &QuadratureOptions) -> Self {
        Self {
            b,
            budget: opts.max_evaluations,
            tail: opts.tail,
        }
    }

    /// `∫_lo^hi e^{-iσs} s^{-1+ib} ds`.
    pub(crate) fn positive(&self, sigma: f64, lo: f64, hi: f64, tol: f64) -> Result<Integral> {
        let b = self.b;
        if !(lo >= 0.0) || !(hi > lo) {
            return Err(Error::Precondition(format!("need 0 <= lo < hi, got [{lo}, {hi}]")));
        }
        if lo == 0.0 {
            if b == 0.0 {
                return Err(Error::Divergent("ρ^{-1} is not integrable at the origin".into()));
            }
            if sigma == 0.0 {
                // Abel value at both ends when the range is the whole half-line.
                if hi.is_infinite() {
                    return Ok(Integral::zero());
                }
                return Ok(Integral::exact(pow_ib(hi, b) / Complex64::new(0.0, b)));
            }
            let delta = hi.min(1.0 / sigma.abs());
            let mut out = self.head(sigma, delta, 0.4 * tol);
            if hi > delta {
                out.add(self.positive(sigma, delta, hi, 0.6 * tol)?);
            }
            return Ok(out);
        }
        if hi.is_infinite() {
            if sigma == 0.0 {
                if b == 0.0 {
                    return Err(Error::Divergent("∫ ρ^{-1} diverges at infinity".into()));
                }
                return Ok(Integral::exact(-pow_ib(lo, b) / Complex64::new(0.0, b)));
            }
            return self.tail(sigma, lo, tol);
        }
        Ok(self.middle(sigma, lo, hi, tol))
    }

    /// `∫_0^δ (e^{-iσs} - 1) s^{-1+ib} ds + δ^{ib}/(ib)` with `s = δe^u`.
    fn head(&self, sigma: f64, delta: f64, tol: f64) -> Integral {
        let b = self.b;
        let scale = sigma.abs() * delta;
        // |integrand| ≤ |σ|δ e^u, so the part below u_min is under tol/4.
        let u_min = (0.25 * tol / scale).ln().min(-1.0);
        let ln_delta = delta.ln();
        let f = |u: f64| {
            let theta = sigma * delta * u.exp();
            let factor = Complex64::new(0.0, -2.0 * (0.5 * theta).sin()) * Complex64::from_polar(1.0, -0.5 * theta);
            factor * Complex64::from_polar(1.0, b * (u + ln_delta))
        };
        let width = PI / (1.0 + b.abs());
        let breaks = uniform_breaks(u_min, 0.0, width);
        let mut out = adaptive_panels(&f, &breaks, 0.75 * tol, self.budget);
        out.error += scale * u_min.exp();
        out.value += pow_ib(delta, b) / Complex64::new(0.0, b);
        out
    }

    /// Finite piece with `0 < lo < hi < ∞`.
    fn middle(&self, sigma: f64, lo: f64, hi: f64, tol: f64) -> Integral {
        let b = self.b;
        let split = if sigma == 0.0 { f64::INFINITY } else { 1.0 / sigma.abs() };
        let mut out = Integral::zero();
        let log_hi = hi.min(split);
        if lo < log_hi {
            // s = e^u removes the 1/s weight and the log-oscillation.
            let f = |u: f64| Complex64::from_polar(1.0, -sigma * u.exp() + b * u);
            let width = PI / (1.0 + b.abs());
            let breaks = uniform_breaks(lo.ln(), log_hi.ln(), width);
            let share = if hi > log_hi { tol * 0.5 } else { tol };
            out.add(adaptive_panels(&f, &breaks, share, self.budget));
        }
        if hi > log_hi {
            let a = lo.max(log_hi);
            let f = |s: f64| Complex64::from_polar(1.0 / s, -sigma * s + b * s.ln());
            let mut breaks = vec![a];
            let mut s = a;
            while s < hi {
                s += PI / (sigma.abs() + b.abs() / s);
                breaks.push(s.min(hi));
            }
            let share = if lo < log_hi { tol * 0.5 } else { tol };
            out.add(adaptive_panels(&f, &breaks, share, self.budget.saturating_sub(out.evaluations)));
        }
        out
    }

    /// `∫_X^∞ e^{-iσs} s^{-1+ib} ds` with `σ ≠ 0`.
    fn tail(&self, sigma: f64, x: f64, tol: f64) -> Result<Integral> {
        match self.tail {
            TailMethod::Asymptotic => Ok(self.tail_asymptotic(sigma, x, tol)),
            TailMethod::Accelerated => Ok(self.tail_accelerated(sigma, x, tol)),
        }
    }

    /// Remainder bound of the asymptotic series after `K` terms at `x`.
    fn remainder_bound(&self, sigma: f64, x: f64) -> f64 {
        let k = ASYMPTOTIC_TERMS;
        let mut prod = 1.0;
        for j in 1..=k {
            prod *= ((j * j) as f64 + self.b * self.b).sqrt() / (sigma.abs() * x);
        }
        prod / k as f64
    }

    fn tail_asymptotic(&self, sigma: f64, x: f64, tol: f64) -> Integral {
        let b = self.b;
        let k = ASYMPTOTIC_TERMS as f64;
        let mut start = x.max(4.0 * (k + b.abs()) / sigma.abs());
        // Grow the truncation point until the remainder is small enough.
        while self.remainder_bound(sigma, start) > 0.25 * tol {
            start *= 1.25;
        }
        let mut out = Integral::zero();
        if start > x {
            out.add(self.middle(sigma, x, start, 0.75 * tol));
        }
        // e^{-iσX} Σ_k g^{(k)}(X)/(iσ)^{k+1}, g(s) = s^{-1+ib}
        let mut coeff = c(1.0);
        let mut series = Complex64::new(0.0, 0.0);
        let is = Complex64::new(0.0, sigma);
        let mut denom = is;
        for j in 0..ASYMPTOTIC_TERMS {
            let power = Complex64::new(-1.0 - j as f64, b);
            series += coeff * (power * start.ln()).exp() / denom;
            coeff *= Complex64::new(-(j as f64) - 1.0, b);
            denom *= is;
        }
        out.value += series * Complex64::from_polar(1.0, -sigma * start);
        out.error += self.remainder_bound(sigma, start);
        out
    }

    fn tail_accelerated(&self, sigma: f64, x: f64, tol: f64) -> Integral {
        let b = self.b;
        let start = x.max(2.0 * (1.0 + b.abs()) / sigma.abs());
        let mut out = Integral::zero();
        if start > x {
            out.add(self.middle(sigma, x, start, 0.5 * tol));
        }
        let half = PI / sigma.abs();
        let f = |s: f64| Complex64::from_polar(1.0 / s, -sigma * s + b * s.ln());
        let mut partial = Vec::with_capacity(HALF_PERIODS);
        let mut acc = Complex64::new(0.0, 0.0);
        let per_panel = 0.1 * tol / HALF_PERIODS as f64;
        for j in 0..HALF_PERIODS {
            let lo = start + j as f64 * half;
            let piece = adaptive(&f, lo, lo + half, per_panel, self.budget);
            out.evaluations += piece.evaluations;
            out.error += piece.error;
            out.converged &= piece.converged;
            acc += piece.value;
            partial.push(acc);
        }
        let (limit, err) = wynn_epsilon(&partial);
        out.value += limit;
        out.error += err;
        out
    }
}

fn uniform_breaks(lo: f64, hi: f64, width: f64) -> Vec<f64> {
    let n = (((hi - lo) / width).ceil() as usize).max(1);
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

/// `∫_0^x sin(s)/s ds`; `x` may be infinite.
pub fn sine_integral(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x < 0.0 {
        return -sine_integral(-x);
    }
    let near = x.min(1.0);
    let mut v = panel_rule(3).integrate_real(0.0, near, |s| s.sin() / s);
    if x > 1.0 {
        let engine = Engine {
            b: 0.0,
            budget: 20_000_000,
            tail: TailMethod::Asymptotic,
        };
        // sin s / s = -Im(e^{-is} s^{-1})
        let far = engine
            .positive(1.0, 1.0, x, 1e-14)
            .expect("finite range away from the origin");
        v -= far.value.im;
    }
    v
}

/// `∫_a^b sin(x)/x dx` for any real `a ≤ b` (either may be infinite).
pub fn sin_over_x(a: f64, b: f64) -> f64 {
    sine_integral(b) - sine_integral(a)
}

pub(crate) fn evaluate(spec: &IntegralSpec, opts: &QuadratureOptions) -> Result<QuadratureReport> {
    let IntegralSpec { t, b, range } = *spec;
    if !(opts.tol > 0.0) {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    if !t.is_finite() || !b.is_finite() {
        return Err(Error::Precondition("t and b must be finite".into()));
    }
    range.validate()?;
    let tol = opts.tol;
    let engine = Engine::new(b, opts);
    let neg = -(-PI * b).exp();
    // Tolerance for a negative-side piece, in unscaled units.
    let neg_tol = |share: f64| share * tol / neg.abs().max(1.0);
    let pos = |lo: f64, hi: f64, share: f64| engine.positive(t, lo, hi, share * tol);
    let negp = |lo: f64, hi: f64, share: f64| -> Result<Integral> {
        Ok(engine.positive(-t, lo, hi, neg_tol(share))?.scaled(c(neg)))
    };
    let infinite = matches!(range, Range::FullLinePv | Range::HalfLine { .. } | Range::NegHalfLine { .. });
    if infinite && t == 0.0 && b == 0.0 {
        return Err(Error::Divergent("t = 0 = b on an infinite range".into()));
    }
    let total = match range {
        Range::FullLinePv => {
            if b == 0.0 {
                symmetric_pv_b0(t, f64::INFINITY)
            } else {
                pos(0.0, f64::INFINITY, 0.5)? + negp(0.0, f64::INFINITY, 0.5)?
            }
        }
        Range::HalfLine { a } => pos(a, f64::INFINITY, 1.0)?,
        Range::NegHalfLine { a } => negp(a, f64::INFINITY, 1.0)?,
        Range::Annulus { eps, m } => pos(eps, m, 0.5)? + negp(eps, m, 0.5)?,
        Range::Finite { c: lo, d: hi } => {
            if lo >= 0.0 {
                pos(lo, hi, 1.0)?
            } else if hi <= 0.0 {
                negp(-hi, -lo, 1.0)?
            } else if b == 0.0 {
                let m = hi.min(-lo);
                let mut out = symmetric_pv_b0(t, m);
                if hi > m {
                    out.add(pos(m, hi, 0.5)?);
                }
                if -lo > m {
                    out.add(negp(m, -lo, 0.5)?);
                }
                out
            } else {
                pos(0.0, hi, 0.5)? + negp(0.0, -lo, 0.5)?
            }
        }
    };
    Ok(QuadratureReport {
        value: total.value,
        abs_error_estimate: total.error,
        evaluations: total.evaluations,
        converged: total.converged && total.error <= tol,
    })
}

/// `P.V. ∫_{-m}^{m} e^{-itρ} ρ^{-1} dρ = -2i sgn(t) Si(|t| m)`.
fn symmetric_pv_b0(t: f64, m: f64) -> Integral {
    if t == 0.0 {
        return Integral::zero();
    }
    let si = sine_integral(t.abs() * m);
    Integral::exact(-2.0 * I * t.signum() * si)
}
