//! Grid sweeps comparing integral moduli with their bound envelopes.

use super::envelopes::{c1, c3, c4, hyperbolic_ratio, power_envelope};
use super::{oscillatory_quadrature, pv_integral_closed_form, pv_integral_modulus, sin_over_x, IntegralSpec, Range};
use crate::error::Result;
use crate::par;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Which inequality a sweep checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// `|∫_{a}^{b} sin x / x dx| ≤ 4` for `0 < a < b`.
    SineIntegral,
    /// `|∫_a^∞ sin(tx)/x dx| ≤ 4` and the mirror half-line.
    SineTail,
    /// `|2x e^{-x}/(e^x - e^{-x})| ≤ 2|x| + 1`.
    HyperbolicRatio,
    /// The same with `x = πb`.
    HyperbolicRatioPi,
    /// `P.V. ∫_{|ρ|≥a} ρ^{-1} dρ = 0`.
    PvOutsideReciprocal,
    /// `|∫_a^∞ ρ^{-1+ib}| ≤ 3/|b|`, `|∫_{-∞}^{-a} ρ^{-1+ib}| ≤ 3e^{-πb}/|b|`.
    PowerTail,
    /// `|∫_M^∞ e^{±iy} y^{-1+ib} dy| ≤ (2 + |b|)/M` for `M ≥ 2|b| + 2`.
    OscillatoryTail,
    /// Half-line moduli against `(1+e^{-πb})(√|b|+1/√|b|)²`.
    HalfLines,
    /// `|P.V. ∫_{|ρ|≥a}|` against `C1(b)`.
    PvOutside,
    /// `|P.V. ∫_{|ρ|≤a}|` against `|C0(b)| + C·C1(b)`.
    PvInside,
    /// `|P.V. ∫_{ε≤|ρ|≤M}|` against `2|C0(b)| + C·C1(b)`.
    PvAnnulus,
    /// Full-line quadrature equals `C2(b)`.
    FullLine,
    /// `|∫_{|ρ|≤a}|` against `(1+e^{-πb})(√|b|+1/√|b|)²`.
    Inside,
    /// `|b ∫_0^{d}|` against `(1+|b|)²` or `e^{-πb}(1+|b|)²`.
    OriginSegments,
    /// `|b ∫_c^{d}|` against `C3(b)`.
    WeightedSegment,
    /// `|∫_c^{d}|` against `C4(b)`.
    Segment,
    /// `|∫_ε^M + ∫_{-M}^{-ε}|` against `(1+e^{-πb})(√|b|+1/√|b|)²`.
    AnnulusPair,
}

impl BoundKind {
    pub const ALL: [BoundKind; 17] = [
        BoundKind::SineIntegral,
        BoundKind::SineTail,
        BoundKind::HyperbolicRatio,
        BoundKind::HyperbolicRatioPi,
        BoundKind::PvOutsideReciprocal,
        BoundKind::PowerTail,
        BoundKind::OscillatoryTail,
        BoundKind::HalfLines,
        BoundKind::PvOutside,
        BoundKind::PvInside,
        BoundKind::PvAnnulus,
        BoundKind::FullLine,
        BoundKind::Inside,
        BoundKind::OriginSegments,
        BoundKind::WeightedSegment,
        BoundKind::Segment,
        BoundKind::AnnulusPair,
    ];

    /// True when the constant on the right-hand side is known, so every ratio
    /// must be at most one.
    pub fn explicit(self) -> bool {
        matches!(
            self,
            BoundKind::SineIntegral
                | BoundKind::SineTail
                | BoundKind::HyperbolicRatio
                | BoundKind::HyperbolicRatioPi
                | BoundKind::PvOutsideReciprocal
                | BoundKind::PowerTail
                | BoundKind::OscillatoryTail
                | BoundKind::FullLine
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::SineIntegral => "sine-integral",
            BoundKind::SineTail => "sine-tail",
            BoundKind::HyperbolicRatio => "hyperbolic-ratio",
            BoundKind::HyperbolicRatioPi => "hyperbolic-ratio-pi",
            BoundKind::PvOutsideReciprocal => "pv-outside-reciprocal",
            BoundKind::PowerTail => "power-tail",
            BoundKind::OscillatoryTail => "oscillatory-tail",
            BoundKind::HalfLines => "half-lines",
            BoundKind::PvOutside => "pv-outside",
            BoundKind::PvInside => "pv-inside",
            BoundKind::PvAnnulus => "pv-annulus",
            BoundKind::FullLine => "full-line",
            BoundKind::Inside => "inside",
            BoundKind::OriginSegments => "origin-segments",
            BoundKind::WeightedSegment => "weighted-segment",
            BoundKind::Segment => "segment",
            BoundKind::AnnulusPair => "annulus-pair",
        }
    }
}

/// Parameter axes; each kind reads the ones it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepGrid {
    /// Oscillation parameters.
    pub t: Vec<f64>,
    /// Imaginary orders.
    pub b: Vec<f64>,
    /// Positive radii / cut-offs.
    pub a: Vec<f64>,
    /// Signed endpoints.
    pub ends: Vec<f64>,
    /// Real arguments for the elementary bounds.
    pub x: Vec<f64>,
    /// Base absolute tolerance, scaled by the envelope at each point.
    pub tol: f64,
}

impl Default for SweepGrid {
    fn default() -> Self {
        let mut b = Vec::new();
        for v in [0.1, 0.25, 0.5, 1.0, 2.0, 3.5, 5.0] {
            b.push(-v);
            b.push(v);
        }
        b.sort_by(f64::total_cmp);
        Self {
            t: vec![-2.0, -0.5, 0.0, 0.5, 2.0],
            b,
            a: vec![0.01, 0.1, 0.5, 1.0, 3.0, 10.0, 100.0],
            ends: vec![-10.0, -3.0, -1.0, -0.1, 0.0, 0.1, 1.0, 3.0, 10.0],
            x: vec![0.01, 0.1, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0, 20.0, 50.0, 100.0],
            tol: 1e-6,
        }
    }
}

impl SweepGrid {
    /// The default grid with `t ∈ {-2, 0, 2}`, as used for the weighted segment sweep.
    pub fn segment_default() -> Self {
        Self {
            t: vec![-2.0, 0.0, 2.0],
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub params: Vec<(String, f64)>,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub kind: BoundKind,
    pub explicit: bool,
    pub points: usize,
    pub max_ratio: f64,
    pub argmax: Vec<(String, f64)>,
    pub flagged: usize,
    pub violations: usize,
    pub rows: Vec<SweepPoint>,
}

struct Task {
    params: Vec<(&'static str, f64)>,
}

impl Task {
    fn get(&self, k: &str) -> f64 {
        self.params.iter().find(|(n, _)| *n == k).map(|p| p.1).unwrap_or(f64::NAN)
    }
}

enum Outcome {
    /// lhs, rhs
    Ratio(f64, f64),
    Skip,
    Failed,
}

fn quad(t: f64, b: f64, range: Range, tol: f64) -> Option<Complex64> {
    match oscillatory_quadrature(&IntegralSpec::new(t, b, range), tol) {
        Ok(r) if r.converged => Some(r.value),
        _ => None,
    }
}

/// `∫_c^d` with either orientation.
fn segment(t: f64, b: f64, c: f64, d: f64, tol: f64) -> Option<Complex64> {
    if c < d {
        quad(t, b, Range::Finite { c, d }, tol)
    } else {
        quad(t, b, Range::Finite { c: d, d: c }, tol).map(|v| -v)
    }
}

fn tasks(kind: BoundKind, g: &SweepGrid) -> Vec<Task> {
    let mut out = Vec::new();
    let nonzero_b: Vec<f64> = g.b.iter().copied().filter(|b| *b != 0.0).collect();
    let mut b_with_zero = g.b.clone();
    if !b_with_zero.contains(&0.0) {
        b_with_zero.push(0.0);
    }
    match kind {
        BoundKind::SineIntegral => {
            for (i, &a) in g.x.iter().enumerate() {
                for &b in &g.x[i + 1..] {
                    if a > 0.0 && b > a {
                        out.push(Task { params: vec![("a", a), ("b", b)] });
                    }
                }
            }
        }
        BoundKind::SineTail => {
            for &a in &g.a {
                for &t in g.t.iter().filter(|t| **t != 0.0) {
                    out.push(Task { params: vec![("a", a), ("t", t)] });
                }
            }
        }
        BoundKind::HyperbolicRatio => {
            for &x in &g.x {
                out.push(Task { params: vec![("x", x)] });
                out.push(Task { params: vec![("x", -x)] });
            }
        }
        BoundKind::HyperbolicRatioPi | BoundKind::FullLine => {
            for &b in &nonzero_b {
                if kind == BoundKind::FullLine {
                    for &t in &g.t {
                        out.push(Task { params: vec![("t", t), ("b", b)] });
                    }
                } else {
                    out.push(Task { params: vec![("b", b)] });
                }
            }
        }
        BoundKind::PvOutsideReciprocal => {
            for (i, &a) in g.a.iter().enumerate() {
                for &m in &g.a[i + 1..] {
                    out.push(Task { params: vec![("a", a), ("M", m)] });
                }
            }
        }
        BoundKind::PowerTail => {
            for &a in std::iter::once(&0.0).chain(g.a.iter()) {
                for &b in &nonzero_b {
                    out.push(Task { params: vec![("a", a), ("b", b)] });
                }
            }
        }
        BoundKind::OscillatoryTail => {
            for &b in &nonzero_b {
                for &extra in &g.a {
                    let m = 2.0 * b.abs() + 2.0 + extra;
                    for sign in [-1.0, 1.0] {
                        out.push(Task { params: vec![("b", b), ("M", m), ("sign", sign)] });
                    }
                }
            }
        }
        BoundKind::HalfLines | BoundKind::Inside => {
            for &a in &g.a {
                for &t in &g.t {
                    for &b in &nonzero_b {
                        out.push(Task { params: vec![("a", a), ("t", t), ("b", b)] });
                    }
                }
            }
        }
        BoundKind::PvOutside | BoundKind::PvInside => {
            for &a in &g.a {
                for &t in &g.t {
                    for &b in &b_with_zero {
                        out.push(Task { params: vec![("a", a), ("t", t), ("b", b)] });
                    }
                }
            }
        }
        BoundKind::PvAnnulus | BoundKind::AnnulusPair => {
            let bs = if kind == BoundKind::PvAnnulus { &b_with_zero } else { &nonzero_b };
            for (i, &eps) in g.a.iter().enumerate() {
                for &m in &g.a[i + 1..] {
                    for &t in &g.t {
                        for &b in bs {
                            out.push(Task { params: vec![("eps", eps), ("M", m), ("t", t), ("b", b)] });
                        }
                    }
                }
            }
        }
        BoundKind::OriginSegments => {
            for &d in &g.a {
                for &t in &g.t {
                    for &b in &nonzero_b {
                        out.push(Task { params: vec![("d1", d), ("d2", -d), ("t", t), ("b", b)] });
                    }
                }
            }
        }
        BoundKind::WeightedSegment | BoundKind::Segment => {
            for (i, &c) in g.ends.iter().enumerate() {
                for &d in &g.ends[i + 1..] {
                    for &t in &g.t {
                        for &b in &nonzero_b {
                            out.push(Task { params: vec![("c", c), ("d", d), ("t", t), ("b", b)] });
                        }
                    }
                }
            }
        }
    }
    out
}

fn evaluate(kind: BoundKind, task: &Task, tol: f64) -> Outcome {
    let g = |k: &str| task.get(k);
    let scaled = |rhs: f64| tol * rhs.max(1.0);
    match kind {
        BoundKind::SineIntegral => Outcome::Ratio(sin_over_x(g("a"), g("b")).abs(), 4.0),
        BoundKind::SineTail => {
            let (a, t) = (g("a"), g("t"));
            let right = quad(t, 0.0, Range::HalfLine { a }, tol);
            let left = quad(t, 0.0, Range::NegHalfLine { a }, tol);
            match (right, left) {
                // sin(tρ)/ρ is minus the imaginary part of e^{-itρ}/ρ
                (Some(r), Some(l)) => Outcome::Ratio(r.im.abs().max(l.im.abs()), 4.0),
                _ => Outcome::Failed,
            }
        }
        BoundKind::HyperbolicRatio => {
            let x = g("x");
            Outcome::Ratio(hyperbolic_ratio(x), 2.0 * x.abs() + 1.0)
        }
        BoundKind::HyperbolicRatioPi => {
            let b = g("b");
            Outcome::Ratio(hyperbolic_ratio(PI * b), 2.0 * PI * b.abs() + 1.0)
        }
        BoundKind::PvOutsideReciprocal => {
            match quad(0.0, 0.0, Range::Annulus { eps: g("a"), m: g("M") }, tol) {
                Some(v) => Outcome::Ratio(v.norm(), tol),
                None => Outcome::Failed,
            }
        }
        BoundKind::PowerTail => {
            let (a, b) = (g("a"), g("b"));
            let r = quad(0.0, b, Range::HalfLine { a }, tol);
            let l = quad(0.0, b, Range::NegHalfLine { a }, tol);
            match (r, l) {
                (Some(r), Some(l)) => {
                    let e = (-PI * b).exp();
                    let ratio = (r.norm() * b.abs() / 3.0).max(l.norm() * b.abs() / (3.0 * e));
                    Outcome::Ratio(ratio, 1.0)
                }
                _ => Outcome::Failed,
            }
        }
        BoundKind::OscillatoryTail => {
            let (b, m, sign) = (g("b"), g("M"), g("sign"));
            // e^{±iy} = e^{-i(∓1)y}
            match quad(-sign, b, Range::HalfLine { a: m }, tol) {
                Some(v) => Outcome::Ratio(v.norm(), (2.0 + b.abs()) / m),
                None => Outcome::Failed,
            }
        }
        BoundKind::HalfLines => {
            let (a, t, b) = (g("a"), g("t"), g("b"));
            let rhs = (1.0 + (-PI * b).exp()) * power_envelope(b);
            let r = quad(t, b, Range::HalfLine { a }, scaled(rhs));
            let l = quad(t, b, Range::NegHalfLine { a }, scaled(rhs));
            match (r, l) {
                (Some(r), Some(l)) => Outcome::Ratio(r.norm().max(l.norm()).max((r + l).norm()), rhs),
                _ => Outcome::Failed,
            }
        }
        BoundKind::PvOutside => {
            let (a, t, b) = (g("a"), g("t"), g("b"));
            let rhs = c1(t, b);
            if rhs == 0.0 {
                return Outcome::Skip;
            }
            let v = if b == 0.0 {
                // e^{-itρ}/ρ over |ρ| ≥ a pairs into -2i sin(tρ)/ρ
                Some(Complex64::new(0.0, -2.0 * t.signum() * sin_over_x(t.abs() * a, f64::INFINITY)))
            } else {
                let r = quad(t, b, Range::HalfLine { a }, scaled(rhs));
                let l = quad(t, b, Range::NegHalfLine { a }, scaled(rhs));
                r.zip(l).map(|(r, l)| r + l)
            };
            v.map_or(Outcome::Failed, |v| Outcome::Ratio(v.norm(), rhs))
        }
        BoundKind::PvInside => {
            let (a, t, b) = (g("a"), g("t"), g("b"));
            let c0 = pv_integral_modulus(t, b);
            let rhs = c1(t, b);
            if rhs == 0.0 {
                return Outcome::Skip;
            }
            match quad(t, b, Range::Finite { c: -a, d: a }, scaled(rhs + c0)) {
                Some(v) => Outcome::Ratio((v.norm() - c0).max(0.0), rhs),
                None => Outcome::Failed,
            }
        }
        BoundKind::PvAnnulus => {
            let (eps, m, t, b) = (g("eps"), g("M"), g("t"), g("b"));
            let c0 = pv_integral_modulus(t, b);
            let rhs = c1(t, b);
            if rhs == 0.0 {
                return Outcome::Skip;
            }
            match quad(t, b, Range::Annulus { eps, m }, scaled(rhs + c0)) {
                Some(v) => Outcome::Ratio((v.norm() - 2.0 * c0).max(0.0), rhs),
                None => Outcome::Failed,
            }
        }
        BoundKind::FullLine => {
            let (t, b) = (g("t"), g("b"));
            let exact = pv_integral_closed_form(t, b);
            match quad(t, b, Range::FullLinePv, tol) {
                Some(v) => Outcome::Ratio((v - exact).norm(), tol * exact.norm().max(1.0)),
                None => Outcome::Failed,
            }
        }
        BoundKind::Inside => {
            let (a, t, b) = (g("a"), g("t"), g("b"));
            let rhs = (1.0 + (-PI * b).exp()) * power_envelope(b);
            match quad(t, b, Range::Finite { c: -a, d: a }, scaled(rhs)) {
                Some(v) => Outcome::Ratio(v.norm(), rhs),
                None => Outcome::Failed,
            }
        }
        BoundKind::OriginSegments => {
            let (d1, d2, t, b) = (g("d1"), g("d2"), g("t"), g("b"));
            let rhs_pos = (1.0 + b.abs()).powi(2);
            let rhs_neg = (-PI * b).exp() * rhs_pos;
            let p = segment(t, b, 0.0, d1, scaled(rhs_pos) / b.abs());
            let n = segment(t, b, 0.0, d2, scaled(rhs_neg) / b.abs());
            match (p, n) {
                (Some(p), Some(n)) => {
                    let ratio = (b.abs() * p.norm() / rhs_pos).max(b.abs() * n.norm() / rhs_neg);
                    Outcome::Ratio(ratio, 1.0)
                }
                _ => Outcome::Failed,
            }
        }
        BoundKind::WeightedSegment => {
            let (c, d, t, b) = (g("c"), g("d"), g("t"), g("b"));
            let rhs = c3(b, c, d);
            match segment(t, b, c, d, scaled(rhs) / b.abs()) {
                Some(v) => Outcome::Ratio(b.abs() * v.norm(), rhs),
                None => Outcome::Failed,
            }
        }
        BoundKind::Segment => {
            let (c, d, t, b) = (g("c"), g("d"), g("t"), g("b"));
            let rhs = c4(b, c, d);
            match segment(t, b, c, d, scaled(rhs)) {
                Some(v) => Outcome::Ratio(v.norm(), rhs),
                None => Outcome::Failed,
            }
        }
        BoundKind::AnnulusPair => {
            let (eps, m, t, b) = (g("eps"), g("M"), g("t"), g("b"));
            let rhs = (1.0 + (-PI * b).exp()) * power_envelope(b);
            match quad(t, b, Range::Annulus { eps, m }, scaled(rhs)) {
                Some(v) => Outcome::Ratio(v.norm(), rhs),
                None => Outcome::Failed,
            }
        }
    }
}

/// Evaluate `kind` over `grid`. Grid points whose quadrature does not converge
/// are flagged and left out of the maximum.
pub fn bound_sweep(kind: BoundKind, grid: &SweepGrid) -> Result<SweepReport> {
    let tasks = tasks(kind, grid);
    let tol = grid.tol;
    let rows: Vec<Option<SweepPoint>> = par::map_slice(&tasks, |task| {
        let params = task.params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        match evaluate(kind, task, tol) {
            Outcome::Skip => None,
            Outcome::Failed => Some(SweepPoint {
                params,
                lhs: f64::NAN,
                rhs: f64::NAN,
                ratio: f64::NAN,
                flagged: true,
            }),
            Outcome::Ratio(lhs, rhs) => Some(SweepPoint {
                params,
                lhs,
                rhs,
                ratio: lhs / rhs,
                flagged: false,
            }),
        }
    });
    let rows: Vec<SweepPoint> = rows.into_iter().flatten().collect();
    let mut max_ratio = 0.0;
    let mut argmax = Vec::new();
    let mut flagged = 0;
    let mut violations = 0;
    for r in &rows {
        if r.flagged {
            flagged += 1;
            continue;
        }
        if r.ratio > max_ratio {
            max_ratio = r.ratio;
            argmax = r.params.clone();
        }
        if kind.explicit() && r.ratio > 1.0 {
            violations += 1;
        }
    }
    Ok(SweepReport {
        kind,
        explicit: kind.explicit(),
        points: rows.len(),
        max_ratio,
        argmax,
        flagged,
        violations,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SweepGrid {
        SweepGrid {
            t: vec![-2.0, 0.0, 2.0],
            b: vec![-1.0, 0.5, 2.0],
            a: vec![0.1, 1.0, 10.0],
            ends: vec![-3.0, -0.1, 0.0, 1.0, 3.0],
            x: vec![0.01, 1.0, 5.0, 50.0],
            tol: 1e-6,
        }
    }

    #[test]
    fn explicit_kinds_hold_on_small_grid() {
        for kind in BoundKind::ALL.iter().copied().filter(|k| k.explicit()) {
            let r = bound_sweep(kind, &small()).unwrap();
            assert_eq!(r.violations, 0, "{kind:?}: max {} at {:?}", r.max_ratio, r.argmax);
            assert_eq!(r.flagged, 0, "{kind:?}");
            assert!(r.points > 0);
        }
    }

    #[test]
    fn unspecified_kinds_are_finite() {
        for kind in BoundKind::ALL.iter().copied().filter(|k| !k.explicit()) {
            let r = bound_sweep(kind, &small()).unwrap();
            assert!(r.max_ratio.is_finite() && r.max_ratio > 0.0, "{kind:?}");
            assert_eq!(r.flagged, 0, "{kind:?}");
        }
    }

    #[test]
    fn sine_integral_bound_is_tight_near_pi() {
        let g = SweepGrid {
            x: vec![0.001, PI, 100.0],
            ..small()
        };
        let r = bound_sweep(BoundKind::SineIntegral, &g).unwrap();
        // Si(π) ≈ 1.8519 is the largest partial integral.
        assert!((r.max_ratio * 4.0 - 1.851_937).abs() < 1e-3);
    }
}
