//! Gauss-Legendre panels with degree growth, adaptive bisection, Wynn's
//! epsilon algorithm and compensated summation.

use num_complex::Complex64;
use std::sync::OnceLock;

/// Node/weight table on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Build an `n`-point rule by Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrate a complex function over [a, b].
    pub fn integrate<F: FnMut(f64) -> Complex64>(&self, a: f64, b: f64, mut f: F) -> Complex64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(c + h * x) * *w;
        }
        acc * h
    }

    /// Integrate a real function over [a, b].
    pub fn integrate_real<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(c + h * x) * *w;
        }
        acc * h
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Orders tried on each panel before it is bisected.
pub const PANEL_ORDERS: [usize; 4] = [10, 20, 40, 80];

/// Shared rule of the given position in [`PANEL_ORDERS`].
pub fn panel_rule(level: usize) -> &'static GaussLegendre {
    static RULES: OnceLock<Vec<GaussLegendre>> = OnceLock::new();
    &RULES.get_or_init(|| PANEL_ORDERS.iter().map(|&n| GaussLegendre::new(n)).collect())[level]
}

/// Accumulated outcome of an integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl Integral {
    pub fn zero() -> Self {
        Self {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evaluations: 0,
            converged: true,
        }
    }

    pub fn exact(value: Complex64) -> Self {
        Self {
            value,
            ..Self::zero()
        }
    }

    pub fn add(&mut self, other: Integral) {
        self.value += other.value;
        self.error += other.error;
        self.evaluations += other.evaluations;
        self.converged &= other.converged;
    }

    pub fn scaled(mut self, s: Complex64) -> Self {
        self.value *= s;
        self.error *= s.norm();
        self
    }
}

impl std::ops::Add for Integral {
    type Output = Integral;
    fn add(mut self, rhs: Integral) -> Integral {
        Integral::add(&mut self, rhs);
        self
    }
}

/// Integrate `f` over [a, b] to absolute tolerance `tol`.
///
/// Each panel climbs through [`PANEL_ORDERS`]; two successive orders agreeing
/// within the panel's share of `tol` accepts it, otherwise it is halved.
pub fn adaptive<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, tol: f64, budget: usize) -> Integral {
    let mut out = Integral::zero();
    if a == b {
        return out;
    }
    let mut stack = vec![(a, b, tol.max(f64::MIN_POSITIVE), 0u32)];
    while let Some((lo, hi, ptol, depth)) = stack.pop() {
        let mut prev = panel_rule(0).integrate(lo, hi, f);
        out.evaluations += PANEL_ORDERS[0];
        let mut accepted = None;
        let mut last_diff = f64::INFINITY;
        for level in 1..PANEL_ORDERS.len() {
            let cur = panel_rule(level).integrate(lo, hi, f);
            out.evaluations += PANEL_ORDERS[level];
            let diff = (cur - prev).norm();
            last_diff = diff;
            if diff <= ptol || diff <= 4.0 * f64::EPSILON * cur.norm() {
                accepted = Some((cur, diff));
                break;
            }
            prev = cur;
        }
        match accepted {
            Some((v, e)) => {
                out.value += v;
                out.error += e;
            }
            None => {
                if depth >= 48 || out.evaluations > budget {
                    out.value += prev;
                    out.error += last_diff;
                    out.converged = false;
                } else {
                    let mid = 0.5 * (lo + hi);
                    stack.push((mid, hi, 0.5 * ptol, depth + 1));
                    stack.push((lo, mid, 0.5 * ptol, depth + 1));
                }
            }
        }
    }
    out
}

/// Integrate over consecutive breakpoints, splitting `tol` by panel width.
pub fn adaptive_panels<F: Fn(f64) -> Complex64>(f: &F, breaks: &[f64], tol: f64, budget: usize) -> Integral {
    let mut out = Integral::zero();
    if breaks.len() < 2 {
        return out;
    }
    let total = (breaks[breaks.len() - 1] - breaks[0]).abs();
    for w in breaks.windows(2) {
        let share = if total > 0.0 {
            tol * (w[1] - w[0]).abs() / total
        } else {
            tol
        };
        let remaining = budget.saturating_sub(out.evaluations);
        out.add(adaptive(f, w[0], w[1], share, remaining));
    }
    out
}

/// Wynn's epsilon algorithm on a sequence of partial sums.
///
/// Returns the accelerated limit and the gap between the last two
/// even-column estimates as an error proxy.
pub fn wynn_epsilon(seq: &[Complex64]) -> (Complex64, f64) {
    let n = seq.len();
    if n == 0 {
        return (Complex64::new(0.0, 0.0), f64::INFINITY);
    }
    if n < 3 {
        let e = if n == 2 { (seq[1] - seq[0]).norm() } else { f64::INFINITY };
        return (seq[n - 1], e);
    }
    // eps[k] holds column k of the table for the current anti-diagonal.
    let mut prev_col: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut cur_col: Vec<Complex64> = seq.to_vec();
    let mut estimates: Vec<Complex64> = vec![seq[n - 1]];
    let mut k = 0;
    while cur_col.len() > 1 {
        let mut next = Vec::with_capacity(cur_col.len() - 1);
        for i in 0..cur_col.len() - 1 {
            let d = cur_col[i + 1] - cur_col[i];
            let inv = if d.norm() < 1e-300 {
                Complex64::new(1e300, 0.0)
            } else {
                d.inv()
            };
            next.push(prev_col[i + 1] + inv);
        }
        prev_col = cur_col;
        cur_col = next;
        k += 1;
        if k % 2 == 0 {
            if let Some(last) = cur_col.last() {
                if last.is_finite() {
                    estimates.push(*last);
                }
            }
        }
    }
    let m = estimates.len();
    let best = estimates[m - 1];
    let err = if m >= 2 {
        (estimates[m - 1] - estimates[m - 2]).norm()
    } else {
        f64::INFINITY
    };
    (best, err)
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Geometric grid of `n` points from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Uniform grid of `n` points from `lo` to `hi` inclusive.
pub fn lin_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Ordinary least squares slope of `y` on `x` with its standard error.
pub fn fit_slope(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let stderr = if x.len() > 2 {
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (slope, stderr, intercept)
}
