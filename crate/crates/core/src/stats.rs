//! Small nonparametric statistics used by the experiments.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KendallTest {
    pub tau: f64,
    /// One-sided `P(τ ≥ observed)` under independence.
    pub p_value: f64,
}

fn concordance(x: &[f64], y: &[f64]) -> i64 {
    let mut s = 0i64;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let a = (x[j] - x[i]).signum() * (y[j] - y[i]).signum();
            s += a as i64;
        }
    }
    s
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Kendall's τ-a with a one-sided p-value for a positive trend: exact by
/// enumeration for up to 8 points, normal approximation beyond.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> KendallTest {
    let n = x.len().min(y.len());
    let pairs = (n * n.saturating_sub(1) / 2).max(1) as f64;
    let s = concordance(&x[..n], &y[..n]);
    let tau = s as f64 / pairs;
    let p_value = if n <= 8 {
        let ranks: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let perms = permutations(n);
        let hits = perms
            .iter()
            .filter(|p| {
                let yy: Vec<f64> = p.iter().map(|&i| i as f64).collect();
                concordance(&ranks, &yy) >= s
            })
            .count();
        hits as f64 / perms.len() as f64
    } else {
        let nf = n as f64;
        let var = nf * (nf - 1.0) * (2.0 * nf + 5.0) / 18.0;
        0.5 * erfc((s as f64 - 1.0) / (2.0 * var).sqrt())
    };
    KendallTest { tau, p_value }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsTest {
    pub statistic: f64,
    /// Critical value at the 5% level, `1.358 √((n+m)/(nm))`.
    pub critical: f64,
    /// Asymptotic p-value from the Kolmogorov distribution.
    pub p_value: f64,
}

/// Two-sample Kolmogorov-Smirnov test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsTest {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let en = (n * m / (n + m)).sqrt();
    let lambda = (en + 0.12 + 0.11 / en) * d;
    let mut p = 0.0;
    for k in 1..=100 {
        let term = 2.0 * (-1f64).powi(k - 1) * (-2.0 * (k as f64).powi(2) * lambda * lambda).exp();
        p += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    KsTest {
        statistic: d,
        critical: 1.358 * ((n + m) / (n * m)).sqrt(),
        p_value: if d == 0.0 { 1.0 } else { p.clamp(0.0, 1.0) },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kendall_exact_values() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let up = kendall_tau(&x, &[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(up.tau, 1.0);
        assert!((up.p_value - 1.0 / 120.0).abs() < 1e-15);
        let down = kendall_tau(&x, &[5.0, 4.0, 3.0, 2.0, 1.0]);
        assert_eq!((down.tau, down.p_value), (-1.0, 1.0));
        // one swap: τ = 0.8, reached by the identity and the four adjacent swaps
        let one = kendall_tau(&x, &[2.0, 1.0, 3.0, 4.0, 5.0]);
        assert!((one.tau - 0.8).abs() < 1e-15);
        assert!((one.p_value - 5.0 / 120.0).abs() < 1e-15);
    }

    #[test]
    fn kendall_normal_branch() {
        let x: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let t = kendall_tau(&x, &x);
        assert!(t.p_value < 1e-6);
    }

    #[test]
    fn ks_detects_shift_and_accepts_same() {
        let a: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
        let b: Vec<f64> = a.iter().map(|v| v + 0.0005).collect();
        let same = ks_two_sample(&a, &b);
        assert!(same.statistic <= same.critical && same.p_value > 0.5);
        let c: Vec<f64> = a.iter().map(|v| v + 0.2).collect();
        let diff = ks_two_sample(&a, &c);
        assert!((diff.statistic - 0.2).abs() < 2e-3 && diff.p_value < 1e-10);
    }
}
