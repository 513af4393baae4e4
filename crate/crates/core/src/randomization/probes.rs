use super::{Level, RandomizationEnsemble, RandomizedOperator};
use crate::dispersive_kernels::GeometryKind;
use crate::error::{Error, Result};
use crate::par;
use crate::stats::{ks_two_sample, KsTest};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

fn mean_and_stderr(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// `(E X^r)^{1/r}` and its delta-method standard error from samples of `X ≥ 0`.
fn moment(v: &[f64], r: f64) -> (f64, f64) {
    let powers: Vec<f64> = v.iter().map(|x| x.powf(r)).collect();
    let (m, se) = mean_and_stderr(&powers);
    let root = m.powf(1.0 / r);
    let se_root = if m > 0.0 { root * se / (r * m) } else { 0.0 };
    (root, se_root)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KhinchinRow {
    pub r: f64,
    /// `‖Σ a_k g_k‖_{L^r_ω}`.
    pub moment: f64,
    pub moment_stderr: f64,
    /// `moment / (√r ‖a‖₂)`.
    pub ratio: f64,
    pub ratio_stderr: f64,
}

/// Monte Carlo `L^r_ω` norms of `Σ a_k g_k` against `√r ‖a‖₂`.
pub fn khinchin_check(a: &[f64], ensemble: &RandomizationEnsemble, rs: &[f64]) -> Result<Vec<KhinchinRow>> {
    if let Some(r) = rs.iter().find(|r| !(**r >= 2.0)) {
        return Err(Error::Domain(format!("moment order r = {r} below 2")));
    }
    let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::Precondition("coefficients must be a nonzero l² vector".into()));
    }
    let sums = par::map_indexed(ensemble.samples, |s| {
        let mut rng = ensemble.stream(s, Level::Cell);
        a.iter().map(|ak| ak * ensemble.distribution.draw(&mut rng)).sum::<f64>().abs()
    });
    Ok(rs
        .iter()
        .map(|&r| {
            let (m, se) = moment(&sums, r);
            let scale = r.sqrt() * norm;
            KhinchinRow {
                r,
                moment: m,
                moment_stderr: se,
                ratio: m / scale,
                ratio_stderr: se / scale,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L2LpTable {
    pub p: f64,
    pub times: Vec<f64>,
    /// `‖ ‖λ_n (U(t) f_n^ω − f_n^ω)‖_{L^p_ω L²_x} ‖_{l²_n}`.
    pub values: Vec<f64>,
    pub stderr: Vec<f64>,
    /// `values / (p^{d/2} (‖γ₀‖_{𝔖²} + 1))`.
    pub scaled: Vec<f64>,
}

fn evolved_gap(op: &RandomizedOperator, c: &[Complex64], t: f64) -> f64 {
    let prop = op.randomizer.propagator();
    let mut e = c.to_vec();
    prop.evolve_coefficients(&mut e, t);
    e.iter().zip(c).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
}

/// Size of the flow's departure from the identity on randomized data.
///
/// The inner norm is `L²_x`, computed from spectral coefficients.
pub fn l2lp_estimate_probe(
    op: &RandomizedOperator,
    ensemble: &RandomizationEnsemble,
    times: &[f64],
    p: f64,
) -> Result<L2LpTable> {
    if !(p >= 2.0) {
        return Err(Error::Domain(format!("p = {p} below 2")));
    }
    // [sample][time][function]
    let gaps: Vec<Vec<Vec<f64>>> = par::map_indexed(ensemble.samples, |s| {
        let real = op.realize(ensemble, s);
        times
            .iter()
            .map(|&t| real.coefficients.iter().map(|c| evolved_gap(op, c, t)).collect())
            .collect()
    });
    let dim = op.randomizer.propagator().spec().dim as f64;
    let scale = p.powf(dim / 2.0) * (op.hilbert_schmidt() + 1.0);
    let mut values = Vec::new();
    let mut stderr = Vec::new();
    for ti in 0..times.len() {
        let mut total = 0.0;
        let mut var = 0.0;
        for (n, lam) in op.weights.iter().enumerate() {
            let col: Vec<f64> = gaps.iter().map(|g| g[ti][n]).collect();
            let (m, se) = moment(&col, p);
            total += lam * lam * m * m;
            var += (lam * lam * 2.0 * m * se).powi(2);
        }
        let v = total.sqrt();
        values.push(v);
        stderr.push(if v > 0.0 { var.sqrt() / (2.0 * v) } else { 0.0 });
    }
    Ok(L2LpTable {
        p,
        times: times.to_vec(),
        scaled: values.iter().map(|v| v / scale).collect(),
        values,
        stderr,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub p: f64,
    pub function: usize,
    /// `‖ ‖f^ω‖_{L²_x} ‖_{L^p_ω}`.
    pub initial: f64,
    /// `‖ ‖U(t) f^ω‖_{L²_x} ‖_{L^p_ω}`.
    pub evolved: f64,
    pub stderr: f64,
    /// `max(initial, evolved) / p^{d/2}`.
    pub ratio: f64,
}

/// `p`-th moments of randomized data and of its evolution at time `t`.
pub fn moment_bound_probe(
    op: &RandomizedOperator,
    ensemble: &RandomizationEnsemble,
    ps: &[f64],
    t: f64,
) -> Result<Vec<MomentRow>> {
    if let Some(p) = ps.iter().find(|p| !(**p >= 2.0)) {
        return Err(Error::Domain(format!("p = {p} below 2")));
    }
    let prop = op.randomizer.propagator();
    let norms: Vec<Vec<(f64, f64)>> = par::map_indexed(ensemble.samples, |s| {
        let real = op.realize(ensemble, s);
        real.coefficients
            .iter()
            .map(|c| {
                let a = c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                let mut e = c.clone();
                prop.evolve_coefficients(&mut e, t);
                let b = e.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                (a, b)
            })
            .collect()
    });
    let dim = prop.spec().dim as f64;
    let mut rows = Vec::new();
    for &p in ps {
        for n in 0..op.coefficients.len() {
            let a: Vec<f64> = norms.iter().map(|v| v[n].0).collect();
            let b: Vec<f64> = norms.iter().map(|v| v[n].1).collect();
            let (ma, sa) = moment(&a, p);
            let (mb, sb) = moment(&b, p);
            rows.push(MomentRow {
                p,
                function: n,
                initial: ma,
                evolved: mb,
                stderr: sa.max(sb),
                ratio: ma.max(mb) / p.powf(dim / 2.0),
            });
        }
    }
    Ok(rows)
}

/// `α(ε) = C e (‖γ₀‖_{𝔖²} + 1) ε^{1/2} (ε ln(1/ε))^{κ}` with `κ = (2d+1)/2`,
/// or `3/2` on the ball.
pub fn threshold(op: &RandomizedOperator, epsilon: f64, constant: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(Error::Domain(format!("ε = {epsilon} outside (0, 1/2]")));
    }
    let spec = op.randomizer.propagator().spec();
    let kappa = match spec.geometry {
        GeometryKind::BallRadial => 1.5,
        _ => (2.0 * spec.dim as f64 + 1.0) / 2.0,
    };
    Ok(constant
        * std::f64::consts::E
        * (op.hilbert_schmidt() + 1.0)
        * epsilon.sqrt()
        * (epsilon * (1.0 / epsilon).ln()).powf(kappa))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub epsilon: f64,
    pub threshold: f64,
    pub times: Vec<f64>,
    /// `P(sup_x |F(t)| > α(ε))`.
    pub probability: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Mean of `sup_x |F(t)|`.
    pub mean_sup: Vec<f64>,
    /// Largest rise of the probability as `t` decreases, in combined standard
    /// errors (≤ 0 when the table is monotone).
    pub worst_rise: f64,
}

/// Tail probabilities of `F = ρ_{γ₀^{ω,ω̃}} − ρ_{U(t)γ₀^{ω,ω̃}U(t)*}` over the
/// grid points.
pub fn convergence_probe(
    op: &RandomizedOperator,
    ensemble: &RandomizationEnsemble,
    epsilon: f64,
    constant: f64,
    times: &[f64],
) -> Result<ConvergenceTable> {
    let alpha = threshold(op, epsilon, constant)?;
    let sups: Vec<Vec<f64>> = par::map_indexed(ensemble.samples, |s| {
        let real = op.realize(ensemble, s);
        let rho0 = op.density(&real, 0.0);
        times
            .iter()
            .map(|&t| {
                op.density(&real, t)
                    .iter()
                    .zip(&rho0)
                    .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
            })
            .collect()
    });
    let n = ensemble.samples as f64;
    let mut probability = Vec::new();
    let mut stderr = Vec::new();
    let mut mean_sup = Vec::new();
    for ti in 0..times.len() {
        let hits = sups.iter().filter(|s| s[ti] > alpha).count() as f64;
        let p = hits / n;
        probability.push(p);
        stderr.push((p * (1.0 - p) / n).sqrt());
        mean_sup.push(sups.iter().map(|s| s[ti]).sum::<f64>() / n);
    }
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&i, &j| times[j].abs().total_cmp(&times[i].abs()));
    let worst_rise = order
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let se = (stderr[a].powi(2) + stderr[b].powi(2)).sqrt();
            let rise = probability[b] - probability[a];
            if rise <= 0.0 {
                rise
            } else if se == 0.0 {
                f64::INFINITY
            } else {
                rise / se
            }
        })
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(ConvergenceTable {
        epsilon,
        threshold: alpha,
        times: times.to_vec(),
        probability,
        stderr,
        mean_sup,
        worst_rise: if times.len() < 2 { 0.0 } else { worst_rise },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryCheck {
    pub ks: KsTest,
    pub samples: usize,
    pub passes: bool,
}

/// Flip the function sign of one isolated term and compare the laws of
/// `F(t, x)` before and after with a two-sample KS test. The flipped copy
/// uses an independent block of samples so the two empirical laws are
/// independent.
pub fn sign_flip_symmetry(
    op: &RandomizedOperator,
    ensemble: &RandomizationEnsemble,
    term: usize,
    t: f64,
    point: usize,
) -> Result<SymmetryCheck> {
    if term >= op.weights.len() {
        return Err(Error::Precondition(format!("no term {term}")));
    }
    if point >= op.randomizer.propagator().grid().len() {
        return Err(Error::Precondition(format!("no grid point {point}")));
    }
    let mut isolated = op.clone();
    isolated.coefficients = vec![op.coefficients[term].clone()];
    isolated.weights = vec![op.weights[term]];
    let n = ensemble.samples;
    let values = par::map_indexed(2 * n, |s| {
        let mut real = isolated.realize(ensemble, s);
        if s >= n {
            real.function_signs[0] = -real.function_signs[0];
        }
        let a = isolated.density(&real, 0.0)[point];
        let b = isolated.density(&real, t)[point];
        a - b
    });
    let ks = ks_two_sample(&values[..n], &values[n..]);
    Ok(SymmetryCheck {
        ks,
        samples: n,
        passes: ks.statistic <= ks.critical,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{Distribution, Randomizer};
    use super::*;
    use crate::dispersive_kernels::{PropagatorSpec, Symbol};
    use crate::grid::{Grid, PeriodicGrid, Propagator};

    fn torus_op(coeffs: Vec<Vec<Complex64>>, weights: Vec<f64>) -> RandomizedOperator {
        let prop = Propagator::new(
            PropagatorSpec::torus(Symbol::Elliptic, 1, 16),
            Grid::Periodic(PeriodicGrid::torus(1, 64)),
        )
        .unwrap();
        RandomizedOperator::new(Randomizer::new(prop).unwrap(), coeffs, weights).unwrap()
    }

    fn single_mode(k: usize) -> Vec<Complex64> {
        let mut c = vec![Complex64::new(0.0, 0.0); 64];
        c[k] = Complex64::new(1.0, 0.0);
        c
    }

    #[test]
    fn khinchin_exact_cases() {
        let ens = RandomizationEnsemble::new(Distribution::Rademacher, 2000, 1).unwrap();
        let rows = khinchin_check(&[1.0, 0.0, 0.0], &ens, &[2.0, 4.0, 8.0]).unwrap();
        for r in rows {
            assert!((r.moment - 1.0).abs() < 1e-14);
            assert!((r.ratio - r.r.powf(-0.5)).abs() < 1e-14);
        }
        let ens = RandomizationEnsemble::new(Distribution::StandardGaussian, 100_000, 2).unwrap();
        let a = [0.5f64.sqrt(), 0.5f64.sqrt()];
        let rows = khinchin_check(&a, &ens, &[2.0, 4.0]).unwrap();
        assert!((rows[0].moment - 1.0).abs() < 3.0 * rows[0].moment_stderr);
        assert!((rows[1].moment - 3f64.powf(0.25)).abs() < 3.0 * rows[1].moment_stderr);
        assert!(khinchin_check(&a, &ens, &[1.5]).is_err());
    }

    #[test]
    fn l2lp_single_mode_is_deterministic() {
        let op = torus_op(vec![single_mode(3)], vec![1.0]);
        let ens = RandomizationEnsemble::new(Distribution::Rademacher, 50, 3).unwrap();
        let times = [0.0, 0.01, 0.1];
        let tab = l2lp_estimate_probe(&op, &ens, &times, 4.0).unwrap();
        assert_eq!(tab.values[0], 0.0);
        for (t, v) in times.iter().zip(&tab.values) {
            let exact = 2.0 * (9.0 * t / 2.0f64).sin().abs();
            assert!((v - exact).abs() < 1e-12, "{t}: {v} vs {exact}");
        }
        assert!(l2lp_estimate_probe(&op, &ens, &times, 1.0).is_err());
    }

    #[test]
    fn l2lp_truncation_tail() {
        let coeffs: Vec<_> = (1..=6).map(single_mode).collect();
        let lam: Vec<f64> = (1..=6).map(|n| 0.5f64.powi(n)).collect();
        let full = torus_op(coeffs.clone(), lam.clone());
        let cut = torus_op(coeffs[..3].to_vec(), lam[..3].to_vec());
        let ens = RandomizationEnsemble::new(Distribution::Rademacher, 20, 4).unwrap();
        let a = l2lp_estimate_probe(&full, &ens, &[0.05], 4.0).unwrap().values[0];
        let b = l2lp_estimate_probe(&cut, &ens, &[0.05], 4.0).unwrap().values[0];
        let tail = lam[3..].iter().map(|l| l * l).sum::<f64>().sqrt();
        assert!(a >= b && a - b <= 2.0 * tail * 2.0);
    }

    #[test]
    fn torus_moments_are_exact_at_two() {
        let c: Vec<Complex64> = (0..64).map(|k| if k < 8 { Complex64::new(8f64.sqrt().recip(), 0.0) } else { Complex64::new(0.0, 0.0) }).collect();
        let op = torus_op(vec![c], vec![1.0]);
        let ens = RandomizationEnsemble::new(Distribution::Rademacher, 500, 5).unwrap();
        let rows = moment_bound_probe(&op, &ens, &[2.0, 4.0], 0.3).unwrap();
        for r in rows {
            assert!((r.initial - 1.0).abs() < 1e-12 && (r.evolved - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn convergence_single_mode_jump() {
        // one term, one mode: sup |F| = 0 identically since |U(t) e_k| = |e_k|
        let op = torus_op(vec![single_mode(2)], vec![1.0]);
        let ens = RandomizationEnsemble::new(Distribution::Rademacher, 200, 6).unwrap();
        let tab = convergence_probe(&op, &ens, 0.1, 1.0, &[0.1, 0.0]).unwrap();
        assert_eq!(tab.probability, vec![0.0, 0.0]);
        assert!(convergence_probe(&op, &ens, 0.7, 1.0, &[0.1]).is_err());
    }

    #[test]
    fn threshold_matches_formula() {
        let lam: Vec<f64> = (1..=5).map(|n| 0.5f64.powi(n)).collect();
        let op = torus_op((1..=5).map(single_mode).collect(), lam);
        let a = threshold(&op, 0.1, 1.0).unwrap();
        let hs = ((1.0 - 0.25f64.powi(5)) / 3.0).sqrt();
        let expect = std::f64::consts::E * (hs + 1.0) * 0.1f64.sqrt() * (0.1 * 10f64.ln()).powf(1.5);
        assert!((a - expect).abs() < 1e-14);
        assert!(threshold(&op, 0.05, 1.0).unwrap() < a);
    }
}
