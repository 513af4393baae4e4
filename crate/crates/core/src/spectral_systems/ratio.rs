use super::norms::{lalpha_norm, mixed_norm, MixedNormSpec};
use super::system::{density_field, OrthonormalSystem};
use crate::dispersive_kernels::{GeometryKind, PropagatorSpec, StrichartzLine, Symbol};
use crate::error::{Error, Result};
use crate::grid::{Grid, PeriodicGrid, Propagator, TimeGrid};
use crate::par;
use crate::quadrature::fit_slope;
use serde::{Deserialize, Serialize};

/// `α = 2q/(q+1)`.
pub fn critical_alpha(q: f64) -> f64 {
    if q.is_infinite() {
        2.0
    } else {
        2.0 * q / (q + 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrichartzRatio {
    pub density_norm: f64,
    pub weight_norm: f64,
    pub alpha: f64,
    pub ratio: f64,
}

/// Density line for the propagator's symbol on the span of `times`.
pub fn density_line(spec: &PropagatorSpec, times: &TimeGrid) -> Result<StrichartzLine> {
    if spec.geometry == GeometryKind::BallRadial {
        return Err(Error::Unsupported("no orthonormal Strichartz line on the ball".into()));
    }
    if times.is_empty() {
        return Err(Error::Precondition("empty time grid".into()));
    }
    let lo = times.nodes.iter().fold(f64::INFINITY, |m, t| m.min(t.abs()));
    let hi = times.nodes.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    StrichartzLine::for_window(spec.symbol, spec.dim, lo, hi)
}

/// `‖ρ‖_{L^p_t L^q_x} / ‖λ‖_{l^α}`, `α = 2q/(q+1)` unless given.
pub fn strichartz_ratio(
    system: &OrthonormalSystem,
    prop: &Propagator,
    norm: &MixedNormSpec,
    alpha: Option<f64>,
) -> Result<StrichartzRatio> {
    density_line(prop.spec(), &norm.times)?.check_density(norm.p, norm.q)?;
    let alpha = alpha.unwrap_or_else(|| critical_alpha(norm.q));
    if alpha < 1.0 {
        return Err(Error::Domain(format!("α = {alpha} below 1")));
    }
    let field = density_field(system, prop, &norm.times)?;
    let density_norm = mixed_norm(&field, norm)?;
    let weight_norm = lalpha_norm(&system.weights, alpha);
    let ratio = if weight_norm == 0.0 { 0.0 } else { density_norm / weight_norm };
    Ok(StrichartzRatio {
        density_norm,
        weight_norm,
        alpha,
        ratio,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalityResult {
    pub dim: usize,
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub cutoffs: Vec<usize>,
    /// `‖Σ_k |U f_k|²‖_{L^p_t L^q_x}` per cutoff.
    pub lhs: Vec<f64>,
    /// `N^{1/p} ‖λ‖_{l^α}` per cutoff.
    pub rhs: Vec<f64>,
    pub lhs_slope: f64,
    pub ratio_slope: f64,
    /// `d − 1/p − d/α`.
    pub predicted_ratio_slope: f64,
}

/// Exponential system `f_k = e^{ik·x}/(2π)^{d/2}`, `λ_k = 1`, on `max_j |k_j| ≤ N`
/// over `t ∈ [0, 2π]`, compared against `N^{1/p} ‖λ‖_{l^α}`.
pub fn optimality_experiment(
    dim: usize,
    exponents: (f64, f64),
    alpha: f64,
    cutoffs: &[usize],
    time_samples: usize,
) -> Result<OptimalityResult> {
    let (p, q) = exponents;
    StrichartzLine::Schrodinger { d: dim }.check_density(p, q)?;
    if cutoffs.len() < 4 || cutoffs.windows(2).any(|w| w[0] >= w[1]) || cutoffs[0] == 0 {
        return Err(Error::Precondition(
            "need at least 4 increasing positive cutoffs".into(),
        ));
    }
    if alpha < 1.0 {
        return Err(Error::Domain(format!("α = {alpha} below 1")));
    }
    let n_max = *cutoffs.last().unwrap_or(&1);
    let points = (2 * (2 * n_max + 1)).next_power_of_two();
    let g = PeriodicGrid::torus(dim, points);
    if g.len() > 1 << 22 {
        return Err(Error::TooLarge(format!("{} grid points", g.len())));
    }
    let times = TimeGrid::midpoint(0.0, 2.0 * std::f64::consts::PI, time_samples);
    let norm = MixedNormSpec::new(p, q, times.clone());
    let rows = par::map_slice(cutoffs, |&n| -> Result<(f64, f64)> {
        let prop = Propagator::new(PropagatorSpec::torus(Symbol::Elliptic, dim, n), Grid::Periodic(g))?;
        let functions: Vec<_> = prop.band().into_iter().map(|slot| prop.basis_function(slot)).collect();
        let count = functions.len();
        let system = OrthonormalSystem::new(functions, vec![1.0; count], Grid::Periodic(g))?;
        let field = density_field(&system, &prop, &times)?;
        let lhs = mixed_norm(&field, &norm)?;
        let rhs = (n as f64).powf(1.0 / p) * lalpha_norm(&system.weights, alpha);
        Ok((lhs, rhs))
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let ln: Vec<f64> = cutoffs.iter().map(|n| (*n as f64).ln()).collect();
    let lhs: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let rhs: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let (lhs_slope, _, _) = fit_slope(&ln, &lhs.iter().map(|v| v.ln()).collect::<Vec<_>>());
    let ratio_ln: Vec<f64> = lhs.iter().zip(&rhs).map(|(a, b)| (a / b).ln()).collect();
    let (ratio_slope, _, _) = fit_slope(&ln, &ratio_ln);
    let d = dim as f64;
    Ok(OptimalityResult {
        dim,
        p,
        q,
        alpha,
        cutoffs: cutoffs.to_vec(),
        lhs,
        rhs,
        lhs_slope,
        ratio_slope,
        predicted_ratio_slope: d - 1.0 / p - d / alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn torus(n: usize, points: usize) -> Propagator {
        Propagator::new(
            PropagatorSpec::torus(Symbol::Elliptic, 1, n),
            Grid::Periodic(PeriodicGrid::torus(1, points)),
        )
        .unwrap()
    }

    #[test]
    fn single_function_reduces_to_squared_ratio() {
        let prop = Propagator::new(
            PropagatorSpec::elliptic(1),
            Grid::Periodic(PeriodicGrid::centered(1, 128, 30.0)),
        )
        .unwrap();
        let g = PeriodicGrid::centered(1, 128, 30.0);
        let mut f: Vec<_> = (0..128)
            .map(|i| num_complex::Complex64::new((-g.point(i)[0].powi(2)).exp(), 0.0))
            .collect();
        let nf = Grid::Periodic(g).norm(&f);
        f.iter_mut().for_each(|v| *v /= nf);
        let times = TimeGrid::midpoint(0.0, 1.0, 16);
        let sys = OrthonormalSystem::new(vec![f.clone()], vec![1.0], Grid::Periodic(g)).unwrap();
        let r = strichartz_ratio(&sys, &prop, &MixedNormSpec::new(4.0, 2.0, times.clone()), None).unwrap();
        let single = crate::dispersive_kernels::single_function_strichartz(&prop, (8.0, 4.0), &f, &times).unwrap();
        assert!((r.ratio - single * single).abs() < 1e-12);
    }

    #[test]
    fn ratio_is_homogeneous_and_phase_blind() {
        let prop = torus(8, 64);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sys = OrthonormalSystem::random(&prop, 4, &mut rng)
            .unwrap()
            .with_weights(vec![1.0, 0.5, 0.25, 2.0])
            .unwrap();
        let norm = MixedNormSpec::new(4.0, 2.0, TimeGrid::midpoint(0.0, 0.1, 16));
        let base = strichartz_ratio(&sys, &prop, &norm, None).unwrap().ratio;
        let scaled = sys.clone().with_weights(vec![3.0, 1.5, 0.75, 6.0]).unwrap();
        assert!((strichartz_ratio(&scaled, &prop, &norm, None).unwrap().ratio - base).abs() < 1e-12);
        let mut rotated = sys.clone();
        for (j, f) in rotated.functions.iter_mut().enumerate() {
            let u = num_complex::Complex64::from_polar(1.0, 0.7 * j as f64 + 0.1);
            f.iter_mut().for_each(|v| *v *= u);
        }
        assert!((strichartz_ratio(&rotated, &prop, &norm, None).unwrap().ratio - base).abs() < 1e-12);
    }

    #[test]
    fn inadmissible_exponents_rejected() {
        let prop = torus(4, 32);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let sys = OrthonormalSystem::random(&prop, 2, &mut rng).unwrap();
        let norm = MixedNormSpec::new(3.0, 2.0, TimeGrid::midpoint(0.0, 0.1, 4));
        assert!(matches!(
            strichartz_ratio(&sys, &prop, &norm, None),
            Err(Error::Inadmissible(_))
        ));
        assert!(optimality_experiment(1, (3.0, 2.0), 1.0, &[4, 8, 16, 32], 8).is_err());
        assert!(optimality_experiment(1, (4.0, 2.0), 1.0, &[4, 8, 16], 8).is_err());
    }

    #[test]
    fn optimality_slopes() {
        let eq = optimality_experiment(1, (4.0, 2.0), 4.0 / 3.0, &[4, 8, 16, 32], 16).unwrap();
        assert!((eq.lhs_slope - 1.0).abs() < 0.1, "{}", eq.lhs_slope);
        assert!(eq.ratio_slope <= 0.05, "{}", eq.ratio_slope);
        let above = optimality_experiment(1, (4.0, 2.0), 2.0, &[4, 8, 16, 32], 16).unwrap();
        assert!((above.ratio_slope - 0.25).abs() < 0.05, "{}", above.ratio_slope);
        assert!((above.predicted_ratio_slope - 0.25).abs() < 1e-12);
    }
}
