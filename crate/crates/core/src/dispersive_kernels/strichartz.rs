use super::{GeometryKind, Symbol};
use crate::error::{Error, Result};
use crate::grid::{lp_lq, Grid, Propagator, TimeGrid};
use crate::par;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Scaling line `a/p + b/q = c` for a single solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StrichartzLine {
    /// `2/p + d/q = d/2`
    Schrodinger { d: usize },
    /// `2/p + 1/q = 1/2`, times up to 1.
    BoussinesqSmall,
    /// `3/p + 1/q = 1/2`, times from 1 on.
    BoussinesqLarge,
}

impl StrichartzLine {
    /// Line for a symbol on the time window `[t0, t1]`.
    pub fn for_window(symbol: Symbol, dim: usize, t0: f64, t1: f64) -> Result<Self> {
        match symbol {
            Symbol::Boussinesq if t1 <= 1.0 => Ok(Self::BoussinesqSmall),
            Symbol::Boussinesq if t0 >= 1.0 => Ok(Self::BoussinesqLarge),
            Symbol::Boussinesq => Err(Error::Precondition(format!(
                "window [{t0}, {t1}] straddles t = 1"
            ))),
            _ => Ok(Self::Schrodinger { d: dim }),
        }
    }

    /// `a/p + b/q − c`.
    pub fn gap(&self, p: f64, q: f64) -> f64 {
        let (a, b, c) = match *self {
            Self::Schrodinger { d } => (2.0, d as f64, d as f64 / 2.0),
            Self::BoussinesqSmall => (2.0, 1.0, 0.5),
            Self::BoussinesqLarge => (3.0, 1.0, 0.5),
        };
        a / p + b / q - c
    }

    pub fn check(&self, p: f64, q: f64) -> Result<()> {
        if !(p >= 2.0 && q >= 2.0) {
            return Err(Error::Inadmissible(format!("need p, q ≥ 2, got ({p}, {q})")));
        }
        if self.gap(p, q).abs() > 1e-9 {
            return Err(Error::Inadmissible(format!(
                "({p}, {q}) is off the line {self:?} by {:.3e}",
                self.gap(p, q)
            )));
        }
        if let Self::Schrodinger { d: 2 } = self {
            if p == 2.0 {
                return Err(Error::Inadmissible("(2, ∞) endpoint in d = 2".into()));
            }
        }
        Ok(())
    }
}

impl StrichartzLine {
    /// Density version of the line, `a/p + b/q = 2c`, for `ρ = Σ λ_j |U f_j|²`.
    pub fn density_gap(&self, p: f64, q: f64) -> f64 {
        let c = match *self {
            Self::Schrodinger { d } => d as f64 / 2.0,
            _ => 0.5,
        };
        self.gap(p, q) - c
    }

    /// Exponents for the orthonormal-system estimate.
    pub fn check_density(&self, p: f64, q: f64) -> Result<()> {
        if !(p >= 1.0 && q >= 1.0) {
            return Err(Error::Inadmissible(format!("need p, q ≥ 1, got ({p}, {q})")));
        }
        if self.density_gap(p, q).abs() > 1e-9 {
            return Err(Error::Inadmissible(format!(
                "({p}, {q}) is off the density line of {self:?} by {:.3e}",
                self.density_gap(p, q)
            )));
        }
        if let Self::Schrodinger { d } = *self {
            if d >= 2 && q >= (d as f64 + 1.0) / (d as f64 - 1.0) {
                return Err(Error::Inadmissible(format!(
                    "q = {q} must stay below (d+1)/(d-1) in d = {d}"
                )));
            }
        }
        Ok(())
    }
}

/// `‖e^{-itP(D)} f‖_{L^p_t L^q_x} / ‖f‖₂` over the nodes of `times`.
pub fn single_function_strichartz(
    prop: &Propagator,
    exponents: (f64, f64),
    f: &[Complex64],
    times: &TimeGrid,
) -> Result<f64> {
    let spec = prop.spec();
    if spec.geometry != GeometryKind::Euclidean {
        return Err(Error::Unsupported("single-function estimates are checked on ℝ^d".into()));
    }
    let grid = prop.grid();
    if f.len() != grid.len() {
        return Err(Error::Precondition(format!(
            "data has {} samples, grid has {}",
            f.len(),
            grid.len()
        )));
    }
    if times.is_empty() {
        return Err(Error::Precondition("empty time grid".into()));
    }
    let t0 = times.nodes.iter().cloned().fold(f64::INFINITY, f64::min);
    let t1 = times.nodes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (p, q) = exponents;
    StrichartzLine::for_window(spec.symbol, spec.dim, t0.abs().min(t1.abs()), t0.abs().max(t1.abs()))?
        .check(p, q)?;
    let norm = grid.norm(f);
    if norm == 0.0 {
        return Err(Error::Precondition("zero initial data".into()));
    }
    let c0 = prop.analyze(f);
    let rows = par::map_slice(&times.nodes, |&t| {
        let mut c = c0.clone();
        prop.evolve_coefficients(&mut c, t);
        prop.synthesize(&c).iter().map(|v| v.norm()).collect::<Vec<f64>>()
    });
    let space = match grid {
        Grid::Periodic(g) => vec![g.cell(); g.len()],
        Grid::Radial(_) => grid.weights(),
    };
    Ok(lp_lq(&rows, &times.weights, &space, p, q) / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersive_kernels::PropagatorSpec;
    use crate::grid::PeriodicGrid;

    fn gaussian(g: &PeriodicGrid) -> Vec<Complex64> {
        (0..g.len())
            .map(|i| Complex64::new((-0.5 * g.point(i)[0].powi(2)).exp(), 0.0))
            .collect()
    }

    fn setup() -> (Propagator, PeriodicGrid) {
        let g = PeriodicGrid::centered(1, 256, 40.0);
        (Propagator::new(PropagatorSpec::elliptic(1), Grid::Periodic(g)).unwrap(), g)
    }

    #[test]
    fn energy_norm_is_conserved() {
        let (prop, g) = setup();
        let times = TimeGrid::midpoint(0.0, 1.0, 16);
        let r = single_function_strichartz(&prop, (f64::INFINITY, 2.0), &gaussian(&g), &times).unwrap();
        assert!((r - 1.0).abs() < 1e-12, "{r}");
    }

    #[test]
    fn gaussian_closed_form() {
        // |u(t, 0)| = (1 + 4t²)^{-1/4} is the maximum, so the L^4_t L^∞_x norm
        // on [0, T] is (atan(2T)/2)^{1/4}; ‖f‖₂ = π^{1/4}
        let (prop, g) = setup();
        let times = TimeGrid::composite_gauss(&[0.0, 0.25, 0.5, 0.75, 1.0], 12);
        let r = single_function_strichartz(&prop, (4.0, f64::INFINITY), &gaussian(&g), &times).unwrap();
        let exact = (2f64.atan() / 2.0).powf(0.25) / std::f64::consts::PI.powf(0.25);
        assert!((r - exact).abs() < 1e-10, "{r} vs {exact}");
    }

    #[test]
    fn ratio_is_homogeneous() {
        let (prop, g) = setup();
        let times = TimeGrid::midpoint(0.0, 0.5, 8);
        let f = gaussian(&g);
        let f2: Vec<Complex64> = f.iter().map(|v| v * 2.0).collect();
        let a = single_function_strichartz(&prop, (8.0, 4.0), &f, &times).unwrap();
        let b = single_function_strichartz(&prop, (8.0, 4.0), &f2, &times).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn off_line_exponents_rejected() {
        let (prop, g) = setup();
        let times = TimeGrid::midpoint(0.0, 0.5, 8);
        assert!(matches!(
            single_function_strichartz(&prop, (4.0, 4.0), &gaussian(&g), &times),
            Err(Error::Inadmissible(_))
        ));
        let line = StrichartzLine::for_window(Symbol::Boussinesq, 1, 0.0, 0.5).unwrap();
        assert!(line.check(6.0, 6.0).is_ok());
        assert!(line.check(9.0, 3.0).is_err());
        let line = StrichartzLine::for_window(Symbol::Boussinesq, 1, 2.0, 5.0).unwrap();
        assert!(line.check(12.0, 4.0).is_ok());
        assert!(StrichartzLine::for_window(Symbol::Boussinesq, 1, 0.5, 2.0).is_err());
        assert!(StrichartzLine::Schrodinger { d: 2 }.check(2.0, f64::INFINITY).is_err());
    }

    #[test]
    fn density_lines() {
        assert!(StrichartzLine::Schrodinger { d: 1 }.check_density(4.0, 2.0).is_ok());
        assert!(StrichartzLine::Schrodinger { d: 1 }.check_density(10.0, 1.25).is_ok());
        assert!(StrichartzLine::Schrodinger { d: 3 }.check_density(4.0, 1.2).is_ok());
        assert!(StrichartzLine::Schrodinger { d: 3 }.check_density(4.0 / 3.0, 2.0).is_err());
        assert!(StrichartzLine::BoussinesqSmall.check_density(2.8, 3.5).is_ok());
        assert!(StrichartzLine::BoussinesqLarge.check_density(6.0, 2.0).is_ok());
        assert!(StrichartzLine::BoussinesqLarge.check_density(4.0, 2.0).is_err());
    }
}
