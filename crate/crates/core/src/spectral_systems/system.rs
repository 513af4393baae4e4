use super::norms::DensityField;
use crate::error::{Error, Result};
use crate::grid::{Grid, Propagator, TimeGrid};
use crate::par;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

const GRAM_TOL: f64 = 1e-10;

/// Finite orthonormal family `(f_j)` with weights `λ_j`, sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthonormalSystem {
    pub functions: Vec<Vec<Complex64>>,
    pub weights: Vec<f64>,
    pub grid: Grid,
}

impl OrthonormalSystem {
    pub fn new(functions: Vec<Vec<Complex64>>, weights: Vec<f64>, grid: Grid) -> Result<Self> {
        if functions.len() != weights.len() {
            return Err(Error::Precondition(format!(
                "{} functions but {} weights",
                functions.len(),
                weights.len()
            )));
        }
        if let Some(f) = functions.iter().find(|f| f.len() != grid.len()) {
            return Err(Error::Precondition(format!(
                "function has {} samples, grid has {}",
                f.len(),
                grid.len()
            )));
        }
        let s = Self {
            functions,
            weights,
            grid,
        };
        let err = s.gram_error();
        if err > GRAM_TOL {
            return Err(Error::Precondition(format!("system is not orthonormal: Gram error {err:.3e}")));
        }
        Ok(s)
    }

    /// `max |⟨f_i, f_j⟩ − δ_ij|`.
    pub fn gram_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.functions.iter().enumerate() {
            for (j, b) in self.functions.iter().enumerate().skip(i) {
                let d = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.grid.inner(a, b) - d).norm());
            }
        }
        worst
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// Orthonormal system from orthonormal coefficient vectors over the band of `prop`.
    pub fn from_band_coefficients(prop: &Propagator, coefficients: &[Vec<Complex64>], weights: Vec<f64>) -> Result<Self> {
        let band = prop.band();
        let n = prop.grid().len();
        let functions = coefficients
            .iter()
            .map(|c| {
                let mut full = vec![Complex64::new(0.0, 0.0); n];
                for (slot, v) in band.iter().zip(c) {
                    full[*slot] = *v;
                }
                prop.synthesize(&full)
            })
            .collect();
        Self::new(functions, weights, *prop.grid())
    }

    /// `count` functions from QR-orthonormalized complex Gaussian coefficients
    /// on the band of `prop`, all weights 1.
    pub fn random<R: Rng>(prop: &Propagator, count: usize, rng: &mut R) -> Result<Self> {
        let coefficients = random_orthonormal_columns(prop.band().len(), count, rng)?;
        Self::from_band_coefficients(prop, &coefficients, vec![1.0; count])
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.functions.len() {
            return Err(Error::Precondition("weights length differs from system size".into()));
        }
        self.weights = weights;
        Ok(self)
    }
}

/// `count` orthonormal vectors in `ℂ^dim` from a QR factorization of a Gaussian matrix.
pub fn random_orthonormal_columns<R: Rng>(dim: usize, count: usize, rng: &mut R) -> Result<Vec<Vec<Complex64>>> {
    if count > dim {
        return Err(Error::Precondition(format!(
            "cannot fit {count} orthonormal vectors in a band of {dim} modes"
        )));
    }
    let mut m = DMatrix::<Complex64>::zeros(dim, count);
    for j in 0..count {
        for i in 0..dim {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            m[(i, j)] = Complex64::new(re, im);
        }
    }
    let q = m.qr().q();
    Ok((0..count).map(|j| q.column(j).iter().copied().collect()).collect())
}

/// `[time][function][point]`.
pub type Snapshots = Vec<Vec<Vec<Complex64>>>;

fn check_geometry(system: &OrthonormalSystem, prop: &Propagator) -> Result<()> {
    if system.grid != *prop.grid() {
        return Err(Error::GeometryMismatch(
            "system and propagator live on different grids".into(),
        ));
    }
    Ok(())
}

/// `e^{-itP(D)} f_j` for every node of `times`.
pub fn propagate(system: &OrthonormalSystem, prop: &Propagator, times: &[f64]) -> Result<Snapshots> {
    check_geometry(system, prop)?;
    let coeffs: Vec<Vec<Complex64>> = system.functions.iter().map(|f| prop.analyze(f)).collect();
    Ok(par::map_slice(times, |&t| {
        coeffs
            .iter()
            .map(|c| {
                let mut c = c.clone();
                prop.evolve_coefficients(&mut c, t);
                prop.synthesize(&c)
            })
            .collect()
    }))
}

/// `ρ(t, x) = Σ_j λ_j |f_j(t, x)|²`.
pub fn density(system: &OrthonormalSystem, snapshots: &Snapshots) -> DensityField {
    let weights = system.grid.weights();
    let values = snapshots
        .iter()
        .map(|fs| {
            let mut row = vec![0.0; weights.len()];
            for (f, lam) in fs.iter().zip(&system.weights) {
                for (r, v) in row.iter_mut().zip(f) {
                    *r += lam * v.norm_sqr();
                }
            }
            row
        })
        .collect();
    DensityField {
        values,
        space_weights: weights,
    }
}

/// [`propagate`] followed by [`density`] without keeping the snapshots.
pub fn density_field(system: &OrthonormalSystem, prop: &Propagator, times: &TimeGrid) -> Result<DensityField> {
    check_geometry(system, prop)?;
    let weights = system.grid.weights();
    let coeffs: Vec<Vec<Complex64>> = system.functions.iter().map(|f| prop.analyze(f)).collect();
    let values = par::map_slice(&times.nodes, |&t| {
        let mut row = vec![0.0; weights.len()];
        for (c, lam) in coeffs.iter().zip(&system.weights) {
            if *lam == 0.0 {
                continue;
            }
            let mut c = c.clone();
            prop.evolve_coefficients(&mut c, t);
            for (r, v) in row.iter_mut().zip(prop.synthesize(&c)) {
                *r += lam * v.norm_sqr();
            }
        }
        row
    });
    Ok(DensityField {
        values,
        space_weights: weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersive_kernels::{PropagatorSpec, Symbol};
    use crate::grid::{PeriodicGrid, RadialGrid};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn torus_prop(n_cut: usize) -> Propagator {
        Propagator::new(
            PropagatorSpec::torus(Symbol::Elliptic, 1, n_cut),
            Grid::Periodic(PeriodicGrid::torus(1, 64)),
        )
        .unwrap()
    }

    #[test]
    fn propagation_keeps_orthonormality() {
        let prop = torus_prop(10);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let sys = OrthonormalSystem::random(&prop, 6, &mut rng).unwrap();
        let snaps = propagate(&sys, &prop, &[0.0, 0.3, 2.0]).unwrap();
        for (f, g) in snaps[0].iter().zip(&sys.functions) {
            for (a, b) in f.iter().zip(g) {
                assert!((a - b).norm() < 1e-12);
            }
        }
        for s in &snaps {
            let evolved = OrthonormalSystem {
                functions: s.clone(),
                weights: sys.weights.clone(),
                grid: sys.grid,
            };
            assert!(evolved.gram_error() < 1e-10);
        }
    }

    #[test]
    fn trace_is_conserved() {
        let prop = torus_prop(12);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let sys = OrthonormalSystem::random(&prop, 5, &mut rng)
            .unwrap()
            .with_weights(vec![0.5, 1.0, 2.0, 0.1, 3.0])
            .unwrap();
        let times = TimeGrid::midpoint(0.0, 1.0, 7);
        let field = density_field(&sys, &prop, &times).unwrap();
        for tr in field.traces() {
            assert!((tr - 6.6).abs() < 1e-10 * 6.6);
        }
        let snaps = propagate(&sys, &prop, &times.nodes).unwrap();
        assert_eq!(density(&sys, &snaps), field);
        assert!(field.min_value() >= -1e-12);
    }

    #[test]
    fn full_torus_system_has_constant_density() {
        let n = 2;
        let prop = torus_prop(n);
        let g = PeriodicGrid::torus(1, 64);
        let functions: Vec<_> = (-(n as i64)..=n as i64)
            .map(|k| prop.basis_function(g.slot(&[k]).unwrap()))
            .collect();
        let sys = OrthonormalSystem::new(functions, vec![1.0; 2 * n + 1], Grid::Periodic(g)).unwrap();
        let field = density_field(&sys, &prop, &TimeGrid::midpoint(0.0, 1.0, 3)).unwrap();
        for v in field.values.iter().flatten() {
            assert!((v - 5.0 / (2.0 * PI)).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_weights_give_zero_density() {
        let prop = torus_prop(4);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let sys = OrthonormalSystem::random(&prop, 3, &mut rng)
            .unwrap()
            .with_weights(vec![0.0; 3])
            .unwrap();
        let field = density_field(&sys, &prop, &TimeGrid::midpoint(0.0, 1.0, 3)).unwrap();
        assert!(field.values.iter().flatten().all(|v| *v == 0.0));
    }

    #[test]
    fn ball_system_and_mismatch() {
        let g = RadialGrid { n: 32 };
        let prop = Propagator::new(PropagatorSpec::ball(8), Grid::Radial(g)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let sys = OrthonormalSystem::random(&prop, 4, &mut rng).unwrap();
        let field = density_field(&sys, &prop, &TimeGrid::midpoint(0.0, 0.1, 4)).unwrap();
        for tr in field.traces() {
            assert!((tr - 4.0).abs() < 1e-10);
        }
        assert!(matches!(
            propagate(&sys, &torus_prop(4), &[0.0]),
            Err(Error::GeometryMismatch(_))
        ));
    }

    #[test]
    fn non_orthonormal_rejected() {
        let g = Grid::Periodic(PeriodicGrid::torus(1, 8));
        let f = vec![Complex64::new(1.0, 0.0); 8];
        assert!(OrthonormalSystem::new(vec![f], vec![1.0], g).is_err());
    }
}
