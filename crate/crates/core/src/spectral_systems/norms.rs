use crate::error::{Error, Result};
use crate::grid::{lp_lq, TimeGrid};
use nalgebra::{DMatrix, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Real field over `time samples × spatial grid`, with the spatial weights
/// used to integrate it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityField {
    pub values: Vec<Vec<f64>>,
    pub space_weights: Vec<f64>,
}

impl DensityField {
    pub fn zeros(times: usize, space_weights: Vec<f64>) -> Self {
        Self {
            values: vec![vec![0.0; space_weights.len()]; times],
            space_weights,
        }
    }

    /// `∫ ρ(t, x) dx` at every time.
    pub fn traces(&self) -> Vec<f64> {
        self.values
            .iter()
            .map(|row| row.iter().zip(&self.space_weights).map(|(v, w)| v * w).sum())
            .collect()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().flatten().fold(f64::INFINITY, |m, v| m.min(*v))
    }
}

/// `L^p_t L^q_x` over the nodes of `times`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedNormSpec {
    pub p: f64,
    pub q: f64,
    pub times: TimeGrid,
}

impl MixedNormSpec {
    pub fn new(p: f64, q: f64, times: TimeGrid) -> Self {
        Self { p, q, times }
    }
}

pub fn mixed_norm(field: &DensityField, spec: &MixedNormSpec) -> Result<f64> {
    if !(spec.p >= 1.0 && spec.q >= 1.0) {
        return Err(Error::Domain(format!(
            "mixed norm exponents must be ≥ 1, got ({}, {})",
            spec.p, spec.q
        )));
    }
    if field.values.len() != spec.times.len() {
        return Err(Error::Precondition(format!(
            "field has {} time rows, grid has {} nodes",
            field.values.len(),
            spec.times.len()
        )));
    }
    if field.values.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite field value".into()));
    }
    Ok(lp_lq(
        &field.values,
        &spec.times.weights,
        &field.space_weights,
        spec.p,
        spec.q,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchattenIndex(pub f64);

impl SchattenIndex {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha >= 1.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::Domain(format!("Schatten index must be ≥ 1, got {alpha}")))
        }
    }
}

/// `l^α` norm of a sequence (`α = ∞` is the max).
pub fn lalpha_norm(values: &[f64], alpha: f64) -> f64 {
    if alpha.is_infinite() {
        values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    } else {
        values.iter().map(|v| v.abs().powf(alpha)).sum::<f64>().powf(1.0 / alpha)
    }
}

/// `‖·‖_{𝔖^α}` from singular values.
pub fn schatten_norm(singular_values: &[f64], index: SchattenIndex) -> Result<f64> {
    SchattenIndex::new(index.0)?;
    Ok(lalpha_norm(singular_values, index.0))
}

pub fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    SVD::new(m.clone(), false, false).singular_values.iter().copied().collect()
}

/// `‖·‖_{𝔖^α}` of a matrix by a dense SVD.
pub fn schatten_norm_matrix(m: &DMatrix<Complex64>, index: SchattenIndex) -> Result<f64> {
    schatten_norm(&singular_values(m), index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn diagonal_and_rank_one() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(3.0, 0.0),
            Complex64::new(0.0, 4.0),
        ]));
        assert!((schatten_norm_matrix(&d, SchattenIndex(2.0)).unwrap() - 5.0).abs() < 1e-12);
        let u = DMatrix::from_fn(5, 1, |i, _| Complex64::new(i as f64, 1.0));
        let v = DMatrix::from_fn(4, 1, |i, _| Complex64::new(0.5, -(i as f64)));
        let m = &u * v.adjoint();
        for alpha in [1.0, 2.5, f64::INFINITY] {
            let s = schatten_norm_matrix(&m, SchattenIndex(alpha)).unwrap();
            assert!((s - u.norm() * v.norm()).abs() < 1e-10);
        }
    }

    #[test]
    fn hilbert_schmidt_is_frobenius() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = DMatrix::from_fn(8, 8, |_, _| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let s = schatten_norm_matrix(&m, SchattenIndex(2.0)).unwrap();
        assert!((s - m.norm()).abs() < 1e-12);
    }

    #[test]
    fn index_below_one_rejected() {
        assert!(SchattenIndex::new(0.5).is_err());
        assert!(schatten_norm(&[1.0], SchattenIndex(0.9)).is_err());
    }

    #[test]
    fn mixed_norm_cases() {
        let times = TimeGrid::midpoint(0.0, 2.0, 10);
        let field = DensityField {
            values: vec![vec![3.0; 8]; 10],
            space_weights: vec![0.25; 8],
        };
        let v = mixed_norm(&field, &MixedNormSpec::new(4.0, 3.0, times.clone())).unwrap();
        assert!((v - 3.0 * 2f64.powf(1.0 / 3.0) * 2f64.powf(0.25)).abs() < 1e-12);
        // p = q is a flat space-time norm
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let field = DensityField {
            values: (0..10).map(|_| (0..8).map(|_| rng.gen::<f64>()).collect()).collect(),
            space_weights: vec![0.25; 8],
        };
        let flat: f64 = field.values.iter().flatten().map(|v| 0.2 * 0.25 * v.powf(2.5)).sum::<f64>().powf(0.4);
        let v = mixed_norm(&field, &MixedNormSpec::new(2.5, 2.5, times.clone())).unwrap();
        assert!((v - flat).abs() < 1e-12);
        assert!(mixed_norm(&field, &MixedNormSpec::new(0.5, 2.0, times)).is_err());
    }
}
