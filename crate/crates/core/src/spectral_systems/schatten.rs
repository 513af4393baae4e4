//! `W₁ U U* W₂` in Schatten norms.
//!
//! On a band of `K` modes the operator factors as `B₁ B₂*` with
//! `B[(a,x), k] = √(w_a w_x) W(t_a, x) e^{-it_a P_k} e_k(x)`, so its singular
//! values are those of the `K × K` matrix `R₁ R₂*` from the QR factors.

use super::norms::{lalpha_norm, mixed_norm, singular_values, DensityField, MixedNormSpec};
use super::ratio::{critical_alpha, density_line};
use super::system::{density_field, OrthonormalSystem};
use crate::dispersive_kernels::StrichartzLine;
use crate::error::{Error, Result};
use crate::grid::{lp_lq, Grid, Propagator, TimeGrid};
use crate::par;
use crate::quadrature::fit_slope;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Largest space-time grid handled by the dense route.
pub const DENSE_LIMIT: usize = 4096;
const FACTOR_ROW_LIMIT: usize = 1 << 20;

/// Complex field over `time samples × spatial grid`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeField {
    pub values: Vec<Vec<Complex64>>,
}

impl SpaceTimeField {
    pub fn zeros(times: usize, points: usize) -> Self {
        Self {
            values: vec![vec![Complex64::new(0.0, 0.0); points]; times],
        }
    }

    /// Sample `f(t, x)`; radial grids pass `[r]`.
    pub fn from_fn<F: Fn(f64, &[f64]) -> Complex64>(times: &TimeGrid, grid: &Grid, f: F) -> Self {
        let points: Vec<Vec<f64>> = match grid {
            Grid::Periodic(g) => (0..g.len()).map(|i| g.point(i)).collect(),
            Grid::Radial(g) => (0..g.n).map(|i| vec![g.radius(i)]).collect(),
        };
        Self {
            values: times
                .nodes
                .iter()
                .map(|&t| points.iter().map(|x| f(t, x)).collect())
                .collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            values: self.values.iter().map(|r| r.iter().map(|v| v * s).collect()).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            values: self.values.iter().map(|r| r.iter().map(|v| v.conj()).collect()).collect(),
        }
    }

    /// Zero every row whose time exceeds `hi`.
    pub fn restricted(&self, times: &TimeGrid, hi: f64) -> Self {
        Self {
            values: self
                .values
                .iter()
                .zip(&times.nodes)
                .map(|(r, &t)| {
                    if t <= hi {
                        r.clone()
                    } else {
                        vec![Complex64::new(0.0, 0.0); r.len()]
                    }
                })
                .collect(),
        }
    }

    /// `‖W‖_{L^p_t L^q_x}`.
    pub fn norm(&self, times: &TimeGrid, grid: &Grid, p: f64, q: f64) -> f64 {
        let rows: Vec<Vec<f64>> = self.values.iter().map(|r| r.iter().map(|v| v.norm()).collect()).collect();
        lp_lq(&rows, &times.weights, &grid.weights(), p, q)
    }

    fn check_shape(&self, times: &TimeGrid, grid: &Grid) -> Result<()> {
        if self.values.len() != times.len() || self.values.iter().any(|r| r.len() != grid.len()) {
            return Err(Error::Precondition(format!(
                "field shape does not match {} times × {} points",
                times.len(),
                grid.len()
            )));
        }
        Ok(())
    }
}

/// Dual exponents `(p′, q′)` on the `W` side; the Schatten index is `2q′`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchattenExponents {
    pub p_prime: f64,
    pub q_prime: f64,
}

impl SchattenExponents {
    /// Solve the line of `line` for `p′` given `q′`.
    pub fn on_line(line: StrichartzLine, q_prime: f64) -> Result<Self> {
        let inv = 1.0 - Self::slope(line) / q_prime;
        if !(inv > 0.0 && inv <= 1.0) {
            return Err(Error::Inadmissible(format!("no p′ ≥ 1 for q′ = {q_prime} on {line:?}")));
        }
        let s = Self {
            p_prime: 1.0 / inv,
            q_prime,
        };
        s.check(line)?;
        Ok(s)
    }

    fn slope(line: StrichartzLine) -> f64 {
        match line {
            StrichartzLine::Schrodinger { d } => d as f64 / 2.0,
            StrichartzLine::BoussinesqSmall => 0.5,
            StrichartzLine::BoussinesqLarge => 1.0 / 3.0,
        }
    }

    pub fn index(&self) -> f64 {
        2.0 * self.q_prime
    }

    /// Exponents `(p, q)` of the equivalent density estimate.
    pub fn density_exponents(&self) -> (f64, f64) {
        let dual = |v: f64| if v == 1.0 { f64::INFINITY } else { v / (v - 1.0) };
        (dual(self.p_prime), dual(self.q_prime))
    }

    /// `1/p′ + s/q′ = 1` inside the admissible window.
    pub fn check(&self, line: StrichartzLine) -> Result<()> {
        let gap = 1.0 / self.p_prime + Self::slope(line) / self.q_prime - 1.0;
        if self.p_prime < 1.0 || gap.abs() > 1e-9 {
            return Err(Error::Inadmissible(format!(
                "(p′, q′) = ({}, {}) off the line of {line:?}",
                self.p_prime, self.q_prime
            )));
        }
        let ok = match line {
            StrichartzLine::Schrodinger { d } => {
                let d = d as f64;
                self.q_prime > (d + 1.0) / 2.0 && self.q_prime < (d + 2.0) / 2.0
            }
            _ => self.q_prime > 1.0,
        };
        if !ok {
            return Err(Error::Inadmissible(format!("q′ = {} outside the admissible window", self.q_prime)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchattenCheck {
    pub index: f64,
    pub schatten: f64,
    pub w1_norm: f64,
    pub w2_norm: f64,
    /// `schatten / (w1_norm · w2_norm)`, 0 when either weight vanishes.
    pub ratio: f64,
}

/// Band eigenfunctions, `[point][mode]`.
fn band_table(prop: &Propagator) -> (Vec<usize>, Vec<Vec<Complex64>>) {
    let band = prop.band();
    let cols: Vec<Vec<Complex64>> = par::map_slice(&band, |&slot| prop.basis_function(slot));
    let n = prop.grid().len();
    let rows = (0..n).map(|x| cols.iter().map(|c| c[x]).collect()).collect();
    (band, rows)
}

fn factor(prop: &Propagator, times: &TimeGrid, w: &SpaceTimeField, table: &(Vec<usize>, Vec<Vec<Complex64>>)) -> Result<DMatrix<Complex64>> {
    let (band, basis) = table;
    let sw = prop.grid().weights();
    let mut support = Vec::new();
    for (a, row) in w.values.iter().enumerate() {
        for (x, v) in row.iter().enumerate() {
            if v.norm() != 0.0 {
                support.push((a, x, *v * (times.weights[a] * sw[x]).sqrt()));
            }
        }
    }
    if support.len() > FACTOR_ROW_LIMIT {
        return Err(Error::TooLarge(format!(
            "{} space-time points in the support; coarsen the grid",
            support.len()
        )));
    }
    let phases: Vec<Vec<Complex64>> = times
        .nodes
        .iter()
        .map(|&t| {
            band.iter()
                .map(|&s| Complex64::from_polar(1.0, -t * prop.symbol_at(s).unwrap_or(0.0)))
                .collect()
        })
        .collect();
    Ok(DMatrix::from_fn(support.len(), band.len(), |r, k| {
        let (a, x, v) = support[r];
        v * phases[a][k] * basis[x][k]
    }))
}

fn r_factor(b: DMatrix<Complex64>) -> DMatrix<Complex64> {
    if b.nrows() == 0 {
        return b;
    }
    b.qr().r()
}

/// Singular values of `W₁ U U* W₂` on the band of `prop`.
pub fn operator_singular_values(
    prop: &Propagator,
    times: &TimeGrid,
    w1: &SpaceTimeField,
    w2: &SpaceTimeField,
) -> Result<Vec<f64>> {
    w1.check_shape(times, prop.grid())?;
    w2.check_shape(times, prop.grid())?;
    if prop.band().len() > DENSE_LIMIT {
        return Err(Error::TooLarge(format!("{} band modes", prop.band().len())));
    }
    let table = band_table(prop);
    let r1 = r_factor(factor(prop, times, w1, &table)?);
    let r2 = r_factor(factor(prop, times, &w2.conj(), &table)?);
    if r1.nrows() == 0 || r2.nrows() == 0 {
        return Ok(Vec::new());
    }
    Ok(singular_values(&(r1 * r2.adjoint())))
}

/// The same operator assembled entry by entry over the space-time grid, with
/// the band-limited kernel `Σ_k e^{-i(t−s)P_k} e_k(x) conj(e_k(y))`.
pub fn dense_operator(
    prop: &Propagator,
    times: &TimeGrid,
    w1: &SpaceTimeField,
    w2: &SpaceTimeField,
) -> Result<DMatrix<Complex64>> {
    w1.check_shape(times, prop.grid())?;
    w2.check_shape(times, prop.grid())?;
    let nx = prop.grid().len();
    let size = times.len() * nx;
    if size > DENSE_LIMIT {
        return Err(Error::TooLarge(format!(
            "{size} space-time points exceed the dense limit {DENSE_LIMIT}; coarsen the grid"
        )));
    }
    let (band, basis) = band_table(prop);
    let sw = prop.grid().weights();
    let symbols: Vec<f64> = band.iter().map(|&s| prop.symbol_at(s).unwrap_or(0.0)).collect();
    let entries = par::map_indexed(size, |row| {
        let (a, x) = (row / nx, row % nx);
        let left = w1.values[a][x] * (times.weights[a] * sw[x]).sqrt();
        (0..size)
            .map(|col| {
                let (b, y) = (col / nx, col % nx);
                let right = w2.values[b][y] * (times.weights[b] * sw[y]).sqrt();
                if left.norm() == 0.0 || right.norm() == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let dt = times.nodes[a] - times.nodes[b];
                let k: Complex64 = symbols
                    .iter()
                    .zip(basis[x].iter().zip(&basis[y]))
                    .map(|(p, (ex, ey))| Complex64::from_polar(1.0, -dt * p) * ex * ey.conj())
                    .sum();
                left * k * right
            })
            .collect::<Vec<_>>()
    });
    Ok(DMatrix::from_fn(size, size, |r, c| entries[r][c]))
}

/// `‖W₁ U U* W₂‖_{𝔖^{2q′}} / (‖W₁‖ ‖W₂‖)` with `L^{2p′}_t L^{2q′}_x` weight norms.
pub fn schatten_bound_check(
    w1: &SpaceTimeField,
    w2: &SpaceTimeField,
    prop: &Propagator,
    times: &TimeGrid,
    exponents: SchattenExponents,
) -> Result<SchattenCheck> {
    exponents.check(density_line(prop.spec(), times)?)?;
    let sv = operator_singular_values(prop, times, w1, w2)?;
    let index = exponents.index();
    let schatten = lalpha_norm(&sv, index);
    let (pp, qq) = (2.0 * exponents.p_prime, 2.0 * exponents.q_prime);
    let w1_norm = w1.norm(times, prop.grid(), pp, qq);
    let w2_norm = w2.norm(times, prop.grid(), pp, qq);
    let denom = w1_norm * w2_norm;
    Ok(SchattenCheck {
        index,
        schatten,
        w1_norm,
        w2_norm,
        ratio: if denom == 0.0 { 0.0 } else { schatten / denom },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VanishingTable {
    pub cuts: Vec<f64>,
    pub schatten: Vec<f64>,
    /// `‖W₁‖ ‖W₂‖` on `[0, cut]`.
    pub weight_norms: Vec<f64>,
    /// Largest increase between consecutive (shrinking) cuts.
    pub max_increase: f64,
    /// Slope of `log schatten` against `log cut`.
    pub slope: f64,
}

/// Schatten norms of the operator restricted to `[0, cut]` for each cut.
pub fn schatten_vanishing(
    w1: &SpaceTimeField,
    w2: &SpaceTimeField,
    prop: &Propagator,
    times: &TimeGrid,
    exponents: SchattenExponents,
    cuts: &[f64],
) -> Result<VanishingTable> {
    exponents.check(density_line(prop.spec(), times)?)?;
    if cuts.is_empty() || cuts.iter().any(|c| *c <= 0.0) {
        return Err(Error::Precondition("cuts must be positive".into()));
    }
    let mut schatten = Vec::with_capacity(cuts.len());
    let mut weight_norms = Vec::with_capacity(cuts.len());
    for &c in cuts {
        let a = w1.restricted(times, c);
        let b = w2.restricted(times, c);
        let r = schatten_bound_check(&a, &b, prop, times, exponents)?;
        schatten.push(r.schatten);
        weight_norms.push(r.w1_norm * r.w2_norm);
    }
    let mut order: Vec<usize> = (0..cuts.len()).collect();
    order.sort_by(|&i, &j| cuts[j].total_cmp(&cuts[i]));
    let max_increase = order
        .windows(2)
        .map(|w| schatten[w[1]] - schatten[w[0]])
        .fold(0.0f64, f64::max);
    let pos: Vec<usize> = (0..cuts.len()).filter(|&i| schatten[i] > 0.0).collect();
    let slope = if pos.len() >= 2 {
        let lx: Vec<f64> = pos.iter().map(|&i| cuts[i].ln()).collect();
        let ly: Vec<f64> = pos.iter().map(|&i| schatten[i].ln()).collect();
        fit_slope(&lx, &ly).0
    } else {
        f64::NAN
    };
    Ok(VanishingTable {
        cuts: cuts.to_vec(),
        schatten,
        weight_norms,
        max_increase,
        slope,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DualitySource {
    /// A system from the corpus against its Hölder-extremal weight.
    System,
    /// A weight from the corpus against its extremal system.
    Weight,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityCase {
    pub source: DualitySource,
    pub index: usize,
    /// `‖ρ_γ‖_{L^p L^q} / ‖λ‖_{l^{α′}}`.
    pub density_ratio: f64,
    /// `‖W U U* W̄‖_{𝔖^α} / ‖W‖²`.
    pub schatten_ratio: f64,
    /// Side that the extremal construction bounds from above, within a factor 2.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub cases: Vec<DualityCase>,
    /// Best Schatten-side constant over every weight seen.
    pub schatten_constant: f64,
    /// Best density-side constant over every system seen.
    pub density_constant: f64,
    pub holds: bool,
}

fn schatten_ratio_of(w: &SpaceTimeField, prop: &Propagator, times: &TimeGrid, ex: SchattenExponents) -> Result<f64> {
    Ok(schatten_bound_check(w, &w.conj(), prop, times, ex)?.ratio)
}

/// `|W|² = ρ^{q−1} ‖ρ(t)‖_q^{p−q}`: equality in Hölder against `ρ`.
fn extremal_weight(field: &DensityField, p: f64, q: f64) -> SpaceTimeField {
    let values = field
        .values
        .iter()
        .map(|row| {
            let inner = row
                .iter()
                .zip(&field.space_weights)
                .map(|(v, w)| w * v.max(0.0).powf(q))
                .sum::<f64>()
                .powf(1.0 / q);
            row.iter()
                .map(|v| {
                    if inner == 0.0 || *v <= 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        Complex64::new((v.powf(q - 1.0) * inner.powf(p - q)).sqrt(), 0.0)
                    }
                })
                .collect()
        })
        .collect();
    SpaceTimeField { values }
}

/// Eigenvectors of `(WU)*(WU)` with weights `μ^{α−1}`: equality in the
/// Schatten Hölder inequality.
fn extremal_system(
    w: &SpaceTimeField,
    prop: &Propagator,
    times: &TimeGrid,
    alpha: f64,
) -> Result<Option<OrthonormalSystem>> {
    let table = band_table(prop);
    let b = factor(prop, times, w, &table)?;
    if b.nrows() == 0 {
        return Ok(None);
    }
    let svd = nalgebra::SVD::new(b, false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::Unsupported("SVD without right vectors".into()))?;
    let top = svd.singular_values.iter().fold(0.0f64, |m, s| m.max(*s));
    if top == 0.0 {
        return Ok(None);
    }
    let mut coefficients = Vec::new();
    let mut weights = Vec::new();
    for (j, s) in svd.singular_values.iter().enumerate() {
        if *s > 1e-10 * top {
            coefficients.push(v_t.row(j).iter().map(|v| v.conj()).collect());
            weights.push((s / top).powf(2.0 * (alpha - 1.0)));
        }
    }
    OrthonormalSystem::from_band_coefficients(prop, &coefficients, weights).map(Some)
}

/// Finite-dimensional check of the duality between the Schatten bound and the
/// orthonormal density bound.
///
/// Every system is paired with its Hölder-extremal weight, whose Schatten
/// ratio must dominate the system's density ratio; every weight is paired with
/// its extremal system, whose density ratio must dominate the weight's
/// Schatten ratio. Both are asserted up to a factor 2.
pub fn duality_crosscheck(
    systems: &[OrthonormalSystem],
    weights: &[SpaceTimeField],
    prop: &Propagator,
    norm: &MixedNormSpec,
    exponents: SchattenExponents,
) -> Result<DualityReport> {
    let (p, q) = exponents.density_exponents();
    if (p - norm.p).abs() > 1e-9 * p || (q - norm.q).abs() > 1e-9 * q {
        return Err(Error::Inadmissible(format!(
            "density exponents ({}, {}) are not dual to (p′, q′) = ({}, {})",
            norm.p, norm.q, exponents.p_prime, exponents.q_prime
        )));
    }
    let times = &norm.times;
    exponents.check(density_line(prop.spec(), times)?)?;
    let alpha = exponents.index();
    let alpha_dual = critical_alpha(q);
    let density_ratio = |s: &OrthonormalSystem| -> Result<(f64, DensityField)> {
        if s.weights.iter().any(|l| *l < 0.0) {
            return Err(Error::Precondition("duality needs nonnegative weights".into()));
        }
        let field = density_field(s, prop, times)?;
        let lam = lalpha_norm(&s.weights, alpha_dual);
        let r = if lam == 0.0 { 0.0 } else { mixed_norm(&field, norm)? / lam };
        Ok((r, field))
    };
    let mut cases = Vec::new();
    let mut schatten_constant = 0.0f64;
    let mut density_constant = 0.0f64;
    for (i, s) in systems.iter().enumerate() {
        let (d, field) = density_ratio(s)?;
        let w = extremal_weight(&field, p, q);
        let sr = schatten_ratio_of(&w, prop, times, exponents)?;
        schatten_constant = schatten_constant.max(sr);
        density_constant = density_constant.max(d);
        cases.push(DualityCase {
            source: DualitySource::System,
            index: i,
            density_ratio: d,
            schatten_ratio: sr,
            holds: sr >= d / 2.0,
        });
    }
    for (i, w) in weights.iter().enumerate() {
        let sr = schatten_ratio_of(w, prop, times, exponents)?;
        let d = match extremal_system(w, prop, times, alpha)? {
            Some(s) => density_ratio(&s)?.0,
            None => 0.0,
        };
        schatten_constant = schatten_constant.max(sr);
        density_constant = density_constant.max(d);
        cases.push(DualityCase {
            source: DualitySource::Weight,
            index: i,
            density_ratio: d,
            schatten_ratio: sr,
            holds: d >= sr / 2.0,
        });
    }
    let holds = cases.iter().all(|c| c.holds) && schatten_constant >= density_constant / 2.0;
    Ok(DualityReport {
        cases,
        schatten_constant,
        density_constant,
        holds,
    })
}
