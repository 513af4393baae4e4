//! Spatial grids, time quadrature and exact spectral propagation.
//!
//! Periodic grids cover both 𝕋^d (length 2π) and the large box used as a
//! stand-in for ℝ^d. Radial grids hold radial functions on the unit ball of ℝ³
//! sampled at `r_i = i/(n+1)`; the Dirichlet eigenfunctions are then exactly
//! orthonormal under the discrete measure `4π r² h`.

use crate::dispersive_kernels::{GeometryKind, PropagatorSpec};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodicGrid {
    pub dim: usize,
    /// Points per axis.
    pub n: usize,
    /// Side length.
    pub length: f64,
    /// Coordinate of the first point on every axis.
    pub origin: f64,
}

impl PeriodicGrid {
    /// `[0, 2π)^d`.
    pub fn torus(dim: usize, n: usize) -> Self {
        Self {
            dim,
            n,
            length: 2.0 * PI,
            origin: 0.0,
        }
    }

    /// `[-L/2, L/2)^d`.
    pub fn centered(dim: usize, n: usize, length: f64) -> Self {
        Self {
            dim,
            n,
            length,
            origin: -0.5 * length,
        }
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn cell(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    fn split(&self, idx: usize) -> Vec<usize> {
        let mut rem = idx;
        (0..self.dim)
            .map(|_| {
                let j = rem % self.n;
                rem /= self.n;
                j
            })
            .collect()
    }

    /// Coordinates of point `idx` (axis 0 varies fastest).
    pub fn point(&self, idx: usize) -> Vec<f64> {
        self.split(idx)
            .into_iter()
            .map(|j| self.origin + j as f64 * self.spacing())
            .collect()
    }

    /// Integer mode vector of spectral slot `idx` in FFT order.
    pub fn mode(&self, idx: usize) -> Vec<i64> {
        let n = self.n as i64;
        self.split(idx)
            .into_iter()
            .map(|j| {
                let j = j as i64;
                if j <= (n - 1) / 2 {
                    j
                } else {
                    j - n
                }
            })
            .collect()
    }

    /// Spectral slot of an integer mode vector, if representable.
    pub fn slot(&self, mode: &[i64]) -> Option<usize> {
        let n = self.n as i64;
        let mut idx = 0usize;
        let mut stride = 1usize;
        for &m in mode {
            let j = m.rem_euclid(n);
            let back = if j <= (n - 1) / 2 { j } else { j - n };
            if back != m {
                return None;
            }
            idx += j as usize * stride;
            stride *= self.n;
        }
        Some(idx)
    }

    pub fn wavenumber(&self, mode: &[i64]) -> Vec<f64> {
        mode.iter().map(|&m| 2.0 * PI * m as f64 / self.length).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialGrid {
    /// Interior radii `r_i = i/(n+1)`, `i = 1..=n`.
    pub n: usize,
}

impl RadialGrid {
    pub fn radius(&self, i: usize) -> f64 {
        (i + 1) as f64 / (self.n + 1) as f64
    }

    /// Radial eigenfunction `e_m(r) = sin(mπr) / (√(2π) r)`, `m ≥ 1`.
    pub fn eigenfunction(m: usize, r: f64) -> f64 {
        let k = m as f64 * PI;
        if r == 0.0 {
            k / (2.0 * PI).sqrt()
        } else {
            (k * r).sin() / ((2.0 * PI).sqrt() * r)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Grid {
    Periodic(PeriodicGrid),
    Radial(RadialGrid),
}

impl Grid {
    pub fn len(&self) -> usize {
        match self {
            Grid::Periodic(g) => g.len(),
            Grid::Radial(g) => g.n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Quadrature weight of each point.
    pub fn weights(&self) -> Vec<f64> {
        match self {
            Grid::Periodic(g) => vec![g.cell(); g.len()],
            Grid::Radial(g) => {
                let h = 1.0 / (g.n + 1) as f64;
                (0..g.n).map(|i| 4.0 * PI * g.radius(i).powi(2) * h).collect()
            }
        }
    }

    /// Total measure of the domain as seen by the weights.
    pub fn measure(&self) -> f64 {
        self.weights().iter().sum()
    }

    pub fn inner(&self, f: &[Complex64], g: &[Complex64]) -> Complex64 {
        match self {
            Grid::Periodic(p) => f.iter().zip(g).map(|(a, b)| a * b.conj()).sum::<Complex64>() * p.cell(),
            Grid::Radial(_) => f
                .iter()
                .zip(g)
                .zip(self.weights())
                .map(|((a, b), w)| a * b.conj() * w)
                .sum(),
        }
    }

    pub fn norm(&self, f: &[Complex64]) -> f64 {
        self.inner(f, f).re.max(0.0).sqrt()
    }
}

/// Time nodes with quadrature weights on a union of intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl TimeGrid {
    /// Midpoint rule with `n` cells on `[a, b]`.
    pub fn midpoint(a: f64, b: f64, n: usize) -> Self {
        let h = (b - a) / n as f64;
        Self {
            nodes: (0..n).map(|i| a + (i as f64 + 0.5) * h).collect(),
            weights: vec![h; n],
        }
    }

    /// Gauss-Legendre with `per_panel` nodes on each consecutive pair of `breaks`.
    pub fn composite_gauss(breaks: &[f64], per_panel: usize) -> Self {
        let rule = GaussLegendre::new(per_panel);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
            for (x, wt) in rule.nodes().iter().zip(rule.weights()) {
                nodes.push(c + r * x);
                weights.push(r * wt);
            }
        }
        Self { nodes, weights }
    }

    /// Gauss panels on `[0, 2^-levels]`, `[2^-levels, 2^-(levels-1)]`, ..., `[1/2, 1]`,
    /// scaled to `[0, t_max]`, so every `[0, t_max 2^-j]` is a union of whole panels.
    pub fn dyadic(t_max: f64, levels: usize, per_panel: usize) -> Self {
        let mut breaks = vec![0.0];
        for j in (0..=levels).rev() {
            breaks.push(t_max * 0.5f64.powi(j as i32));
        }
        Self::composite_gauss(&breaks, per_panel)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn span(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// The nodes (and weights) lying in `[lo, hi]`.
    pub fn restrict(&self, lo: f64, hi: f64) -> Self {
        let (nodes, weights) = self
            .nodes
            .iter()
            .zip(&self.weights)
            .filter(|(t, _)| **t >= lo && **t <= hi)
            .map(|(t, w)| (*t, *w))
            .unzip();
        Self { nodes, weights }
    }
}

/// `‖F‖_{L^p_t L^q_x}`: an inner spatial `q`-norm at each time, then an outer
/// temporal `p`-norm. Infinite exponents are maxima over samples.
pub fn lp_lq(rows: &[Vec<f64>], time_weights: &[f64], space_weights: &[f64], p: f64, q: f64) -> f64 {
    let inner: Vec<f64> = rows
        .iter()
        .map(|row| {
            if q.is_infinite() {
                row.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            } else {
                row.iter()
                    .zip(space_weights)
                    .map(|(v, w)| w * v.abs().powf(q))
                    .sum::<f64>()
                    .powf(1.0 / q)
            }
        })
        .collect();
    if p.is_infinite() {
        inner.iter().fold(0.0f64, |m, v| m.max(*v))
    } else {
        inner
            .iter()
            .zip(time_weights)
            .map(|(v, w)| w * v.powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }
}

/// Exact propagator `e^{-itP(D)}`, optionally band-limited, on a grid.
#[derive(Clone)]
pub struct Propagator {
    spec: PropagatorSpec,
    grid: Grid,
    /// `P` at every spectral slot, `None` outside the cutoff.
    symbol: Vec<Option<f64>>,
    forward: Option<Arc<dyn Fft<f64>>>,
    inverse: Option<Arc<dyn Fft<f64>>>,
    /// `e_m(r_i)` as `[m − 1][i]` on radial grids.
    radial: Option<Arc<Vec<Vec<f64>>>>,
}

impl std::fmt::Debug for Propagator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Propagator")
            .field("spec", &self.spec)
            .field("grid", &self.grid)
            .finish()
    }
}

impl Propagator {
    pub fn new(spec: PropagatorSpec, grid: Grid) -> Result<Self> {
        spec.validate()?;
        match (spec.geometry, &grid) {
            (GeometryKind::Euclidean, Grid::Periodic(g)) | (GeometryKind::Torus, Grid::Periodic(g)) => {
                if g.dim != spec.dim {
                    return Err(Error::GeometryMismatch(format!(
                        "grid dimension {} vs symbol dimension {}",
                        g.dim, spec.dim
                    )));
                }
                if spec.geometry == GeometryKind::Torus && (g.length - 2.0 * PI).abs() > 1e-12 {
                    return Err(Error::GeometryMismatch("torus grids have side 2π".into()));
                }
                if g.n < 2 {
                    return Err(Error::Precondition("need at least two points per axis".into()));
                }
            }
            (GeometryKind::BallRadial, Grid::Radial(g)) => {
                if g.n < 1 {
                    return Err(Error::Precondition("empty radial grid".into()));
                }
            }
            _ => {
                return Err(Error::GeometryMismatch(format!(
                    "{:?} symbol on a {} grid",
                    spec.geometry,
                    match grid {
                        Grid::Periodic(_) => "periodic",
                        Grid::Radial(_) => "radial",
                    }
                )))
            }
        }
        let cutoff = spec.cutoff;
        let (symbol, forward, inverse, radial) = match &grid {
            Grid::Periodic(g) => {
                let symbol = (0..g.len())
                    .map(|idx| {
                        let m = g.mode(idx);
                        let inside = cutoff.is_none_or(|c| m.iter().all(|v| v.unsigned_abs() as usize <= c));
                        inside.then(|| spec.symbol_value(&g.wavenumber(&m)))
                    })
                    .collect();
                let mut planner = FftPlanner::new();
                (
                    symbol,
                    Some(planner.plan_fft_forward(g.n)),
                    Some(planner.plan_fft_inverse(g.n)),
                    None,
                )
            }
            Grid::Radial(g) => {
                let symbol = (1..=g.n)
                    .map(|m| cutoff.is_none_or(|c| m <= c).then(|| (m as f64 * PI).powi(2)))
                    .collect();
                let table = (1..=g.n)
                    .map(|m| (0..g.n).map(|i| RadialGrid::eigenfunction(m, g.radius(i))).collect())
                    .collect();
                (symbol, None, None, Some(Arc::new(table)))
            }
        };
        Ok(Self {
            spec,
            grid,
            symbol,
            forward,
            inverse,
            radial,
        })
    }

    pub fn spec(&self) -> &PropagatorSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Spectral slots inside the cutoff.
    pub fn band(&self) -> Vec<usize> {
        (0..self.symbol.len()).filter(|&i| self.symbol[i].is_some()).collect()
    }

    /// `P` at spectral slot `idx` (`None` outside the band).
    pub fn symbol_at(&self, idx: usize) -> Option<f64> {
        self.symbol[idx]
    }

    fn fft_axes(&self, data: &mut [Complex64], inverse: bool) {
        let Grid::Periodic(g) = &self.grid else {
            unreachable!("fft on a radial grid")
        };
        let plan = if inverse { &self.inverse } else { &self.forward };
        let plan = plan.as_ref().expect("periodic grids carry plans");
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        if g.dim == 1 {
            plan.process_with_scratch(data, &mut scratch);
            return;
        }
        let mut line = vec![Complex64::new(0.0, 0.0); g.n];
        let mut stride = 1;
        for _ in 0..g.dim {
            for base in 0..data.len() {
                if (base / stride) % g.n != 0 {
                    continue;
                }
                for (j, v) in line.iter_mut().enumerate() {
                    *v = data[base + j * stride];
                }
                plan.process_with_scratch(&mut line, &mut scratch);
                for (j, v) in line.iter().enumerate() {
                    data[base + j * stride] = *v;
                }
            }
            stride *= g.n;
        }
    }

    /// Coefficients in the orthonormal eigenbasis: `c_k = ⟨f, e_k⟩`.
    pub fn analyze(&self, f: &[Complex64]) -> Vec<Complex64> {
        match &self.grid {
            Grid::Periodic(g) => {
                let mut c = f.to_vec();
                self.fft_axes(&mut c, false);
                let scale = g.cell() / g.volume().sqrt();
                for (idx, v) in c.iter_mut().enumerate() {
                    let k = g.wavenumber(&g.mode(idx));
                    let shift: f64 = k.iter().map(|kj| kj * g.origin).sum();
                    *v *= Complex64::from_polar(scale, -shift);
                }
                c
            }
            Grid::Radial(_) => {
                let w = self.grid.weights();
                self.radial_table()
                    .iter()
                    .map(|e| f.iter().zip(&w).zip(e).map(|((v, w), e)| v * (w * e)).sum())
                    .collect()
            }
        }
    }

    fn radial_table(&self) -> &[Vec<f64>] {
        self.radial.as_deref().expect("radial grids carry an eigenfunction table")
    }

    /// Inverse of [`Propagator::analyze`].
    pub fn synthesize(&self, c: &[Complex64]) -> Vec<Complex64> {
        match &self.grid {
            Grid::Periodic(g) => {
                let mut f: Vec<Complex64> = c
                    .iter()
                    .enumerate()
                    .map(|(idx, v)| {
                        let k = g.wavenumber(&g.mode(idx));
                        let shift: f64 = k.iter().map(|kj| kj * g.origin).sum();
                        v * Complex64::from_polar(1.0 / g.volume().sqrt(), shift)
                    })
                    .collect();
                self.fft_axes(&mut f, true);
                f
            }
            Grid::Radial(g) => {
                let mut out = vec![Complex64::new(0.0, 0.0); g.n];
                for (v, e) in c.iter().zip(self.radial_table().iter()) {
                    if *v == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for (o, e) in out.iter_mut().zip(e) {
                        *o += v * e;
                    }
                }
                out
            }
        }
    }

    /// Grid values of the `idx`-th orthonormal eigenfunction.
    pub fn basis_function(&self, idx: usize) -> Vec<Complex64> {
        let mut c = vec![Complex64::new(0.0, 0.0); self.symbol.len()];
        c[idx] = Complex64::new(1.0, 0.0);
        self.synthesize(&c)
    }

    /// Multiply coefficients by `e^{-itP}`, zeroing everything outside the band.
    pub fn evolve_coefficients(&self, c: &mut [Complex64], t: f64) {
        for (v, p) in c.iter_mut().zip(&self.symbol) {
            *v = match p {
                Some(p) => *v * Complex64::from_polar(1.0, -t * p),
                None => Complex64::new(0.0, 0.0),
            };
        }
    }

    /// `e^{-itP(D)} P_{≤N} f`.
    pub fn evolve(&self, f: &[Complex64], t: f64) -> Vec<Complex64> {
        let mut c = self.analyze(f);
        self.evolve_coefficients(&mut c, t);
        self.synthesize(&c)
    }

    /// Snapshots of `f` at each time, reusing one analysis.
    pub fn evolve_many(&self, f: &[Complex64], times: &[f64]) -> Vec<Vec<Complex64>> {
        let c0 = self.analyze(f);
        times
            .iter()
            .map(|&t| {
                let mut c = c0.clone();
                self.evolve_coefficients(&mut c, t);
                self.synthesize(&c)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersive_kernels::Symbol;

    fn bump(g: &PeriodicGrid) -> Vec<Complex64> {
        (0..g.len())
            .map(|i| {
                let x = g.point(i);
                let r2: f64 = x.iter().map(|v| (v - 0.3) * (v - 0.3)).sum();
                Complex64::new((-r2).exp(), 0.5 * x[0])
            })
            .collect()
    }

    #[test]
    fn analysis_is_unitary_and_invertible() {
        for dim in [1, 2] {
            let g = PeriodicGrid::centered(dim, 16, 12.0);
            let p = Propagator::new(PropagatorSpec::elliptic(dim), Grid::Periodic(g)).unwrap();
            let f = bump(&g);
            let c = p.analyze(&f);
            let norm_c: f64 = c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            assert!((norm_c - Grid::Periodic(g).norm(&f)).abs() < 1e-12);
            let back = p.synthesize(&c);
            for (a, b) in back.iter().zip(&f) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn torus_mode_picks_up_phase() {
        let g = PeriodicGrid::torus(1, 32);
        let p = Propagator::new(PropagatorSpec::torus(Symbol::Elliptic, 1, 10), Grid::Periodic(g)).unwrap();
        let f: Vec<Complex64> = (0..32).map(|i| Complex64::from_polar(1.0, 3.0 * g.point(i)[0])).collect();
        let t = 0.37;
        let u = p.evolve(&f, t);
        for (a, b) in u.iter().zip(&f) {
            assert!((a - b * Complex64::from_polar(1.0, -9.0 * t)).norm() < 1e-12);
        }
        let slot = g.slot(&[3]).unwrap();
        let e = p.basis_function(slot);
        for (a, b) in e.iter().zip(&f) {
            assert!((a - b / (2.0 * PI).sqrt()).norm() < 1e-12);
        }
    }

    #[test]
    fn cutoff_removes_high_modes() {
        let g = PeriodicGrid::torus(1, 32);
        let p = Propagator::new(PropagatorSpec::torus(Symbol::Elliptic, 1, 2), Grid::Periodic(g)).unwrap();
        assert_eq!(p.band().len(), 5);
        let f = p.basis_function(g.slot(&[7]).unwrap());
        assert!(Grid::Periodic(g).norm(&p.evolve(&f, 0.0)) < 1e-14);
    }

    #[test]
    fn radial_basis_is_orthonormal() {
        let g = RadialGrid { n: 40 };
        let p = Propagator::new(PropagatorSpec::ball(40), Grid::Radial(g)).unwrap();
        let grid = Grid::Radial(g);
        for a in [0, 3, 17] {
            for b in [0, 3, 39] {
                let ip = grid.inner(&p.basis_function(a), &p.basis_function(b));
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((ip - expect).norm() < 1e-12, "{a} {b} {ip}");
            }
        }
    }

    #[test]
    fn geometry_mismatch_rejected() {
        let torus = Grid::Periodic(PeriodicGrid::torus(1, 8));
        assert!(matches!(
            Propagator::new(PropagatorSpec::ball(4), torus),
            Err(Error::GeometryMismatch(_))
        ));
        let boxed = Grid::Periodic(PeriodicGrid::centered(1, 8, 5.0));
        assert!(Propagator::new(PropagatorSpec::torus(Symbol::Elliptic, 1, 2), boxed).is_err());
        assert!(Propagator::new(PropagatorSpec::elliptic(2), torus).is_err());
    }

    #[test]
    fn norms_of_constants_and_indicators() {
        let rows = vec![vec![2.0; 4]; 6];
        let tg = TimeGrid::midpoint(0.0, 3.0, 6);
        let sw = vec![0.5; 4];
        let v = lp_lq(&rows, &tg.weights, &sw, 3.0, 2.0);
        assert!((v - 2.0 * 2f64.powf(0.5) * 3f64.powf(1.0 / 3.0)).abs() < 1e-12);
        let half: Vec<Vec<f64>> = (0..6).map(|i| vec![if i < 3 { 1.0 } else { 0.0 }; 4]).collect();
        let full = vec![vec![1.0; 4]; 6];
        let r = lp_lq(&half, &tg.weights, &sw, 4.0, 1.5) / lp_lq(&full, &tg.weights, &sw, 4.0, 1.5);
        assert!((r - 0.5f64.powf(0.25)).abs() < 1e-12);
    }

    #[test]
    fn dyadic_grid_nests() {
        let tg = TimeGrid::dyadic(1.0, 6, 4);
        assert!((tg.span() - 1.0).abs() < 1e-14);
        for j in 0..=6 {
            let t = 0.5f64.powi(j);
            assert!((tg.restrict(0.0, t).span() - t).abs() < 1e-14);
        }
    }
}
