//! Two-level randomization of finite-rank operators.
//!
//! Level 1 multiplies the frequency cells of each function by independent
//! signs; level 2 multiplies each function's term in `Σ λ_n |f_n⟩⟨f_n|`.
//! Cells are single Fourier modes on 𝕋^d, Dirichlet modes (damped by `1/(mπ)`)
//! on the ball, and smooth Wiener cells `ψ(ξ − k)` on the box standing in for ℝ^d.

mod probes;

pub use probes::{
    convergence_probe, khinchin_check, l2lp_estimate_probe, moment_bound_probe, sign_flip_symmetry,
    threshold, ConvergenceTable, KhinchinRow, L2LpTable, MomentRow, SymmetryCheck,
};

use crate::dispersive_kernels::GeometryKind;
use crate::error::{Error, Result};
use crate::grid::{Grid, Propagator, RadialGrid};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Distribution {
    Rademacher,
    StandardGaussian,
}

impl Distribution {
    pub fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Distribution::Rademacher => {
                if rng.gen::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            Distribution::StandardGaussian => rng.sample(StandardNormal),
        }
    }
}

/// Which randomization layer a stream feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Level {
    /// Cell signs `g⁽¹⁾` (ω).
    Cell,
    /// Function signs `g⁽²⁾` (ω̃).
    Function,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomizationEnsemble {
    pub distribution: Distribution,
    pub samples: usize,
    pub master_seed: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RandomizationEnsemble {
    pub fn new(distribution: Distribution, samples: usize, master_seed: u64) -> Result<Self> {
        if samples == 0 {
            return Err(Error::Precondition("need at least one sample".into()));
        }
        Ok(Self {
            distribution,
            samples,
            master_seed,
        })
    }

    /// Substream for `(sample, level)`; modes consume it in order, so the
    /// `i`-th draw belongs to mode `i`.
    pub fn stream(&self, sample: usize, level: Level) -> ChaCha8Rng {
        let seed = splitmix64(self.master_seed ^ splitmix64(sample as u64));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(match level {
            Level::Cell => 1,
            Level::Function => 2,
        });
        rng
    }
}

/// `exp(−1/(1−ξ²))` on `(−1, 1)`.
fn mollifier(xi: f64) -> f64 {
    if xi.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - xi * xi)).exp()
    }
}

/// One-dimensional Wiener cell profile: the mollifier divided by its
/// integer periodization, so `Σ_k ψ(ξ − k) = 1`.
pub fn wiener_psi(xi: f64) -> f64 {
    let top = mollifier(xi);
    if top == 0.0 {
        return 0.0;
    }
    let base = xi.floor();
    let total: f64 = (-1..=2).map(|j| mollifier(xi - (base + j as f64))).sum();
    top / total
}

/// Per-axis cell signs; the sign of cell `k` is `Π_j g_{j, k_j}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellDraws {
    pub axes: Vec<Vec<f64>>,
    pub lo: i64,
}

/// Contribution of cell `idx` on each axis to one spectral slot.
type SlotTerms = Vec<Vec<(usize, f64)>>;

#[derive(Debug, Clone)]
pub struct Randomizer {
    prop: Propagator,
    dim: usize,
    lo: i64,
    cells: usize,
    terms: Vec<SlotTerms>,
}

impl Randomizer {
    pub fn new(prop: Propagator) -> Result<Self> {
        let spec = *prop.spec();
        let (dim, lo, cells, terms) = match (spec.geometry, *prop.grid()) {
            (GeometryKind::Torus, Grid::Periodic(g)) => {
                let n = g.n as i64;
                let lo = -(n / 2);
                let hi = (n - 1) / 2;
                let terms = (0..g.len())
                    .map(|slot| {
                        g.mode(slot)
                            .into_iter()
                            .map(|k| vec![((k - lo) as usize, 1.0)])
                            .collect()
                    })
                    .collect();
                (g.dim, lo, (hi - lo + 1) as usize, terms)
            }
            (GeometryKind::BallRadial, Grid::Radial(g)) => {
                let terms = (1..=g.n).map(|m| vec![vec![(m - 1, 1.0 / (m as f64 * PI))]]).collect();
                (1, 1, g.n, terms)
            }
            (GeometryKind::Euclidean, Grid::Periodic(g)) => {
                let xi_max = PI * g.n as f64 / g.length;
                let lo = (-xi_max).floor() as i64 - 1;
                let hi = xi_max.ceil() as i64 + 1;
                let terms = (0..g.len())
                    .map(|slot| {
                        g.wavenumber(&g.mode(slot))
                            .into_iter()
                            .map(|xi| {
                                (lo..=hi)
                                    .filter_map(|k| {
                                        let w = wiener_psi(xi - k as f64);
                                        (w != 0.0).then_some(((k - lo) as usize, w))
                                    })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect();
                (g.dim, lo, (hi - lo + 1) as usize, terms)
            }
            _ => return Err(Error::GeometryMismatch("unsupported geometry for randomization".into())),
        };
        Ok(Self {
            prop,
            dim,
            lo,
            cells,
            terms,
        })
    }

    pub fn propagator(&self) -> &Propagator {
        &self.prop
    }

    /// Number of cells per axis.
    pub fn cells_per_axis(&self) -> usize {
        self.cells
    }

    /// Cell signs drawn axis by axis, cell by cell, from `rng`.
    pub fn draw_cells<R: Rng>(&self, distribution: Distribution, rng: &mut R) -> CellDraws {
        CellDraws {
            axes: (0..self.dim)
                .map(|_| (0..self.cells).map(|_| distribution.draw(rng)).collect())
                .collect(),
            lo: self.lo,
        }
    }

    /// All cell signs equal to 1 (level 1 switched off).
    pub fn unit_cells(&self) -> CellDraws {
        CellDraws {
            axes: vec![vec![1.0; self.cells]; self.dim],
            lo: self.lo,
        }
    }

    /// Real multiplier applied to spectral slot `slot`.
    pub fn multiplier(&self, slot: usize, draws: &CellDraws) -> f64 {
        self.terms[slot]
            .iter()
            .zip(&draws.axes)
            .map(|(axis_terms, g)| axis_terms.iter().map(|(i, w)| w * g[*i]).sum::<f64>())
            .product()
    }

    /// Multiplier with every cell sign set to 1: 1 on the torus and the box
    /// (partition of unity), `1/(mπ)` on the ball.
    pub fn deterministic_multiplier(&self, slot: usize) -> f64 {
        self.multiplier(slot, &self.unit_cells())
    }

    pub fn randomize_coefficients(&self, c: &[Complex64], draws: &CellDraws) -> Vec<Complex64> {
        c.iter()
            .enumerate()
            .map(|(slot, v)| v * self.multiplier(slot, draws))
            .collect()
    }

    /// `f^ω` on the grid.
    pub fn randomize_function(&self, f: &[Complex64], draws: &CellDraws) -> Result<Vec<Complex64>> {
        if f.len() != self.prop.grid().len() {
            return Err(Error::Precondition("function does not live on the randomizer's grid".into()));
        }
        Ok(self.prop.synthesize(&self.randomize_coefficients(&self.prop.analyze(f), draws)))
    }

    /// `Σ_k ‖ψ(D − k) f‖²`, the second moment of `‖f^ω‖` under unit-variance
    /// independent cell signs.
    pub fn second_moment(&self, f: &[Complex64]) -> f64 {
        let c = self.prop.analyze(f);
        c.iter()
            .enumerate()
            .map(|(slot, v)| {
                let per_axis: f64 = self.terms[slot]
                    .iter()
                    .map(|axis| axis.iter().map(|(_, w)| w * w).sum::<f64>())
                    .product();
                v.norm_sqr() * per_axis
            })
            .sum()
    }
}

/// Whether level-1 signs are shared by all functions of an operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SignSharing {
    /// One ω for every `f_n`.
    #[default]
    Shared,
    /// Independent cell signs for each `f_n`.
    PerFunction,
}

/// `γ₀^{ω,ω̃} = Σ λ_n g⁽²⁾_n |f_n^ω⟩⟨f_n^ω|` from spectral coefficients.
#[derive(Debug, Clone)]
pub struct RandomizedOperator {
    pub randomizer: Randomizer,
    /// Spectral coefficients of each `f_n` (full slot vectors).
    pub coefficients: Vec<Vec<Complex64>>,
    pub weights: Vec<f64>,
    pub sharing: SignSharing,
    /// Level-1 randomization on or off.
    pub cell_signs: bool,
}

/// One draw of the operator: randomized coefficients and function signs.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub coefficients: Vec<Vec<Complex64>>,
    pub function_signs: Vec<f64>,
}

impl RandomizedOperator {
    pub fn new(randomizer: Randomizer, coefficients: Vec<Vec<Complex64>>, weights: Vec<f64>) -> Result<Self> {
        let slots = randomizer.prop.grid().len();
        if coefficients.len() != weights.len() {
            return Err(Error::Precondition("one weight per function".into()));
        }
        if coefficients.iter().any(|c| c.len() != slots) {
            return Err(Error::Precondition("coefficient vectors must cover every spectral slot".into()));
        }
        Ok(Self {
            randomizer,
            coefficients,
            weights,
            sharing: SignSharing::Shared,
            cell_signs: true,
        })
    }

    pub fn with_sharing(mut self, sharing: SignSharing) -> Self {
        self.sharing = sharing;
        self
    }

    pub fn with_cell_signs(mut self, on: bool) -> Self {
        self.cell_signs = on;
        self
    }

    /// `‖γ₀‖_{𝔖²} = ‖λ‖₂`.
    pub fn hilbert_schmidt(&self) -> f64 {
        self.weights.iter().map(|l| l * l).sum::<f64>().sqrt()
    }

    pub fn realize(&self, ensemble: &RandomizationEnsemble, sample: usize) -> Realization {
        let r = &self.randomizer;
        let mut cell_rng = ensemble.stream(sample, Level::Cell);
        let mut fn_rng = ensemble.stream(sample, Level::Function);
        let shared = if self.cell_signs {
            r.draw_cells(ensemble.distribution, &mut cell_rng)
        } else {
            r.unit_cells()
        };
        let coefficients = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(n, c)| {
                if self.cell_signs && self.sharing == SignSharing::PerFunction && n > 0 {
                    let own = r.draw_cells(ensemble.distribution, &mut cell_rng);
                    r.randomize_coefficients(c, &own)
                } else {
                    r.randomize_coefficients(c, &shared)
                }
            })
            .collect();
        let function_signs = self.weights.iter().map(|_| ensemble.distribution.draw(&mut fn_rng)).collect();
        Realization {
            coefficients,
            function_signs,
        }
    }

    /// `Σ λ_n g⁽²⁾_n |e^{-itP(D)} f_n^ω|²` on the grid.
    pub fn density(&self, realization: &Realization, t: f64) -> Vec<f64> {
        let prop = &self.randomizer.prop;
        let mut rho = vec![0.0; prop.grid().len()];
        for ((c, lam), g) in realization
            .coefficients
            .iter()
            .zip(&self.weights)
            .zip(&realization.function_signs)
        {
            let mut c = c.clone();
            if t != 0.0 {
                prop.evolve_coefficients(&mut c, t);
            }
            for (r, v) in rho.iter_mut().zip(prop.synthesize(&c)) {
                *r += lam * g * v.norm_sqr();
            }
        }
        rho
    }
}

/// Dirichlet eigenfunctions of the unit ball restricted to radial functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallEigenbasis {
    pub modes: usize,
    pub grid: RadialGrid,
}

impl BallEigenbasis {
    pub fn new(modes: usize, grid: RadialGrid) -> Result<Self> {
        if modes == 0 || modes > grid.n {
            return Err(Error::Precondition(format!(
                "{modes} modes on a radial grid of {} points",
                grid.n
            )));
        }
        Ok(Self { modes, grid })
    }

    /// `(mπ)²`.
    pub fn eigenvalue(&self, m: usize) -> f64 {
        (m as f64 * PI).powi(2)
    }

    pub fn eigenfunction(&self, m: usize) -> Vec<f64> {
        (0..self.grid.n)
            .map(|i| RadialGrid::eigenfunction(m, self.grid.radius(i)))
            .collect()
    }

    /// `max |⟨e_m, e_l⟩ − δ_ml|` under `4π r² dr`.
    pub fn gram_error(&self) -> f64 {
        let w = Grid::Radial(self.grid).weights();
        let e: Vec<Vec<f64>> = (1..=self.modes).map(|m| self.eigenfunction(m)).collect();
        let mut worst = 0.0f64;
        for a in 0..self.modes {
            for b in a..self.modes {
                let ip: f64 = e[a].iter().zip(&e[b]).zip(&w).map(|((x, y), w)| x * y * w).sum();
                worst = worst.max((ip - if a == b { 1.0 } else { 0.0 }).abs());
            }
        }
        worst
    }

    /// `Σ c_m e_m` on the grid.
    pub fn synthesize(&self, c: &[f64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.grid.n];
        for (m, cm) in c.iter().enumerate().take(self.modes) {
            for (o, e) in out.iter_mut().zip(self.eigenfunction(m + 1)) {
                *o += cm * e;
            }
        }
        out
    }
}
