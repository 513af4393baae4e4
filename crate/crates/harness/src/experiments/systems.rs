use super::{max_of, Context};
use crate::error::HarnessError;
use crate::report::{Assertion, Table};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use strichartz_core::dispersive_kernels::{PropagatorSpec, Symbol};
use strichartz_core::grid::{Grid, PeriodicGrid, Propagator, TimeGrid};
use strichartz_core::spectral_systems::{
    critical_alpha, dense_operator, density_line, duality_crosscheck, operator_singular_values, optimality_experiment,
    schatten_bound_check, schatten_vanishing, singular_values, strichartz_ratio, DualityReport, DualitySource,
    MixedNormSpec, OrthonormalSystem, SchattenExponents, SpaceTimeField,
};
use strichartz_core::stats::kendall_tau;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
pub struct RatioParams {
    pub grid_points: usize,
    pub time_samples: usize,
    /// System sizes `J`.
    pub sizes: Vec<usize>,
    pub systems_per_size: usize,
    /// Band `N = band-factor · J`; time window `[0, 1/N]`.
    pub band_factor: usize,
    pub p: f64,
    pub q: f64,
    /// Largest allowed `(max − min) / min` of the per-size maxima.
    pub spread_limit: f64,
    /// One-sided level for a positive Kendall trend.
    pub significance: f64,
}

impl Default for RatioParams {
    fn default() -> Self {
        Self {
            grid_points: 256,
            time_samples: 128,
            sizes: vec![1, 2, 4, 8, 16],
            systems_per_size: 20,
            band_factor: 4,
            p: 10.0,
            q: 1.25,
            spread_limit: 0.25,
            significance: 0.05,
        }
    }
}

pub fn strichartz_ratios(ctx: &mut Context, table: &toml::Table) -> Result<(), HarnessError> {
    let p: RatioParams = ctx.params(table)?;
    if p.sizes.is_empty() || p.systems_per_size == 0 || p.band_factor == 0 {
        return Err(HarnessError::Usage("strichartz-ratios needs sizes, systems-per-size and band-factor".into()));
    }
    let grid = PeriodicGrid::torus(1, p.grid_points);
    let mut detail = Vec::new();
    let mut maxima = Vec::new();
    for &j in &p.sizes {
        let n = p.band_factor * j;
        let prop = Propagator::new(PropagatorSpec::torus(Symbol::Elliptic, 1, n), Grid::Periodic(grid))?;
        let norm = MixedNormSpec::new(p.p, p.q, TimeGrid::midpoint(0.0, 1.0 / n as f64, p.time_samples));
        let mut rng = ctx.rng(j as u64);
        let mut best = 0.0f64;
        for s in 0..p.systems_per_size {
            let system = OrthonormalSystem::random(&prop, j, &mut rng)?;
            let r = strichartz_ratio(&system, &prop, &norm, None)?;
            best = best.max(r.ratio);
            detail.push((j, n, s, r));
        }
        maxima.push((j, n, best));
    }
    ctx.table(
        Table::new("ratios", "‖ρ‖_{L^p_t L^q_x} / ‖λ‖_{l^α} for random orthonormal systems on the torus")
            .number("size", "count", "number of functions J", detail.iter().map(|d| d.0 as f64))
            .number("cutoff", "modes", "band N", detail.iter().map(|d| d.1 as f64))
            .number("system", "index", "sample index", detail.iter().map(|d| d.2 as f64))
            .number("density-norm", "1", "‖ρ‖_{L^p_t L^q_x}", detail.iter().map(|d| d.3.density_norm))
            .number("weight-norm", "1", "‖λ‖_{l^α}", detail.iter().map(|d| d.3.weight_norm))
            .number("ratio", "1", "density-norm / weight-norm", detail.iter().map(|d| d.3.ratio)),
    );
    let js: Vec<f64> = maxima.iter().map(|m| m.0 as f64).collect();
    let best: Vec<f64> = maxima.iter().map(|m| m.2).collect();
    ctx.table(
        Table::new("maxima", "largest ratio per system size")
            .number("size", "count", "number of functions J", js.clone())
            .number("cutoff", "modes", "band N", maxima.iter().map(|m| m.1 as f64))
            .number("max-ratio", "1", "max over the sampled systems", best.clone()),
    );
    let hi = max_of(best.iter().copied());
    let lo = best.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = (hi - lo) / lo;
    let trend = kendall_tau(&js, &best);
    ctx.table(
        Table::new("trend", "Kendall rank correlation of the maxima against J")
            .number("tau", "1", "Kendall τ", [trend.tau])
            .number("p-value", "1", "one-sided P(τ ≥ observed) under no trend", [trend.p_value])
            .number("spread", "1", "(max − min) / min of the maxima", [spread]),
    );
    ctx.check(Assertion::at_most(
        "maxima:spread",
        "the per-size maxima vary by less than the limit",
        p.spread_limit,
        spread,
    ));
    ctx.check(Assertion::at_least(
        "maxima:no-growth",
        "Kendall τ of max ratio against J is not significantly positive",
        p.significance,
        trend.p_value,
    ));
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
pub struct OptimalityParams {
    pub dim: usize,
    pub p: f64,
    pub q: f64,
    pub cutoffs: Vec<usize>,
    pub time_samples: usize,
    /// Weight exponent above the critical one.
    pub alpha_above: f64,
    pub lhs_slope: f64,
    pub slope_tol: f64,
    pub expected_above_slope: f64,
}

impl Default for OptimalityParams {
    fn default() -> Self {
        Self {
            dim: 1,
            p: 4.0,
            q: 2.0,
            cutoffs: vec![4, 8, 16, 32],
            time_samples: 16,
            alpha_above: 2.0,
            lhs_slope: 1.0,
            slope_tol: 0.1,
            expected_above_slope: 0.25,
        }
    }
}

pub fn optimality(ctx: &mut Context, table: &toml::Table) -> Result<(), HarnessError> {
    let p: OptimalityParams = ctx.params(table)?;
    let crit = optimality_experiment(p.dim, (p.p, p.q), critical_alpha(p.q), &p.cutoffs, p.time_samples)?;
    let above = optimality_experiment(p.dim, (p.p, p.q), p.alpha_above, &p.cutoffs, p.time_samples)?;
    let ratio = |r: &strichartz_core::spectral_systems::OptimalityResult| -> Vec<f64> {
        r.lhs.iter().zip(&r.rhs).map(|(a, b)| a / b).collect()
    };
    ctx.table(
        Table::new("scaling", "all modes |k| ≤ N with unit weights over t ∈ [0, 2π]")
            .number("cutoff", "modes", "N", p.cutoffs.iter().map(|n| *n as f64))
            .number("lhs", "1", "‖Σ|U f_k|²‖_{L^p_t L^q_x}", crit.lhs.clone())
            .number("rhs-critical", "1", "N^{1/p} ‖λ‖_{l^α} at the critical α", crit.rhs.clone())
            .number("ratio-critical", "1", "lhs / rhs-critical", ratio(&crit))
            .number("rhs-above", "1", "N^{1/p} ‖λ‖_{l^α} at α above critical", above.rhs.clone())
            .number("ratio-above", "1", "lhs / rhs-above", ratio(&above)),
    );
    ctx.table(
        Table::new("slopes", "log-log slopes against N")
            .number("alpha", "1", "weight exponent", [crit.alpha, above.alpha])
            .number("lhs-slope", "1", "slope of lhs", [crit.lhs_slope, above.lhs_slope])
            .number("ratio-slope", "1", "slope of lhs / rhs", [crit.ratio_slope, above.ratio_slope])
            .number("predicted", "1", "d − 1/p − d/α", [crit.predicted_ratio_slope, above.predicted_ratio_slope]),
    );
    ctx.check(Assertion::within(
        "lhs:slope",
        "the density norm grows like N^d",
        p.lhs_slope,
        crit.lhs_slope,
        p.slope_tol,
    ));
    ctx.check(Assertion::at_most(
        "critical:ratio-slope",
        "no growth at the critical weight exponent",
        0.05,
        crit.ratio_slope,
    ));
    ctx.check(Assertion::within(
        "above:ratio-slope",
        "growth rate above the critical weight exponent",
        p.expected_above_slope,
        above.ratio_slope,
        0.05,
    ));
    Ok(())
}

/// `W(t, x) = amplitude · exp(−x-rate (x − x-shift)² − t-rate (t − t-center)²)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
pub struct GaussianWeight {
    pub x_rate: f64,
    pub t_rate: f64,
    pub x_shift: f64,
    pub t_center: f64,
    pub amplitude: f64,
}

impl Default for GaussianWeight {
    fn default() -> Self {
        Self {
            x_rate: 0.5,
            t_rate: 1.0,
            x_shift: 0.0,
            t_center: 0.0,
            amplitude: 1.0,
        }
    }
}

impl GaussianWeight {
    fn field(&self, times: &TimeGrid, grid: &Grid) -> SpaceTimeField {
        SpaceTimeField::from_fn(times, grid, |t, x| {
            let e = -self.x_rate * (x[0] - self.x_shift).powi(2) - self.t_rate * (t - self.t_center).powi(2);
            Complex64::new(self.amplitude * e.exp(), 0.0)
        })
    }

    fn label(&self) -> String {
        format!(
            "exp(-{}(x-{})^2-{}(t-{})^2)",
            self.x_rate, self.x_shift, self.t_rate, self.t_center
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LineSymbol {
    Elliptic,
    Boussinesq,
}

impl LineSymbol {
    fn spec(self) -> PropagatorSpec {
        match self {
            LineSymbol::Elliptic => PropagatorSpec::elliptic(1),
            LineSymbol::Boussinesq => PropagatorSpec::boussinesq(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SchattenCase {
    pub name: String,
    pub symbol: LineSymbol,
    pub q_prime: f64,
    pub window: (f64, f64),
    pub weight: GaussianWeight,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
pub struct SchattenParams {
    pub cases: Vec<SchattenCase>,
    pub box_length: f64,
    /// Spatial resolutions; the last one is pinned.
    pub points: Vec<usize>,
    pub panels: usize,
    pub per_panel: usize,
    pub pin_tolerance: f64,
    /// Small grid for the factored against dense comparison.
    pub cross_check_points: usize,
    pub cross_check_per_panel: usize,
    pub cross_check_tol: f64,
}

impl Default for SchattenParams {
    fn default() -> Self {
        let w = GaussianWeight::default();
        Self {
            cases: vec![
                SchattenCase {
                    name: "elliptic-q1.4".into(),
                    symbol: LineSymbol::Elliptic,
                    q_prime: 1.4,
                    window: (0.0, 1.0),
                    weight: w,
                },
                SchattenCase {
                    name: "elliptic-q1.2".into(),
                    symbol: LineSymbol::Elliptic,
                    q_prime: 1.2,
                    window: (0.0, 1.0),
                    weight: w,
                },
                SchattenCase {
                    name: "boussinesq-small".into(),
                    symbol: LineSymbol::Boussinesq,
                    q_prime: 1.5,
                    window: (0.0, 1.0),
                    weight: w,
                },
                SchattenCase {
                    name: "boussinesq-large".into(),
                    symbol: LineSymbol::Boussinesq,
                    q_prime: 1.5,
                    window: (1.0, 3.0),
                    weight: GaussianWeight { t_center: 2.0, ..w },
                },
            ],
            box_length: 16.0,
            points: vec![32, 64],
            panels: 2,
            per_panel: 16,
            pin_tolerance: 0.1,
            cross_check_points: 12,
            cross_check_per_panel: 6,
            cross_check_tol: 1e-8,
        }
    }
}

fn panel_times(window: (f64, f64), panels: usize, per_panel: usize) -> TimeGrid {
    let breaks: Vec<f64> = (0..=panels)
        .map(|i| window.0 + (window.1 - window.0) * i as f64 / panels as f64)
        .collect();
    TimeGrid::composite_gauss(&breaks, per_panel)
}

fn box_propagator(spec: PropagatorSpec, points: usize, length: f64) -> Result<Propagator, HarnessError> {
    Ok(Propagator::new(spec, Grid::Periodic(PeriodicGrid::centered(1, points, length)))?)
}

fn exponents_for(prop: &Propagator, times: &TimeGrid, q_prime: f64) -> Result<SchattenExponents, HarnessError> {
    Ok(SchattenExponents::on_line(density_line(prop.spec(), times)?, q_prime)?)
}

pub fn schatten_bounds(ctx: &mut Context, table: &toml::Table) -> Result<(), HarnessError> {
    let p: SchattenParams = ctx.params(table)?;
    if p.points.is_empty() || p.panels == 0 {
        return Err(HarnessError::Usage("schatten-bounds needs points and panels".into()));
    }
    let mut rows = Vec::new();
    for case in &p.cases {
        let times = panel_times(case.window, p.panels, p.per_panel);
        for &n in &p.points {
            let prop = box_propagator(case.symbol.spec(), n, p.box_length)?;
            let ex = exponents_for(&prop, &times, case.q_prime)?;
            let w = case.weight.field(&times, prop.grid());
            let r = schatten_bound_check(&w, &w, &prop, &times, ex)?;
            rows.push((case.name.clone(), n, ex, r));
        }
    }
    ctx.table(
        Table::new("bounds", "‖W U U* W‖_{𝔖^{2q′}} / ‖W‖²_{L^{2p′}_t L^{2q′}_x} with Gaussian W")
            .text("case", "symbol, exponent and window", rows.iter().map(|r| r.0.clone()))
            .number("points", "count", "spatial grid points", rows.iter().map(|r| r.1 as f64))
            .number("p-prime", "1", "time exponent p′", rows.iter().map(|r| r.2.p_prime))
            .number("q-prime", "1", "space exponent q′", rows.iter().map(|r| r.2.q_prime))
            .number("index", "1", "Schatten index 2q′", rows.iter().map(|r| r.3.index))
            .number("schatten", "1", "Schatten norm", rows.iter().map(|r| r.3.schatten))
            .number("weight-norm", "1", "‖W‖ in the dual mixed norm", rows.iter().map(|r| r.3.w1_norm))
            .number("ratio", "1", "Schatten norm / ‖W‖²", rows.iter().map(|r| r.3.ratio)),
    );
    let finest = *p.points.last().unwrap_or(&0);
    for case in &p.cases {
        let of_case: Vec<_> = rows.iter().filter(|r| r.0 == case.name).collect();
        let top = of_case.iter().find(|r| r.1 == finest).map_or(f64::NAN, |r| r.3.ratio);
        ctx.check(Assertion::flag(
            &format!("{}:finite", case.name),
            "the ratio is finite and positive",
            top.is_finite() && top > 0.0,
        ));
        ctx.pin_relative(&case.name, top, p.pin_tolerance);
    }

    let spec = PropagatorSpec::elliptic(1);
    let prop = box_propagator(spec, p.cross_check_points, 8.0)?;
    let times = panel_times((0.0, 1.0), 2, p.cross_check_per_panel);
    let w1 = GaussianWeight { x_shift: 0.3, ..GaussianWeight::default() }.field(&times, prop.grid());
    let w2 = SpaceTimeField::from_fn(&times, prop.grid(), |t, x| Complex64::new(x[0].cos(), t).scale((-x[0] * x[0]).exp()));
    let mut a = operator_singular_values(&prop, &times, &w1, &w2)?;
    let mut b = singular_values(&dense_operator(&prop, &times, &w1, &w2)?);
    a.sort_by(|x, y| y.total_cmp(x));
    b.sort_by(|x, y| y.total_cmp(x));
    let top = b.first().copied().unwrap_or(0.0);
    let diff = (0..a.len().max(b.len()))
        .map(|i| (a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
        / top.max(f64::MIN_POSITIVE);
    ctx.table(
        Table::new("cross-check", "singular values by the factored route against the dense space-time matrix")
            .number("rank", "index", "position in decreasing order", (0..b.len()).map(|i| i as f64))
            .number("factored", "1", "from the QR factors", (0..b.len()).map(|i| a.get(i).copied().unwrap_or(0.0)))
            .number("dense", "1", "from the assembled matrix", b.clone()),
    );
    ctx.check(Assertion::at_most(
        "cross-check:max-rel-diff",
        "factored and dense singular values agree",
        p.cross_check_tol,
        diff,
    ));
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
pub struct DualityParams {
    pub points: usize,
    pub box_length: f64,
    pub breaks: Vec<f64>,
    pub per_panel: usize,
    pub q_prime: f64,
    pub rank_one: usize,
    pub systems: usize,
    /// Sizes cycled through for the multi-function corpus.
    pub system_sizes: Vec<usize>,
    pub weights: Vec<GaussianWeight>,
    /// Allowed factor between the two sides.
    pub factor: f64,
}

impl Default for DualityParams {
    fn default() -> Self {
        let w = |x_shift: f64, x_rate: f64| GaussianWeight {
            x_rate,
            t_rate: 2.0,
            x_shift,
            t_center: 0.5,
            amplitude: 1.0,
        };
        Self {
            points: 16,
            box_length: 10.0,
            breaks: vec![0.0, 0.5, 1.0],
            per_panel: 8,
            q_prime: 1.4,
            rank_one: 10,
            systems: 20,
            system_sizes: vec![2, 3, 4, 5],
            weights: vec![w(0.0, 1.0), w(1.5, 1.0), w(-2.0, 0.5)],
            factor: 2.0,
        }
    }
}

pub fn duality(ctx: &mut Context, table: &toml::Table) -> Result<(), HarnessError> {
    let p: DualityParams = ctx.params(table)?;
    if p.system_sizes.is_empty() {
        return Err(HarnessError::Usage("duality needs system-sizes".into()));
    }
    let prop = box_propagator(PropagatorSpec::elliptic(1), p.points, p.box_length)?;
    let times = TimeGrid::composite_gauss(&p.breaks, p.per_panel);
    let ex = exponents_for(&prop, &times, p.q_prime)?;
    let (dp, dq) = ex.density_exponents();
    let norm = MixedNormSpec::new(dp, dq, times.clone());
    let weights: Vec<SpaceTimeField> = p.weights.iter().map(|w| w.field(&times, prop.grid())).collect();

    let mut rng = ctx.rng(1);
    let rank_one = (0..p.rank_one)
        .map(|_| OrthonormalSystem::random(&prop, 1, &mut rng))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rng = ctx.rng(2);
    let many = (0..p.systems)
        .map(|i| {
            let j = p.system_sizes[i % p.system_sizes.len()];
            let s = OrthonormalSystem::random(&prop, j, &mut rng)?;
            let lam: Vec<f64> = (0..j).map(|k| 1.0 / (k + 1) as f64).collect();
            s.with_weights(lam)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let corpora: Vec<(&str, DualityReport)> = vec![
        ("rank-one", duality_crosscheck(&rank_one, &weights, &prop, &norm, ex)?),
        ("systems", duality_crosscheck(&many, &[], &prop, &norm, ex)?),
    ];
    let cases: Vec<(&str, &strichartz_core::spectral_systems::DualityCase)> =
        corpora.iter().flat_map(|(n, r)| r.cases.iter().map(move |c| (*n, c))).collect();
    ctx.table(
        Table::new("cases", "density ratio against Schatten ratio of the Hölder-extremal partner")
            .text("corpus", "rank-one or multi-function systems", cases.iter().map(|c| c.0.to_string()))
            .text(
                "source",
                "what was drawn: a system or a weight",
                cases.iter().map(|c| match c.1.source {
                    DualitySource::System => "system".to_string(),
                    DualitySource::Weight => "weight".to_string(),
                }),
            )
            .number("index", "index", "position in the corpus", cases.iter().map(|c| c.1.index as f64))
            .number("density-ratio", "1", "‖ρ_γ‖_{L^p L^q} / ‖λ‖_{l^{α′}}", cases.iter().map(|c| c.1.density_ratio))
            .number("schatten-ratio", "1", "‖W U U* W̄‖_{𝔖^α} / ‖W‖²", cases.iter().map(|c| c.1.schatten_ratio))
            .text("holds", "dominating side within the factor", cases.iter().map(|c| c.1.holds.to_string())),
    );
    ctx.table(
        Table::new("constants", "best constants per corpus")
            .text("corpus", "corpus", corpora.iter().map(|c| c.0.to_string()))
            .number("schatten-constant", "1", "largest Schatten-side ratio", corpora.iter().map(|c| c.1.schatten_constant))
            .number("density-constant", "1", "largest density-side ratio", corpora.iter().map(|c| c.1.density_constant)),
    );
    for (name, r) in &corpora {
        let failing = r.cases.iter().filter(|c| !c.holds).count();
        ctx.check(Assertion::at_most(
            &format!("{name}:failing-cases"),
            "every case keeps the Schatten side above half the density side",
            0.0,
            failing as f64,
        ));
        ctx.check(Assertion::at_least(
            &format!("{name}:constants"),
            "Schatten-side constant at least the density-side constant over the factor",
            r.density_constant / p.factor,
            r.schatten_constant,
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
pub struct VanishingParams {
    pub points: usize,
    pub box_length: f64,
    pub t_max: f64,
    /// Cuts `t_max · 2^{-j}` for `j = 0..=levels`.
    pub levels: usize,
    pub per_panel: usize,
    pub q_prime: f64,
    pub weights: Vec<GaussianWeight>,
    /// Largest allowed final / initial Schatten norm.
    pub final_fraction: f64,
}

impl Default for VanishingParams {
    fn default() -> Self {
        Self {
            points: 32,
            box_length: 16.0,
            t_max: 1.0,
            levels: 6,
            per_panel: 16,
            q_prime: 1.4,
            weights: vec![
                GaussianWeight::default(),
                GaussianWeight {
                    x_rate: 1.0,
                    t_rate: 2.0,
                    x_shift: 1.0,
                    t_center: 0.0,
                    amplitude: 1.0,
                },
            ],
            final_fraction: 0.1,
        }
    }
}

pub fn vanishing(ctx: &mut Context, table: &toml::Table) -> Result<(), HarnessError> {
    let p: VanishingParams = ctx.params(table)?;
    let prop = box_propagator(PropagatorSpec::elliptic(1), p.points, p.box_length)?;
    let times = TimeGrid::dyadic(p.t_max, p.levels, p.per_panel);
    let ex = exponents_for(&prop, &times, p.q_prime)?;
    let cuts: Vec<f64> = (0..=p.levels).map(|j| p.t_max * 0.5f64.powi(j as i32)).collect();
    for (i, w) in p.weights.iter().enumerate() {
        let field = w.field(&times, prop.grid());
        let tab = schatten_vanishing(&field, &field, &prop, &times, ex, &cuts)?;
        let name = format!("weight-{i}");
        ctx.table(
            Table::new(&name, &format!("Schatten norm over [0, t] for W = {}", w.label()))
                .number("cut", "time", "t", tab.cuts.clone())
                .number("schatten", "1", "Schatten norm on [0, t]", tab.schatten.clone())
                .number("weight-norms", "1", "‖W‖² on [0, t]", tab.weight_norms.clone()),
        );
        let first = tab.schatten.first().copied().unwrap_or(f64::NAN);
        let last = tab.schatten.last().copied().unwrap_or(f64::NAN);
        ctx.check(Assertion::new(
            &format!("{name}:monotone"),
            "the norm never increases as the window shrinks",
            crate::report::Comparison::AtMost,
            0.0,
            tab.max_increase,
            1e-12 * first,
        ));
        ctx.check(Assertion::at_most(
            &format!("{name}:final-fraction"),
            "final norm below the fraction of the initial one",
            p.final_fraction,
            last / first,
        ));
    }
    Ok(())
}
