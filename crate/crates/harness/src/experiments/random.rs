use super::{max_of, Context};
use crate::error::HarnessError;
use crate::report::{Assertion, Table};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use strichartz_core::dispersive_kernels::{PropagatorSpec, Symbol};
use strichartz_core::grid::{Grid, PeriodicGrid, Propagator, RadialGrid};
use strichartz_core::quadrature::fit_slope;
use strichartz_core::randomization::{
    convergence_probe, khinchin_check, l2lp_estimate_probe, moment_bound_probe, sign_flip_symmetry, threshold,
    Distribution, RandomizationEnsemble, RandomizedOperator, Randomizer,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Geometry {
    Torus,
    Ball,
}

impl Geometry {
    fn as_str(self) -> &'static str {
        match self {
            Geometry::Torus => "torus",
            Geometry::Ball => "ball",
        }
    }
}

/// The finite-rank operator `Σ λ_n |f_n⟩⟨f_n|` with `λ_n = decay^n`.
///
/// On the torus `f_n` are discrete Fourier rows spread over the modes
/// `|k| ≤ band`; on the ball they are discrete sine rows over the first
/// `modes` radial eigenfunctions.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
pub struct OperatorParams {
    pub terms: usize,
    pub decay: f64,
    pub torus_points: usize,
    pub torus_band: usize,
    pub ball_points: usize,
    pub ball_modes: usize,
}

impl Default for OperatorParams {
    fn default() -> Self {
        Self {
            terms: 5,
            decay: 0.5,
            torus_points: 64,
            torus_band: 16,
            ball_points: 64,
            ball_modes: 32,
        }
    }
}

impl OperatorParams {
    fn weights(&self) -> Vec<f64> {
        (1..=self.terms).map(|n| self.decay.powi(n as i32)).collect()
    }

    fn build(&self, geometry: Geometry) -> Result<RandomizedOperator, HarnessError> {
        if self.terms == 0 {
            return Err(HarnessError::Usage("operator needs at least one term".into()));
        }
        let (prop, coefficients) = match geometry {
            Geometry::Torus => {
                let g = PeriodicGrid::torus(1, self.torus_points);
                let k_max = self.torus_band as i64;
                let width = (2 * self.torus_band + 1) as f64;
                if self.terms as f64 >= width {
                    return Err(HarnessError::Usage("more terms than band modes".into()));
                }
                let prop = Propagator::new(PropagatorSpec::torus(Symbol::Elliptic, 1, self.torus_band), Grid::Periodic(g))?;
                let rows = (1..=self.terms)
                    .map(|n| {
                        (0..g.len())
                            .map(|slot| {
                                let k = g.mode(slot)[0];
                                if k.abs() <= k_max {
                                    let phase = -2.0 * PI * n as f64 * (k + k_max) as f64 / width;
                                    Complex64::from_polar(width.sqrt().recip(), phase)
                                } else {
                                    Complex64::new(0.0, 0.0)
                                }
                            })
                            .collect()
                    })
                    .collect();
                (prop, rows)
            }
            Geometry::Ball => {
                if self.ball_modes > self.ball_points || self.terms > self.ball_modes {
                    return Err(HarnessError::Usage("ball needs terms ≤ modes ≤ points".into()));
                }
                let prop = Propagator::new(PropagatorSpec::ball(self.ball_modes), Grid::Radial(RadialGrid { n: self.ball_points }))?;
                let width = (self.ball_modes + 1) as f64;
                let rows = (1..=self.terms)
                    .map(|n| {
                        (1..=self.ball_points)
                            .map(|m| {
                                if m <= self.ball_modes {
                                    let v = (2.0 / width).sqrt() * ((n * m) as f64 * PI / width).sin();
                                    Complex64::new(v, 0.0)
                                } else {
                                    Complex64::new(0.0, 0.0)
                                }
                            })
                            .collect()
                    })
                    .collect();
                (prop, rows)
            }
        };
        Ok(RandomizedOperator::new(Randomizer::new(prop)?, coefficients, self.weights())?)
    }
}

fn ensemble(distribution: Distribution, samples: usize, seed: u64) -> Result<RandomizationEnsemble, HarnessError> {
    Ok(RandomizationEnsemble::new(distribution, samples, seed)?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
pub struct KhinchinParams {
    pub samples: usize,
    pub r: Vec<f64>,
    /// Coefficient vectors; a built-in corpus of ten when empty.
    pub vectors: Vec<Vec<f64>>,
    pub bound_factor: f64,
    /// Standard errors allowed in the Gaussian `r = 2` identity.
    pub gaussian_sigmas: f64,
}

impl Default for KhinchinParams {
    fn default() -> Self {
        Self {
            samples: 100_000,
            r: vec![2.0, 4.0, 8.0],
            vectors: Vec::new(),
            bound_factor: 1.1,
            gaussian_sigmas: 3.0,
        }
    }
}

fn khinchin_corpus() -> Vec<(String, Vec<f64>)> {
    vec![
        ("unit".into(), vec![1.0]),
        ("ones-2".into(), vec![1.0; 2]),
        ("ones-5".into(), vec![1.0; 5]),
        ("ones-20".into(), vec![1.0; 20]),
        ("geometric".into(), (0..10).map(|k| 0.5f64.powi(k)).collect()),
        ("harmonic".into(), (1..=50).map(|k| 1.0 / k as f64).collect()),
        ("root-harmonic".into(), (1..=100).map(|k| (k as f64).powf(-0.5)).collect()),
        ("alternating".into(), (0..15).map(|k| if k % 2 == 0 { 1.0 } else { -2.0 }).collect()),
        ("spike".into(), std::iter::once(5.0).chain(std::iter::repeat_n(0.2, 24)).collect()),
        ("cosine".into(), (0..30).map(|k| (0.7 * k as f64).cos()).collect()),
    ]
}

pub fn khinchin(ctx: &mut Context, table: &toml::Table) -> Result<(), HarnessError> {
    let p: KhinchinParams = ctx.params(table)?;
    let corpus: Vec<(String, Vec<f64>)> = if p.vectors.is_empty() {
        khinchin_corpus()
    } else {
        p.vectors.iter().enumerate().map(|(i, v)| (format!("vector-{i}"), v.clone())).collect()
    };
    let rad = ensemble(Distribution::Rademacher, p.samples, ctx.seed)?;
    let gauss = ensemble(Distribution::StandardGaussian, p.samples, ctx.seed)?;
    let mut rows = Vec::new();
    for (name, a) in &corpus {
        for (label, ens) in [("rademacher", &rad), ("gaussian", &gauss)] {
            for row in khinchin_check(a, ens, &p.r)? {
                rows.push((name.clone(), label, a.iter().map(|v| v * v).sum::<f64>().sqrt(), row));
            }
        }
    }
    ctx.table(
        Table::new("moments", "‖Σ a_k g_k‖_{L^r_ω} against r^{1/2} ‖a‖₂")
            .text("vector", "coefficient vector", rows.iter().map(|r| r.0.clone()))
            .text("distribution", "law of g_k", rows.iter().map(|r| r.1.to_string()))
            .number("r", "1", "moment order", rows.iter().map(|r| r.3.r))
            .number("l2-norm", "1", "‖a‖₂", rows.iter().map(|r| r.2))
            .number("moment", "1", "Monte Carlo L^r_ω norm", rows.iter().map(|r| r.3.moment))
            .number("moment-stderr", "1", "standard error", rows.iter().map(|r| r.3.moment_stderr))
            .number("ratio", "1", "moment / (r^{1/2} ‖a‖₂)", rows.iter().map(|r| r.3.ratio))
            .number("ratio-stderr", "1", "standard error", rows.iter().map(|r| r.3.ratio_stderr)),
    );
    for label in ["rademacher", "gaussian"] {
        let worst = max_of(rows.iter().filter(|r| r.1 == label).map(|r| r.3.ratio));
        ctx.pin_bounded(&format!("{label}-max-ratio"), worst, p.bound_factor);
    }
    let z = max_of(
        rows.iter()
            .filter(|r| r.1 == "gaussian" && r.3.r == 2.0)
            .map(|r| (r.3.moment - r.2).abs() / r.3.moment_stderr),
    );
    if p.r.contains(&2.0) {
        ctx.check(Assertion::at_most(
            "gaussian:r2-identity",
            "Gaussian second moment equals ‖a‖₂ (largest deviation in standard errors)",
            p.gaussian_sigmas,
            z,
        ));
    }
    let unit_err = max_of(
        rows.iter()
            .filter(|r| r.1 == "rademacher" && r.0 == "unit")
            .map(|r| (r.3.moment - 1.0).abs()),
    );
    if unit_err.is_finite() {
        ctx.check(Assertion::at_most(
            "rademacher:unit-vector",
            "a single Rademacher sign has every moment equal to 1",
            1e-12,
            unit_err,
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
pub struct L2lpParams {
    pub geometries: Vec<Geometry>,
    pub operator: OperatorParams,
    pub distribution: Distribution,
    pub samples: usize,
    pub p: Vec<f64>,
    pub times: Vec<f64>,
    /// Smallest acceptable log-log slope of the estimate over the
    /// `rate-points` smallest positive times.
    pub min_rate: f64,
    pub rate_points: usize,
    pub bound_factor: f64,
}

impl Default for L2lpParams {
    fn default() -> Self {
        Self {
            geometries: vec![Geometry::Torus, Geometry::Ball],
            operator: OperatorParams::default(),
            distribution: Distribution::StandardGaussian,
            samples: 10_000,
            p: vec![2.0, 4.0, 8.0],
            times: vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 0.0],
            min_rate: 0.9,
            rate_points: 2,
            bound_factor: 1.1,
        }
    }
}

/// Largest rise of `values` when `times` decrease, relative to the first value.
fn rise_as_t_shrinks(times: &[f64], values: &[f64]) -> f64 {
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&i, &j| times[j].abs().total_cmp(&times[i].abs()));
    order.windows(2).map(|w| values[w[1]] - values[w[0]]).fold(f64::NEG_INFINITY, f64::max)
}

/// Log-log slope through `(t, value)` pairs; NaN when fewer than two or any
/// value is not positive.
fn vanishing_rate(points: &[(f64, f64)]) -> f64 {
    if points.len() < 2 || points.iter().any(|(_, v)| *v <= 0.0 || !v.is_finite()) {
        return f64::NAN;
    }
    let x: Vec<f64> = points.iter().map(|(t, _)| t.ln()).collect();
    let y: Vec<f64> = points.iter().map(|(_, v)| v.ln()).collect();
    fit_slope(&x, &y).0
}

pub fn l2lp(ctx: &mut Context, table: &toml::Table) -> Result<(), HarnessError> {
    let p: L2lpParams = ctx.params(table)?;
    let ens = ensemble(p.distribution, p.samples, ctx.seed)?;
    for &geo in &p.geometries {
        let op = p.operator.build(geo)?;
        let mut rows = Vec::new();
        for &pp in &p.p {
            let tab = l2lp_estimate_probe(&op, &ens, &p.times, pp)?;
            for i in 0..tab.times.len() {
                rows.push((pp, tab.times[i], tab.values[i], tab.stderr[i], tab.scaled[i]));
            }
        }
        let name = geo.as_str();
        ctx.table(
            Table::new(
                &format!("{name}-estimates"),
                "‖ λ_n ‖U(t) f_n^ω − f_n^ω‖_{L^p_ω L²_x} ‖_{l²_n} and its value over p^{d/2}(‖γ₀‖_{𝔖²} + 1)",
            )
            .number("p", "1", "moment order", rows.iter().map(|r| r.0))
            .number("t", "time", "time", rows.iter().map(|r| r.1))
            .number("value", "1", "Monte Carlo estimate", rows.iter().map(|r| r.2))
            .number("stderr", "1", "standard error", rows.iter().map(|r| r.3))
            .number("scaled", "1", "value / (p^{d/2} (‖γ₀‖_{𝔖²} + 1))", rows.iter().map(|r| r.4)),
        );
        let at_zero = max_of(rows.iter().filter(|r| r.1 == 0.0).map(|r| r.2));
        if at_zero.is_finite() {
            ctx.check(Assertion::at_most(
                &format!("{name}:zero-time"),
                "the estimate vanishes at t = 0",
                0.0,
                at_zero,
            ));
        }
        let mut rate = f64::INFINITY;
        let mut rise = f64::NEG_INFINITY;
        for &pp in &p.p {
            let of_p: Vec<_> = rows.iter().filter(|r| r.0 == pp).collect();
            let mut small: Vec<(f64, f64)> = of_p.iter().filter(|r| r.1 != 0.0).map(|r| (r.1.abs(), r.2)).collect();
            small.sort_by(|a, b| a.0.total_cmp(&b.0));
            small.truncate(p.rate_points);
            let r = vanishing_rate(&small);
            rate = if r.is_nan() || rate.is_nan() { f64::NAN } else { rate.min(r) };
            let ts: Vec<f64> = of_p.iter().map(|r| r.1).collect();
            let vs: Vec<f64> = of_p.iter().map(|r| r.2).collect();
            rise = rise.max(rise_as_t_shrinks(&ts, &vs));
        }
        ctx.check(Assertion::at_least(
            &format!("{name}:vanishing-rate"),
            "slope of log(estimate) against log t at the smallest times",
            p.min_rate,
            rate,
        ));
        ctx.check(Assertion::at_most(
            &format!("{name}:monotone"),
            "the estimate never grows as t decreases",
            0.0,
            rise,
        ));
        ctx.pin_bounded(&format!("{name}-max-scaled"), max_of(rows.iter().map(|r| r.4)), p.bound_factor);
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
pub struct MomentParams {
    pub geometries: Vec<Geometry>,
    pub operator: OperatorParams,
    pub distribution: Distribution,
    pub samples: usize,
    pub p: Vec<f64>,
    pub times: Vec<f64>,
    pub bound_factor: f64,
}

impl Default for MomentParams {
    fn default() -> Self {
        Self {
            geometries: vec![Geometry::Torus, Geometry::Ball],
            operator: OperatorParams::default(),
            distribution: Distribution::Rademacher,
            samples: 100_000,
            p: vec![2.0, 4.0, 8.0],
            times: vec![0.01, 0.1, 1.0],
            bound_factor: 1.1,
        }
    }
}

pub fn moments(ctx: &mut Context, table: &toml::Table) -> Result<(), HarnessError> {
    let p: MomentParams = ctx.params(table)?;
    let ens = ensemble(p.distribution, p.samples, ctx.seed)?;
    for &geo in &p.geometries {
        let op = p.operator.build(geo)?;
        let mut rows = Vec::new();
        for &t in &p.times {
            for r in moment_bound_probe(&op, &ens, &p.p, t)? {
                rows.push((t, r));
            }
        }
        let name = geo.as_str();
        ctx.table(
            Table::new(&format!("{name}-moments"), "‖ ‖f^ω‖_{L²_x} ‖_{L^p_ω} before and after the flow")
                .number("t", "time", "time", rows.iter().map(|r| r.0))
                .number("p", "1", "moment order", rows.iter().map(|r| r.1.p))
                .number("function", "index", "n", rows.iter().map(|r| r.1.function as f64))
                .number("initial", "1", "moment of f_n^ω", rows.iter().map(|r| r.1.initial))
                .number("evolved", "1", "moment of U(t) f_n^ω", rows.iter().map(|r| r.1.evolved))
                .number("stderr", "1", "standard error", rows.iter().map(|r| r.1.stderr))
                .number("ratio", "1", "max(initial, evolved) / p^{d/2}", rows.iter().map(|r| r.1.ratio)),
        );
        let drift = max_of(rows.iter().map(|r| (r.1.evolved - r.1.initial).abs() / r.1.initial.max(f64::MIN_POSITIVE)));
        ctx.check(Assertion::at_most(
            &format!("{name}:unitary"),
            "the flow leaves every moment unchanged",
            1e-12,
            drift,
        ));
        if geo == Geometry::Torus && p.distribution == Distribution::Rademacher {
            let err = max_of(rows.iter().filter(|r| r.1.p == 2.0).map(|r| (r.1.initial - 1.0).abs()));
            if err.is_finite() {
                ctx.check(Assertion::at_most(
                    "torus:p2-exact",
                    "unit-norm data keeps norm 1 under Rademacher mode signs",
                    1e-12,
                    err,
                ));
            }
        }
        ctx.pin_bounded(&format!("{name}-max-ratio"), max_of(rows.iter().map(|r| r.1.ratio)), p.bound_factor);
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
pub struct ConvergenceParams {
    pub geometries: Vec<Geometry>,
    pub operator: OperatorParams,
    pub distribution: Distribution,
    pub samples: usize,
    pub epsilon: f64,
    pub constant: f64,
    pub times: Vec<f64>,
    /// Allowed rise between neighbouring times, in standard errors.
    pub noise_band: f64,
    pub symmetry_samples: usize,
    pub symmetry_time: f64,
    pub symmetry_term: usize,
    pub symmetry_point: usize,
}

impl Default for ConvergenceParams {
    fn default() -> Self {
        Self {
            geometries: vec![Geometry::Torus, Geometry::Ball],
            operator: OperatorParams::default(),
            distribution: Distribution::Rademacher,
            samples: 10_000,
            epsilon: 0.1,
            constant: 1.0,
            times: vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5],
            noise_band: 2.0,
            symmetry_samples: 100_000,
            symmetry_time: 1e-2,
            symmetry_term: 0,
            symmetry_point: 0,
        }
    }
}

pub fn convergence(ctx: &mut Context, table: &toml::Table) -> Result<(), HarnessError> {
    let p: ConvergenceParams = ctx.params(table)?;
    let ens = ensemble(p.distribution, p.samples, ctx.seed)?;
    let mut thresholds = Vec::new();
    for &geo in &p.geometries {
        let op = p.operator.build(geo)?;
        let name = geo.as_str();
        let tab = convergence_probe(&op, &ens, p.epsilon, p.constant, &p.times)?;
        ctx.table(
            Table::new(
                &format!("{name}-tails"),
                "P(sup_x |ρ₀ − ρ_t| > α(ε)) over the grid points, with α(ε) the threshold column",
            )
            .number("t", "time", "time", tab.times.clone())
            .number("probability", "1", "Monte Carlo tail probability", tab.probability.clone())
            .number("stderr", "1", "binomial standard error", tab.stderr.clone())
            .number("mean-sup", "1", "mean of sup_x |F|", tab.mean_sup.clone())
            .number("threshold", "1", "α(ε)", vec![tab.threshold; tab.times.len()]),
        );
        ctx.check(Assertion::at_most(
            &format!("{name}:monotone"),
            "tail probability nonincreasing as t decreases (largest rise in standard errors)",
            p.noise_band,
            tab.worst_rise,
        ));
        let smallest = tab
            .times
            .iter()
            .zip(&tab.probability)
            .min_by(|a, b| a.0.abs().total_cmp(&b.0.abs()))
            .map_or(f64::NAN, |x| *x.1);
        ctx.check(Assertion::at_most(
            &format!("{name}:reaches-zero"),
            "no exceedance at the smallest time",
            0.0,
            smallest,
        ));
        let zero = convergence_probe(&op, &ens, p.epsilon, p.constant, &[0.0])?;
        ctx.check(Assertion::at_most(
            &format!("{name}:zero-time"),
            "F vanishes identically at t = 0",
            0.0,
            zero.probability[0] + zero.mean_sup[0],
        ));
        let half = threshold(&op, p.epsilon / 2.0, p.constant)?;
        thresholds.push((name, tab.threshold, half));
        ctx.check(Assertion::flag(
            &format!("{name}:threshold-shrinks"),
            "halving ε lowers the threshold",
            half < tab.threshold,
        ));

        let sym_ens = ensemble(p.distribution, p.symmetry_samples, ctx.seed ^ 0x5151)?;
        let sym = sign_flip_symmetry(&op, &sym_ens, p.symmetry_term, p.symmetry_time, p.symmetry_point)?;
        ctx.table(
            Table::new(
                &format!("{name}-symmetry"),
                "two-sample Kolmogorov-Smirnov test of F against F with the isolated term's sign flipped",
            )
            .number("samples", "count", "draws per side", [sym.samples as f64])
            .number("statistic", "1", "KS distance", [sym.ks.statistic])
            .number("critical", "1", "5% critical value", [sym.ks.critical])
            .number("p-value", "1", "asymptotic p-value", [sym.ks.p_value]),
        );
        ctx.check(Assertion::at_most(
            &format!("{name}:sign-flip"),
            "empirical laws agree within the KS tolerance",
            sym.ks.critical,
            sym.ks.statistic,
        ));
    }
    ctx.table(
        Table::new("thresholds", "α(ε) = C e (‖γ₀‖_{𝔖²} + 1) ε^{1/2} (ε ln(1/ε))^κ")
            .text("geometry", "geometry", thresholds.iter().map(|t| t.0.to_string()))
            .number("epsilon", "1", "ε", vec![p.epsilon; thresholds.len()])
            .number("alpha", "1", "α(ε)", thresholds.iter().map(|t| t.1))
            .number("alpha-half", "1", "α(ε/2)", thresholds.iter().map(|t| t.2)),
    );
    Ok(())
}
