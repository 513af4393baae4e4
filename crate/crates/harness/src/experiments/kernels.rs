use super::{max_of, Context};
use crate::error::HarnessError;
use crate::report::{Assertion, Table};
use serde::{Deserialize, Serialize};
use strichartz_core::dispersive_kernels::{decay_fit, kernel_value, DecayFit, PropagatorSpec};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
pub struct DecayParams {
    /// Log-spaced times per fit.
    pub samples: usize,
    pub elliptic_window: (f64, f64),
    pub small_window: (f64, f64),
    pub large_window: (f64, f64),
    pub exponent_tol: f64,
    pub modulus_times: Vec<f64>,
    pub modulus_points: Vec<(f64, f64)>,
    pub modulus_tol: f64,
}

impl Default for DecayParams {
    fn default() -> Self {
        Self {
            samples: 16,
            elliptic_window: (1e-3, 1.0),
            small_window: (1e-3, 1e-1),
            large_window: (10.0, 1e3),
            exponent_tol: 0.05,
            modulus_times: vec![-0.7, 0.2, 1.0, 3.0],
            modulus_points: vec![(0.0, 0.0), (1.0, -2.0), (5.0, 0.3), (-3.0, 4.0)],
            modulus_tol: 1e-10,
        }
    }
}

pub fn decay_fits(ctx: &mut Context, table: &toml::Table) -> Result<(), HarnessError> {
    let p: DecayParams = ctx.params(table)?;
    let cases: [(&str, PropagatorSpec, (f64, f64), f64); 3] = [
        ("elliptic-d1", PropagatorSpec::elliptic(1), p.elliptic_window, -0.5),
        ("boussinesq-small", PropagatorSpec::boussinesq(), p.small_window, -0.5),
        ("boussinesq-large", PropagatorSpec::boussinesq(), p.large_window, -1.0 / 3.0),
    ];
    let mut fits: Vec<(&str, DecayFit, f64)> = Vec::new();
    for (name, spec, window, expected) in cases {
        fits.push((name, decay_fit(&spec, window, p.samples)?, expected));
    }
    ctx.table(
        Table::new("fits", "least-squares slope of log sup_x |K(t,x)| against log t")
            .text("case", "propagator and time regime", fits.iter().map(|f| f.0.to_string()))
            .number("t-min", "time", "window start", fits.iter().map(|f| f.1.time_window.0))
            .number("t-max", "time", "window end", fits.iter().map(|f| f.1.time_window.1))
            .number("exponent", "1", "fitted slope", fits.iter().map(|f| f.1.exponent))
            .number("stderr", "1", "standard error of the slope", fits.iter().map(|f| f.1.exponent_stderr))
            .number("expected", "1", "predicted decay exponent", fits.iter().map(|f| f.2))
            .number("dropped", "count", "times whose kernel evaluation failed", fits.iter().map(|f| f.1.dropped.len() as f64)),
    );
    let samples: Vec<(&str, f64, f64)> = fits
        .iter()
        .flat_map(|(name, f, _)| f.points.iter().map(move |(t, s)| (*name, *t, *s)))
        .collect();
    ctx.table(
        Table::new("samples", "sup_x |K(t,x)| at each fitted time")
            .text("case", "propagator and time regime", samples.iter().map(|s| s.0.to_string()))
            .number("t", "time", "time", samples.iter().map(|s| s.1))
            .number("sup-kernel", "1", "sup_x |K(t,x)|", samples.iter().map(|s| s.2)),
    );
    for (name, f, expected) in &fits {
        ctx.check(Assertion::within(
            &format!("{name}:exponent"),
            "fitted decay exponent",
            *expected,
            f.exponent,
            p.exponent_tol,
        ));
        ctx.check(Assertion::at_most(
            &format!("{name}:dropped"),
            "every kernel evaluation succeeded",
            0.0,
            f.dropped.len() as f64,
        ));
    }

    let elliptic = PropagatorSpec::elliptic(2);
    let hyperbolic = PropagatorSpec::non_elliptic(2, 1);
    let mut rows = Vec::new();
    for &t in &p.modulus_times {
        for &(x1, x2) in &p.modulus_points {
            let a = kernel_value(&elliptic, t, &[x1, x2])?.norm();
            let b = kernel_value(&hyperbolic, t, &[x1, x2])?.norm();
            rows.push((t, x1, x2, a, b));
        }
    }
    let rel: Vec<f64> = rows.iter().map(|r| (r.3 - r.4).abs() / r.3).collect();
    ctx.table(
        Table::new("moduli", "|K(t,x)| for Δ and for the signature-(1,1) operator in d = 2")
            .number("t", "time", "time", rows.iter().map(|r| r.0))
            .number("x1", "length", "first coordinate", rows.iter().map(|r| r.1))
            .number("x2", "length", "second coordinate", rows.iter().map(|r| r.2))
            .number("elliptic", "1", "|K| for the Laplacian", rows.iter().map(|r| r.3))
            .number("non-elliptic", "1", "|K| for the non-elliptic Laplacian", rows.iter().map(|r| r.4))
            .number("rel-diff", "1", "relative difference", rel.clone()),
    );
    ctx.check(Assertion::at_most(
        "non-elliptic:modulus",
        "non-elliptic kernel modulus equals the elliptic one",
        p.modulus_tol,
        max_of(rel),
    ));
    Ok(())
}
