use super::{max_of, Context};
use crate::error::HarnessError;
use crate::report::{Assertion, Table};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use strichartz_core::special_integrals::{
    bound_sweep, finite_closed_forms, gamma_imag_abs, gamma_imag_abs_weierstrass, oscillatory_quadrature,
    pv_integral_closed_form, sine_integral, BoundKind, IntegralSpec, Range, SweepGrid, UnitRange,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
pub struct OracleParams {
    pub gamma_b: Vec<f64>,
    pub product_terms: usize,
    pub gamma_rel_tol: f64,
    pub pv_t: Vec<f64>,
    pub pv_b: Vec<f64>,
    pub pv_abs_tol: f64,
    pub quadrature_tol: f64,
    pub unit_b: Vec<f64>,
    pub unit_abs_tol: f64,
    pub sine_abs_tol: f64,
}

impl Default for OracleParams {
    fn default() -> Self {
        Self {
            gamma_b: vec![0.1, 0.5, 1.0, 2.0, 5.0],
            product_terms: strichartz_core::special_integrals::PRODUCT_TERMS,
            gamma_rel_tol: 1e-8,
            pv_t: vec![-2.0, -0.5, 0.5, 1.0, 3.0],
            pv_b: vec![-1.0, 0.0, 0.3, 1.0, 2.0],
            pv_abs_tol: 1e-5,
            quadrature_tol: 1e-8,
            unit_b: vec![-2.0, -0.7, 0.3, 1.0, 2.5],
            unit_abs_tol: 1e-10,
            sine_abs_tol: 1e-6,
        }
    }
}

fn range_label(r: UnitRange) -> String {
    match r {
        UnitRange::UnitInterval => "[0,1]",
        UnitRange::NegativeUnit => "[-1,0]",
        UnitRange::Tail => "[1,inf)",
        UnitRange::NegativeTail => "(-inf,-1]",
    }
    .into()
}

pub fn oracles(ctx: &mut Context, table: &toml::Table) -> Result<(), HarnessError> {
    let p: OracleParams = ctx.params(table)?;

    let mut product = Vec::new();
    let mut exact = Vec::new();
    for &b in &p.gamma_b {
        product.push(gamma_imag_abs_weierstrass(b, p.product_terms)?);
        exact.push(gamma_imag_abs(b)?);
    }
    let rel: Vec<f64> = product.iter().zip(&exact).map(|(a, e)| (a - e).abs() / e).collect();
    ctx.table(
        Table::new("gamma", "|Γ(ib)| from the Weierstrass product against (π/(b sinh πb))^{1/2}")
            .number("b", "1", "imaginary part of the argument", p.gamma_b.clone())
            .number("product", "1", "truncated product with tail correction", product)
            .number("closed-form", "1", "(π/(b sinh πb))^{1/2}", exact)
            .number("rel-error", "1", "relative difference", rel.clone()),
    );
    ctx.check(Assertion::at_most(
        "gamma:max-rel-error",
        "Weierstrass product matches the closed form",
        p.gamma_rel_tol,
        max_of(rel),
    ));

    let mut rows = Vec::new();
    for &t in &p.pv_t {
        for &b in &p.pv_b {
            let r = oscillatory_quadrature(&IntegralSpec::new(t, b, Range::FullLinePv), p.quadrature_tol)?;
            let e = pv_integral_closed_form(t, b);
            rows.push((t, b, r, e));
        }
    }
    let err: Vec<f64> = rows.iter().map(|(_, _, r, e)| (r.value - e).norm()).collect();
    let unconverged = rows.iter().filter(|(_, _, r, _)| !r.converged).count();
    ctx.table(
        Table::new("principal-value", "full-line P.V. ∫ e^{-itρ} ρ^{-1+ib} dρ by quadrature against its closed form")
            .number("t", "1", "oscillation parameter", rows.iter().map(|r| r.0))
            .number("b", "1", "imaginary order", rows.iter().map(|r| r.1))
            .number("re", "1", "quadrature, real part", rows.iter().map(|r| r.2.value.re))
            .number("im", "1", "quadrature, imaginary part", rows.iter().map(|r| r.2.value.im))
            .number("exact-re", "1", "closed form, real part", rows.iter().map(|r| r.3.re))
            .number("exact-im", "1", "closed form, imaginary part", rows.iter().map(|r| r.3.im))
            .number("abs-error", "1", "|quadrature − closed form|", err.clone())
            .number("error-estimate", "1", "quadrature's own error estimate", rows.iter().map(|r| r.2.abs_error_estimate))
            .number("evaluations", "count", "integrand evaluations", rows.iter().map(|r| r.2.evaluations as f64)),
    );
    ctx.check(Assertion::at_most(
        "principal-value:max-abs-error",
        "quadrature matches the four-case closed form",
        p.pv_abs_tol,
        max_of(err),
    ));
    ctx.check(Assertion::at_most(
        "principal-value:unconverged",
        "every quadrature converged",
        0.0,
        unconverged as f64,
    ));

    let mut unit = Vec::new();
    for &b in &p.unit_b {
        for which in UnitRange::ALL {
            let r = oscillatory_quadrature(&which.spec(b), p.unit_abs_tol / 10.0)?;
            let e = finite_closed_forms(b, which)?;
            unit.push((b, which, r.value, e));
        }
    }
    let uerr: Vec<f64> = unit.iter().map(|u| (u.2 - u.3).norm()).collect();
    ctx.table(
        Table::new("unit-ranges", "Abel-regularized ∫ ρ^{-1+ib} over unit ranges against ±i/b and ±ie^{-πb}/b")
            .number("b", "1", "imaginary order", unit.iter().map(|u| u.0))
            .text("range", "integration range", unit.iter().map(|u| range_label(u.1)))
            .number("re", "1", "quadrature, real part", unit.iter().map(|u| u.2.re))
            .number("im", "1", "quadrature, imaginary part", unit.iter().map(|u| u.2.im))
            .number("exact-im", "1", "closed form, imaginary part", unit.iter().map(|u| u.3.im))
            .number("abs-error", "1", "|quadrature − closed form|", uerr.clone()),
    );
    ctx.check(Assertion::at_most(
        "unit-ranges:max-abs-error",
        "unit-range integrals match their closed forms",
        p.unit_abs_tol,
        max_of(uerr),
    ));

    let dirichlet = sine_integral(f64::INFINITY);
    ctx.table(
        Table::new("dirichlet", "∫_0^∞ sin x / x dx")
            .number("value", "1", "computed", [dirichlet])
            .number("exact", "1", "π/2", [PI / 2.0]),
    );
    ctx.check(Assertion::within(
        "dirichlet:value",
        "∫_0^∞ sin x / x dx = π/2",
        PI / 2.0,
        dirichlet,
        p.sine_abs_tol,
    ));
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
pub struct SweepParams {
    pub kinds: Vec<BoundKind>,
    pub grid: SweepGrid,
    /// Grid for the weighted segment sweep.
    pub segment_grid: SweepGrid,
    /// Relative tolerance against pinned maxima of the unnamed-constant sweeps.
    pub pin_tolerance: f64,
    /// Also emit every grid point.
    pub detail: bool,
}

impl Default for SweepParams {
    fn default() -> Self {
        Self {
            kinds: BoundKind::ALL.to_vec(),
            grid: SweepGrid::default(),
            segment_grid: SweepGrid::segment_default(),
            pin_tolerance: 0.05,
            detail: false,
        }
    }
}

fn params_label(params: &[(String, f64)]) -> String {
    params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
}

pub fn sweeps(ctx: &mut Context, table: &toml::Table) -> Result<(), HarnessError> {
    let p: SweepParams = ctx.params(table)?;
    let mut reports = Vec::new();
    for &kind in &p.kinds {
        let grid = if kind == BoundKind::WeightedSegment { &p.segment_grid } else { &p.grid };
        reports.push(bound_sweep(kind, grid)?);
    }
    ctx.table(
        Table::new("summary", "largest |integral| / envelope per inequality")
            .text("kind", "inequality", reports.iter().map(|r| r.kind.name().to_string()))
            .text("constant", "explicit or unnamed", reports.iter().map(|r| (if r.explicit { "explicit" } else { "unnamed" }).to_string()))
            .number("points", "count", "grid points evaluated", reports.iter().map(|r| r.points as f64))
            .number("max-ratio", "1", "sup of lhs / rhs", reports.iter().map(|r| r.max_ratio))
            .text("argmax", "parameters of the maximum", reports.iter().map(|r| params_label(&r.argmax)))
            .number("flagged", "count", "points whose quadrature did not converge", reports.iter().map(|r| r.flagged as f64))
            .number("violations", "count", "points with ratio > 1 (explicit kinds)", reports.iter().map(|r| r.violations as f64)),
    );
    if p.detail {
        for r in &reports {
            ctx.table(
                Table::new(&format!("points-{}", r.kind.name()), "every grid point")
                    .text("params", "parameters", r.rows.iter().map(|x| params_label(&x.params)))
                    .number("lhs", "1", "integral modulus or its excess", r.rows.iter().map(|x| x.lhs))
                    .number("rhs", "1", "envelope", r.rows.iter().map(|x| x.rhs))
                    .number("ratio", "1", "lhs / rhs", r.rows.iter().map(|x| x.ratio)),
            );
        }
    }
    for r in &reports {
        let name = r.kind.name();
        ctx.check(Assertion::at_most(
            &format!("{name}:flagged"),
            "every quadrature converged",
            0.0,
            r.flagged as f64,
        ));
        if r.explicit {
            ctx.check(Assertion::at_most(
                &format!("{name}:violations"),
                "the bound holds with its explicit constant",
                0.0,
                r.violations as f64,
            ));
        } else {
            ctx.check(Assertion::flag(
                &format!("{name}:finite"),
                "the sup ratio is finite",
                r.max_ratio.is_finite(),
            ));
            ctx.pin_relative(name, r.max_ratio, p.pin_tolerance);
        }
    }
    Ok(())
}
