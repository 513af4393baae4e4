use super::{kernel_value, GeometryKind, PropagatorSpec, Symbol};
use crate::error::{Error, Result};
use crate::par;
use crate::quadrature::{fit_slope, lin_space, log_space};
use serde::{Deserialize, Serialize};

/// Least-squares slope of `log sup_x |K(t, x)|` against `log t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub exponent: f64,
    pub exponent_stderr: f64,
    pub time_window: (f64, f64),
    pub samples: usize,
    /// `(t, sup_x |K|)` for every surviving sample.
    pub points: Vec<(f64, f64)>,
    /// Times whose kernel evaluation failed.
    pub dropped: Vec<f64>,
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Sample points for `sup_x`: a grid in the scaling variable of each regime,
/// `x = √t·y` for small times and `x = t + t^{1/3}·y` around the caustic.
fn boussinesq_grid(t: f64) -> Vec<f64> {
    let mut xs = Vec::new();
    if t <= 1.0 {
        xs.extend(lin_space(-6.0, 10.0, 33).into_iter().map(|y| t.sqrt() * y));
    }
    if t >= 0.1 {
        let s = t.cbrt();
        xs.extend(lin_space(-4.0, 8.0, 33).into_iter().map(|y| t + s * y));
    }
    let reach = 4.0 * t.max(1.0);
    xs.extend(lin_space(-reach, reach, 17));
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// `sup_x |K(t, x)|`, refined by a golden-section search around the best
/// grid point.
pub fn sup_kernel(spec: &PropagatorSpec, t: f64) -> Result<f64> {
    spec.validate()?;
    if spec.geometry != GeometryKind::Euclidean {
        return Err(Error::Unsupported("decay fits use the continuous kernels".into()));
    }
    match spec.symbol {
        Symbol::Boussinesq => {
            let xs = boussinesq_grid(t);
            let mut vals = Vec::with_capacity(xs.len());
            for &x in &xs {
                vals.push(kernel_value(spec, t, &[x])?.norm());
            }
            let (i, _) = vals
                .iter()
                .enumerate()
                .fold((0, f64::MIN), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
            let lo = xs[i.saturating_sub(1)];
            let hi = xs[(i + 1).min(xs.len() - 1)];
            let failed = std::cell::Cell::new(None);
            let (_, best) = golden_max(
                |x| match kernel_value(spec, t, &[x]) {
                    Ok(v) => v.norm(),
                    Err(e) => {
                        failed.set(Some(e));
                        0.0
                    }
                },
                lo,
                hi,
                24,
            );
            if let Some(e) = failed.take() {
                return Err(e);
            }
            Ok(best.max(vals[i]))
        }
        _ => {
            // the modulus is constant in x; sample a few points anyway
            let reach = 4.0 * (2.0 * t.abs()).max(1.0);
            let mut best = 0.0f64;
            for x in lin_space(-reach, reach, 9) {
                let point = vec![x; spec.dim];
                best = best.max(kernel_value(spec, t, &point)?.norm());
            }
            Ok(best)
        }
    }
}

/// Fit the decay exponent of `sup_x |K(t, ·)|` over `samples` log-spaced times.
pub fn decay_fit(spec: &PropagatorSpec, window: (f64, f64), samples: usize) -> Result<DecayFit> {
    let (t_min, t_max) = window;
    if samples < 8 {
        return Err(Error::Precondition(format!("need at least 8 samples, got {samples}")));
    }
    if !(t_min > 0.0 && t_min < t_max) {
        return Err(Error::Precondition(format!("bad window ({t_min}, {t_max})")));
    }
    if spec.symbol == Symbol::Boussinesq && t_min < 1.0 && t_max > 1.0 {
        return Err(Error::Precondition(
            "Boussinesq window must lie entirely in t <= 1 or in t >= 1".into(),
        ));
    }
    let times = log_space(t_min, t_max, samples);
    let sups = par::map_slice(&times, |&t| sup_kernel(spec, t));
    let mut points = Vec::new();
    let mut dropped = Vec::new();
    for (t, s) in times.iter().zip(sups) {
        match s {
            Ok(v) if v > 0.0 && v.is_finite() => points.push((*t, v)),
            _ => dropped.push(*t),
        }
    }
    if points.len() < 8 {
        return Err(Error::Fit(format!(
            "only {} of {samples} samples survived",
            points.len()
        )));
    }
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (slope, stderr, _) = fit_slope(&lx, &ly);
    Ok(DecayFit {
        exponent: slope,
        exponent_stderr: stderr,
        time_window: window,
        samples: points.len(),
        points,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elliptic_slopes_are_exact() {
        for d in [1, 2, 3] {
            let f = decay_fit(&PropagatorSpec::elliptic(d), (1e-3, 1.0), 8).unwrap();
            assert!((f.exponent + d as f64 / 2.0).abs() < 1e-10, "d={d}: {}", f.exponent);
        }
    }

    #[test]
    fn preconditions() {
        let s = PropagatorSpec::boussinesq();
        assert!(decay_fit(&s, (1e-3, 1.0), 7).is_err());
        assert!(decay_fit(&s, (1.0, 0.5), 8).is_err());
        assert!(decay_fit(&s, (0.1, 10.0), 8).is_err());
    }

    #[test]
    fn golden_section_finds_peak() {
        let (x, v) = golden_max(|x| -(x - 0.3f64).powi(2), -1.0, 2.0, 60);
        assert!((x - 0.3).abs() < 1e-6 && v.abs() < 1e-10);
    }
}
