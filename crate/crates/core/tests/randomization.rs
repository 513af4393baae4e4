use num_complex::Complex64;
use std::f64::consts::PI;
use strichartz_core::dispersive_kernels::{PropagatorSpec, Symbol};
use strichartz_core::grid::{Grid, PeriodicGrid, Propagator, RadialGrid};
use strichartz_core::randomization::{
    wiener_psi, Distribution, Level, RandomizationEnsemble, RandomizedOperator, Randomizer,
};

fn box_randomizer() -> Randomizer {
    let g = PeriodicGrid::centered(1, 128, 16.0);
    Randomizer::new(Propagator::new(PropagatorSpec::elliptic(1), Grid::Periodic(g)).unwrap()).unwrap()
}

fn gaussian_bump(n: usize, length: f64) -> Vec<Complex64> {
    let g = PeriodicGrid::centered(1, n, length);
    (0..g.len())
        .map(|i| {
            let x = g.point(i)[0];
            Complex64::new((-x * x).exp(), 0.0) * Complex64::from_polar(1.0, 2.0 * x)
        })
        .collect()
}

#[test]
fn wiener_cells_partition_unity() {
    for i in 0..200 {
        let xi = -7.3 + 0.0731 * i as f64;
        let s: f64 = (-12..=12).map(|k| wiener_psi(xi - k as f64)).sum();
        assert!((s - 1.0).abs() < 1e-12, "ξ = {xi}: {s}");
    }
    let r = box_randomizer();
    let len = r.propagator().grid().len();
    assert!((0..len).all(|slot| (r.deterministic_multiplier(slot) - 1.0).abs() < 1e-12));
}

#[test]
fn wiener_second_moment_by_monte_carlo() {
    let r = box_randomizer();
    let f = gaussian_bump(128, 16.0);
    let expected = r.second_moment(&f);
    let grid = *r.propagator().grid();
    let ens = RandomizationEnsemble::new(Distribution::Rademacher, 4000, 11).unwrap();
    let samples: Vec<f64> = (0..ens.samples)
        .map(|s| {
            let draws = r.draw_cells(ens.distribution, &mut ens.stream(s, Level::Cell));
            grid.norm(&r.randomize_function(&f, &draws).unwrap()).powi(2)
        })
        .collect();
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    assert!((mean - expected).abs() <= 4.0 * se, "mean {mean} vs {expected} (se {se})");
    // Randomization can only spread mass: the second moment never exceeds ‖f‖².
    assert!(expected <= grid.norm(&f).powi(2) * (1.0 + 1e-12));
}

#[test]
fn ball_cells_are_damped() {
    let prop = Propagator::new(PropagatorSpec::ball(16), Grid::Radial(RadialGrid { n: 24 })).unwrap();
    let r = Randomizer::new(prop).unwrap();
    for m in 1..=24 {
        assert!((r.deterministic_multiplier(m - 1) - 1.0 / (m as f64 * PI)).abs() < 1e-15);
    }
}

#[test]
fn realizations_are_reproducible() {
    let g = PeriodicGrid::torus(1, 32);
    let prop = Propagator::new(PropagatorSpec::torus(Symbol::Elliptic, 1, 8), Grid::Periodic(g)).unwrap();
    let mut c = vec![Complex64::new(0.0, 0.0); 32];
    c[1] = Complex64::new(1.0, 0.0);
    c[3] = Complex64::new(0.0, 1.0);
    let op = RandomizedOperator::new(Randomizer::new(prop).unwrap(), vec![c], vec![0.5]).unwrap();
    let a = RandomizationEnsemble::new(Distribution::StandardGaussian, 10, 99).unwrap();
    let b = RandomizationEnsemble::new(Distribution::StandardGaussian, 10, 99).unwrap();
    let other = RandomizationEnsemble::new(Distribution::StandardGaussian, 10, 100).unwrap();
    assert_eq!(op.realize(&a, 7), op.realize(&b, 7));
    assert_ne!(op.realize(&a, 7), op.realize(&other, 7));
    assert_ne!(op.realize(&a, 7), op.realize(&a, 8));
    let rho0 = op.density(&op.realize(&a, 3), 0.0);
    let rho1 = op.density(&op.realize(&a, 3), 0.25);
    // Mass is conserved by the flow.
    let m0: f64 = rho0.iter().sum();
    let m1: f64 = rho1.iter().sum();
    assert!((m0 - m1).abs() < 1e-10 * m0.abs().max(1.0));
}
