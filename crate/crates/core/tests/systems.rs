use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use strichartz_core::dispersive_kernels::{PropagatorSpec, Symbol};
use strichartz_core::grid::{Grid, PeriodicGrid, Propagator, TimeGrid};
use strichartz_core::spectral_systems::{
    optimality_experiment, schatten_bound_check, strichartz_ratio, MixedNormSpec, OrthonormalSystem, SchattenExponents,
    SpaceTimeField,
};
use strichartz_core::Error;

fn torus(n: usize, cutoff: usize) -> Propagator {
    Propagator::new(PropagatorSpec::torus(Symbol::Elliptic, 1, cutoff), Grid::Periodic(PeriodicGrid::torus(1, n))).unwrap()
}

#[test]
fn random_systems_are_orthonormal_and_ratios_scale_free() {
    let prop = torus(64, 12);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let system = OrthonormalSystem::random(&prop, 6, &mut rng).unwrap();
    assert!(system.gram_error() < 1e-12);
    let norm = MixedNormSpec::new(10.0, 1.25, TimeGrid::midpoint(0.0, 0.1, 32));
    let a = strichartz_ratio(&system, &prop, &norm, None).unwrap();
    let mut scaled = system.clone();
    scaled.weights.iter_mut().for_each(|w| *w *= 3.5);
    let b = strichartz_ratio(&scaled, &prop, &norm, None).unwrap();
    assert!((a.ratio - b.ratio).abs() < 1e-12 * a.ratio);
    assert!((b.density_norm / a.density_norm - 3.5).abs() < 1e-12);
}

#[test]
fn non_orthonormal_input_is_rejected() {
    let g = Grid::Periodic(PeriodicGrid::torus(1, 8));
    let f = vec![Complex64::new(1.0, 0.0); 8];
    let err = OrthonormalSystem::new(vec![f.clone(), f], vec![1.0, 1.0], g).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)));
}

#[test]
fn optimality_slopes_in_one_dimension() {
    let crit = optimality_experiment(1, (4.0, 2.0), 4.0 / 3.0, &[4, 8, 16, 32], 16).unwrap();
    assert!((crit.lhs_slope - 1.0).abs() <= 0.1, "{}", crit.lhs_slope);
    assert!(crit.ratio_slope <= 0.05, "{}", crit.ratio_slope);
    let above = optimality_experiment(1, (4.0, 2.0), 2.0, &[4, 8, 16, 32], 16).unwrap();
    assert!((above.ratio_slope - 0.25).abs() <= 0.05, "{}", above.ratio_slope);
    assert!(optimality_experiment(1, (4.0, 2.0), 2.0, &[8, 4, 16, 32], 16).is_err());
}

#[test]
fn schatten_check_is_homogeneous_in_the_weights() {
    let g = PeriodicGrid::centered(1, 32, 16.0);
    let prop = Propagator::new(PropagatorSpec::elliptic(1), Grid::Periodic(g)).unwrap();
    let times = TimeGrid::composite_gauss(&[0.0, 0.5, 1.0], 8);
    let w = SpaceTimeField::from_fn(&times, prop.grid(), |t, x| Complex64::new((-0.5 * x[0] * x[0] - t * t).exp(), 0.0));
    let ex = SchattenExponents::on_line(strichartz_core::spectral_systems::density_line(prop.spec(), &times).unwrap(), 1.4)
        .unwrap();
    let a = schatten_bound_check(&w, &w, &prop, &times, ex).unwrap();
    let b = schatten_bound_check(&w.scaled(2.0), &w, &prop, &times, ex).unwrap();
    assert!(a.ratio.is_finite() && a.ratio > 0.0);
    assert!((a.ratio - b.ratio).abs() < 1e-9 * a.ratio);
    assert!((b.schatten / a.schatten - 2.0).abs() < 1e-9);
}
