use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;
use strichartz_core::dispersive_kernels::{PropagatorSpec, Symbol};
use strichartz_core::grid::{Grid, PeriodicGrid, Propagator, RadialGrid};
use strichartz_core::randomization::wiener_psi;
use strichartz_core::special_integrals::{
    gamma_imag_abs, gamma_imag_abs_weierstrass, pv_integral_closed_form, pv_integral_modulus, PRODUCT_TERMS,
};
use strichartz_core::spectral_systems::{critical_alpha, lalpha_norm};
use strichartz_core::stats::{kendall_tau, ks_two_sample};

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len).prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gamma_product_agrees(b in 0.05f64..6.0) {
        let exact = gamma_imag_abs(b).unwrap();
        let product = gamma_imag_abs_weierstrass(b, PRODUCT_TERMS).unwrap();
        prop_assert!((product - exact).abs() <= 1e-8 * exact);
        // |Γ(ib)| is even in b.
        prop_assert!((gamma_imag_abs(-b).unwrap() - exact).abs() <= 1e-12 * exact);
    }

    #[test]
    fn pv_modulus_is_the_closed_form_modulus(t in -5.0f64..5.0, b in -4.0f64..4.0) {
        let c = pv_integral_closed_form(t, b);
        prop_assert!((c.norm() - pv_integral_modulus(t, b)).abs() <= 1e-9 * (1.0 + c.norm()));
    }

    #[test]
    fn pv_scales_as_a_pure_phase_in_t(t in 0.1f64..5.0, s in 0.1f64..5.0, b in 0.1f64..3.0) {
        // Substituting ρ → ρ/s multiplies the integral by s^{-ib}.
        let lhs = pv_integral_closed_form(s * t, b);
        let rhs = pv_integral_closed_form(t, b) * Complex64::from_polar(1.0, -b * s.ln());
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + lhs.norm()));
    }

    #[test]
    fn wiener_partition_of_unity(xi in -50.0f64..50.0) {
        let base = xi.floor() as i64;
        let s: f64 = (base - 2..=base + 2).map(|k| wiener_psi(xi - k as f64)).sum();
        prop_assert!((s - 1.0).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&wiener_psi(xi)));
    }

    #[test]
    fn torus_flow_is_unitary(f in complex_vec(32), t in -10.0f64..10.0) {
        let g = Grid::Periodic(PeriodicGrid::torus(1, 32));
        let prop = Propagator::new(PropagatorSpec::torus(Symbol::Elliptic, 1, 15), g).unwrap();
        let projected = prop.evolve(&f, 0.0);
        let n0 = g.norm(&projected);
        prop_assert!((g.norm(&prop.evolve(&f, t)) - n0).abs() <= 1e-10 * (1.0 + n0));
        // Group law: U(t)U(-t) = identity on the band.
        let back = prop.evolve(&prop.evolve(&f, t), -t);
        let err: f64 = back.iter().zip(&projected).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-10);
    }

    #[test]
    fn ball_analysis_inverts_synthesis(c in prop::collection::vec(-1.0f64..1.0, 12)) {
        let prop = Propagator::new(PropagatorSpec::ball(12), Grid::Radial(RadialGrid { n: 12 })).unwrap();
        let coeffs: Vec<Complex64> = c.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let back = prop.analyze(&prop.synthesize(&coeffs));
        for (a, b) in back.iter().zip(&coeffs) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn lalpha_norm_decreases_in_alpha(v in prop::collection::vec(-5.0f64..5.0, 1..20), a in 1.0f64..6.0, da in 0.0f64..4.0) {
        let lo = lalpha_norm(&v, a);
        let hi = lalpha_norm(&v, a + da);
        prop_assert!(hi <= lo * (1.0 + 1e-12) + 1e-300);
        prop_assert!(lalpha_norm(&v, f64::INFINITY) <= hi * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn critical_alpha_bounds(q in 1.0f64..50.0) {
        let a = critical_alpha(q);
        prop_assert!((1.0..2.0).contains(&a));
        prop_assert!((a - 2.0 * q / (q + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn kendall_tau_is_a_correlation(y in prop::collection::vec(-10.0f64..10.0, 2..12)) {
        let x: Vec<f64> = (0..y.len()).map(|i| i as f64).collect();
        let k = kendall_tau(&x, &y);
        prop_assert!((-1.0..=1.0).contains(&k.tau));
        prop_assert!((0.0..=1.0).contains(&k.p_value));
        let rev: Vec<f64> = y.iter().map(|v| -v).collect();
        prop_assert!((kendall_tau(&x, &rev).tau + k.tau).abs() < 1e-12);
    }

    #[test]
    fn ks_statistic_is_symmetric(a in prop::collection::vec(-3.0f64..3.0, 5..60), b in prop::collection::vec(-3.0f64..3.0, 5..60)) {
        let ab = ks_two_sample(&a, &b);
        let ba = ks_two_sample(&b, &a);
        prop_assert!((ab.statistic - ba.statistic).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&ab.statistic));
        prop_assert_eq!(ks_two_sample(&a, &a).statistic, 0.0);
    }
}

#[test]
fn torus_basis_is_orthonormal() {
    let g = Grid::Periodic(PeriodicGrid::torus(1, 16));
    let prop = Propagator::new(PropagatorSpec::torus(Symbol::Elliptic, 1, 7), g).unwrap();
    for i in 0..16 {
        for j in 0..16 {
            let ip = g.inner(&prop.basis_function(i), &prop.basis_function(j));
            let d = if i == j { 1.0 } else { 0.0 };
            assert!((ip - d).norm() < 1e-12, "{i} {j} {ip}");
        }
    }
    assert!((g.measure() - 2.0 * PI).abs() < 1e-12);
}
