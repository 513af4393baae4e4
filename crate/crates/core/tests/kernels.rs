use strichartz_core::dispersive_kernels::{decay_fit, kernel_value, sup_kernel, PropagatorSpec};

#[test]
fn schrodinger_kernel_modulus_is_explicit() {
    for d in 1..=3 {
        let spec = PropagatorSpec::elliptic(d);
        for t in [-2.0, 0.3, 1.7] {
            let x = vec![0.4; d];
            let k = kernel_value(&spec, t, &x).unwrap().norm();
            // (2π)^{-d/2} ∫ e^{-itξ²} dξ has modulus (2|t|)^{-d/2}.
            let exact = (2.0 * f64::abs(t)).powf(-(d as f64) / 2.0);
            assert!((k - exact).abs() < 1e-10 * exact, "d = {d}, t = {t}: {k} vs {exact}");
        }
    }
}

#[test]
fn non_elliptic_modulus_matches_elliptic() {
    let e = PropagatorSpec::elliptic(2);
    let h = PropagatorSpec::non_elliptic(2, 1);
    for (t, x) in [(0.5, [1.0, 2.0]), (-1.2, [0.0, -3.0])] {
        let a = kernel_value(&e, t, &x).unwrap().norm();
        let b = kernel_value(&h, t, &x).unwrap().norm();
        assert!((a - b).abs() < 1e-10 * a);
    }
}

#[test]
fn boussinesq_decay_regimes() {
    let spec = PropagatorSpec::boussinesq();
    let small = decay_fit(&spec, (1e-3, 1e-1), 8).unwrap();
    assert!((small.exponent + 0.5).abs() <= 0.05, "{}", small.exponent);
    let large = decay_fit(&spec, (10.0, 1e3), 8).unwrap();
    assert!((large.exponent + 1.0 / 3.0).abs() <= 0.05, "{}", large.exponent);
    assert!(sup_kernel(&spec, 1.0).unwrap() > sup_kernel(&spec, 100.0).unwrap());
}
