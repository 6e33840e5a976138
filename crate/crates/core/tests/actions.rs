use extrema_core::actions::*;
use extrema_core::kernels::{make_gaussian, make_random_wave};
use extrema_core::Error;

#[test]
fn oracle_is_rotation_invariant() {
    let g = make_gaussian();
    for r in [0.7, 1.5, 3.0] {
        let (s, c) = (30f64).to_radians().sin_cos();
        let along_x = scalar_curvature_fd(&g, [r, 0.0], [0.0, 0.0], 1e-3).unwrap();
        let tilted = scalar_curvature_fd(&g, [0.3 + r * c, -1.0 + r * s], [0.3, -1.0], 1e-3).unwrap();
        assert!((along_x - tilted).abs() < 1e-6, "r = {r}: {along_x} vs {tilted}");
    }
}

#[test]
fn plain_oracle_error_is_second_order() {
    for kernel in [make_gaussian(), make_random_wave(2.0).unwrap()] {
        for r in [0.5, 1.0] {
            let exact = scalar_curvature_closed(&kernel, r).unwrap();
            let e1 = (scalar_curvature_fd_plain(&kernel, [r, 0.0], [0.0, 0.0], 2e-3).unwrap() - exact).abs();
            let e2 = (scalar_curvature_fd_plain(&kernel, [r, 0.0], [0.0, 0.0], 1e-3).unwrap() - exact).abs();
            let ratio = e1 / e2;
            assert!((3.5..4.5).contains(&ratio), "ratio {ratio} at r = {r}");
        }
    }
}

#[test]
fn oracle_rejects_tiny_separation() {
    let g = make_gaussian();
    assert!(matches!(scalar_curvature_fd(&g, [0.002, 0.0], [0.0, 0.0], 1e-3), Err(Error::InvalidParameter(_))));
}

#[test]
fn curvature_vanishes_far_apart() {
    let g = make_gaussian();
    assert!(scalar_curvature_fd(&g, [25.0, 0.0], [0.0, 0.0], 1e-3).unwrap().abs() < 1e-10);
}

#[test]
fn reduced_integrands_vanish_linearly_at_origin() {
    // Gaussian kernel, b = 3: D/sqrt(D1 D2) -> 2/sqrt3 and Z1' + Z2' ~ 4 b r / 3.
    let g = make_gaussian();
    let s3 = 3f64.sqrt();
    for r in [1e-3, 1e-4] {
        let h = einstein_integrand(&g, r).unwrap() / r;
        assert!((h + 8.0 / s3).abs() < 1e-4, "{h}");
        let l = lagrangian_integrand(&g, r).unwrap() / r;
        assert!((l + 2.0 * s3).abs() < 1e-4, "{l}");
    }
    assert!(einstein_integrand(&g, 10.0).unwrap().abs() < 1e-15);
}

#[test]
fn einstein_routes_differ_by_the_boundary_term() {
    let g = make_gaussian();
    let reduced = einstein_action(&g, 0.0, 12.0).unwrap();
    let direct = einstein_action_from_curvature(&g, 0.0, 12.0).unwrap();
    let boundary = einstein_boundary_term(&g, 0.0, 12.0).unwrap();
    assert!((direct.value - reduced.value - boundary).abs() < 1e-5);
    // 8/sqrt3 from the origin minus 2 at infinity.
    assert!((boundary - (8.0 / 3f64.sqrt() - 2.0)).abs() < 1e-10);
    assert!(reduced.value.is_finite() && lagrangian(&g, 0.0, 12.0).unwrap().value.is_finite());
}

#[test]
fn variational_identity_random_wave() {
    let k = make_random_wave(2.0).unwrap();
    let rep = variational_check(&k, 3.0, 1.0, 1e-4).unwrap();
    assert!(rep.residual < 1e-4, "{rep:?}");
}

#[test]
fn legendre_gap_is_stable() {
    let g = make_gaussian();
    let base = legendre_check(&g, 12.0).unwrap();
    let loose = legendre_check_with(&g, 12.0, 10.0).unwrap();
    assert!((base.gap - loose.gap).abs() < 1e-8);
    // The gap is the boundary contribution 4/sqrt3.
    assert!((base.gap - 4.0 / 3f64.sqrt()).abs() < 1e-8);

    let rw = legendre_check(&make_random_wave(2.0).unwrap(), 60.0).unwrap();
    assert!(rw.lhs.is_finite() && rw.rhs.is_finite());
}

#[test]
fn independent_components_agree() {
    let g = make_gaussian();
    for i in 0..10 {
        let r = 0.5 + 0.5 * i as f64;
        let (a, b) = independent_component_correlation(1.0, &g, r).unwrap();
        assert!((a - b).abs() < 1e-7, "r = {r}: {a} vs {b}");
    }
    let (small, _) = independent_component_correlation(1.0, &g, 0.3).unwrap();
    assert!(small < 0.0);
    let (far, far_generic) = independent_component_correlation(1.0, &g, 30.0).unwrap();
    assert!(far.abs() < 1e-12 && far_generic.abs() < 1e-12);
    assert!(matches!(independent_component_correlation(0.5, &g, 0.1), Err(Error::Domain { .. })));
}
