use extrema_core::mcfield::*;
use extrema_core::specfun::bessel_j;
use extrema_core::Error;

fn small_spec(n: usize, seed: u64, half: bool) -> WaveEnsembleSpec {
    WaveEnsembleSpec {
        domain: Rect::new(0.0, 14.0, 0.0, 14.0).unwrap(),
        grid: (71, 71),
        ..WaveEnsembleSpec::standard(n, seed, half)
    }
}

fn j0(r: f64) -> f64 {
    bessel_j(0, r).unwrap().value
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let spec = small_spec(6, 11, false);
    let one = Ensemble::simulate_with_workers(&spec, 1).unwrap();
    let three = Ensemble::simulate_with_workers(&spec, 3).unwrap();
    assert_eq!(one.diagnostics, three.diagnostics);
    assert_eq!(one.extrema.len(), 6);
    for (a, b) in one.extrema.iter().zip(&three.extrema) {
        assert_eq!(a.len(), b.len());
        for (p, q) in a.iter().zip(b) {
            assert_eq!(p.position[0].to_bits(), q.position[0].to_bits());
            assert_eq!(p.position[1].to_bits(), q.position[1].to_bits());
            assert_eq!(p.charge, q.charge);
        }
    }
    let edges: Vec<f64> = (0..=6).map(|i| 0.5 * i as f64).collect();
    let w1 = WorkerPool::new(1).unwrap().install(|| estimate_kernel(&spec, &edges, 0.0)).unwrap();
    let w3 = WorkerPool::new(3).unwrap().install(|| estimate_kernel(&spec, &edges, 0.0)).unwrap();
    assert_eq!(w1, w3);
}

#[test]
fn same_seed_same_ensemble() {
    let spec = small_spec(3, 5, true);
    let a = Ensemble::simulate(&spec).unwrap();
    let b = Ensemble::simulate(&spec).unwrap();
    assert_eq!(a.extrema, b.extrema);
    let c = Ensemble::simulate(&small_spec(3, 6, true)).unwrap();
    assert_ne!(a.extrema, c.extrema);
}

#[test]
fn bulk_covariance_is_j0() {
    let spec = small_spec(300, 3, false);
    let radii = [0.0, 1.0, 2.4, 3.8, 5.0];
    let out = estimate_kernel(&spec, &radii, 0.0).unwrap();
    for (i, r) in radii.iter().enumerate() {
        let z = (out.means[i] - j0(*r)) / out.standard_errors[i];
        assert!(z.abs() < 4.0, "r = {r}: mean {} se {}", out.means[i], out.standard_errors[i]);
    }
}

#[test]
fn half_space_covariance_has_image_term() {
    let spec = small_spec(300, 4, true);
    let radii = [0.0, 0.8, 2.0, 3.5];
    let y0 = 1.0;
    let out = estimate_kernel(&spec, &radii, y0).unwrap();
    for (i, r) in radii.iter().enumerate() {
        let expected = j0(*r) - j0((r * r + 4.0 * y0 * y0).sqrt());
        let z = (out.means[i] - expected) / out.standard_errors[i];
        assert!(z.abs() < 4.0, "r = {r}: {} vs {expected}", out.means[i]);
    }
}

#[test]
fn half_space_field_vanishes_on_wall() {
    let spec = small_spec(1, 9, true);
    let field = sample_realization(&spec, 0);
    for x in [0.0, 1.3, 7.7] {
        assert!(field.value([x, 0.0]).abs() < 1e-12);
    }
    let ens = Ensemble::simulate(&spec).unwrap();
    assert!(ens.extrema[0].iter().all(|e| e.position[1] > 0.0));
}

#[test]
fn extrema_charges_match_hessian_sign() {
    let spec = small_spec(2, 21, false);
    let ens = Ensemble::simulate(&spec).unwrap();
    let region = spec.retained_region();
    let mut count = 0;
    for (idx, list) in ens.extrema.iter().enumerate() {
        let field = sample_realization(&spec, idx as u64);
        for e in list {
            assert!(region.contains(e.position));
            let s = field.sample(e.position);
            assert!(s.gradient[0].hypot(s.gradient[1]) < 1e-8);
            assert_eq!(e.charge as f64, e.hessian_det.signum());
            count += 1;
        }
    }
    // roughly n0 * area, with n0 = 1/(2 pi sqrt3) for extrema of both signs
    let expected = 2.0 * region.area() / (2.0 * std::f64::consts::PI * 3f64.sqrt());
    assert!((count as f64) > 0.6 * expected && (count as f64) < 1.4 * expected, "{count} vs {expected}");
}

#[test]
fn geometry_is_validated() {
    let spec = small_spec(2, 1, false);
    let ens = Ensemble::simulate(&spec).unwrap();
    assert!(matches!(ens.pair_correlation(&[0.0, 3.0, 6.0]), Err(Error::Geometry(_))));
    assert!(ens.pair_correlation(&[0.5, 1.0, 1.5]).is_ok());
    assert!(ens.wall_profile(&[0.0, 1.0]).is_err(), "wall profile needs a half-space ensemble");
    assert!(Rect::new(1.0, 0.0, 0.0, 1.0).is_err());
    let coarse = WaveEnsembleSpec { grid: (33, 33), ..WaveEnsembleSpec::standard(1, 0, false) };
    assert!(coarse.validate().is_err());
    let few_waves = WaveEnsembleSpec { n_waves: 10, ..small_spec(1, 0, false) };
    assert!(few_waves.validate().is_err());
}
