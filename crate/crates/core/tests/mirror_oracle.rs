//! Exact rational Taylor coefficients of 2 J0 compared with the floating-point
//! pipeline, plus the closed-form random-wave potential written out in Bessel
//! functions.

use extrema_core::kernels::{make_random_wave, taylor_coefficients};
use extrema_core::specfun::bessel_j;
use extrema_core::twopoint::{psi_closed, TwoPoint};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// The 2m-th derivative of 2 J0 at the origin: 2 (-1)^m (2m)! / (4^m (m!)^2).
fn even_derivative(m: u32) -> BigRational {
    let num = BigInt::from(2) * factorial(2 * m);
    let den = BigInt::from(4).pow(m) * factorial(m) * factorial(m);
    let v = BigRational::new(num, den);
    if m % 2 == 1 {
        -v
    } else {
        v
    }
}

#[test]
fn taylor_coefficients_match_exact_series() {
    assert_eq!(even_derivative(1), BigRational::from_integer((-1).into()));
    let t = taylor_coefficients(&make_random_wave(2.0).unwrap()).unwrap();
    let exact = [
        even_derivative(2),
        -even_derivative(3),
        even_derivative(4),
        -even_derivative(5),
    ];
    assert_eq!(exact[0], BigRational::new(3.into(), 4.into()));
    assert_eq!(exact[1], BigRational::new(5.into(), 8.into()));
    for (got, want) in [t.b, t.c, t.d, t.e].iter().zip(&exact) {
        let w = want.to_f64().unwrap();
        assert!((got - w).abs() < 1e-14 * w.abs(), "{got} vs {w}");
    }
    // -2 (c - b^2) / (3 sqrt3) = -1/(24 sqrt3) requires c - b^2 = 1/16.
    let gap = &exact[1] - &exact[0] * &exact[0];
    assert_eq!(gap.abs(), BigRational::new(1.into(), 16.into()));
}

fn bessel_form_psi(r: f64) -> f64 {
    let j0 = bessel_j(0, r).unwrap().value;
    let j2 = bessel_j(2, r).unwrap().value;
    let dm = 1.0 - (j2 - j0).powi(2);
    let dp = 1.0 - (j2 + j0).powi(2);
    let pre = 2.0 * j2.powi(3) / (dm.sqrt() * dp.sqrt());
    let first = (1.0 + j0 / j2) * (3.0 / j2 + 2.0 * (j2 - j0) / dm);
    let second = 4.0 / (r * r) * (3.0 / j2 + (j2 - j0) / dm + (j2 + j0) / dp);
    pre * (first - second)
}

#[test]
fn random_wave_potential_matches_bessel_form() {
    let k = make_random_wave(2.0).unwrap();
    for r in [0.8, 1.5, 2.0, 3.4, 5.0, 7.5, 9.0] {
        let ours = psi_closed(&k, r).unwrap();
        let theirs = bessel_form_psi(r);
        assert!((ours - theirs).abs() < 1e-10 * theirs.abs().max(1e-3), "r = {r}: {ours} vs {theirs}");
    }
}

#[test]
fn small_r_series_through_sixth_order() {
    let tp = TwoPoint::new(make_random_wave(2.0).unwrap()).unwrap().with_r_switch(0.0);
    let s3 = 3f64.sqrt();
    for r in [0.2f64, 0.3] {
        let series = (1.0 - r.powi(2) / 48.0 - r.powi(4) / 2304.0 - 139.0 * r.powi(6) / 29_859_840.0) / s3;
        let got = tp.psi(r).unwrap();
        assert!((got - series).abs() < 1e-9 * r.powi(8) / r.powi(8).min(1.0), "r = {r}: {got} vs {series}");
        let c_series = -(1.0 + r * r / 24.0 + 139.0 * r.powi(4) / 207_360.0) / (24.0 * s3);
        assert!((tp.correlation_4pi2(r).unwrap() - c_series).abs() < 1e-6);
    }
}
