//! Bessel functions J_n and modified Bessel functions K_n of small integer order.
//!
//! J uses the power series for x <= 6, Miller's backward recurrence normalized
//! by J_0 + 2 sum J_2k = 1 on (6, 25), and the Hankel asymptotic expansion beyond.
//! K uses the logarithmic power series for x <= 2 and Steed's continued fraction
//! (Temme's CF2) above, which carries the e^-x factor explicitly.
//! Orders 3 and 4 are available inside the crate for kernel derivatives.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

const EPS: f64 = f64::EPSILON;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_4;

const J_SERIES_MAX: f64 = 6.0;
const J_ASYMPTOTIC_MIN: f64 = 25.0;
const K_SERIES_MAX: f64 = 2.0;

/// A function value together with an upper bound on its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub value: f64,
    pub abs_error_bound: f64,
}

/// Bessel function of the first kind J_order(x), order in {0, 1, 2}, x >= 0.
pub fn bessel_j(order: u32, x: f64) -> Result<EvalResult> {
    if order > 2 {
        return Err(Error::domain("bessel_j", format!("order {order} not in {{0, 1, 2}}")));
    }
    if !x.is_finite() || x < 0.0 {
        return Err(Error::domain("bessel_j", format!("x = {x}")));
    }
    let (values, bounds) = j_with_bounds(x);
    let n = order as usize;
    Ok(EvalResult { value: values[n], abs_error_bound: bounds[n] })
}

/// Modified Bessel function of the second kind K_order(x), order in {0, 1, 2}, x > 0.
pub fn bessel_k(order: u32, x: f64) -> Result<EvalResult> {
    if order > 2 {
        return Err(Error::domain("bessel_k", format!("order {order} not in {{0, 1, 2}}")));
    }
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::domain("bessel_k", format!("x = {x} (K diverges at 0)")));
    }
    let (values, bounds) = k_with_bounds(x);
    let n = order as usize;
    Ok(EvalResult { value: values[n], abs_error_bound: bounds[n] })
}

/// J_0(x) .. J_4(x) for finite x >= 0.
pub(crate) fn j_all(x: f64) -> [f64; 5] {
    j_with_bounds(x).0
}

/// K_0(x) .. K_4(x) for finite x > 0.
pub(crate) fn k_all(x: f64) -> [f64; 5] {
    let (k, _) = k_with_bounds(x);
    let mut out = [k[0], k[1], k[2], 0.0, 0.0];
    out[3] = out[1] + 4.0 * out[2] / x;
    out[4] = out[2] + 6.0 * out[3] / x;
    out
}

/// J_n(x) / x^p for p <= n, continuous at x = 0.
pub(crate) fn j_over_power(n: u32, p: u32, x: f64) -> f64 {
    debug_assert!(p <= n && n <= 4);
    if x < 1.0 {
        j_series_scaled(n, p, x, 0).0
    } else {
        j_all(x)[n as usize] / x.powi(p as i32)
    }
}

/// 1 - J_0(x) + J_2(x) without cancellation at small x.
pub(crate) fn one_minus_j0_plus_j2(x: f64) -> f64 {
    if x < 1.0 {
        -j_series_scaled(0, 0, x, 1).0 + j_series_scaled(2, 0, x, 0).0
    } else {
        let j = j_all(x);
        1.0 - j[0] + j[2]
    }
}

/// 1/2 - J_1(x)/x without cancellation at small x.
pub(crate) fn half_minus_j1_over_x(x: f64) -> f64 {
    if x < 1.0 {
        -j_series_scaled(1, 1, x, 1).0
    } else {
        0.5 - j_all(x)[1] / x
    }
}

fn j_with_bounds(x: f64) -> ([f64; 5], [f64; 5]) {
    let mut values = [0.0; 5];
    let mut bounds = [0.0; 5];
    if x <= J_SERIES_MAX {
        for n in 0..5u32 {
            let (v, b) = j_series_scaled(n, 0, x, 0);
            values[n as usize] = v;
            bounds[n as usize] = b;
        }
    } else if x < J_ASYMPTOTIC_MIN {
        let (v, start) = j_miller(x);
        values = v;
        // Backward recurrence is neutrally stable below the turning point; rounding
        // accumulates at most linearly in the number of steps.
        let b = 4.0 * EPS * start as f64;
        bounds = [b; 5];
    } else {
        for n in 0..5u32 {
            let (v, b) = j_hankel(n, x);
            values[n as usize] = v;
            bounds[n as usize] = b;
        }
    }
    (values, bounds)
}

/// Sum over m >= skip of (-1)^m (x/2)^(2m+n) / (m! (m+n)!), divided by x^p.
/// Returns the sum and a bound on truncation plus accumulated rounding.
fn j_series_scaled(n: u32, p: u32, x: f64, skip: u32) -> (f64, f64) {
    let half = 0.5 * x;
    let q = half * half;
    let mut nfact = 1.0;
    for k in 1..=n {
        nfact *= k as f64;
    }
    // x^(n-p) / (2^n n!)
    let mut term = x.powi((n - p) as i32) / (2f64.powi(n as i32) * nfact);
    let mut sum = 0.0;
    let mut abs_weighted = 0.0;
    let mut m = 0u32;
    loop {
        if m >= skip {
            sum += term;
            abs_weighted += term.abs() * (m as f64 + 2.0);
        }
        let next = -term * q / ((m as f64 + 1.0) * (m as f64 + 1.0 + n as f64));
        m += 1;
        // Once terms decrease monotonically the alternating tail is bounded by the next term.
        let decreasing = (m as f64) * (m as f64 + n as f64) > q;
        if decreasing && next.abs() <= 1e-3 * EPS * sum.abs().max(f64::MIN_POSITIVE) {
            let bound = next.abs() + EPS * abs_weighted;
            return (sum, bound);
        }
        if next == 0.0 {
            return (sum, EPS * abs_weighted);
        }
        term = next;
    }
}

/// J_0..J_4 by Miller's algorithm; also returns the starting order.
fn j_miller(x: f64) -> ([f64; 5], usize) {
    let start = {
        let s = (x + 30.0 + 10.0 * x.cbrt()).ceil() as usize;
        s + (s & 1)
    };
    let mut out = [0.0; 5];
    let mut upper = 0.0; // J_{k+1}
    let mut current = 1e-30; // J_k
    let mut norm = if start % 2 == 0 { 2.0 * current } else { 0.0 };
    for k in (1..=start).rev() {
        let lower = 2.0 * k as f64 / x * current - upper;
        upper = current;
        current = lower;
        let order = k - 1;
        if order <= 4 {
            out[order] = current;
        }
        if order > 0 && order % 2 == 0 {
            norm += 2.0 * current;
        }
        if current.abs() > 1e250 {
            let s = 1e-250;
            current *= s;
            upper *= s;
            norm *= s;
            for v in out.iter_mut() {
                *v *= s;
            }
        }
    }
    norm += current;
    for v in out.iter_mut() {
        *v /= norm;
    }
    (out, start)
}

/// Hankel asymptotic expansion of J_n(x) for large x.
fn j_hankel(n: u32, x: f64) -> (f64, f64) {
    let mu = 4.0 * (n as f64) * (n as f64);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    let mut omitted = 0.0;
    for k in 1..200u32 {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) / (8.0 * k as f64 * x);
        if next.abs() >= term.abs() && k > 1 {
            omitted = next.abs();
            break;
        }
        term = next;
        // k-th term carries sign (-1)^(k/2) in P (even k) or (-1)^((k-1)/2) in Q (odd k).
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if term.abs() < 1e-3 * EPS {
            omitted = term.abs();
            break;
        }
    }
    let phase = (n as f64 * 0.5 + 0.25) * PI;
    let (sx, cx) = x.sin_cos();
    let (sp, cp) = phase.sin_cos();
    let cos_chi = cx * cp + sx * sp;
    let sin_chi = sx * cp - cx * sp;
    let amplitude = (2.0 / (PI * x)).sqrt();
    let value = amplitude * (p * cos_chi - q * sin_chi);
    let bound = amplitude * (omitted + 8.0 * EPS * (p.abs() + q.abs()));
    (value, bound)
}

fn k_with_bounds(x: f64) -> ([f64; 3], [f64; 3]) {
    let (k0, k1, rel) = if x <= K_SERIES_MAX { k01_series(x) } else { k01_continued_fraction(x) };
    let k2 = k0 + 2.0 * k1 / x;
    let b0 = rel * k0.abs();
    let b1 = rel * k1.abs();
    let b2 = b0 + 2.0 * b1 / x + 2.0 * EPS * k2.abs();
    ([k0, k1, k2], [b0, b1, b2])
}

/// K_0 and K_1 from their logarithmic power series, with a relative error bound.
fn k01_series(x: f64) -> (f64, f64, f64) {
    let y = 0.25 * x * x;
    let log_half = (0.5 * x).ln();
    let mut i0 = 0.0;
    let mut s0 = 0.0;
    let mut i1 = 0.0;
    let mut s1 = 0.0;
    let mut t0 = 1.0; // y^k / (k!)^2
    let mut t1 = 1.0; // y^k / (k! (k+1)!)
    let mut harmonic = 0.0; // H_k
    for k in 0..60u32 {
        let kf = k as f64;
        let harmonic_next = harmonic + 1.0 / (kf + 1.0);
        i0 += t0;
        s0 += harmonic * t0;
        i1 += t1;
        // psi(k+1) + psi(k+2) = -2 gamma + H_k + H_{k+1}
        s1 += (harmonic + harmonic_next - 2.0 * EULER_GAMMA) * t1;
        if t0 < 1e-3 * EPS * i0 && k > 1 {
            break;
        }
        t0 *= y / ((kf + 1.0) * (kf + 1.0));
        t1 *= y / ((kf + 1.0) * (kf + 2.0));
        harmonic = harmonic_next;
    }
    let k0 = -(log_half + EULER_GAMMA) * i0 + s0;
    let i1 = 0.5 * x * i1;
    let k1 = 1.0 / x + log_half * i1 - 0.25 * x * s1;
    let magnitude0 = (log_half + EULER_GAMMA).abs() * i0 + s0;
    let magnitude1 = 1.0 / x + log_half.abs() * i1 + 0.25 * x * s1.abs();
    let rel = 8.0 * EPS * (magnitude0 / k0.abs()).max(magnitude1 / k1.abs());
    (k0, k1, rel)
}

/// K_0 and K_1 from Steed's evaluation of Temme's continued fraction, x > 2.
fn k01_continued_fraction(x: f64) -> (f64, f64, f64) {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    let mut iterations = 1;
    for i in 2..10_000 {
        iterations = i;
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let q_next = (q1 - b * q2) / a;
        q1 = q2;
        q2 = q_next;
        q += c * q_next;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 0.5 * EPS {
            break;
        }
    }
    h *= a1;
    let k0 = (FRAC_PI_2 / x).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    let rel = EPS * (8.0 + iterations as f64);
    (k0, k1, rel)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    // 30-digit reference values.
    const J_REF: &[(f64, [f64; 3])] = &[
        (0.5, [0.938_469_807_240_812_9, 0.242_268_457_674_873_9, 0.030_604_023_458_682_64]),
        (3.0, [-0.260_051_954_901_933_4, 0.339_058_958_525_936_46, 0.486_091_260_585_891_1]),
        (6.0, [0.150_645_257_250_996_93, -0.276_683_858_127_565_6, -0.242_873_209_960_185_47]),
        (7.5, [0.266_339_657_880_378_4, 0.135_248_427_579_705_5, -0.230_273_410_525_790_26]),
        (10.0, [-0.245_935_764_451_348_35, 0.043_472_746_168_861_44, 0.254_630_313_685_120_6]),
        (14.2, [0.141_369_384_657_128_66, 0.162_610_734_200_175_56, -0.118_466_464_347_244_77]),
        (24.9, [0.083_245_968_353_015_68, -0.134_855_699_531_408_74, -0.094_077_751_447_907_95]),
        (25.1, [0.108_275_671_499_949_29, -0.114_634_784_134_422_73, -0.117_409_917_247_712_06]),
        (40.0, [0.007_366_890_584_237_289_6, 0.126_038_318_037_585, -0.001_064_974_682_358_039_6]),
        (100.0, [0.019_985_850_304_223_122, -0.077_145_352_014_112_16, -0.021_528_757_344_505_366]),
        (333.3, [0.038_466_654_416_718_44, -0.020_687_550_206_813_803, -0.038_590_792_131_730_82]),
        (700.0, [-0.006_288_272_465_068_767, 0.029_489_824_084_030_33, 0.006_372_529_105_308_853]),
    ];

    const K_REF: &[(f64, [f64; 3])] = &[
        (1e-8, [18.536_612_259_610_778, 99_999_999.999_999_9, 1.999_999_999_999_999_9e16]),
        (0.01, [4.721_244_730_161_095, 99.973_894_118_296_25, 19_999.500_068_389_41]),
        (0.5, [0.924_419_071_227_665_9, 1.656_441_120_003_300_9, 7.550_183_551_240_869]),
        (1.0, [0.421_024_438_240_708_34, 0.601_907_230_197_234_6, 1.624_838_898_635_177_5]),
        (1.99, [0.115_301_767_551_776_8, 0.141_717_561_622_401_3, 0.257_731_477_725_044_44]),
        (2.01, [0.112_504_360_998_728_02, 0.138_040_877_319_207_67, 0.249_858_467_784_009_28]),
        (3.0, [0.034_739_504_386_279_25, 0.040_156_431_128_194_184, 0.061_510_458_471_742_04]),
        (8.0, [1.464_707_052_228_153_9e-4, 1.553_692_118_050_011_3e-4, 1.853_130_081_740_656_7e-4]),
        (20.0, [5.741_237_815_336_524e-10, 5.883_057_969_557_038e-10, 6.329_543_612_292_228e-10]),
        (50.0, [3.410_167_749_789_495_5e-23, 3.444_102_226_717_555_6e-23, 3.547_931_838_858_197_7e-23]),
        (300.0, [3.723_694_854_889_143e-132, 3.729_895_858_332_372_7e-132, 3.748_560_827_278_026e-132]),
        (700.0, [4.669_776_431_685_377e-306, 4.673_110_796_707_966e-306, 4.683_128_176_818_828e-306]),
    ];

    #[test]
    fn j_matches_reference_values_and_bounds() {
        for &(x, refs) in J_REF {
            for n in 0..3 {
                let r = bessel_j(n, x).unwrap();
                assert!(rel_close(r.value, refs[n as usize], 1e-13), "J{n}({x}) = {} vs {}", r.value, refs[n as usize]);
                assert!(r.abs_error_bound <= 1e-12 * r.value.abs().max(1.0), "bound J{n}({x})");
                assert!((r.value - refs[n as usize]).abs() <= r.abs_error_bound.max(1e-16) * 4.0 + 2e-16);
            }
        }
    }

    #[test]
    fn k_matches_reference_values_and_bounds() {
        for &(x, refs) in K_REF {
            for n in 0..3 {
                let r = bessel_k(n, x).unwrap();
                let reference = refs[n as usize];
                assert!((r.value - reference).abs() <= 1e-13 * reference.abs(), "K{n}({x}) = {} vs {reference}", r.value);
                assert!(r.abs_error_bound <= 1e-12 * r.value.abs().max(1.0), "bound K{n}({x})");
            }
        }
    }

    #[test]
    fn origin_values() {
        assert_eq!(bessel_j(0, 0.0).unwrap().value, 1.0);
        assert_eq!(bessel_j(1, 0.0).unwrap().value, 0.0);
        assert_eq!(bessel_j(2, 0.0).unwrap().value, 0.0);
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_j(0, f64::NAN).is_err());
        assert!(bessel_j(0, f64::INFINITY).is_err());
        assert!(bessel_j(0, -1.0).is_err());
        assert!(bessel_j(3, 1.0).is_err());
        assert!(bessel_k(0, 0.0).is_err());
        assert!(bessel_k(1, -2.0).is_err());
        assert!(bessel_k(0, f64::NAN).is_err());
    }

    #[test]
    fn regimes_agree_at_their_switch_points() {
        for &x in &[J_SERIES_MAX, 8.0, 12.0, J_ASYMPTOTIC_MIN, 30.0] {
            let (miller, _) = j_miller(x);
            let series: Vec<f64> = (0..5).map(|n| j_series_scaled(n, 0, x, 0).0).collect();
            let hankel: Vec<f64> = (0..5).map(|n| j_hankel(n, x).0).collect();
            for n in 0..5 {
                if x <= 12.0 {
                    assert!((miller[n] - series[n]).abs() < 5e-12, "series/miller n={n} x={x}");
                }
                if x >= 25.0 {
                    assert!((miller[n] - hankel[n]).abs() < 1e-13, "hankel/miller n={n} x={x}");
                }
            }
        }
        for &x in &[1.5, 2.0, 2.5, 3.0] {
            let (s0, s1, _) = k01_series(x);
            let (c0, c1, _) = k01_continued_fraction(x);
            assert!((s0 - c0).abs() < 1e-13 * c0, "K0 at {x}");
            assert!((s1 - c1).abs() < 1e-13 * c1, "K1 at {x}");
        }
    }

    #[test]
    fn safe_combinations_match_direct_forms() {
        for &x in &[0.3, 0.9, 0.999, 1.0, 1.7, 5.0] {
            let j = j_all(x);
            assert!((one_minus_j0_plus_j2(x) - (1.0 - j[0] + j[2])).abs() < 1e-15);
            assert!((half_minus_j1_over_x(x) - (0.5 - j[1] / x)).abs() < 1e-15);
            assert!((j_over_power(3, 1, x) - j[3] / x).abs() < 1e-15);
            assert!((j_over_power(2, 2, x) - j[2] / (x * x)).abs() < 1e-15);
        }
        // Leading terms at tiny argument.
        let x = 1e-7;
        assert!((one_minus_j0_plus_j2(x) / (x * x) - 0.375).abs() < 1e-9);
        assert!((half_minus_j1_over_x(x) / (x * x) - 1.0 / 16.0).abs() < 1e-9);
    }

    #[test]
    fn higher_orders_follow_recurrences() {
        for &x in &[0.7, 4.0, 9.0, 18.0, 60.0] {
            let j = j_all(x);
            assert!((j[3] - (4.0 * j[2] / x - j[1])).abs() < 1e-12, "J3 at {x}");
            assert!((j[4] - (6.0 * j[3] / x - j[2])).abs() < 1e-12, "J4 at {x}");
        }
    }
}
