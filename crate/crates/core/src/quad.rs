//! Globally adaptive Gauss-Kronrod (10/21 point) quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! error estimate falls below the requested tolerance. Integrands are fallible
//! so kernel domain errors propagate out of the integral.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_067_630_155,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-12, max_intervals: 4000 }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F>(f: &mut F, a: f64, b: f64) -> Result<Segment>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center)?;
    let mut kronrod = WGK[10] * f_center;
    let mut gauss = 0.0;
    let mut res_abs = kronrod.abs();
    let mut values = [(0.0, 0.0); 10];
    for (j, node) in XGK[..10].iter().enumerate() {
        let dx = half * node;
        let lo = f(center - dx)?;
        let hi = f(center + dx)?;
        values[j] = (lo, hi);
        kronrod += WGK[j] * (lo + hi);
        res_abs += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (lo + hi);
        }
    }
    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for (j, (lo, hi)) in values.iter().enumerate() {
        res_asc += WGK[j] * ((lo - mean).abs() + (hi - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    if !value.is_finite() {
        return Err(Error::Accuracy(format!("non-finite integrand on [{a}, {b}]")));
    }
    Ok(Segment { a, b, value, error })
}

impl Quadrature {
    pub fn with_tolerance(abs_tol: f64, rel_tol: f64) -> Self {
        Self { abs_tol, rel_tol, ..Self::default() }
    }

    pub fn integrate<F>(&self, f: F, a: f64, b: f64) -> Result<QuadResult>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        self.integrate_with_breaks(f, &[a, b])
    }

    /// Integrates over consecutive intervals of `points`, which must be ascending.
    /// Interior points should sit on kinks or other known features of the integrand.
    pub fn integrate_with_breaks<F>(&self, mut f: F, points: &[f64]) -> Result<QuadResult>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        if points.len() < 2 {
            return Err(Error::invalid("quadrature needs at least two break points"));
        }
        if points.windows(2).any(|w| !(w[1] >= w[0])) {
            return Err(Error::invalid("quadrature break points must be ascending"));
        }
        let mut heap = BinaryHeap::new();
        let mut evaluations = 0;
        for w in points.windows(2) {
            if w[1] > w[0] {
                heap.push(gauss_kronrod(&mut f, w[0], w[1])?);
                evaluations += 21;
            }
        }
        let mut finished: Vec<Segment> = Vec::new();
        loop {
            let value: f64 = heap.iter().chain(finished.iter()).map(|s| s.value).sum();
            let error: f64 = heap.iter().chain(finished.iter()).map(|s| s.error).sum();
            let target = self.abs_tol.max(self.rel_tol * value.abs());
            if error <= target || heap.is_empty() {
                let intervals = heap.len() + finished.len();
                if error > target {
                    return Err(Error::Accuracy(format!(
                        "quadrature stalled at error {error:.3e} (target {target:.3e})"
                    )));
                }
                return Ok(QuadResult { value, abs_error: error, evaluations, intervals });
            }
            if heap.len() + finished.len() >= self.max_intervals {
                return Err(Error::Accuracy(format!(
                    "quadrature exceeded {} intervals with error {error:.3e} (target {target:.3e})",
                    self.max_intervals
                )));
            }
            let worst = heap.pop().expect("heap checked non-empty");
            let mid = 0.5 * (worst.a + worst.b);
            let width = worst.b - worst.a;
            if width <= 1e3 * f64::EPSILON * worst.a.abs().max(worst.b.abs()).max(1e-300) {
                // Subdividing further only adds rounding noise.
                finished.push(worst);
                continue;
            }
            heap.push(gauss_kronrod(&mut f, worst.a, mid)?);
            heap.push(gauss_kronrod(&mut f, mid, worst.b)?);
            evaluations += 42;
        }
    }

    /// Iterated integral of `f(x, y)` over the rectangle spanned by the two break lists.
    pub fn integrate_2d<F>(&self, mut f: F, x_points: &[f64], y_points: &[f64]) -> Result<QuadResult>
    where
        F: FnMut(f64, f64) -> Result<f64>,
    {
        let inner = Quadrature {
            abs_tol: self.abs_tol * 1e-2,
            rel_tol: self.rel_tol * 1e-1,
            max_intervals: self.max_intervals,
        };
        let mut evaluations = 0;
        let mut outer = self.integrate_with_breaks(
            |x| {
                let r = inner.integrate_with_breaks(|y| f(x, y), y_points)?;
                evaluations += r.evaluations;
                Ok(r.value)
            },
            x_points,
        )?;
        outer.evaluations = evaluations;
        Ok(outer)
    }
}

/// Adaptive integral with the default tolerances.
pub fn integrate<F>(f: F, a: f64, b: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    Ok(Quadrature::default().integrate(f, a, b)?.value)
}
