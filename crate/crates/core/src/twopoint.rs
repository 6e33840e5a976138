//! Charge-charge correlation of extremal points in the bulk.
//!
//! With Z1 = G'', Z2 = G'/r, D1 = 1 - Z1^2, D2 = 1 - Z2^2 and s = sqrt(D1 D2),
//! the potential
//!
//! ```text
//! psi = (Z2'/s) [3 (Z1' - Z2') + r Z2' (Z1 Z1'/D1 + Z2 Z2'/D2)]
//! ```
//!
//! gives the correlation as (2 pi)^2 C(r) = psi'(r)/r. Kernels must satisfy
//! -G''(0) = 1.

use std::f64::consts::PI;

use crate::diff;
use crate::error::{Error, Result};
use crate::kernels::{taylor_coefficients, RadialKernel, TaylorCoefficients};
use crate::quad::Quadrature;

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Default radius below which psi is taken from its Taylor series.
pub const DEFAULT_R_SWITCH: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BulkQuantities {
    pub r: f64,
    pub z1: f64,
    pub z2: f64,
    pub z1p: f64,
    pub z2p: f64,
    pub z1pp: f64,
    pub z2pp: f64,
    /// 1 + Z1
    pub e1: f64,
    /// 1 + Z2
    pub e2: f64,
    pub d1: f64,
    pub d2: f64,
    pub d: f64,
}

impl BulkQuantities {
    pub fn sqrt_d1d2(&self) -> f64 {
        (self.d1 * self.d2).sqrt()
    }
}

pub(crate) fn require_normalized<K: RadialKernel + ?Sized>(kernel: &K) -> Result<()> {
    let n2 = kernel.neg_second_at_origin();
    if (n2 - 1.0).abs() > 1e-12 {
        return Err(Error::Normalization { kernel: kernel.label(), found: n2 });
    }
    Ok(())
}

pub fn bulk_quantities<K: RadialKernel + ?Sized>(kernel: &K, r: f64) -> Result<BulkQuantities> {
    require_normalized(kernel)?;
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::domain("bulk_quantities", format!("r = {r} must be positive")));
    }
    let t = kernel.radial(r)?;
    let (e1, e2) = (t.z1_excess, t.z2_excess);
    // 1 - Z^2 = (1 + Z)(1 - Z) = e (2 - e)
    let d1 = e1 * (2.0 - e1);
    let d2 = e2 * (2.0 - e2);
    Ok(BulkQuantities {
        r,
        z1: t.g2,
        z2: t.z2,
        z1p: t.g3,
        z2p: t.z2_slope,
        z1pp: t.g4,
        z2pp: t.z2_curv,
        e1,
        e2,
        d1,
        d2,
        // 1 - Z1 Z2 = e1 + e2 - e1 e2
        d: e1 + e2 - e1 * e2,
    })
}

fn check_nondegenerate(q: &BulkQuantities) -> Result<f64> {
    let p = q.d1 * q.d2;
    if !(p > 0.0) {
        return Err(Error::DegenerateMetric {
            at: q.r,
            detail: format!("D1 D2 = {p:e}"),
        });
    }
    Ok(p.sqrt())
}

/// psi from the expanded closed form, r > 0.
pub fn psi_closed<K: RadialKernel + ?Sized>(kernel: &K, r: f64) -> Result<f64> {
    let q = bulk_quantities(kernel, r)?;
    let s = check_nondegenerate(&q)?;
    let inner = 3.0 * (q.z1p - q.z2p) + r * q.z2p * (q.z1 * q.z1p / q.d1 + q.z2 * q.z2p / q.d2);
    Ok(q.z2p / s * inner)
}

fn series_terms(c: &TaylorCoefficients) -> Result<[f64; 3]> {
    if (c.normalization - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidCoefficients(format!(
            "coefficients belong to a kernel with -G''(0) = {}",
            c.normalization
        )));
    }
    if !(c.b > 0.0) {
        return Err(Error::InvalidCoefficients(format!("b = {} must be positive", c.b)));
    }
    let (b, cc, d) = (c.b, c.c, c.d);
    Ok([
        4.0 * b / (3.0 * SQRT3),
        (b * b - cc) / (3.0 * SQRT3),
        (45.0 * b.powi(4) - 56.0 * b * b * cc + 3.0 * cc * cc + 10.0 * b * d) / (540.0 * SQRT3 * b),
    ])
}

/// Small-r expansion of psi through order r^4.
pub fn psi_series(coeffs: &TaylorCoefficients, r: f64) -> Result<f64> {
    let [a0, a2, a4] = series_terms(coeffs)?;
    let r2 = r * r;
    Ok(a0 + r2 * (a2 + r2 * a4))
}

/// psi'(r)/r from the expansion.
pub fn psi_series_slope_over_r(coeffs: &TaylorCoefficients, r: f64) -> Result<f64> {
    let [_, a2, a4] = series_terms(coeffs)?;
    Ok(2.0 * a2 + 4.0 * a4 * r * r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Series,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Series => "series",
        }
    }
}

/// A normalized kernel together with its Taylor data and the series switch radius.
#[derive(Debug, Clone)]
pub struct TwoPoint<K> {
    pub kernel: K,
    pub coeffs: Option<TaylorCoefficients>,
    pub r_switch: f64,
}

impl<K: RadialKernel> TwoPoint<K> {
    pub fn new(kernel: K) -> Result<Self> {
        require_normalized(&kernel)?;
        let coeffs = if kernel.smooth_at_origin() { Some(taylor_coefficients(&kernel)?) } else { None };
        Ok(TwoPoint { kernel, coeffs, r_switch: DEFAULT_R_SWITCH })
    }

    pub fn with_r_switch(mut self, r_switch: f64) -> Self {
        self.r_switch = r_switch;
        self
    }

    fn use_series(&self, r: f64) -> bool {
        self.coeffs.is_some() && r <= self.r_switch
    }

    pub fn method(&self, r: f64) -> Method {
        if self.use_series(r) {
            Method::Series
        } else {
            Method::ClosedForm
        }
    }

    pub fn psi(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::domain("psi", format!("r = {r}")));
        }
        match &self.coeffs {
            Some(c) if r <= self.r_switch => psi_series(c, r),
            _ => psi_closed(&self.kernel, r),
        }
    }

    /// psi'(r)
    pub fn psi_prime(&self, r: f64) -> Result<f64> {
        if let (true, Some(c)) = (self.use_series(r), &self.coeffs) {
            return Ok(r * psi_series_slope_over_r(c, r)?);
        }
        if !(r > 0.0) {
            return Err(Error::domain("psi_prime", format!("r = {r}")));
        }
        let lower = self.kernel.domain_min();
        let h = 0.05f64.min(0.25 * (r - lower));
        diff::derivative(|t| psi_closed(&self.kernel, t), r, h, 4)
    }

    /// (2 pi)^2 C(r) = psi'(r)/r
    pub fn correlation_4pi2(&self, r: f64) -> Result<f64> {
        if let (true, Some(c)) = (self.use_series(r), &self.coeffs) {
            return psi_series_slope_over_r(c, r);
        }
        Ok(self.psi_prime(r)? / r)
    }

    pub fn charge_correlation(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::domain("charge_correlation", format!("r = {r} must be positive")));
        }
        Ok(self.correlation_4pi2(r)? / (4.0 * PI * PI))
    }

    pub fn curve(&self, r_grid: &[f64]) -> Result<TwoPointCurve> {
        let mut curve = TwoPointCurve::default();
        for &r in r_grid {
            curve.r_grid.push(r);
            curve.psi.push(self.psi(r)?);
            curve.c.push(self.charge_correlation(r)?);
            curve.method.push(self.method(r));
        }
        Ok(curve)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TwoPointCurve {
    pub r_grid: Vec<f64>,
    pub psi: Vec<f64>,
    /// C(r)
    pub c: Vec<f64>,
    pub method: Vec<Method>,
}

pub fn psi<K: RadialKernel + Clone>(kernel: &K, r: f64) -> Result<f64> {
    TwoPoint::new(kernel.clone())?.psi(r)
}

pub fn charge_correlation<K: RadialKernel + Clone>(kernel: &K, r: f64) -> Result<f64> {
    TwoPoint::new(kernel.clone())?.charge_correlation(r)
}

/// (Omega11, Omega22) = (-(Z2')^2, Z1' Z2') / sqrt(D1 D2)
pub fn omega_potential<K: RadialKernel + ?Sized>(kernel: &K, r: f64) -> Result<(f64, f64)> {
    let q = bulk_quantities(kernel, r)?;
    let s = check_nondegenerate(&q)?;
    Ok((-q.z2p * q.z2p / s, q.z1p * q.z2p / s))
}

/// n0 = 2 G''''(0) / (3 pi sqrt 3)
pub fn absolute_density<K: RadialKernel + ?Sized>(kernel: &K) -> Result<f64> {
    require_normalized(kernel)?;
    let b = taylor_coefficients(kernel)?.b;
    Ok(2.0 * b / (3.0 * PI * SQRT3))
}

/// n0 from the Gaussian average of |det Hessian| in spherical coordinates,
/// times the gradient-zero density 1/(2 pi).
pub fn absolute_density_oracle<K: RadialKernel + ?Sized>(kernel: &K) -> Result<f64> {
    require_normalized(kernel)?;
    let b = taylor_coefficients(kernel)?.b;
    let kink = (1.0 / SQRT3).acos();
    let quad = Quadrature::with_tolerance(1e-11, 1e-11);
    let integral = quad.integrate_2d(
        |rho, theta| {
            let c = theta.cos();
            Ok(rho.powi(4) * (-0.5 * rho * rho).exp() * theta.sin() * (3.0 * c * c - 1.0).abs())
        },
        &[0.0, 5.0, 10.0, 40.0],
        &[0.0, kink, 0.5 * PI],
    )?;
    // Azimuth contributes 2 pi, the mirror half of theta a factor 2.
    let mean_abs = integral.value * 2.0 * PI * 2.0 * (b / 3.0) / (2.0 * PI).powf(1.5);
    Ok(mean_abs / (2.0 * PI))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumRuleReport {
    pub n0_closed: f64,
    pub n0_quadrature: f64,
    /// Truncated integral plus the tail estimate.
    pub integral_value: f64,
    /// 2 pi times the integral of r C(r) over (r_min, r_max), by quadrature.
    pub truncated_integral: f64,
    /// Remainder beyond r_max, -psi(r_max)/(2 pi), since psi vanishes at infinity.
    pub tail: f64,
    /// |integral_value + n0_closed|
    pub residual: f64,
    /// False when the tail exceeds the requested tolerance.
    pub tail_converged: bool,
}

pub fn sum_rule_check<K: RadialKernel + Clone>(kernel: &K, r_max: f64) -> Result<SumRuleReport> {
    sum_rule_check_from(kernel, 0.0, r_max, 1e-4)
}

/// Sum rule with the integral starting at `r_min` (0 for the full range) and a
/// tolerance for flagging an unconverged tail.
pub fn sum_rule_check_from<K: RadialKernel + Clone>(
    kernel: &K,
    r_min: f64,
    r_max: f64,
    tail_tolerance: f64,
) -> Result<SumRuleReport> {
    if !(r_max > r_min) || r_min < 0.0 {
        return Err(Error::invalid(format!("need 0 <= r_min < r_max, got [{r_min}, {r_max}]")));
    }
    let model = TwoPoint::new(kernel.clone())?;
    let n0_closed = absolute_density(kernel)?;
    let n0_quadrature = absolute_density_oracle(kernel)?;
    let mut breaks = vec![r_min];
    // Unit-spaced breaks keep the oscillatory tail from starving the heap.
    let mut x = (r_min + 1.0).floor().max(r_min + 0.5);
    while x < r_max {
        breaks.push(x);
        x += 1.0;
    }
    breaks.push(r_max);
    let quad = Quadrature::with_tolerance(1e-11, 1e-11);
    let integral = quad.integrate_with_breaks(|r| model.psi_prime(r), &breaks)?.value / (2.0 * PI);
    let tail = -model.psi(r_max)? / (2.0 * PI);
    Ok(SumRuleReport {
        n0_closed,
        n0_quadrature,
        integral_value: integral + tail,
        truncated_integral: integral,
        tail,
        residual: (integral + tail + n0_closed).abs(),
        tail_converged: tail.abs() <= tail_tolerance,
    })
}
