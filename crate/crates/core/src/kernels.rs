//! Radial correlation functions G(r) with analytic derivatives through fourth order.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::specfun;

/// Derivatives of a radial kernel at one radius, plus combinations that lose
/// precision when formed naively near the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Radial {
    pub r: f64,
    pub g0: f64,
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub g4: f64,
    /// G'/r
    pub z2: f64,
    /// G'' - G''(0)
    pub z1_excess: f64,
    /// G'/r - G''(0)
    pub z2_excess: f64,
    /// d/dr (G'/r) = (G'' - G'/r)/r
    pub z2_slope: f64,
    /// d^2/dr^2 (G'/r)
    pub z2_curv: f64,
}

impl Radial {
    /// Assembles the table from plain derivatives. `n2` is -G''(0).
    pub fn from_derivatives(r: f64, g: [f64; 5], n2: f64) -> Self {
        let z2 = g[1] / r;
        let z2_slope = (g[2] - z2) / r;
        Radial {
            r,
            g0: g[0],
            g1: g[1],
            g2: g[2],
            g3: g[3],
            g4: g[4],
            z2,
            z1_excess: g[2] + n2,
            z2_excess: z2 + n2,
            z2_slope,
            z2_curv: (g[3] - 2.0 * z2_slope) / r,
        }
    }

    pub fn derivative(&self, order: usize) -> f64 {
        [self.g0, self.g1, self.g2, self.g3, self.g4][order]
    }
}

pub trait RadialKernel: Send + Sync {
    fn label(&self) -> String;

    /// Smallest admissible radius (the short-distance cutoff, 0 if none).
    fn domain_min(&self) -> f64;

    /// The `order`-th radial derivative of G at r, order in 0..=4.
    fn eval(&self, r: f64, order: usize) -> Result<f64>;

    /// -G''(0); for kernels singular at the origin this is the regularized value.
    fn neg_second_at_origin(&self) -> f64;

    fn radial(&self, r: f64) -> Result<Radial> {
        let mut g = [0.0; 5];
        for (k, slot) in g.iter_mut().enumerate() {
            *slot = self.eval(r, k)?;
        }
        Ok(Radial::from_derivatives(r, g, self.neg_second_at_origin()))
    }

    /// G^(k)(0) for even k when known in closed form.
    fn even_derivative_at_origin(&self, _k: usize) -> Option<f64> {
        None
    }

    fn smooth_at_origin(&self) -> bool {
        self.domain_min() == 0.0
    }
}

fn check_order(order: usize) -> Result<()> {
    if order > 4 {
        return Err(Error::invalid(format!("derivative order {order} exceeds 4")));
    }
    Ok(())
}

fn check_radius(r: f64, min: f64) -> Result<()> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::domain("kernel", format!("r = {r}")));
    }
    if r < min {
        return Err(Error::Cutoff { r, cutoff: min });
    }
    Ok(())
}

/// G(r) = amplitude * J_0(r).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomWave {
    pub amplitude: f64,
}

impl RadialKernel for RandomWave {
    fn label(&self) -> String {
        format!("random-wave(amplitude={})", self.amplitude)
    }

    fn domain_min(&self) -> f64 {
        0.0
    }

    fn eval(&self, r: f64, order: usize) -> Result<f64> {
        check_order(order)?;
        check_radius(r, 0.0)?;
        let j = specfun::j_all(r);
        let a = self.amplitude;
        Ok(match order {
            0 => a * j[0],
            1 => -a * j[1],
            2 => a * (j[2] - j[0]) / 2.0,
            3 => a * (3.0 * j[1] - j[3]) / 4.0,
            _ => a * (j[4] - 4.0 * j[2] + 3.0 * j[0]) / 8.0,
        })
    }

    fn neg_second_at_origin(&self) -> f64 {
        0.5 * self.amplitude
    }

    fn radial(&self, r: f64) -> Result<Radial> {
        check_radius(r, 0.0)?;
        if r == 0.0 {
            return Err(Error::domain("radial", "r must be positive"));
        }
        let a = self.amplitude;
        let j = specfun::j_all(r);
        let j1_r = specfun::j_over_power(1, 1, r);
        let j3_r = specfun::j_over_power(3, 1, r);
        Ok(Radial {
            r,
            g0: a * j[0],
            g1: -a * j[1],
            g2: a * (j[2] - j[0]) / 2.0,
            g3: a * (3.0 * j[1] - j[3]) / 4.0,
            g4: a * (j[4] - 4.0 * j[2] + 3.0 * j[0]) / 8.0,
            z2: -a * j1_r,
            z1_excess: 0.5 * a * specfun::one_minus_j0_plus_j2(r),
            z2_excess: a * specfun::half_minus_j1_over_x(r),
            z2_slope: a * specfun::j_over_power(2, 1, r),
            z2_curv: a * (j1_r - 3.0 * j3_r) / 4.0,
        })
    }

    fn even_derivative_at_origin(&self, k: usize) -> Option<f64> {
        if k % 2 == 1 {
            return Some(0.0);
        }
        // J_0 = sum (-1)^m (r/2)^(2m) / (m!)^2
        let m = k / 2;
        let mut value = 1.0;
        for i in 1..=k {
            value *= i as f64;
        }
        for i in 1..=m {
            value /= 4.0 * (i * i) as f64;
        }
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        Some(sign * self.amplitude * value)
    }
}

/// G(r) = amplitude * exp(-r^2/2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian {
    pub amplitude: f64,
}

impl RadialKernel for Gaussian {
    fn label(&self) -> String {
        format!("gaussian(amplitude={})", self.amplitude)
    }

    fn domain_min(&self) -> f64 {
        0.0
    }

    fn eval(&self, r: f64, order: usize) -> Result<f64> {
        check_order(order)?;
        check_radius(r, 0.0)?;
        let e = self.amplitude * (-0.5 * r * r).exp();
        let r2 = r * r;
        Ok(e * match order {
            0 => 1.0,
            1 => -r,
            2 => r2 - 1.0,
            3 => r * (3.0 - r2),
            _ => r2 * r2 - 6.0 * r2 + 3.0,
        })
    }

    fn neg_second_at_origin(&self) -> f64 {
        self.amplitude
    }

    fn radial(&self, r: f64) -> Result<Radial> {
        check_radius(r, 0.0)?;
        if r == 0.0 {
            return Err(Error::domain("radial", "r must be positive"));
        }
        let a = self.amplitude;
        let r2 = r * r;
        let e = (-0.5 * r2).exp();
        let one_minus_e = -(-0.5 * r2).exp_m1();
        Ok(Radial {
            r,
            g0: a * e,
            g1: -a * r * e,
            g2: a * (r2 - 1.0) * e,
            g3: a * r * (3.0 - r2) * e,
            g4: a * (r2 * r2 - 6.0 * r2 + 3.0) * e,
            z2: -a * e,
            z1_excess: a * (one_minus_e + r2 * e),
            z2_excess: a * one_minus_e,
            z2_slope: a * r * e,
            z2_curv: a * (1.0 - r2) * e,
        })
    }

    fn even_derivative_at_origin(&self, k: usize) -> Option<f64> {
        if k % 2 == 1 {
            return Some(0.0);
        }
        let m = k / 2;
        let double_factorial: f64 = (1..=m).map(|i| (2 * i - 1) as f64).product();
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        Some(sign * self.amplitude * double_factorial)
    }
}

/// G(r) = amplitude * (-ln r - K_0(r)), valid above the cutoff, with a
/// separately supplied regularized B = -G''(0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membrane {
    pub amplitude: f64,
    pub b: f64,
    pub cutoff: f64,
}

impl RadialKernel for Membrane {
    fn label(&self) -> String {
        format!("membrane(B={}, a={})", self.b, self.cutoff)
    }

    fn domain_min(&self) -> f64 {
        self.cutoff
    }

    fn eval(&self, r: f64, order: usize) -> Result<f64> {
        check_order(order)?;
        check_radius(r, self.cutoff)?;
        if r == 0.0 {
            return Err(Error::Cutoff { r, cutoff: self.cutoff });
        }
        let k = specfun::k_all(r);
        let inv = 1.0 / r;
        let inv2 = inv * inv;
        let value = match order {
            0 => -r.ln() - k[0],
            1 => -inv + k[1],
            2 => inv2 - 0.5 * (k[0] + k[2]),
            3 => -2.0 * inv2 * inv + 0.25 * (k[3] + 3.0 * k[1]),
            _ => 6.0 * inv2 * inv2 - 0.125 * (k[4] + 4.0 * k[2] + 3.0 * k[0]),
        };
        Ok(self.amplitude * value)
    }

    fn neg_second_at_origin(&self) -> f64 {
        self.b
    }

    fn smooth_at_origin(&self) -> bool {
        false
    }
}

/// Any of the built-in kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    RandomWave(RandomWave),
    Membrane(Membrane),
    Gaussian(Gaussian),
}

impl Kernel {
    fn inner(&self) -> &dyn RadialKernel {
        match self {
            Kernel::RandomWave(k) => k,
            Kernel::Membrane(k) => k,
            Kernel::Gaussian(k) => k,
        }
    }
}

impl RadialKernel for Kernel {
    fn label(&self) -> String {
        self.inner().label()
    }
    fn domain_min(&self) -> f64 {
        self.inner().domain_min()
    }
    fn eval(&self, r: f64, order: usize) -> Result<f64> {
        self.inner().eval(r, order)
    }
    fn neg_second_at_origin(&self) -> f64 {
        self.inner().neg_second_at_origin()
    }
    fn radial(&self, r: f64) -> Result<Radial> {
        self.inner().radial(r)
    }
    fn even_derivative_at_origin(&self, k: usize) -> Option<f64> {
        self.inner().even_derivative_at_origin(k)
    }
    fn smooth_at_origin(&self) -> bool {
        self.inner().smooth_at_origin()
    }
}

pub fn make_random_wave(amplitude: f64) -> Result<Kernel> {
    if !(amplitude > 0.0) || !amplitude.is_finite() {
        return Err(Error::invalid(format!("random-wave amplitude must be positive, got {amplitude}")));
    }
    Ok(Kernel::RandomWave(RandomWave { amplitude }))
}

pub fn make_membrane(b: f64, cutoff: f64) -> Result<Kernel> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::invalid(format!("membrane B must be positive, got {b}")));
    }
    if !(cutoff > 0.0) || !cutoff.is_finite() {
        return Err(Error::invalid(format!("membrane cutoff must be positive, got {cutoff}")));
    }
    Ok(Kernel::Membrane(Membrane { amplitude: 1.0, b, cutoff }))
}

pub fn make_gaussian() -> Kernel {
    Kernel::Gaussian(Gaussian { amplitude: 1.0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    RandomWave,
    Membrane,
    Gaussian,
}

impl FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "random-wave" | "randomwave" => Ok(KernelKind::RandomWave),
            "membrane" => Ok(KernelKind::Membrane),
            "gaussian" => Ok(KernelKind::Gaussian),
            other => Err(Error::invalid(format!("unknown kernel kind '{other}'"))),
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelKind::RandomWave => "random-wave",
            KernelKind::Membrane => "membrane",
            KernelKind::Gaussian => "gaussian",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    pub kind: KernelKind,
    pub amplitude: f64,
    pub b: f64,
    pub cutoff_a: f64,
}

impl KernelConfig {
    pub fn new(kind: KernelKind) -> Self {
        KernelConfig { kind, amplitude: 1.0, b: 1.0, cutoff_a: 0.01 }
    }

    pub fn build(&self) -> Result<Kernel> {
        match self.kind {
            KernelKind::RandomWave => make_random_wave(self.amplitude),
            KernelKind::Gaussian => {
                if !(self.amplitude > 0.0) || !self.amplitude.is_finite() {
                    return Err(Error::invalid(format!(
                        "gaussian amplitude must be positive, got {}",
                        self.amplitude
                    )));
                }
                Ok(Kernel::Gaussian(Gaussian { amplitude: self.amplitude }))
            }
            KernelKind::Membrane => {
                let mut k = make_membrane(self.b, self.cutoff_a)?;
                if let Kernel::Membrane(m) = &mut k {
                    if !(self.amplitude > 0.0) {
                        return Err(Error::invalid("membrane amplitude must be positive"));
                    }
                    m.amplitude = self.amplitude;
                }
                Ok(k)
            }
        }
    }

    /// The same kind with the amplitude chosen so that -G''(0) = 1.
    pub fn normalized(&self) -> Result<KernelConfig> {
        let current = self.build()?;
        if !current.smooth_at_origin() {
            return Err(Error::Unsupported {
                kernel: current.label(),
                reason: "-G''(0) is a cutoff parameter, not set by the amplitude".into(),
            });
        }
        let scale = current.neg_second_at_origin() / self.amplitude;
        Ok(KernelConfig { amplitude: 1.0 / scale, ..*self })
    }
}

/// Derivatives of a normalized smooth kernel at the origin:
/// G = -r^2/2 + b r^4/4! - c r^6/6! + d r^8/8! - e r^10/10! + ...
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorCoefficients {
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    /// -G''(0) of the kernel the coefficients came from.
    pub normalization: f64,
}

impl TaylorCoefficients {
    pub fn validate(&self) -> Result<()> {
        if !(self.b > 0.0) || !self.b.is_finite() {
            return Err(Error::InvalidCoefficients(format!("b = {} must be positive", self.b)));
        }
        if !(self.c > 0.0) || !self.c.is_finite() {
            return Err(Error::InvalidCoefficients(format!("c = {} must be positive", self.c)));
        }
        Ok(())
    }
}

pub fn taylor_coefficients<K: RadialKernel + ?Sized>(kernel: &K) -> Result<TaylorCoefficients> {
    if !kernel.smooth_at_origin() {
        return Err(Error::Unsupported {
            kernel: kernel.label(),
            reason: "kernel is singular at the origin".into(),
        });
    }
    let normalization = kernel.neg_second_at_origin();
    let analytic: Option<Vec<f64>> = [4, 6, 8, 10].iter().map(|&k| kernel.even_derivative_at_origin(k)).collect();
    let [g4, g6, g8, g10] = match analytic {
        Some(v) => [v[0], v[1], v[2], v[3]],
        None => fitted_even_derivatives(kernel)?,
    };
    let coeffs = TaylorCoefficients { b: g4, c: -g6, d: g8, e: -g10, normalization };
    coeffs.validate()?;
    Ok(coeffs)
}

// G''''(0) is evaluated directly. The higher even derivatives come from a
// least-squares fit of (G''''(h) - G''''(0))/h^2 as a polynomial in h^2.
fn fitted_even_derivatives<K: RadialKernel + ?Sized>(kernel: &K) -> Result<[f64; 4]> {
    const SAMPLES: usize = 32;
    const TERMS: usize = 6;
    const H_MAX: f64 = 0.3;
    let g4 = kernel.eval(0.0, 4)?;
    // Taylor factors of G^(6), G^(8), ... in the remainder, per power of h^2.
    let factorials = [2.0, 24.0, 720.0, 40320.0, 3628800.0, 479001600.0];
    let scale = H_MAX * H_MAX;
    let mut a = DMatrix::zeros(SAMPLES, TERMS);
    let mut y = DVector::zeros(SAMPLES);
    for i in 0..SAMPLES {
        let h = H_MAX * (i + 1) as f64 / SAMPLES as f64;
        let s = h * h;
        for (j, fact) in factorials.iter().enumerate() {
            a[(i, j)] = (s / scale).powi(j as i32) / fact;
        }
        y[i] = (kernel.eval(h, 4)? - g4) / s;
    }
    let x = a
        .svd(true, true)
        .solve(&y, 1e-14)
        .map_err(|e| Error::Accuracy(format!("Taylor fit failed: {e}")))?;
    Ok([g4, x[0], x[1] / scale, x[2] / (scale * scale)])
}
