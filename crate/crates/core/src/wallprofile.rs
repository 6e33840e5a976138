//! Charge density of extremal points next to a straight Dirichlet wall at y = 0.
//!
//! Subtracting the mirror image makes the field vanish on the wall. The gradient
//! covariance at height y then depends on G at distance 2y only. The
//! integrated charge density is
//!
//! ```text
//! f(y) = -(g_xx g_yy)^(-1/2) d(g_xx)/dy,    4 pi rho(y) = f'(y).
//! ```

use std::f64::consts::PI;

use crate::diff;
use crate::error::{Error, Result};
use crate::kernels::RadialKernel;
use crate::quad::Quadrature;

/// Gradient covariance of the mirrored field at height y, with its y-derivatives.
/// The off-diagonal component vanishes identically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallMetric {
    pub g_xx: f64,
    pub g_yy: f64,
    pub dg_xx_dy: f64,
    pub dg_yy_dy: f64,
}

impl WallMetric {
    pub fn det(&self) -> f64 {
        self.g_xx * self.g_yy
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChargeProfile {
    pub y_grid: Vec<f64>,
    pub f: Vec<f64>,
    /// 4 pi rho(y)
    pub rho_4pi: Vec<f64>,
    /// Trapezoid integral of rho over the grid.
    pub net_charge: f64,
    /// Adaptive quadrature of rho over the grid range.
    pub net_charge_quadrature: f64,
    /// (f(y_max) - f(y_min)) / (4 pi)
    pub net_charge_endpoint: f64,
}

impl ChargeProfile {
    pub fn rho(&self) -> Vec<f64> {
        self.rho_4pi.iter().map(|v| v / (4.0 * PI)).collect()
    }
}

/// Smallest height at which the metric is defined.
pub fn lower_limit<K: RadialKernel + ?Sized>(kernel: &K) -> f64 {
    0.5 * kernel.domain_min()
}

fn check_height<K: RadialKernel + ?Sized>(kernel: &K, y: f64) -> Result<()> {
    if !y.is_finite() || y <= 0.0 {
        return Err(Error::domain("wall_metric", format!("height y = {y} must be positive")));
    }
    let lower = lower_limit(kernel);
    if y < lower {
        return Err(Error::Cutoff { r: 2.0 * y, cutoff: kernel.domain_min() });
    }
    Ok(())
}

pub fn wall_metric<K: RadialKernel + ?Sized>(kernel: &K, y: f64) -> Result<WallMetric> {
    check_height(kernel, y)?;
    let t = kernel.radial(2.0 * y)?;
    Ok(WallMetric {
        g_xx: t.z2_excess,
        g_yy: kernel.neg_second_at_origin() - t.g2,
        dg_xx_dy: 2.0 * t.z2_slope,
        dg_yy_dy: -2.0 * t.g3,
    })
}

/// f(y)
pub fn integrated_charge<K: RadialKernel + ?Sized>(kernel: &K, y: f64) -> Result<f64> {
    let m = wall_metric(kernel, y)?;
    if !(m.g_xx > 0.0 && m.g_yy > 0.0) {
        return Err(Error::DegenerateMetric {
            at: y,
            detail: format!("g_xx = {:e}, g_yy = {:e}", m.g_xx, m.g_yy),
        });
    }
    Ok(-m.dg_xx_dy / (m.g_xx * m.g_yy).sqrt())
}

/// 4 pi rho(y) = f'(y), by extrapolated central differences.
pub fn charge_density_4pi<K: RadialKernel + ?Sized>(kernel: &K, y: f64) -> Result<f64> {
    check_height(kernel, y)?;
    let h = 0.1f64.min(0.25 * (y - lower_limit(kernel)));
    if !(h > 0.0) {
        return Err(Error::Cutoff { r: 2.0 * y, cutoff: kernel.domain_min() });
    }
    diff::derivative(|t| integrated_charge(kernel, t), y, h, 4)
}

/// rho(y)
pub fn charge_density<K: RadialKernel + ?Sized>(kernel: &K, y: f64) -> Result<f64> {
    Ok(charge_density_4pi(kernel, y)? / (4.0 * PI))
}

pub fn profile<K: RadialKernel + ?Sized>(kernel: &K, y_grid: &[f64]) -> Result<ChargeProfile> {
    if y_grid.len() < 2 {
        return Err(Error::invalid("profile grid needs at least two points"));
    }
    if y_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("profile grid must be strictly ascending"));
    }
    let f = y_grid.iter().map(|&y| integrated_charge(kernel, y)).collect::<Result<Vec<_>>>()?;
    let rho_4pi = y_grid.iter().map(|&y| charge_density_4pi(kernel, y)).collect::<Result<Vec<_>>>()?;
    let four_pi = 4.0 * PI;
    let net_charge = y_grid
        .windows(2)
        .zip(rho_4pi.windows(2))
        .map(|(y, r)| 0.5 * (y[1] - y[0]) * (r[0] + r[1]))
        .sum::<f64>()
        / four_pi;
    let (y0, y1) = (y_grid[0], y_grid[y_grid.len() - 1]);
    let net_charge_quadrature = Quadrature::with_tolerance(1e-10, 1e-10)
        .integrate_with_breaks(|y| charge_density_4pi(kernel, y), &[y0, y1])?
        .value
        / four_pi;
    let net_charge_endpoint = (f[f.len() - 1] - f[0]) / four_pi;
    Ok(ChargeProfile {
        y_grid: y_grid.to_vec(),
        f,
        rho_4pi,
        net_charge,
        net_charge_quadrature,
        net_charge_endpoint,
    })
}
