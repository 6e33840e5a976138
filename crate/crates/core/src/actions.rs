//! The four-dimensional two-point manifold and the actions built on it.
//!
//! Coordinates are the positions of two points A and B in the plane. The
//! metric is g_{ia,jb} = delta_ab delta_ij - c_ab d_i d_j G(|A - B|) with
//! c_ab = 1 - delta_ab. Index `a * 2 + i` flattens (point, component).

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix4};

use crate::diff;
use crate::error::{Error, Result};
use crate::kernels::{Radial, RadialKernel};
use crate::quad::Quadrature;
use crate::twopoint::{bulk_quantities, require_normalized, BulkQuantities, TwoPoint};

/// Hessian of G(|d|) with respect to d.
pub fn kernel_hessian<K: RadialKernel + ?Sized>(kernel: &K, d: [f64; 2]) -> Result<Matrix2<f64>> {
    let rho = d[0].hypot(d[1]);
    if !(rho > 0.0) {
        return Err(Error::domain("kernel_hessian", "points coincide"));
    }
    let t = kernel.radial(rho)?;
    let (ux, uy) = (d[0] / rho, d[1] / rho);
    let radial = Matrix2::new(ux * ux, ux * uy, ux * uy, uy * uy);
    Ok(radial * t.g2 + (Matrix2::identity() - radial) * t.z2)
}

pub struct FourMetricEvaluator<'a, K: ?Sized> {
    pub kernel: &'a K,
}

impl<'a, K: RadialKernel + ?Sized> FourMetricEvaluator<'a, K> {
    pub fn new(kernel: &'a K) -> Self {
        FourMetricEvaluator { kernel }
    }

    pub fn evaluate(&self, a: [f64; 2], b: [f64; 2]) -> Result<Matrix4<f64>> {
        let hess = kernel_hessian(self.kernel, [a[0] - b[0], a[1] - b[1]])?;
        let mut g = Matrix4::identity();
        for i in 0..2 {
            for j in 0..2 {
                g[(i, 2 + j)] = -hess[(i, j)];
                g[(2 + i, j)] = -hess[(i, j)];
            }
        }
        Ok(g)
    }

    fn at(&self, x: &[f64; 4]) -> Result<Matrix4<f64>> {
        self.evaluate([x[0], x[1]], [x[2], x[3]])
    }
}

/// h = 1 - (Hess G)^2, diagonal with entries (D1, D2) when A - B lies on the x-axis.
pub fn h_matrix<K: RadialKernel + ?Sized>(kernel: &K, d: [f64; 2]) -> Result<Matrix2<f64>> {
    let hess = kernel_hessian(kernel, d)?;
    Ok(Matrix2::identity() - hess * hess)
}

type Tensor3 = [[[f64; 2]; 2]; 2];
type Tensor4 = [[[[f64; 2]; 2]; 2]; 2];

const LEVI_CIVITA: [[f64; 2]; 2] = [[0.0, 1.0], [-1.0, 0.0]];

// Third and fourth derivatives of G at (r, 0). Only the parity in the
// y-index matters: an odd number of y's vanishes.
fn derivative_tensors(q: &BulkQuantities) -> (Tensor3, Tensor4) {
    let mut g3 = [[[0.0; 2]; 2]; 2];
    let mut g4 = [[[[0.0; 2]; 2]; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                g3[i][j][k] = match i + j + k {
                    0 => q.z1p,
                    2 => q.z2p,
                    _ => 0.0,
                };
                for l in 0..2 {
                    g4[i][j][k][l] = match i + j + k + l {
                        0 => q.z1pp,
                        2 => q.z2pp,
                        4 => 3.0 * q.z2p / q.r,
                        _ => 0.0,
                    };
                }
            }
        }
    }
    (g3, g4)
}

/// Pieces of the closed-form curvature at separation r.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureParts {
    pub contraction: f64,
    pub omega: f64,
    pub theta: f64,
    pub det_h: f64,
}

pub fn curvature_parts<K: RadialKernel + ?Sized>(kernel: &K, r: f64) -> Result<CurvatureParts> {
    let q = bulk_quantities(kernel, r)?;
    if !(q.d1 > 0.0 && q.d2 > 0.0) {
        return Err(Error::DegenerateMetric { at: r, detail: format!("D1 = {:e}, D2 = {:e}", q.d1, q.d2) });
    }
    let hinv = [1.0 / q.d1, 1.0 / q.d2];
    let xi = [q.z1 / q.d1, q.z2 / q.d2];
    let (g3, g4) = derivative_tensors(&q);
    let mut contraction = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let mut t = g4[i][j][k][l];
                    for p in 0..2 {
                        t += g3[i][j][p] * g3[k][l][p] * xi[p];
                    }
                    let weight = if i == k && j == l { hinv[i] * hinv[j] - xi[i] * xi[j] } else { 0.0 };
                    contraction += weight * t;
                }
            }
        }
    }
    let mut omega = 0.0;
    let mut theta = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let e = LEVI_CIVITA[i][j] * LEVI_CIVITA[k][l];
                    if e == 0.0 {
                        continue;
                    }
                    for m in 0..2 {
                        let pair = g3[i][k][m] * g3[j][l][m];
                        omega += 0.5 * e * pair * hinv[m];
                        theta += 0.5 * e * pair * xi[m];
                    }
                }
            }
        }
    }
    Ok(CurvatureParts { contraction, omega, theta, det_h: q.d1 * q.d2 })
}

/// Scalar curvature of the two-point manifold at separation r.
pub fn scalar_curvature_closed<K: RadialKernel + ?Sized>(kernel: &K, r: f64) -> Result<f64> {
    let p = curvature_parts(kernel, r)?;
    Ok(2.0 * (p.contraction - 2.0 * p.omega / p.det_h + 2.0 * p.theta / p.det_h))
}

/// Largest singular value over smallest. Metrics beyond this are rejected.
pub const MAX_CONDITION: f64 = 1e10;

fn checked_inverse(g: &Matrix4<f64>) -> Result<Matrix4<f64>> {
    let sv = g.singular_values();
    let cond = sv.max() / sv.min();
    if !cond.is_finite() || cond > MAX_CONDITION {
        return Err(Error::Conditioning(cond));
    }
    g.try_inverse().ok_or(Error::Conditioning(f64::INFINITY))
}

type Christoffel = [[[f64; 4]; 4]; 4];

fn christoffel<K: RadialKernel + ?Sized>(m: &FourMetricEvaluator<K>, x: [f64; 4], h: f64) -> Result<Christoffel> {
    let ginv = checked_inverse(&m.at(&x)?)?;
    let mut dg = [Matrix4::zeros(); 4];
    for (c, slot) in dg.iter_mut().enumerate() {
        let mut plus = x;
        let mut minus = x;
        plus[c] += h;
        minus[c] -= h;
        *slot = (m.at(&plus)? - m.at(&minus)?) / (2.0 * h);
    }
    let mut gamma = [[[0.0; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                let mut s = 0.0;
                for d in 0..4 {
                    s += ginv[(a, d)] * (dg[b][(d, c)] + dg[c][(d, b)] - dg[d][(b, c)]);
                }
                gamma[a][b][c] = 0.5 * s;
            }
        }
    }
    Ok(gamma)
}

/// Scalar curvature from central differences: Christoffel symbols from the
/// metric, the Riemann tensor from differences of those. Second order in `step`.
pub fn scalar_curvature_fd_plain<K: RadialKernel + ?Sized>(kernel: &K, a: [f64; 2], b: [f64; 2], step: f64) -> Result<f64> {
    let dist = (a[0] - b[0]).hypot(a[1] - b[1]);
    if !(step > 0.0) || dist <= 3.0 * step {
        return Err(Error::invalid(format!("step {step} too large for separation {dist}")));
    }
    let m = FourMetricEvaluator::new(kernel);
    let x = [a[0], a[1], b[0], b[1]];
    let gamma = christoffel(&m, x, step)?;
    let mut dgamma = [[[[0.0; 4]; 4]; 4]; 4]; // dgamma[c][a][b][d] = d_c Gamma^a_{bd}
    for c in 0..4 {
        let mut plus = x;
        let mut minus = x;
        plus[c] += step;
        minus[c] -= step;
        let gp = christoffel(&m, plus, step)?;
        let gm = christoffel(&m, minus, step)?;
        for a in 0..4 {
            for b in 0..4 {
                for d in 0..4 {
                    dgamma[c][a][b][d] = (gp[a][b][d] - gm[a][b][d]) / (2.0 * step);
                }
            }
        }
    }
    let ginv = checked_inverse(&m.at(&x)?)?;
    // Ricci_bd = R^a_{bad} = d_a Gamma^a_{db} - d_d Gamma^a_{ab} + Gamma^a_{ae} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{ab}
    let mut scalar = 0.0;
    for b in 0..4 {
        for d in 0..4 {
            let mut ricci = 0.0;
            for a in 0..4 {
                ricci += dgamma[a][a][d][b] - dgamma[d][a][a][b];
                for e in 0..4 {
                    ricci += gamma[a][a][e] * gamma[e][d][b] - gamma[a][d][e] * gamma[e][a][b];
                }
            }
            scalar += ginv[(b, d)] * ricci;
        }
    }
    Ok(scalar)
}

/// [`scalar_curvature_fd_plain`] at `step` and `step / 2`, combined by one
/// Richardson step to cancel the leading O(step^2) error.
pub fn scalar_curvature_fd<K: RadialKernel + ?Sized>(
    kernel: &K,
    a: [f64; 2],
    b: [f64; 2],
    step: f64,
) -> Result<f64> {
    let coarse = scalar_curvature_fd_plain(kernel, a, b, step)?;
    let fine = scalar_curvature_fd_plain(kernel, a, b, 0.5 * step)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureReport {
    pub r: f64,
    pub r_closed: f64,
    pub r_fd: f64,
    pub abs_diff: f64,
}

pub fn curvature_report<K: RadialKernel + ?Sized>(kernel: &K, r: f64, step: f64) -> Result<CurvatureReport> {
    let r_closed = scalar_curvature_closed(kernel, r)?;
    let r_fd = scalar_curvature_fd(kernel, [r, 0.0], [0.0, 0.0], step)?;
    Ok(CurvatureReport { r, r_closed, r_fd, abs_diff: (r_closed - r_fd).abs() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionValue {
    pub value: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub boundary_note: String,
}

fn action_quadrature<F>(f: F, r_min: f64, r_max: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(r_max > r_min) || r_min < 0.0 {
        return Err(Error::invalid(format!("need 0 <= r_min < r_max, got [{r_min}, {r_max}]")));
    }
    let mut breaks = vec![r_min];
    let mut x = r_min.floor() + 1.0;
    while x < r_max {
        breaks.push(x);
        x += 1.0;
    }
    breaks.push(r_max);
    Ok(Quadrature::with_tolerance(1e-12, 1e-12).integrate_with_breaks(f, &breaks)?.value)
}

/// -D/sqrt(D1 D2) (Z1' + Z2')
pub fn einstein_integrand<K: RadialKernel + ?Sized>(kernel: &K, r: f64) -> Result<f64> {
    let q = bulk_quantities(kernel, r)?;
    Ok(-q.d / q.sqrt_d1d2() * (q.z1p + q.z2p))
}

/// -(sqrt(D2/D1) Z1' + sqrt(D1/D2) Z2')
pub fn lagrangian_integrand<K: RadialKernel + ?Sized>(kernel: &K, r: f64) -> Result<f64> {
    let q = bulk_quantities(kernel, r)?;
    let ratio = (q.d2 / q.d1).sqrt();
    Ok(-(ratio * q.z1p + q.z2p / ratio))
}

pub fn einstein_action<K: RadialKernel + ?Sized>(kernel: &K, r_min: f64, r_max: f64) -> Result<ActionValue> {
    require_normalized(kernel)?;
    let value = action_quadrature(|r| einstein_integrand(kernel, r), r_min, r_max)?;
    Ok(ActionValue {
        value,
        r_min,
        r_max,
        boundary_note: "reduced integrand; boundary terms from partial integrations omitted".into(),
    })
}

/// (1/2) int r sqrt(det h) R dr, the curvature integral per unit area.
pub fn einstein_action_from_curvature<K: RadialKernel + ?Sized>(
    kernel: &K,
    r_min: f64,
    r_max: f64,
) -> Result<ActionValue> {
    require_normalized(kernel)?;
    let value = action_quadrature(
        |r| {
            let p = curvature_parts(kernel, r)?;
            let big_r = 2.0 * (p.contraction - 2.0 * p.omega / p.det_h + 2.0 * p.theta / p.det_h);
            Ok(0.5 * r * p.det_h.sqrt() * big_r)
        },
        r_min,
        r_max,
    )?;
    Ok(ActionValue { value, r_min, r_max, boundary_note: "direct curvature integral".into() })
}

/// The boundary contribution separating the curvature integral from the
/// reduced one, evaluated from the endpoint values of the integrated-out terms.
pub fn einstein_boundary_term<K: RadialKernel + ?Sized>(kernel: &K, r_min: f64, r_max: f64) -> Result<f64> {
    let end = |r: f64| -> Result<f64> {
        if r == 0.0 {
            return Ok(endpoint_at_origin());
        }
        let q = bulk_quantities(kernel, r)?;
        Ok(boundary_primitive(&q))
    };
    Ok(end(r_max)? - end(r_min)?)
}

// Primitive collecting the total-derivative terms dropped between the
// curvature integral and the reduced integrand.
fn boundary_primitive(q: &BulkQuantities) -> f64 {
    let s = q.sqrt_d1d2();
    let r = q.r;
    r * s * q.z1p / q.d1 + 2.0 * r * s * q.z2p * q.d / (q.d1 * q.d2) - 2.0 * q.d / s + 2.0 * q.z2 * q.d / s
}

// Limit of `boundary_primitive` as r -> 0: the first two terms vanish,
// D/s -> 2/sqrt 3 and Z2 -> -1.
fn endpoint_at_origin() -> f64 {
    let ratio = 2.0 / 3f64.sqrt();
    -2.0 * ratio - 2.0 * ratio
}

pub fn lagrangian<K: RadialKernel + ?Sized>(kernel: &K, r_min: f64, r_max: f64) -> Result<ActionValue> {
    require_normalized(kernel)?;
    let value = action_quadrature(|r| lagrangian_integrand(kernel, r), r_min, r_max)?;
    Ok(ActionValue {
        value,
        r_min,
        r_max,
        boundary_note: "no partial integration involved".into(),
    })
}

/// Smooth bump exp(-1/(1 - t^2)), t = (r - center)/width, supported on |t| < 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub center: f64,
    pub width: f64,
}

impl Bump {
    pub fn support(&self) -> (f64, f64) {
        (self.center - self.width, self.center + self.width)
    }

    /// Value and first four derivatives in r.
    pub fn derivatives(&self, r: f64) -> [f64; 5] {
        let t = (r - self.center) / self.width;
        if t.abs() >= 1.0 {
            return [0.0; 5];
        }
        // eta = exp(q), q = -1/(1 - t^2) = -(1/2)(1/(1 - t) + 1/(1 + t))
        let (u, v) = (1.0 / (1.0 - t), 1.0 / (1.0 + t));
        let mut dq = [0.0; 5];
        let mut fact = 1.0;
        for (k, slot) in dq.iter_mut().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            *slot = -0.5 * fact * (u.powi(k as i32 + 1) + sign * v.powi(k as i32 + 1));
        }
        let eta = dq[0].exp();
        let (q1, q2, q3, q4) = (dq[1], dq[2], dq[3], dq[4]);
        let w = self.width;
        [
            eta,
            q1 * eta / w,
            (q2 + q1 * q1) * eta / (w * w),
            (q3 + 3.0 * q1 * q2 + q1.powi(3)) * eta / w.powi(3),
            (q4 + 4.0 * q1 * q3 + 3.0 * q2 * q2 + 6.0 * q1 * q1 * q2 + q1.powi(4)) * eta / w.powi(4),
        ]
    }
}

/// G + epsilon * bump.
#[derive(Debug, Clone, Copy)]
pub struct PerturbedKernel<K> {
    pub base: K,
    pub bump: Bump,
    pub epsilon: f64,
}

impl<K: RadialKernel> RadialKernel for PerturbedKernel<K> {
    fn label(&self) -> String {
        format!("{} + {:e} bump", self.base.label(), self.epsilon)
    }
    fn domain_min(&self) -> f64 {
        self.base.domain_min()
    }
    fn eval(&self, r: f64, order: usize) -> Result<f64> {
        let base = self.base.eval(r, order)?;
        Ok(base + self.epsilon * self.bump.derivatives(r)[order])
    }
    fn neg_second_at_origin(&self) -> f64 {
        self.base.neg_second_at_origin()
    }
    fn radial(&self, r: f64) -> Result<Radial> {
        let mut t = self.base.radial(r)?;
        let e = self.bump.derivatives(r).map(|v| self.epsilon * v);
        if e.iter().all(|v| *v == 0.0) {
            return Ok(t);
        }
        let z2 = e[1] / r;
        let slope = (e[2] - z2) / r;
        t.g0 += e[0];
        t.g1 += e[1];
        t.g2 += e[2];
        t.g3 += e[3];
        t.g4 += e[4];
        t.z2 += z2;
        t.z1_excess += e[2];
        t.z2_excess += z2;
        t.z2_slope += slope;
        t.z2_curv += (e[3] - 2.0 * slope) / r;
        Ok(t)
    }
    fn even_derivative_at_origin(&self, k: usize) -> Option<f64> {
        self.base.even_derivative_at_origin(k)
    }
    fn smooth_at_origin(&self) -> bool {
        self.base.smooth_at_origin()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationalReport {
    /// (L[G + eps eta] - L[G - eps eta]) / (2 eps)
    pub finite_difference: f64,
    /// int psi'(r) eta(r) dr
    pub predicted: f64,
    pub residual: f64,
    /// residual / |predicted|
    pub relative: f64,
}

pub fn variational_check<K: RadialKernel + Clone>(
    kernel: &K,
    bump_center: f64,
    bump_width: f64,
    epsilon: f64,
) -> Result<VariationalReport> {
    require_normalized(kernel)?;
    let bump = Bump { center: bump_center, width: bump_width };
    let (lo, hi) = bump.support();
    if !(bump_width > 0.0) || lo < 0.5 {
        return Err(Error::invalid(format!(
            "bump support [{lo}, {hi}] must lie in r >= 0.5 so that no boundary terms enter"
        )));
    }
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    let plus = PerturbedKernel { base: kernel.clone(), bump, epsilon };
    let minus = PerturbedKernel { base: kernel.clone(), bump, epsilon: -epsilon };
    // Outside the support both integrands coincide with the unperturbed one.
    let quad = Quadrature::with_tolerance(1e-14, 1e-13);
    let breaks = [lo, bump_center, hi];
    let difference = quad
        .integrate_with_breaks(|r| Ok(lagrangian_integrand(&plus, r)? - lagrangian_integrand(&minus, r)?), &breaks)?
        .value;
    let finite_difference = difference / (2.0 * epsilon);
    let model = TwoPoint::new(kernel.clone())?;
    let predicted = quad
        .integrate_with_breaks(|r| Ok(model.psi_prime(r)? * bump.derivatives(r)[0]), &breaks)?
        .value;
    let residual = (finite_difference - predicted).abs();
    Ok(VariationalReport { finite_difference, predicted, residual, relative: residual / predicted.abs() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegendreReport {
    /// -2 pi times the plane integral of C G, i.e. -int psi'(r) G(r) dr.
    pub lhs: f64,
    pub einstein: f64,
    pub lagrangian: f64,
    /// H - L
    pub rhs: f64,
    pub gap: f64,
}

pub fn legendre_check<K: RadialKernel + Clone>(kernel: &K, r_max: f64) -> Result<LegendreReport> {
    legendre_check_with(kernel, r_max, 1.0)
}

/// As [`legendre_check`], with all quadrature tolerances scaled by `tolerance_scale`.
pub fn legendre_check_with<K: RadialKernel + Clone>(kernel: &K, r_max: f64, tolerance_scale: f64) -> Result<LegendreReport> {
    let model = TwoPoint::new(kernel.clone())?;
    let tol = 1e-12 * tolerance_scale;
    let quad = Quadrature::with_tolerance(tol, tol);
    let mut breaks = vec![0.0];
    let mut x = 1.0;
    while x < r_max {
        breaks.push(x);
        x += 1.0;
    }
    breaks.push(r_max);
    let lhs = -quad
        .integrate_with_breaks(|r| Ok(model.psi_prime(r)? * kernel.eval(r, 0)?), &breaks)?
        .value;
    let einstein = quad.integrate_with_breaks(|r| einstein_integrand(kernel, r), &breaks)?.value;
    let lagrangian = quad.integrate_with_breaks(|r| lagrangian_integrand(kernel, r), &breaks)?.value;
    let rhs = einstein - lagrangian;
    Ok(LegendreReport { lhs, einstein, lagrangian, rhs, gap: lhs - rhs })
}

/// Correlation of charges for a vector field of two independent components
/// with covariance G. Returns (C from the arcsin form, C from the potential
/// Omega_im = e_ij e_mn d_j K d_n K differentiated on a Cartesian stencil).
pub fn independent_component_correlation<K: RadialKernel + ?Sized>(g0: f64, kernel: &K, r: f64) -> Result<(f64, f64)> {
    if !(g0 > 0.0) {
        return Err(Error::invalid("G(0) must be positive"));
    }
    if !(r > 0.0) {
        return Err(Error::domain("independent_component_correlation", format!("r = {r}")));
    }
    let arcsin_parts = |rho: f64| -> Result<(f64, f64)> {
        let g = kernel.eval(rho, 0)?;
        let gap = g0 * g0 - g * g;
        if !(gap > 0.0) {
            return Err(Error::domain("arcsin(G/G0)", format!("|G({rho})| = {} >= G(0) = {g0}", g.abs())));
        }
        let g1 = kernel.eval(rho, 1)?;
        let g2 = kernel.eval(rho, 2)?;
        let k1 = g1 / gap.sqrt();
        let k2 = g2 / gap.sqrt() + g * g1 * g1 / gap.powf(1.5);
        Ok((k1, k2))
    };
    let (k1, k2) = arcsin_parts(r)?;
    let c_arcsin = 2.0 * k1 * k2 / r / (4.0 * PI * PI);

    // Omega_im(x) = e_ij e_mn d_jK d_nK, with grad K = K'(|x|) x/|x|.
    let omega = |x: f64, y: f64| -> Result<[[f64; 2]; 2]> {
        let rho = x.hypot(y);
        let (k1, _) = arcsin_parts(rho)?;
        let grad = [k1 * x / rho, k1 * y / rho];
        // e grad = (grad_y, -grad_x)
        let rot = [grad[1], -grad[0]];
        Ok([[rot[0] * rot[0], rot[0] * rot[1]], [rot[1] * rot[0], rot[1] * rot[1]]])
    };
    let h = 0.02f64.min(0.2 * r);
    let component = |i: usize, m: usize| -> Result<f64> {
        if i == m {
            diff::second_derivative(
                |t| {
                    let (x, y) = if i == 0 { (r + t, 0.0) } else { (r, t) };
                    Ok(omega(x, y)?[i][m])
                },
                0.0,
                h,
                4,
            )
        } else {
            diff::derivative(
                |s| diff::derivative(|t| Ok(omega(r + s, t)?[i][m]), 0.0, h, 4),
                0.0,
                h,
                4,
            )
        }
    };
    let divergence = component(0, 0)? + component(1, 1)? + 2.0 * component(0, 1)?;
    let c_generic = -divergence / (4.0 * PI * PI);
    Ok((c_arcsin, c_generic))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{make_gaussian, make_random_wave};

    #[test]
    fn bump_derivatives_match_finite_differences() {
        let bump = Bump { center: 3.0, width: 1.2 };
        for &r in &[2.2, 2.9, 3.4, 4.0] {
            let d = bump.derivatives(r);
            for k in 1..5 {
                let fd = diff::derivative(|x| Ok(bump.derivatives(x)[k - 1]), r, 1e-2, 4).unwrap();
                assert!((d[k] - fd).abs() < 1e-7 * d[k].abs().max(1.0), "k = {k} at {r}: {} vs {fd}", d[k]);
            }
        }
        assert_eq!(bump.derivatives(1.7), [0.0; 5]);
    }

    #[test]
    fn metric_determinant_equals_det_h() {
        for kernel in [make_gaussian(), make_random_wave(2.0).unwrap()] {
            let m = FourMetricEvaluator::new(&kernel);
            for &(dx, dy) in &[(0.5, 0.0), (1.0, 0.7), (-2.0, 1.3), (0.0, 5.0)] {
                let g = m.evaluate([dx, dy], [0.0, 0.0]).unwrap();
                let h = h_matrix(&kernel, [dx, dy]).unwrap();
                assert!((g.determinant() - h.determinant()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn omega_matches_ratio_derivative() {
        for kernel in [make_gaussian(), make_random_wave(2.0).unwrap()] {
            for &r in &[0.7, 1.5, 3.0] {
                let p = curvature_parts(&kernel, r).unwrap();
                let lhs = r * p.omega / p.det_h.sqrt();
                let ratio = |x: f64| {
                    let q = bulk_quantities(&kernel, x)?;
                    Ok(q.d / q.sqrt_d1d2())
                };
                let rhs = diff::derivative(ratio, r, 0.05, 4).unwrap();
                assert!((lhs - rhs).abs() < 1e-8, "{} at {r}: {lhs} vs {rhs}", kernel.label());
            }
        }
    }

    #[test]
    fn flat_far_away() {
        let g = make_gaussian();
        let r = scalar_curvature_fd_plain(&g, [40.0, 0.0], [0.0, 0.0], 1e-3).unwrap();
        assert!(r.abs() < 1e-12);
        assert!(scalar_curvature_closed(&g, 40.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn variational_rejects_support_near_origin() {
        assert!(variational_check(&make_gaussian(), 0.6, 0.5, 1e-4).is_err());
    }
}
