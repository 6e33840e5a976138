//! Surface-of-revolution embedding of the wall metric.
//!
//! The surface X(x, y) = (A cos x, A sin x, B) has induced metric
//! diag(A^2, A'^2 + B'^2). Matching it to the wall metric gives A = sqrt(g_xx)
//! and B' = sqrt(g_yy (1 - f^2/4)). This is real only while |f| < 2.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kernels::RadialKernel;
use crate::quad::Quadrature;
use crate::wallprofile::{charge_density_4pi, integrated_charge, lower_limit, wall_metric};

#[derive(Debug, Clone, PartialEq)]
pub struct RevolutionProfile {
    pub y_samples: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub valid: Vec<bool>,
    /// First sample with |f| >= 2, if any. Meshes stop before it.
    pub truncated_at: Option<f64>,
}

impl RevolutionProfile {
    /// Number of leading samples that belong to the embeddable region.
    pub fn valid_prefix(&self) -> usize {
        self.valid.iter().take_while(|v| **v).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
    /// Heights of the y-gridlines drawn on the surface.
    pub meridian_y: Vec<f64>,
    pub gridline_step: f64,
    /// For each ring of the mesh: its height and the index of its first vertex.
    pub rings: Vec<Ring>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ring {
    pub y: f64,
    pub first_vertex: usize,
    /// 1 for a collapsed ring (cone tip), n_angular otherwise.
    pub len: usize,
}

fn slope_of_b<K: RadialKernel + ?Sized>(kernel: &K, y: f64) -> Result<f64> {
    let m = wall_metric(kernel, y)?;
    let f = integrated_charge(kernel, y)?;
    Ok((m.g_yy * (1.0 - 0.25 * f * f).max(0.0)).sqrt())
}

pub fn embed_profile<K: RadialKernel + ?Sized>(kernel: &K, y_grid: &[f64]) -> Result<RevolutionProfile> {
    if y_grid.is_empty() {
        return Err(Error::invalid("embedding grid is empty"));
    }
    if y_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("embedding grid must be strictly ascending"));
    }
    let lower = lower_limit(kernel);
    let smooth_wall = kernel.domain_min() == 0.0;
    let n = y_grid.len();
    let mut a = vec![0.0; n];
    let mut valid = vec![false; n];
    for (i, &y) in y_grid.iter().enumerate() {
        if y == 0.0 && smooth_wall {
            // The wall itself: the ring collapses and f tends to -1 there.
            valid[i] = true;
            continue;
        }
        if y < lower || y <= 0.0 {
            return Err(Error::Cutoff { r: 2.0 * y, cutoff: kernel.domain_min() });
        }
        let m = wall_metric(kernel, y)?;
        let f = integrated_charge(kernel, y)?;
        a[i] = m.g_xx.sqrt();
        valid[i] = f.abs() < 2.0;
    }
    let prefix = valid.iter().take_while(|v| **v).count();
    if prefix == 0 {
        return Err(Error::EmbeddingImpossible(format!(
            "|f| >= 2 at the first sample y = {}",
            y_grid[0]
        )));
    }
    let truncated_at = (prefix < n).then(|| y_grid[prefix]);
    let quad = Quadrature::with_tolerance(1e-13, 1e-12);
    let mut b = vec![0.0; n];
    let mut current = if smooth_wall && y_grid[0] > 0.0 {
        quad.integrate(|t| slope_of_b(kernel, t), 0.0, y_grid[0])?.value
    } else {
        0.0
    };
    b[0] = current;
    for i in 1..n {
        if i < prefix {
            current += quad.integrate(|t| slope_of_b(kernel, t), y_grid[i - 1], y_grid[i])?.value;
        }
        b[i] = current;
    }
    Ok(RevolutionProfile { y_samples: y_grid.to_vec(), a, b, valid, truncated_at })
}

/// Gaussian curvature times two: R(y) = f'(y) / sqrt(g_xx g_yy).
pub fn curvature_profile<K: RadialKernel + ?Sized>(kernel: &K, y: f64) -> Result<f64> {
    let m = wall_metric(kernel, y)?;
    Ok(charge_density_4pi(kernel, y)? / m.det().sqrt())
}

pub fn tessellate(profile: &RevolutionProfile, n_angular: usize, gridline_step: f64) -> Result<TriangleMesh> {
    if n_angular < 3 {
        return Err(Error::invalid(format!("n_angular = {n_angular} must be at least 3")));
    }
    if !(gridline_step > 0.0) || !gridline_step.is_finite() {
        return Err(Error::invalid(format!("gridline step {gridline_step} must be positive")));
    }
    let count = profile.valid_prefix();
    if count < 2 {
        return Err(Error::EmbeddingImpossible("fewer than two valid samples".into()));
    }
    let angles: Vec<(f64, f64)> =
        (0..n_angular).map(|k| (2.0 * PI * k as f64 / n_angular as f64).sin_cos()).collect();
    let mut vertices = Vec::new();
    let mut rings = Vec::with_capacity(count);
    for i in 0..count {
        let (a, b) = (profile.a[i], profile.b[i]);
        let first_vertex = vertices.len();
        if a == 0.0 {
            vertices.push([0.0, 0.0, b]);
            rings.push(Ring { y: profile.y_samples[i], first_vertex, len: 1 });
        } else {
            vertices.extend(angles.iter().map(|&(s, c)| [a * c, a * s, b]));
            rings.push(Ring { y: profile.y_samples[i], first_vertex, len: n_angular });
        }
    }
    let mut triangles = Vec::new();
    for pair in rings.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        match (lo.len, hi.len) {
            (1, 1) => {}
            (1, n) => {
                for k in 0..n {
                    triangles.push([lo.first_vertex, hi.first_vertex + k, hi.first_vertex + (k + 1) % n]);
                }
            }
            (n, 1) => {
                for k in 0..n {
                    triangles.push([lo.first_vertex + k, hi.first_vertex, lo.first_vertex + (k + 1) % n]);
                }
            }
            (n, _) => {
                for k in 0..n {
                    let a = lo.first_vertex + k;
                    let b = lo.first_vertex + (k + 1) % n;
                    let c = hi.first_vertex + k;
                    let d = hi.first_vertex + (k + 1) % n;
                    triangles.push([a, b, d]);
                    triangles.push([a, d, c]);
                }
            }
        }
    }
    let y_first = profile.y_samples[0];
    let y_last = profile.y_samples[count - 1];
    let tol = 1e-9 * gridline_step;
    let first_index = (y_first / gridline_step - 1e-9).ceil() as i64;
    let meridian_y = (first_index..)
        .map(|k| k as f64 * gridline_step)
        .take_while(|y| *y <= y_last + tol)
        .collect();
    Ok(TriangleMesh { vertices, triangles, meridian_y, gridline_step, rings })
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// Angle deficit divided by one third of the incident triangle area, per vertex.
/// Vertices on the mesh boundary get `None`.
pub fn discrete_gaussian_curvature(mesh: &TriangleMesh) -> Vec<Option<f64>> {
    let n = mesh.vertices.len();
    let mut angle_sum = vec![0.0; n];
    let mut area = vec![0.0; n];
    // Each interior edge is shared by two triangles; boundary edges by one.
    let mut edge_count = std::collections::HashMap::new();
    for t in &mesh.triangles {
        let p = [mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]];
        let tri_area = 0.5 * norm(cross(sub(p[1], p[0]), sub(p[2], p[0])));
        for j in 0..3 {
            let u = sub(p[(j + 1) % 3], p[j]);
            let v = sub(p[(j + 2) % 3], p[j]);
            angle_sum[t[j]] += norm(cross(u, v)).atan2(dot(u, v));
            area[t[j]] += tri_area / 3.0;
            let (a, b) = (t[j].min(t[(j + 1) % 3]), t[j].max(t[(j + 1) % 3]));
            *edge_count.entry((a, b)).or_insert(0usize) += 1;
        }
    }
    let mut boundary = vec![false; n];
    for (&(a, b), &count) in &edge_count {
        if count == 1 {
            boundary[a] = true;
            boundary[b] = true;
        }
    }
    (0..n)
        .map(|i| {
            if boundary[i] || area[i] == 0.0 {
                None
            } else {
                Some((2.0 * PI - angle_sum[i]) / area[i])
            }
        })
        .collect()
}
