//! Monte Carlo random-wave fields and empirical estimators.
//!
//! A realization is phi(r) = amplitude * sqrt(2/N) * sum_n cos(k_n . r + theta_n)
//! with unit wave vectors. Its covariance is J0, so -G''(0) = 1/2. Extremum
//! positions do not depend on the amplitude, so the empirical charge statistics
//! are compared with analytic results for the normalized kernel 2 J0.
//!
//! Each realization draws from its own ChaCha stream, and realizations are
//! reduced in index order, so results do not depend on the worker count.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Rect> {
        if !(x1 > x0 && y1 > y0) || ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) {
            return Err(Error::invalid(format!("rectangle [{x0}, {x1}] x [{y0}, {y1}] has no area")));
        }
        Ok(Rect { x0, x1, y0, y1 })
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.x0 && p[0] <= self.x1 && p[1] >= self.y0 && p[1] <= self.y1
    }

    /// Shrink by `dx` on the left and right, `dy_low` at the bottom and `dy_high` at the top.
    pub fn shrink(&self, dx: f64, dy_low: f64, dy_high: f64) -> Result<Rect> {
        Rect::new(self.x0 + dx, self.x1 - dx, self.y0 + dy_low, self.y1 - dy_high)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveEnsembleSpec {
    pub n_waves: usize,
    pub n_realizations: usize,
    pub seed: u64,
    pub domain: Rect,
    /// Coarse seeding grid (points per axis).
    pub grid: (usize, usize),
    /// Antisymmetrize about y = 0 so that phi vanishes on the x-axis.
    pub half_space: bool,
    /// Newton stops once |grad phi| / amplitude falls below this.
    pub newton_tol: f64,
    /// Extrema closer than this to an open side of the domain are dropped.
    pub edge_margin: f64,
}

impl WaveEnsembleSpec {
    /// 40 x 40 domain, 256 waves, 0.2 grid spacing.
    pub fn standard(n_realizations: usize, seed: u64, half_space: bool) -> Self {
        WaveEnsembleSpec {
            n_waves: 256,
            n_realizations,
            seed,
            domain: Rect { x0: 0.0, x1: 40.0, y0: 0.0, y1: 40.0 },
            grid: (201, 201),
            half_space,
            newton_tol: 1e-10,
            edge_margin: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_waves < 64 {
            return Err(Error::invalid(format!("n_waves = {} must be at least 64", self.n_waves)));
        }
        if self.n_realizations == 0 {
            return Err(Error::invalid("n_realizations must be positive"));
        }
        Rect::new(self.domain.x0, self.domain.x1, self.domain.y0, self.domain.y1)?;
        if self.grid.0 < 32 || self.grid.1 < 32 {
            return Err(Error::invalid(format!("grid {:?} is below 32 x 32", self.grid)));
        }
        let (hx, hy) = self.spacing();
        if hx.max(hy) >= PI / 4.0 {
            return Err(Error::invalid(format!("grid spacing {:.3} must stay below pi/4", hx.max(hy))));
        }
        if !(self.newton_tol > 0.0) {
            return Err(Error::invalid("newton_tol must be positive"));
        }
        if !(self.edge_margin >= 0.0) || 2.0 * self.edge_margin >= self.domain.width().min(self.domain.height()) {
            return Err(Error::invalid(format!("edge margin {} does not fit the domain", self.edge_margin)));
        }
        Ok(())
    }

    pub fn spacing(&self) -> (f64, f64) {
        (
            self.domain.width() / (self.grid.0 - 1) as f64,
            self.domain.height() / (self.grid.1 - 1) as f64,
        )
    }

    /// Region in which located extrema are kept. The wall side is not trimmed.
    pub fn retained_region(&self) -> Rect {
        let m = self.edge_margin;
        let bottom = if self.half_space { 0.0 } else { m };
        Rect {
            x0: self.domain.x0 + m,
            x1: self.domain.x1 - m,
            y0: self.domain.y0 + bottom,
            y1: self.domain.y1 - m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wave {
    pub kx: f64,
    pub ky: f64,
    pub phase: f64,
    /// Prefactor including sqrt(2/N), the amplitude and the mirror sign.
    pub coefficient: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub value: f64,
    pub gradient: [f64; 2],
    /// [phi_xx, phi_xy, phi_yy]
    pub hessian: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldRealization {
    pub waves: Vec<Wave>,
    pub amplitude: f64,
    pub half_space: bool,
}

pub fn sample_realization(spec: &WaveEnsembleSpec, realization_index: u64) -> FieldRealization {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(realization_index);
    let n = spec.n_waves;
    let base = (2.0 / n as f64).sqrt();
    let mut waves = Vec::with_capacity(if spec.half_space { 2 * n } else { n });
    for _ in 0..n {
        let angle: f64 = rng.gen_range(0.0..TAU);
        let phase: f64 = rng.gen_range(0.0..TAU);
        let (ky, kx) = angle.sin_cos();
        waves.push(Wave { kx, ky, phase, coefficient: base });
    }
    if spec.half_space {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..n {
            let w = waves[i];
            waves[i].coefficient = w.coefficient * s;
            waves.push(Wave { kx: w.kx, ky: -w.ky, phase: w.phase, coefficient: -w.coefficient * s });
        }
    }
    FieldRealization { waves, amplitude: 1.0, half_space: spec.half_space }
}

impl FieldRealization {
    /// The same realization multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> FieldRealization {
        FieldRealization {
            waves: self.waves.iter().map(|w| Wave { coefficient: w.coefficient * factor, ..*w }).collect(),
            amplitude: self.amplitude * factor,
            half_space: self.half_space,
        }
    }

    pub fn value(&self, p: [f64; 2]) -> f64 {
        self.waves
            .iter()
            .map(|w| w.coefficient * (w.kx * p[0] + w.ky * p[1] + w.phase).cos())
            .sum()
    }

    pub fn sample(&self, p: [f64; 2]) -> FieldSample {
        let mut s = FieldSample { value: 0.0, gradient: [0.0; 2], hessian: [0.0; 3] };
        for w in &self.waves {
            let (sn, cs) = (w.kx * p[0] + w.ky * p[1] + w.phase).sin_cos();
            let (a, b) = (w.coefficient * cs, w.coefficient * sn);
            s.value += a;
            s.gradient[0] -= w.kx * b;
            s.gradient[1] -= w.ky * b;
            s.hessian[0] -= w.kx * w.kx * a;
            s.hessian[1] -= w.kx * w.ky * a;
            s.hessian[2] -= w.ky * w.ky * a;
        }
        s
    }

    /// Gradient on a tensor grid, as (d_x phi, d_y phi) matrices indexed [ix, iy].
    pub fn gradient_grid(&self, xs: &[f64], ys: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
        // sin(a + b) = sin a cos b + cos a sin b with a = kx x, b = ky y + phase
        let n = self.waves.len();
        let sx = DMatrix::from_fn(xs.len(), n, |i, k| (self.waves[k].kx * xs[i]).sin());
        let cx = DMatrix::from_fn(xs.len(), n, |i, k| (self.waves[k].kx * xs[i]).cos());
        let mut cy_x = DMatrix::zeros(n, ys.len());
        let mut sy_x = DMatrix::zeros(n, ys.len());
        let mut cy_y = DMatrix::zeros(n, ys.len());
        let mut sy_y = DMatrix::zeros(n, ys.len());
        for (k, w) in self.waves.iter().enumerate() {
            for (j, &y) in ys.iter().enumerate() {
                let (sn, cs) = (w.ky * y + w.phase).sin_cos();
                cy_x[(k, j)] = -w.coefficient * w.kx * cs;
                sy_x[(k, j)] = -w.coefficient * w.kx * sn;
                cy_y[(k, j)] = -w.coefficient * w.ky * cs;
                sy_y[(k, j)] = -w.coefficient * w.ky * sn;
            }
        }
        let gx = &sx * &cy_x + &cx * &sy_x;
        let gy = &sx * &cy_y + &cx * &sy_y;
        (gx, gy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremumRecord {
    pub position: [f64; 2],
    pub charge: i8,
    pub hessian_det: f64,
    pub refine_iterations: u32,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchDiagnostics {
    pub seeded_cells: usize,
    pub converged: usize,
    pub failed: usize,
    pub duplicates: usize,
    /// Converged outside the search region, or onto the wall line.
    pub rejected: usize,
}

impl SearchDiagnostics {
    /// Fraction of Newton runs that converged. Seeds skipped because their
    /// cell already holds a located point do not count as runs.
    pub fn convergence_rate(&self) -> f64 {
        let runs = self.converged + self.failed;
        if runs == 0 {
            1.0
        } else {
            self.converged as f64 / runs as f64
        }
    }

    fn absorb(&mut self, other: &SearchDiagnostics) {
        self.seeded_cells += other.seeded_cells;
        self.converged += other.converged;
        self.failed += other.failed;
        self.duplicates += other.duplicates;
        self.rejected += other.rejected;
    }
}

const MAX_NEWTON: u32 = 50;
const MAX_NEWTON_STEP: f64 = 0.5;
const DEDUP_RADIUS: f64 = 1e-6;
/// Critical points closer than this to y = 0 lie on the wall of a half-space field.
const WALL_TOLERANCE: f64 = 1e-6;

fn newton(field: &FieldRealization, start: [f64; 2], tol: f64) -> Option<(ExtremumRecord, u32)> {
    let mut p = start;
    let mut s = field.sample(p);
    for it in 0..=MAX_NEWTON {
        let [hxx, hxy, hyy] = s.hessian;
        let det = hxx * hyy - hxy * hxy;
        let g = s.gradient;
        let norm = g[0].hypot(g[1]);
        if norm / field.amplitude.abs() < tol {
            if det == 0.0 {
                return None;
            }
            let charge = if det > 0.0 { 1 } else { -1 };
            return Some((ExtremumRecord { position: p, charge, hessian_det: det, refine_iterations: it }, it));
        }
        if it == MAX_NEWTON || det == 0.0 || !det.is_finite() {
            return None;
        }
        let mut dx = (hyy * g[0] - hxy * g[1]) / det;
        let mut dy = (hxx * g[1] - hxy * g[0]) / det;
        let len = dx.hypot(dy);
        if len > MAX_NEWTON_STEP {
            dx *= MAX_NEWTON_STEP / len;
            dy *= MAX_NEWTON_STEP / len;
        }
        p = [p[0] - dx, p[1] - dy];
        s = field.sample(p);
    }
    None
}

fn changes_sign(values: [f64; 4]) -> bool {
    values.iter().any(|v| *v > 0.0) && values.iter().any(|v| *v < 0.0)
}

/// Locate the critical points of `field` inside `region`.
///
/// Every cell of an `nx` x `ny` grid over the region in which both gradient
/// components change sign seeds a Newton iteration from its centre.
pub fn find_extrema(
    field: &FieldRealization,
    region: Rect,
    coarse_grid: (usize, usize),
    newton_tol: f64,
) -> Result<(Vec<ExtremumRecord>, SearchDiagnostics)> {
    let (nx, ny) = coarse_grid;
    if nx < 2 || ny < 2 {
        return Err(Error::invalid("coarse grid needs at least two points per axis"));
    }
    let hx = region.width() / (nx - 1) as f64;
    let hy = region.height() / (ny - 1) as f64;
    if hx.max(hy) >= PI / 4.0 {
        return Err(Error::invalid(format!("grid spacing {:.3} must stay below pi/4", hx.max(hy))));
    }
    let xs: Vec<f64> = (0..nx).map(|i| region.x0 + hx * i as f64).collect();
    let ys: Vec<f64> = (0..ny).map(|j| region.y0 + hy * j as f64).collect();
    let (gx, gy) = field.gradient_grid(&xs, &ys);
    let mut diag = SearchDiagnostics::default();
    let mut found: Vec<ExtremumRecord> = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let corners = |m: &DMatrix<f64>| [m[(i, j)], m[(i + 1, j)], m[(i, j + 1)], m[(i + 1, j + 1)]];
            if !(changes_sign(corners(&gx)) && changes_sign(corners(&gy))) {
                continue;
            }
            diag.seeded_cells += 1;
            let (cx0, cx1, cy0, cy1) = (xs[i], xs[i + 1], ys[j], ys[j + 1]);
            let known = found.iter().any(|e| {
                e.position[0] >= cx0 && e.position[0] <= cx1 && e.position[1] >= cy0 && e.position[1] <= cy1
            });
            if known {
                // A neighbouring seed already converged into this cell.
                diag.duplicates += 1;
                continue;
            }
            let start = [xs[i] + 0.5 * hx, ys[j] + 0.5 * hy];
            let Some((rec, _)) = newton(field, start, newton_tol) else {
                diag.failed += 1;
                continue;
            };
            diag.converged += 1;
            if !region.contains(rec.position) || (field.half_space && rec.position[1].abs() < WALL_TOLERANCE) {
                diag.rejected += 1;
                continue;
            }
            let duplicate = found.iter().any(|e| {
                (e.position[0] - rec.position[0]).hypot(e.position[1] - rec.position[1]) < DEDUP_RADIUS
            });
            if duplicate {
                diag.duplicates += 1;
            } else {
                found.push(rec);
            }
        }
    }
    Ok((found, diag))
}

/// A thread pool of fixed size for the parallel estimators.
pub struct WorkerPool(rayon::ThreadPool);

impl WorkerPool {
    pub fn new(workers: usize) -> Result<WorkerPool> {
        if workers == 0 {
            return Err(Error::invalid("workers must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map(WorkerPool)
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))
    }

    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        self.0.install(f)
    }
}

/// Binned means with standard errors taken across realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorOutput {
    pub bin_centers: Vec<f64>,
    pub means: Vec<f64>,
    pub standard_errors: Vec<f64>,
    /// Number of realizations entering each mean.
    pub n_samples: Vec<usize>,
    /// Bins in which no extremum was ever counted.
    pub empty: Vec<bool>,
}

impl EstimatorOutput {
    fn from_samples(bin_centers: Vec<f64>, samples: &[Vec<f64>], hits: &[usize]) -> EstimatorOutput {
        let nbins = bin_centers.len();
        let n = samples.len();
        let mut means = vec![0.0; nbins];
        let mut standard_errors = vec![0.0; nbins];
        for b in 0..nbins {
            let mean = samples.iter().map(|s| s[b]).sum::<f64>() / n as f64;
            let var = if n > 1 {
                samples.iter().map(|s| (s[b] - mean).powi(2)).sum::<f64>() / (n - 1) as f64
            } else {
                f64::NAN
            };
            means[b] = mean;
            standard_errors[b] = (var / n as f64).sqrt();
        }
        EstimatorOutput {
            bin_centers,
            means,
            standard_errors,
            n_samples: vec![n; nbins],
            empty: hits.iter().map(|h| *h == 0).collect(),
        }
    }
}

/// Extrema of every realization of an ensemble, in realization order.
#[derive(Debug, Clone)]
pub struct Ensemble {
    pub spec: WaveEnsembleSpec,
    pub extrema: Vec<Vec<ExtremumRecord>>,
    pub diagnostics: SearchDiagnostics,
}

impl Ensemble {
    /// Simulate on the current rayon pool.
    pub fn simulate(spec: &WaveEnsembleSpec) -> Result<Ensemble> {
        spec.validate()?;
        let mut search = spec.domain;
        if spec.half_space {
            // phi_x vanishes identically on the wall; start the seeding grid just above it.
            search.y0 += 1e-3 * spec.spacing().1;
        }
        let region = spec.retained_region();
        let per_realization: Vec<Result<(Vec<ExtremumRecord>, SearchDiagnostics)>> = (0..spec.n_realizations as u64)
            .into_par_iter()
            .map(|idx| {
                let field = sample_realization(spec, idx);
                let (found, diag) = find_extrema(&field, search, spec.grid, spec.newton_tol)?;
                Ok((found.into_iter().filter(|e| region.contains(e.position)).collect(), diag))
            })
            .collect();
        let mut extrema = Vec::with_capacity(spec.n_realizations);
        let mut diagnostics = SearchDiagnostics::default();
        for item in per_realization {
            let (found, diag) = item?;
            diagnostics.absorb(&diag);
            extrema.push(found);
        }
        Ok(Ensemble { spec: spec.clone(), extrema, diagnostics })
    }

    /// Simulate with a dedicated pool of `workers` threads.
    pub fn simulate_with_workers(spec: &WaveEnsembleSpec, workers: usize) -> Result<Ensemble> {
        WorkerPool::new(workers)?.install(|| Ensemble::simulate(spec))
    }

    /// Signed and unsigned number of extrema per unit area in the retained region.
    pub fn bulk_density(&self) -> (EstimatorOutput, EstimatorOutput) {
        let area = self.spec.retained_region().area();
        let signed: Vec<Vec<f64>> = self
            .extrema
            .iter()
            .map(|ex| vec![ex.iter().map(|e| e.charge as f64).sum::<f64>() / area])
            .collect();
        let unsigned: Vec<Vec<f64>> = self.extrema.iter().map(|ex| vec![ex.len() as f64 / area]).collect();
        let total: usize = self.extrema.iter().map(Vec::len).sum();
        (
            EstimatorOutput::from_samples(vec![0.0], &signed, &[total]),
            EstimatorOutput::from_samples(vec![0.0], &unsigned, &[total]),
        )
    }

    /// Signed charge per unit area in bins of distance from the wall.
    pub fn wall_profile(&self, y_edges: &[f64]) -> Result<EstimatorOutput> {
        if !self.spec.half_space {
            return Err(Error::invalid("wall profile needs a half-space ensemble"));
        }
        check_edges(y_edges)?;
        let region = self.spec.retained_region();
        if y_edges[0] < region.y0 || y_edges[y_edges.len() - 1] > region.y1 {
            return Err(Error::Geometry(format!("bins exceed the retained region y in [{}, {}]", region.y0, region.y1)));
        }
        let nb = y_edges.len() - 1;
        let mut hits = vec![0usize; nb];
        let samples: Vec<Vec<f64>> = self
            .extrema
            .iter()
            .map(|ex| {
                let mut counts = vec![0.0; nb];
                for e in ex {
                    if let Some(b) = locate(y_edges, e.position[1]) {
                        counts[b] += e.charge as f64;
                        hits[b] += 1;
                    }
                }
                for b in 0..nb {
                    counts[b] /= region.width() * (y_edges[b + 1] - y_edges[b]);
                }
                counts
            })
            .collect();
        Ok(EstimatorOutput::from_samples(centers(y_edges), &samples, &hits))
    }

    /// C(r) from charge-weighted pair counts in annuli. Only extrema at least
    /// `r_max` inside the retained region serve as centres, so every annulus
    /// lies fully in the sampled area.
    pub fn pair_correlation(&self, r_edges: &[f64]) -> Result<EstimatorOutput> {
        if self.spec.half_space {
            return Err(Error::invalid("pair correlation needs a bulk ensemble"));
        }
        check_edges(r_edges)?;
        let r_max = r_edges[r_edges.len() - 1];
        let region = self.spec.retained_region();
        if r_edges[0] < 0.0 || 3.0 * r_max > region.width().min(region.height()) {
            return Err(Error::Geometry(format!("r_max = {r_max} exceeds a third of the domain")));
        }
        let inner = region.shrink(r_max, r_max, r_max)?;
        let nb = r_edges.len() - 1;
        let annulus: Vec<f64> = (0..nb).map(|b| PI * (r_edges[b + 1].powi(2) - r_edges[b].powi(2))).collect();
        let mut hits = vec![0usize; nb];
        let samples: Vec<Vec<f64>> = self
            .extrema
            .iter()
            .map(|ex| {
                let mut sums = vec![0.0; nb];
                for (i, a) in ex.iter().enumerate() {
                    if !inner.contains(a.position) {
                        continue;
                    }
                    for (j, b) in ex.iter().enumerate() {
                        if i == j {
                            continue;
                        }
                        let d = (a.position[0] - b.position[0]).hypot(a.position[1] - b.position[1]);
                        if let Some(k) = locate(r_edges, d) {
                            sums[k] += (a.charge * b.charge) as f64;
                            hits[k] += 1;
                        }
                    }
                }
                (0..nb).map(|k| sums[k] / (inner.area() * annulus[k])).collect()
            })
            .collect();
        Ok(EstimatorOutput::from_samples(centers(r_edges), &samples, &hits))
    }
}

fn check_edges(edges: &[f64]) -> Result<()> {
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("bin edges must be strictly ascending with at least two entries"));
    }
    Ok(())
}

fn centers(edges: &[f64]) -> Vec<f64> {
    edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}

fn locate(edges: &[f64], x: f64) -> Option<usize> {
    if x < edges[0] || x >= edges[edges.len() - 1] {
        return None;
    }
    Some(edges.partition_point(|e| *e <= x) - 1)
}

pub fn estimate_wall_profile(spec: &WaveEnsembleSpec, y_edges: &[f64]) -> Result<EstimatorOutput> {
    if !spec.half_space {
        return Err(Error::invalid("wall profile needs half_space = true"));
    }
    if spec.domain.height() < 8.0 {
        return Err(Error::Geometry(format!("domain height {} is below 8", spec.domain.height())));
    }
    Ensemble::simulate(spec)?.wall_profile(y_edges)
}

pub fn estimate_pair_correlation(spec: &WaveEnsembleSpec, r_edges: &[f64]) -> Result<EstimatorOutput> {
    Ensemble::simulate(spec)?.pair_correlation(r_edges)
}

/// Empirical covariance phi(p) phi(p + r e) averaged over base points and the
/// two axis directions. For a half-space ensemble the base points sit at
/// height `base_height` and the displacement is along the wall.
pub fn estimate_kernel(spec: &WaveEnsembleSpec, radii: &[f64], base_height: f64) -> Result<EstimatorOutput> {
    spec.validate()?;
    if radii.iter().any(|r| !(*r >= 0.0)) {
        return Err(Error::invalid("radii must be non-negative"));
    }
    let d = spec.domain;
    let r_max = radii.iter().cloned().fold(0.0, f64::max);
    let bases: Vec<[f64; 2]> = if spec.half_space {
        (0..16).map(|i| [d.x0 + (d.width() - r_max) * (i as f64 + 0.5) / 16.0, base_height]).collect()
    } else {
        let m = 6;
        let mut v = Vec::new();
        for i in 0..m {
            for j in 0..m {
                v.push([
                    d.x0 + (d.width() - r_max) * (i as f64 + 0.5) / m as f64,
                    d.y0 + (d.height() - r_max) * (j as f64 + 0.5) / m as f64,
                ]);
            }
        }
        v
    };
    let samples: Vec<Vec<f64>> = (0..spec.n_realizations as u64)
        .into_par_iter()
        .map(|idx| {
            let field = sample_realization(spec, idx);
            radii
                .iter()
                .map(|&r| {
                    let mut acc = 0.0;
                    let mut count = 0.0;
                    for p in &bases {
                        let v0 = field.value(*p);
                        acc += v0 * field.value([p[0] + r, p[1]]);
                        count += 1.0;
                        if !spec.half_space {
                            acc += v0 * field.value([p[0], p[1] + r]);
                            count += 1.0;
                        }
                    }
                    acc / count
                })
                .collect()
        })
        .collect();
    let hits = vec![bases.len(); radii.len()];
    Ok(EstimatorOutput::from_samples(radii.to_vec(), &samples, &hits))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cos_plus_cos() -> FieldRealization {
        // cos(x) + cos(y)
        let w = |kx: f64, ky: f64| Wave { kx, ky, phase: 0.0, coefficient: 1.0 };
        FieldRealization { waves: vec![w(1.0, 0.0), w(0.0, 1.0)], amplitude: 1.0, half_space: false }
    }

    #[test]
    fn separable_test_field() {
        let field = cos_plus_cos();
        let region = Rect::new(-0.5, 4.0 * PI - 0.5, -0.5, 4.0 * PI - 0.5).unwrap();
        let (found, diag) = find_extrema(&field, region, (120, 120), 1e-12).unwrap();
        assert_eq!(diag.failed, 0);
        // extrema at (m pi, n pi) and saddles of the same lattice: 4 x 4 points
        assert_eq!(found.len(), 16);
        for e in &found {
            let m = (e.position[0] / PI).round();
            let n = (e.position[1] / PI).round();
            assert!((e.position[0] - m * PI).abs() < 1e-10 && (e.position[1] - n * PI).abs() < 1e-10);
            let expected = if (m + n) as i64 % 2 == 0 { 1 } else { -1 };
            assert_eq!(e.charge, expected);
        }
        assert_eq!(found.iter().map(|e| e.charge as i32).sum::<i32>(), 0);
    }

    #[test]
    fn grid_gradient_matches_pointwise() {
        let spec = WaveEnsembleSpec { half_space: true, ..WaveEnsembleSpec::standard(1, 9, true) };
        let f = sample_realization(&spec, 3);
        let xs = [0.1, 2.5, 7.0];
        let ys = [0.0, 1.3];
        let (gx, gy) = f.gradient_grid(&xs, &ys);
        for (i, &x) in xs.iter().enumerate() {
            for (j, &y) in ys.iter().enumerate() {
                let s = f.sample([x, y]);
                assert!((gx[(i, j)] - s.gradient[0]).abs() < 1e-12);
                assert!((gy[(i, j)] - s.gradient[1]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn half_space_vanishes_on_wall() {
        let spec = WaveEnsembleSpec::standard(1, 4, true);
        let f = sample_realization(&spec, 0);
        for x in [0.0, 1.7, 13.3, 39.0] {
            assert!(f.value([x, 0.0]).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_wave_vectors_and_streams() {
        let spec = WaveEnsembleSpec::standard(2, 11, false);
        let a = sample_realization(&spec, 0);
        let b = sample_realization(&spec, 1);
        assert!(a.waves.iter().all(|w| (w.kx.hypot(w.ky) - 1.0).abs() < 1e-15));
        assert_ne!(a, b);
        assert_eq!(a, sample_realization(&spec, 0));
    }

    #[test]
    fn locate_bins() {
        let e = [0.0, 0.5, 1.0];
        assert_eq!(locate(&e, 0.0), Some(0));
        assert_eq!(locate(&e, 0.5), Some(1));
        assert_eq!(locate(&e, 1.0), None);
        assert_eq!(locate(&e, -0.1), None);
    }

    #[test]
    fn spec_validation() {
        let mut s = WaveEnsembleSpec::standard(1, 0, false);
        assert!(s.validate().is_ok());
        s.n_waves = 10;
        assert!(s.validate().is_err());
        let mut s = WaveEnsembleSpec::standard(1, 0, false);
        s.grid = (20, 20);
        assert!(s.validate().is_err());
        let mut s = WaveEnsembleSpec::standard(1, 0, false);
        s.grid = (40, 40);
        assert!(s.validate().is_err());
    }
}
