//! Argument handling and subcommand dispatch for the `extrema` binary.

use std::collections::HashMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use extrema_core::actions::{self, curvature_report};
use extrema_core::embedding::{curvature_profile, embed_profile, tessellate};
use extrema_core::io::{format_f64, write_csv, write_obj, Table};
use extrema_core::kernels::{KernelConfig, KernelKind, RadialKernel};
use extrema_core::mcfield::{estimate_kernel, Ensemble, EstimatorOutput, Rect, WaveEnsembleSpec, WorkerPool};
use extrema_core::twopoint::{absolute_density, absolute_density_oracle, sum_rule_check, TwoPoint};
use extrema_core::wallprofile::{charge_density_4pi, integrated_charge, lower_limit, wall_metric};
use extrema_core::{Error, Result};

/// Environment variable naming the directory for outputs without an explicit path.
pub const OUT_DIR_ENV: &str = "EXTREMA_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "extrema", version, about = "Signed density and correlations of extremal points of Gaussian random fields")]
pub struct Cli {
    /// key = value file supplying defaults for any long option
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Integrated charge f(y) and charge density next to a Dirichlet wall
    WallProfile(WallArgs),
    /// Two-point potential psi(r) and charge correlation C(r)
    TwoPoint(TwoPointArgs),
    /// Surface-of-revolution mesh (OBJ) and its profile curve (CSV)
    Embed(EmbedArgs),
    /// Scalar curvature of the wall metric or of the two-point manifold
    Curvature(CurvatureArgs),
    /// Run numerical self-checks and print a pass/fail table
    Verify(VerifyArgs),
    /// Monte Carlo estimators from random-wave realizations
    Mc(McArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct KernelArgs {
    /// random-wave, membrane or gaussian
    #[arg(long)]
    pub kernel: Option<String>,
    #[arg(long)]
    pub amplitude: Option<f64>,
    /// Membrane tension parameter B
    #[arg(long)]
    pub b: Option<f64>,
    /// Membrane short-distance cutoff a
    #[arg(long)]
    pub cutoff: Option<f64>,
}

#[derive(Args, Debug)]
pub struct WallArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(long)]
    pub y_min: Option<f64>,
    #[arg(long)]
    pub y_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TwoPointArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(long)]
    pub r_min: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Below this radius the small-r series replaces the closed form
    #[arg(long)]
    pub r_switch: Option<f64>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EmbedArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(long)]
    pub y_max: Option<f64>,
    /// Spacing of the y-gridlines recorded on the surface
    #[arg(long)]
    pub meridian_step: Option<f64>,
    /// Number of rings (y samples)
    #[arg(long)]
    pub rings: Option<usize>,
    #[arg(long)]
    pub n_angular: Option<usize>,
    /// OBJ file
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// CSV with the profile curve A(y), B(y)
    #[arg(long)]
    pub contour: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Manifold {
    Wall,
    TwoPoint,
}

#[derive(Args, Debug)]
pub struct CurvatureArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(long, value_enum)]
    pub manifold: Option<Manifold>,
    /// Start of the y (wall) or r (two-point) range
    #[arg(long)]
    pub min: Option<f64>,
    #[arg(long)]
    pub max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Finite-difference step of the Riemann oracle
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    SumRule,
    Variational,
    CurvatureOracle,
    Legendre,
    Density,
    All,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(long, value_enum)]
    pub suite: Option<Suite>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Estimator {
    Kernel,
    Wall,
    Pair,
    Density,
}

#[derive(Args, Debug)]
pub struct McArgs {
    #[arg(long, value_enum)]
    pub estimator: Option<Estimator>,
    #[arg(long)]
    pub realizations: Option<usize>,
    #[arg(long)]
    pub waves: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Side length of the square domain
    #[arg(long)]
    pub domain: Option<f64>,
    #[arg(long)]
    pub grid_spacing: Option<f64>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Upper edge of the last bin
    #[arg(long)]
    pub max: Option<f64>,
    #[arg(long)]
    pub bin_width: Option<f64>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Values read from a `key = value` file. Blank lines and `#` comments are ignored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    values: HashMap<String, String>,
    path: PathBuf,
}

impl ConfigFile {
    pub fn parse(path: &Path, text: &str) -> Result<ConfigFile> {
        let mut values = HashMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Parse { path: path.to_path_buf(), line: n + 1, detail: format!("expected key = value, got '{line}'") });
            };
            values.insert(k.trim().replace('_', "-"), v.trim().to_string());
        }
        Ok(ConfigFile { values, path: path.to_path_buf() })
    }

    pub fn load(path: &Path) -> Result<ConfigFile> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        ConfigFile::parse(path, &text)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v.parse::<T>().map(Some).map_err(|e| Error::Parse {
                path: self.path.clone(),
                line: 0,
                detail: format!("{key} = {v}: {e}"),
            }),
        }
    }
}

/// flag, then config file, then default.
fn pick<T: FromStr>(flag: Option<T>, cfg: &ConfigFile, key: &str, default: T) -> Result<T>
where
    T::Err: Display,
{
    match flag {
        Some(v) => Ok(v),
        None => Ok(cfg.get(key)?.unwrap_or(default)),
    }
}

fn pick_enum<T: ValueEnum>(flag: Option<T>, cfg: &ConfigFile, key: &str, default: T) -> Result<T> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match cfg.get::<String>(key)? {
        None => Ok(default),
        Some(s) => T::from_str(&s, true).map_err(|e| Error::InvalidParameter(format!("{key}: {e}"))),
    }
}

fn pick_opt<T: FromStr>(flag: Option<T>, cfg: &ConfigFile, key: &str) -> Result<Option<T>>
where
    T::Err: Display,
{
    match flag {
        Some(v) => Ok(Some(v)),
        None => cfg.get(key),
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("--{name} must be positive, got {v}")))
    }
}

fn ordered(lo_name: &str, lo: f64, hi_name: &str, hi: f64) -> Result<()> {
    if lo < hi {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("--{lo_name} ({lo}) must be below --{hi_name} ({hi})")))
    }
}

fn at_least(name: &str, v: usize, min: usize) -> Result<usize> {
    if v >= min {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("--{name} must be at least {min}, got {v}")))
    }
}

fn kernel_config(args: &KernelArgs, cfg: &ConfigFile, default_kind: KernelKind) -> Result<KernelConfig> {
    let kind = match pick_opt(args.kernel.clone(), cfg, "kernel")? {
        Some(s) => s.parse::<KernelKind>()?,
        None => default_kind,
    };
    let mut k = KernelConfig::new(kind);
    k.amplitude = positive("amplitude", pick(args.amplitude, cfg, "amplitude", k.amplitude)?)?;
    k.b = positive("b", pick(args.b, cfg, "b", k.b)?)?;
    k.cutoff_a = positive("cutoff", pick(args.cutoff, cfg, "cutoff", k.cutoff_a)?)?;
    Ok(k)
}

fn output_path(flag: Option<PathBuf>, cfg: &ConfigFile, key: &str, default_name: &str) -> Result<PathBuf> {
    if let Some(p) = pick_opt(flag, cfg, key)? {
        return Ok(p);
    }
    let dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
    Ok(dir.join(default_name))
}

// With the default B = 1 the membrane wall metric is degenerate below y of
// roughly 0.2, so membrane ranges start at 0.5 unless asked otherwise.
fn default_wall_start<K: RadialKernel>(kernel: &K) -> f64 {
    if kernel.smooth_at_origin() {
        0.01
    } else {
        (2.0 * lower_limit(kernel)).max(0.5)
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Parse `argv` (including the program name), run the command and return the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_VALIDATION,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_NUMERICAL
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    let cfg = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::WallProfile(a) => wall_profile(a, &cfg),
        Command::TwoPoint(a) => two_point(a, &cfg),
        Command::Embed(a) => embed(a, &cfg),
        Command::Curvature(a) => curvature(a, &cfg),
        Command::Verify(a) => verify(a, &cfg),
        Command::Mc(a) => monte_carlo(a, &cfg),
    }
}

fn wall_profile(a: WallArgs, cfg: &ConfigFile) -> Result<i32> {
    let kernel = kernel_config(&a.kernel, cfg, KernelKind::RandomWave)?.build()?;
    let default_min = default_wall_start(&kernel);
    let y_min = positive("y-min", pick(a.y_min, cfg, "y-min", default_min)?)?;
    let y_max = positive("y-max", pick(a.y_max, cfg, "y-max", 10.0)?)?;
    ordered("y-min", y_min, "y-max", y_max)?;
    let points = at_least("points", pick(a.points, cfg, "points", 200)?, 2)?;
    let out = output_path(a.output, cfg, "output", "wall_profile.csv")?;
    let mut table = Table::new(&["y", "f", "rho_4pi", "rho", "g_xx", "g_yy"]);
    for y in linspace(y_min, y_max, points) {
        let m = wall_metric(&kernel, y)?;
        let f = integrated_charge(&kernel, y)?;
        let d = charge_density_4pi(&kernel, y)?;
        table.push_numbers(&[y, f, d, d / (4.0 * std::f64::consts::PI), m.g_xx, m.g_yy])?;
    }
    write_csv(&out, &table)?;
    println!("wrote {} rows to {}", table.rows.len(), out.display());
    Ok(EXIT_OK)
}

fn two_point(a: TwoPointArgs, cfg: &ConfigFile) -> Result<i32> {
    let kernel = kernel_config(&a.kernel, cfg, KernelKind::RandomWave)?.normalized()?.build()?;
    let r_min = positive("r-min", pick(a.r_min, cfg, "r-min", 0.01)?)?;
    let r_max = positive("r-max", pick(a.r_max, cfg, "r-max", 10.0)?)?;
    ordered("r-min", r_min, "r-max", r_max)?;
    let points = at_least("points", pick(a.points, cfg, "points", 500)?, 2)?;
    let mut model = TwoPoint::new(kernel)?;
    if let Some(s) = pick_opt(a.r_switch, cfg, "r-switch")? {
        model = model.with_r_switch(positive("r-switch", s)?);
    }
    let out = output_path(a.output, cfg, "output", "two_point.csv")?;
    let curve = model.curve(&linspace(r_min, r_max, points))?;
    let mut table = Table::new(&["r", "psi", "c", "c_4pi2", "method"]);
    let four_pi2 = 4.0 * std::f64::consts::PI.powi(2);
    for i in 0..curve.r_grid.len() {
        table.push_row(vec![
            format_f64(curve.r_grid[i]),
            format_f64(curve.psi[i]),
            format_f64(curve.c[i]),
            format_f64(curve.c[i] * four_pi2),
            curve.method[i].as_str().to_string(),
        ])?;
    }
    write_csv(&out, &table)?;
    let (imin, cmin) = curve
        .c
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, c)| if *c < acc.1 { (i, *c) } else { acc });
    println!("wrote {} rows to {}; most negative C = {:.6e} at r = {:.4}", table.rows.len(), out.display(), cmin, curve.r_grid[imin]);
    Ok(EXIT_OK)
}

fn embed(a: EmbedArgs, cfg: &ConfigFile) -> Result<i32> {
    let kernel = kernel_config(&a.kernel, cfg, KernelKind::RandomWave)?.build()?;
    let y_max = positive("y-max", pick(a.y_max, cfg, "y-max", 7.0)?)?;
    let step = positive("meridian-step", pick(a.meridian_step, cfg, "meridian-step", 0.25)?)?;
    let rings = at_least("rings", pick(a.rings, cfg, "rings", 281)?, 2)?;
    let n_angular = at_least("n-angular", pick(a.n_angular, cfg, "n-angular", 64)?, 3)?;
    let y0 = if kernel.smooth_at_origin() { 0.0 } else { 2.0 * lower_limit(&kernel) };
    ordered("y-min", y0, "y-max", y_max)?;
    let obj = output_path(a.output, cfg, "output", "embed.obj")?;
    let contour = output_path(a.contour, cfg, "contour", "embed_contour.csv")?;
    let profile = embed_profile(&kernel, &linspace(y0, y_max, rings))?;
    let mesh = tessellate(&profile, n_angular, step)?;
    write_obj(&obj, &mesh)?;
    let mut table = Table::new(&["y", "a", "b", "valid"]);
    for i in 0..profile.y_samples.len() {
        table.push_row(vec![
            format_f64(profile.y_samples[i]),
            format_f64(profile.a[i]),
            format_f64(profile.b[i]),
            (profile.valid[i] as u8).to_string(),
        ])?;
    }
    write_csv(&contour, &table)?;
    println!(
        "meridians: {}; vertices: {}; triangles: {}; obj: {}; contour: {}",
        mesh.meridian_y.len(),
        mesh.vertices.len(),
        mesh.triangles.len(),
        obj.display(),
        contour.display()
    );
    if let Some(y) = profile.truncated_at {
        println!("surface truncated at y = {y} where |f| reaches 2");
    }
    Ok(EXIT_OK)
}

fn curvature(a: CurvatureArgs, cfg: &ConfigFile) -> Result<i32> {
    let manifold = pick_enum(a.manifold, cfg, "manifold", Manifold::Wall)?;
    let points = at_least("points", pick(a.points, cfg, "points", 200)?, 2)?;
    match manifold {
        Manifold::Wall => {
            let kernel = kernel_config(&a.kernel, cfg, KernelKind::RandomWave)?.build()?;
            let lo = positive("min", pick(a.min, cfg, "min", default_wall_start(&kernel))?)?;
            let hi = positive("max", pick(a.max, cfg, "max", 10.0)?)?;
            ordered("min", lo, "max", hi)?;
            let out = output_path(a.output, cfg, "output", "curvature_wall.csv")?;
            let mut table = Table::new(&["y", "scalar_curvature"]);
            for y in linspace(lo, hi, points) {
                table.push_numbers(&[y, curvature_profile(&kernel, y)?])?;
            }
            write_csv(&out, &table)?;
            println!("wrote {} rows to {}", table.rows.len(), out.display());
        }
        Manifold::TwoPoint => {
            let kernel = kernel_config(&a.kernel, cfg, KernelKind::Gaussian)?.normalized()?.build()?;
            let lo = positive("min", pick(a.min, cfg, "min", 0.5)?)?;
            let hi = positive("max", pick(a.max, cfg, "max", 6.0)?)?;
            ordered("min", lo, "max", hi)?;
            let step = positive("step", pick(a.step, cfg, "step", 1e-3)?)?;
            let out = output_path(a.output, cfg, "output", "curvature_two_point.csv")?;
            let mut table = Table::new(&["r", "r_closed", "r_fd", "abs_diff"]);
            for r in linspace(lo, hi, points) {
                let rep = curvature_report(&kernel, r, step)?;
                table.push_numbers(&[rep.r, rep.r_closed, rep.r_fd, rep.abs_diff])?;
            }
            write_csv(&out, &table)?;
            println!("wrote {} rows to {}", table.rows.len(), out.display());
        }
    }
    Ok(EXIT_OK)
}

struct Check {
    name: String,
    value: f64,
    threshold: f64,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, threshold: f64) -> Check {
        Check { name: name.into(), value, threshold }
    }

    fn passed(&self) -> bool {
        self.value.abs() < self.threshold
    }
}

fn verify(a: VerifyArgs, cfg: &ConfigFile) -> Result<i32> {
    let suite = pick_enum(a.suite, cfg, "suite", Suite::All)?;
    let config = kernel_config(&a.kernel, cfg, KernelKind::Gaussian)?.normalized()?;
    let kernel = config.build()?;
    let gaussian = config.kind == KernelKind::Gaussian;
    let run = |s: Suite| suite == Suite::All || suite == s;
    let mut checks = Vec::new();
    if run(Suite::SumRule) {
        let (r_max, tol) = if gaussian { (12.0, 1e-8) } else { (60.0, 1e-4) };
        let rep = sum_rule_check(&kernel, r_max)?;
        checks.push(Check::new(format!("sum rule residual (r_max = {r_max})"), rep.residual, tol));
    }
    if run(Suite::Density) {
        let closed = absolute_density(&kernel)?;
        let oracle = absolute_density_oracle(&kernel)?;
        checks.push(Check::new("n0 closed form vs quadrature", closed - oracle, 1e-8));
    }
    if run(Suite::CurvatureOracle) {
        for r in [0.5, 1.0, 2.0, 5.0] {
            let rep = curvature_report(&kernel, r, 1e-3)?;
            checks.push(Check::new(format!("R closed vs finite differences at r = {r}"), rep.abs_diff, 1e-4));
        }
    }
    if run(Suite::Variational) {
        let rep = actions::variational_check(&kernel, 3.0, 1.0, 1e-5)?;
        checks.push(Check::new("variational identity (relative)", rep.relative, 1e-6));
    }
    if run(Suite::Legendre) {
        let r_max = if gaussian { [10.0, 12.0, 15.0] } else { [40.0, 50.0, 60.0] };
        let gaps = r_max.iter().map(|r| Ok(actions::legendre_check(&kernel, *r)?.gap)).collect::<Result<Vec<_>>>()?;
        let spread = gaps.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - gaps.iter().cloned().fold(f64::INFINITY, f64::min);
        println!("legendre gap (boundary terms) = {:.12}", gaps[0]);
        checks.push(Check::new("legendre gap spread over r_max", spread, if gaussian { 1e-8 } else { 1e-2 }));
    }
    println!("{:<48} {:>14} {:>10}  result", "check", "value", "threshold");
    let mut all = true;
    for c in &checks {
        all &= c.passed();
        println!(
            "{:<48} {:>14.4e} {:>10.1e}  {}",
            c.name,
            c.value,
            c.threshold,
            if c.passed() { "PASS" } else { "FAIL" }
        );
    }
    Ok(if all { EXIT_OK } else { EXIT_NUMERICAL })
}

fn write_estimator(out: &Path, est: &EstimatorOutput) -> Result<()> {
    let mut table = Table::new(&["bin_center", "mean", "stderr", "n"]);
    for i in 0..est.bin_centers.len() {
        table.push_row(vec![
            format_f64(est.bin_centers[i]),
            format_f64(est.means[i]),
            format_f64(est.standard_errors[i]),
            est.n_samples[i].to_string(),
        ])?;
    }
    write_csv(out, &table)
}

fn edges(lo: f64, hi: f64, width: f64) -> Vec<f64> {
    let n = ((hi - lo) / width).round().max(1.0) as usize;
    linspace(lo, hi, n + 1)
}

fn monte_carlo(a: McArgs, cfg: &ConfigFile) -> Result<i32> {
    let estimator = pick_enum(a.estimator, cfg, "estimator", Estimator::Pair)?;
    let realizations = at_least("realizations", pick(a.realizations, cfg, "realizations", 200)?, 2)?;
    let waves = pick(a.waves, cfg, "waves", 256)?;
    let seed = pick(a.seed, cfg, "seed", 1)?;
    let side = positive("domain", pick(a.domain, cfg, "domain", 40.0)?)?;
    let spacing = positive("grid-spacing", pick(a.grid_spacing, cfg, "grid-spacing", 0.2)?)?;
    let workers = at_least("workers", pick(a.workers, cfg, "workers", 1)?, 1)?;
    let n_grid = (side / spacing).ceil() as usize + 1;
    let half_space = estimator == Estimator::Wall;
    let mut spec = WaveEnsembleSpec::standard(realizations, seed, half_space);
    spec.n_waves = waves;
    spec.domain = Rect::new(0.0, side, 0.0, side)?;
    spec.grid = (n_grid, n_grid);
    spec.validate()?;
    let out = output_path(a.output, cfg, "output", "mc.csv")?;
    let est = match estimator {
        Estimator::Kernel => {
            let hi = positive("max", pick(a.max, cfg, "max", 6.0)?)?;
            let width = positive("bin-width", pick(a.bin_width, cfg, "bin-width", 0.5)?)?;
            let radii = edges(0.0, hi, width);
            WorkerPool::new(workers)?.install(|| estimate_kernel(&spec, &radii, 1.0))?
        }
        Estimator::Wall => {
            let hi = positive("max", pick(a.max, cfg, "max", 12.0)?)?;
            let width = positive("bin-width", pick(a.bin_width, cfg, "bin-width", 0.5)?)?;
            Ensemble::simulate_with_workers(&spec, workers)?.wall_profile(&edges(0.0, hi, width))?
        }
        Estimator::Pair => {
            let hi = positive("max", pick(a.max, cfg, "max", 6.0)?)?;
            let width = positive("bin-width", pick(a.bin_width, cfg, "bin-width", 0.25)?)?;
            Ensemble::simulate_with_workers(&spec, workers)?.pair_correlation(&edges(0.0, hi, width))?
        }
        Estimator::Density => {
            let ens = Ensemble::simulate_with_workers(&spec, workers)?;
            let (signed, unsigned) = ens.bulk_density();
            println!(
                "signed density {:.4e} +- {:.1e}; unsigned density {:.5} +- {:.1e}; newton convergence {:.4}",
                signed.means[0],
                signed.standard_errors[0],
                unsigned.means[0],
                unsigned.standard_errors[0],
                ens.diagnostics.convergence_rate()
            );
            signed
        }
    };
    write_estimator(&out, &est)?;
    println!("wrote {} bins to {}", est.bin_centers.len(), out.display());
    Ok(EXIT_OK)
}
