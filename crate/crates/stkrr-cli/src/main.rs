//! `stkrr` — command-line front end for the spectrally truncated kernel
//! ridge regression library.
//!
//! Five subcommands cover the workflow: `spectrum` exports the eigenvalues
//! of a kernel design, `curve` evaluates the worst-case risk surface on a
//! grid, `optimal` selects the regularization level and truncation rank,
//! `simulate` runs seeded Monte-Carlo replications, and `rates` fits risk
//! scaling exponents on synthetic spectra. Every artifact is plain CSV or
//! versioned JSON; nothing is plotted here.
//!
//! Outputs land in the current directory unless `--out` is absolute or the
//! `STKRR_OUT_DIR` environment variable points elsewhere. Artifacts are
//! fully materialized in memory before anything touches the filesystem, and
//! each file is written via a temporary sibling and an atomic rename, so a
//! failed run never leaves a partial file behind. The exit status is 0
//! exactly when every requested artifact was written.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use stkrr::kernel::{
    design_points, kernel_matrix, DesignScheme, Interval, Kernel, KernelConfig, KernelRegistry,
};
use stkrr::rates::{gamma_sweep, rate_fit};
use stkrr::risk::NoiseModel;
use stkrr::selection::{optimal_truncation, risk_curve, RiskCurve, SearchConfig};
use stkrr::simulate::{run_simulation, NoiseRegistry, SimulationConfig, TargetMode};
use stkrr::spectral::{eigendecompose, DecayConfig, DecayRegistry, SpectrumOnly};

#[derive(Parser)]
#[command(
    name = "stkrr",
    version,
    about = "Spectrally truncated kernel ridge regression: risk curves, \
             rank selection, and seeded simulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the eigenvalues of a kernel design as `index,eigenvalue` CSV
    Spectrum(SpectrumArgs),
    /// Evaluate the worst-case risk surface over a lambda grid as CSV
    Curve(CurveArgs),
    /// Select the optimal regularization and truncation rank, as JSON
    Optimal(OptimalArgs),
    /// Run seeded Monte-Carlo replications; CSV rows plus a JSON sidecar
    Simulate(SimulateArgs),
    /// Fit risk scaling exponents on a synthetic decaying spectrum, as JSON
    Rates(RatesArgs),
}

/// Flags shared by every command that builds a kernel design.
#[derive(Args)]
struct KernelArgs {
    /// Kernel name (`sobolev1` or `gaussian`)
    #[arg(long, default_value = "sobolev1")]
    kernel: String,

    /// Kernel bandwidth; only meaningful for kernels that take one
    #[arg(long)]
    bandwidth: Option<f64>,

    /// Design domain as `lo,hi`; defaults to the kernel's natural domain
    #[arg(long, value_parser = parse_interval)]
    domain: Option<Interval>,

    /// Design spacing: `closed` (both endpoints) or `open-left`;
    /// defaults to the kernel's natural scheme
    #[arg(long, value_parser = parse_scheme)]
    scheme: Option<DesignScheme>,

    /// Number of design points
    #[arg(long, default_value_t = 200)]
    n: usize,
}

impl KernelArgs {
    fn build(&self, registry: &KernelRegistry) -> Result<(Box<dyn Kernel>, Vec<f64>)> {
        let mut config = KernelConfig::new(self.kernel.clone());
        if let Some(b) = self.bandwidth {
            config = config.with_bandwidth(b);
        }
        if let Some(d) = self.domain {
            config = config.with_domain(d);
        }
        let kernel = registry
            .create(&config)
            .context("invalid --kernel/--bandwidth/--domain combination")?;
        let points = match self.scheme {
            Some(scheme) => design_points(kernel.domain(), self.n, scheme),
            None => kernel.design(self.n),
        }
        .context("invalid --n/--scheme for this design")?;
        Ok((kernel, points))
    }

    fn spectrum(&self, registry: &KernelRegistry) -> Result<SpectrumOnly> {
        let (kernel, points) = self.build(registry)?;
        let km = kernel_matrix(kernel.as_ref(), &points)?;
        let system = eigendecompose(&km)?;
        Ok(system.spectrum())
    }

    fn kernel_config(&self) -> KernelConfig {
        let mut config = KernelConfig::new(self.kernel.clone());
        if let Some(b) = self.bandwidth {
            config = config.with_bandwidth(b);
        }
        if let Some(d) = self.domain {
            config = config.with_domain(d);
        }
        config
    }
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    kernel: KernelArgs,

    /// Output CSV path (default `spectrum.csv` in the output directory)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    kernel: KernelArgs,

    /// Noise standard deviation
    #[arg(long, default_value_t = 2.0)]
    sigma: f64,

    /// Truncation rank; repeat for several curves (default: full rank)
    #[arg(long = "r")]
    r: Vec<usize>,

    /// Explicit lambda value; repeat to give the grid directly
    #[arg(long = "lambda")]
    lambda: Vec<f64>,

    /// Smallest lambda of the log-spaced grid
    /// (default: 1e-6 x leading eigenvalue)
    #[arg(long)]
    lambda_min: Option<f64>,

    /// Largest lambda of the log-spaced grid
    /// (default: 10 x leading eigenvalue)
    #[arg(long)]
    lambda_max: Option<f64>,

    /// Number of log-spaced grid points when --lambda is not given
    #[arg(long, default_value_t = 50)]
    lambda_points: usize,

    /// Output CSV path (default `curve.csv` in the output directory)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OptimalArgs {
    #[command(flatten)]
    kernel: KernelArgs,

    /// Noise standard deviation
    #[arg(long, default_value_t = 2.0)]
    sigma: f64,

    /// Output JSON path (default `optimal.json` in the output directory)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    kernel: KernelArgs,

    /// Noise standard deviation
    #[arg(long, default_value_t = 2.0)]
    sigma: f64,

    /// Regularization level; repeat for several grid values
    #[arg(long = "lambda", required = true)]
    lambda: Vec<f64>,

    /// Truncation rank; repeat for several grid values
    #[arg(long = "r", required = true)]
    r: Vec<usize>,

    /// Monte-Carlo replications per (lambda, r) cell
    #[arg(long, default_value_t = 1000)]
    reps: usize,

    /// Base seed; all replication streams derive from it deterministically
    #[arg(long, default_value_t = 2024)]
    seed: u64,

    /// `fixed` keeps one target across replications, `fresh` redraws it
    #[arg(long, default_value = "fixed", value_parser = parse_target_mode)]
    target_mode: TargetMode,

    /// Noise distribution (`gaussian`, `rademacher`, or `uniform-sphere`)
    #[arg(long, default_value = "gaussian")]
    noise: String,

    /// Output CSV path (default `simulate.csv` in the output directory);
    /// a JSON sidecar with config and seeds lands next to it
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RatesArgs {
    /// Eigenvalue decay family: `poly` or `exp`
    #[arg(long, default_value = "poly")]
    decay: String,

    /// Polynomial decay exponent, eigenvalues fall like i^(-2 alpha);
    /// `poly` only (default 1)
    #[arg(long)]
    alpha: Option<f64>,

    /// Near-exponential decay speed; `exp` only (default 1)
    #[arg(long)]
    c: Option<f64>,

    /// Synthetic spectrum length
    #[arg(long, default_value_t = 4096)]
    n: usize,

    /// Noise sweep runs over gamma = 2^-k for k in k_min..=k_max
    #[arg(long, default_value_t = 6)]
    k_min: u32,

    /// Upper end of the sweep exponent range
    #[arg(long, default_value_t = 20)]
    k_max: u32,

    /// Output JSON path (default `rates.json` in the output directory)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_interval(s: &str) -> Result<Interval, String> {
    let (lo, hi) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `lo,hi`, got `{s}`"))?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("bad lower endpoint: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("bad upper endpoint: {e}"))?;
    Interval::new(lo, hi).map_err(|e| e.to_string())
}

fn parse_scheme(s: &str) -> Result<DesignScheme, String> {
    DesignScheme::from_str(s).map_err(|e| e.to_string())
}

fn parse_target_mode(s: &str) -> Result<TargetMode, String> {
    TargetMode::from_str(s).map_err(|e| e.to_string())
}

/// Resolve the output path: explicit absolute paths win, relative paths
/// (and per-command defaults) land under `STKRR_OUT_DIR` when set, else
/// under the current directory.
fn resolve_out(out: Option<PathBuf>, default_name: &str) -> PathBuf {
    let path = out.unwrap_or_else(|| PathBuf::from(default_name));
    if path.is_absolute() {
        return path;
    }
    match std::env::var_os("STKRR_OUT_DIR") {
        Some(dir) => PathBuf::from(dir).join(path),
        None => path,
    }
}

/// Write every artifact or none: each goes through a temporary sibling and
/// an atomic rename, and any failure removes whatever was already renamed.
fn write_artifacts(artifacts: &[(PathBuf, &str)]) -> Result<()> {
    let mut written: Vec<&Path> = Vec::new();
    for (path, content) in artifacts {
        if let Err(e) = write_one(path, content) {
            for done in written {
                let _ = fs::remove_file(done);
            }
            return Err(e);
        }
        written.push(path);
    }
    Ok(())
}

fn write_one(path: &Path, content: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, content).with_context(|| format!("cannot write {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| {
        let _ = fs::remove_file(&tmp);
        format!("cannot move output into place at {}", path.display())
    })?;
    Ok(())
}

fn log_spaced(lo: f64, hi: f64, m: usize) -> Result<Vec<f64>> {
    if !(lo.is_finite() && lo > 0.0 && hi.is_finite() && hi > lo) {
        bail!("--lambda-min/--lambda-max must satisfy 0 < min < max, got {lo} and {hi}");
    }
    if m < 2 {
        bail!("--lambda-points must be at least 2, got {m}");
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut grid: Vec<f64> = (0..m)
        .map(|i| (a + (b - a) * i as f64 / (m - 1) as f64).exp())
        .collect();
    grid[0] = lo;
    grid[m - 1] = hi;
    Ok(grid)
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Spectrum(args) => cmd_spectrum(args),
        Command::Curve(args) => cmd_curve(args),
        Command::Optimal(args) => cmd_optimal(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Rates(args) => cmd_rates(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn cmd_spectrum(args: SpectrumArgs) -> Result<()> {
    let registry = KernelRegistry::with_builtins();
    let spectrum = args.kernel.spectrum(&registry)?;
    let out = resolve_out(args.out, "spectrum.csv");
    let csv = spectrum.to_csv_string();
    write_artifacts(&[(out.clone(), csv.as_str())])?;
    println!(
        "spectrum: kernel={} n={} mu_1={:.6} -> {}",
        args.kernel.kernel,
        spectrum.n(),
        spectrum.leading(),
        out.display()
    );
    Ok(())
}

fn cmd_curve(args: CurveArgs) -> Result<()> {
    let registry = KernelRegistry::with_builtins();
    let spectrum = args.kernel.spectrum(&registry)?;
    let n = spectrum.n();
    let noise = NoiseModel::new(args.sigma * args.sigma, n)
        .context("invalid --sigma/--n combination")?;

    let lambdas = if args.lambda.is_empty() {
        let mu1 = spectrum.leading();
        let lo = args.lambda_min.unwrap_or(1e-6 * mu1);
        let hi = args.lambda_max.unwrap_or(10.0 * mu1);
        log_spaced(lo, hi, args.lambda_points)?
    } else {
        args.lambda.clone()
    };
    let ranks = if args.r.is_empty() { vec![n] } else { args.r.clone() };

    let mut points = Vec::with_capacity(lambdas.len() * ranks.len());
    for &r in &ranks {
        let curve = risk_curve(&spectrum, r, &lambdas, &noise)
            .with_context(|| format!("risk curve failed at --r {r}"))?;
        points.extend(curve.points().iter().cloned());
    }
    let curve = RiskCurve::from_points(points)?;
    let best = curve.argmin().clone();

    let out = resolve_out(args.out, "curve.csv");
    let csv = curve.to_csv_string();
    write_artifacts(&[(out.clone(), csv.as_str())])?;
    let mut line = format!(
        "curve: kernel={} n={} sigma={} ({} lambda x {} r = {} rows)",
        args.kernel.kernel,
        n,
        args.sigma,
        lambdas.len(),
        ranks.len(),
        curve.points().len()
    );
    write!(
        line,
        " min max_mse={:.6} at lambda={:.6} r={}",
        best.max_mse, best.lambda, best.r
    )?;
    println!("{} -> {}", line, out.display());
    Ok(())
}

fn cmd_optimal(args: OptimalArgs) -> Result<()> {
    let registry = KernelRegistry::with_builtins();
    let spectrum = args.kernel.spectrum(&registry)?;
    let noise = NoiseModel::new(args.sigma * args.sigma, spectrum.n())
        .context("invalid --sigma/--n combination")?;
    let report = optimal_truncation(&spectrum, &noise, &SearchConfig::default())?;

    let out = resolve_out(args.out, "optimal.json");
    let json = report.to_json();
    write_artifacts(&[(out.clone(), json.as_str())])?;
    let boundary = match report.boundary {
        Some(edge) => format!(" (grid boundary: {edge:?})"),
        None => String::new(),
    };
    println!(
        "optimal: kernel={} n={} sigma={} lambda_n={:.6} r_n={} \
         min_risk_full={:.6} min_risk_truncated={:.6}{} -> {}",
        args.kernel.kernel,
        report.n,
        args.sigma,
        report.lambda_n,
        report.r_n,
        report.min_risk_full,
        report.min_risk_truncated,
        boundary,
        out.display()
    );
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let config = SimulationConfig {
        kernel: args.kernel.kernel_config(),
        n: args.kernel.n,
        sigma: args.sigma,
        lambda_grid: args.lambda.clone(),
        r_values: args.r.clone(),
        replications: args.reps,
        base_seed: args.seed,
        target_mode: args.target_mode,
        noise_dist: args.noise.clone(),
    };

    let out = resolve_out(args.out, "simulate.csv");
    let sidecar = out.with_extension("json");
    if sidecar == out {
        bail!(
            "simulate --out must not use the .json extension \
             (the JSON sidecar would overwrite the CSV): {}",
            out.display()
        );
    }

    let kernels = KernelRegistry::with_builtins();
    let noises = NoiseRegistry::with_builtins();
    let report = run_simulation(&config, &kernels, &noises)?;

    let csv = report.to_csv_string();
    let json = report.to_json();
    write_artifacts(&[(out.clone(), csv.as_str()), (sidecar.clone(), json.as_str())])?;
    println!(
        "simulate: kernel={} n={} sigma={} {} cells x {} reps, {} failed fits -> {} (+ {})",
        args.kernel.kernel,
        config.n,
        config.sigma,
        report.rows.len(),
        config.replications,
        report.failed_seeds.len(),
        out.display(),
        sidecar.display()
    );
    Ok(())
}

fn cmd_rates(args: RatesArgs) -> Result<()> {
    let registry = DecayRegistry::with_builtins();
    let config = DecayConfig {
        name: args.decay.clone(),
        alpha: args.alpha,
        c: args.c,
        scale: None,
    };
    let profile = registry
        .create(&config)
        .context("invalid --decay/--alpha/--c combination")?;
    let gammas = gamma_sweep(args.k_min, args.k_max)
        .context("invalid --k-min/--k-max sweep")?;
    let fit = rate_fit(profile.as_ref(), args.n, &gammas, &SearchConfig::default())?;

    let out = resolve_out(args.out, "rates.json");
    let mut json =
        serde_json::to_string_pretty(&fit).context("rate fit serialization failed")?;
    json.push('\n');
    write_artifacts(&[(out.clone(), json.as_str())])?;
    let target = match fit.target_exponent {
        Some(t) => format!("{t:.4}"),
        None => "none".to_string(),
    };
    println!(
        "rates: decay={} n={} sweep=2^-{}..2^-{} risk_exponent={:.4} target={} \
         lambda_exponent={:.4} r_squared={:.6} reliable={} -> {}",
        args.decay,
        args.n,
        args.k_min,
        args.k_max,
        fit.risk_exponent,
        target,
        fit.lambda_exponent,
        fit.r_squared,
        fit.reliable,
        out.display()
    );
    Ok(())
}
