//! Monte Carlo verification of the closed-form risk surface.
//!
//! A simulation draws targets on the RKHS unit sphere, corrupts their design
//! values with isotropic noise, fits the truncated ridge estimator over a
//! grid of `(lambda, r)` pairs, and compares empirical mean-squared errors
//! against the closed-form worst case. Everything is deterministic in
//! `base_seed`: targets and noise consume separate, documented seed streams,
//! so the same configuration always reproduces the same report byte for
//! byte.

use crate::csvutil::{expect_header, parse_field, split_fields};
use crate::error::{Error, Result};
use crate::estimator::{fit, sample_ball_target, TargetFunction};
use crate::kernel::{kernel_matrix, KernelConfig, KernelMatrix, KernelRegistry};
use crate::risk::{estimation_error, max_mse, NoiseModel};
use crate::spectral::{eigendecompose, EigenSystem};
use nalgebra::DVector;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::str::FromStr;

// ===== Noise distributions =====

/// A zero-mean isotropic noise family: `draw` returns a vector with
/// covariance `sigma^2 I_n`. Isotropy is what makes the closed-form
/// estimation error exact for every member of this trait.
pub trait NoiseDistribution: std::fmt::Debug + Send + Sync {
    fn name(&self) -> &'static str;

    /// Draw one noise vector of length `n` with per-coordinate standard
    /// deviation `sigma`.
    fn draw(&self, n: usize, sigma: f64, rng: &mut dyn RngCore) -> DVector<f64>;
}

/// Independent `N(0, sigma^2)` coordinates.
#[derive(Debug, Clone, Copy, Default)]
pub struct GaussianNoise;

impl NoiseDistribution for GaussianNoise {
    fn name(&self) -> &'static str {
        "gaussian"
    }

    fn draw(&self, n: usize, sigma: f64, rng: &mut dyn RngCore) -> DVector<f64> {
        DVector::from_fn(n, |_, _| {
            let g: f64 = StandardNormal.sample(&mut *rng);
            sigma * g
        })
    }
}

/// Independent `+sigma / -sigma` coordinates with equal probability.
#[derive(Debug, Clone, Copy, Default)]
pub struct RademacherNoise;

impl NoiseDistribution for RademacherNoise {
    fn name(&self) -> &'static str {
        "rademacher"
    }

    fn draw(&self, n: usize, sigma: f64, rng: &mut dyn RngCore) -> DVector<f64> {
        DVector::from_fn(n, |_, _| if rng.random::<bool>() { sigma } else { -sigma })
    }
}

/// Uniform on the sphere of radius `sigma * sqrt(n)`, which also has
/// covariance `sigma^2 I_n`.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformSphereNoise;

impl NoiseDistribution for UniformSphereNoise {
    fn name(&self) -> &'static str {
        "uniform-sphere"
    }

    fn draw(&self, n: usize, sigma: f64, rng: &mut dyn RngCore) -> DVector<f64> {
        if sigma == 0.0 {
            return DVector::zeros(n);
        }
        loop {
            let g = DVector::from_fn(n, |_, _| {
                let v: f64 = StandardNormal.sample(&mut *rng);
                v
            });
            let norm = g.norm();
            if norm > 1e-150 {
                return g * (sigma * (n as f64).sqrt() / norm);
            }
        }
    }
}

type NoiseFactory = fn() -> Box<dyn NoiseDistribution>;

/// Registry of noise families, keyed by name. Ships with the three builtin
/// isotropic families and accepts user-registered ones.
#[derive(Debug)]
pub struct NoiseRegistry {
    entries: Vec<(&'static str, NoiseFactory)>,
}

impl NoiseRegistry {
    pub fn with_builtins() -> Self {
        let mut registry = NoiseRegistry {
            entries: Vec::new(),
        };
        registry.register("gaussian", || Box::new(GaussianNoise));
        registry.register("rademacher", || Box::new(RademacherNoise));
        registry.register("uniform-sphere", || Box::new(UniformSphereNoise));
        registry
    }

    /// Register a family under a name, replacing any previous entry.
    pub fn register(&mut self, name: &'static str, factory: NoiseFactory) {
        self.entries.retain(|(existing, _)| *existing != name);
        self.entries.push((name, factory));
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(name, _)| *name).collect()
    }

    pub fn create(&self, name: &str) -> Result<Box<dyn NoiseDistribution>> {
        for (entry, factory) in &self.entries {
            if *entry == name {
                return Ok(factory());
            }
        }
        Err(Error::UnknownName {
            kind: "noise distribution",
            name: name.to_string(),
            known: self.names().join(", "),
        })
    }
}

// ===== Seed streams =====

/// Which deterministic sub-stream of the base seed a draw belongs to.
/// Targets and noise never share a stream, so changing the number of
/// replications never changes what any individual replication sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedStream {
    Target,
    Noise,
}

impl SeedStream {
    fn salt(self) -> u64 {
        // Arbitrary fixed odd constants; they only need to differ.
        match self {
            SeedStream::Target => 0x9d8f_3c1b_5a77_e215,
            SeedStream::Noise => 0x41c6_4e6d_a3b2_9f0d,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// The seed for replication `k` of one stream: two rounds of splitmix64
/// over the salted base seed. Pure arithmetic, so external tools can
/// reproduce any single replication without running the others.
pub fn replication_seed(base_seed: u64, stream: SeedStream, replication: u64) -> u64 {
    splitmix64(splitmix64(base_seed ^ stream.salt()) ^ replication)
}

// ===== Configuration =====

/// Whether every replication shares one target or draws its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetMode {
    /// One target, drawn from replication 0 of the target stream.
    Fixed,
    /// A new target per replication `k`, drawn from replication `k` of the
    /// target stream.
    Fresh,
}

impl FromStr for TargetMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(TargetMode::Fixed),
            "fresh" => Ok(TargetMode::Fresh),
            other => Err(Error::UnknownName {
                kind: "target mode",
                name: other.to_string(),
                known: "fixed, fresh".to_string(),
            }),
        }
    }
}

/// Everything a simulation needs; serializable so the sidecar report can
/// state exactly what was run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub kernel: KernelConfig,
    pub n: usize,
    pub sigma: f64,
    pub lambda_grid: Vec<f64>,
    pub r_values: Vec<usize>,
    pub replications: usize,
    pub base_seed: u64,
    pub target_mode: TargetMode,
    pub noise_dist: String,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid(format!(
                "simulation needs n >= 2 design points, got {}",
                self.n
            )));
        }
        if !self.sigma.is_finite() || self.sigma < 0.0 {
            return Err(Error::invalid(format!(
                "noise level must be finite and nonnegative, got {}",
                self.sigma
            )));
        }
        if self.lambda_grid.is_empty() {
            return Err(Error::EmptyInput("lambda grid"));
        }
        for &lambda in &self.lambda_grid {
            if !lambda.is_finite() || lambda <= 0.0 {
                return Err(Error::invalid(format!(
                    "lambda grid entries must be positive and finite, got {lambda}"
                )));
            }
        }
        if self.r_values.is_empty() {
            return Err(Error::EmptyInput("rank list"));
        }
        for &r in &self.r_values {
            if r == 0 || r > self.n {
                return Err(Error::RankOutOfRange { r, n: self.n });
            }
        }
        if self.replications == 0 {
            return Err(Error::invalid(
                "at least one replication is required".to_string(),
            ));
        }
        Ok(())
    }
}

// ===== Report =====

/// Aggregated Monte Carlo result for one `(lambda, r)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRow {
    pub lambda: f64,
    pub r: usize,
    pub mean_mse: f64,
    /// Standard error of `mean_mse` (0 when fewer than 2 replications
    /// contributed).
    pub stderr: f64,
    /// Replications that contributed to this cell.
    pub reps: usize,
    /// Closed-form worst case over the unit ball for this cell.
    pub theory_max_mse: f64,
}

const SIMULATION_SCHEMA_VERSION: u32 = 1;

/// A finished simulation: the configuration that produced it, one row per
/// `(lambda, r)` cell in lambda-major order, and the seed bookkeeping
/// needed to reproduce or audit any replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub schema_version: u32,
    pub config: SimulationConfig,
    pub rows: Vec<SimulationRow>,
    /// Noise-stream seed of each replication, in order.
    pub rep_seeds: Vec<u64>,
    /// Noise-stream seeds of replications where a fit failed (skipped cells).
    pub failed_seeds: Vec<u64>,
}

impl SimulationReport {
    /// The rows as fixed-schema CSV with shortest round-trip floats.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("lambda,r,mean_mse,stderr,reps,theory_max_mse\n");
        for row in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                row.lambda, row.r, row.mean_mse, row.stderr, row.reps, row.theory_max_mse
            )
            .expect("string writes cannot fail");
        }
        out
    }

    /// Parse rows written by [`SimulationReport::to_csv_string`].
    pub fn rows_from_csv_str(text: &str) -> Result<Vec<SimulationRow>> {
        expect_header(text.lines(), "lambda,r,mean_mse,stderr,reps,theory_max_mse")?;
        let mut rows = Vec::new();
        for (idx, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let line_no = idx + 1;
            let fields = split_fields(line, 6, line_no)?;
            rows.push(SimulationRow {
                lambda: parse_field(fields[0], "lambda", line_no)?,
                r: parse_field(fields[1], "r", line_no)?,
                mean_mse: parse_field(fields[2], "mean_mse", line_no)?,
                stderr: parse_field(fields[3], "stderr", line_no)?,
                reps: parse_field(fields[4], "reps", line_no)?,
                theory_max_mse: parse_field(fields[5], "theory_max_mse", line_no)?,
            });
        }
        Ok(rows)
    }

    /// The whole report as pretty JSON (the sidecar next to the CSV).
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: SimulationReport = serde_json::from_str(text)
            .map_err(|e| Error::invalid(format!("malformed simulation report: {e}")))?;
        if report.schema_version != SIMULATION_SCHEMA_VERSION {
            return Err(Error::invalid(format!(
                "unsupported simulation report schema version {} (expected {})",
                report.schema_version, SIMULATION_SCHEMA_VERSION
            )));
        }
        Ok(report)
    }
}

// ===== Running =====

/// Squared empirical distance between two design-value vectors on the
/// normalized scale; equals the design-averaged squared error of the
/// corresponding functions.
pub fn empirical_mse(u_hat: &DVector<f64>, u_star: &DVector<f64>) -> Result<f64> {
    if u_hat.len() != u_star.len() {
        return Err(Error::DimensionMismatch {
            context: "empirical mse",
            expected: u_star.len(),
            actual: u_hat.len(),
        });
    }
    Ok((u_hat - u_star).norm_squared())
}

/// Exact risk of the `(lambda, r)` estimator at one specific target:
/// the squared bias `sum_{i <= r} (lambda/(mu_i+lambda))^2 v_i^2 +
/// sum_{i > r} v_i^2` plus the target-independent estimation error.
pub fn target_risk(
    system: &EigenSystem,
    r: usize,
    lambda: f64,
    noise: &NoiseModel,
    target: &TargetFunction,
) -> Result<f64> {
    let spectrum = system.spectrum();
    spectrum.check_rank(r)?;
    let v = target.v_star(system)?;
    let mut bias = 0.0;
    for i in 0..system.n() {
        let vi2 = v[i] * v[i];
        if i < r {
            let mu = system.eigenvalue(i);
            let factor = lambda / (mu + lambda);
            bias += factor * factor * vi2;
        } else {
            bias += vi2;
        }
    }
    Ok(bias + estimation_error(&spectrum, r, lambda, noise)?)
}

/// Largest [`target_risk`] over `num_targets` sampled unit-sphere targets:
/// a stochastic lower probe of the closed-form worst case.
pub fn max_over_ball_probe(
    system: &EigenSystem,
    kernel_matrix: &KernelMatrix,
    r: usize,
    lambda: f64,
    noise: &NoiseModel,
    num_targets: usize,
    seed: u64,
) -> Result<f64> {
    if num_targets == 0 {
        return Err(Error::EmptyInput("probe targets"));
    }
    let mut worst = 0.0f64;
    for k in 0..num_targets {
        let target = sample_ball_target(
            kernel_matrix,
            replication_seed(seed, SeedStream::Target, k as u64),
        )?;
        worst = worst.max(target_risk(system, r, lambda, noise, &target)?);
    }
    Ok(worst)
}

/// Run the replication loop against a prebuilt eigensystem.
///
/// Rows come out in lambda-major order (`lambda_grid` outer, `r_values`
/// inner). Replications whose fit fails for some cell are recorded in
/// `failed_seeds` and skipped for that cell only.
pub fn run_replications(
    config: &SimulationConfig,
    system: &EigenSystem,
    km: &KernelMatrix,
    noise_dist: &dyn NoiseDistribution,
) -> Result<SimulationReport> {
    config.validate()?;
    if system.n() != config.n || km.n() != config.n {
        return Err(Error::DimensionMismatch {
            context: "simulation design size",
            expected: config.n,
            actual: system.n(),
        });
    }
    let spectrum = system.spectrum();
    let noise_model = NoiseModel::new(config.sigma * config.sigma, config.n)?;

    let cells: Vec<(f64, usize)> = config
        .lambda_grid
        .iter()
        .flat_map(|&lambda| config.r_values.iter().map(move |&r| (lambda, r)))
        .collect();

    let fixed_target = match config.target_mode {
        TargetMode::Fixed => Some(sample_ball_target(
            km,
            replication_seed(config.base_seed, SeedStream::Target, 0),
        )?),
        TargetMode::Fresh => None,
    };

    let mut sums = vec![0.0f64; cells.len()];
    let mut sum_squares = vec![0.0f64; cells.len()];
    let mut counts = vec![0usize; cells.len()];
    let mut rep_seeds = Vec::with_capacity(config.replications);
    let mut failed_seeds = Vec::new();

    for k in 0..config.replications {
        let noise_seed = replication_seed(config.base_seed, SeedStream::Noise, k as u64);
        rep_seeds.push(noise_seed);

        let fresh;
        let target = match &fixed_target {
            Some(t) => t,
            None => {
                fresh = sample_ball_target(
                    km,
                    replication_seed(config.base_seed, SeedStream::Target, k as u64),
                )?;
                &fresh
            }
        };

        let mut rng = ChaCha8Rng::seed_from_u64(noise_seed);
        let w = noise_dist.draw(config.n, config.sigma, &mut rng);
        let y = target.values() + w;

        let mut this_rep_failed = false;
        for (cell, &(lambda, r)) in cells.iter().enumerate() {
            match fit(system, r, lambda, &y) {
                Ok(estimate) => {
                    let mse = empirical_mse(estimate.fitted_u(), target.u_star())?;
                    sums[cell] += mse;
                    sum_squares[cell] += mse * mse;
                    counts[cell] += 1;
                }
                Err(_) => this_rep_failed = true,
            }
        }
        if this_rep_failed {
            failed_seeds.push(noise_seed);
        }
    }

    let mut rows = Vec::with_capacity(cells.len());
    for (cell, &(lambda, r)) in cells.iter().enumerate() {
        let reps = counts[cell];
        let mean = if reps > 0 { sums[cell] / reps as f64 } else { f64::NAN };
        let stderr = if reps > 1 {
            let variance =
                (sum_squares[cell] - sums[cell] * sums[cell] / reps as f64) / (reps - 1) as f64;
            (variance.max(0.0) / reps as f64).sqrt()
        } else {
            0.0
        };
        rows.push(SimulationRow {
            lambda,
            r,
            mean_mse: mean,
            stderr,
            reps,
            theory_max_mse: max_mse(&spectrum, r, lambda, &noise_model)?.max_mse,
        });
    }

    Ok(SimulationReport {
        schema_version: SIMULATION_SCHEMA_VERSION,
        config: config.clone(),
        rows,
        rep_seeds,
        failed_seeds,
    })
}

/// Build the kernel named in the configuration and run the full pipeline:
/// design points, normalized kernel matrix, eigendecomposition, replication
/// loop.
pub fn run_simulation(
    config: &SimulationConfig,
    kernels: &KernelRegistry,
    noises: &NoiseRegistry,
) -> Result<SimulationReport> {
    config.validate()?;
    let kernel = kernels.create(&config.kernel)?;
    let points = kernel.design(config.n)?;
    let km = kernel_matrix(kernel.as_ref(), &points)?;
    let system = eigendecompose(&km)?;
    let noise_dist = noises.create(&config.noise_dist)?;
    run_replications(config, &system, &km, noise_dist.as_ref())
}
