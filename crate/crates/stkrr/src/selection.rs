//! Selection of the regularization level and the truncation rank.
//!
//! The workflow mirrors how the estimator is meant to be used: minimize the
//! full-rank worst-case risk over `lambda` ([`minimize_lambda`]), then read
//! off the smallest rank whose discarded eigenvalue is already below the
//! spectral threshold of that `lambda` ([`r_of_lambda`]). The truncated
//! estimator at `(lambda_n, r_n)` is never worse than full kernel ridge at
//! `lambda_n`; [`optimal_truncation`] packages both numbers and both risks.

use crate::csvutil::{expect_header, parse_field, split_fields};
use crate::error::{Error, Result};
use crate::risk::{h, max_mse, NoiseModel, RiskPoint};
use crate::spectral::SpectrumOnly;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

// ===== Search configuration =====

/// Controls for the `lambda` search grid and refinement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Coarse grid size (log-spaced).
    pub grid_points: usize,
    /// Grid lower end as a multiple of the leading eigenvalue.
    pub lambda_min_factor: f64,
    /// Grid upper end as a multiple of the leading eigenvalue.
    pub lambda_max_factor: f64,
    /// Stop refining once the log-space bracket is narrower than this
    /// (equivalently: relative precision of the reported `lambda`).
    pub rel_tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            grid_points: 400,
            lambda_min_factor: 1e-6,
            lambda_max_factor: 10.0,
            rel_tol: 1e-6,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 2 {
            return Err(Error::invalid(format!(
                "lambda grid needs at least 2 points, got {}",
                self.grid_points
            )));
        }
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.lambda_min_factor)
            || !ok(self.lambda_max_factor)
            || self.lambda_min_factor >= self.lambda_max_factor
        {
            return Err(Error::invalid(format!(
                "lambda grid factors must satisfy 0 < min < max, got {} and {}",
                self.lambda_min_factor, self.lambda_max_factor
            )));
        }
        if !ok(self.rel_tol) || self.rel_tol >= 1.0 {
            return Err(Error::invalid(format!(
                "relative tolerance must lie in (0, 1), got {}",
                self.rel_tol
            )));
        }
        Ok(())
    }
}

/// Which end of the search grid a minimizer landed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridEdge {
    Lower,
    Upper,
}

/// Result of a one-dimensional `lambda` minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaSearch {
    /// The best `lambda` seen (grid scan plus refinement).
    pub lambda: f64,
    /// The worst-case risk at that `lambda`.
    pub risk: f64,
    /// Grid neighbors that bracketed the coarse minimum.
    pub bracket: (f64, f64),
    /// Set when the coarse minimum sat on a grid edge; the reported value is
    /// then a boundary point, not an interior optimum.
    pub boundary: Option<GridEdge>,
}

/// The log-spaced `lambda` grid spanning
/// `[lambda_min_factor, lambda_max_factor] * mu_1`.
pub fn lambda_grid(spectrum: &SpectrumOnly, config: &SearchConfig) -> Result<Vec<f64>> {
    config.validate()?;
    let mu1 = spectrum.leading();
    if mu1 <= 0.0 {
        return Err(Error::degenerate(
            "cannot scale a lambda grid to an all-zero spectrum".to_string(),
        ));
    }
    let lo = (config.lambda_min_factor * mu1).ln();
    let hi = (config.lambda_max_factor * mu1).ln();
    let m = config.grid_points;
    let mut grid = Vec::with_capacity(m);
    for i in 0..m {
        let t = lo + (hi - lo) * i as f64 / (m - 1) as f64;
        grid.push(t.exp());
    }
    // Pin the endpoints exactly so boundary checks are meaningful.
    grid[0] = config.lambda_min_factor * mu1;
    grid[m - 1] = config.lambda_max_factor * mu1;
    Ok(grid)
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;
const MAX_REFINE_ITERATIONS: usize = 200;

/// Minimize the rank-`r` worst-case risk over `lambda`.
///
/// A coarse log-grid scan (ties resolved toward the smaller `lambda`) is
/// followed by golden-section refinement in log space between the grid
/// neighbors of the coarse minimum. Every evaluation — grid or refinement —
/// competes for the reported minimum, so the result is never worse than the
/// best grid point. When the coarse minimum sits on a grid edge the
/// refinement is skipped and the edge is reported via `boundary`.
pub fn minimize_lambda(
    spectrum: &SpectrumOnly,
    r: usize,
    noise: &NoiseModel,
    config: &SearchConfig,
) -> Result<LambdaSearch> {
    spectrum.check_rank(r)?;
    let grid = lambda_grid(spectrum, config)?;

    let mut best_lambda = f64::NAN;
    let mut best_risk = f64::INFINITY;
    let mut best_index = 0;
    for (i, &lambda) in grid.iter().enumerate() {
        let value = max_mse(spectrum, r, lambda, noise)?.max_mse;
        if value < best_risk {
            best_risk = value;
            best_lambda = lambda;
            best_index = i;
        }
    }

    let boundary = if best_index == 0 {
        Some(GridEdge::Lower)
    } else if best_index == grid.len() - 1 {
        Some(GridEdge::Upper)
    } else {
        None
    };
    let bracket = (
        grid[best_index.saturating_sub(1)],
        grid[(best_index + 1).min(grid.len() - 1)],
    );

    if boundary.is_none() {
        let mut a = bracket.0.ln();
        let mut b = bracket.1.ln();
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        let probe = |t: f64, best_risk: &mut f64, best_lambda: &mut f64| -> Result<f64> {
            let lambda = t.exp();
            let value = max_mse(spectrum, r, lambda, noise)?.max_mse;
            if value < *best_risk {
                *best_risk = value;
                *best_lambda = lambda;
            }
            Ok(value)
        };
        let mut fc = probe(c, &mut best_risk, &mut best_lambda)?;
        let mut fd = probe(d, &mut best_risk, &mut best_lambda)?;
        let mut iterations = 0;
        while b - a > config.rel_tol && iterations < MAX_REFINE_ITERATIONS {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - INV_PHI * (b - a);
                fc = probe(c, &mut best_risk, &mut best_lambda)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + INV_PHI * (b - a);
                fd = probe(d, &mut best_risk, &mut best_lambda)?;
            }
            iterations += 1;
        }
        probe(0.5 * (a + b), &mut best_risk, &mut best_lambda)?;
    }

    Ok(LambdaSearch {
        lambda: best_lambda,
        risk: best_risk,
        bracket,
        boundary,
    })
}

/// The spectral threshold of a ridge level: `max_i h(lambda, mu_i)`,
/// the largest approximation error any single eigendirection can carry.
pub fn spectral_threshold(spectrum: &SpectrumOnly, lambda: f64) -> Result<f64> {
    let mut best = 0.0f64;
    for &mu in spectrum.values() {
        best = best.max(h(lambda, mu)?);
    }
    Ok(best)
}

/// The smallest rank whose first discarded eigenvalue already sits below the
/// spectral threshold of `lambda`. Truncating at this rank (or deeper)
/// leaves the worst-case approximation error unchanged while shrinking the
/// estimation error, so the truncated estimator dominates the full one.
pub fn r_of_lambda(spectrum: &SpectrumOnly, lambda: f64) -> Result<usize> {
    if spectrum.leading() <= 0.0 {
        return Err(Error::degenerate(
            "rank selection needs a nonzero spectrum".to_string(),
        ));
    }
    let threshold = spectral_threshold(spectrum, lambda)?;
    for r in 1..spectrum.n() {
        if spectrum.after(r) <= threshold {
            return Ok(r);
        }
    }
    Ok(spectrum.n())
}

// ===== The packaged selection =====

const REPORT_SCHEMA_VERSION: u32 = 1;

/// The outcome of the full selection pipeline: the risk-minimizing ridge
/// level for the untruncated estimator, the rank it licenses, and the
/// worst-case risks of both estimators at that level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    pub schema_version: u32,
    pub n: usize,
    pub sigma2: f64,
    pub lambda_n: f64,
    pub r_n: usize,
    pub min_risk_full: f64,
    pub min_risk_truncated: f64,
    /// Present when `lambda_n` landed on a grid edge instead of an interior
    /// minimum; such a report should not be trusted as an optimum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<GridEdge>,
}

impl TruncationReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: TruncationReport = serde_json::from_str(text)
            .map_err(|e| Error::invalid(format!("malformed truncation report: {e}")))?;
        if report.schema_version != REPORT_SCHEMA_VERSION {
            return Err(Error::invalid(format!(
                "unsupported truncation report schema version {} (expected {})",
                report.schema_version, REPORT_SCHEMA_VERSION
            )));
        }
        Ok(report)
    }
}

/// Run the full selection pipeline: minimize the full-rank risk over
/// `lambda`, select the rank for that level, then minimize again at the
/// selected rank so the truncated figure reports the best risk that rank
/// can achieve rather than the risk at the full-rank minimizer.
pub fn optimal_truncation(
    spectrum: &SpectrumOnly,
    noise: &NoiseModel,
    config: &SearchConfig,
) -> Result<TruncationReport> {
    let n = spectrum.n();
    let search = minimize_lambda(spectrum, n, noise, config)?;
    let r_n = r_of_lambda(spectrum, search.lambda)?;
    let truncated = minimize_lambda(spectrum, r_n, noise, config)?;
    Ok(TruncationReport {
        schema_version: REPORT_SCHEMA_VERSION,
        n,
        sigma2: noise.sigma2(),
        lambda_n: search.lambda,
        r_n,
        min_risk_full: search.risk,
        min_risk_truncated: truncated.risk,
        boundary: search.boundary,
    })
}

// ===== Risk curves =====

/// A worst-case risk surface evaluated on a grid of `(lambda, r)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskCurve {
    points: Vec<RiskPoint>,
}

impl RiskCurve {
    pub fn from_points(points: Vec<RiskPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput("risk curve points"));
        }
        Ok(RiskCurve { points })
    }

    pub fn points(&self) -> &[RiskPoint] {
        &self.points
    }

    /// The point with the smallest risk; ties go to the earliest point, so
    /// on an ascending `lambda` grid the smaller `lambda` wins.
    pub fn argmin(&self) -> &RiskPoint {
        let mut best = &self.points[0];
        for point in &self.points[1..] {
            if point.max_mse < best.max_mse {
                best = point;
            }
        }
        best
    }

    /// Fixed-schema CSV. Floats are written in shortest round-trip form, so
    /// parsing the output reproduces the exact values.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("lambda,r,wae,ee,max_mse\n");
        for p in &self.points {
            writeln!(out, "{},{},{},{},{}", p.lambda, p.r, p.wae, p.ee, p.max_mse)
                .expect("string writes cannot fail");
        }
        out
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        expect_header(text.lines(), "lambda,r,wae,ee,max_mse")?;
        let mut points = Vec::new();
        for (idx, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let line_no = idx + 1;
            let fields = split_fields(line, 5, line_no)?;
            points.push(RiskPoint {
                lambda: parse_field(fields[0], "lambda", line_no)?,
                r: parse_field(fields[1], "r", line_no)?,
                wae: parse_field(fields[2], "wae", line_no)?,
                ee: parse_field(fields[3], "ee", line_no)?,
                max_mse: parse_field(fields[4], "max_mse", line_no)?,
            });
        }
        RiskCurve::from_points(points)
    }
}

/// Evaluate the rank-`r` worst-case risk at each `lambda`.
pub fn risk_curve(
    spectrum: &SpectrumOnly,
    r: usize,
    lambdas: &[f64],
    noise: &NoiseModel,
) -> Result<RiskCurve> {
    if lambdas.is_empty() {
        return Err(Error::EmptyInput("lambda grid"));
    }
    let mut points = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        points.push(max_mse(spectrum, r, lambda, noise)?);
    }
    RiskCurve::from_points(points)
}
