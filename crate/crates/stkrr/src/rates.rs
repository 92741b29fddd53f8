//! Empirical scaling of the minimized worst-case risk in the noise level.
//!
//! For an eigendecay family with a known scaling law (for example
//! polynomial decay `mu_i ~ i^(-2 alpha)`, whose minimized full-rank risk
//! scales like `gamma^(2 alpha / (2 alpha + 1))`), sweep `gamma = sigma^2/n`
//! over decades, minimize the risk at each level, and fit a log-log slope.
//! The fit reports its own trustworthiness: curvature (low `r^2`), grid
//! boundary hits, and non-decaying spectra all mark the exponent as
//! unreliable rather than silently wrong.

use crate::error::{Error, Result};
use crate::risk::NoiseModel;
use crate::selection::{minimize_lambda, SearchConfig};
use crate::spectral::{synthetic_spectrum, DecayProfile, RiskScaling, ScalingPredictor, SpectrumOnly};
use serde::{Deserialize, Serialize};

/// One noise level of a sweep: the minimizing `lambda`, the minimized
/// full-rank risk, and whether the minimizer sat on a grid edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub gamma: f64,
    pub lambda_star: f64,
    pub risk: f64,
    pub boundary_hit: bool,
}

/// A fitted scaling law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    /// Log-log slope of the minimized risk against the scaling predictor.
    pub risk_exponent: f64,
    /// Log-log slope of the minimizing `lambda` against `gamma`.
    pub lambda_exponent: f64,
    /// Goodness of the risk regression.
    pub r_squared: f64,
    /// The exponent this family is expected to follow, when known.
    pub target_exponent: Option<f64>,
    /// True only when the regression is clean (`r^2 >= 0.99`), no sweep
    /// point hit a grid edge, and the spectrum actually decays.
    pub reliable: bool,
    pub points: Vec<RatePoint>,
}

/// Noise ratios `2^-k` for `k` in `k_min..=k_max`, largest first.
pub fn gamma_sweep(k_min: u32, k_max: u32) -> Result<Vec<f64>> {
    if k_min == 0 || k_max <= k_min {
        return Err(Error::invalid(format!(
            "gamma sweep needs 1 <= k_min < k_max, got {k_min}..={k_max}"
        )));
    }
    Ok((k_min..=k_max).map(|k| 2f64.powi(-(k as i32))).collect())
}

const MIN_SWEEP_POINTS: usize = 4;
const MIN_SWEEP_DECADES: f64 = 3.0;
const RELIABLE_R2: f64 = 0.99;

/// Fit a scaling law for a named decay family at spectrum length `n`.
pub fn rate_fit(
    profile: &dyn DecayProfile,
    n: usize,
    gammas: &[f64],
    search: &SearchConfig,
) -> Result<RateFit> {
    let spectrum = synthetic_spectrum(profile, n)?;
    rate_fit_spectrum(&spectrum, gammas, profile.risk_scaling(), search)
}

/// Fit a scaling law for an explicit spectrum. `scaling` chooses the
/// regression predictor (plain `gamma` when absent) and carries the
/// expected exponent when the family has one.
pub fn rate_fit_spectrum(
    spectrum: &SpectrumOnly,
    gammas: &[f64],
    scaling: Option<RiskScaling>,
    search: &SearchConfig,
) -> Result<RateFit> {
    if gammas.len() < MIN_SWEEP_POINTS {
        return Err(Error::invalid(format!(
            "rate fit needs at least {MIN_SWEEP_POINTS} noise levels, got {}",
            gammas.len()
        )));
    }
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for &gamma in gammas {
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::invalid(format!(
                "noise ratios must be positive and finite, got {gamma}"
            )));
        }
        lo = lo.min(gamma);
        hi = hi.max(gamma);
    }
    if (hi / lo).log10() < MIN_SWEEP_DECADES {
        return Err(Error::invalid(format!(
            "noise ratios must span at least {MIN_SWEEP_DECADES} decades to pin a slope, got {:.2}",
            (hi / lo).log10()
        )));
    }

    let predictor = scaling
        .as_ref()
        .map(|s| s.predictor)
        .unwrap_or(ScalingPredictor::Gamma);
    let n = spectrum.n();
    let mut points = Vec::with_capacity(gammas.len());
    for &gamma in gammas {
        let noise = NoiseModel::from_gamma(gamma)?;
        let found = minimize_lambda(spectrum, n, &noise, search)?;
        points.push(RatePoint {
            gamma,
            lambda_star: found.lambda,
            risk: found.risk,
            boundary_hit: found.boundary.is_some(),
        });
    }

    let xs: Vec<f64> = points.iter().map(|p| predictor.apply(p.gamma).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.risk.ln()).collect();
    let (risk_exponent, r_squared) = least_squares_slope(&xs, &ys)?;

    let lx: Vec<f64> = points.iter().map(|p| p.gamma.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.lambda_star.ln()).collect();
    let (lambda_exponent, _) = least_squares_slope(&lx, &ly)?;

    let no_boundary_hits = points.iter().all(|p| !p.boundary_hit);
    let spectrum_decays = spectrum.mu(n / 2) < 0.01 * spectrum.leading();
    let reliable = r_squared >= RELIABLE_R2 && no_boundary_hits && spectrum_decays;

    Ok(RateFit {
        risk_exponent,
        lambda_exponent,
        r_squared,
        target_exponent: scaling.map(|s| s.exponent),
        reliable,
        points,
    })
}

/// Simple-regression slope and `r^2` of `ys` on `xs`.
fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    if sxx <= 0.0 {
        return Err(Error::degenerate(
            "regression needs at least two distinct abscissae".to_string(),
        ));
    }
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 0.0 };
    Ok((slope, r2))
}
