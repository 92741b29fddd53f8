//! Closed-form worst-case risk over the unit ball of the RKHS.
//!
//! For a normalized kernel matrix with spectrum `mu_1 >= ... >= mu_n` and a
//! rank-`r` spectrally truncated ridge estimate with parameter `lambda`, the
//! exact supremum of the mean-squared prediction error over targets in the
//! RKHS unit ball splits into two closed-form pieces:
//!
//! * a worst-case approximation error ([`wae`]): the larger of
//!   `max_{i <= r} h(lambda, mu_i)` with `h(lambda, x) = lambda^2 x / (x +
//!   lambda)^2`, and the first discarded eigenvalue `mu_{r+1}`;
//! * an estimation error ([`estimation_error`]): `(sigma^2 / n) *
//!   sum_{i <= r} (mu_i / (mu_i + lambda))^2`.
//!
//! [`max_mse`] returns their sum. Everything here depends on the spectrum
//! alone — the eigenbasis never enters — which is why these functions take
//! [`SpectrumOnly`].

use crate::error::{Error, Result};
use crate::spectral::SpectrumOnly;
use serde::{Deserialize, Serialize};

// ===== Noise model =====

/// Isotropic noise: `n` observations with per-coordinate variance `sigma^2`.
/// Only the ratio `gamma = sigma^2 / n` enters any risk formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    sigma2: f64,
    n: usize,
}

impl NoiseModel {
    pub fn new(sigma2: f64, n: usize) -> Result<Self> {
        if !sigma2.is_finite() || sigma2 < 0.0 {
            return Err(Error::invalid(format!(
                "noise variance must be finite and nonnegative, got {sigma2}"
            )));
        }
        if n == 0 {
            return Err(Error::invalid("noise model needs n >= 1".to_string()));
        }
        Ok(NoiseModel { sigma2, n })
    }

    /// Noise model with a prescribed ratio `gamma = sigma^2 / n`.
    pub fn from_gamma(gamma: f64) -> Result<Self> {
        NoiseModel::new(gamma, 1)
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `sigma^2 / n`.
    pub fn gamma(&self) -> f64 {
        self.sigma2 / self.n as f64
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::invalid(format!(
            "regularization parameter must be positive and finite, got {lambda}"
        )));
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<()> {
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::invalid(format!(
            "radius must be positive and finite, got {delta}"
        )));
    }
    Ok(())
}

// ===== Elementary pieces =====

/// The spectral approximation-error profile `h(lambda, x) = lambda^2 x /
/// (x + lambda)^2`.
///
/// For fixed `lambda` it peaks at `x = lambda` with value `lambda / 4`, so
/// `lambda / 4` bounds it uniformly.
pub fn h(lambda: f64, x: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if !x.is_finite() || x < 0.0 {
        return Err(Error::invalid(format!(
            "h requires a nonnegative finite eigenvalue, got {x}"
        )));
    }
    let s = x + lambda;
    Ok(lambda * lambda * x / (s * s))
}

/// Exact worst-case approximation error of the rank-`r` truncated ridge
/// estimate over the RKHS unit ball:
/// `max{ max_{i <= r} h(lambda, mu_i), mu_{r+1} }`.
///
/// The inner maximum ranges over *all* retained eigenvalues — `h` peaks at
/// `x = lambda`, so the binding one is whichever retained eigenvalue sits
/// closest to `lambda`, not necessarily the smallest.
pub fn wae(spectrum: &SpectrumOnly, r: usize, lambda: f64) -> Result<f64> {
    spectrum.check_rank(r)?;
    check_lambda(lambda)?;
    let mut best = 0.0f64;
    for &mu in &spectrum.values()[..r] {
        let s = mu + lambda;
        best = best.max(lambda * lambda * mu / (s * s));
    }
    Ok(best.max(spectrum.after(r)))
}

/// Cheap upper bound `max{ lambda / 4, mu_{r+1} }` on [`wae`].
pub fn wae_upper(spectrum: &SpectrumOnly, r: usize, lambda: f64) -> Result<f64> {
    spectrum.check_rank(r)?;
    check_lambda(lambda)?;
    Ok((lambda / 4.0).max(spectrum.after(r)))
}

/// Exact estimation (noise) error of the rank-`r` truncated ridge estimate:
/// `(sigma^2 / n) * sum_{i <= r} (mu_i / (mu_i + lambda))^2`.
pub fn estimation_error(
    spectrum: &SpectrumOnly,
    r: usize,
    lambda: f64,
    noise: &NoiseModel,
) -> Result<f64> {
    spectrum.check_rank(r)?;
    check_lambda(lambda)?;
    let gamma = noise.gamma();
    let mut sum = 0.0;
    for &mu in &spectrum.values()[..r] {
        let f = mu / (mu + lambda);
        sum += f * f;
    }
    Ok(gamma * sum)
}

// ===== Worst-case MSE =====

/// One evaluated point of the worst-case risk surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskPoint {
    pub lambda: f64,
    pub r: usize,
    /// Worst-case approximation error (scaled by the ball radius squared).
    pub wae: f64,
    /// Estimation error.
    pub ee: f64,
    /// `wae + ee`, stored as the exact floating-point sum of the two fields.
    pub max_mse: f64,
}

/// Exact supremum of the mean-squared error over the RKHS unit ball.
pub fn max_mse(
    spectrum: &SpectrumOnly,
    r: usize,
    lambda: f64,
    noise: &NoiseModel,
) -> Result<RiskPoint> {
    max_mse_with_radius(spectrum, r, lambda, noise, 1.0)
}

/// Exact supremum of the mean-squared error over the RKHS ball of radius
/// `radius`.
///
/// Rescaling the ball is equivalent to dividing the noise variance by
/// `radius^2` and multiplying the whole risk by `radius^2`; only the
/// approximation term picks up the factor.
pub fn max_mse_with_radius(
    spectrum: &SpectrumOnly,
    r: usize,
    lambda: f64,
    noise: &NoiseModel,
    radius: f64,
) -> Result<RiskPoint> {
    if !radius.is_finite() || radius <= 0.0 {
        return Err(Error::invalid(format!(
            "ball radius must be positive and finite, got {radius}"
        )));
    }
    let wae = wae(spectrum, r, lambda)? * (radius * radius);
    let ee = estimation_error(spectrum, r, lambda, noise)?;
    Ok(RiskPoint {
        lambda,
        r,
        wae,
        ee,
        max_mse: wae + ee,
    })
}

/// Exact supremum of the *regularized* risk `||f - f_target||_n^2 +
/// lambda ||f||_H^2` of the noiseless rank-`r` approximant over the unit
/// ball: `max{ lambda mu_1 / (mu_1 + lambda), mu_{r+1} }`.
pub fn regularized_risk_sup(spectrum: &SpectrumOnly, r: usize, lambda: f64) -> Result<f64> {
    spectrum.check_rank(r)?;
    check_lambda(lambda)?;
    let mu1 = spectrum.leading();
    let closed = lambda * mu1 / (mu1 + lambda);
    // x -> lambda x / (x + lambda) is increasing, so the leading eigenvalue
    // attains the maximum; keep the O(n) scan as a debug cross-check.
    debug_assert!({
        let scanned = spectrum
            .values()
            .iter()
            .map(|&mu| lambda * mu / (mu + lambda))
            .fold(0.0f64, f64::max);
        (scanned - closed).abs() <= 1e-15 * closed.max(1e-300)
    });
    Ok(closed.max(spectrum.after(r)))
}

// ===== Complexity and the weak bound =====

/// Truncated kernel complexity
/// `R_r(delta) = sqrt( (sigma^2 / n) * sum_{i <= r} min(mu_i, delta^2) )`.
pub fn kernel_complexity(
    spectrum: &SpectrumOnly,
    r: usize,
    delta: f64,
    noise: &NoiseModel,
) -> Result<f64> {
    spectrum.check_rank(r)?;
    check_delta(delta)?;
    let d2 = delta * delta;
    let sum: f64 = spectrum.values()[..r].iter().map(|&mu| mu.min(d2)).sum();
    Ok((noise.gamma() * sum).sqrt())
}

/// Closed-form upper bound on [`max_mse`], valid for
/// `lambda >= max(delta^2, 4 mu_{r+1})`:
///
/// `first_term + (R_r(delta) / delta)^2`,
///
/// where `first_term` is `lambda / 4` in general and improves to
/// `h(lambda, mu_1) = mu_1 lambda^2 / (lambda + mu_1)^2` when
/// `lambda >= mu_1`. The improved term is clamped from below by
/// `mu_{r+1}`: the approximation error of the discarded directions is at
/// least the first discarded eigenvalue, which `h(lambda, mu_1)` alone can
/// undercut when the spectrum is nearly flat across the truncation point.
/// The clamp keeps the improvement sound and never exceeds `lambda / 4`,
/// since the validity condition already forces `lambda / 4 >= mu_{r+1}`.
/// Violating the validity condition is an error rather than a silently
/// wrong bound.
pub fn weak_bound(
    spectrum: &SpectrumOnly,
    r: usize,
    lambda: f64,
    delta: f64,
    noise: &NoiseModel,
) -> Result<f64> {
    spectrum.check_rank(r)?;
    check_lambda(lambda)?;
    check_delta(delta)?;
    let d2 = delta * delta;
    let floor = d2.max(4.0 * spectrum.after(r));
    if lambda < floor {
        return Err(Error::invalid(format!(
            "weak bound requires lambda >= max(delta^2, 4 mu_(r+1)) = {floor}, got {lambda}"
        )));
    }
    let mu1 = spectrum.leading();
    let first = if lambda >= mu1 {
        h(lambda, mu1)?.max(spectrum.after(r))
    } else {
        lambda / 4.0
    };
    let complexity = kernel_complexity(spectrum, r, delta, noise)?;
    let ratio = complexity / delta;
    Ok(first + ratio * ratio)
}

// ===== Critical radius and statistical dimension =====

/// Relative residual at which the critical-radius bisection stops.
const CRITICAL_RADIUS_TOL: f64 = 1e-10;
const CRITICAL_RADIUS_MAX_ITER: usize = 200;

/// The critical radius `delta_n > 0` solving `delta^2 = 2 R_n(delta)` for
/// the full spectrum.
///
/// `delta^2 / R_n(delta)` is strictly increasing, so the root is unique;
/// it is found by bisection on `g(delta) = delta^2 - 2 R_n(delta)` starting
/// from the bracket `[1e-12, sqrt(mu_1) + 2 sqrt(gamma n mu_1)]`. That
/// initial upper end can undershoot the root when `gamma n mu_1` is small,
/// so it is doubled until `g` turns nonnegative before bisecting.
pub fn critical_radius(spectrum: &SpectrumOnly, noise: &NoiseModel) -> Result<f64> {
    let gamma = noise.gamma();
    if gamma <= 0.0 {
        return Err(Error::degenerate(
            "critical radius undefined for zero noise".to_string(),
        ));
    }
    let mu1 = spectrum.leading();
    if mu1 <= 0.0 {
        return Err(Error::degenerate(
            "critical radius undefined for an all-zero spectrum".to_string(),
        ));
    }
    let n = spectrum.n() as f64;
    let complexity = |delta: f64| -> f64 {
        let d2 = delta * delta;
        let sum: f64 = spectrum.values().iter().map(|&mu| mu.min(d2)).sum();
        (gamma * sum).sqrt()
    };
    let g = |delta: f64| delta * delta - 2.0 * complexity(delta);

    let mut lo = 1e-12;
    let mut hi = mu1.sqrt() + 2.0 * (gamma * n * mu1).sqrt();
    let mut expansions = 0;
    while g(hi) < 0.0 {
        hi *= 2.0;
        expansions += 1;
        if expansions > 200 {
            return Err(Error::numeric(
                "critical-radius bracket expansion failed".to_string(),
            ));
        }
    }
    if g(lo) > 0.0 {
        // The root sits below any representable radius of interest.
        return Err(Error::degenerate(format!(
            "critical radius below {lo}; noise level is effectively zero"
        )));
    }

    for _ in 0..CRITICAL_RADIUS_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        let value = g(mid);
        if value.abs() <= CRITICAL_RADIUS_TOL * mid * mid {
            return Ok(mid);
        }
        if value < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::numeric(format!(
        "critical-radius bisection did not reach relative residual {CRITICAL_RADIUS_TOL}"
    )))
}

/// Statistical dimension at radius `delta`: the smallest 1-based `r` with
/// `mu_r <= delta^2`, or `None` when even the smallest eigenvalue exceeds
/// `delta^2` (the caller must treat that as "beyond the spectrum", not as a
/// usable rank).
pub fn statistical_dimension(spectrum: &SpectrumOnly, delta: f64) -> Result<Option<usize>> {
    check_delta(delta)?;
    let d2 = delta * delta;
    for (i, &mu) in spectrum.values().iter().enumerate() {
        if mu <= d2 {
            return Ok(Some(i + 1));
        }
    }
    Ok(None)
}
