//! Gaussian (squared-exponential) kernel.

use super::{DesignScheme, Interval, Kernel, KernelConfig};
use crate::error::{Error, Result};

/// Gaussian kernel `k(s, t) = exp(-(s - t)^2 / (2 b^2))` with bandwidth `b`.
///
/// Infinitely smooth; its Gram spectrum decays near-exponentially, so only a
/// handful of eigendirections carry signal. Conventional domain `[-1, 1]`
/// sampled on a closed equispaced grid, bandwidth `0.1` unless configured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianKernel {
    bandwidth: f64,
    domain: Interval,
    // Precomputed 1 / (2 b^2).
    inv_two_b2: f64,
}

pub const DEFAULT_BANDWIDTH: f64 = 0.1;

impl GaussianKernel {
    pub fn new(bandwidth: f64, domain: Interval) -> Result<Self> {
        if !bandwidth.is_finite() || bandwidth <= 0.0 {
            return Err(Error::invalid(format!(
                "gaussian bandwidth must be positive and finite, got {bandwidth}"
            )));
        }
        Ok(GaussianKernel {
            bandwidth,
            domain,
            inv_two_b2: 1.0 / (2.0 * bandwidth * bandwidth),
        })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }
}

impl Kernel for GaussianKernel {
    fn name(&self) -> &'static str {
        "gaussian"
    }

    fn domain(&self) -> Interval {
        self.domain
    }

    fn eval(&self, s: f64, t: f64) -> Result<f64> {
        for x in [s, t] {
            if !self.domain.contains(x) {
                return Err(Error::OutOfDomain {
                    value: x,
                    lo: self.domain.lo(),
                    hi: self.domain.hi(),
                });
            }
        }
        let d = s - t;
        Ok((-d * d * self.inv_two_b2).exp())
    }

    fn default_scheme(&self) -> DesignScheme {
        DesignScheme::EquispacedClosed
    }
}

pub(super) fn from_config(config: &KernelConfig) -> Result<Box<dyn Kernel>> {
    let domain = match config.domain {
        Some(domain) => domain,
        None => Interval::new(-1.0, 1.0)?,
    };
    let bandwidth = config.bandwidth.unwrap_or(DEFAULT_BANDWIDTH);
    Ok(Box::new(GaussianKernel::new(bandwidth, domain)?))
}
