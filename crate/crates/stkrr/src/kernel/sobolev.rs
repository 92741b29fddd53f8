//! First-order Sobolev kernel.

use super::{DesignScheme, Interval, Kernel, KernelConfig};
use crate::error::{Error, Result};

/// Sobolev-1 kernel `k(s, t) = min(s, t)` on a domain with `lo >= 0`.
///
/// Reproduces the space of absolutely continuous functions vanishing at the
/// origin; its Gram spectrum decays polynomially (like `i^-2`). Conventional
/// domain `[0, 1]` sampled on an open-left equispaced grid, matching the
/// kernel's zero boundary condition at the left edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sobolev1Kernel {
    domain: Interval,
}

impl Sobolev1Kernel {
    pub fn new(domain: Interval) -> Result<Self> {
        if domain.lo() < 0.0 {
            return Err(Error::invalid(format!(
                "sobolev1 requires a nonnegative domain, got {domain}"
            )));
        }
        Ok(Sobolev1Kernel { domain })
    }
}

impl Kernel for Sobolev1Kernel {
    fn name(&self) -> &'static str {
        "sobolev1"
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
        Ok(s.min(t))
    }

    fn default_scheme(&self) -> DesignScheme {
        DesignScheme::EquispacedOpenLeft
    }
}

pub(super) fn from_config(config: &KernelConfig) -> Result<Box<dyn Kernel>> {
    if let Some(bandwidth) = config.bandwidth {
        return Err(Error::invalid(format!(
            "kernel 'sobolev1' takes no bandwidth (got {bandwidth})"
        )));
    }
    let domain = match config.domain {
        Some(domain) => domain,
        None => Interval::new(0.0, 1.0)?,
    };
    Ok(Box::new(Sobolev1Kernel::new(domain)?))
}
