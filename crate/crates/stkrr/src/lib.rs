//! Spectrally truncated kernel ridge regression with exact worst-case risk.
//!
//! Kernel ridge regression with the Gram matrix replaced by its best rank-`r`
//! approximation admits a closed-form supremum of the prediction risk over
//! the unit ball of the reproducing kernel Hilbert space. This crate builds
//! normalized kernel matrices over one-dimensional designs, eigendecomposes
//! them, evaluates that worst-case risk exactly, selects the regularization
//! level and truncation rank that minimize it, and verifies the formulas by
//! Monte Carlo simulation and noise-scaling studies.
//!
//! The crate is organized along that pipeline:
//!
//! * [`kernel`] — kernel families (a name-keyed registry), design points,
//!   and the normalized Gram matrix;
//! * [`spectral`] — eigendecomposition, truncation views, spectrum-only
//!   data, and synthetic eigendecay families;
//! * [`risk`] — the closed-form worst-case risk and its bounds, critical
//!   radius, statistical dimension;
//! * [`estimator`] — fitting the truncated estimate, prediction, and
//!   targets on the RKHS ball;
//! * [`selection`] — minimizing risk over the regularization level and
//!   picking the rank it licenses;
//! * [`simulate`] — deterministic Monte Carlo replication against the
//!   closed forms;
//! * [`rates`] — log-log scaling of the minimized risk in the noise level.
//!
//! # Example
//!
//! Select the optimal regularization and rank for a first-order Sobolev
//! kernel design, and confirm truncation does not hurt:
//!
//! ```
//! use stkrr::kernel::{kernel_matrix, KernelConfig, KernelRegistry};
//! use stkrr::risk::NoiseModel;
//! use stkrr::selection::{optimal_truncation, SearchConfig};
//! use stkrr::spectral::eigendecompose;
//!
//! let registry = KernelRegistry::with_builtins();
//! let kernel = registry.create(&KernelConfig::new("sobolev1"))?;
//! let points = kernel.design(40)?;
//! let km = kernel_matrix(kernel.as_ref(), &points)?;
//! let system = eigendecompose(&km)?;
//!
//! let noise = NoiseModel::new(4.0, 40)?;
//! let report = optimal_truncation(&system.spectrum(), &noise, &SearchConfig::default())?;
//!
//! assert!(report.r_n < 40, "a handful of directions suffice");
//! assert!(report.min_risk_truncated <= report.min_risk_full);
//! # Ok::<(), stkrr::Error>(())
//! ```

mod csvutil;

pub mod error;
pub mod estimator;
pub mod kernel;
pub mod rates;
pub mod risk;
pub mod selection;
pub mod simulate;
pub mod spectral;

pub use error::{Error, Result};
