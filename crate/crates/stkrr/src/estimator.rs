//! Spectrally truncated kernel ridge fits and target functions on the ball.
//!
//! Observations `y` live on the raw scale; internally everything works with
//! `y / sqrt(n)` so that the normalized kernel matrix, its spectrum, and the
//! empirical norm line up. A fit keeps three faces of the same object: the
//! spectral coefficients `alpha`, the kernel coefficients `omega` (for
//! out-of-sample prediction), and the fitted values `fitted_u` on the
//! normalized scale.

use crate::error::{Error, Result};
use crate::kernel::{Kernel, KernelMatrix};
use crate::spectral::EigenSystem;
use nalgebra::DVector;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn check_lambda(lambda: f64) -> Result<()> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::invalid(format!(
            "regularization parameter must be positive and finite, got {lambda}"
        )));
    }
    Ok(())
}

/// A fitted rank-`r` truncated ridge estimate.
#[derive(Debug, Clone)]
pub struct TruncatedEstimate {
    lambda: f64,
    r: usize,
    /// Spectral coefficients `alpha_i = z_i / (mu_i + lambda)`, length `r`.
    alpha: DVector<f64>,
    /// Kernel-space coefficients `omega = U_r alpha`, length `n`.
    omega: DVector<f64>,
    /// Fitted values on the normalized scale, length `n`.
    fitted_u: DVector<f64>,
    /// The retained eigenvalues, for norm computations.
    mu_retained: Vec<f64>,
}

impl TruncatedEstimate {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn alpha(&self) -> &DVector<f64> {
        &self.alpha
    }

    pub fn omega(&self) -> &DVector<f64> {
        &self.omega
    }

    /// Fitted values on the normalized scale (`U_r` coordinates times the
    /// shrinkage factors); compare against targets on the same scale.
    pub fn fitted_u(&self) -> &DVector<f64> {
        &self.fitted_u
    }

    /// Fitted values on the observation scale: `sqrt(n) * fitted_u`.
    pub fn fitted_values(&self) -> DVector<f64> {
        let scale = (self.fitted_u.len() as f64).sqrt();
        &self.fitted_u * scale
    }

    /// Squared RKHS norm of the fit: `sum_i mu_i alpha_i^2`.
    pub fn hilbert_norm_sq(&self) -> f64 {
        self.mu_retained
            .iter()
            .zip(self.alpha.iter())
            .map(|(&mu, &a)| mu * a * a)
            .sum()
    }
}

/// Fit the rank-`r` truncated ridge estimate with parameter `lambda` to raw
/// observations `y` (length `n`).
///
/// Requires every retained eigenvalue to be strictly positive — truncating
/// inside the zero tail would divide information that is not there.
pub fn fit(
    system: &EigenSystem,
    r: usize,
    lambda: f64,
    y: &DVector<f64>,
) -> Result<TruncatedEstimate> {
    check_lambda(lambda)?;
    let n = system.n();
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            context: "fit observations",
            expected: n,
            actual: y.len(),
        });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("observations must be finite".to_string()));
    }
    let trunc = system.truncate(r)?;
    let retained = trunc.retained();
    if retained[r - 1] <= 0.0 {
        return Err(Error::ZeroEigenvalue { r });
    }

    let y_tilde = y / (n as f64).sqrt();
    let basis = trunc.basis();
    let z = basis.transpose() * &y_tilde;

    let mut alpha = DVector::zeros(r);
    let mut shrunk = DVector::zeros(r);
    for i in 0..r {
        let denom = retained[i] + lambda;
        alpha[i] = z[i] / denom;
        shrunk[i] = retained[i] / denom * z[i];
    }
    let omega = &basis * &alpha;
    let fitted_u = &basis * &shrunk;

    Ok(TruncatedEstimate {
        lambda,
        r,
        alpha,
        omega,
        fitted_u,
        mu_retained: retained.to_vec(),
    })
}

/// Evaluate the fitted function at an arbitrary point:
/// `f_hat(x) = (1 / sqrt(n)) sum_j omega_j k(x, x_j)`.
///
/// At the design points themselves this reproduces
/// `sqrt(n) * fitted_u` up to eigendecomposition round-off.
pub fn predict_at(
    kernel: &dyn Kernel,
    points: &[f64],
    estimate: &TruncatedEstimate,
    x: f64,
) -> Result<f64> {
    if points.len() != estimate.omega.len() {
        return Err(Error::DimensionMismatch {
            context: "prediction design points",
            expected: estimate.omega.len(),
            actual: points.len(),
        });
    }
    let mut acc = 0.0;
    for (j, &xj) in points.iter().enumerate() {
        acc += estimate.omega[j] * kernel.eval(x, xj)?;
    }
    Ok(acc / (points.len() as f64).sqrt())
}

/// The noiseless rank-`r` approximant of a target: the same fit run on the
/// target's own design values instead of noisy observations.
pub fn approximant(
    system: &EigenSystem,
    r: usize,
    lambda: f64,
    target: &TargetFunction,
) -> Result<TruncatedEstimate> {
    fit(system, r, lambda, &target.values())
}

/// A target function expressed through its kernel coefficients.
#[derive(Debug, Clone)]
pub struct TargetFunction {
    omega_star: DVector<f64>,
    u_star: DVector<f64>,
    hilbert_norm_sq: f64,
}

impl TargetFunction {
    /// Build a target `f* = (1/sqrt(n)) sum_j omega_j k(., x_j)` from its
    /// coefficient vector. Its design values on the normalized scale are
    /// `u* = K omega` and its squared RKHS norm is `omega' K omega`.
    pub fn from_omega(kernel_matrix: &KernelMatrix, omega: DVector<f64>) -> Result<Self> {
        if omega.len() != kernel_matrix.n() {
            return Err(Error::DimensionMismatch {
                context: "target coefficients",
                expected: kernel_matrix.n(),
                actual: omega.len(),
            });
        }
        if omega.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(
                "target coefficients must be finite".to_string(),
            ));
        }
        let u_star = kernel_matrix.apply(&omega);
        let hilbert_norm_sq = omega.dot(&u_star);
        if hilbert_norm_sq < 0.0 && hilbert_norm_sq > -1e-12 {
            // Round-off on a PSD quadratic form.
            return Ok(TargetFunction {
                omega_star: omega,
                u_star,
                hilbert_norm_sq: 0.0,
            });
        }
        if hilbert_norm_sq < 0.0 {
            return Err(Error::numeric(format!(
                "target norm came out negative ({hilbert_norm_sq}); kernel matrix is not PSD"
            )));
        }
        Ok(TargetFunction {
            omega_star: omega,
            u_star,
            hilbert_norm_sq,
        })
    }

    pub fn omega_star(&self) -> &DVector<f64> {
        &self.omega_star
    }

    /// Design values on the normalized scale.
    pub fn u_star(&self) -> &DVector<f64> {
        &self.u_star
    }

    /// Design values on the observation scale: `sqrt(n) * u*`.
    pub fn values(&self) -> DVector<f64> {
        let scale = (self.u_star.len() as f64).sqrt();
        &self.u_star * scale
    }

    pub fn hilbert_norm_sq(&self) -> f64 {
        self.hilbert_norm_sq
    }

    /// Coordinates of `u*` in an eigenbasis: `v* = U' u*`.
    pub fn v_star(&self, system: &EigenSystem) -> Result<DVector<f64>> {
        if system.n() != self.u_star.len() {
            return Err(Error::DimensionMismatch {
                context: "target eigen-coordinates",
                expected: self.u_star.len(),
                actual: system.n(),
            });
        }
        Ok(system.basis().transpose() * &self.u_star)
    }
}

/// Draw a target on the boundary of the RKHS unit ball: Gaussian kernel
/// coefficients rescaled to unit Hilbert norm. Deterministic in the seed.
pub fn sample_ball_target(kernel_matrix: &KernelMatrix, seed: u64) -> Result<TargetFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_ball_target_rng(kernel_matrix, &mut rng)
}

/// [`sample_ball_target`] driven by a caller-supplied generator, for use
/// inside larger deterministic replication streams.
pub fn sample_ball_target_rng(
    kernel_matrix: &KernelMatrix,
    rng: &mut dyn RngCore,
) -> Result<TargetFunction> {
    let n = kernel_matrix.n();
    for _ in 0..100 {
        let omega = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut *rng));
        let u = kernel_matrix.apply(&omega);
        let norm_sq: f64 = omega.dot(&u);
        if norm_sq > 1e-300 {
            let scale = norm_sq.sqrt().recip();
            return Ok(TargetFunction {
                omega_star: &omega * scale,
                u_star: &u * scale,
                hilbert_norm_sq: 1.0,
            });
        }
    }
    Err(Error::degenerate(
        "could not draw a target with positive norm; kernel matrix is essentially zero".to_string(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{kernel_matrix, DesignScheme, Interval, KernelConfig, KernelRegistry};
    use crate::spectral::eigendecompose_matrix;
    use approx::assert_relative_eq;
    use nalgebra::{dmatrix, dvector, DMatrix};

    fn diag_system(values: &[f64]) -> EigenSystem {
        eigendecompose_matrix(&DMatrix::from_diagonal(&DVector::from_row_slice(values))).unwrap()
    }

    #[test]
    fn fit_on_a_one_point_system_matches_hand_arithmetic() {
        // mu = 1, y = 2, lambda = 1: z = 2, alpha = 1, fitted value 1.
        let system = diag_system(&[1.0]);
        let est = fit(&system, 1, 1.0, &dvector![2.0]).unwrap();
        assert_relative_eq!(est.fitted_u()[0], 1.0, max_relative = 1e-15);
        assert_relative_eq!(est.hilbert_norm_sq(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(est.fitted_values()[0], 1.0, max_relative = 1e-15);
        assert_eq!(est.r(), 1);
        assert_eq!(est.lambda(), 1.0);
    }

    #[test]
    fn fit_on_a_diagonal_system_shrinks_each_coordinate() {
        // mu = (4, 1), y_tilde = (3, 4), lambda = 1: shrinkage factors
        // 4/5 and 1/2, so fitted_u = (2.4, 2.0); truncating to r = 1
        // zeroes the second coordinate entirely.
        let system = diag_system(&[4.0, 1.0]);
        let sqrt_n = 2f64.sqrt();
        let y = dvector![3.0 * sqrt_n, 4.0 * sqrt_n];

        let full = fit(&system, 2, 1.0, &y).unwrap();
        assert_relative_eq!(full.fitted_u()[0], 2.4, max_relative = 1e-14);
        assert_relative_eq!(full.fitted_u()[1], 2.0, max_relative = 1e-14);
        // alpha = (0.6, 2.0); norm = 4 * 0.36 + 1 * 4 = 5.44.
        assert_relative_eq!(full.hilbert_norm_sq(), 5.44, max_relative = 1e-14);

        let truncated = fit(&system, 1, 1.0, &y).unwrap();
        assert_relative_eq!(truncated.fitted_u()[0], 2.4, max_relative = 1e-14);
        assert_relative_eq!(truncated.fitted_u()[1], 0.0, epsilon = 1e-14);
        assert_relative_eq!(truncated.hilbert_norm_sq(), 1.44, max_relative = 1e-14);
    }

    #[test]
    fn fit_rejects_zero_retained_eigenvalues_and_bad_shapes() {
        let system = diag_system(&[1.0, 0.0]);
        let y = dvector![1.0, 1.0];
        assert!(fit(&system, 1, 0.5, &y).is_ok());
        assert!(matches!(
            fit(&system, 2, 0.5, &y).unwrap_err(),
            Error::ZeroEigenvalue { r: 2 }
        ));
        assert!(matches!(
            fit(&system, 1, 0.5, &dvector![1.0]).unwrap_err(),
            Error::DimensionMismatch { .. }
        ));
        assert!(fit(&system, 1, 0.0, &y).is_err());
        assert!(fit(&system, 1, 0.5, &dvector![f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn predictions_at_design_points_match_fitted_values() {
        let registry = KernelRegistry::with_builtins();
        let kernel = registry
            .create(&KernelConfig::new("sobolev1"))
            .unwrap();
        let points = kernel.design(6).unwrap();
        let km = kernel_matrix(kernel.as_ref(), &points).unwrap();
        let system = crate::spectral::eigendecompose(&km).unwrap();
        let y = dvector![0.3, -0.1, 0.8, 0.5, -0.4, 0.2];
        for r in [2usize, 6] {
            let est = fit(&system, r, 0.05, &y).unwrap();
            let fitted = est.fitted_values();
            for (i, &x) in points.iter().enumerate() {
                let pred = predict_at(kernel.as_ref(), &points, &est, x).unwrap();
                assert_relative_eq!(pred, fitted[i], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn predict_rejects_mismatched_design_points() {
        let system = diag_system(&[1.0]);
        let est = fit(&system, 1, 1.0, &dvector![2.0]).unwrap();
        let registry = KernelRegistry::with_builtins();
        let kernel = registry.create(&KernelConfig::new("gaussian")).unwrap();
        let err = predict_at(kernel.as_ref(), &[0.0, 0.5], &est, 0.1).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn target_from_omega_carries_consistent_norm_and_values() {
        // K = [[0.25, 0.25], [0.25, 0.5]] (min kernel at (0.5, 1.0), n = 2).
        let matrix = dmatrix![0.25, 0.25; 0.25, 0.5];
        let km = KernelMatrix::from_parts(matrix, vec![0.5, 1.0]).unwrap();
        let target = TargetFunction::from_omega(&km, dvector![2.0, -1.0]).unwrap();
        // u* = K omega = (0.25, 0.0); norm = omega . u* = 0.5.
        assert_relative_eq!(target.u_star()[0], 0.25, max_relative = 1e-15);
        assert_relative_eq!(target.u_star()[1], 0.0, epsilon = 1e-15);
        assert_relative_eq!(target.hilbert_norm_sq(), 0.5, max_relative = 1e-15);
        let values = target.values();
        assert_relative_eq!(values[0], 0.25 * 2f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn sampled_ball_targets_sit_on_the_unit_sphere_and_are_reproducible() {
        let registry = KernelRegistry::with_builtins();
        let config = KernelConfig::new("gaussian")
            .with_bandwidth(0.4)
            .with_domain(Interval::new(-1.0, 1.0).unwrap());
        let kernel = registry.create(&config).unwrap();
        let points = crate::kernel::design_points(
            kernel.domain(),
            12,
            DesignScheme::EquispacedClosed,
        )
        .unwrap();
        let km = kernel_matrix(kernel.as_ref(), &points).unwrap();
        let system = crate::spectral::eigendecompose(&km).unwrap();

        let a = sample_ball_target(&km, 99).unwrap();
        let b = sample_ball_target(&km, 99).unwrap();
        let c = sample_ball_target(&km, 100).unwrap();
        assert_eq!(a.omega_star(), b.omega_star(), "same seed must give the same target");
        assert_ne!(a.omega_star(), c.omega_star(), "different seeds must differ");
        assert_relative_eq!(a.hilbert_norm_sq(), 1.0, max_relative = 1e-12);
        // The norm must also be 1 when recomputed from the quadratic form.
        let recomputed = a.omega_star().dot(&km.apply(a.omega_star()));
        assert_relative_eq!(recomputed, 1.0, max_relative = 1e-10);
        // And v* must carry the same norm in eigen-coordinates:
        // sum v_i^2 / mu_i = 1 for targets in the span.
        let v = a.v_star(&system).unwrap();
        let mut norm_in_coords = 0.0;
        for (i, vi) in v.iter().enumerate() {
            let mu = system.eigenvalue(i);
            if mu > 1e-14 {
                norm_in_coords += vi * vi / mu;
            }
        }
        assert_relative_eq!(norm_in_coords, 1.0, max_relative = 1e-8);
    }

    #[test]
    fn approximant_of_an_eigen_target_shrinks_its_single_coordinate() {
        // Target aligned with the leading eigenvector, unit norm:
        // omega = u_1 / sqrt(mu_1). Its rank-r approximant has
        // v-coordinates mu_1/(mu_1 + lambda) * v*_1 and nothing else.
        let system = diag_system(&[4.0, 1.0]);
        let km = KernelMatrix::from_parts(
            DMatrix::from_diagonal(&dvector![4.0, 1.0]),
            vec![0.0, 1.0],
        )
        .unwrap();
        let mu1 = system.eigenvalue(0);
        let u1 = system.basis().column(0).into_owned();
        let target = TargetFunction::from_omega(&km, u1 / mu1.sqrt()).unwrap();
        assert_relative_eq!(target.hilbert_norm_sq(), 1.0, max_relative = 1e-14);

        let est = approximant(&system, 2, 0.5, &target).unwrap();
        let expected = mu1 / (mu1 + 0.5) * mu1.sqrt();
        let fitted_coord = system.basis().column(0).dot(est.fitted_u());
        assert_relative_eq!(fitted_coord.abs(), expected, max_relative = 1e-12);
    }
}
