//! Eigendecomposition of kernel matrices, rank truncation, and synthetic
//! eigenvalue profiles.
//!
//! Everything downstream of the decomposition is expressed in spectral
//! coordinates. [`EigenSystem`] stores the full orthonormal eigenbasis of a
//! normalized kernel matrix with eigenvalues sorted descending;
//! [`SpectrumOnly`] carries just the eigenvalues for closed-form risk work
//! where no basis is needed. [`TruncatedSpectrum`] is a zero-copy rank-`r`
//! view used by the estimator.

use crate::csvutil::{expect_header, parse_field, split_fields};
use crate::error::{Error, Result};
use crate::kernel::KernelMatrix;
use nalgebra::{DMatrix, DMatrixView, DVector};
use serde::{Deserialize, Serialize};
use std::fmt;

// ===== Eigendecomposition =====

/// Orthonormal eigenbasis and descending eigenvalues of a symmetric PSD
/// matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    eigenvalues: DVector<f64>,
    basis: DMatrix<f64>,
}

impl EigenSystem {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalues in descending order; all nonnegative.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// `i`-th eigenvalue, zero-based.
    pub fn eigenvalue(&self, i: usize) -> f64 {
        self.eigenvalues[i]
    }

    /// Orthonormal eigenvectors as columns, ordered to match the eigenvalues.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Clone of the eigenvalues as a standalone spectrum.
    pub fn spectrum(&self) -> SpectrumOnly {
        SpectrumOnly {
            mu: self.eigenvalues.iter().copied().collect(),
        }
    }

    /// Zero-copy view of the top `r` eigenpairs, `1 <= r <= n`.
    pub fn truncate(&self, r: usize) -> Result<TruncatedSpectrum<'_>> {
        if r < 1 || r > self.n() {
            return Err(Error::RankOutOfRange { r, n: self.n() });
        }
        Ok(TruncatedSpectrum { system: self, r })
    }

    /// `U diag(mu) U^T`; for tests and diagnostics.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let scaled = &self.basis * DMatrix::from_diagonal(&self.eigenvalues);
        scaled * self.basis.transpose()
    }
}

/// Rank-`r` view of an [`EigenSystem`]: the best rank-`r` approximation of
/// the decomposed matrix in every unitarily invariant norm.
#[derive(Debug, Clone, Copy)]
pub struct TruncatedSpectrum<'a> {
    system: &'a EigenSystem,
    r: usize,
}

impl<'a> TruncatedSpectrum<'a> {
    pub fn r(&self) -> usize {
        self.r
    }

    /// The retained eigenvalues `mu_1 >= ... >= mu_r`.
    pub fn retained(&self) -> &[f64] {
        &self.system.eigenvalues.as_slice()[..self.r]
    }

    /// First discarded eigenvalue `mu_{r+1}`, zero when `r = n`.
    pub fn next_eigenvalue(&self) -> f64 {
        if self.r < self.system.n() {
            self.system.eigenvalues[self.r]
        } else {
            0.0
        }
    }

    /// The retained eigenvectors `U_r` as a view of the full basis.
    pub fn basis(&self) -> DMatrixView<'a, f64> {
        self.system.basis.columns(0, self.r)
    }

    /// `U_r diag(mu_1..mu_r) U_r^T`; for tests and diagnostics.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let u = self.basis();
        let d = DMatrix::from_diagonal(&DVector::from_row_slice(self.retained()));
        u * d * u.transpose()
    }
}

/// Relative tolerance for the symmetry check in [`eigendecompose_matrix`].
const SYMMETRY_TOL: f64 = 1e-12;

/// Eigenvalues this far below zero (relative to the largest magnitude) are
/// roundoff from a PSD matrix and are clipped to exactly zero; anything more
/// negative is treated as a genuinely indefinite input.
const NEGATIVE_CLIP_TOL: f64 = 1e-10;

/// Decompose a normalized kernel matrix.
pub fn eigendecompose(k: &KernelMatrix) -> Result<EigenSystem> {
    eigendecompose_matrix(k.matrix())
}

/// Decompose an arbitrary symmetric PSD matrix.
///
/// The input must be symmetric to relative tolerance `1e-12`. Eigenvalues in
/// `[-1e-10 * max|mu|, 0)` are clipped to zero; more negative ones raise
/// [`Error::Numeric`].
pub fn eigendecompose_matrix(m: &DMatrix<f64>) -> Result<EigenSystem> {
    let n = m.nrows();
    if n == 0 {
        return Err(Error::EmptyInput("matrix"));
    }
    if m.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "eigendecomposition",
            expected: n,
            actual: m.ncols(),
        });
    }
    let mut scale = 0.0f64;
    for &v in m.iter() {
        if !v.is_finite() {
            return Err(Error::invalid("matrix entries must be finite".to_string()));
        }
        scale = scale.max(v.abs());
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (m[(i, j)] - m[(j, i)]).abs() > SYMMETRY_TOL * scale {
                return Err(Error::invalid(format!(
                    "matrix is not symmetric at ({i}, {j}): {} vs {}",
                    m[(i, j)],
                    m[(j, i)]
                )));
            }
        }
    }

    let eigen = nalgebra::SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eigen.eigenvalues[b]
            .partial_cmp(&eigen.eigenvalues[a])
            .expect("eigenvalues of a finite symmetric matrix are finite")
            .then(a.cmp(&b))
    });

    let mu_max = order
        .iter()
        .map(|&i| eigen.eigenvalues[i].abs())
        .fold(0.0f64, f64::max);
    let mut eigenvalues = DVector::zeros(n);
    let mut basis = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut mu = eigen.eigenvalues[src];
        if mu < 0.0 {
            if mu >= -NEGATIVE_CLIP_TOL * mu_max {
                mu = 0.0;
            } else {
                return Err(Error::numeric(format!(
                    "matrix is not positive semi-definite: eigenvalue {mu}"
                )));
            }
        }
        eigenvalues[dst] = mu;
        basis.set_column(dst, &eigen.eigenvectors.column(src));
    }
    Ok(EigenSystem { eigenvalues, basis })
}

// ===== Spectrum without a basis =====

/// A descending, nonnegative eigenvalue sequence. All closed-form risk
/// quantities are functions of this alone, never of the eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumOnly {
    mu: Vec<f64>,
}

impl SpectrumOnly {
    /// Validate and wrap an eigenvalue sequence: nonempty, finite,
    /// nonnegative, nonincreasing.
    pub fn new(mu: Vec<f64>) -> Result<Self> {
        if mu.is_empty() {
            return Err(Error::EmptyInput("spectrum"));
        }
        for (i, &v) in mu.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(format!(
                    "eigenvalue {i} must be finite and nonnegative, got {v}"
                )));
            }
        }
        for (i, pair) in mu.windows(2).enumerate() {
            if pair[0] < pair[1] {
                return Err(Error::invalid(format!(
                    "eigenvalues must be nonincreasing, got {} before {} at index {i}",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(SpectrumOnly { mu })
    }

    pub fn n(&self) -> usize {
        self.mu.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.mu
    }

    /// `i`-th eigenvalue, zero-based.
    pub fn mu(&self, i: usize) -> f64 {
        self.mu[i]
    }

    /// Largest eigenvalue.
    pub fn leading(&self) -> f64 {
        self.mu[0]
    }

    /// First eigenvalue beyond a rank-`r` truncation, with the convention
    /// that truncating nothing (`r = n`) discards a zero.
    pub fn after(&self, r: usize) -> f64 {
        debug_assert!(r >= 1 && r <= self.n());
        if r < self.n() {
            self.mu[r]
        } else {
            0.0
        }
    }

    pub(crate) fn check_rank(&self, r: usize) -> Result<()> {
        if r < 1 || r > self.n() {
            return Err(Error::RankOutOfRange { r, n: self.n() });
        }
        Ok(())
    }

    /// Serialize as `index,eigenvalue` rows with a 1-based index.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("index,eigenvalue\n");
        for (i, &v) in self.mu.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i + 1, v));
        }
        out
    }

    /// Parse the output of [`SpectrumOnly::to_csv_string`].
    pub fn from_csv_str(s: &str) -> Result<Self> {
        expect_header(s.lines(), "index,eigenvalue")?;
        let mut mu = Vec::new();
        for (i, line) in s.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let line_no = i + 1;
            let fields = split_fields(line, 2, line_no)?;
            let index: usize = parse_field(fields[0], "index", line_no)?;
            if index != mu.len() + 1 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected index {}, got {index}", mu.len() + 1),
                });
            }
            mu.push(parse_field(fields[1], "eigenvalue", line_no)?);
        }
        SpectrumOnly::new(mu)
    }
}

// ===== Synthetic spectra =====

/// Regressor against which minimized risks are fitted in rate studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingPredictor {
    /// Fit `log risk` against `log gamma`.
    Gamma,
    /// Fit `log risk` against `log(gamma * ln(1/gamma))`; the extra slowly
    /// varying factor shows up for near-exponential eigendecay.
    GammaLogInverse,
}

impl ScalingPredictor {
    /// The predictor value at noise level `gamma` (must be in `(0, 1)` for
    /// the logarithmic variant to make sense).
    pub fn apply(&self, gamma: f64) -> f64 {
        match self {
            ScalingPredictor::Gamma => gamma,
            ScalingPredictor::GammaLogInverse => gamma * (1.0 / gamma).ln(),
        }
    }
}

/// Theoretical scaling of the minimized worst-case risk for a decay family:
/// `risk ~ predictor(gamma) ^ exponent` as `gamma -> 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskScaling {
    pub predictor: ScalingPredictor,
    pub exponent: f64,
}

/// A parametric eigendecay family, indexed from 1.
pub trait DecayProfile: fmt::Debug {
    /// Registry name of the family.
    fn name(&self) -> &'static str;

    /// The `i`-th eigenvalue, `i >= 1`.
    fn eigenvalue(&self, i: usize) -> f64;

    /// The scaling law the minimized risk should follow for this family,
    /// when one is known.
    fn risk_scaling(&self) -> Option<RiskScaling> {
        None
    }
}

/// Polynomial decay `mu_i = scale * i^(-2 alpha)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyDecay {
    alpha: f64,
    scale: f64,
}

impl PolyDecay {
    pub fn new(alpha: f64, scale: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::invalid(format!("poly decay needs alpha > 0, got {alpha}")));
        }
        if !scale.is_finite() || scale <= 0.0 {
            return Err(Error::invalid(format!("poly decay needs scale > 0, got {scale}")));
        }
        Ok(PolyDecay { alpha, scale })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl DecayProfile for PolyDecay {
    fn name(&self) -> &'static str {
        "poly"
    }

    fn eigenvalue(&self, i: usize) -> f64 {
        self.scale * (i as f64).powf(-2.0 * self.alpha)
    }

    fn risk_scaling(&self) -> Option<RiskScaling> {
        Some(RiskScaling {
            predictor: ScalingPredictor::Gamma,
            exponent: 2.0 * self.alpha / (2.0 * self.alpha + 1.0),
        })
    }
}

/// Near-exponential decay `mu_i = scale * exp(-c * i * ln(i + 1))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpDecay {
    c: f64,
    scale: f64,
}

impl ExpDecay {
    pub fn new(c: f64, scale: f64) -> Result<Self> {
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::invalid(format!("exp decay needs c > 0, got {c}")));
        }
        if !scale.is_finite() || scale <= 0.0 {
            return Err(Error::invalid(format!("exp decay needs scale > 0, got {scale}")));
        }
        Ok(ExpDecay { c, scale })
    }
}

impl DecayProfile for ExpDecay {
    fn name(&self) -> &'static str {
        "exp"
    }

    fn eigenvalue(&self, i: usize) -> f64 {
        self.scale * (-self.c * i as f64 * ((i + 1) as f64).ln()).exp()
    }

    fn risk_scaling(&self) -> Option<RiskScaling> {
        Some(RiskScaling {
            predictor: ScalingPredictor::GammaLogInverse,
            exponent: 1.0,
        })
    }
}

/// Evaluate the first `n` eigenvalues of a decay family.
pub fn synthetic_spectrum(profile: &dyn DecayProfile, n: usize) -> Result<SpectrumOnly> {
    if n == 0 {
        return Err(Error::EmptyInput("spectrum length"));
    }
    let mu: Vec<f64> = (1..=n).map(|i| profile.eigenvalue(i)).collect();
    SpectrumOnly::new(mu).map_err(|e| {
        Error::numeric(format!("decay family '{}' produced an invalid spectrum: {e}", profile.name()))
    })
}

/// Parameters for constructing a decay family from a registry.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DecayConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

impl DecayConfig {
    pub fn poly(alpha: f64) -> Self {
        DecayConfig {
            name: "poly".to_string(),
            alpha: Some(alpha),
            ..Default::default()
        }
    }

    pub fn exp(c: f64) -> Self {
        DecayConfig {
            name: "exp".to_string(),
            c: Some(c),
            ..Default::default()
        }
    }
}

type DecayFactory = fn(&DecayConfig) -> Result<Box<dyn DecayProfile>>;

/// Name-indexed registry of decay families.
pub struct DecayRegistry {
    entries: Vec<(&'static str, DecayFactory)>,
}

impl DecayRegistry {
    pub fn with_builtins() -> Self {
        let mut registry = DecayRegistry { entries: Vec::new() };
        registry.register("poly", make_poly);
        registry.register("exp", make_exp);
        registry
    }

    pub fn register(&mut self, name: &'static str, factory: DecayFactory) {
        self.entries.retain(|(n, _)| *n != name);
        self.entries.push((name, factory));
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }

    pub fn create(&self, config: &DecayConfig) -> Result<Box<dyn DecayProfile>> {
        match self.entries.iter().find(|(n, _)| *n == config.name) {
            Some((_, factory)) => factory(config),
            None => Err(Error::UnknownName {
                kind: "decay family",
                name: config.name.clone(),
                known: self.names().join(", "),
            }),
        }
    }
}

impl fmt::Debug for DecayRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DecayRegistry")
            .field("names", &self.names())
            .finish()
    }
}

fn make_poly(config: &DecayConfig) -> Result<Box<dyn DecayProfile>> {
    if let Some(c) = config.c {
        return Err(Error::invalid(format!("poly decay takes no 'c' parameter (got {c})")));
    }
    let profile = PolyDecay::new(config.alpha.unwrap_or(1.0), config.scale.unwrap_or(1.0))?;
    Ok(Box::new(profile))
}

fn make_exp(config: &DecayConfig) -> Result<Box<dyn DecayProfile>> {
    if let Some(alpha) = config.alpha {
        return Err(Error::invalid(format!(
            "exp decay takes no 'alpha' parameter (got {alpha})"
        )));
    }
    let profile = ExpDecay::new(config.c.unwrap_or(1.0), config.scale.unwrap_or(1.0))?;
    Ok(Box::new(profile))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotation(theta: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()])
    }

    #[test]
    fn diagonal_matrix_decomposes_exactly_and_sorts_descending() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 2.0, 1.0]));
        let system = eigendecompose_matrix(&m).unwrap();
        assert_eq!(system.eigenvalues().as_slice(), &[2.0, 1.0, 0.5]);
        let reconstructed = system.reconstruct();
        assert!((&reconstructed - &m).norm() < 1e-14);
    }

    #[test]
    fn roundoff_negative_eigenvalues_are_clipped_to_zero() {
        let u = rotation(0.7);
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1e-12]));
        let m = &u * d * u.transpose();
        let m = (&m + m.transpose()) * 0.5;
        let system = eigendecompose_matrix(&m).unwrap();
        assert_eq!(system.eigenvalue(1), 0.0, "tiny negative eigenvalue must clip to zero");
        assert!(system.eigenvalue(0) > 0.99);
    }

    #[test]
    fn genuinely_indefinite_matrices_are_rejected() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0]));
        let err = eigendecompose_matrix(&m).unwrap_err();
        assert!(matches!(err, Error::Numeric(_)));
    }

    #[test]
    fn asymmetric_matrices_are_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.2, 1.0]);
        let err = eigendecompose_matrix(&m).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn truncation_views_expose_the_top_block() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 2.0, 1.0]));
        let system = eigendecompose_matrix(&m).unwrap();
        let top = system.truncate(2).unwrap();
        assert_eq!(top.retained(), &[3.0, 2.0]);
        assert_eq!(top.next_eigenvalue(), 1.0);
        assert_eq!(system.truncate(3).unwrap().next_eigenvalue(), 0.0);
        assert!(matches!(
            system.truncate(0).unwrap_err(),
            Error::RankOutOfRange { r: 0, n: 3 }
        ));
        assert!(matches!(
            system.truncate(4).unwrap_err(),
            Error::RankOutOfRange { r: 4, n: 3 }
        ));
    }

    #[test]
    fn rank_r_reconstruction_zeroes_the_discarded_directions() {
        let u = rotation(0.3);
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 0.5]));
        let m = &u * d * u.transpose();
        let m = (&m + m.transpose()) * 0.5;
        let system = eigendecompose_matrix(&m).unwrap();
        let rank1 = system.truncate(1).unwrap().reconstruct();
        // The residual must have Frobenius norm equal to the discarded
        // eigenvalue.
        let residual = (&m - &rank1).norm();
        assert!(
            (residual - 0.5).abs() < 1e-12,
            "rank-1 residual should equal mu_2 = 0.5, got {residual}"
        );
    }

    #[test]
    fn spectrum_validation_rejects_bad_sequences() {
        assert!(matches!(SpectrumOnly::new(vec![]), Err(Error::EmptyInput(_))));
        assert!(SpectrumOnly::new(vec![1.0, -0.1]).is_err());
        assert!(SpectrumOnly::new(vec![1.0, f64::NAN]).is_err());
        assert!(SpectrumOnly::new(vec![0.5, 1.0]).is_err());
        // Ties and zeros are fine.
        assert!(SpectrumOnly::new(vec![1.0, 1.0, 0.0, 0.0]).is_ok());
    }

    #[test]
    fn after_returns_the_first_discarded_eigenvalue() {
        let s = SpectrumOnly::new(vec![3.0, 2.0, 1.0]).unwrap();
        assert_eq!(s.after(1), 2.0);
        assert_eq!(s.after(2), 1.0);
        assert_eq!(s.after(3), 0.0);
    }

    #[test]
    fn poly_decay_matches_inverse_squares() {
        let profile = PolyDecay::new(1.0, 1.0).unwrap();
        let s = synthetic_spectrum(&profile, 3).unwrap();
        assert_eq!(s.mu(0), 1.0);
        assert_eq!(s.mu(1), 0.25);
        assert!((s.mu(2) - 0.1111111111111111).abs() < 1e-15);
    }

    #[test]
    fn exp_decay_matches_hand_computed_values() {
        let profile = ExpDecay::new(1.0, 1.0).unwrap();
        let s = synthetic_spectrum(&profile, 2).unwrap();
        assert!((s.mu(0) - 0.5).abs() < 1e-15, "exp(-ln 2) = 1/2, got {}", s.mu(0));
        assert!(
            (s.mu(1) - 0.1111111111111111).abs() < 1e-15,
            "exp(-2 ln 3) = 1/9, got {}",
            s.mu(1)
        );
    }

    #[test]
    fn synthetic_spectra_strictly_decrease_while_positive() {
        let profiles: Vec<Box<dyn DecayProfile>> = vec![
            Box::new(PolyDecay::new(0.75, 2.0).unwrap()),
            Box::new(ExpDecay::new(0.5, 1.0).unwrap()),
        ];
        for profile in &profiles {
            let s = synthetic_spectrum(profile.as_ref(), 400).unwrap();
            for i in 1..s.n() {
                if s.mu(i) > 0.0 {
                    assert!(
                        s.mu(i) < s.mu(i - 1),
                        "{} decay not strict at index {i}",
                        profile.name()
                    );
                }
            }
        }
    }

    #[test]
    fn decay_registry_applies_defaults_and_rejects_foreign_parameters() {
        let registry = DecayRegistry::with_builtins();
        let poly = registry.create(&DecayConfig::poly(2.0)).unwrap();
        assert_eq!(poly.name(), "poly");
        assert_eq!(poly.eigenvalue(2), 2.0f64.powf(-4.0));

        // Defaults: alpha = 1, c = 1, scale = 1.
        let poly = registry
            .create(&DecayConfig {
                name: "poly".to_string(),
                ..Default::default()
            })
            .unwrap();
        assert_eq!(poly.eigenvalue(2), 0.25);

        let err = registry
            .create(&DecayConfig {
                name: "exp".to_string(),
                alpha: Some(1.0),
                ..Default::default()
            })
            .unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));

        let err = registry
            .create(&DecayConfig {
                name: "steps".to_string(),
                ..Default::default()
            })
            .unwrap_err();
        assert!(matches!(err, Error::UnknownName { .. }));
    }

    #[test]
    fn spectrum_csv_round_trips_byte_for_byte() {
        let s = SpectrumOnly::new(vec![0.4073, 0.0452, 1e-300, 0.0]).unwrap();
        let csv = s.to_csv_string();
        let parsed = SpectrumOnly::from_csv_str(&csv).unwrap();
        assert_eq!(parsed, s);
        assert_eq!(parsed.to_csv_string(), csv);
    }

    #[test]
    fn spectrum_csv_reports_malformed_lines() {
        let err = SpectrumOnly::from_csv_str("index,eigenvalue\n1,abc\n").unwrap_err();
        match err {
            Error::Parse { line, msg } => {
                assert_eq!(line, 2);
                assert!(msg.contains("eigenvalue"));
            }
            other => panic!("expected Parse, got {other:?}"),
        }
        let err = SpectrumOnly::from_csv_str("eigenvalue\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }
}
