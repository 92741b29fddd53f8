//! Kernel functions, design points, and normalized kernel matrices.
//!
//! A [`Kernel`] is a symmetric positive semi-definite function on a closed
//! interval. Kernels are object-safe so that variants can be registered by
//! name in a [`KernelRegistry`] and selected at runtime from configuration.
//!
//! The matrix assembled by [`kernel_matrix`] is the *normalized* Gram matrix
//! `K[i][j] = k(x_i, x_j) / n`: every spectral quantity downstream (risk
//! formulas, truncation rules, critical radii) is stated for this `1/n`
//! scaling, so the normalization lives here and nowhere else.

mod gaussian;
mod sobolev;

pub use gaussian::GaussianKernel;
pub use sobolev::Sobolev1Kernel;

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::fmt;

// ===== Domain =====

/// A closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::invalid(format!(
                "interval requires finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        x.is_finite() && self.lo <= x && x <= self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

// ===== Design points =====

/// Placement rule for `n` equispaced sample locations in an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DesignScheme {
    /// `x_i = lo + (hi - lo) * i / (n - 1)` for `i = 0..n-1`; includes both
    /// endpoints.
    EquispacedClosed,
    /// `x_i = lo + (hi - lo) * (i + 1) / n` for `i = 0..n-1`; excludes the
    /// left endpoint, includes the right. The natural grid for kernels that
    /// vanish at the left edge.
    EquispacedOpenLeft,
}

impl std::str::FromStr for DesignScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" => Ok(DesignScheme::EquispacedClosed),
            "open-left" => Ok(DesignScheme::EquispacedOpenLeft),
            other => Err(Error::UnknownName {
                kind: "design scheme",
                name: other.to_string(),
                known: "closed, open-left".to_string(),
            }),
        }
    }
}

/// Generate `n >= 2` strictly increasing sample locations in `domain`.
pub fn design_points(domain: Interval, n: usize, scheme: DesignScheme) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::invalid(format!("need at least 2 design points, got {n}")));
    }
    let (lo, hi) = (domain.lo, domain.hi);
    let span = hi - lo;
    let points = match scheme {
        DesignScheme::EquispacedClosed => (0..n)
            .map(|i| lo + span * i as f64 / (n - 1) as f64)
            .collect(),
        DesignScheme::EquispacedOpenLeft => (0..n)
            .map(|i| lo + span * (i + 1) as f64 / n as f64)
            .collect(),
    };
    Ok(points)
}

// ===== Kernel trait =====

/// A positive semi-definite kernel on a one-dimensional interval.
pub trait Kernel: fmt::Debug + Send + Sync {
    /// Registry name of this kernel family.
    fn name(&self) -> &'static str;

    /// Interval on which the kernel is defined.
    fn domain(&self) -> Interval;

    /// Evaluate `k(s, t)`. Both arguments must lie in [`Kernel::domain`].
    fn eval(&self, s: f64, t: f64) -> Result<f64>;

    /// The design-point placement conventionally paired with this kernel.
    fn default_scheme(&self) -> DesignScheme;

    /// Convenience: the default design of size `n` for this kernel.
    fn design(&self, n: usize) -> Result<Vec<f64>> {
        design_points(self.domain(), n, self.default_scheme())
    }
}

// ===== Normalized kernel matrix =====

/// The normalized Gram matrix `K = (k(x_i, x_j) / n)` together with the
/// design points that produced it. Symmetric by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    matrix: DMatrix<f64>,
    points: Vec<f64>,
}

impl KernelMatrix {
    /// Wrap an already-normalized matrix with its design points. Intended
    /// for synthetic matrices; checks shape, symmetry, and finiteness but
    /// does not verify positive semidefiniteness.
    pub fn from_parts(matrix: DMatrix<f64>, points: Vec<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() != points.len() {
            return Err(Error::DimensionMismatch {
                context: "kernel matrix",
                expected: points.len(),
                actual: matrix.nrows(),
            });
        }
        if points.is_empty() {
            return Err(Error::EmptyInput("design points"));
        }
        let scale = matrix.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !scale.is_finite() {
            return Err(Error::invalid("kernel matrix must be finite".to_string()));
        }
        for i in 0..matrix.nrows() {
            for j in (i + 1)..matrix.ncols() {
                if (matrix[(i, j)] - matrix[(j, i)]).abs() > 1e-12 * scale.max(1.0) {
                    return Err(Error::invalid(format!(
                        "kernel matrix must be symmetric; entries ({i},{j}) disagree"
                    )));
                }
            }
        }
        Ok(KernelMatrix { matrix, points })
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// `K w`.
    pub fn apply(&self, w: &DVector<f64>) -> DVector<f64> {
        &self.matrix * w
    }
}

/// Assemble the normalized kernel matrix over strictly increasing points
/// inside the kernel's domain.
pub fn kernel_matrix(kernel: &dyn Kernel, points: &[f64]) -> Result<KernelMatrix> {
    if points.is_empty() {
        return Err(Error::EmptyInput("design points"));
    }
    for pair in points.windows(2) {
        if !(pair[0] < pair[1]) {
            return Err(Error::invalid(format!(
                "design points must be strictly increasing, got {} then {}",
                pair[0], pair[1]
            )));
        }
    }
    let n = points.len();
    let scale = 1.0 / n as f64;
    let mut matrix = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let value = kernel.eval(points[i], points[j])? * scale;
            matrix[(i, j)] = value;
            matrix[(j, i)] = value;
        }
    }
    Ok(KernelMatrix {
        matrix,
        points: points.to_vec(),
    })
}

// ===== Registry =====

/// Serializable description of a kernel: a registry name plus the parameters
/// the factory needs. `None` fields fall back to the family's convention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Interval>,
}

impl KernelConfig {
    pub fn new(name: impl Into<String>) -> Self {
        KernelConfig {
            name: name.into(),
            bandwidth: None,
            domain: None,
        }
    }

    pub fn with_bandwidth(mut self, bandwidth: f64) -> Self {
        self.bandwidth = Some(bandwidth);
        self
    }

    pub fn with_domain(mut self, domain: Interval) -> Self {
        self.domain = Some(domain);
        self
    }
}

type KernelFactory = fn(&KernelConfig) -> Result<Box<dyn Kernel>>;

/// Name-indexed registry of kernel families. New families can be registered
/// at runtime; lookups fail with the list of known names.
pub struct KernelRegistry {
    entries: Vec<(&'static str, KernelFactory)>,
}

impl KernelRegistry {
    /// Registry holding the built-in families `gaussian` and `sobolev1`.
    pub fn with_builtins() -> Self {
        let mut registry = KernelRegistry { entries: Vec::new() };
        registry.register("gaussian", gaussian::from_config);
        registry.register("sobolev1", sobolev::from_config);
        registry
    }

    pub fn register(&mut self, name: &'static str, factory: KernelFactory) {
        self.entries.retain(|(n, _)| *n != name);
        self.entries.push((name, factory));
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }

    pub fn create(&self, config: &KernelConfig) -> Result<Box<dyn Kernel>> {
        match self.entries.iter().find(|(n, _)| *n == config.name) {
            Some((_, factory)) => factory(config),
            None => Err(Error::UnknownName {
                kind: "kernel",
                name: config.name.clone(),
                known: self.names().join(", "),
            }),
        }
    }
}

impl fmt::Debug for KernelRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelRegistry")
            .field("names", &self.names())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn closed_design_includes_both_endpoints() {
        let domain = Interval::new(-1.0, 1.0).unwrap();
        let x = design_points(domain, 5, DesignScheme::EquispacedClosed).unwrap();
        assert_eq!(x, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn open_left_design_excludes_left_endpoint() {
        let domain = Interval::new(0.0, 1.0).unwrap();
        let x = design_points(domain, 4, DesignScheme::EquispacedOpenLeft).unwrap();
        assert_eq!(x, vec![0.25, 0.5, 0.75, 1.0]);
        assert!(x[0] > 0.0, "left endpoint must be excluded");
        assert_eq!(*x.last().unwrap(), 1.0, "right endpoint must be included");
    }

    #[test]
    fn design_requires_two_points() {
        let domain = Interval::new(0.0, 1.0).unwrap();
        let err = design_points(domain, 1, DesignScheme::EquispacedClosed).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn degenerate_interval_rejected() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn kernel_matrix_matches_hand_computed_sobolev_entries() {
        // k(s,t) = min(s,t) over x = (0.5, 1.0), scaled by 1/2.
        let kernel = Sobolev1Kernel::new(Interval::new(0.0, 1.0).unwrap()).unwrap();
        let k = kernel_matrix(&kernel, &[0.5, 1.0]).unwrap();
        let m = k.matrix();
        assert_eq!(m[(0, 0)], 0.25);
        assert_eq!(m[(0, 1)], 0.25);
        assert_eq!(m[(1, 0)], 0.25);
        assert_eq!(m[(1, 1)], 0.5);
    }

    #[test]
    fn kernel_matrix_rejects_unordered_points() {
        let kernel = Sobolev1Kernel::new(Interval::new(0.0, 1.0).unwrap()).unwrap();
        let err = kernel_matrix(&kernel, &[0.5, 0.5]).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
        let err = kernel_matrix(&kernel, &[0.75, 0.5]).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn kernel_matrix_rejects_points_outside_domain() {
        let kernel = GaussianKernel::new(0.1, Interval::new(-1.0, 1.0).unwrap()).unwrap();
        let err = kernel_matrix(&kernel, &[0.0, 1.5]).unwrap_err();
        assert!(matches!(err, Error::OutOfDomain { .. }));
    }

    #[test]
    fn gram_matrices_are_positive_semidefinite() {
        // v' K v >= -tol for random vectors; both built-in families.
        let domain = Interval::new(-1.0, 1.0).unwrap();
        let kernels: Vec<Box<dyn Kernel>> = vec![
            Box::new(GaussianKernel::new(0.1, domain).unwrap()),
            Box::new(Sobolev1Kernel::new(Interval::new(0.0, 1.0).unwrap()).unwrap()),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for kernel in &kernels {
            let x = kernel.design(40).unwrap();
            let k = kernel_matrix(kernel.as_ref(), &x).unwrap();
            let scale = k.matrix().diagonal().max();
            for _ in 0..1000 {
                let v = DVector::from_fn(40, |_, _| rng.random::<f64>() * 2.0 - 1.0);
                let quad = v.dot(&k.apply(&v));
                assert!(
                    quad >= -1e-10 * scale * v.norm_squared(),
                    "kernel {} produced an indefinite Gram matrix: v'Kv = {quad}",
                    kernel.name()
                );
            }
        }
    }

    #[test]
    fn registry_builds_kernels_by_name() {
        let registry = KernelRegistry::with_builtins();
        let config = KernelConfig::new("gaussian").with_bandwidth(0.5);
        let kernel = registry.create(&config).unwrap();
        assert_eq!(kernel.name(), "gaussian");
        assert_eq!(kernel.domain(), Interval::new(-1.0, 1.0).unwrap());

        let kernel = registry.create(&KernelConfig::new("sobolev1")).unwrap();
        assert_eq!(kernel.name(), "sobolev1");
        assert_eq!(kernel.default_scheme(), DesignScheme::EquispacedOpenLeft);
    }

    #[test]
    fn registry_rejects_unknown_names_and_lists_known_ones() {
        let registry = KernelRegistry::with_builtins();
        let err = registry.create(&KernelConfig::new("matern")).unwrap_err();
        match err {
            Error::UnknownName { name, known, .. } => {
                assert_eq!(name, "matern");
                assert!(known.contains("gaussian") && known.contains("sobolev1"));
            }
            other => panic!("expected UnknownName, got {other:?}"),
        }
    }

    #[test]
    fn registry_allows_custom_families() {
        #[derive(Debug)]
        struct Flat;
        impl Kernel for Flat {
            fn name(&self) -> &'static str {
                "flat"
            }
            fn domain(&self) -> Interval {
                Interval::new(0.0, 1.0).unwrap()
            }
            fn eval(&self, _s: f64, _t: f64) -> Result<f64> {
                Ok(1.0)
            }
            fn default_scheme(&self) -> DesignScheme {
                DesignScheme::EquispacedClosed
            }
        }
        fn make_flat(_: &KernelConfig) -> Result<Box<dyn Kernel>> {
            Ok(Box::new(Flat))
        }
        let mut registry = KernelRegistry::with_builtins();
        registry.register("flat", make_flat);
        let kernel = registry.create(&KernelConfig::new("flat")).unwrap();
        assert_eq!(kernel.eval(0.2, 0.9).unwrap(), 1.0);
    }
}
