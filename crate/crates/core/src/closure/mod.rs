//! Lie closure of a generator set by nested commutators.
//!
//! Every method runs the same loop: generators are tested in order, then
//! commutators of basis pairs are formed in [`LoopCursor`] order and appended
//! whenever they are linearly independent of the current basis. The methods
//! differ only in how independence is decided:
//!
//! * `standard-rank`: numerical rank of the vectorized basis via SVD.
//! * `matrix-inversion`: residual against the Gram-matrix projection, with the
//!   inverse maintained incrementally.
//! * `orthonorm`: residual against an orthonormal copy of the basis, keeping the
//!   raw commutators as the returned basis.
//! * `orthonorm-dimonly`: brackets the orthonormal elements directly and keeps
//!   only them.

mod driver;
mod gram;
mod ortho;

pub use driver::LoopCursor;
pub use gram::{
    check_matrix_inversion, expand_gram, GramState, InversionCheck, PreciseProjection,
    DEFAULT_CONDITIONING_FLOOR, INVERSE_RESIDUAL_LIMIT,
};
pub use ortho::{project_residual, OrthoState};

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::{default_rank_tolerance, numerical_rank, StackedBasisMatrix};
use crate::error::{Error, Result};
use crate::ops::{Backend, Operator};
use driver::{Driver, InversionStrategy, OrthoStrategy, RankStrategy};

/// Default zero test applied to unit-normalized operators.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
/// Default number of acceptances between full Gram re-inversions.
pub const DEFAULT_REFRESH_INTERVAL: usize = 256;
/// Default number of commutators formed per batch.
pub const DEFAULT_BATCH_SIZE: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    StandardRank,
    MatrixInversion,
    #[serde(rename = "orthonorm")]
    Orthonormalization,
    #[serde(rename = "orthonorm-dimonly")]
    OrthonormalizationDimOnly,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::StandardRank,
        Method::MatrixInversion,
        Method::Orthonormalization,
        Method::OrthonormalizationDimOnly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::StandardRank => "standard-rank",
            Method::MatrixInversion => "matrix-inversion",
            Method::Orthonormalization => "orthonorm",
            Method::OrthonormalizationDimOnly => "orthonorm-dimonly",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown method {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosureConfig {
    /// Residual norm at or below which a unit-normalized candidate counts as
    /// dependent. Also the relative zero test for commutators.
    pub tolerance: f64,
    /// Relative singular-value threshold of the rank method; `None` uses
    /// `eps * max(rows, cols)`.
    pub rank_tolerance: Option<f64>,
    /// Maximum basis size; `None` means `d^2`.
    pub max_dim: Option<usize>,
    pub threads: usize,
    pub batch_size: usize,
    /// Acceptances between full Gram re-inversions; 0 disables refreshing.
    pub refresh_interval: usize,
    /// Smallest admissible Schur complement when the Gram matrix grows.
    pub conditioning_floor: f64,
    pub timeout: Option<Duration>,
    /// Verify Gram positivity and orthonormality after every acceptance.
    pub check_invariants: bool,
}

impl Default for ClosureConfig {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            rank_tolerance: None,
            max_dim: None,
            threads: 1,
            batch_size: DEFAULT_BATCH_SIZE,
            refresh_interval: DEFAULT_REFRESH_INTERVAL,
            conditioning_floor: DEFAULT_CONDITIONING_FLOOR,
            timeout: None,
            check_invariants: false,
        }
    }
}

impl ClosureConfig {
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn with_max_dim(mut self, max_dim: usize) -> Self {
        self.max_dim = Some(max_dim);
        self
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = Some(timeout);
        self
    }

    pub fn with_invariant_checks(mut self) -> Self {
        self.check_invariants = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::invalid(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if let Some(t) = self.rank_tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::invalid(format!(
                    "rank tolerance must be positive, got {t}"
                )));
            }
        }
        if self.max_dim == Some(0) {
            return Err(Error::invalid("capacity cap must be at least 1"));
        }
        if self.threads == 0 {
            return Err(Error::invalid("thread count must be at least 1"));
        }
        if !(self.conditioning_floor >= 0.0) {
            return Err(Error::invalid("conditioning floor must be non-negative"));
        }
        Ok(())
    }
}

/// Where a tested candidate came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateSource {
    Generator(usize),
    /// `[B[l], B[m]]`.
    Pair(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ClosureWarning {
    NullGenerator {
        index: usize,
    },
    /// The residual landed within a factor of ten of the tolerance, so the
    /// verdict is sensitive to the tolerance choice.
    NearThreshold {
        source: CandidateSource,
        residual: f64,
        tolerance: f64,
    },
    /// Accepted with a Schur complement below `tolerance^2`.
    IllConditioned {
        element: usize,
        schur: f64,
    },
    InverseDrift {
        size: usize,
        residual: f64,
    },
    GramNotPositive {
        size: usize,
        min_eigenvalue: f64,
    },
    OrthonormalityLoss {
        size: usize,
        error: f64,
    },
    /// Full re-inversion failed; the incrementally updated inverse is kept.
    RefreshFailed {
        size: usize,
        message: String,
    },
}

impl ClosureWarning {
    /// Whether the warning signals numerical conditioning trouble rather than
    /// an input peculiarity.
    pub fn is_conditioning(&self) -> bool {
        !matches!(self, ClosureWarning::NullGenerator { .. })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClosureStats {
    pub commutators_evaluated: u64,
    /// Commutators that vanished and skipped the independence test.
    pub null_commutators: u64,
    pub independence_checks: u64,
    pub accepted: usize,
    pub null_generators: usize,
    pub inverse_refreshes: usize,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug)]
pub struct ClosureResult<T> {
    /// Returned basis: raw nested commutators for `standard-rank` and
    /// `orthonorm`, unit-norm elements for `matrix-inversion`, orthonormal
    /// elements for `orthonorm-dimonly`.
    pub basis: Vec<T>,
    /// Orthonormal companion of `basis` kept by `orthonorm`.
    pub orthonormal: Option<Vec<T>>,
    /// Final Gram state of `matrix-inversion`.
    pub gram: Option<GramState>,
    pub dimension: usize,
    pub method: Method,
    pub backend: Backend,
    pub tolerance: f64,
    pub stats: ClosureStats,
    pub warnings: Vec<ClosureWarning>,
}

impl<T> ClosureResult<T> {
    /// An orthonormal basis of the closure, if the method kept one.
    pub fn orthonormal_basis(&self) -> Option<&[T]> {
        match self.method {
            Method::OrthonormalizationDimOnly => Some(&self.basis),
            _ => self.orthonormal.as_deref(),
        }
    }

    pub fn has_conditioning_warning(&self) -> bool {
        self.warnings.iter().any(ClosureWarning::is_conditioning)
    }
}

fn finish<T: Operator>(
    generators: &[T],
    method: Method,
    cfg: &ClosureConfig,
    driver: Driver<'_>,
    basis: Vec<T>,
    orthonormal: Option<Vec<T>>,
    gram: Option<GramState>,
) -> ClosureResult<T> {
    ClosureResult {
        dimension: basis.len(),
        basis,
        orthonormal,
        gram,
        method,
        backend: generators[0].backend(),
        tolerance: cfg.tolerance,
        stats: driver.stats,
        warnings: driver.warnings,
    }
}

fn dim_of<T: Operator>(generators: &[T]) -> Result<usize> {
    generators
        .first()
        .map(Operator::dim)
        .ok_or_else(|| Error::invalid("generator set is empty"))
}

/// Closure with the SVD rank test. Non-dense operators are expanded for the
/// test only; the basis keeps the input representation.
pub fn close_standard<T: Operator>(
    generators: &[T],
    cfg: &ClosureConfig,
) -> Result<ClosureResult<T>> {
    let mut driver = Driver::new(cfg, dim_of(generators)?)?;
    let mut s = RankStrategy::new();
    driver.run(generators, &mut s)?;
    Ok(finish(
        generators,
        Method::StandardRank,
        cfg,
        driver,
        s.into_basis(),
        None,
        None,
    ))
}

pub fn close_matrix_inversion<T: Operator>(
    generators: &[T],
    cfg: &ClosureConfig,
) -> Result<ClosureResult<T>> {
    let mut driver = Driver::new(cfg, dim_of(generators)?)?;
    let mut s = InversionStrategy::new();
    driver.run(generators, &mut s)?;
    let (basis, gram) = s.into_parts();
    Ok(finish(
        generators,
        Method::MatrixInversion,
        cfg,
        driver,
        basis,
        None,
        Some(gram),
    ))
}

/// `keep_original` brackets and returns the raw elements with an orthonormal
/// companion; otherwise the orthonormal elements are bracketed directly.
pub fn close_orthonormalization<T: Operator>(
    generators: &[T],
    cfg: &ClosureConfig,
    keep_original: bool,
) -> Result<ClosureResult<T>> {
    let mut driver = Driver::new(cfg, dim_of(generators)?)?;
    let mut s = OrthoStrategy::new(keep_original);
    driver.run(generators, &mut s)?;
    let state = s.into_state();
    Ok(match state.b {
        Some(b) => finish(
            generators,
            Method::Orthonormalization,
            cfg,
            driver,
            b,
            Some(state.v),
            None,
        ),
        None => finish(
            generators,
            Method::OrthonormalizationDimOnly,
            cfg,
            driver,
            state.v,
            None,
            None,
        ),
    })
}

pub fn run_closure<T: Operator>(
    generators: &[T],
    method: Method,
    cfg: &ClosureConfig,
) -> Result<ClosureResult<T>> {
    match method {
        Method::StandardRank => close_standard(generators, cfg),
        Method::MatrixInversion => close_matrix_inversion(generators, cfg),
        Method::Orthonormalization => close_orthonormalization(generators, cfg, true),
        Method::OrthonormalizationDimOnly => close_orthonormalization(generators, cfg, false),
    }
}

/// Verdict of a single independence query.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndependenceReport {
    pub independent: bool,
    /// Residual norm of the unit-normalized candidate; absent for the rank test.
    pub residual: Option<f64>,
    /// Number of basis elements found independent and used for the query.
    pub basis_rank: usize,
}

/// Test `h` against the span of `basis` with the independence criterion of
/// `method`. Dependent basis elements are dropped for the residual methods;
/// `matrix-inversion` reports them as a degeneracy error instead.
pub fn independence_check<T: Operator>(
    basis: &[T],
    h: &T,
    method: Method,
    cfg: &ClosureConfig,
) -> Result<IndependenceReport> {
    cfg.validate()?;
    if let Some(b) = basis
        .iter()
        .find(|b| b.backend() != h.backend() || b.dim() != h.dim())
    {
        return Err(Error::invalid(format!(
            "basis element is a {} operator of dimension {}, candidate is {} of dimension {}",
            b.backend(),
            b.dim(),
            h.backend(),
            h.dim()
        )));
    }
    let basis: Vec<&T> = basis.iter().filter(|b| b.norm() > 0.0).collect();
    let h_norm = h.norm();
    let unit = |x: &T, n: f64| x.scaled(Complex64::new(1.0 / n, 0.0));
    match method {
        Method::StandardRank => {
            let hd = h.to_dense()?;
            let mut stack = StackedBasisMatrix::new(hd.dim());
            for b in &basis {
                stack.push(&unit(b, b.norm()).to_dense()?)?;
            }
            // The basis may itself be dependent here, so compare ranks
            // instead of testing the augmented stack for full column rank.
            let rows = stack.nrows();
            let cols = stack.ncols();
            let tol = cfg
                .rank_tolerance
                .unwrap_or_else(|| default_rank_tolerance(rows, cols));
            let rank = numerical_rank(
                Mat::from_fn(rows, cols, |i, j| stack.column(j)[i]).as_ref(),
                tol,
            )?;
            let independent = h_norm > 0.0 && {
                let hv = hd.vectorize();
                let hn = h_norm * (hd.dim() as f64).sqrt();
                let tol = cfg
                    .rank_tolerance
                    .unwrap_or_else(|| default_rank_tolerance(rows, cols + 1));
                let aug = Mat::from_fn(rows, cols + 1, |i, j| {
                    if j < cols {
                        stack.column(j)[i]
                    } else {
                        hv[i] / hn
                    }
                });
                numerical_rank(aug.as_ref(), tol)? > rank
            };
            Ok(IndependenceReport {
                independent,
                residual: None,
                basis_rank: rank,
            })
        }
        Method::MatrixInversion => {
            let units: Vec<T> = basis.iter().map(|b| unit(b, b.norm())).collect();
            let mut gram = GramState::new();
            for (k, u) in units.iter().enumerate() {
                let p = PreciseProjection::compute(&units[..k], u)?;
                gram.expand_dd(&p.beta, p.norm_sq, cfg.conditioning_floor)?;
            }
            if h_norm == 0.0 {
                return Ok(IndependenceReport {
                    independent: false,
                    residual: Some(0.0),
                    basis_rank: units.len(),
                });
            }
            let r = check_matrix_inversion(&gram, &units, &unit(h, h_norm), cfg.tolerance)?;
            Ok(IndependenceReport {
                independent: r.independent,
                residual: Some(r.residual),
                basis_rank: units.len(),
            })
        }
        Method::Orthonormalization | Method::OrthonormalizationDimOnly => {
            let mut v: Vec<T> = Vec::new();
            for b in &basis {
                let (perp, _) = project_residual(&v, &unit(b, b.norm()))?;
                let r = perp.norm();
                if r > cfg.tolerance {
                    v.push(unit(&perp, r));
                }
            }
            if h_norm == 0.0 {
                return Ok(IndependenceReport {
                    independent: false,
                    residual: Some(0.0),
                    basis_rank: v.len(),
                });
            }
            let (perp, _) = project_residual(&v, &unit(h, h_norm))?;
            let r = perp.norm();
            Ok(IndependenceReport {
                independent: r > cfg.tolerance,
                residual: Some(r),
                basis_rank: v.len(),
            })
        }
    }
}
