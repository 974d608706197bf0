use nalgebra::DMatrix;

use super::spectral::{dense_spectral_radius, spectral_radius, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::graph::{blend_adjacency, GraphBundle};

/// Condition-number estimate above which the Katz solve is rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// How the decay parameter alpha is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaPolicy {
    /// Use this alpha; it must satisfy `alpha * rho(A*) < 1`.
    Explicit(f64),
    /// `alpha = beta / rho(A*)` with `beta` in (0, 1).
    Relative(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KatzConfig {
    pub policy: AlphaPolicy,
    /// `alpha * rho` above this margin is logged as close to divergence.
    pub safety_margin: f64,
}

impl Default for KatzConfig {
    fn default() -> Self {
        Self { policy: AlphaPolicy::Relative(0.5), safety_margin: 0.95 }
    }
}

impl KatzConfig {
    pub fn explicit(alpha: f64) -> Self {
        Self { policy: AlphaPolicy::Explicit(alpha), ..Self::default() }
    }

    pub fn relative(beta: f64) -> Self {
        Self { policy: AlphaPolicy::Relative(beta), ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        match self.policy {
            AlphaPolicy::Explicit(a) if !(a.is_finite() && a > 0.0) => {
                Err(Error::InvalidArgument(format!("alpha must be positive and finite, got {a}")))
            }
            AlphaPolicy::Relative(b) if !(b > 0.0 && b < 1.0) => {
                Err(Error::InvalidArgument(format!("beta must lie in (0, 1), got {b}")))
            }
            _ if !(self.safety_margin > 0.0 && self.safety_margin < 1.0) => Err(Error::InvalidArgument(
                format!("safety margin must lie in (0, 1), got {}", self.safety_margin),
            )),
            _ => Ok(()),
        }
    }

    /// Resolves alpha for a matrix of spectral radius `rho`.
    ///
    /// A nilpotent matrix (`rho == 0`) admits every alpha; the relative
    /// policy then uses `alpha = beta`.
    pub fn resolve_alpha(&self, rho: f64) -> f64 {
        match self.policy {
            AlphaPolicy::Explicit(a) => a,
            AlphaPolicy::Relative(b) if rho > 0.0 => b / rho,
            AlphaPolicy::Relative(b) => b,
        }
    }
}

/// Katz proximity matrix `S = (I - alpha A*)^-1 - I`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    s: DMatrix<f64>,
    alpha: f64,
    rho: f64,
}

impl SimilarityMatrix {
    /// Wraps an arbitrary finite square matrix, e.g. for embedding tests.
    pub fn from_matrix(s: DMatrix<f64>) -> Result<Self> {
        if !s.is_square() {
            return Err(Error::Structure(format!("similarity matrix is {}x{}", s.nrows(), s.ncols())));
        }
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("similarity matrix has non-finite entries".into()));
        }
        Ok(Self { s, alpha: f64::NAN, rho: f64::NAN })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.s
    }

    /// Decay used to build the matrix (NaN when wrapped from raw data).
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Spectral radius of the blended adjacency (NaN when wrapped from raw data).
    pub fn spectral_radius(&self) -> f64 {
        self.rho
    }

    pub fn n(&self) -> usize {
        self.s.nrows()
    }
}

/// Multimodal Katz index of a bundle: the Katz index of its blended adjacency.
pub fn katz_similarity(bundle: &GraphBundle, cfg: &KatzConfig) -> Result<SimilarityMatrix> {
    katz_from_adjacency(&blend_adjacency(bundle), cfg)
}

/// Katz index of a single non-negative adjacency matrix.
///
/// Solves `(I - alpha A) S = alpha A` by LU rather than forming the inverse.
pub fn katz_from_adjacency(a: &DMatrix<f64>, cfg: &KatzConfig) -> Result<SimilarityMatrix> {
    cfg.validate()?;
    if !a.is_square() {
        return Err(Error::Structure(format!("adjacency is {}x{}", a.nrows(), a.ncols())));
    }
    let n = a.nrows();
    let estimate = spectral_radius(a, DEFAULT_TOL, DEFAULT_MAX_ITER);
    let rho = if estimate.converged && estimate.value.is_finite() {
        estimate.value
    } else {
        log::debug!("power iteration stalled after {} steps, using dense eigenvalues", estimate.iterations);
        dense_spectral_radius(a)
            .ok_or_else(|| Error::Numerical("spectral radius: neither power iteration nor Schur converged".into()))?
    };
    let alpha = cfg.resolve_alpha(rho);
    if alpha * rho >= 1.0 {
        return Err(Error::KatzValidity { alpha, rho });
    }
    if alpha * rho > cfg.safety_margin {
        log::warn!("alpha * rho = {} exceeds safety margin {}", alpha * rho, cfg.safety_margin);
    }

    let scaled = a * alpha;
    let system = DMatrix::<f64>::identity(n, n) - &scaled;
    let lu = system.clone().lu();
    let s = lu
        .solve(&scaled)
        .ok_or_else(|| Error::Numerical("I - alpha A is singular".into()))?;
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("Katz solve produced non-finite entries".into()));
    }
    // (I - alpha A)^-1 = S + I, so the 1-norm condition number needs no extra solve.
    let inverse = &s + DMatrix::<f64>::identity(n, n);
    let cond = one_norm(&system) * one_norm(&inverse);
    if cond.is_nan() || cond > MAX_CONDITION {
        return Err(Error::Numerical(format!("condition estimate {cond:e} exceeds {MAX_CONDITION:e}")));
    }
    Ok(SimilarityMatrix { s, alpha, rho })
}

fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}
