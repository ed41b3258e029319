//! Special functions and the small numerical toolkit (quadrature, root
//! bracketing, finite differences, least squares) the rest of the crate is
//! built on.
//!
//! Everything here is pure and reentrant.

mod diff;
mod linalg;
mod quadrature;
mod roots;
mod special;

pub use diff::{derivative, derivative5, try_derivative, try_derivative5};
pub use linalg::{lstsq, LstsqSolution};
pub use quadrature::{quad_adaptive, quad_adaptive_with_error, QuadEstimate};
pub use roots::find_root;
pub use special::{
    elliptic_e, elliptic_k, elliptic_ke, elliptic_ke_with_complement, gamma_fn, polylog2,
    riemann_zeta,
};

use crate::Real;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("argument {value} outside the domain of {function}: {requirement}")]
    Domain {
        function: &'static str,
        value: f64,
        requirement: &'static str,
    },
    #[error("{0} diverges at this argument")]
    Singularity(&'static str),
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(&'static str),
    #[error("quadrature did not converge after {subdivisions} subdivisions (estimate {estimate}, error {error})")]
    QuadratureNotConverged {
        subdivisions: usize,
        estimate: f64,
        error: f64,
    },
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("root finder did not converge after {0} iterations")]
    RootNotConverged(usize),
    #[error("non-finite function value at x = {0}")]
    NonFinite(f64),
    #[error("finite-difference step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("least-squares problem is ill-conditioned (condition number {0:e})")]
    IllConditioned(f64),
    #[error("least-squares shape mismatch: {0}")]
    Shape(String),
}

/// Integration or bracketing range. `lo` may be `-inf` and `hi` may be `+inf`
/// for tail integrals; everything else must be finite with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> Interval<T> {
    pub fn new(lo: T, hi: T) -> Result<Self, NumericsError> {
        let ok = !lo.is_nan()
            && !hi.is_nan()
            && lo < hi
            && lo != T::infinity()
            && hi != T::neg_infinity();
        if ok {
            Ok(Self { lo, hi })
        } else {
            Err(NumericsError::InvalidInterval {
                lo: lo.as_f64(),
                hi: hi.as_f64(),
            })
        }
    }

    /// `[lo, +inf)`.
    pub fn half_infinite(lo: T) -> Result<Self, NumericsError> {
        Self::new(lo, T::infinity())
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }
}

/// Convergence settings shared by the quadrature and the root finder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance<T> {
    pub rel: T,
    pub abs: T,
    pub max_iter: usize,
}

impl<T: Real> Tolerance<T> {
    pub fn new(rel: T, abs: T, max_iter: usize) -> Result<Self, NumericsError> {
        if !(rel > T::zero()) {
            return Err(NumericsError::InvalidTolerance("rel must be positive"));
        }
        if !(abs >= T::zero()) {
            return Err(NumericsError::InvalidTolerance("abs must be non-negative"));
        }
        if max_iter == 0 {
            return Err(NumericsError::InvalidTolerance("max_iter must be at least 1"));
        }
        Ok(Self { rel, abs, max_iter })
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter.max(1);
        self
    }
}

impl<T: Real> Default for Tolerance<T> {
    fn default() -> Self {
        Self {
            rel: T::lit(1e-10),
            abs: T::lit(1e-12),
            max_iter: 60,
        }
    }
}
