//! Fisher information and quantum Fisher information for temperature
//! estimation on thermal quantum systems.
//!
//! The numerical core is generic over the scalar type through [`Real`]
//! (implemented for `f32` and `f64`); the aliases at the crate root fix the
//! scalar to `f64`, which is what the models, the estimator and the CLI use.
//! Natural units are used throughout: `k_B = hbar = 1`.

// `!(x > 0.0)` is used on purpose so that NaN falls into the error branch.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod estimator;
pub mod models;
pub mod numerics;
pub mod povm;
pub mod scaling;
pub mod sweep;
pub mod thermal;

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Scalar bound used by every generic routine in the crate.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).unwrap_or_else(Self::infinity)
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + Sum
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}

pub type Interval = numerics::Interval<f64>;
pub type Tolerance = numerics::Tolerance<f64>;

pub type DiscreteSpectrum = thermal::DiscreteSpectrum<f64>;
pub type ModeSystem = thermal::ModeSystem<f64>;
pub type ThermoPoint = thermal::ThermoPoint<f64>;
pub type QfiMatrix = thermal::QfiMatrix<f64>;

pub type HermitianOperator = povm::HermitianOperator<f64>;
pub type Povm = povm::Povm<f64>;
pub type OutcomeSpectrum = povm::OutcomeSpectrum<f64>;

pub type GapExpansion = scaling::GapExpansion<f64>;
pub type ScalingVerdict = scaling::ScalingVerdict<f64>;

pub type ModelSpec = models::ModelSpec<f64>;
pub type PhotonGasSpec = models::PhotonGasSpec<f64>;
pub type MassiveGasSpec = models::MassiveGasSpec<f64>;
pub type TightBindingSpec = models::TightBindingSpec<f64>;
pub type TwoSiteSpec = models::TwoSiteSpec<f64>;
pub type BoseGasSpec = models::BoseGasSpec<f64>;
pub type IsingSpec = models::IsingSpec<f64>;
