//! Physical systems: free photons and massive particles in a box, the
//! tight-binding ring, two sites cut out of an infinite chain, a finite Bose
//! gas across condensation and the square-lattice Ising model.
//!
//! Every spec deserializes from `{"model": <name>, "params": {...}}` through
//! [`ModelSpec`].

pub mod bec;
pub mod ising;
pub mod massive;
pub mod photon;
pub mod tight_binding;
pub mod two_site;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::NumericsError;
use crate::povm::PovmError;
use crate::thermal::ThermalError;
use crate::Real;

pub use bec::BoseGasSpec;
pub use ising::IsingSpec;
pub use massive::{MassiveGasSpec, MassiveMode};
pub use photon::{PhotonGasSpec, PhotonMode};
pub use tight_binding::{TbMode, TightBindingSpec};
pub use two_site::{CovarianceMode, Coupling, TwoSiteSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameters: {0}")]
    InvalidSpec(String),
    #[error("mode cutoff reaches energy {cutoff}, below the required {required}; raise n_max")]
    CutoffInadequate { cutoff: f64, required: f64 },
    #[error("not available for this model: {0}")]
    Unsupported(String),
    #[error("{spins} spins exceed the enumeration cap of {cap}")]
    SizeCap { spins: usize, cap: usize },
    #[error("temperature must be positive and finite, got {0}")]
    InvalidTemperature(f64),
    #[error(transparent)]
    Thermal(#[from] ThermalError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Povm(#[from] PovmError),
}

pub(crate) fn check_temperature<T: Real>(t: T) -> Result<(), ModelError> {
    if t > T::zero() && t.is_finite() {
        Ok(())
    } else {
        Err(ModelError::InvalidTemperature(t.as_f64()))
    }
}

/// Tagged model record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", content = "params", rename_all = "snake_case")]
#[serde(bound(deserialize = "T: Real + Deserialize<'de>", serialize = "T: Real + Serialize"))]
pub enum ModelSpec<T> {
    Photon(PhotonGasSpec<T>),
    Massive(MassiveGasSpec<T>),
    TightBinding(TightBindingSpec<T>),
    TwoSite(TwoSiteSpec<T>),
    Bec(BoseGasSpec<T>),
    Ising(IsingSpec<T>),
}

impl<T: Real> ModelSpec<T> {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Photon(_) => "photon",
            ModelSpec::Massive(_) => "massive",
            ModelSpec::TightBinding(_) => "tight_binding",
            ModelSpec::TwoSite(_) => "two_site",
            ModelSpec::Bec(_) => "bec",
            ModelSpec::Ising(_) => "ising",
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        match self {
            ModelSpec::Photon(s) => s.validate(),
            ModelSpec::Massive(s) => s.validate(),
            ModelSpec::TightBinding(s) => s.validate(),
            ModelSpec::TwoSite(s) => s.validate(),
            ModelSpec::Bec(s) => s.validate(),
            ModelSpec::Ising(s) => s.validate(),
        }
    }
}

/// `nu_d` of the continuum mode integrals.
pub(crate) fn nu_d<T: Real>(d: usize) -> T {
    match d {
        1 => T::one(),
        2 => T::PI(),
        _ => T::lit(2.0) * T::PI(),
    }
}

pub(crate) fn check_dimension(d: usize) -> Result<(), ModelError> {
    if (1..=3).contains(&d) {
        Ok(())
    } else {
        Err(ModelError::InvalidSpec(format!("dimension must be 1, 2 or 3, got {d}")))
    }
}

/// Shells `s = n_1^2 + ... + n_d^2` of positive-integer vectors inside the
/// sphere `s <= n_max^2`, with their multiplicities, ascending in `s`.
pub fn lattice_shells(d: usize, n_max: usize) -> Vec<(u64, u64)> {
    let s_max = n_max * n_max;
    let mut counts = vec![0u64; s_max + 1];
    counts[0] = 1;
    for _ in 0..d {
        let mut next = vec![0u64; s_max + 1];
        for (s, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mut n = 1;
            while s + n * n <= s_max {
                next[s + n * n] += c;
                n += 1;
            }
        }
        counts = next;
    }
    counts
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(s, c)| (s as u64, c))
        .collect()
}

/// `g Delta^2 e^{-Delta/T} / T^4`, the gapped low-temperature law.
pub fn gapped_low_t<T: Real>(g: T, delta: T, t: T) -> T {
    g * delta * delta / t.powi(4) * (-delta / t).exp()
}
