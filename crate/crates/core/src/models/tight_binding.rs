//! Spinless fermions on a ring of `N` sites, `eps_k = eps - 2t cos(2 pi k / N)`,
//! at a fixed chemical potential.

use serde::{Deserialize, Serialize};

use super::{check_temperature, gapped_low_t, ModelError};
use crate::thermal::{grand_canonical_point, ModeSystem, MuPolicy, Statistics, ThermoPoint};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TbMode {
    Finite,
    /// `pi N / (6 t T)`, from the band linearized at half filling.
    LinearizedThermo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TightBindingSpec<T> {
    #[serde(rename = "N")]
    pub n: usize,
    pub t: T,
    pub eps: T,
    pub mu: T,
}

/// The linearized form is flagged above `T = 0.3 t`.
pub const LINEARIZED_LIMIT: f64 = 0.3;

/// One point of the band: mode index, exact energy and the linearized
/// energy `eps + 2 t kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandPoint<T> {
    pub k: usize,
    pub energy: T,
    pub linearized: T,
}

impl<T: Real> TightBindingSpec<T> {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n < 4 || !self.n.is_multiple_of(2) {
            return Err(ModelError::InvalidSpec(format!("N must be even and at least 4, got {}", self.n)));
        }
        if !(self.t > T::zero() && self.t.is_finite() && self.eps.is_finite() && self.mu.is_finite()) {
            return Err(ModelError::InvalidSpec("t must be positive; eps and mu finite".into()));
        }
        Ok(())
    }

    pub fn energies(&self) -> Vec<T> {
        let n = T::from_usize_lossy(self.n);
        (1..=self.n)
            .map(|k| self.eps - T::lit(2.0) * self.t * (T::lit(2.0) * T::PI() * T::from_usize_lossy(k) / n).cos())
            .collect()
    }

    pub fn mode_system(&self) -> Result<ModeSystem<T>, ModelError> {
        self.validate()?;
        Ok(ModeSystem::from_energies(&self.energies(), Statistics::Fermion, MuPolicy::Fixed(self.mu))?)
    }

    pub fn point(&self, t: T) -> Result<ThermoPoint<T>, ModelError> {
        check_temperature(t)?;
        Ok(grand_canonical_point(&self.mode_system()?, t)?)
    }

    pub fn qfi(&self, temp: T, mode: TbMode) -> Result<T, ModelError> {
        check_temperature(temp)?;
        self.validate()?;
        match mode {
            TbMode::Finite => Ok(self.point(temp)?.qfi),
            TbMode::LinearizedThermo => {
                if (self.mu - self.eps).abs() > T::lit(1e-12) * (T::one() + self.eps.abs()) {
                    return Err(ModelError::Unsupported("the linearized form needs mu = eps".into()));
                }
                if temp > T::lit(LINEARIZED_LIMIT) * self.t {
                    log::warn!("T/t = {} is above {LINEARIZED_LIMIT}; the linear band is a poor fit", temp / self.t);
                }
                Ok(T::PI() * T::from_usize_lossy(self.n) / (T::lit(6.0) * self.t * temp))
            }
        }
    }

    /// Smallest `|eps_k - mu|` among modes not sitting at `mu`, and its
    /// multiplicity. At half filling with `4 | N` this is
    /// `(2t sin(2 pi / N), 4)`.
    pub fn gap(&self) -> Result<(T, T), ModelError> {
        let ms = self.mode_system()?;
        let (delta, g) = ms
            .lowest_excitation(self.mu)
            .ok_or_else(|| ModelError::Unsupported("no excitation".into()))?;
        Ok((delta, T::from_u64(g).unwrap_or_else(T::infinity)))
    }

    pub fn qfi_low_t(&self, temp: T) -> Result<T, ModelError> {
        let (delta, g) = self.gap()?;
        Ok(gapped_low_t(g, delta, temp))
    }

    /// Exact band with the linearization `eps_k - mu ~ 2 t kappa` overlaid.
    pub fn band(&self) -> Vec<BandPoint<T>> {
        let n = T::from_usize_lossy(self.n);
        let step = T::lit(2.0) * T::PI() / n;
        self.energies()
            .into_iter()
            .enumerate()
            .map(|(i, energy)| {
                let k = i + 1;
                let kk = T::from_usize_lossy(k);
                let kappa = if 2 * k <= self.n {
                    kk * step - T::FRAC_PI_2()
                } else {
                    T::lit(1.5) * T::PI() - kk * step
                };
                BandPoint {
                    k,
                    energy,
                    linearized: self.eps + T::lit(2.0) * self.t * kappa,
                }
            })
            .collect()
    }
}
