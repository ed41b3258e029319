//! `N` free bosons in a hard-walled cube `L^3` at fixed particle number.
//! The chemical potential is solved on the discrete mode grid at every
//! temperature; the continuum heat capacity gives the thermodynamic curve.

use serde::{Deserialize, Serialize};

use super::{check_temperature, gapped_low_t, lattice_shells, ModelError};
use crate::numerics::riemann_zeta;
use crate::thermal::{ModeSystem, MuPolicy, Statistics};
use crate::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoseGasSpec<T> {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub l: T,
    pub m: T,
    pub n_max: usize,
}

const CUTOFF_TEMPERATURES: f64 = 40.0;
/// Successive derivative estimates must agree to this relative level.
const DMU_AGREEMENT: f64 = 1e-3;
const DMU_FLOOR: f64 = 1e-7;

impl<T: Real> BoseGasSpec<T> {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n < 2 {
            return Err(ModelError::InvalidSpec(format!("need at least 2 bosons, got {}", self.n)));
        }
        if !(self.l > T::zero() && self.m > T::zero() && self.l.is_finite() && self.m.is_finite()) {
            return Err(ModelError::InvalidSpec("L and m must be positive".into()));
        }
        if self.n_max == 0 {
            return Err(ModelError::InvalidSpec("n_max must be positive".into()));
        }
        Ok(())
    }

    fn quantum(&self) -> T {
        let k = T::PI() / self.l;
        k * k / (T::lit(2.0) * self.m)
    }

    /// Lowest mode `3 pi^2 / (2 m L^2)`.
    pub fn ground_energy(&self) -> T {
        T::lit(3.0) * self.quantum()
    }

    /// `(Delta, g)` of a single boson leaving the ground mode:
    /// `|n|^2 = 3 -> 6`, threefold.
    pub fn gap(&self) -> (T, T) {
        (T::lit(3.0) * self.quantum(), T::lit(3.0))
    }

    /// Smallest `n_max` with the top mode `40 T` above the ground mode.
    pub fn n_max_for(l: T, m: T, t_max: T) -> usize {
        let probe = Self { n: 2, l, m, n_max: 1 };
        let top = probe.ground_energy() + T::lit(CUTOFF_TEMPERATURES) * t_max;
        (top / probe.quantum()).sqrt().ceil().to_usize().unwrap_or(usize::MAX)
    }

    pub fn mode_system(&self) -> Result<ModeSystem<T>, ModelError> {
        self.validate()?;
        let q = self.quantum();
        let modes = lattice_shells(3, self.n_max)
            .into_iter()
            .map(|(s, g)| (q * T::from_u64(s).unwrap_or_else(T::infinity), g));
        Ok(ModeSystem::new(
            modes,
            Statistics::Boson,
            MuPolicy::FixedNumber(T::from_usize_lossy(self.n)),
        )?)
    }

    fn check_cutoff(&self, t: T) -> Result<(), ModelError> {
        let cutoff = self.quantum() * T::from_usize_lossy(self.n_max * self.n_max);
        let required = self.ground_energy() + T::lit(CUTOFF_TEMPERATURES) * t;
        if cutoff < required {
            return Err(ModelError::CutoffInadequate {
                cutoff: cutoff.as_f64(),
                required: required.as_f64(),
            });
        }
        Ok(())
    }

    /// `(mu, d mu/dT)`. The derivative step starts at `T/100` and halves
    /// until two estimates agree to `1e-3`, down to `1e-7 T`.
    pub fn mu(&self, t: T) -> Result<(T, T), ModelError> {
        check_temperature(t)?;
        self.check_cutoff(t)?;
        let ms = self.mode_system()?;
        self.mu_on(&ms, t)
    }

    fn mu_on(&self, ms: &ModeSystem<T>, t: T) -> Result<(T, T), ModelError> {
        let n = T::from_usize_lossy(self.n);
        let mu = ms.solve_mu(n, t)?;
        let central = |h: T| -> Result<T, ModelError> {
            Ok((ms.solve_mu(n, t + h)? - ms.solve_mu(n, t - h)?) / (T::lit(2.0) * h))
        };
        let mut h = T::lit(1e-2) * t;
        let mut prev = central(h)?;
        let floor = T::lit(DMU_FLOOR) * t;
        loop {
            h = h / T::lit(2.0);
            if h < floor {
                return Ok((mu, prev));
            }
            let next = central(h)?;
            if (next - prev).abs() <= T::lit(DMU_AGREEMENT) * next.abs() {
                return Ok((mu, next));
            }
            prev = next;
        }
    }

    pub fn qfi(&self, t: T) -> Result<T, ModelError> {
        check_temperature(t)?;
        self.check_cutoff(t)?;
        let ms = self.mode_system()?;
        let (mu, dmu) = self.mu_on(&ms, t)?;
        Ok(ms.qfi_at(t, mu, dmu)?)
    }

    pub fn qfi_low_t(&self, t: T) -> T {
        let (delta, g) = self.gap();
        gapped_low_t(g, delta, t)
    }

    /// `T_c = (2 pi / m) (N / (L^3 zeta(3/2)))^{2/3}`.
    pub fn critical_temperature(&self) -> Result<T, ModelError> {
        let density = T::from_usize_lossy(self.n) / self.l.powi(3);
        let z = riemann_zeta(T::lit(1.5))?;
        Ok(T::lit(2.0) * T::PI() / self.m * (density / z).powf(T::lit(2.0) / T::lit(3.0)))
    }

    /// Continuum `C / N`: `(15/4) zeta(5/2)/zeta(3/2) (T/T_c)^{3/2}` up to
    /// `T_c`, the approximate `(3/2)[1 + zeta(3/2) 2^{-7/2} (T_c/T)^{3/2}]`
    /// above.
    pub fn heat_capacity_thermo(&self, t: T) -> Result<T, ModelError> {
        check_temperature(t)?;
        let tc = self.critical_temperature()?;
        let z32 = riemann_zeta(T::lit(1.5))?;
        let r = (t / tc).powf(T::lit(1.5));
        if t <= tc {
            let z52 = riemann_zeta(T::lit(2.5))?;
            Ok(T::lit(3.75) * z52 / z32 * r)
        } else {
            Ok(T::lit(1.5) * (T::one() + z32 / T::lit(2.0).powf(T::lit(3.5)) / r))
        }
    }

    /// `N C(T) / T^2` from the continuum heat capacity.
    pub fn qfi_thermo(&self, t: T) -> Result<T, ModelError> {
        Ok(T::from_usize_lossy(self.n) * self.heat_capacity_thermo(t)? / (t * t))
    }
}
