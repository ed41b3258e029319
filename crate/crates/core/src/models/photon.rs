//! A single polarization of photons in a hard-walled box `L^d`, with
//! `eps = c pi |n| / L` over positive-integer `n` and `mu = 0`.

use serde::{Deserialize, Serialize};

use super::{check_dimension, check_temperature, gapped_low_t, lattice_shells, ModelError};
use crate::numerics::riemann_zeta;
use crate::thermal::{grand_canonical_point, ModeSystem, MuPolicy, Statistics, ThermoPoint};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhotonMode {
    Finite,
    Thermodynamic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotonGasSpec<T> {
    pub d: usize,
    #[serde(rename = "L")]
    pub l: T,
    pub c: T,
    /// Modes with `|n| <= n_max` are kept.
    pub n_max: usize,
}

/// The highest kept mode must sit this many temperatures above the
/// chemical potential.
pub const CUTOFF_TEMPERATURES: f64 = 40.0;

impl<T: Real> PhotonGasSpec<T> {
    pub fn validate(&self) -> Result<(), ModelError> {
        check_dimension(self.d)?;
        if !(self.l > T::zero() && self.c > T::zero() && self.l.is_finite() && self.c.is_finite()) {
            return Err(ModelError::InvalidSpec("L and c must be positive".into()));
        }
        if self.n_max == 0 {
            return Err(ModelError::InvalidSpec("n_max must be positive".into()));
        }
        Ok(())
    }

    fn quantum(&self) -> T {
        self.c * T::PI() / self.l
    }

    /// Energy of the highest kept mode, `c pi n_max / L`.
    pub fn cutoff_energy(&self) -> T {
        self.quantum() * T::from_usize_lossy(self.n_max)
    }

    /// Smallest `n_max` that satisfies the cutoff rule up to `t_max`.
    pub fn n_max_for(l: T, c: T, t_max: T) -> usize {
        let n = T::lit(CUTOFF_TEMPERATURES) * t_max / (c * T::PI() / l);
        n.ceil().to_usize().unwrap_or(usize::MAX).max(1)
    }

    /// `(Delta, g) = (c pi sqrt(d) / L, 1)`.
    pub fn gap(&self) -> (T, T) {
        (self.quantum() * T::from_usize_lossy(self.d).sqrt(), T::one())
    }

    pub fn mode_system(&self) -> Result<ModeSystem<T>, ModelError> {
        self.validate()?;
        let q = self.quantum();
        let modes = lattice_shells(self.d, self.n_max)
            .into_iter()
            .map(|(s, g)| (q * T::from_u64(s).unwrap_or_else(T::infinity).sqrt(), g));
        Ok(ModeSystem::new(modes, Statistics::Boson, MuPolicy::Fixed(T::zero()))?)
    }

    fn check_cutoff(&self, t: T) -> Result<(), ModelError> {
        let required = T::lit(CUTOFF_TEMPERATURES) * t;
        if self.cutoff_energy() < required {
            return Err(ModelError::CutoffInadequate {
                cutoff: self.cutoff_energy().as_f64(),
                required: required.as_f64(),
            });
        }
        Ok(())
    }

    pub fn point(&self, t: T) -> Result<ThermoPoint<T>, ModelError> {
        check_temperature(t)?;
        self.check_cutoff(t)?;
        Ok(grand_canonical_point(&self.mode_system()?, t)?)
    }

    pub fn qfi(&self, t: T, mode: PhotonMode) -> Result<T, ModelError> {
        check_temperature(t)?;
        self.validate()?;
        match mode {
            PhotonMode::Finite => Ok(self.point(t)?.qfi),
            PhotonMode::Thermodynamic => {
                Ok(eta::<T>(self.d)? * (self.l / self.c).powi(self.d as i32) * t.powi(self.d as i32 - 2))
            }
        }
    }

    pub fn qfi_low_t(&self, t: T) -> T {
        let (delta, g) = self.gap();
        gapped_low_t(g, delta, t)
    }
}

/// `eta_1 = pi/3`, `eta_2 = 3 zeta(3)/pi`, `eta_3 = 2 pi^2/15`.
pub fn eta<T: Real>(d: usize) -> Result<T, ModelError> {
    let pi = T::PI();
    match d {
        1 => Ok(pi / T::lit(3.0)),
        2 => Ok(T::lit(3.0) * riemann_zeta(T::lit(3.0))? / pi),
        3 => Ok(T::lit(2.0) * pi * pi / T::lit(15.0)),
        _ => Err(ModelError::InvalidSpec(format!("dimension must be 1, 2 or 3, got {d}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{quad_adaptive, Interval, Tolerance};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn line(n_max: usize) -> PhotonGasSpec<f64> {
        PhotonGasSpec { d: 1, l: 1.0, c: 1.0, n_max }
    }

    #[test]
    fn thermodynamic_value_in_one_dimension() {
        let f = line(10).qfi(1.0, PhotonMode::Thermodynamic).unwrap();
        assert!((f - std::f64::consts::FRAC_PI_3).abs() < 1e-6);
    }

    #[test]
    fn eta_matches_continuum_integral() {
        // eta_d (L/c)^d T^{d-2} = L^d/(4T^2) int d^dk/(2pi)^d c^2k^2/sinh^2(ck/2T)
        // with c = L = T = 1 and the angular factor of each dimension
        let tol = Tolerance::new(1e-12, 1e-14, 100).unwrap();
        let iv = Interval::half_infinite(0.0).unwrap();
        let radial = |p: i32| {
            quad_adaptive(
                |k: f64| if k == 0.0 { 0.0 } else { k.powi(p) / (k / 2.0).sinh().powi(2) },
                iv,
                tol,
            )
            .unwrap()
        };
        let i1 = 2.0 * radial(2) / (2.0 * PI) / 4.0;
        let i2 = 2.0 * PI * radial(3) / (4.0 * PI * PI) / 4.0;
        let i3 = 4.0 * PI * radial(4) / (8.0 * PI.powi(3)) / 4.0;
        assert_relative_eq!(i1, eta::<f64>(1).unwrap(), max_relative = 1e-9);
        assert_relative_eq!(i2, eta::<f64>(2).unwrap(), max_relative = 1e-9);
        assert_relative_eq!(i3, eta::<f64>(3).unwrap(), max_relative = 1e-9);
    }

    #[test]
    fn finite_meets_thermodynamic_above_two_gaps() {
        let spec = line(2000);
        let delta = spec.gap().0;
        for i in 0..=20 {
            let t = 2.0 * delta * 10f64.powf(i as f64 / 20.0);
            let a = spec.qfi(t, PhotonMode::Finite).unwrap();
            let b = spec.qfi(t, PhotonMode::Thermodynamic).unwrap();
            assert!((a / b - 1.0).abs() < 0.1, "T = {t}: {a} vs {b}");
        }
    }

    #[test]
    fn low_t_law() {
        let spec = line(10);
        let (delta, g) = spec.gap();
        let t = delta / 25.0;
        let f = spec.qfi(t, PhotonMode::Finite).unwrap();
        let gap_log = (f * t.powi(4) / (g * delta * delta)).ln() + delta / t;
        assert!(gap_log.abs() < 0.05 * 25.0);
        assert!(((f.ln() - spec.qfi_low_t(t).ln()) / f.ln()).abs() < 0.05);
        let d3 = PhotonGasSpec { d: 3, l: 1.0, c: 1.0, n_max: 10 };
        assert_relative_eq!(d3.gap().0, PI * 3f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn cutoff_rule() {
        let spec = line(10);
        assert!(matches!(spec.qfi(1.0, PhotonMode::Finite), Err(ModelError::CutoffInadequate { .. })));
        let n = PhotonGasSpec::<f64>::n_max_for(1.0, 1.0, 1.0);
        assert!(line(n).qfi(1.0, PhotonMode::Finite).is_ok());
    }
}
