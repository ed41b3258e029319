//! Free massive fermions or bosons in a hard-walled box `L^d`,
//! `eps = (pi |n| / L)^2 / 2m` over positive-integer `n`.
//!
//! Four evaluation paths: the exact mode sum, the continuum integral, its
//! closed form in two dimensions, and the low-temperature asymptotics for
//! `mu = 0`, `mu < 0` and (fermions) `mu > 0`.

use serde::{Deserialize, Serialize};

use super::{check_dimension, check_temperature, lattice_shells, nu_d, ModelError};
use crate::numerics::{gamma_fn, polylog2, quad_adaptive, riemann_zeta, Interval, Tolerance};
use crate::thermal::{grand_canonical_point, ModeSystem, MuPolicy, Statistics, ThermoPoint};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassiveMode {
    Finite,
    ThermodynamicIntegral,
    Thermodynamic2dClosed,
    Asymptotic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassiveGasSpec<T> {
    pub d: usize,
    #[serde(rename = "L")]
    pub l: T,
    pub m: T,
    pub statistics: Statistics,
    pub mu_policy: MuPolicy<T>,
    pub n_max: usize,
}

const CUTOFF_TEMPERATURES: f64 = 40.0;
/// Integrand tail beyond `x = 40` is below `e^{-80}`.
const TAIL_X: f64 = 40.0;

impl<T: Real> MassiveGasSpec<T> {
    pub fn validate(&self) -> Result<(), ModelError> {
        check_dimension(self.d)?;
        if !(self.l > T::zero() && self.m > T::zero() && self.l.is_finite() && self.m.is_finite()) {
            return Err(ModelError::InvalidSpec("L and m must be positive".into()));
        }
        if self.n_max == 0 {
            return Err(ModelError::InvalidSpec("n_max must be positive".into()));
        }
        if let (Statistics::Boson, MuPolicy::Fixed(mu)) = (self.statistics, self.mu_policy) {
            if mu > T::zero() {
                return Err(ModelError::InvalidSpec(format!(
                    "bosons need mu <= 0 in the continuum, got {mu}"
                )));
            }
        }
        Ok(())
    }

    /// `(pi / L)^2 / 2m`, the energy of `|n|^2 = 1`.
    pub fn quantum(&self) -> T {
        let k = T::PI() / self.l;
        k * k / (T::lit(2.0) * self.m)
    }

    pub fn cutoff_energy(&self) -> T {
        self.quantum() * T::from_usize_lossy(self.n_max * self.n_max)
    }

    pub fn mode_system(&self) -> Result<ModeSystem<T>, ModelError> {
        self.validate()?;
        let q = self.quantum();
        let modes = lattice_shells(self.d, self.n_max)
            .into_iter()
            .map(|(s, g)| (q * T::from_u64(s).unwrap_or_else(T::infinity), g));
        Ok(ModeSystem::new(modes, self.statistics, self.mu_policy)?)
    }

    fn check_cutoff(&self, ms: &ModeSystem<T>, t: T) -> Result<(), ModelError> {
        let mu = ms.chemical_potential(t)?;
        let required = mu.max(T::zero()) + T::lit(CUTOFF_TEMPERATURES) * t;
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
        let ms = self.mode_system()?;
        self.check_cutoff(&ms, t)?;
        Ok(grand_canonical_point(&ms, t)?)
    }

    fn fixed_mu(&self) -> Result<T, ModelError> {
        match self.mu_policy {
            MuPolicy::Fixed(mu) => Ok(mu),
            MuPolicy::FixedNumber(_) => Err(ModelError::Unsupported(
                "continuum forms take a fixed chemical potential".into(),
            )),
        }
    }

    /// `nu_d T^{d/2 - 2} (sqrt(m) L / pi)^d`.
    fn prefactor(&self, t: T) -> T {
        let base = self.m.sqrt() * self.l / T::PI();
        nu_d::<T>(self.d) * base.powi(self.d as i32) * t.powf(T::from_usize_lossy(self.d) / T::lit(2.0) - T::lit(2.0))
    }

    pub fn qfi(&self, t: T, mode: MassiveMode) -> Result<T, ModelError> {
        self.qfi_with_dmu(t, mode, T::zero())
    }

    /// As [`Self::qfi`], with an explicit `d mu / dT` for the continuum forms.
    pub fn qfi_with_dmu(&self, t: T, mode: MassiveMode, dmu_dt: T) -> Result<T, ModelError> {
        check_temperature(t)?;
        self.validate()?;
        match mode {
            MassiveMode::Finite => Ok(self.point(t)?.qfi),
            MassiveMode::ThermodynamicIntegral => {
                let mu = self.fixed_mu()?;
                Ok(self.prefactor(t) * continuum_integral(self.d, self.statistics, mu / (T::lit(2.0) * t), dmu_dt / T::lit(2.0))?)
            }
            MassiveMode::Thermodynamic2dClosed => {
                if self.d != 2 {
                    return Err(ModelError::Unsupported(format!(
                        "the closed form holds in two dimensions, not d = {}",
                        self.d
                    )));
                }
                let mu = self.fixed_mu()?;
                Ok(self.prefactor(t) * closed_2d(self.statistics, mu / (T::lit(2.0) * t), dmu_dt / T::lit(2.0))?)
            }
            MassiveMode::Asymptotic => self.asymptotic(t),
        }
    }

    fn asymptotic(&self, t: T) -> Result<T, ModelError> {
        let mu = self.fixed_mu()?;
        let half_d = T::from_usize_lossy(self.d) / T::lit(2.0);
        let two_half_d = T::lit(2.0).powf(half_d);
        let base = self.m.sqrt() * self.l / T::PI();
        let geometry = nu_d::<T>(self.d) * base.powi(self.d as i32);
        if mu == T::zero() {
            let gz = gamma_fn(half_d + T::lit(2.0))? * riemann_zeta(half_d + T::one())?;
            let stat = match self.statistics {
                Statistics::Boson => T::one() / two_half_d,
                Statistics::Fermion => (two_half_d - T::one()) / (two_half_d * two_half_d),
            };
            return Ok(stat * geometry * gz * t.powf(half_d - T::lit(2.0)));
        }
        if mu < T::zero() {
            return Ok(geometry * gamma_fn(half_d)? / two_half_d * mu * mu * (mu / t).exp()
                / t.powf(T::lit(4.0) - half_d));
        }
        match self.statistics {
            Statistics::Boson => Err(ModelError::InvalidSpec("bosons need mu <= 0".into())),
            Statistics::Fermion => {
                let pi = T::PI();
                let b = (self.m * mu).sqrt() * self.l / pi;
                Ok(nu_d::<T>(self.d) / two_half_d * pi * pi / T::lit(3.0) * b.powi(self.d as i32) / (mu * t))
            }
        }
    }

    /// Smallest excitation and its degeneracy on the finite grid (fixed
    /// `mu` only).
    pub fn gap(&self) -> Result<(T, T), ModelError> {
        let mu = self.fixed_mu()?;
        let ms = self.mode_system()?;
        let (delta, g) = ms
            .lowest_excitation(mu)
            .ok_or_else(|| ModelError::Unsupported("no excitation on the grid".into()))?;
        Ok((delta, T::from_u64(g).unwrap_or_else(T::infinity)))
    }
}

/// `1/sinh^2 x` (bosons) or `1/cosh^2 x` (fermions) without overflow.
fn kernel<T: Real>(stats: Statistics, x: T) -> T {
    let q = (-T::lit(2.0) * x.abs()).exp();
    match stats {
        Statistics::Fermion => T::lit(4.0) * q / ((T::one() + q) * (T::one() + q)),
        Statistics::Boson => {
            let den = -(-T::lit(2.0) * x.abs()).exp_m1();
            T::lit(4.0) * q / (den * den)
        }
    }
}

/// `int_{-a}^inf (x + b)^2 (x + a)^{d/2 - 1} K(x) dx` with `a = mu/2T` and
/// `b = mu'/2`, through `x = u^2 - a` to absorb the endpoint power.
pub fn continuum_integral<T: Real>(d: usize, stats: Statistics, a: T, b: T) -> Result<T, ModelError> {
    if stats == Statistics::Boson && a > T::zero() {
        return Err(ModelError::InvalidSpec("bosons need mu <= 0".into()));
    }
    let x_top = (-a).max(T::zero()) + T::lit(TAIL_X);
    let u_top = (x_top + a).sqrt();
    let tol = Tolerance::new(T::lit(1e-12), T::zero(), 400)?;
    let f = |u: T| {
        if u == T::zero() {
            return T::zero();
        }
        let x = u * u - a;
        T::lit(2.0) * u.powi(d as i32 - 1) * (x + b) * (x + b) * kernel(stats, x)
    };
    // split at the kernel peak x = 0 when it lies inside the range
    let mut total = T::zero();
    let u_peak = if a > T::zero() { a.sqrt() } else { T::zero() };
    if u_peak > T::zero() {
        total = total + quad_adaptive(f, Interval::new(T::zero(), u_peak)?, tol)?;
    }
    total = total + quad_adaptive(f, Interval::new(u_peak, u_top)?, tol)?;
    Ok(total)
}

fn ln_cosh<T: Real>(a: T) -> T {
    a.abs() + (-T::lit(2.0) * a.abs()).exp().ln_1p() - T::LN_2()
}

/// The two-dimensional integral in closed form, same `a`, `b` as
/// [`continuum_integral`].
pub fn closed_2d<T: Real>(stats: Statistics, a: T, b: T) -> Result<T, ModelError> {
    let two = T::lit(2.0);
    match stats {
        Statistics::Fermion => {
            // -Li2(-e^{2a}) - 2a ln(1+e^{2a}) + (a-b)^2 (1+tanh a) + 2ab + 2b (ln cosh a + ln 2)
            let softplus = if a > T::zero() {
                two * a + (-two * a).exp().ln_1p()
            } else {
                (two * a).exp().ln_1p()
            };
            let li = if a > T::lit(300.0) {
                // Li2(-y) = -pi^2/6 - ln^2(y)/2 - Li2(-1/y)
                let y_inv = (-two * a).exp();
                -(T::PI() * T::PI() / T::lit(6.0)) - two * a * a - polylog2(-y_inv)?
            } else {
                polylog2(-(two * a).exp())?
            };
            Ok(-li - two * a * softplus
                + (a - b) * (a - b) * (T::one() + a.tanh())
                + two * a * b
                + two * b * (ln_cosh(a) + T::LN_2()))
        }
        Statistics::Boson => {
            if a > T::zero() {
                return Err(ModelError::InvalidSpec("bosons need mu <= 0".into()));
            }
            if a == T::zero() {
                if b != T::zero() {
                    return Err(ModelError::Unsupported("mu = 0 with d mu/dT != 0 diverges".into()));
                }
                return Ok(T::PI() * T::PI() / T::lit(6.0));
            }
            // Li2(e^{2a}) + 2a ln(1-e^{2a}) - (a-b)^2 (1+coth a) - 2ab - 2b ln(2 sinh(-a))
            let y = (two * a).exp();
            let one_minus = -(two * a).exp_m1();
            let one_plus_coth = -two * y / one_minus;
            // 2 sinh(-a) = e^{-a} (1 - e^{2a})
            let ln_2sinh = -a + one_minus.ln();
            Ok(polylog2(y)? + two * a * one_minus.ln()
                - (a - b) * (a - b) * one_plus_coth
                - two * a * b
                - two * b * ln_2sinh)
        }
    }
}
