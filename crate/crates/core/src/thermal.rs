//! Canonical and grand-canonical ensembles.
//!
//! Canonical quantities come from a [`DiscreteSpectrum`]; grand-canonical ones
//! from a [`ModeSystem`] of independent fermionic or bosonic modes. The
//! temperature QFI of a thermal state is the variance of the conjugate
//! generator divided by `T^4`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{find_root, Interval, NumericsError, Tolerance};
use crate::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThermalError {
    #[error("temperature must be positive and finite, got {0}")]
    InvalidTemperature(f64),
    #[error("spectrum must contain at least one level")]
    EmptySpectrum,
    #[error("level {index} has zero degeneracy")]
    ZeroDegeneracy { index: usize },
    #[error("non-finite energy {0}")]
    NonFiniteEnergy(f64),
    #[error("bosonic chemical potential {mu} must lie below the lowest mode {ground}")]
    BosonMuAboveGround { mu: f64, ground: f64 },
    #[error("particle number {requested} not reachable (capacity {capacity})")]
    InvalidParticleNumber { requested: f64, capacity: f64 },
    #[error("could not bracket the chemical potential at T = {0}")]
    MuBracket(f64),
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Energy levels with integer degeneracies, sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteSpectrum<T> {
    levels: Vec<(T, u64)>,
}

impl<T: Real> DiscreteSpectrum<T> {
    /// Sorts the levels and merges energies that agree to `1e-12` relative,
    /// adding their degeneracies.
    pub fn new(levels: impl IntoIterator<Item = (T, u64)>) -> Result<Self, ThermalError> {
        let mut raw: Vec<(T, u64)> = levels.into_iter().collect();
        if raw.is_empty() {
            return Err(ThermalError::EmptySpectrum);
        }
        for (i, &(e, g)) in raw.iter().enumerate() {
            if !e.is_finite() {
                return Err(ThermalError::NonFiniteEnergy(e.as_f64()));
            }
            if g == 0 {
                return Err(ThermalError::ZeroDegeneracy { index: i });
            }
        }
        raw.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite energies"));
        let scale = raw
            .iter()
            .fold(T::zero(), |m, &(e, _)| m.max(e.abs()))
            .max(T::min_positive_value());
        let merge_tol = T::lit(1e-12) * scale;
        let mut levels: Vec<(T, u64)> = Vec::with_capacity(raw.len());
        for (e, g) in raw {
            match levels.last_mut() {
                Some(last) if (e - last.0).abs() <= merge_tol => last.1 += g,
                _ => levels.push((e, g)),
            }
        }
        Ok(Self { levels })
    }

    /// Non-degenerate levels from a plain list of eigenvalues.
    pub fn from_energies(energies: &[T]) -> Result<Self, ThermalError> {
        Self::new(energies.iter().map(|&e| (e, 1)))
    }

    pub fn levels(&self) -> &[(T, u64)] {
        &self.levels
    }

    pub fn ground(&self) -> (T, u64) {
        self.levels[0]
    }

    /// First gap and the degeneracy ratio `g1/g0`; `None` for a single level.
    pub fn lowest_gap(&self) -> Option<(T, T)> {
        let (e0, g0) = self.levels[0];
        self.levels.get(1).map(|&(e1, g1)| {
            (
                e1 - e0,
                T::from_u64(g1).unwrap_or_else(T::infinity) / T::from_u64(g0).unwrap_or_else(T::one),
            )
        })
    }

    pub fn dimension(&self) -> u64 {
        self.levels.iter().map(|l| l.1).sum()
    }
}

/// Thermal averages at one temperature (`k_B = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoPoint<T> {
    pub t: T,
    /// `ln Z`; `Z` itself overflows easily at low temperature.
    pub ln_z: T,
    pub mean_energy: T,
    /// Variance of the generator conjugate to `T`. For canonical states this
    /// is the energy variance.
    pub energy_variance: T,
    pub entropy: T,
    pub heat_capacity: T,
    pub qfi: T,
}

impl<T: Real> ThermoPoint<T> {
    pub fn partition_function(&self) -> T {
        self.ln_z.exp()
    }

    pub fn free_energy(&self) -> T {
        -self.t * self.ln_z
    }
}

fn check_temperature<T: Real>(t: T) -> Result<(), ThermalError> {
    if t > T::zero() && t.is_finite() {
        Ok(())
    } else {
        Err(ThermalError::InvalidTemperature(t.as_f64()))
    }
}

fn from_count<T: Real>(g: u64) -> T {
    T::from_u64(g).unwrap_or_else(T::infinity)
}

/// Canonical thermal state of a discrete spectrum.
pub fn canonical_point<T: Real>(
    spec: &DiscreteSpectrum<T>,
    t: T,
) -> Result<ThermoPoint<T>, ThermalError> {
    check_temperature(t)?;
    let e0 = spec.levels[0].0;
    // weights relative to the ground level never exceed the degeneracies
    let weights: Vec<T> = spec
        .levels
        .iter()
        .map(|&(e, g)| from_count::<T>(g) * (-(e - e0) / t).exp())
        .collect();
    let z_shift: T = weights.iter().copied().sum();
    if !(z_shift.is_finite() && z_shift > T::zero()) {
        return Err(ThermalError::NonFiniteEnergy(z_shift.as_f64()));
    }
    let mut excess = T::zero();
    for (w, &(e, _)) in weights.iter().zip(&spec.levels) {
        excess = excess + *w * (e - e0);
    }
    excess = excess / z_shift;
    let mut var = T::zero();
    for (w, &(e, _)) in weights.iter().zip(&spec.levels) {
        let d = e - e0 - excess;
        var = var + *w * d * d;
    }
    var = var / z_shift;
    let ln_zs = z_shift.ln();
    let t2 = t * t;
    Ok(ThermoPoint {
        t,
        ln_z: ln_zs - e0 / t,
        mean_energy: e0 + excess,
        energy_variance: var,
        entropy: excess / t + ln_zs,
        heat_capacity: var / t2,
        qfi: var / (t2 * t2),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Fermion,
    Boson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MuPolicy<T> {
    Fixed(T),
    FixedNumber(T),
}

/// Independent single-particle modes `(energy, multiplicity)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSystem<T> {
    modes: Vec<(T, u64)>,
    statistics: Statistics,
    mu_policy: MuPolicy<T>,
}

impl<T: Real> ModeSystem<T> {
    pub fn new(
        modes: impl IntoIterator<Item = (T, u64)>,
        statistics: Statistics,
        mu_policy: MuPolicy<T>,
    ) -> Result<Self, ThermalError> {
        let modes: Vec<(T, u64)> = modes.into_iter().filter(|m| m.1 > 0).collect();
        if modes.is_empty() {
            return Err(ThermalError::EmptySpectrum);
        }
        if let Some(bad) = modes.iter().find(|m| !m.0.is_finite()) {
            return Err(ThermalError::NonFiniteEnergy(bad.0.as_f64()));
        }
        let sys = Self {
            modes,
            statistics,
            mu_policy,
        };
        match mu_policy {
            MuPolicy::Fixed(mu) => {
                if !mu.is_finite() {
                    return Err(ThermalError::NonFiniteEnergy(mu.as_f64()));
                }
                if statistics == Statistics::Boson && !(mu < sys.lowest_mode()) {
                    return Err(ThermalError::BosonMuAboveGround {
                        mu: mu.as_f64(),
                        ground: sys.lowest_mode().as_f64(),
                    });
                }
            }
            MuPolicy::FixedNumber(n) => {
                let capacity = match statistics {
                    Statistics::Fermion => from_count::<T>(sys.modes.iter().map(|m| m.1).sum()),
                    Statistics::Boson => T::infinity(),
                };
                if !(n > T::zero() && n < capacity) {
                    return Err(ThermalError::InvalidParticleNumber {
                        requested: n.as_f64(),
                        capacity: capacity.as_f64(),
                    });
                }
            }
        }
        Ok(sys)
    }

    /// One mode per energy.
    pub fn from_energies(
        energies: &[T],
        statistics: Statistics,
        mu_policy: MuPolicy<T>,
    ) -> Result<Self, ThermalError> {
        Self::new(energies.iter().map(|&e| (e, 1)), statistics, mu_policy)
    }

    pub fn modes(&self) -> &[(T, u64)] {
        &self.modes
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn mu_policy(&self) -> MuPolicy<T> {
        self.mu_policy
    }

    pub fn lowest_mode(&self) -> T {
        self.modes
            .iter()
            .fold(T::infinity(), |m, &(e, _)| m.min(e))
    }

    /// Occupation of a single mode with reduced energy `x = (e - mu)/T`.
    pub fn occupation(&self, x: T) -> T {
        match self.statistics {
            Statistics::Fermion => {
                if x >= T::zero() {
                    let q = (-x).exp();
                    q / (T::one() + q)
                } else {
                    T::one() / (T::one() + x.exp())
                }
            }
            Statistics::Boson => T::one() / x.exp_m1(),
        }
    }

    /// `n (1 -+ n)`, i.e. `1/(4 cosh^2(x/2))` or `1/(4 sinh^2(x/2))`.
    pub fn occupation_variance(&self, x: T) -> T {
        match self.statistics {
            Statistics::Fermion => {
                let q = (-x.abs()).exp();
                let d = T::one() + q;
                q / (d * d)
            }
            Statistics::Boson => {
                let m = (-x).exp_m1();
                (-x).exp() / (m * m)
            }
        }
    }

    fn mode_entropy(&self, x: T) -> T {
        match self.statistics {
            Statistics::Fermion => {
                let ax = x.abs();
                (-ax).exp().ln_1p() + ax * self.occupation(ax)
            }
            Statistics::Boson => -(-x).exp().ln_1p_neg() + x * self.occupation(x),
        }
    }

    fn check_mu(&self, mu: T) -> Result<(), ThermalError> {
        if self.statistics == Statistics::Boson && !(mu < self.lowest_mode()) {
            return Err(ThermalError::BosonMuAboveGround {
                mu: mu.as_f64(),
                ground: self.lowest_mode().as_f64(),
            });
        }
        Ok(())
    }

    pub fn mean_number(&self, mu: T, t: T) -> T {
        self.modes
            .iter()
            .map(|&(e, g)| from_count::<T>(g) * self.occupation((e - mu) / t))
            .sum()
    }

    pub fn mean_energy(&self, mu: T, t: T) -> T {
        self.modes
            .iter()
            .map(|&(e, g)| from_count::<T>(g) * e * self.occupation((e - mu) / t))
            .sum()
    }

    /// Chemical potential at temperature `t` under the system's policy.
    pub fn chemical_potential(&self, t: T) -> Result<T, ThermalError> {
        check_temperature(t)?;
        match self.mu_policy {
            MuPolicy::Fixed(mu) => Ok(mu),
            MuPolicy::FixedNumber(n) => self.solve_mu(n, t),
        }
    }

    /// `(mu, d mu / dT)`; the derivative is a central difference with step
    /// `max(1e-4 T, 1e-9)` and vanishes for a fixed chemical potential.
    pub fn mu_and_derivative(&self, t: T) -> Result<(T, T), ThermalError> {
        check_temperature(t)?;
        match self.mu_policy {
            MuPolicy::Fixed(mu) => Ok((mu, T::zero())),
            MuPolicy::FixedNumber(n) => {
                let mu = self.solve_mu(n, t)?;
                let h = (T::lit(1e-4) * t).max(T::lit(1e-9));
                let up = self.solve_mu(n, t + h)?;
                let down = self.solve_mu(n, t - h)?;
                Ok((mu, (up - down) / (T::lit(2.0) * h)))
            }
        }
    }

    /// Solves `<N>(mu, t) = n` over this mode grid.
    pub fn solve_mu(&self, n: T, t: T) -> Result<T, ThermalError> {
        check_temperature(t)?;
        let tol = Tolerance::new(T::lit(1e-15), T::zero(), 400)?;
        match self.statistics {
            Statistics::Fermion => {
                let lo_e = self.lowest_mode();
                let hi_e = self
                    .modes
                    .iter()
                    .fold(T::neg_infinity(), |m, &(e, _)| m.max(e));
                let f = |mu: T| self.mean_number(mu, t) - n;
                let mut lo = lo_e - T::lit(40.0) * t;
                let mut hi = hi_e + T::lit(40.0) * t;
                let mut step = T::lit(40.0) * t;
                for _ in 0..60 {
                    if f(lo) < T::zero() {
                        break;
                    }
                    step = step * T::lit(2.0);
                    lo = lo - step;
                }
                step = T::lit(40.0) * t;
                for _ in 0..60 {
                    if f(hi) > T::zero() {
                        break;
                    }
                    step = step * T::lit(2.0);
                    hi = hi + step;
                }
                if !(f(lo) < T::zero() && f(hi) > T::zero()) {
                    return Err(ThermalError::MuBracket(t.as_f64()));
                }
                Ok(find_root(f, Interval::new(lo, hi)?, tol)?)
            }
            Statistics::Boson => {
                // unknown s = ln(e0 - mu); N decreases with s
                let e0 = self.lowest_mode();
                let f = |s: T| self.mean_number(e0 - s.exp(), t) - n;
                // ground occupation alone exceeds n below T ln(1 + 1/n)
                let s_lo = (T::lit(0.5) * t * (T::one() / n).ln_1p()).ln();
                let mut s_hi = (t + e0.abs()).ln();
                for _ in 0..200 {
                    if f(s_hi) < T::zero() {
                        break;
                    }
                    s_hi = s_hi + T::lit(2.0);
                }
                if !(f(s_lo) > T::zero() && f(s_hi) < T::zero()) {
                    return Err(ThermalError::MuBracket(t.as_f64()));
                }
                let s = find_root(f, Interval::new(s_lo, s_hi)?, tol)?;
                Ok(e0 - s.exp())
            }
        }
    }

    /// Mode-sum QFI at a given `(mu, dmu/dT)`:
    /// `sum_k g_k w_k (e_k - mu + T mu')^2 / T^4`.
    pub fn qfi_at(&self, t: T, mu: T, dmu_dt: T) -> Result<T, ThermalError> {
        check_temperature(t)?;
        self.check_mu(mu)?;
        let t4 = t.powi(4);
        let s: T = self
            .modes
            .iter()
            .map(|&(e, g)| {
                let a = e - mu + t * dmu_dt;
                let w = self.occupation_variance((e - mu) / t);
                if w == T::zero() {
                    T::zero()
                } else {
                    from_count::<T>(g) * w * a * a
                }
            })
            .sum();
        Ok(s / t4)
    }

    /// `d<N>/dT` at fixed `mu`.
    pub fn dn_dt(&self, t: T, mu: T) -> T {
        self.modes
            .iter()
            .map(|&(e, g)| from_count::<T>(g) * self.occupation_variance((e - mu) / t) * (e - mu))
            .sum::<T>()
            / (t * t)
    }

    /// Smallest excitation `|e - mu|` above the Fermi sea (or above the
    /// condensate, for bosons) and its multiplicity. Modes exactly at `mu`
    /// carry no information and are skipped.
    pub fn lowest_excitation(&self, mu: T) -> Option<(T, u64)> {
        let gaps: Vec<(T, u64)> = self
            .modes
            .iter()
            .map(|&(e, g)| ((e - mu).abs(), g))
            .filter(|&(d, _)| d > T::lit(1e-12) * (T::one() + mu.abs()))
            .collect();
        let min = gaps.iter().fold(T::infinity(), |m, &(d, _)| m.min(d));
        if !min.is_finite() {
            return None;
        }
        let tie = T::lit(1e-9) * min;
        let g = gaps
            .iter()
            .filter(|&&(d, _)| (d - min).abs() <= tie)
            .map(|&(_, g)| g)
            .sum();
        Some((min, g))
    }
}

/// Grand-canonical QFI including the `T d mu/dT` term.
pub fn grand_canonical_qfi<T: Real>(ms: &ModeSystem<T>, t: T) -> Result<T, ThermalError> {
    let (mu, dmu) = ms.mu_and_derivative(t)?;
    ms.qfi_at(t, mu, dmu)
}

/// Full thermal summary of a mode system. `energy_variance` is `T^4` times
/// the QFI and `heat_capacity` is `T^2` times the QFI.
pub fn grand_canonical_point<T: Real>(
    ms: &ModeSystem<T>,
    t: T,
) -> Result<ThermoPoint<T>, ThermalError> {
    let (mu, dmu) = ms.mu_and_derivative(t)?;
    let qfi = ms.qfi_at(t, mu, dmu)?;
    let mut ln_z = T::zero();
    let mut entropy = T::zero();
    for &(e, g) in &ms.modes {
        let x = (e - mu) / t;
        let gg = from_count::<T>(g);
        ln_z = ln_z
            + gg * match ms.statistics {
                Statistics::Fermion => {
                    if x > T::zero() {
                        (-x).exp().ln_1p()
                    } else {
                        -x + x.exp().ln_1p()
                    }
                }
                Statistics::Boson => -(-x).exp().ln_1p_neg(),
            };
        entropy = entropy + gg * ms.mode_entropy(x);
    }
    let t2 = t * t;
    Ok(ThermoPoint {
        t,
        ln_z,
        mean_energy: ms.mean_energy(mu, t),
        energy_variance: qfi * t2 * t2,
        entropy,
        heat_capacity: qfi * t2,
        qfi,
    })
}

trait LnOneMinus {
    fn ln_1p_neg(self) -> Self;
}

impl<T: Real> LnOneMinus for T {
    /// `ln(1 - self)`.
    fn ln_1p_neg(self) -> T {
        (-self).ln_1p()
    }
}

/// QFI matrix for joint estimation of `T` and `mu` at fixed `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QfiMatrix<T> {
    pub f_tt: T,
    pub f_tmu: T,
    pub f_mumu: T,
}

impl<T: Real> QfiMatrix<T> {
    pub fn determinant(&self) -> T {
        self.f_tt * self.f_mumu - self.f_tmu * self.f_tmu
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> (T, T) {
        let half_tr = (self.f_tt + self.f_mumu) / T::lit(2.0);
        let half_diff = (self.f_tt - self.f_mumu) / T::lit(2.0);
        let r = half_diff.hypot(self.f_tmu);
        (half_tr - r, half_tr + r)
    }

    /// Inverse as `[[a, b], [b, c]]`; `None` when singular.
    pub fn inverse(&self) -> Option<[[T; 2]; 2]> {
        let det = self.determinant();
        if det <= T::zero() {
            return None;
        }
        Some([
            [self.f_mumu / det, -self.f_tmu / det],
            [-self.f_tmu / det, self.f_tt / det],
        ])
    }
}

/// QFI matrix of the grand-canonical state treating `(T, mu)` as
/// independent parameters.
pub fn qfi_matrix<T: Real>(ms: &ModeSystem<T>, t: T, mu: T) -> Result<QfiMatrix<T>, ThermalError> {
    check_temperature(t)?;
    ms.check_mu(mu)?;
    let (mut saa, mut sa, mut s0) = (T::zero(), T::zero(), T::zero());
    for &(e, g) in &ms.modes {
        let a = e - mu;
        let w = from_count::<T>(g) * ms.occupation_variance(a / t);
        if w == T::zero() {
            continue;
        }
        saa = saa + w * a * a;
        sa = sa + w * a;
        s0 = s0 + w;
    }
    let t2 = t * t;
    Ok(QfiMatrix {
        f_tt: saa / (t2 * t2),
        f_tmu: sa / (t2 * t),
        f_mumu: s0 / t2,
    })
}

/// Extrapolated `T -> 0` limit of `T^2 F` from the three coldest points.
///
/// A linear fit of `T^2 F` against `T` is taken over the coldest three
/// points and continued to `T = 0`; the result is clamped at zero. Any
/// clearly positive return value flags a violation of the third law.
pub fn third_law_check<T: Real>(points: &[ThermoPoint<T>]) -> Result<T, ThermalError> {
    if points.len() < 3 {
        return Err(ThermalError::TooFewPoints {
            needed: 3,
            got: points.len(),
        });
    }
    let mut sorted: Vec<(T, T)> = points.iter().map(|p| (p.t, p.t * p.t * p.qfi)).collect();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let cold = &sorted[..3];
    let n = T::lit(3.0);
    let mx = cold.iter().map(|p| p.0).sum::<T>() / n;
    let my = cold.iter().map(|p| p.1).sum::<T>() / n;
    let sxx: T = cold.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: T = cold.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > T::zero() { sxy / sxx } else { T::zero() };
    let (t_last, y_last) = cold[0];
    Ok((y_last - slope * t_last).max(T::zero()))
}
