//! Square-lattice Ising model `H = -J sum_<ij> s_i s_j` on an `Lx x Ly`
//! torus, by exhaustive enumeration, plus the Onsager heat capacity.

use serde::{Deserialize, Serialize};

use super::{check_temperature, gapped_low_t, ModelError};
use crate::numerics::elliptic_ke_with_complement;
use crate::thermal::{canonical_point, DiscreteSpectrum, ThermoPoint};
use crate::Real;

pub const MAX_SPINS: usize = 24;

fn default_periodic() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsingSpec<T> {
    #[serde(rename = "Lx")]
    pub lx: usize,
    #[serde(rename = "Ly")]
    pub ly: usize,
    #[serde(rename = "J")]
    pub j: T,
    #[serde(default = "default_periodic")]
    pub periodic: bool,
}

impl<T: Real> IsingSpec<T> {
    pub fn new(lx: usize, ly: usize, j: T) -> Result<Self, ModelError> {
        let s = Self { lx, ly, j, periodic: true };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !self.periodic {
            return Err(ModelError::Unsupported("only periodic boundaries are implemented".into()));
        }
        if self.lx < 2 || self.ly < 2 {
            return Err(ModelError::InvalidSpec("Lx and Ly must be at least 2".into()));
        }
        if self.lx * self.ly > MAX_SPINS {
            return Err(ModelError::SizeCap { spins: self.lx * self.ly, cap: MAX_SPINS });
        }
        if !(self.j != T::zero() && self.j.is_finite()) {
            return Err(ModelError::InvalidSpec("J must be finite and nonzero".into()));
        }
        Ok(())
    }

    pub fn spins(&self) -> usize {
        self.lx * self.ly
    }

    /// Right and down neighbour of every site; on a side of length 2 both
    /// bonds of a pair are kept.
    fn neighbours(&self) -> Vec<Vec<usize>> {
        let n = self.spins();
        let mut adj = vec![Vec::with_capacity(4); n];
        for y in 0..self.ly {
            for x in 0..self.lx {
                let i = x + self.lx * y;
                for jdx in [(x + 1) % self.lx + self.lx * y, x + self.lx * ((y + 1) % self.ly)] {
                    adj[i].push(jdx);
                    adj[jdx].push(i);
                }
            }
        }
        adj
    }

    /// Histogram of the bond sum `B = sum s_i s_j` over all `2^N`
    /// configurations, indexed by `B + 2N`. Gray-code order flips one spin
    /// per step, so each step costs a neighbour sum.
    pub fn bond_histogram(&self) -> Result<Vec<u64>, ModelError> {
        self.validate()?;
        let n = self.spins();
        let adj = self.neighbours();
        let offset = 2 * n as i64;
        let mut hist = vec![0u64; 4 * n + 1];
        let mut spins = vec![1i8; n];
        let mut bonds: i64 = 2 * n as i64;
        hist[(bonds + offset) as usize] += 1;
        for step in 1u64..(1u64 << n) {
            let k = step.trailing_zeros() as usize;
            let local: i64 = adj[k].iter().map(|&j| spins[j] as i64).sum();
            bonds -= 2 * spins[k] as i64 * local;
            spins[k] = -spins[k];
            hist[(bonds + offset) as usize] += 1;
        }
        Ok(hist)
    }

    /// Energy levels `-J B` with their multiplicities.
    pub fn spectrum(&self) -> Result<DiscreteSpectrum<T>, ModelError> {
        let hist = self.bond_histogram()?;
        let offset = 2 * self.spins() as i64;
        let levels = hist
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c > 0)
            .map(|(i, c)| (-self.j * T::lit((i as i64 - offset) as f64), c));
        Ok(DiscreteSpectrum::new(levels)?)
    }

    pub fn point(&self, t: T) -> Result<ThermoPoint<T>, ModelError> {
        check_temperature(t)?;
        Ok(canonical_point(&self.spectrum()?, t)?)
    }

    /// `(Delta, g_1/g_0)` from the enumerated spectrum.
    pub fn gap(&self) -> Result<(T, T), ModelError> {
        self.spectrum()?
            .lowest_gap()
            .ok_or_else(|| ModelError::Unsupported("single-level spectrum".into()))
    }

    pub fn qfi_low_t(&self, t: T) -> Result<T, ModelError> {
        let (delta, g) = self.gap()?;
        Ok(gapped_low_t(g, delta, t))
    }
}

/// `T_c = 2|J| / ln(1 + sqrt 2)`.
pub fn critical_temperature<T: Real>(j: T) -> T {
    T::lit(2.0) * j.abs() / (T::one() + T::SQRT_2()).ln()
}

/// Onsager heat capacity per spin. Returns `+inf` at `T_c`, where `K_1`
/// diverges.
pub fn heat_capacity_onsager<T: Real>(j: T, t: T) -> Result<T, ModelError> {
    check_temperature(t)?;
    let k = j.abs() / t;
    let two_k = T::lit(2.0) * k;
    let sh = two_k.sinh();
    let ch = two_k.cosh();
    let ch2 = ch * ch;
    let z = T::lit(2.0) * sh / ch2;
    // 1 - z^2 = (1 - sinh^2 2K)^2 / cosh^4 2K
    let zc = (T::one() - sh * sh).abs() / ch2;
    if zc == T::zero() {
        return Ok(T::infinity());
    }
    let (k1, e1) = elliptic_ke_with_complement(z.min(T::one()), zc)?;
    let th = two_k.tanh();
    let th2 = th * th;
    let pref = T::lit(4.0) / T::PI() * (k / th) * (k / th);
    Ok(pref * (k1 - e1 - (T::one() - th2) * (T::FRAC_PI_2() + (T::lit(2.0) * th2 - T::one()) * k1)))
}
