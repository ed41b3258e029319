//! Low-temperature behaviour of outcome spectra: Taylor-expanded gaps,
//! the probabilities they imply, leading-order Fisher predictors and an
//! empirical exponential-versus-polynomial classifier.
//!
//! Gaps follow `Delta_m(T) = Delta_{m,0} + sum_{l>=1} Delta_{m,l} T^l`
//! (`k_B = 1`), always measured from outcome 0.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{lstsq, NumericsError};
use crate::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScalingError {
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("input lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("value at index {index} must be positive and finite, got {value}")]
    NonPositive { index: usize, value: f64 },
    #[error("invalid gap expansion: {0}")]
    InvalidExpansion(String),
    #[error("no outcome lies above the ground manifold")]
    NoExcitedOutcome,
    #[error("Taylor order must be at least 1")]
    InvalidOrder,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapOutcome<T> {
    /// `Delta_{m,0}, Delta_{m,1}, ...`
    pub coeffs: Vec<T>,
    pub weight: T,
}

impl<T: Real> GapOutcome<T> {
    pub fn coeff(&self, l: usize) -> T {
        self.coeffs.get(l).copied().unwrap_or_else(T::zero)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapExpansion<T> {
    outcomes: Vec<GapOutcome<T>>,
}

impl<T: Real> GapExpansion<T> {
    /// Outcome 0 must have all coefficients zero, every `Delta_{m,0} >= 0`
    /// and every weight positive.
    pub fn new(outcomes: Vec<GapOutcome<T>>) -> Result<Self, ScalingError> {
        let ground = outcomes
            .first()
            .ok_or_else(|| ScalingError::InvalidExpansion("no outcomes".into()))?;
        if ground.coeffs.iter().any(|&c| c != T::zero()) {
            return Err(ScalingError::InvalidExpansion(
                "outcome 0 is the reference and must have zero coefficients".into(),
            ));
        }
        for (m, o) in outcomes.iter().enumerate() {
            if !(o.weight > T::zero() && o.weight.is_finite()) {
                return Err(ScalingError::InvalidExpansion(format!(
                    "outcome {m} has non-positive weight"
                )));
            }
            if o.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(ScalingError::InvalidExpansion(format!(
                    "outcome {m} has a non-finite coefficient"
                )));
            }
            if o.coeff(0) < T::zero() {
                return Err(ScalingError::InvalidExpansion(format!(
                    "outcome {m} lies below the reference (Delta_0 = {})",
                    o.coeff(0)
                )));
            }
        }
        Ok(Self { outcomes })
    }

    /// Convenience constructor from `(coefficients, weight)` pairs.
    pub fn from_pairs(pairs: Vec<(Vec<T>, T)>) -> Result<Self, ScalingError> {
        Self::new(
            pairs
                .into_iter()
                .map(|(coeffs, weight)| GapOutcome { coeffs, weight })
                .collect(),
        )
    }

    pub fn outcomes(&self) -> &[GapOutcome<T>] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn set_weights(&mut self, weights: &[T]) -> Result<(), ScalingError> {
        if weights.len() != self.outcomes.len() {
            return Err(ScalingError::LengthMismatch(weights.len(), self.outcomes.len()));
        }
        for (o, &w) in self.outcomes.iter_mut().zip(weights) {
            if !(w > T::zero() && w.is_finite()) {
                return Err(ScalingError::InvalidExpansion("non-positive weight".into()));
            }
            o.weight = w;
        }
        Ok(())
    }

    /// `ln[g_m T^{Delta_{m,1}} e^{-Delta_{m,0}/T} e^{sum_l Delta_{m,l+1} T^l / l}]`
    fn log_weight(&self, m: usize, t: T) -> T {
        let o = &self.outcomes[m];
        let mut s = o.weight.ln() - o.coeff(0) / t + o.coeff(1) * t.ln();
        for l in 1..o.coeffs.len().saturating_sub(1) {
            s = s + o.coeffs[l + 1] * t.powi(l as i32) / T::from_usize_lossy(l);
        }
        s
    }

    /// Groups of outcome indices sharing `Delta_{m,0}` (relative tolerance
    /// `1e-9`), ordered by increasing gap.
    fn zero_order_groups(&self) -> Vec<(T, Vec<usize>)> {
        let mut idx: Vec<usize> = (0..self.outcomes.len()).collect();
        idx.sort_by(|&a, &b| {
            self.outcomes[a]
                .coeff(0)
                .partial_cmp(&self.outcomes[b].coeff(0))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let scale = self
            .outcomes
            .iter()
            .fold(T::zero(), |m, o| m.max(o.coeff(0)));
        let tie = T::lit(1e-9) * scale;
        let mut groups: Vec<(T, Vec<usize>)> = Vec::new();
        for m in idx {
            let d = self.outcomes[m].coeff(0);
            match groups.last_mut() {
                Some((first, members)) if d - *first <= tie => members.push(m),
                _ => groups.push((d, vec![m])),
            }
        }
        groups
    }
}

/// Normalized outcome probabilities implied by a (truncated) expansion.
pub fn formal_probabilities<T: Real>(ge: &GapExpansion<T>, t: T) -> Vec<T> {
    let logs: Vec<T> = (0..ge.len()).map(|m| ge.log_weight(m, t)).collect();
    let top = logs.iter().fold(T::neg_infinity(), |a, &b| a.max(b));
    let w: Vec<T> = logs.iter().map(|&l| (l - top).exp()).collect();
    let z: T = w.iter().copied().sum();
    w.into_iter().map(|x| x / z).collect()
}

/// Leading exponential law
/// `(g_1/g_0) Delta_{1,0}^2 T^{Delta_{1,1} - 4} e^{-Delta_{1,0}/T}`.
///
/// `g_0` is the total weight of the outcomes with `Delta_{m,0} = 0`; the
/// first excited group is summed term by term so that its members may
/// carry different `Delta_{m,1}`.
pub fn predict_exponential<T: Real>(ge: &GapExpansion<T>, t: T) -> Result<T, ScalingError> {
    let groups = ge.zero_order_groups();
    if groups.len() < 2 || groups[1].0 <= T::zero() {
        return Err(ScalingError::NoExcitedOutcome);
    }
    let g0: T = groups[0].1.iter().map(|&m| ge.outcomes[m].weight).sum();
    let d10 = groups[1].0;
    let excited: T = groups[1]
        .1
        .iter()
        .map(|&m| ge.outcomes[m].weight * t.powf(ge.outcomes[m].coeff(1)))
        .sum();
    Ok(excited / g0 * d10 * d10 / t.powi(4) * (-d10 / t).exp())
}

/// Polynomial law for a ground manifold split at Taylor order `l`.
///
/// Only outcomes with `Delta_{m,0} = 0` enter. For `l > 1` this is
/// `T^{2(l-2)}` times the `g`-weighted variance of `Delta_{m,l}`; for
/// `l = 1` it is `(g_1/g_0) Delta_{1,1}^2 T^{Delta_{1,1} - 2}` with `g_0` the
/// weight that stays unsplit at first order. Returns 0 when nothing splits.
pub fn predict_polynomial<T: Real>(ge: &GapExpansion<T>, l: usize, t: T) -> Result<T, ScalingError> {
    if l == 0 {
        return Err(ScalingError::InvalidOrder);
    }
    let groups = ge.zero_order_groups();
    let manifold: Vec<&GapOutcome<T>> = groups[0].1.iter().map(|&m| &ge.outcomes[m]).collect();
    if l > 1 {
        let total: T = manifold.iter().map(|o| o.weight).sum();
        let mean: T = manifold.iter().map(|o| o.weight * o.coeff(l)).sum::<T>() / total;
        let var: T = manifold
            .iter()
            .map(|o| {
                let d = o.coeff(l) - mean;
                o.weight * d * d
            })
            .sum::<T>()
            / total;
        return Ok(t.powi(2 * (l as i32 - 2)) * var);
    }
    let g0: T = manifold
        .iter()
        .filter(|o| o.coeff(1) == T::zero())
        .map(|o| o.weight)
        .sum();
    let d11 = manifold
        .iter()
        .map(|o| o.coeff(1))
        .filter(|&c| c > T::zero())
        .fold(T::infinity(), |a, b| a.min(b));
    if !d11.is_finite() || g0 == T::zero() {
        return Ok(T::zero());
    }
    let tie = T::lit(1e-9) * d11;
    let g1: T = manifold
        .iter()
        .filter(|o| (o.coeff(1) - d11).abs() <= tie)
        .map(|o| o.weight)
        .sum();
    Ok(g1 / g0 * d11 * d11 * t.powf(d11 - T::lit(2.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalingKind<T> {
    /// `F ~ T^{power_correction - 4} e^{-delta/T}`.
    Exponential { delta: T, power_correction: T },
    /// `F ~ T^power`.
    Polynomial { power: T },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingVerdict<T> {
    #[serde(flatten)]
    pub kind: ScalingKind<T>,
    /// R^2 of the selected model.
    pub fit_quality: T,
    pub r2_exponential: T,
    pub r2_polynomial: T,
    /// `ln F` prefactor of the selected model.
    pub log_prefactor: T,
    /// False when the window could not be checked against the gap proxy.
    pub window_certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Window policy: the fit is certified when `10 max(T) <= gap_proxy`, or
/// when the caller overrides the check.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WindowPolicy<T> {
    pub gap_proxy: Option<T>,
    pub override_check: bool,
}

const MIN_CLASSIFY_POINTS: usize = 8;
const EXPONENTIAL_MARGIN: f64 = 1e-3;

struct Fit {
    coeffs: Vec<f64>,
    r2: f64,
}

/// Least squares on standardized columns (intercept first), mapped back.
fn fit_columns(columns: &[Vec<f64>], y: &[f64]) -> Result<Fit, NumericsError> {
    let n = y.len();
    let stats: Vec<(f64, f64)> = columns
        .iter()
        .map(|c| {
            let mean = c.iter().sum::<f64>() / n as f64;
            let sd = (c.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64).sqrt();
            (mean, if sd > 0.0 { sd } else { 1.0 })
        })
        .collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            std::iter::once(1.0)
                .chain(columns.iter().zip(&stats).map(|(c, (m, s))| (c[i] - m) / s))
                .collect()
        })
        .collect();
    let sol = lstsq(&rows, y)?;
    let mut coeffs = vec![sol.coeffs[0]];
    for (k, (m, s)) in stats.iter().enumerate() {
        let b = sol.coeffs[k + 1] / s;
        coeffs[0] -= b * m;
        coeffs.push(b);
    }
    let mean_y = y.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean_y) * (v - mean_y)).sum();
    let scale = y.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    let r2 = if ss_tot <= (1e-14 * scale).powi(2) * n as f64 {
        // constant data: any model with an intercept is exact
        if sol.residual_ss <= (1e-10 * scale).powi(2) * n as f64 {
            1.0
        } else {
            0.0
        }
    } else {
        (1.0 - sol.residual_ss / ss_tot).clamp(0.0, 1.0)
    };
    Ok(Fit { coeffs, r2 })
}

/// Fits `ln F = a + k ln T - Delta/T` and `ln F = a + k ln T` and keeps the
/// exponential model only if `Delta > 0` and it improves R^2 by more than
/// `1e-3`.
pub fn classify<T: Real>(
    t_grid: &[T],
    f_grid: &[T],
    policy: WindowPolicy<T>,
) -> Result<ScalingVerdict<T>, ScalingError> {
    if t_grid.len() != f_grid.len() {
        return Err(ScalingError::LengthMismatch(t_grid.len(), f_grid.len()));
    }
    if t_grid.len() < MIN_CLASSIFY_POINTS {
        return Err(ScalingError::TooFewPoints {
            needed: MIN_CLASSIFY_POINTS,
            got: t_grid.len(),
        });
    }
    for (index, (&t, &f)) in t_grid.iter().zip(f_grid).enumerate() {
        if !(t > T::zero() && t.is_finite()) {
            return Err(ScalingError::NonPositive { index, value: t.as_f64() });
        }
        if !(f > T::zero() && f.is_finite()) {
            return Err(ScalingError::NonPositive { index, value: f.as_f64() });
        }
    }
    let ln_t: Vec<f64> = t_grid.iter().map(|t| t.as_f64().ln()).collect();
    let inv_t: Vec<f64> = t_grid.iter().map(|t| 1.0 / t.as_f64()).collect();
    let ln_f: Vec<f64> = f_grid.iter().map(|f| f.as_f64().ln()).collect();

    let poly = fit_columns(std::slice::from_ref(&ln_t), &ln_f)?;
    let expo = fit_columns(&[ln_t, inv_t], &ln_f)?;
    let delta = -expo.coeffs[2];
    let prefer_exp = delta > 0.0 && expo.r2 - poly.r2 > EXPONENTIAL_MARGIN;

    let t_max = t_grid.iter().fold(T::zero(), |a, &b| a.max(b));
    let (window_certified, warning) = match (policy.override_check, policy.gap_proxy) {
        (true, _) => (true, None),
        (false, Some(gap)) if t_max * T::lit(10.0) <= gap => (true, None),
        (false, Some(gap)) => (
            false,
            Some(format!(
                "window reaches T = {t_max}, above a tenth of the gap proxy {gap}; asymptotic laws may not apply"
            )),
        ),
        (false, None) => (
            false,
            Some("no gap proxy given; the window was not checked against the asymptotic regime".into()),
        ),
    };

    let (kind, fit_quality, log_prefactor) = if prefer_exp {
        (
            ScalingKind::Exponential {
                delta: T::lit(delta),
                power_correction: T::lit(expo.coeffs[1] + 4.0),
            },
            expo.r2,
            expo.coeffs[0],
        )
    } else {
        (
            ScalingKind::Polynomial {
                power: T::lit(poly.coeffs[1]),
            },
            poly.r2,
            poly.coeffs[0],
        )
    };
    Ok(ScalingVerdict {
        kind,
        fit_quality: T::lit(fit_quality),
        r2_exponential: T::lit(expo.r2),
        r2_polynomial: T::lit(poly.r2),
        log_prefactor: T::lit(log_prefactor),
        window_certified,
        warning,
    })
}

pub const DEFAULT_FIT_ORDER: usize = 5;

/// Result of fitting Taylor polynomials to outcome-energy traces.
#[derive(Debug, Clone, PartialEq)]
pub struct GapFit<T> {
    /// Expansion with the reference outcome first; weights are 1 until
    /// calibrated.
    pub expansion: GapExpansion<T>,
    /// `outcome_index[k]` is the original outcome behind expansion entry `k`.
    pub outcome_index: Vec<usize>,
    /// Taylor coefficients of each absolute energy trace, original order.
    pub energy_coeffs: Vec<Vec<T>>,
    /// Standard errors of the gap coefficients, expansion order.
    pub coeff_std_errors: Vec<Vec<T>>,
    /// RMS residual of each gap fit, expansion order.
    pub residual_rms: Vec<T>,
}

fn poly_fit<T: Real>(t_grid: &[T], y: &[T], order: usize) -> Result<(Vec<T>, Vec<T>, T), ScalingError> {
    // scaled abscissa keeps the Vandermonde matrix tame
    let t_max = t_grid.iter().fold(0.0f64, |a, t| a.max(t.as_f64().abs()));
    let rows: Vec<Vec<f64>> = t_grid
        .iter()
        .map(|t| {
            let x = t.as_f64() / t_max;
            (0..=order).map(|l| x.powi(l as i32)).collect()
        })
        .collect();
    let yy: Vec<f64> = y.iter().map(|v| v.as_f64()).collect();
    let sol = lstsq(&rows, &yy)?;
    let coeffs = sol
        .coeffs
        .iter()
        .enumerate()
        .map(|(l, c)| T::lit(c / t_max.powi(l as i32)))
        .collect();
    let errs = sol
        .std_errors
        .iter()
        .enumerate()
        .map(|(l, e)| T::lit(e / t_max.powi(l as i32)))
        .collect();
    let rms = T::lit((sol.residual_ss / y.len() as f64).sqrt());
    Ok((coeffs, errs, rms))
}

/// Least-squares Taylor fit of order `order` to every gap trace
/// `E_m(T) - E_ref(T)`. The reference is the outcome with the lowest energy
/// at the coldest grid point. Fails if the Vandermonde system has a
/// condition number above `1e12`.
pub fn fit_gap_expansion<T: Real>(
    t_grid: &[T],
    e_traces: &[Vec<T>],
    order: usize,
) -> Result<GapFit<T>, ScalingError> {
    let n = t_grid.len();
    if n < order + 2 {
        return Err(ScalingError::TooFewPoints { needed: order + 2, got: n });
    }
    if e_traces.is_empty() {
        return Err(ScalingError::InvalidExpansion("no energy traces".into()));
    }
    for tr in e_traces {
        if tr.len() != n {
            return Err(ScalingError::LengthMismatch(tr.len(), n));
        }
    }
    let coldest = (0..n)
        .min_by(|&a, &b| t_grid[a].partial_cmp(&t_grid[b]).unwrap_or(std::cmp::Ordering::Equal))
        .expect("nonempty grid");
    let reference = (0..e_traces.len())
        .min_by(|&a, &b| {
            e_traces[a][coldest]
                .partial_cmp(&e_traces[b][coldest])
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .expect("nonempty traces");
    let mut outcome_index = vec![reference];
    outcome_index.extend((0..e_traces.len()).filter(|&m| m != reference));

    let mut energy_coeffs = Vec::with_capacity(e_traces.len());
    for tr in e_traces {
        energy_coeffs.push(poly_fit(t_grid, tr, order)?.0);
    }
    let mut outcomes = Vec::with_capacity(e_traces.len());
    let mut coeff_std_errors = Vec::with_capacity(e_traces.len());
    let mut residual_rms = Vec::with_capacity(e_traces.len());
    for &m in &outcome_index {
        if m == reference {
            outcomes.push(GapOutcome {
                coeffs: vec![T::zero(); order + 1],
                weight: T::one(),
            });
            coeff_std_errors.push(vec![T::zero(); order + 1]);
            residual_rms.push(T::zero());
            continue;
        }
        let gaps: Vec<T> = (0..n).map(|i| e_traces[m][i] - e_traces[reference][i]).collect();
        let (mut coeffs, errs, rms) = poly_fit(t_grid, &gaps, order)?;
        // a constant offset that fits to a hair below zero is a degeneracy
        if coeffs[0] < T::zero() {
            coeffs[0] = T::zero();
        }
        outcomes.push(GapOutcome { coeffs, weight: T::one() });
        coeff_std_errors.push(errs);
        residual_rms.push(rms);
    }
    Ok(GapFit {
        expansion: GapExpansion::new(outcomes)?,
        outcome_index,
        energy_coeffs,
        coeff_std_errors,
        residual_rms,
    })
}

impl<T: Real> GapFit<T> {
    /// Sets the weights `g_m` from observed probability traces (original
    /// outcome order): each `g_m` is the geometric mean over the grid of
    /// `p_m(T) / p_ref(T)` divided by the unweighted expansion factors.
    pub fn calibrate_weights(&mut self, t_grid: &[T], prob_traces: &[Vec<T>]) -> Result<(), ScalingError> {
        if prob_traces.len() != self.outcome_index.len() {
            return Err(ScalingError::LengthMismatch(prob_traces.len(), self.outcome_index.len()));
        }
        let reference = self.outcome_index[0];
        let mut unit = self.expansion.clone();
        unit.set_weights(&vec![T::one(); unit.len()])?;
        let mut weights = Vec::with_capacity(unit.len());
        for (k, &m) in self.outcome_index.iter().enumerate() {
            let mut acc = T::zero();
            for (i, &t) in t_grid.iter().enumerate() {
                let p = prob_traces[m][i];
                let p_ref = prob_traces[reference][i];
                if !(p > T::zero() && p_ref > T::zero()) {
                    return Err(ScalingError::NonPositive { index: i, value: p.as_f64() });
                }
                acc = acc + (p / p_ref).ln() - (unit.log_weight(k, t) - unit.log_weight(0, t));
            }
            weights.push((acc / T::from_usize_lossy(t_grid.len())).exp());
        }
        self.expansion.set_weights(&weights)
    }
}
