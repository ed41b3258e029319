//! Monte Carlo check of the Cramér-Rao bound `dT^2 >= 1/(nu F)`.
//!
//! Each trial draws `nu` outcomes from `p(T_true)`, then maximizes the
//! likelihood over `T`. Trial `k` uses ChaCha20 seeded with `seed` on stream
//! `k`, so reports do not depend on thread count or scheduling.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models::{Coupling, ModelError, ModelSpec, TwoSiteSpec};
use crate::numerics::Interval;
use crate::povm::{fisher_information, OutcomeSpectrum};
use crate::thermal::DiscreteSpectrum;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimatorError {
    #[error("need nu >= 1")]
    NoRounds,
    #[error("need at least {min} trials, got {got}")]
    TooFewTrials { min: usize, got: usize },
    #[error("all counts are zero")]
    EmptyCounts,
    #[error("flat likelihood over the search range")]
    FlatLikelihood,
    #[error("zero Fisher information")]
    ZeroFisher,
    #[error("probabilities do not sum to one at T = {t}: {sum}")]
    Unnormalized { t: f64, sum: f64 },
    #[error("invalid search range: {0}")]
    InvalidRange(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub const MIN_TRIALS: usize = 30;
const NORMALIZATION_TOL: f64 = 1e-10;
const GRID_POINTS: usize = 64;
const GOLDEN_REL_TOL: f64 = 1e-8;
/// The search range is `[T_true / 10, 10 T_true]`.
const RANGE_FACTOR: f64 = 10.0;

type ProbFn = dyn Fn(f64) -> Result<Vec<f64>, ModelError> + Send + Sync;
type FisherFn = dyn Fn(f64) -> Result<f64, ModelError> + Send + Sync;

/// A finite-outcome measurement whose statistics depend on temperature.
#[derive(Clone)]
pub struct OutcomeModel {
    probs: Arc<ProbFn>,
    fisher: Arc<FisherFn>,
    pub t_true: f64,
    pub range: Interval<f64>,
    outcomes: usize,
}

impl std::fmt::Debug for OutcomeModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OutcomeModel")
            .field("t_true", &self.t_true)
            .field("range", &self.range)
            .field("outcomes", &self.outcomes)
            .finish()
    }
}

impl OutcomeModel {
    /// Wraps a probability function; the Fisher information comes from
    /// `fisher`. The search range defaults to `[T/10, 10 T]`.
    pub fn new<P, F>(t_true: f64, probs: P, fisher: F) -> Result<Self, EstimatorError>
    where
        P: Fn(f64) -> Result<Vec<f64>, ModelError> + Send + Sync + 'static,
        F: Fn(f64) -> Result<f64, ModelError> + Send + Sync + 'static,
    {
        if !(t_true > 0.0 && t_true.is_finite()) {
            return Err(ModelError::InvalidTemperature(t_true).into());
        }
        let range = Interval::new(t_true / RANGE_FACTOR, t_true * RANGE_FACTOR)
            .map_err(|e| EstimatorError::InvalidRange(e.to_string()))?;
        let p = probs(t_true)?;
        if p.len() < 2 {
            return Err(ModelError::InvalidSpec("need at least two outcomes".into()).into());
        }
        let om = Self {
            outcomes: p.len(),
            probs: Arc::new(probs),
            fisher: Arc::new(fisher),
            t_true,
            range,
        };
        for t in [range.lo, t_true, range.hi] {
            om.checked_probabilities(t)?;
        }
        Ok(om)
    }

    /// Probabilities and Fisher information from an outcome spectrum.
    pub fn from_outcome_data<S>(t_true: f64, spectrum: S) -> Result<Self, EstimatorError>
    where
        S: Fn(f64) -> Result<OutcomeSpectrum<f64>, ModelError> + Send + Sync + Clone + 'static,
    {
        let s2 = spectrum.clone();
        Self::new(
            t_true,
            move |t| Ok(spectrum(t)?.probs),
            move |t| Ok(fisher_information(&s2(t)?)),
        )
    }

    /// Projective energy measurement on a Gibbs state.
    pub fn from_spectrum(t_true: f64, spectrum: DiscreteSpectrum<f64>) -> Result<Self, EstimatorError> {
        let spectrum = Arc::new(spectrum);
        Self::from_outcome_data(t_true, move |t| gibbs_outcomes(&spectrum, t))
    }

    /// Two levels `0` and `delta`, measured in the energy basis.
    pub fn two_level(t_true: f64, delta: f64) -> Result<Self, EstimatorError> {
        let spectrum = DiscreteSpectrum::new([(0.0, 1), (delta, 1)]).map_err(ModelError::from)?;
        Self::from_spectrum(t_true, spectrum)
    }

    /// Mode-occupation measurement on the two-site reduced state.
    pub fn two_site(t_true: f64, spec: TwoSiteSpec<f64>) -> Result<Self, EstimatorError> {
        Self::from_outcome_data(t_true, move |t| spec.outcome_data(t))
    }

    /// Models with a small outcome space: two sites and the Ising lattice.
    pub fn from_model(t_true: f64, model: &ModelSpec<f64>) -> Result<Self, EstimatorError> {
        model.validate()?;
        match model {
            ModelSpec::TwoSite(s) => Self::two_site(t_true, s.clone()),
            ModelSpec::Ising(s) => Self::from_spectrum(t_true, s.spectrum()?),
            other => Err(ModelError::Unsupported(format!(
                "simulation needs a finite outcome set; {} has a mode continuum",
                other.name()
            ))
            .into()),
        }
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn probabilities(&self, t: f64) -> Result<Vec<f64>, EstimatorError> {
        Ok((self.probs)(t)?)
    }

    fn checked_probabilities(&self, t: f64) -> Result<Vec<f64>, EstimatorError> {
        let p = self.probabilities(t)?;
        let sum: f64 = p.iter().sum();
        if p.len() != self.outcomes || (sum - 1.0).abs() > NORMALIZATION_TOL || p.iter().any(|&x| !(x >= 0.0)) {
            return Err(EstimatorError::Unnormalized { t, sum });
        }
        Ok(p)
    }

    pub fn fisher(&self, t: f64) -> Result<f64, EstimatorError> {
        Ok((self.fisher)(t)?)
    }

    /// Rounds needed for a relative error `rel` at the bound:
    /// `1 / (F (rel T)^2)`.
    pub fn required_rounds(&self, rel: f64) -> Result<f64, EstimatorError> {
        let f = self.fisher(self.t_true)?;
        if !(f > 0.0) {
            return Err(EstimatorError::ZeroFisher);
        }
        Ok(1.0 / (f * (rel * self.t_true).powi(2)))
    }
}

fn gibbs_outcomes(spectrum: &DiscreteSpectrum<f64>, t: f64) -> Result<OutcomeSpectrum<f64>, ModelError> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(ModelError::InvalidTemperature(t));
    }
    let levels = spectrum.levels();
    let e0 = spectrum.ground().0;
    let w: Vec<f64> = levels.iter().map(|&(e, g)| g as f64 * (-(e - e0) / t).exp()).collect();
    let z: f64 = w.iter().sum();
    let probs: Vec<f64> = w.iter().map(|x| x / z).collect();
    let mean: f64 = probs.iter().zip(levels).map(|(p, &(e, _))| p * e).sum();
    // E_m = T^2 d ln p_m / dT = E_m - <E>
    let energies = levels.iter().map(|&(e, _)| e - mean).collect();
    Ok(OutcomeSpectrum::from_parts(t, probs, energies))
}

/// ChaCha20 keyed by `seed`, on stream `stream`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Multinomial draw as a chain of binomials.
pub fn draw_counts<R: Rng + ?Sized>(p: &[f64], nu: u64, rng: &mut R) -> Vec<u64> {
    let mut counts = vec![0u64; p.len()];
    let mut left = nu;
    let mut mass = 1.0f64;
    for (i, &pi) in p.iter().enumerate() {
        if left == 0 {
            break;
        }
        if i + 1 == p.len() {
            counts[i] = left;
            break;
        }
        let q = if mass > 0.0 { (pi / mass).clamp(0.0, 1.0) } else { 0.0 };
        let k = match Binomial::new(left, q) {
            Ok(b) => b.sample(rng),
            Err(_) => 0,
        };
        counts[i] = k;
        left -= k;
        mass -= pi;
    }
    counts
}

/// `nu` outcomes at `T_true`, drawn on stream 0 of `seed`.
pub fn sample_counts(om: &OutcomeModel, nu: u64, seed: u64) -> Result<Vec<u64>, EstimatorError> {
    if nu == 0 {
        return Err(EstimatorError::NoRounds);
    }
    let p = om.checked_probabilities(om.t_true)?;
    Ok(draw_counts(&p, nu, &mut stream_rng(seed, 0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleEstimate {
    pub t: f64,
    pub log_likelihood: f64,
    /// The maximum sits on an end of the search range.
    pub at_boundary: bool,
}

fn log_likelihood(om: &OutcomeModel, counts: &[u64], t: f64) -> f64 {
    match om.probabilities(t) {
        Ok(p) => counts
            .iter()
            .zip(&p)
            .filter(|(&c, _)| c > 0)
            .map(|(&c, &pi)| if pi > 0.0 { c as f64 * pi.ln() } else { f64::NEG_INFINITY })
            .sum(),
        Err(_) => f64::NEG_INFINITY,
    }
}

/// Maximizes `sum_m c_m ln p_m(T)` in `ln T`: a 64-point grid locates the
/// peak, golden-section search refines it to `1e-8` relative in `T`.
pub fn mle_temperature(om: &OutcomeModel, counts: &[u64]) -> Result<MleEstimate, EstimatorError> {
    if counts.iter().all(|&c| c == 0) {
        return Err(EstimatorError::EmptyCounts);
    }
    let (u_lo, u_hi) = (om.range.lo.ln(), om.range.hi.ln());
    let ll = |u: f64| log_likelihood(om, counts, u.exp());
    let step = (u_hi - u_lo) / (GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..GRID_POINTS).map(|i| ll(u_lo + step * i as f64)).collect();
    let (best, &top) = grid
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is nonempty");
    let bottom = grid.iter().copied().fold(f64::INFINITY, f64::min);
    if !top.is_finite() || top - bottom <= 1e-12 * top.abs().max(1.0) {
        return Err(EstimatorError::FlatLikelihood);
    }
    let mut a = u_lo + step * best.saturating_sub(1) as f64;
    let mut b = u_lo + step * (best + 1).min(GRID_POINTS - 1) as f64;
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (ll(c), ll(d));
    // |du| = |dT|/T
    while b - a > GOLDEN_REL_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = ll(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = ll(d);
        }
    }
    let mut u = 0.5 * (a + b);
    let mut value = ll(u);
    for edge in [u_lo, u_hi] {
        let v = ll(edge);
        if v > value {
            u = edge;
            value = v;
        }
    }
    let at_boundary = (u - u_lo).abs() <= 2.0 * GOLDEN_REL_TOL || (u_hi - u).abs() <= 2.0 * GOLDEN_REL_TOL;
    Ok(MleEstimate {
        t: u.exp(),
        log_likelihood: value,
        at_boundary,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub nu: u64,
    pub trials: usize,
    pub seed: u64,
    pub t_true: f64,
    pub mean_estimate: f64,
    /// Unbiased sample variance of the estimates.
    pub variance: f64,
    pub fisher: f64,
    /// `1 / (nu F)`.
    pub crb: f64,
    /// `variance / crb`.
    pub ratio: f64,
    pub boundary_hits: usize,
    /// `variance >= crb (1 - 5/sqrt(trials))`.
    pub bound_respected: bool,
}

/// Runs `trials` rounds of sampling and estimation on separate streams.
pub fn crb_report(om: &OutcomeModel, nu: u64, trials: usize, seed: u64) -> Result<TrialReport, EstimatorError> {
    if nu == 0 {
        return Err(EstimatorError::NoRounds);
    }
    if trials < MIN_TRIALS {
        return Err(EstimatorError::TooFewTrials {
            min: MIN_TRIALS,
            got: trials,
        });
    }
    let fisher = om.fisher(om.t_true)?;
    if !(fisher > 0.0 && fisher.is_finite()) {
        return Err(EstimatorError::ZeroFisher);
    }
    let p = om.checked_probabilities(om.t_true)?;
    let estimates: Vec<MleEstimate> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let counts = draw_counts(&p, nu, &mut stream_rng(seed, k as u64));
            mle_temperature(om, &counts)
        })
        .collect::<Result<_, _>>()?;
    let n = trials as f64;
    let mean = estimates.iter().map(|e| e.t).sum::<f64>() / n;
    let variance = estimates.iter().map(|e| (e.t - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let crb = 1.0 / (nu as f64 * fisher);
    let bound_respected = variance >= crb * (1.0 - 5.0 / n.sqrt());
    if !bound_respected {
        log::warn!("empirical variance {variance:e} is below the bound {crb:e}");
    }
    Ok(TrialReport {
        nu,
        trials,
        seed,
        t_true: om.t_true,
        mean_estimate: mean,
        variance,
        fisher,
        crb,
        ratio: variance / crb,
        boundary_hits: estimates.iter().filter(|e| e.at_boundary).count(),
        bound_respected,
    })
}

/// Slope of `ln(nu_req / T^2)` against `1/T` for the weak-coupling pair at
/// relative precision `rel`; an activated law `e^{t/T}` gives slope `t`.
pub fn activation_slope(t_hop: f64, temps: &[f64], rel: f64) -> Result<f64, EstimatorError> {
    let spec = TwoSiteSpec::new(t_hop, Coupling::Weak)?;
    let mut xs = Vec::with_capacity(temps.len());
    let mut ys = Vec::with_capacity(temps.len());
    for &t in temps {
        let nu = OutcomeModel::two_site(t, spec.clone())?.required_rounds(rel)?;
        xs.push(1.0 / t);
        ys.push((nu / (t * t)).ln());
    }
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
