//! Finite POVMs on small dense Hilbert spaces and the classical Fisher
//! information of their outcome statistics on thermal states.
//!
//! POVM elements are taken to be temperature independent. Each outcome `m`
//! carries a probability `p_m = Tr{Pi_m rho_T}` and an energy
//! `E_m = Tr{Pi_m H rho_T} / p_m`; the Fisher information is the variance
//! of `E_m` under `p_m` divided by `T^4`.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::thermal::{DiscreteSpectrum, ThermalError};
use crate::Real;

pub const MAX_DIM: usize = 4096;
const HERMITIAN_TOL: f64 = 1e-12;
const POSITIVITY_TOL: f64 = 1e-10;
const COMPLETENESS_TOL: f64 = 1e-10;
const NEGLIGIBLE_PROB: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PovmError {
    #[error("operator dimension must be between 1 and {MAX_DIM}, got {0}")]
    BadDimension(usize),
    #[error("expected {expected} entries for the declared dimension, got {got}")]
    EntryCount { expected: usize, got: usize },
    #[error("operator is not Hermitian: entry ({row}, {col}) off by {defect:e}")]
    NotHermitian { row: usize, col: usize, defect: f64 },
    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("a POVM needs at least one element")]
    Empty,
    #[error("element {element} is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { element: usize, min_eigenvalue: f64 },
    #[error("elements do not sum to the identity (defect {0:e})")]
    Incomplete(f64),
    #[error("eigenvalue family is not normalized (defect {0:e})")]
    Normalization(f64),
    #[error("temperature must be positive and finite, got {0}")]
    InvalidTemperature(f64),
    #[error("finite-difference step must be positive and smaller than T, got {0}")]
    InvalidStep(f64),
    #[error(transparent)]
    Thermal(#[from] ThermalError),
}

/// Dense Hermitian matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorJson", into = "OperatorJson")]
#[serde(bound = "T: Real")]
pub struct HermitianOperator<T> {
    dim: usize,
    entries: Vec<Complex<T>>,
}

/// Wire format: `{"dim": n, "entries": [[re, im], ...]}` in row-major order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorJson {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl<T: Real> TryFrom<OperatorJson> for HermitianOperator<T> {
    type Error = PovmError;
    fn try_from(raw: OperatorJson) -> Result<Self, PovmError> {
        let entries = raw
            .entries
            .iter()
            .map(|&[re, im]| Complex::new(T::lit(re), T::lit(im)))
            .collect();
        Self::new(raw.dim, entries)
    }
}

impl<T: Real> From<HermitianOperator<T>> for OperatorJson {
    fn from(op: HermitianOperator<T>) -> Self {
        OperatorJson {
            dim: op.dim,
            entries: op.entries.iter().map(|z| [z.re.as_f64(), z.im.as_f64()]).collect(),
        }
    }
}

/// Eigenvalues ascending with matching unit eigenvectors.
#[derive(Debug, Clone)]
pub struct Eigen<T> {
    pub values: Vec<T>,
    pub vectors: Vec<Vec<Complex<T>>>,
}

impl<T: Real> HermitianOperator<T> {
    pub fn new(dim: usize, entries: Vec<Complex<T>>) -> Result<Self, PovmError> {
        if dim == 0 || dim > MAX_DIM {
            return Err(PovmError::BadDimension(dim));
        }
        if entries.len() != dim * dim {
            return Err(PovmError::EntryCount {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        let scale = entries
            .iter()
            .fold(T::one(), |m, z| m.max(z.norm()));
        let tol = T::lit(HERMITIAN_TOL) * scale;
        for i in 0..dim {
            for j in i..dim {
                let a = entries[i * dim + j];
                let b = entries[j * dim + i];
                if !(a.re.is_finite() && a.im.is_finite()) {
                    return Err(PovmError::NonFinite { row: i, col: j });
                }
                let defect = (a - b.conj()).norm();
                if defect > tol {
                    return Err(PovmError::NotHermitian {
                        row: i,
                        col: j,
                        defect: defect.as_f64(),
                    });
                }
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn from_real_rows(rows: &[Vec<T>]) -> Result<Self, PovmError> {
        let dim = rows.len();
        let entries = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| Complex::new(x, T::zero())))
            .collect();
        Self::new(dim, entries)
    }

    pub fn diagonal(values: &[T]) -> Result<Self, PovmError> {
        let dim = values.len();
        let mut entries = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        for (i, &v) in values.iter().enumerate() {
            entries[i * dim + i] = Complex::new(v, T::zero());
        }
        Self::new(dim, entries)
    }

    pub fn identity(dim: usize) -> Result<Self, PovmError> {
        Self::diagonal(&vec![T::one(); dim])
    }

    pub fn zeros(dim: usize) -> Result<Self, PovmError> {
        Self::diagonal(&vec![T::zero(); dim])
    }

    /// `|v><v|` for a (not necessarily normalized) vector.
    pub fn projector(v: &[Complex<T>]) -> Result<Self, PovmError> {
        let dim = v.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for a in v {
            for b in v {
                entries.push(*a * b.conj());
            }
        }
        Self::new(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.entries[row * self.dim + col]
    }

    fn same_dim(&self, other: &Self) -> Result<(), PovmError> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(PovmError::DimensionMismatch(self.dim, other.dim))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, PovmError> {
        self.same_dim(other)?;
        Ok(Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| *a + *b)
                .collect(),
        })
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| *z * s).collect(),
        }
    }

    /// Plain matrix product; the result need not be Hermitian.
    pub fn matmul(&self, other: &Self) -> Result<Vec<Complex<T>>, PovmError> {
        self.same_dim(other)?;
        let n = self.dim;
        let mut out = vec![Complex::new(T::zero(), T::zero()); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] = out[i * n + j] + a * other.entries[k * n + j];
                }
            }
        }
        Ok(out)
    }

    /// Product of two commuting Hermitian operators (checked for
    /// Hermiticity of the result).
    pub fn commuting_product(&self, other: &Self) -> Result<Self, PovmError> {
        let entries = self.matmul(other)?;
        Self::new(self.dim, entries)
    }

    pub fn trace(&self) -> T {
        (0..self.dim).map(|i| self.entries[i * self.dim + i].re).sum()
    }

    /// `<v| A |v>` (real for Hermitian `A`).
    pub fn expectation(&self, v: &[Complex<T>]) -> T {
        let n = self.dim;
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..n {
            let mut row = Complex::new(T::zero(), T::zero());
            for j in 0..n {
                row = row + self.entries[i * n + j] * v[j];
            }
            acc = acc + v[i].conj() * row;
        }
        acc.re
    }

    /// Eigendecomposition (computed in `f64`).
    pub fn eigen(&self) -> Eigen<T> {
        let n = self.dim;
        let m = DMatrix::from_fn(n, n, |i, j| {
            let z = self.entries[i * n + j];
            Complex::new(z.re.as_f64(), z.im.as_f64())
        });
        let eig = m.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[a]
                .partial_cmp(&eig.eigenvalues[b])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let values = order.iter().map(|&k| T::lit(eig.eigenvalues[k])).collect();
        let vectors = order
            .iter()
            .map(|&k| {
                eig.eigenvectors
                    .column(k)
                    .iter()
                    .map(|z| Complex::new(T::lit(z.re), T::lit(z.im)))
                    .collect()
            })
            .collect();
        Eigen { values, vectors }
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigen().values[0]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Povm<T> {
    elements: Vec<HermitianOperator<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PovmDiagnostics {
    /// `max |sum_m Pi_m - 1|` over entries.
    pub completeness_defect: f64,
    pub min_eigenvalues: Vec<f64>,
    pub valid: bool,
}

impl<T: Real> Povm<T> {
    /// Checked constructor: positivity to `-1e-10` and completeness to `1e-10`.
    pub fn new(elements: Vec<HermitianOperator<T>>) -> Result<Self, PovmError> {
        let povm = Self::from_elements_unchecked(elements)?;
        let diag = validate(&povm);
        if let Some((element, &min)) = diag
            .min_eigenvalues
            .iter()
            .enumerate()
            .find(|(_, &v)| v < -POSITIVITY_TOL)
        {
            return Err(PovmError::NotPositive {
                element,
                min_eigenvalue: min,
            });
        }
        if !(diag.completeness_defect <= COMPLETENESS_TOL) {
            return Err(PovmError::Incomplete(diag.completeness_defect));
        }
        Ok(povm)
    }

    /// Only checks that the elements share a dimension.
    pub fn from_elements_unchecked(elements: Vec<HermitianOperator<T>>) -> Result<Self, PovmError> {
        let first = elements.first().ok_or(PovmError::Empty)?;
        for e in &elements {
            first.same_dim(e)?;
        }
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[HermitianOperator<T>] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim
    }
}

/// Completeness defect and per-element minimum eigenvalues. Never fails.
pub fn validate<T: Real>(povm: &Povm<T>) -> PovmDiagnostics {
    let n = povm.dim();
    let mut sum = vec![Complex::new(T::zero(), T::zero()); n * n];
    for e in &povm.elements {
        for (s, z) in sum.iter_mut().zip(&e.entries) {
            *s = *s + *z;
        }
    }
    let mut defect = T::zero();
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { T::one() } else { T::zero() };
            defect = defect.max((sum[i * n + j] - Complex::new(target, T::zero())).norm());
        }
    }
    let min_eigenvalues: Vec<f64> = povm.elements.iter().map(|e| e.min_eigenvalue().as_f64()).collect();
    let completeness_defect = defect.as_f64();
    let valid = completeness_defect <= COMPLETENESS_TOL
        && min_eigenvalues.iter().all(|&v| v >= -POSITIVITY_TOL);
    PovmDiagnostics {
        completeness_defect,
        min_eigenvalues,
        valid,
    }
}

/// Outcome probabilities, outcome energies and the grouped gap list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeSpectrum<T> {
    pub t: T,
    pub probs: Vec<T>,
    pub energies: Vec<T>,
    /// Distinct outcome energies minus the lowest, ascending.
    pub gaps: Vec<T>,
    /// Outcomes with `p < 1e-300`; their energy is reported as 0.
    pub negligible: Vec<bool>,
}

impl<T: Real> OutcomeSpectrum<T> {
    /// Builds the spectrum from `(p_m, E_m)` pairs, flagging negligible
    /// outcomes and grouping energies within `1e-9` of the energy range.
    pub fn from_parts(t: T, probs: Vec<T>, energies: Vec<T>) -> Self {
        let negligible: Vec<bool> = probs.iter().map(|&p| p < T::lit(NEGLIGIBLE_PROB)).collect();
        let energies: Vec<T> = energies
            .iter()
            .zip(&negligible)
            .map(|(&e, &neg)| if neg { T::zero() } else { e })
            .collect();
        let mut live: Vec<T> = energies
            .iter()
            .zip(&negligible)
            .filter(|(_, &neg)| !neg)
            .map(|(&e, _)| e)
            .collect();
        live.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let gaps = match (live.first(), live.last()) {
            (Some(&lo), Some(&hi)) => {
                let tie = T::lit(1e-9) * (hi - lo);
                let mut distinct: Vec<T> = Vec::new();
                for e in live {
                    match distinct.last() {
                        Some(&d) if e - d <= tie => {}
                        _ => distinct.push(e),
                    }
                }
                distinct.into_iter().map(|e| e - lo).collect()
            }
            _ => Vec::new(),
        };
        Self {
            t,
            probs,
            energies,
            gaps,
            negligible,
        }
    }

    pub fn mean_energy(&self) -> T {
        self.live().map(|(p, e)| p * e).sum()
    }

    fn live(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.probs
            .iter()
            .zip(&self.energies)
            .zip(&self.negligible)
            .filter(|(_, &neg)| !neg)
            .map(|((&p, &e), _)| (p, e))
    }
}

/// A POVM paired with a Hamiltonian, reduced to the temperature-independent
/// overlaps `<k| Pi_m |k>` in the energy eigenbasis.
#[derive(Debug, Clone)]
pub struct ThermalMeasurement<T> {
    energies: Vec<T>,
    overlaps: Vec<Vec<T>>,
}

impl<T: Real> ThermalMeasurement<T> {
    pub fn new(povm: &Povm<T>, h: &HermitianOperator<T>) -> Result<Self, PovmError> {
        if povm.dim() != h.dim {
            return Err(PovmError::DimensionMismatch(povm.dim(), h.dim));
        }
        let eig = h.eigen();
        let overlaps = povm
            .elements
            .iter()
            .map(|pi| eig.vectors.iter().map(|v| pi.expectation(v)).collect())
            .collect();
        Ok(Self {
            energies: eig.values,
            overlaps,
        })
    }

    pub fn outcomes(&self) -> usize {
        self.overlaps.len()
    }

    fn boltzmann(&self, t: T) -> Result<Vec<T>, PovmError> {
        if !(t > T::zero() && t.is_finite()) {
            return Err(PovmError::InvalidTemperature(t.as_f64()));
        }
        let e0 = self.energies[0];
        let w: Vec<T> = self.energies.iter().map(|&e| (-(e - e0) / t).exp()).collect();
        let z: T = w.iter().copied().sum();
        Ok(w.into_iter().map(|x| x / z).collect())
    }

    pub fn probabilities(&self, t: T) -> Result<Vec<T>, PovmError> {
        let w = self.boltzmann(t)?;
        Ok(self
            .overlaps
            .iter()
            .map(|d| d.iter().zip(&w).map(|(&a, &b)| a * b).sum::<T>().max(T::zero()))
            .collect())
    }

    pub fn outcome_spectrum(&self, t: T) -> Result<OutcomeSpectrum<T>, PovmError> {
        let w = self.boltzmann(t)?;
        let e0 = self.energies[0];
        let mut probs = Vec::with_capacity(self.overlaps.len());
        let mut energies = Vec::with_capacity(self.overlaps.len());
        for d in &self.overlaps {
            let mut p = T::zero();
            let mut pe = T::zero();
            for ((&a, &b), &e) in d.iter().zip(&w).zip(&self.energies) {
                p = p + a * b;
                // measured from e0 to keep the low-temperature sums accurate
                pe = pe + a * b * (e - e0);
            }
            let p = p.max(T::zero());
            probs.push(p);
            energies.push(if p > T::zero() { e0 + pe / p } else { T::zero() });
        }
        Ok(OutcomeSpectrum::from_parts(t, probs, energies))
    }

    /// Canonical QFI of the Hamiltonian's spectrum.
    pub fn qfi(&self, t: T) -> Result<T, PovmError> {
        let spec = DiscreteSpectrum::from_energies(&self.energies)?;
        Ok(crate::thermal::canonical_point(&spec, t)?.qfi)
    }

    /// `sum_m (d p_m / dT)^2 / p_m` with central differences.
    pub fn fisher_by_probability_derivative(&self, t: T, h: T) -> Result<T, PovmError> {
        if !(h > T::zero() && h < t) {
            return Err(PovmError::InvalidStep(h.as_f64()));
        }
        let p = self.probabilities(t)?;
        let up = self.probabilities(t + h)?;
        let down = self.probabilities(t - h)?;
        let two_h = T::lit(2.0) * h;
        Ok(p
            .iter()
            .zip(up.iter().zip(&down))
            .filter(|(&pm, _)| pm >= T::lit(NEGLIGIBLE_PROB))
            .map(|(&pm, (&u, &d))| {
                let dp = (u - d) / two_h;
                dp * dp / pm
            })
            .sum())
    }
}

pub fn outcome_spectrum<T: Real>(
    povm: &Povm<T>,
    h: &HermitianOperator<T>,
    t: T,
) -> Result<OutcomeSpectrum<T>, PovmError> {
    ThermalMeasurement::new(povm, h)?.outcome_spectrum(t)
}

/// `[sum p E^2 - (sum p E)^2] / T^4`, skipping negligible outcomes.
pub fn fisher_information<T: Real>(os: &OutcomeSpectrum<T>) -> T {
    let norm: T = os.live().map(|(p, _)| p).sum();
    if norm <= T::zero() {
        return T::zero();
    }
    let mean = os.live().map(|(p, e)| p * e).sum::<T>() / norm;
    let var = os
        .live()
        .map(|(p, e)| p * (e - mean) * (e - mean))
        .sum::<T>()
        / norm;
    var / os.t.powi(4)
}

pub fn fisher_by_probability_derivative<T: Real>(
    povm: &Povm<T>,
    h_op: &HermitianOperator<T>,
    t: T,
    h: T,
) -> Result<T, PovmError> {
    ThermalMeasurement::new(povm, h_op)?.fisher_by_probability_derivative(t, h)
}

/// Projective energy measurement; eigenvalues within `1e-10` (relative to
/// the spectral scale) share one projector.
pub fn optimal_povm<T: Real>(h: &HermitianOperator<T>) -> Result<Povm<T>, PovmError> {
    let eig = h.eigen();
    let scale = eig
        .values
        .iter()
        .fold(T::one(), |m, v| m.max(v.abs()));
    let tie = T::lit(1e-10) * scale;
    let mut groups: Vec<(T, Vec<usize>)> = Vec::new();
    for (k, &v) in eig.values.iter().enumerate() {
        match groups.last_mut() {
            Some((first, members)) if v - *first <= tie => members.push(k),
            _ => groups.push((v, vec![k])),
        }
    }
    let mut elements = Vec::with_capacity(groups.len());
    for (_, members) in groups {
        let mut acc = HermitianOperator::zeros(h.dim)?;
        for k in members {
            acc = acc.add(&HermitianOperator::projector(&eig.vectors[k])?)?;
        }
        elements.push(acc);
    }
    Povm::from_elements_unchecked(elements)
}

/// Fisher information of a state diagonal in a fixed basis, from its
/// eigenvalue family `lambda_i(T)`: `sum_i (d lambda_i/dT)^2 / lambda_i`.
pub fn qfi_diagonal_family<T, F>(eigs: F, t: T, h: T) -> Result<T, PovmError>
where
    T: Real,
    F: Fn(T) -> Vec<T>,
{
    if !(t > T::zero() && t.is_finite()) {
        return Err(PovmError::InvalidTemperature(t.as_f64()));
    }
    if !(h > T::zero() && h < t) {
        return Err(PovmError::InvalidStep(h.as_f64()));
    }
    let lam = eigs(t);
    let up = eigs(t + h);
    let down = eigs(t - h);
    for family in [&lam, &up, &down] {
        let defect = (family.iter().copied().sum::<T>() - T::one()).abs();
        if defect > T::lit(1e-8) {
            return Err(PovmError::Normalization(defect.as_f64()));
        }
    }
    let two_h = T::lit(2.0) * h;
    Ok(lam
        .iter()
        .zip(up.iter().zip(&down))
        .filter(|(&l, _)| l >= T::lit(NEGLIGIBLE_PROB))
        .map(|(&l, (&u, &d))| {
            let dl = (u - d) / two_h;
            dl * dl / l
        })
        .sum())
}

/// Two spinless fermionic sites on the 4-dimensional Fock space with basis
/// `|n1 n2>` indexed by `n1 + 2 n2` (Jordan–Wigner ordering, site 1 first).
#[derive(Debug, Clone)]
pub struct TwoSiteFock<T> {
    /// Annihilators `c_1`, `c_2` as real 4x4 matrices.
    pub c1: [[T; 4]; 4],
    pub c2: [[T; 4]; 4],
}

impl<T: Real> TwoSiteFock<T> {
    pub fn new() -> Self {
        let mut c1 = [[T::zero(); 4]; 4];
        let mut c2 = [[T::zero(); 4]; 4];
        for b in 0..4usize {
            let (n1, n2) = (b & 1, b >> 1);
            if n1 == 1 {
                c1[b & !1][b] = T::one();
            }
            if n2 == 1 {
                let sign = if n1 == 1 { -T::one() } else { T::one() };
                c2[b & !2][b] = sign;
            }
        }
        Self { c1, c2 }
    }

    /// `c_pm = (c_1 pm c_2) / sqrt 2`.
    pub fn mode(&self, plus: bool) -> [[T; 4]; 4] {
        let s = T::one() / T::lit(2.0).sqrt();
        let sign = if plus { T::one() } else { -T::one() };
        let mut out = [[T::zero(); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = s * (self.c1[i][j] + sign * self.c2[i][j]);
            }
        }
        out
    }

    /// `c^dagger c` for a real annihilator.
    pub fn number(c: &[[T; 4]; 4]) -> HermitianOperator<T> {
        let mut rows = vec![vec![T::zero(); 4]; 4];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = (0..4).map(|k| c[k][i] * c[k][j]).sum();
            }
        }
        HermitianOperator::from_real_rows(&rows).expect("number operator is Hermitian")
    }

    /// Occupation-number POVM of the `c_+`, `c_-` modes in the order
    /// `(0, +, -, 2)`.
    pub fn mode_occupation_povm(&self) -> Povm<T> {
        let n_plus = Self::number(&self.mode(true));
        let n_minus = Self::number(&self.mode(false));
        let id = HermitianOperator::identity(4).expect("dim 4");
        let empty_plus = id.add(&n_plus.scale(-T::one())).expect("dim 4");
        let empty_minus = id.add(&n_minus.scale(-T::one())).expect("dim 4");
        let prod = |a: &HermitianOperator<T>, b: &HermitianOperator<T>| {
            a.commuting_product(b).expect("mode numbers commute")
        };
        Povm::new(vec![
            prod(&empty_plus, &empty_minus),
            prod(&n_plus, &empty_minus),
            prod(&empty_plus, &n_minus),
            prod(&n_plus, &n_minus),
        ])
        .expect("occupation projectors form a POVM")
    }

    /// `sum_sigma eps_sigma c_sigma^dagger c_sigma`.
    pub fn mode_hamiltonian(&self, eps_plus: T, eps_minus: T) -> HermitianOperator<T> {
        let n_plus = Self::number(&self.mode(true));
        let n_minus = Self::number(&self.mode(false));
        n_plus
            .scale(eps_plus)
            .add(&n_minus.scale(eps_minus))
            .expect("dim 4")
    }
}

impl<T: Real> Default for TwoSiteFock<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Random `outcomes`-element POVM on `C^dim`: random positive matrices
/// `A_m = B_m B_m^dagger` conjugated by `S^{-1/2}` with `S = sum_m A_m`.
pub fn random_povm<R: Rng + ?Sized>(dim: usize, outcomes: usize, rng: &mut R) -> Povm<f64> {
    let mut raw: Vec<DMatrix<Complex<f64>>> = (0..outcomes)
        .map(|_| {
            let b = DMatrix::from_fn(dim, dim, |_, _| {
                Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            &b * b.adjoint()
        })
        .collect();
    let total = raw
        .iter()
        .fold(DMatrix::zeros(dim, dim), |acc: DMatrix<Complex<f64>>, a| acc + a);
    let eig = total.symmetric_eigen();
    let inv_sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| Complex::new(1.0 / v.sqrt(), 0.0)));
    let s = &eig.eigenvectors * inv_sqrt * eig.eigenvectors.adjoint();
    let elements = raw
        .iter_mut()
        .map(|a| {
            let m = &s * &*a * &s;
            // exact Hermitian symmetrization
            let m = (&m + m.adjoint()) * Complex::new(0.5, 0.0);
            let entries = (0..dim)
                .flat_map(|i| (0..dim).map(move |j| (i, j)))
                .map(|(i, j)| m[(i, j)])
                .collect();
            HermitianOperator::new(dim, entries).expect("symmetrized")
        })
        .collect();
    Povm::new(elements).expect("random POVM is valid")
}
