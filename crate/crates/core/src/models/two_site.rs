//! Two neighbouring sites of a half-filled tight-binding chain.
//!
//! Strong coupling: the sites are cut out of an infinite chain and their
//! reduced state follows from the nearest-neighbour correlation
//! `c = <c_1^dag c_2>`; the `c_+-` modes are occupied with `1/2 +- c`.
//! Weak coupling: the pair thermalizes with its own Hamiltonian
//! `-t n_+ + t n_-`. Outcomes are always ordered `(0, +, -, 2)`.
//! Energies are in units where `k_B = 1`; `t` is the hopping.

use serde::{Deserialize, Serialize};

use super::{check_temperature, ModelError};
use crate::numerics::{quad_adaptive, Interval, Tolerance};
use crate::povm::{HermitianOperator, OutcomeSpectrum, Povm, TwoSiteFock};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    Strong,
    Weak,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceMode {
    /// Quadrature over the linearized band, `kappa in [-pi/2, pi/2]`.
    ExactIntegral,
    /// Band extended to infinity: `c = (T/2t) / sinh(pi T / 2t)`.
    #[default]
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoSiteSpec<T> {
    pub t: T,
    pub coupling: Coupling,
    #[serde(default)]
    pub covariance_mode: CovarianceMode,
}

/// Above this `T/t` the strong-coupling state is outside its regime.
pub const STRONG_COUPLING_LIMIT: f64 = 0.3;

fn x_of<T: Real>(t_hop: T, temp: T) -> T {
    T::PI() * temp / (T::lit(2.0) * t_hop)
}

/// `x cosh x - sinh x`, by series where the two terms nearly cancel.
fn cosh_sinh_defect<T: Real>(x: T) -> T {
    if x.abs() > T::lit(0.5) {
        return x * x.cosh() - x.sinh();
    }
    // sum_k 2k x^{2k+1} / (2k+1)!
    let x2 = x * x;
    let mut term = x * x2 / T::lit(6.0); // x^3 / 3!
    let mut sum = T::zero();
    for k in 1..20 {
        let kk = T::from_usize_lossy(k);
        let contrib = T::lit(2.0) * kk * term;
        sum = sum + contrib;
        if contrib.abs() <= T::epsilon() * sum.abs() {
            break;
        }
        let n = T::from_usize_lossy(2 * k + 2);
        term = term * x2 / (n * (n + T::one()));
    }
    sum
}

/// `(c, dc/dT)` with `c = (T/2t)/sinh(pi T/2t)`.
pub fn correlation_closed<T: Real>(t_hop: T, temp: T) -> (T, T) {
    let x = x_of(t_hop, temp);
    let ratio = if x.abs() < T::lit(1e-8) { T::one() } else { x / x.sinh() };
    let c = ratio / T::PI();
    // dc/dT = -(x cosh x - sinh x) / (2 t sinh^2 x)
    let dc = if x.abs() < T::lit(1e-8) {
        -x / (T::lit(6.0) * t_hop)
    } else {
        let s = x.sinh();
        -cosh_sinh_defect(x) / (T::lit(2.0) * t_hop * s * s)
    };
    (c, dc)
}

/// `(c, dc/dT)` from the band integral
/// `c = (1/pi) int_0^{pi/2} sin(kappa) tanh(t kappa / T) d kappa`.
pub fn correlation_integral<T: Real>(t_hop: T, temp: T) -> Result<(T, T), ModelError> {
    let iv = Interval::new(T::zero(), T::FRAC_PI_2())?;
    let tol = Tolerance::new(T::lit(1e-13), T::lit(1e-15), 200)?;
    let c = quad_adaptive(|k: T| k.sin() * (t_hop * k / temp).tanh(), iv, tol)? / T::PI();
    let dc = quad_adaptive(
        |k: T| {
            let y = t_hop * k / temp;
            let sech = if y > T::lit(350.0) { T::zero() } else { T::one() / y.cosh() };
            -k.sin() * y / temp * sech * sech
        },
        iv,
        tol,
    )? / T::PI();
    Ok((c, dc))
}

/// Strong-coupling probabilities `((1/2+c)^2, ..)` in `(0, +, -, 2)` order,
/// closed-form correlation.
pub fn strong_probabilities<T: Real>(t_hop: T, temp: T) -> [T; 4] {
    let (c, _) = correlation_closed(t_hop, temp);
    probabilities_from_c(c)
}

/// Strong-coupling outcome energies `E_m = T^2 d ln p_m / dT`, closed form.
pub fn strong_energies<T: Real>(t_hop: T, temp: T) -> [T; 4] {
    let (c, dc) = correlation_closed(t_hop, temp);
    energies_from_c(c, dc, temp)
}

fn probabilities_from_c<T: Real>(c: T) -> [T; 4] {
    let half = T::lit(0.5);
    let quarter = T::lit(0.25);
    let p_plus = (half + c) * (half + c);
    let p_minus = (half - c) * (half - c);
    let p_edge = quarter - c * c;
    [p_edge, p_plus, p_minus, p_edge]
}

fn energies_from_c<T: Real>(c: T, dc: T, temp: T) -> [T; 4] {
    let half = T::lit(0.5);
    let two_t2 = T::lit(2.0) * temp * temp;
    let e_edge = -two_t2 * c * dc / (T::lit(0.25) - c * c);
    [e_edge, two_t2 * dc / (half + c), -two_t2 * dc / (half - c), e_edge]
}

/// `2 c'^2 / (1/4 - c^2)`, equal to
/// `(1/(2 t^2 s^2)) [pi T cosh - 2t sinh]^2 / (t^2 s^2 - T^2)`.
pub fn qfi_strong<T: Real>(t_hop: T, temp: T) -> T {
    let (c, dc) = correlation_closed(t_hop, temp);
    T::lit(2.0) * dc * dc / (T::lit(0.25) - c * c)
}

/// Leading low-temperature term `pi^4 T^2 / (18 (pi^2 - 4) t^4)`.
pub fn qfi_strong_low_t<T: Real>(t_hop: T, temp: T) -> T {
    let pi2 = T::PI() * T::PI();
    pi2 * pi2 / (T::lit(18.0) * (pi2 - T::lit(4.0))) * temp * temp / t_hop.powi(4)
}

/// Weak-coupling probabilities in `(0, +, -, 2)` order.
pub fn weak_probabilities<T: Real>(t_hop: T, temp: T) -> [T; 4] {
    let q = (-t_hop / temp).exp();
    let p_plus = T::one() / ((T::one() + q) * (T::one() + q));
    let p_minus = q * q * p_plus;
    // 1/(2 + 2 cosh(t/T)) = q / (1 + q)^2
    let p_edge = q * p_plus;
    [p_edge, p_plus, p_minus, p_edge]
}

pub fn weak_energies<T: Real>(t_hop: T, _temp: T) -> [T; 4] {
    [T::zero(), -t_hop, t_hop, T::zero()]
}

/// `t^2 / (2 T^4 cosh^2(t/2T))`.
pub fn qfi_weak<T: Real>(t_hop: T, temp: T) -> T {
    let q = (-t_hop / temp).exp();
    let sech2 = T::lit(4.0) * q / ((T::one() + q) * (T::one() + q));
    t_hop * t_hop / (T::lit(2.0) * temp.powi(4)) * sech2
}

/// `2 t^2 e^{-t/T} / T^4`.
pub fn qfi_weak_low_t<T: Real>(t_hop: T, temp: T) -> T {
    T::lit(2.0) * t_hop * t_hop / temp.powi(4) * (-t_hop / temp).exp()
}

impl<T: Real> TwoSiteSpec<T> {
    pub fn new(t: T, coupling: Coupling) -> Result<Self, ModelError> {
        let s = Self {
            t,
            coupling,
            covariance_mode: CovarianceMode::default(),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_covariance_mode(mut self, mode: CovarianceMode) -> Self {
        self.covariance_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.t > T::zero() && self.t.is_finite() {
            Ok(())
        } else {
            Err(ModelError::InvalidSpec(format!("hopping t must be positive, got {}", self.t)))
        }
    }

    fn check(&self, temp: T) -> Result<(), ModelError> {
        self.validate()?;
        check_temperature(temp)?;
        if self.coupling == Coupling::Strong && temp > T::lit(STRONG_COUPLING_LIMIT) * self.t {
            log::warn!(
                "T/t = {} is above {STRONG_COUPLING_LIMIT}; the strong-coupling state assumes T << t",
                temp / self.t
            );
        }
        Ok(())
    }

    /// `(c, dc/dT)` in the configured covariance mode.
    pub fn correlation(&self, temp: T) -> Result<(T, T), ModelError> {
        match self.covariance_mode {
            CovarianceMode::ClosedForm => Ok(correlation_closed(self.t, temp)),
            CovarianceMode::ExactIntegral => correlation_integral(self.t, temp),
        }
    }

    /// `<c_j^dag c_j'>` for `j, j' in {1, 2}` (strong coupling only).
    pub fn covariance(&self, temp: T) -> Result<[[T; 2]; 2], ModelError> {
        self.check(temp)?;
        if self.coupling != Coupling::Strong {
            return Err(ModelError::Unsupported(
                "the covariance of the chain applies to strong coupling".into(),
            ));
        }
        let (c, _) = self.correlation(temp)?;
        let half = T::lit(0.5);
        Ok([[half, c], [c, half]])
    }

    /// Occupations `(n_+, n_-)` of the `c_+-` modes.
    pub fn occupations(&self, temp: T) -> Result<(T, T), ModelError> {
        self.check(temp)?;
        let half = T::lit(0.5);
        match self.coupling {
            Coupling::Strong => {
                let (c, _) = self.correlation(temp)?;
                Ok((half + c, half - c))
            }
            Coupling::Weak => {
                let n_plus = T::one() / ((-self.t / temp).exp() + T::one());
                Ok((n_plus, T::one() - n_plus))
            }
        }
    }

    /// Single-particle energies `eps_+-` of the reduced state
    /// `exp(-sum eps_s n_s / T) / Z`.
    pub fn mode_energies(&self, temp: T) -> Result<(T, T), ModelError> {
        let (n_plus, n_minus) = self.occupations(temp)?;
        match self.coupling {
            Coupling::Weak => Ok((-self.t, self.t)),
            Coupling::Strong => Ok((
                temp * ((T::one() - n_plus) / n_plus).ln(),
                temp * ((T::one() - n_minus) / n_minus).ln(),
            )),
        }
    }

    pub fn probabilities(&self, temp: T) -> Result<[T; 4], ModelError> {
        self.check(temp)?;
        match self.coupling {
            Coupling::Strong => Ok(probabilities_from_c(self.correlation(temp)?.0)),
            Coupling::Weak => Ok(weak_probabilities(self.t, temp)),
        }
    }

    pub fn qfi(&self, temp: T) -> Result<T, ModelError> {
        self.check(temp)?;
        match (self.coupling, self.covariance_mode) {
            (Coupling::Weak, _) => Ok(qfi_weak(self.t, temp)),
            (Coupling::Strong, CovarianceMode::ClosedForm) => Ok(qfi_strong(self.t, temp)),
            (Coupling::Strong, CovarianceMode::ExactIntegral) => {
                let (c, dc) = correlation_integral(self.t, temp)?;
                Ok(T::lit(2.0) * dc * dc / (T::lit(0.25) - c * c))
            }
        }
    }

    /// Leading low-temperature law of the QFI.
    pub fn qfi_low_t(&self, temp: T) -> T {
        match self.coupling {
            Coupling::Strong => qfi_strong_low_t(self.t, temp),
            Coupling::Weak => qfi_weak_low_t(self.t, temp),
        }
    }

    /// Probabilities and energies of the four occupation outcomes.
    pub fn outcome_data(&self, temp: T) -> Result<OutcomeSpectrum<T>, ModelError> {
        self.check(temp)?;
        let (p, e) = match self.coupling {
            Coupling::Strong => {
                let (c, dc) = self.correlation(temp)?;
                (probabilities_from_c(c), energies_from_c(c, dc, temp))
            }
            Coupling::Weak => (weak_probabilities(self.t, temp), weak_energies(self.t, temp)),
        };
        Ok(OutcomeSpectrum::from_parts(temp, p.to_vec(), e.to_vec()))
    }

    /// Mode-occupation POVM on the 4-dimensional Fock space, `(0, +, -, 2)`.
    pub fn povm(&self) -> Povm<T> {
        TwoSiteFock::new().mode_occupation_povm()
    }

    /// Generator `sum_s eps_s n_s` of the reduced state on the Fock space.
    pub fn reduced_hamiltonian(&self, temp: T) -> Result<HermitianOperator<T>, ModelError> {
        let (eps_plus, eps_minus) = self.mode_energies(temp)?;
        Ok(TwoSiteFock::new().mode_hamiltonian(eps_plus, eps_minus))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::{fisher_information, qfi_diagonal_family, ThermalMeasurement};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn strong() -> TwoSiteSpec<f64> {
        TwoSiteSpec::new(1.0, Coupling::Strong).unwrap()
    }

    fn weak() -> TwoSiteSpec<f64> {
        TwoSiteSpec::new(1.0, Coupling::Weak).unwrap()
    }

    /// The printed closed form, evaluated literally.
    fn qfi_printed(t: f64, temp: f64) -> f64 {
        let x = PI * temp / (2.0 * t);
        let s = x.sinh();
        let num = PI * temp * x.cosh() - 2.0 * t * s;
        num * num / (2.0 * t * t * s * s * (t * t * s * s - temp * temp))
    }

    #[test]
    fn covariance_limits() {
        let cov = strong().covariance(1e-6).unwrap();
        assert_eq!(cov[0][0], 0.5);
        assert!((cov[0][1] - 1.0 / PI).abs() < 1e-10);
        assert!(weak().covariance(0.1).is_err());
    }

    #[test]
    fn covariance_modes_agree_at_low_t() {
        let exact = strong().with_covariance_mode(CovarianceMode::ExactIntegral);
        let a = exact.covariance(0.05).unwrap()[0][1];
        let b = strong().covariance(0.05).unwrap()[0][1];
        assert!((a - b).abs() < 1e-4, "{a} {b}");
        let (_, da) = correlation_integral(1.0f64, 0.05).unwrap();
        let (_, db) = correlation_closed(1.0f64, 0.05);
        assert!((da - db).abs() < 1e-3);
    }

    #[test]
    fn closed_form_derivative_matches_difference() {
        for &temp in &[1e-3, 0.02, 0.2, 1.5] {
            let h = 1e-4 + 1e-5 * temp;
            let fd = (correlation_closed(1.0, temp + h).0 - correlation_closed(1.0, temp - h).0) / (2.0 * h);
            assert_relative_eq!(correlation_closed(1.0, temp).1, fd, max_relative = 1e-6);
        }
    }

    #[test]
    fn strong_qfi_matches_printed_form() {
        for &temp in &[0.01, 0.05, 0.1, 0.2] {
            assert_relative_eq!(qfi_strong(1.0, temp), qfi_printed(1.0, temp), max_relative = 1e-8);
        }
        let f = qfi_strong(1.0, 0.01);
        assert_relative_eq!(f, qfi_strong_low_t(1.0, 0.01), max_relative = 1e-3);
        // non-unit hopping: F is a function of T/t divided by t^2
        assert_relative_eq!(qfi_strong(2.0, 0.02), qfi_strong(1.0, 0.01) / 4.0, max_relative = 1e-12);
    }

    #[test]
    fn weak_qfi_values() {
        assert!((qfi_weak(1.0f64, 1.0) - 0.393_223).abs() < 1e-6);
        assert_relative_eq!(qfi_weak(1.0, 0.02), qfi_weak_low_t(1.0, 0.02), max_relative = 1e-12);
        // the curves cross near T = 0.055 t
        for i in 1..=25 {
            let temp = 0.002 * i as f64;
            assert!(qfi_strong(1.0, temp) >= qfi_weak(1.0, temp), "{temp}");
        }
        assert!(qfi_strong(1.0, 0.06) < qfi_weak(1.0, 0.06));
    }

    #[test]
    fn low_t_probabilities() {
        let p = strong().probabilities(0.01).unwrap();
        let want = [0.148_679, 0.669_630, 0.033_011, 0.148_679];
        for (a, b) in p.iter().zip(want) {
            assert!((a - b).abs() < 1e-4, "{a} {b}");
        }
        let limit = strong_probabilities(1.0, 1e-9);
        assert!((limit[1] - (0.5 + 1.0 / PI).powi(2)).abs() < 1e-12);
        assert!((limit[0] - (0.25 - 1.0 / (PI * PI))).abs() < 1e-12);
    }

    #[test]
    fn weak_outcomes() {
        let os = weak().outcome_data(0.3).unwrap();
        assert_eq!(os.energies, vec![0.0, -1.0, 1.0, 0.0]);
        let q = (1.0f64 / 0.3).cosh();
        assert_relative_eq!(os.probs[0], 1.0 / (2.0 + 2.0 * q), max_relative = 1e-13);
        assert_relative_eq!(fisher_information(&os), qfi_weak(1.0, 0.3), max_relative = 1e-12);
        assert_relative_eq!(os.probs.iter().sum::<f64>(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn strong_energies_match_printed_forms() {
        let temp: f64 = 0.07;
        let x = PI * temp / 2.0;
        let s = x.sinh();
        let num = PI * temp * x.cosh() - 2.0 * s;
        let e0 = temp.powi(3) / s * num / (s * s - temp * temp);
        let ep = -temp * temp / s * num / (s + temp);
        let em = temp * temp / s * num / (s - temp);
        let e = strong_energies(1.0, temp);
        assert_relative_eq!(e[0], e0, max_relative = 1e-9);
        assert_relative_eq!(e[1], ep, max_relative = 1e-9);
        assert_relative_eq!(e[2], em, max_relative = 1e-9);
        assert_eq!(e[0], e[3]);
    }

    #[test]
    fn three_routes_agree() {
        let spec = strong();
        for i in 0..=20 {
            let temp = 1e-3 * (200.0f64).powf(i as f64 / 20.0);
            let closed = spec.qfi(temp).unwrap();
            let fisher = fisher_information(&spec.outcome_data(temp).unwrap());
            let family = qfi_diagonal_family(|x| strong_probabilities(1.0, x).to_vec(), temp, 1e-3 * temp).unwrap();
            assert_relative_eq!(fisher, closed, max_relative = 1e-8);
            assert_relative_eq!(family, closed, max_relative = 1e-6);
        }
    }

    #[test]
    fn fock_space_state_reproduces_outcomes() {
        for spec in [strong(), weak()] {
            let temp = 0.08;
            let h = spec.reduced_hamiltonian(temp).unwrap();
            let m = ThermalMeasurement::new(&spec.povm(), &h).unwrap();
            let p = m.probabilities(temp).unwrap();
            for (a, b) in p.iter().zip(spec.probabilities(temp).unwrap()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        // weak coupling: the reduced state is thermal in its own Hamiltonian
        let h = weak().reduced_hamiltonian(0.2).unwrap();
        let m = ThermalMeasurement::new(&weak().povm(), &h).unwrap();
        assert_relative_eq!(m.qfi(0.2).unwrap(), qfi_weak(1.0, 0.2), max_relative = 1e-10);
    }

    #[test]
    fn exact_integral_qfi_close_to_closed_form() {
        let exact = strong().with_covariance_mode(CovarianceMode::ExactIntegral);
        let a = exact.qfi(0.02).unwrap();
        let b = strong().qfi(0.02).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-3);
    }
}
