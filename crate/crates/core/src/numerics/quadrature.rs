use super::{Interval, NumericsError, Tolerance};
use crate::Real;

// Kronrod abscissae; odd indices are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate<T> {
    pub value: T,
    pub error: T,
    pub subdivisions: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

/// Globally adaptive Gauss–Kronrod (7/15) integration.
///
/// Infinite ranges are mapped onto `[0, 1)`:
/// `[lo, inf)` by `x = lo + u/(1-u)`, `(-inf, hi]` by `x = hi - u/(1-u)`,
/// and the full line by folding `f(x) + f(-x)` onto `[0, inf)` first.
/// `tol.max_iter` bounds the number of bisections.
pub fn quad_adaptive<T, F>(f: F, iv: Interval<T>, tol: Tolerance<T>) -> Result<T, NumericsError>
where
    T: Real,
    F: Fn(T) -> T,
{
    quad_adaptive_with_error(f, iv, tol).map(|q| q.value)
}

pub fn quad_adaptive_with_error<T, F>(
    f: F,
    iv: Interval<T>,
    tol: Tolerance<T>,
) -> Result<QuadEstimate<T>, NumericsError>
where
    T: Real,
    F: Fn(T) -> T,
{
    let one = T::one();
    match (iv.lo.is_finite(), iv.hi.is_finite()) {
        (true, true) => integrate_finite(&f, iv.lo, iv.hi, tol),
        (true, false) => {
            let lo = iv.lo;
            let g = |u: T| {
                let w = one - u;
                let x = lo + u / w;
                if x.is_infinite() {
                    T::zero()
                } else {
                    f(x) / (w * w)
                }
            };
            integrate_finite(&g, T::zero(), one, tol)
        }
        (false, true) => {
            let hi = iv.hi;
            let g = |u: T| {
                let w = one - u;
                let x = hi - u / w;
                if x.is_infinite() {
                    T::zero()
                } else {
                    f(x) / (w * w)
                }
            };
            integrate_finite(&g, T::zero(), one, tol)
        }
        (false, false) => {
            let g = |u: T| {
                let w = one - u;
                let x = u / w;
                if x.is_infinite() {
                    T::zero()
                } else {
                    (f(x) + f(-x)) / (w * w)
                }
            };
            integrate_finite(&g, T::zero(), one, tol)
        }
    }
}

fn integrate_finite<T, F>(
    f: &F,
    a: T,
    b: T,
    tol: Tolerance<T>,
) -> Result<QuadEstimate<T>, NumericsError>
where
    T: Real,
    F: Fn(T) -> T,
{
    let first = kronrod15(f, a, b)?;
    let mut segments = vec![first];
    let mut evaluations = 15;
    let mut subdivisions = 0;
    loop {
        let value: T = segments.iter().map(|s| s.value).sum();
        let error: T = segments.iter().map(|s| s.error).sum();
        let target = tol.abs.max(tol.rel * value.abs());
        if error <= target {
            return Ok(QuadEstimate {
                value,
                error,
                subdivisions,
                evaluations,
            });
        }
        if subdivisions >= tol.max_iter {
            return Err(NumericsError::QuadratureNotConverged {
                subdivisions,
                estimate: value.as_f64(),
                error: error.as_f64(),
            });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |acc, (i, s)| {
                if s.error > acc.1 {
                    (i, s.error)
                } else {
                    acc
                }
            });
        let seg = segments.swap_remove(worst);
        let mid = (seg.a + seg.b) / T::lit(2.0);
        if !(mid > seg.a && mid < seg.b) {
            // interval cannot be split further in this precision
            return Err(NumericsError::QuadratureNotConverged {
                subdivisions,
                estimate: value.as_f64(),
                error: error.as_f64(),
            });
        }
        segments.push(kronrod15(f, seg.a, mid)?);
        segments.push(kronrod15(f, mid, seg.b)?);
        evaluations += 30;
        subdivisions += 1;
    }
}

fn kronrod15<T, F>(f: &F, a: T, b: T) -> Result<Segment<T>, NumericsError>
where
    T: Real,
    F: Fn(T) -> T,
{
    let center = (a + b) / T::lit(2.0);
    let half = (b - a) / T::lit(2.0);
    let eval = |x: T| {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(NumericsError::NonFinite(x.as_f64()))
        }
    };

    let fc = eval(center)?;
    let mut res_k = fc * T::lit(WGK[7]);
    let mut res_g = fc * T::lit(WG[3]);
    let mut res_abs = fc.abs() * T::lit(WGK[7]);
    let mut fvals = [(T::zero(), T::zero()); 7];
    for (j, slot) in fvals.iter_mut().enumerate() {
        let dx = half * T::lit(XGK[j]);
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        *slot = (f1, f2);
        let w = T::lit(WGK[j]);
        res_k = res_k + w * (f1 + f2);
        res_abs = res_abs + w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = res_k / T::lit(2.0);
    let mut res_asc = T::lit(WGK[7]) * (fc - mean).abs();
    for (j, (f1, f2)) in fvals.iter().enumerate() {
        res_asc = res_asc + T::lit(WGK[j]) * ((*f1 - mean).abs() + (*f2 - mean).abs());
    }

    let h = half.abs();
    let value = res_k * half;
    res_abs = res_abs * h;
    res_asc = res_asc * h;
    let mut error = ((res_k - res_g) * half).abs();
    // QUADPACK error scaling
    if res_asc != T::zero() && error != T::zero() {
        let scale = (T::lit(200.0) * error / res_asc).powf(T::lit(1.5));
        error = res_asc * scale.min(T::one());
    }
    let round_off = T::lit(50.0) * T::epsilon() * res_abs;
    if res_abs > T::min_positive_value() / (T::lit(50.0) * T::epsilon()) {
        error = error.max(round_off);
    }
    Ok(Segment {
        a,
        b,
        value,
        error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{derivative5, gamma_fn, riemann_zeta};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn tight() -> Tolerance<f64> {
        Tolerance::new(1e-12, 1e-14, 400).unwrap()
    }

    #[test]
    fn unit_integrand() {
        let v: f64 = quad_adaptive(|_| 1.0, Interval::new(0.0, 1.0).unwrap(), Tolerance::default()).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sinh_moment_matches_closed_form() {
        // int_0^inf x^{d/2+1} / sinh^2 x = 2^{-d/2} Gamma(d/2+2) zeta(d/2+1), d = 2
        let f = |x: f64| if x == 0.0 { 1.0 } else { x * x / x.sinh().powi(2) };
        let v = quad_adaptive(f, Interval::half_infinite(0.0).unwrap(), tight()).unwrap();
        let closed = 0.5 * gamma_fn(3.0).unwrap() * riemann_zeta(2.0).unwrap();
        assert!((v - closed).abs() < 1e-11, "{v} vs {closed}");
        assert!((v - PI * PI / 6.0).abs() < 1e-11);
    }

    #[test]
    fn cosh_moment_on_full_line() {
        let f = |x: f64| {
            let s = 1.0 / x.cosh();
            x * x * s * s
        };
        let iv = Interval::new(f64::NEG_INFINITY, f64::INFINITY).unwrap();
        let v = quad_adaptive(f, iv, tight()).unwrap();
        assert!((v - PI * PI / 6.0).abs() < 1e-11, "{v}");
    }

    #[test]
    fn lower_infinite_limit() {
        let v = quad_adaptive(f64::exp, Interval::new(f64::NEG_INFINITY, 0.0).unwrap(), tight()).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        let v = quad_adaptive(|x: f64| 1.0 / x.sqrt(), Interval::new(0.0, 1.0).unwrap(), tight()).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn reports_non_convergence() {
        let tol = Tolerance::new(1e-14, 0.0, 2).unwrap();
        let r = quad_adaptive(|x: f64| (50.0 * x).sin().abs(), Interval::new(0.0, 10.0).unwrap(), tol);
        assert!(matches!(r, Err(NumericsError::QuadratureNotConverged { .. })));
    }

    #[test]
    fn antiderivative_differentiates_back() {
        let g = |x: f64| (x * x).cos() + x;
        let big_g = |x: f64| quad_adaptive(g, Interval::new(0.0, x).unwrap(), tight()).unwrap();
        for &x in &[0.3, 0.9, 1.7] {
            let d = derivative5(big_g, x, 1e-3);
            assert!((d - g(x)).abs() < 1e-6);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn additivity(a in -3.0f64..0.0, w1 in 0.1f64..3.0, w2 in 0.1f64..3.0, k in 0.5f64..4.0) {
            let f = |x: f64| (k * x).sin() * (-x * x / 4.0).exp() + 1.0 / (1.0 + x * x);
            let tol = Tolerance::new(1e-10, 1e-12, 200).unwrap();
            let (b, c) = (a + w1, a + w1 + w2);
            let ab = quad_adaptive_with_error(f, Interval::new(a, b).unwrap(), tol).unwrap();
            let bc = quad_adaptive_with_error(f, Interval::new(b, c).unwrap(), tol).unwrap();
            let ac = quad_adaptive_with_error(f, Interval::new(a, c).unwrap(), tol).unwrap();
            let budget = |q: &QuadEstimate<f64>| tol.abs.max(tol.rel * q.value.abs());
            let allowed = 2.0 * (budget(&ab) + budget(&bc) + budget(&ac));
            prop_assert!((ab.value + bc.value - ac.value).abs() <= allowed);
        }
    }
}
