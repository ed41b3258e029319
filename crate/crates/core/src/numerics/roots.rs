use super::{Interval, NumericsError, Tolerance};
use crate::Real;

/// Brent's method on a sign-changing bracket.
///
/// Stops when `|f(x)| <= tol.abs` or the bracket half-width drops below
/// `tol.rel * |x|` (with a floor of a few ulps so roots at zero terminate).
pub fn find_root<T, F>(f: F, bracket: Interval<T>, tol: Tolerance<T>) -> Result<T, NumericsError>
where
    T: Real,
    F: Fn(T) -> T,
{
    if !bracket.is_finite() {
        return Err(NumericsError::InvalidInterval {
            lo: bracket.lo.as_f64(),
            hi: bracket.hi.as_f64(),
        });
    }
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let mut a = bracket.lo;
    let mut b = bracket.hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa.is_nan() {
        return Err(NumericsError::NonFinite(a.as_f64()));
    }
    if fb.is_nan() {
        return Err(NumericsError::NonFinite(b.as_f64()));
    }
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(NumericsError::NoSignChange {
            lo: a.as_f64(),
            hi: b.as_f64(),
            f_lo: fa.as_f64(),
            f_hi: fb.as_f64(),
        });
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    // Brent's bookkeeping needs many more steps than bisection counts suggest
    let max_iter = tol.max_iter.max(200);
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = two * T::epsilon() * b.abs() + half * tol.rel * b.abs() + T::min_positive_value();
        let xm = half * (c - b);
        if fb.abs() <= tol.abs || xm.abs() <= tol1 || fb == T::zero() {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * xm * s;
                q = T::one() - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * qa * (qa - r) - (b - a) * (r - T::one()));
                q = (qa - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            }
            p = p.abs();
            let min1 = T::lit(3.0) * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol1 {
            b + d
        } else {
            b + tol1 * xm.signum()
        };
        fb = f(b);
        if fb.is_nan() {
            return Err(NumericsError::NonFinite(b.as_f64()));
        }
    }
    Err(NumericsError::RootNotConverged(max_iter))
}
