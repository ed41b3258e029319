use super::NumericsError;
use crate::Real;

/// Central difference `(f(x+h) - f(x-h)) / 2h`.
pub fn derivative<T: Real, F: Fn(T) -> T>(f: F, x: T, h: T) -> T {
    (f(x + h) - f(x - h)) / (T::lit(2.0) * h)
}

/// Five-point stencil, `O(h^4)`.
pub fn derivative5<T: Real, F: Fn(T) -> T>(f: F, x: T, h: T) -> T {
    let two_h = T::lit(2.0) * h;
    (f(x - two_h) - T::lit(8.0) * f(x - h) + T::lit(8.0) * f(x + h) - f(x + two_h))
        / (T::lit(12.0) * h)
}

/// Central difference for fallible functions; evaluation errors propagate.
pub fn try_derivative<T, E, F>(f: F, x: T, h: T) -> Result<T, E>
where
    T: Real,
    E: From<NumericsError>,
    F: Fn(T) -> Result<T, E>,
{
    check_step(h)?;
    Ok((f(x + h)? - f(x - h)?) / (T::lit(2.0) * h))
}

pub fn try_derivative5<T, E, F>(f: F, x: T, h: T) -> Result<T, E>
where
    T: Real,
    E: From<NumericsError>,
    F: Fn(T) -> Result<T, E>,
{
    check_step(h)?;
    let two_h = T::lit(2.0) * h;
    let (m2, m1, p1, p2) = (f(x - two_h)?, f(x - h)?, f(x + h)?, f(x + two_h)?);
    Ok((m2 - T::lit(8.0) * m1 + T::lit(8.0) * p1 - p2) / (T::lit(12.0) * h))
}

fn check_step<T: Real>(h: T) -> Result<(), NumericsError> {
    if h > T::zero() && h.is_finite() {
        Ok(())
    } else {
        Err(NumericsError::InvalidStep(h.as_f64()))
    }
}
