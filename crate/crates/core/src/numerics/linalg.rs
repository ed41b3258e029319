use nalgebra::{DMatrix, DVector};

use super::NumericsError;

const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct LstsqSolution {
    pub coeffs: Vec<f64>,
    /// Sum of squared residuals.
    pub residual_ss: f64,
    pub condition: f64,
    /// Per-row residuals `y - A c`.
    pub residuals: Vec<f64>,
    /// Standard error of each coefficient from the residual variance
    /// (zero when the system is square).
    pub std_errors: Vec<f64>,
}

/// Least-squares solve of `A c = y` via SVD. `rows` is the design matrix in
/// row-major form. Fails when the condition number exceeds `1e12`.
pub fn lstsq(rows: &[Vec<f64>], y: &[f64]) -> Result<LstsqSolution, NumericsError> {
    let n = rows.len();
    if n == 0 || n != y.len() {
        return Err(NumericsError::Shape(format!(
            "{} design rows for {} observations",
            n,
            y.len()
        )));
    }
    let p = rows[0].len();
    if p == 0 || rows.iter().any(|r| r.len() != p) {
        return Err(NumericsError::Shape("ragged design matrix".into()));
    }
    if n < p {
        return Err(NumericsError::Shape(format!(
            "{n} observations cannot determine {p} coefficients"
        )));
    }
    let a = DMatrix::from_fn(n, p, |i, j| rows[i][j]);
    let b = DVector::from_column_slice(y);
    let svd = a.clone().svd(true, true);
    let s_max = svd.singular_values.max();
    let s_min = svd.singular_values.min();
    let condition = if s_min > 0.0 { s_max / s_min } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(NumericsError::IllConditioned(condition));
    }
    let c = svd
        .solve(&b, 0.0)
        .map_err(|e| NumericsError::Shape(e.to_string()))?;
    let r = &b - &a * &c;
    let residual_ss = r.norm_squared();
    let sigma2 = if n > p { residual_ss / (n - p) as f64 } else { 0.0 };
    // cov = V diag(1/s^2) V^T sigma^2
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let std_errors = (0..p)
        .map(|j| {
            let var: f64 = (0..p)
                .map(|k| {
                    let s = svd.singular_values[k];
                    v_t[(k, j)] * v_t[(k, j)] / (s * s)
                })
                .sum();
            (var * sigma2).sqrt()
        })
        .collect();
    Ok(LstsqSolution {
        coeffs: c.iter().copied().collect(),
        residual_ss,
        condition,
        residuals: r.iter().copied().collect(),
        std_errors,
    })
}
