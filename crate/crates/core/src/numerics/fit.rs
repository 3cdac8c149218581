use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Fits with a larger (column-scaled) condition number are rejected.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct PowerFit {
    /// One coefficient per requested exponent, in input order.
    pub coeffs: Vec<f64>,
    pub max_residual: f64,
    /// Ratio of extreme singular values of the column-scaled design matrix.
    pub condition_number: f64,
}

impl PowerFit {
    pub fn eval(&self, exponents: &[f64], t: f64) -> f64 {
        self.coeffs.iter().zip(exponents).map(|(c, e)| c * t.powf(*e)).sum()
    }
}

/// Least-squares fit of `y ≈ Σ c_e t^e` over the given exponents.
///
/// Columns are scaled to unit norm and the system is solved by SVD.
pub fn powerbasis_fit(t: &[f64], y: &[f64], exponents: &[f64]) -> Result<PowerFit> {
    if t.len() != y.len() {
        return Err(Error::InvalidParameter(format!(
            "powerbasis_fit: {} abscissae but {} ordinates",
            t.len(),
            y.len()
        )));
    }
    if exponents.is_empty() || t.len() < exponents.len() + 2 {
        return Err(Error::InvalidParameter(format!(
            "powerbasis_fit: need at least {} points for {} exponents, got {}",
            exponents.len() + 2,
            exponents.len(),
            t.len()
        )));
    }
    if let Some(bad) = t.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "powerbasis_fit: abscissae must be positive and finite, got {bad}"
        )));
    }
    if let Some(bad) = y.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "powerbasis_fit: non-finite ordinate {bad}"
        )));
    }
    let m = t.len();
    let n = exponents.len();
    let mut a = DMatrix::from_fn(m, n, |i, j| t[i].powf(exponents[j]));
    let mut scale = vec![0.0; n];
    for (j, sj) in scale.iter_mut().enumerate() {
        let norm = a.column(j).norm();
        *sj = if norm > 0.0 { norm } else { 1.0 };
        a.column_mut(j).scale_mut(1.0 / *sj);
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition_number = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition_number <= MAX_CONDITION) {
        return Err(Error::FitFailure {
            condition: condition_number,
            reason: "ill-conditioned power basis".into(),
        });
    }
    let b = DVector::from_column_slice(y);
    let z = svd.solve(&b, 0.0).map_err(|e| Error::FitFailure {
        condition: condition_number,
        reason: e.to_string(),
    })?;
    let coeffs: Vec<f64> = (0..n).map(|j| z[j] / scale[j]).collect();
    let fitted = &a * &z;
    let max_residual = (0..m).map(|i| (fitted[i] - y[i]).abs()).fold(0.0, f64::max);
    Ok(PowerFit {
        coeffs,
        max_residual,
        condition_number,
    })
}
