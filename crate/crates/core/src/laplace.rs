//! Laplace-method coefficients of `I_τ(λ) = ∫ e^{−λ φ_τ(s)} ds` and the
//! small-time series of the heat content assembled from them.
//!
//! Coefficients follow the convention
//! `I_τ(λ) ~ Σ_i Γ((i+1)/2) a_i λ^{−(i+1)/2}`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::curve::{frenet, make_builtin, ArcLengthTable, CurveFamily, CurveSpec, FrenetData};
use crate::error::{Error, Result};
use crate::heat::circle_closed_form;
use crate::numerics::{
    adaptive_piecewise, geometric_grid, periodic_trapezoid_samples, powerbasis_fit, Integral, QuadratureConfig,
};

/// Number of arc-length nodes used to integrate `a_{2i}` over the curve.
pub const SERIES_NODES: usize = 512;
/// Default tolerance for snapping calibrated constants to rationals.
pub const CALIBRATION_TOLERANCE: f64 = 1e-4;
/// Largest denominator accepted when snapping a constant.
pub const MAX_DENOMINATOR: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceCoeffs {
    pub tau: f64,
    pub a0: f64,
    pub a2: f64,
    pub a4: f64,
}

/// Even coefficients from Frenet data.
///
/// `a₄ = (36∂²(k²) + 35k⁴ − 8‖γ'''‖²)/1152`. The curvature term must be
/// quartic for `a₄` to scale like length⁻⁴; with it the circle gives
/// `a₄ = 3/128`, the value forced by `e^{−2λ}I₀(2λ)`.
pub fn laplace_coeffs_from_frenet(f: &FrenetData) -> LaplaceCoeffs {
    let [k2, _, ddk2] = f.curvature_jet;
    LaplaceCoeffs {
        tau: f.s,
        a0: 1.0,
        a2: k2 / 8.0,
        a4: (36.0 * ddk2 + 35.0 * k2 * k2 - 8.0 * f.third_deriv_sq) / 1152.0,
    }
}

pub fn laplace_coeffs(curve: &CurveSpec, table: &ArcLengthTable, tau: f64) -> Result<LaplaceCoeffs> {
    Ok(laplace_coeffs_from_frenet(&frenet(curve, table, tau)?))
}

/// `I_τ(λ)` by adaptive quadrature over one full period, in the Fourier
/// parameter centred at `u(τ)`.
pub fn laplace_integral_numeric(curve: &CurveSpec, table: &ArcLengthTable, tau: f64, lambda: f64) -> Result<Integral> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let u_tau = table.u_of_s(curve, tau);
    let w = (8.0 / (lambda.sqrt() * curve.speed(u_tau))).min(0.5 * PI);
    let breaks = [-PI, -2.0 * w, -w, 0.0, w, 2.0 * w, PI];
    let cfg = QuadratureConfig::new(1e-13, 1e-14);
    adaptive_piecewise(
        |d| (-lambda * curve.chord(u_tau, d).norm_squared()).exp() * curve.speed(u_tau + d),
        &breaks,
        &cfg,
    )
}

/// Coefficients recovered from samples of `I_τ(λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceFit {
    pub a0: f64,
    pub a2: f64,
    pub a4: f64,
    pub max_residual: f64,
    pub condition_number: f64,
}

/// Fit of `I_τ(λ)·√(λ/π)` in powers of `1/λ`.
///
/// `I√(λ/π) = a₀ + (a₂/2)λ⁻¹ + (3a₄/4)λ⁻² + …`; a `λ⁻³` column absorbs
/// the next term and is discarded.
pub fn extract_coeffs_bruteforce(
    curve: &CurveSpec,
    table: &ArcLengthTable,
    tau: f64,
    lambdas: &[f64],
) -> Result<LaplaceFit> {
    let (x, y) = scaled_samples(curve, table, tau, lambdas)?;
    let fit = powerbasis_fit(&x, &y, &[0.0, 1.0, 2.0, 3.0])?;
    Ok(LaplaceFit {
        a0: fit.coeffs[0],
        a2: 2.0 * fit.coeffs[1],
        a4: 4.0 / 3.0 * fit.coeffs[2],
        max_residual: fit.max_residual,
        condition_number: fit.condition_number,
    })
}

/// Odd coefficients `(â₁, â₃)` from a fit that also allows half-integer
/// powers of `1/λ`; they vanish for an interior nondegenerate minimum.
pub fn extract_odd_coeffs(curve: &CurveSpec, table: &ArcLengthTable, tau: f64, lambdas: &[f64]) -> Result<(f64, f64)> {
    let (x, y) = scaled_samples(curve, table, tau, lambdas)?;
    let fit = powerbasis_fit(&x, &y, &[0.0, 0.5, 1.0, 1.5, 2.0])?;
    let sqrt_pi = PI.sqrt();
    Ok((sqrt_pi * fit.coeffs[1], sqrt_pi * fit.coeffs[3]))
}

fn scaled_samples(
    curve: &CurveSpec,
    table: &ArcLengthTable,
    tau: f64,
    lambdas: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    if lambdas.len() < 6 {
        return Err(Error::InvalidParameter(format!(
            "need at least 6 values of lambda, got {}",
            lambdas.len()
        )));
    }
    let mut x = Vec::with_capacity(lambdas.len());
    let mut y = Vec::with_capacity(lambdas.len());
    for &l in lambdas {
        let i = laplace_integral_numeric(curve, table, tau, l)?;
        x.push(1.0 / l);
        y.push(i.value * (l / PI).sqrt());
    }
    Ok((x, y))
}

/// `2^{2i−1}(2i+1)`, reported next to the calibrated constants.
pub fn power_of_two_constant(i: usize) -> f64 {
    2f64.powi(2 * i as i32 - 1) * (2 * i + 1) as f64
}

/// Small-time series `H(t) ≈ (1/ℓ²)(4πt)⁻¹ Σ α_i tⁱ`, `α_i = C_i ∫a_{2i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatSeries {
    pub length: f64,
    pub alphas: Vec<f64>,
    /// `∫₀^ℓ a_{2i}(τ) dτ`.
    pub integrals: Vec<f64>,
    pub constants: Vec<f64>,
}

impl HeatSeries {
    pub fn eval(&self, t: f64) -> f64 {
        let poly: f64 = self.alphas.iter().rev().fold(0.0, |acc, a| acc * t + a);
        poly / (self.length * self.length * 4.0 * PI * t)
    }
}

/// `∫₀^ℓ (a₀, a₂, a₄) dτ` by the periodic trapezoid rule in arc length.
pub fn coefficient_integrals(curve: &CurveSpec, table: &ArcLengthTable) -> Result<[Integral; 3]> {
    let l = table.length();
    let h = l / SERIES_NODES as f64;
    let mut cols = [
        Vec::with_capacity(SERIES_NODES),
        Vec::with_capacity(SERIES_NODES),
        Vec::with_capacity(SERIES_NODES),
    ];
    for i in 0..SERIES_NODES {
        let c = laplace_coeffs(curve, table, h * i as f64)?;
        cols[0].push(c.a0);
        cols[1].push(c.a2);
        cols[2].push(c.a4);
    }
    Ok(cols.map(|c| periodic_trapezoid_samples(&c, l)))
}

/// Series of order `order ≤ 2` with the calibrated constants.
pub fn heat_series(curve: &CurveSpec, table: &ArcLengthTable, order: usize) -> Result<HeatSeries> {
    let constants = calibrated_constants()?;
    heat_series_with_constants(curve, table, order, &constants)
}

pub fn heat_series_with_constants(
    curve: &CurveSpec,
    table: &ArcLengthTable,
    order: usize,
    constants: &[f64; 3],
) -> Result<HeatSeries> {
    if order > 2 {
        return Err(Error::InvalidParameter(format!(
            "series order must be at most 2, got {order}"
        )));
    }
    let ints = coefficient_integrals(curve, table)?;
    let integrals: Vec<f64> = ints.iter().take(order + 1).map(|i| i.value).collect();
    let constants: Vec<f64> = constants[..=order].to_vec();
    Ok(HeatSeries {
        length: table.length(),
        alphas: integrals.iter().zip(&constants).map(|(a, c)| a * c).collect(),
        integrals,
        constants,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    /// Snapped rational values.
    pub constants: [f64; 3],
    /// Raw fitted values before snapping.
    pub raw: [f64; 3],
    /// Maximum fit residual relative to `α₀`.
    pub relative_residual: f64,
}

/// Closest `p/q` with `q ≤ MAX_DENOMINATOR` within `tolerance` of `x`.
pub fn snap_rational(x: f64, tolerance: f64) -> Option<f64> {
    (1..=MAX_DENOMINATOR)
        .map(|q| (x * q as f64).round() / q as f64)
        .filter(|r| (r - x).abs() <= tolerance)
        .min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs()))
}

/// Calibration on the circle of radius 1.
pub fn calibrate_constants(tolerance: f64) -> Result<Calibration> {
    calibrate_for_radius(1.0, tolerance)
}

/// Fits `H(t)·4πtℓ²` of the circle closed form on `t ∈ R²·[1e−4, 1e−2]`
/// and divides by `∫a_{2i}` computed from the curve geometry. Terms in
/// `t³` to `t⁶` are fitted as nuisance parameters.
pub fn calibrate_for_radius(radius: f64, tolerance: f64) -> Result<Calibration> {
    let curve = make_builtin(CurveFamily::Circle, &[radius])?;
    let table = ArcLengthTable::build(&curve, 1024)?;
    let l = table.length();
    let ints = coefficient_integrals(&curve, &table)?;
    let r2 = radius * radius;
    let t = geometric_grid(1e-4 * r2, 1e-2 * r2, 40);
    let y: Vec<f64> = t
        .iter()
        .map(|&t| circle_closed_form(radius, t) * 4.0 * PI * t * l * l)
        .collect();
    let fit = powerbasis_fit(&t, &y, &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
        .map_err(|e| Error::CalibrationFailure(format!("fit failed: {e}")))?;
    let relative_residual = fit.max_residual / fit.coeffs[0].abs();
    if !(relative_residual <= tolerance) {
        return Err(Error::CalibrationFailure(format!(
            "relative fit residual {relative_residual:e} exceeds {tolerance:e}"
        )));
    }
    let mut raw = [0.0; 3];
    let mut constants = [0.0; 3];
    for i in 0..3 {
        raw[i] = fit.coeffs[i] / ints[i].value;
        constants[i] = snap_rational(raw[i], tolerance).ok_or_else(|| {
            Error::CalibrationFailure(format!(
                "C_{i} = {} is not within {tolerance:e} of a rational with denominator <= {MAX_DENOMINATOR}",
                raw[i]
            ))
        })?;
    }
    Ok(Calibration {
        constants,
        raw,
        relative_residual,
    })
}

static CALIBRATION: OnceLock<Result<Calibration>> = OnceLock::new();

/// Calibration at the default tolerance, computed once per process.
pub fn calibration() -> Result<&'static Calibration> {
    CALIBRATION
        .get_or_init(|| calibrate_constants(CALIBRATION_TOLERANCE))
        .as_ref()
        .map_err(Clone::clone)
}

pub fn calibrated_constants() -> Result<[f64; 3]> {
    calibration().map(|c| c.constants)
}
