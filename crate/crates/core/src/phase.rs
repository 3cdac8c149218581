//! The squared-distance phase `φ_τ(s) = |γ(s) − γ(τ)|²` and its jet at
//! the minimum `s = τ`.

use crate::curve::Vec3;
use crate::curve::{check_embedded, frenet, scan_self_distance, ArcLengthTable, CurveSpec};
use crate::error::{Error, Result};
use crate::numerics::{central_stencil, gauss_legendre, richardson};

/// Gauss–Legendre nodes for the arc-length and excess integrals.
const ORACLE_NODES: usize = 24;

/// `φ_τ^(j)(τ)` for `j = 0..=6`, derivatives in arc length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseJet {
    pub tau: f64,
    pub d: [f64; 7],
    /// Absolute error estimate per entry; zero for the analytic jet.
    pub error: [f64; 7],
}

/// Signed arc-length offset `s − τ` reduced to `(−ℓ/2, ℓ/2]`.
pub fn arc_offset(length: f64, s: f64, tau: f64) -> f64 {
    let mut x = (s - tau) % length;
    if x > 0.5 * length {
        x -= length;
    } else if x <= -0.5 * length {
        x += length;
    }
    x
}

/// `φ_τ` at arc-length offset `x` from `u_tau = u(τ)`.
pub(crate) fn phase_at_offset(curve: &CurveSpec, table: &ArcLengthTable, u_tau: f64, x: f64) -> f64 {
    let delta = table.u_offset(curve, u_tau, x);
    curve.chord(u_tau, delta).norm_squared()
}

pub fn phase(curve: &CurveSpec, table: &ArcLengthTable, s: f64, tau: f64) -> f64 {
    let x = arc_offset(table.length(), s, tau);
    phase_at_offset(curve, table, table.u_of_s(curve, tau), x)
}

/// Jet from the Frenet data at `τ`:
/// `d = (0, 0, 2, 0, −2k², −5∂(k²), −9∂²(k²) + 2‖γ'''‖²)`.
pub fn phase_jet_analytic(curve: &CurveSpec, table: &ArcLengthTable, tau: f64) -> Result<PhaseJet> {
    let f = frenet(curve, table, tau)?;
    let [k2, dk2, ddk2] = f.curvature_jet;
    Ok(PhaseJet {
        tau,
        d: [
            0.0,
            0.0,
            2.0,
            0.0,
            -2.0 * k2,
            -5.0 * dk2,
            -9.0 * ddk2 + 2.0 * f.third_deriv_sq,
        ],
        error: [0.0; 7],
    })
}

/// Arc length `x` of `[u₀, u₀+δ]` and the excess `φ − x²` computed as
/// `−½∬ |T(σ) − T(σ')|² dσ dσ'`, which has no cancellation for small `δ`.
fn arc_and_excess(curve: &CurveSpec, nodes: &[f64], weights: &[f64], u0: f64, delta: f64) -> (f64, f64) {
    let half = 0.5 * delta;
    let mid = u0 + half;
    let samples: Vec<(f64, Vec3)> = nodes
        .iter()
        .map(|z| {
            let v = curve.velocity(mid + half * z);
            let speed = v.norm();
            (speed, v / speed)
        })
        .collect();
    let mut x = 0.0;
    let mut excess = 0.0;
    for (i, (vi, ti)) in samples.iter().enumerate() {
        let wi = weights[i] * half * vi;
        x += wi;
        for (j, (vj, tj)) in samples.iter().enumerate().take(i) {
            excess += wi * weights[j] * half * vj * (ti - tj).norm_squared();
        }
    }
    // Off-diagonal pairs counted once: the ½ cancels the symmetry factor.
    (x, -excess)
}

/// `φ_τ(τ + x)` accurate relative to `φ − x²` rather than to `x²`.
fn phase_oracle(curve: &CurveSpec, nodes: &[f64], weights: &[f64], u_tau: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let mut delta = x / curve.speed(u_tau);
    let mut excess = 0.0;
    for _ in 0..50 {
        let (arc, e) = arc_and_excess(curve, nodes, weights, u_tau, delta);
        excess = e;
        let step = (arc - x) / curve.speed(u_tau + delta);
        delta -= step;
        if step.abs() <= 4.0 * f64::EPSILON * delta.abs() {
            break;
        }
    }
    x * x + excess
}

/// Accuracy order of the centred stencil used for derivative `j`.
fn stencil_accuracy(j: usize) -> usize {
    match j {
        0..=3 => 8,
        4 => 6,
        _ => 4,
    }
}

/// Finite-difference jet of `x ↦ φ_τ(τ + x)` with steps `h` and `h/2`
/// combined by Richardson extrapolation.
pub fn phase_jet_numeric(curve: &CurveSpec, table: &ArcLengthTable, tau: f64, h: f64) -> Result<PhaseJet> {
    if !(1e-4..=1e-2).contains(&h) {
        return Err(Error::InvalidParameter(format!(
            "finite-difference step must lie in [1e-4, 1e-2], got {h}"
        )));
    }
    let u_tau = table.u_of_s(curve, tau);
    let (nodes, weights) = gauss_legendre(ORACLE_NODES);
    let g = |x: f64| phase_oracle(curve, &nodes, &weights, u_tau, x);
    let mut d = [0.0; 7];
    let mut error = [0.0; 7];
    d[0] = g(0.0);
    for j in 1..=6 {
        let acc = stencil_accuracy(j);
        let (half, w) = central_stencil(j, acc);
        let steps = [h, 0.5 * h];
        let values: Vec<f64> = steps
            .iter()
            .map(|&step| {
                let sum: f64 = w
                    .iter()
                    .enumerate()
                    .filter(|(_, wk)| **wk != 0.0)
                    .map(|(k, wk)| wk * g((k as f64 - half as f64) * step))
                    .sum();
                sum / step.powi(j as i32)
            })
            .collect();
        let (limit, err) = richardson(&values, &steps, acc as u32)?;
        d[j] = limit;
        error[j] = err;
    }
    Ok(PhaseJet { tau, d, error })
}

/// Largest arc offset `ε_sep`, certified on a grid of base points, such
/// that `φ_τ` increases on `(τ, τ + ε_sep]` and decreases on
/// `[τ − ε_sep, τ)` for every `τ`.
pub fn separation_margin(curve: &CurveSpec, table: &ArcLengthTable) -> Result<f64> {
    let embedding = check_embedded(curve, table)?;
    let scan = scan_self_distance(curve, table);
    if !(scan.monotone_margin > 0.0) {
        return Err(Error::NotSimple {
            min_distance: embedding.min_self_distance,
        });
    }
    Ok(scan.monotone_margin)
}
