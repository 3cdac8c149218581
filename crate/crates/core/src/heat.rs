//! Direct evaluation of the heat content
//! `H_S(t) = ℓ⁻²(4πt)^{−3/2} ∬ e^{−|γ(s)−γ(τ)|²/4t} ds dτ`.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use crate::curve::{check_embedded, scan_self_distance, ArcLengthTable, CurveSpec};
use crate::error::{Error, Result};
use crate::numerics::{
    adaptive_piecewise, bessel_i0_scaled, geometric_grid, pairwise_sum, periodic_trapezoid_samples, powerbasis_fit,
    Integral, QuadratureConfig,
};

/// Outer trapezoid nodes in arc length.
pub const OUTER_NODES: usize = 512;
/// Half-width of the near-diagonal window in units of `2√t`.
pub const V_CUT: f64 = 8.0;
/// Exponent beyond which the off-diagonal part is dropped.
const TAIL_EXPONENT: f64 = 45.0;

/// Exact heat content of the circle of radius `R`:
/// `(4πt)^{−3/2} e^{−R²/2t} I₀(R²/2t)`.
pub fn circle_closed_form(radius: f64, t: f64) -> f64 {
    (4.0 * PI * t).powf(-1.5) * bessel_i0_scaled(radius * radius / (2.0 * t))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalGrid {
    pub t_values: Vec<f64>,
    pub quad: QuadratureConfig,
}

impl EvalGrid {
    pub fn new(t_values: Vec<f64>, quad: QuadratureConfig) -> Result<Self> {
        if t_values.is_empty() {
            return Err(Error::InvalidParameter("empty time grid".into()));
        }
        if let Some(t) = t_values.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
            return Err(Error::InvalidParameter(format!("times must be positive, got {t}")));
        }
        let inc = t_values.windows(2).all(|w| w[1] > w[0]);
        let dec = t_values.windows(2).all(|w| w[1] < w[0]);
        if !(inc || dec) {
            return Err(Error::InvalidParameter("time grid must be strictly monotone".into()));
        }
        quad.validate()?;
        Ok(Self { t_values, quad })
    }

    pub fn geometric(lo: f64, hi: f64, n: usize, quad: QuadratureConfig) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && n >= 2) {
            return Err(Error::InvalidParameter(format!(
                "geometric grid needs 0 < lo < hi and n >= 2, got ({lo}, {hi}, {n})"
            )));
        }
        Self::new(geometric_grid(lo, hi, n), quad)
    }
}

/// Geometry shared by evaluations at several times.
#[derive(Debug, Clone, Copy)]
struct TailData {
    far_min_sq: f64,
    margin: f64,
}

fn tail_data(curve: &CurveSpec, table: &ArcLengthTable) -> Result<TailData> {
    check_embedded(curve, table)?;
    let scan = scan_self_distance(curve, table);
    Ok(TailData {
        far_min_sq: scan.far_min_sq,
        margin: scan.monotone_margin,
    })
}

pub fn heat_content_direct(
    curve: &CurveSpec,
    table: &ArcLengthTable,
    t: f64,
    quad: &QuadratureConfig,
) -> Result<Integral> {
    let tail = tail_data(curve, table)?;
    heat_content_impl(curve, table, t, quad, tail, false)
}

/// Evaluates `H_S` on every time of the grid; results are in grid order.
pub fn heat_content_grid(curve: &CurveSpec, table: &ArcLengthTable, grid: &EvalGrid) -> Result<Vec<Integral>> {
    let tail = tail_data(curve, table)?;
    grid.t_values
        .iter()
        .map(|&t| heat_content_impl(curve, table, t, &grid.quad, tail, false))
        .collect()
}

/// Same value from the half domain `s > τ`, doubled.
pub fn heat_content_direct_half(
    curve: &CurveSpec,
    table: &ArcLengthTable,
    t: f64,
    quad: &QuadratureConfig,
) -> Result<Integral> {
    let tail = tail_data(curve, table)?;
    heat_content_impl(curve, table, t, quad, tail, true)
}

fn heat_content_impl(
    curve: &CurveSpec,
    table: &ArcLengthTable,
    t: f64,
    quad: &QuadratureConfig,
    tail: TailData,
    one_sided: bool,
) -> Result<Integral> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
    }
    quad.validate()?;
    let l = table.length();
    let h = l / OUTER_NODES as f64;
    let inner: Vec<Result<Integral>> = (0..OUTER_NODES)
        .into_par_iter()
        .map(|i| inner_integral(curve, table, h * i as f64, t, quad, tail, one_sided))
        .collect();
    let inner: Vec<Integral> = inner.into_iter().collect::<Result<_>>()?;
    let values: Vec<f64> = inner.iter().map(|r| r.value).collect();
    let errors: Vec<f64> = inner.iter().map(|r| r.error).collect();
    let outer = periodic_trapezoid_samples(&values, l);
    let scale = (4.0 * PI * t).powf(-1.5) / (l * l);
    let inner_err = pairwise_sum(&errors) * h;
    Ok(Integral::new(outer.value * scale, (outer.error + inner_err) * scale))
}

/// `∫ e^{−φ_τ(s)/4t} ds` over one period, in the Fourier parameter.
fn inner_integral(
    curve: &CurveSpec,
    table: &ArcLengthTable,
    tau: f64,
    t: f64,
    quad: &QuadratureConfig,
    tail: TailData,
    one_sided: bool,
) -> Result<Integral> {
    let l = table.length();
    let u0 = table.u_of_s(curve, tau);
    let f = |d: f64| (-curve.chord(u0, d).norm_squared() / (4.0 * t)).exp() * curve.speed(u0 + d);
    let window = 2.0 * V_CUT * t.sqrt();
    let mut near = Vec::new();
    let (lo, hi) = if window < 0.5 * l {
        let lo = table.u_offset(curve, u0, -window);
        let hi = table.u_offset(curve, u0, window);
        (lo, hi)
    } else {
        (-PI, PI)
    };
    let window_u = hi.min(-lo);
    let scale = (2.0 * t.sqrt() / curve.speed(u0)).min(window_u);
    let candidates: &[f64] = if one_sided {
        &[scale, 2.0 * scale]
    } else {
        &[-2.0 * scale, -scale, 0.0, scale, 2.0 * scale]
    };
    let start = if one_sided { 0.0 } else { lo };
    near.push(start);
    near.extend(candidates.iter().copied().filter(|&x| x > start && x < hi));
    near.push(hi);
    let mut total = adaptive_piecewise(f, &near, quad)?;
    if window >= 0.5 * l {
        if one_sided {
            total.value *= 2.0;
            total.error *= 2.0;
        }
        return Ok(total);
    }
    // Off-diagonal part: skipped when certified negligible.
    let edge_sq = curve
        .chord(u0, lo)
        .norm_squared()
        .min(curve.chord(u0, hi).norm_squared());
    let inside_margin = window <= tail.margin;
    let floor = edge_sq.min(tail.far_min_sq);
    if inside_margin && floor / (4.0 * t) > TAIL_EXPONENT {
        let bound = l * (-floor / (4.0 * t)).exp();
        if one_sided {
            total.value *= 2.0;
            total.error *= 2.0;
        }
        total.error += bound;
        return Ok(total);
    }
    let (a, b) = if one_sided { (hi, PI) } else { (hi, TAU + lo) };
    let vmax = curve.speed(u0).max(1e-300);
    let panels = (((b - a) * vmax / (2.0 * t.sqrt())).ceil() as usize).clamp(1, 4096);
    let breaks: Vec<f64> = (0..=panels).map(|k| a + (b - a) * k as f64 / panels as f64).collect();
    let far = adaptive_piecewise(f, &breaks, quad)?;
    total.value += far.value;
    total.error += far.error;
    if one_sided {
        total.value *= 2.0;
        total.error *= 2.0;
    }
    Ok(total)
}

/// Fitted `(α̂₀, α̂₁, α̂₂)` of `H(t)·4πtℓ²`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionFit {
    pub alphas: [f64; 3],
    pub max_residual: f64,
    pub condition_number: f64,
}

pub fn fit_expansion(curve: &CurveSpec, table: &ArcLengthTable, grid: &EvalGrid) -> Result<ExpansionFit> {
    let values = heat_content_grid(curve, table, grid)?;
    let l = table.length();
    let y: Vec<f64> = grid
        .t_values
        .iter()
        .zip(&values)
        .map(|(t, h)| h.value * 4.0 * PI * t * l * l)
        .collect();
    let fit = powerbasis_fit(&grid.t_values, &y, &[0.0, 1.0, 2.0])?;
    Ok(ExpansionFit {
        alphas: [fit.coeffs[0], fit.coeffs[1], fit.coeffs[2]],
        max_residual: fit.max_residual,
        condition_number: fit.condition_number,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{make_builtin, CurveFamily};

    fn setup(family: CurveFamily, params: &[f64]) -> (CurveSpec, ArcLengthTable) {
        let c = make_builtin(family, params).unwrap();
        let t = ArcLengthTable::build(&c, 512).unwrap();
        (c, t)
    }

    fn quad() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn closed_form_values() {
        let v = circle_closed_form(1.0, 0.1);
        assert!((v - 0.130_3).abs() < 1e-3, "{v}");
        let a = circle_closed_form(2.0, 0.4);
        assert!((a - circle_closed_form(1.0, 0.1) / 8.0).abs() < 1e-15);
        let t = 0.001;
        let lead = 1.0 / (TAU * 4.0 * PI * t);
        assert!((circle_closed_form(1.0, t) / lead - 1.0).abs() < 3e-4);
    }

    #[test]
    fn circle_direct_matches_closed_form() {
        let (c, tb) = setup(CurveFamily::Circle, &[1.0]);
        for t in [1e-4, 1e-3, 0.1, 1.0, 10.0] {
            let h = heat_content_direct(&c, &tb, t, &quad()).unwrap();
            let want = circle_closed_form(1.0, t);
            assert!(((h.value - want) / want).abs() < 1e-8, "t={t}: {} vs {want}", h.value);
            assert!(h.error >= 0.0);
        }
    }

    #[test]
    fn half_domain_doubling() {
        let (c, tb) = setup(CurveFamily::Trefoil, &[2.0, 1.0]);
        for t in [1e-3, 0.3] {
            let full = heat_content_direct(&c, &tb, t, &quad()).unwrap().value;
            let half = heat_content_direct_half(&c, &tb, t, &quad()).unwrap().value;
            assert!(((full - half) / full).abs() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn scaling_law() {
        let (c, tb) = setup(CurveFamily::Ellipse, &[2.0, 1.0]);
        let c2 = c.scaled(2.0);
        let tb2 = ArcLengthTable::build(&c2, 512).unwrap();
        let h1 = heat_content_direct(&c, &tb, 0.05, &quad()).unwrap().value;
        let h2 = heat_content_direct(&c2, &tb2, 0.2, &quad()).unwrap().value;
        assert!((h2 / (h1 / 8.0) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn small_time_limit() {
        for (c, tb) in [
            setup(CurveFamily::Circle, &[1.0]),
            setup(CurveFamily::Ellipse, &[2.0, 1.0]),
        ] {
            let t = 1e-5;
            let l = tb.length();
            let h = heat_content_direct(&c, &tb, t, &quad()).unwrap().value;
            assert!((h * 4.0 * PI * t * l * l / l - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn estimate_shrinks_with_tolerance() {
        let (c, tb) = setup(CurveFamily::Ellipse, &[2.0, 1.0]);
        let loose = heat_content_direct(&c, &tb, 0.01, &QuadratureConfig::new(1e-8, 1e-6)).unwrap();
        let tight = heat_content_direct(&c, &tb, 0.01, &QuadratureConfig::new(1e-10, 1e-8)).unwrap();
        assert!(tight.error * 10.0 <= loose.error, "{} vs {}", tight.error, loose.error);
    }

    #[test]
    fn rejects_nonpositive_time() {
        let (c, tb) = setup(CurveFamily::Circle, &[1.0]);
        assert!(heat_content_direct(&c, &tb, 0.0, &quad()).is_err());
        assert!(EvalGrid::new(vec![1.0, 0.5, 2.0], quad()).is_err());
        assert!(EvalGrid::new(vec![-1.0, 0.5], quad()).is_err());
    }

    #[test]
    fn deterministic() {
        let (c, tb) = setup(CurveFamily::Trefoil, &[2.0, 1.0]);
        let a = heat_content_direct(&c, &tb, 0.01, &quad()).unwrap();
        let b = heat_content_direct(&c, &tb, 0.01, &quad()).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.error.to_bits(), b.error.to_bits());
    }

    #[test]
    fn circle_fit() {
        let (c, tb) = setup(CurveFamily::Circle, &[1.0]);
        let grid = EvalGrid::geometric(1e-4, 1e-2, 12, quad()).unwrap();
        let f = fit_expansion(&c, &tb, &grid).unwrap();
        assert!((f.alphas[0] / TAU - 1.0).abs() < 1e-3);
        assert!((f.alphas[1] / f.alphas[0] - 0.25).abs() < 0.0025);
    }
}
