//! Frenet tubes `S_ε = {γ(s) + r(cosθ N(s) + sinθ B(s)) : r < ε}` and the
//! normalized heat content
//! `H^ε(t) = |S_ε|⁻² ∫_{S_ε}∫_{S_ε} (4πt)^{−3/2} e^{−|x−y|²/4t} dx dy`.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use crate::curve::{check_embedded, frenet, frenet_at_u, ArcLengthTable, CurveSpec, FrenetData, Vec3};
use crate::error::{Error, Result};
use crate::numerics::{
    adaptive_1d, gauss_legendre_interval, pairwise_sum, powerbasis_fit, Integral, QuadratureConfig, ShiftedHalton,
};

/// Largest admissible `ε·max k`.
pub const CURVATURE_LIMIT: f64 = 0.99;
/// The boundary backend switches to its local form when `√t ≤ ε/LOCAL_RATIO`.
pub const LOCAL_RATIO: f64 = 6.5;
/// `tube_expansion_check` requires `√t ≤ ε/EXPANSION_RATIO`.
pub const EXPANSION_RATIO: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TubeBackend {
    /// Tensor-product rule in `(s, r, θ)` for both points.
    Product,
    /// Shifted Halton points in the 6-D cube, with replicas.
    Qmc,
    /// Reduction to a double integral over the tube surface.
    Boundary,
}

impl std::str::FromStr for TubeBackend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "product" => Ok(TubeBackend::Product),
            "qmc" => Ok(TubeBackend::Qmc),
            "boundary" => Ok(TubeBackend::Boundary),
            other => Err(Error::InvalidParameter(format!("unknown tube backend '{other}'"))),
        }
    }
}

impl std::fmt::Display for TubeBackend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TubeBackend::Product => "product",
            TubeBackend::Qmc => "qmc",
            TubeBackend::Boundary => "boundary",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TubeSpec {
    pub eps: f64,
    pub n_s: usize,
    pub n_r: usize,
    pub n_theta: usize,
    pub samples: usize,
    pub replicas: usize,
    pub seed: u64,
    pub backend: TubeBackend,
}

impl TubeSpec {
    pub fn new(eps: f64) -> Self {
        Self {
            eps,
            n_s: 64,
            n_r: 8,
            n_theta: 16,
            samples: 1 << 16,
            replicas: 8,
            seed: 0,
            backend: TubeBackend::Product,
        }
    }

    pub fn with_backend(mut self, backend: TubeBackend) -> Self {
        self.backend = backend;
        self
    }

    pub fn validate(&self, curve: &CurveSpec, table: &ArcLengthTable) -> Result<()> {
        check_radius(curve, table, self.eps)?;
        if self.n_s < 8
            || !self.n_s.is_multiple_of(2)
            || self.n_theta < 4
            || !self.n_theta.is_multiple_of(2)
            || self.n_r < 2
        {
            return Err(Error::InvalidParameter(format!(
                "product grid needs even n_s >= 8, even n_theta >= 4, n_r >= 2; got ({}, {}, {})",
                self.n_s, self.n_r, self.n_theta
            )));
        }
        if self.replicas < 2 || self.samples < self.replicas * 16 {
            return Err(Error::InvalidParameter(format!(
                "qmc needs at least 2 replicas and 16 samples per replica; got {} samples, {} replicas",
                self.samples, self.replicas
            )));
        }
        Ok(())
    }
}

/// `min(ε₀, 0.99/max k)`.
pub fn admissible_radius(curve: &CurveSpec, table: &ArcLengthTable) -> Result<f64> {
    let e = check_embedded(curve, table)?;
    Ok(e.reach_bound.min(CURVATURE_LIMIT / e.max_curvature))
}

fn check_radius(curve: &CurveSpec, table: &ArcLengthTable, eps: f64) -> Result<()> {
    let limit = admissible_radius(curve, table)?;
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "tube radius must be positive, got {eps}"
        )));
    }
    if eps >= limit {
        return Err(Error::TubeTooWide { eps, limit });
    }
    Ok(())
}

fn offset(f: &FrenetData, r: f64, theta: f64) -> Vec3 {
    let (s, c) = theta.sin_cos();
    (f.normal * c + f.binormal * s) * r
}

pub fn tube_point(curve: &CurveSpec, table: &ArcLengthTable, s: f64, r: f64, theta: f64) -> Result<Vec3> {
    let f = frenet(curve, table, s)?;
    Ok(f.point + offset(&f, r, theta))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeMeasures {
    /// `πε²ℓ`.
    pub vol: f64,
    /// `2πεℓ`.
    pub surf: f64,
    /// Quadrature of `r(1 − rk cosθ)` over the tube.
    pub vol_quadrature: f64,
    /// Quadrature of `ε(1 − εk cosθ)` over the boundary.
    pub surf_quadrature: f64,
}

/// Curvature on a uniform arc-length grid.
fn curvature_samples(curve: &CurveSpec, table: &ArcLengthTable, n: usize) -> Result<Vec<f64>> {
    let h = table.length() / n as f64;
    (0..n)
        .map(|i| frenet(curve, table, h * i as f64).map(|f| f.curvature))
        .collect()
}

pub fn tube_measures(curve: &CurveSpec, table: &ArcLengthTable, eps: f64) -> Result<TubeMeasures> {
    check_radius(curve, table, eps)?;
    let l = table.length();
    let (n_s, n_theta) = (256, 16);
    let ks = curvature_samples(curve, table, n_s)?;
    let (rn, rw) = gauss_legendre_interval(4, 0.0, eps);
    let thetas: Vec<f64> = (0..n_theta).map(|j| TAU * j as f64 / n_theta as f64).collect();
    let (ws, wt) = (l / n_s as f64, TAU / n_theta as f64);
    let mut vol = Vec::with_capacity(n_s);
    let mut surf = Vec::with_capacity(n_s);
    for &k in &ks {
        let mut v = Vec::with_capacity(rn.len() * n_theta);
        let mut a = Vec::with_capacity(n_theta);
        for &th in &thetas {
            let c = th.cos();
            for (r, w) in rn.iter().zip(&rw) {
                v.push(w * r * (1.0 - r * k * c));
            }
            a.push(eps * (1.0 - eps * k * c));
        }
        vol.push(pairwise_sum(&v) * wt * ws);
        surf.push(pairwise_sum(&a) * wt * ws);
    }
    Ok(TubeMeasures {
        vol: PI * eps * eps * l,
        surf: TAU * eps * l,
        vol_quadrature: pairwise_sum(&vol),
        surf_quadrature: pairwise_sum(&surf),
    })
}

/// `ω(S_ε)/ε²` by quadrature, for each radius.
pub fn measure_ratio_limit(curve: &CurveSpec, table: &ArcLengthTable, eps_list: &[f64]) -> Result<Vec<f64>> {
    eps_list
        .iter()
        .map(|&e| tube_measures(curve, table, e).map(|m| m.vol_quadrature / (e * e)))
        .collect()
}

/// `|S_ε|⁻¹ ∫_{S_ε} h dx` by product quadrature in `(s, r, θ)`.
pub fn induced_measure_pairing<H: Fn(Vec3) -> f64>(
    curve: &CurveSpec,
    table: &ArcLengthTable,
    eps: f64,
    h: H,
) -> Result<f64> {
    check_radius(curve, table, eps)?;
    let l = table.length();
    let (n_s, n_r, n_theta) = (256, 8, 32);
    let (rn, rw) = gauss_legendre_interval(n_r, 0.0, eps);
    let ds = l / n_s as f64;
    let mut per_s = Vec::with_capacity(n_s);
    let mut mass = Vec::with_capacity(n_s);
    for i in 0..n_s {
        let f = frenet(curve, table, ds * i as f64)?;
        let mut vals = Vec::with_capacity(n_r * n_theta);
        let mut ws = Vec::with_capacity(n_r * n_theta);
        for j in 0..n_theta {
            let th = TAU * j as f64 / n_theta as f64;
            for (r, w) in rn.iter().zip(&rw) {
                let dens = w * r * (1.0 - r * f.curvature * th.cos());
                vals.push(dens * h(f.point + offset(&f, *r, th)));
                ws.push(dens);
            }
        }
        per_s.push(pairwise_sum(&vals));
        mass.push(pairwise_sum(&ws));
    }
    Ok(pairwise_sum(&per_s) / pairwise_sum(&mass))
}

/// Coefficients of `|S_ε|²H^ε(t) ≈ α₀ + α₁√t + α₃t^{3/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeSeries {
    pub eps: f64,
    pub vol: f64,
    pub alpha1_eps: f64,
    pub alpha3_eps: f64,
}

impl TubeSeries {
    /// Series value of `H^ε(t)`.
    pub fn eval(&self, t: f64) -> f64 {
        let st = t.sqrt();
        (self.vol + self.alpha1_eps * st + self.alpha3_eps * t * st) / (self.vol * self.vol)
    }
}

/// `∫₀^{2π} (−3/ε² + A₁/ε + A₀)(1 − εk cosθ) dθ` by the trapezoid rule,
/// with `A₁ = 2k cosθ/(1 − εk cosθ)` and `A₀ = −3k² cos²θ/(1 − εk cosθ)²`.
pub fn alpha3_density(k: f64, eps: f64, n_theta: usize) -> f64 {
    let vals: Vec<f64> = (0..n_theta)
        .map(|j| {
            let c = (TAU * j as f64 / n_theta as f64).cos();
            let g = 1.0 - eps * k * c;
            let a1 = 2.0 * k * c / g;
            let a0 = -3.0 * k * k * c * c / (g * g);
            (-3.0 / (eps * eps) + a1 / eps + a0) * g
        })
        .collect();
    pairwise_sum(&vals) * TAU / n_theta as f64
}

/// `∫₀^{2π} cos²θ/(1 − a cosθ) dθ = 2π(1/√(1−a²) − 1)/a²`.
pub fn cos2_over_linear(a: f64) -> f64 {
    if a.abs() < 1e-4 {
        let a2 = a * a;
        return PI * (1.0 + 0.75 * a2 + 0.625 * a2 * a2);
    }
    TAU * (1.0 / (1.0 - a * a).sqrt() - 1.0) / (a * a)
}

pub fn tube_alpha_coeffs(curve: &CurveSpec, table: &ArcLengthTable, eps: f64) -> Result<TubeSeries> {
    check_radius(curve, table, eps)?;
    let l = table.length();
    let n_s = 512;
    let ks = curvature_samples(curve, table, n_s)?;
    let dens: Vec<f64> = ks.iter().map(|&k| alpha3_density(k, eps, 64)).collect();
    let integral = pairwise_sum(&dens) * l / n_s as f64;
    Ok(TubeSeries {
        eps,
        vol: PI * eps * eps * l,
        alpha1_eps: -2.0 * eps * l * PI.sqrt(),
        alpha3_eps: -eps / (12.0 * PI.sqrt()) * integral,
    })
}

/// `H^ε(t)` with an absolute error estimate; `std_error` is set by the
/// QMC backend only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeHeat {
    pub value: f64,
    pub error: f64,
    pub std_error: Option<f64>,
}

pub fn tube_heat_content(curve: &CurveSpec, table: &ArcLengthTable, t: f64, spec: &TubeSpec) -> Result<TubeHeat> {
    spec.validate(curve, table)?;
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
    }
    let vol = PI * spec.eps * spec.eps * table.length();
    let norm = 1.0 / (vol * vol);
    match spec.backend {
        TubeBackend::Product => {
            let fine = product_rule(curve, spec.eps, t, spec.n_s, spec.n_r, spec.n_theta)?;
            let coarse = product_rule(curve, spec.eps, t, spec.n_s / 2, spec.n_r / 2, spec.n_theta / 2)?;
            Ok(TubeHeat {
                value: fine * norm,
                error: (fine - coarse).abs() * norm,
                std_error: None,
            })
        }
        TubeBackend::Qmc => {
            let (mean, se) = qmc_rule(curve, spec, t)?;
            Ok(TubeHeat {
                value: mean * norm,
                error: 3.0 * se * norm,
                std_error: Some(se * norm),
            })
        }
        TubeBackend::Boundary => {
            let q = boundary_rule(curve, spec.eps, t, vol)?;
            Ok(TubeHeat {
                value: q.value * norm,
                error: q.error * norm,
                std_error: None,
            })
        }
    }
}

fn heat_kernel(d2: f64, t: f64) -> f64 {
    (4.0 * PI * t).powf(-1.5) * (-d2 / (4.0 * t)).exp()
}

/// Points and weights of a quadrature rule on the solid tube.
fn product_nodes(curve: &CurveSpec, eps: f64, n_u: usize, n_r: usize, n_theta: usize) -> Result<Vec<(Vec3, f64)>> {
    let (rn, rw) = gauss_legendre_interval(n_r, 0.0, eps);
    let (wu, wt) = (TAU / n_u as f64, TAU / n_theta as f64);
    let mut nodes = Vec::with_capacity(n_u * n_r * n_theta);
    for i in 0..n_u {
        let u = wu * i as f64;
        let f = frenet_at_u(curve, u, 0.0)?;
        for j in 0..n_theta {
            let th = wt * j as f64;
            for (r, w) in rn.iter().zip(&rw) {
                let dens = r * (1.0 - r * f.curvature * th.cos());
                nodes.push((f.point + offset(&f, *r, th), w * dens * wu * wt * f.speed));
            }
        }
    }
    Ok(nodes)
}

/// `∫∫ p_t(x − y) dx dy` by a tensor-product rule, trapezoid in `u` and `θ`,
/// Gauss–Legendre in `r`.
fn product_rule(curve: &CurveSpec, eps: f64, t: f64, n_u: usize, n_r: usize, n_theta: usize) -> Result<f64> {
    let nodes = product_nodes(curve, eps, n_u, n_r, n_theta)?;
    let rows: Vec<f64> = nodes
        .par_iter()
        .map(|(x, wx)| {
            let row: Vec<f64> = nodes
                .iter()
                .map(|(y, wy)| wy * heat_kernel((x - y).norm_squared(), t))
                .collect();
            wx * pairwise_sum(&row)
        })
        .collect();
    Ok(pairwise_sum(&rows))
}

/// Tube point and density weight for a point of the unit cube, with
/// `u = 2πa`, `r = ε√b`, `θ = 2πc`.
fn qmc_point(curve: &CurveSpec, eps: f64, p: &[f64]) -> Result<(Vec3, f64)> {
    let u = TAU * p[0];
    let r = eps * p[1].sqrt();
    let th = TAU * p[2];
    let f = frenet_at_u(curve, u, 0.0)?;
    Ok((
        f.point + offset(&f, r, th),
        f.speed * (1.0 - r * f.curvature * th.cos()),
    ))
}

fn qmc_rule(curve: &CurveSpec, spec: &TubeSpec, t: f64) -> Result<(f64, f64)> {
    let n = spec.samples / spec.replicas;
    // dx = (2π)(ε²/2)(2π) v (1 − rk cosθ) da db dc
    let jac = 2.0 * PI * PI * spec.eps * spec.eps;
    let means: Vec<f64> = (0..spec.replicas)
        .into_par_iter()
        .map(|rep| {
            let seq = ShiftedHalton::new(6, spec.seed, rep as u64);
            let mut p = [0.0; 6];
            let mut vals = Vec::with_capacity(n);
            for i in 0..n {
                seq.point(i as u64, &mut p);
                let (x, wx) = qmc_point(curve, spec.eps, &p[..3])?;
                let (y, wy) = qmc_point(curve, spec.eps, &p[3..])?;
                vals.push(wx * wy * heat_kernel((x - y).norm_squared(), t));
            }
            Ok(pairwise_sum(&vals) / n as f64 * jac * jac)
        })
        .collect::<Result<Vec<f64>>>()?;
    let r = means.len() as f64;
    let mean = pairwise_sum(&means) / r;
    let dev: Vec<f64> = means.iter().map(|m| (m - mean).powi(2)).collect();
    let var = pairwise_sum(&dev) / (r - 1.0);
    Ok((mean, (var / r).sqrt()))
}

/// Point, outward normal and area density `ε(1 − εk cosθ)|γ'|` of the
/// tube surface at `(u, θ)`.
struct SurfacePoint {
    f: FrenetData,
    normal: Vec3,
    density: f64,
}

fn surface_point(curve: &CurveSpec, eps: f64, u: f64, theta: f64) -> Result<SurfacePoint> {
    let f = frenet_at_u(curve, u, 0.0)?;
    let (s, c) = theta.sin_cos();
    let normal = f.normal * c + f.binormal * s;
    let density = eps * (1.0 - eps * f.curvature * c) * f.speed;
    Ok(SurfacePoint { f, normal, density })
}

/// Outer grid on the tube surface used by both boundary forms.
const OUTER_U: usize = 64;
const OUTER_THETA: usize = 16;
const LOCAL_PSI: usize = 16;

/// `∫∫ p_t` over the solid tube from surface integrals.
///
/// With `g = erfc(d/2√t)/(4πd)` one has `p_t = δ + Δg`, so
/// `Q(t) = |S_ε| − ∬_{∂S×∂S} n_x·n_y g(|x−y|) dσ dσ`, which only sees
/// pairs closer than a few `√t`. For larger `t` the equivalent form
/// `Q(t) = ∬ n_x·n_y erf(d/2√t)/(4πd)` has a smooth kernel and is summed
/// on a uniform grid.
fn boundary_rule(curve: &CurveSpec, eps: f64, t: f64, vol: f64) -> Result<Integral> {
    let local = t.sqrt() <= eps / LOCAL_RATIO;
    let mut outer = Vec::with_capacity(OUTER_U * OUTER_THETA);
    for i in 0..OUTER_U {
        for j in 0..OUTER_THETA {
            outer.push((TAU * i as f64 / OUTER_U as f64, TAU * j as f64 / OUTER_THETA as f64));
        }
    }
    let inner = if local {
        None
    } else {
        Some(global_inner_nodes(curve, eps, t)?)
    };
    let vals: Vec<Integral> = outer
        .par_iter()
        .map(|&(u, th)| {
            let x = surface_point(curve, eps, u, th)?;
            let r = match &inner {
                None => local_inner(curve, eps, t, u, th, &x)?,
                Some(nodes) => global_inner(nodes, &x, eps, t),
            };
            Ok(Integral::new(r.value * x.density, r.error * x.density))
        })
        .collect::<Result<Vec<_>>>()?;
    let w = TAU / OUTER_U as f64 * TAU / OUTER_THETA as f64;
    let values: Vec<f64> = vals.iter().map(|v| v.value).collect();
    let coarse: Vec<f64> = values
        .iter()
        .enumerate()
        .filter(|(k, _)| (k / OUTER_THETA).is_multiple_of(2) && (k % OUTER_THETA).is_multiple_of(2))
        .map(|(_, v)| *v)
        .collect();
    let full = pairwise_sum(&values) * w;
    let half = pairwise_sum(&coarse) * 4.0 * w;
    let inner_err = pairwise_sum(&vals.iter().map(|v| v.error).collect::<Vec<_>>()) * w;
    let err = (full - half).abs() + inner_err;
    Ok(if local {
        Integral::new(vol - full, err)
    } else {
        Integral::new(full, err)
    })
}

/// `∫ n_x·n_y erfc(d/2√t)/(4πd) dσ_y` in polar coordinates `(ρ, ψ)` about
/// `x`, where `(u, θ) = (u₀ + ρ cosψ/((1 − εk₀c₀)v₀), θ₀ + ρ sinψ/ε)`.
fn local_inner(curve: &CurveSpec, eps: f64, t: f64, u0: f64, th0: f64, x: &SurfacePoint) -> Result<Integral> {
    let st = t.sqrt();
    let rho_max = 18.0 * st;
    let base = x.density / eps;
    let cfg = QuadratureConfig::new(1e-15 * st, 1e-12);
    let mut vals = Vec::with_capacity(LOCAL_PSI);
    let mut errs = Vec::with_capacity(LOCAL_PSI);
    for m in 0..LOCAL_PSI {
        let psi = TAU * (m as f64 + 0.5) / LOCAL_PSI as f64;
        let (sp, cp) = psi.sin_cos();
        let failed = std::cell::Cell::new(None);
        let g = |rho: f64| {
            let du = rho * cp / base;
            let th = th0 + rho * sp / eps;
            let y = match surface_point(curve, eps, u0 + du, th) {
                Ok(y) => y,
                Err(e) => {
                    failed.set(Some(e));
                    return 0.0;
                }
            };
            let diff = curve.chord(u0, du) + (y.normal - x.normal) * eps;
            let d = diff.norm();
            let jac = rho * y.density / (eps * base);
            x.normal.dot(&y.normal) * libm::erfc(d / (2.0 * st)) / (4.0 * PI * d) * jac
        };
        let r = adaptive_1d(g, 0.0, rho_max, &cfg)?;
        if let Some(e) = failed.take() {
            return Err(e);
        }
        vals.push(r.value);
        errs.push(r.error);
    }
    let w = TAU / LOCAL_PSI as f64;
    Ok(Integral::new(pairwise_sum(&vals) * w, pairwise_sum(&errs) * w))
}

struct InnerNode {
    point: Vec3,
    normal: Vec3,
    weight: f64,
}

fn global_inner_nodes(curve: &CurveSpec, eps: f64, t: f64) -> Result<Vec<InnerNode>> {
    let st = t.sqrt();
    let vmax = (0..256)
        .map(|i| curve.speed(TAU * i as f64 / 256.0))
        .fold(0.0, f64::max);
    let even = |x: f64| ((x / 2.0).ceil() as usize * 2).max(2);
    let n_u = even(TAU * vmax / (0.5 * st)).max(64);
    let n_th = even(TAU * eps / (0.5 * st)).max(16);
    let w = TAU / n_u as f64 * TAU / n_th as f64;
    let mut nodes = Vec::with_capacity(n_u * n_th);
    for i in 0..n_u {
        let u = TAU * (i as f64 + 0.5) / n_u as f64;
        for j in 0..n_th {
            let th = TAU * (j as f64 + 0.5) / n_th as f64;
            let y = surface_point(curve, eps, u, th)?;
            nodes.push(InnerNode {
                point: y.f.point + y.normal * eps,
                normal: y.normal,
                weight: y.density * w,
            });
        }
    }
    Ok(nodes)
}

fn global_inner(nodes: &[InnerNode], x: &SurfacePoint, eps: f64, t: f64) -> Integral {
    let st = t.sqrt();
    let px = x.f.point + x.normal * eps;
    let limit = 1.0 / (PI * t).sqrt();
    let vals: Vec<f64> = nodes
        .iter()
        .map(|y| {
            let d = (px - y.point).norm();
            let k = if d > 1e-12 * st {
                libm::erf(d / (2.0 * st)) / d
            } else {
                limit
            };
            y.weight * x.normal.dot(&y.normal) * k / (4.0 * PI)
        })
        .collect();
    Integral::new(pairwise_sum(&vals), 0.0)
}

/// Fitted `(β̂₀, β̂₁, β̂₃)` of `|S_ε|²H^ε(t)` in powers `1, t^{1/2}, t^{3/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TubeExpansionFit {
    pub beta0: f64,
    pub beta1: f64,
    pub beta3: f64,
    pub max_residual: f64,
    pub condition_number: f64,
}

pub fn tube_expansion_check(
    curve: &CurveSpec,
    table: &ArcLengthTable,
    eps: f64,
    t_grid: &[f64],
) -> Result<TubeExpansionFit> {
    if let Some(t) = t_grid.iter().find(|t| !(t.sqrt() <= eps / EXPANSION_RATIO)) {
        return Err(Error::InvalidParameter(format!(
            "t = {t} violates sqrt(t) <= eps/{EXPANSION_RATIO} for eps = {eps}"
        )));
    }
    let spec = TubeSpec::new(eps).with_backend(TubeBackend::Boundary);
    let vol = PI * eps * eps * table.length();
    let y = t_grid
        .iter()
        .map(|&t| tube_heat_content(curve, table, t, &spec).map(|h| h.value * vol * vol))
        .collect::<Result<Vec<f64>>>()?;
    let fit = powerbasis_fit(t_grid, &y, &[0.0, 0.5, 1.5])?;
    Ok(TubeExpansionFit {
        beta0: fit.coeffs[0],
        beta1: fit.coeffs[1],
        beta3: fit.coeffs[2],
        max_residual: fit.max_residual,
        condition_number: fit.condition_number,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{make_builtin, CurveFamily};
    use crate::heat::circle_closed_form;
    use crate::numerics::geometric_grid;

    fn setup(family: CurveFamily, params: &[f64]) -> (CurveSpec, ArcLengthTable) {
        let c = make_builtin(family, params).unwrap();
        let t = ArcLengthTable::build(&c, 512).unwrap();
        (c, t)
    }

    #[test]
    fn tube_points_on_circle() {
        let (c, t) = setup(CurveFamily::Circle, &[1.0]);
        let p = tube_point(&c, &t, 0.0, 0.1, 0.0).unwrap();
        assert!((p - Vec3::new(0.9, 0.0, 0.0)).norm() < 1e-14);
        let p = tube_point(&c, &t, 0.0, 0.1, PI / 2.0).unwrap();
        assert!((p - Vec3::new(1.0, 0.0, 0.1)).norm() < 1e-14);
        let p = tube_point(&c, &t, 1.3, 0.0, 2.0).unwrap();
        assert!((p - c.point(1.3)).norm() < 1e-14);
    }

    #[test]
    fn tube_point_distance_to_curve() {
        let (c, t) = setup(CurveFamily::Ellipse, &[2.0, 1.0]);
        let r = 0.3;
        for (s, th) in [(0.4, 1.0), (2.2, 4.0), (5.0, 0.2)] {
            let p = tube_point(&c, &t, s, r, th).unwrap();
            let cfg_dist = |u: f64| (c.point(u) - p).norm();
            let n = 20_000;
            let (mut best, mut bu) = (f64::INFINITY, 0.0);
            for i in 0..n {
                let u = TAU * i as f64 / n as f64;
                if cfg_dist(u) < best {
                    best = cfg_dist(u);
                    bu = u;
                }
            }
            let mut h = TAU / n as f64;
            while h > 1e-15 {
                for cand in [bu - h, bu + h] {
                    if cfg_dist(cand) < best {
                        best = cfg_dist(cand);
                        bu = cand;
                    }
                }
                h *= 0.5;
            }
            assert!((best - r).abs() < 1e-9, "{best}");
        }
    }

    #[test]
    fn measures_are_exact() {
        for (c, t) in [
            setup(CurveFamily::Circle, &[1.0]),
            setup(CurveFamily::Ellipse, &[2.0, 1.0]),
            setup(CurveFamily::Trefoil, &[2.0, 1.0]),
        ] {
            for eps in [0.1, 0.05] {
                let m = tube_measures(&c, &t, eps).unwrap();
                assert!((m.vol_quadrature - m.vol).abs() <= 1e-10 * m.vol);
                assert!((m.surf_quadrature - m.surf).abs() <= 1e-10 * m.surf);
            }
        }
        let (c, t) = setup(CurveFamily::Circle, &[1.0]);
        let m = tube_measures(&c, &t, 0.1).unwrap();
        assert!((m.vol - 0.197_392_088_021_787_2).abs() < 1e-12);
        assert!((m.surf - 3.947_841_760_435_743).abs() < 1e-12);
    }

    #[test]
    fn ratio_limit() {
        let (c, t) = setup(CurveFamily::Circle, &[3.0]);
        let r = measure_ratio_limit(&c, &t, &[0.1, 0.05]).unwrap();
        for x in r {
            assert!((x - 6.0 * PI * PI).abs() < 1e-9);
        }
    }

    #[test]
    fn too_wide() {
        let (c, t) = setup(CurveFamily::Ellipse, &[2.0, 1.0]);
        assert!(matches!(tube_measures(&c, &t, 0.46), Err(Error::TubeTooWide { .. })));
        assert!(tube_measures(&c, &t, -0.1).is_err());
    }

    #[test]
    fn pairing() {
        let (c, t) = setup(CurveFamily::Circle, &[1.0]);
        assert!((induced_measure_pairing(&c, &t, 0.1, |_| 1.0).unwrap() - 1.0).abs() < 1e-14);
        let x = induced_measure_pairing(&c, &t, 0.05, |p| p.x).unwrap();
        assert!(x.abs() < 0.05 * 0.05);
        let mut prev = f64::INFINITY;
        for eps in [0.2, 0.1, 0.05] {
            let v = induced_measure_pairing(&c, &t, eps, |p| p.norm_squared()).unwrap();
            // Exact value 1 + ε² on the unit circle.
            assert!((v - 1.0 - eps * eps).abs() < 1e-12);
            assert!((v - 1.0).abs() < prev);
            prev = (v - 1.0).abs();
        }
    }

    #[test]
    fn alpha_coefficients() {
        let (c, t) = setup(CurveFamily::Circle, &[1.0]);
        let s = tube_alpha_coeffs(&c, &t, 0.1).unwrap();
        assert!((s.alpha1_eps + 0.4 * PI.powf(1.5)).abs() < 1e-12);
        // Closed form via ∫cos²θ/(1 − a cosθ).
        let l = TAU;
        let eps = 0.1;
        let want = PI.sqrt() * l / (2.0 * eps) + eps / (4.0 * PI.sqrt()) * l * cos2_over_linear(eps);
        assert!((s.alpha3_eps - want).abs() < 1e-10 * want);
    }

    #[test]
    fn alpha3_flat_limit() {
        // k = 0: A₀ = A₁ = 0 and the density is −6π/ε².
        let eps = 0.07;
        assert!((alpha3_density(0.0, eps, 16) + 6.0 * PI / (eps * eps)).abs() < 1e-9);
        let k = 0.8;
        let d = alpha3_density(k, eps, 64);
        let want = -6.0 * PI / (eps * eps) - 3.0 * k * k * cos2_over_linear(eps * k);
        assert!((d - want).abs() < 1e-10 * want.abs());
    }

    #[test]
    fn cos2_oracle() {
        let a = 0.3;
        let cfg = QuadratureConfig::new(1e-14, 1e-14);
        let q = adaptive_1d(|th| th.cos().powi(2) / (1.0 - a * th.cos()), 0.0, TAU, &cfg).unwrap();
        assert!((q.value - cos2_over_linear(a)).abs() < 1e-12);
        assert!((cos2_over_linear(1e-6) - PI).abs() < 1e-10);
    }

    #[test]
    fn blow_up_constant() {
        let (c, t) = setup(CurveFamily::Circle, &[1.0]);
        for eps in [0.1, 0.05, 0.025] {
            let s = tube_alpha_coeffs(&c, &t, eps).unwrap();
            let lead = PI.sqrt() * TAU / 2.0;
            assert!((s.alpha3_eps * eps / lead - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn product_large_time() {
        let (c, t) = setup(CurveFamily::Circle, &[1.0]);
        let h = tube_heat_content(&c, &t, 10.0, &TubeSpec::new(0.1)).unwrap();
        let thin = circle_closed_form(1.0, 10.0);
        assert!((h.value / thin - 1.0).abs() < 1e-3);
    }

    #[test]
    fn backends_agree_at_moderate_time() {
        let (c, t) = setup(CurveFamily::Circle, &[1.0]);
        let tt = 0.05;
        let p = tube_heat_content(&c, &t, tt, &TubeSpec::new(0.1)).unwrap();
        let b = tube_heat_content(&c, &t, tt, &TubeSpec::new(0.1).with_backend(TubeBackend::Boundary)).unwrap();
        assert!((p.value / b.value - 1.0).abs() < 1e-9, "{} {}", p.value, b.value);
        let mut spec = TubeSpec::new(0.1).with_backend(TubeBackend::Qmc);
        spec.samples = 1 << 14;
        let q = tube_heat_content(&c, &t, tt, &spec).unwrap();
        let se = q.std_error.unwrap();
        assert!(
            (q.value - p.value).abs() < 5.0 * se + 1e-3 * p.value,
            "{} {} {se}",
            q.value,
            p.value
        );
    }

    #[test]
    fn boundary_forms_agree_at_switch() {
        let (c, t) = setup(CurveFamily::Circle, &[1.0]);
        let eps = 0.1;
        let vol = PI * eps * eps * t.length();
        let tt = (eps / LOCAL_RATIO).powi(2);
        let local = boundary_rule(&c, eps, tt, vol).unwrap();
        let global = boundary_rule(&c, eps, tt * 1.0000001, vol).unwrap();
        assert!(
            (local.value / global.value - 1.0).abs() < 1e-7,
            "{} {}",
            local.value,
            global.value
        );
    }

    #[test]
    fn qmc_deterministic() {
        let (c, t) = setup(CurveFamily::Ellipse, &[2.0, 1.0]);
        let mut spec = TubeSpec::new(0.05).with_backend(TubeBackend::Qmc);
        spec.samples = 4096;
        spec.seed = 11;
        let a = tube_heat_content(&c, &t, 0.1, &spec).unwrap();
        let b = tube_heat_content(&c, &t, 0.1, &spec).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        spec.seed = 12;
        let d = tube_heat_content(&c, &t, 0.1, &spec).unwrap();
        assert_ne!(a.value.to_bits(), d.value.to_bits());
    }

    #[test]
    fn converges_to_curve_heat_content() {
        let (c, t) = setup(CurveFamily::Circle, &[1.0]);
        let exact = circle_closed_form(1.0, 0.1);
        let mut prev = f64::INFINITY;
        for eps in [0.2, 0.1, 0.05] {
            let h = tube_heat_content(&c, &t, 0.1, &TubeSpec::new(eps)).unwrap();
            let d = (h.value - exact).abs();
            assert!(d < prev);
            prev = d;
        }
    }

    #[test]
    fn expansion_check_small_times() {
        let (c, t) = setup(CurveFamily::Circle, &[1.0]);
        let eps = 0.1;
        assert!(tube_expansion_check(&c, &t, eps, &[1e-2; 6]).is_err());
        let grid = geometric_grid(1e-6, 1e-4, 8);
        let f = tube_expansion_check(&c, &t, eps, &grid).unwrap();
        let s = tube_alpha_coeffs(&c, &t, eps).unwrap();
        assert!((f.beta0 / s.vol - 1.0).abs() < 5e-3);
        assert!((f.beta1 / s.alpha1_eps - 1.0).abs() < 2e-2);
        assert!(
            (f.beta3 / s.alpha3_eps - 1.0).abs() < 5e-2,
            "{} {}",
            f.beta3,
            s.alpha3_eps
        );
        // Ratio of boundary area to volume: β₁/β₀ = −2/(√π ε).
        assert!((f.beta1 / f.beta0 / (-2.0 / (PI.sqrt() * eps)) - 1.0).abs() < 2e-2);
    }
}
