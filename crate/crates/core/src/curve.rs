//! Smooth closed curves in R³ given by truncated Fourier series, their
//! arc-length parametrization and Frenet data.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::numerics::{adaptive_1d, QuadratureConfig};

pub type Vec3 = nalgebra::Vector3<f64>;

/// Grid used for the biregularity scan.
pub const BIREGULARITY_GRID: usize = 4096;
/// Minimum admissible `|γ'∧γ''| / |γ'|³`.
pub const BIREGULARITY_THRESHOLD: f64 = 1e-8;
/// Curvature below which the Frenet frame is declared degenerate.
pub const CURVATURE_THRESHOLD: f64 = 1e-10;
/// Grid used for the self-distance and separation scans.
pub const SCAN_GRID: usize = 1024;
/// Safety factor applied to the reach estimate.
pub const REACH_SAFETY: f64 = 0.9;
/// Highest derivative order supported by [`CurveSpec::derivatives`].
pub const MAX_DERIVATIVE_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveFamily {
    Circle,
    Ellipse,
    Trefoil,
    Custom,
}

impl fmt::Display for CurveFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CurveFamily::Circle => "circle",
            CurveFamily::Ellipse => "ellipse",
            CurveFamily::Trefoil => "trefoil",
            CurveFamily::Custom => "custom",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for CurveFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "circle" => Ok(CurveFamily::Circle),
            "ellipse" => Ok(CurveFamily::Ellipse),
            "trefoil" => Ok(CurveFamily::Trefoil),
            "custom" => Ok(CurveFamily::Custom),
            other => Err(Error::InvalidParameter(format!("unknown curve family '{other}'"))),
        }
    }
}

/// Coefficients of `cos(n u)` and `sin(n u)` for x, y, z.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Harmonic {
    pub cos: [f64; 3],
    pub sin: [f64; 3],
}

/// A closed curve `γ(u) = Σ_n cos(nu)·a_n + sin(nu)·b_n`, `u ∈ [0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSpec {
    harmonics: Vec<Harmonic>,
    family: CurveFamily,
}

impl CurveSpec {
    /// Builds a curve without checking any invariant.
    pub fn from_harmonics(family: CurveFamily, harmonics: Vec<Harmonic>) -> Self {
        assert!(!harmonics.is_empty(), "a curve needs at least harmonic 0");
        Self { harmonics, family }
    }

    pub fn family(&self) -> CurveFamily {
        self.family
    }

    pub fn harmonics(&self) -> &[Harmonic] {
        &self.harmonics
    }

    /// Parses the plain-text harmonic format: one line per harmonic
    /// `ax bx ay by az bz`, harmonics 0..N in order. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn parse_custom(text: &str) -> Result<Self> {
        let mut harmonics = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 6 {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected 6 numbers, found {}", fields.len()),
                });
            }
            let mut v = [0.0; 6];
            for (k, f) in fields.iter().enumerate() {
                v[k] = f.parse::<f64>().map_err(|_| Error::Parse {
                    line: i + 1,
                    message: format!("field {} ('{f}') is not a decimal number", k + 1),
                })?;
                if !v[k].is_finite() {
                    return Err(Error::Parse {
                        line: i + 1,
                        message: format!("field {} is not finite", k + 1),
                    });
                }
            }
            harmonics.push(Harmonic {
                cos: [v[0], v[2], v[4]],
                sin: [v[1], v[3], v[5]],
            });
        }
        if harmonics.len() < 2 {
            return Err(Error::Parse {
                line: text.lines().count().max(1),
                message: "need at least harmonics 0 and 1".into(),
            });
        }
        Ok(Self::from_harmonics(CurveFamily::Custom, harmonics))
    }

    /// Loads and validates a custom curve file.
    pub fn load_custom(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let curve = Self::parse_custom(&text)?;
        curve.validate()?;
        Ok(curve)
    }

    /// Serializes in the format read by [`CurveSpec::parse_custom`].
    pub fn to_custom_text(&self) -> String {
        let mut out = String::new();
        for h in &self.harmonics {
            out.push_str(&format!(
                "{:e} {:e} {:e} {:e} {:e} {:e}\n",
                h.cos[0], h.sin[0], h.cos[1], h.sin[1], h.cos[2], h.sin[2]
            ));
        }
        out
    }

    /// `γ(u), γ'(u), …, γ^(order)(u)` by term-wise differentiation.
    pub fn derivatives(&self, u: f64, order: usize) -> Vec<Vec3> {
        assert!(
            order <= MAX_DERIVATIVE_ORDER,
            "derivative order {order} > {MAX_DERIVATIVE_ORDER}"
        );
        let mut out = vec![Vec3::zeros(); order + 1];
        for (n, h) in self.harmonics.iter().enumerate() {
            let nf = n as f64;
            let (s, c) = (nf * u).sin_cos();
            let mut scale = 1.0;
            for (m, d) in out.iter_mut().enumerate() {
                if n == 0 && m > 0 {
                    break;
                }
                // m-th derivative of (a cos + b sin) cycles with period 4.
                let (cc, ss) = match m % 4 {
                    0 => (c, s),
                    1 => (-s, c),
                    2 => (-c, -s),
                    _ => (s, -c),
                };
                for k in 0..3 {
                    d[k] += scale * (h.cos[k] * cc + h.sin[k] * ss);
                }
                scale *= nf;
            }
        }
        out
    }

    pub fn point(&self, u: f64) -> Vec3 {
        self.derivatives(u, 0)[0]
    }

    pub fn velocity(&self, u: f64) -> Vec3 {
        let mut v = Vec3::zeros();
        for (n, h) in self.harmonics.iter().enumerate().skip(1) {
            let nf = n as f64;
            let (s, c) = (nf * u).sin_cos();
            for k in 0..3 {
                v[k] += nf * (h.sin[k] * c - h.cos[k] * s);
            }
        }
        v
    }

    pub fn speed(&self, u: f64) -> f64 {
        self.velocity(u).norm()
    }

    /// `γ(u₀+δ) − γ(u₀)` evaluated through product formulas, so the
    /// result keeps full relative accuracy for small `δ`.
    pub fn chord(&self, u0: f64, delta: f64) -> Vec3 {
        let mid = u0 + 0.5 * delta;
        let half = 0.5 * delta;
        let mut d = Vec3::zeros();
        for (n, h) in self.harmonics.iter().enumerate().skip(1) {
            let nf = n as f64;
            let (sm, cm) = (nf * mid).sin_cos();
            let sh = (nf * half).sin();
            for k in 0..3 {
                d[k] += 2.0 * sh * (h.sin[k] * cm - h.cos[k] * sm);
            }
        }
        d
    }

    /// Same curve traced from `u + shift`.
    pub fn shifted(&self, shift: f64) -> Self {
        let harmonics = self
            .harmonics
            .iter()
            .enumerate()
            .map(|(n, h)| {
                let (s, c) = (n as f64 * shift).sin_cos();
                let mut out = Harmonic::default();
                for k in 0..3 {
                    out.cos[k] = h.cos[k] * c + h.sin[k] * s;
                    out.sin[k] = h.sin[k] * c - h.cos[k] * s;
                }
                out
            })
            .collect();
        Self::from_harmonics(self.family, harmonics)
    }

    /// Homothety by `factor` about the origin.
    pub fn scaled(&self, factor: f64) -> Self {
        let harmonics = self
            .harmonics
            .iter()
            .map(|h| Harmonic {
                cos: h.cos.map(|x| x * factor),
                sin: h.sin.map(|x| x * factor),
            })
            .collect();
        Self::from_harmonics(self.family, harmonics)
    }

    /// Scans `|γ'∧γ''| / |γ'|³` on a uniform grid; fails on the first
    /// grid point below the threshold.
    pub fn check_biregular(&self) -> Result<BiregularityReport> {
        let mut min_ratio = f64::INFINITY;
        let mut max_curvature: f64 = 0.0;
        for i in 0..BIREGULARITY_GRID {
            let u = TAU * i as f64 / BIREGULARITY_GRID as f64;
            let d = self.derivatives(u, 2);
            let speed = d[1].norm();
            let ratio = if speed > 0.0 {
                d[1].cross(&d[2]).norm() / speed.powi(3)
            } else {
                0.0
            };
            if !(ratio >= BIREGULARITY_THRESHOLD) {
                return Err(Error::DegenerateCurve { u, ratio });
            }
            min_ratio = min_ratio.min(ratio);
            max_curvature = max_curvature.max(ratio);
        }
        Ok(BiregularityReport {
            min_ratio,
            max_curvature,
        })
    }

    /// Checks every invariant: biregularity and simplicity.
    pub fn validate(&self) -> Result<()> {
        self.check_biregular()?;
        let table = ArcLengthTable::build(self, SCAN_GRID)?;
        check_embedded(self, &table)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiregularityReport {
    pub min_ratio: f64,
    /// Curvature is the same ratio, so this is the grid maximum of `k`.
    pub max_curvature: f64,
}

/// Builds a validated builtin curve.
///
/// * circle: `[R]`
/// * ellipse: `[a, b]` semi-axes
/// * trefoil: `[R, r]` torus radii of the (2,3) torus knot, `R > r`
pub fn make_builtin(family: CurveFamily, params: &[f64]) -> Result<CurveSpec> {
    let need = match family {
        CurveFamily::Circle => 1,
        CurveFamily::Ellipse | CurveFamily::Trefoil => 2,
        CurveFamily::Custom => {
            return Err(Error::InvalidParameter(
                "custom curves are loaded from a coefficient file".into(),
            ))
        }
    };
    if params.len() != need {
        return Err(Error::InvalidParameter(format!(
            "{family} takes {need} parameter(s), got {}",
            params.len()
        )));
    }
    if let Some(p) = params.iter().find(|p| !(**p > 0.0) || !p.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "{family} parameters must be positive and finite, got {p}"
        )));
    }
    let mut h = vec![Harmonic::default(); 2];
    match family {
        CurveFamily::Circle => {
            h[1].cos[0] = params[0];
            h[1].sin[1] = params[0];
        }
        CurveFamily::Ellipse => {
            h[1].cos[0] = params[0];
            h[1].sin[1] = params[1];
        }
        CurveFamily::Trefoil => {
            let (big, small) = (params[0], params[1]);
            if small >= big {
                return Err(Error::InvalidParameter(format!(
                    "trefoil needs R > r, got R = {big}, r = {small}"
                )));
            }
            // (R + r cos 3u)(cos 2u, sin 2u) + r sin 3u e_z
            h.resize(6, Harmonic::default());
            h[1].cos[0] = 0.5 * small;
            h[1].sin[1] = -0.5 * small;
            h[2].cos[0] = big;
            h[2].sin[1] = big;
            h[3].sin[2] = small;
            h[5].cos[0] = 0.5 * small;
            h[5].sin[1] = 0.5 * small;
        }
        CurveFamily::Custom => unreachable!(),
    }
    let curve = CurveSpec::from_harmonics(family, h);
    curve.validate()?;
    Ok(curve)
}

/// Monotone map between the Fourier parameter `u` and arc length `s`.
///
/// Node arc lengths come from adaptive quadrature of `|γ'|`; between nodes
/// `s(u)` is evaluated by quadrature and `u(s)` by cubic Hermite
/// interpolation (exact node slopes `1/|γ'|`) polished by safeguarded Newton.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcLengthTable {
    total_length: f64,
    u_nodes: Vec<f64>,
    s_nodes: Vec<f64>,
    speeds: Vec<f64>,
    interpolation_order: usize,
}

impl ArcLengthTable {
    pub fn build(curve: &CurveSpec, n_samples: usize) -> Result<Self> {
        if n_samples < 64 {
            return Err(Error::InvalidParameter(format!(
                "arc-length table needs at least 64 samples, got {n_samples}"
            )));
        }
        curve.check_biregular()?;
        let cfg = QuadratureConfig::new(1e-16, 1e-15);
        let u_nodes: Vec<f64> = (0..=n_samples).map(|i| TAU * i as f64 / n_samples as f64).collect();
        let speeds: Vec<f64> = u_nodes.iter().map(|&u| curve.speed(u)).collect();
        let mut s_nodes = Vec::with_capacity(n_samples + 1);
        s_nodes.push(0.0);
        let mut acc = 0.0;
        for w in u_nodes.windows(2) {
            acc += adaptive_1d(|u| curve.speed(u), w[0], w[1], &cfg)?.value;
            s_nodes.push(acc);
        }
        Ok(Self {
            total_length: acc,
            u_nodes,
            s_nodes,
            speeds,
            interpolation_order: 3,
        })
    }

    /// Total length `ℓ`.
    pub fn length(&self) -> f64 {
        self.total_length
    }

    pub fn interpolation_order(&self) -> usize {
        self.interpolation_order
    }

    pub fn samples(&self) -> usize {
        self.u_nodes.len() - 1
    }

    /// Arc length from `u = 0`, for `u ∈ [0, 2π]` (other values wrap).
    pub fn s_of_u(&self, curve: &CurveSpec, u: f64) -> f64 {
        let turns = (u / TAU).floor();
        let ur = u - turns * TAU;
        let i = self.panel_of_u(ur);
        let cfg = QuadratureConfig::new(1e-16, 1e-15);
        let part = adaptive_1d(|x| curve.speed(x), self.u_nodes[i], ur, &cfg)
            .map(|r| r.value)
            .unwrap_or_else(|_| (ur - self.u_nodes[i]) * self.speeds[i]);
        turns * self.total_length + self.s_nodes[i] + part
    }

    fn panel_of_u(&self, u: f64) -> usize {
        let n = self.samples();
        ((u / TAU * n as f64).floor() as usize).min(n - 1)
    }

    /// Parameter `u ∈ [0, 2π)` at arc length `s` (wrapped into `[0, ℓ)`).
    pub fn u_of_s(&self, curve: &CurveSpec, s: f64) -> f64 {
        let l = self.total_length;
        let mut sr = s - (s / l).floor() * l;
        if sr >= l {
            sr = 0.0;
        }
        let i = match self.s_nodes.binary_search_by(|x| x.partial_cmp(&sr).unwrap()) {
            Ok(i) => return self.u_nodes[i.min(self.samples() - 1)] % TAU,
            Err(i) => i - 1,
        };
        let (s0, s1) = (self.s_nodes[i], self.s_nodes[i + 1]);
        let (u0, u1) = (self.u_nodes[i], self.u_nodes[i + 1]);
        let h = s1 - s0;
        let x = (sr - s0) / h;
        let (m0, m1) = (h / self.speeds[i], h / self.speeds[i + 1]);
        let x2 = x * x;
        let x3 = x2 * x;
        let mut u =
            (2.0 * x3 - 3.0 * x2 + 1.0) * u0 + (x3 - 2.0 * x2 + x) * m0 + (-2.0 * x3 + 3.0 * x2) * u1 + (x3 - x2) * m1;
        let (mut lo, mut hi) = (u0, u1);
        u = u.clamp(lo, hi);
        let cfg = QuadratureConfig::new(1e-16, 1e-15);
        for _ in 0..30 {
            let g = s0
                + adaptive_1d(|v| curve.speed(v), u0, u, &cfg)
                    .map(|r| r.value)
                    .unwrap_or(0.0)
                - sr;
            if g > 0.0 {
                hi = u;
            } else {
                lo = u;
            }
            let newton = g / curve.speed(u);
            if newton.abs() <= 1e-16 * (1.0 + u.abs()) {
                break;
            }
            let mut next = u - newton;
            if !(next >= lo && next <= hi) {
                next = 0.5 * (lo + hi);
            }
            u = next;
        }
        u
    }

    /// Parameter increment `δ` with `∫_{u₀}^{u₀+δ} |γ'| = ds`, solved
    /// directly so that small offsets keep full relative accuracy.
    pub fn u_offset(&self, curve: &CurveSpec, u0: f64, ds: f64) -> f64 {
        if ds == 0.0 {
            return 0.0;
        }
        let cfg = QuadratureConfig::new(1e-17 * ds.abs().max(1e-300), 1e-15);
        let mut delta = ds / curve.speed(u0);
        for _ in 0..30 {
            let arc = adaptive_1d(|v| curve.speed(v), u0, u0 + delta, &cfg)
                .map(|r| r.value)
                .unwrap_or(delta * curve.speed(u0));
            let step = (arc - ds) / curve.speed(u0 + delta);
            delta -= step;
            if step.abs() <= 2e-16 * delta.abs() {
                break;
            }
        }
        delta
    }
}

/// Position, Frenet frame and curvature jet at one point, in arc length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrenetData {
    pub s: f64,
    pub u: f64,
    /// `|γ'(u)|` in the Fourier parameter.
    pub speed: f64,
    pub point: Vec3,
    pub tangent: Vec3,
    pub normal: Vec3,
    pub binormal: Vec3,
    pub curvature: f64,
    pub torsion: f64,
    /// `(k², ∂_s k², ∂²_s k²)`.
    pub curvature_jet: [f64; 3],
    /// `‖∂³_s γ‖²`.
    pub third_deriv_sq: f64,
}

/// Frenet data at parameter `u`; `s` is copied into the result verbatim.
///
/// The curvature jet is obtained by exact chain-rule differentiation of
/// `k² = |γ'∧γ''|²/|γ'|⁶` through `ds = |γ'| du`.
pub fn frenet_at_u(curve: &CurveSpec, u: f64, s: f64) -> Result<FrenetData> {
    let d = curve.derivatives(u, 4);
    let (r1, r2, r3, r4) = (d[1], d[2], d[3], d[4]);
    let q = r1.dot(&r1);
    let v = q.sqrt();
    let c = r1.cross(&r2);
    let c1 = r1.cross(&r3);
    let c2 = r2.cross(&r3) + r1.cross(&r4);
    let p = c.dot(&c);
    let curvature = p.sqrt() / (q * v);
    if !(curvature >= CURVATURE_THRESHOLD) {
        return Err(Error::DegenerateFrame { s, curvature });
    }
    let p1 = 2.0 * c.dot(&c1);
    let p2 = 2.0 * (c1.dot(&c1) + c.dot(&c2));
    let q1 = 2.0 * r1.dot(&r2);
    let q2 = 2.0 * (r2.dot(&r2) + r1.dot(&r3));
    let (q3, q4, q5) = (q * q * q, q * q * q * q, q * q * q * q * q);
    let f = p / q3;
    let f1 = p1 / q3 - 3.0 * p * q1 / q4;
    let f2 = p2 / q3 - 6.0 * p1 * q1 / q4 + 12.0 * p * q1 * q1 / q5 - 3.0 * p * q2 / q4;
    let v1 = r1.dot(&r2) / v;
    let v2 = ((r2.dot(&r2) + r1.dot(&r3)) - v1 * v1) / v;
    let ds_f = f1 / v;
    let dss_f = f2 / (v * v) - f1 * v1 / (v * v * v);
    let g3 = r3 / (v * v * v) - r2 * (3.0 * v1 / v.powi(4)) + r1 * (3.0 * v1 * v1 / v.powi(5) - v2 / v.powi(4));
    let tangent = r1 / v;
    let binormal = c / p.sqrt();
    let normal = binormal.cross(&tangent);
    Ok(FrenetData {
        s,
        u,
        speed: v,
        point: d[0],
        tangent,
        normal,
        binormal,
        curvature,
        torsion: c.dot(&r3) / p,
        curvature_jet: [f, ds_f, dss_f],
        third_deriv_sq: g3.dot(&g3),
    })
}

/// Frenet data at arc length `s`.
pub fn frenet(curve: &CurveSpec, table: &ArcLengthTable, s: f64) -> Result<FrenetData> {
    let u = table.u_of_s(curve, s);
    frenet_at_u(curve, u, s)
}

/// Self-distance and reach estimate of a closed curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Embedding {
    /// Shortest chord `γ(τ)γ(s)` with `s` beyond the first local maximum of
    /// `|γ(s) − γ(τ)|` in both directions from `τ`. This bounds the
    /// shortest double-normal chord from below.
    pub min_self_distance: f64,
    /// `0.9 · min(1/max k, min_self_distance/2)`.
    pub reach_bound: f64,
    pub max_curvature: f64,
}

/// Grid scan shared by [`check_embedded`] and the separation margin.
#[derive(Debug, Clone)]
pub(crate) struct SelfDistanceScan {
    /// Squared far-set distance and its grid pair.
    pub far_min_sq: f64,
    pub far_pair: (f64, f64),
    /// Smallest arc offset over which the phase is certified increasing
    /// in both directions.
    pub monotone_margin: f64,
}

pub(crate) fn scan_self_distance(curve: &CurveSpec, table: &ArcLengthTable) -> SelfDistanceScan {
    let n = SCAN_GRID;
    let ds = table.length() / n as f64;
    let us: Vec<f64> = (0..n).map(|i| table.u_of_s(curve, ds * i as f64)).collect();
    let pts: Vec<Vec3> = us.iter().map(|&u| curve.point(u)).collect();
    let tans: Vec<Vec3> = us.iter().map(|&u| curve.velocity(u)).collect();
    let mut far_min_sq = f64::INFINITY;
    let mut far_pair = (0.0, 0.0);
    let mut margin = f64::INFINITY;
    let mut phi = vec![0.0; n];
    for i in 0..n {
        for j in 1..n {
            phi[j] = (pts[(i + j) % n] - pts[i]).norm_squared();
        }
        let mut jf = 1;
        while jf + 1 < n && phi[jf + 1] > phi[jf] {
            jf += 1;
        }
        let mut jb = n - 1;
        while jb > 1 && phi[jb - 1] > phi[jb] {
            jb -= 1;
        }
        let (lo, hi) = if jf <= jb { (jf, jb) } else { (jb, jf) };
        for (j, &p) in phi.iter().enumerate().take(hi + 1).skip(lo) {
            if p < far_min_sq {
                far_min_sq = p;
                far_pair = (us[i], us[(i + j) % n]);
            }
        }
        // Derivative sign of the phase: (γ(s) - γ(τ)) · γ'(s).
        let mut fwd = 0;
        while fwd + 1 < n && (pts[(i + fwd + 1) % n] - pts[i]).dot(&tans[(i + fwd + 1) % n]) > 0.0 {
            fwd += 1;
        }
        let mut bwd = 0;
        while bwd + 1 < n && (pts[(i + n - bwd - 1) % n] - pts[i]).dot(&tans[(i + n - bwd - 1) % n]) < 0.0 {
            bwd += 1;
        }
        margin = margin.min(fwd.min(bwd) as f64 * ds);
    }
    SelfDistanceScan {
        far_min_sq,
        far_pair,
        monotone_margin: margin,
    }
}

/// Smallest squared chord with `(u, v)` confined to a box of half-width
/// `half` around the grid pair, by compass search.
fn box_min_chord(curve: &CurveSpec, (u0, v0): (f64, f64), half: f64) -> f64 {
    let f = |a: f64, b: f64| curve.chord(a, b - a).norm_squared();
    let clamp = |x: f64, c: f64| x.clamp(c - half, c + half);
    let (mut u, mut v) = (u0, v0);
    let mut best = f(u, v);
    let mut step = 0.5 * half;
    while step > 1e-13 {
        let mut improved = false;
        for (du, dv) in [
            (1.0, 0.0),
            (-1.0, 0.0),
            (0.0, 1.0),
            (0.0, -1.0),
            (1.0, 1.0),
            (-1.0, -1.0),
            (1.0, -1.0),
            (-1.0, 1.0),
        ] {
            let (a, b) = (clamp(u + du * step, u0), clamp(v + dv * step, v0));
            let val = f(a, b);
            if val < best {
                best = val;
                u = a;
                v = b;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

/// Minimum double-normal distance and reach bound.
pub fn check_embedded(curve: &CurveSpec, table: &ArcLengthTable) -> Result<Embedding> {
    let report = curve.check_biregular()?;
    let scan = scan_self_distance(curve, table);
    // A crossing sits between grid points; search the surrounding cell.
    let cell = box_min_chord(curve, scan.far_pair, 2.0 * TAU / SCAN_GRID as f64).sqrt();
    if cell <= 1e-6 * table.length() {
        return Err(Error::NotSimple { min_distance: cell });
    }
    let min_self_distance = scan.far_min_sq.sqrt();
    let reach = (1.0 / report.max_curvature).min(0.5 * min_self_distance);
    Ok(Embedding {
        min_self_distance,
        reach_bound: REACH_SAFETY * reach,
        max_curvature: report.max_curvature,
    })
}

/// Circumference of a circle; used in tests and reports.
pub fn circle_length(radius: f64) -> f64 {
    2.0 * PI * radius
}
