//! One-dimensional quadrature: adaptive Gauss–Kronrod, the periodic
//! trapezoid rule and Gauss–Legendre nodes for tensor-product rules.

#![allow(clippy::excessive_precision)]

use super::pairwise_sum;
use crate::error::{Error, Result};

/// Tolerances and panel choice for [`adaptive_1d`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of bisections applied to any panel.
    pub max_depth: u32,
    /// Kronrod panel size, 15 or 21.
    pub panel_order: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-12,
            max_depth: 50,
            panel_order: 15,
        }
    }
}

impl QuadratureConfig {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "quadrature tolerances must be positive (abs {}, rel {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_depth > 60 {
            return Err(Error::InvalidParameter(format!(
                "max_depth {} exceeds 60",
                self.max_depth
            )));
        }
        if self.panel_order != 15 && self.panel_order != 21 {
            return Err(Error::InvalidParameter(format!(
                "unsupported Kronrod panel order {}",
                self.panel_order
            )));
        }
        Ok(())
    }
}

/// A quadrature result together with its absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

impl Integral {
    pub fn new(value: f64, error: f64) -> Self {
        Self { value, error }
    }
}

// Kronrod abscissae/weights (QUADPACK), positive half, centre last.
const XGK15: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK15: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss 7-point weights at the odd Kronrod indices 1, 3, 5 and the centre.
const WG7: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const XGK21: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK21: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_373_339,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
// Gauss 10-point weights at the odd Kronrod indices 1, 3, 5, 7, 9.
const WG10: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    /// Sum of |f| weights, used for the roundoff floor.
    abs_value: f64,
    depth: u32,
}

fn kronrod_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, order: u32) -> (f64, f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let (xgk, wgk, wg): (&[f64], &[f64], &[f64]) = if order == 21 {
        (&XGK21, &WGK21, &WG10)
    } else {
        (&XGK15, &WGK15, &WG7)
    };
    let n = xgk.len();
    let fc = f(centre);
    let mut kron = wgk[n - 1] * fc;
    let mut gauss = if order == 15 { WG7[3] * fc } else { 0.0 };
    let mut abs = wgk[n - 1] * fc.abs();
    for j in 0..n - 1 {
        let dx = half * xgk[j];
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        kron += wgk[j] * (f1 + f2);
        abs += wgk[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += wg[j / 2] * (f1 + f2);
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).abs();
    (value, error, abs * half.abs())
}

/// Globally adaptive Gauss–Kronrod quadrature of `f` over `[a, b]`.
///
/// The panel error estimate is `|G - K|`. On failure the best value and
/// the achieved error are carried by [`Error::ToleranceNotMet`].
pub fn adaptive_1d<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Integral> {
    if a == b {
        return Ok(Integral::new(0.0, 0.0));
    }
    if b < a {
        let r = adaptive_1d(f, b, a, cfg)?;
        return Ok(Integral::new(-r.value, r.error));
    }
    let (v, e, abs) = kronrod_panel(&f, a, b, cfg.panel_order);
    let mut panels = vec![Panel {
        a,
        b,
        value: v,
        error: e,
        abs_value: abs,
        depth: 0,
    }];
    const MAX_PANELS: usize = 20_000;
    let (mut total, mut total_err, mut abs_total) = (v, e, abs);
    loop {
        let target = cfg
            .abs_tol
            .max(cfg.rel_tol * total.abs())
            .max(50.0 * f64::EPSILON * abs_total);
        if total_err <= target {
            if panels.len() == 1 {
                return Ok(Integral::new(v, e));
            }
            // Running sums drift; report fixed-order sums.
            let values: Vec<f64> = panels.iter().map(|p| p.value).collect();
            let errors: Vec<f64> = panels.iter().map(|p| p.error).collect();
            return Ok(Integral::new(pairwise_sum(&values), pairwise_sum(&errors)));
        }
        // Worst panel; ties resolved by position for determinism.
        let (worst, _) =
            panels.iter().enumerate().fold(
                (0usize, -1.0f64),
                |acc, (i, p)| {
                    if p.error > acc.1 {
                        (i, p.error)
                    } else {
                        acc
                    }
                },
            );
        let p = &panels[worst];
        if p.depth >= cfg.max_depth || panels.len() >= MAX_PANELS || !total.is_finite() {
            return Err(Error::ToleranceNotMet {
                value: total,
                achieved: total_err,
                requested: target,
            });
        }
        let (pa, pb, depth) = (p.a, p.b, p.depth + 1);
        let (old_v, old_e, old_a) = (p.value, p.error, p.abs_value);
        let mid = 0.5 * (pa + pb);
        let (v1, e1, a1) = kronrod_panel(&f, pa, mid, cfg.panel_order);
        let (v2, e2, a2) = kronrod_panel(&f, mid, pb, cfg.panel_order);
        total += v1 + v2 - old_v;
        total_err = (total_err + e1 + e2 - old_e).max(0.0);
        abs_total += a1 + a2 - old_a;
        panels[worst] = Panel {
            a: pa,
            b: mid,
            value: v1,
            error: e1,
            abs_value: a1,
            depth,
        };
        panels.insert(
            worst + 1,
            Panel {
                a: mid,
                b: pb,
                value: v2,
                error: e2,
                abs_value: a2,
                depth,
            },
        );
    }
}

/// Adaptive quadrature over consecutive breakpoints; errors are summed.
pub fn adaptive_piecewise<F: Fn(f64) -> f64>(f: F, breaks: &[f64], cfg: &QuadratureConfig) -> Result<Integral> {
    let mut values = Vec::with_capacity(breaks.len());
    let mut errors = Vec::with_capacity(breaks.len());
    for w in breaks.windows(2) {
        let r = adaptive_1d(&f, w[0], w[1], cfg)?;
        values.push(r.value);
        errors.push(r.error);
    }
    Ok(Integral::new(pairwise_sum(&values), pairwise_sum(&errors)))
}

/// Trapezoid rule for a `period`-periodic integrand sampled at `n` points
/// starting at `start`. The error estimate is the difference to the rule
/// on every other node (requires even `n`; otherwise infinite).
pub fn periodic_trapezoid<F: Fn(f64) -> f64>(f: F, start: f64, period: f64, n: usize) -> Integral {
    assert!(n > 0, "periodic_trapezoid needs at least one node");
    let h = period / n as f64;
    let samples: Vec<f64> = (0..n).map(|i| f(start + h * i as f64)).collect();
    periodic_trapezoid_samples(&samples, period)
}

/// As [`periodic_trapezoid`] for samples already evaluated on the grid.
pub fn periodic_trapezoid_samples(samples: &[f64], period: f64) -> Integral {
    let n = samples.len();
    let h = period / n as f64;
    let full = pairwise_sum(samples) * h;
    if !n.is_multiple_of(2) {
        return Integral::new(full, f64::INFINITY);
    }
    let even: Vec<f64> = samples.iter().step_by(2).copied().collect();
    let coarse = pairwise_sum(&even) * 2.0 * h;
    Integral::new(full, (full - coarse).abs())
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "gauss_legendre needs n >= 1");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_interval(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    (
        x.iter().map(|xi| c + h * xi).collect(),
        w.iter().map(|wi| wi * h).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tight() -> QuadratureConfig {
        QuadratureConfig::new(1e-13, 1e-13)
    }

    #[test]
    fn sine_over_half_period() {
        let r = adaptive_1d(f64::sin, 0.0, PI, &tight()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn narrow_gaussian_matches_erf() {
        let r = adaptive_1d(|x| (-1000.0 * (x - 0.5) * (x - 0.5)).exp(), 0.0, 1.0, &tight()).unwrap();
        let exact = (PI / 1000.0).sqrt() * libm::erf(1000f64.sqrt() * 0.5);
        assert!((r.value - exact).abs() < 1e-12, "{} vs {}", r.value, exact);
    }

    #[test]
    fn empty_interval_is_zero() {
        let r = adaptive_1d(|x| x.exp(), 1.5, 1.5, &tight()).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.error, 0.0);
    }

    #[test]
    fn reversed_interval_flips_sign() {
        let r = adaptive_1d(|x| x * x, 1.0, 0.0, &tight()).unwrap();
        assert!((r.value + 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn kronrod21_panel_is_exact_for_high_polynomials() {
        let cfg = QuadratureConfig {
            panel_order: 21,
            ..tight()
        };
        let r = adaptive_1d(|x| x.powi(30), 0.0, 1.0, &cfg).unwrap();
        assert!((r.value - 1.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn reports_failure_with_best_value() {
        let cfg = QuadratureConfig {
            max_depth: 3,
            ..tight()
        };
        match adaptive_1d(|x: f64| (x - 1.0 / 3.0).abs().sqrt().recip(), 0.0, 1.0, &cfg) {
            Err(Error::ToleranceNotMet { achieved, .. }) => assert!(achieved > 0.0),
            other => panic!("expected ToleranceNotMet, got {other:?}"),
        }
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::default().validate().is_ok());
        assert!(QuadratureConfig::new(0.0, 1e-3).validate().is_err());
        let deep = QuadratureConfig {
            max_depth: 61,
            ..QuadratureConfig::default()
        };
        assert!(deep.validate().is_err());
    }

    /// Twelve closed-form integrals: polynomial, Gaussian and periodic.
    #[test]
    fn validation_suite() {
        type Case = (Box<dyn Fn(f64) -> f64>, f64, f64, f64);
        let cases: Vec<Case> = vec![
            (Box::new(|x| x * x * x - 2.0 * x + 1.0), -1.0, 2.0, 3.75),
            (Box::new(|x| x.powi(12)), 0.0, 1.0, 1.0 / 13.0),
            (Box::new(|x| 5.0 * x.powi(4)), 0.0, 2.0, 32.0),
            (Box::new(|x| (-x * x).exp()), -10.0, 10.0, PI.sqrt() * libm::erf(10.0)),
            (
                Box::new(|x| (-x * x / 2.0).exp()),
                0.0,
                3.0,
                (PI / 2.0).sqrt() * libm::erf(3.0 / 2f64.sqrt()),
            ),
            (
                Box::new(|x| (-50.0 * (x - 0.3) * (x - 0.3)).exp()),
                -1.0,
                1.0,
                0.5 * (PI / 50.0).sqrt() * (libm::erf(50f64.sqrt() * 0.7) + libm::erf(50f64.sqrt() * 1.3)),
            ),
            (Box::new(|x| x.sin().powi(2)), 0.0, 2.0 * PI, PI),
            (
                Box::new(|x| x.cos().exp()),
                0.0,
                2.0 * PI,
                2.0 * PI * 1.266_065_877_752_008_4,
            ),
            (
                Box::new(|x| 1.0 / (2.0 + x.cos())),
                0.0,
                2.0 * PI,
                2.0 * PI / 3f64.sqrt(),
            ),
            (Box::new(|x| (3.0 * x).cos() * (3.0 * x).cos()), 0.0, PI, PI / 2.0),
            (Box::new(|x| x.exp()), 0.0, 1.0, std::f64::consts::E - 1.0),
            (Box::new(|x| 1.0 / (1.0 + x * x)), 0.0, 1.0, PI / 4.0),
        ];
        assert_eq!(cases.len(), 12);
        for (i, (f, a, b, exact)) in cases.iter().enumerate() {
            let r = adaptive_1d(f, *a, *b, &tight()).unwrap();
            assert!(
                (r.value - exact).abs() <= 1e-12 * exact.abs().max(1.0),
                "case {i}: {} vs {}",
                r.value,
                exact
            );
            assert!(
                r.error <= 1e-12 * exact.abs().max(1.0),
                "case {i}: estimate {}",
                r.error
            );
        }
    }

    #[test]
    fn trapezoid_periodic_is_spectral() {
        let r = periodic_trapezoid(|x| 1.0 / (2.0 + x.cos()), 0.0, 2.0 * PI, 64);
        assert!((r.value - 2.0 * PI / 3f64.sqrt()).abs() < 1e-14);
        assert!(r.error < 1e-10);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in 1..12 {
            let (x, w) = gauss_legendre_interval(n, 0.0, 2.0);
            for deg in 0..(2 * n) {
                let s: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                let exact = 2f64.powi(deg as i32 + 1) / (deg as f64 + 1.0);
                assert!((s - exact).abs() < 1e-12 * exact, "n={n} deg={deg}");
            }
        }
    }
}
