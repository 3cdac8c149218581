//! The five experiments behind the subcommands.

use std::f64::consts::PI;

use super::config::{Command, ExperimentConfig};
use super::report::Report;
use super::svg::{Panel, Series};
use crate::curve::{check_embedded, ArcLengthTable, CurveFamily, CurveSpec};
use crate::error::{Error, Result};
use crate::heat::{circle_closed_form, heat_content_direct, EvalGrid};
use crate::laplace::{
    calibration, coefficient_integrals, heat_series, laplace_integral_numeric, power_of_two_constant,
};
use crate::numerics::{bessel_i0_scaled, geometric_grid, powerbasis_fit, QuadratureConfig};
use crate::tube::{admissible_radius, tube_alpha_coeffs, tube_heat_content, TubeBackend, TubeSpec, EXPANSION_RATIO};

/// Half-integer exponents are reported present when the integer basis
/// leaves a residual this many times larger than the half-integer basis.
pub const BASIS_PREFERENCE: f64 = 10.0;
/// Points in each small-time fit.
pub const FIT_POINTS: usize = 8;
/// Laplace parameters listed by the oracle.
pub const ORACLE_LAMBDAS: [f64; 4] = [1.0, 10.0, 100.0, 1000.0];

/// A failed run, with whatever rows were produced before the failure.
#[derive(Debug)]
pub struct Failure {
    pub error: Error,
    pub partial: Option<Report>,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure { error, partial: None }
    }
}

/// Report plus optional plot panels.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub panels: Vec<Panel>,
}

pub fn run(cfg: &ExperimentConfig) -> std::result::Result<Outcome, Failure> {
    match cfg.command {
        Command::Expand => cmd_expand(cfg).map_err(Failure::from),
        Command::Direct => cmd_direct(cfg).map_err(Failure::from),
        Command::Tube => cmd_tube(cfg).map_err(Failure::from),
        Command::Compare => cmd_compare(cfg),
        Command::Oracle => cmd_oracle(cfg).map_err(Failure::from),
    }
}

fn quad(cfg: &ExperimentConfig) -> QuadratureConfig {
    QuadratureConfig::new(1e-14, cfg.tol)
}

fn series(name: impl Into<String>, x: &[f64], y: Vec<f64>) -> Series {
    Series {
        name: name.into(),
        x: x.to_vec(),
        y,
    }
}

pub fn cmd_expand(cfg: &ExperimentConfig) -> Result<Outcome> {
    let (curve, table) = cfg.build_curve()?;
    check_embedded(&curve, &table)?;
    let cal = calibration()?;
    let ints = coefficient_integrals(&curve, &table)?;
    let mut report = Report::new(&["i", "C_i_calibrated", "C_i_paper", "integral_a2i", "alpha_i"]);
    for (i, (c, int)) in cal.constants.iter().zip(&ints).enumerate() {
        report.push(vec![
            (i as f64).into(),
            (*c).into(),
            power_of_two_constant(i).into(),
            int.value.into(),
            (c * int.value).into(),
        ]);
    }
    for i in 0..3 {
        let printed = power_of_two_constant(i);
        report.note_num(&format!("C{i}_raw_fit"), cal.raw[i]);
        report.note_num(&format!("C{i}_printed_minus_calibrated"), printed - cal.constants[i]);
        report.note_num(&format!("C{i}_printed_over_calibrated"), printed / cal.constants[i]);
    }
    report.note_num("calibration_fit_relative_residual", cal.relative_residual);
    let unit = crate::curve::make_builtin(CurveFamily::Circle, &[1.0])?;
    let unit_table = ArcLengthTable::build(&unit, super::config::TABLE_NODES)?;
    let s = heat_series(&unit, &unit_table, 2)?;
    let t = 1e-3;
    let exact = circle_closed_form(1.0, t);
    report.note_num(
        "unit_circle_series_relative_residual_at_t_1e-3",
        (s.eval(t) - exact).abs() / exact,
    );
    Ok(Outcome { report, panels: vec![] })
}

pub fn cmd_direct(cfg: &ExperimentConfig) -> Result<Outcome> {
    let (curve, table) = cfg.build_curve()?;
    let times = cfg.times();
    let grid = EvalGrid::new(times.clone(), quad(cfg))?;
    let values = crate::heat::heat_content_grid(&curve, &table, &grid)?;
    let mut report = Report::new(&["t", "H_S", "abs_error_estimate"]);
    for (t, h) in times.iter().zip(&values) {
        report.push(vec![(*t).into(), h.value.into(), h.error.into()]);
    }
    report.note_num("length", table.length());
    let panels = vec![Panel {
        title: "H_S(t)".into(),
        series: vec![series("direct", &times, values.iter().map(|h| h.value).collect())],
    }];
    Ok(Outcome { report, panels })
}

fn check_radii(curve: &CurveSpec, table: &ArcLengthTable, eps: &[f64]) -> Result<()> {
    let limit = admissible_radius(curve, table)?;
    match eps.iter().find(|e| **e >= limit) {
        Some(&e) => Err(Error::TubeTooWide { eps: e, limit }),
        None => Ok(()),
    }
}

pub fn cmd_tube(cfg: &ExperimentConfig) -> Result<Outcome> {
    let (curve, table) = cfg.build_curve()?;
    check_radii(&curve, &table, &cfg.eps)?;
    let times = cfg.times();
    let mut report = Report::new(&["eps", "t", "H_eps", "abs_error", "vol", "alpha1_eps", "alpha3_eps"]);
    let mut panels = vec![Panel {
        title: "H_eps(t)".into(),
        series: vec![],
    }];
    for &eps in &cfg.eps {
        let mut spec = TubeSpec::new(eps).with_backend(cfg.backend);
        spec.samples = cfg.samples;
        spec.seed = cfg.seed;
        let s = tube_alpha_coeffs(&curve, &table, eps)?;
        let mut ys = Vec::with_capacity(times.len());
        for &t in &times {
            let h = tube_heat_content(&curve, &table, t, &spec)?;
            report.push(vec![
                eps.into(),
                t.into(),
                h.value.into(),
                h.error.into(),
                s.vol.into(),
                s.alpha1_eps.into(),
                s.alpha3_eps.into(),
            ]);
            ys.push(h.value);
        }
        panels[0].series.push(series(format!("eps={eps}"), &times, ys));
    }
    report.note("backend", cfg.backend);
    Ok(Outcome { report, panels })
}

/// Three-term fits of the same data in the integer and half-integer bases.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisComparison {
    pub integer: Vec<f64>,
    pub half: Vec<f64>,
    /// Maximum residuals relative to `max |y|`.
    pub residual_integer: f64,
    pub residual_half: f64,
}

impl BasisComparison {
    pub fn half_integer_present(&self) -> bool {
        self.residual_integer > BASIS_PREFERENCE * self.residual_half
    }
}

pub fn compare_bases(t: &[f64], y: &[f64]) -> Result<BasisComparison> {
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let int = powerbasis_fit(t, y, &[0.0, 1.0, 2.0])?;
    let half = powerbasis_fit(t, y, &[0.0, 0.5, 1.5])?;
    Ok(BasisComparison {
        residual_integer: int.max_residual / scale,
        residual_half: half.max_residual / scale,
        integer: int.coeffs,
        half: half.coeffs,
    })
}

fn note_bases(report: &mut Report, prefix: &str, b: &BasisComparison) {
    report.note_num(&format!("{prefix}.residual_integer_basis"), b.residual_integer);
    report.note_num(&format!("{prefix}.residual_half_integer_basis"), b.residual_half);
    let flag = if b.half_integer_present() { "present" } else { "absent" };
    report.note(&format!("{prefix}.half_integer_exponents"), flag);
}

/// Times `geometric((ε/100)², (ε/EXPANSION_RATIO)²)` used for the tube fits.
pub fn tube_fit_times(eps: f64) -> Vec<f64> {
    geometric_grid((eps / 100.0).powi(2), (eps / EXPANSION_RATIO).powi(2), FIT_POINTS)
}

pub fn cmd_compare(cfg: &ExperimentConfig) -> std::result::Result<Outcome, Failure> {
    let (curve, table) = cfg.build_curve()?;
    let emb = check_embedded(&curve, &table)?;
    check_radii(&curve, &table, &cfg.eps)?;
    let hs = heat_series(&curve, &table, 2)?;
    let tube_series = cfg
        .eps
        .iter()
        .map(|&e| tube_alpha_coeffs(&curve, &table, e))
        .collect::<Result<Vec<_>>>()?;
    let mut header = vec!["t".to_string(), "H_direct".into(), "H_series".into()];
    for e in &cfg.eps {
        header.push(format!("H_tube_eps={e}"));
        header.push(format!("tube_series_eps={e}"));
    }
    let mut report = Report {
        header,
        ..Default::default()
    };
    let q = quad(cfg);
    let times = cfg.times();
    let specs: Vec<TubeSpec> = cfg
        .eps
        .iter()
        .map(|&e| TubeSpec::new(e).with_backend(TubeBackend::Boundary))
        .collect();
    let fail = |report: &Report, error: Error| Failure {
        error,
        partial: Some(report.clone()),
    };
    for &t in &times {
        let direct = match heat_content_direct(&curve, &table, t, &q) {
            Ok(h) => h.value,
            Err(e) => return Err(fail(&report, e)),
        };
        let mut row = vec![t.into(), direct.into(), hs.eval(t).into()];
        for (spec, s) in specs.iter().zip(&tube_series) {
            match tube_heat_content(&curve, &table, t, spec) {
                Ok(h) => row.push(h.value.into()),
                Err(e) => return Err(fail(&report, e)),
            }
            row.push(s.eval(t).into());
        }
        report.push(row);
    }
    if let Err(e) = compare_summary(
        cfg,
        &curve,
        &table,
        emb.max_curvature,
        &tube_series,
        &specs,
        &mut report,
    ) {
        return Err(fail(&report, e));
    }

    let col = |name: &str| report.column(name).unwrap_or_default();
    let direct = col("H_direct");
    let mut curves = vec![
        series("direct", &times, direct.clone()),
        series("series", &times, col("H_series")),
    ];
    let mut gaps = vec![];
    for e in &cfg.eps {
        let tube = col(&format!("H_tube_eps={e}"));
        gaps.push(series(
            format!("|tube - direct|/direct, eps={e}"),
            &times,
            tube.iter().zip(&direct).map(|(a, b)| (a - b) / b).collect(),
        ));
        curves.push(series(format!("tube eps={e}"), &times, tube));
    }
    let panels = vec![
        Panel {
            title: "heat content".into(),
            series: curves,
        },
        Panel {
            title: "relative gap".into(),
            series: gaps,
        },
    ];
    Ok(Outcome { report, panels })
}

fn compare_summary(
    cfg: &ExperimentConfig,
    curve: &CurveSpec,
    table: &ArcLengthTable,
    max_curvature: f64,
    tube_series: &[crate::tube::TubeSeries],
    specs: &[TubeSpec],
    report: &mut Report,
) -> Result<()> {
    let l = table.length();
    let q = quad(cfg);

    // Direct data, scaled by 4πtℓ², at times small against 1/k².
    let k2 = max_curvature * max_curvature;
    let td = geometric_grid(1e-4 / k2, 1e-2 / k2, 2 * FIT_POINTS);
    let yd = td
        .iter()
        .map(|&t| heat_content_direct(curve, table, t, &q).map(|h| h.value * 4.0 * PI * t * l * l))
        .collect::<Result<Vec<f64>>>()?;
    let bd = compare_bases(&td, &yd)?;
    report.note_num("direct.fit_tmin", td[0]);
    report.note_num("direct.fit_tmax", td[td.len() - 1]);
    note_bases(report, "direct", &bd);
    for (i, c) in bd.integer.iter().enumerate() {
        report.note_num(&format!("direct.alpha{i}_fitted"), *c);
    }

    // Tube data, scaled by |S_ε|², at times with √t ≤ ε/10.
    let mut beta1 = Vec::new();
    let mut beta3 = Vec::new();
    for (spec, s) in specs.iter().zip(tube_series) {
        let eps = spec.eps;
        let tt = tube_fit_times(eps);
        let yt = tt
            .iter()
            .map(|&t| tube_heat_content(curve, table, t, spec).map(|h| h.value * s.vol * s.vol))
            .collect::<Result<Vec<f64>>>()?;
        let bt = compare_bases(&tt, &yt)?;
        let p = format!("tube[{eps}]");
        report.note_num(&format!("{p}.fit_tmin"), tt[0]);
        report.note_num(&format!("{p}.fit_tmax"), tt[tt.len() - 1]);
        note_bases(report, &p, &bt);
        report.note_num(&format!("{p}.beta0"), bt.half[0]);
        report.note_num(&format!("{p}.beta1"), bt.half[1]);
        report.note_num(&format!("{p}.beta3"), bt.half[2]);
        report.note_num(&format!("{p}.vol"), s.vol);
        report.note_num(&format!("{p}.alpha1_analytic"), s.alpha1_eps);
        report.note_num(&format!("{p}.alpha3_analytic"), s.alpha3_eps);
        report.note_num(&format!("{p}.eps_times_beta3"), eps * bt.half[2]);
        report.note_num(&format!("{p}.beta1_over_eps"), bt.half[1] / eps);
        beta1.push(bt.half[1]);
        beta3.push(bt.half[2]);
    }

    let eps: Vec<f64> = specs.iter().map(|s| s.eps).collect();
    if eps.len() >= 3 {
        let reference = PI.sqrt() * l / 2.0;
        let blow = powerbasis_fit(&eps, &beta3, &[-1.0])?;
        let c = blow.coeffs[0];
        report.note_num("alpha3_blowup.c", c);
        report.note_num("alpha3_blowup.reference", reference);
        report.note_num("alpha3_blowup.rel_diff", (c - reference).abs() / reference);
        let lin = powerbasis_fit(&eps, &beta1, &[1.0])?;
        let slope = lin.coeffs[0];
        let reference = -2.0 * l * PI.sqrt();
        let scale = beta1.iter().fold(0.0f64, |m, b| m.max(b.abs()));
        report.note_num("alpha1_linear.slope", slope);
        report.note_num("alpha1_linear.reference", reference);
        report.note_num("alpha1_linear.rel_diff", (slope - reference).abs() / reference.abs());
        report.note_num("alpha1_linear.max_rel_residual", lin.max_residual / scale);
    } else {
        report.note("alpha3_blowup", "needs at least three radii");
        report.note("alpha1_linear", "needs at least three radii");
    }

    // Gap to the curve at the largest time, in order of decreasing ε.
    let last = report.rows.len() - 1;
    let t = cfg.times()[last];
    let d = match &report.rows[last][1] {
        super::report::Cell::Num(x) => *x,
        super::report::Cell::Text(_) => f64::NAN,
    };
    let mut gaps = Vec::new();
    for (j, e) in eps.iter().enumerate() {
        if let super::report::Cell::Num(h) = report.rows[last][3 + 2 * j] {
            gaps.push((h - d).abs());
            report.note_num(&format!("convergence[{e}].abs_gap"), (h - d).abs());
        }
    }
    report.note_num("convergence.t", t);
    let mono = gaps.windows(2).all(|w| w[1] < w[0]);
    report.note("convergence.strictly_decreasing", mono);
    Ok(())
}

pub fn cmd_oracle(cfg: &ExperimentConfig) -> Result<Outcome> {
    if cfg.curve != CurveFamily::Circle {
        return Err(Error::InvalidParameter(format!(
            "the oracle is only available for the circle, got {}",
            cfg.curve
        )));
    }
    let r = cfg.params[0];
    let (curve, table) = cfg.build_curve()?;
    let q = quad(cfg);
    let mut report = Report::new(&["quantity", "x", "reference", "numeric", "rel_diff"]);
    let times = cfg.times();
    let mut exact = Vec::new();
    let mut direct = Vec::new();
    for &t in &times {
        let reference = circle_closed_form(r, t);
        let h = heat_content_direct(&curve, &table, t, &q)?;
        report.push(vec![
            "heat_content".into(),
            t.into(),
            reference.into(),
            h.value.into(),
            ((h.value - reference) / reference).abs().into(),
        ]);
        exact.push(reference);
        direct.push(h.value);
    }
    for lambda in ORACLE_LAMBDAS {
        // ∫₀^{2πR} e^{−4λR² sin²(s/2R)} ds = 2πR e^{−2λR²} I₀(2λR²)
        let reference = 2.0 * PI * r * bessel_i0_scaled(2.0 * lambda * r * r);
        let i = laplace_integral_numeric(&curve, &table, 0.0, lambda)?;
        report.push(vec![
            "laplace_integral".into(),
            lambda.into(),
            reference.into(),
            i.value.into(),
            ((i.value - reference) / reference).abs().into(),
        ]);
    }
    let panels = vec![Panel {
        title: "circle heat content".into(),
        series: vec![series("closed form", &times, exact), series("direct", &times, direct)],
    }];
    Ok(Outcome { report, panels })
}
