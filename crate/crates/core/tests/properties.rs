use std::f64::consts::{PI, TAU};

use curveheat::curve::{frenet, make_builtin, ArcLengthTable, CurveFamily, CurveSpec};
use curveheat::heat::{circle_closed_form, heat_content_direct};
use curveheat::laplace::{calibrate_for_radius, heat_series};
use curveheat::numerics::{bessel_i0_scaled, QuadratureConfig};
use curveheat::phase::{phase_jet_analytic, phase_jet_numeric};
use curveheat::tube::{admissible_radius, tube_heat_content, tube_measures, TubeSpec};
use proptest::prelude::*;

fn any_curve() -> impl Strategy<Value = CurveSpec> {
    prop_oneof![
        (0.2f64..5.0).prop_map(|r| make_builtin(CurveFamily::Circle, &[r]).unwrap()),
        (1.0f64..3.0, 0.4f64..1.0).prop_map(|(a, f)| make_builtin(CurveFamily::Ellipse, &[a, a * f]).unwrap()),
        (1.6f64..3.0, 0.5f64..1.0).prop_map(|(r0, r1)| make_builtin(CurveFamily::Trefoil, &[r0, r1]).unwrap()),
    ]
}

fn table(c: &CurveSpec) -> ArcLengthTable {
    ArcLengthTable::build(c, 512).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn frame_is_orthonormal(c in any_curve(), x in 0.0f64..1.0) {
        prop_assume!(c.validate().is_ok());
        let t = table(&c);
        let f = frenet(&c, &t, x * t.length()).unwrap();
        for v in [f.tangent, f.normal, f.binormal] {
            prop_assert!((v.norm() - 1.0).abs() < 1e-10);
        }
        prop_assert!(f.tangent.dot(&f.normal).abs() < 1e-10);
        prop_assert!(f.tangent.dot(&f.binormal).abs() < 1e-10);
        prop_assert!(f.normal.dot(&f.binormal).abs() < 1e-10);
    }

    #[test]
    fn length_is_shift_invariant(c in any_curve(), shift in -10.0f64..10.0) {
        let l0 = table(&c).length();
        let l1 = table(&c.shifted(shift)).length();
        prop_assert!((l1 / l0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scaling_scales_length_and_curvature(c in any_curve(), factor in 0.5f64..3.0, x in 0.0f64..1.0) {
        prop_assume!(c.validate().is_ok());
        let (t0, scaled) = (table(&c), c.scaled(factor));
        let t1 = table(&scaled);
        prop_assert!((t1.length() / (factor * t0.length()) - 1.0).abs() < 1e-12);
        let s = x * t0.length();
        let k0 = frenet(&c, &t0, s).unwrap().curvature;
        let k1 = frenet(&scaled, &t1, factor * s).unwrap().curvature;
        prop_assert!((k1 * factor / k0 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn analytic_odd_jet_entries_vanish(c in any_curve(), x in 0.0f64..1.0) {
        prop_assume!(c.validate().is_ok());
        let t = table(&c);
        let j = phase_jet_analytic(&c, &t, x * t.length()).unwrap();
        prop_assert_eq!(j.d[0], 0.0);
        prop_assert_eq!(j.d[1], 0.0);
        prop_assert_eq!(j.d[3], 0.0);
        prop_assert!((j.d[2] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn jet_survives_parameter_rotation(c in any_curve(), shift in 0.1f64..6.0, x in 0.0f64..1.0) {
        prop_assume!(c.validate().is_ok());
        let (t0, rotated) = (table(&c), c.shifted(shift));
        let t1 = table(&rotated);
        let s0 = x * t0.length();
        // γ̃(u) = γ(u + shift), so γ̃ at u(s₀) − shift is γ at u(s₀).
        let u = t0.u_of_s(&c, s0) - shift;
        let s1 = t1.s_of_u(&rotated, u.rem_euclid(TAU));
        let a = phase_jet_analytic(&c, &t0, s0).unwrap();
        let b = phase_jet_analytic(&rotated, &t1, s1).unwrap();
        for i in [2, 4, 5, 6] {
            let scale = a.d[i].abs().max(1.0);
            prop_assert!((a.d[i] - b.d[i]).abs() < 1e-10 * scale, "d[{}] {} {}", i, a.d[i], b.d[i]);
        }
    }

    #[test]
    fn heat_content_positive_and_tolerance_respected(r in 0.3f64..3.0, lt in -4.0f64..1.0) {
        let c = make_builtin(CurveFamily::Circle, &[r]).unwrap();
        let t = 10f64.powf(lt) * r * r;
        let h = heat_content_direct(&c, &table(&c), t, &QuadratureConfig::default()).unwrap();
        let exact = circle_closed_form(r, t);
        prop_assert!(h.value > 0.0);
        prop_assert!((h.value / exact - 1.0).abs() < 1e-8);
    }

    #[test]
    fn bessel_scaled_decreasing_and_bounded(x in 0.0f64..1e6, dx in 1e-6f64..10.0) {
        let (a, b) = (bessel_i0_scaled(x), bessel_i0_scaled(x + dx));
        prop_assert!(a <= 1.0 && b > 0.0);
        prop_assert!(b <= a);
    }

    #[test]
    fn tube_measures_exact(c in any_curve(), frac in 0.05f64..0.95) {
        prop_assume!(c.validate().is_ok());
        let t = table(&c);
        let eps = frac * admissible_radius(&c, &t).unwrap();
        let m = tube_measures(&c, &t, eps).unwrap();
        prop_assert!((m.vol_quadrature / m.vol - 1.0).abs() < 1e-10);
        prop_assert!((m.surf_quadrature / m.surf - 1.0).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    #[test]
    fn jets_match_finite_differences(c in any_curve(), x in 0.0f64..1.0) {
        prop_assume!(c.validate().is_ok());
        let t = table(&c);
        let tau = x * t.length();
        let a = phase_jet_analytic(&c, &t, tau).unwrap();
        let n = phase_jet_numeric(&c, &t, tau, 1e-2).unwrap();
        let kmax = c.check_biregular().unwrap().max_curvature;
        for (i, tol) in [(2, 1e-4), (4, 1e-4), (5, 1e-3), (6, 1e-3)] {
            let scale = a.d[i].abs().max(kmax.powi(i as i32 - 2));
            prop_assert!((a.d[i] - n.d[i]).abs() < tol * scale, "d[{}]: {} vs {}", i, a.d[i], n.d[i]);
        }
    }

    #[test]
    fn constants_are_scale_free(r in 0.5f64..3.0) {
        let cal = calibrate_for_radius(r, 1e-4).unwrap();
        prop_assert_eq!(cal.constants, [1.0, 2.0, 12.0]);
    }
}

#[test]
fn series_small_time_limit() {
    for c in [
        make_builtin(CurveFamily::Circle, &[1.0]).unwrap(),
        make_builtin(CurveFamily::Ellipse, &[2.0, 1.0]).unwrap(),
    ] {
        let tb = table(&c);
        let l = tb.length();
        let t = 1e-5;
        let h = heat_content_direct(&c, &tb, t, &QuadratureConfig::default()).unwrap();
        let scaled = h.value * 4.0 * PI * t * l * l;
        assert!((scaled / l - 1.0).abs() < 1e-3, "{scaled} vs {l}");
        let s = heat_series(&c, &tb, 2).unwrap();
        assert!((s.eval(t) / h.value - 1.0).abs() < 1e-6);
    }
}

#[test]
fn tube_converges_pointwise_on_circle() {
    let c = make_builtin(CurveFamily::Circle, &[1.0]).unwrap();
    let tb = table(&c);
    for t in [0.05, 0.1, 0.2] {
        let exact = circle_closed_form(1.0, t);
        let gaps: Vec<f64> = [0.2, 0.1, 0.05, 0.025]
            .iter()
            .map(|&e| (tube_heat_content(&c, &tb, t, &TubeSpec::new(e)).unwrap().value - exact).abs())
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "t = {t}: {gaps:?}");
    }
}
