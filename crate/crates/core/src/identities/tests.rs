use std::f64::consts::{E, PI};

use proptest::prelude::*;

use super::*;
use crate::contour::ContourConfig;
use crate::error::Error;
use crate::function::EntireFunction;
use crate::orbit::{wiman_candidates, wiman_search};

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn cfg() -> ContourConfig {
    ContourConfig::default()
}

fn assert_pass(r: &IdentityReport) {
    assert!(r.pass, "{:?} failed: {r:#?}", r.identity_id);
}

#[test]
fn q_lambda_values() {
    assert_eq!(QLambda::new(0).eval(c(0.3, 0.1)), c(0.0, 0.0));
    let u = c(0.4, -0.2);
    let q2 = QLambda::new(2).eval(u);
    assert!((q2 - (u + u * u / 2.0)).norm() < 1e-15);
    assert!((QLambda::new(1).factor(u) - (c(1.0, 0.0) - u) * u.exp()).norm() < 1e-15);
}

#[test]
fn poly_vieta_examples() {
    let r = verify_poly_vieta(&EntireFunction::quadratic_zz(), c(1.0, 0.0), &cfg()).unwrap();
    assert_pass(&r);
    assert!((r.rhs - c(2.0, 0.0)).norm() < 1e-8);
    let r = verify_poly_vieta(&EntireFunction::monomial(3), c(1.0, 0.0), &cfg()).unwrap();
    assert_pass(&r);
    assert!((r.rhs - c(1.0, 0.0)).norm() < 1e-8);
}

#[test]
fn poly_vieta_rejects_fiber_through_origin() {
    // p(z) = p(0) puts 0 in the orbit
    assert!(verify_poly_vieta(&EntireFunction::quadratic_zz(), c(-1.0, 0.0), &cfg()).is_err());
}

#[test]
fn vieta_coefficients_cossqrt() {
    let f = EntireFunction::cos_sqrt();
    let r = verify_vieta_coefficients(&f, c(1.0, 0.0), 1, 1e4, OrbitSource::Engine, &cfg()).unwrap();
    assert_pass(&r);
    assert!((r.lhs - c(-0.5, 0.0)).norm() < 1e-15);
}

#[test]
fn vieta_coefficients_quarter_order() {
    let f = EntireFunction::quarter_order();
    let r = verify_vieta_coefficients(&f, c(1.0, 0.0), 1, 1e6, OrbitSource::Engine, &cfg()).unwrap();
    assert_pass(&r);
    assert!(r.abs_err < 1e-2);
}

#[test]
fn vieta_coefficients_pi_squared_over_four() {
    let f = EntireFunction::cos_sqrt();
    let z = c(PI * PI, 0.0);
    // orbit points ((2k+1)π)² up to k = 10⁴, each double
    let radius = (PI * (2.0 * 1e4 + 2.0)).powi(2);
    let r = verify_vieta_coefficients(&f, z, 1, radius, OrbitSource::Oracle, &cfg()).unwrap();
    assert_pass(&r);
    // a_1 = -(f(0) - f(π²)) Σ 1/φ = -2 Σ 1/φ, and π² Σ 1/φ = π²/4
    let value = -r.rhs.re / 2.0 * PI * PI;
    assert!((value - PI * PI / 4.0).abs() < 1e-3, "{value}");
}

#[test]
fn vieta_coefficients_rejects_order_one() {
    let r = verify_vieta_coefficients(&EntireFunction::exp(), c(1.0, 0.0), 1, 10.0, OrbitSource::Engine, &cfg());
    assert!(matches!(r, Err(Error::OrderTooHigh { .. })));
}

#[test]
fn jensen_examples() {
    let r = verify_jensen(&EntireFunction::exp(), c(1.0, 0.0), 3, &cfg()).unwrap();
    assert_pass(&r);
    assert!((r.lhs.re - (1.0 + 4.0 * PI * PI)).abs() < 1e-8);
    let r = verify_jensen(&EntireFunction::quadratic_zz(), c(1.0, 0.0), 1, &cfg()).unwrap();
    assert_pass(&r);
    assert!((r.lhs.re - 1.0).abs() < 1e-12);
    let r = verify_jensen(&EntireFunction::monomial(4), c(1.0, 0.0), 4, &cfg()).unwrap();
    assert_pass(&r);
    assert!((r.lhs.re - 1.0).abs() < 1e-12);
}

#[test]
fn derivative_sum_examples() {
    let r = verify_derivative_sums(&EntireFunction::exp(), c(1.0, 0.0), 10.0, 1, &cfg()).unwrap();
    assert_pass(&r);
    assert!((r.lhs - c(3.0, 0.0)).norm() < 1e-8);
    let f = EntireFunction::cos_sqrt();
    let r = verify_derivative_sums(&f, c(1.0, 0.0), 200.0, 1, &cfg()).unwrap();
    assert_pass(&r);
    assert!((r.rhs - c(5.0, 0.0)).norm() < 1e-8);
    let r = verify_derivative_sums(&f, c(1.0, 0.0), 200.0, 2, &cfg()).unwrap();
    assert_pass(&r);
    assert!(r.rhs.norm() < 1e-8);
}

#[test]
fn derivative_sums_third_order() {
    for f in [EntireFunction::exp(), EntireFunction::cos_sqrt(), EntireFunction::quadratic_zz()] {
        let r = verify_derivative_sums(&f, c(0.7, 0.4), 30.0, 3, &cfg()).unwrap();
        assert_pass(&r);
    }
}

#[test]
fn vanishing_sums_quarter_order_and_exp() {
    let f = EntireFunction::quarter_order();
    let z = c(1.0, 0.0);
    let wr = wiman_search(&f, z, 0.25, 0.05, 1e2, 1e8, &cfg()).unwrap();
    let r = verify_vanishing_sums(&f, z, &wr, 1, &cfg()).unwrap();
    assert_pass(&r);
    let exp = EntireFunction::exp();
    let wr = wiman_candidates(&exp, 1.0, 0.05, &[10.0, 20.0, 40.0, 80.0]).unwrap();
    let r = verify_vanishing_sums(&exp, z, &wr, 1, &cfg()).unwrap();
    assert!(!r.pass);
    assert!(r.notes.contains("false"));
}

#[test]
fn vanishing_sums_cossqrt_first_order_does_not_vanish() {
    let f = EntireFunction::cos_sqrt();
    let wr = wiman_candidates(&f, 0.5, 0.05, &[1e2, 1e3, 1e4, 1e5]).unwrap();
    let r = verify_vanishing_sums(&f, c(1.0, 0.0), &wr, 1, &cfg()).unwrap();
    assert!(!r.pass);
}

#[test]
fn circular_density_quarter_order() {
    let f = EntireFunction::quarter_order();
    for z in [c(1.0, 0.0), c(2.0, 1.0)] {
        let wr = wiman_search(&f, z, 0.25, 0.05, 1e2, 1e8, &cfg()).unwrap();
        let r = verify_circular_density(&f, z, &wr, 0.25, &cfg()).unwrap();
        assert_pass(&r);
    }
}

#[test]
fn circular_density_single_radius_is_inconclusive() {
    let f = EntireFunction::quarter_order();
    let wr = wiman_candidates(&f, 0.25, 0.05, &[1e4]).unwrap();
    let r = verify_circular_density(&f, c(1.0, 0.0), &wr, 0.25, &cfg()).unwrap();
    assert!(!r.pass && r.notes.contains("inconclusive"));
}

#[test]
fn fixed_point_examples() {
    let r = verify_fixed_points(&EntireFunction::quadratic_zz(), 4.0, &cfg()).unwrap();
    assert_pass(&r);
    assert_eq!(r.rhs, c(1.0, 0.0));
    // π², 4π² and 9π² ≈ 88.8 all lie below 100
    let r = verify_fixed_points(&EntireFunction::cos_sqrt(), 100.0, &cfg()).unwrap();
    assert_pass(&r);
    assert_eq!(r.rhs, c(3.0, 0.0));
    let r = verify_fixed_points(&EntireFunction::exp(), 30.0, &cfg()).unwrap();
    assert_pass(&r);
    assert_eq!(r.rhs, c(0.0, 0.0));
}

#[test]
fn partial_sum_reconstruction_examples() {
    let r = verify_reconstruction_partial_sums(&EntireFunction::exp(), c(1.0, 0.0), c(0.5, 0.0), &[10, 20, 30]).unwrap();
    assert_pass(&r);
    let r =
        verify_reconstruction_partial_sums(&EntireFunction::cos_sqrt(), c(1.0, 0.0), c(0.3, 0.0), &[8, 16, 24]).unwrap();
    // the truncation error is below ε from n = 8 on, so every entry sits at rounding level
    assert_pass(&r);
    assert!(r.sequence.iter().all(|e| *e <= 1e-6), "{:?}", r.sequence);
    let r = verify_reconstruction_partial_sums(&EntireFunction::quadratic_zz(), c(1.5, 0.0), c(0.5, 0.2), &[2]).unwrap();
    assert_pass(&r);
    assert!(r.abs_err <= 1e-12);
}

#[test]
fn low_order_reconstruction_examples() {
    let r = reconstruct_low_order(&EntireFunction::cos_sqrt(), c(4.0, 0.0), c(1.0, 0.0), 1e4, &cfg()).unwrap();
    assert_pass(&r);
    assert!(r.abs_err < 1e-2);
    let r = reconstruct_low_order(&EntireFunction::quadratic_zz(), c(1.0, 0.0), c(3.0, 0.0), 10.0, &cfg()).unwrap();
    assert_pass(&r);
    assert!((r.lhs - c(2.0, 0.0)).norm() < 1e-10);
    let r = reconstruct_low_order(&EntireFunction::quarter_order(), c(1.5, 0.0), c(0.5, 0.0), 1e6, &cfg()).unwrap();
    assert_pass(&r);
    assert!(r.abs_err < 1e-3);
}

#[test]
fn exp_g_closed_form_examples() {
    let z = c(0.3, 1.1);
    let r = verify_exp_g_closed_form(c(0.0, 0.0), z, 1000).unwrap();
    assert_pass(&r);
    assert!((g_closed_exp(c(0.0, 0.0), z).unwrap() - (c(1.0, 0.0) - z.exp())).norm() < 1e-14);
    assert_pass(&verify_exp_g_closed_form(c(1.0, 0.0), c(0.0, PI), 100_000).unwrap());
    assert_pass(&verify_exp_g_closed_form(c(1.0, 0.0), c(0.7, 0.0), 100_000).unwrap());
}

#[test]
fn exp_g_closed_form_rejects_poles() {
    assert!(matches!(g_closed_exp(c(1.0, 0.0), c(0.0, 2.0 * PI)), Err(Error::NearPole { .. })));
}

#[test]
fn shift_t_integer_and_additive() {
    assert_eq!(compute_shift_t_exp(0, c(1.0, 0.0), c(0.5, 0.5)).unwrap(), 0);
    for (w, z) in [(c(0.3, 0.2), c(1.2, -0.4)), (c(1.5, 0.0), c(-0.7, 0.9)), (c(-1.0, 1.0), c(0.2, 0.1))] {
        let t1 = compute_shift_t_exp(1, w, z).unwrap();
        let t2 = compute_shift_t_exp(2, w, z).unwrap();
        assert_eq!(t2, 2 * t1);
        for k in -3..=3 {
            compute_shift_t_exp(k, w, z).unwrap();
        }
    }
}

#[test]
fn negative_moment_discrepancy_is_constant() {
    let zs = [c(0.5, 0.0), c(1.0, 1.0), c(-0.7, 0.3), c(0.0, PI), c(1.5, -0.8)];
    let r = verify_negative_moment_g(&zs, 100_000).unwrap();
    assert_pass(&r);
    assert!((r.rhs - c(0.5, 0.0)).norm() < 1e-6);
}

#[test]
fn cycle_chain_examples() {
    let r = verify_cycle_chain(&EntireFunction::exp(), &[c(1.0, 0.0), c(0.0, 2.0), c(-0.5, 0.0)]).unwrap();
    assert_pass(&r);
    let pts = [c(0.1, 0.2), c(1.3, -0.4), c(-2.0, 0.5), c(0.7, 0.7), c(3.0, 1.0)];
    assert_pass(&verify_cycle_chain(&EntireFunction::cos_sqrt(), &pts).unwrap());
    let repeated = [c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)];
    assert!(verify_cycle_chain(&EntireFunction::exp(), &repeated).is_err());
}

#[test]
fn orbit_nesting_examples() {
    let sq = EntireFunction::monomial(2);
    let r = verify_orbit_nesting(&EntireFunction::exp(), &sq, c(0.3, 0.2), 20.0, &cfg()).unwrap();
    assert_pass(&r);
    let cube = EntireFunction::monomial(3);
    assert_pass(&verify_orbit_nesting(&EntireFunction::quadratic_zz(), &cube, c(1.0, 0.5), 5.0, &cfg()).unwrap());
    let f = EntireFunction::ng_factor(c(0.5, 0.0));
    let h = EntireFunction::ng_factor(c(0.3, 0.0));
    assert_pass(&verify_orbit_nesting(&f, &h, c(0.2, 0.1), 3.0, &cfg()).unwrap());
}

#[test]
fn fiber_stability_examples() {
    let one = c(1.0, 0.0);
    // (w - 1)(w - 2) e^w
    let f = EntireFunction::poly_times_exp(&[c(2.0, 0.0), c(-3.0, 0.0), one], &[c(0.0, 0.0), one]).unwrap();
    let r = verify_fiber_stability(&f, &[5.0, 10.0, 50.0], &cfg()).unwrap();
    assert_pass(&r);
    assert_eq!(r.sequence, vec![2.0, 2.0, 2.0]);
    // (w - 3) e^{w²}
    let f = EntireFunction::poly_times_exp(&[c(-3.0, 0.0), one], &[c(0.0, 0.0), c(0.0, 0.0), one]).unwrap();
    let r = verify_fiber_stability(&f, &[4.0, 5.0, 6.0], &cfg()).unwrap();
    assert_pass(&r);
    assert_eq!(r.sequence, vec![1.0, 1.0, 1.0]);
}

#[test]
fn path_length_examples() {
    let seg = [c(0.0, 0.0), c(1.0, 0.0)];
    assert!((path_length(&EntireFunction::exp(), &seg).unwrap() - (E - 1.0)).abs() < 1e-8);
    assert!((path_length(&EntireFunction::monomial(2), &seg).unwrap() - 1.0).abs() < 1e-8);
    let still = [c(0.5, 0.5), c(0.5, 0.5)];
    assert_eq!(path_length(&EntireFunction::exp(), &still).unwrap(), 0.0);
    let poly = [c(0.0, 0.0), c(1.0, 1.0), c(-0.5, 2.0)];
    assert_pass(&verify_path_invariance(&EntireFunction::exp(), &poly, 3).unwrap());
}

#[test]
fn folner_examples() {
    let f = EntireFunction::exp();
    let degrees = [5, 10, 20];
    let radii: Vec<f64> = degrees.iter().map(|d| 2.0 * *d as f64).collect();
    let r = folner_ratios(&f, c(1.0, 0.0), &radii, &degrees, &cfg()).unwrap();
    assert_pass(&r);
    let r = folner_ratios(&f, c(1.0, 0.0), &[3.0, 3.0, 3.0], &degrees, &cfg()).unwrap();
    assert_pass(&r);
    assert!(r.sequence.windows(2).all(|p| p[1] <= p[0]), "{:?}", r.sequence);
    let p = EntireFunction::quadratic_zz();
    let r = folner_ratios(&p, c(1.0, 0.0), &[10.0], &[2], &cfg()).unwrap();
    assert_eq!(r.sequence, vec![1.0]);
}

#[test]
fn reports_are_deterministic() {
    let f = EntireFunction::cos_sqrt();
    let a = verify_derivative_sums(&f, c(0.4, 0.3), 200.0, 2, &cfg()).unwrap();
    let b = verify_derivative_sums(&f, c(0.4, 0.3), 200.0, 2, &cfg()).unwrap();
    assert_eq!((a.lhs, a.rhs, a.abs_err, &a.inputs), (b.lhs, b.rhs, b.abs_err, &b.inputs));
}

#[test]
fn report_serializes_complex_as_object() {
    let r = verify_cycle_chain(&EntireFunction::exp(), &[c(1.0, 0.0), c(0.0, 2.0), c(-0.5, 0.0)]).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert!(v["lhs"]["re"].is_number() && v["lhs"]["im"].is_number());
    assert_eq!(v["identity_id"], "cycle_chain");
    let back: IdentityReport = serde_json::from_value(v).unwrap();
    assert_eq!(back, r);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn q_lambda_derivative_closed_form(lambda in 0u32..8, re in -0.9f64..0.9, im in -0.9f64..0.9) {
        let u = c(re, im);
        let q = QLambda::new(lambda);
        let closed = (c(1.0, 0.0) - u.powu(lambda)) / (c(1.0, 0.0) - u);
        prop_assert!((q.derivative(u) - closed).norm() < 1e-12);
    }

    #[test]
    fn report_pass_matches_criterion(lhs in -2.0f64..2.0, rhs in -2.0f64..2.0, tol in 1e-6f64..1.0) {
        for criterion in [Criterion::Absolute, Criterion::Relative, Criterion::Either] {
            let r = IdentityReport::compared(IdentityId::Jensen, serde_json::Value::Null, c(lhs, 0.0), c(rhs, 0.0), tol, criterion);
            let expected = match criterion {
                Criterion::Absolute => r.abs_err <= tol,
                Criterion::Relative => r.rel_err <= tol,
                _ => r.abs_err <= tol || r.rel_err <= tol,
            };
            prop_assert_eq!(r.pass, expected);
        }
    }

    #[test]
    fn cycle_always_telescopes(pts in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 3..8)) {
        let z: Vec<Complex> = pts.iter().map(|p| c(p.0, p.1)).collect();
        prop_assume!((0..z.len()).all(|j| z[j] != z[(j + 1) % z.len()]));
        let r = verify_cycle_chain(&EntireFunction::exp(), &z).unwrap();
        prop_assert!(r.pass);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn derivative_sums_hold_at_random_points(re in -1.5f64..1.5, im in -1.5f64..1.5, k in 1usize..=3) {
        let z = c(re, im);
        for f in [EntireFunction::exp(), EntireFunction::cos_sqrt(), EntireFunction::quadratic_zz()] {
            let r = verify_derivative_sums(&f, z, 40.0, k, &cfg()).unwrap();
            prop_assert!(r.pass, "{:#?}", r);
        }
    }

    #[test]
    fn poly_vieta_random_quintics(
        coeffs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6),
        re in -1.0f64..1.0,
        im in -1.0f64..1.0,
    ) {
        let mut cs: Vec<Complex> = coeffs.iter().map(|p| c(p.0, p.1)).collect();
        cs[5] += c(1.0, 0.0);
        let p = EntireFunction::polynomial(&cs).unwrap();
        let r = verify_poly_vieta(&p, c(re, im), &cfg()).unwrap();
        prop_assert!(r.pass, "{:#?}", r);
    }

    #[test]
    fn t_shift_is_additive(wr in -1.5f64..1.5, wi in -1.5f64..1.5, zr in 0.1f64..1.5, zi in -1.5f64..1.5) {
        let (w, z) = (c(wr, wi), c(zr, zi));
        prop_assume!((z - w).norm() > 1e-3);
        let t1 = compute_shift_t_exp(1, w, z).unwrap();
        prop_assert_eq!(compute_shift_t_exp(2, w, z).unwrap(), 2 * t1);
        prop_assert_eq!(compute_shift_t_exp(-1, w, z).unwrap(), -t1);
    }
}


#[test]
fn shift_homomorphism_report() {
    let ks: Vec<i64> = (-3..=3).collect();
    let r = verify_shift_homomorphism(c(0.3, 0.2), c(1.2, -0.4), &ks).unwrap();
    assert_pass(&r);
    assert_eq!(r.sequence.len(), 7);
    assert_eq!(r.sequence[3], 0.0);
}

#[test]
fn tolerance_serializes_as_decimal_string() {
    let r = verify_cycle_chain(&EntireFunction::exp(), &[c(1.0, 0.0), c(0.0, 2.0), c(-0.5, 0.0)]).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["tolerance"], "0.0000000001");
}

#[test]
fn errors_serialize_with_kind_tag() {
    let e = verify_cycle_chain(&EntireFunction::exp(), &[c(1.0, 0.0)]).unwrap_err();
    let v = serde_json::to_value(&e).unwrap();
    assert_eq!(v["kind"], "InvalidInput");
    assert!(v["message"].is_string());
}
