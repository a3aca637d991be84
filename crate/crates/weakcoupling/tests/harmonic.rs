use std::f64::consts::PI;

use proptest::prelude::*;
use weakcoupling::harmonic::{
    bessel_j, kernel_difference_bound, sphere_area, surface_measure_ft, unit_sphere_ft, unit_sphere_ft_deriv, Branch,
};
use weakcoupling::{KineticSymbol, MeasureConvention, Profile};

/// Bessel's integral J_n(z) = (1/π)∫_0^π cos(nτ − z sin τ) dτ, trapezoid rule on the periodic extension.
fn bessel_integral(n: u32, z: f64) -> f64 {
    let m = 2048;
    let h = 2.0 * PI / m as f64;
    (0..m).map(|k| (n as f64 * k as f64 * h - z * (k as f64 * h).sin()).cos()).sum::<f64>() * h / (2.0 * PI)
}

#[test]
fn integer_order_bessel_matches_integral() {
    for n in 0..4u32 {
        for i in 0..200 {
            let z = 0.05 + 0.4 * i as f64;
            let got = bessel_j(n as f64, z);
            let want = bessel_integral(n, z);
            assert!((got - want).abs() < 1e-11, "J_{n}({z}) = {got}, want {want}");
        }
    }
}

#[test]
fn half_order_bessel_closed_form() {
    for i in 1..300 {
        let z = 0.1 * i as f64;
        let want = (2.0 / (PI * z)).sqrt() * z.sin();
        assert!((bessel_j(0.5, z) - want).abs() < 1e-12 * (1.0 + want.abs()), "z = {z}");
    }
}

#[test]
fn sphere_transform_at_origin_is_area() {
    for d in 2..=4 {
        assert!((unit_sphere_ft(d, 0.0) - sphere_area(d)).abs() < 1e-12 * sphere_area(d));
    }
    assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
}

#[test]
fn transform_derivative_matches_difference_quotient() {
    for d in [2, 3] {
        for i in 0..40 {
            let r = 0.2 + 0.37 * i as f64;
            let h = 1e-5;
            let fd = (unit_sphere_ft(d, r + h) - unit_sphere_ft(d, r - h)) / (2.0 * h);
            assert!((unit_sphere_ft_deriv(d, r) - fd).abs() < 1e-6 * (1.0 + fd.abs()), "d={d} r={r}");
        }
    }
}

#[test]
fn holder_ratio_vanishes_on_the_fermi_sphere() {
    let s = KineticSymbol::bcs(3, 0.4).unwrap();
    let r: Vec<f64> = (0..50).map(|i| i as f64).collect();
    let rep = kernel_difference_bound(&s, 0.5, &[1.0], &r).unwrap();
    assert!(rep.samples.iter().all(|k| k.difference == 0.0 && k.ratio == 0.0));
    assert!(kernel_difference_bound(&s, 1.5, &[1.0], &r).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dilated_sphere_transform_scaling(rho in 0.5f64..1.5, r in 0.0f64..30.0) {
        // Lebesgue dω on ρS: (dω_{ρS})^∨(r) = ρ^{d−1}(dω_S)^∨(ρr)
        for d in [2usize, 3] {
            let s = KineticSymbol::bcs(d, 0.4).unwrap();
            let want = rho.powi(d as i32 - 1) * unit_sphere_ft(d, rho * r);
            prop_assert!((surface_measure_ft(&s, rho, r) - want).abs() < 1e-12 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn shell_radius_inverts_the_symbol(t in 1e-6f64..0.39, s_exp in 1.34f64..1.99) {
        for sym in [
            KineticSymbol::bcs(2, 0.4).unwrap(),
            KineticSymbol::new(2, Profile::PowerShift(s_exp), 0.4, MeasureConvention::LebesgueDOmega).unwrap(),
        ] {
            for b in [Branch::Outer, Branch::Inner] {
                let k = sym.shell_radius(t, b).unwrap();
                prop_assert!((sym.t(k) - t).abs() < 1e-12);
                prop_assert_eq!(k > 1.0, b == Branch::Outer);
            }
        }
    }

    #[test]
    fn weighted_convention_divides_by_gradient(rho in 0.6f64..1.4, r in 0.0f64..20.0) {
        let leb = KineticSymbol::new(3, Profile::PowerShift(2.5), 0.4, MeasureConvention::LebesgueDOmega).unwrap();
        let wtd = leb.with_convention(MeasureConvention::WeightedDSigma);
        let want = surface_measure_ft(&leb, rho, r) / leb.dp(rho).abs();
        prop_assert!((surface_measure_ft(&wtd, rho, r) - want).abs() < 1e-12 * (1.0 + want.abs()));
    }
}
