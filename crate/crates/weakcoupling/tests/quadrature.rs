use proptest::prelude::*;
use statrs::function::gamma::gamma;
use weakcoupling::quadrature::{
    build_sphere_quadrature, expected_sphere_mass, gauss_legendre_on, gegenbauer_rule, integrate, shell_grid,
};
use weakcoupling::KineticSymbol;

/// ∫ over S^{d−1} of Π x_i^{a_i}: 2ΠΓ((a_i+1)/2)/Γ((Σa_i+d)/2) for even exponents, 0 otherwise.
fn sphere_monomial(a: &[i32]) -> f64 {
    if a.iter().any(|k| k % 2 != 0) {
        return 0.0;
    }
    let num: f64 = a.iter().map(|&k| gamma((k as f64 + 1.0) / 2.0)).product();
    2.0 * num / gamma((a.iter().sum::<i32>() as f64 + a.len() as f64) / 2.0)
}

#[test]
fn sphere_rules_integrate_monomials() {
    let q2 = build_sphere_quadrature(2, 12).unwrap();
    for a in 0..8 {
        for b in 0..8 {
            let got: f64 = (0..q2.len()).map(|i| q2.weights[i] * q2.node(i)[0].powi(a) * q2.node(i)[1].powi(b)).sum();
            assert!((got - sphere_monomial(&[a, b])).abs() < 1e-13, "x^{a} y^{b}");
        }
    }
    let q3 = build_sphere_quadrature(3, 10).unwrap();
    for a in 0..6 {
        for b in 0..6 {
            for c in 0..6 {
                let got: f64 = (0..q3.len())
                    .map(|i| {
                        let x = q3.node(i);
                        q3.weights[i] * x[0].powi(a) * x[1].powi(b) * x[2].powi(c)
                    })
                    .sum();
                assert!((got - sphere_monomial(&[a, b, c])).abs() < 1e-13, "x^{a} y^{b} z^{c}");
            }
        }
    }
}

#[test]
fn sphere_rules_have_the_right_mass_and_unit_nodes() {
    for (d, order) in [(2, 4), (2, 24), (3, 4), (3, 24)] {
        let q = build_sphere_quadrature(d, order).unwrap();
        let mass: f64 = q.weights.iter().sum();
        assert!((mass - expected_sphere_mass(d)).abs() < 1e-12 * mass);
        for i in 0..q.len() {
            let n: f64 = q.node(i).iter().map(|x| x * x).sum();
            assert!((n - 1.0).abs() < 1e-14);
        }
    }
    assert!(build_sphere_quadrature(3, 2).is_err());
    assert!(build_sphere_quadrature(5, 8).is_err());
}

#[test]
fn gegenbauer_rule_moments() {
    for d in 2..=6 {
        let alpha = (d as f64 - 3.0) / 2.0;
        let n = 8;
        let (x, w) = gegenbauer_rule(d, n).unwrap();
        for k in 0..n {
            let got: f64 = x.iter().zip(&w).map(|(t, w)| w * t.powi(2 * k as i32)).sum();
            let kf = k as f64;
            let want = gamma(kf + 0.5) * gamma(alpha + 1.0) / gamma(kf + alpha + 1.5);
            assert!((got - want).abs() < 1e-12 * want, "d={d} k={k}: {got} vs {want}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gauss_legendre_exact_on_intervals(a in -3.0f64..3.0, len in 0.1f64..4.0, deg in 0u32..15) {
        let b = a + len;
        let (x, w) = gauss_legendre_on(8, a, b);
        let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
        let want = (b.powi(deg as i32 + 1) - a.powi(deg as i32 + 1)) / (deg as f64 + 1.0);
        prop_assert!((got - want).abs() < 1e-11 * (1.0 + want.abs()));
    }

    #[test]
    fn graded_shells_resolve_the_log(e in 1e-10f64..1.0) {
        // ∫_0^τ dt/(t+e) = ln(1+τ/e)
        let s = KineticSymbol::bcs(2, 0.4).unwrap();
        let g = shell_grid(&s, 8, e).unwrap();
        let got: f64 = g.resolvent_weights(e).iter().sum();
        let want = (1.0 + 0.4 / e).ln();
        prop_assert!((got - want).abs() < 1e-9 * want);
    }

    #[test]
    fn adaptive_rule_integrates_oscillations(k in 0.5f64..40.0, b in 0.5f64..10.0) {
        let r = integrate(|x| (k * x).cos(), 0.0, b, &[], 0.0, 1e-13);
        let want = (k * b).sin() / k;
        prop_assert!((r.value - want).abs() < 1e-11);
    }
}
