use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use weakcoupling::potentials::{amalgam_norm, dp_norm, lp_norm, mixed_norm, mt_norm, NormOptions};
use weakcoupling::{Error, Model, Potential};

fn opts() -> NormOptions {
    NormOptions::default()
}

#[test]
fn gaussian_lebesgue_norms() {
    // ∫ e^{−pπ|x|²} dx = p^{−d/2}
    for d in [2, 3] {
        let v = Potential::gaussian(d, 1.0);
        for p in [1.0f64, 1.5, 2.0, 3.0] {
            let want = p.powf(-(d as f64) / (2.0 * p));
            let got = lp_norm(&v, p, &opts()).unwrap();
            assert!((got - want).abs() < 1e-10 * want, "d={d} p={p}: {got} vs {want}");
        }
    }
}

#[test]
fn ball_norms() {
    // ‖1_B‖_p = |B|^{1/p}; the MT norm of the unit ball is sup_μ √(1−μ²) = 1
    let v = Potential::ball(3, 1.0, 1.0);
    let vol = 4.0 * PI / 3.0;
    for p in [1.0, 2.0, 4.0] {
        assert!((lp_norm(&v, p, &opts()).unwrap() - vol.powf(1.0 / p)).abs() < 1e-9);
    }
    assert!((mt_norm(&v, &opts()).unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn fourier_transform_of_gaussian_and_ball() {
    let g = Potential::gaussian(3, 1.0);
    for xi in [[0.0, 0.0, 0.0], [0.3, -0.2, 0.5], [1.0, 1.0, 0.0]] {
        let r2: f64 = xi.iter().map(|x| x * x).sum();
        let z = g.fourier_transform(&xi).unwrap();
        assert!((z.re - (-PI * r2).exp()).abs() < 1e-14 && z.im.abs() < 1e-14);
    }
    // 2-d unit disc: V̂(0) = π
    let b = Potential::ball(2, 1.0, 1.0);
    assert!((b.fourier_transform(&[0.0, 0.0]).unwrap().re - PI).abs() < 1e-12);
}

#[test]
fn divergent_norms_are_detected() {
    let coulomb = Potential::new(3, Complex64::new(1.0, 0.0), Model::RadialPowerLaw { a: 1.0, b: 1.0 }).unwrap();
    assert_eq!(mt_norm(&coulomb, &opts()).unwrap(), f64::INFINITY);
    assert!(matches!(lp_norm(&coulomb, 1.0, &opts()), Err(Error::Divergent(_))) || lp_norm(&coulomb, 1.0, &opts()).unwrap().is_infinite());
}

#[test]
fn slab_is_not_radial() {
    let slab = Potential::oscillating_slab(3, 0.5, Complex64::new(1.0, 0.0));
    assert!(matches!(dp_norm(&slab, 3.0, &opts()), Err(Error::NotRadial)));
    assert!(!slab.is_nonnegative());
    assert!(slab.is_real());
}

#[test]
fn mixed_norm_rejects_exponents_outside_window() {
    let g = Potential::gaussian(3, 1.0);
    assert!(mixed_norm(&g, 1.1, 2.0, &opts()).is_ok());
    assert!(mixed_norm(&g, 1.4, 2.0, &opts()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lebesgue_norm_dilation_law(k in 0.3f64..3.0, p in 1.0f64..3.0) {
        // ‖V(·/k)‖_p = k^{d/p}‖V‖_p
        let v = Potential::gaussian(2, 1.0);
        let base = lp_norm(&v, p, &opts()).unwrap();
        let got = lp_norm(&v.dilated(k), p, &opts()).unwrap();
        prop_assert!((got - k.powf(2.0 / p) * base).abs() < 1e-8 * got);
    }

    #[test]
    fn mt_norm_dilation_law(k in 0.2f64..5.0, w in 0.5f64..2.0) {
        let v = Potential::new(3, Complex64::new(1.0, 0.0), Model::GaussianRadial { width: w }).unwrap();
        let base = mt_norm(&v, &opts()).unwrap();
        let got = mt_norm(&v.dilated(k), &opts()).unwrap();
        prop_assert!((got - k * base).abs() < 1e-8 * got);
    }

    #[test]
    fn norms_are_absolutely_homogeneous(c_re in -3.0f64..3.0, c_im in -3.0f64..3.0) {
        prop_assume!(c_re.hypot(c_im) > 1e-3);
        let c = Complex64::new(c_re, c_im);
        let v = Potential::gaussian(2, 1.0);
        let a = amalgam_norm(&v, 1.5, 1.0, &opts()).unwrap().value;
        let b = amalgam_norm(&v.scaled(c), 1.5, 1.0, &opts()).unwrap().value;
        prop_assert!((b - c.norm() * a).abs() < 1e-10 * b);
    }
}
