use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weakcoupling::asymptotics::{
    effective_rate, first_order_fit, predicted_e, riesz_count, solve_e_for_lambda, sweep, EigenCurve, SolveOptions,
};
use weakcoupling::birman_schwinger::{bs_dense_oracle, BoxGrid, BsContext, ResolventModel};
use weakcoupling::dense::{general_eigenvalues, hermitian_eig};
use weakcoupling::vs_operator::{OperatorMatrix, Symmetry};
use weakcoupling::{Error, KineticSymbol, MeasureConvention, Potential, Profile};

fn random_matrix(n: usize, seed: u64, hermitian: bool) -> DMatrix<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = DMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    if hermitian {
        (&a + a.adjoint()) * C64::new(0.5, 0.0)
    } else {
        a
    }
}

fn check_riesz(m: DMatrix<C64>, inside: usize, center: C64, radius: f64, symmetry: Symmetry) -> Result<(), TestCaseError> {
    let op = OperatorMatrix::new(m, symmetry, "random");
    match riesz_count(|_| Ok(op.clone()), center, radius, &[0.0]) {
        Ok(r) => {
            prop_assert_eq!(r[0].rank, inside as i64);
            prop_assert!(r[0].non_integrality < 1e-8);
        }
        Err(Error::ContourTooClose { .. }) => {}
        Err(e) => return Err(TestCaseError::fail(e.to_string())),
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn riesz_rank_counts_hermitian_eigenvalues(seed in any::<u64>(), n in 4usize..20, c in -1.0f64..1.0, r in 0.2f64..1.5) {
        let m = random_matrix(n, seed, true);
        let center = C64::new(c, 0.0);
        let (vals, _) = hermitian_eig(&m).unwrap();
        let inside = vals.iter().filter(|v| (C64::new(**v, 0.0) - center).norm() < r).count();
        check_riesz(m, inside, center, r, Symmetry::Hermitian)?;
    }

    #[test]
    fn riesz_rank_counts_general_eigenvalues(seed in any::<u64>(), n in 4usize..20, c in -1.0f64..1.0, ci in -1.0f64..1.0, r in 0.2f64..1.5) {
        let m = random_matrix(n, seed, false);
        let center = C64::new(c, ci);
        let vals = general_eigenvalues(&m).unwrap();
        let inside = vals.iter().filter(|v| (*v - center).norm() < r).count();
        check_riesz(m, inside, center, r, Symmetry::General)?;
    }

    #[test]
    fn predicted_e_solves_the_first_order_law(a in 0.01f64..2.0, lambda in 0.05f64..1.0, s in 1.5f64..2.99) {
        for conv in [MeasureConvention::LebesgueDOmega, MeasureConvention::WeightedDSigma] {
            let sym = KineticSymbol::new(3, Profile::PowerShift(s), 0.4, conv).unwrap();
            let e = predicted_e(a, lambda, &sym);
            prop_assume!(e > 0.0);
            prop_assert!((lambda * effective_rate(a, &sym) * (1.0 / e).ln() - 1.0).abs() < 1e-10);
        }
        // the weighted rate does not see |p'(k₀)|; the Lebesgue rate divides by it
        let leb = KineticSymbol::new(3, Profile::PowerShift(s), 0.4, MeasureConvention::LebesgueDOmega).unwrap();
        let wtd = leb.with_convention(MeasureConvention::WeightedDSigma);
        prop_assert!((effective_rate(a, &wtd) - 2.0 * a).abs() < 1e-14);
        prop_assert!((effective_rate(a, &leb) * s - 2.0 * a).abs() < 1e-12);
    }
}

#[test]
fn solved_e_is_certified_against_the_dense_oracle() {
    let s = KineticSymbol::bcs(2, 0.4).unwrap();
    let g = BoxGrid::new(2, 12.0, 16).unwrap();
    let v = Potential::gaussian(2, 1.0);
    let ctx = BsContext::new(&v, &s, &g, ResolventModel::Lattice).unwrap();
    let opts = SolveOptions { tol: 1e-10, e_floor: 1e-8, ..SolveOptions::default() };
    // choose λ so that the root sits at e = 1e-3
    let mu0 = hermitian_eig(&bs_dense_oracle(&v, &s, 1e-3, &g, ResolventModel::Lattice).unwrap().matrix).unwrap().0[0];
    let lambda = 1.0 / mu0;
    let sol = solve_e_for_lambda(&ctx, lambda, 1, None, None, &opts).unwrap();
    assert!(sol.diagnostics.certificate <= 1e-10);
    let dense = bs_dense_oracle(&v, &s, sol.e, &g, ResolventModel::Lattice).unwrap();
    let mu = hermitian_eig(&dense.matrix).unwrap().0[0];
    assert!((lambda * mu - 1.0).abs() < 1e-9, "λμ = {}", lambda * mu);
    assert!((sol.e / 1e-3 - 1.0).abs() < 1e-6, "e = {}", sol.e);
}

#[test]
fn sweep_requires_decreasing_lambdas_and_records_failures() {
    let s = KineticSymbol::bcs(2, 0.4).unwrap();
    let g = BoxGrid::new(2, 12.0, 16).unwrap();
    let ctx = BsContext::new(&Potential::gaussian(2, 1.0), &s, &g, ResolventModel::Lattice).unwrap();
    let opts = SolveOptions { e_floor: 1e-8, ..SolveOptions::default() };
    assert!(sweep(&ctx, &[0.2, 0.3], &[1], &opts).is_err());
    // λ so small that e would fall below the floor
    let mu0 = hermitian_eig(&bs_dense_oracle(&Potential::gaussian(2, 1.0), &s, 1e-3, &g, ResolventModel::Lattice).unwrap().matrix)
        .unwrap()
        .0[0];
    let curves = sweep(&ctx, &[1.0 / mu0, 0.01], &[1], &opts).unwrap();
    assert!(curves[0].samples[0].e.is_finite());
    assert!(curves[0].samples[1].e.is_nan() && curves[0].samples[1].error.is_some());
}

#[test]
fn fit_needs_a_solved_sample() {
    let s = KineticSymbol::bcs(2, 0.4).unwrap();
    let empty = EigenCurve { j: 1, convention: s.convention, samples: vec![] };
    assert!(first_order_fit(&empty, 0.5, &s).is_err());
}
