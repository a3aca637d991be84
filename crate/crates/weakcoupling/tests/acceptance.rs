//! Acceptance suite: one pass/fail line per criterion. Set ACCEPTANCE_ONLY=4,6 to run a subset.

use std::f64::consts::PI;
use std::sync::OnceLock;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use weakcoupling::asymptotics::{
    b_samples, first_order_fit, predicted_e, riesz_count, second_order_residual, sweep, AsymptoticsReport,
    EigenCurve, SolveOptions,
};
use weakcoupling::birman_schwinger::{
    bs_dense_oracle, bs_eigs_iterative, bs_split, log_weight_integrals, spectral_measure_check, ws_matrix, BoxGrid,
    BsContext, BumpFunction, ResolventModel, WsOptions,
};
use weakcoupling::dense::{general_eigenvalues, hermitian_eig, max_hermitian_defect};
use weakcoupling::harmonic::{kernel_difference_bound, unit_sphere_ft};
use weakcoupling::krylov::{norm, top_eigenpairs, KrylovOptions};
use weakcoupling::potentials::{mt_norm, NormOptions};
use weakcoupling::quadrature::{build_sphere_quadrature, gauss_legendre};
use weakcoupling::trial_functions::{knapp_amalgam, knapp_packet, knapp_quadratic_form, KnappOptions};
use weakcoupling::vs_operator::{assemble_vs, vs_spectrum, OperatorMatrix};
use weakcoupling::{KineticSymbol, MeasureConvention, Model, Potential, Profile};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

type Criterion = (usize, &'static str, fn() -> Outcome);

fn main() {
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let criteria: [Criterion; 15] = [
        (1, "surface-measure transform", c01_surface_transform),
        (2, "sphere operator spectrum vs Funk-Hecke", c02_vs_spectrum),
        (3, "dense oracle vs iterative eigenvalues", c03_oracle),
        (4, "monotonicity and log growth of BS(e)", c04_log_growth),
        (5, "splitting identities", c05_splitting),
        (6, "first-order weak-coupling trend", c06_first_order),
        (7, "second order beats first", c07_second_order),
        (8, "spectral-measure identity", c08_spectral_measure),
        (9, "measure-convention covariance", c09_convention),
        (10, "MT norm", c10_mt_norm),
        (11, "log-weight integral band", c11_log_weight),
        (12, "kernel Hoelder bound", c12_kernel_bound),
        (13, "Knapp positivity", c13_knapp),
        (14, "Riesz counting", c14_riesz),
        (15, "thread-count determinism", c15_determinism),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let t = Instant::now();
        let res = std::panic::catch_unwind(run).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            outcome(false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        if !res.pass {
            failed += 1;
        }
        println!(
            "criterion {id:>2} {} {name}: {} [{:.1}s]",
            if res.pass { "PASS" } else { "FAIL" },
            res.detail,
            t.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

fn bcs(d: usize) -> KineticSymbol {
    KineticSymbol::bcs(d, 0.4).unwrap()
}

// ---------------------------------------------------------------------------------------------

fn c01_surface_transform() -> Outcome {
    // oracles: d=3 by Gauss-Legendre in cos θ, d=2 by the periodic trapezoid rule in θ
    let (t, w) = gauss_legendre(400);
    let oracle3 = |r: f64| 2.0 * PI * t.iter().zip(&w).map(|(t, w)| w * (2.0 * PI * r * t).cos()).sum::<f64>();
    let n = 512;
    let oracle2 = |r: f64| {
        (0..n).map(|k| (2.0 * PI * r * (2.0 * PI * k as f64 / n as f64).cos()).cos()).sum::<f64>() * 2.0 * PI / n as f64
    };
    let mut worst = [0.0f64; 2];
    for i in 0..=2000 {
        let r = 0.1 + (50.0 - 0.1) * i as f64 / 2000.0;
        let closed3 = 2.0 * (2.0 * PI * r).sin() / r;
        // errors are measured against the envelope so that zeros of the transform stay meaningful
        let env3 = (2.0 / r).min(4.0 * PI);
        let env2 = (2.0 / r.sqrt()).min(2.0 * PI);
        worst[0] = worst[0].max((unit_sphere_ft(3, r) - oracle3(r)).abs() / env3);
        worst[0] = worst[0].max((closed3 - oracle3(r)).abs() / env3);
        worst[1] = worst[1].max((unit_sphere_ft(2, r) - oracle2(r)).abs() / env2);
    }
    outcome(worst[0] <= 1e-8 && worst[1] <= 1e-8, format!("max envelope-relative error d=3 {:.2e}, d=2 {:.2e}", worst[0], worst[1]))
}

/// i_ℓ(x) = x^ℓ Σ_k (x²/2)^k / (k! (2ℓ+2k+1)!!)
fn modified_spherical_bessel(l: usize, x: f64) -> f64 {
    let mut df = 1.0;
    for m in (1..=2 * l + 1).step_by(2) {
        df *= m as f64;
    }
    let mut term = x.powi(l as i32) / df;
    let mut sum = term;
    for k in 1..200 {
        term *= 0.5 * x * x / (k as f64 * (2 * l + 2 * k + 1) as f64);
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    sum
}

fn c02_vs_spectrum() -> Outcome {
    let s = bcs(3);
    let v = Potential::gaussian(3, 1.0);
    let quad = build_sphere_quadrature(3, 24).unwrap();
    let spec = vs_spectrum(&assemble_vs(&v, &quad, &s).unwrap(), 0).unwrap();
    let mut want = Vec::new();
    for l in 0..=6 {
        let a = 4.0 * PI * (-2.0 * PI).exp() * modified_spherical_bessel(l, 2.0 * PI);
        want.extend(std::iter::repeat(a).take(2 * l + 1));
    }
    want.sort_by(|a, b| b.total_cmp(a));
    let got = spec.real_parts();
    let gap = want.iter().zip(&got).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let a0 = 1.0 - (-4.0 * PI).exp();
    let top = (got[0] - a0).abs();
    outcome(gap <= 1e-6 && top <= 1e-8, format!("multiset gap {gap:.2e} over {} eigenvalues, |a0 - (1-e^-4pi)| = {top:.2e}", want.len()))
}

fn c03_oracle() -> Outcome {
    let s = bcs(2);
    let grid = BoxGrid::new(2, 12.0, 16).unwrap();
    let e = 1e-2;
    let mut pass = true;
    let mut detail = Vec::new();
    for v in [Potential::gaussian(2, 1.0), Potential::ball(2, 1.0, 1.0), Potential::oscillating_slab(2, 0.5, C64::new(1.0, 0.0))] {
        let m = bs_dense_oracle(&v, &s, e, &grid, ResolventModel::Lattice).unwrap();
        let defect = max_hermitian_defect(&m.matrix);
        let dense = hermitian_eig(&m.matrix).unwrap().0;
        let iter = bs_eigs_iterative(&v, &s, e, &grid, ResolventModel::Lattice, 3).unwrap();
        let gap = dense.iter().zip(&iter).map(|(a, b)| (a - b.value.re).abs() + b.value.im.abs()).fold(0.0, f64::max);
        pass &= gap <= 1e-6 && defect <= 1e-10;
        detail.push(format!("{} gap {gap:.1e} herm {defect:.1e}", v.model.name()));
    }
    outcome(pass, detail.join("; "))
}

fn c04_log_growth() -> Outcome {
    let s = bcs(2);
    let grid = BoxGrid::new(2, 24.0, 256).unwrap();
    let ctx = BsContext::new(&Potential::gaussian(2, 1.0), &s, &grid, ResolventModel::ContinuumLow).unwrap();
    let es = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7];
    let mut start: Option<Vec<C64>> = None;
    let mut mu = Vec::new();
    for &e in &es {
        let (pairs, _) = ctx.eigs(e, 1, start.as_deref(), 1e-10).unwrap();
        mu.push(pairs[0].value.re);
        start = Some(pairs[0].vector.clone());
    }
    let increasing = mu.windows(2).all(|w| w[1] > w[0]);
    let ratios: Vec<f64> = es.iter().zip(&mu).skip(2).map(|(e, m)| m / (1.0 / e).ln()).collect();
    let band = ratios.iter().cloned().fold(0.0, f64::max) / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    outcome(
        increasing && band <= 2.0,
        format!(
            "mu1 = {:?}, mu1/ln(1/e) on 1e-4..1e-7 = {:?}, band {band:.3}",
            mu.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>(),
            ratios.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>()
        ),
    )
}

fn hermitian_norm(n: usize, apply: impl Fn(&[C64], &mut [C64])) -> f64 {
    // ‖A‖² is the top eigenvalue of A² for Hermitian A
    let mut tmp = vec![C64::new(0.0, 0.0); n];
    let sq = |x: &[C64], y: &mut [C64]| {
        apply(x, &mut tmp);
        apply(&tmp, y);
    };
    let mut opts = KrylovOptions::new(1, true);
    opts.tol = 1e-8;
    let (p, _) = top_eigenpairs(n, sq, None, &opts).unwrap();
    p[0].value.re.max(0.0).sqrt()
}

fn c05_splitting() -> Outcome {
    let s = bcs(2);
    let grid = BoxGrid::new(2, 24.0, 256).unwrap();
    let v = Potential::gaussian(2, 1.0);
    let quad = build_sphere_quadrature(2, 24).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let c = bs_split(&v, &s, 1e-4, &grid, &quad, ResolventModel::ContinuumLow).unwrap();
    let n = c.dim();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let x: Vec<C64> = (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let mut full = vec![C64::new(0.0, 0.0); n];
        c.full.apply(&x, &mut full);
        let mut sum = vec![C64::new(0.0, 0.0); n];
        let mut part = vec![C64::new(0.0, 0.0); n];
        c.sing.apply(&x, &mut part);
        sum.iter_mut().zip(&part).for_each(|(a, b)| *a += b);
        c.apply_reg(&x, &mut part);
        sum.iter_mut().zip(&part).for_each(|(a, b)| *a += b);
        c.high.apply(&x, &mut part);
        sum.iter_mut().zip(&part).for_each(|(a, b)| *a += b);
        let diff: Vec<C64> = full.iter().zip(&sum).map(|(a, b)| a - b).collect();
        worst = worst.max(norm(&diff) / norm(&full));
    }
    let reg_norm = |e: f64| {
        let c = bs_split(&v, &s, e, &grid, &quad, ResolventModel::ContinuumLow).unwrap();
        hermitian_norm(c.dim(), |x, y| c.apply_reg(x, y))
    };
    let r3 = reg_norm(1e-3) / (1e3f64).ln();
    let r6 = reg_norm(1e-6) / (1e6f64).ln();
    let drop = 1.0 - r6 / r3;
    outcome(
        worst <= 1e-8 && drop >= 0.3,
        format!("identity residual {worst:.2e}; lambda*||reg||: {r3:.4} at 1e-3, {r6:.4} at 1e-6 (drop {:.0}%)", 100.0 * drop),
    )
}

// ---------------------------------------------------------------------------------------------
// criteria 6, 7 and 15 share one sweep configuration

const C6_LAMBDAS: [f64; 5] = [0.25, 0.18, 0.13, 0.1, 0.08];

struct SweepArtifacts {
    curve: EigenCurve,
    report: AsymptoticsReport,
    files: Vec<(String, Vec<u8>)>,
}

fn weak_coupling_sweep() -> SweepArtifacts {
    let s = bcs(2);
    let v = Potential::gaussian(2, 1.0);
    let grid = BoxGrid::new(2, 24.0, 2048).unwrap();
    let ctx = BsContext::new(&v, &s, &grid, ResolventModel::ContinuumLow).unwrap();
    let curve = sweep(&ctx, &C6_LAMBDAS, &[1], &SolveOptions::default()).unwrap().remove(0);
    let quad = build_sphere_quadrature(2, 24).unwrap();
    let shell = build_sphere_quadrature(2, 48).unwrap();
    let vs = assemble_vs(&v, &quad, &s).unwrap();
    let a = vs_spectrum(&vs, 0).unwrap().eigenvalues[0].re;
    let mut report = first_order_fit(&curve, a, &s).unwrap();
    let w0 = ws_matrix(&v, &s, 0.0, &quad, &shell, &WsOptions { n_t: 8, grid }).unwrap();
    let lambdas: Vec<f64> = report.first_order.iter().map(|f| f.lambda).collect();
    let b = b_samples(&vs, &w0, &lambdas, 1, 1e-6).unwrap();
    second_order_residual(&mut report, &b, &s).unwrap();
    report.grid = "N=2048 L=24 order=24 shell_order=48 n_t=8".into();
    let files = vec![
        ("curve.csv".to_string(), curve.to_csv().into_bytes()),
        ("curve.json".to_string(), serde_json::to_vec_pretty(&curve).unwrap()),
        ("report.csv".to_string(), report.to_csv().into_bytes()),
        ("report.json".to_string(), serde_json::to_vec_pretty(&report).unwrap()),
    ];
    SweepArtifacts { curve, report, files }
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

fn single_thread_sweep() -> &'static SweepArtifacts {
    static CELL: OnceLock<SweepArtifacts> = OnceLock::new();
    CELL.get_or_init(|| in_pool(1, weak_coupling_sweep))
}

fn c06_first_order() -> Outcome {
    let art = single_thread_sweep();
    let fo = &art.report.first_order;
    let logs: Vec<f64> = fo.iter().map(|f| -f.e.ln()).collect();
    let in_window = logs.iter().all(|l| (4.0..=14.0).contains(l));
    let last = fo.last().map(|f| f.r1).unwrap_or(f64::NAN);
    let solved = art.curve.points().len();
    outcome(
        solved >= 5 && in_window && art.report.r1_decreasing && last <= 0.25,
        format!(
            "a = {:.6}; ln(1/e) = {:?}; r1 = {:?}",
            art.report.a,
            logs.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>(),
            fo.iter().map(|f| format!("{:.4}", f.r1)).collect::<Vec<_>>()
        ),
    )
}

fn c07_second_order() -> Outcome {
    let art = single_thread_sweep();
    let fo = &art.report.first_order;
    let so = &art.report.second_order;
    let n = fo.len();
    let mut pass = so.len() == n && n >= 2;
    let mut detail = Vec::new();
    for i in n.saturating_sub(2)..n {
        let Some(s) = so.iter().find(|s| s.lambda == fo[i].lambda) else {
            pass = false;
            continue;
        };
        pass &= s.s.abs() <= fo[i].log_error;
        detail.push(format!("lambda {}: |s| {:.4} vs first-order {:.4} (b {:.4}, overlap {:.3})", s.lambda, s.s.abs(), fo[i].log_error, s.b, s.overlap));
    }
    outcome(pass, detail.join("; "))
}

fn c15_determinism() -> Outcome {
    let one = single_thread_sweep();
    let four = in_pool(4, weak_coupling_sweep);
    let same: Vec<bool> = one.files.iter().zip(&four.files).map(|(a, b)| a == b).collect();
    let names: Vec<String> = one.files.iter().zip(&same).map(|((n, _), s)| format!("{n}:{}", if *s { "identical" } else { "differs" })).collect();
    outcome(same.iter().all(|s| *s) && one.files.len() == four.files.len(), names.join(" "))
}

// ---------------------------------------------------------------------------------------------

fn c08_spectral_measure() -> Outcome {
    let s = bcs(2);
    // the lattice sum converges only algebraically in L for this bump, so f is zero-padded to a wide box
    let grid = BoxGrid::new(2, 768.0, 2048).unwrap();
    let quad = build_sphere_quadrature(2, 64).unwrap();
    let f: Vec<C64> = (0..grid.len())
        .map(|i| {
            let x = grid.point(i);
            C64::new((-PI * (x[0] * x[0] + x[1] * x[1])).exp(), 0.0)
        })
        .collect();
    let h = BumpFunction { a: s.tau / 4.0, b: s.tau / 2.0, beta: 1.0 };
    let c = spectral_measure_check(&f, &f, &h, &s, &grid, &quad).unwrap();
    outcome(c.gap <= 1e-6, format!("multiplier {:.12e}, shells {:.12e}, gap {:.2e}", c.lhs.re, c.rhs.re, c.gap))
}

fn c09_convention() -> Outcome {
    let mut worst = 0.0f64;
    for (d, profile) in [(2, Profile::BcsDefault), (2, Profile::PowerShift(1.5)), (3, Profile::PowerShift(2.5))] {
        let leb = KineticSymbol::new(d, profile, 0.4, MeasureConvention::LebesgueDOmega).unwrap();
        let wtd = leb.with_convention(MeasureConvention::WeightedDSigma);
        let v = Potential::gaussian(d, 1.0);
        let quad = build_sphere_quadrature(d, 24).unwrap();
        let a_l = vs_spectrum(&assemble_vs(&v, &quad, &leb).unwrap(), 0).unwrap().eigenvalues[0].re;
        let a_w = vs_spectrum(&assemble_vs(&v, &quad, &wtd).unwrap(), 0).unwrap().eigenvalues[0].re;
        for lambda in [0.5, 0.2, 0.1, 0.05] {
            let el = predicted_e(a_l, lambda, &leb);
            let ew = predicted_e(a_w, lambda, &wtd);
            worst = worst.max((el - ew).abs() / el);
        }
    }
    outcome(worst <= 1e-10, format!("max relative difference {worst:.2e} over 3 symbols x 4 couplings"))
}

fn c10_mt_norm() -> Outcome {
    let opts = NormOptions::default();
    let ball = Potential::ball(3, 1.0, 1.0);
    let b = mt_norm(&ball, &opts).unwrap();
    let g = Potential::gaussian(3, 1.0);
    let base = mt_norm(&g, &opts).unwrap();
    let mut scale_err = 0.0f64;
    for k in [0.25, 0.5, 2.0, 4.0] {
        let m = mt_norm(&g.dilated(k), &opts).unwrap();
        scale_err = scale_err.max((m - k * base).abs() / (k * base));
    }
    let inv = Potential::new(3, C64::new(1.0, 0.0), Model::RadialPowerLaw { a: 1.0, b: 1.0 }).unwrap();
    let h = mt_norm(&inv, &opts).unwrap();
    outcome(
        (b - 1.0).abs() <= 1e-10 && scale_err <= 1e-8 && h == f64::INFINITY,
        format!("ball {b:.12}; dilation error {scale_err:.2e}; 1/r gives {h}"),
    )
}

fn c11_log_weight() -> Outcome {
    let s = bcs(3);
    let (c1, c2) = (0.5, 2.0);
    let mut ratios = Vec::new();
    for k in 0..=24 {
        let e = 10f64.powf(-2.0 - 6.0 * k as f64 / 24.0);
        let g = log_weight_integrals(&s, e, 1.5).unwrap();
        ratios.push(g.g_mt / (1.0 / e).ln().max(1.0));
    }
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    outcome(lo >= c1 && hi <= c2, format!("g_MT/max(ln(1/e),1) in [{lo:.4}, {hi:.4}] within [{c1}, {c2}] on 25 points"))
}

fn c12_kernel_bound() -> Outcome {
    let s = bcs(3);
    let grids = |refine: usize| {
        let nr = 50 * refine;
        let rho: Vec<f64> = (0..=nr).map(|i| 0.5 + i as f64 / nr as f64).collect();
        let nx = 400 * refine;
        let r: Vec<f64> = (0..=nx).map(|i| 100.0 * i as f64 / nx as f64).collect();
        (rho, r)
    };
    let mut m = Vec::new();
    for refine in [1, 2, 4] {
        let (rho, r) = grids(refine);
        m.push(kernel_difference_bound(&s, 0.5, &rho, &r).unwrap().max_ratio);
    }
    let variation = m.iter().cloned().fold(0.0, f64::max) / m.iter().cloned().fold(f64::INFINITY, f64::min);
    let r: Vec<f64> = (0..=200).map(|i| i as f64 * 0.5).collect();
    let at_one = kernel_difference_bound(&s, 0.5, &[1.0], &r).unwrap();
    let zero = at_one.samples.iter().all(|k| k.difference == 0.0);
    outcome(
        m.iter().all(|x| x.is_finite()) && variation < 2.0 && zero,
        format!("M(1/2) = {:?} across refinements (variation {variation:.3}); rho=1 exact zero: {zero}", m.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>()),
    )
}

fn c13_knapp() -> Outcome {
    let v = Potential::oscillating_slab(3, 0.5, C64::new(1.0, 0.0));
    let amalgam = knapp_amalgam(&v).unwrap();
    let opts = KnappOptions { amalgam: Some(amalgam), ..KnappOptions::default() };
    let mut ratios = Vec::new();
    let mut r0 = None;
    for k in 2..=8 {
        let r = 2f64.powi(k);
        let m = r.sqrt().max(2.0);
        let p = knapp_packet(r, &[1.0, 0.0, 0.0], true).unwrap();
        let f = knapp_quadratic_form(&v, &p, m, &opts).unwrap();
        ratios.push(f.main_term / (m * r.powf(-0.5)));
        if r0.is_none() && f.total > 0.0 {
            r0 = Some(r);
        }
    }
    let band = ratios.iter().cloned().fold(0.0, f64::max) / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    outcome(
        r0.is_some_and(|r| r <= 4096.0) && band <= 10.0,
        format!(
            "R0 = {r0:?}; main/(M R^-eps) = {:?} (band {band:.2}, limit 10); certificates modulo the fitted tail constant",
            ratios.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>()
        ),
    )
}

fn c14_riesz() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut exact = 0;
    for i in 0..100 {
        let n = rng.gen_range(2..=30);
        let mut a = DMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        if i < 50 {
            a = (&a + a.adjoint()) * C64::new(0.5, 0.0);
        }
        let vals = general_eigenvalues(&a).unwrap();
        let scale = vals.iter().map(|z| z.norm()).fold(0.0, f64::max);
        // draw contours until every eigenvalue is well separated from the circle
        let (center, radius) = loop {
            let c = C64::new(rng.gen_range(-0.5..0.5) * scale, if i < 50 { 0.0 } else { rng.gen_range(-0.5..0.5) * scale });
            let r = rng.gen_range(0.2..0.8) * scale;
            if vals.iter().all(|z| ((z - c).norm() - r).abs() > 0.02 * r) {
                break (c, r);
            }
        };
        let want = vals.iter().filter(|z| (*z - center).norm() < radius).count() as i64;
        let m = OperatorMatrix::detect(a, "random");
        let got = riesz_count(|_| Ok(m.clone()), center, radius, &[0.0]).unwrap();
        if got[0].rank == want {
            exact += 1;
        }
    }

    let s = bcs(2);
    let grid = BoxGrid::new(2, 20.0, 64).unwrap();
    let quad = build_sphere_quadrature(2, 24).unwrap();
    let c = bs_split(&Potential::gaussian(2, 1.0), &s, 1e-8, &grid, &quad, ResolventModel::ContinuumLow).unwrap();
    let full = c.full.to_matrix("bs");
    let sing = c.sing.to_matrix("bs-sing");
    let lambda = 1.0 / general_eigenvalues(&full.matrix).unwrap()[0].re;
    let family = |k: f64| {
        let m = (&sing.matrix * C64::new(1.0 - k, 0.0) + &full.matrix * C64::new(k, 0.0)) * C64::new(lambda, 0.0);
        Ok(OperatorMatrix::detect(m, "kappa"))
    };
    let kappa = riesz_count(family, C64::new(0.965, 0.0), 0.045, &[0.0, 0.25, 0.5, 0.75, 1.0]).unwrap();
    let ranks: Vec<i64> = kappa.iter().map(|r| r.rank).collect();
    let constant = ranks.windows(2).all(|w| w[0] == w[1]);

    let slab = Potential::oscillating_slab(2, 0.5, C64::new(1.0, 0.1));
    let m = bs_dense_oracle(&slab, &s, 1e-2, &BoxGrid::new(2, 12.0, 16).unwrap(), ResolventModel::Lattice).unwrap();
    let cx = riesz_count(|_| Ok(m.clone()), C64::new(1.6, 0.16), 0.4, &[0.0]).unwrap();

    outcome(
        exact == 100 && constant && cx[0].non_integrality < 1e-6 && !m.is_hermitian(),
        format!(
            "random {exact}/100 exact; kappa ranks {ranks:?} at lambda {lambda:.5}; complex V rank {} (non-integrality {:.1e})",
            cx[0].rank, cx[0].non_integrality
        ),
    )
}
