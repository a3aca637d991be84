//! Eigenvalue curves e_j(λ) from the Birman–Schwinger principle −e ∈ spec(T − λV) ⟺ 1/λ ∈ spec(BS(e)),
//! the first- and second-order weak-coupling fits, and contour counting of eigenvalues.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::birman_schwinger::{bs_lambda_operator, BsContext, E_FLOOR};
use crate::dense::{general_eig, general_eigenvalues, hermitian_eig};
use crate::error::{Error, Result};
use crate::harmonic::{KineticSymbol, MeasureConvention};
use crate::krylov::{dot, norm};
use crate::vs_operator::OperatorMatrix;

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Certificate |λμ_j(e) − 1| required on return.
    pub tol: f64,
    pub e_floor: f64,
    pub e_max: f64,
    pub max_iter: usize,
    /// Relative Krylov residual for each μ_j evaluation.
    pub eig_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tol: 1e-8, e_floor: E_FLOOR, e_max: 1.0, max_iter: 80, eig_tol: 1e-11 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveDiagnostics {
    pub lambda: f64,
    pub j: usize,
    pub e: f64,
    pub mu: f64,
    /// |λμ_j(e) − 1|.
    pub certificate: f64,
    /// Krylov residual of the returned eigenpair.
    pub eig_residual: f64,
    pub evaluations: usize,
    pub applications: usize,
    pub bracket: (f64, f64),
    /// Real parts of the top j eigenvalues of BS(e) at the solution.
    pub top_spectrum: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub e: f64,
    pub diagnostics: SolveDiagnostics,
    /// Top j eigenvectors at the solution, reusable as a warm start.
    pub vectors: Vec<Vec<C64>>,
}

struct Evaluator<'a> {
    ctx: &'a BsContext,
    j: usize,
    tol: f64,
    start: Option<Vec<C64>>,
    evaluations: usize,
    applications: usize,
}

impl Evaluator<'_> {
    /// μ_j(e) with its residual, spectrum snapshot and eigenvectors.
    fn eval(&mut self, e: f64) -> Result<(f64, f64, Vec<f64>, Vec<Vec<C64>>)> {
        let (pairs, stats) = self.ctx.eigs(e, self.j, self.start.as_deref(), self.tol)?;
        self.evaluations += 1;
        self.applications += stats.applications;
        if pairs.len() < self.j {
            return Err(Error::InvalidParameter(format!("index {} exceeds the operator size", self.j)));
        }
        let p = &pairs[self.j - 1];
        self.start = Some(p.vector.clone());
        let top = pairs.iter().map(|p| p.value.re).collect();
        Ok((p.value.re, p.residual, top, pairs.into_iter().map(|p| p.vector).collect()))
    }
}

/// Solves μ_j(e) = 1/λ by bracketing and safeguarded regula falsi in ln e; `j` counts from 1.
///
/// `guess` seeds the bracket and `start` the eigensolver (typically the neighbouring sample).
pub fn solve_e_for_lambda(
    ctx: &BsContext,
    lambda: f64,
    j: usize,
    guess: Option<f64>,
    start: Option<&[C64]>,
    opts: &SolveOptions,
) -> Result<Solution> {
    if !(lambda > 0.0) || j == 0 {
        return Err(Error::InvalidParameter(format!("need λ > 0 and j ≥ 1, got λ = {lambda}, j = {j}")));
    }
    if !(opts.e_floor >= E_FLOOR && opts.e_max > opts.e_floor) {
        return Err(Error::InvalidParameter("need E_FLOOR ≤ e_floor < e_max".into()));
    }
    let mut ev = Evaluator { ctx, j, tol: opts.eig_tol, start: start.map(|s| s.to_vec()), evaluations: 0, applications: 0 };
    let (x_lo_lim, x_hi_lim) = (opts.e_floor.ln(), opts.e_max.ln());
    // f(x) = ln(λμ_j(eˣ)) is decreasing in x
    let f_of = |mu: f64| if mu > 0.0 { (lambda * mu).ln() } else { f64::NEG_INFINITY };
    let x0 = guess.filter(|g| *g > 0.0).map(f64::ln).unwrap_or(x_hi_lim).clamp(x_lo_lim, x_hi_lim);
    let best_cert = std::cell::Cell::new(f64::INFINITY);
    let mut best: Option<(f64, f64, f64, Vec<f64>, Vec<Vec<C64>>)> = None;
    let mut record = |x: f64, ev: &mut Evaluator| -> Result<f64> {
        let (mu, res, top, vecs) = ev.eval(x.exp())?;
        let f = f_of(mu);
        let better = match &best {
            Some((_, m, ..)) => (lambda * mu - 1.0).abs() < (lambda * m - 1.0).abs(),
            None => true,
        };
        if better {
            best_cert.set((lambda * mu - 1.0).abs());
            best = Some((x, mu, res, top, vecs));
        }
        Ok(f)
    };

    let f0 = record(x0, &mut ev)?;
    let (mut a, mut fa, mut b, mut fb);
    if f0 == 0.0 || best_cert.get() <= opts.tol {
        (a, fa, b, fb) = (x0, f0, x0, f0);
    } else {
        // march away from x0 with doubling steps until the sign changes
        let dir = if f0 > 0.0 { 1.0 } else { -1.0 };
        let lim = if dir > 0.0 { x_hi_lim } else { x_lo_lim };
        let (mut xp, mut fp) = (x0, f0);
        let mut step = 0.5;
        loop {
            if xp == lim {
                let e = lim.exp();
                return Err(if dir > 0.0 {
                    Error::NoBoundState(format!("λμ_{j}({e:e}) > 1 at the largest admissible e"))
                } else {
                    Error::ResolutionExceeded(format!("λμ_{j}({e:e}) < 1 at the e-floor"))
                });
            }
            let xn = if dir > 0.0 { (xp + step).min(lim) } else { (xp - step).max(lim) };
            let fnew = record(xn, &mut ev)?;
            if fnew.signum() != fp.signum() || fnew == 0.0 {
                if dir > 0.0 {
                    (a, fa, b, fb) = (xp, fp, xn, fnew);
                } else {
                    (a, fa, b, fb) = (xn, fnew, xp, fp);
                }
                break;
            }
            // secant extrapolation when the trend is clear, else doubling
            let slope = (fnew - fp) / (xn - xp);
            let jump = if slope < 0.0 && slope.is_finite() { (-fnew / slope).abs() * 1.2 } else { 0.0 };
            step = (2.0 * step).max(jump).min(8.0);
            xp = xn;
            fp = fnew;
        }
    }
    // Illinois regula falsi on [a, b] with f(a) ≥ 0 ≥ f(b)
    let mut side = 0i32;
    for _ in 0..opts.max_iter {
        if best_cert.get() <= opts.tol {
            break;
        }
        if fa == 0.0 || fb == 0.0 || (b - a).abs() < 1e-15 {
            break;
        }
        let mut x = if fa.is_finite() && fb.is_finite() { b - fb * (b - a) / (fb - fa) } else { 0.5 * (a + b) };
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        let fx = record(x, &mut ev)?;
        if fx > 0.0 {
            a = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        } else {
            b = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        }
    }
    drop(record);
    let (x, mu, res, top, vecs) = best.unwrap();
    let certificate = (lambda * mu - 1.0).abs();
    if certificate > opts.tol {
        return Err(Error::ConvergenceFailure(format!("|λμ − 1| = {certificate:e} after {} evaluations", ev.evaluations)));
    }
    let e = x.exp();
    Ok(Solution {
        e,
        diagnostics: SolveDiagnostics {
            lambda,
            j,
            e,
            mu,
            certificate,
            eig_residual: res,
            evaluations: ev.evaluations,
            applications: ev.applications,
            bracket: (a.exp(), b.exp()),
            top_spectrum: top,
        },
        vectors: vecs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSample {
    pub lambda: f64,
    /// NaN when the solve failed; see `error`.
    pub e: f64,
    pub diagnostics: Option<SolveDiagnostics>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenCurve {
    pub j: usize,
    pub convention: MeasureConvention,
    pub samples: Vec<CurveSample>,
}

impl EigenCurve {
    /// (λ, e) pairs of the successful samples.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.samples.iter().filter(|s| s.e.is_finite()).map(|s| (s.lambda, s.e)).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("e,lambda,index,value,residual\n");
        for s in &self.samples {
            let (mu, res) = s.diagnostics.as_ref().map(|d| (d.mu, d.certificate)).unwrap_or((f64::NAN, f64::NAN));
            out.push_str(&format!("{:.17e},{:.17e},{},{:.17e},{:.17e}\n", s.e, s.lambda, self.j, mu, res));
        }
        out
    }
}

/// Solves every (λ, j) on a strictly decreasing λ-grid, warm-starting each solve from its neighbour.
/// Failed samples are recorded and the sweep continues.
pub fn sweep(ctx: &BsContext, lambdas: &[f64], js: &[usize], opts: &SolveOptions) -> Result<Vec<EigenCurve>> {
    if lambdas.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParameter("λ-grid must be strictly decreasing".into()));
    }
    let mut curves = Vec::with_capacity(js.len());
    for &j in js {
        let mut samples = Vec::with_capacity(lambdas.len());
        let mut start: Option<Vec<C64>> = None;
        let mut hist: Vec<(f64, f64)> = Vec::new();
        for &lambda in lambdas {
            // ln(1/e) is close to linear in 1/λ; extrapolate from the last two samples
            let guess = match hist.as_slice() {
                [.., (l1, e1), (l2, e2)] => {
                    let slope = (e2.ln() - e1.ln()) / (1.0 / l2 - 1.0 / l1);
                    Some((e2.ln() + slope * (1.0 / lambda - 1.0 / l2)).exp())
                }
                [(_, e1)] => Some(e1 * 0.1),
                _ => None,
            };
            match solve_e_for_lambda(ctx, lambda, j, guess, start.as_deref(), opts) {
                Ok(sol) => {
                    start = sol.vectors.get(j - 1).cloned();
                    hist.push((lambda, sol.e));
                    samples.push(CurveSample { lambda, e: sol.e, diagnostics: Some(sol.diagnostics), error: None });
                }
                Err(err) => samples.push(CurveSample { lambda, e: f64::NAN, diagnostics: None, error: Some(err.to_string()) }),
            }
        }
        curves.push(EigenCurve { j, convention: ctx.symbol.convention, samples });
    }
    Ok(curves)
}

/// The rate constant multiplying λ ln(1/e) in the first-order law:
/// 2a/|p'(k₀)| for Lebesgue dω (a reduces to a for the BCS symbol), 2a for the weighted measure.
pub fn effective_rate(a: f64, symbol: &KineticSymbol) -> f64 {
    match symbol.convention {
        MeasureConvention::LebesgueDOmega => 2.0 * a / symbol.dp(symbol.fermi_radius()).abs(),
        MeasureConvention::WeightedDSigma => 2.0 * a,
    }
}

/// First-order prediction e = exp(−1/(λ·rate)).
pub fn predicted_e(a: f64, lambda: f64, symbol: &KineticSymbol) -> f64 {
    (-1.0 / (lambda * effective_rate(a, symbol))).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FirstOrderSample {
    pub lambda: f64,
    pub e: f64,
    /// |λ·a·ln(1/e) − 1| (rate-adjusted for the convention).
    pub r1: f64,
    /// |ln(1/e) − 1/(λ·a)|.
    pub log_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondOrderSample {
    pub lambda: f64,
    pub e: f64,
    pub b: f64,
    pub overlap: f64,
    /// ln(1 + τ/e) + 1/(λ·rate(b)), the rate taken in the curve's convention.
    pub s: f64,
    /// |s|·λ.
    pub r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticsReport {
    pub j: usize,
    pub a: f64,
    pub rate: f64,
    /// Least-squares slope of ln(1/e) against 1/λ and its intercept.
    pub fitted_slope: f64,
    pub fitted_intercept: f64,
    pub first_order: Vec<FirstOrderSample>,
    pub r1_decreasing: bool,
    pub second_order: Vec<SecondOrderSample>,
    pub grid: String,
}

impl AsymptoticsReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,e,r1,r2,b,log_error,s\n");
        for f in &self.first_order {
            let so = self.second_order.iter().find(|s| s.lambda == f.lambda);
            let (r2, b, s) = so.map(|s| (s.r2, s.b, s.s)).unwrap_or((f64::NAN, f64::NAN, f64::NAN));
            out.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                f.lambda, f.e, f.r1, r2, b, f.log_error, s
            ));
        }
        out
    }
}

/// r₁(λ) along the curve and a least-squares fit of ln(1/e) against 1/λ.
pub fn first_order_fit(curve: &EigenCurve, a: f64, symbol: &KineticSymbol) -> Result<AsymptoticsReport> {
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(format!("a = {a} must be positive")));
    }
    let pts = curve.points();
    if pts.is_empty() {
        return Err(Error::InvalidParameter("curve has no solved samples".into()));
    }
    let rate = effective_rate(a, symbol);
    let first_order: Vec<FirstOrderSample> = pts
        .iter()
        .map(|&(lambda, e)| {
            let le = -e.ln();
            FirstOrderSample { lambda, e, r1: (lambda * rate * le - 1.0).abs(), log_error: (le - 1.0 / (lambda * rate)).abs() }
        })
        .collect();
    let (slope, intercept) = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let xs: Vec<f64> = pts.iter().map(|p| 1.0 / p.0).collect();
        let ys: Vec<f64> = pts.iter().map(|p| -p.1.ln()).collect();
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let s = sxy / sxx;
        (s, my - s * mx)
    } else {
        (f64::NAN, f64::NAN)
    };
    let r1_decreasing = first_order.windows(2).all(|w| w[1].r1 < w[0].r1);
    Ok(AsymptoticsReport {
        j: curve.j,
        a,
        rate,
        fitted_slope: slope,
        fitted_intercept: intercept,
        first_order,
        r1_decreasing,
        second_order: vec![],
        grid: String::new(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BSample {
    pub lambda: f64,
    /// Negative of the matched eigenvalue of 𝒱_S + λ𝒲_S(0).
    pub b: f64,
    pub overlap: f64,
}

/// b_S^j(λ) on a λ-grid, selecting the branch of 𝒱_S + λ𝒲_S(0) whose eigenvectors overlap most with
/// the j-th eigenspace of 𝒱_S (the whole cluster of eigenvalues within `cluster_tol` of a_S^j).
pub fn b_samples(vs: &OperatorMatrix, w0: &OperatorMatrix, lambdas: &[f64], j: usize, cluster_tol: f64) -> Result<Vec<BSample>> {
    let (vals, vecs) = spectrum_sorted(&vs.matrix, vs.is_hermitian())?;
    if j == 0 || j > vals.len() {
        return Err(Error::InvalidParameter(format!("index {j} out of range")));
    }
    let target = vals[j - 1].re;
    let cluster: Vec<usize> = (0..vals.len()).filter(|&i| (vals[i].re - target).abs() <= cluster_tol * target.abs()).collect();
    let basis = orthonormal_columns(&vecs, &cluster);
    lambdas
        .iter()
        .map(|&lambda| {
            let bl = bs_lambda_operator(vs, w0, lambda)?;
            let (bv, bvec) = spectrum_sorted(&bl.matrix, bl.is_hermitian())?;
            // subspace overlap ‖P_cluster u‖ for each unit eigenvector u
            let mut best = (0usize, -1.0f64);
            for i in 0..bv.len().min(j + cluster.len() + 4) {
                let u: Vec<C64> = bvec.column(i).iter().copied().collect();
                let nu = norm(&u);
                let ov = basis.iter().map(|q| dot(q, &u).norm_sqr()).sum::<f64>().sqrt() / nu;
                if ov > best.1 + 1e-12 {
                    best = (i, ov);
                }
            }
            if best.1 < 0.5 {
                return Err(Error::BranchMismatch(best.1));
            }
            Ok(BSample { lambda, b: -bv[best.0].re, overlap: best.1 })
        })
        .collect()
}

fn spectrum_sorted(m: &DMatrix<C64>, hermitian: bool) -> Result<(Vec<C64>, DMatrix<C64>)> {
    if hermitian {
        let (v, c) = hermitian_eig(m)?;
        Ok((v.into_iter().map(|x| C64::new(x, 0.0)).collect(), c))
    } else {
        general_eig(m)
    }
}

fn orthonormal_columns(m: &DMatrix<C64>, idx: &[usize]) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = Vec::new();
    for &i in idx {
        let mut v: Vec<C64> = m.column(i).iter().copied().collect();
        for _ in 0..2 {
            for q in &out {
                let h = dot(q, &v);
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= h * y;
                }
            }
        }
        let n = norm(&v);
        if n > 1e-10 {
            out.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    out
}

/// s(λ) = ln(1 + τ/e_j(λ)) + 1/(λ·rate(b_S^j(λ))) at the λ shared by the report and the b-samples.
pub fn second_order_residual(
    report: &mut AsymptoticsReport,
    b: &[BSample],
    symbol: &KineticSymbol,
) -> Result<()> {
    let mut out = Vec::new();
    for f in &report.first_order {
        let Some(bs) = b.iter().find(|s| s.lambda == f.lambda) else { continue };
        if bs.overlap < 0.5 {
            return Err(Error::BranchMismatch(bs.overlap));
        }
        let s = (1.0 + symbol.tau / f.e).ln() + 1.0 / (f.lambda * effective_rate(bs.b, symbol));
        out.push(SecondOrderSample { lambda: f.lambda, e: f.e, b: bs.b, overlap: bs.overlap, s, r2: s.abs() * f.lambda });
    }
    report.second_order = out;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RieszSample {
    pub kappa: f64,
    pub rank: i64,
    pub trace: C64,
    pub non_integrality: f64,
    /// Smallest eigenvalue-to-contour distance.
    pub min_distance: f64,
    pub nodes: usize,
}

pub const RIESZ_MIN_NODES: usize = 64;
const RIESZ_MAX_NODES: usize = 1 << 14;

/// Diagonal blocks of an upper Hessenberg matrix split at negligible subdiagonal entries.
struct HessenbergBlocks {
    h: DMatrix<C64>,
    blocks: Vec<(usize, usize)>,
}

impl HessenbergBlocks {
    fn new(a: &DMatrix<C64>) -> Self {
        let n = a.nrows();
        let h = a.clone().hessenberg().h();
        let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let mut blocks = Vec::new();
        let mut lo = 0;
        for i in 1..=n {
            if i == n || h[(i, i - 1)].norm() <= 1e-14 * scale {
                blocks.push((lo, i));
                lo = i;
            }
        }
        Self { h, blocks }
    }

    /// tr (z − H)^{-1} = Σ_blocks c'(z)/c(z), where Hyman's recurrence gives det(z − H_block) ∝ c(z)
    /// with a z-independent factor.
    fn resolvent_trace(&self, z: C64) -> C64 {
        let h = &self.h;
        let zero = C64::new(0.0, 0.0);
        let mut total = zero;
        let mut x = Vec::new();
        let mut dx = Vec::new();
        for &(lo, hi) in &self.blocks {
            let m = |i: usize, j: usize| if i == j { z - h[(i, j)] } else { -h[(i, j)] };
            let k = hi - lo;
            x.clear();
            x.resize(k, zero);
            dx.clear();
            dx.resize(k, zero);
            x[k - 1] = C64::new(1.0, 0.0);
            for r in (1..k).rev() {
                let i = lo + r;
                let (mut s, mut ds) = (zero, x[r]);
                for c in r..k {
                    let mij = m(i, lo + c);
                    s += mij * x[c];
                    ds += mij * dx[c];
                }
                let sub = m(i, i - 1);
                x[r - 1] = -s / sub;
                dx[r - 1] = -ds / sub;
                // both vectors carry the same arbitrary scale; keep it bounded
                let big = x[r - 1].norm().max(dx[r - 1].norm());
                if big > 1e100 {
                    for c in (r - 1)..k {
                        x[c] /= big;
                        dx[c] /= big;
                    }
                }
            }
            let (mut c, mut dc) = (zero, x[0]);
            for col in 0..k {
                let m0 = m(lo, lo + col);
                c += m0 * x[col];
                dc += m0 * dx[col];
            }
            total += dc / c;
        }
        total
    }
}

/// (1/2πi)∮ tr (z − A)^{-1} dz on the circle by the trapezoid rule with `nodes` points.
fn contour_trace(a: &HessenbergBlocks, center: C64, radius: f64, nodes: usize) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..nodes {
        let th = 2.0 * PI * k as f64 / nodes as f64;
        let dz = C64::from_polar(radius, th);
        acc += a.resolvent_trace(center + dz) * dz;
    }
    acc / nodes as f64
}

/// Same quantity through explicit inverses; O(n³) per node, kept as a cross-check.
pub fn contour_trace_dense(a: &DMatrix<C64>, center: C64, radius: f64, nodes: usize) -> Result<C64> {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..nodes {
        let th = 2.0 * PI * k as f64 / nodes as f64;
        let dz = C64::from_polar(radius, th);
        let z = center + dz;
        let m = DMatrix::<C64>::from_fn(n, n, |i, j| if i == j { z - a[(i, j)] } else { -a[(i, j)] });
        let inv = m.try_inverse().ok_or(Error::ContourTooClose { distance: 0.0 })?;
        acc += inv.trace() * dz;
    }
    Ok(acc / nodes as f64)
}

/// Trapezoid approximation of the Riesz trace of `a` through the Hessenberg recurrence.
pub fn contour_trace_hessenberg(a: &DMatrix<C64>, center: C64, radius: f64, nodes: usize) -> C64 {
    contour_trace(&HessenbergBlocks::new(a), center, radius, nodes)
}

/// Rank of the Riesz projection of each family member inside the circle (center, radius).
/// Nodes are doubled from 64 until two successive traces agree to 1e-10.
pub fn riesz_count(
    family: impl Fn(f64) -> Result<OperatorMatrix>,
    center: C64,
    radius: f64,
    kappas: &[f64],
) -> Result<Vec<RieszSample>> {
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter("radius must be positive".into()));
    }
    let mut out = Vec::with_capacity(kappas.len());
    for &kappa in kappas {
        let op = family(kappa)?;
        let vals = general_eigenvalues(&op.matrix)?;
        let min_distance = vals.iter().map(|v| ((v - center).norm() - radius).abs()).fold(f64::INFINITY, f64::min);
        if min_distance <= radius * 1e-3 {
            return Err(Error::ContourTooClose { distance: min_distance });
        }
        let mut nodes = RIESZ_MIN_NODES;
        let hb = HessenbergBlocks::new(&op.matrix);
        let mut trace = contour_trace(&hb, center, radius, nodes);
        while nodes < RIESZ_MAX_NODES {
            let next = contour_trace(&hb, center, radius, 2 * nodes);
            nodes *= 2;
            let done = (next - trace).norm() < 1e-10;
            trace = next;
            if done {
                break;
            }
        }
        let rank = trace.re.round();
        let non_integrality = (trace - C64::new(rank, 0.0)).norm();
        if non_integrality > 1e-6 {
            return Err(Error::NonIntegerRank(non_integrality));
        }
        out.push(RieszSample { kappa, rank: rank as i64, trace, non_integrality, min_distance, nodes });
    }
    Ok(out)
}
