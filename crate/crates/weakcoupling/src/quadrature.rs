//! Gauss rules, sphere rules, graded energy-shell grids and an adaptive Gauss–Kronrod integrator.

use std::collections::BinaryHeap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::harmonic::{sphere_area, Branch, KineticSymbol};

/// n-point Gauss–Legendre rule on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_deriv(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_deriv(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_deriv(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let h = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    (x.iter().map(|&t| c + h * t).collect(), w.iter().map(|&v| h * v).collect())
}

/// n-point Gauss rule on [−1, 1] for the weight (1−t²)^{(d−3)/2}.
pub fn gegenbauer_rule(d: usize, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    if n < 1 {
        return Err(Error::InvalidParameter("rule needs at least one node".into()));
    }
    if d == 3 {
        return Ok(gauss_legendre(n));
    }
    if d == 2 {
        let x = (0..n).map(|k| -(PI * (k as f64 + 0.5) / n as f64).cos()).collect();
        return Ok((x, vec![PI / n as f64; n]));
    }
    // Golub–Welsch on the monic recurrence of C^{(λ)}, λ = (d−2)/2
    let lam = (d as f64 - 2.0) / 2.0;
    let a = lam - 0.5;
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let kf = k as f64;
        let beta = kf * (kf + 2.0 * lam - 1.0) / (4.0 * (kf + lam) * (kf + lam - 1.0));
        jac[(k, k - 1)] = beta.sqrt();
        jac[(k - 1, k)] = beta.sqrt();
    }
    let mu0 = (0.5 * PI.ln() + ln_gamma(a + 1.0) - ln_gamma(a + 1.5)).exp();
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(pairs.into_iter().unzip())
}

/// Quadrature rule on the unit sphere S^{d−1}, nodes stored row-major with stride d.
#[derive(Debug, Clone, Serialize)]
pub struct SphereQuadrature {
    pub dim: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub order: usize,
    pub exactness_degree: usize,
}

impl SphereQuadrature {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for i in 0..self.len() {
            for c in self.node(i) {
                s.push_str(&format!("{c:e},"));
            }
            s.push_str(&format!("{:e}\n", self.weights[i]));
        }
        s
    }
}

pub fn build_sphere_quadrature(d: usize, order: usize) -> Result<SphereQuadrature> {
    if order < 4 {
        return Err(Error::InvalidParameter(format!("sphere order {order} < 4")));
    }
    match d {
        2 => {
            let n = 2 * order;
            let mut nodes = Vec::with_capacity(2 * n);
            for j in 0..n {
                let th = 2.0 * PI * j as f64 / n as f64;
                nodes.push(th.cos());
                nodes.push(th.sin());
            }
            Ok(SphereQuadrature { dim: 2, nodes, weights: vec![2.0 * PI / n as f64; n], order, exactness_degree: n - 1 })
        }
        3 => {
            // product rule exact through harmonic degree 2·order + 1
            let (ct, wt) = gauss_legendre(order + 1);
            let nphi = 2 * order + 2;
            let mut nodes = Vec::with_capacity(3 * ct.len() * nphi);
            let mut weights = Vec::with_capacity(ct.len() * nphi);
            for (&c, &w) in ct.iter().zip(&wt) {
                let s = (1.0 - c * c).sqrt();
                for k in 0..nphi {
                    let phi = 2.0 * PI * k as f64 / nphi as f64;
                    nodes.extend_from_slice(&[s * phi.cos(), s * phi.sin(), c]);
                    weights.push(w * 2.0 * PI / nphi as f64);
                }
            }
            Ok(SphereQuadrature { dim: 3, nodes, weights, order, exactness_degree: 2 * order + 1 })
        }
        _ => Err(Error::UnsupportedDimension(d)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grading {
    pub ratio: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub points_per_panel: usize,
    pub panels: usize,
}

/// Energy shells S_t^± for t in (0, t_max] on a geometrically graded panel grid.
#[derive(Debug, Clone, Serialize)]
pub struct ShellFamily {
    #[serde(skip)]
    pub symbol: KineticSymbol,
    pub t_nodes: Vec<f64>,
    pub t_weights: Vec<f64>,
    pub r_outer: Vec<f64>,
    pub r_inner: Vec<f64>,
    pub grading: Grading,
}

pub const GRADING_RATIO: f64 = 1.35;
const MAX_PANELS_ACROSS: f64 = 16.0;

impl ShellFamily {
    pub fn len(&self) -> usize {
        self.t_nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_nodes.is_empty()
    }

    /// Weights for ∫ f(t)/(t+e) dt.
    pub fn resolvent_weights(&self, e: f64) -> Vec<f64> {
        self.t_nodes.iter().zip(&self.t_weights).map(|(&t, &w)| w / (t + e)).collect()
    }

    pub fn radius(&self, i: usize, branch: Branch) -> f64 {
        match branch {
            Branch::Outer => self.r_outer[i],
            Branch::Inner => self.r_inner[i],
        }
    }
}

/// Shell grid over (0, τ].
pub fn shell_grid(symbol: &KineticSymbol, n_t: usize, e: f64) -> Result<ShellFamily> {
    shell_grid_range(symbol, n_t, e, symbol.tau)
}

/// Shell grid over (0, t_max]. `n_t` is the number of Gauss points per panel.
pub fn shell_grid_range(symbol: &KineticSymbol, n_t: usize, e: f64, t_max: f64) -> Result<ShellFamily> {
    if n_t < 8 {
        return Err(Error::InvalidParameter(format!("n_t = {n_t} < 8")));
    }
    if !(t_max > 0.0) {
        return Err(Error::InvalidParameter("t_max must be positive".into()));
    }
    let t_min = (e.max(1e-12) / 10.0).min(t_max / GRADING_RATIO);
    let mut edges = vec![0.0, t_min];
    loop {
        let next = edges.last().unwrap() * GRADING_RATIO;
        if next >= t_max * (1.0 - 1e-12) {
            break;
        }
        edges.push(next);
    }
    let last = *edges.last().unwrap();
    if t_max / last < 1.1 && edges.len() > 2 {
        edges.pop();
    }
    edges.push(t_max);
    // split wide outer panels so oscillatory shell integrands stay resolved
    let cap = t_max / MAX_PANELS_ACROSS;
    let mut fine = vec![edges[0]];
    for win in edges.windows(2) {
        let pieces = ((win[1] - win[0]) / cap).ceil().max(1.0) as usize;
        for j in 1..=pieces {
            fine.push(win[0] + (win[1] - win[0]) * j as f64 / pieces as f64);
        }
    }
    let edges = fine;
    let (gx, gw) = gauss_legendre(n_t);
    let mut t_nodes = Vec::with_capacity(n_t * edges.len());
    let mut t_weights = Vec::with_capacity(n_t * edges.len());
    for win in edges.windows(2) {
        let h = 0.5 * (win[1] - win[0]);
        let c = 0.5 * (win[1] + win[0]);
        for (x, w) in gx.iter().zip(&gw) {
            t_nodes.push(c + h * x);
            t_weights.push(h * w);
        }
    }
    let r_outer = t_nodes.iter().map(|&t| symbol.shell_radius(t, Branch::Outer)).collect::<Result<Vec<_>>>()?;
    let r_inner = t_nodes.iter().map(|&t| symbol.shell_radius(t, Branch::Inner)).collect::<Result<Vec<_>>>()?;
    let panels = edges.len() - 1;
    Ok(ShellFamily {
        symbol: *symbol,
        t_nodes,
        t_weights,
        r_outer,
        r_inner,
        grading: Grading { ratio: GRADING_RATIO, t_min, t_max, points_per_panel: n_t, panels },
    })
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = WGK[7] * fc;
    let mut rg = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        rk += WGK[j] * s;
        if j % 2 == 1 {
            rg += WG[j / 2] * s;
        }
    }
    (rk * h, ((rk - rg) * h).abs())
}

struct Piece {
    a: f64,
    b: f64,
    val: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

/// Globally adaptive Gauss–Kronrod (7/15) quadrature on [a, b] with optional interior breakpoints.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], abs_tol: f64, rel_tol: f64) -> Integral {
    let mut pts = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    pts.extend(inner);
    pts.push(b);
    let mut heap = BinaryHeap::new();
    let (mut total, mut err) = (0.0, 0.0);
    for w in pts.windows(2) {
        if w[1] > w[0] {
            let (v, e) = gk15(&f, w[0], w[1]);
            total += v;
            err += e;
            heap.push(Piece { a: w[0], b: w[1], val: v, err: e });
        }
    }
    let mut evals = 0;
    while err > abs_tol.max(rel_tol * total.abs()) && evals < 20_000 {
        let Some(p) = heap.pop() else { break };
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            heap.push(p);
            break;
        }
        let (v1, e1) = gk15(&f, p.a, m);
        let (v2, e2) = gk15(&f, m, p.b);
        total += v1 + v2 - p.val;
        err += e1 + e2 - p.err;
        heap.push(Piece { a: p.a, b: m, val: v1, err: e1 });
        heap.push(Piece { a: m, b: p.b, val: v2, err: e2 });
        evals += 1;
    }
    // re-sum for a value free of accumulated update rounding
    let mut pieces: Vec<Piece> = heap.into_vec();
    pieces.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = pieces.iter().map(|p| p.val).sum();
    let error = pieces.iter().map(|p| p.err).sum();
    Integral { value, error }
}

/// Sum of the sphere weights expected for S^{d−1}.
pub fn expected_sphere_mass(d: usize) -> f64 {
    sphere_area(d)
}
