use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use statrs::function::beta::beta;

use super::geometry::box_ball_volume;
use super::series::{sum_series, TailKind};
use super::{area, Model, Potential};
use crate::error::{Error, Result};
use crate::quadrature::{build_sphere_quadrature, gauss_legendre, integrate};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormOptions {
    /// Gauss points per axis in each cube sub-cell.
    pub cube_order: usize,
    /// Sub-cells per axis in each unit cube.
    pub cube_sub: usize,
    pub max_shells: usize,
    pub max_blocks: usize,
    /// Number of points on the geometric μ grid of the MT supremum.
    pub mu_points: usize,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self { cube_order: 6, cube_sub: 2, max_shells: 64, max_blocks: 400, mu_points: 200 }
    }
}

const BLOCK_REL_TOL: f64 = 1e-13;

/// Serializes +∞ as the string "inf" so that JSON stays explicit.
pub(crate) fn ser_extended<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
    } else {
        s.serialize_f64(*v)
    }
}

/// ∫_0^∞ g(r) dr split into dyadic blocks anchored at `base`, summed in both directions.
fn radial_integral(g: impl Fn(f64) -> f64 + Sync, base: f64, breaks: &[f64], max_blocks: usize) -> Option<f64> {
    let block = |a: f64, b: f64| integrate(&g, a, b, breaks, 0.0, BLOCK_REL_TOL).value.abs();
    let inward = sum_series(|j| block(base * 0.5f64.powi(j as i32 + 1), base * 0.5f64.powi(j as i32)), max_blocks)?;
    let outward = sum_series(|k| block(base * 2f64.powi(k as i32), base * 2f64.powi(k as i32 + 1)), max_blocks)?;
    Some(inward.value + outward.value)
}

/// Global L^p norm.
pub fn lp_norm(v: &Potential, p: f64, opts: &NormOptions) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidExponents(format!("p = {p} < 1")));
    }
    let a = v.amplitude.norm();
    if a == 0.0 {
        return Ok(0.0);
    }
    let d = v.dim;
    let s = v.scale;
    let unit = match &v.model {
        Model::GaussianRadial { .. } | Model::BallIndicator { .. } | Model::RadialPowerLaw { .. } | Model::LogDecay { .. } => {
            let shape = |r: f64| v.radial_abs(r).unwrap() / a;
            let integral = radial_integral(
                |r| shape(r).powf(p) * r.powi(d as i32 - 1),
                s,
                &v.radial_breakpoints(),
                opts.max_blocks,
            )
            .ok_or_else(|| Error::Divergent(format!("L^{p} radial integral")))?;
            (area(d) * integral).powf(1.0 / p)
        }
        Model::OscillatingSlab { eps } => {
            let m = (d - 1) as f64;
            let q = p * (1.0 + eps);
            let gamma = q - m / 2.0;
            if !(q > m / 2.0 && gamma > 1.0) {
                return Err(Error::Divergent(format!("slab L^{p} integral")));
            }
            let transverse = area(d - 1) * 0.5 * beta(m / 2.0, gamma);
            let f = |x: f64| (4.0 * PI * x).cos().abs().powf(p) * (1.0 + x).powf(-gamma);
            let breaks: Vec<f64> = (0..4).map(|j| 0.125 + 0.25 * j as f64).collect();
            let series = sum_series(
                |k| {
                    let k = k as f64;
                    let br: Vec<f64> = breaks.iter().map(|b| b + k).collect();
                    integrate(f, k, k + 1.0, &br, 0.0, BLOCK_REL_TOL).value
                },
                opts.max_blocks,
            )
            .ok_or_else(|| Error::Divergent(format!("slab L^{p} tail")))?;
            (transverse * 2.0 * series.value * s.powi(d as i32)).powf(1.0 / p)
        }
        Model::GridSampled { box_len, n, values } => {
            let h = box_len / (*n as f64 - 1.0);
            let mut acc = 0.0;
            for (idx, val) in values.iter().enumerate() {
                let mut w = 1.0;
                let mut rem = idx;
                for _ in 0..d {
                    let i = rem % n;
                    rem /= n;
                    w *= if i == 0 || i == n - 1 { 0.5 * h } else { h };
                }
                acc += w * val.norm().powf(p);
            }
            (acc * s.powi(d as i32)).powf(1.0 / p)
        }
    };
    Ok(a * unit)
}

/// Lattice points with ‖s‖_∞ = n, in a fixed order.
fn shell_points(d: usize, n: i64) -> Vec<Vec<i64>> {
    if n == 0 {
        return vec![vec![0; d]];
    }
    let mut out = Vec::new();
    let side = 2 * n + 1;
    let count = (side as usize).pow(d as u32 - 1);
    for idx in 0..count {
        let mut head = Vec::with_capacity(d);
        let mut rem = idx;
        for _ in 0..d - 1 {
            head.push((rem % side as usize) as i64 - n);
            rem /= side as usize;
        }
        let on_face = head.iter().any(|c| c.abs() == n);
        if on_face {
            for last in -n..=n {
                let mut p = head.clone();
                p.push(last);
                out.push(p);
            }
        } else {
            for last in [-n, n] {
                let mut p = head.clone();
                p.push(last);
                out.push(p);
            }
        }
    }
    out
}

/// ∫_Q |model|^q over the unit cube centred at `c` (amplitude excluded).
fn cube_power_integral(v: &Potential, c: &[i64], q: f64, opts: &NormOptions, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let d = v.dim;
    if let Model::BallIndicator { radius } = v.model {
        let lo: Vec<f64> = c.iter().map(|&x| x as f64 - 0.5).collect();
        let hi: Vec<f64> = c.iter().map(|&x| x as f64 + 0.5).collect();
        if let Some(vol) = box_ball_volume(&lo, &hi, radius * v.scale) {
            return vol;
        }
    }
    if let Model::GridSampled { box_len, .. } = v.model {
        let half = 0.5 * box_len * v.scale;
        if c.iter().any(|&x| (x as f64).abs() - 0.5 > half) {
            return 0.0;
        }
    }
    let a = v.amplitude.norm();
    let sub = opts.cube_sub;
    let h = 1.0 / sub as f64;
    let (gx, gw) = rule;
    let m = gx.len();
    let per_axis = sub * m;
    let mut nodes = Vec::with_capacity(per_axis);
    let mut weights = Vec::with_capacity(per_axis);
    for k in 0..sub {
        let lo = -0.5 + k as f64 * h;
        for (x, w) in gx.iter().zip(gw) {
            nodes.push(lo + 0.5 * h * (x + 1.0));
            weights.push(0.5 * h * w);
        }
    }
    let total = per_axis.pow(d as u32);
    let mut x = vec![0.0; d];
    let mut acc = 0.0;
    for idx in 0..total {
        let mut rem = idx;
        let mut w = 1.0;
        for ax in 0..d {
            let i = rem % per_axis;
            rem /= per_axis;
            x[ax] = c[ax] as f64 + nodes[i];
            w *= weights[i];
        }
        let val = v.eval_unchecked(&x).norm() / a;
        if val != 0.0 {
            acc += w * val.powf(q);
        }
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmalgamResult {
    #[serde(serialize_with = "ser_extended")]
    pub value: f64,
    pub outer_p: f64,
    pub inner_q: f64,
    /// ℓ^∞ radius of the last lattice shell summed.
    pub truncation_radius: usize,
    pub tail: TailKind,
    pub tail_estimate: f64,
}

/// [Σ_s local_s^p]^{1/p}.
pub fn amalgam_from_local_norms(local: &[f64], outer_p: f64) -> f64 {
    local.iter().map(|l| l.powf(outer_p)).sum::<f64>().powf(1.0 / outer_p)
}

/// ℓ^{outer_p} L^{inner_q} norm over the unit cubes centred on ℤ^d.
pub fn amalgam_norm(v: &Potential, outer_p: f64, inner_q: f64, opts: &NormOptions) -> Result<AmalgamResult> {
    if !(outer_p >= 1.0 && inner_q >= 1.0) {
        return Err(Error::InvalidExponents(format!("outer {outer_p}, inner {inner_q} must be ≥ 1")));
    }
    let a = v.amplitude.norm();
    if a == 0.0 {
        return Ok(AmalgamResult { value: 0.0, outer_p, inner_q, truncation_radius: 0, tail: TailKind::Negligible, tail_estimate: 0.0 });
    }
    let rule = gauss_legendre(opts.cube_order);
    let d = v.dim;
    let outcome = sum_series(
        |n| {
            let pts = shell_points(d, n as i64);
            let locals: Vec<f64> = pts
                .par_iter()
                .map(|c| cube_power_integral(v, c, inner_q, opts, &rule).powf(outer_p / inner_q))
                .collect();
            locals.iter().sum()
        },
        opts.max_shells,
    )
    .ok_or_else(|| Error::Divergent("amalgam lattice sum".into()))?;
    Ok(AmalgamResult {
        value: a * outcome.value.powf(1.0 / outer_p),
        outer_p,
        inner_q,
        truncation_radius: outcome.terms - 1,
        tail: outcome.tail,
        tail_estimate: outcome.tail_estimate,
    })
}

fn mt_inner(v: &Potential, mu: f64, opts: &NormOptions) -> Option<f64> {
    let breaks: Vec<f64> = v
        .radial_breakpoints()
        .iter()
        .filter(|&&r| r > mu)
        .map(|&r| (r * r - mu * mu).sqrt())
        .collect();
    let h = |u: f64| v.angular_sup((mu * mu + u * u).sqrt());
    radial_integral(h, v.scale, &breaks, opts.max_blocks)
}

/// sup_μ ∫_μ^∞ H(r) r (r²−μ²)^{−1/2} dr, computed after the substitution r = √(μ²+u²).
/// Returns +∞ when the integral diverges.
pub fn mt_norm(v: &Potential, opts: &NormOptions) -> Result<f64> {
    if v.amplitude.norm() == 0.0 {
        return Ok(0.0);
    }
    let s = v.scale;
    let n = opts.mu_points.max(2);
    let mut grid = vec![0.0];
    for i in 0..n {
        let e = -4.0 + 8.0 * i as f64 / (n - 1) as f64;
        grid.push(s * 10f64.powf(e));
    }
    let mut vals = Vec::with_capacity(grid.len());
    for &mu in &grid {
        match mt_inner(v, mu, opts) {
            Some(x) => vals.push(x),
            None => return Ok(f64::INFINITY),
        }
    }
    let (imax, &best) = vals.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    let mut best = best;
    // golden-section refinement on the bracketing cell
    if imax > 0 {
        let lo = grid[imax - 1];
        let hi = if imax + 1 < grid.len() { grid[imax + 1] } else { grid[imax] };
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (lo, hi);
        let f = |mu: f64| mt_inner(v, mu, opts).unwrap_or(f64::INFINITY);
        let mut c = b - g * (b - a);
        let mut dd = a + g * (b - a);
        let (mut fc, mut fd) = (f(c), f(dd));
        for _ in 0..60 {
            if fc > fd {
                b = dd;
                dd = c;
                fd = fc;
                c = b - g * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = dd;
                fc = fd;
                dd = a + g * (b - a);
                fd = f(dd);
            }
            if b - a < 1e-12 * b.max(1e-300) {
                break;
            }
        }
        best = best.max(fc).max(fd);
    }
    Ok(best)
}

/// Σ_j (∫_{2^j}^{2^{j+1}} |V|^p r^{p−1} dr)^{1/p}; +∞ when the dyadic sum is not summable.
pub fn dp_norm(v: &Potential, p: f64, opts: &NormOptions) -> Result<f64> {
    if !v.is_radial() {
        return Err(Error::NotRadial);
    }
    if !(p > 2.0) {
        return Err(Error::InvalidExponents(format!("D_p needs p > 2, got {p}")));
    }
    let a = v.amplitude.norm();
    if a == 0.0 {
        return Ok(0.0);
    }
    let breaks = v.radial_breakpoints();
    let f = |r: f64| (v.radial_abs(r).unwrap() / a).powf(p) * r.powf(p - 1.0);
    let block = |lo: f64, hi: f64| integrate(f, lo, hi, &breaks, 0.0, BLOCK_REL_TOL).value.powf(1.0 / p);
    let up = sum_series(|j| block(2f64.powi(j as i32), 2f64.powi(j as i32 + 1)), opts.max_blocks);
    let down = sum_series(|j| block(2f64.powi(-(j as i32) - 1), 2f64.powi(-(j as i32))), opts.max_blocks);
    match (up, down) {
        (Some(u), Some(dn)) => Ok(a * (u.value + dn.value)),
        _ => Ok(f64::INFINITY),
    }
}

fn check_mixed_window(d: usize, p: f64, sigma: f64) -> Result<()> {
    let df = d as f64;
    if !(p >= 1.0 && p < 2.0 * df / (df + 1.0)) {
        return Err(Error::InvalidExponents(format!("p = {p} outside [1, 2d/(d+1))")));
    }
    let inv_pp = 1.0 - 1.0 / p;
    let inv_sp = 1.0 - 1.0 / sigma;
    let second = if inv_pp == 0.0 {
        -0.5
    } else if d <= 2 {
        f64::INFINITY
    } else {
        2.0 * df * inv_pp / (df - 2.0) - 0.5
    };
    let lower = inv_pp.max(second);
    if !(inv_sp <= 0.5 + 1e-12 && inv_sp >= lower - 1e-12) {
        return Err(Error::InvalidExponents(format!(
            "1/σ' = {inv_sp} outside [{lower}, 1/2] for p = {p}, d = {d}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixedNorm {
    pub p: f64,
    pub sigma: f64,
    #[serde(serialize_with = "ser_extended")]
    pub value: f64,
}

/// L^{p/(2−p)}(r^{d−1}dr; L^{σ/(2−σ)}(S^{d−1})) norm with the admissible-window check.
pub fn mixed_norm(v: &Potential, p: f64, sigma: f64, opts: &NormOptions) -> Result<f64> {
    check_mixed_window(v.dim, p, sigma)?;
    let outer = p / (2.0 - p);
    let inner = if sigma >= 2.0 { f64::INFINITY } else { sigma / (2.0 - sigma) };
    mixed_norm_unchecked(v, outer, inner, opts)
}

/// Iterated norm (∫_0^∞ ‖V(r·)‖_{L^inner(S)}^outer r^{d−1} dr)^{1/outer}; `inner` may be ∞.
pub fn mixed_norm_unchecked(v: &Potential, outer: f64, inner: f64, opts: &NormOptions) -> Result<f64> {
    let a = v.amplitude.norm();
    if a == 0.0 {
        return Ok(0.0);
    }
    let d = v.dim;
    let sphere_part: Box<dyn Fn(f64) -> f64 + Sync> = if v.is_radial() {
        let factor = if inner.is_infinite() { 1.0 } else { area(d).powf(1.0 / inner) };
        Box::new(move |r| factor * v.radial_abs(r).unwrap() / a)
    } else {
        if d > 3 {
            return Err(Error::UnsupportedDimension(d));
        }
        let quad = build_sphere_quadrature(d, 64)?;
        Box::new(move |r| {
            let mut x = vec![0.0; d];
            let mut acc: f64 = 0.0;
            for i in 0..quad.len() {
                for (c, w) in x.iter_mut().zip(quad.node(i)) {
                    *c = r * w;
                }
                let val = v.eval_unchecked(&x).norm() / a;
                if inner.is_infinite() {
                    acc = acc.max(val);
                } else {
                    acc += quad.weights[i] * val.powf(inner);
                }
            }
            if inner.is_infinite() {
                acc
            } else {
                acc.powf(1.0 / inner)
            }
        })
    };
    let integral = radial_integral(
        |r| sphere_part(r).powf(outer) * r.powi(d as i32 - 1),
        v.scale,
        &v.radial_breakpoints(),
        opts.max_blocks,
    )
    .ok_or_else(|| Error::Divergent("mixed-norm radial integral".into()))?;
    Ok(a * integral.powf(1.0 / outer))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DpNorm {
    pub p: f64,
    #[serde(serialize_with = "ser_extended")]
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormReport {
    pub amalgam_norm: Option<AmalgamResult>,
    pub lp_norms: BTreeMap<String, f64>,
    #[serde(serialize_with = "ser_extended")]
    pub mt_norm: f64,
    pub dp_norm: Option<DpNorm>,
    pub mixed_norm: Option<MixedNorm>,
}

/// All norms with their default exponents; entries that do not apply to the model are omitted.
pub fn norm_report(v: &Potential, opts: &NormOptions) -> Result<NormReport> {
    let d = v.dim as f64;
    let amalgam_norm = match amalgam_norm(v, (d + 1.0) / 2.0, (d / 2.0).max(1.0), opts) {
        Ok(r) => Some(r),
        Err(Error::Divergent(_)) => Some(AmalgamResult {
            value: f64::INFINITY,
            outer_p: (d + 1.0) / 2.0,
            inner_q: d / 2.0,
            truncation_radius: opts.max_shells,
            tail: TailKind::Negligible,
            tail_estimate: f64::INFINITY,
        }),
        Err(e) => return Err(e),
    };
    let mut lp_norms = BTreeMap::new();
    for p in [1.0, (d / 2.0).max(1.0), (d + 1.0) / 2.0, 2.0] {
        let key = format!("{p}");
        if lp_norms.contains_key(&key) {
            continue;
        }
        let val = match lp_norm(v, p, opts) {
            Ok(x) => x,
            Err(Error::Divergent(_)) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        lp_norms.insert(key, val);
    }
    let mt = mt_norm(v, opts)?;
    let dp = if v.is_radial() { Some(DpNorm { p: 3.0, value: dp_norm(v, 3.0, opts)? }) } else { None };
    let mixed = if v.dim >= 3 {
        let (p, sigma) = (1.1, 2.0);
        let value = match mixed_norm(v, p, sigma, opts) {
            Ok(x) => x,
            Err(Error::Divergent(_)) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        Some(MixedNorm { p, sigma, value })
    } else {
        None
    };
    Ok(NormReport { amalgam_norm, lp_norms, mt_norm: mt, dp_norm: dp, mixed_norm: mixed })
}
