//! ⟨f, h(T)g⟩ two ways: as a Fourier multiplier on the box, and through the shell
//! decomposition Σ_± ∫ h(t)⟨F_{S_t^±}f, F_{S_t^±}g⟩ dt/|p'(r_±(t))|.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use super::fft::{Activity, BoxFft};
use super::BoxGrid;
use crate::error::{Error, Result};
use crate::harmonic::{Branch, KineticSymbol};
use crate::quadrature::{gauss_legendre_on, SphereQuadrature};

/// h(t) = exp(−β/(1−u²)) with u the affine map of [a, b] onto [−1, 1]; zero outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BumpFunction {
    pub a: f64,
    pub b: f64,
    pub beta: f64,
}

impl BumpFunction {
    pub fn eval(&self, t: f64) -> f64 {
        let u = (2.0 * t - self.a - self.b) / (self.b - self.a);
        if u.abs() >= 1.0 {
            0.0
        } else {
            (-self.beta / (1.0 - u * u)).exp()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralMeasureCheck {
    pub lhs: C64,
    pub rhs: C64,
    /// |lhs − rhs| / |rhs| (absolute when rhs vanishes).
    pub gap: f64,
}

const T_PANELS: usize = 16;
const T_POINTS: usize = 16;

pub fn spectral_measure_check(
    f: &[C64],
    g: &[C64],
    h: &BumpFunction,
    symbol: &KineticSymbol,
    grid: &BoxGrid,
    quad: &SphereQuadrature,
) -> Result<SpectralMeasureCheck> {
    if f.len() != grid.len() || g.len() != grid.len() {
        return Err(Error::DimensionMismatch { expected: grid.len(), got: f.len().min(g.len()) });
    }
    if quad.dim != grid.dim || symbol.dim != grid.dim {
        return Err(Error::DimensionMismatch { expected: grid.dim, got: quad.dim });
    }
    if !(h.a >= 0.0 && h.b > h.a) {
        return Err(Error::InvalidParameter("bump needs 0 ≤ a < b".into()));
    }
    let k_max = symbol.shell_radius(h.b, Branch::Outer)?;
    if 0.5 / grid.h() <= k_max {
        return Err(Error::InvalidParameter(format!(
            "grid Nyquist frequency {:.3} does not reach the outer shell radius {k_max:.3}",
            0.5 / grid.h()
        )));
    }
    let fmax = f.iter().chain(g).map(|z| z.norm()).fold(0.0, f64::max);
    let active: Vec<usize> = (0..grid.len()).filter(|&i| f[i].norm().max(g[i].norm()) > 1e-18 * fmax).collect();
    if active.is_empty() {
        let z = C64::new(0.0, 0.0);
        return Ok(SpectralMeasureCheck { lhs: z, rhs: z, gap: 0.0 });
    }
    let hd = grid.h().powi(grid.dim as i32);

    // multiplier route
    let act = Activity::from_indices(grid.dim, grid.n, &active);
    let fft = BoxFft::new(grid.dim, grid.n);
    let mut fh = f.to_vec();
    let mut gh = g.to_vec();
    fft.forward(&mut fh, &act);
    fft.forward(&mut gh, &act);
    let knorm = grid.frequency_norms();
    let mut lhs = C64::new(0.0, 0.0);
    for k in 0..grid.len() {
        let w = h.eval(symbol.t(knorm[k]));
        if w != 0.0 {
            lhs += w * fh[k].conj() * gh[k];
        }
    }
    lhs *= hd * hd / grid.l.powi(grid.dim as i32);

    // shell route: continuum transforms of the grid functions at shell nodes
    let mut ts = Vec::new();
    let mut tw = Vec::new();
    let width = (h.b - h.a) / T_PANELS as f64;
    for p in 0..T_PANELS {
        let (x, w) = gauss_legendre_on(T_POINTS, h.a + p as f64 * width, h.a + (p + 1) as f64 * width);
        ts.extend(x);
        tw.extend(w);
    }
    let d = grid.dim;
    let mut shells = Vec::new();
    for (&t, &w) in ts.iter().zip(&tw) {
        for branch in [Branch::Outer, Branch::Inner] {
            let rho = symbol.shell_radius(t, branch)?;
            let c = w * h.eval(t) * rho.powi(d as i32 - 1) / symbol.dp(rho).abs();
            shells.push((rho, c));
        }
    }
    let pts: Vec<([f64; 3], C64, C64)> = active.iter().map(|&i| (grid.point(i), f[i], g[i])).collect();
    let rhs: C64 = shells
        .par_iter()
        .map(|&(rho, c)| {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..quad.len() {
                let node = quad.node(j);
                let (mut ff, mut gg) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
                for (x, fv, gv) in &pts {
                    let ph = -2.0 * PI * rho * (0..d).map(|a| x[a] * node[a]).sum::<f64>();
                    let e = C64::new(ph.cos(), ph.sin());
                    ff += fv * e;
                    gg += gv * e;
                }
                acc += quad.weights[j] * (ff * hd).conj() * (gg * hd);
            }
            acc * c
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    let gap = if rhs.norm() > 0.0 { (lhs - rhs).norm() / rhs.norm() } else { (lhs - rhs).norm() };
    Ok(SpectralMeasureCheck { lhs, rhs, gap })
}
