//! 𝒲_S(e) = F_S V^{1/2} BS_reg(e) |V|^{1/2} F_S* = F_S V G_reg(e) V F_S* on sphere nodes, and
//! ℬ_S(λ) = 𝒱_S + λ𝒲_S(0).
//!
//! The low part is computed in the continuum from V̂ on the shells S_t^±:
//! ∫_0^{2τ} χ(t/τ)[F(t) − F(0)]/(t+e) dt + c_χ(e)F(0), where
//! F(t)[i,k] = Σ_± ρ^{d−1}/|p'(ρ)| Σ_j u_j V̂(ξ_i − ρω_j)V̂(ρω_j − ξ_k).
//! The high part applies (1−χ(T/τ))(T+e)^{−1} on a box to the columns V F_S*.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::cutoff::{chi, chi_tail_integral};
use super::fft::BoxFft;
use super::{BoxGrid, Part, Resolvent, ResolventModel, Space};
use crate::error::{Error, Result};
use crate::harmonic::KineticSymbol;
use crate::potentials::Potential;
use crate::quadrature::{shell_grid_range, SphereQuadrature};
use crate::vs_operator::{surface_nodes, surface_weights, OperatorMatrix};

#[derive(Debug, Clone, Copy)]
pub struct WsOptions {
    /// Gauss points per graded t-panel.
    pub n_t: usize,
    /// Box for the high-energy part.
    pub grid: BoxGrid,
}

/// Continuum low-regular part of 𝒲_S(e); `shell_quad` discretizes the shells S_t^±.
pub fn ws_low_matrix(
    v: &Potential,
    symbol: &KineticSymbol,
    e: f64,
    quad: &SphereQuadrature,
    shell_quad: &SphereQuadrature,
    n_t: usize,
) -> Result<DMatrix<C64>> {
    if !(e >= 0.0) {
        return Err(Error::NonPositiveShift(e));
    }
    let d = symbol.dim;
    let tau = symbol.tau;
    let xi = surface_nodes(quad, symbol);
    let sw: Vec<f64> = surface_weights(quad, symbol).iter().map(|w| w.sqrt()).collect();
    let ns = quad.len();
    let nj = shell_quad.len();
    let real = v.is_real();
    let shells = shell_grid_range(symbol, n_t, e, 2.0 * tau)?;

    // F(ρ) for a single sphere of radius ρ, without the Jacobian factor
    let f_of_rho = |rho: f64| -> Result<DMatrix<C64>> {
        let mut a = DMatrix::<C64>::zeros(ns, nj);
        let mut b = DMatrix::<C64>::zeros(nj, ns);
        let mut diff = vec![0.0; d];
        for j in 0..nj {
            let eta = shell_quad.node(j);
            for i in 0..ns {
                for c in 0..d {
                    diff[c] = xi[i * d + c] - rho * eta[c];
                }
                let z = v.fourier_transform(&diff)?;
                a[(i, j)] = z * sw[i] * shell_quad.weights[j];
                if !real {
                    for c in 0..d {
                        diff[c] = -diff[c];
                    }
                    b[(j, i)] = v.fourier_transform(&diff)? * sw[i];
                } else {
                    b[(j, i)] = z.conj() * sw[i];
                }
            }
        }
        Ok(a * b)
    };
    let k0 = symbol.fermi_radius();
    let jac = |rho: f64| rho.powi(d as i32 - 1) / symbol.dp(rho).abs();
    let f0 = f_of_rho(k0)? * C64::new(2.0 * jac(k0), 0.0);
    let parts: Vec<DMatrix<C64>> = (0..shells.len())
        .into_par_iter()
        .map(|i| -> Result<DMatrix<C64>> {
            let t = shells.t_nodes[i];
            let w = shells.t_weights[i] * chi(t / tau) / (t + e);
            let ro = shells.r_outer[i];
            let ri = shells.r_inner[i];
            let ft = f_of_rho(ro)? * C64::new(jac(ro), 0.0) + f_of_rho(ri)? * C64::new(jac(ri), 0.0);
            Ok((ft - &f0) * C64::new(w, 0.0))
        })
        .collect::<Result<_>>()?;
    let mut acc = f0.clone() * C64::new(chi_tail_integral(tau, e), 0.0);
    for p in &parts {
        acc += p;
    }
    Ok(acc)
}

/// High part F_S V (1−χ(T/τ))(T+e)^{−1} V F_S* by columns on a box.
pub fn ws_high_matrix(
    v: &Potential,
    symbol: &KineticSymbol,
    e: f64,
    quad: &SphereQuadrature,
    grid: &BoxGrid,
) -> Result<DMatrix<C64>> {
    grid.check_potential(v)?;
    let space = Space::new(v, grid);
    let res = Resolvent::new(symbol, grid, ResolventModel::Lattice, space.support_radius)?;
    let n = grid.len() as f64;
    let mult: Vec<f64> = res.multiplier(e.max(0.0), Part::High).iter().map(|m| m / n).collect();
    let fft = BoxFft::new(grid.dim, grid.n);
    let d = grid.dim;
    let xi = surface_nodes(quad, symbol);
    let sw: Vec<f64> = surface_weights(quad, symbol).iter().map(|w| w.sqrt()).collect();
    let ns = quad.len();
    let hd = grid.h().powi(d as i32);
    let pts: Vec<[f64; 3]> = space.support.iter().map(|&i| grid.point(i)).collect();
    let vs: Vec<C64> = space.support.iter().map(|&i| space.vfull[i]).collect();
    let wave = |p: &[f64; 3], k: usize| {
        let ph = 2.0 * PI * (0..d).map(|a| p[a] * xi[k * d + a]).sum::<f64>();
        C64::new(ph.cos(), ph.sin())
    };
    let cols: Vec<Vec<C64>> = (0..ns)
        .into_par_iter()
        .map(|k| {
            let mut buf = vec![C64::new(0.0, 0.0); grid.len()];
            for (s, &i) in space.support.iter().enumerate() {
                buf[i] = vs[s] * wave(&pts[s], k) * sw[k];
            }
            fft.forward(&mut buf, &space.act);
            for (z, m) in buf.iter_mut().zip(&mult) {
                *z *= *m;
            }
            fft.inverse(&mut buf, &space.act);
            (0..ns)
                .map(|i| {
                    let mut acc = C64::new(0.0, 0.0);
                    for (s, &g) in space.support.iter().enumerate() {
                        acc += wave(&pts[s], i).conj() * vs[s] * buf[g];
                    }
                    acc * hd * sw[i]
                })
                .collect()
        })
        .collect();
    Ok(DMatrix::from_fn(ns, ns, |i, k| cols[k][i]))
}

/// 𝒲_S(e) = low-regular + high parts.
pub fn ws_matrix(
    v: &Potential,
    symbol: &KineticSymbol,
    e: f64,
    quad: &SphereQuadrature,
    shell_quad: &SphereQuadrature,
    opts: &WsOptions,
) -> Result<OperatorMatrix> {
    let low = ws_low_matrix(v, symbol, e, quad, shell_quad, opts.n_t)?;
    let high = ws_high_matrix(v, symbol, e, quad, &opts.grid)?;
    Ok(OperatorMatrix::detect(
        low + high,
        format!("ws e={e:e} order={} n_t={} N={} L={}", quad.order, opts.n_t, opts.grid.n, opts.grid.l),
    ))
}

/// ℬ_S(λ) = 𝒱_S + λ𝒲_S(0) in the orientation where 𝒱_S ≥ 0 for V ≥ 0; b_S(λ) = −(top eigenvalue).
pub fn bs_lambda_operator(vs: &OperatorMatrix, w0: &OperatorMatrix, lambda: f64) -> Result<OperatorMatrix> {
    if vs.size() != w0.size() {
        return Err(Error::DimensionMismatch { expected: vs.size(), got: w0.size() });
    }
    let m = &vs.matrix + &w0.matrix * C64::new(lambda, 0.0);
    Ok(OperatorMatrix::detect(m, format!("b_lambda lambda={lambda:e}")))
}
