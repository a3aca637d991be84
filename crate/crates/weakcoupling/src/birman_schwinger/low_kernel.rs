//! Continuum kernel of the low-energy resolvent χ(T/τ)(T+e)^{−1}.
//!
//! G^low_e(r) = Σ_± ∫_0^{2τ} χ(t/τ)/(t+e) ρ^{d−1}(dω)^∨(ρr)/|p'(ρ)| dt with ρ = r_±(t).
//! The e-independent part is tabulated once on a graded t-grid and a uniform r-grid; each e then
//! costs a single contraction. Values between r-nodes use cubic Hermite interpolation.

use rayon::prelude::*;

use super::cutoff::chi;
use crate::error::Result;
use crate::harmonic::{unit_sphere_ft, unit_sphere_ft_deriv, KineticSymbol};
use crate::quadrature::shell_grid_range;

/// Smallest shell energy resolved by the table; the e-floor sits two decades above it.
const TABLE_T_MIN_E: f64 = 1e-12;
pub const DEFAULT_DR: f64 = 0.0025;

#[derive(Debug, Clone)]
pub struct LowKernel {
    pub dim: usize,
    pub tau: f64,
    pub r_cut: f64,
    pub dr: f64,
    t_nodes: Vec<f64>,
    nr: usize,
    values: Vec<f64>,
    derivs: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct LowProfile {
    pub dr: f64,
    pub r_cut: f64,
    g: Vec<f64>,
    dg: Vec<f64>,
}

impl LowKernel {
    pub fn new(symbol: &KineticSymbol, r_cut: f64, dr: f64) -> Result<Self> {
        let shells = shell_grid_range(symbol, 8, TABLE_T_MIN_E, 2.0 * symbol.tau)?;
        let d = symbol.dim;
        let nr = (r_cut / dr).ceil() as usize + 2;
        // per t-node weights and radii for both branches
        let per_t: Vec<[(f64, f64); 2]> = (0..shells.len())
            .map(|i| {
                let t = shells.t_nodes[i];
                let w = shells.t_weights[i] * chi(t / symbol.tau);
                let mut out = [(0.0, 0.0); 2];
                for (b, &rho) in [shells.r_outer[i], shells.r_inner[i]].iter().enumerate() {
                    out[b] = (rho, w * rho.powi(d as i32 - 1) / symbol.dp(rho).abs());
                }
                out
            })
            .collect();
        let nt = per_t.len();
        let cols: Vec<(Vec<f64>, Vec<f64>)> = (0..nr)
            .into_par_iter()
            .map(|j| {
                let r = j as f64 * dr;
                let mut v = Vec::with_capacity(nt);
                let mut dv = Vec::with_capacity(nt);
                for branches in &per_t {
                    let (mut s, mut ds) = (0.0, 0.0);
                    for &(rho, w) in branches {
                        s += w * unit_sphere_ft(d, rho * r);
                        ds += w * rho * unit_sphere_ft_deriv(d, rho * r);
                    }
                    v.push(s);
                    dv.push(ds);
                }
                (v, dv)
            })
            .collect();
        // store t-major so one e-contraction streams through memory
        let mut values = vec![0.0; nt * nr];
        let mut derivs = vec![0.0; nt * nr];
        for (j, (v, dv)) in cols.iter().enumerate() {
            for i in 0..nt {
                values[i * nr + j] = v[i];
                derivs[i * nr + j] = dv[i];
            }
        }
        Ok(Self { dim: d, tau: symbol.tau, r_cut, dr, t_nodes: shells.t_nodes, nr, values, derivs })
    }

    pub fn profile(&self, e: f64) -> LowProfile {
        let mut g = vec![0.0; self.nr];
        let mut dg = vec![0.0; self.nr];
        for (i, &t) in self.t_nodes.iter().enumerate() {
            let c = 1.0 / (t + e);
            let row = &self.values[i * self.nr..(i + 1) * self.nr];
            let drow = &self.derivs[i * self.nr..(i + 1) * self.nr];
            for j in 0..self.nr {
                g[j] += c * row[j];
                dg[j] += c * drow[j];
            }
        }
        LowProfile { dr: self.dr, r_cut: self.r_cut, g, dg }
    }
}

impl LowProfile {
    /// G^low_e(r), set to zero beyond the cut radius.
    pub fn eval(&self, r: f64) -> f64 {
        if r > self.r_cut {
            return 0.0;
        }
        let x = r / self.dr;
        let j = (x.floor() as usize).min(self.g.len() - 2);
        let s = x - j as f64;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s),
            s * (1.0 - s) * (1.0 - s),
            s * s * (3.0 - 2.0 * s),
            s * s * (s - 1.0),
        );
        h00 * self.g[j] + h10 * self.dr * self.dg[j] + h01 * self.g[j + 1] + h11 * self.dr * self.dg[j + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;

    #[test]
    fn interpolation_matches_direct_integral() {
        let s = KineticSymbol::bcs(2, 0.4).unwrap();
        let k = LowKernel::new(&s, 2.0, DEFAULT_DR).unwrap();
        let e = 1e-3;
        let p = k.profile(e);
        for &r in &[0.0, 0.3137, 1.2345, 1.99] {
            let f = |t: f64| {
                let mut acc = 0.0;
                for rho in [(1.0 + t).sqrt(), (1.0 - t).sqrt()] {
                    acc += rho * unit_sphere_ft(2, rho * r) / (2.0 * rho);
                }
                chi(t / 0.4) * acc / (t + e)
            };
            let want = integrate(f, 0.0, 0.8, &[1e-3, 1e-2, 0.4], 1e-14, 1e-13).value;
            assert!((p.eval(r) - want).abs() < 1e-9 * want.abs().max(1.0), "r={r}: {} vs {want}", p.eval(r));
        }
    }
}
