//! Trial states on the Fermi sphere and their quadratic forms ⟨φ, 𝒱_S φ⟩ = ∫ V |(φdω)^∨|² dx.
//!
//! Cap packets follow φ(ξ) = R^{(d−1)/4} χ̂(R(ξ₁−1), R^{1/2}ξ') with χ̂ = A^d B (g∗g)(A·) built from a
//! fixed even bump g. In the cap coordinates ξ' = R^{−1/2}η' the extension factors exactly as
//! (φdω)^∨(x) = R^{−(d−1)/4} e^{2πix₁} Φ_R(x₁/R, |x'|/R^{1/2}) with
//! Φ_R(u, s) = ∫ χ̂(R(ξ₁−1), η') e^{2πi(Ru(ξ₁−1) + s e·η')} dη'/ξ₁,
//! so Φ_R is smooth on the unit scale and is tabulated once per packet.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harmonic::{sphere_area, unit_sphere_ft, KineticSymbol};
use crate::potentials::{amalgam_norm, NormOptions};
use crate::potentials::{Model, Potential};
use crate::quadrature::{build_sphere_quadrature, gauss_legendre_on, integrate, SphereQuadrature};

/// g(r) = exp(−1/(1−4r²)) on |r| < 1/2.
fn g_profile(r: f64) -> f64 {
    let t = 1.0 - 4.0 * r * r;
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Area of S^{m−1} with the convention |S^0| = 2.
fn area_low(m: usize) -> f64 {
    if m == 1 {
        2.0
    } else {
        sphere_area(m)
    }
}

/// (dω_{S^{m−1}})^∨(t), including m = 1 where it is 2cos(2πt).
fn sphere_ft_low(m: usize, t: f64) -> f64 {
    if m == 1 {
        2.0 * (2.0 * PI * t).cos()
    } else {
        unit_sphere_ft(m, t)
    }
}

/// (g∗g)(z) in ℝ^d, radial, supported in |z| ≤ 1, tabulated on a uniform grid.
#[derive(Debug, Clone)]
struct Autocorrelation {
    dz: f64,
    values: Vec<f64>,
}

const AUTOCORR_NODES: usize = 512;

impl Autocorrelation {
    fn new(d: usize) -> Self {
        let dz = 1.0 / AUTOCORR_NODES as f64;
        let values = (0..=AUTOCORR_NODES)
            .into_par_iter()
            .map(|k| {
                let z = k as f64 * dz;
                // y = (y₁, ρθ) with y₁ along z; the transverse sphere contributes |S^{d−2}|ρ^{d−2}
                let lo = (z - 0.5).max(-0.5);
                let hi = 0.5f64.min(z + 0.5);
                if hi <= lo {
                    return 0.0;
                }
                let (y1s, w1s) = gauss_legendre_on(48, lo, hi);
                let mut acc = 0.0;
                for (&y1, &w1) in y1s.iter().zip(&w1s) {
                    let r2 = (0.25 - y1 * y1).min(0.25 - (z - y1) * (z - y1));
                    if r2 <= 0.0 {
                        continue;
                    }
                    let (rs, ws) = gauss_legendre_on(48, 0.0, r2.sqrt());
                    for (&r, &w) in rs.iter().zip(&ws) {
                        let a = g_profile((y1 * y1 + r * r).sqrt());
                        let b = g_profile(((z - y1) * (z - y1) + r * r).sqrt());
                        acc += w1 * w * a * b * r.powi(d as i32 - 2);
                    }
                }
                acc * area_low(d - 1)
            })
            .collect();
        Self { dz, values }
    }

    fn eval(&self, z: f64) -> f64 {
        if z >= 1.0 {
            return 0.0;
        }
        // four-point Lagrange, reflected evenly at 0
        let x = z / self.dz;
        let i = (x.floor() as i64).clamp(0, AUTOCORR_NODES as i64 - 2);
        let s = x - i as f64;
        let f = |j: i64| self.values[j.unsigned_abs() as usize];
        let (f0, f1, f2, f3) = (f(i - 1), f(i), f(i + 1), f(i + 2));
        -s * (s - 1.0) * (s - 2.0) / 6.0 * f0 + (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0 * f1
            - (s + 1.0) * s * (s - 2.0) / 2.0 * f2
            + (s + 1.0) * s * (s - 1.0) / 6.0 * f3
    }
}

pub const KNAPP_A: f64 = 2.0;

/// Fixed profile χ̂(η) = A^d B (g∗g)(A|η|), normalised so that χ = B ĝ(·/A)² ≥ 1 on the unit ball.
#[derive(Debug, Clone)]
pub struct CapProfile {
    pub dim: usize,
    pub a: f64,
    pub b: f64,
    gg: Autocorrelation,
}

impl CapProfile {
    pub fn new(d: usize) -> Result<Self> {
        if !(2..=3).contains(&d) {
            return Err(Error::UnsupportedDimension(d));
        }
        let a = KNAPP_A;
        // ĝ is positive and radially decreasing on |ζ| ≤ 1/2 because supp g ⊂ B(0, 1/2)
        let ghat = |rho: f64| {
            integrate(|r| g_profile(r) * r.powi(d as i32 - 1) * unit_sphere_ft(d, r * rho), 0.0, 0.5, &[], 0.0, 1e-13).value
        };
        let b = 1.0 / ghat(1.0 / a).powi(2);
        static TABLES: [OnceLock<Autocorrelation>; 2] = [OnceLock::new(), OnceLock::new()];
        let gg = TABLES[d - 2].get_or_init(|| Autocorrelation::new(d)).clone();
        Ok(Self { dim: d, a, b, gg })
    }

    /// χ̂ at |η|.
    pub fn hat(&self, eta: f64) -> f64 {
        self.a.powi(self.dim as i32) * self.b * self.gg.eval(self.a * eta)
    }

    /// Radius of supp χ̂.
    pub fn support(&self) -> f64 {
        1.0 / self.a
    }
}

/// Rotation taking e₁ to `dir` (Householder reflection composed with a sign so that det = ±1 is irrelevant
/// for the even quantities computed here).
fn frame(dir: &[f64]) -> DMatrix<f64> {
    let d = dir.len();
    let mut v: Vec<f64> = dir.to_vec();
    v[0] -= 1.0;
    let nv: f64 = v.iter().map(|x| x * x).sum();
    let mut q = DMatrix::<f64>::identity(d, d);
    if nv > 1e-30 {
        for i in 0..d {
            for j in 0..d {
                q[(i, j)] -= 2.0 * v[i] * v[j] / nv;
            }
        }
    }
    q
}

#[derive(Debug, Clone)]
pub struct CapPacket {
    pub r: f64,
    pub direction: Vec<f64>,
    pub symmetrized: bool,
    pub profile: CapProfile,
    rot: DMatrix<f64>,
    rho: Vec<f64>,
    rho_w: Vec<f64>,
}

/// Φ_R tabulated on [0, u_max] × [0, s_max]; negative u uses Φ_R(−u, s) = conj Φ_R(u, s).
#[derive(Debug, Clone)]
pub struct PacketTable {
    pub du: f64,
    pub ds: f64,
    nu: usize,
    ns: usize,
    values: Vec<C64>,
}

impl PacketTable {
    fn at(&self, i: usize, j: usize) -> C64 {
        self.values[i * self.ns + j]
    }

    fn weights(x: f64, h: f64, n: usize) -> (usize, [f64; 4]) {
        let t = x / h;
        let i = (t.floor() as i64).clamp(1, n as i64 - 3) as usize;
        let s = t - i as f64;
        (
            i - 1,
            [
                -s * (s - 1.0) * (s - 2.0) / 6.0,
                (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
                -(s + 1.0) * s * (s - 2.0) / 2.0,
                (s + 1.0) * s * (s - 1.0) / 6.0,
            ],
        )
    }

    /// Bicubic Lagrange interpolation; zero outside the table.
    pub fn eval(&self, u: f64, s: f64) -> C64 {
        let au = u.abs();
        if au > (self.nu - 2) as f64 * self.du || s > (self.ns - 2) as f64 * self.ds {
            return C64::new(0.0, 0.0);
        }
        let (i0, wu) = Self::weights(au, self.du, self.nu);
        let (j0, ws) = Self::weights(s, self.ds, self.ns);
        let mut acc = C64::new(0.0, 0.0);
        for (a, wa) in wu.iter().enumerate() {
            let mut row = C64::new(0.0, 0.0);
            for (b, wb) in ws.iter().enumerate() {
                row += self.at(i0 + a, j0 + b) * *wb;
            }
            acc += row * *wa;
        }
        if u < 0.0 {
            acc.conj()
        } else {
            acc
        }
    }
}

/// Cap packet for scale R ≥ 4 in direction `direction` (normalised internally).
pub fn knapp_packet(r: f64, direction: &[f64], symmetrized: bool) -> Result<CapPacket> {
    let d = direction.len();
    if !(r >= 4.0) {
        return Err(Error::InvalidParameter(format!("R = {r} < 4")));
    }
    let profile = CapProfile::new(d)?;
    let n: f64 = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(n > 0.0) {
        return Err(Error::InvalidParameter("direction must be nonzero".into()));
    }
    let dir: Vec<f64> = direction.iter().map(|x| x / n).collect();
    let (rho, rho_w) = radial_nodes(profile.support(), 8);
    Ok(CapPacket { r, direction: dir.clone(), symmetrized, profile, rot: frame(&dir), rho, rho_w })
}

fn radial_nodes(support: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = Vec::new();
    let mut w = Vec::new();
    for p in 0..panels {
        let (a, b) = (support * p as f64 / panels as f64, support * (p + 1) as f64 / panels as f64);
        let (xs, ws) = gauss_legendre_on(24, a, b);
        x.extend(xs);
        w.extend(ws);
    }
    (x, w)
}

impl CapPacket {
    pub fn dim(&self) -> usize {
        self.direction.len()
    }

    /// φ at a unit vector ξ (the unsymmetrized packet is supported in the cap around `direction`).
    pub fn phi(&self, xi: &[f64]) -> f64 {
        let d = self.dim();
        // cap coordinates: ξ₁ along the direction
        let local: Vec<f64> = (0..d).map(|i| (0..d).map(|j| self.rot[(j, i)] * xi[j]).sum()).collect();
        let one = |x1: f64, perp2: f64| {
            if x1 <= 0.0 {
                return 0.0;
            }
            let eta1 = self.r * (x1 - 1.0);
            let etap = (self.r * perp2).sqrt();
            self.r.powf((d as f64 - 1.0) / 4.0) * self.profile.hat((eta1 * eta1 + etap * etap).sqrt())
        };
        let perp2: f64 = local[1..].iter().map(|x| x * x).sum();
        if self.symmetrized {
            0.5 * (one(local[0], perp2) + one(-local[0], perp2))
        } else {
            one(local[0], perp2)
        }
    }

    /// ξ₁ and η₁ = R(ξ₁ − 1) at transverse radius ρ = |η'|.
    fn cap_coords(&self, rho: f64) -> (f64, f64) {
        let x1 = (1.0 - rho * rho / self.r).sqrt();
        (x1, -rho * rho / (1.0 + x1))
    }

    /// Φ_R(u, s) by direct quadrature over η'.
    pub fn envelope(&self, u: f64, s: f64) -> C64 {
        let m = self.dim() - 1;
        let mut acc = C64::new(0.0, 0.0);
        for (&rho, &w) in self.rho.iter().zip(&self.rho_w) {
            let (x1, eta1) = self.cap_coords(rho);
            let amp = self.profile.hat((eta1 * eta1 + rho * rho).sqrt()) * rho.powi(m as i32 - 1) / x1;
            let ph = 2.0 * PI * u * eta1;
            acc += C64::from_polar(w * amp * sphere_ft_low(m, s * rho), ph);
        }
        acc
    }

    /// Φ_R on [0, u_max] × [0, s_max] with spacing h (plus a stencil margin).
    pub fn table(&self, u_max: f64, s_max: f64, h: f64) -> PacketTable {
        let m = self.dim() - 1;
        let nu = (u_max / h).ceil() as usize + 4;
        let ns = (s_max / h).ceil() as usize + 4;
        let nr = self.rho.len();
        // Φ(u_i, s_j) = Σ_k A[i,k] B[k,j]
        let a = DMatrix::<C64>::from_fn(nu, nr, |i, k| {
            let rho = self.rho[k];
            let (x1, eta1) = self.cap_coords(rho);
            let amp = self.profile.hat((eta1 * eta1 + rho * rho).sqrt()) * rho.powi(m as i32 - 1) / x1;
            C64::from_polar(self.rho_w[k] * amp, 2.0 * PI * i as f64 * h * eta1)
        });
        let b = DMatrix::<C64>::from_fn(nr, ns, |k, j| C64::new(sphere_ft_low(m, j as f64 * h * self.rho[k]), 0.0));
        let prod = a * b;
        let mut values = Vec::with_capacity(nu * ns);
        for i in 0..nu {
            for j in 0..ns {
                values.push(prod[(i, j)]);
            }
        }
        PacketTable { du: h, ds: h, nu, ns, values }
    }

    /// (φdω)^∨(x) (or (ψdω)^∨ for the symmetrized packet) from the envelope.
    pub fn extension(&self, x: &[f64]) -> C64 {
        let (x1, s) = self.local_coords(x);
        let pre = self.r.powf(-(self.dim() as f64 - 1.0) / 4.0);
        let f = |x1: f64| C64::from_polar(1.0, 2.0 * PI * x1) * self.envelope(x1 / self.r, s / self.r.sqrt());
        if self.symmetrized {
            (f(x1) + f(-x1)) * 0.5 * pre
        } else {
            f(x1) * pre
        }
    }

    /// (x₁, |x'|) in the packet frame.
    pub fn local_coords(&self, x: &[f64]) -> (f64, f64) {
        let d = self.dim();
        let local: Vec<f64> = (0..d).map(|i| (0..d).map(|j| self.rot[(j, i)] * x[j]).sum()).collect();
        (local[0], local[1..].iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// ‖φ‖²_{L²(S)} by quadrature in the cap coordinates.
    pub fn norm_sq(&self) -> f64 {
        let m = self.dim() - 1;
        let mut acc = 0.0;
        for (&rho, &w) in self.rho.iter().zip(&self.rho_w) {
            let (x1, eta1) = self.cap_coords(rho);
            let v = self.profile.hat((eta1 * eta1 + rho * rho).sqrt());
            acc += w * v * v * rho.powi(m as i32 - 1) / x1;
        }
        // dω = R^{−(d−1)/2} dη'/ξ₁ cancels the R^{(d−1)/2} of φ²
        let single = acc * area_low(m);
        if self.symmetrized {
            // two disjoint caps at half amplitude
            0.5 * single
        } else {
            single
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KnappForm {
    pub r: f64,
    pub m: f64,
    pub main_term: f64,
    pub tail_bound: f64,
    /// main_term − tail_bound: a lower bound for the form modulo the fitted tail constant.
    pub total: f64,
    pub tail_constant: f64,
    pub tail_order: u32,
    pub amalgam: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct KnappOptions {
    /// Decay order N of the tail model C_N M^{−N}.
    pub tail_order: u32,
    /// Gauss points per unit length along the tube axis.
    pub axial_density: usize,
    /// Gauss points per unit length across the tube.
    pub transverse_density: usize,
    /// Refuse (ScaleTooLarge) beyond this many quadrature nodes.
    pub max_nodes: usize,
    /// ‖V‖_{ℓ^{(d+1)/2}L^{d/2}} when already known; computed otherwise.
    pub amalgam: Option<f64>,
}

impl Default for KnappOptions {
    fn default() -> Self {
        Self { tail_order: 8, axial_density: 8, transverse_density: 4, max_nodes: 1 << 28, amalgam: None }
    }
}

/// Probe radii for the tail fit, in units of the tube.
const TAIL_PROBES: [f64; 3] = [2.0, 3.0, 4.0];
const TAIL_OUTER: f64 = 32.0;

/// R^{−(d−1)/2}‖1_{ℝ^d∖MT} χ_T²‖ in the cube-constant approximation of the ℓ^{(d+1)/(d−1)}L^{d/(d−2)} norm,
/// which in tube coordinates becomes (∫_{outside} |Φ_R|^{2q} du dv)^{1/q}, q = (d+1)/(d−1).
fn tail_probe(table: &PacketTable, d: usize, m: f64) -> f64 {
    let q = (d as f64 + 1.0) / (d as f64 - 1.0);
    let tm = d - 1;
    let h = table.du;
    let n = (TAIL_OUTER / h) as usize;
    let mut acc = 0.0;
    for i in 0..=n {
        let u = i as f64 * h;
        let wu = if i == 0 || i == n { 0.5 * h } else { h } * 2.0;
        for j in 0..=n {
            let s = j as f64 * h;
            if u <= m && s <= m {
                continue;
            }
            let ws = if j == 0 || j == n { 0.5 * h } else { h };
            acc += wu * ws * area_low(tm) * s.powi(tm as i32 - 1) * table.at(i, j).norm().powf(2.0 * q);
        }
    }
    acc.powf(1.0 / q)
}

/// Fitted C_N = max over probe radii of probe(M)·M^N.
pub fn fit_tail_constant(packet: &CapPacket, order: u32) -> f64 {
    let table = packet.table(TAIL_OUTER, TAIL_OUTER, 0.125);
    TAIL_PROBES.iter().map(|&m| tail_probe(&table, packet.dim(), m) * m.powi(order as i32)).fold(0.0, f64::max)
}

/// True when V depends on x' only through |x'| in the frame of `packet`.
fn transverse_radial(v: &Potential, packet: &CapPacket) -> bool {
    match v.model {
        Model::OscillatingSlab { .. } => packet.direction[0].abs() == 1.0,
        _ => v.is_radial(),
    }
}

/// ∫_{MT} V |(ψdω)^∨|² dx over the enlarged tube MT = {|x₁| ≤ MR, |x'| ≤ MR^{1/2}} in the packet frame.
pub fn tube_integral(v: &Potential, packet: &CapPacket, m: f64, opts: &KnappOptions) -> Result<(f64, usize)> {
    if v.dim != packet.dim() {
        return Err(Error::DimensionMismatch { expected: packet.dim(), got: v.dim });
    }
    let d = packet.dim();
    let r = packet.r;
    let sr = r.sqrt();
    let len = m * r;
    let rad = m * sr;
    let ax_panels = (2.0 * len).ceil() as usize;
    let tr_panels = rad.ceil() as usize;
    let radial = transverse_radial(v, packet);
    let n_angle = if radial {
        1
    } else if d == 2 {
        2
    } else {
        32
    };
    let nodes = ax_panels * opts.axial_density * tr_panels * opts.transverse_density * n_angle;
    if nodes > opts.max_nodes {
        return Err(Error::ScaleTooLarge(r));
    }
    let table = packet.table(m + 1.0, m + 1.0, 1.0 / 16.0);
    let (tx, tw): (Vec<f64>, Vec<f64>) = {
        let (mut xs, mut ws) = (Vec::new(), Vec::new());
        for p in 0..tr_panels {
            let (a, b) = (rad * p as f64 / tr_panels as f64, rad * (p + 1) as f64 / tr_panels as f64);
            let (x, w) = gauss_legendre_on(opts.transverse_density, a, b);
            xs.extend(x);
            ws.extend(w);
        }
        (xs, ws)
    };
    let tm = d - 1;
    let pre = r.powf(-(d as f64 - 1.0) / 2.0);
    let sym = packet.symmetrized;
    let rot = &packet.rot;
    let total: f64 = (0..ax_panels)
        .into_par_iter()
        .map(|p| -> Result<f64> {
            let (a, b) = (-len + 2.0 * len * p as f64 / ax_panels as f64, -len + 2.0 * len * (p + 1) as f64 / ax_panels as f64);
            let (xs, ws) = gauss_legendre_on(opts.axial_density, a, b);
            let mut acc = 0.0;
            let mut local = vec![0.0; d];
            let mut x = vec![0.0; d];
            for (&x1, &w1) in xs.iter().zip(&ws) {
                for (&s, &ws_) in tx.iter().zip(&tw) {
                    let env_p = table.eval(x1 / r, s / sr) * C64::from_polar(1.0, 2.0 * PI * x1);
                    let amp2 = if sym {
                        let env_m = table.eval(-x1 / r, s / sr) * C64::from_polar(1.0, -2.0 * PI * x1);
                        (0.5 * (env_p + env_m)).norm_sqr()
                    } else {
                        env_p.norm_sqr()
                    };
                    let mut vavg = 0.0;
                    for k in 0..n_angle {
                        local[0] = x1;
                        if tm == 1 {
                            local[1] = if k == 0 { s } else { -s };
                        } else {
                            let th = 2.0 * PI * k as f64 / n_angle as f64;
                            local[1] = s * th.cos();
                            local[2] = s * th.sin();
                        }
                        for i in 0..d {
                            x[i] = (0..d).map(|j| rot[(i, j)] * local[j]).sum();
                        }
                        vavg += v.eval(&x)?.re;
                    }
                    vavg /= n_angle as f64;
                    acc += w1 * ws_ * area_low(tm) * s.powi(tm as i32 - 1) * vavg * amp2;
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    Ok((total * pre, nodes))
}

/// Shells summed exactly before the algebraic tail of the lattice series is extrapolated.
const AMALGAM_SHELLS: usize = 24;

/// ‖V‖_{ℓ^{(d+1)/2}L^{d/2}}, the norm multiplying the tail constant.
pub fn knapp_amalgam(v: &Potential) -> Result<f64> {
    let d = v.dim as f64;
    let opts = NormOptions { max_shells: AMALGAM_SHELLS, ..NormOptions::default() };
    Ok(amalgam_norm(v, (d + 1.0) / 2.0, d / 2.0, &opts)?.value)
}

/// main_term = ∫_{MT} V|(ψdω)^∨|², tail_bound = C_N M^{−N}‖V‖_{ℓ^{(d+1)/2}L^{d/2}}, total = main − tail.
pub fn knapp_quadratic_form(v: &Potential, packet: &CapPacket, m: f64, opts: &KnappOptions) -> Result<KnappForm> {
    if !(m >= 2.0) {
        return Err(Error::InvalidParameter(format!("M = {m} < 2")));
    }
    let (main_term, nodes) = tube_integral(v, packet, m, opts)?;
    let amalgam = match opts.amalgam {
        Some(a) => a,
        None => knapp_amalgam(v)?,
    };
    let c_n = fit_tail_constant(packet, opts.tail_order);
    let tail_bound = c_n * m.powi(-(opts.tail_order as i32)) * amalgam;
    Ok(KnappForm {
        r: packet.r,
        m,
        main_term,
        tail_bound,
        total: main_term - tail_bound,
        tail_constant: c_n,
        tail_order: opts.tail_order,
        amalgam,
        nodes,
    })
}

/// ⟨1, 𝒱_S 1⟩ = ∫_0^∞ r^{d−1}|(dσ)^∨(r)|² (∫_S V(rω)dω) dr.
pub fn radial_trial_value(v: &Potential, symbol: &KineticSymbol, r_max: f64) -> Result<f64> {
    if v.dim != symbol.dim {
        return Err(Error::DimensionMismatch { expected: symbol.dim, got: v.dim });
    }
    if v.is_zero() {
        return Ok(0.0);
    }
    let d = v.dim;
    let k0 = symbol.fermi_radius();
    let mf = symbol.measure_factor(k0);
    let quad = if v.is_radial() { None } else { Some(build_sphere_quadrature(d, 32)?) };
    let avg = |r: f64| -> f64 {
        match &quad {
            None => sphere_area(d) * v.eval(&unit_point(d, r)).map(|z| z.re).unwrap_or(f64::NAN),
            Some(q) => spherical_average(v, q, r),
        }
    };
    let integrand = |r: f64| {
        let ft = k0.powi(d as i32 - 1) * mf * unit_sphere_ft(d, k0 * r);
        r.powi(d as i32 - 1) * ft * ft * avg(r)
    };
    // panels no wider than an eighth of the Bessel period 1/k₀
    let piece = |a: f64, b: f64| {
        let step = 0.125 / k0;
        let breaks: Vec<f64> = (1..((b - a) / step).ceil() as usize).map(|i| a + i as f64 * step).collect();
        let mut brs = breaks;
        brs.extend(v.radial_breakpoints().into_iter().filter(|x| *x > a && *x < b));
        brs.sort_by(f64::total_cmp);
        integrate(integrand, a, b, &brs, 1e-15, 1e-12).value
    };
    let mut total = piece(0.0, r_max);
    let mut hi = r_max;
    // tail test: doubling increments must die out
    for _ in 0..6 {
        let inc = piece(hi, 2.0 * hi);
        total += inc;
        hi *= 2.0;
        if !total.is_finite() {
            break;
        }
        if inc.abs() <= 1e-10 * total.abs().max(1e-300) {
            return Ok(total);
        }
    }
    Err(Error::Divergent(format!("radial trial integral still changing at r = {hi}")))
}

fn unit_point(d: usize, r: f64) -> Vec<f64> {
    let mut x = vec![0.0; d];
    x[0] = r;
    x
}

fn spherical_average(v: &Potential, q: &SphereQuadrature, r: f64) -> f64 {
    (0..q.len())
        .map(|j| {
            let x: Vec<f64> = q.node(j).iter().map(|c| c * r).collect();
            q.weights[j] * v.eval(&x).map(|z| z.re).unwrap_or(f64::NAN)
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapCertificate {
    pub direction: Vec<f64>,
    pub form: KnappForm,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiCapCertificate {
    pub r: f64,
    pub m: f64,
    pub k_requested: usize,
    pub k_achieved: usize,
    pub caps: Vec<CapCertificate>,
    /// Largest |⟨φ_i, φ_j⟩_{L²(S)}| over distinct pairs.
    pub max_overlap: f64,
    /// Positive-eigenvalue count of the assembled 𝒱_S when V̂ is available.
    pub vs_positive_count: Option<usize>,
}

/// Greedy placement on a spiral starting at e₁ with pairwise angular separation ≥ 3R^{−1/2};
/// `antipodal` also keeps every cap away from the reflections −c of the others.
pub fn place_caps(d: usize, r: f64, k: usize, antipodal: bool) -> Result<Vec<Vec<f64>>> {
    let sep = 3.0 / r.sqrt();
    let candidates: Vec<Vec<f64>> = if d == 2 {
        let n = ((2.0 * PI / sep).floor() as usize).max(1);
        (0..n).map(|i| {
            let th = 2.0 * PI * i as f64 / n as f64;
            vec![th.cos(), th.sin()]
        }).collect()
    } else {
        // Fibonacci spiral from the pole e₁
        let n = ((4.0 * PI / (sep * sep)).ceil() as usize).max(k * 4).max(16);
        let golden = PI * (3.0 - 5f64.sqrt());
        (0..n)
            .map(|i| {
                let z = 1.0 - 2.0 * i as f64 / (n - 1) as f64;
                let rr = (1.0 - z * z).max(0.0).sqrt();
                let th = golden * i as f64;
                vec![z, rr * th.cos(), rr * th.sin()]
            })
            .collect()
    };
    let mut placed: Vec<Vec<f64>> = Vec::new();
    for c in candidates {
        if placed.len() == k {
            break;
        }
        let ok = placed.iter().all(|p| {
            let dot: f64 = p.iter().zip(&c).map(|(a, b)| a * b).sum();
            let ang = dot.clamp(-1.0, 1.0).acos();
            ang >= sep && (!antipodal || PI - ang >= sep)
        });
        if ok {
            placed.push(c);
        }
    }
    if placed.len() < k {
        return Err(Error::PlacementFailed { placed: placed.len(), requested: k });
    }
    Ok(placed)
}

/// ⟨φ_i, φ_j⟩_{L²(S)} by quadrature over the cap(s) of φ_i (exact zero for disjoint supports).
pub fn cap_overlap(a: &CapPacket, b: &CapPacket) -> f64 {
    let d = a.dim();
    let m = d - 1;
    let n_angle = if m == 1 { 2 } else { 64 };
    let sides: &[f64] = if a.symmetrized { &[1.0, -1.0] } else { &[1.0] };
    let mut acc = 0.0;
    for (&rho, &w) in a.rho.iter().zip(&a.rho_w) {
        let (x1, _) = a.cap_coords(rho);
        let t = rho / a.r.sqrt();
        for k in 0..n_angle * sides.len() {
            let mut local = vec![0.0; d];
            local[0] = x1 * sides[k / n_angle];
            let k = k % n_angle;
            if m == 1 {
                local[1] = if k == 0 { t } else { -t };
            } else {
                let th = 2.0 * PI * k as f64 / n_angle as f64;
                local[1] = t * th.cos();
                local[2] = t * th.sin();
            }
            let xi: Vec<f64> = (0..d).map(|i| (0..d).map(|j| a.rot[(i, j)] * local[j]).sum()).collect();
            let wa = if m == 1 { 1.0 } else { 2.0 * PI / n_angle as f64 };
            acc += w * wa * rho.powi(m as i32 - 1) / x1 * a.r.powf(-(m as f64) / 2.0) * a.phi(&xi) * b.phi(&xi);
        }
    }
    acc
}

pub fn multi_cap_certificate(
    v: &Potential,
    r: f64,
    m: f64,
    k_requested: usize,
    vs_positive_count: Option<usize>,
    opts: &KnappOptions,
) -> Result<MultiCapCertificate> {
    let dirs = place_caps(v.dim, r, k_requested, true)?;
    let packets = dirs.iter().map(|dir| knapp_packet(r, dir, true)).collect::<Result<Vec<_>>>()?;
    let mut max_overlap = 0.0f64;
    for i in 0..packets.len() {
        for j in i + 1..packets.len() {
            max_overlap = max_overlap.max(cap_overlap(&packets[i], &packets[j]).abs());
        }
    }
    let mut caps = Vec::with_capacity(packets.len());
    for p in &packets {
        let form = knapp_quadratic_form(v, p, m, opts)?;
        caps.push(CapCertificate { direction: p.direction.clone(), certified: form.total > 0.0, form });
    }
    let k_achieved = caps.iter().filter(|c| c.certified).count();
    Ok(MultiCapCertificate { r, m, k_requested, k_achieved, caps, max_overlap, vs_positive_count })
}
