//! Bessel functions, Fourier transforms of sphere measures, and radial kinetic symbols.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Profile {
    /// p(k) = k² − 1
    BcsDefault,
    /// p(k) = k^s − 1
    PowerShift(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasureConvention {
    LebesgueDOmega,
    WeightedDSigma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Outer,
    Inner,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Outer => "outer",
            Branch::Inner => "inner",
        }
    }
}

/// Radial symbol T(ξ) = |p(|ξ|)| with Fermi radius k₀ = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KineticSymbol {
    pub dim: usize,
    pub profile: Profile,
    pub tau: f64,
    pub convention: MeasureConvention,
}

impl KineticSymbol {
    pub fn new(dim: usize, profile: Profile, tau: f64, convention: MeasureConvention) -> Result<Self> {
        if dim < 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if !(tau > 0.0 && tau < 1.0) {
            return Err(Error::InvalidParameter(format!("tau = {tau} must lie in (0,1)")));
        }
        if let Profile::PowerShift(s) = profile {
            let lo = 2.0 * dim as f64 / (dim as f64 + 1.0);
            if !(s >= lo && s < dim as f64) {
                return Err(Error::InvalidParameter(format!(
                    "exponent s = {s} outside [{lo}, {dim})"
                )));
            }
        }
        Ok(Self { dim, profile, tau, convention })
    }

    pub fn bcs(dim: usize, tau: f64) -> Result<Self> {
        Self::new(dim, Profile::BcsDefault, tau, MeasureConvention::LebesgueDOmega)
    }

    pub fn with_convention(mut self, convention: MeasureConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn fermi_radius(&self) -> f64 {
        1.0
    }

    pub fn ellipticity(&self) -> f64 {
        match self.profile {
            Profile::BcsDefault => 2.0,
            Profile::PowerShift(s) => s,
        }
    }

    pub fn p(&self, k: f64) -> f64 {
        match self.profile {
            Profile::BcsDefault => k * k - 1.0,
            Profile::PowerShift(s) => k.powf(s) - 1.0,
        }
    }

    pub fn dp(&self, k: f64) -> f64 {
        match self.profile {
            Profile::BcsDefault => 2.0 * k,
            Profile::PowerShift(s) => s * k.powf(s - 1.0),
        }
    }

    /// T at a point of modulus k.
    pub fn t(&self, k: f64) -> f64 {
        self.p(k).abs()
    }

    /// Tomas–Stein exponent κ = 2(d+1)/(d+3) and its dual.
    pub fn tomas_stein(&self) -> (f64, f64) {
        let d = self.dim as f64;
        let kappa = 2.0 * (d + 1.0) / (d + 3.0);
        (kappa, kappa / (kappa - 1.0))
    }

    /// Extra density of the surface measure relative to dω at radius ρ.
    pub fn measure_factor(&self, rho: f64) -> f64 {
        match self.convention {
            MeasureConvention::LebesgueDOmega => 1.0,
            MeasureConvention::WeightedDSigma => 1.0 / self.dp(rho).abs(),
        }
    }

    /// Σ_± 1/|p'(k₀)|: the weight of the logarithmic singularity relative to F*F with dω.
    pub fn singular_weight(&self) -> f64 {
        2.0 / self.dp(self.fermi_radius()).abs()
    }

    /// Radius of the shell {|p| = t} on the given side of k₀.
    pub fn shell_radius(&self, t: f64, branch: Branch) -> Result<f64> {
        let k0 = self.fermi_radius();
        if t == 0.0 {
            return Ok(k0);
        }
        if let Profile::BcsDefault = self.profile {
            let v = match branch {
                Branch::Outer => 1.0 + t,
                Branch::Inner => 1.0 - t,
            };
            if v <= 0.0 {
                return Err(Error::RootNotFound { level: t, branch: branch.name() });
            }
            return Ok(v.sqrt());
        }
        let target = match branch {
            Branch::Outer => t,
            Branch::Inner => -t,
        };
        // start from the design bracket and widen only when the level lies outside it
        let (mut lo, mut hi) = match branch {
            Branch::Outer => (k0, 2.0 * k0),
            Branch::Inner => (0.5 * k0, k0),
        };
        let f = |k: f64| self.p(k) - target;
        match branch {
            Branch::Outer => {
                let mut tries = 0;
                while f(hi) < 0.0 {
                    hi *= 2.0;
                    tries += 1;
                    if tries > 60 {
                        return Err(Error::RootNotFound { level: t, branch: branch.name() });
                    }
                }
            }
            Branch::Inner => {
                if f(lo) > 0.0 {
                    lo = 0.0;
                    if f(lo) > 0.0 {
                        return Err(Error::RootNotFound { level: t, branch: branch.name() });
                    }
                }
            }
        }
        safeguarded_newton(f, |k| self.dp(k), lo, hi)
            .ok_or(Error::RootNotFound { level: t, branch: branch.name() })
    }
}

fn safeguarded_newton(f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = f(x);
        if fx == 0.0 {
            return Some(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        let d = df(x);
        let mut next = x - fx / d;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-300) || hi - lo <= 4.0 * f64::EPSILON * hi.abs() {
            return Some(next);
        }
        x = next;
    }
    Some(x)
}

/// |S^{d−1}| = 2π^{d/2}/Γ(d/2).
pub fn sphere_area(d: usize) -> f64 {
    2.0 * PI.powf(d as f64 / 2.0) / gamma(d as f64 / 2.0)
}

fn check_order(nu: f64) {
    assert!(
        nu >= 0.0 && (2.0 * nu).fract() == 0.0,
        "Bessel order must be a non-negative integer or half-integer, got {nu}"
    );
}

/// J_ν(z) for integer or half-integer ν ≥ 0 and z ≥ 0.
pub fn bessel_j(nu: f64, z: f64) -> f64 {
    check_order(nu);
    assert!(z >= 0.0 && z.is_finite(), "Bessel argument must be finite and non-negative");
    if z == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    if z < 2.0 {
        return scaled_series(nu, z) * (0.5 * z).powf(nu);
    }
    if z >= ASYMPTOTIC_FROM + nu * nu {
        return hankel_asymptotic(nu, z);
    }
    if nu.fract() == 0.0 {
        miller_integer(nu as usize, z)
    } else {
        let n = (nu - 0.5) as usize;
        (2.0 * z / PI).sqrt() * miller_spherical(n, z)
    }
}

/// J_ν(z)/(z/2)^ν, regular at the origin where it equals 1/Γ(ν+1).
pub fn bessel_j_scaled(nu: f64, z: f64) -> f64 {
    check_order(nu);
    if z < 2.0 {
        scaled_series(nu, z)
    } else {
        bessel_j(nu, z) / (0.5 * z).powf(nu)
    }
}

const ASYMPTOTIC_FROM: f64 = 30.0;

fn scaled_series(nu: f64, z: f64) -> f64 {
    let q = -0.25 * z * z;
    let mut term = 1.0 / gamma(nu + 1.0);
    let mut sum = term;
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * (kf + nu));
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

fn miller_start(n: usize, z: f64) -> usize {
    let m = n.max(z as usize) + 20 + (40.0 * z).sqrt() as usize;
    m + (m & 1)
}

fn miller_integer(n: usize, z: f64) -> f64 {
    let m = miller_start(n, z);
    let mut jp = 0.0;
    let mut j = 1e-30;
    let mut sum = 0.0;
    let mut result = if m == n { j } else { 0.0 };
    for k in (1..=m).rev() {
        let jm = 2.0 * k as f64 / z * j - jp;
        jp = j;
        j = jm;
        let idx = k - 1;
        if idx > 0 && idx % 2 == 0 {
            sum += 2.0 * j;
        }
        if idx == n {
            result = j;
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp *= 1e-250;
            sum *= 1e-250;
            result *= 1e-250;
        }
    }
    sum += j;
    result / sum
}

/// Spherical Bessel j_n(z) by downward recurrence normalised against the closed forms of j₀, j₁.
fn miller_spherical(n: usize, z: f64) -> f64 {
    let m = miller_start(n + 1, z);
    let mut jp = 0.0;
    let mut j = 1e-30;
    let mut result = 0.0;
    let mut j1 = 0.0;
    for k in (1..=m).rev() {
        let jm = (2 * k + 1) as f64 / z * j - jp;
        jp = j;
        j = jm;
        let idx = k - 1;
        if idx == n {
            result = j;
        }
        if idx == 1 {
            j1 = j;
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp *= 1e-250;
            result *= 1e-250;
            j1 *= 1e-250;
        }
    }
    let (s, c) = z.sin_cos();
    let true0 = s / z;
    let true1 = s / (z * z) - c / z;
    if true0.abs() >= true1.abs() {
        result * true0 / j
    } else {
        result * true1 / j1
    }
}

fn hankel_asymptotic(nu: f64, z: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (mu - odd * odd) / (kf * 8.0 * z);
        if term == 0.0 {
            break;
        }
        if term.abs() > last {
            break;
        }
        last = term.abs();
        // a_k/z^k alternates between Q (odd k) and P (even k) with signs (−1)^{⌊k/2⌋}
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += sign * term;
        } else {
            p += sign * term;
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let phase = (0.5 * nu + 0.25) * PI;
    let (sz, cz) = z.sin_cos();
    let (sp, cp) = phase.sin_cos();
    let cos_chi = cz * cp + sz * sp;
    let sin_chi = sz * cp - cz * sp;
    (2.0 / (PI * z)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// (dω)^∨ of the unit sphere in ℝ^d at |x| = r: 2π r^{−(d−2)/2} J_{(d−2)/2}(2πr).
pub fn unit_sphere_ft(d: usize, r: f64) -> f64 {
    let nu = (d as f64 - 2.0) / 2.0;
    2.0 * PI * PI.powf(nu) * bessel_j_scaled(nu, 2.0 * PI * r)
}

/// Radial derivative of [`unit_sphere_ft`].
pub fn unit_sphere_ft_deriv(d: usize, r: f64) -> f64 {
    let nu = (d as f64 - 2.0) / 2.0;
    -(2.0 * PI).powi(2) * r * PI.powf(nu + 1.0) * bessel_j_scaled(nu + 1.0, 2.0 * PI * r)
}

/// (dω_{ρS})^∨ at radius r, through the scaling law ρ^{d−1}(dω_S)^∨(ρr), times the
/// convention's density 1/|p'(ρ)| when the weighted measure is selected.
pub fn surface_measure_ft(symbol: &KineticSymbol, rho: f64, r: f64) -> f64 {
    rho.powi(symbol.dim as i32 - 1) * unit_sphere_ft(symbol.dim, rho * r) * symbol.measure_factor(rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelSample {
    pub rho: f64,
    pub r: f64,
    pub difference: f64,
    pub envelope: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelBoundReport {
    pub alpha: f64,
    pub max_ratio: f64,
    pub witness: Option<KernelSample>,
    pub samples: Vec<KernelSample>,
}

impl KernelBoundReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("rho,r,difference,envelope,ratio\n");
        for k in &self.samples {
            s.push_str(&format!("{:e},{:e},{:e},{:e},{:e}\n", k.rho, k.r, k.difference, k.envelope, k.ratio));
        }
        s
    }
}

/// Sampled supremum of |(dω_{ρS})^∨(r) − (dω_S)^∨(r)| / (|ρ−1|^α (1+r)^{α−(d−1)/2}).
pub fn kernel_difference_bound(
    symbol: &KineticSymbol,
    alpha: f64,
    rho_samples: &[f64],
    r_samples: &[f64],
) -> Result<KernelBoundReport> {
    if !(alpha >= 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} outside [0,1]")));
    }
    let d = symbol.dim as f64;
    let mut samples = Vec::with_capacity(rho_samples.len() * r_samples.len());
    for &rho in rho_samples {
        for &r in r_samples {
            let difference = (surface_measure_ft(symbol, rho, r) - surface_measure_ft(symbol, 1.0, r)).abs();
            let envelope = (rho - 1.0).abs().powf(alpha) * (1.0 + r).powf(alpha - (d - 1.0) / 2.0);
            let ratio = if difference == 0.0 { 0.0 } else { difference / envelope };
            samples.push(KernelSample { rho, r, difference, envelope, ratio });
        }
    }
    let witness = samples
        .iter()
        .copied()
        .fold(None, |best: Option<KernelSample>, s| match best {
            Some(b) if b.ratio >= s.ratio => Some(b),
            _ => Some(s),
        });
    let max_ratio = witness.map_or(0.0, |w| w.ratio);
    Ok(KernelBoundReport { alpha, max_ratio, witness, samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_regimes_agree_at_switch_points() {
        for &nu in &[0.0, 0.5, 1.0, 1.5, 2.0, 2.5] {
            let a = scaled_series(nu, 2.0);
            let b = if nu.fract() == 0.0 {
                miller_integer(nu as usize, 2.0)
            } else {
                (4.0 / PI).sqrt() * miller_spherical((nu - 0.5) as usize, 2.0)
            };
            assert!((a - b / 1f64.powf(nu)).abs() < 1e-14, "nu={nu}: {a} vs {b}");
            let z = ASYMPTOTIC_FROM + nu * nu;
            let m = if nu.fract() == 0.0 {
                miller_integer(nu as usize, z)
            } else {
                (2.0 * z / PI).sqrt() * miller_spherical((nu - 0.5) as usize, z)
            };
            let h = hankel_asymptotic(nu, z);
            assert!((m - h).abs() < 1e-13, "nu={nu}: {m} vs {h}");
        }
    }

    #[test]
    fn shell_radius_power_shift_hits_level() {
        let s = KineticSymbol::new(2, Profile::PowerShift(1.5), 0.5, MeasureConvention::LebesgueDOmega).unwrap();
        for &t in &[1e-9, 0.1, 0.4, 0.9] {
            for b in [Branch::Outer, Branch::Inner] {
                let r = s.shell_radius(t, b).unwrap();
                assert!((s.t(r) - t).abs() <= 1e-12, "t={t} r={r}");
            }
        }
    }
}
