//! Potential models, pointwise evaluation, Fourier transforms and the norms used as hypotheses.

mod geometry;
mod norms;
mod series;

pub use geometry::box_ball_volume;
pub use norms::{
    amalgam_from_local_norms, amalgam_norm, dp_norm, lp_norm, mixed_norm, mixed_norm_unchecked, mt_norm,
    norm_report, AmalgamResult, MixedNorm, NormOptions, NormReport,
};
pub use series::{sum_series, SeriesOutcome, TailKind, SERIES_FLOOR};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonic::{bessel_j_scaled, sphere_area};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Model {
    /// exp(−π|x|²/w²); w = 1 is the self-dual profile.
    GaussianRadial { width: f64 },
    BallIndicator { radius: f64 },
    /// r^{−a} on (0,1), r^{−b} on [1,∞).
    RadialPowerLaw { a: f64, b: f64 },
    /// r^{−1}(1+|log r|)^{−b}.
    LogDecay { b: f64 },
    /// cos(4πx₁)/(1+|x₁|+|x'|²)^{1+ε}.
    OscillatingSlab { eps: f64 },
    /// Samples on the nodes −L/2 + iL/(n−1), i = 0..n, per axis, first axis slowest.
    GridSampled { box_len: f64, n: usize, values: Vec<Complex64> },
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::GaussianRadial { .. } => "GaussianRadial",
            Model::BallIndicator { .. } => "BallIndicator",
            Model::RadialPowerLaw { .. } => "RadialPowerLaw",
            Model::LogDecay { .. } => "LogDecay",
            Model::OscillatingSlab { .. } => "OscillatingSlab",
            Model::GridSampled { .. } => "GridSampled",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    pub dim: usize,
    pub amplitude: Complex64,
    /// V(x) = amplitude · model(x / scale).
    pub scale: f64,
    pub model: Model,
}

impl Potential {
    pub fn new(dim: usize, amplitude: Complex64, model: Model) -> Result<Self> {
        let v = Self { dim, amplitude, scale: 1.0, model };
        v.validate()?;
        Ok(v)
    }

    pub fn gaussian(dim: usize, amplitude: f64) -> Self {
        Self::new(dim, Complex64::new(amplitude, 0.0), Model::GaussianRadial { width: 1.0 }).unwrap()
    }

    pub fn ball(dim: usize, radius: f64, amplitude: f64) -> Self {
        Self::new(dim, Complex64::new(amplitude, 0.0), Model::BallIndicator { radius }).unwrap()
    }

    pub fn oscillating_slab(dim: usize, eps: f64, amplitude: Complex64) -> Self {
        Self::new(dim, amplitude, Model::OscillatingSlab { eps }).unwrap()
    }

    pub fn zero(dim: usize) -> Self {
        Self::gaussian(dim, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::UnsupportedDimension(self.dim));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::InvalidParameter("scale must be positive".into()));
        }
        if !(self.amplitude.re.is_finite() && self.amplitude.im.is_finite()) {
            return Err(Error::InvalidParameter("amplitude must be finite".into()));
        }
        let d = self.dim as f64;
        match &self.model {
            Model::GaussianRadial { width } if !(*width > 0.0) => {
                Err(Error::InvalidParameter("Gaussian width must be positive".into()))
            }
            Model::BallIndicator { radius } if !(*radius > 0.0) => {
                Err(Error::InvalidParameter("ball radius must be positive".into()))
            }
            Model::RadialPowerLaw { a, b } if !(*a >= 0.0 && *a < d && *b > 0.0) => Err(Error::InvalidParameter(
                format!("power law needs 0 ≤ a < d and b > 0, got a={a}, b={b}"),
            )),
            Model::LogDecay { b } if !(*b > 0.0) => Err(Error::InvalidParameter("log-decay exponent must be positive".into())),
            Model::OscillatingSlab { eps } if !(*eps > 0.0) => Err(Error::InvalidParameter("slab exponent must be positive".into())),
            Model::GridSampled { box_len, n, values } => {
                if !(*box_len > 0.0) {
                    return Err(Error::InvalidParameter("grid box size must be positive".into()));
                }
                if *n < 2 || values.len() != n.pow(self.dim as u32) {
                    return Err(Error::InvalidParameter(format!(
                        "grid needs n ≥ 2 and n^d = {} values, got {}",
                        n.pow(self.dim as u32),
                        values.len()
                    )));
                }
                if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
                    return Err(Error::InvalidParameter("grid samples must be finite".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// The potential x ↦ V(x/k).
    pub fn dilated(&self, k: f64) -> Self {
        let mut v = self.clone();
        v.scale *= k;
        v
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut v = self.clone();
        v.amplitude *= c;
        v
    }

    pub fn is_radial(&self) -> bool {
        !matches!(self.model, Model::OscillatingSlab { .. } | Model::GridSampled { .. })
    }

    /// True when every value is real.
    pub fn is_real(&self) -> bool {
        match &self.model {
            Model::GridSampled { values, .. } => {
                if self.amplitude.im == 0.0 {
                    values.iter().all(|v| v.im == 0.0)
                } else {
                    values.iter().all(|v| (self.amplitude * v).im == 0.0)
                }
            }
            _ => self.amplitude.im == 0.0,
        }
    }

    /// True when every value is real and ≥ 0.
    pub fn is_nonnegative(&self) -> bool {
        if !self.is_real() {
            return false;
        }
        match &self.model {
            Model::OscillatingSlab { .. } => self.amplitude.re == 0.0,
            Model::GridSampled { values, .. } => values.iter().all(|v| (self.amplitude * v).re >= 0.0),
            _ => self.amplitude.re >= 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude == Complex64::new(0.0, 0.0)
            || matches!(&self.model, Model::GridSampled { values, .. } if values.iter().all(|v| v.norm() == 0.0))
    }

    /// Model profile at a radius (radial models only), without amplitude and in unscaled units.
    fn radial_shape(&self, r: f64) -> f64 {
        match self.model {
            Model::GaussianRadial { width } => (-PI * (r / width).powi(2)).exp(),
            Model::BallIndicator { radius } => {
                if r <= radius {
                    1.0
                } else {
                    0.0
                }
            }
            Model::RadialPowerLaw { a, b } => {
                if r < 1.0 {
                    if a == 0.0 {
                        1.0
                    } else {
                        r.powf(-a)
                    }
                } else {
                    r.powf(-b)
                }
            }
            Model::LogDecay { b } => {
                if r == 0.0 {
                    f64::INFINITY
                } else {
                    (1.0 + r.ln().abs()).powf(-b) / r
                }
            }
            _ => unreachable!("radial_shape on a non-radial model"),
        }
    }

    /// |V| as a function of the radius for radial models.
    pub fn radial_abs(&self, r: f64) -> Option<f64> {
        self.is_radial().then(|| self.amplitude.norm() * self.radial_shape(r / self.scale))
    }

    /// Signed real radial profile (real radial models only).
    pub fn radial_value(&self, r: f64) -> Option<Complex64> {
        self.is_radial().then(|| self.amplitude * self.radial_shape(r / self.scale))
    }

    /// Radii where the radial profile is discontinuous.
    pub fn radial_breakpoints(&self) -> Vec<f64> {
        match self.model {
            Model::BallIndicator { radius } => vec![radius * self.scale],
            Model::RadialPowerLaw { .. } | Model::LogDecay { .. } => vec![self.scale],
            _ => vec![],
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<Complex64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> Complex64 {
        let s = self.scale;
        match &self.model {
            Model::OscillatingSlab { eps } => {
                let x1 = x[0] / s;
                let perp: f64 = x[1..].iter().map(|v| (v / s).powi(2)).sum();
                self.amplitude * ((4.0 * PI * x1).cos() / (1.0 + x1.abs() + perp).powf(1.0 + eps))
            }
            Model::GridSampled { box_len, n, values } => {
                self.amplitude * grid_interpolate(self.dim, *box_len, *n, values, x, s)
            }
            _ => {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                self.amplitude * self.radial_shape(r / s)
            }
        }
    }

    /// |V|^{1/2}.
    pub fn sqrt_abs(&self, x: &[f64]) -> f64 {
        self.eval_unchecked(x).norm().sqrt()
    }

    /// V^{1/2} = |V|^{1/2} sgn(V), with sgn(V) = 1 where V vanishes.
    pub fn sqrt_signed(&self, x: &[f64]) -> Complex64 {
        signed_sqrt(self.eval_unchecked(x))
    }

    /// ∫ e^{−2πix·ξ} V(x) dx.
    pub fn fourier_transform(&self, xi: &[f64]) -> Result<Complex64> {
        if xi.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: xi.len() });
        }
        let d = self.dim as f64;
        let s = self.scale;
        let k = xi.iter().map(|v| v * v).sum::<f64>().sqrt() * s;
        let jac = s.powi(self.dim as i32);
        match &self.model {
            Model::GaussianRadial { width } => {
                Ok(self.amplitude * jac * width.powf(d) * (-PI * (width * k).powi(2)).exp())
            }
            Model::BallIndicator { radius } => {
                let z = 2.0 * PI * radius * k;
                Ok(self.amplitude * jac * radius.powf(d) * PI.powf(d / 2.0) * bessel_j_scaled(d / 2.0, z))
            }
            Model::GridSampled { box_len, n, values } => {
                let xs: Vec<f64> = xi.iter().map(|v| v * s).collect();
                Ok(self.amplitude * jac * grid_transform(self.dim, *box_len, *n, values, &xs))
            }
            other => Err(Error::UnsupportedModel(other.name().to_string())),
        }
    }

    /// Whether [`Potential::fourier_transform`] is available.
    pub fn has_transform(&self) -> bool {
        matches!(self.model, Model::GaussianRadial { .. } | Model::BallIndicator { .. } | Model::GridSampled { .. })
    }

    /// Radius beyond which |V| is below `rel` times its sup (None for slowly decaying models).
    pub fn effective_radius(&self, rel: f64) -> Option<f64> {
        let s = self.scale;
        match &self.model {
            Model::GaussianRadial { width } => Some(width * s * ((-rel.ln()) / PI).sqrt()),
            Model::BallIndicator { radius } => Some(radius * s),
            Model::GridSampled { box_len, .. } => Some(0.5 * box_len * s * (self.dim as f64).sqrt()),
            _ => None,
        }
    }

    /// Angular supremum H(r) = sup_{|x|=r} |V(x)|.
    pub fn angular_sup(&self, r: f64) -> f64 {
        let a = self.amplitude.norm();
        let s = self.scale;
        match &self.model {
            Model::OscillatingSlab { eps } => {
                // the envelope 1/(1+|x₁|+|x'|²) on the sphere is largest at x₁ = 0 or x₁ = ±r
                let rr = r / s;
                a * (1.0 + rr.min(rr * rr)).powf(-1.0 - eps)
            }
            Model::GridSampled { .. } => sampled_sphere_sup(self, r),
            _ => a * self.radial_shape(r / s),
        }
    }
}

pub(crate) fn signed_sqrt(v: Complex64) -> Complex64 {
    let m = v.norm();
    if m == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        v / m.sqrt()
    }
}

fn grid_interpolate(dim: usize, box_len: f64, n: usize, values: &[Complex64], x: &[f64], scale: f64) -> Complex64 {
    let h = box_len / (n as f64 - 1.0);
    let mut base = [0usize; 4];
    let mut frac = [0.0f64; 4];
    assert!(dim <= 4, "grid samples supported up to d = 4");
    for a in 0..dim {
        let u = (x[a] / scale + 0.5 * box_len) / h;
        if !(u >= 0.0 && u <= (n - 1) as f64) {
            return Complex64::new(0.0, 0.0);
        }
        let i = (u.floor() as usize).min(n - 2);
        base[a] = i;
        frac[a] = u - i as f64;
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for corner in 0..(1usize << dim) {
        let mut w = 1.0;
        let mut idx = 0;
        for a in 0..dim {
            let bit = (corner >> a) & 1;
            w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
            idx = idx * n + base[a] + bit;
        }
        if w != 0.0 {
            acc += values[idx] * w;
        }
    }
    acc
}

/// Trapezoid-rule transform of grid samples.
fn grid_transform(dim: usize, box_len: f64, n: usize, values: &[Complex64], xi: &[f64]) -> Complex64 {
    let h = box_len / (n as f64 - 1.0);
    let phases: Vec<Vec<Complex64>> = (0..dim)
        .map(|a| {
            (0..n)
                .map(|i| {
                    let x = -0.5 * box_len + i as f64 * h;
                    let w = if i == 0 || i == n - 1 { 0.5 * h } else { h };
                    Complex64::from_polar(w, -2.0 * PI * x * xi[a])
                })
                .collect()
        })
        .collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for (idx, v) in values.iter().enumerate() {
        if v.norm() == 0.0 {
            continue;
        }
        let mut rem = idx;
        let mut ph = Complex64::new(1.0, 0.0);
        for a in (0..dim).rev() {
            ph *= phases[a][rem % n];
            rem /= n;
        }
        acc += v * ph;
    }
    acc
}

fn sampled_sphere_sup(v: &Potential, r: f64) -> f64 {
    let d = v.dim;
    if r == 0.0 {
        return v.eval_unchecked(&vec![0.0; d]).norm();
    }
    let quad = crate::quadrature::build_sphere_quadrature(d.min(3), 64).expect("sphere rule");
    let mut best: f64 = 0.0;
    let mut x = vec![0.0; d];
    for i in 0..quad.len() {
        for (c, w) in x.iter_mut().zip(quad.node(i)) {
            *c = r * w;
        }
        best = best.max(v.eval_unchecked(&x).norm());
    }
    best
}

/// Surface area helper re-exported for norm code.
pub(crate) fn area(d: usize) -> f64 {
    sphere_area(d)
}
