//! The Fermi-surface operator 𝒱_S = F_S V F_S* discretized on a sphere quadrature, its spectrum,
//! the Funk–Hecke reduction for radial potentials and the mollified-limit check.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dense::{general_eig, hermitian_eig, max_hermitian_defect, operator_norm, schatten, singular_values};
use crate::error::{Error, Result};
use crate::harmonic::{sphere_area, KineticSymbol};
use crate::potentials::Potential;
use crate::quadrature::{gegenbauer_rule, SphereQuadrature};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    Hermitian,
    General,
}

#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub matrix: DMatrix<C64>,
    pub symmetry: Symmetry,
    pub label: String,
}

impl OperatorMatrix {
    pub fn new(matrix: DMatrix<C64>, symmetry: Symmetry, label: impl Into<String>) -> Self {
        Self { matrix, symmetry, label: label.into() }
    }

    /// Tags the matrix hermitian when it is so to 1e−10 relative.
    pub fn detect(matrix: DMatrix<C64>, label: impl Into<String>) -> Self {
        let scale = matrix.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let symmetry =
            if max_hermitian_defect(&matrix) <= 1e-10 * scale.max(1e-300) { Symmetry::Hermitian } else { Symmetry::General };
        Self::new(matrix, symmetry, label)
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_hermitian(&self) -> bool {
        self.symmetry == Symmetry::Hermitian
    }

    /// Rows `i,j,re,im`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("i,j,re,im\n");
        for i in 0..self.size() {
            for j in 0..self.size() {
                let z = self.matrix[(i, j)];
                s.push_str(&format!("{i},{j},{:e},{:e}\n", z.re, z.im));
            }
        }
        s
    }

    pub fn apply(&self, x: &[C64], y: &mut [C64]) {
        let n = self.size();
        for (i, yi) in y.iter_mut().enumerate().take(n) {
            let mut acc = C64::new(0.0, 0.0);
            for (j, xj) in x.iter().enumerate() {
                acc += self.matrix[(i, j)] * xj;
            }
            *yi = acc;
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralResult {
    /// All eigenvalues, descending by real part.
    pub eigenvalues: Vec<C64>,
    /// Eigenvectors for the first `k` eigenvalues.
    #[serde(skip)]
    pub eigenvectors: Option<DMatrix<C64>>,
    pub singular_values: Vec<f64>,
    /// Schatten norms keyed by exponent ("1", "2", "3", "4", "inf").
    pub schatten: BTreeMap<String, f64>,
}

impl SpectralResult {
    pub fn real_parts(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.re).collect()
    }

    pub fn positive_count(&self, rel_tol: f64) -> usize {
        let rad = self.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
        self.eigenvalues.iter().filter(|z| z.re > rel_tol * rad).count()
    }

    /// Rows `index,re,im`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("index,re,im\n");
        for (i, z) in self.eigenvalues.iter().enumerate() {
            s.push_str(&format!("{i},{:e},{:e}\n", z.re, z.im));
        }
        s
    }
}

pub const SCHATTEN_EXPONENTS: [f64; 5] = [1.0, 2.0, 3.0, 4.0, f64::INFINITY];

fn schatten_map(sv: &[f64]) -> BTreeMap<String, f64> {
    SCHATTEN_EXPONENTS
        .iter()
        .map(|&p| (if p.is_infinite() { "inf".to_string() } else { format!("{p}") }, schatten(sv, p)))
        .collect()
}

/// Quadrature weights on the Fermi sphere {|ξ| = k₀} under the symbol's measure convention.
pub fn surface_weights(quad: &SphereQuadrature, symbol: &KineticSymbol) -> Vec<f64> {
    let k0 = symbol.fermi_radius();
    let f = k0.powi(quad.dim as i32 - 1) * symbol.measure_factor(k0);
    quad.weights.iter().map(|w| w * f).collect()
}

/// Nodes k₀ω_i of the Fermi sphere.
pub fn surface_nodes(quad: &SphereQuadrature, symbol: &KineticSymbol) -> Vec<f64> {
    let k0 = symbol.fermi_radius();
    quad.nodes.iter().map(|x| x * k0).collect()
}

/// Dense matrix √w_i g(ξ_i − ξ_j) √w_j for a transform `g`.
fn kernel_matrix(
    dim: usize,
    nodes: &[f64],
    weights: &[f64],
    hermitian: bool,
    g: &(dyn Fn(&[f64]) -> Result<C64> + Sync),
) -> Result<DMatrix<C64>> {
    let n = weights.len();
    let sw: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let rows: Vec<Vec<C64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = &nodes[i * dim..(i + 1) * dim];
            let start = if hermitian { i } else { 0 };
            let mut row = vec![C64::new(0.0, 0.0); n];
            let mut diff = vec![0.0; dim];
            for j in start..n {
                let xj = &nodes[j * dim..(j + 1) * dim];
                for c in 0..dim {
                    diff[c] = xi[c] - xj[c];
                }
                row[j] = sw[i] * g(&diff)? * sw[j];
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut m = DMatrix::<C64>::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for j in 0..n {
            if hermitian && j < i {
                m[(i, j)] = rows[j][i].conj();
            } else {
                m[(i, j)] = row[j];
            }
        }
    }
    if hermitian {
        for i in 0..n {
            m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        }
    }
    Ok(m)
}

/// M[i,j] = √w_i V̂(ξ_i − ξ_j) √w_j on the Fermi sphere.
pub fn assemble_vs(v: &Potential, quad: &SphereQuadrature, symbol: &KineticSymbol) -> Result<OperatorMatrix> {
    assemble_vs_with(v, quad, symbol, |_| 1.0, "vs")
}

fn assemble_vs_with(
    v: &Potential,
    quad: &SphereQuadrature,
    symbol: &KineticSymbol,
    multiplier: impl Fn(f64) -> f64 + Sync,
    tag: &str,
) -> Result<OperatorMatrix> {
    check_dims(v, quad, symbol)?;
    if !v.has_transform() {
        return Err(Error::UnsupportedModel(v.model.name().to_string()));
    }
    let hermitian = v.is_real();
    let nodes = surface_nodes(quad, symbol);
    let w = surface_weights(quad, symbol);
    let g = |x: &[f64]| -> Result<C64> {
        let k = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        Ok(v.fourier_transform(x)? * multiplier(k))
    };
    let m = kernel_matrix(quad.dim, &nodes, &w, hermitian, &g)?;
    let symmetry = if hermitian { Symmetry::Hermitian } else { Symmetry::General };
    let label = format!("{tag} model={} d={} order={} n={}", v.model.name(), quad.dim, quad.order, quad.len());
    Ok(OperatorMatrix::new(m, symmetry, label))
}

fn check_dims(v: &Potential, quad: &SphereQuadrature, symbol: &KineticSymbol) -> Result<()> {
    if v.dim != quad.dim {
        return Err(Error::DimensionMismatch { expected: v.dim, got: quad.dim });
    }
    if symbol.dim != quad.dim {
        return Err(Error::DimensionMismatch { expected: symbol.dim, got: quad.dim });
    }
    Ok(())
}

/// Full spectrum plus Schatten norms; eigenvectors are kept for the first `k` eigenvalues.
pub fn vs_spectrum(m: &OperatorMatrix, k: usize) -> Result<SpectralResult> {
    let n = m.size();
    if k > n {
        return Err(Error::InvalidParameter(format!("requested {k} eigenvectors of an {n}×{n} matrix")));
    }
    let (eigenvalues, vecs, sv) = if m.is_hermitian() {
        let (vals, vecs) = hermitian_eig(&m.matrix)?;
        let mut sv: Vec<f64> = vals.iter().map(|x| x.abs()).collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        (vals.into_iter().map(|x| C64::new(x, 0.0)).collect::<Vec<_>>(), vecs, sv)
    } else {
        let (vals, vecs) = general_eig(&m.matrix)?;
        (vals, vecs, singular_values(&m.matrix)?)
    };
    let eigenvectors = (k > 0).then(|| vecs.columns(0, k).into_owned());
    Ok(SpectralResult { eigenvalues, eigenvectors, schatten: schatten_map(&sv), singular_values: sv })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunkHeckeMode {
    pub l: usize,
    pub a: f64,
    pub multiplicity: usize,
}

/// Dimension of the space of degree-ℓ spherical harmonics on S^{d−1}.
pub fn harmonic_multiplicity(d: usize, l: usize) -> usize {
    if d == 2 {
        return if l == 0 { 1 } else { 2 };
    }
    // (2ℓ+d−2)/(ℓ+d−2) · C(ℓ+d−2, ℓ)
    let mut binom = 1u128;
    for i in 1..=l as u128 {
        binom = binom * (i + d as u128 - 2) / i;
    }
    ((2 * l + d - 2) as u128 * binom / (l + d - 2) as u128) as usize
}

/// C_ℓ(t)/C_ℓ(1) for ℓ = 0..=l_max: Legendre for d=3, Chebyshev for d=2, Gegenbauer otherwise.
pub fn normalized_gegenbauer(d: usize, l_max: usize, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(l_max + 1);
    if d == 2 {
        let th = t.clamp(-1.0, 1.0).acos();
        for l in 0..=l_max {
            out.push((l as f64 * th).cos());
        }
        return out;
    }
    let lam = (d as f64 - 2.0) / 2.0;
    let (mut c0, mut c1) = (1.0, 2.0 * lam * t);
    let (mut u0, mut u1) = (1.0, 2.0 * lam);
    out.push(1.0);
    if l_max >= 1 {
        out.push(c1 / u1);
    }
    for n in 1..l_max {
        let nf = n as f64;
        let c2 = (2.0 * t * (nf + lam) * c1 - (nf + 2.0 * lam - 1.0) * c0) / (nf + 1.0);
        let u2 = (2.0 * (nf + lam) * u1 - (nf + 2.0 * lam - 1.0) * u0) / (nf + 1.0);
        out.push(c2 / u2);
        c0 = c1;
        c1 = c2;
        u0 = u1;
        u1 = u2;
    }
    out
}

/// Eigenvalues a_ℓ of 𝒱_S for radial V by Funk–Hecke reduction, with multiplicities.
pub fn funk_hecke_spectrum(v: &Potential, symbol: &KineticSymbol, l_max: usize) -> Result<Vec<FunkHeckeMode>> {
    funk_hecke_with(v, symbol, l_max, (2 * l_max + 80).max(120))
}

pub fn funk_hecke_with(v: &Potential, symbol: &KineticSymbol, l_max: usize, n_nodes: usize) -> Result<Vec<FunkHeckeMode>> {
    if !v.is_radial() {
        return Err(Error::NotRadial);
    }
    if !v.has_transform() {
        return Err(Error::UnsupportedModel(v.model.name().to_string()));
    }
    let d = symbol.dim;
    if v.dim != d {
        return Err(Error::DimensionMismatch { expected: d, got: v.dim });
    }
    let k0 = symbol.fermi_radius();
    let (ts, ws) = gegenbauer_rule(d, n_nodes)?;
    let lower_sphere = if d == 2 { 2.0 } else { sphere_area(d - 1) };
    let prefactor = lower_sphere * k0.powi(d as i32 - 1) * symbol.measure_factor(k0);
    let mut sums = vec![0.0; l_max + 1];
    let mut xi = vec![0.0; d];
    for (&t, &w) in ts.iter().zip(&ws) {
        xi[0] = k0 * (2.0 - 2.0 * t).max(0.0).sqrt();
        let f = v.fourier_transform(&xi)?;
        if f.im != 0.0 {
            return Err(Error::InvalidParameter("Funk–Hecke reduction needs a real transform".into()));
        }
        for (l, c) in normalized_gegenbauer(d, l_max, t).into_iter().enumerate() {
            sums[l] += w * f.re * c;
        }
    }
    Ok(sums
        .into_iter()
        .enumerate()
        .map(|(l, s)| FunkHeckeMode { l, a: prefactor * s, multiplicity: harmonic_multiplicity(d, l) })
        .collect())
}

/// Expands Funk–Hecke modes into a descending eigenvalue multiset.
pub fn expand_modes(modes: &[FunkHeckeMode]) -> Vec<f64> {
    let mut v: Vec<f64> = modes.iter().flat_map(|m| std::iter::repeat(m.a).take(m.multiplicity)).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Mollifier families φ with φ̂(0) = 1, dilated to width 2^{−n}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mollifier {
    /// φ̂(ξ) = exp(−π|ξ|²).
    Gaussian,
    /// Poisson kernel, φ̂(ξ) = exp(−2π|ξ|).
    Poisson,
}

impl Mollifier {
    pub fn symbol(self, k: f64, n: u32) -> f64 {
        let s = k / 2f64.powi(n as i32);
        match self {
            Mollifier::Gaussian => (-PI * s * s).exp(),
            Mollifier::Poisson => (-2.0 * PI * s).exp(),
        }
    }
}

/// ‖𝒱_S^{(n)} − 𝒱_S‖ for n = 1..=n_steps, where 𝒱_S^{(n)} is assembled from V * φ_{2^{−n}}.
pub fn mollified_limit_check(
    v: &Potential,
    quad: &SphereQuadrature,
    symbol: &KineticSymbol,
    n_steps: u32,
    family: Mollifier,
) -> Result<Vec<f64>> {
    let base = assemble_vs(v, quad, symbol)?;
    (1..=n_steps)
        .map(|n| {
            let m = assemble_vs_with(v, quad, symbol, |k| family.symbol(k, n), "vs-mollified")?;
            operator_norm(&(&m.matrix - &base.matrix))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::build_sphere_quadrature;

    #[test]
    fn multiplicities() {
        assert_eq!(harmonic_multiplicity(3, 4), 9);
        assert_eq!(harmonic_multiplicity(2, 3), 2);
        assert_eq!(harmonic_multiplicity(4, 2), 9);
    }

    #[test]
    fn legendre_values() {
        let p = normalized_gegenbauer(3, 3, 0.3);
        assert!((p[2] - 0.5 * (3.0 * 0.09 - 1.0)).abs() < 1e-15);
        assert!((p[3] - 0.5 * (5.0 * 0.027 - 0.9)).abs() < 1e-15);
    }

    #[test]
    fn circle_gaussian_matches_bessel_i() {
        // d=2: a_ℓ = 2π e^{−2π} I_ℓ(2π) for the self-dual Gaussian
        let v = Potential::gaussian(2, 1.0);
        let s = KineticSymbol::bcs(2, 0.4).unwrap();
        let modes = funk_hecke_spectrum(&v, &s, 2).unwrap();
        let q = build_sphere_quadrature(2, 32).unwrap();
        let m = assemble_vs(&v, &q, &s).unwrap();
        let spec = vs_spectrum(&m, 0).unwrap();
        assert!((spec.eigenvalues[0].re - modes[0].a).abs() < 1e-12);
    }
}
