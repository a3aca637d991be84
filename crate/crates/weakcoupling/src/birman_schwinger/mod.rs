//! The Birman–Schwinger operator BS(e) = √|V|(T+e)^{−1}V^{1/2} on a periodic box, its
//! high/low/singular/regular splitting, the second-order matrices 𝒲_S(e) and ℬ_S(λ), the
//! spectral-measure identity and the logarithmic weight integrals.
//!
//! Grid functions live on the nodes −L/2 + jL/N (first axis slowest). Fourier multipliers are
//! applied with the continuum symbol sampled on the dual lattice ℤ^d/L.
//!
//! Operator forms:
//! * V ≥ 0: the literal √V G √V restricted to supp V (Hermitian).
//! * real sign-changing V with the lattice resolvent: (T+e)^{−1/2}V(T+e)^{−1/2} on the full grid
//!   (Hermitian, isospectral away from 0).
//! * otherwise: √|V| G V^{1/2} on supp V (general, non-Hermitian Krylov).

pub mod cutoff;
pub mod fft;
pub mod low_kernel;
mod logweight;
mod spectral;
mod ws;

pub use logweight::{log_weight_integrals, LogWeightIntegrals};
pub use spectral::{spectral_measure_check, BumpFunction, SpectralMeasureCheck};
pub use ws::{bs_lambda_operator, ws_high_matrix, ws_low_matrix, ws_matrix, WsOptions};

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonic::{Branch, KineticSymbol};
use crate::krylov::{top_eigenpairs, EigenPair, KrylovOptions, KrylovStats};
use crate::potentials::Potential;
use crate::quadrature::SphereQuadrature;
use crate::vs_operator::OperatorMatrix;
use cutoff::chi;
use fft::{Activity, BoxFft};
use low_kernel::{LowKernel, DEFAULT_DR};

/// Computations below this e are refused.
pub const E_FLOOR: f64 = 1e-10;
/// Grid points with |V| below this fraction of max|V| are dropped from the support.
pub const SUPPORT_THRESHOLD: f64 = 1e-18;
pub const DENSE_ORACLE_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxGrid {
    pub dim: usize,
    /// Side length L.
    pub l: f64,
    /// Points per side, a power of two.
    pub n: usize,
}

impl BoxGrid {
    pub fn new(dim: usize, l: f64, n: usize) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidParameter(format!("box side {l} must be positive")));
        }
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("points per side {n} must be a power of two ≥ 4")));
        }
        if n as f64 * PI / l <= 3.0 {
            return Err(Error::InvalidParameter(format!("dual grid too small: Nπ/L = {}", n as f64 * PI / l)));
        }
        Ok(Self { dim, l, n })
    }

    pub fn h(&self) -> f64 {
        self.l / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coord(&self, i: usize) -> f64 {
        -0.5 * self.l + i as f64 * self.h()
    }

    /// Dual lattice coordinate of FFT index i.
    pub fn freq(&self, i: usize) -> f64 {
        let k = if i < self.n / 2 { i as f64 } else { i as f64 - self.n as f64 };
        k / self.l
    }

    pub fn index(&self, flat: usize) -> [usize; 3] {
        let n = self.n;
        match self.dim {
            2 => [flat / n, flat % n, 0],
            _ => [flat / (n * n), (flat / n) % n, flat % n],
        }
    }

    pub fn point(&self, flat: usize) -> [f64; 3] {
        let ix = self.index(flat);
        let mut p = [0.0; 3];
        for a in 0..self.dim {
            p[a] = self.coord(ix[a]);
        }
        p
    }

    /// |ξ| at every dual lattice point, in FFT order.
    pub fn frequency_norms(&self) -> Vec<f64> {
        (0..self.len())
            .into_par_iter()
            .map(|f| {
                let ix = self.index(f);
                (0..self.dim).map(|a| self.freq(ix[a]).powi(2)).sum::<f64>().sqrt()
            })
            .collect()
    }

    /// Minimum-image distance from the origin index, used for sampling convolution kernels.
    pub fn periodic_radius(&self, flat: usize) -> f64 {
        let ix = self.index(flat);
        let n = self.n;
        (0..self.dim)
            .map(|a| {
                let k = if ix[a] <= n / 2 { ix[a] as f64 } else { ix[a] as f64 - n as f64 };
                (k * self.h()).powi(2)
            })
            .sum::<f64>()
            .sqrt()
    }

    /// The box should be at least four effective radii of V wide.
    pub fn check_potential(&self, v: &Potential) -> Result<()> {
        if v.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: v.dim });
        }
        if let Some(r) = v.effective_radius(1e-8) {
            if self.l < 4.0 * r {
                return Err(Error::BoxTooSmall(format!("L = {} < 4 × effective radius {r:.3}", self.l)));
            }
        }
        Ok(())
    }

    pub fn sample(&self, v: &Potential) -> Vec<C64> {
        (0..self.len())
            .into_par_iter()
            .map(|f| v.eval_unchecked(&self.point(f)[..self.dim]))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResolventModel {
    /// χ(T/τ)(T+e)^{−1} and (1−χ)(T+e)^{−1} both as lattice multipliers.
    Lattice,
    /// High part on the lattice, low part as the continuum kernel G^low_e convolved on the grid.
    ContinuumLow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Full,
    High,
    Low,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BsForm {
    Sandwich,
    Symmetrized,
    General,
}

impl BsForm {
    pub fn hermitian(self) -> bool {
        !matches!(self, BsForm::General)
    }
}

/// Discretized potential on the grid: support, weights and transform activity.
#[derive(Debug)]
pub struct Space {
    pub grid: BoxGrid,
    pub support: Vec<usize>,
    pub act: Activity,
    /// √|V| on the support.
    pub left: Vec<C64>,
    /// V^{1/2} on the support.
    pub right: Vec<C64>,
    /// V on the full grid (used by the symmetrized form).
    pub vfull: Vec<C64>,
    pub support_radius: f64,
}

impl Space {
    pub fn new(v: &Potential, grid: &BoxGrid) -> Self {
        let vfull = grid.sample(v);
        let vmax = vfull.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let support: Vec<usize> =
            (0..grid.len()).filter(|&i| vmax > 0.0 && vfull[i].norm() > SUPPORT_THRESHOLD * vmax).collect();
        let left = support.iter().map(|&i| C64::new(vfull[i].norm().sqrt(), 0.0)).collect();
        let right = support.iter().map(|&i| crate::potentials::signed_sqrt(vfull[i])).collect();
        let support_radius = support
            .iter()
            .map(|&i| grid.point(i)[..grid.dim].iter().map(|c| c * c).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        let act = Activity::from_indices(grid.dim, grid.n, &support);
        Self { grid: *grid, support, act, left, right, vfull, support_radius }
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Support values of a full grid function.
    pub fn restrict(&self, full: &[C64]) -> Vec<C64> {
        self.support.iter().map(|&i| full[i]).collect()
    }

    pub fn extend(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.grid.len()];
        for (s, &i) in self.support.iter().enumerate() {
            out[i] = x[s];
        }
        out
    }
}

/// Builds resolvent multipliers (including the continuum low kernel when selected).
#[derive(Debug)]
pub struct Resolvent {
    pub symbol: KineticSymbol,
    pub grid: BoxGrid,
    pub model: ResolventModel,
    pub fft: Arc<BoxFft>,
    knorm: Vec<f64>,
    low: Option<LowKernel>,
}

impl Resolvent {
    /// `support_radius` bounds |x| on supp V; the continuum kernel is cut at twice that plus a margin.
    pub fn new(symbol: &KineticSymbol, grid: &BoxGrid, model: ResolventModel, support_radius: f64) -> Result<Self> {
        if symbol.dim != grid.dim {
            return Err(Error::DimensionMismatch { expected: grid.dim, got: symbol.dim });
        }
        let low = match model {
            ResolventModel::Lattice => None,
            ResolventModel::ContinuumLow => {
                if 2.0 * symbol.tau >= 1.0 {
                    return Err(Error::InvalidParameter(format!(
                        "continuum low part needs τ < 1/2, got {}",
                        symbol.tau
                    )));
                }
                // the sampled kernel carries frequencies out to the outer edge of supp χ(T/τ)
                let k_max = symbol.shell_radius(2.0 * symbol.tau, Branch::Outer)?;
                let nyquist = 0.5 / grid.h();
                if nyquist <= k_max {
                    return Err(Error::InvalidParameter(format!(
                        "grid Nyquist frequency N/(2L) = {nyquist:.3} does not resolve the low shell radius {k_max:.3}"
                    )));
                }
                let r_cut = 2.0 * support_radius + 4.0 * grid.h() + 0.25;
                if r_cut >= 0.5 * grid.l {
                    return Err(Error::BoxTooSmall(format!(
                        "low-kernel cut radius {r_cut:.3} must stay below L/2 = {}",
                        0.5 * grid.l
                    )));
                }
                Some(LowKernel::new(symbol, r_cut, DEFAULT_DR)?)
            }
        };
        Ok(Self {
            symbol: *symbol,
            grid: *grid,
            model,
            fft: Arc::new(BoxFft::new(grid.dim, grid.n)),
            knorm: grid.frequency_norms(),
            low,
        })
    }

    /// Symbol of the requested part on the dual lattice (FFT order, not normalized).
    pub fn multiplier(&self, e: f64, part: Part) -> Vec<f64> {
        let tau = self.symbol.tau;
        let lattice = |k: f64, part: Part| {
            let t = self.symbol.t(k);
            let c = chi(t / tau);
            let w = match part {
                Part::Full => 1.0,
                Part::High => 1.0 - c,
                Part::Low => c,
            };
            if w == 0.0 {
                0.0
            } else {
                w / (t + e)
            }
        };
        match (&self.low, part) {
            (None, _) | (Some(_), Part::High) => self.knorm.par_iter().map(|&k| lattice(k, part)).collect(),
            (Some(kernel), _) => {
                let ghat = self.low_transform(kernel, e);
                if part == Part::Low {
                    return ghat;
                }
                self.knorm.iter().zip(&ghat).map(|(&k, g)| lattice(k, Part::High) + g).collect()
            }
        }
    }

    fn low_transform(&self, kernel: &LowKernel, e: f64) -> Vec<f64> {
        let profile = kernel.profile(e);
        let g = &self.grid;
        let hd = g.h().powi(g.dim as i32);
        let mut buf: Vec<C64> =
            (0..g.len()).into_par_iter().map(|f| C64::new(hd * profile.eval(g.periodic_radius(f)), 0.0)).collect();
        self.fft.forward(&mut buf, &Activity::full(g.dim, g.n));
        buf.into_iter().map(|z| z.re).collect()
    }
}

/// BS(e) (or one of its parts) as a matrix-free operator on the form's working space.
#[derive(Debug, Clone)]
pub struct BsOperator {
    pub e: f64,
    pub form: BsForm,
    space: Arc<Space>,
    fft: Arc<BoxFft>,
    /// Normalized multiplier (square root of the symbol for the symmetrized form).
    mult: Arc<Vec<f64>>,
}

impl BsOperator {
    pub fn dim(&self) -> usize {
        match self.form {
            BsForm::Symmetrized => self.space.grid.len(),
            _ => self.space.len(),
        }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn is_hermitian(&self) -> bool {
        self.form.hermitian()
    }

    fn convolve(&self, buf: &mut [C64], act: &Activity) {
        self.fft.forward(buf, act);
        for (z, m) in buf.iter_mut().zip(self.mult.iter()) {
            *z *= *m;
        }
        self.fft.inverse(buf, act);
    }

    pub fn apply(&self, x: &[C64], y: &mut [C64]) {
        let sp = &self.space;
        match self.form {
            BsForm::Symmetrized => {
                let full = Activity::full(sp.grid.dim, sp.grid.n);
                y.copy_from_slice(x);
                self.convolve(y, &full);
                for (z, v) in y.iter_mut().zip(&sp.vfull) {
                    *z *= *v;
                }
                self.convolve(y, &full);
            }
            _ => {
                let mut buf = vec![C64::new(0.0, 0.0); sp.grid.len()];
                for (s, &i) in sp.support.iter().enumerate() {
                    buf[i] = sp.right[s] * x[s];
                }
                self.convolve(&mut buf, &sp.act);
                for (s, &i) in sp.support.iter().enumerate() {
                    y[s] = sp.left[s] * buf[i];
                }
            }
        }
    }

    pub fn to_matrix(&self, label: &str) -> OperatorMatrix {
        OperatorMatrix::detect(dense_from_apply(self.dim(), |x, y| self.apply(x, y)), label)
    }
}

/// Dense matrix of a linear map on ℂⁿ, one column per unit vector.
pub fn dense_from_apply(n: usize, apply: impl Fn(&[C64], &mut [C64]) + Sync) -> DMatrix<C64> {
    let cols: Vec<Vec<C64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut x = vec![C64::new(0.0, 0.0); n];
            x[j] = C64::new(1.0, 0.0);
            let mut y = vec![C64::new(0.0, 0.0); n];
            apply(&x, &mut y);
            y
        })
        .collect();
    DMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Rank-n_S singular part ln(1+τ/e)·(Σ_± 1/|p'(k₀)|)·√|V|F_S*F_S V^{1/2}, realized with
/// sphere-node plane waves.
#[derive(Debug, Clone)]
pub struct SingPart {
    pub coef: f64,
    space: Arc<Space>,
    nodes: usize,
    weights: Vec<f64>,
    /// e^{2πi x_a ξ_{j,a}} per axis: table[a][i·n_S + j].
    waves: Vec<Vec<C64>>,
}

impl SingPart {
    pub fn new(space: Arc<Space>, symbol: &KineticSymbol, quad: &SphereQuadrature, e: f64) -> Result<Self> {
        let g = space.grid;
        if quad.dim != g.dim {
            return Err(Error::DimensionMismatch { expected: g.dim, got: quad.dim });
        }
        let k0 = symbol.fermi_radius();
        let ns = quad.len();
        let waves = (0..g.dim)
            .map(|a| {
                let mut t = Vec::with_capacity(g.n * ns);
                for i in 0..g.n {
                    let x = g.coord(i);
                    for j in 0..ns {
                        let ph = 2.0 * PI * x * k0 * quad.node(j)[a];
                        t.push(C64::new(ph.cos(), ph.sin()));
                    }
                }
                t
            })
            .collect();
        let weights = quad.weights.iter().map(|w| w * k0.powi(g.dim as i32 - 1)).collect();
        let coef = (1.0 + symbol.tau / e).ln() * symbol.singular_weight();
        Ok(Self { coef, space, nodes: ns, weights, waves })
    }

    fn wave(&self, flat: usize, j: usize) -> C64 {
        let ix = self.space.grid.index(flat);
        let mut z = self.waves[0][ix[0] * self.nodes + j];
        for a in 1..self.space.grid.dim {
            z *= self.waves[a][ix[a] * self.nodes + j];
        }
        z
    }

    /// F_S V^{1/2} x at the sphere nodes.
    pub fn restrict(&self, x: &[C64]) -> Vec<C64> {
        let sp = &self.space;
        let hd = sp.grid.h().powi(sp.grid.dim as i32);
        (0..self.nodes)
            .map(|j| {
                let mut acc = C64::new(0.0, 0.0);
                for (s, &i) in sp.support.iter().enumerate() {
                    acc += self.wave(i, j).conj() * sp.right[s] * x[s];
                }
                acc * hd
            })
            .collect()
    }

    pub fn to_matrix(&self, label: &str) -> OperatorMatrix {
        OperatorMatrix::detect(dense_from_apply(self.space.len(), |x, y| self.apply(x, y)), label)
    }

    pub fn apply(&self, x: &[C64], y: &mut [C64]) {
        let c = self.restrict(x);
        let sp = &self.space;
        for (s, &i) in sp.support.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..self.nodes {
                acc += self.wave(i, j) * (self.weights[j] * c[j]);
            }
            y[s] = self.coef * sp.left[s] * acc;
        }
    }
}

fn check_e(e: f64) -> Result<()> {
    if !(e > 0.0) {
        return Err(Error::NonPositiveShift(e));
    }
    if e < E_FLOOR {
        return Err(Error::BelowFloor(e));
    }
    Ok(())
}

/// Everything that does not depend on e: sampled potential, transforms, low kernel table.
#[derive(Debug)]
pub struct BsContext {
    pub potential: Potential,
    pub symbol: KineticSymbol,
    pub space: Arc<Space>,
    pub resolvent: Resolvent,
    pub form: BsForm,
}

impl BsContext {
    pub fn new(v: &Potential, symbol: &KineticSymbol, grid: &BoxGrid, model: ResolventModel) -> Result<Self> {
        Self::with_form(v, symbol, grid, model, false)
    }

    /// `split` forces the support form so that BS = high + low holds operator-wise.
    pub fn with_form(
        v: &Potential,
        symbol: &KineticSymbol,
        grid: &BoxGrid,
        model: ResolventModel,
        split: bool,
    ) -> Result<Self> {
        v.validate()?;
        grid.check_potential(v)?;
        let space = Arc::new(Space::new(v, grid));
        let form = if v.is_nonnegative() {
            BsForm::Sandwich
        } else if v.is_real() && model == ResolventModel::Lattice && !split {
            BsForm::Symmetrized
        } else {
            BsForm::General
        };
        let resolvent = Resolvent::new(symbol, grid, model, space.support_radius)?;
        Ok(Self { potential: v.clone(), symbol: *symbol, space, resolvent, form })
    }

    pub fn operator(&self, e: f64, part: Part) -> Result<BsOperator> {
        check_e(e)?;
        let n = self.space.grid.len() as f64;
        let raw = self.resolvent.multiplier(e, part);
        let mult: Vec<f64> = match self.form {
            BsForm::Symmetrized => raw.iter().map(|m| m.max(0.0).sqrt() / n).collect(),
            _ => raw.iter().map(|m| m / n).collect(),
        };
        if self.form == BsForm::Symmetrized && part != Part::Full {
            return Err(Error::InvalidParameter("the symmetrized form has no additive splitting".into()));
        }
        Ok(BsOperator { e, form: self.form, space: self.space.clone(), fft: self.resolvent.fft.clone(), mult: Arc::new(mult) })
    }

    pub fn dim(&self) -> usize {
        match self.form {
            BsForm::Symmetrized => self.space.grid.len(),
            _ => self.space.len(),
        }
    }

    /// Top-k eigenpairs of BS(e) by Krylov iteration, residual-certified.
    pub fn eigs(&self, e: f64, k: usize, start: Option<&[C64]>, tol: f64) -> Result<(Vec<EigenPair>, KrylovStats)> {
        let op = self.operator(e, Part::Full)?;
        let mut opts = KrylovOptions::new(k, op.is_hermitian());
        opts.tol = tol;
        top_eigenpairs(op.dim(), |x, y| op.apply(x, y), start, &opts)
    }
}

/// BS(e)ψ for a full grid function ψ (the form's working space is embedded back into the grid).
pub fn bs_apply(
    v: &Potential,
    symbol: &KineticSymbol,
    e: f64,
    grid: &BoxGrid,
    model: ResolventModel,
    psi: &[C64],
) -> Result<Vec<C64>> {
    check_e(e)?;
    if psi.len() != grid.len() {
        return Err(Error::DimensionMismatch { expected: grid.len(), got: psi.len() });
    }
    let ctx = BsContext::new(v, symbol, grid, model)?;
    let op = ctx.operator(e, Part::Full)?;
    if op.form == BsForm::Symmetrized {
        let mut y = vec![C64::new(0.0, 0.0); grid.len()];
        op.apply(psi, &mut y);
        return Ok(y);
    }
    let x = ctx.space.restrict(psi);
    let mut y = vec![C64::new(0.0, 0.0); x.len()];
    op.apply(&x, &mut y);
    Ok(ctx.space.extend(&y))
}

/// The k eigenvalues of BS(e) with largest real part.
pub fn bs_eigs_iterative(
    v: &Potential,
    symbol: &KineticSymbol,
    e: f64,
    grid: &BoxGrid,
    model: ResolventModel,
    k: usize,
) -> Result<Vec<EigenPair>> {
    let ctx = BsContext::new(v, symbol, grid, model)?;
    Ok(ctx.eigs(e, k, None, 1e-10)?.0)
}

/// Dense matrix of BS(e) on its working space, for grids with at most 4096 points.
pub fn bs_dense_oracle(
    v: &Potential,
    symbol: &KineticSymbol,
    e: f64,
    grid: &BoxGrid,
    model: ResolventModel,
) -> Result<OperatorMatrix> {
    if grid.len() > DENSE_ORACLE_LIMIT {
        return Err(Error::SizeExceeded { size: grid.len(), limit: DENSE_ORACLE_LIMIT });
    }
    let ctx = BsContext::new(v, symbol, grid, model)?;
    let op = ctx.operator(e, Part::Full)?;
    Ok(op.to_matrix(&format!("bs-dense e={e:e} N={} L={}", grid.n, grid.l)))
}

/// The parts of BS(e) sharing one discretization.
#[derive(Debug, Clone)]
pub struct BsComponents {
    pub e: f64,
    pub tau: f64,
    pub full: BsOperator,
    pub high: BsOperator,
    pub low: BsOperator,
    pub sing: SingPart,
}

impl BsComponents {
    pub fn dim(&self) -> usize {
        self.full.dim()
    }

    pub fn apply_reg(&self, x: &[C64], y: &mut [C64]) {
        self.low.apply(x, y);
        let mut s = vec![C64::new(0.0, 0.0); x.len()];
        self.sing.apply(x, &mut s);
        for (a, b) in y.iter_mut().zip(&s) {
            *a -= b;
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.full.is_hermitian()
    }
}

pub fn bs_split_context(ctx: &BsContext, e: f64, quad: &SphereQuadrature) -> Result<BsComponents> {
    if ctx.form == BsForm::Symmetrized {
        return Err(Error::InvalidParameter("splitting needs a context built with split = true".into()));
    }
    Ok(BsComponents {
        e,
        tau: ctx.symbol.tau,
        full: ctx.operator(e, Part::Full)?,
        high: ctx.operator(e, Part::High)?,
        low: ctx.operator(e, Part::Low)?,
        sing: SingPart::new(ctx.space.clone(), &ctx.symbol, quad, e)?,
    })
}

pub fn bs_split(
    v: &Potential,
    symbol: &KineticSymbol,
    e: f64,
    grid: &BoxGrid,
    quad: &SphereQuadrature,
    model: ResolventModel,
) -> Result<BsComponents> {
    let ctx = BsContext::with_form(v, symbol, grid, model, true)?;
    bs_split_context(&ctx, e, quad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_image_radius() {
        let g = BoxGrid::new(2, 8.0, 16).unwrap();
        assert_eq!(g.periodic_radius(0), 0.0);
        assert!((g.periodic_radius(15) - 0.5).abs() < 1e-15);
        assert!((g.periodic_radius(16 * 15) - 0.5).abs() < 1e-15);
    }
}
