//! Experiment configuration: a sectioned TOML file, `--override section.key=value` edits on top,
//! then validation of every parameter window before anything runs.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use weakcoupling::birman_schwinger::{BoxGrid, ResolventModel};
use weakcoupling::{KineticSymbol, MeasureConvention, Model, Potential, Profile};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub potential: PotentialConfig,
    pub symbol: SymbolConfig,
    pub grid: GridConfig,
    pub sphere: SphereConfig,
    pub curve: CurveConfig,
    pub fit: FitConfig,
    pub knapp: KnappConfig,
    pub kernel: KernelConfig,
    pub spectral: SpectralConfig,
    pub oracle: OracleConfig,
    pub riesz: RieszConfig,
    pub seed: u64,
    pub threads: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            potential: PotentialConfig::default(),
            symbol: SymbolConfig::default(),
            grid: GridConfig::default(),
            sphere: SphereConfig::default(),
            curve: CurveConfig::default(),
            fit: FitConfig::default(),
            knapp: KnappConfig::default(),
            kernel: KernelConfig::default(),
            spectral: SpectralConfig::default(),
            oracle: OracleConfig::default(),
            riesz: RieszConfig::default(),
            seed: 0,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PotentialConfig {
    /// gaussian | ball | power_law | log_decay | slab
    pub model: String,
    pub dim: usize,
    pub amplitude: f64,
    pub amplitude_im: f64,
    pub scale: f64,
    pub width: f64,
    pub radius: f64,
    pub a: f64,
    pub b: f64,
    pub eps: f64,
}

impl Default for PotentialConfig {
    fn default() -> Self {
        Self {
            model: "gaussian".into(),
            dim: 2,
            amplitude: 1.0,
            amplitude_im: 0.0,
            scale: 1.0,
            width: 1.0,
            radius: 1.0,
            a: 1.0,
            b: 4.0,
            eps: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SymbolConfig {
    /// bcs | power
    pub profile: String,
    /// Exponent of the power profile k^s − 1.
    pub s: f64,
    pub tau: f64,
    /// lebesgue | weighted
    pub convention: String,
}

impl Default for SymbolConfig {
    fn default() -> Self {
        Self { profile: "bcs".into(), s: 2.0, tau: 0.4, convention: "lebesgue".into() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub l: f64,
    pub n: usize,
    /// lattice | continuum_low
    pub resolvent: String,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { l: 24.0, n: 256, resolvent: "lattice".into() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SphereConfig {
    pub order: usize,
    /// Gauss points per graded shell panel.
    pub n_t: usize,
    /// Sphere order used on the shells S_t^± inside 𝒲_S.
    pub shell_order: usize,
}

impl Default for SphereConfig {
    fn default() -> Self {
        Self { order: 24, n_t: 8, shell_order: 48 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CurveConfig {
    /// Strictly decreasing couplings; empty selects the automatic grid below.
    pub lambdas: Vec<f64>,
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub lambda_count: usize,
    pub indices: Vec<usize>,
    pub tol: f64,
    pub e_floor: f64,
}

impl Default for CurveConfig {
    fn default() -> Self {
        Self {
            lambdas: vec![],
            lambda_max: 0.25,
            lambda_min: 0.08,
            lambda_count: 5,
            indices: vec![1],
            tol: 1e-8,
            e_floor: weakcoupling::birman_schwinger::E_FLOOR,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitConfig {
    /// CSV written by `bs-curve` (columns e,lambda,index,value,residual).
    pub curve: String,
    /// Eigenvalue a_S^j of 𝒱_S; computed from the sphere assembly when absent.
    pub a: Option<f64>,
    pub cluster_tol: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self { curve: String::new(), a: None, cluster_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KnappConfig {
    pub radii: Vec<f64>,
    /// M = max(R^m_exponent, 2).
    pub m_exponent: f64,
    pub caps: usize,
    pub tail_order: u32,
}

impl Default for KnappConfig {
    fn default() -> Self {
        Self { radii: vec![4.0, 8.0, 16.0, 32.0, 64.0], m_exponent: 0.5, caps: 1, tail_order: 8 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelConfig {
    pub alpha: f64,
    pub rho: Vec<f64>,
    pub r_max: f64,
    pub r_count: usize,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self { alpha: 0.5, rho: vec![0.5, 0.75, 0.9, 0.99, 1.01, 1.1, 1.25, 1.5], r_max: 200.0, r_count: 400 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectralConfig {
    /// Support [a, b] of the bump h, as fractions of τ.
    pub a: f64,
    pub b: f64,
    pub beta: f64,
    /// Width of the Gaussian test function f = g.
    pub width: f64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self { a: 0.25, b: 0.5, beta: 1.0, width: 1.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub e: f64,
    pub k: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { e: 1e-2, k: 3 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RieszConfig {
    /// kappa: λ[(1−κ)BS_sing + κBS] at λ = 1/μ₁; dense: BS(e) itself.
    pub family: String,
    pub e: f64,
    pub center_re: f64,
    pub center_im: f64,
    pub radius: f64,
    pub kappas: Vec<f64>,
}

impl Default for RieszConfig {
    fn default() -> Self {
        Self {
            family: "kappa".into(),
            e: 1e-8,
            center_re: 0.965,
            center_im: 0.0,
            radius: 0.045,
            kappas: vec![0.0, 0.25, 0.5, 0.75, 1.0],
        }
    }
}

/// Reads the file (if any), applies overrides in order and validates the result.
pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<ExperimentConfig, CliError> {
    let mut doc: toml::Table = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
            text.parse().map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
        }
        None => toml::Table::new(),
    };
    for o in overrides {
        apply_override(&mut doc, o)?;
    }
    let cfg: ExperimentConfig =
        toml::Value::Table(doc).try_into().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

fn apply_override(doc: &mut toml::Table, spec: &str) -> Result<(), CliError> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{spec}` is not key=value")))?;
    // values parse as TOML where possible, otherwise as bare strings
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let mut parts: Vec<&str> = key.trim().split('.').collect();
    let last = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| CliError::Config(format!("empty key in `{spec}`")))?;
    let mut table = doc;
    for p in parts {
        table = table
            .entry(p)
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("`{p}` is not a section")))?;
    }
    table.insert(last.to_string(), value);
    Ok(())
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let cfg = |m: String| Err(CliError::Config(m));
        if !(2..=3).contains(&self.potential.dim) {
            return cfg(format!("dimension {} not in {{2, 3}}", self.potential.dim));
        }
        self.symbol()?;
        self.potential()?;
        if !self.grid.n.is_power_of_two() {
            return cfg(format!("grid.n = {} is not a power of two", self.grid.n));
        }
        if !(self.grid.l > 0.0) {
            return cfg(format!("grid.l = {} must be positive", self.grid.l));
        }
        self.resolvent_model()?;
        if self.sphere.order == 0 || self.sphere.n_t == 0 {
            return cfg("sphere.order and sphere.n_t must be positive".into());
        }
        if self.curve.indices.iter().any(|&j| j == 0) {
            return cfg("curve.indices are 1-based".into());
        }
        let l = self.lambdas();
        if l.windows(2).any(|w| !(w[1] < w[0])) || l.iter().any(|x| !(*x > 0.0)) {
            return cfg("λ-grid must be positive and strictly decreasing".into());
        }
        if !(self.curve.tol > 0.0) || !(self.curve.e_floor > 0.0) {
            return cfg("curve.tol and curve.e_floor must be positive".into());
        }
        if self.knapp.radii.iter().any(|r| !(*r >= 4.0)) {
            return cfg("knapp.radii must be ≥ 4".into());
        }
        if self.knapp.caps == 0 {
            return cfg("knapp.caps must be ≥ 1".into());
        }
        if !(0.0..=1.0).contains(&self.kernel.alpha) {
            return cfg(format!("kernel.alpha = {} outside [0,1]", self.kernel.alpha));
        }
        if !(self.spectral.a >= 0.0 && self.spectral.b > self.spectral.a) {
            return cfg("spectral bump needs 0 ≤ a < b".into());
        }
        if !(self.oracle.e > 0.0) || !(self.riesz.e > 0.0) {
            return cfg("shift e must be positive".into());
        }
        if !(self.riesz.radius > 0.0) {
            return cfg("riesz.radius must be positive".into());
        }
        if !matches!(self.riesz.family.as_str(), "kappa" | "dense") {
            return cfg(format!("unknown riesz.family `{}`", self.riesz.family));
        }
        Ok(())
    }

    pub fn symbol(&self) -> Result<KineticSymbol, CliError> {
        let profile = match self.symbol.profile.as_str() {
            "bcs" => Profile::BcsDefault,
            "power" => Profile::PowerShift(self.symbol.s),
            other => return Err(CliError::Config(format!("unknown symbol.profile `{other}`"))),
        };
        let convention = match self.symbol.convention.as_str() {
            "lebesgue" => MeasureConvention::LebesgueDOmega,
            "weighted" => MeasureConvention::WeightedDSigma,
            other => return Err(CliError::Config(format!("unknown symbol.convention `{other}`"))),
        };
        KineticSymbol::new(self.potential.dim, profile, self.symbol.tau, convention).map_err(CliError::from_config)
    }

    pub fn potential(&self) -> Result<Potential, CliError> {
        let p = &self.potential;
        let model = match p.model.as_str() {
            "gaussian" => Model::GaussianRadial { width: p.width },
            "ball" => Model::BallIndicator { radius: p.radius },
            "power_law" => Model::RadialPowerLaw { a: p.a, b: p.b },
            "log_decay" => Model::LogDecay { b: p.b },
            "slab" => Model::OscillatingSlab { eps: p.eps },
            other => return Err(CliError::Config(format!("unknown potential.model `{other}`"))),
        };
        let v = Potential::new(p.dim, Complex64::new(p.amplitude, p.amplitude_im), model).map_err(CliError::from_config)?;
        if !(p.scale > 0.0) {
            return Err(CliError::Config(format!("potential.scale = {} must be positive", p.scale)));
        }
        Ok(if p.scale == 1.0 { v } else { v.dilated(p.scale) })
    }

    pub fn grid(&self) -> Result<BoxGrid, CliError> {
        BoxGrid::new(self.potential.dim, self.grid.l, self.grid.n).map_err(CliError::from_config)
    }

    pub fn resolvent_model(&self) -> Result<ResolventModel, CliError> {
        match self.grid.resolvent.as_str() {
            "lattice" => Ok(ResolventModel::Lattice),
            "continuum_low" => Ok(ResolventModel::ContinuumLow),
            other => Err(CliError::Config(format!("unknown grid.resolvent `{other}`"))),
        }
    }

    /// Explicit λ list, or a geometric grid between lambda_max and lambda_min.
    pub fn lambdas(&self) -> Vec<f64> {
        let c = &self.curve;
        if !c.lambdas.is_empty() {
            return c.lambdas.clone();
        }
        if c.lambda_count < 2 {
            return vec![c.lambda_max];
        }
        let r = (c.lambda_min / c.lambda_max).powf(1.0 / (c.lambda_count - 1) as f64);
        (0..c.lambda_count).map(|i| c.lambda_max * r.powi(i as i32)).collect()
    }

    /// SHA-256 of the canonical JSON form of the resolved configuration, excluding the thread count.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.threads = 0;
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}
