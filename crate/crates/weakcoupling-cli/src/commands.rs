use std::path::Path;
use std::time::Instant;

use num_complex::Complex64 as C64;
use serde::Serialize;
use serde_json::json;
use weakcoupling::asymptotics::{
    b_samples, first_order_fit, riesz_count, second_order_residual, sweep, CurveSample, EigenCurve, RieszSample,
    SolveOptions,
};
use weakcoupling::birman_schwinger::{
    bs_dense_oracle, bs_eigs_iterative, bs_split, spectral_measure_check, ws_matrix, BsContext, BumpFunction,
    WsOptions,
};
use weakcoupling::dense::{general_eigenvalues, hermitian_eig, max_hermitian_defect};
use weakcoupling::harmonic::kernel_difference_bound;
use weakcoupling::potentials::{norm_report, NormOptions};
use weakcoupling::quadrature::build_sphere_quadrature;
use weakcoupling::trial_functions::{
    knapp_amalgam, knapp_packet, knapp_quadratic_form, multi_cap_certificate, KnappForm, KnappOptions,
};
use weakcoupling::vs_operator::{assemble_vs, funk_hecke_spectrum, vs_spectrum, OperatorMatrix};
use weakcoupling::KineticSymbol;

use crate::config::ExperimentConfig;
use crate::output::{write_manifest, Artifacts};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Norms,
    VsSpectrum,
    BsCurve,
    Fit,
    SecondOrder,
    Knapp,
    KernelBounds,
    SpectralMeasureCheck,
    OracleCompare,
    RieszCount,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Norms => "norms",
            Command::VsSpectrum => "vs-spectrum",
            Command::BsCurve => "bs-curve",
            Command::Fit => "fit",
            Command::SecondOrder => "second-order",
            Command::Knapp => "knapp",
            Command::KernelBounds => "kernel-bounds",
            Command::SpectralMeasureCheck => "spectral-measure-check",
            Command::OracleCompare => "oracle-compare",
            Command::RieszCount => "riesz-count",
        }
    }
}

/// Runs one command, writing its artifacts and the manifest into `out`.
/// On failure a diagnostic `error.json` is written next to the manifest.
pub fn run(command: Command, cfg: &ExperimentConfig, out: &Path) -> Result<Vec<String>, CliError> {
    let start = Instant::now();
    let hash = cfg.hash();
    let mut art = Artifacts::new(out, &hash)?;
    let result = dispatch(command, cfg, &mut art);
    let status = match &result {
        Ok(()) => "ok".to_string(),
        Err(e) => {
            art.json("error.json", &json!({ "kind": e.kind(), "exit_code": e.exit_code(), "message": e.to_string() }))?;
            e.kind().to_string()
        }
    };
    let manifest = json!({
        "command": command.name(),
        "status": status,
        "config": cfg,
        "config_hash": hash,
        "versions": {
            "weakcoupling": env!("CARGO_PKG_VERSION"),
            "rustc_target": std::env::consts::ARCH,
        },
        "threads": rayon::current_num_threads(),
        "wall_time_s": start.elapsed().as_secs_f64(),
        "artifacts": art.names(),
    });
    write_manifest(art.dir(), &manifest)?;
    result.map(|_| art.names().to_vec())
}

fn dispatch(command: Command, cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<(), CliError> {
    match command {
        Command::Norms => norms(cfg, art),
        Command::VsSpectrum => vs(cfg, art),
        Command::BsCurve => bs_curve(cfg, art),
        Command::Fit => fit(cfg, art),
        Command::SecondOrder => second_order(cfg, art),
        Command::Knapp => knapp(cfg, art),
        Command::KernelBounds => kernel_bounds(cfg, art),
        Command::SpectralMeasureCheck => spectral(cfg, art),
        Command::OracleCompare => oracle(cfg, art),
        Command::RieszCount => riesz(cfg, art),
    }
}

fn norms(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<(), CliError> {
    let report = norm_report(&cfg.potential()?, &NormOptions::default())?;
    art.json("norms.json", &report)
}

fn assembled_vs(cfg: &ExperimentConfig, symbol: &KineticSymbol) -> Result<OperatorMatrix, CliError> {
    let quad = build_sphere_quadrature(symbol.dim, cfg.sphere.order)?;
    Ok(assemble_vs(&cfg.potential()?, &quad, symbol)?)
}

fn vs(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<(), CliError> {
    let symbol = cfg.symbol()?;
    let v = cfg.potential()?;
    let m = assembled_vs(cfg, &symbol)?;
    let spec = vs_spectrum(&m, 0)?;
    let modes = if v.is_radial() { Some(funk_hecke_spectrum(&v, &symbol, 6)?) } else { None };
    art.csv("vs_spectrum.csv", &spec.to_csv())?;
    art.json(
        "vs_spectrum.json",
        &json!({
            "size": m.size(),
            "hermitian": m.is_hermitian(),
            "top": spec.eigenvalues.iter().take(16).map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "positive_count": spec.positive_count(1e-10),
            "schatten": spec.schatten,
            "funk_hecke": modes,
        }),
    )
}

fn solve_options(cfg: &ExperimentConfig) -> SolveOptions {
    SolveOptions { tol: cfg.curve.tol, e_floor: cfg.curve.e_floor, ..SolveOptions::default() }
}

fn curves(cfg: &ExperimentConfig) -> Result<(BsContext, Vec<EigenCurve>), CliError> {
    let symbol = cfg.symbol()?;
    let grid = cfg.grid()?;
    let ctx = BsContext::new(&cfg.potential()?, &symbol, &grid, cfg.resolvent_model()?)?;
    let c = sweep(&ctx, &cfg.lambdas(), &cfg.curve.indices, &solve_options(cfg))?;
    Ok((ctx, c))
}

fn write_curves(art: &mut Artifacts, curves: &[EigenCurve]) -> Result<(), CliError> {
    for c in curves {
        art.csv(&format!("curve_j{}.csv", c.j), &c.to_csv())?;
    }
    art.json("curve.json", &curves)
}

fn bs_curve(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<(), CliError> {
    let (_, c) = curves(cfg)?;
    write_curves(art, &c)?;
    if c.iter().all(|c| c.points().is_empty()) {
        let first = c.iter().flat_map(|c| &c.samples).find_map(|s| s.error.clone()).unwrap_or_default();
        return Err(CliError::Numerical(weakcoupling::Error::NoBoundState(format!("no λ solved: {first}"))));
    }
    Ok(())
}

/// Reads a curve CSV produced by `bs-curve` (comment lines are skipped).
pub fn read_curve(path: &Path, j: usize, symbol: &KineticSymbol) -> Result<EigenCurve, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read curve {}: {e}", path.display())))?;
    let mut rows = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let header = rows.next().unwrap_or("");
    if header.trim() != "e,lambda,index,value,residual" {
        return Err(CliError::Config(format!("{}: unexpected curve header `{header}`", path.display())));
    }
    let mut samples = Vec::new();
    for row in rows {
        let f: Vec<&str> = row.split(',').collect();
        let num = |i: usize| -> Result<f64, CliError> {
            f.get(i)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| CliError::Config(format!("malformed curve row `{row}`")))
        };
        if num(2)? as usize != j {
            continue;
        }
        samples.push(CurveSample { lambda: num(1)?, e: num(0)?, diagnostics: None, error: None });
    }
    let c = EigenCurve { j, convention: symbol.convention, samples };
    if c.points().is_empty() {
        return Err(CliError::Config(format!("curve {} has no solved samples for index {j}", path.display())));
    }
    Ok(c)
}

fn vs_eigenvalue(cfg: &ExperimentConfig, symbol: &KineticSymbol, j: usize) -> Result<f64, CliError> {
    if let Some(a) = cfg.fit.a {
        return Ok(a);
    }
    let spec = vs_spectrum(&assembled_vs(cfg, symbol)?, 0)?;
    spec.eigenvalues
        .get(j - 1)
        .map(|z| z.re)
        .filter(|a| *a > 0.0)
        .ok_or_else(|| CliError::Numerical(weakcoupling::Error::NoBoundState(format!("𝒱_S has no positive eigenvalue of index {j}"))))
}

fn fit(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<(), CliError> {
    let symbol = cfg.symbol()?;
    let j = cfg.curve.indices[0];
    let curve = if cfg.fit.curve.is_empty() {
        let (_, c) = curves(cfg)?;
        write_curves(art, &c)?;
        c.into_iter().find(|c| c.j == j).expect("requested index")
    } else {
        read_curve(Path::new(&cfg.fit.curve), j, &symbol)?
    };
    if curve.points().is_empty() {
        return Err(CliError::Config("curve has no solved samples".into()));
    }
    let a = vs_eigenvalue(cfg, &symbol, j)?;
    let report = first_order_fit(&curve, a, &symbol)?;
    art.csv("fit.csv", &report.to_csv())?;
    art.json("fit.json", &report)
}

fn second_order(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<(), CliError> {
    let symbol = cfg.symbol()?;
    let v = cfg.potential()?;
    let j = cfg.curve.indices[0];
    let (_, c) = curves(cfg)?;
    write_curves(art, &c)?;
    let curve = c.into_iter().find(|c| c.j == j).expect("requested index");
    if curve.points().is_empty() {
        return Err(CliError::Numerical(weakcoupling::Error::NoBoundState("no λ solved".into())));
    }
    let quad = build_sphere_quadrature(symbol.dim, cfg.sphere.order)?;
    let shell = build_sphere_quadrature(symbol.dim, cfg.sphere.shell_order)?;
    let vs = assemble_vs(&v, &quad, &symbol)?;
    let a = match cfg.fit.a {
        Some(a) => a,
        None => vs_spectrum(&vs, 0)?.eigenvalues[j - 1].re,
    };
    let w0 = ws_matrix(&v, &symbol, 0.0, &quad, &shell, &WsOptions { n_t: cfg.sphere.n_t, grid: cfg.grid()? })?;
    let mut report = first_order_fit(&curve, a, &symbol)?;
    let lambdas: Vec<f64> = report.first_order.iter().map(|f| f.lambda).collect();
    let b = b_samples(&vs, &w0, &lambdas, j, cfg.fit.cluster_tol)?;
    second_order_residual(&mut report, &b, &symbol)?;
    report.grid = format!("N={} L={} order={} shell_order={} n_t={}", cfg.grid.n, cfg.grid.l, cfg.sphere.order, cfg.sphere.shell_order, cfg.sphere.n_t);
    art.csv("second_order.csv", &report.to_csv())?;
    art.json("second_order.json", &report)
}

#[derive(Serialize)]
struct KnappRow {
    r: f64,
    m: f64,
    form: Option<KnappForm>,
    ratio: Option<f64>,
    k_achieved: Option<usize>,
    max_overlap: Option<f64>,
    error: Option<String>,
}

fn knapp(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<(), CliError> {
    let v = cfg.potential()?;
    let amalgam = knapp_amalgam(&v)?;
    let opts = KnappOptions { tail_order: cfg.knapp.tail_order, amalgam: Some(amalgam), ..KnappOptions::default() };
    let vs_count = if cfg.knapp.caps > 1 && v.has_transform() {
        let spec = vs_spectrum(&assembled_vs(cfg, &cfg.symbol()?)?, 0)?;
        Some(spec.positive_count(1e-10))
    } else {
        None
    };
    let mut rows = Vec::new();
    for &r in &cfg.knapp.radii {
        let m = r.powf(cfg.knapp.m_exponent).max(2.0);
        let scale = m * r.powf(-cfg.knapp.m_exponent);
        let res = if cfg.knapp.caps == 1 {
            let dir: Vec<f64> = (0..v.dim).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect();
            knapp_packet(r, &dir, true)
                .and_then(|p| knapp_quadratic_form(&v, &p, m, &opts))
                .map(|f| (f, None, None))
        } else {
            multi_cap_certificate(&v, r, m, cfg.knapp.caps, vs_count, &opts)
                .map(|c| (c.caps[0].form, Some(c.k_achieved), Some(c.max_overlap)))
        };
        rows.push(match res {
            Ok((f, k, ov)) => KnappRow { r, m, ratio: Some(f.main_term / scale), form: Some(f), k_achieved: k, max_overlap: ov, error: None },
            Err(e) => KnappRow { r, m, form: None, ratio: None, k_achieved: None, max_overlap: None, error: Some(e.to_string()) },
        });
    }
    let r0 = rows.iter().find(|r| r.form.is_some_and(|f| f.total > 0.0)).map(|r| r.r);
    let mut csv = String::from("r,m,main_term,tail_bound,total,ratio\n");
    for row in &rows {
        if let (Some(f), Some(ratio)) = (row.form, row.ratio) {
            csv.push_str(&format!("{:e},{:e},{:.17e},{:.17e},{:.17e},{:.17e}\n", row.r, row.m, f.main_term, f.tail_bound, f.total, ratio));
        }
    }
    art.csv("knapp.csv", &csv)?;
    art.json("knapp.json", &json!({ "amalgam": amalgam, "r0": r0, "vs_positive_count": vs_count, "sweep": rows }))?;
    if rows.iter().all(|r| r.form.is_none()) {
        return Err(CliError::Resolution(weakcoupling::Error::ScaleTooLarge(cfg.knapp.radii[0])));
    }
    Ok(())
}

fn kernel_bounds(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<(), CliError> {
    let symbol = cfg.symbol()?;
    let k = &cfg.kernel;
    let n = k.r_count.max(2);
    let rs: Vec<f64> = (0..n).map(|i| k.r_max * (i + 1) as f64 / n as f64).collect();
    let report = kernel_difference_bound(&symbol, k.alpha, &k.rho, &rs)?;
    art.csv("kernel_bounds.csv", &report.to_csv())?;
    art.json("kernel_bounds.json", &json!({ "alpha": report.alpha, "max_ratio": report.max_ratio, "witness": report.witness }))
}

fn spectral(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<(), CliError> {
    let symbol = cfg.symbol()?;
    let grid = cfg.grid()?;
    let quad = build_sphere_quadrature(symbol.dim, cfg.sphere.order)?;
    let w = cfg.spectral.width;
    let f: Vec<C64> = (0..grid.len())
        .map(|i| {
            let x = grid.point(i);
            let r2: f64 = x[..grid.dim].iter().map(|c| c * c).sum();
            C64::new((-std::f64::consts::PI * r2 / (w * w)).exp(), 0.0)
        })
        .collect();
    let h = BumpFunction { a: cfg.spectral.a * symbol.tau, b: cfg.spectral.b * symbol.tau, beta: cfg.spectral.beta };
    let check = spectral_measure_check(&f, &f, &h, &symbol, &grid, &quad)?;
    art.json("spectral_measure.json", &check)
}

fn oracle(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<(), CliError> {
    let symbol = cfg.symbol()?;
    let grid = cfg.grid()?;
    let v = cfg.potential()?;
    let model = cfg.resolvent_model()?;
    let e = cfg.oracle.e;
    let k = cfg.oracle.k;
    let dense = bs_dense_oracle(&v, &symbol, e, &grid, model)?;
    let mut dense_top: Vec<C64> = if dense.is_hermitian() {
        hermitian_eig(&dense.matrix)?.0.into_iter().map(|x| C64::new(x, 0.0)).collect()
    } else {
        general_eigenvalues(&dense.matrix)?
    };
    dense_top.truncate(k);
    let iter: Vec<C64> = bs_eigs_iterative(&v, &symbol, e, &grid, model, k)?.iter().map(|p| p.value).collect();
    let gap = dense_top.iter().zip(&iter).map(|(a, b)| (a - b).norm() / a.norm().max(1e-300)).fold(0.0, f64::max);
    let mut csv = String::from("index,dense_re,dense_im,iterative_re,iterative_im\n");
    for (i, (a, b)) in dense_top.iter().zip(&iter).enumerate() {
        csv.push_str(&format!("{},{:.17e},{:.17e},{:.17e},{:.17e}\n", i + 1, a.re, a.im, b.re, b.im));
    }
    art.csv("oracle_compare.csv", &csv)?;
    art.json(
        "oracle_compare.json",
        &json!({
            "dim": dense.size(),
            "max_relative_gap": gap,
            "hermitian_defect": max_hermitian_defect(&dense.matrix),
            "hermitian_form": dense.is_hermitian(),
        }),
    )
}

fn riesz(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<(), CliError> {
    let symbol = cfg.symbol()?;
    let grid = cfg.grid()?;
    let v = cfg.potential()?;
    let model = cfg.resolvent_model()?;
    let rc = &cfg.riesz;
    let center = C64::new(rc.center_re, rc.center_im);
    let (samples, lambda): (Vec<RieszSample>, Option<f64>) = match rc.family.as_str() {
        "kappa" => {
            let quad = build_sphere_quadrature(symbol.dim, cfg.sphere.order)?;
            let parts = bs_split(&v, &symbol, rc.e, &grid, &quad, model)?;
            let full = parts.full.to_matrix("bs");
            let sing = parts.sing.to_matrix("bs-sing");
            let mu = general_eigenvalues(&full.matrix)?[0].re;
            let lambda = 1.0 / mu;
            let fam = |k: f64| {
                let m = (&sing.matrix * C64::new(1.0 - k, 0.0) + &full.matrix * C64::new(k, 0.0)) * C64::new(lambda, 0.0);
                Ok(OperatorMatrix::detect(m, format!("kappa={k}")))
            };
            (riesz_count(fam, center, rc.radius, &rc.kappas)?, Some(lambda))
        }
        _ => {
            let m = bs_dense_oracle(&v, &symbol, rc.e, &grid, model)?;
            (riesz_count(|_| Ok(m.clone()), center, rc.radius, &[0.0])?, None)
        }
    };
    let constant = samples.windows(2).all(|w| w[0].rank == w[1].rank);
    art.json("riesz.json", &json!({ "lambda": lambda, "rank_constant": constant, "samples": samples }))
}
