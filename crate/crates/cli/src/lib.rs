//! Command dispatch for the `tubenorm` binary.
//!
//! Each command reads a [`RunConfig`], runs the corresponding experiment and
//! writes JSON (and where useful CSV or gnuplot) artifacts into the output
//! directory. Exit status is 0 on success, 2 on validation failure and 3 on
//! solver or I/O failure.

pub mod config;
pub mod output;
pub mod plot;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use tubenorm::asymptotics::{
    fit_expansion, gamma_experiment, g_zero, g_zero_line, open_curve_norm, CurveMeta, ExpansionFit, FitModel,
    OpenNorm, Perturbation,
};
use tubenorm::curve::{elastica_energy, total_turning};
use tubenorm::end_cap::{
    alpha_constant, boundary_comparison, build_cap_domain, comparison_bound, decay_check, solve_cap_psi,
    ComparisonReport, DecayStation,
};
use tubenorm::io::SolveRecord;
use tubenorm::mapped::{solve_closed, NormResult};
use tubenorm::system::{
    default_dist_tol, detect_transverse_crossings, system_metrics, CrossingKind, CrossingReport, DEFAULT_ANGLE_TOL,
};
use tubenorm::{CurveKind, Radius};

pub use config::RunConfig;
use output::{envelope, ArtifactWriter};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error(transparent)]
    Module(#[from] tubenorm::Error),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ConfigInvalid(_) => 2,
            CliError::Module(_) | CliError::Io(_) => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Norm,
    Alpha,
    Fit,
    Rho,
    Gamma,
    Caps,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Norm => "norm",
            Command::Alpha => "alpha",
            Command::Fit => "fit",
            Command::Rho => "rho",
            Command::Gamma => "gamma",
            Command::Caps => "caps",
        }
    }
}

/// Runs `command` and writes its artifacts into `out`. Relative curve file
/// paths resolve against `base`.
pub fn run(command: Command, cfg: &RunConfig, out: &Path, base: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut w = ArtifactWriter::default();
    match command {
        Command::Norm => norm(cfg, base, &mut w)?,
        Command::Alpha => alpha(cfg, &mut w)?,
        Command::Fit => fit(cfg, base, &mut w)?,
        Command::Rho => rho(cfg, base, &mut w)?,
        Command::Gamma => gamma(cfg, base, &mut w)?,
        Command::Caps => caps(cfg, &mut w)?,
    }
    w.finish(out)
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
enum NormRecord {
    Closed { eps: f64, result: NormResult },
    Open(OpenNorm),
}

fn norm(cfg: &RunConfig, base: &Path, w: &mut ArtifactWriter) -> Result<(), CliError> {
    let schedule = cfg.schedule()?;
    let curve = cfg.single_curve(base)?;
    match curve.kind() {
        CurveKind::Closed => {
            let results = schedule
                .par_iter()
                .map(|&eps| solve_closed(&curve, eps, cfg.grid_for(eps)).map(|(_, r)| (eps, r)))
                .collect::<Result<Vec<_>, _>>()?;
            let rows: Vec<SolveRecord> = results
                .iter()
                .map(|(eps, r)| SolveRecord {
                    eps: *eps,
                    ns: r.ns,
                    nt: r.nt,
                    norm_sq: r.norm_sq,
                    residual: r.residual,
                    wall_seconds: r.wall_seconds,
                })
                .collect();
            let records: Vec<NormRecord> =
                results.into_iter().map(|(eps, result)| NormRecord::Closed { eps, result }).collect();
            w.csv("norm.csv", &rows)?;
            w.json("norm.json", &envelope("norm", cfg, &records)?)?;
        }
        CurveKind::Open => {
            let results = schedule
                .par_iter()
                .map(|&eps| open_curve_norm(&curve, eps, cfg.grid_for(eps), cfg.cap.h))
                .collect::<Result<Vec<_>, _>>()?;
            w.csv("norm.csv", &results)?;
            let records: Vec<NormRecord> = results.into_iter().map(NormRecord::Open).collect();
            w.json("norm.json", &envelope("norm", cfg, &records)?)?;
        }
    }
    Ok(())
}

fn alpha(cfg: &RunConfig, w: &mut ArtifactWriter) -> Result<(), CliError> {
    let est = alpha_constant(cfg.cap.h, cfg.cap.l)?;
    w.json("alpha.json", &envelope("alpha", cfg, &est)?)?;
    w.csv("alpha.csv", &[est])?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct FitArtifact {
    fit: ExpansionFit,
    free_leading: ExpansionFit,
    residual_slope: Option<f64>,
}

/// Records and fits for the curve in `cfg`; open curves use the bulk-plus-caps
/// decomposition with `α` from the cap settings.
pub fn fit_records(cfg: &RunConfig, base: &Path) -> Result<(ExpansionFit, ExpansionFit), CliError> {
    let schedule = cfg.schedule()?;
    let curve = cfg.single_curve(base)?;
    let (records, meta, models) = match curve.kind() {
        CurveKind::Closed => {
            let recs = schedule
                .par_iter()
                .map(|&eps| solve_closed(&curve, eps, cfg.grid_for(eps)).map(|(_, r)| (eps, r.norm_sq)))
                .collect::<Result<Vec<_>, _>>()?;
            let meta = CurveMeta { length: curve.length(), elastica: elastica_energy(&curve), alpha: None };
            (recs, meta, (FitModel::Closed, FitModel::ClosedFreeLeading))
        }
        CurveKind::Open => {
            let alpha = alpha_constant(cfg.cap.h, cfg.cap.l)?.alpha;
            let recs = schedule
                .par_iter()
                .map(|&eps| open_curve_norm(&curve, eps, cfg.grid_for(eps), cfg.cap.h).map(|o| (eps, o.total)))
                .collect::<Result<Vec<_>, _>>()?;
            let meta = CurveMeta { length: curve.length(), elastica: elastica_energy(&curve), alpha: Some(alpha) };
            (recs, meta, (FitModel::Open, FitModel::OpenFreeLeading))
        }
    };
    Ok((fit_expansion(&records, meta, models.0)?, fit_expansion(&records, meta, models.1)?))
}

fn fit(cfg: &RunConfig, base: &Path, w: &mut ArtifactWriter) -> Result<(), CliError> {
    let (main, free) = fit_records(cfg, base)?;
    let script = plot::render_plot_script(&main)?;
    #[derive(Serialize)]
    struct Row {
        eps: f64,
        norm_sq: f64,
    }
    let rows: Vec<Row> = main.records.iter().map(|&(eps, norm_sq)| Row { eps, norm_sq }).collect();
    let art = FitArtifact { residual_slope: plot::residual_slope(&main), fit: main, free_leading: free };
    w.json("fit.json", &envelope("fit", cfg, &art)?)?;
    w.csv("fit_records.csv", &rows)?;
    w.text("fit.gp", script);
    Ok(())
}

#[derive(Debug, Serialize)]
struct CurveSummary {
    length: f64,
    turning: f64,
    elastica: f64,
    rho: Option<Radius>,
    reoriented: bool,
}

#[derive(Debug, Serialize)]
struct RhoArtifact {
    length: f64,
    rho: Option<Radius>,
    curves: Vec<CurveSummary>,
    crossings: Vec<CrossingReport>,
    transverse: bool,
    g_zero: f64,
    g_zero_line: f64,
}

fn rho(cfg: &RunConfig, base: &Path, w: &mut ArtifactWriter) -> Result<(), CliError> {
    let sys = cfg.curve_system(base)?;
    let rho = system_metrics(&sys).ok().map(|m| m.rho);
    let crossings = detect_transverse_crossings(&sys, default_dist_tol(sys.curves()), DEFAULT_ANGLE_TOL);
    let art = RhoArtifact {
        length: sys.length(),
        rho,
        curves: sys
            .curves()
            .iter()
            .map(|c| CurveSummary {
                length: c.length(),
                turning: total_turning(c),
                elastica: elastica_energy(c),
                rho: c.rho().ok(),
                reoriented: c.reoriented(),
            })
            .collect(),
        transverse: crossings.iter().any(|c| c.classification == CrossingKind::Transverse),
        crossings,
        g_zero: g_zero(&sys),
        g_zero_line: g_zero_line(&sys),
    };
    w.json("rho.json", &envelope("rho", cfg, &art)?)?;
    Ok(())
}

fn gamma(cfg: &RunConfig, base: &Path, w: &mut ArtifactWriter) -> Result<(), CliError> {
    let sys = cfg.curve_system(base)?;
    let (mode, schedule) = match cfg.gamma.mode.as_str() {
        "normal" => {
            if cfg.gamma.levels.is_empty() {
                return Err(CliError::ConfigInvalid("gamma.levels is empty".into()));
            }
            let m = Perturbation::Normal {
                levels: cfg.gamma.levels.clone(),
                amplitude: cfg.gamma.amplitude,
                eps_fraction: cfg.gamma.eps_fraction,
            };
            (m, &[][..])
        }
        _ => (Perturbation::Constant, cfg.schedule()?),
    };
    let report = gamma_experiment(&sys, schedule, &mode)?;
    w.json("gamma.json", &envelope("gamma", cfg, &report)?)?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct CapsArtifact {
    l: f64,
    h: f64,
    integral_psi: f64,
    alpha_estimate: f64,
    min_psi: f64,
    max_psi: f64,
    decay: Vec<DecayStation>,
    comparison: ComparisonReport,
    boundary_min_difference: f64,
}

fn caps(cfg: &RunConfig, w: &mut ArtifactWriter) -> Result<(), CliError> {
    let dom = build_cap_domain(cfg.cap.l, cfg.cap.h)?;
    let sol = solve_cap_psi(&dom)?;
    let decay = decay_check(&sol);
    let art = CapsArtifact {
        l: cfg.cap.l,
        h: cfg.cap.h,
        integral_psi: sol.integral_psi,
        alpha_estimate: sol.alpha_estimate,
        min_psi: sol.psi.iter().cloned().fold(f64::INFINITY, f64::min),
        max_psi: sol.psi.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        comparison: comparison_bound(),
        boundary_min_difference: boundary_comparison(&dom),
        decay: decay.clone(),
    };
    w.json("caps.json", &envelope("caps", cfg, &art)?)?;
    w.csv("caps_decay.csv", &decay)?;
    Ok(())
}
