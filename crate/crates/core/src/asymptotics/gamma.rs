//! Numerical illustration of the Γ-limit: `G_ε` along ε-schedules and along
//! perturbed sequences, against both normalisations of the limit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::functionals::{g_eps, g_zero, g_zero_line};
use crate::curve::{resample_arclength, CurveKind, Point};
use crate::error::{Error, Result};
use crate::system::{system_metrics, CurveSystem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum Perturbation {
    /// The target itself at every ε of the schedule.
    Constant,
    /// Level `n` displaces every member by `(amplitude/n²)·sin(2πns)` along
    /// its normal and evaluates at `ε_n = eps_fraction · ρ_n`.
    Normal { levels: Vec<u32>, amplitude: f64, eps_fraction: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaEntry {
    pub level: Option<u32>,
    pub eps: f64,
    pub g_eps: f64,
    /// `G_ε − G₀` with `G₀ = (2/45)Σℓ∫κ²`.
    pub gap_length_weighted: f64,
    /// `G_ε − (2/45)Σ∫κ²`.
    pub gap_line_integral: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalisation {
    LengthWeighted,
    LineIntegral,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaReport {
    pub g_zero: f64,
    pub g_zero_line: f64,
    pub entries: Vec<GammaEntry>,
    pub length_weighted_decreasing: bool,
    pub line_integral_decreasing: bool,
    /// The normalisation whose gap shrinks monotonically to the smaller value.
    pub trending_to_zero: Normalisation,
}

fn decreasing(gaps: &[f64]) -> bool {
    gaps.windows(2).all(|w| w[1].abs() < w[0].abs())
}

fn perturbed(target: &CurveSystem, amplitude: f64, k: u32) -> Result<CurveSystem> {
    let curves = target
        .curves()
        .iter()
        .map(|c| {
            let pts: Vec<Point> = c
                .samples()
                .iter()
                .zip(c.frames())
                .map(|(p, f)| {
                    let d = amplitude * (2.0 * std::f64::consts::PI * k as f64 * f.s).sin();
                    [p[0] + d * f.normal[0], p[1] + d * f.normal[1]]
                })
                .collect();
            resample_arclength(&pts, c.len(), CurveKind::Closed)
        })
        .collect::<Result<Vec<_>>>()?;
    CurveSystem::new(curves)
}

pub fn gamma_experiment(target: &CurveSystem, schedule: &[f64], mode: &Perturbation) -> Result<GammaReport> {
    let g0 = g_zero(target);
    let g0_line = g_zero_line(target);
    let entries: Vec<GammaEntry> = match mode {
        Perturbation::Constant => {
            if schedule.is_empty() || schedule.windows(2).any(|w| w[1] >= w[0]) {
                return Err(Error::InvalidArgument("ε schedule must be nonempty and strictly decreasing".into()));
            }
            schedule
                .par_iter()
                .map(|&eps| {
                    let g = g_eps(target, eps)?;
                    Ok(GammaEntry {
                        level: None,
                        eps,
                        g_eps: g,
                        gap_length_weighted: g - g0,
                        gap_line_integral: g - g0_line,
                    })
                })
                .collect::<Result<_>>()?
        }
        Perturbation::Normal { levels, amplitude, eps_fraction } => {
            if levels.is_empty() || !(*eps_fraction > 0.0 && *eps_fraction <= 0.95) {
                return Err(Error::InvalidArgument("perturbation needs levels and ε fraction in (0, 0.95]".into()));
            }
            levels
                .par_iter()
                .map(|&n| {
                    let nf = n as f64;
                    let sys = perturbed(target, amplitude / (nf * nf), n)?;
                    let rho = system_metrics(&sys)?
                        .rho
                        .finite()
                        .ok_or_else(|| Error::DegenerateInput("closed system without finite radius".into()))?;
                    let eps = eps_fraction * rho;
                    let g = g_eps(&sys, eps)?;
                    Ok(GammaEntry {
                        level: Some(n),
                        eps,
                        g_eps: g,
                        gap_length_weighted: g - g0,
                        gap_line_integral: g - g0_line,
                    })
                })
                .collect::<Result<_>>()?
        }
    };
    let weighted: Vec<f64> = entries.iter().map(|e| e.gap_length_weighted).collect();
    let line: Vec<f64> = entries.iter().map(|e| e.gap_line_integral).collect();
    let (wd, ld) = (decreasing(&weighted), decreasing(&line));
    let last = |v: &[f64]| v.last().map_or(f64::INFINITY, |x| x.abs());
    let trending_to_zero = match (wd, ld) {
        (true, true) if last(&weighted) <= last(&line) => Normalisation::LengthWeighted,
        (true, true) => Normalisation::LineIntegral,
        (true, false) => Normalisation::LengthWeighted,
        (false, true) => Normalisation::LineIntegral,
        (false, false) => Normalisation::Neither,
    };
    Ok(GammaReport {
        g_zero: g0,
        g_zero_line: g0_line,
        entries,
        length_weighted_decreasing: wd,
        line_integral_decreasing: ld,
        trending_to_zero,
    })
}
