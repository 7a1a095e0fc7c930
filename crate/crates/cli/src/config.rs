//! Run configuration read from a TOML file.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use tubenorm::curve::{generators, resample_arclength};
use tubenorm::end_cap::{DEFAULT_H, DEFAULT_L};
use tubenorm::system::CurveSystem;
use tubenorm::{Curve, CurveKind};

use crate::CliError;

/// Environment variable overriding the output directory.
pub const OUT_ENV: &str = "TUBENORM_OUT";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub curve: Option<CurveSpec>,
    /// Members of a curve system; takes precedence over `curve` for `rho`
    /// and `gamma`.
    #[serde(default)]
    pub system: Vec<CurveSpec>,
    #[serde(default)]
    pub eps: EpsConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub cap: CapConfig,
    #[serde(default)]
    pub gamma: GammaConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsConfig {
    #[serde(default)]
    pub schedule: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub ns: Option<usize>,
    pub nt: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapConfig {
    #[serde(default = "default_l")]
    pub l: f64,
    #[serde(default = "default_h")]
    pub h: f64,
}

fn default_l() -> f64 {
    DEFAULT_L
}

fn default_h() -> f64 {
    DEFAULT_H
}

impl Default for CapConfig {
    fn default() -> Self {
        CapConfig { l: DEFAULT_L, h: DEFAULT_H }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaConfig {
    #[serde(default = "default_mode")]
    pub mode: String,
    #[serde(default)]
    pub levels: Vec<u32>,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    #[serde(default = "default_fraction")]
    pub eps_fraction: f64,
}

fn default_mode() -> String {
    "constant".into()
}

fn default_amplitude() -> f64 {
    1.0
}

fn default_fraction() -> f64 {
    0.5
}

impl Default for GammaConfig {
    fn default() -> Self {
        GammaConfig { mode: default_mode(), levels: Vec::new(), amplitude: 1.0, eps_fraction: 0.5 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
}

/// A curve from a built-in generator or a CSV file of `x,y` points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveSpec {
    Circle {
        radius: f64,
        #[serde(default)]
        center: [f64; 2],
        #[serde(default = "default_samples")]
        samples: usize,
    },
    Ellipse {
        a: f64,
        b: f64,
        #[serde(default = "default_samples")]
        samples: usize,
        /// Rescale to unit length.
        #[serde(default)]
        unit_length: bool,
    },
    PerturbedCircle {
        radius: f64,
        amplitude: f64,
        k: u32,
        #[serde(default)]
        phase: f64,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    /// Perturbed circle with amplitude, frequency and phase drawn from the seed.
    RandomPerturbedCircle {
        radius: f64,
        max_amplitude: f64,
        max_k: u32,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    FigureEight {
        scale: f64,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    StraightEnded {
        length: f64,
        eta: f64,
        turning: f64,
        #[serde(default = "default_open_samples")]
        samples: usize,
    },
    Csv {
        path: PathBuf,
        kind: CurveKind,
        #[serde(default = "default_samples")]
        samples: usize,
        /// Straight-end parameter for open curves.
        eta: Option<f64>,
    },
}

fn default_samples() -> usize {
    1024
}

fn default_open_samples() -> usize {
    2049
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::ConfigInvalid(msg.into())
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive, got {v}")))
    }
}

impl CurveSpec {
    fn validate(&self) -> Result<(), CliError> {
        match self {
            CurveSpec::Circle { radius, .. } => positive("radius", *radius),
            CurveSpec::Ellipse { a, b, .. } => positive("a", *a).and(positive("b", *b)),
            CurveSpec::PerturbedCircle { radius, amplitude, .. } => {
                positive("radius", *radius)?;
                if !(amplitude.is_finite() && amplitude.abs() < *radius) {
                    return Err(invalid("perturbation amplitude must be below the radius"));
                }
                Ok(())
            }
            CurveSpec::RandomPerturbedCircle { radius, max_amplitude, max_k, .. } => {
                positive("radius", *radius)?;
                positive("max_amplitude", *max_amplitude)?;
                if *max_k == 0 {
                    return Err(invalid("max_k must be at least 1"));
                }
                Ok(())
            }
            CurveSpec::FigureEight { scale, .. } => positive("scale", *scale),
            CurveSpec::StraightEnded { length, eta, .. } => positive("length", *length).and(positive("eta", *eta)),
            CurveSpec::Csv { eta, .. } => eta.map_or(Ok(()), |e| positive("eta", e)),
        }
    }

    pub fn build(&self, seed: u64, base: &Path) -> Result<Curve, CliError> {
        Ok(match self {
            CurveSpec::Circle { radius, center, samples } => generators::circle_at(*center, *radius, *samples, 0.0)?,
            CurveSpec::Ellipse { a, b, samples, unit_length } => {
                let c = generators::ellipse(*a, *b, *samples)?;
                if *unit_length {
                    c.scaled(1.0 / c.length())?
                } else {
                    c
                }
            }
            CurveSpec::PerturbedCircle { radius, amplitude, k, phase, samples } => {
                generators::perturbed_circle(*radius, *amplitude, *k, *phase, *samples)?
            }
            CurveSpec::RandomPerturbedCircle { radius, max_amplitude, max_k, samples } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let k = rng.gen_range(1..=*max_k);
                let amp = rng.gen_range(0.0..*max_amplitude);
                let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                generators::perturbed_circle(*radius, amp, k, phase, *samples)?
            }
            CurveSpec::FigureEight { scale, samples } => generators::figure_eight(*scale, *samples)?,
            CurveSpec::StraightEnded { length, eta, turning, samples } => {
                generators::straight_ended(*length, *eta, *turning, *samples)?
            }
            CurveSpec::Csv { path, kind, samples, eta } => {
                let full = if path.is_absolute() { path.clone() } else { base.join(path) };
                let pts = tubenorm::io::read_points_file(&full).map_err(|e| invalid(e.to_string()))?;
                let c = resample_arclength(&pts, *samples, *kind)?;
                match eta {
                    Some(e) => c.with_straight_ends(*e)?,
                    None => c,
                }
            }
        })
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| invalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        for e in &self.eps.schedule {
            positive("ε", *e)?;
        }
        if self.eps.schedule.windows(2).any(|w| w[1] >= w[0]) {
            return Err(invalid("ε schedule must be strictly decreasing"));
        }
        positive("cap.l", self.cap.l)?;
        positive("cap.h", self.cap.h)?;
        positive("gamma.amplitude", self.gamma.amplitude)?;
        positive("gamma.eps_fraction", self.gamma.eps_fraction)?;
        if !matches!(self.gamma.mode.as_str(), "constant" | "normal") {
            return Err(invalid(format!("unknown gamma mode {:?}", self.gamma.mode)));
        }
        if let Some(nt) = self.grid.nt {
            if nt % 2 == 0 || nt < 5 {
                return Err(invalid("grid.nt must be odd and at least 5"));
            }
        }
        if let Some(c) = &self.curve {
            c.validate()?;
        }
        for c in &self.system {
            c.validate()?;
        }
        Ok(())
    }

    /// Grid for a solve at `eps`, filling unset sizes with the defaults.
    pub fn grid_for(&self, eps: f64) -> (usize, usize) {
        let (ns, nt) = tubenorm::mapped::ParamGrid::default_size(eps);
        (self.grid.ns.unwrap_or(ns), self.grid.nt.unwrap_or(nt))
    }

    pub fn single_curve(&self, base: &Path) -> Result<Curve, CliError> {
        self.curve
            .as_ref()
            .ok_or_else(|| invalid("missing [curve] section"))?
            .build(self.seed, base)
    }

    pub fn curve_system(&self, base: &Path) -> Result<CurveSystem, CliError> {
        let specs: Vec<&CurveSpec> = if self.system.is_empty() {
            self.curve.iter().collect()
        } else {
            self.system.iter().collect()
        };
        if specs.is_empty() {
            return Err(invalid("missing [curve] or [[system]] section"));
        }
        let curves = specs
            .iter()
            .enumerate()
            .map(|(i, s)| s.build(self.seed.wrapping_add(i as u64), base))
            .collect::<Result<Vec<_>, _>>()?;
        CurveSystem::new(curves).map_err(|e| invalid(e.to_string()))
    }

    pub fn schedule(&self) -> Result<&[f64], CliError> {
        if self.eps.schedule.is_empty() {
            return Err(invalid("empty ε schedule"));
        }
        Ok(&self.eps.schedule)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let cfg = RunConfig::from_toml(
            r#"
            seed = 7
            [curve]
            generator = "circle"
            radius = 1.0
            [eps]
            schedule = [0.1, 0.05]
            "#,
        )
        .unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.cap, CapConfig::default());
        assert_eq!(cfg.grid_for(0.1), (256, 65));
    }

    #[test]
    fn rejects_bad_values() {
        let bad = [
            "[eps]\nschedule = [0.05, 0.1]",
            "[eps]\nschedule = [-0.1]",
            "[cap]\nl = 0",
            "[curve]\ngenerator = \"circle\"\nradius = -1.0",
            "unknown = 3",
            "[grid]\nnt = 64",
        ];
        for text in bad {
            assert!(matches!(RunConfig::from_toml(text), Err(CliError::ConfigInvalid(_))), "{text}");
        }
    }
}
