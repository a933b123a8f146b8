//! Run configuration, presets, and command-line overrides.

use std::path::PathBuf;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::composite::ExpansionSpec;
use crate::error::{Error, Result};
use crate::layers::CornerSpec;
use crate::material::{mullins_coefficient, slope_parameter, stiffness_parameter, PhysicalParams};
use crate::oracle::SolverConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Params,
    Profile,
    DepthSeries,
    Corner,
    Oracle,
    Compare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Figure3,
    Figure4,
    Figure5,
    Figure6,
    Cornerfig,
}

/// Explicit reduced parameters: B (m⁴/s), α (m²), m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    #[serde(rename = "B")]
    pub b: f64,
    pub alpha: f64,
    pub m: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputSpec {
    /// Destination file; standard output when absent.
    pub path: Option<PathBuf>,
    pub format: Format,
}

/// Everything a run needs. Serialized verbatim into each output header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    #[serde(default)]
    pub physical: Option<PhysicalParams>,
    #[serde(default)]
    pub model: Option<ModelSpec>,
    /// B·t values (m⁴).
    #[serde(default)]
    pub times: Vec<f64>,
    /// Stiffness values (m²) swept by `depth-series`; the model α when empty.
    #[serde(default)]
    pub alphas: Vec<f64>,
    #[serde(default)]
    pub expansion: ExpansionSpec,
    /// Oracle settings in scaled variables; α̂, m, t_final and snapshots are
    /// filled in from the model and `times`.
    #[serde(default)]
    pub solver: Option<SolverConfig>,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Upper end of the x range in metres (profile modes) or of w (corner mode).
    #[serde(default)]
    pub xmax: Option<f64>,
    /// B·τ in corner variables; 1 corresponds to Bt = α⁵ in scaled units.
    #[serde(default = "default_corner_tau")]
    pub corner_tau: f64,
}

fn default_samples() -> usize {
    401
}

fn default_corner_tau() -> f64 {
    1.0
}

const FIGURE_ALPHA: f64 = 9.7e-16;
const FIGURE_M: f64 = 0.209;

impl RunConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            physical: None,
            model: None,
            times: Vec::new(),
            alphas: Vec::new(),
            expansion: ExpansionSpec::default(),
            solver: None,
            output: OutputSpec::default(),
            samples: default_samples(),
            xmax: None,
            corner_tau: default_corner_tau(),
        }
    }

    /// Canned figure reproductions. Only B·t enters the figures, so B is 1.
    pub fn preset(p: Preset) -> Self {
        let model = Some(ModelSpec { b: 1.0, alpha: FIGURE_ALPHA, m: FIGURE_M });
        let profile = |bt: f64| Self { model, times: vec![bt], ..Self::new(Mode::Profile) };
        match p {
            Preset::Figure3 => profile(3e-30),
            Preset::Figure4 => profile(1e-29),
            Preset::Figure5 => profile(2e-29),
            Preset::Figure6 => Self {
                model,
                times: (0..=30).map(|k| 10f64.powf(-31.0 + 0.1 * k as f64)).collect(),
                alphas: vec![10.5e-16, 9.7e-16, 3e-16, 9.7e-17],
                ..Self::new(Mode::DepthSeries)
            },
            Preset::Cornerfig => Self {
                model,
                times: vec![1e-29],
                expansion: ExpansionSpec {
                    corner: Some(CornerSpec { r: -1.0, gamma: 1.0, ..CornerSpec::default() }),
                    ..ExpansionSpec::default()
                },
                samples: 201,
                xmax: Some(20.0),
                ..Self::new(Mode::Corner)
            },
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("run configuration serializes")
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.physical, &self.model) {
            (Some(_), Some(_)) => return Err(Error::Config("give either physical or model parameters, not both".into())),
            (None, None) => return Err(Error::Config("physical or model parameters are required".into())),
            (Some(p), None) => p.validate()?,
            (None, Some(m)) => {
                if !(m.b > 0.0 && m.b.is_finite()) || !(m.alpha >= 0.0 && m.alpha.is_finite()) || !(m.m >= 0.0 && m.m.is_finite()) {
                    return Err(Error::Config(format!("model needs B > 0, alpha >= 0, m >= 0; got {m:?}")));
                }
            }
        }
        if self.mode != Mode::Params && self.times.is_empty() {
            return Err(Error::Config(format!("mode {:?} needs at least one Bt value", self.mode)));
        }
        if let Some(t) = self.times.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(Error::Config(format!("Bt values must be positive, got {t}")));
        }
        if let Some(a) = self.alphas.iter().find(|a| !(**a >= 0.0 && a.is_finite())) {
            return Err(Error::Config(format!("alpha values must be non-negative, got {a}")));
        }
        if self.samples < 2 {
            return Err(Error::Config(format!("samples must be at least 2, got {}", self.samples)));
        }
        if let Some(x) = self.xmax {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::Config(format!("xmax must be positive, got {x}")));
            }
        }
        if !(self.corner_tau > 0.0 && self.corner_tau.is_finite()) {
            return Err(Error::Config(format!("corner_tau must be positive, got {}", self.corner_tau)));
        }
        self.expansion.validate()
    }

    /// (B, α, m) from whichever parameter block is present.
    pub fn reduced(&self) -> Result<ModelSpec> {
        match (&self.physical, &self.model) {
            (None, Some(m)) => Ok(*m),
            (Some(p), None) => Ok(ModelSpec {
                b: mullins_coefficient(p)?,
                alpha: stiffness_parameter(p)?,
                m: slope_parameter(p.gamma_gb, p.gamma_i, p.gamma_s)?.m,
            }),
            _ => Err(Error::Config("physical or model parameters are required".into())),
        }
    }
}

/// Command-line flags; each one overrides the preset and config file.
#[derive(Debug, Clone, Default, clap::Parser)]
#[command(name = "groove", about = "Grain-boundary groove profiles under an elastic coating")]
pub struct Flags {
    /// JSON run configuration.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Slope parameter γ_gb/(γ_i+γ_s).
    #[arg(long)]
    pub m: Option<f64>,
    /// Stiffness α in m².
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Mullins coefficient B in m⁴/s.
    #[arg(long = "B")]
    pub b: Option<f64>,
    /// B·t in m⁴; repeat for several times.
    #[arg(long = "Bt")]
    pub bt: Vec<f64>,
    /// Outer expansion order N.
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Upper end of the sampled range (metres; w in corner mode).
    #[arg(long)]
    pub xmax: Option<f64>,
    /// Add the corner layer to the composite.
    #[arg(long)]
    pub include_corner: bool,
    /// Corner amplitude γ (used with --include-corner and in corner mode).
    #[arg(long, allow_hyphen_values = true)]
    pub corner_gamma: Option<f64>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl Flags {
    /// Preset, then config file, then individual flags.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match (&self.config, self.preset) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                RunConfig::from_json(&text)?
            }
            (None, Some(p)) => RunConfig::preset(p),
            (None, None) => RunConfig::new(self.mode.unwrap_or(Mode::Params)),
        };
        if let Some(mode) = self.mode {
            cfg.mode = mode;
        }
        if self.m.is_some() || self.alpha.is_some() || self.b.is_some() {
            let mut model = match (&cfg.model, &cfg.physical) {
                (Some(m), _) => *m,
                (None, Some(_)) => cfg.reduced()?,
                (None, None) => ModelSpec { b: 1.0, alpha: f64::NAN, m: f64::NAN },
            };
            model.m = self.m.unwrap_or(model.m);
            model.alpha = self.alpha.unwrap_or(model.alpha);
            model.b = self.b.unwrap_or(model.b);
            cfg.model = Some(model);
            cfg.physical = None;
        }
        if !self.bt.is_empty() {
            cfg.times = self.bt.clone();
        }
        if let Some(n) = self.order {
            cfg.expansion.order = n;
        }
        if let Some(n) = self.samples {
            cfg.samples = n;
        }
        if self.xmax.is_some() {
            cfg.xmax = self.xmax;
        }
        if self.include_corner {
            cfg.expansion.include_corner = true;
            cfg.expansion.corner.get_or_insert_with(CornerSpec::default);
        }
        if let Some(g) = self.corner_gamma {
            cfg.expansion.corner.get_or_insert_with(CornerSpec::default).gamma = g;
        }
        if self.out.is_some() {
            cfg.output.path = self.out.clone();
        }
        if let Some(f) = self.format {
            cfg.output.format = f;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
