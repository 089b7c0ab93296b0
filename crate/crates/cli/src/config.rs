//! Scenario configuration (TOML).
//!
//! ```toml
//! model = "core"            # core | colonization | epidemic | oracle | equilibrium
//!
//! [grid]
//! L = 10.0
//! N = 32
//!
//! [params]
//! alpha = 1.0
//! gamma = 1.0
//! epsilon = 0.5
//! sigma = 1.0
//!
//! [init]
//! preset = "gaussian-blob"  # uniform | gaussian-blob | point-column | file
//! center = [0.0, 0.0]
//! width = 1.5
//! mass = 1.0
//!
//! [run]
//! T = 5.0
//! dt = 0.05
//! sample_every = 10
//!
//! [output]
//! directory = "out"
//! formats = ["bin", "csv", "png"]
//! ```

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use rhsim_core::colonization::ColonizationParams;
use rhsim_core::epidemic::EpidemicParams;
use rhsim_core::init::{gaussian_blob, point_column, uniform};
use rhsim_core::{CoreParams, Frame, GridSpec, ScalarField, Snapshot, TravelerField};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Core,
    Colonization,
    Epidemic,
    Oracle,
    Equilibrium,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub model: ModelKind,
    pub grid: GridSection,
    pub params: ParamsSection,
    pub init: InitSpec,
    /// Initial infected residents (epidemic only).
    pub seed: Option<InitSpec>,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "N")]
    pub n: usize,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub epsilon: Option<f64>,
    pub sigma: Option<f64>,
    pub p: Option<f64>,
    pub beta: Option<f64>,
    pub mu: Option<f64>,
    pub kappa: Option<f64>,
    pub nu: Option<f64>,
    pub kappa1: Option<f64>,
    pub kappa2: Option<f64>,
    pub nu1: Option<f64>,
    pub nu2: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Uniform,
    GaussianBlob,
    PointColumn,
    File,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitSpec {
    pub preset: Preset,
    pub value: Option<f64>,
    pub center: Option<[f64; 2]>,
    pub width: Option<f64>,
    pub mass: Option<f64>,
    pub node: Option<[usize; 2]>,
    /// Scalar snapshot of the at-home density (`file` preset).
    pub path: Option<PathBuf>,
    /// Optional traveler snapshot; travelers start at zero otherwise.
    pub traveler_path: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(rename = "T")]
    pub duration: Option<f64>,
    pub dt: Option<f64>,
    pub sample_every: Option<usize>,
    /// Output times of the closed-form oracle.
    pub times: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Bin,
    Csv,
    Png,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

fn default_directory() -> PathBuf {
    PathBuf::from("output")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Bin]
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: default_directory(),
            formats: default_formats(),
        }
    }
}

fn missing(key: &str) -> CliError {
    CliError::Config(format!("missing required key `{key}`"))
}

/// Time stepping of the marching models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub duration: f64,
    pub dt: f64,
    pub sample_every: usize,
}

impl FromStr for Config {
    type Err = CliError;

    fn from_str(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_str(&text)
    }

    pub fn grid(&self) -> Result<GridSpec, CliError> {
        Ok(GridSpec::new(self.grid.length, self.grid.n)?)
    }

    pub fn core_params(&self) -> Result<CoreParams, CliError> {
        let p = &self.params;
        Ok(CoreParams::new(
            p.alpha.ok_or_else(|| missing("params.alpha"))?,
            p.gamma.ok_or_else(|| missing("params.gamma"))?,
            p.epsilon.ok_or_else(|| missing("params.epsilon"))?,
            p.sigma.ok_or_else(|| missing("params.sigma"))?,
        )?)
    }

    pub fn colonization_params(&self) -> Result<ColonizationParams, CliError> {
        let p = &self.params;
        let ext = ColonizationParams {
            p: p.p.unwrap_or(1.0),
            beta: p.beta.unwrap_or(0.0),
            mu: p.mu.unwrap_or(0.0),
            kappa: p.kappa.unwrap_or(0.0),
            nu: p.nu.unwrap_or(0.0),
        };
        ext.validate()?;
        Ok(ext)
    }

    pub fn epidemic_params(&self) -> Result<EpidemicParams, CliError> {
        let p = &self.params;
        let params = EpidemicParams {
            core: self.core_params()?,
            kappa1: p.kappa1.unwrap_or(0.0),
            kappa2: p.kappa2.unwrap_or(0.0),
            nu1: p.nu1.unwrap_or(0.0),
            nu2: p.nu2.unwrap_or(0.0),
        };
        params.validate()?;
        Ok(params)
    }

    pub fn schedule(&self) -> Result<Schedule, CliError> {
        let duration = self.run.duration.ok_or_else(|| missing("run.T"))?;
        let dt = self.run.dt.ok_or_else(|| missing("run.dt"))?;
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(CliError::Config(format!("run.T must be > 0, got {duration}")));
        }
        if !(dt > 0.0 && dt <= duration) {
            return Err(CliError::Config(format!("run.dt must lie in (0, T], got {dt}")));
        }
        let sample_every = self.run.sample_every.unwrap_or(1);
        if sample_every == 0 {
            return Err(CliError::Config("run.sample_every must be >= 1".into()));
        }
        Ok(Schedule {
            duration,
            dt,
            sample_every,
        })
    }

    pub fn oracle_times(&self) -> Result<Vec<f64>, CliError> {
        let times = self.run.times.clone().ok_or_else(|| missing("run.times"))?;
        if times.is_empty() {
            return Err(CliError::Config("run.times must not be empty".into()));
        }
        if let Some(t) = times.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
            return Err(CliError::Config(format!("run.times entries must be >= 0, got {t}")));
        }
        Ok(times)
    }
}

impl InitSpec {
    fn require<T: Copy>(&self, value: Option<T>, key: &str) -> Result<T, CliError> {
        value.ok_or_else(|| {
            CliError::Config(format!("init preset {:?} needs key `{key}`", self.preset))
        })
    }

    /// Builds `(u₀, v₀)`; relative file paths resolve against `base`.
    pub fn build(&self, grid: GridSpec, base: &Path) -> Result<(ScalarField, TravelerField), CliError> {
        let u = match self.preset {
            Preset::Uniform => uniform(grid, self.require(self.value, "value")?)?,
            Preset::GaussianBlob => gaussian_blob(
                grid,
                {
                    let c = self.center.unwrap_or([0.0, 0.0]);
                    (c[0], c[1])
                },
                self.require(self.width, "width")?,
                self.mass.unwrap_or(1.0),
            )?,
            Preset::PointColumn => {
                let node = self.node.unwrap_or([grid.n() / 2, grid.n() / 2]);
                point_column(grid, (node[0], node[1]), self.mass.unwrap_or(1.0))?
            }
            Preset::File => {
                let path = self.path.as_ref().ok_or_else(|| {
                    CliError::Config("init preset File needs key `path`".into())
                })?;
                match load_snapshot(&base.join(path), grid)? {
                    Snapshot::Scalar(f) => f,
                    Snapshot::Traveler(_) => {
                        return Err(CliError::Config(format!(
                            "{} holds a traveler field; `path` expects a scalar field",
                            path.display()
                        )))
                    }
                }
            }
        };
        let v = match &self.traveler_path {
            None => TravelerField::zeros(grid, Frame::Eulerian),
            Some(path) => match load_snapshot(&base.join(path), grid)? {
                Snapshot::Traveler(v) if v.frame() == Frame::Eulerian => v,
                Snapshot::Traveler(v) => rhsim_core::grid::to_eulerian(&v)?,
                Snapshot::Scalar(_) => {
                    return Err(CliError::Config(format!(
                        "{} holds a scalar field; `traveler_path` expects a traveler field",
                        path.display()
                    )))
                }
            },
        };
        Ok((u, v))
    }
}

fn load_snapshot(path: &Path, grid: GridSpec) -> Result<Snapshot, CliError> {
    let snap = Snapshot::load(path)
        .map_err(|e| CliError::Config(format!("cannot load {}: {e}", path.display())))?;
    if snap.grid() != grid {
        return Err(CliError::Config(format!(
            "{} was written on a different grid",
            path.display()
        )));
    }
    Ok(snap)
}
