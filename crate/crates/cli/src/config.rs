//! Scenario files: a JSON object with `model`, `initial`, `run` and `output`
//! blocks. Only `model` is required.
//!
//! ```json
//! {
//!   "model":   { "n_sites": 2, "eta": 10, "preset": "xy" },
//!   "initial": { "site": 1, "e_spin": "up", "static": "down-down" },
//!   "run":     { "hamiltonian": "exact", "t_max": 30, "n_points": 2001 },
//!   "output":  { "path": "fig2.csv", "columns": ["F_plus", "F_minus"] }
//! }
//! ```

use std::path::PathBuf;

use hopspin_core::dynamics::{
    AnalyticLattice, CouplingModel, HamiltonianKind, TimeGrid, DEFAULT_POINTS, DEFAULT_T_MAX,
};
use hopspin_core::model::{encode_state, ModelError};
use hopspin_core::{BasisLayout, EffectiveVariant, ModelSpec, Spin, StateVector, StaticPreset};
use serde::Deserialize;
use serde_json::error::Category;
use thiserror::Error;

use crate::table::Column;

/// η/J values swept by `compare` when the config lists none.
pub const DEFAULT_RATIOS: [f64; 4] = [1.0, 2.0, 10.0, 100.0];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid config at line {line}, column {column}: {message}")]
    Schema {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{field}: {message}")]
    Field {
        field: &'static str,
        message: String,
    },
}

impl ConfigError {
    fn field(field: &'static str, message: impl Into<String>) -> Self {
        ConfigError::Field {
            field,
            message: message.into(),
        }
    }

    /// Offending key for semantic errors.
    pub fn field_name(&self) -> Option<&'static str> {
        match self {
            ConfigError::Field { field, .. } => Some(field),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingPreset {
    /// `J_XY = j`, `J_z = 0`.
    Xy,
    /// `J_z = j`, `J_XY = j/2`.
    Heisenberg,
    /// Explicit `j_xy` and `j_z`.
    Custom,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: RawModel,
    #[serde(default)]
    initial: RawInitial,
    #[serde(default)]
    run: RawRun,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    n_sites: usize,
    eta: f64,
    preset: CouplingPreset,
    j: Option<f64>,
    j_xy: Option<f64>,
    j_z: Option<f64>,
    /// Site labels carrying static spins 1 and 2.
    attachments: Option<[usize; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawInitial {
    site: usize,
    e_spin: String,
    #[serde(rename = "static")]
    statics: String,
}

impl Default for RawInitial {
    fn default() -> Self {
        Self {
            site: 1,
            e_spin: "up".into(),
            statics: "down-down".into(),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    hamiltonian: Option<String>,
    t_max: Option<f64>,
    n_points: Option<usize>,
    ratios: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<PathBuf>,
    columns: Option<Vec<String>>,
}

/// Initial product state, with the site given by its conventional label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialSpec {
    pub site_label: usize,
    pub e_spin: Spin,
    pub statics: StaticPreset,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    /// Selected observable columns in canonical order, `t` first.
    pub columns: Vec<Column>,
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub preset: CouplingPreset,
    pub spec: ModelSpec,
    pub initial: InitialSpec,
    pub hamiltonian: HamiltonianKind,
    pub grid: TimeGrid,
    pub ratios: Vec<f64>,
    pub output: OutputSpec,
}

impl ScenarioConfig {
    pub fn layout(&self) -> BasisLayout {
        self.spec.layout().expect("validated n_sites")
    }

    pub fn initial_state(&self) -> StateVector {
        let layout = self.layout();
        let site = layout
            .site_from_label(self.initial.site_label)
            .expect("validated site");
        encode_state(&layout, site, self.initial.e_spin, self.initial.statics)
            .expect("validated site")
    }

    /// Effective variant for `compare`: the configured one, or the natural
    /// choice for the lattice when the run is exact.
    pub fn comparison_variant(&self) -> EffectiveVariant {
        match self.hamiltonian {
            HamiltonianKind::Effective(v) => v,
            HamiltonianKind::Exact if self.spec.n_sites == 2 => EffectiveVariant::TwoSite,
            HamiltonianKind::Exact => EffectiveVariant::ThreeSiteMiddleStart,
        }
    }

    /// Closed-form model matching the couplings, if there is one.
    pub fn analytic_model(&self) -> Result<CouplingModel, ConfigError> {
        let (jxy, jz) = (self.spec.j_xy, self.spec.j_z);
        if jz == 0.0 && jxy != 0.0 {
            Ok(CouplingModel::Xy)
        } else if jz != 0.0 && close(jz, 2.0 * jxy) {
            Ok(CouplingModel::Heisenberg)
        } else {
            Err(ConfigError::field(
                "model.preset",
                "closed-form solutions exist only for xy or heisenberg couplings",
            ))
        }
    }

    pub fn analytic_lattice(&self) -> AnalyticLattice {
        if self.spec.n_sites == 2 {
            AnalyticLattice::TwoSite
        } else {
            AnalyticLattice::ThreeSiteMiddleStart
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| {
        let (line, column, message) = (e.line(), e.column(), e.to_string());
        match e.classify() {
            Category::Data => ConfigError::Schema {
                line,
                column,
                message,
            },
            _ => ConfigError::Syntax {
                line,
                column,
                message,
            },
        }
    })?;
    raw.validate()
}

impl RawModel {
    fn couplings(&self) -> Result<(f64, f64), ConfigError> {
        match self.preset {
            CouplingPreset::Xy => {
                if let Some(jz) = self.j_z.filter(|&jz| jz != 0.0) {
                    return Err(ConfigError::field(
                        "model.j_z",
                        format!("xy preset requires j_z = 0, got {jz}"),
                    ));
                }
                let j = agree("model.j_xy", &[self.j, self.j_xy])?.unwrap_or(1.0);
                Ok((j, 0.0))
            }
            CouplingPreset::Heisenberg => {
                if let (Some(jxy), Some(jz)) = (self.j_xy, self.j_z) {
                    if !close(jz, 2.0 * jxy) {
                        return Err(ConfigError::field(
                            "model.j_z",
                            format!(
                                "heisenberg preset requires j_z = 2*j_xy, got j_xy={jxy}, j_z={jz}"
                            ),
                        ));
                    }
                }
                let j = agree("model.j", &[self.j, self.j_z, self.j_xy.map(|x| 2.0 * x)])?
                    .unwrap_or(1.0);
                Ok((0.5 * j, j))
            }
            CouplingPreset::Custom => {
                if self.j.is_some() {
                    return Err(ConfigError::field(
                        "model.j",
                        "custom preset takes j_xy and j_z instead",
                    ));
                }
                let jxy = self
                    .j_xy
                    .ok_or_else(|| ConfigError::field("model.j_xy", "required by custom preset"))?;
                let jz = self
                    .j_z
                    .ok_or_else(|| ConfigError::field("model.j_z", "required by custom preset"))?;
                Ok((jxy, jz))
            }
        }
    }
}

/// The common value of all given entries, or an error naming `field`.
fn agree(field: &'static str, values: &[Option<f64>]) -> Result<Option<f64>, ConfigError> {
    let mut given = values.iter().flatten();
    let Some(&first) = given.next() else {
        return Ok(None);
    };
    match given.find(|&&v| !close(v, first)) {
        Some(other) => Err(ConfigError::field(
            field,
            format!("conflicting coupling strengths {first} and {other}"),
        )),
        None => Ok(Some(first)),
    }
}

fn model_error(e: ModelError) -> ConfigError {
    let field = match &e {
        ModelError::UnsupportedSites(_) => "model.n_sites",
        ModelError::InvalidHopping(_) => "model.eta",
        ModelError::InvalidCoupling { name: "j_xy", .. } => "model.j_xy",
        ModelError::InvalidCoupling { .. } => "model.j_z",
        ModelError::InvalidAttachments(_) => "model.attachments",
        _ => "model",
    };
    ConfigError::field(field, e.to_string())
}

impl RawConfig {
    fn validate(self) -> Result<ScenarioConfig, ConfigError> {
        let m = &self.model;
        let layout = BasisLayout::new(m.n_sites).map_err(model_error)?;
        let (j_xy, j_z) = m.couplings()?;
        let mut spec = ModelSpec::custom(m.n_sites, m.eta, j_xy, j_z);
        if let Some([a, b]) = m.attachments {
            let site = |label| {
                layout
                    .site_from_label(label)
                    .map_err(|e| ConfigError::field("model.attachments", e.to_string()))
            };
            spec = spec.with_attachments([site(a)?, site(b)?]);
        }
        spec.validate().map_err(model_error)?;

        let i = &self.initial;
        layout
            .site_from_label(i.site)
            .map_err(|e| ConfigError::field("initial.site", e.to_string()))?;
        let initial = InitialSpec {
            site_label: i.site,
            e_spin: Spin::from_label(&i.e_spin)
                .map_err(|e| ConfigError::field("initial.e_spin", e.to_string()))?,
            statics: StaticPreset::from_label(&i.statics)
                .map_err(|e| ConfigError::field("initial.static", e.to_string()))?,
        };

        let hamiltonian = match self.run.hamiltonian.as_deref() {
            None | Some("exact") => HamiltonianKind::Exact,
            Some(label) => {
                let v = EffectiveVariant::from_label(label)
                    .map_err(|e| ConfigError::field("run.hamiltonian", e.to_string()))?;
                if v.n_sites() != m.n_sites {
                    return Err(ConfigError::field(
                        "run.hamiltonian",
                        format!("{v} needs a {}-site lattice", v.n_sites()),
                    ));
                }
                HamiltonianKind::Effective(v)
            }
        };

        let n_points = self.run.n_points.unwrap_or(DEFAULT_POINTS);
        if n_points < 2 {
            return Err(ConfigError::field("run.n_points", "must be at least 2"));
        }
        let grid = TimeGrid::new(self.run.t_max.unwrap_or(DEFAULT_T_MAX), n_points)
            .map_err(|e| ConfigError::field("run.t_max", e.to_string()))?;

        let ratios = self.run.ratios.unwrap_or_else(|| DEFAULT_RATIOS.to_vec());
        if ratios.is_empty() || ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(ConfigError::field(
                "run.ratios",
                "expected a non-empty list of positive numbers",
            ));
        }

        let all = Column::all(m.n_sites);
        let columns = match self.output.columns {
            None => all,
            Some(names) => {
                for name in &names {
                    if Column::parse(name, m.n_sites).is_none() {
                        return Err(ConfigError::field(
                            "output.columns",
                            format!("unknown column `{name}`"),
                        ));
                    }
                }
                all.into_iter()
                    .filter(|c| *c == Column::T || names.iter().any(|n| *n == c.name()))
                    .collect()
            }
        };

        Ok(ScenarioConfig {
            preset: m.preset,
            spec,
            initial,
            hamiltonian,
            grid,
            ratios,
            output: OutputSpec {
                path: self.output.path,
                columns,
            },
        })
    }
}
