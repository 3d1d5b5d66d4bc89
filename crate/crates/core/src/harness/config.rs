//! Experiment configuration: one TOML file, overridden by `key=value` pairs
//! with dotted keys.
//!
//! ```toml
//! experiment = "orbit"
//! model = "de-sitter-2"
//! t_grid = [8.0, 10.0, 12.0]
//! seed = 7
//!
//! [points]
//! count = 10
//! region = [[-0.5, 0.5], [0.0, 6.283]]
//!
//! [phi]
//! kind = "box"
//! lo = [-1.0, 0.0]
//! hi = [1.0, 6.3]
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::{CyclicGenerator, Family, GroupSpec};
use crate::sampling::{NormalizationMode, DEFAULT_MAX_ELEMENTS};
use crate::spaces::{Point, SpaceKind, SpaceModel, TestFunction};
use crate::volumes::{self, RealMatrix, StabilizerKind, StabilizerModel};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    /// Ball enumeration or counting.
    EnumBall,
    /// Ball counts on a grid with a growth fit.
    Growth,
    /// Haar (and skew) volumes of a stabilizer with a growth fit.
    Volumes,
    /// Θ kernel estimates for pairs of sections.
    Theta,
    /// Normalized orbit averages.
    Orbit,
    /// Ratio averages `Σφ/Σψ`.
    Ratio,
    /// Convergence reports with limit and rate fits.
    Report,
    /// The acceptance suite.
    Accept,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::EnumBall,
        Experiment::Growth,
        Experiment::Volumes,
        Experiment::Theta,
        Experiment::Orbit,
        Experiment::Ratio,
        Experiment::Report,
        Experiment::Accept,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::EnumBall => "enum-ball",
            Experiment::Growth => "growth",
            Experiment::Volumes => "volumes",
            Experiment::Theta => "theta",
            Experiment::Orbit => "orbit",
            Experiment::Ratio => "ratio",
            Experiment::Report => "report",
            Experiment::Accept => "accept",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| {
            let names: Vec<_> = Experiment::ALL.iter().map(|e| e.name()).collect();
            Error::config("experiment", format!("unknown experiment {s:?}, expected one of {names:?}"))
        })
    }
}

/// Base points: explicit ambient coordinates, or `count` seeded draws from a
/// chart box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointsConfig {
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default)]
    pub region: Vec<[f64; 2]>,
    #[serde(default)]
    pub explicit: Vec<Vec<f64>>,
}

fn default_count() -> usize {
    10
}

impl Default for PointsConfig {
    fn default() -> Self {
        Self {
            count: default_count(),
            region: Vec::new(),
            explicit: Vec::new(),
        }
    }
}

/// A section `s(x)` given by its parameters: `[]` is the identity, `[r]` the
/// de Sitter boost to time coordinate `sinh r`, `[w₁, w₂]` an affine
/// translation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionPair {
    #[serde(default)]
    pub g1: Vec<f64>,
    #[serde(default)]
    pub g2: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VolumesConfig {
    pub ambient_dim: Option<usize>,
    pub k_nodes: Option<usize>,
    pub mc_samples: Option<u64>,
    #[serde(default)]
    pub pairs: Vec<SectionPair>,
}

impl Default for VolumesConfig {
    fn default() -> Self {
        Self {
            ambient_dim: None,
            k_nodes: None,
            mc_samples: None,
            pairs: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetConfig {
    #[serde(default = "default_max_elements")]
    pub max_elements: u64,
    #[serde(default = "default_stage_seconds")]
    pub max_stage_seconds: f64,
}

fn default_max_elements() -> u64 {
    DEFAULT_MAX_ELEMENTS
}

fn default_stage_seconds() -> f64 {
    900.0
}

impl Default for BudgetConfig {
    fn default() -> Self {
        Self {
            max_elements: default_max_elements(),
            max_stage_seconds: default_stage_seconds(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcceptConfig {
    /// Criterion numbers to run; empty runs all of them.
    #[serde(default)]
    pub criteria: Vec<u32>,
    /// Rerun the suite with another worker count and compare outputs.
    #[serde(default = "yes")]
    pub rerun: bool,
}

fn yes() -> bool {
    true
}

impl Default for AcceptConfig {
    fn default() -> Self {
        Self { criteria: Vec::new(), rerun: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Lattice family (enum-ball, growth).
    pub family: Option<Family>,
    /// Homogeneous-space model (orbit, ratio, report).
    pub model: Option<SpaceKind>,
    /// Generator of the cyclic-solvable group.
    pub generator: Option<[[i64; 2]; 2]>,
    /// Affine SL₂(ℤ) density exponent used by predictions.
    pub affine_exponent: Option<f64>,
    /// Stabilizer model (volumes, theta).
    pub stabilizer: Option<StabilizerKind>,
    /// A single height, used when `t_grid` is empty.
    pub t: Option<f64>,
    #[serde(default)]
    pub t_grid: Vec<f64>,
    #[serde(default = "default_normalization")]
    pub normalization: NormalizationMode,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; 0 uses the machine default.
    #[serde(default)]
    pub workers: usize,
    pub out: Option<PathBuf>,
    /// enum-ball: print the count instead of materializing the ball.
    #[serde(default)]
    pub count_only: bool,
    #[serde(default)]
    pub points: PointsConfig,
    pub phi: Option<TestFunction>,
    pub psi: Option<TestFunction>,
    #[serde(default)]
    pub volumes: VolumesConfig,
    #[serde(default)]
    pub budget: BudgetConfig,
    #[serde(default)]
    pub accept: AcceptConfig,
}

fn default_normalization() -> NormalizationMode {
    NormalizationMode::Model
}

/// Splits `key=value`.
pub fn parse_override(s: &str) -> Result<(String, String)> {
    match s.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(Error::config(s, "overrides have the form key=value")),
    }
}

/// A TOML value, or a bare string when the text is not valid TOML.
fn parse_value(text: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {text}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(text.to_string()))
}

fn set_dotted(table: &mut toml::Table, key: &str, value: toml::Value) -> Result<()> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::config(key, "empty key segment"));
    }
    let mut cur = table;
    for part in &parts[..parts.len() - 1] {
        let entry = cur
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Error::config(key, format!("`{part}` is not a table")))?;
    }
    cur.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

impl ExperimentConfig {
    /// Builds a config from an optional file, the experiment name and
    /// overrides applied in order, then validates it.
    pub fn load(file: Option<&Path>, experiment: Option<&str>, overrides: &[(String, String)]) -> Result<Self> {
        let mut table = match file {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::config("config", format!("cannot read {}: {e}", path.display())))?;
                toml::from_str::<toml::Table>(&text).map_err(|e| Error::config("config", e.message().to_string()))?
            }
            None => toml::Table::new(),
        };
        if let Some(name) = experiment {
            table.insert("experiment".into(), toml::Value::String(name.to_string()));
        }
        for (k, v) in overrides {
            set_dotted(&mut table, k, parse_value(v))?;
        }
        Self::from_table(table)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table = toml::from_str::<toml::Table>(text).map_err(|e| Error::config("config", e.message().to_string()))?;
        Self::from_table(table)
    }

    fn from_table(table: toml::Table) -> Result<Self> {
        let cfg: Self = serde_path_to_error::deserialize(toml::Value::Table(table)).map_err(|e| {
            let key = e.path().to_string();
            let key = if key == "." { "config".to_string() } else { key };
            Error::config(key, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// The fully-resolved config as TOML.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("config", e.to_string()))
    }

    /// Heights: `t_grid`, or `[t]`.
    pub fn heights(&self) -> Vec<f64> {
        if self.t_grid.is_empty() {
            self.t.into_iter().collect()
        } else {
            self.t_grid.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.t {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::config("t", format!("must be finite and non-negative, got {t}")));
            }
        }
        for (i, &t) in self.t_grid.iter().enumerate() {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::config(format!("t_grid[{i}]"), format!("must be finite and non-negative, got {t}")));
            }
            if i > 0 && t <= self.t_grid[i - 1] {
                return Err(Error::config("t_grid", "must be strictly increasing"));
            }
        }
        if self.budget.max_elements == 0 {
            return Err(Error::config("budget.max_elements", "must be positive"));
        }
        if !(self.budget.max_stage_seconds > 0.0) {
            return Err(Error::config("budget.max_stage_seconds", "must be positive"));
        }
        if let Some(p) = self.affine_exponent {
            if !(p.is_finite() && p >= 0.0) {
                return Err(Error::config("affine_exponent", "must be finite and non-negative"));
            }
        }
        if let Some(g) = self.generator {
            CyclicGenerator::new(g).map_err(|e| Error::config("generator", e.to_string()))?;
        }
        for (key, f) in [("phi", &self.phi), ("psi", &self.psi)] {
            if let Some(f) = f {
                f.validate().map_err(|e| match e {
                    Error::Config { key: k, reason } => Error::config(k.replacen("phi", key, 1), reason),
                    e => e,
                })?;
            }
        }
        if let Some(c) = self.accept.criteria.iter().find(|&&c| !(1..=13).contains(&c)) {
            return Err(Error::config("accept.criteria", format!("no criterion {c}")));
        }
        use Experiment::*;
        let needs_t = matches!(self.experiment, EnumBall | Growth | Volumes | Theta | Orbit | Ratio | Report);
        if needs_t && self.heights().is_empty() {
            return Err(Error::config("t_grid", format!("{} needs `t` or `t_grid`", self.experiment)));
        }
        match self.experiment {
            EnumBall | Growth => {
                self.group_spec()?;
            }
            Volumes | Theta => {
                self.stabilizer_model()?;
                if self.experiment == Theta && self.volumes.pairs.is_empty() {
                    return Err(Error::config("volumes.pairs", "theta needs at least one pair of sections"));
                }
            }
            Orbit | Ratio | Report => {
                let model = self.space_model()?;
                if self.phi.is_none() {
                    return Err(Error::config("phi", format!("{} needs a test function", self.experiment)));
                }
                if self.experiment == Ratio && self.psi.is_none() {
                    return Err(Error::config("psi", "ratio needs a second test function"));
                }
                if self.points.explicit.is_empty() && self.points.region.len() != model.kind.chart_dim() {
                    return Err(Error::config(
                        "points.region",
                        format!("{} chart has {} coordinates ({:?})", model.id(), model.kind.chart_dim(), model.kind.chart_names()),
                    ));
                }
                if self.experiment == Report && self.heights().len() < 6 {
                    return Err(Error::config("t_grid", "report needs at least 6 heights"));
                }
            }
            Accept => {}
        }
        Ok(())
    }

    pub fn group_spec(&self) -> Result<GroupSpec> {
        let family = self.family.ok_or_else(|| Error::config("family", "missing"))?;
        Ok(match family {
            Family::CyclicSolvable => GroupSpec::cyclic_solvable(self.generator.unwrap_or([[2, 1], [1, 1]]))?,
            f => GroupSpec::new(f),
        })
    }

    pub fn space_model(&self) -> Result<SpaceModel> {
        let kind = self.model.ok_or_else(|| Error::config("model", "missing"))?;
        let mut model = match kind {
            SpaceKind::AffineSolvable => SpaceModel::affine_solvable(self.generator.unwrap_or([[2, 1], [1, 1]]))?,
            k => SpaceModel::new(k),
        };
        if let Some(p) = self.affine_exponent {
            model = model.with_affine_exponent(p);
        }
        Ok(model)
    }

    pub fn stabilizer_model(&self) -> Result<StabilizerModel> {
        let kind = self.stabilizer.ok_or_else(|| Error::config("stabilizer", "missing"))?;
        let dim = self.volumes.ambient_dim;
        let wrap = |e: Error| Error::config("volumes.ambient_dim", e.to_string());
        let mut m = match kind {
            StabilizerKind::So11 => StabilizerModel::so11(dim.unwrap_or(2)).map_err(wrap)?,
            StabilizerKind::So12 => {
                if dim.is_some_and(|d| d != 4) {
                    return Err(Error::config("volumes.ambient_dim", "SO12 lives in 4×4 matrices"));
                }
                StabilizerModel::so12()
            }
            StabilizerKind::Sl2r => StabilizerModel::sl2r(dim.unwrap_or(2)).map_err(wrap)?,
            StabilizerKind::Torus => {
                StabilizerModel::torus(CyclicGenerator::new(self.generator.unwrap_or([[2, 1], [1, 1]]))?)?
            }
        };
        m = m.with_seed(self.seed);
        if let Some(n) = self.volumes.k_nodes {
            if n == 0 {
                return Err(Error::config("volumes.k_nodes", "must be positive"));
            }
            m = m.with_k_nodes(n);
        }
        if let Some(n) = self.volumes.mc_samples {
            if n == 0 {
                return Err(Error::config("volumes.mc_samples", "must be positive"));
            }
            m = m.with_mc_samples(n);
        }
        Ok(m)
    }

    /// Section matrix from its parameters, in the layout of `model`.
    pub fn section(model: &StabilizerModel, params: &[f64], key: &str) -> Result<RealMatrix> {
        match params.len() {
            0 => RealMatrix::identity(model.ambient_dim),
            1 => volumes::de_sitter_section(model.ambient_dim, params[0]).map_err(|e| Error::config(key, e.to_string())),
            2 if model.ambient_dim == 3 => Ok(volumes::affine_translation([params[0], params[1]])),
            _ => Err(Error::config(key, "sections are [], [r] or [w1, w2] (3×3 models)")),
        }
    }

    /// Base points, explicit or drawn from `points.region` with `seed`.
    pub fn base_points(&self, model: &SpaceModel) -> Result<Vec<Point>> {
        if !self.points.explicit.is_empty() {
            return self
                .points
                .explicit
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let key = format!("points.explicit[{i}]");
                    if c.len() != model.kind.point_dim() {
                        return Err(Error::config(key, format!("{} points have {} coordinates", model.id(), model.kind.point_dim())));
                    }
                    let p = Point::new(c);
                    model.validate(&p).map_err(|e| Error::config(key, e.to_string()))?;
                    Ok(p)
                })
                .collect();
        }
        let region: Vec<(f64, f64)> = self.points.region.iter().map(|r| (r[0], r[1])).collect();
        crate::sampling::sample_points(model, &region, self.points.count, self.seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orbit_toml() -> &'static str {
        r#"
experiment = "orbit"
model = "de-sitter-2"
t_grid = [4.0, 5.0]
seed = 3
[points]
count = 2
region = [[-0.5, 0.5], [0.0, 6.0]]
[phi]
kind = "box"
lo = [-1.0, 0.0]
hi = [1.0, 6.3]
"#
    }

    #[test]
    fn parses_and_round_trips() {
        let cfg = ExperimentConfig::from_toml_str(orbit_toml()).unwrap();
        assert_eq!(cfg.experiment, Experiment::Orbit);
        assert_eq!(cfg.model, Some(SpaceKind::DeSitter2));
        assert_eq!(cfg.budget.max_elements, DEFAULT_MAX_ELEMENTS);
        let back = ExperimentConfig::from_toml_str(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn negative_t_names_the_key() {
        let err = ExperimentConfig::load(None, Some("enum-ball"), &[
            ("family".into(), "sl2z".into()),
            ("t".into(), "-1".into()),
        ])
        .unwrap_err();
        assert!(matches!(&err, Error::Config { key, .. } if key == "t"), "{err}");
        let err = ExperimentConfig::load(None, Some("growth"), &[
            ("family".into(), "sl2z".into()),
            ("t_grid".into(), "[1.0, -2.0]".into()),
        ])
        .unwrap_err();
        assert!(matches!(&err, Error::Config { key, .. } if key == "t_grid[1]"), "{err}");
    }

    #[test]
    fn unknown_and_mistyped_keys_are_named() {
        let err = ExperimentConfig::from_toml_str("experiment = \"accept\"\nbogus = 1\n").unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
        let err = ExperimentConfig::load(None, Some("accept"), &[("points.count".into(), "\"many\"".into())]).unwrap_err();
        assert!(matches!(&err, Error::Config { key, .. } if key == "points.count"), "{err}");
        let err = ExperimentConfig::load(None, Some("accept"), &[("budget.max_elements".into(), "0".into())]).unwrap_err();
        assert!(matches!(&err, Error::Config { key, .. } if key == "budget.max_elements"), "{err}");
    }

    #[test]
    fn overrides_win_over_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, orbit_toml()).unwrap();
        let cfg = ExperimentConfig::load(Some(&path), None, &[
            parse_override("points.count=5").unwrap(),
            parse_override("phi.hi = [0.5, 6.3]").unwrap(),
            parse_override("normalization=raw").unwrap(),
        ])
        .unwrap();
        assert_eq!(cfg.points.count, 5);
        assert_eq!(cfg.normalization, NormalizationMode::Raw);
        assert_eq!(cfg.phi.unwrap().support_box()[0], (-1.0, 0.5));
        assert!(parse_override("novalue").is_err());
    }

    #[test]
    fn experiment_requirements() {
        let err = ExperimentConfig::load(None, Some("orbit"), &[("model".into(), "de-sitter-2".into()), ("t".into(), "3".into())])
            .unwrap_err();
        assert!(matches!(&err, Error::Config { key, .. } if key == "phi"), "{err}");
        let err = ExperimentConfig::load(None, Some("theta"), &[("stabilizer".into(), "so12".into()), ("t".into(), "3".into())])
            .unwrap_err();
        assert!(matches!(&err, Error::Config { key, .. } if key == "volumes.pairs"), "{err}");
        assert!(ExperimentConfig::load(None, Some("nope"), &[]).is_err());
    }

    #[test]
    fn points_from_region_are_seeded() {
        let cfg = ExperimentConfig::from_toml_str(orbit_toml()).unwrap();
        let model = cfg.space_model().unwrap();
        let a = cfg.base_points(&model).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a, cfg.base_points(&model).unwrap());
    }
}
