//! TOML scenario files.
//!
//! ```toml
//! name = "dolphin"
//! outputs = "results"          # relative to the config file
//! phantoms_per_expert = 1
//! raster_format = "both"       # csv | pgm | both
//! raster_steps = 12
//!
//! [target]                     # or: target = "target.txt"
//! labels = ["C1", "C2", "C3", "C4", "C5"]
//! rows = [[0, 1, 0, -1, 0], ...]
//!
//! [[experts]]
//! name = "e1"
//! weight = 0.5
//! drop = ["C1"]                # or: matrix = {...} / pretrained = {...}
//!
//! [train]
//! loss = "squared_error"
//! learning_rate = 0.05
//! phantom_init = { kind = "uniform_symmetric", half_width = 0.1 }
//!
//! [evaluation]
//! n_initials = 10000
//! seed = 7
//! exhaustive = false
//! ```

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{FcmError, Result};
use crate::fcm::EdgeMatrix;
use crate::format::read_matrix;
use crate::mixing::check_convex;
use crate::phantom::TrainConfig;

/// A matrix given inline or as a path to a matrix text file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSource {
    File(PathBuf),
    Inline {
        labels: Vec<String>,
        rows: Vec<Vec<f64>>,
    },
}

impl MatrixSource {
    pub fn inline(m: &EdgeMatrix) -> Self {
        MatrixSource::Inline {
            labels: m.labels().to_vec(),
            rows: m.rows(),
        }
    }

    pub fn load(&self, base: &Path) -> Result<EdgeMatrix> {
        match self {
            MatrixSource::File(p) => read_matrix(&resolve(base, p)),
            MatrixSource::Inline { labels, rows } => EdgeMatrix::from_rows(labels.clone(), rows),
        }
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpertSpec {
    pub name: String,
    pub weight: f64,
    /// Target nodes this expert leaves out.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub drop: Vec<String>,
    /// Explicit expert matrix over target nodes, instead of `drop`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixSource>,
    /// Phantom names; generated from the expert position when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phantoms: Option<Vec<String>>,
    /// Already-augmented matrix. Its nodes outside the target are phantoms
    /// and training is skipped.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pretrained: Option<MatrixSource>,
}

impl ExpertSpec {
    pub fn dropping(name: &str, weight: f64, drop: &[&str]) -> Self {
        ExpertSpec {
            name: name.to_string(),
            weight,
            drop: drop.iter().map(|s| s.to_string()).collect(),
            matrix: None,
            phantoms: None,
            pretrained: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationConfig {
    /// Random binary initial states drawn when not exhaustive.
    pub n_initials: usize,
    pub max_steps: usize,
    pub seed: u64,
    /// Evaluate every binary state of the target instead of sampling.
    pub exhaustive: bool,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        EvaluationConfig {
            n_initials: 10_000,
            max_steps: 1_000,
            seed: 1,
            exhaustive: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RasterFormat {
    Csv,
    Pgm,
    #[default]
    Both,
}

impl RasterFormat {
    pub fn csv(self) -> bool {
        matches!(self, RasterFormat::Csv | RasterFormat::Both)
    }

    pub fn pgm(self) -> bool {
        matches!(self, RasterFormat::Pgm | RasterFormat::Both)
    }
}

impl std::str::FromStr for RasterFormat {
    type Err = FcmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(RasterFormat::Csv),
            "pgm" => Ok(RasterFormat::Pgm),
            "both" => Ok(RasterFormat::Both),
            other => Err(FcmError::Config(format!(
                "unknown raster format `{other}` (expected csv, pgm or both)"
            ))),
        }
    }
}

fn default_name() -> String {
    "scenario".into()
}

fn default_phantoms() -> usize {
    1
}

fn default_raster_steps() -> usize {
    12
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_name")]
    pub name: String,
    /// Output directory, relative to the config file when loaded from disk.
    pub outputs: PathBuf,
    #[serde(default = "default_phantoms")]
    pub phantoms_per_expert: usize,
    #[serde(default)]
    pub raster_format: RasterFormat,
    #[serde(default = "default_raster_steps")]
    pub raster_steps: usize,
    pub target: MatrixSource,
    pub experts: Vec<ExpertSpec>,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default)]
    pub evaluation: EvaluationConfig,
    /// Directory relative paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| FcmError::Config(e.to_string()))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| FcmError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| FcmError::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_toml_string()?).map_err(|e| FcmError::io(path, e))
    }

    pub fn output_dir(&self) -> PathBuf {
        resolve(&self.base_dir, &self.outputs)
    }

    pub fn load_target(&self) -> Result<EdgeMatrix> {
        self.target.load(&self.base_dir)
    }

    /// Overrides both the training and evaluation seeds.
    pub fn set_seed(&mut self, seed: u64) {
        self.train.seed = seed;
        self.evaluation.seed = seed;
    }

    /// Phantom names for the expert at `index`.
    pub fn phantom_names(&self, index: usize) -> Vec<String> {
        if let Some(p) = &self.experts[index].phantoms {
            return p.clone();
        }
        let letter = phantom_letter(index);
        if self.phantoms_per_expert == 1 {
            vec![letter]
        } else {
            (1..=self.phantoms_per_expert)
                .map(|k| format!("{letter}{k}"))
                .collect()
        }
    }

    /// Checks everything that can be checked without running the scenario.
    pub fn validate(&self) -> Result<()> {
        let target = self.load_target()?;
        if self.experts.is_empty() {
            return Err(FcmError::Config(
                "scenario needs at least one expert".into(),
            ));
        }
        if self.phantoms_per_expert == 0 {
            return Err(FcmError::Config(
                "phantoms_per_expert must be at least 1".into(),
            ));
        }
        if self.raster_steps == 0 || self.evaluation.max_steps == 0 {
            return Err(FcmError::Config(
                "raster_steps and evaluation.max_steps must be at least 1".into(),
            ));
        }
        if !self.evaluation.exhaustive && self.evaluation.n_initials == 0 {
            return Err(FcmError::Config(
                "evaluation.n_initials must be at least 1".into(),
            ));
        }
        self.train.validate()?;
        let weights: Vec<f64> = self.experts.iter().map(|e| e.weight).collect();
        check_convex(&weights).map_err(|e| FcmError::Config(format!("expert weights: {e}")))?;
        let mut names = HashSet::new();
        let mut phantoms = HashSet::new();
        for (i, ex) in self.experts.iter().enumerate() {
            if ex.name.is_empty()
                || ex.name == "mixture"
                || ex.name == "target"
                || !ex
                    .name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
            {
                return Err(FcmError::Config(format!(
                    "expert name `{}` must be alphanumeric (with - or _) and not `mixture` or `target`",
                    ex.name
                )));
            }
            if !names.insert(ex.name.as_str()) {
                return Err(FcmError::Config(format!(
                    "duplicate expert name `{}`",
                    ex.name
                )));
            }
            let sources = [
                !ex.drop.is_empty(),
                ex.matrix.is_some(),
                ex.pretrained.is_some(),
            ];
            if sources.iter().filter(|&&b| b).count() > 1 {
                return Err(FcmError::Config(format!(
                    "expert `{}`: use only one of drop, matrix or pretrained",
                    ex.name
                )));
            }
            for d in &ex.drop {
                if target.index_of(d).is_none() {
                    return Err(FcmError::Config(format!(
                        "expert `{}` drops `{d}`, which is not a target node",
                        ex.name
                    )));
                }
            }
            if ex.drop.len() >= target.dim() {
                return Err(FcmError::Config(format!(
                    "expert `{}` drops every target node",
                    ex.name
                )));
            }
            let own: Vec<String> = match (&ex.matrix, &ex.pretrained) {
                (Some(m), _) => {
                    let m = m.load(&self.base_dir)?;
                    if let Some(l) = m.labels().iter().find(|l| target.index_of(l).is_none()) {
                        return Err(FcmError::Config(format!(
                            "expert `{}` uses node `{l}`, which is not a target node",
                            ex.name
                        )));
                    }
                    self.phantom_names(i)
                }
                (None, Some(p)) => {
                    let p = p.load(&self.base_dir)?;
                    p.labels()
                        .iter()
                        .filter(|l| target.index_of(l).is_none())
                        .cloned()
                        .collect()
                }
                (None, None) => self.phantom_names(i),
            };
            for p in own {
                if target.index_of(&p).is_some() {
                    return Err(FcmError::Config(format!(
                        "phantom `{p}` of expert `{}` collides with a target node",
                        ex.name
                    )));
                }
                if !phantoms.insert(p.clone()) {
                    return Err(FcmError::Config(format!(
                        "phantom `{p}` is used by more than one expert"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `A`, `B`, ..., `Z`, `AA`, `AB`, ...
fn phantom_letter(mut i: usize) -> String {
    let mut s = Vec::new();
    loop {
        s.push(b'A' + (i % 26) as u8);
        if i < 26 {
            break;
        }
        i = i / 26 - 1;
    }
    s.reverse();
    String::from_utf8(s).expect("ascii")
}
