//! Study designs and their plain-text configuration format.
//!
//! ```text
//! # comments start with '#'
//! sample_sizes = 50, 100, 150, 200, 250, 500
//! replications = 100
//! link = blockmodel
//! seed = 20240501
//! estimators = matched, naive, infeasible, with_controls
//! bandwidth = default        # or a positive number
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::distance::{BandwidthRule, Kernel};
use crate::error::{Error, Result};
use crate::estimators::{EstimatorConfig, ProbClip};
use crate::link::{GridLink, LinkFunction};
use crate::model::{SocialInfluence, TrueParameters};

pub const DEFAULT_SAMPLE_SIZES: [usize; 6] = [50, 100, 150, 200, 250, 500];
pub const DEFAULT_REPLICATIONS: usize = 100;
pub const DEFAULT_SEED: u64 = 20240501;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Matched,
    Naive,
    Infeasible,
    WithControls,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 4] = [
        EstimatorKind::Matched,
        EstimatorKind::Naive,
        EstimatorKind::Infeasible,
        EstimatorKind::WithControls,
    ];

    pub fn key(self) -> &'static str {
        match self {
            EstimatorKind::Matched => "matched",
            EstimatorKind::Naive => "naive",
            EstimatorKind::Infeasible => "infeasible",
            EstimatorKind::WithControls => "with_controls",
        }
    }

    /// Column label used in rendered tables.
    pub fn label(self) -> &'static str {
        match self {
            EstimatorKind::Matched => "Matched",
            EstimatorKind::Naive => "Naive",
            EstimatorKind::Infeasible => "Infeasible",
            EstimatorKind::WithControls => "WithControls",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        EstimatorKind::ALL
            .into_iter()
            .find(|k| k.key() == norm || k.label().to_ascii_lowercase() == norm)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown estimator `{s}`; expected one of matched, naive, infeasible, with_controls"
                ))
            })
    }
}

#[derive(Debug, Clone)]
pub struct StudyDesign {
    pub sample_sizes: Vec<usize>,
    pub replications: usize,
    pub link: LinkFunction,
    pub params: TrueParameters,
    pub estimators: Vec<EstimatorKind>,
    pub master_seed: u64,
    pub config: EstimatorConfig,
}

impl StudyDesign {
    /// Defaults of the reference simulation with the given link function.
    pub fn new(link: LinkFunction) -> Self {
        StudyDesign {
            sample_sizes: DEFAULT_SAMPLE_SIZES.to_vec(),
            replications: DEFAULT_REPLICATIONS,
            link,
            params: TrueParameters::default(),
            estimators: EstimatorKind::ALL.to_vec(),
            master_seed: DEFAULT_SEED,
            config: EstimatorConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications < 1 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.sample_sizes.is_empty() {
            return Err(Error::Config("at least one sample size is required".into()));
        }
        if let Some(n) = self.sample_sizes.iter().find(|&&n| n < 10) {
            return Err(Error::Config(format!("sample sizes must be at least 10, got {n}")));
        }
        if self.replications > u32::MAX as usize {
            return Err(Error::Config("too many replications".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::Config("at least one estimator is required".into()));
        }
        self.config.validate()
    }

    /// Estimators in canonical table order, without duplicates.
    pub fn ordered_estimators(&self) -> Vec<EstimatorKind> {
        EstimatorKind::ALL
            .into_iter()
            .filter(|k| self.estimators.contains(k))
            .collect()
    }
}

impl Default for StudyDesign {
    fn default() -> Self {
        StudyDesign::new(LinkFunction::Blockmodel)
    }
}

pub const DESIGN_KEYS: [&str; 11] = [
    "sample_sizes",
    "replications",
    "link",
    "grid",
    "seed",
    "estimators",
    "bandwidth",
    "kernel",
    "clip",
    "lambda",
    "beta",
];

fn list<T: FromStr>(value: &str, key: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Config(format!("invalid entry `{s}` for `{key}`")))
        })
        .collect()
}

fn scalar<T: FromStr>(value: &str, key: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

/// Reads a grid link from a CSV of `m` rows with `m` values each (no header).
pub fn read_grid_link(path: &Path) -> Result<LinkFunction> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut values = Vec::new();
    let mut rows = 0;
    for (ln, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        rows += 1;
        for (col, cell) in line.split(',').enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                file: path.to_path_buf(),
                line: ln as u64 + 1,
                column: col as u64 + 1,
                message: format!("invalid grid value `{}`", cell.trim()),
            })?;
            values.push(v);
        }
    }
    Ok(LinkFunction::Grid(Arc::new(GridLink::new(rows, values)?)))
}

/// Parses a design file. Unset keys keep the reference defaults; relative
/// grid paths resolve against `base_dir`.
pub fn parse_design(text: &str, base_dir: Option<&Path>) -> Result<StudyDesign> {
    let mut design = StudyDesign::default();
    let mut link_name: Option<String> = None;
    let mut grid_path: Option<String> = None;
    let mut beta: Option<Vec<f64>> = None;
    let mut lambda = SocialInfluence::Reference;

    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected `key = value`, got `{line}`", ln + 1))
        })?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "sample_sizes" => design.sample_sizes = list(value, key)?,
            "replications" => design.replications = scalar(value, key)?,
            "link" => link_name = Some(value.to_string()),
            "grid" => grid_path = Some(value.to_string()),
            "seed" => design.master_seed = scalar(value, key)?,
            "estimators" => design.estimators = list(value, key)?,
            "bandwidth" => {
                design.config.kernel.bandwidth = match value.to_ascii_lowercase().as_str() {
                    "default" | "standard" => BandwidthRule::Standard,
                    _ => BandwidthRule::Fixed(scalar(value, key)?),
                };
                design.config.kernel.bandwidth.bandwidth(100)?;
            }
            "kernel" => design.config.kernel.kernel = value.parse::<Kernel>()?,
            "clip" => {
                design.config.prob_clip = match value.to_ascii_lowercase().as_str() {
                    "auto" => ProbClip::Auto,
                    _ => ProbClip::Fixed(scalar(value, key)?),
                };
            }
            "lambda" => lambda = value.parse()?,
            "beta" => beta = Some(list(value, key)?),
            other => {
                return Err(Error::Config(format!(
                    "line {}: unknown key `{other}`; valid keys are {}",
                    ln + 1,
                    DESIGN_KEYS.join(", ")
                )))
            }
        }
    }

    design.link = match link_name.as_deref() {
        None => LinkFunction::Blockmodel,
        Some(name) if name.eq_ignore_ascii_case("grid") => {
            let rel = grid_path
                .ok_or_else(|| Error::Config("link = grid needs a `grid = <csv path>` key".into()))?;
            let path = match base_dir {
                Some(b) if Path::new(&rel).is_relative() => b.join(rel),
                _ => Path::new(&rel).to_path_buf(),
            };
            read_grid_link(&path)?
        }
        Some(name) => name.parse()?,
    };
    design.params = TrueParameters::new(beta.unwrap_or_else(|| vec![1.0]), lambda)?;
    design.validate()?;
    Ok(design)
}

/// Renders a design in the configuration format. Grid links cannot be
/// rendered inline.
pub fn render_design(design: &StudyDesign) -> String {
    let join = |v: Vec<String>| v.join(", ");
    let bandwidth = match design.config.kernel.bandwidth {
        BandwidthRule::Standard => "default".to_string(),
        BandwidthRule::Fixed(h) => h.to_string(),
    };
    let clip = match design.config.prob_clip {
        ProbClip::Auto => "auto".to_string(),
        ProbClip::Fixed(c) => c.to_string(),
    };
    format!(
        "sample_sizes = {}\nreplications = {}\nlink = {}\nseed = {}\nestimators = {}\nbandwidth = {}\nkernel = epanechnikov\nclip = {}\nlambda = {}\nbeta = {}\n",
        join(design.sample_sizes.iter().map(|n| n.to_string()).collect()),
        design.replications,
        design.link.name(),
        design.master_seed,
        join(design.estimators.iter().map(|e| e.key().to_string()).collect()),
        bandwidth,
        clip,
        design.params.lambda.name(),
        join(design.params.beta.iter().map(|b| b.to_string()).collect()),
    )
}
