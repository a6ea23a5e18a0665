//! Build configuration, read from TOML.
//!
//! ```toml
//! [corpus]
//! path = "corpus.csv"       # relative paths resolve against the config file
//! format = "csv"            # csv | jsonl
//! rootlist = "roots.txt"
//!
//! [periods]
//! unit = "year"             # week | month | year
//! length = 1
//! # origin = "2000-01-01"   # default: earliest date truncated to the unit
//!
//! [fields]
//! edge_threshold = 0.1
//! symmetrization = "max"    # max | min
//! clustering = { mode = "cliques" }  # or { mode = "itemsets", min_support = 3 }
//!
//! [matching]
//! window = 1
//! policy = "best"           # best | all_above_floor
//!
//! [sea_level]
//! lambda = [0.0, 0.5, 1.0]  # a single number is accepted too
//!
//! [projection]
//! min_periods = 2
//!
//! [output]
//! path = "out/phylomemy.json"
//! diagnostics = false
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{CorpusFormat, PeriodSpec, PeriodUnit};
use crate::error::{Error, Result};
use crate::fields::{ClusteringMode, FieldConfig};
use crate::matching::MatchConfig;
use crate::projection::ProjectionConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusConfig {
    pub path: PathBuf,
    #[serde(default = "default_format")]
    pub format: CorpusFormat,
    pub rootlist: PathBuf,
}

fn default_format() -> CorpusFormat {
    CorpusFormat::Csv
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Lambdas {
    One(f64),
    Many(Vec<f64>),
}

impl Lambdas {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Lambdas::One(l) => vec![*l],
            Lambdas::Many(ls) => ls.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeaLevelConfig {
    pub lambda: Lambdas,
}

impl Default for SeaLevelConfig {
    fn default() -> Self {
        SeaLevelConfig {
            lambda: Lambdas::One(0.5),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    /// Export file. With several λ values, `{stem}.lambda-{λ}.json` next to it.
    pub path: PathBuf,
    /// Also write graphs, links and the rise trace next to the export.
    #[serde(default)]
    pub diagnostics: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuildConfig {
    pub corpus: CorpusConfig,
    #[serde(default = "default_periods")]
    pub periods: PeriodSpec,
    #[serde(default)]
    pub fields: FieldConfig,
    #[serde(default)]
    pub matching: MatchConfig,
    #[serde(default)]
    pub sea_level: SeaLevelConfig,
    #[serde(default)]
    pub projection: ProjectionConfig,
    pub output: OutputConfig,
}

fn default_periods() -> PeriodSpec {
    PeriodSpec::new(PeriodUnit::Year, 1, None)
}

impl BuildConfig {
    pub fn new(
        corpus: impl Into<PathBuf>,
        rootlist: impl Into<PathBuf>,
        output: impl Into<PathBuf>,
    ) -> Self {
        BuildConfig {
            corpus: CorpusConfig {
                path: corpus.into(),
                format: default_format(),
                rootlist: rootlist.into(),
            },
            periods: default_periods(),
            fields: FieldConfig::default(),
            matching: MatchConfig::default(),
            sea_level: SeaLevelConfig::default(),
            projection: ProjectionConfig::default(),
            output: OutputConfig {
                path: output.into(),
                diagnostics: false,
            },
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a config file; relative paths inside it resolve against its
    /// directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut config.corpus.path,
            &mut config.corpus.rootlist,
            &mut config.output.path,
        ] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(config)
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.sea_level.lambda.values()
    }

    /// Every problem found without touching anything but the input paths.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let lambdas = self.lambdas();
        if lambdas.is_empty() {
            out.push("at least one λ is required".to_string());
        }
        for l in lambdas {
            if !(0.0..=1.0).contains(&l) {
                out.push(format!("λ must lie in [0, 1], got {l}"));
            }
        }
        if self.projection.min_periods < 1 {
            out.push("min_periods must be ≥ 1".to_string());
        }
        if self.matching.window < 1 {
            out.push("window must be ≥ 1".to_string());
        }
        if self.periods.length < 1 {
            out.push("period length must be ≥ 1".to_string());
        }
        let theta = self.fields.edge_threshold;
        if !(0.0..=1.0).contains(&theta) {
            out.push(format!("edge_threshold must lie in [0, 1], got {theta}"));
        }
        if let ClusteringMode::Itemsets { min_support } = self.fields.clustering {
            if min_support < 1 {
                out.push("itemsets min_support must be ≥ 1".to_string());
            }
        }
        if self.fields.max_cliques < 1 {
            out.push("max_cliques must be ≥ 1".to_string());
        }
        if !(0.0..1.0).contains(&self.matching.floor) {
            out.push(format!(
                "matching floor must lie in [0, 1), got {}",
                self.matching.floor
            ));
        }
        for (what, path) in [
            ("corpus", &self.corpus.path),
            ("rootlist", &self.corpus.rootlist),
        ] {
            if !path.is_file() {
                out.push(format!("{what} file not found: {}", path.display()));
            }
        }
        if self.output.path.as_os_str().is_empty() {
            out.push("output path is empty".to_string());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let problems = self.problems();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems.join("; ")))
        }
    }

    /// Export path for one λ of this build.
    pub fn output_for(&self, lambda: f64) -> PathBuf {
        if self.lambdas().len() <= 1 {
            return self.output.path.clone();
        }
        let path = &self.output.path;
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("phylomemy");
        path.with_file_name(format!("{stem}.lambda-{lambda:.3}.json"))
    }

    /// The parameters as echoed in export metadata. Paths are reduced to
    /// file names so the echo does not depend on where the build ran.
    pub fn echo(&self, lambda: f64) -> serde_json::Value {
        let mut c = self.clone();
        let name = |p: &Path| PathBuf::from(p.file_name().unwrap_or_default());
        c.corpus.path = name(&c.corpus.path);
        c.corpus.rootlist = name(&c.corpus.rootlist);
        c.output.path = PathBuf::new();
        c.sea_level.lambda = Lambdas::One(lambda);
        let mut value = serde_json::to_value(c).expect("config serializes");
        if let Some(map) = value.as_object_mut() {
            map.remove("output");
        }
        value
    }
}
