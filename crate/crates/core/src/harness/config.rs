//! Experiment configuration and its flat key-value file format.
//!
//! ```text
//! # comments start with '#'
//! grid.antennas = 4, 8
//! grid.users = 20, 50, 100
//!
//! [ssus]            # a section header prefixes the keys that follow
//! bases = 1, 10, 100
//! alpha = 0.45, 0.65
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::LinkBudget;
use crate::error::{Error, Result};
use crate::selectors::{Algorithm, SelectionConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown output format '{other}'"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

/// Full experiment description: a scenario grid, the algorithm variants run
/// on every channel of that grid, and run controls.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub antennas: Vec<usize>,
    pub users: Vec<usize>,
    pub p0_dbm: Vec<f64>,
    pub bandwidth_hz: f64,
    pub noise_figure_db: f64,
    pub algorithms: Vec<Algorithm>,
    pub bases: Vec<usize>,
    pub alphas: Vec<f64>,
    pub sus_epsilon: f64,
    /// Stream cap; `None` means `M` for each scenario.
    pub k_max: Option<usize>,
    pub trials: usize,
    pub master_seed: u64,
    /// Record per-selection wall time. Off by default so output stays
    /// reproducible byte for byte.
    pub wall_time: bool,
    pub output_path: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            antennas: vec![4, 8],
            users: vec![20, 50, 100],
            p0_dbm: vec![-90.0, -95.0],
            bandwidth_hz: 20e6,
            noise_figure_db: 5.0,
            algorithms: vec![
                Algorithm::Ssus,
                Algorithm::Sus,
                Algorithm::Gzf,
                Algorithm::McorePlus,
                Algorithm::Random,
            ],
            bases: vec![10],
            alphas: vec![SelectionConfig::DEFAULT_ALPHA],
            sus_epsilon: SelectionConfig::DEFAULT_SUS_EPSILON,
            k_max: None,
            trials: 1000,
            master_seed: 1,
            wall_time: false,
            output_path: None,
            format: OutputFormat::Csv,
        }
    }
}

/// One cell of the scenario grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioPoint {
    pub id: usize,
    pub antennas: usize,
    pub users: usize,
    pub p0_dbm: f64,
    pub k_max: usize,
    /// Normalised noise power derived from the link budget.
    pub n0: f64,
}

/// One algorithm with its tunables, run on every trial of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Variant {
    pub algorithm: Algorithm,
    pub bases: Option<usize>,
    pub alpha: Option<f64>,
    pub sus_epsilon: f64,
}

impl Variant {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            bases: None,
            alpha: None,
            sus_epsilon: SelectionConfig::DEFAULT_SUS_EPSILON,
        }
    }

    pub fn ssus(bases: usize, alpha: f64) -> Self {
        Self {
            bases: Some(bases),
            alpha: Some(alpha),
            ..Self::new(Algorithm::Ssus)
        }
    }

    pub fn selection_config(&self, point: &ScenarioPoint, rng_seed: u64) -> SelectionConfig {
        let mut cfg = SelectionConfig::new(self.algorithm, point.k_max)
            .with_sus_epsilon(self.sus_epsilon)
            .with_seed(rng_seed);
        if let Some(l) = self.bases {
            cfg = cfg.with_bases(l);
        }
        if let Some(a) = self.alpha {
            cfg = cfg.with_alpha(a);
        }
        cfg
    }

    /// Effective stream cap reported for this variant.
    pub fn effective_k(&self, point: &ScenarioPoint) -> usize {
        match self.algorithm {
            Algorithm::Random => point.k_max.min(point.antennas).min(point.users),
            _ => point.k_max,
        }
    }
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| Error::Config(format!("{key}: cannot parse '{s}'")))
        })
        .collect()
}

fn parse_one<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| Error::Config(format!("{key}: cannot parse '{}'", value.trim())))
}

impl ExperimentConfig {
    /// One default scenario: 4 antennas, 20 users, −90 dBm.
    pub fn single_default() -> Self {
        Self {
            antennas: vec![4],
            users: vec![20],
            p0_dbm: vec![-90.0],
            ..Self::default()
        }
    }

    /// Parses the key-value format on top of `self` (usually the defaults).
    pub fn apply_text(mut self, text: &str) -> Result<Self> {
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            let key = key.trim();
            let full = if section.is_empty() || key.contains('.') {
                key.to_string()
            } else {
                format!("{section}.{key}")
            };
            self.set(&full, value)?;
        }
        Ok(self)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::default().apply_text(text)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "grid.antennas" => self.antennas = parse_list(key, value)?,
            "grid.users" => self.users = parse_list(key, value)?,
            "grid.p0_dbm" => self.p0_dbm = parse_list(key, value)?,
            "link.bandwidth_hz" => self.bandwidth_hz = parse_one(key, value)?,
            "link.noise_figure_db" => self.noise_figure_db = parse_one(key, value)?,
            "select.algorithms" => {
                self.algorithms = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        s.parse::<Algorithm>()
                            .map_err(|e| Error::Config(format!("{key}: {e}")))
                    })
                    .collect::<Result<_>>()?
            }
            "select.k_max" => {
                let v = value.trim();
                self.k_max = if v.is_empty() || v.eq_ignore_ascii_case("auto") {
                    None
                } else {
                    Some(parse_one(key, v)?)
                }
            }
            "ssus.bases" => self.bases = parse_list(key, value)?,
            "ssus.alpha" => self.alphas = parse_list(key, value)?,
            "sus.epsilon" => self.sus_epsilon = parse_one(key, value)?,
            "run.trials" => self.trials = parse_one(key, value)?,
            "run.master_seed" => self.master_seed = parse_one(key, value)?,
            "run.wall_time" => self.wall_time = parse_one(key, value)?,
            "output.path" => {
                let v = value.trim();
                self.output_path = (!v.is_empty()).then(|| PathBuf::from(v));
            }
            "output.format" => self.format = value.parse()?,
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.trials == 0 {
            return fail("run.trials must be at least 1".into());
        }
        for (name, empty) in [
            ("grid.antennas", self.antennas.is_empty()),
            ("grid.users", self.users.is_empty()),
            ("grid.p0_dbm", self.p0_dbm.is_empty()),
            ("select.algorithms", self.algorithms.is_empty()),
            ("ssus.bases", self.bases.is_empty()),
            ("ssus.alpha", self.alphas.is_empty()),
        ] {
            if empty {
                return fail(format!("{name} must not be empty"));
            }
        }
        if self.antennas.contains(&0) || self.users.contains(&0) {
            return fail("antenna and user counts must be at least 1".into());
        }
        if let Some(k) = self.k_max {
            if k == 0 {
                return fail("select.k_max must be at least 1".into());
            }
            if let Some(&m) = self.antennas.iter().find(|&&m| k > m) {
                return fail(format!("select.k_max = {k} exceeds M = {m}"));
            }
        }
        if self.bases.contains(&0) {
            return fail("ssus.bases entries must be at least 1".into());
        }
        if let Some(a) = self.alphas.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
            return fail(format!("ssus.alpha entries must lie in (0, 1), got {a}"));
        }
        if !(self.sus_epsilon > 0.0 && self.sus_epsilon < 1.0) {
            return fail(format!(
                "sus.epsilon must lie in (0, 1), got {}",
                self.sus_epsilon
            ));
        }
        if self.p0_dbm.iter().any(|p| !p.is_finite()) || !self.noise_figure_db.is_finite() {
            return fail("power levels must be finite".into());
        }
        LinkBudget::new(0.0, self.bandwidth_hz, self.noise_figure_db)
            .map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    /// Cross product of antennas × users × P0, in that nesting order.
    pub fn scenarios(&self) -> Result<Vec<ScenarioPoint>> {
        self.validate()?;
        let mut out = Vec::new();
        for &m in &self.antennas {
            for &u in &self.users {
                for &p0 in &self.p0_dbm {
                    let budget = LinkBudget::new(p0, self.bandwidth_hz, self.noise_figure_db)?;
                    out.push(ScenarioPoint {
                        id: out.len(),
                        antennas: m,
                        users: u,
                        p0_dbm: p0,
                        k_max: self.k_max.unwrap_or(m),
                        n0: budget.noise_power(),
                    });
                }
            }
        }
        Ok(out)
    }

    /// Algorithm variants; SS-US expands over bases × alpha.
    pub fn variants(&self) -> Vec<Variant> {
        let mut out = Vec::new();
        for &a in &self.algorithms {
            if a == Algorithm::Ssus {
                for &l in &self.bases {
                    for &alpha in &self.alphas {
                        out.push(Variant {
                            sus_epsilon: self.sus_epsilon,
                            ..Variant::ssus(l, alpha)
                        });
                    }
                }
            } else {
                out.push(Variant {
                    sus_epsilon: self.sus_epsilon,
                    ..Variant::new(a)
                });
            }
        }
        out
    }
}
