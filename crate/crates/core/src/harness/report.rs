//! Aggregation of trial records and CSV/JSON emission.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{OutputFormat, ScenarioPoint, Variant};
use super::runner::{infeasibility, TrialReport};
use crate::error::{Error, Result};
use crate::selectors::Algorithm;

/// CSV header, in column order.
pub const CSV_COLUMNS: [&str; 14] = [
    "scenario_id",
    "algorithm",
    "M",
    "U",
    "K_max",
    "L",
    "alpha",
    "p0_dbm",
    "trials",
    "mean_se",
    "stderr_se",
    "mean_kb",
    "mean_macs",
    "mean_wall_us",
];

/// Running mean and squared-deviation sum; partitions merge exactly as if
/// the samples had been pushed in one pass.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Accumulator {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Accumulator) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * (self.n as f64 * other.n as f64) / n as f64;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> Option<f64> {
        (self.n > 0).then_some(self.mean)
    }

    /// Sample variance; zero for a single sample.
    pub fn variance(&self) -> Option<f64> {
        match self.n {
            0 => None,
            1 => Some(0.0),
            n => Some(self.m2 / (n - 1) as f64),
        }
    }

    pub fn std_error(&self) -> Option<f64> {
        self.variance().map(|v| (v / self.n as f64).sqrt())
    }
}

impl FromIterator<f64> for Accumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut a = Accumulator::default();
        iter.into_iter().for_each(|x| a.push(x));
        a
    }
}

/// One (scenario, variant) cell of the result table.
///
/// `trials` counts successful trials. A skipped row has `trials = 0`, empty
/// statistics and a reason; the reason and the failure count are carried in
/// JSON only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub scenario_id: usize,
    pub algorithm: Algorithm,
    #[serde(rename = "M")]
    pub antennas: usize,
    #[serde(rename = "U")]
    pub users: usize,
    #[serde(rename = "K_max")]
    pub k_max: usize,
    #[serde(rename = "L")]
    pub bases: Option<usize>,
    pub alpha: Option<f64>,
    pub p0_dbm: f64,
    pub trials: usize,
    pub mean_se: Option<f64>,
    pub stderr_se: Option<f64>,
    pub mean_kb: Option<f64>,
    pub mean_macs: Option<f64>,
    pub mean_wall_us: Option<f64>,
    #[serde(default)]
    pub failures: usize,
    #[serde(default)]
    pub skipped: Option<String>,
}

impl AggregateRow {
    fn rounded(&self) -> Self {
        let r = |x: Option<f64>| x.map(round_sig12);
        Self {
            alpha: r(self.alpha),
            p0_dbm: round_sig12(self.p0_dbm),
            mean_se: r(self.mean_se),
            stderr_se: r(self.stderr_se),
            mean_kb: r(self.mean_kb),
            mean_macs: r(self.mean_macs),
            mean_wall_us: r(self.mean_wall_us),
            ..self.clone()
        }
    }

    fn csv_record(&self) -> Vec<String> {
        let f = |x: Option<f64>| x.map(fmt_num).unwrap_or_default();
        vec![
            self.scenario_id.to_string(),
            self.algorithm.name().to_string(),
            self.antennas.to_string(),
            self.users.to_string(),
            self.k_max.to_string(),
            self.bases.map(|l| l.to_string()).unwrap_or_default(),
            f(self.alpha),
            fmt_num(self.p0_dbm),
            self.trials.to_string(),
            f(self.mean_se),
            f(self.stderr_se),
            f(self.mean_kb),
            f(self.mean_macs),
            f(self.mean_wall_us),
        ]
    }
}

/// Rounds to 12 significant digits.
pub fn round_sig12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Shortest decimal form of `x` rounded to 12 significant digits.
pub fn fmt_num(x: f64) -> String {
    let v = round_sig12(x);
    if v == 0.0 {
        "0".to_string()
    } else {
        v.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AggregateReport {
    pub rows: Vec<AggregateRow>,
}

impl AggregateReport {
    /// Rows whose trials were all recorded, i.e. not skipped.
    pub fn completed(&self) -> impl Iterator<Item = &AggregateRow> {
        self.rows.iter().filter(|r| r.skipped.is_none())
    }

    pub fn find(&self, pred: impl Fn(&AggregateRow) -> bool) -> Option<&AggregateRow> {
        self.rows.iter().find(|r| pred(r))
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let fmt_err = |e: csv::Error| Error::Format(e.to_string());
        w.write_record(CSV_COLUMNS).map_err(fmt_err)?;
        for row in &self.rows {
            w.write_record(row.csv_record()).map_err(fmt_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        let rows: Vec<AggregateRow> = self.rows.iter().map(AggregateRow::rounded).collect();
        let mut s =
            serde_json::to_string_pretty(&rows).map_err(|e| Error::Format(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let headers = r.headers().map_err(|e| Error::Format(e.to_string()))?;
        if headers.iter().ne(CSV_COLUMNS) {
            return Err(Error::Format(format!("unexpected CSV header: {headers:?}")));
        }
        let rows = r
            .deserialize()
            .collect::<std::result::Result<Vec<AggregateRow>, _>>()
            .map_err(|e| Error::Format(e.to_string()))?;
        Ok(Self { rows })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rows = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        Ok(Self { rows })
    }

    /// Writes the rendered report to `path`.
    pub fn emit(&self, format: OutputFormat, path: &Path) -> Result<()> {
        let text = self.render(format)?;
        let io = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut f = std::fs::File::create(path).map_err(io)?;
        f.write_all(text.as_bytes()).map_err(io)
    }
}

/// Per-cell accumulators for one (scenario, variant) pair.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CellStats {
    pub se: Accumulator,
    pub kb: Accumulator,
    pub macs: Accumulator,
    pub wall_us: Accumulator,
    pub failures: usize,
}

impl CellStats {
    pub fn record(&mut self, trial: &TrialReport, variant_index: usize) {
        match &trial.cells[variant_index] {
            Ok(c) => {
                self.se.push(c.sum_se);
                self.kb.push(c.k_b as f64);
                self.macs.push(c.ledger.complex_macs as f64);
                if let Some(w) = c.wall_us {
                    self.wall_us.push(w);
                }
            }
            Err(_) => self.failures += 1,
        }
    }

    pub fn merge(&mut self, other: &CellStats) {
        self.se.merge(&other.se);
        self.kb.merge(&other.kb);
        self.macs.merge(&other.macs);
        self.wall_us.merge(&other.wall_us);
        self.failures += other.failures;
    }
}

fn row_for(
    point: &ScenarioPoint,
    variant: &Variant,
    stats: &CellStats,
    skipped: Option<String>,
) -> AggregateRow {
    AggregateRow {
        scenario_id: point.id,
        algorithm: variant.algorithm,
        antennas: point.antennas,
        users: point.users,
        k_max: variant.effective_k(point),
        bases: variant.bases,
        alpha: variant.alpha,
        p0_dbm: point.p0_dbm,
        trials: stats.se.count() as usize,
        mean_se: stats.se.mean(),
        stderr_se: stats.se.std_error(),
        mean_kb: stats.kb.mean(),
        mean_macs: stats.macs.mean(),
        mean_wall_us: stats.wall_us.mean(),
        failures: stats.failures,
        skipped,
    }
}

/// Folds trials into one row per (scenario, variant), in grid order.
/// Trials are consumed in the order given, which callers keep sorted by
/// `(scenario_id, trial_index)`.
pub fn aggregate(
    points: &[ScenarioPoint],
    variants: &[Variant],
    trials: &[TrialReport],
) -> AggregateReport {
    let mut stats = vec![vec![CellStats::default(); variants.len()]; points.len()];
    let slot: std::collections::HashMap<usize, usize> =
        points.iter().enumerate().map(|(i, p)| (p.id, i)).collect();
    for t in trials {
        let Some(&pi) = slot.get(&t.scenario_id) else {
            continue;
        };
        for (vi, s) in stats[pi].iter_mut().enumerate() {
            s.record(t, vi);
        }
    }

    let mut rows = Vec::with_capacity(points.len() * variants.len());
    for (p, per_variant) in points.iter().zip(&stats) {
        for (v, s) in variants.iter().zip(per_variant) {
            let skipped = infeasibility(p, v);
            let s = if skipped.is_some() {
                CellStats::default()
            } else {
                *s
            };
            rows.push(row_for(p, v, &s, skipped));
        }
    }
    AggregateReport { rows }
}
