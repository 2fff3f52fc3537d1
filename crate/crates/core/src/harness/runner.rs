//! Seeded trial execution.
//!
//! Every trial draws its channel from a seed derived from
//! `(master_seed, scenario_id, trial_index)`, so results do not depend on how
//! trials are scheduled across workers. Each algorithm gets its own stream
//! derived from the trial seed and its algorithm tag only; SS-US variants that
//! differ in `L` or `α` therefore share bases and stay nested.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, ScenarioPoint, Variant};
use super::report::{aggregate, AggregateReport};
use crate::channel::{generate_iid_rayleigh, ChannelMatrix};
use crate::error::{Error, Result};
use crate::metrics::set_sum_se;
use crate::numerics::{subset_count, OpLedger};
use crate::seeding;
use crate::selectors::{select, Algorithm, EXHAUSTIVE_SUBSET_CAP, MCORE_MAX_ANTENNAS};

const CHANNEL_STREAM_TAG: u64 = 0;

/// Successful outcome of one algorithm on one trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellRecord {
    pub selected: Vec<usize>,
    pub k_b: usize,
    pub sum_se: f64,
    /// Selection cost only; scoring the chosen set is not charged.
    pub ledger: OpLedger,
    pub wall_us: Option<f64>,
}

/// A failed cell carries the error message.
pub type CellOutcome = std::result::Result<CellRecord, String>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub scenario_id: usize,
    pub trial_index: usize,
    pub seed: u64,
    pub channel_fingerprint: u64,
    /// One entry per variant, in variant order.
    pub cells: Vec<CellOutcome>,
}

pub fn trial_seed(master_seed: u64, scenario_id: usize, trial_index: usize) -> u64 {
    seeding::derive_seed(master_seed, &[scenario_id as u64, trial_index as u64])
}

/// Channel seen by every algorithm in the given trial.
pub fn trial_channel(
    point: &ScenarioPoint,
    master_seed: u64,
    trial_index: usize,
) -> Result<ChannelMatrix> {
    let seed = trial_seed(master_seed, point.id, trial_index);
    generate_iid_rayleigh(
        point.antennas,
        point.users,
        &mut seeding::stream(seed, &[CHANNEL_STREAM_TAG]),
    )
}

/// Reason a variant cannot run on a scenario at all, if any.
pub fn infeasibility(point: &ScenarioPoint, variant: &Variant) -> Option<String> {
    match variant.algorithm {
        Algorithm::McorePlus if point.antennas > MCORE_MAX_ANTENNAS => Some(format!(
            "mcore_plus limited to M <= {MCORE_MAX_ANTENNAS}, got M = {}",
            point.antennas
        )),
        Algorithm::Exhaustive => {
            let k = point.k_max.min(point.antennas).min(point.users) as u64;
            match subset_count(point.users as u64, k) {
                Ok(n) if n <= EXHAUSTIVE_SUBSET_CAP.into() => None,
                Ok(n) => Some(format!(
                    "exhaustive search over {n} subsets exceeds cap {EXHAUSTIVE_SUBSET_CAP}"
                )),
                Err(e) => Some(e.to_string()),
            }
        }
        _ => None,
    }
}

fn run_cell(
    h: &ChannelMatrix,
    point: &ScenarioPoint,
    variant: &Variant,
    seed: u64,
    wall_time: bool,
) -> CellOutcome {
    let rng_seed = seeding::derive_seed(seed, &[variant.algorithm.stream_tag()]);
    let cfg = variant.selection_config(point, rng_seed);
    let mut ledger = OpLedger::new();
    let start = wall_time.then(Instant::now);
    let result = select(h, &cfg, point.n0, &mut ledger).map_err(|e| e.to_string())?;
    let wall_us = start.map(|s| s.elapsed().as_secs_f64() * 1e6);
    let sum_se = set_sum_se(h, &result.selected, point.n0, &mut OpLedger::new())
        .map_err(|e| format!("scoring selected set: {e}"))?;
    Ok(CellRecord {
        k_b: result.k_b(),
        selected: result.selected,
        sum_se,
        ledger,
        wall_us,
    })
}

/// Runs every variant on one freshly drawn channel.
///
/// Selector failures are recorded per cell; only channel generation errors
/// abort the trial.
pub fn run_trial(
    point: &ScenarioPoint,
    variants: &[Variant],
    master_seed: u64,
    trial_index: usize,
    wall_time: bool,
) -> Result<TrialReport> {
    let seed = trial_seed(master_seed, point.id, trial_index);
    let h = trial_channel(point, master_seed, trial_index)?;
    let cells = variants
        .iter()
        .map(|v| match infeasibility(point, v) {
            Some(reason) => Err(reason),
            None => run_cell(&h, point, v, seed, wall_time),
        })
        .collect();
    Ok(TrialReport {
        scenario_id: point.id,
        trial_index,
        seed,
        channel_fingerprint: h.fingerprint(),
        cells,
    })
}

/// Everything produced by a run: the grid, the raw trials ordered by
/// `(scenario_id, trial_index)`, and the aggregate rows.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub points: Vec<ScenarioPoint>,
    pub variants: Vec<Variant>,
    pub trials: Vec<TrialReport>,
    pub report: AggregateReport,
}

impl RunOutput {
    pub fn trials_for(&self, scenario_id: usize) -> impl Iterator<Item = &TrialReport> {
        self.trials
            .iter()
            .filter(move |t| t.scenario_id == scenario_id)
    }

    /// Index of the first variant matching the predicate.
    pub fn variant_index(&self, pred: impl Fn(&Variant) -> bool) -> Option<usize> {
        self.variants.iter().position(pred)
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))
}

/// Runs all trials of the given points on `workers` threads (0 = one per
/// core) and aggregates them.
pub fn run_points(
    cfg: &ExperimentConfig,
    points: Vec<ScenarioPoint>,
    workers: usize,
) -> Result<RunOutput> {
    cfg.validate()?;
    let variants = cfg.variants();
    let jobs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| (0..cfg.trials).map(move |t| (p, t)))
        .collect();
    let trials = pool(workers)?.install(|| {
        jobs.par_iter()
            .map(|&(p, t)| run_trial(&points[p], &variants, cfg.master_seed, t, cfg.wall_time))
            .collect::<Result<Vec<_>>>()
    })?;
    let report = aggregate(&points, &variants, &trials);
    Ok(RunOutput {
        points,
        variants,
        trials,
        report,
    })
}

/// Monte Carlo evaluation of a single scenario.
pub fn run_monte_carlo(cfg: &ExperimentConfig, workers: usize) -> Result<RunOutput> {
    let points = cfg.scenarios()?;
    if points.len() != 1 {
        return Err(Error::Config(format!(
            "monte carlo run needs exactly one scenario, config describes {}; use a sweep",
            points.len()
        )));
    }
    run_points(cfg, points, workers)
}

/// Full cross product of the configured grid.
pub fn sweep(cfg: &ExperimentConfig, workers: usize) -> Result<RunOutput> {
    let points = cfg.scenarios()?;
    run_points(cfg, points, workers)
}

/// Per-variant comparison against the exhaustive optimum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleRow {
    pub scenario_id: usize,
    pub algorithm: Algorithm,
    #[serde(rename = "M")]
    pub antennas: usize,
    #[serde(rename = "U")]
    pub users: usize,
    #[serde(rename = "L")]
    pub bases: Option<usize>,
    pub alpha: Option<f64>,
    pub trials: usize,
    pub mean_ratio: Option<f64>,
    pub min_ratio: Option<f64>,
    /// Trials where the heuristic scored strictly above the oracle.
    pub violations: usize,
}

/// Runs the configured heuristics next to the exhaustive oracle.
pub fn oracle_check(cfg: &ExperimentConfig, workers: usize) -> Result<Vec<OracleRow>> {
    let mut cfg = cfg.clone();
    cfg.algorithms.retain(|a| *a != Algorithm::Exhaustive);
    cfg.algorithms.push(Algorithm::Exhaustive);
    let points = cfg.scenarios()?;
    let oracle = Variant::new(Algorithm::Exhaustive);
    for p in &points {
        if let Some(reason) = infeasibility(p, &oracle) {
            return Err(Error::Config(format!("scenario {}: {reason}", p.id)));
        }
    }
    let out = run_points(&cfg, points, workers)?;
    let oracle_idx = out.variants.len() - 1;

    let mut rows = Vec::new();
    for p in &out.points {
        for (vi, v) in out.variants[..oracle_idx].iter().enumerate() {
            let mut ratios = Vec::new();
            let mut violations = 0;
            for t in out.trials_for(p.id) {
                if let (Ok(c), Ok(o)) = (&t.cells[vi], &t.cells[oracle_idx]) {
                    if c.sum_se > o.sum_se {
                        violations += 1;
                    }
                    ratios.push(c.sum_se / o.sum_se);
                }
            }
            let n = ratios.len();
            rows.push(OracleRow {
                scenario_id: p.id,
                algorithm: v.algorithm,
                antennas: p.antennas,
                users: p.users,
                bases: v.bases,
                alpha: v.alpha,
                trials: n,
                mean_ratio: (n > 0).then(|| ratios.iter().sum::<f64>() / n as f64),
                min_ratio: ratios.iter().copied().reduce(f64::min),
                violations,
            });
        }
    }
    Ok(rows)
}
