//! User-selection algorithms.
//!
//! All selectors take an `M × U` [`ChannelMatrix`] and return a
//! [`SelectionResult`] with at most `min(k_max, M, U)` distinct users.
//! User indices and basis direction indices are zero-based. Argmax ties are
//! always broken towards the lowest user index.

mod exhaustive;
mod gzf;
mod mcore;
mod random;
mod ssus;
mod sus;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::numerics::{norm_sqr, OpLedger};

pub use crate::metrics::single_stream_rate;
pub use exhaustive::{exhaustive_oracle, EXHAUSTIVE_SUBSET_CAP};
pub use gzf::gzf;
pub use mcore::{mcore_plus, MCORE_MAX_ANTENNAS};
pub use random::random_select;
pub use ssus::{basis_stream, ss_us, ss_us_basis};
pub use sus::sus;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Ssus,
    Sus,
    Gzf,
    McorePlus,
    Random,
    Exhaustive,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Ssus,
        Algorithm::Sus,
        Algorithm::Gzf,
        Algorithm::McorePlus,
        Algorithm::Random,
        Algorithm::Exhaustive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ssus => "ssus",
            Algorithm::Sus => "sus",
            Algorithm::Gzf => "gzf",
            Algorithm::McorePlus => "mcore_plus",
            Algorithm::Random => "random",
            Algorithm::Exhaustive => "exhaustive",
        }
    }

    /// Stable per-algorithm key for deriving its random stream.
    pub(crate) fn stream_tag(self) -> u64 {
        match self {
            Algorithm::Ssus => 1,
            Algorithm::Sus => 2,
            Algorithm::Gzf => 3,
            Algorithm::McorePlus => 4,
            Algorithm::Random => 5,
            Algorithm::Exhaustive => 6,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace(['-', '+'], "_");
        match norm.trim_end_matches('_') {
            "ssus" | "ss_us" => Ok(Algorithm::Ssus),
            "sus" => Ok(Algorithm::Sus),
            "gzf" => Ok(Algorithm::Gzf),
            "mcore_plus" | "mcore" => Ok(Algorithm::McorePlus),
            "random" => Ok(Algorithm::Random),
            "exhaustive" | "oracle" => Ok(Algorithm::Exhaustive),
            _ => Err(Error::InvalidArgument(format!("unknown algorithm '{s}'"))),
        }
    }
}

/// Algorithm choice plus every tunable a selector may read.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    pub algorithm: Algorithm,
    /// Number of parallel orthonormal bases (SS-US).
    pub num_bases: usize,
    /// Cone threshold `α = cos(γ/2)` (SS-US).
    pub alpha: f64,
    pub k_max: usize,
    /// Semi-orthogonality threshold (SUS).
    pub sus_epsilon: f64,
    pub rng_seed: u64,
}

impl SelectionConfig {
    pub const DEFAULT_ALPHA: f64 = 0.45;
    pub const DEFAULT_SUS_EPSILON: f64 = 0.3;

    pub fn new(algorithm: Algorithm, k_max: usize) -> Self {
        Self {
            algorithm,
            num_bases: 1,
            alpha: Self::DEFAULT_ALPHA,
            k_max,
            sus_epsilon: Self::DEFAULT_SUS_EPSILON,
            rng_seed: 0,
        }
    }

    pub fn with_bases(mut self, l: usize) -> Self {
        self.num_bases = l;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_sus_epsilon(mut self, eps: f64) -> Self {
        self.sus_epsilon = eps;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if self.num_bases == 0 {
            return bad("number of bases must be at least 1".into());
        }
        if self.k_max == 0 {
            return bad("k_max must be at least 1".into());
        }
        if !(self.sus_epsilon > 0.0 && self.sus_epsilon < 1.0) {
            return bad(format!(
                "sus_epsilon must lie in (0, 1), got {}",
                self.sus_epsilon
            ));
        }
        Ok(())
    }
}

/// Outcome of one selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    /// Selected users in selection order; the first is the seed user for
    /// seed-based selectors.
    pub selected: Vec<usize>,
    /// Per selected user: `Δ·r` for SS-US, the single-stream rate otherwise.
    pub weights: Vec<f64>,
    /// Basis column each user was matched to (SS-US only; seed → 0).
    pub matched_direction: Option<Vec<usize>>,
    /// Index of the winning basis (SS-US only).
    pub winning_basis: Option<usize>,
    /// Arithmetic mean of `weights`.
    pub mean_metric: f64,
}

impl SelectionResult {
    pub(crate) fn new(
        selected: Vec<usize>,
        weights: Vec<f64>,
        matched_direction: Option<Vec<usize>>,
        winning_basis: Option<usize>,
    ) -> Self {
        debug_assert_eq!(selected.len(), weights.len());
        let mean_metric = weights.iter().sum::<f64>() / weights.len() as f64;
        Self {
            selected,
            weights,
            matched_direction,
            winning_basis,
            mean_metric,
        }
    }

    /// Baseline result: weights are the users' single-stream rates.
    pub(crate) fn with_rates(h: &ChannelMatrix, selected: Vec<usize>, n0: f64) -> Self {
        let weights = selected
            .iter()
            .map(|&u| single_stream_rate(h.column(u), n0))
            .collect();
        Self::new(selected, weights, None, None)
    }

    pub fn k_b(&self) -> usize {
        self.selected.len()
    }
}

/// Runs the selector named by `cfg.algorithm`.
pub fn select(
    h: &ChannelMatrix,
    cfg: &SelectionConfig,
    n0: f64,
    ledger: &mut OpLedger,
) -> Result<SelectionResult> {
    match cfg.algorithm {
        Algorithm::Ssus => ss_us(h, cfg, n0, ledger),
        Algorithm::Sus => sus(h, cfg, n0, ledger),
        Algorithm::Gzf => gzf(h, n0, cfg.k_max, ledger),
        Algorithm::McorePlus => mcore_plus(h, n0, cfg.k_max, ledger),
        Algorithm::Random => {
            cfg.validate()?;
            let k = cfg.k_max.min(h.antennas()).min(h.users());
            let mut rng = crate::seeding::stream(cfg.rng_seed, &[Algorithm::Random.stream_tag()]);
            let mut r = random_select(h, k, &mut rng)?;
            r.weights = r
                .selected
                .iter()
                .map(|&u| single_stream_rate(h.column(u), n0))
                .collect();
            r.mean_metric = r.weights.iter().sum::<f64>() / r.weights.len() as f64;
            Ok(r)
        }
        Algorithm::Exhaustive => exhaustive_oracle(h, n0, cfg.k_max, ledger),
    }
}

pub(crate) fn check_noise(n0: f64) -> Result<()> {
    if n0 > 0.0 && n0.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "noise power must be positive, got {n0}"
        )))
    }
}

/// Squared column norms and the index of the strongest user.
pub(crate) fn strongest_user(h: &ChannelMatrix, ledger: &mut OpLedger) -> (usize, Vec<f64>) {
    let norms: Vec<f64> = h.columns().map(|c| norm_sqr(c, ledger)).collect();
    ledger.cmps(norms.len().saturating_sub(1));
    (
        argmax(&norms).expect("channel has at least one user"),
        norms,
    )
}

/// First index of the maximum; `None` for an empty slice.
pub(crate) fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            Some(b) if v <= values[b] => {}
            _ => best = Some(i),
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert_eq!("mCore+".parse::<Algorithm>().unwrap(), Algorithm::McorePlus);
        assert_eq!("SS-US".parse::<Algorithm>().unwrap(), Algorithm::Ssus);
        assert!("bogus".parse::<Algorithm>().is_err());
    }

    #[test]
    fn config_validation() {
        let ok = SelectionConfig::new(Algorithm::Ssus, 4);
        assert!(ok.validate().is_ok());
        assert!(ok.with_alpha(0.0).validate().is_err());
        assert!(ok.with_alpha(1.0).validate().is_err());
        assert!(ok.with_bases(0).validate().is_err());
        assert!(SelectionConfig::new(Algorithm::Ssus, 0).validate().is_err());
        assert!(ok.with_sus_epsilon(1.5).validate().is_err());
    }

    #[test]
    fn argmax_prefers_lowest_index() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0, 2.0]), Some(1));
        assert_eq!(argmax(&[]), None);
        assert_eq!(argmax(&[f64::NEG_INFINITY, f64::NEG_INFINITY]), Some(0));
    }
}
