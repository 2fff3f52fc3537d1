//! Brute-force optimum over all user subsets, used as ground truth on small
//! instances.

use itertools::Itertools;
use num_bigint::BigUint;
use rayon::prelude::*;

use super::{check_noise, SelectionResult};
use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::metrics::set_sum_se;
use crate::numerics::{subset_count, OpLedger};

/// Largest search space the oracle accepts.
pub const EXHAUSTIVE_SUBSET_CAP: u64 = 1_000_000;

#[derive(Debug, Clone)]
pub(crate) struct Best {
    pub se: f64,
    pub users: Vec<usize>,
}

impl Best {
    /// Higher rate wins; equal rates go to the lexicographically smaller list.
    pub fn better(self, other: Best) -> Best {
        if other.se > self.se || (other.se == self.se && other.users < self.users) {
            other
        } else {
            self
        }
    }
}

/// Best non-empty subset of `pool` with at most `max_size` users, scored by
/// [`set_sum_se`]. `pool` must be sorted ascending. Singular subsets are
/// skipped.
pub(crate) fn best_subset(
    h: &ChannelMatrix,
    pool: &[usize],
    max_size: usize,
    n0: f64,
    ledger: &mut OpLedger,
) -> Result<Option<Best>> {
    let mut best: Option<Best> = None;
    for size in 1..=max_size.min(pool.len()) {
        for users in pool.iter().copied().combinations(size) {
            match set_sum_se(h, &users, n0, ledger) {
                Ok(se) => {
                    ledger.cmps(1);
                    let cand = Best { se, users };
                    best = Some(match best {
                        Some(b) => b.better(cand),
                        None => cand,
                    });
                }
                Err(Error::SingularSet) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(best)
}

/// Evaluates every non-empty subset of size at most `min(k_max, M)` and
/// returns the one with the highest zero-forcing sum rate; ties go to the
/// lexicographically smallest index list.
///
/// The subset space is split by smallest member across worker threads.
pub fn exhaustive_oracle(
    h: &ChannelMatrix,
    n0: f64,
    k_max: usize,
    ledger: &mut OpLedger,
) -> Result<SelectionResult> {
    check_noise(n0)?;
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    let max_size = k_max.min(h.antennas()).min(h.users());
    let space = subset_count(h.users() as u64, max_size as u64)?;
    if space > BigUint::from(EXHAUSTIVE_SUBSET_CAP) {
        return Err(Error::SearchSpaceTooLarge {
            size: space.to_string(),
            cap: EXHAUSTIVE_SUBSET_CAP,
        });
    }

    let users = h.users();
    let parts: Vec<(Option<Best>, OpLedger)> = (0..users)
        .into_par_iter()
        .map(|first| {
            let mut local = OpLedger::new();
            let rest: Vec<usize> = ((first + 1)..users).collect();
            let mut best: Option<Best> = None;
            for size in 0..max_size.min(rest.len() + 1) {
                for tail in rest.iter().copied().combinations(size) {
                    let mut set = Vec::with_capacity(size + 1);
                    set.push(first);
                    set.extend(tail);
                    match set_sum_se(h, &set, n0, &mut local) {
                        Ok(se) => {
                            local.cmps(1);
                            let cand = Best { se, users: set };
                            best = Some(match best {
                                Some(b) => b.better(cand),
                                None => cand,
                            });
                        }
                        Err(Error::SingularSet) => {}
                        Err(e) => return Err(e),
                    }
                }
            }
            Ok((best, local))
        })
        .collect::<Result<_>>()?;

    let mut best: Option<Best> = None;
    for (part, local) in parts {
        *ledger += local;
        if let Some(p) = part {
            best = Some(match best {
                Some(b) => b.better(p),
                None => p,
            });
        }
    }
    // Single users are never singular, so some subset always scores.
    let best = best.expect("non-empty channel has a feasible subset");
    Ok(SelectionResult::with_rates(h, best.users, n0))
}
