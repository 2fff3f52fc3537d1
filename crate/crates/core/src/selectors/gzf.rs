//! Greedy zero-forcing baseline.

use super::{check_noise, strongest_user, SelectionResult};
use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::metrics::set_sum_se;
use crate::numerics::OpLedger;

/// Grows the set from the strongest user, each round adding the candidate
/// with the largest zero-forcing sum rate, and stops as soon as no candidate
/// strictly improves it or `k_max` users are in. Candidates that make the set
/// rank deficient are skipped.
pub fn gzf(
    h: &ChannelMatrix,
    n0: f64,
    k_max: usize,
    ledger: &mut OpLedger,
) -> Result<SelectionResult> {
    check_noise(n0)?;
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    let limit = k_max.min(h.antennas());
    let (first, _) = strongest_user(h, ledger);
    let mut selected = vec![first];
    let mut in_set = vec![false; h.users()];
    in_set[first] = true;
    let mut current = set_sum_se(h, &selected, n0, ledger)?;

    while selected.len() < limit {
        let mut best: Option<(usize, f64)> = None;
        let mut trial = selected.clone();
        trial.push(0);
        for u in (0..h.users()).filter(|&u| !in_set[u]) {
            *trial.last_mut().unwrap() = u;
            let se = match set_sum_se(h, &trial, n0, ledger) {
                Ok(se) => se,
                Err(Error::SingularSet) => continue,
                Err(e) => return Err(e),
            };
            ledger.cmps(1);
            if best.is_none_or(|(_, b)| se > b) {
                best = Some((u, se));
            }
        }
        ledger.cmps(1);
        match best {
            Some((u, se)) if se > current => {
                selected.push(u);
                in_set[u] = true;
                current = se;
            }
            _ => break,
        }
    }

    Ok(SelectionResult::with_rates(h, selected, n0))
}
