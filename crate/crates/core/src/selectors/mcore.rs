//! Chordal-distance shortlist followed by exhaustive search (mCore+
//! baseline, uplink single-antenna form).

use num_complex::Complex64;

use super::exhaustive::best_subset;
use super::{check_noise, strongest_user, SelectionResult};
use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::numerics::{correlation_unit, OpLedger};

/// Largest antenna count accepted; the exhaustive stage visits `2^M − 1`
/// subsets.
pub const MCORE_MAX_ANTENNAS: usize = 12;

/// 1. keep the `2M` strongest users;
/// 2. greedily shortlist `M` of them, starting from the strongest and each
///    time adding the user whose minimum chordal distance `sqrt(1 − Δ²)` to
///    the shortlist is largest;
/// 3. return the best shortlist subset (size ≤ `k_max`) by ZF sum rate.
pub fn mcore_plus(
    h: &ChannelMatrix,
    n0: f64,
    k_max: usize,
    ledger: &mut OpLedger,
) -> Result<SelectionResult> {
    check_noise(n0)?;
    let m = h.antennas();
    if m > MCORE_MAX_ANTENNAS {
        return Err(Error::InvalidArgument(format!(
            "mcore_plus supports at most {MCORE_MAX_ANTENNAS} antennas, got {m}"
        )));
    }
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }

    let (_, norms_sq) = strongest_user(h, ledger);
    let mut order: Vec<usize> = (0..h.users()).collect();
    // Descending norm, ascending index on ties.
    order.sort_by(|&a, &b| norms_sq[b].total_cmp(&norms_sq[a]).then(a.cmp(&b)));
    ledger.cmps(order.len());
    order.truncate(2 * m);

    let units: Vec<Vec<Complex64>> = order
        .iter()
        .map(|&u| {
            ledger.divs(1);
            ledger.macs(m);
            let inv = 1.0 / norms_sq[u].sqrt();
            h.column(u).iter().map(|z| z * inv).collect()
        })
        .collect();

    let target = m.min(order.len());
    let mut in_list = vec![false; order.len()];
    in_list[0] = true;
    let mut shortlist = vec![order[0]];
    let mut min_dist = vec![f64::INFINITY; order.len()];
    let mut last = 0;
    while shortlist.len() < target {
        let mut pick: Option<usize> = None;
        for i in (0..order.len()).filter(|&i| !in_list[i]) {
            let delta = correlation_unit(&units[i], 1.0, &units[last], ledger);
            let d = (1.0 - delta * delta).max(0.0).sqrt();
            min_dist[i] = min_dist[i].min(d);
            ledger.cmps(2);
            pick = match pick {
                Some(p)
                    if min_dist[i] < min_dist[p]
                        || (min_dist[i] == min_dist[p] && order[i] > order[p]) =>
                {
                    Some(p)
                }
                _ => Some(i),
            };
        }
        let p = pick.expect("shortlist target never exceeds the pool");
        in_list[p] = true;
        shortlist.push(order[p]);
        last = p;
    }

    shortlist.sort_unstable();
    let best = best_subset(h, &shortlist, k_max.min(m), n0, ledger)?
        .expect("single users are never singular");
    Ok(SelectionResult::with_rates(h, best.users, n0))
}
