//! Space-splitting user selection.
//!
//! The strongest user anchors the first direction of `L` random orthonormal
//! bases. Within each basis every remaining direction is offered to the user
//! maximising `Δ(h_u, v)·r_u`; that user is accepted only if `Δ ≥ α`.
//! The basis whose accepted users have the highest mean metric wins.

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{check_noise, strongest_user, SelectionConfig, SelectionResult};
use crate::channel::ChannelMatrix;
use crate::error::Result;
use crate::numerics::{correlation_unit, gram_schmidt_extend, OpLedger, OrthonormalBasis};
use crate::seeding;

const BASIS_STREAM_TAG: u64 = 0x5355_5342_4153_4953;

/// Random stream for basis `l`. Streams are keyed by `l` alone, so the first
/// `L` bases of a run with `L' > L` match a run with `L` exactly.
pub fn basis_stream(rng_seed: u64, l: usize) -> ChaCha8Rng {
    seeding::stream(rng_seed, &[BASIS_STREAM_TAG, l as u64])
}

fn seed_direction(
    h: &ChannelMatrix,
    seed_user: usize,
    seed_norm: f64,
    ledger: &mut OpLedger,
) -> Vec<Complex64> {
    ledger.divs(1);
    ledger.macs(h.antennas());
    let inv = 1.0 / seed_norm;
    h.column(seed_user).iter().map(|z| z * inv).collect()
}

/// Rebuilds basis `l` exactly as [`ss_us`] constructs it, for inspection.
pub fn ss_us_basis(h: &ChannelMatrix, rng_seed: u64, l: usize) -> Result<OrthonormalBasis> {
    let mut scratch = OpLedger::new();
    let (seed_user, norms_sq) = strongest_user(h, &mut scratch);
    let v1 = seed_direction(h, seed_user, norms_sq[seed_user].sqrt(), &mut scratch);
    gram_schmidt_extend(&v1, l, &mut basis_stream(rng_seed, l), &mut scratch)
}

struct BasisOutcome {
    selected: Vec<usize>,
    directions: Vec<usize>,
    weights: Vec<f64>,
    mean: f64,
}

struct Shared<'a> {
    h: &'a ChannelMatrix,
    v1: &'a [Complex64],
    seed_user: usize,
    norms: &'a [f64],
    rates: &'a [f64],
    directions: usize,
    alpha: f64,
    rng_seed: u64,
}

fn evaluate_basis(s: &Shared<'_>, l: usize) -> Result<(BasisOutcome, OpLedger)> {
    let mut ledger = OpLedger::new();
    let users = s.h.users();
    let basis = gram_schmidt_extend(s.v1, l, &mut basis_stream(s.rng_seed, l), &mut ledger)?;

    // Correlation table for every user against every direction in play.
    let table: Vec<Vec<f64>> = (1..s.directions)
        .map(|m| {
            (0..users)
                .map(|u| correlation_unit(s.h.column(u), s.norms[u], basis.column(m), &mut ledger))
                .collect()
        })
        .collect();

    let mut available = vec![true; users];
    available[s.seed_user] = false;
    let mut selected = vec![s.seed_user];
    let mut directions = vec![0];
    let mut weights = vec![s.rates[s.seed_user]];

    for (m, deltas) in (1..s.directions).zip(&table) {
        let mut best: Option<(usize, f64)> = None;
        for u in (0..users).filter(|&u| available[u]) {
            let w = deltas[u] * s.rates[u];
            ledger.cmps(1);
            if best.is_none_or(|(_, bw)| w > bw) {
                best = Some((u, w));
            }
        }
        let Some((u, w)) = best else { break };
        ledger.cmps(1);
        if deltas[u] >= s.alpha {
            available[u] = false;
            selected.push(u);
            directions.push(m);
            weights.push(w);
        }
    }

    let mean = weights.iter().sum::<f64>() / weights.len() as f64;
    ledger.divs(1);
    Ok((
        BasisOutcome {
            selected,
            directions,
            weights,
            mean,
        },
        ledger,
    ))
}

/// Space-splitting user selection over `cfg.num_bases` bases.
///
/// Bases are evaluated in parallel; the reduction keeps the highest mean
/// metric with ties going to the lowest basis index, so the result does not
/// depend on scheduling.
pub fn ss_us(
    h: &ChannelMatrix,
    cfg: &SelectionConfig,
    n0: f64,
    ledger: &mut OpLedger,
) -> Result<SelectionResult> {
    cfg.validate()?;
    check_noise(n0)?;

    let (seed_user, norms_sq) = strongest_user(h, ledger);
    ledger.divs(norms_sq.len());
    let rates: Vec<f64> = norms_sq
        .iter()
        .map(|&e| (e / n0).ln_1p() / std::f64::consts::LN_2)
        .collect();

    let directions = cfg.k_max.min(h.antennas());
    if directions == 1 {
        return Ok(SelectionResult::new(
            vec![seed_user],
            vec![rates[seed_user]],
            Some(vec![0]),
            Some(0),
        ));
    }

    let norms: Vec<f64> = norms_sq.iter().map(|e| e.sqrt()).collect();
    let v1 = seed_direction(h, seed_user, norms[seed_user], ledger);
    let shared = Shared {
        h,
        v1: &v1,
        seed_user,
        norms: &norms,
        rates: &rates,
        directions,
        alpha: cfg.alpha,
        rng_seed: cfg.rng_seed,
    };

    let outcomes: Vec<(BasisOutcome, OpLedger)> = (0..cfg.num_bases)
        .into_par_iter()
        .map(|l| evaluate_basis(&shared, l))
        .collect::<Result<_>>()?;

    let mut winner = 0;
    for (l, (outcome, basis_ledger)) in outcomes.iter().enumerate() {
        *ledger += *basis_ledger;
        ledger.cmps(1);
        if outcome.mean > outcomes[winner].0.mean {
            winner = l;
        }
    }
    let best = outcomes
        .into_iter()
        .nth(winner)
        .expect("at least one basis")
        .0;
    Ok(SelectionResult::new(
        best.selected,
        best.weights,
        Some(best.directions),
        Some(winner),
    ))
}
