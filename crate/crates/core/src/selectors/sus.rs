//! Semi-orthogonal user selection baseline.

use num_complex::Complex64;

use super::{argmax, check_noise, strongest_user, SelectionConfig, SelectionResult};
use crate::channel::ChannelMatrix;
use crate::error::Result;
use crate::numerics::{hermitian_inner, norm_sqr, OpLedger};

struct Candidate {
    user: usize,
    residual: Vec<Complex64>,
    residual_sqr: f64,
}

/// Starts from the strongest user, then repeatedly projects the surviving
/// candidates onto the orthogonal complement of the selected span, drops those
/// whose correlation with the span exceeds `cfg.sus_epsilon`, and takes the
/// one with the largest residual norm.
pub fn sus(
    h: &ChannelMatrix,
    cfg: &SelectionConfig,
    n0: f64,
    ledger: &mut OpLedger,
) -> Result<SelectionResult> {
    cfg.validate()?;
    check_noise(n0)?;
    let m = h.antennas();
    let limit = cfg.k_max.min(m);

    let (first, norms_sq) = strongest_user(h, ledger);
    let mut selected = vec![first];
    let mut pool: Vec<Candidate> = (0..h.users())
        .filter(|&u| u != first)
        .map(|u| Candidate {
            user: u,
            residual: h.column(u).to_vec(),
            residual_sqr: norms_sq[u],
        })
        .collect();

    ledger.divs(1);
    ledger.macs(m);
    let inv = 1.0 / norms_sq[first].sqrt();
    let mut direction: Vec<Complex64> = h.column(first).iter().map(|z| z * inv).collect();

    while selected.len() < limit {
        for c in pool.iter_mut() {
            let coef = hermitian_inner(&direction, &c.residual, ledger)?;
            ledger.macs(m);
            for (r, q) in c.residual.iter_mut().zip(&direction) {
                *r -= coef * q;
            }
            c.residual_sqr = norm_sqr(&c.residual, ledger);
        }
        ledger.divs(pool.len());
        ledger.cmps(pool.len());
        let eps = cfg.sus_epsilon;
        pool.retain(|c| (1.0 - c.residual_sqr / norms_sq[c.user]).max(0.0).sqrt() <= eps);

        let residuals: Vec<f64> = pool.iter().map(|c| c.residual_sqr).collect();
        ledger.cmps(residuals.len());
        let Some(pick) = argmax(&residuals) else {
            break;
        };
        let chosen = pool.remove(pick);
        selected.push(chosen.user);

        ledger.divs(1);
        ledger.macs(m);
        let inv = 1.0 / chosen.residual_sqr.sqrt();
        direction = chosen.residual.iter().map(|z| z * inv).collect();
    }

    Ok(SelectionResult::with_rates(h, selected, n0))
}
