//! Closed-form operation-count models for the four selectors and their
//! comparison against instrumented runs.
//!
//! Costs are in complex multiply-accumulates, evaluated exactly with big
//! integers:
//!
//! | method | cost |
//! |--------|------|
//! | SUS    | `U·M + Σ_{k=1}^{K-1} U·M·k` |
//! | GZF    | `U·M + Σ_{k=1}^{K-1} (U−k)(M·k² + k³)` |
//! | mCore+ | `U·M + M³ + Σ_{k=1}^{M} C(M,k)(M·k² + k³)` |
//! | SS-US  | `U·M + L·(M³ + U·M·(M−1))` |

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{binomial, OpLedger};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostMethod {
    Sus,
    Gzf,
    McorePlus,
    Ssus,
}

impl CostMethod {
    pub const ALL: [CostMethod; 4] = [
        CostMethod::Sus,
        CostMethod::Gzf,
        CostMethod::McorePlus,
        CostMethod::Ssus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CostMethod::Sus => "sus",
            CostMethod::Gzf => "gzf",
            CostMethod::McorePlus => "mcore_plus",
            CostMethod::Ssus => "ssus",
        }
    }
}

/// Model parameters: `U` users, `M` antennas, `K` streams, `L` bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostQuery {
    pub method: CostMethod,
    pub users: u64,
    pub antennas: u64,
    pub streams: u64,
    pub bases: u64,
}

impl CostQuery {
    pub fn new(
        method: CostMethod,
        users: u64,
        antennas: u64,
        streams: u64,
        bases: u64,
    ) -> Result<Self> {
        let q = Self {
            method,
            users,
            antennas,
            streams,
            bases,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.streams < 1 || self.streams > self.antennas {
            return Err(Error::InvalidArgument(format!(
                "streams must satisfy 1 <= K <= M (K={}, M={})",
                self.streams, self.antennas
            )));
        }
        if self.users < self.streams {
            return Err(Error::InvalidArgument(format!(
                "users must be at least K (U={}, K={})",
                self.users, self.streams
            )));
        }
        if self.bases < 1 {
            return Err(Error::InvalidArgument("bases must be at least 1".into()));
        }
        Ok(())
    }

    fn with_method(&self, method: CostMethod) -> Self {
        Self { method, ..*self }
    }
}

/// Exact model cost for `q`.
pub fn model_cost(q: &CostQuery) -> BigUint {
    let u = BigUint::from(q.users);
    let m = BigUint::from(q.antennas);
    let um = &u * &m;
    let m3 = &m * &m * &m;
    // Gram construction plus inversion for a k-user set.
    let gram = |k: u64| -> BigUint {
        let k = BigUint::from(k);
        &m * &k * &k + &k * &k * &k
    };
    match q.method {
        CostMethod::Sus => {
            let tri: u64 = (1..q.streams).sum();
            &um + &um * BigUint::from(tri)
        }
        CostMethod::Gzf => {
            let tail: BigUint = (1..q.streams)
                .map(|k| BigUint::from(q.users - k) * gram(k))
                .fold(BigUint::zero(), |a, b| a + b);
            um + tail
        }
        CostMethod::McorePlus => {
            let tail: BigUint = (1..=q.antennas)
                .map(|k| binomial(q.antennas, k) * gram(k))
                .fold(BigUint::zero(), |a, b| a + b);
            um + m3 + tail
        }
        CostMethod::Ssus => {
            let per_basis = &m3 + &um * (&m - BigUint::from(1u8));
            um + BigUint::from(q.bases) * per_basis
        }
    }
}

/// One row of a normalised cost table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativeCost {
    pub query: CostQuery,
    pub cost: BigUint,
    /// Cost divided by the SUS cost at the same `(U, M, K)`.
    pub relative: f64,
}

fn ratio(num: &BigUint, den: &BigUint) -> f64 {
    // Both fit comfortably in f64 range for any realistic M.
    num.to_f64().unwrap_or(f64::INFINITY) / den.to_f64().unwrap_or(f64::INFINITY)
}

/// Normalises each query's cost to the SUS entry with the same `(U, M, K)`.
pub fn relative_cost(queries: &[CostQuery]) -> Result<Vec<RelativeCost>> {
    queries
        .iter()
        .map(|q| {
            q.validate()?;
            let reference = queries
                .iter()
                .find(|r| {
                    r.method == CostMethod::Sus
                        && (r.users, r.antennas, r.streams) == (q.users, q.antennas, q.streams)
                })
                .ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "no SUS reference for U={}, M={}, K={}",
                        q.users, q.antennas, q.streams
                    ))
                })?;
            let cost = model_cost(q);
            let base = model_cost(reference);
            Ok(RelativeCost {
                relative: ratio(&cost, &base),
                query: *q,
                cost,
            })
        })
        .collect()
}

/// The normalised comparison table for a list of antenna counts with
/// `K = M / streams_divisor` (`2` reproduces the `M = 2K` layout).
pub fn comparison_table(
    users: u64,
    bases: u64,
    antennas: &[u64],
    streams_divisor: u64,
) -> Result<Vec<RelativeCost>> {
    if streams_divisor == 0 {
        return Err(Error::InvalidArgument(
            "streams divisor must be positive".into(),
        ));
    }
    let mut queries = Vec::new();
    for &m in antennas {
        let k = (m / streams_divisor).max(1);
        let base = CostQuery::new(CostMethod::Sus, users, m, k, bases)?;
        for method in CostMethod::ALL {
            queries.push(base.with_method(method));
        }
    }
    relative_cost(&queries)
}

/// Default acceptance band for measured/model ratios.
pub const RECONCILE_BAND: (f64, f64) = (0.1, 10.0);

/// Measured operation count against the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reconciliation {
    pub query: CostQuery,
    pub measured_macs: u64,
    pub model: BigUint,
    pub ratio: f64,
    /// True when the ratio falls inside [`RECONCILE_BAND`].
    pub within_band: bool,
}

pub fn reconcile_ledger(query: &CostQuery, ledger: &OpLedger) -> Result<Reconciliation> {
    query.validate()?;
    let model = model_cost(query);
    let ratio = ledger.complex_macs as f64 / model.to_f64().unwrap_or(f64::INFINITY);
    Ok(Reconciliation {
        query: *query,
        measured_macs: ledger.complex_macs,
        within_band: (RECONCILE_BAND.0..=RECONCILE_BAND.1).contains(&ratio),
        model,
        ratio,
    })
}
