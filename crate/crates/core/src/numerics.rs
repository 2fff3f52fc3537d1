//! Complex vector primitives, Gram-Schmidt basis construction, the
//! correlation metric and subset counting.
//!
//! Every routine that touches vector entries charges its work to an
//! [`OpLedger`]. The unit of cost is one complex multiply-accumulate (MAC),
//! so an inner product of two length-`M` vectors costs `M` MACs.

use std::ops::{Add, AddAssign};

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Residual norm (relative to the drawn vector) below which a Gram-Schmidt
/// candidate is discarded and redrawn.
pub const GS_REDRAW_THRESHOLD: f64 = 1e-8;

/// Maximum number of redraws per basis column before giving up.
pub const GS_MAX_REDRAWS: usize = 100;

/// Operation counters charged by the numeric kernels.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpLedger {
    pub complex_macs: u64,
    pub divisions: u64,
    pub comparisons: u64,
}

impl OpLedger {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn macs(&mut self, n: usize) {
        self.complex_macs += n as u64;
    }

    #[inline]
    pub fn divs(&mut self, n: usize) {
        self.divisions += n as u64;
    }

    #[inline]
    pub fn cmps(&mut self, n: usize) {
        self.comparisons += n as u64;
    }

    pub fn merge(&mut self, other: &OpLedger) {
        *self += *other;
    }
}

impl AddAssign for OpLedger {
    fn add_assign(&mut self, rhs: Self) {
        self.complex_macs += rhs.complex_macs;
        self.divisions += rhs.divisions;
        self.comparisons += rhs.comparisons;
    }
}

impl Add for OpLedger {
    type Output = OpLedger;

    fn add(mut self, rhs: Self) -> Self::Output {
        self += rhs;
        self
    }
}

impl std::iter::Sum for OpLedger {
    fn sum<I: Iterator<Item = OpLedger>>(iter: I) -> Self {
        iter.fold(OpLedger::default(), |acc, l| acc + l)
    }
}

/// A non-empty complex vector (a user channel or a basis direction).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector(Vec<Complex64>);

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument(
                "vector length must be at least 1".into(),
            ));
        }
        Ok(Self(entries))
    }

    /// Builds a vector from real entries.
    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl AsRef<[Complex64]> for ComplexVector {
    fn as_ref(&self) -> &[Complex64] {
        &self.0
    }
}

fn check_len(a: &[Complex64], b: &[Complex64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(())
}

/// `Σ conj(a_i)·b_i`, i.e. `a^H b`.
pub fn hermitian_inner(
    a: &[Complex64],
    b: &[Complex64],
    ledger: &mut OpLedger,
) -> Result<Complex64> {
    check_len(a, b)?;
    ledger.macs(a.len());
    Ok(a.iter().zip(b).map(|(x, y)| x.conj() * y).sum())
}

/// Squared Euclidean norm, charged as one length-`M` inner product.
pub fn norm_sqr(a: &[Complex64], ledger: &mut OpLedger) -> f64 {
    ledger.macs(a.len());
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// `|h^H v| / (‖h‖·‖v‖)`, clamped to `[0, 1]`.
pub fn correlation(h: &[Complex64], v: &[Complex64], ledger: &mut OpLedger) -> Result<f64> {
    check_len(h, v)?;
    let nh = norm_sqr(h, ledger).sqrt();
    let nv = norm_sqr(v, ledger).sqrt();
    if nh == 0.0 || nv == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let ip = hermitian_inner(h, v, ledger)?;
    ledger.divs(1);
    Ok((ip.norm() / (nh * nv)).clamp(0.0, 1.0))
}

/// Correlation against a unit-norm direction when `‖h‖` is already known.
#[inline]
pub(crate) fn correlation_unit(
    h: &[Complex64],
    h_norm: f64,
    unit: &[Complex64],
    ledger: &mut OpLedger,
) -> f64 {
    ledger.macs(h.len());
    ledger.divs(1);
    let ip: Complex64 = h.iter().zip(unit).map(|(x, y)| x.conj() * y).sum();
    (ip.norm() / h_norm).clamp(0.0, 1.0)
}

/// Draws a vector whose entries have independent standard-normal real and
/// imaginary parts.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    (0..dim)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        })
        .collect()
}

/// An `M × M` unitary matrix stored by columns. Column 0 is the seed direction.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    columns: Vec<Vec<Complex64>>,
    basis_index: usize,
}

impl OrthonormalBasis {
    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn basis_index(&self) -> usize {
        self.basis_index
    }

    pub fn column(&self, m: usize) -> &[Complex64] {
        &self.columns[m]
    }

    pub fn columns(&self) -> &[Vec<Complex64>] {
        &self.columns
    }

    /// `max_{i≠j} |⟨v_i, v_j⟩|`.
    pub fn max_cross_inner(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in (i + 1)..self.dim() {
                let ip: Complex64 = self.columns[i]
                    .iter()
                    .zip(&self.columns[j])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                worst = worst.max(ip.norm());
            }
        }
        worst
    }

    /// `max_i | ‖v_i‖ − 1 |`.
    pub fn max_norm_error(&self) -> f64 {
        self.columns
            .iter()
            .map(|c| (c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Completes a unit-norm `seed` to an orthonormal basis of `C^M`
/// (`M = seed.len()`) using modified Gram-Schmidt on random Gaussian draws.
///
/// Cost per added column `j` (with `j` columns already in place): `2·M·j`
/// MACs for the projections plus `2·M` for normalisation.
pub fn gram_schmidt_extend<R: Rng + ?Sized>(
    seed: &[Complex64],
    basis_index: usize,
    rng: &mut R,
    ledger: &mut OpLedger,
) -> Result<OrthonormalBasis> {
    extend_with(seed, basis_index, |dim| complex_gaussian(rng, dim), ledger)
}

fn extend_with<F: FnMut(usize) -> Vec<Complex64>>(
    seed: &[Complex64],
    basis_index: usize,
    mut draw: F,
    ledger: &mut OpLedger,
) -> Result<OrthonormalBasis> {
    let dim = seed.len();
    if dim == 0 {
        return Err(Error::InvalidArgument("seed vector is empty".into()));
    }
    let seed_norm = seed.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (seed_norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "seed must be unit norm, got norm {seed_norm}"
        )));
    }

    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    columns.push(seed.to_vec());

    while columns.len() < dim {
        let mut attempts = 0;
        loop {
            if attempts > GS_MAX_REDRAWS {
                return Err(Error::DegenerateBasis { attempts });
            }
            attempts += 1;

            let mut z = draw(dim);
            let drawn = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            for q in &columns {
                let c = hermitian_inner(q, &z, ledger)?;
                ledger.macs(dim);
                for (zi, qi) in z.iter_mut().zip(q) {
                    *zi -= c * qi;
                }
            }
            let residual = norm_sqr(&z, ledger).sqrt();
            ledger.cmps(1);
            if drawn == 0.0 || residual < GS_REDRAW_THRESHOLD * drawn {
                continue;
            }
            ledger.divs(1);
            ledger.macs(dim);
            let inv = 1.0 / residual;
            z.iter_mut().for_each(|zi| *zi *= inv);
            columns.push(z);
            break;
        }
    }

    Ok(OrthonormalBasis {
        columns,
        basis_index,
    })
}

/// Binomial coefficient `C(n, k)` in exact arithmetic.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Number of distinct non-empty user subsets of size at most `k` drawn from
/// `u` candidates: `Σ_{j=1..k} C(u, j)`.
pub fn subset_count(u: u64, k: u64) -> Result<BigUint> {
    if k < 1 || k > u {
        return Err(Error::InvalidArgument(format!(
            "subset size must satisfy 1 <= k <= u (k={k}, u={u})"
        )));
    }
    Ok((1..=k).map(|j| binomial(u, j)).sum())
}
