//! Zero-forcing post-processing SNR and sum spectral efficiency.

use num_complex::Complex64;

use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::numerics::{hermitian_inner, OpLedger};

/// Gram matrices whose estimated condition number exceeds this are treated
/// as singular.
pub const MAX_GRAM_CONDITION: f64 = 1e12;

/// `log2(1 + ‖h‖² / n0)`.
pub fn single_stream_rate(h: &[Complex64], n0: f64) -> f64 {
    let energy: f64 = h.iter().map(|z| z.norm_sqr()).sum();
    (energy / n0).ln_1p() / std::f64::consts::LN_2
}

/// A set of scheduled users viewed as the `M × K` submatrix of their channels.
#[derive(Debug, Clone)]
pub struct SelectedChannel<'a> {
    channel: &'a ChannelMatrix,
    users: Vec<usize>,
}

impl<'a> SelectedChannel<'a> {
    pub fn new(channel: &'a ChannelMatrix, users: Vec<usize>) -> Result<Self> {
        if users.is_empty() || users.len() > channel.antennas() {
            return Err(Error::InvalidArgument(format!(
                "selected set size {} outside 1..={}",
                users.len(),
                channel.antennas()
            )));
        }
        if let Some(&bad) = users.iter().find(|&&u| u >= channel.users()) {
            return Err(Error::InvalidArgument(format!(
                "user index {bad} out of range for {} users",
                channel.users()
            )));
        }
        let mut seen = users.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(
                "selected set contains duplicate users".into(),
            ));
        }
        Ok(Self { channel, users })
    }

    pub fn users(&self) -> &[usize] {
        &self.users
    }

    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    pub fn column(&self, k: usize) -> &[Complex64] {
        self.channel.column(self.users[k])
    }
}

/// Per-stream SNR after zero-forcing: `1 / (n0 · [(H^H H)^{-1}]_kk)`.
///
/// The Gram matrix is factored by Cholesky; a non-positive pivot or an
/// estimated condition number above [`MAX_GRAM_CONDITION`] yields
/// [`Error::SingularSet`].
pub fn zf_post_snr(sel: &SelectedChannel<'_>, n0: f64, ledger: &mut OpLedger) -> Result<Vec<f64>> {
    if n0.is_nan() || n0 <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "noise power must be positive, got {n0}"
        )));
    }
    let k = sel.len();

    // Lower triangle of G = H^H H, row-major k×k.
    let mut g = vec![Complex64::new(0.0, 0.0); k * k];
    for i in 0..k {
        for j in 0..=i {
            g[i * k + j] = hermitian_inner(sel.column(i), sel.column(j), ledger)?;
        }
    }

    // Cholesky G = L L^H, in place in the lower triangle.
    let mut max_diag = 0.0f64;
    let mut min_pivot = f64::INFINITY;
    for j in 0..k {
        let gjj = g[j * k + j].re;
        max_diag = max_diag.max(gjj);
        let mut d = gjj;
        for p in 0..j {
            d -= g[j * k + p].norm_sqr();
        }
        ledger.macs(j);
        ledger.cmps(1);
        if d.is_nan() || d <= 0.0 {
            return Err(Error::SingularSet);
        }
        min_pivot = min_pivot.min(d);
        let ljj = d.sqrt();
        g[j * k + j] = Complex64::new(ljj, 0.0);
        for i in (j + 1)..k {
            let mut s = g[i * k + j];
            for p in 0..j {
                s -= g[i * k + p] * g[j * k + p].conj();
            }
            ledger.macs(j);
            ledger.divs(1);
            g[i * k + j] = s / ljj;
        }
    }
    ledger.cmps(1);
    if max_diag / min_pivot > MAX_GRAM_CONDITION {
        return Err(Error::SingularSet);
    }

    // diag(G^{-1})_c = Σ_r |(L^{-1})_{rc}|², with L^{-1} by forward substitution.
    let mut inv_diag = vec![0.0f64; k];
    let mut w = vec![Complex64::new(0.0, 0.0); k];
    for c in 0..k {
        w.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
        for r in c..k {
            let mut s = if r == c {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            for p in c..r {
                s -= g[r * k + p] * w[p];
            }
            ledger.macs(r - c);
            ledger.divs(1);
            w[r] = s / g[r * k + r].re;
        }
        ledger.macs(k - c);
        inv_diag[c] = w[c..].iter().map(|x| x.norm_sqr()).sum();
    }

    ledger.divs(k);
    Ok(inv_diag.into_iter().map(|d| 1.0 / (n0 * d)).collect())
}

/// `Σ_k log2(1 + SNR_k)` under zero-forcing, in bits/s/Hz.
pub fn sum_spectral_efficiency(
    sel: &SelectedChannel<'_>,
    n0: f64,
    ledger: &mut OpLedger,
) -> Result<f64> {
    let snr = zf_post_snr(sel, n0, ledger)?;
    Ok(snr.iter().map(|s| s.ln_1p()).sum::<f64>() / std::f64::consts::LN_2)
}

/// Sum spectral efficiency of a user set evaluated in ascending index order.
///
/// All selectors and the exhaustive oracle score sets through this function,
/// so the same set always scores bit-identically regardless of the order in
/// which it was assembled.
pub fn set_sum_se(
    channel: &ChannelMatrix,
    users: &[usize],
    n0: f64,
    ledger: &mut OpLedger,
) -> Result<f64> {
    let mut sorted = users.to_vec();
    sorted.sort_unstable();
    let sel = SelectedChannel::new(channel, sorted)?;
    sum_spectral_efficiency(&sel, n0, ledger)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn single_stream_rate_examples() {
        let c = |x: f64| [Complex64::new(x, 0.0)];
        assert_eq!(single_stream_rate(&c(1.0), 1.0), 1.0);
        assert!(close(single_stream_rate(&c(3f64.sqrt()), 1.0), 2.0, 1e-15));
        assert_eq!(single_stream_rate(&c(0.0), 1.0), 0.0);
    }

    #[test]
    fn orthogonal_columns_give_norm_over_noise() {
        let h = ChannelMatrix::from_real_columns(&[&[2.0, 0.0], &[0.0, 3.0]]).unwrap();
        let sel = SelectedChannel::new(&h, vec![0, 1]).unwrap();
        let snr = zf_post_snr(&sel, 0.5, &mut OpLedger::new()).unwrap();
        assert_eq!(snr, vec![8.0, 18.0]);
    }

    #[test]
    fn identity_examples() {
        let h = ChannelMatrix::identity(2);
        let sel = SelectedChannel::new(&h, vec![0, 1]).unwrap();
        assert_eq!(
            zf_post_snr(&sel, 1.0, &mut OpLedger::new()).unwrap(),
            vec![1.0, 1.0]
        );
        let h4 = ChannelMatrix::identity(4);
        let se = set_sum_se(&h4, &[0, 1, 2, 3], 1.0, &mut OpLedger::new()).unwrap();
        assert_eq!(se, 4.0);
    }

    #[test]
    fn two_user_hand_example() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = ChannelMatrix::from_real_columns(&[&[1.0, 0.0], &[s, s]]).unwrap();
        let sel = SelectedChannel::new(&h, vec![0, 1]).unwrap();
        let snr = zf_post_snr(&sel, 1.0, &mut OpLedger::new()).unwrap();
        assert!(
            close(snr[0], 0.5, 1e-12) && close(snr[1], 0.5, 1e-12),
            "{snr:?}"
        );
        let se = sum_spectral_efficiency(&sel, 1.0, &mut OpLedger::new()).unwrap();
        assert!(close(se, 1.1699250014423124, 1e-12));
    }

    #[test]
    fn single_user_reduces_to_rate() {
        let h = ChannelMatrix::from_real_columns(&[&[1.0, 0.0]]).unwrap();
        assert_eq!(
            set_sum_se(&h, &[0], 1.0, &mut OpLedger::new()).unwrap(),
            1.0
        );
    }

    #[test]
    fn parallel_columns_are_singular() {
        let h = ChannelMatrix::from_real_columns(&[&[1.0, 1.0], &[2.0, 2.0]]).unwrap();
        let r = set_sum_se(&h, &[0, 1], 1.0, &mut OpLedger::new());
        assert!(matches!(r, Err(Error::SingularSet)));
        // Nearly parallel: condition number around 1e14.
        let h = ChannelMatrix::from_real_columns(&[&[1.0, 0.0], &[1.0, 1e-7]]).unwrap();
        let r = set_sum_se(&h, &[0, 1], 1.0, &mut OpLedger::new());
        assert!(matches!(r, Err(Error::SingularSet)));
    }

    #[test]
    fn rejects_bad_sets() {
        let h = ChannelMatrix::identity(2);
        assert!(SelectedChannel::new(&h, vec![]).is_err());
        assert!(SelectedChannel::new(&h, vec![0, 1, 0]).is_err());
        assert!(SelectedChannel::new(&h, vec![2]).is_err());
        assert!(SelectedChannel::new(&h, vec![1, 1]).is_err());
        let sel = SelectedChannel::new(&h, vec![0]).unwrap();
        assert!(zf_post_snr(&sel, 0.0, &mut OpLedger::new()).is_err());
    }

    #[test]
    fn evaluation_is_order_independent() {
        let h = ChannelMatrix::from_real_columns(&[
            &[1.0, 0.2, 0.1],
            &[0.3, 1.0, 0.0],
            &[0.5, 0.5, 1.0],
        ])
        .unwrap();
        let a = set_sum_se(&h, &[2, 0, 1], 0.3, &mut OpLedger::new()).unwrap();
        let b = set_sum_se(&h, &[0, 1, 2], 0.3, &mut OpLedger::new()).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn gram_cost_is_charged() {
        let h = ChannelMatrix::identity(4);
        let sel = SelectedChannel::new(&h, vec![0, 1, 2]).unwrap();
        let mut l = OpLedger::new();
        zf_post_snr(&sel, 1.0, &mut l).unwrap();
        // 6 Gram entries of length 4, plus the factor and inverse work.
        assert!(l.complex_macs >= 24);
    }
}
