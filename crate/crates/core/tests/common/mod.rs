#![allow(dead_code)]

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ssus::{generate_iid_rayleigh, ChannelMatrix};
use statrs::distribution::{ContinuousCDF, StudentsT};

pub fn rayleigh(m: usize, u: usize, seed: u64) -> ChannelMatrix {
    generate_iid_rayleigh(m, u, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Per-user ZF SNR as the energy of `h_k` left after projecting out the
/// other selected users' span, divided by `n0`.
pub fn projection_residual_snr(h: &ChannelMatrix, users: &[usize], n0: f64) -> Vec<f64> {
    users
        .iter()
        .map(|&k| {
            // Orthonormal basis of the others, two Gram-Schmidt passes.
            let mut q: Vec<Vec<Complex64>> = Vec::new();
            for &j in users.iter().filter(|&&j| j != k) {
                let mut v = h.column(j).to_vec();
                for _ in 0..2 {
                    for b in &q {
                        let c = inner(b, &v);
                        v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
                    }
                }
                let n = inner(&v, &v).re.sqrt();
                v.iter_mut().for_each(|x| *x /= n);
                q.push(v);
            }
            let mut r = h.column(k).to_vec();
            for _ in 0..2 {
                for b in &q {
                    let c = inner(b, &r);
                    r.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
                }
            }
            inner(&r, &r).re / n0
        })
        .collect()
}

/// Mean and standard error of paired differences `a - b`.
pub struct Paired {
    pub n: usize,
    pub mean: f64,
    pub se: f64,
}

impl Paired {
    pub fn new(a: &[f64], b: &[f64]) -> Self {
        assert_eq!(a.len(), b.len());
        let n = a.len();
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        let mean = d.iter().sum::<f64>() / n as f64;
        let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        Self {
            n,
            mean,
            se: (var / n as f64).sqrt(),
        }
    }

    /// One-sided 95% Student-t critical value for `n - 1` degrees of freedom.
    pub fn t95(&self) -> f64 {
        StudentsT::new(0.0, 1.0, (self.n - 1) as f64)
            .unwrap()
            .inverse_cdf(0.95)
    }

    pub fn t_stat(&self) -> f64 {
        if self.se == 0.0 {
            if self.mean > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        } else {
            self.mean / self.se
        }
    }

    /// Lower end of the one-sided 95% confidence interval for the mean.
    pub fn lower95(&self) -> f64 {
        self.mean - self.t95() * self.se
    }
}
