//! Uniform random selection, the lower reference.

use rand::Rng;

use super::SelectionResult;
use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};

/// Uniform `k`-subset without replacement, in draw order. Weights are zero;
/// [`super::select`] fills in single-stream rates when `n0` is known.
pub fn random_select<R: Rng + ?Sized>(
    h: &ChannelMatrix,
    k: usize,
    rng: &mut R,
) -> Result<SelectionResult> {
    let cap = h.antennas().min(h.users());
    if k == 0 || k > cap {
        return Err(Error::InvalidArgument(format!(
            "random selection size {k} outside 1..={cap}"
        )));
    }
    let selected = rand::seq::index::sample(rng, h.users(), k).into_vec();
    Ok(SelectionResult::new(selected, vec![0.0; k], None, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pool(users: usize) -> ChannelMatrix {
        ChannelMatrix::from_columns(vec![vec![num_complex::Complex64::new(1.0, 0.0); 5]; users])
            .unwrap()
    }

    #[test]
    fn full_draw_returns_everyone() {
        let h = pool(4);
        let mut r = random_select(&h, 4, &mut ChaCha8Rng::seed_from_u64(1))
            .unwrap()
            .selected;
        r.sort();
        assert_eq!(r, vec![0, 1, 2, 3]);
    }

    #[test]
    fn reproducible() {
        let h = pool(5);
        let a = random_select(&h, 1, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
        let b = random_select(&h, 1, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
        assert_eq!(a, b);
        assert!(a.selected[0] < 5);
    }

    #[test]
    fn rejects_bad_sizes() {
        let h = pool(3);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(random_select(&h, 0, &mut rng).is_err());
        assert!(random_select(&h, 4, &mut rng).is_err());
    }

    #[test]
    fn uniform_frequencies() {
        let h = pool(5);
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut counts = [0usize; 5];
        for _ in 0..10_000 {
            counts[random_select(&h, 1, &mut rng).unwrap().selected[0]] += 1;
        }
        for c in counts {
            let f = c as f64 / 10_000.0;
            assert!((f - 0.2).abs() <= 0.02, "{counts:?}");
        }
    }
}
