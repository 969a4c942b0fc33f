use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Draws `shots` outcomes from `probs` with a seeded generator and returns
/// the count per outcome. For demonstrations only; reports use the exact
/// probabilities.
pub fn sample_outcomes(probs: &[f64], shots: usize, seed: u64) -> Result<Vec<usize>> {
    let dist = WeightedIndex::new(probs)
        .map_err(|e| Error::InvalidArgument(format!("cannot sample from {probs:?}: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0; probs.len()];
    for _ in 0..shots {
        counts[dist.sample(&mut rng)] += 1;
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_and_respects_zeros() {
        let probs = [0.5, 0.0, 0.5, 0.0];
        let a = sample_outcomes(&probs, 1000, 7).unwrap();
        assert_eq!(a, sample_outcomes(&probs, 1000, 7).unwrap());
        assert_eq!(a[1] + a[3], 0);
        assert_eq!(a.iter().sum::<usize>(), 1000);
        assert!(a[0] > 400 && a[2] > 400);
        assert!(sample_outcomes(&[0.0, 0.0], 10, 1).is_err());
    }
}
