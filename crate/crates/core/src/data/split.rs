//! Seeded instance-level fold assignment.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::Fold;
use crate::error::{Error, Result};

/// Largest-remainder rounding of the (train, val, test) targets so the counts
/// sum exactly to `n`.
pub fn largest_remainder_counts(n: usize, prob_val: f64, prob_test: f64) -> (usize, usize, usize) {
    let targets = [
        n as f64 * (1.0 - prob_val - prob_test),
        n as f64 * prob_val,
        n as f64 * prob_test,
    ];
    let mut counts = [0usize; 3];
    let mut remainders = [0.0f64; 3];
    let mut assigned = 0usize;
    for k in 0..3 {
        counts[k] = targets[k].floor() as usize;
        remainders[k] = targets[k] - targets[k].floor();
        assigned += counts[k];
    }
    // Hand leftover units to the largest remainders; ties go to the earlier
    // slot (train before val before test) for determinism.
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| remainders[b].partial_cmp(&remainders[a]).unwrap().then(a.cmp(&b)));
    let mut leftover = n - assigned;
    for &k in &order {
        if leftover == 0 {
            break;
        }
        counts[k] += 1;
        leftover -= 1;
    }
    (counts[0], counts[1], counts[2])
}

pub(crate) fn assign_folds(n: usize, prob_val: f64, prob_test: f64, seed: u64) -> Result<Vec<Fold>> {
    if !(0.0..=1.0).contains(&prob_val) || !(0.0..=1.0).contains(&prob_test) {
        return Err(Error::Parameter("split fractions must lie in [0, 1]".into()));
    }
    if prob_val + prob_test > 1.0 {
        return Err(Error::Parameter(format!(
            "prob_val + prob_test = {} exceeds 1",
            prob_val + prob_test
        )));
    }
    let (n_train, n_val, _n_test) = largest_remainder_counts(n, prob_val, prob_test);

    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let mut fold = vec![Fold::Test; n];
    for (rank, &i) in order.iter().enumerate() {
        fold[i] = if rank < n_train {
            Fold::Train
        } else if rank < n_train + n_val {
            Fold::Val
        } else {
            Fold::Test
        };
    }
    Ok(fold)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_rounded_targets() {
        assert_eq!(largest_remainder_counts(100, 0.2, 0.0), (80, 20, 0));
        assert_eq!(largest_remainder_counts(100, 0.16, 0.20), (64, 16, 20));
        assert_eq!(largest_remainder_counts(10, 0.0, 0.0), (10, 0, 0));
        // Remainders must absorb the leftover exactly.
        let (tr, va, te) = largest_remainder_counts(7, 0.33, 0.33);
        assert_eq!(tr + va + te, 7);
    }

    #[test]
    fn deterministic_given_seed() {
        let a = assign_folds(50, 0.2, 0.1, 7).unwrap();
        let b = assign_folds(50, 0.2, 0.1, 7).unwrap();
        assert_eq!(a, b);
        let c = assign_folds(50, 0.2, 0.1, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_oversubscribed_fractions() {
        assert!(assign_folds(10, 0.6, 0.6, 0).is_err());
    }

    #[test]
    fn zero_fractions_put_everything_in_train() {
        let fold = assign_folds(12, 0.0, 0.0, 3).unwrap();
        assert!(fold.iter().all(|f| *f == Fold::Train));
    }
}
