//! Distance between the two bits flipped by a neutral two-bit mutation.
//!
//! Flipping one uniformly chosen 1-bit and one uniformly chosen 0-bit of a
//! string of length `n` leaves the bits at circular distance
//! `min{d, n - d}`, `d = |pos_1 - pos_0|`. That distance stochastically
//! dominates the uniform distribution on `{1, ..., n/4}`.

use rand::seq::index::sample;
use rand::Rng;

use crate::bitstring::Bitstring;
use crate::error::{Error, Result};

/// Minimum sample count accepted by [`distance_dominance_check`].
pub const MIN_SAMPLES: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct DominanceReport {
    /// Entry `t - 1` is `P(min >= t) - (n/4 - t + 1) / (n/4)` for
    /// `t = 1, ..., n/4`.
    pub differences: Vec<f64>,
}

impl DominanceReport {
    pub fn min_difference(&self) -> f64 {
        self.differences.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn holds(&self, eps: f64) -> bool {
        self.min_difference() >= -eps
    }
}

fn circular_distance(a: usize, b: usize, n: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(n - d)
}

// `at_least[t]` counts observations with distance >= t; returned as
// differences against the uniform tail.
fn report_from_counts(counts: &[u64], total: u64, n: usize) -> DominanceReport {
    let quarter = n / 4;
    let mut tail = vec![0u64; counts.len() + 1];
    for t in (0..counts.len()).rev() {
        tail[t] = tail[t + 1] + counts[t];
    }
    let differences = (1..=quarter)
        .map(|t| {
            let empirical = tail[t] as f64 / total as f64;
            let uniform = (quarter - t + 1) as f64 / quarter as f64;
            empirical - uniform
        })
        .collect();
    DominanceReport { differences }
}

fn check_args(n: usize, i: usize) -> Result<()> {
    if n == 0 || n % 4 != 0 {
        return Err(Error::invalid("n", format!("n={n} must be a positive multiple of 4")));
    }
    if i == 0 || i >= n {
        return Err(Error::invalid("i", format!("i={i} outside 1..=n-1={}", n - 1)));
    }
    Ok(())
}

/// Monte-Carlo check on one random genotype with `i` ones.
pub fn distance_dominance_check<R: Rng + ?Sized>(
    n: usize,
    i: usize,
    samples: usize,
    rng: &mut R,
) -> Result<DominanceReport> {
    check_args(n, i)?;
    if samples < MIN_SAMPLES {
        return Err(Error::invalid("samples", format!("samples={samples} below {MIN_SAMPLES}")));
    }
    let x = Bitstring::with_ones_at(n, &sample(rng, n, i).into_vec());
    let ones: Vec<usize> = x.ones_positions().collect();
    let zeros: Vec<usize> = (0..n).filter(|&j| !x.get(j)).collect();
    let mut counts = vec![0u64; n / 2 + 1];
    for _ in 0..samples {
        let a = ones[rng.random_range(0..ones.len())];
        let b = zeros[rng.random_range(0..zeros.len())];
        counts[circular_distance(a, b, n)] += 1;
    }
    Ok(report_from_counts(&counts, samples as u64, n))
}

/// Exact distribution for the given genotype, by enumerating every
/// (1-bit, 0-bit) pair.
pub fn distance_dominance_exact(x: &Bitstring) -> Result<DominanceReport> {
    let n = x.len();
    let i = x.count_ones();
    check_args(n, i)?;
    let mut counts = vec![0u64; n / 2 + 1];
    for a in x.ones_positions() {
        for b in (0..n).filter(|&j| !x.get(j)) {
            counts[circular_distance(a, b, n)] += 1;
        }
    }
    Ok(report_from_counts(&counts, (i * (n - i)) as u64, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;

    #[test]
    fn first_tail_is_certain() {
        let mut rng = rng_from_seed(4);
        let r = distance_dominance_check(40, 10, MIN_SAMPLES, &mut rng).unwrap();
        assert_eq!(r.differences.len(), 10);
        assert_eq!(r.differences[0], 0.0);
    }

    #[test]
    fn every_eight_bit_genotype_with_four_ones() {
        for mask in 0u64..256 {
            if mask.count_ones() != 4 {
                continue;
            }
            let x = Bitstring::from_words(vec![mask], 8);
            let r = distance_dominance_exact(&x).unwrap();
            assert!(r.holds(0.0), "{x}: {:?}", r.differences);
        }
    }

    #[test]
    fn clustered_ones_distribution() {
        // 11110000: circular distances 1..4 occur 2, 4, 6, 4 times.
        let x: Bitstring = "11110000".parse().unwrap();
        let r = distance_dominance_exact(&x).unwrap();
        assert_eq!(r.differences, vec![0.0, 14.0 / 16.0 - 0.5]);
    }

    #[test]
    fn rejects_bad_arguments() {
        let mut rng = rng_from_seed(1);
        assert!(distance_dominance_check(42, 10, MIN_SAMPLES, &mut rng).is_err());
        assert!(distance_dominance_check(40, 0, MIN_SAMPLES, &mut rng).is_err());
        assert!(distance_dominance_check(40, 40, MIN_SAMPLES, &mut rng).is_err());
        assert!(distance_dominance_check(40, 20, 100, &mut rng).is_err());
    }
}
