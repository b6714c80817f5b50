//! Brute-force oracles shared by integration and acceptance tests.
#![allow(dead_code)]

use ga_lab::theory::separating_odd_extended;
use ga_lab::variation::k_point_crossover_at;
use ga_lab::Bitstring;
use num_rational::Ratio;

/// All `k`-subsets of `0..n` as bit masks, `n <= 30`.
pub fn subsets(n: u32, k: u32) -> Vec<u32> {
    if k == 0 {
        return vec![0];
    }
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut mask: u32 = (1 << k) - 1;
    while mask < 1 << n {
        out.push(mask);
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
    out
}

/// Right-hand side of the first-cut recurrence for `P(N, d, k)`:
/// `(d/N)(1 - P(N-1, d-1, k-1)) + ((N-d)/N) P(N-1, d, k-1)`.
pub fn recurrence_rhs(n_sites: u64, d: u64, k: u64) -> Ratio<u128> {
    let n = u128::from(n_sites);
    let dd = u128::from(d);
    let one = Ratio::from_integer(1u128);
    let red_first = if d == 0 {
        Ratio::from_integer(0)
    } else {
        Ratio::new(dd, n) * (one - separating_odd_extended(n_sites - 1, d - 1, k - 1).unwrap())
    };
    let blue_first = Ratio::new(n - dd, n) * separating_odd_extended(n_sites - 1, d, k - 1).unwrap();
    red_first + blue_first
}

/// Fraction of all `k`-point crossovers that give an offspring with more
/// ones than either parent, for parents of length `N + 1` differing only at
/// genes 0 and `d` (gene 0 is one in the first parent). Other genes follow
/// `background`.
pub fn kpoint_improvement_fraction(n_sites: usize, d: usize, k: usize, background: u64) -> Ratio<u128> {
    let n = n_sites + 1;
    let mut x1 = Bitstring::from_words(vec![background & ((1u64 << n) - 1)], n);
    x1.set(0, true);
    x1.set(d, false);
    let mut x2 = x1.clone();
    x2.set(0, false);
    x2.set(d, true);
    let parent_ones = x1.count_ones();
    let sets = subsets(n_sites as u32, k as u32);
    let better = sets
        .iter()
        .filter(|&&mask| {
            // Bit s of the mask selects cut s + 1 in 1..=N.
            let cuts: Vec<usize> = (0..n_sites).filter(|s| mask >> s & 1 == 1).map(|s| s + 1).collect();
            k_point_crossover_at(&x1, &x2, &cuts).unwrap().count_ones() > parent_ones
        })
        .count();
    Ratio::new(better as u128, sets.len() as u128)
}

fn mask_weights(n: usize, p: f64) -> Vec<f64> {
    (0..=n).map(|f| p.powi(f as i32) * (1.0 - p).powi((n - f) as i32)).collect()
}

/// Probability that mutating `x` (`n <= 16` ones-first string with `i` ones)
/// gives a different string with `i` ones, by summing over all masks.
pub fn neutral_by_masks(n: usize, i: usize, p: f64) -> f64 {
    let x: u32 = (1 << i) - 1;
    let w = mask_weights(n, p);
    (1u32..1 << n)
        .filter(|m| (x ^ m).count_ones() as usize == i)
        .map(|m| w[m.count_ones() as usize])
        .sum()
}

/// `t[a][b]`: probability that mutation of a uniformly chosen parent with
/// `a` ones yields `b` ones, by enumerating every parent and every mask.
pub fn level_matrix_by_enumeration(n: usize, p: f64) -> Vec<Vec<f64>> {
    let w = mask_weights(n, p);
    let mut t = vec![vec![0.0; n + 1]; n + 1];
    let mut parents = vec![0u64; n + 1];
    for x in 0u32..1 << n {
        let a = x.count_ones() as usize;
        parents[a] += 1;
        for m in 0u32..1 << n {
            t[a][(x ^ m).count_ones() as usize] += w[m.count_ones() as usize];
        }
    }
    for (row, &count) in t.iter_mut().zip(&parents) {
        for v in row.iter_mut() {
            *v /= count as f64;
        }
    }
    t
}
