//! Success probabilities of crossover on two equally fit parents.
//!
//! `P(N, d, k)` is the probability that `k` cutting points drawn without
//! replacement from `N` sites hit an odd number of `d` designated sites,
//! i.e. that a hypergeometric count is odd. For k-point crossover on
//! parents differing at positions `i` and `i + d` this is the probability
//! that the two differing genes come from different parents.

use num_rational::Ratio;
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};

/// Largest `N` handled in exact integer arithmetic (`C(64, 32) < 2^61`).
pub const EXACT_MAX_SITES: u64 = 64;

/// Largest `N` the enumeration oracle accepts.
pub const BRUTEFORCE_MAX_SITES: u64 = 20;

fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    // Each prefix product is itself a binomial coefficient, so division is exact.
    (0..k).fold(1u128, |acc, j| acc * u128::from(n - j) / u128::from(j + 1))
}

fn check_sites(n_sites: u64, d: u64, k: u64) -> Result<()> {
    if n_sites < 2 {
        return Err(Error::invalid("N", format!("N={n_sites} must be at least 2")));
    }
    if d > n_sites - 1 {
        return Err(Error::invalid("d", format!("d={d} outside 0..=N-1={}", n_sites - 1)));
    }
    if k == 0 || k > n_sites - 1 {
        return Err(Error::invalid("k", format!("k={k} outside 1..=N-1={}", n_sites - 1)));
    }
    Ok(())
}

/// Exact `P(N, d, k)` for `0 <= d <= N-1`, `1 <= k <= N-1`, `N <= 64`.
pub fn separating_odd_exact(n_sites: u64, d: u64, k: u64) -> Result<Ratio<u128>> {
    check_sites(n_sites, d, k)?;
    separating_odd_extended(n_sites, d, k)
}

/// `P(N, d, k)` on the closed range `0 <= d, k <= N`, where the sum is
/// still defined (`P(N, d, 0) = 0`, `P(N, 0, k) = 0`). Needed by the
/// recurrence at its boundary.
pub fn separating_odd_extended(n_sites: u64, d: u64, k: u64) -> Result<Ratio<u128>> {
    if n_sites > EXACT_MAX_SITES {
        return Err(Error::invalid(
            "N",
            format!("N={n_sites} exceeds exact range {EXACT_MAX_SITES}; use separating_odd_prob"),
        ));
    }
    if d > n_sites || k > n_sites {
        return Err(Error::invalid("d/k", format!("d={d}, k={k} must not exceed N={n_sites}")));
    }
    let numerator: u128 = (1..=k.min(d))
        .step_by(2)
        .map(|x| binomial_u128(d, x) * binomial_u128(n_sites - d, k - x))
        .sum();
    Ok(Ratio::new(numerator, binomial_u128(n_sites, k)))
}

/// `P(N, d, k)` as a float for any `N`: exact rationals up to
/// [`EXACT_MAX_SITES`], log-space binomials beyond.
pub fn separating_odd_prob(n_sites: u64, d: u64, k: u64) -> Result<f64> {
    check_sites(n_sites, d, k)?;
    if n_sites <= EXACT_MAX_SITES {
        return separating_odd_extended(n_sites, d, k).map(|r| ratio_to_f64(&r));
    }
    let ln_total = ln_binomial(n_sites, k);
    Ok((1..=k.min(d))
        .step_by(2)
        .filter(|&x| k - x <= n_sites - d)
        .map(|x| (ln_binomial(d, x) + ln_binomial(n_sites - d, k - x) - ln_total).exp())
        .sum())
}

pub fn ratio_to_f64(r: &Ratio<u128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Enumerates all `C(N, k)` cut sets and counts those hitting the
/// designated sites `{1, ..., d}` an odd number of times.
pub fn separating_odd_bruteforce(n_sites: u64, d: u64, k: u64) -> Result<Ratio<u128>> {
    if n_sites > BRUTEFORCE_MAX_SITES {
        return Err(Error::invalid(
            "N",
            format!("N={n_sites} exceeds enumeration limit {BRUTEFORCE_MAX_SITES}"),
        ));
    }
    if d > n_sites || k > n_sites {
        return Err(Error::invalid("d/k", format!("d={d}, k={k} must not exceed N={n_sites}")));
    }
    let red: u32 = if d == 0 { 0 } else { u32::MAX >> (32 - d) };
    let limit = 1u32 << n_sites;
    let (mut total, mut odd) = (0u128, 0u128);
    if k == 0 {
        return Ok(Ratio::new(0, 1));
    }
    let mut mask: u32 = (1u32 << k) - 1;
    while mask < limit {
        total += 1;
        if (mask & red).count_ones() % 2 == 1 {
            odd += 1;
        }
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
    Ok(Ratio::new(odd, total))
}

/// Lower bound `d(N-d) / (N(N-1))` on `P(N, d, k)`.
pub fn separating_odd_lower_bound(n_sites: u64, d: u64) -> Ratio<u128> {
    let n = u128::from(n_sites);
    let d = u128::from(d);
    Ratio::new(d * (n - d), n * (n - 1))
}

/// Probability that uniform crossover of parents differing in `2d`
/// positions, `d` ones on each side, yields more than `d` ones there:
/// `(1 - C(2d, d) / 4^d) / 2`.
///
/// The central term is built as the running product of `(2j-1)/(2j)`,
/// which stays in range for any `d`.
pub fn surplus_prob(d: u64) -> Result<f64> {
    if d == 0 {
        return Err(Error::invalid("d", "d must be at least 1"));
    }
    let central = (1..=d).fold(1.0f64, |acc, j| acc * (2 * j - 1) as f64 / (2 * j) as f64);
    Ok(0.5 * (1.0 - central))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_for_small_k() {
        assert_eq!(separating_odd_exact(5, 2, 1).unwrap(), Ratio::new(2, 5));
        assert_eq!(separating_odd_exact(5, 2, 2).unwrap(), Ratio::new(3, 5));
        assert_eq!(separating_odd_exact(6, 3, 3).unwrap(), Ratio::new(1, 2));
        assert_eq!(separating_odd_exact(9, 0, 4).unwrap(), Ratio::new(0, 1));
        for n in 4..=30u64 {
            for d in 1..n {
                assert_eq!(separating_odd_exact(n, d, 1).unwrap(), Ratio::new(u128::from(d), u128::from(n)));
                let two = Ratio::new(2 * u128::from(d) * u128::from(n - d), u128::from(n * (n - 1)));
                assert_eq!(separating_odd_exact(n, d, 2).unwrap(), two);
            }
        }
    }

    #[test]
    fn enumeration_of_six_sites() {
        assert_eq!(separating_odd_bruteforce(6, 3, 3).unwrap(), Ratio::new(10, 20));
        assert_eq!(separating_odd_bruteforce(7, 0, 3).unwrap(), Ratio::new(0, 1));
    }

    #[test]
    fn all_but_one_site_is_parity_determined() {
        // k = N-1 drops one site: d red drawn unless the dropped site is red.
        let n = 4u64;
        let by_hand = [Ratio::new(3, 4), Ratio::new(2, 4), Ratio::new(1, 4)];
        for d in 1..n {
            let r = separating_odd_bruteforce(n, d, n - 1).unwrap();
            assert_eq!(r, by_hand[(d - 1) as usize]);
            assert_eq!(separating_odd_exact(n, d, n - 1).unwrap(), r);
        }
    }

    #[test]
    fn range_checks() {
        assert!(separating_odd_exact(5, 5, 1).is_err());
        assert!(separating_odd_exact(5, 2, 0).is_err());
        assert!(separating_odd_exact(5, 2, 5).is_err());
        assert!(separating_odd_exact(65, 2, 3).is_err());
        assert!(separating_odd_bruteforce(21, 2, 3).is_err());
    }

    #[test]
    fn float_path_matches_exact_at_the_switch() {
        let exact = ratio_to_f64(&separating_odd_exact(64, 20, 7).unwrap());
        let ln_space: f64 = {
            let total = ln_binomial(64, 7);
            (1..=7u64).step_by(2).map(|x| (ln_binomial(20, x) + ln_binomial(44, 7 - x) - total).exp()).sum()
        };
        assert!((exact - ln_space).abs() < 1e-12);
        let big = separating_odd_prob(1000, 10, 1).unwrap();
        assert!((big - 0.01).abs() < 1e-12);
    }

    #[test]
    fn surplus_values() {
        assert_eq!(surplus_prob(1).unwrap(), 0.25);
        assert_eq!(surplus_prob(2).unwrap(), 5.0 / 16.0);
        let mut prev = 0.0;
        for d in 1..=10_000 {
            let s = surplus_prob(d).unwrap();
            assert!((0.25..0.5).contains(&s));
            assert!(s > prev);
            prev = s;
        }
        assert!(surplus_prob(0).is_err());
    }

    #[test]
    fn surplus_matches_binomial_enumeration() {
        // P(Binomial(2d, 1/2) > d) by summing exact binomials.
        for d in 1..=30u64 {
            let above: u128 = (d + 1..=2 * d).map(|x| binomial_u128(2 * d, x)).sum();
            let p = above as f64 / 2f64.powi(2 * d as i32);
            assert!((surplus_prob(d).unwrap() - p).abs() < 1e-14);
        }
    }
}
