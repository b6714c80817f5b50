//! Level-to-level transition probabilities of standard bit mutation on
//! OneMax, and the bounds used to control them.

use statrs::function::factorial::ln_binomial;

use super::{BoundReport, FormulaId};
use crate::error::{Error, Result};

/// Probability that mutating a string with `from` ones at rate `p` yields
/// exactly `to` ones (any genotype; the count is symmetric in positions).
///
/// Sums over the number `l` of 1-bits flipped to 0; then `l + to - from`
/// 0-bits must flip to 1.
pub fn level_transition_prob(n: u64, from: u64, to: u64, p: f64) -> Result<f64> {
    if from > n || to > n {
        return Err(Error::invalid("from/to", format!("levels {from}, {to} must not exceed n={n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid("p", format!("p={p} outside [0, 1]")));
    }
    let zeros = n - from;
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let mut total = 0.0;
    for lost in 0..=from {
        let Some(gained) = (lost + to).checked_sub(from) else {
            continue;
        };
        if gained > zeros {
            continue;
        }
        let flips = lost + gained;
        let ln_term = ln_binomial(from, lost) + ln_binomial(zeros, gained) + weighted_ln(flips, lp)
            + weighted_ln(n - flips, lq);
        total += ln_term.exp();
    }
    Ok(total)
}

// count * ln(x) with the convention 0 * ln(0) = 0.
fn weighted_ln(count: u64, ln_x: f64) -> f64 {
    if count == 0 {
        0.0
    } else {
        count as f64 * ln_x
    }
}

fn check_neutral(n: u64, i: u64, p: f64) -> Result<()> {
    if i == 0 || i >= n {
        return Err(Error::invalid("i", format!("i={i} outside 1..=n-1={}", n.saturating_sub(1))));
    }
    if !(p > 0.0 && p <= 0.5) {
        return Err(Error::invalid("p", format!("p={p} outside (0, 1/2]")));
    }
    Ok(())
}

/// Probability that mutation of a string with `i` ones creates a
/// *different* string with `i` ones:
/// `sum_{l=1}^{min(i, n-i)} C(i,l) C(n-i,l) p^(2l) (1-p)^(n-2l)`.
pub fn neutral_mutation_prob_exact(n: u64, i: u64, p: f64) -> Result<f64> {
    check_neutral(n, i, p)?;
    Ok(neutral_terms(n, i, p).sum())
}

fn neutral_terms(n: u64, i: u64, p: f64) -> impl Iterator<Item = f64> {
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    (1..=i.min(n - i)).map(move |l| {
        (ln_binomial(i, l) + ln_binomial(n - i, l) + (2 * l) as f64 * lp + (n - 2 * l) as f64 * lq).exp()
    })
}

/// Bounds on the neutral-mutation probability.
#[derive(Clone, Debug, PartialEq)]
pub struct NeutralBounds {
    /// `i(n-i) p^2 (1-p)^(n-2)`, the single-pair term.
    pub lower: f64,
    /// `lower * (1 + 2 x)` with `x = i(n-i) p^2 / (1-p)^2`; only valid when
    /// `x <= 1/2`, otherwise `None`.
    pub upper: Option<f64>,
    /// `2 i^2 (n-i)^2 p^4 (1-p)^(n-4)`, bounding the part of the neutral
    /// probability at Hamming distance > 2; present when `upper` is.
    pub far_upper: Option<f64>,
    pub x: f64,
}

pub fn neutral_mutation_bounds(n: u64, i: u64, p: f64) -> Result<NeutralBounds> {
    check_neutral(n, i, p)?;
    let pairs = (i * (n - i)) as f64;
    let q = 1.0 - p;
    let lower = pairs * p * p * q.powf(n as f64 - 2.0);
    let x = pairs * p * p / (q * q);
    let valid = x <= 0.5;
    Ok(NeutralBounds {
        lower,
        upper: valid.then(|| lower * (1.0 + 2.0 * x)),
        far_upper: valid.then(|| 2.0 * pairs * pairs * p.powi(4) * q.powf(n as f64 - 4.0)),
        x,
    })
}

/// Neutral mutations at Hamming distance greater than 2 (terms `l >= 2`).
pub fn neutral_far_prob_exact(n: u64, i: u64, p: f64) -> Result<f64> {
    check_neutral(n, i, p)?;
    Ok(neutral_terms(n, i, p).skip(1).sum())
}

/// Bound `p (n-i+1) e^((pn)^2/4 + 1)` on the probability that mutation of
/// a parent with fewer than `i` ones yields exactly `i` ones.
pub fn jump_prob_bound(n: u64, i: u64, p: f64) -> Result<BoundReport> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid("p", format!("p={p} outside (0, 1)")));
    }
    if i == 0 || i > n {
        return Err(Error::invalid("i", format!("i={i} outside 1..=n={n}")));
    }
    let pn = p * n as f64;
    let value = p * (n - i + 1) as f64 * (pn * pn / 4.0 + 1.0).exp();
    Ok(BoundReport::new(FormulaId::JumpProbBound, value, false))
}

/// Largest probability, over parent levels below `i`, of landing on level `i`.
pub fn max_jump_prob(n: u64, i: u64, p: f64) -> Result<(f64, u64)> {
    if i == 0 || i > n {
        return Err(Error::invalid("i", format!("i={i} outside 1..=n={n}")));
    }
    let mut best = (f64::MIN, 0);
    for from in 0..i {
        let prob = level_transition_prob(n, from, i, p)?;
        if prob > best.0 {
            best = (prob, from);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_bit_neutral_probability() {
        assert!((neutral_mutation_prob_exact(2, 1, 0.5).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn neutral_domain() {
        assert!(neutral_mutation_prob_exact(10, 0, 0.1).is_err());
        assert!(neutral_mutation_prob_exact(10, 10, 0.1).is_err());
        assert!(neutral_mutation_prob_exact(10, 3, 0.6).is_err());
        assert!(neutral_mutation_prob_exact(10, 3, 0.0).is_err());
    }

    #[test]
    fn neutral_bounds_hold_on_small_grid() {
        for n in [10u64, 50, 200] {
            for i in [1, n / 3, n / 2, n - 1] {
                for c in [0.1, 0.5, 1.0] {
                    let p = c / n as f64;
                    let exact = neutral_mutation_prob_exact(n, i, p).unwrap();
                    let b = neutral_mutation_bounds(n, i, p).unwrap();
                    assert!(exact >= b.lower * (1.0 - 1e-12));
                    if let Some(up) = b.upper {
                        assert!(exact <= up * (1.0 + 1e-12));
                        let far = neutral_far_prob_exact(n, i, p).unwrap();
                        assert!(far <= b.far_upper.unwrap() * (1.0 + 1e-12));
                    }
                }
            }
        }
    }

    #[test]
    fn transitions_form_a_distribution() {
        for (n, p) in [(12u64, 0.1), (30, 0.5), (7, 0.9)] {
            for from in 0..=n {
                let total: f64 = (0..=n).map(|to| level_transition_prob(n, from, to, p).unwrap()).sum();
                assert!((total - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn jump_bound_value() {
        let r = jump_prob_bound(10, 10, 0.1).unwrap();
        assert!((r.value - 0.1 * 1.25f64.exp()).abs() < 1e-15);
        assert!((r.value - 0.349).abs() < 5e-4);
        assert!(!r.dominant_only);
        assert!(jump_prob_bound(10, 0, 0.1).is_err());
        assert!(jump_prob_bound(10, 11, 0.1).is_err());
    }
}
