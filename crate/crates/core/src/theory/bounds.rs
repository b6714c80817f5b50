//! Runtime bounds on OneMax for mutation-only EAs and for (μ+λ) GAs.
//!
//! Logarithms are natural. Terms the bounds state only asymptotically are
//! never given a constant; such reports carry `dominant_only = true`.

use std::sync::OnceLock;

use super::{BoundReport, FormulaId};
use crate::error::{Error, Result};

fn require(cond: bool, name: &'static str, reason: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::invalid(name, reason()))
    }
}

/// Lower bound on the expected optimization time of any EA using only
/// standard bit mutation with rate `p`, valid for
/// `2^(-n/3) <= p <= 1/(sqrt(n) ln n)`:
///
/// `(min{ln n, ln(1/(p^2 n))} - ln ln n - 3) / (p (1-p)^n)`
pub fn lb_mutation_based(n: u64, p: f64) -> Result<BoundReport> {
    require(n >= 2, "n", || format!("n={n} must be at least 2"))?;
    let nf = n as f64;
    let lo = (-nf / 3.0).exp2();
    let hi = 1.0 / (nf.sqrt() * nf.ln());
    require(p >= lo, "p", || format!("p={p} violates p >= 2^(-n/3) = {lo:e}"))?;
    require(p <= hi, "p", || format!("p={p} violates p <= 1/(sqrt(n) ln n) = {hi:e}"))?;
    let log_term = nf.ln().min((1.0 / (p * p * nf)).ln());
    let value = (log_term - nf.ln().ln() - 3.0) / (p * (1.0 - p).powf(nf));
    Ok(BoundReport::new(FormulaId::LbMutationBased, value, false))
}

/// `1 / (c e^-c (1+c))`, the coefficient of `n ln n` in the leading term
/// for mutation rate `c/n`.
pub fn runtime_coefficient(c: f64) -> f64 {
    1.0 / (c * (-c).exp() * (1.0 + c))
}

/// Leading term `n ln n / (c e^-c (1+c))` of the GA upper bound at `p = c/n`.
pub fn ub_ga_dominant(n: u64, c: f64) -> Result<BoundReport> {
    require(c > 0.0 && c.is_finite(), "c", || format!("c={c} must be positive"))?;
    let nf = n as f64;
    Ok(BoundReport::new(
        FormulaId::UbGaDominant,
        nf * nf.ln() * runtime_coefficient(c),
        true,
    ))
}

/// Explicit first term of the GA upper bound for general `p`:
///
/// `(ln(n^2 p + n) + 1 + p) / (p (1-p)^(n-1) (1 + n p))`
///
/// The second term, `O((μ+λ) n log μ) / (1-p)^n`, has no stated constant.
/// Its shape `(μ+λ) n ln μ / (1-p)^n` is reported in `remainder_shape`
/// and never added to `value`.
pub fn ub_ga_full(n: u64, p: f64, mu: u64, lambda: u64) -> Result<BoundReport> {
    require(p > 0.0 && p < 1.0, "p", || format!("p={p} outside (0, 1)"))?;
    require(mu >= 2, "mu", || format!("mu={mu} must be at least 2"))?;
    require(n >= 1, "n", || "n must be positive".to_string())?;
    let nf = n as f64;
    let numerator = (nf * nf * p + nf).ln() + 1.0 + p;
    let denominator = p * (1.0 - p).powf(nf - 1.0) * (1.0 + nf * p);
    let shape = (mu + lambda) as f64 * nf * (mu as f64).ln() / (1.0 - p).powf(nf);
    let mut report = BoundReport::new(FormulaId::UbGaFull, numerator / denominator, true);
    report.remainder_shape = Some(shape);
    Ok(report)
}

/// `max_{k>=1} c^k / (k! k!)` and the smallest maximizing `k`.
///
/// Consecutive terms have ratio `c / (k+1)^2`, which decreases in `k`, so
/// the scan stops at the first strict decrease.
pub fn max_term(c: f64) -> Result<(f64, u32)> {
    require(c > 0.0 && c.is_finite(), "c", || format!("c={c} must be positive"))?;
    let (mut best, mut best_k) = (c, 1u32);
    let mut term = c;
    let mut k = 1u32;
    loop {
        let next = term * c / f64::from((k + 1) * (k + 1));
        if next < term {
            return Ok((best, best_k));
        }
        k += 1;
        term = next;
        if term > best {
            best = term;
            best_k = k;
        }
    }
}

/// Leading term of the lower bound for the greedy (2+1) GA with any
/// mask-based crossover at `p = c/n`, valid for `0 < c <= 4` where
/// `max_term(c) = c`. It equals [`ub_ga_dominant`]; the `O(n log log n)`
/// correction has no stated constant.
pub fn lb_greedy_ga_dominant(n: u64, c: f64) -> Result<BoundReport> {
    require(c > 0.0, "c", || format!("c={c} must be positive"))?;
    require(c <= 4.0, "c", || format!("c={c} > 4: the k=1 term no longer dominates"))?;
    let (m, _) = max_term(c)?;
    let nf = n as f64;
    let value = nf * nf.ln() / ((1.0 + m) * c * (-c).exp());
    Ok(BoundReport::new(FormulaId::LbGreedyGaDominant, value, true))
}

/// Minimizer of [`runtime_coefficient`]: the golden ratio `(1 + sqrt 5)/2`.
///
/// On first use the closed form is checked against a grid scan of
/// `(0, 4]` with step `1e-6`.
pub fn optimal_c() -> f64 {
    let closed = (1.0 + 5f64.sqrt()) / 2.0;
    static SCANNED: OnceLock<f64> = OnceLock::new();
    let scanned = *SCANNED.get_or_init(|| scan_argmin_coefficient(1e-6, 4.0));
    assert!(
        (scanned - closed).abs() <= 2e-6,
        "grid argmin {scanned} disagrees with closed form {closed}"
    );
    closed
}

/// Grid argmin of [`runtime_coefficient`] over `step, 2 step, ..., <= upper`.
pub fn scan_argmin_coefficient(step: f64, upper: f64) -> f64 {
    let steps = (upper / step).round() as u64;
    let (mut best_c, mut best) = (step, f64::INFINITY);
    for j in 1..=steps {
        let c = j as f64 * step;
        let v = runtime_coefficient(c);
        if v < best {
            best = v;
            best_c = c;
        }
    }
    best_c
}
