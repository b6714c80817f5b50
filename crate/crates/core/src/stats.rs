//! Sample summaries and the Mann-Whitney U test.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SampleSummary {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single value.
    pub std: f64,
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

pub fn summarize(samples: &[f64]) -> Result<SampleSummary> {
    if samples.is_empty() {
        return Err(Error::Empty("samples"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let count = sorted.len();
    // Summing in sorted order makes the result independent of input order.
    let mean = sorted.iter().sum::<f64>() / count as f64;
    let std = if count > 1 {
        (sorted.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
    } else {
        0.0
    };
    let median = if count % 2 == 1 {
        sorted[count / 2]
    } else {
        0.5 * (sorted[count / 2 - 1] + sorted[count / 2])
    };
    Ok(SampleSummary {
        count,
        mean,
        std,
        min: sorted[0],
        median,
        max: sorted[count - 1],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MwuMode {
    /// Enumerate every split of the pooled ranks. Needs |a| + |b| <= 16.
    Exact,
    /// Normal approximation with tie and continuity correction.
    Approximate,
}

pub const EXACT_MAX_POOLED: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct MwuResult {
    /// U for the first sample: pairs (a_i, b_j) with a_i > b_j, ties counted 1/2.
    pub u_statistic: f64,
    /// Tie-corrected normal score of U, continuity-corrected toward zero.
    pub z_score: f64,
    pub p_value_two_sided: f64,
    /// Alternative: the first sample tends to be smaller.
    pub p_value_one_sided_first_less: f64,
    pub exact: bool,
}

/// Midranks (1-based) of the pooled sample.
pub fn midranks(pooled: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&i, &j| pooled[i].total_cmp(&pooled[j]));
    let mut ranks = vec![0.0; pooled.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && pooled[order[end]] == pooled[order[start]] {
            end += 1;
        }
        // Positions start..end share ranks start+1..=end.
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Sum over tie groups of t^3 - t.
fn tie_term(pooled: &[f64]) -> f64 {
    let mut sorted = pooled.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut total = 0.0;
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len() && sorted[end] == sorted[start] {
            end += 1;
        }
        let t = (end - start) as f64;
        total += t * t * t - t;
        start = end;
    }
    total
}

pub fn mann_whitney_u(a: &[f64], b: &[f64], mode: MwuMode) -> Result<MwuResult> {
    if a.is_empty() {
        return Err(Error::Empty("first sample"));
    }
    if b.is_empty() {
        return Err(Error::Empty("second sample"));
    }
    let (n1, n2) = (a.len(), b.len());
    let total = n1 + n2;
    if mode == MwuMode::Exact && total > EXACT_MAX_POOLED {
        return Err(Error::invalid(
            "mode",
            format!("exact enumeration supports at most {EXACT_MAX_POOLED} pooled values, got {total}"),
        ));
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = midranks(&pooled);
    let rank_sum_a: f64 = ranks[..n1].iter().sum();
    let offset = (n1 * (n1 + 1)) as f64 / 2.0;
    let u = rank_sum_a - offset;

    let (f1, f2, nn) = (n1 as f64, n2 as f64, total as f64);
    let mean = f1 * f2 / 2.0;
    let variance = f1 * f2 / 12.0 * ((nn + 1.0) - tie_term(&pooled) / (nn * (nn - 1.0)));
    let sigma = variance.max(0.0).sqrt();
    let normal = Normal::standard();

    let diff = u - mean;
    let z_score = if sigma > 0.0 {
        diff.signum() * (diff.abs() - 0.5).max(0.0) / sigma
    } else {
        0.0
    };

    let (p_two, p_less) = match mode {
        MwuMode::Approximate => {
            if sigma > 0.0 {
                let two = (2.0 * normal.cdf(-z_score.abs())).min(1.0);
                let less = normal.cdf((diff + 0.5) / sigma);
                (two, less)
            } else {
                (1.0, 1.0)
            }
        }
        MwuMode::Exact => exact_p_values(&ranks, n1, u, mean),
    };

    Ok(MwuResult {
        u_statistic: u,
        z_score,
        p_value_two_sided: p_two.clamp(0.0, 1.0),
        p_value_one_sided_first_less: p_less.clamp(0.0, 1.0),
        exact: mode == MwuMode::Exact,
    })
}

/// Permutation distribution of U over all C(N, n1) label assignments.
fn exact_p_values(ranks: &[f64], n1: usize, u_obs: f64, mean: f64) -> (f64, f64) {
    let total = ranks.len();
    let offset = (n1 * (n1 + 1)) as f64 / 2.0;
    let eps = 1e-9;
    let observed_dev = (u_obs - mean).abs();
    let (mut count, mut extreme, mut lower) = (0u64, 0u64, 0u64);
    // total <= 16, so masks and Gosper's successor fit in u32.
    let limit = 1u32 << total;
    let mut mask: u32 = (1u32 << n1) - 1;
    while mask < limit {
        let rank_sum: f64 = (0..total).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        let u = rank_sum - offset;
        count += 1;
        if (u - mean).abs() >= observed_dev - eps {
            extreme += 1;
        }
        if u <= u_obs + eps {
            lower += 1;
        }
        // Next subset of the same size (Gosper's hack).
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
    (extreme as f64 / count as f64, lower as f64 / count as f64)
}
