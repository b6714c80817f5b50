//! Mutation, crossover, parent selection and cut selection with the
//! duplicate-aware tie-breaking rules.

use std::collections::HashMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Geometric};

use crate::bitstring::Bitstring;
use crate::error::{Error, Result};
use crate::fitness::FitnessValue;

/// A population member. `fitness` is always the value of `genotype` under
/// the objective that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub genotype: Bitstring,
    pub fitness: FitnessValue,
    pub birth_generation: u64,
}

impl Individual {
    pub fn new(genotype: Bitstring, fitness: FitnessValue, birth_generation: u64) -> Self {
        Individual {
            genotype,
            fitness,
            birth_generation,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossoverKind {
    Uniform,
    /// `k` cutting points drawn from the `n - 1` sites between genes.
    KPoint(usize),
}

impl fmt::Display for CrossoverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CrossoverKind::Uniform => write!(f, "uniform"),
            CrossoverKind::KPoint(k) => write!(f, "kpoint:{k}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TieBreakKind {
    /// Fewest duplicates first, then uniformly at random.
    DupRnd,
    /// Fewest duplicates first, then oldest first, then uniformly at random.
    DupOld,
}

impl fmt::Display for TieBreakKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TieBreakKind::DupRnd => "dup-rnd",
            TieBreakKind::DupOld => "dup-old",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParentSelectionKind {
    /// Uniform over the population slots.
    UniformOverPopulation,
    /// Uniform over the slots holding the current best fitness.
    GreedyOverBest,
}

impl fmt::Display for ParentSelectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParentSelectionKind::UniformOverPopulation => "uniform",
            ParentSelectionKind::GreedyOverBest => "greedy",
        })
    }
}

/// Standard bit mutation with a fixed rate.
///
/// Flip positions are generated by geometric skipping, so the cost is
/// proportional to the number of flips rather than to `n`.
#[derive(Clone, Debug)]
pub struct BitMutation {
    rate: f64,
    gaps: Option<Geometric>,
}

impl BitMutation {
    pub fn new(rate: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rate) {
            return Err(Error::invalid("p", format!("mutation rate {rate} outside [0, 1]")));
        }
        let gaps = if rate > 0.0 && rate < 1.0 {
            Some(Geometric::new(rate).map_err(|e| Error::invalid("p", e.to_string()))?)
        } else {
            None
        };
        Ok(BitMutation { rate, gaps })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Mutates `x` in place and returns the number of flipped bits.
    pub fn apply<R: Rng + ?Sized>(&self, x: &mut Bitstring, rng: &mut R) -> usize {
        let n = x.len();
        match &self.gaps {
            None if self.rate >= 1.0 => {
                *x = x.complement();
                n
            }
            None => 0,
            Some(gaps) => {
                let mut flips = 0;
                let mut pos: u64 = 0;
                loop {
                    pos = pos.saturating_add(gaps.sample(rng));
                    if pos >= n as u64 {
                        return flips;
                    }
                    x.flip(pos as usize);
                    flips += 1;
                    pos += 1;
                }
            }
        }
    }
}

/// Returns a copy of `x` with every bit flipped independently with
/// probability `p`.
pub fn standard_bit_mutation<R: Rng + ?Sized>(x: &Bitstring, p: f64, rng: &mut R) -> Result<Bitstring> {
    let op = BitMutation::new(p)?;
    let mut y = x.clone();
    op.apply(&mut y, rng);
    Ok(y)
}

fn check_same_len(x1: &Bitstring, x2: &Bitstring) -> Result<()> {
    x2.check_len(x1.len())
}

/// Takes each gene from `x1` or `x2` with probability 1/2 each.
pub fn uniform_crossover<R: Rng + ?Sized>(x1: &Bitstring, x2: &Bitstring, rng: &mut R) -> Result<Bitstring> {
    check_same_len(x1, x2)?;
    let words = x1
        .words()
        .iter()
        .zip(x2.words())
        .map(|(a, b)| {
            let mask: u64 = rng.random();
            (a & mask) | (b & !mask)
        })
        .collect();
    Ok(Bitstring::from_words(words, x1.len()))
}

/// k-point crossover with `k` cutting points drawn uniformly without
/// replacement from `1..=n-1`.
pub fn k_point_crossover<R: Rng + ?Sized>(
    x1: &Bitstring,
    x2: &Bitstring,
    k: usize,
    rng: &mut R,
) -> Result<Bitstring> {
    check_same_len(x1, x2)?;
    let n = x1.len();
    if k == 0 || k >= n {
        return Err(Error::invalid("k", format!("{k} cutting points need 1 <= k <= n-1 = {}", n.saturating_sub(1))));
    }
    let mut cuts: Vec<usize> = rand::seq::index::sample(rng, n - 1, k).into_iter().map(|c| c + 1).collect();
    cuts.sort_unstable();
    k_point_crossover_at(x1, x2, &cuts)
}

/// Splices `x1` and `x2` at the given cutting points.
///
/// Cutting point `a` (in `1..=n-1`) ends a segment after the first `a`
/// genes. Segments alternate between the parents, starting with `x1`.
pub fn k_point_crossover_at(x1: &Bitstring, x2: &Bitstring, cuts: &[usize]) -> Result<Bitstring> {
    check_same_len(x1, x2)?;
    let n = x1.len();
    if cuts.windows(2).any(|w| w[0] >= w[1]) || cuts.iter().any(|&c| c == 0 || c >= n) {
        return Err(Error::invalid("cuts", format!("{cuts:?} must be strictly increasing within 1..={}", n.saturating_sub(1))));
    }
    // Mask of positions inherited from x2.
    let mut from_second = Bitstring::zeros(n);
    for pair in cuts.chunks(2) {
        let start = pair[0];
        let end = pair.get(1).copied().unwrap_or(n);
        from_second.set_range(start, end);
    }
    let words = x1
        .words()
        .iter()
        .zip(x2.words())
        .zip(from_second.words())
        .map(|((a, b), m)| (a & !m) | (b & m))
        .collect();
    Ok(Bitstring::from_words(words, n))
}

impl CrossoverKind {
    pub fn apply<R: Rng + ?Sized>(&self, x1: &Bitstring, x2: &Bitstring, rng: &mut R) -> Result<Bitstring> {
        match *self {
            CrossoverKind::Uniform => uniform_crossover(x1, x2, rng),
            CrossoverKind::KPoint(k) => k_point_crossover(x1, x2, k, rng),
        }
    }
}

/// Index of the selected parent.
pub fn select_parent_index<R: Rng + ?Sized>(
    population: &[Individual],
    kind: ParentSelectionKind,
    rng: &mut R,
) -> Result<usize> {
    if population.is_empty() {
        return Err(Error::Empty("population"));
    }
    match kind {
        ParentSelectionKind::UniformOverPopulation => Ok(rng.random_range(0..population.len())),
        ParentSelectionKind::GreedyOverBest => {
            let best = population.iter().map(|ind| &ind.fitness).max().expect("non-empty");
            let slots = population.iter().filter(|ind| &ind.fitness == best).count();
            let pick = rng.random_range(0..slots);
            Ok(population
                .iter()
                .enumerate()
                .filter(|(_, ind)| &ind.fitness == best)
                .nth(pick)
                .map(|(i, _)| i)
                .expect("pick < slots"))
        }
    }
}

pub fn select_parent<'a, R: Rng + ?Sized>(
    population: &'a [Individual],
    kind: ParentSelectionKind,
    rng: &mut R,
) -> Result<&'a Individual> {
    select_parent_index(population, kind, rng).map(|i| &population[i])
}

/// Number of copies of each member's genotype within `pool` (itself included).
pub fn duplicate_counts(pool: &[Individual]) -> Vec<usize> {
    if pool.len() <= 32 {
        return pool
            .iter()
            .map(|a| pool.iter().filter(|b| b.genotype == a.genotype).count())
            .collect();
    }
    let mut counts: HashMap<&Bitstring, usize> = HashMap::new();
    for ind in pool {
        *counts.entry(&ind.genotype).or_default() += 1;
    }
    pool.iter().map(|ind| counts[&ind.genotype]).collect()
}

/// Keeps the `mu` best of `parents` ∪ `offspring`.
///
/// Candidates are admitted by descending fitness, then ascending duplicate
/// count within the whole union, then by `tiebreak`. Duplicate counts are
/// computed once, before admission. Remaining ties are resolved uniformly
/// at random.
pub fn environmental_selection<R: Rng + ?Sized>(
    parents: Vec<Individual>,
    offspring: Vec<Individual>,
    mu: usize,
    tiebreak: TieBreakKind,
    rng: &mut R,
) -> Result<Vec<Individual>> {
    if mu == 0 {
        return Err(Error::invalid("mu", "must be at least 1"));
    }
    let mut pool = parents;
    pool.extend(offspring);
    if pool.is_empty() {
        return Err(Error::Empty("parents and offspring"));
    }
    if pool.len() < mu {
        return Err(Error::invalid("mu", format!("{mu} exceeds the {} available individuals", pool.len())));
    }
    pool.shuffle(rng);
    let dups = duplicate_counts(&pool);
    let mut order: Vec<usize> = (0..pool.len()).collect();
    // Stable sort keeps the shuffled order among full ties.
    order.sort_by(|&a, &b| {
        let (ia, ib) = (&pool[a], &pool[b]);
        ib.fitness
            .cmp(&ia.fitness)
            .then(dups[a].cmp(&dups[b]))
            .then(match tiebreak {
                TieBreakKind::DupRnd => std::cmp::Ordering::Equal,
                TieBreakKind::DupOld => ia.birth_generation.cmp(&ib.birth_generation),
            })
    });
    let mut keep = vec![false; pool.len()];
    for &i in &order[..mu] {
        keep[i] = true;
    }
    Ok(pool
        .into_iter()
        .zip(keep)
        .filter_map(|(ind, k)| k.then_some(ind))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;

    fn ind(bits: &str, fit: u64, birth: u64) -> Individual {
        Individual::new(bits.parse().unwrap(), FitnessValue::Count(fit), birth)
    }

    fn genotypes(pop: &[Individual]) -> Vec<String> {
        let mut g: Vec<String> = pop.iter().map(|i| i.genotype.to_string()).collect();
        g.sort();
        g
    }

    #[test]
    fn mutation_extreme_rates() {
        let mut rng = rng_from_seed(1);
        let x: Bitstring = "1100101".parse().unwrap();
        assert_eq!(standard_bit_mutation(&x, 0.0, &mut rng).unwrap(), x);
        assert_eq!(standard_bit_mutation(&x, 1.0, &mut rng).unwrap(), x.complement());
        assert!(standard_bit_mutation(&x, 1.5, &mut rng).is_err());
        assert!(standard_bit_mutation(&x, -0.1, &mut rng).is_err());
    }

    #[test]
    fn mutation_flip_count_matches_binomial_mean() {
        let mut rng = rng_from_seed(2);
        let op = BitMutation::new(1.0 / 1000.0).unwrap();
        let base = Bitstring::zeros(1000);
        let trials = 100_000;
        let mut total = 0usize;
        for _ in 0..trials {
            let mut y = base.clone();
            let flips = op.apply(&mut y, &mut rng);
            assert_eq!(flips, y.count_ones());
            total += flips;
        }
        let mean = total as f64 / trials as f64;
        assert!((mean - 1.0).abs() <= 0.03, "mean flips {mean}");
    }

    #[test]
    fn mutation_is_position_uniform() {
        // Each of 8 positions should flip with probability p = 0.3.
        let mut rng = rng_from_seed(3);
        let op = BitMutation::new(0.3).unwrap();
        let trials = 200_000;
        let mut hits = [0usize; 8];
        for _ in 0..trials {
            let mut y = Bitstring::zeros(8);
            op.apply(&mut y, &mut rng);
            for j in y.ones_positions() {
                hits[j] += 1;
            }
        }
        let se = (0.3f64 * 0.7 / trials as f64).sqrt();
        for h in hits {
            let freq = h as f64 / trials as f64;
            assert!((freq - 0.3).abs() < 5.0 * se, "freq {freq}");
        }
    }

    #[test]
    fn uniform_crossover_two_bit_distribution() {
        let mut rng = rng_from_seed(4);
        let x1: Bitstring = "10".parse().unwrap();
        let x2: Bitstring = "01".parse().unwrap();
        let trials = 40_000;
        let mut counts: HashMap<String, usize> = HashMap::new();
        for _ in 0..trials {
            *counts.entry(uniform_crossover(&x1, &x2, &mut rng).unwrap().to_string()).or_default() += 1;
        }
        assert_eq!(counts.len(), 4);
        let se = (0.25f64 * 0.75 / trials as f64).sqrt();
        for (_, c) in counts {
            assert!((c as f64 / trials as f64 - 0.25).abs() < 5.0 * se);
        }
    }

    #[test]
    fn crossovers_reject_length_mismatch() {
        let mut rng = rng_from_seed(5);
        let a: Bitstring = "101".parse().unwrap();
        let b: Bitstring = "1010".parse().unwrap();
        assert!(uniform_crossover(&a, &b, &mut rng).is_err());
        assert!(k_point_crossover(&a, &b, 1, &mut rng).is_err());
    }

    #[test]
    fn one_point_splice() {
        let x1: Bitstring = "1111".parse().unwrap();
        let x2: Bitstring = "0000".parse().unwrap();
        assert_eq!(k_point_crossover_at(&x1, &x2, &[2]).unwrap().to_string(), "1100");
        assert_eq!(k_point_crossover_at(&x1, &x2, &[1, 3]).unwrap().to_string(), "1001");
        assert_eq!(k_point_crossover_at(&x1, &x2, &[1, 2, 3]).unwrap().to_string(), "1010");
        assert!(k_point_crossover_at(&x1, &x2, &[0]).is_err());
        assert!(k_point_crossover_at(&x1, &x2, &[4]).is_err());
        assert!(k_point_crossover_at(&x1, &x2, &[2, 2]).is_err());
    }

    #[test]
    fn k_point_range_checked() {
        let mut rng = rng_from_seed(6);
        let x = Bitstring::ones(5);
        assert!(k_point_crossover(&x, &x, 0, &mut rng).is_err());
        assert!(k_point_crossover(&x, &x, 5, &mut rng).is_err());
        assert_eq!(k_point_crossover(&x, &x, 4, &mut rng).unwrap(), x);
    }

    #[test]
    fn one_point_gain_probability_is_d_over_n() {
        // n = 6, parents differ at positions 2 and 4 (1-based): d = 2, N = 5.
        let x1: Bitstring = "010000".parse().unwrap();
        let x2: Bitstring = "000100".parse().unwrap();
        let gains = (1..=5)
            .filter(|&a| k_point_crossover_at(&x1, &x2, &[a]).unwrap().count_ones() > 1)
            .count();
        assert_eq!(gains, 2);
    }

    #[test]
    fn greedy_selection_prefers_best() {
        let mut rng = rng_from_seed(7);
        let pop = vec![ind("000", 3, 0), ind("111", 5, 0)];
        for _ in 0..200 {
            assert_eq!(
                select_parent_index(&pop, ParentSelectionKind::GreedyOverBest, &mut rng).unwrap(),
                1
            );
        }
        assert!(select_parent_index(&[], ParentSelectionKind::UniformOverPopulation, &mut rng).is_err());
    }

    #[test]
    fn greedy_selection_splits_ties_evenly() {
        let mut rng = rng_from_seed(8);
        let pop = vec![ind("110", 2, 0), ind("000", 0, 0), ind("011", 2, 0)];
        let draws = 10_000;
        let first = (0..draws)
            .filter(|_| select_parent_index(&pop, ParentSelectionKind::GreedyOverBest, &mut rng).unwrap() == 0)
            .count();
        assert!((first as f64 / draws as f64 - 0.5).abs() <= 0.02);
    }

    #[test]
    fn uniform_selection_covers_all_slots() {
        let mut rng = rng_from_seed(9);
        let pop = vec![ind("11", 2, 0); 4];
        let draws = 40_000;
        let mut hits = [0usize; 4];
        for _ in 0..draws {
            hits[select_parent_index(&pop, ParentSelectionKind::UniformOverPopulation, &mut rng).unwrap()] += 1;
        }
        for h in hits {
            assert!((h as f64 / draws as f64 - 0.25).abs() < 0.015);
        }
    }

    #[test]
    fn duplicates_removed_first() {
        let mut rng = rng_from_seed(10);
        for tie in [TieBreakKind::DupRnd, TieBreakKind::DupOld] {
            for _ in 0..50 {
                let out = environmental_selection(
                    vec![ind("1100", 5, 0), ind("1100", 5, 0)],
                    vec![ind("0011", 5, 1)],
                    2,
                    tie,
                    &mut rng,
                )
                .unwrap();
                assert_eq!(genotypes(&out), vec!["0011", "1100"]);
            }
        }
    }

    #[test]
    fn dup_old_keeps_older_individuals() {
        let mut rng = rng_from_seed(11);
        for _ in 0..50 {
            let out = environmental_selection(
                vec![ind("1100", 5, 3), ind("1010", 5, 7)],
                vec![ind("0110", 5, 8)],
                2,
                TieBreakKind::DupOld,
                &mut rng,
            )
            .unwrap();
            assert_eq!(genotypes(&out), vec!["1010", "1100"]);
        }
    }

    #[test]
    fn dup_rnd_breaks_remaining_ties_uniformly() {
        let mut rng = rng_from_seed(12);
        let trials = 30_000;
        let mut dropped = HashMap::new();
        for _ in 0..trials {
            let out = environmental_selection(
                vec![ind("1100", 5, 0), ind("1010", 5, 0)],
                vec![ind("0110", 5, 1)],
                2,
                TieBreakKind::DupRnd,
                &mut rng,
            )
            .unwrap();
            let kept = genotypes(&out);
            let gone = ["0110", "1010", "1100"].into_iter().find(|g| !kept.contains(&g.to_string())).unwrap();
            *dropped.entry(gone).or_insert(0usize) += 1;
        }
        for (_, c) in dropped {
            assert!((c as f64 / trials as f64 - 1.0 / 3.0).abs() < 0.015);
        }
    }

    #[test]
    fn fitter_offspring_always_enter() {
        let mut rng = rng_from_seed(13);
        let out = environmental_selection(
            vec![ind("1000", 1, 0), ind("0100", 1, 0), ind("0010", 1, 0)],
            vec![ind("1100", 2, 1), ind("1110", 3, 1)],
            3,
            TieBreakKind::DupRnd,
            &mut rng,
        )
        .unwrap();
        assert_eq!(out.len(), 3);
        let fits: Vec<u64> = out.iter().map(|i| i.fitness.as_f64() as u64).collect();
        assert!(fits.contains(&2) && fits.contains(&3));
    }

    #[test]
    fn selection_rejects_bad_sizes() {
        let mut rng = rng_from_seed(14);
        assert!(environmental_selection(vec![ind("1", 1, 0)], vec![], 0, TieBreakKind::DupRnd, &mut rng).is_err());
        assert!(environmental_selection(vec![], vec![], 1, TieBreakKind::DupRnd, &mut rng).is_err());
        assert!(environmental_selection(vec![ind("1", 1, 0)], vec![], 2, TieBreakKind::DupRnd, &mut rng).is_err());
    }
}
