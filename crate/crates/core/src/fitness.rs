//! Objective functions over bit strings and generators for the random
//! function classes.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rand::distr::{Distribution, Uniform};
use rand::Rng;

use crate::bitstring::Bitstring;
use crate::error::{Error, Result};
use crate::seed;

/// A fitness value. Integer-valued objectives use `Count`, weighted linear
/// functions `Real`, and BinVal an exact big integer.
#[derive(Clone, Debug)]
pub enum FitnessValue {
    Count(u64),
    Real(f64),
    Big(BigUint),
}

impl FitnessValue {
    pub fn as_f64(&self) -> f64 {
        match self {
            FitnessValue::Count(v) => *v as f64,
            FitnessValue::Real(v) => *v,
            FitnessValue::Big(v) => {
                // Lossy by nature; only used for traces and reporting.
                v.to_string().parse().unwrap_or(f64::INFINITY)
            }
        }
    }
}

impl Ord for FitnessValue {
    fn cmp(&self, other: &Self) -> Ordering {
        use FitnessValue::*;
        match (self, other) {
            (Count(a), Count(b)) => a.cmp(b),
            (Real(a), Real(b)) => a.total_cmp(b),
            (Big(a), Big(b)) => a.cmp(b),
            (Count(a), Big(b)) => BigUint::from(*a).cmp(b),
            (Big(a), Count(b)) => a.cmp(&BigUint::from(*b)),
            (a, b) => a.as_f64().total_cmp(&b.as_f64()),
        }
    }
}

impl PartialOrd for FitnessValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for FitnessValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for FitnessValue {}

impl fmt::Display for FitnessValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitnessValue::Count(v) => write!(f, "{v}"),
            FitnessValue::Real(v) => write!(f, "{v}"),
            FitnessValue::Big(v) => write!(f, "{v}"),
        }
    }
}

/// Which objective, with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum FitnessKind {
    OneMax,
    /// Contiguous blocks of `block_size` bits; each complete block adds 1.
    RoyalRoad { block_size: usize },
    /// Each monomial is a set of distinct 0-based positions; each monomial
    /// whose positions are all 1 adds 1.
    MonotonePolynomial { monomials: Vec<Vec<usize>> },
    /// Sum of `weights[j]` over set positions `j`.
    Linear { weights: Vec<f64> },
    /// Position `j` (0-based) carries weight `2^(n-1-j)`.
    BinVal,
}

/// A concrete objective on `{0,1}^n`. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct FitnessSpec {
    n: usize,
    kind: FitnessKind,
}

impl FitnessSpec {
    pub fn new(n: usize, kind: FitnessKind) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "length must be positive"));
        }
        match &kind {
            FitnessKind::OneMax | FitnessKind::BinVal => {}
            FitnessKind::RoyalRoad { block_size } => {
                if *block_size == 0 || n % block_size != 0 {
                    return Err(Error::invalid(
                        "block_size",
                        format!("{block_size} must be positive and divide n={n}"),
                    ));
                }
            }
            FitnessKind::MonotonePolynomial { monomials } => {
                for (idx, mono) in monomials.iter().enumerate() {
                    if mono.is_empty() {
                        return Err(Error::invalid("monomials", format!("monomial {idx} is empty")));
                    }
                    let mut sorted = mono.clone();
                    sorted.sort_unstable();
                    sorted.dedup();
                    if sorted.len() != mono.len() {
                        return Err(Error::invalid(
                            "monomials",
                            format!("monomial {idx} repeats a position"),
                        ));
                    }
                    if let Some(&bad) = mono.iter().find(|&&j| j >= n) {
                        return Err(Error::invalid(
                            "monomials",
                            format!("monomial {idx} has position {bad} outside 0..{n}"),
                        ));
                    }
                }
            }
            FitnessKind::Linear { weights } => {
                if weights.len() != n {
                    return Err(Error::invalid(
                        "weights",
                        format!("expected {n} weights, got {}", weights.len()),
                    ));
                }
                if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
                    return Err(Error::invalid("weights", format!("weight {w} is not strictly positive")));
                }
            }
        }
        Ok(FitnessSpec { n, kind })
    }

    pub fn onemax(n: usize) -> Result<Self> {
        Self::new(n, FitnessKind::OneMax)
    }

    pub fn royal_road(n: usize, block_size: usize) -> Result<Self> {
        Self::new(n, FitnessKind::RoyalRoad { block_size })
    }

    pub fn polynomial(n: usize, monomials: Vec<Vec<usize>>) -> Result<Self> {
        Self::new(n, FitnessKind::MonotonePolynomial { monomials })
    }

    pub fn linear(weights: Vec<f64>) -> Result<Self> {
        Self::new(weights.len(), FitnessKind::Linear { weights })
    }

    pub fn binval(n: usize) -> Result<Self> {
        Self::new(n, FitnessKind::BinVal)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &FitnessKind {
        &self.kind
    }

    /// Value of the all-ones string, the global maximum of every in-scope
    /// (monotone) objective.
    pub fn optimum(&self) -> FitnessValue {
        self.eval_unchecked(&Bitstring::ones(self.n))
    }

    /// True when distinct strings always get distinct values.
    pub fn is_injective(&self) -> bool {
        matches!(self.kind, FitnessKind::BinVal)
    }

    pub fn evaluate(&self, x: &Bitstring) -> Result<FitnessValue> {
        x.check_len(self.n)?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &Bitstring) -> FitnessValue {
        match &self.kind {
            FitnessKind::OneMax => FitnessValue::Count(x.count_ones() as u64),
            FitnessKind::RoyalRoad { block_size } => {
                let complete = (0..self.n / block_size)
                    .filter(|b| range_all_ones(x.words(), b * block_size, *block_size))
                    .count();
                FitnessValue::Count(complete as u64)
            }
            FitnessKind::MonotonePolynomial { monomials } => {
                let satisfied = monomials
                    .iter()
                    .filter(|mono| mono.iter().all(|&j| x.get(j)))
                    .count();
                FitnessValue::Count(satisfied as u64)
            }
            FitnessKind::Linear { weights } => {
                // Ascending position order; the optimum is computed the same
                // way so equality with it is exact.
                let mut sum = 0.0;
                for (w, bit) in weights.iter().zip(x.iter()) {
                    if bit {
                        sum += w;
                    }
                }
                FitnessValue::Real(sum)
            }
            FitnessKind::BinVal => {
                // Position 0 is the most significant bit.
                let mut bytes = vec![0u8; self.n.div_ceil(8)];
                for j in x.ones_positions() {
                    let e = self.n - 1 - j;
                    bytes[e / 8] |= 1 << (e % 8);
                }
                FitnessValue::Big(BigUint::from_bytes_le(&bytes))
            }
        }
    }
}

fn range_all_ones(words: &[u64], start: usize, len: usize) -> bool {
    let mut pos = start;
    let end = start + len;
    while pos < end {
        let w = pos >> 6;
        let off = pos & 63;
        let take = (64 - off).min(end - pos);
        let mask = if take == 64 { u64::MAX } else { ((1u64 << take) - 1) << off };
        if words[w] & mask != mask {
            return false;
        }
        pos += take;
    }
    true
}

/// `m` monomials of `degree` distinct positions each, every monomial drawn
/// independently and uniformly without replacement from `0..n`.
pub fn generate_random_polynomial<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    degree: usize,
    rng: &mut R,
) -> Result<FitnessSpec> {
    if degree == 0 || degree > n {
        return Err(Error::invalid("degree", format!("{degree} must lie in 1..={n}")));
    }
    let monomials = (0..m)
        .map(|_| {
            let mut mono = rand::seq::index::sample(rng, n, degree).into_vec();
            mono.sort_unstable();
            mono
        })
        .collect();
    FitnessSpec::polynomial(n, monomials)
}

/// `n` weights drawn i.i.d. uniformly from `[lo, hi]`.
pub fn generate_random_linear<R: Rng + ?Sized>(n: usize, lo: f64, hi: f64, rng: &mut R) -> Result<FitnessSpec> {
    if !(lo > 0.0 && lo < hi && hi.is_finite()) {
        return Err(Error::invalid("lo/hi", format!("need 0 < lo < hi, got lo={lo}, hi={hi}")));
    }
    let dist = Uniform::new_inclusive(lo, hi).map_err(|e| Error::invalid("lo/hi", e.to_string()))?;
    let weights = (0..n).map(|_| dist.sample(rng)).collect();
    FitnessSpec::linear(weights)
}

/// Textual recipe for a fitness function. Random classes carry a seed and
/// are instantiated once per run index.
#[derive(Clone, Debug, PartialEq)]
pub enum FunctionRecipe {
    OneMax,
    RoyalRoad { block_size: usize },
    RandomPoly { monomials: usize, degree: usize, seed: u64 },
    Linear { lo: f64, hi: f64, seed: u64 },
    BinVal,
}

impl FunctionRecipe {
    /// Whether a fresh function is drawn for every run.
    pub fn is_random(&self) -> bool {
        matches!(self, FunctionRecipe::RandomPoly { .. } | FunctionRecipe::Linear { .. })
    }

    /// Builds the function used by run `instance`. Deterministic recipes
    /// ignore `instance`.
    pub fn instantiate(&self, n: usize, instance: u64) -> Result<FitnessSpec> {
        match *self {
            FunctionRecipe::OneMax => FitnessSpec::onemax(n),
            FunctionRecipe::RoyalRoad { block_size } => FitnessSpec::royal_road(n, block_size),
            FunctionRecipe::BinVal => FitnessSpec::binval(n),
            FunctionRecipe::RandomPoly { monomials, degree, seed: s } => {
                let mut rng = seed::rng_from_seed(seed::mix(s, instance));
                generate_random_polynomial(n, monomials, degree, &mut rng)
            }
            FunctionRecipe::Linear { lo, hi, seed: s } => {
                let mut rng = seed::rng_from_seed(seed::mix(s, instance));
                generate_random_linear(n, lo, hi, &mut rng)
            }
        }
    }
}

impl fmt::Display for FunctionRecipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionRecipe::OneMax => write!(f, "onemax"),
            FunctionRecipe::RoyalRoad { block_size } => write!(f, "royalroad:{block_size}"),
            FunctionRecipe::RandomPoly { monomials, degree, seed } => {
                write!(f, "randompoly:{monomials}:{degree}:{seed}")
            }
            FunctionRecipe::Linear { lo, hi, seed } => write!(f, "linear:{lo}:{hi}:{seed}"),
            FunctionRecipe::BinVal => write!(f, "binval"),
        }
    }
}

/// Splits `s` on `sep`, yielding each field with its byte offset.
pub(crate) fn fields(s: &str, sep: char) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        if ch == sep {
            out.push((start, &s[start..i]));
            start = i + ch.len_utf8();
        }
    }
    out.push((start, &s[start..]));
    out
}

pub(crate) fn parse_field<T: FromStr>(input: &str, field: (usize, &str), what: &str) -> Result<T> {
    field
        .1
        .parse()
        .map_err(|_| Error::parse(input, field.0, format!("expected {what}, found `{}`", field.1)))
}

impl FromStr for FunctionRecipe {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts = fields(s, ':');
        let arity = |want: usize| -> Result<()> {
            if parts.len() != want + 1 {
                let pos = parts.get(want + 1).map_or(s.len(), |p| p.0);
                return Err(Error::parse(
                    s,
                    pos,
                    format!("`{}` takes {want} argument(s), got {}", parts[0].1, parts.len() - 1),
                ));
            }
            Ok(())
        };
        match parts[0].1 {
            "onemax" => arity(0).map(|_| FunctionRecipe::OneMax),
            "binval" => arity(0).map(|_| FunctionRecipe::BinVal),
            "royalroad" => {
                arity(1)?;
                Ok(FunctionRecipe::RoyalRoad {
                    block_size: parse_field(s, parts[1], "block size")?,
                })
            }
            "randompoly" => {
                arity(3)?;
                Ok(FunctionRecipe::RandomPoly {
                    monomials: parse_field(s, parts[1], "monomial count")?,
                    degree: parse_field(s, parts[2], "degree")?,
                    seed: parse_field(s, parts[3], "seed")?,
                })
            }
            "linear" => {
                arity(3)?;
                Ok(FunctionRecipe::Linear {
                    lo: parse_field(s, parts[1], "lower weight bound")?,
                    hi: parse_field(s, parts[2], "upper weight bound")?,
                    seed: parse_field(s, parts[3], "seed")?,
                })
            }
            other => Err(Error::parse(
                s,
                0,
                format!("unknown function `{other}` (expected onemax, royalroad, randompoly, linear, binval)"),
            )),
        }
    }
}
