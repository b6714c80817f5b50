//! Fixed-length bit strings packed into 64-bit words.
//!
//! Positions are 0-based in code: index `j` holds the gene written as
//! position `j + 1` in the usual 1..n notation. Bits beyond `len` in the
//! last word are always zero, so word-level equality, hashing and popcount
//! are exact.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bitstring {
    words: Vec<u64>,
    len: usize,
}

#[inline]
fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

#[inline]
fn tail_mask(len: usize) -> u64 {
    match len % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

impl Bitstring {
    pub fn zeros(len: usize) -> Self {
        Bitstring {
            words: vec![0; word_count(len)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut words = vec![u64::MAX; word_count(len)];
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        Bitstring { words, len }
    }

    /// Uniformly random string of length `len`.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let words = (0..word_count(len)).map(|_| rng.random::<u64>()).collect();
        Self::from_words(words, len)
    }

    /// Builds a string from raw words; bits past `len` are cleared.
    pub fn from_words(mut words: Vec<u64>, len: usize) -> Self {
        words.resize(word_count(len), 0);
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        Bitstring { words, len }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut out = Self::zeros(bits.len());
        for (j, &b) in bits.iter().enumerate() {
            if b {
                out.set(j, true);
            }
        }
        out
    }

    /// String with exactly the given (0-based) positions set.
    pub fn with_ones_at(len: usize, positions: &[usize]) -> Self {
        let mut out = Self::zeros(len);
        for &j in positions {
            out.set(j, true);
        }
        out
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, j: usize) -> bool {
        debug_assert!(j < self.len);
        (self.words[j >> 6] >> (j & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, j: usize, value: bool) {
        assert!(j < self.len, "bit index {j} out of range for length {}", self.len);
        let bit = 1u64 << (j & 63);
        if value {
            self.words[j >> 6] |= bit;
        } else {
            self.words[j >> 6] &= !bit;
        }
    }

    #[inline]
    pub fn flip(&mut self, j: usize) {
        assert!(j < self.len, "bit index {j} out of range for length {}", self.len);
        self.words[j >> 6] ^= 1u64 << (j & 63);
    }

    /// Sets every position in `start..end` to 1.
    pub fn set_range(&mut self, start: usize, end: usize) {
        assert!(start <= end && end <= self.len, "range {start}..{end} out of bounds");
        let mut pos = start;
        while pos < end {
            let off = pos & 63;
            let take = (64 - off).min(end - pos);
            let mask = if take == 64 { u64::MAX } else { ((1u64 << take) - 1) << off };
            self.words[pos >> 6] |= mask;
            pos += take;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn complement(&self) -> Self {
        Self::from_words(self.words.iter().map(|w| !w).collect(), self.len)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |j| self.get(j))
    }

    /// Positions holding a 1, ascending.
    pub fn ones_positions(&self) -> impl Iterator<Item = usize> + '_ {
        set_bits(&self.words)
    }

    /// Positions where `self` and `other` differ, ascending.
    pub fn differing_positions<'a>(&'a self, other: &'a Bitstring) -> impl Iterator<Item = usize> + 'a {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .enumerate()
            .flat_map(|(w, (a, b))| WordBits {
                base: w * 64,
                word: a ^ b,
            })
    }

    pub fn hamming_distance(&self, other: &Bitstring) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub(crate) fn check_len(&self, expected: usize) -> Result<()> {
        if self.len != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: self.len,
            });
        }
        Ok(())
    }
}

struct WordBits {
    base: usize,
    word: u64,
}

impl Iterator for WordBits {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.word == 0 {
            return None;
        }
        let tz = self.word.trailing_zeros() as usize;
        self.word &= self.word - 1;
        Some(self.base + tz)
    }
}

fn set_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(w, &word)| WordBits {
        base: w * 64,
        word,
    })
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bitstring({self})")
    }
}

impl FromStr for Bitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = Bitstring::zeros(s.len());
        for (j, ch) in s.char_indices() {
            match ch {
                '0' => {}
                '1' => out.set(j, true),
                _ => return Err(Error::parse(s, j, "expected '0' or '1'")),
            }
        }
        Ok(out)
    }
}
