//! Finite binary words and finite-support integer sequences.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{pow2_inv, Rational};

/// A finite binary word. Digits are stored as `0`/`1` bytes.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Builds a word from digits, rejecting anything other than 0 and 1.
    pub fn from_digits(digits: Vec<u8>) -> Result<Self> {
        if let Some(bad) = digits.iter().find(|&&d| d > 1) {
            return Err(Error::Parse {
                kind: "word",
                input: format!("{digits:?}"),
                reason: format!("digit {bad} is not binary"),
            });
        }
        Ok(Word(digits))
    }

    /// Caller guarantees every digit is 0 or 1.
    pub(crate) fn from_vec_unchecked(digits: Vec<u8>) -> Self {
        debug_assert!(digits.iter().all(|&d| d <= 1));
        Word(digits)
    }

    pub fn repeat(digit: u8, count: usize) -> Self {
        assert!(digit <= 1);
        Word(vec![digit; count])
    }

    /// The `bits`-long binary representation of `value`, most significant digit first.
    pub fn from_bits(value: u64, bits: usize) -> Self {
        Word((0..bits).rev().map(|i| ((value >> i) & 1) as u8).collect())
    }

    pub fn digits(&self) -> &[u8] {
        &self.0
    }

    pub fn into_digits(self) -> Vec<u8> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ones(&self) -> usize {
        self.0.iter().filter(|&&d| d == 1).count()
    }

    pub fn last(&self) -> Option<u8> {
        self.0.last().copied()
    }

    pub fn complement(&self) -> Word {
        Word(self.0.iter().map(|d| 1 - d).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&mut self, digit: u8) {
        assert!(digit <= 1);
        self.0.push(digit);
    }

    pub fn extend_from(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn truncate(&self, k: usize) -> Word {
        Word(self.0[..k.min(self.len())].to_vec())
    }

    pub fn is_prefix_of(&self, digits: &[u8]) -> bool {
        digits.len() >= self.len() && &digits[..self.len()] == self.digits()
    }

    /// True when the word contains no factor `00`.
    pub fn is_simplest(&self) -> bool {
        !self.0.windows(2).any(|w| w == [0, 0])
    }

    /// Index (0-based) of the last `1`, if any.
    pub fn last_one(&self) -> Option<usize> {
        self.0.iter().rposition(|&d| d == 1)
    }

    /// The integer whose binary numeral is this word.
    pub fn to_bigint(&self) -> BigInt {
        let mut n = BigInt::zero();
        for &d in &self.0 {
            n <<= 1;
            if d == 1 {
                n += 1;
            }
        }
        n
    }

    /// `0.w` read as a finite binary expression, i.e. `xi(w 0 0 0 ...)`.
    pub fn value(&self) -> Rational {
        Rational::new(self.to_bigint(), BigInt::from(1) << self.len())
    }

    /// Inserts `0^(2 a_k)` immediately before the k-th one.
    pub fn insert_zero_pairs(&self, a: &NatSeq) -> Result<Word> {
        let found = self.ones();
        if found < a.len() {
            return Err(Error::TooFewOnes {
                needed: a.len(),
                found,
            });
        }
        Ok(Word(insert_pairs(&self.0, a.entries())))
    }
}

pub(crate) fn insert_pairs(digits: &[u8], a: &[u64]) -> Vec<u8> {
    let extra: u64 = a.iter().sum::<u64>() * 2;
    let mut out = Vec::with_capacity(digits.len() + extra as usize);
    let mut k = 0;
    for &d in digits {
        if d == 1 {
            if let Some(&ak) = a.get(k) {
                out.extend(std::iter::repeat_n(0u8, 2 * ak as usize));
            }
            k += 1;
        }
        out.push(d);
    }
    out
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for &d in &self.0 {
            f.write_str(if d == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Accepts bit strings; `""` and `"ε"` denote the empty word.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "ε" {
            return Ok(Word::empty());
        }
        t.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Parse {
                    kind: "word",
                    input: s.to_string(),
                    reason: format!("unexpected character {c:?}"),
                }),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Word)
    }
}

/// Shorthand for word literals in code and tests; panics on bad input.
pub fn w(s: &str) -> Word {
    s.parse().expect("valid word literal")
}

/// A finite-support element of `N^ω`: listed entries followed by zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NatSeq(Vec<u64>);

impl NatSeq {
    pub fn new(entries: Vec<u64>) -> Self {
        NatSeq(entries)
    }

    pub fn empty() -> Self {
        NatSeq(Vec::new())
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Entry `i` (0-based); unlisted entries are zero.
    pub fn get(&self, i: usize) -> u64 {
        self.0.get(i).copied().unwrap_or(0)
    }

    /// Drops trailing zeros, which carry no information.
    pub fn trimmed(&self) -> NatSeq {
        let mut v = self.0.clone();
        while v.last() == Some(&0) {
            v.pop();
        }
        NatSeq(v)
    }
}

impl FromStr for NatSeq {
    type Err = Error;

    /// Comma-separated entries, optionally wrapped in parentheses; `()` is empty.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')').trim();
        if t.is_empty() {
            return Ok(NatSeq::empty());
        }
        t.split(',')
            .map(|p| {
                p.trim().parse::<u64>().map_err(|_| Error::Parse {
                    kind: "sequence",
                    input: s.to_string(),
                    reason: format!("{p:?} is not a non-negative integer"),
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(NatSeq)
    }
}

impl fmt::Display for NatSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `0^{a_1} 1 0^{a_2} 1 ... 0^{a_m} 1` for the listed entries.
pub fn eta_prefix(a: &NatSeq) -> Word {
    let mut out = Vec::new();
    for &ak in a.entries() {
        out.extend(std::iter::repeat_n(0u8, ak as usize));
        out.push(1);
    }
    Word(out)
}

/// Endpoints `xi(w 0^ω)` and `xi(w 1^ω)` of the dyadic interval of the cylinder `[w]`.
pub fn cylinder_interval(w: &Word) -> (Rational, Rational) {
    let lo = w.value();
    let hi = &lo + pow2_inv(w.len());
    (lo, hi)
}

/// Relative frequency of `pattern` among the `n` factors of length `|pattern|`
/// starting at positions `1..=n` of `digits`.
pub fn freq(pattern: &Word, digits: &[u8], n: usize) -> Result<Rational> {
    if n == 0 {
        return Err(Error::Precondition("frequency over zero positions".into()));
    }
    let needed = n + pattern.len().saturating_sub(1);
    if digits.len() < needed {
        return Err(Error::InsufficientDigits {
            needed,
            available: digits.len(),
        });
    }
    let p = pattern.digits();
    let hits = (0..n).filter(|&i| &digits[i..i + p.len()] == p).count();
    Ok(Rational::new(BigInt::from(hits), BigInt::from(n)))
}
