//! Eventually periodic binary words and their exact values.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{check_unit, Rational};
use crate::word::{insert_pairs, NatSeq, Word};

/// An infinite word `prefix · period · period · ...`, always held in canonical form:
/// the period is primitive and the prefix is as short as possible.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EpWord {
    prefix: Word,
    period: Word,
}

/// Length of the shortest root `r` with `s = r^k`.
fn primitive_root_len(s: &[u8]) -> usize {
    let n = s.len();
    let mut fail = vec![0usize; n];
    let mut k = 0;
    for i in 1..n {
        while k > 0 && s[i] != s[k] {
            k = fail[k - 1];
        }
        if s[i] == s[k] {
            k += 1;
        }
        fail[i] = k;
    }
    let p = n - fail[n - 1];
    if n % p == 0 {
        p
    } else {
        n
    }
}

impl EpWord {
    pub fn new(prefix: Word, period: Word) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Precondition("period must be non-empty".into()));
        }
        Ok(Self::canonical(prefix, period))
    }

    /// The purely periodic word `per(period)`.
    pub fn periodic(period: Word) -> Result<Self> {
        Self::new(Word::empty(), period)
    }

    fn canonical(prefix: Word, period: Word) -> Self {
        let root = primitive_root_len(period.digits());
        let mut per: Vec<u8> = period.digits()[..root].to_vec();
        let mut pre = prefix.into_digits();
        while let (Some(&a), Some(&b)) = (pre.last(), per.last()) {
            if a != b {
                break;
            }
            pre.pop();
            per.rotate_right(1);
        }
        EpWord {
            prefix: Word::from_vec_unchecked(pre),
            period: Word::from_vec_unchecked(per),
        }
    }

    /// Re-derives the canonical form; a no-op on values of this type, kept for explicitness.
    pub fn canonicalize(&self) -> EpWord {
        Self::canonical(self.prefix.clone(), self.period.clone())
    }

    pub fn prefix(&self) -> &Word {
        &self.prefix
    }

    pub fn period(&self) -> &Word {
        &self.period
    }

    pub fn is_eventually_zero(&self) -> bool {
        self.period.digits() == [0]
    }

    pub fn is_eventually_one(&self) -> bool {
        self.period.digits() == [1]
    }

    pub fn digit(&self, i: usize) -> u8 {
        let p = self.prefix.len();
        if i < p {
            self.prefix.digits()[i]
        } else {
            self.period.digits()[(i - p) % self.period.len()]
        }
    }

    /// The first `n` digits.
    pub fn take(&self, n: usize) -> Word {
        Word::from_vec_unchecked((0..n).map(|i| self.digit(i)).collect())
    }

    pub fn complement(&self) -> EpWord {
        Self::canonical(self.prefix.complement(), self.period.complement())
    }

    /// Exact value `sum b_n / 2^n`.
    pub fn xi(&self) -> Rational {
        let pre = self.prefix.to_bigint();
        let per = self.period.to_bigint();
        let cycle = (BigInt::one() << self.period.len()) - 1;
        let num = pre * &cycle + per;
        let den = cycle << self.prefix.len();
        Rational::new(num, den)
    }

    /// Inserts `0^(2 a_k)` before the k-th one.
    pub fn insert_zero_pairs(&self, a: &NatSeq) -> Result<EpWord> {
        let mut digits = self.prefix.digits().to_vec();
        let mut ones = self.prefix.ones();
        if ones < a.len() && self.is_eventually_zero() {
            return Err(Error::TooFewOnes {
                needed: a.len(),
                found: ones,
            });
        }
        while ones < a.len() {
            digits.extend_from_slice(self.period.digits());
            ones += self.period.ones();
        }
        let head = insert_pairs(&digits, a.entries());
        Ok(Self::canonical(Word::from_vec_unchecked(head), self.period.clone()))
    }

    /// Ones density of the (primitive) period.
    pub fn period_density(&self) -> Rational {
        Rational::new(
            BigInt::from(self.period.ones()),
            BigInt::from(self.period.len()),
        )
    }
}

impl fmt::Display for EpWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.prefix.is_empty() {
            write!(f, "{}", self.prefix)?;
        }
        write!(f, "({})", self.period)
    }
}

impl fmt::Debug for EpWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EpWord({self})")
    }
}

impl FromStr for EpWord {
    type Err = Error;

    /// Parses `PREFIX(PERIOD)`, e.g. `0(1)` or `(01)`.
    fn from_str(s: &str) -> Result<Self> {
        let err = |reason: &str| Error::Parse {
            kind: "periodic word",
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let t = s.trim();
        let open = t.find('(').ok_or_else(|| err("missing '(' before the period"))?;
        let body = t[open + 1..]
            .strip_suffix(')')
            .ok_or_else(|| err("missing closing ')'"))?;
        let prefix: Word = if open == 0 { Word::empty() } else { t[..open].parse()? };
        let period: Word = body.parse()?;
        if period.is_empty() {
            return Err(err("empty period"));
        }
        Ok(Self::canonical(prefix, period))
    }
}

/// Shorthand for periodic literals; panics on bad input.
pub fn ep(s: &str) -> EpWord {
    s.parse().expect("valid periodic literal")
}

/// Binary digits of `x` in `[0,1)` by long division, as a finite head and either a
/// terminating remainder (`None`) or a repeating block.
fn long_division(x: &Rational) -> (Vec<u8>, Option<Vec<u8>>) {
    let den = x.denom().clone();
    let mut r = x.numer().clone();
    let mut digits = Vec::new();
    let mut seen: HashMap<BigInt, usize> = HashMap::new();
    loop {
        if r.is_zero() {
            return (digits, None);
        }
        if let Some(&start) = seen.get(&r) {
            let period = digits.split_off(start);
            return (digits, Some(period));
        }
        seen.insert(r.clone(), digits.len());
        r <<= 1;
        let (q, rem) = r.div_rem(&den);
        digits.push(if q.is_zero() { 0 } else { 1 });
        r = rem;
    }
}

/// The expansion of `x ∈ (0,1]` that is not eventually zero.
pub fn beta(x: &Rational) -> Result<EpWord> {
    check_unit(x)?;
    if x.is_zero() {
        return Err(Error::OutOfRange(x.to_string(), "(0,1]"));
    }
    if x.is_one() {
        return Ok(EpWord::canonical(Word::empty(), Word::repeat(1, 1)));
    }
    let (mut head, tail) = long_division(x);
    Ok(match tail {
        Some(per) => EpWord::canonical(Word::from_vec_unchecked(head), Word::from_vec_unchecked(per)),
        None => {
            // finite expression ending in 1: replace that 1 by 0 followed by ones
            let last = head.len() - 1;
            head[last] = 0;
            EpWord::canonical(Word::from_vec_unchecked(head), Word::repeat(1, 1))
        }
    })
}

/// The expansion of `x ∈ [0,1)` that is not eventually one.
pub fn beta_prime(x: &Rational) -> Result<EpWord> {
    check_unit(x)?;
    if x.is_one() {
        return Err(Error::OutOfRange(x.to_string(), "[0,1)"));
    }
    debug_assert!(!x.is_negative());
    let (head, tail) = long_division(x);
    let period = tail.unwrap_or_else(|| vec![0]);
    Ok(EpWord::canonical(
        Word::from_vec_unchecked(head),
        Word::from_vec_unchecked(period),
    ))
}
