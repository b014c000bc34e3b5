//! The interval map `R(x) = xi(rho(beta(x)))`, `R(0) = 2/3`, on exact rationals.

use std::collections::HashMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::periodic::{beta, beta_prime, EpWord};
use crate::rational::{check_unit, is_dyadic, one, pow2_inv, rat, zero, Rational};
use crate::substitution::{rho, rho_ep, sigma_ep, Parity};
use crate::word::{cylinder_interval, Word};

/// Default step budget for orbit iteration.
pub const DEFAULT_ORBIT_BUDGET: usize = 10_000;

/// `R(x)` for `x ∈ [0,1]`.
pub fn r_rational(x: &Rational) -> Result<Rational> {
    check_unit(x)?;
    if x.is_zero() {
        return Ok(rat(2, 3));
    }
    Ok(rho_ep(&beta(x)?, Parity::Even)?.xi())
}

/// Digits of `rho^n(w)`: shared by the expansions of `R^n(x)` for every `x`
/// whose expansion in `C` starts with `w`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GuaranteedPrefix {
    pub digits: Word,
    pub input_len: usize,
    pub iterates: usize,
}

pub fn r_prefix(w: &Word, iterates: usize) -> Result<GuaranteedPrefix> {
    if w.is_empty() {
        return Err(Error::EmptyWord("guaranteed prefix"));
    }
    if iterates == 0 {
        return Err(Error::Precondition("need at least one iterate".into()));
    }
    let mut d = w.clone();
    for _ in 0..iterates {
        d = rho(&d, Parity::Even);
    }
    Ok(GuaranteedPrefix {
        digits: d,
        input_len: w.len(),
        iterates,
    })
}

/// Calls `f` on every word of length `len` without a `00` factor.
fn for_each_simplest(len: usize, f: &mut impl FnMut(&[u8]) -> bool) -> bool {
    fn go(buf: &mut Vec<u8>, len: usize, f: &mut impl FnMut(&[u8]) -> bool) -> bool {
        if buf.len() == len {
            return f(buf);
        }
        for d in [0u8, 1] {
            if d == 0 && buf.last() == Some(&0) {
                continue;
            }
            buf.push(d);
            let keep_going = go(buf, len, f);
            buf.pop();
            if !keep_going {
                return false;
            }
        }
        true
    }
    go(&mut Vec::with_capacity(len), len, f)
}

/// Largest input length tried by [`required_precision`].
pub const PRECISION_CAP: usize = 32;

/// Length of `rho^n(w)` when none of `w, rho(w), …, rho^{n-1}(w)` contains `00`,
/// `None` otherwise.
fn informative_image_len(w: &[u8], n: usize) -> Option<usize> {
    let mut d = w.to_vec();
    for _ in 0..n {
        if d.windows(2).any(|p| p == [0, 0]) {
            return None;
        }
        d = crate::substitution::rho_digits(&d, Parity::Even);
    }
    Some(d.len())
}

/// Smallest `L` in the doubling sequence `1, 2, 4, …` such that every input of
/// length `L` keeps at least `m` digits after `n` iterates, where inputs range over
/// words whose first `n` iterates are all free of `00`. Without such a restriction
/// no finite `L` works (zero runs erase completely, and `rho((10)^k) = 0^k`).
pub fn required_precision(m: usize, n: usize, cap: usize) -> Result<usize> {
    if m == 0 || n == 0 {
        return Err(Error::Precondition("digits and iterates must be positive".into()));
    }
    let mut len = 1;
    while len <= cap {
        let ok = for_each_simplest(len, &mut |w| {
            informative_image_len(w, n).is_none_or(|l| l >= m)
        });
        if ok {
            return Ok(len);
        }
        len *= 2;
    }
    Err(Error::SizeGuard {
        what: "required input length",
        value: len as u64,
        limit: cap as u64,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum TailCycle {
    C0,
    C1,
    Other(Vec<String>),
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitRecord {
    #[serde(serialize_with = "ser_rationals")]
    pub points: Vec<Rational>,
    pub tail_cycle: TailCycle,
    /// Index of the first point lying on the cycle.
    pub steps_to_cycle: Option<usize>,
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

/// Iterates `R` from `x` until a value repeats or `max_steps` applications are spent.
pub fn iterate_orbit(x: &Rational, max_steps: usize) -> Result<OrbitRecord> {
    check_unit(x)?;
    let mut seen: HashMap<Rational, usize> = HashMap::new();
    let mut points = vec![x.clone()];
    seen.insert(x.clone(), 0);
    for _ in 0..max_steps {
        let next = r_rational(points.last().expect("non-empty"))?;
        if let Some(&start) = seen.get(&next) {
            let cycle = &points[start..];
            let c0 = [zero(), rat(2, 3)];
            let c1 = [one(), rat(1, 3)];
            let is = |set: &[Rational; 2]| cycle.len() == 2 && set.iter().all(|c| cycle.contains(c));
            let tail = if is(&c0) {
                TailCycle::C0
            } else if is(&c1) {
                TailCycle::C1
            } else {
                TailCycle::Other(cycle.iter().map(|c| c.to_string()).collect())
            };
            return Ok(OrbitRecord {
                points,
                tail_cycle: tail,
                steps_to_cycle: Some(start),
            });
        }
        seen.insert(next.clone(), points.len());
        points.push(next);
    }
    Ok(OrbitRecord {
        points,
        tail_cycle: TailCycle::Undecided,
        steps_to_cycle: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum QClass {
    Q0,
    Q1,
}

/// Which of the two rational 2-cycles the orbit of `x` falls into.
pub fn classify_q(x: &Rational, max_steps: usize) -> Result<QClass> {
    let orbit = iterate_orbit(x, max_steps)?;
    match orbit.tail_cycle {
        TailCycle::C0 => Ok(QClass::Q0),
        TailCycle::C1 => Ok(QClass::Q1),
        TailCycle::Undecided => Err(Error::Undecided(max_steps)),
        TailCycle::Other(c) => Err(Error::Precondition(format!(
            "orbit of {x} closes on an unexpected cycle {c:?}"
        ))),
    }
}

/// The maximal point of the fiber `R^{-1}(y)`.
pub fn s_section(y: &Rational) -> Result<Rational> {
    check_unit(y)?;
    if y.is_zero() {
        return Ok(sigma_ep(&beta_prime(y)?).xi());
    }
    let left = sigma_ep(&beta(y)?).xi();
    if y.is_one() || !is_dyadic(y) {
        return Ok(left);
    }
    let right = sigma_ep(&beta_prime(y)?).xi();
    Ok(left.max(right))
}

/// Evaluations of the three functional identities at one point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FunctionalReport {
    /// `R(x/2) = 1 − R(x)`
    pub half: bool,
    /// `R((x+1)/2) = (1 − R(x))/2`
    pub shifted_half: bool,
    /// `R(x) = 2 R(x + 1/2)`, only defined for `x ∈ (0, 1/2]`
    pub doubling: Option<bool>,
}

impl FunctionalReport {
    pub fn all_hold(&self) -> bool {
        self.half && self.shifted_half && self.doubling.unwrap_or(true)
    }
}

pub fn check_functional(x: &Rational) -> Result<FunctionalReport> {
    check_unit(x)?;
    if x.is_zero() {
        return Err(Error::OutOfRange(x.to_string(), "(0,1]"));
    }
    let half = rat(1, 2);
    let rx = r_rational(x)?;
    let h = r_rational(&(x * &half))? == one() - &rx;
    let s = r_rational(&((x + one()) * &half))? == (one() - &rx) * &half;
    let d = (*x <= half).then(|| -> Result<bool> {
        Ok(rx == r_rational(&(x + &half))? * rat(2, 1))
    });
    Ok(FunctionalReport {
        half: h,
        shifted_half: s,
        doubling: d.transpose()?,
    })
}

/// `R(x/2^n + 0.w) = 0.v + 2^{-m}((1 + (−1)^{n+1})/2 + (−1)^n R(x))` with
/// `v = rho(w)`, `n = |w|`, `m = |v|`.
pub fn check_word_functional(w: &Word, x: &Rational) -> Result<bool> {
    check_unit(x)?;
    if x.is_zero() {
        return Err(Error::OutOfRange(x.to_string(), "(0,1]"));
    }
    if w.is_empty() {
        return Err(Error::EmptyWord("word functional identity"));
    }
    let n = w.len();
    let v = rho(w, Parity::Even);
    let lhs = r_rational(&(x * pow2_inv(n) + w.value()))?;
    let rx = r_rational(x)?;
    let inner = if n % 2 == 0 { rx } else { one() - rx };
    let rhs = v.value() + pow2_inv(v.len()) * inner;
    Ok(lhs == rhs)
}

/// Image of the closed dyadic interval of a cylinder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CylinderImage {
    /// The cylinder of a zero word maps onto all of `[0,1]`.
    Full,
    /// The value at the left endpoint, plus the interval of the cylinder of `rho(x)`.
    Pieces {
        isolated: Rational,
        interval: (Rational, Rational),
        /// `2^{-(|x|_1 - 1)}`
        oscillation_bound: Rational,
    },
}

impl CylinderImage {
    /// Diameter of the image set.
    pub fn diameter(&self) -> Rational {
        match self {
            CylinderImage::Full => one(),
            CylinderImage::Pieces {
                isolated,
                interval: (lo, hi),
                ..
            } => isolated.clone().max(hi.clone()) - isolated.clone().min(lo.clone()),
        }
    }
}

pub fn image_of_cylinder(x: &Word) -> Result<CylinderImage> {
    if x.is_empty() {
        return Err(Error::EmptyWord("cylinder image"));
    }
    let ones = x.ones();
    if ones == 0 {
        return Ok(CylinderImage::Full);
    }
    // the left endpoint 0.x has expansion x↾(k-1) 0 1 1 1 … with k the last one
    let k = x.last_one().expect("has a one");
    let left = EpWord::new(
        x.truncate(k).concat(&Word::repeat(0, 1)),
        Word::repeat(1, 1),
    )?;
    let isolated = rho_ep(&left, Parity::Even)?.xi();
    debug_assert_eq!(left.xi(), x.value());
    Ok(CylinderImage::Pieces {
        isolated,
        interval: cylinder_interval(&rho(x, Parity::Even)),
        oscillation_bound: pow2_inv(ones - 1),
    })
}

/// `R(x) ∈ [0,1]` is rational whenever `x` is; convenience for sweeps.
pub fn rationals_up_to(q_max: i64) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::new();
    for q in 1..=q_max {
        for p in 0..=q {
            let x = rat(p, q);
            if x.denom() == &num_bigint::BigInt::from(q) || (p == 0 && q == 1) {
                out.push(x);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}
