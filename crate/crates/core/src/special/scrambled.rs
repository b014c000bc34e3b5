//! Scrambled families: one target-hitting point per index sequence `alpha`,
//! where `alpha_n` picks between a long run of ones and a word starting with
//! `00` as the stage-`n` target. Stage targets grow doubly exponentially, so
//! stage 3 is a lazy stream and stage 4 sits behind more than `2^49` digits.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lazy::{BoxSource, ConcatSource, DigitSource, FiniteSource, LazyWord, DEFAULT_SCAN_LIMIT};
use crate::rational::Rational;
use crate::substitution::{rho_digits, vanishing_order, Parity, RhoSource, SigmaSource};
use crate::word::Word;

use super::schedule::{build, ScheduledWord, Target};

pub const MAX_DEPTH: usize = 4;

/// Digits materialized per member before a stage is left lazy.
const FAMILY_CAP: usize = 1 << 20;

/// `e_1 = 1`, `e_n = n² (e_1 + … + e_{n-1})`.
pub fn e_sequence(len: usize) -> Vec<u128> {
    let mut out: Vec<u128> = Vec::with_capacity(len);
    let mut sum: u128 = 0;
    for n in 1..=len as u128 {
        let e = if n == 1 { 1 } else { n * n * sum };
        out.push(e);
        sum += e;
    }
    out
}

/// `(p, k)` when `n = p^k` for a prime `p` and `k ≥ 1`.
fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= n && n % p != 0 {
        p += 1;
    }
    if n % p != 0 {
        return Some((n, 1));
    }
    let (mut m, mut k) = (n, 0);
    while m % p == 0 {
        m /= p;
        k += 1;
    }
    (m == 1).then_some((p, k))
}

/// `mu(b)_n` (1-based): `b_k` when `n = p^k`, else 0. Missing bits count as 0.
pub fn mu(bits: &[u8], n: u64) -> u8 {
    match prime_power(n) {
        Some((_, k)) => bits.get(k as usize - 1).copied().unwrap_or(0),
        None => 0,
    }
}

/// `alpha_1 … alpha_depth` for `alpha = mu(b)`.
pub fn alpha_of(bits: &[u8], depth: usize) -> Vec<u8> {
    (1..=depth as u64).map(|n| mu(bits, n)).collect()
}

fn e_sum(n: usize) -> u128 {
    e_sequence(n).iter().sum()
}

/// Shared vanishing order `2(e_1 + … + e_n)` of both stage-`n` targets.
fn stage_vanishing(n: usize) -> usize {
    (2 * e_sum(n)) as usize
}

/// `1^count` for counts beyond any machine integer.
struct OnesSource {
    remaining: BigUint,
}

impl DigitSource for OnesSource {
    fn extend(&mut self, out: &mut Vec<u8>) -> Result<()> {
        if self.remaining.is_zero() {
            return Err(Error::Exhausted(0));
        }
        let chunk = BigUint::from(4096u32).min(self.remaining.clone());
        let k = chunk.to_u64().expect("at most 4096") as usize;
        out.extend(std::iter::repeat_n(1u8, k));
        self.remaining -= chunk;
        Ok(())
    }
}

/// `1` at stage 1, then `1^{2^{e_2 + … + e_n}}`.
fn ones_target(n: usize) -> Target {
    let make: Arc<dyn Fn() -> BoxSource + Send + Sync> = if n == 1 {
        Arc::new(|| Box::new(FiniteSource::new(&Word::repeat(1, 1))) as BoxSource)
    } else {
        let exp = (e_sum(n) - 1) as usize;
        Arc::new(move || {
            Box::new(OnesSource {
                remaining: BigUint::one() << exp,
            }) as BoxSource
        })
    };
    Target {
        make,
        vanishing: stage_vanishing(n),
    }
}

/// `001` at stage 1, then `00 sigma^{2 e_n}(previous)`.
fn zeros_target(n: usize) -> Target {
    let make: Arc<dyn Fn() -> BoxSource + Send + Sync> = if n == 1 {
        Arc::new(|| Box::new(FiniteSource::new(&Word::from_vec_unchecked(vec![0, 0, 1]))) as BoxSource)
    } else {
        let prev = zeros_target(n - 1).make;
        let layers = 2 * e_sequence(n)[n - 1] as usize;
        Arc::new(move || {
            let mut src = prev();
            for _ in 0..layers {
                src = Box::new(SigmaSource::new(src, 1, false));
            }
            Box::new(
                ConcatSource::new()
                    .push_word(&Word::from_vec_unchecked(vec![0, 0]))
                    .push(src),
            ) as BoxSource
        })
    };
    Target {
        make,
        vanishing: stage_vanishing(n),
    }
}

fn stage_target(n: usize, alpha_n: u8) -> Target {
    if alpha_n == 0 {
        ones_target(n)
    } else {
        zeros_target(n)
    }
}

/// `k_0 = 0`, `k_1 = n_eps(w_0)`, `k_n = k_{n-1} + 2(e_1 + … + e_{n-1})`;
/// identical for every member.
pub fn checkpoint_times(w0: &Word, depth: usize) -> Result<Vec<usize>> {
    let mut times = vec![0, vanishing_order(w0)?];
    for n in 2..=depth {
        times.push(times[n - 1] + stage_vanishing(n - 1));
    }
    times.truncate(depth + 1);
    Ok(times)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScrambledParams {
    /// One bit source `b` per member; `alpha = mu(b)`, missing bits are 0.
    pub alpha_sources: Vec<Vec<u8>>,
    pub w0: Word,
    pub depth: usize,
}

#[derive(Clone)]
pub struct ScrambledMember {
    pub id: usize,
    pub bits: Vec<u8>,
    /// `alpha_1 … alpha_depth`.
    pub alpha: Vec<u8>,
    pub word: ScheduledWord,
}

pub struct ScrambledFamily {
    pub w0: Word,
    pub depth: usize,
    pub times: Vec<usize>,
    pub members: Vec<ScrambledMember>,
}

pub fn scrambled_family(p: &ScrambledParams) -> Result<ScrambledFamily> {
    if p.depth == 0 {
        return Err(Error::OutOfRange("0".into(), "depth ≥ 1"));
    }
    if p.depth > MAX_DEPTH {
        return Err(Error::SizeGuard {
            what: "scrambled depth",
            value: p.depth as u64,
            limit: MAX_DEPTH as u64,
        });
    }
    if p.alpha_sources.iter().flatten().any(|&b| b > 1) {
        return Err(Error::Precondition("alpha bits must be 0 or 1".into()));
    }
    let times = checkpoint_times(&p.w0, p.depth)?;
    let head = Target::word(&p.w0)?;
    let members = p
        .alpha_sources
        .par_iter()
        .enumerate()
        .map(|(id, bits)| {
            let alpha = alpha_of(bits, p.depth);
            let mut targets = vec![head.clone()];
            targets.extend(alpha.iter().enumerate().map(|(i, &a)| stage_target(i + 1, a)));
            Ok(ScrambledMember {
                id,
                bits: bits.clone(),
                word: build(&targets, &times, 0, FAMILY_CAP)?,
                alpha,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScrambledFamily {
        w0: p.w0.clone(),
        depth: p.depth,
        times,
        members,
    })
}

/// First `len` digits of `rho^k` of a stream.
fn iterate_stream(src: BoxSource, k: usize, len: usize) -> Result<Vec<u8>> {
    let src = (0..k).fold(src, |acc, _| {
        Box::new(RhoSource::new(acc, Parity::Even, DEFAULT_SCAN_LIMIT)) as BoxSource
    });
    Ok(LazyWord::from_box(src).prefix(len)?.to_vec())
}

fn target_prefix(n: usize, alpha_n: u8, len: usize) -> Result<Vec<u8>> {
    let mut w = LazyWord::from_box((stage_target(n, alpha_n).make)());
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        match w.digit(i) {
            Ok(d) => out.push(d),
            Err(Error::Exhausted(_)) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn digits_string(d: &[u8]) -> String {
    d.iter().map(|&x| char::from(b'0' + x)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageCheckpoint {
    pub stage: usize,
    pub time: usize,
    pub alpha: u8,
    /// First digits of `rho^{k_n}(b)`; `None` when the stage is unreachable.
    pub block: Option<String>,
    /// Prefix of the stage target that `block` must start with.
    pub guaranteed: String,
    pub agrees_with_target: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MemberReport {
    pub id: usize,
    pub bits: String,
    pub alpha: String,
    /// Run-length encoded prefix as `(digit, count)` pairs.
    pub prefix_runs: Vec<(u8, u64)>,
    pub block_lengths: Vec<Option<usize>>,
    pub checkpoints: Vec<StageCheckpoint>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyReport {
    pub w0: String,
    pub depth: usize,
    pub e: Vec<String>,
    pub times: Vec<usize>,
    pub members: Vec<MemberReport>,
}

fn run_lengths(d: &[u8]) -> Vec<(u8, u64)> {
    let mut out: Vec<(u8, u64)> = Vec::new();
    for &x in d {
        match out.last_mut() {
            Some((y, c)) if *y == x => *c += 1,
            _ => out.push((x, 1)),
        }
    }
    out
}

impl ScrambledFamily {
    /// The checkpoint of `member` at `stage` (1-based), reading `block_len` digits.
    pub fn checkpoint(&self, member: usize, stage: usize, block_len: usize) -> Result<StageCheckpoint> {
        let m = &self.members[member];
        let alpha = m.alpha[stage - 1];
        let guaranteed = target_prefix(stage, alpha, block_len)?;
        let block = if m.word.stage_reachable(stage) {
            Some(iterate_stream(m.word.source(), self.times[stage], block_len)?)
        } else {
            None
        };
        Ok(StageCheckpoint {
            stage,
            time: self.times[stage],
            alpha,
            agrees_with_target: block.as_ref().map(|b| b.starts_with(&guaranteed)),
            block: block.as_deref().map(digits_string),
            guaranteed: digits_string(&guaranteed),
        })
    }

    /// Certified lower bound on `|R^{k_n}(x_i) − R^{k_n}(x_j)|` from `block_len`
    /// digits of each iterate; `None` when the stage is unreachable.
    pub fn stage_separation(&self, i: usize, j: usize, stage: usize, block_len: usize) -> Result<Option<Rational>> {
        let (a, b) = (&self.members[i].word, &self.members[j].word);
        if !a.stage_reachable(stage) || !b.stage_reachable(stage) {
            return Ok(None);
        }
        let k = self.times[stage];
        let x = iterate_stream(a.source(), k, block_len)?;
        let y = iterate_stream(b.source(), k, block_len)?;
        let val = |d: &[u8]| d.iter().fold(BigInt::from(0), |acc, &c| acc * 2 + c);
        let (vx, vy): (BigInt, BigInt) = (val(&x), val(&y));
        let diff: BigInt = if vx >= vy { vx - vy } else { vy - vx };
        let gap = (diff - BigInt::from(1)).max(BigInt::from(0));
        Ok(Some(Rational::new(gap, BigInt::from(1u8) << block_len)))
    }

    pub fn report(&self, block_len: usize, prefix_len: usize) -> Result<FamilyReport> {
        let members = self
            .members
            .iter()
            .enumerate()
            .map(|(idx, m)| {
                let mut w = m.word.word();
                let prefix = w.prefix(prefix_len)?.to_vec();
                let checkpoints = (1..=self.depth)
                    .map(|s| self.checkpoint(idx, s, block_len))
                    .collect::<Result<Vec<_>>>()?;
                Ok(MemberReport {
                    id: m.id,
                    bits: digits_string(&m.bits),
                    alpha: digits_string(&m.alpha),
                    prefix_runs: run_lengths(&prefix),
                    block_lengths: m.word.block_lengths(),
                    checkpoints,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FamilyReport {
            w0: self.w0.to_string(),
            depth: self.depth,
            e: e_sequence(self.depth).iter().map(|e| e.to_string()).collect(),
            times: self.times.clone(),
            members,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Closeness {
    Close,
    Far,
    Undecided,
}

#[derive(Clone, Debug, Serialize)]
pub struct Dc1Series {
    pub ticks: Vec<Closeness>,
    /// Share of close ticks among `0..=k`, undecided ticks left out; `None` while all are undecided.
    pub close_excluding_undecided: Vec<Option<f64>>,
    /// Share of close ticks among `0..=k`, undecided ticks counted as not close.
    pub close_including_undecided: Vec<f64>,
}

/// Digits of an iterate used to bracket its value.
const BRACKET_DIGITS: usize = 64;

fn bracket(d: &[u8]) -> (Rational, Rational) {
    let e = d.len().min(BRACKET_DIGITS);
    let v = d[..e].iter().fold(BigInt::from(0), |acc, &c| acc * 2 + c);
    let den = BigInt::from(1u8) << e;
    (Rational::new(v.clone(), den.clone()), Rational::new(v + 1, den))
}

/// Classifies `|R^k(x) − R^k(y)|` against `delta` for `k = 0..horizon`,
/// bracketing each iterate by the guaranteed prefix that the first
/// `prefix_len` digits of `x` and `y` determine.
pub fn dc1_statistics(
    x: &mut LazyWord,
    y: &mut LazyWord,
    horizon: usize,
    delta: &Rational,
    prefix_len: usize,
) -> Result<Dc1Series> {
    let mut px = x.prefix(prefix_len)?.to_vec();
    let mut py = y.prefix(prefix_len)?.to_vec();
    let mut ticks = Vec::with_capacity(horizon);
    let (mut close, mut decided) = (0usize, 0usize);
    let mut excl = Vec::with_capacity(horizon);
    let mut incl = Vec::with_capacity(horizon);
    for k in 0..horizon {
        let (lx, hx) = bracket(&px);
        let (ly, hy) = bracket(&py);
        let upper = hx.clone().max(hy.clone()) - lx.clone().min(ly.clone());
        let lower = (lx.max(ly) - hx.min(hy)).max(Rational::from_integer(BigInt::from(0)));
        let tick = if upper < *delta {
            Closeness::Close
        } else if lower >= *delta {
            Closeness::Far
        } else {
            Closeness::Undecided
        };
        if tick != Closeness::Undecided {
            decided += 1;
        }
        if tick == Closeness::Close {
            close += 1;
        }
        ticks.push(tick);
        excl.push((decided > 0).then(|| close as f64 / decided as f64));
        incl.push(close as f64 / (k + 1) as f64);
        px = rho_digits(&px, Parity::Even);
        py = rho_digits(&py, Parity::Even);
    }
    Ok(Dc1Series {
        ticks,
        close_excluding_undecided: excl,
        close_including_undecided: incl,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::substitution::sigma;
    use crate::word::w;

    #[test]
    fn exponents() {
        assert_eq!(e_sequence(4), vec![1, 4, 45, 800]);
    }

    #[test]
    fn prime_power_spreading() {
        let b = [1u8, 0, 1];
        assert_eq!(mu(&b, 1), 0);
        assert_eq!(mu(&b, 2), 1);
        assert_eq!(mu(&b, 4), 0);
        assert_eq!(mu(&b, 8), 1);
        assert_eq!(mu(&b, 9), 0);
        assert_eq!(mu(&b, 6), 0);
        assert_eq!(mu(&[0, 1], 9), 1);
        assert_eq!(alpha_of(&[1, 1], 4), vec![0, 1, 1, 1]);
    }

    #[test]
    fn small_targets() {
        assert_eq!(target_prefix(2, 0, 100).unwrap(), vec![1; 16]);
        let mut u2 = w("00");
        u2.extend_from(&(0..8).fold(w("001"), |z, _| sigma(&z, 1)));
        assert_eq!(target_prefix(2, 1, 10_000).unwrap(), u2.digits());
        assert_eq!(vanishing_order(&u2).unwrap(), stage_vanishing(2));
        assert_eq!(vanishing_order(&Word::repeat(1, 16)).unwrap(), stage_vanishing(2));
        assert_eq!(vanishing_order(&w("001")).unwrap(), stage_vanishing(1));
    }

    #[test]
    fn times_are_shared() {
        assert_eq!(checkpoint_times(&w("1"), 4).unwrap(), vec![0, 2, 4, 14, 114]);
    }

    #[test]
    fn depth_two_family() {
        let fam = scrambled_family(&ScrambledParams {
            alpha_sources: vec![vec![0], vec![1]],
            w0: w("1"),
            depth: 2,
        })
        .unwrap();
        for m in 0..2 {
            for s in 1..=2 {
                assert_eq!(fam.checkpoint(m, s, 8).unwrap().agrees_with_target, Some(true));
            }
        }
        let sep = fam.stage_separation(0, 1, 2, 8).unwrap().unwrap();
        assert!(sep > rat(1, 8));
        assert!(scrambled_family(&ScrambledParams { alpha_sources: vec![], w0: w("1"), depth: 5 }).is_err());
    }

    #[test]
    fn dc1_identical_inputs() {
        let mut x = crate::special::b0_stream();
        let mut y = crate::special::b0_stream();
        let s = dc1_statistics(&mut x, &mut y, 10, &rat(1, 8), 4096).unwrap();
        assert!(s.ticks.iter().all(|&t| t == Closeness::Close));
        assert_eq!(*s.close_including_undecided.last().unwrap(), 1.0);
    }
}
