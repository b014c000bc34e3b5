//! Words whose iterates hit prescribed cylinders at prescribed times.
//!
//! A point is `v_0 v_1 v_2 …` with `v_0 = w_0` and `v_n` the shortest word
//! ending in `1` that `rho^{k_n}`, read after `v_0 … v_{n-1}`, sends to `w_n`.
//! It is undone one iterate at a time with `sigma`, so blocks are streams of
//! stacked transducers and only materialized while they stay small. A
//! Thue–Morse tail keeps every iterate outside the eventually-zero words.

use std::sync::Arc;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lazy::{thue_morse_source, BoxSource, ConcatSource, DigitSource, FiniteSource, InsertSource, LazyWord};
use crate::rational::Rational;
use crate::substitution::{rho_digits, vanishing_bound, vanishing_order, Parity, SigmaSource};
use crate::word::{NatSeq, Word};

use super::record_lengths;

/// Total digits a scheduled word materializes before leaving later blocks lazy.
pub const MATERIALIZE_CAP: usize = 1 << 24;

pub(crate) type Factory = Arc<dyn Fn() -> BoxSource + Send + Sync>;

/// A finite target word given as a stream factory, with its vanishing order.
#[derive(Clone)]
pub(crate) struct Target {
    pub make: Factory,
    pub vanishing: usize,
}

impl Target {
    pub fn word(w: &Word) -> Result<Target> {
        let vanishing = vanishing_order(w)?;
        let w = w.clone();
        Ok(Target {
            make: Arc::new(move || Box::new(FiniteSource::new(&w)) as BoxSource),
            vanishing,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduleSpec {
    pub targets: Vec<Word>,
    /// `k_0 = 0` and `k_n ≥ k_{n-1} + n_eps(w_{n-1})`.
    pub times: Vec<usize>,
    /// Number of zero pairs inserted before the first one of every block after the first.
    pub choice_index: u64,
}

impl ScheduleSpec {
    pub fn new(targets: Vec<Word>, times: Vec<usize>, choice_index: u64) -> Result<Self> {
        let spec = ScheduleSpec {
            targets,
            times,
            choice_index,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Times with the smallest gaps allowed.
    pub fn tight(targets: Vec<Word>, choice_index: u64) -> Result<Self> {
        let mut times = Vec::with_capacity(targets.len());
        let mut k = 0;
        for (i, t) in targets.iter().enumerate() {
            if i > 0 {
                k += vanishing_order(&targets[i - 1])?;
            }
            times.push(k);
            if t.is_empty() {
                return Err(Error::EmptyWord("schedule target"));
            }
        }
        Self::new(targets, times, choice_index)
    }

    pub fn validate(&self) -> Result<()> {
        let targets = self
            .targets
            .iter()
            .map(Target::word)
            .collect::<Result<Vec<_>>>()?;
        validate_times(&targets, &self.times)
    }
}

fn validate_times(targets: &[Target], times: &[usize]) -> Result<()> {
    if targets.is_empty() {
        return Err(Error::Precondition("a schedule needs at least one target".into()));
    }
    if targets.len() != times.len() {
        return Err(Error::Precondition(format!(
            "{} targets but {} times",
            targets.len(),
            times.len()
        )));
    }
    if times[0] != 0 {
        return Err(Error::Precondition("the first time must be 0".into()));
    }
    for n in 1..times.len() {
        if times[n] < times[n - 1] + targets[n - 1].vanishing {
            return Err(Error::Precondition(format!(
                "time {} = {} is closer than the vanishing order {} of the previous target",
                n,
                times[n],
                targets[n - 1].vanishing
            )));
        }
    }
    Ok(())
}

#[derive(Clone)]
enum Block {
    Digits(Arc<Vec<u8>>),
    Lazy(Factory),
    /// Sits behind a lazy block too long to read past.
    Unreachable(usize),
}

/// A constructed target-hitting word; cheap to clone and replay.
#[derive(Clone)]
pub struct ScheduledWord {
    blocks: Vec<Block>,
    times: Vec<usize>,
}

fn drain(mut src: BoxSource, cap: usize) -> Result<Option<Vec<u8>>> {
    let mut out = Vec::new();
    loop {
        match src.extend(&mut out) {
            Ok(()) => {
                if out.len() > cap {
                    return Ok(None);
                }
            }
            Err(Error::Exhausted(_)) => return Ok(Some(out)),
            Err(e) => return Err(e),
        }
    }
}

fn chain_factory(target: &Target, parities: Vec<Parity>, choice: u64) -> Factory {
    let make = target.make.clone();
    Arc::new(move || {
        let mut src = make();
        for p in parities.iter().rev() {
            src = Box::new(SigmaSource::new(src, 1, *p == Parity::Odd));
        }
        if choice > 0 {
            src = Box::new(InsertSource::new(src, &NatSeq::new(vec![choice])));
        }
        src
    })
}

pub(crate) fn build(targets: &[Target], times: &[usize], choice: u64, cap: usize) -> Result<ScheduledWord> {
    validate_times(targets, times)?;
    let kmax = *times.last().expect("non-empty");
    // |rho^i(v_0 … v_{n-1})| for i = 0..=kmax
    let mut lengths = vec![0usize; kmax + 1];
    let mut total = 0usize;
    let mut blocks = Vec::with_capacity(targets.len());
    let mut reachable = true;
    for (n, target) in targets.iter().enumerate() {
        if !reachable {
            blocks.push(Block::Unreachable(n));
            continue;
        }
        let factory = if n == 0 {
            target.make.clone()
        } else {
            let k = times[n];
            if lengths[k] != 0 {
                return Err(Error::Precondition(format!("prefix before block {n} survives {k} iterates")));
            }
            let parities = lengths[..k].iter().map(|&l| Parity::of(l)).collect();
            chain_factory(target, parities, choice)
        };
        match drain(factory(), cap.saturating_sub(total))? {
            Some(digits) => {
                total += digits.len();
                record_lengths(&mut lengths, &digits);
                blocks.push(Block::Digits(Arc::new(digits)));
            }
            None => {
                blocks.push(Block::Lazy(factory));
                reachable = false;
            }
        }
    }
    Ok(ScheduledWord {
        blocks,
        times: times.to_vec(),
    })
}

impl ScheduledWord {
    pub fn times(&self) -> &[usize] {
        &self.times
    }

    pub fn stages(&self) -> usize {
        self.blocks.len()
    }

    /// Whether every block before `stage` is materialized, so that the iterate
    /// at `times[stage]` can be read in finite time.
    pub fn stage_reachable(&self, stage: usize) -> bool {
        self.blocks[..stage.min(self.blocks.len())]
            .iter()
            .all(|b| matches!(b, Block::Digits(_)))
            && !matches!(self.blocks.get(stage), Some(Block::Unreachable(_)))
    }

    /// All blocks as one finite word, when every block is materialized.
    pub fn materialized(&self) -> Option<Vec<u8>> {
        let mut out = Vec::new();
        for b in &self.blocks {
            match b {
                Block::Digits(d) => out.extend_from_slice(d),
                _ => return None,
            }
        }
        Some(out)
    }

    pub fn block_lengths(&self) -> Vec<Option<usize>> {
        self.blocks
            .iter()
            .map(|b| match b {
                Block::Digits(d) => Some(d.len()),
                _ => None,
            })
            .collect()
    }

    pub fn source(&self) -> BoxSource {
        let mut concat = ConcatSource::new();
        for b in &self.blocks {
            concat = match b {
                Block::Digits(d) => concat.push(Box::new(SliceSource { digits: d.clone(), pos: 0 })),
                Block::Lazy(f) => concat.push(f()),
                &Block::Unreachable(stage) => concat.push_deferred(move || {
                    Err(Error::SizeGuard {
                        what: "unreachable schedule stage",
                        value: stage as u64,
                        limit: stage as u64 - 1,
                    })
                }),
            };
        }
        Box::new(concat.push(Box::new(thue_morse_source(0))))
    }

    pub fn word(&self) -> LazyWord {
        LazyWord::from_box(self.source())
    }
}

struct SliceSource {
    digits: Arc<Vec<u8>>,
    pos: usize,
}

impl DigitSource for SliceSource {
    fn extend(&mut self, out: &mut Vec<u8>) -> Result<()> {
        if self.pos == self.digits.len() {
            return Err(Error::Exhausted(self.pos));
        }
        let end = (self.pos + 4096).min(self.digits.len());
        out.extend_from_slice(&self.digits[self.pos..end]);
        self.pos = end;
        Ok(())
    }
}

pub fn schedule(spec: &ScheduleSpec) -> Result<ScheduledWord> {
    let targets = spec
        .targets
        .iter()
        .map(Target::word)
        .collect::<Result<Vec<_>>>()?;
    build(&targets, &spec.times, spec.choice_index, MATERIALIZE_CAP)
}

/// A point `b` starting with `w_0` with `rho^{k_n}(b)` starting with `w_n`.
pub fn schedule_point(spec: &ScheduleSpec) -> Result<LazyWord> {
    Ok(schedule(spec)?.word())
}

pub const MAX_SEPARATED_EXPONENT: usize = 12;

/// `2^{(n+1)k}` points, one per tuple `(w_0, …, w_n)` of `k`-digit words, with
/// `rho^{iℓ}(b)` starting with `w_i 0` and `ℓ = 2⌊log₂ k⌋ + 2`.
pub struct SeparatedSet {
    pub k: usize,
    pub n: usize,
    pub ell: usize,
    pub tuples: Vec<Vec<Word>>,
    points: Vec<ScheduledWord>,
    /// First `k+1` digits of `rho^{iℓ}(b)` as an integer, per point and checkpoint.
    checkpoints: Vec<Vec<u64>>,
}

fn tuple_of(index: u64, k: usize, n: usize) -> Vec<Word> {
    (0..=n)
        .map(|i| Word::from_bits((index >> (k * (n - i))) & ((1 << k) - 1), k))
        .collect()
}

fn value_of(digits: &[u8]) -> u64 {
    digits.iter().fold(0, |acc, &d| (acc << 1) | d as u64)
}

pub fn separated_set(k: usize, n: usize) -> Result<SeparatedSet> {
    if k == 0 {
        return Err(Error::OutOfRange("0".into(), "k ≥ 1"));
    }
    if k * (n + 1) > MAX_SEPARATED_EXPONENT {
        return Err(Error::SizeGuard {
            what: "separated-set exponent k(n+1)",
            value: (k * (n + 1)) as u64,
            limit: MAX_SEPARATED_EXPONENT as u64,
        });
    }
    let ell = vanishing_bound(k);
    let count = 1u64 << (k * (n + 1));
    let times: Vec<usize> = (0..=n).map(|i| i * ell).collect();
    let built: Vec<(Vec<Word>, ScheduledWord, Vec<u64>)> = (0..count)
        .into_par_iter()
        .map(|index| {
            let tuple = tuple_of(index, k, n);
            let targets = tuple
                .iter()
                .map(|w| Target::word(&w.concat(&Word::from_vec_unchecked(vec![0]))))
                .collect::<Result<Vec<_>>>()?;
            let point = build(&targets, &times, 0, MATERIALIZE_CAP)?;
            let mut cur = point
                .materialized()
                .ok_or(Error::Precondition("separated-set point too long".into()))?;
            let mut marks = Vec::with_capacity(n + 1);
            for j in 0..=n * ell {
                if j % ell == 0 {
                    if cur.len() < k + 1 {
                        return Err(Error::InsufficientDigits {
                            needed: k + 1,
                            available: cur.len(),
                        });
                    }
                    marks.push(value_of(&cur[..k + 1]));
                }
                cur = rho_digits(&cur, Parity::Even);
            }
            Ok((tuple, point, marks))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut tuples = Vec::with_capacity(built.len());
    let mut points = Vec::with_capacity(built.len());
    let mut checkpoints = Vec::with_capacity(built.len());
    for (t, p, c) in built {
        tuples.push(t);
        points.push(p);
        checkpoints.push(c);
    }
    Ok(SeparatedSet {
        k,
        n,
        ell,
        tuples,
        points,
        checkpoints,
    })
}

impl SeparatedSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &ScheduledWord {
        &self.points[i]
    }

    /// Checkpoint prefixes `rho^{iℓ}(b)↾(k+1)` of point `i`.
    pub fn checkpoint_prefixes(&self, i: usize) -> Vec<Word> {
        self.checkpoints[i]
            .iter()
            .map(|&v| Word::from_bits(v, self.k + 1))
            .collect()
    }

    /// Numerator over `2^{k+1}` of the certified lower bound on the distance
    /// along iterates `0..=nℓ`: each checkpoint pins both iterates to a cylinder
    /// of width `2^{-(k+1)}`.
    fn gap(&self, i: usize, j: usize) -> u64 {
        self.checkpoints[i]
            .iter()
            .zip(&self.checkpoints[j])
            .map(|(&a, &b)| a.abs_diff(b).saturating_sub(1))
            .max()
            .unwrap_or(0)
    }

    pub fn distance(&self, i: usize, j: usize) -> Rational {
        Rational::new(BigInt::from(self.gap(i, j)), BigInt::from(1u64) << (self.k + 1))
    }

    /// Smallest certified pairwise distance, `None` for fewer than two points.
    pub fn min_distance(&self) -> Option<Rational> {
        let m = (0..self.len())
            .into_par_iter()
            .filter_map(|i| ((i + 1)..self.len()).map(|j| self.gap(i, j)).min())
            .min()?;
        Some(Rational::new(BigInt::from(m), BigInt::from(1u64) << (self.k + 1)))
    }

    pub const MAX_MATRIX_POINTS: usize = 256;

    pub fn distance_matrix(&self) -> Result<Vec<Vec<Rational>>> {
        if self.len() > Self::MAX_MATRIX_POINTS {
            return Err(Error::SizeGuard {
                what: "distance matrix points",
                value: self.len() as u64,
                limit: Self::MAX_MATRIX_POINTS as u64,
            });
        }
        Ok((0..self.len())
            .map(|i| (0..self.len()).map(|j| self.distance(i, j)).collect())
            .collect())
    }

    /// `log₂(#S)/n = (n+1)k/n`, unbounded in `k`.
    pub fn entropy_estimate(&self) -> Option<f64> {
        (self.n > 0).then(|| ((self.n + 1) * self.k) as f64 / self.n as f64)
    }
}
