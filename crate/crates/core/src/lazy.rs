//! Lazily materialized infinite words.
//!
//! A [`LazyWord`] pairs a [`DigitSource`] with a monotone cache. Sources are
//! streaming transducers and can be stacked (`sigma` over `rho` over a run-length
//! source, and so on) without caching the intermediate layers.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::periodic::EpWord;
use crate::word::{NatSeq, Word};

/// Default cap on the number of digits a single [`LazyWord`] will cache.
pub const DEFAULT_BUDGET: usize = 1 << 28;

/// Default number of consecutive zeros `rho` scans before declaring its input outside `C`.
pub const DEFAULT_SCAN_LIMIT: usize = 1 << 22;

/// A deterministic producer of binary digits.
pub trait DigitSource: Send {
    /// Appends at least one digit to `out`. A finite source that has been drained
    /// returns [`Error::Exhausted`] and appends nothing.
    fn extend(&mut self, out: &mut Vec<u8>) -> Result<()>;
}

pub type BoxSource = Box<dyn DigitSource>;

/// Pull-based reader over a source, one digit at a time.
pub struct Reader {
    source: BoxSource,
    buf: Vec<u8>,
    pos: usize,
    consumed: u64,
}

impl Reader {
    pub fn new(source: BoxSource) -> Self {
        Reader {
            source,
            buf: Vec::new(),
            pos: 0,
            consumed: 0,
        }
    }

    pub fn next_digit(&mut self) -> Result<u8> {
        if self.pos == self.buf.len() {
            self.buf.clear();
            self.pos = 0;
            while self.buf.is_empty() {
                self.source.extend(&mut self.buf)?;
            }
        }
        let d = self.buf[self.pos];
        self.pos += 1;
        self.consumed += 1;
        Ok(d)
    }

    /// Number of digits handed out so far.
    pub fn consumed(&self) -> u64 {
        self.consumed
    }
}

/// An infinite word with an on-demand, append-only digit cache.
pub struct LazyWord {
    source: BoxSource,
    cache: Vec<u8>,
    budget: usize,
}

impl LazyWord {
    pub fn new(source: impl DigitSource + 'static) -> Self {
        Self::from_box(Box::new(source))
    }

    pub fn from_box(source: BoxSource) -> Self {
        LazyWord {
            source,
            cache: Vec::new(),
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// Materializes at least `n` digits.
    pub fn ensure(&mut self, n: usize) -> Result<()> {
        if n > self.budget {
            return Err(Error::Budget {
                budget: self.budget,
                requested: n,
            });
        }
        while self.cache.len() < n {
            self.source.extend(&mut self.cache)?;
        }
        Ok(())
    }

    /// Digit `i` (0-based).
    pub fn digit(&mut self, i: usize) -> Result<u8> {
        self.ensure(i + 1)?;
        Ok(self.cache[i])
    }

    pub fn prefix(&mut self, n: usize) -> Result<&[u8]> {
        self.ensure(n)?;
        Ok(&self.cache[..n])
    }

    pub fn prefix_word(&mut self, n: usize) -> Result<Word> {
        Ok(Word::from_vec_unchecked(self.prefix(n)?.to_vec()))
    }

    /// Everything materialized so far.
    pub fn materialized(&self) -> &[u8] {
        &self.cache
    }

    /// Materializes digits until the `k`-th one (1-based) appears and returns its index.
    pub fn position_of_one(&mut self, k: usize, scan_limit: usize) -> Result<usize> {
        let mut seen = 0;
        let mut run = 0;
        let mut i = 0;
        loop {
            if self.digit(i)? == 1 {
                seen += 1;
                run = 0;
                if seen == k {
                    return Ok(i);
                }
            } else {
                run += 1;
                if run > scan_limit {
                    return Err(Error::ScanLimit(scan_limit));
                }
            }
            i += 1;
        }
    }

    /// Turns the word back into a stream starting at digit 0.
    pub fn into_source(self) -> BoxSource {
        Box::new(Replay {
            cached: self.cache,
            pos: 0,
            rest: self.source,
        })
    }
}

struct Replay {
    cached: Vec<u8>,
    pos: usize,
    rest: BoxSource,
}

impl DigitSource for Replay {
    fn extend(&mut self, out: &mut Vec<u8>) -> Result<()> {
        if self.pos < self.cached.len() {
            let end = (self.pos + 4096).min(self.cached.len());
            out.extend_from_slice(&self.cached[self.pos..end]);
            self.pos = end;
            if self.pos == self.cached.len() {
                self.cached = Vec::new();
                self.pos = 0;
            }
            return Ok(());
        }
        self.rest.extend(out)
    }
}

/// A finite word as a source; drained after its last digit.
pub struct FiniteSource {
    digits: Vec<u8>,
    done: bool,
}

impl FiniteSource {
    pub fn new(w: &Word) -> Self {
        FiniteSource {
            digits: w.digits().to_vec(),
            done: w.is_empty(),
        }
    }
}

impl DigitSource for FiniteSource {
    fn extend(&mut self, out: &mut Vec<u8>) -> Result<()> {
        if self.done {
            return Err(Error::Exhausted(self.digits.len()));
        }
        out.extend_from_slice(&self.digits);
        self.done = true;
        Ok(())
    }
}

/// `prefix · period · period · ...`.
pub struct PeriodicSource {
    word: EpWord,
    started: bool,
}

impl PeriodicSource {
    pub fn new(word: EpWord) -> Self {
        PeriodicSource {
            word,
            started: false,
        }
    }
}

impl DigitSource for PeriodicSource {
    fn extend(&mut self, out: &mut Vec<u8>) -> Result<()> {
        if !self.started {
            self.started = true;
            out.extend_from_slice(self.word.prefix().digits());
        }
        let per = self.word.period().digits();
        let reps = (256 / per.len()).max(1);
        for _ in 0..reps {
            out.extend_from_slice(per);
        }
        Ok(())
    }
}

/// Digits given by a pure function of their index.
pub struct IndexSource<F> {
    f: F,
    next: u64,
}

impl<F: Fn(u64) -> u8 + Send> IndexSource<F> {
    pub fn new(f: F) -> Self {
        IndexSource { f, next: 0 }
    }
}

impl<F: Fn(u64) -> u8 + Send> DigitSource for IndexSource<F> {
    fn extend(&mut self, out: &mut Vec<u8>) -> Result<()> {
        for i in self.next..self.next + 1024 {
            out.push((self.f)(i));
        }
        self.next += 1024;
        Ok(())
    }
}

/// A repeated block: `pattern` written `count` times.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub pattern: Vec<u8>,
    pub count: u128,
}

impl Run {
    pub fn new(pattern: &[u8], count: u128) -> Self {
        Run {
            pattern: pattern.to_vec(),
            count,
        }
    }
}

/// Concatenation of runs produced on demand by `next_run`. Runs are emitted in
/// chunks, so astronomically long runs cost nothing until read.
pub struct RunSource<F> {
    next_run: F,
    current: Option<Run>,
}

impl<F: FnMut() -> Option<Run> + Send> RunSource<F> {
    pub fn new(next_run: F) -> Self {
        RunSource {
            next_run,
            current: None,
        }
    }
}

impl<F: FnMut() -> Option<Run> + Send> DigitSource for RunSource<F> {
    fn extend(&mut self, out: &mut Vec<u8>) -> Result<()> {
        loop {
            match &mut self.current {
                Some(run) if run.count > 0 && !run.pattern.is_empty() => {
                    let chunk = (4096 / run.pattern.len()).max(1) as u128;
                    let k = run.count.min(chunk);
                    for _ in 0..k {
                        out.extend_from_slice(&run.pattern);
                    }
                    run.count -= k;
                    return Ok(());
                }
                _ => match (self.next_run)() {
                    Some(run) => self.current = Some(run),
                    None => return Err(Error::Exhausted(0)),
                },
            }
        }
    }
}

enum Part {
    Ready(BoxSource),
    Deferred(Box<dyn FnOnce() -> Result<BoxSource> + Send>),
}

/// Sources played one after another. Deferred parts are only constructed when
/// the stream reaches them.
#[derive(Default)]
pub struct ConcatSource {
    parts: VecDeque<Part>,
}

impl ConcatSource {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(mut self, s: BoxSource) -> Self {
        self.parts.push_back(Part::Ready(s));
        self
    }

    pub fn push_word(self, w: &Word) -> Self {
        self.push(Box::new(FiniteSource::new(w)))
    }

    pub fn push_deferred(mut self, f: impl FnOnce() -> Result<BoxSource> + Send + 'static) -> Self {
        self.parts.push_back(Part::Deferred(Box::new(f)));
        self
    }
}

impl DigitSource for ConcatSource {
    fn extend(&mut self, out: &mut Vec<u8>) -> Result<()> {
        loop {
            let front = match self.parts.front_mut() {
                Some(p) => p,
                None => return Err(Error::Exhausted(0)),
            };
            if let Part::Deferred(_) = front {
                let Some(Part::Deferred(f)) = self.parts.pop_front() else {
                    unreachable!()
                };
                self.parts.push_front(Part::Ready(f()?));
                continue;
            }
            let Part::Ready(src) = front else { unreachable!() };
            match src.extend(out) {
                Err(Error::Exhausted(_)) => {
                    self.parts.pop_front();
                }
                other => return other,
            }
        }
    }
}

/// Streaming insertion of `0^(2 a_k)` before the k-th one.
pub struct InsertSource {
    input: Reader,
    entries: Vec<u64>,
    ones_seen: usize,
}

impl InsertSource {
    pub fn new(input: BoxSource, a: &NatSeq) -> Self {
        InsertSource {
            input: Reader::new(input),
            entries: a.entries().to_vec(),
            ones_seen: 0,
        }
    }
}

impl DigitSource for InsertSource {
    fn extend(&mut self, out: &mut Vec<u8>) -> Result<()> {
        let d = self.input.next_digit()?;
        if d == 1 {
            if let Some(&ak) = self.entries.get(self.ones_seen) {
                out.extend(std::iter::repeat_n(0u8, 2 * ak as usize));
            }
            self.ones_seen += 1;
        }
        out.push(d);
        Ok(())
    }
}

pub fn insert_zero_pairs_lazy(b: LazyWord, a: &NatSeq) -> LazyWord {
    let budget = b.budget();
    LazyWord::new(InsertSource::new(b.into_source(), a)).with_budget(budget)
}

/// Thue–Morse word starting with `start`: digit `i` is the parity of the ones in `i`, xor `start`.
pub fn thue_morse_source(start: u8) -> IndexSource<impl Fn(u64) -> u8 + Send> {
    assert!(start <= 1);
    IndexSource::new(move |i: u64| (i.count_ones() as u8 & 1) ^ start)
}

pub fn thue_morse(start: u8) -> LazyWord {
    LazyWord::new(thue_morse_source(start))
}

pub fn periodic(word: EpWord) -> LazyWord {
    LazyWord::new(PeriodicSource::new(word))
}
