//! The erasing substitution `rho`, its parity-shifted twin, the block forms
//! `tau`/`tau_bar`, the section `sigma`, vanishing orders and preimages.
//!
//! `rho` deletes every `0` and rewrites a `1` according to the parity of its
//! position: `0` at odd positions, `1` at even ones (positions are 1-based).
//! With [`Parity::Odd`] the positions are shifted by one, which is how `rho`
//! acts on a suffix that follows an odd-length prefix.

use crate::error::{Error, Result};
use crate::lazy::{BoxSource, DigitSource, LazyWord, Reader, DEFAULT_SCAN_LIMIT};
use crate::periodic::EpWord;
use crate::word::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: usize) -> Parity {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn bit(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    /// Parity after advancing past `n` more positions.
    pub fn advance(self, n: usize) -> Parity {
        Parity::of(self.bit() + n % 2)
    }
}

/// Image digit of a `1` sitting at 0-based index `i` of a word read with `parity`.
#[inline]
fn image_of_one(i: usize, parity: Parity) -> u8 {
    ((i + parity.bit()) & 1) as u8
}

pub(crate) fn rho_digits(digits: &[u8], parity: Parity) -> Vec<u8> {
    digits
        .iter()
        .enumerate()
        .filter(|(_, &d)| d == 1)
        .map(|(i, _)| image_of_one(i, parity))
        .collect()
}

/// `rho` (even parity) or its shifted twin (odd parity) on a finite word.
pub fn rho(w: &Word, parity: Parity) -> Word {
    Word::from_vec_unchecked(rho_digits(w.digits(), parity))
}

/// Image of an eventually periodic word. Returns the eventually-zero word
/// unchanged in kind when the image erases to zeros; rejects eventually-zero input.
pub fn rho_ep(b: &EpWord, parity: Parity) -> Result<EpWord> {
    if b.is_eventually_zero() {
        return Err(Error::EventuallyZero(b.to_string()));
    }
    let head = rho(b.prefix(), parity);
    let start = parity.advance(b.prefix().len());
    let p = b.period();
    let mut block = rho(p, start);
    if p.len() % 2 == 1 {
        block.extend_from(&rho(p, start.flip()));
    }
    EpWord::new(head, block)
}

/// Result of applying iterates of `rho` to an eventually periodic word, which may
/// erase to a finite word once the tail becomes eventually zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Image {
    Finite(Word),
    Periodic(EpWord),
}

impl Image {
    pub fn is_empty(&self) -> bool {
        matches!(self, Image::Finite(w) if w.is_empty())
    }
}

fn rho_image(b: &Image, parity: Parity) -> Image {
    match b {
        Image::Finite(w) => Image::Finite(rho(w, parity)),
        Image::Periodic(e) if e.is_eventually_zero() => Image::Finite(rho(e.prefix(), parity)),
        Image::Periodic(e) => Image::Periodic(rho_ep(e, parity).expect("not eventually zero")),
    }
}

/// Parities of `|rho^i(v)|` for `i = 0..n`.
fn iterate_parities(v: &Word, n: usize) -> Vec<Parity> {
    let mut out = Vec::with_capacity(n);
    let mut cur = v.clone();
    for _ in 0..n {
        out.push(Parity::of(cur.len()));
        cur = rho(&cur, Parity::Even);
    }
    out
}

/// `rho^n_v`: the map `w ↦` suffix of `rho^n(v w)` after `rho^n(v)`.
pub fn rho_v_n(v: &Word, n: usize, w: &Word) -> Word {
    iterate_parities(v, n)
        .into_iter()
        .fold(w.clone(), |acc, p| rho(&acc, p))
}

/// `rho^n_v` on an eventually periodic word.
pub fn rho_v_n_ep(v: &Word, n: usize, b: &EpWord) -> Image {
    iterate_parities(v, n)
        .into_iter()
        .fold(Image::Periodic(b.clone()), |acc, p| rho_image(&acc, p))
}

/// `rho^n_v` on a lazy word, as a stack of streaming transducers.
pub fn rho_v_n_lazy(v: &Word, n: usize, b: LazyWord) -> LazyWord {
    let budget = b.budget();
    let src = iterate_parities(v, n)
        .into_iter()
        .fold(b.into_source(), |acc, p| {
            Box::new(RhoSource::new(acc, p, DEFAULT_SCAN_LIMIT)) as BoxSource
        });
    LazyWord::from_box(src).with_budget(budget)
}

/// `rho` applied to a lazy word. Output digit `j` becomes available once the
/// input has shown `j` ones.
pub fn rho_lazy(b: LazyWord, parity: Parity, scan_limit: usize) -> LazyWord {
    let budget = b.budget();
    LazyWord::new(RhoSource::new(b.into_source(), parity, scan_limit)).with_budget(budget)
}

/// Streaming `rho`.
pub struct RhoSource {
    input: Reader,
    parity: Parity,
    index: usize,
    zeros: usize,
    scan_limit: usize,
}

impl RhoSource {
    pub fn new(input: BoxSource, parity: Parity, scan_limit: usize) -> Self {
        RhoSource {
            input: Reader::new(input),
            parity,
            index: 0,
            zeros: 0,
            scan_limit,
        }
    }
}

impl DigitSource for RhoSource {
    fn extend(&mut self, out: &mut Vec<u8>) -> Result<()> {
        let mut produced = 0;
        while produced < 256 {
            if self.zeros > self.scan_limit {
                if produced > 0 {
                    break;
                }
                return Err(Error::ScanLimit(self.scan_limit));
            }
            let d = match self.input.next_digit() {
                Ok(d) => d,
                // the error resurfaces on the next call, nothing was consumed
                Err(_) if produced > 0 => break,
                Err(e) => return Err(e),
            };
            let i = self.index;
            self.index += 1;
            if d == 1 {
                out.push(image_of_one(i, self.parity));
                produced += 1;
                self.zeros = 0;
            } else {
                self.zeros += 1;
            }
        }
        Ok(())
    }
}

/// Block form of `rho` on even-length words: `00→ε, 01→1, 10→0, 11→01`.
pub fn tau(w: &Word) -> Result<Word> {
    if w.len() % 2 == 1 {
        return Err(Error::OddLength(w.len()));
    }
    let mut out = Vec::with_capacity(w.len());
    for pair in w.digits().chunks(2) {
        match pair {
            [0, 0] => {}
            [0, 1] => out.push(1),
            [1, 0] => out.push(0),
            _ => out.extend_from_slice(&[0, 1]),
        }
    }
    Ok(Word::from_vec_unchecked(out))
}

/// Right inverse of `tau`: `0→10, 1→01`.
pub fn tau_bar(w: &Word) -> Word {
    let mut out = Vec::with_capacity(2 * w.len());
    for &d in w.digits() {
        out.extend_from_slice(if d == 0 { &[1, 0] } else { &[0, 1] });
    }
    Word::from_vec_unchecked(out)
}

pub fn tau_bar_ep(b: &EpWord) -> EpWord {
    EpWord::new(tau_bar(b.prefix()), tau_bar(b.period())).expect("non-empty period")
}

pub(crate) fn sigma_digits(digits: &[u8], first_pred: u8, out: &mut Vec<u8>) -> u8 {
    let mut prev = first_pred;
    for &x in digits {
        if x == prev {
            out.extend_from_slice(&[0, 1]);
        } else {
            out.push(1);
        }
        prev = x;
    }
    prev
}

/// The section `sigma`: a digit becomes `1` when preceded by its complement and
/// `01` when preceded by itself. The first digit is treated as preceded by
/// `first_pred` (1 for `sigma`, 0 for the variant with the first image digit complemented).
pub fn sigma(w: &Word, first_pred: u8) -> Word {
    assert!(first_pred <= 1);
    let mut out = Vec::with_capacity(2 * w.len());
    sigma_digits(w.digits(), first_pred, &mut out);
    Word::from_vec_unchecked(out)
}

/// `sigma` on an eventually periodic word.
pub fn sigma_ep(b: &EpWord) -> EpWord {
    let w = b.prefix();
    let p = b.period();
    let last_w = w.last().unwrap_or(1);
    let last_p = p.last().expect("non-empty period");
    let v = if last_w == last_p {
        sigma(w, 1)
    } else {
        sigma(&w.concat(p), 1)
    };
    let q = sigma(p, last_p);
    EpWord::new(v, q).expect("non-empty period")
}

/// Streaming `sigma`, optionally applied to the complement of its input.
pub struct SigmaSource {
    input: Reader,
    prev: u8,
    complement: bool,
}

impl SigmaSource {
    pub fn new(input: BoxSource, first_pred: u8, complement: bool) -> Self {
        SigmaSource {
            input: Reader::new(input),
            prev: first_pred,
            complement,
        }
    }
}

impl DigitSource for SigmaSource {
    fn extend(&mut self, out: &mut Vec<u8>) -> Result<()> {
        let mut taken = 0;
        while taken < 256 {
            let d = match self.input.next_digit() {
                Ok(d) => d,
                Err(Error::Exhausted(_)) if taken > 0 => break,
                Err(e) => return Err(e),
            };
            let x = d ^ self.complement as u8;
            if x == self.prev {
                out.extend_from_slice(&[0, 1]);
            } else {
                out.push(1);
            }
            self.prev = x;
            taken += 1;
        }
        Ok(())
    }
}

pub fn sigma_lazy(b: LazyWord) -> LazyWord {
    let budget = b.budget();
    LazyWord::new(SigmaSource::new(b.into_source(), 1, false)).with_budget(budget)
}

/// `n_eps(w)`: the least `k > 0` with `rho^k(w) = ε`. The empty word is rejected as degenerate.
pub fn vanishing_order(w: &Word) -> Result<usize> {
    if w.is_empty() {
        return Err(Error::EmptyWord("vanishing order"));
    }
    let mut cur = w.digits().to_vec();
    let mut k = 0;
    while !cur.is_empty() {
        cur = rho_digits(&cur, Parity::Even);
        k += 1;
    }
    Ok(k)
}

/// The upper bound `2⌊log₂ n⌋ + 2` on vanishing orders of words of length `n ≥ 1`.
pub fn vanishing_bound(n: usize) -> usize {
    assert!(n >= 1);
    2 * (usize::BITS - 1 - n.leading_zeros()) as usize + 2
}

/// Largest word length accepted by the exhaustive preimage search.
pub const PREIMAGE_SEARCH_LIMIT: usize = 24;

/// All `u` with `|u| ≤ max_len`, last digit `1` and `rho^n_v(u) = w`, shortest first
/// and lexicographic within a length. Empty when nothing fits.
pub fn preimages(w: &Word, v: &Word, n: usize, max_len: usize) -> Result<Vec<Word>> {
    if n == 0 {
        return Err(Error::Precondition("preimages need n ≥ 1".into()));
    }
    if max_len > PREIMAGE_SEARCH_LIMIT {
        return Err(Error::SizeGuard {
            what: "preimage search length",
            value: max_len as u64,
            limit: PREIMAGE_SEARCH_LIMIT as u64,
        });
    }
    let parities = iterate_parities(v, n);
    let mut found = Vec::new();
    for len in 1..=max_len {
        for bits in 0u64..(1 << len) {
            if bits & 1 == 0 {
                continue;
            }
            let u = Word::from_bits(bits, len);
            let img = parities.iter().fold(u.clone(), |acc, &p| rho(&acc, p));
            if img == *w {
                found.push(u);
            }
        }
    }
    Ok(found)
}

/// The shortest preimage of `w` under `rho^n_v` ending in `1`, built by undoing
/// the iterates one at a time with `sigma` (complementing first whenever the
/// corresponding prefix image has odd length).
pub fn canonical_preimage(w: &Word, v: &Word, n: usize) -> Result<Word> {
    if w.is_empty() {
        return Err(Error::EmptyWord("preimage ending in 1"));
    }
    let parities = iterate_parities(v, n);
    Ok(sigma_chain(w, &parities))
}

/// Undoes `rho_{p_{n-1}} ∘ … ∘ rho_{p_0}` by applying `sigma` from the last map back.
pub(crate) fn sigma_chain(w: &Word, parities: &[Parity]) -> Word {
    parities.iter().rev().fold(w.clone(), |z, &p| match p {
        Parity::Even => sigma(&z, 1),
        Parity::Odd => sigma(&z.complement(), 1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periodic::ep;
    use crate::word::w;

    #[test]
    fn rho_examples() {
        assert_eq!(rho(&w("110"), Parity::Even), w("01"));
        assert_eq!(rho(&w("0000"), Parity::Even), Word::empty());
        assert_eq!(rho(&w("01"), Parity::Even), w("1"));
        assert_eq!(rho(&w("11"), Parity::Odd), w("10"));
    }

    #[test]
    fn rho_ep_examples() {
        assert_eq!(rho_ep(&ep("(01)"), Parity::Even).unwrap(), ep("(1)"));
        assert_eq!(rho_ep(&ep("(1)"), Parity::Even).unwrap(), ep("(01)"));
        assert_eq!(rho_ep(&ep("(10)"), Parity::Even).unwrap(), ep("(0)"));
        assert!(rho_ep(&ep("1(0)"), Parity::Even).is_err());
    }

    #[test]
    fn rho_v_n_examples() {
        assert_eq!(rho_v_n_ep(&w("110"), 2, &ep("(01)")), Image::Finite(Word::empty()));
        assert_eq!(rho_v_n(&w("1"), 1, &w("11")), w("10"));
        let u = w("1101001");
        assert_eq!(rho_v_n(&Word::empty(), 3, &u), {
            let a = rho(&u, Parity::Even);
            let b = rho(&a, Parity::Even);
            rho(&b, Parity::Even)
        });
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau(&w("11")).unwrap(), w("01"));
        assert_eq!(tau(&w("00")).unwrap(), Word::empty());
        assert_eq!(tau(&w("1010")).unwrap(), w("00"));
        assert_eq!(tau(&w("101")), Err(Error::OddLength(3)));
        assert_eq!(tau_bar(&w("01")), w("1001"));
        assert_eq!(tau_bar(&Word::empty()), Word::empty());
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_ep(&ep("(01)")), ep("(1)"));
        assert_eq!(sigma_ep(&ep("(1)")), ep("(01)"));
        assert_eq!(sigma(&w("11"), 1), w("0101"));
        assert_eq!(sigma(&sigma(&w("11"), 1), 1), w("1111"));
        let s = sigma_ep(&ep("1(0)"));
        assert_eq!(s, ep("01(10)"));
        assert_eq!(rho_ep(&s, Parity::Even).unwrap(), ep("1(0)"));
    }

    #[test]
    fn vanishing_examples() {
        for n in 1..40 {
            assert_eq!(vanishing_order(&Word::repeat(0, n)).unwrap(), 1);
            assert_eq!(vanishing_order(&Word::repeat(1, n)).unwrap(), vanishing_bound(n));
        }
        assert_eq!(vanishing_order(&w("110")).unwrap(), 4);
        assert_eq!(vanishing_order(&Word::empty()), Err(Error::EmptyWord("vanishing order")));
    }

    #[test]
    fn preimage_examples() {
        let e = Word::empty();
        assert_eq!(preimages(&w("1"), &e, 1, 4).unwrap()[0], w("01"));
        assert!(preimages(&e, &e, 1, 8).unwrap().is_empty());
        assert_eq!(preimages(&w("0"), &e, 1, 4).unwrap()[0], w("1"));
        assert!(canonical_preimage(&e, &e, 1).is_err());
    }

    #[test]
    fn canonical_preimage_is_the_search_head() {
        for (target, v, n) in [
            ("1", "", 1),
            ("0", "", 2),
            ("10", "1", 1),
            ("01", "110", 2),
            ("1", "0", 3),
            ("11", "10", 2),
            ("010", "", 2),
        ] {
            let (t, v) = (w(target), w(v));
            let c = canonical_preimage(&t, &v, n).unwrap();
            assert_eq!(rho_v_n(&v, n, &c), t);
            let all = preimages(&t, &v, n, c.len() + 1).unwrap();
            assert_eq!(all[0], c, "target {t} prefix {v} n {n}");
            assert!(all.iter().skip(1).all(|u| u.len() > c.len()));
        }
    }

    #[test]
    fn streaming_matches_finite() {
        let b = crate::lazy::thue_morse(0).prefix_word(4000).unwrap();
        for parity in [Parity::Even, Parity::Odd] {
            let mut l = rho_lazy(crate::lazy::thue_morse(0), parity, 64);
            let direct = rho(&b, parity);
            assert_eq!(l.prefix_word(1500).unwrap(), direct.truncate(1500));
        }
        let mut s = sigma_lazy(crate::lazy::thue_morse(0));
        assert_eq!(s.prefix_word(1000).unwrap(), sigma(&b, 1).truncate(1000));
    }

    #[test]
    fn scan_limit_fires_on_zero_tail() {
        let z = crate::lazy::periodic(ep("1(0)"));
        let mut l = rho_lazy(z, Parity::Even, 1000);
        assert_eq!(l.digit(0).unwrap(), 0);
        assert_eq!(l.digit(1), Err(Error::ScanLimit(1000)));
    }
}
