//! Distinguished infinite words: fixed and periodic points of `rho`, their
//! parametrization by integer sequences, target-hitting constructions,
//! scrambled families, separated sets and factor complexity.

mod complexity;
mod schedule;
mod scrambled;

pub use complexity::{complexity_profile, subword_complexity};
pub use schedule::{
    schedule, schedule_point, separated_set, ScheduleSpec, ScheduledWord, SeparatedSet, MATERIALIZE_CAP,
};
pub use scrambled::{
    alpha_of, checkpoint_times, dc1_statistics, e_sequence, mu, scrambled_family, Closeness, Dc1Series,
    FamilyReport, MemberReport, ScrambledFamily, ScrambledMember, ScrambledParams, StageCheckpoint,
    MAX_DEPTH,
};

pub use crate::lazy::thue_morse;

use crate::error::{Error, Result};
use crate::lazy::{DigitSource, LazyWord, Run, RunSource, DEFAULT_SCAN_LIMIT};
use crate::substitution::{rho_digits, sigma_digits, vanishing_order, Parity};
use crate::word::{insert_pairs, NatSeq, Word};

/// The largest fixed point of `rho`: `00101 ∏_h 1^{3·2^h} (01)^{3·2^h}`.
pub fn b0_stream() -> LazyWord {
    let mut h: u32 = 0;
    let mut started = false;
    let mut ones_next = true;
    LazyWord::new(RunSource::new(move || {
        if !started {
            started = true;
            return Some(Run::new(&[0, 0, 1, 0, 1], 1));
        }
        if h >= 120 {
            return None;
        }
        let count = 3u128 << h;
        let run = if ones_next {
            Run::new(&[1], count)
        } else {
            h += 1;
            Run::new(&[0, 1], count)
        };
        ones_next = !ones_next;
        Some(run)
    }))
}

fn sigma_block(digits: &[u8], complement: bool) -> Vec<u8> {
    let input: Vec<u8> = digits.iter().map(|&d| d ^ complement as u8).collect();
    let mut out = Vec::with_capacity(2 * input.len());
    sigma_digits(&input, 1, &mut out);
    out
}

/// Emits `w v1 v2 …` where each `v_k` is `sigma` of `v_{k-1}`, complemented
/// first when everything emitted so far has odd length.
struct CompletionSource {
    head: Option<Vec<u8>>,
    v: Vec<u8>,
    total: usize,
}

impl DigitSource for CompletionSource {
    fn extend(&mut self, out: &mut Vec<u8>) -> Result<()> {
        if let Some(w) = self.head.take() {
            out.extend_from_slice(&w);
            return Ok(());
        }
        self.v = sigma_block(&self.v, self.total % 2 == 1);
        self.total += self.v.len();
        out.extend_from_slice(&self.v);
        Ok(())
    }
}

/// The unique fixed point of `rho` that starts with `w` and continues with a
/// word free of `00`. Requires `rho(w)` to be a proper prefix of `w`.
pub fn complete_fixed(w: &Word) -> Result<LazyWord> {
    let image = rho_digits(w.digits(), Parity::Even);
    if !Word::from_vec_unchecked(image.clone()).is_prefix_of(w.digits()) {
        return Err(Error::Precondition(format!("rho({w}) is not a prefix of {w}")));
    }
    if image.len() == w.len() {
        return Err(Error::Precondition(format!("rho({w}) equals {w}, nothing to complete")));
    }
    let v0 = w.digits()[image.len()..].to_vec();
    Ok(LazyWord::new(CompletionSource {
        head: Some(w.digits().to_vec()),
        v: v0,
        total: w.len(),
    }))
}

/// The fixed point attached to a finitely supported sequence `a`: starting
/// from `b0`, stage `n` inserts `0^{2 a_n}` before the `n`-th one and
/// re-completes the prefix ending there.
pub fn phi_fixed_point(a: &NatSeq) -> Result<LazyWord> {
    let mut b = complete_fixed(&Word::from_vec_unchecked(vec![0]))?;
    for (i, &an) in a.entries().iter().enumerate() {
        if an == 0 {
            continue;
        }
        let pos = b.position_of_one(i + 1, DEFAULT_SCAN_LIMIT)?;
        let prefix = b.prefix(pos + 1)?;
        let (head, last) = prefix.split_at(pos);
        let mut w = head.to_vec();
        w.extend(std::iter::repeat_n(0u8, 2 * an as usize));
        w.extend_from_slice(last);
        b = complete_fixed(&Word::from_vec_unchecked(w))?;
    }
    Ok(b)
}

/// Digits materialized by [`psi`] to check that its input is fixed by `rho`.
pub const PSI_CHECK_DIGITS: usize = 4096;

/// The sequence of a fixed point: the first entry counts the zero pairs before
/// the first one beyond the leading `00`, later entries count the disjoint zero
/// pairs right before each one. Inverse of [`phi_fixed_point`].
pub fn psi(b: &mut LazyWord, n_entries: usize) -> Result<NatSeq> {
    let last = if n_entries == 0 {
        0
    } else {
        b.position_of_one(n_entries, DEFAULT_SCAN_LIMIT)?
    };
    let check = (last + 1).max(PSI_CHECK_DIGITS);
    let prefix = b.prefix(check)?;
    let image = rho_digits(prefix, Parity::Even);
    if image[..] != prefix[..image.len()] {
        return Err(Error::Precondition("word is not fixed by rho".into()));
    }
    let mut entries = Vec::with_capacity(n_entries);
    let mut zeros = 0u64;
    for &d in &prefix[..=last] {
        if entries.len() == n_entries {
            break;
        }
        if d == 0 {
            zeros += 1;
            continue;
        }
        if entries.is_empty() {
            if zeros < 2 {
                return Err(Error::Precondition("a fixed point starts with 00".into()));
            }
            entries.push((zeros - 2) / 2);
        } else {
            entries.push(zeros / 2);
        }
        zeros = 0;
    }
    Ok(NatSeq::new(entries))
}

pub const MAX_ELL: usize = 20;

/// The simplest point of odd period `2ℓ+1`:
/// `(01)^{2^{ℓ-1}} ∏_h u_h v_h` with
/// `u_h = 1^{2^a} (01)^{2^{a-1}} 1^{(2^ℓ-1) 2^a}`, `v_h = (01)^{2^c} 1^{2^c} (01)^{(2^ℓ-1) 2^c}`,
/// `a = (2ℓ+1)h + ℓ`, `c = a + ℓ`.
pub fn x_ell_stream(ell: usize) -> Result<LazyWord> {
    if ell == 0 {
        return Err(Error::OutOfRange("0".into(), "ℓ ≥ 1"));
    }
    if ell > MAX_ELL {
        return Err(Error::SizeGuard {
            what: "odd-period index ℓ",
            value: ell as u64,
            limit: MAX_ELL as u64,
        });
    }
    let mut runs = vec![Run::new(&[0, 1], 1u128 << (ell - 1))].into_iter();
    let mut h = 0usize;
    Ok(LazyWord::new(RunSource::new(move || loop {
        if let Some(r) = runs.next() {
            return Some(r);
        }
        let a = (2 * ell + 1) * h + ell;
        let c = a + ell;
        if c + ell >= 127 {
            return None;
        }
        runs = x_ell_runs(ell, a, c).into_iter();
        h += 1;
    })))
}

fn x_ell_runs(ell: usize, a: usize, c: usize) -> Vec<Run> {
    let m = (1u128 << ell) - 1;
    vec![
        Run::new(&[1], 1u128 << a),
        Run::new(&[0, 1], 1u128 << (a - 1)),
        Run::new(&[1], m << a),
        Run::new(&[0, 1], 1u128 << c),
        Run::new(&[1], 1u128 << c),
        Run::new(&[0, 1], m << c),
    ]
}

/// Largest block materialized by [`x_ell_blocks`].
pub const MAX_BLOCK_DIGITS: u128 = 1 << 24;

fn expand(runs: &[Run]) -> Result<Word> {
    let total: u128 = runs.iter().map(|r| r.count * r.pattern.len() as u128).sum();
    if total > MAX_BLOCK_DIGITS {
        return Err(Error::SizeGuard {
            what: "block digits",
            value: total.min(u64::MAX as u128) as u64,
            limit: MAX_BLOCK_DIGITS as u64,
        });
    }
    let mut out = Vec::with_capacity(total as usize);
    for r in runs {
        for _ in 0..r.count {
            out.extend_from_slice(&r.pattern);
        }
    }
    Ok(Word::from_vec_unchecked(out))
}

/// The head `(01)^{2^{ℓ-1}}` and the blocks `(u_h, v_h)` of [`x_ell_stream`], materialized.
pub fn x_ell_blocks(ell: usize, h: usize) -> Result<(Word, Word, Word)> {
    if ell == 0 || ell > MAX_ELL {
        return Err(Error::OutOfRange(ell.to_string(), "1 ≤ ℓ ≤ 20"));
    }
    let a = (2 * ell + 1) * h + ell;
    let c = a + ell;
    if c + ell >= 64 {
        return Err(Error::SizeGuard {
            what: "block exponent",
            value: c as u64,
            limit: 64,
        });
    }
    let runs = x_ell_runs(ell, a, c);
    let head = expand(&[Run::new(&[0, 1], 1u128 << (ell - 1))])?;
    Ok((head, expand(&runs[..3])?, expand(&runs[3..])?))
}

/// A point of period `n_eps(w)` starting with `w`: `w_0 = w` and each later
/// block is the shortest preimage of the previous one under `rho^n` read after
/// everything already emitted, with `0^{2c}` inserted before its first one for
/// `c = choice[k-1]` (missing entries count as 0).
pub fn periodic_point(w: &Word, choice: &[u64]) -> Result<LazyWord> {
    let n = vanishing_order(w)?;
    let choice = choice.to_vec();
    let mut lengths = vec![0usize; n];
    let mut last = w.digits().to_vec();
    record_lengths(&mut lengths, &last);
    let mut k = 0usize;
    Ok(LazyWord::new(RunSource::new(move || {
        if k > 0 {
            let mut z = last.clone();
            for i in (0..n).rev() {
                z = sigma_block(&z, lengths[i] % 2 == 1);
            }
            let c = choice.get(k - 1).copied().unwrap_or(0);
            if c > 0 {
                z = insert_pairs(&z, &[c]);
            }
            record_lengths(&mut lengths, &z);
            last = z;
        }
        k += 1;
        Some(Run::new(&last, 1))
    })))
}

/// Adds a new block to the running lengths `|rho^i(prefix)|`, `i < lengths.len()`.
pub(crate) fn record_lengths(lengths: &mut [usize], block: &[u8]) {
    let mut z = block.to_vec();
    for len in lengths.iter_mut() {
        if z.is_empty() {
            break;
        }
        let p = Parity::of(*len);
        *len += z.len();
        z = rho_digits(&z, p);
    }
}

/// The word `00 sigma^{n-1}(0)`, of vanishing order `n`. For `n ≠ 2` no
/// `rho^k` of it with `k < n` is a prefix of it (checked up to `n = 8`); for
/// `n = 2` the seed is `001` and its point is `b0`, a fixed point.
pub fn minimal_period_seed(n: usize) -> Word {
    assert!(n >= 1);
    let mut z = vec![0u8];
    for _ in 1..n {
        z = sigma_block(&z, false);
    }
    let mut w = vec![0, 0];
    w.extend(z);
    Word::from_vec_unchecked(w)
}

/// Whether `rho^p` maps the first `len` digits onto a prefix of the word.
pub fn rho_power_fixes_prefix(b: &mut LazyWord, p: usize, len: usize) -> Result<bool> {
    let prefix = b.prefix(len)?;
    let mut img = prefix.to_vec();
    for _ in 0..p {
        img = rho_digits(&img, Parity::Even);
    }
    Ok(img[..] == prefix[..img.len()])
}

/// `rho^p(x)` for the first `len` digits, as a finite word.
pub fn rho_power_prefix(digits: &[u8], p: usize) -> Vec<u8> {
    (0..p).fold(digits.to_vec(), |acc, _| rho_digits(&acc, Parity::Even))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::substitution::{rho, rho_v_n};
    use crate::word::w;

    const B0_32: &str = "00101111010101111111010101010101";

    fn digits(s: &str) -> Vec<u8> {
        w(s).into_digits()
    }

    #[test]
    fn b0_prefix_and_fixedness() {
        let mut b = b0_stream();
        assert_eq!(b.prefix(32).unwrap(), &digits(B0_32)[..]);
        assert!(rho_power_fixes_prefix(&mut b, 1, 20_000).unwrap());
    }

    #[test]
    fn completion() {
        let mut c = complete_fixed(&w("0")).unwrap();
        let mut b = b0_stream();
        assert_eq!(c.prefix(10_000).unwrap(), b.prefix(10_000).unwrap());
        let mut c = complete_fixed(&w("00101")).unwrap();
        assert_eq!(c.prefix(10_000).unwrap(), b.prefix(10_000).unwrap());
        assert!(complete_fixed(&w("1")).is_err());
        assert!(complete_fixed(&Word::empty()).is_err());
        let mut c = complete_fixed(&w("0000")).unwrap();
        assert!(rho_power_fixes_prefix(&mut c, 1, 5000).unwrap());
    }

    #[test]
    fn phi_basics() {
        let mut z = phi_fixed_point(&NatSeq::empty()).unwrap();
        assert_eq!(z.prefix(32).unwrap(), &digits(B0_32)[..]);
        let mut one = phi_fixed_point(&NatSeq::new(vec![1])).unwrap();
        assert_eq!(&one.prefix(5).unwrap()[..5], &digits("00001")[..]);
        assert!(rho_power_fixes_prefix(&mut one, 1, 10_000).unwrap());
        let a = NatSeq::new(vec![2, 0, 1]);
        let mut b = phi_fixed_point(&a).unwrap();
        assert_eq!(psi(&mut b, 3).unwrap(), a);
    }

    #[test]
    fn psi_rejects_non_fixed() {
        let mut b = b0_stream();
        assert_eq!(psi(&mut b, 6).unwrap(), NatSeq::new(vec![0; 6]));
        let mut alt = crate::lazy::periodic(crate::periodic::ep("(01)"));
        assert!(psi(&mut alt, 2).is_err());
    }

    #[test]
    fn x_ell_first_blocks() {
        let mut x = x_ell_stream(1).unwrap();
        let expect = "01".to_string() + "11" + "01" + "11" + &"01".repeat(4) + "1111" + &"01".repeat(4);
        assert_eq!(x.prefix(expect.len()).unwrap(), &digits(&expect)[..]);
        for ell in 1..=2 {
            let mut x = x_ell_stream(ell).unwrap();
            assert!(rho_power_fixes_prefix(&mut x, 2 * ell + 1, 10_000).unwrap());
        }
        assert!(x_ell_stream(0).is_err());
    }

    #[test]
    fn x_ell_block_identities() {
        for ell in 1..=2 {
            let n = 2 * ell + 1;
            let (head, u0, _) = x_ell_blocks(ell, 0).unwrap();
            assert_eq!(vanishing_order(&head).unwrap(), n);
            assert_eq!(rho_v_n(&head, n, &u0), head);
            let mut prefix = head.clone();
            for h in 0..2 {
                let (_, u, v) = x_ell_blocks(ell, h).unwrap();
                prefix.extend_from(&u);
                let pv = (0..n).fold(v.clone(), |acc, _| rho(&acc, Parity::Even));
                assert_eq!(pv, u);
                assert_eq!(rho_v_n(&prefix, n, &v), u);
                prefix.extend_from(&v);
                let (_, u_next, _) = x_ell_blocks(ell, h + 1).unwrap();
                assert_eq!(rho_v_n(&prefix, n, &u_next), v);
            }
        }
    }

    #[test]
    fn thue_morse_two_cycle() {
        let mut u = thue_morse(0);
        let mut ut = thue_morse(1);
        assert_eq!(u.prefix(32).unwrap(), &digits("01101001100101101001011001101001")[..]);
        let img = rho_digits(u.prefix(4096).unwrap(), Parity::Even);
        assert_eq!(&img[..], &ut.prefix(img.len()).unwrap()[..]);
        assert_eq!(crate::substitution::tau_bar(&crate::substitution::tau_bar(&w("0"))), w("0110"));
    }

    #[test]
    fn periodic_points() {
        let mut p = periodic_point(&w("0"), &[]).unwrap();
        let mut b = b0_stream();
        assert_eq!(p.prefix(5000).unwrap(), b.prefix(5000).unwrap());
        for n in 1..=6usize {
            let ones = Word::repeat(1, n);
            let per = vanishing_order(&ones).unwrap();
            let mut q = periodic_point(&ones, &[]).unwrap();
            assert!(rho_power_fixes_prefix(&mut q, per, 4000).unwrap(), "1^{n}");
        }
        let mut c = periodic_point(&w("101"), &[1, 0, 2]).unwrap();
        let per = vanishing_order(&w("101")).unwrap();
        assert!(rho_power_fixes_prefix(&mut c, per, 4000).unwrap());
    }

    #[test]
    fn minimal_period_witness() {
        for n in 1..=6usize {
            let seed = if n == 2 { w("1") } else { minimal_period_seed(n) };
            assert_eq!(vanishing_order(&seed).unwrap(), n);
            let mut p = periodic_point(&seed, &[]).unwrap();
            assert!(rho_power_fixes_prefix(&mut p, n, 3000).unwrap());
            for k in 1..n {
                assert!(!rho_power_fixes_prefix(&mut p, k, 3000).unwrap(), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn period_two_seed_collapses() {
        let seed = minimal_period_seed(2);
        assert_eq!(seed, w("001"));
        let mut p = periodic_point(&seed, &[]).unwrap();
        let mut b = b0_stream();
        assert_eq!(p.prefix(4000).unwrap(), b.prefix(4000).unwrap());
    }
}
