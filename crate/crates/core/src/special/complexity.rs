//! Factor complexity of prefixes.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lazy::LazyWord;

fn count_factors(digits: &[u8], n: usize) -> usize {
    if n == 0 {
        return 1;
    }
    if n > digits.len() {
        return 0;
    }
    if n > 64 {
        return digits.windows(n).collect::<HashSet<_>>().len();
    }
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut key = 0u64;
    let mut keys = Vec::with_capacity(digits.len() - n + 1);
    for (i, &d) in digits.iter().enumerate() {
        key = ((key << 1) | d as u64) & mask;
        if i + 1 >= n {
            keys.push(key);
        }
    }
    keys.sort_unstable();
    keys.dedup();
    keys.len()
}

/// Distinct length-`n` factors among the first `prefix_len` digits: a lower
/// bound for the factor complexity of the whole word.
pub fn subword_complexity(b: &mut LazyWord, n: usize, prefix_len: usize) -> Result<usize> {
    if prefix_len < n {
        return Err(Error::Precondition(format!("prefix length {prefix_len} is shorter than {n}")));
    }
    Ok(count_factors(b.prefix(prefix_len)?, n))
}

/// Counts for `n = 1..=max_n` over one prefix.
pub fn complexity_profile(b: &mut LazyWord, max_n: usize, prefix_len: usize) -> Result<Vec<usize>> {
    if prefix_len < max_n {
        return Err(Error::Precondition(format!("prefix length {prefix_len} is shorter than {max_n}")));
    }
    let digits = b.prefix(prefix_len)?;
    Ok((1..=max_n).into_par_iter().map(|n| count_factors(digits, n)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lazy::{periodic, thue_morse};
    use crate::periodic::ep;

    fn brute(d: &[u8], n: usize) -> usize {
        d.windows(n).map(|w| w.to_vec()).collect::<HashSet<_>>().len()
    }

    #[test]
    fn alternating() {
        let mut b = periodic(ep("(01)"));
        assert_eq!(subword_complexity(&mut b, 2, 100).unwrap(), 2);
        assert!(subword_complexity(&mut b, 5, 4).is_err());
    }

    #[test]
    fn thue_morse_matches_brute_force() {
        let mut u = thue_morse(0);
        let d = u.prefix(1000).unwrap().to_vec();
        for n in 1..=20 {
            assert_eq!(subword_complexity(&mut u, n, 1000).unwrap(), brute(&d, n));
        }
        assert_eq!(subword_complexity(&mut u, 3, 1000).unwrap(), 6);
        assert_eq!(count_factors(&d, 70), brute(&d, 70));
    }
}
