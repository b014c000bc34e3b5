//! Fibers `R^{-1}(y)`: explicit points, cylinder-preimage measure, density of
//! ones and the dimension equation `t² + t^{1/d} = 1`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::periodic::{beta, beta_prime, EpWord};
use crate::rational::{check_unit, is_dyadic, rat, to_f64, Rational};
use crate::substitution::{sigma, sigma_ep, Parity};
use crate::word::{NatSeq, Word};

/// Which expansion of `y` a fiber point is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    Beta,
    BetaPrime,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberSpec {
    pub y: Rational,
    /// `sigma(beta(y))`, absent for `y = 0`.
    pub sigma_beta: Option<EpWord>,
    /// `sigma(beta'(y))`, present for `y = 0` and dyadic `y ∈ (0,1)`.
    pub sigma_beta_prime: Option<EpWord>,
    /// The fiber of `2/3` also contains `0`.
    pub includes_zero: bool,
}

impl FiberSpec {
    pub fn branch(&self, b: Branch) -> Result<&EpWord> {
        let w = match b {
            Branch::Beta => self.sigma_beta.as_ref(),
            Branch::BetaPrime => self.sigma_beta_prime.as_ref(),
        };
        w.ok_or_else(|| Error::Precondition(format!("branch {b:?} does not exist for y = {}", self.y)))
    }

    pub fn branches(&self) -> Vec<Branch> {
        let mut out = Vec::new();
        if self.sigma_beta.is_some() {
            out.push(Branch::Beta);
        }
        if self.sigma_beta_prime.is_some() {
            out.push(Branch::BetaPrime);
        }
        out
    }
}

pub fn fiber_spec(y: &Rational) -> Result<FiberSpec> {
    check_unit(y)?;
    let zero = y.is_zero();
    let one = y.is_one();
    let sigma_beta = if zero { None } else { Some(sigma_ep(&beta(y)?)) };
    let sigma_beta_prime = if zero || (!one && is_dyadic(y)) {
        Some(sigma_ep(&beta_prime(y)?))
    } else {
        None
    };
    Ok(FiberSpec {
        y: y.clone(),
        sigma_beta,
        sigma_beta_prime,
        includes_zero: *y == rat(2, 3),
    })
}

/// `xi(<a> sigma(branch(y)))`, a point with `R(x) = y`.
pub fn fiber_point(y: &Rational, a: &NatSeq, branch: Branch) -> Result<Rational> {
    let spec = fiber_spec(y)?;
    Ok(spec.branch(branch)?.insert_zero_pairs(a)?.xi())
}

/// Lebesgue measure of `R^{-1}` of the cylinder interval of `y`:
/// `2^{2n − |sigma(y)|} / 3^n` with `n = |y|`.
pub fn fiber_measure_cylinder(y: &Word) -> Result<Rational> {
    if y.is_empty() {
        return Err(Error::EmptyWord("cylinder measure"));
    }
    let n = y.len();
    let s = sigma(y, 1).len();
    let three_n = BigInt::from(3).pow(n as u32);
    // 2n - |sigma(y)| ≥ 0 since |sigma(y)| ≤ 2n
    Ok(Rational::new(BigInt::one() << (2 * n - s), three_n))
}

/// Monte Carlo estimate of a cylinder-preimage measure.
#[derive(Clone, Debug, Serialize)]
pub struct McEstimate {
    pub samples: u64,
    pub hits: u64,
    pub estimate: f64,
    pub std_error: f64,
}

/// Samples `x` uniformly (as random binary digits) and counts how often the
/// expansion of `R(x)` starts with `y`. Digits are drawn until `rho` has emitted
/// `|y|` digits or a mismatch appears.
pub fn monte_carlo_cylinder_measure(y: &Word, samples: u64, seed: u64) -> Result<McEstimate> {
    if y.is_empty() {
        return Err(Error::EmptyWord("cylinder measure"));
    }
    if samples == 0 {
        return Err(Error::Precondition("need at least one sample".into()));
    }
    let target = y.digits();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..samples {
        let mut pos = 0usize;
        let mut matched = 0usize;
        let mut hit = true;
        'sample: loop {
            let bits: u64 = rng.random();
            for j in 0..64 {
                let d = (bits >> j) & 1;
                if d == 1 {
                    let out = (pos & 1) as u8;
                    if out != target[matched] {
                        hit = false;
                        break 'sample;
                    }
                    matched += 1;
                    if matched == target.len() {
                        break 'sample;
                    }
                }
                pos += 1;
            }
        }
        hits += hit as u64;
    }
    let p = hits as f64 / samples as f64;
    Ok(McEstimate {
        samples,
        hits,
        estimate: p,
        std_error: (p * (1.0 - p) / samples as f64).sqrt(),
    })
}

/// Ones density of the canonical period of `sigma(beta(y))` (`sigma(beta'(0))` at `y = 0`).
pub fn density_d(y: &Rational) -> Result<Rational> {
    let spec = fiber_spec(y)?;
    let word = spec
        .sigma_beta
        .as_ref()
        .or(spec.sigma_beta_prime.as_ref())
        .expect("every y has a branch");
    Ok(word.period_density())
}

/// `−log₂ t` for the root `t ∈ (0,1)` of `t² + t^{1/d} = 1`, by bisection.
/// `d` is an arbitrary density in `(0,1]`; rational fibers use [`fiber_dimension`].
pub fn dimension_from_density(d: f64, tol: f64) -> Result<f64> {
    if !(d > 0.0 && d <= 1.0) {
        return Err(Error::OutOfRange(d.to_string(), "(0,1]"));
    }
    if !(tol > 0.0) {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    let f = |t: f64| t * t + t.powf(1.0 / d) - 1.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < tol * 1e-3 && v.abs() < tol {
            break;
        }
    }
    Ok(-(0.5 * (lo + hi)).log2())
}

pub fn fiber_dimension(y: &Rational, tol: f64) -> Result<f64> {
    dimension_from_density(to_f64(&density_d(y)?), tol)
}

/// `log₂` of the golden ratio: the largest fiber dimension.
pub fn log2_golden() -> f64 {
    ((1.0 + 5f64.sqrt()) / 2.0).log2()
}

/// Counts of adjacent pairs inside `rho(w)` over all words `w` of length `len`:
/// `(#01 + #10, #00 + #11)`.
pub fn pair_census(len: usize) -> (u64, u64) {
    assert!(len <= 24);
    let (mut mixed, mut equal) = (0u64, 0u64);
    for bits in 0u64..(1 << len) {
        let img = crate::substitution::rho(&Word::from_bits(bits, len), Parity::Even);
        for p in img.digits().windows(2) {
            if p[0] == p[1] {
                equal += 1;
            } else {
                mixed += 1;
            }
        }
    }
    (mixed, equal)
}

/// True when the periodic part, read cyclically, has no `00` factor.
pub fn period_is_simplest(w: &EpWord) -> bool {
    let p = w.period();
    let doubled = p.concat(p);
    doubled.is_simplest()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periodic::ep;
    use crate::rational::one;
    use crate::real_map::{r_rational, s_section};
    use crate::word::w;

    #[test]
    fn spec_cases() {
        let s1 = fiber_spec(&one()).unwrap();
        assert_eq!(s1.sigma_beta, Some(ep("(01)")));
        assert_eq!(s1.sigma_beta_prime, None);
        assert!(fiber_spec(&rat(2, 3)).unwrap().includes_zero);
        assert_eq!(fiber_spec(&rat(1, 2)).unwrap().branches().len(), 2);
        assert_eq!(fiber_spec(&rat(0, 1)).unwrap().branches(), vec![Branch::BetaPrime]);
        assert!(fiber_spec(&rat(1, 3)).unwrap().branch(Branch::BetaPrime).is_err());
    }

    #[test]
    fn points() {
        assert_eq!(fiber_point(&one(), &NatSeq::empty(), Branch::Beta).unwrap(), rat(1, 3));
        let x = fiber_point(&one(), &NatSeq::new(vec![1]), Branch::Beta).unwrap();
        assert_eq!(x, ep("0001(01)").xi());
        assert_eq!(x, rat(1, 12));
        assert_eq!(r_rational(&x).unwrap(), one());
        let z = fiber_point(&rat(1, 3), &NatSeq::new(vec![0, 1]), Branch::Beta).unwrap();
        assert_eq!(z, ep("1001(1)").xi());
        assert_eq!(r_rational(&z).unwrap(), rat(1, 3));
    }

    #[test]
    fn measures() {
        assert_eq!(fiber_measure_cylinder(&w("1")).unwrap(), rat(1, 3));
        assert_eq!(fiber_measure_cylinder(&w("11")).unwrap(), rat(1, 9));
        assert_eq!(fiber_measure_cylinder(&w("0")).unwrap(), rat(2, 3));
        assert_eq!(fiber_measure_cylinder(&w("01")).unwrap(), rat(4, 9));
        for len in 1..=10usize {
            let bound = Rational::new(BigInt::from(2).pow(len as u32), BigInt::from(3).pow(len as u32));
            for bits in 0u64..(1 << len) {
                assert!(fiber_measure_cylinder(&Word::from_bits(bits, len)).unwrap() <= bound);
            }
        }
    }

    #[test]
    fn measures_over_a_level_sum_to_one() {
        for len in 1..=10usize {
            let total: Rational = (0u64..(1 << len))
                .map(|b| fiber_measure_cylinder(&Word::from_bits(b, len)).unwrap())
                .sum();
            assert_eq!(total, one());
        }
    }

    #[test]
    fn densities() {
        assert_eq!(density_d(&one()).unwrap(), rat(1, 2));
        assert_eq!(density_d(&rat(1, 3)).unwrap(), one());
        assert_eq!(density_d(&rat(1, 2)).unwrap(), rat(1, 2));
        let spec = fiber_spec(&rat(1, 2)).unwrap();
        assert_eq!(spec.sigma_beta_prime.unwrap().period_density(), rat(1, 2));
    }

    #[test]
    fn dimension_values() {
        assert!((fiber_dimension(&one(), 1e-13).unwrap() - 0.5).abs() < 1e-12);
        assert!((fiber_dimension(&rat(1, 3), 1e-13).unwrap() - log2_golden()).abs() < 1e-12);
        assert!(dimension_from_density(0.0, 1e-9).is_err());
        assert!(dimension_from_density(0.5, 0.0).is_err());
    }

    #[test]
    fn small_census() {
        // length 2: images ε, 1, 0, 01 → one mixed pair
        assert_eq!(pair_census(2), (1, 0));
    }

    #[test]
    fn section_is_a_fiber_point() {
        for y in [rat(1, 5), rat(3, 8), one(), rat(0, 1)] {
            let spec = fiber_spec(&y).unwrap();
            let best = spec
                .branches()
                .into_iter()
                .map(|b| fiber_point(&y, &NatSeq::empty(), b).unwrap())
                .max()
                .unwrap();
            assert_eq!(best, s_section(&y).unwrap());
            for b in spec.branches() {
                assert!(period_is_simplest(spec.branch(b).unwrap()));
            }
        }
    }
}
