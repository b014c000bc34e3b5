//! Exact rationals in the unit interval.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// `2^-exp` as an exact rational.
pub fn pow2_inv(exp: usize) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << exp)
}

pub fn in_unit_interval(x: &Rational) -> bool {
    !x.is_negative() && *x <= one()
}

pub fn check_unit(x: &Rational) -> Result<()> {
    if in_unit_interval(x) {
        Ok(())
    } else {
        Err(Error::OutOfRange(x.to_string(), "[0,1]"))
    }
}

/// True when the reduced denominator is a power of two.
pub fn is_dyadic(x: &Rational) -> bool {
    let d = x.denom();
    let bits = d.bits();
    bits > 0 && d.magnitude().trailing_zeros() == Some(bits - 1)
}

/// Parses `p/q`, or a bare integer `0`/`1`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let err = |reason: &str| Error::Parse {
        kind: "rational",
        input: s.to_string(),
        reason: reason.to_string(),
    };
    let t = s.trim();
    let (p, q) = match t.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (t, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| err("numerator is not an integer"))?;
    let q: BigInt = q.parse().map_err(|_| err("denominator is not an integer"))?;
    if q.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(Rational::new(p, q))
}

/// Exact decimal expansion of a dyadic rational. Returns `None` for non-dyadic input.
pub fn dyadic_decimal(x: &Rational) -> Option<String> {
    if !is_dyadic(x) {
        return None;
    }
    let exp = (x.denom().bits() - 1) as u32;
    let neg = x.is_negative();
    let num = x.numer().magnitude().clone() * BigUint::from(5u8).pow(exp);
    let (int, frac) = num.div_rem(&(BigUint::from(10u8).pow(exp)));
    let mut s = String::new();
    if neg {
        s.push('-');
    }
    s.push_str(&int.to_string());
    if exp > 0 {
        let digits = frac.to_string();
        s.push('.');
        for _ in digits.len()..exp as usize {
            s.push('0');
        }
        s.push_str(&digits);
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    Some(s)
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
