//! Plane geometry of the graph of `R`: the rectangle sets `K_n`, cluster
//! intervals `I_x`, areas, the integral staircase and box counts.
//!
//! Level `n` has one rectangle per `k < 2^n`: the column `[k/2^n, (k+1)/2^n]`
//! times the cylinder interval of `rho(x_1…x_n)`, where `x_1…x_n` are the
//! binary digits of `k`.

use std::fmt;
use std::io::Write;
use std::path::Path;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{dyadic_decimal, rat, Rational};
use crate::substitution::{rho, Parity};
use crate::word::{cylinder_interval, Word};

pub const MAX_LEVEL: usize = 24;
pub const MAX_BOX_LEVEL: usize = 16;

/// `num / 2^exp` in lowest terms, small enough for every coordinate up to [`MAX_LEVEL`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dyadic {
    num: u32,
    exp: u8,
}

impl Dyadic {
    pub fn new(num: u64, exp: u32) -> Self {
        let (mut num, mut exp) = (num, exp);
        while exp > 0 && num % 2 == 0 {
            num /= 2;
            exp -= 1;
        }
        assert!(num <= u32::MAX as u64 && exp <= u8::MAX as u32, "dyadic out of range");
        assert!(num <= 1u64 << exp, "dyadic outside [0,1]");
        Dyadic {
            num: num as u32,
            exp: exp as u8,
        }
    }

    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    pub fn num(self) -> u64 {
        self.num as u64
    }

    pub fn exp(self) -> u32 {
        self.exp as u32
    }

    /// Numerator over the common denominator `2^e`, `e ≥ exp`.
    fn scaled(self, e: u32) -> u64 {
        (self.num as u64) << (e - self.exp as u32)
    }

    pub fn half(self) -> Dyadic {
        Dyadic::new(self.num as u64, self.exp as u32 + 1)
    }

    /// `(1 + self) / 2`
    pub fn half_plus_half(self) -> Dyadic {
        let e = self.exp as u32 + 1;
        Dyadic::new((1u64 << self.exp) + self.num as u64, e)
    }

    /// `1 − self`
    pub fn one_minus(self) -> Dyadic {
        let e = self.exp as u32;
        Dyadic::new((1u64 << e) - self.num as u64, e)
    }

    pub fn to_rational(self) -> Rational {
        Rational::new(BigInt::from(self.num), BigInt::from(1u64) << self.exp)
    }

    pub fn decimal(self) -> String {
        dyadic_decimal(&self.to_rational()).expect("dyadic")
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, 1u64 << self.exp)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicRect {
    pub x_lo: Dyadic,
    pub x_hi: Dyadic,
    pub y_lo: Dyadic,
    pub y_hi: Dyadic,
}

impl DyadicRect {
    pub fn t0(&self) -> DyadicRect {
        DyadicRect {
            x_lo: self.x_lo.half(),
            x_hi: self.x_hi.half(),
            y_lo: self.y_hi.one_minus(),
            y_hi: self.y_lo.one_minus(),
        }
    }

    pub fn t1(&self) -> DyadicRect {
        DyadicRect {
            x_lo: self.x_lo.half_plus_half(),
            x_hi: self.x_hi.half_plus_half(),
            y_lo: self.y_hi.one_minus().half(),
            y_hi: self.y_lo.one_minus().half(),
        }
    }

    pub fn contains(&self, x: &Rational, y: &Rational) -> bool {
        let inside = |lo: Dyadic, hi: Dyadic, v: &Rational| lo.to_rational() <= *v && *v <= hi.to_rational();
        inside(self.x_lo, self.x_hi, x) && inside(self.y_lo, self.y_hi, y)
    }
}

/// The rectangles of one level, ordered by `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RectSet {
    pub level: usize,
    pub rects: Vec<DyadicRect>,
}

fn check_level(n: usize, limit: usize, what: &'static str) -> Result<()> {
    if n > limit {
        return Err(Error::SizeGuard {
            what,
            value: n as u64,
            limit: limit as u64,
        });
    }
    Ok(())
}

/// `rho` of the `n`-digit binary numeral of `k`, as (numeral value, length).
#[inline]
fn image_bits(k: u64, n: usize) -> (u64, u32) {
    let mut val = 0u64;
    let mut len = 0u32;
    for i in 0..n {
        if (k >> (n - 1 - i)) & 1 == 1 {
            // a one at 1-based position i+1 maps to 0 when that position is odd
            val = (val << 1) | (i as u64 & 1);
            len += 1;
        }
    }
    (val, len)
}

/// `I_x`: the cylinder interval of `rho(x)`.
pub fn i_interval(x: &Word) -> (Rational, Rational) {
    cylinder_interval(&rho(x, Parity::Even))
}

fn rect(k: u64, n: usize) -> DyadicRect {
    let (val, m) = image_bits(k, n);
    DyadicRect {
        x_lo: Dyadic::new(k, n as u32),
        x_hi: Dyadic::new(k + 1, n as u32),
        y_lo: Dyadic::new(val, m),
        y_hi: Dyadic::new(val + 1, m),
    }
}

/// `K_n` by the direct formula.
pub fn k_level(n: usize) -> Result<RectSet> {
    check_level(n, MAX_LEVEL, "rectangle level")?;
    Ok(RectSet {
        level: n,
        rects: (0..1u64 << n).map(|k| rect(k, n)).collect(),
    })
}

/// `T0(K) ∪ T1(K)`, ordered by left edge.
pub fn t_image(k: &RectSet) -> Result<RectSet> {
    check_level(k.level + 1, MAX_LEVEL, "rectangle level")?;
    let mut rects: Vec<DyadicRect> = k.rects.iter().map(DyadicRect::t0).collect();
    rects.extend(k.rects.iter().map(DyadicRect::t1));
    rects.sort_by(|a, b| a.x_lo.to_rational().cmp(&b.x_lo.to_rational()));
    Ok(RectSet {
        level: k.level + 1,
        rects,
    })
}

/// Exact total area.
pub fn area(k: &RectSet) -> Rational {
    // common denominator 2^{2n}; each rectangle has width 2^-n and height 2^-m with m ≤ n
    let e = 2 * k.level as u32;
    let total: u128 = k
        .rects
        .iter()
        .map(|r| {
            let w = r.x_hi.scaled(k.level as u32) - r.x_lo.scaled(k.level as u32);
            let h = r.y_hi.scaled(k.level as u32) - r.y_lo.scaled(k.level as u32);
            (w as u128) * (h as u128)
        })
        .sum();
    Rational::new(BigInt::from(total), BigInt::from(1u8) << e)
}

/// `(3/4)^n`
pub fn area_closed_form(n: usize) -> Rational {
    Rational::new(BigInt::from(3).pow(n as u32), BigInt::from(4).pow(n as u32))
}

/// Integral of the level-`n` step function given by the bottom edges of `K_n`.
pub fn integral_staircase(n: usize) -> Result<Rational> {
    check_level(n, MAX_LEVEL, "staircase level")?;
    if n % 2 == 1 {
        return Err(Error::Precondition(format!("staircase level {n} must be even")));
    }
    let mut total: u128 = 0;
    for k in 0..1u64 << n {
        let (val, m) = image_bits(k, n);
        total += (val as u128) << (n as u32 - m);
    }
    Ok(Rational::new(BigInt::from(total), BigInt::from(1u8) << (2 * n)))
}

/// `(3/7)(1 − (9/16)^{n/2})` for even `n`.
pub fn integral_closed_form(n: usize) -> Rational {
    let h = (n / 2) as u32;
    let q = Rational::new(BigInt::from(9).pow(h), BigInt::from(16).pow(h));
    rat(3, 7) * (rat(1, 1) - q)
}

/// Number of side-`2^-n` dyadic boxes inside `K_n`.
pub fn box_count(n: usize) -> Result<u64> {
    check_level(n, MAX_BOX_LEVEL, "box-count level")?;
    Ok((0..1u64 << n).map(|k| 1u64 << (n as u32 - image_bits(k, n).1)).sum())
}

/// Each rectangle of level `n` keeps three of its four quarters at level `n+1`:
/// the left child has the parent's full height, the right child its lower half
/// for even `n` and its upper half for odd `n`.
pub fn quarter_structure_holds(n: usize) -> Result<bool> {
    let parent = k_level(n)?;
    let child = k_level(n + 1)?;
    Ok(parent.rects.iter().enumerate().all(|(k, p)| {
        let left = child.rects[2 * k];
        let right = child.rects[2 * k + 1];
        let mid_y = Dyadic::new(
            p.y_lo.scaled(n as u32 + 1) + (p.y_hi.scaled(n as u32 + 1) - p.y_lo.scaled(n as u32 + 1)) / 2,
            n as u32 + 1,
        );
        let full = left.y_lo == p.y_lo && left.y_hi == p.y_hi;
        let half = if n % 2 == 0 {
            right.y_lo == p.y_lo && right.y_hi == mid_y
        } else {
            right.y_lo == mid_y && right.y_hi == p.y_hi
        };
        full && half
    }))
}

/// Whether `(x, y)` lies in some rectangle of `K_n`, checked without building the level.
pub fn level_contains(n: usize, x: &Rational, y: &Rational) -> Result<bool> {
    check_level(n, 62, "containment level")?;
    let scaled = x * Rational::from_integer(BigInt::from(1u64) << n);
    let fl = scaled.floor().to_integer();
    let top = (1u64 << n) as i128;
    let f: i128 = fl.try_into().map_err(|_| Error::OutOfRange(x.to_string(), "[0,1]"))?;
    let mut cands = vec![f.min(top - 1)];
    if scaled.is_integer() && f > 0 {
        cands.push(f - 1);
    }
    Ok(cands.into_iter().any(|k| {
        let w = Word::from_bits(k as u64, n);
        let (lo, hi) = i_interval(&w);
        lo <= *y && *y <= hi
    }))
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().from_writer(out)
}

/// Rows `level,k,x_lo,x_hi,y_lo,y_hi` with exact decimals.
pub fn write_rects_csv<W: Write>(k: &RectSet, out: W) -> Result<()> {
    let mut wtr = csv_writer(out);
    wtr.write_record(["level", "k", "x_lo", "x_hi", "y_lo", "y_hi"])?;
    for (i, r) in k.rects.iter().enumerate() {
        wtr.write_record([
            k.level.to_string(),
            i.to_string(),
            r.x_lo.decimal(),
            r.x_hi.decimal(),
            r.y_lo.decimal(),
            r.y_hi.decimal(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Rows `x,y`: the left end of each bottom edge of `K_n`.
pub fn write_step_csv<W: Write>(k: &RectSet, out: W) -> Result<()> {
    let mut wtr = csv_writer(out);
    wtr.write_record(["x", "y"])?;
    for r in &k.rects {
        wtr.write_record([r.x_lo.decimal(), r.y_lo.decimal()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Rows `level,A` for the even levels `0, 2, …, max_level`.
pub fn write_integral_csv<W: Write>(max_level: usize, out: W) -> Result<()> {
    let mut wtr = csv_writer(out);
    wtr.write_record(["level", "A"])?;
    for n in (0..=max_level).step_by(2) {
        let a = integral_staircase(n)?;
        wtr.write_record([n.to_string(), dyadic_decimal(&a).expect("dyadic")])?;
    }
    wtr.flush()?;
    Ok(())
}

/// What [`export_plot_data`] writes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PlotData {
    /// Step-function samples at a level.
    Graph(usize),
    /// Rectangles of a level.
    Rects(usize),
    /// Staircase integrals up to a level.
    Integral(usize),
}

pub const DEFAULT_GRAPH_LEVEL: usize = 14;

pub fn export_plot_data(what: PlotData, path: &Path) -> Result<()> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    match what {
        PlotData::Graph(n) => write_step_csv(&k_level(n)?, file),
        PlotData::Rects(n) => write_rects_csv(&k_level(n)?, file),
        PlotData::Integral(n) => write_integral_csv(n, file),
    }
}
