//! Self-checks grouped into suites, with a small and a full budget.
//!
//! Each check either passes, fails with a counterexample, or errors out. The
//! report is serializable so that scripts can consume it.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::fibers::{
    dimension_from_density, fiber_dimension, fiber_measure_cylinder, fiber_point, fiber_spec, log2_golden,
    monte_carlo_cylinder_measure, pair_census, period_is_simplest,
};
use crate::geometry::{
    area, area_closed_form, box_count, i_interval, integral_closed_form, integral_staircase, k_level,
    level_contains, quarter_structure_holds, t_image,
};
use crate::periodic::{beta, beta_prime, EpWord};
use crate::rational::{is_dyadic, pow2_inv, rat, Rational};
use crate::real_map::{
    check_functional, check_word_functional, classify_q, r_rational, rationals_up_to, s_section, QClass,
    DEFAULT_ORBIT_BUDGET,
};
use crate::special::{
    b0_stream, complexity_profile, minimal_period_seed, periodic_point, phi_fixed_point, psi,
    rho_power_fixes_prefix, scrambled_family, separated_set, thue_morse, x_ell_stream, ScrambledParams,
};
use crate::substitution::{rho, sigma, tau, vanishing_bound, vanishing_order, Parity};
use crate::word::{cylinder_interval, NatSeq, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Words,
    Map,
    Fibers,
    Graph,
    Chaos,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Words, Suite::Map, Suite::Fibers, Suite::Graph, Suite::Chaos];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Words => "words",
            Suite::Map => "map",
            Suite::Fibers => "fibers",
            Suite::Graph => "graph",
            Suite::Chaos => "chaos",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Budget {
    Small,
    Full,
}

impl Budget {
    fn pick<T>(self, small: T, full: T) -> T {
        match self {
            Budget::Small => small,
            Budget::Full => full,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub suite: Suite,
    pub status: Status,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub budget: Budget,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }
}

/// `Ok(None)` passes, `Ok(Some(witness))` fails.
type Outcome = Result<Option<String>>;
type Check = (&'static str, fn(Budget) -> Outcome);

fn first_failure<T>(items: impl IntoIterator<Item = T>, mut bad: impl FnMut(&T) -> Result<bool>, show: impl Fn(&T) -> String) -> Outcome {
    for it in items {
        if bad(&it)? {
            return Ok(Some(show(&it)));
        }
    }
    Ok(None)
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed)
}

fn random_word(r: &mut ChaCha8Rng, len: usize) -> Word {
    Word::from_digits((0..len).map(|_| r.random_range(0..2u8)).collect()).expect("binary")
}

fn random_rational(r: &mut ChaCha8Rng) -> Rational {
    let q: i64 = r.random_range(1..=1000);
    let p: i64 = r.random_range(1..=q);
    rat(p, q)
}

fn all_words(len: usize) -> impl Iterator<Item = Word> {
    (0u64..(1 << len)).map(move |b| Word::from_bits(b, len))
}

fn words_checks() -> Vec<Check> {
    vec![
        ("round trip xi(beta(x)) = x", |b| {
            let q = b.pick(32, 64);
            first_failure(
                rationals_up_to(q),
                |x| {
                    let mut bad = !x.is_zero() && beta(x)?.xi() != *x;
                    bad |= !x.is_one() && beta_prime(x)?.xi() != *x;
                    Ok(bad)
                },
                |x| x.to_string(),
            )
        }),
        ("beta = beta' exactly off dyadics", |b| {
            let q = b.pick(32, 64);
            first_failure(
                rationals_up_to(q).into_iter().filter(|x| !x.is_zero() && !x.is_one()),
                |x| Ok((beta(x)? == beta_prime(x)?) == is_dyadic(x)),
                |x| x.to_string(),
            )
        }),
        ("cylinder widths 2^-|w|", |b| {
            let max = b.pick(12, 20);
            first_failure(
                (1..=max).flat_map(|len| {
                    let step = if len > 14 { 97 } else { 1 };
                    (0u64..(1 << len)).step_by(step).map(move |v| Word::from_bits(v, len))
                }),
                |w| {
                    let (lo, hi) = cylinder_interval(w);
                    Ok(hi - lo != pow2_inv(w.len()))
                },
                |w| w.to_string(),
            )
        }),
        ("canonicalize idempotent and value-preserving", |b| {
            let max = b.pick(6, 8);
            let mut items = Vec::new();
            for pl in 0..=max {
                for ql in 1..=(max - pl).max(1) {
                    for pv in (0u64..(1 << pl)).step_by(1 + (pl > 5) as usize * 3) {
                        for qv in (0u64..(1 << ql)).step_by(1 + (ql > 5) as usize * 3) {
                            items.push((Word::from_bits(pv, pl), Word::from_bits(qv, ql)));
                        }
                    }
                }
            }
            first_failure(
                items,
                |(p, q)| {
                    let e = EpWord::new(p.clone(), q.clone())?;
                    let c = e.canonicalize();
                    let raw_value = raw_xi(p, q);
                    Ok(c.canonicalize() != c || c.xi() != raw_value)
                },
                |(p, q)| format!("{p}({q})"),
            )
        }),
        ("rho = tau on even-length words", |b| {
            let max = b.pick(12, 16);
            first_failure(
                (1..=max / 2).flat_map(|h| all_words(2 * h)),
                |w| Ok(tau(w)? != rho(w, Parity::Even)),
                |w| w.to_string(),
            )
        }),
        ("rho(vw) = rho(v) rho_v(w)", |b| {
            let mut r = rng();
            let n = b.pick(2_000, 20_000);
            let pairs: Vec<(Word, Word)> = (0..n)
                .map(|_| {
                    let (lv, lw) = (r.random_range(0..=10), r.random_range(0..=10));
                    (random_word(&mut r, lv), random_word(&mut r, lw))
                })
                .collect();
            first_failure(
                pairs,
                |(v, w)| {
                    let lhs = rho(&v.concat(w), Parity::Even);
                    let rhs = rho(v, Parity::Even).concat(&rho(w, Parity::of(v.len())));
                    Ok(lhs != rhs)
                },
                |(v, w)| format!("v={v} w={w}"),
            )
        }),
        ("rho(sigma(b)) = b", |b| {
            let mut r = rng();
            let n = b.pick(200, 1000);
            let words: Vec<Word> = (0..n).map(|_| random_word(&mut r, 256)).collect();
            first_failure(words, |w| Ok(rho(&sigma(w, 1), Parity::Even) != *w), |w| w.to_string())
        }),
        ("rho(<a>sigma(b)) = b and <a>sigma(b) < sigma(b)", |b| {
            let mut r = rng();
            let n = b.pick(200, 1000);
            let cases: Vec<(Word, NatSeq)> = (0..n)
                .map(|_| {
                    let w = random_word(&mut r, 64);
                    let len = r.random_range(1..=6);
                    let mut a: Vec<u64> = (0..len).map(|_| r.random_range(0..4)).collect();
                    a[0] += 1;
                    (w, NatSeq::new(a))
                })
                .collect();
            first_failure(
                cases,
                |(w, a)| {
                    let s = sigma(w, 1);
                    let ins = s.insert_zero_pairs(a)?;
                    Ok(rho(&ins, Parity::Even) != *w || ins.digits() >= s.digits())
                },
                |(w, a)| format!("b={w} a={a}"),
            )
        }),
        ("zero-pair insertion shifts ones by even amounts", |b| {
            let mut r = rng();
            let n = b.pick(200, 1000);
            let cases: Vec<(Word, NatSeq)> = (0..n)
                .map(|_| {
                    let w = random_word(&mut r, 40);
                    let a = (0..5).map(|_| r.random_range(0..4)).collect();
                    (w, NatSeq::new(a))
                })
                .collect();
            first_failure(
                cases,
                |(w, a)| {
                    let ins = w.insert_zero_pairs(a)?;
                    let ones = |d: &[u8]| d.iter().enumerate().filter(|p| *p.1 == 1).map(|p| p.0).collect::<Vec<_>>();
                    let (before, after) = (ones(w.digits()), ones(ins.digits()));
                    let mut shift = 0;
                    for (k, (&i, &j)) in before.iter().zip(&after).enumerate() {
                        shift += 2 * a.get(k) as usize;
                        if j != i + shift {
                            return Ok(true);
                        }
                    }
                    Ok(false)
                },
                |(w, a)| format!("b={w} a={a}"),
            )
        }),
        ("vanishing order bound, attained at 1^n", |b| {
            let max = b.pick(12, 16);
            first_failure(
                1..=max,
                |&len| {
                    for w in all_words(len) {
                        if vanishing_order(&w)? > vanishing_bound(len) {
                            return Ok(true);
                        }
                    }
                    Ok(vanishing_order(&Word::repeat(1, len))? != vanishing_bound(len))
                },
                |len| format!("length {len}"),
            )
        }),
        ("n_eps(w0) = n_eps(w)", |b| {
            let max = b.pick(10, 12);
            first_failure(
                (1..=max).flat_map(all_words),
                |w| Ok(vanishing_order(&w.concat(&Word::repeat(0, 1)))? != vanishing_order(w)?),
                |w| w.to_string(),
            )
        }),
        ("|rho^2(w)| <= |w|/2", |b| {
            let max = b.pick(12, 16);
            first_failure(
                (1..=max / 2).flat_map(|h| all_words(2 * h)),
                |w| Ok(2 * rho(&rho(w, Parity::Even), Parity::Even).len() > w.len()),
                |w| w.to_string(),
            )
        }),
    ]
}

/// `xi` of `p(q)` computed without canonicalization, as an independent reference.
fn raw_xi(p: &Word, q: &Word) -> Rational {
    let head = p.value();
    let period = Rational::new(q.to_bigint(), (BigInt::one() << q.len()) - 1);
    head + period * pow2_inv(p.len())
}

fn map_checks() -> Vec<Check> {
    vec![
        ("541/228 census", |_| {
            let c = pair_census(8);
            Ok((c != (541, 228)).then(|| format!("{c:?}")))
        }),
        ("exact values R(1/2), R(1/4), R(0), R(1), R(1/3), R(2/3)", |_| {
            let cases = [
                (rat(1, 2), rat(2, 3)),
                (rat(1, 4), rat(1, 3)),
                (rat(0, 1), rat(2, 3)),
                (rat(1, 1), rat(1, 3)),
                (rat(1, 3), rat(1, 1)),
                (rat(2, 3), rat(0, 1)),
            ];
            first_failure(cases, |(x, y)| Ok(r_rational(x)? != *y), |(x, _)| x.to_string())
        }),
        ("rationals reach C0 or C1", |b| {
            let q = b.pick(64, 128);
            first_failure(
                rationals_up_to(q),
                |x| {
                    let y = r_rational(x)?;
                    classify_q(x, DEFAULT_ORBIT_BUDGET)?;
                    Ok(!(y >= Rational::zero() && y <= Rational::one()))
                },
                |x| x.to_string(),
            )
        }),
        ("both classes dense at dyadic level <= 6", |b| {
            let q = b.pick(96, 128);
            let mut classes: Vec<(Rational, QClass)> = Vec::new();
            for x in rationals_up_to(q) {
                classes.push((x.clone(), classify_q(&x, DEFAULT_ORBIT_BUDGET)?));
            }
            let cells: Vec<(usize, u64)> = (0..=6).flat_map(|l| (0..1u64 << l).map(move |j| (l, j))).collect();
            first_failure(
                cells,
                |&(l, j)| {
                    let lo = Rational::new(BigInt::from(j), BigInt::one() << l);
                    let hi = Rational::new(BigInt::from(j + 1), BigInt::one() << l);
                    let inside = classes.iter().filter(|(x, _)| *x > lo && *x < hi);
                    let seen: HashSet<QClass> = inside.map(|(_, c)| *c).collect();
                    Ok(seen.len() < 2)
                },
                |(l, j)| format!("[{j}/2^{l}, {}/2^{l}]", j + 1),
            )
        }),
        ("R(S(y)) = y", |b| {
            let q = b.pick(32, 64);
            first_failure(rationals_up_to(q), |y| Ok(r_rational(&s_section(y)?)? != *y), |y| y.to_string())
        }),
        ("S(2/3) is not 0", |_| Ok(s_section(&rat(2, 3))?.is_zero().then(|| "S(2/3) = 0".into()))),
        ("section periods free of 00", |b| {
            let q = b.pick(32, 64);
            first_failure(
                rationals_up_to(q),
                |y| {
                    let spec = fiber_spec(y)?;
                    for br in spec.branches() {
                        if !period_is_simplest(spec.branch(br)?) {
                            return Ok(true);
                        }
                    }
                    Ok(false)
                },
                |y| y.to_string(),
            )
        }),
        ("functional identities", |b| {
            let mut r = rng();
            let xs: Vec<Rational> = (0..b.pick(200, 1000)).map(|_| random_rational(&mut r)).collect();
            first_failure(xs, |x| Ok(!check_functional(x)?.all_hold()), |x| x.to_string())
        }),
        ("word functional identity, |w| <= 4", |b| {
            let mut r = rng();
            let xs: Vec<Rational> = (0..b.pick(20, 100)).map(|_| random_rational(&mut r)).collect();
            let cases: Vec<(Word, Rational)> = (1..=4)
                .flat_map(all_words)
                .flat_map(|w| xs.iter().map(move |x| (w.clone(), x.clone())))
                .collect();
            first_failure(cases, |(w, x)| Ok(!check_word_functional(w, x)?), |(w, x)| format!("w={w} x={x}"))
        }),
        ("right cluster at dyadics excludes R(x)", |b| right_cluster(b.pick(6, 8))),
    ]
}

/// For dyadic `x = k/2^n`, values `R(x + 2^-n θ)` fall in `I_x` and `R(x)` does not.
fn right_cluster(max_level: usize) -> Outcome {
    let mut cases = Vec::new();
    for n in 1..=max_level {
        for k in (1..(1u64 << n)).step_by(2) {
            cases.push((n, k));
        }
    }
    first_failure(
        cases,
        |&(n, k)| {
            let x = Rational::new(BigInt::from(k), BigInt::one() << n);
            let (lo, hi) = i_interval(&Word::from_bits(k, n));
            let rx = r_rational(&x)?;
            if rx >= lo && rx <= hi {
                return Ok(true);
            }
            for j in 1..=6 {
                for t in [1i64, 3, 5, 7] {
                    let theta = rat(t, 8) * pow2_inv(j - 1);
                    let y = r_rational(&(&x + pow2_inv(n) * theta))?;
                    if y < lo || y > hi {
                        return Ok(true);
                    }
                }
            }
            Ok(false)
        },
        |(n, k)| format!("{k}/2^{n}"),
    )
}

fn fiber_checks() -> Vec<Check> {
    vec![
        ("fiber points map back to y", |b| {
            let q = b.pick(16, 32);
            let seqs = small_seqs(b.pick(2, 3), b.pick(2, 3));
            first_failure(
                rationals_up_to(q),
                |y| {
                    let spec = fiber_spec(y)?;
                    for br in spec.branches() {
                        for a in &seqs {
                            if r_rational(&fiber_point(y, a, br)?)? != *y {
                                return Ok(true);
                            }
                        }
                    }
                    Ok(false)
                },
                |y| y.to_string(),
            )
        }),
        ("section is the maximum and fiber points are distinct", |b| {
            let q = b.pick(12, 24);
            let seqs: Vec<NatSeq> = small_seqs(2, 3).into_iter().filter(|a| a.entries().last() != Some(&0)).collect();
            first_failure(
                rationals_up_to(q),
                |y| {
                    let s = s_section(y)?;
                    let spec = fiber_spec(y)?;
                    let mut seen = HashSet::new();
                    for br in spec.branches() {
                        for a in &seqs {
                            let x = fiber_point(y, a, br)?;
                            if x > s || (x == s && !a.is_empty()) || !seen.insert(x) {
                                return Ok(true);
                            }
                        }
                    }
                    Ok(false)
                },
                |y| y.to_string(),
            )
        }),
        ("cylinder measures 1/3, 2/3, 1/9, 4/9", |_| {
            let cases = [("1", rat(1, 3)), ("0", rat(2, 3)), ("11", rat(1, 9)), ("01", rat(4, 9))];
            first_failure(
                cases,
                |(w, m)| Ok(fiber_measure_cylinder(&w.parse()?)? != *m),
                |(w, _)| w.to_string(),
            )
        }),
        ("Monte Carlo measure within 4 standard errors", |b| {
            let samples = b.pick(100_000, 1_000_000);
            first_failure(
                ["1", "0", "11", "01"],
                |w| {
                    let word: Word = w.parse()?;
                    let exact = crate::rational::to_f64(&fiber_measure_cylinder(&word)?);
                    let mc = monte_carlo_cylinder_measure(&word, samples, 7)?;
                    Ok((mc.estimate - exact).abs() > 4.0 * mc.std_error)
                },
                |w| w.to_string(),
            )
        }),
        ("dimension equation monotone, solver converges", |b| {
            let n = b.pick(200, 1000);
            first_failure(
                1..=n,
                |&i| {
                    let d = i as f64 / n as f64;
                    let f = |t: f64| t * t + t.powf(1.0 / d);
                    let grid: Vec<f64> = (1..100).map(|j| j as f64 / 100.0).collect();
                    if grid.windows(2).any(|p| f(p[1]) <= f(p[0])) {
                        return Ok(true);
                    }
                    let t = 2f64.powf(-dimension_from_density(d, 1e-13)?);
                    Ok((f(t) - 1.0).abs() > 1e-9)
                },
                |i| format!("d = {i}/{n}"),
            )
        }),
        ("dimensions within [1/2, log2 phi]", |b| {
            let q = b.pick(32, 64);
            let hi = log2_golden() + 1e-12;
            first_failure(
                rationals_up_to(q),
                |y| {
                    let d = fiber_dimension(y, 1e-14)?;
                    Ok(!(0.5 - 1e-12..=hi).contains(&d))
                },
                |y| y.to_string(),
            )
        }),
    ]
}

/// All sequences with at most `len` entries, each at most `max`.
fn small_seqs(len: usize, max: u64) -> Vec<NatSeq> {
    let mut out = vec![NatSeq::empty()];
    let mut frontier = vec![Vec::<u64>::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for s in &frontier {
            for v in 0..=max {
                let mut t = s.clone();
                t.push(v);
                out.push(NatSeq::new(t.clone()));
                next.push(t);
            }
        }
        frontier = next;
    }
    out
}

fn graph_checks() -> Vec<Check> {
    vec![
        ("area=(3/4)^n", |b| {
            first_failure(0..=b.pick(10, 12), |&n| Ok(area(&k_level(n)?) != area_closed_form(n)), |n| n.to_string())
        }),
        ("boxcount=3^n", |b| {
            first_failure(0..=b.pick(10, 12), |&n| Ok(box_count(n)? != 3u64.pow(n as u32)), |n| n.to_string())
        }),
        ("staircase integral closed form", |b| {
            first_failure(
                (0..=b.pick(16, 20)).step_by(2),
                |&n| Ok(integral_staircase(n)? != integral_closed_form(n)),
                |n| n.to_string(),
            )
        }),
        ("T-image recursion equals direct levels", |b| {
            let mut cur = k_level(0)?;
            for n in 1..=b.pick(8, 10) {
                cur = t_image(&cur)?;
                if cur != k_level(n)? {
                    return Ok(Some(n.to_string()));
                }
            }
            Ok(None)
        }),
        ("three of four quarters kept", |_| {
            first_failure(0..=8, |&n| Ok(!quarter_structure_holds(n)?), |n| n.to_string())
        }),
        ("graph inside every level", |b| {
            let mut r = rng();
            let xs: Vec<Rational> = (0..b.pick(200, 1000)).map(|_| random_rational(&mut r)).collect();
            first_failure(
                xs,
                |x| {
                    let y = r_rational(x)?;
                    for n in 0..=12 {
                        if !level_contains(n, x, &y)? {
                            return Ok(true);
                        }
                    }
                    Ok(false)
                },
                |x| x.to_string(),
            )
        }),
        ("I_1/2 = [0,1/2], I_1/4 = [1/2,1]", |_| {
            let a = i_interval(&"1".parse()?) == (rat(0, 1), rat(1, 2));
            let b = i_interval(&"01".parse()?) == (rat(1, 2), rat(1, 1));
            Ok((!(a && b)).then(|| "cluster interval mismatch".into()))
        }),
    ]
}

fn chaos_checks() -> Vec<Check> {
    vec![
        ("b0 prefix and fixedness", |b| {
            let mut w = b0_stream();
            let head: Word = "00101111010101111111010101010101".parse()?;
            if w.prefix(32)? != head.digits() {
                return Ok(Some("first 32 digits".into()));
            }
            let n = b.pick(20_000, 100_000);
            Ok((!rho_power_fixes_prefix(&mut w, 1, n)?).then(|| format!("{n} digits")))
        }),
        ("Thue-Morse 2-cycle", |_| {
            let mut u = thue_morse(0);
            let mut ut = thue_morse(1);
            let img = crate::special::rho_power_prefix(u.prefix(10_000)?, 1);
            Ok((img[..] != ut.prefix(img.len())?[..]).then(|| "rho(u) is not u~".into()))
        }),
        ("x^l fixed by rho^(2l+1)", |_| {
            first_failure(
                1..=2usize,
                |&l| Ok(!rho_power_fixes_prefix(&mut x_ell_stream(l)?, 2 * l + 1, 10_000)?),
                |l| format!("l = {l}"),
            )
        }),
        ("psi(phi(a)) = a", |b| {
            let seqs = small_seqs(b.pick(3, 4), b.pick(3, 4));
            first_failure(
                seqs,
                |a| {
                    let mut w = phi_fixed_point(a)?;
                    Ok(psi(&mut w, a.len())? != *a)
                },
                |a| a.to_string(),
            )
        }),
        ("phi injective", |_| {
            let seqs: Vec<NatSeq> = small_seqs(2, 3).into_iter().filter(|a| a.entries().last() != Some(&0)).take(20).collect();
            let mut seen: HashMap<Vec<u8>, String> = HashMap::new();
            first_failure(
                seqs,
                |a| {
                    let p = phi_fixed_point(a)?.prefix(256)?.to_vec();
                    Ok(seen.insert(p, a.to_string()).is_some())
                },
                |a| a.to_string(),
            )
        }),
        ("periodic points of 1^n", |b| {
            first_failure(
                1..=b.pick(6, 10),
                |&n| {
                    let w = Word::repeat(1, n);
                    let p = vanishing_order(&w)?;
                    Ok(!rho_power_fixes_prefix(&mut periodic_point(&w, &[])?, p, 10_000)?)
                },
                |n| format!("1^{n}"),
            )
        }),
        ("minimal period of 00 sigma^(n-1)(0), n != 2", |b| {
            first_failure(
                (1..=b.pick(6, 8)).filter(|&n| n != 2),
                |&n| {
                    let mut p = periodic_point(&minimal_period_seed(n), &[])?;
                    let len = 4000;
                    if !rho_power_fixes_prefix(&mut p, n, len)? {
                        return Ok(true);
                    }
                    for k in 1..n {
                        if rho_power_fixes_prefix(&mut p, k, len)? {
                            return Ok(true);
                        }
                    }
                    Ok(false)
                },
                |n| format!("n = {n}"),
            )
        }),
        ("separated sets", |b| {
            let limit = b.pick(8, 12);
            let cases: Vec<(usize, usize)> = (1..=limit).flat_map(|k| (0..limit).map(move |n| (k, n))).filter(|&(k, n)| k * (n + 1) <= limit).collect();
            first_failure(
                cases,
                |&(k, n)| {
                    let s = separated_set(k, n)?;
                    if s.len() != 1 << (k * (n + 1)) {
                        return Ok(true);
                    }
                    Ok(s.min_distance().is_some_and(|d| d < pow2_inv(k + 1)))
                },
                |(k, n)| format!("k={k} n={n}"),
            )
        }),
        ("scrambled checkpoints", |b| {
            let depth = b.pick(2, 3);
            let fam = scrambled_family(&ScrambledParams {
                alpha_sources: vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]],
                w0: "1".parse()?,
                depth,
            })?;
            for stage in 1..=depth {
                for i in 0..fam.members.len() {
                    if fam.checkpoint(i, stage, 8)?.agrees_with_target != Some(true) {
                        return Ok(Some(format!("member {i} stage {stage}")));
                    }
                    for j in 0..i {
                        if fam.members[i].alpha[stage - 1] != fam.members[j].alpha[stage - 1] {
                            let sep = fam.stage_separation(i, j, stage, 8)?;
                            if sep.is_none_or(|s| s <= rat(1, 8)) {
                                return Ok(Some(format!("members {j},{i} stage {stage}")));
                            }
                        }
                    }
                }
            }
            Ok(None)
        }),
        ("complexity of b0 below 8n+3", |b| {
            let (len, max_n) = b.pick((100_000, 32), (1_000_000, 64));
            let p = complexity_profile(&mut b0_stream(), max_n, len)?;
            first_failure(p.iter().enumerate(), |(i, &c)| Ok(c >= 8 * (i + 1) + 3), |(i, c)| format!("p({}) = {c}", i + 1))
        }),
        ("complexity monotone and subadditive", |_| {
            let small = complexity_profile(&mut b0_stream(), 24, 20_000)?;
            let large = complexity_profile(&mut b0_stream(), 24, 40_000)?;
            first_failure(
                0..24,
                |&i| Ok(small[i] > large[i] || (i + 1 < 24 && large[i + 1] > 2 * large[i])),
                |i| format!("n = {}", i + 1),
            )
        }),
    ]
}

fn checks_for(suite: Suite) -> Vec<Check> {
    match suite {
        Suite::Words => words_checks(),
        Suite::Map => map_checks(),
        Suite::Fibers => fiber_checks(),
        Suite::Graph => graph_checks(),
        Suite::Chaos => chaos_checks(),
    }
}

pub fn run_suite(suite: Suite, budget: Budget) -> Vec<CheckResult> {
    checks_for(suite)
        .into_iter()
        .map(|(name, f)| {
            let (status, counterexample) = match f(budget) {
                Ok(None) => (Status::Pass, None),
                Ok(Some(w)) => (Status::Fail, Some(w)),
                Err(e) => (Status::Error, Some(e.to_string())),
            };
            CheckResult {
                name: name.to_string(),
                suite,
                status,
                counterexample,
            }
        })
        .collect()
}

pub fn run(suites: &[Suite], budget: Budget) -> Report {
    Report {
        budget,
        checks: suites.iter().flat_map(|&s| run_suite(s, budget)).collect(),
    }
}
