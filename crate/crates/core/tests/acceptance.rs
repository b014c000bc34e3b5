//! Acceptance criteria, one line each. Runs as a plain binary so the lines
//! always show up in `cargo test` output.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rholab::fibers::{density_d, fiber_dimension, fiber_measure_cylinder, monte_carlo_cylinder_measure, pair_census};
use rholab::geometry::{area, box_count, i_interval, integral_staircase, k_level};
use rholab::rational::{rat, to_f64, Rational};
use rholab::real_map::{classify_q, r_rational, rationals_up_to, QClass, DEFAULT_ORBIT_BUDGET};
use rholab::special::{
    b0_stream, complexity_profile, phi_fixed_point, psi, scrambled_family, separated_set, thue_morse, x_ell_stream,
    ScrambledParams,
};
use rholab::substitution::{sigma, vanishing_bound, vanishing_order};
use rholab::word::{NatSeq, Word};

type Outcome = Result<String, String>;

/// Deletes zeros and writes the position parity of each one.
fn rho_oracle(d: &[u8]) -> Vec<u8> {
    d.iter().enumerate().filter(|p| *p.1 == 1).map(|(i, _)| (i & 1) as u8).collect()
}

fn rho_power_oracle(d: &[u8], p: usize) -> Vec<u8> {
    (0..p).fold(d.to_vec(), |acc, _| rho_oracle(&acc))
}

fn thue_morse_oracle(len: usize, start: u8) -> Vec<u8> {
    (0..len as u64).map(|i| (i.count_ones() as u8 & 1) ^ start).collect()
}

fn within(t: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let e = t.elapsed();
    if e > limit {
        Err(format!("{what} took {e:?}, limit {limit:?}"))
    } else {
        Ok(())
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn exact_values() -> Outcome {
    let cases = [
        (rat(1, 2), rat(2, 3)),
        (rat(1, 4), rat(1, 3)),
        (rat(0, 1), rat(2, 3)),
        (rat(1, 1), rat(1, 3)),
        (rat(1, 3), rat(1, 1)),
        (rat(2, 3), rat(0, 1)),
    ];
    let mut slowest = Duration::ZERO;
    for (x, y) in cases {
        let t = Instant::now();
        let r = r_rational(&x).map_err(err)?;
        slowest = slowest.max(t.elapsed());
        check(r == y, || format!("R({x}) = {r}, expected {y}"))?;
        within(t, Duration::from_millis(1), &format!("R({x})"))?;
    }
    Ok(format!("six values exact, slowest {slowest:?}"))
}

fn vanishing_oracle(w: &[u8]) -> usize {
    let mut d = w.to_vec();
    let mut k = 0;
    while !d.is_empty() {
        d = rho_oracle(&d);
        k += 1;
    }
    k
}

fn vanishing_bound_all_words() -> Outcome {
    let t = Instant::now();
    let mut words = 0u64;
    let mut attaining = Vec::new();
    for n in 1..=16usize {
        let bound = 2 * n.ilog2() as usize + 2;
        check(vanishing_bound(n) == bound, || format!("vanishing_bound({n}) = {}", vanishing_bound(n)))?;
        let mut at_bound = 0u64;
        for bits in 0u64..1 << n {
            let w = Word::from_bits(bits, n);
            let k = vanishing_order(&w).map_err(err)?;
            if bits & 0xff == 0 {
                check(k == vanishing_oracle(w.digits()), || format!("vanishing order of {w}"))?;
            }
            check(k <= bound, || format!("n_eps({w}) = {k} > {bound}"))?;
            at_bound += (k == bound) as u64;
            words += 1;
        }
        let ones = Word::repeat(1, n);
        check(vanishing_oracle(ones.digits()) == bound, || format!("1^{n} does not attain {bound}"))?;
        if n.is_power_of_two() {
            check(at_bound == 1, || format!("length {n}: {at_bound} words attain the bound"))?;
        }
        attaining.push(at_bound);
    }
    check(words == 131_070, || format!("{words} words"))?;
    within(t, Duration::from_secs(30), "sweep")?;
    Ok(format!("{words} words, 1^n attains the bound for every n, attaining counts {attaining:?}"))
}

fn section_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..1000 {
        let b = Word::from_digits((0..256).map(|_| rng.random_range(0..2u8)).collect()).map_err(err)?;
        let s = sigma(&b, 1);
        check(rho_oracle(s.digits()) == b.digits(), || format!("case {case}: rho(sigma(b)) != b"))?;
        let len = rng.random_range(1..=s.ones().min(12));
        let a = NatSeq::new((0..len).map(|_| rng.random_range(0..5)).collect());
        let inserted = s.insert_zero_pairs(&a).map_err(err)?;
        check(rho_oracle(inserted.digits()) == b.digits(), || format!("case {case}: a = {a}"))?;
    }
    Ok("1000 random cases at depth 256".into())
}

fn rational_attraction() -> Outcome {
    let t = Instant::now();
    let grid = rationals_up_to(128);
    let mut classes = Vec::with_capacity(grid.len());
    for x in &grid {
        classes.push((x.clone(), classify_q(x, DEFAULT_ORBIT_BUDGET).map_err(|e| format!("{x}: {e}"))?));
    }
    for level in 0..=6u32 {
        for j in 0..1i64 << level {
            let lo = rat(j, 1 << level);
            let hi = rat(j + 1, 1 << level);
            let mut seen = [false; 2];
            for (x, c) in &classes {
                if *x > lo && *x < hi {
                    seen[(*c == QClass::Q1) as usize] = true;
                }
            }
            check(seen == [true, true], || format!("interval ({lo}, {hi}) misses a class"))?;
        }
    }
    within(t, Duration::from_secs(60), "classification")?;
    Ok(format!("{} rationals classified, both classes in all 127 dyadic intervals", grid.len()))
}

/// `(3/7)(1 - (9/16)^n)` by repeated multiplication.
fn staircase_reference(n: usize) -> Rational {
    let mut q = rat(1, 1);
    for _ in 0..n {
        q *= rat(9, 16);
    }
    rat(3, 7) * (rat(1, 1) - q)
}

fn geometry() -> Outcome {
    let mut three_quarters = rat(1, 1);
    for n in 0..=12 {
        let a = area(&k_level(n).map_err(err)?);
        check(a == three_quarters, || format!("area(K_{n}) = {a}"))?;
        three_quarters *= rat(3, 4);
        let b = box_count(n).map_err(err)?;
        check(b == 3u64.pow(n as u32), || format!("box_count({n}) = {b}"))?;
    }
    let mut last = Rational::zero();
    for n in 0..=10 {
        last = integral_staircase(2 * n).map_err(err)?;
        check(last == staircase_reference(n), || format!("A_{} = {last}", 2 * n))?;
    }
    let gap = to_f64(&(rat(3, 7) - &last)).abs();
    check(gap < 1e-5, || {
        format!("areas, box counts and A_0..A_20 exact, but |A_20 - 3/7| = {gap:.6e}, not below 1e-5")
    })?;
    Ok(format!("areas, box counts and A_0..A_20 exact, |A_20 - 3/7| = {gap:.3e}"))
}

fn right_cluster() -> Outcome {
    let cases = [("1", rat(1, 2), rat(0, 1), rat(1, 2)), ("01", rat(1, 4), rat(1, 2), rat(1, 1))];
    for (w, x, lo, hi) in cases {
        let (a, b) = i_interval(&w.parse().map_err(err)?);
        check(a == lo && b == hi, || format!("I_{x} = [{a}, {b}]"))?;
        let r = r_rational(&x).map_err(err)?;
        check(r < a || r > b, || format!("R({x}) = {r} lies in I_{x}"))?;
    }
    Ok("I_1/2 = [0,1/2], I_1/4 = [1/2,1], R(x) outside both".into())
}

/// Root of `t^2 + t^{1/d} = 1` by plain bisection, returned as `-log2 t`.
fn dimension_oracle(d: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid * mid + mid.powf(1.0 / d) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    -(0.5 * (lo + hi)).log2()
}

fn dimensions() -> Outcome {
    let golden = ((1.0 + 5f64.sqrt()) / 2.0).log2();
    let tol = 1e-12;
    let d1 = fiber_dimension(&rat(1, 1), 1e-14).map_err(err)?;
    check((d1 - 0.5).abs() <= tol, || format!("dim(1) = {d1}"))?;
    let d3 = fiber_dimension(&rat(1, 3), 1e-14).map_err(err)?;
    check((d3 - golden).abs() <= tol, || format!("dim(1/3) = {d3}"))?;
    let grid = rationals_up_to(64);
    for y in &grid {
        let h = fiber_dimension(y, 1e-14).map_err(err)?;
        check(h >= 0.5 - tol && h <= golden + tol, || format!("dim({y}) = {h}"))?;
        let d = to_f64(&density_d(y).map_err(err)?);
        let oracle = dimension_oracle(d);
        check((h - oracle).abs() <= 1e-10, || format!("dim({y}) = {h}, bisection {oracle}"))?;
    }
    Ok(format!("dim(1) = {d1}, dim(1/3) = {d3}, {} fibers in range", grid.len()))
}

fn census() -> Outcome {
    let (mut mixed, mut equal) = (0u64, 0u64);
    for bits in 0u32..256 {
        let w: Vec<u8> = (0..8).rev().map(|i| ((bits >> i) & 1) as u8).collect();
        for p in rho_oracle(&w).windows(2) {
            if p[0] == p[1] {
                equal += 1;
            } else {
                mixed += 1;
            }
        }
    }
    check((mixed, equal) == (541, 228), || format!("brute force gives {mixed}/{equal}"))?;
    let lib = pair_census(8);
    check(lib == (541, 228), || format!("pair_census(8) = {lib:?}"))?;
    Ok("541 mixed pairs, 228 equal pairs".into())
}

fn measure() -> Outcome {
    let t = Instant::now();
    let one: Word = "1".parse().map_err(err)?;
    let m = fiber_measure_cylinder(&one).map_err(err)?;
    check(m == rat(1, 3), || format!("measure of [1] = {m}"))?;
    let mc = monte_carlo_cylinder_measure(&one, 1_000_000, 2024).map_err(err)?;
    let dev = (mc.estimate - 1.0 / 3.0).abs();
    check(dev <= 4.0 * mc.std_error, || format!("estimate {} off by {dev:e}, se {:e}", mc.estimate, mc.std_error))?;
    within(t, Duration::from_secs(60), "Monte Carlo")?;
    Ok(format!("exact 1/3, estimate {:.5} (se {:.1e})", mc.estimate, mc.std_error))
}

/// Prefix of `stream` long enough that `p` oracle iterates keep `len` digits,
/// compared against the prefix itself.
fn fixed_under(stream: &mut rholab::lazy::LazyWord, p: usize, len: usize) -> Result<bool, String> {
    let mut n = len;
    loop {
        let prefix = stream.prefix(n).map_err(err)?.to_vec();
        let img = rho_power_oracle(&prefix, p);
        if img.len() >= len {
            return Ok(img[..len] == prefix[..len]);
        }
        n *= 2;
    }
}

fn small_seqs(len: usize, max: u64) -> Vec<NatSeq> {
    let mut out = vec![Vec::<u64>::new()];
    let mut frontier = out.clone();
    for _ in 0..len {
        frontier = frontier
            .iter()
            .flat_map(|s| (0..=max).map(move |v| [s.as_slice(), &[v]].concat()))
            .collect();
        out.extend(frontier.iter().cloned());
    }
    out.into_iter().map(NatSeq::new).collect()
}

fn special_points() -> Outcome {
    let mut b0 = b0_stream();
    let head = b0.prefix(32).map_err(err)?.iter().map(|d| char::from(b'0' + d)).collect::<String>();
    check(head == "00101111010101111111010101010101", || format!("b0 starts {head}"))?;
    check(fixed_under(&mut b0, 1, 100_000)?, || "b0 not fixed to 1e5 digits".into())?;

    let tm = thue_morse(0).prefix(40_000).map_err(err)?.to_vec();
    check(tm == thue_morse_oracle(40_000, 0), || "Thue-Morse digits".into())?;
    let img = rho_oracle(&tm);
    check(img.len() >= 10_000 && img[..10_000] == thue_morse_oracle(10_000, 1), || "rho(u) != complement of u".into())?;
    check(rho_oracle(&img)[..10_000] == tm[..10_000], || "rho^2(u) != u".into())?;

    for ell in 1..=2 {
        let mut x = x_ell_stream(ell).map_err(err)?;
        check(fixed_under(&mut x, 2 * ell + 1, 10_000)?, || format!("x^{ell} not fixed"))?;
    }

    let seqs = small_seqs(4, 4);
    for a in &seqs {
        let mut w = phi_fixed_point(a).map_err(err)?;
        let back = psi(&mut w, a.len()).map_err(err)?;
        check(back == *a, || format!("psi(phi({a})) = {back}"))?;
    }
    Ok(format!("b0 head and fixedness, Thue-Morse, x^1, x^2, psi(phi(a)) for {} sequences", seqs.len()))
}

fn complexity() -> Outcome {
    let t = Instant::now();
    let p = complexity_profile(&mut b0_stream(), 64, 1_000_000).map_err(err)?;
    within(t, Duration::from_secs(120), "complexity")?;
    for (i, &c) in p.iter().enumerate() {
        let n = i + 1;
        check(c < 8 * n + 3, || format!("p({n}) = {c}"))?;
    }
    let digits = b0_stream().prefix(1_000_000).map_err(err)?.to_vec();
    for n in [1, 2, 5, 17, 64] {
        let brute = digits.windows(n).collect::<HashSet<_>>().len();
        check(brute == p[n - 1], || format!("p({n}) = {}, brute force {brute}", p[n - 1]))?;
    }
    Ok(format!("p(n) < 8n+3 for n <= 64, p(64) = {}", p[63]))
}

fn chaos_signatures() -> Outcome {
    let mut sets = 0;
    for k in 1..=12usize {
        for n in 0..12usize {
            if k * (n + 1) > 12 {
                continue;
            }
            let s = separated_set(k, n).map_err(err)?;
            check(s.len() == 1 << (k * (n + 1)), || format!("S({k},{n}) has {} points", s.len()))?;
            let mut marks = Vec::with_capacity(s.len());
            for i in 0..s.len() {
                let mut cur = s.point(i).materialized().ok_or_else(|| format!("S({k},{n}) point {i} unmaterialized"))?;
                let mut row = Vec::new();
                for j in 0..=n * s.ell {
                    if j % s.ell == 0 {
                        let target = s.tuples[i][j / s.ell].digits();
                        check(cur.len() > k && cur[..k] == *target && cur[k] == 0, || {
                            format!("S({k},{n}) point {i} misses its checkpoint at {j}")
                        })?;
                        row.push(cur[..=k].iter().fold(0u64, |a, &d| 2 * a + d as u64));
                    }
                    cur = rho_oracle(&cur);
                }
                marks.push(row);
            }
            let mut min_gap = u64::MAX;
            for i in 0..marks.len() {
                for j in i + 1..marks.len() {
                    let g = marks[i].iter().zip(&marks[j]).map(|(a, b)| a.abs_diff(*b).saturating_sub(1)).max().unwrap_or(0);
                    min_gap = min_gap.min(g);
                }
            }
            if marks.len() > 1 {
                check(min_gap >= 1, || format!("S({k},{n}) has points closer than 2^-{}", k + 1))?;
                let lib = s.min_distance().expect("two points");
                check(lib >= rat(1, 1 << (k + 1)), || format!("S({k},{n}) certified distance {lib}"))?;
            }
            sets += 1;
        }
    }

    let sources: Vec<Vec<u8>> = (0u8..8).map(|b| vec![b & 1, (b >> 1) & 1, (b >> 2) & 1]).collect();
    let depth = 3;
    let fam = scrambled_family(&ScrambledParams {
        alpha_sources: sources,
        w0: "1".parse().map_err(err)?,
        depth,
    })
    .map_err(err)?;
    let block = 8;
    let (mut separated, mut agreeing) = (0, 0);
    for stage in 1..=depth {
        let cps = (0..fam.members.len())
            .map(|m| fam.checkpoint(m, stage, block))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        for (i, ci) in cps.iter().enumerate() {
            check(ci.agrees_with_target == Some(true), || format!("member {i} stage {stage} block"))?;
            for (j, cj) in cps.iter().enumerate().take(i) {
                if ci.alpha == cj.alpha {
                    // only the guaranteed part of the block is shared
                    let g = ci.guaranteed.len().min(cj.guaranteed.len());
                    let (bi, bj) = (ci.block.as_deref().unwrap_or(""), cj.block.as_deref().unwrap_or(""));
                    check(g > 0 && bi.len() >= g && bj.get(..g) == bi.get(..g), || {
                        format!("members {j},{i} stage {stage} blocks differ on the guaranteed prefix")
                    })?;
                    agreeing += 1;
                } else {
                    let sep = fam.stage_separation(i, j, stage, block).map_err(err)?;
                    check(sep.as_ref().is_some_and(|s| *s > rat(1, 8)), || {
                        format!("members {j},{i} stage {stage} separation {sep:?}")
                    })?;
                    separated += 1;
                }
            }
        }
    }
    check(separated > 0 && agreeing > 0, || "no mismatch or no match checkpoints".into())?;
    Ok(format!("{sets} separated sets certified; scrambled depth 3: {separated} mismatch pairs > 1/8, {agreeing} matching pairs agree"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("exact values", exact_values),
        ("vanishing bound", vanishing_bound_all_words),
        ("fiber and section identities", section_identities),
        ("rational attraction", rational_attraction),
        ("geometry", geometry),
        ("right-cluster intervals", right_cluster),
        ("dimension solver", dimensions),
        ("pair census", census),
        ("measure formula", measure),
        ("special points", special_points),
        ("complexity", complexity),
        ("chaos signatures", chaos_signatures),
    ];
    let mut failed = Vec::new();
    let mut status = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = f();
        let ms = t.elapsed().as_millis();
        match &out {
            Ok(msg) => println!("criterion {:>2} pass  {name}: {msg} [{ms} ms]", i + 1),
            Err(msg) => {
                println!("criterion {:>2} FAIL  {name}: {msg} [{ms} ms]", i + 1);
                failed.push(i + 1);
            }
        }
        status.push(out.is_ok());
    }
    // limit statements are not computed; their finite ingredients are 8, 11 and 12
    let ingredients = status[7] && status[10] && status[11];
    if ingredients {
        println!("criterion 13 pass  limit statements: not computed, finite ingredients 8, 11, 12 pass");
    } else {
        println!("criterion 13 FAIL  limit statements: finite ingredients 8, 11, 12 did not all pass");
        failed.push(13);
    }
    if failed.is_empty() {
        println!("acceptance: all 13 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
