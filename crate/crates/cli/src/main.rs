use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use rholab::fibers::{density_d, fiber_dimension, fiber_point, fiber_spec, Branch};
use rholab::geometry::{export_plot_data, integral_staircase, PlotData, DEFAULT_GRAPH_LEVEL};
use rholab::periodic::{beta, beta_prime, EpWord};
use rholab::rational::{dyadic_decimal, parse_rational, rat, to_f64, Rational};
use rholab::real_map::{iterate_orbit, r_rational, TailCycle, DEFAULT_ORBIT_BUDGET};
use rholab::special::{
    b0_stream, complexity_profile, periodic_point, phi_fixed_point, scrambled_family, thue_morse, ScrambledParams,
};
use rholab::substitution::vanishing_order;
use rholab::verify::{self, Budget, Suite};
use rholab::word::{NatSeq, Word};
use rholab::Error;

const DIM_TOL: f64 = 1e-13;

#[derive(Parser)]
#[command(name = "rholab", version, about = "Exact computations for the erasing substitution rho and its interval map")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate R at a rational `p/q` or a word literal `PREFIX(PERIOD)`.
    Eval { x: String },
    /// Iterate R until the orbit closes.
    Orbit {
        x: String,
        #[arg(long, default_value_t = DEFAULT_ORBIT_BUDGET)]
        max_steps: usize,
    },
    /// Describe the fiber R^{-1}(y).
    Fiber {
        y: String,
        /// Print the Hausdorff dimension of the fiber.
        #[arg(long)]
        dim: bool,
        /// Fiber points for the given parameter sequences, e.g. `1,0,2`.
        #[arg(long, num_args = 1..)]
        sample: Vec<String>,
    },
    /// Export CSV data for the graph approximations.
    Graph {
        #[arg(long, default_value_t = DEFAULT_GRAPH_LEVEL)]
        level: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = GraphKind::Step)]
        kind: GraphKind,
    },
    /// Exact staircase integral at an even level.
    Integral {
        #[arg(long, default_value_t = 20)]
        level: usize,
    },
    /// Digits of a rho-fixed point; b0 by default.
    Fixed {
        /// Zero-pair insertion sequence, e.g. `2,0,1`.
        #[arg(long)]
        a: Option<String>,
        #[arg(long, default_value_t = 64)]
        digits: usize,
    },
    /// Digits of the periodic point generated by a finite word.
    Periodic {
        #[arg(long)]
        w: String,
        /// Zero-pair insertions applied to every later block.
        #[arg(long)]
        choice: Option<String>,
        #[arg(long, default_value_t = 64)]
        digits: usize,
    },
    /// Factor complexity of a prefix.
    Complexity {
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        prefix_len: usize,
        #[arg(long, value_enum, default_value_t = Stream::B0)]
        word: Stream,
    },
    /// Build a scrambled family and report its checkpoints.
    Scrambled {
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// One bit string per member.
        #[arg(long, value_delimiter = ',', default_values_t = ["00".to_string(), "10".to_string(), "01".to_string(), "11".to_string()])]
        alpha_bits: Vec<String>,
        #[arg(long, default_value = "1")]
        w0: String,
        #[arg(long, default_value_t = 8)]
        block_len: usize,
        #[arg(long, default_value_t = 64)]
        prefix_len: usize,
    },
    /// Run the verification suites.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, value_enum, default_value_t = BudgetArg::Small)]
        budget: BudgetArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphKind {
    Step,
    Rects,
    Integral,
}

#[derive(Clone, Copy, ValueEnum)]
enum Stream {
    B0,
    ThueMorse,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    All,
    Words,
    Map,
    Fibers,
    Graph,
    Chaos,
}

#[derive(Clone, Copy, ValueEnum)]
enum BudgetArg {
    Small,
    Full,
}

/// Result of a command: text lines, JSON value, and whether it counts as success.
struct Output {
    text: Vec<String>,
    json: Value,
    ok: bool,
}

impl Output {
    fn new(text: Vec<String>, json: Value) -> Self {
        Output { text, json, ok: true }
    }
}

fn parse_point(s: &str) -> rholab::Result<Rational> {
    if s.contains('(') {
        Ok(s.parse::<EpWord>()?.xi())
    } else {
        parse_rational(s)
    }
}

/// The expansion of `x` in `C`, or in `C'` at `0`.
fn expansion(x: &Rational) -> rholab::Result<EpWord> {
    if x == &Rational::from_integer(0.into()) {
        beta_prime(x)
    } else {
        beta(x)
    }
}

fn digits_string(d: &[u8]) -> String {
    d.iter().map(|&x| char::from(b'0' + x)).collect()
}

fn cycle_label(c: &TailCycle) -> String {
    match c {
        TailCycle::C0 => "C0".into(),
        TailCycle::C1 => "C1".into(),
        TailCycle::Other(v) => format!("cycle {{{}}}", v.join(", ")),
        TailCycle::Undecided => "undecided".into(),
    }
}

fn cmd_eval(x: &str) -> rholab::Result<Output> {
    let x = parse_point(x)?;
    let r = r_rational(&x)?;
    let (bx, br) = (expansion(&x)?, expansion(&r)?);
    Ok(Output::new(
        vec![format!("x = {x}"), format!("R = {r}"), format!("beta(x) = {bx}"), format!("beta(R) = {br}")],
        json!({"x": x.to_string(), "r": r.to_string(), "beta_x": bx.to_string(), "beta_r": br.to_string()}),
    ))
}

fn cmd_orbit(x: &str, max_steps: usize) -> rholab::Result<Output> {
    let rec = iterate_orbit(&parse_point(x)?, max_steps)?;
    let label = cycle_label(&rec.tail_cycle);
    let mut text: Vec<String> = rec.points.iter().enumerate().map(|(i, p)| format!("{i}: {p}")).collect();
    text.push(match rec.steps_to_cycle {
        Some(s) => format!("reaches {label} after {s} steps"),
        None => format!("{label} after {max_steps} steps"),
    });
    let mut json = serde_json::to_value(&rec).expect("serializable");
    json["label"] = json!(label);
    Ok(Output::new(text, json))
}

fn cmd_fiber(y: &str, dim: bool, sample: &[String]) -> rholab::Result<Output> {
    let y = parse_point(y)?;
    let spec = fiber_spec(&y)?;
    let mut text = vec![format!("y = {y}")];
    let mut json = json!({"y": y.to_string(), "includes_zero": spec.includes_zero});
    let branch_name = |b: Branch| match b {
        Branch::Beta => "sigma(beta(y))",
        Branch::BetaPrime => "sigma(beta'(y))",
    };
    for b in spec.branches() {
        let w = spec.branch(b)?;
        text.push(format!("{} = {w}", branch_name(b)));
        json[branch_name(b)] = json!(w.to_string());
    }
    if spec.includes_zero {
        text.push("fiber also contains 0".into());
    }
    if dim {
        let d = density_d(&y)?;
        let h = fiber_dimension(&y, DIM_TOL)?;
        text.push(format!("density = {d}"));
        text.push(format!("dim = {h}"));
        json["density"] = json!(d.to_string());
        json["dim"] = json!(h);
    }
    let mut points = Vec::new();
    for s in sample {
        let a: NatSeq = s.parse()?;
        for b in spec.branches() {
            let x = fiber_point(&y, &a, b)?;
            text.push(format!("x[{a}, {}] = {x}", branch_name(b)));
            points.push(json!({"a": a.to_string(), "branch": branch_name(b), "x": x.to_string()}));
        }
    }
    if !sample.is_empty() {
        json["samples"] = json!(points);
    }
    Ok(Output::new(text, json))
}

fn cmd_graph(level: usize, out: &std::path::Path, kind: GraphKind) -> rholab::Result<Output> {
    let what = match kind {
        GraphKind::Step => PlotData::Graph(level),
        GraphKind::Rects => PlotData::Rects(level),
        GraphKind::Integral => PlotData::Integral(level),
    };
    export_plot_data(what, out)?;
    let path = out.display().to_string();
    Ok(Output::new(vec![format!("wrote {path}")], json!({"level": level, "path": path})))
}

fn cmd_integral(level: usize) -> rholab::Result<Output> {
    let a = integral_staircase(level)?;
    let target = rat(3, 7);
    let dec = dyadic_decimal(&a).unwrap_or_else(|| format!("{:.17}", to_f64(&a)));
    let gap = to_f64(&(&target - &a));
    Ok(Output::new(
        vec![
            format!("A_{level} = {a}"),
            format!("decimal = {dec}"),
            format!("target = {target}"),
            format!("target - A_{level} = {gap:e}"),
        ],
        json!({"level": level, "value": a.to_string(), "decimal": dec, "target": target.to_string(), "gap": gap}),
    ))
}

fn cmd_fixed(a: Option<&str>, digits: usize) -> rholab::Result<Output> {
    let (label, mut w) = match a {
        None => ("b0".to_string(), b0_stream()),
        Some(s) => {
            let seq: NatSeq = s.parse()?;
            (format!("phi{seq}"), phi_fixed_point(&seq)?)
        }
    };
    let d = digits_string(w.prefix(digits)?);
    Ok(Output::new(vec![d.clone()], json!({"point": label, "digits": d})))
}

fn cmd_periodic(w: &str, choice: Option<&str>, digits: usize) -> rholab::Result<Output> {
    let w: Word = w.parse()?;
    let choice: Vec<u64> = match choice {
        Some(s) => s.parse::<NatSeq>()?.entries().to_vec(),
        None => Vec::new(),
    };
    let period = vanishing_order(&w)?;
    let d = digits_string(periodic_point(&w, &choice)?.prefix(digits)?);
    Ok(Output::new(
        vec![format!("period divides {period}"), d.clone()],
        json!({"w": w.to_string(), "period": period, "digits": d}),
    ))
}

fn cmd_complexity(n: usize, prefix_len: usize, word: Stream) -> rholab::Result<Output> {
    let mut b = match word {
        Stream::B0 => b0_stream(),
        Stream::ThueMorse => thue_morse(0),
    };
    let p = complexity_profile(&mut b, n, prefix_len)?;
    let text = p.iter().enumerate().map(|(i, c)| format!("p({}) = {c}", i + 1)).collect();
    Ok(Output::new(text, json!({"prefix_len": prefix_len, "counts": p})))
}

fn cmd_scrambled(depth: usize, bits: &[String], w0: &str, block_len: usize, prefix_len: usize) -> rholab::Result<Output> {
    let alpha_sources = bits
        .iter()
        .map(|s| s.parse::<Word>().map(Word::into_digits))
        .collect::<rholab::Result<Vec<_>>>()?;
    let fam = scrambled_family(&ScrambledParams {
        alpha_sources,
        w0: w0.parse()?,
        depth,
    })?;
    let rep = fam.report(block_len, prefix_len)?;
    let mut text = vec![
        format!("w0 = {}, depth = {}", rep.w0, rep.depth),
        format!("e = ({})", rep.e.join(", ")),
        format!("k = {:?}", rep.times),
    ];
    for m in &rep.members {
        text.push(format!("member {} bits {} alpha {}", m.id, m.bits, m.alpha));
        for c in &m.checkpoints {
            let block = c.block.as_deref().unwrap_or("unreachable");
            let agree = match c.agrees_with_target {
                Some(true) => "agrees",
                Some(false) => "DIFFERS",
                None => "n/a",
            };
            text.push(format!("  stage {} k={} alpha={} block {block} target {} {agree}", c.stage, c.time, c.alpha, c.guaranteed));
        }
    }
    Ok(Output::new(text, serde_json::to_value(&rep).expect("serializable")))
}

fn cmd_verify(suite: SuiteArg, budget: BudgetArg) -> Output {
    let suites: Vec<Suite> = match suite {
        SuiteArg::All => Suite::ALL.to_vec(),
        SuiteArg::Words => vec![Suite::Words],
        SuiteArg::Map => vec![Suite::Map],
        SuiteArg::Fibers => vec![Suite::Fibers],
        SuiteArg::Graph => vec![Suite::Graph],
        SuiteArg::Chaos => vec![Suite::Chaos],
    };
    let budget = match budget {
        BudgetArg::Small => Budget::Small,
        BudgetArg::Full => Budget::Full,
    };
    let report = verify::run(&suites, budget);
    let mut text: Vec<String> = report
        .checks
        .iter()
        .map(|c| match &c.counterexample {
            Some(w) => format!("[{}] {}: {} ({w})", c.suite, c.name, c.status),
            None => format!("[{}] {}: {}", c.suite, c.name, c.status),
        })
        .collect();
    let failed = report.checks.iter().filter(|c| c.status != verify::Status::Pass).count();
    text.push(format!("{} checks, {failed} failed", report.checks.len()));
    Output {
        text,
        json: serde_json::to_value(&report).expect("serializable"),
        ok: report.passed(),
    }
}

fn run(cli: &Cli) -> rholab::Result<Output> {
    match &cli.cmd {
        Cmd::Eval { x } => cmd_eval(x),
        Cmd::Orbit { x, max_steps } => cmd_orbit(x, *max_steps),
        Cmd::Fiber { y, dim, sample } => cmd_fiber(y, *dim, sample),
        Cmd::Graph { level, out, kind } => cmd_graph(*level, out, *kind),
        Cmd::Integral { level } => cmd_integral(*level),
        Cmd::Fixed { a, digits } => cmd_fixed(a.as_deref(), *digits),
        Cmd::Periodic { w, choice, digits } => cmd_periodic(w, choice.as_deref(), *digits),
        Cmd::Complexity { n, prefix_len, word } => cmd_complexity(*n, *prefix_len, *word),
        Cmd::Scrambled {
            depth,
            alpha_bits,
            w0,
            block_len,
            prefix_len,
        } => cmd_scrambled(*depth, alpha_bits, w0, *block_len, *prefix_len),
        Cmd::Verify { suite, budget } => Ok(cmd_verify(*suite, *budget)),
    }
}

fn is_usage_error(e: &Error) -> bool {
    matches!(e, Error::Parse { .. } | Error::OutOfRange(..) | Error::OddLength(..) | Error::Precondition(..))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("serializable"));
            } else {
                for line in &out.text {
                    println!("{line}");
                }
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            if cli.json {
                println!("{}", json!({"error": e.to_string()}));
            }
            eprintln!("error: {e}");
            ExitCode::from(if is_usage_error(&e) { 2 } else { 1 })
        }
    }
}
