//! Command-line front end: generate, validate, translate and analyze
//! cover-tower documents.
//!
//! Exit codes: 0 success or Verified, 1 Refuted or invalid input,
//! 2 NotDecided at this depth, 3 usage or parse errors.

use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use coverforge::analysis::{self, ContainmentMode, VerdictStatus};
use coverforge::digraph::ArrowId;
use coverforge::dot;
use coverforge::dynamics::{itinerary, orbit, Thread};
use coverforge::format::{self, Document};
use coverforge::generate::{self, ContinuedFraction, IETConfig, RauzyStep};
use coverforge::kr;
use coverforge::sadic::SAdicSystem;
use coverforge::tower::{validate_tower, CoverTower};
use coverforge::translate;

#[derive(Parser)]
#[command(
    name = "coverforge",
    about = "Graph covers of zero-dimensional dynamical systems: generation, translation, analysis",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a document and check its invariants.
    Validate {
        /// Input path, or - for stdin.
        input: String,
    },
    /// Emit a generated document on stdout.
    Generate {
        /// Output format (before the kind); towers can be rendered as dot.
        #[arg(long)]
        format: Option<OutputFormat>,
        #[command(subcommand)]
        kind: GenerateKind,
    },
    /// Translate between representations.
    Translate {
        mode: TranslateMode,
        input: String,
        /// Rauzy tower depth (defaults to nmax - 1 of the language).
        #[arg(long)]
        depth: Option<usize>,
        /// How many levels deeper follower witnesses may come from.
        #[arg(long)]
        follower_depth: Option<usize>,
        /// Output format; towers can also be rendered as dot.
        #[arg(long)]
        format: Option<OutputFormat>,
    },
    /// Run a dynamical-property analysis and report a verdict.
    Analyze {
        which: AnalyzeKind,
        input: String,
        #[command(flatten)]
        opts: AnalyzeOpts,
    },
    /// Iterate the follow-the-arrow map and print the itinerary and trace.
    Orbit {
        input: String,
        /// Arrow id at the deepest level to start from.
        #[arg(long)]
        top: usize,
        /// Unit position inside the starting arrow.
        #[arg(long, default_value_t = 0)]
        offset: u64,
        /// Number of steps.
        #[arg(short = 'k', long)]
        steps: usize,
        /// Also print one line per thread visited.
        #[arg(long)]
        trace: bool,
    },
    /// Emit graph-description text for one level or all levels.
    ExportDot {
        input: String,
        /// Level to export; all levels when omitted.
        #[arg(long)]
        level: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TranslateMode {
    CoverToBv,
    BvToCover,
    SadicToCover,
    CoverToSadic,
    Rauzy,
    KrToCover,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum OutputFormat {
    Tower,
    Diagram,
    Sadic,
    Language,
    Dot,
    Report,
}

/// Renders a document in the requested format; `dot` applies to towers.
fn render(doc: &Document, format: Option<OutputFormat>) -> Result<String, String> {
    let Some(format) = format else {
        return Ok(format::print_document(doc));
    };
    let natural = match doc.kind() {
        "tower" => OutputFormat::Tower,
        "diagram" => OutputFormat::Diagram,
        "sadic" => OutputFormat::Sadic,
        "language" => OutputFormat::Language,
        _ => OutputFormat::Report,
    };
    if format == natural {
        return Ok(format::print_document(doc));
    }
    match (doc, format) {
        (Document::Tower(t), OutputFormat::Dot) => Ok(dot::tower_to_dot(t, None)),
        _ => Err(format!(
            "cannot render a {} document as {:?} output",
            doc.kind(),
            format
        )),
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AnalyzeKind {
    Chain,
    Minimal,
    Transitive,
    Ue,
    Rigidity,
    Linrec,
    Specials,
}

#[derive(Args)]
struct AnalyzeOpts {
    /// Base level for minimal/transitive/ue.
    #[arg(long, default_value_t = 0)]
    level: usize,
    /// Loop length bound for the transitivity check.
    #[arg(long, default_value_t = 4)]
    bound: usize,
    /// Simple-cycle enumeration budget (default from COVERFORGE_BUDGET).
    #[arg(long)]
    budget_cycles: Option<usize>,
    /// Read loop containment as contiguous subpaths instead of arrow sets.
    #[arg(long)]
    subpath: bool,
    /// Orbit sample length for the recurrence constants.
    #[arg(long, default_value_t = 10_000)]
    orbit_length: usize,
    /// Deepest level sampled for recurrence gaps.
    #[arg(long, default_value_t = 8)]
    depth_cap: usize,
}

#[derive(Subcommand)]
enum GenerateKind {
    /// Two-loop weighted cover of a continued fraction.
    Ostrowski {
        /// Comma-separated partial quotients, e.g. 3,3,3.
        #[arg(long)]
        cf: String,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Single-loop tower wrapping q_n times per level.
    Odometer {
        /// Comma-separated wrap counts, e.g. 2,2,2.
        #[arg(long)]
        q: String,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Factor language of the standard word of a continued fraction.
    Sturmian {
        #[arg(long)]
        cf: String,
        #[arg(long)]
        nmax: usize,
    },
    /// Full-shift language.
    Fullshift {
        #[arg(long, default_value_t = 2)]
        alphabet: usize,
        #[arg(long)]
        nmax: usize,
    },
    /// Stationary substitution system, e.g. --rules "0->01;1->0".
    Substitution {
        #[arg(long)]
        rules: String,
        #[arg(long)]
        depth: usize,
    },
    /// Rauzy induction of an interval exchange with exact rational lengths.
    Iet {
        /// Comma-separated lengths, e.g. 13/21,8/21.
        #[arg(long)]
        lengths: String,
        /// Permutation as images of 1..d, e.g. 2,1.
        #[arg(long)]
        perm: String,
        #[arg(long)]
        steps: usize,
    },
}

fn read_input(path: &str) -> Result<String, String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| format!("cannot read stdin: {e}"))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))
    }
}

fn parse_cf(text: &str) -> Result<ContinuedFraction, String> {
    let quotients = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|e| format!("bad quotient '{t}': {e}"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    ContinuedFraction::new(quotients).map_err(|e| e.to_string())
}

fn default_budget() -> usize {
    std::env::var("COVERFORGE_BUDGET")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(1_000_000)
}

fn parse_input(path: &str) -> Result<Document, String> {
    let text = read_input(path)?;
    format::parse_document(&text).map_err(|e| e.to_string())
}

fn want_tower(doc: Document) -> Result<CoverTower, String> {
    match doc {
        Document::Tower(t) => Ok(t),
        other => Err(format!("expected a tower document, found {}", other.kind())),
    }
}

fn verdict_exit(status: &VerdictStatus) -> ExitCode {
    match status {
        VerdictStatus::Verified { .. } => ExitCode::from(0),
        VerdictStatus::Refuted => ExitCode::from(1),
        VerdictStatus::NotDecidedUpTo { .. } => ExitCode::from(2),
    }
}

fn run() -> Result<ExitCode, String> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            e.print().ok();
            return Ok(ExitCode::from(if usage { 0 } else { 3 }));
        }
    };
    match cli.command {
        Command::Validate { input } => {
            let doc = parse_input(&input)?;
            match doc {
                Document::Tower(t) => {
                    let report = validate_tower(&t);
                    print!("{report}");
                    Ok(ExitCode::from(if report.is_legal() { 0 } else { 1 }))
                }
                Document::Language(o) => match o.validate() {
                    Ok(()) => {
                        println!("language consistent up to length {}", o.n_max());
                        Ok(ExitCode::from(0))
                    }
                    Err(e) => {
                        println!("inconsistent: {e}");
                        Ok(ExitCode::from(1))
                    }
                },
                Document::Kr(k) => {
                    let report = kr::validate_kr(&k);
                    for v in report
                        .structural
                        .iter()
                        .chain(&report.kr5)
                        .chain(&report.kr6)
                    {
                        println!("{v}");
                    }
                    println!(
                        "structural: {}; KR5: {}; KR6: {}",
                        report.structurally_valid(),
                        report.kr5_holds(),
                        report.kr6_holds()
                    );
                    Ok(ExitCode::from(if report.structurally_valid() {
                        0
                    } else {
                        1
                    }))
                }
                Document::Diagram(d) => {
                    println!(
                        "diagram with {} edge levels parsed and validated",
                        d.edge_levels()
                    );
                    Ok(ExitCode::from(0))
                }
                Document::Sadic(s) => {
                    println!("S-adic system with {} substitutions parsed", s.len());
                    Ok(ExitCode::from(0))
                }
            }
        }
        Command::Generate { format, kind } => {
            let doc = match kind {
                GenerateKind::Ostrowski { cf, depth } => {
                    let cf = parse_cf(&cf)?;
                    let depth = depth.unwrap_or(cf.len());
                    if depth > cf.len() {
                        return Err(format!(
                            "depth {depth} exceeds the {} partial quotients",
                            cf.len()
                        ));
                    }
                    Document::Tower(generate::ostrowski_cover(&cf, depth))
                }
                GenerateKind::Odometer { q, depth } => {
                    let q: Vec<u64> = q
                        .split(',')
                        .map(|t| t.trim().parse().map_err(|e| format!("bad wrap '{t}': {e}")))
                        .collect::<Result<_, _>>()?;
                    if q.iter().any(|&x| x < 2) {
                        return Err("odometer wraps must be >= 2".into());
                    }
                    let depth = depth.unwrap_or(q.len());
                    if depth > q.len() {
                        return Err(format!("depth {depth} exceeds the {} wraps", q.len()));
                    }
                    Document::Tower(generate::odometer_cover(&q, depth))
                }
                GenerateKind::Sturmian { cf, nmax } => {
                    let cf = parse_cf(&cf)?;
                    Document::Language(
                        generate::sturmian_oracle(&cf, nmax).map_err(|e| e.to_string())?,
                    )
                }
                GenerateKind::Fullshift { alphabet, nmax } => {
                    if alphabet == 0 || alphabet > 10 {
                        return Err("alphabet size must be between 1 and 10".into());
                    }
                    Document::Language(generate::full_shift_oracle(alphabet, nmax))
                }
                GenerateKind::Substitution { rules, depth } => {
                    let chi = parse_rules(&rules)?;
                    if depth == 0 {
                        return Err("substitution systems need depth >= 1".into());
                    }
                    Document::Sadic(SAdicSystem::stationary(chi, depth))
                }
                GenerateKind::Iet {
                    lengths,
                    perm,
                    steps,
                } => {
                    let lengths = lengths
                        .split(',')
                        .map(parse_rational)
                        .collect::<Result<Vec<_>, _>>()?;
                    let perm: Vec<usize> = perm
                        .split(',')
                        .map(|t| {
                            t.trim()
                                .parse::<usize>()
                                .map_err(|e| format!("bad permutation entry '{t}': {e}"))
                                .and_then(|v| {
                                    v.checked_sub(1)
                                        .ok_or("permutation entries are 1-based".into())
                                })
                        })
                        .collect::<Result<_, _>>()?;
                    let cfg = IETConfig::new(lengths, perm).map_err(|e| e.to_string())?;
                    let (run, tie) =
                        generate::iet_rauzy_induction(&cfg, steps).map_err(|e| e.to_string())?;
                    let tape: Vec<&str> = run
                        .steps
                        .iter()
                        .map(|s| match s {
                            RauzyStep::Type0 => "0",
                            RauzyStep::Type1 => "1",
                        })
                        .collect();
                    eprintln!("type tape: {}", tape.join(""));
                    if let Some(step) = tie {
                        eprintln!("keane tie at step {step}");
                    }
                    Document::Sadic(run.system)
                }
            };
            print!("{}", render(&doc, format)?);
            Ok(ExitCode::from(0))
        }
        Command::Translate {
            mode,
            input,
            depth,
            follower_depth,
            format,
        } => {
            let doc = parse_input(&input)?;
            let out = match mode {
                TranslateMode::CoverToBv => {
                    let t = want_tower(doc)?;
                    let d = translate::cover_to_bv(&t).map_err(|e| e.to_string())?;
                    Document::Diagram(d)
                }
                TranslateMode::BvToCover => {
                    let Document::Diagram(d) = doc else {
                        return Err(format!("expected a diagram, found {}", doc.kind()));
                    };
                    let fd = follower_depth.unwrap_or(d.edge_levels());
                    let (t, complete) =
                        translate::bv_to_cover(&d, fd).map_err(|e| e.to_string())?;
                    eprintln!("complete: {complete}");
                    Document::Tower(t)
                }
                TranslateMode::SadicToCover => {
                    let Document::Sadic(s) = doc else {
                        return Err(format!("expected an S-adic document, found {}", doc.kind()));
                    };
                    Document::Tower(translate::sadic_to_cover(&s))
                }
                TranslateMode::CoverToSadic => {
                    let t = want_tower(doc)?;
                    match translate::cover_to_sadic(&t) {
                        Ok(s) => Document::Sadic(s),
                        Err(e) => {
                            eprintln!("{e}");
                            return Ok(ExitCode::from(1));
                        }
                    }
                }
                TranslateMode::Rauzy => {
                    let Document::Language(o) = doc else {
                        return Err(format!("expected a language, found {}", doc.kind()));
                    };
                    let depth = depth.unwrap_or_else(|| o.n_max().saturating_sub(1));
                    let t = translate::rauzy_tower(&o, depth).map_err(|e| e.to_string())?;
                    Document::Tower(t)
                }
                TranslateMode::KrToCover => {
                    let Document::Kr(k) = doc else {
                        return Err(format!("expected KR data, found {}", doc.kind()));
                    };
                    match kr::kr_to_cover(&k) {
                        Ok(t) => Document::Tower(t),
                        Err(e) => {
                            eprintln!("{e}");
                            return Ok(ExitCode::from(1));
                        }
                    }
                }
            };
            print!("{}", render(&out, format)?);
            Ok(ExitCode::from(0))
        }
        Command::Analyze { which, input, opts } => {
            let budget = opts.budget_cycles.unwrap_or_else(default_budget);
            let t = want_tower(parse_input(&input)?)?;
            match which {
                AnalyzeKind::Chain => {
                    let v = analysis::check_chain_transitive(&t);
                    println!("chain-transitive: {v}");
                    Ok(verdict_exit(&v.status))
                }
                AnalyzeKind::Minimal => {
                    let v = analysis::check_minimal(&t, opts.level, budget)
                        .map_err(|e| e.to_string())?;
                    println!("minimal (level {}): {v}", opts.level);
                    Ok(verdict_exit(&v.status))
                }
                AnalyzeKind::Transitive => {
                    let mode = if opts.subpath {
                        ContainmentMode::Subpath
                    } else {
                        ContainmentMode::ArrowSet
                    };
                    let v = analysis::check_transitive(&t, opts.level, opts.bound, budget, mode)
                        .map_err(|e| e.to_string())?;
                    println!(
                        "transitive (level {}, bound {}): {v}",
                        opts.level, opts.bound
                    );
                    Ok(verdict_exit(&v.status))
                }
                AnalyzeKind::Ue => {
                    let ds = analysis::unique_ergodicity_diameters(&t, opts.level)
                        .map_err(|e| e.to_string())?;
                    for (i, d) in ds.iter().enumerate() {
                        println!(
                            "level {}: cone diameter (log) = {}",
                            opts.level + 1 + i,
                            d.log_value()
                        );
                    }
                    Ok(ExitCode::from(0))
                }
                AnalyzeKind::Rigidity => {
                    let r =
                        analysis::uniform_rigidity_check(&t, budget).map_err(|e| e.to_string())?;
                    println!("uniformly rigid: {}", r.verdict);
                    if let Some(q) = &r.q_sequence {
                        let qs: Vec<String> = q.iter().map(|x| x.to_string()).collect();
                        println!("odometer wraps: {}", qs.join(","));
                    }
                    Ok(verdict_exit(&r.verdict.status))
                }
                AnalyzeKind::Linrec => {
                    let c = analysis::linear_recurrence_constants(
                        &t,
                        opts.orbit_length,
                        opts.depth_cap,
                    )
                    .map_err(|e| e.to_string())?;
                    println!(
                        "K1 = {}, K2 = {}, D = {} (sampled), L = {} (empirical), fully covering: {}",
                        c.k1, c.k2, c.d, c.l, c.fully_covering
                    );
                    Ok(ExitCode::from(0))
                }
                AnalyzeKind::Specials => {
                    for (n, g) in t.levels().iter().enumerate() {
                        let s = analysis::special_vertex_counts(g);
                        println!(
                            "level {n}: left={} right={} bispecial={} measure-value-bound={}",
                            s.left,
                            s.right,
                            s.bispecial,
                            analysis::measure_value_bound(g)
                        );
                    }
                    match analysis::ergodic_count_bound(&t) {
                        Ok(b) => println!("ergodic measure bound: {b}"),
                        Err(e) => println!("ergodic measure bound: n/a ({e})"),
                    }
                    Ok(ExitCode::from(0))
                }
            }
        }
        Command::Orbit {
            input,
            top,
            offset,
            steps,
            trace,
        } => {
            let t = want_tower(parse_input(&input)?)?;
            let g = t.level(t.depth());
            if top >= g.arrow_count() {
                return Err(format!(
                    "top arrow {top} out of range ({} arrows at the deepest level)",
                    g.arrow_count()
                ));
            }
            if offset >= g.weight(ArrowId(top)) {
                return Err(format!(
                    "offset {offset} out of range (weight {})",
                    g.weight(ArrowId(top))
                ));
            }
            let start = Thread::from_top(&t, ArrowId(top), offset);
            // A step the truncation cannot resolve is the undecided outcome.
            let word = match itinerary(&t, &start, steps + 1) {
                Ok(word) => word,
                Err(e) => {
                    eprintln!("{e}");
                    return Ok(ExitCode::from(2));
                }
            };
            println!("itinerary {word}");
            if trace {
                let threads = orbit(&t, &start, steps).map_err(|e| e.to_string())?;
                for (j, th) in threads.iter().enumerate() {
                    let spots: Vec<String> = (0..=t.depth())
                        .map(|n| format!("{}:{}", th.arrow(n).0, th.position(n)))
                        .collect();
                    println!("step {j}: {}", spots.join(" "));
                }
            }
            Ok(ExitCode::from(0))
        }
        Command::ExportDot { input, level } => {
            let t = want_tower(parse_input(&input)?)?;
            if let Some(n) = level {
                if n > t.depth() {
                    return Err(format!("level {n} out of range (depth {})", t.depth()));
                }
            }
            print!("{}", dot::tower_to_dot(&t, level));
            Ok(ExitCode::from(0))
        }
    }
}

fn parse_rules(text: &str) -> Result<coverforge::sadic::Substitution, String> {
    let mut letters: Vec<String> = Vec::new();
    let mut rules: Vec<(String, Vec<String>)> = Vec::new();
    for part in text.split(';') {
        let Some((lhs, rhs)) = part.split_once("->") else {
            return Err(format!("rule '{part}' is not of the form letter->word"));
        };
        let letter = lhs.trim().to_string();
        if letter.is_empty() {
            return Err("empty letter on the left of a rule".into());
        }
        let word: Vec<String> = rhs.trim().chars().map(|c| c.to_string()).collect();
        if word.is_empty() {
            return Err(format!("rule for '{letter}' has an empty image"));
        }
        if !letters.contains(&letter) {
            letters.push(letter.clone());
        }
        rules.push((letter, word));
    }
    let refs: Vec<&str> = letters.iter().map(|s| s.as_str()).collect();
    let rule_refs: Vec<(&str, Vec<&str>)> = rules
        .iter()
        .map(|(l, w)| (l.as_str(), w.iter().map(|x| x.as_str()).collect()))
        .collect();
    let slices: Vec<(&str, &[&str])> = rule_refs.iter().map(|(l, w)| (*l, w.as_slice())).collect();
    coverforge::sadic::Substitution::on_alphabet(&refs, &slices).map_err(|e| e.to_string())
}

fn parse_rational(text: &str) -> Result<num_rational::BigRational, String> {
    let t = text.trim();
    if let Some((num, den)) = t.split_once('/') {
        let n: i64 = num
            .trim()
            .parse()
            .map_err(|e| format!("bad numerator '{num}': {e}"))?;
        let d: i64 = den
            .trim()
            .parse()
            .map_err(|e| format!("bad denominator '{den}': {e}"))?;
        if d == 0 {
            return Err("zero denominator".into());
        }
        Ok(generate::ratio(n, d))
    } else {
        let n: i64 = t.parse().map_err(|e| format!("bad integer '{t}': {e}"))?;
        Ok(generate::ratio(n, 1))
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(msg) => {
            if !msg.is_empty() {
                eprintln!("error: {msg}");
            }
            ExitCode::from(3)
        }
    }
}
