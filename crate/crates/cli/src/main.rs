//! `nodehilb`: classification, enumeration, verification suites and
//! equation/diagram emission for Hilbert schemes of the node `xy = 0`.
//!
//! Exit codes: 0 pass, 1 assertion failure, 2 usage error, 3 resource cap.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use nodehilb::charts::{ChartMode, QChart};
use nodehilb::combin::{
    fhilb_graph, flag_chain_graph, global_counts, hilb_component_graph, punctual_chain, triangle_ascii,
    triple_chain_graph, ChainGraph, JReading,
};
use nodehilb::flags::{punctual_display, punctual_flag_equations, FlagSystem};
use nodehilb::ideals::{canonical_generators, classify, field_ring};
use nodehilb::oracle::{enumerate_ideals, incidence_graph, OracleConfig};
use nodehilb::parse::ideal_from_str;
use nodehilb::suites::{run_suite, Report, RunConfig, Suite};
use nodehilb::universal::equation_set;
use nodehilb::{Error, Field};

#[derive(Parser, Debug)]
#[command(name = "nodehilb", version, about = "Exact computations on Hilbert schemes of the node xy = 0")]
struct Cli {
    /// Base field: Q or a prime p.
    #[arg(long, global = true, default_value = "Q")]
    field: String,
    /// Colength (largest colength for suites).
    #[arg(long, global = true, default_value_t = 4)]
    m: usize,
    /// Truncation order N of the node ring.
    #[arg(long, global = true)]
    trunc: Option<usize>,
    /// Order n of the test algebra k[e]/(e^n), 2..=4.
    #[arg(long, global = true, default_value_t = 2)]
    artin_order: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Random cases per colength.
    #[arg(long, global = true, default_value_t = 100)]
    samples: usize,
    /// Directory for cached oracle censuses.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Recompute cached results.
    #[arg(long, global = true)]
    no_cache: bool,
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    output: Output,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Dot,
    Ascii,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify the ideal generated by a comma-separated list such as
    /// "y + 3x^2" or a JSON array of such strings.
    Classify { generators: String },
    /// All ideals of colength m over F_p (DOT: containments into colength m-1).
    Enumerate {
        /// Minimal generator bound.
        #[arg(long, default_value_t = 2)]
        generators: usize,
    },
    /// Run a verification suite, or `all`.
    Verify {
        #[arg(value_parser = suite_names())]
        suite: String,
    },
    /// Component diagrams.
    Components {
        #[arg(value_enum)]
        kind: ComponentKind,
        /// Number of curve components (global).
        #[arg(long, default_value_t = 1)]
        c: usize,
        /// Node multiplicities of a point, comma-separated (global).
        #[arg(long, value_delimiter = ',')]
        multiplicities: Vec<usize>,
        /// Index depth reading for full flags.
        #[arg(long, value_enum, default_value_t = Reading::Column)]
        reading: Reading,
    },
    /// Chart, flag and universal-family equations as canonical strings.
    Equations {
        #[arg(value_enum)]
        kind: EquationKind,
        /// Chart index i.
        #[arg(long, default_value_t = 1)]
        i: usize,
        /// Flag centers as "m,i;m',i';...".
        #[arg(long)]
        centers: Option<String>,
        #[arg(long, value_enum, default_value_t = Mode::Abs)]
        mode: Mode,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ComponentKind {
    Punctual,
    Hilb,
    Flag,
    Triple,
    Fhilb,
    Global,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EquationKind {
    Chart,
    Flag,
    Punctual,
    Universal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Abs,
    Rel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Reading {
    Column,
    Literal,
    Range,
}

fn suite_names() -> clap::builder::PossibleValuesParser {
    let mut v: Vec<&'static str> = Suite::ALL.iter().map(|s| s.name()).collect();
    v.push("all");
    clap::builder::PossibleValuesParser::new(v)
}

/// What a command produced: text to print and the exit status.
struct Outcome {
    text: String,
    code: u8,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, code: 0 }
    }
}

fn parse_field(s: &str) -> Result<Field, Error> {
    match s {
        "Q" | "q" => Ok(Field::Rational),
        p => {
            let p: u64 = p.parse().map_err(|_| Error::Parse(format!("field must be Q or a prime, got {p:?}")))?;
            Field::prime(p)
        }
    }
}

fn config(cli: &Cli) -> Result<RunConfig, Error> {
    let cfg = RunConfig {
        field: parse_field(&cli.field)?,
        m: cli.m,
        trunc: cli.trunc,
        artin_order: cli.artin_order,
        seed: cli.seed,
        samples: cli.samples,
        cache_dir: cli.cache_dir.clone(),
        no_cache: cli.no_cache,
        oracle: OracleConfig::default(),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json")
}

/// Wrap a result with the configuration and artifact version.
fn envelope(cfg: &RunConfig, command: &str, result: Value) -> String {
    pretty(&json!({
        "schema": nodehilb::suites::REPORT_SCHEMA,
        "version": nodehilb::VERSION,
        "command": command,
        "config": cfg.to_json(),
        "result": result,
    }))
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::ResourceCap(_) => 3,
        Error::Parse(_) | Error::Precondition(_) | Error::UnitIdeal | Error::InvalidIndex(_) => 2,
        _ => 1,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::ResourceCap(_) => "resource-cap",
        Error::Parse(_) => "parse",
        Error::UnitIdeal => "unit-ideal",
        Error::Precondition(_) | Error::InvalidIndex(_) => "usage",
        Error::TruncationTooSmall(_) => "colength-overflow",
        _ => "internal",
    }
}

fn generator_text(raw: &str) -> Result<String, Error> {
    let t = raw.trim();
    if t.starts_with('[') {
        let list: Vec<String> = serde_json::from_str(t).map_err(|e| Error::Parse(format!("generator JSON: {e}")))?;
        Ok(list.join(","))
    } else {
        Ok(t.to_string())
    }
}

fn cmd_classify(cli: &Cli, cfg: &RunConfig, raw: &str) -> Result<Outcome, Error> {
    let text = generator_text(raw)?;
    let ideal = ideal_from_str(&text, cfg.field, cli.trunc, 256)?;
    let ty = classify(&ideal)?;
    let n = ideal.trunc_order().max(ty.m() + 1);
    let canon: Vec<String> =
        canonical_generators(&ty, &field_ring(cfg.field, n)).iter().map(|g| g.residue().to_string()).collect();
    let result = json!({
        "input": text,
        "type": ty.to_string(),
        "stratum": ty.stratum_label(),
        "colength": ty.m(),
        "canonical_generators": canon,
        "witness": ideal.to_json(),
    });
    Ok(Outcome::ok(match cli.output {
        Output::Json => envelope(cfg, "classify", result),
        _ => format!("{ty}\n"),
    }))
}

fn cmd_enumerate(cli: &Cli, cfg: &RunConfig, g: usize) -> Result<Outcome, Error> {
    let Field::Prime(q) = cfg.field else {
        return Err(Error::Precondition("enumeration needs --field p for a prime p".into()));
    };
    let text = match cli.output {
        Output::Dot => {
            let levels: Vec<usize> = if cfg.m >= 2 { vec![cfg.m, cfg.m - 1] } else { vec![cfg.m] };
            incidence_graph(q, &levels, &cfg.oracle)?.to_dot()
        }
        out => {
            let ideals = enumerate_ideals(q, cfg.m, g, &cfg.oracle)?;
            let types = ideals.iter().map(|i| classify(i).map(|t| t.to_string())).collect::<Result<Vec<_>, _>>()?;
            if out == Output::Ascii {
                types.iter().map(|t| format!("{t}\n")).collect()
            } else {
                envelope(cfg, "enumerate", json!({ "count": types.len(), "types": types }))
            }
        }
    };
    Ok(Outcome::ok(text))
}

fn cmd_verify(cli: &Cli, cfg: &RunConfig, suite: &str) -> Result<Outcome, Error> {
    let suites: Vec<Suite> = if suite == "all" { Suite::ALL.to_vec() } else { vec![suite.parse()?] };
    let report = Report::new(cfg, suites.iter().map(|&s| run_suite(s, cfg)).collect());
    let text = match cli.output {
        Output::Json => report.to_json_string() + "\n",
        _ => {
            let mut s = String::new();
            for sr in &report.suites {
                s.push_str(&format!("{} {}\n", sr.suite, sr.status));
                for a in &sr.assertions {
                    s.push_str(&format!("  {}\n", a.line()));
                }
            }
            s
        }
    };
    Ok(Outcome { text, code: report.status.exit_code() as u8 })
}

fn emit_graph(cli: &Cli, cfg: &RunConfig, g: &ChainGraph, extra: Option<String>) -> String {
    match cli.output {
        Output::Json => envelope(cfg, "components", g.to_json()),
        Output::Dot => g.to_dot(),
        Output::Ascii => {
            let mut s = g.to_ascii();
            if let Some(e) = extra {
                s.push_str(&e);
            }
            s
        }
    }
}

fn cmd_components(
    cli: &Cli,
    cfg: &RunConfig,
    kind: ComponentKind,
    c: usize,
    mults: &[usize],
    reading: Reading,
) -> Result<Outcome, Error> {
    let m = cfg.m;
    let g = match kind {
        ComponentKind::Punctual => punctual_chain(m)?,
        ComponentKind::Hilb => hilb_component_graph(m)?,
        ComponentKind::Flag => flag_chain_graph(m)?,
        ComponentKind::Triple => triple_chain_graph(m)?,
        ComponentKind::Fhilb => {
            let r = match reading {
                Reading::Column => JReading::Column,
                Reading::Literal => JReading::Literal,
                Reading::Range => JReading::Range,
            };
            let g = fhilb_graph(m, r)?;
            return Ok(Outcome::ok(emit_graph(cli, cfg, &g, Some(triangle_ascii(m)))));
        }
        ComponentKind::Global => {
            let counts = global_counts(m, mults.len(), c, mults)?;
            let text = match cli.output {
                Output::Json => envelope(cfg, "components", counts.to_json()),
                _ => format!("{} components\n", counts.components),
            };
            return Ok(Outcome::ok(text));
        }
    };
    Ok(Outcome::ok(emit_graph(cli, cfg, &g, None)))
}

fn parse_centers(s: &str) -> Result<Vec<(usize, usize)>, Error> {
    s.split(';')
        .map(|p| {
            let (a, b) = p.split_once(',').ok_or_else(|| Error::Parse(format!("center {p:?} is not m,i")))?;
            let num = |x: &str| x.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad index {x:?}")));
            Ok((num(a)?, num(b)?))
        })
        .collect()
}

fn cmd_equations(
    cli: &Cli,
    cfg: &RunConfig,
    kind: EquationKind,
    i: usize,
    centers: Option<&str>,
    mode: Mode,
) -> Result<Outcome, Error> {
    let mode = match mode {
        Mode::Abs => ChartMode::Absolute,
        Mode::Rel => ChartMode::Relative,
    };
    let m = cfg.m;
    let (lines, result): (Vec<String>, Value) = match kind {
        EquationKind::Chart => {
            let chart = QChart::new(m, i, mode)?;
            let eqs: Vec<String> = chart.equations().iter().map(ToString::to_string).collect();
            let rel: Vec<String> = chart.relation_lines().iter().map(|l| l.equation.to_string()).collect();
            let mut d = chart.descriptor();
            d["equations"] = json!(eqs);
            d["relations"] = json!(rel);
            (eqs, d)
        }
        EquationKind::Flag => {
            let centers = match centers {
                Some(s) => parse_centers(s)?,
                None => vec![(m, i), (m - 1, i)],
            };
            let sys = FlagSystem::from_indices(&centers, mode)?;
            let model = sys.singularity_model();
            let eqs: Vec<String> = sys.equations().iter().map(ToString::to_string).collect();
            let mut d = sys.descriptor();
            d["singularity"] = model.to_json();
            (eqs, d)
        }
        EquationKind::Punctual => {
            let s = punctual_display(&punctual_flag_equations(m, i)?);
            (vec![s.clone()], json!({ "center": format!("(Q[{m},{i}], Q[{},{i}])", m - 1), "display": s }))
        }
        EquationKind::Universal => {
            let e = equation_set(m)?;
            let mut lines = e.chain.clone();
            lines.extend(e.family.iter().cloned());
            lines.extend(e.image.iter().cloned());
            (lines, e.to_json())
        }
    };
    Ok(Outcome::ok(match cli.output {
        Output::Json => envelope(cfg, "equations", result),
        _ => lines.iter().map(|l| format!("{l}\n")).collect(),
    }))
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let cfg = config(cli)?;
    match &cli.command {
        Command::Classify { generators } => cmd_classify(cli, &cfg, generators),
        Command::Enumerate { generators } => cmd_enumerate(cli, &cfg, *generators),
        Command::Verify { suite } => cmd_verify(cli, &cfg, suite),
        Command::Components { kind, c, multiplicities, reading } => {
            cmd_components(cli, &cfg, *kind, *c, multiplicities, *reading)
        }
        Command::Equations { kind, i, centers, mode } => {
            cmd_equations(cli, &cfg, *kind, *i, centers.as_deref(), *mode)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = std::io::stdout().lock();
    match run(&cli) {
        Ok(o) => {
            let _ = out.write_all(o.text.as_bytes());
            if !o.text.ends_with('\n') {
                let _ = out.write_all(b"\n");
            }
            ExitCode::from(o.code)
        }
        Err(e) => {
            let body = json!({
                "error": error_kind(&e),
                "message": e.to_string(),
                "version": nodehilb::VERSION,
            });
            let _ = writeln!(out, "{}", pretty(&body));
            ExitCode::from(error_code(&e))
        }
    }
}
