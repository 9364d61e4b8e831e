//! `arbor`: JSON on stdout, diagnostics on stderr.
//!
//! Exit codes: 0 success, 1 finding (violation, refutation, inseparable
//! iterate), 2 bad input, 3 search or work budget exhausted.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::{json, Value};

use arbor_core::arboreal::{self, ArborError, Verdict};
use arbor_core::construct::{self, ConstructError, ConstructionTrace, RunParams};
use arbor_core::exactpoly::RatPoly;
use arbor_core::sqclass::{vast_witness_indexed, ClassError, ClassSubspace, SquareClass, StreamSpec};
use arbor_core::{bigjson, treegroup, Error};

#[derive(Parser)]
#[command(name = "arbor", version, about = "Arboreal Galois data and replayable field-construction traces")]
struct Cli {
    /// JSON output (the only format).
    #[arg(long, global = true)]
    json: bool,
    /// Include the tool name and version in the payload.
    #[arg(long, global = true)]
    meta: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Square classes of disc(f), disc(f∘f), … and their span over a base.
    DiscSeq {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        levels: usize,
        /// Comma-separated integers whose square roots generate the base.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        base: String,
    },
    /// Evidence for or against "the level-k image has index at most n".
    IndexReport {
        #[arg(long)]
        poly: String,
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        base: String,
        #[arg(long)]
        level: usize,
        #[arg(long, default_value_t = 1)]
        n: u64,
        #[arg(long, default_value_t = 20)]
        primes: usize,
    },
    /// Runs the construction and writes its trace.
    Simulate {
        #[arg(long, default_value_t = RunParams::default().steps)]
        steps: usize,
        #[arg(long, default_value_t = RunParams::default().depth)]
        depth: usize,
        #[arg(long, default_value_t = RunParams::default().height)]
        height: u64,
        /// Trace destination; without it the trace itself goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replays a trace and lists the conditions it breaks.
    Verify {
        #[arg(long)]
        trace: PathBuf,
    },
    /// Killed signs of assigned (or given) polynomials against the final field.
    Audit {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        level: usize,
        /// Polynomial to audit; repeatable. Defaults to every assigned one.
        #[arg(long = "poly")]
        polys: Vec<String>,
    },
    /// First class of a stream outside the span of the given classes.
    VastWitness {
        /// `primes`, `disc:<poly>:n>=<k>` or `list:<k1>,<k2>,…`.
        #[arg(long)]
        stream: String,
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        span: String,
        #[arg(long, default_value_t = 5)]
        depth: usize,
    },
    /// Order of Aut T_k(d), or its supernatural order without --k.
    GroupOrder {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: Option<usize>,
    },
}

enum Outcome {
    Done(Value),
    Finding(Value),
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

fn inseparable_level(e: &Error) -> Option<usize> {
    match e {
        Error::Arbor(ArborError::Inseparable(n))
        | Error::Class(ClassError::Inseparable(n))
        | Error::Construct(ConstructError::Arbor(ArborError::Inseparable(n)))
        | Error::Construct(ConstructError::Class(ClassError::Inseparable(n))) => Some(*n),
        _ => None,
    }
}

/// Maps a core error to an outcome: inseparable iterates are findings.
fn settle(e: impl Into<Error>) -> Result<Outcome, Failure> {
    let e = e.into();
    if let Some(n) = inseparable_level(&e) {
        return Ok(Outcome::Finding(json!({ "inseparable": n })));
    }
    Err(failure(e))
}

fn failure(e: impl Into<Error>) -> Failure {
    let e = e.into();
    Failure { code: if e.is_exhaustion() { 3 } else { 2 }, message: e.to_string() }
}

fn parse_poly(s: &str) -> Result<RatPoly, Failure> {
    s.parse::<RatPoly>().map_err(|e| Failure::input(format!("cannot parse polynomial {s:?}: {e}")))
}

fn parse_span(s: &str) -> Result<ClassSubspace, Failure> {
    let mut classes = Vec::new();
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let k: BigInt = tok.parse().map_err(|_| Failure::input(format!("{tok:?} is not an integer")))?;
        classes.push(SquareClass::of_integer(&k).map_err(failure)?);
    }
    Ok(ClassSubspace::span(&classes))
}

fn read_trace(path: &Path) -> Result<ConstructionTrace, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    ConstructionTrace::from_json_str(&text).map_err(failure)
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("payload serializes")
}

fn disc_seq(poly: &str, levels: usize, base: &str) -> Result<Outcome, Failure> {
    let f = parse_poly(poly)?;
    if levels == 0 {
        return Err(Failure::input("--levels must be at least 1"));
    }
    let base = parse_span(base)?;
    let seq = match arboreal::disc_class_sequence(&f, levels) {
        Ok(seq) => seq,
        Err(e) => return settle(e),
    };
    let subspace = base.compositum(&ClassSubspace::span(seq.classes()));
    Ok(Outcome::Done(json!({
        "poly": to_value(&f),
        "classes": to_value(&seq.classes()),
        "subspace": to_value(&subspace),
    })))
}

fn index_report(poly: &str, base: &str, level: usize, n: u64, primes: usize) -> Result<Outcome, Failure> {
    let f = parse_poly(poly)?;
    if level == 0 {
        return Err(Failure::input("--level must be at least 1"));
    }
    let base = parse_span(base)?;
    let cert = arboreal::index_report(&f, &base, level, n, primes).map_err(failure)?;
    let value = cert.to_json();
    Ok(match cert.verdict {
        Verdict::RefutesIndexAtMost(_) => Outcome::Finding(value),
        _ => Outcome::Done(value),
    })
}

fn write_trace(path: &Path, trace: &ConstructionTrace) -> Result<(), Failure> {
    fs::write(path, trace.to_json_string() + "\n").map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn simulate(params: RunParams, out: Option<&Path>) -> Result<Outcome, Failure> {
    match construct::run(&params) {
        Ok(trace) => {
            let Some(path) = out else {
                return Ok(Outcome::Done(to_value(&trace)));
            };
            write_trace(path, &trace)?;
            Ok(Outcome::Done(json!({
                "status": to_value(&trace.status),
                "steps": trace.steps.len(),
                "dim": trace.dim(),
                "dims": to_value(&trace.final_record.dims),
                "supernatural_degree": to_value(&trace.final_record.supernatural_degree),
                "retries": trace.retries.len(),
                "out": path.display().to_string(),
            })))
        }
        Err(fail) => {
            let mut f = failure(fail.error);
            if let (Some(trace), Some(path)) = (&fail.trace, out) {
                write_trace(path, trace)?;
                f.message = format!(
                    "{}; partial trace with {} steps written to {}",
                    f.message,
                    trace.steps.len(),
                    path.display()
                );
            }
            Err(f)
        }
    }
}

fn verify(path: &Path) -> Result<Outcome, Failure> {
    let trace = read_trace(path)?;
    let violations = construct::verify_trace(&trace).map_err(failure)?;
    let value = to_value(&violations);
    Ok(if violations.is_empty() { Outcome::Done(value) } else { Outcome::Finding(value) })
}

fn audit(path: &Path, level: usize, polys: &[String]) -> Result<Outcome, Failure> {
    let trace = read_trace(path)?;
    if level == 0 {
        return Err(Failure::input("--level must be at least 1"));
    }
    let polys = polys.iter().map(|s| parse_poly(s)).collect::<Result<Vec<_>, _>>()?;
    match construct::counterexample_audit(&trace, &polys, level) {
        Ok(report) => Ok(Outcome::Done(to_value(&report))),
        Err(e) => settle(e),
    }
}

fn vast_witness(stream: &str, span: &str, depth: usize) -> Result<Outcome, Failure> {
    let spec: StreamSpec = stream.parse().map_err(failure)?;
    let span = parse_span(span)?;
    if depth == 0 {
        return Err(Failure::input("--depth must be at least 1"));
    }
    let mut s = match spec.open() {
        Ok(s) => s,
        Err(e) => return settle(e),
    };
    match vast_witness_indexed(&mut s, &span, depth) {
        Ok((i, c)) => Ok(Outcome::Done(json!({
            "stream": spec.to_string(),
            "position": i + 1,
            "witness": to_value(&c),
        }))),
        Err(e) => settle(e),
    }
}

fn group_order(d: usize, k: Option<usize>) -> Result<Outcome, Failure> {
    let order = treegroup::aut_order_supernatural(d).map_err(failure)?;
    Ok(Outcome::Done(match k {
        Some(k) => json!({
            "d": d,
            "k": k,
            "order": Value::Number(bigjson::number(&treegroup::group_order(d, k).into())),
        }),
        None => json!({ "d": d, "order": to_value(&order) }),
    }))
}

fn dispatch(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::DiscSeq { poly, levels, base } => disc_seq(&poly, levels, &base),
        Command::IndexReport { poly, base, level, n, primes } => index_report(&poly, &base, level, n, primes),
        Command::Simulate { steps, depth, height, out } => simulate(RunParams { steps, depth, height }, out.as_deref()),
        Command::Verify { trace } => verify(&trace),
        Command::Audit { trace, level, polys } => audit(&trace, level, &polys),
        Command::VastWitness { stream, span, depth } => vast_witness(&stream, &span, depth),
        Command::GroupOrder { d, k } => group_order(d, k),
    }
}

fn with_meta(payload: Value) -> Value {
    let meta = json!({ "tool": "arbor", "version": env!("CARGO_PKG_VERSION") });
    match payload {
        Value::Object(mut map) => {
            map.insert("meta".into(), meta);
            Value::Object(map)
        }
        other => json!({ "meta": meta, "result": other }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let _ = cli.json;
    let (code, payload) = match dispatch(cli.command) {
        Ok(Outcome::Done(v)) => (0, v),
        Ok(Outcome::Finding(v)) => (1, v),
        Err(f) => {
            eprintln!("arbor: {}", f.message);
            return ExitCode::from(f.code);
        }
    };
    let payload = if cli.meta { with_meta(payload) } else { payload };
    println!("{}", serde_json::to_string(&payload).expect("payload serializes"));
    ExitCode::from(code)
}
