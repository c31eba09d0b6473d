//! Batch front end behind the `qfibcong` binary.
//!
//! Exit codes: 0 ok, 1 congruence mismatch or failed check, 2 usage or
//! domain error, 3 theorem inapplicable, 4 I/O failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, CommandFactory, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;

use crate::congruence::{scan_range, verify_theorem, Paths, Verification};
use crate::density::{check_base, delta_truncated, v_count_par};
use crate::error::Error;
use crate::modarith::{is_prime, reduce_rational, Rational, Residue};
use crate::parallel::default_workers;
use crate::qanalogue::IntPoly;
use crate::qfib::{qfib_mod_recurrence, qfib_poly};
use crate::report::{
    check_report, records_csv, write_atomic, DensityBody, Report, RunInfo, ScanBody, StatsBody,
};
use crate::stats::{occurrence_histogram_with, OccurrenceOptions, DEFAULT_WITNESS_CAP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INAPPLICABLE: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "qfibcong", version, about = "q-Fibonacci congruences modulo primes")]
struct Cli {
    /// Flat `key = value` file supplying defaults for subcommand flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Re-read a report and revalidate everything it records.
    #[arg(long, value_name = "FILE")]
    check: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print F_n(q) as a polynomial, an exact rational, or a residue.
    Qfib(QfibArgs),
    /// Check the congruence at a single prime.
    Verify(VerifyArgs),
    /// Check the congruence at every prime in a range.
    Scan(ScanArgs),
    /// Truncated density with a certified tail, and empirical counts.
    Density(DensityArgs),
    /// Occurrence histogram of predicted Fibonacci indices.
    Stats(StatsArgs),
}

#[derive(Args, Debug)]
struct QfibArgs {
    n: u64,
    #[arg(long, conflicts_with = "q")]
    poly: bool,
    #[arg(long, required_unless_present = "poly")]
    q: Option<Rational>,
    #[arg(long)]
    p: Option<u64>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, allow_hyphen_values = true)]
    alpha: Rational,
    #[arg(long)]
    p: u64,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long, allow_hyphen_values = true)]
    alpha: Rational,
    #[arg(long, default_value_t = 3)]
    pmin: u64,
    #[arg(long)]
    pmax: u64,
    /// Comma-separated subset of recurrence, andrews, proposition; or all.
    #[arg(long, default_value = "recurrence")]
    paths: Paths,
    #[arg(long, env = "QFIB_WORKERS")]
    workers: Option<usize>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DensityArgs {
    #[arg(long, allow_hyphen_values = true)]
    g: i64,
    #[arg(long)]
    t: u64,
    #[arg(long, default_value_t = 1)]
    a: u64,
    #[arg(long, default_value_t = 5)]
    d: u64,
    #[arg(long, default_value_t = 200)]
    trunc: u64,
    #[arg(long)]
    empirical_x: Option<u64>,
    /// Keep the list of counted primes in the report.
    #[arg(long)]
    witnesses: bool,
    #[arg(long, env = "QFIB_WORKERS")]
    workers: Option<usize>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct StatsArgs {
    #[arg(long, allow_hyphen_values = true)]
    g: i64,
    #[arg(long)]
    x: u64,
    #[arg(long, default_value = "proposition")]
    paths: Paths,
    #[arg(long, default_value_t = DEFAULT_WITNESS_CAP)]
    witness_cap: usize,
    #[arg(long, env = "QFIB_WORKERS")]
    workers: Option<usize>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

/// Failure modes, each with its exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Mismatch(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Mismatch(_) => EXIT_MISMATCH,
            Failure::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Mismatch(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::TheoremViolation { .. } | Error::InternalInvariantViolation(_) => {
                Failure::Mismatch(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<i32, Failure>;

/// Entry point for the binary. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match parse(&args) {
        Ok(cli) => cli,
        Err(ParseFailure::Clap(e)) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
        Err(ParseFailure::Other(f)) => {
            let _ = writeln!(err, "error: {}", f.message());
            return f.code();
        }
    };
    let result = match (&cli.check, cli.command) {
        (Some(path), None) => cmd_check(path, out),
        (None, Some(cmd)) => dispatch(cmd, out),
        (Some(_), Some(_)) => Err(Failure::Usage("--check takes no subcommand".into())),
        (None, None) => Err(Failure::Usage(
            "a subcommand or --check FILE is required (see --help)".into(),
        )),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

enum ParseFailure {
    Clap(clap::Error),
    Other(Failure),
}

/// `--config FILE` or `--config=FILE` anywhere on the command line.
fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let a = a.to_string_lossy();
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(v) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(v));
        }
    }
    None
}

/// Parses the command line after filling flags it leaves unset from
/// `--config`.
fn parse(args: &[OsString]) -> Result<Cli, ParseFailure> {
    let Some(path) = config_path(args) else {
        return Cli::try_parse_from(args).map_err(ParseFailure::Clap);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| ParseFailure::Other(Failure::Io(format!("{}: {e}", path.display()))))?;
    let config = parse_config(&text).map_err(|m| ParseFailure::Other(Failure::Usage(m)))?;
    let cmd = Cli::command();
    let found = args.iter().enumerate().skip(1).find_map(|(i, a)| {
        cmd.find_subcommand(a.to_string_lossy().as_ref())
            .map(|sub| (i, sub.clone()))
    });
    let Some((pos, sub)) = found else {
        return Cli::try_parse_from(args).map_err(ParseFailure::Clap);
    };
    let given: Vec<String> = args[pos + 1..]
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let mut injected: Vec<OsString> = Vec::new();
    for (key, value) in &config {
        let id = key.replace('-', "_");
        let long = sub
            .get_arguments()
            .find(|a| a.get_id() == id.as_str())
            .and_then(|a| a.get_long().map(|l| (l.to_string(), a.get_action().takes_values())));
        let Some((long, takes_value)) = long else {
            return Err(ParseFailure::Other(Failure::Usage(format!(
                "config key {key:?} is not a flag of {}",
                sub.get_name()
            ))));
        };
        let flag = format!("--{long}");
        let prefix = format!("{flag}=");
        if given.iter().any(|a| *a == flag || a.starts_with(&prefix)) {
            continue;
        }
        if takes_value {
            injected.push(format!("{flag}={value}").into());
        } else if matches!(value.as_str(), "true" | "1" | "yes") {
            injected.push(flag.into());
        }
    }
    let mut full: Vec<OsString> = args[..=pos].to_vec();
    full.extend(injected);
    full.extend_from_slice(&args[pos + 1..]);
    Cli::try_parse_from(full).map_err(ParseFailure::Clap)
}

/// `key = value` lines; blank lines and `#` comments ignored.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key = value", i + 1))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Qfib(a) => cmd_qfib(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Scan(a) => cmd_scan(a, out),
        Command::Density(a) => cmd_density(a, out),
        Command::Stats(a) => cmd_stats(a, out),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::Io(format!("stdout: {e}")))
}

fn save(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    write_atomic(path, bytes).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn check_prime(p: u64) -> Result<(), Failure> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Failure::Usage(format!("p must be prime, got {p}")))
    }
}

fn cmd_qfib(a: QfibArgs, out: &mut dyn Write) -> Outcome {
    if a.n > 1_000_000 && (a.poly || a.p.is_none()) {
        return Err(Failure::Usage("exact evaluation is limited to n <= 10^6".into()));
    }
    let text = match (a.poly, a.q, a.p) {
        (true, _, None) => qfib_poly(a.n).to_string(),
        (true, _, Some(p)) => {
            check_prime(p)?;
            let coeffs = qfib_poly(a.n).reduce_mod(p).into_iter().map(BigInt::from).collect();
            format!("{} (mod {p})", IntPoly::from_coeffs(coeffs))
        }
        (false, Some(q), None) => {
            let q = BigRational::new(q.numerator().into(), q.denominator().into());
            qfib_poly(a.n).eval_ratio(&q).to_string()
        }
        (false, Some(q), Some(p)) => {
            check_prime(p)?;
            let alpha = match reduce_rational(q, p) {
                Ok(r) => r,
                Err(Error::BadValuation { .. }) if q.numerator() % p as i64 == 0 => {
                    Residue::zero(p)
                }
                Err(e) => return Err(e.into()),
            };
            qfib_mod_recurrence(a.n, alpha).value().to_string()
        }
        (false, None, _) => return Err(Failure::Usage("one of --poly or --q is required".into())),
    };
    emit(out, &format!("{text}\n"))?;
    Ok(EXIT_OK)
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> Outcome {
    match verify_theorem(a.alpha, a.p)? {
        Verification::Record(r) => {
            let status = if r.is_clean() { "match" } else { "MISMATCH" };
            let json = serde_json::to_string_pretty(&r).expect("record serializes");
            emit(
                out,
                &format!(
                    "{status}: F_{p}({alpha}) = {} = F_{} (mod {p})\n{json}\n",
                    r.lhs,
                    r.predicted_index,
                    p = a.p,
                    alpha = a.alpha
                ),
            )?;
            Ok(if r.is_clean() { EXIT_OK } else { EXIT_MISMATCH })
        }
        Verification::Inapplicable(rd) => {
            let json = serde_json::to_string_pretty(&rd).expect("residual data serializes");
            emit(out, &format!("inapplicable: {}\n{json}\n", rd.reason))?;
            Ok(EXIT_INAPPLICABLE)
        }
    }
}

fn workers_or_default(w: Option<usize>) -> usize {
    w.filter(|&w| w > 0).unwrap_or_else(default_workers)
}

fn cmd_scan(a: ScanArgs, out: &mut dyn Write) -> Outcome {
    let workers = workers_or_default(a.workers);
    let start = Instant::now();
    let outcome = scan_range(a.alpha, a.pmin, a.pmax, a.paths, workers)?;
    let body = ScanBody::from(outcome);
    let run = RunInfo {
        workers,
        wall_time_ms: start.elapsed().as_millis() as u64,
    };
    let report = Report::new("scan", run, body);
    if let Some(path) = &a.out {
        save(path, report.to_json().as_bytes())?;
    }
    if let Some(path) = &a.csv {
        save(path, &records_csv(&report.body.records))?;
    }
    emit(out, &report.body.summary_text())?;
    Ok(if report.body.mismatches.is_empty() {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    })
}

fn cmd_density(a: DensityArgs, out: &mut dyn Write) -> Outcome {
    check_base(a.g)?;
    let workers = workers_or_default(a.workers);
    let start = Instant::now();
    let estimate = delta_truncated(a.g, a.a, a.d, a.t, a.trunc)?;
    let empirical = match a.empirical_x {
        Some(x) => Some(v_count_par(a.g, a.a, a.d, a.t, x, a.witnesses, workers)?),
        None => None,
    };
    let body = DensityBody::new(estimate, empirical);
    let run = RunInfo {
        workers,
        wall_time_ms: start.elapsed().as_millis() as u64,
    };
    let report = Report::new("density", run, body);
    if let Some(path) = &a.out {
        save(path, report.to_json().as_bytes())?;
    }
    emit(out, &report.body.summary_text())?;
    Ok(EXIT_OK)
}

fn cmd_stats(a: StatsArgs, out: &mut dyn Write) -> Outcome {
    let workers = workers_or_default(a.workers);
    let start = Instant::now();
    let opts = OccurrenceOptions {
        paths: a.paths,
        witness_cap: a.witness_cap,
        workers,
    };
    let hist = occurrence_histogram_with(a.g, a.x, &opts)?;
    let run = RunInfo {
        workers,
        wall_time_ms: start.elapsed().as_millis() as u64,
    };
    let report = Report::new("stats", run, StatsBody::from(hist));
    if let Some(path) = &a.out {
        save(path, report.to_json().as_bytes())?;
    }
    emit(out, &report.body.summary_text())?;
    Ok(EXIT_OK)
}

fn cmd_check(path: &Path, out: &mut dyn Write) -> Outcome {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let outcome = check_report(&text).map_err(Failure::Usage)?;
    if outcome.ok() {
        emit(
            out,
            &format!("{} report OK ({} items revalidated)\n", outcome.kind, outcome.items),
        )?;
        Ok(EXIT_OK)
    } else {
        let mut text = format!("{} report FAILED:\n", outcome.kind);
        for p in &outcome.problems {
            text += &format!("  {p}\n");
        }
        emit(out, &text)?;
        Ok(EXIT_MISMATCH)
    }
}
