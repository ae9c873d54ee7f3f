//! `maxab`: classify maximal abelian subfields of CM division fields and check
//! the supporting group computations.

mod batch;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use maxab_core::cartan::{build_normalizer, kernel_matrices, params_for};
use maxab_core::matgroups::{abelianization_order, derived_subgroup};
use maxab_core::residues::is_prime;
use maxab_core::verify::{run_suite, Suite, VerifyRecord};
use maxab_core::{classify_max_abelian, twist_data, CMOrder, Error, RationalCurve};

/// Failure classes, each with its own process exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
    VerificationFailed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Domain(_) => 2,
            CliError::VerificationFailed(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Domain(m) | CliError::VerificationFailed(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Usage(format!("i/o error: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "maxab", version, about = "Maximal abelian extensions inside division fields of CM elliptic curves")]
struct Cli {
    /// Worker threads for batch and verify (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify the maximal abelian subfield of Q(E[p^n]) for y^2 = x^3 + Ax + B.
    Classify(ClassifyArgs),
    /// Print the twist class and alpha of a CM curve.
    Alpha(AlphaArgs),
    /// Inspect the Cartan normalizer of an order at p^n.
    Group(GroupArgs),
    /// Run verification suites and write JSONL records.
    Verify(VerifyArgs),
    /// Classify every record of a CSV or JSON file, writing JSONL reports.
    Batch(BatchArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    #[arg(long, allow_hyphen_values = true)]
    b: String,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    n: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct AlphaArgs {
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    #[arg(long, allow_hyphen_values = true)]
    b: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum What {
    Order,
    Commutator,
    Abelianization,
    Kernel,
}

#[derive(Args, Debug)]
struct GroupArgs {
    /// Discriminant f^2 * deltaK of the order.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["delta_k", "f"])]
    disc: Option<i64>,
    /// Fundamental discriminant of the CM field.
    #[arg(long = "deltaK", allow_hyphen_values = true, requires = "f")]
    delta_k: Option<i64>,
    /// Conductor of the order.
    #[arg(long, requires = "delta_k")]
    f: Option<i64>,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    n: u32,
    #[arg(long, value_enum)]
    what: What,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    Lemmas,
    Section4,
    Theorems,
    Conjugacy,
    All,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    suite: SuiteArg,
    /// Upper bound on the exponent n (capped at 3 for odd p and 4 for p = 2).
    #[arg(long)]
    max_n: Option<u32>,
    /// JSONL output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BatchArgs {
    /// Input file: `.csv` with header A,B,p,n, or `.json` holding a list of objects.
    #[arg(long = "in")]
    input: PathBuf,
    /// JSONL output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: cannot configure {jobs} worker threads: {e}");
            return ExitCode::from(1);
        }
    }
    let outcome = match cli.command {
        Command::Classify(a) => cmd_classify(a),
        Command::Alpha(a) => cmd_alpha(a),
        Command::Group(a) => cmd_group(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Batch(a) => batch::cmd_batch(&a.input, a.out.as_deref()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

/// Parse coefficients given as decimal strings; failures are usage errors.
pub fn parse_curve(a: &str, b: &str) -> CliResult<RationalCurve> {
    RationalCurve::parse(a, b).map_err(|e| match e {
        Error::SingularCurve => CliError::Domain(e.to_string()),
        other => CliError::Usage(other.to_string()),
    })
}

/// Check the (p, n) preconditions shared by classify and group.
pub fn check_level(p: u64, n: u32) -> CliResult<()> {
    if !is_prime(p) {
        return Err(CliError::Usage(format!("p = {p} is not prime")));
    }
    if n == 0 {
        return Err(CliError::Usage("n must be at least 1".into()));
    }
    Ok(())
}

/// Open the output sink: a file when a path is given, stdout otherwise.
pub fn open_out(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_classify(args: ClassifyArgs) -> CliResult<()> {
    check_level(args.p, args.n)?;
    let curve = parse_curve(&args.a, &args.b)?;
    let report = classify_max_abelian(&curve, args.p, args.n)?;
    let mut out = io::stdout().lock();
    match args.format {
        Format::Text => writeln!(out, "{}", report.describe())?,
        Format::Json => writeln!(out, "{}", serde_json::to_string(&report).expect("report serializes"))?,
    }
    Ok(())
}

fn cmd_alpha(args: AlphaArgs) -> CliResult<()> {
    let curve = parse_curve(&args.a, &args.b)?;
    let tw = twist_data(&curve)?;
    let kind = serde_json::to_value(tw.kind).expect("kind serializes");
    let kind = kind.as_str().unwrap_or_default();
    let mut out = io::stdout().lock();
    match args.format {
        Format::Text => {
            writeln!(out, "alpha {}, kind {kind}, d {}, base ({},{})", tw.alpha, tw.d, tw.order.delta_k, tw.order.f)?
        }
        Format::Json => {
            let v = serde_json::json!({
                "alpha": tw.alpha.to_string(),
                "kind": kind,
                "d": tw.d.to_string(),
                "order": tw.order,
            });
            writeln!(out, "{v}")?;
        }
    }
    Ok(())
}

fn group_order_arg(args: &GroupArgs) -> CliResult<CMOrder> {
    match (args.disc, args.delta_k, args.f) {
        (Some(d), None, None) => Ok(CMOrder::from_disc(d)?),
        (None, Some(dk), Some(f)) => {
            let order = CMOrder::new(dk, f);
            if f < 1 || CMOrder::from_disc(order.disc()).ok() != Some(order) {
                return Err(CliError::Usage(format!("({dk}, {f}) is not a fundamental discriminant and conductor")));
            }
            Ok(order)
        }
        _ => Err(CliError::Usage("give either --disc or both --deltaK and --f".into())),
    }
}

fn cmd_group(args: GroupArgs) -> CliResult<()> {
    check_level(args.p, args.n)?;
    let order = group_order_arg(&args)?;
    let modulus =
        args.p.checked_pow(args.n).ok_or_else(|| CliError::Usage(format!("{}^{} is too large", args.p, args.n)))?;
    let params = params_for(&order, modulus)?;
    let mut out = io::stdout().lock();
    match args.what {
        What::Order => writeln!(out, "{}", build_normalizer(&params)?.order())?,
        What::Commutator => writeln!(out, "{}", derived_subgroup(&build_normalizer(&params)?)?.order())?,
        What::Abelianization => writeln!(out, "{}", abelianization_order(&build_normalizer(&params)?)?)?,
        What::Kernel => {
            let next = modulus.checked_mul(args.p).ok_or_else(|| CliError::Usage("modulus too large".into()))?;
            for m in kernel_matrices(&params_for(&order, next)?)? {
                writeln!(out, "{m}")?;
            }
        }
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> CliResult<()> {
    let suites: Vec<Suite> = match args.suite {
        SuiteArg::Lemmas => vec![Suite::Lemmas],
        SuiteArg::Section4 => vec![Suite::Section4],
        SuiteArg::Theorems => vec![Suite::Theorems],
        SuiteArg::Conjugacy => vec![Suite::Conjugacy],
        SuiteArg::All => Suite::ALL.to_vec(),
    };
    if args.max_n == Some(0) {
        return Err(CliError::Usage("--max-n must be at least 1".into()));
    }
    let mut out = open_out(args.out.as_deref())?;
    let mut failed = Vec::new();
    for suite in suites {
        let records: Vec<VerifyRecord> = run_suite(suite, args.max_n)?;
        for r in &records {
            writeln!(out, "{}", serde_json::to_string(r).expect("record serializes"))?;
        }
        let passed = records.iter().filter(|r| r.pass).count();
        eprintln!("{}: {passed}/{} checks passed", suite.name(), records.len());
        if passed < records.len() {
            failed.push(suite.name());
        }
    }
    out.flush()?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::VerificationFailed(format!("failing suites: {}", failed.join(", "))))
    }
}
