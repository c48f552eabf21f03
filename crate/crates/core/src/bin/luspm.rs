use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rust_decimal::Decimal;

use luspm::harness::{
    run_once, run_sweep, sample_database, Algorithm, SweepFile, TrackingAllocator,
};
use luspm::{
    generate_synthetic, parse_spmf, parse_utility_table, Error, MinUtilSpec, MineOptions,
    MiningConfig, QSequenceDatabase, Result, SyntheticSpec,
};

#[global_allocator]
static ALLOC: TrackingAllocator = TrackingAllocator;

#[derive(Parser)]
#[command(
    name = "luspm",
    version,
    about = "Low-utility sequential pattern mining"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine one database with one algorithm.
    Mine(MineArgs),
    /// Run a grid of thresholds, length bounds and sample sizes.
    Sweep(SweepArgs),
    /// Write a synthetic database and its utility table.
    Gen(GenArgs),
}

#[derive(Args)]
struct MineArgs {
    /// base, shrink or extend
    #[arg(long, default_value = "shrink")]
    algo: String,
    /// Sequence file (SPMF format, optional `item[q]` quantities)
    #[arg(long)]
    db: PathBuf,
    /// Utility table, one `item value` pair per line; all 1 when omitted
    #[arg(long)]
    utils: Option<PathBuf>,
    /// Absolute threshold
    #[arg(long, conflicts_with = "sigma", required_unless_present = "sigma")]
    min_util: Option<String>,
    /// Threshold as a fraction of the database utility
    #[arg(long)]
    sigma: Option<String>,
    /// Longest pattern to report; unlimited when omitted
    #[arg(long)]
    max_len: Option<usize>,
    /// Mine a random sample of this many sequences
    #[arg(long)]
    sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Baseline candidate limit
    #[arg(long, default_value_t = luspm::session::DEFAULT_CANDIDATE_CAP)]
    candidate_cap: usize,
    /// Per-pattern embedding limit
    #[arg(long)]
    embedding_cap: Option<usize>,
    /// Patterns file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Metrics CSV file
    #[arg(long)]
    metrics: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// TOML sweep description
    #[arg(long)]
    spec: PathBuf,
    /// Overrides `db` in the spec
    #[arg(long)]
    db: Option<PathBuf>,
    /// Overrides `utils` in the spec
    #[arg(long)]
    utils: Option<PathBuf>,
    /// CSV output; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 1000)]
    seqs: usize,
    #[arg(long, default_value_t = 100)]
    alphabet: u32,
    #[arg(long, default_value_t = 10)]
    min_len: usize,
    #[arg(long, default_value_t = 30)]
    max_len: usize,
    #[arg(long, default_value_t = 5)]
    max_qty: u32,
    #[arg(long, default_value_t = 10)]
    max_external: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Defaults to `<out>.utils`
    #[arg(long)]
    utils_out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Mine(args) => mine(args),
        Command::Sweep(args) => sweep(args),
        Command::Gen(args) => gen(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn decimal(text: &str) -> Result<Decimal> {
    Decimal::from_str(text)
        .or_else(|_| Decimal::from_scientific(text))
        .map_err(|e| Error::InvalidConfig(format!("'{text}' is not a number: {e}")))
}

fn load(db: &Path, utils: Option<&Path>) -> Result<QSequenceDatabase> {
    let sequences = parse_spmf(&fs::read_to_string(db)?)?;
    match utils {
        Some(path) => {
            QSequenceDatabase::new(sequences, parse_utility_table(&fs::read_to_string(path)?)?)
        }
        None => QSequenceDatabase::with_unit_utilities(sequences),
    }
}

fn mine(args: MineArgs) -> Result<ExitCode> {
    let algorithm: Algorithm = args.algo.parse()?;
    let min_util = match (&args.min_util, &args.sigma) {
        (Some(v), _) => MinUtilSpec::Absolute(decimal(v)?),
        (None, Some(s)) => MinUtilSpec::Fraction(decimal(s)?),
        (None, None) => unreachable!("clap requires one threshold"),
    };
    let cfg = MiningConfig {
        min_util,
        max_len: args.max_len,
    };
    cfg.validate()?;
    let mut db = load(&args.db, args.utils.as_deref())?;
    if let Some(n) = args.sample {
        db = sample_database(&db, n, args.seed)?;
    }
    let options = MineOptions {
        threads: args.threads.max(1),
        embedding_cap: args.embedding_cap,
        candidate_cap: args.candidate_cap,
        ..MineOptions::default()
    };
    let outcome = run_once(&db, &cfg, algorithm, &options)?;
    let m = &outcome.metrics;
    eprintln!(
        "{}: {} patterns, {} utility computations, {:.1} ms, status {}",
        m.algorithm, m.patterns, m.utility_computations, m.runtime_ms, m.status
    );
    if let Some(path) = &args.metrics {
        fs::write(path, m.to_csv())?;
    }
    let Some(result) = outcome.result else {
        return Ok(ExitCode::from(3));
    };
    match &args.out {
        Some(path) => fs::write(path, result.to_text())?,
        None => print!("{}", result.to_text()),
    }
    Ok(ExitCode::SUCCESS)
}

fn sweep(args: SweepArgs) -> Result<ExitCode> {
    let file = SweepFile::parse(&fs::read_to_string(&args.spec)?)?;
    let base = args.spec.parent().unwrap_or(Path::new("."));
    let relative = |p: &String| base.join(p);
    let db_path = args
        .db
        .or_else(|| file.db.as_ref().map(relative))
        .ok_or_else(|| Error::InvalidConfig("no database given".into()))?;
    let utils_path = args.utils.or_else(|| file.utils.as_ref().map(relative));
    let db = load(&db_path, utils_path.as_deref())?;
    let report = run_sweep(&file.to_spec()?, &db)?;
    for row in report.rows.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "{} minUtil {}: {}",
            row.metrics.algorithm,
            row.metrics.min_util,
            row.error.as_deref().unwrap_or_default()
        );
    }
    match &args.out {
        Some(path) => fs::write(path, report.to_csv())?,
        None => print!("{}", report.to_csv()),
    }
    if !report.monotone() {
        eprintln!("warning: pattern counts are not monotone across the sweep");
        return Ok(ExitCode::from(4));
    }
    Ok(ExitCode::SUCCESS)
}

fn gen(args: GenArgs) -> Result<ExitCode> {
    let db = generate_synthetic(&SyntheticSpec {
        num_seqs: args.seqs,
        alphabet_size: args.alphabet,
        min_len: args.min_len,
        max_len: args.max_len,
        max_quantity: args.max_qty,
        max_external: args.max_external,
        seed: args.seed,
    })?;
    let utils_out = args.utils_out.unwrap_or_else(|| {
        let mut name = args.out.clone().into_os_string();
        name.push(".utils");
        PathBuf::from(name)
    });
    fs::write(&args.out, db.to_spmf())?;
    fs::write(&utils_out, db.utilities().to_text())?;
    eprintln!(
        "wrote {} sequences to {} and utilities to {}",
        db.len(),
        args.out.display(),
        utils_out.display()
    );
    Ok(ExitCode::SUCCESS)
}
