//! Instrumented runner: single runs with metrics, parameter sweeps and
//! database sampling.
//!
//! Peak memory comes from [`TrackingAllocator`], which a binary must install
//! as its global allocator; without it `peak_bytes` reads 0.

use std::alloc::{GlobalAlloc, Layout, System};
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rust_decimal::Decimal;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::miner_base::{mine_baseline_with, LuspResult};
use crate::miner_extend::mine_extend_with;
use crate::miner_shrink::mine_shrink_with;
use crate::occurrence::UtilityCounter;
use crate::seqdb::{resolve_min_util, MinUtilSpec, MiningConfig, QSequenceDatabase};
use crate::session::{MineOptions, NoopObserver};

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);
static INSTALLED: AtomicBool = AtomicBool::new(false);

/// System allocator wrapper that tracks live and peak heap bytes.
pub struct TrackingAllocator;

unsafe impl GlobalAlloc for TrackingAllocator {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let ptr = System.alloc(layout);
        if !ptr.is_null() {
            grow(layout.size());
        }
        ptr
    }

    unsafe fn alloc_zeroed(&self, layout: Layout) -> *mut u8 {
        let ptr = System.alloc_zeroed(layout);
        if !ptr.is_null() {
            grow(layout.size());
        }
        ptr
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        System.dealloc(ptr, layout);
        CURRENT.fetch_sub(layout.size(), Ordering::Relaxed);
    }

    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        let new = System.realloc(ptr, layout, new_size);
        if !new.is_null() {
            if new_size >= layout.size() {
                grow(new_size - layout.size());
            } else {
                CURRENT.fetch_sub(layout.size() - new_size, Ordering::Relaxed);
            }
        }
        new
    }
}

fn grow(bytes: usize) {
    let now = CURRENT.fetch_add(bytes, Ordering::Relaxed) + bytes;
    PEAK.fetch_max(now, Ordering::Relaxed);
    if !INSTALLED.load(Ordering::Relaxed) {
        INSTALLED.store(true, Ordering::Relaxed);
    }
}

/// Peak tracking relative to a starting point.
pub struct MemoryProbe {
    start: usize,
}

impl MemoryProbe {
    pub fn start() -> MemoryProbe {
        let now = CURRENT.load(Ordering::Relaxed);
        PEAK.store(now, Ordering::Relaxed);
        MemoryProbe { start: now }
    }

    /// Bytes allocated above the starting level at the peak.
    pub fn peak_bytes(&self) -> usize {
        if !INSTALLED.load(Ordering::Relaxed) {
            return 0;
        }
        PEAK.load(Ordering::Relaxed).saturating_sub(self.start)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Base,
    Shrink,
    Extend,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Base, Algorithm::Shrink, Algorithm::Extend];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Base => "base",
            Algorithm::Shrink => "shrink",
            Algorithm::Extend => "extend",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "base" => Ok(Algorithm::Base),
            "shrink" => Ok(Algorithm::Shrink),
            "extend" => Ok(Algorithm::Extend),
            other => Err(Error::InvalidConfig(format!("unknown algorithm '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Ok,
    CandidateCap,
    EmbeddingCap,
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunStatus::Ok => "ok",
            RunStatus::CandidateCap => "candidate_cap",
            RunStatus::EmbeddingCap => "embedding_cap",
        })
    }
}

pub const METRICS_HEADER: &str =
    "algo,dataset_hash,min_util,max_len,patterns,utility_computations,runtime_ms,peak_bytes,status";

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub algorithm: Algorithm,
    pub dataset_hash: String,
    pub min_util: Decimal,
    pub max_len: Option<usize>,
    pub patterns: usize,
    pub utility_computations: u64,
    pub runtime_ms: f64,
    pub peak_bytes: usize,
    pub status: RunStatus,
    /// More than one worker thread was used; runtimes are not comparable to
    /// single-threaded runs.
    pub parallel: bool,
}

impl MetricsReport {
    /// One CSV row matching [`METRICS_HEADER`].
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.3},{},{}",
            self.algorithm,
            self.dataset_hash,
            self.min_util,
            self.max_len
                .map_or_else(|| "inf".to_string(), |m| m.to_string()),
            self.patterns,
            self.utility_computations,
            self.runtime_ms,
            self.peak_bytes,
            self.status
        )
    }

    pub fn to_csv(&self) -> String {
        format!("{METRICS_HEADER}\n{}\n", self.csv_row())
    }
}

/// Content hash of the sequences and utility table (first 16 hex digits of
/// SHA-256).
pub fn dataset_fingerprint(db: &QSequenceDatabase) -> String {
    let mut hasher = Sha256::new();
    hasher.update(db.to_spmf().as_bytes());
    hasher.update(b"\0");
    hasher.update(db.utilities().to_text().as_bytes());
    hex::encode(&hasher.finalize()[..8])
}

pub struct RunOutcome {
    /// `None` when the run aborted on a resource cap.
    pub result: Option<LuspResult>,
    pub metrics: MetricsReport,
}

/// Runs one algorithm and measures it. Cap violations are reported through
/// the status field; other errors propagate.
pub fn run_once(
    db: &QSequenceDatabase,
    cfg: &MiningConfig,
    algorithm: Algorithm,
    options: &MineOptions,
) -> Result<RunOutcome> {
    let threshold = resolve_min_util(cfg, db)?;
    let counter = UtilityCounter::new();
    let probe = MemoryProbe::start();
    let started = Instant::now();
    let outcome = match algorithm {
        Algorithm::Base => mine_baseline_with(db, cfg, options, &counter),
        Algorithm::Shrink => mine_shrink_with(db, cfg, options, &counter, &NoopObserver),
        Algorithm::Extend => mine_extend_with(db, cfg, options, &counter, &NoopObserver),
    };
    let runtime_ms = started.elapsed().as_secs_f64() * 1000.0;
    let peak_bytes = probe.peak_bytes();
    let (result, status) = match outcome {
        Ok(r) => (Some(r), RunStatus::Ok),
        Err(Error::CandidateCap { .. }) => (None, RunStatus::CandidateCap),
        Err(Error::EmbeddingCap { .. }) => (None, RunStatus::EmbeddingCap),
        Err(e) => return Err(e),
    };
    let metrics = MetricsReport {
        algorithm,
        dataset_hash: dataset_fingerprint(db),
        min_util: threshold.value(),
        max_len: cfg.max_len,
        patterns: result.as_ref().map_or(0, LuspResult::len),
        utility_computations: counter.get(),
        runtime_ms,
        peak_bytes,
        status,
        parallel: options.threads > 1,
    };
    Ok(RunOutcome { result, metrics })
}

/// Draws `n` distinct sequences (kept in database order).
pub fn sample_database(db: &QSequenceDatabase, n: usize, seed: u64) -> Result<QSequenceDatabase> {
    if n == 0 || n > db.len() {
        return Err(Error::InvalidParameter(format!(
            "sample size {n} outside 1..={}",
            db.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, db.len(), n).into_vec();
    picked.sort_unstable();
    Ok(db.subset(&picked))
}

/// A grid of runs.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub thresholds: Vec<MinUtilSpec>,
    /// `None` entries mean unlimited.
    pub max_lens: Vec<Option<usize>>,
    /// `None` entries mean the whole database.
    pub sample_sizes: Vec<Option<usize>>,
    pub repetitions: usize,
    pub algorithms: Vec<Algorithm>,
    pub seed: u64,
    pub options: MineOptions,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.thresholds.is_empty()
            || self.max_lens.is_empty()
            || self.sample_sizes.is_empty()
            || self.algorithms.is_empty()
        {
            return Err(Error::InvalidConfig("sweep lists must be non-empty".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidConfig(
                "repetitions must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// On-disk (TOML) form of a sweep.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub db: Option<String>,
    pub utils: Option<String>,
    #[serde(default)]
    pub min_utils: Vec<Number>,
    #[serde(default)]
    pub sigmas: Vec<Number>,
    /// 0 means unlimited.
    #[serde(default)]
    pub max_lens: Vec<usize>,
    #[serde(default)]
    pub sample_sizes: Vec<usize>,
    #[serde(default = "one")]
    pub repetitions: usize,
    #[serde(default)]
    pub algorithms: Vec<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub threads: usize,
}

fn one() -> usize {
    1
}

/// A threshold written as a TOML integer, float or string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    fn to_decimal(&self) -> Result<Decimal> {
        match self {
            Number::Int(i) => Ok(Decimal::from(*i)),
            Number::Float(f) => Decimal::from_str(&f.to_string())
                .or_else(|_| Decimal::from_scientific(&format!("{f:e}")))
                .map_err(|e| Error::InvalidConfig(format!("threshold {f}: {e}"))),
            Number::Text(s) => Decimal::from_str(s)
                .or_else(|_| Decimal::from_scientific(s))
                .map_err(|e| Error::InvalidConfig(format!("threshold '{s}': {e}"))),
        }
    }
}

impl SweepFile {
    pub fn parse(text: &str) -> Result<SweepFile> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(format!("sweep spec: {e}")))
    }

    pub fn to_spec(&self) -> Result<SweepSpec> {
        let mut thresholds = Vec::new();
        for n in &self.min_utils {
            thresholds.push(MinUtilSpec::Absolute(n.to_decimal()?));
        }
        for n in &self.sigmas {
            thresholds.push(MinUtilSpec::Fraction(n.to_decimal()?));
        }
        let algorithms = if self.algorithms.is_empty() {
            Algorithm::ALL.to_vec()
        } else {
            self.algorithms
                .iter()
                .map(|a| a.parse())
                .collect::<Result<Vec<_>>>()?
        };
        let spec = SweepSpec {
            thresholds,
            max_lens: if self.max_lens.is_empty() {
                vec![None]
            } else {
                self.max_lens
                    .iter()
                    .map(|&m| (m > 0).then_some(m))
                    .collect()
            },
            sample_sizes: if self.sample_sizes.is_empty() {
                vec![None]
            } else {
                self.sample_sizes.iter().map(|&n| Some(n)).collect()
            },
            repetitions: self.repetitions,
            algorithms,
            seed: self.seed,
            options: MineOptions {
                threads: self.threads.max(1),
                ..MineOptions::default()
            },
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub metrics: MetricsReport,
    pub sample_size: usize,
    pub repetition: usize,
    /// Pattern count is at least that of every point with a smaller
    /// threshold or smaller maxLen in the same series.
    pub monotone: bool,
    /// Per-cell error text when the run failed outright.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn monotone(&self) -> bool {
        self.rows.iter().all(|r| r.monotone)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{METRICS_HEADER},sample_size,repetition,monotone\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                r.metrics.csv_row(),
                r.sample_size,
                r.repetition,
                r.monotone
            );
        }
        out
    }
}

fn len_key(m: Option<usize>) -> usize {
    m.unwrap_or(usize::MAX)
}

/// Runs every (sample, algorithm, repetition, maxLen, threshold) cell.
/// Failing cells are recorded and the sweep continues.
pub fn run_sweep(spec: &SweepSpec, db: &QSequenceDatabase) -> Result<SweepReport> {
    spec.validate()?;
    let mut report = SweepReport::default();
    for (si, &size) in spec.sample_sizes.iter().enumerate() {
        let sample = match size {
            Some(n) => sample_database(db, n, spec.seed.wrapping_add(si as u64))?,
            None => db.clone(),
        };
        let mut thresholds: Vec<(Decimal, MinUtilSpec)> = spec
            .thresholds
            .iter()
            .map(|&t| {
                let cfg = MiningConfig {
                    min_util: t,
                    max_len: None,
                };
                resolve_min_util(&cfg, &sample).map(|r| (r.value(), t))
            })
            .collect::<Result<_>>()?;
        thresholds.sort_by_key(|t| t.0);
        let mut max_lens = spec.max_lens.clone();
        max_lens.sort_by_key(|&m| len_key(m));

        for &algorithm in &spec.algorithms {
            for rep in 0..spec.repetitions {
                let series_start = report.rows.len();
                for &max_len in &max_lens {
                    for &(_, min_util) in &thresholds {
                        let cfg = MiningConfig { min_util, max_len };
                        let (metrics, error) =
                            match run_once(&sample, &cfg, algorithm, &spec.options) {
                                Ok(o) => (o.metrics, None),
                                Err(e) => (
                                    failed_metrics(&sample, &cfg, algorithm),
                                    Some(e.to_string()),
                                ),
                            };
                        let ok = metrics.status == RunStatus::Ok && error.is_none();
                        let monotone = !ok
                            || report.rows[series_start..].iter().all(|prev| {
                                let comparable = prev.error.is_none()
                                    && prev.metrics.status == RunStatus::Ok
                                    && prev.metrics.min_util <= metrics.min_util
                                    && len_key(prev.metrics.max_len) <= len_key(metrics.max_len);
                                !comparable || prev.metrics.patterns <= metrics.patterns
                            });
                        report.rows.push(SweepRow {
                            metrics,
                            sample_size: sample.len(),
                            repetition: rep,
                            monotone,
                            error,
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}

fn failed_metrics(
    db: &QSequenceDatabase,
    cfg: &MiningConfig,
    algorithm: Algorithm,
) -> MetricsReport {
    MetricsReport {
        algorithm,
        dataset_hash: dataset_fingerprint(db),
        min_util: resolve_min_util(cfg, db).map_or(Decimal::ZERO, |t| t.value()),
        max_len: cfg.max_len,
        patterns: 0,
        utility_computations: 0,
        runtime_ms: 0.0,
        peak_bytes: 0,
        status: RunStatus::Ok,
        parallel: false,
    }
}
