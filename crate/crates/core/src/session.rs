//! State shared by every miner during one run: the chain builder, the
//! threshold, a pattern-keyed memo of evaluated utilities, the result sink
//! and an optional observer used by tests to shadow-check pruning.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::miner_base::{LuspRecord, LuspResult};
use crate::occurrence::{build_bit_index, BitIndex, ChainBuilder, SuChain, UtilityCounter};
use crate::seqdb::{resolve_min_util, MiningConfig, Pattern, QSequenceDatabase};
use crate::utility::{Threshold, Utility};

/// Execution knobs shared by all algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MineOptions {
    /// Worker threads; 1 runs single-threaded.
    pub threads: usize,
    /// Abort when a pattern has more embeddings than this.
    pub embedding_cap: Option<usize>,
    /// Abort the baseline when its candidate set grows beyond this.
    pub candidate_cap: usize,
    /// Use the bit index to locate embeddings.
    pub use_bits: bool,
}

pub const DEFAULT_CANDIDATE_CAP: usize = 5_000_000;

impl Default for MineOptions {
    fn default() -> Self {
        MineOptions {
            threads: 1,
            embedding_cap: None,
            candidate_cap: DEFAULT_CANDIDATE_CAP,
            use_bits: true,
        }
    }
}

/// Hooks into the search. All methods default to no-ops.
///
/// Positions are indices into `root`, the preprocessed sequence the search
/// started from.
pub trait SearchObserver: Sync {
    /// A position subset of `root` was generated as a candidate.
    fn candidate(&self, _root: &Pattern, _positions: &[u32]) {}

    /// The lower bound from an ancestor chain exceeded the threshold, so the
    /// pattern's true utility was not computed.
    fn lbs_skip(&self, _pattern: &Pattern, _bound: Utility) {}

    /// Invalid-item pruning removed `pruned` (indices into `state`) from a
    /// shrinkage state whose first `frozen` positions are fixed.
    fn items_pruned(&self, _state: &Pattern, _frozen: usize, _pruned: &[usize]) {}

    /// Extension of `accumulated` (positions in `root`) was cut off.
    fn extension_cut(&self, _root: &Pattern, _accumulated: &[u32]) {}

    /// A search built the pattern's chain (one utility computation).
    fn evaluated(&self, _pattern: &Pattern, _utility: Utility) {}
}

pub struct NoopObserver;

impl SearchObserver for NoopObserver {}

/// Outcome of evaluating one pattern against the database.
pub(crate) struct Evaluation {
    pub utility: Utility,
    /// The freshly built chain, or `None` on a memo hit.
    pub chain: Option<SuChain>,
}

pub(crate) struct Session<'a> {
    pub builder: ChainBuilder<'a>,
    pub threshold: Threshold,
    pub max_len: Option<usize>,
    pub counter: &'a UtilityCounter,
    pub observer: &'a dyn SearchObserver,
    pub options: MineOptions,
    memo: Mutex<HashMap<Pattern, (Utility, u64)>>,
    sink: Mutex<BTreeMap<Pattern, LuspRecord>>,
}

impl<'a> Session<'a> {
    pub fn new(
        db: &'a QSequenceDatabase,
        index: &'a BitIndex,
        threshold: Threshold,
        max_len: Option<usize>,
        counter: &'a UtilityCounter,
        observer: &'a dyn SearchObserver,
        options: MineOptions,
    ) -> Session<'a> {
        Session {
            builder: ChainBuilder::new(db, index)
                .with_bits(options.use_bits)
                .with_embedding_cap(options.embedding_cap),
            threshold,
            max_len,
            counter,
            observer,
            options,
            memo: Mutex::new(HashMap::new()),
            sink: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn length_ok(&self, len: usize) -> bool {
        self.max_len.is_none_or(|m| len <= m)
    }

    /// Builds the pattern's chain unless its utility is already known.
    pub fn evaluate(&self, pattern: &Pattern) -> Result<Evaluation> {
        if let Some(&(utility, _)) = self.memo.lock().expect("memo lock").get(pattern) {
            return Ok(Evaluation {
                utility,
                chain: None,
            });
        }
        let chain = self.builder.utility_chain(pattern, self.counter)?;
        let utility = chain.total();
        self.remember(pattern, &chain);
        self.observer.evaluated(pattern, utility);
        Ok(Evaluation {
            utility,
            chain: Some(chain),
        })
    }

    /// Registers a chain built outside `evaluate` (preprocessing).
    pub fn remember(&self, pattern: &Pattern, chain: &SuChain) {
        self.memo
            .lock()
            .expect("memo lock")
            .entry(pattern.clone())
            .or_insert((chain.total(), chain.num_rows() as u64));
    }

    /// Adds a LUSP to the result. The pattern must have been evaluated.
    pub fn record(&self, pattern: &Pattern) {
        let (utility, support) = *self
            .memo
            .lock()
            .expect("memo lock")
            .get(pattern)
            .expect("recorded patterns are evaluated first");
        debug_assert!(self.threshold.admits(utility));
        self.sink
            .lock()
            .expect("sink lock")
            .entry(pattern.clone())
            .or_insert(LuspRecord {
                pattern: pattern.clone(),
                utility,
                support,
            });
    }

    pub fn finish(self) -> LuspResult {
        let records = self.sink.into_inner().expect("sink lock");
        LuspResult::from_map(
            records,
            self.threshold,
            self.max_len,
            self.builder.db().decimals(),
        )
    }

    /// Runs `f` over every item, in parallel when more than one thread is
    /// configured.
    pub fn for_each<T, F>(&self, items: &[T], f: F) -> Result<()>
    where
        T: Sync,
        F: Fn(usize, &T) -> Result<()> + Sync + Send,
    {
        if self.options.threads <= 1 {
            return items.iter().enumerate().try_for_each(|(i, t)| f(i, t));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.options.threads)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
        pool.install(|| items.par_iter().enumerate().try_for_each(|(i, t)| f(i, t)))
    }
}

/// Everything a miner needs that is derived from the database and config.
pub(crate) struct Prepared {
    pub index: BitIndex,
    pub threshold: Threshold,
}

pub(crate) fn prepare(db: &QSequenceDatabase, cfg: &MiningConfig) -> Result<Prepared> {
    Ok(Prepared {
        index: build_bit_index(db),
        threshold: resolve_min_util(cfg, db)?,
    })
}
