//! Exhaustive baseline: enumerate every distinct subsequence of the
//! database and evaluate each one directly. Ground truth for the pruned
//! miners.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::occurrence::UtilityCounter;
use crate::seqdb::{ItemId, MiningConfig, Pattern, QSequenceDatabase};
use crate::session::{prepare, MineOptions, NoopObserver, Session};
use crate::utility::{Threshold, Utility};

/// A mined low-utility pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LuspRecord {
    pub pattern: Pattern,
    pub utility: Utility,
    pub support: u64,
}

/// The set of LUSPs of one run, ordered by pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LuspResult {
    records: Vec<LuspRecord>,
    min_util: Threshold,
    max_len: Option<usize>,
    decimals: u32,
}

impl LuspResult {
    pub(crate) fn from_map(
        records: BTreeMap<Pattern, LuspRecord>,
        min_util: Threshold,
        max_len: Option<usize>,
        decimals: u32,
    ) -> LuspResult {
        LuspResult {
            records: records.into_values().collect(),
            min_util,
            max_len,
            decimals,
        }
    }

    pub fn records(&self) -> &[LuspRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, pattern: &Pattern) -> Option<&LuspRecord> {
        self.records
            .binary_search_by(|r| r.pattern.cmp(pattern))
            .ok()
            .map(|i| &self.records[i])
    }

    pub fn contains(&self, pattern: &Pattern) -> bool {
        self.get(pattern).is_some()
    }

    pub fn patterns(&self) -> impl Iterator<Item = &Pattern> {
        self.records.iter().map(|r| &r.pattern)
    }

    pub fn min_util(&self) -> Threshold {
        self.min_util
    }

    pub fn max_len(&self) -> Option<usize> {
        self.max_len
    }

    pub fn decimals(&self) -> u32 {
        self.decimals
    }

    /// Result file contents: `ids<TAB>utility<TAB>support` per line, in
    /// lexicographic pattern order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let _ = writeln!(
                out,
                "{}\t{}\t{}",
                r.pattern,
                r.utility.display(self.decimals),
                r.support
            );
        }
        out
    }
}

/// Every distinct non-empty subsequence of every database sequence, up to
/// `max_len` items. Fails once more than `cap` patterns are collected.
pub fn enumerate_all_subsequences(
    db: &QSequenceDatabase,
    max_len: Option<usize>,
    cap: usize,
) -> Result<BTreeSet<Pattern>> {
    let mut all: HashSet<Pattern> = HashSet::new();
    let limit = max_len.unwrap_or(usize::MAX);
    for seq in db.sequences() {
        let items: Vec<ItemId> = seq.elements.iter().map(|e| e.item).collect();
        let next = NextTable::new(&items);
        let mut prefix = Vec::new();
        collect_distinct(&next, 0, limit, &mut prefix, &mut all, cap)?;
    }
    Ok(all.into_iter().collect())
}

/// `next[i][k]`: first position `>= i` holding the sequence's k-th distinct item.
struct NextTable {
    alphabet: Vec<ItemId>,
    next: Vec<Vec<Option<u32>>>,
}

impl NextTable {
    fn new(items: &[ItemId]) -> NextTable {
        let mut alphabet: Vec<ItemId> = items.to_vec();
        alphabet.sort_unstable();
        alphabet.dedup();
        let slot: HashMap<ItemId, usize> = alphabet
            .iter()
            .enumerate()
            .map(|(i, &it)| (it, i))
            .collect();
        let mut next = vec![vec![None; alphabet.len()]; items.len() + 1];
        for i in (0..items.len()).rev() {
            next[i] = next[i + 1].clone();
            next[i][slot[&items[i]]] = Some(i as u32);
        }
        NextTable { alphabet, next }
    }
}

// Walks the subsequence automaton: each distinct subsequence of one
// sequence is produced exactly once.
fn collect_distinct(
    table: &NextTable,
    from: usize,
    limit: usize,
    prefix: &mut Vec<ItemId>,
    out: &mut HashSet<Pattern>,
    cap: usize,
) -> Result<()> {
    if prefix.len() >= limit {
        return Ok(());
    }
    for (k, &item) in table.alphabet.iter().enumerate() {
        let Some(pos) = table.next[from][k] else {
            continue;
        };
        prefix.push(item);
        let pattern = Pattern(prefix.clone());
        if !out.contains(&pattern) {
            if out.len() >= cap {
                return Err(Error::CandidateCap { limit: cap });
            }
            out.insert(pattern);
        }
        collect_distinct(table, pos as usize + 1, limit, prefix, out, cap)?;
        prefix.pop();
    }
    Ok(())
}

/// Number of distinct non-empty subsequences of `items` with at most
/// `max_len` elements. Saturates at `u128::MAX`.
pub fn count_distinct_subsequences(items: &[ItemId], max_len: Option<usize>) -> u128 {
    let n = items.len();
    let cap = max_len.unwrap_or(n).min(n);
    // counts[i][l]: distinct subsequences of length l in the first i items
    let mut counts = vec![vec![0u128; cap + 1]; n + 1];
    for row in counts.iter_mut() {
        row[0] = 1;
    }
    let mut last: HashMap<ItemId, usize> = HashMap::new();
    for i in 1..=n {
        let prev = last.insert(items[i - 1], i);
        for l in 1..=cap {
            let Some(mut v) = counts[i - 1][l].checked_add(counts[i - 1][l - 1]) else {
                return u128::MAX;
            };
            if let Some(j) = prev {
                v -= counts[j - 1][l - 1];
            }
            counts[i][l] = v;
        }
    }
    counts[n][1..]
        .iter()
        .try_fold(0u128, |acc, &c| acc.checked_add(c))
        .unwrap_or(u128::MAX)
}

pub fn mine_baseline(db: &QSequenceDatabase, cfg: &MiningConfig) -> Result<LuspResult> {
    mine_baseline_with(db, cfg, &MineOptions::default(), &UtilityCounter::new())
}

pub fn mine_baseline_with(
    db: &QSequenceDatabase,
    cfg: &MiningConfig,
    options: &MineOptions,
    counter: &UtilityCounter,
) -> Result<LuspResult> {
    let prepared = prepare(db, cfg)?;
    let session = Session::new(
        db,
        &prepared.index,
        prepared.threshold,
        cfg.max_len,
        counter,
        &NoopObserver,
        *options,
    );
    let candidates: Vec<Pattern> =
        enumerate_all_subsequences(db, cfg.max_len, options.candidate_cap)?
            .into_iter()
            .collect();
    session.for_each(&candidates, |_, pattern| {
        let eval = session.evaluate(pattern)?;
        if session.threshold.admits(eval.utility) && session.length_ok(pattern.len()) {
            session.record(pattern);
        }
        Ok(())
    })?;
    Ok(session.finish())
}
