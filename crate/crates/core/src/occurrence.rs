//! Occurrence enumeration and sequence-utility chains.
//!
//! A pattern's utility sums `quantity * ex(item)` over *every* embedding of
//! the pattern in every sequence, so everything here is built on exhaustive,
//! canonically ordered embedding enumeration. Chain rows remember which
//! embedding they came from; projections onto a subset of columns merge rows
//! that collapse onto the same embedding of the sub-pattern, which keeps
//! projected sums valid lower bounds of the sub-pattern's utility.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::seqdb::{ItemId, Pattern, QSequence, QSequenceDatabase};
use crate::utility::Utility;

/// A fixed-length bit vector over sequence positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMask {
    words: Vec<u64>,
    len: usize,
}

impl BitMask {
    pub fn new(len: usize) -> BitMask {
        BitMask {
            words: vec![0; len.div_ceil(64).max(1)],
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn set(&mut self, pos: usize) {
        self.words[pos / 64] |= 1 << (pos % 64);
    }

    pub fn get(&self, pos: usize) -> bool {
        pos < self.len && self.words[pos / 64] >> (pos % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Smallest set position `>= from`.
    pub fn next_set(&self, from: usize) -> Option<usize> {
        if from >= self.len {
            return None;
        }
        let mut w = from / 64;
        let mut word = self.words[w] & (!0u64 << (from % 64));
        loop {
            if word != 0 {
                let pos = w * 64 + word.trailing_zeros() as usize;
                return (pos < self.len).then_some(pos);
            }
            w += 1;
            if w >= self.words.len() {
                return None;
            }
            word = self.words[w];
        }
    }

    /// Largest set position `<= at_most`.
    pub fn prev_set(&self, at_most: usize) -> Option<usize> {
        if self.len == 0 {
            return None;
        }
        let at_most = at_most.min(self.len - 1);
        let mut w = at_most / 64;
        let shift = 63 - (at_most % 64);
        let mut word = self.words[w] & (!0u64 >> shift);
        loop {
            if word != 0 {
                return Some(w * 64 + 63 - word.leading_zeros() as usize);
            }
            if w == 0 {
                return None;
            }
            w -= 1;
            word = self.words[w];
        }
    }

    /// Set positions in ascending order, as a string of `0`/`1`.
    pub fn to_bit_string(&self) -> String {
        (0..self.len)
            .map(|p| if self.get(p) { '1' } else { '0' })
            .collect()
    }
}

/// Per-item presence masks of one sequence.
#[derive(Debug, Clone, Default)]
pub struct SequenceBits {
    masks: HashMap<ItemId, BitMask>,
}

impl SequenceBits {
    pub fn build(seq: &QSequence) -> SequenceBits {
        let mut masks: HashMap<ItemId, BitMask> = HashMap::new();
        for (pos, e) in seq.elements.iter().enumerate() {
            masks
                .entry(e.item)
                .or_insert_with(|| BitMask::new(seq.len()))
                .set(pos);
        }
        SequenceBits { masks }
    }

    pub fn mask(&self, item: ItemId) -> Option<&BitMask> {
        self.masks.get(&item)
    }

    pub fn items(&self) -> impl Iterator<Item = ItemId> + '_ {
        self.masks.keys().copied()
    }
}

/// Bit masks for every sequence plus an item -> sequences posting list.
#[derive(Debug, Clone, Default)]
pub struct BitIndex {
    sequences: Vec<SequenceBits>,
    postings: HashMap<ItemId, Vec<u32>>,
}

impl BitIndex {
    pub fn sequence(&self, idx: usize) -> &SequenceBits {
        &self.sequences[idx]
    }

    pub fn mask(&self, idx: usize, item: ItemId) -> Option<&BitMask> {
        self.sequences[idx].mask(item)
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    /// Indices of sequences containing every item of the pattern.
    fn candidate_sequences<'a>(&'a self, pattern: &'a Pattern) -> impl Iterator<Item = usize> + 'a {
        let rarest = pattern
            .items()
            .iter()
            .map(|item| self.postings.get(item).map_or(&[][..], |v| v.as_slice()))
            .min_by_key(|list| list.len())
            .unwrap_or(&[]);
        rarest.iter().map(|&s| s as usize).filter(move |&s| {
            pattern
                .items()
                .iter()
                .all(|&item| self.sequences[s].masks.contains_key(&item))
        })
    }
}

pub fn build_bit_index(db: &QSequenceDatabase) -> BitIndex {
    let sequences: Vec<SequenceBits> = db.sequences().iter().map(SequenceBits::build).collect();
    let mut postings: HashMap<ItemId, Vec<u32>> = HashMap::new();
    for (idx, bits) in sequences.iter().enumerate() {
        for item in bits.items() {
            postings.entry(item).or_default().push(idx as u32);
        }
    }
    for list in postings.values_mut() {
        list.sort_unstable();
    }
    BitIndex {
        sequences,
        postings,
    }
}

/// One occurrence of a pattern: strictly increasing 0-based positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Embedding {
    pub sid: u32,
    pub positions: Vec<u32>,
}

/// Position lookups with or without the bit index.
trait Positions {
    fn next_at_or_after(&self, item: ItemId, from: usize) -> Option<usize>;
    fn last_at_or_before(&self, item: ItemId, at_most: usize) -> Option<usize>;
}

struct Scan<'a>(&'a QSequence);

impl Positions for Scan<'_> {
    fn next_at_or_after(&self, item: ItemId, from: usize) -> Option<usize> {
        self.0.elements[from.min(self.0.len())..]
            .iter()
            .position(|e| e.item == item)
            .map(|p| p + from)
    }

    fn last_at_or_before(&self, item: ItemId, at_most: usize) -> Option<usize> {
        let end = (at_most + 1).min(self.0.len());
        self.0.elements[..end].iter().rposition(|e| e.item == item)
    }
}

impl Positions for SequenceBits {
    fn next_at_or_after(&self, item: ItemId, from: usize) -> Option<usize> {
        self.mask(item)?.next_set(from)
    }

    fn last_at_or_before(&self, item: ItemId, at_most: usize) -> Option<usize> {
        self.mask(item)?.prev_set(at_most)
    }
}

/// Calls `visit` with every embedding of `pattern` in a sequence of length
/// `len`, in lexicographic position order. Returns the number visited, or
/// `Err` when more than `cap` embeddings exist.
fn for_each_embedding<P: Positions>(
    pattern: &[ItemId],
    len: usize,
    lookup: &P,
    cap: Option<usize>,
    visit: &mut dyn FnMut(&[u32]),
) -> Result<usize> {
    let n = pattern.len();
    if n == 0 || n > len {
        return Ok(0);
    }
    // latest[k]: the largest position element k may take so that the rest
    // of the pattern still fits after it
    let mut latest = vec![0usize; n];
    let mut bound = len - 1;
    for k in (0..n).rev() {
        match lookup.last_at_or_before(pattern[k], bound) {
            Some(p) => latest[k] = p,
            None => return Ok(0),
        }
        if k > 0 {
            if latest[k] == 0 {
                return Ok(0);
            }
            bound = latest[k] - 1;
        }
    }

    let mut positions = vec![0u32; n];
    let mut count = 0usize;
    // cursor[k] is the next position to try for element k
    let mut cursor = vec![0usize; n];
    let mut k = 0usize;
    cursor[0] = 0;
    loop {
        match lookup
            .next_at_or_after(pattern[k], cursor[k])
            .filter(|&p| p <= latest[k])
        {
            Some(p) => {
                positions[k] = p as u32;
                cursor[k] = p + 1;
                if k + 1 == n {
                    count += 1;
                    if cap.is_some_and(|c| count > c) {
                        return Err(Error::EmbeddingCap {
                            limit: cap.unwrap_or_default(),
                        });
                    }
                    visit(&positions);
                } else {
                    k += 1;
                    cursor[k] = p + 1;
                }
            }
            None => {
                if k == 0 {
                    return Ok(count);
                }
                k -= 1;
            }
        }
    }
}

/// Every embedding of `pattern` in `seq`, lexicographically ordered. The bit
/// masks only accelerate the search; results are identical without them.
pub fn enumerate_embeddings(
    pattern: &Pattern,
    seq: &QSequence,
    bits: Option<&SequenceBits>,
) -> Vec<Embedding> {
    let mut out = Vec::new();
    let mut push = |p: &[u32]| {
        out.push(Embedding {
            sid: seq.sid,
            positions: p.to_vec(),
        })
    };
    let res = match bits {
        Some(b) => for_each_embedding(pattern.items(), seq.len(), b, None, &mut push),
        None => for_each_embedding(pattern.items(), seq.len(), &Scan(seq), None, &mut push),
    };
    res.expect("no cap");
    out
}

/// Number of full-chain constructions performed during a run. Safe to bump
/// from several threads.
#[derive(Debug, Default)]
pub struct UtilityCounter(AtomicU64);

impl UtilityCounter {
    pub fn new() -> UtilityCounter {
        UtilityCounter::default()
    }

    pub fn increment(&self) {
        self.0.fetch_add(1, Ordering::Relaxed);
    }

    pub fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }
}

/// Sequence-utility chain: one row of per-element utilities for each
/// occurrence of a pattern, together with the occurrence it came from
/// (sequence index and positions).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SuChain {
    width: usize,
    seqs: Vec<u32>,
    positions: Vec<u32>,
    utils: Vec<u64>,
}

impl SuChain {
    pub fn empty(width: usize) -> SuChain {
        SuChain {
            width,
            ..SuChain::default()
        }
    }

    /// A chain from bare utility rows. Every row is treated as a distinct
    /// occurrence.
    pub fn from_rows(rows: &[Vec<u64>]) -> SuChain {
        let width = rows.first().map_or(0, |r| r.len());
        let mut chain = SuChain::empty(width);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), width, "ragged chain rows");
            chain.seqs.push(i as u32);
            chain.positions.extend(0..width as u32);
            chain.utils.extend_from_slice(row);
        }
        chain
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn num_rows(&self) -> usize {
        self.seqs.len()
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.utils[i * self.width..(i + 1) * self.width]
    }

    pub fn row_positions(&self, i: usize) -> &[u32] {
        &self.positions[i * self.width..(i + 1) * self.width]
    }

    /// Index (in database order) of the sequence row `i` occurs in.
    pub fn row_sequence(&self, i: usize) -> usize {
        self.seqs[i] as usize
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u64]> {
        (0..self.num_rows()).map(|i| self.row(i))
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.rows().map(<[u64]>::to_vec).collect()
    }

    /// Sum of every entry.
    pub fn total(&self) -> Utility {
        Utility(self.utils.iter().map(|&u| u128::from(u)).sum())
    }

    /// Sum over rows of the first `k` entries.
    pub fn prefix_sum(&self, k: usize) -> Utility {
        assert!(k <= self.width);
        Utility(
            self.rows()
                .map(|r| r[..k].iter().map(|&u| u128::from(u)).sum::<u128>())
                .sum(),
        )
    }

    /// Plain column sum over all rows.
    pub fn column_sum(&self, j: usize) -> Utility {
        Utility(self.rows().map(|r| u128::from(r[j])).sum())
    }

    /// Row indices holding one representative per distinct projected
    /// occurrence, ordered by projected occurrence.
    fn distinct_rows(&self, cols: &[usize]) -> Vec<usize> {
        let m = self.num_rows();
        if cols.len() == self.width || m <= 1 {
            return (0..m).collect();
        }
        let k = cols.len() + 1;
        let mut keys = Vec::with_capacity(m * k);
        for i in 0..m {
            keys.push(self.seqs[i]);
            let pos = self.row_positions(i);
            keys.extend(cols.iter().map(|&c| pos[c]));
        }
        let key = |i: usize| &keys[i * k..(i + 1) * k];
        let mut order: Vec<usize> = (0..m).collect();
        if !(1..m).all(|i| key(i - 1) <= key(i)) {
            order.sort_by(|&a, &b| key(a).cmp(key(b)));
        }
        order.dedup_by(|b, a| key(*a) == key(*b));
        order
    }

    /// The chain of the sub-pattern at the given (ascending) columns, with
    /// occurrences that collapse onto the same sub-pattern occurrence merged.
    pub fn project(&self, cols: &[usize]) -> SuChain {
        debug_assert!(cols.windows(2).all(|w| w[0] < w[1]));
        let rows = self.distinct_rows(cols);
        let mut out = SuChain::empty(cols.len());
        out.seqs.reserve(rows.len());
        out.positions.reserve(rows.len() * cols.len());
        out.utils.reserve(rows.len() * cols.len());
        for i in rows {
            out.seqs.push(self.seqs[i]);
            let pos = self.row_positions(i);
            let row = self.row(i);
            for &c in cols {
                out.positions.push(pos[c]);
                out.utils.push(row[c]);
            }
        }
        out
    }

    pub fn remove_column(&self, j: usize) -> SuChain {
        let cols: Vec<usize> = (0..self.width).filter(|&c| c != j).collect();
        self.project(&cols)
    }

    pub fn remove_columns(&self, removed: &[usize]) -> SuChain {
        let cols: Vec<usize> = (0..self.width).filter(|c| !removed.contains(c)).collect();
        self.project(&cols)
    }

    /// Sum of the projection onto `cols`: a lower bound of the sub-pattern's
    /// utility whenever this chain holds distinct occurrences of its pattern.
    pub fn lower_bound(&self, cols: &[usize]) -> Utility {
        Utility(
            self.distinct_rows(cols)
                .into_iter()
                .map(|i| {
                    let row = self.row(i);
                    cols.iter().map(|&c| u128::from(row[c])).sum::<u128>()
                })
                .sum(),
        )
    }

    pub fn prefix_lower_bound(&self, k: usize) -> Utility {
        let cols: Vec<usize> = (0..k).collect();
        self.lower_bound(&cols)
    }

    /// Sum of column `j` over distinct occurrences of that element.
    pub fn column_lower_bound(&self, j: usize) -> Utility {
        self.lower_bound(&[j])
    }
}

/// Builds chains over one database. Optionally bypasses the bit index (for
/// cross-checking) and caps the number of embeddings per pattern.
#[derive(Debug, Clone, Copy)]
pub struct ChainBuilder<'a> {
    db: &'a QSequenceDatabase,
    index: &'a BitIndex,
    use_bits: bool,
    embedding_cap: Option<usize>,
}

impl<'a> ChainBuilder<'a> {
    pub fn new(db: &'a QSequenceDatabase, index: &'a BitIndex) -> ChainBuilder<'a> {
        ChainBuilder {
            db,
            index,
            use_bits: true,
            embedding_cap: None,
        }
    }

    pub fn with_bits(mut self, use_bits: bool) -> Self {
        self.use_bits = use_bits;
        self
    }

    pub fn with_embedding_cap(mut self, cap: Option<usize>) -> Self {
        self.embedding_cap = cap;
        self
    }

    pub fn db(&self) -> &'a QSequenceDatabase {
        self.db
    }

    pub fn index(&self) -> &'a BitIndex {
        self.index
    }

    fn visit(&self, pattern: &Pattern, mut f: impl FnMut(usize, &[u32])) -> Result<usize> {
        let mut total = 0usize;
        let seqs = self.db.sequences();
        let mut each = |idx: usize| -> Result<()> {
            let cap = self.embedding_cap.map(|c| c.saturating_sub(total));
            let mut visit = |p: &[u32]| f(idx, p);
            let n = if self.use_bits {
                for_each_embedding(
                    pattern.items(),
                    seqs[idx].len(),
                    self.index.sequence(idx),
                    cap,
                    &mut visit,
                )
            } else {
                for_each_embedding(
                    pattern.items(),
                    seqs[idx].len(),
                    &Scan(&seqs[idx]),
                    cap,
                    &mut visit,
                )
            }
            .map_err(|_| Error::EmbeddingCap {
                limit: self.embedding_cap.unwrap_or_default(),
            })?;
            total += n;
            Ok(())
        };
        if pattern.is_empty() {
            return Ok(0);
        }
        if self.use_bits {
            for idx in self.index.candidate_sequences(pattern) {
                each(idx)?;
            }
        } else {
            for idx in 0..seqs.len() {
                each(idx)?;
            }
        }
        Ok(total)
    }

    /// The pattern's chain over the whole database. Counts one utility
    /// computation.
    pub fn utility_chain(&self, pattern: &Pattern, counter: &UtilityCounter) -> Result<SuChain> {
        counter.increment();
        let mut chain = SuChain::empty(pattern.len());
        self.visit(pattern, |idx, positions| {
            chain.seqs.push(idx as u32);
            chain.positions.extend_from_slice(positions);
            let utils = self.db.item_utilities(idx);
            chain
                .utils
                .extend(positions.iter().map(|&p| utils[p as usize]));
        })?;
        Ok(chain)
    }

    /// Total embedding count (no counter involvement).
    pub fn support(&self, pattern: &Pattern) -> Result<u64> {
        self.visit(pattern, |_, _| {}).map(|n| n as u64)
    }
}

/// `getUtilityChain`: one row per embedding, grouped by sequence order then
/// embedding order. Increments `counter` by one.
pub fn get_utility_chain(
    pattern: &Pattern,
    db: &QSequenceDatabase,
    index: &BitIndex,
    counter: &UtilityCounter,
) -> Result<SuChain> {
    ChainBuilder::new(db, index).utility_chain(pattern, counter)
}

/// Sum of all entries, or of the first `prefix_len` entries of each row.
pub fn compute_utility(chain: &SuChain, prefix_len: Option<usize>) -> Utility {
    match prefix_len {
        Some(k) => chain.prefix_sum(k),
        None => chain.total(),
    }
}

/// Number of embeddings of the pattern across the database.
pub fn support(pattern: &Pattern, db: &QSequenceDatabase, index: &BitIndex) -> u64 {
    ChainBuilder::new(db, index)
        .support(pattern)
        .expect("no cap")
}

/// Greedy left-to-right containment test, linear in `longer`.
pub fn is_subsequence(shorter: &Pattern, longer: &Pattern) -> bool {
    is_subsequence_items(shorter.items(), longer.items())
}

pub fn is_subsequence_items(shorter: &[ItemId], longer: &[ItemId]) -> bool {
    let mut it = longer.iter();
    shorter.iter().all(|x| it.any(|y| y == x))
}
