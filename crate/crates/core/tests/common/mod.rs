//! Helpers shared by the integration suites: random databases, a naive
//! utility oracle and an observer that force-checks every pruning decision.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Mutex;

use rand::Rng;
use rust_decimal::Decimal;

use luspm::occurrence::enumerate_embeddings;
use luspm::{
    ExternalUtilityTable, ItemId, Pattern, QItem, QSequence, QSequenceDatabase, SearchObserver,
    Threshold, Utility,
};

/// Size limits for random databases.
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_seqs: usize,
    pub max_len: usize,
    pub alphabet: u32,
    pub max_qty: u32,
    pub max_external: u64,
}

pub const SMALL: Shape = Shape {
    max_seqs: 8,
    max_len: 8,
    alphabet: 6,
    max_qty: 4,
    max_external: 4,
};

pub fn random_sequences<R: Rng>(rng: &mut R, shape: Shape) -> Vec<QSequence> {
    let n = rng.gen_range(1..=shape.max_seqs);
    (1..=n)
        .map(|sid| {
            let len = rng.gen_range(1..=shape.max_len);
            QSequence::new(
                sid as u32,
                (0..len)
                    .map(|_| {
                        QItem::new(
                            rng.gen_range(1..=shape.alphabet),
                            rng.gen_range(1..=shape.max_qty),
                        )
                    })
                    .collect(),
            )
        })
        .collect()
}

pub fn random_db<R: Rng>(rng: &mut R, shape: Shape) -> QSequenceDatabase {
    let sequences = random_sequences(rng, shape);
    let table: Vec<(u32, u64)> = (1..=shape.alphabet)
        .map(|i| (i, rng.gen_range(1..=shape.max_external)))
        .collect();
    QSequenceDatabase::new(
        sequences,
        ExternalUtilityTable::from_integers(&table).unwrap(),
    )
    .unwrap()
}

/// Externals with up to two decimal places, e.g. 0.25 or 1.5.
pub fn random_decimal_db<R: Rng>(rng: &mut R, shape: Shape) -> QSequenceDatabase {
    let sequences = random_sequences(rng, shape);
    let table = ExternalUtilityTable::from_values((1..=shape.alphabet).map(|i| {
        let cents = rng.gen_range(1..=shape.max_external * 100);
        (ItemId(i), Decimal::new(cents as i64, 2).normalize())
    }))
    .unwrap();
    QSequenceDatabase::new(sequences, table).unwrap()
}

/// Utility and support from naive embedding enumeration without the bit
/// index. Utility is in the database's scaled units.
pub fn oracle(db: &QSequenceDatabase, pattern: &Pattern) -> (Utility, u64) {
    let mut utility = 0u128;
    let mut support = 0u64;
    for (idx, seq) in db.sequences().iter().enumerate() {
        for emb in enumerate_embeddings(pattern, seq, None) {
            support += 1;
            utility += emb
                .positions
                .iter()
                .map(|&p| u128::from(db.item_utility(idx, p as usize)))
                .sum::<u128>();
        }
    }
    (Utility(utility), support)
}

/// Every subset of `positions` (ascending), including the empty one.
pub fn subsets(positions: &[usize]) -> Vec<Vec<usize>> {
    (0u64..1 << positions.len())
        .map(|mask| {
            positions
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &p)| p)
                .collect()
        })
        .collect()
}

/// A random threshold between 0 and a little above the largest single
/// sequence utility, in the database's own units.
pub fn random_threshold<R: Rng>(rng: &mut R, db: &QSequenceDatabase) -> Decimal {
    let top = db
        .sequences()
        .iter()
        .enumerate()
        .map(|(i, _)| db.item_utilities(i).iter().map(|&u| u as i64).sum::<i64>())
        .max()
        .unwrap_or(1);
    let raw = rng.gen_range(0..=top * 2);
    Decimal::new(raw, db.decimals()).normalize()
}

/// Pruning events seen during a run.
#[derive(Default)]
pub struct Shadow {
    pub skips: Mutex<Vec<Pattern>>,
    pub pruned: Mutex<Vec<(Pattern, usize, Vec<usize>)>>,
    pub cuts: Mutex<Vec<(Pattern, Vec<u32>)>>,
}

impl SearchObserver for Shadow {
    fn lbs_skip(&self, pattern: &Pattern, _bound: Utility) {
        self.skips.lock().unwrap().push(pattern.clone());
    }

    fn items_pruned(&self, state: &Pattern, frozen: usize, pruned: &[usize]) {
        self.pruned
            .lock()
            .unwrap()
            .push((state.clone(), frozen, pruned.to_vec()));
    }

    fn extension_cut(&self, root: &Pattern, accumulated: &[u32]) {
        self.cuts
            .lock()
            .unwrap()
            .push((root.clone(), accumulated.to_vec()));
    }
}

/// Counts of checked events per kind, or the first violation found.
#[derive(Debug, Default, Clone, Copy)]
pub struct ShadowTally {
    pub skips: usize,
    pub pruned_patterns: usize,
    pub cut_patterns: usize,
}

impl Shadow {
    /// Force-evaluates every pattern the search declined to evaluate or
    /// explore and checks its utility exceeds the threshold.
    pub fn verify(
        &self,
        db: &QSequenceDatabase,
        threshold: &Threshold,
    ) -> Result<ShadowTally, String> {
        let mut cache: BTreeMap<Pattern, Utility> = BTreeMap::new();
        let mut utility = |p: &Pattern| *cache.entry(p.clone()).or_insert_with(|| oracle(db, p).0);
        let mut tally = ShadowTally::default();

        for p in self.skips.lock().unwrap().iter() {
            let u = utility(p);
            if threshold.within(u) {
                return Err(format!("skipped {p} has utility {} within threshold", u.0));
            }
            tally.skips += 1;
        }

        // descendants keep the frozen prefix and at least one pruned position
        for (state, frozen, pruned) in self.pruned.lock().unwrap().iter() {
            let free: Vec<usize> = (*frozen..state.len()).collect();
            for subset in subsets(&free) {
                if !subset.iter().any(|q| pruned.contains(q)) {
                    continue;
                }
                let cols: Vec<usize> = (0..*frozen).chain(subset).collect();
                let p = state.select(&cols);
                let u = utility(&p);
                if threshold.within(u) {
                    return Err(format!(
                        "pruning {pruned:?} from {state} (frozen {frozen}) lost {p} at {}",
                        u.0
                    ));
                }
                tally.pruned_patterns += 1;
            }
        }

        // extensions of a cut prefix use only later root positions
        for (root, acc) in self.cuts.lock().unwrap().iter() {
            let last = *acc.last().expect("non-empty prefix") as usize;
            let later: Vec<usize> = (last + 1..root.len()).collect();
            for subset in subsets(&later) {
                let cols: Vec<usize> = acc.iter().map(|&c| c as usize).chain(subset).collect();
                let p = root.select(&cols);
                let u = utility(&p);
                if threshold.within(u) {
                    return Err(format!("cut of {acc:?} in {root} lost {p} at {}", u.0));
                }
                tally.cut_patterns += 1;
            }
        }
        Ok(tally)
    }
}

/// Random (F, S, Q) with S ⊂ Q ⊂ F as position sets of F, all proper and
/// non-empty. `F` is drawn as a subsequence of a database sequence so it
/// occurs.
pub fn random_nested<R: Rng>(
    rng: &mut R,
    db: &QSequenceDatabase,
) -> Option<(Pattern, Vec<usize>, Vec<usize>)> {
    let seq = &db.sequences()[rng.gen_range(0..db.len())];
    if seq.len() < 3 {
        return None;
    }
    let f_len = rng.gen_range(3..=seq.len());
    let mut picks: Vec<usize> = rand::seq::index::sample(rng, seq.len(), f_len).into_vec();
    picks.sort_unstable();
    let f = Pattern(picks.iter().map(|&p| seq.elements[p].item).collect());
    let q_len = rng.gen_range(2..f_len);
    let mut q: Vec<usize> = rand::seq::index::sample(rng, f_len, q_len).into_vec();
    q.sort_unstable();
    let s_len = rng.gen_range(1..q_len);
    let mut s: Vec<usize> = rand::seq::index::sample(rng, q_len, s_len)
        .into_iter()
        .map(|i| q[i])
        .collect();
    s.sort_unstable();
    Some((f, s, q))
}

pub fn item_ids(p: &Pattern) -> Vec<u32> {
    p.items().iter().map(|i| i.0).collect()
}
