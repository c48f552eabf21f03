//! Item pruning by column utility, then reduction of the database's
//! sequences to an antichain under the subsequence relation. The surviving
//! patterns are the roots both pruned miners search from.

use std::collections::{HashMap, HashSet};

use crate::error::Result;
use crate::occurrence::{is_subsequence, BitIndex, SuChain, UtilityCounter};
use crate::seqdb::{Pattern, QSequenceDatabase};
use crate::session::{MineOptions, NoopObserver, Session};
use crate::utility::Threshold;

/// Roots of the search forest: no root is a subsequence of another, and
/// every pruned database sequence is a subsequence of some root.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MaxNonConSeqSet {
    pub roots: Vec<Pattern>,
    /// For each root, the chain of its source sequence restricted to the
    /// surviving positions.
    pub chains: Vec<SuChain>,
    /// For each root, the sid of the database sequence it came from.
    pub sources: Vec<u32>,
}

impl MaxNonConSeqSet {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

/// Removes every position whose column utility exceeds the threshold. Each
/// column of the original chain is judged once. Column sums count each
/// occurrence of the element once even when several rows share it.
pub fn eups_prune(pattern: &Pattern, chain: &SuChain, min_util: &Threshold) -> (Pattern, SuChain) {
    let removed: Vec<usize> = (0..pattern.len())
        .filter(|&j| !min_util.within(chain.column_lower_bound(j)))
        .collect();
    if removed.is_empty() {
        return (pattern.clone(), chain.clone());
    }
    let kept: Vec<usize> = (0..pattern.len())
        .filter(|j| !removed.contains(j))
        .collect();
    (pattern.select(&kept), chain.project(&kept))
}

pub fn build_max_non_con_seq_set(
    db: &QSequenceDatabase,
    index: &BitIndex,
    min_util: Threshold,
    counter: &UtilityCounter,
) -> Result<MaxNonConSeqSet> {
    let session = Session::new(
        db,
        index,
        min_util,
        None,
        counter,
        &NoopObserver,
        MineOptions::default(),
    );
    build_in_session(&session)
}

pub(crate) fn build_in_session(session: &Session<'_>) -> Result<MaxNonConSeqSet> {
    let db = session.builder.db();
    let mut chains: HashMap<Pattern, SuChain> = HashMap::new();
    let mut seen: HashSet<Pattern> = HashSet::new();
    let mut pruned: Vec<(Pattern, SuChain, u32)> = Vec::new();

    for seq in db.sequences() {
        let pattern = seq.pattern();
        if !chains.contains_key(&pattern) {
            let chain = session.builder.utility_chain(&pattern, session.counter)?;
            session.remember(&pattern, &chain);
            chains.insert(pattern.clone(), chain);
        }
        let (root, chain) = eups_prune(&pattern, &chains[&pattern], &session.threshold);
        if root.is_empty() || !seen.insert(root.clone()) {
            continue;
        }
        pruned.push((root, chain, seq.sid));
    }

    // drop every pattern contained in a longer survivor
    let mut by_len: Vec<usize> = (0..pruned.len()).collect();
    by_len.sort_by_key(|&i| std::cmp::Reverse(pruned[i].0.len()));
    let mut keep = vec![true; pruned.len()];
    for (rank, &i) in by_len.iter().enumerate() {
        let contained = by_len[..rank].iter().any(|&j| {
            keep[j]
                && pruned[j].0.len() > pruned[i].0.len()
                && is_subsequence(&pruned[i].0, &pruned[j].0)
        });
        if contained {
            keep[i] = false;
        }
    }

    let mut set = MaxNonConSeqSet::default();
    for ((root, chain, sid), keep) in pruned.into_iter().zip(keep) {
        if keep {
            set.roots.push(root);
            set.chains.push(chain);
            set.sources.push(sid);
        }
    }
    Ok(set)
}
