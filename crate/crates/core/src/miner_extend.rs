//! Extension search: grow patterns from the empty sequence by choosing root
//! positions left to right. At each step the next root position is either
//! skipped or appended to the accumulated prefix; once the prefix's bound
//! within the root chain exceeds the threshold, the prefix and every
//! extension of it are discarded.

use std::collections::HashMap;
use std::rc::Rc;

use crate::error::Result;
use crate::miner_base::LuspResult;
use crate::occurrence::{SuChain, UtilityCounter};
use crate::preprocess::build_in_session;
use crate::seqdb::{ItemId, MiningConfig, Pattern, QSequenceDatabase};
use crate::session::{prepare, MineOptions, NoopObserver, SearchObserver, Session};
use crate::utility::Utility;

/// One node of the extension tree.
///
/// `chain` has one column per accumulated element followed by one per
/// remaining root position (`next..`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendState {
    pub accumulated: Pattern,
    /// Root positions of the accumulated elements.
    pub positions: Vec<u32>,
    pub chain: SuChain,
    /// Next root position to decide on.
    pub next: usize,
}

pub fn mine_extend(db: &QSequenceDatabase, cfg: &MiningConfig) -> Result<LuspResult> {
    mine_extend_with(
        db,
        cfg,
        &MineOptions::default(),
        &UtilityCounter::new(),
        &NoopObserver,
    )
}

pub fn mine_extend_with(
    db: &QSequenceDatabase,
    cfg: &MiningConfig,
    options: &MineOptions,
    counter: &UtilityCounter,
    observer: &dyn SearchObserver,
) -> Result<LuspResult> {
    let prepared = prepare(db, cfg)?;
    let session = Session::new(
        db,
        &prepared.index,
        prepared.threshold,
        cfg.max_len,
        counter,
        observer,
        *options,
    );
    let roots = build_in_session(&session)?;
    let work: Vec<(&Pattern, &SuChain)> = roots.roots.iter().zip(&roots.chains).collect();
    session.for_each(&work, |_, &(root, projected)| {
        let chain = if session.length_ok(root.len()) {
            session
                .evaluate(root)?
                .chain
                .unwrap_or_else(|| projected.clone())
        } else {
            projected.clone()
        };
        extend_root(&session, root, chain)
    })?;
    Ok(session.finish())
}

/// Runs the extension search over `root` with the given chain (one column
/// per root position). Used for tracing individual roots.
pub fn extend_from_root(
    db: &QSequenceDatabase,
    cfg: &MiningConfig,
    root: &Pattern,
    chain: SuChain,
    counter: &UtilityCounter,
    observer: &dyn SearchObserver,
) -> Result<LuspResult> {
    let prepared = prepare(db, cfg)?;
    let session = Session::new(
        db,
        &prepared.index,
        prepared.threshold,
        cfg.max_len,
        counter,
        observer,
        MineOptions::default(),
    );
    extend_root(&session, root, chain)?;
    Ok(session.finish())
}

enum Frame {
    Extend(ExtendState),
    /// Evaluate and possibly record a prefix after its extensions are done.
    Settle(Pattern, Vec<u32>),
}

/// A chain whose columns sit at `positions` of the root. Any subset of
/// those positions has its utility bounded below by the chain's projection.
struct Witness {
    chain: SuChain,
    positions: Vec<u32>,
}

/// Strongest bound known so far for a position subset not yet settled.
struct Pending {
    bound: Utility,
    witness: Rc<Witness>,
}

fn extend_root(session: &Session<'_>, root: &Pattern, chain: SuChain) -> Result<()> {
    let items: &[ItemId] = root.items();
    let mut stack = vec![Frame::Extend(ExtendState {
        accumulated: Pattern::default(),
        positions: Vec::new(),
        chain,
        next: 0,
    })];
    // Every superset of a position set is decided before the set itself is
    // settled, so bounds flow downward from evaluated supersets.
    let mut pending: HashMap<Vec<u32>, Pending> = HashMap::new();
    while let Some(frame) = stack.pop() {
        let state = match frame {
            Frame::Settle(q, positions) => {
                settle(session, &q, positions, &mut pending)?;
                continue;
            }
            Frame::Extend(state) => state,
        };
        let k = state.accumulated.len();
        let next = state.next;
        if next >= items.len() {
            continue;
        }

        // include root position `next`
        let mut acc = state.accumulated.clone();
        acc.0.push(items[next]);
        let mut positions = state.positions.clone();
        positions.push(next as u32);
        session.observer.candidate(root, &positions);
        let bound = state.chain.prefix_lower_bound(k + 1);
        let include = if session.threshold.within(bound) {
            let record = session.length_ok(acc.len());
            let grow = next + 1 < items.len() && session.length_ok(acc.len() + 1);
            Some((acc, positions, record, grow))
        } else {
            session.observer.extension_cut(root, &positions);
            if let Some(p) = pending.remove(&positions) {
                propagate(&positions, &p.witness, &mut pending);
            }
            None
        };

        // skip root position `next`
        if next + 1 < items.len() {
            stack.push(Frame::Extend(ExtendState {
                chain: state.chain.remove_column(k),
                accumulated: state.accumulated,
                positions: state.positions,
                next: next + 1,
            }));
        }

        if let Some((acc, positions, record, grow)) = include {
            if record {
                stack.push(Frame::Settle(acc.clone(), positions.clone()));
            }
            if grow {
                stack.push(Frame::Extend(ExtendState {
                    accumulated: acc,
                    positions,
                    chain: state.chain,
                    next: next + 1,
                }));
            }
        }
    }
    Ok(())
}

fn settle(
    session: &Session<'_>,
    q: &Pattern,
    positions: Vec<u32>,
    pending: &mut HashMap<Vec<u32>, Pending>,
) -> Result<()> {
    let known = pending.remove(&positions);
    let bound = known.as_ref().map_or(Utility::ZERO, |p| p.bound);
    let mut witness = known.map(|p| p.witness);
    if session.threshold.within(bound) {
        let eval = session.evaluate(q)?;
        if session.threshold.within(eval.utility) {
            session.record(q);
        }
        if let Some(chain) = eval.chain {
            witness = Some(Rc::new(Witness {
                chain,
                positions: positions.clone(),
            }));
        }
    } else {
        session.observer.lbs_skip(q, bound);
    }
    if let Some(w) = witness {
        propagate(&positions, &w, pending);
    }
    Ok(())
}

// Offers the witness to every subset of `positions` with one element fewer.
fn propagate(positions: &[u32], witness: &Rc<Witness>, pending: &mut HashMap<Vec<u32>, Pending>) {
    if positions.len() < 2 {
        return;
    }
    let cols: Vec<usize> = positions
        .iter()
        .map(|p| {
            witness
                .positions
                .binary_search(p)
                .expect("witness covers the positions")
        })
        .collect();
    for drop in 0..positions.len() {
        let mut sub_cols = cols.clone();
        sub_cols.remove(drop);
        let bound = witness.chain.lower_bound(&sub_cols);
        let mut sub = positions.to_vec();
        sub.remove(drop);
        match pending.get_mut(&sub) {
            Some(p) if p.bound >= bound => {}
            Some(p) => {
                p.bound = bound;
                p.witness = Rc::clone(witness);
            }
            None => {
                pending.insert(
                    sub,
                    Pending {
                        bound,
                        witness: Rc::clone(witness),
                    },
                );
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, pat};
    use crate::miner_base::mine_baseline;
    use std::collections::HashSet;
    use std::sync::Mutex;

    #[derive(Default)]
    struct Trace {
        candidates: Mutex<Vec<Vec<u32>>>,
        cuts: Mutex<Vec<Vec<u32>>>,
    }

    impl SearchObserver for Trace {
        fn candidate(&self, _root: &Pattern, positions: &[u32]) {
            self.candidates.lock().unwrap().push(positions.to_vec());
        }
        fn extension_cut(&self, _root: &Pattern, positions: &[u32]) {
            self.cuts.lock().unwrap().push(positions.to_vec());
        }
    }

    #[test]
    fn prefix_abc_is_cut() {
        let db = fixtures::table2_unit();
        let trace = Trace::default();
        let counter = UtilityCounter::new();
        let res = extend_from_root(
            &db,
            &MiningConfig::absolute(3, None),
            &pat("abcab"),
            SuChain::from_rows(&[vec![1, 2, 1, 2, 3]]),
            &counter,
            &trace,
        )
        .unwrap();
        let cuts = trace.cuts.lock().unwrap();
        assert!(cuts.contains(&vec![0, 1, 2]));
        let cands = trace.candidates.lock().unwrap();
        assert!(!cands.contains(&vec![0, 1, 2, 3]));
        assert!(!cands.contains(&vec![0, 1, 2, 3, 4]));
        assert!(res.records().iter().all(|r| r.utility <= Utility(3)));
    }

    #[test]
    fn subsets_visited_once() {
        let db = fixtures::table2_unit();
        let trace = Trace::default();
        extend_from_root(
            &db,
            &MiningConfig::absolute(4, None),
            &pat("abcad"),
            SuChain::from_rows(&[vec![1, 2, 1, 2, 3]]),
            &UtilityCounter::new(),
            &trace,
        )
        .unwrap();
        let cands = trace.candidates.lock().unwrap();
        let unique: HashSet<&Vec<u32>> = cands.iter().collect();
        assert_eq!(unique.len(), cands.len());

        // with no cut every one of the 31 subsets appears
        let trace = Trace::default();
        extend_from_root(
            &db,
            &MiningConfig::absolute(1000, None),
            &pat("abcad"),
            SuChain::from_rows(&[vec![1, 2, 1, 2, 3]]),
            &UtilityCounter::new(),
            &trace,
        )
        .unwrap();
        assert_eq!(trace.candidates.lock().unwrap().len(), 31);
    }

    #[test]
    fn single_position_root_terminates() {
        let db = fixtures::table2_unit();
        let res = extend_from_root(
            &db,
            &MiningConfig::absolute(1000, None),
            &pat("g"),
            SuChain::from_rows(&[vec![1]]),
            &UtilityCounter::new(),
            &NoopObserver,
        )
        .unwrap();
        assert_eq!(res.len(), 1);
    }

    #[test]
    fn c_is_found_at_seven() {
        let res = mine_extend(&fixtures::table2(), &MiningConfig::absolute(7, None)).unwrap();
        assert_eq!(res.get(&pat("c")).unwrap().utility, Utility(7));
    }

    #[test]
    fn everything_pruned_gives_empty_result() {
        let res = mine_extend(&fixtures::table2(), &MiningConfig::absolute(0, None)).unwrap();
        assert!(res.is_empty());
    }

    #[test]
    fn matches_baseline_on_table2() {
        for db in [fixtures::table2(), fixtures::table2_unit()] {
            for t in [0u64, 3, 5, 6, 7, 14, 30, 66, 200] {
                for max_len in [None, Some(1), Some(2), Some(3)] {
                    let cfg = MiningConfig::absolute(t, max_len);
                    assert_eq!(
                        mine_extend(&db, &cfg).unwrap(),
                        mine_baseline(&db, &cfg).unwrap(),
                        "minUtil {t} maxLen {max_len:?}"
                    );
                }
            }
        }
    }
}
