//! Shrinkage search: start from each root and generate subsequences by
//! deleting positions left to right. Positions before the removed-index are
//! frozen, so every position subset of a root is generated at most once per
//! traversal.
//!
//! Two kinds of states exist. A *low* state's pattern is known to satisfy
//! the threshold; its children are evaluated directly. A *depth* state's
//! pattern is not (or not known to be); it carries a chain of distinct
//! occurrences inherited from an ancestor, which yields lower bounds:
//!
//! * a child whose inherited chain already sums above the threshold is not
//!   evaluated at all;
//! * a position whose frozen-prefix-plus-itself bound exceeds the threshold
//!   is deleted from the state, since no descendant keeping it can qualify.

use std::rc::Rc;

use crate::error::Result;
use crate::miner_base::LuspResult;
use crate::occurrence::{SuChain, UtilityCounter};
use crate::preprocess::build_in_session;
use crate::seqdb::{MiningConfig, Pattern, QSequenceDatabase};
use crate::session::{prepare, MineOptions, NoopObserver, SearchObserver, Session};
use crate::utility::{Threshold, Utility};

/// A pattern in the shrinkage tree together with the chain it inherited
/// and its removed-index: positions `< removed_index` are frozen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShrinkState {
    pub pattern: Pattern,
    pub chain: SuChain,
    pub removed_index: usize,
}

/// Which shrinkage procedure handles a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// The pattern's utility is within the threshold.
    Low,
    /// The pattern's utility exceeds the threshold (or is unknown).
    Depth,
}

/// Lower bound for prune: the bound of the frozen prefix extended by
/// position `q`.
pub fn lbp(chain: &SuChain, removed_index: usize, q: usize) -> Utility {
    let mut cols: Vec<usize> = (0..removed_index).collect();
    cols.push(q);
    chain.lower_bound(&cols)
}

/// Deletes every position `>= removed_index` whose bound exceeds the
/// threshold from the pattern and the chain. Returns the deleted positions
/// (indices into the pattern before deletion).
pub fn prune_item(state: &mut ShrinkState, min_util: &Threshold) -> Vec<usize> {
    let p = state.removed_index;
    let pruned: Vec<usize> = (p..state.pattern.len())
        .filter(|&q| !min_util.within(lbp(&state.chain, p, q)))
        .collect();
    if !pruned.is_empty() {
        let kept: Vec<usize> = (0..state.pattern.len())
            .filter(|q| !pruned.contains(q))
            .collect();
        state.pattern = state.pattern.select(&kept);
        state.chain = state.chain.project(&kept);
    }
    pruned
}

pub fn mine_shrink(db: &QSequenceDatabase, cfg: &MiningConfig) -> Result<LuspResult> {
    mine_shrink_with(
        db,
        cfg,
        &MineOptions::default(),
        &UtilityCounter::new(),
        &NoopObserver,
    )
}

pub fn mine_shrink_with(
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
    session.for_each(&work, |_, &(root, chain)| mine_root(&session, root, chain))?;
    Ok(session.finish())
}

/// Runs the shrinkage search from an arbitrary state, treating its pattern
/// as the root. Used for tracing and for checking individual steps.
pub fn shrink_from_state(
    db: &QSequenceDatabase,
    cfg: &MiningConfig,
    state: ShrinkState,
    branch: Branch,
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
    let origin: Vec<u32> = (0..state.pattern.len() as u32).collect();
    let mut search = Search::new(&session, state.pattern.clone());
    search.push(
        branch,
        state.pattern,
        origin,
        Rc::new(state.chain),
        state.removed_index,
    );
    search.run()?;
    Ok(session.finish())
}

fn mine_root(session: &Session<'_>, root: &Pattern, projected: &SuChain) -> Result<()> {
    let origin: Vec<u32> = (0..root.len() as u32).collect();
    session.observer.candidate(root, &origin);
    let mut search = Search::new(session, root.clone());
    if session.length_ok(root.len()) {
        let eval = session.evaluate(root)?;
        let chain = Rc::new(eval.chain.unwrap_or_else(|| projected.clone()));
        if session.threshold.within(eval.utility) {
            session.record(root);
            search.push(Branch::Low, root.clone(), origin.clone(), chain.clone(), 0);
        }
        // the depth pass runs for every root, low or not
        search.push(Branch::Depth, root.clone(), origin, chain, 0);
    } else {
        search.push(
            Branch::Depth,
            root.clone(),
            origin,
            Rc::new(projected.clone()),
            0,
        );
    }
    search.run()
}

struct Frame {
    branch: Branch,
    pattern: Pattern,
    /// Root position of each pattern element.
    origin: Vec<u32>,
    chain: Rc<SuChain>,
    p: usize,
}

struct Search<'s, 'a> {
    session: &'s Session<'a>,
    root: Pattern,
    stack: Vec<Frame>,
}

impl<'s, 'a> Search<'s, 'a> {
    fn new(session: &'s Session<'a>, root: Pattern) -> Self {
        Search {
            session,
            root,
            stack: Vec::new(),
        }
    }

    fn push(
        &mut self,
        branch: Branch,
        pattern: Pattern,
        origin: Vec<u32>,
        chain: Rc<SuChain>,
        p: usize,
    ) {
        if p < pattern.len() {
            self.stack.push(Frame {
                branch,
                pattern,
                origin,
                chain,
                p,
            });
        }
    }

    fn run(&mut self) -> Result<()> {
        while let Some(frame) = self.stack.pop() {
            match frame.branch {
                Branch::Low => self.low(frame)?,
                Branch::Depth => self.depth(frame)?,
            }
        }
        Ok(())
    }

    // Every child is evaluated directly.
    fn low(&mut self, f: Frame) -> Result<()> {
        for i in f.p..f.pattern.len() {
            let q = f.pattern.without(i);
            if q.is_empty() {
                continue;
            }
            let origin = without(&f.origin, i);
            self.session.observer.candidate(&self.root, &origin);
            if !self.session.length_ok(q.len()) {
                let inherited = Rc::new(f.chain.remove_column(i));
                self.push(Branch::Depth, q, origin, inherited, i);
                continue;
            }
            let eval = self.session.evaluate(&q)?;
            let chain = Rc::new(eval.chain.unwrap_or_else(|| f.chain.remove_column(i)));
            if self.session.threshold.within(eval.utility) {
                self.session.record(&q);
                self.push(Branch::Low, q, origin, chain, i);
            } else {
                self.push(Branch::Depth, q, origin, chain, i);
            }
        }
        Ok(())
    }

    fn depth(&mut self, f: Frame) -> Result<()> {
        let mut state = ShrinkState {
            pattern: f.pattern,
            chain: (*f.chain).clone(),
            removed_index: f.p,
        };
        let before = state.pattern.clone();
        let pruned = prune_item(&mut state, &self.session.threshold);
        if !pruned.is_empty() {
            self.session.observer.items_pruned(&before, f.p, &pruned);
            // only descendants without any pruned position can qualify; the
            // pruned pattern itself is the first of them
            let kept: Vec<u32> = f
                .origin
                .iter()
                .enumerate()
                .filter(|(i, _)| !pruned.contains(i))
                .map(|(_, &o)| o)
                .collect();
            if !state.pattern.is_empty() {
                self.candidate(state.pattern, kept, state.chain, f.p)?;
            }
            return Ok(());
        }

        let chain = f.chain;
        let p = f.p;
        if p + 1 < state.pattern.len() {
            self.push(
                Branch::Depth,
                state.pattern.clone(),
                f.origin.clone(),
                chain.clone(),
                p + 1,
            );
        }
        let q = state.pattern.without(p);
        if !q.is_empty() {
            let inherited = chain.remove_column(p);
            self.candidate(q, without(&f.origin, p), inherited, p)?;
        }
        Ok(())
    }

    // A pattern generated below a depth state: gate on the inherited bound,
    // then evaluate.
    fn candidate(
        &mut self,
        q: Pattern,
        origin: Vec<u32>,
        inherited: SuChain,
        p: usize,
    ) -> Result<()> {
        self.session.observer.candidate(&self.root, &origin);
        if !self.session.length_ok(q.len()) {
            self.push(Branch::Depth, q, origin, Rc::new(inherited), p);
            return Ok(());
        }
        let bound = inherited.total();
        if !self.session.threshold.within(bound) {
            self.session.observer.lbs_skip(&q, bound);
            self.push(Branch::Depth, q, origin, Rc::new(inherited), p);
            return Ok(());
        }
        let eval = self.session.evaluate(&q)?;
        let chain = Rc::new(eval.chain.unwrap_or(inherited));
        if self.session.threshold.within(eval.utility) {
            self.session.record(&q);
            self.push(Branch::Low, q, origin, chain, p);
        } else {
            self.push(Branch::Depth, q, origin, chain, p);
        }
        Ok(())
    }
}

fn without(v: &[u32], i: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(v.len().saturating_sub(1));
    out.extend_from_slice(&v[..i]);
    out.extend_from_slice(&v[i + 1..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, pat};
    use crate::miner_base::mine_baseline;
    use crate::occurrence::{build_bit_index, get_utility_chain};
    use rust_decimal::Decimal;
    use std::sync::Mutex;

    #[derive(Default)]
    struct Trace {
        candidates: Mutex<Vec<Vec<u32>>>,
        skips: Mutex<Vec<(Pattern, Utility)>>,
    }

    impl SearchObserver for Trace {
        fn candidate(&self, _root: &Pattern, positions: &[u32]) {
            self.candidates.lock().unwrap().push(positions.to_vec());
        }
        fn lbs_skip(&self, pattern: &Pattern, bound: Utility) {
            self.skips.lock().unwrap().push((pattern.clone(), bound));
        }
    }

    fn threshold(v: u64) -> Threshold {
        Threshold::new(Decimal::from(v), 0)
    }

    #[test]
    fn lbp_examples() {
        // <a,b,c,a,b,d> with chain <1,2,1,2,3,3>, c removed: prefix <a,b>
        let chain = SuChain::from_rows(&[vec![1, 2, 2, 3, 3]]);
        assert_eq!(lbp(&chain, 2, 2), Utility(5));
    }

    #[test]
    fn prune_item_examples() {
        let mut state = ShrinkState {
            pattern: pat("abcab"),
            chain: SuChain::from_rows(&[vec![1, 2, 1, 2, 3]]),
            removed_index: 2,
        };
        let pruned = prune_item(&mut state, &threshold(4));
        assert_eq!(pruned, vec![3, 4]);
        assert_eq!(state.pattern, pat("abc"));
        assert_eq!(state.chain.to_rows(), vec![vec![1, 2, 1]]);

        // p = 0 reduces to the plain column test
        let mut state = ShrinkState {
            pattern: pat("abc"),
            chain: SuChain::from_rows(&[vec![1, 2, 1], vec![1, 2, 2]]),
            removed_index: 0,
        };
        assert_eq!(prune_item(&mut state, &threshold(3)), vec![1]);
        assert_eq!(state.pattern, pat("ac"));

        let mut state = ShrinkState {
            pattern: pat("abc"),
            chain: SuChain::from_rows(&[vec![1, 2, 1], vec![1, 2, 2]]),
            removed_index: 1,
        };
        assert!(prune_item(&mut state, &threshold(9)).is_empty());
        assert_eq!(state.pattern, pat("abc"));
    }

    #[test]
    fn depth_skips_bc_and_rejects_ab() {
        let db = fixtures::table2_unit();
        let index = build_bit_index(&db);
        let chain = get_utility_chain(&pat("abc"), &db, &index, &UtilityCounter::new()).unwrap();
        let trace = Trace::default();
        let counter = UtilityCounter::new();
        let res = shrink_from_state(
            &db,
            &MiningConfig::absolute(6, None),
            ShrinkState {
                pattern: pat("abc"),
                chain,
                removed_index: 0,
            },
            Branch::Depth,
            &counter,
            &trace,
        )
        .unwrap();
        let skips = trace.skips.lock().unwrap();
        assert!(skips.contains(&(pat("bc"), Utility(7))));
        assert!(!res.contains(&pat("ab")));
        assert!(!res.contains(&pat("bc")));
        // <a,b> passed the bound (6) and was evaluated at 30
        let base = mine_baseline(&db, &MiningConfig::absolute(1000, None)).unwrap();
        assert_eq!(base.get(&pat("ab")).unwrap().utility, Utility(30));
        assert!(!skips.iter().any(|(p, _)| *p == pat("ab")));
    }

    #[test]
    fn removal_at_last_position_is_a_leaf() {
        let db = fixtures::table2_unit();
        let counter = UtilityCounter::new();
        let res = shrink_from_state(
            &db,
            &MiningConfig::absolute(100, None),
            ShrinkState {
                pattern: pat("a"),
                chain: SuChain::from_rows(&[vec![1]]),
                removed_index: 0,
            },
            Branch::Low,
            &counter,
            &NoopObserver,
        )
        .unwrap();
        assert!(res.is_empty());
        assert_eq!(counter.get(), 0);

        let res = shrink_from_state(
            &db,
            &MiningConfig::absolute(100, None),
            ShrinkState {
                pattern: pat("ab"),
                chain: SuChain::from_rows(&[vec![1, 2]]),
                removed_index: 2,
            },
            Branch::Depth,
            &counter,
            &NoopObserver,
        )
        .unwrap();
        assert!(res.is_empty());
        assert_eq!(counter.get(), 0);
    }

    #[test]
    fn root_children_remove_each_position() {
        // with a generous threshold nothing is pruned and the first level
        // of the tree under <a,b,c,a,d> removes each of the five positions
        let db = fixtures::table2_unit();
        let trace = Trace::default();
        shrink_from_state(
            &db,
            &MiningConfig::absolute(1000, None),
            ShrinkState {
                pattern: pat("abcad"),
                chain: SuChain::from_rows(&[vec![1, 2, 1, 2, 3]]),
                removed_index: 0,
            },
            Branch::Low,
            &UtilityCounter::new(),
            &trace,
        )
        .unwrap();
        let cands = trace.candidates.lock().unwrap();
        let mut children: Vec<Vec<u32>> = cands.iter().filter(|c| c.len() == 4).cloned().collect();
        children.sort();
        let mut expected: Vec<Vec<u32>> = (0..5)
            .map(|i| (0..5).filter(|&j| j != i).collect())
            .collect();
        expected.sort();
        assert_eq!(children, expected);
        // a low traversal visits every non-empty proper subset exactly once
        let mut all = cands.clone();
        all.sort();
        let before = all.len();
        all.dedup();
        assert_eq!(before, all.len());
        assert_eq!(all.len(), 30);
    }

    #[test]
    fn matches_baseline_on_table2() {
        for db in [fixtures::table2(), fixtures::table2_unit()] {
            for t in [0u64, 3, 5, 6, 7, 14, 30, 66, 200] {
                for max_len in [None, Some(1), Some(2), Some(3)] {
                    let cfg = MiningConfig::absolute(t, max_len);
                    assert_eq!(
                        mine_shrink(&db, &cfg).unwrap(),
                        mine_baseline(&db, &cfg).unwrap(),
                        "minUtil {t} maxLen {max_len:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn nothing_below_threshold() {
        let db = fixtures::table2();
        // every single item's utility exceeds 1
        let res = mine_shrink(&db, &MiningConfig::absolute(1, None)).unwrap();
        assert!(res.is_empty());
    }
}
