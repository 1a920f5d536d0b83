//! Blocking constraints added between models.
//!
//! After every found itemset the driver excludes part of the search space by
//! adding clauses over the item variables only (transaction literals would
//! just trigger redundant re-searches of the same itemset). Five shapes are
//! supported:
//!
//! * `simple`: one clause negating exactly the found itemset,
//! * `subsets_explicit`: one simple-negation clause per subset, skipping
//!   subsets already blocked earlier in the run,
//! * `subsets_compact`: the single clause "pick an item outside the found
//!   set",
//! * `supersets_explicit`: one simple-negation clause per superset,
//! * `supersets_compact`: the single clause "drop an item of the found
//!   set" (the found items cannot jointly appear again).
//!
//! Explicit shapes can explode combinatorially; past a configurable clause
//! budget per iteration they fall back to the compact form.

use std::collections::HashSet;

use crate::dataset::Itemset;
use crate::pbsat::{Clause, Lit, Var};

/// Blocking-clause shape.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BlockingKind {
    Simple,
    SubsetsExplicit,
    SubsetsCompact,
    SupersetsExplicit,
    SupersetsCompact,
}

impl BlockingKind {
    /// Kinds that exploit monotonicity (required by the maximal-oriented
    /// searches).
    pub fn is_subsets(self) -> bool {
        matches!(self, BlockingKind::SubsetsExplicit | BlockingKind::SubsetsCompact)
    }

    /// Kinds meaningful for the dual (infrequent-itemset) formulation.
    pub fn is_supersets(self) -> bool {
        matches!(
            self,
            BlockingKind::SupersetsExplicit | BlockingKind::SupersetsCompact
        )
    }
}

/// Result of one blocking step.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum BlockOutcome {
    Clauses(Vec<Clause>),
    /// The blocking clause would be empty: no further model can survive,
    /// enumeration is exhausted.
    Exhausted,
}

/// Stateful blocking-clause factory for one mining run.
///
/// State tracks which subsets were already blocked (explicit modes) so
/// repeated sub-itemsets are not re-inserted.
pub struct Blocker {
    kind: BlockingKind,
    explicit_cap: usize,
    seen: HashSet<Itemset>,
}

/// Default ceiling on explicitly generated clauses per iteration.
pub const DEFAULT_EXPLICIT_CAP: usize = 4096;

impl Blocker {
    pub fn new(kind: BlockingKind) -> Blocker {
        Blocker::with_cap(kind, DEFAULT_EXPLICIT_CAP)
    }

    pub fn with_cap(kind: BlockingKind, explicit_cap: usize) -> Blocker {
        Blocker {
            kind,
            explicit_cap,
            seen: HashSet::new(),
        }
    }

    pub fn kind(&self) -> BlockingKind {
        self.kind
    }

    /// Clauses excluding `found` (and, depending on the kind, its subsets or
    /// supersets) from future models. `item_vars[i]` is the solver variable
    /// of item `i`.
    pub fn block(&mut self, found: &Itemset, item_vars: &[Var]) -> BlockOutcome {
        assert_eq!(found.universe(), item_vars.len());
        match self.kind {
            BlockingKind::Simple => {
                BlockOutcome::Clauses(vec![simple_negation(found, item_vars)])
            }
            BlockingKind::SubsetsExplicit => {
                let count = 1usize.checked_shl(found.len() as u32);
                if count.is_none() || count.unwrap() > self.explicit_cap {
                    log::warn!(
                        "explicit subset blocking of a {}-item set exceeds the \
                         {}-clause budget; falling back to the compact clause",
                        found.len(),
                        self.explicit_cap
                    );
                    return compact_subsets(found, item_vars);
                }
                let mut clauses = Vec::new();
                for subset in subsets_largest_first(found) {
                    if self.seen.insert(subset.clone()) {
                        clauses.push(simple_negation(&subset, item_vars));
                    }
                }
                BlockOutcome::Clauses(clauses)
            }
            BlockingKind::SubsetsCompact => compact_subsets(found, item_vars),
            BlockingKind::SupersetsExplicit => {
                let free = found.universe() - found.len();
                let count = 1usize.checked_shl(free as u32);
                if count.is_none() || count.unwrap() > self.explicit_cap {
                    log::warn!(
                        "explicit superset blocking with {free} free items exceeds \
                         the {}-clause budget; falling back to the compact clause",
                        self.explicit_cap
                    );
                    return compact_supersets(found, item_vars);
                }
                let mut clauses = Vec::new();
                for superset in supersets_smallest_first(found) {
                    if self.seen.insert(superset.clone()) {
                        clauses.push(simple_negation(&superset, item_vars));
                    }
                }
                BlockOutcome::Clauses(clauses)
            }
            BlockingKind::SupersetsCompact => compact_supersets(found, item_vars),
        }
    }
}

/// The full negation of `itemset` restricted to item literals:
/// `(V_{i in set} ~I_i) | (V_{i not in set} I_i)`. Blocks exactly `itemset`.
fn simple_negation(itemset: &Itemset, item_vars: &[Var]) -> Clause {
    let lits: Vec<Lit> = (0..item_vars.len())
        .map(|i| {
            if itemset.contains(i) {
                item_vars[i].neg()
            } else {
                item_vars[i].pos()
            }
        })
        .collect();
    Clause::new(lits)
}

fn compact_subsets(found: &Itemset, item_vars: &[Var]) -> BlockOutcome {
    let lits: Vec<Lit> = (0..item_vars.len())
        .filter(|&i| !found.contains(i))
        .map(|i| item_vars[i].pos())
        .collect();
    if lits.is_empty() {
        BlockOutcome::Exhausted
    } else {
        BlockOutcome::Clauses(vec![Clause::new(lits)])
    }
}

fn compact_supersets(found: &Itemset, item_vars: &[Var]) -> BlockOutcome {
    let lits: Vec<Lit> = found.iter().map(|i| item_vars[i].neg()).collect();
    if lits.is_empty() {
        BlockOutcome::Exhausted
    } else {
        BlockOutcome::Clauses(vec![Clause::new(lits)])
    }
}

/// All subsets of `found`, except the empty set, largest first and
/// lexicographic within a size.
fn subsets_largest_first(found: &Itemset) -> Vec<Itemset> {
    let members: Vec<usize> = found.iter().collect();
    let n = found.universe();
    let mut out: Vec<Itemset> = (1u64..(1 << members.len()))
        .map(|mask| {
            Itemset::from_indices(
                n,
                members
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| (mask >> k) & 1 == 1)
                    .map(|(_, &i)| i),
            )
        })
        .collect();
    out.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    out
}

/// All supersets of `found` within the alphabet, smallest first and
/// lexicographic within a size.
fn supersets_smallest_first(found: &Itemset) -> Vec<Itemset> {
    let free: Vec<usize> = (0..found.universe())
        .filter(|&i| !found.contains(i))
        .collect();
    let mut out: Vec<Itemset> = (0u64..(1 << free.len()))
        .map(|mask| {
            let mut set = found.clone();
            for (k, &i) in free.iter().enumerate() {
                if (mask >> k) & 1 == 1 {
                    set.insert(i);
                }
            }
            set
        })
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abcd_vars() -> Vec<Var> {
        (1..=4).map(Var::from_id).collect()
    }

    fn set(indices: &[usize]) -> Itemset {
        Itemset::from_indices(4, indices.iter().copied())
    }

    fn clause(lits: Vec<Lit>) -> Clause {
        Clause::new(lits)
    }

    #[test]
    fn simple_negation_matches_reference_example() {
        // Alphabet {A,B,C,D}, found {A,C}: (~A | B | ~C | D).
        let vars = abcd_vars();
        let mut blocker = Blocker::new(BlockingKind::Simple);
        let got = blocker.block(&set(&[0, 2]), &vars);
        let want = clause(vec![
            vars[0].neg(),
            vars[1].pos(),
            vars[2].neg(),
            vars[3].pos(),
        ]);
        assert_eq!(got, BlockOutcome::Clauses(vec![want]));
    }

    #[test]
    fn explicit_subsets_match_reference_example() {
        // Found {A,C}: negations of {A,C}, {A}, {C}.
        let vars = abcd_vars();
        let mut blocker = Blocker::new(BlockingKind::SubsetsExplicit);
        let got = blocker.block(&set(&[0, 2]), &vars);
        let want = vec![
            clause(vec![vars[0].neg(), vars[1].pos(), vars[2].neg(), vars[3].pos()]),
            clause(vec![vars[0].neg(), vars[1].pos(), vars[2].pos(), vars[3].pos()]),
            clause(vec![vars[0].pos(), vars[1].pos(), vars[2].neg(), vars[3].pos()]),
        ];
        assert_eq!(got, BlockOutcome::Clauses(want));
    }

    #[test]
    fn compact_subsets_match_reference_example() {
        // Found {A,C}: (B | D).
        let vars = abcd_vars();
        let mut blocker = Blocker::new(BlockingKind::SubsetsCompact);
        let got = blocker.block(&set(&[0, 2]), &vars);
        let want = clause(vec![vars[1].pos(), vars[3].pos()]);
        assert_eq!(got, BlockOutcome::Clauses(vec![want]));
    }

    #[test]
    fn explicit_supersets_match_reference_example() {
        // Found {A,C}: negations of {A,C}, {A,B,C}, {A,C,D}, {A,B,C,D}.
        let vars = abcd_vars();
        let mut blocker = Blocker::new(BlockingKind::SupersetsExplicit);
        let got = blocker.block(&set(&[0, 2]), &vars);
        let want = vec![
            clause(vec![vars[0].neg(), vars[1].pos(), vars[2].neg(), vars[3].pos()]),
            clause(vec![vars[0].neg(), vars[1].neg(), vars[2].neg(), vars[3].pos()]),
            clause(vec![vars[0].neg(), vars[1].pos(), vars[2].neg(), vars[3].neg()]),
            clause(vec![vars[0].neg(), vars[1].neg(), vars[2].neg(), vars[3].neg()]),
        ];
        assert_eq!(got, BlockOutcome::Clauses(want));
    }

    #[test]
    fn compact_supersets_follow_the_rule_not_the_example() {
        // The compact superset clause negates the found items themselves:
        // found {A,C} gives (~A | ~C), which excludes exactly the supersets.
        let vars = abcd_vars();
        let mut blocker = Blocker::new(BlockingKind::SupersetsCompact);
        let got = blocker.block(&set(&[0, 2]), &vars);
        let want = clause(vec![vars[0].neg(), vars[2].neg()]);
        assert_eq!(got, BlockOutcome::Clauses(vec![want]));
    }

    #[test]
    fn exhaustion_signals() {
        let vars = abcd_vars();
        let mut blocker = Blocker::new(BlockingKind::SubsetsCompact);
        assert_eq!(
            blocker.block(&set(&[0, 1, 2, 3]), &vars),
            BlockOutcome::Exhausted
        );
        let mut blocker = Blocker::new(BlockingKind::SupersetsCompact);
        assert_eq!(blocker.block(&set(&[]), &vars), BlockOutcome::Exhausted);
    }

    #[test]
    fn explicit_blocker_skips_already_blocked_subsets() {
        let vars = abcd_vars();
        let mut blocker = Blocker::new(BlockingKind::SubsetsExplicit);
        let first = blocker.block(&set(&[0, 1]), &vars);
        match first {
            BlockOutcome::Clauses(cs) => assert_eq!(cs.len(), 3),
            _ => panic!(),
        }
        // {A} and {B} are blocked already; only {A,C}, {C}, {A? no}.
        let second = blocker.block(&set(&[0, 2]), &vars);
        match second {
            BlockOutcome::Clauses(cs) => assert_eq!(cs.len(), 2), // {A,C}, {C}
            _ => panic!(),
        }
    }

    #[test]
    fn oversized_explicit_blocking_falls_back_to_compact() {
        let n = 8;
        let vars: Vec<Var> = (1..=n as u32).map(Var::from_id).collect();
        let found = Itemset::from_indices(n, 0..6);
        let mut blocker = Blocker::with_cap(BlockingKind::SubsetsExplicit, 16);
        match blocker.block(&found, &vars) {
            BlockOutcome::Clauses(cs) => {
                assert_eq!(cs.len(), 1);
                assert_eq!(cs[0].len(), 2); // items 6 and 7
            }
            _ => panic!(),
        }
    }

    /// Which itemsets over `n` items survive the given clauses. Evaluation
    /// is direct: item variable ids are 1..=n, literal i+1 is true iff item
    /// i is in the candidate set.
    fn survivors(clauses: &[Clause], n: usize) -> Vec<Itemset> {
        let mut out = Vec::new();
        for mask in 0u64..(1 << n) {
            let set = Itemset::from_indices(n, (0..n).filter(|&i| (mask >> i) & 1 == 1));
            let ok = clauses.iter().all(|c| {
                c.lits()
                    .iter()
                    .any(|&l| set.contains(l.var().index()) != l.is_negated())
            });
            if ok {
                out.push(set);
            }
        }
        out
    }

    #[test]
    fn compact_subsets_block_exactly_the_subsets() {
        for n in 1..=6 {
            let vars: Vec<Var> = (1..=n as u32).map(Var::from_id).collect();
            for mask in 0u64..(1 << n) {
                let found =
                    Itemset::from_indices(n, (0..n).filter(|&i| (mask >> i) & 1 == 1));
                let mut blocker = Blocker::new(BlockingKind::SubsetsCompact);
                let clauses = match blocker.block(&found, &vars) {
                    BlockOutcome::Clauses(cs) => cs,
                    BlockOutcome::Exhausted => continue,
                };
                let alive = survivors(&clauses, n);
                for survivor in &alive {
                    assert!(
                        !survivor.is_subset(&found),
                        "n={n}: {survivor:?} is a subset of {found:?} but survived"
                    );
                }
                assert_eq!(alive.len(), (1usize << n) - (1usize << found.len()));
            }
        }
    }

    #[test]
    fn compact_supersets_block_exactly_the_supersets() {
        for n in 1..=6 {
            let vars: Vec<Var> = (1..=n as u32).map(Var::from_id).collect();
            for mask in 1u64..(1 << n) {
                let found =
                    Itemset::from_indices(n, (0..n).filter(|&i| (mask >> i) & 1 == 1));
                let mut blocker = Blocker::new(BlockingKind::SupersetsCompact);
                let clauses = match blocker.block(&found, &vars) {
                    BlockOutcome::Clauses(cs) => cs,
                    BlockOutcome::Exhausted => continue,
                };
                let alive = survivors(&clauses, n);
                for survivor in &alive {
                    assert!(
                        !found.is_subset(survivor),
                        "n={n}: {survivor:?} is a superset of {found:?} but survived"
                    );
                }
                let free = n - found.len();
                assert_eq!(alive.len(), (1 << n) - (1 << free));
            }
        }
    }

    #[test]
    fn simple_blocks_exactly_the_found_itemset() {
        let n = 5;
        let vars: Vec<Var> = (1..=n as u32).map(Var::from_id).collect();
        let found = Itemset::from_indices(n, [1, 3]);
        let mut blocker = Blocker::new(BlockingKind::Simple);
        let clauses = match blocker.block(&found, &vars) {
            BlockOutcome::Clauses(cs) => cs,
            _ => panic!(),
        };
        let alive = survivors(&clauses, n);
        assert_eq!(alive.len(), (1 << n) - 1);
        assert!(!alive.contains(&found));
    }
}
