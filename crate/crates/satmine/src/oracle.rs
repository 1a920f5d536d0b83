//! Brute-force reference mining used to verify the solver-based pipeline.
//!
//! Nothing here touches the solver: supports come from direct row scans, so
//! this module can serve as ground truth for everything else.

use std::collections::BTreeMap;
use std::fmt;

use crate::dataset::{Itemset, ItemsetDatabase};
use crate::search::MiningOutcome;

/// All frequent itemsets at a threshold, with their supports.
///
/// Downward closed by construction: every non-empty subset of an entry is an
/// entry.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FrequentCollection {
    entries: BTreeMap<Itemset, usize>,
    theta: usize,
}

impl FrequentCollection {
    pub fn theta(&self) -> usize {
        self.theta
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, itemset: &Itemset) -> bool {
        self.entries.contains_key(itemset)
    }

    pub fn support_of(&self, itemset: &Itemset) -> Option<usize> {
        self.entries.get(itemset).copied()
    }

    /// Entries in deterministic (lexicographic) order.
    pub fn iter(&self) -> impl Iterator<Item = (&Itemset, usize)> {
        self.entries.iter().map(|(s, &c)| (s, c))
    }

    pub fn entries(&self) -> &BTreeMap<Itemset, usize> {
        &self.entries
    }
}

/// Levelwise mining: candidates of size k+1 come from joining frequent
/// k-itemsets sharing a (k-1)-prefix, pruned by the monotonicity of support.
///
/// The empty itemset is always frequent and never reported.
pub fn apriori(db: &ItemsetDatabase, theta: usize) -> FrequentCollection {
    assert!(
        theta >= 1 && theta <= db.num_transactions(),
        "theta must lie in 1..=m"
    );
    let n = db.num_items();
    let mut entries = BTreeMap::new();

    // Level 1.
    let mut level: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let set = Itemset::from_indices(n, [i]);
        let support = db.support(&set).unwrap();
        if support >= theta {
            entries.insert(set, support);
            level.push(vec![i]);
        }
    }

    while !level.is_empty() {
        let mut next: Vec<Vec<usize>> = Vec::new();
        for a in 0..level.len() {
            for b in (a + 1)..level.len() {
                let (left, right) = (&level[a], &level[b]);
                if left[..left.len() - 1] != right[..right.len() - 1] {
                    // Lists are sorted, so once prefixes diverge no later
                    // right partner matches either.
                    break;
                }
                let mut candidate = left.clone();
                candidate.push(*right.last().unwrap());
                if !all_subsets_frequent(&candidate, &entries, n) {
                    continue;
                }
                let set = Itemset::from_indices(n, candidate.iter().copied());
                let support = db.support(&set).unwrap();
                if support >= theta {
                    entries.insert(set, support);
                    next.push(candidate);
                }
            }
        }
        level = next;
    }
    FrequentCollection { entries, theta }
}

fn all_subsets_frequent(
    candidate: &[usize],
    entries: &BTreeMap<Itemset, usize>,
    n: usize,
) -> bool {
    if candidate.len() <= 1 {
        return true;
    }
    (0..candidate.len()).all(|drop| {
        let subset = Itemset::from_indices(
            n,
            candidate
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != drop)
                .map(|(_, &i)| i),
        );
        entries.contains_key(&subset)
    })
}

/// Second independent oracle: scans every non-empty itemset of the lattice.
/// Only sensible for small alphabets (n <= 20).
pub fn lattice_scan(db: &ItemsetDatabase, theta: usize) -> FrequentCollection {
    assert!(
        theta >= 1 && theta <= db.num_transactions(),
        "theta must lie in 1..=m"
    );
    let n = db.num_items();
    assert!(n <= 20, "full lattice scan is limited to 20 items");
    let mut entries = BTreeMap::new();
    for mask in 1u64..(1 << n) {
        let set = Itemset::from_indices(n, (0..n).filter(|&i| (mask >> i) & 1 == 1));
        let support = db.support(&set).unwrap();
        if support >= theta {
            entries.insert(set, support);
        }
    }
    FrequentCollection { entries, theta }
}

/// Entries of the collection with no strict superset in the collection:
/// the top border between frequent and infrequent itemsets.
pub fn maximal(collection: &FrequentCollection) -> Vec<Itemset> {
    let sets: Vec<&Itemset> = collection.entries.keys().collect();
    sets.iter()
        .filter(|&&s| {
            !sets
                .iter()
                .any(|&other| s.len() < other.len() && s.is_subset(other))
        })
        .map(|&s| s.clone())
        .collect()
}

/// Outcome of comparing a mining run against the reference.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum VerifyReport {
    Equal,
    Diff {
        /// Frequent itemsets missed by the run (with reference supports).
        missing: Vec<(Itemset, usize)>,
        /// Itemsets reported (or implied) by the run that are not frequent.
        extra: Vec<(Itemset, usize)>,
        /// Itemsets with disagreeing supports: (itemset, run, reference).
        support_mismatches: Vec<(Itemset, usize, usize)>,
    },
}

impl VerifyReport {
    pub fn is_equal(&self) -> bool {
        matches!(self, VerifyReport::Equal)
    }

    /// Human-readable report with item labels resolved against `db`.
    pub fn render(&self, db: &ItemsetDatabase) -> String {
        use std::fmt::Write;
        let name = |s: &Itemset| {
            let labels: Vec<&str> = s.iter().map(|i| db.item_label(i)).collect();
            format!("{{{}}}", labels.join(" "))
        };
        match self {
            VerifyReport::Equal => "equal\n".to_string(),
            VerifyReport::Diff {
                missing,
                extra,
                support_mismatches,
            } => {
                let mut out = String::new();
                for (s, sup) in missing {
                    let _ = writeln!(out, "missing {} (support {sup})", name(s));
                }
                for (s, sup) in extra {
                    let _ = writeln!(out, "extra {} (support {sup})", name(s));
                }
                for (s, got, want) in support_mismatches {
                    let _ = writeln!(
                        out,
                        "support mismatch {}: run says {got}, reference says {want}",
                        name(s)
                    );
                }
                out
            }
        }
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyReport::Equal => write!(f, "equal"),
            VerifyReport::Diff {
                missing,
                extra,
                support_mismatches,
            } => write!(
                f,
                "diff: {} missing, {} extra, {} support mismatches",
                missing.len(),
                extra.len(),
                support_mismatches.len()
            ),
        }
    }
}

/// Compares the downward closure of a mining outcome against [`apriori`].
///
/// Supports recorded in the outcome are trusted as-is; subsets added by the
/// closure are annotated from the database.
pub fn verify(outcome: &MiningOutcome, db: &ItemsetDatabase, theta: usize) -> VerifyReport {
    let n = db.num_items();
    let mut closure: BTreeMap<Itemset, usize> = BTreeMap::new();
    for (set, support) in &outcome.found {
        closure.insert(set.clone(), *support);
    }
    for (set, _) in &outcome.found {
        let members: Vec<usize> = set.iter().collect();
        assert!(members.len() <= 24, "closure expansion is a desk-scale tool");
        for mask in 1u64..(1 << members.len()) {
            let subset = Itemset::from_indices(
                n,
                members
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| (mask >> k) & 1 == 1)
                    .map(|(_, &i)| i),
            );
            closure
                .entry(subset.clone())
                .or_insert_with(|| db.support(&subset).unwrap());
        }
    }

    let reference = apriori(db, theta);
    let mut missing = Vec::new();
    let mut extra = Vec::new();
    let mut support_mismatches = Vec::new();
    for (set, sup) in reference.iter() {
        match closure.get(set) {
            None => missing.push((set.clone(), sup)),
            Some(&got) if got != sup => support_mismatches.push((set.clone(), got, sup)),
            Some(_) => {}
        }
    }
    for (set, &sup) in &closure {
        if !reference.contains(set) {
            extra.push((set.clone(), sup));
        }
    }
    if missing.is_empty() && extra.is_empty() && support_mismatches.is_empty() {
        VerifyReport::Equal
    } else {
        VerifyReport::Diff {
            missing,
            extra,
            support_mismatches,
        }
    }
}
