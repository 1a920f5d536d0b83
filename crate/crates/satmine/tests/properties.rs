//! Property tests for the database measures.

mod common;

use proptest::prelude::*;
use satmine::dataset::{Itemset, ItemsetDatabase};

fn arb_database() -> impl Strategy<Value = ItemsetDatabase> {
    (1usize..=10, 1usize..=12).prop_flat_map(|(n, m)| {
        proptest::collection::vec(proptest::collection::vec(any::<bool>(), n), m).prop_map(
            move |cells| {
                let labels = (1..=n).map(|i| format!("i{i}")).collect();
                let rows = cells
                    .iter()
                    .map(|row| {
                        Itemset::from_indices(
                            n,
                            row.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i),
                        )
                    })
                    .collect();
                ItemsetDatabase::new(labels, rows)
            },
        )
    })
}

fn mask_itemset(n: usize, mask: u32) -> Itemset {
    Itemset::from_indices(n, (0..n).filter(|&i| (mask >> i) & 1 == 1))
}

proptest! {
    /// Monotonicity: a superset never has larger support.
    #[test]
    fn support_is_antitone_under_inclusion(db in arb_database(), sub in any::<u32>(), add in any::<u32>()) {
        let n = db.num_items();
        let smaller = mask_itemset(n, sub & ((1 << n) - 1));
        let larger = smaller.union(&mask_itemset(n, add & ((1 << n) - 1)));
        prop_assert!(db.support(&larger).unwrap() <= db.support(&smaller).unwrap());
    }

    /// Coverage of a union is the intersection of coverages.
    #[test]
    fn coverage_distributes_over_union(db in arb_database(), a in any::<u32>(), b in any::<u32>()) {
        let n = db.num_items();
        let x = mask_itemset(n, a & ((1 << n) - 1));
        let y = mask_itemset(n, b & ((1 << n) - 1));
        let joint = db.coverage(&x.union(&y)).unwrap();
        let met = db.coverage(&x).unwrap().intersection(&db.coverage(&y).unwrap());
        prop_assert_eq!(joint, met);
    }

    /// Support through coverage equals a direct row scan.
    #[test]
    fn support_matches_direct_row_scan(db in arb_database(), mask in any::<u32>()) {
        let n = db.num_items();
        let set = mask_itemset(n, mask & ((1 << n) - 1));
        let scanned = db
            .rows()
            .iter()
            .filter(|row| set.iter().all(|i| row.contains(i)))
            .count();
        prop_assert_eq!(db.support(&set).unwrap(), scanned);
    }
}
