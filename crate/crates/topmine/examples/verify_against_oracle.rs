//! Cross-check both miners against the exhaustive reference on a small
//! random dataset.
//!
//! ```text
//! cargo run --example verify_against_oracle -- [SEED]
//! ```

use std::collections::BTreeSet;

use topmine::dataset::{generate_synthetic, ItemId, Support, TransactionDataset};
use topmine::nmost::{mine_nmost, NMostConfig};
use topmine::oracle;
use topmine::topk::{mine_topk, TopKConfig};

type Canon = BTreeSet<(Vec<u32>, Support)>;

fn canon_mined(sets: &[topmine::Itemset]) -> Canon {
    sets.iter()
        .map(|s| (s.labels.iter().map(|l| l.0).collect(), s.support))
        .collect()
}

fn canon_ref(ds: &TransactionDataset, entries: &[(Vec<ItemId>, Support)]) -> Canon {
    entries
        .iter()
        .map(|(items, s)| {
            let mut labels: Vec<u32> = items.iter().map(|&i| ds.label(i).0).collect();
            labels.sort_unstable();
            (labels, *s)
        })
        .collect()
}

fn main() {
    let seed: u64 = std::env::args()
        .nth(1)
        .map(|v| v.parse().expect("seed"))
        .unwrap_or(7);
    let ds = generate_synthetic(10, 48, 0.35, seed);
    println!(
        "seed {seed}: {} transactions over {} items",
        ds.num_transactions(),
        ds.num_items()
    );

    let (n, kmax) = (3, 4);
    let (mined, _) = mine_nmost(&ds, &NMostConfig::new(n, kmax));
    let reference = oracle::oracle_nmost(&ds, n, kmax).expect("within the oracle guard");
    for k in 1..=kmax {
        assert_eq!(
            canon_mined(&mined.lengths[k - 1]),
            canon_ref(&ds, &reference[k - 1]),
            "length {k} drifted from the reference"
        );
    }
    println!("nmost n={n} kmax={kmax}: {} itemsets match the reference", mined.total());

    let (k, min_l) = (5, 2);
    let (mined, _) = mine_topk(&ds, &TopKConfig::new(k, min_l));
    let reference = oracle::oracle_topk(&ds, k, min_l).expect("within the oracle guard");
    assert_eq!(canon_mined(&mined.itemsets), canon_ref(&ds, &reference));
    for set in &mined.itemsets {
        let mut ids: Vec<ItemId> = set
            .labels
            .iter()
            .map(|l| ItemId(ds.labels().iter().position(|x| x == l).unwrap() as u32))
            .collect();
        ids.sort_unstable();
        assert!(oracle::audit_closed(&ds, &ids, set.support));
    }
    println!("topk k={k} min_l={min_l}: {} closed itemsets match and audit clean", mined.itemsets.len());
}
