//! Mine the K most frequent closed itemsets with a minimum length.
//!
//! ```text
//! cargo run --example mine_topk -- [PATH] [K] [MIN_L]
//! ```
//!
//! A closed itemset has no superset occurring in exactly the same
//! transactions, so the list carries no redundant sub-patterns.

use topmine::dataset::TransactionDataset;
use topmine::topk::{mine_topk, TopKConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/sample.dat").into());
    let k: usize = args.next().map(|v| v.parse().expect("K")).unwrap_or(3);
    let min_l: usize = args.next().map(|v| v.parse().expect("MIN_L")).unwrap_or(1);

    let ds = TransactionDataset::read_fimi_file(&path).expect("readable transaction file");
    let (result, report) = mine_topk(&ds, &TopKConfig::new(k, min_l));

    println!("top {k} closed itemsets with at least {min_l} items:");
    for set in &result.itemsets {
        println!("{set}");
    }
    println!(
        "-- support floor rose to {}, {} closedness probes, {:?}",
        report.final_threshold, report.counters.closure_passes, report.wall
    );
}
