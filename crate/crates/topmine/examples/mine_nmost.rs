//! Mine the N most frequent itemsets per length from a transaction file.
//!
//! ```text
//! cargo run --example mine_nmost -- [PATH] [N] [KMAX]
//! ```
//!
//! Defaults to the bundled sample with N=2, KMAX=3.

use topmine::dataset::TransactionDataset;
use topmine::nmost::{mine_nmost, NMostConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/sample.dat").into());
    let n: usize = args.next().map(|v| v.parse().expect("N")).unwrap_or(2);
    let kmax: usize = args.next().map(|v| v.parse().expect("KMAX")).unwrap_or(3);

    let ds = TransactionDataset::read_fimi_file(&path).expect("readable transaction file");
    println!(
        "{}: {} transactions, {} items",
        path,
        ds.num_transactions(),
        ds.num_items()
    );

    let (result, report) = mine_nmost(&ds, &NMostConfig::new(n, kmax));
    for (k, sets) in result.lengths.iter().enumerate() {
        println!("-- length {} ({} itemsets)", k + 1, sets.len());
        for set in sets {
            println!("{set}");
        }
    }
    println!(
        "-- {} nodes, {} AND word ops, final floors {:?}, {:?}",
        report.counters.nodes_visited,
        report.counters.and_word_ops,
        report.final_length_thresholds,
        report.wall
    );
}
