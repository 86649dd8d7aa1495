//! Generate synthetic transaction data and write it in the flat file format.
//!
//! ```text
//! cargo run --example synthetic_data -- [OUT_DIR]
//! ```
//!
//! Two generators: independent item occurrences (every (transaction, item)
//! pair drawn with a fixed probability) and market-basket-shaped data, where
//! transactions are unions of recurring patterns plus noise. The second kind
//! is what makes long itemsets recur and both miners' floors rise quickly.

use topmine::dataset::{generate_patterned, generate_synthetic, PatternedConfig};

fn main() {
    let out_dir = std::env::args()
        .nth(1)
        .map(std::path::PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);

    let uniform = generate_synthetic(50, 1000, 0.08, 42);
    let uniform_path = out_dir.join("uniform.dat");
    std::fs::write(&uniform_path, uniform.to_fimi_string()).expect("writable output dir");
    println!(
        "{}: {} transactions, {} items (independent occurrences)",
        uniform_path.display(),
        uniform.num_transactions(),
        uniform.num_items()
    );

    let basket = generate_patterned(&PatternedConfig {
        num_items: 200,
        num_transactions: 5000,
        mean_transaction_len: 10.0,
        mean_pattern_len: 4.0,
        num_patterns: 64,
        seed: 42,
    });
    let basket_path = out_dir.join("basket.dat");
    std::fs::write(&basket_path, basket.to_fimi_string()).expect("writable output dir");
    let mean = basket.transactions().iter().map(|t| t.len()).sum::<usize>() as f64
        / basket.num_transactions() as f64;
    println!(
        "{}: {} transactions, {} items, mean length {mean:.1} (recurring patterns)",
        basket_path.display(),
        basket.num_transactions(),
        basket.num_items()
    );
    println!("try: topmine topk {} --k 20 --minl 3", basket_path.display());
}
