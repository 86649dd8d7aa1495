//! A close look at how support counting and projection work, with one
//! transaction per word so the region lists read directly as transaction
//! indexes.
//!
//! ```text
//! cargo run --example pbr_projection
//! ```

use topmine::bitmat::{HeadRef, NodeArena, VerticalBitMatrix, WordWidth};
use topmine::dataset::{ItemId, TransactionDataset};
use topmine::report::{MiningCounters, PassKind};

fn main() {
    let ds = TransactionDataset::parse_fimi_str("1 2 3\n1 2 5\n2\n3 5\n1 2 4\n1 2 3 4\n1\n")
        .expect("well-formed input");
    let matrix = VerticalBitMatrix::build(&ds, WordWidth::W1);
    let mut arena = NodeArena::for_matrix(&matrix, Some(64));
    let mut counters = MiningCounters::default();
    let id = |label: u32| {
        ItemId(ds.labels().iter().position(|l| l.0 == label).expect("label") as u32)
    };

    println!("rows ({} transactions, 1 bit per word):", ds.num_transactions());
    for raw in [1u32, 2, 3, 4, 5] {
        let item = id(raw);
        println!(
            "  item {raw}: words {:?}  regions {:?}",
            matrix.row_words(item),
            matrix.root_regions(item).indexes()
        );
    }

    // counting at the node {1}: AND item 1's row against each candidate,
    // but only over item 1's nonzero regions
    let head = HeadRef::Root(id(1));
    println!("\nextension supports at head {{1}}:");
    for raw in [2u32, 3, 4, 5] {
        let sup = arena.count(&matrix, head, id(raw), PassKind::Count, &mut counters);
        println!("  {{1 {raw}}}: {sup}");
    }

    // a fused pass both counts and materializes the child's packed words
    let (ab, sup) = arena
        .project_fused(&matrix, head, id(2), &mut counters)
        .expect("arena has room");
    println!("\nchild {{1 2}}: support {sup}, regions {:?}", arena.head_regions(&matrix, ab));
    let (abc, sup) = arena
        .project_fused(&matrix, ab, id(3), &mut counters)
        .expect("arena has room");
    println!("child {{1 2 3}}: support {sup}, regions {:?}", arena.head_regions(&matrix, abc));

    println!(
        "\n{} AND word ops total; a full-width sweep would have spent {}",
        counters.and_word_ops,
        counters.and_word_ops + counters.pbr_words_skipped
    );
}
