//! Threshold-free frequent itemset mining over vertical bit-vectors.
//!
//! Classic miners ask for a minimum-support threshold up front, which is hard
//! to pick without knowing the data. This crate provides two miners that need
//! none:
//!
//! - [`nmost::mine_nmost`] finds, for every length `k` in `1..=kmax`, all
//!   k-itemsets whose support reaches the N-th highest k-itemset support.
//! - [`topk::mine_topk`] finds the K most frequent *closed* itemsets with at
//!   least `min_l` items.
//!
//! Both walk the set-enumeration tree depth-first and raise their support
//! thresholds as results accumulate, so pruning gets sharper as the run
//! progresses. Support counting runs on vertical bit-vectors ([`bitmat`]);
//! each search node keeps a projected list of the word regions that are still
//! nonzero, so deep nodes touch only a handful of words per candidate.
//!
//! ```
//! use topmine::dataset::TransactionDataset;
//! use topmine::nmost::{mine_nmost, NMostConfig};
//!
//! let ds = TransactionDataset::parse_fimi_str("1 2 3\n1 2 5\n2\n3 5\n1 2 4\n1 2 3 4\n1\n").unwrap();
//! let (result, _report) = mine_nmost(&ds, &NMostConfig::new(2, 2));
//! assert_eq!(result.lengths[0].len(), 2); // two top 1-itemsets (a tie)
//! ```
//!
//! The `examples/` directory shows one runnable program per capability; the
//! `topmine` binary wraps the same calls behind `nmost`, `topk`, `bench` and
//! `verify` subcommands.

#![forbid(unsafe_code)]

pub mod bitmat;
pub mod dataset;
pub mod nmost;
pub mod oracle;
pub mod report;
pub mod search;
pub mod topk;

pub use dataset::{ItemId, ItemLabel, Support, TransactionDataset};
pub use report::{MiningCounters, RunReport};
pub use search::{Itemset, OrderPolicy};
