//! Transaction datasets: parsing, normalization and synthetic generation.
//!
//! Datasets come in as flat text, one transaction per line, items as
//! non-negative decimal tokens separated by spaces or tabs. Parsing assigns
//! dense [`ItemId`]s in first-appearance order and keeps the original tokens
//! as [`ItemLabel`]s so results can be printed in the input vocabulary.

use std::collections::BTreeSet;
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use thiserror::Error;

/// Transaction count an itemset occurs in.
pub type Support = u32;

/// An item token as it appeared in the input file.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ItemLabel(pub u32);

impl fmt::Display for ItemLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Dense item index, `0..num_items`. Assigned in first-appearance order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ItemId(pub u32);

impl ItemId {
    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

#[derive(Error, Debug)]
pub enum FimiError {
    #[error("line {line}: invalid item token {token:?} (items are non-negative integers)")]
    InvalidToken { line: usize, token: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// A single transaction: strictly increasing item ids, no duplicates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Transaction {
    items: Vec<ItemId>,
}

impl Transaction {
    fn from_sorted(items: Vec<ItemId>) -> Self {
        debug_assert!(items.windows(2).all(|w| w[0] < w[1]));
        Transaction { items }
    }

    pub fn items(&self) -> &[ItemId] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn contains(&self, id: ItemId) -> bool {
        self.items.binary_search(&id).is_ok()
    }
}

/// Record of a density remap: which original items were kept and where they
/// went. Enough to translate mined ids back to the original id space (and
/// from there to labels).
#[derive(Clone, Debug)]
pub struct DensityRemap {
    /// `kept[new] = old`.
    kept: Vec<ItemId>,
    /// `old_to_new[old] = Some(new)` for retained items.
    old_to_new: Vec<Option<ItemId>>,
}

impl DensityRemap {
    pub fn to_original(&self, new: ItemId) -> ItemId {
        self.kept[new.idx()]
    }

    pub fn to_dense(&self, old: ItemId) -> Option<ItemId> {
        self.old_to_new[old.idx()]
    }

    pub fn num_kept(&self) -> usize {
        self.kept.len()
    }
}

/// A horizontal transaction store with dense item ids.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TransactionDataset {
    transactions: Vec<Transaction>,
    labels: Vec<ItemLabel>,
}

impl TransactionDataset {
    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }

    pub fn num_transactions(&self) -> usize {
        self.transactions.len()
    }

    pub fn num_items(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, id: ItemId) -> ItemLabel {
        self.labels[id.idx()]
    }

    pub fn labels(&self) -> &[ItemLabel] {
        &self.labels
    }

    pub fn max_transaction_len(&self) -> usize {
        self.transactions.iter().map(Transaction::len).max().unwrap_or(0)
    }

    /// Parse the flat one-transaction-per-line format.
    ///
    /// Blank lines are skipped, duplicate items within a line are dropped,
    /// and line endings may be LF or CRLF. Ids are assigned in
    /// first-appearance order.
    pub fn parse_fimi<R: BufRead>(reader: R) -> Result<Self, FimiError> {
        let mut labels: Vec<ItemLabel> = Vec::new();
        let mut label_to_id: std::collections::HashMap<u32, ItemId> = std::collections::HashMap::new();
        let mut transactions = Vec::new();
        let mut row: Vec<ItemId> = Vec::new();

        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            row.clear();
            for token in line.split_whitespace() {
                let raw: u32 = token.parse().map_err(|_| FimiError::InvalidToken {
                    line: lineno + 1,
                    token: token.to_string(),
                })?;
                let id = *label_to_id.entry(raw).or_insert_with(|| {
                    let id = ItemId(labels.len() as u32);
                    labels.push(ItemLabel(raw));
                    id
                });
                row.push(id);
            }
            if row.is_empty() {
                continue;
            }
            row.sort_unstable();
            row.dedup();
            transactions.push(Transaction::from_sorted(row.clone()));
        }
        Ok(TransactionDataset { transactions, labels })
    }

    pub fn parse_fimi_str(text: &str) -> Result<Self, FimiError> {
        Self::parse_fimi(text.as_bytes())
    }

    pub fn read_fimi_file<P: AsRef<Path>>(path: P) -> Result<Self, FimiError> {
        Self::parse_fimi(BufReader::new(File::open(path)?))
    }

    /// Write the dataset in the same flat format, using original labels.
    pub fn write_fimi<W: Write>(&self, mut w: W) -> io::Result<()> {
        for t in &self.transactions {
            let mut first = true;
            for &id in t.items() {
                if !first {
                    write!(w, " ")?;
                }
                write!(w, "{}", self.label(id))?;
                first = false;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_fimi_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_fimi(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("labels are ASCII")
    }

    /// Number of transactions containing each item.
    pub fn item_supports(&self) -> Vec<Support> {
        let mut supports = vec![0; self.num_items()];
        for t in &self.transactions {
            for &id in t.items() {
                supports[id.idx()] += 1;
            }
        }
        supports
    }

    /// Drop items with support below `floor`, re-densify ids and drop
    /// transactions that become empty. Retained item supports are unchanged.
    pub fn densify(&self, floor: Support) -> (TransactionDataset, DensityRemap) {
        let supports = self.item_supports();
        let mut kept = Vec::new();
        let mut old_to_new = vec![None; self.num_items()];
        let mut labels = Vec::new();
        for (idx, &sup) in supports.iter().enumerate() {
            if sup >= floor {
                let old = ItemId(idx as u32);
                old_to_new[idx] = Some(ItemId(kept.len() as u32));
                labels.push(self.labels[idx]);
                kept.push(old);
            }
        }
        let mut transactions = Vec::new();
        let mut row = Vec::new();
        for t in &self.transactions {
            row.clear();
            for &id in t.items() {
                if let Some(new) = old_to_new[id.idx()] {
                    row.push(new);
                }
            }
            if !row.is_empty() {
                transactions.push(Transaction::from_sorted(row.clone()));
            }
        }
        (
            TransactionDataset { transactions, labels },
            DensityRemap { kept, old_to_new },
        )
    }
}

/// Deterministic 64-bit generator (splitmix64). Kept in-crate so seeded
/// streams never shift underneath frozen test corpora.
#[derive(Clone, Debug)]
pub(crate) struct SplitMix64(u64);

impl SplitMix64 {
    pub(crate) fn new(seed: u64) -> Self {
        SplitMix64(seed)
    }

    pub(crate) fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub(crate) fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in `0..bound` (`bound > 0`).
    pub(crate) fn next_below(&mut self, bound: usize) -> usize {
        (self.next_f64() * bound as f64) as usize % bound
    }

    /// Poisson sample by inversion; fine for small means.
    pub(crate) fn next_poisson(&mut self, mean: f64) -> usize {
        let limit = (-mean).exp();
        let mut k = 0usize;
        let mut p = 1.0;
        loop {
            p *= self.next_f64();
            if p <= limit || k > 64 {
                return k;
            }
            k += 1;
        }
    }
}

/// Independent-occurrence synthetic dataset: every (transaction, item) pair
/// is included with probability `density`. Transactions that come out empty
/// are dropped; the item table keeps all `num_items` declared items with
/// labels `0..num_items`.
pub fn generate_synthetic(
    num_items: usize,
    num_transactions: usize,
    density: f64,
    seed: u64,
) -> TransactionDataset {
    assert!(
        density > 0.0 && density <= 1.0,
        "density must be in (0, 1], got {density}"
    );
    let mut rng = SplitMix64::new(seed);
    let labels = (0..num_items as u32).map(ItemLabel).collect();
    let mut transactions = Vec::new();
    for _ in 0..num_transactions {
        let mut row = Vec::new();
        for item in 0..num_items {
            if rng.next_f64() < density {
                row.push(ItemId(item as u32));
            }
        }
        if !row.is_empty() {
            transactions.push(Transaction::from_sorted(row));
        }
    }
    TransactionDataset { transactions, labels }
}

/// Shape parameters for [`generate_patterned`].
#[derive(Clone, Debug)]
pub struct PatternedConfig {
    pub num_items: usize,
    pub num_transactions: usize,
    /// Target mean transaction length.
    pub mean_transaction_len: f64,
    /// Mean size of the recurring patterns mixed into transactions.
    pub mean_pattern_len: f64,
    /// Size of the recurring-pattern pool.
    pub num_patterns: usize,
    pub seed: u64,
}

/// Market-basket-shaped synthetic data: transactions are unions of recurring
/// item patterns plus uniform noise, so long itemsets recur the way they do
/// in real baskets instead of vanishing at independence rates.
pub fn generate_patterned(cfg: &PatternedConfig) -> TransactionDataset {
    assert!(cfg.num_items > 0 && cfg.num_patterns > 0);
    let mut rng = SplitMix64::new(cfg.seed);
    let mut patterns: Vec<Vec<ItemId>> = Vec::with_capacity(cfg.num_patterns);
    for p in 0..cfg.num_patterns {
        // A thin tail of long patterns keeps deep itemsets recurring.
        let size = if p % 64 == 0 {
            (cfg.mean_pattern_len * 3.0) as usize + rng.next_poisson(2.0)
        } else {
            1 + rng.next_poisson(cfg.mean_pattern_len - 1.0)
        };
        let size = size.clamp(1, cfg.num_items);
        let mut set = BTreeSet::new();
        while set.len() < size {
            set.insert(ItemId(rng.next_below(cfg.num_items) as u32));
        }
        patterns.push(set.into_iter().collect());
    }

    let labels = (0..cfg.num_items as u32).map(ItemLabel).collect();
    let mut transactions = Vec::new();
    for _ in 0..cfg.num_transactions {
        let target = 1 + rng.next_poisson(cfg.mean_transaction_len - 1.0);
        let mut set: BTreeSet<ItemId> = BTreeSet::new();
        while set.len() + 2 < target {
            let pat = &patterns[rng.next_below(patterns.len())];
            set.extend(pat.iter().copied());
        }
        while set.len() < target {
            set.insert(ItemId(rng.next_below(cfg.num_items) as u32));
        }
        transactions.push(Transaction::from_sorted(set.into_iter().collect()));
    }
    TransactionDataset { transactions, labels }
}

/// Seven transactions over five items, used across the crate's tests:
/// labels 1..=5, supports 5, 5, 3, 2, 2.
#[cfg(test)]
pub(crate) const SAMPLE: &str = "1 2 3\n1 2 5\n2\n3 5\n1 2 4\n1 2 3 4\n1\n";

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_sample_shape() {
        let ds = TransactionDataset::parse_fimi_str(SAMPLE).unwrap();
        assert_eq!(ds.num_transactions(), 7);
        assert_eq!(ds.num_items(), 5);
        assert_eq!(
            ds.labels(),
            &[ItemLabel(1), ItemLabel(2), ItemLabel(3), ItemLabel(5), ItemLabel(4)]
        );
        assert_eq!(ds.transactions()[2].items(), &[ItemId(1)]);
    }

    #[test]
    fn parse_empty_input() {
        let ds = TransactionDataset::parse_fimi_str("").unwrap();
        assert_eq!(ds.num_transactions(), 0);
        assert_eq!(ds.num_items(), 0);
    }

    #[test]
    fn parse_dedups_within_line() {
        let ds = TransactionDataset::parse_fimi_str("3 3 3\n").unwrap();
        assert_eq!(ds.num_transactions(), 1);
        assert_eq!(ds.transactions()[0].len(), 1);
        assert_eq!(ds.num_items(), 1);
    }

    #[test]
    fn parse_skips_blank_lines_and_crlf() {
        let ds = TransactionDataset::parse_fimi_str("1 2\r\n\r\n\n  \n2 3\r\n").unwrap();
        assert_eq!(ds.num_transactions(), 2);
        assert_eq!(ds.num_items(), 3);
    }

    #[test]
    fn parse_rejects_bad_tokens() {
        let err = TransactionDataset::parse_fimi_str("1 2\nx 3\n").unwrap_err();
        assert!(matches!(err, FimiError::InvalidToken { line: 2, .. }), "{err}");
        let err = TransactionDataset::parse_fimi_str("1\n2\n-3\n").unwrap_err();
        assert!(matches!(err, FimiError::InvalidToken { line: 3, .. }), "{err}");
    }

    #[test]
    fn supports_on_sample() {
        let ds = TransactionDataset::parse_fimi_str(SAMPLE).unwrap();
        // labels: 1, 2, 3, 5, 4 in id order
        assert_eq!(ds.item_supports(), vec![5, 5, 3, 2, 2]);
    }

    #[test]
    fn supports_trivial_cases() {
        let empty = TransactionDataset::parse_fimi_str("").unwrap();
        assert!(empty.item_supports().is_empty());
        let one = TransactionDataset::parse_fimi_str("7\n").unwrap();
        assert_eq!(one.item_supports(), vec![1]);
    }

    #[test]
    fn densify_floor_three_on_sample() {
        let ds = TransactionDataset::parse_fimi_str(SAMPLE).unwrap();
        let (dense, remap) = ds.densify(3);
        // retained: labels 1, 2, 3 (supports 5, 5, 3)
        assert_eq!(dense.num_items(), 3);
        assert_eq!(dense.labels(), &[ItemLabel(1), ItemLabel(2), ItemLabel(3)]);
        assert_eq!(dense.num_transactions(), 7);
        let rows: Vec<Vec<u32>> = dense
            .transactions()
            .iter()
            .map(|t| t.items().iter().map(|i| dense.label(*i).0).collect())
            .collect();
        assert_eq!(
            rows,
            vec![
                vec![1, 2, 3],
                vec![1, 2],
                vec![2],
                vec![3],
                vec![1, 2],
                vec![1, 2, 3],
                vec![1],
            ]
        );
        assert_eq!(remap.num_kept(), 3);
        assert_eq!(remap.to_original(ItemId(2)), ItemId(2));
        assert_eq!(remap.to_dense(ItemId(4)), None);
    }

    #[test]
    fn densify_floor_zero_is_identity_modulo_empty() {
        let ds = TransactionDataset::parse_fimi_str(SAMPLE).unwrap();
        let (dense, _) = ds.densify(0);
        assert_eq!(dense, ds);
    }

    #[test]
    fn densify_floor_above_max_empties() {
        let ds = TransactionDataset::parse_fimi_str(SAMPLE).unwrap();
        let (dense, remap) = ds.densify(6);
        assert_eq!(dense.num_items(), 0);
        assert_eq!(dense.num_transactions(), 0);
        assert_eq!(remap.num_kept(), 0);
    }

    #[test]
    fn synthetic_density_one_is_full() {
        let ds = generate_synthetic(5, 10, 1.0, 9);
        assert_eq!(ds.num_transactions(), 10);
        assert!(ds.transactions().iter().all(|t| t.len() == 5));
    }

    #[test]
    fn synthetic_zero_items_or_transactions() {
        assert_eq!(generate_synthetic(0, 10, 0.5, 3).num_transactions(), 0);
        assert_eq!(generate_synthetic(4, 0, 0.5, 3).num_transactions(), 0);
    }

    #[test]
    fn synthetic_is_deterministic() {
        let a = generate_synthetic(12, 64, 0.3, 42);
        let b = generate_synthetic(12, 64, 0.3, 42);
        assert_eq!(a, b);
        let c = generate_synthetic(12, 64, 0.3, 43);
        assert_ne!(a, c);
    }

    #[test]
    fn patterned_hits_target_mean_length() {
        let ds = generate_patterned(&PatternedConfig {
            num_items: 200,
            num_transactions: 2000,
            mean_transaction_len: 10.0,
            mean_pattern_len: 4.0,
            num_patterns: 50,
            seed: 7,
        });
        let total: usize = ds.transactions().iter().map(Transaction::len).sum();
        let mean = total as f64 / ds.num_transactions() as f64;
        assert!((8.0..=12.0).contains(&mean), "mean transaction length {mean}");
    }

    fn arb_dataset() -> impl Strategy<Value = TransactionDataset> {
        // Random flat text made of small tokens; parsing normalizes it.
        proptest::collection::vec(proptest::collection::vec(0u32..15, 0..8), 0..20).prop_map(|rows| {
            let text: String = rows
                .iter()
                .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "))
                .collect::<Vec<_>>()
                .join("\n");
            TransactionDataset::parse_fimi_str(&text).unwrap()
        })
    }

    proptest! {
        #[test]
        fn roundtrip_after_parse(ds in arb_dataset()) {
            let again = TransactionDataset::parse_fimi_str(&ds.to_fimi_string()).unwrap();
            prop_assert_eq!(again, ds);
        }

        #[test]
        fn support_sum_equals_total_length(ds in arb_dataset()) {
            let total: usize = ds.transactions().iter().map(Transaction::len).sum();
            let sum: u64 = ds.item_supports().iter().map(|&s| s as u64).sum();
            prop_assert_eq!(sum, total as u64);
        }

        #[test]
        fn densify_preserves_retained_supports(ds in arb_dataset(), floor in 0u32..6) {
            let before = ds.item_supports();
            let (dense, remap) = ds.densify(floor);
            let after = dense.item_supports();
            for (new_idx, &sup) in after.iter().enumerate() {
                let old = remap.to_original(ItemId(new_idx as u32));
                prop_assert_eq!(sup, before[old.idx()]);
                prop_assert!(sup >= floor);
            }
        }
    }
}
