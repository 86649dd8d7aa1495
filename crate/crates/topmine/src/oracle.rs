//! Brute-force reference miners for small instances.
//!
//! Everything here works by direct horizontal scans over the transaction
//! list: no bit-vectors, no projection, no rising thresholds. The point is
//! that agreement with the real miners is meaningful evidence, so this module
//! must not share any code with the mining path.

use std::collections::HashMap;

use thiserror::Error;

use crate::dataset::{ItemId, Support, TransactionDataset};

/// Exhaustive enumeration is exponential in the item count; refuse anything
/// that would not stay interactive.
pub const MAX_ORACLE_ITEMS: usize = 20;

#[derive(Error, Debug)]
pub enum OracleError {
    #[error("dataset has {items} items; the exhaustive reference is limited to {MAX_ORACLE_ITEMS}")]
    TooLarge { items: usize },
}

fn guard(ds: &TransactionDataset) -> Result<(), OracleError> {
    if ds.num_items() > MAX_ORACLE_ITEMS {
        return Err(OracleError::TooLarge { items: ds.num_items() });
    }
    Ok(())
}

/// Itemsets paired with their supports, canonical sorted-id form.
pub type RankedItemsets = Vec<(Vec<ItemId>, Support)>;

/// Exact supports for every itemset (up to `kmax` items) that occurs in at
/// least one transaction, keyed by the canonical sorted id list.
#[derive(Debug)]
pub struct SupportMap {
    map: HashMap<Vec<ItemId>, Support>,
}

impl SupportMap {
    /// Support of an itemset; zero when it occurs nowhere.
    pub fn support(&self, items: &[ItemId]) -> Support {
        self.map.get(items).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[ItemId], Support)> {
        self.map.iter().map(|(k, &v)| (k.as_slice(), v))
    }
}

fn expand_subsets(
    items: &[ItemId],
    kmax: usize,
    prefix: &mut Vec<ItemId>,
    map: &mut HashMap<Vec<ItemId>, Support>,
) {
    for (i, &id) in items.iter().enumerate() {
        prefix.push(id);
        *map.entry(prefix.clone()).or_insert(0) += 1;
        if prefix.len() < kmax {
            expand_subsets(&items[i + 1..], kmax, prefix, map);
        }
        prefix.pop();
    }
}

/// Count every itemset up to `kmax` items by expanding each transaction's
/// subsets and aggregating.
pub fn enumerate_supports(ds: &TransactionDataset, kmax: usize) -> Result<SupportMap, OracleError> {
    guard(ds)?;
    let mut map = HashMap::new();
    let mut prefix = Vec::new();
    for t in ds.transactions() {
        expand_subsets(t.items(), kmax, &mut prefix, &mut map);
    }
    Ok(SupportMap { map })
}

/// Sort (itemset, support) pairs by support descending, then by the id list;
/// the fixed order makes cutoff selection and test output deterministic.
fn sort_desc(entries: &mut [(Vec<ItemId>, Support)]) {
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
}

/// Keep everything whose support reaches the `n`-th entry of the descending
/// list (all of them when fewer than `n` exist). Boundary ties stay.
pub fn select_top(
    mut entries: RankedItemsets, n: usize) -> RankedItemsets {
    sort_desc(&mut entries);
    if entries.len() > n {
        let cutoff = entries[n - 1].1;
        entries.retain(|(_, sup)| *sup >= cutoff);
    }
    entries
}

/// The N-most selection applied to an already-enumerated support map. The
/// map must cover lengths up to `kmax`.
pub fn nmost_from_supports(
    map: &SupportMap,
    n: usize,
    kmax: usize,
) -> Vec<RankedItemsets> {
    assert!(n >= 1 && kmax >= 1);
    let mut per_length: Vec<RankedItemsets> = vec![Vec::new(); kmax];
    for (items, sup) in map.iter() {
        if items.len() <= kmax {
            per_length[items.len() - 1].push((items.to_vec(), sup));
        }
    }
    per_length.into_iter().map(|v| select_top(v, n)).collect()
}

/// Reference for N-most mining: per length `k` in `1..=kmax`, all k-itemsets
/// whose support reaches the N-th highest k-itemset support.
pub fn oracle_nmost(
    ds: &TransactionDataset,
    n: usize,
    kmax: usize,
) -> Result<Vec<RankedItemsets>, OracleError> {
    let map = enumerate_supports(ds, kmax)?;
    Ok(nmost_from_supports(&map, n, kmax))
}

/// All closed itemsets: no single-item extension keeps the support equal.
pub fn oracle_closed(ds: &TransactionDataset) -> Result<RankedItemsets, OracleError> {
    guard(ds)?;
    let map = enumerate_supports(ds, ds.max_transaction_len().max(1))?;
    let present: Vec<ItemId> = (0..ds.num_items() as u32)
        .map(ItemId)
        .filter(|&i| map.support(&[i]) > 0)
        .collect();
    let mut closed = Vec::new();
    let mut extended = Vec::new();
    for (items, sup) in map.iter() {
        let witness = present.iter().any(|&i| {
            if items.contains(&i) {
                return false;
            }
            extended.clear();
            extended.extend_from_slice(items);
            extended.push(i);
            extended.sort_unstable();
            map.support(&extended) == sup
        });
        if !witness {
            closed.push((items.to_vec(), sup));
        }
    }
    sort_desc(&mut closed);
    Ok(closed)
}

/// Reference for top-K closed mining: closed itemsets with at least `min_l`
/// items, cut at the K-th highest support with boundary ties kept.
pub fn oracle_topk(
    ds: &TransactionDataset,
    k: usize,
    min_l: usize,
) -> Result<RankedItemsets, OracleError> {
    assert!(k >= 1 && min_l >= 1);
    let mut entries = oracle_closed(ds)?;
    entries.retain(|(items, _)| items.len() >= min_l);
    Ok(select_top(entries, k))
}

/// Audit one emitted itemset against the raw transactions: its support must
/// match and no single-item extension may reach the same support. Used as a
/// post-hoc check that is independent of both miners and of [`SupportMap`].
pub fn audit_closed(ds: &TransactionDataset, items: &[ItemId], support: Support) -> bool {
    let contains_all = |t: &crate::dataset::Transaction, set: &[ItemId]| set.iter().all(|&i| t.contains(i));
    let actual = ds.transactions().iter().filter(|t| contains_all(t, items)).count() as Support;
    if actual != support || support == 0 {
        return false;
    }
    for raw in 0..ds.num_items() as u32 {
        let ext = ItemId(raw);
        if items.contains(&ext) {
            continue;
        }
        let ext_support = ds
            .transactions()
            .iter()
            .filter(|t| t.contains(ext) && contains_all(t, items))
            .count() as Support;
        if ext_support == support {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::SAMPLE;
    use proptest::prelude::*;

    fn sample() -> TransactionDataset {
        TransactionDataset::parse_fimi_str(SAMPLE).unwrap()
    }

    /// Translate a label list into the sample dataset's ids, sorted.
    fn ids(ds: &TransactionDataset, labels: &[u32]) -> Vec<ItemId> {
        let mut out: Vec<ItemId> = labels
            .iter()
            .map(|&l| {
                ItemId(
                    ds.labels()
                        .iter()
                        .position(|x| x.0 == l)
                        .expect("label present") as u32,
                )
            })
            .collect();
        out.sort_unstable();
        out
    }

    #[test]
    fn enumerate_sample_values() {
        let ds = sample();
        let map = enumerate_supports(&ds, 4).unwrap();
        assert_eq!(map.support(&ids(&ds, &[1, 2])), 4);
        assert_eq!(map.support(&ids(&ds, &[1, 2, 3])), 2);
        assert_eq!(map.support(&ids(&ds, &[1, 2, 3, 4])), 1);
        assert_eq!(map.support(&ids(&ds, &[3, 5])), 1);
        assert_eq!(map.support(&ids(&ds, &[4, 5])), 0);
    }

    #[test]
    fn enumerate_single_transaction() {
        let ds = TransactionDataset::parse_fimi_str("10 11\n").unwrap();
        let map = enumerate_supports(&ds, 2).unwrap();
        assert_eq!(map.len(), 3);
        assert_eq!(map.support(&[ItemId(0)]), 1);
        assert_eq!(map.support(&[ItemId(1)]), 1);
        assert_eq!(map.support(&[ItemId(0), ItemId(1)]), 1);
    }

    #[test]
    fn enumerate_empty_dataset() {
        let ds = TransactionDataset::parse_fimi_str("").unwrap();
        assert!(enumerate_supports(&ds, 3).unwrap().is_empty());
    }

    #[test]
    fn guard_refuses_large_item_tables() {
        let text: String = (0..21).map(|i| i.to_string()).collect::<Vec<_>>().join("\n");
        let ds = TransactionDataset::parse_fimi_str(&text).unwrap();
        assert!(matches!(
            enumerate_supports(&ds, 2),
            Err(OracleError::TooLarge { items: 21 })
        ));
        assert!(oracle_closed(&ds).is_err());
    }

    #[test]
    fn nmost_on_sample() {
        let ds = sample();
        let res = oracle_nmost(&ds, 2, 2).unwrap();
        let l1: Vec<(Vec<u32>, Support)> = res[0]
            .iter()
            .map(|(v, s)| (v.iter().map(|i| ds.label(*i).0).collect(), *s))
            .collect();
        assert_eq!(l1, vec![(vec![1], 5), (vec![2], 5)]);
        assert_eq!(res[1].len(), 5); // one pair at 4, four tied at 2
        assert!(res[1].iter().all(|(_, s)| *s >= 2));
    }

    #[test]
    fn nmost_top_tie() {
        let ds = sample();
        let res = oracle_nmost(&ds, 1, 1).unwrap();
        assert_eq!(res[0].len(), 2);
        assert!(res[0].iter().all(|(_, s)| *s == 5));
    }

    #[test]
    fn nmost_single_transaction() {
        let ds = TransactionDataset::parse_fimi_str("9\n").unwrap();
        let res = oracle_nmost(&ds, 3, 1).unwrap();
        assert_eq!(res[0], vec![(vec![ItemId(0)], 1)]);
    }

    #[test]
    fn closed_sample_exact_list() {
        let ds = sample();
        let closed = oracle_closed(&ds).unwrap();
        let mut got: Vec<(Vec<u32>, Support)> = closed
            .iter()
            .map(|(v, s)| {
                let mut labels: Vec<u32> = v.iter().map(|i| ds.label(*i).0).collect();
                labels.sort_unstable();
                (labels, *s)
            })
            .collect();
        got.sort();
        let mut want: Vec<(Vec<u32>, Support)> = vec![
            (vec![1], 5),
            (vec![2], 5),
            (vec![1, 2], 4),
            (vec![3], 3),
            (vec![5], 2),
            (vec![1, 2, 3], 2),
            (vec![1, 2, 4], 2),
            (vec![1, 2, 3, 4], 1),
            (vec![1, 2, 5], 1),
            (vec![3, 5], 1),
        ];
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn closed_identical_transactions() {
        let ds = TransactionDataset::parse_fimi_str("1 2\n1 2\n1 2\n").unwrap();
        let closed = oracle_closed(&ds).unwrap();
        assert_eq!(closed, vec![(vec![ItemId(0), ItemId(1)], 3)]);
    }

    #[test]
    fn closed_empty_dataset() {
        let ds = TransactionDataset::parse_fimi_str("").unwrap();
        assert!(oracle_closed(&ds).unwrap().is_empty());
    }

    #[test]
    fn topk_on_sample() {
        let ds = sample();
        let to_labels = |entries: &[(Vec<ItemId>, Support)]| -> Vec<(Vec<u32>, Support)> {
            entries
                .iter()
                .map(|(v, s)| {
                    let mut l: Vec<u32> = v.iter().map(|i| ds.label(*i).0).collect();
                    l.sort_unstable();
                    (l, *s)
                })
                .collect()
        };
        let res = oracle_topk(&ds, 3, 1).unwrap();
        assert_eq!(to_labels(&res), vec![(vec![1], 5), (vec![2], 5), (vec![1, 2], 4)]);
        let res = oracle_topk(&ds, 2, 2).unwrap();
        let mut got = to_labels(&res);
        got.sort();
        assert_eq!(got, vec![(vec![1, 2], 4), (vec![1, 2, 3], 2), (vec![1, 2, 4], 2)]);
    }

    #[test]
    fn topk_min_l_above_longest_transaction() {
        let ds = sample();
        assert!(oracle_topk(&ds, 5, 5).unwrap().is_empty());
    }

    #[test]
    fn audit_accepts_closed_and_rejects_others() {
        let ds = sample();
        for (items, sup) in oracle_closed(&ds).unwrap() {
            assert!(audit_closed(&ds, &items, sup));
        }
        // right itemset, wrong support
        assert!(!audit_closed(&ds, &ids(&ds, &[1]), 4));
        // label 4 has support 2, but so does {1, 4}: not closed
        assert!(!audit_closed(&ds, &ids(&ds, &[4]), 2));
    }

    proptest! {
        #[test]
        fn support_map_is_anti_monotone(seed in 0u64..500) {
            let ds = crate::dataset::generate_synthetic(8, 24, 0.35, seed);
            let map = enumerate_supports(&ds, 4).unwrap();
            for (items, sup) in map.iter() {
                for drop in 0..items.len() {
                    let mut subset = items.to_vec();
                    subset.remove(drop);
                    if !subset.is_empty() {
                        prop_assert!(map.support(&subset) >= sup);
                    }
                }
            }
        }

        #[test]
        fn closed_sets_have_no_equal_extension(seed in 0u64..200) {
            let ds = crate::dataset::generate_synthetic(7, 20, 0.4, seed);
            for (items, sup) in oracle_closed(&ds).unwrap() {
                prop_assert!(audit_closed(&ds, &items, sup));
            }
        }
    }
}
