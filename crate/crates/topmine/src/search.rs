//! Shared set-enumeration machinery: tail ordering, the root pair-support
//! table and pair-based pruning, and the head/tail/exclusion expansion rule.
//!
//! The search space is the lexicographic set-enumeration tree: every node
//! owns an itemset (its head) and the ordered list of items that may still
//! extend it (its tail), so every itemset is reachable at exactly one node.
//! Items that sorted *before* a branch at some ancestor go into the node's
//! exclusion list; they are never extension candidates again but closedness
//! checks still need them.

use crate::bitmat::{count_and, VerticalBitMatrix};
use crate::dataset::{ItemId, ItemLabel, Support};
use crate::report::MiningCounters;

/// A mined result: item labels in ascending order plus the support.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Itemset {
    pub labels: Vec<ItemLabel>,
    pub support: Support,
}

impl std::fmt::Display for Itemset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for l in &self.labels {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
            first = false;
        }
        write!(f, " (#{})", self.support)
    }
}

/// Tail ordering policy. Decreasing support is the default; ties always
/// break towards the smaller item id so runs are deterministic.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum OrderPolicy {
    #[default]
    Decreasing,
    Increasing,
}

/// Sort tail entries by support under the policy, ties by ascending id.
pub fn order_tail<T>(entries: &mut [T], policy: OrderPolicy, key: impl Fn(&T) -> (ItemId, Support)) {
    match policy {
        OrderPolicy::Decreasing => entries.sort_by(|x, y| {
            let (xi, xs) = key(x);
            let (yi, ys) = key(y);
            ys.cmp(&xs).then(xi.cmp(&yi))
        }),
        OrderPolicy::Increasing => entries.sort_by(|x, y| {
            let (xi, xs) = key(x);
            let (yi, ys) = key(y);
            xs.cmp(&ys).then(xi.cmp(&yi))
        }),
    }
}

/// Convenience for plain `(item, support)` tails.
pub fn order_tail_pairs(entries: &mut [(ItemId, Support)], policy: OrderPolicy) {
    order_tail(entries, policy, |&(i, s)| (i, s));
}

/// Exact supports of all item pairs over the root-retained items, stored as
/// a triangular matrix.
#[derive(Clone, Debug)]
pub struct PairSupportTable {
    num_items: usize,
    supports: Vec<Support>,
}

impl PairSupportTable {
    fn slot(&self, a: ItemId, b: ItemId) -> usize {
        debug_assert!(a != b);
        let (lo, hi) = if a < b { (a.idx(), b.idx()) } else { (b.idx(), a.idx()) };
        hi * (hi - 1) / 2 + lo
    }

    pub fn support(&self, a: ItemId, b: ItemId) -> Support {
        self.supports[self.slot(a, b)]
    }

    pub fn num_items(&self) -> usize {
        self.num_items
    }
}

/// Count every pair over the root projections. One AND pass per pair.
pub fn build_pair_table(matrix: &VerticalBitMatrix, c: &mut MiningCounters) -> PairSupportTable {
    let n = matrix.num_items();
    let mut supports = vec![0; n * n.saturating_sub(1) / 2];
    for hi in 1..n {
        let hi_id = ItemId(hi as u32);
        for lo in 0..hi {
            let lo_id = ItemId(lo as u32);
            let pbr = matrix.root_regions(lo_id);
            let sup = count_and(matrix.row_words(lo_id), matrix.row_words(hi_id), pbr.indexes());
            supports[hi * (hi - 1) / 2 + lo] = sup;
            c.pair_table_passes += 1;
            c.and_word_ops += pbr.len() as u64;
            c.pbr_words_skipped += (matrix.words_per_row() - pbr.len()) as u64;
        }
    }
    PairSupportTable { num_items: n, supports }
}

/// Reject an extension when any of its pairs with the head is already below
/// the bound: `support(head + x) <= pair(a, x)` for every `a` in the head,
/// so nothing that still meets the bound can be lost.
pub fn pair_prune(head: &[ItemId], x: ItemId, table: &PairSupportTable, bound: Support) -> bool {
    head.iter().any(|&a| table.support(a, x) < bound)
}

/// A search node spelled out: the expansion contract the walkers follow.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SearchNode {
    pub head: Vec<ItemId>,
    /// Extension candidates, in the node's visit order.
    pub tail: Vec<ItemId>,
    /// Items ordered before this node's branch at some ancestor.
    pub exclusion: Vec<ItemId>,
}

impl SearchNode {
    pub fn root(tail: Vec<ItemId>) -> SearchNode {
        SearchNode { head: Vec::new(), tail, exclusion: Vec::new() }
    }

    pub fn depth(&self) -> usize {
        self.head.len()
    }

    /// Expand by a tail item: the child's head gains `x`, its tail keeps the
    /// items after `x`, and the items before `x` move to the exclusion list.
    pub fn expand(&self, x: ItemId) -> SearchNode {
        let pos = self
            .tail
            .iter()
            .position(|&t| t == x)
            .expect("expand target must be in the tail");
        let mut head = self.head.clone();
        head.push(x);
        let mut exclusion = self.exclusion.clone();
        exclusion.extend_from_slice(&self.tail[..pos]);
        SearchNode {
            head,
            tail: self.tail[pos + 1..].to_vec(),
            exclusion,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitmat::WordWidth;
    use crate::dataset::{TransactionDataset, SAMPLE};

    fn ids(v: &[u32]) -> Vec<ItemId> {
        v.iter().map(|&x| ItemId(x)).collect()
    }

    #[test]
    fn order_tail_decreasing() {
        let mut t = vec![(ItemId(2), 3), (ItemId(1), 5), (ItemId(3), 2)];
        order_tail_pairs(&mut t, OrderPolicy::Decreasing);
        assert_eq!(t, vec![(ItemId(1), 5), (ItemId(2), 3), (ItemId(3), 2)]);
    }

    #[test]
    fn order_tail_ties_break_by_id() {
        let mut t = vec![(ItemId(1), 5), (ItemId(0), 5)];
        order_tail_pairs(&mut t, OrderPolicy::Decreasing);
        assert_eq!(t, vec![(ItemId(0), 5), (ItemId(1), 5)]);
        let mut t = vec![(ItemId(1), 5), (ItemId(0), 5)];
        order_tail_pairs(&mut t, OrderPolicy::Increasing);
        assert_eq!(t, vec![(ItemId(0), 5), (ItemId(1), 5)]);
    }

    #[test]
    fn order_tail_empty() {
        let mut t: Vec<(ItemId, Support)> = Vec::new();
        order_tail_pairs(&mut t, OrderPolicy::Decreasing);
        assert!(t.is_empty());
    }

    #[test]
    fn pair_table_matches_horizontal_scan() {
        let ds = TransactionDataset::parse_fimi_str(SAMPLE).unwrap();
        let m = VerticalBitMatrix::build(&ds, WordWidth::W64);
        let mut c = MiningCounters::default();
        let table = build_pair_table(&m, &mut c);
        let label = |l: u32| ItemId(ds.labels().iter().position(|x| x.0 == l).unwrap() as u32);
        assert_eq!(table.support(label(1), label(2)), 4);
        assert_eq!(table.support(label(1), label(3)), 2);
        assert_eq!(table.support(label(3), label(5)), 1);
        assert_eq!(table.support(label(4), label(5)), 0);
        // exhaustive agreement with a horizontal pair scan
        for a in 0..ds.num_items() as u32 {
            for b in (a + 1)..ds.num_items() as u32 {
                let (a, b) = (ItemId(a), ItemId(b));
                let scan = ds
                    .transactions()
                    .iter()
                    .filter(|t| t.contains(a) && t.contains(b))
                    .count() as Support;
                assert_eq!(table.support(a, b), scan);
                assert_eq!(table.support(b, a), scan);
            }
        }
        assert_eq!(c.pair_table_passes, 10);
    }

    #[test]
    fn pair_table_single_item() {
        let ds = TransactionDataset::parse_fimi_str("4\n4\n").unwrap();
        let m = VerticalBitMatrix::build(&ds, WordWidth::W64);
        let table = build_pair_table(&m, &mut MiningCounters::default());
        assert_eq!(table.num_items(), 1);
    }

    #[test]
    fn pair_prune_decisions() {
        let ds = TransactionDataset::parse_fimi_str(SAMPLE).unwrap();
        let m = VerticalBitMatrix::build(&ds, WordWidth::W64);
        let table = build_pair_table(&m, &mut MiningCounters::default());
        let label = |l: u32| ItemId(ds.labels().iter().position(|x| x.0 == l).unwrap() as u32);
        // head {1,2}, extension 5: pair(1,5) = 1 < 2
        assert!(pair_prune(&[label(1), label(2)], label(5), &table, 2));
        // head {1}, extension 2: pair(1,2) = 4 >= 2
        assert!(!pair_prune(&[label(1)], label(2), &table, 2));
        // empty head never prunes
        assert!(!pair_prune(&[], label(5), &table, 2));
    }

    #[test]
    fn expand_follows_the_contract() {
        let root = SearchNode::root(ids(&[0, 1, 2, 3]));
        let a = root.expand(ItemId(0));
        assert_eq!(a.head, ids(&[0]));
        assert_eq!(a.tail, ids(&[1, 2, 3]));
        assert!(a.exclusion.is_empty());

        let ab = a.expand(ItemId(1));
        assert_eq!(ab.head, ids(&[0, 1]));
        assert_eq!(ab.tail, ids(&[2, 3]));
        assert!(ab.exclusion.is_empty());

        let ac = a.expand(ItemId(2));
        assert_eq!(ac.head, ids(&[0, 2]));
        assert_eq!(ac.tail, ids(&[3]));
        assert_eq!(ac.exclusion, ids(&[1]));
    }

    #[test]
    fn enumeration_visits_each_itemset_once() {
        // walk the full tree from a 5-item root and collect heads
        fn walk(node: &SearchNode, seen: &mut Vec<Vec<ItemId>>) {
            for &x in node.tail.clone().iter() {
                let child = node.expand(x);
                let mut head = child.head.clone();
                head.sort_unstable();
                seen.push(head);
                walk(&child, seen);
            }
        }
        let root = SearchNode::root(ids(&[0, 1, 2, 3, 4]));
        let mut seen = Vec::new();
        walk(&root, &mut seen);
        let total = seen.len();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), total, "duplicate itemset visited");
        assert_eq!(total, 31); // 2^5 - 1 nonempty subsets
    }
}
