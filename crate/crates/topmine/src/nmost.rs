//! N-most mining: for every length `k` in `1..=kmax`, all k-itemsets whose
//! support reaches the N-th highest k-itemset support.
//!
//! No support threshold is taken from the caller. Instead every length keeps
//! its own floor, raised whenever its collector holds N itemsets, and a tail
//! item survives only while some length it could still reach would accept
//! it. Per-length floors start at zero, so early exploration is wide and the
//! run narrows as results accumulate.

use std::collections::BTreeMap;
use std::time::Instant;

use crate::bitmat::{HeadRef, NodeArena, VerticalBitMatrix, WordWidth};
use crate::dataset::{DensityRemap, ItemId, Support, TransactionDataset};
use crate::report::{result_digest, MiningCounters, PassKind, RunReport, ThresholdLog};
use crate::search::{
    build_pair_table, order_tail, order_tail_pairs, pair_prune, Itemset, OrderPolicy,
    PairSupportTable,
};

/// Per-length support floors plus their running minimum.
///
/// `floor(k)` is the support the length-k collector currently demands; the
/// global floor is the minimum over all lengths. Floors only ever rise.
#[derive(Clone, Debug)]
pub struct ThresholdVector {
    per_length: Vec<Support>,
    global: Support,
}

impl ThresholdVector {
    pub fn new(kmax: usize) -> ThresholdVector {
        ThresholdVector { per_length: vec![0; kmax], global: 0 }
    }

    /// Floor for length `k` (1-based).
    pub fn floor(&self, k: usize) -> Support {
        self.per_length[k - 1]
    }

    /// Minimum floor over all lengths.
    pub fn global_floor(&self) -> Support {
        self.global
    }

    pub fn per_length(&self) -> &[Support] {
        &self.per_length
    }

    pub(crate) fn assign(
        &mut self,
        k: usize,
        value: Support,
        c: &mut MiningCounters,
        log: Option<&mut ThresholdLog>,
    ) {
        let old = self.per_length[k - 1];
        if value > old {
            c.threshold_raises += 1;
        } else if value < old {
            c.monotonicity_violations += 1;
            debug_assert!(false, "threshold for length {k} moved {old} -> {value}");
        }
        self.per_length[k - 1] = value;
        self.global = self.per_length.iter().copied().min().unwrap_or(0);
        if let Some(log) = log {
            log.per_length.push((k, value));
            log.global.push(self.global);
        }
    }
}

/// Weakest floor any itemset in a depth-`depth` node's subtree must still
/// meet: the minimum floor over the reachable lengths `depth+1..=kmax`.
/// A tail item whose support is below this cannot contribute anywhere.
pub fn effective_bound(depth: usize, tv: &ThresholdVector, kmax: usize) -> Support {
    debug_assert!(depth < kmax);
    (depth + 1..=kmax).map(|k| tv.floor(k)).min().unwrap_or(0)
}

#[derive(Default, Debug)]
struct LengthCollector {
    by_support: BTreeMap<Support, Vec<Vec<ItemId>>>,
    count: usize,
}

impl LengthCollector {
    /// Insert and, once `n` entries exist, return the n-th largest stored
    /// support after evicting everything below it. Boundary ties stay.
    fn offer(&mut self, items: Vec<ItemId>, support: Support, n: usize) -> Option<Support> {
        self.by_support.entry(support).or_default().push(items);
        self.count += 1;
        if self.count < n {
            return None;
        }
        let mut seen = 0;
        let mut nth = 0;
        for (&sup, bucket) in self.by_support.iter().rev() {
            seen += bucket.len();
            if seen >= n {
                nth = sup;
                break;
            }
        }
        let keep = self.by_support.split_off(&nth);
        let evicted: usize = self.by_support.values().map(Vec::len).sum();
        self.count -= evicted;
        self.by_support = keep;
        Some(nth)
    }

    fn drain(self) -> Vec<(Vec<ItemId>, Support)> {
        self.by_support
            .into_iter()
            .rev()
            .flat_map(|(sup, bucket)| bucket.into_iter().map(move |items| (items, sup)))
            .collect()
    }
}

/// Bounded per-length result collections with boundary-tie retention.
///
/// Offering an itemset may raise that length's floor in the supplied
/// [`ThresholdVector`] and evict entries that fell below it.
#[derive(Debug)]
pub struct TopNCollector {
    n: usize,
    lengths: Vec<LengthCollector>,
}

impl TopNCollector {
    pub fn new(n: usize, kmax: usize) -> TopNCollector {
        assert!(n >= 1 && kmax >= 1);
        TopNCollector {
            n,
            lengths: (0..kmax).map(|_| LengthCollector::default()).collect(),
        }
    }

    /// Number of itemsets currently stored at length `k`.
    pub fn len_at(&self, k: usize) -> usize {
        self.lengths[k - 1].count
    }

    /// Insert a length-`k` itemset. The caller filters: `support` must be at
    /// least `max(floor(k), 1)`.
    pub fn offer(
        &mut self,
        k: usize,
        items: Vec<ItemId>,
        support: Support,
        tv: &mut ThresholdVector,
        c: &mut MiningCounters,
        log: Option<&mut ThresholdLog>,
    ) {
        debug_assert!(support >= tv.floor(k).max(1));
        debug_assert_eq!(items.len(), k);
        c.offers += 1;
        if let Some(nth) = self.lengths[k - 1].offer(items, support, self.n) {
            tv.assign(k, nth, c, log);
        }
    }

    fn into_lengths(self) -> Vec<Vec<(Vec<ItemId>, Support)>> {
        self.lengths.into_iter().map(LengthCollector::drain).collect()
    }
}

/// Configuration for [`mine_nmost`].
#[derive(Clone, Debug)]
pub struct NMostConfig {
    /// How many top itemsets per length set the bar.
    pub n: usize,
    /// Longest itemset length mined.
    pub kmax: usize,
    pub order: OrderPolicy,
    /// Use the pair-support table to reject candidates before counting.
    pub pair_prune: bool,
    /// Build children during the counting sweep when the arena has room.
    pub fused: bool,
    pub word_width: WordWidth,
    /// Override the per-heap arena capacity in words.
    pub arena_words: Option<usize>,
    /// Record every threshold assignment in the report.
    pub log_thresholds: bool,
}

impl NMostConfig {
    pub fn new(n: usize, kmax: usize) -> NMostConfig {
        NMostConfig {
            n,
            kmax,
            order: OrderPolicy::default(),
            pair_prune: true,
            fused: true,
            word_width: WordWidth::default(),
            arena_words: None,
            log_thresholds: false,
        }
    }

    pub fn echo(&self) -> String {
        format!(
            "n={} kmax={} order={:?} pair_prune={} fused={} word_width={}",
            self.n,
            self.kmax,
            self.order,
            self.pair_prune,
            self.fused,
            self.word_width.bits()
        )
    }
}

/// Results per length: `lengths[k-1]` holds the length-k itemsets, highest
/// support first, label order breaking ties.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NMostResult {
    pub lengths: Vec<Vec<Itemset>>,
}

impl NMostResult {
    pub fn iter_all(&self) -> impl Iterator<Item = &Itemset> {
        self.lengths.iter().flatten()
    }

    pub fn total(&self) -> usize {
        self.lengths.iter().map(Vec::len).sum()
    }
}

struct Counted {
    item: ItemId,
    support: Support,
    handle: Option<HeadRef>,
}

struct Run<'a> {
    cfg: &'a NMostConfig,
    matrix: VerticalBitMatrix,
    arena: NodeArena,
    pair: Option<PairSupportTable>,
    remap: DensityRemap,
    tv: ThresholdVector,
    collector: TopNCollector,
    c: MiningCounters,
    log: Option<ThresholdLog>,
    head_path: Vec<ItemId>,
}

impl Run<'_> {
    fn keep_floor(&self, depth: usize) -> Support {
        effective_bound(depth, &self.tv, self.cfg.kmax).max(1)
    }

    fn offer_extension(&mut self, k: usize, x: ItemId, support: Support) {
        let mut items: Vec<ItemId> = self
            .head_path
            .iter()
            .map(|&i| self.remap.to_original(i))
            .collect();
        items.push(self.remap.to_original(x));
        items.sort_unstable();
        self.collector
            .offer(k, items, support, &mut self.tv, &mut self.c, self.log.as_mut());
    }

    fn visit(&mut self, head: HeadRef, depth: usize, tail: &[ItemId]) {
        self.c.nodes_visited += 1;
        let node_mark = self.arena.mark();
        let next_k = depth + 1;
        let expand_children = next_k < self.cfg.kmax;
        let mut kept: Vec<Counted> = Vec::new();

        for &x in tail {
            let floor = self.keep_floor(depth);
            if let Some(table) = &self.pair {
                if pair_prune(&self.head_path, x, table, floor) {
                    self.c.pair_prune_hits += 1;
                    continue;
                }
            }
            let entry_mark = self.arena.mark();
            let (support, handle) = if self.cfg.fused && expand_children {
                match self.arena.project_fused(&self.matrix, head, x, &mut self.c) {
                    Some((h, s)) => (s, Some(h)),
                    None => {
                        self.c.two_pass_fallbacks += 1;
                        (
                            self.arena.count(&self.matrix, head, x, PassKind::Count, &mut self.c),
                            None,
                        )
                    }
                }
            } else {
                (
                    self.arena.count(&self.matrix, head, x, PassKind::Count, &mut self.c),
                    None,
                )
            };
            if support == 0 {
                self.arena.restore(entry_mark);
                continue;
            }
            if support >= self.tv.floor(next_k).max(1) {
                self.offer_extension(next_k, x, support);
            }
            // the offer may have raised the reachable floors
            if expand_children && support >= self.keep_floor(depth) {
                kept.push(Counted { item: x, support, handle });
            } else {
                self.arena.restore(entry_mark);
            }
        }

        if !kept.is_empty() {
            order_tail(&mut kept, self.cfg.order, |e| (e.item, e.support));
            let kept_ids: Vec<ItemId> = kept.iter().map(|e| e.item).collect();
            for (i, entry) in kept.iter().enumerate() {
                if entry.support < self.keep_floor(depth) {
                    continue; // floors rose while a sibling subtree ran
                }
                let (child, passes) = match entry.handle {
                    Some(h) => (h, 1),
                    None => {
                        let (h, s) = self.arena.project_level(
                            &self.matrix,
                            head,
                            entry.item,
                            depth + 1,
                            &mut self.c,
                        );
                        debug_assert_eq!(s, entry.support);
                        (h, 2)
                    }
                };
                self.c.children_expanded += 1;
                self.c.expanded_child_passes += passes;
                self.head_path.push(entry.item);
                self.visit(child, depth + 1, &kept_ids[i + 1..]);
                self.head_path.pop();
            }
        }
        self.arena.restore(node_mark);
    }
}

/// Mine the N most frequent itemsets per length. Returns the per-length
/// result sets and the run report.
pub fn mine_nmost(ds: &TransactionDataset, cfg: &NMostConfig) -> (NMostResult, RunReport) {
    assert!(cfg.n >= 1, "n must be at least 1");
    assert!(cfg.kmax >= 1, "kmax must be at least 1");
    let start = Instant::now();
    let mut c = MiningCounters::default();
    let mut log = cfg.log_thresholds.then(ThresholdLog::default);
    let mut tv = ThresholdVector::new(cfg.kmax);
    let mut collector = TopNCollector::new(cfg.n, cfg.kmax);

    // Every single item is a length-1 candidate; collecting them first
    // raises the length-1 floor before anything else runs.
    let supports = ds.item_supports();
    let mut singles: Vec<(ItemId, Support)> = supports
        .iter()
        .enumerate()
        .filter(|&(_, &s)| s > 0)
        .map(|(i, &s)| (ItemId(i as u32), s))
        .collect();
    singles.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    for &(item, sup) in &singles {
        if sup >= tv.floor(1).max(1) {
            collector.offer(1, vec![item], sup, &mut tv, &mut c, log.as_mut());
        }
    }

    if cfg.kmax >= 2 && ds.num_transactions() > 0 {
        let floor = tv.global_floor().max(1);
        let (dense, remap) = ds.densify(floor);
        if dense.num_items() > 0 {
            let matrix = VerticalBitMatrix::build(&dense, cfg.word_width);
            let arena = NodeArena::for_matrix(&matrix, cfg.arena_words);
            let pair = cfg.pair_prune.then(|| build_pair_table(&matrix, &mut c));
            let mut run = Run {
                cfg,
                matrix,
                arena,
                pair,
                remap,
                tv,
                collector,
                c,
                log,
                head_path: Vec::new(),
            };
            run.c.nodes_visited += 1; // the root
            let dense_supports = dense.item_supports();
            let mut roots: Vec<(ItemId, Support)> = dense_supports
                .iter()
                .enumerate()
                .map(|(i, &s)| (ItemId(i as u32), s))
                .filter(|&(_, s)| s >= run.keep_floor(0))
                .collect();
            order_tail_pairs(&mut roots, cfg.order);
            let root_ids: Vec<ItemId> = roots.iter().map(|&(i, _)| i).collect();
            for (i, &(x, sup)) in roots.iter().enumerate() {
                if sup < run.keep_floor(0) {
                    continue;
                }
                run.c.root_children += 1;
                run.head_path.push(x);
                run.visit(HeadRef::Root(x), 1, &root_ids[i + 1..]);
                run.head_path.pop();
            }
            debug_assert_eq!(run.arena.heap_words_used(), 0);
            tv = run.tv;
            collector = run.collector;
            c = run.c;
            log = run.log;
        }
    }

    let mut lengths: Vec<Vec<Itemset>> = Vec::with_capacity(cfg.kmax);
    for entries in collector.into_lengths() {
        let mut sets: Vec<Itemset> = entries
            .into_iter()
            .map(|(items, support)| {
                let mut labels: Vec<_> = items.iter().map(|&i| ds.label(i)).collect();
                labels.sort_unstable();
                Itemset { labels, support }
            })
            .collect();
        sets.sort_by(|a, b| b.support.cmp(&a.support).then_with(|| a.labels.cmp(&b.labels)));
        lengths.push(sets);
    }
    let result = NMostResult { lengths };
    let report = RunReport {
        algorithm: "nmost",
        config: cfg.echo(),
        wall: start.elapsed(),
        counters: c,
        final_threshold: tv.global_floor(),
        final_length_thresholds: tv.per_length().to_vec(),
        results_per_length: result
            .lengths
            .iter()
            .enumerate()
            .map(|(i, v)| (i + 1, v.len()))
            .collect(),
        result_digest: result_digest(result.iter_all()),
        threshold_log: log,
    };
    (result, report)
}
