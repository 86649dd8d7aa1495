//! Top-K closed mining: the K most frequent closed itemsets with at least
//! `min_l` items, found without any caller-supplied support threshold.
//!
//! A single global floor starts at zero and rises to the K-th best stored
//! support as closed itemsets accumulate. Closedness is decided exactly, by
//! probing every single-item extension (tail supports come free from the
//! counting sweep; exclusion items cost one AND pass each); the result list
//! doubles as a support-bucketed superset index so an already-stored
//! equal-support superset usually settles the question first.

use std::collections::BTreeMap;
use std::time::Instant;

use crate::bitmat::{HeadRef, NodeArena, VerticalBitMatrix, WordWidth};
use crate::dataset::{DensityRemap, ItemId, Support, TransactionDataset};
use crate::report::{result_digest, MiningCounters, PassKind, RunReport, ThresholdLog};
use crate::search::{
    build_pair_table, order_tail, order_tail_pairs, pair_prune, Itemset, OrderPolicy,
    PairSupportTable,
};

/// Configuration for [`mine_topk`].
#[derive(Clone, Debug)]
pub struct TopKConfig {
    /// How many closed itemsets set the bar.
    pub k: usize,
    /// Minimum itemset length admitted to the results (inclusive). Short
    /// heads are still searched; they just cannot enter the list.
    pub min_l: usize,
    pub order: OrderPolicy,
    pub pair_prune: bool,
    pub fused: bool,
    pub word_width: WordWidth,
    pub arena_words: Option<usize>,
    pub log_thresholds: bool,
    /// Consult the result list for an equal-support superset before running
    /// extension probes.
    pub list_prefilter: bool,
}

impl TopKConfig {
    pub fn new(k: usize, min_l: usize) -> TopKConfig {
        TopKConfig {
            k,
            min_l,
            order: OrderPolicy::default(),
            pair_prune: true,
            fused: true,
            word_width: WordWidth::default(),
            arena_words: None,
            log_thresholds: false,
            list_prefilter: true,
        }
    }

    pub fn echo(&self) -> String {
        format!(
            "k={} min_l={} order={:?} pair_prune={} fused={} word_width={}",
            self.k,
            self.min_l,
            self.order,
            self.pair_prune,
            self.fused,
            self.word_width.bits()
        )
    }
}

/// Bounded result list with boundary-tie retention and a support-keyed
/// superset index.
#[derive(Debug)]
pub struct TopKList {
    by_support: BTreeMap<Support, Vec<Vec<ItemId>>>,
    count: usize,
    k: usize,
    floor: Support,
}

impl TopKList {
    pub fn new(k: usize) -> TopKList {
        assert!(k >= 1);
        TopKList { by_support: BTreeMap::new(), count: 0, k, floor: 0 }
    }

    /// Current support floor: the K-th largest stored support once K entries
    /// exist, zero before that.
    pub fn floor(&self) -> Support {
        self.floor
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Insert a closed itemset (sorted ids). The caller filters: `support`
    /// must be at least `max(floor, 1)` and the length at least `min_l`.
    pub fn offer(
        &mut self,
        items: Vec<ItemId>,
        support: Support,
        c: &mut MiningCounters,
        log: Option<&mut ThresholdLog>,
    ) {
        debug_assert!(support >= self.floor.max(1));
        c.offers += 1;
        self.by_support.entry(support).or_default().push(items);
        self.count += 1;
        if self.count < self.k {
            return;
        }
        let mut seen = 0;
        let mut kth = 0;
        for (&sup, bucket) in self.by_support.iter().rev() {
            seen += bucket.len();
            if seen >= self.k {
                kth = sup;
                break;
            }
        }
        let keep = self.by_support.split_off(&kth);
        let evicted: usize = self.by_support.values().map(Vec::len).sum();
        self.count -= evicted;
        self.by_support = keep;
        if kth > self.floor {
            c.threshold_raises += 1;
        } else if kth < self.floor {
            c.monotonicity_violations += 1;
            debug_assert!(false, "top-k floor moved {} -> {kth}", self.floor);
        }
        self.floor = kth;
        if let Some(log) = log {
            log.global.push(kth);
        }
    }

    /// Does the list hold a strict superset of `items` at exactly this
    /// support? If so, `items` cannot be closed.
    pub fn has_equal_support_superset(&self, items: &[ItemId], support: Support) -> bool {
        self.by_support
            .get(&support)
            .is_some_and(|bucket| {
                bucket
                    .iter()
                    .any(|stored| stored.len() > items.len() && is_sorted_subset(items, stored))
            })
    }

    fn drain(self) -> Vec<(Vec<ItemId>, Support)> {
        self.by_support
            .into_iter()
            .rev()
            .flat_map(|(sup, bucket)| bucket.into_iter().map(move |items| (items, sup)))
            .collect()
    }
}

fn is_sorted_subset(needle: &[ItemId], haystack: &[ItemId]) -> bool {
    let mut it = haystack.iter();
    needle.iter().all(|x| it.by_ref().any(|y| y == x))
}

/// Mined closed itemsets, highest support first, then shorter first, then
/// label order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TopKResult {
    pub itemsets: Vec<Itemset>,
}

struct Counted {
    item: ItemId,
    support: Support,
    handle: Option<HeadRef>,
}

struct Run<'a> {
    cfg: &'a TopKConfig,
    matrix: VerticalBitMatrix,
    arena: NodeArena,
    pair: Option<PairSupportTable>,
    remap: DensityRemap,
    list: TopKList,
    c: MiningCounters,
    log: Option<ThresholdLog>,
    head_path: Vec<ItemId>,
    excl_stack: Vec<ItemId>,
}

impl Run<'_> {
    fn keep_floor(&self) -> Support {
        self.list.floor().max(1)
    }

    /// Exact closedness: no single-item extension over tail or exclusion may
    /// match the head's support. Tail supports are already counted; the
    /// stored-superset prefilter may settle it without any probe.
    fn head_is_closed(
        &mut self,
        head: HeadRef,
        head_support: Support,
        counted: &[Counted],
        orig_items: &[ItemId],
    ) -> bool {
        if self.cfg.list_prefilter
            && self.list.has_equal_support_superset(orig_items, head_support)
        {
            return false;
        }
        if counted.iter().any(|e| e.support == head_support) {
            return false;
        }
        for &e in &self.excl_stack {
            let probe = self.arena.count(&self.matrix, head, e, PassKind::Closure, &mut self.c);
            if probe == head_support {
                return false;
            }
        }
        true
    }

    fn visit(&mut self, head: HeadRef, head_support: Support, depth: usize, tail: &[ItemId]) {
        self.c.nodes_visited += 1;
        let node_mark = self.arena.mark();
        let excl_mark = self.excl_stack.len();
        let floor = self.keep_floor();
        let mut kept: Vec<Counted> = Vec::new();

        for &x in tail {
            if let Some(table) = &self.pair {
                if pair_prune(&self.head_path, x, table, floor) {
                    self.c.pair_prune_hits += 1;
                    continue;
                }
            }
            let entry_mark = self.arena.mark();
            let (support, handle) = if self.cfg.fused {
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
            if support >= floor {
                kept.push(Counted { item: x, support, handle });
            } else {
                self.arena.restore(entry_mark);
            }
        }

        if depth >= self.cfg.min_l && head_support >= floor {
            let mut orig_items: Vec<ItemId> = self
                .head_path
                .iter()
                .map(|&i| self.remap.to_original(i))
                .collect();
            orig_items.sort_unstable();
            if self.head_is_closed(head, head_support, &kept, &orig_items) {
                self.list
                    .offer(orig_items, head_support, &mut self.c, self.log.as_mut());
            }
        }

        if !kept.is_empty() {
            order_tail(&mut kept, self.cfg.order, |e| (e.item, e.support));
            let kept_ids: Vec<ItemId> = kept.iter().map(|e| e.item).collect();
            for (i, entry) in kept.iter().enumerate() {
                if entry.support >= self.keep_floor() {
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
                    self.visit(child, entry.support, depth + 1, &kept_ids[i + 1..]);
                    self.head_path.pop();
                }
                self.excl_stack.push(entry.item);
            }
        }
        self.excl_stack.truncate(excl_mark);
        self.arena.restore(node_mark);
    }
}

/// Mine the K most frequent closed itemsets with at least `min_l` items.
pub fn mine_topk(ds: &TransactionDataset, cfg: &TopKConfig) -> (TopKResult, RunReport) {
    assert!(cfg.k >= 1, "k must be at least 1");
    assert!(cfg.min_l >= 1, "min_l must be at least 1");
    let start = Instant::now();
    let mut c = MiningCounters::default();
    let mut log = cfg.log_thresholds.then(ThresholdLog::default);
    let mut list = TopKList::new(cfg.k);

    if ds.num_transactions() > 0 {
        let (dense, remap) = ds.densify(1);
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
                list,
                c,
                log,
                head_path: Vec::new(),
                excl_stack: Vec::new(),
            };
            run.c.nodes_visited += 1; // the root
            let dense_supports = dense.item_supports();
            let mut roots: Vec<(ItemId, Support)> = dense_supports
                .iter()
                .enumerate()
                .map(|(i, &s)| (ItemId(i as u32), s))
                .filter(|&(_, s)| s >= run.keep_floor())
                .collect();
            order_tail_pairs(&mut roots, cfg.order);
            let root_ids: Vec<ItemId> = roots.iter().map(|&(i, _)| i).collect();
            for (i, &(x, sup)) in roots.iter().enumerate() {
                if sup >= run.keep_floor() {
                    run.c.root_children += 1;
                    run.head_path.push(x);
                    run.visit(HeadRef::Root(x), sup, 1, &root_ids[i + 1..]);
                    run.head_path.pop();
                }
                run.excl_stack.push(x);
            }
            run.excl_stack.clear();
            debug_assert_eq!(run.arena.heap_words_used(), 0);
            list = run.list;
            c = run.c;
            log = run.log;
        }
    }

    let final_floor = list.floor();
    let mut itemsets: Vec<Itemset> = list
        .drain()
        .into_iter()
        .map(|(items, support)| {
            let mut labels: Vec<_> = items.iter().map(|&i| ds.label(i)).collect();
            labels.sort_unstable();
            Itemset { labels, support }
        })
        .collect();
    itemsets.sort_by(|a, b| {
        b.support
            .cmp(&a.support)
            .then(a.labels.len().cmp(&b.labels.len()))
            .then_with(|| a.labels.cmp(&b.labels))
    });
    let result = TopKResult { itemsets };
    let mut per_length: BTreeMap<usize, usize> = BTreeMap::new();
    for s in &result.itemsets {
        *per_length.entry(s.labels.len()).or_insert(0) += 1;
    }
    let report = RunReport {
        algorithm: "topk",
        config: cfg.echo(),
        wall: start.elapsed(),
        counters: c,
        final_threshold: final_floor,
        final_length_thresholds: Vec::new(),
        results_per_length: per_length.into_iter().collect(),
        result_digest: result_digest(result.itemsets.iter()),
        threshold_log: log,
    };
    (result, report)
}
