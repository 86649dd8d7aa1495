//! Run instrumentation: exact event counters, threshold logs and the final
//! run report emitted by the miners and the CLI.

use std::time::Duration;

use crate::dataset::Support;
use crate::search::Itemset;

/// What a bit-vector AND pass was spent on; selects the counter it lands in.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PassKind {
    /// Support counting during tail processing.
    Count,
    /// Fused counting + child construction in one sweep.
    Fused,
    /// Second sweep that builds a child after a plain counting pass.
    Project,
    /// Single-item extension probe for a closedness decision.
    Closure,
    /// Pair-support table construction at the root.
    PairTable,
}

/// Exact event counts for one mining run. Every field is a true counter,
/// never an estimate.
#[derive(Clone, Default, Debug)]
pub struct MiningCounters {
    /// Search nodes whose tail was processed (root included).
    pub nodes_visited: u64,
    /// Depth-1 children built straight from matrix rows (no AND pass).
    pub root_children: u64,
    /// Children built by AND projection (depth 2 and deeper).
    pub children_expanded: u64,
    /// Plain counting passes.
    pub count_passes: u64,
    /// Fused count+project passes.
    pub fused_passes: u64,
    /// Second projection passes (two-pass route).
    pub project_passes: u64,
    /// Closedness probe passes.
    pub closure_passes: u64,
    /// Pair-table construction passes.
    pub pair_table_passes: u64,
    /// AND passes spent on children that were expanded (1 per fused child,
    /// 2 per two-pass child).
    pub expanded_child_passes: u64,
    /// Times the fused route was requested but the arena had no room.
    pub two_pass_fallbacks: u64,
    /// Candidates rejected by the pair table before any counting.
    pub pair_prune_hits: u64,
    /// Word-level AND operations actually performed.
    pub and_word_ops: u64,
    /// Words a full-vector sweep would have touched but the projected
    /// region list skipped.
    pub pbr_words_skipped: u64,
    /// Result offers accepted by a collector.
    pub offers: u64,
    /// Threshold assignments that increased a threshold.
    pub threshold_raises: u64,
    /// Threshold assignments that went backwards (always zero unless the
    /// collector is broken).
    pub monotonicity_violations: u64,
}

/// Chronological threshold assignments, recorded when a run asks for them.
#[derive(Clone, Default, Debug)]
pub struct ThresholdLog {
    /// Every value assigned to the global floor, in order.
    pub global: Vec<Support>,
    /// Every `(length, value)` assignment to a per-length floor, in order.
    pub per_length: Vec<(usize, Support)>,
}

impl ThresholdLog {
    /// True when the global sequence and each per-length sequence never
    /// decrease.
    pub fn is_monotone(&self) -> bool {
        if self.global.windows(2).any(|w| w[0] > w[1]) {
            return false;
        }
        let mut last: std::collections::HashMap<usize, Support> = std::collections::HashMap::new();
        for &(k, v) in &self.per_length {
            if let Some(&prev) = last.get(&k) {
                if v < prev {
                    return false;
                }
            }
            last.insert(k, v);
        }
        true
    }
}

/// Summary of one mining run.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub algorithm: &'static str,
    /// Flat echo of the configuration the run used.
    pub config: String,
    pub wall: Duration,
    pub counters: MiningCounters,
    /// Final global support floor.
    pub final_threshold: Support,
    /// Final per-length floors (N-most only).
    pub final_length_thresholds: Vec<Support>,
    /// `(length, result count)` per non-empty length.
    pub results_per_length: Vec<(usize, usize)>,
    /// Order-independent digest of the result set.
    pub result_digest: u64,
    pub threshold_log: Option<ThresholdLog>,
}

impl RunReport {
    /// One `key=value` line per field, for the CLI's side channel.
    pub fn render_lines(&self) -> Vec<String> {
        let c = &self.counters;
        let mut out = vec![
            format!("algorithm={}", self.algorithm),
            format!("config={}", self.config),
            format!("wall_ms={}", self.wall.as_millis()),
            format!("result_digest={:016x}", self.result_digest),
            format!("final_threshold={}", self.final_threshold),
        ];
        if !self.final_length_thresholds.is_empty() {
            let xs: Vec<String> = self.final_length_thresholds.iter().map(u32::to_string).collect();
            out.push(format!("final_length_thresholds={}", xs.join(",")));
        }
        let counts: Vec<String> = self
            .results_per_length
            .iter()
            .map(|(k, n)| format!("{k}:{n}"))
            .collect();
        out.push(format!("results_per_length={}", counts.join(",")));
        out.push(format!("nodes_visited={}", c.nodes_visited));
        out.push(format!("root_children={}", c.root_children));
        out.push(format!("children_expanded={}", c.children_expanded));
        out.push(format!("count_passes={}", c.count_passes));
        out.push(format!("fused_passes={}", c.fused_passes));
        out.push(format!("project_passes={}", c.project_passes));
        out.push(format!("closure_passes={}", c.closure_passes));
        out.push(format!("pair_table_passes={}", c.pair_table_passes));
        out.push(format!("expanded_child_passes={}", c.expanded_child_passes));
        out.push(format!("two_pass_fallbacks={}", c.two_pass_fallbacks));
        out.push(format!("pair_prune_hits={}", c.pair_prune_hits));
        out.push(format!("and_word_ops={}", c.and_word_ops));
        out.push(format!("pbr_words_skipped={}", c.pbr_words_skipped));
        out.push(format!("offers={}", c.offers));
        out.push(format!("threshold_raises={}", c.threshold_raises));
        out.push(format!("monotonicity_violations={}", c.monotonicity_violations));
        out
    }
}

fn fnv1a(bytes: impl IntoIterator<Item = u8>) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Order-independent digest of a result set: per-itemset FNV over the label
/// sequence and support, combined with a commutative sum.
pub fn result_digest<'a>(itemsets: impl IntoIterator<Item = &'a Itemset>) -> u64 {
    let mut acc = 0u64;
    for set in itemsets {
        let bytes = set
            .labels
            .iter()
            .flat_map(|l| l.0.to_le_bytes())
            .chain(set.support.to_le_bytes())
            .chain((set.labels.len() as u32).to_le_bytes());
        acc = acc.wrapping_add(fnv1a(bytes));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::ItemLabel;

    fn set(labels: &[u32], support: Support) -> Itemset {
        Itemset {
            labels: labels.iter().map(|&l| ItemLabel(l)).collect(),
            support,
        }
    }

    #[test]
    fn digest_is_order_independent() {
        let a = [set(&[1, 2], 4), set(&[3], 3)];
        let b = [set(&[3], 3), set(&[1, 2], 4)];
        assert_eq!(result_digest(a.iter()), result_digest(b.iter()));
    }

    #[test]
    fn digest_distinguishes_support_and_items() {
        let a = [set(&[1, 2], 4)];
        let b = [set(&[1, 2], 3)];
        let c = [set(&[1, 3], 4)];
        assert_ne!(result_digest(a.iter()), result_digest(b.iter()));
        assert_ne!(result_digest(a.iter()), result_digest(c.iter()));
    }

    #[test]
    fn monotone_log_checks() {
        let ok = ThresholdLog {
            global: vec![0, 1, 1, 4],
            per_length: vec![(1, 2), (2, 1), (1, 2), (2, 5)],
        };
        assert!(ok.is_monotone());
        let bad = ThresholdLog {
            global: vec![2, 1],
            per_length: vec![],
        };
        assert!(!bad.is_monotone());
    }
}
