//! Vertical bit-vectors, word-level AND/popcount kernels, projected region
//! lists and the node arena the depth-first walk allocates from.
//!
//! Every item owns one bit row: bit `j` is set when the item occurs in
//! transaction `j`. Rows are split into words of a configurable logical
//! width (1..=64 bits backed by `u64` storage); support counting ANDs two
//! rows word by word and popcounts the result. Each search node keeps the
//! strictly increasing list of word indexes whose head word is still
//! nonzero, so descendants AND only those regions and skip the rest.

use crate::dataset::{ItemId, Support, TransactionDataset};
use crate::report::{MiningCounters, PassKind};

/// Logical word width in bits. 64 is the native default; 32 matches narrower
/// hosts; 1 gives one transaction per region, which is occasionally useful
/// for reading projections off by eye in tests.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct WordWidth(u8);

impl WordWidth {
    pub const W64: WordWidth = WordWidth(64);
    pub const W32: WordWidth = WordWidth(32);
    pub const W1: WordWidth = WordWidth(1);

    pub fn new(bits: u8) -> Option<WordWidth> {
        (1..=64).contains(&bits).then_some(WordWidth(bits))
    }

    pub fn bits(self) -> usize {
        self.0 as usize
    }
}

impl Default for WordWidth {
    fn default() -> Self {
        WordWidth::W64
    }
}

/// One item's transaction-occurrence row. Bits beyond the transaction count
/// in the last word stay zero, so popcounts never need masking.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitVector {
    words: Box<[u64]>,
}

impl BitVector {
    /// Build from the set-bit positions (transaction indexes).
    pub fn from_set_bits(bits: &[usize], num_transactions: usize, width: WordWidth) -> BitVector {
        let mut words = vec![0u64; words_for(num_transactions, width)].into_boxed_slice();
        for &j in bits {
            assert!(j < num_transactions);
            words[j / width.bits()] |= 1u64 << (j % width.bits());
        }
        BitVector { words }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn num_words(&self) -> usize {
        self.words.len()
    }

    pub fn popcount(&self) -> Support {
        self.words.iter().map(|w| w.count_ones()).sum()
    }
}

/// Strictly increasing word indexes whose head word is nonzero at some node.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProjectedBitRegions(Vec<u32>);

impl ProjectedBitRegions {
    pub fn indexes(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Indexes of all nonzero words of a row: the projection a root-level item
/// starts out with.
pub fn root_pbr(row: &BitVector) -> ProjectedBitRegions {
    ProjectedBitRegions(
        row.words
            .iter()
            .enumerate()
            .filter(|(_, &w)| w != 0)
            .map(|(i, _)| i as u32)
            .collect(),
    )
}

fn words_for(num_transactions: usize, width: WordWidth) -> usize {
    num_transactions.div_ceil(width.bits())
}

/// One bit row per item, all sharing the transaction axis.
#[derive(Clone, Debug)]
pub struct VerticalBitMatrix {
    rows: Vec<BitVector>,
    root_pbrs: Vec<ProjectedBitRegions>,
    num_transactions: usize,
    width: WordWidth,
    words_per_row: usize,
}

impl VerticalBitMatrix {
    /// Build rows for every item of a dataset with dense ids.
    pub fn build(ds: &TransactionDataset, width: WordWidth) -> VerticalBitMatrix {
        let num_transactions = ds.num_transactions();
        let words_per_row = words_for(num_transactions, width);
        let mut words: Vec<Box<[u64]>> = (0..ds.num_items())
            .map(|_| vec![0u64; words_per_row].into_boxed_slice())
            .collect();
        for (j, t) in ds.transactions().iter().enumerate() {
            let (word, bit) = (j / width.bits(), j % width.bits());
            for &id in t.items() {
                words[id.idx()][word] |= 1u64 << bit;
            }
        }
        let rows: Vec<BitVector> = words.into_iter().map(|w| BitVector { words: w }).collect();
        let root_pbrs = rows.iter().map(root_pbr).collect();
        VerticalBitMatrix {
            rows,
            root_pbrs,
            num_transactions,
            width,
            words_per_row,
        }
    }

    pub fn num_items(&self) -> usize {
        self.rows.len()
    }

    pub fn num_transactions(&self) -> usize {
        self.num_transactions
    }

    pub fn width(&self) -> WordWidth {
        self.width
    }

    pub fn words_per_row(&self) -> usize {
        self.words_per_row
    }

    pub fn row(&self, item: ItemId) -> &BitVector {
        &self.rows[item.idx()]
    }

    pub fn row_words(&self, item: ItemId) -> &[u64] {
        self.rows[item.idx()].words()
    }

    pub fn root_regions(&self, item: ItemId) -> &ProjectedBitRegions {
        &self.root_pbrs[item.idx()]
    }
}

/// AND a head row against an item row over the projected regions and count
/// result bits. `head_words` is addressed by region index (a full-length
/// row).
pub fn count_and(head_words: &[u64], item_words: &[u64], pbr: &[u32]) -> Support {
    let mut support = 0;
    for &l in pbr {
        support += (head_words[l as usize] & item_words[l as usize]).count_ones();
    }
    support
}

/// Plain two-pass-style projection without an arena: AND over the projected
/// regions, keep nonzero results and their indexes. Returns the child's
/// packed words, its region list and the support.
pub fn project_two_pass(
    head_words: &[u64],
    item_words: &[u64],
    pbr: &[u32],
) -> (Vec<u64>, Vec<u32>, Support) {
    let mut words = Vec::new();
    let mut regions = Vec::new();
    let mut support = 0;
    for &l in pbr {
        let r = head_words[l as usize] & item_words[l as usize];
        if r != 0 {
            words.push(r);
            regions.push(l);
            support += r.count_ones();
        }
    }
    (words, regions, support)
}

/// Where a node's head words and region list live.
///
/// Root nodes read straight from the matrix (full-length rows); deeper nodes
/// read packed words from the arena heaps or from the per-depth fallback
/// buffers. Packed storage keeps `words[i]` for region `regions[i]`.
#[derive(Clone, Copy, Debug)]
pub enum HeadRef {
    /// A single root item: full row plus its nonzero-region list.
    Root(ItemId),
    /// Packed region in the fused heaps.
    Heap { woff: usize, ioff: usize, len: usize },
    /// Packed region in the per-depth fallback buffer.
    Level { depth: usize, len: usize },
}

/// Watermarks for LIFO release of heap storage.
#[derive(Clone, Copy, Debug)]
pub struct ArenaMark {
    wlen: usize,
    ilen: usize,
}

struct LevelBuf {
    words: Box<[u64]>,
    regions: Box<[u32]>,
}

/// Per-run projection storage: one word heap and one region-index heap for
/// fused projection, released in LIFO order as the depth-first walk unwinds,
/// plus one fallback buffer per tree depth for the two-pass route. A
/// capacity check precedes every fused allocation; when the heaps are full
/// the caller falls back to count-then-project.
pub struct NodeArena {
    heap_words: Box<[u64]>,
    heap_regions: Box<[u32]>,
    wlen: usize,
    ilen: usize,
    levels: Vec<LevelBuf>,
    words_per_row: usize,
}

impl NodeArena {
    pub fn new(words_per_row: usize, heap_capacity_words: usize) -> NodeArena {
        NodeArena {
            heap_words: vec![0u64; heap_capacity_words].into_boxed_slice(),
            heap_regions: vec![0u32; heap_capacity_words].into_boxed_slice(),
            wlen: 0,
            ilen: 0,
            levels: Vec::new(),
            words_per_row,
        }
    }

    /// Default sizing: each heap holds twice the words of one full row.
    pub fn for_matrix(matrix: &VerticalBitMatrix, capacity_override: Option<usize>) -> NodeArena {
        let cap = capacity_override.unwrap_or(2 * matrix.words_per_row());
        NodeArena::new(matrix.words_per_row(), cap)
    }

    pub fn mark(&self) -> ArenaMark {
        ArenaMark { wlen: self.wlen, ilen: self.ilen }
    }

    pub fn restore(&mut self, mark: ArenaMark) {
        debug_assert!(mark.wlen <= self.wlen && mark.ilen <= self.ilen);
        self.wlen = mark.wlen;
        self.ilen = mark.ilen;
    }

    pub fn heap_words_used(&self) -> usize {
        self.wlen
    }

    pub fn has_room(&self, words_needed: usize) -> bool {
        self.wlen + words_needed <= self.heap_words.len()
            && self.ilen + words_needed <= self.heap_regions.len()
    }

    pub fn head_len(&self, matrix: &VerticalBitMatrix, head: HeadRef) -> usize {
        match head {
            HeadRef::Root(item) => matrix.root_regions(item).len(),
            HeadRef::Heap { len, .. } | HeadRef::Level { len, .. } => len,
        }
    }

    /// Copy of a head's region list, mainly for inspection and tests.
    pub fn head_regions(&self, matrix: &VerticalBitMatrix, head: HeadRef) -> Vec<u32> {
        match head {
            HeadRef::Root(item) => matrix.root_regions(item).indexes().to_vec(),
            HeadRef::Heap { ioff, len, .. } => self.heap_regions[ioff..ioff + len].to_vec(),
            HeadRef::Level { depth, len } => self.levels[depth].regions[..len].to_vec(),
        }
    }

    fn book_pass(&self, pbr_len: usize, kind: PassKind, c: &mut MiningCounters) {
        match kind {
            PassKind::Count => c.count_passes += 1,
            PassKind::Fused => c.fused_passes += 1,
            PassKind::Project => c.project_passes += 1,
            PassKind::Closure => c.closure_passes += 1,
            PassKind::PairTable => c.pair_table_passes += 1,
        }
        c.and_word_ops += pbr_len as u64;
        c.pbr_words_skipped += (self.words_per_row - pbr_len) as u64;
    }

    /// Support of `head AND item` over the head's projected regions.
    pub fn count(
        &self,
        matrix: &VerticalBitMatrix,
        head: HeadRef,
        item: ItemId,
        kind: PassKind,
        c: &mut MiningCounters,
    ) -> Support {
        let item_words = matrix.row_words(item);
        let support = match head {
            HeadRef::Root(h) => count_and(
                matrix.row_words(h),
                item_words,
                matrix.root_regions(h).indexes(),
            ),
            HeadRef::Heap { woff, ioff, len } => count_packed(
                &self.heap_words[woff..woff + len],
                &self.heap_regions[ioff..ioff + len],
                item_words,
            ),
            HeadRef::Level { depth, len } => {
                let buf = &self.levels[depth];
                count_packed(&buf.words[..len], &buf.regions[..len], item_words)
            }
        };
        self.book_pass(self.head_len(matrix, head), kind, c);
        support
    }

    /// Fused pass: count and build the child in one sweep, writing packed
    /// words and regions into the heaps. Returns `None` without touching
    /// anything when the heaps cannot hold a worst-case child.
    pub fn project_fused(
        &mut self,
        matrix: &VerticalBitMatrix,
        head: HeadRef,
        item: ItemId,
        c: &mut MiningCounters,
    ) -> Option<(HeadRef, Support)> {
        let need = self.head_len(matrix, head);
        if !self.has_room(need) {
            return None;
        }
        let item_words = matrix.row_words(item);
        let (woff, ioff) = (self.wlen, self.ilen);
        let (len, support) = match head {
            HeadRef::Root(h) => fused_kernel(
                matrix.row_words(h),
                matrix.root_regions(h).indexes(),
                false,
                item_words,
                &mut self.heap_words[woff..],
                &mut self.heap_regions[ioff..],
            ),
            HeadRef::Heap { woff: hw, ioff: hi, len } => {
                let (wr, ww) = self.heap_words.split_at_mut(woff);
                let (ir, iw) = self.heap_regions.split_at_mut(ioff);
                fused_kernel(&wr[hw..hw + len], &ir[hi..hi + len], true, item_words, ww, iw)
            }
            HeadRef::Level { depth, len } => {
                let buf = &self.levels[depth];
                fused_kernel(
                    &buf.words[..len],
                    &buf.regions[..len],
                    true,
                    item_words,
                    &mut self.heap_words[woff..],
                    &mut self.heap_regions[ioff..],
                )
            }
        };
        self.wlen += len;
        self.ilen += len;
        self.book_pass(need, PassKind::Fused, c);
        Some((HeadRef::Heap { woff, ioff, len }, support))
    }

    /// Second-pass projection into the fallback buffer for `dest_depth`.
    /// Used when fusion is disabled or the heaps were full at counting time.
    pub fn project_level(
        &mut self,
        matrix: &VerticalBitMatrix,
        head: HeadRef,
        item: ItemId,
        dest_depth: usize,
        c: &mut MiningCounters,
    ) -> (HeadRef, Support) {
        while self.levels.len() <= dest_depth {
            self.levels.push(LevelBuf {
                words: vec![0u64; self.words_per_row].into_boxed_slice(),
                regions: vec![0u32; self.words_per_row].into_boxed_slice(),
            });
        }
        let head_len = self.head_len(matrix, head);
        let item_words = matrix.row_words(item);
        let (len, support) = match head {
            HeadRef::Root(h) => {
                let buf = &mut self.levels[dest_depth];
                fused_kernel(
                    matrix.row_words(h),
                    matrix.root_regions(h).indexes(),
                    false,
                    item_words,
                    &mut buf.words,
                    &mut buf.regions,
                )
            }
            HeadRef::Heap { woff, ioff, len } => {
                let buf = &mut self.levels[dest_depth];
                fused_kernel(
                    &self.heap_words[woff..woff + len],
                    &self.heap_regions[ioff..ioff + len],
                    true,
                    item_words,
                    &mut buf.words,
                    &mut buf.regions,
                )
            }
            HeadRef::Level { depth, len } => {
                debug_assert!(depth < dest_depth);
                let (lo, hi) = self.levels.split_at_mut(dest_depth);
                let src = &lo[depth];
                let buf = &mut hi[0];
                fused_kernel(
                    &src.words[..len],
                    &src.regions[..len],
                    true,
                    item_words,
                    &mut buf.words,
                    &mut buf.regions,
                )
            }
        };
        self.book_pass(head_len, PassKind::Project, c);
        (HeadRef::Level { depth: dest_depth, len }, support)
    }
}

fn count_packed(head_words: &[u64], regions: &[u32], item_words: &[u64]) -> Support {
    let mut support = 0;
    for (j, &l) in regions.iter().enumerate() {
        support += (head_words[j] & item_words[l as usize]).count_ones();
    }
    support
}

fn fused_kernel(
    head_words: &[u64],
    regions: &[u32],
    packed: bool,
    item_words: &[u64],
    out_words: &mut [u64],
    out_regions: &mut [u32],
) -> (usize, Support) {
    let mut n = 0;
    let mut support = 0;
    for (j, &l) in regions.iter().enumerate() {
        let h = if packed { head_words[j] } else { head_words[l as usize] };
        let r = h & item_words[l as usize];
        if r != 0 {
            out_words[n] = r;
            out_regions[n] = l;
            n += 1;
            support += r.count_ones();
        }
    }
    (n, support)
}
