use super::table::SymbolTable;
use crate::par;
use crate::pedigree::{NodeId, SiblinghoodHypergraph, NO_SYMBOL};

/// Smallest count that meets a fractional threshold of `blocks`.
pub fn min_count(threshold: f64, blocks: usize) -> usize {
    (threshold * blocks as f64 - 1e-9).ceil().max(0.0) as usize
}

/// Per-block inverted index over a set of table rows. For block `b`,
/// `order` lists row slots sorted by (symbol, row); `group_end[p]` is one
/// past the last position sharing the symbol at `p`; `pos` maps
/// `(row, slot)` back to its position (`u32::MAX` for empty slots).
struct OverlapIndex {
    width: usize,
    n: usize,
    offsets: Vec<usize>,
    order: Vec<u32>,
    group_end: Vec<u32>,
    pos: Vec<u32>,
}

impl OverlapIndex {
    fn build(table: &SymbolTable, rows: &[usize]) -> Self {
        let (width, blocks, n) = (table.width(), table.block_count(), rows.len());
        let per_block = par::map_range(blocks, |b| {
            let mut entries: Vec<(u64, u32)> = Vec::with_capacity(n * width);
            for (i, &r) in rows.iter().enumerate() {
                for (slot, &s) in table.block(r, b).iter().enumerate() {
                    if s != NO_SYMBOL {
                        entries.push((s, (i * width + slot) as u32));
                    }
                }
            }
            entries.sort_unstable();
            let mut group_end = vec![0u32; entries.len()];
            let mut start = 0;
            while start < entries.len() {
                let mut end = start + 1;
                while end < entries.len() && entries[end].0 == entries[start].0 {
                    end += 1;
                }
                group_end[start..end].fill(end as u32);
                start = end;
            }
            let order: Vec<u32> = entries.into_iter().map(|(_, key)| key).collect();
            (order, group_end)
        });
        let mut offsets = Vec::with_capacity(blocks + 1);
        offsets.push(0);
        let total: usize = per_block.iter().map(|(o, _)| o.len()).sum();
        let mut order = Vec::with_capacity(total);
        let mut group_end = Vec::with_capacity(total);
        let mut pos = vec![u32::MAX; blocks * n * width];
        for (b, (o, g)) in per_block.into_iter().enumerate() {
            let base = order.len();
            for (p, &key) in o.iter().enumerate() {
                pos[b * n * width + key as usize] = (base + p) as u32;
            }
            order.extend(o.into_iter());
            group_end.extend(g.into_iter().map(|e| e + base as u32));
            offsets.push(order.len());
        }
        Self {
            width,
            n,
            offsets,
            order,
            group_end,
            pos,
        }
    }

    fn blocks(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Rows `v > u` sharing at least `need` blocks with `u`, ascending.
    fn partners(&self, u: usize, need: usize, scratch: &mut Scratch) -> Vec<u32> {
        let w = self.width;
        for b in 0..self.blocks() {
            let stamp = b as u32 + 1;
            for slot in 0..w {
                let p = self.pos[(b * self.n + u) * w + slot];
                if p == u32::MAX {
                    continue;
                }
                let end = self.group_end[p as usize] as usize;
                for &key in &self.order[p as usize + 1..end] {
                    let v = key as usize / w;
                    if v == u || scratch.stamp[v] == stamp {
                        continue;
                    }
                    scratch.stamp[v] = stamp;
                    if scratch.count[v] == 0 {
                        scratch.touched.push(v as u32);
                    }
                    scratch.count[v] += 1;
                }
            }
        }
        let mut out: Vec<u32> = scratch
            .touched
            .iter()
            .copied()
            .filter(|&v| scratch.count[v as usize] as usize >= need)
            .collect();
        for &v in &scratch.touched {
            scratch.count[v as usize] = 0;
            scratch.stamp[v as usize] = 0;
        }
        scratch.touched.clear();
        out.sort_unstable();
        out
    }
}

struct Scratch {
    count: Vec<u32>,
    stamp: Vec<u32>,
    touched: Vec<u32>,
}

/// Outcome of one siblinghood test.
#[derive(Clone, Debug, Default)]
pub struct SiblinghoodResult {
    pub hypergraph: SiblinghoodHypergraph,
    pub candidate_pairs: usize,
}

/// Tests every triple of `nodes` (rows `rows` of `table`) for at least
/// `need` blocks of three-way symbol overlap.
///
/// A triple can only pass if each of its pairs shares `need` blocks, so
/// pairs are pruned first through an inverted index and only triangles of
/// surviving pairs are checked exactly.
pub fn test_siblinghood(nodes: &[NodeId], rows: &[usize], table: &SymbolTable, need: usize) -> SiblinghoodResult {
    assert_eq!(nodes.len(), rows.len());
    let need = need.max(1);
    let n = rows.len();
    let mut g = SiblinghoodHypergraph::new(nodes.to_vec());
    if n < 3 {
        return SiblinghoodResult {
            hypergraph: g,
            candidate_pairs: 0,
        };
    }
    let index = OverlapIndex::build(table, rows);
    let partners: Vec<Vec<u32>> = par::map_range_init(
        n,
        || Scratch {
            count: vec![0; n],
            stamp: vec![0; n],
            touched: Vec::new(),
        },
        |s, u| index.partners(u, need, s),
    );
    drop(index);
    let candidate_pairs = partners.iter().map(Vec::len).sum();
    let triples: Vec<Vec<[u32; 3]>> = par::map_range(n, |u| {
        let mine = &partners[u];
        let mut hits = Vec::new();
        for (i, &v) in mine.iter().enumerate() {
            let theirs = &partners[v as usize];
            for &w in &mine[i + 1..] {
                if theirs.binary_search(&w).is_ok()
                    && table.triple_overlap(rows[u], rows[v as usize], rows[w as usize]) >= need
                {
                    hits.push([u as u32, v, w]);
                }
            }
        }
        hits
    });
    for t in triples.into_iter().flatten() {
        g.add([nodes[t[0] as usize], nodes[t[1] as usize], nodes[t[2] as usize]], 1);
    }
    SiblinghoodResult {
        hypergraph: g,
        candidate_pairs,
    }
}
