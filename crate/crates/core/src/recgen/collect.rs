use crate::genmodel::ExtantData;
use crate::pedigree::structure::hall3;
use crate::pedigree::{CoupledPedigree, NodeId, Symbol, NO_SYMBOL};

/// Recovers up to two symbols per block for a node whose children have the
/// extant descendant rows `branches[j]` (each sorted).
///
/// A symbol is recorded when three distinct extant rows carry it, one
/// reachable through each of three distinct children, and no single child
/// reaches all three (so the node is their lowest common ancestor). At most
/// `attempts` candidate triples are tried per symbol. The result has two
/// slots per block, smaller symbol first, [`NO_SYMBOL`] when empty.
pub fn collect_from_branches(branches: &[&[u32]], extant: &ExtantData, attempts: usize) -> Vec<Symbol> {
    let blocks = extant.block_count();
    let mut out = vec![NO_SYMBOL; 2 * blocks];
    if branches.len() < 3 {
        return out;
    }
    let mut union: Vec<u32> = branches.iter().flat_map(|b| b.iter().copied()).collect();
    union.sort_unstable();
    union.dedup();
    let words = branches.len().div_ceil(64);
    let mut masks = vec![0u64; union.len() * words];
    for (j, branch) in branches.iter().enumerate() {
        for row in branch.iter() {
            let pos = union.binary_search(row).expect("row in union");
            masks[pos * words + j / 64] |= 1 << (j % 64);
        }
    }
    let mask = |pos: u32| &masks[pos as usize * words..(pos as usize + 1) * words];

    let mut items: Vec<(Symbol, u32)> = Vec::with_capacity(union.len());
    let mut found: Vec<Symbol> = Vec::with_capacity(2);
    for b in 0..blocks {
        items.clear();
        items.extend(
            union
                .iter()
                .enumerate()
                .map(|(pos, &row)| (extant.symbol(row as usize, b), pos as u32)),
        );
        items.sort_unstable();
        found.clear();
        let mut start = 0;
        while start < items.len() && found.len() < 2 {
            let sym = items[start].0;
            let mut end = start + 1;
            while end < items.len() && items[end].0 == sym {
                end += 1;
            }
            if end - start >= 3 && witnessed(&items[start..end], &mask, words, attempts) {
                found.push(sym);
            }
            start = end;
        }
        for (slot, &s) in found.iter().enumerate() {
            out[2 * b + slot] = s;
        }
    }
    out
}

fn witnessed<'a>(group: &[(Symbol, u32)], mask: &impl Fn(u32) -> &'a [u64], words: usize, attempts: usize) -> bool {
    // quick reject: fewer than three children reached by the whole group
    let mut any = vec![0u64; words];
    for &(_, pos) in group {
        for (w, m) in any.iter_mut().zip(mask(pos)) {
            *w |= m;
        }
    }
    if any.iter().map(|w| w.count_ones()).sum::<u32>() < 3 {
        return false;
    }
    let mut tried = 0;
    for i in 0..group.len() {
        for j in i + 1..group.len() {
            for l in j + 1..group.len() {
                if tried >= attempts {
                    return false;
                }
                tried += 1;
                let (a, b, c) = (mask(group[i].1), mask(group[j].1), mask(group[l].1));
                let shared = (0..words).any(|w| a[w] & b[w] & c[w] != 0);
                if !shared && hall3(a, b, c) {
                    return true;
                }
            }
        }
    }
    false
}

/// Extant rows below each node, assuming level 0 of `q` lists extant rows
/// in order.
pub fn extant_rows_below(q: &CoupledPedigree, v: NodeId) -> Vec<u32> {
    q.descendants(&[v])
        .expect("node of q")
        .into_iter()
        .take_while(|d| q.level_of(*d) == 0)
        .map(|d| d.0)
        .collect()
}

/// Collect-Symbols for node `v` of a reconstruction-shaped pedigree: level
/// 0 must hold the rows of `extant` in order.
pub fn collect_symbols(q: &CoupledPedigree, v: NodeId, extant: &ExtantData, attempts: usize) -> Vec<Symbol> {
    let branches: Vec<Vec<u32>> = q
        .children(v)
        .iter()
        .map(|e| extant_rows_below(q, e.node))
        .collect();
    let refs: Vec<&[u32]> = branches.iter().map(Vec::as_slice).collect();
    collect_from_branches(&refs, extant, attempts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(rows: Vec<Vec<Symbol>>) -> ExtantData {
        let b = rows[0].len();
        ExtantData::new(b, rows.into_iter().enumerate().map(|(i, r)| (i as u32, r)).collect()).unwrap()
    }

    #[test]
    fn three_children_sharing_a_symbol() {
        let e = data(vec![vec![7, 1], vec![7, 2], vec![7, 3]]);
        let out = collect_from_branches(&[&[0], &[1], &[2]], &e, 512);
        assert_eq!(&out[0..2], &[7, NO_SYMBOL]);
        assert_eq!(&out[2..4], &[NO_SYMBOL, NO_SYMBOL]);
    }

    #[test]
    fn two_of_three_is_not_enough() {
        let e = data(vec![vec![7], vec![7], vec![8]]);
        let out = collect_from_branches(&[&[0], &[1], &[2]], &e, 512);
        assert_eq!(out, vec![NO_SYMBOL, NO_SYMBOL]);
        // same symbol three times but only under two children
        let e = data(vec![vec![7], vec![7], vec![7]]);
        let out = collect_from_branches(&[&[0, 1], &[2], &[]], &e, 512);
        assert_eq!(out, vec![NO_SYMBOL, NO_SYMBOL]);
    }

    #[test]
    fn records_two_symbols_smallest_first() {
        let e = data(vec![vec![9], vec![9], vec![9], vec![4], vec![4], vec![4], vec![5], vec![5], vec![5]]);
        let b: Vec<Vec<u32>> = (0..3).map(|j| vec![j, j + 3, j + 6]).collect();
        let refs: Vec<&[u32]> = b.iter().map(Vec::as_slice).collect();
        let out = collect_from_branches(&refs, &e, 512);
        assert_eq!(out, vec![4, 5]);
    }

    #[test]
    fn shared_child_blocks_the_witness() {
        // rows 0,1,2 all sit under child 0 as well as a private child each:
        // child 0 is then a common ancestor, so v is not their lca
        let e = data(vec![vec![3], vec![3], vec![3]]);
        let out = collect_from_branches(&[&[0, 1, 2], &[1], &[2]], &e, 512);
        assert_eq!(out, vec![NO_SYMBOL, NO_SYMBOL]);
    }

    #[test]
    fn fewer_than_three_children_gives_empty_entry() {
        let e = data(vec![vec![3], vec![3], vec![3]]);
        let out = collect_from_branches(&[&[0, 1], &[2]], &e, 512);
        assert_eq!(out, vec![NO_SYMBOL, NO_SYMBOL]);
    }

    #[test]
    fn node_level_entry_point() {
        let e = data(vec![vec![7], vec![7], vec![7], vec![1]]);
        let mut q = CoupledPedigree::extant_only(e.ids());
        q.push_level(&[vec![NodeId(0), NodeId(1), NodeId(2)]]);
        assert_eq!(extant_rows_below(&q, NodeId(4)), vec![0, 1, 2]);
        assert_eq!(collect_symbols(&q, NodeId(4), &e, 512), vec![7, NO_SYMBOL]);
    }
}
