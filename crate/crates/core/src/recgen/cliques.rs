use std::collections::{BTreeMap, HashMap};

use crate::pedigree::hypergraph::sorted3;
use crate::pedigree::{NodeId, SiblinghoodHypergraph};

/// Peels cliques off a hypergraph in a fixed order.
///
/// Repeatedly seeds with the lexicographically smallest remaining triple,
/// grows it by the smallest vertex forming a remaining triple with every
/// pair of current members, then removes one copy of each internal triple.
/// Cliques are returned with members ascending.
pub fn extract_maximal_cliques(g: &SiblinghoodHypergraph) -> Vec<Vec<NodeId>> {
    let mut remaining: BTreeMap<[NodeId; 3], u8> = g.edges.clone();
    // third vertices of every pair, kept as a superset of what remains
    let mut by_pair: HashMap<(NodeId, NodeId), Vec<NodeId>> = HashMap::new();
    for &[a, b, c] in g.edges.keys() {
        by_pair.entry((a, b)).or_default().push(c);
        by_pair.entry((a, c)).or_default().push(b);
        by_pair.entry((b, c)).or_default().push(a);
    }
    for list in by_pair.values_mut() {
        list.sort_unstable();
    }
    let live = |rem: &BTreeMap<[NodeId; 3], u8>, t: [NodeId; 3]| rem.get(&sorted3(t)).is_some_and(|&m| m > 0);

    let mut cliques = Vec::new();
    while let Some((&seed, _)) = remaining.iter().next() {
        let mut members = seed.to_vec();
        loop {
            let (a, b) = (members[0], members[1]);
            let pool = by_pair.get(&(a, b)).map(Vec::as_slice).unwrap_or(&[]);
            let next = pool.iter().copied().find(|&x| {
                !members.contains(&x)
                    && members.iter().enumerate().all(|(i, &p)| {
                        members[i + 1..].iter().all(|&q| live(&remaining, [x, p, q]))
                    })
            });
            match next {
                Some(x) => {
                    members.push(x);
                    members.sort_unstable();
                }
                None => break,
            }
        }
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                for l in j + 1..members.len() {
                    let key = [members[i], members[j], members[l]];
                    if let Some(m) = remaining.get_mut(&key) {
                        *m -= 1;
                        if *m == 0 {
                            remaining.remove(&key);
                        }
                    }
                }
            }
        }
        cliques.push(members);
    }
    cliques
}
