use std::collections::BTreeMap;

use super::{CoupledPedigree, NodeId, PedigreeError, Result};

/// 3-uniform hypergraph over the nodes of one level. Keys are sorted
/// triples; only nonzero multiplicities are stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SiblinghoodHypergraph {
    pub vertices: Vec<NodeId>,
    pub edges: BTreeMap<[NodeId; 3], u8>,
}

pub(crate) fn sorted3(mut t: [NodeId; 3]) -> [NodeId; 3] {
    t.sort_unstable();
    t
}

impl SiblinghoodHypergraph {
    pub fn new(vertices: Vec<NodeId>) -> Self {
        Self {
            vertices,
            edges: BTreeMap::new(),
        }
    }

    pub fn multiplicity(&self, t: [NodeId; 3]) -> u8 {
        self.edges.get(&sorted3(t)).copied().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Adds `mult` to a triple, capping at 2.
    pub fn add(&mut self, t: [NodeId; 3], mult: u8) {
        if mult == 0 {
            return;
        }
        let e = self.edges.entry(sorted3(t)).or_insert(0);
        *e = (*e + mult).min(2);
    }
}

impl CoupledPedigree {
    /// Siblinghood hypergraph of level `k`: a triple of nodes gets the number
    /// of distinct sibling triples of individuals across it, capped at 2.
    /// The count through a shared parent couple is the product of the edge
    /// multiplicities from that parent.
    pub fn siblinghood_hypergraph(&self, k: usize) -> Result<SiblinghoodHypergraph> {
        if k >= self.depth() {
            return Err(PedigreeError::InvalidLevel {
                level: k,
                depth: self.depth(),
            });
        }
        let mut g = SiblinghoodHypergraph::new(self.level(k).collect());
        for p in self.level(k + 1) {
            let kids = self.children(p);
            for i in 0..kids.len() {
                for j in i + 1..kids.len() {
                    for l in j + 1..kids.len() {
                        let m = kids[i].mult * kids[j].mult * kids[l].mult;
                        g.add([kids[i].node, kids[j].node, kids[l].node], m);
                    }
                }
            }
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pedigree::NodeLabel;

    fn n(i: u32) -> NodeId {
        NodeId(i)
    }

    #[test]
    fn sibling_couples_form_an_edge() {
        // level 0: 0..3 extant, level 1: couples 3,4,5, level 2: parents 6,7
        // couple 6 has three children 3,4,5 (one member each)
        let labels = vec![NodeLabel::Inferred; 8];
        let edges = [(n(6), n(3), 1), (n(6), n(4), 1), (n(6), n(5), 1), (n(3), n(0), 1)];
        let q = CoupledPedigree::from_edges(&[3, 3, 2], labels, &edges).unwrap();
        let g = q.siblinghood_hypergraph(1).unwrap();
        assert_eq!(g.multiplicity([n(5), n(3), n(4)]), 1);
        assert_eq!(g.edge_count(), 1);
        assert!(q.siblinghood_hypergraph(2).is_err());
        let g0 = q.siblinghood_hypergraph(0).unwrap();
        assert_eq!(g0.edge_count(), 0);
    }

    #[test]
    fn two_sibling_triples_give_multiplicity_two() {
        // couples 3,4,5 each have one member from parent 6 and one from 7
        let labels = vec![NodeLabel::Inferred; 8];
        let mut edges = Vec::new();
        for c in 3..6 {
            edges.push((n(6), n(c), 1));
            edges.push((n(7), n(c), 1));
        }
        let q = CoupledPedigree::from_edges(&[3, 3, 2], labels, &edges).unwrap();
        let g = q.siblinghood_hypergraph(1).unwrap();
        assert_eq!(g.multiplicity([n(3), n(4), n(5)]), 2);
    }

    #[test]
    fn double_edges_multiply() {
        // couple 3 is two siblings from 6, couples 4,5 one member each
        let labels = vec![NodeLabel::Inferred; 7];
        let edges = [(n(6), n(3), 2), (n(6), n(4), 1), (n(6), n(5), 1)];
        let q = CoupledPedigree::from_edges(&[3, 3, 1], labels, &edges).unwrap();
        let g = q.siblinghood_hypergraph(1).unwrap();
        assert_eq!(g.multiplicity([n(3), n(4), n(5)]), 2);
    }

    #[test]
    fn unrelated_have_no_edge() {
        let labels = vec![NodeLabel::Inferred; 5];
        let edges = [(n(3), n(0), 1), (n(3), n(1), 1), (n(4), n(2), 1)];
        let q = CoupledPedigree::from_edges(&[3, 2], labels, &edges).unwrap();
        let g = q.siblinghood_hypergraph(0).unwrap();
        assert_eq!(g.multiplicity([n(0), n(1), n(2)]), 0);
    }
}
