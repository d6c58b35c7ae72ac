use std::collections::HashMap;

use smallvec::SmallVec;

use super::individual::canonical;
use super::{IndId, IndividualPedigree, NodeId, PedigreeError, Result};

/// What a coupled node stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeLabel {
    /// A level-0 node: one extant individual.
    Extant(IndId),
    /// A merged couple, stored as `(min, max)`.
    Couple(IndId, IndId),
    /// A node created by reconstruction with no individual identity.
    Inferred,
}

/// One endpoint of an edge together with its multiplicity (1 or 2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub node: NodeId,
    pub mult: u8,
}

/// Graded DAG of couple nodes. Level 0 holds extant singleton nodes.
///
/// Node ids are dense and level-major: level `t` is the contiguous range
/// `level_start[t]..level_start[t + 1]`. Parent and child lists are sorted
/// by node id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoupledPedigree {
    level_start: Vec<u32>,
    labels: Vec<NodeLabel>,
    parents: Vec<SmallVec<[Edge; 2]>>,
    children: Vec<Vec<Edge>>,
}

impl CoupledPedigree {
    /// Builds a pedigree from per-level node counts, labels and
    /// `(parent, child, multiplicity)` edges, validating grading and
    /// indegree limits.
    pub fn from_edges(
        level_sizes: &[usize],
        labels: Vec<NodeLabel>,
        edges: &[(NodeId, NodeId, u8)],
    ) -> Result<Self> {
        if level_sizes.is_empty() {
            return Err(PedigreeError::Malformed("no levels".into()));
        }
        let mut level_start = Vec::with_capacity(level_sizes.len() + 1);
        let mut acc = 0u32;
        level_start.push(0);
        for &s in level_sizes {
            acc += s as u32;
            level_start.push(acc);
        }
        let n = acc as usize;
        if labels.len() != n {
            return Err(PedigreeError::Malformed(format!(
                "{} labels for {} nodes",
                labels.len(),
                n
            )));
        }
        let mut q = Self {
            level_start,
            labels,
            parents: vec![SmallVec::new(); n],
            children: vec![Vec::new(); n],
        };
        for &(p, c, mult) in edges {
            q.check_node(p)?;
            q.check_node(c)?;
            if q.level_of(p) != q.level_of(c) + 1 {
                return Err(PedigreeError::Malformed(format!(
                    "edge {p}->{c} does not go down exactly one level"
                )));
            }
            if !(1..=2).contains(&mult) || (mult == 2 && q.level_of(c) == 0) {
                return Err(PedigreeError::Malformed(format!(
                    "edge {p}->{c} has invalid multiplicity {mult}"
                )));
            }
            if q.parents[c.index()].iter().any(|e| e.node == p) {
                return Err(PedigreeError::Malformed(format!("duplicate edge {p}->{c}")));
            }
            q.parents[c.index()].push(Edge { node: p, mult });
            q.children[p.index()].push(Edge { node: c, mult });
        }
        for c in 0..n {
            let cap = if q.level_of(NodeId(c as u32)) == 0 { 1 } else { 2 };
            let indeg: u8 = q.parents[c].iter().map(|e| e.mult).sum();
            if indeg > cap {
                return Err(PedigreeError::Malformed(format!(
                    "node n{c} has {indeg} parents counted with multiplicity"
                )));
            }
            q.parents[c].sort_unstable();
            q.children[c].sort_unstable();
        }
        Ok(q)
    }

    /// Pedigree with only extant nodes, one per label, and no edges.
    pub fn extant_only(ids: &[IndId]) -> Self {
        let labels = ids.iter().map(|&i| NodeLabel::Extant(i)).collect();
        Self::from_edges(&[ids.len()], labels, &[]).expect("extant-only pedigree is valid")
    }

    /// Appends a level of inferred nodes. `families[j]` lists the children
    /// (current top-level nodes) of the `j`-th new node; all edges get
    /// multiplicity 1. Indegree caps are the caller's responsibility.
    pub(crate) fn push_level(&mut self, families: &[Vec<NodeId>]) {
        let top = self.depth();
        let base = *self.level_start.last().unwrap();
        for (j, fam) in families.iter().enumerate() {
            let p = NodeId(base + j as u32);
            let mut kids: Vec<Edge> = fam
                .iter()
                .map(|&c| {
                    debug_assert_eq!(self.level_of(c), top);
                    Edge { node: c, mult: 1 }
                })
                .collect();
            kids.sort_unstable();
            for e in &kids {
                let list = &mut self.parents[e.node.index()];
                list.push(Edge { node: p, mult: 1 });
                list.sort_unstable();
            }
            self.labels.push(NodeLabel::Inferred);
            self.parents.push(SmallVec::new());
            self.children.push(kids);
        }
        self.level_start.push(base + families.len() as u32);
    }

    /// Number of levels above level 0.
    pub fn depth(&self) -> usize {
        self.level_start.len() - 2
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn level_len(&self, t: usize) -> usize {
        (self.level_start[t + 1] - self.level_start[t]) as usize
    }

    /// Node ids of level `t`, ascending.
    pub fn level(&self, t: usize) -> impl ExactSizeIterator<Item = NodeId> + Clone {
        (self.level_start[t]..self.level_start[t + 1]).map(NodeId)
    }

    pub fn level_of(&self, v: NodeId) -> usize {
        // levels are few; a linear scan beats a lookup table in practice
        self.level_start[1..]
            .iter()
            .position(|&end| v.0 < end)
            .expect("node id in range")
    }

    /// Position of `v` within its level.
    pub fn rank_in_level(&self, v: NodeId) -> usize {
        (v.0 - self.level_start[self.level_of(v)]) as usize
    }

    pub fn label(&self, v: NodeId) -> NodeLabel {
        self.labels[v.index()]
    }

    pub fn parents(&self, v: NodeId) -> &[Edge] {
        &self.parents[v.index()]
    }

    pub fn children(&self, v: NodeId) -> &[Edge] {
        &self.children[v.index()]
    }

    /// Parent multiplicity `p -> c`, 0 when there is no edge.
    pub fn multiplicity(&self, p: NodeId, c: NodeId) -> u8 {
        self.parents[c.index()]
            .iter()
            .find(|e| e.node == p)
            .map_or(0, |e| e.mult)
    }

    pub fn edge_count(&self) -> usize {
        self.children.iter().map(Vec::len).sum()
    }

    /// All edges as `(parent, child, multiplicity)`, parent-major.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, u8)> + '_ {
        self.children.iter().enumerate().flat_map(|(p, kids)| {
            kids.iter()
                .map(move |e| (NodeId(p as u32), e.node, e.mult))
        })
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        (0..=self.depth()).map(|t| self.level_len(t)).collect()
    }

    /// Node of the extant individual `id`, if present.
    pub fn extant_node(&self, id: IndId) -> Option<NodeId> {
        self.level(0)
            .find(|&v| self.labels[v.index()] == NodeLabel::Extant(id))
    }

    /// Extant individual ids in node order.
    pub fn extant_ids(&self) -> Vec<IndId> {
        self.level(0)
            .map(|v| match self.labels[v.index()] {
                NodeLabel::Extant(id) => id,
                _ => u32::MAX,
            })
            .collect()
    }

    /// Structural equality ignoring labels.
    pub fn same_graph(&self, other: &Self) -> bool {
        self.level_start == other.level_start && self.children == other.children
    }

    pub(crate) fn check_node(&self, v: NodeId) -> Result<()> {
        if v.index() < self.labels.len() {
            Ok(())
        } else {
            Err(PedigreeError::UnknownNode(v))
        }
    }

    /// Rebuilds an individual pedigree by giving every couple node two fresh
    /// individuals and every extant node one. Individual ids follow node
    /// order. Requires every non-founder node to have full indegree.
    pub fn expand(&self) -> Result<IndividualPedigree> {
        let depth = self.depth();
        let n = self.node_count();
        // first individual id of each node
        let mut first = vec![0u32; n];
        let mut next = 0u32;
        let mut levels = vec![Vec::new(); depth + 1];
        for t in 0..=depth {
            for v in self.level(t) {
                first[v.index()] = next;
                let width = if t == 0 { 1 } else { 2 };
                levels[t].extend(next..next + width);
                next += width;
            }
        }
        let mut couples = vec![Vec::new(); depth + 1];
        for (t, level_couples) in couples.iter_mut().enumerate().skip(1) {
            for v in self.level(t) {
                let a = first[v.index()];
                level_couples.push((a, a + 1));
            }
        }
        let mut parents = vec![None; next as usize];
        for t in 0..depth {
            for v in self.level(t) {
                let ps = self.parents(v);
                let pair_of = |e: &Edge| {
                    let a = first[e.node.index()];
                    (a, a + 1)
                };
                let members = if t == 0 { 1 } else { 2 };
                let indeg: u8 = ps.iter().map(|e| e.mult).sum();
                if indeg as usize != members {
                    return Err(PedigreeError::Malformed(format!(
                        "node {v} has indegree {indeg}, cannot expand"
                    )));
                }
                let a = first[v.index()] as usize;
                if t == 0 {
                    parents[a] = Some(pair_of(&ps[0]));
                } else if ps.len() == 1 {
                    parents[a] = Some(pair_of(&ps[0]));
                    parents[a + 1] = Some(pair_of(&ps[0]));
                } else {
                    parents[a] = Some(pair_of(&ps[0]));
                    parents[a + 1] = Some(pair_of(&ps[1]));
                }
            }
        }
        IndividualPedigree::new(levels, couples, parents)
    }
}

/// Merges couples into nodes. An individual edge into a couple member adds
/// one unit of multiplicity from the parents' couple node; individuals left
/// out of the pairing disappear along with their (non-existent) children.
pub fn couple_transform(p: &IndividualPedigree) -> Result<CoupledPedigree> {
    let depth = p.depth();
    let mut node_of: HashMap<IndId, NodeId> = HashMap::with_capacity(p.len());
    let mut labels = Vec::new();
    let mut sizes = Vec::with_capacity(depth + 1);
    let mut extant: Vec<IndId> = p.level(0).to_vec();
    extant.sort_unstable();
    for &id in &extant {
        node_of.insert(id, NodeId(labels.len() as u32));
        labels.push(NodeLabel::Extant(id));
    }
    sizes.push(extant.len());
    for t in 1..=depth {
        for &(a, b) in p.couples(t) {
            let v = NodeId(labels.len() as u32);
            node_of.insert(a, v);
            node_of.insert(b, v);
            labels.push(NodeLabel::Couple(a, b));
        }
        sizes.push(p.couples(t).len());
    }

    let mut mult: HashMap<(NodeId, NodeId), u8> = HashMap::new();
    for t in 0..depth {
        for &u in p.level(t) {
            let Some(&child) = node_of.get(&u) else {
                continue;
            };
            let (a, b) = p.parents(u).expect("non-founder has parents");
            if canonical((a, b)) != (a, b) || p.partner(a) != Some(b) {
                return Err(PedigreeError::NotMonogamous(u));
            }
            let parent = node_of[&a];
            *mult.entry((parent, child)).or_insert(0) += 1;
        }
    }
    let mut edges: Vec<(NodeId, NodeId, u8)> =
        mult.into_iter().map(|((p, c), m)| (p, c, m)).collect();
    edges.sort_unstable();
    CoupledPedigree::from_edges(&sizes, labels, &edges)
}
