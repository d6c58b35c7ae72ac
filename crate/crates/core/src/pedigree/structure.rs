//! Structural queries on coupled pedigrees.
//!
//! Ancestor and descendant sets are reflexive. Returned node sets are
//! sorted ascending and free of repeats.

use super::{CoupledPedigree, NodeId, PedigreeError, Result};
use crate::par;

/// Dense membership mask over the nodes of one pedigree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeMask {
    bits: Vec<bool>,
}

impl NodeMask {
    pub fn empty(n: usize) -> Self {
        Self { bits: vec![false; n] }
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.bits.get(v.index()).copied().unwrap_or(false)
    }

    pub fn insert(&mut self, v: NodeId) {
        self.bits[v.index()] = true;
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| NodeId(i as u32))
    }

    /// Members lying on level `t` of `q`.
    pub fn count_in_level(&self, q: &CoupledPedigree, t: usize) -> usize {
        q.level(t).filter(|&v| self.contains(v)).count()
    }

    pub fn is_subset(&self, other: &NodeMask) -> bool {
        self.bits
            .iter()
            .zip(&other.bits)
            .all(|(&a, &b)| !a || b)
    }
}

/// Hall's condition for three sets given as bit words: distinct
/// representatives exist iff every union of `r` of them has at least `r`
/// members.
pub(crate) fn hall3(a: &[u64], b: &[u64], c: &[u64]) -> bool {
    let count = |f: &dyn Fn(usize) -> u64| -> u32 { (0..a.len()).map(|i| f(i).count_ones()).sum() };
    count(&|i| a[i]) >= 1
        && count(&|i| b[i]) >= 1
        && count(&|i| c[i]) >= 1
        && count(&|i| a[i] | b[i]) >= 2
        && count(&|i| a[i] | c[i]) >= 2
        && count(&|i| b[i] | c[i]) >= 2
        && count(&|i| a[i] | b[i] | c[i]) >= 3
}

fn sorted_dedup(mut v: Vec<NodeId>) -> Vec<NodeId> {
    v.sort_unstable();
    v.dedup();
    v
}

impl CoupledPedigree {
    fn check_set(&self, set: &[NodeId]) -> Result<()> {
        for &v in set {
            self.check_node(v)?;
        }
        let mut s = set.to_vec();
        s.sort_unstable();
        if let Some(w) = s.windows(2).find(|w| w[0] == w[1]) {
            return Err(PedigreeError::RepeatedNode(w[0]));
        }
        Ok(())
    }

    fn check_same_level(&self, set: &[NodeId]) -> Result<usize> {
        let level = self.level_of(set[0]);
        if let Some(&v) = set.iter().find(|&&v| self.level_of(v) != level) {
            return Err(PedigreeError::LevelMismatch(set[0], v));
        }
        Ok(level)
    }

    fn closure(&self, set: &[NodeId], up: bool) -> Vec<NodeId> {
        let mut all = sorted_dedup(set.to_vec());
        let mut frontier = all.clone();
        while !frontier.is_empty() {
            let next: Vec<NodeId> = frontier
                .iter()
                .flat_map(|&v| {
                    let edges = if up { self.parents(v) } else { self.children(v) };
                    edges.iter().map(|e| e.node)
                })
                .collect();
            frontier = sorted_dedup(next);
            all.extend_from_slice(&frontier);
        }
        sorted_dedup(all)
    }

    pub fn ancestors(&self, set: &[NodeId]) -> Result<Vec<NodeId>> {
        self.check_set(set)?;
        Ok(self.closure(set, true))
    }

    pub fn descendants(&self, set: &[NodeId]) -> Result<Vec<NodeId>> {
        self.check_set(set)?;
        Ok(self.closure(set, false))
    }

    /// Ancestors of a same-level set split by height: entry `i` holds the
    /// ancestors exactly `i` levels above the set.
    pub fn ancestor_layers(&self, set: &[NodeId]) -> Result<Vec<Vec<NodeId>>> {
        if set.is_empty() {
            return Ok(Vec::new());
        }
        self.check_set(set)?;
        self.check_same_level(set)?;
        let mut layers = vec![sorted_dedup(set.to_vec())];
        loop {
            let next: Vec<NodeId> = layers
                .last()
                .unwrap()
                .iter()
                .flat_map(|&v| self.parents(v).iter().map(|e| e.node))
                .collect();
            if next.is_empty() {
                break;
            }
            layers.push(sorted_dedup(next));
        }
        Ok(layers)
    }

    /// Lowest common ancestors of `set`: common ancestors none of whose
    /// proper descendants is also a common ancestor.
    pub fn lca_set(&self, set: &[NodeId]) -> Result<Vec<NodeId>> {
        if set.len() < 2 {
            return Err(PedigreeError::TooFewNodes {
                needed: 2,
                got: set.len(),
            });
        }
        self.check_set(set)?;
        let mut common = self.closure(&set[..1], true);
        for &v in &set[1..] {
            let anc = self.closure(&[v], true);
            common.retain(|x| anc.binary_search(x).is_ok());
        }
        // a proper descendant in `common` implies a child in `common`
        Ok(common
            .iter()
            .copied()
            .filter(|&z| {
                !self
                    .children(z)
                    .iter()
                    .any(|e| common.binary_search(&e.node).is_ok())
            })
            .collect())
    }

    /// True iff `z` is a lowest common ancestor of the three targets and has
    /// three distinct children leading to them, one each.
    pub fn is_joint_lca(&self, z: NodeId, targets: [NodeId; 3]) -> Result<bool> {
        self.check_node(z)?;
        let lcas = self.lca_set(&targets)?;
        if lcas.binary_search(&z).is_err() {
            return Ok(false);
        }
        Ok(self.has_distinct_branches(z, targets))
    }

    fn has_distinct_branches(&self, z: NodeId, targets: [NodeId; 3]) -> bool {
        let kids = self.children(z);
        let words = kids.len().div_ceil(64).max(1);
        let mut masks = vec![vec![0u64; words]; 3];
        for (t, &x) in targets.iter().enumerate() {
            let anc = self.closure(&[x], true);
            for (j, e) in kids.iter().enumerate() {
                if anc.binary_search(&e.node).is_ok() {
                    masks[t][j / 64] |= 1 << (j % 64);
                }
            }
        }
        hall3(&masks[0], &masks[1], &masks[2])
    }

    /// The joint LCA of three distinct same-level nodes, if one exists.
    pub fn joint_lca(&self, u: NodeId, v: NodeId, w: NodeId) -> Result<Option<NodeId>> {
        let targets = [u, v, w];
        self.check_set(&targets)?;
        self.check_same_level(&targets)?;
        let lcas = self.lca_set(&targets)?;
        Ok(lcas
            .into_iter()
            .find(|&z| self.has_distinct_branches(z, targets)))
    }

    /// Collisions of a same-level set, summed level by level over the
    /// union of its ancestors: a non-extant layer `A` contributes
    /// `2|A| - |parents(A)|`, the extant layer `|A| - |parents(A)|`. The
    /// founder layer contributes nothing.
    pub fn collisions_by_definition(&self, set: &[NodeId]) -> Result<usize> {
        let layers = self.ancestor_layers(set)?;
        let Some(first) = layers.first() else {
            return Ok(0);
        };
        let base = self.level_of(first[0]);
        let mut total = 0;
        for (i, layer) in layers.iter().enumerate() {
            let level = base + i;
            if level == self.depth() {
                break;
            }
            let parents = layers.get(i + 1).map_or(0, Vec::len);
            let slots = if level == 0 { layer.len() } else { 2 * layer.len() };
            total += slots - parents;
        }
        Ok(total)
    }

    /// Collisions counted as the sum of `outdegree - 1` over the nodes of
    /// the ancestral subpedigree, with edge multiplicity included in the
    /// outdegree.
    pub fn collisions_by_outdegree(&self, set: &[NodeId]) -> Result<usize> {
        if set.is_empty() {
            return Ok(0);
        }
        self.check_set(set)?;
        self.check_same_level(set)?;
        let anc = self.closure(set, true);
        Ok(anc
            .iter()
            .map(|&p| {
                let out: usize = self
                    .children(p)
                    .iter()
                    .filter(|e| anc.binary_search(&e.node).is_ok())
                    .map(|e| e.mult as usize)
                    .sum();
                out.saturating_sub(1)
            })
            .sum())
    }

    /// Nodes that are `d`-rich: extant nodes, and any node with at least
    /// `d` distinct `d`-rich children.
    pub fn d_rich_set(&self, d: usize) -> Result<NodeMask> {
        if d < 3 {
            return Err(PedigreeError::DegreeTooSmall(d));
        }
        let mut mask = NodeMask::empty(self.node_count());
        for v in self.level(0) {
            mask.insert(v);
        }
        for t in 1..=self.depth() {
            for v in self.level(t) {
                let rich = self
                    .children(v)
                    .iter()
                    .filter(|e| mask.contains(e.node))
                    .count();
                if rich >= d {
                    mask.insert(v);
                }
            }
        }
        Ok(mask)
    }

    /// Extant nodes whose own ancestral pedigree has at least one collision.
    pub fn inbred_extant(&self) -> Vec<NodeId> {
        let ext: Vec<NodeId> = self.level(0).collect();
        let flags = par::map_slice(&ext, |&x| {
            self.collisions_by_definition(&[x]).expect("valid node") > 0
        });
        ext.into_iter()
            .zip(flags)
            .filter(|(_, f)| *f)
            .map(|(x, _)| x)
            .collect()
    }

    /// `d`-rich nodes that are not ancestors of any inbred extant node.
    pub fn awesome_set(&self, d: usize) -> Result<NodeMask> {
        let rich = self.d_rich_set(d)?;
        let mut tainted = NodeMask::empty(self.node_count());
        for x in self.inbred_extant() {
            tainted.insert(x);
        }
        for t in 0..self.depth() {
            for v in self.level(t) {
                if tainted.contains(v) {
                    for e in self.parents(v) {
                        tainted.insert(e.node);
                    }
                }
            }
        }
        let mut out = NodeMask::empty(self.node_count());
        for v in rich.iter() {
            if !tainted.contains(v) {
                out.insert(v);
            }
        }
        Ok(out)
    }

    /// Whether `to` can be reached from `from` going downward without
    /// passing through `avoid`.
    pub fn reachable_avoiding(&self, from: NodeId, to: NodeId, avoid: NodeId) -> bool {
        if from == avoid || to == avoid {
            return false;
        }
        let target = self.level_of(to);
        let mut frontier = vec![from];
        while let Some(&v) = frontier.first() {
            if self.level_of(v) <= target {
                return frontier.contains(&to);
            }
            let next: Vec<NodeId> = frontier
                .iter()
                .flat_map(|&v| self.children(v).iter().map(|e| e.node))
                .filter(|&c| c != avoid)
                .collect();
            frontier = sorted_dedup(next);
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pedigree::coupled::{couple_transform, NodeLabel};
    use crate::pedigree::figures;

    /// Node of an extant individual (one id) or of a couple (two ids).
    fn node(q: &CoupledPedigree, ids: &[u32]) -> NodeId {
        let want = match ids {
            [x] => NodeLabel::Extant(*x),
            [a, b] => NodeLabel::Couple(*a.min(b), *a.max(b)),
            _ => unreachable!(),
        };
        (0..q.node_count() as u32)
            .map(NodeId)
            .find(|&v| q.label(v) == want)
            .unwrap()
    }

    fn fig(p: crate::pedigree::IndividualPedigree) -> CoupledPedigree {
        couple_transform(&p).unwrap()
    }

    // Fixture ids: k=0, l=1; fig 1a/1b mid level g=2 h=3 i=4 j=5 and
    // founders a=6 b=7 c=8 d=9 (e=10 f=11); fig 2b e=2 f=3 a=4 b=5.

    #[test]
    fn ancestors_and_descendants_are_reflexive() {
        let q = fig(figures::fig_1b());
        let (k, gh, ab, cd) = (node(&q, &[0]), node(&q, &[2, 3]), node(&q, &[6, 7]), node(&q, &[8, 9]));
        assert_eq!(q.ancestors(&[ab]).unwrap(), vec![ab]);
        assert_eq!(q.descendants(&[k]).unwrap(), vec![k]);
        let mut expect = vec![k, gh, ab, cd];
        expect.sort();
        assert_eq!(q.ancestors(&[k]).unwrap(), expect);
        assert_eq!(q.ancestors(&[NodeId(99)]), Err(PedigreeError::UnknownNode(NodeId(99))));
    }

    #[test]
    fn lca_sets_of_figures() {
        let a = fig(figures::fig_1a());
        let (k, l) = (node(&a, &[0]), node(&a, &[1]));
        assert_eq!(a.lca_set(&[k, l]).unwrap(), vec![node(&a, &[8, 9])]);
        let b = fig(figures::fig_1b());
        let (k, l) = (node(&b, &[0]), node(&b, &[1]));
        let mut both = vec![node(&b, &[6, 7]), node(&b, &[8, 9])];
        both.sort();
        assert_eq!(b.lca_set(&[k, l]).unwrap(), both);
        assert!(matches!(b.lca_set(&[k]), Err(PedigreeError::TooFewNodes { .. })));
        assert_eq!(b.lca_set(&[k, k]), Err(PedigreeError::RepeatedNode(k)));
    }

    #[test]
    fn collisions_of_figures() {
        let b = fig(figures::fig_1b());
        let pair = [node(&b, &[0]), node(&b, &[1])];
        assert_eq!(b.collisions_by_definition(&pair).unwrap(), 2);
        assert_eq!(b.collisions_by_outdegree(&pair).unwrap(), 2);
        assert_eq!(b.collisions_by_definition(&pair[..1]).unwrap(), 0);

        let d = fig(figures::fig_2b());
        let k = [node(&d, &[0])];
        assert_eq!(d.collisions_by_definition(&k).unwrap(), 1);
        assert_eq!(d.collisions_by_outdegree(&k).unwrap(), 1);
    }

    /// Three-level tree: founders couple 0 with children couples, each with
    /// `width` extant children. Returns the pedigree.
    fn tree(width: usize) -> CoupledPedigree {
        let mut sizes = vec![width * width, width, 1];
        let n: usize = sizes.iter().sum();
        let mut edges = Vec::new();
        let root = NodeId((n - 1) as u32);
        for j in 0..width {
            let mid = NodeId((width * width + j) as u32);
            edges.push((root, mid, 1));
            for i in 0..width {
                edges.push((mid, NodeId((j * width + i) as u32), 1));
            }
        }
        let mut labels: Vec<NodeLabel> = (0..width * width).map(|i| NodeLabel::Extant(i as u32)).collect();
        labels.resize(n, NodeLabel::Inferred);
        sizes.truncate(3);
        CoupledPedigree::from_edges(&sizes, labels, &edges).unwrap()
    }

    #[test]
    fn joint_lca_in_tree() {
        let q = tree(3);
        let root = NodeId(12);
        // one grandchild under each middle node
        assert_eq!(q.joint_lca(NodeId(0), NodeId(3), NodeId(6)).unwrap(), Some(root));
        assert!(q.is_joint_lca(root, [NodeId(0), NodeId(3), NodeId(6)]).unwrap());
        // two under the same middle node: lca is still root, one branch short
        assert_eq!(q.joint_lca(NodeId(0), NodeId(1), NodeId(3)).unwrap(), None);
        // siblings: middle node is the joint lca
        assert_eq!(q.joint_lca(NodeId(0), NodeId(1), NodeId(2)).unwrap(), Some(NodeId(9)));
        assert!(matches!(
            q.joint_lca(NodeId(0), NodeId(1), NodeId(9)),
            Err(PedigreeError::LevelMismatch(..))
        ));
    }

    /// Complete depth-2 pedigree: founder couples F0..F5, and nine level-1
    /// couples pairing one child of Fi (i < 3) with one child of Fj
    /// (j >= 3), each with three extant children. Returns the pedigree and
    /// the level-1 node for each (i, j).
    fn k33() -> (CoupledPedigree, impl Fn(usize, usize) -> NodeId) {
        use crate::pedigree::IndividualPedigree;
        let founders: Vec<u32> = (0..12).collect();
        let mut parents = vec![None; 12];
        let mut mid = Vec::new();
        let mut mid_couples = Vec::new();
        let mut next = 12u32;
        let mut extant = Vec::new();
        let child_of = |f: usize, parents: &mut Vec<Option<(u32, u32)>>, next: &mut u32| {
            parents.push(Some((2 * f as u32, 2 * f as u32 + 1)));
            *next += 1;
            *next - 1
        };
        for i in 0..3 {
            for j in 3..6 {
                let a = child_of(i, &mut parents, &mut next);
                let b = child_of(j, &mut parents, &mut next);
                mid.extend([a, b]);
                mid_couples.push((a, b));
            }
        }
        for &(a, b) in &mid_couples {
            for _ in 0..3 {
                parents.push(Some((a, b)));
                extant.push(next);
                next += 1;
            }
        }
        let fc = (0..6).map(|f| (2 * f, 2 * f + 1)).collect();
        let p = IndividualPedigree::new(vec![extant, mid, founders], vec![vec![], mid_couples.clone(), fc], parents).unwrap();
        let q = couple_transform(&p).unwrap();
        let nodes: Vec<NodeId> = mid_couples.iter().map(|&(a, b)| node(&q, &[a, b])).collect();
        (q, move |i, j| nodes[i * 3 + (j - 3)])
    }

    #[test]
    fn joint_lca_and_collisions_in_complete_pedigree() {
        let (q, mid) = k33();
        let under = |c: NodeId, k: usize| q.children(c)[k].node;
        let f0 = q.parents(mid(0, 3))[0].node;
        let (x, y, z) = (under(mid(0, 3), 0), under(mid(0, 4), 0), under(mid(0, 5), 0));
        assert_eq!(q.lca_set(&[x, y, z]).unwrap(), vec![f0]);
        assert_eq!(q.joint_lca(x, y, z).unwrap(), Some(f0));
        assert_eq!(q.collisions_by_definition(&[x, y, z]).unwrap(), 2);
        assert_eq!(q.collisions_by_outdegree(&[x, y, z]).unwrap(), 2);
        // siblings: their couple is the joint lca
        let c = mid(1, 4);
        let sibs = [under(c, 0), under(c, 1), under(c, 2)];
        assert_eq!(q.joint_lca(sibs[0], sibs[1], sibs[2]).unwrap(), Some(c));
        assert_eq!(q.collisions_by_definition(&sibs).unwrap(), 2);
        // two branches only
        let w = under(mid(0, 3), 1);
        assert_eq!(q.joint_lca(x, w, y).unwrap(), None);
        assert_eq!(q.collisions_by_definition(&[x]).unwrap(), 0);
        assert_eq!(q.collisions_by_definition(&[x, sibs[0]]).unwrap(), 0);
    }

    #[test]
    fn joint_lca_absent_without_common_ancestor() {
        // fig 3a plus an unrelated lineage m <- X <- Y
        let a = fig(figures::fig_1a());
        let mut sizes = a.level_sizes();
        sizes[0] += 1;
        sizes[1] += 1;
        sizes[2] += 1;
        let shift = |v: NodeId| {
            let t = a.level_of(v) as u32;
            NodeId(v.0 + t)
        };
        let mut labels = Vec::new();
        for t in 0..=2 {
            labels.extend(a.level(t).map(|v| a.label(v)));
            labels.push(NodeLabel::Inferred);
        }
        labels[2] = NodeLabel::Extant(99);
        let m = NodeId(2);
        let x = NodeId(sizes[0] as u32 + sizes[1] as u32 - 1);
        let y = NodeId(labels.len() as u32 - 1);
        let mut edges: Vec<_> = a.edges().map(|(p, c, k)| (shift(p), shift(c), k)).collect();
        edges.push((x, m, 1));
        edges.push((y, x, 1));
        let q = CoupledPedigree::from_edges(&sizes, labels, &edges).unwrap();
        let (k, l) = (node(&q, &[0]), node(&q, &[1]));
        assert_eq!(q.lca_set(&[k, l]).unwrap().len(), 1);
        assert_eq!(q.lca_set(&[k, l, m]).unwrap(), vec![]);
        assert_eq!(q.joint_lca(k, l, m).unwrap(), None);
        assert_eq!(q.collisions_by_definition(&[k, l, m]).unwrap(), 2);
    }

    #[test]
    fn joint_lca_needs_three_branches() {
        // root with two middle children; u,v under the first, w under the second
        let q = tree(2);
        let root = NodeId(6);
        assert_eq!(q.lca_set(&[NodeId(0), NodeId(1), NodeId(2)]).unwrap(), vec![root]);
        assert_eq!(q.joint_lca(NodeId(0), NodeId(1), NodeId(2)).unwrap(), None);
        assert!(!q.is_joint_lca(root, [NodeId(0), NodeId(1), NodeId(2)]).unwrap());
    }

    #[test]
    fn richness_and_awesomeness() {
        let q = tree(3);
        let rich = q.d_rich_set(3).unwrap();
        assert_eq!(rich.len(), q.node_count());
        let (k, _) = k33();
        assert_eq!(k.awesome_set(3).unwrap().len(), k.node_count());
        assert_eq!(q.d_rich_set(2), Err(PedigreeError::DegreeTooSmall(2)));
        let two = tree(2);
        let rich = two.d_rich_set(3).unwrap();
        assert_eq!(rich.len(), 4);

        let b = fig(figures::fig_1b());
        let aw = b.awesome_set(3).unwrap();
        assert!(!aw.contains(node(&b, &[6, 7])) && !aw.contains(node(&b, &[8, 9])));
        // the pair k,l has collisions, but neither extant node alone does
        assert!(b.inbred_extant().is_empty());
        let d = fig(figures::fig_2b());
        let aw = d.awesome_set(3).unwrap();
        assert!(aw.is_empty(), "extant below a sibling couple is inbred");
    }

    #[test]
    fn hall_condition() {
        assert!(hall3(&[0b001], &[0b010], &[0b100]));
        assert!(!hall3(&[0b001], &[0b001], &[0b110]));
        assert!(!hall3(&[0b011], &[0b011], &[0b011]));
        assert!(hall3(&[0b111], &[0b111], &[0b111]));
        assert!(!hall3(&[0], &[0b110], &[0b110]));
    }

    #[test]
    fn avoiding_reachability() {
        let q = tree(3);
        assert!(!q.reachable_avoiding(NodeId(12), NodeId(0), NodeId(9)));
        assert!(q.reachable_avoiding(NodeId(12), NodeId(0), NodeId(10)));
    }
}
