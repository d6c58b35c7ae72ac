use std::collections::HashMap;

use crate::pedigree::NodeId;

/// Outcome of parent assignment for one level.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    /// Children of each new parent, in creation order.
    pub families: Vec<Vec<NodeId>>,
    /// Clique members passed over because they were already at the cap.
    pub skipped_members: usize,
    /// Cliques of size at least `d` that fell below `d` after skipping.
    pub dropped_cliques: usize,
}

/// Gives each clique of at least `d` members one new parent. A member that
/// already has `cap` parents is skipped; if that leaves fewer than `d`
/// members, no parent is created.
pub fn assign_parents(cliques: &[Vec<NodeId>], d: usize, cap: usize) -> Assignment {
    let mut count: HashMap<NodeId, usize> = HashMap::new();
    let mut out = Assignment::default();
    for clique in cliques.iter().filter(|c| c.len() >= d) {
        let members: Vec<NodeId> = clique
            .iter()
            .copied()
            .filter(|v| count.get(v).copied().unwrap_or(0) < cap)
            .collect();
        out.skipped_members += clique.len() - members.len();
        if members.len() < d {
            out.dropped_cliques += 1;
            continue;
        }
        for &v in &members {
            *count.entry(v).or_insert(0) += 1;
        }
        out.families.push(members);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[u32]) -> Vec<NodeId> {
        v.iter().map(|&i| NodeId(i)).collect()
    }

    #[test]
    fn clique_of_size_d_gets_a_parent() {
        let a = assign_parents(&[ids(&[0, 1, 2])], 3, 2);
        assert_eq!(a.families, vec![ids(&[0, 1, 2])]);
    }

    #[test]
    fn small_clique_gets_nothing() {
        let a = assign_parents(&[ids(&[0, 1])], 3, 2);
        assert!(a.families.is_empty());
        assert_eq!(a.dropped_cliques, 0);
    }

    #[test]
    fn cap_limits_parents() {
        let cliques = [ids(&[0, 1, 2]), ids(&[0, 3, 4]), ids(&[0, 5, 6, 7])];
        let a = assign_parents(&cliques, 3, 2);
        // node 0 gets two parents; the third clique keeps 5,6,7
        assert_eq!(a.families.len(), 3);
        assert_eq!(a.families[2], ids(&[5, 6, 7]));
        assert_eq!(a.skipped_members, 1);
        let b = assign_parents(&[ids(&[0, 1, 2]), ids(&[0, 1, 3])], 3, 1);
        assert_eq!(b.families.len(), 1);
        assert_eq!(b.dropped_cliques, 1);
    }
}
