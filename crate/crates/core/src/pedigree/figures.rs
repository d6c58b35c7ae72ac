//! Four small hand-built pedigrees used as fixtures for exact coincidence
//! probabilities. In each, the two extant individuals are ids 0 and 1 and
//! the founders sit at level 2.

use super::{IndId, IndividualPedigree};

/// Named fixture with the pair of extant targets.
#[derive(Clone, Debug)]
pub struct Figure {
    pub name: &'static str,
    pub pedigree: IndividualPedigree,
    pub targets: [IndId; 2],
}

/// All four fixtures in a fixed order.
pub fn all() -> Vec<Figure> {
    [("1a", fig_1a as fn() -> IndividualPedigree), ("1b", fig_1b), ("2a", fig_2a), ("2b", fig_2b)]
        .into_iter()
        .map(|(name, build)| Figure {
            name,
            pedigree: build(),
            targets: [0, 1],
        })
        .collect()
}

fn build(levels: [Vec<IndId>; 3], couples: [Vec<(IndId, IndId)>; 3], edges: &[(IndId, IndId, IndId)]) -> IndividualPedigree {
    let n: usize = levels.iter().map(Vec::len).sum();
    let mut parents = vec![None; n];
    for &(child, a, b) in edges {
        parents[child as usize] = Some((a, b));
    }
    IndividualPedigree::new(levels.into(), couples.into(), parents).expect("fixture is valid")
}

/// Second cousins through one shared grandparent couple:
/// k←(g,h), l←(i,j) with h and i full siblings.
pub fn fig_1a() -> IndividualPedigree {
    let (k, l, g, h, i, j) = (0, 1, 2, 3, 4, 5);
    let (a, b, c, d, e, f) = (6, 7, 8, 9, 10, 11);
    build(
        [vec![k, l], vec![g, h, i, j], vec![a, b, c, d, e, f]],
        [vec![], vec![(g, h), (i, j)], vec![(a, b), (c, d), (e, f)]],
        &[(k, g, h), (l, i, j), (g, a, b), (h, c, d), (i, c, d), (j, e, f)],
    )
}

/// Double first cousins: both parents of k are siblings of the parents of l.
pub fn fig_1b() -> IndividualPedigree {
    let (k, l, g, h, i, j) = (0, 1, 2, 3, 4, 5);
    let (a, b, c, d) = (6, 7, 8, 9);
    build(
        [vec![k, l], vec![g, h, i, j], vec![a, b, c, d]],
        [vec![], vec![(g, h), (i, j)], vec![(a, b), (c, d)]],
        &[(k, g, h), (l, i, j), (g, a, b), (h, c, d), (i, a, b), (j, c, d)],
    )
}

/// Two couples formed entirely of one sibship (e,f,g,h), one child each.
pub fn fig_2a() -> IndividualPedigree {
    let (k, l, e, f, g, h, a, b) = (0, 1, 2, 3, 4, 5, 6, 7);
    build(
        [vec![k, l], vec![e, f, g, h], vec![a, b]],
        [vec![], vec![(e, f), (g, h)], vec![(a, b)]],
        &[(k, e, f), (l, g, h), (e, a, b), (f, a, b), (g, a, b), (h, a, b)],
    )
}

/// Two children of a sibling couple.
pub fn fig_2b() -> IndividualPedigree {
    let (k, l, e, f, a, b) = (0, 1, 2, 3, 4, 5);
    build(
        [vec![k, l], vec![e, f], vec![a, b]],
        [vec![], vec![(e, f)], vec![(a, b)]],
        &[(k, e, f), (l, e, f), (e, a, b), (f, a, b)],
    )
}
