use super::{coupled::NodeLabel, CoupledPedigree, NodeId, PedigreeError, Result, Symbol};
use crate::genmodel::GeneAssignment;

/// Placeholder for an unknown symbol slot. Never produced by the simulator.
pub const NO_SYMBOL: Symbol = u64::MAX;

/// Per-block symbol sets of one node: width 1 for extant nodes, width 2 for
/// couples. Slots holding [`NO_SYMBOL`] are empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiploidSequence {
    width: usize,
    symbols: Vec<Symbol>,
}

impl DiploidSequence {
    /// `symbols` is block-major: block `b` is `symbols[b*width..(b+1)*width]`.
    pub fn new(width: usize, symbols: Vec<Symbol>) -> Self {
        assert!(width >= 1 && symbols.len() % width == 0);
        Self { width, symbols }
    }

    pub fn haploid(symbols: Vec<Symbol>) -> Self {
        Self::new(1, symbols)
    }

    /// The couple's per-block union of its two members' sequences.
    pub fn from_pair(a: &[Symbol], b: &[Symbol]) -> Self {
        assert_eq!(a.len(), b.len());
        let symbols = a.iter().zip(b).flat_map(|(&x, &y)| [x, y]).collect();
        Self::new(2, symbols)
    }

    /// Diploid sequence of a truth node under a full gene assignment.
    pub fn of_node(q: &CoupledPedigree, genes: &GeneAssignment, v: NodeId) -> Self {
        match q.label(v) {
            NodeLabel::Extant(id) => Self::haploid(genes.sequence(id).to_vec()),
            NodeLabel::Couple(a, b) => Self::from_pair(genes.sequence(a), genes.sequence(b)),
            NodeLabel::Inferred => panic!("inferred node {v} has no true sequence"),
        }
    }

    pub fn block_count(&self) -> usize {
        self.symbols.len() / self.width
    }

    pub fn block(&self, b: usize) -> &[Symbol] {
        &self.symbols[b * self.width..(b + 1) * self.width]
    }

    /// Number of distinct known symbols in block `b`.
    pub fn distinct_in_block(&self, b: usize) -> usize {
        let s = self.block(b);
        let mut seen: smallvec::SmallVec<[Symbol; 2]> = smallvec::SmallVec::new();
        for &x in s {
            if x != NO_SYMBOL && !seen.contains(&x) {
                seen.push(x);
            }
        }
        seen.len()
    }
}

fn shares(block: &[Symbol], x: Symbol) -> bool {
    block.contains(&x)
}

/// Number of blocks where the three symbol sets have a common element.
pub fn diploid_overlap_count(a: &DiploidSequence, b: &DiploidSequence, c: &DiploidSequence) -> Result<usize> {
    let n = a.block_count();
    for other in [b, c] {
        if other.block_count() != n {
            return Err(PedigreeError::BlockCountMismatch(n, other.block_count()));
        }
    }
    Ok((0..n)
        .filter(|&i| {
            let (x, y, z) = (a.block(i), b.block(i), c.block(i));
            x.iter()
                .any(|&s| s != NO_SYMBOL && shares(y, s) && shares(z, s))
        })
        .count())
}

/// Fraction of blocks where the three symbol sets have a common element;
/// 0 when there are no blocks.
pub fn diploid_overlap_fraction(a: &DiploidSequence, b: &DiploidSequence, c: &DiploidSequence) -> Result<f64> {
    let hits = diploid_overlap_count(a, b, c)?;
    let n = a.block_count();
    Ok(if n == 0 { 0.0 } else { hits as f64 / n as f64 })
}
