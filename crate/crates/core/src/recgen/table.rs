use crate::genmodel::ExtantData;
use crate::pedigree::{DiploidSequence, Symbol, NO_SYMBOL};

/// Block symbol sets for every node of one level, row-major by position in
/// the level. Width 1 holds extant sequences, width 2 recovered couple
/// sets with [`NO_SYMBOL`] in empty slots (smaller symbol first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolTable {
    width: usize,
    blocks: usize,
    data: Vec<Symbol>,
}

impl SymbolTable {
    pub fn new(width: usize, blocks: usize, data: Vec<Symbol>) -> Self {
        assert!(width >= 1 && blocks >= 1 && data.len() % (width * blocks) == 0);
        Self { width, blocks, data }
    }

    pub fn from_extant(e: &ExtantData) -> Self {
        let data = (0..e.len()).flat_map(|r| e.row(r).iter().copied()).collect();
        Self::new(1, e.block_count(), data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn block_count(&self) -> usize {
        self.blocks
    }

    pub fn rows(&self) -> usize {
        self.data.len() / (self.width * self.blocks)
    }

    pub fn row(&self, r: usize) -> &[Symbol] {
        let n = self.width * self.blocks;
        &self.data[r * n..(r + 1) * n]
    }

    pub fn block(&self, r: usize, b: usize) -> &[Symbol] {
        let i = (r * self.blocks + b) * self.width;
        &self.data[i..i + self.width]
    }

    /// Blocks of row `r` holding `width` distinct known symbols.
    pub fn full_blocks(&self, r: usize) -> usize {
        (0..self.blocks)
            .filter(|&b| {
                let s = self.block(r, b);
                s.iter().all(|&x| x != NO_SYMBOL) && (self.width < 2 || s[0] != s[1])
            })
            .count()
    }

    pub fn as_diploid(&self, r: usize) -> DiploidSequence {
        DiploidSequence::new(self.width, self.row(r).to_vec())
    }

    /// Blocks where rows `a`, `b`, `c` share a known symbol.
    pub fn triple_overlap(&self, a: usize, b: usize, c: usize) -> usize {
        (0..self.blocks)
            .filter(|&blk| {
                let (x, y, z) = (self.block(a, blk), self.block(b, blk), self.block(c, blk));
                x.iter()
                    .any(|&s| s != NO_SYMBOL && y.contains(&s) && z.contains(&s))
            })
            .count()
    }
}
