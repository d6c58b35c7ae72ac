//! Forward simulation: Poisson-offspring topology and per-block uniform
//! inheritance of founder symbols.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use thiserror::Error;

use crate::pedigree::{IndId, IndividualPedigree, Symbol};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid simulation parameters: {0}")]
    InvalidParams(String),
    #[error("extinction: level {level} has {size} individuals, at least 2 are needed to continue")]
    Extinction { level: usize, size: usize },
}

/// Which topology sampler to use. Both produce the same distribution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum GeneratorVariant {
    /// Independent Poisson offspring count per couple.
    #[default]
    Direct,
    /// One Poisson level size, then a uniform parent couple per child.
    Equivalent,
}

impl std::str::FromStr for GeneratorVariant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "direct" => Ok(Self::Direct),
            "equivalent" => Ok(Self::Equivalent),
            other => Err(format!("unknown generator variant `{other}`")),
        }
    }
}

impl std::fmt::Display for GeneratorVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Direct => "direct",
            Self::Equivalent => "equivalent",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimParams {
    pub founders: usize,
    pub alpha: f64,
    pub generations: usize,
    pub blocks: usize,
    pub seed: u64,
    pub variant: GeneratorVariant,
}

impl SimParams {
    pub fn new(founders: usize, alpha: f64, generations: usize, blocks: usize, seed: u64) -> Self {
        Self {
            founders,
            alpha,
            generations,
            blocks,
            seed,
            variant: GeneratorVariant::Direct,
        }
    }

    pub fn with_variant(mut self, variant: GeneratorVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidParams(m));
        if self.founders < 2 {
            return bad(format!("need at least 2 founders, got {}", self.founders));
        }
        if self.generations < 1 {
            return bad("need at least 1 generation".into());
        }
        if self.blocks < 1 {
            return bad("need at least 1 block".into());
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return bad(format!("alpha must be positive and finite, got {}", self.alpha));
        }
        Ok(())
    }
}

/// Deterministic random stream keyed by a seed and a purpose label, so
/// that e.g. changing the block count leaves the topology untouched.
#[derive(Clone, Debug)]
pub struct RngStream(ChaCha8Rng);

impl RngStream {
    pub fn new(seed: u64, label: &str) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(fnv1a(label.as_bytes()));
        Self(rng)
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

/// Uniform random pairing of `ids`. With an odd count one uniformly chosen
/// individual is left out. Pairs come back as sorted `(min, max)`.
fn random_matching(ids: &[IndId], rng: &mut impl Rng) -> Vec<(IndId, IndId)> {
    let mut order = ids.to_vec();
    order.shuffle(rng);
    let mut pairs: Vec<(IndId, IndId)> = order
        .chunks_exact(2)
        .map(|c| (c[0].min(c[1]), c[0].max(c[1])))
        .collect();
    pairs.sort_unstable();
    pairs
}

fn poisson(mean: f64) -> Poisson<f64> {
    Poisson::new(mean).expect("positive finite mean")
}

/// Samples the individual pedigree topology for `params`.
pub fn generate_topology(params: &SimParams) -> Result<IndividualPedigree, SimError> {
    params.validate()?;
    let mut offspring = RngStream::new(params.seed, "topology");
    let mut matching = RngStream::new(params.seed, "matching");
    let depth = params.generations;
    let mut levels: Vec<Vec<IndId>> = vec![Vec::new(); depth + 1];
    let mut couples: Vec<Vec<(IndId, IndId)>> = vec![Vec::new(); depth + 1];
    let mut parents: Vec<Option<(IndId, IndId)>> = vec![None; params.founders];
    levels[depth] = (0..params.founders as IndId).collect();

    for t in (1..=depth).rev() {
        let size = levels[t].len();
        if size < 2 {
            return Err(SimError::Extinction { level: t, size });
        }
        let pairs = random_matching(&levels[t], &mut matching);
        let counts: Vec<usize> = match params.variant {
            GeneratorVariant::Direct => {
                let dist = poisson(params.alpha);
                pairs
                    .iter()
                    .map(|_| dist.sample(&mut offspring) as usize)
                    .collect()
            }
            GeneratorVariant::Equivalent => {
                let total = poisson(params.alpha * pairs.len() as f64).sample(&mut offspring) as usize;
                let mut counts = vec![0usize; pairs.len()];
                for _ in 0..total {
                    counts[offspring.random_range(0..pairs.len())] += 1;
                }
                counts
            }
        };
        let mut next = Vec::with_capacity(counts.iter().sum());
        for (&pair, &k) in pairs.iter().zip(&counts) {
            for _ in 0..k {
                next.push(parents.len() as IndId);
                parents.push(Some(pair));
            }
        }
        couples[t] = pairs;
        levels[t - 1] = next;
    }
    if levels[0].is_empty() {
        return Err(SimError::Extinction { level: 0, size: 0 });
    }
    Ok(IndividualPedigree::new(levels, couples, parents).expect("generator output is a valid pedigree"))
}

/// Per-individual block sequences, stored flat by individual id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneAssignment {
    blocks: usize,
    symbols: Vec<Symbol>,
}

impl GeneAssignment {
    pub fn from_flat(blocks: usize, symbols: Vec<Symbol>) -> Self {
        assert!(blocks > 0 && symbols.len() % blocks == 0);
        Self { blocks, symbols }
    }

    pub fn block_count(&self) -> usize {
        self.blocks
    }

    pub fn len(&self) -> usize {
        self.symbols.len() / self.blocks
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn sequence(&self, id: IndId) -> &[Symbol] {
        let i = id as usize * self.blocks;
        &self.symbols[i..i + self.blocks]
    }

    pub fn symbol(&self, id: IndId, block: usize) -> Symbol {
        self.symbols[id as usize * self.blocks + block]
    }
}

/// Gives founder of rank `r` (position in the founder level) the symbol
/// `r * blocks + b` in block `b`, then lets every other block copy the
/// same block of a uniformly chosen parent.
pub fn inherit_symbols(p: &IndividualPedigree, blocks: usize, rng: &mut impl RngCore) -> GeneAssignment {
    assert!(blocks > 0);
    let mut symbols = vec![0 as Symbol; p.len() * blocks];
    let depth = p.depth();
    for (rank, &f) in p.level(depth).iter().enumerate() {
        let row = f as usize * blocks;
        for b in 0..blocks {
            symbols[row + b] = (rank * blocks + b) as Symbol;
        }
    }
    for t in (0..depth).rev() {
        for &child in p.level(t) {
            let (ma, pa) = p.parents(child).expect("non-founder");
            let (row, ra, rb) = (child as usize * blocks, ma as usize * blocks, pa as usize * blocks);
            let mut bits = 0u64;
            for b in 0..blocks {
                if b % 64 == 0 {
                    bits = rng.next_u64();
                }
                let src = if bits & 1 == 0 { ra } else { rb };
                bits >>= 1;
                symbols[row + b] = symbols[src + b];
            }
        }
    }
    GeneAssignment { blocks, symbols }
}

/// The observable data: extant individuals and their sequences, nothing else.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtantData {
    blocks: usize,
    ids: Vec<IndId>,
    symbols: Vec<Symbol>,
}

impl ExtantData {
    /// Rows are sorted by id. Fails on repeated ids or ragged rows.
    pub fn new(blocks: usize, rows: Vec<(IndId, Vec<Symbol>)>) -> Result<Self, String> {
        if blocks == 0 {
            return Err("block count must be positive".into());
        }
        let mut rows = rows;
        rows.sort_by_key(|r| r.0);
        let mut seen = HashSet::with_capacity(rows.len());
        let mut ids = Vec::with_capacity(rows.len());
        let mut symbols = Vec::with_capacity(rows.len() * blocks);
        for (id, seq) in rows {
            if !seen.insert(id) {
                return Err(format!("individual {id} appears twice"));
            }
            if seq.len() != blocks {
                return Err(format!("individual {id} has {} blocks, expected {blocks}", seq.len()));
            }
            ids.push(id);
            symbols.extend(seq);
        }
        Ok(Self { blocks, ids, symbols })
    }

    pub fn block_count(&self) -> usize {
        self.blocks
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[IndId] {
        &self.ids
    }

    /// Sequence of the `row`-th individual (in id order).
    pub fn row(&self, row: usize) -> &[Symbol] {
        &self.symbols[row * self.blocks..(row + 1) * self.blocks]
    }

    pub fn symbol(&self, row: usize, block: usize) -> Symbol {
        self.symbols[row * self.blocks + block]
    }
}

pub fn extract_extant(p: &IndividualPedigree, g: &GeneAssignment) -> ExtantData {
    let mut ids = p.level(0).to_vec();
    ids.sort_unstable();
    let rows = ids.iter().map(|&id| (id, g.sequence(id).to_vec())).collect();
    ExtantData::new(g.block_count(), rows).expect("simulated extant data is well formed")
}

/// A full simulation: topology plus inherited sequences.
#[derive(Clone, Debug)]
pub struct Simulation {
    pub pedigree: IndividualPedigree,
    pub genes: GeneAssignment,
}

impl Simulation {
    pub fn extant(&self) -> ExtantData {
        extract_extant(&self.pedigree, &self.genes)
    }
}

pub fn simulate(params: &SimParams) -> Result<Simulation, SimError> {
    let pedigree = generate_topology(params)?;
    let mut rng = RngStream::new(params.seed, "inheritance");
    let genes = inherit_symbols(&pedigree, params.blocks, &mut rng);
    Ok(Simulation { pedigree, genes })
}
