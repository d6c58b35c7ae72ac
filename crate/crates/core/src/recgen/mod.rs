//! Level-by-level reconstruction from extant sequences alone.
//!
//! Iteration `k` takes the current top level `k - 1`, tests every triple of
//! its nodes for siblinghood by symbol overlap, peels cliques off the
//! resulting hypergraph and gives each large clique a new parent at level
//! `k`. Above the extant level the symbols used for the test are those
//! recovered for each node from triples of its extant descendants.

use log::{info, warn};
use thiserror::Error;

use crate::genmodel::ExtantData;
use crate::par;
use crate::pedigree::{CoupledPedigree, NodeId};

pub mod assign;
pub mod cliques;
pub mod collect;
pub mod siblinghood;
pub mod table;

pub use assign::{assign_parents, Assignment};
pub use cliques::extract_maximal_cliques;
pub use collect::{collect_from_branches, collect_symbols};
pub use siblinghood::{min_count, test_siblinghood, SiblinghoodResult};
pub use table::SymbolTable;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReconError {
    #[error("invalid reconstruction config: {0}")]
    InvalidConfig(String),
    #[error("no extant data to reconstruct from")]
    EmptyInput,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReconConfig {
    /// Minimum clique size that earns a parent.
    pub d: usize,
    /// Fraction of blocks a triple must share to count as siblings.
    pub sib_threshold: f64,
    /// Fraction of fully recovered blocks a node needs to be tested.
    pub block_threshold: f64,
    /// Target depth.
    pub depth: usize,
    /// Candidate witness triples tried per (block, symbol) before giving up.
    pub witness_attempts: usize,
    /// Keep every hyperedge in the diagnostics.
    pub record_hyperedges: bool,
}

impl Default for ReconConfig {
    fn default() -> Self {
        Self {
            d: 3,
            sib_threshold: 0.21,
            block_threshold: 0.99,
            depth: 3,
            witness_attempts: 512,
            record_hyperedges: false,
        }
    }
}

impl ReconConfig {
    pub fn validate(&self) -> Result<(), ReconError> {
        let bad = |m: String| Err(ReconError::InvalidConfig(m));
        if self.d < 3 {
            return bad(format!("d must be at least 3, got {}", self.d));
        }
        if !(self.sib_threshold > 3.0 / 16.0 && self.sib_threshold < 0.25) {
            return bad(format!(
                "sibling threshold must lie strictly between 3/16 and 1/4, got {}",
                self.sib_threshold
            ));
        }
        if !(self.block_threshold > 0.0 && self.block_threshold <= 1.0) {
            return bad(format!("block threshold must lie in (0, 1], got {}", self.block_threshold));
        }
        if self.depth < 1 {
            return bad("depth must be at least 1".into());
        }
        if self.witness_attempts < 1 {
            return bad("witness attempts must be positive".into());
        }
        Ok(())
    }
}

/// What happened while building one level.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LevelDiagnostics {
    /// Level whose nodes were tested; parents land one level up.
    pub level: usize,
    pub nodes: usize,
    /// Nodes passing the fully-recovered filter.
    pub vertices: usize,
    pub mean_full_fraction: f64,
    pub candidate_pairs: usize,
    pub hyperedges: usize,
    pub cliques: usize,
    pub large_cliques: usize,
    pub parents_created: usize,
    pub skipped_members: usize,
    pub dropped_cliques: usize,
    pub hyperedge_list: Vec<[NodeId; 3]>,
}

/// A reconstruction: the pedigree, recovered symbols for each level above
/// 0, and per-iteration diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct ReconPedigree {
    pub pedigree: CoupledPedigree,
    /// `recovered[t - 1]` holds level `t`, width 2, rows in level order.
    pub recovered: Vec<SymbolTable>,
    pub diagnostics: Vec<LevelDiagnostics>,
    /// Iteration at which an empty level ended the run, if any.
    pub stopped_at: Option<usize>,
}

impl ReconPedigree {
    pub fn depth(&self) -> usize {
        self.pedigree.depth()
    }

    /// Recovered symbols of a non-extant node.
    pub fn recovered_row(&self, v: NodeId) -> &[u64] {
        let t = self.pedigree.level_of(v);
        assert!(t > 0, "extant nodes carry their own sequences");
        self.recovered[t - 1].row(self.pedigree.rank_in_level(v))
    }
}

/// Runs the reconstruction up to `cfg.depth` levels. Stops early, with a
/// warning, when an iteration creates no parents.
pub fn rec_gen(extant: &ExtantData, cfg: &ReconConfig) -> Result<ReconPedigree, ReconError> {
    cfg.validate()?;
    if extant.is_empty() {
        return Err(ReconError::EmptyInput);
    }
    let blocks = extant.block_count();
    let mut q = CoupledPedigree::extant_only(extant.ids());
    let base = SymbolTable::from_extant(extant);
    let mut recovered: Vec<SymbolTable> = Vec::new();
    let mut diagnostics = Vec::new();
    let mut stopped_at = None;
    // extant rows below each node of the current top level
    let mut below: Vec<Vec<u32>> = (0..extant.len() as u32).map(|r| vec![r]).collect();
    let sib_need = min_count(cfg.sib_threshold, blocks);
    let full_need = min_count(cfg.block_threshold, blocks);

    for k in 1..=cfg.depth {
        let level = k - 1;
        let table = if level == 0 { &base } else { &recovered[level - 1] };
        let nodes: Vec<NodeId> = q.level(level).collect();
        let full: Vec<usize> = if level == 0 {
            vec![blocks; nodes.len()]
        } else {
            par::map_range(nodes.len(), |r| table.full_blocks(r))
        };
        let rows: Vec<usize> = (0..nodes.len()).filter(|&r| full[r] >= full_need).collect();
        let vertices: Vec<NodeId> = rows.iter().map(|&r| nodes[r]).collect();
        let sib = test_siblinghood(&vertices, &rows, table, sib_need);
        let cliques = extract_maximal_cliques(&sib.hypergraph);
        let cap = if level == 0 { 1 } else { 2 };
        let assignment = assign_parents(&cliques, cfg.d, cap);

        let mut diag = LevelDiagnostics {
            level,
            nodes: nodes.len(),
            vertices: vertices.len(),
            mean_full_fraction: if nodes.is_empty() {
                0.0
            } else {
                full.iter().sum::<usize>() as f64 / (nodes.len() * blocks) as f64
            },
            candidate_pairs: sib.candidate_pairs,
            hyperedges: sib.hypergraph.edge_count(),
            cliques: cliques.len(),
            large_cliques: cliques.iter().filter(|c| c.len() >= cfg.d).count(),
            parents_created: assignment.families.len(),
            skipped_members: assignment.skipped_members,
            dropped_cliques: assignment.dropped_cliques,
            hyperedge_list: Vec::new(),
        };
        if cfg.record_hyperedges {
            diag.hyperedge_list = sib.hypergraph.edges.keys().copied().collect();
        }
        info!(
            "level {level}: {} of {} nodes tested, {} hyperedges, {} parents",
            diag.vertices, diag.nodes, diag.hyperedges, diag.parents_created
        );
        diagnostics.push(diag);
        if assignment.families.is_empty() {
            warn!("iteration {k} created no parents; stopping at depth {}", q.depth());
            stopped_at = Some(k);
            break;
        }

        let first = q.level(level).next().map_or(0, |v| v.0);
        q.push_level(&assignment.families);
        let fams = &assignment.families;
        let next_below: Vec<Vec<u32>> = par::map_slice(fams, |fam| {
            let mut rows: Vec<u32> = fam
                .iter()
                .flat_map(|c| below[(c.0 - first) as usize].iter().copied())
                .collect();
            rows.sort_unstable();
            rows.dedup();
            rows
        });
        let symbols: Vec<Vec<u64>> = par::map_slice(fams, |fam| {
            let branches: Vec<&[u32]> = fam.iter().map(|c| below[(c.0 - first) as usize].as_slice()).collect();
            collect_from_branches(&branches, extant, cfg.witness_attempts)
        });
        recovered.push(SymbolTable::new(2, blocks, symbols.into_iter().flatten().collect()));
        below = next_below;
    }

    Ok(ReconPedigree {
        pedigree: q,
        recovered,
        diagnostics,
        stopped_at,
    })
}
