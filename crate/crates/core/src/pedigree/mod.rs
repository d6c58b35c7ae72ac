//! Pedigree graphs.
//!
//! An [`IndividualPedigree`] is the ground-truth graph of individuals, parent
//! edges and couple pairings. A [`CoupledPedigree`] merges every couple into
//! one node; it is the object both simulated and reconstructed, and all the
//! structural queries ([`structure`]) operate on it.

use std::fmt;

use thiserror::Error;

pub mod coupled;
pub mod diploid;
pub mod figures;
pub mod hypergraph;
pub mod individual;
pub mod structure;

pub use coupled::{couple_transform, CoupledPedigree, Edge, NodeLabel};
pub use diploid::{diploid_overlap_count, diploid_overlap_fraction, DiploidSequence, NO_SYMBOL};
pub use hypergraph::SiblinghoodHypergraph;
pub use individual::IndividualPedigree;
pub use structure::NodeMask;

/// Dense individual identifier, `0..IndividualPedigree::len()`.
pub type IndId = u32;

/// Symbol carried by one block of one individual. Founder blocks get
/// globally unique values, so equality means identity by descent.
pub type Symbol = u64;

/// Dense node identifier inside a [`CoupledPedigree`]. Ids increase with
/// level, and each level occupies a contiguous range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PedigreeError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown individual {0}")]
    UnknownIndividual(IndId),
    #[error("node {0} appears more than once in the query set")]
    RepeatedNode(NodeId),
    #[error("query needs at least {needed} nodes, got {got}")]
    TooFewNodes { needed: usize, got: usize },
    #[error("nodes {0} and {1} lie on different levels")]
    LevelMismatch(NodeId, NodeId),
    #[error("level {level} is out of range for a pedigree of depth {depth}")]
    InvalidLevel { level: usize, depth: usize },
    #[error("individual {0}: parents do not form a couple")]
    NotMonogamous(IndId),
    #[error("richness degree must be at least 3, got {0}")]
    DegreeTooSmall(usize),
    #[error("sequences have different block counts ({0} vs {1})")]
    BlockCountMismatch(usize, usize),
    #[error("malformed pedigree: {0}")]
    Malformed(String),
}

pub type Result<T, E = PedigreeError> = std::result::Result<T, E>;
