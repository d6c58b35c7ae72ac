//! Scoring reconstructions against the truth, plus exact and sampled
//! checks of the structural claims the reconstruction relies on.

use thiserror::Error;

use crate::pedigree::{IndId, PedigreeError};

pub mod census;
pub mod matching;
pub mod oracle;
pub mod report;

pub use census::{
    b_goodness_census, collision_census, hyperedge_audit, overlap_census, richness_census, symbol_soundness,
    BGoodLevel, ClassSummary, CollisionCensus, HyperedgeAudit, LevelRichness, OverlapCase, OverlapCensus,
};
pub use matching::{match_to_truth, EdgeViolation, MatchFailure, TruthMatch};
pub use oracle::{exact_coincidence_oracle, monte_carlo_coincidence, MAX_ENUMERATED};
pub use report::{recovery_report, LevelReport, ReconReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("extant sets differ: {0}")]
    ExtantMismatch(String),
    #[error("{nonfounders} non-founders is too many to enumerate (limit {limit})")]
    TooLarge { nonfounders: usize, limit: usize },
    #[error("unknown individual {0}")]
    UnknownIndividual(IndId),
    #[error("need at least one target individual")]
    NoTargets,
    #[error(transparent)]
    Pedigree(#[from] PedigreeError),
}
