//! Simulation and reconstruction of graded monogamous pedigrees from
//! block-wise inherited genetic data.
//!
//! The crate is split into four layers:
//!
//! - [`pedigree`]: individual and coupled pedigree graphs and their
//!   structural machinery (ancestors, lowest common ancestors, collisions,
//!   richness, siblinghood hypergraphs, diploid overlap).
//! - [`genmodel`]: the seeded forward simulator (Poisson offspring
//!   topology and per-block uniform inheritance).
//! - [`recgen`]: the iterative reconstruction engine working from extant
//!   sequences only.
//! - [`eval`]: ground-truth matching, recovery reports, statistical censuses
//!   and an exact enumeration oracle for tiny pedigrees.
//!
//! [`io`] holds the text file formats and [`experiment`] the
//! simulate/reconstruct/evaluate pipeline used by sweeps.

pub mod eval;
pub mod experiment;
pub mod genmodel;
pub mod io;
pub mod par;
pub mod pedigree;
pub mod recgen;

pub use genmodel::{ExtantData, GeneAssignment, GeneratorVariant, RngStream, SimError, SimParams};
pub use pedigree::{
    CoupledPedigree, IndId, IndividualPedigree, NodeId, NodeLabel, PedigreeError, Symbol,
};
pub use recgen::{rec_gen, ReconConfig, ReconPedigree};
