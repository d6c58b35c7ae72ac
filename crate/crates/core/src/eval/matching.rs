use std::collections::HashMap;
use std::fmt;

use super::EvalError;
use crate::pedigree::{CoupledPedigree, NodeId, NodeLabel};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatchFailure {
    /// A child of the node could not be matched, so neither can the node.
    UnmatchedChild { node: NodeId, child: NodeId },
    /// No true node is a parent of every matched child.
    NoParent { node: NodeId },
    /// Several true nodes are parents of every matched child.
    Ambiguous { node: NodeId, candidates: Vec<NodeId> },
    /// A labelled couple that does not exist in the truth.
    UnknownCouple { node: NodeId },
    /// The true parent is already the image of another node.
    NotInjective { node: NodeId, other: NodeId, target: NodeId },
}

impl fmt::Display for MatchFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnmatchedChild { node, child } => write!(f, "{node}: child {child} is unmatched"),
            Self::NoParent { node } => write!(f, "{node}: children share no true parent"),
            Self::UnknownCouple { node } => write!(f, "{node}: couple label not found in the truth"),
            Self::Ambiguous { node, candidates } => {
                write!(f, "{node}: ambiguous, {} true parents cover its children", candidates.len())
            }
            Self::NotInjective { node, other, target } => {
                write!(f, "{node}: true node {target} is already the image of {other}")
            }
        }
    }
}

/// An edge present on one side of the match but not the other, in
/// reconstruction node ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeViolation {
    /// Reconstructed edge whose image is not a true edge.
    Extra { parent: NodeId, child: NodeId },
    /// True edge between two images with no reconstructed counterpart.
    Missing { parent: NodeId, child: NodeId },
}

impl fmt::Display for EdgeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Extra { parent, child } => write!(f, "extra edge {parent}->{child}"),
            Self::Missing { parent, child } => write!(f, "missing edge {parent}->{child}"),
        }
    }
}

/// Level-by-level map from reconstruction nodes to true nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthMatch {
    /// Image of each reconstruction node, by node index.
    pub phi: Vec<Option<NodeId>>,
    pub matched_per_level: Vec<usize>,
    pub recon_level_sizes: Vec<usize>,
    pub truth_level_sizes: Vec<usize>,
    pub failures: Vec<MatchFailure>,
    pub violations: Vec<EdgeViolation>,
}

impl TruthMatch {
    /// The match is total and edges agree in both directions.
    pub fn succeeded(&self) -> bool {
        self.failures.is_empty() && self.violations.is_empty()
    }

    pub fn image(&self, v: NodeId) -> Option<NodeId> {
        self.phi.get(v.index()).copied().flatten()
    }
}

/// Matches a reconstruction against the truth. Extant nodes map by
/// individual id and labelled couples by their pair of ids; an inferred
/// node maps to the unique true node that is a parent of the images of all
/// its children. Edge multiplicities are not
/// compared, only edge presence.
pub fn match_to_truth(recon: &CoupledPedigree, truth: &CoupledPedigree) -> Result<TruthMatch, EvalError> {
    let mut truth_extant: HashMap<u32, NodeId> = HashMap::new();
    let mut truth_couples: HashMap<(u32, u32), NodeId> = HashMap::new();
    for v in (0..truth.node_count() as u32).map(NodeId) {
        match truth.label(v) {
            NodeLabel::Extant(id) => {
                truth_extant.insert(id, v);
            }
            NodeLabel::Couple(a, b) => {
                truth_couples.insert((a, b), v);
            }
            NodeLabel::Inferred => {}
        }
    }
    let mut phi = vec![None; recon.node_count()];
    let mut owner: HashMap<NodeId, NodeId> = HashMap::new();
    let mut seen = 0;
    for v in recon.level(0) {
        let NodeLabel::Extant(id) = recon.label(v) else {
            return Err(EvalError::ExtantMismatch(format!("{v} is not an extant node")));
        };
        let t = *truth_extant
            .get(&id)
            .ok_or_else(|| EvalError::ExtantMismatch(format!("individual {id} is not extant in the truth")))?;
        phi[v.index()] = Some(t);
        owner.insert(t, v);
        seen += 1;
    }
    if seen != truth_extant.len() {
        return Err(EvalError::ExtantMismatch(format!(
            "reconstruction has {seen} extant individuals, truth has {}",
            truth_extant.len()
        )));
    }

    let mut failures = Vec::new();
    let depth = recon.depth().min(truth.depth());
    for t in 1..=depth {
        for r in recon.level(t) {
            if let NodeLabel::Couple(a, b) = recon.label(r) {
                match truth_couples.get(&(a, b)).filter(|&&z| truth.level_of(z) == t) {
                    Some(&z) => claim(&mut phi, &mut owner, &mut failures, r, z),
                    None => failures.push(MatchFailure::UnknownCouple { node: r }),
                }
                continue;
            }
            let mut common: Option<Vec<NodeId>> = None;
            let mut broken = None;
            for e in recon.children(r) {
                let Some(img) = phi[e.node.index()] else {
                    broken = Some(e.node);
                    break;
                };
                let ps: Vec<NodeId> = truth.parents(img).iter().map(|p| p.node).collect();
                common = Some(match common {
                    None => ps,
                    Some(mut c) => {
                        c.retain(|x| ps.contains(x));
                        c
                    }
                });
            }
            if let Some(child) = broken {
                failures.push(MatchFailure::UnmatchedChild { node: r, child });
                continue;
            }
            let common = common.unwrap_or_default();
            match common.as_slice() {
                [] => failures.push(MatchFailure::NoParent { node: r }),
                [z] => claim(&mut phi, &mut owner, &mut failures, r, *z),
                _ => failures.push(MatchFailure::Ambiguous {
                    node: r,
                    candidates: common.clone(),
                }),
            }
        }
    }
    // levels the truth does not have cannot be matched
    for t in depth + 1..=recon.depth() {
        for r in recon.level(t) {
            failures.push(MatchFailure::NoParent { node: r });
        }
    }

    let mut violations = Vec::new();
    for (p, c, _) in recon.edges() {
        if let (Some(ip), Some(ic)) = (phi[p.index()], phi[c.index()]) {
            if truth.multiplicity(ip, ic) == 0 {
                violations.push(EdgeViolation::Extra { parent: p, child: c });
            }
        }
    }
    for r in (0..recon.node_count() as u32).map(NodeId) {
        let Some(img) = phi[r.index()] else { continue };
        for e in truth.parents(img) {
            if let Some(&rp) = owner.get(&e.node) {
                if recon.multiplicity(rp, r) == 0 {
                    violations.push(EdgeViolation::Missing { parent: rp, child: r });
                }
            }
        }
    }

    let matched_per_level = (0..=recon.depth())
        .map(|t| recon.level(t).filter(|v| phi[v.index()].is_some()).count())
        .collect();
    Ok(TruthMatch {
        phi,
        matched_per_level,
        recon_level_sizes: recon.level_sizes(),
        truth_level_sizes: truth.level_sizes(),
        failures,
        violations,
    })
}

fn claim(
    phi: &mut [Option<NodeId>],
    owner: &mut HashMap<NodeId, NodeId>,
    failures: &mut Vec<MatchFailure>,
    r: NodeId,
    z: NodeId,
) {
    if let Some(&other) = owner.get(&z) {
        failures.push(MatchFailure::NotInjective { node: r, other, target: z });
    } else {
        owner.insert(z, r);
        phi[r.index()] = Some(z);
    }
}
