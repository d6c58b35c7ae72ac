use std::collections::BTreeMap;

use rand::seq::IndexedRandom;
use rand::Rng;

use super::matching::TruthMatch;
use super::EvalError;
use crate::genmodel::{ExtantData, GeneAssignment};
use crate::par;
use crate::pedigree::{diploid_overlap_count, CoupledPedigree, DiploidSequence, NodeId, NodeLabel, NO_SYMBOL};
use crate::recgen::{collect_symbols, min_count, ReconPedigree};

/// Whether some node is a parent of all three.
pub fn mutual_siblings(q: &CoupledPedigree, t: [NodeId; 3]) -> bool {
    q.parents(t[0])
        .iter()
        .any(|p| q.multiplicity(p.node, t[1]) > 0 && q.multiplicity(p.node, t[2]) > 0)
}

fn distinct(t: [NodeId; 3]) -> bool {
    t[0] != t[1] && t[0] != t[2] && t[1] != t[2]
}

fn random_level_triple(q: &CoupledPedigree, k: usize, rng: &mut impl Rng) -> Option<[NodeId; 3]> {
    let nodes: Vec<NodeId> = q.level(k).collect();
    if nodes.len() < 3 {
        return None;
    }
    let picked: Vec<NodeId> = nodes.choose_multiple(rng, 3).copied().collect();
    Some([picked[0], picked[1], picked[2]])
}

/// Three downward walks of `h` steps from a random node `h` levels above
/// `k`. `None` if a walk dead-ends or the endpoints repeat.
fn walk_triple(q: &CoupledPedigree, k: usize, h: usize, rng: &mut impl Rng) -> Option<[NodeId; 3]> {
    let top: Vec<NodeId> = q.level(k + h).collect();
    let z = *top.choose(rng)?;
    let mut out = [z; 3];
    for slot in &mut out {
        let mut v = z;
        for _ in 0..h {
            v = q.children(v).choose(rng)?.node;
        }
        *slot = v;
    }
    distinct(out).then_some(out)
}

fn sibling_triple(q: &CoupledPedigree, k: usize, rng: &mut impl Rng) -> Option<[NodeId; 3]> {
    let top: Vec<NodeId> = q.level(k + 1).collect();
    let p = *top.choose(rng)?;
    let kids = q.children(p);
    if kids.len() < 3 {
        return None;
    }
    let picked: Vec<NodeId> = kids.choose_multiple(rng, 3).map(|e| e.node).collect();
    Some([picked[0], picked[1], picked[2]])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum OverlapCase {
    TwoLcas,
    /// One lowest common ancestor that is itself inbred.
    CycleAbove,
    /// One lowest common ancestor and exactly the two unavoidable collisions.
    Tree,
    /// One lowest common ancestor, not inbred, with extra collisions below it.
    CycleNotAbove,
}

impl OverlapCase {
    pub fn classify(q: &CoupledPedigree, t: [NodeId; 3]) -> Result<Self, EvalError> {
        let lca = q.lca_set(&t)?;
        if lca.len() >= 2 {
            return Ok(Self::TwoLcas);
        }
        let z = *lca.first().ok_or_else(|| EvalError::ExtantMismatch("triple has no common ancestor".into()))?;
        Ok(if q.collisions_by_definition(&[z])? > 0 {
            Self::CycleAbove
        } else if q.collisions_by_outdegree(&t)? == 2 {
            Self::Tree
        } else {
            Self::CycleNotAbove
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ClassSummary {
    pub count: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// Triples on the wrong side of the threshold.
    pub violations: usize,
}

impl ClassSummary {
    fn from_samples(xs: &[f64], wrong: usize) -> Self {
        if xs.is_empty() {
            return Self::default();
        }
        Self {
            count: xs.len(),
            mean: xs.iter().sum::<f64>() / xs.len() as f64,
            min: xs.iter().copied().fold(f64::INFINITY, f64::min),
            max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            violations: wrong,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OverlapCensus {
    pub threshold: f64,
    pub siblings: ClassSummary,
    /// Non-siblings sharing a common ancestor.
    pub common: ClassSummary,
    pub unrelated: ClassSummary,
    pub cases: BTreeMap<OverlapCase, ClassSummary>,
}

/// Samples up to `per_class` triples of each kind and summarises their
/// overlap fractions. Siblings below the threshold and non-siblings at or
/// above it count as violations.
///
/// Sibling triples are three children of a random parent. Related
/// non-siblings come from downward walks of two or more levels from a
/// random node; unrelated ones are uniform triples with no common ancestor.
pub fn overlap_census(
    q: &CoupledPedigree,
    genes: &GeneAssignment,
    per_class: usize,
    threshold: f64,
    rng: &mut impl Rng,
) -> Result<OverlapCensus, EvalError> {
    let depth = q.depth();
    let budget = per_class.saturating_mul(200).max(1000);
    let mut sib = Vec::new();
    let mut common = Vec::new();
    let mut unrelated = Vec::new();
    if depth >= 1 {
        for _ in 0..budget {
            if sib.len() >= per_class {
                break;
            }
            if let Some(t) = sibling_triple(q, rng.random_range(0..depth), rng) {
                sib.push(t);
            }
        }
    }
    if depth >= 2 {
        for _ in 0..budget {
            if common.len() >= per_class {
                break;
            }
            let k = rng.random_range(0..depth - 1);
            let h = rng.random_range(2..=depth - k);
            if let Some(t) = walk_triple(q, k, h, rng).filter(|&t| !mutual_siblings(q, t)) {
                common.push(t);
            }
        }
    }
    for _ in 0..budget {
        if unrelated.len() >= per_class {
            break;
        }
        if let Some(t) = random_level_triple(q, rng.random_range(0..=depth), rng) {
            if q.lca_set(&t)?.is_empty() {
                unrelated.push(t);
            }
        }
    }

    let blocks = genes.block_count();
    let need = min_count(threshold, blocks);
    let score = |ts: &[[NodeId; 3]]| -> Vec<usize> {
        par::map_slice(ts, |t| {
            let s = t.map(|v| DiploidSequence::of_node(q, genes, v));
            diploid_overlap_count(&s[0], &s[1], &s[2]).expect("same block count")
        })
    };
    let frac = |c: &[usize]| c.iter().map(|&x| x as f64 / blocks as f64).collect::<Vec<_>>();
    let (sc, cc, uc) = (score(&sib), score(&common), score(&unrelated));
    let mut by_case: BTreeMap<OverlapCase, (Vec<f64>, usize)> = BTreeMap::new();
    for (t, &c) in common.iter().zip(&cc) {
        let e = by_case.entry(OverlapCase::classify(q, *t)?).or_default();
        e.0.push(c as f64 / blocks as f64);
        e.1 += usize::from(c >= need);
    }
    Ok(OverlapCensus {
        threshold,
        siblings: ClassSummary::from_samples(&frac(&sc), sc.iter().filter(|&&c| c < need).count()),
        common: ClassSummary::from_samples(&frac(&cc), cc.iter().filter(|&&c| c >= need).count()),
        unrelated: ClassSummary::from_samples(&frac(&uc), uc.iter().filter(|&&c| c >= need).count()),
        cases: by_case.into_iter().map(|(k, (xs, w))| (k, ClassSummary::from_samples(&xs, w))).collect(),
    })
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CollisionCensus {
    pub sampled: usize,
    pub histogram: BTreeMap<usize, usize>,
    /// Triples with four or more collisions.
    pub flagged: Vec<[NodeId; 3]>,
    /// Triples where the two collision counts disagree, with both counts.
    pub mismatches: Vec<([NodeId; 3], usize, usize)>,
}

/// Collision counts of sampled same-level triples, half uniform and half
/// drawn by downward walks so that related triples are well represented.
pub fn collision_census(q: &CoupledPedigree, samples: usize, rng: &mut impl Rng) -> Result<CollisionCensus, EvalError> {
    let depth = q.depth();
    let mut triples = Vec::with_capacity(samples);
    let mut tries = 0;
    while triples.len() < samples && tries < samples.saturating_mul(100).max(1000) {
        tries += 1;
        let k = rng.random_range(0..=depth);
        let t = if k < depth && rng.random_bool(0.5) {
            let h = rng.random_range(1..=depth - k);
            walk_triple(q, k, h, rng)
        } else {
            random_level_triple(q, k, rng)
        };
        triples.extend(t);
    }
    let counts = par::map_slice(&triples, |t| {
        (
            q.collisions_by_definition(t).expect("valid triple"),
            q.collisions_by_outdegree(t).expect("valid triple"),
        )
    });
    let mut out = CollisionCensus {
        sampled: triples.len(),
        ..Default::default()
    };
    for (t, (a, b)) in triples.into_iter().zip(counts) {
        *out.histogram.entry(a).or_insert(0) += 1;
        if a >= 4 {
            out.flagged.push(t);
        }
        if a != b {
            out.mismatches.push((t, a, b));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelRichness {
    pub level: usize,
    pub nodes: usize,
    pub rich: usize,
    pub awesome: usize,
}

impl LevelRichness {
    pub fn rich_fraction(&self) -> f64 {
        ratio(self.rich, self.nodes)
    }

    pub fn awesome_fraction(&self) -> f64 {
        ratio(self.awesome, self.nodes)
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

pub fn richness_census(q: &CoupledPedigree, d: usize) -> Result<Vec<LevelRichness>, EvalError> {
    let rich = q.d_rich_set(d)?;
    let awesome = q.awesome_set(d)?;
    Ok((0..=q.depth())
        .map(|t| LevelRichness {
            level: t,
            nodes: q.level_len(t),
            rich: rich.count_in_level(q, t),
            awesome: awesome.count_in_level(q, t),
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct BGoodLevel {
    pub level: usize,
    pub awesome: usize,
    /// Awesome couples with at least the threshold share of blocks recovered.
    pub good: usize,
    pub mean_fraction: f64,
    pub min_fraction: f64,
}

/// Runs symbol collection on the true structure for every awesome couple
/// and reports the share of blocks where both symbols come back. Extant
/// rows must be in the truth's level-0 order.
pub fn b_goodness_census(
    q: &CoupledPedigree,
    extant: &ExtantData,
    d: usize,
    threshold: f64,
    attempts: usize,
) -> Result<Vec<BGoodLevel>, EvalError> {
    let awesome = q.awesome_set(d)?;
    let blocks = extant.block_count();
    let need = min_count(threshold, blocks);
    Ok((1..=q.depth())
        .map(|t| {
            let nodes: Vec<NodeId> = q.level(t).filter(|&v| awesome.contains(v)).collect();
            let full = par::map_slice(&nodes, |&v| {
                collect_symbols(q, v, extant, attempts)
                    .chunks_exact(2)
                    .filter(|b| b[0] != NO_SYMBOL && b[1] != NO_SYMBOL && b[0] != b[1])
                    .count()
            });
            let fr: Vec<f64> = full.iter().map(|&f| ratio(f, blocks)).collect();
            BGoodLevel {
                level: t,
                awesome: nodes.len(),
                good: full.iter().filter(|&&f| f >= need).count(),
                mean_fraction: if fr.is_empty() { 1.0 } else { fr.iter().sum::<f64>() / fr.len() as f64 },
                min_fraction: fr.iter().copied().fold(1.0, f64::min),
            }
        })
        .collect())
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct HyperedgeAudit {
    pub checked: usize,
    /// Hyperedges whose images are not mutual siblings.
    pub false_edges: usize,
    /// Hyperedges touching a node with no image.
    pub unmapped: usize,
}

/// Checks every recorded hyperedge against the truth through the match.
pub fn hyperedge_audit(recon: &ReconPedigree, m: &TruthMatch, truth: &CoupledPedigree) -> HyperedgeAudit {
    let mut out = HyperedgeAudit::default();
    for t in recon.diagnostics.iter().flat_map(|d| &d.hyperedge_list) {
        out.checked += 1;
        match (m.image(t[0]), m.image(t[1]), m.image(t[2])) {
            (Some(a), Some(b), Some(c)) => {
                if !mutual_siblings(truth, [a, b, c]) {
                    out.false_edges += 1;
                }
            }
            _ => out.unmapped += 1,
        }
    }
    out
}

/// Recovered symbols of matched nodes that the true couple does not carry
/// in that block. Returns (symbols checked, wrong symbols).
pub fn symbol_soundness(
    recon: &ReconPedigree,
    m: &TruthMatch,
    truth: &CoupledPedigree,
    genes: &GeneAssignment,
) -> (usize, usize) {
    let (mut checked, mut wrong) = (0, 0);
    for t in 1..=recon.depth() {
        for r in recon.pedigree.level(t) {
            let Some(z) = m.image(r) else { continue };
            let NodeLabel::Couple(a, b) = truth.label(z) else { continue };
            for (blk, pair) in recon.recovered_row(r).chunks_exact(2).enumerate() {
                for &s in pair.iter().filter(|&&s| s != NO_SYMBOL) {
                    checked += 1;
                    if s != genes.symbol(a, blk) && s != genes.symbol(b, blk) {
                        wrong += 1;
                    }
                }
            }
        }
    }
    (checked, wrong)
}
