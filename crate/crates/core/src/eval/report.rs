use super::matching::TruthMatch;
use super::EvalError;
use crate::pedigree::{CoupledPedigree, NodeMask};

#[derive(Clone, Debug, PartialEq)]
pub struct LevelReport {
    pub level: usize,
    pub truth_nodes: usize,
    pub recon_nodes: usize,
    pub matched: usize,
    /// Matched nodes over true nodes.
    pub recovery: f64,
    pub awesome: usize,
    pub awesome_covered: usize,
    /// Share of awesome true nodes that are the image of some node; 1 when
    /// the level has no awesome nodes.
    pub awesome_coverage: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReconReport {
    pub levels: Vec<LevelReport>,
    /// The reconstruction is an induced subpedigree of the truth.
    pub induced: bool,
    pub failures: usize,
    pub violations: usize,
}

impl ReconReport {
    pub fn min_recovery(&self, from_level: usize) -> f64 {
        self.levels
            .iter()
            .filter(|l| l.level >= from_level)
            .map(|l| l.recovery)
            .fold(1.0, f64::min)
    }

    pub fn min_awesome_coverage(&self) -> f64 {
        self.levels.iter().map(|l| l.awesome_coverage).fold(1.0, f64::min)
    }
}

pub fn recovery_report(m: &TruthMatch, truth: &CoupledPedigree, d: usize) -> Result<ReconReport, EvalError> {
    let awesome = truth.awesome_set(d)?;
    let mut image = NodeMask::empty(truth.node_count());
    for z in m.phi.iter().flatten() {
        image.insert(*z);
    }
    let levels = (0..=truth.depth())
        .map(|t| {
            let truth_nodes = truth.level_len(t);
            let matched = m.matched_per_level.get(t).copied().unwrap_or(0);
            let (mut aw, mut covered) = (0, 0);
            for v in truth.level(t).filter(|&v| awesome.contains(v)) {
                aw += 1;
                if image.contains(v) {
                    covered += 1;
                }
            }
            LevelReport {
                level: t,
                truth_nodes,
                recon_nodes: m.recon_level_sizes.get(t).copied().unwrap_or(0),
                matched,
                recovery: if truth_nodes == 0 { 1.0 } else { matched as f64 / truth_nodes as f64 },
                awesome: aw,
                awesome_covered: covered,
                awesome_coverage: if aw == 0 { 1.0 } else { covered as f64 / aw as f64 },
            }
        })
        .collect();
    Ok(ReconReport {
        levels,
        induced: m.succeeded(),
        failures: m.failures.len(),
        violations: m.violations.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::match_to_truth;
    use crate::genmodel::{generate_topology, SimParams};
    use crate::pedigree::couple_transform;

    #[test]
    fn truth_against_itself() {
        let q = couple_transform(&generate_topology(&SimParams::new(60, 6.0, 2, 1, 11)).unwrap()).unwrap();
        let m = match_to_truth(&q, &q).unwrap();
        let r = recovery_report(&m, &q, 3).unwrap();
        assert!(r.induced);
        assert_eq!(r.levels.len(), 3);
        assert!(r.levels.iter().all(|l| l.recovery == 1.0 && l.awesome_coverage == 1.0));
        assert_eq!(r.min_recovery(1), 1.0);
    }

    #[test]
    fn bare_extant_level_recovers_nothing_above() {
        let q = couple_transform(&generate_topology(&SimParams::new(60, 6.0, 2, 1, 11)).unwrap()).unwrap();
        let bare = CoupledPedigree::extant_only(&q.extant_ids());
        let r = recovery_report(&match_to_truth(&bare, &q).unwrap(), &q, 3).unwrap();
        assert!(r.induced);
        assert_eq!(r.levels[0].recovery, 1.0);
        assert_eq!(r.levels[1].recovery, 0.0);
        assert!(r.levels[1].awesome > 0 && r.levels[1].awesome_coverage == 0.0);
    }
}
