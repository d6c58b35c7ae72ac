use super::{IndId, PedigreeError, Result};

/// Graded, complete, monogamous pedigree of individuals.
///
/// Level 0 holds the extant individuals and level `depth()` the founders.
/// Every non-founder has exactly two parents one level up, and those parents
/// are always a couple. Levels above 0 may contain at most one individual
/// left out of the pairing; such an individual has no children.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndividualPedigree {
    levels: Vec<Vec<IndId>>,
    level_of: Vec<usize>,
    couples: Vec<Vec<(IndId, IndId)>>,
    partner: Vec<Option<IndId>>,
    parents: Vec<Option<(IndId, IndId)>>,
}

impl IndividualPedigree {
    /// Builds and validates a pedigree.
    ///
    /// `levels[t]` lists the individuals of level `t`; ids must be exactly
    /// `0..n` overall. `couples[t]` pairs individuals of level `t` (level 0
    /// must have none). `parents[id]` is `None` for founders. Pairs may be
    /// given in either order; they are stored as `(min, max)`.
    pub fn new(
        levels: Vec<Vec<IndId>>,
        mut couples: Vec<Vec<(IndId, IndId)>>,
        mut parents: Vec<Option<(IndId, IndId)>>,
    ) -> Result<Self> {
        if levels.is_empty() {
            return Err(PedigreeError::Malformed("no levels".into()));
        }
        let depth = levels.len() - 1;
        let n: usize = levels.iter().map(Vec::len).sum();
        if parents.len() != n {
            return Err(PedigreeError::Malformed(format!(
                "parent table has {} rows for {} individuals",
                parents.len(),
                n
            )));
        }
        if couples.len() > levels.len() {
            return Err(PedigreeError::Malformed("couples listed above the founder level".into()));
        }
        couples.resize(levels.len(), Vec::new());

        let mut level_of = vec![usize::MAX; n];
        for (t, level) in levels.iter().enumerate() {
            for &id in level {
                let slot = level_of
                    .get_mut(id as usize)
                    .ok_or(PedigreeError::UnknownIndividual(id))?;
                if *slot != usize::MAX {
                    return Err(PedigreeError::Malformed(format!("individual {id} listed twice")));
                }
                *slot = t;
            }
        }

        let mut partner = vec![None; n];
        for (t, level_couples) in couples.iter_mut().enumerate() {
            if t == 0 && !level_couples.is_empty() {
                return Err(PedigreeError::Malformed("extant individuals cannot form couples".into()));
            }
            for pair in level_couples.iter_mut() {
                let (a, b) = canonical(*pair);
                if a == b {
                    return Err(PedigreeError::Malformed(format!("individual {a} coupled with itself")));
                }
                for x in [a, b] {
                    match level_of.get(x as usize) {
                        None => return Err(PedigreeError::UnknownIndividual(x)),
                        Some(&lt) if lt != t => {
                            return Err(PedigreeError::Malformed(format!(
                                "couple ({a},{b}) listed at level {t} but {x} is at level {lt}"
                            )))
                        }
                        _ => {}
                    }
                }
                if partner[a as usize].is_some() || partner[b as usize].is_some() {
                    return Err(PedigreeError::Malformed(format!(
                        "couple ({a},{b}) reuses a coupled individual"
                    )));
                }
                partner[a as usize] = Some(b);
                partner[b as usize] = Some(a);
                *pair = (a, b);
            }
            level_couples.sort_unstable();
            if t > 0 && levels[t].len() > 2 * level_couples.len() + 1 {
                return Err(PedigreeError::Malformed(format!(
                    "level {t} leaves more than one individual unmatched"
                )));
            }
        }

        for id in 0..n as IndId {
            let t = level_of[id as usize];
            match parents[id as usize].as_mut() {
                None if t < depth => {
                    return Err(PedigreeError::Malformed(format!(
                        "non-founder {id} at level {t} has no parents"
                    )))
                }
                None => {}
                Some(_) if t == depth => {
                    return Err(PedigreeError::Malformed(format!("founder {id} has parents")))
                }
                Some(pair) => {
                    let (a, b) = canonical(*pair);
                    for x in [a, b] {
                        if x as usize >= n {
                            return Err(PedigreeError::UnknownIndividual(x));
                        }
                        if level_of[x as usize] != t + 1 {
                            return Err(PedigreeError::Malformed(format!(
                                "parent {x} of {id} is not one level up"
                            )));
                        }
                    }
                    if partner[a as usize] != Some(b) {
                        return Err(PedigreeError::NotMonogamous(id));
                    }
                    *pair = (a, b);
                }
            }
        }

        Ok(Self {
            levels,
            level_of,
            couples,
            partner,
            parents,
        })
    }

    /// Number of generations above the extant level.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn len(&self) -> usize {
        self.level_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.level_of.is_empty()
    }

    pub fn level(&self, t: usize) -> &[IndId] {
        &self.levels[t]
    }

    pub fn levels(&self) -> &[Vec<IndId>] {
        &self.levels
    }

    pub fn level_of(&self, id: IndId) -> usize {
        self.level_of[id as usize]
    }

    /// Couples of level `t` as sorted `(min, max)` pairs.
    pub fn couples(&self, t: usize) -> &[(IndId, IndId)] {
        &self.couples[t]
    }

    pub fn partner(&self, id: IndId) -> Option<IndId> {
        self.partner[id as usize]
    }

    /// Parents of `id` as a `(min, max)` pair, `None` for founders.
    pub fn parents(&self, id: IndId) -> Option<(IndId, IndId)> {
        self.parents[id as usize]
    }

    pub fn is_founder(&self, id: IndId) -> bool {
        self.parents[id as usize].is_none()
    }

    pub fn non_founder_count(&self) -> usize {
        self.parents.iter().filter(|p| p.is_some()).count()
    }
}

pub(crate) fn canonical((a, b): (IndId, IndId)) -> (IndId, IndId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}
