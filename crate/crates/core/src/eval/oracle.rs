use num_rational::Ratio;

use super::EvalError;
use crate::genmodel::{inherit_symbols, RngStream};
use crate::pedigree::{IndId, IndividualPedigree};

/// Largest number of non-founders the exact oracle will enumerate.
pub const MAX_ENUMERATED: usize = 24;

fn check_targets(p: &IndividualPedigree, targets: &[IndId]) -> Result<(), EvalError> {
    if targets.is_empty() {
        return Err(EvalError::NoTargets);
    }
    match targets.iter().find(|&&t| t as usize >= p.len()) {
        Some(&t) => Err(EvalError::UnknownIndividual(t)),
        None => Ok(()),
    }
}

/// Exact probability that every target carries the same symbol at a single
/// block, by enumerating every inheritance outcome.
pub fn exact_coincidence_oracle(p: &IndividualPedigree, targets: &[IndId]) -> Result<Ratio<u64>, EvalError> {
    check_targets(p, targets)?;
    let n = p.non_founder_count();
    if n > MAX_ENUMERATED {
        return Err(EvalError::TooLarge {
            nonfounders: n,
            limit: MAX_ENUMERATED,
        });
    }
    // non-founders top-down so parents are always resolved first
    let mut order: Vec<(IndId, IndId, IndId)> = Vec::with_capacity(n);
    for t in (0..p.depth()).rev() {
        for &c in p.level(t) {
            if let Some((a, b)) = p.parents(c) {
                order.push((c, a.min(b), a.max(b)));
            }
        }
    }
    let mut sym: Vec<IndId> = (0..p.len() as IndId).collect();
    let mut hits = 0u64;
    for outcome in 0u64..1 << n {
        for (bit, &(c, lo, hi)) in order.iter().enumerate() {
            sym[c as usize] = if outcome >> bit & 1 == 0 { sym[lo as usize] } else { sym[hi as usize] };
        }
        let s = sym[targets[0] as usize];
        if targets.iter().all(|&t| sym[t as usize] == s) {
            hits += 1;
        }
    }
    Ok(Ratio::new(hits, 1 << n))
}

/// Sampled version of the oracle: each block of one simulated inheritance
/// is an independent trial. Returns the estimate and its standard error.
pub fn monte_carlo_coincidence(
    p: &IndividualPedigree,
    targets: &[IndId],
    trials: usize,
    seed: u64,
) -> Result<(f64, f64), EvalError> {
    check_targets(p, targets)?;
    let mut rng = RngStream::new(seed, "coincidence");
    let genes = inherit_symbols(p, trials, &mut rng);
    let hits = (0..trials)
        .filter(|&b| {
            let s = genes.symbol(targets[0], b);
            targets.iter().all(|&t| genes.symbol(t, b) == s)
        })
        .count();
    let est = hits as f64 / trials as f64;
    Ok((est, (est * (1.0 - est) / trials as f64).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pedigree::figures;

    #[test]
    fn single_target_is_certain() {
        let p = figures::fig_1a();
        assert_eq!(exact_coincidence_oracle(&p, &[0]).unwrap(), Ratio::from_integer(1));
    }

    #[test]
    fn full_siblings() {
        // two children of one couple agree half the time
        let p = IndividualPedigree::new(
            vec![vec![0, 1], vec![2, 3]],
            vec![vec![], vec![(2, 3)]],
            vec![Some((2, 3)), Some((2, 3)), None, None],
        )
        .unwrap();
        assert_eq!(exact_coincidence_oracle(&p, &[0, 1]).unwrap(), Ratio::new(1, 2));
    }

    #[test]
    fn bad_targets() {
        let p = figures::fig_2b();
        assert_eq!(exact_coincidence_oracle(&p, &[]), Err(EvalError::NoTargets));
        assert_eq!(exact_coincidence_oracle(&p, &[99]), Err(EvalError::UnknownIndividual(99)));
    }

    #[test]
    fn enumeration_limit() {
        let mut levels = vec![Vec::new(), Vec::new()];
        let mut parents = Vec::new();
        for i in 0..25u32 {
            levels[0].push(i);
            parents.push(Some((25, 26)));
        }
        levels[1] = vec![25, 26];
        parents.extend([None, None]);
        let p = IndividualPedigree::new(levels, vec![vec![], vec![(25, 26)]], parents).unwrap();
        assert!(matches!(
            exact_coincidence_oracle(&p, &[0, 1]),
            Err(EvalError::TooLarge { nonfounders: 25, .. })
        ));
    }

    #[test]
    fn sampled_agrees_with_exact() {
        for fig in figures::all() {
            let exact = exact_coincidence_oracle(&fig.pedigree, &fig.targets).unwrap();
            let (est, se) = monte_carlo_coincidence(&fig.pedigree, &fig.targets, 20_000, 3).unwrap();
            let x = *exact.numer() as f64 / *exact.denom() as f64;
            assert!((est - x).abs() <= 4.0 * se, "{}: {est} vs {x}", fig.name);
        }
    }
}
