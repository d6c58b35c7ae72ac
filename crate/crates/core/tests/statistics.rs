use pedrecon::eval::richness_census;
use pedrecon::genmodel::{generate_topology, GeneratorVariant};
use pedrecon::pedigree::couple_transform;
use pedrecon::SimParams;

/// Every level lies within (alpha/2 +- delta) times the level above it.
fn concentrated(sizes: &[usize], alpha: f64, delta: f64) -> bool {
    sizes.windows(2).all(|w| {
        let (below, above) = (w[0] as f64, w[1] as f64);
        (alpha / 2.0 - delta) * above <= below && below <= (alpha / 2.0 + delta) * above
    })
}

#[test]
fn level_sizes_concentrate() {
    for variant in [GeneratorVariant::Direct, GeneratorVariant::Equivalent] {
        let good = (0..100u64)
            .filter(|&seed| {
                let p = generate_topology(&SimParams::new(10_000, 8.0, 2, 1, seed).with_variant(variant)).unwrap();
                let sizes: Vec<usize> = p.levels().iter().map(Vec::len).collect();
                concentrated(&sizes, 8.0, 1.0)
            })
            .count();
        assert!(good >= 99, "{variant}: {good} of 100 seeds concentrated");
    }
}

#[test]
fn most_nodes_are_awesome() {
    let seeds = 10u64;
    let mut good = 0;
    for seed in 0..seeds {
        let q = couple_transform(&generate_topology(&SimParams::new(10_000, 10.0, 3, 1, seed)).unwrap()).unwrap();
        let census = richness_census(&q, 3).unwrap();
        assert_eq!(census.len(), 4);
        if census.iter().all(|l| l.awesome_fraction() >= 2.0 / 3.0) {
            good += 1;
        }
    }
    assert!(good * 10 >= seeds * 9, "{good} of {seeds} seeds");
}
