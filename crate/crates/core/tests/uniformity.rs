use std::collections::HashMap;

use bgraph::exactcount::{enumerate_pairings, ExactConfig};
use bgraph::montecarlo::trial_rng;
use bgraph::pairing::Sampler;
use bgraph::{Bipartition, DegreeSequence};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Pearson chi-square p-value of sampled pairings against the uniform law
/// over all restricted pairings.
fn uniformity_p_value(ds: &DegreeSequence, bip: &Bipartition, draws: u64, seed: u64) -> f64 {
    let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
    enumerate_pairings(ds, bip, &ExactConfig::default(), |p| {
        counts.insert(p.mates().to_vec(), 0);
    })
    .unwrap();
    let sampler = Sampler::new(ds, bip).unwrap();
    for i in 0..draws {
        let p = sampler.sample(&mut trial_rng(seed, i));
        *counts
            .get_mut(p.mates())
            .expect("sample is a restricted pairing") += 1;
    }
    let cells = counts.len() as f64;
    let expected = draws as f64 / cells;
    let stat: f64 = counts
        .values()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    1.0 - ChiSquared::new(cells - 1.0).unwrap().cdf(stat)
}

#[test]
fn sampler_is_uniform_on_restricted_pairings() {
    let ds = DegreeSequence::new(vec![1, 2, 1, 2, 1, 1]);
    let bip = Bipartition::new(6, [0, 1]).unwrap();
    let p = uniformity_p_value(&ds, &bip, 60_000, 2024);
    assert!(p > 1e-3, "p-value {p}");
}

#[test]
fn sampler_is_uniform_without_left_side() {
    let ds = DegreeSequence::new(vec![3, 2, 2, 1]);
    let bip = Bipartition::empty(4);
    let p = uniformity_p_value(&ds, &bip, 40_000, 77);
    assert!(p > 1e-3, "p-value {p}");
}
