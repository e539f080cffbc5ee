//! A fixed battery of small instances for exhaustive checks.
//!
//! Generated instances come from a seeded generator, so the battery is the
//! same on every run. Hand-picked instances make sure every switching kind
//! has sites somewhere in the battery.

use num_traits::ToPrimitive;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::degseq::{feasibility, side_moments, Bipartition, DegreeSequence};
use crate::formulas::count_restricted_pairings;

/// Largest `M1(R)` in the battery.
pub const MAX_RIGHT_POINTS: u64 = 12;
/// Largest number of restricted pairings of a generated instance.
pub const MAX_PAIRINGS: u64 = 12_000;
const GENERATED: usize = 50;
const SEED: u64 = 0x5eed_ba77;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub name: String,
    pub ds: DegreeSequence,
    pub bip: Bipartition,
}

impl Instance {
    pub fn new(name: impl Into<String>, degrees: Vec<u32>, left: &[usize]) -> Self {
        let ds = DegreeSequence::new(degrees);
        let bip = Bipartition::new(ds.n(), left.iter().copied()).expect("valid left set");
        Self {
            name: name.into(),
            ds,
            bip,
        }
    }

    /// Number of restricted pairings, or `None` when the instance has none.
    pub fn pairings(&self) -> Option<u64> {
        count_restricted_pairings(&self.ds, &self.bip)
            .ok()
            .and_then(|c| c.to_u64())
            .filter(|&c| c > 0)
    }
}

/// Instances picked so that each switching kind has sites.
pub fn hand_picked() -> Vec<Instance> {
    vec![
        Instance::new("tiny", vec![1, 1, 2], &[0]),
        Instance::new("loops-pure", vec![2, 2, 2, 1, 1, 1, 1], &[]),
        Instance::new("loops-mixed", vec![1, 1, 2, 1, 1, 1, 1, 1, 1], &[0, 1]),
        Instance::new("double-pure", vec![2, 2, 1, 1, 1, 1], &[]),
        Instance::new(
            "double-mixed",
            vec![2, 1, 1, 2, 1, 1, 1, 1, 1, 1],
            &[0, 1, 2],
        ),
        Instance::new(
            "double-pure-mixed",
            vec![1, 1, 1, 1, 2, 2, 1, 1, 1, 1],
            &[0, 1, 2, 3],
        ),
        Instance::new("paths-s1", vec![1, 1, 1, 2, 1, 1, 2, 1], &[0]),
        Instance::new("paths-s2", vec![1, 1, 2, 1, 1, 2, 1, 1], &[0, 1]),
        Instance::new("paths-s3", vec![1, 1, 1, 2, 1, 1, 2, 1, 1, 1], &[0]),
        Instance::new("paths-s4", vec![1, 1, 2, 1, 1, 1, 2, 1, 1, 1], &[0, 1]),
    ]
}

/// Seeded random instances with `M1(R) <= 12` and at most
/// [`MAX_PAIRINGS`] restricted pairings.
pub fn generated() -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut out: Vec<Instance> = Vec::new();
    while out.len() < GENERATED {
        let n = rng.random_range(2..=8);
        let degrees: Vec<u32> = (0..n).map(|_| rng.random_range(0..=4)).collect();
        let left: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.3)).collect();
        let inst = Instance::new(format!("gen-{}", out.len()), degrees, &left);
        if !feasibility(&inst.ds, &inst.bip).is_feasible() {
            continue;
        }
        let (_, r) = side_moments(&inst.ds, &inst.bip).expect("sizes match");
        if r.m1 > MAX_RIGHT_POINTS || inst.pairings().is_none_or(|c| c > MAX_PAIRINGS) {
            continue;
        }
        if out.iter().any(|o| o.ds == inst.ds && o.bip == inst.bip) {
            continue;
        }
        out.push(inst);
    }
    out
}

/// Hand-picked instances followed by the generated ones.
pub fn battery() -> Vec<Instance> {
    let mut all = hand_picked();
    all.extend(generated());
    all
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn battery_is_deterministic_and_bounded() {
        let a = battery();
        assert_eq!(a, battery());
        assert!(a.len() >= 50);
        for inst in &a {
            let (_, r) = side_moments(&inst.ds, &inst.bip).unwrap();
            assert!(r.m1 <= MAX_RIGHT_POINTS, "{}", inst.name);
            assert!(inst.pairings().is_some(), "{}", inst.name);
        }
    }
}
