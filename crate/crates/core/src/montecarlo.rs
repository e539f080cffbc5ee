//! Monte Carlo estimators over the restricted pairing model.
//!
//! Trial `i` draws its pairing from a ChaCha8 generator seeded with the run
//! seed on stream `i`, so any trial can be replayed on its own and the result
//! of a run does not depend on how trials are spread over threads. Sums are
//! kept as integers and merged in trial order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::degseq::{side_moments, Bipartition, DegreeSequence, InducedSubgraphSpec};
use crate::error::{Error, Result};
use crate::exactcount::ClassKey;
use crate::pairing::{defect_census, is_simple, project, two_path_counts, Pairing, Sampler};
use crate::parallel::{map_reduce_range, Execution};

const CHUNK: u64 = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    pub execution: Execution,
}

impl McConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            execution: Execution::default(),
        }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }
}

/// A sample mean with its normal-approximation standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

impl Estimate {
    fn from_moment(m: &Moment, trials: u64, seed: u64) -> Self {
        let n = u128::from(trials);
        let mean = m.sum as f64 / trials as f64;
        let stderr = if trials < 2 {
            0.0
        } else {
            // Exact integer numerator of the unbiased variance.
            let num = (n * m.sum_sq).saturating_sub(m.sum * m.sum);
            (num as f64 / (n * (n - 1)) as f64 / trials as f64).sqrt()
        };
        Self {
            mean,
            stderr,
            trials,
            seed,
        }
    }

    /// Whether `target` lies within `max(sigmas * stderr, rel * |target|)`.
    pub fn agrees_with(&self, target: f64, sigmas: f64, rel: f64) -> bool {
        (self.mean - target).abs() <= (sigmas * self.stderr).max(rel * target.abs())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Moment {
    sum: u128,
    sum_sq: u128,
}

impl Moment {
    fn push(&mut self, x: u64) {
        let x = u128::from(x);
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn merge(self, o: Moment) -> Moment {
        Moment {
            sum: self.sum + o.sum,
            sum_sq: self.sum_sq + o.sum_sq,
        }
    }
}

/// The generator used for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Runs `visit` on one pairing per trial and merges the chunk accumulators in
/// trial order.
fn run_trials<A, I, V, M>(
    ds: &DegreeSequence,
    bip: &Bipartition,
    cfg: &McConfig,
    init: I,
    visit: V,
    merge: M,
) -> Result<A>
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    V: Fn(&mut A, &Pairing) + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    if cfg.trials == 0 {
        return Err(Error::OutOfRange("trials must be at least 1".into()));
    }
    let sampler = Sampler::new(ds, bip)?;
    let out = map_reduce_range(
        cfg.trials,
        CHUNK,
        cfg.execution,
        |range| {
            let mut acc = init();
            let mut scratch = Vec::new();
            let mut p: Option<Pairing> = None;
            for i in range {
                let mut rng = trial_rng(cfg.seed, i);
                match p.as_mut() {
                    Some(p) => sampler.resample(&mut rng, p, &mut scratch),
                    None => p = Some(sampler.sample(&mut rng)),
                }
                visit(&mut acc, p.as_ref().expect("sampled"));
            }
            acc
        },
        merge,
    );
    Ok(out.unwrap_or_else(init))
}

fn exponent_parameters(ds: &DegreeSequence, bip: &Bipartition) -> Result<[f64; 3]> {
    Ok(crate::degseq::mu_parameters(ds, bip)?.to_f64())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PSimpleReport {
    pub estimate: Estimate,
    /// `exp(-mu0 - mu1 - mu2)`.
    pub predicted: f64,
    pub mu: [f64; 3],
}

/// Fraction of sampled restricted pairings whose projection is simple.
pub fn estimate_p_simple(
    ds: &DegreeSequence,
    bip: &Bipartition,
    cfg: &McConfig,
) -> Result<PSimpleReport> {
    let mu = exponent_parameters(ds, bip)?;
    let m = run_trials(
        ds,
        bip,
        cfg,
        Moment::default,
        |m, p| m.push(u64::from(is_simple(p))),
        Moment::merge,
    )?;
    Ok(PSimpleReport {
        estimate: Estimate::from_moment(&m, cfg.trials, cfg.seed),
        predicted: (-(mu[0] + mu[1] + mu[2])).exp(),
        mu,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectMeansReport {
    pub b0: Estimate,
    pub b1: Estimate,
    pub b2: Estimate,
    pub t1: Estimate,
    pub t2: Estimate,
    pub double_loops: Estimate,
    pub mu: [f64; 3],
    /// `d_max^4 / M`, the scale of the triple-pair means.
    pub triple_scale: f64,
    /// `d_max^3 / M`.
    pub double_loop_scale: f64,
}

/// Sample means of every defect count.
pub fn estimate_defect_means(
    ds: &DegreeSequence,
    bip: &Bipartition,
    cfg: &McConfig,
) -> Result<DefectMeansReport> {
    let mu = exponent_parameters(ds, bip)?;
    let m = run_trials(
        ds,
        bip,
        cfg,
        || [Moment::default(); 6],
        |m, p| {
            let c = defect_census(p);
            for (slot, x) in m.iter_mut().zip([c.b0, c.b1, c.b2, c.t1, c.t2, c.i_dl]) {
                slot.push(x);
            }
        },
        |a, b| std::array::from_fn(|i| a[i].merge(b[i])),
    )?;
    let e = |i: usize| Estimate::from_moment(&m[i], cfg.trials, cfg.seed);
    let dmax = f64::from(ds.max_degree());
    let total = ds.total().max(1) as f64;
    Ok(DefectMeansReport {
        b0: e(0),
        b1: e(1),
        b2: e(2),
        t1: e(3),
        t2: e(4),
        double_loops: e(5),
        mu,
        triple_scale: dmax.powi(4) / total,
        double_loop_scale: dmax.powi(3) / total,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassConditionalReport {
    pub key: ClassKey,
    /// Sampled pairings that landed in the class.
    pub hits: u64,
    pub trials: u64,
    pub seed: u64,
    /// Conditional means of `A_1..A_4`.
    pub a: [Estimate; 4],
    /// Conditional means of `A_1^2..A_4^2`.
    pub b: [Estimate; 4],
    /// Class members violating `A1 + 2 A2 + A3 = M2(R)` or `A4 = M2(L)`.
    /// Only checked for the defect-free class.
    pub identity_violations: u64,
    /// `(M1(R) - M1(L))^2 M2(R) / M1(R)^2`, reported when `M1(L) <= M/4`.
    pub predicted_a1: Option<f64>,
    /// `M1(L)^2 M2(R) / M1(R)^2`, reported when `M1(L) > M/4`.
    pub predicted_a3: Option<f64>,
}

#[derive(Default)]
struct ClassAcc {
    hits: u64,
    a: [Moment; 4],
    b: [Moment; 4],
    violations: u64,
}

/// Conditional 2-path moments given membership in class `key`, by rejection.
pub fn estimate_class_conditional(
    ds: &DegreeSequence,
    bip: &Bipartition,
    key: ClassKey,
    cfg: &McConfig,
) -> Result<ClassConditionalReport> {
    let (ml, mr) = side_moments(ds, bip)?;
    let check_identity = key == ClassKey::CLEAN;
    let acc = run_trials(
        ds,
        bip,
        cfg,
        ClassAcc::default,
        |acc, p| {
            if ClassKey::of(&defect_census(p)) != key {
                return;
            }
            acc.hits += 1;
            let a = two_path_counts(p);
            for ((ma, mb), &x) in acc.a.iter_mut().zip(&mut acc.b).zip(&a) {
                ma.push(x);
                mb.push(x * x);
            }
            if check_identity && (a[0] + 2 * a[1] + a[2] != mr.m2 || a[3] != ml.m2) {
                acc.violations += 1;
            }
        },
        |mut x, y| {
            x.hits += y.hits;
            for i in 0..4 {
                x.a[i] = x.a[i].merge(y.a[i]);
                x.b[i] = x.b[i].merge(y.b[i]);
            }
            x.violations += y.violations;
            x
        },
    )?;
    if acc.hits < 2 {
        return Err(Error::InsufficientData {
            key: key.to_string(),
            hits: acc.hits,
            trials: cfg.trials,
        });
    }
    let e = |m: &Moment| Estimate::from_moment(m, acc.hits, cfg.seed);
    let (m1l, m1r, m2r) = (ml.m1 as f64, mr.m1 as f64, mr.m2 as f64);
    let quarter = 4 * ml.m1 <= ml.m1 + mr.m1;
    Ok(ClassConditionalReport {
        key,
        hits: acc.hits,
        trials: cfg.trials,
        seed: cfg.seed,
        a: std::array::from_fn(|i| e(&acc.a[i])),
        b: std::array::from_fn(|i| e(&acc.b[i])),
        identity_violations: acc.violations,
        predicted_a1: quarter.then(|| (m1r - m1l).powi(2) * m2r / (m1r * m1r)),
        predicted_a3: (!quarter).then(|| m1l * m1l * m2r / (m1r * m1r)),
    })
}

/// `P(G_S = H)` for a uniform simple graph with degrees `ds`, estimated by
/// keeping the simple samples of the pairing model. `trials` in the result
/// counts the simple samples only.
pub fn estimate_induced_probability(
    ds: &DegreeSequence,
    spec: &InducedSubgraphSpec,
    cfg: &McConfig,
) -> Result<Estimate> {
    let bip = Bipartition::empty(ds.n());
    let s = spec.subset();
    let (simple, m) = run_trials(
        ds,
        &bip,
        cfg,
        || (0u64, Moment::default()),
        |(simple, m), p| {
            if !is_simple(p) {
                return;
            }
            *simple += 1;
            let g = project(p);
            let hit = s.iter().enumerate().all(|(i, &u)| {
                s[i + 1..].iter().all(|&v| {
                    let in_h = spec.edges().contains(&(u, v));
                    (g.multiplicity(u, v) == 1) == in_h
                })
            });
            m.push(u64::from(hit));
        },
        |(a, x), (b, y)| (a + b, x.merge(y)),
    )?;
    if simple < 2 {
        return Err(Error::InsufficientData {
            key: "simple".into(),
            hits: simple,
            trials: cfg.trials,
        });
    }
    Ok(Estimate::from_moment(&m, simple, cfg.seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> (DegreeSequence, Bipartition) {
        let ds = DegreeSequence::new(vec![1, 1, 2]);
        let bip = Bipartition::new(3, [0]).unwrap();
        (ds, bip)
    }

    #[test]
    fn estimate_statistics() {
        let mut m = Moment::default();
        for x in [1, 0, 1, 1] {
            m.push(x);
        }
        let e = Estimate::from_moment(&m, 4, 9);
        assert_eq!(e.mean, 0.75);
        assert!((e.stderr - (0.25f64 / 4.0).sqrt()).abs() < 1e-12);
        assert!(e.agrees_with(0.7, 3.0, 0.0));
    }

    #[test]
    fn all_ones_is_always_simple() {
        let ds = DegreeSequence::new(vec![1; 10]);
        let bip = Bipartition::empty(10);
        let r = estimate_p_simple(&ds, &bip, &McConfig::new(500, 3)).unwrap();
        assert_eq!(r.estimate.mean, 1.0);
        assert_eq!(r.estimate.stderr, 0.0);
        let d = estimate_defect_means(&ds, &bip, &McConfig::new(200, 3)).unwrap();
        assert_eq!(d.b0.mean + d.b1.mean + d.b2.mean, 0.0);
    }

    #[test]
    fn tiny_instance_converges_to_two_thirds() {
        let (ds, bip) = tiny();
        let r = estimate_p_simple(&ds, &bip, &McConfig::new(30_000, 11)).unwrap();
        assert!((r.estimate.mean - 2.0 / 3.0).abs() < 4.0 * r.estimate.stderr);
        let d = estimate_defect_means(&ds, &bip, &McConfig::new(30_000, 11)).unwrap();
        assert!((d.b0.mean - 1.0 / 3.0).abs() < 4.0 * d.b0.stderr);
    }

    #[test]
    fn execution_modes_agree() {
        let ds = DegreeSequence::regular(30, 3);
        let bip = Bipartition::new(30, 0..6).unwrap();
        let run = |exec| {
            estimate_class_conditional(
                &ds,
                &bip,
                ClassKey::CLEAN,
                &McConfig::new(3000, 5).with_execution(exec),
            )
            .unwrap()
        };
        let seq = run(Execution::Sequential);
        assert_eq!(seq, run(Execution::Parallel));
        assert_eq!(seq.identity_violations, 0);
        assert!(seq.predicted_a1.is_some());
    }

    #[test]
    fn unreachable_class_is_insufficient_data() {
        let (ds, bip) = tiny();
        let err =
            estimate_class_conditional(&ds, &bip, ClassKey::new(0, 3, 0), &McConfig::new(100, 1));
        assert!(matches!(err, Err(Error::InsufficientData { hits: 0, .. })));
    }

    #[test]
    fn induced_probability_matches_exact() {
        let ds = DegreeSequence::regular(8, 3);
        let spec = InducedSubgraphSpec::empty(8, vec![0, 1]).unwrap();
        let exact = crate::exactcount::exact_induced_probability(
            &ds,
            &spec,
            &crate::exactcount::ExactConfig::default(),
        )
        .unwrap();
        let exact = num_traits::ToPrimitive::to_f64(&exact).unwrap();
        let e = estimate_induced_probability(&ds, &spec, &McConfig::new(40_000, 4)).unwrap();
        assert!(
            (e.mean - exact).abs() < 4.0 * e.stderr,
            "{} vs {exact}",
            e.mean
        );
    }

    #[test]
    fn zero_trials_rejected() {
        let (ds, bip) = tiny();
        assert!(estimate_p_simple(&ds, &bip, &McConfig::new(0, 1)).is_err());
    }
}
