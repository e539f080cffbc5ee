//! Brute-force ground truth: exact graph counts, induced-subgraph
//! probabilities, exhaustive pairing enumeration and class tables.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::degseq::{
    feasibility, residual, subset_bipartition, Bipartition, DegreeSequence, InducedSubgraphSpec,
    Residual,
};
use crate::error::{Error, Result};
use crate::numeric::BigCount;
use crate::pairing::{defect_census, DefectCensus, Pairing, PointLayout};
use crate::parallel::{map_reduce_slice, Execution};

/// Size limits and execution mode for the exhaustive oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactConfig {
    /// Largest total degree `M` accepted by the graph counters.
    pub max_graph_points: u64,
    /// Largest `M_1(R)` accepted by pairing enumeration.
    pub max_pairing_points: u64,
    pub execution: Execution,
}

impl Default for ExactConfig {
    fn default() -> Self {
        Self {
            max_graph_points: 64,
            max_pairing_points: 16,
            execution: Execution::Parallel,
        }
    }
}

fn binomial(n: u32, k: u32) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Counts labeled simple graphs realizing a multiset of degrees. The count
/// only depends on the multiset, so states are memoized on the sorted vector
/// of nonzero residual degrees.
#[derive(Default)]
struct GraphCounter {
    memo: HashMap<Vec<u32>, BigUint>,
}

impl GraphCounter {
    fn count(&mut self, degrees: &[u32]) -> BigUint {
        let mut key: Vec<u32> = degrees.iter().copied().filter(|&d| d > 0).collect();
        key.sort_unstable();
        self.count_sorted(key)
    }

    fn count_sorted(&mut self, mut key: Vec<u32>) -> BigUint {
        if key.is_empty() {
            return BigUint::one();
        }
        if let Some(c) = self.memo.get(&key) {
            return c.clone();
        }
        let total: u64 = key.iter().map(|&d| u64::from(d)).sum();
        // Remove a max-degree vertex and choose its neighbours among the rest.
        let d = key.pop().expect("nonempty");
        let result = if total % 2 == 1 || d as usize > key.len() {
            BigUint::zero()
        } else {
            let groups = group_counts(&key);
            let mut acc = BigUint::zero();
            let mut pick = vec![0u32; groups.len()];
            self.choose(&groups, 0, d, &mut pick, &mut acc);
            acc
        };
        key.push(d);
        self.memo.insert(key, result.clone());
        result
    }

    /// Distributes `left` neighbour slots over the degree groups, from group `i` on.
    fn choose(
        &mut self,
        groups: &[(u32, u32)],
        i: usize,
        left: u32,
        pick: &mut Vec<u32>,
        acc: &mut BigUint,
    ) {
        if left == 0 {
            let mut mult = BigUint::one();
            let mut next = Vec::new();
            for (g, &(deg, cnt)) in groups.iter().enumerate() {
                let x = pick.get(g).copied().unwrap_or(0);
                if x > 0 {
                    mult *= binomial(cnt, x);
                }
                next.extend(std::iter::repeat_n(deg - 1, x as usize));
                next.extend(std::iter::repeat_n(deg, (cnt - x) as usize));
            }
            next.retain(|&d| d > 0);
            next.sort_unstable();
            let sub = self.count_sorted(next);
            if !sub.is_zero() {
                *acc += mult * sub;
            }
            return;
        }
        if i == groups.len() {
            return;
        }
        let remaining: u32 = groups[i..].iter().map(|g| g.1).sum();
        if remaining < left {
            return;
        }
        for x in (0..=groups[i].1.min(left)).rev() {
            pick[i] = x;
            self.choose(groups, i + 1, left - x, pick, acc);
        }
        pick[i] = 0;
    }
}

/// `(degree, multiplicity)` runs of a sorted slice.
fn group_counts(sorted: &[u32]) -> Vec<(u32, u32)> {
    sorted
        .chunk_by(|a, b| a == b)
        .map(|r| (r[0], r.len() as u32))
        .collect()
}

fn check_graph_size(ds: &DegreeSequence, cfg: &ExactConfig) -> Result<()> {
    if ds.total() > cfg.max_graph_points {
        return Err(Error::SizeLimit {
            what: "total degree",
            actual: ds.total(),
            limit: cfg.max_graph_points,
        });
    }
    Ok(())
}

/// Number of labeled simple graphs on `[n]` with degree sequence `ds`.
pub fn exact_graph_count(ds: &DegreeSequence, cfg: &ExactConfig) -> Result<BigCount> {
    check_graph_size(ds, cfg)?;
    Ok(GraphCounter::default().count(ds.degrees()))
}

/// Number of labeled simple graphs with degree sequence `ds` in which `L` is
/// an independent set.
pub fn exact_bgraph_count(
    ds: &DegreeSequence,
    bip: &Bipartition,
    cfg: &ExactConfig,
) -> Result<BigCount> {
    check_graph_size(ds, cfg)?;
    if bip.n() != ds.n() {
        return Err(Error::OutOfRange(
            "bipartition and degree sequence sizes differ".into(),
        ));
    }
    if !feasibility(ds, bip).is_feasible() {
        return Ok(BigCount::zero());
    }
    let left: Vec<u32> = bip.left().iter().map(|&v| ds.degree(v)).collect();
    let mut right: Vec<u32> = bip.right().iter().map(|&v| ds.degree(v)).collect();
    right.sort_unstable();
    let mut state = BipartiteCounter {
        left,
        memo: HashMap::new(),
        inner: GraphCounter::default(),
    };
    Ok(state.count(0, right))
}

/// `L` vertices are attached to `R` one at a time; what remains is a plain
/// graph count on `R`. States are `(next L vertex, sorted R residuals)`.
struct BipartiteCounter {
    left: Vec<u32>,
    memo: HashMap<(usize, Vec<u32>), BigUint>,
    inner: GraphCounter,
}

impl BipartiteCounter {
    fn count(&mut self, i: usize, right: Vec<u32>) -> BigUint {
        if i == self.left.len() {
            return self.inner.count(&right);
        }
        let key = (i, right);
        if let Some(c) = self.memo.get(&key) {
            return c.clone();
        }
        let right = &key.1;
        let d = self.left[i];
        // Only R vertices with positive residual can take an edge.
        let zeros = right.iter().take_while(|&&x| x == 0).count();
        let groups = group_counts(&right[zeros..]);
        let mut acc = BigUint::zero();
        let mut pick = vec![0u32; groups.len()];
        self.choose(&groups, zeros as u32, i, 0, d, &mut pick, &mut acc);
        self.memo.insert(key, acc.clone());
        acc
    }

    #[allow(clippy::too_many_arguments)]
    fn choose(
        &mut self,
        groups: &[(u32, u32)],
        zeros: u32,
        i: usize,
        g: usize,
        left: u32,
        pick: &mut Vec<u32>,
        acc: &mut BigUint,
    ) {
        if left == 0 {
            let mut mult = BigUint::one();
            let mut next = vec![0u32; zeros as usize];
            for (k, &(deg, cnt)) in groups.iter().enumerate() {
                let x = pick[k];
                if x > 0 {
                    mult *= binomial(cnt, x);
                }
                next.extend(std::iter::repeat_n(deg - 1, x as usize));
                next.extend(std::iter::repeat_n(deg, (cnt - x) as usize));
            }
            next.sort_unstable();
            let sub = self.count(i + 1, next);
            if !sub.is_zero() {
                *acc += mult * sub;
            }
            return;
        }
        if g == groups.len() {
            return;
        }
        let remaining: u32 = groups[g..].iter().map(|x| x.1).sum();
        if remaining < left {
            return;
        }
        for x in (0..=groups[g].1.min(left)).rev() {
            pick[g] = x;
            self.choose(groups, zeros, i, g + 1, left - x, pick, acc);
        }
        pick[g] = 0;
    }
}

/// Exact probability that `G_S = H` for a uniform graph with degrees `ds`.
pub fn exact_induced_probability(
    ds: &DegreeSequence,
    spec: &InducedSubgraphSpec,
    cfg: &ExactConfig,
) -> Result<BigRational> {
    let g = exact_graph_count(ds, cfg)?;
    if g.is_zero() {
        return Err(Error::EmptyModel);
    }
    let dp = match residual(ds, spec)? {
        Residual::Feasible(dp) => dp,
        _ => return Ok(BigRational::zero()),
    };
    let bip = subset_bipartition(ds.n(), spec)?;
    let num = exact_bgraph_count(&dp, &bip, cfg)?;
    Ok(BigRational::new(BigInt::from(num), BigInt::from(g)))
}

fn enumeration_layout(
    ds: &DegreeSequence,
    bip: &Bipartition,
    cfg: &ExactConfig,
) -> Result<Option<Arc<PointLayout>>> {
    let layout = PointLayout::new(ds, bip)?;
    let m1r = layout.right_points().len() as u64;
    if m1r > cfg.max_pairing_points {
        return Err(Error::SizeLimit {
            what: "M1(R)",
            actual: m1r,
            limit: cfg.max_pairing_points,
        });
    }
    if !feasibility(ds, bip).is_feasible() {
        return Ok(None);
    }
    Ok(Some(Arc::new(layout)))
}

const UNSET: u32 = u32::MAX;

/// Depth-first walk over restricted pairings in canonical order: `L` points
/// in order take an unmatched `R` point, then the lowest unmatched `R` point
/// takes a higher unmatched one. `depth_limit` stops early and reports the
/// partial state instead, which is how work is split for parallel runs.
struct Walker<'a, F: FnMut(&mut Pairing)> {
    layout: &'a PointLayout,
    visit: F,
}

impl<F: FnMut(&mut Pairing)> Walker<'_, F> {
    fn walk(&mut self, p: &mut Pairing, li: usize, depth: usize, depth_limit: usize) {
        if depth == depth_limit {
            (self.visit)(p);
            return;
        }
        let lp = self.layout.left_points();
        if li < lp.len() {
            let l = lp[li];
            for &r in self.layout.right_points() {
                if p.mate[r as usize] == UNSET {
                    p.mate[l as usize] = r;
                    p.mate[r as usize] = l;
                    self.walk(p, li + 1, depth + 1, depth_limit);
                    p.mate[l as usize] = UNSET;
                    p.mate[r as usize] = UNSET;
                }
            }
            return;
        }
        let rp = self.layout.right_points();
        let Some(pos) = rp.iter().position(|&r| p.mate[r as usize] == UNSET) else {
            (self.visit)(p);
            return;
        };
        let first = rp[pos];
        for &r in &rp[pos + 1..] {
            if p.mate[r as usize] == UNSET {
                p.mate[first as usize] = r;
                p.mate[r as usize] = first;
                self.walk(p, li, depth + 1, depth_limit);
                p.mate[first as usize] = UNSET;
                p.mate[r as usize] = UNSET;
            }
        }
    }
}

fn empty_state(layout: &Arc<PointLayout>) -> Pairing {
    Pairing::from_parts_unchecked(layout.clone(), vec![UNSET; layout.points()])
}

fn left_done(p: &Pairing) -> usize {
    p.layout()
        .left_points()
        .iter()
        .take_while(|&&l| p.mate[l as usize] != UNSET)
        .count()
}

/// Calls `visitor` once for every restricted pairing of `(ds, bip)`,
/// sequentially and in canonical order.
pub fn enumerate_pairings<F: FnMut(&Pairing)>(
    ds: &DegreeSequence,
    bip: &Bipartition,
    cfg: &ExactConfig,
    mut visitor: F,
) -> Result<()> {
    let Some(layout) = enumeration_layout(ds, bip, cfg)? else {
        return Ok(());
    };
    let mut p = empty_state(&layout);
    let mut w = Walker {
        layout: &layout,
        visit: |p: &mut Pairing| visitor(p),
    };
    w.walk(&mut p, 0, 0, usize::MAX);
    Ok(())
}

/// Folds `fold` over every restricted pairing and merges per-subtree results
/// with `merge`. Subtrees are fixed by the first two choices, so the result is
/// the same in either execution mode whenever `merge` is associative.
pub fn fold_pairings<T, I, F, M>(
    ds: &DegreeSequence,
    bip: &Bipartition,
    cfg: &ExactConfig,
    identity: I,
    fold: F,
    merge: M,
) -> Result<T>
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    F: Fn(&mut T, &Pairing) + Sync + Send,
    M: Fn(T, T) -> T + Sync + Send,
{
    let Some(layout) = enumeration_layout(ds, bip, cfg)? else {
        return Ok(identity());
    };
    let mut prefixes: Vec<Vec<u32>> = Vec::new();
    {
        let mut p = empty_state(&layout);
        let mut w = Walker {
            layout: &layout,
            visit: |p: &mut Pairing| prefixes.push(p.mate.clone()),
        };
        w.walk(&mut p, 0, 0, 2);
    }
    let out = map_reduce_slice(
        &prefixes,
        cfg.execution,
        |prefix| {
            let mut acc = identity();
            let mut p = Pairing::from_parts_unchecked(layout.clone(), prefix.clone());
            let li = left_done(&p);
            let mut w = Walker {
                layout: &layout,
                visit: |p: &mut Pairing| fold(&mut acc, p),
            };
            w.walk(&mut p, li, 0, usize::MAX);
            acc
        },
        merge,
    );
    Ok(out.unwrap_or_else(identity))
}

/// Number of restricted pairings found by exhaustive enumeration.
pub fn enumerated_pairing_count(
    ds: &DegreeSequence,
    bip: &Bipartition,
    cfg: &ExactConfig,
) -> Result<u64> {
    fold_pairings(ds, bip, cfg, || 0u64, |c, _| *c += 1, |a, b| a + b)
}

/// A defect class `C_{l0,l1,l2}`; pairings with triple pairs or double loops
/// carry `has_higher_defect` and are kept apart from the classes proper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassKey {
    pub l0: u64,
    pub l1: u64,
    pub l2: u64,
    pub has_higher_defect: bool,
}

impl ClassKey {
    pub const CLEAN: ClassKey = ClassKey::new(0, 0, 0);

    pub const fn new(l0: u64, l1: u64, l2: u64) -> Self {
        Self {
            l0,
            l1,
            l2,
            has_higher_defect: false,
        }
    }

    pub fn of(c: &DefectCensus) -> Self {
        Self {
            l0: c.b0,
            l1: c.b1,
            l2: c.b2,
            has_higher_defect: c.has_higher_defect(),
        }
    }
}

impl std::fmt::Display for ClassKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.l0, self.l1, self.l2)?;
        if self.has_higher_defect {
            f.write_str("+higher")?;
        }
        Ok(())
    }
}

/// Exact class sizes of one instance.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClassTable {
    pub classes: BTreeMap<ClassKey, BigCount>,
    pub total: BigCount,
}

impl ClassTable {
    /// `|C_{l0,l1,l2}|`.
    pub fn get(&self, key: ClassKey) -> BigCount {
        self.classes.get(&key).cloned().unwrap_or_default()
    }

    /// Pairings with a triple pair or a double loop.
    pub fn higher_defect_total(&self) -> BigCount {
        self.classes
            .iter()
            .filter(|(k, _)| k.has_higher_defect)
            .map(|(_, c)| c)
            .sum()
    }
}

pub fn exact_class_table(
    ds: &DegreeSequence,
    bip: &Bipartition,
    cfg: &ExactConfig,
) -> Result<ClassTable> {
    let counts = fold_pairings(
        ds,
        bip,
        cfg,
        BTreeMap::<ClassKey, u64>::new,
        |m, p| *m.entry(ClassKey::of(&defect_census(p))).or_default() += 1,
        |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        },
    )?;
    let total = counts.values().map(|&v| BigCount::from(v)).sum();
    Ok(ClassTable {
        classes: counts.into_iter().map(|(k, v)| (k, v.into())).collect(),
        total,
    })
}

/// `|C_{0,0,0}| / |M(L, R, d)|`.
pub fn exact_p_simple(
    ds: &DegreeSequence,
    bip: &Bipartition,
    cfg: &ExactConfig,
) -> Result<BigRational> {
    let f = feasibility(ds, bip);
    if !f.is_feasible() {
        return Err(Error::Infeasible(f));
    }
    let table = exact_class_table(ds, bip, cfg)?;
    Ok(BigRational::new(
        table.get(ClassKey::CLEAN).into(),
        table.total.into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::count_restricted_pairings;

    fn cfg() -> ExactConfig {
        ExactConfig::default()
    }

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn tiny() -> (DegreeSequence, Bipartition) {
        (
            DegreeSequence::new(vec![1, 1, 2]),
            Bipartition::new(3, [0]).unwrap(),
        )
    }

    /// Counts graphs by trying every subset of the possible edges.
    fn brute_graph_count(ds: &DegreeSequence, bip: &Bipartition) -> u64 {
        let n = ds.n();
        let mut cand = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if !(bip.is_left(u) && bip.is_left(v)) {
                    cand.push((u, v));
                }
            }
        }
        let mut count = 0;
        for mask in 0u64..(1 << cand.len()) {
            let mut deg = vec![0u32; n];
            for (i, &(u, v)) in cand.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    deg[u] += 1;
                    deg[v] += 1;
                }
            }
            if deg == ds.degrees() {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn graph_count_examples() {
        let g = |d: Vec<u32>| exact_graph_count(&DegreeSequence::new(d), &cfg()).unwrap();
        assert_eq!(g(vec![3, 3, 3, 3]), 1u32.into());
        assert_eq!(g(vec![2, 2, 2, 2]), 3u32.into());
        assert_eq!(g(vec![1, 1]), 1u32.into());
        assert_eq!(g(vec![1, 1, 1]), 0u32.into());
        assert_eq!(g(vec![]), 1u32.into());
        assert_eq!(g(vec![3; 8]), 19355u32.into());
    }

    #[test]
    fn graph_count_matches_edge_subsets() {
        let cases: Vec<Vec<u32>> = vec![
            vec![2, 2, 2, 2, 2],
            vec![3, 2, 2, 1, 1, 1],
            vec![4, 3, 3, 2, 2, 1, 1],
            vec![1, 2, 3, 2, 1, 3],
            vec![3, 3, 3, 3, 3, 3],
            vec![5, 1, 1, 1, 1, 1],
        ];
        for d in cases {
            let n = d.len();
            let ds = DegreeSequence::new(d);
            let bip = Bipartition::empty(n);
            assert_eq!(
                exact_graph_count(&ds, &cfg()).unwrap(),
                brute_graph_count(&ds, &bip).into(),
                "{ds}"
            );
            for left in [vec![0], vec![1, 3], vec![0, 2, 4]] {
                let bip = Bipartition::new(n, left).unwrap();
                assert_eq!(
                    exact_bgraph_count(&ds, &bip, &cfg()).unwrap(),
                    brute_graph_count(&ds, &bip).into(),
                    "{ds} {:?}",
                    bip.left()
                );
            }
        }
    }

    #[test]
    fn bgraph_examples() {
        let (ds, bip) = tiny();
        assert_eq!(exact_bgraph_count(&ds, &bip, &cfg()).unwrap(), 1u32.into());
        let ds = DegreeSequence::new(vec![2, 2]);
        let bip = Bipartition::new(2, [0]).unwrap();
        assert!(exact_bgraph_count(&ds, &bip, &cfg()).unwrap().is_zero());
        let ds = DegreeSequence::regular(6, 3);
        assert_eq!(
            exact_bgraph_count(&ds, &Bipartition::empty(6), &cfg()).unwrap(),
            exact_graph_count(&ds, &cfg()).unwrap()
        );
    }

    #[test]
    fn size_limit() {
        let ds = DegreeSequence::regular(30, 3);
        assert!(matches!(
            exact_graph_count(&ds, &cfg()),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn induced_examples() {
        let k4 = DegreeSequence::regular(4, 3);
        let spec = InducedSubgraphSpec::new(
            4,
            vec![0, 1, 2, 3],
            vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        )
        .unwrap();
        assert_eq!(
            exact_induced_probability(&k4, &spec, &cfg()).unwrap(),
            q(1, 1)
        );

        let c4 = DegreeSequence::regular(4, 2);
        let edge = InducedSubgraphSpec::new(4, vec![0, 1], vec![(0, 1)]).unwrap();
        let none = InducedSubgraphSpec::empty(4, vec![0, 1]).unwrap();
        assert_eq!(
            exact_induced_probability(&c4, &edge, &cfg()).unwrap(),
            q(2, 3)
        );
        assert_eq!(
            exact_induced_probability(&c4, &none, &cfg()).unwrap(),
            q(1, 3)
        );

        let odd = DegreeSequence::new(vec![1, 1, 1]);
        let s = InducedSubgraphSpec::empty(3, vec![0]).unwrap();
        assert_eq!(
            exact_induced_probability(&odd, &s, &cfg()),
            Err(Error::EmptyModel)
        );
    }

    #[test]
    fn induced_sums_to_one() {
        let ds = DegreeSequence::regular(8, 3);
        let s = vec![0, 1, 2];
        let pairs = [(0, 1), (0, 2), (1, 2)];
        let mut total = BigRational::zero();
        for mask in 0..8 {
            let edges = (0..3)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| pairs[i])
                .collect();
            let spec = InducedSubgraphSpec::new(8, s.clone(), edges).unwrap();
            total += exact_induced_probability(&ds, &spec, &cfg()).unwrap();
        }
        assert_eq!(total, q(1, 1));
    }

    #[test]
    fn enumeration_examples() {
        let (ds, bip) = tiny();
        let mut seen = Vec::new();
        enumerate_pairings(&ds, &bip, &cfg(), |p| seen.push(p.mates().to_vec())).unwrap();
        assert_eq!(seen.len(), 3);
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 3);

        let ds = DegreeSequence::new(vec![1, 1]);
        let bip = Bipartition::new(2, [0]).unwrap();
        assert_eq!(enumerated_pairing_count(&ds, &bip, &cfg()).unwrap(), 1);

        let ds = DegreeSequence::new(vec![1, 2]);
        let bip = Bipartition::new(2, [0]).unwrap();
        assert_eq!(enumerated_pairing_count(&ds, &bip, &cfg()).unwrap(), 0);
    }

    #[test]
    fn enumeration_matches_formula() {
        for (d, left) in [
            (vec![2u32, 2, 2, 2], vec![]),
            (vec![3, 3, 2, 2, 2], vec![0]),
            (vec![1, 1, 2, 3, 3, 2], vec![0, 1, 2]),
            (vec![4, 2, 2, 2, 2, 2], vec![1, 2]),
        ] {
            let n = d.len();
            let ds = DegreeSequence::new(d);
            let bip = Bipartition::new(n, left).unwrap();
            let expect = count_restricted_pairings(&ds, &bip).unwrap();
            for execution in [Execution::Sequential, Execution::Parallel] {
                let c = ExactConfig { execution, ..cfg() };
                assert_eq!(
                    BigCount::from(enumerated_pairing_count(&ds, &bip, &c).unwrap()),
                    expect
                );
            }
        }
    }

    #[test]
    fn class_table_examples() {
        let (ds, bip) = tiny();
        let t = exact_class_table(&ds, &bip, &cfg()).unwrap();
        assert_eq!(t.get(ClassKey::new(0, 0, 0)), 2u32.into());
        assert_eq!(t.get(ClassKey::new(1, 0, 0)), 1u32.into());
        assert_eq!(t.total, 3u32.into());
        assert_eq!(exact_p_simple(&ds, &bip, &cfg()).unwrap(), q(2, 3));

        let ds = DegreeSequence::new(vec![2, 2]);
        let t = exact_class_table(&ds, &Bipartition::empty(2), &cfg()).unwrap();
        // Both cross matchings are double pairs; only {01, 23} has loops.
        assert_eq!(t.get(ClassKey::new(0, 0, 1)), 2u32.into());
        assert_eq!(t.get(ClassKey::new(2, 0, 0)), 1u32.into());
        assert_eq!(t.total, 3u32.into());
        assert!(exact_p_simple(&ds, &Bipartition::empty(2), &cfg())
            .unwrap()
            .is_zero());

        let ones = DegreeSequence::regular(6, 1);
        assert_eq!(
            exact_p_simple(&ones, &Bipartition::empty(6), &cfg()).unwrap(),
            q(1, 1)
        );
    }

    #[test]
    fn modes_give_identical_tables() {
        let ds = DegreeSequence::new(vec![3, 3, 2, 2, 2, 2]);
        let bip = Bipartition::new(6, [0]).unwrap();
        let seq = exact_class_table(
            &ds,
            &bip,
            &ExactConfig {
                execution: Execution::Sequential,
                ..cfg()
            },
        )
        .unwrap();
        assert_eq!(seq, exact_class_table(&ds, &bip, &cfg()).unwrap());
        assert_eq!(seq.total, count_restricted_pairings(&ds, &bip).unwrap());
    }
}
