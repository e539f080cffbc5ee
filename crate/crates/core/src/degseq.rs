//! Degree sequences, vertex bipartitions and the moment quantities built on them.
//!
//! Vertices are indexed `0..n`. A [`Bipartition`] `(L, R)` marks the vertices of
//! `L`, which must form an independent set in every graph counted against it.
//! `R` is always the complement of `L`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A vector of nonnegative vertex degrees with its total and maximum cached.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DegreeSequence {
    degrees: Vec<u32>,
    total: u64,
    max: u32,
}

impl DegreeSequence {
    pub fn new(degrees: Vec<u32>) -> Self {
        let total = degrees.iter().map(|&d| u64::from(d)).sum();
        let max = degrees.iter().copied().max().unwrap_or(0);
        Self {
            degrees,
            total,
            max,
        }
    }

    /// The constant sequence `(d, d, ..., d)` of length `n`.
    pub fn regular(n: usize, d: u32) -> Self {
        Self::new(vec![d; n])
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.degrees[v]
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    /// Total degree `M`, the number of points in the pairing model.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn max_degree(&self) -> u32 {
        self.max
    }

    /// Returns `Some(d)` when every vertex has degree `d` (and `n >= 1`).
    pub fn regular_degree(&self) -> Option<u32> {
        let first = *self.degrees.first()?;
        self.degrees.iter().all(|&d| d == first).then_some(first)
    }

    /// `M_2 = sum d_i (d_i - 1)` over all vertices.
    pub fn m2(&self) -> u64 {
        self.degrees.iter().map(|&d| falling2(d)).sum()
    }

    /// The relative error scale `d_max^4 / M` of the asymptotic formulas.
    pub fn error_scale(&self) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        f64::from(self.max).powi(4) / self.total as f64
    }

    pub(crate) fn check_index(&self, v: usize) -> Result<()> {
        if v >= self.n() {
            return Err(Error::IndexOutOfRange {
                index: v,
                n: self.n(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for DegreeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.degrees.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

fn falling2(d: u32) -> u64 {
    let d = u64::from(d);
    d * d.saturating_sub(1)
}

/// A split of `[n]` into `L` (independent side) and its complement `R`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bipartition {
    is_left: Vec<bool>,
    left: Vec<usize>,
    right: Vec<usize>,
}

impl Bipartition {
    pub fn new(n: usize, left: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut is_left = vec![false; n];
        for v in left {
            if v >= n {
                return Err(Error::IndexOutOfRange { index: v, n });
            }
            if is_left[v] {
                return Err(Error::DuplicateIndex(v));
            }
            is_left[v] = true;
        }
        Ok(Self::from_mask(is_left))
    }

    /// `L = {}`: the unconstrained, non-bipartite case.
    pub fn empty(n: usize) -> Self {
        Self::from_mask(vec![false; n])
    }

    fn from_mask(is_left: Vec<bool>) -> Self {
        let (left, right) = (0..is_left.len()).partition(|&v| is_left[v]);
        Self {
            is_left,
            left,
            right,
        }
    }

    pub fn n(&self) -> usize {
        self.is_left.len()
    }

    pub fn is_left(&self, v: usize) -> bool {
        self.is_left[v]
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn mask(&self) -> &[bool] {
        &self.is_left
    }

    pub(crate) fn check_matches(&self, ds: &DegreeSequence) -> Result<()> {
        if self.n() != ds.n() {
            return Err(Error::OutOfRange(format!(
                "bipartition covers {} vertices but the degree sequence has {}",
                self.n(),
                ds.n()
            )));
        }
        Ok(())
    }
}

/// `M_1(S) = sum_{i in S} d_i` and `M_2(S) = sum_{i in S} d_i (d_i - 1)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Moments {
    pub m1: u64,
    pub m2: u64,
}

impl std::ops::Add for Moments {
    type Output = Moments;

    fn add(self, rhs: Moments) -> Moments {
        Moments {
            m1: self.m1 + rhs.m1,
            m2: self.m2 + rhs.m2,
        }
    }
}

pub fn moments(ds: &DegreeSequence, subset: &[usize]) -> Result<Moments> {
    let mut out = Moments::default();
    for &v in subset {
        ds.check_index(v)?;
        let d = ds.degree(v);
        out.m1 += u64::from(d);
        out.m2 += falling2(d);
    }
    Ok(out)
}

/// Moments of `L` and `R` together.
pub fn side_moments(ds: &DegreeSequence, bip: &Bipartition) -> Result<(Moments, Moments)> {
    bip.check_matches(ds)?;
    Ok((moments(ds, bip.left())?, moments(ds, bip.right())?))
}

/// The exponent parameters of the B-graph count, kept as exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuParameters {
    pub mu0: BigRational,
    pub mu1: BigRational,
    pub mu2: BigRational,
    /// Number of pure pairs in every restricted pairing, `(M_1(R) - M_1(L)) / 2`.
    /// Rounded down when the difference is odd (no restricted pairing exists then).
    pub t: u64,
}

impl MuParameters {
    /// `mu0 + mu1 + mu2`, exactly.
    pub fn sum(&self) -> BigRational {
        &self.mu0 + &self.mu1 + &self.mu2
    }

    pub fn to_f64(&self) -> [f64; 3] {
        [
            rational_to_f64(&self.mu0),
            rational_to_f64(&self.mu1),
            rational_to_f64(&self.mu2),
        ]
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn ratio(num: u128, den: u128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `mu0 = (M1(R) - M1(L)) M2(R) / (2 M1(R)^2)`, `mu1 = M2(R) M2(L) / (2 M1(R)^2)`, `mu2 = mu0^2`.
///
/// When `M1(R) = 0` (so the whole sequence is zero) all three are zero.
pub fn mu_parameters(ds: &DegreeSequence, bip: &Bipartition) -> Result<MuParameters> {
    let (l, r) = side_moments(ds, bip)?;
    if r.m1 < l.m1 {
        return Err(Error::Infeasible(Feasibility::M1Deficit));
    }
    let t = (r.m1 - l.m1) / 2;
    if r.m1 == 0 {
        let zero = BigRational::zero();
        return Ok(MuParameters {
            mu0: zero.clone(),
            mu1: zero.clone(),
            mu2: zero,
            t,
        });
    }
    let den = 2 * u128::from(r.m1) * u128::from(r.m1);
    let mu0 = ratio(u128::from(r.m1 - l.m1) * u128::from(r.m2), den);
    let mu1 = ratio(u128::from(r.m2) * u128::from(l.m2), den);
    let mu2 = &mu0 * &mu0;
    Ok(MuParameters { mu0, mu1, mu2, t })
}

/// `mu(d) = M_2 / (2M)`; zero for the empty sequence.
pub fn mu_single(ds: &DegreeSequence) -> BigRational {
    if ds.total() == 0 {
        return BigRational::zero();
    }
    ratio(u128::from(ds.m2()), 2 * u128::from(ds.total()))
}

/// Why a restricted pairing (and hence a B-graph) cannot exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Feasibility {
    Feasible,
    /// `M` is odd and `M_1(L) = 0`.
    OddTotal,
    /// `M_1(R) - M_1(L)` is odd, so the pure points cannot be perfectly matched.
    OddPureCount,
    /// `M_1(R) < M_1(L)`: not enough `R` points to absorb the `L` points.
    M1Deficit,
}

impl Feasibility {
    pub fn is_feasible(self) -> bool {
        self == Feasibility::Feasible
    }
}

impl fmt::Display for Feasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Feasibility::Feasible => "feasible",
            Feasibility::OddTotal => "odd total degree",
            Feasibility::OddPureCount => "odd number of pure points M1(R) - M1(L)",
            Feasibility::M1Deficit => "M1(R) < M1(L)",
        };
        f.write_str(s)
    }
}

/// Classifies `(ds, bip)`. The deficit test runs first; an odd total is then
/// reported as [`Feasibility::OddTotal`] when `L` carries no points and as
/// [`Feasibility::OddPureCount`] otherwise (the two parities always agree).
pub fn feasibility(ds: &DegreeSequence, bip: &Bipartition) -> Feasibility {
    let (l, r) = match side_moments(ds, bip) {
        Ok(m) => m,
        Err(_) => return Feasibility::M1Deficit,
    };
    if r.m1 < l.m1 {
        Feasibility::M1Deficit
    } else if (r.m1 - l.m1) % 2 == 1 {
        if l.m1 == 0 {
            Feasibility::OddTotal
        } else {
            Feasibility::OddPureCount
        }
    } else {
        Feasibility::Feasible
    }
}

/// A graph `H` on a vertex subset `S`, to be matched against the induced subgraph `G_S`.
///
/// `S` is kept sorted; `edges` use global vertex indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InducedSubgraphSpec {
    subset: Vec<usize>,
    edges: Vec<(usize, usize)>,
    k: Vec<u32>,
}

impl InducedSubgraphSpec {
    pub fn new(n: usize, subset: Vec<usize>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut subset = subset;
        subset.sort_unstable();
        for w in subset.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateIndex(w[0]));
            }
        }
        if let Some(&last) = subset.last() {
            if last >= n {
                return Err(Error::IndexOutOfRange { index: last, n });
            }
        }
        let mut k = vec![0u32; subset.len()];
        let mut seen = std::collections::BTreeSet::new();
        let mut norm = Vec::with_capacity(edges.len());
        for &(u, v) in &edges {
            if u == v {
                return Err(Error::InvalidSubgraph(format!("loop at vertex {u}")));
            }
            let (iu, iv) = match (subset.binary_search(&u), subset.binary_search(&v)) {
                (Ok(a), Ok(b)) => (a, b),
                _ => {
                    return Err(Error::InvalidSubgraph(format!(
                        "edge ({u}, {v}) has an endpoint outside S"
                    )))
                }
            };
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::InvalidSubgraph(format!(
                    "parallel edge ({}, {})",
                    key.0, key.1
                )));
            }
            k[iu] += 1;
            k[iv] += 1;
            norm.push(key);
        }
        Ok(Self {
            subset,
            edges: norm,
            k,
        })
    }

    /// `H` with no edges on `S`.
    pub fn empty(n: usize, subset: Vec<usize>) -> Result<Self> {
        Self::new(n, subset, Vec::new())
    }

    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Degrees of `H`, aligned with [`subset`](Self::subset).
    pub fn degrees(&self) -> &[u32] {
        &self.k
    }

    pub fn s(&self) -> usize {
        self.subset.len()
    }

    /// `h = sum k_i = 2 |E(H)|`.
    pub fn h(&self) -> u64 {
        2 * self.edges.len() as u64
    }
}

/// Outcome of subtracting `H`'s degrees from the degree sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Residual {
    Feasible(DegreeSequence),
    /// Some `d'_i < 0`.
    NegativeDegree {
        vertex: usize,
    },
    /// `M_1(d', [n] \ S) < M_1(d', S)`.
    Deficit,
}

impl Residual {
    pub fn sequence(&self) -> Option<&DegreeSequence> {
        match self {
            Residual::Feasible(d) => Some(d),
            _ => None,
        }
    }
}

/// `d'_i = d_i - k_i` on `S`, `d_i` elsewhere.
pub fn residual(ds: &DegreeSequence, spec: &InducedSubgraphSpec) -> Result<Residual> {
    let mut degrees = ds.degrees().to_vec();
    for (&v, &k) in spec.subset().iter().zip(spec.degrees()) {
        ds.check_index(v)?;
        if k > degrees[v] {
            return Ok(Residual::NegativeDegree { vertex: v });
        }
        degrees[v] -= k;
    }
    let dp = DegreeSequence::new(degrees);
    let in_s = moments(&dp, spec.subset())?.m1;
    if dp.total() - in_s < in_s {
        return Ok(Residual::Deficit);
    }
    Ok(Residual::Feasible(dp))
}

/// The bipartition `(S, [n] \ S)` used for induced-subgraph counting.
pub fn subset_bipartition(n: usize, spec: &InducedSubgraphSpec) -> Result<Bipartition> {
    Bipartition::new(n, spec.subset().iter().copied())
}
