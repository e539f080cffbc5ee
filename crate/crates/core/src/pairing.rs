//! The restricted pairing model.
//!
//! Vertex `v` owns a bucket of `d_v` consecutive points. A pairing is a
//! fixed-point-free involution on the points; it is *restricted* when no pair
//! joins two points in `L`-buckets. Contracting buckets gives a multigraph.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Range;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::degseq::{feasibility, Bipartition, DegreeSequence};
use crate::error::{Error, Result};

/// Points grouped into vertex buckets, with the `L`/`R` side of each vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointLayout {
    degrees: Vec<u32>,
    start: Vec<u32>,
    vertex_of: Vec<u32>,
    left: Vec<bool>,
    left_points: Vec<u32>,
    right_points: Vec<u32>,
}

impl PointLayout {
    pub fn new(ds: &DegreeSequence, bip: &Bipartition) -> Result<Self> {
        if bip.n() != ds.n() {
            return Err(Error::OutOfRange(format!(
                "bipartition has {} vertices, degree sequence has {}",
                bip.n(),
                ds.n()
            )));
        }
        let total = ds.total();
        if total > u64::from(u32::MAX) {
            return Err(Error::SizeLimit {
                what: "point count",
                actual: total,
                limit: u64::from(u32::MAX),
            });
        }
        let mut start = Vec::with_capacity(ds.n() + 1);
        let mut vertex_of = Vec::with_capacity(total as usize);
        let mut left_points = Vec::new();
        let mut right_points = Vec::new();
        let mut p = 0u32;
        for (v, &d) in ds.degrees().iter().enumerate() {
            start.push(p);
            for _ in 0..d {
                vertex_of.push(v as u32);
                if bip.is_left(v) {
                    left_points.push(p);
                } else {
                    right_points.push(p);
                }
                p += 1;
            }
        }
        start.push(p);
        Ok(Self {
            degrees: ds.degrees().to_vec(),
            start,
            vertex_of,
            left: bip.mask().to_vec(),
            left_points,
            right_points,
        })
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn points(&self) -> usize {
        self.vertex_of.len()
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn degree_sequence(&self) -> DegreeSequence {
        DegreeSequence::new(self.degrees.clone())
    }

    pub fn bipartition(&self) -> Bipartition {
        let left = self
            .left
            .iter()
            .enumerate()
            .filter(|(_, &l)| l)
            .map(|(v, _)| v);
        Bipartition::new(self.n(), left).expect("layout sides are valid")
    }

    pub fn bucket(&self, v: usize) -> Range<u32> {
        self.start[v]..self.start[v + 1]
    }

    pub fn vertex_of(&self, p: u32) -> usize {
        self.vertex_of[p as usize] as usize
    }

    pub fn is_left_vertex(&self, v: usize) -> bool {
        self.left[v]
    }

    pub fn is_left_point(&self, p: u32) -> bool {
        self.left[self.vertex_of(p)]
    }

    pub fn left_points(&self) -> &[u32] {
        &self.left_points
    }

    pub fn right_points(&self) -> &[u32] {
        &self.right_points
    }
}

/// A restricted pairing over a shared [`PointLayout`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pairing {
    layout: Arc<PointLayout>,
    pub(crate) mate: Vec<u32>,
}

impl Pairing {
    /// Validates that `mate` is a fixed-point-free involution with no `L`-`L` pair.
    pub fn new(layout: Arc<PointLayout>, mate: Vec<u32>) -> Result<Self> {
        if mate.len() != layout.points() {
            return Err(Error::InvalidPairing(format!(
                "{} mates for {} points",
                mate.len(),
                layout.points()
            )));
        }
        for (p, &q) in mate.iter().enumerate() {
            let p = p as u32;
            if q as usize >= mate.len() {
                return Err(Error::InvalidPairing(format!(
                    "mate {q} of point {p} out of range"
                )));
            }
            if q == p || mate[q as usize] != p {
                return Err(Error::InvalidPairing(format!(
                    "point {p} is not properly paired"
                )));
            }
            if layout.is_left_point(p) && layout.is_left_point(q) {
                return Err(Error::InvalidPairing(format!(
                    "pair {{{p}, {q}}} lies inside L"
                )));
            }
        }
        Ok(Self { layout, mate })
    }

    pub(crate) fn from_parts_unchecked(layout: Arc<PointLayout>, mate: Vec<u32>) -> Self {
        Self { layout, mate }
    }

    pub fn layout(&self) -> &Arc<PointLayout> {
        &self.layout
    }

    pub fn mate(&self, p: u32) -> u32 {
        self.mate[p as usize]
    }

    pub fn mates(&self) -> &[u32] {
        &self.mate
    }

    pub fn vertex_of(&self, p: u32) -> usize {
        self.layout.vertex_of(p)
    }

    /// Each pair once, as `(p, q)` with `p < q`.
    pub fn pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.mate
            .iter()
            .enumerate()
            .filter(|&(p, &q)| (p as u32) < q)
            .map(|(p, &q)| (p as u32, q))
    }

    pub fn is_restricted(&self) -> bool {
        self.pairs()
            .all(|(p, q)| !(self.layout.is_left_point(p) && self.layout.is_left_point(q)))
    }

    /// Serializes as `degrees ; mates ; left`, all space-separated and 0-based.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |it: &mut dyn Iterator<Item = String>| it.collect::<Vec<_>>().join(" ");
        let degrees = join(&mut self.layout.degrees.iter().map(|d| d.to_string()));
        let mates = join(&mut self.mate.iter().map(|m| m.to_string()));
        let left = join(
            &mut (0..self.layout.n())
                .filter(|&v| self.layout.is_left_vertex(v))
                .map(|v| v.to_string()),
        );
        write!(f, "{degrees} ; {mates} ; {left}")
    }
}

impl FromStr for Pairing {
    type Err = Error;

    /// Parses `degrees ; mates` with an optional `; left` section.
    fn from_str(s: &str) -> Result<Self> {
        fn ints<T: FromStr>(sec: &str, what: &str) -> Result<Vec<T>> {
            sec.split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::Parse(format!("bad {what} entry {t:?}")))
                })
                .collect()
        }
        let sections: Vec<&str> = s.trim().split(';').collect();
        if !(2..=3).contains(&sections.len()) {
            return Err(Error::Parse(
                "expected `degrees ; mates` or `degrees ; mates ; left`".into(),
            ));
        }
        let degrees: Vec<u32> = ints(sections[0], "degree")?;
        let mate: Vec<u32> = ints(sections[1], "mate")?;
        let left: Vec<usize> = match sections.get(2) {
            Some(sec) => ints(sec, "left vertex")?,
            None => Vec::new(),
        };
        let ds = DegreeSequence::new(degrees);
        let bip = Bipartition::new(ds.n(), left)?;
        Pairing::new(Arc::new(PointLayout::new(&ds, &bip)?), mate)
    }
}

/// Exactly uniform sampler for restricted pairings of a fixed instance.
///
/// Each call draws `M_1(R) - 1` integers (none when `M_1(R) <= 1`): a
/// Fisher-Yates shuffle of the `R` points, whose first `M_1(L)` entries become
/// the mates of the `L` points in order and whose remainder is paired off
/// consecutively. Every restricted pairing is produced by exactly
/// `t! 2^t` permutations, so the output is uniform.
#[derive(Debug, Clone)]
pub struct Sampler {
    layout: Arc<PointLayout>,
}

impl Sampler {
    pub fn new(ds: &DegreeSequence, bip: &Bipartition) -> Result<Self> {
        let f = feasibility(ds, bip);
        if !f.is_feasible() {
            return Err(Error::Infeasible(f));
        }
        Ok(Self {
            layout: Arc::new(PointLayout::new(ds, bip)?),
        })
    }

    pub fn layout(&self) -> &Arc<PointLayout> {
        &self.layout
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Pairing {
        let mut mate = vec![0u32; self.layout.points()];
        let mut scratch = Vec::new();
        self.fill(rng, &mut mate, &mut scratch);
        Pairing::from_parts_unchecked(self.layout.clone(), mate)
    }

    /// Resamples `pairing` in place, reusing its buffers.
    pub fn resample<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        pairing: &mut Pairing,
        scratch: &mut Vec<u32>,
    ) {
        debug_assert!(Arc::ptr_eq(&pairing.layout, &self.layout));
        self.fill(rng, &mut pairing.mate, scratch);
    }

    fn fill<R: Rng + ?Sized>(&self, rng: &mut R, mate: &mut [u32], perm: &mut Vec<u32>) {
        perm.clear();
        perm.extend_from_slice(self.layout.right_points());
        let m = perm.len();
        for i in 0..m.saturating_sub(1) {
            let j = rng.random_range(i..m);
            perm.swap(i, j);
        }
        let lp = self.layout.left_points();
        for (&l, &r) in lp.iter().zip(perm.iter()) {
            mate[l as usize] = r;
            mate[r as usize] = l;
        }
        for pair in perm[lp.len()..].chunks_exact(2) {
            mate[pair[0] as usize] = pair[1];
            mate[pair[1] as usize] = pair[0];
        }
    }
}

/// Samples one uniformly random restricted pairing.
pub fn sample_restricted<R: Rng + ?Sized>(
    ds: &DegreeSequence,
    bip: &Bipartition,
    rng: &mut R,
) -> Result<Pairing> {
    Ok(Sampler::new(ds, bip)?.sample(rng))
}

/// Per-point pair multiplicities and per-vertex loop counts of a pairing.
#[derive(Debug, Clone)]
pub(crate) struct Adjacency {
    /// For a non-loop point, the number of pairs joining its vertex to its
    /// mate's vertex; 0 for points in loops.
    pub mult: Vec<u32>,
    pub loops: Vec<u32>,
}

impl Adjacency {
    pub fn of(p: &Pairing) -> Self {
        let layout = &p.layout;
        let mut loops = vec![0u32; layout.n()];
        let mut mult = vec![0u32; layout.points()];
        let mut keyed: Vec<(u64, u32)> = Vec::with_capacity(layout.points() / 2);
        for (a, b) in p.pairs() {
            let (u, v) = (layout.vertex_of(a) as u64, layout.vertex_of(b) as u64);
            if u == v {
                loops[u as usize] += 1;
            } else {
                keyed.push(((u.min(v) << 32) | u.max(v), a));
            }
        }
        keyed.sort_unstable();
        for run in keyed.chunk_by(|x, y| x.0 == y.0) {
            let m = run.len() as u32;
            for &(_, a) in run {
                mult[a as usize] = m;
                mult[p.mate(a) as usize] = m;
            }
        }
        Self { mult, loops }
    }
}

/// Counts of the non-simple structures in a pairing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DefectCensus {
    /// Loops.
    pub b0: u64,
    /// Mixed (`L`-`R`) vertex pairs joined by exactly two pairs.
    pub b1: u64,
    /// Pure (`R`-`R`) vertex pairs joined by exactly two pairs.
    pub b2: u64,
    /// Mixed vertex pairs joined by three or more pairs.
    pub t1: u64,
    /// Pure vertex pairs joined by three or more pairs.
    pub t2: u64,
    /// Pairs of loops sharing a vertex, `sum_v C(loops_v, 2)`.
    pub i_dl: u64,
}

impl DefectCensus {
    pub fn is_clean(&self) -> bool {
        *self == DefectCensus::default()
    }

    /// Whether any defect excluded from the `(l0, l1, l2)` classes is present.
    pub fn has_higher_defect(&self) -> bool {
        self.t1 + self.t2 + self.i_dl > 0
    }
}

pub fn defect_census(p: &Pairing) -> DefectCensus {
    let layout = &p.layout;
    let mut c = DefectCensus::default();
    let mut keyed: Vec<(u64, bool)> = Vec::with_capacity(layout.points() / 2);
    let mut loops = vec![0u64; layout.n()];
    for (a, b) in p.pairs() {
        let (u, v) = (layout.vertex_of(a), layout.vertex_of(b));
        if u == v {
            loops[u] += 1;
            c.b0 += 1;
        } else {
            let mixed = layout.is_left_vertex(u) || layout.is_left_vertex(v);
            let (u, v) = (u.min(v) as u64, u.max(v) as u64);
            keyed.push(((u << 32) | v, mixed));
        }
    }
    keyed.sort_unstable();
    for run in keyed.chunk_by(|x, y| x.0 == y.0) {
        let mixed = run[0].1;
        match (run.len(), mixed) {
            (1, _) => {}
            (2, true) => c.b1 += 1,
            (2, false) => c.b2 += 1,
            (_, true) => c.t1 += 1,
            (_, false) => c.t2 += 1,
        }
    }
    c.i_dl = loops.iter().map(|&l| l * l.saturating_sub(1) / 2).sum();
    c
}

pub fn is_simple(p: &Pairing) -> bool {
    defect_census(p).is_clean()
}

/// A labeled multigraph: loop counts per vertex and edge multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Multigraph {
    n: usize,
    loops: Vec<u32>,
    edges: BTreeMap<(usize, usize), u32>,
}

impl Multigraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn loops(&self, v: usize) -> u32 {
        self.loops[v]
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> u32 {
        if u == v {
            return self.loops[u];
        }
        self.edges.get(&(u.min(v), u.max(v))).copied().unwrap_or(0)
    }

    /// Distinct vertex pairs `(u, v)`, `u < v`, with their multiplicities.
    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), u32)> + '_ {
        self.edges.iter().map(|(&k, &m)| (k, m))
    }

    pub fn is_simple(&self) -> bool {
        self.loops.iter().all(|&l| l == 0) && self.edges.values().all(|&m| m == 1)
    }
}

/// Contracts every bucket to its vertex.
pub fn project(p: &Pairing) -> Multigraph {
    let n = p.layout.n();
    let mut g = Multigraph {
        n,
        loops: vec![0; n],
        edges: BTreeMap::new(),
    };
    for (a, b) in p.pairs() {
        let (u, v) = (p.vertex_of(a), p.vertex_of(b));
        if u == v {
            g.loops[u] += 1;
        } else {
            *g.edges.entry((u.min(v), u.max(v))).or_default() += 1;
        }
    }
    g
}

/// A directed 2-path `((u1, u1'), (u2, u2'))`: `u1'` and `u2` share the middle
/// vertex `v`, and the end vertices `a = vertex(u1)`, `c = vertex(u2')` are
/// distinct from each other and from `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TwoPath {
    pub u1: u32,
    pub u1p: u32,
    pub u2: u32,
    pub u2p: u32,
    pub a: usize,
    pub v: usize,
    pub c: usize,
    /// 1: `RRR`, 2: `LRR`, 3: `LRL`, 4: `RLR`; 0 for `RRL`, which is a
    /// reversed type-2 path and is not counted separately.
    pub kind: u8,
}

pub(crate) fn path_kind(la: bool, lv: bool, lc: bool) -> u8 {
    match (la, lv, lc) {
        (false, false, false) => 1,
        (true, false, false) => 2,
        (true, false, true) => 3,
        (false, true, false) => 4,
        _ => 0,
    }
}

/// All simple directed 2-paths, including the uncounted `RRL` orientation.
///
/// Simple means neither pair lies in a multiple pair and `v` has no loop.
pub fn simple_two_paths(p: &Pairing) -> Vec<TwoPath> {
    simple_two_paths_with(p, &Adjacency::of(p))
}

pub(crate) fn simple_two_paths_with(p: &Pairing, adj: &Adjacency) -> Vec<TwoPath> {
    let layout = &p.layout;
    let mut out = Vec::new();
    for v in 0..layout.n() {
        if adj.loops[v] > 0 {
            continue;
        }
        let bucket = layout.bucket(v);
        for x in bucket.clone() {
            if adj.mult[x as usize] != 1 {
                continue;
            }
            let u1 = p.mate(x);
            let a = layout.vertex_of(u1);
            for y in bucket.clone() {
                if y == x || adj.mult[y as usize] != 1 {
                    continue;
                }
                let u2p = p.mate(y);
                let c = layout.vertex_of(u2p);
                if c == a {
                    continue;
                }
                let kind = path_kind(
                    layout.is_left_vertex(a),
                    layout.is_left_vertex(v),
                    layout.is_left_vertex(c),
                );
                out.push(TwoPath {
                    u1,
                    u1p: x,
                    u2: y,
                    u2p,
                    a,
                    v,
                    c,
                    kind,
                });
            }
        }
    }
    out
}

/// `A_1..A_4` only; cheaper than the full census.
pub fn two_path_counts(p: &Pairing) -> [u64; 4] {
    let adj = Adjacency::of(p);
    let layout = &p.layout;
    let mut a = [0u64; 4];
    for v in 0..layout.n() {
        if adj.loops[v] > 0 {
            continue;
        }
        let bucket = layout.bucket(v);
        let lv = layout.is_left_vertex(v);
        for x in bucket.clone() {
            if adj.mult[x as usize] != 1 {
                continue;
            }
            let ea = layout.vertex_of(p.mate(x));
            let la = layout.is_left_vertex(ea);
            for y in bucket.clone() {
                if y == x || adj.mult[y as usize] != 1 {
                    continue;
                }
                let ec = layout.vertex_of(p.mate(y));
                if ec == ea {
                    continue;
                }
                let k = path_kind(la, lv, layout.is_left_vertex(ec));
                if k > 0 {
                    a[k as usize - 1] += 1;
                }
            }
        }
    }
    a
}

/// Simple directed 2-path counts by type and vertex-disjoint pair counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwoPathCensus {
    /// `A_1..A_4` at indices `0..4`.
    pub a: [u64; 4],
    /// Ordered vertex-disjoint pairs with type signatures
    /// `(1,1), (3,3), (1,2), (1,3), (2,3)` at indices `0..5`.
    pub x: [u64; 5],
}

/// Type signatures of the `X` counts.
pub const X_SIGNATURES: [(u8, u8); 5] = [(1, 1), (3, 3), (1, 2), (1, 3), (2, 3)];

pub fn two_path_census(p: &Pairing) -> TwoPathCensus {
    let paths: Vec<TwoPath> = simple_two_paths(p)
        .into_iter()
        .filter(|t| t.kind > 0)
        .collect();
    let mut a = [0u64; 4];
    for t in &paths {
        a[t.kind as usize - 1] += 1;
    }
    // For each type: how many paths contain a vertex, a vertex pair, a vertex triple.
    let mut one: HashMap<(u8, usize), u64> = HashMap::new();
    let mut two: HashMap<(u8, usize, usize), u64> = HashMap::new();
    let mut three: HashMap<(u8, [usize; 3]), u64> = HashMap::new();
    for t in paths.iter().filter(|t| t.kind <= 3) {
        let vs = sorted3(t);
        for &w in &vs {
            *one.entry((t.kind, w)).or_default() += 1;
        }
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            *two.entry((t.kind, vs[i], vs[j])).or_default() += 1;
        }
        *three.entry((t.kind, vs)).or_default() += 1;
    }
    let touching = |h: u8, vs: [usize; 3]| -> u64 {
        let s1: u64 = vs
            .iter()
            .map(|&w| one.get(&(h, w)).copied().unwrap_or(0))
            .sum();
        let s2: u64 = [(0, 1), (0, 2), (1, 2)]
            .iter()
            .map(|&(i, j)| two.get(&(h, vs[i], vs[j])).copied().unwrap_or(0))
            .sum();
        let s3 = three.get(&(h, vs)).copied().unwrap_or(0);
        s1 - s2 + s3
    };
    let mut x = [0u64; 5];
    for t in paths.iter() {
        let vs = sorted3(t);
        for (i, &(h1, h2)) in X_SIGNATURES.iter().enumerate() {
            if t.kind == h1 {
                x[i] += a[h2 as usize - 1] - touching(h2, vs);
            }
        }
    }
    TwoPathCensus { a, x }
}

fn sorted3(t: &TwoPath) -> [usize; 3] {
    let mut vs = [t.a, t.v, t.c];
    vs.sort_unstable();
    vs
}
