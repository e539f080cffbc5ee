//! Switchings between defect classes, and the double-counting check.
//!
//! Each switching is a template over numbered point labels: which labels share
//! a vertex, which side every vertex is on, the pairs present before and the
//! pairs that replace them. A site is an assignment of labels to points.
//! Sites are labeled, so the same pairs chosen with a different labeling are
//! different sites; this is what makes the double-counting identities exact.
//!
//! A site is valid when the pattern matches and the switching touches no
//! multiplicity other than the intended one: the target loop (or double pair)
//! goes from exactly one (exactly two pairs) to none, every other affected
//! vertex pair either keeps its multiplicity or stays within `{0, 1}`, and
//! the 2-paths the template names are simple. The rule is symmetric in
//! before and after, so forward sites at `P` and inverse sites at its image
//! are in bijection.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::degseq::{Bipartition, DegreeSequence};
use crate::error::{Error, Result};
use crate::exactcount::{fold_pairings, ClassKey, ExactConfig};
use crate::pairing::{defect_census, Pairing};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SwitchingKind {
    L1,
    L2,
    D1,
    D2,
    D3,
    D4,
    S1,
    S2,
    S3,
    S4,
}

impl SwitchingKind {
    pub const ALL: [SwitchingKind; 10] = [
        SwitchingKind::L1,
        SwitchingKind::L2,
        SwitchingKind::D1,
        SwitchingKind::D2,
        SwitchingKind::D3,
        SwitchingKind::D4,
        SwitchingKind::S1,
        SwitchingKind::S2,
        SwitchingKind::S3,
        SwitchingKind::S4,
    ];

    /// Number of labeled points in a site.
    pub fn labels(self) -> usize {
        self.template().groups.len()
    }

    /// Change of `(l0, l1, l2)` under the forward switching.
    pub fn class_shift(self) -> (i64, i64, i64) {
        match self {
            SwitchingKind::L1 | SwitchingKind::L2 => (-1, 0, 0),
            SwitchingKind::D1 | SwitchingKind::D2 => (0, -1, 0),
            SwitchingKind::D3 | SwitchingKind::D4 => (0, 0, -1),
            _ => (0, 0, 0),
        }
    }

    /// Whether the switching moves between classes (as opposed to
    /// rearranging 2-paths within one).
    pub fn changes_class(self) -> bool {
        self.class_shift() != (0, 0, 0)
    }

    fn template(self) -> &'static Template {
        &TEMPLATES[self as usize]
    }
}

impl fmt::Display for SwitchingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for SwitchingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SwitchingKind::ALL
            .into_iter()
            .find(|k| k.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown switching kind {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SwitchingOp {
    pub kind: SwitchingKind,
    pub direction: Direction,
}

impl SwitchingOp {
    pub fn forward(kind: SwitchingKind) -> Self {
        Self {
            kind,
            direction: Direction::Forward,
        }
    }

    pub fn inverse(kind: SwitchingKind) -> Self {
        Self {
            kind,
            direction: Direction::Inverse,
        }
    }

    /// The operation that undoes this one.
    pub fn reversed(self) -> Self {
        Self {
            kind: self.kind,
            direction: match self.direction {
                Direction::Forward => Direction::Inverse,
                Direction::Inverse => Direction::Forward,
            },
        }
    }

    /// Change of `(l0, l1, l2)` when this operation is applied.
    pub fn class_shift(self) -> (i64, i64, i64) {
        let (a, b, c) = self.kind.class_shift();
        match self.direction {
            Direction::Forward => (a, b, c),
            Direction::Inverse => (-a, -b, -c),
        }
    }
}

/// A labeled choice of points: `points[i]` carries label `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SwitchingSite {
    pub op: SwitchingOp,
    pub points: Vec<u32>,
}

#[derive(Debug, Clone, Copy)]
enum Target {
    None,
    Loop(u8),
    Double(u8, u8),
}

/// Labels are 1-based in the tables below; groups are 0-based.
struct Template {
    /// Vertex group of each label.
    groups: &'static [u8],
    /// Side of each group (`true` for `L`).
    left: &'static [bool],
    before: &'static [(u8, u8)],
    after: &'static [(u8, u8)],
    target: Target,
    /// Paths `(a, v, c)` by group that must be simple before / after.
    simple_before: &'static [(u8, u8, u8)],
    simple_after: &'static [(u8, u8, u8)],
}

const R: bool = false;
const L: bool = true;

static TEMPLATES: [Template; 10] = [
    // L1: loop {2,3} and pure pairs {1,5}, {4,6}.
    Template {
        groups: &[1, 0, 0, 2, 3, 4],
        left: &[R, R, R, R, R],
        before: &[(2, 3), (1, 5), (4, 6)],
        after: &[(1, 2), (3, 4), (5, 6)],
        target: Target::Loop(0),
        simple_before: &[],
        simple_after: &[],
    },
    // L2: loop {2,3} and mixed pairs {1,5}, {4,6} with 1 and 4 in L.
    Template {
        groups: &[1, 0, 0, 2, 3, 4],
        left: &[R, L, L, R, R],
        before: &[(2, 3), (1, 5), (4, 6)],
        after: &[(1, 2), (3, 4), (5, 6)],
        target: Target::Loop(0),
        simple_before: &[],
        simple_after: &[],
    },
    // D1: mixed double pair {3,4}, {5,6} (3, 5 in L) and pure pairs {1,2}, {7,8}.
    Template {
        groups: &[2, 3, 0, 1, 0, 1, 4, 5],
        left: &[L, R, R, R, R, R],
        before: &[(3, 4), (5, 6), (1, 2), (7, 8)],
        after: &[(1, 3), (5, 7), (2, 4), (6, 8)],
        target: Target::Double(0, 1),
        simple_before: &[],
        simple_after: &[],
    },
    // D2: the same double pair and mixed pairs {1,2}, {7,8} with 1 and 7 in L.
    Template {
        groups: &[2, 3, 0, 1, 0, 1, 4, 5],
        left: &[L, R, L, R, L, R],
        before: &[(3, 4), (5, 6), (1, 2), (7, 8)],
        after: &[(1, 4), (6, 7), (2, 3), (5, 8)],
        target: Target::Double(0, 1),
        simple_before: &[],
        simple_after: &[],
    },
    // D3: pure double pair {1,2}, {3,4} and pure pairs {5,6}, {7,8}.
    Template {
        groups: &[0, 1, 0, 1, 2, 3, 4, 5],
        left: &[R, R, R, R, R, R],
        before: &[(1, 2), (3, 4), (5, 6), (7, 8)],
        after: &[(1, 5), (2, 6), (3, 7), (4, 8)],
        target: Target::Double(0, 1),
        simple_before: &[],
        simple_after: &[],
    },
    // D4: pure double pair {1,2}, {3,4} and four mixed pairs, odd labels in L.
    Template {
        groups: &[0, 1, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9],
        left: &[R, R, L, R, L, R, L, R, L, R],
        before: &[(1, 2), (3, 4), (5, 6), (7, 8), (9, 10), (11, 12)],
        after: &[(6, 10), (8, 12), (1, 5), (3, 9), (2, 11), (4, 7)],
        target: Target::Double(0, 1),
        simple_before: &[],
        simple_after: &[],
    },
    // S1: mixed pair {1,2} (1 in L) and a type-1 path ((3,4),(5,6)).
    Template {
        groups: &[0, 1, 2, 3, 3, 4],
        left: &[L, R, R, R, R],
        before: &[(1, 2), (3, 4), (5, 6)],
        after: &[(2, 3), (1, 4), (5, 6)],
        target: Target::None,
        simple_before: &[(2, 3, 4)],
        simple_after: &[(0, 3, 4)],
    },
    // S2: pure pair {5,6} and a type-3 path ((1,2),(3,4)).
    Template {
        groups: &[0, 1, 1, 2, 3, 4],
        left: &[L, R, L, R, R],
        before: &[(1, 2), (3, 4), (5, 6)],
        after: &[(1, 2), (3, 5), (4, 6)],
        target: Target::None,
        simple_before: &[(0, 1, 2)],
        simple_after: &[(0, 1, 3)],
    },
    // S3: S1 plus a disjoint type-1 path ((7,8),(9,10)) that is kept.
    Template {
        groups: &[0, 1, 2, 3, 3, 4, 5, 6, 6, 7],
        left: &[L, R, R, R, R, R, R, R],
        before: &[(1, 2), (3, 4), (5, 6), (7, 8), (9, 10)],
        after: &[(2, 3), (1, 4), (5, 6), (7, 8), (9, 10)],
        target: Target::None,
        simple_before: &[(2, 3, 4), (5, 6, 7)],
        simple_after: &[(0, 3, 4), (5, 6, 7)],
    },
    // S4: S2 plus a disjoint type-1 path ((7,8),(9,10)) that is kept.
    Template {
        groups: &[0, 1, 1, 2, 3, 4, 5, 6, 6, 7],
        left: &[L, R, L, R, R, R, R, R],
        before: &[(1, 2), (3, 4), (5, 6), (7, 8), (9, 10)],
        after: &[(1, 2), (3, 5), (4, 6), (7, 8), (9, 10)],
        target: Target::None,
        simple_before: &[(0, 1, 2), (5, 6, 7)],
        simple_after: &[(0, 1, 3), (5, 6, 7)],
    },
];

/// A template read in one direction.
#[derive(Clone, Copy)]
struct Oriented {
    t: &'static Template,
    forward: bool,
}

impl Oriented {
    fn new(op: SwitchingOp) -> Self {
        Self {
            t: op.kind.template(),
            forward: op.direction == Direction::Forward,
        }
    }

    fn before(&self) -> &'static [(u8, u8)] {
        if self.forward {
            self.t.before
        } else {
            self.t.after
        }
    }

    fn after(&self) -> &'static [(u8, u8)] {
        if self.forward {
            self.t.after
        } else {
            self.t.before
        }
    }

    fn simple_before(&self) -> &'static [(u8, u8, u8)] {
        if self.forward {
            self.t.simple_before
        } else {
            self.t.simple_after
        }
    }

    fn simple_after(&self) -> &'static [(u8, u8, u8)] {
        if self.forward {
            self.t.simple_after
        } else {
            self.t.simple_before
        }
    }

    fn group(&self, label: usize) -> usize {
        self.t.groups[label] as usize
    }

    /// Before-pairs as 0-based labels, ordered so that each pair shares as
    /// many already-bound groups as possible.
    fn search_order(&self) -> Vec<(usize, usize)> {
        let mut rest: Vec<(usize, usize)> = self
            .before()
            .iter()
            .map(|&(a, b)| (a as usize - 1, b as usize - 1))
            .collect();
        let mut bound = vec![false; self.t.left.len()];
        let mut out = Vec::with_capacity(rest.len());
        while !rest.is_empty() {
            let score = |&(a, b): &(usize, usize)| {
                usize::from(bound[self.group(a)]) + usize::from(bound[self.group(b)])
            };
            let best = (0..rest.len())
                .max_by_key(|&i| (score(&rest[i]), std::cmp::Reverse(i)))
                .expect("nonempty");
            let (a, b) = rest.remove(best);
            bound[self.group(a)] = true;
            bound[self.group(b)] = true;
            out.push((a, b));
        }
        out
    }
}

/// Loop counts and edge multiplicities of a pairing's projection.
struct MultTable {
    loops: Vec<u32>,
    edges: HashMap<(usize, usize), u32>,
}

impl MultTable {
    fn of(p: &Pairing) -> Self {
        let mut loops = vec![0; p.layout().n()];
        let mut edges = HashMap::new();
        for (a, b) in p.pairs() {
            let (u, v) = (p.vertex_of(a), p.vertex_of(b));
            if u == v {
                loops[u] += 1;
            } else {
                *edges.entry((u.min(v), u.max(v))).or_insert(0) += 1;
            }
        }
        Self { loops, edges }
    }

    fn get(&self, (u, v): (usize, usize)) -> u32 {
        if u == v {
            self.loops[u]
        } else {
            self.edges.get(&(u, v)).copied().unwrap_or(0)
        }
    }
}

fn key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

/// The multiplicity checks that make a matched pattern a valid site.
fn local_ok(p: &Pairing, table: &MultTable, o: Oriented, points: &[u32], gv: &[usize]) -> bool {
    let vert = |label: u8| p.vertex_of(points[label as usize - 1]);
    let mut delta: Vec<((usize, usize), i64)> = Vec::with_capacity(12);
    let mut bump = |k: (usize, usize), d: i64| match delta.iter_mut().find(|e| e.0 == k) {
        Some(e) => e.1 += d,
        None => delta.push((k, d)),
    };
    for &(a, b) in o.before() {
        bump(key(vert(a), vert(b)), -1);
    }
    for &(a, b) in o.after() {
        bump(key(vert(a), vert(b)), 1);
    }
    let target = match o.t.target {
        Target::None => None,
        Target::Loop(g) => Some(((gv[g as usize], gv[g as usize]), 1)),
        Target::Double(g, h) => Some((key(gv[g as usize], gv[h as usize]), 2)),
    };
    for &(k, d) in &delta {
        let before = i64::from(table.get(k));
        let after = before + d;
        if let Some((tk, level)) = target {
            if k == tk {
                let (high, low) = if o.forward {
                    (before, after)
                } else {
                    (after, before)
                };
                if high != level || low != 0 {
                    return false;
                }
                continue;
            }
        }
        let is_loop = k.0 == k.1;
        if (is_loop || before >= 2 || after >= 2) && before != after {
            return false;
        }
    }
    let after_mult = |k: (usize, usize)| {
        let d = delta.iter().find(|e| e.0 == k).map_or(0, |e| e.1);
        i64::from(table.get(k)) + d
    };
    let simple = |paths: &[(u8, u8, u8)], m: &dyn Fn((usize, usize)) -> i64| {
        paths.iter().all(|&(a, v, c)| {
            let (a, v, c) = (gv[a as usize], gv[v as usize], gv[c as usize]);
            m(key(a, v)) == 1 && m(key(v, c)) == 1 && m((v, v)) == 0
        })
    };
    simple(o.simple_before(), &|k| i64::from(table.get(k))) && simple(o.simple_after(), &after_mult)
}

const UNSET: u32 = u32::MAX;
const NOVERTEX: usize = usize::MAX;

struct Search<'a, F: FnMut(&[u32])> {
    p: &'a Pairing,
    table: &'a MultTable,
    o: Oriented,
    order: Vec<(usize, usize)>,
    points: Vec<u32>,
    gv: Vec<usize>,
    visit: F,
}

impl<F: FnMut(&[u32])> Search<'_, F> {
    /// Binds `label` to point `q`; returns whether its group was newly bound.
    fn bind(&mut self, label: usize, q: u32) -> Option<bool> {
        if self.points.contains(&q) {
            return None;
        }
        let g = self.o.group(label);
        let v = self.p.vertex_of(q);
        let fresh = self.gv[g] == NOVERTEX;
        if fresh {
            if self.p.layout().is_left_vertex(v) != self.o.t.left[g] || self.gv.contains(&v) {
                return None;
            }
            self.gv[g] = v;
        } else if self.gv[g] != v {
            return None;
        }
        self.points[label] = q;
        Some(fresh)
    }

    fn unbind(&mut self, label: usize, fresh: bool) {
        self.points[label] = UNSET;
        if fresh {
            let g = self.o.group(label);
            self.gv[g] = NOVERTEX;
        }
    }

    fn dfs(&mut self, k: usize) {
        if k == self.order.len() {
            if local_ok(self.p, self.table, self.o, &self.points, &self.gv) {
                (self.visit)(&self.points);
            }
            return;
        }
        let (x, y) = self.order[k];
        let g = self.o.group(x);
        let layout = self.p.layout().clone();
        let candidates: &[u32] = if self.gv[g] != NOVERTEX {
            let b = layout.bucket(self.gv[g]);
            // Buckets are contiguous; borrow them from the side lists instead of allocating.
            let side = if layout.is_left_vertex(self.gv[g]) {
                layout.left_points()
            } else {
                layout.right_points()
            };
            let lo = side.partition_point(|&q| q < b.start);
            let hi = side.partition_point(|&q| q < b.end);
            &side[lo..hi]
        } else if self.o.t.left[g] {
            layout.left_points()
        } else {
            layout.right_points()
        };
        for &q in candidates {
            let Some(fx) = self.bind(x, q) else { continue };
            if let Some(fy) = self.bind(y, self.p.mate(q)) {
                self.dfs(k + 1);
                self.unbind(y, fy);
            }
            self.unbind(x, fx);
        }
    }
}

fn search<F: FnMut(&[u32])>(p: &Pairing, table: &MultTable, op: SwitchingOp, visit: F) {
    let o = Oriented::new(op);
    let mut s = Search {
        p,
        table,
        o,
        order: o.search_order(),
        points: vec![UNSET; op.kind.labels()],
        gv: vec![NOVERTEX; o.t.left.len()],
        visit,
    };
    s.dfs(0);
}

/// All valid sites of `op` in `p`.
pub fn find_sites(p: &Pairing, op: SwitchingOp) -> Vec<SwitchingSite> {
    let table = MultTable::of(p);
    let mut out = Vec::new();
    search(p, &table, op, |pts| {
        out.push(SwitchingSite {
            op,
            points: pts.to_vec(),
        })
    });
    out
}

/// Number of valid sites of `op` in `p`.
pub fn count_sites(p: &Pairing, op: SwitchingOp) -> u64 {
    let table = MultTable::of(p);
    let mut n = 0;
    search(p, &table, op, |_| n += 1);
    n
}

/// Checks that `site` is a valid site of its operation in `p`.
pub fn check_site(p: &Pairing, site: &SwitchingSite) -> Result<()> {
    let o = Oriented::new(site.op);
    let pts = &site.points;
    let bad = |msg: String| Err(Error::InvalidSite(msg));
    if pts.len() != site.op.kind.labels() {
        return bad(format!(
            "{} needs {} points, got {}",
            site.op.kind,
            site.op.kind.labels(),
            pts.len()
        ));
    }
    let npoints = p.layout().points() as u32;
    for (i, &q) in pts.iter().enumerate() {
        if q >= npoints {
            return bad(format!("point {q} out of range"));
        }
        if pts[..i].contains(&q) {
            return bad(format!("point {q} used twice"));
        }
    }
    for &(a, b) in o.before() {
        let (qa, qb) = (pts[a as usize - 1], pts[b as usize - 1]);
        if p.mate(qa) != qb {
            return bad(format!("labels {a} and {b} are not paired"));
        }
    }
    let mut gv = vec![NOVERTEX; o.t.left.len()];
    for (label, &q) in pts.iter().enumerate() {
        let g = o.group(label);
        let v = p.vertex_of(q);
        if gv[g] == NOVERTEX {
            if p.layout().is_left_vertex(v) != o.t.left[g] {
                return bad(format!("label {} is on the wrong side", label + 1));
            }
            if gv.contains(&v) {
                return bad(format!("vertex {v} is used by two groups"));
            }
            gv[g] = v;
        } else if gv[g] != v {
            return bad(format!("label {} is not in its group's vertex", label + 1));
        }
    }
    if !local_ok(p, &MultTable::of(p), o, pts, &gv) {
        return bad("switching would create or destroy another defect".into());
    }
    Ok(())
}

/// Applies a valid site and returns the new pairing.
pub fn apply(p: &Pairing, site: &SwitchingSite) -> Result<Pairing> {
    check_site(p, site)?;
    Ok(apply_unchecked(p, site))
}

fn apply_unchecked(p: &Pairing, site: &SwitchingSite) -> Pairing {
    let o = Oriented::new(site.op);
    let mut mate = p.mates().to_vec();
    for &(a, b) in o.after() {
        let (qa, qb) = (site.points[a as usize - 1], site.points[b as usize - 1]);
        mate[qa as usize] = qb;
        mate[qb as usize] = qa;
    }
    Pairing::from_parts_unchecked(p.layout().clone(), mate)
}

fn shifted(k: ClassKey, (a, b, c): (i64, i64, i64)) -> Option<ClassKey> {
    let add = |x: u64, d: i64| x.checked_add_signed(d);
    Some(ClassKey {
        l0: add(k.l0, a)?,
        l1: add(k.l1, b)?,
        l2: add(k.l2, c)?,
        has_higher_defect: k.has_higher_defect,
    })
}

/// One double-counting comparison: forward sites on pairings of `high` whose
/// image lies in `low`, against inverse sites on pairings of `low` whose image
/// lies in `high`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleCountRow {
    pub kind: SwitchingKind,
    pub high: ClassKey,
    pub low: ClassKey,
    pub high_size: u64,
    pub low_size: u64,
    pub forward_sum: u64,
    pub inverse_sum: u64,
}

impl DoubleCountRow {
    pub fn holds(&self) -> bool {
        self.forward_sum == self.inverse_sum
    }
}

/// All double-counting rows of one switching kind over an instance, plus the
/// number of valid sites whose image left the expected class (always zero
/// for a correct engine).
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DoubleCountTable {
    pub rows: Vec<DoubleCountRow>,
    pub class_violations: u64,
    pub restriction_violations: u64,
}

#[derive(Default)]
struct Tally {
    sizes: BTreeMap<ClassKey, u64>,
    forward: BTreeMap<(ClassKey, ClassKey), u64>,
    inverse: BTreeMap<(ClassKey, ClassKey), u64>,
    class_violations: u64,
    restriction_violations: u64,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        for (k, v) in other.sizes {
            *self.sizes.entry(k).or_default() += v;
        }
        for (k, v) in other.forward {
            *self.forward.entry(k).or_default() += v;
        }
        for (k, v) in other.inverse {
            *self.inverse.entry(k).or_default() += v;
        }
        self.class_violations += other.class_violations;
        self.restriction_violations += other.restriction_violations;
        self
    }
}

/// Exhaustively tallies forward and inverse sites of `kind` over every
/// restricted pairing, keyed by (class before, class after).
pub fn double_count_table(
    ds: &DegreeSequence,
    bip: &Bipartition,
    kind: SwitchingKind,
    cfg: &ExactConfig,
) -> Result<DoubleCountTable> {
    let tally = fold_pairings(
        ds,
        bip,
        cfg,
        Tally::default,
        |t, p| {
            let class = ClassKey::of(&defect_census(p));
            *t.sizes.entry(class).or_default() += 1;
            let table = MultTable::of(p);
            for op in [SwitchingOp::forward(kind), SwitchingOp::inverse(kind)] {
                let expect = shifted(class, op.class_shift());
                search(p, &table, op, |pts| {
                    let site = SwitchingSite {
                        op,
                        points: pts.to_vec(),
                    };
                    let img = apply_unchecked(p, &site);
                    if !img.is_restricted() {
                        t.restriction_violations += 1;
                    }
                    let img_class = ClassKey::of(&defect_census(&img));
                    if Some(img_class) != expect {
                        t.class_violations += 1;
                    }
                    match op.direction {
                        Direction::Forward => {
                            *t.forward.entry((class, img_class)).or_default() += 1
                        }
                        Direction::Inverse => {
                            *t.inverse.entry((img_class, class)).or_default() += 1
                        }
                    }
                });
            }
        },
        Tally::merge,
    )?;
    let mut keys: Vec<(ClassKey, ClassKey)> = tally.forward.keys().copied().collect();
    keys.extend(tally.inverse.keys().copied());
    keys.sort();
    keys.dedup();
    let size = |k: &ClassKey| tally.sizes.get(k).copied().unwrap_or(0);
    let rows = keys
        .into_iter()
        .map(|(high, low)| DoubleCountRow {
            kind,
            high,
            low,
            high_size: size(&high),
            low_size: size(&low),
            forward_sum: tally.forward.get(&(high, low)).copied().unwrap_or(0),
            inverse_sum: tally.inverse.get(&(high, low)).copied().unwrap_or(0),
        })
        .collect();
    Ok(DoubleCountTable {
        rows,
        class_violations: tally.class_violations,
        restriction_violations: tally.restriction_violations,
    })
}

/// The double-counting identity for one class pair: the sum over `C_high` of
/// forward site counts equals the sum over `C_low` of inverse site counts.
pub fn verify_double_count(
    ds: &DegreeSequence,
    bip: &Bipartition,
    kind: SwitchingKind,
    key_high: ClassKey,
    key_low: ClassKey,
    cfg: &ExactConfig,
) -> Result<DoubleCountRow> {
    let table = double_count_table(ds, bip, kind, cfg)?;
    let sizes = crate::exactcount::exact_class_table(ds, bip, cfg)?;
    let size = |k| u64::try_from(sizes.get(k)).unwrap_or(u64::MAX);
    Ok(table
        .rows
        .into_iter()
        .find(|r| r.high == key_high && r.low == key_low)
        .unwrap_or(DoubleCountRow {
            kind,
            high: key_high,
            low: key_low,
            high_size: size(key_high),
            low_size: size(key_low),
            forward_sum: 0,
            inverse_sum: 0,
        }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcount::enumerate_pairings;
    use crate::pairing::{project, PointLayout};
    use std::sync::Arc;

    fn cfg() -> ExactConfig {
        ExactConfig::default()
    }

    fn pairing(degrees: Vec<u32>, left: Vec<usize>, pairs: &[(u32, u32)]) -> Pairing {
        let ds = DegreeSequence::new(degrees);
        let bip = Bipartition::new(ds.n(), left).unwrap();
        let layout = Arc::new(PointLayout::new(&ds, &bip).unwrap());
        let mut mate = vec![u32::MAX; layout.points()];
        for &(a, b) in pairs {
            mate[a as usize] = b;
            mate[b as usize] = a;
        }
        Pairing::new(layout, mate).unwrap()
    }

    #[test]
    fn templates_are_well_formed() {
        for kind in SwitchingKind::ALL {
            let t = kind.template();
            let n = t.groups.len();
            for pairs in [t.before, t.after] {
                let mut seen: Vec<u8> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
                seen.sort_unstable();
                assert_eq!(seen, (1..=n as u8).collect::<Vec<_>>(), "{kind}");
                for &(a, b) in pairs {
                    let (ga, gb) = (t.groups[a as usize - 1], t.groups[b as usize - 1]);
                    assert!(
                        !(t.left[ga as usize] && t.left[gb as usize]),
                        "{kind} L-L pair"
                    );
                }
            }
            let groups = *t.groups.iter().max().unwrap() as usize + 1;
            assert_eq!(groups, t.left.len(), "{kind}");
        }
    }

    #[test]
    fn tiny_loop_pairing_has_no_sites() {
        // (1,1,2), L = {0}: the loop pairing.
        let p = pairing(vec![1, 1, 2], vec![0], &[(0, 1), (2, 3)]);
        assert_eq!(count_sites(&p, SwitchingOp::forward(SwitchingKind::L1)), 0);
        assert_eq!(count_sites(&p, SwitchingOp::forward(SwitchingKind::L2)), 0);
    }

    /// Independent count of valid L1 sites: every ordered choice of a loop and
    /// two pure pairs with every labeling, judged on the full projections.
    fn brute_l1(p: &Pairing) -> u64 {
        let pairs: Vec<(u32, u32)> = p.pairs().collect();
        let lay = p.layout();
        let before = project(p);
        let mut count = 0;
        for &(a, b) in &pairs {
            if p.vertex_of(a) != p.vertex_of(b) {
                continue;
            }
            for &(c, d) in &pairs {
                for &(e, f) in &pairs {
                    if (c, d) == (e, f) || (c, d) == (a, b) || (e, f) == (a, b) {
                        continue;
                    }
                    for (l2, l3) in [(a, b), (b, a)] {
                        for (l1, l5) in [(c, d), (d, c)] {
                            for (l4, l6) in [(e, f), (f, e)] {
                                let vs: Vec<usize> = [l1, l2, l4, l5, l6]
                                    .iter()
                                    .map(|&q| p.vertex_of(q))
                                    .collect();
                                let mut sorted = vs.clone();
                                sorted.sort_unstable();
                                sorted.dedup();
                                if sorted.len() != 5 || vs.iter().any(|&v| lay.is_left_vertex(v)) {
                                    continue;
                                }
                                let mut mate = p.mates().to_vec();
                                for (x, y) in [(l1, l2), (l3, l4), (l5, l6)] {
                                    mate[x as usize] = y;
                                    mate[y as usize] = x;
                                }
                                let q = Pairing::new(lay.clone(), mate).unwrap();
                                let after = project(&q);
                                let center = p.vertex_of(l2);
                                let mut ok = before.loops(center) == 1 && after.loops(center) == 0;
                                for v in 0..lay.n() {
                                    if v != center && before.loops(v) != after.loops(v) {
                                        ok = false;
                                    }
                                    for w in v + 1..lay.n() {
                                        let (x, y) =
                                            (before.multiplicity(v, w), after.multiplicity(v, w));
                                        if (x >= 2 || y >= 2) && x != y {
                                            ok = false;
                                        }
                                    }
                                }
                                if ok {
                                    count += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
        count
    }

    #[test]
    fn l1_count_matches_brute_force() {
        let ds = DegreeSequence::regular(6, 2);
        let bip = Bipartition::empty(6);
        let mut checked = 0;
        enumerate_pairings(&ds, &bip, &cfg(), |p| {
            if defect_census(p).b0 == 1 {
                assert_eq!(
                    count_sites(p, SwitchingOp::forward(SwitchingKind::L1)),
                    brute_l1(p)
                );
                checked += 1;
            }
        })
        .unwrap();
        assert!(checked > 0);
    }

    #[test]
    fn l1_reduces_loops_and_round_trips() {
        let ds = DegreeSequence::new(vec![2, 2, 2, 2, 1, 1]);
        let bip = Bipartition::empty(6);
        let mut sites_seen = 0;
        enumerate_pairings(&ds, &bip, &cfg(), |p| {
            let before = defect_census(p);
            for site in find_sites(p, SwitchingOp::forward(SwitchingKind::L1)) {
                let q = apply(p, &site).unwrap();
                let after = defect_census(&q);
                assert_eq!(after.b0 + 1, before.b0);
                assert_eq!((after.b1, after.b2), (before.b1, before.b2));
                let back = SwitchingSite {
                    op: site.op.reversed(),
                    points: site.points.clone(),
                };
                assert_eq!(&apply(&q, &back).unwrap(), p);
                sites_seen += 1;
            }
        })
        .unwrap();
        assert!(sites_seen > 0);
    }

    #[test]
    fn invalid_sites_rejected() {
        let p = pairing(vec![1, 1, 2], vec![0], &[(0, 2), (1, 3)]);
        let site = SwitchingSite {
            op: SwitchingOp::forward(SwitchingKind::S1),
            points: vec![0, 1, 2, 3, 4, 5],
        };
        assert!(apply(&p, &site).is_err());
        let short = SwitchingSite {
            op: SwitchingOp::forward(SwitchingKind::L1),
            points: vec![0],
        };
        assert!(matches!(check_site(&p, &short), Err(Error::InvalidSite(_))));
    }

    #[test]
    fn d3_identity_small() {
        let ds = DegreeSequence::new(vec![2, 2, 1, 1, 1, 1]);
        let bip = Bipartition::empty(6);
        let row = verify_double_count(
            &ds,
            &bip,
            SwitchingKind::D3,
            ClassKey::new(0, 0, 1),
            ClassKey::new(0, 0, 0),
            &cfg(),
        )
        .unwrap();
        assert!(row.forward_sum > 0);
        assert!(row.holds());
    }

    #[test]
    fn empty_classes_give_zero_rows() {
        let ds = DegreeSequence::new(vec![1, 1]);
        let bip = Bipartition::empty(2);
        let row = verify_double_count(
            &ds,
            &bip,
            SwitchingKind::L1,
            ClassKey::new(1, 0, 0),
            ClassKey::new(0, 0, 0),
            &cfg(),
        )
        .unwrap();
        assert_eq!((row.forward_sum, row.inverse_sum), (0, 0));
        assert!(row.holds());
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("d4".parse::<SwitchingKind>().unwrap(), SwitchingKind::D4);
        assert!("X9".parse::<SwitchingKind>().is_err());
    }
}
