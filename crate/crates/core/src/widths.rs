//! Cop strategies and the path and tree decompositions compiled from them.
//!
//! The level sweep moves one cop per column up a layered graph, using one
//! spare cop for the step. Instance strategies chain such sweeps over the
//! frame sides, each gadget's B/LB block and each corridor between
//! neighbouring R paths.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Debug, Display};

use serde::Serialize;
use thiserror::Error;

use crate::graph::{
    subdivide_parallel, validate_decomposition, CornerKind, Decomposition, FrameCorner, GraphView,
    PathDecomposition, Pol, ReductionGraph, Side, Subdivided, TreeDecomposition, Validity, VertexId,
};
use crate::reduction::{clause_left_rows, clause_right_rows};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WidthError {
    #[error("sweep input: {0}")]
    BadSweepInput(String),
    #[error("sweep stuck at level {level}: no column can advance")]
    SweepStuck { level: usize },
    #[error("sweep used {used} cops, limit {limit}")]
    TooManyCops { used: usize, limit: usize },
    #[error("invalid move: {0}")]
    InvalidMove(String),
    #[error("lifting {0} recontaminates the cleared region")]
    NonMonotone(String),
    #[error("{0} vertices are never cleared")]
    NotCleared(usize),
    #[error("vertex {0} is occupied twice")]
    PlacedTwice(String),
    #[error("region vertex {inside} has a neighbour {outside} outside the separator")]
    RegionLeak { inside: String, outside: String },
    #[error("graph is not a generated instance: {0}")]
    NotAnInstance(String),
    #[error("emitted decomposition is invalid: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Move<V> {
    Place(V),
    Lift(V),
}

impl<V: Display> Display for Move<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Place(v) => write!(f, "place {v}"),
            Move::Lift(v) => write!(f, "lift {v}"),
        }
    }
}

/// Sequence of cop placements and removals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CopStrategy<V = VertexId> {
    pub moves: Vec<Move<V>>,
}

impl<V> Default for CopStrategy<V> {
    fn default() -> Self {
        Self { moves: Vec::new() }
    }
}

impl<V: Ord + Copy + Display> CopStrategy<V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn place(&mut self, v: V) {
        self.moves.push(Move::Place(v));
    }

    pub fn lift(&mut self, v: V) {
        self.moves.push(Move::Lift(v));
    }

    pub fn extend(&mut self, other: &CopStrategy<V>) {
        self.moves.extend(other.moves.iter().copied());
    }

    /// Cop set after every move.
    pub fn timeline(&self) -> Result<Vec<BTreeSet<V>>, WidthError> {
        let mut cops = BTreeSet::new();
        let mut out = Vec::with_capacity(self.moves.len());
        for m in &self.moves {
            match *m {
                Move::Place(v) => {
                    if !cops.insert(v) {
                        return Err(WidthError::InvalidMove(format!("{v} is already occupied")));
                    }
                }
                Move::Lift(v) => {
                    if !cops.remove(&v) {
                        return Err(WidthError::InvalidMove(format!("{v} is not occupied")));
                    }
                }
            }
            out.push(cops.clone());
        }
        Ok(out)
    }

    pub fn max_cops(&self) -> Result<usize, WidthError> {
        Ok(self.timeline()?.iter().map(|s| s.len()).max().unwrap_or(0))
    }

    /// The cops left on the graph at the end.
    pub fn final_cops(&self) -> Result<BTreeSet<V>, WidthError> {
        Ok(self.timeline()?.pop().unwrap_or_default())
    }
}

/// Simulates the strategy on `g` against an invisible robber that starts
/// everywhere. Fails at the first lift that lets the robber back into a
/// cleared vertex, or if some vertex is never cleared.
pub fn check_monotone<G: GraphView>(g: &G, s: &CopStrategy<G::V>) -> Result<usize, WidthError> {
    let vertices = g.vertex_list();
    let mut adj: BTreeMap<G::V, Vec<G::V>> = vertices.iter().map(|&v| (v, Vec::new())).collect();
    for (u, v) in g.edge_list() {
        adj.entry(u).or_default().push(v);
        adj.entry(v).or_default().push(u);
    }
    let mut contaminated: BTreeSet<G::V> = vertices.iter().copied().collect();
    let mut cops: BTreeSet<G::V> = BTreeSet::new();
    let mut max = 0;
    for m in &s.moves {
        match *m {
            Move::Place(v) => {
                if !adj.contains_key(&v) {
                    return Err(WidthError::InvalidMove(format!("{v} is not a vertex")));
                }
                if !cops.insert(v) {
                    return Err(WidthError::InvalidMove(format!("{v} is already occupied")));
                }
                contaminated.remove(&v);
                max = max.max(cops.len());
            }
            Move::Lift(v) => {
                if !cops.remove(&v) {
                    return Err(WidthError::InvalidMove(format!("{v} is not occupied")));
                }
                if adj[&v].iter().any(|w| contaminated.contains(w)) {
                    return Err(WidthError::NonMonotone(v.to_string()));
                }
            }
        }
    }
    if !contaminated.is_empty() {
        return Err(WidthError::NotCleared(contaminated.len()));
    }
    Ok(max)
}

/// Bags are the cop sets after every placement, with bags contained in a
/// neighbour dropped.
pub fn strategy_to_path_decomposition<V: Ord + Copy + Display>(
    s: &CopStrategy<V>,
) -> Result<PathDecomposition<V>, WidthError> {
    let mut placed = BTreeSet::new();
    let timeline = s.timeline()?;
    let mut bags = Vec::new();
    for (m, cops) in s.moves.iter().zip(timeline) {
        if let Move::Place(v) = *m {
            if !placed.insert(v) {
                return Err(WidthError::PlacedTwice(v.to_string()));
            }
            bags.push(cops);
        }
    }
    Ok(PathDecomposition {
        bags: compact_bags(bags),
    })
}

/// Drops every bag that is a subset of an adjacent one.
pub fn compact_bags<V: Ord + Clone>(bags: Vec<BTreeSet<V>>) -> Vec<BTreeSet<V>> {
    let mut out: Vec<BTreeSet<V>> = Vec::with_capacity(bags.len());
    for b in bags {
        if out.last().is_some_and(|last| b.is_subset(last)) {
            continue;
        }
        while out.last().is_some_and(|last| last.is_subset(&b)) {
            out.pop();
        }
        out.push(b);
    }
    out
}

/// Layered graph for the level sweep. Column `i` lists `(level, vertex)`
/// pairs with strictly increasing levels; missing levels are virtual and
/// never occupied. Edges touching `fixed` are ignored: those vertices hold
/// cops for the whole sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepInput<V> {
    pub columns: Vec<Vec<(usize, V)>>,
    pub edges: Vec<(V, V)>,
    pub fixed: BTreeSet<V>,
}

impl<V: Ord + Copy + Display + Debug> SweepInput<V> {
    /// Column and level of every vertex.
    fn positions(&self) -> Result<HashMap<V, (usize, usize)>, WidthError>
    where
        V: std::hash::Hash,
    {
        let mut pos = HashMap::new();
        for (c, col) in self.columns.iter().enumerate() {
            if col.is_empty() {
                return Err(WidthError::BadSweepInput(format!("column {c} is empty")));
            }
            for (k, &(lvl, v)) in col.iter().enumerate() {
                if k > 0 && col[k - 1].0 >= lvl {
                    return Err(WidthError::BadSweepInput(format!("levels of column {c} do not increase at {v}")));
                }
                if pos.insert(v, (c, lvl)).is_some() {
                    return Err(WidthError::BadSweepInput(format!("{v} appears twice")));
                }
            }
        }
        Ok(pos)
    }

    /// Checks that columns are induced paths, that other edges join
    /// neighbouring columns on equal or consecutive levels, and that no two
    /// such edges form a crossing pair.
    pub fn validate(&self) -> Result<(), WidthError>
    where
        V: std::hash::Hash,
    {
        let pos = self.positions()?;
        let bad = |msg: String| Err(WidthError::BadSweepInput(msg));
        let mut cross: BTreeSet<(usize, usize, usize, usize)> = BTreeSet::new();
        for &(u, v) in &self.edges {
            if self.fixed.contains(&u) || self.fixed.contains(&v) {
                continue;
            }
            let (Some(&(cu, lu)), Some(&(cv, lv))) = (pos.get(&u), pos.get(&v)) else {
                return bad(format!("edge ({u},{v}) leaves the columns"));
            };
            if cu == cv {
                let col = &self.columns[cu];
                let ku = col.iter().position(|x| x.1 == u).unwrap_or(0);
                let kv = col.iter().position(|x| x.1 == v).unwrap_or(0);
                if ku.abs_diff(kv) != 1 {
                    return bad(format!("edge ({u},{v}) is a chord of column {cu}"));
                }
                continue;
            }
            if cu.abs_diff(cv) != 1 || lu.abs_diff(lv) > 1 {
                return bad(format!("edge ({u},{v}) joins ({cu},{lu}) and ({cv},{lv})"));
            }
            let ((ca, la), (cb, lb)) = if cu < cv { ((cu, lu), (cv, lv)) } else { ((cv, lv), (cu, lu)) };
            cross.insert((ca, la, cb, lb));
        }
        for &(ca, la, cb, lb) in &cross {
            if la != lb && cross.contains(&(ca, lb, cb, la)) {
                return bad(format!("crossing pair between columns {ca} and {cb} at levels {la} and {lb}"));
            }
        }
        Ok(())
    }
}

/// Level sweep with one cop per column plus one spare.
///
/// Cops start on the lowest vertex of every column. A column may advance
/// from level `j` when every edge from its level-`j` vertex up to level
/// `j + 1` ends at an occupied vertex; such a column always exists on a
/// valid input. Vertices in `fixed` are never placed or lifted.
pub fn sweep_strategy<V>(input: &SweepInput<V>) -> Result<CopStrategy<V>, WidthError>
where
    V: Ord + Copy + Display + Debug + std::hash::Hash,
{
    input.validate()?;
    let m = input.columns.len();
    let top = input.columns.iter().filter_map(|c| c.last().map(|x| x.0)).max().unwrap_or(0);
    let exact: Vec<BTreeMap<usize, V>> = input.columns.iter().map(|c| c.iter().copied().collect()).collect();
    let rep = |c: usize, lvl: usize| -> V {
        let col = &input.columns[c];
        col.iter().rev().find(|x| x.0 <= lvl).unwrap_or(&col[0]).1
    };
    let mut up: HashMap<V, Vec<(usize, usize)>> = HashMap::new();
    let pos = input.positions()?;
    for &(u, v) in &input.edges {
        if input.fixed.contains(&u) || input.fixed.contains(&v) {
            continue;
        }
        let (pu, pv) = (pos[&u], pos[&v]);
        if pu.0 == pv.0 {
            continue;
        }
        if pv.1 == pu.1 + 1 {
            up.entry(u).or_default().push(pv);
        } else if pu.1 == pv.1 + 1 {
            up.entry(v).or_default().push(pu);
        }
    }
    let mut s = CopStrategy::new();
    let mut held: BTreeSet<V> = BTreeSet::new();
    let mut level = vec![0usize; m];
    let mut used = 0;
    let place = |s: &mut CopStrategy<V>, held: &mut BTreeSet<V>, v: V| {
        if !input.fixed.contains(&v) && held.insert(v) {
            s.place(v);
        }
    };
    let lift = |s: &mut CopStrategy<V>, held: &mut BTreeSet<V>, v: V| {
        if held.remove(&v) {
            s.lift(v);
        }
    };
    for c in 0..m {
        place(&mut s, &mut held, rep(c, 0));
    }
    used = used.max(held.len());
    for j in 0..top {
        while let Some(c) = (0..m).find(|&c| {
            level[c] == j
                && exact[c].get(&j).is_none_or(|x| {
                    up.get(x).is_none_or(|ups| ups.iter().all(|&(cc, _)| level[cc] == j + 1))
                })
        }) {
            let (from, to) = (rep(c, j), rep(c, j + 1));
            if from != to {
                place(&mut s, &mut held, to);
                used = used.max(held.len());
                lift(&mut s, &mut held, from);
            }
            level[c] = j + 1;
        }
        if level.contains(&j) {
            return Err(WidthError::SweepStuck { level: j });
        }
    }
    if used > m + 1 {
        return Err(WidthError::TooManyCops { used, limit: m + 1 });
    }
    for v in held.clone() {
        lift(&mut s, &mut held, v);
    }
    Ok(s)
}

fn corner(i: usize, which: CornerKind) -> VertexId {
    VertexId::Corner { i, which }
}

fn frame(c: FrameCorner) -> VertexId {
    VertexId::Frame(c)
}

fn r(i: usize, j: usize, side: Side) -> VertexId {
    VertexId::R { i, j, side }
}

/// Vertices that separate the outer frame region from the rest.
fn frontier(n: usize, h: usize) -> [VertexId; 8] {
    [
        r(1, 1, Side::L),
        r(1, h + 3, Side::L),
        frame(FrameCorner::BL),
        frame(FrameCorner::TL),
        r(n, 1, Side::R),
        r(n, h + 3, Side::R),
        frame(FrameCorner::BR),
        frame(FrameCorner::TR),
    ]
}

fn right_four(n: usize, h: usize) -> [VertexId; 4] {
    let f = frontier(n, h);
    [f[4], f[5], f[6], f[7]]
}

fn corners(i: usize) -> [VertexId; 4] {
    [
        corner(i, CornerKind::U0),
        corner(i, CornerKind::U1),
        corner(i, CornerKind::W1),
        corner(i, CornerKind::W0),
    ]
}

/// Left and right side vertices of a frame-side column: row `j` of the
/// frame side, or the clause end attached between two rows.
#[derive(Debug, Clone, Copy)]
enum SideItem {
    Row(usize),
    Clause(usize),
}

/// Levels of rows `1..=h+3` and clause ends on both frame sides, chosen so
/// that both ends of every clause edge share a level.
struct FrameLevels {
    left_row: Vec<usize>,
    right_row: Vec<usize>,
    clause: Vec<usize>,
}

fn side_items(h: usize, l: usize, after: impl Fn(usize) -> usize) -> Vec<Vec<SideItem>> {
    let mut segs = vec![Vec::new()];
    let mut next = 1;
    for row in 1..=h + 3 {
        segs.last_mut().expect("nonempty").push(SideItem::Row(row));
        if next <= l && after(next) == row {
            segs.push(vec![SideItem::Clause(next)]);
            segs.push(Vec::new());
            next += 1;
        }
    }
    segs
}

fn frame_levels(n: usize, h: usize, l: usize) -> FrameLevels {
    let left = side_items(h, l, |j| clause_left_rows(j).0);
    let right = side_items(h, l, |j| clause_right_rows(j, n).0);
    let mut out = FrameLevels {
        left_row: vec![0; h + 4],
        right_row: vec![0; h + 4],
        clause: vec![0; l + 1],
    };
    let mut base = 0;
    for (a, b) in left.iter().zip(&right) {
        for (k, it) in a.iter().enumerate() {
            match *it {
                SideItem::Row(row) => out.left_row[row] = base + k,
                SideItem::Clause(j) => out.clause[j] = base + k,
            }
        }
        for (k, it) in b.iter().enumerate() {
            if let SideItem::Row(row) = *it {
                out.right_row[row] = base + k;
            }
        }
        base += a.len().max(b.len());
    }
    out
}

fn check_instance_shape(g: &ReductionGraph) -> Result<(), WidthError> {
    if g.n == 0 || g.h == 0 {
        return Err(WidthError::NotAnInstance("missing n or h".into()));
    }
    let probes = [
        frame(FrameCorner::BL),
        corner(g.n, CornerKind::W1),
        r(g.n + 1, g.h + 2, Side::L),
        VertexId::V { i: g.n, j: g.h + 2, pol: Pol::N },
    ];
    for p in probes {
        if !g.contains(p) {
            return Err(WidthError::NotAnInstance(format!("vertex {p} missing")));
        }
    }
    Ok(())
}

fn edges_within(g: &ReductionGraph, set: &BTreeSet<VertexId>) -> Vec<(VertexId, VertexId)> {
    g.edges()
        .iter()
        .filter(|e| set.contains(&e.u) && set.contains(&e.v))
        .map(|e| (e.u, e.v))
        .collect()
}

fn sweep_input(g: &ReductionGraph, columns: Vec<Vec<(usize, VertexId)>>, fixed: BTreeSet<VertexId>) -> SweepInput<VertexId> {
    let all: BTreeSet<VertexId> = columns.iter().flatten().map(|x| x.1).chain(fixed.iter().copied()).collect();
    SweepInput {
        edges: edges_within(g, &all),
        columns,
        fixed,
    }
}

/// The outer region: R-left of the first gadget, both frame sides with
/// their clause ends, and R-right of the last gadget.
fn outer_columns(g: &ReductionGraph) -> Vec<Vec<(usize, VertexId)>> {
    let (n, h, l) = (g.n, g.h, g.l);
    let lv = frame_levels(n, h, l);
    let mut c1 = Vec::new();
    let mut c2 = Vec::new();
    let mut c3 = Vec::new();
    let mut c4 = Vec::new();
    for row in 1..=h + 3 {
        let (a, b) = (lv.left_row[row], lv.right_row[row]);
        c1.push((a, r(1, row, Side::L)));
        c4.push((b, r(n, row, Side::R)));
        let (left, right) = if row == 1 {
            (frame(FrameCorner::BL), frame(FrameCorner::BR))
        } else if row == h + 3 {
            (frame(FrameCorner::TL), frame(FrameCorner::TR))
        } else {
            (r(0, row, Side::R), r(n + 1, row, Side::L))
        };
        c2.push((a, left));
        c3.push((b, right));
    }
    for j in 1..=l {
        c2.push((lv.clause[j], VertexId::ClauseEnd { j, side: Side::L }));
        c3.push((lv.clause[j], VertexId::ClauseEnd { j, side: Side::R }));
    }
    c2.sort();
    c3.sort();
    vec![c1, c2, c3, c4]
}

/// B-pos, LB-pos, LB-neg, B-neg of gadget `i`, levelled by row.
fn block_columns(i: usize, h: usize) -> Vec<Vec<(usize, VertexId)>> {
    let col = |f: &dyn Fn(usize) -> VertexId| (1..=h + 2).map(|j| (j, f(j))).collect::<Vec<_>>();
    vec![
        col(&|j| VertexId::B { i, j, pol: Pol::P }),
        col(&|j| VertexId::V { i, j, pol: Pol::P }),
        col(&|j| VertexId::V { i, j, pol: Pol::N }),
        col(&|j| VertexId::B { i, j, pol: Pol::N }),
    ]
}

/// R-right of gadget `i` and R-left of gadget `i + 1`.
fn corridor_columns(i: usize, h: usize) -> Vec<Vec<(usize, VertexId)>> {
    vec![
        (1..=h + 3).map(|j| (j, r(i, j, Side::R))).collect(),
        (1..=h + 3).map(|j| (j, r(i + 1, j, Side::L))).collect(),
    ]
}

/// Tracks the cop set while an instance strategy is assembled.
struct Builder {
    s: CopStrategy,
    cops: BTreeSet<VertexId>,
}

impl Builder {
    fn place(&mut self, v: VertexId) {
        if self.cops.insert(v) {
            self.s.place(v);
        }
    }

    fn lift(&mut self, v: VertexId) {
        if self.cops.remove(&v) {
            self.s.lift(v);
        }
    }

    fn sweep(&mut self, g: &ReductionGraph, columns: Vec<Vec<(usize, VertexId)>>) -> Result<(), WidthError> {
        let input = sweep_input(g, columns, self.cops.clone());
        let sub = sweep_strategy(&input)?;
        self.s.extend(&sub);
        Ok(())
    }
}

/// Strategy for an invisible robber with at most 13 cops.
pub fn instance_path_strategy(g: &ReductionGraph) -> Result<CopStrategy, WidthError> {
    check_instance_shape(g)?;
    let (n, h) = (g.n, g.h);
    let mut b = Builder {
        s: CopStrategy::new(),
        cops: BTreeSet::new(),
    };
    for v in frontier(n, h) {
        b.place(v);
    }
    b.sweep(g, outer_columns(g))?;
    let mut prev = (frame(FrameCorner::BL), frame(FrameCorner::TL));
    for i in 1..=n {
        for v in corners(i) {
            b.place(v);
        }
        for v in [r(i, 1, Side::L), r(i, h + 3, Side::L), prev.0, prev.1] {
            b.lift(v);
        }
        b.sweep(g, block_columns(i, h))?;
        if i < n {
            b.place(r(i + 1, 1, Side::L));
            b.place(r(i + 1, h + 3, Side::L));
            b.sweep(g, corridor_columns(i, h))?;
        }
        b.lift(corner(i, CornerKind::U1));
        b.lift(corner(i, CornerKind::W1));
        prev = (corner(i, CornerKind::U0), corner(i, CornerKind::W0));
    }
    for v in b.cops.clone() {
        b.lift(v);
    }
    Ok(b.s)
}

fn certify<V: Ord + Copy + Display, G: GraphView<V = V>>(g: &G, d: &Decomposition<V>) -> Result<usize, WidthError> {
    match validate_decomposition(g, d) {
        Validity::Valid { width } => Ok(width),
        Validity::Invalid(v) => Err(WidthError::Invalid(v.to_string())),
    }
}

/// Path decomposition of width at most 12, checked for monotonicity of the
/// underlying strategy and for validity.
pub fn instance_path_decomposition(g: &ReductionGraph) -> Result<PathDecomposition, WidthError> {
    let s = instance_path_strategy(g)?;
    check_monotone(g, &s)?;
    let pd = strategy_to_path_decomposition(&s)?;
    certify(g, &Decomposition::Path(pd.clone()))?;
    Ok(pd)
}

/// A region trapped by `separator`, searched by a sweep in which the cops
/// on `keep` stay put.
struct Branch {
    attach: usize,
    separator: BTreeSet<VertexId>,
    keep: BTreeSet<VertexId>,
    columns: Vec<Vec<(usize, VertexId)>>,
}

/// Subgraph induced by a region and its separator.
struct Induced {
    vertices: Vec<VertexId>,
    edges: Vec<(VertexId, VertexId)>,
}

impl GraphView for Induced {
    type V = VertexId;
    fn vertex_list(&self) -> Vec<VertexId> {
        self.vertices.clone()
    }
    fn edge_list(&self) -> Vec<(VertexId, VertexId)> {
        self.edges.clone()
    }
}

impl Branch {
    /// Strategy on the region plus separator: occupy the separator, sweep,
    /// lift everything. Checked for monotonicity on the induced subgraph.
    fn bags(&self, g: &ReductionGraph, adj: &BTreeMap<VertexId, Vec<VertexId>>) -> Result<Vec<BTreeSet<VertexId>>, WidthError> {
        let region: BTreeSet<VertexId> = self
            .columns
            .iter()
            .flatten()
            .map(|x| x.1)
            .filter(|v| !self.separator.contains(v))
            .collect();
        for v in &region {
            for w in &adj[v] {
                if !region.contains(w) && !self.separator.contains(w) {
                    return Err(WidthError::RegionLeak {
                        inside: v.to_string(),
                        outside: w.to_string(),
                    });
                }
            }
        }
        let all: BTreeSet<VertexId> = region.union(&self.separator).copied().collect();
        let sub = Induced {
            vertices: all.iter().copied().collect(),
            edges: edges_within(g, &all),
        };
        let mut s = CopStrategy::new();
        for &v in &self.separator {
            s.place(v);
        }
        let input = sweep_input(g, self.columns.clone(), self.keep.clone());
        let mut sweep = sweep_strategy(&input)?;
        // separator cops outside `keep` double as the first sweep positions
        let starts: BTreeSet<VertexId> = self.separator.difference(&self.keep).copied().collect();
        sweep.moves.retain(|m| !matches!(m, Move::Place(v) if starts.contains(v)));
        s.extend(&sweep);
        for v in s.final_cops()? {
            s.lift(v);
        }
        check_monotone(&sub, &s)?;
        Ok(strategy_to_path_decomposition(&s)?.bags)
    }
}

/// Tree decomposition of width at most 9: a backbone of frontier bags with
/// one branch per trapped region.
pub fn instance_tree_decomposition(g: &ReductionGraph) -> Result<TreeDecomposition, WidthError> {
    check_instance_shape(g)?;
    let (n, h) = (g.n, g.h);
    let right: BTreeSet<VertexId> = right_four(n, h).into_iter().collect();
    let mut backbone: Vec<BTreeSet<VertexId>> = Vec::new();
    let mut branches = Vec::new();
    let with_right = |xs: &[VertexId]| -> BTreeSet<VertexId> { xs.iter().copied().chain(right.iter().copied()).collect() };

    backbone.push(frontier(n, h).into_iter().collect());
    branches.push(Branch {
        attach: 0,
        separator: backbone[0].clone(),
        keep: [r(1, h + 3, Side::L), frame(FrameCorner::TL), frame(FrameCorner::TR), r(n, h + 3, Side::R)]
            .into_iter()
            .collect(),
        columns: outer_columns(g),
    });
    let mut prev = (frame(FrameCorner::BL), frame(FrameCorner::TL));
    for i in 1..=n {
        let [u0, u1, w1, w0] = corners(i);
        let (top, bottom) = (r(i, h + 3, Side::L), r(i, 1, Side::L));
        backbone.push(with_right(&[bottom, top, prev.0, prev.1, u0, u1]));
        backbone.push(with_right(&[top, prev.1, u0, u1]));
        backbone.push(with_right(&[top, prev.1, u0, u1, w1, w0]));
        backbone.push(with_right(&[u0, u1, w1, w0]));
        let sep: BTreeSet<VertexId> = corners(i).into_iter().collect();
        branches.push(Branch {
            attach: backbone.len() - 1,
            separator: sep.clone(),
            keep: sep.clone(),
            columns: block_columns(i, h),
        });
        if i < n {
            let (nb, nt) = (r(i + 1, 1, Side::L), r(i + 1, h + 3, Side::L));
            backbone.push(with_right(&[u0, u1, w1, w0, nb, nt]));
            let sep: BTreeSet<VertexId> = [u0, u1, w1, w0, nb, nt].into_iter().collect();
            branches.push(Branch {
                attach: backbone.len() - 1,
                separator: sep.clone(),
                keep: sep,
                columns: corridor_columns(i, h),
            });
            backbone.push(with_right(&[u0, w0, nb, nt]));
        }
        prev = (u0, w0);
    }
    let mut adj: BTreeMap<VertexId, Vec<VertexId>> = g.vertices().iter().map(|&v| (v, Vec::new())).collect();
    for e in g.edges() {
        adj.entry(e.u).or_default().push(e.v);
        adj.entry(e.v).or_default().push(e.u);
    }
    let mut bags = backbone.clone();
    let mut edges: Vec<(usize, usize)> = (1..backbone.len()).map(|k| (k - 1, k)).collect();
    for br in &branches {
        let bb = br.bags(g, &adj)?;
        let mut prev_idx = br.attach;
        for bag in bb {
            bags.push(bag);
            edges.push((prev_idx, bags.len() - 1));
            prev_idx = bags.len() - 1;
        }
    }
    let td = TreeDecomposition { bags, edges };
    certify(g, &Decomposition::Tree(td.clone()))?;
    Ok(td)
}

/// Carries a path decomposition of `g` over to the graph with parallel
/// edges subdivided: for each new vertex, a copy of a bag holding both
/// endpoints, plus the new vertex, is inserted after it.
pub fn lift_through_subdivision(
    g: &ReductionGraph,
    pd: &PathDecomposition,
    sub: &Subdivided,
) -> Result<PathDecomposition, WidthError> {
    let mut extra: BTreeMap<usize, Vec<VertexId>> = BTreeMap::new();
    for &(id, mid) in &sub.subdivided {
        let e = g.edge(id);
        let at = pd
            .bags
            .iter()
            .position(|b| b.contains(&e.u) && b.contains(&e.v))
            .ok_or_else(|| WidthError::Invalid(format!("edge {id} is in no bag")))?;
        extra.entry(at).or_default().push(mid);
    }
    let mut bags = Vec::with_capacity(pd.bags.len() + sub.subdivided.len());
    for (k, bag) in pd.bags.iter().enumerate() {
        bags.push(bag.clone());
        for &mid in extra.get(&k).into_iter().flatten() {
            let mut b = bag.clone();
            b.insert(mid);
            bags.push(b);
        }
    }
    let out = PathDecomposition { bags };
    certify(&sub.graph, &Decomposition::Path(out.clone()))?;
    Ok(out)
}

/// Subdivides parallel edges and lifts the instance path decomposition.
pub fn simple_path_decomposition(g: &ReductionGraph) -> Result<(Subdivided, PathDecomposition), WidthError> {
    let pd = instance_path_decomposition(g)?;
    let sub = subdivide_parallel(g);
    let lifted = lift_through_subdivision(g, &pd, &sub)?;
    Ok((sub, lifted))
}
