//! Construction of the weighted crossing number instance `(G, k)` from a
//! CNF formula.
//!
//! Phases run in a fixed order (variable gadgets, frame, stairs between
//! gadgets, cells, clause edges), so edge ids are reproducible.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::cnf::{CnfInstance, Occurrence};
use crate::graph::{CornerKind, FrameCorner, GraphError, Pol, ReductionGraph, Side, VertexId};
use crate::weights::{g_weight, s_weight, Budget, ColorClass, WeightPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("gadget height must be at least 1, got {0}")]
    BadHeight(usize),
    #[error("need at least one variable and one clause")]
    EmptyInstance,
    #[error("gadget height {h} does not match 4*{l} + {n} - 2")]
    HeightMismatch { h: usize, n: usize, l: usize },
    #[error("row {row} outside 1..={max} in gadget {i}")]
    RowOutOfRange { i: usize, row: usize, max: usize },
    #[error("invariant violated: {0}")]
    Invariant(String),
}

/// A construction phase, used to label manifests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Phase {
    Gadget { i: usize },
    Frame,
    Stairs,
    /// LB paths below, between and above the cells of gadget `i`.
    Separators { i: usize },
    Cell { i: usize, j: usize },
    Clause { j: usize },
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::Gadget { i } => write!(f, "gadget {i}"),
            Phase::Frame => write!(f, "frame"),
            Phase::Stairs => write!(f, "stairs"),
            Phase::Separators { i } => write!(f, "separators {i}"),
            Phase::Cell { i, j } => write!(f, "cell ({i},{j})"),
            Phase::Clause { j } => write!(f, "clause {j}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhaseManifest {
    pub phase: Phase,
    /// Vertices first introduced by this phase.
    pub vertices: Vec<VertexId>,
    pub edges: Vec<usize>,
}

/// Cell type of variable `i` in clause `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CellKind {
    Pos,
    Neg,
    Neut,
}

impl From<Occurrence> for CellKind {
    fn from(o: Occurrence) -> Self {
        match o {
            Occurrence::Positive => CellKind::Pos,
            Occurrence::Negative => CellKind::Neg,
            Occurrence::Absent => CellKind::Neut,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ConstructionTrace {
    pub phases: Vec<PhaseManifest>,
    /// Edges sharing both endpoints with an earlier edge.
    pub parallel_edges: Vec<usize>,
}

impl ConstructionTrace {
    /// Checks that the manifests partition the edge and vertex sets of `g`.
    pub fn check_partition(&self, g: &ReductionGraph) -> Result<(), String> {
        let mut seen_e = vec![false; g.num_edges()];
        for m in &self.phases {
            for &e in &m.edges {
                if e >= seen_e.len() || seen_e[e] {
                    return Err(format!("edge {e} listed twice or out of range ({})", m.phase));
                }
                seen_e[e] = true;
            }
        }
        if let Some(e) = seen_e.iter().position(|s| !s) {
            return Err(format!("edge {e} in no manifest"));
        }
        let mut seen_v = BTreeSet::new();
        for m in &self.phases {
            for &v in &m.vertices {
                if !seen_v.insert(v) {
                    return Err(format!("vertex {v} listed twice"));
                }
            }
        }
        if seen_v.len() != g.num_vertices() || g.vertices().iter().any(|v| !seen_v.contains(v)) {
            return Err("vertex manifests do not cover the graph".into());
        }
        Ok(())
    }

    pub fn to_text(&self, g: &ReductionGraph) -> String {
        let mut s = String::new();
        for m in &self.phases {
            s.push_str(&format!(
                "phase {}: {} vertices, {} edges\n",
                m.phase,
                m.vertices.len(),
                m.edges.len()
            ));
            for e in &m.edges {
                let e = g.edge(*e);
                s.push_str(&format!("  edge {} {} {} {}\n", e.id, e.u, e.v, e.color));
            }
        }
        if self.parallel_edges.is_empty() {
            s.push_str("parallel weighted edges: none\n");
        } else {
            s.push_str(&format!("parallel weighted edges: {:?}\n", self.parallel_edges));
        }
        s
    }
}

/// Tracks the graph size before a phase so the phase's additions can be
/// recorded afterwards.
struct Mark {
    vertices: usize,
    edges: usize,
}

fn mark(g: &ReductionGraph) -> Mark {
    Mark {
        vertices: g.num_vertices(),
        edges: g.num_edges(),
    }
}

fn close(trace: &mut ConstructionTrace, g: &ReductionGraph, phase: Phase, m: Mark) {
    let edges: Vec<usize> = (m.edges..g.num_edges()).collect();
    trace.phases.push(PhaseManifest {
        phase,
        vertices: g.vertices()[m.vertices..].to_vec(),
        edges,
    });
}

pub fn r(i: usize, j: usize, side: Side) -> VertexId {
    VertexId::R { i, j, side }
}

pub fn b(i: usize, j: usize, pol: Pol) -> VertexId {
    VertexId::B { i, j, pol }
}

pub fn v(i: usize, j: usize, pol: Pol) -> VertexId {
    VertexId::V { i, j, pol }
}

pub fn corner(i: usize, which: CornerKind) -> VertexId {
    VertexId::Corner { i, which }
}

pub fn frame(c: FrameCorner) -> VertexId {
    VertexId::Frame(c)
}

pub fn clause_end(j: usize, side: Side) -> VertexId {
    VertexId::ClauseEnd { j, side }
}

fn add_gadget_into(g: &mut ReductionGraph, i: usize, h: usize) -> Result<(), ReductionError> {
    if h < 1 {
        return Err(ReductionError::BadHeight(h));
    }
    use CornerKind::*;
    for which in [U0, U1, W0, W1] {
        g.ensure_vertex(corner(i, which));
    }
    for pol in [Pol::P, Pol::N] {
        for j in 1..=h + 2 {
            g.add_vertex(b(i, j, pol))?;
        }
        for j in 1..=h + 2 {
            g.add_vertex(v(i, j, pol))?;
        }
    }
    for side in [Side::L, Side::R] {
        for j in 1..=h + 3 {
            g.add_vertex(r(i, j, side))?;
        }
    }
    for pol in [Pol::P, Pol::N] {
        for j in 1..=h + 1 {
            g.add_edge(b(i, j, pol), b(i, j + 1, pol), ColorClass::B, s_weight(j as i64).expect("j >= 1"))?;
        }
    }
    for pol in [Pol::P, Pol::N] {
        for j in 1..=h + 1 {
            g.add_plain_edge(v(i, j, pol), v(i, j + 1, pol), ColorClass::LB)?;
        }
    }
    for side in [Side::L, Side::R] {
        for j in 1..=h + 2 {
            g.add_edge(r(i, j, side), r(i, j + 1, side), ColorClass::R, g_weight(j as i64).expect("j >= 1"))?;
        }
    }
    let hb = ColorClass::HB;
    for pol in [Pol::P, Pol::N] {
        g.add_plain_edge(b(i, 1, pol), corner(i, U0), hb)?;
        g.add_plain_edge(b(i, h + 2, pol), corner(i, W0), hb)?;
    }
    for pol in [Pol::P, Pol::N] {
        g.add_plain_edge(v(i, 1, pol), corner(i, U1), hb)?;
        g.add_plain_edge(v(i, h + 2, pol), corner(i, W1), hb)?;
    }
    for side in [Side::L, Side::R] {
        g.add_plain_edge(r(i, 1, side), corner(i, U0), hb)?;
        g.add_plain_edge(r(i, 1, side), corner(i, U1), hb)?;
        g.add_plain_edge(r(i, h + 3, side), corner(i, W0), hb)?;
        g.add_plain_edge(r(i, h + 3, side), corner(i, W1), hb)?;
    }
    for j in 2..=h + 1 {
        for pol in [Pol::P, Pol::N] {
            g.add_plain_edge(b(i, j, pol), v(i, j, pol), ColorClass::BPrime)?;
        }
    }
    Ok(())
}

/// The variable gadget of variable `i` as a standalone fragment.
pub fn build_var_gadget(i: usize, h: usize) -> Result<ReductionGraph, ReductionError> {
    let mut g = ReductionGraph::new();
    add_gadget_into(&mut g, i, h)?;
    Ok(g)
}

fn add_frame_into(g: &mut ReductionGraph, n: usize, h: usize) -> Result<(), ReductionError> {
    use FrameCorner::*;
    let hb = ColorClass::HB;
    for c in [BL, TL, TR, BR] {
        g.add_vertex(frame(c))?;
    }
    for i in 1..=n {
        g.ensure_vertex(corner(i, CornerKind::U0));
        g.ensure_vertex(corner(i, CornerKind::W0));
    }
    for j in 2..=h + 2 {
        g.add_vertex(r(0, j, Side::R))?;
    }
    for j in 2..=h + 2 {
        g.add_vertex(r(n + 1, j, Side::L))?;
    }
    // the 4-cycle BL, TL, TR, BR with its bottom and top sides subdivided
    g.add_plain_edge(frame(BL), frame(TL), hb)?;
    let mut top = vec![frame(TL)];
    top.extend((1..=n).map(|i| corner(i, CornerKind::W0)));
    top.push(frame(TR));
    for w in top.windows(2) {
        g.add_plain_edge(w[0], w[1], hb)?;
    }
    g.add_plain_edge(frame(TR), frame(BR), hb)?;
    let mut bottom = vec![frame(BR)];
    bottom.extend((1..=n).rev().map(|i| corner(i, CornerKind::U0)));
    bottom.push(frame(BL));
    for w in bottom.windows(2) {
        g.add_plain_edge(w[0], w[1], hb)?;
    }
    // second sides, subdivided by the end points of the outer stairs
    let mut left = vec![frame(BL)];
    left.extend((2..=h + 2).map(|j| r(0, j, Side::R)));
    left.push(frame(TL));
    for w in left.windows(2) {
        g.add_plain_edge(w[0], w[1], hb)?;
    }
    let mut right = vec![frame(TR)];
    right.extend((2..=h + 2).rev().map(|j| r(n + 1, j, Side::L)));
    right.push(frame(BR));
    for w in right.windows(2) {
        g.add_plain_edge(w[0], w[1], hb)?;
    }
    Ok(())
}

/// The frame for `n` gadgets of height `h` as a standalone fragment.
pub fn build_frame(n: usize, h: usize) -> Result<ReductionGraph, ReductionError> {
    if n < 1 {
        return Err(ReductionError::EmptyInstance);
    }
    if h < 1 {
        return Err(ReductionError::BadHeight(h));
    }
    let mut g = ReductionGraph::new();
    add_frame_into(&mut g, n, h)?;
    Ok(g)
}

fn add_stairs_into(g: &mut ReductionGraph, n: usize, h: usize) -> Result<(), ReductionError> {
    for i in 1..=n + 1 {
        for j in 2..=h + 2 {
            g.add_plain_edge(r(i - 1, j, Side::R), r(i, j, Side::L), ColorClass::RPrime)?;
        }
    }
    Ok(())
}

/// Frame with `n` gadgets and the stairs between neighbouring gadgets.
pub fn assemble_frame_with_gadgets(
    n: usize,
    h: usize,
) -> Result<(ReductionGraph, ConstructionTrace), ReductionError> {
    if n < 1 {
        return Err(ReductionError::EmptyInstance);
    }
    if h < 1 {
        return Err(ReductionError::BadHeight(h));
    }
    let mut g = ReductionGraph::new();
    let mut trace = ConstructionTrace::default();
    for i in 1..=n {
        let m = mark(&g);
        add_gadget_into(&mut g, i, h)?;
        close(&mut trace, &g, Phase::Gadget { i }, m);
    }
    let m = mark(&g);
    add_frame_into(&mut g, n, h)?;
    close(&mut trace, &g, Phase::Frame, m);
    let m = mark(&g);
    add_stairs_into(&mut g, n, h)?;
    close(&mut trace, &g, Phase::Stairs, m);
    g.n = n;
    g.h = h;
    Ok((g, trace))
}

/// Bottom row of cell `(i, j)`.
pub fn cell_base_row(i: usize, j: usize) -> usize {
    4 * j + i - 3
}

fn lb_path(g: &mut ReductionGraph, verts: &[VertexId]) -> Result<(), ReductionError> {
    for w in verts.windows(2) {
        g.add_plain_edge(w[0], w[1], ColorClass::LB)?;
    }
    Ok(())
}

/// Zigzag `v_{from,N}, v_{from+1,P}, v_{from+1,N}, ..., v_{to,P}`.
fn zigzag(i: usize, from: usize, to: usize) -> Vec<VertexId> {
    let mut out = vec![v(i, from, Pol::N)];
    for row in from + 1..to {
        out.push(v(i, row, Pol::P));
        out.push(v(i, row, Pol::N));
    }
    out.push(v(i, to, Pol::P));
    out
}

/// Adds the LB separators and the cells of every gadget.
pub fn load_cells(
    g: &mut ReductionGraph,
    inst: &CnfInstance,
    trace: &mut ConstructionTrace,
) -> Result<(), ReductionError> {
    let n = inst.num_vars();
    let l = inst.num_clauses();
    let h = g.h;
    if h != inst.height() {
        return Err(ReductionError::HeightMismatch { h, n, l });
    }
    for i in 1..=n {
        let check = |row: usize| {
            if row == 0 || row > h + 2 {
                Err(ReductionError::RowOutOfRange { i, row, max: h + 2 })
            } else {
                Ok(())
            }
        };
        let m = mark(g);
        check(i + 1)?;
        lb_path(g, &zigzag(i, 1, i + 1))?;
        for j in 1..l {
            check(4 * j + i + 1)?;
            lb_path(g, &zigzag(i, 4 * j + i - 1, 4 * j + i + 1))?;
        }
        check(4 * l + i - 1)?;
        lb_path(g, &zigzag(i, 4 * l + i - 1, h + 2))?;
        close(trace, g, Phase::Separators { i }, m);
        for j in 1..=l {
            let m = mark(g);
            let a = cell_base_row(i, j);
            check(a + 2)?;
            g.add_plain_edge(v(i, a, Pol::P), v(i, a, Pol::N), ColorClass::LB)?;
            g.add_plain_edge(v(i, a + 2, Pol::P), v(i, a + 2, Pol::N), ColorClass::LB)?;
            let c = ColorClass::C;
            match CellKind::from(inst.clause(j).occurrence(i)) {
                CellKind::Pos => {
                    g.add_plain_edge(v(i, a, Pol::P), v(i, a + 1, Pol::N), c)?;
                    g.add_plain_edge(v(i, a + 1, Pol::N), v(i, a + 1, Pol::P), c)?;
                    g.add_plain_edge(v(i, a + 1, Pol::P), v(i, a + 2, Pol::N), c)?;
                }
                CellKind::Neg => {
                    g.add_plain_edge(v(i, a, Pol::N), v(i, a + 1, Pol::P), c)?;
                    g.add_plain_edge(v(i, a + 1, Pol::P), v(i, a + 1, Pol::N), c)?;
                    g.add_plain_edge(v(i, a + 1, Pol::N), v(i, a + 2, Pol::P), c)?;
                }
                CellKind::Neut => {
                    g.add_plain_edge(v(i, a + 1, Pol::P), v(i, a + 1, Pol::N), ColorClass::LB)?;
                    g.add_plain_edge(v(i, a, Pol::P), v(i, a + 1, Pol::N), c)?;
                    g.add_plain_edge(v(i, a + 1, Pol::N), v(i, a + 2, Pol::P), c)?;
                }
            }
            close(trace, g, Phase::Cell { i, j }, m);
        }
    }
    g.l = l;
    Ok(())
}

/// Left frame rows whose connecting edge carries the end of clause `j`.
pub fn clause_left_rows(j: usize) -> (usize, usize) {
    (4 * j - 2, 4 * j - 1)
}

/// Right frame rows whose connecting edge carries the end of clause `j`.
pub fn clause_right_rows(j: usize, n: usize) -> (usize, usize) {
    (4 * j + n - 1, 4 * j + n)
}

/// Subdivides the frame sides and adds one G edge per clause.
pub fn add_clause_edges(
    g: &mut ReductionGraph,
    l: usize,
    n: usize,
    trace: &mut ConstructionTrace,
) -> Result<(), ReductionError> {
    for j in 1..=l {
        let m = mark(g);
        let (a, c) = clause_left_rows(j);
        let left = g
            .find_edge(r(0, a, Side::R), r(0, c, Side::R))
            .map(|e| e.id)
            .ok_or_else(|| ReductionError::Invariant(format!("left frame edge for clause {j} missing")))?;
        let (a, c) = clause_right_rows(j, n);
        let right = g
            .find_edge(r(n + 1, a, Side::L), r(n + 1, c, Side::L))
            .map(|e| e.id)
            .ok_or_else(|| ReductionError::Invariant(format!("right frame edge for clause {j} missing")))?;
        g.subdivide_edge(left, clause_end(j, Side::L))?;
        g.subdivide_edge(right, clause_end(j, Side::R))?;
        g.add_plain_edge(clause_end(j, Side::L), clause_end(j, Side::R), ColorClass::G)?;
        close(trace, g, Phase::Clause { j }, m);
    }
    Ok(())
}

fn sum_j_j1(h: usize) -> u64 {
    (2..=h as u64 + 1).map(|j| j * (j + 1)).sum()
}

fn sum_j_j2(h: usize) -> u64 {
    (1..=h as u64 + 1).map(|j| j * (j + 2)).sum()
}

/// The crossing budget `k` for `n` variables and `l` clauses.
pub fn compute_k(n: usize, l: usize) -> Result<Budget, ReductionError> {
    if n < 1 || l < 1 {
        return Err(ReductionError::EmptyInstance);
    }
    let h = 4 * l + n - 2;
    let (n64, l64, h64) = (n as u64, l as u64, h as u64);
    let mut k = WeightPoly::monomial(7, 2 * n64 * (2 * h64 + 1));
    k += &WeightPoly::monomial(6, 2 * n64 * l64);
    let c4 = 4 * n64 * l64 + 2 * n64 * sum_j_j1(h) + 2 * n64 * sum_j_j2(h);
    k += &WeightPoly::monomial(4, c4);
    k += &WeightPoly::monomial(2, n64 * l64 + 1);
    Ok(Budget {
        symbolic: k,
        offset: -1,
    })
}

/// Budget recomputed from the metadata stored on `g`.
pub fn recompute_k(g: &ReductionGraph) -> Result<Budget, ReductionError> {
    compute_k(g.n, g.l)
}

/// Weight an edge must carry given its color and endpoints.
pub fn expected_weight(u: VertexId, w: VertexId, color: ColorClass) -> Option<WeightPoly> {
    match color {
        ColorClass::R => match (u, w) {
            (VertexId::R { i: i1, j: j1, side: s1 }, VertexId::R { i: i2, j: j2, side: s2 })
                if i1 == i2 && s1 == s2 && j1.abs_diff(j2) == 1 =>
            {
                g_weight(j1.min(j2) as i64).ok()
            }
            _ => None,
        },
        ColorClass::B => match (u, w) {
            (VertexId::B { i: i1, j: j1, pol: p1 }, VertexId::B { i: i2, j: j2, pol: p2 })
                if i1 == i2 && p1 == p2 && j1.abs_diff(j2) == 1 =>
            {
                s_weight(j1.min(j2) as i64).ok()
            }
            _ => None,
        },
        other => Some(other.base_weight()),
    }
}

/// The eight vertices around gadget `i` whose removal separates it.
pub fn gadget_cut(i: usize, h: usize) -> BTreeSet<VertexId> {
    use CornerKind::*;
    [
        corner(i, U0),
        corner(i, U1),
        r(i, 1, Side::L),
        r(i, 1, Side::R),
        corner(i, W0),
        corner(i, W1),
        r(i, h + 3, Side::L),
        r(i, h + 3, Side::R),
    ]
    .into_iter()
    .collect()
}

/// Checks every structural invariant of a finished instance.
pub fn check_instance(g: &ReductionGraph) -> Result<(), ReductionError> {
    let bad = |m: String| Err(ReductionError::Invariant(m));
    if g.h != 4 * g.l + g.n - 2 {
        return bad(format!("h = {} but 4l + n - 2 = {}", g.h, 4 * g.l + g.n - 2));
    }
    let e = g.num_edges() as u64;
    if g.omega != e * e {
        return bad(format!("omega = {} but |E|^2 = {}", g.omega, e * e));
    }
    let k = recompute_k(g)?;
    if g.k.as_ref() != Some(&k) {
        return bad("stored k differs from the budget formula".into());
    }
    k.symbolic
        .check_coefficients_below(g.omega)
        .map_err(|e| ReductionError::Invariant(format!("k: {e}")))?;
    for edge in g.edges() {
        match expected_weight(edge.u, edge.v, edge.color) {
            Some(w) if w == edge.weight => {}
            _ => {
                return bad(format!(
                    "edge {} ({} {}) has color {} and weight {}",
                    edge.id, edge.u, edge.v, edge.color, edge.weight
                ))
            }
        }
        edge.weight
            .check_coefficients_below(g.omega)
            .map_err(|e| ReductionError::Invariant(format!("edge {}: {e}", edge.id)))?;
    }
    Ok(())
}

/// Builds `(G, k)` and the construction trace for `inst`.
pub fn reduce(inst: &CnfInstance) -> Result<(ReductionGraph, ConstructionTrace), ReductionError> {
    let n = inst.num_vars();
    let l = inst.num_clauses();
    let h = inst.height();
    let (mut g, mut trace) = assemble_frame_with_gadgets(n, h)?;
    load_cells(&mut g, inst, &mut trace)?;
    add_clause_edges(&mut g, l, n, &mut trace)?;
    g.n = n;
    g.l = l;
    g.h = h;
    let e = g.num_edges() as u64;
    g.omega = e * e;
    g.k = Some(compute_k(n, l)?);
    trace.parallel_edges = g.parallel_edges();
    trace
        .check_partition(&g)
        .map_err(ReductionError::Invariant)?;
    check_instance(&g)?;
    Ok((g, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::parse_dimacs;
    use num_bigint::BigUint;

    fn count_color(g: &ReductionGraph, c: ColorClass) -> usize {
        g.edges().iter().filter(|e| e.color == c).count()
    }

    #[test]
    fn gadget_shape() {
        let g = build_var_gadget(1, 4).unwrap();
        assert_eq!(g.num_vertices(), 6 * 4 + 18);
        assert_eq!(count_color(&g, ColorClass::BPrime), 8);
        let e = g.find_edge(b(1, 1, Pol::P), b(1, 2, Pol::P)).unwrap();
        assert_eq!(e.weight, s_weight(1).unwrap());
        assert_eq!(count_color(&g, ColorClass::HB), 16);
        assert!(build_var_gadget(1, 0).is_err());
    }

    #[test]
    fn frame_shape() {
        let f = build_frame(1, 3).unwrap();
        // 4 corners, the two subdivision vertices of gadget 1, 4 + 4 side vertices
        assert_eq!(f.num_vertices(), 14);
        assert!(f.edges().iter().all(|e| e.color == ColorClass::HB));
        let f3 = build_frame(3, 4).unwrap();
        assert_eq!(f3.num_vertices(), 4 + 6 + 10);
        assert_eq!(f3.num_edges(), 2 + 2 * 4 + 2 * 6);
    }

    #[test]
    fn stair_count() {
        let (g, trace) = assemble_frame_with_gadgets(3, 4).unwrap();
        assert_eq!(count_color(&g, ColorClass::RPrime), 4 * 5);
        trace.check_partition(&g).unwrap();
    }

    #[test]
    fn clause_rows() {
        assert_eq!(clause_left_rows(1), (2, 3));
        assert_eq!(clause_right_rows(1, 1), (4, 5));
        // shifted by n + 1
        assert_eq!(clause_right_rows(3, 5).0 - clause_left_rows(3).0, 6);
    }

    #[test]
    fn budget_formula() {
        let k = compute_k(1, 1).unwrap();
        assert_eq!(k.symbolic.coeff(7), BigUint::from(14u32));
        assert_eq!(k.symbolic.coeff(6), BigUint::from(2u32));
        assert_eq!(k.symbolic.coeff(4), BigUint::from(180u32));
        assert_eq!(k.symbolic.coeff(2), BigUint::from(2u32));
        assert_eq!(k.offset, -1);
        assert_eq!(k.symbolic.degree(), Some(7));
        assert_eq!(compute_k(3, 2).unwrap().symbolic.coeff(7), BigUint::from(6u32 * 19));
    }

    #[test]
    fn smallest_instance() {
        let inst = parse_dimacs("p cnf 1 1\n1 0").unwrap();
        let (g, trace) = reduce(&inst).unwrap();
        assert_eq!(g.h, 3);
        assert_eq!(g.num_vertices(), 50);
        assert_eq!(g.num_edges(), 82);
        assert_eq!(g.omega, 6724);
        assert!(trace.parallel_edges.is_empty());
        assert_eq!(count_color(&g, ColorClass::G), 1);
        assert_eq!(count_color(&g, ColorClass::C), 3);
    }

    #[test]
    fn running_example_structure() {
        let inst = parse_dimacs("p cnf 5 3\n1 -2 4 -5 0\n-1 -3 5 0\n2 3 -4 0\n").unwrap();
        let (g, trace) = reduce(&inst).unwrap();
        assert_eq!(g.h, 15);
        assert_eq!(count_color(&g, ColorClass::G), 3);
        trace.check_partition(&g).unwrap();
        // x1 occurs positively in clause 1: C_pos path starts at v_{2,P}
        assert_eq!(
            g.find_edge(v(1, 2, Pol::P), v(1, 3, Pol::N)).unwrap().color,
            ColorClass::C
        );
    }

    #[test]
    fn cut_components() {
        for (n, h) in [(1, 3), (3, 4)] {
            let (g, _) = assemble_frame_with_gadgets(n, h).unwrap();
            for i in 1..=n {
                let comps = g.components_without(&gadget_cut(i, h));
                let find = |x: VertexId| comps.iter().position(|c| c.contains(&x)).unwrap();
                // left of the gadget, its positive half, its negative half, right of it
                assert_eq!(comps.len(), 4);
                let left = find(frame(FrameCorner::BL));
                let right = find(frame(FrameCorner::BR));
                let pos = find(b(i, 1, Pol::P));
                let neg = find(b(i, 1, Pol::N));
                assert_eq!(BTreeSet::from([left, right, pos, neg]).len(), 4);
                assert_eq!(find(v(i, 2, Pol::P)), pos);
                assert_eq!(find(r(i, 2, Side::L)), left);
                assert_eq!(find(r(i, 2, Side::R)), right);
            }
        }
    }

    #[test]
    fn neutral_cells() {
        let inst = parse_dimacs("p cnf 2 2\n1 0\n1 0\n").unwrap();
        let (g, _) = reduce(&inst).unwrap();
        for j in 1..=2 {
            let a = cell_base_row(2, j);
            assert_eq!(g.find_edge(v(2, a + 1, Pol::P), v(2, a + 1, Pol::N)).unwrap().color, ColorClass::LB);
        }
    }
}
