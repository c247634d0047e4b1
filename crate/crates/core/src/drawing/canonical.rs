//! The canonical drawing of an instance under an assignment and a routing
//! plan, on an integer grid.
//!
//! Rows: `r_j` sits at `y = 4j`, `b_j` and `v_j` at `y = 4j + 2`. Gadget `i`
//! occupies columns `20i .. 20i + 16`: B, R and LB on the left, LB, R and B
//! on the right, with the B and LB pairs swapped when the variable is false.

use std::collections::HashSet;

use serde::Serialize;

use super::{Drawing, DrawingError, Point};
use crate::cnf::{Assignment, CnfInstance};
use crate::graph::{CornerKind, FrameCorner, Pol, ReductionGraph, Side, VertexId};
use crate::reduction::{cell_base_row, CellKind};
use crate::weights::ColorClass;

/// For every clause, the variable whose cell the G edge jumps in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoutingPlan {
    /// `jumps[j - 1]` is the 1-based variable for clause `j`.
    pub jumps: Vec<usize>,
}

impl RoutingPlan {
    /// First satisfied literal of each clause.
    pub fn from_assignment(inst: &CnfInstance, tau: &Assignment) -> Result<Self, DrawingError> {
        let mut jumps = Vec::with_capacity(inst.num_clauses());
        for (idx, c) in inst.clauses().iter().enumerate() {
            let var = c
                .literals()
                .filter(|lit| lit.is_satisfied_by(tau.value(lit.var)))
                .map(|lit| lit.var)
                .min()
                .ok_or(DrawingError::Unsatisfied { clause: idx + 1 })?;
            jumps.push(var);
        }
        Ok(Self { jumps })
    }

    /// Like [`RoutingPlan::from_assignment`], but an unsatisfied clause
    /// jumps in the cell of its first variable.
    pub fn forced(inst: &CnfInstance, tau: &Assignment) -> Self {
        let jumps = inst
            .clauses()
            .iter()
            .map(|c| {
                let sat = c
                    .literals()
                    .filter(|lit| lit.is_satisfied_by(tau.value(lit.var)))
                    .map(|lit| lit.var)
                    .min();
                sat.or_else(|| c.literals().map(|lit| lit.var).min()).unwrap_or(1)
            })
            .collect();
        Self { jumps }
    }
}

/// Cell type of variable `i` in clause `j`, read off the C edges of `g`.
pub fn cell_kind(g: &ReductionGraph, i: usize, j: usize) -> CellKind {
    let a = cell_base_row(i, j);
    let has = |x: VertexId, y: VertexId| {
        g.find_edge(x, y).is_some_and(|e| e.color == ColorClass::C)
    };
    cell_kind_with(&has, i, a)
}

/// Rebuilds the formula from the cells of a generated graph.
pub fn recover_instance(g: &ReductionGraph) -> Result<CnfInstance, DrawingError> {
    let mut clauses = Vec::with_capacity(g.l);
    for j in 1..=g.l {
        let lits: Vec<i64> = (1..=g.n)
            .filter_map(|i| match cell_kind(g, i, j) {
                CellKind::Pos => Some(i as i64),
                CellKind::Neg => Some(-(i as i64)),
                CellKind::Neut => None,
            })
            .collect();
        clauses.push(lits);
    }
    CnfInstance::new(g.n, clauses).map_err(|e| DrawingError::Parse {
        line: 0,
        msg: format!("graph cells do not describe a formula: {e}"),
    })
}

fn cell_kind_with(has: &dyn Fn(VertexId, VertexId) -> bool, i: usize, a: usize) -> CellKind {
    let v = |row, pol| VertexId::V { i, j: row, pol };
    if has(v(a + 1, Pol::P), v(a + 2, Pol::N)) {
        CellKind::Pos
    } else if has(v(a, Pol::N), v(a + 1, Pol::P)) {
        CellKind::Neg
    } else {
        CellKind::Neut
    }
}

struct Grid {
    n: usize,
    h: usize,
}

impl Grid {
    fn top(&self) -> i64 {
        4 * self.h as i64 + 16
    }

    fn right(&self) -> i64 {
        20 * self.n as i64 + 20
    }

    fn x0(i: usize) -> i64 {
        20 * i as i64
    }

    fn position(&self, v: VertexId, tau: &Assignment) -> Point {
        let yt = self.top();
        match v {
            VertexId::Frame(c) => match c {
                FrameCorner::BL => Point::int(16, 0),
                FrameCorner::TL => Point::int(16, yt),
                FrameCorner::TR => Point::int(self.right(), yt),
                FrameCorner::BR => Point::int(self.right(), 0),
            },
            VertexId::R { i, j, side } => {
                let x = if i == 0 {
                    16
                } else if i == self.n + 1 {
                    self.right()
                } else {
                    Self::x0(i) + if side == Side::L { 2 } else { 14 }
                };
                Point::int(x, 4 * j as i64)
            }
            VertexId::B { i, j, pol } => {
                let left = (pol == Pol::P) == tau.value(i);
                Point::int(Self::x0(i) + if left { 0 } else { 16 }, 4 * j as i64 + 2)
            }
            VertexId::V { i, j, pol } => {
                let left = (pol == Pol::P) == tau.value(i);
                Point::int(Self::x0(i) + if left { 4 } else { 12 }, 4 * j as i64 + 2)
            }
            VertexId::Corner { i, which } => {
                let y = match which {
                    CornerKind::U0 => 0,
                    CornerKind::U1 => 2,
                    CornerKind::W1 => yt - 2,
                    CornerKind::W0 => yt,
                };
                Point::int(Self::x0(i) + 8, y)
            }
            VertexId::ClauseEnd { j, side } => match side {
                Side::L => Point::int(16, 16 * j as i64 - 6),
                Side::R => Point::int(self.right(), 4 * (4 * j + self.n) as i64 - 2),
            },
            // subdivision vertices only appear in derived graphs
            VertexId::Sub { edge, ord } => Point::int(-10 - edge as i64, -10 - ord as i64),
        }
    }

    fn clause_route(&self, j: usize, m: usize, start: Point, end: Point) -> Vec<Point> {
        let mut pts = vec![start];
        for i in 1..=self.n {
            let a = cell_base_row(i, j) as i64;
            let e_in = if i <= m { a } else { a + 1 };
            let e_out = if i < m { a } else { a + 1 };
            let x0 = Self::x0(i);
            pts.push(Point::int(x0 - 1, 4 * e_in + 3));
            pts.push(Point::int(x0 + 3, 4 * e_in + 3));
            pts.push(Point::int(x0 + 13, 4 * e_out + 5));
            pts.push(Point::int(x0 + 17, 4 * e_out + 5));
        }
        pts.push(end);
        pts
    }
}

/// Canonical drawing for a satisfying assignment and a plan whose jumps all
/// sit in satisfied cells.
pub fn build_canonical_drawing(
    g: &ReductionGraph,
    tau: &Assignment,
    plan: &RoutingPlan,
) -> Result<Drawing, DrawingError> {
    check_sizes(g, tau, plan)?;
    let c_edges: HashSet<(VertexId, VertexId)> = g
        .edges()
        .iter()
        .filter(|e| e.color == ColorClass::C)
        .flat_map(|e| [(e.u, e.v), (e.v, e.u)])
        .collect();
    let has = |x: VertexId, y: VertexId| c_edges.contains(&(x, y));
    for (idx, &m) in plan.jumps.iter().enumerate() {
        let j = idx + 1;
        let ok = match cell_kind_with(&has, m, cell_base_row(m, j)) {
            CellKind::Pos => tau.value(m),
            CellKind::Neg => !tau.value(m),
            CellKind::Neut => false,
        };
        if !ok {
            return Err(DrawingError::PlanDoesNotSatisfy { clause: j, var: m });
        }
    }
    Ok(layout(g, tau, plan))
}

/// The same layout without checking the plan, so unsatisfied clauses pay
/// for their jump.
pub fn build_forced_drawing(
    g: &ReductionGraph,
    tau: &Assignment,
    plan: &RoutingPlan,
) -> Result<Drawing, DrawingError> {
    check_sizes(g, tau, plan)?;
    Ok(layout(g, tau, plan))
}

fn check_sizes(g: &ReductionGraph, tau: &Assignment, plan: &RoutingPlan) -> Result<(), DrawingError> {
    if tau.num_vars() != g.n {
        return Err(DrawingError::AssignmentSize {
            got: tau.num_vars(),
            expected: g.n,
        });
    }
    if plan.jumps.len() != g.l {
        return Err(DrawingError::PlanSize {
            got: plan.jumps.len(),
            expected: g.l,
        });
    }
    if let Some((idx, &m)) = plan.jumps.iter().enumerate().find(|(_, &m)| m == 0 || m > g.n) {
        return Err(DrawingError::PlanDoesNotSatisfy { clause: idx + 1, var: m });
    }
    Ok(())
}

fn layout(g: &ReductionGraph, tau: &Assignment, plan: &RoutingPlan) -> Drawing {
    let grid = Grid { n: g.n, h: g.h };
    let mut d = Drawing::default();
    for &v in g.vertices() {
        d.points.insert(v, grid.position(v, tau));
    }
    let yt = grid.top();
    for e in g.edges() {
        let (pu, pv) = (d.points[&e.u].clone(), d.points[&e.v].clone());
        let mut line = match (e.color, e.u.min(e.v), e.u.max(e.v)) {
            (ColorClass::G, VertexId::ClauseEnd { j, side: Side::L }, VertexId::ClauseEnd { .. }) => {
                let (start, end) = if e.u == (VertexId::ClauseEnd { j, side: Side::L }) {
                    (pu.clone(), pv.clone())
                } else {
                    (pv.clone(), pu.clone())
                };
                grid.clause_route(j, plan.jumps[j - 1], start, end)
            }
            (ColorClass::HB, VertexId::Frame(a), VertexId::Frame(_)) => {
                let x = if a == FrameCorner::BL { 14 } else { grid.right() + 2 };
                let (lo, hi) = if pu.y <= pv.y { (&pu, &pv) } else { (&pv, &pu) };
                vec![
                    lo.clone(),
                    Point::int(x, 0),
                    Point::int(x, yt),
                    hi.clone(),
                ]
            }
            (ColorClass::HB, VertexId::B { i, pol, .. }, VertexId::Corner { which, .. }) => {
                let (lo, hi) = if pu.y <= pv.y { (&pu, &pv) } else { (&pv, &pu) };
                let left = (pol == Pol::P) == tau.value(i);
                let x = Grid::x0(i) + if left { 0 } else { 16 };
                let y = if which == CornerKind::U0 { 1 } else { yt - 1 };
                vec![lo.clone(), Point::int(x, y), hi.clone()]
            }
            _ => vec![pu.clone(), pv.clone()],
        };
        if line[0] != pu {
            line.reverse();
        }
        d.polylines.push(line);
    }
    d
}
