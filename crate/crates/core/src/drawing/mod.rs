//! Drawings with exact rational coordinates, crossing accounting, the
//! canonical drawing of a satisfiable instance and drawing audits.

pub mod audit;
pub mod canonical;
pub mod geometry;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{ReductionGraph, VertexId};
use crate::weights::{ColorClass, WeightPoly};

pub use audit::{audit_crossings, audit_necessary_conditions, extract_assignment, AuditLayer, AuditReport};
pub use canonical::{build_canonical_drawing, build_forced_drawing, cell_kind, recover_instance, RoutingPlan};
pub use geometry::{intersect_segments, Point, SegmentIntersection};

pub const DRAWING_HEADER: &str = "crossing-forge-drawing v1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DrawingError {
    #[error("vertex {0} has no position")]
    MissingVertex(String),
    #[error("vertices {0} and {1} share a position")]
    SharedPosition(String, String),
    #[error("drawing has {got} polylines, graph has {expected} edges")]
    EdgeCount { got: usize, expected: usize },
    #[error("polyline of edge {0} does not join its endpoints")]
    BadPolyline(usize),
    #[error("edges {0} and {1} overlap along a segment")]
    Overlap(usize, usize),
    #[error("clause {clause}: routing through variable {var} does not satisfy it")]
    PlanDoesNotSatisfy { clause: usize, var: usize },
    #[error("clause {clause} is not satisfied by the assignment")]
    Unsatisfied { clause: usize },
    #[error("plan covers {got} clauses, graph has {expected}")]
    PlanSize { got: usize, expected: usize },
    #[error("assignment covers {got} variables, graph has {expected}")]
    AssignmentSize { got: usize, expected: usize },
    #[error("LB paths of gadget {0} are not separated left and right")]
    LbPathsCross(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Positions of vertices and one polyline per edge, indexed by edge id.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Drawing {
    pub points: BTreeMap<VertexId, Point>,
    pub polylines: Vec<Vec<Point>>,
}

impl Drawing {
    pub fn point(&self, v: VertexId) -> Option<&Point> {
        self.points.get(&v)
    }

    /// Checks that positions are complete and distinct and that every
    /// polyline runs between the positions of its edge's endpoints.
    pub fn check_shape(&self, g: &ReductionGraph) -> Result<(), DrawingError> {
        let mut seen: HashMap<&Point, VertexId> = HashMap::new();
        for &v in g.vertices() {
            let p = self
                .points
                .get(&v)
                .ok_or_else(|| DrawingError::MissingVertex(v.to_string()))?;
            if let Some(w) = seen.insert(p, v) {
                return Err(DrawingError::SharedPosition(w.to_string(), v.to_string()));
            }
        }
        if self.polylines.len() != g.num_edges() {
            return Err(DrawingError::EdgeCount {
                got: self.polylines.len(),
                expected: g.num_edges(),
            });
        }
        for e in g.edges() {
            let line = &self.polylines[e.id];
            if line.len() < 2 {
                return Err(DrawingError::BadPolyline(e.id));
            }
            let (a, b) = (&self.points[&e.u], &self.points[&e.v]);
            let first = &line[0];
            let last = &line[line.len() - 1];
            if !((first == a && last == b) || (first == b && last == a)) {
                return Err(DrawingError::BadPolyline(e.id));
            }
        }
        Ok(())
    }
}

/// One crossing between two edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Crossing {
    pub e: usize,
    pub f: usize,
    pub point: Point,
    pub cost: WeightPoly,
    /// The edges share an endpoint.
    pub adjacent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CrossingSet {
    /// Sorted by edge pair, then point.
    pub crossings: Vec<Crossing>,
    pub total: WeightPoly,
    /// Vertices whose position lies in the interior of a non-incident edge.
    pub vertex_hits: Vec<(VertexId, usize)>,
}

impl CrossingSet {
    pub fn len(&self) -> usize {
        self.crossings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }

    /// Crossings involving edge `e`, as `(other edge, crossing)`.
    pub fn partners(&self, e: usize) -> impl Iterator<Item = (usize, &Crossing)> {
        self.crossings.iter().filter_map(move |c| {
            if c.e == e {
                Some((c.f, c))
            } else if c.f == e {
                Some((c.e, c))
            } else {
                None
            }
        })
    }
}

enum Piece<'a> {
    Seg { edge: usize, a: &'a Point, b: &'a Point },
    Vertex { v: VertexId, p: &'a Point },
}

enum Found {
    Crossing(usize, usize, Point),
    Hit(VertexId, usize),
}

/// Computes every crossing of the drawing exactly.
///
/// Candidate pairs come from a floating-point bounding-box sweep; each
/// candidate is then decided with exact rational arithmetic. The result is
/// sorted, so it does not depend on the order in which pairs are examined.
pub fn count_crossings(g: &ReductionGraph, d: &Drawing) -> Result<CrossingSet, DrawingError> {
    d.check_shape(g)?;
    let mut pieces: Vec<(geometry::BBox, Piece<'_>)> = Vec::new();
    for e in g.edges() {
        for w in d.polylines[e.id].windows(2) {
            pieces.push((
                geometry::BBox::of_segment(&w[0], &w[1]),
                Piece::Seg {
                    edge: e.id,
                    a: &w[0],
                    b: &w[1],
                },
            ));
        }
    }
    for (&v, p) in &d.points {
        pieces.push((geometry::BBox::of_segment(p, p), Piece::Vertex { v, p }));
    }
    let mut order: Vec<usize> = (0..pieces.len()).collect();
    order.sort_by(|&a, &b| pieces[a].0.x0.total_cmp(&pieces[b].0.x0).then(a.cmp(&b)));
    let mut candidates: Vec<(usize, usize)> = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    for &i in &order {
        let bi = pieces[i].0;
        active.retain(|&j| pieces[j].0.x1 >= bi.x0);
        for &j in &active {
            if pieces[j].0.overlaps(&bi) {
                candidates.push((j.min(i), j.max(i)));
            }
        }
        active.push(i);
    }
    let vertex_at: HashMap<&Point, VertexId> = d.points.iter().map(|(v, p)| (p, *v)).collect();
    let results: Vec<Result<Option<Found>, DrawingError>> = candidates
        .par_iter()
        .map(|&(i, j)| examine(g, &pieces[i].1, &pieces[j].1, &vertex_at))
        .collect();
    let mut found: BTreeSet<(usize, usize, Point)> = BTreeSet::new();
    let mut hits: BTreeSet<(VertexId, usize)> = BTreeSet::new();
    let mut overlaps: Vec<(usize, usize)> = Vec::new();
    for r in results {
        match r {
            Ok(Some(Found::Crossing(e, f, p))) => {
                found.insert((e, f, p));
            }
            Ok(Some(Found::Hit(v, e))) => {
                hits.insert((v, e));
            }
            Ok(None) => {}
            Err(DrawingError::Overlap(e, f)) => overlaps.push((e, f)),
            Err(other) => return Err(other),
        }
    }
    if let Some(&(e, f)) = overlaps.iter().min() {
        return Err(DrawingError::Overlap(e, f));
    }
    let mut total = WeightPoly::zero();
    let mut crossings = Vec::with_capacity(found.len());
    for (e, f, point) in found {
        let (ee, ff) = (g.edge(e), g.edge(f));
        let cost = &ee.weight * &ff.weight;
        total += &cost;
        crossings.push(Crossing {
            e,
            f,
            point,
            cost,
            adjacent: ee.shares_endpoint(ff),
        });
    }
    Ok(CrossingSet {
        crossings,
        total,
        vertex_hits: hits.into_iter().collect(),
    })
}

fn examine(
    g: &ReductionGraph,
    x: &Piece<'_>,
    y: &Piece<'_>,
    vertex_at: &HashMap<&Point, VertexId>,
) -> Result<Option<Found>, DrawingError> {
    match (x, y) {
        (Piece::Vertex { .. }, Piece::Vertex { .. }) => Ok(None),
        (Piece::Vertex { v, p }, Piece::Seg { edge, a, b }) | (Piece::Seg { edge, a, b }, Piece::Vertex { v, p }) => {
            if g.edge(*edge).touches(*v) {
                return Ok(None);
            }
            if geometry::on_segment(p, a, b) {
                Ok(Some(Found::Hit(*v, *edge)))
            } else {
                Ok(None)
            }
        }
        (
            Piece::Seg { edge: e, a: a1, b: b1 },
            Piece::Seg { edge: f, a: a2, b: b2 },
        ) => {
            if e == f {
                return Ok(None);
            }
            let (e, f) = ((*e).min(*f), (*e).max(*f));
            match intersect_segments(a1, b1, a2, b2) {
                SegmentIntersection::None => Ok(None),
                SegmentIntersection::Overlap => Err(DrawingError::Overlap(e, f)),
                SegmentIntersection::Point(p) => {
                    // meetings at vertex positions are either shared endpoints
                    // or reported as vertex hits
                    if vertex_at.contains_key(&p) {
                        Ok(None)
                    } else {
                        Ok(Some(Found::Crossing(e, f, p)))
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GoodDrawingReport {
    /// Edge pairs crossing more than once, with their count.
    pub repeated_pairs: Vec<(usize, usize, usize)>,
    /// Crossings between edges that share an endpoint.
    pub adjacent_crossings: Vec<(usize, usize)>,
    /// Points lying in the interior of three or more edges.
    pub triple_points: Vec<(Point, Vec<usize>)>,
    pub vertex_hits: Vec<(VertexId, usize)>,
}

impl GoodDrawingReport {
    pub fn passed(&self) -> bool {
        self.repeated_pairs.is_empty()
            && self.adjacent_crossings.is_empty()
            && self.triple_points.is_empty()
            && self.vertex_hits.is_empty()
    }

    pub fn summary(&self) -> String {
        if self.passed() {
            return "good drawing".into();
        }
        format!(
            "{} repeated pairs, {} adjacent crossings, {} triple points, {} vertices on edges",
            self.repeated_pairs.len(),
            self.adjacent_crossings.len(),
            self.triple_points.len(),
            self.vertex_hits.len()
        )
    }
}

/// Checks the conditions of a good drawing on a computed crossing set.
pub fn audit_good_drawing(cs: &CrossingSet) -> GoodDrawingReport {
    let mut per_pair: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut per_point: BTreeMap<&Point, BTreeSet<usize>> = BTreeMap::new();
    let mut adjacent = BTreeSet::new();
    for c in &cs.crossings {
        *per_pair.entry((c.e, c.f)).or_insert(0) += 1;
        let s = per_point.entry(&c.point).or_default();
        s.insert(c.e);
        s.insert(c.f);
        if c.adjacent {
            adjacent.insert((c.e, c.f));
        }
    }
    GoodDrawingReport {
        repeated_pairs: per_pair
            .into_iter()
            .filter(|&(_, k)| k > 1)
            .map(|((e, f), k)| (e, f, k))
            .collect(),
        adjacent_crossings: adjacent.into_iter().collect(),
        triple_points: per_point
            .into_iter()
            .filter(|(_, s)| s.len() >= 3)
            .map(|(p, s)| (p.clone(), s.into_iter().collect()))
            .collect(),
        vertex_hits: cs.vertex_hits.clone(),
    }
}

fn write_point(s: &mut String, p: &Point) {
    let _ = write!(s, " {} {}", p.x, p.y);
}

pub fn write_drawing(d: &Drawing) -> String {
    let mut s = String::new();
    s.push_str(DRAWING_HEADER);
    s.push('\n');
    let _ = writeln!(s, "vertices {}", d.points.len());
    for (v, p) in &d.points {
        let _ = write!(s, "vertex {v}");
        write_point(&mut s, p);
        s.push('\n');
    }
    let _ = writeln!(s, "polylines {}", d.polylines.len());
    for (id, line) in d.polylines.iter().enumerate() {
        let _ = write!(s, "polyline {id} {}", line.len());
        for p in line {
            write_point(&mut s, p);
        }
        s.push('\n');
    }
    s.push_str("end\n");
    s
}

pub fn read_drawing(text: &str) -> Result<Drawing, DrawingError> {
    let err = |line: usize, msg: &str| DrawingError::Parse {
        line,
        msg: msg.to_string(),
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, h)) if h == DRAWING_HEADER => {}
        _ => return Err(err(1, "missing drawing header")),
    }
    let mut d = Drawing::default();
    let mut ended = false;
    for (ln, line) in lines {
        if line.is_empty() {
            continue;
        }
        if ended {
            return Err(err(ln, "content after end"));
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let rat = |t: &str| geometry::parse_rational(t).ok_or_else(|| err(ln, "bad rational"));
        match toks[0] {
            "vertices" | "polylines" => {}
            "vertex" => {
                if toks.len() != 4 {
                    return Err(err(ln, "vertex needs label, x, y"));
                }
                let v: VertexId = toks[1].parse().map_err(|_| err(ln, "bad vertex label"))?;
                let p = Point::new(rat(toks[2])?, rat(toks[3])?);
                if d.points.insert(v, p).is_some() {
                    return Err(err(ln, "duplicate vertex"));
                }
            }
            "polyline" => {
                let id: usize = toks.get(1).and_then(|t| t.parse().ok()).ok_or_else(|| err(ln, "bad id"))?;
                if id != d.polylines.len() {
                    return Err(err(ln, "polyline out of sequence"));
                }
                let k: usize = toks.get(2).and_then(|t| t.parse().ok()).ok_or_else(|| err(ln, "bad length"))?;
                if toks.len() != 3 + 2 * k {
                    return Err(err(ln, "polyline length mismatch"));
                }
                let mut line = Vec::with_capacity(k);
                for c in 0..k {
                    line.push(Point::new(rat(toks[3 + 2 * c])?, rat(toks[4 + 2 * c])?));
                }
                d.polylines.push(line);
            }
            "end" => ended = true,
            _ => return Err(err(ln, "unknown key")),
        }
    }
    if !ended {
        return Err(err(0, "missing end marker"));
    }
    Ok(d)
}

fn color_of(c: ColorClass) -> &'static str {
    match c {
        ColorClass::HB => "#000000",
        ColorClass::LB => "#555555",
        ColorClass::R => "#c0392b",
        ColorClass::RPrime => "#e67e22",
        ColorClass::B => "#2e5cb8",
        ColorClass::BPrime => "#5dade2",
        ColorClass::C => "#17a2b8",
        ColorClass::G => "#27ae60",
    }
}

fn stroke_width(c: ColorClass) -> f64 {
    match c {
        ColorClass::HB => 0.6,
        ColorClass::LB => 0.45,
        ColorClass::G => 0.35,
        _ => 0.3,
    }
}

#[derive(Debug, Clone, Default)]
pub struct SvgStyle<'a> {
    /// Crossings to mark with small circles.
    pub crossings: Option<&'a CrossingSet>,
}

/// Renders the drawing as a deterministic SVG document, y axis pointing up.
pub fn export_svg(g: &ReductionGraph, d: &Drawing, style: &SvgStyle<'_>) -> String {
    let scale = 10.0;
    let (mut x0, mut y0, mut x1, mut y1) = (0.0f64, 0.0f64, 1.0f64, 1.0f64);
    let mut first = true;
    for p in d.points.values().chain(d.polylines.iter().flatten()) {
        let (x, y) = p.to_f64();
        if first {
            (x0, y0, x1, y1) = (x, y, x, y);
            first = false;
        } else {
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
    }
    let pad = 2.0;
    let width = (x1 - x0 + 2.0 * pad) * scale;
    let height = (y1 - y0 + 2.0 * pad) * scale;
    let tx = |x: f64| (x - x0 + pad) * scale;
    let ty = |y: f64| (y1 - y + pad) * scale;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.1}\" height=\"{height:.1}\" viewBox=\"0 0 {width:.1} {height:.1}\">"
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>");
    for e in g.edges() {
        let Some(line) = d.polylines.get(e.id) else { continue };
        let pts: Vec<String> = line
            .iter()
            .map(|p| {
                let (x, y) = p.to_f64();
                format!("{:.2},{:.2}", tx(x), ty(y))
            })
            .collect();
        let _ = writeln!(
            s,
            "<polyline data-edge=\"{}\" data-color=\"{}\" points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{:.2}\"/>",
            e.id,
            e.color,
            pts.join(" "),
            color_of(e.color),
            stroke_width(e.color) * scale
        );
    }
    for (v, p) in &d.points {
        let (x, y) = p.to_f64();
        let _ = writeln!(
            s,
            "<circle data-vertex=\"{v}\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"{:.2}\" fill=\"#000000\"/>",
            tx(x),
            ty(y),
            0.35 * scale
        );
    }
    if let Some(cs) = style.crossings {
        for c in &cs.crossings {
            let (x, y) = c.point.to_f64();
            let _ = writeln!(
                s,
                "<circle data-crossing=\"{},{}\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"{:.2}\" fill=\"none\" stroke=\"#ff00ff\" stroke-width=\"1\"/>",
                c.e,
                c.f,
                tx(x),
                ty(y),
                0.5 * scale
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
