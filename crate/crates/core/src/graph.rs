//! Labeled weighted multigraphs, decompositions and their validators.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::weights::{Budget, ColorClass, WeightPoly};

/// Largest vertex count accepted by [`exact_pathwidth`].
pub const EXACT_PATHWIDTH_MAX_VERTICES: usize = 20;
/// Largest unit-edge count produced by [`expand_weights`].
pub const EXPANSION_MAX_EDGES: u64 = 1_000_000;

pub const GRAPH_HEADER: &str = "crossing-forge-graph v1";
pub const DECOMPOSITION_HEADER: &str = "crossing-forge-decomposition v1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate vertex {0}")]
    DuplicateVertex(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("self-loop at {0}")]
    SelfLoop(String),
    #[error("bad vertex label {0:?}")]
    BadLabel(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("exact path-width limited to {limit} vertices, got {n}")]
    TooLarge { n: usize, limit: usize },
    #[error("expansion would create {count} unit edges, limit is {limit}")]
    ExpansionTooLarge { count: BigUint, limit: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FrameCorner {
    BL,
    TL,
    TR,
    BR,
}

/// Left or right member of a pair of paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    L,
    R,
}

/// Positive or negative member of a pair of paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pol {
    P,
    N,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CornerKind {
    U0,
    U1,
    W0,
    W1,
}

/// Structural vertex identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VertexId {
    Frame(FrameCorner),
    /// `r^i_{j,side}`; `i = 0` and `i = n + 1` are vertices on the frame sides.
    R { i: usize, j: usize, side: Side },
    B { i: usize, j: usize, pol: Pol },
    /// Vertex of an LB path, `v^i_{j,pol}`.
    V { i: usize, j: usize, pol: Pol },
    Corner { i: usize, which: CornerKind },
    ClauseEnd { j: usize, side: Side },
    Sub { edge: usize, ord: usize },
}

impl Side {
    fn as_str(self) -> &'static str {
        match self {
            Side::L => "L",
            Side::R => "R",
        }
    }
}

impl Pol {
    fn as_str(self) -> &'static str {
        match self {
            Pol::P => "P",
            Pol::N => "N",
        }
    }

    pub fn other(self) -> Pol {
        match self {
            Pol::P => Pol::N,
            Pol::N => Pol::P,
        }
    }
}

impl CornerKind {
    fn as_str(self) -> &'static str {
        match self {
            CornerKind::U0 => "u0",
            CornerKind::U1 => "u1",
            CornerKind::W0 => "w0",
            CornerKind::W1 => "w1",
        }
    }
}

impl FrameCorner {
    fn as_str(self) -> &'static str {
        match self {
            FrameCorner::BL => "BL",
            FrameCorner::TL => "TL",
            FrameCorner::TR => "TR",
            FrameCorner::BR => "BR",
        }
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            VertexId::Frame(c) => write!(f, "frame[{}]", c.as_str()),
            VertexId::R { i, j, side } => write!(f, "r[{i},{j},{}]", side.as_str()),
            VertexId::B { i, j, pol } => write!(f, "b[{i},{j},{}]", pol.as_str()),
            VertexId::V { i, j, pol } => write!(f, "v[{i},{j},{}]", pol.as_str()),
            VertexId::Corner { i, which } => write!(f, "corner[{i},{}]", which.as_str()),
            VertexId::ClauseEnd { j, side } => write!(f, "c[{j},{}]", side.as_str()),
            VertexId::Sub { edge, ord } => write!(f, "sub[{edge},{ord}]"),
        }
    }
}

impl FromStr for VertexId {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GraphError::BadLabel(s.to_string());
        let open = s.find('[').ok_or_else(bad)?;
        let inner = s[open + 1..].strip_suffix(']').ok_or_else(bad)?;
        let args: Vec<&str> = inner.split(',').collect();
        let num = |k: usize| -> Result<usize, GraphError> {
            args.get(k).and_then(|a| a.parse().ok()).ok_or_else(bad)
        };
        let side = |k: usize| match args.get(k) {
            Some(&"L") => Ok(Side::L),
            Some(&"R") => Ok(Side::R),
            _ => Err(bad()),
        };
        let pol = |k: usize| match args.get(k) {
            Some(&"P") => Ok(Pol::P),
            Some(&"N") => Ok(Pol::N),
            _ => Err(bad()),
        };
        let arity = |k: usize| if args.len() == k { Ok(()) } else { Err(bad()) };
        match &s[..open] {
            "frame" => {
                arity(1)?;
                let c = match args[0] {
                    "BL" => FrameCorner::BL,
                    "TL" => FrameCorner::TL,
                    "TR" => FrameCorner::TR,
                    "BR" => FrameCorner::BR,
                    _ => return Err(bad()),
                };
                Ok(VertexId::Frame(c))
            }
            "r" => {
                arity(3)?;
                Ok(VertexId::R { i: num(0)?, j: num(1)?, side: side(2)? })
            }
            "b" => {
                arity(3)?;
                Ok(VertexId::B { i: num(0)?, j: num(1)?, pol: pol(2)? })
            }
            "v" => {
                arity(3)?;
                Ok(VertexId::V { i: num(0)?, j: num(1)?, pol: pol(2)? })
            }
            "corner" => {
                arity(2)?;
                let which = match args[1] {
                    "u0" => CornerKind::U0,
                    "u1" => CornerKind::U1,
                    "w0" => CornerKind::W0,
                    "w1" => CornerKind::W1,
                    _ => return Err(bad()),
                };
                Ok(VertexId::Corner { i: num(0)?, which })
            }
            "c" => {
                arity(2)?;
                Ok(VertexId::ClauseEnd { j: num(0)?, side: side(1)? })
            }
            "sub" => {
                arity(2)?;
                Ok(VertexId::Sub { edge: num(0)?, ord: num(1)? })
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: usize,
    pub u: VertexId,
    pub v: VertexId,
    pub color: ColorClass,
    pub weight: WeightPoly,
}

impl Edge {
    pub fn other(&self, x: VertexId) -> Option<VertexId> {
        if self.u == x {
            Some(self.v)
        } else if self.v == x {
            Some(self.u)
        } else {
            None
        }
    }

    pub fn touches(&self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }

    pub fn shares_endpoint(&self, other: &Edge) -> bool {
        self.touches(other.u) || self.touches(other.v)
    }

    /// Endpoints in sorted order, for parallel-edge detection.
    pub fn key(&self) -> (VertexId, VertexId) {
        if self.u <= self.v {
            (self.u, self.v)
        } else {
            (self.v, self.u)
        }
    }
}

/// Weighted multigraph with structural labels and reduction metadata.
///
/// Fragments produced by individual builders carry zeroed metadata.
#[derive(Debug, Clone, Default)]
pub struct ReductionGraph {
    vertices: Vec<VertexId>,
    index: HashMap<VertexId, usize>,
    edges: Vec<Edge>,
    pub n: usize,
    pub l: usize,
    pub h: usize,
    pub omega: u64,
    pub k: Option<Budget>,
}

impl PartialEq for ReductionGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
            && self.edges == other.edges
            && self.n == other.n
            && self.l == other.l
            && self.h == other.h
            && self.omega == other.omega
            && self.k == other.k
    }
}

impl Eq for ReductionGraph {}

impl ReductionGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, v: VertexId) -> Result<(), GraphError> {
        if self.index.contains_key(&v) {
            return Err(GraphError::DuplicateVertex(v.to_string()));
        }
        self.index.insert(v, self.vertices.len());
        self.vertices.push(v);
        Ok(())
    }

    /// Adds `v` unless already present.
    pub fn ensure_vertex(&mut self, v: VertexId) {
        if !self.index.contains_key(&v) {
            self.index.insert(v, self.vertices.len());
            self.vertices.push(v);
        }
    }

    pub fn add_edge(
        &mut self,
        u: VertexId,
        v: VertexId,
        color: ColorClass,
        weight: WeightPoly,
    ) -> Result<usize, GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u.to_string()));
        }
        for x in [u, v] {
            if !self.index.contains_key(&x) {
                return Err(GraphError::UnknownVertex(x.to_string()));
            }
        }
        let id = self.edges.len();
        self.edges.push(Edge {
            id,
            u,
            v,
            color,
            weight,
        });
        Ok(id)
    }

    /// Adds an edge with the base weight of its class.
    pub fn add_plain_edge(
        &mut self,
        u: VertexId,
        v: VertexId,
        color: ColorClass,
    ) -> Result<usize, GraphError> {
        self.add_edge(u, v, color, color.base_weight())
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.index.contains_key(&v)
    }

    pub fn vertex_index(&self, v: VertexId) -> Option<usize> {
        self.index.get(&v).copied()
    }

    /// Edge ids incident to each vertex, indexed like [`Self::vertices`].
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            inc[self.index[&e.u]].push(e.id);
            inc[self.index[&e.v]].push(e.id);
        }
        inc
    }

    /// First edge joining `u` and `v`, if any.
    pub fn find_edge(&self, u: VertexId, v: VertexId) -> Option<&Edge> {
        self.edges
            .iter()
            .find(|e| (e.u == u && e.v == v) || (e.u == v && e.v == u))
    }

    pub fn k_value(&self) -> Option<BigInt> {
        self.k.as_ref().map(|k| k.value(self.omega))
    }

    /// Edges whose endpoint pair already appears on an earlier edge.
    pub fn parallel_edges(&self) -> Vec<usize> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for e in &self.edges {
            if !seen.insert(e.key()) {
                out.push(e.id);
            }
        }
        out
    }

    /// Replaces edge `id` by a path through `mid`, which must be new. The
    /// two halves keep the color and weight; the first half reuses `id`,
    /// the second half is appended.
    pub fn subdivide_edge(&mut self, id: usize, mid: VertexId) -> Result<usize, GraphError> {
        self.add_vertex(mid)?;
        let e = self.edges[id].clone();
        self.edges[id].v = mid;
        self.add_edge(mid, e.v, e.color, e.weight)
    }

    /// Connected components of the graph with `removed` deleted, each as a
    /// sorted vertex list; components are ordered by their least vertex.
    pub fn components_without(&self, removed: &BTreeSet<VertexId>) -> Vec<Vec<VertexId>> {
        let inc = self.incidence();
        let mut seen = vec![false; self.vertices.len()];
        let mut comps = Vec::new();
        for start in 0..self.vertices.len() {
            if seen[start] || removed.contains(&self.vertices[start]) {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(x) = stack.pop() {
                comp.push(self.vertices[x]);
                for &eid in &inc[x] {
                    let e = &self.edges[eid];
                    let y = e.other(self.vertices[x]).expect("incident edge");
                    let yi = self.index[&y];
                    if !seen[yi] && !removed.contains(&y) {
                        seen[yi] = true;
                        stack.push(yi);
                    }
                }
            }
            comp.sort();
            comps.push(comp);
        }
        comps.sort();
        comps
    }

    pub fn edges_by_color(&self) -> BTreeMap<ColorClass, usize> {
        let mut out = BTreeMap::new();
        for e in &self.edges {
            *out.entry(e.color).or_insert(0) += 1;
        }
        out
    }
}

/// Minimal view of a graph used by the decomposition validator.
pub trait GraphView {
    type V: Ord + Copy + fmt::Display;
    fn vertex_list(&self) -> Vec<Self::V>;
    fn edge_list(&self) -> Vec<(Self::V, Self::V)>;
}

impl GraphView for ReductionGraph {
    type V = VertexId;
    fn vertex_list(&self) -> Vec<VertexId> {
        self.vertices.clone()
    }
    fn edge_list(&self) -> Vec<(VertexId, VertexId)> {
        self.edges.iter().map(|e| (e.u, e.v)).collect()
    }
}

/// Unlabeled simple graph on `0..n`, used for small oracle tests.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SimpleGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl SimpleGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Self {
        Self { n, edges }
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (i - 1, i)).collect())
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::path(n);
        g.edges.push((n - 1, 0));
        g
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                edges.push((a, b));
            }
        }
        Self::new(n, edges)
    }
}

impl GraphView for SimpleGraph {
    type V = usize;
    fn vertex_list(&self) -> Vec<usize> {
        (0..self.n).collect()
    }
    fn edge_list(&self) -> Vec<(usize, usize)> {
        self.edges.clone()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathDecomposition<V = VertexId> {
    pub bags: Vec<BTreeSet<V>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition<V = VertexId> {
    pub bags: Vec<BTreeSet<V>>,
    /// Tree edges between bag indices.
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decomposition<V = VertexId> {
    Path(PathDecomposition<V>),
    Tree(TreeDecomposition<V>),
}

fn width_of<V>(bags: &[BTreeSet<V>]) -> usize {
    bags.iter().map(|b| b.len()).max().unwrap_or(0).saturating_sub(1)
}

impl<V: Ord + Copy> PathDecomposition<V> {
    pub fn width(&self) -> usize {
        width_of(&self.bags)
    }

    pub fn to_tree(&self) -> TreeDecomposition<V> {
        TreeDecomposition {
            bags: self.bags.clone(),
            edges: (1..self.bags.len()).map(|i| (i - 1, i)).collect(),
        }
    }
}

impl<V: Ord + Copy> TreeDecomposition<V> {
    pub fn width(&self) -> usize {
        width_of(&self.bags)
    }
}

impl<V: Ord + Copy> Decomposition<V> {
    pub fn width(&self) -> usize {
        match self {
            Decomposition::Path(p) => p.width(),
            Decomposition::Tree(t) => t.width(),
        }
    }

    pub fn bags(&self) -> &[BTreeSet<V>] {
        match self {
            Decomposition::Path(p) => &p.bags,
            Decomposition::Tree(t) => &t.bags,
        }
    }
}

/// First failing condition found by [`validate_decomposition`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    EmptyDecomposition,
    UnknownVertex { vertex: String, bag: usize },
    UncoveredVertex { vertex: String },
    UncoveredEdge { u: String, v: String },
    NotContiguous { vertex: String },
    NotConnected { vertex: String },
    NotATree { reason: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyDecomposition => write!(f, "decomposition has no bags"),
            Violation::UnknownVertex { vertex, bag } => {
                write!(f, "bag {bag} contains {vertex}, which is not in the graph")
            }
            Violation::UncoveredVertex { vertex } => write!(f, "vertex {vertex} is in no bag"),
            Violation::UncoveredEdge { u, v } => write!(f, "edge ({u},{v}) uncovered"),
            Violation::NotContiguous { vertex } => {
                write!(f, "bags containing {vertex} are not consecutive")
            }
            Violation::NotConnected { vertex } => {
                write!(f, "bags containing {vertex} do not form a subtree")
            }
            Violation::NotATree { reason } => write!(f, "bag graph is not a tree: {reason}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Validity {
    Valid { width: usize },
    Invalid(Violation),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid { .. })
    }

    pub fn width(&self) -> Option<usize> {
        match self {
            Validity::Valid { width } => Some(*width),
            Validity::Invalid(_) => None,
        }
    }
}

fn check_tree_shape(nodes: usize, edges: &[(usize, usize)]) -> Result<(), Violation> {
    if edges.len() + 1 != nodes {
        return Err(Violation::NotATree {
            reason: format!("{} bags but {} tree edges", nodes, edges.len()),
        });
    }
    let mut parent: Vec<usize> = (0..nodes).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nxt = p[y];
            p[y] = r;
            y = nxt;
        }
        r
    }
    for &(a, b) in edges {
        if a >= nodes || b >= nodes {
            return Err(Violation::NotATree {
                reason: format!("tree edge ({a},{b}) out of range"),
            });
        }
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return Err(Violation::NotATree {
                reason: format!("tree edge ({a},{b}) closes a cycle"),
            });
        }
        parent[ra] = rb;
    }
    Ok(())
}

/// Checks vertex coverage, edge coverage and the running-intersection
/// property, reporting the width on success.
pub fn validate_decomposition<G: GraphView>(g: &G, d: &Decomposition<G::V>) -> Validity {
    match validate_inner(g, d) {
        Ok(width) => Validity::Valid { width },
        Err(v) => Validity::Invalid(v),
    }
}

fn validate_inner<G: GraphView>(g: &G, d: &Decomposition<G::V>) -> Result<usize, Violation> {
    let bags = d.bags();
    if bags.is_empty() {
        return Err(Violation::EmptyDecomposition);
    }
    let vertices = g.vertex_list();
    let known: BTreeSet<G::V> = vertices.iter().copied().collect();
    let mut occ: BTreeMap<G::V, Vec<usize>> = BTreeMap::new();
    for (bi, bag) in bags.iter().enumerate() {
        for &x in bag {
            if !known.contains(&x) {
                return Err(Violation::UnknownVertex {
                    vertex: x.to_string(),
                    bag: bi,
                });
            }
            occ.entry(x).or_default().push(bi);
        }
    }
    for &x in &vertices {
        if !occ.contains_key(&x) {
            return Err(Violation::UncoveredVertex {
                vertex: x.to_string(),
            });
        }
    }
    for (a, b) in g.edge_list() {
        let oa = &occ[&a];
        let covered = oa.iter().any(|&bi| bags[bi].contains(&b));
        if !covered {
            return Err(Violation::UncoveredEdge {
                u: a.to_string(),
                v: b.to_string(),
            });
        }
    }
    match d {
        Decomposition::Path(_) => {
            for (x, list) in &occ {
                let first = list[0];
                let last = *list.last().expect("nonempty");
                if last - first + 1 != list.len() {
                    return Err(Violation::NotContiguous {
                        vertex: x.to_string(),
                    });
                }
            }
        }
        Decomposition::Tree(t) => {
            check_tree_shape(bags.len(), &t.edges)?;
            let mut inside: BTreeMap<G::V, usize> = BTreeMap::new();
            for &(a, b) in &t.edges {
                for x in bags[a].intersection(&bags[b]) {
                    *inside.entry(*x).or_insert(0) += 1;
                }
            }
            // in a forest, a node set induces a subtree iff it spans
            // exactly (nodes - 1) edges
            for (x, list) in &occ {
                if inside.get(x).copied().unwrap_or(0) + 1 != list.len() {
                    return Err(Violation::NotConnected {
                        vertex: x.to_string(),
                    });
                }
            }
        }
    }
    Ok(width_of(bags))
}

/// Exact path-width through the vertex separation number, by dynamic
/// programming over vertex subsets.
pub fn exact_pathwidth(g: &SimpleGraph) -> Result<usize, GraphError> {
    let n = g.n;
    if n > EXACT_PATHWIDTH_MAX_VERTICES {
        return Err(GraphError::TooLarge {
            n,
            limit: EXACT_PATHWIDTH_MAX_VERTICES,
        });
    }
    if n == 0 {
        return Ok(0);
    }
    let mut adj = vec![0u32; n];
    for &(a, b) in &g.edges {
        if a != b {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
    }
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let size = 1usize << n;
    let mut best = vec![u8::MAX; size];
    best[0] = 0;
    for s in 1..size as u32 {
        let mut boundary = 0u8;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if adj[v] & !s & full != 0 {
                boundary += 1;
            }
        }
        let mut m = u8::MAX;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros();
            rest &= rest - 1;
            let prev = best[(s & !(1 << v)) as usize];
            m = m.min(prev.max(boundary));
        }
        best[s as usize] = m;
    }
    Ok(best[full as usize] as usize)
}

/// Result of [`subdivide_parallel`].
#[derive(Debug, Clone)]
pub struct Subdivided {
    pub graph: ReductionGraph,
    /// Original ids of the subdivided edges, each with its new vertex.
    pub subdivided: Vec<(usize, VertexId)>,
}

/// Subdivides all but the first edge of every family of parallel edges.
/// Metadata is carried over unchanged; subdividing does not change the
/// crossing number.
pub fn subdivide_parallel(g: &ReductionGraph) -> Subdivided {
    let mut out = ReductionGraph {
        n: g.n,
        l: g.l,
        h: g.h,
        omega: g.omega,
        k: g.k.clone(),
        ..ReductionGraph::default()
    };
    for &v in g.vertices() {
        out.ensure_vertex(v);
    }
    let mut seen = BTreeSet::new();
    let mut subdivided = Vec::new();
    for e in g.edges() {
        if seen.insert(e.key()) {
            out.add_edge(e.u, e.v, e.color, e.weight.clone())
                .expect("endpoints copied");
        } else {
            let mid = VertexId::Sub { edge: e.id, ord: 1 };
            out.ensure_vertex(mid);
            out.add_edge(e.u, mid, e.color, e.weight.clone())
                .expect("endpoints copied");
            out.add_edge(mid, e.v, e.color, e.weight.clone())
                .expect("endpoints copied");
            subdivided.push((e.id, mid));
        }
    }
    Subdivided {
        graph: out,
        subdivided,
    }
}

/// Unit-weight multigraph: each entry is `(u, v, original edge id)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitMultigraph {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<(VertexId, VertexId, usize)>,
}

/// Replaces each edge of weight `t` (evaluated at `omega`) by `t` parallel
/// unit edges, refusing when more than [`EXPANSION_MAX_EDGES`] would result.
pub fn expand_weights(g: &ReductionGraph, omega: u64) -> Result<UnitMultigraph, GraphError> {
    let counts: Vec<BigUint> = g.edges().iter().map(|e| e.weight.eval(omega)).collect();
    let total: BigUint = counts.iter().sum();
    if total > BigUint::from(EXPANSION_MAX_EDGES) {
        return Err(GraphError::ExpansionTooLarge {
            count: total,
            limit: EXPANSION_MAX_EDGES,
        });
    }
    let mut edges = Vec::new();
    for (e, c) in g.edges().iter().zip(&counts) {
        let c: u64 = c.try_into().expect("bounded by guard");
        for _ in 0..c {
            edges.push((e.u, e.v, e.id));
        }
    }
    Ok(UnitMultigraph {
        vertices: g.vertices().to_vec(),
        edges,
    })
}

fn parse_err(line: usize, msg: impl Into<String>) -> GraphError {
    GraphError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Serializes a graph with its metadata in the versioned text format.
pub fn write_graph(g: &ReductionGraph) -> String {
    let mut s = String::new();
    s.push_str(GRAPH_HEADER);
    s.push('\n');
    s.push_str(&format!("n {}\nl {}\nh {}\nomega {}\n", g.n, g.l, g.h, g.omega));
    if let Some(k) = &g.k {
        s.push_str(&format!("k {}\n", k.symbolic.coeff_array_string()));
        s.push_str(&format!("k_offset {}\n", k.offset));
        s.push_str(&format!("k_value {}\n", k.value(g.omega)));
    }
    s.push_str(&format!("vertices {}\n", g.num_vertices()));
    for v in g.vertices() {
        s.push_str(&format!("vertex {v}\n"));
    }
    s.push_str(&format!("edges {}\n", g.num_edges()));
    for e in g.edges() {
        s.push_str(&format!(
            "edge {} {} {} {} {}\n",
            e.id,
            e.u,
            e.v,
            e.color,
            e.weight.coeff_array_string()
        ));
    }
    s.push_str("end\n");
    s
}

pub fn read_graph(text: &str) -> Result<ReductionGraph, GraphError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, h)) if h == GRAPH_HEADER => {}
        _ => return Err(parse_err(1, format!("expected header {GRAPH_HEADER:?}"))),
    }
    let mut g = ReductionGraph::new();
    let mut k_sym: Option<WeightPoly> = None;
    let mut k_offset: i64 = 0;
    let mut k_value: Option<BigInt> = None;
    let mut declared_v: Option<usize> = None;
    let mut declared_e: Option<usize> = None;
    let mut ended = false;
    for (ln, line) in lines {
        if line.is_empty() {
            continue;
        }
        if ended {
            return Err(parse_err(ln, "content after end"));
        }
        let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
        let num = |r: &str| -> Result<usize, GraphError> {
            r.trim().parse().map_err(|_| parse_err(ln, format!("bad number {r:?}")))
        };
        match key {
            "n" => g.n = num(rest)?,
            "l" => g.l = num(rest)?,
            "h" => g.h = num(rest)?,
            "omega" => {
                g.omega = rest
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(ln, "bad omega"))?
            }
            "k" => {
                k_sym = Some(
                    WeightPoly::parse_coeff_array(rest).map_err(|e| parse_err(ln, e.to_string()))?,
                )
            }
            "k_offset" => {
                k_offset = rest
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(ln, "bad k_offset"))?
            }
            "k_value" => {
                k_value = Some(
                    rest.trim()
                        .parse()
                        .map_err(|_| parse_err(ln, "bad k_value"))?,
                )
            }
            "vertices" => declared_v = Some(num(rest)?),
            "edges" => declared_e = Some(num(rest)?),
            "vertex" => {
                let v: VertexId = rest.trim().parse().map_err(|e: GraphError| parse_err(ln, e.to_string()))?;
                g.add_vertex(v).map_err(|e| parse_err(ln, e.to_string()))?;
            }
            "edge" => {
                let parts: Vec<&str> = rest.splitn(5, ' ').collect();
                if parts.len() != 5 {
                    return Err(parse_err(ln, "edge needs id, u, v, color, weight"));
                }
                let id = num(parts[0])?;
                if id != g.num_edges() {
                    return Err(parse_err(ln, format!("edge id {id} out of sequence")));
                }
                let u: VertexId = parts[1].parse().map_err(|e: GraphError| parse_err(ln, e.to_string()))?;
                let v: VertexId = parts[2].parse().map_err(|e: GraphError| parse_err(ln, e.to_string()))?;
                let color = ColorClass::from_name(parts[3])
                    .ok_or_else(|| parse_err(ln, format!("unknown color {:?}", parts[3])))?;
                let w = WeightPoly::parse_coeff_array(parts[4])
                    .map_err(|e| parse_err(ln, e.to_string()))?;
                g.add_edge(u, v, color, w)
                    .map_err(|e| parse_err(ln, e.to_string()))?;
            }
            "end" => ended = true,
            _ => return Err(parse_err(ln, format!("unknown key {key:?}"))),
        }
    }
    if !ended {
        return Err(parse_err(0, "missing end marker"));
    }
    if declared_v.is_some_and(|d| d != g.num_vertices()) {
        return Err(parse_err(0, "vertex count does not match declaration"));
    }
    if declared_e.is_some_and(|d| d != g.num_edges()) {
        return Err(parse_err(0, "edge count does not match declaration"));
    }
    if let Some(sym) = k_sym {
        let k = Budget {
            symbolic: sym,
            offset: k_offset,
        };
        if let Some(kv) = k_value {
            if kv != k.value(g.omega) {
                return Err(parse_err(0, "k_value disagrees with k and omega"));
            }
        }
        g.k = Some(k);
    }
    Ok(g)
}

pub fn write_decomposition(d: &Decomposition<VertexId>) -> String {
    let mut s = String::new();
    s.push_str(DECOMPOSITION_HEADER);
    s.push('\n');
    let (kind, bags, edges): (&str, _, &[(usize, usize)]) = match d {
        Decomposition::Path(p) => ("path", &p.bags, &[]),
        Decomposition::Tree(t) => ("tree", &t.bags, &t.edges),
    };
    s.push_str(&format!("kind {kind}\nwidth {}\nbags {}\n", d.width(), bags.len()));
    for (i, bag) in bags.iter().enumerate() {
        s.push_str(&format!("bag {i}"));
        for v in bag {
            s.push(' ');
            s.push_str(&v.to_string());
        }
        s.push('\n');
    }
    for (a, b) in edges {
        s.push_str(&format!("tree-edge {a} {b}\n"));
    }
    s.push_str("end\n");
    s
}

pub fn read_decomposition(text: &str) -> Result<Decomposition<VertexId>, GraphError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, h)) if h == DECOMPOSITION_HEADER => {}
        _ => return Err(parse_err(1, format!("expected header {DECOMPOSITION_HEADER:?}"))),
    }
    let mut kind: Option<String> = None;
    let mut bags: Vec<BTreeSet<VertexId>> = Vec::new();
    let mut edges = Vec::new();
    let mut ended = false;
    for (ln, line) in lines {
        if line.is_empty() {
            continue;
        }
        if ended {
            return Err(parse_err(ln, "content after end"));
        }
        let mut toks = line.split_whitespace();
        let key = toks.next().unwrap_or("");
        match key {
            "kind" => kind = toks.next().map(str::to_string),
            "width" | "bags" => {}
            "bag" => {
                let idx: usize = toks
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| parse_err(ln, "bag needs an index"))?;
                if idx != bags.len() {
                    return Err(parse_err(ln, format!("bag {idx} out of sequence")));
                }
                let mut bag = BTreeSet::new();
                for t in toks {
                    let v: VertexId =
                        t.parse().map_err(|e: GraphError| parse_err(ln, e.to_string()))?;
                    bag.insert(v);
                }
                bags.push(bag);
            }
            "tree-edge" => {
                let a: Option<usize> = toks.next().and_then(|t| t.parse().ok());
                let b: Option<usize> = toks.next().and_then(|t| t.parse().ok());
                match (a, b) {
                    (Some(a), Some(b)) => edges.push((a, b)),
                    _ => return Err(parse_err(ln, "tree-edge needs two bag indices")),
                }
            }
            "end" => ended = true,
            _ => return Err(parse_err(ln, format!("unknown key {key:?}"))),
        }
    }
    if !ended {
        return Err(parse_err(0, "missing end marker"));
    }
    match kind.as_deref() {
        Some("path") => {
            if !edges.is_empty() {
                return Err(parse_err(0, "path decomposition with tree edges"));
            }
            Ok(Decomposition::Path(PathDecomposition { bags }))
        }
        Some("tree") => Ok(Decomposition::Tree(TreeDecomposition { bags, edges })),
        _ => Err(parse_err(0, "kind must be path or tree")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[usize]) -> BTreeSet<usize> {
        xs.iter().copied().collect()
    }

    #[test]
    fn labels_round_trip() {
        let samples = [
            VertexId::Frame(FrameCorner::TR),
            VertexId::R { i: 2, j: 3, side: Side::L },
            VertexId::B { i: 1, j: 4, pol: Pol::N },
            VertexId::V { i: 5, j: 17, pol: Pol::P },
            VertexId::Corner { i: 1, which: CornerKind::W1 },
            VertexId::ClauseEnd { j: 3, side: Side::R },
            VertexId::Sub { edge: 12, ord: 1 },
        ];
        for v in samples {
            let text = v.to_string();
            assert_eq!(text.parse::<VertexId>().unwrap(), v, "{text}");
        }
        assert_eq!(samples[1].to_string(), "r[2,3,L]");
        assert_eq!(samples[4].to_string(), "corner[1,w1]");
        assert_eq!(samples[0].to_string(), "frame[TR]");
        for bad in ["r[1,2]", "x[1]", "corner[1,u7]", "v[1,2,Q]", "c[1,L", "frame[XX]"] {
            assert!(bad.parse::<VertexId>().is_err(), "{bad}");
        }
    }

    #[test]
    fn validator_examples() {
        let tri = SimpleGraph::complete(3);
        let d = Decomposition::Path(PathDecomposition { bags: vec![set(&[0, 1, 2])] });
        assert_eq!(validate_decomposition(&tri, &d), Validity::Valid { width: 2 });

        let p = SimpleGraph::path(3);
        let ok = Decomposition::Path(PathDecomposition { bags: vec![set(&[0, 1]), set(&[1, 2])] });
        assert_eq!(validate_decomposition(&p, &ok), Validity::Valid { width: 1 });
        let bad = Decomposition::Path(PathDecomposition { bags: vec![set(&[0, 1]), set(&[2])] });
        assert_eq!(
            validate_decomposition(&p, &bad),
            Validity::Invalid(Violation::UncoveredEdge { u: "1".into(), v: "2".into() })
        );
    }

    #[test]
    fn validator_detects_each_failure() {
        let p = SimpleGraph::path(3);
        let gap = Decomposition::Path(PathDecomposition {
            bags: vec![set(&[0, 1]), set(&[1, 2]), set(&[0])],
        });
        assert!(matches!(
            validate_decomposition(&p, &gap),
            Validity::Invalid(Violation::NotContiguous { .. })
        ));
        let missing = Decomposition::Path(PathDecomposition { bags: vec![set(&[0, 1])] });
        assert!(matches!(
            validate_decomposition(&p, &missing),
            Validity::Invalid(Violation::UncoveredVertex { .. })
        ));
        let unknown = Decomposition::Path(PathDecomposition { bags: vec![set(&[0, 1, 2, 7])] });
        assert!(matches!(
            validate_decomposition(&p, &unknown),
            Validity::Invalid(Violation::UnknownVertex { .. })
        ));
        // star of bags: {0,1} - {1,2} - {0}: 0 split across a tree
        let split = Decomposition::Tree(TreeDecomposition {
            bags: vec![set(&[0, 1]), set(&[1, 2]), set(&[0])],
            edges: vec![(0, 1), (1, 2)],
        });
        assert!(matches!(
            validate_decomposition(&p, &split),
            Validity::Invalid(Violation::NotConnected { .. })
        ));
        let branched = Decomposition::Tree(TreeDecomposition {
            bags: vec![set(&[1]), set(&[0, 1]), set(&[1, 2])],
            edges: vec![(0, 1), (0, 2)],
        });
        assert_eq!(validate_decomposition(&p, &branched), Validity::Valid { width: 1 });
        let cyclic = Decomposition::Tree(TreeDecomposition {
            bags: vec![set(&[0, 1]), set(&[1, 2]), set(&[1])],
            edges: vec![(0, 1), (1, 0)],
        });
        assert!(matches!(
            validate_decomposition(&p, &cyclic),
            Validity::Invalid(Violation::NotATree { .. })
        ));
    }

    #[test]
    fn exact_pathwidth_examples() {
        assert_eq!(exact_pathwidth(&SimpleGraph::path(2)).unwrap(), 1);
        assert_eq!(exact_pathwidth(&SimpleGraph::cycle(4)).unwrap(), 2);
        assert_eq!(exact_pathwidth(&SimpleGraph::complete(5)).unwrap(), 4);
        assert_eq!(exact_pathwidth(&SimpleGraph::new(3, vec![])).unwrap(), 0);
        // the complete binary tree on 7 vertices is a caterpillar
        let t = SimpleGraph::new(7, vec![(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)]);
        assert_eq!(exact_pathwidth(&t).unwrap(), 1);
        assert!(exact_pathwidth(&SimpleGraph::path(21)).is_err());
    }

    fn two_vertex_graph() -> (ReductionGraph, VertexId, VertexId) {
        let mut g = ReductionGraph::new();
        let a = VertexId::Frame(FrameCorner::BL);
        let b = VertexId::Frame(FrameCorner::TL);
        g.add_vertex(a).unwrap();
        g.add_vertex(b).unwrap();
        (g, a, b)
    }

    #[test]
    fn subdivision_of_parallel_edges() {
        let (mut g, a, b) = two_vertex_graph();
        g.add_plain_edge(a, b, ColorClass::HB).unwrap();
        g.add_plain_edge(b, a, ColorClass::HB).unwrap();
        let s = subdivide_parallel(&g);
        assert_eq!(s.graph.num_vertices(), 3);
        assert_eq!(s.graph.num_edges(), 3);
        assert!(s.graph.parallel_edges().is_empty());
        assert_eq!(s.subdivided, vec![(1, VertexId::Sub { edge: 1, ord: 1 })]);

        let (mut g, a, b) = two_vertex_graph();
        g.add_plain_edge(a, b, ColorClass::HB).unwrap();
        assert_eq!(subdivide_parallel(&g).graph, g);
    }

    #[test]
    fn weight_expansion() {
        let (mut g, a, b) = two_vertex_graph();
        g.add_plain_edge(a, b, ColorClass::C).unwrap();
        assert_eq!(expand_weights(&g, 3).unwrap().edges.len(), 9);
        let (mut g, a, b) = two_vertex_graph();
        g.add_plain_edge(a, b, ColorClass::G).unwrap();
        assert_eq!(expand_weights(&g, 6400).unwrap().edges.len(), 1);
        let (mut g, a, b) = two_vertex_graph();
        g.add_plain_edge(a, b, ColorClass::HB).unwrap();
        assert!(matches!(
            expand_weights(&g, 6400),
            Err(GraphError::ExpansionTooLarge { .. })
        ));
    }

    #[test]
    fn builder_rejects_bad_edges() {
        let (mut g, a, _) = two_vertex_graph();
        assert!(g.add_plain_edge(a, a, ColorClass::G).is_err());
        let ghost = VertexId::ClauseEnd { j: 1, side: Side::L };
        assert!(g.add_plain_edge(a, ghost, ColorClass::G).is_err());
        assert!(g.add_vertex(a).is_err());
    }

    #[test]
    fn graph_file_round_trip() {
        let (mut g, a, b) = two_vertex_graph();
        g.add_edge(a, b, ColorClass::R, crate::weights::g_weight(2).unwrap()).unwrap();
        g.n = 1;
        g.l = 1;
        g.h = 3;
        g.omega = 1;
        g.k = Some(Budget { symbolic: WeightPoly::monomial(2, 2u32), offset: -1 });
        let text = write_graph(&g);
        let back = read_graph(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(write_graph(&back), text);
        assert!(read_graph("nonsense").is_err());
        let broken = text.replace("k_value 1", "k_value 2");
        assert!(read_graph(&broken).is_err());
    }

    #[test]
    fn decomposition_file_round_trip() {
        let a = VertexId::Frame(FrameCorner::BL);
        let b = VertexId::Frame(FrameCorner::TL);
        let bags = vec![[a, b].into_iter().collect(), [b].into_iter().collect()];
        for d in [
            Decomposition::Path(PathDecomposition { bags: bags.clone() }),
            Decomposition::Tree(TreeDecomposition { bags, edges: vec![(0, 1)] }),
        ] {
            let text = write_decomposition(&d);
            let back = read_decomposition(&text).unwrap();
            assert_eq!(back, d);
            assert_eq!(write_decomposition(&back), text);
        }
    }

    #[test]
    fn components_after_removal() {
        let mut g = ReductionGraph::new();
        let vs: Vec<VertexId> = (0..3).map(|e| VertexId::Sub { edge: e, ord: 1 }).collect();
        for &v in &vs {
            g.add_vertex(v).unwrap();
        }
        g.add_plain_edge(vs[0], vs[1], ColorClass::G).unwrap();
        g.add_plain_edge(vs[1], vs[2], ColorClass::G).unwrap();
        assert_eq!(g.components_without(&BTreeSet::new()).len(), 1);
        assert_eq!(g.components_without(&[vs[1]].into_iter().collect()).len(), 2);
    }
}
