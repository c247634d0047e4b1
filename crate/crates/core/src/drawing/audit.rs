//! Layered audit of a drawing against the structure every drawing within
//! budget must have, and recovery of the assignment a drawing encodes.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use serde::Serialize;

use super::{count_crossings, CrossingSet, Drawing, DrawingError};
use crate::cnf::Assignment;
use crate::graph::{Edge, Pol, ReductionGraph, Side, VertexId};
use crate::weights::{ColorClass, WeightPoly};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditLayer {
    pub name: String,
    /// The condition the layer checks.
    pub condition: String,
    pub passed: bool,
    /// At most a few failure descriptions.
    pub details: Vec<String>,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub layers: Vec<AuditLayer>,
    pub crossings: usize,
    pub total: WeightPoly,
    #[serde(serialize_with = "decimal")]
    pub total_value: BigInt,
    #[serde(serialize_with = "decimal")]
    pub k_value: BigInt,
}

fn decimal<S: serde::Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.layers.iter().all(|l| l.passed)
    }

    pub fn first_failure(&self) -> Option<&AuditLayer> {
        self.layers.iter().find(|l| !l.passed)
    }

    pub fn layer(&self, name: &str) -> Option<&AuditLayer> {
        self.layers.iter().find(|l| l.name == name)
    }
}

const MAX_DETAILS: usize = 8;

struct LayerBuilder {
    name: &'static str,
    condition: &'static str,
    details: Vec<String>,
    failures: usize,
}

impl LayerBuilder {
    fn new(name: &'static str, condition: &'static str) -> Self {
        Self {
            name,
            condition,
            details: Vec::new(),
            failures: 0,
        }
    }

    fn fail(&mut self, msg: impl FnOnce() -> String) {
        self.failures += 1;
        if self.details.len() < MAX_DETAILS {
            self.details.push(msg());
        }
    }

    fn finish(self) -> AuditLayer {
        AuditLayer {
            name: self.name.to_string(),
            condition: self.condition.to_string(),
            passed: self.failures == 0,
            details: self.details,
            failures: self.failures,
        }
    }
}

/// Structural role of an edge, read off its endpoint labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Role {
    /// Edge `j` of an R path of gadget `i`.
    RPath { i: usize, side: Side, j: usize },
    /// Edge `j` of a B path of gadget `i`.
    BPath { i: usize, pol: Pol, j: usize },
    /// B' stair of gadget `i` at row `j`.
    BStair { i: usize, j: usize },
    /// R' stair at row `j` ending in gadget `i` (or the right frame side).
    RStair { i: usize, j: usize },
    /// LB or C edge of gadget `i`.
    Inner { i: usize, color: ColorClass },
    Clause,
    Heavy,
}

fn role(e: &Edge) -> Role {
    let (a, b) = (e.u.min(e.v), e.u.max(e.v));
    match (e.color, a, b) {
        (ColorClass::R, VertexId::R { i, j, side }, VertexId::R { j: j2, .. }) => Role::RPath { i, side, j: j.min(j2) },
        (ColorClass::B, VertexId::B { i, j, pol }, VertexId::B { j: j2, .. }) => Role::BPath { i, pol, j: j.min(j2) },
        (ColorClass::BPrime, VertexId::B { i, j, .. }, _) => Role::BStair { i, j },
        (ColorClass::RPrime, VertexId::R { i: i1, j, .. }, VertexId::R { i: i2, .. }) => Role::RStair { i: i1.max(i2), j },
        (ColorClass::LB | ColorClass::C, VertexId::V { i, .. }, _) => Role::Inner { i, color: e.color },
        (ColorClass::G, _, _) => Role::Clause,
        _ => Role::Heavy,
    }
}

/// Computes crossings and runs every audit layer.
pub fn audit_necessary_conditions(g: &ReductionGraph, d: &Drawing) -> Result<AuditReport, DrawingError> {
    let cs = count_crossings(g, d)?;
    Ok(audit_crossings(g, &cs))
}

/// Runs the audit layers on precomputed crossings.
pub fn audit_crossings(g: &ReductionGraph, cs: &CrossingSet) -> AuditReport {
    let roles: Vec<Role> = g.edges().iter().map(role).collect();
    let color = |e: usize| g.edge(e).color;
    let mut layers = Vec::new();

    let mut hb = LayerBuilder::new("HB", "no edge of the heavy frame and gadget boundary is crossed");
    for c in &cs.crossings {
        if color(c.e) == ColorClass::HB || color(c.f) == ColorClass::HB {
            hb.fail(|| format!("edges {} and {} cross at {}", c.e, c.f, c.point));
        }
    }
    layers.push(hb.finish());

    let mut pairs = LayerBuilder::new(
        "PAIRS",
        "only R/B edges cross stairs, stairs cross each other, and clause edges cross light edges",
    );
    for c in &cs.crossings {
        let (x, y) = (color(c.e), color(c.f));
        let path = |k: ColorClass| matches!(k, ColorClass::R | ColorClass::B);
        let ok = (path(x) && y.is_stair())
            || (path(y) && x.is_stair())
            || (x.is_stair() && y.is_stair())
            || (x == ColorClass::G && y != ColorClass::HB)
            || (y == ColorClass::G && x != ColorClass::HB);
        if !ok {
            pairs.fail(|| format!("{} edge {} crosses {} edge {}", x, c.e, y, c.f));
        }
    }
    layers.push(pairs.finish());

    layers.push(alternation_layer(g, cs, &roles));
    layers.push(signature_layer(g, cs, &roles));

    let omega = g.omega;
    let total_value = BigInt::from(cs.total.eval(omega));
    let k_value = g.k_value().unwrap_or_default();
    let mut budget = LayerBuilder::new("BUDGET", "total weighted crossing cost is at most k");
    if g.k.is_none() {
        budget.fail(|| "graph carries no budget".into());
    } else if total_value > k_value {
        budget.fail(|| format!("cost {} exceeds k = {}", total_value, k_value));
    }
    layers.push(budget.finish());

    AuditReport {
        layers,
        crossings: cs.len(),
        total: cs.total.clone(),
        total_value,
        k_value,
    }
}

fn alternation_layer(g: &ReductionGraph, cs: &CrossingSet, roles: &[Role]) -> AuditLayer {
    let mut layer = LayerBuilder::new(
        "ALT",
        "stairs alternate: the B' stair of row j crosses R edge j of its gadget once, \
         the R' stair of row j crosses B edge j-1 of each B path it spans once, \
         and R edges 1 and h+2 are never crossed by a B' stair",
    );
    let h = g.h;
    let n = g.n;
    for (id, r) in roles.iter().enumerate() {
        match *r {
            Role::BStair { i, j } => {
                let hits: Vec<Role> = cs
                    .partners(id)
                    .map(|(f, _)| roles[f])
                    .filter(|x| matches!(x, Role::RPath { .. }))
                    .collect();
                let good = hits.len() == 1 && matches!(hits[0], Role::RPath { i: gi, j: gj, .. } if gi == i && gj == j);
                if !good {
                    layer.fail(|| format!("B' stair {id} (gadget {i}, row {j}) crosses R edges {hits:?}"));
                }
            }
            Role::RStair { i, j } => {
                let mut per_path: BTreeMap<(usize, Pol), Vec<usize>> = BTreeMap::new();
                for (f, _) in cs.partners(id) {
                    if let Role::BPath { i: gi, pol, j: gj } = roles[f] {
                        per_path.entry((gi, pol)).or_default().push(gj);
                    }
                }
                let expected: BTreeSet<usize> = [i.wrapping_sub(1), i]
                    .into_iter()
                    .filter(|&x| (1..=n).contains(&x))
                    .collect();
                let gadgets: Vec<usize> = per_path.keys().map(|k| k.0).collect();
                let gadget_set: BTreeSet<usize> = gadgets.iter().copied().collect();
                let good = gadget_set == expected
                    && gadgets.len() == expected.len()
                    && per_path.values().all(|js| js.len() == 1 && js[0] + 1 == j);
                if !good {
                    layer.fail(|| format!("R' stair {id} (row {j}, before gadget {i}) crosses B edges {per_path:?}"));
                }
            }
            Role::RPath { i, side, j }
                if (j == 1 || j == h + 2) && cs.partners(id).any(|(f, _)| matches!(roles[f], Role::BStair { .. })) =>
            {
                layer.fail(|| format!("outer R edge {id} (gadget {i}, {side:?}, index {j}) crossed by a B' stair"));
            }
            _ => {}
        }
    }
    layer.finish()
}

fn signature_layer(g: &ReductionGraph, cs: &CrossingSet, roles: &[Role]) -> AuditLayer {
    let mut layer = LayerBuilder::new(
        "SIG",
        "each clause edge meets each gadget in exactly 2 LB, 2 B, 2 R and 1 C crossings",
    );
    for (id, r) in roles.iter().enumerate() {
        if *r != Role::Clause {
            continue;
        }
        let mut counts: BTreeMap<usize, [usize; 4]> = (1..=g.n).map(|i| (i, [0; 4])).collect();
        for (f, _) in cs.partners(id) {
            let (i, slot) = match roles[f] {
                Role::Inner { i, color: ColorClass::LB } => (i, 0),
                Role::BPath { i, .. } => (i, 1),
                Role::RPath { i, .. } => (i, 2),
                Role::Inner { i, color: ColorClass::C } => (i, 3),
                _ => continue,
            };
            if let Some(c) = counts.get_mut(&i) {
                c[slot] += 1;
            }
        }
        for (i, c) in counts {
            if c != [2, 2, 2, 1] {
                layer.fail(|| format!("clause edge {id} in gadget {i}: LB {} B {} R {} C {}", c[0], c[1], c[2], c[3]));
            }
        }
    }
    layer.finish()
}

/// Reads the assignment off a drawing: variable `i` is true when its
/// positive LB path lies left of its negative one in every row.
pub fn extract_assignment(g: &ReductionGraph, d: &Drawing) -> Result<Assignment, DrawingError> {
    let mut values = Vec::with_capacity(g.n);
    for i in 1..=g.n {
        let mut side = None;
        for j in 1..=g.h + 2 {
            let p = d.point(VertexId::V { i, j, pol: Pol::P });
            let q = d.point(VertexId::V { i, j, pol: Pol::N });
            let (Some(p), Some(q)) = (p, q) else {
                return Err(DrawingError::MissingVertex(VertexId::V { i, j, pol: Pol::P }.to_string()));
            };
            let here = match p.x.cmp(&q.x) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Greater => false,
                std::cmp::Ordering::Equal => return Err(DrawingError::LbPathsCross(i)),
            };
            match side {
                None => side = Some(here),
                Some(s) if s != here => return Err(DrawingError::LbPathsCross(i)),
                _ => {}
            }
        }
        values.push(side.unwrap_or(true));
    }
    Ok(Assignment::new(values))
}
