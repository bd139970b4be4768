//! Z-affine trees mapped into the tropical base: spines, extended spines and
//! tropical cylinders, with the predicates that validate them.
//!
//! Every edge lives in a single closed cone (its home cone) and carries an
//! integral direction written in that cone's coordinates, read from the edge's
//! tail. The head sees the negated direction. A finite edge of length `t` maps
//! `tail` to `tail + t * direction`. Wall crossings only happen at vertices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{BasePoint, TangentVector, TropicalBase};
use crate::num::{det_q, to_q, Int, Q};

pub type VertexId = String;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EdgeLength {
    Finite(Q),
    Unbounded,
}

impl EdgeLength {
    pub fn finite(&self) -> Option<&Q> {
        match self {
            EdgeLength::Finite(q) => Some(q),
            EdgeLength::Unbounded => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub tail: VertexId,
    pub head: VertexId,
    pub cone: usize,
    pub direction: [Int; 2],
    pub length: EdgeLength,
}

impl Edge {
    pub fn other(&self, v: &str) -> &VertexId {
        if self.tail == v {
            &self.head
        } else {
            &self.tail
        }
    }

    pub fn touches(&self, v: &str) -> bool {
        self.tail == v || self.head == v
    }

    /// The direction seen from endpoint `v`, in home-cone coordinates.
    pub fn direction_from(&self, v: &str) -> TangentVector {
        let d = TangentVector::from_coords(self.cone, self.direction.clone());
        if self.tail == v {
            d
        } else {
            d.neg()
        }
    }

    /// Orients the edge so the tail is the smaller vertex id.
    fn normalized(mut self) -> Self {
        if self.head < self.tail {
            std::mem::swap(&mut self.tail, &mut self.head);
            self.direction = [-&self.direction[0], -&self.direction[1]];
        }
        self
    }
}

/// A finite tree whose edges carry Z-affine structures, possibly with unbounded
/// 1-valent vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZAffineTree {
    vertices: BTreeSet<VertexId>,
    edges: Vec<Edge>,
    unbounded: BTreeSet<VertexId>,
}

impl ZAffineTree {
    pub fn new(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = Edge>,
        unbounded: impl IntoIterator<Item = VertexId>,
    ) -> Result<Self> {
        let vertices: BTreeSet<VertexId> = vertices.into_iter().collect();
        let unbounded: BTreeSet<VertexId> = unbounded.into_iter().collect();
        let mut edges: Vec<Edge> = edges.into_iter().map(Edge::normalized).collect();
        edges.sort_by(|a, b| (&a.tail, &a.head, a.cone).cmp(&(&b.tail, &b.head, b.cone)));

        if vertices.is_empty() {
            return Err(Error::Structural("tree has no vertices".into()));
        }
        if let Some(v) = unbounded.iter().find(|v| !vertices.contains(*v)) {
            return Err(Error::Structural(format!("unknown unbounded vertex {v}")));
        }
        for e in &edges {
            for end in [&e.tail, &e.head] {
                if !vertices.contains(end) {
                    return Err(Error::Structural(format!("edge refers to unknown vertex {end}")));
                }
            }
            if e.tail == e.head {
                return Err(Error::Structural(format!("loop at vertex {}", e.tail)));
            }
            if e.direction[0].is_zero() && e.direction[1].is_zero() {
                return Err(Error::Structural(format!(
                    "edge {}-{} has zero direction",
                    e.tail, e.head
                )));
            }
            let touches_infinity = unbounded.contains(&e.tail) || unbounded.contains(&e.head);
            match (&e.length, touches_infinity) {
                (EdgeLength::Finite(t), false) if t.is_positive() => {}
                (EdgeLength::Finite(_), false) => {
                    return Err(Error::Structural(format!(
                        "edge {}-{} must have positive length",
                        e.tail, e.head
                    )))
                }
                (EdgeLength::Unbounded, true) => {}
                _ => {
                    return Err(Error::Structural(format!(
                        "edge {}-{} is unbounded iff it has an unbounded endpoint",
                        e.tail, e.head
                    )))
                }
            }
        }
        if edges.len() + 1 != vertices.len() {
            return Err(Error::Structural(format!(
                "{} vertices and {} edges cannot form a tree",
                vertices.len(),
                edges.len()
            )));
        }
        let tree = Self { vertices, edges, unbounded };
        let start = tree.vertices.iter().next().expect("nonempty");
        if tree.reachable_from(start).len() != tree.vertices.len() {
            return Err(Error::Structural("graph is not connected".into()));
        }
        if let Some(v) = tree.unbounded.iter().find(|v| tree.valency(v) != 1) {
            return Err(Error::Structural(format!("unbounded vertex {v} is not 1-valent")));
        }
        Ok(tree)
    }

    fn reachable_from(&self, start: &str) -> BTreeSet<VertexId> {
        let mut seen = BTreeSet::from([start.to_string()]);
        let mut stack = vec![start.to_string()];
        while let Some(v) = stack.pop() {
            for e in self.incident(&v) {
                let w = e.other(&v);
                if seen.insert(w.clone()) {
                    stack.push(w.clone());
                }
            }
        }
        seen
    }

    pub fn vertices(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn unbounded(&self) -> &BTreeSet<VertexId> {
        &self.unbounded
    }

    pub fn is_unbounded(&self, v: &str) -> bool {
        self.unbounded.contains(v)
    }

    pub fn incident<'a>(&'a self, v: &'a str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| e.touches(v))
    }

    pub fn incident_indices<'a>(&'a self, v: &'a str) -> impl Iterator<Item = usize> + 'a {
        self.edges.iter().enumerate().filter(move |(_, e)| e.touches(v)).map(|(i, _)| i)
    }

    pub fn valency(&self, v: &str) -> usize {
        self.incident(v).count()
    }

    /// Vertices and edge indices along the unique path from `a` to `b`.
    pub fn path(&self, a: &str, b: &str) -> Option<(Vec<VertexId>, Vec<usize>)> {
        let mut parent: BTreeMap<VertexId, (VertexId, usize)> = BTreeMap::new();
        let mut stack = vec![a.to_string()];
        let mut seen = BTreeSet::from([a.to_string()]);
        while let Some(v) = stack.pop() {
            for i in self.incident_indices(&v) {
                let w = self.edges[i].other(&v).clone();
                if seen.insert(w.clone()) {
                    parent.insert(w.clone(), (v.clone(), i));
                    stack.push(w);
                }
            }
        }
        if !seen.contains(b) {
            return None;
        }
        let mut verts = vec![b.to_string()];
        let mut edges = Vec::new();
        let mut cur = b.to_string();
        while cur != a {
            let (p, i) = parent[&cur].clone();
            edges.push(i);
            verts.push(p.clone());
            cur = p;
        }
        verts.reverse();
        edges.reverse();
        Some((verts, edges))
    }
}

/// A Z-affine tree together with its map to the base and its marked pair of
/// boundary vertices. Unbounded vertices have no position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddedTree {
    tree: ZAffineTree,
    boundary: (VertexId, VertexId),
    positions: BTreeMap<VertexId, BasePoint>,
}

impl EmbeddedTree {
    /// Checks that positions, home cones, directions and lengths agree.
    pub fn new(
        base: &TropicalBase,
        tree: ZAffineTree,
        boundary: (VertexId, VertexId),
        positions: BTreeMap<VertexId, BasePoint>,
    ) -> Result<Self> {
        for v in [&boundary.0, &boundary.1] {
            if !tree.vertices.contains(v) {
                return Err(Error::Structural(format!("unknown boundary vertex {v}")));
            }
        }
        if boundary.0 == boundary.1 {
            return Err(Error::Structural("boundary vertices must differ".into()));
        }
        for v in &tree.vertices {
            match (tree.is_unbounded(v), positions.contains_key(v)) {
                (false, false) => {
                    return Err(Error::Structural(format!("vertex {v} has no position")))
                }
                (true, true) => {
                    return Err(Error::Structural(format!(
                        "unbounded vertex {v} must not have a position"
                    )))
                }
                _ => {}
            }
        }
        if let Some(v) = positions.keys().find(|v| !tree.vertices.contains(*v)) {
            return Err(Error::Structural(format!("position given for unknown vertex {v}")));
        }
        for p in positions.values() {
            if let Some(c) = p.cone() {
                if c >= base.len() {
                    return Err(Error::Structural(format!("cone index {c} out of range")));
                }
            }
        }
        for e in &tree.edges {
            check_edge(base, &tree, &positions, e)?;
        }
        Ok(Self { tree, boundary, positions })
    }

    pub fn tree(&self) -> &ZAffineTree {
        &self.tree
    }

    pub fn boundary(&self) -> (&VertexId, &VertexId) {
        (&self.boundary.0, &self.boundary.1)
    }

    pub fn positions(&self) -> &BTreeMap<VertexId, BasePoint> {
        &self.positions
    }

    pub fn position(&self, v: &str) -> Option<&BasePoint> {
        self.positions.get(v)
    }

    /// `w_v(e)` in the canonical cone of `h(v)`.
    pub fn outgoing(&self, base: &TropicalBase, v: &str, edge: &Edge) -> Result<TangentVector> {
        let cone = match self.positions.get(v) {
            Some(BasePoint::Cone { cone, .. }) => *cone,
            Some(BasePoint::Origin) => return Err(Error::OriginVertex(v.to_string())),
            None => return Err(Error::Structural(format!("vertex {v} is unbounded"))),
        };
        base.vector_in(&edge.direction_from(v), cone)
    }

    /// `sigma_v`, the sum of all outgoing directions at `v`.
    pub fn defect(&self, base: &TropicalBase, v: &str) -> Result<TangentVector> {
        let cone = match self.positions.get(v) {
            Some(BasePoint::Cone { cone, .. }) => *cone,
            Some(BasePoint::Origin) => return Err(Error::OriginVertex(v.to_string())),
            None => return Err(Error::Structural(format!("vertex {v} is unbounded"))),
        };
        let mut sum = TangentVector::new(cone, 0, 0);
        for e in self.tree.incident(v) {
            sum = sum.add(&self.outgoing(base, v, e)?.coords);
        }
        Ok(sum)
    }

    /// Relabels vertices through `f`, which must be injective.
    pub fn relabeled(&self, base: &TropicalBase, f: impl Fn(&str) -> String) -> Result<Self> {
        let tree = ZAffineTree::new(
            self.tree.vertices.iter().map(|v| f(v)),
            self.tree.edges.iter().map(|e| Edge {
                tail: f(&e.tail),
                head: f(&e.head),
                ..e.clone()
            }),
            self.tree.unbounded.iter().map(|v| f(v)),
        )?;
        let positions = self.positions.iter().map(|(v, p)| (f(v), p.clone())).collect();
        Self::new(base, tree, (f(&self.boundary.0), f(&self.boundary.1)), positions)
    }

    /// Same geometry with the boundary pair swapped.
    pub fn swapped(&self) -> Self {
        Self {
            boundary: (self.boundary.1.clone(), self.boundary.0.clone()),
            ..self.clone()
        }
    }

    /// Splits a finite edge at parameter `s` in `(0, length)` with a new
    /// 2-valent vertex. The image is unchanged.
    pub fn subdivided(&self, base: &TropicalBase, edge: usize, s: &Q, new_id: &str) -> Result<Self> {
        let e = self
            .tree
            .edges
            .get(edge)
            .ok_or_else(|| Error::Structural(format!("no edge {edge}")))?;
        let len = e
            .length
            .finite()
            .ok_or_else(|| Error::Structural("cannot subdivide an unbounded edge".into()))?;
        if !s.is_positive() || s >= len {
            return Err(Error::Structural("subdivision parameter out of range".into()));
        }
        if self.tree.vertices.contains(new_id) {
            return Err(Error::Structural(format!("vertex {new_id} already exists")));
        }
        let tail = base
            .coords_in(&self.positions[&e.tail], e.cone)
            .expect("edge checked at construction");
        let d = to_q(&e.direction);
        let mid = base.point_or_origin(e.cone, &tail[0] + s * &d[0], &tail[1] + s * &d[1])?;
        let mut edges: Vec<Edge> = self.tree.edges.clone();
        let first = Edge {
            tail: e.tail.clone(),
            head: new_id.to_string(),
            cone: e.cone,
            direction: e.direction.clone(),
            length: EdgeLength::Finite(s.clone()),
        };
        let second = Edge {
            tail: new_id.to_string(),
            head: e.head.clone(),
            cone: e.cone,
            direction: e.direction.clone(),
            length: EdgeLength::Finite(len - s),
        };
        edges.remove(edge);
        edges.push(first);
        edges.push(second);
        let mut vertices = self.tree.vertices.clone();
        vertices.insert(new_id.to_string());
        let tree = ZAffineTree::new(vertices, edges, self.tree.unbounded.clone())?;
        let mut positions = self.positions.clone();
        positions.insert(new_id.to_string(), mid);
        Self::new(base, tree, self.boundary.clone(), positions)
    }
}

fn check_edge(
    base: &TropicalBase,
    tree: &ZAffineTree,
    positions: &BTreeMap<VertexId, BasePoint>,
    e: &Edge,
) -> Result<()> {
    let name = || format!("{}-{}", e.tail, e.head);
    if e.cone >= base.len() {
        return Err(Error::Structural(format!("edge {} has cone {} out of range", name(), e.cone)));
    }
    let in_cone = |v: &VertexId| -> Result<Option<[Q; 2]>> {
        match positions.get(v) {
            None => Ok(None),
            Some(p) => base.coords_in(p, e.cone).map(Some).ok_or_else(|| {
                Error::Structural(format!(
                    "endpoint {v} of edge {} lies outside its home cone {}",
                    name(),
                    e.cone
                ))
            }),
        }
    };
    let tail = in_cone(&e.tail)?;
    let head = in_cone(&e.head)?;
    let d = to_q(&e.direction);
    match (&e.length, tail, head) {
        (EdgeLength::Finite(t), Some(p), Some(q)) => {
            let expected = [&p[0] + t * &d[0], &p[1] + t * &d[1]];
            if expected != q {
                return Err(Error::Structural(format!(
                    "edge {} of length {t} does not reach its head",
                    name()
                )));
            }
            Ok(())
        }
        (EdgeLength::Unbounded, Some(_), None) | (EdgeLength::Unbounded, None, Some(_)) => {
            let outward = if tree.is_unbounded(&e.head) {
                e.direction.clone()
            } else {
                [-&e.direction[0], -&e.direction[1]]
            };
            if outward[0].is_negative() || outward[1].is_negative() {
                return Err(Error::Structural(format!(
                    "unbounded edge {} leaves its home cone {}",
                    name(),
                    e.cone
                )));
            }
            Ok(())
        }
        _ => Err(Error::Structural(format!("edge {} has inconsistent endpoints", name()))),
    }
}

/// A spine: bounded tree, boundary vertices are the two ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spine(EmbeddedTree);

/// An extended spine: the two boundary vertices are unbounded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedSpine(EmbeddedTree);

impl Spine {
    pub fn new(inner: EmbeddedTree) -> Result<Self> {
        if !inner.tree.unbounded.is_empty() {
            return Err(Error::Structural("a spine has no unbounded vertices".into()));
        }
        Ok(Self(inner))
    }

    pub fn inner(&self) -> &EmbeddedTree {
        &self.0
    }

    pub fn into_inner(self) -> EmbeddedTree {
        self.0
    }
}

impl ExtendedSpine {
    pub fn new(inner: EmbeddedTree) -> Result<Self> {
        let expected: BTreeSet<VertexId> = [inner.boundary.0.clone(), inner.boundary.1.clone()].into();
        if inner.tree.unbounded != expected {
            return Err(Error::Structural(
                "an extended spine has exactly its boundary pair as unbounded vertices".into(),
            ));
        }
        Ok(Self(inner))
    }

    pub fn inner(&self) -> &EmbeddedTree {
        &self.0
    }

    pub fn into_inner(self) -> EmbeddedTree {
        self.0
    }
}

/// An extended tropical cylinder in `B`: every extra 1-valent vertex maps to
/// the origin and every vertex of valency > 1 is balanced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderB {
    inner: EmbeddedTree,
}

impl CylinderB {
    pub fn new(base: &TropicalBase, inner: EmbeddedTree) -> Result<Self> {
        let expected: BTreeSet<VertexId> = [inner.boundary.0.clone(), inner.boundary.1.clone()].into();
        if inner.tree.unbounded != expected {
            return Err(Error::MalformedCylinder(
                "exactly the boundary pair must be unbounded".into(),
            ));
        }
        for v in &inner.tree.vertices {
            if inner.tree.is_unbounded(v) {
                continue;
            }
            let at_origin = inner.positions[v].is_origin();
            let valency = inner.tree.valency(v);
            if valency == 1 {
                if !at_origin {
                    return Err(Error::MalformedCylinder(format!(
                        "1-valent vertex {v} does not map to the origin"
                    )));
                }
            } else if at_origin {
                return Err(Error::MalformedCylinder(format!(
                    "vertex {v} of valency {valency} maps to the origin"
                )));
            } else if !is_balanced(base, &inner, v)? {
                return Err(Error::MalformedCylinder(format!("vertex {v} is not balanced")));
            }
        }
        Ok(Self { inner })
    }

    pub fn inner(&self) -> &EmbeddedTree {
        &self.inner
    }

    /// Indices of edges ending at the origin.
    pub fn legs(&self) -> Vec<usize> {
        self.inner
            .tree
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| {
                [&e.tail, &e.head]
                    .iter()
                    .any(|v| self.inner.positions.get(*v).is_some_and(BasePoint::is_origin))
            })
            .map(|(i, _)| i)
            .collect()
    }
}

/// A cylinder in `B` with the extra affine coordinate of `R x B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderBTilde {
    cylinder: CylinderB,
    /// Per-edge slope of the line coordinate, read from the edge's tail.
    slopes: Vec<Int>,
    /// Line coordinate of every bounded vertex.
    heights: BTreeMap<VertexId, Q>,
}

impl CylinderBTilde {
    pub fn new(cylinder: CylinderB, slopes: Vec<Int>, heights: BTreeMap<VertexId, Q>) -> Result<Self> {
        let tree = &cylinder.inner.tree;
        if slopes.len() != tree.edges.len() {
            return Err(Error::MalformedCylinder("one slope per edge required".into()));
        }
        let legs: BTreeSet<usize> = cylinder.legs().into_iter().collect();
        for (i, s) in slopes.iter().enumerate() {
            if legs.contains(&i) != s.is_zero() {
                return Err(Error::MalformedCylinder(format!(
                    "edge {i}: slope must vanish exactly on legs"
                )));
            }
        }
        for v in &tree.vertices {
            if tree.is_unbounded(v) {
                continue;
            }
            if !heights.contains_key(v) {
                return Err(Error::MalformedCylinder(format!("vertex {v} has no height")));
            }
            let total: Int = tree
                .incident_indices(v)
                .map(|i| if tree.edges[i].tail == *v { slopes[i].clone() } else { -&slopes[i] })
                .sum();
            if !total.is_zero() {
                return Err(Error::MalformedCylinder(format!(
                    "line coordinate is not balanced at {v}"
                )));
            }
        }
        for (i, e) in tree.edges.iter().enumerate() {
            if let (EdgeLength::Finite(t), Some(a), Some(b)) =
                (&e.length, heights.get(&e.tail), heights.get(&e.head))
            {
                if b - a != t * Q::from_integer(slopes[i].clone()) {
                    return Err(Error::MalformedCylinder(format!(
                        "heights along edge {i} disagree with its slope"
                    )));
                }
            }
        }
        Ok(Self { cylinder, slopes, heights })
    }

    pub fn cylinder(&self) -> &CylinderB {
        &self.cylinder
    }

    pub fn slopes(&self) -> &[Int] {
        &self.slopes
    }

    pub fn heights(&self) -> &BTreeMap<VertexId, Q> {
        &self.heights
    }

    /// Shifts every height by `c`.
    pub fn shifted(&self, c: &Q) -> Self {
        Self {
            heights: self.heights.iter().map(|(v, h)| (v.clone(), h + c)).collect(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpineCondition {
    /// No vertex or edge meets the origin.
    AvoidsOrigin,
    /// The boundary pair are exactly the 1-valent vertices.
    BoundaryValency,
    /// No edge direction is radial at either endpoint.
    NonRadial,
    /// At 2-valent vertices the defect is zero or points away from the origin.
    RadialDefect,
}

impl SpineCondition {
    pub fn name(self) -> &'static str {
        match self {
            SpineCondition::AvoidsOrigin => "avoids_origin",
            SpineCondition::BoundaryValency => "boundary_valency",
            SpineCondition::NonRadial => "non_radial",
            SpineCondition::RadialDefect => "radial_defect",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub condition: SpineCondition,
    pub vertex: Option<VertexId>,
    pub edge: Option<(VertexId, VertexId)>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.condition.name(), self.detail)
    }
}

/// True iff `w` is parallel to the position vector of `p` (in the same cone).
fn is_radial(p: &[Q; 2], w: &[Int; 2]) -> bool {
    det_q(p, &to_q(w)).is_zero()
}

/// Checks the four spine conditions. Works for spines and extended spines;
/// unbounded vertices are only counted for valency.
pub fn validate_spine(base: &TropicalBase, s: &EmbeddedTree) -> Vec<Violation> {
    let mut out = Vec::new();
    let tree = &s.tree;
    let edge_name = |e: &Edge| Some((e.tail.clone(), e.head.clone()));

    for (v, p) in &s.positions {
        if p.is_origin() {
            out.push(Violation {
                condition: SpineCondition::AvoidsOrigin,
                vertex: Some(v.clone()),
                edge: None,
                detail: format!("vertex {v} maps to the origin"),
            });
        }
    }
    for e in &tree.edges {
        if edge_meets_origin(base, s, e) {
            out.push(Violation {
                condition: SpineCondition::AvoidsOrigin,
                vertex: None,
                edge: edge_name(e),
                detail: format!("edge {}-{} passes through the origin", e.tail, e.head),
            });
        }
    }

    let (b1, b2) = s.boundary();
    for v in &tree.vertices {
        let val = tree.valency(v);
        let is_boundary = v == b1 || v == b2;
        if (val == 1) != is_boundary {
            out.push(Violation {
                condition: SpineCondition::BoundaryValency,
                vertex: Some(v.clone()),
                edge: None,
                detail: if is_boundary {
                    format!("boundary vertex {v} has valency {val}")
                } else {
                    format!("vertex {v} is 1-valent but not a boundary vertex")
                },
            });
        }
    }

    for (v, p) in &s.positions {
        let Some(coords) = p.coords() else { continue };
        for e in tree.incident(v) {
            let Ok(w) = s.outgoing(base, v, e) else { continue };
            if is_radial(&coords, &w.coords) {
                out.push(Violation {
                    condition: SpineCondition::NonRadial,
                    vertex: Some(v.clone()),
                    edge: edge_name(e),
                    detail: format!("direction {} at {v} is radial", w),
                });
            }
        }
        if tree.valency(v) == 2 {
            let Ok(sigma) = s.defect(base, v) else { continue };
            if !sigma.is_zero() && !points_outward(&coords, &sigma.coords) {
                out.push(Violation {
                    condition: SpineCondition::RadialDefect,
                    vertex: Some(v.clone()),
                    edge: None,
                    detail: format!("defect {} at {v} is neither zero nor radial outward", sigma),
                });
            }
        }
    }
    out
}

/// `sigma` is a positive multiple of the position vector `p`, i.e. `-sigma`
/// points towards the origin.
fn points_outward(p: &[Q; 2], sigma: &[Int; 2]) -> bool {
    let s = to_q(sigma);
    det_q(p, &s).is_zero() && (&p[0] * &s[0] + &p[1] * &s[1]).is_positive()
}

fn edge_meets_origin(base: &TropicalBase, s: &EmbeddedTree, e: &Edge) -> bool {
    let coords = |v: &VertexId| s.positions.get(v).and_then(|p| base.coords_in(p, e.cone));
    let zero = [Q::zero(), Q::zero()];
    match (&e.length, coords(&e.tail), coords(&e.head)) {
        (EdgeLength::Finite(_), Some(p), Some(q)) => {
            if p == zero || q == zero {
                return true;
            }
            det_q(&p, &q).is_zero() && (&p[0] * &q[0] + &p[1] * &q[1]).is_negative()
        }
        (EdgeLength::Unbounded, Some(p), None) | (EdgeLength::Unbounded, None, Some(p)) => {
            if p == zero {
                return true;
            }
            let outward = if s.positions.contains_key(&e.tail) {
                to_q(&e.direction)
            } else {
                to_q(&[-&e.direction[0], -&e.direction[1]])
            };
            det_q(&p, &outward).is_zero() && (&p[0] * &outward[0] + &p[1] * &outward[1]).is_negative()
        }
        _ => false,
    }
}

/// Whether the integral directions at `v` sum to zero.
pub fn is_balanced(base: &TropicalBase, s: &EmbeddedTree, v: &str) -> Result<bool> {
    Ok(s.defect(base, v)?.is_zero())
}

/// Balancing for a bare list of directions at a non-origin point; every vector
/// is moved to `cone` first.
pub fn is_balanced_at(base: &TropicalBase, point: &BasePoint, directions: &[TangentVector]) -> Result<bool> {
    let cone = point.cone().ok_or_else(|| Error::OriginVertex(point.to_string()))?;
    let mut sum = [Int::zero(), Int::zero()];
    for d in directions {
        let t = base.vector_in(d, cone)?;
        sum[0] += &t.coords[0];
        sum[1] += &t.coords[1];
    }
    Ok(sum[0].is_zero() && sum[1].is_zero())
}

/// `A(Z)` with squared norms: the larger squared norm of the two boundary
/// directions, each read at its bounded endpoint in its edge's home cone.
pub fn a_value(base: &TropicalBase, z: &CylinderBTilde) -> Result<Q> {
    let inner = z.cylinder.inner();
    let (b1, b2) = inner.boundary();
    let mut best: Option<Q> = None;
    for b in [b1, b2] {
        let mut edges = inner.tree.incident(b);
        let e = edges
            .next()
            .ok_or_else(|| Error::MalformedCylinder(format!("boundary vertex {b} has no edge")))?;
        let inner_end = e.other(b);
        if inner.tree.is_unbounded(inner_end) {
            return Err(Error::MalformedCylinder("boundary edge has no bounded endpoint".into()));
        }
        let n = base.norm_sq(&e.direction_from(inner_end))?;
        best = Some(match best {
            Some(m) if m >= n => m,
            _ => n,
        });
    }
    best.ok_or_else(|| Error::MalformedCylinder("no boundary".into()))
}

// ---------------------------------------------------------------------------
// Canonical images
// ---------------------------------------------------------------------------

/// One straight piece of an image, in the coordinates of a single cone.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Piece {
    /// Endpoints ordered lexicographically.
    Segment { cone: usize, start: [Q; 2], end: [Q; 2] },
    /// Outgoing primitive direction.
    Ray { cone: usize, start: [Q; 2], direction: [Int; 2] },
}

/// The image of a tree as a point set, cut into maximal straight pieces per
/// cone and sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalImage {
    pieces: Vec<Piece>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Bound {
    NegInf,
    At(Q),
    PosInf,
}

/// A line inside one cone: (cone, normalized direction, offset `det(d, p)`).
type LineKey = (usize, [Int; 2], Q);

/// Sign-normalized primitive direction: first nonzero coordinate positive.
fn normalized_direction(d: &[Int; 2]) -> Result<[Int; 2]> {
    let p = crate::num::primitive(d)?;
    let flip = p[0].is_negative() || (p[0].is_zero() && p[1].is_negative());
    Ok(if flip { [-&p[0], -&p[1]] } else { p })
}

impl CanonicalImage {
    /// Canonicalizes arbitrary pieces: pieces lying on a wall move to the wall's
    /// canonical cone, collinear overlapping or touching pieces in the same cone
    /// merge.
    pub fn from_pieces(base: &TropicalBase, pieces: impl IntoIterator<Item = Piece>) -> Result<Self> {
        let mut lines: BTreeMap<LineKey, Vec<(Bound, Bound)>> = BTreeMap::new();
        for piece in pieces {
            let piece = rehome(base, piece);
            let (cone, anchor, dir, lo, hi) = match &piece {
                Piece::Segment { cone, start, end } => {
                    let diff = [&end[0] - &start[0], &end[1] - &start[1]];
                    if diff[0].is_zero() && diff[1].is_zero() {
                        return Err(Error::Structural("degenerate segment".into()));
                    }
                    let dir = normalized_direction(&rational_direction(&diff))?;
                    let s0 = param(start, &dir);
                    let s1 = param(end, &dir);
                    let (lo, hi) = if s0 <= s1 { (s0, s1) } else { (s1, s0) };
                    (*cone, start.clone(), dir, Bound::At(lo), Bound::At(hi))
                }
                Piece::Ray { cone, start, direction } => {
                    let dir = normalized_direction(direction)?;
                    let s0 = param(start, &dir);
                    if dir == crate::num::primitive(direction)? {
                        (*cone, start.clone(), dir, Bound::At(s0), Bound::PosInf)
                    } else {
                        (*cone, start.clone(), dir, Bound::NegInf, Bound::At(s0))
                    }
                }
            };
            let offset = det_q(&to_q(&dir), &anchor);
            lines.entry((cone, dir, offset)).or_default().push((lo, hi));
        }

        let mut out = Vec::new();
        for ((cone, dir, offset), mut intervals) in lines {
            intervals.sort();
            let mut merged: Vec<(Bound, Bound)> = Vec::new();
            for (lo, hi) in intervals {
                match merged.last_mut() {
                    Some((_, cur_hi)) if lo <= *cur_hi => {
                        if hi > *cur_hi {
                            *cur_hi = hi;
                        }
                    }
                    _ => merged.push((lo, hi)),
                }
            }
            for (lo, hi) in merged {
                let at = |s: &Q| point_on_line(&dir, &offset, s);
                let neg = [-&dir[0], -&dir[1]];
                out.push(match (lo, hi) {
                    (Bound::At(a), Bound::At(b)) => {
                        let (p, q) = (at(&a), at(&b));
                        let (start, end) = if p <= q { (p, q) } else { (q, p) };
                        Piece::Segment { cone, start, end }
                    }
                    (Bound::At(a), Bound::PosInf) => Piece::Ray { cone, start: at(&a), direction: dir.clone() },
                    (Bound::NegInf, Bound::At(b)) => Piece::Ray { cone, start: at(&b), direction: neg },
                    _ => {
                        return Err(Error::Structural(
                            "a full line cannot lie in a single cone".into(),
                        ))
                    }
                });
            }
        }
        out.sort();
        Ok(Self { pieces: out })
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// A tree realizing the canonical form: one vertex per distinct piece
    /// endpoint, one edge per piece, one unbounded vertex per ray.
    pub fn realize(&self, base: &TropicalBase) -> Result<EmbeddedTree> {
        let mut ids: BTreeMap<BasePoint, VertexId> = BTreeMap::new();
        let mut positions = BTreeMap::new();
        let mut vertex_for = |p: BasePoint, ids: &mut BTreeMap<BasePoint, VertexId>| -> VertexId {
            let n = ids.len();
            ids.entry(p.clone())
                .or_insert_with(|| {
                    let id = format!("p{n:04}");
                    positions.insert(id.clone(), p);
                    id
                })
                .clone()
        };
        let mut edges = Vec::new();
        let mut unbounded = Vec::new();
        for (k, piece) in self.pieces.iter().enumerate() {
            match piece {
                Piece::Segment { cone, start, end } => {
                    let a = vertex_for(base.point_or_origin(*cone, start[0].clone(), start[1].clone())?, &mut ids);
                    let b = vertex_for(base.point_or_origin(*cone, end[0].clone(), end[1].clone())?, &mut ids);
                    let diff = [&end[0] - &start[0], &end[1] - &start[1]];
                    let dir = crate::num::primitive(&rational_direction(&diff))?;
                    let len = lattice_ratio(&diff, &dir);
                    edges.push(Edge { tail: a, head: b, cone: *cone, direction: dir, length: EdgeLength::Finite(len) });
                }
                Piece::Ray { cone, start, direction } => {
                    let a = vertex_for(base.point_or_origin(*cone, start[0].clone(), start[1].clone())?, &mut ids);
                    let inf = format!("r{k:04}");
                    unbounded.push(inf.clone());
                    edges.push(Edge {
                        tail: a,
                        head: inf,
                        cone: *cone,
                        direction: direction.clone(),
                        length: EdgeLength::Unbounded,
                    });
                }
            }
        }
        let mut vertices: Vec<VertexId> = ids.values().cloned().collect();
        vertices.extend(unbounded.iter().cloned());
        let tree = ZAffineTree::new(vertices, edges, unbounded)?;
        let ones: Vec<VertexId> = tree.vertices.iter().filter(|v| tree.valency(v) == 1).cloned().collect();
        let boundary = match ones.as_slice() {
            [a, b, ..] => (a.clone(), b.clone()),
            _ => return Err(Error::Structural("image has fewer than two ends".into())),
        };
        EmbeddedTree::new(base, tree, boundary, positions)
    }
}

/// The primitive integer direction of a nonzero rational vector.
fn rational_direction(v: &[Q; 2]) -> [Int; 2] {
    use num_integer::Integer;
    let den = v[0].denom().lcm(v[1].denom());
    [v[0].numer() * (&den / v[0].denom()), v[1].numer() * (&den / v[1].denom())]
}

/// `t` with `v = t * dir`, for `v` parallel to `dir`.
fn lattice_ratio(v: &[Q; 2], dir: &[Int; 2]) -> Q {
    if !dir[0].is_zero() {
        &v[0] / Q::from_integer(dir[0].clone())
    } else {
        &v[1] / Q::from_integer(dir[1].clone())
    }
}

fn param(p: &[Q; 2], dir: &[Int; 2]) -> Q {
    let d = to_q(dir);
    (&p[0] * &d[0] + &p[1] * &d[1]) / (&d[0] * &d[0] + &d[1] * &d[1])
}

/// The point with parameter `s` on the line `{p : det(dir, p) = offset}`.
fn point_on_line(dir: &[Int; 2], offset: &Q, s: &Q) -> [Q; 2] {
    let d = to_q(dir);
    let nn = &d[0] * &d[0] + &d[1] * &d[1];
    // foot of the perpendicular from the origin: offset * (-d1, d0) / |d|^2
    let foot = [-(offset * &d[1]) / &nn, (offset * &d[0]) / &nn];
    [&foot[0] + s * &d[0], &foot[1] + s * &d[1]]
}

/// Moves a piece lying on wall `cone + 1` into cone `cone + 1`.
fn rehome(base: &TropicalBase, piece: Piece) -> Piece {
    let on_upper_wall = |p: &[Q; 2]| p[0].is_zero();
    match piece {
        Piece::Segment { cone, start, end } if on_upper_wall(&start) && on_upper_wall(&end) => Piece::Segment {
            cone: base.next(cone),
            start: [start[1].clone(), Q::zero()],
            end: [end[1].clone(), Q::zero()],
        },
        Piece::Ray { cone, start, direction } if on_upper_wall(&start) && direction[0].is_zero() => Piece::Ray {
            cone: base.next(cone),
            start: [start[1].clone(), Q::zero()],
            direction: [direction[1].clone(), Int::zero()],
        },
        other => other,
    }
}

/// The pieces of an embedded tree, one per edge.
pub fn image_pieces(base: &TropicalBase, s: &EmbeddedTree) -> Vec<Piece> {
    s.tree
        .edges
        .iter()
        .map(|e| {
            let at = |v: &VertexId| s.positions.get(v).and_then(|p| base.coords_in(p, e.cone));
            match (&e.length, at(&e.tail), at(&e.head)) {
                (EdgeLength::Finite(_), Some(p), Some(q)) => Piece::Segment { cone: e.cone, start: p, end: q },
                (_, Some(p), None) => Piece::Ray { cone: e.cone, start: p, direction: e.direction.clone() },
                (_, None, Some(p)) => Piece::Ray {
                    cone: e.cone,
                    start: p,
                    direction: [-&e.direction[0], -&e.direction[1]],
                },
                _ => unreachable!("edges are checked at construction"),
            }
        })
        .collect()
}

pub fn canonical_image(base: &TropicalBase, s: &EmbeddedTree) -> CanonicalImage {
    CanonicalImage::from_pieces(base, image_pieces(base, s)).expect("edges of a valid tree are nondegenerate")
}

pub fn images_equal(base: &TropicalBase, a: &EmbeddedTree, b: &EmbeddedTree) -> bool {
    canonical_image(base, a) == canonical_image(base, b)
}
