//! Extending spines to the boundary and turning extended spines into
//! tropical cylinders.
//!
//! Extension casts a ray from each boundary vertex, continuing the boundary
//! edge. A ray that never meets a wall becomes an unbounded edge; a ray that
//! meets wall `i` gets a new boundary vertex there and contributes
//! `|w ^ e_i| [D_i]` to the curve class. Rays cross walls only at vertices.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{wedge_lattice_length, BasePoint, CurveClass, TangentVector, TropicalBase};
use crate::num::{content, lattice_length_q, to_q, Int, Q};
use crate::spine::{
    validate_spine, CylinderB, CylinderBTilde, Edge, EdgeLength, EmbeddedTree, ExtendedSpine, Spine, VertexId,
    ZAffineTree,
};

pub const DEFAULT_MAX_STEPS: usize = 10_000;

#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RayHit {
    /// The ray meets wall `wall` at `point` after parameter `length`, having
    /// travelled through cone `cone` with `direction` (cone coordinates).
    Wall { wall: usize, point: BasePoint, length: Q, cone: usize, direction: TangentVector },
    /// The ray stays in cone `cone` forever.
    Unbounded { cone: usize, direction: TangentVector },
    DegenerateOrigin,
}

/// Follows the straight ray from `start` in direction `dir` until it leaves
/// the cone it enters.
pub fn ray_trace(base: &TropicalBase, start: &BasePoint, dir: &TangentVector) -> Result<RayHit> {
    let (mut cone, a, b) = match start {
        BasePoint::Origin => return Err(Error::DegenerateRay("ray starts at the origin".into())),
        BasePoint::Cone { cone, a, b } => (*cone, a.clone(), b.clone()),
    };
    if dir.is_zero() {
        return Err(Error::ZeroVector);
    }
    let mut d = base.vector_in(dir, cone)?;
    let mut p = [a, b];
    if p[1].is_zero() {
        // Wall point: pick the side the direction points into.
        if d.coords[1].is_zero() {
            return Err(Error::DegenerateRay(format!("direction {d} runs along wall {cone}")));
        }
        if d.coords[1].is_negative() {
            d = base.vector_in(&d, base.prev(cone))?;
            cone = base.prev(cone);
            p = [Q::zero(), p[0].clone()];
        }
    }
    let dq = to_q(&d.coords);
    let exit = |k: usize| -> Option<Q> {
        dq[k].is_negative().then(|| -&p[k] / &dq[k]).filter(|t| t.is_positive())
    };
    let hit = match (exit(0), exit(1)) {
        (None, None) => return Ok(RayHit::Unbounded { cone, direction: d }),
        (Some(ta), Some(tb)) if ta == tb => return Ok(RayHit::DegenerateOrigin),
        (Some(ta), Some(tb)) if tb < ta => (1, tb),
        (Some(ta), _) => (0, ta),
        (None, Some(tb)) => (1, tb),
    };
    let (side, t) = hit;
    let at = [&p[0] + &t * &dq[0], &p[1] + &t * &dq[1]];
    let wall = if side == 1 { cone } else { base.next(cone) };
    let point = base.point(cone, at[0].clone(), at[1].clone())?;
    Ok(RayHit::Wall { wall, point, length: t, cone, direction: d })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum End {
    First,
    Second,
}

impl End {
    fn index(self) -> usize {
        match self {
            End::First => 0,
            End::Second => 1,
        }
    }

    fn tag(self) -> &'static str {
        match self {
            End::First => "1",
            End::Second => "2",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionStep {
    pub tree: EmbeddedTree,
    pub increment: CurveClass,
    pub finished: bool,
}

fn fresh_id(tree: &ZAffineTree, stem: &str) -> VertexId {
    let mut id = stem.to_string();
    while tree.vertices().contains(&id) {
        id.push('\'');
    }
    id
}

/// One extension at the given end of a (partially extended) spine.
pub fn extend_step(base: &TropicalBase, tree: &EmbeddedTree, end: End) -> Result<ExtensionStep> {
    let (b1, b2) = tree.boundary();
    let vb = match end {
        End::First => b1.clone(),
        End::Second => b2.clone(),
    };
    if tree.tree().is_unbounded(&vb) {
        return Err(Error::Structural(format!("end {vb} is already unbounded")));
    }
    let incident: Vec<Edge> = tree.tree().incident(&vb).cloned().collect();
    let [edge] = incident.as_slice() else {
        return Err(Error::Structural(format!("boundary vertex {vb} is not 1-valent")));
    };
    let edge = edge.clone();
    let start = tree.position(&vb).expect("bounded vertices have positions").clone();
    let dir = edge.direction_from(&vb).neg();
    let hit = match ray_trace(base, &start, &dir) {
        Ok(RayHit::DegenerateOrigin) => return Err(Error::HitOrigin(vb)),
        Ok(hit) => hit,
        Err(Error::DegenerateRay(msg)) => return Err(Error::DegenerateRay(format!("from {vb}: {msg}"))),
        Err(e) => return Err(e),
    };

    let mut vertices: Vec<VertexId> = tree.tree().vertices().iter().cloned().collect();
    let mut edges: Vec<Edge> = tree.tree().edges().to_vec();
    let mut unbounded: Vec<VertexId> = tree.tree().unbounded().iter().cloned().collect();
    let mut positions = tree.positions().clone();

    let (new_id, increment, finished) = match hit {
        RayHit::Unbounded { cone, direction } => {
            let id = fresh_id(tree.tree(), &format!("inf{}", end.tag()));
            edges.push(Edge {
                tail: vb.clone(),
                head: id.clone(),
                cone,
                direction: direction.coords,
                length: EdgeLength::Unbounded,
            });
            unbounded.push(id.clone());
            (id, CurveClass::zero(), true)
        }
        RayHit::Wall { wall, point, length, cone, direction } => {
            let k = tree.tree().vertices().len();
            let id = fresh_id(tree.tree(), &format!("x{}_{k}", end.tag()));
            let wall_ray = if wall == cone { [Int::from(1), Int::zero()] } else { [Int::zero(), Int::from(1)] };
            let mu = wedge_lattice_length(&direction.neg().coords, &wall_ray);
            edges.push(Edge {
                tail: vb.clone(),
                head: id.clone(),
                cone,
                direction: direction.coords,
                length: EdgeLength::Finite(length),
            });
            positions.insert(id.clone(), point);
            (id, CurveClass::divisor(wall, mu), false)
        }
        RayHit::DegenerateOrigin => unreachable!(),
    };
    vertices.push(new_id.clone());
    let boundary = match end {
        End::First => (new_id, b2.clone()),
        End::Second => (b1.clone(), new_id),
    };
    let next = EmbeddedTree::new(base, ZAffineTree::new(vertices, edges, unbounded)?, boundary, positions)?;
    Ok(ExtensionStep { tree: next, increment, finished })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExtensionOrder {
    /// First, second, first, ... skipping finished ends.
    #[default]
    Alternating,
    /// Finish the first end, then the second.
    Sequential,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionResult {
    pub extended: ExtendedSpine,
    pub curve_class: CurveClass,
    pub steps: usize,
}

/// Resumable extension state, so a run can be split into several budgets.
#[derive(Debug, Clone)]
pub struct Extension {
    tree: EmbeddedTree,
    curve_class: CurveClass,
    steps: usize,
    finished: [bool; 2],
    order: ExtensionOrder,
    next: End,
}

impl Extension {
    pub fn new(base: &TropicalBase, spine: &Spine, order: ExtensionOrder) -> Result<Self> {
        let violations = validate_spine(base, spine.inner());
        if !violations.is_empty() {
            return Err(Error::InvalidSpine(violations));
        }
        Ok(Self {
            tree: spine.inner().clone(),
            curve_class: CurveClass::zero(),
            steps: 0,
            finished: [false; 2],
            order,
            next: End::First,
        })
    }

    pub fn is_done(&self) -> bool {
        self.finished.iter().all(|f| *f)
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn curve_class(&self) -> &CurveClass {
        &self.curve_class
    }

    pub fn tree(&self) -> &EmbeddedTree {
        &self.tree
    }

    fn pick_end(&self) -> End {
        let other = match self.next {
            End::First => End::Second,
            End::Second => End::First,
        };
        match self.order {
            ExtensionOrder::Sequential if !self.finished[0] => End::First,
            ExtensionOrder::Sequential => End::Second,
            ExtensionOrder::Alternating if self.finished[self.next.index()] => other,
            ExtensionOrder::Alternating => self.next,
        }
    }

    /// Runs at most `budget` more steps. Returns whether both ends are done.
    pub fn advance(&mut self, base: &TropicalBase, budget: usize) -> Result<bool> {
        for _ in 0..budget {
            if self.is_done() {
                break;
            }
            let end = self.pick_end();
            let step = extend_step(base, &self.tree, end)?;
            self.tree = step.tree;
            self.curve_class = self.curve_class.add(&step.increment);
            self.finished[end.index()] = step.finished;
            self.steps += 1;
            self.next = match end {
                End::First => End::Second,
                End::Second => End::First,
            };
        }
        Ok(self.is_done())
    }

    pub fn finish(self) -> Result<ExtensionResult> {
        if !self.is_done() {
            return Err(Error::NotExtendable { steps: self.steps });
        }
        Ok(ExtensionResult {
            extended: ExtendedSpine::new(self.tree)?,
            curve_class: self.curve_class,
            steps: self.steps,
        })
    }
}

/// Iterated extension at both ends until both are unbounded.
pub fn extend(base: &TropicalBase, spine: &Spine, max_steps: usize) -> Result<ExtensionResult> {
    extend_ordered(base, spine, max_steps, ExtensionOrder::Alternating)
}

pub fn extend_ordered(
    base: &TropicalBase,
    spine: &Spine,
    max_steps: usize,
    order: ExtensionOrder,
) -> Result<ExtensionResult> {
    let mut ext = Extension::new(base, spine, order)?;
    ext.advance(base, max_steps)?;
    ext.finish()
}

/// Adds a leg to the origin at every vertex with nonzero defect.
pub fn cylinder_in_b(base: &TropicalBase, ext: &ExtendedSpine) -> Result<CylinderB> {
    let inner = ext.inner();
    let tree = inner.tree();
    let mut vertices: Vec<VertexId> = tree.vertices().iter().cloned().collect();
    let mut edges: Vec<Edge> = tree.edges().to_vec();
    let mut positions = inner.positions().clone();
    let mut scratch = tree.clone();
    for (v, p) in inner.positions() {
        let coords = p.coords().ok_or_else(|| Error::Structural(format!("vertex {v} maps to the origin")))?;
        let sigma = inner.defect(base, v)?;
        if sigma.is_zero() {
            continue;
        }
        let s = to_q(&sigma.coords);
        let outward = crate::num::det_q(&coords, &s).is_zero() && (&coords[0] * &s[0] + &coords[1] * &s[1]).is_positive();
        if !outward {
            return Err(Error::UnbalancedNonRadial(v.clone()));
        }
        let alpha = lattice_length_q(&coords);
        let m = Q::from_integer(content(&sigma.coords));
        let id = fresh_id(&scratch, &format!("o_{v}"));
        scratch = ZAffineTree::new(
            scratch.vertices().iter().cloned().chain([id.clone()]),
            scratch.edges().iter().cloned().chain([Edge {
                tail: v.clone(),
                head: id.clone(),
                cone: sigma.cone,
                direction: sigma.neg().coords.clone(),
                length: EdgeLength::Finite(Q::from_integer(1.into())),
            }]),
            scratch.unbounded().iter().cloned(),
        )?;
        vertices.push(id.clone());
        edges.push(Edge {
            tail: v.clone(),
            head: id.clone(),
            cone: sigma.cone,
            direction: sigma.neg().coords,
            length: EdgeLength::Finite(alpha / m),
        });
        positions.insert(id, BasePoint::Origin);
    }
    let (b1, b2) = inner.boundary();
    let tree = ZAffineTree::new(vertices, edges, tree.unbounded().iter().cloned())?;
    let embedded = EmbeddedTree::new(base, tree, (b1.clone(), b2.clone()), positions)?;
    CylinderB::new(base, embedded)
}

/// The cylinder in `R x B`: the line coordinate is arclength along the path
/// from the first to the second boundary vertex, zero at the first bounded
/// vertex and constant on legs.
pub fn lift_to_tilde(base: &TropicalBase, ext: &ExtendedSpine) -> Result<CylinderBTilde> {
    let cylinder = cylinder_in_b(base, ext)?;
    let inner = cylinder.inner();
    let tree = inner.tree();
    let (b1, b2) = inner.boundary();
    let (path, path_edges) = tree
        .path(b1, b2)
        .ok_or_else(|| Error::MalformedCylinder("boundary vertices are not connected".into()))?;

    let mut slopes = vec![Int::zero(); tree.edges().len()];
    let mut heights: BTreeMap<VertexId, Q> = BTreeMap::new();
    let mut height = Q::zero();
    for (k, &ei) in path_edges.iter().enumerate() {
        let (from, to) = (&path[k], &path[k + 1]);
        let e = &tree.edges()[ei];
        slopes[ei] = if e.tail == *from { Int::from(1) } else { Int::from(-1) };
        if let EdgeLength::Finite(t) = &e.length {
            if heights.is_empty() {
                heights.insert(from.clone(), Q::zero());
            }
            height += t;
        }
        if !tree.is_unbounded(to) {
            heights.entry(to.clone()).or_insert_with(|| height.clone());
        }
    }
    if heights.is_empty() {
        // Single bounded vertex between the two rays.
        if let Some(v) = path.iter().find(|v| !tree.is_unbounded(v)) {
            heights.insert(v.clone(), Q::zero());
        }
    }
    for i in cylinder.legs() {
        let e = &tree.edges()[i];
        let (attached, origin) = if inner.position(&e.head).is_some_and(BasePoint::is_origin) {
            (&e.tail, &e.head)
        } else {
            (&e.head, &e.tail)
        };
        let h = heights
            .get(attached)
            .cloned()
            .ok_or_else(|| Error::MalformedCylinder(format!("leg attached off the path at {attached}")))?;
        heights.insert(origin.clone(), h);
    }
    CylinderBTilde::new(cylinder, slopes, heights)
}
