//! The del Pezzo base `(0,-1,0,0)` and its spine family `L(l,m,n)`.
//!
//! Points are drawn in the developing plane of the chart around wall 1, where
//! the rays `e_0, e_1, e_2, e_3` go to `(1,0), (0,1), (-1,1), (0,-1)`. The
//! identification is affine across walls 0, 1 and 2; the family never crosses
//! wall 3.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{build_base, BasePoint, LooijengaPair, TangentVector, TropicalBase};
use crate::num::{det, det_q, to_q, Int, Q};
use crate::spine::{CanonicalImage, Edge, EdgeLength, EmbeddedTree, Piece, Spine, ZAffineTree};

pub const DEL_PEZZO: [i64; 4] = [0, -1, 0, 0];

const RAYS: [[i64; 2]; 4] = [[1, 0], [0, 1], [-1, 1], [0, -1]];

pub fn del_pezzo_base() -> TropicalBase {
    build_base(LooijengaPair::new(DEL_PEZZO.to_vec()).expect("four components")).expect("valid pair")
}

pub fn is_del_pezzo(base: &TropicalBase) -> bool {
    base.pair().self_intersections() == DEL_PEZZO
}

fn ray(i: usize) -> [Int; 2] {
    let r = RAYS[i % 4];
    [Int::from(r[0]), Int::from(r[1])]
}

/// Cone coordinates of a plane vector, in the basis of cone `cone`.
fn plane_coords(cone: usize, p: &[Q; 2]) -> [Q; 2] {
    let (r0, r1) = (to_q(&ray(cone)), to_q(&ray(cone + 1)));
    [det_q(p, &r1), det_q(&r0, p)]
}

/// The cone whose closure contains a nonzero plane point, preferring the
/// cone in which it is canonical.
fn plane_cone(p: &[Q; 2]) -> usize {
    (0..4)
        .find(|&i| {
            let c = plane_coords(i, p);
            c[0].is_positive() && !c[1].is_negative()
        })
        .expect("the four cones cover the plane")
}

pub fn plane_to_point(p: &[Q; 2]) -> BasePoint {
    if p[0].is_zero() && p[1].is_zero() {
        return BasePoint::Origin;
    }
    let cone = plane_cone(p);
    let [a, b] = plane_coords(cone, p);
    BasePoint::Cone { cone, a, b }
}

pub fn point_to_plane(p: &BasePoint) -> [Q; 2] {
    match p {
        BasePoint::Origin => [Q::zero(), Q::zero()],
        BasePoint::Cone { cone, a, b } => {
            let (r0, r1) = (to_q(&ray(*cone)), to_q(&ray(cone + 1)));
            [a * &r0[0] + b * &r1[0], a * &r0[1] + b * &r1[1]]
        }
    }
}

/// A plane vector expressed in the basis of cone `cone` (all cone bases are
/// unimodular, so the result is integral).
pub fn plane_vector(cone: usize, v: [i64; 2]) -> TangentVector {
    let v = [Int::from(v[0]), Int::from(v[1])];
    TangentVector::from_coords(cone % 4, [det(&v, &ray(cone + 1)), det(&ray(cone), &v)])
}

/// The spine `L(l,m,n)`: a vertex `v0` at `(0,b)` on wall 1 with boundary
/// edges towards `v1` in direction `(-l, n-m)` and towards `v2` in direction
/// `(l, m)`. Edge lengths are chosen so both edges stay in their cone.
pub fn spine_family(l: i64, m: i64, n: i64, b: &Q) -> Result<Spine> {
    if l < 1 {
        return Err(Error::InvalidQuery(format!("l must be positive, got {l}")));
    }
    if !b.is_positive() {
        return Err(Error::InvalidQuery(format!("b must be positive, got {b}")));
    }
    let base = del_pezzo_base();
    let d1 = plane_vector(1, [-l, n - m]);
    let d2 = plane_vector(0, [l, m]);
    let t1 = b / Q::from_integer(Int::from(2 * ((n - m - l).abs() + 1)));
    let t2 = b / Q::from_integer(Int::from(2 * (m.abs() + 1)));
    let v0 = [Q::zero(), b.clone()];
    let at = |d: [i64; 2], t: &Q| plane_to_point(&[&v0[0] + t * Q::from(Int::from(d[0])), &v0[1] + t * Q::from(Int::from(d[1]))]);
    let edges = [
        Edge { tail: "v0".into(), head: "v1".into(), cone: 1, direction: d1.coords, length: EdgeLength::Finite(t1.clone()) },
        Edge { tail: "v0".into(), head: "v2".into(), cone: 0, direction: d2.coords, length: EdgeLength::Finite(t2.clone()) },
    ];
    let tree = ZAffineTree::new(["v0".into(), "v1".into(), "v2".into()], edges, [])?;
    let positions = [
        ("v0".to_string(), plane_to_point(&v0)),
        ("v1".to_string(), at([-l, n - m], &t1)),
        ("v2".to_string(), at([l, m], &t2)),
    ]
    .into_iter()
    .collect();
    Spine::new(EmbeddedTree::new(&base, tree, ("v1".into(), "v2".into()), positions)?)
}

/// `(l, m, n, b)` if the spine is in normal form `L(l,m,n)` on the del Pezzo
/// base.
pub fn match_family(base: &TropicalBase, s: &EmbeddedTree) -> Result<(i64, i64, i64, Q)> {
    if !is_del_pezzo(base) {
        return Err(Error::UnsupportedBase);
    }
    let tree = s.tree();
    if tree.vertices().len() != 3 || tree.edges().len() != 2 || !tree.unbounded().is_empty() {
        return Err(Error::NotInFamily("expected three bounded vertices and two edges".into()));
    }
    let (v1, v2) = s.boundary();
    let v0 = tree
        .vertices()
        .iter()
        .find(|v| *v != v1 && *v != v2)
        .ok_or_else(|| Error::NotInFamily("boundary vertices coincide".into()))?;
    let b = match s.position(v0) {
        Some(BasePoint::Cone { cone: 1, a, b }) if b.is_zero() => a.clone(),
        _ => return Err(Error::NotInFamily(format!("{v0} is not on wall 1"))),
    };
    let towards = |w: &str| -> Result<TangentVector> {
        let e = tree
            .incident(v0)
            .find(|e| e.touches(w))
            .ok_or_else(|| Error::NotInFamily(format!("no edge {v0}-{w}")))?;
        s.outgoing(base, v0, e)
    };
    let w2 = base.vector_in(&towards(v2)?, 0)?;
    let w1 = base.vector_in(&towards(v1)?, 1)?;
    let small = |x: &Int| i64::try_from(x).map_err(|_| Error::NotInFamily("direction out of range".into()));
    let (l, m) = (small(&w2.coords[0])?, small(&w2.coords[1])?);
    if l < 1 {
        return Err(Error::NotInFamily(format!("direction towards {v2} is {w2}, need l >= 1")));
    }
    let n = small(&w1.coords[0])? + m + l;
    if w1.coords[1] != Int::from(l) {
        return Err(Error::NotInFamily(format!("direction towards {v1} is {w1}, expected second coordinate {l}")));
    }
    Ok((l, m, n, b))
}

/// The tropicalization of the explicit family at `val s = t`: the plane point
/// `(l t, b + m t - n min(0, t))`.
pub fn tropical_trace(l: i64, m: i64, n: i64, b: &Q, t: &Q) -> BasePoint {
    let qi = |k: i64| Q::from(Int::from(k));
    let neg = if t.is_negative() { t.clone() } else { Q::zero() };
    plane_to_point(&[qi(l) * t, b + qi(m) * t - qi(n) * neg])
}

/// Canonical image of the trace: the two plane rays from `(0,b)`, cut where
/// they cross the cone rays.
pub fn trace_image(l: i64, m: i64, n: i64, b: &Q) -> Result<CanonicalImage> {
    let base = del_pezzo_base();
    let start = [Q::zero(), b.clone()];
    let mut pieces = Vec::new();
    for d in [[l, m], [-l, n - m]] {
        let dq = [Q::from(Int::from(d[0])), Q::from(Int::from(d[1]))];
        let at = |s: &Q| [&start[0] + s * &dq[0], &start[1] + s * &dq[1]];
        // Parameters s > 0 where the ray meets a cone ray r: start + s d = r t.
        let mut cuts: Vec<Q> = (0..4)
            .filter_map(|i| {
                let r = to_q(&ray(i));
                let den = det_q(&dq, &r);
                if den.is_zero() {
                    return None;
                }
                let s = -det_q(&start, &r) / &den;
                let p = at(&s);
                let along = &p[0] * &r[0] + &p[1] * &r[1];
                (s.is_positive() && !along.is_negative()).then_some(s)
            })
            .collect();
        cuts.sort();
        cuts.dedup();
        let mut s0 = Q::zero();
        for s1 in cuts {
            let p1 = at(&s1);
            if p1[0].is_zero() && p1[1].is_zero() {
                return Err(Error::HitOrigin("trace".into()));
            }
            let mid = at(&((&s0 + &s1) / Q::from(Int::from(2))));
            let cone = plane_cone(&mid);
            pieces.push(Piece::Segment { cone, start: plane_coords(cone, &at(&s0)), end: plane_coords(cone, &p1) });
            s0 = s1;
        }
        let beyond = at(&(&s0 + Q::from(Int::from(1))));
        let cone = plane_cone(&beyond);
        pieces.push(Piece::Ray { cone, start: plane_coords(cone, &at(&s0)), direction: plane_vector(cone, d).coords });
    }
    CanonicalImage::from_pieces(&base, pieces)
}
