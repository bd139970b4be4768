//! JSON file formats and reports. Objects are `serde_json::Map`s, which keep
//! keys sorted, and rationals are written as `"p/q"` strings, so identical
//! inputs give byte-identical output.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::count::{binomial_oracle, count, symmetry_check, CountQuery};
use crate::error::{Error, Result};
use crate::extension::ExtensionResult;
use crate::family::{point_to_plane, tropical_trace};
use crate::lattice::{fan_closure, intersection_matrix, is_positive, BasePoint, CurveClass, LooijengaPair, TropicalBase};
use crate::num::{format_q, parse_q, Q};
use crate::spine::{CylinderB, Edge, EdgeLength, EmbeddedTree, Violation, ZAffineTree};

#[derive(Debug, Deserialize)]
struct PairFile {
    self_intersections: Vec<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum VertexJson {
    Cone { id: String, cone: usize, coords: [String; 2] },
    Origin { id: String, origin: bool },
    Unbounded { id: String, unbounded: bool },
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum IntJson {
    Num(i64),
    Text(String),
}

impl IntJson {
    fn value(&self) -> Result<BigInt> {
        match self {
            IntJson::Num(v) => Ok(BigInt::from(*v)),
            IntJson::Text(s) => s.trim().parse().map_err(|_| Error::Parse(format!("not an integer: {s:?}"))),
        }
    }
}

#[derive(Debug, Deserialize)]
struct EdgeJson {
    tail: String,
    head: String,
    cone: usize,
    direction: [IntJson; 2],
    length: String,
}

#[derive(Debug, Deserialize)]
struct SpineFile {
    vertices: Vec<VertexJson>,
    edges: Vec<EdgeJson>,
    boundary: [String; 2],
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn parse_pair(text: &str) -> Result<LooijengaPair> {
    let f: PairFile = serde_json::from_str(text).map_err(parse_err)?;
    LooijengaPair::new(f.self_intersections)
}

/// Reads a spine file. Vertex coordinates are canonicalized, so a wall point
/// may be given from either adjacent cone.
pub fn parse_spine(base: &TropicalBase, text: &str) -> Result<EmbeddedTree> {
    let f: SpineFile = serde_json::from_str(text).map_err(parse_err)?;
    let mut ids = Vec::new();
    let mut unbounded = Vec::new();
    let mut positions = BTreeMap::new();
    for v in f.vertices {
        match v {
            VertexJson::Cone { id, cone, coords } => {
                let p = base.point(cone, parse_q(&coords[0])?, parse_q(&coords[1])?)?;
                positions.insert(id.clone(), p);
                ids.push(id);
            }
            VertexJson::Origin { id, origin: true } => {
                positions.insert(id.clone(), BasePoint::Origin);
                ids.push(id);
            }
            VertexJson::Unbounded { id, unbounded: true } => {
                unbounded.push(id.clone());
                ids.push(id);
            }
            VertexJson::Origin { id, .. } | VertexJson::Unbounded { id, .. } => {
                return Err(Error::Parse(format!("vertex {id} has neither a position nor a true flag")))
            }
        }
    }
    let edges = f
        .edges
        .into_iter()
        .map(|e| {
            let length = match e.length.trim() {
                "unbounded" => EdgeLength::Unbounded,
                s => EdgeLength::Finite(parse_q(s)?),
            };
            Ok(Edge { tail: e.tail, head: e.head, cone: e.cone, direction: [e.direction[0].value()?, e.direction[1].value()?], length })
        })
        .collect::<Result<Vec<_>>>()?;
    let [b1, b2] = f.boundary;
    EmbeddedTree::new(base, ZAffineTree::new(ids, edges, unbounded)?, (b1, b2), positions)
}

fn int_json(v: &BigInt) -> Value {
    i64::try_from(v).map(Value::from).unwrap_or_else(|_| Value::String(v.to_string()))
}

pub fn uint_json(v: &BigUint) -> Value {
    u64::try_from(v).map(Value::from).unwrap_or_else(|_| Value::String(v.to_string()))
}

fn q_pair(p: &[Q; 2]) -> Value {
    json!([format_q(&p[0]), format_q(&p[1])])
}

pub fn point_json(p: &BasePoint) -> Value {
    match p {
        BasePoint::Origin => json!({"origin": true}),
        BasePoint::Cone { cone, a, b } => json!({"cone": cone, "coords": [format_q(a), format_q(b)]}),
    }
}

/// Writes a tree in the spine file format; `legs` adds the list of leg edges.
pub fn spine_json(s: &EmbeddedTree, legs: Option<&[usize]>) -> Value {
    let tree = s.tree();
    let vertices: Vec<Value> = tree
        .vertices()
        .iter()
        .map(|id| match s.position(id) {
            Some(BasePoint::Origin) => json!({"id": id, "origin": true}),
            Some(BasePoint::Cone { cone, a, b }) => json!({"id": id, "cone": cone, "coords": [format_q(a), format_q(b)]}),
            None => json!({"id": id, "unbounded": true}),
        })
        .collect();
    let edge = |e: &Edge| {
        json!({
            "tail": e.tail,
            "head": e.head,
            "cone": e.cone,
            "direction": [int_json(&e.direction[0]), int_json(&e.direction[1])],
            "length": match &e.length {
                EdgeLength::Finite(t) => Value::String(format_q(t)),
                EdgeLength::Unbounded => Value::String("unbounded".into()),
            },
        })
    };
    let (b1, b2) = s.boundary();
    let mut out = json!({
        "vertices": vertices,
        "edges": tree.edges().iter().map(edge).collect::<Vec<_>>(),
        "boundary": [b1, b2],
    });
    if let Some(legs) = legs {
        out["legs"] = legs.iter().map(|&i| edge(&tree.edges()[i])).collect();
    }
    out
}

pub fn curve_class_json(c: &CurveClass) -> Value {
    Value::Object(c.iter().map(|(i, mu)| (format!("D_{i}"), uint_json(mu))).collect())
}

pub fn base_report(base: &TropicalBase) -> Value {
    let pair = base.pair();
    let mono = base.monodromy();
    let matrix = |m: &[[BigInt; 2]; 2]| json!(m.iter().map(|r| r.iter().map(int_json).collect::<Vec<_>>()).collect::<Vec<_>>());
    json!({
        "self_intersections": pair.self_intersections(),
        "cones": base.len(),
        "walls": base.len(),
        "monodromy": matrix(&mono.0),
        "monodromy_trace": int_json(&mono.trace()),
        "monodromy_identity": mono.is_identity(),
        "fan_closure": fan_closure(pair).map(|vs| vs.iter().map(|v| json!([int_json(&v[0]), int_json(&v[1])])).collect::<Vec<_>>()),
        "intersection_matrix": intersection_matrix(pair),
        "positive": is_positive(pair),
    })
}

pub fn violation_json(v: &Violation) -> Value {
    json!({
        "condition": v.condition.name(),
        "vertex": v.vertex,
        "edge": v.edge.as_ref().map(|(a, b)| json!([a, b])),
        "detail": v.detail,
    })
}

pub fn validate_report(violations: &[Violation]) -> Value {
    json!({
        "valid": violations.is_empty(),
        "violations": violations.iter().map(violation_json).collect::<Vec<_>>(),
    })
}

pub fn extend_report(result: &ExtensionResult, cylinder: &CylinderB) -> Value {
    json!({
        "extendable": true,
        "steps": result.steps,
        "curve_class": curve_class_json(&result.curve_class),
        "extended_spine": spine_json(result.extended.inner(), None),
        "cylinder": spine_json(cylinder.inner(), Some(&cylinder.legs())),
    })
}

pub fn count_report(q: CountQuery) -> Result<Value> {
    let c = count(q)?;
    let oracle = binomial_oracle(q.l, q.n)?;
    Ok(json!({
        "l": q.l,
        "m": q.m,
        "n": q.n,
        "count": uint_json(&c),
        "oracle": oracle,
        "match": c == BigUint::from(oracle),
        "symmetry": symmetry_check(q)?,
    }))
}

pub fn trace_report(l: i64, m: i64, n: i64, b: &Q, ts: &[Q]) -> Value {
    let points: Vec<Value> = ts
        .iter()
        .map(|t| {
            let p = tropical_trace(l, m, n, b, t);
            json!({"t": format_q(t), "point": point_json(&p), "plane": q_pair(&point_to_plane(&p))})
        })
        .collect();
    json!({"l": l, "m": m, "n": n, "b": format_q(b), "points": points})
}

pub fn table_report(rows: &[(i64, Vec<Vec<BigUint>>)], l_max: i64) -> Value {
    let tables: Vec<Value> = rows
        .iter()
        .map(|(m, t)| {
            json!({
                "m": m,
                "rows": t.iter().map(|r| r.iter().map(uint_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({"l_max": l_max, "tables": tables})
}

pub fn error_json(e: &Error) -> Value {
    let kind = match e {
        Error::InvalidPair(_) => "invalid_pair",
        Error::OutOfChart { .. } => "out_of_chart",
        Error::OriginNotInChart => "origin_not_in_chart",
        Error::WrongHomeCone { .. } => "wrong_home_cone",
        Error::ZeroVector => "zero_vector",
        Error::Structural(_) => "structural",
        Error::OriginVertex(_) => "origin_vertex",
        Error::MalformedCylinder(_) => "malformed_cylinder",
        Error::DegenerateRay(_) => "degenerate_ray",
        Error::HitOrigin(_) => "hit_origin",
        Error::NotExtendable { .. } => "not_extendable",
        Error::InvalidSpine(_) => "invalid_spine",
        Error::UnbalancedNonRadial(_) => "unbalanced_non_radial",
        Error::InvalidQuery(_) => "invalid_query",
        Error::UnsupportedBase => "unsupported_base",
        Error::NotInFamily(_) => "not_in_family",
        Error::Parse(_) => "parse",
    };
    let mut out = json!({"error": kind, "message": e.to_string()});
    match e {
        Error::InvalidSpine(vs) => out["violations"] = vs.iter().map(violation_json).collect(),
        Error::NotExtendable { steps } => {
            out["extendable"] = Value::Bool(false);
            out["steps"] = Value::from(*steps);
        }
        _ => {}
    }
    out
}

/// Whether an error means the input itself is malformed, as opposed to a
/// well-formed input on which the computation fails.
pub fn is_input_error(e: &Error) -> bool {
    matches!(e, Error::Parse(_) | Error::Structural(_) | Error::InvalidPair(_) | Error::ZeroVector)
}
