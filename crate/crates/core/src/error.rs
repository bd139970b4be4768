use thiserror::Error;

use crate::spine::Violation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid Looijenga pair: {0}")]
    InvalidPair(String),
    #[error("point or vector lies outside the chart around wall {wall}")]
    OutOfChart { wall: usize },
    #[error("the origin is not in the domain of any chart")]
    OriginNotInChart,
    #[error("vector has home cone {found}, expected {expected}")]
    WrongHomeCone { expected: usize, found: usize },
    #[error("zero vector")]
    ZeroVector,
    #[error("structural error: {0}")]
    Structural(String),
    #[error("balancing is undefined at a vertex mapped to the origin ({0})")]
    OriginVertex(String),
    #[error("malformed cylinder: {0}")]
    MalformedCylinder(String),
    #[error("degenerate ray: {0}")]
    DegenerateRay(String),
    #[error("ray from vertex {0} hits the origin")]
    HitOrigin(String),
    #[error("spine not extendable within {steps} steps")]
    NotExtendable { steps: usize },
    #[error("spine is invalid ({} violation(s))", .0.len())]
    InvalidSpine(Vec<Violation>),
    #[error("vertex {0} has a defect that is neither zero nor pointing to the origin")]
    UnbalancedNonRadial(String),
    #[error("invalid count query: {0}")]
    InvalidQuery(String),
    #[error("counting is only supported on the base (0,-1,0,0)")]
    UnsupportedBase,
    #[error("spine is not of the form L(l,m,n): {0}")]
    NotInFamily(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
