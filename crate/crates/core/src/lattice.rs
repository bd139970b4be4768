//! Integral affine geometry of the tropical base of a Looijenga pair.
//!
//! The base is a complete fan of `l` two-dimensional cones glued cyclically
//! along rays. Cone `i` is spanned by the primitive ray generators `e_i` and
//! `e_{i+1}` and wall `i` is the ray `R_{>=0} e_i`, shared by cones `i-1` and
//! `i`. Points and tangent vectors are always written in the coordinates of a
//! single cone; crossing a wall re-expresses vectors through the chart around
//! that wall, which is determined by the self-intersection `D_i^2`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::num::{det, int, q_from_int, Int, Q};

/// Cyclic list of boundary self-intersection numbers `D_i^2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LooijengaPair {
    self_intersections: Vec<i64>,
}

impl LooijengaPair {
    pub fn new(self_intersections: Vec<i64>) -> Result<Self> {
        if self_intersections.len() < 3 {
            return Err(Error::InvalidPair(format!(
                "the boundary cycle needs at least 3 components, got {}",
                self_intersections.len()
            )));
        }
        Ok(Self { self_intersections })
    }

    pub fn len(&self) -> usize {
        self.self_intersections.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `D_i^2` with `i` read modulo `l`.
    pub fn self_intersection(&self, i: isize) -> i64 {
        self.self_intersections[self.wrap(i)]
    }

    pub fn self_intersections(&self) -> &[i64] {
        &self.self_intersections
    }

    pub fn wrap(&self, i: isize) -> usize {
        i.rem_euclid(self.len() as isize) as usize
    }
}

impl fmt::Display for LooijengaPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.self_intersections.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cone {
    pub index: usize,
    /// The two walls bounding the cone, `(i, i+1)`.
    pub walls: (usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Wall {
    pub index: usize,
    /// The two cones sharing the wall, `(i-1, i)`.
    pub cones: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropicalBase {
    pair: LooijengaPair,
}

pub fn build_base(pair: LooijengaPair) -> Result<TropicalBase> {
    TropicalBase::new(pair)
}

/// A point of the base. Wall points are stored in the higher-indexed adjacent
/// cone as `(a, 0)`, which makes the representation unique.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasePoint {
    Origin,
    Cone { cone: usize, a: Q, b: Q },
}

impl BasePoint {
    pub fn is_origin(&self) -> bool {
        matches!(self, BasePoint::Origin)
    }

    /// The canonical home cone, `None` for the origin.
    pub fn cone(&self) -> Option<usize> {
        match self {
            BasePoint::Origin => None,
            BasePoint::Cone { cone, .. } => Some(*cone),
        }
    }

    /// Index of the wall containing the point, if any.
    pub fn wall(&self) -> Option<usize> {
        match self {
            BasePoint::Cone { cone, b, .. } if b.is_zero() => Some(*cone),
            _ => None,
        }
    }

    pub fn coords(&self) -> Option<[Q; 2]> {
        match self {
            BasePoint::Origin => None,
            BasePoint::Cone { a, b, .. } => Some([a.clone(), b.clone()]),
        }
    }
}

impl fmt::Display for BasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasePoint::Origin => write!(f, "O"),
            BasePoint::Cone { cone, a, b } => write!(f, "cone {cone} ({a}, {b})"),
        }
    }
}

/// An integral tangent vector `u e_i + v e_{i+1}` in the coordinates of cone `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TangentVector {
    pub cone: usize,
    pub coords: [Int; 2],
}

impl TangentVector {
    pub fn new(cone: usize, u: i64, v: i64) -> Self {
        Self { cone, coords: [int(u), int(v)] }
    }

    pub fn from_coords(cone: usize, coords: [Int; 2]) -> Self {
        Self { cone, coords }
    }

    pub fn is_zero(&self) -> bool {
        self.coords[0].is_zero() && self.coords[1].is_zero()
    }

    pub fn neg(&self) -> Self {
        Self { cone: self.cone, coords: [-&self.coords[0], -&self.coords[1]] }
    }

    pub fn add(&self, other: &[Int; 2]) -> Self {
        Self {
            cone: self.cone,
            coords: [&self.coords[0] + &other[0], &self.coords[1] + &other[1]],
        }
    }
}

impl fmt::Display for TangentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cone {} ({}, {})", self.cone, self.coords[0], self.coords[1])
    }
}

/// Row-major 2x2 integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix2(pub [[Int; 2]; 2]);

impl IntMatrix2 {
    pub fn identity() -> Self {
        Self([[Int::one(), Int::zero()], [Int::zero(), Int::one()]])
    }

    pub fn from_i64(m: [[i64; 2]; 2]) -> Self {
        Self([[int(m[0][0]), int(m[0][1])], [int(m[1][0]), int(m[1][1])]])
    }

    pub fn mul(&self, rhs: &IntMatrix2) -> IntMatrix2 {
        let a = &self.0;
        let b = &rhs.0;
        let entry = |r: usize, c: usize| &a[r][0] * &b[0][c] + &a[r][1] * &b[1][c];
        IntMatrix2([[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]])
    }

    pub fn apply(&self, v: &[Int; 2]) -> [Int; 2] {
        let m = &self.0;
        [&m[0][0] * &v[0] + &m[0][1] * &v[1], &m[1][0] * &v[0] + &m[1][1] * &v[1]]
    }

    pub fn det(&self) -> Int {
        let m = &self.0;
        &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]
    }

    pub fn trace(&self) -> Int {
        &self.0[0][0] + &self.0[1][1]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }
}

/// Nonnegative combination of boundary classes `[D_i]`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct CurveClass {
    coefficients: BTreeMap<usize, BigUint>,
}

impl CurveClass {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn divisor(i: usize, mu: BigUint) -> Self {
        let mut c = Self::zero();
        c.add_divisor(i, mu);
        c
    }

    pub fn add_divisor(&mut self, i: usize, mu: BigUint) {
        if mu.is_zero() {
            return;
        }
        *self.coefficients.entry(i).or_default() += mu;
    }

    pub fn add(&self, other: &CurveClass) -> CurveClass {
        let mut out = self.clone();
        for (i, c) in &other.coefficients {
            out.add_divisor(*i, c.clone());
        }
        out
    }

    pub fn coefficient(&self, i: usize) -> BigUint {
        self.coefficients.get(&i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &BigUint)> {
        self.coefficients.iter().map(|(i, c)| (*i, c))
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.iter().map(|(i, c)| format!("{c}[D_{i}]")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Either a point or a tangent vector, the two things a chart accepts.
#[derive(Debug, Clone)]
pub enum ChartInput<'a> {
    Point(&'a BasePoint),
    Vector(&'a TangentVector),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChartImage {
    Point([Q; 2]),
    Vector([Int; 2]),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Crossing {
    /// From cone `i-1` into cone `i`.
    Forward,
    /// From cone `i` into cone `i-1`.
    Backward,
}

impl TropicalBase {
    pub fn new(pair: LooijengaPair) -> Result<Self> {
        Ok(Self { pair })
    }

    pub fn pair(&self) -> &LooijengaPair {
        &self.pair
    }

    pub fn len(&self) -> usize {
        self.pair.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn wrap(&self, i: isize) -> usize {
        self.pair.wrap(i)
    }

    pub fn next(&self, i: usize) -> usize {
        self.wrap(i as isize + 1)
    }

    pub fn prev(&self, i: usize) -> usize {
        self.wrap(i as isize - 1)
    }

    pub fn cones(&self) -> Vec<Cone> {
        (0..self.len()).map(|i| Cone { index: i, walls: (i, self.next(i)) }).collect()
    }

    pub fn walls(&self) -> Vec<Wall> {
        (0..self.len()).map(|i| Wall { index: i, cones: (self.prev(i), i) }).collect()
    }

    fn check_cone(&self, cone: usize) -> Result<()> {
        if cone >= self.len() {
            return Err(Error::Structural(format!(
                "cone index {cone} out of range for l = {}",
                self.len()
            )));
        }
        Ok(())
    }

    /// Builds the canonical point `a e_i + b e_{i+1}` of cone `i`.
    pub fn point(&self, cone: usize, a: Q, b: Q) -> Result<BasePoint> {
        self.check_cone(cone)?;
        if a.is_negative() || b.is_negative() {
            return Err(Error::Structural(format!(
                "cone coordinates must be nonnegative, got ({a}, {b})"
            )));
        }
        match (a.is_zero(), b.is_zero()) {
            (true, true) => Err(Error::Structural(
                "cone coordinates (0, 0) denote the origin".into(),
            )),
            (true, false) => Ok(BasePoint::Cone { cone: self.next(cone), a: b, b: Q::zero() }),
            _ => Ok(BasePoint::Cone { cone, a, b }),
        }
    }

    /// The point with coordinates `(a, b)` in cone `cone`, or the origin when
    /// both vanish.
    pub fn point_or_origin(&self, cone: usize, a: Q, b: Q) -> Result<BasePoint> {
        if a.is_zero() && b.is_zero() {
            self.check_cone(cone)?;
            return Ok(BasePoint::Origin);
        }
        self.point(cone, a, b)
    }

    /// Coordinates of `p` in the closed cone `cone`, if `p` lies there.
    pub fn coords_in(&self, p: &BasePoint, cone: usize) -> Option<[Q; 2]> {
        match p {
            BasePoint::Origin => Some([Q::zero(), Q::zero()]),
            BasePoint::Cone { cone: c, a, b } => {
                if *c == cone {
                    Some([a.clone(), b.clone()])
                } else if b.is_zero() && self.next(cone) == *c {
                    Some([Q::zero(), a.clone()])
                } else {
                    None
                }
            }
        }
    }

    /// Matrix sending cone `i-1` coordinates to cone `i` coordinates across wall
    /// `i`: `(u, v) -> (v - u D_i^2, -u)`.
    pub fn forward_matrix(&self, wall: usize) -> IntMatrix2 {
        let d = self.pair.self_intersection(wall as isize);
        IntMatrix2::from_i64([[-d, 1], [-1, 0]])
    }

    pub fn backward_matrix(&self, wall: usize) -> IntMatrix2 {
        let d = self.pair.self_intersection(wall as isize);
        IntMatrix2::from_i64([[0, -1], [1, -d]])
    }

    pub fn transport(&self, v: &TangentVector, wall: usize, crossing: Crossing) -> Result<TangentVector> {
        self.check_cone(wall)?;
        let (from, to, m) = match crossing {
            Crossing::Forward => (self.prev(wall), wall, self.forward_matrix(wall)),
            Crossing::Backward => (wall, self.prev(wall), self.backward_matrix(wall)),
        };
        if v.cone != from {
            return Err(Error::WrongHomeCone { expected: from, found: v.cone });
        }
        Ok(TangentVector { cone: to, coords: m.apply(&v.coords) })
    }

    /// Re-expresses `v` in the coordinates of `cone`, which must equal or be
    /// adjacent to the home cone of `v`.
    pub fn vector_in(&self, v: &TangentVector, cone: usize) -> Result<TangentVector> {
        if v.cone == cone {
            Ok(v.clone())
        } else if self.next(v.cone) == cone {
            self.transport(v, cone, Crossing::Forward)
        } else if self.prev(v.cone) == cone {
            self.transport(v, v.cone, Crossing::Backward)
        } else {
            Err(Error::WrongHomeCone { expected: cone, found: v.cone })
        }
    }

    /// The chart around wall `i`: linear on each of the cones `i-1`, `i`,
    /// sending `e_{i-1}, e_i, e_{i+1}` to `(1,0), (0,1), (-1,-D_i^2)`.
    pub fn chart_psi(&self, wall: usize, input: ChartInput<'_>) -> Result<ChartImage> {
        self.check_cone(wall)?;
        let d = self.pair.self_intersection(wall as isize);
        let before = self.prev(wall);
        match input {
            ChartInput::Point(p) => {
                if p.is_origin() {
                    return Err(Error::OriginNotInChart);
                }
                if let Some([a, b]) = self.coords_in(p, before) {
                    return Ok(ChartImage::Point([a, b]));
                }
                if let Some([a, b]) = self.coords_in(p, wall) {
                    let dq = Q::from_integer(int(d));
                    return Ok(ChartImage::Point([-b.clone(), a - dq * b]));
                }
                Err(Error::OutOfChart { wall })
            }
            ChartInput::Vector(v) => {
                let [u, w] = &v.coords;
                if v.cone == before {
                    Ok(ChartImage::Vector([u.clone(), w.clone()]))
                } else if v.cone == wall {
                    Ok(ChartImage::Vector([-w.clone(), u - int(d) * w]))
                } else {
                    Err(Error::OutOfChart { wall })
                }
            }
        }
    }

    /// Product of the forward transports once around the origin, starting and
    /// ending in cone 0.
    pub fn monodromy(&self) -> IntMatrix2 {
        let mut m = IntMatrix2::identity();
        for step in 1..=self.len() {
            let wall = self.wrap(step as isize);
            m = self.forward_matrix(wall).mul(&m);
        }
        m
    }

    /// Squared norm of `v` in the ambient `R^l` spanned by the `e_i`.
    pub fn norm_sq(&self, v: &TangentVector) -> Result<Q> {
        self.check_cone(v.cone)?;
        if v.is_zero() {
            return Err(Error::ZeroVector);
        }
        let [u, w] = &v.coords;
        Ok(q_from_int(&(u * u + w * w)))
    }
}

/// `|det(v, w)|`.
pub fn wedge_lattice_length(v: &[Int; 2], w: &[Int; 2]) -> BigUint {
    det(v, w).abs().to_biguint().expect("absolute value is nonnegative")
}

/// Runs the toric fan recurrence `v_{i+1} = -v_{i-1} - D_i^2 v_i` from
/// `v_0 = (1,0)`, `v_1 = (0,1)`. Returns the rays when the sequence closes up
/// and winds exactly once counterclockwise around the origin.
pub fn fan_closure(pair: &LooijengaPair) -> Option<Vec<[Int; 2]>> {
    let (rays, winding) = fan_recurrence(pair);
    (winding == Some(1)).then(|| rays[..pair.len()].to_vec())
}

/// The `l + 2` recurrence vectors and, if they close up, the winding number.
pub fn fan_recurrence(pair: &LooijengaPair) -> (Vec<[Int; 2]>, Option<usize>) {
    let l = pair.len();
    let mut rays: Vec<[Int; 2]> = vec![[int(1), int(0)], [int(0), int(1)]];
    for i in 1..=l {
        let d = int(pair.self_intersection(i as isize));
        let prev = &rays[i - 1];
        let cur = &rays[i];
        let next = [-&prev[0] - &d * &cur[0], -&prev[1] - &d * &cur[1]];
        rays.push(next);
    }
    if rays[l] != rays[0] || rays[l + 1] != rays[1] {
        return (rays, None);
    }
    // det(v_i, v_{i+1}) = 1 for every i, so each step turns counterclockwise by
    // less than pi; count upward crossings of the positive x-axis.
    let upper = |v: &[Int; 2]| v[1].is_positive() || (v[1].is_zero() && v[0].is_positive());
    let winding = (0..l).filter(|&i| !upper(&rays[i]) && upper(&rays[i + 1])).count();
    (rays, Some(winding))
}

/// `(D_i . D_j)`: `D_i^2` on the diagonal, 1 between cyclic neighbours.
pub fn intersection_matrix(pair: &LooijengaPair) -> Vec<Vec<i64>> {
    let l = pair.len();
    let mut m = vec![vec![0; l]; l];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = pair.self_intersection(i as isize);
        row[pair.wrap(i as isize + 1)] = 1;
        row[pair.wrap(i as isize - 1)] = 1;
    }
    m
}

/// True iff the intersection matrix is not negative semi-definite, decided by
/// checking every principal minor of `-M`.
pub fn is_positive(pair: &LooijengaPair) -> bool {
    let m = intersection_matrix(pair);
    let l = m.len();
    for mask in 1u64..(1u64 << l) {
        let idx: Vec<usize> = (0..l).filter(|i| mask & (1 << i) != 0).collect();
        let sub: Vec<Vec<Int>> = idx
            .iter()
            .map(|&r| idx.iter().map(|&c| int(-m[r][c])).collect())
            .collect();
        if determinant(sub).is_negative() {
            return true;
        }
    }
    false
}

/// Fraction-free (Bareiss) determinant.
pub fn determinant(mut a: Vec<Vec<Int>>) -> Int {
    let n = a.len();
    if n == 0 {
        return Int::one();
    }
    let mut sign = Int::one();
    let mut prev = Int::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return Int::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}
