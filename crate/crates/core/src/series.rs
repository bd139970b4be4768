//! Laurent polynomials in `x, y` over the rationals, truncated in `y`, and the
//! focus-focus automorphism `x -> x(1+y)`, `y -> y`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::num::Q;

/// A sparse series `sum c_{ij} x^i y^j`. With `truncation = Some(N)` only the
/// terms with `j <= N` are known (and stored); `None` means exact.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SparseLaurentSeries {
    terms: BTreeMap<(i64, i64), Q>,
    truncation: Option<i64>,
}

impl SparseLaurentSeries {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0)
    }

    pub fn monomial(i: i64, j: i64) -> Self {
        Self::term(i, j, Q::one())
    }

    pub fn term(i: i64, j: i64, c: Q) -> Self {
        Self::from_terms([((i, j), c)])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((i64, i64), Q)>) -> Self {
        let mut s = Self::zero();
        for (k, c) in terms {
            s.add_term(k, c);
        }
        s
    }

    fn add_term(&mut self, k: (i64, i64), c: Q) {
        if c.is_zero() || self.truncation.is_some_and(|n| k.1 > n) {
            return;
        }
        let slot = self.terms.entry(k).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&k);
        }
    }

    /// Drops terms above `y^n`.
    pub fn truncated(mut self, n: i64) -> Self {
        let n = self.truncation.map_or(n, |t| t.min(n));
        self.terms.retain(|k, _| k.1 <= n);
        self.truncation = Some(n);
        self
    }

    pub fn truncation(&self) -> Option<i64> {
        self.truncation
    }

    pub fn is_exact(&self) -> bool {
        self.truncation.is_none()
    }

    pub fn coefficient(&self, i: i64, j: i64) -> Q {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &Q)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest power of `y` present, if any.
    fn y_valuation(&self) -> Option<i64> {
        self.terms.keys().map(|k| k.1).min()
    }
}

fn min_trunc(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, None) => a,
        (None, b) => b,
    }
}

impl Add for &SparseLaurentSeries {
    type Output = SparseLaurentSeries;

    fn add(self, rhs: &SparseLaurentSeries) -> SparseLaurentSeries {
        let mut out = SparseLaurentSeries { terms: BTreeMap::new(), truncation: min_trunc(self.truncation, rhs.truncation) };
        for (k, c) in self.terms.iter().chain(rhs.terms.iter()) {
            out.add_term(*k, c.clone());
        }
        out
    }
}

impl Neg for &SparseLaurentSeries {
    type Output = SparseLaurentSeries;

    fn neg(self) -> SparseLaurentSeries {
        SparseLaurentSeries {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
            truncation: self.truncation,
        }
    }
}

impl Sub for &SparseLaurentSeries {
    type Output = SparseLaurentSeries;

    fn sub(self, rhs: &SparseLaurentSeries) -> SparseLaurentSeries {
        self + &(-rhs)
    }
}

impl Mul for &SparseLaurentSeries {
    type Output = SparseLaurentSeries;

    /// A product is known up to `y^(N_f + v_g)` and `y^(N_g + v_f)`, where `v`
    /// is the lowest power of `y` present.
    fn mul(self, rhs: &SparseLaurentSeries) -> SparseLaurentSeries {
        let bound = |n: Option<i64>, other: &SparseLaurentSeries| match (n, other.y_valuation()) {
            (Some(n), Some(v)) => Some(n + v),
            _ => None,
        };
        let truncation = if self.is_zero() || rhs.is_zero() {
            min_trunc(self.truncation, rhs.truncation)
        } else {
            min_trunc(bound(self.truncation, rhs), bound(rhs.truncation, self))
        };
        let mut out = SparseLaurentSeries { terms: BTreeMap::new(), truncation };
        for ((i1, j1), c1) in &self.terms {
            for ((i2, j2), c2) in &rhs.terms {
                out.add_term((i1 + i2, j1 + j2), c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for SparseLaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (k, ((i, j), c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            if *i != 0 {
                write!(f, "*x^{i}")?;
            }
            if *j != 0 {
                write!(f, "*y^{j}")?;
            }
        }
        if let Some(n) = self.truncation {
            write!(f, " + O(y^{})", n + 1)?;
        }
        Ok(())
    }
}

/// The generalized binomial coefficient `a (a-1) ... (a-k+1) / k!`.
pub fn binomial(a: i64, k: u64) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(a) - BigInt::from(i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// `x^a y^b (1+y)^e`, expanded up to `y^n`. The expansion is finite when
/// `e >= 0`.
fn shifted_power(a: i64, b: i64, e: i64, n: i64, out: &mut SparseLaurentSeries) -> bool {
    let mut dropped = false;
    let mut k = 0u64;
    loop {
        if e >= 0 && k as i64 > e {
            break;
        }
        let j = b + k as i64;
        if j > n {
            dropped = true;
            break;
        }
        out.add_term((a, j), Q::from_integer(binomial(e, k)));
        k += 1;
    }
    dropped
}

fn substitute(s: &SparseLaurentSeries, n: i64, sign: i64) -> SparseLaurentSeries {
    let mut out = SparseLaurentSeries::zero();
    let mut dropped = false;
    for ((a, b), c) in &s.terms {
        let mut piece = SparseLaurentSeries::zero();
        dropped |= shifted_power(*a, *b, sign * a, n, &mut piece);
        for (k, v) in piece.terms {
            out.add_term(k, v * c);
        }
    }
    // The substitution only raises powers of y, so a known range stays known.
    out.truncation = match (dropped, s.truncation) {
        (true, t) => Some(t.map_or(n, |t| t.min(n))),
        (false, t) => t,
    };
    if let Some(t) = out.truncation {
        out.terms.retain(|k, _| k.1 <= t);
    }
    out
}

/// `phi`: `x^a y^b -> x^a y^b (1+y)^a`, expanded up to `y^n`.
pub fn focus_focus_apply(s: &SparseLaurentSeries, n: i64) -> SparseLaurentSeries {
    substitute(s, n, 1)
}

/// `phi^{-1}`: `x^a y^b -> x^a y^b (1+y)^{-a}`, expanded up to `y^n`.
pub fn focus_focus_inverse(s: &SparseLaurentSeries, n: i64) -> SparseLaurentSeries {
    substitute(s, n, -1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::q;

    fn s(terms: &[((i64, i64), i64)]) -> SparseLaurentSeries {
        SparseLaurentSeries::from_terms(terms.iter().map(|(k, c)| (*k, q(*c))))
    }

    #[test]
    fn arithmetic_examples() {
        let x = SparseLaurentSeries::monomial(1, 0);
        let y = SparseLaurentSeries::monomial(0, 1);
        assert_eq!(&x * &y, SparseLaurentSeries::monomial(1, 1));
        let p = s(&[((0, 0), 1), ((0, 1), 1)]);
        let m = s(&[((0, 0), 1), ((0, 1), -1)]);
        assert_eq!(&p * &m, s(&[((0, 0), 1), ((0, 2), -1)]));
        let p1 = p.clone().truncated(1);
        let sq = &p1 * &p1;
        assert_eq!(sq.truncation(), Some(1));
        assert_eq!(sq.coefficient(0, 0), q(1));
        assert_eq!(sq.coefficient(0, 1), q(2));
        assert_eq!(sq.coefficient(0, 2), q(0));
        assert!(&p - &p == SparseLaurentSeries::zero());
    }

    #[test]
    fn focus_focus_examples() {
        let x2 = SparseLaurentSeries::monomial(2, 0);
        assert_eq!(focus_focus_apply(&x2, 10), s(&[((2, 0), 1), ((2, 1), 2), ((2, 2), 1)]));
        let y = SparseLaurentSeries::monomial(0, 1);
        assert_eq!(focus_focus_apply(&y, 10), y);
        let xinv = focus_focus_apply(&SparseLaurentSeries::monomial(-1, 0), 2);
        assert_eq!(xinv.truncation(), Some(2));
        assert_eq!(
            xinv.terms().map(|(k, c)| (*k, c.clone())).collect::<Vec<_>>(),
            vec![((-1, 0), q(1)), ((-1, 1), q(-1)), ((-1, 2), q(1))]
        );
    }

    #[test]
    fn generalized_binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(-1, 3), BigInt::from(-1));
        assert_eq!(binomial(-2, 2), BigInt::from(3));
        assert_eq!(binomial(3, 4), BigInt::from(0));
        assert_eq!(binomial(7, 0), BigInt::from(1));
    }

    #[test]
    fn negative_powers_of_y_keep_truncation_sound() {
        let a = SparseLaurentSeries::monomial(0, -2).truncated(3);
        let b = SparseLaurentSeries::from_terms([((0, 0), q(1)), ((0, 1), q(1))]).truncated(3);
        let p = &a * &b;
        // b is known to y^3, times y^-2 gives y^1; a is exact up to y^3 times y^0.
        assert_eq!(p.truncation(), Some(1));
        assert_eq!(p.coefficient(0, -1), q(1));
    }
}
