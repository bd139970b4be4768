//! Exact integer and rational helpers shared by every module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Q = BigRational;

pub fn int(v: i64) -> Int {
    BigInt::from(v)
}

pub fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn q_from_int(v: &Int) -> Q {
    Q::from_integer(v.clone())
}

/// Formats a rational as `p/q` with `q > 0` in lowest terms (`BigRational` keeps
/// itself reduced with a positive denominator).
pub fn format_q(v: &Q) -> String {
    format!("{}/{}", v.numer(), v.denom())
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn det(a: &[Int; 2], b: &[Int; 2]) -> Int {
    &a[0] * &b[1] - &a[1] * &b[0]
}

pub fn det_q(a: &[Q; 2], b: &[Q; 2]) -> Q {
    &a[0] * &b[1] - &a[1] * &b[0]
}

/// gcd of the two coordinates; zero only for the zero vector.
pub fn content(v: &[Int; 2]) -> Int {
    v[0].gcd(&v[1])
}

/// The primitive integer vector in the direction of `v`.
pub fn primitive(v: &[Int; 2]) -> Result<[Int; 2]> {
    let g = content(v);
    if g.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok([&v[0] / &g, &v[1] / &g])
}

/// Lattice length of a rational vector: the `r >= 0` with `v = r * w` for a
/// primitive integer vector `w`.
pub fn lattice_length_q(v: &[Q; 2]) -> Q {
    if v[0].is_zero() && v[1].is_zero() {
        return Q::zero();
    }
    let den = v[0].denom().lcm(v[1].denom());
    let a = v[0].numer() * (&den / v[0].denom());
    let b = v[1].numer() * (&den / v[1].denom());
    Q::new(a.gcd(&b), den)
}

pub fn to_q(v: &[Int; 2]) -> [Q; 2] {
    [q_from_int(&v[0]), q_from_int(&v[1])]
}

pub fn abs(v: &Int) -> Int {
    v.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text_round_trip() {
        assert_eq!(format_q(&frac(6, -4)), "-3/2");
        assert_eq!(format_q(&q(5)), "5/1");
        assert_eq!(parse_q("-3/2").unwrap(), frac(-3, 2));
        assert_eq!(parse_q("4").unwrap(), q(4));
        assert_eq!(parse_q(" 2/4 ").unwrap(), frac(1, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn lattice_lengths() {
        assert_eq!(lattice_length_q(&[q(0), q(3)]), q(3));
        assert_eq!(lattice_length_q(&[q(2), q(4)]), q(2));
        assert_eq!(lattice_length_q(&[frac(1, 2), frac(1, 3)]), frac(1, 6));
        assert_eq!(lattice_length_q(&[q(0), q(0)]), q(0));
        assert_eq!(primitive(&[int(-4), int(6)]).unwrap(), [int(-2), int(3)]);
        assert_eq!(primitive(&[int(0), int(0)]), Err(Error::ZeroVector));
    }
}
