//! Cylinder counts for the del Pezzo family, read off the focus-focus
//! wall-crossing automorphism, with an independent subset-counting oracle.

use num_bigint::BigUint;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::match_family;
use crate::lattice::TropicalBase;
use crate::num::Q;
use crate::series::{focus_focus_apply, focus_focus_inverse, SparseLaurentSeries};
use crate::spine::Spine;

pub const ORACLE_MAX_L: i64 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CountQuery {
    pub l: i64,
    pub m: i64,
    pub n: i64,
}

impl CountQuery {
    pub fn new(l: i64, m: i64, n: i64) -> Self {
        Self { l, m, n }
    }

    fn check(&self) -> Result<()> {
        if self.l < 1 {
            return Err(Error::InvalidQuery(format!("l must be at least 1, got {}", self.l)));
        }
        Ok(())
    }

    /// Truncation order that leaves every coefficient of `phi(x^l y^m)` exact.
    pub fn truncation(&self) -> i64 {
        (self.m.abs() + self.l).max(self.l) + 2
    }
}

fn as_count(c: Q) -> Result<BigUint> {
    if !c.is_integer() || c.is_negative() {
        return Err(Error::InvalidQuery(format!("coefficient {c} is not a nonnegative integer")));
    }
    Ok(c.to_integer().magnitude().clone())
}

/// Coefficient of `x^l y^(m+n)` in `phi(x^l y^m)`.
pub fn count(q: CountQuery) -> Result<BigUint> {
    q.check()?;
    coefficient(q)
}

fn coefficient(q: CountQuery) -> Result<BigUint> {
    let image = focus_focus_apply(&SparseLaurentSeries::monomial(q.l, q.m), q.truncation());
    as_count(image.coefficient(q.l, q.m + q.n))
}

/// Coefficient of `x^-l y^-m` in `phi^{-1}(x^-l y^-(m+n))`: the count read
/// with the boundary order reversed.
pub fn count_backward(q: CountQuery) -> Result<BigUint> {
    q.check()?;
    let image = focus_focus_inverse(&SparseLaurentSeries::monomial(-q.l, -(q.m + q.n)), q.truncation() + q.n.abs());
    as_count(image.coefficient(-q.l, -q.m))
}

/// Number of `n`-element subsets of `{1..l}`, by enumeration.
pub fn binomial_oracle(l: i64, n: i64) -> Result<u64> {
    if !(0..=ORACLE_MAX_L).contains(&l) {
        return Err(Error::InvalidQuery(format!("oracle needs 0 <= l <= {ORACLE_MAX_L}, got {l}")));
    }
    if n < 0 {
        return Ok(0);
    }
    Ok((0u32..1 << l).filter(|s| i64::from(s.count_ones()) == n).count() as u64)
}

pub fn symmetry_check(q: CountQuery) -> Result<bool> {
    Ok(count(q)? == count_backward(q)?)
}

/// The count of a spine in normal form `L(l,m,n)` on the del Pezzo base.
pub fn count_spine(base: &TropicalBase, s: &Spine) -> Result<BigUint> {
    let (l, m, n, _) = match_family(base, s.inner())?;
    count(CountQuery::new(l, m, n))
}

/// `(1-g)(dim V - 3) - alpha.K + n`.
pub fn virtual_dim(g: i64, dim_v: i64, alpha_dot_k: i64, n: i64) -> i64 {
    (1 - g) * (dim_v - 3) - alpha_dot_k + n
}

/// Rows `n = 0..=l` for `l = 0..=l_max` at fixed `m`, each cell checked
/// against the oracle.
pub fn count_table(l_max: i64, m: i64) -> Result<Vec<Vec<BigUint>>> {
    if l_max < 1 {
        return Err(Error::InvalidQuery(format!("l_max must be at least 1, got {l_max}")));
    }
    if l_max > ORACLE_MAX_L {
        return Err(Error::InvalidQuery(format!("l_max must be at most {ORACLE_MAX_L}, got {l_max}")));
    }
    (0..=l_max)
        .map(|l| {
            (0..=l)
                .map(|n| {
                    let c = coefficient(CountQuery::new(l, m, n))?;
                    let o = binomial_oracle(l, n)?;
                    if c != BigUint::from(o) {
                        return Err(Error::InvalidQuery(format!("count {c} differs from oracle {o} at ({l},{m},{n})")));
                    }
                    Ok(c)
                })
                .collect()
        })
        .collect()
}
