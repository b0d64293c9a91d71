//! Closed-form F-pure threshold of the ideal of size-`t` minors of a generic
//! `m × n` matrix, and the minimizing index `k` with its companion `u`.
//!
//! Everything here is exact: values are reduced fractions over `i128`.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational, always reduced with a positive denominator.
pub type Rational = Ratio<i128>;

/// Dimensions `m × n` of the generic matrix and the minor size `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MatrixShape {
    pub m: usize,
    pub n: usize,
    pub t: usize,
}

impl MatrixShape {
    /// Validating constructor; requires `1 ≤ t ≤ m ≤ n`.
    pub fn new(m: usize, n: usize, t: usize) -> Result<Self> {
        let shape = MatrixShape { m, n, t };
        shape.validate()?;
        Ok(shape)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t >= 1 && self.t <= self.m && self.m <= self.n {
            Ok(())
        } else {
            Err(Error::InvalidShape {
                m: self.m as i64,
                n: self.n as i64,
                t: self.t as i64,
            })
        }
    }

    /// Number of indeterminates `x_ij`.
    pub fn num_vars(&self) -> usize {
        self.m * self.n
    }

    /// Number of size-`t` minors, `C(m,t)·C(n,t)`.
    pub fn num_generators(&self) -> u128 {
        binomial(self.m as u128, self.t as u128) * binomial(self.n as u128, self.t as u128)
    }

    /// The candidate `(m−k)(n−k)/(t−k)` for `0 ≤ k < t`.
    pub fn candidate(&self, k: usize) -> Rational {
        debug_assert!(k < self.t);
        let (m, n, t, k) = (self.m as i128, self.n as i128, self.t as i128, k as i128);
        Rational::new((m - k) * (n - k), t - k)
    }
}

impl fmt::Display for MatrixShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{} matrix, minors of size {}", self.m, self.n, self.t)
    }
}

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// The threshold together with the index that attains it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FptResult {
    pub value: Rational,
    pub k: i64,
    pub u: i64,
}

/// `min { (m−k)(n−k)/(t−k) : k = 0, …, t−1 }`.
pub fn fpt_closed_form(shape: MatrixShape) -> Result<Rational> {
    shape.validate()?;
    Ok((0..shape.t)
        .map(|k| shape.candidate(k))
        .min()
        .expect("t ≥ 1 gives at least one candidate"))
}

/// Least `k ∈ [0, t−1]` with `(m−k)(n−k)/(t−k) ≤ (m−k−1)(n−k−1)/(t−k−1)`,
/// the comparison at `k = t−1` counting as true (right side infinite), and
/// `u = t(m+n−2k) − mn + k²`.
pub fn minimizing_k_and_u(shape: MatrixShape) -> Result<FptResult> {
    shape.validate()?;
    let (m, n, t) = (shape.m as i128, shape.n as i128, shape.t as i128);
    let k = (0..t)
        .find(|&k| {
            if k == t - 1 {
                return true;
            }
            // Both denominators are positive, so cross-multiply.
            (m - k) * (n - k) * (t - k - 1) <= (m - k - 1) * (n - k - 1) * (t - k)
        })
        .expect("k = t-1 always qualifies");
    let u = t * (m + n - 2 * k) - m * n + k * k;
    Ok(FptResult {
        value: shape.candidate(k as usize),
        k: k as i64,
        u: u as i64,
    })
}
