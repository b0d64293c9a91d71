//! Sparse polynomials over `F_p` in the entries `x_ij` of a generic matrix.
//!
//! Variables are ordered row-major, `x_11 > x_12 > … > x_1n > x_21 > … > x_mn`,
//! and monomials are compared lexicographically. A monomial is a dense
//! exponent vector indexed by the variable ordinal `(i−1)·n + (j−1)`, so the
//! derived `Ord` on the vector is exactly the lex term order.
//!
//! Polynomials keep their terms sorted in descending term order; the initial
//! form is the first term.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Deterministic primality test for the supported range `p < 2^31`.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Position `(i, j)` of an indeterminate, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VariableIndex {
    pub i: usize,
    pub j: usize,
}

impl VariableIndex {
    /// Flattened position; a smaller ordinal is a greater variable.
    pub fn ordinal(self, cols: usize) -> usize {
        (self.i - 1) * cols + (self.j - 1)
    }

    pub fn from_ordinal(ordinal: usize, cols: usize) -> Self {
        VariableIndex {
            i: ordinal / cols + 1,
            j: ordinal % cols + 1,
        }
    }
}

/// Exponent vector over all `mn` variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(num_vars: usize) -> Self {
        Monomial(vec![0; num_vars])
    }

    pub fn from_exponents(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn max_exponent(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn is_squarefree(&self) -> bool {
        self.max_exponent() <= 1
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn pow(&self, e: u32) -> Monomial {
        Monomial(self.0.iter().map(|a| a * e).collect())
    }

    /// Renders as `x[i,j]^e*…` in variable order, or `1`.
    pub fn render(&self, cols: usize) -> String {
        let factors: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(ord, &e)| {
                let v = VariableIndex::from_ordinal(ord, cols);
                if e == 1 {
                    format!("x[{},{}]", v.i, v.j)
                } else {
                    format!("x[{},{}]^{}", v.i, v.j, e)
                }
            })
            .collect();
        if factors.is_empty() {
            "1".to_string()
        } else {
            factors.join("*")
        }
    }
}

/// The ring `F_p[x_11, …, x_mn]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PolyRing {
    rows: usize,
    cols: usize,
    p: u64,
}

impl PolyRing {
    pub fn new(rows: usize, cols: usize, p: u64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "matrix must be non-empty, got {rows}x{cols}"
            )));
        }
        if p >= 1 << 31 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PolyRing { rows, cols, p })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn num_vars(&self) -> usize {
        self.rows * self.cols
    }

    fn reduce_signed(&self, c: i64) -> u64 {
        c.rem_euclid(self.p as i64) as u64
    }

    fn check_var(&self, v: VariableIndex) -> Result<()> {
        if v.i == 0 || v.j == 0 || v.i > self.rows || v.j > self.cols {
            return Err(Error::InvalidArgument(format!(
                "variable x[{},{}] outside a {}x{} matrix",
                v.i, v.j, self.rows, self.cols
            )));
        }
        Ok(())
    }
}

/// Sparse polynomial; terms sorted by descending monomial, coefficients in
/// `[1, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    ring: PolyRing,
    terms: Vec<(Monomial, u64)>,
}

impl Polynomial {
    pub fn zero(ring: PolyRing) -> Self {
        Polynomial {
            ring,
            terms: Vec::new(),
        }
    }

    pub fn one(ring: PolyRing) -> Self {
        Self::constant(ring, 1)
    }

    pub fn constant(ring: PolyRing, c: i64) -> Self {
        Self::from_terms(ring, vec![(Monomial::one(ring.num_vars()), c)])
    }

    pub fn var(ring: PolyRing, i: usize, j: usize) -> Result<Self> {
        let v = VariableIndex { i, j };
        ring.check_var(v)?;
        let mut e = vec![0; ring.num_vars()];
        e[v.ordinal(ring.cols)] = 1;
        Ok(Polynomial {
            ring,
            terms: vec![(Monomial(e), 1)],
        })
    }

    pub fn monomial(ring: PolyRing, m: Monomial, c: i64) -> Self {
        assert_eq!(m.num_vars(), ring.num_vars(), "monomial arity");
        Self::from_terms(ring, vec![(m, c)])
    }

    /// Builds a polynomial from arbitrary signed terms, merging duplicates and
    /// dropping zeros.
    pub fn from_terms(ring: PolyRing, terms: Vec<(Monomial, i64)>) -> Self {
        let mut acc: HashMap<Monomial, u64> = HashMap::with_capacity(terms.len());
        for (m, c) in terms {
            assert_eq!(m.num_vars(), ring.num_vars(), "monomial arity");
            let c = ring.reduce_signed(c);
            let slot = acc.entry(m).or_insert(0);
            *slot = (*slot + c) % ring.p;
        }
        Self::from_map(ring, acc)
    }

    fn from_map(ring: PolyRing, acc: HashMap<Monomial, u64>) -> Self {
        let mut terms: Vec<(Monomial, u64)> = acc.into_iter().filter(|(_, c)| *c != 0).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Polynomial { ring, terms }
    }

    pub fn ring(&self) -> PolyRing {
        self.ring
    }

    pub fn terms(&self) -> &[(Monomial, u64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// Coefficient of `m`, zero when absent.
    pub fn coefficient(&self, m: &Monomial) -> u64 {
        self.terms
            .binary_search_by(|(t, _)| m.cmp(t))
            .map(|idx| self.terms[idx].1)
            .unwrap_or(0)
    }

    fn check_ring(&self, other: &Polynomial) -> Result<()> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::RingMismatch(format!(
                "{}x{} over F_{} vs {}x{} over F_{}",
                self.ring.rows,
                self.ring.cols,
                self.ring.p,
                other.ring.rows,
                other.ring.cols,
                other.ring.p
            )))
        }
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_ring(other)?;
        let p = self.ring.p;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut a, mut b) = (self.terms.iter().peekable(), other.terms.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((ma, ca)), Some((mb, cb))) => match ma.cmp(mb) {
                    std::cmp::Ordering::Greater => {
                        out.push((ma.clone(), *ca));
                        a.next();
                    }
                    std::cmp::Ordering::Less => {
                        out.push((mb.clone(), *cb));
                        b.next();
                    }
                    std::cmp::Ordering::Equal => {
                        let c = (ca + cb) % p;
                        if c != 0 {
                            out.push((ma.clone(), c));
                        }
                        a.next();
                        b.next();
                    }
                },
                (Some(t), None) => {
                    out.push((*t).clone());
                    a.next();
                }
                (None, Some(t)) => {
                    out.push((*t).clone());
                    b.next();
                }
                (None, None) => break,
            }
        }
        Ok(Polynomial {
            ring: self.ring,
            terms: out,
        })
    }

    pub fn neg(&self) -> Polynomial {
        let p = self.ring.p;
        Polynomial {
            ring: self.ring,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), p - c)).collect(),
        }
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.mul_below(other, u32::MAX)
    }

    /// Product keeping only monomials whose exponents are all `< bound`.
    ///
    /// Equals `mul` followed by discarding every term lying in the monomial
    /// ideal `(x_ij^bound)`.
    pub fn mul_below(&self, other: &Polynomial, bound: u32) -> Result<Polynomial> {
        self.check_ring(other)?;
        let p = self.ring.p;
        let nv = self.ring.num_vars();
        let mut acc: HashMap<Monomial, u64> =
            HashMap::with_capacity(self.terms.len().saturating_mul(other.terms.len()).min(1 << 20));
        let mut scratch = vec![0u32; nv];
        for (ma, ca) in &self.terms {
            'inner: for (mb, cb) in &other.terms {
                for v in 0..nv {
                    let e = ma.0[v] + mb.0[v];
                    if e >= bound {
                        continue 'inner;
                    }
                    scratch[v] = e;
                }
                let c = ca * cb % p;
                let slot = acc.entry(Monomial(scratch.clone())).or_insert(0);
                *slot = (*slot + c) % p;
            }
        }
        Ok(Self::from_map(self.ring, acc))
    }

    /// Drops every term with some exponent `≥ bound`.
    pub fn retain_below(&self, bound: u32) -> Polynomial {
        Polynomial {
            ring: self.ring,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.max_exponent() < bound)
                .cloned()
                .collect(),
        }
    }

    pub fn scale(&self, c: i64) -> Polynomial {
        let c = self.ring.reduce_signed(c);
        if c == 0 {
            return Polynomial::zero(self.ring);
        }
        let p = self.ring.p;
        Polynomial {
            ring: self.ring,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c % p)).collect(),
        }
    }

    pub fn pow(&self, e: u64) -> Polynomial {
        self.pow_below(e, u32::MAX)
    }

    /// `self^e` with terms having an exponent `≥ bound` discarded after every
    /// multiplication.
    pub fn pow_below(&self, mut e: u64, bound: u32) -> Polynomial {
        let mut base = self.retain_below(bound);
        let mut acc = Polynomial::one(self.ring).retain_below(bound);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_below(&base, bound).expect("same ring");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_below(&base, bound).expect("same ring");
            }
        }
        acc
    }

    /// Lex-greatest monomial with its coefficient.
    pub fn initial_form(&self) -> Result<(Monomial, u64)> {
        self.terms.first().cloned().ok_or(Error::ZeroPolynomial)
    }

    /// Least total degree over the terms; `None` for zero.
    pub fn min_degree(&self) -> Option<u64> {
        self.terms.iter().map(|(m, _)| m.degree()).min()
    }

    /// Deterministic `c*x[i,j]^e*… + …` in descending term order.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(m, c)| {
                if m.is_one() {
                    c.to_string()
                } else {
                    format!("{}*{}", c, m.render(self.ring.cols))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// The minor `[a_1,…,a_r | b_1,…,b_r]`, 1-based strictly increasing indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MinorSpec {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

fn strictly_increasing(v: &[usize]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

impl MinorSpec {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        let spec = MinorSpec { rows, cols };
        spec.check_form()?;
        Ok(spec)
    }

    /// Minor on consecutive rows `r0..r0+len` and columns `c0..c0+len`.
    pub fn contiguous(r0: usize, c0: usize, len: usize) -> Self {
        MinorSpec {
            rows: (r0..r0 + len).collect(),
            cols: (c0..c0 + len).collect(),
        }
    }

    fn check_form(&self) -> Result<()> {
        if self.rows.is_empty() || self.rows.len() != self.cols.len() {
            return Err(Error::InvalidMinor(format!(
                "{self}: row and column lists must be non-empty and of equal length"
            )));
        }
        if !strictly_increasing(&self.rows) || !strictly_increasing(&self.cols) {
            return Err(Error::InvalidMinor(format!("{self}: indices must be strictly increasing")));
        }
        Ok(())
    }

    /// Checks shape of the index lists and that they fit an `rows × cols` matrix.
    pub fn validate(&self, rows: usize, cols: usize) -> Result<()> {
        self.check_form()?;
        let in_range = |v: &[usize], hi: usize| v.iter().all(|&x| x >= 1 && x <= hi);
        if !in_range(&self.rows, rows) || !in_range(&self.cols, cols) {
            return Err(Error::InvalidMinor(format!("{self}: index outside a {rows}x{cols} matrix")));
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    /// The leading diagonal `x_{a_1 b_1}, …, x_{a_r b_r}`.
    pub fn diagonal(&self) -> impl Iterator<Item = VariableIndex> + '_ {
        self.rows
            .iter()
            .zip(&self.cols)
            .map(|(&i, &j)| VariableIndex { i, j })
    }
}

impl fmt::Display for MinorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "[{}|{}]", join(&self.rows), join(&self.cols))
    }
}

/// Largest minor size expanded by summing over permutations; larger minors
/// recurse along the first row.
const PERMUTATION_EXPANSION_MAX: usize = 5;

/// The determinant of the submatrix selected by `spec`.
pub fn expand_minor(ring: PolyRing, spec: &MinorSpec) -> Result<Polynomial> {
    spec.validate(ring.rows, ring.cols)?;
    if spec.size() <= PERMUTATION_EXPANSION_MAX {
        Ok(expand_by_permutations(ring, spec))
    } else {
        Ok(expand_by_cofactors(ring, &spec.rows, &spec.cols))
    }
}

fn expand_by_permutations(ring: PolyRing, spec: &MinorSpec) -> Polynomial {
    let r = spec.size();
    let nv = ring.num_vars();
    let mut perm: Vec<usize> = (0..r).collect();
    let mut terms = Vec::new();
    // Heap's algorithm; every step is a single transposition.
    let mut counters = vec![0usize; r];
    let mut sign = 1i64;
    let mut emit = |perm: &[usize], sign: i64| {
        let mut e = vec![0u32; nv];
        for (a, &b) in perm.iter().enumerate() {
            let v = VariableIndex {
                i: spec.rows[a],
                j: spec.cols[b],
            };
            e[v.ordinal(ring.cols)] = 1;
        }
        terms.push((Monomial(e), sign));
    };
    emit(&perm, sign);
    let mut i = 0;
    while i < r {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            sign = -sign;
            emit(&perm, sign);
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    Polynomial::from_terms(ring, terms)
}

fn expand_by_cofactors(ring: PolyRing, rows: &[usize], cols: &[usize]) -> Polynomial {
    if rows.len() == 1 {
        return Polynomial::var(ring, rows[0], cols[0]).expect("validated");
    }
    let sub_rows = &rows[1..];
    let mut acc = Polynomial::zero(ring);
    for (idx, &c) in cols.iter().enumerate() {
        let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let cofactor = if sub_rows.len() <= PERMUTATION_EXPANSION_MAX {
            expand_by_permutations(
                ring,
                &MinorSpec {
                    rows: sub_rows.to_vec(),
                    cols: sub_cols,
                },
            )
        } else {
            expand_by_cofactors(ring, sub_rows, &sub_cols)
        };
        let entry = Polynomial::var(ring, rows[0], c).expect("validated");
        let signed = if idx % 2 == 0 { 1 } else { -1 };
        let term = entry.mul(&cofactor).expect("same ring").scale(signed);
        acc = acc.add(&term).expect("same ring");
    }
    acc
}

/// Initial monomial of a product of minors, read off the leading diagonals
/// without expanding anything.
///
/// Lex leading terms are multiplicative and a minor's leading term is its
/// diagonal, so the result is the sum of the diagonal supports with
/// multiplicity. The characteristic plays no role.
pub fn leading_monomial_of_product(
    rows: usize,
    cols: usize,
    factors: &[(MinorSpec, u32)],
) -> Result<Monomial> {
    let mut e = vec![0u32; rows * cols];
    for (spec, mult) in factors {
        spec.validate(rows, cols)?;
        for v in spec.diagonal() {
            e[v.ordinal(cols)] += mult;
        }
    }
    Ok(Monomial(e))
}
