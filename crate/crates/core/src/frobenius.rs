//! `ν_I(q) = max { r : I^r ⊄ m^[q] }` for determinantal ideals, computed by
//! exhaustive search over products of `t`-minors in `F_p[X] / m^[q]`.
//!
//! `m^[s] = (x_ij^s)` is a monomial ideal, so a polynomial lies in it exactly
//! when every term does, and reducing after each multiplication is a ring map
//! to the quotient. `I^r ⊄ m^[q]` iff some product of `r` generators survives.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, AtomicU8, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::formula::{fpt_closed_form, MatrixShape, Rational};
use crate::polyfp::{expand_minor, is_prime, MinorSpec, PolyRing, Polynomial};
use crate::witness::ProductOfMinors;

/// The ideal `m^[s] = (x_ij^s)`; `s` need not be a power of `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BracketPower(u32);

impl BracketPower {
    pub fn new(s: u64) -> Result<Self> {
        match u32::try_from(s) {
            Ok(s) if s >= 1 => Ok(BracketPower(s)),
            _ => Err(Error::InvalidArgument(format!("bracket exponent {s} must be in [1, 2^32)"))),
        }
    }

    pub fn exponent(self) -> u32 {
        self.0
    }

    pub fn contains_monomial(self, m: &crate::polyfp::Monomial) -> bool {
        m.max_exponent() >= self.0
    }

    pub fn contains(self, f: &Polynomial) -> bool {
        f.terms().iter().all(|(m, _)| self.contains_monomial(m))
    }
}

/// Drops every term of `f` that lies in `m^[s]`; zero iff `f ∈ m^[s]`.
pub fn reduce_mod_bracket(f: &Polynomial, s: u32) -> Polynomial {
    f.retain_below(s)
}

pub fn in_bracket_power(f: &Polynomial, s: u32) -> bool {
    reduce_mod_bracket(f, s).is_zero()
}

/// `max { r : f^r ∉ m^[q] }`.
///
/// Requires `f` to vanish at the origin; otherwise every power survives.
pub fn nu_principal(f: &Polynomial, q: u32) -> Result<u64> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!("q = {q} must be at least 2")));
    }
    match f.min_degree() {
        None => return Err(Error::InvalidArgument("nu of the zero polynomial is undefined".into())),
        Some(0) => {
            return Err(Error::InvalidArgument(
                "polynomial has a nonzero constant term; every power stays outside m^[q]".into(),
            ))
        }
        Some(_) => {}
    }
    // Every term of f^r has degree ≥ r, and a monomial of degree
    // > mn(q−1) has some exponent ≥ q.
    let mut lo = 0u64;
    let mut hi = f.ring().num_vars() as u64 * (q as u64 - 1) + 1;
    // Invariant: f^lo ∉ m^[q], f^hi ∈ m^[q].
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if f.pow_below(mid, q).is_zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(lo)
}

/// Resource limits for one `(shape, q)` search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Products of a partial product with a generator.
    pub max_nodes: u64,
    pub max_time: Duration,
    /// Distinct partial products held per level before falling back to
    /// depth-first search without deduplication.
    pub max_frontier: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_nodes: 10_000_000,
            max_time: Duration::from_secs(60),
            max_frontier: 1 << 20,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BudgetKind {
    Nodes,
    Time,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BudgetExhausted {
    pub kind: BudgetKind,
    pub nodes: u64,
    pub elapsed: Duration,
    /// Largest `r` known to satisfy `I^r ⊄ m^[q]` when the search stopped.
    pub lower_bound: u64,
}

impl fmt::Display for BudgetExhausted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            BudgetKind::Nodes => "node",
            BudgetKind::Time => "time",
        };
        write!(
            f,
            "{what} budget exhausted after {} nodes in {:.3}s (nu >= {})",
            self.nodes,
            self.elapsed.as_secs_f64(),
            self.lower_bound
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NuRecord {
    pub shape: MatrixShape,
    pub p: u64,
    pub e: u32,
    pub q: u64,
    pub nu: u64,
    /// `nu` size-`t` minors whose product survives modulo `m^[q]`; the
    /// lexicographically least such multiset.
    pub witness: ProductOfMinors,
    pub elapsed: Duration,
    pub nodes: u64,
    pub from_cache: bool,
}

impl NuRecord {
    pub fn ratio(&self) -> Rational {
        Rational::new(self.nu as i128, self.q as i128)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NuOutcome {
    Known(NuRecord),
    Unknown(BudgetExhausted),
}

/// `q = p^e`, kept below `2^31` so exponents fit comfortably.
pub fn prime_power(p: u64, e: u32) -> Result<u64> {
    if p >= 1 << 31 || !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if e < 1 {
        return Err(Error::InvalidArgument("e must be at least 1".into()));
    }
    p.checked_pow(e)
        .filter(|&q| q < 1 << 31)
        .ok_or_else(|| Error::InvalidArgument(format!("q = {p}^{e} exceeds 2^31")))
}

/// All `t × t` minors, rows lexicographically first, then columns.
pub fn generators(shape: MatrixShape) -> Vec<MinorSpec> {
    let row_sets = subsets(shape.m, shape.t);
    let col_sets = subsets(shape.n, shape.t);
    row_sets
        .iter()
        .flat_map(|r| {
            col_sets.iter().map(move |c| MinorSpec {
                rows: r.clone(),
                cols: c.clone(),
            })
        })
        .collect()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..=n {
            if n - x + 1 < k - cur.len() {
                break;
            }
            cur.push(x);
            go(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// A distinct surviving partial product at the current level.
#[derive(Clone, Debug)]
struct Node {
    poly: Polynomial,
    /// Lexicographically least sorted generator multiset reaching `poly`.
    witness: Vec<u32>,
    /// Least value of the largest generator over multisets reaching `poly`;
    /// extensions only use generators from here on.
    min_last: u32,
}

impl Node {
    fn absorb(&mut self, witness: Vec<u32>, last: u32) {
        if witness < self.witness {
            self.witness = witness;
        }
        self.min_last = self.min_last.min(last);
    }
}

fn insert_sorted(w: &[u32], j: u32) -> Vec<u32> {
    let pos = w.partition_point(|&x| x <= j);
    let mut out = Vec::with_capacity(w.len() + 1);
    out.extend_from_slice(&w[..pos]);
    out.push(j);
    out.extend_from_slice(&w[pos..]);
    out
}

struct Meter {
    start: Instant,
    budget: Budget,
    nodes: AtomicU64,
    // 0 running, 1 node limit, 2 time limit
    stop: AtomicU8,
}

impl Meter {
    fn new(budget: Budget) -> Self {
        Meter {
            start: Instant::now(),
            budget,
            nodes: AtomicU64::new(0),
            stop: AtomicU8::new(0),
        }
    }

    /// Counts one node; `false` once any limit is hit.
    fn tick(&self) -> bool {
        if self.stop.load(Ordering::Relaxed) != 0 {
            return false;
        }
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        let reason = if n > self.budget.max_nodes {
            1
        } else if self.start.elapsed() > self.budget.max_time {
            2
        } else {
            return true;
        };
        let _ = self.stop.compare_exchange(0, reason, Ordering::Relaxed, Ordering::Relaxed);
        false
    }

    fn exhausted(&self, lower_bound: u64) -> BudgetExhausted {
        BudgetExhausted {
            kind: if self.stop.load(Ordering::Relaxed) == 2 {
                BudgetKind::Time
            } else {
                BudgetKind::Nodes
            },
            nodes: self.nodes.load(Ordering::Relaxed).min(self.budget.max_nodes),
            elapsed: self.start.elapsed(),
            lower_bound,
        }
    }

    fn nodes(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }
}

type Level = HashMap<Polynomial, Node>;

fn merge_into(level: &mut Level, node: Node) {
    match level.get_mut(&node.poly) {
        Some(existing) => existing.absorb(node.witness, node.min_last),
        None => {
            level.insert(node.poly.clone(), node);
        }
    }
}

fn merge_levels(mut a: Level, b: Level) -> Level {
    if a.len() < b.len() {
        return merge_levels(b, a);
    }
    for (_, node) in b {
        merge_into(&mut a, node);
    }
    a
}

/// Exact `ν_{I_t}(p^e)` with the lexicographically least attaining multiset
/// of generators, or [`NuOutcome::Unknown`] when the budget runs out.
///
/// Level `r` holds every distinct nonzero reduced product of `r` generators.
/// A child is only formed with generators at or after the parent's
/// `min_last`, which still reaches every multiset and keeps the stored
/// witnesses lexicographically least, so the answer does not depend on how
/// the parallel work is scheduled.
pub fn nu_determinantal(shape: MatrixShape, p: u64, e: u32, budget: Budget) -> Result<NuOutcome> {
    shape.validate()?;
    let q = prime_power(p, e)?;
    let bound = q as u32;
    let ring = PolyRing::new(shape.m, shape.n, p)?;
    let specs = generators(shape);
    let gens: Vec<Polynomial> = specs
        .iter()
        .map(|s| expand_minor(ring, s).map(|f| reduce_mod_bracket(&f, bound)))
        .collect::<Result<_>>()?;
    let meter = Meter::new(budget);

    let mut frontier: Level = HashMap::new();
    for (idx, g) in gens.iter().enumerate() {
        if !g.is_zero() {
            merge_into(
                &mut frontier,
                Node {
                    poly: g.clone(),
                    witness: vec![idx as u32],
                    min_last: idx as u32,
                },
            );
        }
    }
    if frontier.is_empty() {
        return Ok(NuOutcome::Known(record(shape, p, e, q, 0, &[], &specs, &meter)));
    }
    let mut r = 1u64;
    loop {
        let mut nodes: Vec<Node> = frontier.into_values().collect();
        nodes.sort_unstable_by(|a, b| a.witness.cmp(&b.witness));
        let next = nodes
            .par_iter()
            .try_fold(Level::new, |mut acc, node| {
                for j in node.min_last..gens.len() as u32 {
                    if !meter.tick() {
                        return Err(());
                    }
                    let child = node.poly.mul_below(&gens[j as usize], bound).expect("same ring");
                    if !child.is_zero() {
                        merge_into(
                            &mut acc,
                            Node {
                                poly: child,
                                witness: insert_sorted(&node.witness, j),
                                min_last: j,
                            },
                        );
                    }
                }
                Ok(acc)
            })
            .try_reduce(Level::new, |a, b| Ok(merge_levels(a, b)));
        let next = match next {
            Ok(level) => level,
            Err(()) => return Ok(NuOutcome::Unknown(meter.exhausted(r))),
        };
        if next.is_empty() {
            let best = &nodes[0].witness;
            return Ok(NuOutcome::Known(record(shape, p, e, q, r, best, &specs, &meter)));
        }
        if next.len() > budget.max_frontier {
            return depth_first(shape, p, e, q, r, &nodes, &gens, &specs, &meter);
        }
        frontier = next;
        r += 1;
    }
}

/// Fallback when a level grows past `max_frontier`: plain depth-first search
/// from the last complete level, no deduplication. Still exact.
#[allow(clippy::too_many_arguments)]
fn depth_first(
    shape: MatrixShape,
    p: u64,
    e: u32,
    q: u64,
    level: u64,
    nodes: &[Node],
    gens: &[Polynomial],
    specs: &[MinorSpec],
    meter: &Meter,
) -> Result<NuOutcome> {
    let bound = q as u32;
    let mut best: (u64, Vec<u32>) = (level, nodes[0].witness.clone());

    fn visit(
        poly: &Polynomial,
        witness: &[u32],
        from: u32,
        depth: u64,
        gens: &[Polynomial],
        bound: u32,
        meter: &Meter,
        best: &mut (u64, Vec<u32>),
    ) -> bool {
        for j in from..gens.len() as u32 {
            if !meter.tick() {
                return false;
            }
            let child = poly.mul_below(&gens[j as usize], bound).expect("same ring");
            if child.is_zero() {
                continue;
            }
            let w = insert_sorted(witness, j);
            if depth + 1 > best.0 || (depth + 1 == best.0 && w < best.1) {
                *best = (depth + 1, w.clone());
            }
            if !visit(&child, &w, j, depth + 1, gens, bound, meter, best) {
                return false;
            }
        }
        true
    }

    for node in nodes {
        if !visit(&node.poly, &node.witness, node.min_last, level, gens, bound, meter, &mut best) {
            return Ok(NuOutcome::Unknown(meter.exhausted(best.0)));
        }
    }
    Ok(NuOutcome::Known(record(shape, p, e, q, best.0, &best.1, specs, meter)))
}

#[allow(clippy::too_many_arguments)]
fn record(
    shape: MatrixShape,
    p: u64,
    e: u32,
    q: u64,
    nu: u64,
    witness: &[u32],
    specs: &[MinorSpec],
    meter: &Meter,
) -> NuRecord {
    let witness = ProductOfMinors::new(shape, witness.iter().map(|&i| (specs[i as usize].clone(), 1)))
        .expect("generators are valid minors");
    NuRecord {
        shape,
        p,
        e,
        q,
        nu,
        witness,
        elapsed: meter.start.elapsed(),
        nodes: meter.nodes(),
        from_cache: false,
    }
}

/// Expands a product of minors over `F_p`, reducing modulo `m^[bound]` after
/// every factor.
pub fn product_mod_bracket(prod: &ProductOfMinors, p: u64, bound: u32) -> Result<Polynomial> {
    let shape = prod.shape();
    let ring = PolyRing::new(shape.m, shape.n, p)?;
    let mut acc = reduce_mod_bracket(&Polynomial::one(ring), bound);
    for (spec, mult) in prod.factors() {
        let f = reduce_mod_bracket(&expand_minor(ring, spec)?, bound);
        for _ in 0..*mult {
            acc = acc.mul_below(&f, bound)?;
        }
    }
    Ok(acc)
}

/// Checks a record's witness: its product survives modulo `m^[q]`, and its
/// `p`-th power survives modulo `m^[pq]`.
pub fn frobenius_spot_check(rec: &NuRecord) -> Result<bool> {
    if rec.witness.count() != rec.nu {
        return Ok(false);
    }
    let q = rec.q as u32;
    let survives = !product_mod_bracket(&rec.witness, rec.p, q)?.is_zero();
    let pq = rec
        .q
        .checked_mul(rec.p)
        .filter(|&v| v < 1 << 31)
        .ok_or_else(|| Error::InvalidArgument("p*q exceeds 2^31".into()))? as u32;
    let f = product_mod_bracket(&rec.witness, rec.p, pq)?;
    Ok(survives && !f.pow_below(rec.p, pq).is_zero())
}

/// `ν(p^e)` for `e = 1..=e_max`, with consistency checks against the
/// closed-form threshold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergenceTable {
    pub shape: MatrixShape,
    pub p: u64,
    pub target: Rational,
    pub rows: Vec<NuRecord>,
    /// Set when a row could not be computed within budget.
    pub truncated: Option<(u32, BudgetExhausted)>,
    /// Violations of `ν(pq) ≥ pν(q)`, monotonicity of `ν(q)/q`, the bound
    /// `ν(q)/q ≤ fpt`, or `ν ≤ N(q−1)`. Any entry indicates a bug.
    pub violations: Vec<String>,
}

impl ConvergenceTable {
    pub fn complete(&self) -> bool {
        self.truncated.is_none()
    }
}

/// Builds a table with `compute` supplying each row; stops at the first
/// `Unknown`.
pub fn convergence_table_with<F>(shape: MatrixShape, p: u64, e_max: u32, mut compute: F) -> Result<ConvergenceTable>
where
    F: FnMut(u32) -> Result<NuOutcome>,
{
    if e_max < 1 {
        return Err(Error::InvalidArgument("max exponent must be at least 1".into()));
    }
    prime_power(p, 1)?;
    let target = fpt_closed_form(shape)?;
    let mut rows = Vec::new();
    let mut truncated = None;
    for e in 1..=e_max {
        match compute(e)? {
            NuOutcome::Known(rec) => rows.push(rec),
            NuOutcome::Unknown(ex) => {
                truncated = Some((e, ex));
                break;
            }
        }
    }
    let violations = check_table(shape, p, target, &rows);
    Ok(ConvergenceTable {
        shape,
        p,
        target,
        rows,
        truncated,
        violations,
    })
}

pub fn convergence_table(shape: MatrixShape, p: u64, e_max: u32, budget: Budget) -> Result<ConvergenceTable> {
    convergence_table_with(shape, p, e_max, |e| nu_determinantal(shape, p, e, budget))
}

fn check_table(shape: MatrixShape, p: u64, target: Rational, rows: &[NuRecord]) -> Vec<String> {
    let mut out = Vec::new();
    let gens = shape.num_generators();
    for rec in rows {
        if rec.ratio() > target {
            out.push(format!("e={}: nu/q = {} exceeds fpt = {}", rec.e, rec.ratio(), target));
        }
        if rec.nu as u128 > gens * (rec.q as u128 - 1) {
            out.push(format!("e={}: nu = {} exceeds N(q-1) = {}", rec.e, rec.nu, gens * (rec.q as u128 - 1)));
        }
    }
    for pair in rows.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if b.nu < p * a.nu {
            out.push(format!("e={}: nu = {} < p * nu(e={}) = {}", b.e, b.nu, a.e, p * a.nu));
        }
        if b.ratio() < a.ratio() {
            out.push(format!("e={}: nu/q = {} decreased from {}", b.e, b.ratio(), a.ratio()));
        }
    }
    out
}
