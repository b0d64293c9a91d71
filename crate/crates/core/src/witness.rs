//! Products of minors `Δ_k`, `Δ_k′` and `Δ` witnessing the lower bound on the
//! F-pure threshold, with JSON certificates that can be checked independently.
//!
//! Membership of `Δ` in the integral closure of `I_t^s` is certified through
//! the degree/count criterion for products of minors (`h ≤ s` factors of total
//! degree `t·s`); integral closures themselves are never computed.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{minimizing_k_and_u, MatrixShape};
use crate::polyfp::{leading_monomial_of_product, MinorSpec, Monomial};

/// A formal product of minors with multiplicities, kept canonical: factors
/// sorted by `(rows, cols)`, duplicates merged, multiplicities positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProductOfMinors {
    shape: MatrixShape,
    factors: Vec<(MinorSpec, u32)>,
}

impl ProductOfMinors {
    pub fn new(shape: MatrixShape, factors: impl IntoIterator<Item = (MinorSpec, u32)>) -> Result<Self> {
        let mut prod = ProductOfMinors {
            shape,
            factors: Vec::new(),
        };
        for (spec, mult) in factors {
            spec.validate(shape.m, shape.n)?;
            prod.factors.push((spec, mult));
        }
        prod.canonicalize();
        Ok(prod)
    }

    pub fn one(shape: MatrixShape) -> Self {
        ProductOfMinors {
            shape,
            factors: Vec::new(),
        }
    }

    fn canonicalize(&mut self) {
        self.factors.retain(|(_, mult)| *mult > 0);
        self.factors.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(MinorSpec, u32)> = Vec::with_capacity(self.factors.len());
        for (spec, mult) in self.factors.drain(..) {
            match merged.last_mut() {
                Some((last, m)) if *last == spec => *m += mult,
                _ => merged.push((spec, mult)),
            }
        }
        self.factors = merged;
    }

    pub fn shape(&self) -> MatrixShape {
        self.shape
    }

    pub fn factors(&self) -> &[(MinorSpec, u32)] {
        &self.factors
    }

    /// `Σ mult · size`.
    pub fn degree(&self) -> u64 {
        self.factors
            .iter()
            .map(|(s, mult)| *mult as u64 * s.size() as u64)
            .sum()
    }

    /// Number of minors counted with multiplicity.
    pub fn count(&self) -> u64 {
        self.factors.iter().map(|(_, mult)| *mult as u64).sum()
    }

    pub fn leading_monomial(&self) -> Monomial {
        leading_monomial_of_product(self.shape.m, self.shape.n, &self.factors)
            .expect("factors validated on construction")
    }

    pub fn times(&self, other: &ProductOfMinors) -> ProductOfMinors {
        let mut prod = ProductOfMinors {
            shape: self.shape,
            factors: self.factors.iter().chain(&other.factors).cloned().collect(),
        };
        prod.canonicalize();
        prod
    }

    pub fn pow(&self, e: u32) -> ProductOfMinors {
        let mut prod = ProductOfMinors {
            shape: self.shape,
            factors: self.factors.iter().map(|(s, m)| (s.clone(), m * e)).collect(),
        };
        prod.canonicalize();
        prod
    }

    pub fn to_factor_json(&self) -> Vec<FactorJson> {
        self.factors
            .iter()
            .map(|(s, mult)| FactorJson {
                rows: s.rows.clone(),
                cols: s.cols.clone(),
                mult: *mult,
            })
            .collect()
    }
}

impl fmt::Display for ProductOfMinors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(s, m)| if *m == 1 { s.to_string() } else { format!("{s}^{m}") })
            .collect();
        f.write_str(&parts.join(" * "))
    }
}

/// `Π_{i=1}^{n−m+1} [1..m | i..i+m−1] · Π_{j=2}^{m−k} [j..m | 1..m−j+1]·[1..m−j+1 | n−m+j..n]`
/// for `0 ≤ k ≤ m`.
pub fn build_delta_k(shape: MatrixShape, k: usize) -> Result<ProductOfMinors> {
    shape.validate()?;
    let (m, n) = (shape.m, shape.n);
    if k > m {
        return Err(Error::KOutOfRange {
            k: k as i64,
            lo: 0,
            hi: m as i64,
        });
    }
    let mut factors = Vec::new();
    for i in 1..=n - m + 1 {
        factors.push((MinorSpec::contiguous(1, i, m), 1));
    }
    for j in 2..=m.saturating_sub(k) {
        let len = m - j + 1;
        factors.push((MinorSpec::contiguous(j, 1, len), 1));
        factors.push((MinorSpec::contiguous(1, n - m + j, len), 1));
    }
    ProductOfMinors::new(shape, factors)
}

/// `Δ_k · [m−k+1..m | 1..k]` for `1 ≤ k ≤ m`.
pub fn build_delta_k_prime(shape: MatrixShape, k: usize) -> Result<ProductOfMinors> {
    shape.validate()?;
    if k == 0 || k > shape.m {
        return Err(Error::KOutOfRange {
            k: k as i64,
            lo: 1,
            hi: shape.m as i64,
        });
    }
    let corner = ProductOfMinors::new(shape, [(MinorSpec::contiguous(shape.m - k + 1, 1, k), 1)])?;
    Ok(build_delta_k(shape, k)?.times(&corner))
}

/// Which branch of the construction of `Δ` applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DeltaCase {
    #[serde(rename = "k-zero")]
    KZero,
    #[serde(rename = "u-nonneg")]
    UNonneg,
    #[serde(rename = "u-neg")]
    UNeg,
}

impl DeltaCase {
    pub fn select(k: i64, u: i64) -> Self {
        if k == 0 {
            DeltaCase::KZero
        } else if u >= 0 {
            DeltaCase::UNonneg
        } else {
            DeltaCase::UNeg
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            DeltaCase::KZero => "k-zero",
            DeltaCase::UNonneg => "u-nonneg",
            DeltaCase::UNeg => "u-neg",
        }
    }
}

impl fmt::Display for DeltaCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// `Δ` for the given `k, u`:
/// `Δ_0^t`, `Δ_k^u·Δ_k′^{t−k−u}` or `Δ_k′^{t−k+u}·Δ_{k−1}^{−u}`.
pub fn assemble_delta(shape: MatrixShape, k: i64, u: i64) -> Result<ProductOfMinors> {
    shape.validate()?;
    let t = shape.t as i64;
    if k < 0 || k >= t {
        return Err(Error::KOutOfRange { k, lo: 0, hi: t - 1 });
    }
    let exp = |e: i64| -> Result<u32> {
        if (0..=t).contains(&e) {
            Ok(e as u32)
        } else {
            Err(Error::InvalidArgument(format!("exponent {e} outside [0, t = {t}] for k = {k}, u = {u}")))
        }
    };
    let ku = k as usize;
    match DeltaCase::select(k, u) {
        DeltaCase::KZero => Ok(build_delta_k(shape, 0)?.pow(shape.t as u32)),
        DeltaCase::UNonneg => {
            let a = build_delta_k(shape, ku)?.pow(exp(u)?);
            let b = build_delta_k_prime(shape, ku)?.pow(exp(t - k - u)?);
            Ok(a.times(&b))
        }
        DeltaCase::UNeg => {
            let a = build_delta_k_prime(shape, ku)?.pow(exp(t - k + u)?);
            let b = build_delta_k(shape, ku - 1)?.pow(exp(-u)?);
            Ok(a.times(&b))
        }
    }
}

/// `h ≤ s` and total degree `= t·s`. A `true` answer places the product in
/// the integral closure of `I_t^s`.
pub fn bruns_hypothesis_check(prod: &ProductOfMinors, s: u64) -> Result<bool> {
    if s < 1 {
        return Err(Error::InvalidArgument("s must be at least 1".into()));
    }
    Ok(prod.count() <= s && prod.degree() == prod.shape().t as u64 * s)
}

/// Every exponent of the leading monomial is `< s`, so the expanded product
/// keeps a term outside `(x_ij^s)`.
pub fn check_not_in_bracket_power(prod: &ProductOfMinors, s: u64) -> bool {
    (prod.leading_monomial().max_exponent() as u64) < s
}

/// One factor of a certificate or cache record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorJson {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub mult: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Claims {
    pub degree: u64,
    pub count: u64,
    #[serde(rename = "maxInitialExponent")]
    pub max_initial_exponent: u64,
    #[serde(rename = "brunsS")]
    pub bruns_s: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessCertificate {
    pub shape: MatrixShape,
    pub k: i64,
    pub u: i64,
    pub case: DeltaCase,
    pub factors: Vec<FactorJson>,
    pub claims: Claims,
}

impl WitnessCertificate {
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Rebuilds the product from the listed factors, validating every index.
    pub fn product(&self) -> Result<ProductOfMinors> {
        self.shape
            .validate()
            .map_err(|e| Error::MalformedCertificate(e.to_string()))?;
        let mut factors = Vec::with_capacity(self.factors.len());
        for f in &self.factors {
            if f.mult == 0 {
                return Err(Error::MalformedCertificate("factor multiplicity must be positive".into()));
            }
            let spec = MinorSpec {
                rows: f.rows.clone(),
                cols: f.cols.clone(),
            };
            spec.validate(self.shape.m, self.shape.n)
                .map_err(|e| Error::MalformedCertificate(e.to_string()))?;
            factors.push((spec, f.mult));
        }
        Ok(ProductOfMinors::new(self.shape, factors)?)
    }
}

/// Builds `Δ` for the minimizing `k` and its `u`, with claims filled in.
pub fn build_capital_delta(shape: MatrixShape) -> Result<WitnessCertificate> {
    let best = minimizing_k_and_u(shape)?;
    build_certificate_for_k(shape, best.k)
}

/// Certificate for an arbitrary `k ∈ [0, t−1]` with `u = t(m+n−2k) − mn + k²`.
/// Only the minimizing `k` is guaranteed to verify.
pub fn build_certificate_for_k(shape: MatrixShape, k: i64) -> Result<WitnessCertificate> {
    shape.validate()?;
    let (m, n, t) = (shape.m as i64, shape.n as i64, shape.t as i64);
    if k < 0 || k >= t {
        return Err(Error::KOutOfRange { k, lo: 0, hi: t - 1 });
    }
    let u = t * (m + n - 2 * k) - m * n + k * k;
    let delta = assemble_delta(shape, k, u)?;
    let (m, n, k) = (m as u64, n as u64, k as u64);
    Ok(WitnessCertificate {
        shape,
        k: k as i64,
        u,
        case: DeltaCase::select(k as i64, u),
        factors: delta.to_factor_json(),
        claims: Claims {
            degree: delta.degree(),
            count: delta.count(),
            max_initial_exponent: delta.leading_monomial().max_exponent() as u64,
            bruns_s: (m - k) * (n - k),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClaimCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub checks: Vec<ClaimCheck>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ClaimCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&ClaimCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{:<20} {}  {}", c.name, if c.passed { "PASS" } else { "FAIL" }, c.detail)?;
        }
        write!(f, "overall: {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

/// Recomputes every claim of `cert` from its shape and factors.
///
/// Structural problems (bad shape, out-of-range or non-increasing indices,
/// zero multiplicities, a case tag contradicting the certificate's own `k`
/// and `u`) are returned as [`Error::MalformedCertificate`]; anything else is
/// reported claim by claim.
pub fn verify_certificate(cert: &WitnessCertificate) -> Result<VerificationReport> {
    let prod = cert.product()?;
    let shape = cert.shape;
    let t = shape.t as i64;
    if cert.k < 0 || cert.k >= t {
        return Err(Error::MalformedCertificate(format!("k = {} outside [0, {}]", cert.k, t - 1)));
    }
    if DeltaCase::select(cert.k, cert.u) != cert.case {
        return Err(Error::MalformedCertificate(format!(
            "case tag {} does not match k = {}, u = {}",
            cert.case, cert.k, cert.u
        )));
    }

    let (m, n, k) = (shape.m as u64, shape.n as u64, cert.k as u64);
    let target_s = (m - k) * (n - k);
    let t = shape.t as u64;
    let mut checks = Vec::new();
    let mut push = |name, passed, detail: String| checks.push(ClaimCheck { name, passed, detail });

    let best = minimizing_k_and_u(shape)?;
    push(
        "kAndU",
        best.k == cert.k && best.u == cert.u,
        format!("expected k = {}, u = {}; certificate has k = {}, u = {}", best.k, best.u, cert.k, cert.u),
    );

    match assemble_delta(shape, cert.k, cert.u) {
        Ok(expected) if expected == prod => {
            push("factors", true, format!("matches the {} construction", cert.case))
        }
        Ok(expected) => push("factors", false, format!("expected {expected}, found {prod}")),
        Err(e) => push("factors", false, format!("cannot rebuild the construction: {e}")),
    }

    let degree = prod.degree();
    push(
        "degree",
        degree == cert.claims.degree && degree == t * target_s,
        format!(
            "claimed {}, recomputed {}, required t(m-k)(n-k) = {}",
            cert.claims.degree,
            degree,
            t * target_s
        ),
    );

    let count = prod.count();
    let count_ok = if k >= 1 { count == target_s } else { count <= target_s };
    push(
        "count",
        count == cert.claims.count && count_ok,
        format!(
            "claimed {}, recomputed {}, bound (m-k)(n-k) = {}{}",
            cert.claims.count,
            count,
            target_s,
            if k >= 1 { " (equality required)" } else { "" }
        ),
    );

    let max_exp = prod.leading_monomial().max_exponent() as u64;
    push(
        "maxInitialExponent",
        max_exp == cert.claims.max_initial_exponent && max_exp <= t - k,
        format!(
            "claimed {}, recomputed {}, bound t-k = {}",
            cert.claims.max_initial_exponent,
            max_exp,
            t - k
        ),
    );

    let bruns = bruns_hypothesis_check(&prod, cert.claims.bruns_s.max(1))?;
    push(
        "brunsS",
        cert.claims.bruns_s == target_s && bruns,
        format!(
            "claimed s = {}, required (m-k)(n-k) = {}, h <= s and degree = t*s: {}",
            cert.claims.bruns_s, target_s, bruns
        ),
    );

    let outside = check_not_in_bracket_power(&prod, t - k + 1);
    push(
        "notInBracketPower",
        outside,
        format!("leading exponents < t-k+1 = {}: {}", t - k + 1, outside),
    );

    Ok(VerificationReport { checks })
}
