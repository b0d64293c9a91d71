//! Reference implementations used as test oracles. Nothing here calls into the
//! library's polynomial engine, search, or formula code.

#![allow(dead_code)]

use std::collections::BTreeMap;

/// Exponent vector (row-major, `mn` slots) → coefficient in `[1, p)`.
pub type NaivePoly = BTreeMap<Vec<u32>, u64>;

pub fn naive_var(m: usize, n: usize, i: usize, j: usize) -> NaivePoly {
    let mut e = vec![0; m * n];
    e[(i - 1) * n + (j - 1)] = 1;
    BTreeMap::from([(e, 1)])
}

pub fn naive_add(a: &NaivePoly, b: &NaivePoly, p: u64) -> NaivePoly {
    let mut out = a.clone();
    for (m, c) in b {
        let slot = out.entry(m.clone()).or_insert(0);
        *slot = (*slot + c) % p;
    }
    out.retain(|_, c| *c != 0);
    out
}

pub fn naive_scale(a: &NaivePoly, c: u64, p: u64) -> NaivePoly {
    let mut out: NaivePoly = a.iter().map(|(m, x)| (m.clone(), x * c % p)).collect();
    out.retain(|_, c| *c != 0);
    out
}

/// Schoolbook product, every pair of terms.
pub fn naive_mul(a: &NaivePoly, b: &NaivePoly, p: u64) -> NaivePoly {
    let mut out = NaivePoly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let m: Vec<u32> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
            let slot = out.entry(m).or_insert(0);
            *slot = (*slot + ca * cb) % p;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

/// Determinant by cofactor expansion along the first listed row.
pub fn laplace_minor(m: usize, n: usize, rows: &[usize], cols: &[usize], p: u64) -> NaivePoly {
    if rows.len() == 1 {
        return naive_var(m, n, rows[0], cols[0]);
    }
    let mut acc = NaivePoly::new();
    for (idx, &c) in cols.iter().enumerate() {
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let cof = laplace_minor(m, n, &rows[1..], &rest, p);
        let term = naive_mul(&naive_var(m, n, rows[0], c), &cof, p);
        let sign = if idx % 2 == 0 { 1 } else { p - 1 };
        acc = naive_add(&acc, &naive_scale(&term, sign, p), p);
    }
    acc
}

/// Lex-greatest exponent vector: `BTreeMap` keys are ascending under the
/// same lexicographic comparison.
pub fn naive_initial(a: &NaivePoly) -> Option<Vec<u32>> {
    a.keys().next_back().cloned()
}

pub fn survives(a: &NaivePoly, q: u32) -> bool {
    a.keys().any(|m| m.iter().all(|&e| e < q))
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..=n {
            cur.push(x);
            go(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(1, n, k, &mut cur, &mut out);
    out
}

/// All size-`t` minors as (rows, cols), rows-major enumeration.
pub fn all_minors(m: usize, n: usize, t: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    for r in k_subsets(m, t) {
        for c in k_subsets(n, t) {
            out.push((r.clone(), c));
        }
    }
    out
}

fn multisets(g: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn go(start: usize, g: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for x in start..g {
            cur.push(x);
            go(x, g, r, cur, out);
            cur.pop();
        }
    }
    go(0, g, r, &mut Vec::new(), &mut out);
    out
}

/// `ν` by brute force: for `r = 1, 2, …` expand every multiset product of `r`
/// generators in full, no bracket reduction, until none survives.
/// Returns `ν` and the lexicographically least surviving multiset of size `ν`.
pub fn oracle_nu(m: usize, n: usize, t: usize, p: u64, q: u32) -> (u64, Vec<usize>) {
    let gens: Vec<NaivePoly> = all_minors(m, n, t)
        .iter()
        .map(|(r, c)| laplace_minor(m, n, r, c, p))
        .collect();
    let mut best = (0u64, Vec::new());
    for r in 1.. {
        let mut found = None;
        for ms in multisets(gens.len(), r) {
            let mut prod: NaivePoly = BTreeMap::from([(vec![0; m * n], 1)]);
            for &i in &ms {
                prod = naive_mul(&prod, &gens[i], p);
            }
            if survives(&prod, q) {
                found = Some(ms);
                break;
            }
        }
        match found {
            Some(ms) => best = (r as u64, ms),
            None => return best,
        }
    }
    unreachable!()
}

/// Reduced fraction `(num, den)` of `min_k (m−k)(n−k)/(t−k)` by enumerating
/// every `k` and comparing by cross-multiplication.
pub fn fpt_by_enumeration(m: u128, n: u128, t: u128) -> (u128, u128) {
    let mut best: Option<(u128, u128)> = None;
    for k in 0..t {
        let cand = ((m - k) * (n - k), t - k);
        best = match best {
            None => Some(cand),
            Some(b) if cand.0 * b.1 < b.0 * cand.1 => Some(cand),
            Some(b) => Some(b),
        };
    }
    let (a, b) = best.unwrap();
    let g = gcd(a, b);
    (a / g, b / g)
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
