mod common;

use std::collections::BTreeMap;

use common::{laplace_minor, naive_initial, naive_mul, NaivePoly};
use fptdet::polyfp::{expand_minor, leading_monomial_of_product, MinorSpec, Monomial, PolyRing, Polynomial};
use proptest::prelude::*;

fn to_naive(f: &Polynomial) -> NaivePoly {
    f.terms()
        .iter()
        .map(|(m, c)| (m.exponents().to_vec(), *c))
        .collect::<BTreeMap<_, _>>()
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7, 31, 65_521])
}

fn monomial(nv: usize) -> impl Strategy<Value = Monomial> {
    prop::collection::vec(0u32..4, nv).prop_map(Monomial::from_exponents)
}

fn poly(rows: usize, cols: usize, p: u64) -> impl Strategy<Value = Polynomial> {
    let ring = PolyRing::new(rows, cols, p).unwrap();
    prop::collection::vec((monomial(rows * cols), -50i64..50), 0..7)
        .prop_map(move |terms| Polynomial::from_terms(ring, terms))
}

fn subset(n: usize, k: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::sample::subsequence((1..=n).collect::<Vec<_>>(), k)
}

fn minor(rows: usize, cols: usize, max_size: usize) -> impl Strategy<Value = MinorSpec> {
    (1..=rows.min(cols).min(max_size)).prop_flat_map(move |r| {
        (subset(rows, r), subset(cols, r)).prop_map(|(rows, cols)| MinorSpec::new(rows, cols).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn term_order_is_a_multiplicative_total_order(
        a in monomial(6), b in monomial(6), c in monomial(6)
    ) {
        let relations = [a < b, a == b, a > b];
        prop_assert_eq!(relations.iter().filter(|&&x| x).count(), 1);
        if a > b {
            prop_assert!(a.mul(&c) > b.mul(&c));
        }
        prop_assert!(Monomial::one(6) <= a);
    }

    #[test]
    fn initial_form_is_multiplicative(
        (f, g) in prime().prop_flat_map(|p| (poly(2, 3, p), poly(2, 3, p)))
    ) {
        prop_assume!(!f.is_zero() && !g.is_zero());
        let p = f.ring().characteristic();
        let (mf, cf) = f.initial_form().unwrap();
        let (mg, cg) = g.initial_form().unwrap();
        let (mh, ch) = f.mul(&g).unwrap().initial_form().unwrap();
        prop_assert_eq!(mh, mf.mul(&mg));
        prop_assert_eq!(ch, cf * cg % p);
    }

    #[test]
    fn mul_matches_schoolbook(
        (f, g) in prime().prop_flat_map(|p| (poly(2, 2, p), poly(2, 2, p)))
    ) {
        let p = f.ring().characteristic();
        prop_assert_eq!(to_naive(&f.mul(&g).unwrap()), naive_mul(&to_naive(&f), &to_naive(&g), p));
    }

    #[test]
    fn add_is_commutative_with_zero_identity(
        (f, g) in prime().prop_flat_map(|p| (poly(2, 3, p), poly(2, 3, p)))
    ) {
        prop_assert_eq!(f.add(&g).unwrap(), g.add(&f).unwrap());
        prop_assert_eq!(f.add(&Polynomial::zero(f.ring())).unwrap(), f.clone());
        prop_assert!(f.sub(&f).unwrap().is_zero());
    }

    #[test]
    fn minors_match_laplace_expansion(
        (spec, p) in (minor(4, 5, 4), prime())
    ) {
        let ring = PolyRing::new(4, 5, p).unwrap();
        let ours = to_naive(&expand_minor(ring, &spec).unwrap());
        let reference = laplace_minor(4, 5, &spec.rows, &spec.cols, p);
        prop_assert_eq!(&ours, &reference);
        let fact: usize = (1..=spec.size()).product();
        prop_assert_eq!(ours.len(), fact);
    }

    #[test]
    fn combinatorial_leading_monomial_matches_expansion(
        (rows, cols, specs, p) in (1usize..=3, 1usize..=4)
            .prop_filter("rows <= cols", |(r, c)| r <= c)
            .prop_flat_map(|(r, c)| (
                Just(r),
                Just(c),
                prop::collection::vec((minor(r, c, 3), 1u32..3), 1..=4),
                prime(),
            ))
    ) {
        // Cap total multiplicity at four factors.
        let mut budget = 4u32;
        let specs: Vec<(MinorSpec, u32)> = specs
            .into_iter()
            .filter_map(|(s, m)| {
                let m = m.min(budget);
                budget -= m;
                (m > 0).then_some((s, m))
            })
            .collect();
        let ring = PolyRing::new(rows, cols, p).unwrap();
        let mut full = Polynomial::one(ring);
        for (s, m) in &specs {
            full = full.mul(&expand_minor(ring, s).unwrap().pow(*m as u64)).unwrap();
        }
        let (lead, c) = full.initial_form().unwrap();
        prop_assert_eq!(c, 1);
        prop_assert_eq!(&lead, &leading_monomial_of_product(rows, cols, &specs).unwrap());
        prop_assert_eq!(Some(lead.exponents().to_vec()), naive_initial(&to_naive(&full)));
    }
}

#[test]
fn big_minor_matches_laplace() {
    // Size 6 goes through the cofactor path.
    let ring = PolyRing::new(6, 7, 3).unwrap();
    let spec = MinorSpec::new(vec![1, 2, 3, 4, 5, 6], vec![1, 2, 4, 5, 6, 7]).unwrap();
    assert_eq!(
        to_naive(&expand_minor(ring, &spec).unwrap()),
        laplace_minor(6, 7, &spec.rows, &spec.cols, 3)
    );
}
