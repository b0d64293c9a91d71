mod common;

use common::oracle_nu;
use fptdet::frobenius::{
    convergence_table, frobenius_spot_check, generators, nu_determinantal, nu_principal, reduce_mod_bracket,
    Budget, NuOutcome, NuRecord,
};
use fptdet::polyfp::{expand_minor, Monomial, PolyRing, Polynomial};
use fptdet::{fpt_closed_form, MatrixShape};
use proptest::prelude::*;

fn known(o: NuOutcome) -> NuRecord {
    match o {
        NuOutcome::Known(r) => r,
        NuOutcome::Unknown(ex) => panic!("budget: {ex}"),
    }
}

fn witness_indices(rec: &NuRecord) -> Vec<usize> {
    let gens = generators(rec.shape);
    let mut out = Vec::new();
    for (spec, mult) in rec.witness.factors() {
        let idx = gens.iter().position(|g| g == spec).unwrap();
        out.extend(std::iter::repeat_n(idx, *mult as usize));
    }
    out.sort();
    out
}

#[test]
fn frozen_values() {
    // Computed independently by brute-force expansion in a CAS.
    let cases = [
        ((2, 2, 2), 2, 1, 1, vec![0]),
        ((2, 2, 2), 3, 1, 2, vec![0, 0]),
        ((2, 3, 2), 2, 1, 2, vec![0, 1]),
        ((2, 3, 2), 3, 1, 4, vec![0, 0, 1, 1]),
        ((2, 2, 2), 2, 3, 7, vec![0; 7]),
    ];
    for ((m, n, t), p, e, nu, w) in cases {
        let s = MatrixShape::new(m, n, t).unwrap();
        let rec = known(nu_determinantal(s, p, e, Budget::default()).unwrap());
        assert_eq!(rec.nu, nu, "{s} p={p} e={e}");
        assert_eq!(witness_indices(&rec), w, "{s} p={p} e={e}");
    }
}

#[test]
fn matches_full_expansion_oracle() {
    // Every shape with at most three generators, q ≤ 4, plus square
    // determinants up to 3x3.
    let shapes = [(1, 1, 1), (1, 2, 1), (1, 3, 1), (2, 2, 2), (2, 3, 2), (3, 3, 3)];
    for (m, n, t) in shapes {
        let s = MatrixShape::new(m, n, t).unwrap();
        assert!(s.num_generators() <= 3);
        for (p, e) in [(2u64, 1u32), (3, 1), (2, 2)] {
            let q = p.pow(e) as u32;
            let rec = known(nu_determinantal(s, p, e, Budget::default()).unwrap());
            let (nu, w) = oracle_nu(m, n, t, p, q);
            assert_eq!(rec.nu, nu, "{s} p={p} e={e}");
            assert_eq!(witness_indices(&rec), w, "{s} p={p} e={e}");
        }
    }
}

#[test]
fn matches_oracle_on_larger_generator_sets() {
    for (m, n, t, p) in [(2, 4, 2, 2), (3, 3, 2, 2), (1, 5, 1, 3)] {
        let s = MatrixShape::new(m, n, t).unwrap();
        let rec = known(nu_determinantal(s, p, 1, Budget::default()).unwrap());
        let (nu, w) = oracle_nu(m, n, t, p, p as u32);
        assert_eq!((rec.nu, witness_indices(&rec)), (nu, w), "{s} p={p}");
    }
}

#[test]
fn principal_agrees_with_search() {
    for (p, e) in [(2u64, 1u32), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (5, 1), (5, 2)] {
        let s = MatrixShape::new(2, 2, 2).unwrap();
        let q = p.pow(e);
        let ring = PolyRing::new(2, 2, p).unwrap();
        let det = expand_minor(ring, &generators(s)[0]).unwrap();
        let rec = known(nu_determinantal(s, p, e, Budget::default()).unwrap());
        assert_eq!(nu_principal(&det, q as u32).unwrap(), rec.nu);
        assert_eq!(rec.nu, q - 1);
    }
}

#[test]
fn tables_are_monotone_and_bounded() {
    for ((m, n, t), p, e_max) in [((2, 2, 2), 2, 4), ((2, 2, 2), 3, 2), ((2, 3, 2), 2, 2), ((1, 3, 1), 2, 3)] {
        let s = MatrixShape::new(m, n, t).unwrap();
        let table = convergence_table(s, p, e_max, Budget::default()).unwrap();
        assert!(table.complete());
        assert!(table.violations.is_empty(), "{:?}", table.violations);
        let fpt = fpt_closed_form(s).unwrap();
        for rec in &table.rows {
            assert!(rec.ratio() <= fpt);
            assert!(frobenius_spot_check(rec).unwrap(), "{s} e={}", rec.e);
        }
        for w in table.rows.windows(2) {
            assert!(w[1].nu >= p * w[0].nu);
            assert!(w[1].ratio() >= w[0].ratio());
        }
    }
}

#[test]
fn results_are_deterministic_across_thread_counts() {
    let s = MatrixShape::new(3, 3, 2).unwrap();
    let base = known(nu_determinantal(s, 2, 1, Budget::default()).unwrap());
    for threads in [1, 3] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let rec = pool.install(|| known(nu_determinantal(s, 2, 1, Budget::default()).unwrap()));
        assert_eq!((rec.nu, &rec.witness), (base.nu, &base.witness));
    }
}

fn small_poly(ring: PolyRing) -> impl Strategy<Value = Polynomial> {
    let nv = ring.num_vars();
    prop::collection::vec(
        (prop::collection::vec(0u32..4, nv).prop_map(Monomial::from_exponents), 1i64..7),
        0..6,
    )
    .prop_map(move |t| Polynomial::from_terms(ring, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn interleaved_reduction_is_sound(
        (f, g, s) in (prop::sample::select(vec![(1usize, 2usize), (2, 2), (2, 3), (1, 6)]),
                      prop::sample::select(vec![2u64, 3, 5]))
            .prop_flat_map(|((m, n), p)| {
                let ring = PolyRing::new(m, n, p).unwrap();
                (small_poly(ring), small_poly(ring), 1u32..=5)
            })
    ) {
        let direct = reduce_mod_bracket(&f.mul(&g).unwrap(), s);
        let interleaved = reduce_mod_bracket(&reduce_mod_bracket(&f, s).mul(&g).unwrap(), s);
        prop_assert_eq!(&direct, &interleaved);
        prop_assert_eq!(&direct, &f.mul_below(&g, s).unwrap());
    }
}
