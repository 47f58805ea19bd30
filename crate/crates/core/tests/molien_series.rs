use num_bigint::BigInt;
use wreath_molien::golden;
use wreath_molien::molienweyl::{
    full_from_parts, full_series, gamma0_series, gamma1_series, su2_label_table, Coset, CosetSpec,
};
use wreath_molien::seriesring::{
    reconstruct_numerator, CyclotomicDenominator, IntPolynomial, TruncatedSeries,
};

fn ints(s: &TruncatedSeries) -> Vec<BigInt> {
    s.to_integers().expect("integral series")
}

#[test]
fn rank_one_cosets_agree_with_reference() {
    let want = golden::ell1_series();
    assert_eq!(ints(&gamma0_series(1, 12).unwrap()), want);
    assert_eq!(ints(&gamma1_series(1, 12).unwrap()), want);
    assert_eq!(ints(&full_series(1, 12).unwrap()), want);
}

#[test]
fn rank_one_rational_function() {
    let q = CyclotomicDenominator::ell1();
    for s in [gamma0_series(1, 20).unwrap(), gamma1_series(1, 20).unwrap()] {
        assert_eq!(
            reconstruct_numerator(&s, &q, 0).unwrap(),
            IntPolynomial::from_i64(&[1])
        );
    }
}

#[test]
fn rank_two_series_to_degree_20() {
    let g0 = gamma0_series(2, 20).unwrap();
    let g1 = gamma1_series(2, 20).unwrap();
    assert_eq!(ints(&g0), golden::ell2_gamma0());
    assert_eq!(ints(&g1), golden::ell2_gamma1());
    let full = full_from_parts(2, &g0, &g1).unwrap();
    assert_eq!(ints(&full), golden::ell2_full());
    assert_eq!(full, full_series(2, 20).unwrap());
}

#[test]
fn whole_group_counts_bounded_by_subgroup() {
    for ell in 1..=2 {
        let g0 = ints(&gamma0_series(ell, 30).unwrap());
        let full = ints(&full_series(ell, 30).unwrap());
        assert!(full.iter().zip(&g0).all(|(a, b)| a <= b));
    }
}

#[test]
fn shorter_runs_are_prefixes() {
    // pruning depends on the target order; results must not
    let long = ints(&gamma0_series(2, 30).unwrap());
    for order in [0, 1, 7, 19] {
        assert_eq!(ints(&gamma0_series(2, order).unwrap()), long[..=order]);
    }
}

#[test]
fn reference_numerators_reexpand_to_series() {
    let q = CyclotomicDenominator::q0();
    let p0 = IntPolynomial::new(golden::p0());
    let p1 = IntPolynomial::new(golden::p1());
    let expand = |p: &IntPolynomial| {
        let mut s = p.to_series(40);
        let r = wreath_molien::seriesring::expand_reciprocal_denominator(&q, 40);
        s = s.mul(&r);
        ints(&s)
    };
    assert_eq!(expand(&p0)[..=20], golden::ell2_gamma0()[..]);
    assert_eq!(expand(&p1)[..=20], golden::ell2_gamma1()[..]);
    assert_eq!(expand(&p0), ints(&gamma0_series(2, 40).unwrap()));
    assert_eq!(expand(&p1), ints(&gamma1_series(2, 40).unwrap()));
}

#[test]
fn coset_specs_match_eigenvalue_counts() {
    let g1 = CosetSpec::new(2, Coset::Gamma1).unwrap();
    assert_eq!(g1.scalar_prefactor.len(), 5);
    assert_eq!(g1.circle_factors.len(), 14);
    let g0 = CosetSpec::new(2, Coset::Gamma0).unwrap();
    assert_eq!(g0.circle_factors.len(), 25);
}

#[test]
fn label_table_dimensions() {
    let table = su2_label_table(25);
    // a dimension has labels iff it has a factor pair of equal parity
    let dims: Vec<usize> = table.iter().map(|r| r.dim).collect();
    let expect: Vec<usize> = (1..=25usize)
        .filter(|n| (1..=*n).any(|a| n % a == 0 && (a + n / a) % 2 == 0))
        .collect();
    assert_eq!(dims, expect);
    for row in &table {
        for (a, b) in &row.labels {
            assert!(a <= b);
            assert_eq!(((a.doubled() + 1) * (b.doubled() + 1)) as usize, row.dim);
            assert!((*a + *b).is_integer());
        }
    }
}
