use hallmhd_core::symexpr::{
    ratio, substitute_divergence, Coeff, DerivAtom, Direction, Expression, FieldSymbol, Monomial,
    VectorTriple,
};
use proptest::prelude::*;

fn symbols() -> Vec<FieldSymbol> {
    vec![
        FieldSymbol::axisymmetric("f"),
        FieldSymbol::general("g"),
        FieldSymbol::general("u_r"),
        FieldSymbol::general("u_theta"),
        FieldSymbol::general("u_z"),
    ]
}

fn atom() -> impl Strategy<Value = DerivAtom> {
    (0..5usize, 0..3u32, 0..3u32, 0..2u32)
        .prop_map(|(s, a, b, c)| DerivAtom::new(symbols()[s].clone(), a, b, c))
}

fn coeff() -> impl Strategy<Value = Coeff> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| ratio(n, d))
}

fn expr() -> impl Strategy<Value = Expression> {
    prop::collection::vec(
        (coeff(), -2i32..=2, prop::collection::vec(atom(), 0..3)),
        0..4,
    )
    .prop_map(|terms| {
        Expression::from_terms(terms.into_iter().map(|(c, k, a)| (c, Monomial::new(k, a))))
    })
}

fn direction() -> impl Strategy<Value = Direction> {
    prop::sample::select(Direction::ALL.to_vec())
}

fn triple() -> VectorTriple {
    let s = symbols();
    VectorTriple::divergence_free(s[2].clone(), s[3].clone(), s[4].clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn ring_laws(a in expr(), b in expr(), c in expr()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn normalization_is_idempotent(a in expr()) {
        let n = a.normalize();
        prop_assert_eq!(n.normalize(), n.clone());
        prop_assert_eq!(n, a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn partial_derivatives_commute(a in expr(), x in direction(), y in direction()) {
        prop_assert_eq!(a.d(x).d(y), a.d(y).d(x));
    }

    #[test]
    fn leibniz_rule(a in expr(), b in expr(), x in direction()) {
        let lhs = (&a * &b).d(x);
        let rhs = &(&a.d(x) * &b) + &(&a * &b.d(x));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn divergence_substitution_commutes_with_dz(a in expr()) {
        let u = triple();
        let lhs = substitute_divergence(&a.d(Direction::Z), &u).unwrap();
        let rhs = substitute_divergence(&a, &u).unwrap().d(Direction::Z);
        prop_assert_eq!(lhs, substitute_divergence(&rhs, &u).unwrap());
    }

    #[test]
    fn divergence_substitution_is_multiplicative(a in expr(), b in expr()) {
        let u = triple();
        // r-free factor: drop the r power from every term of b
        let b = Expression::from_terms(b.terms().map(|t| (t.coeff.clone(), Monomial::new(0, t.atoms().to_vec()))));
        let lhs = substitute_divergence(&(&a * &b), &u).unwrap();
        let rhs = &substitute_divergence(&a, &u).unwrap() * &substitute_divergence(&b, &u).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn divergence_substitution_removes_radial_derivatives(a in expr()) {
        let u = triple();
        let s = substitute_divergence(&a, &u).unwrap();
        prop_assert!(s.atoms().iter().all(|x| x.symbol != u.r || x.n_r == 0));
        prop_assert_eq!(substitute_divergence(&s, &u).unwrap(), s);
    }
}
