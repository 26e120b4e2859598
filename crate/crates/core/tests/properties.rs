use asympt_core::limit::{limit, substitute, varying_rank, LimitValue, ParamField, SequenceAnsatz};
use asympt_core::poly::PolynomialMapping;
use asympt_core::{
    enumerate_facons, parse_mapping, render_mapping, Facon, GaussianRational, Polynomial,
};
use num_complex::Complex64;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn coeff() -> impl Strategy<Value = GaussianRational> {
    (-20i64..=20, 1i64..=4, -5i64..=5, 1i64..=3)
        .prop_map(|(a, b, c, d)| GaussianRational::from_parts(a, b, c, d))
}

fn nonzero_coeff() -> impl Strategy<Value = GaussianRational> {
    coeff().prop_filter("nonzero", |c| !c.is_zero())
}

fn poly(max_degree: u32, max_terms: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((prop::collection::vec(0..=max_degree, 3), coeff()), 0..=max_terms).prop_map(
        move |terms| {
            let terms = terms.into_iter().filter(|(e, _)| e.iter().sum::<u32>() <= max_degree);
            Polynomial::from_terms(3, terms).unwrap()
        },
    )
}

fn point() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.5f64..1.5, -1.5f64..1.5).prop_map(|(a, b)| Complex64::new(a, b)), 3)
}

fn exact_point() -> impl Strategy<Value = Vec<GaussianRational>> {
    prop::collection::vec(coeff(), 3)
}

fn facon3() -> impl Strategy<Value = Facon> {
    let all = enumerate_facons(3).unwrap();
    (0..all.len()).prop_map(move |i| all[i].clone())
}

/// Template ansatz for a façon, weights 1..=2 per diverging coordinate.
fn ansatz() -> impl Strategy<Value = SequenceAnsatz> {
    (facon3(), prop::collection::vec(1i32..=2, 3)).prop_map(|(f, w)| {
        let w = &w[..f.inf_set().len()];
        SequenceAnsatz::template(&f, w).unwrap().0
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn ring_laws(a in poly(3, 5), b in poly(3, 5), c in poly(3, 5)) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &Polynomial::one(3), a.clone());
    }

    #[test]
    fn degree_is_additive(a in poly(3, 4), b in poly(3, 4)) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        let d = |p: &Polynomial| p.degree().finite().unwrap();
        prop_assert_eq!(d(&(&a * &b)), d(&a) + d(&b));
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in poly(3, 5), b in poly(3, 5), x in point()) {
        let (va, vb) = (a.evaluate(&x).unwrap(), b.evaluate(&x).unwrap());
        let prod = (&a * &b).evaluate(&x).unwrap();
        let sum = (&a + &b).evaluate(&x).unwrap();
        let scale = 1.0f64.max(prod.norm()).max((va * vb).norm());
        prop_assert!((prod - va * vb).norm() <= 1e-9 * scale);
        prop_assert!((sum - (va + vb)).norm() <= 1e-9 * 1.0f64.max(sum.norm()));
    }

    #[test]
    fn exact_evaluation_is_a_homomorphism(a in poly(2, 4), b in poly(2, 4), x in exact_point()) {
        let (va, vb) = (a.evaluate_exact(&x).unwrap(), b.evaluate_exact(&x).unwrap());
        prop_assert_eq!((&a * &b).evaluate_exact(&x).unwrap(), &va * &vb);
        prop_assert_eq!((&a + &b).evaluate_exact(&x).unwrap(), &va + &vb);
    }

    #[test]
    fn composition_commutes_with_evaluation(p in poly(2, 4), q in prop::collection::vec(poly(2, 3), 3), x in exact_point()) {
        let inner: Vec<GaussianRational> = q.iter().map(|c| c.evaluate_exact(&x).unwrap()).collect();
        prop_assert_eq!(p.compose(&q).unwrap().evaluate_exact(&x).unwrap(), p.evaluate_exact(&inner).unwrap());
    }

    #[test]
    fn gaussian_inverse(a in nonzero_coeff(), b in coeff()) {
        prop_assert_eq!(&a * &a.inv().unwrap(), GaussianRational::one());
        prop_assert_eq!(&a.checked_div(&a).unwrap() * &b, b);
    }

    #[test]
    fn parse_render_round_trip(c in prop::collection::vec(poly(3, 5), 3)) {
        let f = PolynomialMapping::new(c).unwrap();
        let text = render_mapping(&f);
        let g = parse_mapping(&text).unwrap();
        prop_assert_eq!(&g, &f);
        prop_assert_eq!(render_mapping(&g), text);
    }

    #[test]
    fn substitution_is_a_homomorphism(s in ansatz(), p in poly(2, 4), q in poly(2, 4)) {
        let (sp, sq) = (substitute(&p, &s).unwrap(), substitute(&q, &s).unwrap());
        prop_assert_eq!(substitute(&(&p + &q), &s).unwrap(), &sp + &sq);
        prop_assert_eq!(substitute(&(&p * &q), &s).unwrap(), &sp * &sq);
    }

    #[test]
    fn constants_have_fixed_limits(s in ansatz(), c in coeff()) {
        let l = limit(&substitute(&Polynomial::constant(3, c.clone()), &s).unwrap());
        prop_assert_eq!(&l, &LimitValue::Finite(ParamField::constant(s.num_params(), c)));
        prop_assert!(l.is_fixed());
    }

    #[test]
    fn varying_rank_ignores_order_and_fixed_entries(
        s in ansatz(),
        c in prop::collection::vec(poly(2, 3), 3),
        k in coeff(),
    ) {
        let finite: Vec<LimitValue> = c
            .iter()
            .map(|p| limit(&substitute(p, &s).unwrap()))
            .filter(LimitValue::is_finite)
            .collect();
        let r = varying_rank(&finite, 1).unwrap();
        let mut reordered = finite.clone();
        reordered.reverse();
        reordered.push(LimitValue::Finite(ParamField::constant(s.num_params(), k)));
        prop_assert_eq!(varying_rank(&reordered, 2).unwrap(), r);
    }
}

#[test]
fn facon_text_round_trip() {
    for n in 1..=5 {
        for f in enumerate_facons(n).unwrap() {
            assert_eq!(Facon::parse(n, &f.to_string()).unwrap(), f);
        }
    }
}
