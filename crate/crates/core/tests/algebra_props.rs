use kohncert_core::{jacobian_det, parse_germ, GaussianRational, Germ, Order, Var};
use proptest::prelude::*;

fn gq() -> impl Strategy<Value = GaussianRational> {
    (-6i64..=6, 1i64..=4, -6i64..=6, 1i64..=4).prop_map(|(a, b, c, d)| {
        GaussianRational::new(
            GaussianRational::from_ratio(a, b).re,
            GaussianRational::from_ratio(c, d).re,
        )
    })
}

fn germ() -> impl Strategy<Value = Germ> {
    prop::collection::vec((-5i64..=5, 0u32..5, 0u32..5), 0..6)
        .prop_map(|terms| Germ::from_int_terms(&terms))
}

fn germ_gq() -> impl Strategy<Value = Germ> {
    prop::collection::vec((gq(), 0u32..4, 0u32..4), 0..5).prop_map(|terms| {
        Germ::from_terms(
            terms
                .into_iter()
                .map(|(c, e1, e2)| (kohncert_core::ExponentPair::new(e1, e2), c)),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in gq(), b in gq(), c in gq()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        if let Some(inv) = a.inv() {
            prop_assert_eq!(&a * &inv, GaussianRational::from_integer(1));
        }
        prop_assert_eq!(a.conj().conj(), a.clone());
        prop_assert_eq!((&a * &a.conj()).re, a.norm_sqr());
    }

    #[test]
    fn ring_axioms(f in germ_gq(), g in germ(), h in germ()) {
        prop_assert_eq!(&(&f + &g) + &h, &f + &(&g + &h));
        prop_assert_eq!(&f * &g, &g * &f);
        prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
        prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
        prop_assert!((&f - &f).is_zero());
        prop_assert_eq!(&f * &Germ::one(), f.clone());
    }

    #[test]
    fn leibniz(f in germ(), g in germ_gq()) {
        for v in [Var::Z1, Var::Z2] {
            let lhs = (&f * &g).differentiate(v);
            let rhs = &(&f.differentiate(v) * &g) + &(&f * &g.differentiate(v));
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn jacobian_identities(f in germ(), g in germ(), h in germ(), c in gq()) {
        prop_assert_eq!(jacobian_det(&f, &g), -&jacobian_det(&g, &f));
        prop_assert!(jacobian_det(&f, &f).is_zero());
        let lhs = jacobian_det(&(&f + &h.scale(&c)), &g);
        let rhs = &jacobian_det(&f, &g) + &jacobian_det(&h, &g).scale(&c);
        prop_assert_eq!(lhs, rhs);
        // product rule in the first slot
        let lhs = jacobian_det(&(&f * &h), &g);
        let rhs = &(&f * &jacobian_det(&h, &g)) + &(&h * &jacobian_det(&f, &g));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn order_is_additive(f in germ(), g in germ_gq()) {
        prop_assert_eq!((&f * &g).order(), f.order() + g.order());
        if f.is_zero() {
            prop_assert_eq!(f.order(), Order::Infinite);
        }
    }

    #[test]
    fn display_round_trips(f in germ_gq()) {
        let text = f.to_string();
        let back = parse_germ(&text).unwrap();
        prop_assert_eq!(back, f, "{}", text);
    }

    #[test]
    fn linear_substitution_composes(f in germ(), a in -2i64..=2, b in -2i64..=2) {
        // (z1, z2) -> (z1 + a z2, z2) then (z1, z2) -> (z1 - a z2, z2) is the identity
        let one = GaussianRational::from_integer(1);
        let zero = GaussianRational::from_integer(0);
        let fwd = f.linear_substitute(&one, &GaussianRational::from_integer(a), &zero, &one);
        let back = fwd.linear_substitute(&one, &GaussianRational::from_integer(-a), &zero, &one);
        prop_assert_eq!(back, f.clone());
        let sw = f.linear_substitute(&zero, &one, &one, &GaussianRational::from_integer(b));
        prop_assert_eq!(sw.order(), f.order());
    }
}

#[test]
fn parser_examples() {
    let f = parse_germ("(z1 + i*z2)^2 - 3/2*z1*z2").unwrap();
    assert_eq!(
        f,
        Germ::from_terms([
            (kohncert_core::ExponentPair::new(2, 0), GaussianRational::from_integer(1)),
            (
                kohncert_core::ExponentPair::new(1, 1),
                &(&GaussianRational::i() * &GaussianRational::from_integer(2)) - &GaussianRational::from_ratio(3, 2)
            ),
            (kohncert_core::ExponentPair::new(0, 2), GaussianRational::from_integer(-1)),
        ])
    );
    assert!(parse_germ("z3").is_err());
    assert!(parse_germ("z1^").is_err());
    assert!(parse_germ("").is_err());
    assert!(parse_germ("1/0").is_err());
}
