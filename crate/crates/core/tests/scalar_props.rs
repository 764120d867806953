use proptest::prelude::*;
use qsym::scalar::{qbinom_v, qfactorial_v};
use qsym::Scalar;

const D: u32 = 2;

fn laurent(terms: &[(i64, i64)]) -> Scalar {
    terms.iter().fold(Scalar::from_int(0).with_d(D), |acc, &(c, e)| &acc + &(&Scalar::from_int(c) * &Scalar::v_pow(e, D)))
}

fn scalar() -> impl Strategy<Value = Scalar> {
    let terms = prop::collection::vec((-4i64..=4, -4i64..=4), 1..=4);
    (terms.clone(), terms).prop_filter_map("nonzero denominator", |(n, d)| {
        let den = laurent(&d);
        if den == Scalar::from_int(0).with_d(D) {
            return None;
        }
        Some(&laurent(&n) / &den)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn bar_is_an_involution(a in scalar()) {
        prop_assert_eq!(a.bar().bar(), a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn difference_with_itself_is_zero(a in scalar()) {
        prop_assert_eq!(&a - &a, Scalar::from_int(0).with_d(D));
    }

    #[test]
    fn bar_is_a_ring_map(a in scalar(), b in scalar()) {
        prop_assert_eq!((&a * &b).bar(), &a.bar() * &b.bar());
        prop_assert_eq!((&a + &b).bar(), &a.bar() + &b.bar());
    }

    #[test]
    fn distributive(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn text_round_trip(a in scalar()) {
        prop_assert_eq!(Scalar::parse(&a.to_string(), D).unwrap(), a);
    }

    #[test]
    fn binomials_times_factorials(a in 0i64..7, b in 0i64..7, e in 1i64..3) {
        let lhs = &qbinom_v(a + b, a, e, D).unwrap() * &(&qfactorial_v(a, e, D).unwrap() * &qfactorial_v(b, e, D).unwrap());
        prop_assert_eq!(lhs, qfactorial_v(a + b, e, D).unwrap());
    }
}
