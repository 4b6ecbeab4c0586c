mod common;

use chordsos::poly::{parse_polynomial, rat, Polynomial};
use common::{random_poly, rng};
use proptest::prelude::*;

#[test]
fn parser_matches_hand_built() {
    let p = parse_polynomial("x1^2*x2 - 3*x2 + 1/2", 2).unwrap();
    let q = Polynomial::from_terms(
        2,
        [(vec![2, 1], rat(1)), (vec![0, 1], rat(-3)), (vec![0, 0], chordsos::poly::ratio(1, 2))],
    )
    .unwrap();
    assert_eq!(p, q);
    assert_eq!(parse_polynomial(&p.to_string(), 2).unwrap(), p);
}

fn triple(seed: u64) -> (Polynomial, Polynomial, Polynomial) {
    let mut r = rng(seed);
    (random_poly(3, 3, 4, &mut r), random_poly(3, 3, 4, &mut r), random_poly(3, 2, 3, &mut r))
}

proptest! {
    #[test]
    fn ring_laws(seed in any::<u64>()) {
        let (a, b, c) = triple(seed);
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &Polynomial::one(3), a.clone());
        prop_assert_eq!(a.pow(2), &a * &a);
    }

    #[test]
    fn degree_and_evaluation_are_compatible(seed in any::<u64>(), x in prop::array::uniform3(-2.0f64..2.0)) {
        let (a, b, _) = triple(seed);
        let ab = &a * &b;
        if !a.is_zero() && !b.is_zero() {
            prop_assert_eq!(ab.degree(), a.degree() + b.degree());
        }
        let lhs = ab.eval(&x);
        let rhs = a.eval(&x) * b.eval(&x);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
    }

    #[test]
    fn display_parses_back(seed in any::<u64>()) {
        let (a, _, _) = triple(seed);
        prop_assert_eq!(parse_polynomial(&a.to_string(), 3).unwrap(), a);
    }
}
