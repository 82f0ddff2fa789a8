//! Property-based checks of the exact arithmetic layers.

use cstlab::cyclotomic::{rat, Cyclotomic};
use cstlab::group::{group_builtin, parse_group_spec};
use cstlab::poly::{parse_poly, poly_det, Poly, PolyMatrix};
use proptest::prelude::*;

fn arb_rational() -> impl Strategy<Value = cstlab::cyclotomic::Rational> {
    (-20i64..=20, 1i64..=12).prop_map(|(p, q)| rat(p, q))
}

/// Sums of rational multiples of powers of one root of unity; conductors are
/// kept small so products stay inside the lcm cap.
fn arb_cyclotomic() -> impl Strategy<Value = Cyclotomic> {
    let conductors = prop_oneof![Just(1u64), Just(2), Just(3), Just(4), Just(5), Just(6), Just(12)];
    (conductors, proptest::collection::vec((0i64..12, arb_rational()), 0..4)).prop_map(
        |(n, terms)| {
            let mut acc = Cyclotomic::zero();
            for (e, r) in terms {
                let z = Cyclotomic::zeta_pow(n, e).unwrap().scale(&r);
                acc = acc.add(&z);
            }
            acc
        },
    )
}

fn arb_poly(nvars: usize, maxdeg: u32) -> impl Strategy<Value = Poly> {
    proptest::collection::vec(
        (
            proptest::collection::vec(0u32..=maxdeg, nvars),
            arb_rational(),
        ),
        0..5,
    )
    .prop_map(move |terms| {
        let mut f = Poly::zero(nvars);
        for (mut exps, c) in terms {
            let total: u32 = exps.iter().sum();
            if total > maxdeg {
                for e in exps.iter_mut() {
                    *e %= 2;
                }
            }
            f = f.add(&Poly::monomial(nvars, exps, Cyclotomic::from_rational(c)));
        }
        f
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cyclotomic_ring_axioms(a in arb_cyclotomic(), b in arb_cyclotomic(), c in arb_cyclotomic()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.sub(&a), Cyclotomic::zero());
    }

    #[test]
    fn cyclotomic_conjugation_and_inverse(a in arb_cyclotomic(), b in arb_cyclotomic()) {
        prop_assert_eq!(a.conj().conj(), a.clone());
        prop_assert_eq!(a.mul(&b).conj(), a.conj().mul(&b.conj()));
        // |a|^2 is a nonnegative rational.
        let norm = a.mul(&a.conj());
        if let Some(r) = norm.to_rational() {
            prop_assert!(r >= rat(0, 1));
        }
        if !a.is_zero() {
            let inv = a.inv().unwrap();
            prop_assert!(a.mul(&inv).is_one());
        }
    }

    #[test]
    fn poly_ring_axioms(f in arb_poly(2, 4), g in arb_poly(2, 4), h in arb_poly(2, 4)) {
        prop_assert_eq!(f.mul(&g), g.mul(&f));
        prop_assert_eq!(f.mul(&g.add(&h)), f.mul(&g).add(&f.mul(&h)));
        prop_assert_eq!(f.add(&g).sub(&g), f.clone());
    }

    #[test]
    fn exact_division_round_trip(f in arb_poly(2, 4), g in arb_poly(2, 4)) {
        prop_assume!(!g.is_zero());
        let prod = f.mul(&g);
        let back = prod.exact_divide(&g).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn group_action_is_a_right_composition(f in arb_poly(2, 4), i in 0usize..6, j in 0usize..6) {
        // act(sigma, act(tau, f)) = act(sigma tau, f) for the S3-like D3 catalog.
        let g = group_builtin(&parse_group_spec("D3").unwrap()).unwrap();
        let a = &g.elements[i];
        let b = &g.elements[j];
        let ab = g.mult[i][j];
        let lhs = f
            .substitute_linear(&g.elements[g.inverse[j]].matrix)
            .unwrap()
            .substitute_linear(&g.elements[g.inverse[i]].matrix)
            .unwrap();
        let rhs = f
            .substitute_linear(&g.elements[g.inverse[ab]].matrix)
            .unwrap();
        let _ = (a, b);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn truncation_is_idempotent_and_additive(f in arb_poly(3, 5), g in arb_poly(3, 5), d in 0u32..6) {
        prop_assert_eq!(f.truncate_degree(d).truncate_degree(d), f.truncate_degree(d));
        prop_assert_eq!(
            f.add(&g).truncate_degree(d),
            f.truncate_degree(d).add(&g.truncate_degree(d))
        );
    }

    #[test]
    fn determinant_is_multiplicative_on_diagonal_join(f in arb_poly(1, 3), g in arb_poly(1, 3)) {
        let m = PolyMatrix {
            entries: vec![
                vec![f.clone(), Poly::zero(1)],
                vec![Poly::zero(1), g.clone()],
            ],
        };
        prop_assert_eq!(poly_det(&m).unwrap(), f.mul(&g));
    }

    #[test]
    fn parser_round_trips_display(f in arb_poly(2, 4)) {
        let text = f.to_string();
        let back = parse_poly(&text, 2).unwrap();
        prop_assert_eq!(back, f);
    }
}
