//! Property tests pinning the structural invariants: group laws in the
//! normal form, homomorphism of word evaluation, functoriality of the
//! Möbius realization, the chart dictionary involution, exactness of
//! piecewise-linear inversion, rotation additivity, enclosure soundness,
//! and wire-format round trips.

use bslab_core::bs::{BsElement, NAdic, Word};
use bslab_core::circle::{angular_distance, CircleMap, PlCircleMap};
use bslab_core::rotation::{default_basepoints, rotation_enclosure};
use bslab_core::serialize::{parse_rational, rational_string};
use bslab_core::{CirclePoint, Integer, Rational, Value};
use num_traits::Pow;
use proptest::prelude::*;

/// Group elements with bounded scaling exponent and n-adic translation
/// m / n^d, across the whole sampled base range.
fn bs_element(n: u32) -> impl Strategy<Value = BsElement> {
    (-3i64..=3, -20i64..=20, 0u32..=2).prop_map(move |(k, m, d)| {
        let t = Rational::new(Integer::from(m), Integer::from(n).pow(d));
        let t = NAdic::from_rational(&t, n).expect("denominator divides n^d");
        BsElement::new(n, k, t).expect("valid element")
    })
}

fn with_base() -> impl Strategy<Value = (u32, BsElement, BsElement, BsElement)> {
    (2u32..=6).prop_flat_map(|n| (Just(n), bs_element(n), bs_element(n), bs_element(n)))
}

fn word(max_len: usize) -> impl Strategy<Value = Word> {
    proptest::collection::vec(prop_oneof![Just('a'), Just('b'), Just('A'), Just('B')], 0..=max_len)
        .prop_map(|cs| cs.into_iter().collect::<String>().parse().expect("valid letters"))
}

/// Exact rationals p/q with 0 <= p < q (angular positions).
fn unit_rational() -> impl Strategy<Value = Rational> {
    (1i64..=1000).prop_flat_map(|q| {
        (0..q).prop_map(move |p| Rational::new(Integer::from(p), Integer::from(q)))
    })
}

proptest! {
    /// Associativity, inverses, and the identity in the normal form.
    #[test]
    fn group_laws_hold_in_the_normal_form((n, g, h, k) in with_base()) {
        prop_assert_eq!(g.compose(&h).compose(&k), g.compose(&h.compose(&k)));
        prop_assert_eq!(g.compose(&g.inverse()), BsElement::identity(n));
        prop_assert_eq!(g.inverse().compose(&g), BsElement::identity(n));
        prop_assert_eq!(g.compose(&BsElement::identity(n)), g.clone());
        prop_assert_eq!(BsElement::identity(n).compose(&g), g.clone());
        prop_assert_eq!(g.inverse().inverse(), g);
    }

    /// Powers agree with repeated composition, including negative ones.
    #[test]
    fn powers_match_repeated_composition((n, g, _, _) in with_base(), m in -6i64..=6) {
        let mut by_hand = BsElement::identity(n);
        let factor = if m >= 0 { g.clone() } else { g.inverse() };
        for _ in 0..m.unsigned_abs() {
            by_hand = by_hand.compose(&factor);
        }
        prop_assert_eq!(g.pow(m), by_hand);
    }

    /// Evaluating words is a homomorphism onto the normal form.
    #[test]
    fn word_evaluation_is_a_homomorphism(n in 2u32..=6, u in word(24), v in word(24)) {
        let eval = |w: &Word| BsElement::from_word(n, w).expect("words evaluate");
        prop_assert_eq!(eval(&u.concat(&v)), eval(&u).compose(&eval(&v)));
    }

    /// The canonical word of an element evaluates back to the element.
    #[test]
    fn canonical_words_reconstruct_their_elements((n, g, _, _) in with_base()) {
        let w = g.canonical_word();
        prop_assert_eq!(BsElement::from_word(n, &w).expect("evaluates"), g);
    }

    /// The Möbius realization is functorial: realizing a product acts on
    /// points exactly as the chain of realizations does.
    #[test]
    fn moebius_realization_is_functorial(
        (_, g, h, _) in with_base(),
        p in -50i64..=50,
        q in 1i64..=20,
    ) {
        use bslab_core::circle::{MoebiusMap, ProjPoint};
        let x = ProjPoint::finite(Value::from(Rational::new(Integer::from(p), Integer::from(q))));
        let product: MoebiusMap = g.compose(&h).to_moebius();
        let chained = g.to_moebius().eval(&h.to_moebius().eval(&x));
        prop_assert_eq!(product.eval(&x), chained);
    }

    /// Angular -> projective -> angular is the identity: exactly on the
    /// quarter points, within float slack elsewhere.
    #[test]
    fn chart_dictionary_is_an_involution(theta in unit_rational()) {
        let v = Value::from(theta.clone());
        let point = CirclePoint::angular(v.clone());
        match point.projective_value() {
            None => {
                // Only angular 0 maps to infinity, and comes back exactly.
                prop_assert_eq!(v.clone(), Value::zero());
                prop_assert_eq!(CirclePoint::infinity().angular_value(), Value::zero());
            }
            Some(t) => {
                let back = CirclePoint::projective(t).angular_value();
                let quarter = &theta * &Rational::from_integer(Integer::from(4));
                if quarter.is_integer() {
                    prop_assert!(back.is_exact());
                    prop_assert_eq!(back, v);
                } else {
                    let d = angular_distance(
                        &CirclePoint::angular(v),
                        &CirclePoint::angular(back),
                    );
                    prop_assert!(d.to_f64() <= 1e-9, "round trip drifted by {}", d.to_f64());
                }
            }
        }
    }

    /// Rigid rotations add, and a rotation by p/q has order dividing q.
    #[test]
    fn rotations_add_and_have_finite_order(
        p1 in 0i64..30, q1 in 1i64..=30,
        p2 in 0i64..30, q2 in 1i64..=30,
        x in unit_rational(),
    ) {
        let r1 = Rational::new(Integer::from(p1 % q1), Integer::from(q1));
        let r2 = Rational::new(Integer::from(p2 % q2), Integer::from(q2));
        let pt = CirclePoint::angular(Value::from(x));

        let sum = CircleMap::rotation(Value::from(&r1 + &r2));
        let chained = CircleMap::rotation(Value::from(r1.clone()))
            .compose(&CircleMap::rotation(Value::from(r2)));
        prop_assert!(sum.evaluate(&pt).same_point(&chained.evaluate(&pt)));

        let rot = CircleMap::rotation(Value::from(r1));
        prop_assert!(rot.evaluate_iter(&pt, q1 as u32).same_point(&pt));
    }

    /// Piecewise-linear circle maps invert exactly on exact points.
    #[test]
    fn pl_circle_maps_invert_exactly(
        knots in proptest::collection::btree_set(1u8..64, 1..7),
        seedvals in proptest::collection::btree_set(0u8..64, 8),
        x in 0i64..128,
    ) {
        let grid = |j: u8| Value::ratio(i64::from(j), 64);
        let count = knots.len() + 1;
        // The canonical fundamental-domain description starts at angular 0.
        let knots: Vec<Value> = std::iter::once(Value::zero())
            .chain(knots.into_iter().map(grid))
            .collect();
        let vals: Vec<Value> = seedvals.into_iter().take(count).map(grid).collect();
        prop_assume!(vals.len() == count);

        let f = CircleMap::PlCircle(
            PlCircleMap::from_knot_values(knots, vals).expect("monotone knot data"),
        );
        let inv = f.inverse().expect("pl maps invert");
        let pt = CirclePoint::angular(Value::ratio(x, 128));
        let round = inv.evaluate(&f.evaluate(&pt));
        prop_assert!(round.angular_value().is_exact());
        prop_assert!(round.same_point(&pt));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Rotation-number enclosures are sound and meet the 2/N width bound,
    /// whatever the basepoints see along the way.
    #[test]
    fn rotation_enclosures_contain_the_true_number(
        q in 1i64..=40,
        p in 0i64..40,
        iterations in 50u32..=150,
    ) {
        let rho = Rational::new(Integer::from(p % q), Integer::from(q));
        let map = CircleMap::rotation(Value::from(rho.clone()));
        let enc = rotation_enclosure(&map, iterations, &default_basepoints())
            .expect("rotations enclose");
        prop_assert!(enc.contains(&Value::from(rho)));
        prop_assert!(enc.width() <= Value::ratio(2, i64::from(iterations)));
    }
}

proptest! {
    /// The exact wire format round-trips through both the plain string
    /// form and the JSON report form.
    #[test]
    fn exact_values_round_trip_through_serialization(
        num in -1_000_000i64..=1_000_000,
        den in 1i64..=1_000_000,
    ) {
        let r = Rational::new(Integer::from(num), Integer::from(den));
        prop_assert_eq!(parse_rational(&rational_string(&r)).expect("parses"), r.clone());

        let v = Value::from(r);
        let json = serde_json::to_string(&v).expect("serializes");
        let back: Value = serde_json::from_str(&json).expect("deserializes");
        prop_assert_eq!(back, v);
    }
}
