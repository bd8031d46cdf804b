use ioacheck::exactnum::*;
use num_traits::{One, Zero};
use proptest::prelude::*;

const ORDERS: [u32; 8] = [1, 2, 3, 4, 5, 6, 8, 12];

fn cyclo(order: u32) -> impl Strategy<Value = CycloNumber> {
    prop::collection::vec((-6i64..=6, 1i64..=4), euler_phi(order)).prop_map(move |v| CycloNumber::from_powers(order, v.into_iter().map(|(n, d)| rat(n, d)).collect()))
}

fn triple() -> impl Strategy<Value = (CycloNumber, CycloNumber, CycloNumber)> {
    prop::sample::select(ORDERS.to_vec()).prop_flat_map(|o| (cyclo(o), cyclo(o), cyclo(o)))
}

#[test]
fn root_of_unity_examples() {
    let i = CycloNumber::root_of_unity(1, 4, 4).unwrap();
    assert_eq!(field_mul(&i, &i).unwrap(), CycloNumber::from_int(-1, 4));
    let z = CycloNumber::root_of_unity(1, 8, 8).unwrap();
    let zb = CycloNumber::root_of_unity(7, 8, 8).unwrap();
    assert!(field_mul(&z, &zb).unwrap().is_one());
    // zeta_6^2 reduced modulo x^2 - x + 1 is zeta_6 - 1
    let z3 = CycloNumber::root_of_unity(2, 6, 6).unwrap();
    assert_eq!(z3.coeffs(), &[rint(-1), rint(1)]);
    assert_eq!(z3, CycloNumber::root_of_unity(1, 3, 6).unwrap());
    assert!(CycloNumber::root_of_unity(0, 5, 5).unwrap().is_one());
    assert!(matches!(CycloNumber::root_of_unity(1, 4, 6), Err(NumError::IncompatibleOrder(4, 6))));
}

#[test]
fn field_examples() {
    let x = CycloNumber::root_of_unity(1, 8, 8).unwrap();
    assert!(field_mul(&CycloNumber::zero(8), &x).unwrap().is_zero());
    let i = CycloNumber::root_of_unity(1, 4, 4).unwrap();
    assert_eq!(field_inv(&i).unwrap(), CycloNumber::root_of_unity(3, 4, 4).unwrap());
    let s = field_add(&CycloNumber::from_rational(rat(1, 2), 1), &CycloNumber::from_rational(rat(1, 3), 1)).unwrap();
    assert_eq!(s.as_rational(), Some(rat(5, 6)));
    assert!(field_inv(&CycloNumber::zero(3)).is_err());
    assert!(field_add(&CycloNumber::one(3), &CycloNumber::one(4)).is_err());
}

#[test]
fn text_round_trip() {
    for (t, o) in [("1/2", 1), ("z(1,4)", 4), ("2*z(1,8) + -1/3", 8), ("z(2,6)", 6)] {
        let c = CycloNumber::parse(t, o).unwrap();
        assert_eq!(CycloNumber::parse(&c.to_text(), o).unwrap(), c);
    }
}

#[test]
fn minimal_order_covers_phases() {
    let exps = [rat(1, 4), rat(1, 3)];
    let n = minimal_order(exps.iter(), &[]);
    for q in &exps {
        for r in -2..=1 {
            assert!(CycloNumber::phase_representable(&(q * rint(2 * r + 1)), n));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms((a, b, c) in triple()) {
        let ab = field_add(&a, &b).unwrap();
        prop_assert_eq!(field_add(&ab, &c).unwrap(), field_add(&a, &field_add(&b, &c).unwrap()).unwrap());
        let m = field_mul(&field_mul(&a, &b).unwrap(), &c).unwrap();
        prop_assert_eq!(m, field_mul(&a, &field_mul(&b, &c).unwrap()).unwrap());
        prop_assert_eq!(field_mul(&a, &b).unwrap(), field_mul(&b, &a).unwrap());
        let lhs = field_mul(&ab, &c).unwrap();
        let rhs = field_add(&field_mul(&a, &c).unwrap(), &field_mul(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        if !a.is_zero() {
            prop_assert!(field_mul(&a, &field_inv(&a).unwrap()).unwrap().is_one());
        }
        prop_assert!(field_add(&a, &a.neg()).unwrap().is_zero());
    }

    #[test]
    fn roots_have_order_dividing_n(n in 1u32..=24, k in 0i64..24) {
        let k = k % n as i64;
        let z = CycloNumber::root_of_unity(k, n, n).unwrap();
        prop_assert!(z.pow(n as u64).is_one());
    }

    // Same element built from a long power vector and from a sum of reduced powers.
    #[test]
    fn canonical_form(o in prop::sample::select(ORDERS.to_vec()), v in prop::collection::vec(-5i64..=5, 1..30)) {
        let long = CycloNumber::from_powers(o, v.iter().map(|&x| rint(x)).collect());
        let mut sum = CycloNumber::zero(o);
        for (k, &x) in v.iter().enumerate() {
            sum = field_add(&sum, &CycloNumber::zeta_pow(k as i64, o).scale(&rint(x))).unwrap();
        }
        prop_assert!(field_eq(&long, &sum).unwrap());
        prop_assert_eq!(long.coeffs().len(), euler_phi(o));
    }

    #[test]
    fn binomial_matches_falling_factorial(n in -8i64..=8, d in 1i64..=4, m in 0u64..8) {
        let r = rat(n, d);
        let mut p = Rational::one();
        for j in 0..m {
            p *= &r - rint(j as i64);
        }
        prop_assert_eq!(binomial(&r, m), p / factorial(m));
        prop_assert!(!factorial(m).is_zero());
    }
}
