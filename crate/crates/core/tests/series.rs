use ioacheck::exactnum::*;
use ioacheck::series::*;
use proptest::prelude::*;

mod oracle;
use oracle::delta_oracle;

/// Kernel materialized on [-w,w]^3, reordered to (x0, x1, x2).
fn kernel_series(k: &DeltaKernel, w: i64) -> FormalSeries {
    delta_two_summand(k, &Window::cube(3, w), 1).unwrap().reorder(&["x0", "x1", "x2"]).unwrap()
}

fn coeff_at(s: &FormalSeries, e: [i64; 3]) -> Rational {
    s.extract_coefficient(&e.map(rint)).unwrap().as_rational().unwrap()
}

const W: i64 = 12;

#[test]
fn kernel_matches_direct_expander() {
    let cases = [
        (DeltaKernel::new("x0", "x1", -1, "x2", false), -1, 1, [0, 1, 2]),
        (DeltaKernel::new("x0", "x2", -1, "x1", true), -1, -1, [0, 2, 1]),
        (DeltaKernel::new("x2", "x1", -1, "x0", false), -1, 1, [2, 1, 0]),
        (DeltaKernel::new("x1", "x2", 1, "x0", false), 1, 1, [1, 2, 0]),
    ];
    for (k, s, eps, idx) in cases {
        let ser = kernel_series(&k, W);
        for a in -W..=W {
            for b in -W..=W {
                for c in -W..=W {
                    let e = [a, b, c];
                    let want = delta_oracle(s, eps, e[idx[0]], e[idx[1]], e[idx[2]]);
                    assert_eq!(coeff_at(&ser, e), want, "{:?} at {:?}", k, e);
                }
            }
        }
    }
}

#[test]
fn first_delta_identity() {
    let lhs = kernel_series(&DeltaKernel::new("x1", "x2", 1, "x0", false), W);
    let rhs = kernel_series(&DeltaKernel::new("x2", "x1", -1, "x0", false), W);
    assert_eq!(first_difference(&lhs, &rhs).unwrap(), None);
    assert!(!lhs.is_empty());
}

#[test]
fn second_delta_identity() {
    let a = kernel_series(&DeltaKernel::new("x0", "x1", -1, "x2", false), W);
    let b = kernel_series(&DeltaKernel::new("x0", "x2", -1, "x1", true), W);
    let c = kernel_series(&DeltaKernel::new("x2", "x1", -1, "x0", false), W);
    let lhs = s_sub(&a, &b).unwrap();
    assert_eq!(first_difference(&lhs, &c).unwrap(), None);
}

#[test]
fn spec_examples() {
    let d = delta_series("x", &Interval::ints(-10, 10), 1).unwrap();
    assert!(d.extract_coefficient(&[rint(5)]).unwrap().is_one());
    let z = FormalSeries::zero(&["x"], 1, Window::cube(1, 4));
    assert!(z.extract_coefficient(&[rint(3)]).unwrap().is_zero());
    assert!(matches!(d.extract_coefficient(&[rint(11)]), Err(SeriesError::Uncertified(_)) | Err(_)));
    // residue of x^n delta(x) is 1
    for n in -3..=3 {
        let xn = FormalSeries::polynomial(&["x"], 1, [(vec![rint(n)], CycloNumber::one(1))]);
        let p = s_mul(&xn, &d).unwrap();
        assert!(residue(&p, "x").unwrap().extract_coefficient(&[]).unwrap().is_one());
    }
    // (x2-x1)^-1 in x1/x2 vs (x1-x2)^-1 in x2/x1: disjoint supports
    let w = Window::cube(2, 8);
    let a = binomial_expand("x1", -1, "x2", &rint(-1), &w, 1).unwrap();
    let b = binomial_expand("x2", -1, "x1", &rint(-1), &w, 1).unwrap().reorder(&["x1", "x2"]).unwrap();
    assert!(!a.is_empty() && !b.is_empty());
    for e in a.terms().keys() {
        assert!(!b.terms().contains_key(e));
    }
}

fn laurent_poly(lo: i64, hi: i64) -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((lo..=hi, -5i64..=5), 1..8)
}

fn poly(terms: &[(i64, i64)]) -> FormalSeries {
    let mut s = FormalSeries::polynomial(&["x"], 1, []);
    for &(e, c) in terms {
        s = s_add(&s, &FormalSeries::polynomial(&["x"], 1, [(vec![rint(e)], CycloNumber::from_int(c, 1))])).unwrap();
    }
    s
}

/// Lower-truncated series with coefficients c(n) for n >= lo, certified up to hi.
fn truncated(lo: i64, hi: i64, c: impl Fn(i64) -> i64) -> FormalSeries {
    let mut s = FormalSeries::new(&["x"], 1, ExponentGrid::integer(1), Window(vec![Interval::up_to(rint(hi))]), Window(vec![Interval::new(Bound::int(lo), Bound::PosInf)]));
    for n in lo..=hi {
        s.add_term(vec![rint(n)], CycloNumber::from_int(c(n), 1));
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn delta_absorbs_evaluation(f in laurent_poly(-10, 10)) {
        let f = poly(&f);
        let d = delta_series("x", &Interval::ints(-30, 30), 1).unwrap();
        let fd = s_mul(&f, &d).unwrap();
        let target = Window::cube(1, 20);
        prop_assert!(fd.window().intersect(&target) == target);
        let f1: i64 = f.terms().values().map(|c| c.as_rational().unwrap().to_integer().try_into().unwrap_or(0i64)).sum();
        for n in -20..=20 {
            prop_assert_eq!(fd.extract_coefficient(&[rint(n)]).unwrap(), CycloNumber::from_int(f1, 1));
        }
    }

    #[test]
    fn residue_of_derivative_vanishes(f in laurent_poly(-10, 10), half in any::<bool>()) {
        let mut f = poly(&f);
        if half {
            f = s_mul(&f, &FormalSeries::polynomial(&["x"], 1, [(vec![rat(1, 2)], CycloNumber::one(1))])).unwrap();
        }
        let df = derivative(&f, "x").unwrap();
        prop_assert!(residue(&df, "x").unwrap().is_empty());
    }

    #[test]
    fn mul_commutative_associative(a in laurent_poly(-6, 6), b in laurent_poly(-6, 6), lo in -4i64..4) {
        let (a, b) = (poly(&a), poly(&b));
        let c = truncated(lo, 15, |n| n * n - 3);
        prop_assert_eq!(s_mul(&a, &b).unwrap(), s_mul(&b, &a).unwrap());
        let l = s_mul(&s_mul(&a, &b).unwrap(), &c).unwrap();
        let r = s_mul(&a, &s_mul(&b, &c).unwrap()).unwrap();
        let w = l.window().intersect(r.window());
        prop_assert_eq!(first_difference(&l.restrict(&w), &r.restrict(&w)).unwrap(), None);
    }

    // Every certified coefficient of a product equals the full convolution of the
    // untruncated coefficient functions.
    #[test]
    fn window_soundness(la in -5i64..3, lb in -5i64..3, ha in 3i64..12, hb in 3i64..12, ka in 1i64..5, kb in 1i64..5) {
        let ca = move |n: i64| (n * ka) % 7 - 2;
        let cb = move |n: i64| (n * n + kb) % 5 - 1;
        let p = s_mul(&truncated(la, ha, ca), &truncated(lb, hb, cb)).unwrap();
        let hi = p.window().0[0].hi.finite().cloned().unwrap().to_integer().try_into().unwrap();
        prop_assert!(hi >= la + lb);
        for k in la + lb - 2..=hi {
            let brute: i64 = (la..=k - lb).map(|i| ca(i) * cb(k - i)).sum();
            prop_assert_eq!(p.extract_coefficient(&[rint(k)]).unwrap(), CycloNumber::from_int(brute, 1));
        }
        prop_assert!(p.extract_coefficient(&[rint(hi + 1)]).is_err());
    }
}
