use ioacheck::exactnum::*;
use ioacheck::ratfun::*;
use ioacheck::series::*;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

mod oracle;
use oracle::{exponent, is_int, oracle12, oracle20, oracle21, raw, same, Raw};

const O: u32 = 24;

fn window() -> Window {
    Window::cube(2, 12)
}

#[test]
fn iota_examples() {
    let o = 1;
    let f = LaurentRational::monomial(Chart::X12, [rint(0), rint(0), rint(-1)], CycloNumber::one(o));
    let s = iota12(&f, &window()).unwrap();
    for m in 0..=11 {
        assert!(s.extract_coefficient(&[rint(-1 - m), rint(m)]).unwrap().is_one());
    }
    let p = LaurentRational::new(Chart::X12, [rint(1), rint(0), rint(0)], Poly2::linear(o, 2, 3));
    assert_eq!(iota12(&p, &window()).unwrap(), iota21(&p, &window()).unwrap());
    assert_eq!(iota12(&p, &window()).unwrap().len(), 2);
    let inv_sum = LaurentRational::monomial(Chart::X12, [rint(-1), rint(0), rint(0)], CycloNumber::one(o));
    let s = iota20(&inv_sum, &window()).unwrap();
    for m in 0..=11 {
        assert_eq!(s.extract_coefficient(&[rint(m), rint(-1 - m)]).unwrap(), CycloNumber::from_int(if m % 2 == 0 { 1 } else { -1 }, o));
    }
}

#[test]
fn iota_difference_is_delta_derivative() {
    for t in 1..=3i64 {
        let f = LaurentRational::monomial(Chart::X12, [rint(0), rint(0), rint(-t)], CycloNumber::one(1));
        let w = Window::cube(2, 20);
        let d = s_sub(&iota12(&f, &w).unwrap(), &iota21(&f, &w).unwrap()).unwrap();
        for e1 in -20..=20 {
            for e2 in -20..=20 {
                // (1/(t-1)!) d^{t-1}/dx2^{t-1} of x1^{-1} delta(x2/x1)
                let want = if e1 + e2 == -t { binomial(&rint(e2 + t - 1), (t - 1) as u64) } else { Rational::zero() };
                assert_eq!(d.extract_coefficient(&[rint(e1), rint(e2)]).unwrap().as_rational().unwrap(), want, "t={} at ({},{})", t, e1, e2);
            }
        }
    }
}

#[test]
fn rat_equal_examples() {
    let o = 1;
    let d1 = LaurentRational::new(Chart::X12, [rint(0), rint(0), rint(0)], Poly2::linear(o, 1, -1));
    let d2 = LaurentRational::monomial(Chart::X12, [rint(0), rint(0), rint(1)], CycloNumber::one(o));
    assert!(rat_equal(&d1, &d2).unwrap());
    let sq = Poly2::from_terms(o, [((2, 0), CycloNumber::one(o)), ((0, 2), CycloNumber::from_int(-1, o))]);
    let lhs = LaurentRational::new(Chart::X12, [rint(0), rint(0), rint(-1)], sq);
    let rhs = LaurentRational::new(Chart::X12, [rint(0), rint(0), rint(0)], Poly2::linear(o, 1, 1));
    assert!(rat_equal(&lhs, &rhs).unwrap());
    let half = LaurentRational::monomial(Chart::X12, [rat(1, 2), rint(0), rint(0)], CycloNumber::one(o));
    assert!(!rat_equal(&lhs, &half).unwrap());
}

#[test]
fn decompose_examples() {
    let o = 12;
    let basis = vec![GBasisElement { label: "a".into(), a: rat(1, 2), b: rat(1, 3), c: rat(-1, 6) }, GBasisElement { label: "b".into(), a: rint(0), b: rint(0), c: rint(0) }];
    validate_gbasis(&basis).unwrap();
    let fa = basis[0].function(o);
    let x1 = LaurentRational::monomial(Chart::X12, [rint(1), rint(0), rint(0)], CycloNumber::one(o));
    let d = decompose_in_gbasis(&x1.mul(&fa).unwrap(), &basis).unwrap();
    assert_eq!(d.len(), 1);
    assert!(rat_equal(&d["a"], &x1).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn iota_maps_match_binomial_oracle(f in raw()) {
        let lr = f.build();
        let w = window();
        prop_assert_eq!(same(&iota12(&lr, &w).unwrap(), &oracle12(&f, &w)), Ok(()));
        prop_assert_eq!(same(&iota21(&lr, &w).unwrap(), &oracle21(&f, &w)), Ok(()));
        let w20 = Window(vec![w.0[0].clone(), w.0[1].clone()]);
        prop_assert_eq!(same(&iota20(&lr, &w20).unwrap(), &oracle20(&f, &w20)), Ok(()));
    }

    #[test]
    fn iota12_injective(f in raw(), g in raw()) {
        let (a, b) = (f.build(), Raw { p: f.p.clone(), q: f.q.clone(), s: f.s.clone(), g: g.g.clone() }.build());
        let w = Window::cube(2, 24);
        let eq = iota12(&a, &w).unwrap() == iota12(&b, &w).unwrap();
        prop_assert_eq!(eq, rat_equal(&a, &b).unwrap());
    }

    #[test]
    fn iota12_multiplicative(f in raw(), g in raw()) {
        let (a, b) = (f.build(), g.build());
        let w = Window(vec![Interval::full(), Interval::up_to(rint(8))]);
        let prod = iota12(&a.mul(&b).unwrap(), &w).unwrap();
        let sp = s_mul(&iota12(&a, &w).unwrap(), &iota12(&b, &w).unwrap()).unwrap();
        let cw = prod.window().intersect(sp.window());
        prop_assert!(!cw.is_empty());
        prop_assert_eq!(first_difference(&prod.restrict(&cw), &sp.restrict(&cw)).unwrap(), None);
    }

    #[test]
    fn iota12_iota21_agree_without_inverse(f in raw(), s in 0i64..3) {
        let f = Raw { s: rint(s), ..f };
        let lr = f.build();
        prop_assume!(!lr.exps()[2].is_negative());
        let w = window();
        prop_assert_eq!(iota12(&lr, &w).unwrap(), iota21(&lr, &w).unwrap());
    }

    #[test]
    fn decompose_reconstructs(f in raw(), extra in exponent()) {
        let lr = f.build();
        let [a, b, c] = lr.coset();
        let basis = vec![
            GBasisElement { label: "hit".into(), a: &a + &c, b, c },
            GBasisElement { label: "other".into(), a: frac01(&(&a + &extra + rat(1, 7))), b: rint(0), c: rint(0) },
        ];
        let d = decompose_in_gbasis(&lr, &basis).unwrap();
        let mut back = LaurentRational::zero(Chart::X12, O);
        for el in &basis {
            if let Some(k) = d.get(&el.label) {
                prop_assert!(k.coset().iter().all(|x| x.is_zero()));
                back = back.add(&k.mul(&el.function(O)).unwrap()).unwrap();
            }
        }
        prop_assert!(rat_equal(&back, &lr).unwrap());
        let one = LaurentRational::monomial(Chart::X12, [rint(0), rint(0), rint(0)], CycloNumber::one(O));
        prop_assert!(one.coset().iter().all(|x| is_int(x)));
    }
}
