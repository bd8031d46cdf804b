use ioacheck::algdata::*;
use ioacheck::checkers::{check_voa, recompute_omega};
use ioacheck::cli::gen_example;
use ioacheck::examples::*;
use ioacheck::exactnum::*;
use proptest::prelude::*;

fn z(n: u32, q: &str) -> AlgebraInstance {
    make_abelian_monomial(&AbelianSpec::from_params(&format!("Z{}", n), q).unwrap()).unwrap()
}

fn sum(inst: &AlgebraInstance, a: usize, b: usize) -> usize {
    (0..inst.ncolors()).find(|&c| inst.n(a, b, c) == 1).unwrap()
}

#[test]
fn trivial_generator_matches_constructor() {
    let t = make_trivial_voa();
    assert_eq!(gen_example("trivial", &[]).unwrap(), t);
    validate(&t).unwrap();
    assert!(check_voa(&t, 8).passed());
    assert!(gen_example("trivial", &["x".into()]).is_err());
}

#[test]
fn bad_parameters_rejected() {
    assert!(AbelianSpec::from_params("Z0", "1/4").is_err());
    assert!(AbelianSpec::from_params("Y2", "1/4").is_err());
    assert!(AbelianSpec::from_params("Z3", "0,1/3").is_err());
    assert!(AbelianSpec::from_params("Z2", "a/b").is_err());
    assert!(gen_example("abelian", &["Z2".into()]).is_err());
    assert!(gen_example("abelian", &["Z2".into(), "r=1".into()]).is_err());
    // nonzero weight on the identity element
    assert!(make_abelian_monomial(&AbelianSpec::from_params("Z2", "1/2,0").unwrap()).is_err());
}

#[test]
fn product_group_generates() {
    let i = make_abelian_monomial(&AbelianSpec::from_params("Z2xZ2", "0,1/4,1/4,1/2").unwrap()).unwrap();
    assert_eq!(i.ncolors(), 4);
    validate(&i).unwrap();
}

#[test]
fn declared_omega_is_recomputed() {
    for inst in [z(2, "1/4"), z(3, "1/3"), z(4, "1/8"), z(3, "0,1/3,1/3"), z(2, "0")] {
        for key in inst.omat.keys() {
            let m = recompute_omega(&inst, *key).unwrap().expect("monomial data determines Omega");
            assert_eq!(&m, &inst.omat[key], "{:?}", key);
        }
    }
}

#[test]
fn fault_corpus_is_large_and_addressable() {
    for inst in [make_trivial_voa(), z(2, "1/4"), z(3, "1/3")] {
        let faults = fault_corpus(&inst);
        assert!(faults.len() >= MIN_FAULTS, "{}", faults.len());
        for f in &faults {
            let bad = inject_fault(&inst, f).unwrap();
            assert_ne!(bad, inst, "{}", f);
        }
    }
    let bogus = Fault::F { key: (9, 9, 9, 9), row: 0, col: 0, op: FaultOp::Zero };
    assert!(matches!(inject_fault(&z(2, "1/4"), &bogus), Err(ExampleError::BadAddress(_))));
}

fn spec() -> impl Strategy<Value = (u32, Vec<(i64, i64)>)> {
    (2u32..=4).prop_flat_map(|n| (Just(n), prop::collection::vec((-6i64..=6, prop::sample::select(vec![1i64, 2, 3, 4, 6, 8])), n as usize)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_instances_validate_and_carry_exponent_invariant((n, w) in spec()) {
        let mut weights: Vec<Rational> = w.iter().map(|&(a, b)| rat(a, b)).collect();
        weights[0] = rint(0);
        let text: Vec<String> = weights.iter().map(fmt_rational).collect();
        let inst = make_abelian_monomial(&AbelianSpec::from_params(&format!("Z{}", n), &text.join(",")).unwrap()).unwrap();
        validate(&inst).unwrap();
        prop_assert_eq!(parse_instance(&save_instance(&inst)).unwrap(), inst.clone());
        for y in inst.yrefs() {
            let want = &weights[sum(&inst, y.a1, y.a2)] - &weights[y.a1] - &weights[y.a2];
            prop_assert_eq!(monomial_exponent(&inst, y), Some(want.clone()));
            prop_assert_eq!(inst.h(y.a3) - inst.h(y.a1) - inst.h(y.a2), want);
        }
        for m in inst.omat.values().chain(inst.fmat.values()) {
            prop_assert!(m.get(0, 0).pow(inst.order as u64).is_one());
        }
    }
}
