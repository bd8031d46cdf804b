use ioacheck::algdata::*;
use ioacheck::checkers::*;
use ioacheck::examples::*;
use ioacheck::exactnum::*;
use ioacheck::jacobi::three_term;
use ioacheck::ratfun::*;
use ioacheck::report::{CheckReport, Status};
use ioacheck::series::*;
use proptest::prelude::*;

fn z(n: u32, q: &str) -> AlgebraInstance {
    make_abelian_monomial(&AbelianSpec::from_params(&format!("Z{}", n), q).unwrap()).unwrap()
}

fn corpus() -> Vec<AlgebraInstance> {
    vec![make_trivial_voa(), z(2, "1/4"), z(3, "1/3"), z(4, "1/8")]
}

fn status(rep: &CheckReport, prefix: &str) -> Vec<Status> {
    rep.results.iter().filter(|r| r.axiom.starts_with(prefix)).map(|r| r.status).collect()
}

fn failed_with_witness(rep: &CheckReport, prefix: &str) -> bool {
    rep.results.iter().any(|r| r.axiom.starts_with(prefix) && r.status == Status::Fail && r.witness.is_some())
}

/// W^e with levels 0 and 2, omega = 0: Y(1,x) = 1 and Y(v,x)1 = v.
const TWO_LEVEL: &str = "[colors]\nnames = e\nidentity = e\norder = 2\n\n[fusion]\ne e -> e = 1\n\n[weights]\ne = 0\n\n[dims]\ne = 1 0 1\n\n[vacuum]\nvector = 1\n\n[virasoro]\nc = 0\nomega = zero\n\n[intertwiner e e -> e # 0]\n-1 0.0 0.0 -> 0.0 = 1\n-1 0.0 2.0 -> 2.0 = 1\n-1 2.0 0.0 -> 2.0 = 1\n\n[F e e e ; e]\n1\n\n[Omega e e ; e]\n1\n";

#[test]
fn trivial_voa_passes() {
    let t = make_trivial_voa();
    let rep = check_voa(&t, 8);
    assert!(rep.passed(), "{}", rep.to_text_block());
    assert_eq!(rep.count(Status::Fail), 0);
    assert!(check_module(&t, 0, 8).passed());
    assert_eq!(t.intertwiners[&(0, 0, 0)].len(), 1);
    assert!(check_skew_symmetry_voa(&t).passed());
}

trait Block {
    fn to_text_block(&self) -> String;
}

impl Block for CheckReport {
    fn to_text_block(&self) -> String {
        self.results.iter().map(|r| format!("{:?} {} {:?}\n", r.status, r.axiom, r.witness)).collect()
    }
}

#[test]
fn central_charge_perturbation_is_not_a_pass() {
    let mut t = make_trivial_voa();
    t.central_charge = CycloNumber::one(t.order);
    let rep = check_voa(&t, 8);
    // omega = 0 makes every L(n) vanish, so the central term c/2 on the vacuum is a contradiction
    assert!(failed_with_witness(&rep, "virasoro"), "{}", rep.to_text_block());
    assert_eq!(status(&rep, "identity"), vec![Status::Pass]);
}

#[test]
fn doubled_vacuum_operator_fails_identity() {
    let t = make_trivial_voa();
    let y = t.voa_y();
    let key = t.table(y).entries.keys().next().unwrap().clone();
    let bad = inject_fault(&t, &Fault::Mode { y, key, comp: 0, op: FaultOp::Scale(rint(2)) }).unwrap();
    assert!(failed_with_witness(&check_voa(&bad, 8), "identity"));
}

#[test]
fn modules() {
    let i = z(2, "1/4");
    assert!(check_module(&i, 1, 8).passed());
    // weight shifted by 1/2 in memory (the loader would reject the file outright)
    let mut s = z(2, "0");
    assert_eq!(s.omega, OmegaSpec::Zero);
    assert!(check_module(&s, 1, 8).passed());
    s.spaces[1].weight = rat(1, 2);
    assert!(parse_instance(&save_instance(&s)).is_err());
    let rep = check_module(&s, 1, 8);
    assert!(failed_with_witness(&rep, "L(0)-grading"), "{}", rep.to_text_block());
}

#[test]
fn intertwiners() {
    for inst in corpus() {
        for a in 0..inst.ncolors() {
            assert!(check_intertwiner(&inst, YRef::new(inst.e(), a, a, 0), 8).passed());
        }
    }
    let mut i = z(2, "1/4");
    let z8 = CycloNumber::root_of_unity(1, 8, i.order).unwrap();
    let y = YRef::new(1, 1, 0, 0);
    i.intertwiners.get_mut(&(1, 1, 0)).unwrap()[0] = i.table(y).scale(&z8);
    assert!(check_intertwiner(&i, y, 8).passed());
    // zero the module action on color 1: the action Jacobi identity breaks
    let m = YRef::new(0, 1, 1, 0);
    let key = i.table(m).entries.keys().next().unwrap().clone();
    let bad = inject_fault(&i, &Fault::Mode { y: m, key, comp: 0, op: FaultOp::Zero }).unwrap();
    let rep = check_intertwiner(&bad, y, 8);
    assert!(failed_with_witness(&rep, "jacobi"), "{}", rep.to_text_block());
}

#[test]
fn skew_symmetry_catches_sign_flip() {
    let inst = parse_instance(TWO_LEVEL).unwrap();
    assert!(check_skew_symmetry_voa(&inst).passed());
    let bad = parse_instance(&TWO_LEVEL.replace("-1 2.0 0.0 -> 2.0 = 1", "-1 2.0 0.0 -> 2.0 = -1")).unwrap();
    assert!(failed_with_witness(&check_skew_symmetry_voa(&bad), ""));
    // on a one-dimensional VOA a sign flip is invisible to skew-symmetry but not to the identity axiom
    let t = make_trivial_voa();
    let key = t.table(t.voa_y()).entries.keys().next().unwrap().clone();
    let flip = inject_fault(&t, &Fault::Mode { y: t.voa_y(), key, comp: 0, op: FaultOp::Scale(rint(-1)) }).unwrap();
    assert!(failed_with_witness(&check_voa(&flip, 8), "identity"));
}

#[test]
fn single_valuedness() {
    let mut t = make_trivial_voa();
    let y = t.voa_y();
    let tab = &mut t.intertwiners.get_mut(&(0, 0, 0)).unwrap()[0];
    let (k, v) = tab.entries.iter().next().map(|(k, v)| (k.clone(), v.clone())).unwrap();
    tab.entries.insert((&k.0 + rat(1, 2), k.1, k.2, k.3, k.4), v);
    let rep = check_ioa_axioms(&t, 8);
    assert!(rep.results.iter().any(|r| r.status == Status::Fail && r.axiom.contains("single-valued")), "{}", rep.to_text_block());
    assert!(check_intertwiner(&make_trivial_voa(), y, 8).passed());
}

#[test]
fn ioa_axioms_on_z2_record_scalars() {
    let rep = check_ioa_axioms(&z(2, "1/4"), 8);
    assert!(rep.passed(), "{}", rep.to_text_block());
    let all: String = rep.results.iter().map(|r| format!("{} {:?}\n", r.axiom, r.reason)).chain(rep.notes.iter().cloned()).collect();
    assert!(all.contains("lambda") || all.contains("λ"), "{}", all);
}

#[test]
fn omega_monomial_formula() {
    for inst in corpus() {
        for y in inst.yrefs() {
            let d = monomial_exponent(&inst, y).unwrap();
            let lam = inst.table(y).entries.values().next().unwrap()[0].clone();
            for r in [-1i64, 0] {
                let t = omega_r(&inst, y, r).unwrap();
                assert_eq!((t.yref.a1, t.yref.a2, t.yref.a3), (y.a2, y.a1, y.a3));
                let (k, v) = t.entries.iter().next().unwrap();
                assert_eq!(-&k.0 - rint(1), d);
                let ph = CycloNumber::phase_half_turns(&(&d * rint(2 * r + 1)), inst.order).unwrap();
                assert_eq!(v[0], &ph * &lam);
            }
            let a = omega_r(&inst, y, 0).unwrap();
            let b = omega_r(&inst, y, -1).unwrap();
            let ratio = CycloNumber::phase_half_turns(&(&d * rint(2)), inst.order).unwrap();
            assert_eq!(a.entries.values().next().unwrap()[0], &b.entries.values().next().unwrap()[0] * &ratio);
        }
    }
}

#[test]
fn omega_round_trips() {
    for inst in corpus() {
        for y in inst.yrefs() {
            for r in [-2, -1, 0, 1] {
                assert_eq!(omega_round_trip(&inst, y, r).unwrap(), None, "{:?} r={}", y, r);
            }
        }
    }
    let t = parse_instance(TWO_LEVEL).unwrap();
    for r in [-2, -1, 0, 1] {
        assert_eq!(omega_round_trip(&t, t.voa_y(), r).unwrap(), None);
    }
}

#[test]
fn omega_declared_matrices_match() {
    for inst in corpus() {
        for &key in inst.omat.keys() {
            assert_eq!(recompute_omega(&inst, key).unwrap().as_ref(), Some(&inst.omat[&key]), "{:?}", key);
        }
    }
}

#[test]
fn omega_output_is_an_intertwiner() {
    for inst in corpus() {
        for y in inst.yrefs() {
            if !check_intertwiner(&inst, y, 8).passed() {
                continue;
            }
            let t = omega_r(&inst, y, -1).unwrap();
            let mut swapped = inst.clone();
            let ty = (t.yref.a1, t.yref.a2, t.yref.a3);
            swapped.intertwiners.get_mut(&ty).unwrap()[t.yref.index] = t.clone();
            assert!(check_intertwiner(&swapped, t.yref, 8).passed(), "{:?}", y);
        }
    }
}

// Independent expander for the three delta terms at one coefficient.
fn coeff(s: &FormalSeries, e: [i64; 2]) -> CycloNumber {
    s.extract_coefficient(&e.map(rint)).unwrap()
}

fn binom(n: i64, m: i64) -> Rational {
    binomial(&rint(n), m as u64)
}

fn brute(a: &FormalSeries, b: &FormalSeries, c: &FormalSeries, lo: [i64; 3], e: [i64; 3]) -> (CycloNumber, CycloNumber) {
    let o = a.order();
    let [e0, e1, e2] = e;
    let n = -e0 - 1;
    let mut lhs = CycloNumber::zero(o);
    // x0^-1 d((x1-x2)/x0) A
    for m in 0..=(e2 - lo[0]).max(-1) {
        let k = binom(n, m) * rint(if m % 2 == 0 { 1 } else { -1 });
        lhs = &lhs + &coeff(a, [e1 - n + m, e2 - m]).scale(&k);
    }
    // - x0^-1 d((x2-x1)/(-x0)) B
    for m in 0..=(e1 - lo[1]).max(-1) {
        let k = binom(n, m) * rint(if (n + m).rem_euclid(2) == 0 { 1 } else { -1 });
        lhs = &lhs - &coeff(b, [e1 - m, e2 - n + m]).scale(&k);
    }
    // x2^-1 d((x1-x0)/x2) C
    let mut rhs = CycloNumber::zero(o);
    for m in 0..=(e0 - lo[2]).max(-1) {
        let nn = e1 + m;
        let k = binom(nn, m) * rint(if m % 2 == 0 { 1 } else { -1 });
        rhs = &rhs + &coeff(c, [e0 - m, e2 + nn + 1]).scale(&k);
    }
    (lhs, rhs)
}

fn support_lo(s: &FormalSeries, i: usize, fallback: i64) -> i64 {
    s.terms().keys().map(|e| e[i].floor().to_integer().try_into().unwrap()).min().unwrap_or(fallback)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn three_term_matches_brute_force(p in -2i64..=2, q in -2i64..=2, s in -3i64..=2, g in prop::collection::vec(((0u32..3, 0u32..3), -3i64..=3), 1..4), bump in prop::option::of((-3i64..3, -3i64..3, 1i64..3))) {
        let o = 1;
        let core = Poly2::from_terms(o, g.iter().filter(|(_, c)| *c != 0).map(|&(e, c)| (e, CycloNumber::from_int(c, o))));
        prop_assume!(!core.is_zero());
        let f = LaurentRational::new(Chart::X12, [rint(p), rint(q), rint(s)], core);
        let w = 5;
        let big = 20;
        let a = iota12(&f, &Window(vec![Interval::full(), Interval::up_to(rint(big))])).unwrap();
        let b = iota21(&f, &Window(vec![Interval::up_to(rint(big)), Interval::full()])).unwrap();
        let mut c = iota20(&f, &Window(vec![Interval::up_to(rint(big)), Interval::full()])).unwrap();
        if let Some((x, y, k)) = bump {
            c.add_term(vec![rint(x), rint(y)], CycloNumber::from_int(k, o));
        }
        let tt = three_term(&a, &b, &c, w).unwrap();
        let lo = [support_lo(&a, 1, 0), support_lo(&b, 0, 0), support_lo(&c, 0, 0)];
        let mut first = None;
        'scan: for e0 in -w..=w {
            for e1 in -w..=w {
                for e2 in -w..=w {
                    let (l, r) = brute(&a, &b, &c, lo, [e0, e1, e2]);
                    if l != r {
                        first = Some(([e0, e1, e2], l, r));
                        break 'scan;
                    }
                }
            }
        }
        prop_assert_eq!(tt.witness.is_some(), first.is_some());
        // a bump at (x, y) shows up at (x, 0, y - 1) with coefficient k
        prop_assert!(bump.is_none() || first.is_some());
        if let (Some((e, l, r)), Some((be, bl, br))) = (tt.witness, first) {
            prop_assert_eq!(e, be.map(rint).to_vec());
            prop_assert_eq!((l, r), (bl, br));
        }
        prop_assert!(tt.skipped == 0 || tt.checked > 0);
    }
}
