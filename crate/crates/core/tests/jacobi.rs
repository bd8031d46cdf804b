use ioacheck::algdata::*;
use ioacheck::checkers::check_voa;
use ioacheck::examples::*;
use ioacheck::exactnum::*;
use ioacheck::jacobi::*;
use ioacheck::msdata::derive_braiding;
use ioacheck::report::Status;
use ioacheck::series::*;

fn z(n: u32, q: &str) -> AlgebraInstance {
    make_abelian_monomial(&AbelianSpec::from_params(&format!("Z{}", n), q).unwrap()).unwrap()
}

fn corpus() -> Vec<AlgebraInstance> {
    vec![make_trivial_voa(), z(2, "1/4"), z(3, "1/3"), z(2, "0"), z(3, "0,1/3,1/3")]
}

fn top(color: usize) -> DualVector {
    DualVector { color, level: 0, index: 0 }
}

#[test]
fn product_and_iterate_on_the_vacuum() {
    let t = make_trivial_voa();
    let q = (0, 0, 0, 0);
    let z = ChannelTensor::basis_product(q, t.f_rows(0, 0, 0, 0)[0], t.order);
    let p = multiply_p(&t, &z, (0, 0), (0, 0), (0, 0), top(0), true).unwrap();
    assert_eq!(p.len(), 1);
    assert!(p.extract_coefficient(&[rint(0), rint(0)]).unwrap().is_one());
    let fz = z.fuse(&t).unwrap();
    assert!(fz.iterate);
    let i = iterate_i(&t, &fz, (0, 0), (0, 0), (0, 0), top(0)).unwrap();
    assert_eq!(i.vars(), &["x0".to_string(), "x2".to_string()]);
    assert!(i.extract_coefficient(&[rint(0), rint(0)]).unwrap().is_one());
}

#[test]
fn monomial_products_have_one_term() {
    let i = z(2, "1/4");
    let q = (1, 1, 1, 1);
    for row in i.f_rows(1, 1, 1, 1) {
        let zt = ChannelTensor::basis_product(q, row, i.order);
        let p = multiply_p(&i, &zt, (0, 0), (0, 0), (0, 0), top(1), true).unwrap();
        assert_eq!(p.len(), 1);
        let (e, c) = p.terms().iter().next().unwrap();
        // a5 = 0: outer exponent q(1)-q(1)-q(0) = 0, inner q(0)-q(1)-q(1) = -1/2
        assert_eq!(row.0, 0);
        assert_eq!(e, &vec![rint(0), rat(-1, 2)]);
        assert!(c.pow(i.order as u64).is_one());
        let zero = ChannelTensor { coeffs: Default::default(), ..zt.clone() };
        assert!(multiply_p(&i, &zero, (0, 0), (0, 0), (0, 0), top(1), true).unwrap().is_empty());
        assert!(iterate_i(&i, &zero.fuse(&i).unwrap(), (0, 0), (0, 0), (0, 0), top(1)).unwrap().is_empty());
    }
    // wrong dual color is a type error
    let zt = ChannelTensor::basis_product(q, i.f_rows(1, 1, 1, 1)[0], i.order);
    assert!(matches!(multiply_p(&i, &zt, (0, 0), (0, 0), (0, 0), top(0), true), Err(JacobiError::Type(_))));
}

fn agree_on_common_window(a: &FormalSeries, b: &FormalSeries) -> bool {
    let w = a.window().intersect(b.window());
    first_difference(&a.restrict(&w), &b.restrict(&w)).unwrap().is_none()
}

#[test]
fn decompositions_reconstruct() {
    for inst in corpus() {
        for q in inst.quadruples() {
            let basis = &inst.gbasis[&q];
            let (a1, a2, a3, a4) = q;
            for row in inst.f_rows(a1, a2, a3, a4) {
                let zt = ChannelTensor::basis_product(q, row, inst.order);
                let p = multiply_p(&inst, &zt, (0, 0), (0, 0), (0, 0), top(a4), true).unwrap();
                let dec = decompose_product(&p, basis).unwrap();
                match reconstruct(&dec, basis, inst.order).unwrap() {
                    Some(back) => assert!(agree_on_common_window(&back, &p), "product {:?}", q),
                    None => assert!(p.is_empty()),
                }
                let i = iterate_i(&inst, &zt.fuse(&inst).unwrap(), (0, 0), (0, 0), (0, 0), top(a4)).unwrap();
                let dec = decompose_iterate(&i, basis).unwrap();
                assert_eq!(dec.side, Side::Iterate);
                match reconstruct(&dec, basis, inst.order).unwrap() {
                    Some(back) => assert!(agree_on_common_window(&back, &i), "iterate {:?}", q),
                    None => assert!(i.is_empty()),
                }
            }
        }
    }
}

#[test]
fn components_lie_in_integer_cosets() {
    for inst in corpus() {
        for q in inst.quadruples() {
            let basis = &inst.gbasis[&q];
            for row in inst.f_rows(q.0, q.1, q.2, q.3) {
                let zt = ChannelTensor::basis_product(q, row, inst.order);
                let p = multiply_p(&inst, &zt, (0, 0), (0, 0), (0, 0), top(q.3), true).unwrap();
                for g in decompose_product(&p, basis).unwrap().components.values() {
                    assert!(g.terms().keys().all(|e| e.iter().all(|x| x.is_integer())));
                }
            }
        }
    }
}

#[test]
fn engine_agrees_with_explicit_sums() {
    for inst in corpus() {
        let b = derive_braiding(&inst).unwrap();
        let a = check_jacobi(&inst, 4);
        let e = check_jacobi_explicit(&inst, &inst.fmat, &b, 4);
        assert_eq!(a.results.len(), e.results.len());
        for (x, y) in a.results.iter().zip(&e.results) {
            assert_eq!(x.axiom, y.axiom);
            assert_eq!(x.status, y.status, "{}", x.axiom);
            assert_eq!(x.witness, y.witness, "{}", x.axiom);
        }
    }
}

#[test]
fn voa_specialization() {
    let t = make_trivial_voa();
    let j = check_jacobi(&t, 8);
    assert!(j.passed() && j.count(Status::Pass) == 1);
    let v = check_voa(&t, 8);
    let classical: Vec<_> = v.results.iter().filter(|r| r.axiom == "jacobi").collect();
    assert_eq!(classical.len(), 1);
    assert_eq!(classical[0].status, Status::Pass);
}

#[test]
fn untwisted_z2_satisfies_jacobi() {
    // all weights 0: every operator is a plain product, F = Omega = 1
    let i = z(2, "0");
    assert!(check_jacobi(&i, 5).passed());
    assert!(check_duality_formal(&i).passed());
}

#[test]
fn perturbed_f_is_caught() {
    let i = z(2, "0");
    let bad = inject_fault(&i, &Fault::F { key: (1, 1, 0, 0), row: 0, col: 0, op: FaultOp::Zeta(1) }).unwrap();
    let rep = check_jacobi(&bad, 5);
    assert!(!rep.passed());
    let f = rep.failures().next().unwrap();
    assert!(f.axiom.starts_with("jacobi"));
    let w = f.witness.as_ref().unwrap();
    assert!(w.location.starts_with("x0,x1,x2"));
    assert_ne!(w.expected, w.actual);
}

#[test]
fn duality_oracle_on_the_trivial_algebra() {
    let t = make_trivial_voa();
    let rep = check_duality_formal(&t);
    assert!(rep.passed());
    for ax in ["reconstruction (product)", "reconstruction (iterate)", "commutativity", "associativity (substitution)"] {
        assert!(rep.results.iter().any(|r| r.axiom.starts_with(ax) && r.checked > 0), "{}", ax);
    }
    let shape = OracleShape::from_leading(rint(0), rint(0), rint(0), &rint(0)).unwrap();
    assert_eq!(shape.r, 0);
    assert!(OracleShape::from_leading(rint(1), rint(0), rint(0), &rint(0)).is_err());
}
