//! Axiom checks for the vertex operator algebra, its modules and intertwining operators,
//! skew-symmetry and the Omega_r transpose.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::algdata::{AlgebraInstance, DualVector, ModeKey, OmegaSpec, OperatorTable, Vector, YRef};
use crate::exactnum::{factorial, fmt_rational, rint, CycloNumber, NumError};
use crate::jacobi::{iterate_coeff, product_coeff, three_term, JacobiError, Lv};
use crate::msdata::solve_combination;
use crate::report::{CheckReport, Witness};
use crate::series::{fmt_exps, Window};

pub const OUT_OF_SCOPE: &str = "analytic convergence of products and iterates is not checked (formal truncated data only)";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error(transparent)]
    Num(#[from] NumError),
    #[error("L(-1) is needed on color {0} but no Virasoro element is declared")]
    NoVirasoro(String),
    #[error("L(-1) on color {0} leaves the truncated space")]
    Uncertified(String),
}

fn lv(x: Lv) -> String {
    format!("{}.{}", x.0, x.1)
}

fn basis_of(inst: &AlgebraInstance, a: usize) -> Vec<Lv> {
    inst.spaces[a].basis()
}

fn duals_of(inst: &AlgebraInstance, a: usize) -> Vec<DualVector> {
    basis_of(inst, a).into_iter().map(|(level, index)| DualVector { color: a, level, index }).collect()
}

fn module_y(inst: &AlgebraInstance, a: usize) -> YRef {
    YRef::new(inst.e(), a, a, 0)
}

fn vec_text(v: &[CycloNumber]) -> String {
    format!("({})", v.iter().map(|c| c.to_text()).collect::<Vec<_>>().join(", "))
}

fn zeros(inst: &AlgebraInstance, a: usize) -> Vec<CycloNumber> {
    vec![CycloNumber::zero(inst.order); inst.spaces[a].total()]
}

/// L(n) on a vector of W^a, as the mode n+1 of the module vertex operator on omega.
/// None when the result is not certified by the truncation (or omega is unknown).
pub fn virasoro_op(inst: &AlgebraInstance, a: usize, n: i64, w: &[CycloNumber]) -> Option<Vec<CycloNumber>> {
    match &inst.omega {
        OmegaSpec::Unknown => None,
        OmegaSpec::Zero => Some(zeros(inst, a)),
        OmegaSpec::Vector(om) => {
            let e = inst.e();
            let mut comps = zeros(inst, e);
            let off = inst.spaces[e].offset(2);
            for (i, c) in om.iter().enumerate() {
                comps[off + i] = c.clone();
            }
            let omega = Vector { color: e, comps };
            let tab = inst.table(module_y(inst, a));
            inst.apply_mode(tab, &rint(n + 1), &omega, &Vector { color: a, comps: w.to_vec() })
        }
    }
}

fn axpy(acc: &mut [CycloNumber], c: &CycloNumber, x: &[CycloNumber]) {
    for (a, b) in acc.iter_mut().zip(x) {
        if !b.is_zero() {
            *a = &*a + &(b * c);
        }
    }
}

/// Grading of one table: every stored mode lies on the coset of its type, lands on a kept
/// level and has the right output dimension.
fn check_table_grading(inst: &AlgebraInstance, y: YRef, rep: &mut CheckReport, name: &str) {
    let tab = inst.table(y);
    let s3 = &inst.spaces[y.a3];
    let mut n = 0u64;
    for ((m, l1, i1, l2, i2), v) in &tab.entries {
        n += 1;
        let loc = format!("mode {} on {}.{} (x) {}.{}", fmt_rational(m), l1, i1, l2, i2);
        let ok_in = *l1 <= inst.spaces[y.a1].truncation() && *i1 < inst.spaces[y.a1].dim(*l1) && *l2 <= inst.spaces[y.a2].truncation() && *i2 < inst.spaces[y.a2].dim(*l2);
        if !ok_in {
            rep.fail(name, Witness::new(loc, "input basis vector", "outside the graded spaces"));
            return;
        }
        match inst.output_level(y, m, *l1, *l2) {
            None => {
                let sh = inst.mode_shift(y.a1, y.a2, y.a3);
                rep.fail_reason(name, "mode off its coset", Witness::new(loc, format!("mode in {} + Z", fmt_rational(&(&sh - rint(1)))), fmt_rational(m)));
                return;
            }
            Some(l3) if l3 < 0 || l3 as usize > s3.truncation() => {
                rep.fail_reason(name, "lower truncation", Witness::new(loc, format!("output level in [0, {}]", s3.truncation()), l3));
                return;
            }
            Some(l3) if v.len() != s3.dim(l3 as usize) => {
                rep.fail(name, Witness::new(loc, format!("dimension {}", s3.dim(l3 as usize)), v.len()));
                return;
            }
            _ => {}
        }
    }
    rep.pass(name, n);
}

/// Y(1, x) w = lambda w: returns lambda, or a witness.
fn identity_scalar(inst: &AlgebraInstance, y: YRef) -> Result<(CycloNumber, u64), Witness> {
    let a = y.a2;
    let vac = inst.vacuum_vector();
    let tab = inst.table(y);
    let mut lambda: Option<CycloNumber> = None;
    let mut n = 0u64;
    for w in basis_of(inst, a) {
        let wv = inst.basis_vector(a, w.0, w.1);
        for m in inst.certified_modes(y, 0, w.0) {
            let got = inst.apply_mode(tab, &m, &vac, &wv).expect("certified mode");
            n += 1;
            let loc = format!("w={} mode {}", lv(w), fmt_rational(&m));
            let idx = inst.spaces[a].offset(w.0) + w.1;
            if m != rint(-1) {
                if got.iter().any(|c| !c.is_zero()) {
                    return Err(Witness::new(loc, vec_text(&zeros(inst, a)), vec_text(&got)));
                }
                continue;
            }
            let l = lambda.get_or_insert_with(|| got[idx].clone()).clone();
            let mut want = zeros(inst, a);
            want[idx] = l;
            if got != want {
                return Err(Witness::new(loc, vec_text(&want), vec_text(&got)));
            }
        }
    }
    Ok((lambda.unwrap_or_else(|| CycloNumber::zero(inst.order)), n))
}

/// Y(w, x) 1 has no negative powers and its constant term is mu w.
fn creation_scalar(inst: &AlgebraInstance, y: YRef) -> Result<(CycloNumber, u64), Witness> {
    let a = y.a1;
    let vac = inst.vacuum_vector();
    let tab = inst.table(y);
    let mut mu: Option<CycloNumber> = None;
    let mut n = 0u64;
    for w in basis_of(inst, a) {
        let wv = inst.basis_vector(a, w.0, w.1);
        for m in inst.certified_modes(y, w.0, 0) {
            if m < rint(-1) {
                continue;
            }
            let got = inst.apply_mode(tab, &m, &wv, &vac).expect("certified mode");
            n += 1;
            let loc = format!("w={} mode {}", lv(w), fmt_rational(&m));
            let idx = inst.spaces[a].offset(w.0) + w.1;
            if m != rint(-1) {
                if got.iter().any(|c| !c.is_zero()) {
                    return Err(Witness::new(loc, vec_text(&zeros(inst, a)), vec_text(&got)));
                }
                continue;
            }
            let u = mu.get_or_insert_with(|| got[idx].clone()).clone();
            let mut want = zeros(inst, a);
            want[idx] = u;
            if got != want {
                return Err(Witness::new(loc, vec_text(&want), vec_text(&got)));
            }
        }
    }
    Ok((mu.unwrap_or_else(|| CycloNumber::zero(inst.order)), n))
}

/// Jacobi identity of Y_V, a module action or an intertwiner against the module actions
/// of V on its three colors, compared on the cube [-w, w]^3.
fn check_action_jacobi(inst: &AlgebraInstance, y: YRef, w: i64, rep: &mut CheckReport, name: &str) {
    let e = inst.e();
    let tab = inst.table(y);
    let (y3, y2, y1) = (inst.table(module_y(inst, y.a3)), inst.table(module_y(inst, y.a2)), inst.table(module_y(inst, y.a1)));
    let (mut checked, mut skipped) = (0u64, 0u64);
    let mut window: Option<Window> = None;
    for u in basis_of(inst, e) {
        for w1 in basis_of(inst, y.a1) {
            for w2 in basis_of(inst, y.a2) {
                for d in duals_of(inst, y.a3) {
                    let at = format!("u={} w1={} w2={} w'={}", lv(u), lv(w1), lv(w2), lv((d.level, d.index)));
                    let run = || -> Result<_, JacobiError> {
                        let a = product_coeff(inst, y3, tab, u, w1, w2, d, true)?;
                        let b = product_coeff(inst, tab, y2, w1, u, w2, d, false)?;
                        let c = iterate_coeff(inst, tab, y1, u, w1, w2, d)?;
                        three_term(&a, &b, &c, w)
                    };
                    match run() {
                        Ok(t) => {
                            checked += t.checked;
                            skipped += t.skipped;
                            window.get_or_insert(t.window);
                            if let Some((ex, l, r)) = t.witness {
                                let r = rep.fail(name, Witness::new(format!("x0,x1,x2 = ({}) {}", fmt_exps(&ex), at), r.to_text(), l.to_text()));
                                r.checked = checked;
                                return;
                            }
                        }
                        Err(err) => {
                            rep.fail_reason(name, err.to_string(), Witness::new(at, "defined", "error"));
                            return;
                        }
                    }
                }
            }
        }
    }
    let r = rep.pass(name, checked).with_skipped(skipped);
    if let Some(win) = window {
        r.with_window(win.to_string());
    }
}

/// Virasoro bracket relations and L(0)-grading on W^a.
fn check_virasoro(inst: &AlgebraInstance, a: usize, rep: &mut CheckReport, tag: &str) {
    let (bracket, grading) = (format!("virasoro relations{}", tag), format!("L(0)-grading{}", tag));
    if inst.omega == OmegaSpec::Unknown {
        rep.skip(bracket, "no Virasoro element declared");
        rep.skip(grading, "no Virasoro element declared");
        return;
    }
    let o = inst.order;
    let sp = &inst.spaces[a];
    let bound = sp.truncation() as i64 + 2;
    let c12 = inst.central_charge.scale(&crate::exactnum::rat(1, 12));
    let (mut checked, mut skipped) = (0u64, 0u64);
    let mut fail: Option<Witness> = None;
    'outer: for w in basis_of(inst, a) {
        let wv = inst.basis_vector(a, w.0, w.1).comps;
        for m in -bound..=bound {
            for n in -bound..=bound {
                if m <= n {
                    continue;
                }
                let lhs = (|| {
                    let mn = virasoro_op(inst, a, m, &virasoro_op(inst, a, n, &wv)?)?;
                    let nm = virasoro_op(inst, a, n, &virasoro_op(inst, a, m, &wv)?)?;
                    Some(mn.iter().zip(&nm).map(|(x, y)| x - y).collect::<Vec<_>>())
                })();
                let rhs = virasoro_op(inst, a, m + n, &wv).map(|v| {
                    let mut out: Vec<CycloNumber> = v.iter().map(|x| x.scale(&rint(m - n))).collect();
                    if m + n == 0 {
                        axpy(&mut out, &c12.scale(&rint(m * m * m - m)), &wv);
                    }
                    out
                });
                match (lhs, rhs) {
                    (Some(l), Some(r)) => {
                        checked += 1;
                        if l != r {
                            fail = Some(Witness::new(format!("[L({}),L({})] on {}", m, n, lv(w)), vec_text(&r), vec_text(&l)));
                            break 'outer;
                        }
                    }
                    _ => skipped += 1,
                }
            }
        }
    }
    match fail {
        Some(wit) => {
            rep.fail(bracket, wit).checked = checked;
        }
        None if checked == 0 => {
            rep.skip(bracket, "no bracket representable within the truncation");
        }
        None => {
            rep.pass(bracket, checked).with_skipped(skipped);
        }
    }
    let mut n = 0u64;
    for w in basis_of(inst, a) {
        let wv = inst.basis_vector(a, w.0, w.1).comps;
        let Some(got) = virasoro_op(inst, a, 0, &wv) else { continue };
        n += 1;
        let weight = CycloNumber::from_rational(inst.h(a) + rint(w.0 as i64), o);
        let want: Vec<CycloNumber> = wv.iter().map(|x| x * &weight).collect();
        if got != want {
            rep.fail(grading, Witness::new(format!("L(0) {} (weight {})", lv(w), fmt_rational(&(inst.h(a) + rint(w.0 as i64)))), vec_text(&want), vec_text(&got)));
            return;
        }
    }
    rep.pass(grading, n);
}

/// Y(L(-1) w1, x) = d/dx Y(w1, x), i.e. Y_m(L(-1) w1) = -m Y_{m-1}(w1).
fn check_derivative(inst: &AlgebraInstance, y: YRef, rep: &mut CheckReport, name: &str) {
    if inst.omega == OmegaSpec::Unknown {
        rep.skip(name, "no Virasoro element declared");
        return;
    }
    let tab = inst.table(y);
    let (mut checked, mut skipped) = (0u64, 0u64);
    for w1 in basis_of(inst, y.a1) {
        let wv = inst.basis_vector(y.a1, w1.0, w1.1);
        let Some(dw) = virasoro_op(inst, y.a1, -1, &wv.comps) else {
            skipped += 1;
            continue;
        };
        let dw = Vector { color: y.a1, comps: dw };
        for w2 in basis_of(inst, y.a2) {
            let w2v = inst.basis_vector(y.a2, w2.0, w2.1);
            for m in inst.certified_modes(y, w1.0 + 1, w2.0) {
                let lhs = inst.apply_mode(tab, &m, &dw, &w2v);
                let rhs = inst.apply_mode(tab, &(&m - rint(1)), &wv, &w2v);
                match (lhs, rhs) {
                    (Some(l), Some(r)) => {
                        checked += 1;
                        let r: Vec<CycloNumber> = r.iter().map(|x| x.scale(&-m.clone())).collect();
                        if l != r {
                            rep.fail(name, Witness::new(format!("mode {} w1={} w2={}", fmt_rational(&m), lv(w1), lv(w2)), vec_text(&r), vec_text(&l))).checked = checked;
                            return;
                        }
                    }
                    _ => skipped += 1,
                }
            }
        }
    }
    rep.pass(name, checked).with_skipped(skipped);
}

pub fn check_voa(inst: &AlgebraInstance, w: i64) -> CheckReport {
    let mut rep = CheckReport::new("voa");
    let y = inst.voa_y();
    check_table_grading(inst, y, &mut rep, "grading and lower truncation");
    match identity_scalar(inst, y) {
        Ok((l, n)) if l.is_one() => {
            rep.pass("identity Y(1,x) = 1", n);
        }
        Ok((l, _)) => {
            rep.fail("identity Y(1,x) = 1", Witness::new("mode -1 on the vacuum", "1", l.to_text()));
        }
        Err(wit) => {
            rep.fail("identity Y(1,x) = 1", wit);
        }
    }
    match creation_scalar(inst, y) {
        Ok((m, n)) if m.is_one() => {
            rep.pass("creation Y(v,x)1 = v + O(x)", n);
        }
        Ok((m, _)) => {
            rep.fail("creation Y(v,x)1 = v + O(x)", Witness::new("constant term on the vacuum", "1", m.to_text()));
        }
        Err(wit) => {
            rep.fail("creation Y(v,x)1 = v + O(x)", wit);
        }
    }
    check_action_jacobi(inst, y, w, &mut rep, "jacobi");
    check_virasoro(inst, inst.e(), &mut rep, "");
    check_derivative(inst, y, &mut rep, "L(-1)-derivative");
    rep.extend(check_skew_symmetry_voa(inst));
    rep.note(OUT_OF_SCOPE);
    rep
}

pub fn check_module(inst: &AlgebraInstance, a: usize, w: i64) -> CheckReport {
    let mut rep = CheckReport::new("module");
    let y = module_y(inst, a);
    let tag = format!(" [{}]", inst.name(a));
    check_table_grading(inst, y, &mut rep, &format!("grading and lower truncation{}", tag));
    match identity_scalar(inst, y) {
        Ok((l, n)) if l.is_one() => {
            rep.pass(format!("identity Y(1,x) = 1{}", tag), n);
        }
        Ok((l, _)) => {
            rep.fail(format!("identity Y(1,x) = 1{}", tag), Witness::new("mode -1 on the vacuum", "1", l.to_text()));
        }
        Err(wit) => {
            rep.fail(format!("identity Y(1,x) = 1{}", tag), wit);
        }
    }
    check_action_jacobi(inst, y, w, &mut rep, &format!("jacobi{}", tag));
    check_virasoro(inst, a, &mut rep, &tag);
    check_derivative(inst, y, &mut rep, &format!("L(-1)-derivative{}", tag));
    rep
}

pub fn yref_name(inst: &AlgebraInstance, y: YRef) -> String {
    format!("Y({} {} -> {} #{})", inst.name(y.a1), inst.name(y.a2), inst.name(y.a3), y.index)
}

pub fn check_intertwiner(inst: &AlgebraInstance, y: YRef, w: i64) -> CheckReport {
    let mut rep = CheckReport::new("intertwiner");
    let tag = format!(" {}", yref_name(inst, y));
    check_table_grading(inst, y, &mut rep, &format!("grading and lower truncation{}", tag));
    check_action_jacobi(inst, y, w, &mut rep, &format!("jacobi{}", tag));
    check_derivative(inst, y, &mut rep, &format!("L(-1)-derivative{}", tag));
    rep
}

/// L(-1)^k / k! on a vector of W^a.
fn exp_l_minus1_term(inst: &AlgebraInstance, a: usize, k: usize, v: &[CycloNumber]) -> Result<Vec<CycloNumber>, CheckError> {
    if v.iter().all(|c| c.is_zero()) {
        return Ok(v.to_vec());
    }
    let mut cur = v.to_vec();
    for _ in 0..k {
        if inst.omega == OmegaSpec::Unknown {
            return Err(CheckError::NoVirasoro(inst.name(a).to_string()));
        }
        cur = virasoro_op(inst, a, -1, &cur).ok_or_else(|| CheckError::Uncertified(inst.name(a).to_string()))?;
    }
    let inv = CycloNumber::from_rational(factorial(k as u64), inst.order).try_inv()?;
    Ok(cur.iter().map(|x| x * &inv).collect())
}

/// Omega_r(Y)(w2, x) w1 = e^{x L(-1)} Y(w1, e^{(2r+1) pi i} x) w2, a table of type (a2, a1; a3)
/// on the certified output levels.
pub fn omega_r(inst: &AlgebraInstance, y: YRef, r: i64) -> Result<OperatorTable, CheckError> {
    let tab = inst.table(y);
    let s3 = &inst.spaces[y.a3];
    let turns = rint(2 * r + 1);
    let mut out = OperatorTable::empty(YRef::new(y.a2, y.a1, y.a3, y.index));
    for w2 in basis_of(inst, y.a2) {
        for w1 in basis_of(inst, y.a1) {
            // new mode m at output level l3 collects Y_{m+k}(w1) w2 at level l3 - k
            for m in inst.certified_modes(y, w1.0, w2.0) {
                let l3 = inst.output_level(y, &m, w1.0, w2.0).expect("certified mode");
                if l3 < 0 {
                    continue;
                }
                let mut acc = zeros(inst, y.a3);
                for k in 0..=l3 as usize {
                    let n = &m + rint(k as i64);
                    let v = inst.apply_basis(tab, &n, w1.0, w1.1, w2.0, w2.1).expect("lower level is certified");
                    let ph = CycloNumber::phase_half_turns(&(&turns * &(-&n - rint(1))), inst.order)?;
                    let t = exp_l_minus1_term(inst, y.a3, k, &v)?;
                    axpy(&mut acc, &ph, &t);
                }
                let off = s3.offset(l3 as usize);
                let block: Vec<CycloNumber> = acc[off..off + s3.dim(l3 as usize)].to_vec();
                if block.iter().any(|c| !c.is_zero()) {
                    out.entries.insert((m, w2.0, w2.1, w1.0, w1.1), block);
                }
            }
        }
    }
    Ok(out)
}

/// First key where two tables differ, treating absent entries as zero.
pub fn table_difference(a: &OperatorTable, b: &OperatorTable) -> Option<(ModeKey, String, String)> {
    let keys: BTreeSet<&ModeKey> = a.entries.keys().chain(b.entries.keys()).collect();
    for k in keys {
        let (x, y) = (a.entries.get(k), b.entries.get(k));
        fn nz(v: Option<&Vec<CycloNumber>>) -> Option<&Vec<CycloNumber>> {
            v.filter(|v| v.iter().any(|c| !c.is_zero()))
        }
        if nz(x) != nz(y) {
            let t = |v: Option<&Vec<CycloNumber>>| v.map(|v| vec_text(v)).unwrap_or_else(|| "0".into());
            return Some((k.clone(), t(x), t(y)));
        }
    }
    None
}

fn key_text(k: &ModeKey) -> String {
    format!("mode {} on {}.{} (x) {}.{}", fmt_rational(&k.0), k.1, k.2, k.3, k.4)
}

/// Y(u, x) v = e^{x L(-1)} Y(v, -x) u, i.e. Omega_0(Y) = Y.
pub fn check_skew_symmetry_voa(inst: &AlgebraInstance) -> CheckReport {
    let mut rep = CheckReport::new("voa");
    let y = inst.voa_y();
    match omega_r(inst, y, 0) {
        Ok(t) => match table_difference(inst.table(y), &t) {
            None => {
                rep.pass("skew-symmetry", t.entries.len() as u64);
            }
            Some((k, want, got)) => {
                rep.fail("skew-symmetry", Witness::new(key_text(&k), want, got));
            }
        },
        Err(e) => {
            rep.skip("skew-symmetry", e.to_string());
        }
    }
    rep
}

/// Coefficients of a table over the basis tables of its type, if it lies in their span.
fn table_coordinates(inst: &AlgebraInstance, t: &OperatorTable, basis: &[OperatorTable]) -> Option<Vec<CycloNumber>> {
    let mut keys: BTreeSet<(ModeKey, usize)> = BTreeSet::new();
    for tab in basis.iter().chain([t]) {
        for (k, v) in &tab.entries {
            for i in 0..v.len() {
                keys.insert((k.clone(), i));
            }
        }
    }
    let flat = |tab: &OperatorTable| -> Vec<CycloNumber> { keys.iter().map(|(k, i)| tab.entries.get(k).and_then(|v| v.get(*i)).cloned().unwrap_or_else(|| CycloNumber::zero(inst.order))).collect() };
    let vecs: Vec<Vec<CycloNumber>> = basis.iter().map(flat).collect();
    solve_combination(&vecs, &flat(t), inst.order)
}

/// The Omega matrix recomputed from Omega_{-1} of the operator tables.
pub fn recompute_omega(inst: &AlgebraInstance, key: (usize, usize, usize)) -> Result<Option<crate::msdata::Matrix>, CheckError> {
    let (a1, a2, a3) = key;
    let (Some(src), Some(dst)) = (inst.intertwiners.get(&(a1, a2, a3)), inst.intertwiners.get(&(a2, a1, a3))) else { return Ok(None) };
    let mut rows = Vec::new();
    for i in 0..src.len() {
        let t = omega_r(inst, YRef::new(a1, a2, a3, i), -1)?;
        match table_coordinates(inst, &t, dst) {
            Some(c) => rows.push(c),
            None => return Ok(None),
        }
    }
    Ok(crate::msdata::Matrix::from_rows(rows, inst.order).ok())
}

/// Definition-level axioms of an intertwining operator algebra; Moore-Seiberg equations and
/// the Jacobi identity live in their own suites.
pub fn check_ioa_axioms(inst: &AlgebraInstance, _w: i64) -> CheckReport {
    let mut rep = CheckReport::new("ioa");
    let e = inst.e();
    // fusion with the identity color
    let mut bad = None;
    for a in 0..inst.ncolors() {
        for b in 0..inst.ncolors() {
            let want = u32::from(a == b);
            if inst.n(e, a, b) != want {
                bad = Some(Witness::new(format!("N({},{};{})", inst.name(e), inst.name(a), inst.name(b)), want, inst.n(e, a, b)));
            }
        }
    }
    match bad {
        Some(wit) => {
            rep.fail("identity fusion rules", wit);
        }
        None => {
            rep.pass("identity fusion rules", (inst.ncolors() * inst.ncolors()) as u64);
        }
    }
    for y in inst.yrefs() {
        check_table_grading(inst, y, &mut rep, &format!("grading and lower truncation {}", yref_name(inst, y)));
    }
    // integral powers for operators with an identity-colored slot
    let (mut n, mut fail) = (0u64, None);
    for y in inst.yrefs().into_iter().filter(|y| y.a1 == e || y.a2 == e) {
        for k in inst.table(y).entries.keys() {
            n += 1;
            if !k.0.is_integer() && fail.is_none() {
                fail = Some(Witness::new(format!("{} {}", yref_name(inst, y), key_text(k)), "integral mode", fmt_rational(&k.0)));
            }
        }
    }
    match fail {
        Some(wit) => {
            rep.fail("single-valuedness", wit);
        }
        None => {
            rep.pass("single-valuedness", n);
        }
    }
    for a in 0..inst.ncolors() {
        for i in 0..inst.n(e, a, a) as usize {
            let y = YRef::new(e, a, a, i);
            let name = format!("identity {}", yref_name(inst, y));
            match identity_scalar(inst, y) {
                Ok((l, n)) => {
                    rep.pass(name, n);
                    rep.note(format!("lambda {} = {}", yref_name(inst, y), l.to_text()));
                }
                Err(wit) => {
                    rep.fail(name, wit);
                }
            }
        }
        for i in 0..inst.n(a, e, a) as usize {
            let y = YRef::new(a, e, a, i);
            let name = format!("creation {}", yref_name(inst, y));
            match creation_scalar(inst, y) {
                Ok((m, n)) => {
                    rep.pass(name, n);
                    rep.note(format!("mu {} = {}", yref_name(inst, y), m.to_text()));
                }
                Err(wit) => {
                    rep.fail(name, wit);
                }
            }
        }
        check_virasoro(inst, a, &mut rep, &format!(" [{}]", inst.name(a)));
    }
    for y in inst.yrefs() {
        check_derivative(inst, y, &mut rep, &format!("L(-1)-derivative {}", yref_name(inst, y)));
    }
    for (&key, declared) in &inst.omat {
        let name = format!("Omega matrix ({},{};{}) recomputed", inst.name(key.0), inst.name(key.1), inst.name(key.2));
        match recompute_omega(inst, key) {
            Ok(Some(m)) => match m.first_difference(declared) {
                None => {
                    rep.pass(name, (m.rows() * m.cols()) as u64);
                }
                Some((i, j)) => {
                    rep.fail(name, Witness::new(format!("entry [{},{}]", i, j), declared.get(i, j).to_text(), m.get(i, j).to_text()));
                }
            },
            Ok(None) => {
                rep.fail(name, Witness::new("Omega_{-1} of the basis", "in the span of the transposed basis", "outside"));
            }
            Err(err) => {
                rep.skip(name, err.to_string());
            }
        }
    }
    rep.note(OUT_OF_SCOPE);
    rep
}

/// Omega_{-r-1}(Omega_r(Y)) against Y for one operator.
pub fn omega_round_trip(inst: &AlgebraInstance, y: YRef, r: i64) -> Result<Option<(ModeKey, String, String)>, CheckError> {
    let t = omega_r(inst, y, r)?;
    let mut tmp = inst.clone();
    let ty = t.yref;
    let slot = tmp.intertwiners.entry((ty.a1, ty.a2, ty.a3)).or_default();
    // place the transposed table at its own index so omega_r can read it back
    while slot.len() <= ty.index {
        slot.push(OperatorTable::empty(YRef::new(ty.a1, ty.a2, ty.a3, slot.len())));
    }
    slot[ty.index] = t;
    let back = omega_r(&tmp, ty, -r - 1)?;
    Ok(table_difference(inst.table(y), &back))
}
