//! Products and iterates of intertwining operators, their g/h decompositions over a
//! basis of fractional-power functions, and the generalized Jacobi identity.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::algdata::{AlgebraInstance, DualVector, OperatorTable, YRef};
use crate::exactnum::{frac01, rint, CycloNumber, Rational};
use crate::msdata::{derive_braiding, solve_with_rank, BraidingMatrix, Matrix, MsError, Quad};
use crate::ratfun::{iota12, iota20, iota21, rat_equal, Chart, GBasisElement, LaurentRational, RatError};
use crate::report::{CheckReport, Witness};
use crate::series::{count_points, first_difference, fmt_exps, kernel_mul, s_add, s_mul, s_sub, Bound, DeltaKernel, ExponentGrid, FormalSeries, Interval, SeriesError, Window};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JacobiError {
    #[error("type mismatch: {0}")]
    Type(String),
    #[error("basis functions {0} and {1} share a coset on this side; decomposition needs the rational oracle")]
    Ambiguous(String, String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Rat(#[from] RatError),
    #[error(transparent)]
    Ms(#[from] MsError),
}

/// (level, index) of a basis vector.
pub type Lv = (usize, usize);

fn wt(inst: &AlgebraInstance, color: usize, level: usize) -> Rational {
    inst.h(color) + rint(level as i64)
}

fn dual_comp(inst: &AlgebraInstance, d: DualVector) -> usize {
    inst.spaces[d.color].offset(d.level) + d.index
}

/// <d, outer(wa, x_o) inner(wb, x_i) wc>; x_o is x1 when `outer_x1`, else x2. Variables (x1, x2).
#[allow(clippy::too_many_arguments)]
pub fn product_coeff(inst: &AlgebraInstance, outer: &OperatorTable, inner: &OperatorTable, wa: Lv, wb: Lv, wc: Lv, d: DualVector, outer_x1: bool) -> Result<FormalSeries, JacobiError> {
    let (yo, yi) = (outer.yref, inner.yref);
    if yo.a2 != yi.a3 || d.color != yo.a3 {
        return Err(JacobiError::Type(format!("product of {:?} and {:?} paired with color {}", yo, yi, d.color)));
    }
    let s5 = &inst.spaces[yi.a3];
    let l5max = s5.truncation();
    let (wta, wtb, wtc, wtd) = (wt(inst, yo.a1, wa.0), wt(inst, yi.a1, wb.0), wt(inst, yi.a2, wc.0), wt(inst, d.color, d.level));
    // inner exponent h5 + l5 - wt b - wt c; outer exponent by homogeneity
    let lo_i = inst.h(yi.a3) - &wtb - &wtc;
    let tot = &wtd - &wta - &wtb - &wtc;
    let (po, pi) = if outer_x1 { (0, 1) } else { (1, 0) };
    let mut grid = ExponentGrid::integer(2);
    grid.0[pi] = [frac01(&lo_i)].into_iter().collect();
    grid.0[po] = [frac01(&(&tot - &lo_i))].into_iter().collect();
    let mut window = Window::full(2);
    window.0[pi] = Interval::up_to(&lo_i + rint(l5max as i64));
    let mut support = Window::full(2);
    support.0[pi] = Interval::new(Bound::Fin(lo_i.clone()), Bound::PosInf);
    support.0[po] = Interval::new(Bound::NegInf, Bound::Fin(&tot - &lo_i));
    let mut s = FormalSeries::new(&["x1", "x2"], inst.order, grid, window, support);
    let dc = dual_comp(inst, d);
    for l5 in 0..=l5max {
        let ei = &lo_i + rint(l5 as i64);
        let ni = -&ei - rint(1);
        let v = inst.apply_basis(inner, &ni, wb.0, wb.1, wc.0, wc.1).ok_or_else(|| JacobiError::Type("inner mode above truncation".into()))?;
        let eo = &tot - &ei;
        let no = -&eo - rint(1);
        let off = s5.offset(l5);
        for k in 0..s5.dim(l5) {
            if v[off + k].is_zero() {
                continue;
            }
            let r = inst.apply_basis(outer, &no, wa.0, wa.1, l5, k).ok_or_else(|| JacobiError::Type("outer mode above truncation".into()))?;
            let mut e = vec![Rational::from_integer(0.into()); 2];
            e[pi] = ei.clone();
            e[po] = eo.clone();
            s.add_term(e, &r[dc] * &v[off + k]);
        }
    }
    Ok(s)
}

/// <d, outer(inner(wa, x0) wb, x2) wc>, variables (x0, x2).
pub fn iterate_coeff(inst: &AlgebraInstance, outer: &OperatorTable, inner: &OperatorTable, wa: Lv, wb: Lv, wc: Lv, d: DualVector) -> Result<FormalSeries, JacobiError> {
    let (yo, yi) = (outer.yref, inner.yref);
    if yo.a1 != yi.a3 || d.color != yo.a3 {
        return Err(JacobiError::Type(format!("iterate of {:?} into {:?} paired with color {}", yi, yo, d.color)));
    }
    let s7 = &inst.spaces[yi.a3];
    let l7max = s7.truncation();
    let (wta, wtb, wtc, wtd) = (wt(inst, yi.a1, wa.0), wt(inst, yi.a2, wb.0), wt(inst, yo.a2, wc.0), wt(inst, d.color, d.level));
    let lo0 = inst.h(yi.a3) - &wta - &wtb;
    let tot = &wtd - &wta - &wtb - &wtc;
    let mut grid = ExponentGrid::integer(2);
    grid.0[0] = [frac01(&lo0)].into_iter().collect();
    grid.0[1] = [frac01(&(&tot - &lo0))].into_iter().collect();
    let window = Window(vec![Interval::up_to(&lo0 + rint(l7max as i64)), Interval::full()]);
    let support = Window(vec![Interval::new(Bound::Fin(lo0.clone()), Bound::PosInf), Interval::new(Bound::NegInf, Bound::Fin(&tot - &lo0))]);
    let mut s = FormalSeries::new(&["x0", "x2"], inst.order, grid, window, support);
    let dc = dual_comp(inst, d);
    for l7 in 0..=l7max {
        let e0 = &lo0 + rint(l7 as i64);
        let n0 = -&e0 - rint(1);
        let v = inst.apply_basis(inner, &n0, wa.0, wa.1, wb.0, wb.1).ok_or_else(|| JacobiError::Type("inner mode above truncation".into()))?;
        let e2 = &tot - &e0;
        let n2 = -&e2 - rint(1);
        let off = s7.offset(l7);
        for k in 0..s7.dim(l7) {
            if v[off + k].is_zero() {
                continue;
            }
            let r = inst.apply_basis(outer, &n2, l7, k, wc.0, wc.1).ok_or_else(|| JacobiError::Type("outer mode above truncation".into()))?;
            s.add_term(vec![e0.clone(), e2.clone()], &r[dc] * &v[off + k]);
        }
    }
    Ok(s)
}

/// Outcome of comparing x0^-1 d((x1-x2)/x0) A - x0^-1 d((x2-x1)/(-x0)) B against
/// x2^-1 d((x1-x0)/x2) C on the cube [-w, w]^3 in (x0, x1, x2).
#[derive(Clone, Debug)]
pub struct ThreeTerm {
    pub checked: u64,
    pub skipped: u64,
    pub window: Window,
    /// (exponents, left side, right side)
    pub witness: Option<(Vec<Rational>, CycloNumber, CycloNumber)>,
}

/// A in (x1, x2) truncated below in x2; B in (x1, x2) truncated below in x1; C in (x0, x2).
pub fn three_term(a: &FormalSeries, b: &FormalSeries, c: &FormalSeries, w: i64) -> Result<ThreeTerm, JacobiError> {
    let vars = ["x0", "x1", "x2"];
    let cube = Window::cube(3, w);
    let t1 = kernel_mul(&DeltaKernel::new("x0", "x1", -1, "x2", false), a, &vars, &cube)?;
    let t2 = kernel_mul(&DeltaKernel::new("x0", "x2", -1, "x1", true), b, &vars, &cube)?;
    let t3 = kernel_mul(&DeltaKernel::new("x2", "x1", -1, "x0", false), c, &vars, &cube)?;
    let lhs = s_sub(&t1, &t2)?;
    let witness = first_difference(&lhs, &t3)?;
    let window = lhs.window().intersect(t3.window());
    let grid = lhs.grid().union(t3.grid());
    let checked = count_points(&grid, &window);
    let total = count_points(&grid, &cube);
    Ok(ThreeTerm { checked, skipped: total.saturating_sub(checked), window, witness })
}

/// Element of a coproduct of tensor spaces for a fixed quadruple: product side keys are
/// F rows (a5, i, j), iterate side keys are F columns (a, k, l).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelTensor {
    pub iterate: bool,
    pub colors: Quad,
    pub coeffs: BTreeMap<(usize, usize, usize), CycloNumber>,
}

impl ChannelTensor {
    pub fn basis_product(colors: Quad, row: (usize, usize, usize), order: u32) -> Self {
        ChannelTensor { iterate: false, colors, coeffs: [(row, CycloNumber::one(order))].into_iter().collect() }
    }

    /// The image of this product-side tensor under a block whose rows are its keys and whose
    /// columns are `cols`.
    fn apply(&self, block: &Matrix, rows: &[(usize, usize, usize)], cols: &[(usize, usize, usize)], iterate: bool, colors: Quad) -> Result<ChannelTensor, JacobiError> {
        if block.rows() != rows.len() || block.cols() != cols.len() {
            return Err(MsError::Shape(format!("block {}x{} for {} rows, {} columns", block.rows(), block.cols(), rows.len(), cols.len())).into());
        }
        let mut coeffs = BTreeMap::new();
        for (key, c) in &self.coeffs {
            let r = rows.iter().position(|x| x == key).ok_or_else(|| MsError::Shape(format!("key {:?}", key)))?;
            for (ci, col) in cols.iter().enumerate() {
                let e = block.get(r, ci);
                if e.is_zero() {
                    continue;
                }
                let v = coeffs.get(col).cloned().unwrap_or_else(|| CycloNumber::zero(e.order()));
                let v = &v + &(c * e);
                if v.is_zero() {
                    coeffs.remove(col);
                } else {
                    coeffs.insert(*col, v);
                }
            }
        }
        Ok(ChannelTensor { iterate, colors, coeffs })
    }

    /// F applied to a product-side tensor.
    pub fn fuse(&self, inst: &AlgebraInstance) -> Result<ChannelTensor, JacobiError> {
        let q = self.colors;
        let f = inst.fmat.get(&q).ok_or_else(|| MsError::Missing(format!("F{:?}", q)))?;
        self.apply(f, &inst.f_rows(q.0, q.1, q.2, q.3), &inst.f_cols(q.0, q.1, q.2, q.3), true, q)
    }

    /// B applied to a product-side tensor; the result lives on (a2, a1, a3; a4).
    pub fn braid(&self, inst: &AlgebraInstance, b: &BraidingMatrix) -> Result<ChannelTensor, JacobiError> {
        let q = self.colors;
        let m = b.get(&q).ok_or_else(|| MsError::Missing(format!("B{:?}", q)))?;
        let q2 = (q.1, q.0, q.2, q.3);
        self.apply(m, &inst.f_rows(q.0, q.1, q.2, q.3), &inst.f_rows(q2.0, q2.1, q2.2, q2.3), false, q2)
    }
}

fn sum_series(parts: Vec<FormalSeries>, blank: impl FnOnce() -> FormalSeries) -> Result<FormalSeries, JacobiError> {
    let mut it = parts.into_iter();
    let Some(mut acc) = it.next() else { return Ok(blank()) };
    for p in it {
        acc = s_add(&acc, &p)?;
    }
    Ok(acc)
}

/// Matrix coefficient <d, P(z)(wa, x_o; wb, x_i) wc>; the first factor sits at x1 when `first_x1`.
pub fn multiply_p(inst: &AlgebraInstance, z: &ChannelTensor, wa: Lv, wb: Lv, wc: Lv, d: DualVector, first_x1: bool) -> Result<FormalSeries, JacobiError> {
    let (a1, a2, a3, a4) = z.colors;
    let mut parts = Vec::new();
    for (&(a5, i, j), c) in &z.coeffs {
        let outer = inst.table(YRef::new(a1, a5, a4, i));
        let inner = inst.table(YRef::new(a2, a3, a5, j));
        parts.push(product_coeff(inst, outer, inner, wa, wb, wc, d, first_x1)?.scale(c));
    }
    sum_series(parts, || FormalSeries::zero(&["x1", "x2"], inst.order, Window::full(2)))
}

/// Matrix coefficient <d, I(z)(wa, x0; wb, x2) wc> of an iterate-side tensor.
pub fn iterate_i(inst: &AlgebraInstance, z: &ChannelTensor, wa: Lv, wb: Lv, wc: Lv, d: DualVector) -> Result<FormalSeries, JacobiError> {
    let (a1, a2, a3, a4) = z.colors;
    let mut parts = Vec::new();
    for (&(a, k, l), c) in &z.coeffs {
        let outer = inst.table(YRef::new(a, a3, a4, l));
        let inner = inst.table(YRef::new(a1, a2, a, k));
        parts.push(iterate_coeff(inst, outer, inner, wa, wb, wc, d)?.scale(c));
    }
    sum_series(parts, || FormalSeries::zero(&["x0", "x2"], inst.order, Window::full(2)))
}

/// Which expansion a side uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// iota12, variables (x1, x2), truncated below in x2
    Product,
    /// iota21, variables (x1, x2), truncated below in x1
    Braided,
    /// iota20, variables (x0, x2), truncated below in x0
    Iterate,
}

impl Side {
    fn chart(self) -> Chart {
        match self {
            Side::Product => Chart::X12,
            Side::Braided => Chart::X21,
            Side::Iterate => Chart::X20,
        }
    }

    /// Index of the lower-truncated variable in the side's series.
    fn trunc_var(self) -> usize {
        match self {
            Side::Product => 1,
            Side::Braided | Side::Iterate => 0,
        }
    }

    /// Exponent cosets of the expansion of a basis function on this side.
    pub fn cosets(self, el: &GBasisElement) -> [Rational; 2] {
        let (a, b, c) = (&el.a, &el.b, &el.c);
        match self {
            Side::Product => [frac01(a), frac01(b)],
            Side::Braided => [frac01(&(a - c)), frac01(&(b + c))],
            Side::Iterate => [frac01(c), frac01(&(a + b - c))],
        }
    }

    fn expand(self, f: &LaurentRational, hi: Rational) -> Result<FormalSeries, JacobiError> {
        Ok(match self {
            Side::Product => iota12(f, &Window(vec![Interval::full(), Interval::up_to(hi)]))?,
            Side::Braided => iota21(f, &Window(vec![Interval::up_to(hi), Interval::full()]))?,
            Side::Iterate => iota20(f, &Window(vec![Interval::up_to(hi), Interval::full()]))?,
        })
    }
}

/// s times the side's expansion of f, with the expansion truncated so the product keeps
/// the certified window of s.
pub fn times_expansion(s: &FormalSeries, f: &LaurentRational, side: Side) -> Result<FormalSeries, JacobiError> {
    let tv = side.trunc_var();
    let fc = f.to_chart(side.chart())?;
    let lo_f = &fc.exps()[1] + rint(fc.core().min_deg(1) as i64);
    let hi_s = s.window().0[tv].hi.finite().cloned().ok_or_else(|| SeriesError::Unbounded(s.vars()[tv].clone()))?;
    let lo_s = match &s.support().0[tv].lo {
        Bound::Fin(x) => x.clone(),
        _ => return Err(SeriesError::InfiniteConvolution(s.vars()[tv].clone()).into()),
    };
    let ex = side.expand(f, &hi_s - &lo_s + &lo_f)?;
    Ok(s_mul(s, &ex)?)
}

/// alpha -> coefficient series of one matrix coefficient of P(z), P(Bz) or I(Fz).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GDecomposition {
    pub side: Side,
    pub components: BTreeMap<String, FormalSeries>,
}

/// The component along `el`: the matching coset part divided by the expansion of el.
pub fn component(s: &FormalSeries, el: &GBasisElement, basis: &[GBasisElement], side: Side) -> Result<FormalSeries, JacobiError> {
    let cos = side.cosets(el);
    if let Some(other) = basis.iter().find(|b| b.label != el.label && side.cosets(b) == cos) {
        return Err(JacobiError::Ambiguous(el.label.clone(), other.label.clone()));
    }
    let part = s.coset_part(&cos);
    let finv = el.function(s.order()).inv()?;
    times_expansion(&part, &finv, side)
}

pub fn decompose(s: &FormalSeries, basis: &[GBasisElement], side: Side) -> Result<GDecomposition, JacobiError> {
    let mut components = BTreeMap::new();
    for el in basis {
        let g = component(s, el, basis, side)?;
        if !g.is_empty() {
            components.insert(el.label.clone(), g);
        }
    }
    Ok(GDecomposition { side, components })
}

pub fn decompose_product(s: &FormalSeries, basis: &[GBasisElement]) -> Result<GDecomposition, JacobiError> {
    decompose(s, basis, Side::Product)
}

pub fn decompose_iterate(s: &FormalSeries, basis: &[GBasisElement]) -> Result<GDecomposition, JacobiError> {
    decompose(s, basis, Side::Iterate)
}

/// Sum of component times expansion of its basis function.
pub fn reconstruct(dec: &GDecomposition, basis: &[GBasisElement], order: u32) -> Result<Option<FormalSeries>, JacobiError> {
    let mut parts = Vec::new();
    for (label, g) in &dec.components {
        let el = basis.iter().find(|b| &b.label == label).ok_or_else(|| JacobiError::Type(format!("unknown basis label {}", label)))?;
        parts.push(times_expansion(g, &el.function(order), dec.side)?);
    }
    if parts.is_empty() {
        return Ok(None);
    }
    Ok(Some(sum_series(parts, || unreachable!())?))
}

fn basis_of(inst: &AlgebraInstance, color: usize) -> Vec<Lv> {
    inst.spaces[color].basis()
}

fn duals_of(inst: &AlgebraInstance, color: usize) -> Vec<DualVector> {
    inst.spaces[color].basis().into_iter().map(|(level, index)| DualVector { color, level, index }).collect()
}

fn lv(l: Lv) -> String {
    format!("{}.{}", l.0, l.1)
}

fn quad_name(inst: &AlgebraInstance, q: Quad) -> String {
    format!("({},{},{};{})", inst.name(q.0), inst.name(q.1), inst.name(q.2), inst.name(q.3))
}

/// One (quadruple, P row, basis function) entry of the generalized Jacobi identity,
/// accumulated over all basis vectors and dual vectors.
struct Entry {
    axiom: String,
    outcome: Result<(u64, u64, Option<Witness>, Window), JacobiError>,
}

fn jacobi_entry(inst: &AlgebraInstance, q: Quad, row: (usize, usize, usize), el: &GBasisElement, basis: &[GBasisElement], fblock: &Matrix, bblock: &Matrix, w: i64, explicit: bool) -> Entry {
    let (a1, a2, a3, a4) = q;
    let axiom = format!("jacobi {} a5={} [{},{}] {}", quad_name(inst, q), inst.name(row.0), row.1, row.2, el.label);
    let run = || -> Result<(u64, u64, Option<Witness>, Window), JacobiError> {
        let (mut checked, mut skipped) = (0u64, 0u64);
        let mut window = Window::cube(3, w);
        let z = ChannelTensor::basis_product(q, row, inst.order);
        let (bz, fz) = if explicit {
            (None, None)
        } else {
            let rows = inst.f_rows(a1, a2, a3, a4);
            let bz = z.apply(bblock, &rows, &inst.f_rows(a2, a1, a3, a4), false, (a2, a1, a3, a4))?;
            let fz = z.apply(fblock, &rows, &inst.f_cols(a1, a2, a3, a4), true, q)?;
            (Some(bz), Some(fz))
        };
        for w1 in basis_of(inst, a1) {
            for w2 in basis_of(inst, a2) {
                for w3 in basis_of(inst, a3) {
                    for d in duals_of(inst, a4) {
                        let (pa, pb, pi) = if explicit {
                            explicit_sides(inst, q, row, fblock, bblock, w1, w2, w3, d)?
                        } else {
                            (
                                multiply_p(inst, &z, w1, w2, w3, d, true)?,
                                multiply_p(inst, bz.as_ref().unwrap(), w2, w1, w3, d, false)?,
                                iterate_i(inst, fz.as_ref().unwrap(), w1, w2, w3, d)?,
                            )
                        };
                        let g = component(&pa, el, basis, Side::Product)?;
                        let gb = component(&pb, el, basis, Side::Braided)?;
                        let h = component(&pi, el, basis, Side::Iterate)?;
                        let tt = three_term(&g, &gb, &h, w)?;
                        checked += tt.checked;
                        skipped += tt.skipped;
                        window = window.intersect(&tt.window);
                        if let Some((e, l, r)) = tt.witness {
                            let loc = format!("x0,x1,x2 = ({}) w1={} w2={} w3={} w'={}", fmt_exps(&e), lv(w1), lv(w2), lv(w3), lv((d.level, d.index)));
                            return Ok((checked, skipped, Some(Witness::new(loc, r.to_text(), l.to_text())), window));
                        }
                    }
                }
            }
        }
        Ok((checked, skipped, None, window))
    };
    Entry { axiom, outcome: run() }
}

/// The three sides built by summing explicit matrix entries over basis pairs.
#[allow(clippy::too_many_arguments)]
fn explicit_sides(inst: &AlgebraInstance, q: Quad, row: (usize, usize, usize), fblock: &Matrix, bblock: &Matrix, w1: Lv, w2: Lv, w3: Lv, d: DualVector) -> Result<(FormalSeries, FormalSeries, FormalSeries), JacobiError> {
    let (a1, a2, a3, a4) = q;
    let (a5, i, j) = row;
    let rows = inst.f_rows(a1, a2, a3, a4);
    let r = rows.iter().position(|x| *x == row).ok_or_else(|| JacobiError::Type("row not in block".into()))?;
    let pa = product_coeff(inst, inst.table(YRef::new(a1, a5, a4, i)), inst.table(YRef::new(a2, a3, a5, j)), w1, w2, w3, d, true)?;
    let mut bparts = Vec::new();
    for (c, &(b5, k, l)) in inst.f_rows(a2, a1, a3, a4).iter().enumerate() {
        let e = bblock.get(r, c);
        if !e.is_zero() {
            let s = product_coeff(inst, inst.table(YRef::new(a2, b5, a4, k)), inst.table(YRef::new(a1, a3, b5, l)), w2, w1, w3, d, false)?;
            bparts.push(s.scale(e));
        }
    }
    let mut fparts = Vec::new();
    for (c, &(a, k, l)) in inst.f_cols(a1, a2, a3, a4).iter().enumerate() {
        let e = fblock.get(r, c);
        if !e.is_zero() {
            let s = iterate_coeff(inst, inst.table(YRef::new(a, a3, a4, l)), inst.table(YRef::new(a1, a2, a, k)), w1, w2, w3, d)?;
            fparts.push(s.scale(e));
        }
    }
    let pb = sum_series(bparts, || FormalSeries::zero(&["x1", "x2"], inst.order, Window::full(2)))?;
    let pi = sum_series(fparts, || FormalSeries::zero(&["x0", "x2"], inst.order, Window::full(2)))?;
    Ok((pa, pb, pi))
}

fn push_entry(rep: &mut CheckReport, e: Entry) {
    match e.outcome {
        Ok((checked, skipped, None, win)) => {
            rep.pass(e.axiom, checked).with_skipped(skipped).with_window(win.to_string());
        }
        Ok((checked, skipped, Some(wit), win)) => {
            let r = rep.fail(e.axiom, wit);
            r.checked = checked;
            r.with_skipped(skipped).with_window(win.to_string());
        }
        Err(err @ JacobiError::Ambiguous(..)) => {
            rep.skip(e.axiom, err.to_string());
        }
        Err(err) => {
            rep.fail_reason(e.axiom, err.to_string(), Witness::new("evaluation", "defined", "error"));
        }
    }
}

fn entries(inst: &AlgebraInstance, w: i64, explicit: bool, fdata: &BTreeMap<Quad, Matrix>, bdata: &BraidingMatrix) -> Vec<Entry> {
    let mut jobs = Vec::new();
    for q in inst.quadruples() {
        let basis = inst.gbasis.get(&q).cloned().unwrap_or_default();
        for row in inst.f_rows(q.0, q.1, q.2, q.3) {
            if basis.is_empty() {
                jobs.push((q, row, None, basis.clone()));
            }
            for el in &basis {
                jobs.push((q, row, Some(el.clone()), basis.clone()));
            }
        }
    }
    jobs.into_par_iter()
        .map(|(q, row, el, basis)| match el {
            None => Entry {
                axiom: format!("jacobi {} a5={} [{},{}]", quad_name(inst, q), inst.name(row.0), row.1, row.2),
                outcome: Err(JacobiError::Rat(RatError::NotInSpan("no basis functions declared for this quadruple".into()))),
            },
            Some(el) => match (fdata.get(&q), bdata.get(&q)) {
                (Some(f), Some(b)) => jacobi_entry(inst, q, row, &el, &basis, f, b, w, explicit),
                _ => Entry {
                    axiom: format!("jacobi {} a5={} [{},{}] {}", quad_name(inst, q), inst.name(row.0), row.1, row.2, el.label),
                    outcome: Err(MsError::Missing(format!("F or B block {}", quad_name(inst, q))).into()),
                },
            },
        })
        .collect()
}

/// Generalized Jacobi identity for every quadruple, P-side basis tensor and basis function.
pub fn check_jacobi(inst: &AlgebraInstance, w: i64) -> CheckReport {
    let mut rep = CheckReport::new("jacobi");
    let b = match derive_braiding(inst) {
        Ok(b) => b,
        Err(e) => {
            rep.fail_reason("braiding", e.to_string(), Witness::new("derive_braiding", "invertible blocks", "error"));
            return rep;
        }
    };
    for e in entries(inst, w, false, &inst.fmat, &b) {
        push_entry(&mut rep, e);
    }
    rep
}

/// Same identity, with the given F and B blocks used entry by entry.
pub fn check_jacobi_explicit(inst: &AlgebraInstance, fdata: &BTreeMap<Quad, Matrix>, bdata: &BraidingMatrix, w: i64) -> CheckReport {
    let mut rep = CheckReport::new("jacobi-explicit");
    for e in entries(inst, w, true, fdata, bdata) {
        push_entry(&mut rep, e);
    }
    rep
}

/// Certified exponent tuples of a side series homogeneous of degree `deg`.
fn side_rows(s: &FormalSeries, side: Side, deg: &Rational) -> Option<Vec<Vec<Rational>>> {
    let tv = side.trunc_var();
    let lo = s.support().0[tv].lo.finite()?.clone();
    let hi = s.window().0[tv].hi.finite()?.clone();
    let mut out = Vec::new();
    let mut e = lo;
    while e <= hi {
        let mut x = vec![Rational::from_integer(0.into()); 2];
        x[1 - tv] = deg - &e;
        x[tv] = e.clone();
        out.push(x);
        e += rint(1);
    }
    Some(out)
}

/// (lowest exponent of the truncated variable, total degree) among the certified terms.
fn leading(s: &FormalSeries, side: Side) -> Option<(Rational, Rational)> {
    let tv = side.trunc_var();
    s.terms().keys().min_by(|a, b| a[tv].cmp(&b[tv])).map(|e| (e[tv].clone(), &e[0] + &e[1]))
}

/// Shape of the rational oracle x1^p x2^q (x1-x2)^k r(x1, x2), r homogeneous of degree `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleShape {
    pub p: Rational,
    pub q: Rational,
    pub k: Rational,
    pub r: i64,
}

impl OracleShape {
    /// Leading orders: x1 from the braided side, x2 from the product side, x1 - x2 from the
    /// iterate side; the degree of r is what homogeneity leaves over.
    pub fn from_leading(p: Rational, q: Rational, k: Rational, deg: &Rational) -> Result<Self, Rational> {
        let r = deg - &p - &q - &k;
        match (r.is_integer(), r.to_integer().try_into()) {
            (true, Ok(n)) if n >= 0i64 => Ok(OracleShape { p, q, k, r: n }),
            _ => Err(r),
        }
    }

    /// The monomials x1^(p+R-j) x2^(q+j) (x1-x2)^k written in `chart`.
    pub fn basis(&self, chart: Chart, order: u32) -> Vec<LaurentRational> {
        let one = CycloNumber::one(order);
        (0..=self.r)
            .map(|j| {
                let (e1, e2) = (&self.p + rint(self.r - j), &self.q + rint(j));
                let g = LaurentRational::monomial(Chart::X12, [e1.clone(), e2.clone(), self.k.clone()], one.clone());
                match chart {
                    Chart::X20 => LaurentRational::monomial(Chart::X20, [e2, self.k.clone(), e1], one.clone()),
                    Chart::X12 => g,
                    Chart::X21 => g.to_chart(Chart::X21).expect("monomial chart change"),
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub enum Fit {
    Determined(LaurentRational, u64),
    Underdetermined,
    /// First certified exponent no combination reproduces.
    Inconsistent(Vec<Rational>),
}

/// Solves for r from one side's certified coefficients.
pub fn fit_oracle(s: &FormalSeries, side: Side, shape: &OracleShape, deg: &Rational, chart: Chart) -> Result<Fit, JacobiError> {
    let o = s.order();
    let Some(rows) = side_rows(s, side, deg) else { return Ok(Fit::Underdetermined) };
    let hi = s.window().0[side.trunc_var()].hi.finite().cloned().expect("bounded rows");
    let basis = shape.basis(chart, o);
    let zero = CycloNumber::zero(o);
    let mut cols = Vec::new();
    for f in &basis {
        let ex = side.expand(f, hi.clone())?;
        cols.push(rows.iter().map(|e| ex.terms().get(e).cloned().unwrap_or_else(|| zero.clone())).collect::<Vec<_>>());
    }
    let target: Vec<CycloNumber> = rows.iter().map(|e| s.terms().get(e).cloned().unwrap_or_else(|| zero.clone())).collect();
    let Some((x, rank)) = solve_with_rank(&cols, &target, o) else {
        for m in 1..=rows.len() {
            let sub: Vec<Vec<CycloNumber>> = cols.iter().map(|c| c[..m].to_vec()).collect();
            if solve_with_rank(&sub, &target[..m], o).is_none() {
                return Ok(Fit::Inconsistent(rows[m - 1].clone()));
            }
        }
        return Ok(Fit::Inconsistent(rows[0].clone()));
    };
    if rank < basis.len() {
        return Ok(Fit::Underdetermined);
    }
    let mut f = LaurentRational::zero(chart, o);
    for (b, c) in basis.iter().zip(&x) {
        if !c.is_zero() {
            f = if f.is_zero() { b.scale(c) } else { f.add(&b.scale(c))? };
        }
    }
    Ok(Fit::Determined(f, rows.len() as u64))
}

/// Formal commutativity and associativity against the rational oracle, plus the
/// reconstruction identities, for every quadruple, P row and basis function.
pub fn check_duality_formal(inst: &AlgebraInstance) -> CheckReport {
    let mut rep = CheckReport::new("duality-formal");
    let b = match derive_braiding(inst) {
        Ok(b) => b,
        Err(e) => {
            rep.fail_reason("braiding", e.to_string(), Witness::new("derive_braiding", "invertible blocks", "error"));
            return rep;
        }
    };
    let mut jobs = Vec::new();
    for q in inst.quadruples() {
        let basis = inst.gbasis.get(&q).cloned().unwrap_or_default();
        for row in inst.f_rows(q.0, q.1, q.2, q.3) {
            for el in &basis {
                jobs.push((q, row, el.clone(), basis.clone()));
            }
        }
    }
    let reports: Vec<CheckReport> = jobs.into_par_iter().map(|(q, row, el, basis)| duality_entry(inst, &b, q, row, &el, &basis)).collect();
    for r in reports {
        rep.extend(r);
    }
    rep
}

const DUALITY_CHECKS: [&str; 6] = [
    "reconstruction (product)",
    "reconstruction (iterate)",
    "rationality (product)",
    "commutativity",
    "associativity (expansion)",
    "associativity (substitution)",
];

/// Per check: coefficients compared, cases left undetermined, first witness.
#[derive(Clone, Default)]
struct Tally {
    checked: u64,
    under: u64,
    reason: Option<String>,
    witness: Option<Witness>,
}

impl Tally {
    fn fail(&mut self, w: Witness) {
        if self.witness.is_none() {
            self.witness = Some(w);
        }
    }
}

fn compare_into(t: &mut Tally, ex: &FormalSeries, data: &FormalSeries, rows: u64, at: &str, oracle: &LaurentRational) -> Result<(), JacobiError> {
    t.checked += rows;
    if let Some((e, x, y)) = first_difference(ex, data)? {
        t.fail(Witness::new(format!("({}) {} oracle {}", fmt_exps(&e), at, oracle), x.to_text(), y.to_text()));
    }
    Ok(())
}

fn duality_entry(inst: &AlgebraInstance, b: &BraidingMatrix, q: Quad, row: (usize, usize, usize), el: &GBasisElement, basis: &[GBasisElement]) -> CheckReport {
    let mut rep = CheckReport::new("duality-formal");
    let tag = format!("{} a5={} [{},{}] {}", quad_name(inst, q), inst.name(row.0), row.1, row.2, el.label);
    let mut t: Vec<Tally> = vec![Tally::default(); DUALITY_CHECKS.len()];
    let run = |t: &mut Vec<Tally>| -> Result<(), JacobiError> {
        let (a1, a2, a3, a4) = q;
        let z = ChannelTensor::basis_product(q, row, inst.order);
        let bz = z.braid(inst, b)?;
        let fz = z.fuse(inst)?;
        for w1 in basis_of(inst, a1) {
            for w2 in basis_of(inst, a2) {
                for w3 in basis_of(inst, a3) {
                    for d in duals_of(inst, a4) {
                        let at = format!("w1={} w2={} w3={} w'={}", lv(w1), lv(w2), lv(w3), lv((d.level, d.index)));
                        let pa = multiply_p(inst, &z, w1, w2, w3, d, true)?;
                        let pb = multiply_p(inst, &bz, w2, w1, w3, d, false)?;
                        let pi = iterate_i(inst, &fz, w1, w2, w3, d)?;
                        for (slot, side, s) in [(0usize, Side::Product, &pa), (1, Side::Iterate, &pi)] {
                            let part = s.coset_part(&side.cosets(el));
                            let g = component(s, el, basis, side)?;
                            let back = times_expansion(&g, &el.function(inst.order), side)?;
                            t[slot].checked += part.terms().len() as u64;
                            if let Some((e, x, y)) = first_difference(&back, &part)? {
                                t[slot].fail(Witness::new(format!("({}) {}", fmt_exps(&e), at), y.to_text(), x.to_text()));
                            }
                        }
                        let g = component(&pa, el, basis, Side::Product)?;
                        let gb = component(&pb, el, basis, Side::Braided)?;
                        let h = component(&pi, el, basis, Side::Iterate)?;
                        let (lq, lp, lk) = (leading(&g, Side::Product), leading(&gb, Side::Braided), leading(&h, Side::Iterate));
                        let (Some((q2, d1)), Some((p1, d2)), Some((k0, d3))) = (lq.clone(), lp.clone(), lk.clone()) else {
                            if lq.is_none() && lp.is_none() && lk.is_none() {
                                // every side vanishes on its window: the zero oracle fits
                                for x in t.iter_mut().skip(2) {
                                    x.checked += 1;
                                }
                            } else {
                                for x in t.iter_mut().skip(2) {
                                    x.under += 1;
                                }
                            }
                            continue;
                        };
                        if d1 != d2 || d1 != d3 {
                            t[2].fail(Witness::new(format!("total degree {}", at), crate::exactnum::fmt_rational(&d1), format!("{} / {}", crate::exactnum::fmt_rational(&d2), crate::exactnum::fmt_rational(&d3))));
                            continue;
                        }
                        let shape = match OracleShape::from_leading(p1.clone(), q2.clone(), k0.clone(), &d1) {
                            Ok(s) => s,
                            Err(r) => {
                                let loc = format!("leading orders x1^{} x2^{} (x1-x2)^{} in degree {} {}", p1, q2, k0, d1, at);
                                t[2].reason = Some("no rational function has these leading orders".into());
                                t[2].fail(Witness::new(loc, "polynomial part of degree >= 0", format!("degree {}", crate::exactnum::fmt_rational(&r))));
                                continue;
                            }
                        };
                        let fa = match fit_oracle(&g, Side::Product, &shape, &d1, Chart::X12)? {
                            Fit::Determined(f, n) => {
                                t[2].checked += n;
                                f
                            }
                            Fit::Underdetermined => {
                                for x in t.iter_mut().skip(2) {
                                    x.under += 1;
                                }
                                continue;
                            }
                            Fit::Inconsistent(e) => {
                                t[2].fail(Witness::new(format!("({}) {}", fmt_exps(&e), at), "in the span of the oracle shape", "outside"));
                                continue;
                            }
                        };
                        // <w', g(Bz; x2, x1)> = iota21(F)
                        if let (Some(hi), Some(rows)) = (gb.window().0[0].hi.finite(), side_rows(&gb, Side::Braided, &d1)) {
                            let ex = Side::Braided.expand(&fa, hi.clone())?;
                            compare_into(&mut t[3], &ex, &gb, rows.len() as u64, &at, &fa)?;
                        } else {
                            t[3].under += 1;
                        }
                        // <w', h(Fz; x0, x2)> = iota20(F)
                        if let (Some(hi), Some(rows)) = (h.window().0[0].hi.finite(), side_rows(&h, Side::Iterate, &d1)) {
                            let ex = Side::Iterate.expand(&fa, hi.clone())?;
                            compare_into(&mut t[4], &ex, &h, rows.len() as u64, &at, &fa)?;
                        } else {
                            t[4].under += 1;
                        }
                        // the iterate side's own oracle, brought back by x0 = x1 - x2
                        match fit_oracle(&h, Side::Iterate, &shape, &d1, Chart::X20)? {
                            Fit::Determined(fh, n) => {
                                t[5].checked += n;
                                if !rat_equal(&fa, &fh)? {
                                    t[5].fail(Witness::new(format!("{} at x0 = x1 - x2", at), fa.to_text(), fh.to_chart(Chart::X12)?.to_text()));
                                }
                            }
                            Fit::Underdetermined => t[5].under += 1,
                            Fit::Inconsistent(e) => t[5].fail(Witness::new(format!("({}) {}", fmt_exps(&e), at), "in the span of the oracle shape", "outside")),
                        }
                    }
                }
            }
        }
        Ok(())
    };
    if let Err(err) = run(&mut t) {
        match err {
            JacobiError::Ambiguous(..) => {
                rep.skip(format!("duality {}", tag), err.to_string());
            }
            _ => {
                rep.fail_reason(format!("duality {}", tag), err.to_string(), Witness::new("evaluation", "defined", "error"));
            }
        }
        return rep;
    }
    for (name, x) in DUALITY_CHECKS.iter().zip(t) {
        let axiom = format!("{} {}", name, tag);
        match x.witness {
            Some(w) => {
                let r = rep.fail(axiom, w);
                r.checked = x.checked;
                r.reason = x.reason;
            }
            None if x.checked == 0 && x.under > 0 => {
                rep.skip(axiom, "oracle underdetermined on the certified window");
            }
            None => {
                rep.pass(axiom, x.checked).with_skipped(x.under);
            }
        }
    }
    rep
}
