//! Sparse multivariate formal series with rational exponents and certified windows.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::exactnum::{binomial, frac01, fmt_rational, rint, CycloNumber, NumError, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("variable lists differ: {0:?} vs {1:?}")]
    VariableMismatch(Vec<String>, Vec<String>),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("product is not summable in variable `{0}` (infinite convolution)")]
    InfiniteConvolution(String),
    #[error("coefficient at ({0}) lies outside the certified window")]
    Uncertified(String),
    #[error("window in `{0}` must be bounded for this operation")]
    Unbounded(String),
    #[error(transparent)]
    Num(#[from] NumError),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    NegInf,
    Fin(Rational),
    PosInf,
}

impl Bound {
    pub fn int(n: i64) -> Bound {
        Bound::Fin(rint(n))
    }

    fn plus(&self, other: &Bound) -> Bound {
        match (self, other) {
            (Bound::Fin(a), Bound::Fin(b)) => Bound::Fin(a + b),
            (Bound::NegInf, Bound::PosInf) | (Bound::PosInf, Bound::NegInf) => {
                panic!("indeterminate bound sum")
            }
            (Bound::NegInf, _) | (_, Bound::NegInf) => Bound::NegInf,
            _ => Bound::PosInf,
        }
    }

    fn neg(&self) -> Bound {
        match self {
            Bound::NegInf => Bound::PosInf,
            Bound::PosInf => Bound::NegInf,
            Bound::Fin(a) => Bound::Fin(-a),
        }
    }

    fn contains_lo(&self, x: &Rational) -> bool {
        match self {
            Bound::NegInf => true,
            Bound::Fin(a) => a <= x,
            Bound::PosInf => false,
        }
    }

    fn contains_hi(&self, x: &Rational) -> bool {
        match self {
            Bound::PosInf => true,
            Bound::Fin(a) => x <= a,
            Bound::NegInf => false,
        }
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Bound::Fin(a) => Some(a),
            _ => None,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::NegInf => write!(f, "-inf"),
            Bound::PosInf => write!(f, "+inf"),
            Bound::Fin(a) => write!(f, "{}", fmt_rational(a)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Bound,
    pub hi: Bound,
}

impl Interval {
    pub fn new(lo: Bound, hi: Bound) -> Self {
        Interval { lo, hi }
    }

    pub fn full() -> Self {
        Interval { lo: Bound::NegInf, hi: Bound::PosInf }
    }

    pub fn ints(lo: i64, hi: i64) -> Self {
        Interval { lo: Bound::int(lo), hi: Bound::int(hi) }
    }

    pub fn up_to(hi: Rational) -> Self {
        Interval { lo: Bound::NegInf, hi: Bound::Fin(hi) }
    }

    pub fn point(x: Rational) -> Self {
        Interval { lo: Bound::Fin(x.clone()), hi: Bound::Fin(x) }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.lo.contains_lo(x) && self.hi.contains_hi(x)
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || self.lo == Bound::PosInf || self.hi == Bound::NegInf
    }

    pub fn is_full(&self) -> bool {
        self.lo == Bound::NegInf && self.hi == Bound::PosInf
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.clone().max(other.lo.clone()), hi: self.hi.clone().min(other.hi.clone()) }
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        if self.is_empty() {
            return other.clone();
        }
        if other.is_empty() {
            return self.clone();
        }
        Interval { lo: self.lo.clone().min(other.lo.clone()), hi: self.hi.clone().max(other.hi.clone()) }
    }

    fn sum(&self, other: &Interval) -> Interval {
        if self.is_empty() || other.is_empty() {
            return Interval { lo: Bound::PosInf, hi: Bound::NegInf };
        }
        Interval { lo: self.lo.plus(&other.lo), hi: self.hi.plus(&other.hi) }
    }

    fn empty() -> Interval {
        Interval { lo: Bound::PosInf, hi: Bound::NegInf }
    }

    fn shift(&self, d: &Rational) -> Interval {
        let f = Bound::Fin(d.clone());
        if self.is_empty() {
            return self.clone();
        }
        Interval { lo: self.lo.plus(&f), hi: self.hi.plus(&f) }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Per-variable certified exponent ranges.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Window(pub Vec<Interval>);

impl Window {
    pub fn cube(nvars: usize, w: i64) -> Window {
        Window(vec![Interval::ints(-w, w); nvars])
    }

    pub fn full(nvars: usize) -> Window {
        Window(vec![Interval::full(); nvars])
    }

    pub fn contains(&self, e: &[Rational]) -> bool {
        self.0.iter().zip(e).all(|(i, x)| i.contains(x))
    }

    pub fn intersect(&self, other: &Window) -> Window {
        Window(self.0.iter().zip(&other.0).map(|(a, b)| a.intersect(b)).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().any(|i| i.is_empty())
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// Per-variable coset representatives in [0,1).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExponentGrid(pub Vec<BTreeSet<Rational>>);

impl ExponentGrid {
    pub fn integer(nvars: usize) -> Self {
        ExponentGrid(vec![[Rational::zero()].into_iter().collect(); nvars])
    }

    pub fn union(&self, other: &Self) -> Self {
        ExponentGrid(self.0.iter().zip(&other.0).map(|(a, b)| a.union(b).cloned().collect()).collect())
    }

    pub fn sumset(&self, other: &Self) -> Self {
        ExponentGrid(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.iter().flat_map(|x| b.iter().map(move |y| frac01(&(x + y)))).collect())
                .collect(),
        )
    }

    pub fn on_grid(&self, e: &[Rational]) -> bool {
        self.0.iter().zip(e).all(|(g, x)| g.contains(&frac01(x)))
    }
}

pub type Exps = Vec<Rational>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalSeries {
    vars: Vec<String>,
    order: u32,
    terms: BTreeMap<Exps, CycloNumber>,
    grid: ExponentGrid,
    window: Window,
    /// Box known to contain the support of the untruncated series.
    support: Window,
}

fn ensure_same_vars(a: &FormalSeries, b: &FormalSeries) -> Result<(), SeriesError> {
    if a.vars != b.vars {
        Err(SeriesError::VariableMismatch(a.vars.clone(), b.vars.clone()))
    } else {
        Ok(())
    }
}

pub fn fmt_exps(e: &[Rational]) -> String {
    e.iter().map(fmt_rational).collect::<Vec<_>>().join(", ")
}

impl FormalSeries {
    pub fn new(vars: &[&str], order: u32, grid: ExponentGrid, window: Window, support: Window) -> Self {
        FormalSeries {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            order,
            terms: BTreeMap::new(),
            grid,
            window,
            support,
        }
    }

    /// Zero series certified on `window`.
    pub fn zero(vars: &[&str], order: u32, window: Window) -> Self {
        let n = vars.len();
        let support = Window(vec![Interval::empty(); n]);
        Self::new(vars, order, ExponentGrid::integer(n), window, support)
    }

    /// Finite Laurent polynomial, exact everywhere.
    pub fn polynomial(vars: &[&str], order: u32, terms: impl IntoIterator<Item = (Exps, CycloNumber)>) -> Self {
        let n = vars.len();
        let mut s = Self::new(vars, order, ExponentGrid(vec![BTreeSet::new(); n]), Window::full(n), Window(vec![Interval::empty(); n]));
        for (e, c) in terms {
            for (i, x) in e.iter().enumerate() {
                s.grid.0[i].insert(frac01(x));
                s.support.0[i] = s.support.0[i].hull(&Interval::point(x.clone()));
            }
            s.add_term(e, c);
        }
        for g in s.grid.0.iter_mut() {
            if g.is_empty() {
                g.insert(Rational::zero());
            }
        }
        s
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn support(&self) -> &Window {
        &self.support
    }

    pub fn grid(&self) -> &ExponentGrid {
        &self.grid
    }

    pub fn terms(&self) -> &BTreeMap<Exps, CycloNumber> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn set_support(&mut self, support: Window) {
        self.support = support;
    }

    pub fn set_grid(&mut self, grid: ExponentGrid) {
        self.grid = grid;
    }

    fn var_index(&self, name: &str) -> Result<usize, SeriesError> {
        self.vars.iter().position(|v| v == name).ok_or_else(|| SeriesError::UnknownVariable(name.to_string()))
    }

    /// Adds c to the coefficient at e; terms outside the window are dropped.
    pub fn add_term(&mut self, e: Exps, c: CycloNumber) {
        if c.is_zero() || !self.window.contains(&e) {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                let s = &*v + &c;
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn restrict(&self, window: &Window) -> FormalSeries {
        let w = self.window.intersect(window);
        let mut out = self.clone();
        out.terms.retain(|e, _| w.contains(e));
        out.window = w;
        out
    }

    /// Terms whose exponents lie in the given cosets mod 1; the grid shrinks to match.
    pub fn coset_part(&self, cosets: &[Rational]) -> FormalSeries {
        let mut out = self.clone();
        out.terms.retain(|e, _| e.iter().zip(cosets).all(|(x, q)| frac01(x) == frac01(q)));
        out.grid = ExponentGrid(cosets.iter().map(|q| [frac01(q)].into_iter().collect()).collect());
        out
    }

    pub fn scale(&self, c: &CycloNumber) -> FormalSeries {
        let mut out = self.clone();
        out.terms = self.terms.iter().map(|(e, v)| (e.clone(), v * c)).filter(|(_, v)| !v.is_zero()).collect();
        out
    }

    pub fn neg(&self) -> FormalSeries {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = -&*v;
        }
        out
    }

    /// Permutes variables into `order`.
    pub fn reorder(&self, order: &[&str]) -> Result<FormalSeries, SeriesError> {
        if order.len() != self.vars.len() {
            return Err(SeriesError::VariableMismatch(self.vars.clone(), order.iter().map(|s| s.to_string()).collect()));
        }
        let idx: Vec<usize> = order.iter().map(|v| self.var_index(v)).collect::<Result<_, _>>()?;
        let perm = |v: &Vec<Rational>| idx.iter().map(|&i| v[i].clone()).collect::<Vec<_>>();
        Ok(FormalSeries {
            vars: order.iter().map(|s| s.to_string()).collect(),
            order: self.order,
            terms: self.terms.iter().map(|(e, c)| (perm(e), c.clone())).collect(),
            grid: ExponentGrid(idx.iter().map(|&i| self.grid.0[i].clone()).collect()),
            window: Window(idx.iter().map(|&i| self.window.0[i].clone()).collect()),
            support: Window(idx.iter().map(|&i| self.support.0[i].clone()).collect()),
        })
    }

    /// Embeds into a larger variable list; new variables carry exponent 0.
    pub fn lift(&self, vars: &[&str]) -> Result<FormalSeries, SeriesError> {
        let pos: Vec<Option<usize>> = vars.iter().map(|v| self.vars.iter().position(|s| s == v)).collect();
        for v in &self.vars {
            if !vars.contains(&v.as_str()) {
                return Err(SeriesError::UnknownVariable(v.clone()));
            }
        }
        let pick = |src: &Vec<Rational>| -> Vec<Rational> {
            pos.iter().map(|p| p.map(|i| src[i].clone()).unwrap_or_else(Rational::zero)).collect()
        };
        Ok(FormalSeries {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            order: self.order,
            terms: self.terms.iter().map(|(e, c)| (pick(e), c.clone())).collect(),
            grid: ExponentGrid(
                pos.iter()
                    .map(|p| p.map(|i| self.grid.0[i].clone()).unwrap_or_else(|| [Rational::zero()].into_iter().collect()))
                    .collect(),
            ),
            window: Window(pos.iter().map(|p| p.map(|i| self.window.0[i].clone()).unwrap_or_else(Interval::full)).collect()),
            support: Window(
                pos.iter()
                    .map(|p| p.map(|i| self.support.0[i].clone()).unwrap_or_else(|| Interval::point(Rational::zero())))
                    .collect(),
            ),
        })
    }

    pub fn extract_coefficient(&self, e: &[Rational]) -> Result<CycloNumber, SeriesError> {
        if e.len() != self.vars.len() {
            return Err(SeriesError::Uncertified(fmt_exps(e)));
        }
        if !self.window.contains(e) {
            return Err(SeriesError::Uncertified(fmt_exps(e)));
        }
        Ok(self.terms.get(e).cloned().unwrap_or_else(|| CycloNumber::zero(self.order)))
    }

    /// One `exponent-tuple : coefficient` line per term, lexicographic.
    pub fn debug_dump(&self) -> String {
        let mut out = String::new();
        for (e, c) in &self.terms {
            out.push_str(&format!("({}) : {}\n", fmt_exps(e), c));
        }
        out
    }
}

pub fn s_add(a: &FormalSeries, b: &FormalSeries) -> Result<FormalSeries, SeriesError> {
    ensure_same_vars(a, b)?;
    let window = a.window.intersect(&b.window);
    let mut out = FormalSeries {
        vars: a.vars.clone(),
        order: a.order,
        terms: BTreeMap::new(),
        grid: a.grid.union(&b.grid),
        window,
        support: Window(a.support.0.iter().zip(&b.support.0).map(|(x, y)| x.hull(y)).collect()),
    };
    for (e, c) in a.terms.iter().chain(b.terms.iter()) {
        out.add_term(e.clone(), c.clone());
    }
    Ok(out)
}

pub fn s_sub(a: &FormalSeries, b: &FormalSeries) -> Result<FormalSeries, SeriesError> {
    s_add(a, &b.neg())
}

/// Output interval for one variable of a product, or an error if not summable.
fn mul_interval(var: &str, wa: &Interval, sa: &Interval, wb: &Interval, sb: &Interval) -> Result<Interval, SeriesError> {
    if sa.is_empty() || sb.is_empty() {
        return Ok(wa.sum(wb).hull(&Interval::full()));
    }
    if (sa.lo == Bound::NegInf && sb.hi == Bound::PosInf) || (sa.hi == Bound::PosInf && sb.lo == Bound::NegInf) {
        return Err(SeriesError::InfiniteConvolution(var.to_string()));
    }
    let mut hi = Bound::PosInf;
    if sa.hi > wa.hi {
        hi = hi.min(wa.hi.plus(&sb.lo));
    }
    if sb.hi > wb.hi {
        hi = hi.min(wb.hi.plus(&sa.lo));
    }
    let mut lo = Bound::NegInf;
    if sa.lo < wa.lo {
        lo = lo.max(wa.lo.plus(&sb.hi));
    }
    if sb.lo < wb.lo {
        lo = lo.max(wb.lo.plus(&sa.hi));
    }
    Ok(Interval { lo, hi })
}

/// Product with the largest window certified from operand windows and support bounds.
pub fn s_mul(a: &FormalSeries, b: &FormalSeries) -> Result<FormalSeries, SeriesError> {
    ensure_same_vars(a, b)?;
    let n = a.vars.len();
    let mut window = Vec::with_capacity(n);
    for i in 0..n {
        window.push(mul_interval(&a.vars[i], &a.window.0[i], &a.support.0[i], &b.window.0[i], &b.support.0[i])?);
    }
    let window = Window(window);
    let mut out = FormalSeries {
        vars: a.vars.clone(),
        order: a.order,
        terms: BTreeMap::new(),
        grid: a.grid.sumset(&b.grid),
        window,
        support: Window(a.support.0.iter().zip(&b.support.0).map(|(x, y)| x.sum(y)).collect()),
    };
    if out.window.is_empty() {
        return Ok(out);
    }
    for (ea, ca) in &a.terms {
        for (eb, cb) in &b.terms {
            let e: Exps = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            if out.window.contains(&e) {
                out.add_term(e, ca * cb);
            }
        }
    }
    Ok(out)
}

pub fn residue(a: &FormalSeries, var: &str) -> Result<FormalSeries, SeriesError> {
    let i = a.var_index(var)?;
    let m1 = rint(-1);
    if !a.window.0[i].contains(&m1) {
        return Err(SeriesError::Uncertified(format!("{} = -1", var)));
    }
    let keep: Vec<usize> = (0..a.vars.len()).filter(|&j| j != i).collect();
    let vars: Vec<&str> = keep.iter().map(|&j| a.vars[j].as_str()).collect();
    let mut out = FormalSeries::new(
        &vars,
        a.order,
        ExponentGrid(keep.iter().map(|&j| a.grid.0[j].clone()).collect()),
        Window(keep.iter().map(|&j| a.window.0[j].clone()).collect()),
        Window(keep.iter().map(|&j| a.support.0[j].clone()).collect()),
    );
    for (e, c) in &a.terms {
        if e[i] == m1 {
            out.add_term(keep.iter().map(|&j| e[j].clone()).collect(), c.clone());
        }
    }
    Ok(out)
}

/// Exponent-wise derivative n x^(n-1).
pub fn derivative(a: &FormalSeries, var: &str) -> Result<FormalSeries, SeriesError> {
    let i = a.var_index(var)?;
    let mut out = a.clone();
    let one = Rational::one();
    out.window.0[i] = a.window.0[i].shift(&-&one);
    out.support.0[i] = a.support.0[i].shift(&-&one);
    out.terms.clear();
    for (e, c) in &a.terms {
        let mut e2 = e.clone();
        e2[i] = &e[i] - &one;
        out.add_term(e2, c.scale(&e[i]));
    }
    Ok(out)
}

fn int_range(iv: &Interval, var: &str) -> Result<(i64, i64), SeriesError> {
    let lo = iv.lo.finite().ok_or_else(|| SeriesError::Unbounded(var.to_string()))?;
    let hi = iv.hi.finite().ok_or_else(|| SeriesError::Unbounded(var.to_string()))?;
    Ok((lo.ceil().to_integer().to_i64().unwrap(), hi.floor().to_integer().to_i64().unwrap()))
}

/// delta(x) = sum over integers n of x^n, on a bounded window.
pub fn delta_series(var: &str, window: &Interval, order: u32) -> Result<FormalSeries, SeriesError> {
    let (lo, hi) = int_range(window, var)?;
    let mut s = FormalSeries::new(&[var], order, ExponentGrid::integer(1), Window(vec![window.clone()]), Window::full(1));
    for n in lo..=hi {
        s.add_term(vec![rint(n)], CycloNumber::one(order));
    }
    Ok(s)
}

/// (x_i + sign x_j)^r expanded in nonnegative powers of x_j.
pub fn binomial_expand(vi: &str, sign: i8, vj: &str, r: &Rational, window: &Window, order: u32) -> Result<FormalSeries, SeriesError> {
    let wj = &window.0[1];
    let mhi = match &wj.hi {
        Bound::Fin(h) => h.floor().to_integer().to_i64().unwrap(),
        Bound::PosInf => {
            if r.is_integer() && !r.is_negative() {
                r.to_integer().to_i64().unwrap()
            } else {
                return Err(SeriesError::Unbounded(vj.to_string()));
            }
        }
        Bound::NegInf => -1,
    };
    let mut mlo = 0i64;
    if let Bound::Fin(l) = &wj.lo {
        mlo = mlo.max(l.ceil().to_integer().to_i64().unwrap());
    }
    let mut grid = ExponentGrid::integer(2);
    grid.0[0] = [frac01(r)].into_iter().collect();
    let finite = r.is_integer() && !r.is_negative();
    let support = Window(vec![
        Interval { lo: if finite { Bound::Fin(rint(0)) } else { Bound::NegInf }, hi: Bound::Fin(r.clone()) },
        Interval { lo: Bound::int(0), hi: if finite { Bound::Fin(r.clone()) } else { Bound::PosInf } },
    ]);
    let mut s = FormalSeries::new(&[vi, vj], order, grid, window.clone(), support);
    let sg = rint(sign as i64);
    for m in mlo.max(0)..=mhi {
        let c = binomial(r, m as u64);
        if c.is_zero() {
            if finite {
                break;
            }
            continue;
        }
        let c = c * num_traits::pow(sg.clone(), m as usize);
        s.add_term(vec![r - rint(m), rint(m)], CycloNumber::from_rational(c, order));
    }
    Ok(s)
}

/// A delta kernel x_d^{-1} delta((x_a + sign x_b)/(+-x_d)).
#[derive(Clone, Debug)]
pub struct DeltaKernel {
    pub d: String,
    pub a: String,
    pub b: String,
    pub sign: i8,
    pub neg_denominator: bool,
}

impl DeltaKernel {
    pub fn new(d: &str, a: &str, sign: i8, b: &str, neg_denominator: bool) -> Self {
        DeltaKernel { d: d.into(), a: a.into(), b: b.into(), sign, neg_denominator }
    }

    /// Coefficient of x_d^{-n-1} x_a^{n-m} x_b^m.
    pub fn coeff(&self, n: i64, m: i64) -> Rational {
        let mut c = binomial(&rint(n), m as u64);
        if self.sign < 0 && m % 2 != 0 {
            c = -c;
        }
        if self.neg_denominator && n.rem_euclid(2) != 0 {
            c = -c;
        }
        c
    }
}

/// Materializes a delta kernel on a bounded window; variables ordered (d, a, b).
pub fn delta_two_summand(kernel: &DeltaKernel, window: &Window, order: u32) -> Result<FormalSeries, SeriesError> {
    let (dlo, dhi) = int_range(&window.0[0], &kernel.d)?;
    let (blo, bhi) = match int_range(&window.0[2], &kernel.b) {
        Ok(r) => r,
        Err(_) => (0, int_range(&Interval { lo: Bound::int(0), hi: window.0[2].hi.clone() }, &kernel.b)?.1),
    };
    let support = Window(vec![Interval::full(), Interval::full(), Interval { lo: Bound::int(0), hi: Bound::PosInf }]);
    let vars = [kernel.d.as_str(), kernel.a.as_str(), kernel.b.as_str()];
    let mut s = FormalSeries::new(&vars, order, ExponentGrid::integer(3), window.clone(), support);
    for ed in dlo..=dhi {
        let n = -ed - 1;
        for m in blo.max(0)..=bhi {
            let ea = rint(n - m);
            if !window.0[1].contains(&ea) {
                continue;
            }
            let c = kernel.coeff(n, m);
            if !c.is_zero() {
                s.add_term(vec![rint(ed), ea, rint(m)], CycloNumber::from_rational(c, order));
            }
        }
    }
    Ok(s)
}

/// Product of a delta kernel with a two-variable series g, lower-truncated in the kernel's
/// variable b and fully certified in its other variable.  The output uses `out_vars`
/// (a permutation of d, a, b); the window is `target` clipped to where every
/// contributing coefficient of g is certified.
pub fn kernel_mul(kernel: &DeltaKernel, g: &FormalSeries, out_vars: &[&str], target: &Window) -> Result<FormalSeries, SeriesError> {
    let ib = g.var_index(&kernel.b)?;
    let (other, has_d) = if let Ok(i) = g.var_index(&kernel.d) {
        (i, true)
    } else {
        (g.var_index(&kernel.a)?, false)
    };
    if g.vars.len() != 2 {
        return Err(SeriesError::VariableMismatch(g.vars.clone(), vec![kernel.b.clone()]));
    }
    if !g.window.0[other].is_full() {
        return Err(SeriesError::Uncertified(format!("{} window must be full", g.vars[other])));
    }
    let sb = match &g.support.0[ib].lo {
        Bound::Fin(x) => x.clone(),
        Bound::PosInf => rint(0),
        Bound::NegInf => return Err(SeriesError::InfiniteConvolution(kernel.b.clone())),
    };
    if let Bound::Fin(l) = &g.window.0[ib].lo {
        if &sb < l {
            return Err(SeriesError::Uncertified(format!("{} below window", kernel.b)));
        }
    }
    let pos = |name: &str| out_vars.iter().position(|v| *v == name).ok_or_else(|| SeriesError::UnknownVariable(name.to_string()));
    let (pd, pa, pb) = (pos(&kernel.d)?, pos(&kernel.a)?, pos(&kernel.b)?);
    let mut window = target.clone();
    window.0[pb] = window.0[pb].intersect(&g.window.0[ib]);
    let mut grid = ExponentGrid::integer(3);
    grid.0[pb] = g.grid.0[ib].clone();
    grid.0[if has_d { pd } else { pa }] = g.grid.0[other].clone();
    let mut out = FormalSeries::new(out_vars, g.order, grid, window.clone(), Window::full(3));
    if window.is_empty() {
        return Ok(out);
    }
    let fin = |b: &Bound, name: &str| b.finite().cloned().ok_or_else(|| SeriesError::Unbounded(name.to_string()));
    let (dlo, dhi) = (fin(&window.0[pd].lo, &kernel.d)?, fin(&window.0[pd].hi, &kernel.d)?);
    let (alo, ahi) = (fin(&window.0[pa].lo, &kernel.a)?, fin(&window.0[pa].hi, &kernel.a)?);
    let bhi = fin(&window.0[pb].hi, &kernel.b)?;
    let ceil = |q: Rational| q.ceil().to_integer().to_i64().unwrap();
    let floor = |q: Rational| q.floor().to_integer().to_i64().unwrap();
    for (e, c) in &g.terms {
        let gb = &e[ib];
        let go = &e[other];
        let mmax = floor(&bhi - gb);
        for m in 0..=mmax {
            let eb = gb + rint(m);
            if !window.0[pb].contains(&eb) {
                continue;
            }
            let mr = rint(m);
            // n from the d constraint and the a constraint
            let (mut nlo, mut nhi) = if has_d {
                (ceil(go - rint(1) - &dhi), floor(go - rint(1) - &dlo))
            } else {
                (ceil(-rint(1) - &dhi), floor(-rint(1) - &dlo))
            };
            let off = if has_d { Rational::zero() } else { go.clone() };
            nlo = nlo.max(ceil(&alo - &off + &mr));
            nhi = nhi.min(floor(&ahi - &off + &mr));
            for n in nlo..=nhi {
                let kc = kernel.coeff(n, m);
                if kc.is_zero() {
                    continue;
                }
                let mut ex = vec![Rational::zero(); 3];
                ex[pb] = eb.clone();
                if has_d {
                    ex[pd] = go + rint(-n - 1);
                    ex[pa] = rint(n - m);
                } else {
                    ex[pd] = rint(-n - 1);
                    ex[pa] = go + rint(n - m);
                }
                out.add_term(ex, c.scale(&kc));
            }
        }
    }
    Ok(out)
}

/// Multiplies each coefficient at exponent n of `var` by e^(half_turns * pi i * n).
pub fn substitute_phase(a: &FormalSeries, var: &str, half_turns: i64) -> Result<FormalSeries, SeriesError> {
    let i = a.var_index(var)?;
    let mut out = a.clone();
    out.terms.clear();
    for (e, c) in &a.terms {
        let ph = CycloNumber::phase_half_turns(&(&e[i] * rint(half_turns)), a.order)?;
        out.add_term(e.clone(), c * &ph);
    }
    Ok(out)
}

/// First exponent (lexicographic) inside both windows where a and b differ.
pub fn first_difference(a: &FormalSeries, b: &FormalSeries) -> Result<Option<(Exps, CycloNumber, CycloNumber)>, SeriesError> {
    ensure_same_vars(a, b)?;
    let w = a.window.intersect(&b.window);
    let keys: BTreeSet<&Exps> = a.terms.keys().chain(b.terms.keys()).filter(|e| w.contains(e)).collect();
    let zero = CycloNumber::zero(a.order);
    for e in keys {
        let x = a.terms.get(e).unwrap_or(&zero);
        let y = b.terms.get(e).unwrap_or(&zero);
        if x != y {
            return Ok(Some((e.clone(), x.clone(), y.clone())));
        }
    }
    Ok(None)
}

/// Number of grid points of `grid` inside a bounded window.
pub fn count_points(grid: &ExponentGrid, window: &Window) -> u64 {
    let mut total = 1u64;
    for (g, iv) in grid.0.iter().zip(&window.0) {
        let (lo, hi) = match (iv.lo.finite(), iv.hi.finite()) {
            (Some(l), Some(h)) => (l.clone(), h.clone()),
            _ => return u64::MAX,
        };
        if lo > hi {
            return 0;
        }
        let mut c = 0u64;
        for q in g {
            // integers k with lo <= q + k <= hi
            let kl = (&lo - q).ceil().to_integer();
            let kh = (&hi - q).floor().to_integer();
            if kh >= kl {
                c += (kh - kl).to_u64().unwrap() + 1;
            }
        }
        total = total.saturating_mul(c);
    }
    total
}

pub fn neg_bound(b: &Bound) -> Bound {
    b.neg()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    fn one(o: u32) -> CycloNumber {
        CycloNumber::one(o)
    }

    #[test]
    fn add_examples() {
        let d = delta_series("x", &Interval::ints(-3, 3), 1).unwrap();
        assert!(s_add(&d, &d.neg()).unwrap().is_empty());
        let h = FormalSeries::polynomial(&["x"], 1, [(vec![rat(1, 2)], one(1))]);
        let s = s_add(&h, &h).unwrap();
        assert_eq!(s.extract_coefficient(&[rat(1, 2)]).unwrap(), CycloNumber::from_int(2, 1));
        let a = delta_series("x", &Interval::ints(-3, 3), 1).unwrap();
        let b = delta_series("x", &Interval::ints(-2, 5), 1).unwrap();
        assert_eq!(s_add(&a, &b).unwrap().window().0[0], Interval::ints(-2, 3));
    }

    #[test]
    fn mul_examples() {
        let p = FormalSeries::polynomial(&["x"], 1, [(vec![rint(0)], one(1)), (vec![rint(1)], one(1).neg())]);
        let mut geo = FormalSeries::new(&["x"], 1, ExponentGrid::integer(1), Window(vec![Interval::up_to(rint(10))]), Window(vec![Interval { lo: Bound::int(0), hi: Bound::PosInf }]));
        for n in 0..=10 {
            geo.add_term(vec![rint(n)], one(1));
        }
        let prod = s_mul(&p, &geo).unwrap();
        assert_eq!(prod.len(), 1);
        assert!(prod.extract_coefficient(&[rint(0)]).unwrap().is_one());
        assert!(prod.extract_coefficient(&[rint(11)]).is_err());
        let d = delta_series("x", &Interval::ints(-5, 5), 1).unwrap();
        assert!(matches!(s_mul(&d, &d), Err(SeriesError::InfiniteConvolution(_))));
        // f(x) delta(x) = f(1) delta(x), f = 2x^3 - x
        let f = FormalSeries::polynomial(&["x"], 1, [(vec![rint(3)], CycloNumber::from_int(2, 1)), (vec![rint(1)], one(1).neg())]);
        let fd = s_mul(&f, &d).unwrap();
        assert_eq!(fd.window().0[0], Interval::ints(-2, 6));
        assert_eq!(fd, delta_series("x", &Interval::ints(-2, 6), 1).unwrap().restrict(fd.window()).with_support(fd.support().clone()));
    }

    impl FormalSeries {
        fn with_support(mut self, s: Window) -> Self {
            self.support = s;
            self
        }
    }

    #[test]
    fn residue_examples() {
        let d = delta_series("x", &Interval::ints(-4, 4), 1).unwrap();
        let r = residue(&d, "x").unwrap();
        assert!(r.extract_coefficient(&[]).unwrap().is_one());
        let h = FormalSeries::polynomial(&["x"], 1, [(vec![rat(1, 2)], one(1))]);
        assert!(residue(&h, "x").unwrap().is_empty());
        let w = delta_series("x", &Interval::ints(0, 4), 1).unwrap();
        assert!(residue(&w, "x").is_err());
    }

    #[test]
    fn delta_coefficients() {
        let d = delta_series("x", &Interval::ints(-10, 10), 1).unwrap();
        assert!(d.extract_coefficient(&[rint(0)]).unwrap().is_one());
        assert!(d.extract_coefficient(&[rint(-7)]).unwrap().is_one());
        assert!(d.extract_coefficient(&[rat(1, 2)]).unwrap().is_zero());
        assert!(d.extract_coefficient(&[rint(11)]).is_err());
        let k = DeltaKernel::new("x0", "x1", -1, "x2", false);
        assert_eq!(k.coeff(-1, 3), rint(-1) * binomial(&rint(-1), 3));
    }

    #[test]
    fn binomial_examples() {
        let w = Window(vec![Interval::full(), Interval::up_to(rint(6))]);
        let s = binomial_expand("x1", -1, "x2", &rint(-1), &w, 1).unwrap();
        for m in 0..=6 {
            assert!(s.extract_coefficient(&[rint(-1 - m), rint(m)]).unwrap().is_one());
        }
        let s = binomial_expand("x1", 1, "x2", &rint(2), &Window::full(2), 1).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.extract_coefficient(&[rint(1), rint(1)]).unwrap(), CycloNumber::from_int(2, 1));
    }

    #[test]
    fn phase_substitution() {
        let s = FormalSeries::polynomial(&["x"], 4, [(vec![rat(1, 2)], one(4)), (vec![rint(3)], one(4))]);
        let t = substitute_phase(&s, "x", -1).unwrap();
        assert_eq!(t.extract_coefficient(&[rat(1, 2)]).unwrap(), CycloNumber::root_of_unity(1, 4, 4).unwrap().neg());
        assert_eq!(substitute_phase(&t, "x", 1).unwrap(), s);
        let i = FormalSeries::polynomial(&["x"], 1, [(vec![rint(3)], one(1))]);
        assert_eq!(substitute_phase(&i, "x", 2).unwrap(), i);
        let q = FormalSeries::polynomial(&["x"], 4, [(vec![rat(1, 4)], one(4))]);
        assert!(substitute_phase(&q, "x", 1).is_err());
    }

    #[test]
    fn dump_is_sorted() {
        let s = FormalSeries::polynomial(&["x", "y"], 1, [(vec![rint(2), rint(0)], one(1)), (vec![rint(-1), rint(3)], one(1))]);
        assert_eq!(s.debug_dump(), "(-1, 3) : 1\n(2, 0) : 1\n");
    }
}
