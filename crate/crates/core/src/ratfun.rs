//! Laurent rationals in two variables with (difference) inverted, times a
//! rational-exponent monomial prefactor, and their expansion maps.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::exactnum::{binomial, frac01, fmt_rational, rint, CycloNumber, NumError, Rational};
use crate::series::{Bound, ExponentGrid, FormalSeries, Interval, SeriesError, Window};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RatError {
    #[error("function is not in the span of the given basis at coset ({0})")]
    NotInSpan(String),
    #[error("basis elements {0} and {1} share a coset triple")]
    AmbiguousBasis(String, String),
    #[error("cannot add functions from different cosets")]
    CosetMismatch,
    #[error("chart mismatch")]
    ChartMismatch,
    #[error("element is not invertible in the ring")]
    NotInvertible,
    #[error(transparent)]
    Num(#[from] NumError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Coordinates (y1, y2) with third factor L = y1 + sigma*y2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Chart {
    /// y1 = x1, y2 = x2, L = x1 - x2
    X12,
    /// y1 = x2, y2 = x1, L = x2 - x1
    X21,
    /// y1 = x2, y2 = x0, L = x2 + x0 (= x1)
    X20,
}

impl Chart {
    pub fn vars(self) -> (&'static str, &'static str) {
        match self {
            Chart::X12 => ("x1", "x2"),
            Chart::X21 => ("x2", "x1"),
            Chart::X20 => ("x2", "x0"),
        }
    }

    pub fn sigma(self) -> i64 {
        match self {
            Chart::X20 => 1,
            _ => -1,
        }
    }
}

/// Bivariate polynomial over the cyclotomic field, keyed by (deg y1, deg y2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly2 {
    order: u32,
    terms: BTreeMap<(u32, u32), CycloNumber>,
}

impl Poly2 {
    pub fn zero(order: u32) -> Self {
        Poly2 { order, terms: BTreeMap::new() }
    }

    pub fn constant(c: CycloNumber) -> Self {
        let mut p = Poly2::zero(c.order());
        p.add_term(0, 0, c);
        p
    }

    pub fn from_terms(order: u32, terms: impl IntoIterator<Item = ((u32, u32), CycloNumber)>) -> Self {
        let mut p = Poly2::zero(order);
        for ((a, b), c) in terms {
            p.add_term(a, b, c);
        }
        p
    }

    pub fn terms(&self) -> &BTreeMap<(u32, u32), CycloNumber> {
        &self.terms
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, a: u32, b: u32, c: CycloNumber) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((a, b)).or_insert_with(|| CycloNumber::zero(c.order()));
        *e = &*e + &c;
        if e.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    pub fn add(&self, other: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for (&(a, b), c) in &other.terms {
            out.add_term(a, b, c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Poly2) -> Poly2 {
        let mut out = Poly2::zero(self.order);
        for (&(a, b), c) in &self.terms {
            for (&(a2, b2), c2) in &other.terms {
                out.add_term(a + a2, b + b2, c * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &CycloNumber) -> Poly2 {
        Poly2::from_terms(self.order, self.terms.iter().map(|(k, v)| (*k, v * c)))
    }

    pub fn pow(&self, n: u32) -> Poly2 {
        let mut out = Poly2::constant(CycloNumber::one(self.order));
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    pub fn min_deg(&self, var: usize) -> u32 {
        self.terms.keys().map(|k| if var == 0 { k.0 } else { k.1 }).min().unwrap_or(0)
    }

    pub fn max_deg(&self, var: usize) -> u32 {
        self.terms.keys().map(|k| if var == 0 { k.0 } else { k.1 }).max().unwrap_or(0)
    }

    fn shift_down(&self, a: u32, b: u32) -> Poly2 {
        Poly2 { order: self.order, terms: self.terms.iter().map(|(&(x, y), c)| ((x - a, y - b), c.clone())).collect() }
    }

    /// y1 + sigma*y2
    pub fn linear(order: u32, c1: i64, c2: i64) -> Poly2 {
        Poly2::from_terms(order, [((1, 0), CycloNumber::from_int(c1, order)), ((0, 1), CycloNumber::from_int(c2, order))])
    }

    /// g(l1, l2) where l1, l2 are linear forms.
    pub fn substitute(&self, l1: &Poly2, l2: &Poly2) -> Poly2 {
        let mut out = Poly2::zero(self.order);
        for (&(a, b), c) in &self.terms {
            out = out.add(&l1.pow(a).mul(&l2.pow(b)).scale(c));
        }
        out
    }

    /// Exact quotient by y1 + sigma*y2, if it divides.
    fn div_linear(&self, sigma: i64) -> Option<Poly2> {
        // Univariate in y1 over polys in y2: synthetic division by (y1 - r), r = -sigma*y2.
        let deg = self.max_deg(0);
        let mut rows: Vec<BTreeMap<u32, CycloNumber>> = vec![BTreeMap::new(); deg as usize + 1];
        for (&(a, b), c) in &self.terms {
            rows[a as usize].insert(b, c.clone());
        }
        let mut q: Vec<BTreeMap<u32, CycloNumber>> = vec![BTreeMap::new(); deg as usize];
        let mut carry: BTreeMap<u32, CycloNumber> = BTreeMap::new();
        let neg_sigma = CycloNumber::from_int(-sigma, self.order);
        for a in (0..=deg as usize).rev() {
            // current = rows[a] + r*carry
            let mut cur = rows[a].clone();
            for (b, c) in &carry {
                let v = c * &neg_sigma;
                let e = cur.entry(b + 1).or_insert_with(|| CycloNumber::zero(self.order));
                *e = &*e + &v;
            }
            cur.retain(|_, v| !v.is_zero());
            if a == 0 {
                if !cur.is_empty() {
                    return None;
                }
            } else {
                q[a - 1] = cur.clone();
                carry = cur;
            }
        }
        let mut out = Poly2::zero(self.order);
        for (a, row) in q.into_iter().enumerate() {
            for (b, c) in row {
                out.add_term(a as u32, b, c);
            }
        }
        Some(out)
    }

    fn to_text(&self, v1: &str, v2: &str) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (&(a, b), c) in &self.terms {
            let mut mono = Vec::new();
            if a > 0 {
                mono.push(if a == 1 { v1.to_string() } else { format!("{}^{}", v1, a) });
            }
            if b > 0 {
                mono.push(if b == 1 { v2.to_string() } else { format!("{}^{}", v2, b) });
            }
            if mono.is_empty() {
                parts.push(format!("({})", c));
            } else if c.is_one() {
                parts.push(mono.join("*"));
            } else {
                parts.push(format!("({})*{}", c, mono.join("*")));
            }
        }
        parts.join(" + ")
    }
}

/// y1^E1 * y2^E2 * L^E3 * g(y1, y2) with g coprime to y1, y2 and L.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentRational {
    chart: Chart,
    exps: [Rational; 3],
    g: Poly2,
}

impl LaurentRational {
    pub fn zero(chart: Chart, order: u32) -> Self {
        LaurentRational { chart, exps: [Rational::zero(), Rational::zero(), Rational::zero()], g: Poly2::zero(order) }
    }

    pub fn new(chart: Chart, exps: [Rational; 3], g: Poly2) -> Self {
        let mut f = LaurentRational { chart, exps, g };
        f.canonicalize();
        f
    }

    pub fn monomial(chart: Chart, exps: [Rational; 3], c: CycloNumber) -> Self {
        Self::new(chart, exps, Poly2::constant(c))
    }

    /// x1^a x2^b (1 - x2/x1)^c, stored as x1^(a-c) x2^b (x1-x2)^c.
    pub fn gbasis_function(a: &Rational, b: &Rational, c: &Rational, order: u32) -> Self {
        Self::monomial(Chart::X12, [a - c, b.clone(), c.clone()], CycloNumber::one(order))
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn exps(&self) -> &[Rational; 3] {
        &self.exps
    }

    pub fn core(&self) -> &Poly2 {
        &self.g
    }

    pub fn order(&self) -> u32 {
        self.g.order
    }

    pub fn is_zero(&self) -> bool {
        self.g.is_zero()
    }

    /// Fractional parts of the exponent triple.
    pub fn coset(&self) -> [Rational; 3] {
        [frac01(&self.exps[0]), frac01(&self.exps[1]), frac01(&self.exps[2])]
    }

    fn canonicalize(&mut self) {
        if self.g.is_zero() {
            self.exps = [Rational::zero(), Rational::zero(), Rational::zero()];
            return;
        }
        let (a, b) = (self.g.min_deg(0), self.g.min_deg(1));
        if a > 0 || b > 0 {
            self.g = self.g.shift_down(a, b);
            self.exps[0] += rint(a as i64);
            self.exps[1] += rint(b as i64);
        }
        let sigma = self.chart.sigma();
        while self.g.max_deg(0) > 0 || self.g.max_deg(1) > 0 {
            match self.g.div_linear(sigma) {
                Some(q) => {
                    self.g = q;
                    self.exps[2] += Rational::one();
                }
                None => break,
            }
        }
    }

    pub fn scale(&self, c: &CycloNumber) -> Self {
        Self::new(self.chart, self.exps.clone(), self.g.scale(c))
    }

    pub fn neg(&self) -> Self {
        self.scale(&CycloNumber::from_int(-1, self.order()))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, RatError> {
        if self.chart != other.chart {
            return Err(RatError::ChartMismatch);
        }
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.chart, self.order()));
        }
        let exps = [&self.exps[0] + &other.exps[0], &self.exps[1] + &other.exps[1], &self.exps[2] + &other.exps[2]];
        Ok(Self::new(self.chart, exps, self.g.mul(&other.g)))
    }

    pub fn add(&self, other: &Self) -> Result<Self, RatError> {
        if self.chart != other.chart {
            return Err(RatError::ChartMismatch);
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.coset() != other.coset() {
            return Err(RatError::CosetMismatch);
        }
        let lo: Vec<Rational> = (0..3).map(|i| self.exps[i].clone().min(other.exps[i].clone())).collect();
        let lift = |f: &Self| -> Poly2 {
            let d: Vec<u32> = (0..3).map(|i| (&f.exps[i] - &lo[i]).to_integer().to_u32().unwrap()).collect();
            let o = f.order();
            let mono = Poly2::from_terms(o, [((d[0], d[1]), CycloNumber::one(o))]);
            f.g.mul(&mono).mul(&Poly2::linear(o, 1, self.chart.sigma()).pow(d[2]))
        };
        let g = lift(self).add(&lift(other));
        Ok(Self::new(self.chart, [lo[0].clone(), lo[1].clone(), lo[2].clone()], g))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, RatError> {
        self.add(&other.neg())
    }

    /// Inverse; only monomial-type elements are units.
    pub fn inv(&self) -> Result<Self, RatError> {
        if self.g.terms.len() != 1 || !self.g.terms.contains_key(&(0, 0)) {
            return Err(RatError::NotInvertible);
        }
        let c = self.g.terms[&(0, 0)].try_inv()?;
        let exps = [-&self.exps[0], -&self.exps[1], -&self.exps[2]];
        Ok(Self::monomial(self.chart, exps, c))
    }

    /// Rewrites in another chart.  Going to X21 uses (x1-x2)^s = e^(-i pi s) (x2-x1)^s.
    pub fn to_chart(&self, target: Chart) -> Result<Self, RatError> {
        if self.chart == target {
            return Ok(self.clone());
        }
        if self.chart != Chart::X12 && target != Chart::X12 {
            return self.to_chart(Chart::X12)?.to_chart(target);
        }
        let o = self.order();
        let [e1, e2, e3] = self.exps.clone();
        let y1 = Poly2::linear(o, 1, 0);
        let y2 = Poly2::linear(o, 0, 1);
        let (exps, g, phase) = match (self.chart, target) {
            (Chart::X12, Chart::X21) => ([e2, e1, e3.clone()], self.g.substitute(&y2, &y1), -e3),
            (Chart::X21, Chart::X12) => ([e2, e1, e3.clone()], self.g.substitute(&y2, &y1), e3),
            // x1 = y1 + y2, x2 = y1, x1 - x2 = y2
            (Chart::X12, Chart::X20) => ([e2, e3, e1], self.g.substitute(&Poly2::linear(o, 1, 1), &y1), Rational::zero()),
            // y1 = x2, y2 = x1 - x2, L = x1
            (Chart::X20, Chart::X12) => ([e3, e1, e2], self.g.substitute(&y2, &Poly2::linear(o, 1, -1)), Rational::zero()),
            _ => unreachable!(),
        };
        let ph = CycloNumber::phase_half_turns(&phase, o)?;
        Ok(Self::new(target, exps, g.scale(&ph)))
    }

    /// Expansion in nonnegative powers of y2 (over y1), variables (y1, y2).
    pub fn expand(&self, window: &Window) -> Result<FormalSeries, RatError> {
        let (v1, v2) = self.chart.vars();
        let o = self.order();
        let [e1, e2, e3] = &self.exps;
        let finite = e3.is_integer() && !e3.is_negative();
        let maxd1 = rint(self.g.max_deg(0) as i64);
        let maxd2 = rint(self.g.max_deg(1) as i64);
        let mut grid = ExponentGrid::integer(2);
        grid.0[0] = [frac01(&(e1 + e3))].into_iter().collect();
        grid.0[1] = [frac01(e2)].into_iter().collect();
        let support = Window(vec![
            Interval::new(if finite { Bound::Fin(e1.clone()) } else { Bound::NegInf }, Bound::Fin(e1 + e3 + &maxd1)),
            Interval::new(Bound::Fin(e2.clone()), if finite { Bound::Fin(e2 + e3 + &maxd2) } else { Bound::PosInf }),
        ]);
        let mut s = FormalSeries::new(&[v1, v2], o, grid, window.clone(), support);
        if self.is_zero() {
            return Ok(s);
        }
        let mmax = match &window.0[1].hi {
            Bound::Fin(h) => (h - e2).floor().to_integer().to_i64().unwrap(),
            _ if finite => e3.to_integer().to_i64().unwrap(),
            _ => return Err(SeriesError::Unbounded(v2.to_string()).into()),
        };
        let mmax = if finite { mmax.min(e3.to_integer().to_i64().unwrap()) } else { mmax };
        let sigma = rint(self.chart.sigma());
        for m in 0..=mmax.max(-1) {
            let mut b = binomial(e3, m as u64);
            if b.is_zero() {
                continue;
            }
            if m % 2 == 1 {
                b *= &sigma;
            }
            for (&(a, bb), c) in &self.g.terms {
                let ex = vec![e1 + e3 - rint(m) + rint(a as i64), e2 + rint(m) + rint(bb as i64)];
                s.add_term(ex, c.scale(&b));
            }
        }
        Ok(s)
    }

    pub fn to_text(&self) -> String {
        let (v1, v2) = self.chart.vars();
        let l = match self.chart {
            Chart::X12 => "(x1-x2)",
            Chart::X21 => "(x2-x1)",
            Chart::X20 => "(x2+x0)",
        };
        let mut parts = Vec::new();
        for (name, e) in [(v1, &self.exps[0]), (v2, &self.exps[1]), (l, &self.exps[2])] {
            if !e.is_zero() {
                parts.push(format!("{}^({})", name, fmt_rational(e)));
            }
        }
        parts.push(format!("[{}]", self.g.to_text(v1, v2)));
        parts.join(" * ")
    }
}

impl fmt::Display for LaurentRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub fn iota12(f: &LaurentRational, window: &Window) -> Result<FormalSeries, RatError> {
    f.to_chart(Chart::X12)?.expand(window)
}

/// Expansion in nonnegative powers of x1; variables (x1, x2).
pub fn iota21(f: &LaurentRational, window: &Window) -> Result<FormalSeries, RatError> {
    let w = Window(vec![window.0[1].clone(), window.0[0].clone()]);
    Ok(f.to_chart(Chart::X21)?.expand(&w)?.reorder(&["x1", "x2"])?)
}

/// Substitutes x1 = x2 + x0 and expands in nonnegative powers of x0; variables (x0, x2).
pub fn iota20(f: &LaurentRational, window: &Window) -> Result<FormalSeries, RatError> {
    let w = Window(vec![window.0[1].clone(), window.0[0].clone()]);
    Ok(f.to_chart(Chart::X20)?.expand(&w)?.reorder(&["x0", "x2"])?)
}

pub fn rat_equal(f: &LaurentRational, g: &LaurentRational) -> Result<bool, RatError> {
    let g = g.to_chart(f.chart)?;
    Ok(f.is_zero() && g.is_zero() || *f == g)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GBasisElement {
    pub label: String,
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
}

impl GBasisElement {
    pub fn function(&self, order: u32) -> LaurentRational {
        LaurentRational::gbasis_function(&self.a, &self.b, &self.c, order)
    }

    pub fn coset(&self) -> [Rational; 3] {
        [frac01(&(&self.a - &self.c)), frac01(&self.b), frac01(&self.c)]
    }
}

/// Writes f as coefficient times the basis element sharing its coset.
pub fn decompose_in_gbasis(f: &LaurentRational, basis: &[GBasisElement]) -> Result<BTreeMap<String, LaurentRational>, RatError> {
    let f = f.to_chart(Chart::X12)?;
    let mut out = BTreeMap::new();
    if f.is_zero() {
        return Ok(out);
    }
    let coset = f.coset();
    let hits: Vec<&GBasisElement> = basis.iter().filter(|b| b.coset() == coset).collect();
    match hits.as_slice() {
        [] => Err(RatError::NotInSpan(coset.iter().map(fmt_rational).collect::<Vec<_>>().join(", "))),
        [b] => {
            let coeff = f.mul(&b.function(f.order()).inv()?)?;
            out.insert(b.label.clone(), coeff);
            Ok(out)
        }
        [x, y, ..] => Err(RatError::AmbiguousBasis(x.label.clone(), y.label.clone())),
    }
}

/// Checks that labels and coset triples are distinct.
pub fn validate_gbasis(basis: &[GBasisElement]) -> Result<(), RatError> {
    for (i, x) in basis.iter().enumerate() {
        for y in &basis[i + 1..] {
            if x.coset() == y.coset() || x.label == y.label {
                return Err(RatError::AmbiguousBasis(x.label.clone(), y.label.clone()));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    fn w(lo1: i64, hi1: i64, lo2: i64, hi2: i64) -> Window {
        Window(vec![Interval::ints(lo1, hi1), Interval::ints(lo2, hi2)])
    }

    fn inv_diff(t: i64, order: u32) -> LaurentRational {
        LaurentRational::monomial(Chart::X12, [rint(0), rint(0), rint(-t)], CycloNumber::one(order))
    }

    #[test]
    fn iota12_examples() {
        let s = iota12(&inv_diff(1, 1), &w(-20, 20, -20, 20)).unwrap();
        for m in 0..=19 {
            assert!(s.extract_coefficient(&[rint(-1 - m), rint(m)]).unwrap().is_one());
        }
        let half = LaurentRational::monomial(Chart::X12, [rat(1, 2), rint(0), rint(-1)], CycloNumber::one(1));
        let s = iota12(&half, &Window(vec![Interval::full(), Interval::ints(-5, 5)])).unwrap();
        assert!(s.extract_coefficient(&[rat(-5, 2), rint(2)]).unwrap().is_one());
        assert_eq!(s.len(), 6);
    }

    #[test]
    fn iota21_second_power() {
        let s = iota21(&inv_diff(2, 1), &w(-10, 10, -10, 10)).unwrap();
        // (x1-x2)^-2 = (x2-x1)^-2 = sum (m+1) x1^m x2^(-2-m)
        for m in 0..=8 {
            assert_eq!(s.extract_coefficient(&[rint(m), rint(-2 - m)]).unwrap(), CycloNumber::from_int(m + 1, 1));
        }
    }

    #[test]
    fn iota20_examples() {
        // 1/x1 = 1/(x0+x2)
        let f = LaurentRational::monomial(Chart::X12, [rint(-1), rint(0), rint(0)], CycloNumber::one(1));
        let s = iota20(&f, &w(-10, 10, -10, 10)).unwrap();
        for m in 0..=9 {
            assert_eq!(s.extract_coefficient(&[rint(m), rint(-1 - m)]).unwrap(), CycloNumber::from_int(if m % 2 == 0 { 1 } else { -1 }, 1));
        }
        let x0 = LaurentRational::monomial(Chart::X12, [rint(0), rint(0), rint(3)], CycloNumber::one(1));
        let s = iota20(&x0, &w(-10, 10, -10, 10)).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s.extract_coefficient(&[rint(3), rint(0)]).unwrap().is_one());
    }

    #[test]
    fn equality_examples() {
        let o = 1;
        let p = Poly2::from_terms(o, [((2, 0), CycloNumber::one(o)), ((0, 2), CycloNumber::from_int(-1, o))]);
        let f = LaurentRational::new(Chart::X12, [rint(0), rint(0), rint(-1)], p);
        let g = LaurentRational::new(Chart::X12, [rint(0), rint(0), rint(0)], Poly2::linear(o, 1, 1));
        assert!(rat_equal(&f, &g).unwrap());
        let d1 = LaurentRational::new(Chart::X12, [rint(0), rint(0), rint(0)], Poly2::linear(o, 1, -1));
        let d2 = LaurentRational::monomial(Chart::X12, [rint(0), rint(0), rint(1)], CycloNumber::one(o));
        assert!(rat_equal(&d1, &d2).unwrap());
        let h = LaurentRational::monomial(Chart::X12, [rat(1, 2), rint(0), rint(0)], CycloNumber::one(o));
        assert!(f.add(&h).is_err());
        assert!(!rat_equal(&f, &h).unwrap());
    }

    #[test]
    fn decompose_examples() {
        let o = 6;
        let basis = vec![
            GBasisElement { label: "f".into(), a: rat(1, 3), b: rat(1, 3), c: rat(-1, 6) },
            GBasisElement { label: "g".into(), a: rint(0), b: rint(0), c: rint(0) },
        ];
        let fa = basis[0].function(o);
        let d = decompose_in_gbasis(&fa, &basis).unwrap();
        assert!(rat_equal(&d["f"], &LaurentRational::monomial(Chart::X12, [rint(0), rint(0), rint(0)], CycloNumber::one(o))).unwrap());
        let p = Poly2::from_terms(o, [((3, 1), CycloNumber::one(o)), ((0, 2), CycloNumber::from_int(5, o))]);
        let f = LaurentRational::new(Chart::X12, [rat(1, 2), rat(1, 3), rat(-1, 6)], p);
        let d = decompose_in_gbasis(&f, &basis).unwrap();
        let back = d["f"].mul(&fa).unwrap();
        assert!(rat_equal(&back, &f).unwrap());
        let stray = LaurentRational::monomial(Chart::X12, [rat(1, 4), rint(0), rint(0)], CycloNumber::one(4));
        assert!(matches!(decompose_in_gbasis(&stray, &basis), Err(RatError::NotInSpan(_))));
    }

    #[test]
    fn chart_round_trip() {
        let o = 8;
        let p = Poly2::from_terms(o, [((1, 1), CycloNumber::one(o)), ((0, 3), CycloNumber::from_int(2, o))]);
        let f = LaurentRational::new(Chart::X12, [rat(1, 4), rat(-3, 4), rat(1, 2)], p);
        for c in [Chart::X21, Chart::X20] {
            assert_eq!(f.to_chart(c).unwrap().to_chart(Chart::X12).unwrap(), f);
        }
    }
}
