//! Independent expanders shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use std::collections::BTreeMap;

use ioacheck::exactnum::*;
use ioacheck::ratfun::*;
use ioacheck::series::*;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

/// Direct expander for x_d^{-1} delta((x_a + s x_b)/(eps x_d)) at x_d^ed x_a^ea x_b^eb.
pub fn delta_oracle(s: i64, eps: i64, ed: i64, ea: i64, eb: i64) -> Rational {
    let n = -ed - 1;
    let m = eb;
    if m < 0 || ea != n - m {
        return Rational::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 0..m {
        num *= BigInt::from(n - j);
        den *= BigInt::from(j + 1);
    }
    let sign = s.pow(m as u32) * if n.rem_euclid(2) == 1 { eps } else { 1 };
    Rational::new(num * BigInt::from(sign), den)
}

pub const O: u32 = 24;

#[derive(Clone, Debug)]
pub struct Raw {
    pub p: Rational,
    pub q: Rational,
    pub s: Rational,
    pub g: Vec<((u32, u32), i64)>,
}

impl Raw {
    pub fn build(&self) -> LaurentRational {
        let g = Poly2::from_terms(O, self.g.iter().map(|&(e, c)| (e, CycloNumber::from_int(c, O))));
        LaurentRational::new(Chart::X12, [self.p.clone(), self.q.clone(), self.s.clone()], g)
    }
}

pub fn exponent() -> impl Strategy<Value = Rational> {
    (-4i64..=4, prop::sample::select(vec![1i64, 2, 3, 4])).prop_map(|(n, d)| rat(n, d))
}

pub fn raw() -> impl Strategy<Value = Raw> {
    let core = prop::collection::vec(((0u32..=6, 0u32..=6), -4i64..=4), 1..5)
        .prop_map(|v| v.into_iter().filter(|((a, b), c)| a + b <= 6 && *c != 0).collect::<Vec<_>>())
        .prop_filter("nonzero core", |v| !v.is_empty());
    (exponent(), exponent(), exponent(), core).prop_map(|(p, q, s, g)| Raw { p, q, s, g })
}

pub fn add(map: &mut BTreeMap<Vec<Rational>, CycloNumber>, e: Vec<Rational>, c: CycloNumber) {
    let slot = map.entry(e).or_insert_with(|| CycloNumber::zero(O));
    *slot = field_add(slot, &c).unwrap();
}

pub fn is_int(q: &Rational) -> bool {
    q.is_integer()
}

// Oracles: expand each core term times the binomial series of the prefactor power,
// keeping points inside the window.  Variables (x1, x2) for 12/21, (x0, x2) for 20.
pub fn oracle12(f: &Raw, w: &Window) -> BTreeMap<Vec<Rational>, CycloNumber> {
    let mut out = BTreeMap::new();
    let hi = w.0[1].hi.finite().unwrap().clone();
    for &((a, b), c) in &f.g {
        let mut m = 0;
        while &f.q + rint(b as i64) + rint(m) <= hi {
            let e = vec![&f.p + &f.s + rint(a as i64 - m), &f.q + rint(b as i64 + m)];
            let sign = if m % 2 == 0 { 1 } else { -1 };
            if w.contains(&e) {
                add(&mut out, e, CycloNumber::from_rational(binomial(&f.s, m as u64) * rint(c * sign), O));
            }
            m += 1;
        }
    }
    out
}

pub fn oracle21(f: &Raw, w: &Window) -> BTreeMap<Vec<Rational>, CycloNumber> {
    let mut out = BTreeMap::new();
    let hi = w.0[0].hi.finite().unwrap().clone();
    let ph = CycloNumber::phase_half_turns(&-&f.s, O).unwrap();
    for &((a, b), c) in &f.g {
        let mut m = 0;
        while &f.p + rint(a as i64) + rint(m) <= hi {
            let e = vec![&f.p + rint(a as i64 + m), &f.q + &f.s + rint(b as i64 - m)];
            let sign = if m % 2 == 0 { 1 } else { -1 };
            if w.contains(&e) {
                add(&mut out, e, ph.scale(&(binomial(&f.s, m as u64) * rint(c * sign))));
            }
            m += 1;
        }
    }
    out
}

pub fn oracle20(f: &Raw, w: &Window) -> BTreeMap<Vec<Rational>, CycloNumber> {
    let mut out = BTreeMap::new();
    let hi = w.0[0].hi.finite().unwrap().clone();
    for &((a, b), c) in &f.g {
        let pa = &f.p + rint(a as i64);
        let mut m = 0;
        while &f.s + rint(m) <= hi {
            let e = vec![&f.s + rint(m), &pa - rint(m) + &f.q + rint(b as i64)];
            if w.contains(&e) {
                add(&mut out, e, CycloNumber::from_rational(binomial(&pa, m as u64) * rint(c), O));
            }
            m += 1;
        }
    }
    out
}

pub fn same(s: &FormalSeries, oracle: &BTreeMap<Vec<Rational>, CycloNumber>) -> Result<(), String> {
    for (e, c) in oracle {
        let got = s.extract_coefficient(e).map_err(|x| x.to_string())?;
        if &got != c {
            return Err(format!("at {:?}: got {} want {}", e, got, c));
        }
    }
    for (e, c) in s.terms() {
        if !oracle.contains_key(e) && !c.is_zero() {
            return Err(format!("stray term at {:?}", e));
        }
    }
    Ok(())
}


/// Coefficient of x1^e1 x2^e2 in (1/(t-1)!) d^{t-1}/dx2^{t-1} x1^{-1} delta(x2/x1).
pub fn delta_derivative(t: i64, e1: i64, e2: i64) -> Rational {
    if e1 + e2 != -t {
        return Rational::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 0..t - 1 {
        num *= BigInt::from(e2 + t - 1 - j);
        den *= BigInt::from(j + 1);
    }
    Rational::new(num, den)
}
