//! Exact rationals and elements of cyclotomic fields Q(zeta_N).

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumError {
    #[error("incompatible cyclotomic orders {0} and {1}")]
    IncompatibleOrder(u32, u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("phase e^(pi i * {0}) is not representable in Q(zeta_{1})")]
    OrderInsufficient(String, u32),
    #[error("parse error in `{text}`: {msg}")]
    Parse { text: String, msg: String },
}

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rint(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Fractional part in [0,1).
pub fn frac01(q: &Rational) -> Rational {
    q - q.floor()
}

pub fn is_integer(q: &Rational) -> bool {
    q.is_integer()
}

pub fn to_i64(q: &Rational) -> Option<i64> {
    if q.is_integer() {
        q.to_integer().to_i64()
    } else {
        None
    }
}

pub fn parse_rational(s: &str) -> Result<Rational, NumError> {
    let t = s.trim();
    let err = |msg: &str| NumError::Parse { text: s.to_string(), msg: msg.to_string() };
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| err("bad numerator"))?;
    let d: BigInt = den.parse().map_err(|_| err("bad denominator"))?;
    if d.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(BigRational::new(n, d))
}

pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// binom(r, m) for rational r.
pub fn binomial(r: &Rational, m: u64) -> Rational {
    let mut acc = Rational::one();
    for i in 0..m {
        acc = acc * (r - rint(i as i64)) / rint(i as i64 + 1);
    }
    acc
}

pub fn factorial(n: u64) -> Rational {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= i;
    }
    BigRational::from_integer(acc)
}

pub fn euler_phi(n: u32) -> usize {
    let mut result = n as u64;
    let mut m = n as u64;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result as usize
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    // both monic integer polys, low degree first
    let mut r = num.to_vec();
    let dl = den.len();
    let ql = r.len() + 1 - dl;
    let mut q = vec![0i64; ql];
    for k in (0..ql).rev() {
        let c = r[k + dl - 1];
        q[k] = c;
        for (j, d) in den.iter().enumerate() {
            r[k + j] -= c * d;
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0));
    q
}

fn compute_cyclotomic(n: u32) -> Vec<i64> {
    // x^n - 1 divided by Phi_d for every proper divisor d
    let mut p = vec![0i64; n as usize + 1];
    p[0] = -1;
    p[n as usize] = 1;
    for d in 1..n {
        if n % d == 0 {
            p = poly_div_exact(&p, &cyclotomic_poly(d));
        }
    }
    p
}

/// Coefficients of the n-th cyclotomic polynomial, low degree first.
pub fn cyclotomic_poly(n: u32) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    let p = Arc::new(compute_cyclotomic(n));
    cache.lock().unwrap().insert(n, p.clone());
    p
}

/// Element of Q(zeta_N) in the power basis 1, zeta, ..., zeta^(phi(N)-1).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CycloNumber {
    order: u32,
    coeffs: Vec<Rational>,
}

fn reduce(order: u32, mut v: Vec<Rational>) -> Vec<Rational> {
    let phi = cyclotomic_poly(order);
    let d = phi.len() - 1;
    if v.len() > d {
        for k in (d..v.len()).rev() {
            if v[k].is_zero() {
                continue;
            }
            let c = v[k].clone();
            for (j, pj) in phi.iter().enumerate() {
                if *pj != 0 {
                    let idx = k - d + j;
                    v[idx] = &v[idx] - &c * rint(*pj);
                }
            }
        }
    }
    v.resize(d, Rational::zero());
    v
}

impl CycloNumber {
    pub fn zero(order: u32) -> Self {
        CycloNumber { order, coeffs: vec![Rational::zero(); euler_phi(order)] }
    }

    pub fn one(order: u32) -> Self {
        Self::from_rational(Rational::one(), order)
    }

    pub fn from_rational(q: Rational, order: u32) -> Self {
        let mut c = Self::zero(order);
        c.coeffs[0] = q;
        c
    }

    pub fn from_int(n: i64, order: u32) -> Self {
        Self::from_rational(rint(n), order)
    }

    /// Builds from arbitrary-length power-basis coordinates, reducing mod Phi_N.
    pub fn from_powers(order: u32, v: Vec<Rational>) -> Self {
        CycloNumber { order, coeffs: reduce(order, v) }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// zeta_N^k of the ambient field Q(zeta_N).
    pub fn zeta_pow(k: i64, order: u32) -> Self {
        let j = k.rem_euclid(order as i64) as usize;
        let mut v = vec![Rational::zero(); j + 1];
        v[j] = Rational::one();
        Self::from_powers(order, v)
    }

    /// zeta_n^k embedded into Q(zeta_ambient); n must divide the ambient order.
    pub fn root_of_unity(k: i64, n: u32, ambient: u32) -> Result<Self, NumError> {
        if n == 0 || ambient % n != 0 {
            return Err(NumError::IncompatibleOrder(n, ambient));
        }
        Ok(Self::zeta_pow(k * (ambient / n) as i64, ambient))
    }

    /// e^(pi i q) in Q(zeta_N).
    pub fn phase_half_turns(q: &Rational, order: u32) -> Result<Self, NumError> {
        // e^(pi i n/d) = zeta_N^(n N / 2d); for odd N also -zeta_N^((n/d - 1) N / 2)
        let zpow = |q: &Rational| {
            let num = q.numer() * BigInt::from(order);
            let den = q.denom() * BigInt::from(2);
            num.is_multiple_of(&den).then(|| (num / den).mod_floor(&BigInt::from(order)).to_i64().unwrap())
        };
        if let Some(k) = zpow(q) {
            return Ok(Self::zeta_pow(k, order));
        }
        match zpow(&(q - Rational::one())) {
            Some(k) => Ok(Self::zeta_pow(k, order).neg()),
            None => Err(NumError::OrderInsufficient(fmt_rational(q), order)),
        }
    }

    pub fn phase_representable(q: &Rational, order: u32) -> bool {
        Self::phase_half_turns(q, order).is_ok()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// Some(q) if the number lies in the rational subfield.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    fn check(&self, other: &Self) -> Result<(), NumError> {
        if self.order != other.order {
            Err(NumError::IncompatibleOrder(self.order, other.order))
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, NumError> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(CycloNumber { order: self.order, coeffs })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, NumError> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(CycloNumber { order: self.order, coeffs })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, NumError> {
        self.check(other)?;
        let d = self.coeffs.len();
        if d == 1 {
            return Ok(CycloNumber { order: self.order, coeffs: vec![&self.coeffs[0] * &other.coeffs[0]] });
        }
        let mut v = vec![Rational::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    v[i + j] = &v[i + j] + a * b;
                }
            }
        }
        Ok(CycloNumber { order: self.order, coeffs: reduce(self.order, v) })
    }

    pub fn try_inv(&self) -> Result<Self, NumError> {
        if self.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        let d = self.coeffs.len();
        // columns: self * zeta^j; solve M y = e_0
        let mut cols = Vec::with_capacity(d);
        for j in 0..d {
            cols.push(self.try_mul(&Self::zeta_pow(j as i64, self.order))?.coeffs);
        }
        let mut m: Vec<Vec<Rational>> =
            (0..d).map(|i| (0..d).map(|j| cols[j][i].clone()).collect()).collect();
        let mut rhs: Vec<Rational> = (0..d).map(|i| if i == 0 { Rational::one() } else { Rational::zero() }).collect();
        for col in 0..d {
            let piv = (col..d).find(|&r| !m[r][col].is_zero()).ok_or(NumError::DivisionByZero)?;
            m.swap(col, piv);
            rhs.swap(col, piv);
            let inv = m[col][col].recip();
            for j in col..d {
                m[col][j] = &m[col][j] * &inv;
            }
            rhs[col] = &rhs[col] * &inv;
            for r in 0..d {
                if r != col && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    for j in col..d {
                        let t = &m[col][j] * &f;
                        m[r][j] = &m[r][j] - t;
                    }
                    let t = &rhs[col] * &f;
                    rhs[r] = &rhs[r] - t;
                }
            }
        }
        Ok(CycloNumber { order: self.order, coeffs: rhs })
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, NumError> {
        self.try_mul(&other.try_inv()?)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        CycloNumber { order: self.order, coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    pub fn neg(&self) -> Self {
        CycloNumber { order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut acc = Self::one(self.order);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Re-expresses the number in Q(zeta_M) for a multiple M of its order.
    pub fn embed(&self, ambient: u32) -> Result<Self, NumError> {
        if ambient % self.order != 0 {
            return Err(NumError::IncompatibleOrder(self.order, ambient));
        }
        let step = (ambient / self.order) as i64;
        let mut acc = Self::zero(ambient);
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc = &acc + &Self::zeta_pow(step * j as i64, ambient).scale(c);
            }
        }
        Ok(acc)
    }

    /// Canonical text form, parseable by [`CycloNumber::parse`].
    pub fn to_text(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let t = if j == 0 {
                fmt_rational(c)
            } else {
                let z = format!("z({},{})", j, self.order);
                if c.is_one() {
                    z
                } else if (-c).is_one() {
                    format!("-{}", z)
                } else {
                    format!("{}*{}", fmt_rational(c), z)
                }
            };
            parts.push(t);
        }
        if parts.is_empty() {
            return "0".to_string();
        }
        let mut out = parts[0].clone();
        for p in &parts[1..] {
            match p.strip_prefix('-') {
                Some(rest) => {
                    out.push_str(" - ");
                    out.push_str(rest);
                }
                None => {
                    out.push_str(" + ");
                    out.push_str(p);
                }
            }
        }
        out
    }

    pub fn parse(text: &str, order: u32) -> Result<Self, NumError> {
        let mut p = Parser { s: text.as_bytes(), pos: 0, text, order };
        let v = p.expr()?;
        p.ws();
        if p.pos != p.s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(v)
    }

    /// Largest order z(k,N) mentioned in a textual number, used to size the field before parsing.
    pub fn mentioned_orders(text: &str) -> Vec<u32> {
        let mut out = Vec::new();
        let b = text.as_bytes();
        let mut i = 0;
        while i + 1 < b.len() {
            if b[i] == b'z' && b[i + 1] == b'(' {
                if let Some(end) = text[i..].find(')') {
                    let inner = &text[i + 2..i + end];
                    if let Some((_, n)) = inner.split_once(',') {
                        if let Ok(n) = n.trim().parse::<u32>() {
                            out.push(n);
                        }
                    }
                    i += end;
                }
            }
            i += 1;
        }
        out
    }
}

impl fmt::Display for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    text: &'a str,
    order: u32,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> NumError {
        NumError::Parse { text: self.text.to_string(), msg: format!("{} at offset {}", msg, self.pos) }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<CycloNumber, NumError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.try_add(&self.term()?)?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.try_sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<CycloNumber, NumError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = acc.try_mul(&self.factor()?)?;
        }
        Ok(acc)
    }

    fn int(&mut self) -> Result<BigInt, NumError> {
        self.ws();
        let start = self.pos;
        if self.pos < self.s.len() && self.s[self.pos] == b'-' {
            self.pos += 1;
        }
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos]).unwrap().parse().map_err(|_| self.err("expected integer"))
    }

    fn factor(&mut self) -> Result<CycloNumber, NumError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.factor()?.neg())
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(b'z') => {
                self.pos += 1;
                if self.peek() != Some(b'(') {
                    return Err(self.err("expected `(` after z"));
                }
                self.pos += 1;
                let k = self.int()?;
                if self.peek() != Some(b',') {
                    return Err(self.err("expected `,`"));
                }
                self.pos += 1;
                let n = self.int()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                let n = n.to_u32().filter(|&n| n > 0).ok_or_else(|| self.err("bad root order"))?;
                let k = k.mod_floor(&BigInt::from(n)).to_i64().unwrap();
                CycloNumber::root_of_unity(k, n, self.order)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.int()?;
                let mut q = BigRational::from_integer(n);
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    let d = self.int()?;
                    if d.is_zero() {
                        return Err(self.err("zero denominator"));
                    }
                    q = q / BigRational::from_integer(d);
                }
                Ok(CycloNumber::from_rational(q, self.order))
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl std::ops::$tr<&CycloNumber> for &CycloNumber {
            type Output = CycloNumber;
            fn $m(self, rhs: &CycloNumber) -> CycloNumber {
                self.$f(rhs).expect("cyclotomic order mismatch")
            }
        }
    };
}
binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl std::ops::Neg for &CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        CycloNumber::neg(self)
    }
}

pub fn field_add(a: &CycloNumber, b: &CycloNumber) -> Result<CycloNumber, NumError> {
    a.try_add(b)
}
pub fn field_mul(a: &CycloNumber, b: &CycloNumber) -> Result<CycloNumber, NumError> {
    a.try_mul(b)
}
pub fn field_inv(a: &CycloNumber) -> Result<CycloNumber, NumError> {
    a.try_inv()
}
pub fn field_eq(a: &CycloNumber, b: &CycloNumber) -> Result<bool, NumError> {
    a.check(b)?;
    Ok(a.coeffs == b.coeffs)
}

/// Smallest N (even, so that -1 and e^(pi i q) embed) with 2*den(q) | N for every q given, and every extra order dividing N.
pub fn minimal_order<'a>(exponents: impl IntoIterator<Item = &'a Rational>, extra: &[u32]) -> u32 {
    let mut n: u64 = 2;
    for q in exponents {
        let d = q.denom().to_u64().unwrap_or(1) * 2;
        n = n.lcm(&d);
    }
    for &e in extra {
        n = n.lcm(&(e as u64));
    }
    n as u32
}

pub fn abs_rational(q: &Rational) -> Rational {
    q.abs()
}
