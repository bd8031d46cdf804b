//! Desk-scale instance generators and single-scalar fault injection.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::algdata::{validate, AlgError, AlgebraInstance, ColorAlgebra, GradedSpace, ModeKey, OmegaSpec, OperatorTable, YRef};
use crate::exactnum::{frac01, fmt_rational, minimal_order, parse_rational, rat, rint, CycloNumber, NumError, Rational};
use crate::msdata::Matrix;
use crate::ratfun::{GBasisElement, LaurentRational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExampleError {
    #[error("bad parameters: {0}")]
    Params(String),
    #[error("fault address does not exist: {0}")]
    BadAddress(String),
    #[error("ambiguous basis for ({0}): two channels share a coset triple")]
    AmbiguousBasis(String),
    #[error(transparent)]
    Num(#[from] NumError),
    #[error(transparent)]
    Alg(#[from] AlgError),
}

/// Finite abelian group Z/n1 x ... x Z/nk with a weight per element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianSpec {
    pub factors: Vec<u32>,
    /// Weight of each element, in lexicographic element order.
    pub weights: Vec<Rational>,
    /// Overrides of the default lambda = 1, keyed by element indices.
    pub lambda: BTreeMap<(usize, usize), CycloNumber>,
    pub order: Option<u32>,
}

impl AbelianSpec {
    /// Z/n with q(g) = c * g^2 on representatives 0..n-1.
    pub fn cyclic_quadratic(n: u32, c: Rational) -> Self {
        let weights = (0..n as i64).map(|g| &c * rint(g * g)).collect();
        AbelianSpec { factors: vec![n], weights, lambda: BTreeMap::new(), order: None }
    }

    pub fn elements(&self) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for &n in &self.factors {
            out = out.into_iter().flat_map(|p| (0..n).map(move |x| {
                let mut q = p.clone();
                q.push(x);
                q
            })).collect();
        }
        out
    }

    fn name(g: &[u32]) -> String {
        g.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("x")
    }

    /// Parses `Z2`, `Z2xZ3` and a weight list `0,1/4` or a quadratic coefficient `1/4`.
    pub fn from_params(group: &str, q: &str) -> Result<Self, ExampleError> {
        let factors = group
            .split('x')
            .map(|f| f.trim().strip_prefix('Z').and_then(|n| n.parse::<u32>().ok()).filter(|&n| n >= 1))
            .collect::<Option<Vec<u32>>>()
            .ok_or_else(|| ExampleError::Params(format!("group `{}` (expected e.g. Z2 or Z2xZ3)", group)))?;
        let size: u32 = factors.iter().product();
        let bad = |e: NumError| ExampleError::Params(e.to_string());
        if q.contains(',') {
            let weights = q.split(',').map(|x| parse_rational(x.trim()).map_err(bad)).collect::<Result<Vec<_>, _>>()?;
            if weights.len() != size as usize {
                return Err(ExampleError::Params(format!("{} weights given for a group of order {}", weights.len(), size)));
            }
            return Ok(AbelianSpec { factors, weights, lambda: BTreeMap::new(), order: None });
        }
        let c = parse_rational(q.trim()).map_err(bad)?;
        let mut spec = AbelianSpec { factors, weights: vec![], lambda: BTreeMap::new(), order: None };
        spec.weights = spec.elements().iter().map(|g| g.iter().map(|&x| &c * rint(x as i64 * x as i64)).sum()).collect();
        Ok(spec)
    }
}

pub fn make_trivial_voa() -> AlgebraInstance {
    let o = 2;
    let y = YRef::new(0, 0, 0, 0);
    let mut tab = OperatorTable::empty(y);
    tab.entries.insert((rint(-1), 0, 0, 0, 0), vec![CycloNumber::one(o)]);
    AlgebraInstance {
        order: o,
        colors: ColorAlgebra { names: vec!["e".into()], identity: 0, fusion: [((0, 0, 0), 1)].into_iter().collect() },
        spaces: vec![GradedSpace { weight: rint(0), dims: vec![1] }],
        vacuum: vec![CycloNumber::one(o)],
        central_charge: CycloNumber::zero(o),
        omega: OmegaSpec::Zero,
        intertwiners: [((0, 0, 0), vec![tab])].into_iter().collect(),
        fmat: [((0, 0, 0, 0), Matrix::identity(1, o))].into_iter().collect(),
        omat: [((0, 0, 0), Matrix::identity(1, o))].into_iter().collect(),
        gbasis: [((0, 0, 0, 0), vec![GBasisElement { label: "f0_0".into(), a: rint(0), b: rint(0), c: rint(0) }])].into_iter().collect(),
    }
}

/// One basis element per (a5, a) channel pair of each quadruple.
pub fn canonical_gbasis(inst: &AlgebraInstance) -> Result<BTreeMap<(usize, usize, usize, usize), Vec<GBasisElement>>, ExampleError> {
    let mut out = BTreeMap::new();
    for (a1, a2, a3, a4) in inst.quadruples() {
        let mut v: Vec<GBasisElement> = Vec::new();
        let rows: Vec<usize> = dedup(inst.f_rows(a1, a2, a3, a4).iter().map(|r| r.0));
        let cols: Vec<usize> = dedup(inst.f_cols(a1, a2, a3, a4).iter().map(|c| c.0));
        for &a5 in &rows {
            for &a in &cols {
                let el = GBasisElement {
                    label: format!("f{}_{}", inst.name(a5), inst.name(a)),
                    a: frac01(&(inst.h(a4) - inst.h(a1) - inst.h(a5))),
                    b: frac01(&(inst.h(a5) - inst.h(a2) - inst.h(a3))),
                    c: frac01(&(inst.h(a) - inst.h(a1) - inst.h(a2))),
                };
                if v.iter().any(|x| x.coset() == el.coset()) {
                    return Err(ExampleError::AmbiguousBasis(format!("{} {} {} ; {}", inst.name(a1), inst.name(a2), inst.name(a3), inst.name(a4))));
                }
                v.push(el);
            }
        }
        out.insert((a1, a2, a3, a4), v);
    }
    Ok(out)
}

fn dedup(it: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut v: Vec<usize> = it.collect();
    v.dedup();
    v
}

pub fn make_abelian_monomial(spec: &AbelianSpec) -> Result<AlgebraInstance, ExampleError> {
    let els = spec.elements();
    let k = els.len();
    if spec.weights.len() != k {
        return Err(ExampleError::Params("one weight per group element required".into()));
    }
    let q = &spec.weights;
    if !q[0].is_integer() || q[0] != rint(0) {
        return Err(ExampleError::Params("q(0) must be 0".into()));
    }
    let add = |i: usize, j: usize| -> usize {
        let s: Vec<u32> = els[i].iter().zip(&els[j]).zip(&spec.factors).map(|((a, b), n)| (a + b) % n).collect();
        els.iter().position(|g| *g == s).unwrap()
    };
    let delta = |i: usize, j: usize| &q[add(i, j)] - &q[i] - &q[j];
    let mut extra: Vec<u32> = spec.lambda.values().map(|c| c.order()).collect();
    extra.extend(spec.order);
    let mut shifts = Vec::new();
    for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                shifts.push(&q[i] + &q[j] - &q[l]);
            }
        }
    }
    let order = match spec.order {
        Some(o) => o,
        None => minimal_order(shifts.iter(), &extra),
    };
    let lam = |i: usize, j: usize| -> Result<CycloNumber, ExampleError> {
        Ok(match spec.lambda.get(&(i, j)) {
            Some(c) => c.embed(order)?,
            None => CycloNumber::one(order),
        })
    };
    let mut fusion = BTreeMap::new();
    let mut inter = BTreeMap::new();
    let mut omat = BTreeMap::new();
    for i in 0..k {
        for j in 0..k {
            let s = add(i, j);
            fusion.insert((i, j, s), 1);
            let d = delta(i, j);
            let y = YRef::new(i, j, s, 0);
            let mut tab = OperatorTable::empty(y);
            tab.entries.insert((-&d - rint(1), 0, 0, 0, 0), vec![lam(i, j)?]);
            inter.insert((i, j, s), vec![tab]);
            let ph = CycloNumber::phase_half_turns(&-&d, order)?;
            omat.insert((i, j, s), Matrix::scalar(&ph * &lam(i, j)?.try_div(&lam(j, i)?)?));
        }
    }
    let mut fmat = BTreeMap::new();
    for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                let (ij, jl) = (add(i, j), add(j, l));
                let ijl = add(ij, l);
                let defect = &q[ijl] - &q[ij] - &q[add(i, l)] - &q[jl] + &q[i] + &q[j] + &q[l];
                let sign = CycloNumber::phase_half_turns(&defect, order)?;
                let cob = (&lam(i, jl)? * &lam(j, l)?).try_div(&(&lam(i, j)? * &lam(ij, l)?))?;
                fmat.insert((i, j, l, ijl), Matrix::scalar(&sign * &cob));
            }
        }
    }
    let all_zero = q.iter().all(|x| *x == rint(0));
    let mut inst = AlgebraInstance {
        order,
        colors: ColorAlgebra { names: els.iter().map(|g| AbelianSpec::name(g)).collect(), identity: 0, fusion },
        spaces: q.iter().map(|w| GradedSpace { weight: w.clone(), dims: vec![1] }).collect(),
        vacuum: vec![CycloNumber::one(order)],
        central_charge: CycloNumber::zero(order),
        omega: if all_zero { OmegaSpec::Zero } else { OmegaSpec::Unknown },
        intertwiners: inter,
        fmat,
        omat,
        gbasis: BTreeMap::new(),
    };
    inst.gbasis = canonical_gbasis(&inst)?;
    validate(&inst)?;
    Ok(inst)
}

/// The exponent of each monomial intertwiner, for invariant tests.
pub fn monomial_exponent(inst: &AlgebraInstance, y: YRef) -> Option<Rational> {
    let tab = inst.table(y);
    let ((n, ..), _) = tab.entries.iter().next()?;
    Some(-n - rint(1))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FaultOp {
    /// Multiply by zeta_N^k.
    Zeta(i64),
    Zero,
    Scale(Rational),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fault {
    F { key: (usize, usize, usize, usize), row: usize, col: usize, op: FaultOp },
    Omega { key: (usize, usize, usize), row: usize, col: usize, op: FaultOp },
    Mode { y: YRef, key: ModeKey, comp: usize, op: FaultOp },
    Vacuum { index: usize, op: FaultOp },
}

impl fmt::Display for FaultOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaultOp::Zeta(k) => write!(f, "*zeta^{}", k),
            FaultOp::Zero => write!(f, "=0"),
            FaultOp::Scale(q) => write!(f, "*{}", fmt_rational(q)),
        }
    }
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fault::F { key, row, col, op } => write!(f, "F{:?}[{},{}]{}", key, row, col, op),
            Fault::Omega { key, row, col, op } => write!(f, "Omega{:?}[{},{}]{}", key, row, col, op),
            Fault::Mode { y, key, comp, op } => write!(f, "Y({} {} -> {} #{}) mode {} at {}.{} {}.{} [{}]{}", y.a1, y.a2, y.a3, y.index, fmt_rational(&key.0), key.1, key.2, key.3, key.4, comp, op),
            Fault::Vacuum { index, op } => write!(f, "vacuum[{}]{}", index, op),
        }
    }
}

fn apply_op(c: &CycloNumber, op: &FaultOp, order: u32) -> CycloNumber {
    match op {
        FaultOp::Zeta(k) => c * &CycloNumber::zeta_pow(*k, order),
        FaultOp::Zero => CycloNumber::zero(order),
        FaultOp::Scale(q) => c.scale(q),
    }
}

pub fn inject_fault(inst: &AlgebraInstance, fault: &Fault) -> Result<AlgebraInstance, ExampleError> {
    let mut out = inst.clone();
    let o = inst.order;
    let bad = || ExampleError::BadAddress(fault.to_string());
    match fault {
        Fault::F { key, row, col, op } => {
            let m = out.fmat.get_mut(key).ok_or_else(bad)?;
            if *row >= m.rows() || *col >= m.cols() {
                return Err(bad());
            }
            let v = apply_op(m.get(*row, *col), op, o);
            m.set(*row, *col, v);
        }
        Fault::Omega { key, row, col, op } => {
            let m = out.omat.get_mut(key).ok_or_else(bad)?;
            if *row >= m.rows() || *col >= m.cols() {
                return Err(bad());
            }
            let v = apply_op(m.get(*row, *col), op, o);
            m.set(*row, *col, v);
        }
        Fault::Mode { y, key, comp, op } => {
            let tabs = out.intertwiners.get_mut(&(y.a1, y.a2, y.a3)).ok_or_else(bad)?;
            let tab = tabs.get_mut(y.index).ok_or_else(bad)?;
            let v = tab.entries.get_mut(key).ok_or_else(bad)?;
            let c = v.get_mut(*comp).ok_or_else(bad)?;
            *c = apply_op(c, op, o);
            tab.entries.retain(|_, v| v.iter().any(|x| !x.is_zero()));
        }
        Fault::Vacuum { index, op } => {
            let c = out.vacuum.get_mut(*index).ok_or_else(bad)?;
            *c = apply_op(c, op, o);
        }
    }
    Ok(out)
}

/// Single-scalar faults: every F and Omega entry times zeta, every mode scalar of
/// operators touching the identity color times zeta, every mode scalar zeroed, and
/// the vacuum doubled.
pub fn fault_corpus(inst: &AlgebraInstance) -> Vec<Fault> {
    let mut out = Vec::new();
    for (key, m) in &inst.fmat {
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                if !m.get(r, c).is_zero() {
                    out.push(Fault::F { key: *key, row: r, col: c, op: FaultOp::Zeta(1) });
                }
            }
        }
    }
    for (key, m) in &inst.omat {
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                if !m.get(r, c).is_zero() {
                    out.push(Fault::Omega { key: *key, row: r, col: c, op: FaultOp::Zeta(1) });
                }
            }
        }
    }
    let e = inst.e();
    for y in inst.yrefs() {
        for (key, v) in &inst.table(y).entries {
            for (comp, c) in v.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                if y.a1 == e || y.a2 == e {
                    out.push(Fault::Mode { y, key: key.clone(), comp, op: FaultOp::Zeta(1) });
                }
                out.push(Fault::Mode { y, key: key.clone(), comp, op: FaultOp::Zero });
            }
        }
    }
    for (i, c) in inst.vacuum.iter().enumerate() {
        if !c.is_zero() {
            out.push(Fault::Vacuum { index: i, op: FaultOp::Scale(rint(2)) });
        }
    }
    // small instances: rescale the same scalars until the corpus has MIN_FAULTS entries
    let sites: Vec<Fault> = out.clone();
    let scales = [rint(-1), rint(3), rat(1, 2), rat(-2, 3), rint(5), rat(1, 7)];
    'pad: for q in &scales {
        for f in &sites {
            if out.len() >= MIN_FAULTS {
                break 'pad;
            }
            let op = FaultOp::Scale(q.clone());
            out.push(match f.clone() {
                Fault::F { key, row, col, .. } => Fault::F { key, row, col, op },
                Fault::Omega { key, row, col, .. } => Fault::Omega { key, row, col, op },
                Fault::Mode { y, key, comp, .. } => Fault::Mode { y, key, comp, op },
                Fault::Vacuum { index, .. } => Fault::Vacuum { index, op },
            });
        }
    }
    out
}

pub const MIN_FAULTS: usize = 20;

/// Rational function x1^a x2^b (1-x2/x1)^c of a basis element, for reports.
pub fn basis_function(el: &GBasisElement, order: u32) -> LaurentRational {
    el.function(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algdata::{parse_instance, save_instance};
    use crate::exactnum::rat;

    #[test]
    fn trivial_round_trip() {
        let t = make_trivial_voa();
        validate(&t).unwrap();
        assert_eq!(parse_instance(&save_instance(&t)).unwrap(), t);
    }

    #[test]
    fn z2_monomial() {
        let inst = make_abelian_monomial(&AbelianSpec::cyclic_quadratic(2, rat(1, 4))).unwrap();
        assert_eq!(inst.order % 8, 0);
        assert_eq!(parse_instance(&save_instance(&inst)).unwrap(), inst);
        let y = YRef::new(1, 1, 0, 0);
        assert_eq!(monomial_exponent(&inst, y), Some(rat(-1, 2)));
        assert!(fault_corpus(&inst).len() >= 20);
    }

    #[test]
    fn trivial_group_is_trivial_voa() {
        let inst = make_abelian_monomial(&AbelianSpec::cyclic_quadratic(1, rint(0))).unwrap();
        let t = make_trivial_voa();
        assert_eq!(inst.spaces, t.spaces);
        assert_eq!(inst.intertwiners, t.intertwiners);
        assert_eq!(inst.omega, t.omega);
    }

    #[test]
    fn params() {
        let s = AbelianSpec::from_params("Z3", "1/3").unwrap();
        assert_eq!(s.weights, vec![rint(0), rat(1, 3), rat(4, 3)]);
        let s = AbelianSpec::from_params("Z2", "0,1/4").unwrap();
        assert_eq!(s.weights, vec![rint(0), rat(1, 4)]);
        assert!(AbelianSpec::from_params("Q2", "1").is_err());
        assert!(AbelianSpec::from_params("Z2", "0,1,2").is_err());
    }
}
