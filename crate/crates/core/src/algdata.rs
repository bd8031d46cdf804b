//! Truncated algebra instances: colors, fusion rules, graded spaces, operator
//! tables, fusing/skew-symmetry blocks. Text format parser, writer and validator.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::exactnum::{frac01, fmt_rational, minimal_order, parse_rational, rint, CycloNumber, NumError, Rational};
use crate::msdata::Matrix;
use crate::ratfun::{validate_gbasis, GBasisElement};
use crate::series::{Bound, ExponentGrid, FormalSeries, Interval, Window};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{location}: {msg}")]
    Invalid { location: String, msg: String },
    #[error("window exceeds certified range: {0}")]
    Uncertified(String),
    #[error("io error: {0}")]
    Io(String),
    #[error(transparent)]
    Num(#[from] NumError),
}

fn invalid(location: impl Into<String>, msg: impl Into<String>) -> AlgError {
    AlgError::Invalid { location: location.into(), msg: msg.into() }
}

fn perr(line: usize, msg: impl Into<String>) -> AlgError {
    AlgError::Parse { line, msg: msg.into() }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorAlgebra {
    pub names: Vec<String>,
    pub identity: usize,
    pub fusion: BTreeMap<(usize, usize, usize), u32>,
}

impl ColorAlgebra {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn n(&self, a: usize, b: usize, c: usize) -> u32 {
        self.fusion.get(&(a, b, c)).copied().unwrap_or(0)
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Symmetry, associativity and identity-column checks.
    pub fn validate(&self) -> Result<(), AlgError> {
        let k = self.len();
        let nm = |a: usize| self.names[a].as_str();
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    if self.n(a, b, c) != self.n(b, a, c) {
                        return Err(invalid("[fusion]", format!("asymmetric: N({} {} -> {}) != N({} {} -> {})", nm(a), nm(b), nm(c), nm(b), nm(a), nm(c))));
                    }
                }
            }
        }
        let e = self.identity;
        for a in 0..k {
            for b in 0..k {
                let want = u32::from(a == b);
                if self.n(e, a, b) != want {
                    return Err(invalid("[fusion]", format!("identity column: N({} {} -> {}) must be {}", nm(e), nm(a), nm(b), want)));
                }
            }
        }
        for a1 in 0..k {
            for a2 in 0..k {
                for a3 in 0..k {
                    for a4 in 0..k {
                        let l: u32 = (0..k).map(|a| self.n(a1, a2, a) * self.n(a, a3, a4)).sum();
                        let r: u32 = (0..k).map(|a| self.n(a1, a, a4) * self.n(a2, a3, a)).sum();
                        if l != r {
                            return Err(invalid("[fusion]", format!("associativity fails for ({} {} {} ; {})", nm(a1), nm(a2), nm(a3), nm(a4))));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSpace {
    pub weight: Rational,
    /// dims[l] = dim of the weight h+l subspace; truncation level is dims.len()-1.
    pub dims: Vec<usize>,
}

impl GradedSpace {
    pub fn truncation(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn dim(&self, level: usize) -> usize {
        self.dims.get(level).copied().unwrap_or(0)
    }

    pub fn offset(&self, level: usize) -> usize {
        self.dims[..level.min(self.dims.len())].iter().sum()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().sum()
    }

    /// (level, index) of a flat basis position.
    pub fn level_of(&self, flat: usize) -> (usize, usize) {
        let mut f = flat;
        for (l, &d) in self.dims.iter().enumerate() {
            if f < d {
                return (l, f);
            }
            f -= d;
        }
        panic!("flat index out of range")
    }

    pub fn basis(&self) -> Vec<(usize, usize)> {
        (0..self.total()).map(|f| self.level_of(f)).collect()
    }
}

/// (mode n, level of w1, index, level of w2, index)
pub type ModeKey = (Rational, usize, usize, usize, usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct YRef {
    pub a1: usize,
    pub a2: usize,
    pub a3: usize,
    pub index: usize,
}

impl YRef {
    pub fn new(a1: usize, a2: usize, a3: usize, index: usize) -> Self {
        YRef { a1, a2, a3, index }
    }
}

/// Mode table of one intertwiner basis element; values are output vectors at the
/// level fixed by the grading rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorTable {
    pub yref: YRef,
    pub entries: BTreeMap<ModeKey, Vec<CycloNumber>>,
}

impl OperatorTable {
    pub fn empty(yref: YRef) -> Self {
        OperatorTable { yref, entries: BTreeMap::new() }
    }

    pub fn scale(&self, c: &CycloNumber) -> OperatorTable {
        let mut out = self.clone();
        for v in out.entries.values_mut() {
            for x in v.iter_mut() {
                *x = &*x * c;
            }
        }
        out.entries.retain(|_, v| v.iter().any(|x| !x.is_zero()));
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraInstance {
    pub order: u32,
    pub colors: ColorAlgebra,
    pub spaces: Vec<GradedSpace>,
    pub vacuum: Vec<CycloNumber>,
    pub central_charge: CycloNumber,
    pub omega: OmegaSpec,
    pub intertwiners: BTreeMap<(usize, usize, usize), Vec<OperatorTable>>,
    pub fmat: BTreeMap<(usize, usize, usize, usize), Matrix>,
    pub omat: BTreeMap<(usize, usize, usize), Matrix>,
    pub gbasis: BTreeMap<(usize, usize, usize, usize), Vec<GBasisElement>>,
}

/// The Virasoro element: unknown, exactly zero, or a level-2 vector of the identity color.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OmegaSpec {
    Unknown,
    Zero,
    Vector(Vec<CycloNumber>),
}

/// A vector of some W^a, flat over all kept levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vector {
    pub color: usize,
    pub comps: Vec<CycloNumber>,
}

/// Dual basis element of W^a at (level, index).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DualVector {
    pub color: usize,
    pub level: usize,
    pub index: usize,
}

/// Series valued in W^a: one scalar series per flat basis index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VSeries {
    pub color: usize,
    pub comps: Vec<FormalSeries>,
}

impl AlgebraInstance {
    pub fn ncolors(&self) -> usize {
        self.colors.len()
    }

    pub fn e(&self) -> usize {
        self.colors.identity
    }

    pub fn h(&self, a: usize) -> &Rational {
        &self.spaces[a].weight
    }

    pub fn n(&self, a: usize, b: usize, c: usize) -> u32 {
        self.colors.n(a, b, c)
    }

    pub fn name(&self, a: usize) -> &str {
        &self.colors.names[a]
    }

    /// h1 + h2 - h3: the mode coset of intertwiners of this type.
    pub fn mode_shift(&self, a1: usize, a2: usize, a3: usize) -> Rational {
        self.h(a1) + self.h(a2) - self.h(a3)
    }

    pub fn table(&self, y: YRef) -> &OperatorTable {
        &self.intertwiners[&(y.a1, y.a2, y.a3)][y.index]
    }

    pub fn yrefs(&self) -> Vec<YRef> {
        self.intertwiners.iter().flat_map(|(&(a1, a2, a3), v)| (0..v.len()).map(move |i| YRef::new(a1, a2, a3, i))).collect()
    }

    pub fn voa_y(&self) -> YRef {
        let e = self.e();
        YRef::new(e, e, e, 0)
    }

    pub fn basis_vector(&self, color: usize, level: usize, index: usize) -> Vector {
        let sp = &self.spaces[color];
        let mut comps = vec![CycloNumber::zero(self.order); sp.total()];
        comps[sp.offset(level) + index] = CycloNumber::one(self.order);
        Vector { color, comps }
    }

    pub fn vacuum_vector(&self) -> Vector {
        let e = self.e();
        let mut comps = vec![CycloNumber::zero(self.order); self.spaces[e].total()];
        for (i, c) in self.vacuum.iter().enumerate() {
            comps[i] = c.clone();
        }
        Vector { color: e, comps }
    }

    /// Output level of mode n on inputs at levels (l1, l2), if integral.
    pub fn output_level(&self, y: YRef, n: &Rational, l1: usize, l2: usize) -> Option<i64> {
        let l = self.mode_shift(y.a1, y.a2, y.a3) + rint(l1 as i64 + l2 as i64) - n - rint(1);
        if l.is_integer() {
            l.to_integer().to_i64()
        } else {
            None
        }
    }

    /// Mode n applied to basis vectors; None when the output level lies above truncation.
    pub fn apply_basis(&self, tab: &OperatorTable, n: &Rational, l1: usize, i1: usize, l2: usize, i2: usize) -> Option<Vec<CycloNumber>> {
        let y = tab.yref;
        let sp3 = &self.spaces[y.a3];
        let mut out = vec![CycloNumber::zero(self.order); sp3.total()];
        match self.output_level(y, n, l1, l2) {
            None => Some(out),
            Some(l3) if l3 < 0 => Some(out),
            Some(l3) if l3 as usize > sp3.truncation() => None,
            Some(l3) => {
                if let Some(v) = tab.entries.get(&(n.clone(), l1, i1, l2, i2)) {
                    let off = sp3.offset(l3 as usize);
                    for (k, c) in v.iter().enumerate() {
                        out[off + k] = c.clone();
                    }
                }
                Some(out)
            }
        }
    }

    /// Mode n applied to arbitrary vectors.
    pub fn apply_mode(&self, tab: &OperatorTable, n: &Rational, w1: &Vector, w2: &Vector) -> Option<Vec<CycloNumber>> {
        let y = tab.yref;
        let (s1, s2) = (&self.spaces[y.a1], &self.spaces[y.a2]);
        let mut out = vec![CycloNumber::zero(self.order); self.spaces[y.a3].total()];
        for (f1, c1) in w1.comps.iter().enumerate() {
            if c1.is_zero() {
                continue;
            }
            let (l1, i1) = s1.level_of(f1);
            for (f2, c2) in w2.comps.iter().enumerate() {
                if c2.is_zero() {
                    continue;
                }
                let (l2, i2) = s2.level_of(f2);
                let v = self.apply_basis(tab, n, l1, i1, l2, i2)?;
                let c = c1 * c2;
                for (k, x) in v.iter().enumerate() {
                    if !x.is_zero() {
                        out[k] = &out[k] + &(x * &c);
                    }
                }
            }
        }
        Some(out)
    }

    /// Certified modes for inputs at levels (l1, l2): output levels 0..=L3.
    pub fn certified_modes(&self, y: YRef, l1: usize, l2: usize) -> Vec<Rational> {
        let sh = self.mode_shift(y.a1, y.a2, y.a3) + rint(l1 as i64 + l2 as i64) - rint(1);
        (0..=self.spaces[y.a3].truncation()).map(|l3| &sh - rint(l3 as i64)).collect()
    }

    /// Rows (a5, i, j) of the fusing block (a1 a2 a3 ; a4): i indexes V_{a1 a5}^{a4}, j indexes V_{a2 a3}^{a5}.
    pub fn f_rows(&self, a1: usize, a2: usize, a3: usize, a4: usize) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for a5 in 0..self.ncolors() {
            for i in 0..self.n(a1, a5, a4) as usize {
                for j in 0..self.n(a2, a3, a5) as usize {
                    out.push((a5, i, j));
                }
            }
        }
        out
    }

    /// Columns (a, k, l): k indexes V_{a1 a2}^{a}, l indexes V_{a a3}^{a4}.
    pub fn f_cols(&self, a1: usize, a2: usize, a3: usize, a4: usize) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.ncolors() {
            for k in 0..self.n(a1, a2, a) as usize {
                for l in 0..self.n(a, a3, a4) as usize {
                    out.push((a, k, l));
                }
            }
        }
        out
    }

    pub fn quadruples(&self) -> Vec<(usize, usize, usize, usize)> {
        let k = self.ncolors();
        let mut out = Vec::new();
        for a1 in 0..k {
            for a2 in 0..k {
                for a3 in 0..k {
                    for a4 in 0..k {
                        if !self.f_rows(a1, a2, a3, a4).is_empty() || !self.f_cols(a1, a2, a3, a4).is_empty() {
                            out.push((a1, a2, a3, a4));
                        }
                    }
                }
            }
        }
        out
    }

    pub fn fusion_triples(&self) -> Vec<(usize, usize, usize)> {
        self.colors.fusion.iter().filter(|(_, &n)| n > 0).map(|(&k, _)| k).collect()
    }
}

/// The set {h_{a1} + h_{a2} - h : h in H} mod 1.
pub fn exponent_cosets(inst: &AlgebraInstance, a1: usize, a2: usize) -> BTreeSet<Rational> {
    (0..inst.ncolors()).map(|a| frac01(&(inst.h(a1) + inst.h(a2) - inst.h(a)))).collect()
}

/// sum_n Y_n(w1) w2 x^(-n-1), one scalar series per basis component of W^{a3}.
pub fn intertwiner_apply(inst: &AlgebraInstance, y: YRef, w1: &Vector, w2: &Vector, window: &Interval) -> Result<VSeries, AlgError> {
    let tab = inst.table(y);
    let (s1, s2, s3) = (&inst.spaces[y.a1], &inst.spaces[y.a2], &inst.spaces[y.a3]);
    if w1.color != y.a1 || w2.color != y.a2 {
        return Err(invalid("intertwiner_apply", "input colors do not match the operator type"));
    }
    // exponent -n-1 = h3 + l3 - wt1 - wt2; certified while l3 <= L3
    let base = inst.h(y.a3) - inst.h(y.a1) - inst.h(y.a2);
    let mut maxl = 0usize;
    for (f1, c1) in w1.comps.iter().enumerate() {
        for (f2, c2) in w2.comps.iter().enumerate() {
            if !c1.is_zero() && !c2.is_zero() {
                maxl = maxl.max(s1.level_of(f1).0 + s2.level_of(f2).0);
            }
        }
    }
    let cert_hi = &base + rint(s3.truncation() as i64) - rint(maxl as i64);
    if let Bound::Fin(h) = &window.hi {
        if h > &cert_hi {
            return Err(AlgError::Uncertified(format!("x^{} above x^{}", fmt_rational(h), fmt_rational(&cert_hi))));
        }
    } else {
        return Err(AlgError::Uncertified("unbounded window".into()));
    }
    let mut grid = ExponentGrid::integer(1);
    grid.0[0] = [frac01(&base)].into_iter().collect();
    let supp = Window(vec![Interval::new(Bound::Fin(&base - rint(maxl as i64)), Bound::PosInf)]);
    let blank = FormalSeries::new(&["x"], inst.order, grid, Window(vec![window.clone()]), supp);
    let mut comps = vec![blank; s3.total()];
    for (f1, c1) in w1.comps.iter().enumerate() {
        if c1.is_zero() {
            continue;
        }
        let (l1, i1) = s1.level_of(f1);
        for (f2, c2) in w2.comps.iter().enumerate() {
            if c2.is_zero() {
                continue;
            }
            let (l2, i2) = s2.level_of(f2);
            for n in inst.certified_modes(y, l1, l2) {
                let ex = -&n - rint(1);
                if !window.contains(&ex) {
                    continue;
                }
                let v = inst.apply_basis(tab, &n, l1, i1, l2, i2).expect("certified mode");
                let c = c1 * c2;
                for (k, x) in v.iter().enumerate() {
                    if !x.is_zero() {
                        comps[k].add_term(vec![ex.clone()], x * &c);
                    }
                }
            }
        }
    }
    Ok(VSeries { color: y.a3, comps })
}

/// <w', s>: the scalar component of s along the dual basis vector.
pub fn dual_pair(inst: &AlgebraInstance, w: &DualVector, s: &VSeries) -> FormalSeries {
    let template = &s.comps[0];
    if w.color != s.color || w.level > inst.spaces[w.color].truncation() {
        let vars: Vec<&str> = template.vars().iter().map(|v| v.as_str()).collect();
        return FormalSeries::zero(&vars, inst.order, template.window().clone());
    }
    s.comps[inst.spaces[w.color].offset(w.level) + w.index].clone()
}

fn parse_error_num(line: usize, e: NumError) -> AlgError {
    perr(line, e.to_string())
}

struct Section {
    header: String,
    line: usize,
    body: Vec<(usize, String)>,
}

fn split_sections(text: &str) -> Result<Vec<Section>, AlgError> {
    let mut out: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        if let Some(h) = t.strip_prefix('[') {
            let h = h.strip_suffix(']').ok_or_else(|| perr(ln, "unterminated section header"))?;
            out.push(Section { header: h.trim().to_string(), line: ln, body: Vec::new() });
        } else {
            let s = out.last_mut().ok_or_else(|| perr(ln, "content before first section"))?;
            s.body.push((ln, t.to_string()));
        }
    }
    Ok(out)
}

fn key_value(ln: usize, t: &str) -> Result<(String, String), AlgError> {
    let (k, v) = t.split_once('=').ok_or_else(|| perr(ln, "expected `key = value`"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

fn parse_usize(ln: usize, s: &str) -> Result<usize, AlgError> {
    s.trim().parse::<usize>().map_err(|_| perr(ln, format!("expected a natural number, got `{}`", s.trim())))
}

fn parse_level_index(ln: usize, s: &str) -> Result<(usize, usize), AlgError> {
    let (l, i) = s.split_once('.').ok_or_else(|| perr(ln, format!("expected level.index, got `{}`", s)))?;
    Ok((parse_usize(ln, l)?, parse_usize(ln, i)?))
}

pub fn load_instance(path: &Path) -> Result<AlgebraInstance, AlgError> {
    let text = std::fs::read_to_string(path).map_err(|e| AlgError::Io(format!("{}: {}", path.display(), e)))?;
    parse_instance(&text)
}

pub fn parse_instance(text: &str) -> Result<AlgebraInstance, AlgError> {
    let sections = split_sections(text)?;
    const KNOWN: [&str; 10] = ["colors", "fusion", "weights", "dims", "vacuum", "virasoro", "intertwiner", "F", "Omega", "gbasis"];
    if let Some(sec) = sections.iter().find(|s| !KNOWN.contains(&s.header.split_whitespace().next().unwrap_or(""))) {
        return Err(perr(sec.line, format!("unknown section [{}]", sec.header)));
    }
    let find = |name: &str| sections.iter().find(|s| s.header == name);
    let need = |name: &str| find(name).ok_or_else(|| perr(sections.last().map(|s| s.line).unwrap_or(0) + 1, format!("missing section [{}]", name)));

    // colors
    let sec = need("colors")?;
    let mut names: Option<Vec<String>> = None;
    let mut ident: Option<(usize, String)> = None;
    let mut declared_order: Option<(usize, u32)> = None;
    for (ln, t) in &sec.body {
        let (k, v) = key_value(*ln, t)?;
        match k.as_str() {
            "names" => names = Some(v.split_whitespace().map(|s| s.to_string()).collect()),
            "identity" => ident = Some((*ln, v)),
            "order" => declared_order = Some((*ln, v.parse().map_err(|_| perr(*ln, "bad order"))?)),
            _ => return Err(perr(*ln, format!("unknown key `{}`", k))),
        }
    }
    let names = names.ok_or_else(|| perr(sec.line, "[colors] needs `names`"))?;
    if names.is_empty() {
        return Err(perr(sec.line, "empty color list"));
    }
    let uniq: BTreeSet<&String> = names.iter().collect();
    if uniq.len() != names.len() {
        return Err(perr(sec.line, "duplicate color names"));
    }
    let (iln, iname) = ident.ok_or_else(|| perr(sec.line, "[colors] needs `identity`"))?;
    let identity = names.iter().position(|n| *n == iname).ok_or_else(|| perr(iln, format!("unknown color `{}`", iname)))?;
    let color = |ln: usize, s: &str| names.iter().position(|n| n == s).ok_or_else(|| perr(ln, format!("unknown color `{}`", s)));

    // fusion
    let mut fusion = BTreeMap::new();
    if let Some(sec) = find("fusion") {
        for (ln, t) in &sec.body {
            let (lhs, v) = key_value(*ln, t)?;
            let (ab, c) = lhs.split_once("->").ok_or_else(|| perr(*ln, "expected `a b -> c = n`"))?;
            let ab: Vec<&str> = ab.split_whitespace().collect();
            if ab.len() != 2 {
                return Err(perr(*ln, "expected two colors before `->`"));
            }
            let key = (color(*ln, ab[0])?, color(*ln, ab[1])?, color(*ln, c.trim())?);
            let n: u32 = v.parse().map_err(|_| perr(*ln, "fusion rule must be a natural number"))?;
            if fusion.insert(key, n).is_some() {
                return Err(perr(*ln, "duplicate fusion rule"));
            }
        }
    }
    fusion.retain(|_, n| *n > 0);
    let colors = ColorAlgebra { names: names.clone(), identity, fusion };

    // weights, dims
    let mut weights: Vec<Option<Rational>> = vec![None; names.len()];
    for (ln, t) in &need("weights")?.body {
        let (k, v) = key_value(*ln, t)?;
        weights[color(*ln, &k)?] = Some(parse_rational(&v).map_err(|e| parse_error_num(*ln, e))?);
    }
    let mut dims: Vec<Option<Vec<usize>>> = vec![None; names.len()];
    for (ln, t) in &need("dims")?.body {
        let (k, v) = key_value(*ln, t)?;
        let d = v.split_whitespace().map(|s| parse_usize(*ln, s)).collect::<Result<Vec<_>, _>>()?;
        if d.is_empty() {
            return Err(perr(*ln, "need at least one level"));
        }
        dims[color(*ln, &k)?] = Some(d);
    }
    let mut spaces = Vec::new();
    for (a, n) in names.iter().enumerate() {
        let w = weights[a].clone().ok_or_else(|| invalid("[weights]", format!("missing weight of `{}`", n)))?;
        let d = dims[a].clone().ok_or_else(|| invalid("[dims]", format!("missing dims of `{}`", n)))?;
        spaces.push(GradedSpace { weight: w, dims: d });
    }

    // field order
    let mut shifts = Vec::new();
    for a in 0..names.len() {
        for b in 0..names.len() {
            for c in 0..names.len() {
                shifts.push(&spaces[a].weight + &spaces[b].weight - &spaces[c].weight);
            }
        }
    }
    let needed = minimal_order(shifts.iter(), &CycloNumber::mentioned_orders(text));
    let order = match declared_order {
        Some((ln, o)) => {
            if o == 0 || o % needed != 0 {
                return Err(invalid(format!("line {}", ln), format!("cyclotomic order {} insufficient; need a multiple of {}", o, needed)));
            }
            o
        }
        None => needed,
    };
    let num = |ln: usize, s: &str| CycloNumber::parse(s.trim(), order).map_err(|e| parse_error_num(ln, e));
    let vec_of = |ln: usize, s: &str| s.split(';').map(|x| num(ln, x)).collect::<Result<Vec<_>, _>>();

    // vacuum and virasoro
    let mut vacuum = None;
    for (ln, t) in &need("vacuum")?.body {
        let (k, v) = key_value(*ln, t)?;
        if k != "vector" {
            return Err(perr(*ln, format!("unknown key `{}`", k)));
        }
        vacuum = Some(vec_of(*ln, &v)?);
    }
    let vacuum = vacuum.ok_or_else(|| invalid("[vacuum]", "missing `vector`"))?;
    let mut central_charge = CycloNumber::zero(order);
    let mut omega = OmegaSpec::Unknown;
    let mut omega_seen = false;
    if let Some(sec) = find("virasoro") {
        for (ln, t) in &sec.body {
            let (k, v) = key_value(*ln, t)?;
            match k.as_str() {
                "c" => central_charge = num(*ln, &v)?,
                "omega" => {
                    omega_seen = true;
                    omega = match v.as_str() {
                        "none" => OmegaSpec::Unknown,
                        "zero" => OmegaSpec::Zero,
                        _ => OmegaSpec::Vector(vec_of(*ln, &v)?),
                    };
                }
                _ => return Err(perr(*ln, format!("unknown key `{}`", k))),
            }
        }
    }

    // intertwiners
    let mut intertwiners: BTreeMap<(usize, usize, usize), BTreeMap<usize, OperatorTable>> = BTreeMap::new();
    let mut fmat = BTreeMap::new();
    let mut omat = BTreeMap::new();
    let mut gbasis: BTreeMap<(usize, usize, usize, usize), Vec<GBasisElement>> = BTreeMap::new();
    for sec in &sections {
        let words: Vec<&str> = sec.header.split_whitespace().collect();
        match words.first().copied() {
            Some("intertwiner") => {
                // intertwiner a1 a2 -> a3 # i
                if words.len() != 7 || words[3] != "->" || words[5] != "#" {
                    return Err(perr(sec.line, "expected [intertwiner a1 a2 -> a3 # i]"));
                }
                let y = YRef::new(color(sec.line, words[1])?, color(sec.line, words[2])?, color(sec.line, words[4])?, parse_usize(sec.line, words[6])?);
                let mut tab = OperatorTable::empty(y);
                for (ln, t) in &sec.body {
                    let (lhs, v) = key_value(*ln, t)?;
                    let (ins, out) = lhs.split_once("->").ok_or_else(|| perr(*ln, "expected `n l1.i1 l2.i2 -> l3.i3 = c`"))?;
                    let ins: Vec<&str> = ins.split_whitespace().collect();
                    if ins.len() != 3 {
                        return Err(perr(*ln, "expected `n l1.i1 l2.i2`"));
                    }
                    let n = parse_rational(ins[0]).map_err(|e| parse_error_num(*ln, e))?;
                    let (l1, i1) = parse_level_index(*ln, ins[1])?;
                    let (l2, i2) = parse_level_index(*ln, ins[2])?;
                    let (l3, i3) = parse_level_index(*ln, out.trim())?;
                    let c = num(*ln, &v)?;
                    let loc = format!("line {}", ln);
                    for (a, l, i) in [(y.a1, l1, i1), (y.a2, l2, i2), (y.a3, l3, i3)] {
                        if i >= spaces[a].dim(l) {
                            return Err(invalid(&loc, format!("basis vector {}.{} outside W^{}", l, i, names[a])));
                        }
                    }
                    let shift = &spaces[y.a1].weight + &spaces[y.a2].weight - &spaces[y.a3].weight;
                    let expect = shift + rint(l1 as i64 + l2 as i64) - &n - rint(1);
                    if expect != rint(l3 as i64) {
                        return Err(invalid(&loc, format!("grading mismatch: mode {} from levels {} and {} lands at level {}, not {}", fmt_rational(&n), l1, l2, fmt_rational(&expect), l3)));
                    }
                    let key = (n, l1, i1, l2, i2);
                    let slot = tab.entries.entry(key).or_insert_with(|| vec![CycloNumber::zero(order); spaces[y.a3].dim(l3)]);
                    if !slot[i3].is_zero() {
                        return Err(perr(*ln, "duplicate table entry"));
                    }
                    slot[i3] = c;
                }
                tab.entries.retain(|_, v| v.iter().any(|x| !x.is_zero()));
                let slot = intertwiners.entry((y.a1, y.a2, y.a3)).or_default();
                if slot.insert(y.index, tab).is_some() {
                    return Err(perr(sec.line, "duplicate intertwiner section"));
                }
            }
            Some("F") => {
                // F a1 a2 a3 ; a4
                if words.len() != 6 || words[4] != ";" {
                    return Err(perr(sec.line, "expected [F a1 a2 a3 ; a4]"));
                }
                let key = (color(sec.line, words[1])?, color(sec.line, words[2])?, color(sec.line, words[3])?, color(sec.line, words[5])?);
                let rows = sec.body.iter().map(|(ln, t)| vec_of(*ln, t)).collect::<Result<Vec<_>, _>>()?;
                let m = Matrix::from_rows(rows, order).map_err(|e| invalid(format!("line {}", sec.line), e.to_string()))?;
                if fmat.insert(key, m).is_some() {
                    return Err(perr(sec.line, "duplicate F block"));
                }
            }
            Some("Omega") => {
                if words.len() != 5 || words[3] != ";" {
                    return Err(perr(sec.line, "expected [Omega a1 a2 ; a3]"));
                }
                let key = (color(sec.line, words[1])?, color(sec.line, words[2])?, color(sec.line, words[4])?);
                let rows = sec.body.iter().map(|(ln, t)| vec_of(*ln, t)).collect::<Result<Vec<_>, _>>()?;
                let m = Matrix::from_rows(rows, order).map_err(|e| invalid(format!("line {}", sec.line), e.to_string()))?;
                if omat.insert(key, m).is_some() {
                    return Err(perr(sec.line, "duplicate Omega block"));
                }
            }
            Some("gbasis") => {
                for (ln, t) in &sec.body {
                    let (lhs, v) = key_value(*ln, t)?;
                    let l: Vec<&str> = lhs.split_whitespace().collect();
                    let r: Vec<&str> = v.split_whitespace().collect();
                    if l.len() != 5 || r.len() != 3 {
                        return Err(perr(*ln, "expected `a1 a2 a3 a4 label = a b c`"));
                    }
                    let key = (color(*ln, l[0])?, color(*ln, l[1])?, color(*ln, l[2])?, color(*ln, l[3])?);
                    let q = |s: &str| parse_rational(s).map_err(|e| parse_error_num(*ln, e));
                    gbasis.entry(key).or_default().push(GBasisElement { label: l[4].to_string(), a: q(r[0])?, b: q(r[1])?, c: q(r[2])? });
                }
            }
            Some("colors") | Some("fusion") | Some("weights") | Some("dims") | Some("vacuum") | Some("virasoro") => {}
            _ => return Err(perr(sec.line, format!("unknown section [{}]", sec.header))),
        }
    }
    let mut inter = BTreeMap::new();
    for (k, m) in intertwiners {
        let n = m.len();
        let v: Vec<OperatorTable> = m.into_values().collect();
        if v.iter().enumerate().any(|(i, t)| t.yref.index != i) {
            return Err(invalid(format!("[intertwiner {} {} -> {}]", names[k.0], names[k.1], names[k.2]), format!("indices must be 0..{}", n)));
        }
        inter.insert(k, v);
    }
    let inst = AlgebraInstance { order, colors, spaces, vacuum, central_charge, omega, intertwiners: inter, fmat, omat, gbasis };
    if !omega_seen && inst.spaces[identity].truncation() >= 2 {
        return Err(invalid("[virasoro]", "missing `omega`"));
    }
    validate(&inst)?;
    Ok(inst)
}

/// Eager invariant checks for a constructed or loaded instance.
pub fn validate(inst: &AlgebraInstance) -> Result<(), AlgError> {
    inst.colors.validate()?;
    let e = inst.e();
    let nm = |a: usize| inst.colors.names[a].clone();
    if !inst.h(e).is_zero() {
        return Err(invalid("[weights]", "identity color must have weight 0"));
    }
    if inst.vacuum.len() != inst.spaces[e].dim(0) || inst.vacuum.iter().all(|c| c.is_zero()) {
        return Err(invalid("[vacuum]", "vacuum must be a nonzero vector of level 0 of the identity color"));
    }
    match &inst.omega {
        OmegaSpec::Vector(w) if w.len() != inst.spaces[e].dim(2) || inst.spaces[e].truncation() < 2 => {
            return Err(invalid("[virasoro]", "omega must be a vector of level 2 of the identity color"))
        }
        _ => {}
    }
    let k = inst.ncolors();
    for a1 in 0..k {
        for a2 in 0..k {
            for a3 in 0..k {
                let have = inst.intertwiners.get(&(a1, a2, a3)).map(|v| v.len()).unwrap_or(0);
                let want = inst.n(a1, a2, a3) as usize;
                if have != want {
                    return Err(invalid(format!("[intertwiner {} {} -> {}]", nm(a1), nm(a2), nm(a3)), format!("{} basis elements declared, fusion rule is {}", have, want)));
                }
            }
        }
    }
    for (&(a1, a2, a3, a4), m) in &inst.fmat {
        let (r, c) = (inst.f_rows(a1, a2, a3, a4).len(), inst.f_cols(a1, a2, a3, a4).len());
        if m.rows() != r || m.cols() != c {
            return Err(invalid(format!("[F {} {} {} ; {}]", nm(a1), nm(a2), nm(a3), nm(a4)), format!("block is {}x{}, expected {}x{}", m.rows(), m.cols(), r, c)));
        }
    }
    for (&(a1, a2, a3), m) in &inst.omat {
        let (r, c) = (inst.n(a1, a2, a3) as usize, inst.n(a2, a1, a3) as usize);
        if m.rows() != r || m.cols() != c {
            return Err(invalid(format!("[Omega {} {} ; {}]", nm(a1), nm(a2), nm(a3)), format!("block is {}x{}, expected {}x{}", m.rows(), m.cols(), r, c)));
        }
    }
    for (&(a1, a2, a3, a4), b) in &inst.gbasis {
        validate_gbasis(b).map_err(|e| invalid(format!("[gbasis] {} {} {} {}", nm(a1), nm(a2), nm(a3), nm(a4)), e.to_string()))?;
    }
    Ok(())
}

fn vec_text(v: &[CycloNumber]) -> String {
    v.iter().map(|c| c.to_text()).collect::<Vec<_>>().join(" ; ")
}

/// Canonical text form; parse_instance(save_instance(x)) == x.
pub fn save_instance(inst: &AlgebraInstance) -> String {
    let nm = |a: usize| inst.colors.names[a].as_str();
    let mut s = String::new();
    let _ = writeln!(s, "[colors]\nnames = {}\nidentity = {}\norder = {}\n", inst.colors.names.join(" "), nm(inst.e()), inst.order);
    s.push_str("[fusion]\n");
    for (&(a, b, c), n) in &inst.colors.fusion {
        let _ = writeln!(s, "{} {} -> {} = {}", nm(a), nm(b), nm(c), n);
    }
    s.push_str("\n[weights]\n");
    for (a, sp) in inst.spaces.iter().enumerate() {
        let _ = writeln!(s, "{} = {}", nm(a), fmt_rational(&sp.weight));
    }
    s.push_str("\n[dims]\n");
    for (a, sp) in inst.spaces.iter().enumerate() {
        let d: Vec<String> = sp.dims.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(s, "{} = {}", nm(a), d.join(" "));
    }
    let _ = writeln!(s, "\n[vacuum]\nvector = {}\n", vec_text(&inst.vacuum));
    let _ = writeln!(
        s,
        "[virasoro]\nc = {}\nomega = {}\n",
        inst.central_charge,
        match &inst.omega {
            OmegaSpec::Unknown => "none".to_string(),
            OmegaSpec::Zero => "zero".to_string(),
            OmegaSpec::Vector(w) => vec_text(w),
        }
    );
    for tabs in inst.intertwiners.values() {
        for tab in tabs {
            let y = tab.yref;
            let _ = writeln!(s, "[intertwiner {} {} -> {} # {}]", nm(y.a1), nm(y.a2), nm(y.a3), y.index);
            for ((n, l1, i1, l2, i2), v) in &tab.entries {
                let l3 = inst.output_level(y, n, *l1, *l2).expect("validated level");
                for (i3, c) in v.iter().enumerate() {
                    if !c.is_zero() {
                        let _ = writeln!(s, "{} {}.{} {}.{} -> {}.{} = {}", fmt_rational(n), l1, i1, l2, i2, l3, i3, c);
                    }
                }
            }
            s.push('\n');
        }
    }
    for (&(a1, a2, a3, a4), m) in &inst.fmat {
        let _ = writeln!(s, "[F {} {} {} ; {}]\n{}", nm(a1), nm(a2), nm(a3), nm(a4), m);
    }
    for (&(a1, a2, a3), m) in &inst.omat {
        let _ = writeln!(s, "[Omega {} {} ; {}]\n{}", nm(a1), nm(a2), nm(a3), m);
    }
    if !inst.gbasis.is_empty() {
        s.push_str("[gbasis]\n");
        for (&(a1, a2, a3, a4), v) in &inst.gbasis {
            for b in v {
                let _ = writeln!(s, "{} {} {} {} {} = {} {} {}", nm(a1), nm(a2), nm(a3), nm(a4), b.label, fmt_rational(&b.a), fmt_rational(&b.b), fmt_rational(&b.c));
            }
        }
    }
    s
}

pub fn save_instance_file(inst: &AlgebraInstance, path: &Path) -> Result<(), AlgError> {
    std::fs::write(path, save_instance(inst)).map_err(|e| AlgError::Io(format!("{}: {}", path.display(), e)))
}
