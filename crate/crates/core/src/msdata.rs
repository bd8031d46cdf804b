//! Fusing, skew-symmetry and braiding matrices; pentagon and hexagon checks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::algdata::AlgebraInstance;
use crate::exactnum::{CycloNumber, NumError};
use crate::report::{CheckReport, Witness};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("singular block")]
    Singular,
    #[error(transparent)]
    Num(#[from] NumError),
}

/// Dense matrix over the cyclotomic field. Rows are inputs, columns outputs:
/// a map sends row vector v to v*M, so "first A then B" is A*B.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    order: u32,
    data: Vec<CycloNumber>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize, order: u32) -> Self {
        Matrix { rows, cols, order, data: vec![CycloNumber::zero(order); rows * cols] }
    }

    pub fn identity(n: usize, order: u32) -> Self {
        let mut m = Self::zeros(n, n, order);
        for i in 0..n {
            m.set(i, i, CycloNumber::one(order));
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<CycloNumber>>, order: u32) -> Result<Self, MatrixError> {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        if rows.iter().any(|x| x.len() != c) {
            return Err(MatrixError::Shape("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, order, data: rows.into_iter().flatten().collect() })
    }

    pub fn scalar(c: CycloNumber) -> Self {
        let o = c.order();
        Matrix { rows: 1, cols: 1, order: o, data: vec![c] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> &CycloNumber {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: CycloNumber) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[CycloNumber] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::Shape(format!("{}x{} * {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let mut out = Matrix::zeros(self.rows, other.cols, self.order);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j) + &(a * b);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<Matrix, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::Shape("non-square".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n, self.order);
        for col in 0..n {
            let piv = (col..n).find(|&r| !a.get(r, col).is_zero()).ok_or(MatrixError::Singular)?;
            if piv != col {
                a.swap_rows(piv, col);
                inv.swap_rows(piv, col);
            }
            let p = a.get(col, col).try_inv()?;
            a.scale_row(col, &p);
            inv.scale_row(col, &p);
            for r in 0..n {
                if r != col && !a.get(r, col).is_zero() {
                    let f = a.get(r, col).neg();
                    a.add_row_multiple(r, col, &f);
                    inv.add_row_multiple(r, col, &f);
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn scale_row(&mut self, i: usize, f: &CycloNumber) {
        for c in 0..self.cols {
            let v = self.get(i, c) * f;
            self.set(i, c, v);
        }
    }

    fn add_row_multiple(&mut self, dst: usize, src: usize, f: &CycloNumber) {
        for c in 0..self.cols {
            let v = self.get(dst, c) + &(self.get(src, c) * f);
            self.set(dst, c, v);
        }
    }

    /// First entry (row-major) where the two matrices differ.
    pub fn first_difference(&self, other: &Matrix) -> Option<(usize, usize)> {
        if self.rows != other.rows || self.cols != other.cols {
            return Some((0, 0));
        }
        (0..self.rows * self.cols).find(|&k| self.data[k] != other.data[k]).map(|k| (k / self.cols, k % self.cols))
    }

    pub fn map_entries(&self, f: impl Fn(&CycloNumber) -> CycloNumber) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, order: self.order, data: self.data.iter().map(f).collect() }
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|c| c.to_text()).collect();
            writeln!(f, "{}", row.join(" ; "))?;
        }
        Ok(())
    }
}

/// Coefficients c with sum_j c_j * vecs[j] = target, if target lies in the span.
pub fn solve_combination(vecs: &[Vec<CycloNumber>], target: &[CycloNumber], order: u32) -> Option<Vec<CycloNumber>> {
    solve_with_rank(vecs, target, order).map(|(x, _)| x)
}

/// As solve_combination, also returning the rank of the vectors.
pub fn solve_with_rank(vecs: &[Vec<CycloNumber>], target: &[CycloNumber], order: u32) -> Option<(Vec<CycloNumber>, usize)> {
    // Columns are the given vectors; row-reduce the augmented system.
    let n = vecs.len();
    let len = target.len();
    let mut rows: Vec<Vec<CycloNumber>> = (0..len)
        .map(|r| {
            let mut row: Vec<CycloNumber> = vecs.iter().map(|v| v[r].clone()).collect();
            row.push(target[r].clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..len).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].try_inv().ok()?;
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..len {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for k in 0..=n {
                    let v = &rows[i][k] - &(&rows[r][k] * &f);
                    rows[i][k] = v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut out = vec![CycloNumber::zero(order); n];
    for (i, &c) in pivots.iter().enumerate() {
        out[c] = rows[i][n].clone();
    }
    Some((out, pivots.len()))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MsError {
    #[error("missing block {0}")]
    Missing(String),
    #[error("singular block {0}")]
    Singular(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

pub type Quad = (usize, usize, usize, usize);
pub type BraidingMatrix = BTreeMap<Quad, Matrix>;

fn fblock(inst: &AlgebraInstance, q: Quad) -> Result<&Matrix, MsError> {
    inst.fmat.get(&q).ok_or_else(|| MsError::Missing(format!("F({},{},{};{})", q.0, q.1, q.2, q.3)))
}

fn oblock(inst: &AlgebraInstance, a1: usize, a2: usize, a3: usize) -> Result<Matrix, MsError> {
    if inst.n(a1, a2, a3) == 0 {
        return Ok(Matrix::zeros(0, 0, inst.order));
    }
    inst.omat.get(&(a1, a2, a3)).cloned().ok_or_else(|| MsError::Missing(format!("Omega({},{};{})", a1, a2, a3)))
}

/// Omega^{-1} as a map V_{a1 a2}^{a3} -> V_{a2 a1}^{a3}.
fn oblock_inv(inst: &AlgebraInstance, a1: usize, a2: usize, a3: usize) -> Result<Matrix, MsError> {
    let m = oblock(inst, a2, a1, a3)?;
    if m.rows() == 0 {
        return Ok(m);
    }
    m.inverse().map_err(|_| MsError::Singular(format!("Omega({},{};{})", a2, a1, a3)))
}

/// (Omega (x) I) between the column spaces of F(a1 a2 a3; a4) and F(a2 a1 a3; a4).
pub fn omega_lift(inst: &AlgebraInstance, q: Quad) -> Result<Matrix, MsError> {
    let (a1, a2, a3, a4) = q;
    let rows = inst.f_cols(a1, a2, a3, a4);
    let cols = inst.f_cols(a2, a1, a3, a4);
    let mut m = Matrix::zeros(rows.len(), cols.len(), inst.order);
    for (r, &(a, k, l)) in rows.iter().enumerate() {
        let om = oblock(inst, a1, a2, a)?;
        for (c, &(b, k2, l2)) in cols.iter().enumerate() {
            if a == b && l == l2 {
                m.set(r, c, om.get(k, k2).clone());
            }
        }
    }
    Ok(m)
}

/// B(a1,a2;a3,a4) = F(a1 a2 a3; a4), then Omega (x) I, then F(a2 a1 a3; a4)^{-1}.
pub fn derive_braiding(inst: &AlgebraInstance) -> Result<BraidingMatrix, MsError> {
    let mut out = BTreeMap::new();
    for q in inst.quadruples() {
        let (a1, a2, a3, a4) = q;
        let f1 = fblock(inst, q)?;
        let f2 = fblock(inst, (a2, a1, a3, a4))?;
        let f2inv = f2.inverse().map_err(|_| MsError::Singular(format!("F({},{},{};{})", a2, a1, a3, a4)))?;
        let b = f1.mul(&omega_lift(inst, q)?)?.mul(&f2inv)?;
        out.insert(q, b);
    }
    Ok(out)
}

/// Sparse vector over basis keys of a coproduct space.
pub type Key = Vec<usize>;
pub type SVec = BTreeMap<Key, CycloNumber>;

/// A linear map given by the images of the domain basis, in enumeration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinMap(pub BTreeMap<Key, SVec>);

impl LinMap {
    /// self first, then next.
    pub fn then(&self, next: &LinMap) -> Result<LinMap, MsError> {
        let mut out = BTreeMap::new();
        for (k, v) in &self.0 {
            let mut img = SVec::new();
            for (k2, c) in v {
                let w = next.0.get(k2).ok_or_else(|| MsError::Shape(format!("key {:?} outside domain", k2)))?;
                for (k3, c3) in w {
                    accumulate(&mut img, k3.clone(), c * c3);
                }
            }
            out.insert(k.clone(), img);
        }
        Ok(LinMap(out))
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|(k, v)| v.len() == 1 && v.get(k).is_some_and(|c| c.is_one()))
    }
}

fn accumulate(v: &mut SVec, k: Key, c: CycloNumber) {
    if c.is_zero() {
        return;
    }
    let s = match v.get(&k) {
        Some(x) => x + &c,
        None => c,
    };
    if s.is_zero() {
        v.remove(&k);
    } else {
        v.insert(k, s);
    }
}

/// Image of the F row (m, i, j) of block (x y z; out): columns (n, k, l) with coefficients.
fn f_image(inst: &AlgebraInstance, q: Quad, m: usize, i: usize, j: usize) -> Result<Vec<((usize, usize, usize), CycloNumber)>, MsError> {
    let (x, y, z, o) = q;
    let rows = inst.f_rows(x, y, z, o);
    let r = rows.iter().position(|&t| t == (m, i, j)).ok_or_else(|| MsError::Shape(format!("row ({},{},{}) of F({},{},{};{})", m, i, j, x, y, z, o)))?;
    let cols = inst.f_cols(x, y, z, o);
    let b = fblock(inst, q)?;
    if b.rows() != rows.len() || b.cols() != cols.len() {
        return Err(MsError::Shape(format!("F({},{},{};{}) is {}x{}", x, y, z, o, b.rows(), b.cols())));
    }
    Ok(cols.into_iter().enumerate().filter(|(c, _)| !b.get(r, *c).is_zero()).map(|(c, t)| (t, b.get(r, c).clone())).collect())
}

/// Tree shapes of triple tensors with leaves a1..a4 and root a5.
/// A = 1(2(34)), B = (12)(34), C = ((12)3)4, D = 1((23)4), E = (1(23))4.
/// Keys are (two intermediate colors, three intertwiner indices), outermost factor first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    A,
    B,
    C,
    D,
    E,
}

fn shape_dims(inst: &AlgebraInstance, s: Shape, a: [usize; 5], u: usize, v: usize) -> [u32; 3] {
    let [a1, a2, a3, a4, a5] = a;
    match s {
        Shape::A => [inst.n(a1, u, a5), inst.n(a2, v, u), inst.n(a3, a4, v)],
        Shape::B => [inst.n(u, v, a5), inst.n(a1, a2, u), inst.n(a3, a4, v)],
        Shape::C => [inst.n(u, a4, a5), inst.n(v, a3, u), inst.n(a1, a2, v)],
        Shape::D => [inst.n(a1, u, a5), inst.n(v, a4, u), inst.n(a2, a3, v)],
        Shape::E => [inst.n(u, a4, a5), inst.n(a1, v, u), inst.n(a2, a3, v)],
    }
}

pub fn enumerate_triples(inst: &AlgebraInstance, s: Shape, a: [usize; 5]) -> Vec<Key> {
    let k = inst.ncolors();
    let mut out = Vec::new();
    for u in 0..k {
        for v in 0..k {
            let [d1, d2, d3] = shape_dims(inst, s, a, u, v);
            for i in 0..d1 as usize {
                for j in 0..d2 as usize {
                    for l in 0..d3 as usize {
                        out.push(vec![u, v, i, j, l]);
                    }
                }
            }
        }
    }
    out
}

/// The induced maps on triple spaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftKind {
    /// A -> B
    F12First,
    /// B -> C
    F23Second,
    /// A -> D
    F23First,
    /// D -> E
    F13,
    /// E -> C
    F12Second,
}

impl LiftKind {
    pub fn domain(self) -> Shape {
        match self {
            LiftKind::F12First | LiftKind::F23First => Shape::A,
            LiftKind::F23Second => Shape::B,
            LiftKind::F13 => Shape::D,
            LiftKind::F12Second => Shape::E,
        }
    }
}

fn lift_image(inst: &AlgebraInstance, kind: LiftKind, a: [usize; 5], key: &Key) -> Result<SVec, MsError> {
    let [a1, a2, a3, a4, a5] = a;
    let (u, v, i, j, l) = (key[0], key[1], key[2], key[3], key[4]);
    let mut out = SVec::new();
    match kind {
        LiftKind::F12First => {
            for ((r, kk, ll), c) in f_image(inst, (a1, a2, v, a5), u, i, j)? {
                accumulate(&mut out, vec![r, v, ll, kk, l], c);
            }
        }
        LiftKind::F23Second => {
            for ((s, kk, ll), c) in f_image(inst, (u, a3, a4, a5), v, i, l)? {
                accumulate(&mut out, vec![s, u, ll, kk, j], c);
            }
        }
        LiftKind::F23First => {
            for ((t, kk, ll), c) in f_image(inst, (a2, a3, a4, u), v, j, l)? {
                accumulate(&mut out, vec![u, t, i, ll, kk], c);
            }
        }
        LiftKind::F13 => {
            for ((s, kk, ll), c) in f_image(inst, (a1, v, a4, a5), u, i, j)? {
                accumulate(&mut out, vec![s, v, ll, kk, l], c);
            }
        }
        LiftKind::F12Second => {
            for ((r, kk, ll), c) in f_image(inst, (a1, a2, a3, u), v, j, l)? {
                accumulate(&mut out, vec![u, r, i, ll, kk], c);
            }
        }
    }
    Ok(out)
}

/// Matrix of an induced map on the triple space with leaves a1..a4 and root a5.
pub fn lift_to_triple(inst: &AlgebraInstance, kind: LiftKind, a: [usize; 5]) -> Result<LinMap, MsError> {
    let mut m = BTreeMap::new();
    for key in enumerate_triples(inst, kind.domain(), a) {
        let img = lift_image(inst, kind, a, &key)?;
        m.insert(key, img);
    }
    Ok(LinMap(m))
}

fn apply_lift(inst: &AlgebraInstance, kind: LiftKind, a: [usize; 5], v: &SVec) -> Result<SVec, MsError> {
    let mut out = SVec::new();
    for (k, c) in v {
        for (k2, c2) in lift_image(inst, kind, a, k)? {
            accumulate(&mut out, k2, c * &c2);
        }
    }
    Ok(out)
}

fn first_svec_difference(x: &SVec, y: &SVec) -> Option<(Key, CycloNumber, CycloNumber)> {
    let keys: BTreeSet<&Key> = x.keys().chain(y.keys()).collect();
    for k in keys {
        let zero = CycloNumber::zero(x.values().chain(y.values()).next().map(|c| c.order()).unwrap_or(2));
        let (p, q) = (x.get(k).unwrap_or(&zero), y.get(k).unwrap_or(&zero));
        if p != q {
            return Some((k.clone(), p.clone(), q.clone()));
        }
    }
    None
}

fn names(inst: &AlgebraInstance, cs: &[usize]) -> String {
    cs.iter().map(|&c| inst.name(c)).collect::<Vec<_>>().join(",")
}

fn matrix_only_note(inst: &AlgebraInstance, r: &mut CheckReport) {
    if inst.intertwiners.values().all(|v| v.iter().all(|t| t.entries.is_empty())) {
        r.note("matrix-only: no operator tables, equations checked on the declared matrices alone");
    }
}

/// F23(2) o F12(1) = F12(2) o F13 o F23(1) on every triple space.
pub fn check_pentagon(inst: &AlgebraInstance) -> CheckReport {
    let mut rep = CheckReport::new("pentagon");
    matrix_only_note(inst, &mut rep);
    let k = inst.ncolors();
    let mut checked = 0u64;
    for a1 in 0..k {
        for a2 in 0..k {
            for a3 in 0..k {
                for a4 in 0..k {
                    for a5 in 0..k {
                        let a = [a1, a2, a3, a4, a5];
                        for key in enumerate_triples(inst, Shape::A, a) {
                            let e: SVec = [(key.clone(), CycloNumber::one(inst.order))].into_iter().collect();
                            let run = || -> Result<(SVec, SVec), MsError> {
                                let lhs = apply_lift(inst, LiftKind::F23Second, a, &apply_lift(inst, LiftKind::F12First, a, &e)?)?;
                                let d = apply_lift(inst, LiftKind::F23First, a, &e)?;
                                let rhs = apply_lift(inst, LiftKind::F12Second, a, &apply_lift(inst, LiftKind::F13, a, &d)?)?;
                                Ok((lhs, rhs))
                            };
                            let (lhs, rhs) = match run() {
                                Ok(x) => x,
                                Err(err) => {
                                    let loc = format!("colors ({}) at {:?}", names(inst, &a), key);
                                    rep.fail_reason("pentagon", err.to_string(), Witness::new(loc, "defined", "error"));
                                    return rep;
                                }
                            };
                            checked += enumerate_triples(inst, Shape::C, a).len() as u64;
                            if let Some((out, l, r)) = first_svec_difference(&lhs, &rhs) {
                                let loc = format!(
                                    "(a1..a7)=({},{},{}) (i,j,k)=({},{},{}) -> ((12)3)4 colors ({}) indices ({},{},{})",
                                    names(inst, &a),
                                    inst.name(key[0]),
                                    inst.name(key[1]),
                                    key[2],
                                    key[3],
                                    key[4],
                                    names(inst, &out[..2]),
                                    out[2],
                                    out[3],
                                    out[4]
                                );
                                rep.fail("pentagon", Witness::new(loc, r.to_text(), l.to_text()));
                                return rep;
                            }
                        }
                    }
                }
            }
        }
    }
    rep.pass("pentagon", checked);
    rep
}

/// Pair-space maps for the hexagons. P keys (m, i, j): i in V_{x m}^{o}, j in V_{y z}^{m}.
/// I keys (n, k, l): k in V_{x y}^{n}, l in V_{n z}^{o}.
fn apply_f_pair(inst: &AlgebraInstance, q: Quad, v: &SVec) -> Result<SVec, MsError> {
    let mut out = SVec::new();
    for (k, c) in v {
        for ((n, kk, ll), c2) in f_image(inst, q, k[0], k[1], k[2])? {
            accumulate(&mut out, vec![n, kk, ll], c * &c2);
        }
    }
    Ok(out)
}

type OmegaFn<'a> = &'a dyn Fn(usize, usize, usize) -> Result<Matrix, MsError>;

fn apply_omega_slot(om: OmegaFn, v: &SVec, slot: usize, ty: impl Fn(&Key) -> (usize, usize, usize), reshape: impl Fn(&Key, usize) -> Key) -> Result<SVec, MsError> {
    let mut out = SVec::new();
    for (k, c) in v {
        let (x, y, z) = ty(k);
        let m = om(x, y, z)?;
        for c2 in 0..m.cols() {
            let e = m.get(k[slot], c2);
            if !e.is_zero() {
                accumulate(&mut out, reshape(k, c2), c * e);
            }
        }
    }
    Ok(out)
}

/// One hexagon on leaves (a1, a2, a3), root a4: F o Om(3) o F = Om(2) o F o Om(4).
fn hexagon_sides(inst: &AlgebraInstance, om: OmegaFn, a: [usize; 4], e: &SVec) -> Result<(SVec, SVec), MsError> {
    let [a1, a2, a3, a4] = a;
    // F, then Omega on the outer factor V_{n a3}^{a4}, giving P keys for leaves (a3, a1, a2)
    let i1 = apply_f_pair(inst, (a1, a2, a3, a4), e)?;
    let p2 = apply_omega_slot(om, &i1, 2, |k| (k[0], a3, a4), |k, c| vec![k[0], c, k[1]])?;
    let lhs = apply_f_pair(inst, (a3, a1, a2, a4), &p2)?;
    // Omega on the inner factor V_{a2 a3}^{m}, F for leaves (a1, a3, a2), Omega on V_{a1 a3}^{t}
    let p1 = apply_omega_slot(om, e, 2, |k| (a2, a3, k[0]), |k, c| vec![k[0], k[1], c])?;
    let i2 = apply_f_pair(inst, (a1, a3, a2, a4), &p1)?;
    let rhs = apply_omega_slot(om, &i2, 1, |k| (a1, a3, k[0]), |k, c| vec![k[0], c, k[2]])?;
    Ok((lhs, rhs))
}

pub fn check_hexagons(inst: &AlgebraInstance) -> CheckReport {
    let mut rep = CheckReport::new("hexagon");
    matrix_only_note(inst, &mut rep);
    let fwd = |x, y, z| oblock(inst, x, y, z);
    let inv = |x, y, z| oblock_inv(inst, x, y, z);
    let sides: [(&str, OmegaFn); 2] = [("hexagon (Omega)", &fwd), ("hexagon (Omega^-1)", &inv)];
    for (label, om) in sides {
        let mut checked = 0u64;
        let mut failed = false;
        'outer: for (a1, a2, a3, a4) in inst.quadruples() {
            for (m, i, j) in inst.f_rows(a1, a2, a3, a4) {
                let key = vec![m, i, j];
                let e: SVec = [(key.clone(), CycloNumber::one(inst.order))].into_iter().collect();
                let loc0 = format!("(a1..a5)=({},{}) (i,j)=({},{})", names(inst, &[a1, a2, a3, a4]), inst.name(m), i, j);
                match hexagon_sides(inst, om, [a1, a2, a3, a4], &e) {
                    Err(err) => {
                        rep.fail_reason(label, err.to_string(), Witness::new(loc0, "defined", "error"));
                        failed = true;
                        break 'outer;
                    }
                    Ok((lhs, rhs)) => {
                        checked += inst.f_cols(a3, a1, a2, a4).len() as u64;
                        if let Some((out, l, r)) = first_svec_difference(&lhs, &rhs) {
                            let loc = format!("{} -> ({}) indices ({},{})", loc0, inst.name(out[0]), out[1], out[2]);
                            rep.fail(label, Witness::new(loc, r.to_text(), l.to_text()));
                            failed = true;
                            break 'outer;
                        }
                    }
                }
            }
        }
        if !failed {
            rep.pass(label, checked);
        }
    }
    rep
}
