//! Exact scalars and linear algebra over ℚ and prime fields.
//!
//! Everything downstream reduces to ranks, kernels and linear systems
//! solved here. Scalars are always `BigRational`; for a prime field the
//! value is kept as its canonical integer representative in `0..p` and
//! the [`FieldSpec`] performs the modular reduction after each operation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Scalar = BigRational;
pub type Vector = Vec<Scalar>;

/// The base field of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FieldSpec {
    Rationals,
    PrimeField(u64),
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(FieldSpec::PrimeField(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::PrimeField(p) => *p,
        }
    }

    pub fn zero(&self) -> Scalar {
        Scalar::zero()
    }

    pub fn one(&self) -> Scalar {
        Scalar::one()
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        self.normalize(Scalar::from_integer(BigInt::from(n)))
    }

    /// Canonical representative of `x` in this field.
    pub fn normalize(&self, x: Scalar) -> Scalar {
        match self {
            FieldSpec::Rationals => x,
            FieldSpec::PrimeField(p) => {
                if x.is_integer() && !x.is_negative() && x.numer() < &BigInt::from(*p) {
                    return x;
                }
                let p = BigInt::from(*p);
                let num = x.numer().mod_floor(&p);
                let den = x.denom().mod_floor(&p);
                assert!(!den.is_zero(), "denominator divisible by the characteristic");
                let inv = mod_inverse(&den, &p);
                Scalar::from_integer((num * inv).mod_floor(&p))
            }
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.normalize(a + b)
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.normalize(a - b)
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.normalize(a * b)
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        self.normalize(-a)
    }

    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        if a.is_zero() {
            return None;
        }
        match self {
            FieldSpec::Rationals => Some(a.recip()),
            FieldSpec::PrimeField(p) => {
                let p = BigInt::from(*p);
                Some(Scalar::from_integer(mod_inverse(a.numer(), &p)))
            }
        }
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Option<Scalar> {
        self.inv(b).map(|ib| self.mul(a, &ib))
    }

    /// `a + c·b`, the workhorse of elimination.
    pub fn axpy(&self, a: &Scalar, c: &Scalar, b: &Scalar) -> Scalar {
        self.normalize(a + c * b)
    }

    pub fn parse_scalar(&self, s: &str) -> Result<Scalar> {
        let t = s.trim();
        let bad = || Error::InvalidScalar(s.to_string());
        let value = if let Some((n, d)) = t.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Scalar::new(n, d)
        } else {
            Scalar::from_integer(t.parse::<BigInt>().map_err(|_| bad())?)
        };
        if let FieldSpec::PrimeField(p) = self {
            if value.denom().mod_floor(&BigInt::from(*p)).is_zero() {
                return Err(bad());
            }
        }
        Ok(self.normalize(value))
    }

    pub fn format_scalar(&self, x: &Scalar) -> String {
        if x.is_integer() {
            x.numer().to_string()
        } else {
            format!("{}/{}", x.numer(), x.denom())
        }
    }

    pub fn zero_vector(&self, n: usize) -> Vector {
        vec![Scalar::zero(); n]
    }

    pub fn unit_vector(&self, n: usize, i: usize) -> Vector {
        let mut v = self.zero_vector(n);
        v[i] = Scalar::one();
        v
    }

    pub fn vec_add(&self, a: &[Scalar], b: &[Scalar]) -> Vector {
        a.iter().zip(b).map(|(x, y)| self.add(x, y)).collect()
    }

    pub fn vec_sub(&self, a: &[Scalar], b: &[Scalar]) -> Vector {
        a.iter().zip(b).map(|(x, y)| self.sub(x, y)).collect()
    }

    pub fn vec_scale(&self, c: &Scalar, a: &[Scalar]) -> Vector {
        a.iter().map(|x| self.mul(c, x)).collect()
    }

    /// `a += c·b` in place.
    pub fn vec_axpy(&self, a: &mut [Scalar], c: &Scalar, b: &[Scalar]) {
        if c.is_zero() {
            return;
        }
        for (x, y) in a.iter_mut().zip(b) {
            if !y.is_zero() {
                *x = self.axpy(x, c, y);
            }
        }
    }

    pub fn dot(&self, a: &[Scalar], b: &[Scalar]) -> Scalar {
        let mut acc = Scalar::zero();
        for (x, y) in a.iter().zip(b) {
            if !x.is_zero() && !y.is_zero() {
                acc += x * y;
            }
        }
        self.normalize(acc)
    }
}

fn mod_inverse(a: &BigInt, p: &BigInt) -> BigInt {
    let g = a.mod_floor(p).extended_gcd(p);
    assert!(g.gcd.is_one(), "no inverse modulo {p}");
    g.x.mod_floor(p)
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "q"),
            FieldSpec::PrimeField(p) => write!(f, "fp:{p}"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("q") || t.eq_ignore_ascii_case("rationals") {
            return Ok(FieldSpec::Rationals);
        }
        if let Some(p) = t.strip_prefix("fp:") {
            let p: u64 = p
                .trim()
                .parse()
                .map_err(|_| Error::Malformed(format!("bad prime in field spec `{s}`")))?;
            return FieldSpec::prime(p);
        }
        Err(Error::Malformed(format!("unknown field spec `{s}`")))
    }
}

pub fn is_zero_vector(v: &[Scalar]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Sparse vector keyed by coordinate index.
pub type SparseVec = BTreeMap<usize, Scalar>;

pub fn to_sparse(v: &[Scalar]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn to_dense(v: &SparseVec, n: usize) -> Vector {
    let mut out = vec![Scalar::zero(); n];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

/// Incrementally maintained reduced row echelon form.
///
/// Rows are sparse, their first entry is the pivot (normalized to 1),
/// and every pivot column is zero in all other rows. Pivot columns are
/// chosen as the smallest nonzero index, so callers control pivot
/// preference through the column order.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: FieldSpec,
    ncols: usize,
    rows: Vec<Vec<(usize, Scalar)>>,
    pivot_row: BTreeMap<usize, usize>,
}

impl Echelon {
    pub fn new(field: FieldSpec, ncols: usize) -> Self {
        Echelon {
            field,
            ncols,
            rows: Vec::new(),
            pivot_row: BTreeMap::new(),
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivot_row.contains_key(&col)
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivot_row.keys().copied()
    }

    pub fn non_pivots(&self) -> Vec<usize> {
        (0..self.ncols).filter(|c| !self.is_pivot(*c)).collect()
    }

    /// Reduces `v` against the stored rows; the result has zeros in all
    /// pivot columns.
    pub fn reduce(&self, mut v: SparseVec) -> SparseVec {
        let hits: Vec<usize> = v
            .keys()
            .copied()
            .filter(|c| self.pivot_row.contains_key(c))
            .collect();
        for c in hits {
            let coef = match v.get(&c) {
                Some(x) => self.field.neg(x),
                None => continue,
            };
            let row = &self.rows[self.pivot_row[&c]];
            for (j, x) in row {
                let e = v.entry(*j).or_insert_with(Scalar::zero);
                *e = self.field.axpy(e, &coef, x);
                if e.is_zero() {
                    v.remove(j);
                }
            }
        }
        v
    }

    pub fn reduce_dense(&self, v: &[Scalar]) -> Vector {
        to_dense(&self.reduce(to_sparse(v)), self.ncols)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v.clone()).is_empty()
    }

    /// Adds `v` to the row space. Returns the new pivot column if `v` was
    /// independent of the existing rows.
    pub fn insert(&mut self, v: SparseVec) -> Option<usize> {
        let r = self.reduce(v);
        let (&p, lead) = r.iter().next()?;
        let lead_inv = self.field.inv(lead).expect("nonzero lead");
        let new_row: Vec<(usize, Scalar)> = r
            .iter()
            .map(|(j, x)| (*j, self.field.mul(&lead_inv, x)))
            .collect();
        for row in self.rows.iter_mut() {
            let pos = match row.binary_search_by_key(&p, |(j, _)| *j) {
                Ok(pos) => pos,
                Err(_) => continue,
            };
            let coef = self.field.neg(&row[pos].1);
            let mut merged: SparseVec = row.drain(..).collect();
            for (j, x) in &new_row {
                let e = merged.entry(*j).or_insert_with(Scalar::zero);
                *e = self.field.axpy(e, &coef, x);
            }
            *row = merged.into_iter().filter(|(_, x)| !x.is_zero()).collect();
        }
        self.pivot_row.insert(p, self.rows.len());
        self.rows.push(new_row);
        Some(p)
    }

    pub fn insert_dense(&mut self, v: &[Scalar]) -> Option<usize> {
        self.insert(to_sparse(v))
    }

    /// Rows sorted by pivot column, as dense vectors.
    pub fn basis(&self) -> Vec<Vector> {
        self.pivot_row
            .values()
            .map(|&r| {
                let mut d = vec![Scalar::zero(); self.ncols];
                for (j, x) in &self.rows[r] {
                    d[*j] = x.clone();
                }
                d
            })
            .collect()
    }

    /// Rows sorted by pivot column, in sparse form.
    pub fn sparse_rows(&self) -> Vec<SparseVec> {
        self.pivot_row
            .values()
            .map(|&r| self.rows[r].iter().cloned().collect())
            .collect()
    }

    pub fn row_for_pivot(&self, col: usize) -> Option<&[(usize, Scalar)]> {
        self.pivot_row.get(&col).map(|&r| self.rows[r].as_slice())
    }
}

/// Dense matrix over an exact field, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn new(field: FieldSpec, rows: usize, cols: usize, data: Vec<Scalar>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "matrix entries".into(),
                expected: rows * cols,
                found: data.len(),
            });
        }
        let data = data.into_iter().map(|x| field.normalize(x)).collect();
        Ok(Matrix {
            field,
            rows,
            cols,
            data,
        })
    }

    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = Scalar::one();
        }
        m
    }

    pub fn from_rows(field: FieldSpec, cols: usize, rows: Vec<Vector>) -> Result<Self> {
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    context: "matrix row".into(),
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend(r);
        }
        Matrix::new(field, nrows, cols, data)
    }

    pub fn from_i64(field: FieldSpec, rows: usize, cols: usize, entries: &[i64]) -> Self {
        let data = entries.iter().map(|x| field.from_i64(*x)).collect();
        Matrix::new(field, rows, cols, data).expect("entry count")
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(field: FieldSpec, rows: usize, cols: &[Vector]) -> Self {
        let mut m = Matrix::zeros(field, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length");
            for (i, x) in c.iter().enumerate() {
                m.data[i * m.cols + j] = field.normalize(x.clone());
            }
        }
        m
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Scalar) {
        self.data[i * self.cols + j] = self.field.normalize(x);
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape");
        let k = self.field;
        let mut out = Matrix::zeros(k, self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(l, j);
                    if !b.is_zero() {
                        let idx = i * rhs.cols + j;
                        out.data[idx] = k.axpy(&out.data[idx], a, b);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vector {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows).map(|i| self.field.dot(self.row(i), v)).collect()
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| self.field.add(a, b))
            .collect();
        Matrix { data, ..self.clone() }
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| self.field.sub(a, b))
            .collect();
        Matrix { data, ..self.clone() }
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        let data = self.data.iter().map(|a| self.field.mul(c, a)).collect();
        Matrix { data, ..self.clone() }
    }

    pub fn trace(&self) -> Scalar {
        let mut acc = Scalar::zero();
        for i in 0..self.rows.min(self.cols) {
            acc += self.get(i, i);
        }
        self.field.normalize(acc)
    }

    /// Block matrix `[self | rhs]`.
    pub fn hstack(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.rows, rhs.rows);
        let mut out = Matrix::zeros(self.field, self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[i * out.cols + j] = self.get(i, j).clone();
            }
            for j in 0..rhs.cols {
                out.data[i * out.cols + self.cols + j] = rhs.get(i, j).clone();
            }
        }
        out
    }

    /// Block matrix `[self ; rhs]`.
    pub fn vstack(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.cols);
        let mut data = self.data.clone();
        data.extend(rhs.data.iter().cloned());
        Matrix {
            field: self.field,
            rows: self.rows + rhs.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn block_diag(field: FieldSpec, blocks: &[Matrix]) -> Matrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.data[(r0 + i) * cols + c0 + j] = b.get(i, j).clone();
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn row_echelon(&self) -> Echelon {
        let mut e = Echelon::new(self.field, self.cols);
        for i in 0..self.rows {
            e.insert_dense(self.row(i));
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.row_echelon().rank()
    }

    /// Canonical basis of `{ v : self·v = 0 }`.
    pub fn kernel_basis(&self) -> Subspace {
        let e = self.row_echelon();
        let k = self.field;
        let mut vectors = Vec::new();
        for free in e.non_pivots() {
            let mut v = k.zero_vector(self.cols);
            v[free] = Scalar::one();
            for p in e.pivots() {
                let row = e.row_for_pivot(p).expect("pivot row");
                if let Ok(pos) = row.binary_search_by_key(&free, |(j, _)| *j) {
                    v[p] = k.neg(&row[pos].1);
                }
            }
            vectors.push(v);
        }
        Subspace::from_vectors(k, self.cols, &vectors)
    }

    /// Column space as a subspace of the target.
    pub fn image(&self) -> Subspace {
        let cols: Vec<Vector> = (0..self.cols).map(|j| self.column(j)).collect();
        Subspace::from_vectors(self.field, self.rows, &cols)
    }

    /// Some solution of `self·x = b`, with every free variable set to 0.
    pub fn solve_affine(&self, b: &[Scalar]) -> Option<Vector> {
        assert_eq!(b.len(), self.rows, "right-hand side length");
        solve_sparse_system(
            self.field,
            self.cols,
            (0..self.rows).map(|i| (to_sparse(self.row(i)), b[i].clone())),
        )
    }
}

/// Solves a linear system given as sparse rows `(coefficients, rhs)`.
/// Free variables are set to 0; returns `None` when inconsistent.
pub fn solve_sparse_system<I>(field: FieldSpec, nvars: usize, rows: I) -> Option<Vector>
where
    I: IntoIterator<Item = (SparseVec, Scalar)>,
{
    // the right-hand side sits in the last column so it never becomes a
    // pivot unless the system is inconsistent
    let mut e = Echelon::new(field, nvars + 1);
    for (mut coeffs, rhs) in rows {
        if !rhs.is_zero() {
            coeffs.insert(nvars, rhs);
        }
        if e.insert(coeffs) == Some(nvars) {
            return None;
        }
    }
    let mut x = field.zero_vector(nvars);
    for p in e.pivots().collect::<Vec<_>>() {
        let row = e.row_for_pivot(p).expect("pivot row");
        if let Some((j, v)) = row.last() {
            if *j == nvars {
                x[p] = v.clone();
            }
        }
    }
    Some(x)
}

/// A subspace of `k^ambient` stored by its reduced echelon basis, so equal
/// subspaces have identical representations.
#[derive(Clone, Debug)]
pub struct Subspace {
    ech: Echelon,
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.ech.field == other.ech.field
            && self.ech.ncols == other.ech.ncols
            && self.basis() == other.basis()
    }
}

impl Eq for Subspace {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubspaceOp {
    Sum,
    Intersection,
    /// Image of the second subspace in the quotient by the first.
    QuotientProjection,
}

impl Subspace {
    pub fn zero(field: FieldSpec, ambient: usize) -> Self {
        Subspace {
            ech: Echelon::new(field, ambient),
        }
    }

    pub fn full(field: FieldSpec, ambient: usize) -> Self {
        let vs: Vec<Vector> = (0..ambient).map(|i| field.unit_vector(ambient, i)).collect();
        Subspace::from_vectors(field, ambient, &vs)
    }

    pub fn from_vectors(field: FieldSpec, ambient: usize, vectors: &[Vector]) -> Self {
        let mut ech = Echelon::new(field, ambient);
        for v in vectors {
            assert_eq!(v.len(), ambient, "vector length");
            ech.insert_dense(v);
        }
        Subspace { ech }
    }

    pub fn from_echelon(ech: Echelon) -> Self {
        Subspace { ech }
    }

    pub fn field(&self) -> FieldSpec {
        self.ech.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.ech.ncols
    }

    pub fn dim(&self) -> usize {
        self.ech.rank()
    }

    pub fn echelon(&self) -> &Echelon {
        &self.ech
    }

    pub fn basis(&self) -> Vec<Vector> {
        self.ech.basis()
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.ech.contains(&to_sparse(v))
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis().iter().all(|v| self.contains(v))
    }

    /// Coordinates of `v` in [`Subspace::basis`], or `None` when `v` is not
    /// in the subspace. Unit pivots make these the pivot entries of `v`.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vector> {
        if !self.contains(v) {
            return None;
        }
        Some(self.ech.pivots().map(|p| v[p].clone()).collect())
    }

    /// Adds a vector; returns true if the dimension grew.
    pub fn add_vector(&mut self, v: &[Scalar]) -> bool {
        self.ech.insert_dense(v).is_some()
    }

    /// Indices of the standard basis vectors that form a basis of the
    /// quotient `k^ambient / self`.
    pub fn complement_indices(&self) -> Vec<usize> {
        self.ech.non_pivots()
    }

    /// Coordinates of the class of `v` in the quotient, with respect to
    /// [`Subspace::complement_indices`].
    pub fn project(&self, v: &[Scalar]) -> Vector {
        let r = self.ech.reduce(to_sparse(v));
        self.complement_indices()
            .iter()
            .map(|c| r.get(c).cloned().unwrap_or_else(Scalar::zero))
            .collect()
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim() != other.ambient_dim() {
            return Err(Error::DimensionMismatch {
                context: "subspace ambient".into(),
                expected: self.ambient_dim(),
                found: other.ambient_dim(),
            });
        }
        if self.field() != other.field() {
            return Err(Error::FieldMismatch(self.field(), other.field()));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let mut out = self.clone();
        for v in other.basis() {
            out.add_vector(&v);
        }
        Ok(out)
    }

    pub fn intersection(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let k = self.field();
        let a = self.basis();
        let b = other.basis();
        let n = self.ambient_dim();
        let mut cols: Vec<Vector> = a.clone();
        cols.extend(b.iter().map(|v| k.vec_scale(&k.from_i64(-1), v)));
        let m = Matrix::from_columns(k, n, &cols);
        let kernel = m.kernel_basis();
        let vectors: Vec<Vector> = kernel
            .basis()
            .iter()
            .map(|coef| {
                let mut v = k.zero_vector(n);
                for (c, ai) in coef.iter().zip(&a) {
                    k.vec_axpy(&mut v, c, ai);
                }
                v
            })
            .collect();
        Ok(Subspace::from_vectors(k, n, &vectors))
    }

    /// Image of `other` in `k^ambient / self`.
    pub fn quotient_projection(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let q = self.ambient_dim() - self.dim();
        let vs: Vec<Vector> = other.basis().iter().map(|v| self.project(v)).collect();
        Ok(Subspace::from_vectors(self.field(), q, &vs))
    }
}

pub fn subspace_ops(a: &Subspace, b: &Subspace, op: SubspaceOp) -> Result<Subspace> {
    match op {
        SubspaceOp::Sum => a.sum(b),
        SubspaceOp::Intersection => a.intersection(b),
        SubspaceOp::QuotientProjection => a.quotient_projection(b),
    }
}

/// Small integer conversion for reports.
pub fn scalar_to_i64(x: &Scalar) -> Option<i64> {
    if x.is_integer() {
        x.numer().to_i64()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const Q: FieldSpec = FieldSpec::Rationals;

    fn q(n: i64) -> Scalar {
        Q.from_i64(n)
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Matrix::identity(Q, 2).rank(), 2);
        assert_eq!(Matrix::zeros(Q, 3, 4).rank(), 0);
        assert_eq!(Matrix::from_i64(Q, 2, 2, &[2, 4, 1, 2]).rank(), 1);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(Matrix::identity(Q, 3).kernel_basis().dim(), 0);
        let z = Matrix::zeros(Q, 2, 3).kernel_basis();
        assert_eq!(z, Subspace::full(Q, 3));

        let f2 = FieldSpec::prime(2).unwrap();
        let m = Matrix::from_i64(f2, 1, 2, &[1, 1]);
        // enumerate all four vectors of F_2^2
        let mut brute = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                let v = vec![f2.from_i64(a), f2.from_i64(b)];
                if is_zero_vector(&m.mul_vec(&v)) {
                    brute.push(v);
                }
            }
        }
        assert_eq!(brute.len(), 2);
        let expected = Subspace::from_vectors(f2, 2, &brute);
        assert_eq!(m.kernel_basis(), expected);
        assert_eq!(m.kernel_basis().basis(), vec![vec![f2.one(), f2.one()]]);
    }

    #[test]
    fn solve_examples() {
        let b = vec![q(3), q(-1)];
        assert_eq!(Matrix::identity(Q, 2).solve_affine(&b), Some(b.clone()));
        let m = Matrix::from_i64(Q, 1, 2, &[1, 1]);
        assert_eq!(m.solve_affine(&[q(1)]), Some(vec![q(1), q(0)]));
        let z = Matrix::zeros(Q, 1, 1);
        assert_eq!(z.solve_affine(&[q(1)]), None);
    }

    #[test]
    fn subspace_examples() {
        let x = Subspace::from_vectors(Q, 2, &[vec![q(1), q(0)]]);
        let y = Subspace::from_vectors(Q, 2, &[vec![q(0), q(1)]]);
        assert_eq!(x.intersection(&y).unwrap().dim(), 0);
        assert_eq!(x.sum(&y).unwrap(), Subspace::full(Q, 2));

        let a = Subspace::from_vectors(Q, 3, &[vec![q(1), q(1), q(0)]]);
        let b = Subspace::from_vectors(Q, 3, &[vec![q(1), q(1), q(0)], vec![q(0), q(0), q(1)]]);
        assert_eq!(a.intersection(&b).unwrap(), a);
        assert_eq!(b.quotient_projection(&a).unwrap().dim(), 0);
        assert_eq!(a.quotient_projection(&b).unwrap().dim(), 1);

        let other = Subspace::zero(Q, 2);
        assert!(matches!(
            subspace_ops(&a, &other, SubspaceOp::Sum),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn prime_field_arithmetic() {
        let f3 = FieldSpec::prime(3).unwrap();
        assert_eq!(f3.from_i64(-1), f3.from_i64(2));
        assert_eq!(f3.inv(&f3.from_i64(2)), Some(f3.from_i64(2)));
        assert_eq!(f3.parse_scalar("1/2").unwrap(), f3.from_i64(2));
        assert!(f3.parse_scalar("1/3").is_err());
        assert!(FieldSpec::prime(4).is_err());
        assert_eq!("fp:5".parse::<FieldSpec>().unwrap(), FieldSpec::PrimeField(5));
        assert_eq!("q".parse::<FieldSpec>().unwrap(), Q);
    }

    fn small_matrix() -> impl Strategy<Value = (usize, usize, Vec<i64>)> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            (Just(r), Just(c), prop::collection::vec(-3i64..4, r * c))
        })
    }

    fn subspace_in(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
        prop::collection::vec(prop::collection::vec(-2i64..3, n), 0..4)
    }

    proptest! {
        #[test]
        fn rank_nullity((r, c, e) in small_matrix()) {
            let m = Matrix::from_i64(Q, r, c, &e);
            let k = m.kernel_basis();
            prop_assert_eq!(m.rank() + k.dim(), c);
            for v in k.basis() {
                prop_assert!(is_zero_vector(&m.mul_vec(&v)));
            }
        }

        #[test]
        fn canonical_basis_independent_of_spanning_set(vs in subspace_in(4), perm in 0usize..24) {
            let vs: Vec<Vector> = vs.iter().map(|v| v.iter().map(|x| q(*x)).collect()).collect();
            let a = Subspace::from_vectors(Q, 4, &vs);
            // a different spanning set of the same space: reversed order with
            // pairwise sums mixed in
            let mut ws: Vec<Vector> = vs.iter().rev().cloned().collect();
            if ws.len() >= 2 {
                let s = Q.vec_add(&ws[0], &ws[1]);
                ws.push(s);
            }
            let len = ws.len().max(1);
            ws.rotate_left(perm % len);
            let b = Subspace::from_vectors(Q, 4, &ws);
            prop_assert_eq!(a.basis(), b.basis());
        }

        #[test]
        fn dimension_formula(a in subspace_in(4), b in subspace_in(4)) {
            let to_v = |vs: &Vec<Vec<i64>>| -> Vec<Vector> {
                vs.iter().map(|v| v.iter().map(|x| q(*x)).collect()).collect()
            };
            let sa = Subspace::from_vectors(Q, 4, &to_v(&a));
            let sb = Subspace::from_vectors(Q, 4, &to_v(&b));
            let s = sa.sum(&sb).unwrap();
            let i = sa.intersection(&sb).unwrap();
            prop_assert_eq!(s.dim() + i.dim(), sa.dim() + sb.dim());
            prop_assert!(sa.contains_subspace(&i) && sb.contains_subspace(&i));
        }

        #[test]
        fn modular_law(a in subspace_in(3), b in subspace_in(3), c in subspace_in(3)) {
            let to_s = |vs: &Vec<Vec<i64>>| {
                let v: Vec<Vector> = vs.iter().map(|v| v.iter().map(|x| q(*x)).collect()).collect();
                Subspace::from_vectors(Q, 3, &v)
            };
            let (sa, sb, sc) = (to_s(&a), to_s(&b), to_s(&c));
            // a ⊆ c ⇒ a + (b ∩ c) = (a + b) ∩ c
            let sa = sa.intersection(&sc).unwrap();
            let lhs = sa.sum(&sb.intersection(&sc).unwrap()).unwrap();
            let rhs = sa.sum(&sb).unwrap().intersection(&sc).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn solve_finds_solutions_when_consistent((r, c, e) in small_matrix(), x in prop::collection::vec(-3i64..4, 4)) {
            let m = Matrix::from_i64(Q, r, c, &e);
            let x: Vector = x.iter().take(c).map(|v| q(*v)).chain(std::iter::repeat(q(0))).take(c).collect();
            let b = m.mul_vec(&x);
            let sol = m.solve_affine(&b).expect("consistent by construction");
            prop_assert_eq!(m.mul_vec(&sol), b);
        }
    }
}
