//! Finite-dimensional associative unital algebras in structure-constant form.

mod poly;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactlin::{is_zero_vector, FieldSpec, Matrix, Scalar, Subspace, Vector};

/// An algebra with basis `b_0..b_{n-1}`; `table[i * n + j]` holds the
/// coordinates of `b_i b_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebra {
    field: FieldSpec,
    labels: Vec<String>,
    table: Vec<Vector>,
    unit: Vector,
}

pub type AlgRef = Arc<Algebra>;

impl Algebra {
    /// Builds an algebra and checks associativity and the unit law.
    pub fn new(field: FieldSpec, labels: Vec<String>, table: Vec<Vector>, unit: Vector) -> Result<Self> {
        let alg = Self::new_unchecked(field, labels, table, unit)?;
        alg.check_associativity()?;
        alg.check_unit()?;
        Ok(alg)
    }

    fn new_unchecked(field: FieldSpec, labels: Vec<String>, table: Vec<Vector>, unit: Vector) -> Result<Self> {
        let n = labels.len();
        if table.len() != n * n {
            return Err(Error::DimensionMismatch {
                context: "structure constant table".into(),
                expected: n * n,
                found: table.len(),
            });
        }
        if let Some(bad) = table.iter().chain(std::iter::once(&unit)).find(|v| v.len() != n) {
            return Err(Error::DimensionMismatch {
                context: "structure constant vector".into(),
                expected: n,
                found: bad.len(),
            });
        }
        let norm = |v: Vector| v.into_iter().map(|x| field.normalize(x)).collect::<Vector>();
        Ok(Algebra {
            field,
            labels,
            table: table.into_iter().map(norm).collect(),
            unit: norm(unit),
        })
    }

    /// The zero ring, where `1 = 0`.
    pub fn zero_ring(field: FieldSpec) -> Self {
        Algebra {
            field,
            labels: Vec::new(),
            table: Vec::new(),
            unit: Vec::new(),
        }
    }

    /// The base field as a one-dimensional algebra.
    pub fn ground(field: FieldSpec) -> Self {
        Algebra {
            field,
            labels: vec!["1".into()],
            table: vec![vec![Scalar::one()]],
            unit: vec![Scalar::one()],
        }
    }

    /// `k^n` with orthogonal idempotent basis `e1..en`.
    pub fn field_power(field: FieldSpec, n: usize) -> Self {
        let labels = (1..=n).map(|i| format!("e{i}")).collect();
        let mut table = vec![field.zero_vector(n); n * n];
        for i in 0..n {
            table[i * n + i] = field.unit_vector(n, i);
        }
        Algebra {
            field,
            labels,
            table,
            unit: vec![Scalar::one(); n],
        }
    }

    /// `k[x]/(f)` for a monic `f` given by its coefficients, constant term
    /// first and without the leading 1.
    pub fn monogenic(field: FieldSpec, lower_coeffs: &[Scalar]) -> Result<Self> {
        let n = lower_coeffs.len();
        if n == 0 {
            return Ok(Self::zero_ring(field));
        }
        let labels = (0..n)
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            })
            .collect();
        // reduction of x^m for m < 2n - 1
        let mut powers: Vec<Vector> = (0..n).map(|i| field.unit_vector(n, i)).collect();
        for _ in n..2 * n - 1 {
            let prev = powers.last().expect("nonempty").clone();
            let mut next = field.zero_vector(n);
            for i in 1..n {
                next[i] = prev[i - 1].clone();
            }
            let top = &prev[n - 1];
            for (i, c) in lower_coeffs.iter().enumerate() {
                next[i] = field.sub(&next[i], &field.mul(top, c));
            }
            powers.push(next);
        }
        let mut table = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                table.push(powers[i + j].clone());
            }
        }
        Algebra::new(field, labels, table, field.unit_vector(n, 0))
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn is_zero_ring(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn unit(&self) -> &Vector {
        &self.unit
    }

    pub fn zero(&self) -> Vector {
        self.field.zero_vector(self.dim())
    }

    pub fn basis_element(&self, i: usize) -> Vector {
        self.field.unit_vector(self.dim(), i)
    }

    pub fn basis(&self) -> Vec<Vector> {
        (0..self.dim()).map(|i| self.basis_element(i)).collect()
    }

    pub fn structure_constant(&self, i: usize, j: usize) -> &Vector {
        &self.table[i * self.dim() + j]
    }

    pub fn table(&self) -> &[Vector] {
        &self.table
    }

    pub fn mul(&self, x: &[Scalar], y: &[Scalar]) -> Vector {
        let n = self.dim();
        let k = self.field;
        let mut out = k.zero_vector(n);
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = k.mul(a, b);
                k.vec_axpy(&mut out, &ab, &self.table[i * n + j]);
            }
        }
        out
    }

    pub fn add(&self, x: &[Scalar], y: &[Scalar]) -> Vector {
        self.field.vec_add(x, y)
    }

    pub fn sub(&self, x: &[Scalar], y: &[Scalar]) -> Vector {
        self.field.vec_sub(x, y)
    }

    pub fn scale(&self, c: &Scalar, x: &[Scalar]) -> Vector {
        self.field.vec_scale(c, x)
    }

    /// Matrix of `y ↦ x y`.
    pub fn left_mult_matrix(&self, x: &[Scalar]) -> Matrix {
        let cols: Vec<Vector> = self.basis().iter().map(|b| self.mul(x, b)).collect();
        Matrix::from_columns(self.field, self.dim(), &cols)
    }

    /// Matrix of `y ↦ y x`.
    pub fn right_mult_matrix(&self, x: &[Scalar]) -> Matrix {
        let cols: Vec<Vector> = self.basis().iter().map(|b| self.mul(b, x)).collect();
        Matrix::from_columns(self.field, self.dim(), &cols)
    }

    pub fn check_associativity(&self) -> Result<()> {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let bij = &self.table[i * n + j];
                for l in 0..n {
                    let left = self.mul(bij, &self.basis_element(l));
                    let right = self.mul(&self.basis_element(i), &self.table[j * n + l]);
                    if left != right {
                        return Err(Error::InvariantViolation(format!(
                            "associativity fails on ({}, {}, {})",
                            self.labels[i], self.labels[j], self.labels[l]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn check_unit(&self) -> Result<()> {
        for (i, b) in self.basis().iter().enumerate() {
            if &self.mul(&self.unit, b) != b || &self.mul(b, &self.unit) != b {
                return Err(Error::InvariantViolation(format!(
                    "unit law fails on {}",
                    self.labels[i]
                )));
            }
        }
        Ok(())
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| self.table[i * n + j] == self.table[j * n + i]))
    }

    pub fn opposite(&self) -> Algebra {
        let n = self.dim();
        let mut table = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                table.push(self.table[j * n + i].clone());
            }
        }
        Algebra {
            table,
            ..self.clone()
        }
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Parses a linear combination such as `e1 + 2*e2 - 1/3*x^2`. A bare
    /// scalar term means that multiple of the unit.
    pub fn parse_element(&self, s: &str) -> Result<Vector> {
        parse_linear_combination(self.field, &self.labels, Some(&self.unit), s)
    }

    pub fn format_element(&self, v: &[Scalar]) -> String {
        let k = self.field;
        let mut out = String::new();
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            // print prime-field values in the symmetric range when negative
            // reads better, e.g. p-1 as -1
            let (neg, mag) = match k {
                FieldSpec::PrimeField(p) if c * Scalar::from_integer(2.into()) > Scalar::from_integer(p.into()) => {
                    (true, k.neg(c))
                }
                FieldSpec::PrimeField(_) => (false, c.clone()),
                FieldSpec::Rationals if c < &Scalar::zero() => (true, -c.clone()),
                FieldSpec::Rationals => (false, c.clone()),
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if !mag.is_one() {
                out.push_str(&k.format_scalar(&mag));
                out.push('*');
            }
            out.push_str(&self.labels[i]);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    pub fn is_idempotent(&self, e: &[Scalar]) -> bool {
        self.mul(e, e) == e
    }

    /// `e A f` as a subspace.
    pub fn corner(&self, e: &[Scalar], f: &[Scalar]) -> Subspace {
        let vs: Vec<Vector> = self
            .basis()
            .iter()
            .map(|b| self.mul(&self.mul(e, b), f))
            .collect();
        Subspace::from_vectors(self.field, self.dim(), &vs)
    }
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "algebra over {} with basis [{}]", self.field, self.labels.join(", "))
    }
}

/// A quiver with named vertices; arrows are `(source, target, label)`.
/// Linear combination of `labels`. Bare scalars are multiples of `unit`,
/// and rejected when no unit is given.
pub fn parse_linear_combination(field: FieldSpec, labels: &[String], unit: Option<&[Scalar]>, s: &str) -> Result<Vector> {
    let k = field;
    let mut out = k.zero_vector(labels.len());
    let label_index = |l: &str| labels.iter().position(|x| x == l);
    let text = s.trim();
    if text.is_empty() {
        return Err(Error::Malformed("empty element".into()));
    }
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut negative = false;
    for ch in text.chars() {
        if (ch == '+' || ch == '-') && !cur.trim().is_empty() {
            terms.push((negative, std::mem::take(&mut cur)));
            negative = ch == '-';
        } else if (ch == '+' || ch == '-') && cur.trim().is_empty() {
            if ch == '-' {
                negative = !negative;
            }
        } else {
            cur.push(ch);
        }
    }
    if cur.trim().is_empty() {
        return Err(Error::Malformed(format!("dangling sign in `{s}`")));
    }
    terms.push((negative, cur));
    for (neg, term) in terms {
        let term = term.trim();
        let (coef, label) = match term.split_once('*') {
            Some((c, l)) => (k.parse_scalar(c)?, Some(l.trim())),
            None => match label_index(term) {
                Some(_) => (k.one(), Some(term)),
                None => (k.parse_scalar(term).map_err(|_| {
                    Error::Malformed(format!("unknown basis label `{term}`"))
                })?, None),
            },
        };
        let coef = if neg { k.neg(&coef) } else { coef };
        if coef.is_zero() {
            continue;
        }
        let vec = match label {
            Some(l) => {
                let i = label_index(l).ok_or_else(|| Error::Malformed(format!("unknown basis label `{l}`")))?;
                k.unit_vector(labels.len(), i)
            }
            None => unit
                .ok_or_else(|| Error::Malformed(format!("bare scalar `{term}` needs a unit")))?
                .to_vec(),
        };
        k.vec_axpy(&mut out, &coef, &vec);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    pub vertices: Vec<String>,
    pub arrows: Vec<(String, String, String)>,
}

impl Quiver {
    pub fn new(vertices: Vec<String>, arrows: Vec<(String, String, String)>) -> Self {
        Quiver { vertices, arrows }
    }

    fn vertex_index(&self, v: &str) -> Result<usize> {
        self.vertices
            .iter()
            .position(|x| x == v)
            .ok_or_else(|| Error::Malformed(format!("unknown quiver vertex `{v}`")))
    }
}

/// Path algebra of an acyclic quiver. Basis elements are paths ordered by
/// source vertex, then length, then arrow sequence; a path labeled `b*a`
/// traverses `a` first. The product `p·q` is `q` followed by `p` when the
/// end of `q` is the start of `p`, and 0 otherwise.
pub fn path_algebra(field: FieldSpec, q: &Quiver) -> Result<Algebra> {
    let nv = q.vertices.len();
    let mut arrows = Vec::new();
    for (s, t, l) in &q.arrows {
        arrows.push((q.vertex_index(s)?, q.vertex_index(t)?, l.clone()));
    }
    // Kahn's algorithm for cycle detection
    let mut indeg = vec![0usize; nv];
    for (_, t, _) in &arrows {
        indeg[*t] += 1;
    }
    let mut stack: Vec<usize> = (0..nv).filter(|v| indeg[*v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = stack.pop() {
        seen += 1;
        for (s, t, _) in &arrows {
            if *s == v {
                indeg[*t] -= 1;
                if indeg[*t] == 0 {
                    stack.push(*t);
                }
            }
        }
    }
    if seen < nv {
        let v = (0..nv).find(|v| indeg[*v] > 0).expect("cycle vertex");
        return Err(Error::CyclicQuiver(q.vertices[v].clone()));
    }

    // paths as (source, target, arrow indices in traversal order)
    let mut paths: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    for v in 0..nv {
        let mut layer: Vec<(usize, Vec<usize>)> = vec![(v, Vec::new())];
        let mut by_len = Vec::new();
        while !layer.is_empty() {
            by_len.push(layer.clone());
            let mut next = Vec::new();
            for (end, seq) in &layer {
                for (ai, (s, t, _)) in arrows.iter().enumerate() {
                    if s == end {
                        let mut seq2 = seq.clone();
                        seq2.push(ai);
                        next.push((*t, seq2));
                    }
                }
            }
            next.sort_by(|a, b| a.1.cmp(&b.1));
            layer = next;
        }
        for l in by_len {
            for (end, seq) in l {
                paths.push((v, end, seq));
            }
        }
    }
    let n = paths.len();
    let index: BTreeMap<(usize, Vec<usize>), usize> = paths
        .iter()
        .enumerate()
        .map(|(i, (s, _, seq))| ((*s, seq.clone()), i))
        .collect();
    let labels = paths
        .iter()
        .map(|(s, _, seq)| {
            if seq.is_empty() {
                q.vertices[*s].clone()
            } else {
                seq.iter()
                    .rev()
                    .map(|a| arrows[*a].2.as_str())
                    .collect::<Vec<_>>()
                    .join("*")
            }
        })
        .collect();
    let mut table = vec![field.zero_vector(n); n * n];
    for (i, (ps, pt, pseq)) in paths.iter().enumerate() {
        for (j, (qs, qt, qseq)) in paths.iter().enumerate() {
            if qt != ps {
                continue;
            }
            let _ = pt;
            let mut seq = qseq.clone();
            seq.extend(pseq.iter().copied());
            let r = index[&(*qs, seq)];
            table[i * n + j] = field.unit_vector(n, r);
        }
    }
    let mut unit = field.zero_vector(n);
    for v in 0..nv {
        unit[index[&(v, Vec::new())]] = Scalar::one();
    }
    Algebra::new(field, labels, table, unit)
}

/// `M_n(k)` with basis `E_ij` in row-major order.
pub fn matrix_algebra(field: FieldSpec, n: usize) -> Result<Algebra> {
    if n == 0 {
        return Err(Error::Malformed("matrix algebra needs n >= 1".into()));
    }
    let d = n * n;
    let label = |i: usize, j: usize| {
        if n < 10 {
            format!("E{}{}", i + 1, j + 1)
        } else {
            format!("E{}_{}", i + 1, j + 1)
        }
    };
    let labels = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| label(i, j))
        .collect();
    let mut table = vec![field.zero_vector(d); d * d];
    for a in 0..d {
        let (i, j) = (a / n, a % n);
        for b in 0..d {
            let (kk, l) = (b / n, b % n);
            if j == kk {
                table[a * d + b] = field.unit_vector(d, i * n + l);
            }
        }
    }
    let mut unit = field.zero_vector(d);
    for i in 0..n {
        unit[i * n + i] = Scalar::one();
    }
    Algebra::new(field, labels, table, unit)
}

/// `A × B` with basis `a_i` followed by `b_j`; labels get `_1` and `_2`
/// suffixes.
pub fn product_algebra(a: &Algebra, b: &Algebra) -> Result<Algebra> {
    if a.field != b.field {
        return Err(Error::FieldMismatch(a.field, b.field));
    }
    let k = a.field;
    let (m, n) = (a.dim(), b.dim());
    let d = m + n;
    let labels = a
        .labels
        .iter()
        .map(|l| format!("{l}_1"))
        .chain(b.labels.iter().map(|l| format!("{l}_2")))
        .collect();
    let mut table = vec![k.zero_vector(d); d * d];
    for i in 0..m {
        for j in 0..m {
            let mut v = k.zero_vector(d);
            v[..m].clone_from_slice(a.structure_constant(i, j));
            table[i * d + j] = v;
        }
    }
    for i in 0..n {
        for j in 0..n {
            let mut v = k.zero_vector(d);
            v[m..].clone_from_slice(b.structure_constant(i, j));
            table[(m + i) * d + m + j] = v;
        }
    }
    let mut unit = a.unit.clone();
    unit.extend(b.unit.iter().cloned());
    Algebra::new(k, labels, table, unit)
}

/// Two-sided ideal generated by `gens`.
pub fn ideal_closure(a: &Algebra, gens: &[Vector]) -> Subspace {
    let mut ideal = Subspace::zero(a.field, a.dim());
    let mut queue: Vec<Vector> = gens.to_vec();
    let basis = a.basis();
    while let Some(v) = queue.pop() {
        if !ideal.add_vector(&v) {
            continue;
        }
        for b in &basis {
            queue.push(a.mul(b, &v));
            queue.push(a.mul(&v, b));
        }
    }
    ideal
}

/// `A/I` for the ideal generated by `gens`, with the projection. The
/// quotient keeps the labels of those basis elements of `A` that are not
/// pivots of the ideal's echelon basis.
pub fn quotient_algebra(a: &AlgRef, gens: &[Vector]) -> Result<(AlgRef, AlgebraMorphism)> {
    let ideal = ideal_closure(a, gens);
    quotient_by_ideal(a, &ideal)
}

pub fn quotient_by_ideal(a: &AlgRef, ideal: &Subspace) -> Result<(AlgRef, AlgebraMorphism)> {
    let keep = ideal.complement_indices();
    let n = keep.len();
    let labels = keep.iter().map(|i| a.labels[*i].clone()).collect();
    let mut table = Vec::with_capacity(n * n);
    for &i in &keep {
        for &j in &keep {
            table.push(ideal.project(a.structure_constant(i, j)));
        }
    }
    let unit = ideal.project(&a.unit);
    let q = Arc::new(Algebra::new(a.field, labels, table, unit)?);
    let cols: Vec<Vector> = a.basis().iter().map(|b| ideal.project(b)).collect();
    let m = Matrix::from_columns(a.field, n, &cols);
    let proj = AlgebraMorphism::new(a.clone(), q.clone(), m)?;
    Ok((q, proj))
}

fn check_radical_field(a: &Algebra) -> Result<()> {
    match a.field {
        FieldSpec::Rationals => Ok(()),
        FieldSpec::PrimeField(p) if (p as u128) > a.dim() as u128 => Ok(()),
        f => Err(Error::UnsupportedField { field: f, dim: a.dim() }),
    }
}

/// Jacobson radical, as the kernel of the trace form `(x, y) ↦ tr(L_{xy})`.
pub fn radical(a: &Algebra) -> Result<Subspace> {
    check_radical_field(a)?;
    let n = a.dim();
    let k = a.field;
    let traces: Vec<Scalar> = (0..n)
        .map(|i| {
            let mut t = Scalar::zero();
            for j in 0..n {
                t += &a.structure_constant(i, j)[j];
            }
            k.normalize(t)
        })
        .collect();
    let mut gram = Matrix::zeros(k, n, n);
    for i in 0..n {
        for j in 0..n {
            gram.set(i, j, k.dot(a.structure_constant(i, j), &traces));
        }
    }
    Ok(gram.kernel_basis())
}

/// Coordinates of the powers `x^0 = e, x, x^2, …` until the first linear
/// dependence; returns the monic minimal polynomial of `x` in the corner
/// with unit `e`.
fn minimal_polynomial(a: &Algebra, e: &[Scalar], x: &[Scalar]) -> poly::Poly {
    let k = a.field;
    let mut powers: Vec<Vector> = vec![e.to_vec()];
    loop {
        let next = a.mul(powers.last().expect("nonempty"), x);
        let m = Matrix::from_columns(k, a.dim(), &powers);
        if let Some(c) = m.solve_affine(&next) {
            let mut p: poly::Poly = c.iter().map(|v| k.neg(v)).collect();
            p.push(Scalar::one());
            return p;
        }
        powers.push(next);
    }
}

fn eval_in_corner(a: &Algebra, e: &[Scalar], p: &poly::Poly, x: &[Scalar]) -> Vector {
    let k = a.field;
    let mut acc = a.zero();
    for c in p.iter().rev() {
        acc = a.mul(&acc, x);
        k.vec_axpy(&mut acc, c, e);
    }
    acc
}

/// A nontrivial idempotent `E` of the corner `eSe` from an element whose
/// minimal polynomial has a root and a coprime cofactor.
fn split_by_element(s: &Algebra, e: &[Scalar], x: &[Scalar]) -> Option<Vector> {
    let k = s.field;
    let m = minimal_polynomial(s, e, x);
    for lambda in poly::roots(k, &m) {
        let (mult, g) = poly::split_root(k, &m, &lambda);
        if poly::degree(&g).is_none_or(|d| d == 0) {
            continue;
        }
        let h = poly::linear_power(k, &lambda, mult);
        let (gcd, _u, v) = poly::ext_gcd(k, &h, &g);
        debug_assert_eq!(poly::degree(&gcd), Some(0));
        let vg = poly::mul(k, &v, &g);
        let idem = eval_in_corner(s, e, &vg, x);
        if s.is_idempotent(&idem) && !is_zero_vector(&idem) && idem != e {
            return Some(idem);
        }
    }
    None
}

fn corner_candidates(s: &Algebra, e: &[Scalar]) -> Vec<Vector> {
    let k = s.field;
    let n = s.dim();
    let sandwich = |v: &Vector| s.mul(&s.mul(e, v), e);
    let mut out: Vec<Vector> = s.basis().iter().map(sandwich).collect();
    for i in 0..n {
        for j in i + 1..n {
            for c in [1i64, 2] {
                let mut v = s.basis_element(i);
                k.vec_axpy(&mut v, &k.from_i64(c), &s.basis_element(j));
                out.push(sandwich(&v));
            }
        }
    }
    for shift in 1..4i64 {
        let v: Vector = (0..n)
            .map(|i| k.from_i64((i as i64 + shift).pow(2) % 97 + 1))
            .collect();
        out.push(sandwich(&v));
    }
    out
}

/// Complete family of primitive orthogonal idempotents of a semisimple
/// algebra inside the corner of `e`.
fn split_semisimple(s: &Algebra, e: Vector, out: &mut Vec<Vector>) -> Result<()> {
    let corner = s.corner(&e, &e);
    if corner.dim() <= 1 {
        out.push(e);
        return Ok(());
    }
    for x in corner_candidates(s, &e) {
        if let Some(idem) = split_by_element(s, &e, &x) {
            let rest = s.sub(&e, &idem);
            split_semisimple(s, idem, out)?;
            split_semisimple(s, rest, out)?;
            return Ok(());
        }
    }
    // a split simple corner of dimension > 1 is a full matrix algebra, and
    // then some matrix unit combination has two distinct eigenvalues; a
    // division algebra has none
    Err(Error::NonSplit(format!(
        "corner of {} of dimension {} has no split idempotent",
        s.format_element(&e),
        corner.dim()
    )))
}

/// Lifts an idempotent modulo a nilpotent ideal by `x ↦ 3x² − 2x³`.
fn lift_idempotent(a: &Algebra, mut x: Vector) -> Result<Vector> {
    let k = a.field;
    for _ in 0..128 {
        let x2 = a.mul(&x, &x);
        if x2 == x {
            return Ok(x);
        }
        let x3 = a.mul(&x2, &x);
        x = k.vec_sub(&k.vec_scale(&k.from_i64(3), &x2), &k.vec_scale(&k.from_i64(2), &x3));
    }
    Err(Error::InvariantViolation("idempotent lift did not stabilize".into()))
}

/// A complete set of orthogonal primitive idempotents summing to 1, sorted
/// by coordinate vector in descending lexicographic order.
pub fn primitive_idempotents(a: &AlgRef) -> Result<Vec<Vector>> {
    if a.is_zero_ring() {
        return Ok(Vec::new());
    }
    let rad = radical(a)?;
    let (s, proj) = quotient_by_ideal(a, &rad)?;
    let mut bar = Vec::new();
    split_semisimple(&s, s.unit.clone(), &mut bar)?;
    let keep = rad.complement_indices();
    let preimage = |v: &Vector| {
        let mut out = a.zero();
        for (c, i) in v.iter().zip(&keep) {
            out[*i] = c.clone();
        }
        out
    };
    let mut lifted: Vec<Vector> = Vec::new();
    let mut remaining = a.unit.clone();
    for (idx, eb) in bar.iter().enumerate() {
        let f = if idx + 1 == bar.len() {
            remaining.clone()
        } else {
            let y = a.mul(&a.mul(&remaining, &preimage(eb)), &remaining);
            lift_idempotent(a, y)?
        };
        debug_assert_eq!(&proj.apply(&f), eb);
        remaining = a.sub(&remaining, &f);
        lifted.push(f);
    }
    lifted.sort_by(|x, y| y.cmp(x));
    Ok(lifted)
}

/// A unital algebra homomorphism, stored as a `target.dim × source.dim`
/// matrix acting on coordinate columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraMorphism {
    source: AlgRef,
    target: AlgRef,
    matrix: Matrix,
}

impl AlgebraMorphism {
    pub fn new(source: AlgRef, target: AlgRef, matrix: Matrix) -> Result<Self> {
        let m = Self::new_unchecked(source, target, matrix)?;
        m.check()?;
        Ok(m)
    }

    fn new_unchecked(source: AlgRef, target: AlgRef, matrix: Matrix) -> Result<Self> {
        if source.field != target.field {
            return Err(Error::FieldMismatch(source.field, target.field));
        }
        if matrix.rows() != target.dim() || matrix.cols() != source.dim() {
            return Err(Error::DimensionMismatch {
                context: "morphism matrix".into(),
                expected: target.dim() * source.dim(),
                found: matrix.rows() * matrix.cols(),
            });
        }
        Ok(AlgebraMorphism {
            source,
            target,
            matrix,
        })
    }

    /// Builds the morphism from the images of the source basis elements.
    pub fn from_images(source: AlgRef, target: AlgRef, images: &[Vector]) -> Result<Self> {
        if images.len() != source.dim() {
            return Err(Error::DimensionMismatch {
                context: "morphism images".into(),
                expected: source.dim(),
                found: images.len(),
            });
        }
        let m = Matrix::from_columns(source.field, target.dim(), images);
        AlgebraMorphism::new(source, target, m)
    }

    pub fn identity(a: AlgRef) -> Self {
        let m = Matrix::identity(a.field, a.dim());
        AlgebraMorphism {
            source: a.clone(),
            target: a,
            matrix: m,
        }
    }

    /// The unique map to the zero ring.
    pub fn to_zero(a: AlgRef) -> Self {
        let z = Arc::new(Algebra::zero_ring(a.field));
        let m = Matrix::zeros(a.field, 0, a.dim());
        AlgebraMorphism {
            source: a,
            target: z,
            matrix: m,
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.apply(&self.source.unit) != self.target.unit {
            return Err(Error::InvariantViolation("morphism is not unital".into()));
        }
        let n = self.source.dim();
        let images: Vec<Vector> = (0..n).map(|i| self.matrix.column(i)).collect();
        for i in 0..n {
            for j in 0..n {
                let lhs = self.apply(self.source.structure_constant(i, j));
                let rhs = self.target.mul(&images[i], &images[j]);
                if lhs != rhs {
                    return Err(Error::InvariantViolation(format!(
                        "morphism not multiplicative on ({}, {})",
                        self.source.labels[i], self.source.labels[j]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &AlgRef {
        &self.source
    }

    pub fn target(&self) -> &AlgRef {
        &self.target
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn apply(&self, v: &[Scalar]) -> Vector {
        self.matrix.mul_vec(v)
    }

    pub fn image_of_basis(&self, i: usize) -> Vector {
        self.matrix.column(i)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &AlgebraMorphism) -> Result<AlgebraMorphism> {
        if *self.target != *other.source {
            return Err(Error::AlgebraMismatch("composition of morphisms".into()));
        }
        Ok(AlgebraMorphism {
            source: self.source.clone(),
            target: other.target.clone(),
            matrix: other.matrix.mul(&self.matrix),
        })
    }

    pub fn is_injective(&self) -> bool {
        self.matrix.rank() == self.source.dim()
    }

    pub fn is_surjective(&self) -> bool {
        self.matrix.rank() == self.target.dim()
    }

    pub fn kernel(&self) -> Subspace {
        self.matrix.kernel_basis()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) const Q: FieldSpec = FieldSpec::Rationals;

    pub(crate) fn ka2() -> AlgRef {
        let q = Quiver::new(
            vec!["e1".into(), "e3".into()],
            vec![("e1".into(), "e3".into(), "e2".into())],
        );
        Arc::new(path_algebra(Q, &q).unwrap())
    }

    fn dual_numbers() -> AlgRef {
        Arc::new(Algebra::monogenic(Q, &[Q.zero(), Q.zero()]).unwrap())
    }

    #[test]
    fn path_algebra_examples() {
        let a = ka2();
        assert_eq!(a.labels(), ["e1", "e2", "e3"]);
        // oracle: lower triangular 2x2 matrices with e1 = E11, e2 = E21, e3 = E22
        let m2 = matrix_algebra(Q, 2).unwrap();
        let emb = [m2.basis_element(0), m2.basis_element(2), m2.basis_element(3)];
        for i in 0..3 {
            for j in 0..3 {
                let prod = a.structure_constant(i, j);
                let mut image = m2.zero();
                for (c, e) in prod.iter().zip(&emb) {
                    Q.vec_axpy(&mut image, c, e);
                }
                assert_eq!(image, m2.mul(&emb[i], &emb[j]));
            }
        }
        let kron = Quiver::new(
            vec!["a".into(), "b".into()],
            vec![
                ("a".into(), "b".into(), "x".into()),
                ("a".into(), "b".into(), "y".into()),
            ],
        );
        assert_eq!(path_algebra(Q, &kron).unwrap().dim(), 4);
        let point = Quiver::new(vec!["v".into()], vec![]);
        assert_eq!(path_algebra(Q, &point).unwrap(), {
            let mut g = Algebra::ground(Q);
            g.labels = vec!["v".into()];
            g
        });
        let cyc = Quiver::new(vec!["v".into()], vec![("v".into(), "v".into(), "l".into())]);
        assert!(matches!(path_algebra(Q, &cyc), Err(Error::CyclicQuiver(_))));
    }

    #[test]
    fn longer_paths_compose() {
        let q = Quiver::new(
            vec!["1".into(), "2".into(), "3".into()],
            vec![
                ("1".into(), "2".into(), "a".into()),
                ("2".into(), "3".into(), "b".into()),
            ],
        );
        let a = path_algebra(Q, &q).unwrap();
        assert_eq!(a.dim(), 6);
        let ia = a.label_index("a").unwrap();
        let ib = a.label_index("b").unwrap();
        let iba = a.label_index("b*a").unwrap();
        assert_eq!(a.structure_constant(ib, ia), &a.basis_element(iba));
        assert!(is_zero_vector(a.structure_constant(ia, ib)));
    }

    #[test]
    fn matrix_algebra_examples() {
        assert_eq!(matrix_algebra(Q, 1).unwrap().dim(), 1);
        let m = matrix_algebra(Q, 2).unwrap();
        assert_eq!(m.dim(), 4);
        let e12 = m.parse_element("E12").unwrap();
        let e21 = m.parse_element("E21").unwrap();
        assert_eq!(m.mul(&e12, &e21), m.parse_element("E11").unwrap());
        let f3 = FieldSpec::prime(3).unwrap();
        let m3 = matrix_algebra(f3, 2).unwrap();
        let x = m3.parse_element("2*E11").unwrap();
        assert_eq!(m3.mul(&x, &x), m3.parse_element("E11").unwrap());
    }

    #[test]
    fn product_examples() {
        let k = Algebra::ground(Q);
        let kk = product_algebra(&k, &k).unwrap();
        assert_eq!(kk.dim(), 2);
        let (e, f) = (kk.basis_element(0), kk.basis_element(1));
        assert!(kk.is_idempotent(&e) && kk.is_idempotent(&f));
        assert!(is_zero_vector(&kk.mul(&e, &f)));
        let z = Algebra::zero_ring(Q);
        assert_eq!(product_algebra(&kk, &z).unwrap().dim(), 2);
        assert_eq!(product_algebra(&kk, &k).unwrap().dim(), 3);
        let f5 = Algebra::ground(FieldSpec::prime(5).unwrap());
        assert!(product_algebra(&k, &f5).is_err());
    }

    #[test]
    fn quotient_examples() {
        let a = ka2();
        let (p1, proj) = quotient_algebra(&a, &[a.basis_element(0), a.basis_element(1)]).unwrap();
        assert_eq!(p1.labels(), ["e3"]);
        assert_eq!(proj.apply(&a.basis_element(2)), p1.unit().clone());
        let (s2, proj) = quotient_algebra(&a, &[a.basis_element(1), a.basis_element(2)]).unwrap();
        assert_eq!(s2.labels(), ["e1"]);
        assert_eq!(proj.apply(&a.basis_element(0)), s2.unit().clone());
        let (z, _) = quotient_algebra(&a, &[a.unit().clone()]).unwrap();
        assert!(z.is_zero_ring());
    }

    #[test]
    fn iterated_quotients_agree() {
        let a = Arc::new(matrix_algebra(Q, 2).unwrap()) as AlgRef;
        let b = Arc::new(product_algebra(&a, &Algebra::field_power(Q, 2)).unwrap()) as AlgRef;
        let i = vec![b.basis_element(4)];
        let j = vec![b.basis_element(5)];
        let (bi, p) = quotient_algebra(&b, &i).unwrap();
        let (bij, _) = quotient_algebra(&bi, &[p.apply(&j[0])]).unwrap();
        let (direct, _) = quotient_algebra(&b, &[i[0].clone(), j[0].clone()]).unwrap();
        assert_eq!(bij, direct);
    }

    #[test]
    fn radical_examples() {
        assert_eq!(radical(&matrix_algebra(Q, 2).unwrap()).unwrap().dim(), 0);
        let d = dual_numbers();
        let r = radical(&d).unwrap();
        assert_eq!(r.basis(), vec![d.parse_element("x").unwrap()]);
        let a = ka2();
        assert_eq!(radical(&a).unwrap().basis(), vec![a.basis_element(1)]);
        let f2 = FieldSpec::prime(2).unwrap();
        assert!(matches!(
            radical(&matrix_algebra(f2, 2).unwrap()),
            Err(Error::UnsupportedField { .. })
        ));
    }

    #[test]
    fn radical_is_nilpotent_ideal() {
        for a in [ka2(), dual_numbers()] {
            let r = radical(&a).unwrap();
            assert_eq!(ideal_closure(&a, &r.basis()), r);
            let mut power = r.basis();
            for _ in 0..a.dim() {
                let mut next = Vec::new();
                for x in &power {
                    for y in r.basis() {
                        next.push(a.mul(x, &y));
                    }
                }
                power = next;
            }
            assert!(power.iter().all(|v| is_zero_vector(v)));
        }
    }

    fn check_idempotent_family(a: &Algebra, es: &[Vector]) {
        let mut sum = a.zero();
        for (i, e) in es.iter().enumerate() {
            assert!(a.is_idempotent(e));
            for (j, f) in es.iter().enumerate() {
                if i != j {
                    assert!(is_zero_vector(&a.mul(e, f)));
                }
            }
            sum = a.add(&sum, e);
        }
        assert_eq!(&sum, a.unit());
    }

    #[test]
    fn idempotent_examples() {
        let a = ka2();
        assert_eq!(primitive_idempotents(&a).unwrap(), vec![a.basis_element(0), a.basis_element(2)]);
        let kk: AlgRef = Arc::new(Algebra::field_power(Q, 2));
        assert_eq!(primitive_idempotents(&kk).unwrap(), vec![kk.basis_element(0), kk.basis_element(1)]);
        let m: AlgRef = Arc::new(matrix_algebra(Q, 2).unwrap());
        let es = primitive_idempotents(&m).unwrap();
        assert_eq!(es, vec![m.basis_element(0), m.basis_element(3)]);
        let m3: AlgRef = Arc::new(matrix_algebra(Q, 3).unwrap());
        let es = primitive_idempotents(&m3).unwrap();
        assert_eq!(es.len(), 3);
        check_idempotent_family(&m3, &es);
    }

    #[test]
    fn idempotents_of_non_basic_algebra() {
        // a triangular block algebra: upper triangular 3x3 matrices
        let m3 = matrix_algebra(Q, 3).unwrap();
        let keep = ["E11", "E12", "E13", "E22", "E23", "E33"];
        let idx: Vec<usize> = keep.iter().map(|l| m3.label_index(l).unwrap()).collect();
        let n = idx.len();
        let mut table = Vec::new();
        for &i in &idx {
            for &j in &idx {
                let full = m3.structure_constant(i, j);
                table.push(idx.iter().map(|c| full[*c].clone()).collect());
            }
        }
        let unit = idx.iter().map(|c| m3.unit()[*c].clone()).collect();
        let t: AlgRef = Arc::new(
            Algebra::new(Q, keep.iter().map(|s| s.to_string()).collect(), table, unit).unwrap(),
        );
        let es = primitive_idempotents(&t).unwrap();
        assert_eq!(es.len(), 3);
        check_idempotent_family(&t, &es);
        assert_eq!(radical(&t).unwrap().dim(), n - 3);
    }

    #[test]
    fn non_split_is_reported() {
        // Q[x]/(x^2 - 2) is a field that does not split
        let f: AlgRef = Arc::new(Algebra::monogenic(Q, &[Q.from_i64(-2), Q.zero()]).unwrap());
        assert!(matches!(primitive_idempotents(&f), Err(Error::NonSplit(_))));
        // Q[x]/(x^2 - x) splits
        let g: AlgRef = Arc::new(Algebra::monogenic(Q, &[Q.zero(), Q.from_i64(-1)]).unwrap());
        let es = primitive_idempotents(&g).unwrap();
        check_idempotent_family(&g, &es);
        assert_eq!(es.len(), 2);
    }

    #[test]
    fn morphism_checks() {
        let a = ka2();
        let m2: AlgRef = Arc::new(matrix_algebra(Q, 2).unwrap());
        let inc = AlgebraMorphism::from_images(
            a.clone(),
            m2.clone(),
            &[m2.basis_element(0), m2.basis_element(2), m2.basis_element(3)],
        )
        .unwrap();
        assert!(inc.is_injective() && !inc.is_surjective());
        let wrong = AlgebraMorphism::from_images(
            a.clone(),
            m2.clone(),
            &[m2.basis_element(0), m2.basis_element(1), m2.basis_element(3)],
        );
        assert!(wrong.is_err());
        let id = AlgebraMorphism::identity(a.clone());
        assert_eq!(id.then(&inc).unwrap(), inc);
        assert!(AlgebraMorphism::to_zero(a).check().is_ok());
    }

    #[test]
    fn element_syntax() {
        let m = matrix_algebra(Q, 2).unwrap();
        let v = m.parse_element("E11 - 1/2*E12 + 3").unwrap();
        assert_eq!(m.format_element(&v), "4*E11 - 1/2*E12 + 3*E22");
        assert_eq!(m.parse_element(&m.format_element(&v)).unwrap(), v);
        assert_eq!(m.format_element(&m.zero()), "0");
        assert!(m.parse_element("E31").is_err());
    }

    #[test]
    fn opposite_reverses_products() {
        let a = ka2();
        let op = a.opposite();
        assert!(op.check_associativity().is_ok());
        assert_eq!(op.mul(&a.basis_element(0), &a.basis_element(1)), a.basis_element(1));
    }
}
