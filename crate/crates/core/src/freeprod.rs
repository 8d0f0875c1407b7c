//! Amalgamated free products `B ∗_A C` of finite-dimensional algebras, by
//! degree-truncated linear closure of the relation ideal.
//!
//! Elements of the free product `B ∗_k C` are written in the normal form
//! of alternating words in letters from complements `B̄`, `C̄` of the units.
//! The ideal generated by `f(a) − g(a)` is approximated by the spans `K_D`
//! of all `u · r · v` with `|u| + |v| ≤ D − 1`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::algcore::{AlgRef, Algebra, AlgebraMorphism};
use crate::error::{Error, Result};
use crate::exactlin::{solve_sparse_system, Echelon, FieldSpec, Matrix, Scalar, SparseVec, Subspace, Vector};
use crate::modhom::{tensor_over, Bimodule};

pub const DEFAULT_DEGREE_CAP: usize = 8;

/// Upper bound on the number of words the engine will index.
const WORD_LIMIT: usize = 60_000;

type Letter = u16;
type Word = Vec<Letter>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeLog {
    pub degree: usize,
    pub words: usize,
    pub relation_rank: usize,
    pub quotient_dim: usize,
    /// Smallest word length `D` such that every word of length `D` is
    /// congruent to shorter ones modulo the relations found so far.
    pub reduced_word_degree: Option<usize>,
}

/// One generator `c · u r_a v` of a unit certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateTerm {
    pub left: Vec<String>,
    pub relation: usize,
    pub right: Vec<String>,
    pub coefficient: Scalar,
}

/// Expresses `1` as a combination of `u · (f(a) − g(a)) · v`. Empty
/// `terms` with `degree = 0` means one of the factors is already the zero
/// ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroCertificate {
    pub degree: usize,
    pub terms: Vec<CertificateTerm>,
}

#[derive(Clone, Debug)]
pub struct PushoutMaps {
    pub from_base: AlgebraMorphism,
    pub from_left: AlgebraMorphism,
    pub from_right: AlgebraMorphism,
}

#[derive(Clone, Debug)]
pub enum FreeProductStatus {
    Zero,
    FiniteDim { algebra: AlgRef, stabilized_at: usize },
    Truncated { dims: Vec<usize> },
    Undetermined,
}

impl FreeProductStatus {
    pub fn name(&self) -> &'static str {
        match self {
            FreeProductStatus::Zero => "zero",
            FreeProductStatus::FiniteDim { .. } => "finite-dim",
            FreeProductStatus::Truncated { .. } => "truncated",
            FreeProductStatus::Undetermined => "undetermined",
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            FreeProductStatus::Zero => Some(0),
            FreeProductStatus::FiniteDim { algebra, .. } => Some(algebra.dim()),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FreeProductResult {
    pub status: FreeProductStatus,
    pub degree_cap: usize,
    pub log: Vec<DegreeLog>,
    pub certificate: Option<ZeroCertificate>,
    pub maps: Option<PushoutMaps>,
}

impl FreeProductResult {
    pub fn is_zero(&self) -> bool {
        matches!(self.status, FreeProductStatus::Zero)
    }
}

struct Factor {
    letters: Vec<usize>,
    unit_idx: usize,
}

impl Factor {
    fn new(alg: &Algebra) -> Self {
        let unit_idx = alg
            .unit()
            .iter()
            .position(|c| !c.is_zero())
            .expect("nonzero unit");
        Factor {
            letters: (0..alg.dim()).filter(|i| *i != unit_idx).collect(),
            unit_idx,
        }
    }

    /// `v = λ·1 + Σ c_i x_i` over the letters.
    fn decompose(&self, k: FieldSpec, alg: &Algebra, v: &[Scalar]) -> (Scalar, Vec<Scalar>) {
        let lambda = k.div(&v[self.unit_idx], &alg.unit()[self.unit_idx]).expect("unit entry");
        let rest = k.vec_sub(v, &k.vec_scale(&lambda, alg.unit()));
        (lambda, self.letters.iter().map(|i| rest[*i].clone()).collect())
    }
}

struct Engine {
    field: FieldSpec,
    nb: usize,
    names: Vec<String>,
    /// `table[x * L + y]` for letters on the same side: `x y = λ + Σ c z`.
    table: Vec<Option<(Scalar, Vec<(Letter, Scalar)>)>>,
    words: Vec<Word>,
    index: HashMap<Word, usize>,
    cap: usize,
}

impl Engine {
    fn new(b: &Algebra, fb: &Factor, c: &Algebra, fc: &Factor, cap: usize) -> Self {
        let k = b.field();
        let nb = fb.letters.len();
        let nl = nb + fc.letters.len();
        let mut names: Vec<String> = fb.letters.iter().map(|i| b.labels()[*i].clone()).collect();
        for i in &fc.letters {
            let mut n = c.labels()[*i].clone();
            while names.contains(&n) {
                n.push('\'');
            }
            names.push(n);
        }
        let mut table = vec![None; nl * nl];
        for (alg, f, off) in [(b, fb, 0usize), (c, fc, nb)] {
            for (x, bx) in f.letters.iter().enumerate() {
                for (y, by) in f.letters.iter().enumerate() {
                    let (lambda, rest) = f.decompose(k, alg, alg.structure_constant(*bx, *by));
                    let zs = rest
                        .into_iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(z, c)| ((off + z) as Letter, c))
                        .collect();
                    table[(off + x) * nl + off + y] = Some((lambda, zs));
                }
            }
        }
        // words up to the cap, longest first
        let mut layers: Vec<Vec<Word>> = vec![vec![Vec::new()]];
        let mut total = 1;
        let mut cap_eff = 0;
        for d in 1..=cap {
            let prev = layers.last().expect("layer");
            let mut next = Vec::new();
            for w in prev {
                for l in 0..nl as Letter {
                    let ok = match w.last() {
                        None => true,
                        Some(&last) => ((last as usize) < nb) != ((l as usize) < nb),
                    };
                    if ok {
                        let mut w2 = w.clone();
                        w2.push(l);
                        next.push(w2);
                    }
                }
            }
            if next.is_empty() || total + next.len() > WORD_LIMIT {
                if !next.is_empty() {
                    break;
                }
                cap_eff = d;
                layers.push(next);
                continue;
            }
            total += next.len();
            cap_eff = d;
            layers.push(next);
        }
        let words: Vec<Word> = layers.into_iter().rev().flatten().collect();
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        Engine {
            field: k,
            nb,
            names,
            table,
            words,
            index,
            cap: cap_eff,
        }
    }

    fn nletters(&self) -> usize {
        self.names.len()
    }

    fn is_b(&self, l: Letter) -> bool {
        (l as usize) < self.nb
    }

    fn empty_col(&self) -> usize {
        self.words.len() - 1
    }

    fn mul_words(&self, a: &[Letter], b: &[Letter], coef: &Scalar, out: &mut HashMap<Word, Scalar>) {
        if coef.is_zero() {
            return;
        }
        let merge = match (a.last(), b.first()) {
            (Some(&x), Some(&y)) if self.is_b(x) == self.is_b(y) => Some((x, y)),
            _ => None,
        };
        let k = self.field;
        match merge {
            None => {
                let mut w = a.to_vec();
                w.extend_from_slice(b);
                let e = out.entry(w).or_insert_with(Scalar::zero);
                *e = k.add(e, coef);
            }
            Some((x, y)) => {
                let (lambda, zs) = self.table[x as usize * self.nletters() + y as usize]
                    .as_ref()
                    .expect("same-side product");
                let (a0, b0) = (&a[..a.len() - 1], &b[1..]);
                self.mul_words(a0, b0, &k.mul(coef, lambda), out);
                for (z, c) in zs {
                    let mut w = a0.to_vec();
                    w.push(*z);
                    w.extend_from_slice(b0);
                    let e = out.entry(w).or_insert_with(Scalar::zero);
                    *e = k.axpy(e, coef, c);
                }
            }
        }
    }

    fn to_cols(&self, m: HashMap<Word, Scalar>) -> Option<SparseVec> {
        let mut out = SparseVec::new();
        for (w, c) in m {
            if c.is_zero() {
                continue;
            }
            out.insert(*self.index.get(&w)?, c);
        }
        Some(out)
    }

    /// `u · v · w` for words `u`, `w` and an element `v` in column form.
    fn sandwich(&self, u: &[Letter], v: &SparseVec, w: &[Letter]) -> Option<SparseVec> {
        let mut left = HashMap::new();
        for (col, c) in v {
            self.mul_words(u, &self.words[*col], c, &mut left);
        }
        let mut out = HashMap::new();
        for (word, c) in left {
            self.mul_words(&word, w, &c, &mut out);
        }
        self.to_cols(out)
    }

    fn word_len(&self, col: usize) -> usize {
        self.words[col].len()
    }

    fn word_names(&self, w: &[Letter]) -> Vec<String> {
        w.iter().map(|l| self.names[*l as usize].clone()).collect()
    }

    fn word_label(&self, w: &[Letter]) -> String {
        if w.is_empty() {
            "1".into()
        } else {
            self.word_names(w).join("*")
        }
    }

    fn parse_word(&self, names: &[String]) -> Option<Word> {
        names
            .iter()
            .map(|n| self.names.iter().position(|m| m == n).map(|i| i as Letter))
            .collect()
    }

    fn words_up_to(&self, d: usize) -> impl Iterator<Item = &Word> {
        self.words.iter().filter(move |w| w.len() <= d)
    }
}

struct Problem {
    k: FieldSpec,
    f: AlgebraMorphism,
    g: AlgebraMorphism,
    fb: Factor,
    fc: Factor,
    engine: Engine,
    relations: Vec<SparseVec>,
}

impl Problem {
    fn new(f: &AlgebraMorphism, g: &AlgebraMorphism, cap: usize) -> Self {
        let b = f.target();
        let c = g.target();
        let k = b.field();
        let fb = Factor::new(b);
        let fc = Factor::new(c);
        let engine = Engine::new(b, &fb, c, &fc, cap);
        let mut relations = Vec::new();
        for i in 0..f.source().dim() {
            let (lb, xb) = fb.decompose(k, b, &f.image_of_basis(i));
            let (lc, xc) = fc.decompose(k, c, &g.image_of_basis(i));
            let mut m = HashMap::new();
            m.insert(Vec::new(), k.sub(&lb, &lc));
            for (x, v) in xb.into_iter().enumerate() {
                m.insert(vec![x as Letter], v);
            }
            for (x, v) in xc.into_iter().enumerate() {
                m.insert(vec![(engine.nb + x) as Letter], k.neg(&v));
            }
            relations.push(engine.to_cols(m).expect("degree one words"));
        }
        Problem {
            k,
            f: f.clone(),
            g: g.clone(),
            fb,
            fc,
            engine,
            relations,
        }
    }
}

/// Operators of letters on `V = F_D / K_D`, indexed by the non-pivot words.
struct Representation {
    basis_cols: Vec<usize>,
    letter_ops: Vec<Matrix>,
}

fn representation(p: &Problem, ech: &Echelon, d: usize) -> Option<Representation> {
    let e = &p.engine;
    let basis_cols: Vec<usize> = (0..e.words.len())
        .filter(|c| e.word_len(*c) <= d && !ech.is_pivot(*c))
        .collect();
    if basis_cols.iter().any(|c| e.word_len(*c) >= d && d > 0) {
        return None;
    }
    let pos: HashMap<usize, usize> = basis_cols.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let n = basis_cols.len();
    let mut letter_ops = Vec::with_capacity(e.nletters());
    for l in 0..e.nletters() as Letter {
        let mut m = Matrix::zeros(p.k, n, n);
        for (j, col) in basis_cols.iter().enumerate() {
            let mut single = SparseVec::new();
            single.insert(*col, Scalar::one());
            let prod = e.sandwich(&[l], &single, &[])?;
            for (c, v) in ech.reduce(prod) {
                let i = *pos.get(&c)?;
                m.set(i, j, v);
            }
        }
        letter_ops.push(m);
    }
    Some(Representation {
        basis_cols,
        letter_ops,
    })
}

impl Representation {
    fn dim(&self) -> usize {
        self.basis_cols.len()
    }

    fn element_op(&self, k: FieldSpec, lambda: &Scalar, xs: &[Scalar], offset: usize) -> Matrix {
        let mut m = Matrix::identity(k, self.dim()).scale(lambda);
        for (x, c) in xs.iter().enumerate() {
            if !c.is_zero() {
                m = m.add(&self.letter_ops[offset + x].scale(c));
            }
        }
        m
    }

    fn factor_op(&self, p: &Problem, alg: &Algebra, side_b: bool, v: &[Scalar]) -> Matrix {
        let (fac, off) = if side_b { (&p.fb, 0) } else { (&p.fc, p.engine.nb) };
        let (lambda, xs) = fac.decompose(p.k, alg, v);
        self.element_op(p.k, &lambda, &xs, off)
    }

    /// `V` is a module over `B ∗_A C`.
    fn satisfies_relations(&self, p: &Problem) -> bool {
        for (alg, side_b) in [(p.f.target(), true), (p.g.target(), false)] {
            let ops: Vec<Matrix> = alg
                .basis()
                .iter()
                .map(|v| self.factor_op(p, alg, side_b, v))
                .collect();
            for i in 0..alg.dim() {
                for j in 0..alg.dim() {
                    let lhs = ops[i].mul(&ops[j]);
                    let rhs = self.factor_op(p, alg, side_b, alg.structure_constant(i, j));
                    if lhs != rhs {
                        return false;
                    }
                }
            }
        }
        (0..p.f.source().dim()).all(|i| {
            self.factor_op(p, p.f.target(), true, &p.f.image_of_basis(i))
                == self.factor_op(p, p.g.target(), false, &p.g.image_of_basis(i))
        })
    }
}

fn flatten(m: &Matrix) -> Vector {
    m.entries().to_vec()
}

/// The operator algebra generated by the letters, if it has the dimension
/// of `V`; it is then isomorphic to the free product.
fn operator_algebra(p: &Problem, rep: &Representation) -> Option<(AlgRef, PushoutMaps)> {
    let k = p.k;
    let n = rep.dim();
    let mut ops: Vec<Matrix> = vec![Matrix::identity(k, n)];
    let mut labels: Vec<String> = vec!["1".into()];
    let mut words: Vec<Word> = vec![Vec::new()];
    let mut span = Subspace::zero(k, n * n);
    span.add_vector(&flatten(&ops[0]));
    let mut frontier = 0;
    while frontier < ops.len() {
        for l in 0..p.engine.nletters() as Letter {
            let prod = rep.letter_ops[l as usize].mul(&ops[frontier]);
            if span.add_vector(&flatten(&prod)) {
                let mut w = vec![l];
                w.extend_from_slice(&words[frontier]);
                labels.push(p.engine.word_label(&w));
                words.push(w);
                ops.push(prod);
            }
        }
        frontier += 1;
        if ops.len() > n {
            return None;
        }
    }
    if ops.len() != n {
        return None;
    }
    let mut seen = BTreeMap::new();
    for l in labels.iter_mut() {
        let count = seen.entry(l.clone()).or_insert(0usize);
        if *count > 0 {
            l.push_str(&format!("#{count}"));
        }
        *count += 1;
    }
    let flat: Vec<Vector> = ops.iter().map(flatten).collect();
    let basis_m = Matrix::from_columns(k, n * n, &flat);
    let coords = |m: &Matrix| basis_m.solve_affine(&flatten(m));
    let mut table = Vec::with_capacity(n * n);
    for a in &ops {
        for b in &ops {
            table.push(coords(&a.mul(b))?);
        }
    }
    let unit = k.unit_vector(n, 0);
    let alg: AlgRef = Arc::new(Algebra::new(k, labels, table, unit).ok()?);
    let factor_map = |src: &AlgRef, side_b: bool| -> Option<AlgebraMorphism> {
        let images: Option<Vec<Vector>> = src
            .basis()
            .iter()
            .map(|v| coords(&rep.factor_op(p, src, side_b, v)))
            .collect();
        AlgebraMorphism::from_images(src.clone(), alg.clone(), &images?).ok()
    };
    let from_left = factor_map(p.f.target(), true)?;
    let from_right = factor_map(p.g.target(), false)?;
    let from_base = p.f.then(&from_left).ok()?;
    Some((
        alg,
        PushoutMaps {
            from_base,
            from_left,
            from_right,
        },
    ))
}

fn check_common_source(f: &AlgebraMorphism, g: &AlgebraMorphism) -> Result<()> {
    if f.source() != g.source() {
        return Err(Error::AlgebraMismatch("free product needs maps from the same algebra".into()));
    }
    Ok(())
}

/// Free product `B ∗_A C` of `f: A → B` and `g: A → C`.
pub fn free_product(f: &AlgebraMorphism, g: &AlgebraMorphism, degree_cap: usize) -> Result<FreeProductResult> {
    check_common_source(f, g)?;
    let k = f.source().field();
    if f.target().is_zero_ring() || g.target().is_zero_ring() {
        return Ok(FreeProductResult {
            status: FreeProductStatus::Zero,
            degree_cap,
            log: Vec::new(),
            certificate: Some(ZeroCertificate {
                degree: 0,
                terms: Vec::new(),
            }),
            maps: None,
        });
    }
    let p = Problem::new(f, g, degree_cap);
    let e = &p.engine;
    let cap = e.cap.max(1).min(degree_cap.max(1));
    let mut ech = Echelon::new(k, e.words.len());
    for r in &p.relations {
        ech.insert(r.clone());
    }
    let mut log = Vec::new();
    let mut stabilized_but_unverified = false;
    for d in 1..=cap {
        let words = e.words_up_to(d).count();
        // smallest word degree D whose words all reduce modulo K_d ∩ F_D
        let reduced_at = (1..=d).find(|&dd| {
            e.words
                .iter()
                .enumerate()
                .filter(|(_, w)| w.len() == dd)
                .all(|(c, _)| ech.is_pivot(c))
        });
        let fd_pivots = ech.pivots().filter(|c| e.word_len(*c) <= d).count();
        log.push(DegreeLog {
            degree: d,
            words,
            relation_rank: ech.rank(),
            quotient_dim: words - fd_pivots,
            reduced_word_degree: reduced_at,
        });
        if ech.is_pivot(e.empty_col()) {
            let certificate = unit_certificate(&p, d).ok_or_else(|| {
                Error::InvariantViolation("unit lies in the relation span but no combination was found".into())
            })?;
            return Ok(FreeProductResult {
                status: FreeProductStatus::Zero,
                degree_cap,
                log,
                certificate: Some(certificate),
                maps: None,
            });
        }
        if let Some(dd) = reduced_at {
            if let Some(rep) = representation(&p, &ech, dd) {
                if rep.satisfies_relations(&p) {
                    if let Some((alg, maps)) = operator_algebra(&p, &rep) {
                        return Ok(FreeProductResult {
                            status: FreeProductStatus::FiniteDim {
                                algebra: alg,
                                stabilized_at: d,
                            },
                            degree_cap,
                            log,
                            certificate: None,
                            maps: Some(maps),
                        });
                    }
                }
            }
            stabilized_but_unverified = true;
        }
        if d == cap {
            break;
        }
        // K_{d+1} = K_d + Σ_x (x K_d + K_d x)
        for sparse in ech.sparse_rows() {
            for l in 0..e.nletters() as Letter {
                for (u, w) in [(vec![l], vec![]), (vec![], vec![l])] {
                    match e.sandwich(&u, &sparse, &w) {
                        Some(v) => {
                            ech.insert(v);
                        }
                        None => {
                            return Ok(FreeProductResult {
                                status: FreeProductStatus::Undetermined,
                                degree_cap,
                                log,
                                certificate: None,
                                maps: None,
                            })
                        }
                    }
                }
            }
        }
    }
    let status = if stabilized_but_unverified {
        FreeProductStatus::Undetermined
    } else {
        FreeProductStatus::Truncated {
            dims: log.iter().map(|l| l.quotient_dim).collect(),
        }
    };
    Ok(FreeProductResult {
        status,
        degree_cap,
        log,
        certificate: None,
        maps: None,
    })
}

/// Generators `u r_a v` with `|u| + |v| ≤ d − 1`, i.e. those spanning `K_d`.
fn generators(p: &Problem, d: usize) -> Vec<(Word, usize, Word, SparseVec)> {
    let e = &p.engine;
    let short: Vec<&Word> = e.words_up_to(d.saturating_sub(1)).collect();
    let mut out = Vec::new();
    for u in &short {
        for v in &short {
            if u.len() + v.len() + 1 > d {
                continue;
            }
            for (a, r) in p.relations.iter().enumerate() {
                if r.is_empty() {
                    continue;
                }
                if let Some(g) = e.sandwich(u, r, v) {
                    if !g.is_empty() {
                        out.push(((*u).clone(), a, (*v).clone(), g));
                    }
                }
            }
        }
    }
    out
}

fn unit_certificate(p: &Problem, d: usize) -> Option<ZeroCertificate> {
    let e = &p.engine;
    let gens = generators(p, d);
    let nvars = gens.len();
    // one equation per word coordinate: Σ c_i g_i[w] = [w = 1]
    let mut rows: BTreeMap<usize, SparseVec> = BTreeMap::new();
    for (i, (_, _, _, g)) in gens.iter().enumerate() {
        for (col, v) in g {
            rows.entry(*col).or_default().insert(i, v.clone());
        }
    }
    rows.entry(e.empty_col()).or_default();
    let system = rows.into_iter().map(|(col, coeffs)| {
        let rhs = if col == e.empty_col() { Scalar::one() } else { Scalar::zero() };
        (coeffs, rhs)
    });
    let sol = solve_sparse_system(p.k, nvars, system)?;
    let terms = gens
        .iter()
        .zip(sol)
        .filter(|(_, c)| !c.is_zero())
        .map(|((u, a, v, _), c)| CertificateTerm {
            left: e.word_names(u),
            relation: *a,
            right: e.word_names(v),
            coefficient: c,
        })
        .collect();
    Some(ZeroCertificate { degree: d, terms })
}

/// Re-derives a unit certificate from scratch: the stated combination sums
/// to `1`, and adding `1` to the generators of `K_d` does not raise the rank.
pub fn verify_zero_certificate(f: &AlgebraMorphism, g: &AlgebraMorphism, cert: &ZeroCertificate) -> bool {
    if f.source() != g.source() {
        return false;
    }
    if cert.degree == 0 {
        return cert.terms.is_empty() && (f.target().is_zero_ring() || g.target().is_zero_ring());
    }
    if f.target().is_zero_ring() || g.target().is_zero_ring() {
        return true;
    }
    let p = Problem::new(f, g, cert.degree);
    let e = &p.engine;
    let k = p.k;
    let mut sum = SparseVec::new();
    for t in &cert.terms {
        let (Some(u), Some(v)) = (e.parse_word(&t.left), e.parse_word(&t.right)) else {
            return false;
        };
        if u.len() + v.len() + 1 > cert.degree || t.relation >= p.relations.len() {
            return false;
        }
        let Some(gv) = e.sandwich(&u, &p.relations[t.relation], &v) else {
            return false;
        };
        for (col, c) in gv {
            let entry = sum.entry(col).or_insert_with(Scalar::zero);
            *entry = k.axpy(entry, &t.coefficient, &c);
        }
    }
    sum.retain(|_, c| !c.is_zero());
    let mut one = SparseVec::new();
    one.insert(e.empty_col(), Scalar::one());
    if sum != one {
        return false;
    }
    let mut ech = Echelon::new(k, e.words.len());
    for (_, _, _, gv) in generators(&p, cert.degree) {
        ech.insert(gv);
    }
    let before = ech.rank();
    ech.insert(one);
    ech.rank() == before
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Vanishing {
    Zero,
    NonZero,
    Undetermined,
}

/// A nonzero algebra `D` with `h: B → D`, `k: C → D` agreeing on `A`.
#[derive(Clone, Debug)]
pub struct Witness {
    pub left: AlgebraMorphism,
    pub right: AlgebraMorphism,
}

impl Witness {
    pub fn is_valid(&self, f: &AlgebraMorphism, g: &AlgebraMorphism) -> bool {
        if self.left.target() != self.right.target() || self.left.target().is_zero_ring() {
            return false;
        }
        match (f.then(&self.left), g.then(&self.right)) {
            (Ok(a), Ok(b)) => a.matrix() == b.matrix(),
            _ => false,
        }
    }
}

/// Whether `B ∗_A C` vanishes, decided on the underived free product.
pub fn derived_vanishes(
    f: &AlgebraMorphism,
    g: &AlgebraMorphism,
    degree_cap: usize,
    witnesses: &[Witness],
) -> Result<Vanishing> {
    let r = free_product(f, g, degree_cap)?;
    Ok(match r.status {
        FreeProductStatus::Zero => Vanishing::Zero,
        FreeProductStatus::FiniteDim { .. } => Vanishing::NonZero,
        _ if witnesses.iter().any(|w| w.is_valid(f, g)) => Vanishing::NonZero,
        _ => Vanishing::Undetermined,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CollapseReport {
    pub tensor_dim: usize,
    pub free_product_status: String,
    pub free_product_dim: Option<usize>,
    /// `(n, dim B ⊗ (C̄ ⊗ B̄)^n, dim B ⊗ (C̄ ⊗ B̄)^n ⊗ C̄)` for small `n`.
    pub filtration: Vec<(usize, usize, usize)>,
    pub pass: bool,
}

/// Compares `B ⊗_A C` with `B ∗_A C` for commutative inputs.
pub fn commutative_collapse_check(
    f: &AlgebraMorphism,
    g: &AlgebraMorphism,
    degree_cap: usize,
) -> Result<CollapseReport> {
    check_common_source(f, g)?;
    for alg in [f.source(), f.target(), g.target()] {
        if !alg.is_commutative() {
            return Err(Error::NotCommutative("commutative collapse check".into()));
        }
    }
    let bb = Bimodule::of_morphism(f);
    let cb = Bimodule::of_morphism(g);
    let tensor_dim = tensor_over(&bb, &cb)?.dim();
    let cokernel = |bm: &Bimodule, h: &AlgebraMorphism| -> Result<Bimodule> {
        bm.quotient(&h.matrix().image())
    };
    let b_bar = cokernel(&bb, f)?;
    let c_bar = cokernel(&cb, g)?;
    let mut filtration = Vec::new();
    let mut acc = bb.clone();
    for n in 1..=3 {
        let with_c = tensor_over(&acc, &c_bar)?.bimodule;
        acc = tensor_over(&with_c, &b_bar)?.bimodule;
        filtration.push((n, acc.dim(), tensor_over(&acc, &c_bar)?.dim()));
    }
    let fp = free_product(f, g, degree_cap)?;
    let fp_dim = fp.status.dim();
    if fp_dim.is_none() {
        return Err(Error::Undetermined(format!(
            "free product {} at degree cap {degree_cap}",
            fp.status.name()
        )));
    }
    Ok(CollapseReport {
        tensor_dim,
        free_product_status: fp.status.name().into(),
        free_product_dim: fp_dim,
        filtration,
        pass: fp_dim == Some(tensor_dim),
    })
}
