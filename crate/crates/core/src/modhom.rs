//! Modules and bimodules over finite-dimensional algebras: tensor products,
//! projective covers, minimal resolutions and Tor.
//!
//! Action matrices act on column vectors. For a left module `a·m = L_a m`,
//! so `L_a L_b = L_{ab}`; for a right module `m·a = R_a m`, so
//! `R_b R_a = R_{ab}`.

use std::sync::Arc;

use num_traits::Zero;

use crate::algcore::{primitive_idempotents, radical, AlgRef, Algebra, AlgebraMorphism};
use crate::error::{Error, Result};
use crate::exactlin::{is_zero_vector, to_sparse, Echelon, FieldSpec, Matrix, Scalar, Subspace, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

fn combine(field: FieldSpec, dim: usize, action: &[Matrix], a: &[Scalar]) -> Matrix {
    let mut out = Matrix::zeros(field, dim, dim);
    for (c, m) in a.iter().zip(action) {
        if !c.is_zero() {
            out = out.add(&m.scale(c));
        }
    }
    out
}

fn check_action(alg: &Algebra, dim: usize, action: &[Matrix], side: Side) -> Result<()> {
    let k = alg.field();
    if action.len() != alg.dim() {
        return Err(Error::DimensionMismatch {
            context: "action matrices".into(),
            expected: alg.dim(),
            found: action.len(),
        });
    }
    if let Some(m) = action.iter().find(|m| m.rows() != dim || m.cols() != dim) {
        return Err(Error::DimensionMismatch {
            context: "action matrix size".into(),
            expected: dim,
            found: m.rows().max(m.cols()),
        });
    }
    if combine(k, dim, action, alg.unit()) != Matrix::identity(k, dim) {
        return Err(Error::InvariantViolation("unit does not act as identity".into()));
    }
    let n = alg.dim();
    for i in 0..n {
        for j in 0..n {
            let prod = match side {
                Side::Left => action[i].mul(&action[j]),
                Side::Right => action[j].mul(&action[i]),
            };
            let expected = combine(k, dim, action, alg.structure_constant(i, j));
            if prod != expected {
                return Err(Error::InvariantViolation(format!(
                    "action does not respect {} * {}",
                    alg.labels()[i],
                    alg.labels()[j]
                )));
            }
        }
    }
    Ok(())
}

/// A one-sided module over an algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Module {
    algebra: AlgRef,
    side: Side,
    dim: usize,
    action: Vec<Matrix>,
}

impl Module {
    pub fn new(algebra: AlgRef, side: Side, dim: usize, action: Vec<Matrix>) -> Result<Self> {
        check_action(&algebra, dim, &action, side)?;
        Ok(Module {
            algebra,
            side,
            dim,
            action,
        })
    }

    pub fn zero(algebra: AlgRef, side: Side) -> Self {
        let k = algebra.field();
        let action = (0..algebra.dim()).map(|_| Matrix::zeros(k, 0, 0)).collect();
        Module {
            algebra,
            side,
            dim: 0,
            action,
        }
    }

    /// `A` acting on itself from the given side.
    pub fn regular(algebra: AlgRef, side: Side) -> Self {
        let action = algebra
            .basis()
            .iter()
            .map(|b| match side {
                Side::Left => algebra.left_mult_matrix(b),
                Side::Right => algebra.right_mult_matrix(b),
            })
            .collect();
        Module {
            dim: algebra.dim(),
            algebra,
            side,
            action,
        }
    }

    /// The target of `f` as a module over its source.
    pub fn restriction_of(f: &AlgebraMorphism, side: Side) -> Self {
        let b = Module::regular(f.target().clone(), side);
        b.restrict(f).expect("restriction along own morphism")
    }

    pub fn algebra(&self) -> &AlgRef {
        &self.algebra
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> FieldSpec {
        self.algebra.field()
    }

    pub fn action(&self) -> &[Matrix] {
        &self.action
    }

    /// Matrix of the action of an arbitrary element.
    pub fn act(&self, a: &[Scalar]) -> Matrix {
        combine(self.field(), self.dim, &self.action, a)
    }

    /// Restriction of scalars along `f: B → self.algebra`.
    pub fn restrict(&self, f: &AlgebraMorphism) -> Result<Module> {
        if **f.target() != *self.algebra {
            return Err(Error::AlgebraMismatch("restriction target".into()));
        }
        let action = (0..f.source().dim())
            .map(|i| self.act(&f.image_of_basis(i)))
            .collect();
        Ok(Module {
            algebra: f.source().clone(),
            side: self.side,
            dim: self.dim,
            action,
        })
    }

    /// The same data viewed from the other side over the opposite algebra.
    pub fn over_opposite(&self) -> Module {
        Module {
            algebra: Arc::new(self.algebra.opposite()),
            side: match self.side {
                Side::Left => Side::Right,
                Side::Right => Side::Left,
            },
            dim: self.dim,
            action: self.action.clone(),
        }
    }

    /// For commutative algebras a module on one side is one on the other.
    pub fn switch_side_commutative(&self) -> Result<Module> {
        if !self.algebra.is_commutative() {
            return Err(Error::NotCommutative("side switch".into()));
        }
        Ok(Module {
            side: match self.side {
                Side::Left => Side::Right,
                Side::Right => Side::Left,
            },
            ..self.clone()
        })
    }

    pub fn is_invariant(&self, sub: &Subspace) -> bool {
        sub.basis()
            .iter()
            .all(|v| self.action.iter().all(|m| sub.contains(&m.mul_vec(v))))
    }

    /// The submodule spanned by `sub` and its inclusion matrix.
    pub fn submodule(&self, sub: &Subspace) -> Result<(Module, Matrix)> {
        let basis = sub.basis();
        let mut action = Vec::with_capacity(self.action.len());
        for m in &self.action {
            let mut cols = Vec::with_capacity(basis.len());
            for v in &basis {
                let w = m.mul_vec(v);
                cols.push(sub.coordinates(&w).ok_or_else(|| {
                    Error::InvariantViolation("subspace is not a submodule".into())
                })?);
            }
            action.push(Matrix::from_columns(self.field(), basis.len(), &cols));
        }
        let incl = Matrix::from_columns(self.field(), self.dim, &basis);
        Ok((
            Module {
                algebra: self.algebra.clone(),
                side: self.side,
                dim: basis.len(),
                action,
            },
            incl,
        ))
    }

    /// `self / sub` and the projection matrix.
    pub fn quotient(&self, sub: &Subspace) -> Result<(Module, Matrix)> {
        if !self.is_invariant(sub) {
            return Err(Error::InvariantViolation("subspace is not a submodule".into()));
        }
        let keep = sub.complement_indices();
        let k = self.field();
        let action = self
            .action
            .iter()
            .map(|m| {
                let cols: Vec<Vector> = keep.iter().map(|c| sub.project(&m.column(*c))).collect();
                Matrix::from_columns(k, keep.len(), &cols)
            })
            .collect();
        let cols: Vec<Vector> = (0..self.dim).map(|i| sub.project(&k.unit_vector(self.dim, i))).collect();
        let proj = Matrix::from_columns(k, keep.len(), &cols);
        Ok((
            Module {
                algebra: self.algebra.clone(),
                side: self.side,
                dim: keep.len(),
                action,
            },
            proj,
        ))
    }

    /// Sum of the images of the radical.
    pub fn radical_submodule(&self) -> Result<Subspace> {
        let rad = radical(&self.algebra)?;
        let mut out = Subspace::zero(self.field(), self.dim);
        for r in rad.basis() {
            let m = self.act(&r);
            for j in 0..self.dim {
                out.add_vector(&m.column(j));
            }
        }
        Ok(out)
    }

    pub fn direct_sum(mods: &[Module]) -> Result<Module> {
        let first = mods
            .first()
            .ok_or_else(|| Error::Malformed("empty direct sum".into()))?;
        if mods.iter().any(|m| m.algebra != first.algebra || m.side != first.side) {
            return Err(Error::AlgebraMismatch("direct sum summands".into()));
        }
        let k = first.field();
        let action = (0..first.algebra.dim())
            .map(|i| {
                let blocks: Vec<Matrix> = mods.iter().map(|m| m.action[i].clone()).collect();
                Matrix::block_diag(k, &blocks)
            })
            .collect();
        Ok(Module {
            algebra: first.algebra.clone(),
            side: first.side,
            dim: mods.iter().map(|m| m.dim).sum(),
            action,
        })
    }

    /// One-sided module as a bimodule with the ground field on the other
    /// side.
    pub fn to_bimodule(&self) -> Bimodule {
        let k = self.field();
        let ground: AlgRef = Arc::new(Algebra::ground(k));
        let trivial = vec![Matrix::identity(k, self.dim)];
        match self.side {
            Side::Left => Bimodule {
                left: self.algebra.clone(),
                right: ground,
                dim: self.dim,
                left_action: self.action.clone(),
                right_action: trivial,
            },
            Side::Right => Bimodule {
                left: ground,
                right: self.algebra.clone(),
                dim: self.dim,
                left_action: trivial,
                right_action: self.action.clone(),
            },
        }
    }
}

/// An `L`–`R` bimodule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bimodule {
    left: AlgRef,
    right: AlgRef,
    dim: usize,
    left_action: Vec<Matrix>,
    right_action: Vec<Matrix>,
}

impl Bimodule {
    pub fn new(
        left: AlgRef,
        right: AlgRef,
        dim: usize,
        left_action: Vec<Matrix>,
        right_action: Vec<Matrix>,
    ) -> Result<Self> {
        if left.field() != right.field() {
            return Err(Error::FieldMismatch(left.field(), right.field()));
        }
        check_action(&left, dim, &left_action, Side::Left)?;
        check_action(&right, dim, &right_action, Side::Right)?;
        for l in &left_action {
            for r in &right_action {
                if l.mul(r) != r.mul(l) {
                    return Err(Error::InvariantViolation("left and right actions do not commute".into()));
                }
            }
        }
        Ok(Bimodule {
            left,
            right,
            dim,
            left_action,
            right_action,
        })
    }

    pub fn regular(a: AlgRef) -> Self {
        let l = Module::regular(a.clone(), Side::Left);
        let r = Module::regular(a.clone(), Side::Right);
        Bimodule {
            dim: a.dim(),
            left: a.clone(),
            right: a,
            left_action: l.action,
            right_action: r.action,
        }
    }

    /// The target of `f: A → B` as an `A`–`A` bimodule.
    pub fn of_morphism(f: &AlgebraMorphism) -> Self {
        Bimodule::regular(f.target().clone())
            .restrict_left(f)
            .and_then(|b| b.restrict_right(f))
            .expect("restriction along own morphism")
    }

    pub fn left_algebra(&self) -> &AlgRef {
        &self.left
    }

    pub fn right_algebra(&self) -> &AlgRef {
        &self.right
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> FieldSpec {
        self.left.field()
    }

    pub fn left_action(&self) -> &[Matrix] {
        &self.left_action
    }

    pub fn right_action(&self) -> &[Matrix] {
        &self.right_action
    }

    pub fn act_left(&self, a: &[Scalar]) -> Matrix {
        combine(self.field(), self.dim, &self.left_action, a)
    }

    pub fn act_right(&self, a: &[Scalar]) -> Matrix {
        combine(self.field(), self.dim, &self.right_action, a)
    }

    pub fn restrict_left(&self, f: &AlgebraMorphism) -> Result<Bimodule> {
        if **f.target() != *self.left {
            return Err(Error::AlgebraMismatch("left restriction target".into()));
        }
        let left_action = (0..f.source().dim())
            .map(|i| self.act_left(&f.image_of_basis(i)))
            .collect();
        Ok(Bimodule {
            left: f.source().clone(),
            left_action,
            ..self.clone()
        })
    }

    pub fn restrict_right(&self, f: &AlgebraMorphism) -> Result<Bimodule> {
        if **f.target() != *self.right {
            return Err(Error::AlgebraMismatch("right restriction target".into()));
        }
        let right_action = (0..f.source().dim())
            .map(|i| self.act_right(&f.image_of_basis(i)))
            .collect();
        Ok(Bimodule {
            right: f.source().clone(),
            right_action,
            ..self.clone()
        })
    }

    /// Quotient by a sub-bimodule.
    pub fn quotient(&self, sub: &Subspace) -> Result<Bimodule> {
        let invariant = sub.basis().iter().all(|v| {
            self.left_action
                .iter()
                .chain(&self.right_action)
                .all(|m| sub.contains(&m.mul_vec(v)))
        });
        if !invariant {
            return Err(Error::InvariantViolation("subspace is not a sub-bimodule".into()));
        }
        let keep = sub.complement_indices();
        let k = self.field();
        let induced = |m: &Matrix| {
            let cols: Vec<Vector> = keep.iter().map(|c| sub.project(&m.column(*c))).collect();
            Matrix::from_columns(k, keep.len(), &cols)
        };
        Ok(Bimodule {
            left: self.left.clone(),
            right: self.right.clone(),
            dim: keep.len(),
            left_action: self.left_action.iter().map(induced).collect(),
            right_action: self.right_action.iter().map(induced).collect(),
        })
    }

    pub fn left_module(&self) -> Module {
        Module {
            algebra: self.left.clone(),
            side: Side::Left,
            dim: self.dim,
            action: self.left_action.clone(),
        }
    }

    pub fn right_module(&self) -> Module {
        Module {
            algebra: self.right.clone(),
            side: Side::Right,
            dim: self.dim,
            action: self.right_action.clone(),
        }
    }
}

/// `M ⊗_A N` as a quotient of `M ⊗_k N`; the pure tensor `m_i ⊗ n_j` sits
/// at index `i·dim N + j`.
#[derive(Clone, Debug)]
pub struct Tensor {
    pub bimodule: Bimodule,
    relations: Subspace,
    left_dim: usize,
    right_dim: usize,
}

impl Tensor {
    pub fn dim(&self) -> usize {
        self.bimodule.dim
    }

    pub fn relations(&self) -> &Subspace {
        &self.relations
    }

    /// Index pairs `(i, j)` whose pure tensors form the chosen basis.
    pub fn basis_pairs(&self) -> Vec<(usize, usize)> {
        self.relations
            .complement_indices()
            .into_iter()
            .map(|c| (c / self.right_dim, c % self.right_dim))
            .collect()
    }

    pub fn project_raw(&self, v: &[Scalar]) -> Vector {
        self.relations.project(v)
    }

    /// Class of `x ⊗ y`.
    pub fn pure(&self, x: &[Scalar], y: &[Scalar]) -> Vector {
        let k = self.bimodule.field();
        let mut v = k.zero_vector(self.left_dim * self.right_dim);
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if !b.is_zero() {
                    v[i * self.right_dim + j] = k.mul(a, b);
                }
            }
        }
        self.relations.project(&v)
    }
}

/// `M ⊗_A N` for an `X`–`A` bimodule `M` and an `A`–`Y` bimodule `N`.
pub fn tensor_over(m: &Bimodule, n: &Bimodule) -> Result<Tensor> {
    if *m.right != *n.left {
        return Err(Error::AlgebraMismatch("tensor product over different algebras".into()));
    }
    let k = m.field();
    let (dm, dn) = (m.dim, n.dim);
    let total = dm * dn;
    let mut ech = Echelon::new(k, total);
    for (ra, la) in m.right_action.iter().zip(&n.left_action) {
        for i in 0..dm {
            let rmi = ra.column(i);
            for j in 0..dn {
                let lnj = la.column(j);
                let mut rel = std::collections::BTreeMap::new();
                for (p, c) in rmi.iter().enumerate() {
                    if !c.is_zero() {
                        rel.insert(p * dn + j, c.clone());
                    }
                }
                for (q, c) in lnj.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let e = rel.entry(i * dn + q).or_insert_with(Scalar::zero);
                    *e = k.sub(e, c);
                }
                rel.retain(|_, v| !v.is_zero());
                ech.insert(rel);
            }
        }
    }
    let relations = Subspace::from_echelon(ech);
    let keep = relations.complement_indices();
    let induced = |f: &dyn Fn(usize, usize) -> Vector| -> Matrix {
        let cols: Vec<Vector> = keep.iter().map(|c| relations.project(&f(c / dn, c % dn))).collect();
        Matrix::from_columns(k, keep.len(), &cols)
    };
    let kron_left = |a: &Matrix, i: usize, j: usize| {
        let col = a.column(i);
        let mut v = k.zero_vector(total);
        for (p, c) in col.iter().enumerate() {
            v[p * dn + j] = c.clone();
        }
        v
    };
    let kron_right = |b: &Matrix, i: usize, j: usize| {
        let col = b.column(j);
        let mut v = k.zero_vector(total);
        for (q, c) in col.iter().enumerate() {
            v[i * dn + q] = c.clone();
        }
        v
    };
    let left_action = m
        .left_action
        .iter()
        .map(|a| induced(&|i, j| kron_left(a, i, j)))
        .collect();
    let right_action = n
        .right_action
        .iter()
        .map(|b| induced(&|i, j| kron_right(b, i, j)))
        .collect();
    Ok(Tensor {
        bimodule: Bimodule {
            left: m.left.clone(),
            right: n.right.clone(),
            dim: keep.len(),
            left_action,
            right_action,
        },
        relations,
        left_dim: dm,
        right_dim: dn,
    })
}

/// A homomorphism of modules on the same side over the same algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleMap {
    pub source: Module,
    pub target: Module,
    pub matrix: Matrix,
}

impl ModuleMap {
    pub fn new(source: Module, target: Module, matrix: Matrix) -> Result<Self> {
        if source.algebra != target.algebra || source.side != target.side {
            return Err(Error::AlgebraMismatch("module map between different module types".into()));
        }
        if matrix.rows() != target.dim || matrix.cols() != source.dim {
            return Err(Error::DimensionMismatch {
                context: "module map matrix".into(),
                expected: target.dim * source.dim,
                found: matrix.rows() * matrix.cols(),
            });
        }
        for (s, t) in source.action.iter().zip(&target.action) {
            if matrix.mul(s) != t.mul(&matrix) {
                return Err(Error::InvariantViolation("map does not intertwine the actions".into()));
            }
        }
        Ok(ModuleMap {
            source,
            target,
            matrix,
        })
    }

    pub fn kernel(&self) -> Subspace {
        self.matrix.kernel_basis()
    }

    pub fn is_surjective(&self) -> bool {
        self.matrix.rank() == self.target.dim
    }
}

/// Primitive idempotents up to isomorphism of the projectives they
/// generate.
#[derive(Clone, Debug)]
pub struct IdempotentClasses {
    pub idempotents: Vec<Vector>,
    /// For each idempotent, the index of its class representative.
    pub class_of: Vec<usize>,
    pub representatives: Vec<Vector>,
    pub radical: Subspace,
}

/// `e A ≅ f A` iff the products `(eAf)(fAe)` leave the radical.
pub fn idempotent_classes(a: &AlgRef) -> Result<IdempotentClasses> {
    let idempotents = primitive_idempotents(a)?;
    let rad = radical(a)?;
    let mut reps: Vec<usize> = Vec::new();
    let mut class_of = Vec::new();
    for (i, e) in idempotents.iter().enumerate() {
        let found = reps.iter().position(|&r| {
            let f = &idempotents[r];
            let ef = a.corner(e, f).basis();
            let fe = a.corner(f, e).basis();
            ef.iter()
                .any(|x| fe.iter().any(|y| !rad.contains(&a.mul(x, y))))
        });
        match found {
            Some(c) => class_of.push(c),
            None => {
                class_of.push(reps.len());
                reps.push(i);
            }
        }
    }
    Ok(IdempotentClasses {
        representatives: reps.iter().map(|i| idempotents[*i].clone()).collect(),
        idempotents,
        class_of,
        radical: rad,
    })
}

/// Certificate that a module is a direct summand of a free module:
/// `retraction · inclusion = id`, both maps linear over the algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Splitting {
    pub free_rank: usize,
    pub inclusion: Matrix,
    pub retraction: Matrix,
}

impl Splitting {
    pub fn verify(&self, p: &Module) -> bool {
        let free = if self.free_rank == 0 {
            Module::zero(p.algebra.clone(), p.side)
        } else {
            let copies = vec![Module::regular(p.algebra.clone(), p.side); self.free_rank];
            match Module::direct_sum(&copies) {
                Ok(f) => f,
                Err(_) => return false,
            }
        };
        let inc = ModuleMap::new(p.clone(), free.clone(), self.inclusion.clone());
        let ret = ModuleMap::new(free, p.clone(), self.retraction.clone());
        inc.is_ok()
            && ret.is_ok()
            && self.retraction.mul(&self.inclusion) == Matrix::identity(p.field(), p.dim)
    }
}

#[derive(Clone, Debug)]
pub struct ProjectiveCover {
    pub map: ModuleMap,
    /// Class index of each indecomposable summand, in order.
    pub summands: Vec<usize>,
    pub splitting: Splitting,
}

/// `A e` as a left module, with the indecomposable's basis taken as the
/// canonical basis of the subspace `A e ⊆ A`.
fn left_projective(a: &AlgRef, e: &[Scalar]) -> (Module, Subspace) {
    let k = a.field();
    let ae = Subspace::from_vectors(k, a.dim(), &a.basis().iter().map(|b| a.mul(b, e)).collect::<Vec<_>>());
    let basis = ae.basis();
    let action = a
        .basis()
        .iter()
        .map(|b| {
            let cols: Vec<Vector> = basis
                .iter()
                .map(|v| ae.coordinates(&a.mul(b, v)).expect("left ideal"))
                .collect();
            Matrix::from_columns(k, basis.len(), &cols)
        })
        .collect();
    (
        Module {
            algebra: a.clone(),
            side: Side::Left,
            dim: basis.len(),
            action,
        },
        ae,
    )
}

/// Indecomposable projective `P(e)` on the module's side.
pub fn indecomposable_projective(a: &AlgRef, e: &[Scalar], side: Side) -> Module {
    match side {
        Side::Left => left_projective(a, e).0,
        Side::Right => {
            let op: AlgRef = Arc::new(a.opposite());
            let m = left_projective(&op, e).0;
            Module {
                algebra: a.clone(),
                side: Side::Right,
                dim: m.dim,
                action: m.action,
            }
        }
    }
}

fn left_projective_cover(m: &Module, classes: &IdempotentClasses) -> Result<ProjectiveCover> {
    let a = &m.algebra;
    let k = m.field();
    let rad_m = {
        let mut out = Subspace::zero(k, m.dim);
        for r in classes.radical.basis() {
            let act = m.act(&r);
            for j in 0..m.dim {
                out.add_vector(&act.column(j));
            }
        }
        out
    };
    let mut parts: Vec<(usize, Module, Subspace, Vector)> = Vec::new();
    for (ci, e) in classes.representatives.iter().enumerate() {
        let le = m.act(e);
        let em: Vec<Vector> = (0..m.dim).map(|j| le.column(j)).collect();
        let e_rad: Vec<Vector> = rad_m.basis().iter().map(|v| le.mul_vec(v)).collect();
        let mut ech = Echelon::new(k, m.dim);
        for v in &e_rad {
            ech.insert(to_sparse(v));
        }
        for v in em {
            if ech.insert(to_sparse(&v)).is_some() {
                let (p, ae) = left_projective(a, e);
                parts.push((ci, p, ae, v));
            }
        }
    }
    if parts.is_empty() {
        let zero = Module::zero(a.clone(), Side::Left);
        let map = ModuleMap::new(zero, m.clone(), Matrix::zeros(k, m.dim, 0))?;
        return Ok(ProjectiveCover {
            map,
            summands: Vec::new(),
            splitting: Splitting {
                free_rank: 0,
                inclusion: Matrix::zeros(k, 0, 0),
                retraction: Matrix::zeros(k, 0, 0),
            },
        });
    }
    let p = Module::direct_sum(&parts.iter().map(|x| x.1.clone()).collect::<Vec<_>>())?;
    let mut cols = Vec::with_capacity(p.dim);
    let mut inc_blocks = Vec::new();
    let mut ret_blocks = Vec::new();
    for (ci, _, ae, gen) in &parts {
        let e = &classes.representatives[*ci];
        let basis = ae.basis();
        for v in &basis {
            cols.push(m.act(v).mul_vec(gen));
        }
        inc_blocks.push(Matrix::from_columns(k, a.dim(), &basis));
        let ret_cols: Vec<Vector> = a
            .basis()
            .iter()
            .map(|x| ae.coordinates(&a.mul(x, e)).expect("x e lies in A e"))
            .collect();
        ret_blocks.push(Matrix::from_columns(k, basis.len(), &ret_cols));
    }
    let matrix = Matrix::from_columns(k, m.dim, &cols);
    let map = ModuleMap::new(p, m.clone(), matrix)?;
    if !map.is_surjective() {
        return Err(Error::InvariantViolation("projective cover is not surjective".into()));
    }
    Ok(ProjectiveCover {
        map,
        summands: parts.iter().map(|x| x.0).collect(),
        splitting: Splitting {
            free_rank: parts.len(),
            inclusion: Matrix::block_diag(k, &inc_blocks),
            retraction: Matrix::block_diag(k, &ret_blocks),
        },
    })
}

fn flip(m: Module, algebra: &AlgRef) -> Module {
    Module {
        algebra: algebra.clone(),
        side: Side::Right,
        ..m
    }
}

fn cover_with(m: &Module, classes: &IdempotentClasses) -> Result<ProjectiveCover> {
    match m.side {
        Side::Left => left_projective_cover(m, classes),
        Side::Right => {
            let op = m.over_opposite();
            let c = left_projective_cover(&op, classes)?;
            let src = flip(c.map.source, &m.algebra);
            Ok(ProjectiveCover {
                map: ModuleMap::new(src, m.clone(), c.map.matrix)?,
                summands: c.summands,
                splitting: c.splitting,
            })
        }
    }
}

/// Projective cover `P ↠ M` with kernel inside `rad P`.
pub fn projective_cover(m: &Module) -> Result<ProjectiveCover> {
    let classes = match m.side {
        Side::Left => idempotent_classes(&m.algebra)?,
        Side::Right => idempotent_classes(&Arc::new(m.algebra.opposite()))?,
    };
    cover_with(m, &classes)
}

/// `… → P_1 → P_0 → M`, where `differentials[i]` is `P_{i+1} → P_i`.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub module: Module,
    pub terms: Vec<Module>,
    pub augmentation: Matrix,
    pub differentials: Vec<Matrix>,
    pub splittings: Vec<Splitting>,
    /// The last term maps injectively, so the resolution is finite.
    pub complete: bool,
}

impl Resolution {
    pub fn length(&self) -> usize {
        self.terms.len().saturating_sub(1)
    }

    /// Checks `d² = 0`, exactness at every computed position, linearity of
    /// every map and the projectivity certificates.
    pub fn verify(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvariantViolation(msg));
        ModuleMap::new(self.terms[0].clone(), self.module.clone(), self.augmentation.clone())?;
        if self.augmentation.rank() != self.module.dim {
            return bad("augmentation is not surjective".into());
        }
        for (i, d) in self.differentials.iter().enumerate() {
            ModuleMap::new(self.terms[i + 1].clone(), self.terms[i].clone(), d.clone())?;
            let prev = if i == 0 { &self.augmentation } else { &self.differentials[i - 1] };
            if !prev.mul(d).is_zero() {
                return bad(format!("d² ≠ 0 at position {i}"));
            }
            if prev.kernel_basis() != d.image() {
                return bad(format!("not exact at position {i}"));
            }
        }
        if self.complete {
            let last = self.differentials.last().unwrap_or(&self.augmentation);
            let injective = if self.differentials.is_empty() {
                self.augmentation.rank() == self.terms[0].dim
            } else {
                last.rank() == last.cols()
            };
            if !injective {
                return bad("last map of a complete resolution is not injective".into());
            }
        }
        for (p, s) in self.terms.iter().zip(&self.splittings) {
            if !s.verify(p) {
                return bad("projectivity certificate fails".into());
            }
        }
        Ok(())
    }
}

/// Iterated projective covers, stopping when a kernel vanishes or after
/// `max_len` differentials.
pub fn minimal_resolution(m: &Module, max_len: usize) -> Result<Resolution> {
    let classes = match m.side {
        Side::Left => idempotent_classes(&m.algebra)?,
        Side::Right => idempotent_classes(&Arc::new(m.algebra.opposite()))?,
    };
    let c0 = cover_with(m, &classes)?;
    let mut terms = vec![c0.map.source.clone()];
    let mut splittings = vec![c0.splitting];
    let augmentation = c0.map.matrix.clone();
    let mut differentials = Vec::new();
    let mut last_map = augmentation.clone();
    let mut complete = false;
    loop {
        let current = terms.last().expect("nonempty").clone();
        let ker = last_map.kernel_basis();
        if ker.dim() == 0 {
            complete = true;
            break;
        }
        if differentials.len() == max_len {
            break;
        }
        let (kmod, incl) = current.submodule(&ker)?;
        let c = cover_with(&kmod, &classes)?;
        let d = incl.mul(&c.map.matrix);
        terms.push(c.map.source.clone());
        splittings.push(c.splitting);
        differentials.push(d.clone());
        last_map = d;
    }
    Ok(Resolution {
        module: m.clone(),
        terms,
        augmentation,
        differentials,
        splittings,
        complete,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorDims {
    /// `dims[i] = dim Tor_i` for `0 ≤ i ≤ max_deg`.
    pub dims: Vec<usize>,
    /// The resolution terminated, so `Tor_i = 0` for every `i` beyond the
    /// resolution length.
    pub complete: bool,
    pub resolution_length: usize,
}

impl TorDims {
    /// Largest `d` with `Tor_i = 0` for `1 ≤ i ≤ d`.
    pub fn zero_up_to(&self) -> usize {
        self.dims
            .iter()
            .skip(1)
            .take_while(|d| **d == 0)
            .count()
    }
}

pub const DEFAULT_MAX_DEG: usize = 10;

/// `Tor_i^A(M, N)` for a right module `M` and a left module `N`, by
/// resolving `M`.
pub fn tor_dims(m: &Module, n: &Module, max_deg: usize) -> Result<TorDims> {
    if m.side != Side::Right || n.side != Side::Left {
        return Err(Error::Malformed("Tor expects a right module and a left module".into()));
    }
    if m.algebra != n.algebra {
        return Err(Error::AlgebraMismatch("Tor arguments over different algebras".into()));
    }
    let res = minimal_resolution(m, max_deg + 1)?;
    let nb = n.to_bimodule();
    let tensors: Vec<Tensor> = res
        .terms
        .iter()
        .map(|p| tensor_over(&p.to_bimodule(), &nb))
        .collect::<Result<_>>()?;
    let k = m.field();
    let induced: Vec<Matrix> = res
        .differentials
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let (src, dst) = (&tensors[i + 1], &tensors[i]);
            let cols: Vec<Vector> = src
                .basis_pairs()
                .iter()
                .map(|(p, q)| dst.pure(&d.column(*p), &k.unit_vector(n.dim, *q)))
                .collect();
            Matrix::from_columns(k, dst.dim(), &cols)
        })
        .collect();
    let mut dims = Vec::with_capacity(max_deg + 1);
    for i in 0..=max_deg {
        let c = tensors.get(i).map_or(0, Tensor::dim);
        let ker = if i == 0 {
            c
        } else {
            induced.get(i - 1).map_or(0, |d| d.cols() - d.rank())
        };
        let im = induced.get(i).map_or(0, Matrix::rank);
        dims.push(ker - im);
    }
    Ok(TorDims {
        dims,
        complete: res.complete,
        resolution_length: res.length(),
    })
}

/// `Tor_i^A(B, B)` for `B` regarded as an `A`-bimodule through `f`.
pub fn tor_of_morphism(f: &AlgebraMorphism, max_deg: usize) -> Result<TorDims> {
    let right = Module::restriction_of(f, Side::Right);
    let left = Module::restriction_of(f, Side::Left);
    tor_dims(&right, &left, max_deg)
}

pub fn is_zero_module(m: &Module) -> bool {
    m.dim == 0
}

pub fn vectors_span_module(m: &Module, vs: &[Vector]) -> bool {
    let mut s = Subspace::zero(m.field(), m.dim);
    for v in vs {
        for a in &m.action {
            s.add_vector(&a.mul_vec(v));
        }
    }
    s.dim() == m.dim || (m.dim == 0 && vs.iter().all(|v| is_zero_vector(v)))
}
