//! Structure presheaf on a localization lattice, the equalizer condition,
//! and truncated cobar complexes of covers.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::algcore::{AlgRef, AlgebraMorphism};
use crate::epiloc::{factorization_map, LocalizationLattice};
use crate::error::{Error, Result};
use crate::exactlin::{solve_sparse_system, Echelon, FieldSpec, Matrix, SparseVec, Subspace, Vector};
use crate::freeprod::{free_product, FreeProductStatus};
use crate::modhom::{tor_dims, Module, Side};

pub const DEFAULT_T_MAX: usize = 3;

/// Sections are node targets; `restriction(i, j)` for `i ≤ j` is the map
/// `O(j) → O(i)` over the base.
#[derive(Clone, Debug)]
pub struct StructurePresheaf {
    pub lattice: LocalizationLattice,
    restrictions: BTreeMap<(usize, usize), AlgebraMorphism>,
}

impl StructurePresheaf {
    pub fn section(&self, i: usize) -> &AlgRef {
        self.lattice.nodes[i].target()
    }

    pub fn section_dims(&self) -> Vec<usize> {
        (0..self.lattice.len()).map(|i| self.section(i).dim()).collect()
    }

    pub fn restriction(&self, i: usize, j: usize) -> Option<&AlgebraMorphism> {
        self.restrictions.get(&(i, j))
    }

    /// Identity and composition laws, exhaustively.
    pub fn functoriality_failures(&self) -> Vec<String> {
        let n = self.lattice.len();
        let mut bad = Vec::new();
        for i in 0..n {
            let r = &self.restrictions[&(i, i)];
            if *r.matrix() != Matrix::identity(r.source().field(), r.source().dim()) {
                bad.push(format!("restriction at {} is not the identity", self.lattice.nodes[i].id));
            }
            for j in 0..n {
                for k in 0..n {
                    let (Some(ij), Some(jk), Some(ik)) = (
                        self.restrictions.get(&(i, j)),
                        self.restrictions.get(&(j, k)),
                        self.restrictions.get(&(i, k)),
                    ) else {
                        continue;
                    };
                    if jk.then(ij).map(|c| c.matrix() != ik.matrix()).unwrap_or(true) {
                        bad.push(format!("restrictions do not compose along {i} ≤ {j} ≤ {k}"));
                    }
                }
            }
        }
        bad
    }
}

pub fn structure_presheaf(lattice: &LocalizationLattice) -> Result<StructurePresheaf> {
    let n = lattice.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|(i, j)| lattice.leq[*i][*j])
        .collect();
    let maps: Vec<Result<AlgebraMorphism>> = pairs
        .par_iter()
        .map(|(i, j)| {
            factorization_map(&lattice.nodes[*i].map, &lattice.nodes[*j].map)?.ok_or_else(|| {
                Error::InvariantViolation(format!(
                    "no factorization witness for {} ≤ {}",
                    lattice.nodes[*i].id, lattice.nodes[*j].id
                ))
            })
        })
        .collect();
    let mut restrictions = BTreeMap::new();
    for (p, m) in pairs.into_iter().zip(maps) {
        restrictions.insert(p, m?);
    }
    Ok(StructurePresheaf {
        lattice: lattice.clone(),
        restrictions,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SheafReport {
    pub open: String,
    pub cover: Vec<String>,
    pub global_dim: usize,
    pub product_dim: usize,
    pub equalizer_dim: usize,
    pub injective: bool,
    pub pass: bool,
}

/// Compares `O(u)` with the equalizer of `∏ O(uᵢ) ⇉ ∏ O(uᵢ ∧ uⱼ)`.
pub fn sheaf_check(ps: &StructurePresheaf, u: usize, cover: &[usize]) -> Result<SheafReport> {
    let l = &ps.lattice;
    for c in cover {
        if !l.leq[*c][u] {
            return Err(Error::Malformed(format!("{} is not below {}", l.nodes[*c].id, l.nodes[u].id)));
        }
    }
    let k = l.base.field();
    let dims: Vec<usize> = cover.iter().map(|c| ps.section(*c).dim()).collect();
    let offsets: Vec<usize> = dims.iter().scan(0, |acc, d| {
        let o = *acc;
        *acc += d;
        Some(o)
    }).collect();
    let product_dim: usize = dims.iter().sum();
    let mut blocks: Vec<Vec<Vector>> = Vec::new();
    for a in 0..cover.len() {
        for b in a + 1..cover.len() {
            let m = l.meet(cover[a], cover[b]).node().ok_or_else(|| {
                Error::Undetermined(format!("meet of {} and {}", l.nodes[cover[a]].id, l.nodes[cover[b]].id))
            })?;
            let ra = &ps.restrictions[&(m, cover[a])];
            let rb = &ps.restrictions[&(m, cover[b])];
            let dm = ps.section(m).dim();
            let mut rows = vec![k.zero_vector(product_dim); dm];
            for (x, row) in rows.iter_mut().enumerate() {
                for y in 0..dims[a] {
                    row[offsets[a] + y] = ra.matrix().get(x, y).clone();
                }
                for y in 0..dims[b] {
                    row[offsets[b] + y] = k.neg(rb.matrix().get(x, y));
                }
            }
            blocks.push(rows);
        }
    }
    let diff = Matrix::from_rows(k, product_dim, blocks.into_iter().flatten().collect())?;
    let equalizer = diff.kernel_basis();
    let global_dim = ps.section(u).dim();
    let mut canon = Matrix::zeros(k, product_dim, global_dim);
    for (a, c) in cover.iter().enumerate() {
        let r = &ps.restrictions[&(*c, u)];
        for x in 0..dims[a] {
            for y in 0..global_dim {
                canon.set(offsets[a] + x, y, r.matrix().get(x, y).clone());
            }
        }
    }
    let injective = canon.rank() == global_dim;
    let image = canon.image();
    let pass = injective && equalizer.contains_subspace(&image) && image.dim() == equalizer.dim();
    Ok(SheafReport {
        open: l.nodes[u].id.clone(),
        cover: cover.iter().map(|c| l.nodes[*c].id.clone()).collect(),
        global_dim,
        product_dim,
        equalizer_dim: equalizer.dim(),
        injective,
        pass,
    })
}

/// Left/right actions of the base on a tensor slot, one matrix per basis
/// element of the base.
#[derive(Clone, Debug)]
struct Slot {
    dim: usize,
    left: Vec<Matrix>,
    right: Vec<Matrix>,
}

/// One summand `B_{i₀} ⊗_A ⋯ ⊗_A B_{i_t} (⊗_A M)` of a cobar level, as a
/// quotient of the tensor over the ground field.
#[derive(Clone, Debug)]
pub struct LevelBlock {
    pub index: Vec<usize>,
    slot_dims: Vec<usize>,
    raw: usize,
    relations: Subspace,
    pub offset: usize,
}

impl LevelBlock {
    pub fn dim(&self) -> usize {
        self.raw - self.relations.dim()
    }

    fn encode(&self, tuple: &[usize]) -> usize {
        tuple.iter().zip(&self.slot_dims).fold(0, |acc, (x, d)| acc * d + x)
    }

    fn decode(&self, mut r: usize) -> Vec<usize> {
        let mut t = vec![0; self.slot_dims.len()];
        for (i, d) in self.slot_dims.iter().enumerate().rev() {
            t[i] = r % d;
            r /= d;
        }
        t
    }

    /// Raw tuples whose classes form the basis.
    fn basis_tuples(&self) -> Vec<Vec<usize>> {
        self.relations.complement_indices().into_iter().map(|r| self.decode(r)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorFlag {
    pub left: usize,
    pub right: usize,
    pub tor1: usize,
}

/// Truncated cobar complex of a cover `A → Bᵢ`, optionally tensored with a
/// left module `M`. Level `-1` is `A` (or `M`); `differentials[t]` goes from
/// level `t` to `t + 1`.
#[derive(Clone, Debug)]
pub struct CobarComplex {
    pub base: AlgRef,
    pub cover: Vec<AlgebraMorphism>,
    pub module: Option<Module>,
    pub t_max: usize,
    pub levels: Vec<Vec<LevelBlock>>,
    pub augmentation: Matrix,
    pub differentials: Vec<Matrix>,
    /// Pairs with `Tor₁ ≠ 0`, where the underived levels differ from the
    /// derived ones.
    pub tor_flags: Vec<TorFlag>,
}

struct Builder<'a> {
    field: FieldSpec,
    base_dim: usize,
    cover_slots: Vec<Slot>,
    units: Vec<Vector>,
    module: Option<(Slot, &'a Module)>,
}

impl Builder<'_> {
    fn slot(&self, s: Option<usize>) -> &Slot {
        match s {
            Some(j) => &self.cover_slots[j],
            None => &self.module.as_ref().expect("module slot").0,
        }
    }

    fn slots(&self, index: &[usize]) -> Vec<Option<usize>> {
        let mut s: Vec<Option<usize>> = index.iter().map(|j| Some(*j)).collect();
        if self.module.is_some() {
            s.push(None);
        }
        s
    }

    fn block(&self, index: &[usize]) -> LevelBlock {
        let slots = self.slots(index);
        let slot_dims: Vec<usize> = slots.iter().map(|s| self.slot(*s).dim).collect();
        let raw: usize = slot_dims.iter().product();
        let mut block = LevelBlock {
            index: index.to_vec(),
            slot_dims,
            raw,
            relations: Subspace::zero(self.field, raw),
            offset: 0,
        };
        let k = self.field;
        let mut ech = Echelon::new(k, raw);
        for s in 0..slots.len().saturating_sub(1) {
            let (x, y) = (self.slot(slots[s]), self.slot(slots[s + 1]));
            for r in 0..raw {
                let t = block.decode(r);
                for a in 0..self.base_dim {
                    let mut v = SparseVec::new();
                    let mut tt = t.clone();
                    for c in 0..x.dim {
                        let e = x.right[a].get(c, t[s]);
                        if !e.is_zero() {
                            tt[s] = c;
                            let key = block.encode(&tt);
                            let cur = v.remove(&key).unwrap_or_else(|| k.zero());
                            v.insert(key, k.add(&cur, e));
                        }
                    }
                    tt[s] = t[s];
                    for c in 0..y.dim {
                        let e = y.left[a].get(c, t[s + 1]);
                        if !e.is_zero() {
                            tt[s + 1] = c;
                            let key = block.encode(&tt);
                            let cur = v.remove(&key).unwrap_or_else(|| k.zero());
                            v.insert(key, k.sub(&cur, e));
                        }
                    }
                    v.retain(|_, c| !c.is_zero());
                    if !v.is_empty() {
                        ech.insert(v);
                    }
                }
            }
        }
        block.relations = Subspace::from_echelon(ech);
        block
    }

    fn level(&self, t: usize, n: usize) -> Vec<LevelBlock> {
        let count = n.pow(t as u32 + 1);
        let indices: Vec<Vec<usize>> = (0..count)
            .map(|mut c| {
                let mut idx = vec![0; t + 1];
                for i in (0..=t).rev() {
                    idx[i] = c % n;
                    c /= n;
                }
                idx
            })
            .collect();
        let mut blocks: Vec<LevelBlock> = indices.par_iter().map(|i| self.block(i)).collect();
        let mut off = 0;
        for b in &mut blocks {
            b.offset = off;
            off += b.dim();
        }
        blocks
    }
}

fn level_dim(blocks: &[LevelBlock]) -> usize {
    blocks.iter().map(LevelBlock::dim).sum()
}

fn block_position(blocks: &[LevelBlock], index: &[usize], n: usize) -> usize {
    let pos = index.iter().fold(0, |acc, j| acc * n + j);
    debug_assert_eq!(blocks[pos].index, index);
    pos
}

/// Class of a raw tuple combination inside a level vector.
fn add_raw(out: &mut [crate::exactlin::Scalar], k: FieldSpec, block: &LevelBlock, raw: &Vector, sign: bool) {
    let proj = block.relations.project(raw);
    for (i, c) in proj.iter().enumerate() {
        if !c.is_zero() {
            let pos = block.offset + i;
            out[pos] = if sign { k.add(&out[pos], c) } else { k.sub(&out[pos], c) };
        }
    }
}

pub fn cobar(base: &AlgRef, cover: &[AlgebraMorphism], t_max: usize) -> Result<CobarComplex> {
    cobar_with_module(base, cover, None, t_max)
}

pub fn cobar_with_module(
    base: &AlgRef,
    cover: &[AlgebraMorphism],
    module: Option<&Module>,
    t_max: usize,
) -> Result<CobarComplex> {
    if cover.is_empty() {
        return Err(Error::Malformed("empty cover".into()));
    }
    for f in cover {
        if f.source() != base {
            return Err(Error::AlgebraMismatch("cover map from another algebra".into()));
        }
    }
    if let Some(m) = module {
        if m.algebra() != base || m.side() != Side::Left {
            return Err(Error::AlgebraMismatch("module must be a left module over the base".into()));
        }
    }
    let k = base.field();
    let n = cover.len();
    let cover_slots: Vec<Slot> = cover
        .iter()
        .map(|f| {
            let b = f.target();
            let imgs: Vec<Vector> = (0..base.dim()).map(|a| f.image_of_basis(a)).collect();
            Slot {
                dim: b.dim(),
                left: imgs.iter().map(|x| b.left_mult_matrix(x)).collect(),
                right: imgs.iter().map(|x| b.right_mult_matrix(x)).collect(),
            }
        })
        .collect();
    let builder = Builder {
        field: k,
        base_dim: base.dim(),
        units: cover.iter().map(|f| f.target().unit().clone()).collect(),
        cover_slots,
        module: module.map(|m| {
            (
                Slot {
                    dim: m.dim(),
                    left: m.action().to_vec(),
                    right: Vec::new(),
                },
                m,
            )
        }),
    };
    let levels: Vec<Vec<LevelBlock>> = (0..=t_max).map(|t| builder.level(t, n)).collect();

    // augmentation: x ↦ Σᵢ 1 ⊗ x (or f_i(x))
    let bottom_dim = module.map_or(base.dim(), Module::dim);
    let l0 = &levels[0];
    let mut aug_cols = Vec::with_capacity(bottom_dim);
    for x in 0..bottom_dim {
        let mut col = k.zero_vector(level_dim(l0));
        for (i, blk) in l0.iter().enumerate() {
            let mut raw = k.zero_vector(blk.raw);
            match module {
                None => {
                    for (c, v) in cover[i].image_of_basis(x).iter().enumerate() {
                        raw[c] = v.clone();
                    }
                }
                Some(_) => {
                    for (c, u) in builder.units[i].iter().enumerate() {
                        if !u.is_zero() {
                            raw[blk.encode(&[c, x])] = u.clone();
                        }
                    }
                }
            }
            add_raw(&mut col, k, blk, &raw, true);
        }
        aug_cols.push(col);
    }
    let augmentation = Matrix::from_columns(k, level_dim(l0), &aug_cols);

    let differentials: Vec<Matrix> = (0..t_max)
        .into_par_iter()
        .map(|t| {
            let (src, dst) = (&levels[t], &levels[t + 1]);
            let mut cols = Vec::with_capacity(level_dim(src));
            for blk in src {
                for tuple in blk.basis_tuples() {
                    let mut col = k.zero_vector(level_dim(dst));
                    for s in 0..=t + 1 {
                        for j in 0..n {
                            let mut idx = blk.index.clone();
                            idx.insert(s, j);
                            let target = &dst[block_position(dst, &idx, n)];
                            let mut raw = k.zero_vector(target.raw);
                            let mut tt = tuple.clone();
                            tt.insert(s, 0);
                            for (c, u) in builder.units[j].iter().enumerate() {
                                if !u.is_zero() {
                                    tt[s] = c;
                                    raw[target.encode(&tt)] = u.clone();
                                }
                            }
                            add_raw(&mut col, k, target, &raw, s % 2 == 0);
                        }
                    }
                    cols.push(col);
                }
            }
            Matrix::from_columns(k, level_dim(dst), &cols)
        })
        .collect();

    let mut tor_flags = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let t = tor_dims(
                &Module::restriction_of(&cover[i], Side::Right),
                &Module::restriction_of(&cover[j], Side::Left),
                1,
            )?;
            if t.dims[1] != 0 {
                tor_flags.push(TorFlag {
                    left: i,
                    right: j,
                    tor1: t.dims[1],
                });
            }
        }
    }
    Ok(CobarComplex {
        base: base.clone(),
        cover: cover.to_vec(),
        module: module.cloned(),
        t_max,
        levels,
        augmentation,
        differentials,
        tor_flags,
    })
}

impl CobarComplex {
    pub fn level_dims(&self) -> Vec<usize> {
        self.levels.iter().map(|l| level_dim(l)).collect()
    }

    /// Dimension of each summand of a level, keyed by multi-index.
    pub fn block_dims(&self, t: usize) -> Vec<(Vec<usize>, usize)> {
        self.levels[t].iter().map(|b| (b.index.clone(), b.dim())).collect()
    }

    pub fn bottom_dim(&self) -> usize {
        self.augmentation.cols()
    }

    pub fn squares_vanish(&self) -> bool {
        let first = self.differentials.first().is_none_or(|d| d.mul(&self.augmentation).is_zero());
        first && self.differentials.windows(2).all(|w| w[1].mul(&w[0]).is_zero())
    }

    /// Positions `1 ≤ t < t_max` where the complex is exact.
    pub fn exact_positions(&self) -> Vec<usize> {
        let dims = self.level_dims();
        (1..self.t_max)
            .filter(|t| self.differentials[t - 1].rank() + self.differentials[*t].rank() == dims[*t])
            .collect()
    }

    fn left_action(&self, t: Option<usize>) -> Vec<Matrix> {
        let k = self.base.field();
        match t {
            None => match &self.module {
                Some(m) => m.action().to_vec(),
                None => self.base.basis().iter().map(|b| self.base.left_mult_matrix(b)).collect(),
            },
            Some(t) => {
                let blocks = &self.levels[t];
                let dim = level_dim(blocks);
                (0..self.base.dim())
                    .map(|a| {
                        let mut cols = Vec::with_capacity(dim);
                        for blk in blocks {
                            let f = &self.cover[blk.index[0]];
                            let l = f.target().left_mult_matrix(&f.image_of_basis(a));
                            for tuple in blk.basis_tuples() {
                                let mut col = k.zero_vector(dim);
                                let mut raw = k.zero_vector(blk.raw);
                                let mut tt = tuple.clone();
                                for c in 0..l.rows() {
                                    let e = l.get(c, tuple[0]);
                                    if !e.is_zero() {
                                        tt[0] = c;
                                        raw[blk.encode(&tt)] = e.clone();
                                    }
                                }
                                add_raw(&mut col, k, blk, &raw, true);
                                cols.push(col);
                            }
                        }
                        Matrix::from_columns(k, dim, &cols)
                    })
                    .collect()
            }
        }
    }

    /// A contracting homotopy by left module maps `h⁰: L⁰ → bottom`,
    /// `hᵗ: Lᵗ → Lᵗ⁻¹` for `t ≤ t_max`, with `h∘aug = 1` and
    /// `δh + hδ = 1` on levels `0..t_max`.
    pub fn split_homotopy(&self) -> Option<Vec<Matrix>> {
        let k = self.base.field();
        let dims = self.level_dims();
        // h^t: rows = dim of level t-1 (bottom for t = 0), cols = dims[t]
        let rows_of = |t: usize| if t == 0 { self.bottom_dim() } else { dims[t - 1] };
        let mut offsets = Vec::new();
        let mut nvars = 0;
        for t in 0..=self.t_max {
            offsets.push(nvars);
            nvars += rows_of(t) * dims[t];
        }
        let var = |t: usize, p: usize, q: usize| offsets[t] + p * dims[t] + q;
        let mut eqs: Vec<(SparseVec, crate::exactlin::Scalar)> = Vec::new();
        let push = |eqs: &mut Vec<(SparseVec, crate::exactlin::Scalar)>, v: SparseVec, rhs| {
            let v: SparseVec = v.into_iter().filter(|(_, c)| !c.is_zero()).collect();
            eqs.push((v, rhs));
        };
        let acc = |v: &mut SparseVec, key: usize, c: crate::exactlin::Scalar| {
            let cur = v.remove(&key).unwrap_or_else(|| k.zero());
            v.insert(key, k.add(&cur, &c));
        };
        // h^0 ∘ aug = 1
        let b = self.bottom_dim();
        for p in 0..b {
            for q in 0..b {
                let mut v = SparseVec::new();
                for r in 0..dims[0] {
                    let a = self.augmentation.get(r, q);
                    if !a.is_zero() {
                        acc(&mut v, var(0, p, r), a.clone());
                    }
                }
                push(&mut eqs, v, if p == q { k.one() } else { k.zero() });
            }
        }
        // δ^{t-1} h^t + h^{t+1} δ^t = 1 on level t
        for t in 0..self.t_max {
            let prev = if t == 0 { &self.augmentation } else { &self.differentials[t - 1] };
            let next = &self.differentials[t];
            for p in 0..dims[t] {
                for q in 0..dims[t] {
                    let mut v = SparseVec::new();
                    for r in 0..rows_of(t) {
                        let a = prev.get(p, r);
                        if !a.is_zero() {
                            acc(&mut v, var(t, r, q), a.clone());
                        }
                    }
                    for r in 0..dims[t + 1] {
                        let a = next.get(r, q);
                        if !a.is_zero() {
                            acc(&mut v, var(t + 1, p, r), a.clone());
                        }
                    }
                    push(&mut eqs, v, if p == q { k.one() } else { k.zero() });
                }
            }
        }
        // h^t λ_a = λ_a h^t
        let mut actions: Vec<Vec<Matrix>> = vec![self.left_action(None)];
        for t in 0..=self.t_max {
            actions.push(self.left_action(Some(t)));
        }
        for t in 0..=self.t_max {
            let (lsrc, ldst) = (&actions[t + 1], &actions[t]);
            for a in 0..self.base.dim() {
                for p in 0..rows_of(t) {
                    for q in 0..dims[t] {
                        let mut v = SparseVec::new();
                        for r in 0..dims[t] {
                            let c = lsrc[a].get(r, q);
                            if !c.is_zero() {
                                acc(&mut v, var(t, p, r), c.clone());
                            }
                        }
                        for r in 0..rows_of(t) {
                            let c = ldst[a].get(p, r);
                            if !c.is_zero() {
                                acc(&mut v, var(t, r, q), k.neg(c));
                            }
                        }
                        push(&mut eqs, v, k.zero());
                    }
                }
            }
        }
        let sol = solve_sparse_system(k, nvars, eqs)?;
        Some(
            (0..=self.t_max)
                .map(|t| {
                    let rows = (0..rows_of(t))
                        .map(|p| (0..dims[t]).map(|q| sol[var(t, p, q)].clone()).collect())
                        .collect();
                    Matrix::from_rows(k, dims[t], rows).expect("shape")
                })
                .collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DescentReport {
    pub level_dims: Vec<usize>,
    pub global_dim: usize,
    pub kernel_dim: usize,
    pub augmentation_injective: bool,
    pub kernel_recovered: bool,
    pub squares_vanish: bool,
    pub exact_positions: Vec<usize>,
    pub split_exact: bool,
    /// Exactness is known in all degrees only when split.
    pub verified_up_to: Option<usize>,
    pub tor_flags: Vec<TorFlag>,
    /// Dimension of `Bᵢ ⊗_A M` (or `Bᵢ`) per cover member.
    pub local_dims: Vec<usize>,
}

impl DescentReport {
    pub fn pass(&self) -> bool {
        self.kernel_recovered && self.squares_vanish && self.exact_positions.len() + 2 >= self.level_dims.len()
    }
}

pub fn report(c: &CobarComplex) -> DescentReport {
    let d0 = &c.differentials[0];
    let kernel = d0.kernel_basis();
    let image = c.augmentation.image();
    let augmentation_injective = c.augmentation.rank() == c.bottom_dim();
    let kernel_recovered = augmentation_injective && kernel.contains_subspace(&image) && kernel.dim() == image.dim();
    let split_exact = c.split_homotopy().is_some();
    DescentReport {
        level_dims: c.level_dims(),
        global_dim: c.bottom_dim(),
        kernel_dim: kernel.dim(),
        augmentation_injective,
        kernel_recovered,
        squares_vanish: c.squares_vanish(),
        exact_positions: c.exact_positions(),
        split_exact,
        verified_up_to: if split_exact { None } else { Some(c.t_max) },
        tor_flags: c.tor_flags.clone(),
        local_dims: c.levels[0].iter().map(LevelBlock::dim).collect(),
    }
}

pub fn descendability_check(base: &AlgRef, cover: &[AlgebraMorphism], t_max: usize) -> Result<DescentReport> {
    if t_max == 0 {
        return Err(Error::Malformed("t_max must be at least 1".into()));
    }
    Ok(report(&cobar(base, cover, t_max)?))
}

pub fn module_descent(m: &Module, cover: &[AlgebraMorphism], t_max: usize) -> Result<DescentReport> {
    if t_max == 0 {
        return Err(Error::Malformed("t_max must be at least 1".into()));
    }
    Ok(report(&cobar_with_module(m.algebra(), cover, Some(m), t_max)?))
}

/// For `f: A → B`, sends each section `O_A(u)` to `O_B(v)` where `v` is the
/// node of `B ∗_A u`; `None` when that node cannot be located.
pub fn induced_section_maps(
    f: &AlgebraMorphism,
    source: &LocalizationLattice,
    target: &LocalizationLattice,
) -> Result<Vec<Option<(usize, AlgebraMorphism)>>> {
    if f.source() != &source.base || f.target() != &target.base {
        return Err(Error::AlgebraMismatch("section maps between the wrong lattices".into()));
    }
    let cap = source.options.degree_cap;
    source
        .nodes
        .iter()
        .map(|node| {
            let fp = free_product(&node.map, f, cap)?;
            match fp.status {
                FreeProductStatus::Zero => {
                    let zero = target.nodes[target.bottom()].target().clone();
                    let m = Matrix::zeros(zero.field(), 0, node.target().dim());
                    Ok(Some((target.bottom(), AlgebraMorphism::new(node.target().clone(), zero, m)?)))
                }
                FreeProductStatus::FiniteDim { .. } => {
                    let maps = fp.maps.expect("maps accompany a finite free product");
                    let Some(v) = target.locate(&maps.from_right)? else {
                        return Ok(None);
                    };
                    let iso = factorization_map(&target.nodes[v].map, &maps.from_right)?
                        .ok_or_else(|| Error::InvariantViolation("located node without factorization".into()))?;
                    Ok(Some((v, maps.from_left.then(&iso)?)))
                }
                _ => Ok(None),
            }
        })
        .collect()
}
