//! Homotopical epimorphisms out of a fixed algebra and the lattice they
//! form under factorization.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::algcore::{ideal_closure, primitive_idempotents, quotient_by_ideal, radical, AlgRef, AlgebraMorphism};
use crate::error::{Error, Result};
use crate::exactlin::{Matrix, Subspace, Vector};
use crate::freeprod::{free_product, FreeProductStatus};
use crate::modhom::{tensor_over, tor_of_morphism, Bimodule, Tensor, TorDims};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EpiCertificate {
    /// Multiplication `B ⊗_A B → B` is bijective.
    pub mult_iso: bool,
    pub tor_dims: Vec<usize>,
    pub tor_zero_up_to: usize,
    pub max_deg: usize,
    /// The resolution terminated, so the vanishing holds in all degrees.
    pub complete: bool,
}

impl EpiCertificate {
    pub fn is_valid(&self) -> bool {
        self.mult_iso && self.max_deg >= 1 && self.tor_zero_up_to == self.max_deg
    }

    /// Vanishing holds in every degree, not just up to the truncation.
    pub fn is_unconditional(&self) -> bool {
        self.is_valid() && self.complete
    }

    fn trivial(max_deg: usize) -> Self {
        EpiCertificate {
            mult_iso: true,
            tor_dims: vec![0; max_deg + 1],
            tor_zero_up_to: max_deg,
            max_deg,
            complete: true,
        }
    }
}

fn multiplication_is_iso(f: &AlgebraMorphism) -> Result<bool> {
    let left = Bimodule::regular(f.target().clone()).restrict_right(f)?;
    let right = Bimodule::regular(f.target().clone()).restrict_left(f)?;
    let t = tensor_over(&left, &right)?;
    let alg = f.target();
    if t.dim() != alg.dim() {
        return Ok(false);
    }
    let cols: Vec<Vector> = t
        .basis_pairs()
        .iter()
        .map(|(i, j)| alg.structure_constant(*i, *j).clone())
        .collect();
    Ok(Matrix::from_columns(alg.field(), alg.dim(), &cols).rank() == alg.dim())
}

pub fn check_homotopical_epi(f: &AlgebraMorphism, max_deg: usize) -> Result<EpiCertificate> {
    if f.target().is_zero_ring() {
        return Ok(EpiCertificate::trivial(max_deg));
    }
    let mult_iso = multiplication_is_iso(f)?;
    let tor: TorDims = tor_of_morphism(f, max_deg)?;
    Ok(EpiCertificate {
        mult_iso,
        tor_zero_up_to: tor.zero_up_to(),
        tor_dims: tor.dims,
        max_deg,
        complete: tor.complete,
    })
}

/// Matrix of `b ↦ b ⊗ 1 : B → B ⊗_A C` and of `b ↦ 1 ⊗ b : B → C ⊗_A B`.
fn unit_maps(f: &AlgebraMorphism, g: &AlgebraMorphism) -> Result<(Matrix, Matrix, Tensor)> {
    let b_right = Bimodule::regular(f.target().clone()).restrict_right(f)?;
    let c_left = Bimodule::regular(g.target().clone()).restrict_left(g)?;
    let bc = tensor_over(&b_right, &c_left)?;
    let c_right = Bimodule::regular(g.target().clone()).restrict_right(g)?;
    let b_left = Bimodule::regular(f.target().clone()).restrict_left(f)?;
    let cb = tensor_over(&c_right, &b_left)?;
    let b = f.target();
    let c = g.target();
    let m1: Vec<Vector> = b.basis().iter().map(|x| bc.pure(x, c.unit())).collect();
    let m2: Vec<Vector> = b.basis().iter().map(|x| cb.pure(c.unit(), x)).collect();
    let k = b.field();
    Ok((
        Matrix::from_columns(k, bc.dim(), &m1),
        Matrix::from_columns(k, cb.dim(), &m2),
        bc,
    ))
}

fn is_iso(m: &Matrix) -> bool {
    m.rows() == m.cols() && m.rank() == m.cols()
}

/// Whether `f: A → B` factors through `g: A → C`, i.e. `B` lies under `C`.
pub fn factors_through(f: &AlgebraMorphism, g: &AlgebraMorphism) -> Result<bool> {
    if f.source() != g.source() {
        return Err(Error::AlgebraMismatch("factorization between maps from different algebras".into()));
    }
    if f.target().is_zero_ring() {
        return Ok(true);
    }
    let (m1, m2, _) = unit_maps(f, g)?;
    Ok(is_iso(&m1) && is_iso(&m2))
}

/// The map `h: C → B` with `h ∘ g = f`, when `f` factors through `g`.
pub fn factorization_map(f: &AlgebraMorphism, g: &AlgebraMorphism) -> Result<Option<AlgebraMorphism>> {
    if !factors_through(f, g)? {
        return Ok(None);
    }
    let b = f.target();
    let c = g.target();
    if b.is_zero_ring() {
        let m = Matrix::zeros(b.field(), 0, c.dim());
        return Ok(Some(AlgebraMorphism::new(c.clone(), b.clone(), m)?));
    }
    let (m1, _, bc) = unit_maps(f, g)?;
    // b ⊗ 1 is invertible; c ↦ (b ⊗ 1)^{-1}(1 ⊗ c)
    let images: Vec<Vector> = c
        .basis()
        .iter()
        .map(|y| {
            let t = bc.pure(b.unit(), y);
            m1.solve_affine(&t).expect("invertible unit map")
        })
        .collect();
    let h = AlgebraMorphism::from_images(c.clone(), b.clone(), &images)?;
    if g.then(&h)?.matrix() != f.matrix() {
        return Err(Error::InvariantViolation("factorization map does not commute".into()));
    }
    Ok(Some(h))
}

/// Mutual factorization with explicit inverse maps over `A`.
pub fn hom_rigidity(f: &AlgebraMorphism, g: &AlgebraMorphism) -> Result<Option<(AlgebraMorphism, AlgebraMorphism)>> {
    let (Some(h), Some(k)) = (factorization_map(f, g)?, factorization_map(g, f)?) else {
        return Ok(None);
    };
    let hk = k.then(&h)?;
    let kh = h.then(&k)?;
    if *hk.matrix() != Matrix::identity(f.source().field(), f.target().dim())
        || *kh.matrix() != Matrix::identity(f.source().field(), g.target().dim())
    {
        return Err(Error::InvariantViolation("mutual factorizations are not inverse".into()));
    }
    Ok(Some((h, k)))
}

pub fn equivalent(f: &AlgebraMorphism, g: &AlgebraMorphism) -> Result<bool> {
    Ok(factors_through(f, g)? && factors_through(g, f)?)
}

#[derive(Clone, Debug)]
pub struct Candidate {
    pub id: String,
    pub map: AlgebraMorphism,
    /// Generators of the smashing kernel, when known.
    pub kernel_generators: Vec<String>,
}

impl Candidate {
    pub fn new(id: impl Into<String>, map: AlgebraMorphism) -> Self {
        Candidate {
            id: id.into(),
            map,
            kernel_generators: Vec::new(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LocalizationNode {
    pub id: String,
    pub map: AlgebraMorphism,
    pub certificate: EpiCertificate,
    pub kernel_generators: Vec<String>,
}

impl LocalizationNode {
    pub fn target(&self) -> &AlgRef {
        self.map.target()
    }

    pub fn is_zero(&self) -> bool {
        self.map.target().is_zero_ring()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Meet {
    Node(usize),
    Undetermined,
}

impl Meet {
    pub fn node(&self) -> Option<usize> {
        match self {
            Meet::Node(i) => Some(*i),
            Meet::Undetermined => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Rejection {
    NotEpimorphism { id: String, certificate: EpiCertificate },
    Duplicate { id: String, kept: String },
}

#[derive(Clone, Copy, Debug)]
pub struct LatticeOptions {
    pub max_deg: usize,
    pub degree_cap: usize,
}

impl Default for LatticeOptions {
    fn default() -> Self {
        LatticeOptions {
            max_deg: crate::modhom::DEFAULT_MAX_DEG,
            degree_cap: crate::freeprod::DEFAULT_DEGREE_CAP,
        }
    }
}

/// Node 0 is the zero localization and the last node is the identity.
#[derive(Clone, Debug)]
pub struct LocalizationLattice {
    pub base: AlgRef,
    pub nodes: Vec<LocalizationNode>,
    pub leq: Vec<Vec<bool>>,
    pub meets: Vec<Vec<Meet>>,
    pub rejected: Vec<Rejection>,
    pub options: LatticeOptions,
}

impl LocalizationLattice {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn bottom(&self) -> usize {
        0
    }

    pub fn top(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn meet(&self, i: usize, j: usize) -> Meet {
        self.meets[i][j]
    }

    /// Node equivalent to the given localization, if any.
    pub fn locate(&self, f: &AlgebraMorphism) -> Result<Option<usize>> {
        if f.target().is_zero_ring() {
            return Ok(Some(self.bottom()));
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if equivalent(f, &n.map)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// Pairs `(i, j)` with `i < j` in the order and nothing strictly between.
    pub fn covering_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let lt = |a: usize, b: usize| a != b && self.leq[a][b];
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if lt(i, j) && !(0..n).any(|m| lt(i, m) && lt(m, j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Checks the partial order, the extremal nodes and the meet table.
    pub fn verify(&self) -> Vec<String> {
        let n = self.len();
        let mut issues = Vec::new();
        for i in 0..n {
            if !self.leq[i][i] {
                issues.push(format!("{} is not ≤ itself", self.nodes[i].id));
            }
            if !self.leq[0][i] || !self.leq[i][n - 1] {
                issues.push(format!("{} is not between bottom and top", self.nodes[i].id));
            }
            for j in 0..n {
                if i != j && self.leq[i][j] && self.leq[j][i] {
                    issues.push(format!("{} and {} are equivalent", self.nodes[i].id, self.nodes[j].id));
                }
                for l in 0..n {
                    if self.leq[i][j] && self.leq[j][l] && !self.leq[i][l] {
                        issues.push(format!("order not transitive at {i},{j},{l}"));
                    }
                }
                let Meet::Node(m) = self.meets[i][j] else { continue };
                if self.meets[j][i] != Meet::Node(m) {
                    issues.push(format!("meet of {i},{j} not symmetric"));
                }
                if !self.leq[m][i] || !self.leq[m][j] {
                    issues.push(format!("meet of {i},{j} is not a lower bound"));
                }
                if (0..n).any(|l| self.leq[l][i] && self.leq[l][j] && !self.leq[l][m]) {
                    issues.push(format!("meet of {i},{j} is not the greatest lower bound"));
                }
            }
            if self.meets[i][i] != Meet::Node(i) {
                issues.push(format!("meet of {i} with itself"));
            }
        }
        issues
    }

    pub fn undetermined_meets(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|(i, j)| self.meets[*i][*j] == Meet::Undetermined)
            .collect()
    }
}

/// Certifies the candidates, merges equivalent ones and fills in the order
/// and the meets. The meet of incomparable nodes is the free product,
/// located in the lattice.
pub fn build_lattice(
    base: &AlgRef,
    base_id: &str,
    candidates: &[Candidate],
    opts: LatticeOptions,
) -> Result<LocalizationLattice> {
    let certs: Vec<Result<EpiCertificate>> = candidates
        .par_iter()
        .map(|c| {
            if c.map.source() != base {
                return Err(Error::AlgebraMismatch(format!("candidate `{}` has another source", c.id)));
            }
            check_homotopical_epi(&c.map, opts.max_deg)
        })
        .collect();
    let bottom = LocalizationNode {
        id: "0".into(),
        map: AlgebraMorphism::to_zero(base.clone()),
        certificate: EpiCertificate::trivial(opts.max_deg),
        kernel_generators: Vec::new(),
    };
    let top = LocalizationNode {
        id: base_id.into(),
        map: AlgebraMorphism::identity(base.clone()),
        certificate: check_homotopical_epi(&AlgebraMorphism::identity(base.clone()), opts.max_deg)?,
        kernel_generators: Vec::new(),
    };
    let mut middle: Vec<LocalizationNode> = Vec::new();
    let mut rejected = Vec::new();
    for (c, cert) in candidates.iter().zip(certs) {
        let cert = cert?;
        if !cert.is_valid() {
            rejected.push(Rejection::NotEpimorphism {
                id: c.id.clone(),
                certificate: cert,
            });
            continue;
        }
        if c.map.target().is_zero_ring() {
            rejected.push(Rejection::Duplicate {
                id: c.id.clone(),
                kept: bottom.id.clone(),
            });
            continue;
        }
        if equivalent(&c.map, &top.map)? {
            rejected.push(Rejection::Duplicate {
                id: c.id.clone(),
                kept: top.id.clone(),
            });
            continue;
        }
        let mut dup = None;
        for (i, n) in middle.iter().enumerate() {
            if equivalent(&c.map, &n.map)? {
                dup = Some(i);
                break;
            }
        }
        let node = LocalizationNode {
            id: c.id.clone(),
            map: c.map.clone(),
            certificate: cert,
            kernel_generators: c.kernel_generators.clone(),
        };
        match dup {
            None => middle.push(node),
            Some(i) => {
                if node.id < middle[i].id {
                    let old = std::mem::replace(&mut middle[i], node);
                    rejected.push(Rejection::Duplicate {
                        id: old.id,
                        kept: middle[i].id.clone(),
                    });
                } else {
                    rejected.push(Rejection::Duplicate {
                        id: node.id,
                        kept: middle[i].id.clone(),
                    });
                }
            }
        }
    }
    let mut nodes = vec![bottom];
    nodes.extend(middle);
    nodes.push(top);
    let n = nodes.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let leq_flat: Vec<Result<bool>> = pairs
        .par_iter()
        .map(|(i, j)| {
            if i == j || *i == 0 || *j == n - 1 {
                Ok(true)
            } else if *j == 0 || *i == n - 1 {
                Ok(false)
            } else {
                factors_through(&nodes[*i].map, &nodes[*j].map)
            }
        })
        .collect();
    let mut leq = vec![vec![false; n]; n];
    for ((i, j), r) in pairs.iter().zip(leq_flat) {
        leq[*i][*j] = r?;
    }
    let mut lattice = LocalizationLattice {
        base: base.clone(),
        nodes,
        leq,
        meets: vec![vec![Meet::Undetermined; n]; n],
        rejected,
        options: opts,
    };
    let upper: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let meets: Vec<Result<Meet>> = upper
        .par_iter()
        .map(|(i, j)| compute_meet(&lattice, *i, *j))
        .collect();
    for ((i, j), m) in upper.iter().zip(meets) {
        let m = m?;
        lattice.meets[*i][*j] = m;
        lattice.meets[*j][*i] = m;
    }
    Ok(lattice)
}

fn compute_meet(l: &LocalizationLattice, i: usize, j: usize) -> Result<Meet> {
    if l.leq[i][j] {
        return Ok(Meet::Node(i));
    }
    if l.leq[j][i] {
        return Ok(Meet::Node(j));
    }
    let fp = free_product(&l.nodes[i].map, &l.nodes[j].map, l.options.degree_cap)?;
    match fp.status {
        FreeProductStatus::Zero => Ok(Meet::Node(l.bottom())),
        FreeProductStatus::FiniteDim { .. } => {
            let maps = fp.maps.expect("maps accompany a finite free product");
            Ok(l.locate(&maps.from_base)?.map_or(Meet::Undetermined, Meet::Node))
        }
        _ => Ok(Meet::Undetermined),
    }
}

/// Quotients of `A` by ideals generated by subsets of the primitive
/// idempotents and a radical basis, one per distinct proper nonzero ideal.
pub fn interesting_quotients(a: &AlgRef) -> Result<Vec<Candidate>> {
    let mut elements: Vec<Vector> = primitive_idempotents(a)?;
    elements.extend(radical(a)?.basis());
    if elements.len() > 12 {
        return Err(Error::Undetermined(format!(
            "{} interesting elements is too many to enumerate subsets",
            elements.len()
        )));
    }
    let mut seen: Vec<Subspace> = Vec::new();
    let mut out = Vec::new();
    for mask in 1u32..(1 << elements.len()) {
        let gens: Vec<Vector> = (0..elements.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| elements[i].clone())
            .collect();
        let ideal = ideal_closure(a, &gens);
        if ideal.dim() == a.dim() || ideal.dim() == 0 || seen.contains(&ideal) {
            continue;
        }
        let (_, proj) = quotient_by_ideal(a, &ideal)?;
        let names: Vec<String> = gens.iter().map(|g| a.format_element(g)).collect();
        out.push(Candidate::new(format!("A/({})", names.join(", ")), proj));
        seen.push(ideal);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum NodeImage {
    Node(usize),
    /// The pushout is nonzero and finite-dimensional but matches no node.
    Unmatched { dim: usize },
    Undetermined,
}

/// For `f: B → A` and the lattice of `B`, sends `B → C` to `A → C ∗_B A`
/// and locates it in the lattice of `A`.
pub fn induced_lattice_map(
    f: &AlgebraMorphism,
    source: &LocalizationLattice,
    target: &LocalizationLattice,
) -> Result<Vec<NodeImage>> {
    if f.source() != &source.base || f.target() != &target.base {
        return Err(Error::AlgebraMismatch("induced map between the wrong lattices".into()));
    }
    let cap = source.options.degree_cap;
    source
        .nodes
        .par_iter()
        .map(|node| {
            let fp = free_product(&node.map, f, cap)?;
            Ok(match fp.status {
                FreeProductStatus::Zero => NodeImage::Node(target.bottom()),
                FreeProductStatus::FiniteDim { algebra, .. } => {
                    let maps = fp.maps.expect("maps accompany a finite free product");
                    match target.locate(&maps.from_right)? {
                        Some(i) => NodeImage::Node(i),
                        None => NodeImage::Unmatched { dim: algebra.dim() },
                    }
                }
                _ => NodeImage::Undetermined,
            })
        })
        .collect()
}

/// The zero map out of `A`, shared by constructors that need a bottom.
pub fn zero_localization(a: &AlgRef) -> AlgebraMorphism {
    AlgebraMorphism::to_zero(Arc::clone(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algcore::{matrix_algebra, path_algebra, quotient_algebra, Algebra, Quiver};
    use crate::exactlin::FieldSpec;
    use crate::freeprod::commutative_collapse_check;

    const Q: FieldSpec = FieldSpec::Rationals;

    fn ka2() -> AlgRef {
        let q = Quiver::new(
            vec!["e1".into(), "e3".into()],
            vec![("e1".into(), "e3".into(), "e2".into())],
        );
        Arc::new(path_algebra(Q, &q).unwrap())
    }

    fn proj(a: &AlgRef, kill: &[usize]) -> AlgebraMorphism {
        let gens: Vec<Vector> = kill.iter().map(|i| a.basis_element(*i)).collect();
        quotient_algebra(a, &gens).unwrap().1
    }

    fn ka2_candidates(a: &AlgRef) -> Vec<Candidate> {
        let m2: AlgRef = Arc::new(matrix_algebra(Q, 2).unwrap());
        let inc = AlgebraMorphism::from_images(
            a.clone(),
            m2.clone(),
            &[m2.basis_element(0), m2.basis_element(2), m2.basis_element(3)],
        )
        .unwrap();
        vec![
            Candidate::new("P1", proj(a, &[0, 1])),
            Candidate::new("P2", inc),
            Candidate::new("S2", proj(a, &[1, 2])),
        ]
    }

    #[test]
    fn epi_examples() {
        let a = ka2();
        for c in ka2_candidates(&a) {
            let cert = check_homotopical_epi(&c.map, 10).unwrap();
            assert!(cert.is_unconditional(), "{}", c.id);
        }
        let d: AlgRef = Arc::new(Algebra::monogenic(Q, &[Q.zero(), Q.zero()]).unwrap());
        let cert = check_homotopical_epi(&proj(&d, &[1]), 10).unwrap();
        assert!(cert.mult_iso);
        assert!(!cert.is_valid());
        assert_eq!(cert.tor_zero_up_to, 0);
        assert_eq!(cert.tor_dims[1], 1);
    }

    #[test]
    fn factorization_examples() {
        let a = ka2();
        let cs = ka2_candidates(&a);
        let id = AlgebraMorphism::identity(a.clone());
        for c in &cs {
            assert!(factors_through(&c.map, &c.map).unwrap());
            assert!(factors_through(&c.map, &id).unwrap());
            assert!(!factors_through(&id, &c.map).unwrap());
        }
        assert!(!factors_through(&cs[0].map, &cs[1].map).unwrap());
        assert!(!factors_through(&cs[1].map, &cs[0].map).unwrap());
        let h = factorization_map(&cs[0].map, &id).unwrap().unwrap();
        assert_eq!(h.matrix(), cs[0].map.matrix());
    }

    #[test]
    fn ka2_diamond() {
        let a = ka2();
        let l = build_lattice(&a, "kA2", &ka2_candidates(&a), LatticeOptions::default()).unwrap();
        let ids: Vec<&str> = l.nodes.iter().map(|n| n.id.as_str()).collect();
        assert_eq!(ids, ["0", "P1", "P2", "S2", "kA2"]);
        assert!(l.verify().is_empty(), "{:?}", l.verify());
        for i in 1..4 {
            for j in 1..4 {
                if i != j {
                    assert!(!l.leq[i][j]);
                    assert_eq!(l.meet(i, j), Meet::Node(0));
                }
            }
        }
        assert_eq!(l.covering_pairs().len(), 6);
    }

    #[test]
    fn field_and_product_lattices() {
        let k: AlgRef = Arc::new(Algebra::ground(Q));
        let l = build_lattice(&k, "k", &[], LatticeOptions::default()).unwrap();
        assert_eq!(l.len(), 2);
        assert!(l.leq[0][1] && !l.leq[1][0]);

        let kk: AlgRef = Arc::new(Algebra::field_power(Q, 2));
        let cs = vec![Candidate::new("pi1", proj(&kk, &[1])), Candidate::new("pi2", proj(&kk, &[0]))];
        let l = build_lattice(&kk, "kxk", &cs, LatticeOptions::default()).unwrap();
        assert_eq!(l.len(), 4);
        assert!(!l.leq[1][2] && !l.leq[2][1]);
        assert_eq!(l.meet(1, 2), Meet::Node(0));
        assert!(l.verify().is_empty());
    }

    #[test]
    fn duplicates_keep_smallest_id() {
        let kk: AlgRef = Arc::new(Algebra::field_power(Q, 2));
        let p = proj(&kk, &[1]);
        let cs = vec![
            Candidate::new("zeta", p.clone()),
            Candidate::new("alpha", p),
            Candidate::new("everything", AlgebraMorphism::identity(kk.clone())),
        ];
        let l = build_lattice(&kk, "kxk", &cs, LatticeOptions::default()).unwrap();
        assert_eq!(l.nodes.iter().map(|n| n.id.as_str()).collect::<Vec<_>>(), ["0", "alpha", "kxk"]);
        assert_eq!(l.rejected.len(), 2);
    }

    #[test]
    fn automatic_candidates_for_ka2() {
        let a = ka2();
        let cs = interesting_quotients(&a).unwrap();
        let l = build_lattice(&a, "kA2", &cs, LatticeOptions::default()).unwrap();
        // the two vertex quotients survive; A/(e2) = k × k has Tor_1 ≠ 0
        assert_eq!(l.len(), 4);
        assert!(l
            .rejected
            .iter()
            .any(|r| matches!(r, Rejection::NotEpimorphism { id, .. } if id == "A/(e2)")));
    }

    #[test]
    fn hom_rigidity_on_equivalent_nodes() {
        let a = ka2();
        let p1 = proj(&a, &[0, 1]);
        let p1_again = proj(&a, &[0, 1, 1]);
        assert!(hom_rigidity(&p1, &p1_again).unwrap().is_some());
        let s2 = proj(&a, &[1, 2]);
        assert!(hom_rigidity(&p1, &s2).unwrap().is_none());
    }

    #[test]
    fn induced_maps() {
        let kk: AlgRef = Arc::new(Algebra::field_power(Q, 2));
        let cs = vec![Candidate::new("pi1", proj(&kk, &[1])), Candidate::new("pi2", proj(&kk, &[0]))];
        let lk = build_lattice(&kk, "kxk", &cs, LatticeOptions::default()).unwrap();
        let m2: AlgRef = Arc::new(matrix_algebra(Q, 2).unwrap());
        let lm = build_lattice(&m2, "M2", &[], LatticeOptions::default()).unwrap();
        let diag =
            AlgebraMorphism::from_images(kk.clone(), m2.clone(), &[m2.basis_element(0), m2.basis_element(3)]).unwrap();
        let img = induced_lattice_map(&diag, &lk, &lm).unwrap();
        assert_eq!(img, vec![NodeImage::Node(0), NodeImage::Node(0), NodeImage::Node(0), NodeImage::Node(1)]);

        let id = AlgebraMorphism::identity(kk.clone());
        let img = induced_lattice_map(&id, &lk, &lk).unwrap();
        assert_eq!(img, (0..4).map(NodeImage::Node).collect::<Vec<_>>());

        let k: AlgRef = Arc::new(Algebra::ground(Q));
        let lkk = build_lattice(&k, "k", &[], LatticeOptions::default()).unwrap();
        let p = AlgebraMorphism::from_images(kk.clone(), k.clone(), &[k.unit().clone(), k.zero()]).unwrap();
        let img = induced_lattice_map(&p, &lk, &lkk).unwrap();
        assert_eq!(img, vec![NodeImage::Node(0), NodeImage::Node(1), NodeImage::Node(0), NodeImage::Node(1)]);
    }

    #[test]
    fn commutative_meets_are_tensor_products() {
        let k3: AlgRef = Arc::new(Algebra::field_power(Q, 3));
        let cs = interesting_quotients(&k3).unwrap();
        let l = build_lattice(&k3, "k3", &cs, LatticeOptions::default()).unwrap();
        assert_eq!(l.len(), 8);
        assert!(l.verify().is_empty());
        for i in 0..l.len() {
            for j in 0..l.len() {
                let m = l.meet(i, j).node().unwrap();
                if l.nodes[i].is_zero() || l.nodes[j].is_zero() {
                    assert_eq!(m, 0);
                    continue;
                }
                let r = commutative_collapse_check(&l.nodes[i].map, &l.nodes[j].map, 8).unwrap();
                assert!(r.pass);
                assert_eq!(l.nodes[m].target().dim(), r.tensor_dim);
            }
        }
    }
}
