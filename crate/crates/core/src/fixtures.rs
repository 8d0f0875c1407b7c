//! Small algebras, maps and posites used by tests and the command line.

use std::sync::Arc;

use crate::algcore::{matrix_algebra, path_algebra, quotient_algebra, AlgRef, Algebra, AlgebraMorphism, Quiver};
use crate::epiloc::{build_lattice, interesting_quotients, Candidate, LatticeOptions, LocalizationLattice};
use crate::error::Result;
use crate::exactlin::FieldSpec;
use crate::topos::{CoverageMode, PositeFixture};

pub const CATALOG: &[(&str, &str)] = &[
    ("ka2", "path algebra of e1 -> e3 with arrow e2, lower triangular 2x2 matrices"),
    ("m2", "2x2 matrices"),
    ("k", "the ground field"),
    ("k2", "k x k"),
    ("k3", "k x k x k"),
    ("dual", "k[x]/(x^2)"),
    ("idem", "k[x]/(x^2 - x)"),
    ("valuation", "posite: 0 < k, Q < Qxk < R with Qxk covered by {Q, k}"),
    ("dvr", "posite: chain 0 < Frac < R"),
];

pub fn ka2(field: FieldSpec) -> AlgRef {
    let q = Quiver::new(
        vec!["e1".into(), "e3".into()],
        vec![("e1".into(), "e3".into(), "e2".into())],
    );
    Arc::new(path_algebra(field, &q).expect("acyclic quiver"))
}

pub fn m2(field: FieldSpec) -> AlgRef {
    Arc::new(matrix_algebra(field, 2).expect("matrix algebra"))
}

pub fn field(field: FieldSpec) -> AlgRef {
    Arc::new(Algebra::ground(field))
}

pub fn field_power(field: FieldSpec, n: usize) -> AlgRef {
    Arc::new(Algebra::field_power(field, n))
}

pub fn dual_numbers(field: FieldSpec) -> AlgRef {
    Arc::new(Algebra::monogenic(field, &[field.zero(), field.zero()]).expect("monic"))
}

/// `k[x]/(x² − x)`.
pub fn idempotent_algebra(field: FieldSpec) -> AlgRef {
    Arc::new(Algebra::monogenic(field, &[field.zero(), field.neg(&field.one())]).expect("monic"))
}

fn kill(a: &AlgRef, idx: &[usize]) -> AlgebraMorphism {
    let gens: Vec<_> = idx.iter().map(|i| a.basis_element(*i)).collect();
    quotient_algebra(a, &gens).expect("quotient").1
}

/// `kA₂ → k` killing `e1, e2`; the target is spanned by `e3`.
pub fn ka2_p1(a: &AlgRef) -> AlgebraMorphism {
    kill(a, &[0, 1])
}

/// `kA₂ → k` killing `e2, e3`.
pub fn ka2_s2(a: &AlgRef) -> AlgebraMorphism {
    kill(a, &[1, 2])
}

/// `kA₂ ↪ M₂(k)` with `e1 ↦ E11`, `e2 ↦ E21`, `e3 ↦ E22`.
pub fn ka2_inclusion(a: &AlgRef) -> AlgebraMorphism {
    let m = m2(a.field());
    AlgebraMorphism::from_images(
        a.clone(),
        m.clone(),
        &[m.basis_element(0), m.basis_element(2), m.basis_element(3)],
    )
    .expect("algebra map")
}

pub fn ka2_candidates(a: &AlgRef) -> Vec<Candidate> {
    let mut p1 = Candidate::new("P1", ka2_p1(a));
    p1.kernel_generators = vec!["S2".into()];
    let mut p2 = Candidate::new("P2", ka2_inclusion(a));
    p2.kernel_generators = vec!["S2 -> P2 cone".into()];
    let mut s2 = Candidate::new("S2", ka2_s2(a));
    s2.kernel_generators = vec!["P1".into()];
    vec![p1, p2, s2]
}

pub fn ka2_lattice() -> Result<LocalizationLattice> {
    ka2_lattice_over(FieldSpec::Rationals)
}

pub fn ka2_lattice_over(field: FieldSpec) -> Result<LocalizationLattice> {
    let a = ka2(field);
    build_lattice(&a, "kA2", &ka2_candidates(&a), LatticeOptions::default())
}

pub fn field_lattice(f: FieldSpec) -> Result<LocalizationLattice> {
    build_lattice(&field(f), "k", &[], LatticeOptions::default())
}

/// `kⁿ` with every quotient by a set of its idempotents.
pub fn field_power_lattice(f: FieldSpec, n: usize) -> Result<LocalizationLattice> {
    let a = field_power(f, n);
    build_lattice(&a, &format!("k{n}"), &interesting_quotients(&a)?, LatticeOptions::default())
}

pub fn matrix_lattice(f: FieldSpec, n: usize) -> Result<LocalizationLattice> {
    let a: AlgRef = Arc::new(matrix_algebra(f, n)?);
    build_lattice(&a, &format!("M{n}"), &interesting_quotients(&a)?, LatticeOptions::default())
}

/// The two projections `k × k → k`.
pub fn kk_projections(f: FieldSpec) -> (AlgebraMorphism, AlgebraMorphism) {
    let a = field_power(f, 2);
    (kill(&a, &[1]), kill(&a, &[0]))
}

/// `k × k → M₂(k)` onto the diagonal. Its source is a fresh `k × k`, equal
/// to the source of [`kk_projections`].
pub fn diagonal(f: FieldSpec) -> AlgebraMorphism {
    let a = field_power(f, 2);
    let m = m2(f);
    AlgebraMorphism::from_images(a, m.clone(), &[m.basis_element(0), m.basis_element(3)]).expect("algebra map")
}

pub fn dual_projection(f: FieldSpec) -> AlgebraMorphism {
    kill(&dual_numbers(f), &[1])
}

pub fn valuation_posite() -> PositeFixture {
    let s = |x: &str| x.to_string();
    PositeFixture {
        elements: vec![s("0"), s("k"), s("Q"), s("Qxk"), s("R")],
        order: vec![
            (s("0"), s("k")),
            (s("0"), s("Q")),
            (s("k"), s("Qxk")),
            (s("Q"), s("Qxk")),
            (s("Qxk"), s("R")),
        ],
        covers: vec![(s("Qxk"), vec![s("Q"), s("k")])],
        mode: CoverageMode::Declared,
    }
}

pub fn dvr_posite() -> PositeFixture {
    let s = |x: &str| x.to_string();
    PositeFixture {
        elements: vec![s("0"), s("Frac"), s("R")],
        order: vec![(s("0"), s("Frac")), (s("Frac"), s("R"))],
        covers: vec![],
        mode: CoverageMode::Trivial,
    }
}

/// Named algebra fixtures from [`CATALOG`].
pub fn algebra(name: &str, f: FieldSpec) -> Option<AlgRef> {
    Some(match name {
        "ka2" => ka2(f),
        "m2" => m2(f),
        "k" => field(f),
        "k2" => field_power(f, 2),
        "k3" => field_power(f, 3),
        "dual" => dual_numbers(f),
        "idem" => idempotent_algebra(f),
        _ => return None,
    })
}

pub fn posite(name: &str) -> Option<PositeFixture> {
    match name {
        "valuation" => Some(valuation_posite()),
        "dvr" => Some(dvr_posite()),
        _ => None,
    }
}
