//! Finite posites, their frames of ideals and the spaces of points.
//!
//! Subsets of posite elements are `u64` bitmasks, so a posite has at most
//! 64 elements. Spaces use bitmasks over points in the same way.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algcore::{primitive_idempotents, AlgRef, AlgebraMorphism};
use crate::epiloc::{LocalizationLattice, Meet};
use crate::error::{Error, Result};
use crate::exactlin::{is_zero_vector, Vector};
use crate::freeprod::{free_product, FreeProductStatus};

pub type Mask = u64;

const MAX_ELEMENTS: usize = 64;
const MAX_DOWNSETS: usize = 1 << 20;

fn bit(i: usize) -> Mask {
    1 << i
}

fn members(m: Mask) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| m & bit(*i) != 0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverageMode {
    Trivial,
    Fine,
    Declared,
}

impl std::fmt::Display for CoverageMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CoverageMode::Trivial => "trivial",
            CoverageMode::Fine => "fine",
            CoverageMode::Declared => "declared",
        })
    }
}

impl std::str::FromStr for CoverageMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trivial" => Ok(CoverageMode::Trivial),
            "fine" => Ok(CoverageMode::Fine),
            "declared" => Ok(CoverageMode::Declared),
            _ => Err(Error::Malformed(format!("unknown topology `{s}`"))),
        }
    }
}

/// A finite poset with a coverage. Covers are upward closed among families
/// below an element: a family covers `u` when it contains `u`, when `u` is
/// the bottom, or (by mode) when it detects vanishing or contains a
/// declared family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Posite {
    names: Vec<String>,
    below: Vec<Mask>,
    bottom: usize,
    mode: CoverageMode,
    declared: Vec<Vec<Mask>>,
    meets: Vec<Vec<Option<usize>>>,
    blocked: Vec<usize>,
}

impl Posite {
    /// `leq[i][j]` means `i ≤ j`. Meets default to greatest lower bounds in
    /// the order.
    pub fn new(
        names: Vec<String>,
        leq: &[Vec<bool>],
        mode: CoverageMode,
        declared: Vec<Vec<Mask>>,
        meets: Option<Vec<Vec<Option<usize>>>>,
    ) -> Result<Self> {
        let n = names.len();
        if n == 0 || n > MAX_ELEMENTS {
            return Err(Error::Malformed(format!("posite needs 1..=64 elements, got {n}")));
        }
        if leq.len() != n || leq.iter().any(|r| r.len() != n) {
            return Err(Error::Malformed("order table has the wrong shape".into()));
        }
        for i in 0..n {
            if !leq[i][i] {
                return Err(Error::Malformed(format!("order is not reflexive at `{}`", names[i])));
            }
            for j in 0..n {
                if i != j && leq[i][j] && leq[j][i] {
                    return Err(Error::Malformed(format!("`{}` and `{}` are equivalent", names[i], names[j])));
                }
                for k in 0..n {
                    if leq[i][j] && leq[j][k] && !leq[i][k] {
                        return Err(Error::Malformed("order is not transitive".into()));
                    }
                }
            }
        }
        let below: Vec<Mask> = (0..n)
            .map(|u| (0..n).filter(|d| leq[*d][u]).fold(0, |m, d| m | bit(d)))
            .collect();
        let all = if n == 64 { Mask::MAX } else { bit(n) - 1 };
        let bottom = (0..n)
            .find(|b| (0..n).all(|u| below[u] & bit(*b) != 0))
            .ok_or_else(|| Error::Malformed("posite has no bottom element".into()))?;
        let mut declared = declared;
        declared.resize(n, Vec::new());
        for (u, fams) in declared.iter().enumerate() {
            for f in fams {
                if f & !below[u] != 0 || f & !all != 0 {
                    return Err(Error::Malformed(format!(
                        "a covering family of `{}` is not below it",
                        names[u]
                    )));
                }
            }
        }
        let meets = match meets {
            Some(m) => m,
            None => (0..n)
                .map(|a| {
                    (0..n)
                        .map(|b| {
                            let common = below[a] & below[b];
                            (0..n).find(|m| below[*m] == common)
                        })
                        .collect()
                })
                .collect(),
        };
        let mut p = Posite {
            names,
            below,
            bottom,
            mode,
            declared,
            meets,
            blocked: Vec::new(),
        };
        if mode == CoverageMode::Fine {
            p.blocked = (0..n)
                .filter(|u| {
                    let b = p.below[*u];
                    members(b).any(|x| members(b).any(|y| p.meets[x][y].is_none()))
                })
                .collect();
        }
        Ok(p)
    }

    pub fn from_lattice(l: &LocalizationLattice, mode: CoverageMode, declared: Vec<Vec<Mask>>) -> Result<Self> {
        let names = l.nodes.iter().map(|n| n.id.clone()).collect();
        let meets = l
            .meets
            .iter()
            .map(|r| r.iter().map(Meet::node).collect())
            .collect();
        Posite::new(names, &l.leq, mode, declared, Some(meets))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn mode(&self) -> CoverageMode {
        self.mode
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> Option<usize> {
        let all = self.all();
        (0..self.len()).find(|u| self.below[*u] == all)
    }

    pub fn all(&self) -> Mask {
        if self.len() == 64 {
            Mask::MAX
        } else {
            bit(self.len()) - 1
        }
    }

    pub fn below(&self, u: usize) -> Mask {
        self.below[u]
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.below[b] & bit(a) != 0
    }

    pub fn meet(&self, a: usize, b: usize) -> Option<usize> {
        self.meets[a][b]
    }

    pub fn declared(&self) -> &[Vec<Mask>] {
        &self.declared
    }

    /// Elements whose fine covers could not be decided for lack of a meet.
    pub fn blocked(&self) -> &[usize] {
        &self.blocked
    }

    pub fn mask_of(&self, names: &[&str]) -> Result<Mask> {
        names.iter().try_fold(0, |m, s| {
            self.index_of(s)
                .map(|i| m | bit(i))
                .ok_or_else(|| Error::Malformed(format!("unknown element `{s}`")))
        })
    }

    pub fn mask_name(&self, m: Mask) -> String {
        let idx: Vec<usize> = members(m).collect();
        if self.len() <= 10 {
            idx.iter().map(|i| i.to_string()).collect()
        } else {
            idx.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
        }
    }

    /// Whether `family` covers `u`. Elements of the family not below `u`
    /// make it fail.
    pub fn covers(&self, u: usize, family: Mask) -> bool {
        if family & !self.below[u] != 0 {
            return false;
        }
        if u == self.bottom || family & bit(u) != 0 {
            return true;
        }
        match self.mode {
            CoverageMode::Trivial => false,
            CoverageMode::Declared => self.declared[u].iter().any(|d| d & !family == 0),
            CoverageMode::Fine => members(self.below[u]).all(|d| {
                d == self.bottom
                    || members(family).any(|f| match self.meets[d][f] {
                        Some(m) => m != self.bottom,
                        None => false,
                    })
            }),
        }
    }

    /// Inclusion-minimal covering families of `u`.
    pub fn minimal_covers(&self, u: usize) -> Vec<Mask> {
        let below: Vec<usize> = members(self.below[u]).collect();
        if below.len() > 20 {
            return vec![bit(u)];
        }
        let mut covering: Vec<Mask> = (0u64..(1 << below.len()))
            .map(|s| members(s).fold(0, |m, i| m | bit(below[i])))
            .filter(|f| self.covers(u, *f))
            .collect();
        covering.sort_by_key(|f| (f.count_ones(), *f));
        let mut minimal: Vec<Mask> = Vec::new();
        for f in covering {
            if !minimal.iter().any(|m| m & !f == 0) {
                minimal.push(f);
            }
        }
        minimal
    }

    pub fn down_closure(&self, s: Mask) -> Mask {
        members(s).fold(0, |m, u| m | self.below[u])
    }

    /// Smallest ideal containing `s`.
    pub fn saturate(&self, s: Mask) -> Mask {
        let mut cur = self.down_closure(s) | bit(self.bottom);
        loop {
            let mut next = cur;
            for u in 0..self.len() {
                if next & bit(u) == 0 && self.covers(u, next & self.below[u]) {
                    next |= self.below[u];
                }
            }
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }

    pub fn is_ideal(&self, s: Mask) -> bool {
        self.down_closure(s) == s
            && s & bit(self.bottom) != 0
            && (0..self.len()).all(|u| s & bit(u) != 0 || !self.covers(u, s & self.below[u]))
    }

    fn downsets(&self) -> Result<Vec<Mask>> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|u| (self.below[*u].count_ones(), *u));
        let mut out = Vec::new();
        let mut stack = vec![(0usize, 0 as Mask)];
        while let Some((pos, cur)) = stack.pop() {
            if pos == order.len() {
                out.push(cur);
                if out.len() > MAX_DOWNSETS {
                    return Err(Error::Undetermined("too many downsets to enumerate".into()));
                }
                continue;
            }
            let u = order[pos];
            stack.push((pos + 1, cur));
            if self.below[u] & !bit(u) & !cur == 0 {
                stack.push((pos + 1, cur | bit(u)));
            }
        }
        Ok(out)
    }

    pub fn ideals(&self) -> Result<Frame> {
        let mut ideals: Vec<Mask> = self.downsets()?.into_par_iter().filter(|d| self.is_ideal(*d)).collect();
        ideals.sort_by_key(|m| (m.count_ones(), *m));
        Ok(Frame {
            posite: self.clone(),
            ideals,
        })
    }
}

pub fn trivial_coverage(l: &LocalizationLattice) -> Result<Posite> {
    Posite::from_lattice(l, CoverageMode::Trivial, Vec::new())
}

/// Meet-faithful coverage using the lattice's meet table.
pub fn fine_coverage(l: &LocalizationLattice) -> Result<Posite> {
    Posite::from_lattice(l, CoverageMode::Fine, Vec::new())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub axiom: String,
    pub pass: bool,
    pub counterexamples: Vec<String>,
}

/// Identity, stability under meets and transitivity, over minimal covers.
pub fn verify_posite_axioms(p: &Posite) -> Vec<AxiomCheck> {
    let n = p.len();
    let name = |m: Mask| format!("{{{}}}", members(m).map(|i| p.names[i].as_str()).collect::<Vec<_>>().join(", "));
    let minimal: Vec<Vec<Mask>> = (0..n).map(|u| p.minimal_covers(u)).collect();

    let mut identity = Vec::new();
    for u in 0..n {
        if !p.covers(u, bit(u)) {
            identity.push(p.names[u].clone());
        }
    }
    if !p.covers(p.bottom, 0) {
        identity.push("empty family at bottom".into());
    }

    let mut stability = Vec::new();
    for u in 0..n {
        for f in &minimal[u] {
            for v in members(p.below[u]) {
                let mut img = 0;
                let mut ok = true;
                for x in members(*f) {
                    match p.meets[v][x] {
                        Some(m) => img |= bit(m),
                        None => ok = false,
                    }
                }
                if ok && !p.covers(v, img) {
                    stability.push(format!("{} covers {} but {} does not cover {}", name(*f), p.names[u], name(img), p.names[v]));
                }
            }
        }
    }

    let mut transitivity = Vec::new();
    for u in 0..n {
        for f in &minimal[u] {
            let parts: Vec<&Vec<Mask>> = members(*f).map(|x| &minimal[x]).collect();
            let total: usize = parts.iter().map(|c| c.len().max(1)).product();
            if total > 100_000 {
                continue;
            }
            for choice in 0..total {
                let mut rest = choice;
                let mut union = 0;
                for c in &parts {
                    union |= c[rest % c.len()];
                    rest /= c.len();
                }
                if !p.covers(u, union) {
                    transitivity.push(format!("refinement {} of {} does not cover {}", name(union), name(*f), p.names[u]));
                }
            }
        }
    }

    [("identity", identity), ("stability", stability), ("transitivity", transitivity)]
        .into_iter()
        .map(|(a, c)| AxiomCheck {
            axiom: a.into(),
            pass: c.is_empty(),
            counterexamples: c,
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FunctorialityReport {
    pub pass: bool,
    pub counterexamples: Vec<String>,
}

/// Whether pushing minimal covers of `source` along `map` gives covers in
/// `target`. `map[u] = None` means the image is undetermined.
pub fn verify_functoriality(source: &Posite, target: &Posite, map: &[Option<usize>]) -> FunctorialityReport {
    let mut bad = Vec::new();
    for u in 0..source.len() {
        let Some(tu) = map[u] else { continue };
        for f in source.minimal_covers(u) {
            let mut img = 0;
            let mut ok = true;
            for x in members(f) {
                match map[x] {
                    Some(t) => img |= bit(t),
                    None => ok = false,
                }
            }
            if ok && !target.covers(tu, img) {
                let src: Vec<&str> = members(f).map(|i| source.names[i].as_str()).collect();
                let dst: Vec<&str> = members(f).filter_map(|i| map[i]).map(|t| target.names[t].as_str()).collect();
                bad.push(format!(
                    "{{{}}} covers {} but its image {{{}}} does not cover {}",
                    src.join(", "),
                    source.names[u],
                    dst.join(", "),
                    target.names[tu]
                ));
            }
        }
    }
    FunctorialityReport {
        pass: bad.is_empty(),
        counterexamples: bad,
    }
}

/// The ideals of a posite ordered by `(size, mask)`; the first is the
/// bottom and the last the top.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub posite: Posite,
    pub ideals: Vec<Mask>,
}

impl Frame {
    pub fn len(&self) -> usize {
        self.ideals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ideals.is_empty()
    }

    pub fn name(&self, i: usize) -> String {
        self.posite.mask_name(self.ideals[i])
    }

    pub fn names(&self) -> Vec<String> {
        (0..self.len()).map(|i| self.name(i)).collect()
    }

    pub fn index_of(&self, m: Mask) -> Option<usize> {
        self.ideals.iter().position(|x| *x == m)
    }

    pub fn bottom(&self) -> usize {
        0
    }

    pub fn top(&self) -> usize {
        self.len() - 1
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.ideals[i] & !self.ideals[j] == 0
    }

    pub fn meet(&self, i: usize, j: usize) -> usize {
        self.index_of(self.ideals[i] & self.ideals[j]).expect("ideals closed under intersection")
    }

    pub fn join(&self, i: usize, j: usize) -> usize {
        self.index_of(self.posite.saturate(self.ideals[i] | self.ideals[j]))
            .expect("saturation is an ideal")
    }

    /// Triples violating `a ∧ (b ∨ c) = (a ∧ b) ∨ (a ∧ c)`.
    pub fn distributivity_failures(&self) -> Vec<(usize, usize, usize)> {
        let n = self.len();
        (0..n)
            .into_par_iter()
            .flat_map_iter(|a| {
                (0..n).flat_map(move |b| (b..n).map(move |c| (a, b, c)))
            })
            .filter(|(a, b, c)| self.meet(*a, self.join(*b, *c)) != self.join(self.meet(*a, *b), self.meet(*a, *c)))
            .collect()
    }

    pub fn prime_elements(&self) -> Vec<usize> {
        let n = self.len();
        (0..n)
            .filter(|p| {
                *p != self.top()
                    && (0..n).all(|a| {
                        (0..n).all(|b| !self.leq(self.meet(a, b), *p) || self.leq(a, *p) || self.leq(b, *p))
                    })
            })
            .collect()
    }

    /// Completely prime filters found without the prime-element shortcut,
    /// each reported by the join of its complement. Frames up to 16
    /// elements enumerate every subset; larger ones use that filters of a
    /// finite lattice are principal.
    pub fn prime_filters_bruteforce(&self) -> Vec<usize> {
        let n = self.len();
        let is_cp_filter = |f: &[bool]| {
            f[self.top()]
                && !f[self.bottom()]
                && (0..n).all(|a| {
                    (0..n).all(|b| {
                        (!f[a] || !self.leq(a, b) || f[b])
                            && (!f[a] || !f[b] || f[self.meet(a, b)])
                            && (!f[self.join(a, b)] || f[a] || f[b])
                    })
                })
        };
        let mut filters: Vec<Vec<bool>> = Vec::new();
        if n <= 16 {
            for s in 0u32..(1 << n) {
                let f: Vec<bool> = (0..n).map(|i| s & (1 << i) != 0).collect();
                if is_cp_filter(&f) {
                    filters.push(f);
                }
            }
        } else {
            for a in 0..n {
                let f: Vec<bool> = (0..n).map(|x| self.leq(a, x)).collect();
                if is_cp_filter(&f) {
                    filters.push(f);
                }
            }
        }
        let mut out: Vec<usize> = filters
            .iter()
            .map(|f| (0..n).filter(|x| !f[*x]).fold(self.bottom(), |acc, x| self.join(acc, x)))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// The space of points. A point `p` lies in the open `U` iff `U ≰ p`.
    pub fn points(&self) -> SoberSpace {
        let primes = self.prime_elements();
        let posite = &self.posite;
        let points: Vec<Point> = primes
            .iter()
            .map(|p| {
                let outside = posite.all() & !self.ideals[*p];
                let generic: Vec<usize> = members(outside)
                    .filter(|u| !members(outside).any(|v| v != *u && posite.leq(v, *u)))
                    .collect();
                Point {
                    label: generic.iter().map(|u| posite.names[*u].clone()).collect::<Vec<_>>().join("+"),
                    prime: *p,
                    prime_name: self.name(*p),
                    generic_nodes: generic,
                }
            })
            .collect();
        let opens = (0..self.len())
            .map(|u| {
                primes
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| !self.leq(u, **p))
                    .fold(0, |m, (i, _)| m | bit(i))
            })
            .collect();
        SoberSpace {
            points,
            opens,
            open_names: self.names(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Point {
    pub label: String,
    /// Index of the prime element in the frame.
    pub prime: usize,
    pub prime_name: String,
    /// Minimal posite elements outside the prime.
    pub generic_nodes: Vec<usize>,
}

/// A finite space given by its points and the opens they lie in; opens
/// are bitmasks over points, listed in frame order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SoberSpace {
    pub points: Vec<Point>,
    pub opens: Vec<Mask>,
    pub open_names: Vec<String>,
}

impl SoberSpace {
    pub fn discrete(labels: Vec<String>) -> Self {
        let n = labels.len();
        let points = labels
            .into_iter()
            .enumerate()
            .map(|(i, l)| Point {
                label: l,
                prime: i,
                prime_name: String::new(),
                generic_nodes: Vec::new(),
            })
            .collect();
        let opens: Vec<Mask> = (0u64..(1 << n)).collect();
        let open_names = opens.iter().map(|m| format!("{m:b}")).collect();
        SoberSpace {
            points,
            opens,
            open_names,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn all(&self) -> Mask {
        if self.len() == 64 {
            Mask::MAX
        } else {
            bit(self.len()) - 1
        }
    }

    pub fn labels(&self) -> Vec<&str> {
        self.points.iter().map(|p| p.label.as_str()).collect()
    }

    /// Open sets as sets of point labels.
    pub fn open_sets(&self) -> BTreeSet<BTreeSet<String>> {
        self.opens
            .iter()
            .map(|m| members(*m).map(|i| self.points[i].label.clone()).collect())
            .collect()
    }

    fn closed_sets(&self) -> Vec<Mask> {
        let mut c: Vec<Mask> = self.opens.iter().map(|o| self.all() & !o).collect();
        c.sort_unstable();
        c.dedup();
        c
    }

    pub fn closure(&self, s: Mask) -> Mask {
        let outside = self.opens.iter().filter(|o| *o & s == 0).fold(0, |m, o| m | o);
        self.all() & !outside
    }

    /// `y` is a specialization of `x`, i.e. `y` lies in the closure of `x`.
    pub fn specializes(&self, x: usize, y: usize) -> bool {
        self.closure(bit(x)) & bit(y) != 0
    }

    /// Points lying in the closure of no other point.
    pub fn generic_points(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|x| !(0..self.len()).any(|y| y != *x && self.specializes(y, *x)))
            .collect()
    }

    pub fn specialization_points(&self) -> Vec<usize> {
        let g = self.generic_points();
        (0..self.len()).filter(|x| !g.contains(x)).collect()
    }

    pub fn closed_points(&self) -> Vec<usize> {
        (0..self.len()).filter(|x| self.closure(bit(*x)) == bit(*x)).collect()
    }

    pub fn is_topology(&self) -> bool {
        let has = |m: Mask| self.opens.contains(&m);
        has(0)
            && has(self.all())
            && self
                .opens
                .iter()
                .all(|a| self.opens.iter().all(|b| has(a & b) && has(a | b)))
    }

    pub fn is_t0(&self) -> bool {
        (0..self.len()).all(|x| (x + 1..self.len()).all(|y| self.closure(bit(x)) != self.closure(bit(y))))
    }

    fn irreducible_closed(&self, c: Mask, closed: &[Mask]) -> bool {
        c != 0
            && !closed
                .iter()
                .any(|a| *a != c && a & !c == 0 && closed.iter().any(|b| *b != c && b & !c == 0 && a | b == c))
    }

    /// Every irreducible closed set has exactly one generic point.
    pub fn is_sober(&self) -> bool {
        let closed = self.closed_sets();
        closed.iter().filter(|c| self.irreducible_closed(**c, &closed)).all(|c| {
            (0..self.len())
                .filter(|x| self.closure(bit(*x)) == *c)
                .count()
                == 1
        })
    }

    pub fn is_irreducible(&self) -> bool {
        self.irreducible_closed(self.all(), &self.closed_sets())
    }

    pub fn is_discrete(&self) -> bool {
        (0..self.len()).all(|x| self.opens.contains(&bit(x)))
    }

    pub fn disjoint_union(&self, other: &SoberSpace) -> SoberSpace {
        let shift = self.len();
        let mut points = self.points.clone();
        points.extend(other.points.iter().cloned());
        let mut opens: Vec<Mask> = Vec::new();
        let mut open_names = Vec::new();
        for (a, an) in self.opens.iter().zip(&self.open_names) {
            for (b, bn) in other.opens.iter().zip(&other.open_names) {
                opens.push(a | (b << shift));
                open_names.push(format!("{an}|{bn}"));
            }
        }
        SoberSpace {
            points,
            opens,
            open_names,
        }
    }

    /// A bijection of points carrying opens onto opens, if one exists.
    pub fn homeomorphism(&self, other: &SoberSpace) -> Option<Vec<usize>> {
        let n = self.len();
        if n != other.len() || n > 10 {
            return None;
        }
        let mine: BTreeSet<Mask> = self.opens.iter().copied().collect();
        let theirs: BTreeSet<Mask> = other.opens.iter().copied().collect();
        if mine.len() != theirs.len() {
            return None;
        }
        let mut perm: Vec<usize> = (0..n).collect();
        let image = |perm: &[usize], m: Mask| members(m).fold(0, |acc, i| acc | bit(perm[i]));
        loop {
            if mine.iter().all(|o| theirs.contains(&image(&perm, *o))) {
                return Some(perm);
            }
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|i| perm[i - 1] < perm[*i]) else {
                return None;
            };
            let j = (i..n).rev().find(|j| perm[*j] > perm[i - 1]).unwrap();
            perm.swap(i - 1, j);
            perm[i..].reverse();
        }
    }

    pub fn homeomorphic(&self, other: &SoberSpace) -> bool {
        self.homeomorphism(other).is_some()
    }
}

/// Points of a frame as a map from fine points to coarse points, with the
/// continuity check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComparisonMap {
    pub point_map: Vec<Option<usize>>,
    pub continuous: bool,
}

/// The identity on posite elements, seen from the frame of `fine` to the
/// frame of `coarse` (same elements, more covers in `fine`). A fine point
/// goes to the coarse point with the same prime ideal.
pub fn comparison_map(fine: &Frame, coarse: &Frame) -> ComparisonMap {
    let fs = fine.points();
    let cs = coarse.points();
    let point_map: Vec<Option<usize>> = fs
        .points
        .iter()
        .map(|p| {
            let m = fine.ideals[p.prime];
            cs.points.iter().position(|q| coarse.ideals[q.prime] == m)
        })
        .collect();
    let continuous = point_map.iter().all(Option::is_some)
        && coarse.ideals.iter().enumerate().all(|(ci, u)| {
            let pre = point_map
                .iter()
                .enumerate()
                .filter(|(_, q)| cs.opens[ci] & bit(q.unwrap()) != 0)
                .fold(0, |m, (i, _)| m | bit(i));
            let sat = fine.posite.saturate(*u);
            fine.index_of(sat).is_some_and(|fi| fs.opens[fi] == pre)
        });
    ComparisonMap {
        point_map,
        continuous,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointMap {
    /// Image of each target-space point in the source space.
    pub images: Vec<Option<usize>>,
    pub continuous: bool,
    pub diagnostics: Vec<String>,
}

/// Points of `target` pulled back along a node map `source → target`
/// (for a base change `B → A` the spaces map the other way, `A`-points to
/// `B`-points). A point with prime `p` goes to the point whose prime is the
/// preimage of `p`; when that preimage is not a prime ideal only a
/// correspondence exists and the point is reported.
pub fn induced_point_map(source: &Frame, target: &Frame, node_map: &[Option<usize>]) -> PointMap {
    let ss = source.points();
    let ts = target.points();
    let mut diagnostics = Vec::new();
    let images: Vec<Option<usize>> = ts
        .points
        .iter()
        .map(|q| {
            let p = target.ideals[q.prime];
            let mut pre: Mask = 0;
            for (u, v) in node_map.iter().enumerate() {
                match v {
                    Some(v) if p & bit(*v) != 0 => pre |= bit(u),
                    Some(_) => {}
                    None => {
                        diagnostics.push(format!("node {} has no image", source.posite.names[u]));
                        return None;
                    }
                }
            }
            let found = ss.points.iter().position(|x| source.ideals[x.prime] == pre);
            if found.is_none() {
                diagnostics.push(format!(
                    "point {} pulls back to {}, which is not a prime ideal",
                    q.label,
                    source.posite.mask_name(pre)
                ));
            }
            found
        })
        .collect();
    let continuous = images.iter().all(Option::is_some)
        && ss.opens.iter().all(|o| {
            let pre = images
                .iter()
                .enumerate()
                .filter(|(_, x)| o & bit(x.unwrap()) != 0)
                .fold(0, |m, (i, _)| m | bit(i));
            ts.opens.contains(&pre)
        });
    PointMap {
        images,
        continuous,
        diagnostics,
    }
}

#[derive(Clone, Debug)]
pub struct ClassicalSpec {
    pub algebra: AlgRef,
    /// One primitive idempotent per maximal ideal.
    pub idempotents: Vec<Vector>,
    pub space: SoberSpace,
}

impl ClassicalSpec {
    /// Classical points surviving in the localization `f`.
    pub fn surviving(&self, f: &AlgebraMorphism) -> Vec<usize> {
        (0..self.idempotents.len())
            .filter(|i| !is_zero_vector(&f.apply(&self.idempotents[*i])))
            .collect()
    }

    /// Sends each point of a space built on `lattice` to the classical
    /// points surviving in every node outside its prime.
    pub fn projection(&self, lattice: &LocalizationLattice, frame: &Frame) -> Vec<Vec<usize>> {
        let space = frame.points();
        space
            .points
            .iter()
            .map(|p| {
                let outside = frame.posite.all() & !frame.ideals[p.prime];
                let mut alive: BTreeSet<usize> = (0..self.idempotents.len()).collect();
                for u in members(outside) {
                    let s: BTreeSet<usize> = self.surviving(&lattice.nodes[u].map).into_iter().collect();
                    alive = alive.intersection(&s).copied().collect();
                }
                alive.into_iter().collect()
            })
            .collect()
    }
}

/// Maximal ideals of a commutative algebra through the simple factors of
/// its semisimple quotient; the space is discrete.
pub fn classical_spec(a: &AlgRef) -> Result<ClassicalSpec> {
    if !a.is_commutative() {
        return Err(Error::NotCommutative("classical spectrum".into()));
    }
    let idempotents = primitive_idempotents(a)?;
    let labels = idempotents.iter().map(|e| format!("m[{}]", a.format_element(e))).collect();
    Ok(ClassicalSpec {
        algebra: a.clone(),
        idempotents,
        space: SoberSpace::discrete(labels),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverRefutation {
    /// Index of the first witness that disproves the cover.
    pub refuted_by: Option<usize>,
    /// Witnesses for which some free product could not be decided.
    pub undetermined: Vec<usize>,
}

impl CoverRefutation {
    pub fn refuted(&self) -> bool {
        self.refuted_by.is_some()
    }
}

/// Tries to disprove that `family` covers: a nonzero `A → D` with every
/// `D ∗_A B_i` zero is a counterexample.
pub fn refute_cover(family: &[AlgebraMorphism], witnesses: &[AlgebraMorphism], degree_cap: usize) -> Result<CoverRefutation> {
    let mut undetermined = Vec::new();
    for (w, d) in witnesses.iter().enumerate() {
        if d.target().is_zero_ring() {
            continue;
        }
        let mut all_zero = true;
        let mut unknown = false;
        for b in family {
            match free_product(d, b, degree_cap)?.status {
                FreeProductStatus::Zero => {}
                FreeProductStatus::FiniteDim { .. } => {
                    all_zero = false;
                    break;
                }
                _ => {
                    all_zero = false;
                    unknown = true;
                }
            }
        }
        if all_zero {
            return Ok(CoverRefutation {
                refuted_by: Some(w),
                undetermined,
            });
        }
        if unknown {
            undetermined.push(w);
        }
    }
    Ok(CoverRefutation {
        refuted_by: None,
        undetermined,
    })
}

/// A standalone posite: named elements, covering relations `a < b` of the
/// order and declared covers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositeFixture {
    pub elements: Vec<String>,
    pub order: Vec<(String, String)>,
    #[serde(default)]
    pub covers: Vec<(String, Vec<String>)>,
    pub mode: CoverageMode,
}

pub fn posite_fixture(d: &PositeFixture) -> Result<Posite> {
    let n = d.elements.len();
    let mut index = BTreeMap::new();
    for (i, e) in d.elements.iter().enumerate() {
        if index.insert(e.as_str(), i).is_some() {
            return Err(Error::Malformed(format!("duplicate element `{e}`")));
        }
    }
    let look = |s: &str| {
        index
            .get(s)
            .copied()
            .ok_or_else(|| Error::Malformed(format!("unknown element `{s}`")))
    };
    let mut leq = vec![vec![false; n]; n];
    for (i, row) in leq.iter_mut().enumerate() {
        row[i] = true;
    }
    for (a, b) in &d.order {
        let (i, j) = (look(a)?, look(b)?);
        leq[i][j] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if leq[i][k] && leq[k][j] {
                    leq[i][j] = true;
                }
            }
        }
    }
    let mut declared = vec![Vec::new(); n];
    if !d.covers.is_empty() && d.mode != CoverageMode::Declared {
        return Err(Error::Malformed("covers are only allowed with the declared topology".into()));
    }
    for (u, fam) in &d.covers {
        let m = fam.iter().try_fold(0, |m, s| look(s).map(|i| m | bit(i)))?;
        declared[look(u)?].push(m);
    }
    Posite::new(d.elements.clone(), &leq, d.mode, declared, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn names(fr: &Frame) -> Vec<String> {
        fr.names()
    }

    fn check_frame(fr: &Frame) {
        assert!(fr.distributivity_failures().is_empty());
        assert_eq!(fr.prime_filters_bruteforce(), fr.prime_elements());
        let s = fr.points();
        assert!(s.is_topology() && s.is_t0() && s.is_sober());
    }

    #[test]
    fn ka2_ideals_and_points() {
        let l = fixtures::ka2_lattice().unwrap();
        let triv = trivial_coverage(&l).unwrap().ideals().unwrap();
        assert_eq!(names(&triv), ["0", "01", "02", "03", "012", "013", "023", "0123", "01234"]);
        check_frame(&triv);
        let s = triv.points();
        assert_eq!(s.len(), 4);
        assert_eq!(s.generic_points().len(), 3);
        let closed = s.closed_points();
        assert_eq!(closed.len(), 1);
        assert!((0..4).all(|x| s.specializes(x, closed[0])));

        let fine = fine_coverage(&l).unwrap().ideals().unwrap();
        assert_eq!(fine.len(), 8);
        assert!(!names(&fine).contains(&"0123".to_string()));
        check_frame(&fine);
        let s = fine.points();
        assert_eq!(s.len(), 3);
        assert!(s.is_discrete());
    }

    #[test]
    fn fine_covers_on_ka2() {
        let l = fixtures::ka2_lattice().unwrap();
        let p = fine_coverage(&l).unwrap();
        assert!(p.blocked().is_empty());
        let top = p.top().unwrap();
        assert!(p.covers(top, 0b01110));
        for f in [0b00110, 0b01010, 0b01100] {
            assert!(!p.covers(top, f));
        }
        assert!(verify_posite_axioms(&p).iter().all(|a| a.pass));
        assert!(verify_posite_axioms(&trivial_coverage(&l).unwrap()).iter().all(|a| a.pass));
    }

    #[test]
    fn field_has_only_trivial_covers() {
        let l = fixtures::field_lattice(crate::exactlin::FieldSpec::Rationals).unwrap();
        let p = fine_coverage(&l).unwrap();
        assert_eq!(p.minimal_covers(1), vec![0b10]);
        let fr = p.ideals().unwrap();
        assert_eq!(fr.len(), 2);
        assert_eq!(fr.points().len(), 1);
    }

    #[test]
    fn boolean_point_counts() {
        for n in [2usize, 3] {
            let l = fixtures::field_power_lattice(crate::exactlin::FieldSpec::Rationals, n).unwrap();
            let triv = trivial_coverage(&l).unwrap().ideals().unwrap();
            check_frame(&triv);
            let s = triv.points();
            assert_eq!(s.len(), (1 << n) - 1);
            assert_eq!(s.generic_points().len(), n);
            assert_eq!(s.specialization_points().len(), (1 << n) - n - 1);
            let fine = fine_coverage(&l).unwrap().ideals().unwrap();
            check_frame(&fine);
            let s = fine.points();
            assert_eq!(s.len(), n);
            assert!(s.is_discrete());
        }
    }

    #[test]
    fn valuation_fixture() {
        let p = posite_fixture(&fixtures::valuation_posite()).unwrap();
        assert!(verify_posite_axioms(&p).iter().all(|a| a.pass));
        let fr = p.ideals().unwrap();
        check_frame(&fr);
        let s = fr.points();
        assert_eq!(s.len(), 3);
        assert!(!s.is_irreducible());
        let g = s.generic_points();
        assert_eq!(g.len(), 2);
        let lab = |i: usize| s.points[i].label.clone();
        let sp = s.specialization_points();
        let expected: BTreeSet<BTreeSet<String>> = [
            vec![],
            vec![lab(g[0])],
            vec![lab(g[1])],
            vec![lab(g[0]), lab(g[1])],
            vec![lab(g[0]), lab(g[1]), lab(sp[0])],
        ]
        .into_iter()
        .map(|v| v.into_iter().collect())
        .collect();
        assert_eq!(s.open_sets(), expected);
    }

    #[test]
    fn fine_covers_collapse_the_valuation_lattice() {
        let mut d = fixtures::valuation_posite();
        d.covers.clear();
        d.mode = CoverageMode::Fine;
        let p = posite_fixture(&d).unwrap();
        assert!(p.covers(4, 0b01000));
        assert_eq!(p.ideals().unwrap().points().len(), 2);
    }

    #[test]
    fn diagonal_sends_matrix_point_to_closed_point() {
        let q = crate::exactlin::FieldSpec::Rationals;
        let lk = fixtures::field_power_lattice(q, 2).unwrap();
        let lm = fixtures::matrix_lattice(q, 2).unwrap();
        let img = crate::epiloc::induced_lattice_map(&fixtures::diagonal(q), &lk, &lm).unwrap();
        let map: Vec<Option<usize>> = img
            .iter()
            .map(|i| match i {
                crate::epiloc::NodeImage::Node(n) => Some(*n),
                _ => None,
            })
            .collect();
        let src = trivial_coverage(&lk).unwrap().ideals().unwrap();
        let dst = trivial_coverage(&lm).unwrap().ideals().unwrap();
        let pm = induced_point_map(&src, &dst, &map);
        assert!(pm.continuous);
        let space = src.points();
        assert_eq!(pm.images.len(), 1);
        assert_eq!(space.specialization_points(), vec![pm.images[0].unwrap()]);

        let fine_src = fine_coverage(&lk).unwrap().ideals().unwrap();
        let fine_dst = fine_coverage(&lm).unwrap().ideals().unwrap();
        let pm = induced_point_map(&fine_src, &fine_dst, &map);
        assert_eq!(pm.images, vec![None]);
        assert!(!pm.diagnostics.is_empty());

        let id: Vec<Option<usize>> = (0..lk.len()).map(Some).collect();
        let pm = induced_point_map(&src, &src, &id);
        assert_eq!(pm.images, (0..3).map(Some).collect::<Vec<_>>());
    }

    #[test]
    fn dvr_fixture_is_sierpinski() {
        let s = posite_fixture(&fixtures::dvr_posite()).unwrap().ideals().unwrap().points();
        assert_eq!(s.len(), 2);
        assert_eq!(s.open_sets().len(), 3);
        assert_eq!(s.generic_points().len(), 1);
        assert_eq!(s.closed_points().len(), 1);
        assert!(s.is_sober() && !s.is_discrete());
    }

    #[test]
    fn singleton_posite() {
        let d = PositeFixture {
            elements: vec!["0".into()],
            order: vec![],
            covers: vec![],
            mode: CoverageMode::Trivial,
        };
        let fr = posite_fixture(&d).unwrap().ideals().unwrap();
        assert_eq!(fr.len(), 1);
        assert_eq!(fr.points().len(), 0);
    }

    #[test]
    fn malformed_fixtures() {
        let mut d = fixtures::valuation_posite();
        d.covers.push(("k".into(), vec!["R".into()]));
        assert!(matches!(posite_fixture(&d), Err(Error::Malformed(_))));
        let mut d = fixtures::dvr_posite();
        d.order.push(("R".into(), "0".into()));
        assert!(posite_fixture(&d).is_err());
        let mut d = fixtures::dvr_posite();
        d.elements.push("stray".into());
        assert!(posite_fixture(&d).is_err());
    }

    #[test]
    fn classical_spectra() {
        use crate::exactlin::FieldSpec;
        let q = FieldSpec::Rationals;
        let k: AlgRef = std::sync::Arc::new(crate::algcore::Algebra::ground(q));
        assert_eq!(classical_spec(&k).unwrap().space.len(), 1);
        let d: AlgRef = std::sync::Arc::new(crate::algcore::Algebra::monogenic(q, &[q.zero(), q.zero()]).unwrap());
        assert_eq!(classical_spec(&d).unwrap().space.len(), 1);
        assert!(matches!(classical_spec(&fixtures::ka2(q)), Err(Error::NotCommutative(_))));

        let l = fixtures::field_power_lattice(q, 2).unwrap();
        let cl = classical_spec(&l.base).unwrap();
        assert_eq!(cl.space.len(), 2);
        let fine = fine_coverage(&l).unwrap().ideals().unwrap();
        let pi = cl.projection(&l, &fine);
        let mut flat: Vec<usize> = pi.iter().map(|v| {
            assert_eq!(v.len(), 1);
            v[0]
        }).collect();
        flat.sort_unstable();
        assert_eq!(flat, [0, 1]);
        let triv = trivial_coverage(&l).unwrap().ideals().unwrap();
        let iota = comparison_map(&fine, &triv);
        assert!(iota.continuous);
    }

    #[test]
    fn ka2_comparison_is_continuous() {
        let l = fixtures::ka2_lattice().unwrap();
        let fine = fine_coverage(&l).unwrap().ideals().unwrap();
        let triv = trivial_coverage(&l).unwrap().ideals().unwrap();
        let c = comparison_map(&fine, &triv);
        assert!(c.continuous);
        let generic = triv.points().generic_points();
        for p in c.point_map {
            assert!(generic.contains(&p.unwrap()));
        }
    }

    #[test]
    fn kanda_refutes_coarse_cover() {
        let q = crate::exactlin::FieldSpec::Rationals;
        let (p1, p2) = fixtures::kk_projections(q);
        let diag = fixtures::diagonal(q);
        let r = refute_cover(&[p1.clone(), p2.clone()], &[diag], 8).unwrap();
        assert_eq!(r.refuted_by, Some(0));
        let id = AlgebraMorphism::identity(p1.source().clone());
        let r = refute_cover(&[p1, p2], &[id], 8).unwrap();
        assert!(!r.refuted());
    }

    #[test]
    fn declared_cover_is_not_functorial() {
        let q = crate::exactlin::FieldSpec::Rationals;
        let l = fixtures::field_power_lattice(q, 2).unwrap();
        let src = Posite::from_lattice(&l, CoverageMode::Declared, vec![vec![], vec![], vec![], vec![0b0110]]).unwrap();
        let lm = fixtures::matrix_lattice(q, 2).unwrap();
        let dst = trivial_coverage(&lm).unwrap();
        let img = crate::epiloc::induced_lattice_map(&fixtures::diagonal(q), &l, &lm).unwrap();
        let map: Vec<Option<usize>> = img
            .iter()
            .map(|i| match i {
                crate::epiloc::NodeImage::Node(n) => Some(*n),
                _ => None,
            })
            .collect();
        let rep = verify_functoriality(&src, &dst, &map);
        assert!(!rep.pass);
        assert_eq!(rep.counterexamples.len(), 1);
        let fine_dst = fine_coverage(&lm).unwrap();
        assert!(!verify_functoriality(&src, &fine_dst, &map).pass);
    }

    #[test]
    fn product_spectrum_is_disjoint_union() {
        let q = crate::exactlin::FieldSpec::Rationals;
        let pt = fine_coverage(&fixtures::field_lattice(q).unwrap()).unwrap().ideals().unwrap().points();
        let kk = fine_coverage(&fixtures::field_power_lattice(q, 2).unwrap()).unwrap().ideals().unwrap().points();
        assert!(kk.homeomorphic(&pt.disjoint_union(&pt)));
        let m2 = fine_coverage(&fixtures::matrix_lattice(q, 2).unwrap()).unwrap().ideals().unwrap().points();
        assert!(m2.homeomorphic(&pt));
    }
}
