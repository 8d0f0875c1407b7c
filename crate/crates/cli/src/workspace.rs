//! TOML workspaces: algebras, morphisms, lattices, posites and run
//! directives, plus their resolution into core objects.

use std::collections::BTreeMap;
use std::sync::Arc;

use ncspec_core::algcore::{
    matrix_algebra, parse_linear_combination, path_algebra, product_algebra, quotient_algebra, AlgRef, Algebra,
    AlgebraMorphism, Quiver,
};
use ncspec_core::epiloc::{build_lattice, interesting_quotients, Candidate, LatticeOptions, LocalizationLattice};
use ncspec_core::exactlin::{FieldSpec, Vector};
use ncspec_core::fixtures;
use ncspec_core::topos::{CoverageMode, PositeFixture};
use serde::{Deserialize, Serialize};

use crate::CliError;

fn default_field() -> String {
    "q".into()
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Workspace {
    #[serde(default = "default_field")]
    pub field: String,
    #[serde(default, rename = "algebra", skip_serializing_if = "Vec::is_empty")]
    pub algebras: Vec<AlgebraDef>,
    #[serde(default, rename = "morphism", skip_serializing_if = "Vec::is_empty")]
    pub morphisms: Vec<MorphismDef>,
    #[serde(default, rename = "lattice", skip_serializing_if = "Vec::is_empty")]
    pub lattices: Vec<LatticeDef>,
    #[serde(default, rename = "posite", skip_serializing_if = "Vec::is_empty")]
    pub posites: Vec<PositeDef>,
    #[serde(default, rename = "run", skip_serializing_if = "Vec::is_empty")]
    pub runs: Vec<RunDef>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraDef {
    pub name: String,
    #[serde(flatten)]
    pub spec: AlgebraSpec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AlgebraSpec {
    Quiver {
        vertices: Vec<String>,
        /// `[source, target, label]`
        arrows: Vec<[String; 3]>,
    },
    Matrix {
        n: usize,
    },
    Ground,
    Power {
        n: usize,
    },
    Product {
        factors: Vec<String>,
    },
    Quotient {
        of: String,
        relations: Vec<String>,
    },
    /// `k[x]/(x^n + c_{n-1} x^{n-1} + ... + c_0)`, coefficients from `c_0`.
    Monogenic {
        coefficients: Vec<String>,
    },
    Structure {
        labels: Vec<String>,
        unit: String,
        /// `table[i][j]` is the product of basis elements `i` and `j`.
        table: Vec<Vec<String>>,
    },
    Fixture {
        fixture: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismDef {
    pub name: String,
    #[serde(flatten)]
    pub spec: MorphismSpec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MorphismSpec {
    /// Images of the source basis, as elements of the target.
    Images {
        source: String,
        target: String,
        images: Vec<String>,
    },
    /// The projection onto a quotient algebra definition.
    Projection { quotient: String },
    Identity { of: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverDef {
    pub element: String,
    pub family: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeDef {
    pub name: String,
    pub base: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub candidates: Vec<String>,
    /// Also try quotients by idempotents and radical elements.
    #[serde(default, skip_serializing_if = "is_false")]
    pub auto: bool,
    /// Covers used by the declared topology.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub covers: Vec<CoverDef>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PositeDef {
    pub name: String,
    pub elements: Vec<String>,
    /// Pairs `[a, b]` with `a < b`; the order is their transitive closure.
    pub order: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub covers: Vec<CoverDef>,
    pub mode: CoverageMode,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunDef {
    pub command: String,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topology: Option<CoverageMode>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cover: Vec<String>,
    /// `pass`, `fail` or `undetermined`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<String>,
}

impl Workspace {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Input(format!("workspace: {e}")))
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Input(format!("serializing workspace: {e}")))
    }

    pub fn field_spec(&self) -> Result<FieldSpec, CliError> {
        self.field
            .parse()
            .map_err(|e| CliError::Input(format!("field `{}`: {e}", self.field)))
    }
}

/// A workspace with every definition built.
#[derive(Debug)]
pub struct Resolved {
    pub field: FieldSpec,
    pub workspace: Workspace,
    pub algebras: BTreeMap<String, AlgRef>,
    projections: BTreeMap<String, AlgebraMorphism>,
    pub morphisms: BTreeMap<String, AlgebraMorphism>,
}

fn input(msg: String) -> CliError {
    CliError::Input(msg)
}

impl Resolved {
    pub fn new(ws: Workspace, field_override: Option<FieldSpec>) -> Result<Self, CliError> {
        let field = match field_override {
            Some(f) => f,
            None => ws.field_spec()?,
        };
        let mut r = Resolved {
            field,
            workspace: ws.clone(),
            algebras: BTreeMap::new(),
            projections: BTreeMap::new(),
            morphisms: BTreeMap::new(),
        };
        let mut seen = BTreeMap::new();
        for (i, d) in ws.algebras.iter().enumerate() {
            if seen.insert(d.name.clone(), i).is_some() {
                return Err(input(format!("algebra[{i}]: duplicate name `{}`", d.name)));
            }
        }
        for d in &ws.algebras {
            r.algebra(&d.name, &mut Vec::new())?;
        }
        for (i, m) in ws.morphisms.iter().enumerate() {
            if r.morphisms.contains_key(&m.name) {
                return Err(input(format!("morphism[{i}]: duplicate name `{}`", m.name)));
            }
            let f = r
                .build_morphism(&m.spec)
                .map_err(|e| input(format!("morphism[{i}] `{}`: {}", m.name, e.message())))?;
            r.morphisms.insert(m.name.clone(), f);
        }
        Ok(r)
    }

    /// Defined algebras, falling back to the fixture catalog.
    pub fn algebra(&mut self, name: &str, stack: &mut Vec<String>) -> Result<AlgRef, CliError> {
        if let Some(a) = self.algebras.get(name) {
            return Ok(a.clone());
        }
        let Some((i, def)) = self.workspace.algebras.iter().enumerate().find(|(_, d)| d.name == name) else {
            return fixtures::algebra(name, self.field).ok_or_else(|| input(format!("unknown algebra `{name}`")));
        };
        if stack.iter().any(|s| s == name) {
            stack.push(name.to_string());
            return Err(input(format!("algebra definitions form a cycle: {}", stack.join(" -> "))));
        }
        stack.push(name.to_string());
        let spec = def.spec.clone();
        let built = self.build_algebra(&spec, stack).map_err(|e| match e {
            CliError::Input(m) if m.starts_with("algebra definitions form a cycle") => CliError::Input(m),
            e => input(format!("algebra[{i}] `{name}`: {}", e.message())),
        })?;
        stack.pop();
        self.algebras.insert(name.to_string(), built.clone());
        Ok(built)
    }

    fn build_algebra(&mut self, spec: &AlgebraSpec, stack: &mut Vec<String>) -> Result<AlgRef, CliError> {
        let k = self.field;
        Ok(match spec {
            AlgebraSpec::Quiver { vertices, arrows } => {
                let q = Quiver::new(
                    vertices.clone(),
                    arrows.iter().map(|[s, t, l]| (s.clone(), t.clone(), l.clone())).collect(),
                );
                Arc::new(path_algebra(k, &q)?)
            }
            AlgebraSpec::Matrix { n } => Arc::new(matrix_algebra(k, *n)?),
            AlgebraSpec::Ground => Arc::new(Algebra::ground(k)),
            AlgebraSpec::Power { n } => Arc::new(Algebra::field_power(k, *n)),
            AlgebraSpec::Product { factors } => {
                let mut it = factors.iter();
                let first = it.next().ok_or_else(|| input("product needs factors".into()))?;
                let mut acc = (*self.algebra(first, stack)?).clone();
                for f in it {
                    let b = self.algebra(f, stack)?;
                    acc = product_algebra(&acc, &b)?;
                }
                Arc::new(acc)
            }
            AlgebraSpec::Quotient { of, relations } => {
                let a = self.algebra(of, stack)?;
                let gens = relations.iter().map(|r| a.parse_element(r)).collect::<Result<Vec<Vector>, _>>()?;
                let (q, proj) = quotient_algebra(&a, &gens)?;
                self.projections.insert(stack.last().cloned().unwrap_or_default(), proj);
                q
            }
            AlgebraSpec::Monogenic { coefficients } => {
                let c = coefficients.iter().map(|s| k.parse_scalar(s)).collect::<Result<Vec<_>, _>>()?;
                Arc::new(Algebra::monogenic(k, &c)?)
            }
            AlgebraSpec::Structure { labels, unit, table } => {
                let n = labels.len();
                if table.len() != n || table.iter().any(|r| r.len() != n) {
                    return Err(input(format!("structure table must be {n} x {n}")));
                }
                let unit = parse_linear_combination(k, labels, None, unit)?;
                let mut t = Vec::with_capacity(n * n);
                for row in table {
                    for e in row {
                        t.push(parse_linear_combination(k, labels, Some(&unit), e)?);
                    }
                }
                Arc::new(Algebra::new(k, labels.clone(), t, unit)?)
            }
            AlgebraSpec::Fixture { fixture } => {
                fixtures::algebra(fixture, k).ok_or_else(|| input(format!("unknown fixture `{fixture}`")))?
            }
        })
    }

    fn build_morphism(&mut self, spec: &MorphismSpec) -> Result<AlgebraMorphism, CliError> {
        match spec {
            MorphismSpec::Images { source, target, images } => {
                let s = self.algebra(source, &mut Vec::new())?;
                let t = self.algebra(target, &mut Vec::new())?;
                if images.len() != s.dim() {
                    return Err(input(format!("{} images for a source of dimension {}", images.len(), s.dim())));
                }
                let imgs = images.iter().map(|x| t.parse_element(x)).collect::<Result<Vec<_>, _>>()?;
                Ok(AlgebraMorphism::from_images(s, t, &imgs)?)
            }
            MorphismSpec::Projection { quotient } => {
                self.algebra(quotient, &mut Vec::new())?;
                self.projections
                    .get(quotient)
                    .cloned()
                    .ok_or_else(|| input(format!("`{quotient}` is not a quotient definition")))
            }
            MorphismSpec::Identity { of } => Ok(AlgebraMorphism::identity(self.algebra(of, &mut Vec::new())?)),
        }
    }

    pub fn morphism(&self, name: &str) -> Result<&AlgebraMorphism, CliError> {
        self.morphisms.get(name).ok_or_else(|| input(format!("unknown morphism `{name}`")))
    }

    pub fn lattice_def(&self, name: &str) -> Option<&LatticeDef> {
        self.workspace.lattices.iter().find(|l| l.name == name)
    }

    pub fn posite_def(&self, name: &str) -> Option<&PositeDef> {
        self.workspace.posites.iter().find(|p| p.name == name)
    }

    pub fn lattice(&mut self, name: &str, opts: LatticeOptions) -> Result<LocalizationLattice, CliError> {
        let def = self
            .lattice_def(name)
            .cloned()
            .ok_or_else(|| input(format!("unknown lattice `{name}`")))?;
        let base = self.algebra(&def.base, &mut Vec::new())?;
        let mut cands = Vec::new();
        for c in &def.candidates {
            let f = self.morphism(c)?.clone();
            if f.source() != &base {
                return Err(input(format!("lattice `{name}`: candidate `{c}` does not start at `{}`", def.base)));
            }
            cands.push(Candidate::new(c.clone(), f));
        }
        if def.auto {
            cands.extend(interesting_quotients(&base)?);
        }
        let top = def.top.clone().unwrap_or_else(|| def.base.clone());
        Ok(build_lattice(&base, &top, &cands, opts)?)
    }

    /// The first lattice defined over the named algebra.
    pub fn lattice_over(&self, base: &AlgRef) -> Option<String> {
        self.workspace
            .lattices
            .iter()
            .find(|l| self.algebras.get(&l.base).is_some_and(|a| a == base))
            .map(|l| l.name.clone())
    }
}

impl PositeDef {
    pub fn fixture(&self) -> PositeFixture {
        PositeFixture {
            elements: self.elements.clone(),
            order: self.order.iter().map(|[a, b]| (a.clone(), b.clone())).collect(),
            covers: self.covers.iter().map(|c| (c.element.clone(), c.family.clone())).collect(),
            mode: self.mode,
        }
    }
}

/// Built-in workspaces for the fixture catalog.
pub const BUILTIN: &[(&str, &str)] = &[
    ("ka2", include_str!("../workspaces/ka2.toml")),
    ("kk", include_str!("../workspaces/kk.toml")),
    ("k3", include_str!("../workspaces/k3.toml")),
    ("dual", include_str!("../workspaces/dual.toml")),
    ("valuation", include_str!("../workspaces/valuation.toml")),
];

pub fn builtin(name: &str) -> Option<&'static str> {
    BUILTIN.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(text: &str) -> Result<Resolved, CliError> {
        Resolved::new(Workspace::parse(text)?, None)
    }

    #[test]
    fn builtins_resolve() {
        for (name, text) in BUILTIN {
            let r = resolve(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(!r.workspace.runs.is_empty(), "{name}");
        }
    }

    #[test]
    fn structure_tables_and_monogenic_agree() {
        let r = resolve(
            r#"
[[algebra]]
name = "S"
kind = "structure"
labels = ["1", "x"]
unit = "1"
table = [["1", "x"], ["x", "0"]]

[[algebra]]
name = "D"
kind = "monogenic"
coefficients = ["0", "0"]
"#,
        )
        .unwrap();
        assert_eq!(r.algebras["S"].table(), r.algebras["D"].table());
    }

    #[test]
    fn fixture_names_resolve_without_definitions() {
        let mut r = resolve("field = \"fp:3\"\n").unwrap();
        assert_eq!(r.algebra("m2", &mut Vec::new()).unwrap().dim(), 4);
        assert!(r.algebra("nope", &mut Vec::new()).is_err());
    }

    #[test]
    fn cycles_are_reported_with_their_path() {
        let e = resolve(
            "[[algebra]]\nname = \"A\"\nkind = \"quotient\"\nof = \"B\"\nrelations = []\n\n\
             [[algebra]]\nname = \"B\"\nkind = \"product\"\nfactors = [\"A\"]\n",
        )
        .unwrap_err();
        assert!(e.message().contains("A -> B -> A"), "{e}");
    }

    #[test]
    fn morphism_errors_name_the_entry() {
        let e = resolve(
            "[[morphism]]\nname = \"f\"\nkind = \"images\"\nsource = \"k2\"\ntarget = \"k\"\nimages = [\"1\"]\n",
        )
        .unwrap_err();
        assert!(e.message().starts_with("morphism[0] `f`"), "{e}");
        let e = resolve("[[morphism]]\nname = \"p\"\nkind = \"projection\"\nquotient = \"k2\"\n").unwrap_err();
        assert!(e.message().contains("not a quotient definition"), "{e}");
    }
}
