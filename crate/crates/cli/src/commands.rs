//! The verbs, each producing an [`Outcome`] with a JSON result, an
//! optional graph and a short text summary.

use ncspec_core::descent::{descendability_check, sheaf_check, structure_presheaf};
use ncspec_core::epiloc::{
    build_lattice, check_homotopical_epi, induced_lattice_map, interesting_quotients, LatticeOptions,
    LocalizationLattice, Meet, NodeImage,
};
use ncspec_core::exactlin::FieldSpec;
use ncspec_core::topos::{
    classical_spec, comparison_map, posite_fixture, verify_functoriality, verify_posite_axioms, CoverageMode, Frame,
    Posite, SoberSpace,
};
use ncspec_core::{descent, modhom};
use serde::Serialize;
use serde_json::{json, Value};

use crate::export;
use crate::workspace::{Resolved, Workspace, BUILTIN};
use crate::CliError;

pub const SCHEMA: &str = "ncspec.report/v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Undetermined,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Undetermined => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Undetermined => "undetermined",
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub field: Option<FieldSpec>,
    pub max_deg: Option<usize>,
    pub degree_cap: Option<usize>,
    pub t_max: Option<usize>,
    pub topology: Option<CoverageMode>,
}

impl Options {
    fn lattice(&self) -> LatticeOptions {
        let d = LatticeOptions::default();
        LatticeOptions {
            max_deg: self.max_deg.unwrap_or(d.max_deg),
            degree_cap: self.degree_cap.unwrap_or(d.degree_cap),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub command: &'static str,
    pub target: String,
    pub status: Status,
    pub result: Value,
    pub dot: Option<String>,
    pub summary: Vec<String>,
}

impl Outcome {
    pub fn report(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "target": self.target,
            "status": self.status,
            "result": self.result,
        })
    }

    pub fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report()).expect("json values serialize");
        s.push('\n');
        s
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        for l in &self.summary {
            s.push_str(l);
            s.push('\n');
        }
        s.push_str(&format!("status: {}\n", self.status.name()));
        s
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

pub fn verify_epi(r: &Resolved, name: &str, opts: &Options) -> Result<Outcome, CliError> {
    let f = r.morphism(name)?;
    let max_deg = opts.max_deg.unwrap_or(modhom::DEFAULT_MAX_DEG);
    let cert = check_homotopical_epi(f, max_deg)?;
    let status = if cert.is_valid() { Status::Pass } else { Status::Fail };
    let summary = vec![
        format!("morphism {name}: dim {} -> dim {}", f.source().dim(), f.target().dim()),
        format!("multiplication iso: {}", cert.mult_iso),
        format!(
            "tor dims: {:?} (zero up to degree {} of {}{})",
            cert.tor_dims,
            cert.tor_zero_up_to,
            cert.max_deg,
            if cert.complete { ", resolution terminated" } else { "" }
        ),
    ];
    Ok(Outcome {
        command: "verify-epi",
        target: name.into(),
        status,
        result: json!({
            "morphism": name,
            "source_dim": f.source().dim(),
            "target_dim": f.target().dim(),
            "certificate": to_value(&cert),
            "valid": cert.is_valid(),
            "unconditional": cert.is_unconditional(),
        }),
        dot: None,
        summary,
    })
}

/// A lattice definition, a lattice over a named algebra, or the automatic
/// lattice of any algebra the workspace or the fixture catalog knows.
pub fn lattice_for(r: &mut Resolved, name: &str, opts: &Options) -> Result<LocalizationLattice, CliError> {
    if r.lattice_def(name).is_some() {
        return r.lattice(name, opts.lattice());
    }
    let a = r.algebra(name, &mut Vec::new())?;
    if let Some(l) = r.lattice_over(&a) {
        return r.lattice(&l, opts.lattice());
    }
    Ok(build_lattice(&a, name, &interesting_quotients(&a)?, opts.lattice())?)
}

fn lattice_result(l: &LocalizationLattice) -> Value {
    let id = |i: usize| l.nodes[i].id.clone();
    let nodes: Vec<Value> = l
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| {
            json!({
                "index": i,
                "id": n.id,
                "dim": n.target().dim(),
                "certificate": to_value(&n.certificate),
                "kernel_generators": n.kernel_generators,
            })
        })
        .collect();
    let mut meets = Vec::new();
    for i in 0..l.len() {
        for j in i + 1..l.len() {
            let m = match l.meet(i, j) {
                Meet::Node(k) => Value::String(id(k)),
                Meet::Undetermined => Value::Null,
            };
            meets.push(json!({"left": id(i), "right": id(j), "meet": m}));
        }
    }
    json!({
        "base_dim": l.base.dim(),
        "nodes": nodes,
        "covering_pairs": l.covering_pairs().iter().map(|(a, b)| [id(*a), id(*b)]).collect::<Vec<_>>(),
        "meets": meets,
        "undetermined_meets": l.undetermined_meets().iter().map(|(a, b)| [id(*a), id(*b)]).collect::<Vec<_>>(),
        "rejected": to_value(&l.rejected),
        "axiom_failures": l.verify(),
    })
}

pub fn lattice(r: &mut Resolved, name: &str, opts: &Options) -> Result<Outcome, CliError> {
    let l = lattice_for(r, name, opts)?;
    let failures = l.verify();
    let status = if !failures.is_empty() {
        Status::Fail
    } else if !l.undetermined_meets().is_empty() {
        Status::Undetermined
    } else {
        Status::Pass
    };
    let mut summary = vec![format!("lattice {name}: {} nodes over an algebra of dim {}", l.len(), l.base.dim())];
    for (i, n) in l.nodes.iter().enumerate() {
        summary.push(format!("  {i:>2} {:<12} dim {}", n.id, n.target().dim()));
    }
    let pairs: Vec<String> = l
        .covering_pairs()
        .iter()
        .map(|(a, b)| format!("{} < {}", l.nodes[*a].id, l.nodes[*b].id))
        .collect();
    summary.push(format!("covering pairs: {}", pairs.join(", ")));
    summary.push(format!("undetermined meets: {}", l.undetermined_meets().len()));
    summary.push(format!("rejected candidates: {}", l.rejected.len()));
    for f in &failures {
        summary.push(format!("axiom failure: {f}"));
    }
    Ok(Outcome {
        command: "lattice",
        target: name.into(),
        status,
        result: lattice_result(&l),
        dot: Some(export::lattice_dot(name, &l)),
        summary,
    })
}

/// The posite behind a spectrum: either a lattice with a coverage, or a
/// standalone posite definition.
pub struct Site {
    pub posite: Posite,
    pub lattice: Option<LocalizationLattice>,
}

fn lattice_site(r: &Resolved, name: &str, l: LocalizationLattice, mode: CoverageMode) -> Result<Site, CliError> {
    let mut declared = vec![Vec::new(); l.len()];
    if mode == CoverageMode::Declared {
        for c in r.lattice_def(name).map(|d| d.covers.clone()).unwrap_or_default() {
            let look = |s: &str| {
                l.index_of(s)
                    .ok_or_else(|| input(format!("lattice `{name}`: cover mentions unknown node `{s}`")))
            };
            let u = look(&c.element)?;
            let mut m = 0u64;
            for e in &c.family {
                m |= 1 << look(e)?;
            }
            declared[u].push(m);
        }
    }
    let posite = Posite::from_lattice(&l, mode, declared)?;
    Ok(Site {
        posite,
        lattice: Some(l),
    })
}

pub fn site(r: &mut Resolved, name: &str, opts: &Options, default: CoverageMode) -> Result<Site, CliError> {
    let fixture = match r.posite_def(name).map(|p| p.fixture()) {
        Some(p) => Some(p),
        None if r.lattice_def(name).is_none() && r.algebra(name, &mut Vec::new()).is_err() => {
            ncspec_core::fixtures::posite(name)
        }
        None => None,
    };
    if let Some(mut d) = fixture {
        if let Some(mode) = opts.topology {
            if mode != CoverageMode::Declared {
                d.covers.clear();
            }
            d.mode = mode;
        }
        return Ok(Site {
            posite: posite_fixture(&d).map_err(|e| input(format!("posite `{name}`: {e}")))?,
            lattice: None,
        });
    }
    let l = lattice_for(r, name, opts)?;
    lattice_site(r, name, l, opts.topology.unwrap_or(default))
}

fn space_result(frame: &Frame, space: &SoberSpace) -> Value {
    let generic = space.generic_points();
    let closed = space.closed_points();
    let points: Vec<Value> = space
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            json!({
                "label": p.label,
                "prime": p.prime_name,
                "generic": generic.contains(&i),
                "closed": closed.contains(&i),
            })
        })
        .collect();
    let spec: Vec<[String; 2]> = export::specialization_edges(space)
        .iter()
        .map(|(y, x)| [space.points[*y].label.clone(), space.points[*x].label.clone()])
        .collect();
    let opens: Vec<Value> = (0..frame.len())
        .map(|u| {
            let pts: Vec<&str> = (0..space.len())
                .filter(|x| space.opens[u] & (1 << x) != 0)
                .map(|x| space.points[x].label.as_str())
                .collect();
            json!({"ideal": frame.name(u), "points": pts})
        })
        .collect();
    json!({
        "points": points,
        "specializations": spec,
        "opens": opens,
        "t0": space.is_t0(),
        "sober": space.is_sober(),
        "irreducible": space.is_irreducible(),
        "discrete": space.is_discrete(),
    })
}

pub fn spectrum(r: &mut Resolved, name: &str, opts: &Options) -> Result<Outcome, CliError> {
    let site = site(r, name, opts, CoverageMode::Fine)?;
    let p = &site.posite;
    let frame = p.ideals()?;
    let space = frame.points();
    let axioms = verify_posite_axioms(p);
    let stable = axioms.iter().all(|a| a.pass);
    let distributive = frame.distributivity_failures().is_empty();

    let mut comparisons = Vec::new();
    let mut summary = Vec::new();
    if p.mode() != CoverageMode::Trivial {
        if stable {
            let coarse = match &site.lattice {
                Some(l) => Posite::from_lattice(l, CoverageMode::Trivial, Vec::new())?,
                None => Posite::new(
                    p.names().to_vec(),
                    &(0..p.len()).map(|i| (0..p.len()).map(|j| p.leq(i, j)).collect()).collect::<Vec<_>>(),
                    CoverageMode::Trivial,
                    Vec::new(),
                    None,
                )?,
            };
            let cf = coarse.ideals()?;
            let cs = cf.points();
            let c = comparison_map(&frame, &cf);
            let images: Vec<Value> = c
                .point_map
                .iter()
                .map(|x| x.map_or(Value::Null, |x| Value::String(cs.points[x].label.clone())))
                .collect();
            summary.push(format!("comparison to trivial topology: continuous = {}", c.continuous));
            comparisons.push(json!({"to": "trivial", "images": images, "continuous": c.continuous}));
        } else {
            comparisons.push(json!({"to": "trivial", "unavailable": "coverage is not stable"}));
        }
    }
    if let Some(l) = &site.lattice {
        if l.base.is_commutative() {
            match classical_spec(&l.base) {
                Ok(cl) => {
                    let proj: Vec<Vec<String>> = cl
                        .projection(l, &frame)
                        .iter()
                        .map(|v| v.iter().map(|i| cl.space.points[*i].label.clone()).collect())
                        .collect();
                    comparisons.push(json!({"to": "classical", "images": proj}));
                }
                Err(e) => comparisons.push(json!({"to": "classical", "unavailable": e.to_string()})),
            }
        }
    }

    let undetermined = site.lattice.as_ref().map_or(0, |l| l.undetermined_meets().len());
    let status = if !distributive || !space.is_sober() {
        Status::Fail
    } else if undetermined > 0 || !p.blocked().is_empty() {
        Status::Undetermined
    } else {
        Status::Pass
    };

    let mut head = vec![
        format!("spectrum of {name} ({} topology)", p.mode()),
        format!("posite: {} elements, frame: {} ideals", p.len(), frame.len()),
        format!("points ({}):", space.len()),
    ];
    let generic = space.generic_points();
    for (i, pt) in space.points.iter().enumerate() {
        let kind = if generic.contains(&i) { "generic" } else { "specialization" };
        head.push(format!("  {:<16} {kind}, prime {}", pt.label, pt.prime_name));
    }
    for (y, x) in export::specialization_edges(&space) {
        head.push(format!("  {} specializes {}", space.points[y].label, space.points[x].label));
    }
    if undetermined > 0 {
        head.push(format!("undetermined meets: {undetermined}"));
    }
    head.extend(summary);

    let mut result = space_result(&frame, &space);
    let obj = result.as_object_mut().expect("object");
    obj.insert("topology".into(), json!(p.mode()));
    obj.insert("elements".into(), json!(p.names()));
    obj.insert("blocked".into(), json!(p.blocked().iter().map(|i| &p.names()[*i]).collect::<Vec<_>>()));
    obj.insert("ideals".into(), json!(frame.names()));
    obj.insert("axioms".into(), to_value(&axioms));
    obj.insert("distributive".into(), json!(distributive));
    obj.insert("comparisons".into(), json!(comparisons));
    obj.insert("undetermined_meets".into(), json!(undetermined));
    if let Some(l) = &site.lattice {
        obj.insert("lattice".into(), lattice_result(l));
    }
    Ok(Outcome {
        command: "spectrum",
        target: name.into(),
        status,
        result,
        dot: Some(export::space_dot(name, &space)),
        summary: head,
    })
}

pub fn descend(
    r: &mut Resolved,
    name: &str,
    cover: &[String],
    open: Option<&str>,
    opts: &Options,
) -> Result<Outcome, CliError> {
    let site = site(r, name, opts, CoverageMode::Fine)?;
    let l = site.lattice.ok_or_else(|| input(format!("`{name}` is a posite without algebras")))?;
    let p = &site.posite;
    let u = match open {
        Some(o) => l.index_of(o).ok_or_else(|| input(format!("unknown node `{o}`")))?,
        None => l.top(),
    };
    if cover.is_empty() {
        return Err(input("descend needs a cover"));
    }
    let mut idx = Vec::new();
    let mut mask = 0u64;
    for c in cover {
        let i = l.index_of(c).ok_or_else(|| input(format!("unknown node `{c}`")))?;
        if !l.leq[i][u] {
            return Err(input(format!("invalid cover: `{c}` is not below `{}`", l.nodes[u].id)));
        }
        idx.push(i);
        mask |= 1 << i;
    }
    if !p.covers(u, mask) {
        return Err(input(format!(
            "invalid cover: {{{}}} does not cover `{}` in the {} topology",
            cover.join(", "),
            l.nodes[u].id,
            p.mode()
        )));
    }
    let t_max = opts.t_max.unwrap_or(descent::DEFAULT_T_MAX);
    let ps = structure_presheaf(&l)?;
    let sheaf = sheaf_check(&ps, u, &idx)?;
    let maps: Vec<_> = if u == l.top() {
        idx.iter().map(|i| l.nodes[*i].map.clone()).collect()
    } else {
        idx.iter()
            .map(|i| {
                ps.restriction(*i, u)
                    .cloned()
                    .ok_or_else(|| input(format!("no restriction from `{}`", l.nodes[u].id)))
            })
            .collect::<Result<_, _>>()?
    };
    let d = descendability_check(ps.section(u), &maps, t_max)?;
    let status = if d.pass() { Status::Pass } else { Status::Fail };
    let verdict = |b: bool| if b { "PASS" } else { "FAIL" };
    let summary = vec![
        format!("open {} covered by {{{}}}", l.nodes[u].id, cover.join(", ")),
        format!(
            "sheaf condition: {} (global {}, product {}, equalizer {})",
            verdict(sheaf.pass),
            sheaf.global_dim,
            sheaf.product_dim,
            sheaf.equalizer_dim
        ),
        format!(
            "descent: {} (cobar levels {:?}, exact at {:?}{})",
            verdict(d.pass()),
            d.level_dims,
            d.exact_positions,
            if d.split_exact { ", split" } else { "" }
        ),
    ];
    let tor: Vec<Value> = d
        .tor_flags
        .iter()
        .map(|t| json!({"left": cover[t.left], "right": cover[t.right], "tor1": t.tor1}))
        .collect();
    Ok(Outcome {
        command: "descend",
        target: name.into(),
        status,
        result: json!({
            "open": l.nodes[u].id,
            "cover": cover,
            "topology": p.mode(),
            "t_max": t_max,
            "sheaf": to_value(&sheaf),
            "descent": to_value(&d),
            "descent_pass": d.pass(),
            "tor_dependent_pairs": tor,
            "sheaf_property_in_general": "unverified",
        }),
        dot: None,
        summary,
    })
}

pub fn map(r: &mut Resolved, name: &str, opts: &Options) -> Result<Outcome, CliError> {
    let f = r.morphism(name)?.clone();
    let find = |r: &Resolved, a, side: &str| {
        r.lattice_over(a)
            .ok_or_else(|| input(format!("morphism `{name}`: no lattice over its {side}")))
    };
    let src_name = find(r, f.source(), "source")?;
    let dst_name = find(r, f.target(), "target")?;
    let mode = opts.topology.unwrap_or(CoverageMode::Trivial);
    let mut o = opts.clone();
    o.topology = Some(mode);
    let ls = site(r, &src_name, &o, mode)?;
    let lt = site(r, &dst_name, &o, mode)?;
    let (sl, tl) = (ls.lattice.as_ref().expect("lattice"), lt.lattice.as_ref().expect("lattice"));
    let images = induced_lattice_map(&f, sl, tl)?;
    let node_map: Vec<Option<usize>> = images
        .iter()
        .map(|i| match i {
            NodeImage::Node(n) => Some(*n),
            _ => None,
        })
        .collect();
    let undetermined = images.iter().any(|i| matches!(i, NodeImage::Undetermined));
    let functoriality = verify_functoriality(&ls.posite, &lt.posite, &node_map);
    let sf = ls.posite.ideals()?;
    let tf = lt.posite.ideals()?;
    let ss = sf.points();
    let ts = tf.points();
    let pm = ncspec_core::topos::induced_point_map(&sf, &tf, &node_map);

    // Where a point has no image, relate it to the largest source points
    // whose primes lie inside the pulled back downset.
    let mut edges = Vec::new();
    let mut correspondence = Vec::new();
    for (t, q) in ts.points.iter().enumerate() {
        if let Some(s) = pm.images[t] {
            edges.push((t, s, true));
            continue;
        }
        if node_map.iter().any(Option::is_none) {
            continue;
        }
        let prime = tf.ideals[q.prime];
        let pre = node_map
            .iter()
            .enumerate()
            .filter(|(_, v)| prime & (1 << v.unwrap()) != 0)
            .fold(0u64, |m, (u, _)| m | 1 << u);
        let inside: Vec<usize> = (0..ss.len()).filter(|x| sf.ideals[ss.points[*x].prime] & !pre == 0).collect();
        let maximal: Vec<usize> = inside
            .iter()
            .copied()
            .filter(|x| {
                let a = sf.ideals[ss.points[*x].prime];
                !inside.iter().any(|y| {
                    let b = sf.ideals[ss.points[*y].prime];
                    b != a && a & !b == 0
                })
            })
            .collect();
        for s in &maximal {
            edges.push((t, *s, false));
        }
        correspondence.push(json!({
            "point": q.label,
            "related": maximal.iter().map(|s| &ss.points[*s].label).collect::<Vec<_>>(),
        }));
    }
    let node_json: Vec<Value> = images
        .iter()
        .enumerate()
        .map(|(i, im)| {
            let image = match im {
                NodeImage::Node(n) => json!(tl.nodes[*n].id),
                NodeImage::Unmatched { dim } => json!({"unmatched_dim": dim}),
                NodeImage::Undetermined => json!("undetermined"),
            };
            json!({"node": sl.nodes[i].id, "image": image})
        })
        .collect();
    let point_json: Vec<Value> = ts
        .points
        .iter()
        .enumerate()
        .map(|(t, q)| json!({"point": q.label, "image": pm.images[t].map(|s| &ss.points[s].label)}))
        .collect();
    let map_exists = pm.images.iter().all(Option::is_some) && pm.continuous;
    let status = if undetermined { Status::Undetermined } else { Status::Pass };
    let mut summary = vec![
        format!("{name}: lattice {src_name} -> lattice {dst_name} ({mode} topology)"),
        "node map:".to_string(),
    ];
    for (i, im) in images.iter().enumerate() {
        let to = match im {
            NodeImage::Node(n) => tl.nodes[*n].id.clone(),
            NodeImage::Unmatched { dim } => format!("unmatched (dim {dim})"),
            NodeImage::Undetermined => "undetermined".into(),
        };
        summary.push(format!("  {} -> {to}", sl.nodes[i].id));
    }
    summary.push("point map (target space -> source space):".into());
    for (t, q) in ts.points.iter().enumerate() {
        let to = pm.images[t].map_or("none".to_string(), |s| ss.points[s].label.clone());
        summary.push(format!("  {} -> {to}", q.label));
    }
    summary.push(format!("continuous map: {map_exists}"));
    for d in &pm.diagnostics {
        summary.push(format!("diagnostic: {d}"));
    }
    for c in &correspondence {
        summary.push(format!("correspondence: {} ~ {}", c["point"].as_str().unwrap_or(""), c["related"]));
    }
    Ok(Outcome {
        command: "map",
        target: name.into(),
        status,
        result: json!({
            "source_lattice": src_name,
            "target_lattice": dst_name,
            "topology": mode,
            "node_map": node_json,
            "functoriality": to_value(&functoriality),
            "source_points": ss.labels(),
            "target_points": ts.labels(),
            "point_map": point_json,
            "continuous": pm.continuous,
            "map_exists": map_exists,
            "correspondence": correspondence,
            "diagnostics": pm.diagnostics,
        }),
        dot: Some(export::map_dot(name, &ss, &ts, &edges)),
        summary,
    })
}

pub fn fixtures(name: Option<&str>) -> Result<Outcome, CliError> {
    match name {
        None => {
            let mut summary = vec!["algebras and posites:".to_string()];
            for (n, d) in ncspec_core::fixtures::CATALOG {
                summary.push(format!("  {n:<10} {d}"));
            }
            summary.push("workspaces (use @name as the workspace argument):".into());
            for (n, _) in BUILTIN {
                summary.push(format!("  @{n}"));
            }
            Ok(Outcome {
                command: "fixtures",
                target: String::new(),
                status: Status::Pass,
                result: json!({
                    "catalog": ncspec_core::fixtures::CATALOG.iter().map(|(n, d)| json!({"name": n, "description": d})).collect::<Vec<_>>(),
                    "workspaces": BUILTIN.iter().map(|(n, _)| n).collect::<Vec<_>>(),
                }),
                dot: None,
                summary,
            })
        }
        Some(n) => {
            let text = crate::workspace::builtin(n.trim_start_matches('@'))
                .ok_or_else(|| input(format!("no built-in workspace `{n}`")))?;
            Ok(Outcome {
                command: "fixtures",
                target: n.into(),
                status: Status::Pass,
                result: json!({"workspace": text}),
                dot: None,
                summary: vec![text.trim_end().to_string()],
            })
        }
    }
}

/// Runs one directive; input errors count as a failed expectation.
fn run_directive(r: &mut Resolved, d: &crate::workspace::RunDef, opts: &Options) -> Result<Outcome, CliError> {
    let mut o = opts.clone();
    if d.topology.is_some() {
        o.topology = d.topology;
    }
    match d.command.as_str() {
        "verify-epi" => verify_epi(r, &d.target, &o),
        "lattice" => lattice(r, &d.target, &o),
        "spectrum" => spectrum(r, &d.target, &o),
        "descend" => descend(r, &d.target, &d.cover, None, &o),
        "map" => map(r, &d.target, &o),
        c => Err(input(format!("unknown run command `{c}`"))),
    }
}

/// Round trip and run directives of the given workspaces.
pub fn selftest(workspaces: &[(String, String)], opts: &Options) -> Result<Outcome, CliError> {
    let mut results = Vec::new();
    let mut summary = Vec::new();
    let mut ok = true;
    for (label, text) in workspaces {
        let ws = Workspace::parse(text).map_err(|e| input(format!("{label}: {}", e.message())))?;
        let once = ws.to_toml()?;
        let round = Workspace::parse(&once)?;
        let round_trip = round == ws && round.to_toml()? == once;
        ok &= round_trip;
        summary.push(format!("{} {label}: round trip", if round_trip { "PASS" } else { "FAIL" }));
        results.push(json!({"workspace": label, "check": "round trip", "pass": round_trip}));
        let mut r = Resolved::new(ws.clone(), opts.field)?;
        for d in &ws.runs {
            let expect = d.expect.clone().unwrap_or_else(|| "pass".into());
            let got = match run_directive(&mut r, d, opts) {
                Ok(o) => o.status.name().to_string(),
                Err(e) => format!("error: {}", e.message()),
            };
            let pass = got == expect;
            ok &= pass;
            let what = format!("{} {}", d.command, d.target);
            summary.push(format!("{} {label}: {what} (expected {expect}, got {got})", if pass { "PASS" } else { "FAIL" }));
            results.push(json!({"workspace": label, "check": what, "expected": expect, "got": got, "pass": pass}));
        }
    }
    Ok(Outcome {
        command: "selftest",
        target: String::new(),
        status: if ok { Status::Pass } else { Status::Fail },
        result: json!({"checks": results}),
        dot: None,
        summary,
    })
}
