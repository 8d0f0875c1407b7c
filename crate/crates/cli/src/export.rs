//! Graphviz exports. Output depends only on the inputs, never on hashing
//! or timing.

use std::fmt::Write;

use ncspec_core::epiloc::LocalizationLattice;
use ncspec_core::topos::SoberSpace;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Covering relations of the lattice, bottom at the bottom.
pub fn lattice_dot(name: &str, l: &LocalizationLattice) -> String {
    let mut s = String::new();
    writeln!(s, "digraph {} {{", quote(name)).unwrap();
    writeln!(s, "  rankdir=BT;").unwrap();
    writeln!(s, "  node [shape=box];").unwrap();
    for (i, n) in l.nodes.iter().enumerate() {
        let label = format!("{}\ndim {}", n.id, n.target().dim());
        writeln!(s, "  n{i} [label={}];", quote(&label)).unwrap();
    }
    for (a, b) in l.covering_pairs() {
        writeln!(s, "  n{a} -> n{b};").unwrap();
    }
    s.push_str("}\n");
    s
}

/// Pairs `(special, generic)` of the specialization order with nothing
/// strictly between them.
pub fn specialization_edges(space: &SoberSpace) -> Vec<(usize, usize)> {
    let n = space.len();
    let below = |y: usize, x: usize| x != y && space.specializes(x, y);
    let mut out = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if below(y, x) && !(0..n).any(|z| below(y, z) && below(z, x)) {
                out.push((y, x));
            }
        }
    }
    out
}

pub fn space_dot(name: &str, space: &SoberSpace) -> String {
    let mut s = String::new();
    writeln!(s, "digraph {} {{", quote(name)).unwrap();
    writeln!(s, "  rankdir=BT;").unwrap();
    let generic = space.generic_points();
    for (i, p) in space.points.iter().enumerate() {
        let extra = if generic.contains(&i) { ", peripheries=2" } else { "" };
        writeln!(s, "  p{i} [label={}{extra}];", quote(&p.label)).unwrap();
    }
    for (y, x) in specialization_edges(space) {
        writeln!(s, "  p{y} -> p{x};").unwrap();
    }
    s.push_str("}\n");
    s
}

/// Points of the target space on the left, source space on the right;
/// dashed edges belong to a correspondence rather than a map.
pub fn map_dot(name: &str, source: &SoberSpace, target: &SoberSpace, edges: &[(usize, usize, bool)]) -> String {
    let mut s = String::new();
    writeln!(s, "digraph {} {{", quote(name)).unwrap();
    writeln!(s, "  rankdir=LR;").unwrap();
    for (tag, space) in [("t", target), ("s", source)] {
        let title = if tag == "t" { "target" } else { "source" };
        writeln!(s, "  subgraph cluster_{title} {{").unwrap();
        writeln!(s, "    label={};", quote(title)).unwrap();
        for (i, p) in space.points.iter().enumerate() {
            writeln!(s, "    {tag}{i} [label={}];", quote(&p.label)).unwrap();
        }
        writeln!(s, "  }}").unwrap();
    }
    for (t, src, solid) in edges {
        let style = if *solid { "" } else { " [style=dashed]" };
        writeln!(s, "  t{t} -> s{src}{style};").unwrap();
    }
    s.push_str("}\n");
    s
}
