//! Graphviz output for diagrams, frames, graphs, bundles and pseudoproducts.

use std::fmt::Write as _;

use crate::constructions::{ConstructionBundle, Graph, Pseudoproduct};
use crate::diagram::{Diagram, Edge, Frame};

const PALETTE: [&str; 8] =
    ["#a6cee3", "#b2df8a", "#fb9a99", "#fdbf6f", "#cab2d6", "#ffff99", "#1f78b4", "#33a02c"];

fn digraph(name: &str, f: &Frame, node: impl Fn(usize) -> (String, String), edge_attr: impl Fn(&Edge) -> String) -> String {
    let mut out = format!("digraph {name} {{\n  rankdir=LR;\n");
    for p in f.points() {
        let (id, attrs) = node(p);
        let _ = writeln!(out, "  {id} [{attrs}];");
    }
    for e in f.edges() {
        let extra = edge_attr(e);
        let sep = if extra.is_empty() { "" } else { ", " };
        let _ = writeln!(out, "  {} -> {} [label=\"{}\"{sep}{extra}];", node(e.src).0, node(e.dst).0, e.label);
    }
    out.push_str("}\n");
    out
}

pub fn frame_to_dot(f: &Frame) -> String {
    digraph("F", f, |p| (format!("w{p}"), format!("label=\"w{p}\"")), |_| String::new())
}

pub fn diagram_to_dot(d: &Diagram) -> String {
    digraph(
        "D",
        d.frame(),
        |p| {
            let shape = if p == Diagram::ROOT { "doublecircle" } else { "circle" };
            (format!("x{p}"), format!("label=\"x{p}\", shape={shape}"))
        },
        |_| String::new(),
    )
}

pub fn graph_to_dot(g: &Graph) -> String {
    let mut out = String::from("graph G {\n");
    for v in g.vertices() {
        let _ = writeln!(out, "  v{v};");
    }
    for (a, b) in g.edges() {
        let _ = writeln!(out, "  v{a} -- v{b};");
    }
    out.push_str("}\n");
    out
}

fn bundle_node(b: &ConstructionBundle, p: usize) -> String {
    if let Some(i) = b.preimage(p) {
        format!("g_x{i}")
    } else if p == b.reflexive_point {
        "circ".to_string()
    } else {
        format!("w{p}")
    }
}

/// `F+` with the removed edge dashed; chase layers get a fill colour by round.
pub fn bundle_to_dot(b: &ConstructionBundle) -> String {
    let removed = b.removed_edge();
    let depth = crate::diagram::paths::distances_from(&b.f_plus, b.root);
    digraph(
        "Fpm",
        &b.f_plus,
        |p| {
            let id = bundle_node(b, p);
            let label = if p == b.reflexive_point { "∘".to_string() } else { id.clone() };
            let colour = PALETTE[depth[p].unwrap_or(0) % PALETTE.len()];
            (id, format!("label=\"{label}\", style=filled, fillcolor=\"{colour}\""))
        },
        |e| if Some(e) == removed.as_ref() { "style=dashed".to_string() } else { String::new() },
    )
}

/// `F± x G`, one fill colour per graph vertex.
pub fn pseudoproduct_to_dot(b: &ConstructionBundle, pp: &Pseudoproduct) -> String {
    digraph(
        "FxG",
        &pp.frame,
        |p| match pp.h[p] {
            None => ("g_x0".to_string(), "label=\"w0\", shape=doublecircle".to_string()),
            Some(v) => {
                let base = bundle_node(b, pp.pr[p]);
                let colour = PALETTE[v % PALETTE.len()];
                (format!("{base}_v{v}"), format!("label=\"({base},v{v})\", style=filled, fillcolor=\"{colour}\""))
            }
        },
        |_| String::new(),
    )
}
