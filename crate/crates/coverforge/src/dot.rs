//! DOT export with bit-stable output: vertices and arrows are emitted in
//! sorted-id order, so identical inputs produce identical bytes.

use std::fmt::Write as _;

use crate::digraph::DiGraph;
use crate::tower::CoverTower;

/// One graph as a `digraph` block named `level_<n>`.
pub fn graph_to_dot(g: &DiGraph, name: &str) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {name} {{").unwrap();
    for v in g.vertices() {
        writeln!(out, "  \"{}\";", g.vertex_name(v)).unwrap();
    }
    for a in g.arrow_ids() {
        writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{} w={}\"];",
            g.vertex_name(g.source(a)),
            g.vertex_name(g.target(a)),
            g.arrow_label(a),
            g.weight(a)
        )
        .unwrap();
    }
    writeln!(out, "}}").unwrap();
    out
}

/// All levels, or one level, of a tower.
pub fn tower_to_dot(t: &CoverTower, level: Option<usize>) -> String {
    let mut out = String::new();
    match level {
        Some(n) => out.push_str(&graph_to_dot(t.level(n), &format!("level_{n}"))),
        None => {
            for (n, g) in t.levels().iter().enumerate() {
                out.push_str(&graph_to_dot(g, &format!("level_{n}")));
            }
        }
    }
    out
}
