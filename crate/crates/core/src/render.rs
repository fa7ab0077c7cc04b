//! Graphviz DOT rendering of diagrams.
//!
//! Output is byte-deterministic: nodes appear in id order, covers in
//! lexicographic order, and nothing depends on iteration or hashing state.
//! Edges run bottom-to-top (`rankdir=BT`), the unique maximum is pinned to
//! the top rank, singleton nodes draw as labeled points, and box nodes draw
//! as boxes labeled with their cardinality glyph.

use std::fmt::Write as _;

use crate::card::Cardinality;
use crate::diagram::SpecDiagram;

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            other => out.push(other),
        }
    }
    out
}

/// Render a diagram as DOT.
pub fn render_dot(d: &SpecDiagram) -> String {
    let mut out = String::new();
    out.push_str("digraph spec {\n");
    out.push_str("  rankdir=BT;\n");
    out.push_str("  node [fontsize=10];\n");
    for node in d.nodes() {
        let id = escape(node.id.as_str());
        if node.card == Cardinality::Finite(1) {
            let text = if node.label.is_empty() {
                node.id.as_str()
            } else {
                node.label.as_str()
            };
            let _ = writeln!(
                out,
                "  \"{id}\" [shape=point, xlabel=\"{}\"];",
                escape(text)
            );
        } else {
            let _ = writeln!(out, "  \"{id}\" [shape=box, label=\"{}\"];", node.card);
        }
    }
    for (lo, hi) in d.covers() {
        let _ = writeln!(out, "  \"{}\" -> \"{}\";", escape(lo.as_str()), escape(hi.as_str()));
    }
    let _ = writeln!(out, "  {{ rank=sink; \"{}\"; }}", escape(d.max_id().as_str()));
    out.push_str("}\n");
    out
}
