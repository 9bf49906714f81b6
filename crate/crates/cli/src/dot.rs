//! Graphviz rendering of a network with chosen paths overlaid.

use std::fmt::Write;

use meshroute::{Assignment, MeshNetwork};

/// Meters per typographic point in node positions.
const METERS_PER_POINT: f64 = 2.0;

pub struct Overlay<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub assignment: &'a Assignment,
}

pub fn render(net: &MeshNetwork, overlays: &[Overlay<'_>]) -> String {
    let mut out = String::new();
    out.push_str("graph mesh {\n");
    out.push_str("  graph [splines=true, outputorder=edgesfirst];\n");
    out.push_str("  node [shape=circle, fontsize=10, width=0.3, fixedsize=true];\n");
    out.push_str("  edge [color=gray];\n");
    for (i, p) in net.coords().iter().enumerate() {
        let shape = if net.is_user(i) {
            "square"
        } else if net.is_core(i) {
            "doublecircle"
        } else {
            "circle"
        };
        let _ = writeln!(
            out,
            "  {i} [shape={shape}, pos=\"{:.2},{:.2}!\"];",
            p[0] / METERS_PER_POINT,
            p[1] / METERS_PER_POINT
        );
    }
    for (i, j) in net.edges() {
        let _ = writeln!(out, "  {i} -- {j};");
    }
    for o in overlays {
        for path in o.assignment.chosen.values() {
            for l in path.links() {
                let _ = writeln!(
                    out,
                    "  {} -- {} [color={}, penwidth=2.5, tooltip=\"{}\"];",
                    l.tx, l.rx, o.color, o.label
                );
            }
        }
    }
    out.push_str("}\n");
    out
}
