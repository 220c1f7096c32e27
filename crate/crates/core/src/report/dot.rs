//! Graphviz export: one `digraph` per product. Required edges are solid,
//! optional edges dashed, edge labels show the message signature, and
//! components shared by every product are filled and double-bordered.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::MetricsReport;
use crate::model::ProductGraph;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Renders `products`; `common[i]` names the components of product `i` to
/// highlight. Missing entries highlight nothing.
pub fn render_products_dot(products: &[ProductGraph], common: &[BTreeSet<String>]) -> String {
    let empty = BTreeSet::new();
    let mut out = String::new();
    for (i, p) in products.iter().enumerate() {
        let marked = common.get(i).unwrap_or(&empty);
        let _ = writeln!(out, "digraph {} {{", quote(p.id()));
        let _ = writeln!(out, "  label={};", quote(p.id()));
        out.push_str("  node [shape=box];\n");
        for c in p.components() {
            if marked.contains(&c.name) {
                let _ = writeln!(
                    out,
                    "  {} [style=filled, fillcolor=lightgrey, peripheries=2];",
                    quote(&c.name)
                );
            } else {
                let _ = writeln!(out, "  {};", quote(&c.name));
            }
        }
        for e in p.edges() {
            let style = if e.is_required() { "solid" } else { "dashed" };
            let _ = writeln!(
                out,
                "  {} -> {} [label={}, style={style}];",
                quote(&e.source),
                quote(&e.target),
                quote(&e.signature.to_string())
            );
        }
        out.push_str("}\n");
    }
    out
}

pub(super) fn render_report_dot(report: &MetricsReport) -> String {
    let common: Vec<BTreeSet<String>> = report.products.iter().map(|p| p.common.clone()).collect();
    render_products_dot(&report.graphs, &common)
}
