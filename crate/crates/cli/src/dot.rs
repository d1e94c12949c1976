//! Graphviz export. Each hyperedge becomes a small square node wired to its vertices.

use std::fmt::Write;

use crate::document::HypergraphDocument;

pub fn to_dot(doc: &HypergraphDocument) -> String {
    let mut out = String::from("graph hypergraph {\n  node [shape=circle];\n");
    for v in 1..=doc.n {
        writeln!(out, "  v{v} [label=\"{v}\"];").unwrap();
    }
    for (j, e) in doc.edges.iter().enumerate() {
        let label = match (&doc.multiplicities, &doc.weights) {
            (Some(ms), _) if ms[j] != 1 => ms[j].to_string(),
            (_, Some(ws)) => ws[j].to_string(),
            _ => String::new(),
        };
        writeln!(out, "  e{j} [shape=square, width=0.15, height=0.15, fixedsize=true, label=\"{label}\"];").unwrap();
        for v in e {
            writeln!(out, "  e{j} -- v{v};").unwrap();
        }
    }
    out.push_str("}\n");
    out
}
