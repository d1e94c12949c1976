//! JSON hypergraph documents.

use std::collections::BTreeSet;

use hyperstate::cvlab::{Weight, WeightedHypergraph};
use hyperstate::hgraph::{mask_of, vertices_of, MAX_VERTICES};
use hyperstate::quditlab::MultiHypergraph;
use hyperstate::Hypergraph;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Qubit,
    Qudit,
    Cv,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Qubit => "qubit",
            Kind::Qudit => "qudit",
            Kind::Cv => "cv",
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawWeight {
    Num(f64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    kind: Kind,
    n: usize,
    d: Option<u32>,
    edges: Vec<Vec<usize>>,
    multiplicities: Option<Vec<u32>>,
    weights: Option<Vec<RawWeight>>,
}

/// A validated document with edges in canonical order (vertices ascending
/// within an edge, edges by bitmask).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypergraphDocument {
    pub kind: Kind,
    pub n: usize,
    pub d: Option<u32>,
    pub edges: Vec<Vec<usize>>,
    pub multiplicities: Option<Vec<u32>>,
    pub weights: Option<Vec<Weight>>,
}

fn field(name: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Domain(format!("field `{name}`: {msg}"))
}

fn parse_weight(i: usize, w: RawWeight) -> Result<Weight, CliError> {
    let name = format!("weights[{i}]");
    match w {
        RawWeight::Num(x) => hyperstate::cvlab::weight_from_f64(x).map_err(|e| field(&name, e)),
        RawWeight::Text(s) => {
            if let Ok(q) = s.trim().parse::<Weight>() {
                return Ok(q);
            }
            let x: f64 = s.trim().parse().map_err(|_| field(&name, format!("`{s}` is not a number or fraction")))?;
            hyperstate::cvlab::weight_from_f64(x).map_err(|e| field(&name, e))
        }
    }
}

pub fn parse_document(text: &str) -> Result<HypergraphDocument, CliError> {
    let raw: RawDocument = serde_json::from_str(text)
        .map_err(|e| CliError::Domain(format!("schema error at line {} column {}: {e}", e.line(), e.column())))?;
    if raw.n == 0 || raw.n > MAX_VERTICES {
        return Err(field("n", format!("{} outside 1..={MAX_VERTICES}", raw.n)));
    }
    match raw.kind {
        Kind::Qudit => match raw.d {
            Some(d) if d >= 2 => {}
            Some(d) => return Err(field("d", format!("dimension {d} must be at least 2"))),
            None => return Err(field("d", "required for qudit documents")),
        },
        _ if raw.d.is_some() => return Err(field("d", "only qudit documents carry a dimension")),
        _ => {}
    }
    let m = raw.edges.len();
    let mut masks = Vec::with_capacity(m);
    for (j, e) in raw.edges.iter().enumerate() {
        let name = format!("edges[{j}]");
        if e.is_empty() {
            return Err(field(&name, "empty edge"));
        }
        let mut seen = BTreeSet::new();
        for &v in e {
            if v == 0 || v > raw.n {
                return Err(field(&name, format!("vertex {v} outside 1..={}", raw.n)));
            }
            if !seen.insert(v) {
                return Err(field(&name, format!("vertex {v} repeated")));
            }
        }
        masks.push(mask_of(e));
    }
    if let Some(ms) = &raw.multiplicities {
        if ms.len() != m {
            return Err(field("multiplicities", format!("{} entries for {m} edges", ms.len())));
        }
    }
    if let Some(ws) = &raw.weights {
        if ws.len() != m {
            return Err(field("weights", format!("{} entries for {m} edges", ws.len())));
        }
    }
    let multiplicities = match raw.kind {
        Kind::Qubit => {
            if raw.weights.is_some() {
                return Err(field("weights", "qubit documents carry no weights"));
            }
            if let Some(j) = raw.multiplicities.as_ref().and_then(|ms| ms.iter().position(|&x| x != 1)) {
                return Err(field(&format!("multiplicities[{j}]"), "qubit edges have multiplicity 1"));
            }
            None
        }
        Kind::Qudit => {
            if raw.weights.is_some() {
                return Err(field("weights", "qudit documents use multiplicities"));
            }
            let d = raw.d.unwrap_or(2);
            let ms = raw.multiplicities.ok_or_else(|| field("multiplicities", "required for qudit documents"))?;
            if let Some(j) = ms.iter().position(|&x| x == 0 || x >= d) {
                return Err(field(&format!("multiplicities[{j}]"), format!("must lie in 1..={}", d - 1)));
            }
            Some(ms)
        }
        Kind::Cv => {
            if raw.multiplicities.is_some() {
                return Err(field("multiplicities", "cv documents use weights"));
            }
            None
        }
    };
    let weights = match raw.weights {
        Some(ws) => {
            let ws = ws.into_iter().enumerate().map(|(i, w)| parse_weight(i, w)).collect::<Result<Vec<_>, _>>()?;
            if let Some(j) = ws.iter().position(|w| *w == Weight::from_integer(0.into())) {
                return Err(field(&format!("weights[{j}]"), "zero weight"));
            }
            Some(ws)
        }
        None if raw.kind == Kind::Cv => return Err(field("weights", "required for cv documents")),
        None => None,
    };

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&j| masks[j]);
    for w in order.windows(2) {
        if masks[w[0]] == masks[w[1]] {
            return Err(field(&format!("edges[{}]", w[1].max(w[0])), format!("duplicate of edges[{}]", w[0].min(w[1]))));
        }
    }
    Ok(HypergraphDocument {
        kind: raw.kind,
        n: raw.n,
        d: raw.d,
        edges: order.iter().map(|&j| vertices_of(masks[j])).collect(),
        multiplicities: multiplicities.map(|ms| order.iter().map(|&j| ms[j]).collect()),
        weights: weights.map(|ws| order.iter().map(|&j| ws[j].clone()).collect()),
    })
}

impl HypergraphDocument {
    pub fn to_value(&self) -> Value {
        let mut v = json!({ "kind": self.kind.name(), "n": self.n, "edges": self.edges });
        let o = v.as_object_mut().expect("object");
        if let Some(d) = self.d {
            o.insert("d".into(), json!(d));
        }
        if let Some(ms) = &self.multiplicities {
            o.insert("multiplicities".into(), json!(ms));
        }
        if let Some(ws) = &self.weights {
            o.insert("weights".into(), json!(ws.iter().map(|w| w.to_string()).collect::<Vec<_>>()));
        }
        v
    }

    /// Compact JSON with sorted keys.
    pub fn to_canonical(&self) -> String {
        self.to_value().to_string()
    }

    fn expect(&self, kind: Kind) -> Result<(), CliError> {
        if self.kind != kind {
            return Err(CliError::Domain(format!("expected a {} document, got {}", kind.name(), self.kind.name())));
        }
        Ok(())
    }

    pub fn hypergraph(&self) -> Result<Hypergraph, CliError> {
        self.expect(Kind::Qubit)?;
        Ok(Hypergraph::from_edges(self.n, &self.edges)?)
    }

    pub fn multi(&self) -> Result<MultiHypergraph, CliError> {
        self.expect(Kind::Qudit)?;
        let ms = self.multiplicities.as_deref().unwrap_or_default();
        Ok(MultiHypergraph::from_edges(self.n, self.d.unwrap_or(2), self.edges.iter().zip(ms.iter().copied()))?)
    }

    pub fn weighted(&self) -> Result<WeightedHypergraph, CliError> {
        self.expect(Kind::Cv)?;
        let ws = self.weights.clone().unwrap_or_default();
        Ok(WeightedHypergraph::from_edges(self.n, self.edges.iter().zip(ws))?)
    }

    pub fn from_hypergraph(h: &Hypergraph) -> Self {
        HypergraphDocument {
            kind: Kind::Qubit,
            n: h.n(),
            d: None,
            edges: h.edges().map(vertices_of).collect(),
            multiplicities: None,
            weights: None,
        }
    }

    pub fn from_weighted(h: &WeightedHypergraph) -> Self {
        HypergraphDocument {
            kind: Kind::Cv,
            n: h.n(),
            d: None,
            edges: h.edges().keys().map(|&e| vertices_of(e)).collect(),
            multiplicities: None,
            weights: Some(h.edges().values().cloned().collect()),
        }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_round_trip() {
        let d = parse_document(r#"{"kind":"qubit","n":3,"edges":[[3,1,2]]}"#).unwrap();
        assert_eq!(d.hypergraph().unwrap(), hyperstate::hgraph::make_complete(3, &[3]).unwrap());
        let c = d.to_canonical();
        assert_eq!(c, r#"{"edges":[[1,2,3]],"kind":"qubit","n":3}"#);
        assert_eq!(parse_document(&c).unwrap().to_canonical(), c);
    }

    #[test]
    fn canonical_order() {
        let d = parse_document(r#"{"kind":"qudit","n":3,"d":3,"edges":[[2,3],[1,2]],"multiplicities":[2,1]}"#).unwrap();
        assert_eq!(d.edges, vec![vec![1, 2], vec![2, 3]]);
        assert_eq!(d.multiplicities, Some(vec![1, 2]));
        assert_eq!(d.multi().unwrap().edges().len(), 2);
    }

    #[test]
    fn cv_weights() {
        let d = parse_document(r#"{"kind":"cv","n":2,"edges":[[1,2],[2]],"weights":["1/3",0.5]}"#).unwrap();
        assert_eq!(d.edges, vec![vec![2], vec![1, 2]]);
        let c = d.to_canonical();
        assert!(c.contains(r#""weights":["1/2","1/3"]"#), "{c}");
        assert_eq!(parse_document(&c).unwrap(), d);
    }

    #[test]
    fn diagnostics() {
        let e = |t: &str| parse_document(t).unwrap_err().to_string();
        assert!(e(r#"{"kind":"qubit","n":3,"edges":[[1,2],[2,1]]}"#).contains("duplicate"));
        assert!(e(r#"{"kind":"qubit","n":3,"edges":[[1,4]]}"#).contains("edges[0]"));
        assert!(e("{\"kind\":\"qubit\",\n\"n\":3,\n\"edge\":[]}").contains("line 3"));
        assert!(e(r#"{"kind":"qudit","n":2,"edges":[[1,2]],"multiplicities":[1]}"#).contains("`d`"));
        assert!(e(r#"{"kind":"qudit","n":2,"d":3,"edges":[[1,2]],"multiplicities":[3]}"#).contains("multiplicities[0]"));
        assert!(e(r#"{"kind":"cv","n":2,"edges":[[1,2]]}"#).contains("weights"));
        assert!(e(r#"{"kind":"cv","n":2,"edges":[[1,2]],"weights":["x"]}"#).contains("weights[0]"));
    }
}
