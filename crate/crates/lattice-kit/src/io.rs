//! File formats: lattice candidates, tables, graphs, homogeneity
//! certificates, embeddings, and presentations as JSON, plus DOT export
//! with a minimal edge-list parser for round-trips.
//!
//! Every reader is total on untrusted bytes: malformed input comes back as
//! an error, never a panic. Writers emit stably ordered fields so repeated
//! runs are byte-identical.

use crate::algebra::HomogeneityCertificate;
use crate::coding::{Landmarks, Presentation};
use crate::embed::{Allocation, TableEmbedding};
use crate::lattice::{FiniteLattice, UslHom, ValidationReport, DEFAULT_SIZE_BOUND};
use crate::partition::EqRel;
use crate::pudlak::{ColoredGraph, NodeProvenance};
use crate::table::LatticeTable;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid document: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> IoError {
    IoError::Invalid(msg.into())
}

// ---------------------------------------------------------------------------
// lattices

/// Input form: element names plus a ≤-relation as index pairs (reflexive
/// pairs optional; the validator closes transitively). The canonical output
/// adds the materialized join/meet tables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeJson {
    pub elements: Vec<String>,
    pub leq: Vec<(u32, u32)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub join: Option<Vec<Vec<u32>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meet: Option<Vec<Vec<u32>>>,
}

pub fn lattice_to_json(l: &FiniteLattice) -> String {
    let n = l.n();
    let doc = LatticeJson {
        elements: l.names().to_vec(),
        leq: l.leq_pairs(),
        join: Some(
            (0..n as u32)
                .map(|a| (0..n as u32).map(|b| l.join(a, b)).collect())
                .collect(),
        ),
        meet: Some(
            (0..n as u32)
                .map(|a| (0..n as u32).map(|b| l.meet(a, b)).collect())
                .collect(),
        ),
    };
    serde_json::to_string_pretty(&doc).expect("plain data serializes")
}

/// Parse and validate a lattice candidate; the report carries either the
/// lattice or the list of failed axioms.
pub fn lattice_from_json(text: &str, size_bound: usize) -> Result<ValidationReport, IoError> {
    let doc: LatticeJson = serde_json::from_str(text)?;
    FiniteLattice::validate(&doc.elements, &doc.leq, size_bound)
        .map_err(|e| invalid(e.to_string()))
}

/// Resolve `catalog:NAME` or a path-free inline name against the built-in
/// catalog; other strings are treated as file contents by the caller.
pub fn catalog_lattice(spec: &str) -> Option<FiniteLattice> {
    let name = spec.strip_prefix("catalog:").unwrap_or(spec);
    crate::lattice::catalog::by_name(name)
}

// ---------------------------------------------------------------------------
// tables

/// Relations keyed by lattice element name; each relation is the sorted
/// list of sorted blocks of global node ids.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableJson {
    pub nodes: Vec<u32>,
    pub relations: BTreeMap<String, Vec<Vec<u32>>>,
}

pub fn table_to_json(t: &LatticeTable) -> String {
    let mut relations = BTreeMap::new();
    for alpha in t.lattice().elements() {
        let blocks: Vec<Vec<u32>> = t
            .rel(alpha)
            .blocks()
            .into_iter()
            .map(|b| b.into_iter().map(|p| t.nodes()[p as usize]).collect())
            .collect();
        relations.insert(t.lattice().name(alpha).to_string(), blocks);
    }
    let doc = TableJson { nodes: t.nodes().to_vec(), relations };
    serde_json::to_string_pretty(&doc).expect("plain data serializes")
}

pub fn table_from_json(text: &str, lattice: &FiniteLattice) -> Result<LatticeTable, IoError> {
    let doc: TableJson = serde_json::from_str(text)?;
    let mut nodes = doc.nodes.clone();
    nodes.sort_unstable();
    nodes.dedup();
    if nodes.len() != doc.nodes.len() {
        return Err(invalid("duplicate node ids"));
    }
    if nodes.is_empty() {
        return Err(invalid("empty carrier"));
    }
    let position: BTreeMap<u32, u32> =
        nodes.iter().enumerate().map(|(i, &g)| (g, i as u32)).collect();
    let mut rels: Vec<EqRel> = Vec::with_capacity(lattice.n());
    for alpha in lattice.elements() {
        let name = lattice.name(alpha);
        let blocks = doc
            .relations
            .get(name)
            .ok_or_else(|| invalid(format!("missing relation for element {name}")))?;
        let mut raw = vec![u32::MAX; nodes.len()];
        for (bi, block) in blocks.iter().enumerate() {
            for &g in block {
                let &p = position
                    .get(&g)
                    .ok_or_else(|| invalid(format!("block node {g} not in carrier")))?;
                if raw[p as usize] != u32::MAX {
                    return Err(invalid(format!("node {g} appears in two blocks of {name}")));
                }
                raw[p as usize] = bi as u32;
            }
        }
        if raw.iter().any(|&v| v == u32::MAX) {
            return Err(invalid(format!("blocks of {name} do not cover the carrier")));
        }
        rels.push(EqRel::from_raw_labels(&raw));
    }
    LatticeTable::new(lattice.clone(), nodes, rels).map_err(|e| invalid(e.to_string()))
}

// ---------------------------------------------------------------------------
// graphs

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphNodeJson {
    pub id: u32,
    pub stage: u32,
    /// "base0", "base1", or "cell:<id>:<pair>:<pos>"
    pub provenance: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphEdgeJson {
    pub a: u32,
    pub b: u32,
    pub color: String,
    pub stage: u32,
    pub round: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphJson {
    pub lattice: LatticeJson,
    pub kind: String,
    /// (nodes, edges) prefix sizes per stage
    pub stages: Vec<(usize, usize)>,
    pub nodes: Vec<GraphNodeJson>,
    pub edges: Vec<GraphEdgeJson>,
}

pub fn graph_to_json(g: &ColoredGraph, stage: usize) -> String {
    let view = g.stage(stage);
    let l = g.lattice();
    let nodes: Vec<GraphNodeJson> = (0..view.node_count())
        .map(|i| {
            let info = g.node(i as u32);
            let provenance = match info.prov {
                NodeProvenance::Base(k) => format!("base{k}"),
                NodeProvenance::Pentagon { cell, pair, pos } => format!(
                    "cell:{cell}:({},{}):{:?}",
                    l.name(pair.0),
                    l.name(pair.1),
                    pos
                ),
            };
            GraphNodeJson { id: i as u32, stage: info.first_stage, provenance }
        })
        .collect();
    let edges: Vec<GraphEdgeJson> = view
        .edges()
        .iter()
        .map(|e| GraphEdgeJson {
            a: e.a,
            b: e.b,
            color: l.name(e.color).to_string(),
            stage: e.first_stage,
            round: e.birth_round,
        })
        .collect();
    let doc = GraphJson {
        lattice: serde_json::from_str(&lattice_to_json(l)).expect("round trip"),
        kind: format!("{:?}", g.kind()).to_lowercase(),
        stages: (0..=stage)
            .map(|s| (g.stage(s).node_count(), g.stage(s).edge_count()))
            .collect(),
        nodes,
        edges,
    };
    serde_json::to_string_pretty(&doc).expect("plain data serializes")
}

/// Parse and structurally validate a graph document (ids dense, endpoints
/// present, colors named by the embedded lattice, no loops, no top color).
pub fn graph_from_json(text: &str) -> Result<GraphJson, IoError> {
    let doc: GraphJson = serde_json::from_str(text)?;
    let report = FiniteLattice::validate(&doc.lattice.elements, &doc.lattice.leq, DEFAULT_SIZE_BOUND)
        .map_err(|e| invalid(e.to_string()))?;
    let lattice = report
        .lattice
        .ok_or_else(|| invalid("embedded lattice fails validation"))?;
    let n = doc.nodes.len();
    for (i, node) in doc.nodes.iter().enumerate() {
        if node.id as usize != i {
            return Err(invalid("node ids must be dense and sorted"));
        }
    }
    for e in &doc.edges {
        if e.a as usize >= n || e.b as usize >= n {
            return Err(invalid("edge endpoint outside node set"));
        }
        if e.a == e.b {
            return Err(invalid("loops are not allowed"));
        }
        let color = lattice
            .element_by_name(&e.color)
            .ok_or_else(|| invalid(format!("unknown color {}", e.color)))?;
        if color == lattice.top() {
            return Err(invalid("edges may not carry the top color"));
        }
    }
    Ok(doc)
}

// ---------------------------------------------------------------------------
// DOT

pub fn graph_to_dot(g: &ColoredGraph, stage: usize) -> String {
    let view = g.stage(stage);
    let l = g.lattice();
    let mut out = String::new();
    out.push_str(&format!("graph stage_{stage} {{\n"));
    for e in view.edges() {
        out.push_str(&format!(
            "  n{} -- n{} [label=\"{}\"];\n",
            e.a,
            e.b,
            l.name(e.color)
        ));
    }
    out.push_str("}\n");
    out
}

/// DOT rendering of a parsed graph document, matching `graph_to_dot` so
/// JSON and in-memory exports agree byte for byte.
pub fn graph_json_to_dot(doc: &GraphJson) -> String {
    let stage = doc.stages.len().saturating_sub(1);
    let mut out = String::new();
    out.push_str(&format!("graph stage_{stage} {{\n"));
    for e in &doc.edges {
        out.push_str(&format!("  n{} -- n{} [label=\"{}\"];\n", e.a, e.b, e.color));
    }
    out.push_str("}\n");
    out
}

/// Minimal DOT reader for the exporter's dialect: returns the edge list
/// (a, b, label). Ignores everything that is not an `x -- y [...]` line.
pub fn dot_parse(text: &str) -> Result<Vec<(String, String, String)>, IoError> {
    let mut edges = Vec::new();
    for line in text.lines() {
        let line = line.trim().trim_end_matches(';');
        let Some((lhs, rest)) = line.split_once("--") else {
            continue;
        };
        let a = lhs.trim();
        if a.is_empty() {
            return Err(invalid("edge with empty left endpoint"));
        }
        let (b, label) = match rest.split_once('[') {
            Some((b, attrs)) => {
                let attrs = attrs.trim_end_matches(']');
                let label = attrs
                    .split(',')
                    .filter_map(|kv| kv.split_once('='))
                    .find(|(k, _)| k.trim() == "label")
                    .map(|(_, v)| v.trim().trim_matches('"').to_string())
                    .unwrap_or_default();
                (b.trim(), label)
            }
            None => (rest.trim(), String::new()),
        };
        if b.is_empty() {
            return Err(invalid("edge with empty right endpoint"));
        }
        edges.push((a.to_string(), b.to_string(), label));
    }
    Ok(edges)
}

// ---------------------------------------------------------------------------
// certificates

pub fn certificate_to_json(cert: &HomogeneityCertificate) -> String {
    serde_json::to_string_pretty(cert).expect("plain data serializes")
}

pub fn certificate_from_json(text: &str) -> Result<HomogeneityCertificate, IoError> {
    let cert: HomogeneityCertificate = serde_json::from_str(text)?;
    Ok(cert)
}

// ---------------------------------------------------------------------------
// embeddings

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingJson {
    pub source_lattice: LatticeJson,
    pub target_lattice: LatticeJson,
    /// φ: target_lattice (L0) -> source graph's lattice (L1)
    pub phi: Vec<u32>,
    pub source_stage: usize,
    pub target_stage: usize,
    pub node_map: Vec<u32>,
    pub edge_map: Vec<u32>,
    pub allocations: Vec<Allocation>,
}

pub fn embedding_to_json(emb: &TableEmbedding) -> String {
    let doc = EmbeddingJson {
        source_lattice: serde_json::from_str(&lattice_to_json(emb.phi.target())).expect("round trip"),
        target_lattice: serde_json::from_str(&lattice_to_json(emb.phi.source())).expect("round trip"),
        phi: emb.phi.map().to_vec(),
        source_stage: emb.source_stage,
        target_stage: emb.target_stage,
        node_map: emb.node_map.clone(),
        edge_map: emb.edge_map.clone(),
        allocations: emb.allocations.clone(),
    };
    serde_json::to_string_pretty(&doc).expect("plain data serializes")
}

pub fn embedding_from_json(text: &str) -> Result<TableEmbedding, IoError> {
    let doc: EmbeddingJson = serde_json::from_str(text)?;
    let l1 = FiniteLattice::validate(&doc.source_lattice.elements, &doc.source_lattice.leq, DEFAULT_SIZE_BOUND)
        .map_err(|e| invalid(e.to_string()))?
        .lattice
        .ok_or_else(|| invalid("source lattice fails validation"))?;
    let l0 = FiniteLattice::validate(&doc.target_lattice.elements, &doc.target_lattice.leq, DEFAULT_SIZE_BOUND)
        .map_err(|e| invalid(e.to_string()))?
        .lattice
        .ok_or_else(|| invalid("target lattice fails validation"))?;
    let phi = UslHom::new(&l0, &l1, doc.phi).map_err(|v| invalid(v.to_string()))?;
    Ok(TableEmbedding {
        phi,
        source_stage: doc.source_stage,
        target_stage: doc.target_stage,
        node_map: doc.node_map,
        edge_map: doc.edge_map,
        allocations: doc.allocations,
    })
}

// ---------------------------------------------------------------------------
// presentations

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PresentationJson {
    pub n: usize,
    pub joins: Vec<Vec<u32>>,
    #[serde(rename = "leqFacts")]
    pub leq_facts: Vec<(u32, u32)>,
    pub landmarks: Landmarks,
    pub seed: u64,
}

/// Serialize a presentation; the hidden ground truth never leaves the
/// process.
pub fn presentation_to_json(p: &Presentation) -> String {
    let doc = PresentationJson {
        n: p.n,
        joins: p.joins.clone(),
        leq_facts: p.leq_facts.clone(),
        landmarks: p.landmarks,
        seed: p.seed,
    };
    serde_json::to_string_pretty(&doc).expect("plain data serializes")
}

pub fn presentation_from_json(text: &str) -> Result<Presentation, IoError> {
    let doc: PresentationJson = serde_json::from_str(text)?;
    let n = doc.n;
    if n == 0 || n > 4096 {
        return Err(invalid("element count out of range"));
    }
    if doc.joins.len() != n || doc.joins.iter().any(|row| row.len() != n) {
        return Err(invalid("join table must be n by n"));
    }
    if doc
        .joins
        .iter()
        .any(|row| row.iter().any(|&v| v as usize >= n))
    {
        return Err(invalid("join table entry outside elements"));
    }
    if doc
        .leq_facts
        .iter()
        .any(|&(a, b)| a as usize >= n || b as usize >= n)
    {
        return Err(invalid("leq fact outside elements"));
    }
    let lm = doc.landmarks;
    for id in [lm.p, lm.q, lm.e0, lm.e1, lm.f0, lm.f1, lm.g0, lm.s] {
        if id as usize >= n {
            return Err(invalid("landmark outside elements"));
        }
    }
    Ok(Presentation::new(n, doc.joins, doc.leq_facts, doc.landmarks, doc.seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::{build_coded_lattice, scramble};
    use crate::lattice::catalog;
    use crate::pudlak::build_homogenized;

    #[test]
    fn lattice_json_round_trip() {
        let l = catalog::m3();
        let text = lattice_to_json(&l);
        let report = lattice_from_json(&text, 64).unwrap();
        assert!(report.is_valid());
        assert_eq!(report.lattice.unwrap(), l);
    }

    #[test]
    fn lattice_json_rejects_non_lattice() {
        let text = r#"{"elements": ["a", "b", "c", "d"], "leq": [[0,2],[0,3],[1,2],[1,3]]}"#;
        let report = lattice_from_json(text, 64).unwrap();
        assert!(!report.is_valid());
    }

    #[test]
    fn table_json_round_trip() {
        let l = catalog::three_chain();
        let g = build_homogenized(&l, 1, 10_000).unwrap();
        let t = crate::pudlak::table_of(&g.stage(1));
        let text = table_to_json(&t);
        let back = table_from_json(&text, &l).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn dot_round_trip_edge_multiset() {
        let l = catalog::three_chain();
        let g = build_homogenized(&l, 1, 10_000).unwrap();
        let dot = graph_to_dot(&g, 1);
        let mut parsed = dot_parse(&dot).unwrap();
        parsed.sort();
        let mut expected: Vec<(String, String, String)> = g
            .stage(1)
            .edges()
            .iter()
            .map(|e| (format!("n{}", e.a), format!("n{}", e.b), l.name(e.color).to_string()))
            .collect();
        expected.sort();
        assert_eq!(parsed, expected);
    }

    #[test]
    fn graph_json_validates() {
        let l = catalog::two();
        let g = build_homogenized(&l, 1, 10_000).unwrap();
        let text = graph_to_json(&g, 1);
        let doc = graph_from_json(&text).unwrap();
        assert_eq!(doc.nodes.len(), 5);
        assert_eq!(doc.edges.len(), 5);
    }

    #[test]
    fn presentation_json_round_trip_without_truth() {
        let coded = build_coded_lattice(&[0usize].into_iter().collect(), 2).unwrap();
        let pres = scramble(&coded, 7);
        let text = presentation_to_json(&pres);
        assert!(!text.contains("hidden"));
        let back = presentation_from_json(&text).unwrap();
        assert!(back.hidden().is_none());
        assert_eq!(back.joins, pres.joins);
        assert_eq!(back.leq_facts, pres.leq_facts);
    }

    #[test]
    fn parsers_reject_garbage_without_panicking() {
        for text in ["", "{", "[1,2,3]", "{\"n\": 900000}"] {
            assert!(lattice_from_json(text, 64).is_err());
            assert!(presentation_from_json(text).is_err());
            assert!(graph_from_json(text).is_err());
            assert!(certificate_from_json(text).is_err());
            assert!(embedding_from_json(text).is_err());
        }
    }
}
