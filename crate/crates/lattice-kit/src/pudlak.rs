//! Staged colored graphs: α-cells, the Pudlak graph, its homogenized
//! variant with multiple cell copies, the connectivity map e, stage tables,
//! and the congruence-representation desk check.
//!
//! Node and edge ids are sequential integers assigned in construction
//! order, so every stage's node set is a prefix of the next stage's and
//! rebuilding with the same lattice and budgets is byte-identical.
//!
//! A cell instance is keyed by (parent edge, round, copy). Copy k of a cell
//! under copy count i is identified with copy k under any larger count, so
//! the stage-j homogenized graph (j rounds of j copies) genuinely contains
//! the stage-(j-1) graph as a subgraph.

use crate::lattice::{Elem, FiniteLattice};
use crate::partition::{DisjointSet, EqRel};
use crate::table::LatticeTable;
use serde::Serialize;
use std::collections::HashMap;
use thiserror::Error;

pub type NodeId = u32;
pub type EdgeId = u32;
pub type CellId = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("lattice must be nontrivial (bottom differs from top)")]
    TrivialLattice,
    #[error("node budget of {budget} exceeded while building stage {stage}")]
    NodeBudget { budget: usize, stage: usize },
    #[error("alpha-cells are defined for colors below the top element")]
    TopColor,
}

/// Position of a pentagon interior node along its chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChainPos {
    U1,
    U2,
    U3,
}

/// Where a node came from; reconstructs the build deterministically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeProvenance {
    /// One of the two endpoints of the original edge.
    Base(u8),
    Pentagon { cell: CellId, pair: (Elem, Elem), pos: ChainPos },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeInfo {
    pub first_stage: u32,
    pub prov: NodeProvenance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeOrigin {
    Base,
    /// chain edge `index` (0..4) of a pentagon of a cell
    Chain { cell: CellId, pair: (Elem, Elem), index: u8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub a: NodeId,
    pub b: NodeId,
    pub color: Elem,
    /// Round at which the edge appeared in the round-based build semantics.
    pub birth_round: u32,
    /// Stage whose pass created the edge (differs from `birth_round` in
    /// homogenized builds, where a later stage backfills earlier rounds).
    pub first_stage: u32,
    pub origin: EdgeOrigin,
}

/// One pentagon: the interior chain of a qualifying pair, sharing the base
/// edge with the other pentagons of its cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pentagon {
    pub pair: (Elem, Elem),
    pub nodes: [NodeId; 3],
    /// a—u1, u1—u2, u2—u3, u3—b in parent-edge orientation
    pub edges: [EdgeId; 4],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellInstance {
    pub parent_edge: EdgeId,
    pub round: u32,
    pub copy: u32,
    pub first_stage: u32,
    pub pentagons: Vec<Pentagon>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BuildKind {
    Pudlak,
    Homogenized,
}

/// Staged colored graph. Stage j's nodes, edges, and cells are prefixes of
/// the storage vectors; `stage_nodes[j]` etc. record the prefix lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct ColoredGraph {
    lattice: FiniteLattice,
    kind: BuildKind,
    nodes: Vec<NodeInfo>,
    edges: Vec<Edge>,
    cells: Vec<CellInstance>,
    cell_lookup: HashMap<(EdgeId, u32, u32), CellId>,
    stage_nodes: Vec<usize>,
    stage_edges: Vec<usize>,
    stage_cells: Vec<usize>,
    node_budget: usize,
}

/// Template of an α-cell: one pentagon per ordered pair (α1, α2) of
/// non-top elements whose meet lies below α.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellTemplate {
    pub alpha: Elem,
    pub pairs: Vec<(Elem, Elem)>,
}

impl CellTemplate {
    pub fn pentagon_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn new_nodes(&self) -> usize {
        3 * self.pairs.len()
    }

    pub fn new_edges(&self) -> usize {
        4 * self.pairs.len()
    }
}

/// Ordered pairs from (L - {1})^2 whose meet lies below `alpha`. Pairs with
/// a top component are excluded: edges never carry the top color, and any
/// inequality with a top component is already witnessed by shorter paths.
pub fn alpha_cell(lattice: &FiniteLattice, alpha: Elem) -> Result<CellTemplate, BuildError> {
    if alpha == lattice.top() {
        return Err(BuildError::TopColor);
    }
    let mut pairs = Vec::new();
    for a in lattice.elements() {
        if a == lattice.top() {
            continue;
        }
        for b in lattice.elements() {
            if b == lattice.top() {
                continue;
            }
            if lattice.leq(lattice.meet(a, b), alpha) {
                pairs.push((a, b));
            }
        }
    }
    Ok(CellTemplate { alpha, pairs })
}

impl ColoredGraph {
    fn new(lattice: &FiniteLattice, kind: BuildKind, node_budget: usize) -> Result<Self, BuildError> {
        if !lattice.is_nontrivial() {
            return Err(BuildError::TrivialLattice);
        }
        let nodes = vec![
            NodeInfo { first_stage: 0, prov: NodeProvenance::Base(0) },
            NodeInfo { first_stage: 0, prov: NodeProvenance::Base(1) },
        ];
        let edges = vec![Edge {
            a: 0,
            b: 1,
            color: lattice.bottom(),
            birth_round: 0,
            first_stage: 0,
            origin: EdgeOrigin::Base,
        }];
        Ok(ColoredGraph {
            lattice: lattice.clone(),
            kind,
            nodes,
            edges,
            cells: Vec::new(),
            cell_lookup: HashMap::new(),
            stage_nodes: vec![2],
            stage_edges: vec![1],
            stage_cells: vec![0],
            node_budget,
        })
    }

    pub fn lattice(&self) -> &FiniteLattice {
        &self.lattice
    }

    pub fn kind(&self) -> BuildKind {
        self.kind
    }

    pub fn max_stage(&self) -> usize {
        self.stage_nodes.len() - 1
    }

    pub fn node(&self, id: NodeId) -> &NodeInfo {
        &self.nodes[id as usize]
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id as usize]
    }

    pub fn cell(&self, id: CellId) -> &CellInstance {
        &self.cells[id as usize]
    }

    pub fn cells(&self) -> &[CellInstance] {
        &self.cells
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn nodes(&self) -> &[NodeInfo] {
        &self.nodes
    }

    pub fn lookup_cell(&self, parent_edge: EdgeId, round: u32, copy: u32) -> Option<CellId> {
        self.cell_lookup.get(&(parent_edge, round, copy)).copied()
    }

    pub fn stage(&self, stage: usize) -> StageView<'_> {
        assert!(stage <= self.max_stage(), "stage {stage} not built");
        StageView { graph: self, stage }
    }

    /// Grow the graph one stage. Pudlak builds attach one fresh cell to
    /// every edge; homogenized builds run rounds 1..=j with j copies,
    /// creating exactly the instances absent from the previous stage.
    pub fn extend_one_stage(&mut self) -> Result<(), BuildError> {
        let j = self.max_stage() + 1;
        let (rounds, copies): (Vec<u32>, u32) = match self.kind {
            BuildKind::Pudlak => (vec![j as u32], 1),
            BuildKind::Homogenized => ((1..=j as u32).collect(), j as u32),
        };
        for r in rounds {
            let snapshot = self.edges.len();
            for eid in 0..snapshot as u32 {
                if self.edges[eid as usize].birth_round >= r {
                    continue;
                }
                for k in 1..=copies {
                    if self.cell_lookup.contains_key(&(eid, r, k)) {
                        continue;
                    }
                    self.attach_cell(eid, r, k, j)?;
                }
            }
        }
        self.stage_nodes.push(self.nodes.len());
        self.stage_edges.push(self.edges.len());
        self.stage_cells.push(self.cells.len());
        Ok(())
    }

    fn attach_cell(&mut self, parent: EdgeId, round: u32, copy: u32, stage: usize) -> Result<(), BuildError> {
        let color = self.edges[parent as usize].color;
        let (base_a, base_b) = (self.edges[parent as usize].a, self.edges[parent as usize].b);
        let template = alpha_cell(&self.lattice, color).expect("edges never carry the top color");
        let cell_id = self.cells.len() as CellId;
        let mut pentagons = Vec::with_capacity(template.pairs.len());
        for &(c1, c2) in &template.pairs {
            if self.nodes.len() + 3 > self.node_budget {
                return Err(BuildError::NodeBudget { budget: self.node_budget, stage });
            }
            let u1 = self.push_node(stage, cell_id, (c1, c2), ChainPos::U1);
            let u2 = self.push_node(stage, cell_id, (c1, c2), ChainPos::U2);
            let u3 = self.push_node(stage, cell_id, (c1, c2), ChainPos::U3);
            let chain = [(base_a, u1, c1), (u1, u2, c2), (u2, u3, c1), (u3, base_b, c2)];
            let mut edge_ids = [0u32; 4];
            for (i, &(a, b, c)) in chain.iter().enumerate() {
                debug_assert_ne!(c, self.lattice.top(), "no edge may carry the top color");
                edge_ids[i] = self.edges.len() as EdgeId;
                self.edges.push(Edge {
                    a,
                    b,
                    color: c,
                    birth_round: round,
                    first_stage: stage as u32,
                    origin: EdgeOrigin::Chain { cell: cell_id, pair: (c1, c2), index: i as u8 },
                });
            }
            pentagons.push(Pentagon { pair: (c1, c2), nodes: [u1, u2, u3], edges: edge_ids });
        }
        self.cells.push(CellInstance {
            parent_edge: parent,
            round,
            copy,
            first_stage: stage as u32,
            pentagons,
        });
        self.cell_lookup.insert((parent, round, copy), cell_id);
        Ok(())
    }

    fn push_node(&mut self, stage: usize, cell: CellId, pair: (Elem, Elem), pos: ChainPos) -> NodeId {
        let id = self.nodes.len() as NodeId;
        self.nodes.push(NodeInfo {
            first_stage: stage as u32,
            prov: NodeProvenance::Pentagon { cell, pair, pos },
        });
        id
    }

    /// Push every color through the adjoint; the node and edge sets are
    /// untouched (the adjoint never sends a non-top color to top).
    pub(crate) fn relabel(&mut self, new_lattice: &FiniteLattice, adj: &crate::lattice::GaloisAdjoint) {
        for e in &mut self.edges {
            e.color = adj.apply(e.color);
            if let EdgeOrigin::Chain { pair, .. } = &mut e.origin {
                *pair = (adj.apply(pair.0), adj.apply(pair.1));
            }
        }
        for n in &mut self.nodes {
            if let NodeProvenance::Pentagon { pair, .. } = &mut n.prov {
                *pair = (adj.apply(pair.0), adj.apply(pair.1));
            }
        }
        for c in &mut self.cells {
            for p in &mut c.pentagons {
                p.pair = (adj.apply(p.pair.0), adj.apply(p.pair.1));
            }
        }
        self.lattice = new_lattice.clone();
    }
}

/// Read-only view of one stage: nodes and edges are storage prefixes.
#[derive(Debug, Clone, Copy)]
pub struct StageView<'g> {
    graph: &'g ColoredGraph,
    stage: usize,
}

impl<'g> StageView<'g> {
    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn graph(&self) -> &'g ColoredGraph {
        self.graph
    }

    pub fn node_count(&self) -> usize {
        self.graph.stage_nodes[self.stage]
    }

    pub fn edge_count(&self) -> usize {
        self.graph.stage_edges[self.stage]
    }

    pub fn edges(&self) -> &'g [Edge] {
        &self.graph.edges[..self.edge_count()]
    }

    pub fn lattice(&self) -> &'g FiniteLattice {
        self.graph.lattice()
    }
}

/// The map e: connectivity over edges whose color lies at or above α.
pub fn color_connectivity(view: &StageView, alpha: Elem) -> EqRel {
    let mut ds = DisjointSet::new(view.node_count());
    let lattice = view.lattice();
    for e in view.edges() {
        if lattice.leq(alpha, e.color) {
            ds.union(e.a, e.b);
        }
    }
    ds.into_eqrel()
}

/// All connectivity relations of a stage, one per lattice element. The
/// per-color computations are independent and fan out over the immutable
/// view; collection order keeps the result deterministic.
pub fn all_connectivity(view: &StageView) -> Vec<EqRel> {
    use rayon::prelude::*;
    let elems: Vec<Elem> = view.lattice().elements().collect();
    elems.par_iter().map(|&a| color_connectivity(view, a)).collect()
}

/// Stage table: relations are computed with paths inside this stage only.
pub fn table_of(view: &StageView) -> LatticeTable {
    let lattice = view.lattice().clone();
    let rels = all_connectivity(view);
    let nodes: Vec<u32> = (0..view.node_count() as u32).collect();
    LatticeTable::new(lattice, nodes, rels)
        .expect("stage tables are order-reversing with full bottom and diagonal top")
}

pub fn build_pudlak(lattice: &FiniteLattice, stages: usize, node_budget: usize) -> Result<ColoredGraph, BuildError> {
    build(lattice, BuildKind::Pudlak, stages, node_budget)
}

pub fn build_homogenized(lattice: &FiniteLattice, stages: usize, node_budget: usize) -> Result<ColoredGraph, BuildError> {
    build(lattice, BuildKind::Homogenized, stages, node_budget)
}

pub fn build(
    lattice: &FiniteLattice,
    kind: BuildKind,
    stages: usize,
    node_budget: usize,
) -> Result<ColoredGraph, BuildError> {
    let mut g = ColoredGraph::new(lattice, kind, node_budget)?;
    for _ in 0..stages {
        g.extend_one_stage()?;
    }
    Ok(g)
}

/// Per-stage size read-off for budget planning.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageStats {
    pub stage: usize,
    pub nodes: usize,
    pub edges: usize,
    /// (element name, edge count) per color present at the stage
    pub color_histogram: Vec<(String, usize)>,
}

pub fn growth_stats(graph: &ColoredGraph) -> Vec<StageStats> {
    (0..=graph.max_stage())
        .map(|s| {
            let view = graph.stage(s);
            let mut hist = vec![0usize; graph.lattice().n()];
            for e in view.edges() {
                hist[e.color as usize] += 1;
            }
            StageStats {
                stage: s,
                nodes: view.node_count(),
                edges: view.edge_count(),
                color_histogram: hist
                    .iter()
                    .enumerate()
                    .filter(|&(_, &c)| c > 0)
                    .map(|(i, &c)| (graph.lattice().name(i as u32).to_string(), c))
                    .collect(),
            }
        })
        .collect()
}

/// Conditions measured per stage by the representation desk check.
///
/// The first three are evaluated on the full stage carrier. The meet
/// condition compares the partition join of e(α), e(β) against e(α∧β) on
/// the previous stage's carrier: witnesses for fresh last-round material
/// only appear one stage later (pentagons are attached to existing edges),
/// so same-stage equality on the full carrier is a limit property. That
/// strict variant is still measured and reported as a diagnostic.
#[derive(Debug, Clone, Serialize)]
pub struct StageConditions {
    pub stage: usize,
    pub nodes: usize,
    pub edges: usize,
    /// (a) α ↦ e(α) is injective
    pub injective: bool,
    pub injective_witness: Option<(String, String)>,
    /// (b) α ≤ β iff e(α) ⊇ e(β)
    pub order_iso: bool,
    pub order_witness: Option<(String, String)>,
    /// (c) e(α∨β) = e(α) ∩ e(β)
    pub join_intersection: bool,
    pub join_witness: Option<(String, String)>,
    /// (d) e(α∧β) = e(α) ∨ e(β), measured on the previous carrier
    pub meet_partition_join: bool,
    pub meet_witness: Option<(String, String)>,
    /// strict same-stage full-carrier variant of (d), diagnostic only
    pub meet_partition_join_strict: bool,
    pub passes: bool,
}

/// Best-effort probe toward Con End Θ = Θ̂: sampled principal congruences
/// of the (possibly incompletely enumerated) endomorphism monoid checked
/// for membership in the stage family. Never gates the verdict.
#[derive(Debug, Clone, Serialize)]
pub struct EndoDiagnostic {
    pub stage: usize,
    pub sampled_pairs: usize,
    pub congruences_in_family: usize,
    pub endos_complete: bool,
    pub best_effort: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RepresentationReport {
    pub stages: Vec<StageConditions>,
    pub passing_stage: Option<usize>,
    /// Stage whose construction hit the node budget, if any.
    pub budget_exhausted_at: Option<usize>,
    pub diagnostic: Option<EndoDiagnostic>,
}

pub fn verify_representation(
    lattice: &FiniteLattice,
    max_stage: usize,
    node_budget: usize,
    endo_budget: usize,
) -> Result<RepresentationReport, BuildError> {
    let mut graph = ColoredGraph::new(lattice, BuildKind::Homogenized, node_budget)?;
    let mut stages = Vec::new();
    let mut passing = None;
    let mut budget_exhausted_at = None;
    for n in 0..=max_stage {
        if n > graph.max_stage() {
            if let Err(BuildError::NodeBudget { stage, .. }) = graph.extend_one_stage() {
                budget_exhausted_at = Some(stage);
                break;
            }
        }
        let cond = stage_conditions(&graph, n);
        let passes = cond.passes;
        stages.push(cond);
        if passes {
            passing = Some(n);
            break;
        }
    }
    let diagnostic = passing.map(|n| endo_diagnostic(&graph, n, endo_budget));
    Ok(RepresentationReport { stages, passing_stage: passing, budget_exhausted_at, diagnostic })
}

fn stage_conditions(graph: &ColoredGraph, n: usize) -> StageConditions {
    let lattice = graph.lattice();
    let view = graph.stage(n);
    let rels = all_connectivity(&view);
    let name = |a: Elem| lattice.name(a).to_string();

    let mut injective = true;
    let mut injective_witness = None;
    'inj: for a in lattice.elements() {
        for b in lattice.elements() {
            if a < b && rels[a as usize] == rels[b as usize] {
                injective = false;
                injective_witness = Some((name(a), name(b)));
                break 'inj;
            }
        }
    }

    let mut order_iso = true;
    let mut order_witness = None;
    'ord: for a in lattice.elements() {
        for b in lattice.elements() {
            let reversed = rels[b as usize].refines(&rels[a as usize]);
            if lattice.leq(a, b) != reversed {
                order_iso = false;
                order_witness = Some((name(a), name(b)));
                break 'ord;
            }
        }
    }

    let mut join_intersection = true;
    let mut join_witness = None;
    'join: for a in lattice.elements() {
        for b in lattice.elements() {
            let inter = rels[a as usize].meet(&rels[b as usize]).expect("same carrier");
            if rels[lattice.join(a, b) as usize] != inter {
                join_intersection = false;
                join_witness = Some((name(a), name(b)));
                break 'join;
            }
        }
    }

    let prev_count = if n == 0 { view.node_count() } else { graph.stage(n - 1).node_count() };
    let mut meet_prev = true;
    let mut meet_witness = None;
    let mut meet_strict = true;
    'meet: for a in lattice.elements() {
        for b in lattice.elements() {
            let pj = rels[a as usize].join(&rels[b as usize]).expect("same carrier");
            let target = &rels[lattice.meet(a, b) as usize];
            if &pj != target {
                meet_strict = false;
            }
            for x in 0..prev_count as u32 {
                for y in x + 1..prev_count as u32 {
                    if target.same(x, y) && !pj.same(x, y) {
                        meet_prev = false;
                        meet_witness = Some((name(a), name(b)));
                        break 'meet;
                    }
                }
            }
        }
    }

    let passes = injective && order_iso && join_intersection && meet_prev;
    StageConditions {
        stage: n,
        nodes: view.node_count(),
        edges: view.edge_count(),
        injective,
        injective_witness,
        order_iso,
        order_witness,
        join_intersection,
        join_witness,
        meet_partition_join: meet_prev,
        meet_witness,
        meet_partition_join_strict: meet_strict,
        passes,
    }
}

fn endo_diagnostic(graph: &ColoredGraph, stage: usize, endo_budget: usize) -> EndoDiagnostic {
    let table = table_of(&graph.stage(stage));
    let endos = crate::algebra::enumerate_endomorphisms(table.carrier_len(), table.rels(), endo_budget);
    let sample_cap = table.carrier_len().min(4) as u32;
    let mut sampled = 0usize;
    let mut members = 0usize;
    for x in 0..sample_cap {
        for y in x + 1..sample_cap {
            sampled += 1;
            if let Ok(pc) = crate::algebra::principal_congruence(table.carrier_len(), x, y, &endos) {
                if table.rels().iter().any(|r| r == &pc.rel) {
                    members += 1;
                }
            }
        }
    }
    EndoDiagnostic {
        stage,
        sampled_pairs: sampled,
        congruences_in_family: members,
        endos_complete: endos.complete,
        best_effort: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::catalog;
    use crate::table::check_subtable;

    #[test]
    fn alpha_cell_pair_counts() {
        let two = catalog::two();
        assert_eq!(alpha_cell(&two, 0).unwrap().pairs, vec![(0, 0)]);
        assert!(alpha_cell(&two, 1).is_err());

        let three = catalog::three_chain();
        let c0 = alpha_cell(&three, 0).unwrap();
        assert_eq!(c0.pairs, vec![(0, 0), (0, 1), (1, 0)]); // (m, m) excluded: m∧m = m ≰ 0
        assert_eq!(c0.new_nodes(), 9);
        let cm = alpha_cell(&three, 1).unwrap();
        assert_eq!(cm.pentagon_count(), 4);
    }

    #[test]
    fn stage_zero_is_one_colored_edge() {
        let g = build_pudlak(&catalog::two(), 0, 1_000).unwrap();
        let stats = growth_stats(&g);
        assert_eq!((stats[0].nodes, stats[0].edges), (2, 1));
        assert_eq!(stats[0].color_histogram, vec![("0".to_string(), 1)]);
    }

    #[test]
    fn pudlak_growth_for_two_chain() {
        let g = build_pudlak(&catalog::two(), 2, 1_000).unwrap();
        let stats = growth_stats(&g);
        let sizes: Vec<(usize, usize)> = stats.iter().map(|s| (s.nodes, s.edges)).collect();
        assert_eq!(sizes, vec![(2, 1), (5, 5), (20, 25)]);
    }

    #[test]
    fn homogenized_growth_for_two_chain() {
        let g = build_homogenized(&catalog::two(), 2, 1_000).unwrap();
        let stats = growth_stats(&g);
        let sizes: Vec<(usize, usize)> = stats.iter().map(|s| (s.nodes, s.edges)).collect();
        // round 1 of stage 2 gives 8 nodes / 9 edges, round 2 adds 9*2 cells
        assert_eq!(sizes, vec![(2, 1), (5, 5), (62, 81)]);
    }

    #[test]
    fn stage_sizes_monotone() {
        let g = build_homogenized(&catalog::three_chain(), 2, 100_000).unwrap();
        let stats = growth_stats(&g);
        for w in stats.windows(2) {
            assert!(w[0].nodes <= w[1].nodes && w[0].edges <= w[1].edges);
        }
    }

    #[test]
    fn node_budget_enforced() {
        assert!(matches!(
            build_pudlak(&catalog::m3(), 3, 100),
            Err(BuildError::NodeBudget { .. })
        ));
    }

    #[test]
    fn connectivity_extremes() {
        let g = build_homogenized(&catalog::three_chain(), 1, 10_000).unwrap();
        let view = g.stage(1);
        assert!(color_connectivity(&view, 0).is_full());
        assert!(color_connectivity(&view, 2).is_discrete());
        let em = color_connectivity(&view, 1);
        assert!(!em.is_full() && !em.is_discrete());
    }

    #[test]
    fn stage_zero_three_chain_labeling_not_injective() {
        let g = build_homogenized(&catalog::three_chain(), 0, 10_000).unwrap();
        let t = table_of(&g.stage(0));
        assert_eq!(t.rel(1), t.rel(2));
        assert!(t.rel(1).is_discrete());
        assert!(!t.labeling_injective());
    }

    #[test]
    fn stage_tables_cohere_under_restriction() {
        for l in [catalog::two(), catalog::three_chain()] {
            let g = build_homogenized(&l, 2, 100_000).unwrap();
            for n in 0..2 {
                let small = table_of(&g.stage(n));
                let large = table_of(&g.stage(n + 1));
                let restricted = large.restrict(small.nodes()).unwrap();
                assert_eq!(&restricted, &small, "lattice {:?} stage {n}", l.names());
                assert!(check_subtable(&small, &large).unwrap().holds);
            }
        }
    }

    #[test]
    fn rebuild_is_identical() {
        let a = build_homogenized(&catalog::b2(), 2, 100_000).unwrap();
        let b = build_homogenized(&catalog::b2(), 2, 100_000).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn representation_two_chain_passes_at_stage_zero() {
        let report = verify_representation(&catalog::two(), 3, 1_000_000, 10_000).unwrap();
        assert_eq!(report.passing_stage, Some(0));
    }

    #[test]
    fn representation_three_chain_fails_injectivity_then_passes() {
        let report = verify_representation(&catalog::three_chain(), 3, 1_000_000, 10_000).unwrap();
        assert_eq!(report.passing_stage, Some(1));
        assert!(!report.stages[0].injective);
        assert!(report.stages[1].passes);
    }

    #[test]
    fn order_reversal_forced_every_stage() {
        let l = catalog::n5();
        let g = build_homogenized(&l, 1, 100_000).unwrap();
        for n in 0..=1 {
            let view = g.stage(n);
            for a in l.elements() {
                for b in l.elements() {
                    if l.leq(a, b) {
                        let ra = color_connectivity(&view, a);
                        let rb = color_connectivity(&view, b);
                        assert!(rb.refines(&ra));
                    }
                }
            }
        }
    }

    #[test]
    fn join_intersection_upper_bound_every_stage() {
        let l = catalog::b2();
        let g = build_homogenized(&l, 2, 100_000).unwrap();
        for n in 0..=2 {
            let view = g.stage(n);
            for a in l.elements() {
                for b in l.elements() {
                    let ra = color_connectivity(&view, a);
                    let rb = color_connectivity(&view, b);
                    let join_rel = color_connectivity(&view, l.join(a, b));
                    assert!(join_rel.refines(&ra.meet(&rb).unwrap()));
                }
            }
        }
    }
}
