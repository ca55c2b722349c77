//! Recoloring along a Galois adjoint, structural embeddings of one staged
//! graph into another induced by a (0,1,∨)-homomorphism, embedding
//! verification, and the finite-stage assembly of a whole lattice system.
//!
//! For a hom φ: L0 → L1 the graph over L1 embeds into the graph over L0:
//! each source pentagon (β1, β2) lands on the target pentagon
//! (φ*β1, φ*β2) of a fresh cell copy on the image edge. Distinct source
//! pentagons can collide on the same image pair, so copies are allocated
//! per (image edge, image pair) slot counter; slots spread over
//! (round, copy) coordinates in the order that grows the required target
//! stage slowest. The allocation consumes source cells in provenance
//! order, so the slots used by stage n are a prefix of those used by
//! stage n+1 and the least target stage m(n) is read off one deep pass.

use crate::lattice::{Elem, FiniteLattice, GaloisAdjoint, UslHom};
use crate::partition::EqRel;
use crate::pudlak::{
    build_homogenized, color_connectivity, table_of, BuildError, CellId, ColoredGraph, EdgeId,
    NodeId,
};
use crate::table::LatticeTable;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EmbedError {
    #[error("source graph is labeled by a different lattice than the hom's target")]
    SourceLatticeMismatch,
    #[error("hom must be injective (an isomorphism onto its image) for the structural embedding")]
    NonInjectiveHom,
    #[error("embedding needs target stage {needed}, above the cap {cap}")]
    TargetStageBudget { needed: usize, cap: usize },
    #[error("source stage {requested} not built (graph has {built})")]
    SourceStageMissing { requested: usize, built: usize },
    #[error(transparent)]
    Build(#[from] BuildError),
}

/// Replace each color β by φ*β. Nodes and edges are untouched: the adjoint
/// never sends a non-top color to top, so recoloring identifies no points.
pub fn recolor(graph: &ColoredGraph, phi: &UslHom) -> Result<ColoredGraph, EmbedError> {
    if graph.lattice() != phi.target() {
        return Err(EmbedError::SourceLatticeMismatch);
    }
    let adj = phi.galois_adjoint();
    Ok(graph.recolored(phi.source(), &adj))
}

/// One pentagon's landing site inside the target graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Allocation {
    pub source_cell: CellId,
    pub source_pair: (Elem, Elem),
    pub image_pair: (Elem, Elem),
    pub target_round: u32,
    pub target_copy: u32,
}

/// Injective structural embedding of a source stage into a target stage.
#[derive(Debug, Clone, PartialEq)]
pub struct TableEmbedding {
    pub phi: UslHom,
    pub source_stage: usize,
    /// Least target stage containing the image under the canonical allocation.
    pub target_stage: usize,
    /// source node id -> target node id, total on the source stage
    pub node_map: Vec<NodeId>,
    /// source edge id -> target edge id
    pub edge_map: Vec<EdgeId>,
    pub allocations: Vec<Allocation>,
}

#[derive(Debug, Clone, Copy)]
pub struct EmbedLimits {
    pub max_target_stage: usize,
    pub node_budget: usize,
}

impl Default for EmbedLimits {
    fn default() -> Self {
        EmbedLimits { max_target_stage: 8, node_budget: 1_000_000 }
    }
}

/// Slot `s` (0-based) of the per-(edge, image pair) counter, as a
/// (round offset, copy) coordinate: pairs (d, k), d,k >= 1, enumerated in
/// order of max(r0 + d, k), then d, then k. Minimizes the target stage
/// max(r0 + d, k) the slot forces.
fn slot_coords(r0: u32, slot: u32) -> (u32, u32) {
    let mut seen = 0u32;
    let mut v = r0 + 1;
    loop {
        for d in 1..=(v - r0) {
            for k in 1..=v {
                if r0 + d == v || k == v {
                    if seen == slot {
                        return (d, k);
                    }
                    seen += 1;
                }
            }
        }
        v += 1;
    }
}

/// Build the target graph and the embedding of `source` (a homogenized
/// graph over φ's target lattice) at `source_stage` into it.
pub fn embed_graph(
    phi: &UslHom,
    source: &ColoredGraph,
    source_stage: usize,
    limits: &EmbedLimits,
) -> Result<(ColoredGraph, TableEmbedding), EmbedError> {
    let plan = plan_embedding(phi, source, source_stage, limits)?;
    let target = build_homogenized(phi.source(), plan.target_stage, limits.node_budget)?;
    materialize_embedding(phi, source, source_stage, &plan, &target).map(|emb| (target, emb))
}

struct EmbedPlan {
    target_stage: usize,
    /// per allocated source pentagon (cell id, pentagon index): coords
    coords: Vec<((CellId, usize), Allocation)>,
    /// target stage needed by the prefix of cells up to each source stage
    stage_needed: Vec<usize>,
}

fn plan_embedding(
    phi: &UslHom,
    source: &ColoredGraph,
    source_stage: usize,
    limits: &EmbedLimits,
) -> Result<EmbedPlan, EmbedError> {
    if source.lattice() != phi.target() {
        return Err(EmbedError::SourceLatticeMismatch);
    }
    if source_stage > source.max_stage() {
        return Err(EmbedError::SourceStageMissing {
            requested: source_stage,
            built: source.max_stage(),
        });
    }
    let adj = phi.galois_adjoint();
    // the structural recursion keeps the base edge fixed, which needs
    // adjoint(phi(alpha)) = alpha, i.e. an injective hom
    for alpha in phi.source().elements() {
        if adj.apply(phi.apply(alpha)) != alpha {
            return Err(EmbedError::NonInjectiveHom);
        }
    }

    let mut img_round: HashMap<EdgeId, u32> = HashMap::new();
    img_round.insert(0, 0);
    let mut counters: HashMap<(EdgeId, (Elem, Elem)), u32> = HashMap::new();
    let mut coords = Vec::new();
    let mut needed = 0usize;
    let mut stage_needed = vec![0usize; source_stage + 1];
    for (cell_id, cell) in source.cells().iter().enumerate() {
        if cell.first_stage as usize > source_stage {
            break;
        }
        let r0 = img_round[&cell.parent_edge];
        for (p_idx, pent) in cell.pentagons.iter().enumerate() {
            let image_pair = (adj.apply(pent.pair.0), adj.apply(pent.pair.1));
            let slot = counters.entry((cell.parent_edge, image_pair)).or_insert(0);
            let (d, k) = slot_coords(r0, *slot);
            *slot += 1;
            let round = r0 + d;
            needed = needed.max(round as usize).max(k as usize);
            for s in cell.first_stage as usize..=source_stage {
                stage_needed[s] = stage_needed[s].max(round as usize).max(k as usize);
            }
            for &e in &pent.edges {
                img_round.insert(e, round);
            }
            coords.push((
                (cell_id as CellId, p_idx),
                Allocation {
                    source_cell: cell_id as CellId,
                    source_pair: pent.pair,
                    image_pair,
                    target_round: round,
                    target_copy: k,
                },
            ));
        }
    }
    // cumulative: stage n's requirement covers all earlier stages
    for s in 1..stage_needed.len() {
        stage_needed[s] = stage_needed[s].max(stage_needed[s - 1]);
    }
    if needed > limits.max_target_stage {
        return Err(EmbedError::TargetStageBudget { needed, cap: limits.max_target_stage });
    }
    Ok(EmbedPlan { target_stage: needed, coords, stage_needed })
}

fn materialize_embedding(
    phi: &UslHom,
    source: &ColoredGraph,
    source_stage: usize,
    plan: &EmbedPlan,
    target: &ColoredGraph,
) -> Result<TableEmbedding, EmbedError> {
    let src_view = source.stage(source_stage);
    let mut node_map = vec![u32::MAX; src_view.node_count()];
    let mut edge_map = vec![u32::MAX; src_view.edge_count()];
    node_map[0] = 0;
    node_map[1] = 1;
    edge_map[0] = 0;
    let mut allocations = Vec::with_capacity(plan.coords.len());
    for &((cell_id, p_idx), alloc) in &plan.coords {
        let cell = source.cell(cell_id);
        let pent = &cell.pentagons[p_idx];
        let t_parent = edge_map[cell.parent_edge as usize];
        debug_assert_ne!(t_parent, u32::MAX, "parent edge mapped before children");
        let t_cell_id = target
            .lookup_cell(t_parent, alloc.target_round, alloc.target_copy)
            .expect("planned cell exists at the planned stage");
        let t_cell = target.cell(t_cell_id);
        let t_pent = t_cell
            .pentagons
            .iter()
            .find(|p| p.pair == alloc.image_pair)
            .expect("image pair qualifies on the image edge color");
        for i in 0..3 {
            node_map[pent.nodes[i] as usize] = t_pent.nodes[i];
        }
        for i in 0..4 {
            edge_map[pent.edges[i] as usize] = t_pent.edges[i];
        }
        allocations.push(alloc);
    }
    debug_assert!(node_map.iter().all(|&v| v != u32::MAX));
    debug_assert!({
        let mut seen = std::collections::HashSet::new();
        node_map.iter().all(|&v| seen.insert(v))
    });
    Ok(TableEmbedding {
        phi: phi.clone(),
        source_stage,
        target_stage: plan.target_stage,
        node_map,
        edge_map,
        allocations,
    })
}

/// Least target stage consumed by each source-stage prefix of the canonical
/// allocation: index n gives m(n).
pub fn stage_requirements(
    phi: &UslHom,
    source: &ColoredGraph,
    source_stage: usize,
    limits: &EmbedLimits,
) -> Result<Vec<usize>, EmbedError> {
    plan_embedding(phi, source, source_stage, limits).map(|p| p.stage_needed)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmbedWitness {
    pub x: NodeId,
    pub y: NodeId,
    pub alpha: Elem,
    pub source_related: bool,
    pub target_related: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingReport {
    pub holds: bool,
    pub witness: Option<EmbedWitness>,
    /// first source edge whose image color differs from the adjoint of its
    /// own color, if any
    pub color_witness: Option<EdgeId>,
    /// set when the serialized map is not even shape-compatible with the
    /// graphs (untrusted input)
    pub structural_error: Option<String>,
    pub pairs_checked: u64,
}

fn structural_check(source: &ColoredGraph, target: &ColoredGraph, emb: &TableEmbedding) -> Option<String> {
    if source.lattice() != emb.phi.target() || target.lattice() != emb.phi.source() {
        return Some("graphs are labeled by different lattices than the hom".into());
    }
    if emb.source_stage > source.max_stage() || emb.target_stage > target.max_stage() {
        return Some("embedding references stages beyond the built graphs".into());
    }
    let src = source.stage(emb.source_stage);
    let tgt = target.stage(emb.target_stage);
    if emb.node_map.len() != src.node_count() {
        return Some(format!(
            "node map has {} entries for {} source nodes",
            emb.node_map.len(),
            src.node_count()
        ));
    }
    if emb.node_map.iter().any(|&v| (v as usize) >= tgt.node_count()) {
        return Some("node map value outside the target stage".into());
    }
    if emb.edge_map.len() != src.edge_count() {
        return Some(format!(
            "edge map has {} entries for {} source edges",
            emb.edge_map.len(),
            src.edge_count()
        ));
    }
    if emb.edge_map.iter().any(|&v| (v as usize) >= tgt.edge_count()) {
        return Some("edge map value outside the target stage".into());
    }
    None
}

/// Exhaustive verification: every source edge lands on an edge colored by
/// the adjoint image of its color, and for all source pairs and all α in
/// the hom's source lattice, relatedness at φα inside the source stage is
/// equivalent to relatedness at α inside the target stage.
pub fn verify_embedding(
    source: &ColoredGraph,
    target: &ColoredGraph,
    emb: &TableEmbedding,
) -> EmbeddingReport {
    if let Some(err) = structural_check(source, target, emb) {
        return EmbeddingReport {
            holds: false,
            witness: None,
            color_witness: None,
            structural_error: Some(err),
            pairs_checked: 0,
        };
    }
    let phi = &emb.phi;
    let adj = phi.galois_adjoint();
    let src_view = source.stage(emb.source_stage);
    let tgt_view = target.stage(emb.target_stage);

    let mut color_witness = None;
    for (eid, e) in src_view.edges().iter().enumerate() {
        let t = target.edge(emb.edge_map[eid]);
        let expected = adj.apply(e.color);
        let endpoints_match = (emb.node_map[e.a as usize], emb.node_map[e.b as usize]) == (t.a, t.b);
        if t.color != expected || !endpoints_match {
            color_witness = Some(eid as EdgeId);
            break;
        }
    }

    let source_rels: Vec<EqRel> = phi
        .source()
        .elements()
        .map(|alpha| color_connectivity(&src_view, phi.apply(alpha)))
        .collect();
    let target_rels: Vec<EqRel> = phi
        .source()
        .elements()
        .map(|alpha| color_connectivity(&tgt_view, alpha))
        .collect();

    // fan out over rows; the first witness in (x, y, alpha) order wins
    use rayon::prelude::*;
    let n = src_view.node_count() as u32;
    let elems: Vec<Elem> = phi.source().elements().collect();
    let row_witness: Vec<Option<EmbedWitness>> = (0..n)
        .into_par_iter()
        .map(|x| {
            for y in x..n {
                for &alpha in &elems {
                    let s = source_rels[alpha as usize].same(x, y);
                    let t = target_rels[alpha as usize]
                        .same(emb.node_map[x as usize], emb.node_map[y as usize]);
                    if s != t {
                        return Some(EmbedWitness {
                            x,
                            y,
                            alpha,
                            source_related: s,
                            target_related: t,
                        });
                    }
                }
            }
            None
        })
        .collect();
    let witness = row_witness.into_iter().flatten().next();
    let pairs = (n as u64) * (n as u64 + 1) / 2 * elems.len() as u64;
    EmbeddingReport {
        holds: witness.is_none() && color_witness.is_none(),
        witness,
        color_witness,
        structural_error: None,
        pairs_checked: pairs,
    }
}

/// The image of the source table inside the target: carrier is the image
/// node set, and the relation at α is the pushforward of the source
/// relation at φα (equivalently, connectivity inside the image subgraph).
pub fn image_table(source: &ColoredGraph, emb: &TableEmbedding) -> LatticeTable {
    let phi = &emb.phi;
    let src_view = source.stage(emb.source_stage);
    let src_rels: Vec<EqRel> = phi
        .source()
        .elements()
        .map(|alpha| color_connectivity(&src_view, phi.apply(alpha)))
        .collect();
    let mut ordered: Vec<(NodeId, u32)> = emb
        .node_map
        .iter()
        .enumerate()
        .map(|(s, &t)| (t, s as u32))
        .collect();
    ordered.sort_unstable();
    let nodes: Vec<NodeId> = ordered.iter().map(|&(t, _)| t).collect();
    let rels: Vec<EqRel> = src_rels
        .iter()
        .map(|r| {
            let raw: Vec<u32> = ordered.iter().map(|&(_, s)| r.label(s)).collect();
            EqRel::from_raw_labels(&raw)
        })
        .collect();
    LatticeTable::new(phi.source().clone(), nodes, rels)
        .expect("image table inherits the stage-table invariants")
}

impl ColoredGraph {
    /// Color-pushforward copy used by `recolor`.
    pub(crate) fn recolored(&self, new_lattice: &FiniteLattice, adj: &GaloisAdjoint) -> ColoredGraph {
        let mut g = self.clone();
        g.relabel(new_lattice, adj);
        g
    }
}

/// Thm-style assembly of a finite lattice chain: per-level stage functions
/// m_i, the offsets h(i) = m_i(0), composed node maps into the base graph,
/// and the identity-embedding sweep over consecutive levels.
#[derive(Debug)]
pub struct SystemAssembly {
    pub lattices: Vec<FiniteLattice>,
    pub homs: Vec<UslHom>,
    /// raw stage used at each level (top level = requested depth)
    pub stage_of_level: Vec<usize>,
    pub h: Vec<usize>,
    /// m[i][n] for n = 0..=stage_of_level[i+1]
    pub m: Vec<Vec<usize>>,
    pub graphs: Vec<ColoredGraph>,
    pub embeddings: Vec<TableEmbedding>,
    /// comp_maps[i]: raw level-i stage nodes -> base (level 0) nodes
    pub comp_maps: Vec<Vec<NodeId>>,
    /// composed stage index of each level's table inside the base sequence
    pub composed_k: Vec<usize>,
    pub sweep: SweepReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub holds: bool,
    /// (level, alpha, base node x, base node y) where the biconditional broke
    pub witness: Option<(usize, Elem, NodeId, NodeId)>,
    pub pairs_checked: u64,
}

#[derive(Debug, Error)]
pub enum AssembleError {
    #[error("chain needs k+1 lattices for k homs")]
    ChainShape,
    #[error("hom {index} does not map lattice {index} into lattice {next}", next = index + 1)]
    ChainMismatch { index: usize },
    #[error("embedding at level {level} failed: {source}")]
    Embed { level: usize, source: EmbedError },
}

/// Assemble the system for the chain φ_i: L^i → L^{i+1}, realizing every
/// level's table inside the base graph over L^0. `top_stage` is the raw
/// stage requested for the deepest level.
pub fn assemble_system(
    lattices: &[FiniteLattice],
    homs: &[UslHom],
    top_stage: usize,
    limits: &EmbedLimits,
) -> Result<SystemAssembly, AssembleError> {
    let k = homs.len();
    if lattices.len() != k + 1 {
        return Err(AssembleError::ChainShape);
    }
    for (i, h) in homs.iter().enumerate() {
        if h.source() != &lattices[i] || h.target() != &lattices[i + 1] {
            return Err(AssembleError::ChainMismatch { index: i });
        }
    }

    let mut stage_of_level = vec![0usize; k + 1];
    stage_of_level[k] = top_stage;
    let mut graphs: Vec<Option<ColoredGraph>> = (0..=k).map(|_| None).collect();
    graphs[k] = Some(
        build_homogenized(&lattices[k], top_stage, limits.node_budget)
            .map_err(|e| AssembleError::Embed { level: k, source: EmbedError::Build(e) })?,
    );
    let mut embeddings: Vec<Option<TableEmbedding>> = (0..k).map(|_| None).collect();
    let mut m: Vec<Vec<usize>> = vec![Vec::new(); k];

    for i in (0..k).rev() {
        let source_graph = graphs[i + 1].as_ref().unwrap();
        let src_stage = stage_of_level[i + 1];
        let reqs = stage_requirements(&homs[i], source_graph, src_stage, limits)
            .map_err(|e| AssembleError::Embed { level: i, source: e })?;
        let (target, emb) = embed_graph(&homs[i], source_graph, src_stage, limits)
            .map_err(|e| AssembleError::Embed { level: i, source: e })?;
        stage_of_level[i] = emb.target_stage;
        m[i] = reqs;
        graphs[i] = Some(target);
        embeddings[i] = Some(emb);
    }

    let graphs: Vec<ColoredGraph> = graphs.into_iter().map(Option::unwrap).collect();
    let embeddings: Vec<TableEmbedding> = embeddings.into_iter().map(Option::unwrap).collect();
    let h: Vec<usize> = m.iter().map(|mi| mi.first().copied().unwrap_or(0)).collect();

    // composed node maps into the base graph
    let mut comp_maps: Vec<Vec<NodeId>> = Vec::with_capacity(k + 1);
    let base_nodes = graphs[0].stage(stage_of_level[0]).node_count();
    comp_maps.push((0..base_nodes as u32).collect());
    for i in 1..=k {
        let prev = &comp_maps[i - 1];
        let emb = &embeddings[i - 1];
        let map: Vec<NodeId> = emb.node_map.iter().map(|&t| prev[t as usize]).collect();
        comp_maps.push(map);
    }

    // composed stage indices: k(level) = m_0(m_1(... m_{level-1}(j_level)))
    let mut composed_k = vec![0usize; k + 1];
    for level in 0..=k {
        let mut idx = stage_of_level[level];
        for i in (0..level).rev() {
            idx = m[i][idx];
        }
        composed_k[level] = idx;
    }

    let sweep = clause_five_sweep(&lattices.to_vec(), homs, &graphs, &stage_of_level, &comp_maps);

    Ok(SystemAssembly {
        lattices: lattices.to_vec(),
        homs: homs.to_vec(),
        stage_of_level,
        h,
        m,
        graphs,
        embeddings,
        comp_maps,
        composed_k,
        sweep,
    })
}

impl SystemAssembly {
    /// Composed table of a level: its raw stage table pushed into the base
    /// graph's node ids.
    pub fn composed_table(&self, level: usize) -> LatticeTable {
        let raw = table_of(&self.graphs[level].stage(self.stage_of_level[level]));
        let comp = &self.comp_maps[level];
        let mut ordered: Vec<(NodeId, u32)> =
            comp.iter().enumerate().map(|(s, &b)| (b, s as u32)).collect();
        ordered.sort_unstable();
        let nodes: Vec<NodeId> = ordered.iter().map(|&(b, _)| b).collect();
        let rels: Vec<EqRel> = self.lattices[level]
            .elements()
            .map(|alpha| {
                let r = raw.rel(alpha);
                let raw_labels: Vec<u32> = ordered.iter().map(|&(_, s)| r.label(s)).collect();
                EqRel::from_raw_labels(&raw_labels)
            })
            .collect();
        LatticeTable::new(self.lattices[level].clone(), nodes, rels)
            .expect("composed tables inherit stage-table invariants")
    }

    /// Padding rule: the table of level i at composed index k equals the
    /// deepest materialized table whose composed index is at most k.
    pub fn table_at(&self, level: usize, k: usize) -> Option<LatticeTable> {
        if k >= self.composed_k[level] {
            Some(self.composed_table(level))
        } else {
            None
        }
    }
}

fn clause_five_sweep(
    lattices: &[FiniteLattice],
    homs: &[UslHom],
    graphs: &[ColoredGraph],
    stage_of_level: &[usize],
    comp_maps: &[Vec<NodeId>],
) -> SweepReport {
    let k = homs.len();
    let mut pairs = 0u64;
    for i in 0..k {
        // relations of level i and i+1 over base node ids
        let view_i = graphs[i].stage(stage_of_level[i]);
        let view_j = graphs[i + 1].stage(stage_of_level[i + 1]);
        // base node -> raw position, per level
        let mut inv_i: HashMap<NodeId, u32> = HashMap::new();
        for (s, &b) in comp_maps[i].iter().enumerate() {
            inv_i.insert(b, s as u32);
        }
        let carrier_j = &comp_maps[i + 1];
        for alpha in lattices[i].elements() {
            let rel_i = color_connectivity(&view_i, alpha);
            let rel_j = color_connectivity(&view_j, homs[i].apply(alpha));
            for (sj_x, &bx) in carrier_j.iter().enumerate() {
                for (sj_y, &by) in carrier_j.iter().enumerate().skip(sj_x) {
                    pairs += 1;
                    let in_i = rel_i.same(inv_i[&bx], inv_i[&by]);
                    let in_j = rel_j.same(sj_x as u32, sj_y as u32);
                    if in_i != in_j {
                        return SweepReport {
                            holds: false,
                            witness: Some((i, alpha, bx, by)),
                            pairs_checked: pairs,
                        };
                    }
                }
            }
        }
    }
    SweepReport { holds: true, witness: None, pairs_checked: pairs }
}
