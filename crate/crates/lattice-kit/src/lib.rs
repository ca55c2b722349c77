//! Finite combinatorial machinery for congruence lattice representation:
//! partition lattices, bounded finite lattices with Galois adjoints, unary
//! algebras and their congruence lattices, Maltsev-homogeneous lattice
//! tables, staged Pudlak colored graphs, table embeddings induced by
//! (0,1,∨)-homomorphisms, and the height-three coding lattice L(U) with its
//! positive-fact decoders.
//!
//! Every construction is deterministic: rebuilding with the same inputs,
//! seeds, and budgets yields identical artifacts. Budgets are counted in
//! visited search states rather than wall time.

pub mod algebra;
pub mod coding;
pub mod embed;
pub mod io;
pub mod lattice;
pub mod partition;
pub mod pudlak;
pub mod table;

use serde::{Deserialize, Serialize};

/// Three-valued outcome of a budgeted check: a claim is verified with
/// witnesses in hand, refuted with a counterexample, or left unknown when
/// the budget ran out before the search space was exhausted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Verified,
    Refuted,
    Unknown,
}

impl Verdict {
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Refuted, _) | (_, Refuted) => Refuted,
            (Unknown, _) | (_, Unknown) => Unknown,
            (Verified, Verified) => Verified,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Verified => write!(f, "verified"),
            Verdict::Refuted => write!(f, "refuted"),
            Verdict::Unknown => write!(f, "unknown"),
        }
    }
}

pub use algebra::{
    check_maltsev, congruence_lattice, enumerate_endomorphisms, find_homogeneity_interpolants,
    principal_congruence, Endomorphisms, HomogeneityCertificate, MaltsevReport, UnaryAlgebra,
};
pub use coding::{
    build_coded_lattice, check_shore_sequence, check_sw_set, decode_g_sequence, decode_u,
    scramble, CodedLattice, Presentation,
};
pub use embed::{assemble_system, embed_graph, recolor, verify_embedding, SystemAssembly, TableEmbedding};
pub use lattice::{
    catalog, check_usl_hom, direct_limit, DirectLimitSystem, FiniteLattice, GaloisAdjoint, UslHom,
};
pub use partition::{EqRel, PartCmp};
pub use pudlak::{
    build_homogenized, build_pudlak, color_connectivity, growth_stats, table_of,
    verify_representation, ColoredGraph, RepresentationReport, StageView,
};
pub use table::{check_subtable, find_meet_interpolants, LatticeTable, TableChain, TableKind};
