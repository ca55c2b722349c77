//! Cross-module checks with independent oracles: brute-force endomorphism
//! counts, interpolants read off built pentagons, restriction identities,
//! and subsequencing of built stage chains.

use lattice_kit::algebra::{enumerate_endomorphisms, find_homogeneity_interpolants, preserves, InterpolantOutcome};
use lattice_kit::lattice::catalog;
use lattice_kit::pudlak::{build_homogenized, build_pudlak, table_of, NodeProvenance};
use lattice_kit::table::{check_sequential, find_meet_interpolants, sequentialize, TableChain, TableKind};
use lattice_kit::Verdict;

/// Stage-1 Pudlak table of the two-element lattice: both relations are
/// trivial, so every self-map is an endomorphism. The brute-force count
/// over all 5^5 maps pins the enumeration.
#[test]
fn stage_one_endomorphism_count_matches_bruteforce() {
    let g = build_pudlak(&catalog::two(), 1, 1_000).unwrap();
    let t = table_of(&g.stage(1));
    assert_eq!(t.carrier_len(), 5);

    let mut oracle_count = 0usize;
    for code in 0..3125u32 {
        let mut f = Vec::new();
        let mut c = code;
        for _ in 0..5 {
            f.push(c % 5);
            c /= 5;
        }
        if t.rels().iter().all(|r| preserves(&f, r)) {
            oracle_count += 1;
        }
    }
    assert_eq!(oracle_count, 3125);

    let endos = enumerate_endomorphisms(t.carrier_len(), t.rels(), 10_000_000);
    assert!(endos.complete);
    assert_eq!(endos.maps.len(), oracle_count);
}

/// Restriction of the stage-1 table to the two base nodes collapses the
/// family to {full, diagonal}.
#[test]
fn stage_one_restriction_to_base_edge() {
    let g = build_pudlak(&catalog::two(), 1, 1_000).unwrap();
    let t = table_of(&g.stage(1));
    let r = t.restrict(&[0, 1]).unwrap();
    assert!(r.rel(0).is_full());
    assert!(r.rel(1).is_discrete());
    assert_eq!(r.kind(), TableKind::Lattice);
}

/// Meet interpolants for a pentagon base pair run through its interior
/// chain when no shortcut exists at the requested colors.
#[test]
fn pentagon_interior_realizes_meet_interpolants() {
    // 3-chain stage 1: the (m, 0)- and (0, m)-pentagons give alternating
    // m/0 chains between the base nodes
    let l = catalog::three_chain();
    let g = build_homogenized(&l, 1, 10_000).unwrap();
    let t = table_of(&g.stage(1));
    // base nodes 0, 1 are related at color 0 = m ∧ 0
    let chain = find_meet_interpolants(&t, 1, 0, 0, 1, 100_000).unwrap();
    assert!(!chain.is_empty());
    // walk validity: links alternate m, 0, ..., 0
    let mut walk = vec![0u32];
    walk.extend_from_slice(&chain);
    walk.push(1);
    for (i, w) in walk.windows(2).enumerate() {
        let rel = if i % 2 == 0 { t.rel(1) } else { t.rel(0) };
        assert!(rel.same(w[0], w[1]), "link {i} of {walk:?}");
    }
}

/// Homogeneity interpolants found on a built stage table verify as
/// certificates against the same table.
#[test]
fn built_stage_certificates_verify() {
    let l = catalog::three_chain();
    let g = build_homogenized(&l, 1, 10_000).unwrap();
    let t = table_of(&g.stage(1));
    let n = t.carrier_len();
    // (x, y) = base pair; u, v within the principal equivalence
    let c = t.principal_equivalence(0, 1).unwrap();
    let mut checked = 0;
    for u in 0..n as u32 {
        for v in 0..n as u32 {
            if !c.same(u, v) || checked >= 6 {
                continue;
            }
            match find_homogeneity_interpolants(n, t.rels(), 0, 1, u, v, 500_000, None) {
                InterpolantOutcome::Found(cert) => {
                    cert.verify(n, t.rels()).unwrap();
                    checked += 1;
                }
                other => panic!("quadruple (0,1,{u},{v}): {other:?}"),
            }
        }
    }
    assert!(checked > 0);
}

/// The homogenized stage chain of the two-element lattice closes its
/// interpolants one stage ahead, so the greedy subsequence is the identity.
#[test]
fn two_chain_stages_sequentialize_to_identity() {
    let g = build_homogenized(&catalog::two(), 2, 100_000).unwrap();
    let tables: Vec<_> = (0..=2).map(|s| table_of(&g.stage(s))).collect();
    let chain = TableChain::new(tables).unwrap();
    let report = check_sequential(&chain, 200_000);
    assert_eq!(report.clause1.verdict, Verdict::Verified);
    assert_eq!(report.clause3.verdict, Verdict::Verified);
    assert_eq!(report.clause4.verdict, Verdict::Verified);
    assert_eq!(sequentialize(&chain, 200_000).unwrap(), vec![0, 1, 2]);
}

/// Chain lattices make the partition-join closure trivial, so their stage
/// tables are lattice tables; incomparable pairs leave only usl tables at
/// truncations (fresh last-round pentagons are singletons in the join).
#[test]
fn stage_table_kinds_by_lattice_shape() {
    let g = build_homogenized(&catalog::three_chain(), 1, 10_000).unwrap();
    assert_eq!(table_of(&g.stage(1)).kind(), TableKind::Lattice);

    let g = build_homogenized(&catalog::b2(), 1, 10_000).unwrap();
    let t = table_of(&g.stage(1));
    assert_eq!(t.kind(), TableKind::Usl);
    assert!(t.kind_witness().meet_break.is_some());
    assert!(t.kind_witness().join_break.is_none());
}

/// Sequentiality clauses on the 3-chain stage chain: clause 2 verifies
/// because chains trivialize the partition-join closure.
#[test]
fn three_chain_sequential_report() {
    let g = build_homogenized(&catalog::three_chain(), 2, 100_000).unwrap();
    let tables: Vec<_> = (0..=2).map(|s| table_of(&g.stage(s))).collect();
    let chain = TableChain::new(tables).unwrap();
    let report = check_sequential(&chain, 500_000);
    assert_eq!(report.clause1.verdict, Verdict::Verified);
    assert_eq!(report.clause2.verdict, Verdict::Verified);
    assert_eq!(report.clause3.verdict, Verdict::Verified);
}

/// Empty-ish chain input: a single stage has nothing to close, so the
/// interpolant clauses pass vacuously.
#[test]
fn single_stage_chain_vacuous() {
    let g = build_homogenized(&catalog::b2(), 0, 1_000).unwrap();
    let chain = TableChain::new(vec![table_of(&g.stage(0))]).unwrap();
    let report = check_sequential(&chain, 1_000);
    assert_eq!(report.clause3.verdict, Verdict::Verified);
    assert_eq!(report.clause4.verdict, Verdict::Verified);
}

/// On every constructed table the principal equivalence of a pair contains
/// the pair and is the finest family member doing so.
#[test]
fn principal_equivalence_is_least_containing_member() {
    for name in ["2", "3-chain", "B2"] {
        let l = catalog::by_name(name).unwrap();
        let g = build_homogenized(&l, 1, 10_000).unwrap();
        let t = table_of(&g.stage(1));
        for x in 0..t.carrier_len() as u32 {
            for y in 0..t.carrier_len() as u32 {
                let c = t.principal_equivalence(x, y).unwrap();
                assert!(c.same(x, y));
                for r in t.rels() {
                    if r.same(x, y) {
                        assert!(c.refines(r), "{name}: C({x},{y}) not finest");
                    }
                }
            }
        }
    }
}

/// A verified Maltsev check certifies the defining equality: the principal
/// congruence of every pair coincides with its principal equivalence.
#[test]
fn verified_tables_have_congruence_equivalence_equality() {
    use lattice_kit::algebra::{congruence_lattice, UnaryAlgebra};
    use lattice_kit::partition::principal_equivalence;
    use lattice_kit::{check_maltsev, principal_congruence};

    let f = vec![1u32, 2, 0, 3];
    let a = UnaryAlgebra::from_generators(4, &[f], 1_000).unwrap().with_identity();
    let con = congruence_lattice(&a).unwrap();
    let n = 4;
    let report = check_maltsev(n, &con.relations, 1_000_000, 100_000);
    assert_eq!(report.verdict, Verdict::Verified);
    let endos = enumerate_endomorphisms(n, &con.relations, 1_000_000);
    assert!(endos.complete);
    for x in 0..n as u32 {
        for y in 0..n as u32 {
            let end = principal_congruence(n, x, y, &endos).unwrap().rel;
            let c = principal_equivalence(&con.relations, x, y).unwrap();
            assert_eq!(end, c, "pair ({x},{y})");
        }
    }
}

/// Node provenance reconstructs the build: every non-base node names its
/// cell, pair, and position, and cells know their parent edge and round.
#[test]
fn provenance_reconstructs_pentagons() {
    let l = catalog::three_chain();
    let g = build_homogenized(&l, 1, 10_000).unwrap();
    for (id, info) in g.nodes().iter().enumerate().skip(2) {
        let NodeProvenance::Pentagon { cell, pair, .. } = info.prov else {
            panic!("non-base node {id} lacks pentagon provenance");
        };
        let cell = g.cell(cell);
        let pent = cell
            .pentagons
            .iter()
            .find(|p| p.pair == pair)
            .expect("pair present in cell");
        assert!(pent.nodes.contains(&(id as u32)));
    }
}
