//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line and holding its stated time bound. Run with
//! `cargo test -p latk --test acceptance -- --nocapture` to see the lines.

use lattice_kit::algebra::{
    dual_congruence_suite, dual_congruence_tables, enumerate_endomorphisms, principal_congruence,
};
use lattice_kit::coding::{build_coded_lattice, decode_all_gs, decode_u, scramble};
use lattice_kit::embed::{assemble_system, embed_graph, image_table, verify_embedding, EmbedLimits};
use lattice_kit::lattice::{catalog, enumerate_usl_homs, FiniteLattice, UslHom};
use lattice_kit::partition::{principal_equivalence, EqRel, PartCmp};
use lattice_kit::pudlak::{build_homogenized, table_of, verify_representation, StageView};
use lattice_kit::table::check_subtable;
use lattice_kit::Verdict;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::time::{Duration, Instant};

fn conclude(criterion: usize, name: &str, elapsed: Duration, bound: Duration, pass: bool) {
    let status = if pass && elapsed <= bound { "PASS" } else { "FAIL" };
    println!(
        "acceptance criterion {criterion} ({name}): {status} [{:.2?} of {:.0?} allowed]",
        elapsed, bound
    );
    assert!(pass, "criterion {criterion} ({name}) failed");
    assert!(
        elapsed <= bound,
        "criterion {criterion} ({name}) exceeded {bound:?} (took {elapsed:?})"
    );
}

fn random_rel(rng: &mut ChaCha8Rng, n: usize) -> EqRel {
    let raw: Vec<u32> = (0..n).map(|_| rng.random_range(0..n as u32)).collect();
    EqRel::from_raw_labels(&raw)
}

/// 1. Partition laws on 1,000 random pairs over carriers of at most seven
/// nodes: join/meet satisfy the lattice axioms and agree with compare.
#[test]
fn criterion_1_partition_laws() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut pass = true;
    for _ in 0..1000 {
        let n = rng.random_range(1..=7usize);
        let p = random_rel(&mut rng, n);
        let q = random_rel(&mut rng, n);
        let r = random_rel(&mut rng, n);
        let j = p.join(&q).unwrap();
        let m = p.meet(&q).unwrap();
        pass &= j == q.join(&p).unwrap() && m == q.meet(&p).unwrap();
        pass &= p.join(&p).unwrap() == p && p.meet(&p).unwrap() == p;
        pass &= p.join(&m).unwrap() == p && p.meet(&j).unwrap() == p;
        // bounds
        pass &= p.refines(&j) && q.refines(&j) && m.refines(&p) && m.refines(&q);
        // least/greatest against an independent third partition
        if p.refines(&r) && q.refines(&r) {
            pass &= j.refines(&r);
        }
        if r.refines(&p) && r.refines(&q) {
            pass &= r.refines(&m);
        }
        // compare consistency: p finer-or-equal q iff join is q
        let cmp = p.compare(&q).unwrap();
        pass &= matches!(cmp, PartCmp::Equal | PartCmp::Finer) == (j == q);
        pass &= matches!(cmp, PartCmp::Equal | PartCmp::Coarser) == (m == q);
    }
    conclude(1, "partition laws", start.elapsed(), Duration::from_secs(1), pass);
}

/// 2. Galois adjoint laws, exhaustively over every (0,1,∨)-homomorphism
/// between every ordered pair of catalog lattices.
#[test]
fn criterion_2_adjoint_laws() {
    let start = Instant::now();
    let mut pass = true;
    let mut homs_checked = 0usize;
    for (_, l0) in catalog::all() {
        for (_, l1) in catalog::all() {
            for hom in enumerate_usl_homs(&l0, &l1) {
                let adj = hom.galois_adjoint();
                // (∧,1)-homomorphism
                pass &= adj.apply(l1.top()) == l0.top();
                for b1 in l1.elements() {
                    for b2 in l1.elements() {
                        pass &= adj.apply(l1.meet(b1, b2)) == l0.meet(adj.apply(b1), adj.apply(b2));
                    }
                }
                // non-top stays non-top
                for beta in l1.elements() {
                    if beta != l1.top() {
                        pass &= adj.apply(beta) != l0.top();
                    }
                }
                // injective on the hom image
                for a1 in l0.elements() {
                    for a2 in l0.elements() {
                        if hom.apply(a1) != hom.apply(a2) {
                            pass &= adj.apply(hom.apply(a1)) != adj.apply(hom.apply(a2));
                        }
                    }
                }
                // exchange law and the adjunction itself
                for alpha in l0.elements() {
                    for beta in l1.elements() {
                        pass &= l0.leq(alpha, adj.apply(beta))
                            == l0.leq(adj.apply(hom.apply(alpha)), adj.apply(beta));
                        pass &= l0.leq(alpha, adj.apply(beta)) == l1.leq(hom.apply(alpha), beta);
                    }
                }
                homs_checked += 1;
            }
        }
    }
    pass &= homs_checked == 328;
    conclude(2, "adjoint laws", start.elapsed(), Duration::from_secs(10), pass);
}

/// 3. Stage-table coherence: for every catalog lattice and homogenized
/// stages within the node budget, the stage table equals the restriction
/// of the next stage's table, and the sub-table check passes.
#[test]
fn criterion_3_stage_coherence() {
    let start = Instant::now();
    let mut pass = true;
    for (_, lattice) in catalog::all() {
        let graph = build_homogenized(&lattice, 2, 100_000).expect("within the node budget");
        for n in 0..2 {
            let small = table_of(&graph.stage(n));
            let large = table_of(&graph.stage(n + 1));
            pass &= large.restrict(small.nodes()).unwrap() == small;
            pass &= check_subtable(&small, &large).unwrap().holds;
        }
    }
    conclude(3, "stage coherence", start.elapsed(), Duration::from_secs(120), pass);
}

/// Independent connectivity oracle: label propagation over the explicit
/// edge list, no union-find, no library relation code.
fn oracle_connectivity(view: &StageView, lattice: &FiniteLattice, alpha: u32) -> Vec<u32> {
    let n = view.node_count();
    let mut labels: Vec<u32> = (0..n as u32).collect();
    loop {
        let mut changed = false;
        for e in view.edges() {
            if lattice.leq(alpha, e.color) {
                let m = labels[e.a as usize].min(labels[e.b as usize]);
                for x in [e.a, e.b] {
                    if labels[x as usize] != m {
                        labels[x as usize] = m;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    // propagate to canonical minimum labels
    loop {
        let mut changed = false;
        for x in 0..n {
            let l = labels[labels[x] as usize];
            if labels[x] != l {
                labels[x] = l;
                changed = true;
            }
        }
        if !changed {
            return labels;
        }
    }
}

/// Oracle evaluation of the four representation conditions at one stage
/// (the meet condition on the previous carrier, matching the library).
fn oracle_stage_passes(lattice: &FiniteLattice, graph: &lattice_kit::ColoredGraph, n: usize) -> bool {
    let view = graph.stage(n);
    let rels: Vec<Vec<u32>> = lattice
        .elements()
        .map(|a| oracle_connectivity(&view, lattice, a))
        .collect();
    let same = |r: &Vec<u32>, x: u32, y: u32| r[x as usize] == r[y as usize];
    let contains = |big: &Vec<u32>, small: &Vec<u32>| {
        (0..big.len() as u32).all(|x| {
            let rep = small[x as usize];
            same(big, x, rep)
        })
    };
    // (a) injective
    for a in lattice.elements() {
        for b in lattice.elements() {
            if a < b && rels[a as usize] == rels[b as usize] {
                return false;
            }
        }
    }
    // (b) order isomorphism
    for a in lattice.elements() {
        for b in lattice.elements() {
            if lattice.leq(a, b) != contains(&rels[a as usize], &rels[b as usize]) {
                return false;
            }
        }
    }
    // (c) joins are intersections
    for a in lattice.elements() {
        for b in lattice.elements() {
            let j = lattice.join(a, b);
            for x in 0..view.node_count() as u32 {
                for y in 0..view.node_count() as u32 {
                    let both = same(&rels[a as usize], x, y) && same(&rels[b as usize], x, y);
                    if both != same(&rels[j as usize], x, y) {
                        return false;
                    }
                }
            }
        }
    }
    // (d) meets are partition joins, on the previous carrier
    let prev = if n == 0 { view.node_count() } else { graph.stage(n - 1).node_count() };
    for a in lattice.elements() {
        for b in lattice.elements() {
            let m = lattice.meet(a, b);
            // partition join via label propagation over both relations
            let mut joined: Vec<u32> = (0..view.node_count() as u32).collect();
            loop {
                let mut changed = false;
                for x in 0..view.node_count() as u32 {
                    for r in [&rels[a as usize], &rels[b as usize]] {
                        let rep = r[x as usize];
                        let lo = joined[x as usize].min(joined[rep as usize]);
                        for t in [x, rep] {
                            if joined[t as usize] != lo {
                                joined[t as usize] = lo;
                                changed = true;
                            }
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            loop {
                let mut changed = false;
                for x in 0..joined.len() {
                    let l = joined[joined[x] as usize];
                    if joined[x] != l {
                        joined[x] = l;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            for x in 0..prev as u32 {
                for y in 0..prev as u32 {
                    if same(&rels[m as usize], x, y) && !same(&joined, x, y) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// 4. Representation desk check: the two-element lattice passes at stage 0
/// and the 3-chain at stage 1 (both re-derived here by an independent
/// oracle); M3, N5, B2 pass at some stage at most 3, with the stage
/// recorded in the report.
#[test]
fn criterion_4_representation() {
    let start = Instant::now();
    let mut pass = true;

    // oracle pre-derivation for the two frozen cases
    for (name, expected) in [("2", 0usize), ("3-chain", 1usize)] {
        let lattice = catalog::by_name(name).unwrap();
        let graph = build_homogenized(&lattice, expected, 1_000_000).unwrap();
        for n in 0..expected {
            pass &= !oracle_stage_passes(&lattice, &graph, n);
        }
        pass &= oracle_stage_passes(&lattice, &graph, expected);
        let report = verify_representation(&lattice, 3, 1_000_000, 100_000).unwrap();
        pass &= report.passing_stage == Some(expected);
    }

    for name in ["M3", "N5", "B2"] {
        let lattice = catalog::by_name(name).unwrap();
        let report = verify_representation(&lattice, 3, 1_000_000, 100_000).unwrap();
        match report.passing_stage {
            Some(stage) => {
                pass &= stage <= 3;
                // the oracle agrees with the recorded stage
                let graph = build_homogenized(&lattice, stage, 1_000_000).unwrap();
                pass &= oracle_stage_passes(&lattice, &graph, stage);
                println!("  representation: {name} passes at stage {stage}");
            }
            None => pass = false,
        }
    }
    conclude(4, "representation desk check", start.elapsed(), Duration::from_secs(300), pass);
}

/// 5. One hundred random composition-closed unary algebras on at most five
/// points: the dual of every congruence lattice is Maltsev homogeneous
/// under complete endomorphism enumeration.
#[test]
fn criterion_5_dual_congruence_tables() {
    let start = Instant::now();
    let report = dual_congruence_suite(100, 0, 5, 5_000_000, 200_000);
    let pass = report.verified == 100 && report.verdict == Verdict::Verified;
    conclude(5, "dual congruence tables", start.elapsed(), Duration::from_secs(300), pass);
}

/// 6. Principal congruences stay inside principal equivalences on every
/// table built by criteria 4 and 5: zero violations over all pairs.
#[test]
fn criterion_6_principal_congruence_inclusion() {
    let start = Instant::now();
    let mut pass = true;

    // tables from criterion 4, at their passing stages
    for name in ["2", "3-chain", "M3", "N5", "B2"] {
        let lattice = catalog::by_name(name).unwrap();
        let report = verify_representation(&lattice, 3, 1_000_000, 1).unwrap();
        let stage = report.passing_stage.expect("criterion 4 passes");
        let graph = build_homogenized(&lattice, stage, 1_000_000).unwrap();
        let table = table_of(&graph.stage(stage));
        let n = table.carrier_len();
        let endos = enumerate_endomorphisms(n, table.rels(), 300_000);
        for x in 0..n as u32 {
            for y in x..n as u32 {
                let end = principal_congruence(n, x, y, &endos).unwrap().rel;
                let c = principal_equivalence(table.rels(), x, y).unwrap_or_else(|| EqRel::full(n));
                pass &= end.refines(&c);
            }
        }
    }

    // tables from criterion 5, same seed and order
    for (n, rels) in dual_congruence_tables(100, 0, 5) {
        let endos = enumerate_endomorphisms(n, &rels, 5_000_000);
        pass &= endos.complete;
        for x in 0..n as u32 {
            for y in x..n as u32 {
                let end = principal_congruence(n, x, y, &endos).unwrap().rel;
                let c = principal_equivalence(&rels, x, y).unwrap_or_else(|| EqRel::full(n));
                pass &= end.refines(&c);
            }
        }
    }
    conclude(6, "principal congruence inclusion", start.elapsed(), Duration::from_secs(300), pass);
}

/// 7. Structural embeddings verify for 2 → 3-chain, 2 → B2, and
/// 3-chain → N5 at source stage 1; a corrupted embedding is refuted with a
/// witness; the image table is a sub-table of the target.
#[test]
fn criterion_7_embeddings() {
    let start = Instant::now();
    let mut pass = true;
    let limits = EmbedLimits { max_target_stage: 8, node_budget: 1_000_000 };
    let cases: [(&str, &str, Vec<u32>); 3] = [
        ("2", "3-chain", vec![0, 2]),
        ("2", "B2", vec![0, 3]),
        ("3-chain", "N5", vec![0, 1, 4]),
    ];
    for (l0_name, l1_name, map) in cases {
        let l0 = catalog::by_name(l0_name).unwrap();
        let l1 = catalog::by_name(l1_name).unwrap();
        let phi = UslHom::new(&l0, &l1, map).unwrap();
        let source = build_homogenized(&l1, 1, 1_000_000).unwrap();
        let (target, emb) = embed_graph(&phi, &source, 1, &limits).unwrap();
        let report = verify_embedding(&source, &target, &emb);
        pass &= report.holds;
        let img = image_table(&source, &emb);
        let tgt_table = table_of(&target.stage(emb.target_stage));
        pass &= check_subtable(&img, &tgt_table).unwrap().holds;

        // corrupted fixture: swapping two image nodes must be refuted
        let mut bad = emb.clone();
        bad.node_map.swap(2, 4);
        let refutation = verify_embedding(&source, &target, &bad);
        pass &= !refutation.holds;
        pass &= refutation.witness.is_some() || refutation.color_witness.is_some();
    }
    conclude(7, "table embeddings", start.elapsed(), Duration::from_secs(300), pass);
}

/// 8. System assembly for the chain 2 → 3-chain → B2: the identity-
/// embedding sweep holds at the discovered stages, and h and m_i are
/// reported deterministically.
#[test]
fn criterion_8_system_assembly() {
    let start = Instant::now();
    let two = catalog::two();
    let three = catalog::three_chain();
    let b2 = catalog::b2();
    let lattices = vec![two.clone(), three.clone(), b2.clone()];
    let homs = vec![
        UslHom::new(&two, &three, vec![0, 2]).unwrap(),
        UslHom::new(&three, &b2, vec![0, 1, 3]).unwrap(),
    ];
    let limits = EmbedLimits { max_target_stage: 8, node_budget: 1_000_000 };
    let first = assemble_system(&lattices, &homs, 1, &limits).unwrap();
    let second = assemble_system(&lattices, &homs, 1, &limits).unwrap();
    let mut pass = first.sweep.holds;
    pass &= first.h == vec![0, 0];
    pass &= first.m == vec![vec![0, 2, 4], vec![0, 2]];
    pass &= first.h == second.h && first.m == second.m;
    pass &= first.stage_of_level == second.stage_of_level;
    pass &= first
        .embeddings
        .iter()
        .zip(&second.embeddings)
        .all(|(a, b)| a.node_map == b.node_map);
    conclude(8, "system assembly", start.elapsed(), Duration::from_secs(300), pass);
}

/// 9. Coding round-trip: all 32 subsets of {0..4} with five g-atoms build
/// valid lattices, and decoding recovers the set and the g-sequence through
/// the hidden permutation for ten scramble seeds each.
#[test]
fn criterion_9_coding_round_trip() {
    let start = Instant::now();
    let mut pass = true;
    for mask in 0u32..32 {
        let u_set: BTreeSet<usize> = (0..5).filter(|i| mask & (1 << i) != 0).collect();
        let coded = match build_coded_lattice(&u_set, 5) {
            Ok(c) => c,
            Err(_) => {
                pass = false;
                continue;
            }
        };
        for seed in 0..10u64 {
            let pres = scramble(&coded, seed);
            let truth = pres.hidden().unwrap();
            match decode_u(&pres.view()) {
                Ok(u) => pass &= u == u_set,
                Err(_) => pass = false,
            }
            match decode_all_gs(&pres.view()) {
                Ok(gs) => pass &= gs == truth.g_ids,
                Err(_) => pass = false,
            }
        }
    }
    conclude(9, "coding round trip", start.elapsed(), Duration::from_secs(30), pass);
}

/// 10. Determinism: repeated CLI runs with identical configuration produce
/// byte-identical artifacts and reports.
#[test]
fn criterion_10_cli_determinism() {
    let start = Instant::now();
    let mut pass = true;
    let latk = env!("CARGO_BIN_EXE_latk");

    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for d in [&d1, &d2] {
        let out = std::process::Command::new(latk)
            .args([
                "build",
                "--lattice",
                "catalog:M3",
                "--stages",
                "1",
                "--format",
                "dot",
                "--out",
                d.path().to_str().unwrap(),
            ])
            .output()
            .unwrap();
        pass &= out.status.success();
    }
    let mut names: Vec<_> = std::fs::read_dir(d1.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    pass &= !names.is_empty();
    for name in &names {
        pass &= std::fs::read(d1.path().join(name)).unwrap()
            == std::fs::read(d2.path().join(name)).unwrap();
    }

    // reports and presentations too
    let r1 = d1.path().join("report.json");
    let r2 = d2.path().join("report.json");
    let p1 = d1.path().join("pres.json");
    let p2 = d2.path().join("pres.json");
    for (r, p) in [(&r1, &p1), (&r2, &p2)] {
        let out = std::process::Command::new(latk)
            .args([
                "check", "representation", "--lattice", "catalog:B2", "--max-stage", "2",
                "--out", r.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        pass &= out.status.success();
        let out = std::process::Command::new(latk)
            .args([
                "code", "--set", "0,2,4", "--n", "5", "--scramble-seed", "41",
                "--out", p.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        pass &= out.status.success();
    }
    pass &= std::fs::read(&r1).unwrap() == std::fs::read(&r2).unwrap();
    pass &= std::fs::read(&p1).unwrap() == std::fs::read(&p2).unwrap();

    conclude(10, "cli determinism", start.elapsed(), Duration::from_secs(120), pass);
}
