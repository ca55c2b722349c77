//! Unary algebras, congruence lattices, endomorphism monoids of relation
//! families, principal congruences, homogeneity interpolants, and the
//! Maltsev homogeneity check.
//!
//! Everything here works over a family of equivalence relations (the
//! distinct members of a table's indexed family). Searches are deterministic:
//! nodes are visited in id order and candidate images ascend, so budgets and
//! witnesses are reproducible. Budgets count visited partial assignments,
//! not wall time.

use crate::lattice::FiniteLattice;
use crate::partition::{all_partitions, principal_equivalence, DisjointSet, EqRel};
use crate::Verdict;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

pub type SelfMap = Vec<u32>;

pub fn compose(outer: &[u32], inner: &[u32]) -> SelfMap {
    inner.iter().map(|&x| outer[x as usize]).collect()
}

pub fn identity_map(n: usize) -> SelfMap {
    (0..n as u32).collect()
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("composition closure exceeded the budget of {budget} maps")]
    ClosureBudget { budget: usize },
    #[error("map is not total on a carrier of {carrier} nodes")]
    MalformedMap { carrier: usize },
    #[error("maps are not closed under composition: composing maps {f} and {g} leaves the set")]
    NotClosed { f: usize, g: usize },
    #[error("carrier of {carrier} nodes exceeds the exhaustive bound {bound}")]
    CarrierTooLarge { carrier: usize, bound: usize },
    #[error("node {node} outside carrier 0..{carrier}")]
    UnknownNode { node: u32, carrier: usize },
}

/// A set of total self-maps closed under composition.
#[derive(Debug, Clone)]
pub struct UnaryAlgebra {
    n: usize,
    maps: Vec<SelfMap>,
    identity_adjoined: bool,
}

impl UnaryAlgebra {
    /// Wrap an already-closed set of maps, verifying closure.
    pub fn new_closed(n: usize, maps: Vec<SelfMap>) -> Result<Self, AlgebraError> {
        for m in &maps {
            if m.len() != n || m.iter().any(|&v| v as usize >= n) {
                return Err(AlgebraError::MalformedMap { carrier: n });
            }
        }
        let set: BTreeSet<&SelfMap> = maps.iter().collect();
        for (i, f) in maps.iter().enumerate() {
            for (j, g) in maps.iter().enumerate() {
                if !set.contains(&compose(f, g)) {
                    return Err(AlgebraError::NotClosed { f: i, g: j });
                }
            }
        }
        Ok(UnaryAlgebra { n, maps, identity_adjoined: false })
    }

    /// Least composition-closed superset of the generators; fails when it
    /// would exceed `budget` maps (the monoid may approach n^n).
    pub fn from_generators(n: usize, generators: &[SelfMap], budget: usize) -> Result<Self, AlgebraError> {
        for m in generators {
            if m.len() != n || m.iter().any(|&v| v as usize >= n) {
                return Err(AlgebraError::MalformedMap { carrier: n });
            }
        }
        let mut set: BTreeSet<SelfMap> = BTreeSet::new();
        let mut queue: Vec<SelfMap> = Vec::new();
        for g in generators {
            if set.insert(g.clone()) {
                queue.push(g.clone());
            }
        }
        if set.len() > budget {
            return Err(AlgebraError::ClosureBudget { budget });
        }
        while let Some(f) = queue.pop() {
            let existing: Vec<SelfMap> = set.iter().cloned().collect();
            for g in &existing {
                for h in [compose(&f, g), compose(g, &f)] {
                    if set.insert(h.clone()) {
                        if set.len() > budget {
                            return Err(AlgebraError::ClosureBudget { budget });
                        }
                        queue.push(h);
                    }
                }
            }
        }
        Ok(UnaryAlgebra {
            n,
            maps: set.into_iter().collect(),
            identity_adjoined: false,
        })
    }

    /// Adjoin the identity map (used for congruence/endomorphism work where
    /// the monoid is expected to contain it); the flag records the change so
    /// the literal input semantics stay observable.
    pub fn with_identity(mut self) -> Self {
        let id = identity_map(self.n);
        if !self.maps.contains(&id) {
            self.maps.push(id);
            self.maps.sort();
            self.identity_adjoined = true;
        }
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn maps(&self) -> &[SelfMap] {
        &self.maps
    }

    pub fn identity_adjoined(&self) -> bool {
        self.identity_adjoined
    }
}

/// All congruences of the algebra, with the lattice they form under
/// inclusion. Exhaustive over partitions, so the carrier is capped.
#[derive(Debug, Clone)]
pub struct CongruenceLattice {
    pub relations: Vec<EqRel>,
    pub lattice: FiniteLattice,
}

pub const CON_CARRIER_BOUND: usize = 7;

pub fn congruence_lattice(algebra: &UnaryAlgebra) -> Result<CongruenceLattice, AlgebraError> {
    congruence_lattice_bounded(algebra, CON_CARRIER_BOUND)
}

pub fn congruence_lattice_bounded(
    algebra: &UnaryAlgebra,
    bound: usize,
) -> Result<CongruenceLattice, AlgebraError> {
    let n = algebra.n();
    if n > bound {
        return Err(AlgebraError::CarrierTooLarge { carrier: n, bound });
    }
    let mut relations: Vec<EqRel> = all_partitions(n)
        .into_iter()
        .filter(|p| algebra.maps().iter().all(|f| preserves(f, p)))
        .collect();
    relations.sort_by(|a, b| a.labels().cmp(b.labels()));
    let names: Vec<String> = relations.iter().map(block_name).collect();
    let mut pairs = Vec::new();
    for (i, p) in relations.iter().enumerate() {
        for (j, q) in relations.iter().enumerate() {
            if p.refines(q) {
                pairs.push((i as u32, j as u32));
            }
        }
    }
    let report = FiniteLattice::validate(&names, &pairs, relations.len().max(1))
        .expect("congruence count within its own bound");
    let lattice = report
        .lattice
        .expect("congruences of a unary algebra form a 0-1 sublattice of Part");
    Ok(CongruenceLattice { relations, lattice })
}

fn block_name(rel: &EqRel) -> String {
    rel.blocks()
        .iter()
        .map(|b| b.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(""))
        .collect::<Vec<_>>()
        .join("|")
}

/// Does the self-map preserve the partition (x ~ y implies f(x) ~ f(y))?
pub fn preserves(map: &[u32], rel: &EqRel) -> bool {
    (0..rel.n() as u32).all(|x| {
        let rep = rel.label(x);
        rel.same(map[x as usize], map[rep as usize])
    })
}

/// Result of enumerating the endomorphisms of a relation family. When the
/// backtracking search finishes within budget the enumeration is complete;
/// otherwise `maps` is the subset found so far.
#[derive(Debug, Clone)]
pub struct Endomorphisms {
    pub maps: Vec<SelfMap>,
    pub complete: bool,
    pub visited: usize,
}

struct EndoSearcher<'a> {
    n: usize,
    /// distinct, constraint-bearing relations only
    rels: Vec<&'a EqRel>,
    /// per relation: image block label of each source block label (MAX = unset)
    block_img: Vec<Vec<u32>>,
    undo: Vec<(usize, u32)>,
    visited: usize,
    budget: usize,
}

impl<'a> EndoSearcher<'a> {
    fn new(n: usize, family: &'a [EqRel], budget: usize) -> Self {
        let mut seen: BTreeSet<&[u32]> = BTreeSet::new();
        let mut rels = Vec::new();
        for r in family {
            debug_assert_eq!(r.n(), n);
            // discrete and full relations constrain nothing
            if r.is_discrete() || r.is_full() {
                continue;
            }
            if seen.insert(r.labels()) {
                rels.push(r);
            }
        }
        let block_img = vec![vec![u32::MAX; n]; rels.len()];
        EndoSearcher { n, rels, block_img, undo: Vec::new(), visited: 0, budget }
    }

    /// Try f(node) = value; on success returns the undo watermark.
    fn assign(&mut self, node: u32, value: u32) -> Option<usize> {
        let mark = self.undo.len();
        for (ri, r) in self.rels.iter().enumerate() {
            let bsrc = r.label(node);
            let bdst = r.label(value);
            let slot = &mut self.block_img[ri][bsrc as usize];
            if *slot == u32::MAX {
                *slot = bdst;
                self.undo.push((ri, bsrc));
            } else if *slot != bdst {
                self.rollback(mark);
                return None;
            }
        }
        Some(mark)
    }

    fn rollback(&mut self, mark: usize) {
        while self.undo.len() > mark {
            let (ri, b) = self.undo.pop().unwrap();
            self.block_img[ri][b as usize] = u32::MAX;
        }
    }

    fn spend(&mut self) -> bool {
        self.visited += 1;
        self.visited <= self.budget
    }
}

/// Complete enumeration of all endomorphisms of the family within budget
/// (deterministic order: nodes by id, candidate images ascending).
pub fn enumerate_endomorphisms(n: usize, family: &[EqRel], budget: usize) -> Endomorphisms {
    let mut s = EndoSearcher::new(n, family, budget);
    let mut current = vec![0u32; n];
    let mut maps = Vec::new();
    let complete = enumerate_rec(&mut s, 0, &mut current, &mut maps);
    Endomorphisms { maps, complete, visited: s.visited }
}

fn enumerate_rec(
    s: &mut EndoSearcher,
    depth: usize,
    current: &mut [u32],
    out: &mut Vec<SelfMap>,
) -> bool {
    if depth == s.n {
        out.push(current.to_vec());
        return true;
    }
    for value in 0..s.n as u32 {
        if !s.spend() {
            return false;
        }
        if let Some(mark) = s.assign(depth as u32, value) {
            current[depth] = value;
            let ok = enumerate_rec(s, depth + 1, current, out);
            s.rollback(mark);
            if !ok {
                return false;
            }
        }
    }
    true
}

/// Outcome of a pinned endomorphism search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PinnedSearch {
    Found(SelfMap),
    /// The constrained space was exhausted: no such endomorphism exists.
    ExhaustedNone,
    /// Budget ran out before the space was exhausted.
    BudgetNone,
}

/// First endomorphism (in deterministic order) satisfying the pins, or a
/// definite/indefinite absence verdict.
pub fn find_endomorphism_pinned(
    n: usize,
    family: &[EqRel],
    pins: &[(u32, u32)],
    budget: usize,
) -> PinnedSearch {
    let mut s = EndoSearcher::new(n, family, budget);
    let mut current = vec![u32::MAX; n];
    for &(node, value) in pins {
        if node as usize >= n || value as usize >= n {
            return PinnedSearch::ExhaustedNone;
        }
        if current[node as usize] != u32::MAX {
            if current[node as usize] != value {
                return PinnedSearch::ExhaustedNone;
            }
            continue;
        }
        match s.assign(node, value) {
            Some(_) => current[node as usize] = value,
            None => return PinnedSearch::ExhaustedNone,
        }
    }
    let free: Vec<u32> = (0..n as u32).filter(|&x| current[x as usize] == u32::MAX).collect();
    match pinned_rec(&mut s, &free, 0, &mut current) {
        Some(true) => PinnedSearch::Found(current),
        Some(false) => PinnedSearch::ExhaustedNone,
        None => PinnedSearch::BudgetNone,
    }
}

fn pinned_rec(s: &mut EndoSearcher, free: &[u32], idx: usize, current: &mut Vec<u32>) -> Option<bool> {
    if idx == free.len() {
        return Some(true);
    }
    let node = free[idx];
    for value in 0..s.n as u32 {
        if !s.spend() {
            return None;
        }
        if let Some(mark) = s.assign(node, value) {
            current[node as usize] = value;
            match pinned_rec(s, free, idx + 1, current) {
                Some(true) => return Some(true),
                Some(false) => {}
                None => return None,
            }
            current[node as usize] = u32::MAX;
            s.rollback(mark);
        }
    }
    Some(false)
}

/// Principal congruence generated by (x, y): the equivalence generated by
/// all (f(x), f(y)) over the supplied endomorphisms. Exact only when the
/// enumeration was complete; otherwise a lower bound.
#[derive(Debug, Clone)]
pub struct PrincipalCongruence {
    pub rel: EqRel,
    pub exact: bool,
}

pub fn principal_congruence(
    n: usize,
    x: u32,
    y: u32,
    endos: &Endomorphisms,
) -> Result<PrincipalCongruence, AlgebraError> {
    for node in [x, y] {
        if node as usize >= n {
            return Err(AlgebraError::UnknownNode { node, carrier: n });
        }
    }
    let mut ds = DisjointSet::new(n);
    for f in &endos.maps {
        ds.union(f[x as usize], f[y as usize]);
    }
    Ok(PrincipalCongruence { rel: ds.into_eqrel(), exact: endos.complete })
}

/// Witness that (u, v) lies in the principal congruence of (x, y): a chain
/// z_0 = u, ..., z_{n+1} = v where each consecutive pair is the image of
/// {x, y} under a verified endomorphism.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomogeneityCertificate {
    pub x: u32,
    pub y: u32,
    pub u: u32,
    pub v: u32,
    /// z_0 .. z_{n+1} with z_0 = u and z_{n+1} = v.
    pub chain: Vec<u32>,
    /// maps f_0 .. f_n with {f_i(x), f_i(y)} = {z_i, z_{i+1}}.
    pub maps: Vec<SelfMap>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertificateError {
    #[error("chain must contain at least two entries")]
    ChainTooShort,
    #[error("certificate references node {node} outside the carrier 0..{carrier}")]
    NodeOutOfRange { node: u32, carrier: usize },
    #[error("chain endpoints ({got_u}, {got_v}) do not match the quadruple ({want_u}, {want_v})")]
    EndpointMismatch { got_u: u32, got_v: u32, want_u: u32, want_v: u32 },
    #[error("expected {links} maps for {links} chain links, got {maps}")]
    MapCountMismatch { links: usize, maps: usize },
    #[error("map {index} is not an endomorphism of the table")]
    NotAnEndomorphism { index: usize },
    #[error("map {index} sends {{x, y}} to {{{fx}, {fy}}}, not the chain link {{{zi}, {zj}}}")]
    LinkMismatch { index: usize, fx: u32, fy: u32, zi: u32, zj: u32 },
}

impl HomogeneityCertificate {
    /// Independent re-verification against the relation family; total on
    /// untrusted certificates.
    pub fn verify(&self, n: usize, family: &[EqRel]) -> Result<(), CertificateError> {
        if self.chain.len() < 2 {
            return Err(CertificateError::ChainTooShort);
        }
        for &node in [self.x, self.y, self.u, self.v].iter().chain(self.chain.iter()) {
            if node as usize >= n {
                return Err(CertificateError::NodeOutOfRange { node, carrier: n });
            }
        }
        for (i, f) in self.maps.iter().enumerate() {
            if f.len() != n || f.iter().any(|&v| v as usize >= n) {
                return Err(CertificateError::NotAnEndomorphism { index: i });
            }
        }
        let (got_u, got_v) = (self.chain[0], *self.chain.last().unwrap());
        if got_u != self.u || got_v != self.v {
            return Err(CertificateError::EndpointMismatch {
                got_u,
                got_v,
                want_u: self.u,
                want_v: self.v,
            });
        }
        let links = self.chain.len() - 1;
        if self.maps.len() != links {
            return Err(CertificateError::MapCountMismatch { links, maps: self.maps.len() });
        }
        for (i, f) in self.maps.iter().enumerate() {
            if !family.iter().all(|r| preserves(f, r)) {
                return Err(CertificateError::NotAnEndomorphism { index: i });
            }
            let (fx, fy) = (f[self.x as usize], f[self.y as usize]);
            let (zi, zj) = (self.chain[i], self.chain[i + 1]);
            let matches = (fx == zi && fy == zj) || (fx == zj && fy == zi);
            if !matches {
                return Err(CertificateError::LinkMismatch { index: i, fx, fy, zi, zj });
            }
        }
        Ok(())
    }

    /// Number of interior interpolants (the chain minus its endpoints).
    pub fn interpolant_count(&self) -> usize {
        self.chain.len() - 2
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InterpolantOutcome {
    Found(HomogeneityCertificate),
    /// Premise fails: some relation separates (u, v) while joining (x, y).
    PremiseFails { separating_relation: usize },
    /// Search space exhausted without a chain (definite absence).
    ExhaustedNotFound,
    /// Budget ran out first.
    BudgetExhausted,
}

/// Does (∀α)(x ∼_α y → u ∼_α v) hold over the family?
pub fn interpolant_premise(family: &[EqRel], x: u32, y: u32, u: u32, v: u32) -> Result<(), usize> {
    for (i, r) in family.iter().enumerate() {
        if r.same(x, y) && !r.same(u, v) {
            return Err(i);
        }
    }
    Ok(())
}

/// Breadth-first search for homogeneity interpolants: nodes reachable from
/// `u` via endomorphism images of {x, y}, ending at `v`. When a complete
/// endomorphism enumeration is supplied the edge queries are lookups;
/// otherwise each candidate edge is settled by a pinned backtracking search.
pub fn find_homogeneity_interpolants(
    n: usize,
    family: &[EqRel],
    x: u32,
    y: u32,
    u: u32,
    v: u32,
    budget: usize,
    endos: Option<&Endomorphisms>,
) -> InterpolantOutcome {
    if let Err(i) = interpolant_premise(family, x, y, u, v) {
        return InterpolantOutcome::PremiseFails { separating_relation: i };
    }
    // degenerate fast paths keep the certificates the obvious ones
    if u == v {
        let constant = vec![u; n];
        if family.iter().all(|r| preserves(&constant, r)) {
            return InterpolantOutcome::Found(HomogeneityCertificate {
                x,
                y,
                u,
                v,
                chain: vec![u, v],
                maps: vec![constant],
            });
        }
    }
    if (u, v) == (x, y) || (u, v) == (y, x) {
        return InterpolantOutcome::Found(HomogeneityCertificate {
            x,
            y,
            u,
            v,
            chain: vec![u, v],
            maps: vec![identity_map(n)],
        });
    }

    // exact edge oracle from a complete enumeration
    let lookup: Option<Vec<Option<&SelfMap>>> = endos.filter(|e| e.complete).map(|e| {
        let mut table: Vec<Option<&SelfMap>> = vec![None; n * n];
        for f in &e.maps {
            let (a, b) = (f[x as usize] as usize, f[y as usize] as usize);
            if table[a * n + b].is_none() {
                table[a * n + b] = Some(f);
            }
        }
        table
    });

    let mut parent: Vec<u32> = vec![u32::MAX; n];
    let mut parent_map: Vec<Option<SelfMap>> = vec![None; n];
    let mut queue = std::collections::VecDeque::new();
    let mut seen = vec![false; n];
    seen[u as usize] = true;
    queue.push_back(u);
    let mut spent = 0usize;
    let mut all_decisive = true;
    while let Some(w) = queue.pop_front() {
        for next in 0..n as u32 {
            if seen[next as usize] {
                continue;
            }
            let witness: Option<SelfMap> = match &lookup {
                Some(table) => {
                    let fwd = table[w as usize * n + next as usize];
                    let bwd = table[next as usize * n + w as usize];
                    fwd.or(bwd).cloned()
                }
                None => {
                    let mut found = None;
                    for pins in [[(x, w), (y, next)], [(x, next), (y, w)]] {
                        let remaining = budget.saturating_sub(spent);
                        if remaining == 0 {
                            return InterpolantOutcome::BudgetExhausted;
                        }
                        match find_endomorphism_pinned(n, family, &pins, remaining) {
                            PinnedSearch::Found(f) => {
                                spent += 1;
                                found = Some(f);
                                break;
                            }
                            PinnedSearch::ExhaustedNone => {
                                spent += 1;
                            }
                            PinnedSearch::BudgetNone => {
                                spent += 1;
                                all_decisive = false;
                            }
                        }
                    }
                    found
                }
            };
            if let Some(f) = witness {
                seen[next as usize] = true;
                parent[next as usize] = w;
                parent_map[next as usize] = Some(f);
                if next == v {
                    // reconstruct u -> v
                    let mut chain = vec![v];
                    let mut maps = Vec::new();
                    let mut cur = v;
                    while cur != u {
                        maps.push(parent_map[cur as usize].clone().unwrap());
                        cur = parent[cur as usize];
                        chain.push(cur);
                    }
                    chain.reverse();
                    maps.reverse();
                    return InterpolantOutcome::Found(HomogeneityCertificate {
                        x,
                        y,
                        u,
                        v,
                        chain,
                        maps,
                    });
                }
                queue.push_back(next);
            }
        }
    }
    if all_decisive {
        InterpolantOutcome::ExhaustedNotFound
    } else {
        InterpolantOutcome::BudgetExhausted
    }
}

/// Report of the Maltsev homogeneity check: for every quadruple satisfying
/// the interpolation premise, either a certificate chain exists, or a
/// counterexample is produced (sound only when the endomorphism knowledge is
/// exhaustive), or the verdict is unknown under the budget.
#[derive(Debug, Clone)]
pub struct MaltsevReport {
    pub verdict: Verdict,
    pub carrier: usize,
    pub premise_quadruples: u64,
    pub certified_quadruples: u64,
    pub counterexample: Option<[u32; 4]>,
    pub endos_complete: bool,
    pub sample_certificates: Vec<HomogeneityCertificate>,
}

pub const SAMPLE_CERTIFICATE_CAP: usize = 4;

pub fn check_maltsev(n: usize, family: &[EqRel], endo_budget: usize, query_budget: usize) -> MaltsevReport {
    let endos = enumerate_endomorphisms(n, family, endo_budget);
    let mut premise_quadruples = 0u64;
    let mut certified = 0u64;
    let mut counterexample = None;
    let mut unknown = false;
    let mut samples = Vec::new();

    'pairs: for x in 0..n as u32 {
        for y in x..n as u32 {
            let c = principal_equivalence(family, x, y).unwrap_or_else(|| EqRel::full(n));
            // reachability over realized images of {x, y}
            let mut ds = DisjointSet::new(n);
            let mut decisive = true;
            if endos.complete {
                for f in &endos.maps {
                    ds.union(f[x as usize], f[y as usize]);
                }
            } else {
                for a in 0..n as u32 {
                    for b in a + 1..n as u32 {
                        if ds.same(a, b) || !c.same(a, b) {
                            continue;
                        }
                        let mut related = false;
                        for pins in [[(x, a), (y, b)], [(x, b), (y, a)]] {
                            match find_endomorphism_pinned(n, family, &pins, query_budget) {
                                PinnedSearch::Found(_) => {
                                    related = true;
                                    break;
                                }
                                PinnedSearch::ExhaustedNone => {}
                                PinnedSearch::BudgetNone => decisive = false,
                            }
                        }
                        if related {
                            ds.union(a, b);
                        }
                    }
                }
            }
            let reach = ds.into_eqrel();
            // every premise pair (u, v) must be reachable
            for u in 0..n as u32 {
                for v in 0..n as u32 {
                    if !c.same(u, v) {
                        continue;
                    }
                    premise_quadruples += 1;
                    if u == v || reach.same(u, v) {
                        certified += 1;
                        if samples.len() < SAMPLE_CERTIFICATE_CAP && u != v && (u, v) != (x, y) {
                            if let InterpolantOutcome::Found(cert) = find_homogeneity_interpolants(
                                n,
                                family,
                                x,
                                y,
                                u,
                                v,
                                query_budget,
                                Some(&endos).filter(|e| e.complete),
                            ) {
                                samples.push(cert);
                            }
                        }
                    } else if decisive || endos.complete {
                        counterexample = Some([x, y, u, v]);
                        break 'pairs;
                    } else {
                        unknown = true;
                    }
                }
            }
        }
    }

    let verdict = if counterexample.is_some() {
        Verdict::Refuted
    } else if unknown {
        Verdict::Unknown
    } else {
        Verdict::Verified
    };
    MaltsevReport {
        verdict,
        carrier: n,
        premise_quadruples,
        certified_quadruples: certified,
        counterexample,
        endos_complete: endos.complete,
        sample_certificates: samples,
    }
}

/// One case of the randomized dual-congruence-table suite.
#[derive(Debug, Clone)]
pub struct DualConCase {
    pub carrier: usize,
    pub generators: Vec<SelfMap>,
    pub congruence_count: usize,
    pub verdict: Verdict,
    pub endos_complete: bool,
}

#[derive(Debug, Clone)]
pub struct DualConSuiteReport {
    pub cases: Vec<DualConCase>,
    pub verified: usize,
    pub verdict: Verdict,
}

/// Seeded sweep: random composition-closed unary algebras (at most two
/// generators, identity adjoined), each dual congruence table checked for
/// Maltsev homogeneity with complete endomorphism enumeration.
pub fn dual_congruence_suite(
    count: usize,
    seed: u64,
    max_carrier: usize,
    endo_budget: usize,
    query_budget: usize,
) -> DualConSuiteReport {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::with_capacity(count);
    let mut verified = 0usize;
    let mut overall = Verdict::Verified;
    for _ in 0..count {
        let n = rng.random_range(2..=max_carrier.max(2));
        let gen_count = rng.random_range(1..=2usize);
        let generators: Vec<SelfMap> = (0..gen_count)
            .map(|_| (0..n).map(|_| rng.random_range(0..n as u32)).collect())
            .collect();
        let algebra = UnaryAlgebra::from_generators(n, &generators, n.pow(n as u32).max(64))
            .expect("closure of maps on a small carrier fits its own bound")
            .with_identity();
        let con = congruence_lattice(&algebra).expect("carrier within the exhaustive bound");
        let report = check_maltsev(n, &con.relations, endo_budget, query_budget);
        if report.verdict == Verdict::Verified && report.endos_complete {
            verified += 1;
        }
        overall = overall.and(report.verdict);
        if !report.endos_complete {
            overall = overall.and(Verdict::Unknown);
        }
        cases.push(DualConCase {
            carrier: n,
            generators,
            congruence_count: con.relations.len(),
            verdict: report.verdict,
            endos_complete: report.endos_complete,
        });
    }
    DualConSuiteReport { cases, verified, verdict: overall }
}

/// Regenerate the exact dual tables the suite inspected (same seed, same
/// order), for callers that need the relation families themselves.
pub fn dual_congruence_tables(count: usize, seed: u64, max_carrier: usize) -> Vec<(usize, Vec<EqRel>)> {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let n = rng.random_range(2..=max_carrier.max(2));
        let gen_count = rng.random_range(1..=2usize);
        let generators: Vec<SelfMap> = (0..gen_count)
            .map(|_| (0..n).map(|_| rng.random_range(0..n as u32)).collect())
            .collect();
        let algebra = UnaryAlgebra::from_generators(n, &generators, n.pow(n as u32).max(64))
            .expect("closure of maps on a small carrier fits its own bound")
            .with_identity();
        let con = congruence_lattice(&algebra).expect("carrier within the exhaustive bound");
        out.push((n, con.relations));
    }
    out
}
