//! The height-three coding lattice L(U), Slaman-Woodin and Shore predicate
//! checks, scrambled enumeration-order presentations, and the decoders that
//! recover the g-sequence and the coded set from positive facts only.
//!
//! A finite truncation with N g-atoms is built: the general object carries
//! infinitely many, so the Shore links and the a_n/b_n co-atoms exist only
//! where their indices stay in range. The decoders consult nothing but the
//! join table and the enumerated ≤-facts.

use crate::lattice::{Elem, FiniteLattice};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodingError {
    #[error("need at least one g-atom")]
    EmptyTruncation,
    #[error("coded set member {member} outside 0..{n}")]
    MemberOutOfRange { member: usize, n: usize },
    #[error("construction invariant failed: {0}")]
    ConstructionInvalid(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecodeError {
    #[error("no candidate satisfies the positive formula at step {step} (corrupt presentation or count out of range)")]
    NoCandidate { step: usize },
    #[error("formula at step {step} has {count} candidates; the presentation is corrupt")]
    Ambiguous { step: usize, count: usize },
    #[error("g-sequence exceeds the element count {limit}; the presentation is corrupt")]
    SequenceTooLong { limit: usize },
}

/// Element ids of the distinguished elements inside the built lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedIds {
    pub zero: Elem,
    pub one: Elem,
    pub p: Elem,
    pub s: Elem,
    pub e0: Elem,
    pub e1: Elem,
    pub f0: Elem,
    pub f1: Elem,
    pub g: Vec<Elem>,
    pub a: Vec<Elem>,
    pub b: Vec<Elem>,
    pub c: BTreeMap<usize, Elem>,
}

/// The coding lattice: U is recovered by which g-atoms satisfy g ∨ s = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CodedLattice {
    pub lattice: FiniteLattice,
    pub n_atoms: usize,
    pub u_set: BTreeSet<usize>,
    pub ids: CodedIds,
}

/// Build L(U) truncated to `n` g-atoms and verify every structural
/// invariant before returning; failures indicate a construction bug and
/// are never silent.
///
/// Cover structure: a_n = e1 ∨ g_{2n} covers {e1, g_{2n}, g_{2n+1}},
/// b_n = e0 ∨ g_{2n+1} covers {e0, g_{2n+1}, g_{2n+2}} (indices in range),
/// f0 covers the even-indexed g's, f1 the odd-indexed ones, g_i ∨ s is the
/// co-atom c_i exactly when i is not in U, q is fixed to 1, and p is an
/// atom comparable only to the bounds.
pub fn build_coded_lattice(u_set: &BTreeSet<usize>, n: usize) -> Result<CodedLattice, CodingError> {
    if n == 0 {
        return Err(CodingError::EmptyTruncation);
    }
    if let Some(&m) = u_set.iter().find(|&&m| m >= n) {
        return Err(CodingError::MemberOutOfRange { member: m, n });
    }

    let mut names: Vec<String> = Vec::new();
    let push = |names: &mut Vec<String>, s: String| -> Elem {
        names.push(s);
        (names.len() - 1) as Elem
    };
    let zero = push(&mut names, "0".into());
    let one = push(&mut names, "1".into());
    let p = push(&mut names, "p".into());
    let s_atom = push(&mut names, "s".into());
    let e0 = push(&mut names, "e0".into());
    let e1 = push(&mut names, "e1".into());
    let g: Vec<Elem> = (0..n).map(|i| push(&mut names, format!("g{i}"))).collect();
    let f0 = push(&mut names, "f0".into());
    let f1 = push(&mut names, "f1".into());
    let a: Vec<Elem> = (0..n.div_ceil(2))
        .map(|i| push(&mut names, format!("a{i}")))
        .collect();
    let b: Vec<Elem> = (0..n / 2).map(|i| push(&mut names, format!("b{i}"))).collect();
    let mut c = BTreeMap::new();
    for i in 0..n {
        if !u_set.contains(&i) {
            c.insert(i, push(&mut names, format!("c{i}")));
        }
    }

    let mut pairs: Vec<(Elem, Elem)> = Vec::new();
    for x in 0..names.len() as Elem {
        if x != zero {
            pairs.push((zero, x));
        }
        if x != one {
            pairs.push((x, one));
        }
    }
    for (i, &an) in a.iter().enumerate() {
        pairs.push((e1, an));
        pairs.push((g[2 * i], an));
        if 2 * i + 1 < n {
            pairs.push((g[2 * i + 1], an));
        }
    }
    for (i, &bn) in b.iter().enumerate() {
        pairs.push((e0, bn));
        pairs.push((g[2 * i + 1], bn));
        if 2 * i + 2 < n {
            pairs.push((g[2 * i + 2], bn));
        }
    }
    for (i, &gi) in g.iter().enumerate() {
        if i % 2 == 0 {
            pairs.push((gi, f0));
        } else {
            pairs.push((gi, f1));
        }
    }
    for (&i, &ci) in &c {
        pairs.push((g[i], ci));
        pairs.push((s_atom, ci));
    }

    let report = FiniteLattice::validate(&names, &pairs, names.len())
        .map_err(|e| CodingError::ConstructionInvalid(e.to_string()))?;
    let lattice = match report.lattice {
        Some(l) => l,
        None => {
            return Err(CodingError::ConstructionInvalid(format!(
                "candidate order failed lattice validation: {:?}",
                report.failures
            )))
        }
    };

    let ids = CodedIds { zero, one, p, s: s_atom, e0, e1, f0, f1, g, a, b, c };
    let coded = CodedLattice { lattice, n_atoms: n, u_set: u_set.clone(), ids };
    verify_coded_invariants(&coded)?;
    Ok(coded)
}

fn verify_coded_invariants(coded: &CodedLattice) -> Result<(), CodingError> {
    let l = &coded.lattice;
    let ids = &coded.ids;
    let fail = |msg: String| Err(CodingError::ConstructionInvalid(msg));

    // height three
    for x in l.elements() {
        if x == ids.zero || x == ids.one {
            continue;
        }
        let is_atom = l.elements().all(|y| !l.lt(y, x) || y == ids.zero);
        let is_coatom = l.elements().all(|y| !l.lt(x, y) || y == ids.one);
        if !is_atom && !is_coatom {
            return fail(format!("element {} is neither atom nor co-atom", l.name(x)));
        }
    }
    // the coding equation: i in U iff g_i ∨ s = 1
    for i in 0..coded.n_atoms {
        let in_u = coded.u_set.contains(&i);
        let join = l.join(ids.g[i], ids.s);
        if in_u != (join == ids.one) {
            return fail(format!("coding equation fails at index {i}"));
        }
    }
    // Shore links hold for the canonical sequence
    let shore = check_shore_sequence(l, &ids.g, ids.e0, ids.e1, ids.f0, ids.f1);
    if !shore.holds {
        return fail(format!("Shore sequence fails: {:?}", shore.witness));
    }
    // the g's are a Slaman-Woodin set for p with q = 1
    let sw = check_sw_set(l, &ids.g, ids.p, ids.one);
    if !sw.holds {
        return fail(format!("Slaman-Woodin condition fails: {:?}", sw.witness));
    }
    // p touches only the bounds
    for x in l.elements() {
        if x != ids.zero && x != ids.one && x != ids.p && (l.leq(x, ids.p) || l.leq(ids.p, x)) {
            return fail(format!("p is comparable to {}", l.name(x)));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SwWitness {
    /// g ∨ p fails to reach q
    JoinTooSmall { g: Elem },
    /// some y < g already satisfies y ∨ p ≥ q
    SmallerWitness { g: Elem, y: Elem },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwReport {
    pub holds: bool,
    pub witness: Option<SwWitness>,
}

/// Slaman-Woodin condition: every member g satisfies g ∨ p ≥ q while no
/// strictly smaller element does. The empty set holds vacuously.
pub fn check_sw_set(l: &FiniteLattice, members: &[Elem], p: Elem, q: Elem) -> SwReport {
    for &g in members {
        if !l.leq(q, l.join(g, p)) {
            return SwReport { holds: false, witness: Some(SwWitness::JoinTooSmall { g }) };
        }
        for y in l.elements() {
            if l.lt(y, g) && l.leq(q, l.join(y, p)) {
                return SwReport { holds: false, witness: Some(SwWitness::SmallerWitness { g, y }) };
            }
        }
    }
    SwReport { holds: true, witness: None }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShoreReport {
    pub holds: bool,
    /// (index i, which equation) where the link fails
    pub witness: Option<(usize, &'static str)>,
}

/// Shore links: g_{2i+1} = (g_{2i} ∨ e1) ∧ f1 and
/// g_{2i+2} = (g_{2i+1} ∨ e0) ∧ f0 for all in-range indices.
pub fn check_shore_sequence(
    l: &FiniteLattice,
    seq: &[Elem],
    e0: Elem,
    e1: Elem,
    f0: Elem,
    f1: Elem,
) -> ShoreReport {
    for i in 0.. {
        if 2 * i + 1 < seq.len() {
            let expect = l.meet(l.join(seq[2 * i], e1), f1);
            if seq[2 * i + 1] != expect {
                return ShoreReport { holds: false, witness: Some((i, "odd")) };
            }
        } else {
            break;
        }
        if 2 * i + 2 < seq.len() {
            let expect = l.meet(l.join(seq[2 * i + 1], e0), f0);
            if seq[2 * i + 2] != expect {
                return ShoreReport { holds: false, witness: Some((i, "even")) };
            }
        }
    }
    ShoreReport { holds: true, witness: None }
}

/// Ids of the distinguished elements inside a presentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Landmarks {
    pub p: u32,
    pub q: u32,
    pub e0: u32,
    pub e1: u32,
    pub f0: u32,
    pub f1: u32,
    pub g0: u32,
    pub s: u32,
}

/// Ground truth kept out of the serialized form and away from decoders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HiddenTruth {
    /// original element id -> presented id
    pub perm: Vec<u32>,
    /// presented ids of g_0 .. g_{N-1}
    pub g_ids: Vec<u32>,
    pub u_set: BTreeSet<usize>,
}

/// A relabeled copy of the lattice whose order facts are available only as
/// an enumerated stream plus a join table: the positive-access discipline
/// the decoders are held to.
#[derive(Debug, Clone, PartialEq)]
pub struct Presentation {
    pub n: usize,
    pub joins: Vec<Vec<u32>>,
    pub leq_facts: Vec<(u32, u32)>,
    pub landmarks: Landmarks,
    pub seed: u64,
    hidden: Option<HiddenTruth>,
}

impl Presentation {
    pub fn new(
        n: usize,
        joins: Vec<Vec<u32>>,
        leq_facts: Vec<(u32, u32)>,
        landmarks: Landmarks,
        seed: u64,
    ) -> Self {
        Presentation { n, joins, leq_facts, landmarks, seed, hidden: None }
    }

    /// Ground truth for tests and truth-aware tooling; decoders never see it.
    pub fn hidden(&self) -> Option<&HiddenTruth> {
        self.hidden.as_ref()
    }

    /// The positive-facts-only interface handed to decoders.
    pub fn view(&self) -> PresentationView<'_> {
        PresentationView {
            n: self.n,
            joins: &self.joins,
            leq_facts: &self.leq_facts,
            landmarks: self.landmarks,
        }
    }
}

/// Restricted access: join lookups and the enumerated ≤-facts. No meet
/// table, no negation oracle.
#[derive(Debug, Clone, Copy)]
pub struct PresentationView<'a> {
    pub n: usize,
    joins: &'a [Vec<u32>],
    leq_facts: &'a [(u32, u32)],
    pub landmarks: Landmarks,
}

impl<'a> PresentationView<'a> {
    pub fn join(&self, a: u32, b: u32) -> u32 {
        self.joins[a as usize][b as usize]
    }

    pub fn leq_facts(&self) -> &'a [(u32, u32)] {
        self.leq_facts
    }
}

/// Seeded permutation of the element ids plus a seeded shuffle of the
/// ≤-fact enumeration; landmarks are translated and the inverse permutation
/// retained as hidden ground truth.
pub fn scramble(coded: &CodedLattice, seed: u64) -> Presentation {
    let l = &coded.lattice;
    let n = l.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<u32> = (0..n as u32).collect();
    perm.shuffle(&mut rng);

    let mut joins = vec![vec![0u32; n]; n];
    for a in 0..n as u32 {
        for b in 0..n as u32 {
            joins[perm[a as usize] as usize][perm[b as usize] as usize] = perm[l.join(a, b) as usize];
        }
    }
    let mut facts: Vec<(u32, u32)> = Vec::new();
    for a in 0..n as u32 {
        for b in 0..n as u32 {
            if l.leq(a, b) {
                facts.push((perm[a as usize], perm[b as usize]));
            }
        }
    }
    facts.shuffle(&mut rng);

    let ids = &coded.ids;
    let landmarks = Landmarks {
        p: perm[ids.p as usize],
        q: perm[ids.one as usize],
        e0: perm[ids.e0 as usize],
        e1: perm[ids.e1 as usize],
        f0: perm[ids.f0 as usize],
        f1: perm[ids.f1 as usize],
        g0: perm[ids.g[0] as usize],
        s: perm[ids.s as usize],
    };
    let g_ids: Vec<u32> = ids.g.iter().map(|&g| perm[g as usize]).collect();
    Presentation {
        n,
        joins,
        leq_facts: facts,
        landmarks,
        seed,
        hidden: Some(HiddenTruth { perm, g_ids, u_set: coded.u_set.clone() }),
    }
}

fn fact_set(view: &PresentationView) -> HashSet<(u32, u32)> {
    view.leq_facts().iter().copied().collect()
}

/// One Shore step: the unique y with y ≤ x ∨ e, y ≤ f, and y ∨ p ≥ q,
/// scanning candidates against the positive facts only.
fn decode_step(
    view: &PresentationView,
    facts: &HashSet<(u32, u32)>,
    x: u32,
    e: u32,
    f: u32,
    step: usize,
) -> Result<u32, DecodeError> {
    let lm = view.landmarks;
    let upper = view.join(x, e);
    let mut found: Vec<u32> = Vec::new();
    for y in 0..view.n as u32 {
        if facts.contains(&(y, upper))
            && facts.contains(&(y, f))
            && facts.contains(&(lm.q, view.join(y, lm.p)))
        {
            found.push(y);
        }
    }
    match found.len() {
        0 => Err(DecodeError::NoCandidate { step }),
        1 => Ok(found[0]),
        k => Err(DecodeError::Ambiguous { step, count: k }),
    }
}

/// Recover presented ids of g_0 .. g_{count-1}, starting from the g_0
/// landmark and following the Shore links.
pub fn decode_g_sequence(view: &PresentationView, count: usize) -> Result<Vec<u32>, DecodeError> {
    let facts = fact_set(view);
    let lm = view.landmarks;
    let mut out = vec![lm.g0];
    while out.len() < count {
        let step = out.len();
        let x = *out.last().unwrap();
        let y = if step % 2 == 1 {
            decode_step(view, &facts, x, lm.e1, lm.f1, step)?
        } else {
            decode_step(view, &facts, x, lm.e0, lm.f0, step)?
        };
        out.push(y);
    }
    Ok(out)
}

/// Follow the Shore links until the positive formula runs dry: the
/// truncation length is discovered rather than given.
pub fn decode_all_gs(view: &PresentationView) -> Result<Vec<u32>, DecodeError> {
    let facts = fact_set(view);
    let lm = view.landmarks;
    let mut out = vec![lm.g0];
    loop {
        let step = out.len();
        if step > view.n {
            // a truthful presentation has at most n distinct g-atoms
            return Err(DecodeError::SequenceTooLong { limit: view.n });
        }
        let x = *out.last().unwrap();
        let attempt = if step % 2 == 1 {
            decode_step(view, &facts, x, lm.e1, lm.f1, step)
        } else {
            decode_step(view, &facts, x, lm.e0, lm.f0, step)
        };
        match attempt {
            Ok(y) => out.push(y),
            Err(DecodeError::NoCandidate { .. }) => return Ok(out),
            Err(e) => return Err(e),
        }
    }
}

/// Decode the coded set: indices whose g-atom joins with s to the top,
/// tested through the positive facts.
pub fn decode_u(view: &PresentationView) -> Result<BTreeSet<usize>, DecodeError> {
    let gs = decode_all_gs(view)?;
    let facts = fact_set(view);
    let lm = view.landmarks;
    let mut u = BTreeSet::new();
    for (i, &g) in gs.iter().enumerate() {
        if facts.contains(&(lm.q, view.join(g, lm.s))) {
            u.insert(i);
        }
    }
    Ok(u)
}
