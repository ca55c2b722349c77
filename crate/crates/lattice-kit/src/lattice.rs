//! Finite bounded lattices, (0,1,∨)-homomorphisms, Galois adjoints, and
//! direct limits of lattice systems.
//!
//! Element ids are dense integers; display names are carried separately so
//! join/meet stay O(1) table lookups.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Element id inside a lattice (an index into the element table).
pub type Elem = u32;

/// Default cap on table materialization; quadratic tables stay small.
pub const DEFAULT_SIZE_BOUND: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("candidate has {n} elements, exceeding the size bound {bound}")]
    SizeBound { n: usize, bound: usize },
    #[error("unknown element id {elem} (lattice has {n} elements)")]
    UnknownElement { elem: Elem, n: usize },
    #[error("leq pair ({a}, {b}) references an element outside 0..{n}")]
    PairOutOfRange { a: Elem, b: Elem, n: usize },
    #[error("candidate is not a lattice: {0}")]
    NotALattice(String),
}

/// A single failed lattice axiom with its witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum AxiomFailure {
    /// a ≤ b and b ≤ a for distinct a, b after transitive closure.
    Antisymmetry { a: Elem, b: Elem },
    /// No least upper bound: the minimal common upper bounds are listed.
    NoJoin { a: Elem, b: Elem, minimal_uppers: Vec<Elem> },
    /// No greatest lower bound.
    NoMeet { a: Elem, b: Elem, maximal_lowers: Vec<Elem> },
    NoBottom,
    NoTop,
}

impl std::fmt::Display for AxiomFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AxiomFailure::Antisymmetry { a, b } => {
                write!(f, "antisymmetry fails: {a} <= {b} and {b} <= {a}")
            }
            AxiomFailure::NoJoin { a, b, minimal_uppers } => {
                write!(f, "no least upper bound of ({a}, {b}); minimal uppers {minimal_uppers:?}")
            }
            AxiomFailure::NoMeet { a, b, maximal_lowers } => {
                write!(f, "no greatest lower bound of ({a}, {b}); maximal lowers {maximal_lowers:?}")
            }
            AxiomFailure::NoBottom => write!(f, "no least element"),
            AxiomFailure::NoTop => write!(f, "no greatest element"),
        }
    }
}

/// Outcome of validating a candidate order as a bounded lattice.
#[derive(Debug)]
pub struct ValidationReport {
    pub failures: Vec<AxiomFailure>,
    pub lattice: Option<FiniteLattice>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Bounded finite lattice with materialized join/meet tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteLattice {
    names: Vec<String>,
    leq: Vec<bool>,
    join: Vec<u32>,
    meet: Vec<u32>,
    bottom: Elem,
    top: Elem,
}

impl FiniteLattice {
    /// Validate `leq_pairs` (reflexive pairs optional, closure taken) over
    /// `names.len()` elements. On success the report carries the lattice with
    /// join/meet tables materialized.
    pub fn validate(names: &[String], leq_pairs: &[(Elem, Elem)], size_bound: usize) -> Result<ValidationReport, LatticeError> {
        let n = names.len();
        if n > size_bound {
            return Err(LatticeError::SizeBound { n, bound: size_bound });
        }
        if n == 0 {
            return Ok(ValidationReport {
                failures: vec![AxiomFailure::NoBottom, AxiomFailure::NoTop],
                lattice: None,
            });
        }
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for &(a, b) in leq_pairs {
            if (a as usize) >= n || (b as usize) >= n {
                return Err(LatticeError::PairOutOfRange { a, b, n });
            }
            leq[a as usize * n + b as usize] = true;
        }
        // transitive closure
        for k in 0..n {
            for i in 0..n {
                if leq[i * n + k] {
                    for j in 0..n {
                        if leq[k * n + j] {
                            leq[i * n + j] = true;
                        }
                    }
                }
            }
        }

        let mut failures = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if leq[a * n + b] && leq[b * n + a] {
                    failures.push(AxiomFailure::Antisymmetry { a: a as u32, b: b as u32 });
                }
            }
        }
        if !failures.is_empty() {
            return Ok(ValidationReport { failures, lattice: None });
        }

        let le = |a: usize, b: usize| leq[a * n + b];
        let mut join = vec![0u32; n * n];
        let mut meet = vec![0u32; n * n];
        for a in 0..n {
            for b in a..n {
                let uppers: Vec<usize> = (0..n).filter(|&u| le(a, u) && le(b, u)).collect();
                let minimal: Vec<u32> = uppers
                    .iter()
                    .copied()
                    .filter(|&u| uppers.iter().all(|&v| !le(v, u) || v == u))
                    .map(|u| u as u32)
                    .collect();
                match least_of(&uppers, &le) {
                    Some(j) => {
                        join[a * n + b] = j as u32;
                        join[b * n + a] = j as u32;
                    }
                    None => failures.push(AxiomFailure::NoJoin {
                        a: a as u32,
                        b: b as u32,
                        minimal_uppers: minimal,
                    }),
                }
                let lowers: Vec<usize> = (0..n).filter(|&u| le(u, a) && le(u, b)).collect();
                let maximal: Vec<u32> = lowers
                    .iter()
                    .copied()
                    .filter(|&u| lowers.iter().all(|&v| !le(u, v) || v == u))
                    .map(|u| u as u32)
                    .collect();
                match greatest_of(&lowers, &le) {
                    Some(m) => {
                        meet[a * n + b] = m as u32;
                        meet[b * n + a] = m as u32;
                    }
                    None => failures.push(AxiomFailure::NoMeet {
                        a: a as u32,
                        b: b as u32,
                        maximal_lowers: maximal,
                    }),
                }
            }
        }
        let bottom = (0..n).find(|&b| (0..n).all(|x| le(b, x)));
        let top = (0..n).find(|&t| (0..n).all(|x| le(x, t)));
        if bottom.is_none() {
            failures.push(AxiomFailure::NoBottom);
        }
        if top.is_none() {
            failures.push(AxiomFailure::NoTop);
        }
        if !failures.is_empty() {
            return Ok(ValidationReport { failures, lattice: None });
        }
        let lattice = FiniteLattice {
            names: names.to_vec(),
            leq,
            join,
            meet,
            bottom: bottom.unwrap() as u32,
            top: top.unwrap() as u32,
        };
        debug_assert!(lattice.absorption_holds());
        Ok(ValidationReport { failures, lattice: Some(lattice) })
    }

    /// Shorthand used by the catalog and tests: panic on invalid input.
    pub fn from_cover_pairs(names: &[&str], pairs: &[(Elem, Elem)]) -> FiniteLattice {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let report = FiniteLattice::validate(&names, pairs, DEFAULT_SIZE_BOUND)
            .expect("within size bound");
        match report.lattice {
            Some(l) => l,
            None => panic!("not a lattice: {:?}", report.failures),
        }
    }

    fn absorption_holds(&self) -> bool {
        let n = self.n();
        (0..n as u32).all(|a| {
            (0..n as u32).all(|b| {
                self.join(a, self.meet(a, b)) == a
                    && self.meet(a, self.join(a, b)) == a
                    && self.join(a, a) == a
                    && self.meet(a, a) == a
            })
        })
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, a: Elem) -> &str {
        &self.names[a as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn element_by_name(&self, name: &str) -> Option<Elem> {
        self.names.iter().position(|n| n == name).map(|i| i as u32)
    }

    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.leq[a as usize * self.n() + b as usize]
    }

    pub fn lt(&self, a: Elem, b: Elem) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        self.join[a as usize * self.n() + b as usize]
    }

    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        self.meet[a as usize * self.n() + b as usize]
    }

    /// Join and meet of a pair, straight table lookups.
    pub fn bounds(&self, a: Elem, b: Elem) -> Result<(Elem, Elem), LatticeError> {
        let n = self.n();
        for x in [a, b] {
            if x as usize >= n {
                return Err(LatticeError::UnknownElement { elem: x, n });
            }
        }
        Ok((self.join(a, b), self.meet(a, b)))
    }

    pub fn join_of_set(&self, elems: impl IntoIterator<Item = Elem>) -> Elem {
        elems.into_iter().fold(self.bottom, |acc, e| self.join(acc, e))
    }

    pub fn meet_of_set(&self, elems: impl IntoIterator<Item = Elem>) -> Elem {
        elems.into_iter().fold(self.top, |acc, e| self.meet(acc, e))
    }

    pub fn bottom(&self) -> Elem {
        self.bottom
    }

    pub fn top(&self) -> Elem {
        self.top
    }

    pub fn is_nontrivial(&self) -> bool {
        self.bottom != self.top
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.n() as u32
    }

    /// All ordered pairs (a, b) with a ≤ b, sorted; reflexive pairs included.
    pub fn leq_pairs(&self) -> Vec<(Elem, Elem)> {
        let mut out = Vec::new();
        for a in self.elements() {
            for b in self.elements() {
                if self.leq(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// Built-in test lattices covering the distributive/modular/non-modular range.
pub mod catalog {
    use super::FiniteLattice;

    pub const NAMES: [&str; 6] = ["2", "3-chain", "4-chain", "M3", "N5", "B2"];

    /// Two-element chain 0 < 1.
    pub fn two() -> FiniteLattice {
        FiniteLattice::from_cover_pairs(&["0", "1"], &[(0, 1)])
    }

    /// 0 < m < 1.
    pub fn three_chain() -> FiniteLattice {
        FiniteLattice::from_cover_pairs(&["0", "m", "1"], &[(0, 1), (1, 2)])
    }

    /// 0 < m1 < m2 < 1.
    pub fn four_chain() -> FiniteLattice {
        FiniteLattice::from_cover_pairs(&["0", "m1", "m2", "1"], &[(0, 1), (1, 2), (2, 3)])
    }

    /// Diamond: bottom, three atoms, top.
    pub fn m3() -> FiniteLattice {
        FiniteLattice::from_cover_pairs(
            &["0", "a", "b", "c", "1"],
            &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)],
        )
    }

    /// Pentagon: 0 < a < c < 1 and 0 < b < 1 with b incomparable to a, c.
    pub fn n5() -> FiniteLattice {
        FiniteLattice::from_cover_pairs(
            &["0", "a", "b", "c", "1"],
            &[(0, 1), (0, 2), (1, 3), (3, 4), (2, 4)],
        )
    }

    /// 2x2 Boolean lattice.
    pub fn b2() -> FiniteLattice {
        FiniteLattice::from_cover_pairs(&["0", "a", "b", "1"], &[(0, 1), (0, 2), (1, 3), (2, 3)])
    }

    pub fn by_name(name: &str) -> Option<FiniteLattice> {
        match name {
            "2" => Some(two()),
            "3-chain" => Some(three_chain()),
            "4-chain" => Some(four_chain()),
            "M3" => Some(m3()),
            "N5" => Some(n5()),
            "B2" => Some(b2()),
            _ => None,
        }
    }

    pub fn all() -> Vec<(&'static str, FiniteLattice)> {
        NAMES.iter().map(|&n| (n, by_name(n).unwrap())).collect()
    }
}

fn least_of(set: &[usize], le: &impl Fn(usize, usize) -> bool) -> Option<usize> {
    set.iter().copied().find(|&m| set.iter().all(|&x| le(m, x)))
}

fn greatest_of(set: &[usize], le: &impl Fn(usize, usize) -> bool) -> Option<usize> {
    set.iter().copied().find(|&m| set.iter().all(|&x| le(x, m)))
}

/// First violated (0,1,∨)-homomorphism equation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum HomViolation {
    BottomNotPreserved { image: Elem },
    TopNotPreserved { image: Elem },
    JoinNotPreserved { a: Elem, b: Elem, image_of_join: Elem, join_of_images: Elem },
    MapNotTotal { expected: usize, got: usize },
    ImageOutOfRange { a: Elem, image: Elem },
}

impl std::fmt::Display for HomViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HomViolation::BottomNotPreserved { image } => write!(f, "0 maps to {image}, not 0"),
            HomViolation::TopNotPreserved { image } => write!(f, "1 maps to {image}, not 1"),
            HomViolation::JoinNotPreserved { a, b, image_of_join, join_of_images } => write!(
                f,
                "join of ({a}, {b}) not preserved: image of join is {image_of_join}, join of images is {join_of_images}"
            ),
            HomViolation::MapNotTotal { expected, got } => {
                write!(f, "map has {got} entries for {expected} elements")
            }
            HomViolation::ImageOutOfRange { a, image } => {
                write!(f, "image {image} of {a} outside target")
            }
        }
    }
}

/// Verdict of checking a candidate map as a (0,1,∨)-homomorphism, with the
/// first violated equation as witness and the number of equations checked.
#[derive(Debug, Clone)]
pub struct HomReport {
    pub violation: Option<HomViolation>,
    pub equations_checked: usize,
}

impl HomReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

pub fn check_usl_hom(map: &[Elem], source: &FiniteLattice, target: &FiniteLattice) -> HomReport {
    let mut equations = 0usize;
    if map.len() != source.n() {
        return HomReport {
            violation: Some(HomViolation::MapNotTotal { expected: source.n(), got: map.len() }),
            equations_checked: equations,
        };
    }
    for a in source.elements() {
        if map[a as usize] as usize >= target.n() {
            return HomReport {
                violation: Some(HomViolation::ImageOutOfRange { a, image: map[a as usize] }),
                equations_checked: equations,
            };
        }
    }
    equations += 1;
    if map[source.bottom() as usize] != target.bottom() {
        return HomReport {
            violation: Some(HomViolation::BottomNotPreserved { image: map[source.bottom() as usize] }),
            equations_checked: equations,
        };
    }
    equations += 1;
    if map[source.top() as usize] != target.top() {
        return HomReport {
            violation: Some(HomViolation::TopNotPreserved { image: map[source.top() as usize] }),
            equations_checked: equations,
        };
    }
    for a in source.elements() {
        for b in source.elements() {
            equations += 1;
            let image_of_join = map[source.join(a, b) as usize];
            let join_of_images = target.join(map[a as usize], map[b as usize]);
            if image_of_join != join_of_images {
                return HomReport {
                    violation: Some(HomViolation::JoinNotPreserved { a, b, image_of_join, join_of_images }),
                    equations_checked: equations,
                };
            }
        }
    }
    HomReport { violation: None, equations_checked: equations }
}

/// A validated (0,1,∨)-homomorphism between finite lattices.
#[derive(Debug, Clone, PartialEq)]
pub struct UslHom {
    source: FiniteLattice,
    target: FiniteLattice,
    map: Vec<Elem>,
}

impl UslHom {
    pub fn new(source: &FiniteLattice, target: &FiniteLattice, map: Vec<Elem>) -> Result<Self, HomViolation> {
        let report = check_usl_hom(&map, source, target);
        match report.violation {
            Some(v) => Err(v),
            None => Ok(UslHom { source: source.clone(), target: target.clone(), map }),
        }
    }

    pub fn identity(l: &FiniteLattice) -> Self {
        UslHom {
            source: l.clone(),
            target: l.clone(),
            map: l.elements().collect(),
        }
    }

    pub fn source(&self) -> &FiniteLattice {
        &self.source
    }

    pub fn target(&self) -> &FiniteLattice {
        &self.target
    }

    pub fn map(&self) -> &[Elem] {
        &self.map
    }

    pub fn apply(&self, a: Elem) -> Elem {
        self.map[a as usize]
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target.n()];
        self.map.iter().all(|&v| !std::mem::replace(&mut seen[v as usize], true))
    }

    /// Galois adjoint φ*: target → source, φ*β = ⋁{α | φα ≤ β}.
    ///
    /// The four adjoint laws are theorems for a validated hom, so a failed
    /// check here means the hom invariant was broken and we abort loudly.
    pub fn galois_adjoint(&self) -> GaloisAdjoint {
        let map: Vec<Elem> = self
            .target
            .elements()
            .map(|beta| {
                self.source.join_of_set(
                    self.source.elements().filter(|&alpha| self.target.leq(self.apply(alpha), beta)),
                )
            })
            .collect();
        let adj = GaloisAdjoint { map };
        // (∧,1)-homomorphism
        assert_eq!(
            adj.apply(self.target.top()),
            self.source.top(),
            "internal error: adjoint does not preserve 1"
        );
        for b1 in self.target.elements() {
            for b2 in self.target.elements() {
                assert_eq!(
                    adj.apply(self.target.meet(b1, b2)),
                    self.source.meet(adj.apply(b1), adj.apply(b2)),
                    "internal error: adjoint does not preserve the meet of ({b1}, {b2})"
                );
            }
        }
        // beta < 1 implies adjoint(beta) < 1
        for beta in self.target.elements() {
            if beta != self.target.top() {
                assert_ne!(
                    adj.apply(beta),
                    self.source.top(),
                    "internal error: adjoint sends non-top {beta} to top"
                );
            }
        }
        // injective on the image of the hom
        for a1 in self.source.elements() {
            for a2 in self.source.elements() {
                if self.apply(a1) != self.apply(a2) {
                    assert_ne!(
                        adj.apply(self.apply(a1)),
                        adj.apply(self.apply(a2)),
                        "internal error: adjoint collapses image elements"
                    );
                }
            }
        }
        // alpha <= adj(beta) iff adj(phi(alpha)) <= adj(beta)
        for alpha in self.source.elements() {
            for beta in self.target.elements() {
                assert_eq!(
                    self.source.leq(alpha, adj.apply(beta)),
                    self.source.leq(adj.apply(self.apply(alpha)), adj.apply(beta)),
                    "internal error: adjoint exchange law fails at ({alpha}, {beta})"
                );
            }
        }
        adj
    }
}

/// φ*: target → source of a (0,1,∨)-homomorphism; a (∧,1)-homomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisAdjoint {
    map: Vec<Elem>,
}

impl GaloisAdjoint {
    pub fn apply(&self, beta: Elem) -> Elem {
        self.map[beta as usize]
    }

    pub fn map(&self) -> &[Elem] {
        &self.map
    }
}

/// Every (0,1,∨)-homomorphism from `source` to `target`, by brute force over
/// all total maps. Catalog lattices have at most five elements, so the space
/// stays tiny.
pub fn enumerate_usl_homs(source: &FiniteLattice, target: &FiniteLattice) -> Vec<UslHom> {
    let n = source.n();
    let m = target.n();
    let mut out = Vec::new();
    let mut map = vec![0u32; n];
    loop {
        if check_usl_hom(&map, source, target).passed() {
            out.push(UslHom {
                source: source.clone(),
                target: target.clone(),
                map: map.clone(),
            });
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            map[i] += 1;
            if (map[i] as usize) < m {
                break;
            }
            map[i] = 0;
            i += 1;
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum LimitError {
    #[error("hom {index} in the system is invalid: {violation}")]
    InvalidHom { index: usize, violation: HomViolation },
    #[error("system must contain at least one lattice")]
    Empty,
    #[error("hom {index} does not connect lattice {index} to lattice {next}", next = index + 1)]
    ChainMismatch { index: usize },
}

/// A finite chain L0 → L1 → ... → Lk of lattices and (0,1,∨)-homomorphisms.
/// Carriers are kept disjoint by construction: each level owns its elements.
#[derive(Debug, Clone)]
pub struct DirectLimitSystem {
    pub lattices: Vec<FiniteLattice>,
    pub homs: Vec<Vec<Elem>>,
}

impl DirectLimitSystem {
    pub fn new(lattices: Vec<FiniteLattice>, homs: Vec<Vec<Elem>>) -> Result<Self, LimitError> {
        if lattices.is_empty() {
            return Err(LimitError::Empty);
        }
        if homs.len() + 1 != lattices.len() {
            return Err(LimitError::ChainMismatch { index: homs.len() });
        }
        for (i, h) in homs.iter().enumerate() {
            let report = check_usl_hom(h, &lattices[i], &lattices[i + 1]);
            if let Some(v) = report.violation {
                return Err(LimitError::InvalidHom { index: i, violation: v });
            }
        }
        Ok(DirectLimitSystem { lattices, homs })
    }

    pub fn cutoff(&self) -> usize {
        self.lattices.len() - 1
    }
}

/// The direct limit of a finite system: the quotient of the tagged disjoint
/// union by a ≈ φ_i(a). Every ≈-class contains exactly one element of the
/// final lattice, so the limit is represented concretely as the cutoff
/// lattice together with the composed canonical maps into it. This is the
/// exact limit whenever the system is constant beyond the cutoff.
#[derive(Debug, Clone)]
pub struct DirectLimit {
    pub limit: FiniteLattice,
    /// canonical[i][a] = image of element a of lattice i in the limit.
    pub canonical: Vec<Vec<Elem>>,
}

pub fn direct_limit(system: &DirectLimitSystem) -> DirectLimit {
    let k = system.cutoff();
    let mut canonical: Vec<Vec<Elem>> = Vec::with_capacity(k + 1);
    for i in 0..=k {
        let mut map: Vec<Elem> = system.lattices[i].elements().collect();
        for h in &system.homs[i..] {
            map = map.iter().map(|&a| h[a as usize]).collect();
        }
        canonical.push(map);
    }
    DirectLimit {
        limit: system.lattices[k].clone(),
        canonical,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force oracle: a pair has a join iff the set of common upper
    /// bounds has a unique minimal element (dually for meets).
    fn oracle_is_lattice(n: usize, leq: &dyn Fn(usize, usize) -> bool) -> bool {
        for a in 0..n {
            for b in 0..n {
                let uppers: Vec<usize> = (0..n).filter(|&u| leq(a, u) && leq(b, u)).collect();
                if !uppers.iter().any(|&m| uppers.iter().all(|&x| leq(m, x))) {
                    return false;
                }
                let lowers: Vec<usize> = (0..n).filter(|&u| leq(u, a) && leq(u, b)).collect();
                if !lowers.iter().any(|&m| lowers.iter().all(|&x| leq(x, m))) {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn two_chain_is_valid() {
        let names = vec!["0".to_string(), "1".to_string()];
        let report = FiniteLattice::validate(&names, &[(0, 1)], 64).unwrap();
        assert!(report.is_valid());
        let l = report.lattice.unwrap();
        assert!(l.is_nontrivial());
        assert_eq!(l.bottom(), 0);
        assert_eq!(l.top(), 1);
    }

    #[test]
    fn incomparable_atoms_and_coatoms_fail() {
        // two atoms a, b below two co-atoms c, d: the atoms have no least
        // upper bound (c and d are both minimal uppers)
        let names: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        let report =
            FiniteLattice::validate(&names, &[(0, 2), (0, 3), (1, 2), (1, 3)], 64).unwrap();
        assert!(!report.is_valid());
        assert!(report
            .failures
            .iter()
            .any(|f| matches!(f, AxiomFailure::NoJoin { a: 0, b: 1, .. })));
    }

    #[test]
    fn m3_valid_by_exhaustive_check() {
        let l = catalog::m3();
        assert_eq!(l.n(), 5);
        // oracle over all 25 pairs
        assert!(oracle_is_lattice(5, &|a, b| l.leq(a as u32, b as u32)));
    }

    #[test]
    fn validator_agrees_with_bruteforce_oracle_on_posets() {
        // all antisymmetric transitive orders on 4 elements reachable from a
        // seeded set of cover-pair choices
        let pair_space: Vec<(u32, u32)> =
            (0..4).flat_map(|a| (0..4).filter(move |&b| b != a).map(move |b| (a, b))).collect();
        for mask in 0u32..(1 << pair_space.len().min(12)) {
            let pairs: Vec<(u32, u32)> = pair_space
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &p)| p)
                .collect();
            let names: Vec<String> = (0..4).map(|i| format!("e{i}")).collect();
            let report = FiniteLattice::validate(&names, &pairs, 64).unwrap();
            // reconstruct the closed relation for the oracle
            let mut leq = vec![false; 16];
            for i in 0..4 {
                leq[i * 4 + i] = true;
            }
            for &(a, b) in &pairs {
                leq[a as usize * 4 + b as usize] = true;
            }
            for k in 0..4 {
                for i in 0..4 {
                    for j in 0..4 {
                        if leq[i * 4 + k] && leq[k * 4 + j] {
                            leq[i * 4 + j] = true;
                        }
                    }
                }
            }
            let antisym = (0..4).all(|a| (0..4).all(|b| a == b || !(leq[a * 4 + b] && leq[b * 4 + a])));
            let expected = antisym && oracle_is_lattice(4, &|a, b| leq[a * 4 + b]);
            assert_eq!(report.is_valid(), expected, "pairs {pairs:?}");
        }
    }

    #[test]
    fn bounds_in_n5() {
        let l = catalog::n5();
        let a = l.element_by_name("a").unwrap();
        let b = l.element_by_name("b").unwrap();
        let x = l.element_by_name("c").unwrap();
        assert_eq!(l.bounds(a, b).unwrap(), (l.top(), l.bottom()));
        assert_eq!(l.bounds(b, x).unwrap(), (l.top(), l.bottom()));
        assert_eq!(l.bounds(l.bottom(), a).unwrap(), (a, l.bottom()));
        assert_eq!(l.bounds(a, a).unwrap(), (a, a));
        assert!(l.bounds(9, 0).is_err());
    }

    #[test]
    fn hom_checks() {
        let m3 = catalog::m3();
        let id = UslHom::identity(&m3);
        assert!(check_usl_hom(id.map(), &m3, &m3).passed());

        let two = catalog::two();
        let n5 = catalog::n5();
        let report = check_usl_hom(&[0, n5.top()], &two, &n5);
        assert!(report.passed());

        let three = catalog::three_chain();
        let report = check_usl_hom(&[0, 1], &two, &three);
        assert_eq!(report.violation, Some(HomViolation::TopNotPreserved { image: 1 }));
    }

    #[test]
    fn adjoint_of_identity() {
        let l = catalog::b2();
        let id = UslHom::identity(&l);
        let adj = id.galois_adjoint();
        assert_eq!(adj.map(), &[0, 1, 2, 3]);
    }

    #[test]
    fn adjoint_two_into_three_chain() {
        let two = catalog::two();
        let three = catalog::three_chain();
        let phi = UslHom::new(&two, &three, vec![0, 2]).unwrap();
        let adj = phi.galois_adjoint();
        // direct evaluation of the defining join: 0 and m pull back to 0, 1 to 1
        assert_eq!(adj.apply(0), 0);
        assert_eq!(adj.apply(1), 0);
        assert_eq!(adj.apply(2), 1);
        // injective on the image {0, 1} of the 2-chain
        assert_ne!(adj.apply(phi.apply(0)), adj.apply(phi.apply(1)));
    }

    #[test]
    fn adjunction_law_exhaustive_on_catalog() {
        for (_, l0) in catalog::all() {
            for (_, l1) in catalog::all() {
                for hom in enumerate_usl_homs(&l0, &l1) {
                    let adj = hom.galois_adjoint();
                    for alpha in l0.elements() {
                        for beta in l1.elements() {
                            assert_eq!(
                                l0.leq(alpha, adj.apply(beta)),
                                l1.leq(hom.apply(alpha), beta)
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn direct_limit_of_identities() {
        let two = catalog::two();
        let sys = DirectLimitSystem::new(
            vec![two.clone(), two.clone(), two.clone()],
            vec![vec![0, 1], vec![0, 1]],
        )
        .unwrap();
        let lim = direct_limit(&sys);
        assert_eq!(lim.limit, two);
        assert_eq!(lim.canonical, vec![vec![0, 1], vec![0, 1], vec![0, 1]]);
    }

    #[test]
    fn direct_limit_composes_canonical_maps() {
        let two = catalog::two();
        let three = catalog::three_chain();
        let sys = DirectLimitSystem::new(vec![two, three.clone()], vec![vec![0, 2]]).unwrap();
        let lim = direct_limit(&sys);
        assert_eq!(lim.limit, three);
        assert_eq!(lim.canonical[0], vec![0, 2]);
        assert_eq!(lim.canonical[1], vec![0, 1, 2]);
    }

    #[test]
    fn direct_limit_identifies_collapsed_elements() {
        // B2 → 2 collapsing both atoms onto distinct ends: a ↦ 0, b ↦ 1
        let b2 = catalog::b2();
        let two = catalog::two();
        let sys = DirectLimitSystem::new(vec![b2, two], vec![vec![0, 0, 1, 1]]).unwrap();
        let lim = direct_limit(&sys);
        // 0 and a are identified, b and 1 are identified
        assert_eq!(lim.canonical[0][0], lim.canonical[0][1]);
        assert_eq!(lim.canonical[0][2], lim.canonical[0][3]);
        assert_ne!(lim.canonical[0][0], lim.canonical[0][2]);
    }

    #[test]
    fn invalid_hom_rejected_by_system() {
        let two = catalog::two();
        let three = catalog::three_chain();
        let err = DirectLimitSystem::new(vec![two, three], vec![vec![0, 1]]).unwrap_err();
        assert!(matches!(err, LimitError::InvalidHom { index: 0, .. }));
    }
}
