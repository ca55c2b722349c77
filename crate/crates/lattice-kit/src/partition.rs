//! Equivalence relations on finite carriers and the partition lattice Part(X).
//!
//! An [`EqRel`] is stored in canonical form: every node is labeled by the
//! smallest node of its block. Equality, refinement, join (transitive closure
//! of the union) and meet (blockwise intersection) all work directly on the
//! label vector, which keeps the connectivity computations that dominate the
//! graph pipeline allocation-light.

use thiserror::Error;

/// Node index inside a carrier `0..n`.
pub type Node = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("carrier mismatch: left has {left} nodes, right has {right}")]
    CarrierMismatch { left: usize, right: usize },
    #[error("node {node} outside carrier 0..{carrier}")]
    UnknownNode { node: Node, carrier: usize },
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct DisjointSet {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (big, small) = if self.size[ra as usize] >= self.size[rb as usize] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small as usize] = big;
        self.size[big as usize] += self.size[small as usize];
        true
    }

    pub fn same(&mut self, a: u32, b: u32) -> bool {
        self.find(a) == self.find(b)
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Collapse into the canonical minimum-element labeling.
    pub fn into_eqrel(mut self) -> EqRel {
        let n = self.parent.len();
        let mut label_of_root = vec![u32::MAX; n];
        let mut labels = vec![0u32; n];
        for x in 0..n as u32 {
            let r = self.find(x);
            if label_of_root[r as usize] == u32::MAX {
                label_of_root[r as usize] = x; // first visit in ascending order = block minimum
            }
            labels[x as usize] = label_of_root[r as usize];
        }
        EqRel { labels }
    }
}

/// Result of comparing two partitions as sets of ordered pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartCmp {
    Equal,
    /// Strictly finer: every block of the left is contained in a block of the right.
    Finer,
    /// Strictly coarser.
    Coarser,
    Incomparable,
}

/// Equivalence relation on `0..n`, canonical minimum-element block labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EqRel {
    labels: Vec<u32>,
}

impl EqRel {
    pub fn discrete(n: usize) -> Self {
        EqRel {
            labels: (0..n as u32).collect(),
        }
    }

    pub fn full(n: usize) -> Self {
        EqRel { labels: vec![0; n] }
    }

    /// Equivalence generated by the given pairs.
    pub fn from_pairs(n: usize, pairs: &[(Node, Node)]) -> Result<Self, PartitionError> {
        let mut ds = DisjointSet::new(n);
        for &(a, b) in pairs {
            for x in [a, b] {
                if x as usize >= n {
                    return Err(PartitionError::UnknownNode { node: x, carrier: n });
                }
            }
            ds.union(a, b);
        }
        Ok(ds.into_eqrel())
    }

    /// Build from an arbitrary block-label assignment (relabels canonically).
    pub fn from_raw_labels(raw: &[u32]) -> Self {
        let n = raw.len();
        let mut canon: Vec<u32> = vec![u32::MAX; n];
        let mut first = std::collections::HashMap::new();
        for x in 0..n {
            let entry = first.entry(raw[x]).or_insert(x as u32);
            canon[x] = *entry;
        }
        EqRel { labels: canon }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn same(&self, a: Node, b: Node) -> bool {
        self.labels[a as usize] == self.labels[b as usize]
    }

    /// Canonical label (block minimum) of a node.
    pub fn label(&self, a: Node) -> Node {
        self.labels[a as usize]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn is_discrete(&self) -> bool {
        self.labels.iter().enumerate().all(|(i, &l)| l == i as u32)
    }

    pub fn is_full(&self) -> bool {
        self.labels.iter().all(|&l| l == 0)
    }

    pub fn block_count(&self) -> usize {
        self.labels
            .iter()
            .enumerate()
            .filter(|&(i, &l)| l == i as u32)
            .count()
    }

    /// Sorted list of sorted blocks (the serialization form).
    pub fn blocks(&self) -> Vec<Vec<Node>> {
        let mut blocks: std::collections::BTreeMap<u32, Vec<u32>> = Default::default();
        for (x, &l) in self.labels.iter().enumerate() {
            blocks.entry(l).or_default().push(x as u32);
        }
        blocks.into_values().collect()
    }

    fn check_same_carrier(&self, other: &EqRel) -> Result<(), PartitionError> {
        if self.n() != other.n() {
            return Err(PartitionError::CarrierMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        Ok(())
    }

    /// Finest common coarsening: transitive closure of the union.
    pub fn join(&self, other: &EqRel) -> Result<EqRel, PartitionError> {
        self.check_same_carrier(other)?;
        let mut ds = DisjointSet::new(self.n());
        for x in 0..self.n() as u32 {
            ds.union(x, self.labels[x as usize]);
            ds.union(x, other.labels[x as usize]);
        }
        Ok(ds.into_eqrel())
    }

    /// Blockwise intersection.
    pub fn meet(&self, other: &EqRel) -> Result<EqRel, PartitionError> {
        self.check_same_carrier(other)?;
        let n = self.n();
        let mut canon = vec![u32::MAX; n];
        let mut first = std::collections::HashMap::new();
        for x in 0..n {
            let key = (self.labels[x], other.labels[x]);
            let entry = first.entry(key).or_insert(x as u32);
            canon[x] = *entry;
        }
        Ok(EqRel { labels: canon })
    }

    /// Deterministic fold of `join` over many relations.
    pub fn join_all<'a>(
        n: usize,
        rels: impl IntoIterator<Item = &'a EqRel>,
    ) -> Result<EqRel, PartitionError> {
        let mut acc = EqRel::discrete(n);
        for r in rels {
            acc = acc.join(r)?;
        }
        Ok(acc)
    }

    pub fn meet_all<'a>(
        n: usize,
        rels: impl IntoIterator<Item = &'a EqRel>,
    ) -> Result<EqRel, PartitionError> {
        let mut acc = EqRel::full(n);
        for r in rels {
            acc = acc.meet(r)?;
        }
        Ok(acc)
    }

    /// Is `self` a refinement of `other` (self ⊆ other as pair sets)?
    pub fn refines(&self, other: &EqRel) -> bool {
        debug_assert_eq!(self.n(), other.n());
        self.labels
            .iter()
            .enumerate()
            .all(|(x, &l)| other.labels[x] == other.labels[l as usize])
    }

    pub fn compare(&self, other: &EqRel) -> Result<PartCmp, PartitionError> {
        self.check_same_carrier(other)?;
        let fine = self.refines(other);
        let coarse = other.refines(self);
        Ok(match (fine, coarse) {
            (true, true) => PartCmp::Equal,
            (true, false) => PartCmp::Finer,
            (false, true) => PartCmp::Coarser,
            (false, false) => PartCmp::Incomparable,
        })
    }

    /// Restriction to a subset of the carrier, reindexed by position in `keep`.
    /// `keep` must be strictly increasing.
    pub fn restrict(&self, keep: &[Node]) -> Result<EqRel, PartitionError> {
        for &x in keep {
            if x as usize >= self.n() {
                return Err(PartitionError::UnknownNode {
                    node: x,
                    carrier: self.n(),
                });
            }
        }
        let raw: Vec<u32> = keep.iter().map(|&x| self.labels[x as usize]).collect();
        Ok(EqRel::from_raw_labels(&raw))
    }
}

/// Intersection of all members of the family containing the pair `(x, y)`:
/// the principal equivalence generated by the pair. Returns `None` when no
/// member contains the pair (cannot happen for families containing the full
/// relation).
pub fn principal_equivalence(rels: &[EqRel], x: Node, y: Node) -> Option<EqRel> {
    let containing: Vec<&EqRel> = rels.iter().filter(|r| r.same(x, y)).collect();
    if containing.is_empty() {
        return None;
    }
    let n = containing[0].n();
    let mut acc = EqRel::full(n);
    for r in containing {
        acc = acc.meet(r).expect("uniform carrier");
    }
    Some(acc)
}

/// All partitions of `0..n` in restricted-growth-string order.
pub fn all_partitions(n: usize) -> Vec<EqRel> {
    let mut out = Vec::new();
    let mut rgs = vec![0u32; n];
    loop {
        out.push(EqRel::from_raw_labels(&rgs));
        // next restricted growth string
        let mut i = n;
        loop {
            if i == 0 || i == 1 {
                return out;
            }
            i -= 1;
            let max_prefix = rgs[..i].iter().copied().max().unwrap_or(0);
            if rgs[i] <= max_prefix {
                rgs[i] += 1;
                for v in rgs[i + 1..].iter_mut() {
                    *v = 0;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(n: usize, pairs: &[(u32, u32)]) -> EqRel {
        EqRel::from_pairs(n, pairs).unwrap()
    }

    #[test]
    fn join_meet_units() {
        let p = rel(4, &[(0, 1)]);
        assert_eq!(p.join(&EqRel::discrete(4)).unwrap(), p);
        assert_eq!(p.meet(&EqRel::full(4)).unwrap(), p);
        assert_eq!(p.join(&p).unwrap(), p);
    }

    #[test]
    fn crossing_pairs_join_full_meet_discrete() {
        // {12|34} and {23|14} on four nodes
        let p = rel(4, &[(0, 1), (2, 3)]);
        let q = rel(4, &[(1, 2), (3, 0)]);
        assert!(p.join(&q).unwrap().is_full());
        assert!(p.meet(&q).unwrap().is_discrete());
    }

    #[test]
    fn compare_extremes() {
        let p = rel(3, &[(0, 1)]);
        assert_eq!(EqRel::discrete(3).compare(&p).unwrap(), PartCmp::Finer);
        assert_eq!(EqRel::full(3).compare(&p).unwrap(), PartCmp::Coarser);
        assert_eq!(p.compare(&p).unwrap(), PartCmp::Equal);
        // {12|3} vs {13|2}
        let q = rel(3, &[(0, 2)]);
        assert_eq!(p.compare(&q).unwrap(), PartCmp::Incomparable);
    }

    #[test]
    fn carrier_mismatch_rejected() {
        let p = EqRel::discrete(3);
        let q = EqRel::discrete(4);
        assert!(matches!(
            p.join(&q),
            Err(PartitionError::CarrierMismatch { .. })
        ));
    }

    #[test]
    fn principal_equivalence_diagonal_is_finest_member() {
        let fam = vec![EqRel::discrete(3), rel(3, &[(0, 1)]), EqRel::full(3)];
        // (x, x) is in every member, so the result is the meet of the family
        let c = principal_equivalence(&fam, 2, 2).unwrap();
        assert!(c.is_discrete());
    }

    #[test]
    fn principal_equivalence_offdiagonal() {
        let fam = vec![EqRel::discrete(4), EqRel::full(4)];
        let c = principal_equivalence(&fam, 0, 2).unwrap();
        assert!(c.is_full());
    }

    #[test]
    fn partition_counts_are_bell_numbers() {
        assert_eq!(all_partitions(1).len(), 1);
        assert_eq!(all_partitions(3).len(), 5);
        assert_eq!(all_partitions(5).len(), 52);
        assert_eq!(all_partitions(7).len(), 877);
    }

    #[test]
    fn restrict_reindexes() {
        let p = rel(5, &[(0, 3), (1, 4)]);
        let r = p.restrict(&[0, 3, 4]).unwrap();
        assert!(r.same(0, 1)); // old 0 and 3
        assert!(!r.same(0, 2)); // old 0 and 4
    }

    fn arb_rel_triple(max_n: usize) -> impl Strategy<Value = (EqRel, EqRel, EqRel)> {
        (1..=max_n).prop_flat_map(move |n| {
            let raw = || prop::collection::vec(0u32..(max_n as u32), n);
            (raw(), raw(), raw()).prop_map(|(a, b, c)| {
                (
                    EqRel::from_raw_labels(&a),
                    EqRel::from_raw_labels(&b),
                    EqRel::from_raw_labels(&c),
                )
            })
        })
    }

    proptest! {
        #[test]
        fn join_commutes((p, q, _) in arb_rel_triple(7)) {
            prop_assert_eq!(p.join(&q).unwrap(), q.join(&p).unwrap());
            prop_assert_eq!(p.meet(&q).unwrap(), q.meet(&p).unwrap());
        }

        #[test]
        fn join_assoc_and_absorption((p, q, r) in arb_rel_triple(7)) {
            let jl = p.join(&q).unwrap().join(&r).unwrap();
            let jr = p.join(&q.join(&r).unwrap()).unwrap();
            prop_assert_eq!(jl, jr);
            let ml = p.meet(&q).unwrap().meet(&r).unwrap();
            let mr = p.meet(&q.meet(&r).unwrap()).unwrap();
            prop_assert_eq!(ml, mr);
            prop_assert_eq!(p.join(&p.meet(&q).unwrap()).unwrap(), p.clone());
            prop_assert_eq!(p.meet(&p.join(&q).unwrap()).unwrap(), p.clone());
        }

        #[test]
        fn join_is_least_upper_bound((p, q, r) in arb_rel_triple(6)) {
            let j = p.join(&q).unwrap();
            prop_assert!(p.refines(&j) && q.refines(&j));
            if p.refines(&r) && q.refines(&r) {
                prop_assert!(j.refines(&r));
            }
            let m = p.meet(&q).unwrap();
            prop_assert!(m.refines(&p) && m.refines(&q));
            if r.refines(&p) && r.refines(&q) {
                prop_assert!(r.refines(&m));
            }
        }
    }
}
