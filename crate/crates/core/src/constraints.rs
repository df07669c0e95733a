//! Triplet constraints `pq|s`: "merge p and q before s joins them".
//!
//! Includes the rooted-subtree to triplet conversion, the Aho et al. `BUILD`
//! consistency test, and contraction of a cluster into supernodes so that every
//! cut of the contracted graph respects the active constraints.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::error::{HcError, Result};
use crate::graph::WeightedGraph;
use crate::tree::ClusterTree;

/// `p q | s` with `p < q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TripletConstraint {
    pub p: usize,
    pub q: usize,
    pub s: usize,
}

impl TripletConstraint {
    pub fn new(p: usize, q: usize, s: usize) -> Result<Self> {
        if p == q || p == s || q == s {
            return Err(HcError::InvalidConstraint(format!(
                "endpoints must be distinct, got {p} {q} | {s}"
            )));
        }
        Ok(Self { p: p.min(q), q: p.max(q), s })
    }

    pub fn vertices(&self) -> [usize; 3] {
        [self.p, self.q, self.s]
    }

    pub fn base(&self) -> (usize, usize) {
        (self.p, self.q)
    }
}

impl fmt::Display for TripletConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} | {}", self.p, self.q, self.s)
    }
}

/// Ordered set of distinct triplet constraints with nonnegative base costs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConstraintSet {
    items: Vec<TripletConstraint>,
    costs: Vec<f64>,
}

impl ConstraintSet {
    /// All base costs default to 1.
    pub fn from_triplets<I: IntoIterator<Item = TripletConstraint>>(triplets: I) -> Result<Self> {
        Self::with_costs(triplets.into_iter().map(|t| (t, 1.0)))
    }

    pub fn with_costs<I: IntoIterator<Item = (TripletConstraint, f64)>>(items: I) -> Result<Self> {
        let mut cs = Self::default();
        for (t, c) in items {
            cs.push(t, c)?;
        }
        Ok(cs)
    }

    /// Convenience for literals: `[(p, q, s), ...]`.
    pub fn from_tuples(items: &[(usize, usize, usize)]) -> Result<Self> {
        let triplets = items
            .iter()
            .map(|&(p, q, s)| TripletConstraint::new(p, q, s))
            .collect::<Result<Vec<_>>>()?;
        Self::from_triplets(triplets)
    }

    pub fn push(&mut self, t: TripletConstraint, cost: f64) -> Result<()> {
        if !cost.is_finite() || cost < 0.0 {
            return Err(HcError::InvalidConstraint(format!(
                "base cost of {t} must be >= 0, got {cost}"
            )));
        }
        if self.items.contains(&t) {
            return Err(HcError::InvalidConstraint(format!("duplicate constraint {t}")));
        }
        self.items.push(t);
        self.costs.push(cost);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &TripletConstraint> + '_ {
        self.items.iter()
    }

    pub fn iter_with_costs(&self) -> impl Iterator<Item = (&TripletConstraint, f64)> + '_ {
        self.items.iter().zip(self.costs.iter().copied())
    }

    pub fn as_slice(&self) -> &[TripletConstraint] {
        &self.items
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    /// Largest vertex id mentioned, if any.
    pub fn max_vertex(&self) -> Option<usize> {
        self.items.iter().flat_map(|t| t.vertices()).max()
    }

    pub fn check_vertices(&self, n: usize) -> Result<()> {
        match self.max_vertex() {
            Some(v) if v >= n => Err(HcError::VertexOutOfRange { vertex: v, n }),
            _ => Ok(()),
        }
    }
}

/// Small union-find used for Aho components.
struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Constraints with all three endpoints inside `cluster`.
pub fn active_constraints(cluster: &[usize], cs: &ConstraintSet) -> ConstraintSet {
    let members: HashSet<usize> = cluster.iter().copied().collect();
    let mut out = ConstraintSet::default();
    for (t, c) in cs.iter_with_costs() {
        if t.vertices().iter().all(|v| members.contains(v)) {
            out.items.push(*t);
            out.costs.push(c);
        }
    }
    out
}

/// Components of the Aho graph (edge `p–q` per constraint) over `cluster`,
/// sorted internally and ordered by smallest vertex.
fn aho_components(cluster: &[usize], active: &[TripletConstraint]) -> Vec<Vec<usize>> {
    let mut sorted = cluster.to_vec();
    sorted.sort_unstable();
    let local = |v: usize| sorted.binary_search(&v).ok();
    let mut dsu = DisjointSet::new(sorted.len());
    for t in active {
        if let (Some(a), Some(b)) = (local(t.p), local(t.q)) {
            dsu.union(a, b);
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_group = vec![usize::MAX; sorted.len()];
    for (i, &v) in sorted.iter().enumerate() {
        let r = dsu.find(i);
        if root_group[r] == usize::MAX {
            root_group[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_group[r]].push(v);
    }
    groups
}

/// Outcome of [`build`].
#[derive(Debug, Clone, PartialEq)]
pub enum BuildOutcome {
    Feasible(ClusterTree),
    /// The Aho graph of `cluster` was connected.
    Infeasible { cluster: Vec<usize> },
}

impl BuildOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, BuildOutcome::Feasible(_))
    }

    pub fn into_tree(self) -> Result<ClusterTree> {
        match self {
            BuildOutcome::Feasible(t) => Ok(t),
            BuildOutcome::Infeasible { cluster } => Err(HcError::Infeasible { cluster }),
        }
    }
}

/// Aho et al. `BUILD`: decides whether the constraints admit a tree on `vertices`
/// and returns one. Multiway splits are binarized left-deep, components ordered
/// by their smallest vertex.
pub fn build(vertices: &[usize], cs: &ConstraintSet) -> BuildOutcome {
    fn rec(cluster: Vec<usize>, cs: &[TripletConstraint]) -> std::result::Result<ClusterTree, Vec<usize>> {
        if cluster.len() == 1 {
            return Ok(ClusterTree::leaf(cluster[0]));
        }
        let members: HashSet<usize> = cluster.iter().copied().collect();
        let active: Vec<TripletConstraint> = cs
            .iter()
            .filter(|t| t.vertices().iter().all(|v| members.contains(v)))
            .copied()
            .collect();
        let comps = aho_components(&cluster, &active);
        if comps.len() == 1 {
            return Err(cluster);
        }
        let mut parts = comps.into_iter().map(|c| rec(c, &active));
        let first = parts.next().expect("at least two components")?;
        parts.try_fold(first, |acc, sub| {
            Ok(ClusterTree::join(acc, sub?).expect("components are disjoint"))
        })
    }
    let mut set: Vec<usize> = vertices.to_vec();
    set.sort_unstable();
    set.dedup();
    if set.is_empty() {
        return BuildOutcome::Infeasible { cluster: set };
    }
    match rec(set, cs.as_slice()) {
        Ok(t) => BuildOutcome::Feasible(t),
        Err(cluster) => BuildOutcome::Infeasible { cluster },
    }
}

/// True iff `s` lies under the lowest common ancestor of `p` and `q`.
pub fn is_violated(tree: &ClusterTree, c: &TripletConstraint) -> Result<bool> {
    let lca = tree.lca(c.p, c.q)?;
    Ok(tree.is_ancestor(lca, tree.require_leaf(c.s)?))
}

/// Number of constraints violated by `tree`.
pub fn count_violations(tree: &ClusterTree, cs: &ConstraintSet) -> Result<usize> {
    let mut count = 0;
    for c in cs.iter() {
        if is_violated(tree, c)? {
            count += 1;
        }
    }
    Ok(count)
}

/// True iff splitting `cluster` into `side` and the rest keeps every active pair together.
pub fn feasible_cut(cluster: &[usize], side: &[usize], cs: &ConstraintSet) -> bool {
    let members: HashSet<usize> = cluster.iter().copied().collect();
    let left: HashSet<usize> = side.iter().copied().collect();
    cs.iter()
        .filter(|t| t.vertices().iter().all(|v| members.contains(v)))
        .all(|t| left.contains(&t.p) == left.contains(&t.q))
}

/// All triplets `pq|s` displayed by `tree`: `lca(p,q)` strictly below `lca(p,s)`.
pub fn induced_triplets(tree: &ClusterTree) -> BTreeSet<TripletConstraint> {
    let leaves = tree.leaves();
    let mut out = BTreeSet::new();
    for (i, &p) in leaves.iter().enumerate() {
        for &q in &leaves[i + 1..] {
            let pq = tree.lca(p, q).expect("leaf of tree");
            for &s in &leaves {
                if s == p || s == q {
                    continue;
                }
                if !tree.is_ancestor(pq, tree.leaf_node(s).expect("leaf of tree")) {
                    out.insert(TripletConstraint::new(p, q, s).expect("distinct"));
                }
            }
        }
    }
    out
}

/// Converts a rooted binary tree on `k ≥ 3` leaves into at most `k` triplets
/// that `BUILD` turns back into the same tree.
///
/// Every internal node except the root emits
/// `{label(left), label(right)} | label(sibling)`, where a node's label is its
/// leftmost leaf. Output order follows the cherry-collapsing procedure: deepest
/// nodes first, left to right within a depth.
pub fn tree_to_triplets(tree: &ClusterTree) -> Result<ConstraintSet> {
    let k = tree.n_leaves();
    if k < 3 {
        return Err(HcError::Domain(format!(
            "need at least 3 leaves to extract triplets, got {k}"
        )));
    }
    let order = tree.preorder();
    let mut label = vec![usize::MAX; tree.n_nodes()];
    for &id in order.iter().rev() {
        label[id] = match tree.children(id) {
            None => tree.label(id).expect("leaf"),
            Some((a, _)) => label[a],
        };
    }
    let max_depth = order.iter().map(|&id| tree.depth(id)).max().unwrap_or(0);
    let mut by_depth: Vec<Vec<usize>> = vec![Vec::new(); max_depth + 1];
    for &id in &order {
        if id != tree.root() && tree.children(id).is_some() {
            by_depth[tree.depth(id)].push(id);
        }
    }
    let mut out = ConstraintSet::default();
    for id in by_depth.into_iter().rev().flatten() {
        let (a, b) = tree.children(id).expect("internal");
        let parent = tree.parent(id).expect("non-root");
        let (pa, pb) = tree.children(parent).expect("internal");
        let sibling = if pa == id { pb } else { pa };
        out.push(TripletConstraint::new(label[a], label[b], label[sibling])?, 1.0)?;
    }
    Ok(out)
}

/// A cluster contracted by the connected components of its Aho graph.
#[derive(Debug, Clone)]
pub struct SuperGraph {
    /// Supernodes, each sorted, ordered by smallest vertex.
    pub blocks: Vec<Vec<usize>>,
    /// Graph over block ids with crossing weights summed.
    pub contracted: WeightedGraph,
    /// Block of each original vertex, `None` outside the cluster.
    pub block_of: Vec<Option<usize>>,
}

impl SuperGraph {
    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    /// Vertices of the given blocks, sorted.
    pub fn expand(&self, block_ids: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = block_ids
            .iter()
            .flat_map(|&b| self.blocks[b].iter().copied())
            .collect();
        out.sort_unstable();
        out
    }

    /// Splits the cluster into the vertices of `side` blocks and the rest.
    pub fn expand_split(&self, side: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let mut in_side = vec![false; self.blocks.len()];
        for &b in side {
            in_side[b] = true;
        }
        let rest: Vec<usize> = (0..self.blocks.len()).filter(|&b| !in_side[b]).collect();
        (self.expand(side), self.expand(&rest))
    }
}

/// Contracts `cluster` by the constraints in `active` (expected to be the active set).
pub fn contract(g: &WeightedGraph, cluster: &[usize], active: &ConstraintSet) -> SuperGraph {
    let blocks = aho_components(cluster, active.as_slice());
    let mut block_of = vec![None; g.n()];
    for (i, block) in blocks.iter().enumerate() {
        for &v in block {
            block_of[v] = Some(i);
        }
    }
    let mut edges = Vec::new();
    for block in &blocks {
        for &v in block {
            for &(u, w) in g.neighbors(v) {
                if let (Some(bv), Some(bu)) = (block_of[v], block_of[u]) {
                    if v < u && bv != bu {
                        edges.push((bv, bu, w));
                    }
                }
            }
        }
    }
    let contracted = WeightedGraph::new(blocks.len(), edges).expect("block ids are in range");
    SuperGraph { blocks, contracted, block_of }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> ClusterTree {
        ClusterTree::from_newick(s).unwrap()
    }

    fn cs(items: &[(usize, usize, usize)]) -> ConstraintSet {
        ConstraintSet::from_tuples(items).unwrap()
    }

    #[test]
    fn triplet_canonical_order() {
        let c = TripletConstraint::new(3, 1, 2).unwrap();
        assert_eq!((c.p, c.q, c.s), (1, 3, 2));
        assert!(TripletConstraint::new(1, 1, 2).is_err());
        assert!(TripletConstraint::new(1, 2, 1).is_err());
        assert_eq!(c.to_string(), "1 3 | 2");
    }

    #[test]
    fn duplicate_and_negative_cost_rejected() {
        let c = TripletConstraint::new(0, 1, 2).unwrap();
        assert!(ConstraintSet::from_triplets([c, c]).is_err());
        assert!(ConstraintSet::with_costs([(c, -1.0)]).is_err());
        let flipped = TripletConstraint::new(1, 0, 2).unwrap();
        assert!(ConstraintSet::from_triplets([c, flipped]).is_err());
    }

    #[test]
    fn tree_to_triplets_examples() {
        let out = tree_to_triplets(&t("((0,1),2);")).unwrap();
        assert_eq!(out, cs(&[(0, 1, 2)]));
        let out = tree_to_triplets(&t("((0,1),(2,3));")).unwrap();
        assert_eq!(out, cs(&[(0, 1, 2), (2, 3, 0)]));
        let out = tree_to_triplets(&t("(((0,1),2),3);")).unwrap();
        assert_eq!(out, cs(&[(0, 1, 2), (0, 2, 3)]));
        assert!(tree_to_triplets(&t("(0,1);")).is_err());
    }

    #[test]
    fn build_examples() {
        match build(&[0, 1, 2], &cs(&[(0, 1, 2)])) {
            BuildOutcome::Feasible(tree) => assert_eq!(tree.to_newick(), "((0,1),2);"),
            other => panic!("expected feasible, got {other:?}"),
        }
        assert_eq!(
            build(&[0, 1, 2], &cs(&[(0, 1, 2), (1, 2, 0)])),
            BuildOutcome::Infeasible { cluster: vec![0, 1, 2] }
        );
        let tree = build(&[0, 1], &ConstraintSet::default()).into_tree().unwrap();
        assert_eq!(tree.to_newick(), "(0,1);");
    }

    #[test]
    fn build_binarizes_left_deep() {
        let tree = build(&[3, 1, 0, 2], &ConstraintSet::default()).into_tree().unwrap();
        assert_eq!(tree.to_newick(), "(((0,1),2),3);");
    }

    #[test]
    fn active_examples() {
        let set = cs(&[(0, 1, 2), (2, 3, 0)]);
        assert_eq!(active_constraints(&[0, 1, 2], &set), cs(&[(0, 1, 2)]));
        assert!(active_constraints(&[0, 1], &set).is_empty());
        assert_eq!(active_constraints(&[0, 1, 2, 3], &set), set);
    }

    #[test]
    fn contract_examples() {
        let g = WeightedGraph::new(4, [(0, 2, 1.0), (1, 2, 2.0), (2, 3, 4.0), (0, 1, 8.0)]).unwrap();
        let sg = contract(&g, &[0, 1, 2, 3], &cs(&[(0, 1, 2)]));
        assert_eq!(sg.blocks, vec![vec![0, 1], vec![2], vec![3]]);
        assert_eq!(sg.contracted.weight(0, 1), 3.0);
        assert_eq!(sg.contracted.weight(1, 2), 4.0);
        assert_eq!(sg.contracted.weight(0, 2), 0.0);

        let sg = contract(&g, &[0, 1, 2, 3], &ConstraintSet::default());
        assert_eq!(sg.blocks.len(), 4);
        assert_eq!(sg.contracted, g);

        let g5 = WeightedGraph::complete(5, 1.0);
        let sg = contract(&g5, &[0, 1, 2, 3, 4], &cs(&[(0, 1, 2), (1, 3, 4)]));
        assert_eq!(sg.blocks, vec![vec![0, 1, 3], vec![2], vec![4]]);
        assert_eq!(sg.contracted.weight(0, 1), 3.0);
    }

    #[test]
    fn violation_examples() {
        let c = TripletConstraint::new(0, 1, 2).unwrap();
        assert!(!is_violated(&t("((0,1),2);"), &c).unwrap());
        assert!(is_violated(&t("((0,2),1);"), &c).unwrap());
        let c = TripletConstraint::new(2, 3, 0).unwrap();
        assert!(is_violated(&t("(((0,1),2),3);"), &c).unwrap());
    }

    #[test]
    fn feasible_cut_examples() {
        let set = cs(&[(0, 1, 2)]);
        assert!(feasible_cut(&[0, 1, 2], &[0, 1], &set));
        assert!(!feasible_cut(&[0, 1, 2], &[0, 2], &set));
        assert!(feasible_cut(&[0, 1, 2], &[1], &ConstraintSet::default()));
        // inactive constraints impose nothing
        assert!(feasible_cut(&[0, 1, 3], &[0, 3], &set));
    }

    #[test]
    fn induced_triplets_of_caterpillar() {
        let trip = induced_triplets(&t("(((0,1),2),3);"));
        let expected: BTreeSet<_> = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
            .iter()
            .map(|&(p, q, s)| TripletConstraint::new(p, q, s).unwrap())
            .collect();
        assert_eq!(trip, expected);
    }
}
