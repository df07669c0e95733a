//! Tree cost evaluators.
//!
//! All objectives share the functional `Σ w_ij · |T_ij|`, where `|T_ij|` is
//! the leaf count of the subtree rooted at the lowest common ancestor of `i`
//! and `j` (leaves included, so `|T_ij| ≥ 2`). Similarity weights are
//! minimized, dissimilarity weights maximized.

use crate::constraints::{is_violated, ConstraintSet};
use crate::error::{HcError, Result};
use crate::graph::WeightedGraph;
use crate::tree::ClusterTree;

/// A 3-vertex hyperedge with one weight per way of splitting it in two.
///
/// `w_ab_c` is charged when `a,b` stay together and `c` is split off, and so on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperedge3 {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub w_ab_c: f64,
    pub w_ac_b: f64,
    pub w_bc_a: f64,
}

impl Hyperedge3 {
    pub fn new(a: usize, b: usize, c: usize, w_ab_c: f64, w_ac_b: f64, w_bc_a: f64) -> Result<Self> {
        if a == b || a == c || b == c {
            return Err(HcError::Domain(format!(
                "hyperedge endpoints must be distinct, got ({a}, {b}, {c})"
            )));
        }
        for w in [w_ab_c, w_ac_b, w_bc_a] {
            if !w.is_finite() || w < 0.0 {
                return Err(HcError::Domain(format!("invalid hyperedge weight {w}")));
            }
        }
        Ok(Self { a, b, c, w_ab_c, w_ac_b, w_bc_a })
    }

    pub fn vertices(&self) -> [usize; 3] {
        [self.a, self.b, self.c]
    }

    /// Weight of the split that isolates `x` (one of the three endpoints).
    pub fn weight_isolating(&self, x: usize) -> f64 {
        if x == self.c {
            self.w_ab_c
        } else if x == self.b {
            self.w_ac_b
        } else {
            debug_assert_eq!(x, self.a);
            self.w_bc_a
        }
    }

    /// Contribution to a cut given side membership, zero when the cut does not chop it.
    pub fn cut_weight(&self, in_side: impl Fn(usize) -> bool) -> f64 {
        let (sa, sb, sc) = (in_side(self.a), in_side(self.b), in_side(self.c));
        if sa == sb && sb == sc {
            0.0
        } else if sa == sb {
            self.w_ab_c
        } else if sa == sc {
            self.w_ac_b
        } else {
            self.w_bc_a
        }
    }
}

/// Graph plus weighted triplet constraints and the regularization strength.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizedInstance {
    pub graph: WeightedGraph,
    pub constraints: ConstraintSet,
    pub lambda: f64,
}

impl RegularizedInstance {
    pub fn new(graph: WeightedGraph, constraints: ConstraintSet, lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(HcError::Domain(format!("lambda must be >= 0, got {lambda}")));
        }
        constraints.check_vertices(graph.n())?;
        Ok(Self { graph, constraints, lambda })
    }

    /// Hyperedges encoding the penalty: for `pq|s` with base cost `c`, the
    /// split keeping `p,q` together is free and the other two cost `λ·c`.
    pub fn gadget_hyperedges(&self) -> Vec<Hyperedge3> {
        self.constraints
            .iter_with_costs()
            .map(|(t, cost)| {
                let w = self.lambda * cost;
                Hyperedge3 {
                    a: t.p,
                    b: t.q,
                    c: t.s,
                    w_ab_c: 0.0,
                    w_ac_b: w,
                    w_bc_a: w,
                }
            })
            .collect()
    }
}

/// `Σ w_ij · |T_ij|` over the edges of `g`.
pub fn similarity_cost(tree: &ClusterTree, g: &WeightedGraph) -> Result<f64> {
    tree.check_vertex_set(g.n())?;
    let mut total = 0.0;
    for e in g.edges() {
        let lca = tree.lca(e.u, e.v)?;
        total += e.w * tree.size(lca) as f64;
    }
    Ok(total)
}

/// Same functional as [`similarity_cost`], read as a reward to maximize.
pub fn dissimilarity_reward(tree: &ClusterTree, g: &WeightedGraph) -> Result<f64> {
    similarity_cost(tree, g)
}

/// Maximal clusters of size at most `t`, each sorted, ordered by smallest leaf.
pub fn level_partition(tree: &ClusterTree, t: usize) -> Result<Vec<Vec<usize>>> {
    let n = tree.n_leaves();
    if t < 1 || t > n {
        return Err(HcError::Domain(format!("level {t} outside [1, {n}]")));
    }
    let mut blocks = Vec::new();
    let mut stack = vec![tree.root()];
    while let Some(node) = stack.pop() {
        if tree.size(node) <= t {
            let mut block = tree.leaves_under(node);
            block.sort_unstable();
            blocks.push(block);
        } else if let Some((a, b)) = tree.children(node) {
            stack.push(a);
            stack.push(b);
        }
    }
    blocks.sort_by_key(|b| b[0]);
    Ok(blocks)
}

/// Weight of edges cut by the level-`t` partition; level 0 cuts everything.
pub fn level_cut_weight(tree: &ClusterTree, g: &WeightedGraph, t: usize) -> Result<f64> {
    tree.check_vertex_set(g.n())?;
    let n = g.n();
    if t > n {
        return Err(HcError::Domain(format!("level {t} outside [0, {n}]")));
    }
    if t == 0 {
        return Ok(g.total_weight());
    }
    let mut block_of = vec![0usize; n];
    for (i, block) in level_partition(tree, t)?.iter().enumerate() {
        for &v in block {
            block_of[v] = i;
        }
    }
    Ok(g.edges()
        .iter()
        .filter(|e| block_of[e.u] != block_of[e.v])
        .map(|e| e.w)
        .sum())
}

/// `Σ_{t=0}^{n} level_cut_weight(t)`; equals [`similarity_cost`].
pub fn level_decomposition_cost(tree: &ClusterTree, g: &WeightedGraph) -> Result<f64> {
    (0..=g.n()).map(|t| level_cut_weight(tree, g, t)).sum()
}

/// Similarity cost plus `λ · Σ c_pq|s · |T_pq|` over violated constraints.
pub fn regularized_cost(tree: &ClusterTree, inst: &RegularizedInstance) -> Result<f64> {
    let base = similarity_cost(tree, &inst.graph)?;
    let mut penalty = 0.0;
    for (c, cost) in inst.constraints.iter_with_costs() {
        if is_violated(tree, c)? {
            penalty += cost * tree.size(tree.lca(c.p, c.q)?) as f64;
        }
    }
    Ok(base + inst.lambda * penalty)
}

/// Similarity cost plus, per hyperedge, the weight of the split that first
/// separates it times the size of the cluster where that split happens.
pub fn hypergraph_cost(tree: &ClusterTree, g: &WeightedGraph, hyperedges: &[Hyperedge3]) -> Result<f64> {
    let mut total = similarity_cost(tree, g)?;
    for h in hyperedges {
        let [a, b, c] = h.vertices();
        let top = tree.lca_nodes(tree.lca(a, b)?, tree.require_leaf(c)?);
        let (left, _) = tree
            .children(top)
            .ok_or_else(|| HcError::Internal("three leaves share a leaf node".into()))?;
        let in_left = |x: usize| tree.is_ancestor(left, tree.leaf_node(x).unwrap());
        total += h.cut_weight(in_left) * tree.size(top) as f64;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::TripletConstraint;

    fn t(s: &str) -> ClusterTree {
        ClusterTree::from_newick(s).unwrap()
    }

    fn p3() -> WeightedGraph {
        WeightedGraph::new(3, [(0, 1, 2.0), (1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn similarity_examples() {
        let g = WeightedGraph::new(2, [(0, 1, 5.0)]).unwrap();
        assert_eq!(similarity_cost(&t("(0,1);"), &g).unwrap(), 10.0);
        assert_eq!(similarity_cost(&t("((0,1),2);"), &p3()).unwrap(), 7.0);
        let k3 = WeightedGraph::complete(3, 1.0);
        for s in ["((0,1),2);", "((0,2),1);", "((1,2),0);"] {
            assert_eq!(similarity_cost(&t(s), &k3).unwrap(), 8.0);
        }
    }

    #[test]
    fn dissimilarity_examples() {
        assert_eq!(dissimilarity_reward(&t("((0,2),1);"), &p3()).unwrap(), 9.0);
        assert_eq!(dissimilarity_reward(&t("((0,1),2);"), &p3()).unwrap(), 7.0);
        let k4 = WeightedGraph::complete(4, 1.0);
        for s in ["(((0,1),2),3);", "((0,1),(2,3));", "((3,(1,2)),0);"] {
            assert_eq!(dissimilarity_reward(&t(s), &k4).unwrap(), 20.0);
        }
    }

    #[test]
    fn leaf_mismatch_is_an_error() {
        assert!(matches!(
            similarity_cost(&t("(0,1);"), &p3()),
            Err(HcError::LeafMismatch { n: 3 })
        ));
    }

    #[test]
    fn level_partition_examples() {
        let cat = t("(((0,1),2),3);");
        assert_eq!(level_partition(&cat, 3).unwrap(), vec![vec![0, 1, 2], vec![3]]);
        assert_eq!(level_partition(&cat, 2).unwrap(), vec![vec![0, 1], vec![2], vec![3]]);
        assert_eq!(
            level_partition(&cat, 1).unwrap(),
            vec![vec![0], vec![1], vec![2], vec![3]]
        );
        assert!(level_partition(&cat, 0).is_err());
        assert!(level_partition(&cat, 5).is_err());
    }

    #[test]
    fn level_cut_examples() {
        let tree = t("((0,1),2);");
        assert_eq!(level_cut_weight(&tree, &p3(), 3).unwrap(), 0.0);
        assert_eq!(level_cut_weight(&tree, &p3(), 0).unwrap(), 3.0);
        assert_eq!(level_cut_weight(&tree, &p3(), 2).unwrap(), 1.0);
        assert!(level_cut_weight(&tree, &p3(), 4).is_err());
        assert_eq!(level_decomposition_cost(&tree, &p3()).unwrap(), 7.0);
        let g = WeightedGraph::new(2, [(0, 1, 5.0)]).unwrap();
        assert_eq!(level_decomposition_cost(&t("(0,1);"), &g).unwrap(), 10.0);
        let k3 = WeightedGraph::complete(3, 1.0);
        assert_eq!(level_decomposition_cost(&t("((1,2),0);"), &k3).unwrap(), 8.0);
    }

    fn reg_instance(lambda: f64) -> RegularizedInstance {
        let g = WeightedGraph::new(3, [(0, 2, 1.0)]).unwrap();
        let cs = ConstraintSet::from_triplets([TripletConstraint::new(0, 1, 2).unwrap()]).unwrap();
        RegularizedInstance::new(g, cs, lambda).unwrap()
    }

    #[test]
    fn regularized_examples() {
        assert_eq!(regularized_cost(&t("((0,1),2);"), &reg_instance(1.0)).unwrap(), 3.0);
        assert_eq!(regularized_cost(&t("((0,2),1);"), &reg_instance(1.0)).unwrap(), 5.0);
        assert_eq!(regularized_cost(&t("((0,2),1);"), &reg_instance(0.0)).unwrap(), 2.0);
        assert!(RegularizedInstance::new(WeightedGraph::empty(3), ConstraintSet::default(), -1.0).is_err());
    }

    #[test]
    fn hypergraph_examples() {
        let g = WeightedGraph::new(3, [(0, 2, 1.0)]).unwrap();
        let h = Hyperedge3::new(0, 1, 2, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(hypergraph_cost(&t("((0,2),1);"), &g, &[h]).unwrap(), 5.0);
        assert_eq!(hypergraph_cost(&t("((0,1),2);"), &g, &[h]).unwrap(), 3.0);
        let zero = Hyperedge3::new(0, 1, 2, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(
            hypergraph_cost(&t("((0,2),1);"), &g, &[zero]).unwrap(),
            similarity_cost(&t("((0,2),1);"), &g).unwrap()
        );
        assert!(Hyperedge3::new(0, 0, 1, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn hyperedge_split_deep_in_tree() {
        // hyperedge {0,1,3} first chopped at the root of size 4, isolating 3
        let g = WeightedGraph::empty(4);
        let h = Hyperedge3::new(0, 1, 3, 2.0, 5.0, 7.0).unwrap();
        assert_eq!(hypergraph_cost(&t("(((0,1),2),3);"), &g, &[h]).unwrap(), 8.0);
        // {0,1,2} chopped at the size-3 node, isolating 2
        let h = Hyperedge3::new(2, 0, 1, 2.0, 5.0, 7.0).unwrap();
        assert_eq!(hypergraph_cost(&t("(((0,1),2),3);"), &g, &[h]).unwrap(), 21.0);
    }
}
