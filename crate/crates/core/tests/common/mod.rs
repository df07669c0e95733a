//! Random instance generators and brute-force reference computations shared
//! by the integration tests.
#![allow(dead_code)]

use constrained_hc::constraints::{induced_triplets, ConstraintSet, TripletConstraint};
use constrained_hc::graph::WeightedGraph;
use constrained_hc::tree::ClusterTree;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random binary tree on leaves `0..n` by joining random pairs of subtrees.
pub fn random_tree<R: Rng>(n: usize, rng: &mut R) -> ClusterTree {
    let mut forest: Vec<ClusterTree> = (0..n).map(ClusterTree::leaf).collect();
    forest.shuffle(rng);
    while forest.len() > 1 {
        let i = rng.gen_range(0..forest.len());
        let a = forest.swap_remove(i);
        let j = rng.gen_range(0..forest.len());
        let b = forest.swap_remove(j);
        forest.push(ClusterTree::join(a, b).unwrap());
    }
    forest.pop().unwrap()
}

/// Random graph; each pair is an edge with probability `density`.
/// Integer weights are drawn from `1..=9`, real ones from `(0, 10)`.
pub fn random_graph<R: Rng>(n: usize, density: f64, integer: bool, rng: &mut R) -> WeightedGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density) {
                let w = if integer { rng.gen_range(1..=9) as f64 } else { rng.gen_range(0.01..10.0) };
                edges.push((u, v, w));
            }
        }
    }
    WeightedGraph::new(n, edges).unwrap()
}

/// Up to `max_k` distinct triplets displayed by `tree` (feasible by construction).
pub fn sample_triplets<R: Rng>(tree: &ClusterTree, max_k: usize, rng: &mut R) -> ConstraintSet {
    let all: Vec<TripletConstraint> = induced_triplets(tree).into_iter().collect();
    let k = rng.gen_range(0..=max_k.min(all.len()));
    let chosen: Vec<TripletConstraint> = all.choose_multiple(rng, k).copied().collect();
    ConstraintSet::from_triplets(chosen).unwrap()
}

/// Feasible instance: random graph plus triplets of a random ground-truth tree.
pub fn feasible_instance(seed: u64, n_range: (usize, usize), max_k: usize) -> (WeightedGraph, ConstraintSet) {
    let mut r = rng(seed);
    let n = r.gen_range(n_range.0..=n_range.1);
    let tree = random_tree(n, &mut r);
    let density = r.gen_range(0.3..1.0);
    let g = random_graph(n, density, true, &mut r);
    let cs = sample_triplets(&tree, max_k, &mut r);
    (g, cs)
}

/// Crossing weight of `side` computed directly from the edge list.
pub fn naive_crossing(g: &WeightedGraph, side: &[usize]) -> f64 {
    g.edges()
        .iter()
        .filter(|e| side.contains(&e.u) != side.contains(&e.v))
        .map(|e| e.w)
        .sum()
}

/// Every nonempty proper subset of `0..n` not containing vertex 0, as sorted lists.
pub fn all_sides(n: usize) -> Vec<Vec<usize>> {
    (1..(1usize << (n - 1)))
        .map(|m| (1..n).filter(|&v| m >> (v - 1) & 1 == 1).collect())
        .collect()
}

/// `(2n−3)!!`
pub fn double_factorial_count(n: usize) -> usize {
    (1..n).map(|i| 2 * i - 1).product()
}
