//! Recursive random cutting for dissimilarity-HC, its derandomization by
//! conditional expectations, and the constrained variant over supernodes.

pub mod dependency;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use dependency::{
    constraint_classes, crrc_guarantee, dependency_digraph, dm, dmc, layered_subgraph, ConstraintClass,
    DependencyDigraph, LayeredSubgraph,
};

use crate::constraints::{active_constraints, build, contract, BuildOutcome, ConstraintSet};
use crate::cuts::random_cut;
use crate::divisive::divide;
use crate::error::{HcError, Result};
use crate::graph::WeightedGraph;
use crate::objective::dissimilarity_reward;
use crate::tree::ClusterTree;

/// Recursive random cutting: every cluster is split by independent fair
/// coins (trivial splits resampled) until singletons remain.
pub fn rrc<R: Rng + ?Sized>(g: &WeightedGraph, rng: &mut R) -> Result<ClusterTree> {
    if g.n() == 0 {
        return Err(HcError::Domain("graph has no vertices".into()));
    }
    divide((0..g.n()).collect(), &mut |cluster: &[usize]| random_cut(cluster, rng))
}

/// Exact expected reward of [`rrc`]: `Σ w_ij · (2 + 2(n−2)/3)`.
pub fn rrc_expected_reward(g: &WeightedGraph) -> f64 {
    expected_factor(g.n()) * g.total_weight()
}

fn expected_factor(m: usize) -> f64 {
    if m < 2 {
        0.0
    } else {
        2.0 + 2.0 * (m - 2) as f64 / 3.0
    }
}

/// Constrained RRC: random cuts over the supernodes of each cluster's
/// contraction. With no constraints this consumes coins exactly like [`rrc`]
/// and returns the same tree for the same generator state.
pub fn crrc<R: Rng + ?Sized>(g: &WeightedGraph, cs: &ConstraintSet, rng: &mut R) -> Result<ClusterTree> {
    if g.n() == 0 {
        return Err(HcError::Domain("graph has no vertices".into()));
    }
    cs.check_vertices(g.n())?;
    let all: Vec<usize> = (0..g.n()).collect();
    if let BuildOutcome::Infeasible { cluster } = build(&all, cs) {
        return Err(HcError::Infeasible { cluster });
    }
    divide(all, &mut |cluster: &[usize]| {
        let active = active_constraints(cluster, cs);
        let sg = contract(g, cluster, &active);
        if sg.blocks.len() < 2 {
            return Err(HcError::Internal(format!(
                "cluster of {} vertices contracted to a single supernode",
                cluster.len()
            )));
        }
        let ids: Vec<usize> = (0..sg.blocks.len()).collect();
        let (left, right) = random_cut(&ids, rng)?;
        Ok((sg.expand(&left), sg.expand(&right)))
    })
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Expected reward of the edges inside `cluster` when its first split is
/// uniform over nontrivial completions of the partial assignment `prob`
/// (`prob[v]` = probability `v` goes right: 0, 1, or 1/2 for free vertices)
/// and everything below is cut at random.
fn conditional_expectation(
    edges: &[(usize, usize, f64)],
    prob: &[f64],
    free: usize,
    any_left: bool,
    any_right: bool,
    trivial_value: f64,
) -> Option<f64> {
    let m = prob.len();
    let right_mass: f64 = prob.iter().sum();
    let left_mass = m as f64 - right_mass;
    let mut independent = 0.0;
    for &(i, j, w) in edges {
        let (pi, pj) = (prob[i], prob[j]);
        let split = pi * (1.0 - pj) + pj * (1.0 - pi);
        // third vertices k ∉ {i, j}
        let others_right = right_mass - pi - pj;
        let others_left = left_mass - (1.0 - pi) - (1.0 - pj);
        let together = pi * pj * others_right + (1.0 - pi) * (1.0 - pj) * others_left;
        independent += w * (2.0 + split * (m - 2) as f64 + together * 2.0 / 3.0);
    }
    let trivial = usize::from(!any_right) + usize::from(!any_left);
    let completions = 2f64.powi(free as i32);
    let nontrivial = completions - trivial as f64;
    if nontrivial <= 0.0 {
        return None;
    }
    Some((completions * independent - trivial as f64 * trivial_value) / nontrivial)
}

/// First split of `cluster` by conditional expectations: vertices are fixed
/// in id order to the side with the larger expected reward, ties going left.
fn derandomized_split(g: &WeightedGraph, cluster: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let m = cluster.len();
    let sub = g.induced(cluster);
    let edges: Vec<(usize, usize, f64)> = sub.edges().iter().map(|e| (e.u, e.v, e.w)).collect();
    let trivial_value = expected_factor(m) * sub.total_weight();
    let mut prob = vec![0.5; m];
    let (mut any_left, mut any_right) = (false, false);
    for v in 0..m {
        let free = m - v - 1;
        prob[v] = 0.0;
        let left = conditional_expectation(&edges, &prob, free, true, any_right, trivial_value);
        prob[v] = 1.0;
        let right = conditional_expectation(&edges, &prob, free, any_left, true, trivial_value);
        let go_right = match (left, right) {
            (Some(l), Some(r)) => r > l && !near(r, l),
            (None, _) => true,
            (Some(_), None) => false,
        };
        prob[v] = if go_right { 1.0 } else { 0.0 };
        any_left |= !go_right;
        any_right |= go_right;
    }
    let (mut l, mut r) = (Vec::new(), Vec::new());
    for (i, &v) in cluster.iter().enumerate() {
        if prob[i] == 1.0 {
            r.push(v);
        } else {
            l.push(v);
        }
    }
    (l, r)
}

/// Deterministic counterpart of [`rrc`]; its reward is at least
/// [`rrc_expected_reward`] and hence at least 2/3 of the optimum.
pub fn local_search_derandomized(g: &WeightedGraph) -> Result<ClusterTree> {
    if g.n() == 0 {
        return Err(HcError::Domain("graph has no vertices".into()));
    }
    divide((0..g.n()).collect(), &mut |cluster: &[usize]| Ok(derandomized_split(g, cluster)))
}

/// Sample mean and standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarlo {
    pub trials: usize,
    pub mean: f64,
    pub std_err: f64,
}

impl MonteCarlo {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n.max(1) as f64;
        let var = if n > 1 {
            samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Self { trials: n, mean, std_err: (var / n.max(1) as f64).sqrt() }
    }
}

/// Dissimilarity reward of `trials` runs of `algorithm`, trial `i` seeded
/// with `seed + i`.
pub fn monte_carlo<F>(g: &WeightedGraph, trials: usize, seed: u64, mut algorithm: F) -> Result<MonteCarlo>
where
    F: FnMut(&mut ChaCha8Rng) -> Result<ClusterTree>,
{
    let mut samples = Vec::with_capacity(trials);
    for i in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
        samples.push(dissimilarity_reward(&algorithm(&mut rng)?, g)?);
    }
    Ok(MonteCarlo::from_samples(&samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::count_violations;
    use std::collections::HashMap;

    fn p3() -> WeightedGraph {
        WeightedGraph::new(3, [(0, 1, 2.0), (1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn rrc_small_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(rrc(&WeightedGraph::empty(1), &mut rng).unwrap().to_newick(), "0;");
        let k3 = WeightedGraph::complete(3, 1.0);
        for _ in 0..20 {
            assert_eq!(dissimilarity_reward(&rrc(&k3, &mut rng).unwrap(), &k3).unwrap(), 8.0);
        }
        let mut counts: HashMap<String, usize> = HashMap::new();
        for _ in 0..30_000 {
            *counts.entry(rrc(&p3(), &mut rng).unwrap().canonical_newick()).or_default() += 1;
        }
        assert_eq!(counts.len(), 3);
        for c in counts.values() {
            assert!((*c as f64 / 30_000.0 - 1.0 / 3.0).abs() < 0.015, "{counts:?}");
        }
    }

    #[test]
    fn expected_reward_closed_form() {
        assert_eq!(rrc_expected_reward(&p3()), 8.0);
        assert_eq!(rrc_expected_reward(&WeightedGraph::complete(3, 1.0)), 8.0);
        assert_eq!(rrc_expected_reward(&WeightedGraph::complete(5, 1.0)), 40.0);
    }

    #[test]
    fn derandomized_dominates_expectation() {
        let k3 = WeightedGraph::complete(3, 1.0);
        assert_eq!(dissimilarity_reward(&local_search_derandomized(&k3).unwrap(), &k3).unwrap(), 8.0);
        let r = dissimilarity_reward(&local_search_derandomized(&p3()).unwrap(), &p3()).unwrap();
        assert!(r >= 8.0);
        let empty = WeightedGraph::empty(4);
        assert_eq!(local_search_derandomized(&empty).unwrap().n_leaves(), 4);
    }

    #[test]
    fn conditional_expectation_matches_enumeration() {
        // average over all nontrivial splits of a 4-vertex cluster with vertex 0 fixed left
        let g = WeightedGraph::new(4, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 3.0), (0, 3, 0.5)]).unwrap();
        let edges: Vec<_> = g.edges().iter().map(|e| (e.u, e.v, e.w)).collect();
        let value = |right: &[bool]| {
            let mut total = 0.0;
            for &(i, j, w) in &edges {
                let mut t = 2.0;
                for k in (0..4).filter(|&k| k != i && k != j) {
                    if right[i] != right[j] {
                        t += 1.0;
                    } else if right[k] == right[i] {
                        t += 2.0 / 3.0;
                    }
                }
                total += w * t;
            }
            total
        };
        let mut sum = 0.0;
        let mut count = 0;
        for mask in 0..8usize {
            let right: Vec<bool> = (0..4).map(|v| v > 0 && mask >> (v - 1) & 1 == 1).collect();
            if right.iter().any(|&x| x) {
                sum += value(&right);
                count += 1;
            }
        }
        let prob = [0.0, 0.5, 0.5, 0.5];
        let trivial = expected_factor(4) * g.total_weight();
        let got = conditional_expectation(&edges, &prob, 3, true, false, trivial).unwrap();
        assert!((got - sum / count as f64).abs() < 1e-12);
    }

    #[test]
    fn crrc_examples() {
        let cs = ConstraintSet::from_tuples(&[(0, 2, 1)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let t = crrc(&p3(), &cs, &mut rng).unwrap();
            assert_eq!(t.canonical_newick(), ClusterTree::from_newick("((0,2),1);").unwrap().canonical_newick());
            assert_eq!(dissimilarity_reward(&t, &p3()).unwrap(), 9.0);
            assert_eq!(count_violations(&t, &cs).unwrap(), 0);
        }
        let g = WeightedGraph::complete(7, 1.0);
        for seed in 0..20 {
            let a = rrc(&g, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let b = crrc(&g, &ConstraintSet::default(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            assert_eq!(a, b);
        }
        let bad = ConstraintSet::from_tuples(&[(0, 1, 2), (1, 2, 0)]).unwrap();
        assert!(matches!(crrc(&p3(), &bad, &mut rng), Err(HcError::Infeasible { .. })));
    }

    #[test]
    fn monte_carlo_statistics() {
        let s = MonteCarlo::from_samples(&[1.0, 3.0]);
        assert_eq!(s.mean, 2.0);
        assert!((s.std_err - 1.0).abs() < 1e-12);
        let mc = monte_carlo(&p3(), 4000, 9, |rng| rrc(&p3(), rng)).unwrap();
        assert!((mc.mean - 8.0).abs() < 3.0 * mc.std_err + 1e-9);
    }
}
