//! Brute-force ground truth for small instances: subset dynamic programs over
//! bitmasks and exhaustive enumeration of binary trees.
//!
//! The DP splits each subset `S` into `(B, S∖B)` with `B` holding the lowest
//! vertex of `S`; `B` becomes the left child of the reconstructed tree.

use crate::constraints::{build, BuildOutcome, ConstraintSet};
use crate::error::{HcError, Result};
use crate::graph::WeightedGraph;
use crate::objective::{Hyperedge3, RegularizedInstance};
use crate::tree::ClusterTree;

/// Largest vertex count accepted by the subset DPs.
pub const DP_LIMIT: usize = 14;
/// Largest leaf count accepted by [`enumerate_trees`].
pub const ENUMERATION_LIMIT: usize = 8;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Goal {
    Minimize,
    Maximize,
}

/// `in_weight[X]` = total weight of edges with both endpoints in `X`.
fn internal_weights(g: &WeightedGraph) -> Vec<f64> {
    let n = g.n();
    let mut table = vec![0.0; 1usize << n];
    for mask in 1..table.len() {
        let v = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let mut add = 0.0;
        for &(u, w) in g.neighbors(v) {
            if rest >> u & 1 == 1 {
                add += w;
            }
        }
        table[mask] = table[rest] + add;
    }
    table
}

fn mask_of(vs: &[usize]) -> usize {
    vs.iter().fold(0, |m, &v| m | 1 << v)
}

/// Runs the DP; `charge(S, B)` is the cost of splitting `S` into `B` and
/// `S∖B`, or `None` when that split is not allowed.
fn subset_dp(n: usize, goal: Goal, charge: impl Fn(usize, usize) -> Option<f64>) -> Option<(f64, ClusterTree)> {
    let full = (1usize << n) - 1;
    let mut value: Vec<Option<f64>> = vec![None; 1 << n];
    let mut choice = vec![0usize; 1 << n];
    for v in 0..n {
        value[1 << v] = Some(0.0);
    }
    for s in 1..=full {
        if s.count_ones() < 2 {
            continue;
        }
        let low = s & s.wrapping_neg();
        let rest = s ^ low;
        let mut best: Option<(f64, usize)> = None;
        // B = low ∪ sub for every proper submask `sub` of `rest`
        let mut sub = rest;
        loop {
            let b = low | sub;
            if b != s {
                if let (Some(vb), Some(vc)) = (value[b], value[s ^ b]) {
                    if let Some(c) = charge(s, b) {
                        let total = c + vb + vc;
                        let better = match best {
                            None => true,
                            Some((bv, _)) => match goal {
                                Goal::Minimize => total < bv,
                                Goal::Maximize => total > bv,
                            },
                        };
                        if better {
                            best = Some((total, b));
                        }
                    }
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        if let Some((v, b)) = best {
            value[s] = Some(v);
            choice[s] = b;
        }
    }
    let total = value[full]?;
    fn rebuild(s: usize, choice: &[usize]) -> ClusterTree {
        if s.count_ones() == 1 {
            return ClusterTree::leaf(s.trailing_zeros() as usize);
        }
        let b = choice[s];
        ClusterTree::join(rebuild(b, choice), rebuild(s ^ b, choice)).expect("disjoint subsets")
    }
    Some((total, rebuild(full, &choice)))
}

fn check_size(n: usize, limit: usize) -> Result<()> {
    if n == 0 {
        return Err(HcError::Domain("graph has no vertices".into()));
    }
    if n > limit {
        return Err(HcError::TooLarge { n, limit });
    }
    Ok(())
}

/// Split-legality test: an active constraint (all three vertices in `S`)
/// forbids separating its pair.
fn constraint_filter(g: &WeightedGraph, cs: Option<&ConstraintSet>) -> Result<Vec<(usize, usize, usize)>> {
    let Some(cs) = cs else { return Ok(Vec::new()) };
    cs.check_vertices(g.n())?;
    let all: Vec<usize> = (0..g.n()).collect();
    if let BuildOutcome::Infeasible { cluster } = build(&all, cs) {
        return Err(HcError::Infeasible { cluster });
    }
    Ok(cs.iter().map(|t| (mask_of(&t.vertices()), 1 << t.p, 1 << t.q)).collect())
}

fn allowed(rules: &[(usize, usize, usize)], s: usize, b: usize) -> bool {
    rules
        .iter()
        .all(|&(all, p, q)| all & s != all || (b & p == 0) == (b & q == 0))
}

fn optimize(g: &WeightedGraph, cs: Option<&ConstraintSet>, goal: Goal, limit: usize) -> Result<(f64, ClusterTree)> {
    check_size(g.n(), limit)?;
    let rules = constraint_filter(g, cs)?;
    let inner = internal_weights(g);
    subset_dp(g.n(), goal, |s, b| {
        allowed(&rules, s, b).then(|| s.count_ones() as f64 * (inner[s] - inner[b] - inner[s ^ b]))
    })
    .ok_or_else(|| HcError::Internal("no feasible tree found for a feasible instance".into()))
}

/// Minimum similarity cost, optionally over trees satisfying `cs`.
pub fn opt_similarity(g: &WeightedGraph, cs: Option<&ConstraintSet>) -> Result<(f64, ClusterTree)> {
    optimize(g, cs, Goal::Minimize, DP_LIMIT)
}

/// Maximum dissimilarity reward, optionally over trees satisfying `cs`.
pub fn opt_dissimilarity(g: &WeightedGraph, cs: Option<&ConstraintSet>) -> Result<(f64, ClusterTree)> {
    optimize(g, cs, Goal::Maximize, DP_LIMIT)
}

/// Minimum regularized cost: each split of `S` is charged `|S|` times the
/// cut weight plus the split weights of hyperedges first separated there.
pub fn opt_regularized(inst: &RegularizedInstance) -> Result<(f64, ClusterTree)> {
    let g = &inst.graph;
    check_size(g.n(), DP_LIMIT)?;
    let inner = internal_weights(g);
    let hyper: Vec<(usize, Hyperedge3)> = inst
        .gadget_hyperedges()
        .into_iter()
        .map(|h| (mask_of(&h.vertices()), h))
        .collect();
    subset_dp(g.n(), Goal::Minimize, |s, b| {
        let mut charge = inner[s] - inner[b] - inner[s ^ b];
        for (all, h) in &hyper {
            if all & s != *all {
                continue;
            }
            let inside = b & all;
            if inside == 0 || inside == *all {
                continue;
            }
            // the vertex alone on its side
            let alone = if inside.count_ones() == 1 { inside } else { all ^ inside };
            charge += h.weight_isolating(alone.trailing_zeros() as usize);
        }
        Some(s.count_ones() as f64 * charge)
    })
    .ok_or_else(|| HcError::Internal("regularized DP produced no tree".into()))
}

#[derive(Clone)]
enum Shape {
    Leaf(usize),
    Node(Box<Shape>, Box<Shape>),
}

fn insertions(t: &Shape, leaf: usize, out: &mut Vec<Shape>) {
    out.push(Shape::Node(Box::new(t.clone()), Box::new(Shape::Leaf(leaf))));
    if let Shape::Node(l, r) = t {
        let mut sub = Vec::new();
        insertions(l, leaf, &mut sub);
        out.extend(sub.drain(..).map(|nl| Shape::Node(Box::new(nl), r.clone())));
        insertions(r, leaf, &mut sub);
        out.extend(sub.drain(..).map(|nr| Shape::Node(l.clone(), Box::new(nr))));
    }
}

fn to_tree(t: &Shape) -> ClusterTree {
    match t {
        Shape::Leaf(v) => ClusterTree::leaf(*v),
        Shape::Node(l, r) => ClusterTree::join(to_tree(l), to_tree(r)).expect("distinct leaves"),
    }
}

/// All `(2n−3)!!` binary trees on leaves `0..n`, each topology once, built
/// by inserting leaves one at a time above every existing node.
pub fn enumerate_trees(n: usize) -> Result<Vec<ClusterTree>> {
    check_size(n, ENUMERATION_LIMIT)?;
    let mut shapes = vec![Shape::Leaf(0)];
    for leaf in 1..n {
        let mut next = Vec::new();
        for t in &shapes {
            insertions(t, leaf, &mut next);
        }
        shapes = next;
    }
    Ok(shapes.iter().map(to_tree).collect())
}
