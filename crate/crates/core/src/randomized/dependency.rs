//! Dependency structure of a triplet constraint set: classes sharing a base
//! pair, the digraph of which classes must resolve before which, longest-path
//! layers, and the resulting dependency measure.
//!
//! For `pq|s` the base is `{p, q}` and the key is the separated vertex `s`.

use std::collections::BTreeMap;

use crate::constraints::{ConstraintSet, TripletConstraint};
use crate::error::{HcError, Result};

/// Constraints sharing one base pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintClass {
    pub base: (usize, usize),
    pub members: Vec<TripletConstraint>,
    pub keys: Vec<usize>,
}

impl ConstraintClass {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Groups constraints by base, classes ordered by base.
pub fn constraint_classes(cs: &ConstraintSet) -> Vec<ConstraintClass> {
    let mut by_base: BTreeMap<(usize, usize), ConstraintClass> = BTreeMap::new();
    for t in cs.iter() {
        let class = by_base.entry(t.base()).or_insert_with(|| ConstraintClass {
            base: t.base(),
            members: Vec::new(),
            keys: Vec::new(),
        });
        class.members.push(*t);
        class.keys.push(t.s);
    }
    by_base.into_values().collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyDigraph {
    pub classes: Vec<ConstraintClass>,
    /// Arcs `(i, j)` between class indices, sorted.
    pub arcs: Vec<(usize, usize)>,
    successors: Vec<Vec<usize>>,
}

fn pair(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Arc `Ci → Cj` iff a member `pq|s` of `Ci` has `base(Cj)` equal to `{s,p}`
/// or `{s,q}`.
pub fn dependency_digraph(classes: &[ConstraintClass]) -> DependencyDigraph {
    let index: BTreeMap<(usize, usize), usize> = classes.iter().enumerate().map(|(i, c)| (c.base, i)).collect();
    let mut arcs = Vec::new();
    for (i, class) in classes.iter().enumerate() {
        for t in &class.members {
            for target in [pair(t.s, t.p), pair(t.s, t.q)] {
                if let Some(&j) = index.get(&target) {
                    arcs.push((i, j));
                }
            }
        }
    }
    arcs.sort_unstable();
    arcs.dedup();
    let mut successors = vec![Vec::new(); classes.len()];
    for &(i, j) in &arcs {
        successors[i].push(j);
    }
    DependencyDigraph { classes: classes.to_vec(), arcs, successors }
}

impl DependencyDigraph {
    pub fn from_constraints(cs: &ConstraintSet) -> Self {
        dependency_digraph(&constraint_classes(cs))
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.successors[i]
    }

    /// Topological order of all classes, or `None` on a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.len();
        let mut indegree = vec![0usize; n];
        for &(_, j) in &self.arcs {
            indegree[j] += 1;
        }
        let mut ready: Vec<usize> = (0..n).rev().filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = ready.pop() {
            order.push(i);
            for &j in &self.successors[i] {
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    ready.push(j);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }
}

/// Longest-path layers of the classes reachable from `source`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredSubgraph {
    pub source: usize,
    /// `layers[l]` holds the classes whose longest path from `source` has length `l`.
    pub layers: Vec<Vec<usize>>,
}

impl LayeredSubgraph {
    /// Length of the longest path leaving the source.
    pub fn depth(&self) -> usize {
        self.layers.len() - 1
    }
}

pub fn layered_subgraph(dg: &DependencyDigraph, source: usize) -> Result<LayeredSubgraph> {
    if source >= dg.len() {
        return Err(HcError::Domain(format!("class {source} out of range ({} classes)", dg.len())));
    }
    let order = dg
        .topological_order()
        .ok_or_else(|| HcError::InvalidConstraint("dependency digraph has a cycle".into()))?;
    let mut dist: Vec<Option<usize>> = vec![None; dg.len()];
    dist[source] = Some(0);
    for &i in &order {
        if let Some(d) = dist[i] {
            for &j in dg.successors(i) {
                if dist[j].is_none_or(|dj| dj < d + 1) {
                    dist[j] = Some(d + 1);
                }
            }
        }
    }
    let depth = dist.iter().flatten().copied().max().unwrap_or(0);
    let mut layers = vec![Vec::new(); depth + 1];
    for (i, d) in dist.iter().enumerate() {
        if let Some(d) = d {
            layers[*d].push(i);
        }
    }
    Ok(LayeredSubgraph { source, layers })
}

/// Dependency measure `Π_l (1 + Σ_{C ∈ I_l} |C|)`.
pub fn dm(dg: &DependencyDigraph, ls: &LayeredSubgraph) -> f64 {
    ls.layers
        .iter()
        .map(|layer| 1.0 + layer.iter().map(|&c| dg.classes[c].len() as f64).sum::<f64>())
        .product()
}

/// Maximum dependency measure over all classes; 1 for no constraints.
pub fn dmc(cs: &ConstraintSet) -> Result<f64> {
    let dg = DependencyDigraph::from_constraints(cs);
    let mut best = 1.0f64;
    for source in 0..dg.len() {
        best = best.max(dm(&dg, &layered_subgraph(&dg, source)?));
    }
    Ok(best)
}

/// Approximation factor `2(1 − k/n) / (3·DMC)` for `k` constraints on `n` vertices.
pub fn crrc_guarantee(n: usize, k: usize, dmc_value: f64) -> Result<f64> {
    if n == 0 || dmc_value < 1.0 || !dmc_value.is_finite() {
        return Err(HcError::Domain(format!("invalid guarantee inputs n={n}, dmc={dmc_value}")));
    }
    Ok(2.0 * (1.0 - k as f64 / n as f64) / (3.0 * dmc_value))
}
