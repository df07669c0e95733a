//! Undirected graphs with nonnegative edge weights.
//!
//! Weights are similarities or dissimilarities depending on the objective.
//! Parallel edges are merged by summing their weights, so every unordered
//! pair appears at most once.

use std::collections::BTreeMap;

use crate::error::{HcError, Result};

/// A stored edge, always with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    // neighbours sorted by id
    adj: Vec<Vec<(usize, f64)>>,
}

impl WeightedGraph {
    /// Builds a graph on `n` vertices; duplicate pairs are summed.
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (u, v, w) in edges {
            if u >= n {
                return Err(HcError::VertexOutOfRange { vertex: u, n });
            }
            if v >= n {
                return Err(HcError::VertexOutOfRange { vertex: v, n });
            }
            if u == v {
                return Err(HcError::SelfLoop(u));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(HcError::InvalidWeight { u, v, weight: w });
            }
            *merged.entry((u.min(v), u.max(v))).or_insert(0.0) += w;
        }
        Ok(Self::from_merged(n, merged))
    }

    /// Graph with no edges.
    pub fn empty(n: usize) -> Self {
        Self::from_merged(n, BTreeMap::new())
    }

    /// Unit-weight complete graph.
    pub fn complete(n: usize, w: f64) -> Self {
        let mut merged = BTreeMap::new();
        for u in 0..n {
            for v in u + 1..n {
                merged.insert((u, v), w);
            }
        }
        Self::from_merged(n, merged)
    }

    fn from_merged(n: usize, merged: BTreeMap<(usize, usize), f64>) -> Self {
        let mut adj = vec![Vec::new(); n];
        let edges: Vec<Edge> = merged
            .into_iter()
            .map(|((u, v), w)| Edge { u, v, w })
            .collect();
        for e in &edges {
            adj[e.u].push((e.v, e.w));
            adj[e.v].push((e.u, e.w));
        }
        for list in &mut adj {
            list.sort_by_key(|&(x, _)| x);
        }
        Self { n, edges, adj }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adj[v]
    }

    /// Weight of the pair `{u, v}`, zero when absent.
    pub fn weight(&self, u: usize, v: usize) -> f64 {
        match self.adj[u].binary_search_by_key(&v, |&(x, _)| x) {
            Ok(i) => self.adj[u][i].1,
            Err(_) => 0.0,
        }
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn degree(&self, v: usize) -> f64 {
        self.adj[v].iter().map(|&(_, w)| w).sum()
    }

    /// True when every weight is an integer (sums of such weights are exact in f64
    /// as long as they stay below 2^53).
    pub fn has_integer_weights(&self) -> bool {
        self.edges.iter().all(|e| e.w.fract() == 0.0 && e.w < 9.0e15)
    }

    /// Total weight of edges with exactly one endpoint in `side`.
    pub fn crossing_weight(&self, in_side: &[bool]) -> f64 {
        self.edges
            .iter()
            .filter(|e| in_side[e.u] != in_side[e.v])
            .map(|e| e.w)
            .sum()
    }

    /// Subgraph induced by `vertices`, relabelled so that `vertices[i]` becomes `i`.
    pub fn induced(&self, vertices: &[usize]) -> WeightedGraph {
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let mut merged = BTreeMap::new();
        for (i, &v) in vertices.iter().enumerate() {
            for &(u, w) in &self.adj[v] {
                let j = local[u];
                if j != usize::MAX && i < j {
                    merged.insert((i, j), w);
                }
            }
        }
        Self::from_merged(vertices.len(), merged)
    }

    /// Sum of two graphs on the same vertex set.
    pub fn merged_with(&self, other: &WeightedGraph) -> Result<WeightedGraph> {
        if other.n != self.n {
            return Err(HcError::Domain(format!(
                "cannot add graphs on {} and {} vertices",
                self.n, other.n
            )));
        }
        WeightedGraph::new(
            self.n,
            self.edges
                .iter()
                .chain(other.edges.iter())
                .map(|e| (e.u, e.v, e.w)),
        )
    }

    pub fn scaled(&self, alpha: f64) -> Result<WeightedGraph> {
        WeightedGraph::new(self.n, self.edges.iter().map(|e| (e.u, e.v, e.w * alpha)))
    }

    /// Row-major dense adjacency matrix.
    pub fn dense(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.n * self.n];
        for e in &self.edges {
            m[e.u * self.n + e.v] = e.w;
            m[e.v * self.n + e.u] = e.w;
        }
        m
    }

    /// Connected components over positive-weight edges, each sorted, ordered by smallest id.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![start];
            comp[start] = id;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &(u, w) in &self.adj[v] {
                    if w > 0.0 && comp[u] == usize::MAX {
                        comp[u] = id;
                        members.push(u);
                        stack.push(u);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let g = WeightedGraph::new(3, [(0, 1, 1.0), (1, 0, 1.0), (1, 2, 0.5)]).unwrap();
        assert_eq!(g.edges().len(), 2);
        assert_eq!(g.weight(0, 1), 2.0);
        assert_eq!(g.weight(1, 0), 2.0);
        assert_eq!(g.weight(0, 2), 0.0);
        assert_eq!(g.total_weight(), 2.5);
    }

    #[test]
    fn rejects_bad_edges() {
        assert_eq!(
            WeightedGraph::new(2, [(0, 0, 1.0)]),
            Err(HcError::SelfLoop(0))
        );
        assert!(matches!(
            WeightedGraph::new(2, [(0, 2, 1.0)]),
            Err(HcError::VertexOutOfRange { vertex: 2, n: 2 })
        ));
        assert!(matches!(
            WeightedGraph::new(2, [(0, 1, -1.0)]),
            Err(HcError::InvalidWeight { .. })
        ));
        assert!(WeightedGraph::new(2, [(0, 1, f64::NAN)]).is_err());
    }

    #[test]
    fn induced_relabels() {
        let g = WeightedGraph::new(4, [(0, 1, 1.0), (1, 3, 2.0), (2, 3, 4.0)]).unwrap();
        let h = g.induced(&[1, 3]);
        assert_eq!(h.n(), 2);
        assert_eq!(h.weight(0, 1), 2.0);
        assert_eq!(h.total_weight(), 2.0);
    }

    #[test]
    fn components_ignore_zero_edges() {
        let g = WeightedGraph::new(4, [(0, 1, 1.0), (2, 3, 0.0)]).unwrap();
        assert_eq!(g.components(), vec![vec![0, 1], vec![2], vec![3]]);
    }
}
