//! Top-down clustering: constrained recursive sparsest / balanced / densest
//! cut, the hypergraph-regularized variant, and recursive spectral cuts.
//!
//! All constrained variants share one skeleton: on each cluster the active
//! constraints contract the cluster into supernodes, a cut is chosen over the
//! supernodes, and both expanded sides are recursed on. The side containing
//! the cluster's smallest vertex becomes the left child.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::constraints::{active_constraints, build, contract, BuildOutcome, ConstraintSet, SuperGraph};
use crate::cuts::{
    balanced_cut_with_floor, densest_cut_exact_weighted, densest_cut_local_weighted, hyper_sparsest_cut,
    sparsest_cut_exact_weighted, sparsest_cut_spectral_weighted, CutMode, DEFAULT_EXHAUSTIVE_LIMIT,
};
use crate::error::{HcError, Result};
use crate::graph::WeightedGraph;
use crate::objective::{Hyperedge3, RegularizedInstance};
use crate::tree::ClusterTree;

/// Step size used when a densest cut is requested in heuristic mode.
pub const DEFAULT_LOCAL_EPS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutKind {
    Sparsest,
    /// Minimum-weight cut with both sides at least `ratio` of the cluster.
    Balanced { ratio: f64 },
    Densest,
    HyperSparsest,
    /// Spectral sweep regardless of `cut_mode`.
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DivisiveMode {
    Exact,
    Heuristic,
    /// Local search with improvement factor `1 + ε` (densest cut only).
    Local(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivisiveConfig {
    pub cut_kind: CutKind,
    pub cut_mode: DivisiveMode,
    pub exhaustive_limit: usize,
    pub seed: Option<u64>,
}

impl Default for DivisiveConfig {
    fn default() -> Self {
        Self {
            cut_kind: CutKind::Sparsest,
            cut_mode: DivisiveMode::Exact,
            exhaustive_limit: DEFAULT_EXHAUSTIVE_LIMIT,
            seed: None,
        }
    }
}

impl DivisiveConfig {
    pub fn new(cut_kind: CutKind, cut_mode: DivisiveMode) -> Self {
        Self { cut_kind, cut_mode, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.exhaustive_limit < 2 {
            return Err(HcError::Domain(format!(
                "exhaustive limit must be >= 2, got {}",
                self.exhaustive_limit
            )));
        }
        if let DivisiveMode::Local(eps) = self.cut_mode {
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(HcError::Domain(format!("local mode needs eps > 0, got {eps}")));
            }
        }
        if let CutKind::Balanced { ratio } = self.cut_kind {
            if !(0.0..=0.5).contains(&ratio) {
                return Err(HcError::Domain(format!("balance ratio {ratio} outside [0, 1/2]")));
            }
        }
        Ok(())
    }

    fn cut_mode(&self) -> CutMode {
        match self.cut_mode {
            DivisiveMode::Exact => CutMode::Exact,
            DivisiveMode::Heuristic | DivisiveMode::Local(_) => CutMode::Heuristic,
        }
    }
}

/// Generic top-down recursion: `split` maps a cluster of size ≥ 2 to
/// `(left, right)`, both nonempty.
pub(crate) fn divide<F>(cluster: Vec<usize>, split: &mut F) -> Result<ClusterTree>
where
    F: FnMut(&[usize]) -> Result<(Vec<usize>, Vec<usize>)>,
{
    if cluster.len() == 1 {
        return Ok(ClusterTree::leaf(cluster[0]));
    }
    let (left, right) = split(&cluster)?;
    if left.is_empty() || right.is_empty() || left.len() + right.len() != cluster.len() {
        return Err(HcError::Internal(format!("invalid split of a cluster of {}", cluster.len())));
    }
    let l = divide(left, split)?;
    let r = divide(right, split)?;
    ClusterTree::join(l, r)
}

fn check_instance(g: &WeightedGraph, cs: &ConstraintSet) -> Result<Vec<usize>> {
    if g.n() == 0 {
        return Err(HcError::Domain("graph has no vertices".into()));
    }
    cs.check_vertices(g.n())?;
    let all: Vec<usize> = (0..g.n()).collect();
    if let BuildOutcome::Infeasible { cluster } = build(&all, cs) {
        return Err(HcError::Infeasible { cluster });
    }
    Ok(all)
}

/// Orders a split so the part holding the smallest vertex comes first.
fn oriented(a: Vec<usize>, b: Vec<usize>) -> (Vec<usize>, Vec<usize>) {
    if a.first() < b.first() {
        (a, b)
    } else {
        (b, a)
    }
}

/// Chooses the returned side (block ids) of a cut over the supergraph.
fn supergraph_cut(sg: &SuperGraph, cfg: &DivisiveConfig, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    let g = &sg.contracted;
    let sizes = sg.block_sizes();
    let limit = cfg.exhaustive_limit;
    let cut = match (cfg.cut_kind, cfg.cut_mode) {
        (CutKind::Spectral, _) | (CutKind::Sparsest, DivisiveMode::Heuristic) => {
            sparsest_cut_spectral_weighted(g, &sizes)?
        }
        (CutKind::Sparsest, _) => sparsest_cut_exact_weighted(g, &sizes, limit)?,
        (CutKind::Balanced { ratio }, _) => balanced_cut_with_floor(g, &sizes, ratio, cfg.cut_mode(), limit)?,
        (CutKind::Densest, DivisiveMode::Exact) => densest_cut_exact_weighted(g, &sizes, limit)?,
        (CutKind::Densest, DivisiveMode::Local(eps)) => densest_cut_local_weighted(g, &sizes, eps, rng)?,
        (CutKind::Densest, DivisiveMode::Heuristic) => {
            densest_cut_local_weighted(g, &sizes, DEFAULT_LOCAL_EPS, rng)?
        }
        (CutKind::HyperSparsest, _) => {
            return Err(HcError::Domain("hyper-sparsest cuts need a regularized instance (use rhsc)".into()))
        }
    };
    Ok(cut.side)
}

/// Shared constrained recursion over supergraph contractions.
pub fn constrained_divisive(g: &WeightedGraph, cs: &ConstraintSet, cfg: &DivisiveConfig) -> Result<ClusterTree> {
    cfg.validate()?;
    let all = check_instance(g, cs)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or(0));
    divide(all, &mut |cluster: &[usize]| {
        let active = active_constraints(cluster, cs);
        let sg = contract(g, cluster, &active);
        if sg.blocks.len() < 2 {
            return Err(HcError::Internal(format!(
                "cluster of {} vertices contracted to a single supernode",
                cluster.len()
            )));
        }
        let side = if sg.blocks.len() == 2 { vec![1] } else { supergraph_cut(&sg, cfg, &mut rng)? };
        let (a, b) = sg.expand_split(&side);
        Ok(oriented(a, b))
    })
}

fn with_kind(cfg: &DivisiveConfig, kind: CutKind) -> DivisiveConfig {
    DivisiveConfig { cut_kind: kind, ..cfg.clone() }
}

/// Constrained recursive sparsest cut.
pub fn crsc(g: &WeightedGraph, cs: &ConstraintSet, cfg: &DivisiveConfig) -> Result<ClusterTree> {
    constrained_divisive(g, cs, &with_kind(cfg, CutKind::Sparsest))
}

/// Constrained recursive balanced cut with the ratio from `cfg` (1/3 unless
/// `cfg.cut_kind` already is a balanced kind).
pub fn crbc(g: &WeightedGraph, cs: &ConstraintSet, cfg: &DivisiveConfig) -> Result<ClusterTree> {
    let kind = match cfg.cut_kind {
        k @ CutKind::Balanced { .. } => k,
        _ => CutKind::Balanced { ratio: 1.0 / 3.0 },
    };
    constrained_divisive(g, cs, &with_kind(cfg, kind))
}

/// Constrained recursive densest cut (for dissimilarity weights).
pub fn crdc(g: &WeightedGraph, cs: &ConstraintSet, cfg: &DivisiveConfig) -> Result<ClusterTree> {
    constrained_divisive(g, cs, &with_kind(cfg, CutKind::Densest))
}

/// Recursive spectral sweep cuts; with constraints the sweep runs over the
/// contracted supergraph so every candidate cut is feasible.
pub fn recursive_spectral(g: &WeightedGraph, cs: Option<&ConstraintSet>) -> Result<ClusterTree> {
    let empty = ConstraintSet::default();
    let cfg = DivisiveConfig::new(CutKind::Spectral, DivisiveMode::Heuristic);
    constrained_divisive(g, cs.unwrap_or(&empty), &cfg)
}

/// Recursive hypergraph sparsest cut on the gadget instance of `inst`.
/// Never fails on infeasible constraints: violations are merely penalized.
pub fn rhsc(inst: &RegularizedInstance, cfg: &DivisiveConfig) -> Result<ClusterTree> {
    cfg.validate()?;
    let g = &inst.graph;
    if g.n() == 0 {
        return Err(HcError::Domain("graph has no vertices".into()));
    }
    let hyperedges = inst.gadget_hyperedges();
    let mode = cfg.cut_mode();
    let limit = cfg.exhaustive_limit;
    let mut local = vec![usize::MAX; g.n()];
    divide((0..g.n()).collect(), &mut |cluster: &[usize]| {
        for (i, &v) in cluster.iter().enumerate() {
            local[v] = i;
        }
        let inside = |v: usize| local[v] != usize::MAX;
        let sub = g.induced(cluster);
        let active: Vec<Hyperedge3> = hyperedges
            .iter()
            .filter(|h| h.vertices().iter().all(|&v| inside(v)))
            .map(|h| Hyperedge3 { a: local[h.a], b: local[h.b], c: local[h.c], ..*h })
            .collect();
        let cut = hyper_sparsest_cut(&sub, &active, mode, limit);
        for &v in cluster {
            local[v] = usize::MAX;
        }
        let cut = cut?;
        let mut in_side = vec![false; cluster.len()];
        for &i in &cut.side {
            in_side[i] = true;
        }
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for (i, &v) in cluster.iter().enumerate() {
            if in_side[i] {
                b.push(v);
            } else {
                a.push(v);
            }
        }
        Ok(oriented(a, b))
    })
}

/// Instance on which constrained recursive densest cut does badly: a unit
/// clique on `0..n-3`, and `a = n-3`, `b = n-2`, `c = n-1` with `w(a,b) = W`,
/// `w(b,c) = 1`, weight `ε` from `c` to every clique vertex, and the
/// constraint `ab|c`. The heavy pair sits inside one supernode, so the
/// densest cut peels clique vertices first and separates `a` from `b` only in
/// a small cluster, while random cuts split the pair early.
pub fn densest_trap_instance(n: usize, heavy: f64, eps: f64) -> Result<(WeightedGraph, ConstraintSet)> {
    if n < 6 {
        return Err(HcError::Domain(format!("instance needs n >= 6, got {n}")));
    }
    if !(heavy >= 0.0 && heavy.is_finite() && eps >= 0.0 && eps.is_finite()) {
        return Err(HcError::Domain("weights must be finite and nonnegative".into()));
    }
    let m = n - 3;
    let (a, b, c) = (m, m + 1, m + 2);
    let mut edges = Vec::new();
    for u in 0..m {
        for v in u + 1..m {
            edges.push((u, v, 1.0));
        }
        edges.push((u, c, eps));
    }
    edges.push((a, b, heavy));
    edges.push((b, c, 1.0));
    let g = WeightedGraph::new(n, edges)?;
    let cs = ConstraintSet::from_tuples(&[(a, b, c)])?;
    Ok((g, cs))
}

/// [`densest_trap_instance`] with `W = n³` and `ε = 1/n²`.
pub fn densest_trap_default(n: usize) -> Result<(WeightedGraph, ConstraintSet)> {
    let nf = n as f64;
    densest_trap_instance(n, nf.powi(3), 1.0 / (nf * nf))
}
