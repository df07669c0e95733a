//! One-shot cut subroutines used by the divisive and randomized algorithms.
//!
//! Exact oracles enumerate all `2^(n-1) - 1` bipartitions with vertex 0 fixed
//! outside the returned side; the heuristics sweep prefixes of a spectral
//! ordering. Every oracle also has a `*_weighted` form where vertex `i`
//! stands for `sizes[i]` original vertices (supernodes): side sizes in the
//! sparsity and balance conditions are then sums of `sizes`.
//!
//! Ties are broken deterministically: values within a relative `1e-10` are
//! considered equal, then the lexicographically smallest sorted side wins
//! (the hypergraph oracle first prefers a smaller hyperedge contribution).

use rand::Rng;

use crate::error::{HcError, Result};
use crate::graph::WeightedGraph;
use crate::objective::Hyperedge3;
use crate::spectral::sweep_order;

/// Default largest `n` for exhaustive cut enumeration (about 2M cuts).
pub const DEFAULT_EXHAUSTIVE_LIMIT: usize = 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutMode {
    /// Exhaustive enumeration, errors above the exhaustive limit.
    Exact,
    /// Spectral sweep.
    Heuristic,
}

/// A bipartition `(side, complement)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    /// Sorted vertex ids of the returned side.
    pub side: Vec<usize>,
    /// Total weight across the cut.
    pub crossing_weight: f64,
    /// Sparsity, density, or weight depending on the oracle.
    pub objective_value: f64,
}

impl Cut {
    pub fn membership(&self, n: usize) -> Vec<bool> {
        let mut in_side = vec![false; n];
        for &v in &self.side {
            in_side[v] = true;
        }
        in_side
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Goal {
    Minimize,
    Maximize,
}

fn near(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-10 * a.abs().max(b.abs())
}

/// Lexicographic order on the sorted vertex lists encoded by two masks.
fn lex_less(a: usize, b: usize) -> bool {
    if a == b {
        return false;
    }
    let x = (a ^ b).trailing_zeros();
    let (holder_is_a, other) = if a >> x & 1 == 1 { (true, b) } else { (false, a) };
    let other_has_more = x + 1 < usize::BITS && other >> (x + 1) != 0;
    if other_has_more {
        holder_is_a
    } else {
        !holder_is_a
    }
}

fn check_sizes(g: &WeightedGraph, sizes: &[usize]) -> Result<usize> {
    if sizes.len() != g.n() {
        return Err(HcError::Domain(format!(
            "{} sizes for a graph on {} vertices",
            sizes.len(),
            g.n()
        )));
    }
    if sizes.contains(&0) {
        return Err(HcError::Domain("vertex sizes must be positive".into()));
    }
    if g.n() < 2 {
        return Err(HcError::Domain(format!("need at least 2 vertices to cut, got {}", g.n())));
    }
    Ok(sizes.iter().sum())
}

fn check_limit(n: usize, limit: usize) -> Result<()> {
    if n > limit || n > 40 {
        return Err(HcError::TooLarge { n, limit: limit.min(40) });
    }
    Ok(())
}

/// Cut weight of every mask over vertices `1..n` (bit `i` is vertex `i + 1`).
fn cut_table(g: &WeightedGraph) -> Vec<f64> {
    let n = g.n();
    let adj = g.dense();
    let deg: Vec<f64> = (0..n).map(|v| g.degree(v)).collect();
    let residue = 1e-12 * g.total_weight();
    let mut table = vec![0.0; 1usize << (n - 1)];
    for mask in 1..table.len() {
        let v = mask.trailing_zeros() as usize + 1;
        let rest = mask & (mask - 1);
        let mut inner = 0.0;
        let mut r = rest;
        while r != 0 {
            inner += adj[v * n + r.trailing_zeros() as usize + 1];
            r &= r - 1;
        }
        let crossing = table[rest] + deg[v] - 2.0 * inner;
        // cancellation residue where the true crossing weight is zero
        table[mask] = if crossing <= residue { 0.0 } else { crossing };
    }
    table
}

fn size_table(sizes: &[usize]) -> Vec<usize> {
    let mut table = vec![0usize; 1usize << (sizes.len() - 1)];
    for mask in 1..table.len() {
        let v = mask.trailing_zeros() as usize + 1;
        table[mask] = table[mask & (mask - 1)] + sizes[v];
    }
    table
}

fn mask_to_side(mask: usize) -> Vec<usize> {
    (0..usize::BITS as usize)
        .filter(|&b| mask >> b & 1 == 1)
        .map(|b| b + 1)
        .collect()
}

/// Best mask under `goal` with the tie rules above; `value` returns `None`
/// for inadmissible masks.
fn select_mask(
    n_masks: usize,
    goal: Goal,
    value: impl Fn(usize) -> Option<f64>,
    secondary: Option<&[f64]>,
) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for mask in 1..n_masks {
        let Some(v) = value(mask) else { continue };
        let replace = match best {
            None => true,
            Some((bm, bv)) => {
                if !near(v, bv) {
                    match goal {
                        Goal::Minimize => v < bv,
                        Goal::Maximize => v > bv,
                    }
                } else if let Some(sec) = secondary.filter(|s| !near(s[mask], s[bm])) {
                    sec[mask] < sec[bm]
                } else {
                    lex_less(mask, bm)
                }
            }
        };
        if replace {
            best = Some((mask, v));
        }
    }
    best
}

fn exact_cut(
    g: &WeightedGraph,
    sizes: &[usize],
    limit: usize,
    goal: Goal,
    objective: impl Fn(f64, usize, usize) -> Option<f64>,
    secondary: Option<&WeightedGraph>,
) -> Result<Cut> {
    let total = check_sizes(g, sizes)?;
    check_limit(g.n(), limit)?;
    let cuts = cut_table(g);
    let side_sizes = size_table(sizes);
    let sec = secondary.map(cut_table);
    let (mask, value) = select_mask(
        cuts.len(),
        goal,
        |m| objective(cuts[m], side_sizes[m], total),
        sec.as_deref(),
    )
    .ok_or_else(|| HcError::Domain("no admissible cut".into()))?;
    Ok(Cut {
        side: mask_to_side(mask),
        crossing_weight: cuts[mask],
        objective_value: value,
    })
}

/// Best prefix of `order` under `goal`; the returned side excludes vertex 0.
fn sweep_cut(
    g: &WeightedGraph,
    sizes: &[usize],
    order: &[usize],
    goal: Goal,
    objective: impl Fn(f64, usize, usize) -> Option<f64>,
) -> Result<Cut> {
    let total = check_sizes(g, sizes)?;
    let n = g.n();
    let mut in_prefix = vec![false; n];
    let residue = 1e-12 * g.total_weight();
    let mut crossing = 0.0;
    let mut prefix_size = 0;
    let mut best: Option<(usize, f64, f64)> = None;
    for (k, &v) in order.iter().enumerate().take(n - 1) {
        let mut inner = 0.0;
        for &(u, w) in g.neighbors(v) {
            if in_prefix[u] {
                inner += w;
            }
        }
        crossing = crossing + g.degree(v) - 2.0 * inner;
        // incremental updates leave rounding residue where the true value is zero
        if crossing <= residue {
            crossing = 0.0;
        }
        in_prefix[v] = true;
        prefix_size += sizes[v];
        if let Some(value) = objective(crossing, prefix_size, total) {
            let better = match best {
                None => true,
                Some((_, bv, _)) => match goal {
                    Goal::Minimize => value < bv && !near(value, bv),
                    Goal::Maximize => value > bv && !near(value, bv),
                },
            };
            if better {
                best = Some((k + 1, value, crossing));
            }
        }
    }
    let (len, value, crossing) =
        best.ok_or_else(|| HcError::Domain("no admissible sweep cut".into()))?;
    let mut side: Vec<usize> = order[..len].to_vec();
    if side.contains(&0) {
        side = order[len..].to_vec();
    }
    side.sort_unstable();
    Ok(Cut { side, crossing_weight: crossing, objective_value: value })
}

fn sparsity(cut: f64, s: usize, total: usize) -> Option<f64> {
    Some(cut / (s as f64 * (total - s) as f64))
}

fn unit_sizes(g: &WeightedGraph) -> Vec<usize> {
    vec![1; g.n()]
}

/// Exact minimizer of `w(S, S̄) / (|S|·|S̄|)`.
pub fn sparsest_cut_exact(g: &WeightedGraph, limit: usize) -> Result<Cut> {
    sparsest_cut_exact_weighted(g, &unit_sizes(g), limit)
}

pub fn sparsest_cut_exact_weighted(g: &WeightedGraph, sizes: &[usize], limit: usize) -> Result<Cut> {
    exact_cut(g, sizes, limit, Goal::Minimize, sparsity, None)
}

/// Sweep cut over the Fiedler ordering minimizing sparsity. Disconnected
/// graphs yield a zero-weight split along a component boundary.
pub fn sparsest_cut_spectral(g: &WeightedGraph) -> Result<Cut> {
    sparsest_cut_spectral_weighted(g, &unit_sizes(g))
}

pub fn sparsest_cut_spectral_weighted(g: &WeightedGraph, sizes: &[usize]) -> Result<Cut> {
    check_sizes(g, sizes)?;
    sweep_cut(g, sizes, &sweep_order(g), Goal::Minimize, sparsity)
}

pub fn sparsest_cut(g: &WeightedGraph, mode: CutMode, limit: usize) -> Result<Cut> {
    match mode {
        CutMode::Exact => sparsest_cut_exact(g, limit),
        CutMode::Heuristic => sparsest_cut_spectral(g),
    }
}

/// Smallest side size allowed by `ratio` for `total` vertices.
pub fn balance_floor(ratio: f64, total: usize) -> usize {
    (ratio * total as f64 - 1e-9).ceil().max(0.0) as usize
}

/// Minimum-weight cut with both sides of size at least `⌈ratio·n⌉`.
pub fn balanced_cut(g: &WeightedGraph, ratio: f64, mode: CutMode, limit: usize) -> Result<Cut> {
    balanced_cut_weighted(g, &unit_sizes(g), ratio, mode, limit)
}

pub fn balanced_cut_weighted(
    g: &WeightedGraph,
    sizes: &[usize],
    ratio: f64,
    mode: CutMode,
    limit: usize,
) -> Result<Cut> {
    if !(0.0..=1.0).contains(&ratio) {
        return Err(HcError::Domain(format!("balance ratio {ratio} outside [0, 1]")));
    }
    let total = check_sizes(g, sizes)?;
    let floor = balance_floor(ratio, total);
    if 2 * floor > total {
        return Err(HcError::Domain(format!(
            "no cut of {total} vertices has both sides >= {floor}"
        )));
    }
    let objective = move |cut: f64, s: usize, t: usize| (s.min(t - s) >= floor).then_some(cut);
    match mode {
        CutMode::Exact => exact_cut(g, sizes, limit, Goal::Minimize, objective, None),
        CutMode::Heuristic => sweep_cut(g, sizes, &sweep_order(g), Goal::Minimize, objective),
    }
}

/// Balanced cut for the divisive setting: the floor `⌈ratio·n⌉` is lowered to
/// the most balanced split available when supernode sizes make it
/// unattainable, so the recursion never deadlocks.
pub fn balanced_cut_with_floor(
    g: &WeightedGraph,
    sizes: &[usize],
    ratio: f64,
    mode: CutMode,
    limit: usize,
) -> Result<Cut> {
    let total = check_sizes(g, sizes)?;
    let best_min_side = match mode {
        CutMode::Exact => {
            check_limit(g.n(), limit)?;
            size_table(sizes).iter().skip(1).map(|&s| s.min(total - s)).max().unwrap_or(0)
        }
        CutMode::Heuristic => {
            let order = sweep_order(g);
            let mut prefix = 0;
            let mut best = 0;
            for &v in &order[..g.n() - 1] {
                prefix += sizes[v];
                best = best.max(prefix.min(total - prefix));
            }
            best
        }
    };
    let floor = balance_floor(ratio, total).min(best_min_side);
    let objective = move |cut: f64, s: usize, t: usize| (s.min(t - s) >= floor).then_some(cut);
    match mode {
        CutMode::Exact => exact_cut(g, sizes, limit, Goal::Minimize, objective, None),
        CutMode::Heuristic => sweep_cut(g, sizes, &sweep_order(g), Goal::Minimize, objective),
    }
}

/// Exact maximizer of `w(S, S̄) / (|S|·|S̄|)`.
pub fn densest_cut_exact(g: &WeightedGraph, limit: usize) -> Result<Cut> {
    densest_cut_exact_weighted(g, &unit_sizes(g), limit)
}

pub fn densest_cut_exact_weighted(g: &WeightedGraph, sizes: &[usize], limit: usize) -> Result<Cut> {
    exact_cut(g, sizes, limit, Goal::Maximize, sparsity, None)
}

/// Locally densest cut: from a random cut, move single vertices while the
/// density grows by a factor of at least `1 + eps`.
pub fn densest_cut_local<R: Rng + ?Sized>(g: &WeightedGraph, eps: f64, rng: &mut R) -> Result<Cut> {
    densest_cut_local_weighted(g, &unit_sizes(g), eps, rng)
}

pub fn densest_cut_local_weighted<R: Rng + ?Sized>(
    g: &WeightedGraph,
    sizes: &[usize],
    eps: f64,
    rng: &mut R,
) -> Result<Cut> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(HcError::Domain(format!("local search needs eps > 0, got {eps}")));
    }
    let total = check_sizes(g, sizes)?;
    let n = g.n();
    let all: Vec<usize> = (0..n).collect();
    let (start, _) = random_cut(&all, rng)?;
    let mut in_side = vec![false; n];
    for &v in &start {
        in_side[v] = true;
    }
    let mut side_size: usize = start.iter().map(|&v| sizes[v]).sum();
    let mut crossing = g.crossing_weight(&in_side);
    let density = |c: f64, s: usize| c / (s as f64 * (total - s) as f64);
    loop {
        let current = density(crossing, side_size);
        let mut moved = false;
        for v in 0..n {
            let new_size = if in_side[v] { side_size - sizes[v] } else { side_size + sizes[v] };
            if new_size == 0 || new_size == total {
                continue;
            }
            // edges to v's own side become cut, edges to the other side uncut
            let mut same = 0.0;
            let mut other = 0.0;
            for &(u, w) in g.neighbors(v) {
                if in_side[u] == in_side[v] {
                    same += w;
                } else {
                    other += w;
                }
            }
            let new_crossing = (crossing + same - other).max(0.0);
            let candidate = density(new_crossing, new_size);
            if candidate > current && candidate >= (1.0 + eps) * current {
                in_side[v] = !in_side[v];
                side_size = new_size;
                crossing = new_crossing;
                moved = true;
                break;
            }
        }
        if !moved {
            break;
        }
    }
    let keep = !in_side[0];
    let side: Vec<usize> = (0..n).filter(|&v| in_side[v] == keep).collect();
    let s: usize = side.iter().map(|&v| sizes[v]).sum();
    Ok(Cut {
        side,
        crossing_weight: crossing,
        objective_value: density(crossing, s),
    })
}

/// Triangle edge weights `(w'_ab, w'_ac, w'_bc)` whose cut weights equal the
/// hyperedge's split weights.
pub fn gadget_triangle(h: &Hyperedge3) -> Result<[f64; 3]> {
    let ab = (h.w_bc_a + h.w_ac_b - h.w_ab_c) / 2.0;
    let ac = (h.w_bc_a + h.w_ab_c - h.w_ac_b) / 2.0;
    let bc = (h.w_ac_b + h.w_ab_c - h.w_bc_a) / 2.0;
    if ab < 0.0 || ac < 0.0 || bc < 0.0 {
        return Err(HcError::TriangleInequality {
            w_ab_c: h.w_ab_c,
            w_ac_b: h.w_ac_b,
            w_bc_a: h.w_bc_a,
        });
    }
    Ok([ab, ac, bc])
}

/// Graph on `n` vertices holding the triangles of all hyperedges.
pub fn gadget_to_graph(n: usize, hyperedges: &[Hyperedge3]) -> Result<WeightedGraph> {
    let mut edges = Vec::with_capacity(3 * hyperedges.len());
    for h in hyperedges {
        let [ab, ac, bc] = gadget_triangle(h)?;
        edges.extend([(h.a, h.b, ab), (h.a, h.c, ac), (h.b, h.c, bc)]);
    }
    WeightedGraph::new(n, edges)
}

/// Minimizes `(w(S, S̄) + Σ hyperedge split weights) / (|S|·|S̄|)` by reducing
/// to sparsest cut on the graph plus gadget triangles.
pub fn hyper_sparsest_cut(
    g: &WeightedGraph,
    hyperedges: &[Hyperedge3],
    mode: CutMode,
    limit: usize,
) -> Result<Cut> {
    let gadget = gadget_to_graph(g.n(), hyperedges)?;
    let combined = g.merged_with(&gadget)?;
    match mode {
        CutMode::Exact => exact_cut(
            &combined,
            &unit_sizes(g),
            limit,
            Goal::Minimize,
            sparsity,
            Some(&gadget),
        ),
        CutMode::Heuristic => sparsest_cut_spectral(&combined),
    }
}

/// Independent fair coin per vertex, resampled until both sides are nonempty.
pub fn random_cut<R: Rng + ?Sized>(cluster: &[usize], rng: &mut R) -> Result<(Vec<usize>, Vec<usize>)> {
    if cluster.len() < 2 {
        return Err(HcError::Domain(format!(
            "random cut needs at least 2 vertices, got {}",
            cluster.len()
        )));
    }
    loop {
        let mut left = Vec::new();
        let mut right = Vec::new();
        for &v in cluster {
            if rng.gen::<bool>() {
                left.push(v);
            } else {
                right.push(v);
            }
        }
        if !left.is_empty() && !right.is_empty() {
            return Ok((left, right));
        }
    }
}
