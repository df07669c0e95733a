//! Fiedler vectors of the symmetric normalized Laplacian by power iteration.

use crate::graph::WeightedGraph;

const TOLERANCE: f64 = 1e-10;
const MAX_ITERATIONS: usize = 10_000;

/// Second eigenvector of `L = I − D^{-1/2} A D^{-1/2}` for a connected graph.
///
/// Iterates `M = 2I − L` (spectrum in `[0, 2]`, so the wanted vector is the
/// dominant one once the `D^{1/2}·1` direction is projected out).
/// Returns `None` for fewer than two vertices or a disconnected graph.
pub fn fiedler_vector(g: &WeightedGraph) -> Option<Vec<f64>> {
    let n = g.n();
    if n < 2 || g.components().len() > 1 {
        return None;
    }
    let deg: Vec<f64> = (0..n).map(|v| g.degree(v)).collect();
    if deg.iter().any(|&d| d <= 0.0) {
        return None;
    }
    let inv_sqrt: Vec<f64> = deg.iter().map(|d| 1.0 / d.sqrt()).collect();
    let mut trivial: Vec<f64> = deg.iter().map(|d| d.sqrt()).collect();
    normalize(&mut trivial);

    let mut x: Vec<f64> = (0..n)
        .map(|i| ((i as f64 + 1.0) * 0.618_033_988_749_894_9).fract() - 0.5)
        .collect();
    deflate(&mut x, &trivial);
    if normalize(&mut x) == 0.0 {
        return None;
    }
    let mut next = vec![0.0; n];
    for _ in 0..MAX_ITERATIONS {
        // next = x + D^{-1/2} A D^{-1/2} x
        for v in 0..n {
            let mut acc = 0.0;
            for &(u, w) in g.neighbors(v) {
                acc += w * inv_sqrt[u] * x[u];
            }
            next[v] = x[v] + inv_sqrt[v] * acc;
        }
        deflate(&mut next, &trivial);
        if normalize(&mut next) == 0.0 {
            return None;
        }
        let diff: f64 = next
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        std::mem::swap(&mut x, &mut next);
        if diff < TOLERANCE {
            break;
        }
    }
    Some(x)
}

fn deflate(x: &mut [f64], unit: &[f64]) {
    let dot: f64 = x.iter().zip(unit).map(|(a, b)| a * b).sum();
    for (xi, ui) in x.iter_mut().zip(unit) {
        *xi -= dot * ui;
    }
}

fn normalize(x: &mut [f64]) -> f64 {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for v in x.iter_mut() {
            *v /= norm;
        }
    }
    norm
}

/// Vertex order for sweep cuts: components by smallest vertex, each ordered
/// by its own Fiedler coordinates (ties and tiny components by id).
pub fn sweep_order(g: &WeightedGraph) -> Vec<usize> {
    let mut order = Vec::with_capacity(g.n());
    for comp in g.components() {
        if comp.len() < 3 {
            order.extend(comp);
            continue;
        }
        let sub = g.induced(&comp);
        match fiedler_vector(&sub) {
            Some(f) => {
                // sweep along D^{-1/2} f, the random-walk eigenvector
                let f: Vec<f64> = (0..comp.len()).map(|i| f[i] / sub.degree(i).sqrt()).collect();
                let mut idx: Vec<usize> = (0..comp.len()).collect();
                idx.sort_by(|&a, &b| f[a].total_cmp(&f[b]).then(a.cmp(&b)));
                order.extend(idx.into_iter().map(|i| comp[i]));
            }
            None => order.extend(comp),
        }
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_sweep_is_monotone() {
        let g = WeightedGraph::new(5, (0..4).map(|i| (i, i + 1, 1.0))).unwrap();
        let order = sweep_order(&g);
        assert!(order == vec![0, 1, 2, 3, 4] || order == vec![4, 3, 2, 1, 0], "{order:?}");
    }

    #[test]
    fn eigen_equation_holds() {
        let g = WeightedGraph::new(
            6,
            [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0), (2, 3, 0.1)],
        )
        .unwrap();
        let f = fiedler_vector(&g).unwrap();
        let n = g.n();
        let deg: Vec<f64> = (0..n).map(|v| g.degree(v)).collect();
        let lf: Vec<f64> = (0..n)
            .map(|v| {
                f[v] - g
                    .neighbors(v)
                    .iter()
                    .map(|&(u, w)| w * f[u] / (deg[u] * deg[v]).sqrt())
                    .sum::<f64>()
            })
            .collect();
        let lambda: f64 = lf.iter().zip(&f).map(|(a, b)| a * b).sum();
        for v in 0..n {
            assert!((lf[v] - lambda * f[v]).abs() < 1e-6);
        }
        assert!(lambda > 0.0 && lambda < 0.2);
    }

    #[test]
    fn disconnected_has_no_fiedler_vector() {
        let g = WeightedGraph::new(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(fiedler_vector(&g).is_none());
        assert_eq!(sweep_order(&g), vec![0, 1, 2, 3]);
    }
}
