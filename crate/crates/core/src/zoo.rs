//! UCI Zoo ingestion and the noisy-feature constrained clustering experiment.
//!
//! A reference tree is built by recursive spectral cuts on cosine similarities
//! of all 16 features; the same algorithm is then run on the first 10
//! features only, with and without constraints. Every tree is scored on the
//! full-feature similarities.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::constraints::{ConstraintSet, TripletConstraint};
use crate::divisive::recursive_spectral;
use crate::error::{HcError, Result};
use crate::graph::WeightedGraph;
use crate::objective::similarity_cost;
use crate::tree::ClusterTree;

pub const N_FEATURES: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZooRecord {
    pub name: String,
    pub features: [f64; N_FEATURES],
    pub class_label: u8,
}

/// Parses `name,f1,…,f16,class` rows. Repeated names keep their first row;
/// `limit` keeps the first `limit` records after deduplication.
pub fn parse_zoo(text: &str, limit: Option<usize>) -> Result<Vec<ZooRecord>> {
    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.trim();
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').map(str::trim).collect();
        if fields.len() != N_FEATURES + 2 {
            return Err(HcError::Parse {
                line,
                message: format!("expected {} comma-separated fields, found {}", N_FEATURES + 2, fields.len()),
            });
        }
        let mut features = [0.0; N_FEATURES];
        for (slot, field) in features.iter_mut().zip(&fields[1..=N_FEATURES]) {
            *slot = field.parse().map_err(|_| HcError::Parse {
                line,
                message: format!("non-numeric attribute {field:?}"),
            })?;
        }
        let class_label: u8 = fields[N_FEATURES + 1]
            .parse()
            .ok()
            .filter(|c| (1..=7).contains(c))
            .ok_or_else(|| HcError::Parse {
                line,
                message: format!("class must be in 1..=7, found {:?}", fields[N_FEATURES + 1]),
            })?;
        if seen.insert(fields[0].to_string()) {
            records.push(ZooRecord { name: fields[0].to_string(), features, class_label });
        }
    }
    if let Some(k) = limit {
        records.truncate(k);
    }
    Ok(records)
}

pub fn load_zoo(path: impl AsRef<Path>, limit: Option<usize>) -> Result<Vec<ZooRecord>> {
    parse_zoo(&fs::read_to_string(path)?, limit)
}

/// Complete graph of cosine similarities over the first `dims` features;
/// an all-zero truncated vector has similarity 0 to everything.
pub fn cosine_similarity(records: &[ZooRecord], dims: usize) -> Result<WeightedGraph> {
    if !(1..=N_FEATURES).contains(&dims) {
        return Err(HcError::Domain(format!("dims must be in 1..={N_FEATURES}, got {dims}")));
    }
    // squared norms; one sqrt per pair keeps identical vectors at exactly 1
    let norms: Vec<f64> = records.iter().map(|r| r.features[..dims].iter().map(|x| x * x).sum::<f64>()).collect();
    let mut edges = Vec::new();
    for i in 0..records.len() {
        for j in i + 1..records.len() {
            if norms[i] == 0.0 || norms[j] == 0.0 {
                continue;
            }
            let dot: f64 = records[i].features[..dims]
                .iter()
                .zip(&records[j].features[..dims])
                .map(|(a, b)| a * b)
                .sum();
            // clamp rounding noise above 1
            edges.push((i, j, (dot / (norms[i] * norms[j]).sqrt()).min(1.0)));
        }
    }
    WeightedGraph::new(records.len(), edges)
}

/// Constraints pinning the root split `(L, R)` of `tree`: consecutive pairs of
/// each side (sorted) must merge before the other side's smallest vertex.
/// Their Aho graph has exactly the components `L` and `R`.
pub fn top_split_constraints(tree: &ClusterTree) -> Result<ConstraintSet> {
    let Some((l, r)) = tree.children(tree.root()) else {
        return Ok(ConstraintSet::default());
    };
    let mut left = tree.leaves_under(l);
    let mut right = tree.leaves_under(r);
    left.sort_unstable();
    right.sort_unstable();
    let mut cs = ConstraintSet::default();
    for (side, other) in [(&left, right[0]), (&right, left[0])] {
        for w in side.windows(2) {
            cs.push(TripletConstraint::new(w[0], w[1], other)?, 1.0)?;
        }
    }
    Ok(cs)
}

/// Values reported for the Zoo study in the literature, by number of animals:
/// `(animals, opt, unconstrained, constrained, improvement %)`.
pub const REFERENCE_TABLE: [(usize, f64, f64, f64, f64); 4] = [
    (20, 1137.0, 1286.0, 1142.0, 12.63),
    (50, 23088.0, 25216.0, 23443.0, 7.68),
    (80, 89256.0, 99211.0, 90419.0, 9.85),
    (100, 171290.0, 190205.0, 173499.0, 9.75),
];

#[derive(Debug, Clone, Serialize)]
pub struct ReferenceRow {
    pub animals: usize,
    pub opt_cost: f64,
    pub unconstrained_noisy_cost: f64,
    pub constrained_noisy_cost: f64,
    pub improvement_pct: f64,
}

pub fn reference_rows() -> Vec<ReferenceRow> {
    REFERENCE_TABLE
        .iter()
        .map(|&(animals, opt, unc, con, imp)| ReferenceRow {
            animals,
            opt_cost: opt,
            unconstrained_noisy_cost: unc,
            constrained_noisy_cost: con,
            improvement_pct: imp,
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub schema: u32,
    pub animals: usize,
    pub opt_cost: f64,
    pub unconstrained_noisy_cost: f64,
    pub constrained_noisy_cost: f64,
    /// `(unconstrained − constrained) / opt · 100`.
    pub improvement_pct: f64,
    pub dims_full: usize,
    pub dims_noisy: usize,
    pub n_constraints: usize,
    pub constraint_source: String,
    pub algorithm: String,
    /// Deterministic pipeline: no randomness is consumed.
    pub seed: Option<u64>,
    pub reference: Vec<ReferenceRow>,
}

/// Where the experiment's constraints come from.
#[derive(Debug, Clone)]
pub enum ConstraintSource {
    /// Pin the full-feature tree's root split.
    TopSplit,
    Given { label: String, constraints: ConstraintSet },
}

pub fn zoo_experiment(
    records: &[ZooRecord],
    source: ConstraintSource,
    dims_full: usize,
    dims_noisy: usize,
) -> Result<ExperimentReport> {
    if records.len() < 2 {
        return Err(HcError::Domain(format!("need at least 2 animals, got {}", records.len())));
    }
    let full = cosine_similarity(records, dims_full)?;
    let noisy = cosine_similarity(records, dims_noisy)?;
    let opt_tree = recursive_spectral(&full, None)?;
    let (label, cs) = match source {
        ConstraintSource::TopSplit => ("top-split".to_string(), top_split_constraints(&opt_tree)?),
        ConstraintSource::Given { label, constraints } => (label, constraints),
    };
    let unconstrained = recursive_spectral(&noisy, None)?;
    let constrained = recursive_spectral(&noisy, Some(&cs))?;
    let opt_cost = similarity_cost(&opt_tree, &full)?;
    let unc = similarity_cost(&unconstrained, &full)?;
    let con = similarity_cost(&constrained, &full)?;
    Ok(ExperimentReport {
        schema: 1,
        animals: records.len(),
        opt_cost,
        unconstrained_noisy_cost: unc,
        constrained_noisy_cost: con,
        improvement_pct: (unc - con) / opt_cost * 100.0,
        dims_full,
        dims_noisy,
        n_constraints: cs.len(),
        constraint_source: label,
        algorithm: "recursive-spectral".into(),
        seed: None,
        reference: reference_rows(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::{build, count_violations, BuildOutcome};

    fn row(name: &str, f: [u8; 16], class: u8) -> String {
        let feats: Vec<String> = f.iter().map(u8::to_string).collect();
        format!("{name},{},{class}", feats.join(","))
    }

    #[test]
    fn parse_examples() {
        let text = row("aardvark", [1, 0, 0, 1, 0, 0, 1, 1, 1, 1, 0, 0, 4, 0, 0, 1], 1);
        let recs = parse_zoo(&text, None).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].features[12], 4.0);
        assert_eq!(recs[0].class_label, 1);
        assert!(matches!(parse_zoo("a,1,0,0,0,0,0,0,0,0,0,0,0,0,0,0,1", None), Err(HcError::Parse { line: 1, .. })));
        let dup = format!("{text}\n{}", row("aardvark", [0; 16], 2));
        assert_eq!(parse_zoo(&dup, None).unwrap().len(), 1);
    }

    #[test]
    fn cosine_examples() {
        let mk = |f: [f64; 16]| ZooRecord { name: String::new(), features: f, class_label: 1 };
        let mut x = [0.0; 16];
        x[0] = 1.0;
        x[1] = 1.0;
        let mut y = [0.0; 16];
        y[0] = 1.0;
        let mut z = [0.0; 16];
        z[1] = 1.0;
        let g = cosine_similarity(&[mk(x), mk(y), mk(x), mk(z), mk([0.0; 16])], 16).unwrap();
        assert!((g.weight(0, 1) - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(g.weight(0, 2), 1.0);
        assert_eq!(g.weight(1, 3), 0.0);
        assert_eq!(g.degree(4), 0.0);
        assert!(cosine_similarity(&[mk(x)], 0).is_err());
        assert!(cosine_similarity(&[mk(x)], 17).is_err());
    }

    #[test]
    fn top_split_constraints_pin_the_root() {
        let t = ClusterTree::from_newick("((0,(3,5)),((1,2),4));").unwrap();
        let cs = top_split_constraints(&t).unwrap();
        assert_eq!(cs.len(), 4);
        assert_eq!(count_violations(&t, &cs).unwrap(), 0);
        let BuildOutcome::Feasible(b) = build(&[0, 1, 2, 3, 4, 5], &cs) else { panic!() };
        let (l, r) = b.children(b.root()).unwrap();
        let mut l = b.leaves_under(l);
        let mut r = b.leaves_under(r);
        l.sort_unstable();
        r.sort_unstable();
        assert_eq!((l, r), (vec![0, 3, 5], vec![1, 2, 4]));
    }
}
