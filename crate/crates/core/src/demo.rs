//! Failure demonstration for constrained recursive densest cut: on the
//! [`densest_trap_instance`](crate::divisive::densest_trap_instance) family its reward falls
//! further behind constrained random cutting as `n` grows.

use serde::Serialize;

use crate::constraints::ConstraintSet;
use crate::divisive::{crdc, densest_trap_default, DivisiveConfig, DivisiveMode};
use crate::error::Result;
use crate::objective::dissimilarity_reward;
use crate::randomized::{crrc, monte_carlo};

#[derive(Debug, Clone, Serialize)]
pub struct DensestDemoRow {
    pub n: usize,
    /// `exact` or `local(eps)`.
    pub densest_mode: String,
    pub crdc_reward: f64,
    pub crrc_mean: f64,
    pub crrc_std_err: f64,
    /// `crdc_reward / crrc_mean`.
    pub ratio: f64,
    /// Same ratio with the constraint dropped from the densest-cut run.
    pub unconstrained_ratio: f64,
}

/// Exact densest cuts while the instance fits the enumeration limit, local
/// search with `ε = 1/n²` beyond it.
pub fn demo_mode(n: usize, exhaustive_limit: usize) -> DivisiveMode {
    if n - 1 <= exhaustive_limit {
        DivisiveMode::Exact
    } else {
        DivisiveMode::Local(1.0 / (n * n) as f64)
    }
}

pub fn densest_failure_demo(sizes: &[usize], trials: usize, seed: u64) -> Result<Vec<DensestDemoRow>> {
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let (g, cs) = densest_trap_default(n)?;
        let base = DivisiveConfig::default();
        let mode = demo_mode(n, base.exhaustive_limit);
        let cfg = DivisiveConfig { cut_mode: mode, seed: Some(seed), ..base };
        let reward = dissimilarity_reward(&crdc(&g, &cs, &cfg)?, &g)?;
        let free = dissimilarity_reward(&crdc(&g, &ConstraintSet::default(), &cfg)?, &g)?;
        let mc = monte_carlo(&g, trials, seed, |rng| crrc(&g, &cs, rng))?;
        rows.push(DensestDemoRow {
            n,
            densest_mode: match mode {
                DivisiveMode::Local(eps) => format!("local({eps})"),
                _ => "exact".into(),
            },
            crdc_reward: reward,
            crrc_mean: mc.mean,
            crrc_std_err: mc.std_err,
            ratio: reward / mc.mean,
            unconstrained_ratio: free / mc.mean,
        });
    }
    Ok(rows)
}
