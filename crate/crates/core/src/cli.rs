//! Command-line front end. Reports go to stdout as JSON (default) or TSV.
//!
//! Exit codes: 0 success, 1 usage error, 2 infeasible constraints, 3 data error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::constraints::{build, count_violations, tree_to_triplets, BuildOutcome, ConstraintSet};
use crate::cuts::DEFAULT_EXHAUSTIVE_LIMIT;
use crate::demo::densest_failure_demo;
use crate::divisive::{crbc, crdc, crsc, recursive_spectral, rhsc, DivisiveConfig, DivisiveMode};
use crate::error::{HcError, Result};
use crate::graph::WeightedGraph;
use crate::io::{emit_constraints, load_constraints, load_graph, load_tree, tree_to_json};
use crate::objective::{dissimilarity_reward, regularized_cost, similarity_cost, RegularizedInstance};
use crate::oracle::{opt_dissimilarity, opt_regularized, opt_similarity};
use crate::randomized::{
    crrc, crrc_guarantee, dmc, local_search_derandomized, monte_carlo, rrc, rrc_expected_reward, DependencyDigraph,
};
use crate::tree::ClusterTree;
use crate::zoo::{load_zoo, zoo_experiment, ConstraintSource};

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_DATA: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "chc", version, about = "Hierarchical clustering with triplet constraints")]
pub struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Tsv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Crsc,
    Crbc,
    Rhsc,
    Crdc,
    Rrc,
    Crrc,
    Localsearch,
    Spectral,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutArg {
    Exact,
    Spectral,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    Sim,
    Dis,
    Reg,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide whether constraints admit a tree.
    Check {
        #[arg(long)]
        constraints: PathBuf,
        /// Graph whose vertex count fixes the leaf set.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Number of leaves (defaults to the largest constrained id + 1).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Convert a tree into an equivalent set of triplet constraints.
    Convert {
        #[arg(long)]
        tree: PathBuf,
    },
    /// Build a tree with one of the clustering algorithms.
    Cluster {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        constraints: Option<PathBuf>,
        #[arg(long, value_enum)]
        alg: Algorithm,
        #[arg(long, value_enum, default_value_t = CutArg::Exact)]
        cut: CutArg,
        /// Regularization strength for rhsc.
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Monte Carlo repetitions for the randomized algorithms.
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_LIMIT)]
        limit: usize,
    },
    /// Evaluate an objective on a given tree.
    Cost {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        tree: PathBuf,
        #[arg(long, value_enum, default_value_t = Objective::Sim)]
        objective: Objective,
        #[arg(long)]
        constraints: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
    },
    /// Dependency classes, measure, and the constrained random-cut guarantee.
    Depmeasure {
        #[arg(long)]
        constraints: PathBuf,
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Exact optimum by subset dynamic programming (small graphs).
    Oracle {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        constraints: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Objective::Sim)]
        objective: Objective,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
    },
    /// Noisy-feature Zoo experiment.
    Zoo {
        /// UCI zoo.data file (defaults to the bundled copy).
        #[arg(long)]
        data: Option<PathBuf>,
        /// Constraint file; omitted means pin the full-feature tree's top split.
        #[arg(long)]
        constraints: Option<PathBuf>,
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long, default_value_t = 16)]
        dims_full: usize,
        #[arg(long, default_value_t = 10)]
        dims_noisy: usize,
    },
    /// Constrained densest cut versus constrained random cutting on the bad family.
    DemoDensest {
        #[arg(long, value_delimiter = ',', default_values_t = [10usize, 20, 40])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Path of the bundled Zoo data.
pub fn bundled_zoo_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join("zoo.data")
}

/// Parses `args` (including the program name), runs the command, and
/// returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(report) => {
            let _ = out.write_all(render(&report, cli.format).as_bytes());
            0
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Infeasible(report)) => {
            let _ = out.write_all(render(&report, cli.format).as_bytes());
            let _ = writeln!(err, "infeasible: the constraints admit no tree");
            EXIT_INFEASIBLE
        }
        Err(Failure::Data(e)) => {
            if let HcError::Infeasible { cluster } = &e {
                let _ = writeln!(err, "infeasible: {e}");
                let report = json!({"schema": 1, "feasible": false, "conflict_cluster": cluster});
                let _ = out.write_all(render(&report, cli.format).as_bytes());
                return EXIT_INFEASIBLE;
            }
            let _ = writeln!(err, "error: {e}");
            EXIT_DATA
        }
    }
}

enum Failure {
    Usage(String),
    Infeasible(Value),
    Data(HcError),
}

impl From<HcError> for Failure {
    fn from(e: HcError) -> Self {
        Failure::Data(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn optional_constraints(path: &Option<PathBuf>) -> Result<ConstraintSet> {
    path.as_ref().map_or_else(|| Ok(ConstraintSet::default()), load_constraints)
}

fn leaf_count(cs: &ConstraintSet, graph: &Option<PathBuf>, n: Option<usize>) -> Result<usize> {
    let from_constraints = cs.max_vertex().map_or(0, |v| v + 1);
    let n = match (graph, n) {
        (Some(p), _) => load_graph(p)?.n(),
        (None, Some(n)) => n,
        (None, None) => from_constraints,
    };
    cs.check_vertices(n)?;
    Ok(n)
}

fn tree_value(tree: &ClusterTree) -> Value {
    json!({"newick": tree.to_newick(), "json": tree_to_json(tree)})
}

fn execute(command: &Command) -> CliResult<Value> {
    match command {
        Command::Check { constraints, graph, n } => {
            let cs = load_constraints(constraints)?;
            let n = leaf_count(&cs, graph, *n)?;
            let vertices: Vec<usize> = (0..n).collect();
            match build(&vertices, &cs) {
                BuildOutcome::Feasible(tree) => Ok(json!({
                    "schema": 1,
                    "feasible": true,
                    "n": n,
                    "constraints": cs.len(),
                    "tree": tree.to_newick(),
                })),
                BuildOutcome::Infeasible { cluster } => Err(Failure::Infeasible(json!({
                    "schema": 1,
                    "feasible": false,
                    "n": n,
                    "constraints": cs.len(),
                    "conflict_cluster": cluster,
                    "message": "infeasible",
                }))),
            }
        }
        Command::Convert { tree } => {
            let tree = load_tree(tree)?;
            let cs = tree_to_triplets(&tree)?;
            Ok(json!({
                "schema": 1,
                "leaves": tree.n_leaves(),
                "count": cs.len(),
                "constraints": emit_constraints(&cs).lines().collect::<Vec<_>>(),
            }))
        }
        Command::Cluster { graph, constraints, alg, cut, lambda, seed, trials, limit } => {
            let g = load_graph(graph)?;
            let cs = optional_constraints(constraints)?;
            cluster(&g, &cs, *alg, *cut, *lambda, *seed, *trials, *limit)
        }
        Command::Cost { graph, tree, objective, constraints, lambda } => {
            let g = load_graph(graph)?;
            let tree = load_tree(tree)?;
            let cs = optional_constraints(constraints)?;
            let value = match objective {
                Objective::Sim => similarity_cost(&tree, &g)?,
                Objective::Dis => dissimilarity_reward(&tree, &g)?,
                Objective::Reg => regularized_cost(&tree, &RegularizedInstance::new(g.clone(), cs.clone(), *lambda)?)?,
            };
            Ok(json!({
                "schema": 1,
                "objective": format!("{objective:?}").to_lowercase(),
                "value": value,
                "violations": count_violations(&tree, &cs)?,
            }))
        }
        Command::Depmeasure { constraints, graph, n } => {
            let cs = load_constraints(constraints)?;
            let n = leaf_count(&cs, graph, *n)?;
            let dg = DependencyDigraph::from_constraints(&cs);
            let acyclic = dg.is_acyclic();
            let mut report = json!({
                "schema": 1,
                "n": n,
                "k": cs.len(),
                "classes": dg.len(),
                "arcs": dg.arcs.len(),
                "acyclic": acyclic,
            });
            if acyclic {
                let d = dmc(&cs)?;
                report["dmc"] = json!(d);
                report["alpha"] = json!(crrc_guarantee(n.max(1), cs.len(), d)?);
            }
            Ok(report)
        }
        Command::Oracle { graph, constraints, objective, lambda } => {
            let g = load_graph(graph)?;
            let cs = constraints.as_ref().map(load_constraints).transpose()?;
            let (value, tree) = match objective {
                Objective::Sim => opt_similarity(&g, cs.as_ref())?,
                Objective::Dis => opt_dissimilarity(&g, cs.as_ref())?,
                Objective::Reg => {
                    opt_regularized(&RegularizedInstance::new(g.clone(), cs.unwrap_or_default(), *lambda)?)?
                }
            };
            Ok(json!({
                "schema": 1,
                "objective": format!("{objective:?}").to_lowercase(),
                "value": value,
                "tree": tree_value(&tree),
            }))
        }
        Command::Zoo { data, constraints, limit, dims_full, dims_noisy } => {
            let path = data.clone().unwrap_or_else(bundled_zoo_path);
            let records = load_zoo(&path, *limit)?;
            let source = match constraints {
                Some(p) => ConstraintSource::Given { label: p.display().to_string(), constraints: load_constraints(p)? },
                None => ConstraintSource::TopSplit,
            };
            let report = zoo_experiment(&records, source, *dims_full, *dims_noisy)?;
            Ok(serde_json::to_value(report).expect("report serializes"))
        }
        Command::DemoDensest { sizes, trials, seed } => {
            if *trials == 0 {
                return Err(Failure::Usage("--trials must be positive".into()));
            }
            let rows = densest_failure_demo(sizes, *trials, *seed)?;
            let decreasing = rows.windows(2).all(|w| w[1].ratio < w[0].ratio);
            Ok(json!({
                "schema": 1,
                "trials": trials,
                "seed": seed,
                "ratio_strictly_decreasing": decreasing,
                "rows": rows,
            }))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cluster(
    g: &WeightedGraph,
    cs: &ConstraintSet,
    alg: Algorithm,
    cut: CutArg,
    lambda: f64,
    seed: u64,
    trials: usize,
    limit: usize,
) -> CliResult<Value> {
    if trials == 0 {
        return Err(Failure::Usage("--trials must be positive".into()));
    }
    cs.check_vertices(g.n())?;
    let mode = match cut {
        CutArg::Exact => DivisiveMode::Exact,
        CutArg::Spectral => DivisiveMode::Heuristic,
    };
    let cfg = DivisiveConfig { cut_mode: mode, exhaustive_limit: limit, seed: Some(seed), ..DivisiveConfig::default() };
    let randomized = matches!(alg, Algorithm::Rrc | Algorithm::Crrc);
    let tree = match alg {
        Algorithm::Crsc => crsc(g, cs, &cfg)?,
        Algorithm::Crbc => crbc(g, cs, &cfg)?,
        Algorithm::Crdc => crdc(g, cs, &cfg)?,
        Algorithm::Rhsc => rhsc(&RegularizedInstance::new(g.clone(), cs.clone(), lambda)?, &cfg)?,
        Algorithm::Spectral => recursive_spectral(g, Some(cs))?,
        Algorithm::Localsearch => local_search_derandomized(g)?,
        Algorithm::Rrc => rrc(g, &mut ChaCha8Rng::seed_from_u64(seed))?,
        Algorithm::Crrc => crrc(g, cs, &mut ChaCha8Rng::seed_from_u64(seed))?,
    };
    let mut report = Map::new();
    report.insert("schema".into(), json!(1));
    report.insert("algorithm".into(), json!(format!("{alg:?}").to_lowercase()));
    report.insert("n".into(), json!(g.n()));
    report.insert("constraints".into(), json!(cs.len()));
    report.insert("seed".into(), json!(seed));
    report.insert("newick".into(), json!(tree.to_newick()));
    // the same functional serves as similarity cost and dissimilarity reward
    report.insert("cost".into(), json!(similarity_cost(&tree, g)?));
    report.insert("violations".into(), json!(count_violations(&tree, cs)?));
    if alg == Algorithm::Rhsc {
        let inst = RegularizedInstance::new(g.clone(), cs.clone(), lambda)?;
        report.insert("lambda".into(), json!(lambda));
        report.insert("regularized_cost".into(), json!(regularized_cost(&tree, &inst)?));
    }
    if randomized {
        let mc = match alg {
            Algorithm::Rrc => monte_carlo(g, trials, seed, |rng| rrc(g, rng))?,
            _ => monte_carlo(g, trials, seed, |rng| crrc(g, cs, rng))?,
        };
        report.insert("trials".into(), json!(trials));
        report.insert("mean_reward".into(), json!(mc.mean));
        report.insert("std_err".into(), json!(mc.std_err));
        if alg == Algorithm::Rrc {
            report.insert("expected_reward".into(), json!(rrc_expected_reward(g)));
        }
    }
    report.insert("tree".into(), json!(tree_to_json(&tree)));
    Ok(Value::Object(report))
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// JSON pretty-printed, or TSV: one `key<TAB>value` line per scalar field and
/// a header-plus-rows table for each array of objects.
pub fn render(report: &Value, format: Format) -> String {
    match format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(report).expect("report serializes")),
        Format::Tsv => {
            let mut out = String::new();
            let Value::Object(map) = report else { return format!("{}\n", scalar(report)) };
            let mut tables = Vec::new();
            for (key, value) in map {
                match value {
                    Value::Array(items) if items.iter().all(Value::is_object) && !items.is_empty() => {
                        tables.push((key, items))
                    }
                    _ => out.push_str(&format!("{key}\t{}\n", scalar(value))),
                }
            }
            for (key, items) in tables {
                out.push_str(&format!("# {key}\n"));
                let Value::Object(first) = &items[0] else { continue };
                let columns: Vec<&String> = first.keys().collect();
                out.push_str(&columns.iter().map(|c| c.as_str()).collect::<Vec<_>>().join("\t"));
                out.push('\n');
                for item in items {
                    let row: Vec<String> = columns.iter().map(|c| scalar(&item[c.as_str()])).collect();
                    out.push_str(&row.join("\t"));
                    out.push('\n');
                }
            }
            out
        }
    }
}
