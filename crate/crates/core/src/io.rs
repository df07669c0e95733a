//! Text formats: weighted edge lists, triplet constraints, and trees.
//!
//! Graphs are one `u v w` edge per line (tabs or spaces, `#` comments). A
//! `# vertices N` header, written by [`emit_graph`], keeps trailing isolated
//! vertices across a round trip. Constraints are `p q | s`, optionally
//! followed by `@ cost`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constraints::{ConstraintSet, TripletConstraint};
use crate::error::{HcError, Result};
use crate::graph::WeightedGraph;
use crate::tree::{ClusterTree, NodeId};

fn parse_err(line: usize, message: impl Into<String>) -> HcError {
    HcError::Parse { line, message: message.into() }
}

fn parse_id(field: &str, line: usize) -> Result<usize> {
    field
        .parse()
        .map_err(|_| parse_err(line, format!("expected a vertex id, found {field:?}")))
}

fn parse_weight(field: &str, line: usize) -> Result<f64> {
    let w: f64 = field
        .parse()
        .map_err(|_| parse_err(line, format!("expected a weight, found {field:?}")))?;
    if !w.is_finite() || w < 0.0 {
        return Err(parse_err(line, format!("weight {w} must be finite and nonnegative")));
    }
    Ok(w)
}

fn vertices_header(comment: &str) -> Option<&str> {
    let mut words = comment.split_whitespace();
    match (words.next(), words.next(), words.next()) {
        (Some("vertices"), Some(n), None) => Some(n),
        _ => None,
    }
}

pub fn parse_graph(text: &str) -> Result<WeightedGraph> {
    let mut declared = 0;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let (body, comment) = match raw.split_once('#') {
            Some((b, c)) => (b, Some(c)),
            None => (raw, None),
        };
        if let Some(n) = comment.and_then(vertices_header) {
            declared = parse_id(n, line)?;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 3 {
            return Err(parse_err(line, format!("expected `u v w`, found {} fields", fields.len())));
        }
        let (u, v) = (parse_id(fields[0], line)?, parse_id(fields[1], line)?);
        if u == v {
            return Err(parse_err(line, format!("self-loop on vertex {u}")));
        }
        edges.push((u, v, parse_weight(fields[2], line)?));
    }
    let n = edges.iter().map(|&(u, v, _)| u.max(v) + 1).max().unwrap_or(0).max(declared);
    WeightedGraph::new(n, edges)
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<WeightedGraph> {
    parse_graph(&fs::read_to_string(path)?)
}

pub fn emit_graph(g: &WeightedGraph) -> String {
    let mut out = format!("# vertices {}\n", g.n());
    for e in g.edges() {
        out.push_str(&format!("{}\t{}\t{}\n", e.u, e.v, e.w));
    }
    out
}

pub fn parse_constraints(text: &str) -> Result<ConstraintSet> {
    let mut cs = ConstraintSet::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (pair, rest) = body
            .split_once('|')
            .ok_or_else(|| parse_err(line, "expected `p q | s`"))?;
        let pair: Vec<&str> = pair.split_whitespace().collect();
        if pair.len() != 2 {
            return Err(parse_err(line, "expected two vertices before `|`"));
        }
        let (outsider, cost) = match rest.split_once('@') {
            Some((s, c)) => (s, parse_weight(c.trim(), line)?),
            None => (rest, 1.0),
        };
        let outsider: Vec<&str> = outsider.split_whitespace().collect();
        if outsider.len() != 1 {
            return Err(parse_err(line, "expected one vertex after `|`"));
        }
        let t = TripletConstraint::new(
            parse_id(pair[0], line)?,
            parse_id(pair[1], line)?,
            parse_id(outsider[0], line)?,
        )
        .map_err(|e| parse_err(line, e.to_string()))?;
        cs.push(t, cost).map_err(|e| parse_err(line, e.to_string()))?;
    }
    Ok(cs)
}

pub fn load_constraints(path: impl AsRef<Path>) -> Result<ConstraintSet> {
    parse_constraints(&fs::read_to_string(path)?)
}

pub fn emit_constraints(cs: &ConstraintSet) -> String {
    let mut out = String::new();
    for (t, cost) in cs.iter_with_costs() {
        if cost == 1.0 {
            out.push_str(&format!("{t}\n"));
        } else {
            out.push_str(&format!("{t} @ {cost}\n"));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeFormat {
    Newick,
    Json,
}

/// JSON tree node; every node carries its leaf count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeJson {
    Leaf { leaf: usize, size: usize },
    Node { size: usize, children: Vec<TreeJson> },
}

pub fn tree_to_json(tree: &ClusterTree) -> TreeJson {
    fn rec(tree: &ClusterTree, node: NodeId) -> TreeJson {
        match tree.children(node) {
            Some((l, r)) => TreeJson::Node {
                size: tree.size(node),
                children: vec![rec(tree, l), rec(tree, r)],
            },
            None => TreeJson::Leaf {
                leaf: tree.label(node).expect("leaf has a label"),
                size: 1,
            },
        }
    }
    rec(tree, tree.root())
}

pub fn tree_from_json(json: &TreeJson) -> Result<ClusterTree> {
    match json {
        TreeJson::Leaf { leaf, size } => {
            if *size != 1 {
                return Err(HcError::InvalidTree(format!("leaf {leaf} has size {size}")));
            }
            Ok(ClusterTree::leaf(*leaf))
        }
        TreeJson::Node { size, children } => {
            let [l, r] = children.as_slice() else {
                return Err(HcError::InvalidTree(format!("node with {} children", children.len())));
            };
            let t = ClusterTree::join(tree_from_json(l)?, tree_from_json(r)?)?;
            if t.n_leaves() != *size {
                return Err(HcError::InvalidTree(format!(
                    "node records size {size} but has {} leaves",
                    t.n_leaves()
                )));
            }
            Ok(t)
        }
    }
}

pub fn emit_tree(tree: &ClusterTree, format: TreeFormat) -> String {
    match format {
        TreeFormat::Newick => tree.to_newick(),
        TreeFormat::Json => serde_json::to_string(&tree_to_json(tree)).expect("tree JSON serializes"),
    }
}

pub fn parse_tree(text: &str, format: TreeFormat) -> Result<ClusterTree> {
    match format {
        TreeFormat::Newick => ClusterTree::from_newick(text),
        TreeFormat::Json => {
            let json: TreeJson =
                serde_json::from_str(text).map_err(|e| HcError::InvalidTree(e.to_string()))?;
            tree_from_json(&json)
        }
    }
}

/// Reads a tree file, choosing JSON when the text starts with `{`.
pub fn load_tree(path: impl AsRef<Path>) -> Result<ClusterTree> {
    let text = fs::read_to_string(path)?;
    let format = if text.trim_start().starts_with('{') { TreeFormat::Json } else { TreeFormat::Newick };
    parse_tree(&text, format)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_examples() {
        let g = parse_graph("0\t1\t2.0\n1\t2\t1.0").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.weight(0, 1), 2.0);
        assert_eq!(g.weight(1, 2), 1.0);
        let g = parse_graph("0 1 1.0\n0 1 1.0\n").unwrap();
        assert_eq!(g.edges().len(), 1);
        assert_eq!(g.weight(0, 1), 2.0);
        assert!(matches!(parse_graph("0\t0\t1.0"), Err(HcError::Parse { line: 1, .. })));
        assert!(matches!(parse_graph("# c\n0 1 -1"), Err(HcError::Parse { line: 2, .. })));
        assert!(matches!(parse_graph("0 1"), Err(HcError::Parse { line: 1, .. })));
    }

    #[test]
    fn graph_round_trip_keeps_isolated_vertices() {
        let g = WeightedGraph::new(5, [(0, 1, 0.25), (1, 2, 3.0)]).unwrap();
        let back = parse_graph(&emit_graph(&g)).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn constraint_examples() {
        let cs = parse_constraints("0 1 | 2").unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs.costs(), &[1.0]);
        let cs = parse_constraints("# c\n0 1 | 2 @ 2.5\n").unwrap();
        assert_eq!(cs.costs(), &[2.5]);
        assert!(matches!(parse_constraints("0 0 | 1"), Err(HcError::Parse { line: 1, .. })));
        assert!(matches!(parse_constraints("0 1 | 2\n1 0 | 2"), Err(HcError::Parse { line: 2, .. })));
        let cs = parse_constraints("3 1 | 0 @ 0.5\n0 1 | 2\n").unwrap();
        assert_eq!(parse_constraints(&emit_constraints(&cs)).unwrap(), cs);
    }

    #[test]
    fn tree_examples() {
        let t = ClusterTree::from_newick("((0,1),2);").unwrap();
        assert_eq!(emit_tree(&t, TreeFormat::Newick), "((0,1),2);");
        assert_eq!(emit_tree(&ClusterTree::leaf(0), TreeFormat::Newick), "0;");
        let json = emit_tree(&t, TreeFormat::Json);
        assert!(json.contains("\"size\":3"));
        assert_eq!(parse_tree(&json, TreeFormat::Json).unwrap(), t);
        assert!(parse_tree(r#"{"size":3,"children":[{"leaf":0,"size":1},{"leaf":1,"size":1}]}"#, TreeFormat::Json)
            .is_err());
    }
}
