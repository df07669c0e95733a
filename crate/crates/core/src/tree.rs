//! Rooted binary cluster trees (dendrograms).
//!
//! Leaves carry vertex labels. A tree may cover any set of distinct labels;
//! the objective evaluators additionally require the leaf set to be exactly
//! `0..n` for the graph at hand (see [`ClusterTree::check_vertex_set`]).

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{HcError, Result};

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Node {
    Leaf(usize),
    Internal(NodeId, NodeId),
}

#[derive(Debug, Clone)]
pub struct ClusterTree {
    nodes: Vec<Node>,
    parent: Vec<Option<NodeId>>,
    size: Vec<usize>,
    depth: Vec<usize>,
    leaf_node: HashMap<usize, NodeId>,
    root: NodeId,
}

impl ClusterTree {
    pub fn leaf(label: usize) -> Self {
        let mut t = Self {
            nodes: vec![Node::Leaf(label)],
            parent: Vec::new(),
            size: Vec::new(),
            depth: Vec::new(),
            leaf_node: HashMap::new(),
            root: 0,
        };
        t.reindex();
        t
    }

    /// New tree whose root has `left` and `right` as children.
    pub fn join(left: ClusterTree, right: ClusterTree) -> Result<Self> {
        if let Some(dup) = right.leaf_node.keys().find(|l| left.leaf_node.contains_key(l)) {
            return Err(HcError::InvalidTree(format!("leaf {dup} appears twice")));
        }
        let offset = left.nodes.len();
        let mut nodes = left.nodes;
        nodes.extend(right.nodes.into_iter().map(|n| match n {
            Node::Leaf(l) => Node::Leaf(l),
            Node::Internal(a, b) => Node::Internal(a + offset, b + offset),
        }));
        nodes.push(Node::Internal(left.root, right.root + offset));
        let root = nodes.len() - 1;
        let mut t = Self {
            nodes,
            parent: Vec::new(),
            size: Vec::new(),
            depth: Vec::new(),
            leaf_node: HashMap::new(),
            root,
        };
        t.reindex();
        Ok(t)
    }

    /// Caterpillar `(((l0,l1),l2),...)` over the given labels.
    pub fn caterpillar(labels: &[usize]) -> Result<Self> {
        let (first, rest) = labels
            .split_first()
            .ok_or_else(|| HcError::InvalidTree("empty label list".into()))?;
        rest.iter().try_fold(ClusterTree::leaf(*first), |acc, &l| {
            ClusterTree::join(acc, ClusterTree::leaf(l))
        })
    }

    fn reindex(&mut self) {
        let m = self.nodes.len();
        self.parent = vec![None; m];
        self.size = vec![0; m];
        self.depth = vec![0; m];
        self.leaf_node.clear();
        // children always precede parents in the arena
        for id in 0..m {
            match self.nodes[id] {
                Node::Leaf(l) => {
                    self.size[id] = 1;
                    self.leaf_node.insert(l, id);
                }
                Node::Internal(a, b) => {
                    self.size[id] = self.size[a] + self.size[b];
                    self.parent[a] = Some(id);
                    self.parent[b] = Some(id);
                }
            }
        }
        for id in (0..m).rev() {
            if let Node::Internal(a, b) = self.nodes[id] {
                self.depth[a] = self.depth[id] + 1;
                self.depth[b] = self.depth[id] + 1;
            }
        }
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn n_leaves(&self) -> usize {
        self.size[self.root]
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Leaf count of the subtree rooted at `node`.
    pub fn size(&self, node: NodeId) -> usize {
        self.size[node]
    }

    pub fn depth(&self, node: NodeId) -> usize {
        self.depth[node]
    }

    pub fn parent(&self, node: NodeId) -> Option<NodeId> {
        self.parent[node]
    }

    pub fn children(&self, node: NodeId) -> Option<(NodeId, NodeId)> {
        match self.nodes[node] {
            Node::Leaf(_) => None,
            Node::Internal(a, b) => Some((a, b)),
        }
    }

    /// Label of a leaf node, `None` for internal nodes.
    pub fn label(&self, node: NodeId) -> Option<usize> {
        match self.nodes[node] {
            Node::Leaf(l) => Some(l),
            Node::Internal(..) => None,
        }
    }

    pub fn leaf_node(&self, label: usize) -> Option<NodeId> {
        self.leaf_node.get(&label).copied()
    }

    pub fn contains_leaf(&self, label: usize) -> bool {
        self.leaf_node.contains_key(&label)
    }

    /// Leaf labels in left-to-right order.
    pub fn leaves(&self) -> Vec<usize> {
        self.leaves_under(self.root)
    }

    pub fn leaves_under(&self, node: NodeId) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.size[node]);
        let mut stack = vec![node];
        while let Some(id) = stack.pop() {
            match self.nodes[id] {
                Node::Leaf(l) => out.push(l),
                Node::Internal(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
            }
        }
        out
    }

    /// Node ids in preorder (parents before children, left before right).
    pub fn preorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            out.push(id);
            if let Node::Internal(a, b) = self.nodes[id] {
                stack.push(b);
                stack.push(a);
            }
        }
        out
    }

    pub fn internal_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(|&id| matches!(self.nodes[id], Node::Internal(..)))
    }

    /// Lowest common ancestor of two nodes.
    pub fn lca_nodes(&self, mut a: NodeId, mut b: NodeId) -> NodeId {
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].expect("non-root node has a parent");
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].expect("non-root node has a parent");
        }
        while a != b {
            a = self.parent[a].expect("non-root node has a parent");
            b = self.parent[b].expect("non-root node has a parent");
        }
        a
    }

    /// Lowest common ancestor of two leaf labels.
    pub fn lca(&self, a: usize, b: usize) -> Result<NodeId> {
        Ok(self.lca_nodes(self.require_leaf(a)?, self.require_leaf(b)?))
    }

    pub fn require_leaf(&self, label: usize) -> Result<NodeId> {
        self.leaf_node(label)
            .ok_or_else(|| HcError::InvalidTree(format!("leaf {label} not in tree")))
    }

    /// True when `anc` is `node` or one of its ancestors.
    pub fn is_ancestor(&self, anc: NodeId, mut node: NodeId) -> bool {
        while self.depth[node] > self.depth[anc] {
            node = self.parent[node].expect("non-root node has a parent");
        }
        node == anc
    }

    /// Errors unless the leaf set is exactly `0..n`.
    pub fn check_vertex_set(&self, n: usize) -> Result<()> {
        if self.n_leaves() != n || (0..n).any(|v| !self.leaf_node.contains_key(&v)) {
            return Err(HcError::LeafMismatch { n });
        }
        Ok(())
    }

    /// Structural equality ignoring the order of children.
    pub fn same_topology(&self, other: &ClusterTree) -> bool {
        self.canonical_newick() == other.canonical_newick()
    }

    /// Newick text with children ordered by their smallest leaf.
    pub fn canonical_newick(&self) -> String {
        fn rec(t: &ClusterTree, id: NodeId, out: &mut String) -> usize {
            match t.nodes[id] {
                Node::Leaf(l) => {
                    write!(out, "{l}").unwrap();
                    l
                }
                Node::Internal(a, b) => {
                    let mut sa = String::new();
                    let mut sb = String::new();
                    let ma = rec(t, a, &mut sa);
                    let mb = rec(t, b, &mut sb);
                    let (first, second) = if ma <= mb { (sa, sb) } else { (sb, sa) };
                    write!(out, "({first},{second})").unwrap();
                    ma.min(mb)
                }
            }
        }
        let mut s = String::new();
        rec(self, self.root, &mut s);
        s.push(';');
        s
    }

    /// Newick text with leaf labels, e.g. `((0,1),2);`.
    pub fn to_newick(&self) -> String {
        fn rec(t: &ClusterTree, id: NodeId, out: &mut String) {
            match t.nodes[id] {
                Node::Leaf(l) => write!(out, "{l}").unwrap(),
                Node::Internal(a, b) => {
                    out.push('(');
                    rec(t, a, out);
                    out.push(',');
                    rec(t, b, out);
                    out.push(')');
                }
            }
        }
        let mut s = String::new();
        rec(self, self.root, &mut s);
        s.push(';');
        s
    }

    /// Parses binary Newick with non-negative integer leaf labels.
    /// Branch lengths and internal labels are not supported.
    pub fn from_newick(text: &str) -> Result<Self> {
        let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let tree = parse_node(&chars, &mut pos)?;
        if chars.get(pos) == Some(&';') {
            pos += 1;
        }
        if pos != chars.len() {
            return Err(HcError::InvalidTree(format!(
                "unexpected trailing input at position {pos}"
            )));
        }
        Ok(tree)
    }
}

fn parse_node(chars: &[char], pos: &mut usize) -> Result<ClusterTree> {
    match chars.get(*pos) {
        Some('(') => {
            *pos += 1;
            let left = parse_node(chars, pos)?;
            expect(chars, pos, ',')?;
            let right = parse_node(chars, pos)?;
            if chars.get(*pos) == Some(&',') {
                return Err(HcError::InvalidTree(
                    "only binary trees are supported".into(),
                ));
            }
            expect(chars, pos, ')')?;
            ClusterTree::join(left, right)
        }
        Some(c) if c.is_ascii_digit() => {
            let start = *pos;
            while chars.get(*pos).is_some_and(|c| c.is_ascii_digit()) {
                *pos += 1;
            }
            let digits: String = chars[start..*pos].iter().collect();
            let label = digits
                .parse()
                .map_err(|_| HcError::InvalidTree(format!("bad leaf label {digits}")))?;
            Ok(ClusterTree::leaf(label))
        }
        other => Err(HcError::InvalidTree(format!(
            "unexpected {:?} at position {}",
            other, *pos
        ))),
    }
}

fn expect(chars: &[char], pos: &mut usize, want: char) -> Result<()> {
    if chars.get(*pos) == Some(&want) {
        *pos += 1;
        Ok(())
    } else {
        Err(HcError::InvalidTree(format!(
            "expected '{want}' at position {}",
            *pos
        )))
    }
}

impl PartialEq for ClusterTree {
    /// Ordered structural equality (child order matters).
    fn eq(&self, other: &Self) -> bool {
        self.to_newick() == other.to_newick()
    }
}

impl Eq for ClusterTree {}
