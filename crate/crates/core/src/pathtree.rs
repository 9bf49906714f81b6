//! Per-user exploration trees and the valid paths they contain.
//!
//! The tree of a user is the depth-first expansion of the mesh from that
//! user: each branch is a simple path, and a branch stops when it reaches a
//! core base station or the hop limit. Branches ending at a core base station
//! are the user's valid paths.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linkbudget::DirectedLink;
use crate::topology::{MeshNetwork, NodeId};

/// A route from a user to a core base station, as directed links.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Path {
    links: Vec<DirectedLink>,
}

impl Path {
    /// Path through `nodes` in order; needs at least two nodes.
    pub fn from_nodes(nodes: &[NodeId]) -> Self {
        assert!(nodes.len() >= 2, "a path needs at least one link");
        Self {
            links: nodes
                .windows(2)
                .map(|w| DirectedLink::new(w[0], w[1]))
                .collect(),
        }
    }

    pub fn links(&self) -> &[DirectedLink] {
        &self.links
    }

    /// Links between base stations, i.e. everything after the access hop.
    pub fn backhaul_links(&self) -> &[DirectedLink] {
        &self.links[1..]
    }

    pub fn hops(&self) -> usize {
        self.links.len()
    }

    pub fn user(&self) -> NodeId {
        self.links[0].tx
    }

    pub fn core(&self) -> NodeId {
        self.links[self.links.len() - 1].rx
    }

    pub fn nodes(&self) -> Vec<NodeId> {
        std::iter::once(self.links[0].tx)
            .chain(self.links.iter().map(|l| l.rx))
            .collect()
    }

    /// Checks that this is a valid path of `net` under the hop limit.
    pub fn validate(&self, net: &MeshNetwork, h_max: usize) -> Result<()> {
        let nodes = self.nodes();
        let bad = |reason: String| Err(Error::validation("path", reason));
        if self.hops() > h_max {
            return bad(format!("{} hops exceeds h_max = {h_max}", self.hops()));
        }
        if !net.is_user(nodes[0]) {
            return bad(format!("starts at {} which is not a user", nodes[0]));
        }
        for w in self.links.windows(2) {
            if w[0].rx != w[1].tx {
                return bad("links are not contiguous".into());
            }
        }
        for l in &self.links {
            if !net.is_adjacent(l.tx, l.rx) {
                return bad(format!("{} -> {} is not an established link", l.tx, l.rx));
            }
        }
        for (k, &n) in nodes.iter().enumerate().skip(1) {
            if !net.is_bs(n) {
                return bad(format!("passes through user {n}"));
            }
            let last = k == nodes.len() - 1;
            if net.is_core(n) != last {
                return bad(format!("core base stations may only end a path (node {n})"));
            }
        }
        let mut sorted = nodes.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != nodes.len() {
            return bad("revisits a node".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafKind {
    /// Reached a core base station.
    Core,
    /// Stopped at the hop limit.
    HopLimit,
    /// No unvisited base station left to expand into.
    DeadEnd,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    pub node: NodeId,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub depth: usize,
    pub leaf: Option<LeafKind>,
    /// Whether some core leaf lies in this subtree.
    pub reaches_core: bool,
}

/// Arena-backed tree in depth-first (preorder) layout; index 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct PathTree {
    h_max: usize,
    nodes: Vec<TreeNode>,
    valid_leaves: Vec<usize>,
}

impl PathTree {
    pub fn root(&self) -> NodeId {
        self.nodes[0].node
    }

    pub fn h_max(&self) -> usize {
        self.h_max
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn node(&self, idx: usize) -> &TreeNode {
        &self.nodes[idx]
    }

    /// Number of tree nodes, including the root.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Arena indices of the core leaves, in depth-first order.
    pub fn valid_leaves(&self) -> &[usize] {
        &self.valid_leaves
    }

    pub fn num_valid_paths(&self) -> usize {
        self.valid_leaves.len()
    }

    /// Mesh nodes on the branch from the root to `idx`.
    pub fn branch(&self, idx: usize) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes[idx].depth + 1);
        let mut cur = Some(idx);
        while let Some(i) = cur {
            out.push(self.nodes[i].node);
            cur = self.nodes[i].parent;
        }
        out.reverse();
        out
    }

    pub fn path_to(&self, leaf: usize) -> Path {
        Path::from_nodes(&self.branch(leaf))
    }

    /// Mesh node ids in preorder.
    pub fn preorder(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().map(|n| n.node)
    }
}

/// Depth-first expansion of the mesh from `user`.
///
/// Children are the neighbors not already on the branch, in ascending id
/// order. Users other than the root are never entered. A branch ends at a
/// core base station or at depth `h_max`.
pub fn build_tree(net: &MeshNetwork, user: NodeId, h_max: usize) -> Result<PathTree> {
    if !net.is_user(user) {
        return Err(Error::domain(format!(
            "tree root {user} is not a user node"
        )));
    }
    if h_max == 0 {
        return Err(Error::domain("h_max must be at least 1"));
    }
    let mut tree = PathTree {
        h_max,
        nodes: vec![TreeNode {
            node: user,
            parent: None,
            children: Vec::new(),
            depth: 0,
            leaf: None,
            reaches_core: false,
        }],
        valid_leaves: Vec::new(),
    };
    let mut on_branch = vec![false; net.num_nodes()];
    expand(net, &mut tree, 0, &mut on_branch);
    Ok(tree)
}

fn expand(net: &MeshNetwork, tree: &mut PathTree, idx: usize, on_branch: &mut [bool]) {
    let TreeNode { node, depth, .. } = tree.nodes[idx];
    if depth > 0 && net.is_core(node) {
        tree.nodes[idx].leaf = Some(LeafKind::Core);
        tree.nodes[idx].reaches_core = true;
        tree.valid_leaves.push(idx);
        return;
    }
    if depth == tree.h_max {
        tree.nodes[idx].leaf = Some(LeafKind::HopLimit);
        return;
    }
    on_branch[node] = true;
    let nbrs = net.neighbors(node).expect("tree nodes are in range");
    for &next in nbrs {
        if on_branch[next] || !net.is_bs(next) {
            continue;
        }
        let child = tree.nodes.len();
        tree.nodes.push(TreeNode {
            node: next,
            parent: Some(idx),
            children: Vec::new(),
            depth: depth + 1,
            leaf: None,
            reaches_core: false,
        });
        tree.nodes[idx].children.push(child);
        expand(net, tree, child, on_branch);
        if tree.nodes[child].reaches_core {
            tree.nodes[idx].reaches_core = true;
        }
    }
    on_branch[node] = false;
    if tree.nodes[idx].children.is_empty() {
        tree.nodes[idx].leaf = Some(LeafKind::DeadEnd);
    }
}

/// All core-terminated branches of `tree`, in depth-first order.
pub fn valid_paths(tree: &PathTree) -> Vec<Path> {
    tree.valid_leaves.iter().map(|&l| tree.path_to(l)).collect()
}
