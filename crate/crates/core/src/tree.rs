//! Vertex-weighted trees and their rooted variants.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::canon;
use crate::error::{Error, Result};

/// Vertex weights are arbitrary-precision positive integers.
pub type Weight = BigUint;

/// An undirected tree on vertices `0..n` with a positive weight on every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedTree {
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    weights: Vec<Weight>,
}

impl WeightedTree {
    pub fn new(n: usize, edges: Vec<(usize, usize)>, weights: Vec<Weight>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidTree("a tree needs at least one vertex".into()));
        }
        if weights.len() != n {
            return Err(Error::InvalidTree(format!(
                "expected {n} weights, got {}",
                weights.len()
            )));
        }
        if edges.len() != n - 1 {
            return Err(Error::InvalidTree(format!(
                "a tree on {n} vertices has {} edges, got {}",
                n - 1,
                edges.len()
            )));
        }
        if let Some(v) = weights.iter().position(|w| w.is_zero()) {
            return Err(Error::InvalidTree(format!("vertex {v} has weight 0")));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::InvalidTree(format!("edge ({u},{v}) out of range")));
            }
            if u == v {
                return Err(Error::InvalidTree(format!("self-loop at {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let tree = WeightedTree { adj, edges, weights };
        // n-1 edges plus connectivity rules out cycles.
        if tree.component(0, None).len() != n {
            return Err(Error::InvalidTree("graph is not connected".into()));
        }
        Ok(tree)
    }

    pub fn with_unit_weights(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        Self::new(n, edges, vec![Weight::one(); n])
    }

    pub fn from_u64(n: usize, edges: Vec<(usize, usize)>, weights: &[u64]) -> Result<Self> {
        Self::new(n, edges, weights.iter().map(|&w| Weight::from(w)).collect())
    }

    /// A single vertex of the given weight.
    pub fn single(weight: Weight) -> Result<Self> {
        Self::new(1, Vec::new(), vec![weight])
    }

    /// Path `0 - 1 - ... - (k-1)` carrying the given weights in order.
    pub fn path(weights: &[u64]) -> Result<Self> {
        let n = weights.len();
        let edges = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_u64(n, edges, weights)
    }

    pub fn unit_path(n: usize) -> Self {
        Self::path(&vec![1; n]).expect("paths are trees")
    }

    /// Star with centre 0 and `n - 1` leaves, unit weights.
    pub fn unit_star(n: usize) -> Self {
        let edges = (1..n).map(|i| (0, i)).collect();
        Self::with_unit_weights(n, edges).expect("stars are trees")
    }

    /// Builds a tree from a parent array: vertex `i + 1` hangs below `parents[i]`.
    pub fn from_parents(parents: &[usize], weights: Vec<Weight>) -> Result<Self> {
        let edges = parents.iter().enumerate().map(|(i, &p)| (p, i + 1)).collect();
        Self::new(parents.len() + 1, edges, weights)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.adj[v].len() == 1
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.is_leaf(v)).collect()
    }

    pub fn weight(&self, v: usize) -> &Weight {
        &self.weights[v]
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn total_weight(&self) -> Weight {
        self.weights.iter().sum()
    }

    pub fn weight_of(&self, vertices: &[usize]) -> Weight {
        vertices.iter().map(|&v| &self.weights[v]).sum()
    }

    /// Largest weight, as `u64` if it fits.
    pub fn max_weight_u64(&self) -> Option<u64> {
        self.weights.iter().map(|w| u64::try_from(w).ok()).try_fold(0u64, |acc, w| w.map(|w| acc.max(w)))
    }

    /// Vertices reachable from `start` without traversing the edge `start - blocked`.
    pub fn component(&self, start: usize, blocked: Option<usize>) -> Vec<usize> {
        let mut seen = vec![false; self.n()];
        seen[start] = true;
        if let Some(b) = blocked.filter(|b| self.adj[start].contains(b)) {
            seen[b] = true;
        }
        let mut out = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    out.push(v);
                    queue.push_back(v);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// BFS order from `root` together with the parent of every vertex.
    pub fn bfs_from(&self, root: usize) -> (Vec<usize>, Vec<Option<usize>>) {
        let mut parent = vec![None; self.n()];
        let mut seen = vec![false; self.n()];
        let mut order = Vec::with_capacity(self.n());
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = Some(u);
                    queue.push_back(v);
                }
            }
        }
        (order, parent)
    }

    /// The subtree induced by `vertices` (which must be connected), re-indexed
    /// so that `root` becomes vertex 0 and the others follow in BFS order.
    pub fn induced_rooted(&self, vertices: &[usize], root: usize) -> Result<RootedWeightedTree> {
        let mut inside = vec![false; self.n()];
        for &v in vertices {
            inside[v] = true;
        }
        if !inside[root] {
            return Err(Error::InvalidTree(format!("root {root} not in vertex set")));
        }
        let mut index = vec![usize::MAX; self.n()];
        let mut order = vec![root];
        index[root] = 0;
        let mut edges = Vec::new();
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &v in &self.adj[u] {
                if inside[v] && index[v] == usize::MAX {
                    index[v] = order.len();
                    order.push(v);
                    edges.push((index[u], index[v]));
                }
            }
        }
        if order.len() != vertices.len() {
            return Err(Error::InvalidTree("vertex set does not induce a connected subtree".into()));
        }
        let weights = order.iter().map(|&v| self.weights[v].clone()).collect();
        let tree = WeightedTree::new(order.len(), edges, weights)?;
        RootedWeightedTree::new(tree, 0)
    }

    /// Applies the relabeling `old id -> perm[old id]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n();
        if perm.len() != n {
            return Err(Error::InvalidTree("permutation length mismatch".into()));
        }
        let mut weights = vec![Weight::zero(); n];
        for v in 0..n {
            weights[perm[v]] = self.weights[v].clone();
        }
        let edges = self.edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
        Self::new(n, edges, weights)
    }

    pub fn rooted_at(&self, root: usize) -> Result<RootedWeightedTree> {
        RootedWeightedTree::new(self.clone(), root)
    }
}

/// A weighted tree with a distinguished root vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedWeightedTree {
    tree: WeightedTree,
    root: usize,
}

impl RootedWeightedTree {
    pub fn new(tree: WeightedTree, root: usize) -> Result<Self> {
        if root >= tree.n() {
            return Err(Error::InvalidTree(format!("root {root} out of range")));
        }
        Ok(RootedWeightedTree { tree, root })
    }

    pub fn single(weight: u64) -> Self {
        let tree = WeightedTree::single(Weight::from(weight)).expect("positive weight required");
        RootedWeightedTree { tree, root: 0 }
    }

    /// Unit-weight path on `n` vertices rooted at one end.
    pub fn end_rooted_path(n: usize) -> Self {
        RootedWeightedTree { tree: WeightedTree::unit_path(n), root: 0 }
    }

    pub fn tree(&self) -> &WeightedTree {
        &self.tree
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn n(&self) -> usize {
        self.tree.n()
    }

    pub fn total_weight(&self) -> Weight {
        self.tree.total_weight()
    }

    pub fn code(&self) -> canon::CanonicalCode {
        canon::canonicalize_rooted(self)
    }

    /// Sorted vertex-weight multiset.
    pub fn weight_multiset(&self) -> Vec<Weight> {
        let mut ws = self.tree.weights().to_vec();
        ws.sort();
        ws
    }

    fn write_vertex(&self, f: &mut fmt::Formatter<'_>, v: usize, parent: Option<usize>) -> fmt::Result {
        write!(f, "{}", self.tree.weight(v))?;
        let mut children: Vec<(canon::CanonicalCode, usize)> = self
            .tree
            .neighbours(v)
            .iter()
            .copied()
            .filter(|&c| Some(c) != parent)
            .map(|c| (canon::subtree_code(&self.tree, c, Some(v)), c))
            .collect();
        if children.is_empty() {
            return Ok(());
        }
        children.sort();
        write!(f, "(")?;
        for (i, (_, c)) in children.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            self.write_vertex(f, *c, Some(v))?;
        }
        write!(f, ")")
    }
}

/// Bracket notation: a vertex is its weight, optionally followed by its
/// children in parentheses, e.g. `1(1,1(1))`. Children print in canonical order.
impl fmt::Display for RootedWeightedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_vertex(f, self.root, None)
    }
}

impl FromStr for RootedWeightedTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bytes: Vec<u8> = s.bytes().filter(|b| !b.is_ascii_whitespace()).collect();
        let mut pos = 0;
        let mut weights = Vec::new();
        let mut edges = Vec::new();
        parse_vertex(&bytes, &mut pos, None, &mut weights, &mut edges)?;
        if pos != bytes.len() {
            return Err(Error::Parse(format!("trailing input at byte {pos} in {s:?}")));
        }
        let tree = WeightedTree::new(weights.len(), edges, weights)?;
        RootedWeightedTree::new(tree, 0)
    }
}

fn parse_vertex(
    bytes: &[u8],
    pos: &mut usize,
    parent: Option<usize>,
    weights: &mut Vec<Weight>,
    edges: &mut Vec<(usize, usize)>,
) -> Result<()> {
    let start = *pos;
    while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::Parse(format!("expected a weight at byte {start}")));
    }
    let digits = std::str::from_utf8(&bytes[start..*pos]).expect("ascii digits");
    let weight: Weight = digits.parse().map_err(|_| Error::Parse(format!("bad weight {digits}")))?;
    let me = weights.len();
    weights.push(weight);
    if let Some(p) = parent {
        edges.push((p, me));
    }
    if *pos < bytes.len() && bytes[*pos] == b'(' {
        *pos += 1;
        loop {
            parse_vertex(bytes, pos, Some(me), weights, edges)?;
            match bytes.get(*pos) {
                Some(b',') => *pos += 1,
                Some(b')') => {
                    *pos += 1;
                    break;
                }
                _ => return Err(Error::Parse(format!("expected ',' or ')' at byte {}", *pos))),
            }
        }
    }
    Ok(())
}
