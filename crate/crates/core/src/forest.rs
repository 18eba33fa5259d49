//! Containment forests: the labeled digraphs that turn a set of containment
//! constraints between situation components into an arborescence forest
//! whose constrained assignments can be counted by a product recursion.
//!
//! Arc `(x, y)` means "the subtree chosen for `x` lies inside the one chosen
//! for `y`"; all components in one label receive the same subtree. Stages:
//!
//! * `W0` — one node per component, one arc per requested pair.
//! * `W1` — closed under: if `x` points to both `y` and `z` and neither points
//!   to the other, the smaller (by vertex count) must lie in the larger, so the
//!   arc between them is added (both arcs on a tie).
//! * `W2` — directed cycles contracted, labels merged.
//! * `W3` — transitive arcs removed; every node then has outdegree at most one.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;
use num_traits::One;

use crate::canon::CanonicalCode;
use crate::error::{Error, Result};
use crate::situations::{ContainmentTable, Host, Situation};
use crate::tree::{RootedWeightedTree, WeightedTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    W0,
    W1,
    W2,
    W3,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForestNode {
    /// Component indices (0-based) sharing one subtree.
    pub label: Vec<usize>,
    /// Class of the components in the label.
    pub class: CanonicalCode,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContainmentForest {
    pub nodes: Vec<ForestNode>,
    pub arcs: Vec<(usize, usize)>,
    pub stage: Stage,
}

/// Why a set of pairs was found to have an empty intersection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EmptyReason {
    /// A requested pair `(i, j)` where σ_i cannot lie inside σ_j.
    NonContributing(usize, usize),
    /// The closure forced `(i, j)` with σ_i unable to lie inside σ_j.
    Saturation(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ForestOutcome {
    Forest(ContainmentForest),
    Empty(EmptyReason),
}

/// All four stages for one pair set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForestStages {
    pub w0: ContainmentForest,
    pub w1: ContainmentForest,
    pub w2: ContainmentForest,
    pub w3: ContainmentForest,
}

impl ContainmentForest {
    /// A forest given directly by node classes and `(child, parent)` arcs.
    pub fn from_parts(classes: Vec<CanonicalCode>, arcs: Vec<(usize, usize)>) -> Self {
        let nodes = classes.into_iter().enumerate().map(|(i, class)| ForestNode { label: vec![i], class }).collect();
        ContainmentForest { nodes, arcs, stage: Stage::W3 }
    }

    pub fn empty() -> Self {
        ContainmentForest { nodes: Vec::new(), arcs: Vec::new(), stage: Stage::W3 }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn out_degree(&self, x: usize) -> usize {
        self.arcs.iter().filter(|a| a.0 == x).count()
    }

    fn parent(&self, x: usize) -> Option<usize> {
        self.arcs.iter().find(|a| a.0 == x).map(|a| a.1)
    }

    fn children(&self, x: usize) -> Vec<usize> {
        self.arcs.iter().filter(|a| a.1 == x).map(|a| a.0).collect()
    }

    /// Broken forest invariants for a forest built over `components`
    /// components (empty when all hold). Outdegree and acyclicity are only
    /// required from `W3` on; acyclicity from `W2` on.
    pub fn invariant_violations(&self, components: usize, s: Option<&Situation>) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = vec![0usize; components];
        for (x, node) in self.nodes.iter().enumerate() {
            if node.label.is_empty() {
                out.push(format!("node {x} has an empty label"));
            }
            for &i in &node.label {
                match seen.get_mut(i) {
                    Some(c) => *c += 1,
                    None => out.push(format!("node {x} names component {i} out of range")),
                }
                if let Some(s) = s {
                    if s.code(i) != &node.class {
                        out.push(format!("component {i} in node {x} is not of the node's class"));
                    }
                }
            }
        }
        if let Some(i) = seen.iter().position(|&c| c != 1) {
            out.push(format!("component {i} appears in {} labels", seen[i]));
        }
        if self.arcs.iter().any(|&(a, b)| a >= self.len() || b >= self.len() || a == b) {
            out.push("arc with an invalid end".into());
            return out;
        }
        if self.stage >= Stage::W2 && !self.is_acyclic() {
            out.push("directed cycle".into());
        }
        if self.stage == Stage::W3 {
            if let Some(x) = (0..self.len()).find(|&x| self.out_degree(x) > 1) {
                out.push(format!("node {x} has outdegree {}", self.out_degree(x)));
            }
        }
        out
    }

    fn is_acyclic(&self) -> bool {
        let reach = reachability(self.len(), &self.arcs);
        (0..self.len()).all(|x| !reach[x][x])
    }

    /// Isomorphism-invariant key: sorted root subtrees of `(class, children)`.
    fn key(&self) -> Vec<u64> {
        fn node_key(f: &ContainmentForest, x: usize) -> Vec<u64> {
            let mut kids: Vec<Vec<u64>> = f.children(x).into_iter().map(|c| node_key(f, c)).collect();
            kids.sort();
            let mut k = vec![f.nodes[x].class.as_slice().len() as u64];
            k.extend_from_slice(f.nodes[x].class.as_slice());
            k.push(kids.len() as u64);
            kids.into_iter().for_each(|c| k.extend(c));
            k
        }
        let mut roots: Vec<Vec<u64>> =
            (0..self.len()).filter(|&x| self.parent(x).is_none()).map(|x| node_key(self, x)).collect();
        roots.sort();
        roots.concat()
    }
}

/// `reach[a][b]`: a directed path of length >= 1 from `a` to `b`.
fn reachability(n: usize, arcs: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut r = vec![vec![false; n]; n];
    for &(a, b) in arcs {
        r[a][b] = true;
    }
    #[allow(clippy::needless_range_loop)]
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

fn containable(s: &Situation, i: usize, j: usize) -> bool {
    crate::hanging::count_hang_by_code(s.code(i), s.component(j)) > 0
}

fn singleton_nodes(s: &Situation) -> Vec<ForestNode> {
    (0..s.len()).map(|i| ForestNode { label: vec![i], class: s.code(i).clone() }).collect()
}

fn arcs_of(adj: &[Vec<bool>]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (a, row) in adj.iter().enumerate() {
        for (b, &on) in row.iter().enumerate() {
            if on {
                out.push((a, b));
            }
        }
    }
    out
}

/// Runs the four stages for the pair set `f` (0-based component indices).
pub fn build_stages(f: &[(usize, usize)], s: &Situation) -> Result<std::result::Result<ForestStages, EmptyReason>> {
    let k = s.len();
    for &(i, j) in f {
        if i >= k || j >= k || i == j {
            return Err(Error::Precondition(format!("pair ({i}, {j}) is not an ordered pair of distinct components")));
        }
        if !containable(s, i, j) {
            return Ok(Err(EmptyReason::NonContributing(i, j)));
        }
    }
    let mut adj = vec![vec![false; k]; k];
    for &(i, j) in f {
        adj[i][j] = true;
    }
    let w0 = ContainmentForest { nodes: singleton_nodes(s), arcs: arcs_of(&adj), stage: Stage::W0 };

    let size = |i: usize| s.component(i).n();
    loop {
        let mut changed = false;
        for x in 0..k {
            for y in 0..k {
                for z in y + 1..k {
                    if adj[x][y] && adj[x][z] && !adj[y][z] && !adj[z][y] {
                        if size(y) <= size(z) {
                            adj[y][z] = true;
                        }
                        if size(z) <= size(y) {
                            adj[z][y] = true;
                        }
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    for (i, j) in arcs_of(&adj) {
        if !containable(s, i, j) {
            return Ok(Err(EmptyReason::Saturation(i, j)));
        }
    }
    let w1 = ContainmentForest { nodes: singleton_nodes(s), arcs: arcs_of(&adj), stage: Stage::W1 };

    // Strongly connected components, numbered by smallest member.
    let reach = reachability(k, &w1.arcs);
    let mut comp = vec![usize::MAX; k];
    let mut nodes = Vec::new();
    for i in 0..k {
        if comp[i] != usize::MAX {
            continue;
        }
        let label: Vec<usize> = (i..k).filter(|&j| j == i || (reach[i][j] && reach[j][i])).collect();
        for &j in &label {
            comp[j] = nodes.len();
        }
        nodes.push(ForestNode { label, class: s.code(i).clone() });
    }
    let arcs2: BTreeSet<(usize, usize)> =
        w1.arcs.iter().map(|&(a, b)| (comp[a], comp[b])).filter(|(a, b)| a != b).collect();
    let arcs2: Vec<(usize, usize)> = arcs2.into_iter().collect();
    let w2 = ContainmentForest { nodes: nodes.clone(), arcs: arcs2.clone(), stage: Stage::W2 };

    let reach2 = reachability(nodes.len(), &arcs2);
    let arcs3: Vec<(usize, usize)> = arcs2
        .iter()
        .copied()
        .filter(|&(y, z)| !arcs2.iter().any(|&(a, w)| a == y && w != z && reach2[w][z]))
        .collect();
    let w3 = ContainmentForest { nodes, arcs: arcs3, stage: Stage::W3 };

    for w in [&w0, &w1, &w2, &w3] {
        let bad = w.invariant_violations(k, Some(s));
        if !bad.is_empty() {
            return Err(Error::Internal(format!("stage {:?}: {}", w.stage, bad.join("; "))));
        }
    }
    Ok(Ok(ForestStages { w0, w1, w2, w3 }))
}

/// The stage-`W3` forest for `f`, or the reason the intersection is empty.
pub fn build_containment_forest(f: &[(usize, usize)], s: &Situation) -> Result<ForestOutcome> {
    Ok(match build_stages(f, s)? {
        Ok(stages) => ForestOutcome::Forest(stages.w3),
        Err(reason) => ForestOutcome::Empty(reason),
    })
}

/// Assignments of hanging subtrees of `host` to the forest's nodes, each
/// isomorphic to the node's class and inside the subtree of the node it points to.
pub fn procedure3_count(host: &Host, w: &ContainmentForest, tbl: &ContainmentTable) -> Result<BigUint> {
    Procedure3Memo::default().count(host, w, tbl).map(|(c, _)| c)
}

/// Memoizes [`procedure3_count`] by host and forest shape.
#[derive(Debug, Default)]
pub struct Procedure3Memo {
    cache: HashMap<(Host, Vec<u64>), BigUint>,
}

impl Procedure3Memo {
    /// The count, and whether it came from the cache.
    pub fn count(&mut self, host: &Host, w: &ContainmentForest, tbl: &ContainmentTable) -> Result<(BigUint, bool)> {
        if w.stage != Stage::W3 {
            return Err(Error::Precondition("forest counting needs a stage-W3 forest".into()));
        }
        let bad = w.invariant_violations(w.nodes.iter().map(|n| n.label.len()).sum(), None);
        if !bad.is_empty() {
            return Err(Error::Precondition(format!("not an arborescence forest: {}", bad.join("; "))));
        }
        let key = (host.clone(), w.key());
        if let Some(c) = self.cache.get(&key) {
            return Ok((c.clone(), true));
        }
        let roots: Vec<usize> = (0..w.len()).filter(|&x| w.parent(x).is_none()).collect();
        let c = recurse(host, w, &roots, tbl)?;
        self.cache.insert(key, c.clone());
        Ok((c, false))
    }
}

fn recurse(host: &Host, w: &ContainmentForest, roots: &[usize], tbl: &ContainmentTable) -> Result<BigUint> {
    let mut product = BigUint::one();
    for &x in roots {
        let class = &w.nodes[x].class;
        product *= tbl.get(class, host)?;
        let inner = Host::Class(class.clone());
        product *= recurse(&inner, w, &w.children(x), tbl)?;
    }
    Ok(product)
}

/// A host for [`assignment_count_oracle`].
#[derive(Clone, Copy, Debug)]
pub enum HostTree<'a> {
    Free(&'a WeightedTree),
    Rooted(&'a RootedWeightedTree),
}

/// [`procedure3_count`] by listing every assignment of concrete subtrees.
pub fn assignment_count_oracle(host: HostTree<'_>, w: &ContainmentForest) -> BigUint {
    // Candidate subtrees as (class, vertex set).
    let candidates: Vec<(CanonicalCode, Vec<bool>)> = match host {
        HostTree::Free(t) => crate::hanging::hanging_subtrees(t)
            .into_iter()
            .map(|h| {
                let mut mask = vec![false; t.n()];
                h.vertices.iter().for_each(|&v| mask[v] = true);
                (h.code, mask)
            })
            .collect(),
        HostTree::Rooted(h) => {
            let t = h.tree();
            let (_, parent) = t.bfs_from(h.root());
            let codes = crate::canon::subtree_codes(t, h.root());
            (0..t.n()).map(|v| (codes[v].clone(), descendants(t, &parent, v))).collect()
        }
    };
    let mut choice = vec![usize::MAX; w.len()];
    let mut count = BigUint::default();
    assign(w, &candidates, 0, &mut choice, &mut count);
    count
}

fn descendants(t: &WeightedTree, parent: &[Option<usize>], v: usize) -> Vec<bool> {
    let mut mask = vec![false; t.n()];
    let mut stack = vec![v];
    while let Some(u) = stack.pop() {
        mask[u] = true;
        for &c in t.neighbours(u) {
            if Some(c) != parent[u] {
                stack.push(c);
            }
        }
    }
    mask
}

fn assign(
    w: &ContainmentForest,
    candidates: &[(CanonicalCode, Vec<bool>)],
    x: usize,
    choice: &mut [usize],
    count: &mut BigUint,
) {
    if x == w.len() {
        let inside = |a: &Vec<bool>, b: &Vec<bool>| a.iter().zip(b).all(|(&p, &q)| !p || q);
        if w.arcs.iter().all(|&(a, b)| inside(&candidates[choice[a]].1, &candidates[choice[b]].1)) {
            *count += 1u32;
        }
        return;
    }
    for (i, (class, _)) in candidates.iter().enumerate() {
        if *class == w.nodes[x].class {
            choice[x] = i;
            assign(w, candidates, x + 1, choice, count);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spider_3x3() -> WeightedTree {
        let edges = vec![(0, 1), (1, 2), (2, 3), (0, 4), (4, 5), (5, 6), (0, 7), (7, 8), (8, 9)];
        WeightedTree::with_unit_weights(10, edges).unwrap()
    }

    fn sit(s: &str) -> Situation {
        s.parse().unwrap()
    }

    #[test]
    fn single_arc_is_already_a_forest() {
        let s = sit("1(1);1(1)");
        let ForestOutcome::Forest(w) = build_containment_forest(&[(0, 1)], &s).unwrap() else { panic!() };
        assert_eq!(w.len(), 2);
        assert_eq!(w.arcs, vec![(0, 1)]);
    }

    #[test]
    fn two_cycle_contracts_to_one_node() {
        let s = sit("1(1);1(1)");
        let stages = build_stages(&[(0, 1), (1, 0)], &s).unwrap().unwrap();
        assert_eq!(stages.w1.arcs.len(), 2);
        assert_eq!(stages.w3.nodes.len(), 1);
        assert_eq!(stages.w3.nodes[0].label, vec![0, 1]);
        assert!(stages.w3.arcs.is_empty());
    }

    #[test]
    fn saturation_detects_incomparable_targets() {
        // σ_1, σ_2 are four-vertex trees of equal size that are not isomorphic.
        let s = sit("1;1(1,1,1);1(1(1(1)))");
        assert!(matches!(
            build_containment_forest(&[(0, 1), (0, 2)], &s).unwrap(),
            ForestOutcome::Empty(EmptyReason::Saturation(_, _))
        ));
        assert!(matches!(
            build_containment_forest(&[(1, 0)], &s).unwrap(),
            ForestOutcome::Empty(EmptyReason::NonContributing(1, 0))
        ));
    }

    #[test]
    fn transitive_arcs_are_dropped() {
        let s = sit("1;1(1);1(1(1))");
        let stages = build_stages(&[(0, 1), (1, 2), (0, 2)], &s).unwrap().unwrap();
        assert_eq!(stages.w2.arcs.len(), 3);
        assert_eq!(stages.w3.arcs, vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn procedure3_examples() {
        let spider = spider_3x3();
        let p2 = RootedWeightedTree::end_rooted_path(2).code();
        let tbl = ContainmentTable::for_classes(&spider, std::slice::from_ref(&p2)).unwrap();
        assert_eq!(procedure3_count(&Host::Tree, &ContainmentForest::empty(), &tbl).unwrap(), BigUint::one());
        let single = ContainmentForest::from_parts(vec![p2.clone()], vec![]);
        assert_eq!(procedure3_count(&Host::Tree, &single, &tbl).unwrap(), BigUint::from(3u32));
        let chain = ContainmentForest::from_parts(vec![p2.clone(), p2.clone()], vec![(0, 1)]);
        assert_eq!(procedure3_count(&Host::Tree, &chain, &tbl).unwrap(), BigUint::from(3u32));
        assert_eq!(assignment_count_oracle(HostTree::Free(&spider), &chain), BigUint::from(3u32));
        let missing = ContainmentForest::from_parts(vec![RootedWeightedTree::single(1).code()], vec![]);
        assert!(matches!(procedure3_count(&Host::Tree, &missing, &tbl), Err(Error::MissingTableEntry(_))));
    }
}
