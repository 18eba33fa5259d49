//! Hanging subtrees (either side of a removed edge) and shapes.

use std::collections::BTreeSet;

use crate::canon::{self, CanonicalCode};
use crate::tree::{RootedWeightedTree, Weight, WeightedTree};

/// One side of `host - detach_edge`, rooted at the endpoint of the edge it contains.
#[derive(Clone, Debug)]
pub struct HangingSubtree {
    /// `(root, outside)`: the removed edge, oriented from the component outwards.
    pub detach_edge: (usize, usize),
    pub component: RootedWeightedTree,
    /// Host vertex ids of the component, sorted.
    pub vertices: Vec<usize>,
    pub weight: Weight,
    pub code: CanonicalCode,
}

impl HangingSubtree {
    fn new(host: &WeightedTree, root: usize, outside: usize) -> Self {
        let vertices = host.component(root, Some(outside));
        let component = host
            .induced_rooted(&vertices, root)
            .expect("components of a tree minus an edge are subtrees");
        let code = canon::subtree_code(host, root, Some(outside));
        let weight = host.weight_of(&vertices);
        HangingSubtree { detach_edge: (root, outside), component, vertices, weight, code }
    }

    pub fn root(&self) -> usize {
        self.detach_edge.0
    }

    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    pub fn contains(&self, other: &HangingSubtree) -> bool {
        other.vertices.iter().all(|v| self.vertices.binary_search(v).is_ok())
    }

    pub fn is_disjoint(&self, other: &HangingSubtree) -> bool {
        other.vertices.iter().all(|v| self.vertices.binary_search(v).is_err())
    }
}

/// Both sides of every edge: `2(n - 1)` entries, in edge order.
pub fn hanging_subtrees(t: &WeightedTree) -> Vec<HangingSubtree> {
    let mut out = Vec::with_capacity(2 * t.edges().len());
    for &(u, v) in t.edges() {
        out.push(HangingSubtree::new(t, u, v));
        out.push(HangingSubtree::new(t, v, u));
    }
    out
}

/// Hanging subtrees with between 2 and `n - 2` vertices.
pub fn shapes(t: &WeightedTree) -> Vec<HangingSubtree> {
    let n = t.n();
    hanging_subtrees(t)
        .into_iter()
        .filter(|h| h.size() >= 2 && h.size() + 2 <= n)
        .collect()
}

/// Number of shapes of `t` rooted-isomorphic to `s`.
pub fn shape_count(s: &RootedWeightedTree, t: &WeightedTree) -> usize {
    let code = s.code();
    shapes(t).iter().filter(|h| h.code == code).count()
}

/// Number of hanging subtrees of the unrooted tree `t` rooted-isomorphic to `s`
/// (no size restriction).
pub fn hanging_count(s: &RootedWeightedTree, t: &WeightedTree) -> usize {
    count_hanging_by_code(&s.code(), t)
}

pub(crate) fn count_hanging_by_code(code: &CanonicalCode, t: &WeightedTree) -> usize {
    t.edges()
        .iter()
        .flat_map(|&(u, v)| [(u, v), (v, u)])
        .filter(|&(root, outside)| canon::subtree_code(t, root, Some(outside)) == *code)
        .count()
}

/// Hanging subtrees of `h` on the side away from its root that are isomorphic
/// to `s`, plus one when `s` is isomorphic to `h` itself.
///
/// Equivalently: the number of vertices of `h` whose subtree (with `h` rooted
/// at its root) is isomorphic to `s`.
pub fn hang_count(s: &RootedWeightedTree, h: &RootedWeightedTree) -> usize {
    count_hang_by_code(&s.code(), h)
}

pub(crate) fn count_hang_by_code(code: &CanonicalCode, h: &RootedWeightedTree) -> usize {
    canon::subtree_codes(h.tree(), h.root()).iter().filter(|c| *c == code).count()
}

/// Distinct shape weights in increasing order.
pub fn alpha_vector(t: &WeightedTree) -> Vec<Weight> {
    shapes(t).into_iter().map(|h| h.weight).collect::<BTreeSet<_>>().into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spider_3x3() -> WeightedTree {
        // centre 0, legs 0-1-2-3, 0-4-5-6, 0-7-8-9
        let edges = vec![(0, 1), (1, 2), (2, 3), (0, 4), (4, 5), (5, 6), (0, 7), (7, 8), (8, 9)];
        WeightedTree::with_unit_weights(10, edges).unwrap()
    }

    #[test]
    fn hanging_subtrees_of_small_paths_and_stars() {
        assert!(hanging_subtrees(&WeightedTree::unit_path(1)).is_empty());
        let two = hanging_subtrees(&WeightedTree::unit_path(2));
        assert_eq!(two.len(), 2);
        assert!(two.iter().all(|h| h.size() == 1));

        let three = hanging_subtrees(&WeightedTree::unit_path(3));
        let mut seen: Vec<(Vec<usize>, usize)> =
            three.iter().map(|h| (h.vertices.clone(), h.root())).collect();
        seen.sort();
        assert_eq!(seen, vec![(vec![0], 0), (vec![0, 1], 1), (vec![1, 2], 1), (vec![2], 2)]);

        let star = hanging_subtrees(&WeightedTree::unit_star(4));
        assert_eq!(star.len(), 6);
        assert_eq!(star.iter().filter(|h| h.size() == 1).count(), 3);
        assert!(star.iter().filter(|h| h.size() == 3).all(|h| h.root() == 0));
    }

    #[test]
    fn shapes_on_paths_and_stars() {
        let p4 = shapes(&WeightedTree::unit_path(4));
        assert_eq!(p4.len(), 2);
        let end2 = RootedWeightedTree::end_rooted_path(2).code();
        assert!(p4.iter().all(|h| h.code == end2));
        assert!(shapes(&WeightedTree::unit_star(4)).is_empty());
        let p5 = shapes(&WeightedTree::unit_path(5));
        assert_eq!(p5.len(), 4);
        assert_eq!(p5.iter().filter(|h| h.size() == 2).count(), 2);
        assert_eq!(p5.iter().filter(|h| h.size() == 3).count(), 2);
    }

    #[test]
    fn shape_and_hang_counts() {
        let p2 = RootedWeightedTree::end_rooted_path(2);
        assert_eq!(shape_count(&p2, &WeightedTree::unit_path(4)), 2);
        assert_eq!(shape_count(&p2, &WeightedTree::unit_star(4)), 0);
        assert_eq!(shape_count(&RootedWeightedTree::single(1), &WeightedTree::unit_path(5)), 0);

        assert_eq!(hang_count(&p2, &p2), 1);
        let p3 = RootedWeightedTree::end_rooted_path(3);
        assert_eq!(hang_count(&RootedWeightedTree::single(1), &p3), 1);
        assert_eq!(hang_count(&p2, &RootedWeightedTree::end_rooted_path(4)), 1);
        assert_eq!(hanging_count(&p2, &spider_3x3()), 3);
    }

    #[test]
    fn alpha_vectors() {
        let w = |xs: &[u32]| xs.iter().map(|&x| Weight::from(x)).collect::<Vec<_>>();
        assert_eq!(alpha_vector(&WeightedTree::unit_path(4)), w(&[2]));
        assert_eq!(alpha_vector(&WeightedTree::unit_path(5)), w(&[2, 3]));
        assert!(alpha_vector(&WeightedTree::unit_star(4)).is_empty());
    }
}
