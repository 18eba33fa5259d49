//! Shared inputs for the criterion benchmarks.

use upoly_core::tree::WeightedTree;

/// Spider with `legs` legs of `len` vertices each around a unit-weight centre.
pub fn spider(legs: usize, len: usize) -> WeightedTree {
    let mut edges = Vec::new();
    let mut next = 1;
    for _ in 0..legs {
        let mut prev = 0;
        for _ in 0..len {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
    }
    WeightedTree::with_unit_weights(next, edges).expect("spiders are trees")
}
