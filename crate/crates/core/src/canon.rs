//! Canonical codes for rooted and free weighted trees.
//!
//! A vertex is encoded as `[limb count, weight limbs.., child count, child codes..]`
//! with the child codes sorted in code order. The encoding is self-delimiting, so
//! two rooted trees share a code exactly when they are isomorphic. Free trees are
//! rooted at their vertex-count centroid(s) and keep the smaller code.

use std::fmt;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::tree::{RootedWeightedTree, Weight, WeightedTree};

/// Total-order key for the isomorphism class of a weighted tree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode(Vec<u64>);

impl CanonicalCode {
    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    /// Rebuilds a representative rooted tree (root = vertex 0).
    pub fn to_rooted_tree(&self) -> Result<RootedWeightedTree> {
        let mut pos = 0;
        let mut weights = Vec::new();
        let mut edges = Vec::new();
        decode_vertex(&self.0, &mut pos, None, &mut weights, &mut edges)?;
        if pos != self.0.len() {
            return Err(Error::Parse("trailing words after canonical code".into()));
        }
        let tree = WeightedTree::new(weights.len(), edges, weights)?;
        RootedWeightedTree::new(tree, 0)
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{w}")?;
        }
        Ok(())
    }
}

fn decode_vertex(
    words: &[u64],
    pos: &mut usize,
    parent: Option<usize>,
    weights: &mut Vec<Weight>,
    edges: &mut Vec<(usize, usize)>,
) -> Result<()> {
    let mut next = || -> Result<u64> {
        let w = *words.get(*pos).ok_or_else(|| Error::Parse("truncated canonical code".into()))?;
        *pos += 1;
        Ok(w)
    };
    let limbs = next()? as usize;
    let mut digits = Vec::with_capacity(limbs);
    for _ in 0..limbs {
        digits.push(next()?);
    }
    let children = next()? as usize;
    let me = weights.len();
    weights.push(weight_from_limbs(&digits));
    if let Some(p) = parent {
        edges.push((p, me));
    }
    for _ in 0..children {
        decode_vertex(words, pos, Some(me), weights, edges)?;
    }
    Ok(())
}

fn weight_from_limbs(limbs: &[u64]) -> Weight {
    let mut bytes = Vec::with_capacity(limbs.len() * 8);
    for limb in limbs {
        bytes.extend_from_slice(&limb.to_le_bytes());
    }
    BigUint::from_bytes_le(&bytes)
}

fn push_weight(out: &mut Vec<u64>, w: &Weight) {
    let limbs = w.to_u64_digits();
    out.push(limbs.len() as u64);
    out.extend_from_slice(&limbs);
}

/// Codes of every vertex's subtree when `t` is rooted at `root`, indexed by vertex.
pub fn subtree_codes(t: &WeightedTree, root: usize) -> Vec<CanonicalCode> {
    let (order, parent) = t.bfs_from(root);
    let mut codes: Vec<Option<Vec<u64>>> = vec![None; t.n()];
    for &v in order.iter().rev() {
        let mut children: Vec<&Vec<u64>> = t
            .neighbours(v)
            .iter()
            .filter(|&&c| Some(c) != parent[v])
            .map(|&c| codes[c].as_ref().expect("children are coded first"))
            .collect();
        children.sort();
        let mut code = Vec::new();
        push_weight(&mut code, t.weight(v));
        code.push(children.len() as u64);
        for c in children {
            code.extend_from_slice(c);
        }
        codes[v] = Some(code);
    }
    codes.into_iter().map(|c| CanonicalCode(c.expect("every vertex reached"))).collect()
}

/// Code of the component of `t - {v, parent}` that contains `v`, rooted at `v`.
pub fn subtree_code(t: &WeightedTree, v: usize, parent: Option<usize>) -> CanonicalCode {
    let mut code = Vec::new();
    encode_rec(t, v, parent, &mut code);
    CanonicalCode(code)
}

fn encode_rec(t: &WeightedTree, v: usize, parent: Option<usize>, out: &mut Vec<u64>) {
    let mut children: Vec<Vec<u64>> = t
        .neighbours(v)
        .iter()
        .filter(|&&c| Some(c) != parent)
        .map(|&c| {
            let mut sub = Vec::new();
            encode_rec(t, c, Some(v), &mut sub);
            sub
        })
        .collect();
    children.sort();
    push_weight(out, t.weight(v));
    out.push(children.len() as u64);
    for c in children {
        out.extend(c);
    }
}

pub fn canonicalize_rooted(t: &RootedWeightedTree) -> CanonicalCode {
    subtree_code(t.tree(), t.root(), None)
}

/// The one or two vertices minimising the largest component left after their removal.
pub fn centroids(t: &WeightedTree) -> Vec<usize> {
    let n = t.n();
    let (order, parent) = t.bfs_from(0);
    let mut size = vec![1usize; n];
    for &v in order.iter().rev() {
        if let Some(p) = parent[v] {
            size[p] += size[v];
        }
    }
    let worst: Vec<usize> = (0..n)
        .map(|v| {
            let mut m = n - size[v];
            for &c in t.neighbours(v) {
                if Some(c) != parent[v] {
                    m = m.max(size[c]);
                }
            }
            m
        })
        .collect();
    let best = *worst.iter().min().expect("non-empty tree");
    (0..n).filter(|&v| worst[v] == best).collect()
}

pub fn canonicalize_free(t: &WeightedTree) -> CanonicalCode {
    centroids(t)
        .into_iter()
        .map(|c| subtree_code(t, c, None))
        .min()
        .expect("every tree has a centroid")
}

pub fn is_isomorphic(a: &WeightedTree, b: &WeightedTree) -> bool {
    a.n() == b.n() && canonicalize_free(a) == canonicalize_free(b)
}

pub fn is_rooted_isomorphic(a: &RootedWeightedTree, b: &RootedWeightedTree) -> bool {
    a.n() == b.n() && canonicalize_rooted(a) == canonicalize_rooted(b)
}
