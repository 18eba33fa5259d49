//! Tree generation: one representative per free tree, every labeled tree, and
//! seeded random weighted trees.

use std::collections::BTreeMap;

use rand::Rng;

use crate::canon::canonicalize_free;
use crate::error::{Error, Result};
use crate::tree::{Weight, WeightedTree};

/// Largest vertex count accepted by [`enumerate_trees`].
pub const MAX_ENUMERATE_N: usize = 12;

/// Rooted trees as level sequences, in the successor order of Beyer and
/// Hedetniemi. The root has level 1 and appears first.
pub struct LevelSequences {
    levels: Vec<usize>,
    done: bool,
}

impl LevelSequences {
    pub fn new(n: usize) -> Self {
        LevelSequences { levels: (1..=n).collect(), done: n == 0 }
    }
}

impl Iterator for LevelSequences {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.levels.clone();
        let l = &mut self.levels;
        match (1..l.len()).rev().find(|&i| l[i] > 2) {
            None => self.done = true,
            Some(p) => {
                let q = (0..p).rev().find(|&i| l[i] == l[p] - 1).expect("parent level exists");
                let period = p - q;
                for i in p..l.len() {
                    l[i] = l[i - period];
                }
            }
        }
        Some(out)
    }
}

/// Unit-weight tree whose vertex `i` sits at `levels[i]`.
pub fn tree_from_levels(levels: &[usize]) -> Result<WeightedTree> {
    let mut edges = Vec::with_capacity(levels.len().saturating_sub(1));
    let mut last_at: Vec<usize> = Vec::new();
    for (i, &lv) in levels.iter().enumerate() {
        if lv == 0 || lv > last_at.len() + 1 || (i == 0) != (lv == 1) {
            return Err(Error::InvalidTree("not a level sequence".into()));
        }
        last_at.truncate(lv - 1);
        if let Some(&p) = last_at.last() {
            edges.push((p, i));
        }
        last_at.push(i);
    }
    WeightedTree::with_unit_weights(levels.len(), edges)
}

/// One unit-weight representative per isomorphism class of free trees on `n`
/// vertices, ordered by canonical code.
pub fn enumerate_trees(n: usize) -> Result<Vec<WeightedTree>> {
    if !(1..=MAX_ENUMERATE_N).contains(&n) {
        return Err(Error::Domain(format!("tree enumeration needs 1 <= n <= {MAX_ENUMERATE_N}, got {n}")));
    }
    let mut classes = BTreeMap::new();
    for levels in LevelSequences::new(n) {
        let t = tree_from_levels(&levels)?;
        classes.entry(canonicalize_free(&t)).or_insert(t);
    }
    Ok(classes.into_values().collect())
}

/// Tree of a Prüfer sequence over `0..seq.len() + 2`.
pub fn tree_from_pruefer(seq: &[usize]) -> Result<WeightedTree> {
    let n = seq.len() + 2;
    if seq.iter().any(|&v| v >= n) {
        return Err(Error::InvalidTree("Prüfer entry out of range".into()));
    }
    let mut degree = vec![1usize; n];
    for &v in seq {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &v in seq {
        let leaf = (0..n).find(|&u| degree[u] == 1).expect("a leaf always remains");
        edges.push((leaf, v));
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
    edges.push((rest[0], rest[1]));
    WeightedTree::with_unit_weights(n, edges)
}

/// All `n^(n-2)` labeled trees on `0..n`, unit weights.
pub fn all_labeled_trees(n: usize) -> Vec<WeightedTree> {
    match n {
        0 => return Vec::new(),
        1 => return vec![WeightedTree::unit_path(1)],
        _ => {}
    }
    let len = n - 2;
    let mut seq = vec![0usize; len];
    let mut out = Vec::new();
    loop {
        out.push(tree_from_pruefer(&seq).expect("entries are in range"));
        let mut i = 0;
        loop {
            if i == len {
                return out;
            }
            seq[i] += 1;
            if seq[i] < n {
                break;
            }
            seq[i] = 0;
            i += 1;
        }
    }
}

/// Uniform random labeled tree on `n` vertices with weights uniform in `1..=weight_bound`.
pub fn random_weighted_tree<R: Rng + ?Sized>(rng: &mut R, n: usize, weight_bound: u64) -> WeightedTree {
    assert!(n >= 1 && weight_bound >= 1);
    let shape = if n == 1 {
        WeightedTree::unit_path(1)
    } else {
        let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
        tree_from_pruefer(&seq).expect("entries are in range")
    };
    let weights: Vec<Weight> = (0..n).map(|_| Weight::from(rng.gen_range(1..=weight_bound))).collect();
    WeightedTree::new(n, shape.edges().to_vec(), weights).expect("valid by construction")
}

/// Random member of the encodable class: `n >= 3`, every weight below `2^n`.
pub fn random_encodable_tree<R: Rng + ?Sized>(rng: &mut R, n: usize, weight_bound: u64) -> WeightedTree {
    assert!(n >= 3);
    let cap = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
    random_weighted_tree(rng, n, weight_bound.min(cap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    const FREE_TREES: [usize; 12] = [1, 1, 1, 2, 3, 6, 11, 23, 47, 106, 235, 551];
    const ROOTED_TREES: [usize; 12] = [1, 1, 2, 4, 9, 20, 48, 115, 286, 719, 1842, 4766];

    #[test]
    fn rooted_sequence_counts() {
        for n in 1..=12 {
            assert_eq!(LevelSequences::new(n).count(), ROOTED_TREES[n - 1], "n={n}");
        }
    }

    #[test]
    fn free_tree_counts() {
        for n in 1..=12 {
            assert_eq!(enumerate_trees(n).unwrap().len(), FREE_TREES[n - 1], "n={n}");
        }
        assert!(enumerate_trees(0).is_err());
        assert!(enumerate_trees(13).is_err());
    }

    #[test]
    fn enumeration_agrees_with_labeled_dedup() {
        for n in 1..=7 {
            let from_labeled: BTreeSet<_> = all_labeled_trees(n).iter().map(canonicalize_free).collect();
            let enumerated: BTreeSet<_> = enumerate_trees(n).unwrap().iter().map(canonicalize_free).collect();
            assert_eq!(from_labeled, enumerated, "n={n}");
        }
    }

    #[test]
    fn cayley_counts() {
        for n in 2..=6usize {
            assert_eq!(all_labeled_trees(n).len(), n.pow(n as u32 - 2));
        }
    }

    #[test]
    fn random_trees_are_seeded() {
        use rand::SeedableRng;
        let mut a = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut b = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for n in 1..10 {
            let (x, y) = (random_weighted_tree(&mut a, n, 8), random_weighted_tree(&mut b, n, 8));
            assert_eq!(x.edges(), y.edges());
            assert_eq!(x.weights(), y.weights());
        }
    }
}
