//! Connected partitions, the U-polynomial as an expression-count table, and
//! partition counting by characteristic.
//!
//! For a tree every edge subset `A` leaves `n - |A|` components, so the
//! `(z - 1)` exponent `|A| - w(T) + c(A)` is the constant `n - w(T)`. The
//! U-polynomial is therefore fully described by that constant together with
//! the number of edge subsets producing each expression.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::expression::Expression;
use crate::tree::{Weight, WeightedTree};

/// Edge subsets are enumerated as bitmasks; beyond this many edges brute force is refused.
pub const MAX_BRUTE_EDGES: usize = 26;

/// A partition of `V(T)` into parts that each induce a connected subtree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectedPartition {
    pub parts: Vec<Vec<usize>>,
}

impl ConnectedPartition {
    pub fn new(parts: Vec<Vec<usize>>) -> Self {
        ConnectedPartition { parts }
    }

    pub fn validate(&self, t: &WeightedTree) -> Result<()> {
        let mut owner = vec![usize::MAX; t.n()];
        for (i, part) in self.parts.iter().enumerate() {
            if part.is_empty() {
                return Err(Error::InvalidPartition(format!("part {i} is empty")));
            }
            for &v in part {
                if v >= t.n() {
                    return Err(Error::InvalidPartition(format!("vertex {v} out of range")));
                }
                if owner[v] != usize::MAX {
                    return Err(Error::InvalidPartition(format!("vertex {v} appears twice")));
                }
                owner[v] = i;
            }
        }
        if let Some(v) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(Error::InvalidPartition(format!("vertex {v} is not covered")));
        }
        // A part with k vertices is connected iff it spans k - 1 tree edges.
        let mut inner_edges = vec![0usize; self.parts.len()];
        for &(u, v) in t.edges() {
            if owner[u] == owner[v] {
                inner_edges[owner[u]] += 1;
            }
        }
        for (i, part) in self.parts.iter().enumerate() {
            if inner_edges[i] + 1 != part.len() {
                return Err(Error::InvalidPartition(format!("part {i} is not connected")));
            }
        }
        Ok(())
    }
}

/// Multiset of part weights.
pub fn characteristic(p: &ConnectedPartition, t: &WeightedTree) -> Result<Expression> {
    p.validate(t)?;
    Ok(Expression::from_parts_unchecked(p.parts.iter().map(|part| t.weight_of(part)).collect()))
}

/// The U-polynomial of a weighted tree, collapsed to expression counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpressionCounts {
    pub n: usize,
    pub total_weight: Weight,
    /// Exponent of `(z - 1)` shared by every term: `n - w(T)`.
    pub z_exponent: BigInt,
    pub counts: BTreeMap<Expression, BigUint>,
}

impl ExpressionCounts {
    pub fn get(&self, e: &Expression) -> BigUint {
        self.counts.get(e).cloned().unwrap_or_default()
    }

    /// Entries from the largest expression `(w(T))` down to the finest.
    pub fn iter_desc(&self) -> impl Iterator<Item = (&Expression, &BigUint)> {
        self.counts.iter().rev()
    }

    pub fn mass(&self) -> BigUint {
        self.counts.values().sum()
    }

    /// Byte-stable text form: a header line, then `parts: count` per expression.
    pub fn fingerprint(&self) -> String {
        let mut s = String::new();
        writeln!(s, "n={} w={} z^{}", self.n, self.total_weight, self.z_exponent).unwrap();
        for (e, c) in self.iter_desc() {
            writeln!(s, "{e}: {c}").unwrap();
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UMode {
    /// Enumerate all `2^(n-1)` edge subsets.
    Brute,
    /// Tree dynamic programme over (closed parts, open part weight).
    Dp,
}

pub fn u_polynomial(t: &WeightedTree, mode: UMode) -> Result<ExpressionCounts> {
    let counts = match mode {
        UMode::Brute => u_brute(t)?,
        UMode::Dp => u_dp(t),
    };
    Ok(ExpressionCounts {
        n: t.n(),
        total_weight: t.total_weight(),
        z_exponent: BigInt::from(t.n()) - BigInt::from(t.total_weight()),
        counts,
    })
}

pub(crate) fn check_brute_size(t: &WeightedTree) -> Result<()> {
    if t.edges().len() > MAX_BRUTE_EDGES {
        return Err(Error::Resource(format!(
            "{} edges exceed the brute-force limit of {MAX_BRUTE_EDGES}",
            t.edges().len()
        )));
    }
    Ok(())
}

/// Component labels of `(V, A)` for the edge subset `mask`, plus the component count.
pub(crate) fn components_of(t: &WeightedTree, mask: u64) -> (Vec<usize>, usize) {
    let n = t.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (i, &(u, v)) in t.edges().iter().enumerate() {
        if mask >> i & 1 == 1 {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            parent[a] = b;
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut roots = vec![usize::MAX; n];
    let mut count = 0;
    #[allow(clippy::needless_range_loop)]
    for v in 0..n {
        let r = find(&mut parent, v);
        if roots[r] == usize::MAX {
            roots[r] = count;
            count += 1;
        }
        label[v] = roots[r];
    }
    (label, count)
}

pub(crate) fn component_weights(t: &WeightedTree, mask: u64) -> Vec<Weight> {
    let (label, count) = components_of(t, mask);
    let mut ws = vec![Weight::zero(); count];
    for v in 0..t.n() {
        ws[label[v]] += t.weight(v);
    }
    ws
}

/// Every connected partition of `t`, one per edge subset.
pub fn connected_partitions(t: &WeightedTree) -> Result<Vec<ConnectedPartition>> {
    check_brute_size(t)?;
    let m = t.edges().len();
    Ok((0..1u64 << m)
        .map(|mask| {
            let (label, count) = components_of(t, mask);
            let mut parts = vec![Vec::new(); count];
            for v in 0..t.n() {
                parts[label[v]].push(v);
            }
            ConnectedPartition { parts }
        })
        .collect())
}

fn u_brute(t: &WeightedTree) -> Result<BTreeMap<Expression, BigUint>> {
    check_brute_size(t)?;
    let mut counts = BTreeMap::new();
    for mask in 0..1u64 << t.edges().len() {
        let e = Expression::from_parts_unchecked(component_weights(t, mask));
        *counts.entry(e).or_insert_with(BigUint::zero) += 1u32;
    }
    Ok(counts)
}

type DpState = HashMap<(Expression, Weight), BigUint>;

fn u_dp(t: &WeightedTree) -> BTreeMap<Expression, BigUint> {
    let (order, parent) = t.bfs_from(0);
    let mut states: Vec<Option<DpState>> = vec![None; t.n()];
    for &v in order.iter().rev() {
        let mut acc: DpState = HashMap::from([((Expression::empty(), t.weight(v).clone()), BigUint::one())]);
        for &c in t.neighbours(v) {
            if Some(c) == parent[v] {
                continue;
            }
            let child = states[c].take().expect("children finish first");
            let mut next: DpState = HashMap::new();
            for ((closed_a, open_a), count_a) in &acc {
                for ((closed_b, open_b), count_b) in &child {
                    let closed = closed_a.merge(closed_b);
                    let ways = count_a * count_b;
                    // keep the edge v-c: the child's open part joins ours
                    *next.entry((closed.clone(), open_a + open_b)).or_default() += &ways;
                    // cut it: the child's open part is finished
                    *next.entry((closed.with_part(open_b.clone()), open_a.clone())).or_default() += ways;
                }
            }
            acc = next;
        }
        states[v] = Some(acc);
    }
    let mut counts = BTreeMap::new();
    for ((closed, open), c) in states[order[0]].take().expect("root state") {
        *counts.entry(closed.with_part(open)).or_insert_with(BigUint::zero) += c;
    }
    counts
}

/// Number of connected partitions of `t` with characteristic `e`.
pub fn count_partitions(t: &WeightedTree, e: &Expression) -> BigUint {
    if e.total() != t.total_weight() || e.len() > t.n() {
        return BigUint::zero();
    }
    u_dp(t).remove(e).unwrap_or_default()
}

/// Number of edges with exactly one end in `part`.
fn boundary_size(t: &WeightedTree, in_part: &[bool]) -> usize {
    t.edges().iter().filter(|&&(u, v)| in_part[u] != in_part[v]).count()
}

/// `(shaped, non-shaped)` counts of connected partitions with characteristic
/// `e`, each partition counted once per part of weight `w(T) - j` and split by
/// whether that designated part is a component of `T - e'` for some edge `e'`.
pub fn designated_part_census(t: &WeightedTree, j: &Weight, e: &Expression) -> Result<(BigUint, BigUint)> {
    let w = t.total_weight();
    e.j_side(j, &w)?;
    let target = &w - j;
    let mut shaped = BigUint::zero();
    let mut nonshaped = BigUint::zero();
    for p in connected_partitions(t)? {
        let ch = Expression::from_parts_unchecked(p.parts.iter().map(|part| t.weight_of(part)).collect());
        if ch != *e {
            continue;
        }
        for part in &p.parts {
            if t.weight_of(part) != target {
                continue;
            }
            let mut in_part = vec![false; t.n()];
            for &v in part {
                in_part[v] = true;
            }
            if boundary_size(t, &in_part) == 1 {
                shaped += 1u32;
            } else {
                nonshaped += 1u32;
            }
        }
    }
    Ok((shaped, nonshaped))
}

/// Shaped j-partitions with characteristic `e`, by direct enumeration.
pub fn count_shaped_oracle(t: &WeightedTree, j: &Weight, e: &Expression) -> Result<BigUint> {
    designated_part_census(t, j, e).map(|(s, _)| s)
}

/// Non-shaped j-partitions with characteristic `e`, by direct enumeration.
pub fn count_nonshaped_oracle(t: &WeightedTree, j: &Weight, e: &Expression) -> Result<BigUint> {
    designated_part_census(t, j, e).map(|(_, x)| x)
}

/// Whether the j-side parts of `fine` can be grouped into the j-side parts of `coarse`.
pub fn is_refinement(fine: &Expression, coarse: &Expression, j: &Weight, w_total: &Weight) -> Result<bool> {
    let fine = fine.j_side(j, w_total)?;
    let coarse = coarse.j_side(j, w_total)?;
    if fine.len() < coarse.len() {
        return Ok(false);
    }
    let mut bins: Vec<Weight> = coarse.parts().to_vec();
    Ok(pack(fine.parts(), 0, &mut bins))
}

/// Assigns each item (descending) to a bin with enough room; all bins must end empty.
fn pack(items: &[Weight], i: usize, bins: &mut [Weight]) -> bool {
    if i == items.len() {
        return bins.iter().all(Zero::is_zero);
    }
    for b in 0..bins.len() {
        if bins[b] < items[i] || bins[..b].contains(&bins[b]) {
            continue;
        }
        bins[b] -= &items[i];
        let ok = pack(items, i + 1, bins);
        bins[b] += &items[i];
        if ok {
            return true;
        }
    }
    false
}
