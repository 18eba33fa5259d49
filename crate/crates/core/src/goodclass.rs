//! Embedding of arbitrary weighted trees into a good class, its decoder, and a
//! checker for the three good-set axioms.
//!
//! Every leaf `h` of `T` receives two new pendant leaves, giving `T'`. The
//! vertices of `T` are then coded bottom-up: a leaf gets `0 1 w(h)`, and a
//! vertex whose neighbours are all coded except one gets
//! `c(v) = 0 z_1 .. z_m 1 w(v)` with `z_1 >= .. >= z_m` the codes of the coded
//! neighbours and `w(v)` written in exactly `n = |V(T)|` bits. The smallest
//! candidate code is assigned first (ties to the smallest id). The last
//! uncoded vertex is the root `r`.
//!
//! Weights on `T'`: every leaf of `T'` and every leaf of `T` weighs 1; other
//! non-root vertices weigh the integer value of their code; the root weighs
//! the value of its own full code plus the sum of all other weights, which
//! makes it the unique heaviest vertex. Because a leaf's weight is not stored
//! on the leaf itself, it is carried inside the code of its neighbour, and
//! the root's code keeps the leaves that hang directly off the root.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::canon::CanonicalCode;
use crate::error::{Error, Result};
use crate::hanging::{hanging_subtrees, shapes};
use crate::tree::{Weight, WeightedTree};

/// A finite bit string, most significant bit first. Ordered by the integer it
/// codes, so leading zeros do not affect comparisons.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BitCode {
    bits: Vec<bool>,
}

impl BitCode {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        BitCode { bits }
    }

    /// `value` in exactly `width` bits; `None` if it does not fit.
    pub fn from_value(value: &BigUint, width: usize) -> Option<Self> {
        if value.bits() as usize > width {
            return None;
        }
        let bits = (0..width).rev().map(|i| value.bit(i as u64)).collect();
        Some(BitCode { bits })
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn value(&self) -> BigUint {
        let mut v = BigUint::zero();
        for &b in &self.bits {
            v <<= 1u32;
            if b {
                v += 1u32;
            }
        }
        v
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn extend(&mut self, other: &BitCode) {
        self.bits.extend_from_slice(&other.bits);
    }

    fn significant(&self) -> &[bool] {
        let first = self.bits.iter().position(|&b| b).unwrap_or(self.bits.len());
        &self.bits[first..]
    }
}

impl Ord for BitCode {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (self.significant(), other.significant());
        a.len().cmp(&b.len()).then_with(|| a.cmp(b))
    }
}

impl PartialOrd for BitCode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodEmbedding {
    pub t_prime: WeightedTree,
    /// The unique heaviest vertex of `t_prime`.
    pub root: usize,
    /// `|V(T)|`, the width of every weight field inside a code.
    pub origin_n: usize,
}

impl GoodEmbedding {
    /// Recovers the root and source size from an embedded tree alone.
    pub fn from_t_prime(t_prime: WeightedTree) -> Result<Self> {
        let origin_n = (0..t_prime.n()).filter(|&v| !t_prime.is_leaf(v)).count();
        let max = t_prime.weights().iter().max().expect("trees are non-empty");
        let mut heaviest = (0..t_prime.n()).filter(|&v| t_prime.weight(v) == max);
        let root = heaviest.next().expect("some vertex is heaviest");
        if heaviest.next().is_some() {
            return Err(malformed("no unique maximum-weight vertex"));
        }
        Ok(GoodEmbedding { t_prime, root, origin_n })
    }
}

/// One assignment made while coding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodingStep {
    /// 1 for the leaves of `T`, then one vertex per step.
    pub step: usize,
    pub vertex: usize,
    pub code: BitCode,
}

/// Everything the coding decided, in order. Vertex ids are those of `T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodingTrace {
    pub steps: Vec<CodingStep>,
    pub root: usize,
    pub root_code: BitCode,
}

impl EncodingTrace {
    pub fn step_of(&self, v: usize) -> Option<usize> {
        self.steps.iter().find(|s| s.vertex == v).map(|s| s.step)
    }

    pub fn code_of(&self, v: usize) -> Option<&BitCode> {
        self.steps.iter().find(|s| s.vertex == v).map(|s| &s.code)
    }
}

fn vertex_code(det: &[&BitCode], weight: &Weight, n: usize) -> BitCode {
    let mut zs: Vec<&BitCode> = det.to_vec();
    zs.sort_by(|a, b| b.cmp(a));
    let mut c = BitCode::default();
    c.push(false);
    for z in zs {
        c.extend(z);
    }
    c.push(true);
    c.extend(&BitCode::from_value(weight, n).expect("weights are checked to fit"));
    c
}

fn check_domain(t: &WeightedTree) -> Result<()> {
    let n = t.n();
    if n < 3 {
        return Err(Error::Domain(format!("the embedding needs at least 3 vertices, got {n}")));
    }
    let limit = BigUint::one() << n;
    if let Some(v) = (0..n).find(|&v| *t.weight(v) >= limit) {
        return Err(Error::Domain(format!(
            "weight {} of vertex {v} does not fit in {n} bits",
            t.weight(v)
        )));
    }
    Ok(())
}

pub fn good_encode(t: &WeightedTree) -> Result<GoodEmbedding> {
    good_encode_traced(t).map(|(g, _)| g)
}

/// As [`good_encode`], also returning the order and codes of the coding.
pub fn good_encode_traced(t: &WeightedTree) -> Result<(GoodEmbedding, EncodingTrace)> {
    check_domain(t)?;
    let n = t.n();
    let mut code: Vec<Option<BitCode>> = vec![None; n];
    let mut steps = Vec::with_capacity(n);
    let leaves = t.leaves();
    for &h in &leaves {
        let c = vertex_code(&[], t.weight(h), n);
        steps.push(CodingStep { step: 1, vertex: h, code: c.clone() });
        code[h] = Some(c);
    }
    let uncoded_neighbours =
        |code: &[Option<BitCode>], v: usize| t.neighbours(v).iter().filter(|&&u| code[u].is_none()).count();
    let mut step = 1;
    let root = loop {
        if let Some(r) = (0..n).find(|&v| code[v].is_none() && uncoded_neighbours(&code, v) == 0) {
            break r;
        }
        step += 1;
        let (c, x) = (0..n)
            .filter(|&v| code[v].is_none() && uncoded_neighbours(&code, v) == 1)
            .map(|v| {
                let det: Vec<&BitCode> = t.neighbours(v).iter().filter_map(|&u| code[u].as_ref()).collect();
                (vertex_code(&det, t.weight(v), n), v)
            })
            .min()
            .ok_or_else(|| Error::Internal("coding stalled with no candidate".into()))?;
        steps.push(CodingStep { step, vertex: x, code: c.clone() });
        code[x] = Some(c);
    };
    let all: Vec<&BitCode> = t.neighbours(root).iter().map(|&u| code[u].as_ref().expect("all coded")).collect();
    let root_code = vertex_code(&all, t.weight(root), n);

    let n_prime = n + 2 * leaves.len();
    let mut weights = vec![Weight::one(); n_prime];
    for v in 0..n {
        if v != root && !t.is_leaf(v) {
            weights[v] = code[v].as_ref().expect("coded").value();
        }
    }
    let others: Weight = weights.iter().sum::<Weight>() - Weight::one();
    weights[root] = root_code.value() + others;
    let mut edges = t.edges().to_vec();
    for (i, &h) in leaves.iter().enumerate() {
        edges.push((h, n + 2 * i));
        edges.push((h, n + 2 * i + 1));
    }
    let t_prime = WeightedTree::new(n_prime, edges, weights)?;
    let trace = EncodingTrace { steps, root, root_code };
    Ok((GoodEmbedding { t_prime, root, origin_n: n }, trace))
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedEmbedding(msg.into())
}

/// Splits `c(v)` into its direct sub-codes; `c` must be exactly one code.
fn direct_subcodes(bits: &[bool], n: usize) -> Result<Vec<&[bool]>> {
    fn parse(bits: &[bool], at: usize, n: usize, depth: usize) -> Result<usize> {
        if depth > bits.len() || bits.get(at) != Some(&false) {
            return Err(malformed("code does not start with 0"));
        }
        let mut i = at + 1;
        loop {
            match bits.get(i) {
                Some(true) => break,
                Some(false) => i = parse(bits, i, n, depth + 1)?,
                None => return Err(malformed("truncated code")),
            }
        }
        let end = i + 1 + n;
        if end > bits.len() {
            return Err(malformed("truncated weight field"));
        }
        Ok(end)
    }
    let mut out = Vec::new();
    if bits.first() != Some(&false) {
        return Err(malformed("code does not start with 0"));
    }
    let mut i = 1;
    while bits.get(i) == Some(&false) {
        let end = parse(bits, i, n, 1)?;
        out.push(&bits[i..end]);
        i = end;
    }
    if bits.get(i) != Some(&true) || i + 1 + n != bits.len() {
        return Err(malformed("code has the wrong length"));
    }
    Ok(out)
}

/// Restores the leading zeros lost when a code is stored as an integer: codes
/// of `k` coded vertices have exactly `k (n + 2)` bits.
fn code_from_value(value: &BigUint, n: usize) -> Result<BitCode> {
    let len = value.bits() as usize;
    let block = n + 2;
    let k = len.div_ceil(block).max(1);
    BitCode::from_value(value, k * block).ok_or_else(|| malformed("code length"))
}

fn low_bits(value: &BigUint, n: usize) -> Weight {
    value % (BigUint::one() << n)
}

pub fn good_decode(g: &GoodEmbedding) -> Result<WeightedTree> {
    let tp = &g.t_prime;
    let keep: Vec<usize> = (0..tp.n()).filter(|&v| !tp.is_leaf(v)).collect();
    let n = keep.len();
    if n < 3 {
        return Err(malformed("fewer than 3 vertices remain after removing leaves"));
    }
    if n != g.origin_n {
        return Err(malformed(format!("expected {} inner vertices, found {n}", g.origin_n)));
    }
    let max = tp.weights().iter().max().expect("non-empty");
    let heaviest: Vec<usize> = (0..tp.n()).filter(|&v| tp.weight(v) == max).collect();
    if heaviest.len() != 1 {
        return Err(malformed("no unique maximum-weight vertex"));
    }
    let r = heaviest[0];
    if r != g.root {
        return Err(malformed("stored root is not the heaviest vertex"));
    }
    let others: Weight = tp.weights().iter().sum::<Weight>() - tp.weight(r);
    if *tp.weight(r) <= others {
        return Err(malformed("root weight does not exceed the remaining total"));
    }
    let root_value = tp.weight(r) - &others;

    let mut index = vec![usize::MAX; tp.n()];
    for (i, &v) in keep.iter().enumerate() {
        index[v] = i;
    }
    let inner_neighbours = |v: usize| tp.neighbours(v).iter().copied().filter(|&u| index[u] != usize::MAX);
    let is_t_leaf = |v: usize| inner_neighbours(v).count() == 1;

    let mut weights = vec![Weight::zero(); n];
    for &v in &keep {
        if is_t_leaf(v) {
            continue;
        }
        let value = if v == r { &root_value } else { tp.weight(v) };
        weights[index[v]] = low_bits(value, n);
        let leaf_neighbours: Vec<usize> = inner_neighbours(v).filter(|&u| is_t_leaf(u)).collect();
        if leaf_neighbours.is_empty() {
            continue;
        }
        let code = code_from_value(value, n)?;
        let leaf_weights: Vec<Weight> = direct_subcodes(code.bits(), n)?
            .into_iter()
            .filter(|c| c.len() == n + 2)
            .map(|c| BitCode::from_bits(c[2..].to_vec()).value())
            .collect();
        if leaf_weights.len() != leaf_neighbours.len() {
            return Err(malformed(format!("code of vertex {v} does not match its leaf count")));
        }
        for (u, w) in leaf_neighbours.into_iter().zip(leaf_weights) {
            weights[index[u]] = w;
        }
    }
    if weights.iter().any(Zero::is_zero) {
        return Err(malformed("recovered a non-positive weight"));
    }
    let edges = tp
        .edges()
        .iter()
        .filter(|&&(a, b)| index[a] != usize::MAX && index[b] != usize::MAX)
        .map(|&(a, b)| (index[a], index[b]))
        .collect();
    WeightedTree::new(n, edges, weights)
}

/// A shape, identified by the tree it lives in and its detach edge `(root, outside)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeRef {
    pub tree: usize,
    pub detach_edge: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeVerdict {
    /// A vertex adjacent to a leaf with two or more non-leaf neighbours.
    pub structure_witness: Option<usize>,
    /// A leaf, or a neighbour of a leaf, whose weight is not 1.
    pub leaf_weight_witness: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodReport {
    pub trees: Vec<TreeVerdict>,
    /// Light shapes examined against the whole set.
    pub shapes_checked: usize,
    /// First pair of non-isomorphic shapes with equal weight multisets.
    pub shape_violation: Option<(ShapeRef, ShapeRef)>,
}

impl GoodReport {
    pub fn structure_holds(&self) -> bool {
        self.trees.iter().all(|t| t.structure_witness.is_none())
    }

    pub fn leaf_weights_hold(&self) -> bool {
        self.trees.iter().all(|t| t.leaf_weight_witness.is_none())
    }

    pub fn shapes_hold(&self) -> bool {
        self.shape_violation.is_none()
    }

    pub fn is_good(&self) -> bool {
        self.structure_holds() && self.leaf_weights_hold() && self.shapes_hold()
    }
}

fn verdict(t: &WeightedTree) -> TreeVerdict {
    let near_leaf = |v: usize| t.neighbours(v).iter().any(|&u| t.is_leaf(u));
    let structure_witness = (0..t.n())
        .find(|&v| near_leaf(v) && t.neighbours(v).iter().filter(|&&u| !t.is_leaf(u)).count() > 1);
    let leaf_weight_witness =
        (0..t.n()).find(|&v| (t.is_leaf(v) || near_leaf(v)) && !t.weight(v).is_one());
    TreeVerdict { structure_witness, leaf_weight_witness }
}

/// Checks the good-set axioms on `ts` taken as one set.
pub fn check_good(ts: &[WeightedTree]) -> GoodReport {
    let trees = ts.iter().map(verdict).collect();
    // Multisets of light shapes, each with the first class seen.
    let mut light: HashMap<Vec<Weight>, (CanonicalCode, ShapeRef)> = HashMap::new();
    let mut shapes_checked = 0;
    let mut shape_violation = None;
    for (i, t) in ts.iter().enumerate() {
        let half = t.total_weight();
        for s in shapes(t) {
            if &s.weight * 2u32 > half {
                continue;
            }
            shapes_checked += 1;
            let here = ShapeRef { tree: i, detach_edge: s.detach_edge };
            match light.get(&s.component.weight_multiset()) {
                Some((code, seen)) if *code != s.code => {
                    shape_violation.get_or_insert((seen.clone(), here));
                }
                Some(_) => {}
                None => {
                    light.insert(s.component.weight_multiset(), (s.code.clone(), here));
                }
            }
        }
    }
    // Every shape of every tree, light or not, must agree with a light shape
    // sharing its multiset.
    for (i, t) in ts.iter().enumerate() {
        if shape_violation.is_some() {
            break;
        }
        for s in shapes(t) {
            if let Some((code, seen)) = light.get(&s.component.weight_multiset()) {
                if *code != s.code {
                    shape_violation = Some((seen.clone(), ShapeRef { tree: i, detach_edge: s.detach_edge }));
                    break;
                }
            }
        }
    }
    GoodReport { trees, shapes_checked, shape_violation }
}

/// Number of hanging subtrees rooted at `x` all of whose other vertices are
/// already coded when `x` is; the coding guarantees exactly one.
pub fn pending_shapes(t: &WeightedTree, trace: &EncodingTrace, x: usize) -> usize {
    let Some(at) = trace.step_of(x) else { return 0 };
    hanging_subtrees(t)
        .into_iter()
        .filter(|h| h.root() == x)
        .filter(|h| {
            h.vertices
                .iter()
                .all(|&v| v == x || trace.step_of(v).is_some_and(|s| s < at))
        })
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::is_isomorphic;

    fn weights(g: &GoodEmbedding) -> Vec<u64> {
        g.t_prime.weights().iter().map(|w| u64::try_from(w).unwrap()).collect()
    }

    #[test]
    fn bit_codes_order_by_value() {
        let a = BitCode::from_bits(vec![false, false, true, true]);
        let b = BitCode::from_bits(vec![true, false]);
        assert!(a > b);
        assert_eq!(a.value(), BigUint::from(3u32));
        assert_eq!(BitCode::from_value(&BigUint::from(5u32), 4).unwrap().to_string(), "0101");
        assert!(BitCode::from_value(&BigUint::from(16u32), 4).is_none());
    }

    // Expected weights come from a separate re-implementation of the coding.
    #[test]
    fn three_path_embedding() {
        let g = good_encode(&WeightedTree::unit_path(3)).unwrap();
        assert_eq!(g.t_prime.n(), 7);
        assert_eq!(g.root, 1);
        assert_eq!(weights(&g), vec![1, 4767, 1, 1, 1, 1, 1]);
        assert!(is_isomorphic(&good_decode(&g).unwrap(), &WeightedTree::unit_path(3)));
    }

    #[test]
    fn four_path_embedding() {
        let (g, trace) = good_encode_traced(&WeightedTree::unit_path(4)).unwrap();
        assert_eq!(trace.code_of(1).unwrap().to_string(), "001000110001");
        assert_eq!(trace.root, 2);
        assert_eq!(weights(&g), vec![1, 561, 1150056, 1, 1, 1, 1, 1]);
        assert!(is_isomorphic(&good_decode(&g).unwrap(), &WeightedTree::unit_path(4)));
    }

    #[test]
    fn weighted_embedding_keeps_leaf_weights() {
        let t = WeightedTree::from_u64(5, vec![(0, 1), (1, 2), (2, 3), (2, 4)], &[3, 7, 2, 5, 1]).unwrap();
        let g = good_encode(&t).unwrap();
        assert_eq!(weights(&g), vec![1, 2279, 2390012242, 1, 1, 1, 1, 1, 1, 1, 1]);
        assert!(is_isomorphic(&good_decode(&g).unwrap(), &t));
    }

    #[test]
    fn domain_and_malformed_inputs() {
        let big = WeightedTree::from_u64(3, vec![(0, 1), (1, 2)], &[1, 9, 1]).unwrap();
        assert!(matches!(good_encode(&big), Err(Error::Domain(_))));
        let edge = WeightedTree::from_u64(3, vec![(0, 1), (1, 2)], &[8, 1, 1]).unwrap();
        assert!(matches!(good_encode(&edge), Err(Error::Domain(_))));
        assert!(good_encode(&WeightedTree::unit_path(2)).is_err());

        let mut g = good_encode(&WeightedTree::unit_path(3)).unwrap();
        let mut ws = g.t_prime.weights().to_vec();
        ws[3] = ws[1].clone();
        g.t_prime = WeightedTree::new(7, g.t_prime.edges().to_vec(), ws).unwrap();
        assert!(matches!(good_decode(&g), Err(Error::MalformedEmbedding(_))));
    }

    #[test]
    fn trace_properties() {
        let t = WeightedTree::from_u64(7, vec![(0, 1), (1, 2), (2, 3), (1, 4), (4, 5), (4, 6)], &[2, 3, 1, 5, 4, 1, 6])
            .unwrap();
        let (_, trace) = good_encode_traced(&t).unwrap();
        for s in &trace.steps {
            for &u in t.neighbours(s.vertex) {
                if let (Some(su), Some(cu)) = (trace.step_of(u), trace.code_of(u)) {
                    if su < s.step {
                        assert!(s.code > *cu);
                    }
                }
            }
            assert_eq!(pending_shapes(&t, &trace, s.vertex), 1);
        }
    }

    #[test]
    fn good_axioms() {
        let bad_leaf = WeightedTree::path(&[2, 1, 1]).unwrap();
        assert_eq!(check_good(&[bad_leaf]).trees[0].leaf_weight_witness, Some(0));
        // centre 0 with a leaf child and two legs of length 2
        let spider = WeightedTree::with_unit_weights(6, vec![(0, 1), (0, 2), (2, 3), (0, 4), (4, 5)]).unwrap();
        let report = check_good(&[spider]);
        assert_eq!(report.trees[0].structure_witness, Some(0));
        assert!(!report.is_good());
        let encoded: Vec<WeightedTree> = [WeightedTree::unit_path(4), WeightedTree::unit_star(5)]
            .iter()
            .map(|t| good_encode(t).unwrap().t_prime)
            .collect();
        assert!(check_good(&encoded).is_good());
    }
}
