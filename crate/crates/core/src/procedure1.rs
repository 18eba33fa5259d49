//! Shaped and non-shaped j-partition counts assembled from occurrence counts,
//! expression analysis, and reconstruction of a tree from its light shapes.
//!
//! Partitions are counted with a designated part: a connected partition with
//! characteristic `E` is counted once for each of its parts of weight
//! `w(T) - j`, and it is shaped for that designation when the part is a
//! component of `T - e` for some edge `e`. The designated total is therefore
//! `mult(w(T) - j in E) * count_partitions(T, E)`.
//!
//! A non-shaped designation leaves at least two components outside the
//! designated part, hanging from it by distinct edges: an occurrence of a
//! situation of weight `j`. Summing over situations `σ`,
//!
//! `X = Σ_σ m_T(σ) · D(σ, E) / Π_c mult_c!`
//!
//! where `D` counts the ways to spread the remaining parts of `E` over the
//! components of `σ` (an ordered decomposition, one sub-multiset per
//! component, times the partition count of each component with its share), and
//! the factorials undo the ordering of `m_T`'s tuples within each class.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::canon::CanonicalCode;
use crate::error::{Error, Result};
use crate::expression::Expression;
use crate::hanging::{hanging_subtrees, shapes};
use crate::partitions::{u_polynomial, ExpressionCounts, UMode};
use crate::situations::{enumerate_situations, m_count, ContainmentTable, Host, Situation};
use crate::tree::{RootedWeightedTree, Weight, WeightedTree};

/// The counts behind one `(j, E)` query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Procedure1Counts {
    /// Connected partitions with characteristic `E`.
    pub partitions: BigUint,
    /// Partitions counted once per part of weight `w(T) - j`.
    pub designated: BigUint,
    pub nonshaped: BigUint,
    pub shaped: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpressionAnalysis {
    pub expression: Expression,
    pub j: Weight,
    pub valid: bool,
    pub minimal: bool,
    /// Class of a shape whose vertex weights are the parts of `E` other than
    /// the `w(T) - j` part.
    pub resolved_shape: Option<CanonicalCode>,
}

impl ContainmentTable {
    /// Entries for every hanging-subtree class of `t`.
    pub fn for_tree(t: &WeightedTree) -> Result<Self> {
        let classes: Vec<CanonicalCode> = hanging_subtrees(t).into_iter().map(|h| h.code).collect();
        ContainmentTable::for_classes(t, &classes)
    }
}

/// Caches shared by the queries on one tree.
pub struct Procedure1<'a> {
    t: &'a WeightedTree,
    table: ContainmentTable,
    u: ExpressionCounts,
    component_u: HashMap<CanonicalCode, ExpressionCounts>,
    occurrences: HashMap<Vec<CanonicalCode>, BigUint>,
    situations: HashMap<Weight, Vec<Situation>>,
}

impl<'a> Procedure1<'a> {
    pub fn new(t: &'a WeightedTree) -> Result<Self> {
        Self::with_table(t, ContainmentTable::for_tree(t)?)
    }

    pub fn with_table(t: &'a WeightedTree, table: ContainmentTable) -> Result<Self> {
        Ok(Procedure1 {
            t,
            table,
            u: u_polynomial(t, UMode::Dp)?,
            component_u: HashMap::new(),
            occurrences: HashMap::new(),
            situations: HashMap::new(),
        })
    }

    pub fn u_table(&self) -> &ExpressionCounts {
        &self.u
    }

    fn check(&self, j: &Weight, e: &Expression) -> Result<Expression> {
        let w = self.t.total_weight();
        if j.is_zero() || *j >= w {
            return Err(Error::Precondition(format!("j = {j} must lie in 1..{w}")));
        }
        e.j_side(j, &w)
    }

    pub fn nonshaped(&mut self, j: &Weight, e: &Expression) -> Result<BigUint> {
        let rest = self.check(j, e)?;
        let mut rest_counts: BTreeMap<Weight, usize> = BTreeMap::new();
        for p in rest.parts() {
            *rest_counts.entry(p.clone()).or_default() += 1;
        }
        if !self.situations.contains_key(j) {
            self.situations.insert(j.clone(), enumerate_situations(self.t, j)?);
        }
        let situations = self.situations[j].clone();
        let mut x = BigUint::zero();
        for s in &situations {
            let d = self.distributions(s, 0, &mut rest_counts.clone())?;
            if d.is_zero() || !self.may_occur(s)? {
                continue;
            }
            let m = self.occurrence(s)?;
            let symmetry: BigUint = s.class_multiplicities().into_iter().map(factorial).product();
            let ways = &m * &d;
            if !(&ways % &symmetry).is_zero() {
                return Err(Error::Internal(format!("{m} * {d} occurrences of {s} not divisible by {symmetry}")));
            }
            x += ways / symmetry;
        }
        Ok(x)
    }

    /// Cheap necessary condition: each class has at least as many hanging
    /// subtrees in `T` as it has copies in `s`.
    fn may_occur(&self, s: &Situation) -> Result<bool> {
        let mut needed: BTreeMap<&CanonicalCode, usize> = BTreeMap::new();
        for c in s.codes() {
            *needed.entry(c).or_default() += 1;
        }
        for (c, k) in needed {
            if *self.table.get(c, &Host::Tree)? < BigUint::from(k) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn occurrence(&mut self, s: &Situation) -> Result<BigUint> {
        if let Some(m) = self.occurrences.get(s.codes()) {
            return Ok(m.clone());
        }
        let m = m_count(self.t, s, &self.table)?;
        self.occurrences.insert(s.codes().to_vec(), m.clone());
        Ok(m)
    }

    fn component_partitions(&mut self, s: &Situation, i: usize, e: &Expression) -> Result<BigUint> {
        let code = s.code(i);
        if !self.component_u.contains_key(code) {
            self.component_u.insert(code.clone(), u_polynomial(s.component(i).tree(), UMode::Dp)?);
        }
        Ok(self.component_u[code].get(e))
    }

    /// `D(σ, E)` over the components from `slot` on, with `remaining` parts left.
    fn distributions(&mut self, s: &Situation, slot: usize, remaining: &mut BTreeMap<Weight, usize>) -> Result<BigUint> {
        if slot == s.len() {
            return Ok(if remaining.values().all(|&k| k == 0) { BigUint::one() } else { BigUint::zero() });
        }
        let values: Vec<Weight> = remaining.keys().cloned().collect();
        let mut picked = Vec::new();
        let mut total = BigUint::zero();
        self.sub_multisets(s, slot, &values, 0, s.weight(slot).clone(), remaining, &mut picked, &mut total)?;
        Ok(total)
    }

    #[allow(clippy::too_many_arguments)]
    fn sub_multisets(
        &mut self,
        s: &Situation,
        slot: usize,
        values: &[Weight],
        vi: usize,
        need: Weight,
        remaining: &mut BTreeMap<Weight, usize>,
        picked: &mut Vec<Weight>,
        total: &mut BigUint,
    ) -> Result<()> {
        if need.is_zero() {
            let share = Expression::from_parts_unchecked(picked.clone());
            let here = self.component_partitions(s, slot, &share)?;
            if !here.is_zero() {
                *total += here * self.distributions(s, slot + 1, remaining)?;
            }
            return Ok(());
        }
        if vi == values.len() {
            return Ok(());
        }
        let v = &values[vi];
        let avail = remaining[v];
        let mut take = 0usize;
        let mut need_left = need.clone();
        loop {
            self.sub_multisets(s, slot, values, vi + 1, need_left.clone(), remaining, picked, total)?;
            if take == avail || need_left < *v {
                break;
            }
            take += 1;
            need_left -= v;
            picked.push(v.clone());
            *remaining.get_mut(v).expect("key present") -= 1;
        }
        for _ in 0..take {
            picked.pop();
        }
        *remaining.get_mut(v).expect("key present") += take;
        Ok(())
    }

    pub fn counts(&mut self, j: &Weight, e: &Expression) -> Result<Procedure1Counts> {
        self.check(j, e)?;
        let w = self.t.total_weight();
        let partitions = self.u.get(e);
        let designated = &partitions * BigUint::from(e.multiplicity(&(&w - j)));
        let nonshaped = self.nonshaped(j, e)?;
        if nonshaped > designated {
            return Err(Error::Internal(format!(
                "non-shaped count {nonshaped} exceeds the {designated} designated partitions of ({e})"
            )));
        }
        let shaped = &designated - &nonshaped;
        Ok(Procedure1Counts { partitions, designated, nonshaped, shaped })
    }

    pub fn shaped(&mut self, j: &Weight, e: &Expression) -> Result<BigUint> {
        self.counts(j, e).map(|c| c.shaped)
    }

    pub fn analyze(&mut self, j: &Weight, e: &Expression) -> Result<ExpressionAnalysis> {
        self.check(j, e)?;
        let w = self.t.total_weight();
        let valid = !self.shaped(j, e)?.is_zero();
        let mut minimal = valid;
        if valid {
            let finer: Vec<Expression> = self
                .u
                .counts
                .iter()
                .filter(|(k, c)| !c.is_zero() && *k != e && k.is_j_expression(j, &w))
                .map(|(k, _)| k.clone())
                .collect();
            for f in finer {
                if crate::partitions::is_refinement(&f, e, j, &w)? && !self.shaped(j, &f)?.is_zero() {
                    minimal = false;
                    break;
                }
            }
        }
        let resolved_shape = if valid {
            let mut want: Vec<Weight> = e.j_side(j, &w)?.parts().to_vec();
            want.sort();
            shapes(self.t).into_iter().filter(|s| s.component.weight_multiset() == want).map(|s| s.code).min()
        } else {
            None
        };
        Ok(ExpressionAnalysis { expression: e.clone(), j: j.clone(), valid, minimal, resolved_shape })
    }
}

fn factorial(k: usize) -> BigUint {
    (1..=k).map(BigUint::from).product()
}

pub fn nonshaped_count(t: &WeightedTree, j: &Weight, e: &Expression, tbl: &ContainmentTable) -> Result<BigUint> {
    Procedure1::with_table(t, tbl.clone())?.nonshaped(j, e)
}

pub fn shaped_count(t: &WeightedTree, j: &Weight, e: &Expression, tbl: &ContainmentTable) -> Result<BigUint> {
    Procedure1::with_table(t, tbl.clone())?.shaped(j, e)
}

pub fn analyze_expression(
    t: &WeightedTree,
    j: &Weight,
    e: &Expression,
    tbl: &ContainmentTable,
) -> Result<ExpressionAnalysis> {
    Procedure1::with_table(t, tbl.clone())?.analyze(j, e)
}

/// Counts of the shape classes of weight at most `w(T) / 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeCensus {
    pub total_weight: Weight,
    pub entries: BTreeMap<CanonicalCode, usize>,
}

impl ShapeCensus {
    pub fn get(&self, code: &CanonicalCode) -> usize {
        self.entries.get(code).copied().unwrap_or(0)
    }
}

pub fn shape_census(t: &WeightedTree) -> ShapeCensus {
    let total_weight = t.total_weight();
    let mut entries = BTreeMap::new();
    for s in shapes(t) {
        if &s.weight * 2u32 <= total_weight {
            *entries.entry(s.code).or_insert(0) += 1;
        }
    }
    ShapeCensus { total_weight, entries }
}

struct Builder {
    weights: Vec<Weight>,
    edges: Vec<(usize, usize)>,
}

impl Builder {
    /// Copies `sub` in and returns the id of its root.
    fn graft(&mut self, sub: &RootedWeightedTree) -> usize {
        let base = self.weights.len();
        self.weights.extend_from_slice(sub.tree().weights());
        self.edges.extend(sub.tree().edges().iter().map(|&(a, b)| (a + base, b + base)));
        base + sub.root()
    }
}

/// Subtree classes below every non-root vertex of `sub` with at least two vertices.
fn inner_shapes(sub: &RootedWeightedTree) -> Vec<CanonicalCode> {
    let t = sub.tree();
    let (_, parent) = t.bfs_from(sub.root());
    (0..t.n())
        .filter(|&v| v != sub.root())
        .filter(|&v| t.neighbours(v).iter().any(|&c| Some(c) != parent[v]))
        .map(|v| crate::canon::subtree_code(t, v, parent[v]))
        .collect()
}

fn fail(msg: impl Into<String>) -> Error {
    Error::Reconstruction(msg.into())
}

/// Rebuilds a tree with `hint_n` vertices from its light-shape census by
/// descending through the shape weights.
pub fn reconstruct_from_census(c: &ShapeCensus, hint_n: usize) -> Result<WeightedTree> {
    let w = &c.total_weight;
    if hint_n == 0 || w.is_zero() {
        return Err(fail("empty tree"));
    }
    let classes: Vec<(Weight, CanonicalCode, RootedWeightedTree, usize)> = c
        .entries
        .iter()
        .map(|(code, &k)| {
            let r = code.to_rooted_tree()?;
            Ok((r.total_weight(), code.clone(), r, k))
        })
        .collect::<Result<_>>()?;
    if classes.iter().any(|(cw, _, r, k)| *k == 0 || cw * 2u32 > *w || r.n() < 2) {
        return Err(fail("census entries must be positive counts of light shapes"));
    }

    let mut b = Builder { weights: Vec::new(), edges: Vec::new() };
    let top = classes.iter().map(|x| &x.0).max().cloned();
    let at_top: usize = classes.iter().filter(|x| Some(&x.0) == top.as_ref()).map(|x| x.3).sum();
    if let Some(m) = top.as_ref().filter(|m| *m * 2u32 == *w && at_top == 2) {
        // The two heaviest shapes are the two sides of one edge.
        let sides: Vec<&RootedWeightedTree> = classes
            .iter()
            .filter(|x| x.0 == *m)
            .flat_map(|x| std::iter::repeat_n(&x.2, x.3))
            .collect();
        let a = b.graft(sides[0]);
        let z = b.graft(sides[1]);
        b.edges.push((a, z));
    } else {
        b.weights.push(Weight::zero());
        let r = 0;
        let mut explained: HashMap<CanonicalCode, usize> = HashMap::new();
        let mut order: Vec<&(Weight, CanonicalCode, RootedWeightedTree, usize)> = classes.iter().collect();
        order.sort_by(|x, y| y.0.cmp(&x.0).then_with(|| x.1.cmp(&y.1)));
        for (_, code, sub, k) in order {
            let seen = explained.get(code).copied().unwrap_or(0);
            if seen > *k {
                return Err(fail(format!("more copies of {sub} inside placed shapes than the census allows")));
            }
            for _ in seen..*k {
                let root = b.graft(sub);
                b.edges.push((r, root));
                for inner in inner_shapes(sub) {
                    *explained.entry(inner).or_insert(0) += 1;
                }
            }
        }
        let placed: Weight = b.weights.iter().sum();
        if placed >= *w || b.weights.len() > hint_n {
            return Err(fail("placed shapes already exhaust the tree"));
        }
        let leaves = hint_n - b.weights.len();
        let rest = w - &placed;
        if rest <= Weight::from(leaves) {
            return Err(fail("no weight left for the centre vertex"));
        }
        b.weights[r] = &rest - Weight::from(leaves);
        for _ in 0..leaves {
            b.weights.push(Weight::one());
            let leaf = b.weights.len() - 1;
            b.edges.push((r, leaf));
        }
    }
    if b.weights.len() != hint_n {
        return Err(fail(format!("descent produced {} vertices, expected {hint_n}", b.weights.len())));
    }
    let t = WeightedTree::new(hint_n, b.edges, b.weights)?;
    if shape_census(&t) != *c {
        return Err(fail("the rebuilt tree has a different census"));
    }
    Ok(t)
}
