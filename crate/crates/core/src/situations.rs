//! Situations and their occurrence counts.
//!
//! A situation is a weight-sorted tuple of at least two rooted weighted trees.
//! It occurs in `T` once for every ordered tuple of distinct hanging subtrees
//! `(T_1, .., T_t)`, `T_i` isomorphic to the i-th component, that are pairwise
//! disjoint and leave a connected, non-empty remainder.
//!
//! [`occurrence_count_oracle`] counts those tuples directly. [`m_count`]
//! counts them the indirect way: start from all tuples of matching hanging
//! subtrees, and remove those in which one entry lies inside another by
//! inclusion–exclusion over the sets `F` of ordered index pairs, each
//! intersection being counted on a containment forest.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::canon::CanonicalCode;
use crate::error::{Error, Result};
use crate::forest::{build_containment_forest, ForestOutcome, Procedure3Memo};
use crate::hanging::{count_hang_by_code, count_hanging_by_code, hanging_subtrees, HangingSubtree};
use crate::tree::{RootedWeightedTree, Weight, WeightedTree};

/// Largest number of components [`m_count`] accepts; it visits `2^(t(t-1))` pair sets.
pub const MAX_COMPONENTS: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Situation {
    components: Vec<RootedWeightedTree>,
    codes: Vec<CanonicalCode>,
    weights: Vec<Weight>,
    total_weight: Weight,
}

impl Situation {
    /// Sorts the components by weight, then by canonical code.
    pub fn new(components: Vec<RootedWeightedTree>) -> Result<Self> {
        if components.len() < 2 {
            return Err(Error::Precondition("a situation needs at least two components".into()));
        }
        let mut keyed: Vec<(Weight, CanonicalCode, RootedWeightedTree)> =
            components.into_iter().map(|c| (c.total_weight(), c.code(), c)).collect();
        keyed.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
        let total_weight = keyed.iter().map(|k| &k.0).sum();
        let mut weights = Vec::with_capacity(keyed.len());
        let mut codes = Vec::with_capacity(keyed.len());
        let mut components = Vec::with_capacity(keyed.len());
        for (w, c, r) in keyed {
            weights.push(w);
            codes.push(c);
            components.push(r);
        }
        Ok(Situation { components, codes, weights, total_weight })
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[RootedWeightedTree] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &RootedWeightedTree {
        &self.components[i]
    }

    pub fn code(&self, i: usize) -> &CanonicalCode {
        &self.codes[i]
    }

    pub fn codes(&self) -> &[CanonicalCode] {
        &self.codes
    }

    pub fn weight(&self, i: usize) -> &Weight {
        &self.weights[i]
    }

    pub fn total_weight(&self) -> &Weight {
        &self.total_weight
    }

    /// Sizes of the runs of isomorphic components.
    pub fn class_multiplicities(&self) -> Vec<usize> {
        let mut m: BTreeMap<&CanonicalCode, usize> = BTreeMap::new();
        for c in &self.codes {
            *m.entry(c).or_default() += 1;
        }
        m.into_values().collect()
    }
}

impl fmt::Display for Situation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Components in bracket notation separated by `;`, e.g. `1;1(1)`.
impl FromStr for Situation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let components = s
            .split(';')
            .map(str::trim)
            .filter(|c| !c.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<RootedWeightedTree>>>()?;
        Situation::new(components)
    }
}

fn check_weight(t: &WeightedTree, weight: &Weight) -> Result<()> {
    if *weight >= t.total_weight() {
        return Err(Error::Precondition(format!(
            "situation weight {weight} must be below the tree weight {}",
            t.total_weight()
        )));
    }
    Ok(())
}

/// Where a containment count is taken: the unrooted input tree, or a rooted
/// component class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Host {
    Tree,
    Class(CanonicalCode),
}

/// Containment counts `s(class, host)`: for the tree, the number of hanging
/// subtrees isomorphic to the class; for a class host, the number of vertices
/// whose subtree is isomorphic to it (the host itself included).
#[derive(Clone, Debug, Default)]
pub struct ContainmentTable {
    entries: HashMap<(CanonicalCode, Host), BigUint>,
}

impl ContainmentTable {
    /// Entries for every pair of the given classes, and each class in `t`.
    pub fn for_classes(t: &WeightedTree, classes: &[CanonicalCode]) -> Result<Self> {
        let distinct: BTreeSet<&CanonicalCode> = classes.iter().collect();
        let hosts: Vec<(CanonicalCode, RootedWeightedTree)> =
            distinct.iter().map(|c| Ok(((*c).clone(), c.to_rooted_tree()?))).collect::<Result<_>>()?;
        let mut entries = HashMap::new();
        for &c in &distinct {
            entries.insert((c.clone(), Host::Tree), BigUint::from(count_hanging_by_code(c, t)));
            for (hc, h) in &hosts {
                entries.insert((c.clone(), Host::Class(hc.clone())), BigUint::from(count_hang_by_code(c, h)));
            }
        }
        Ok(ContainmentTable { entries })
    }

    pub fn for_situation(t: &WeightedTree, s: &Situation) -> Result<Self> {
        Self::for_classes(t, s.codes())
    }

    pub fn insert(&mut self, class: CanonicalCode, host: Host, count: BigUint) {
        self.entries.insert((class, host), count);
    }

    pub fn get(&self, class: &CanonicalCode, host: &Host) -> Result<&BigUint> {
        self.entries
            .get(&(class.clone(), host.clone()))
            .ok_or_else(|| Error::MissingTableEntry(format!("class {class} in host {host:?}")))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// All situations of weight `target` built from hanging-subtree classes of `t`,
/// ordered by their component codes.
pub fn enumerate_situations(t: &WeightedTree, target: &Weight) -> Result<Vec<Situation>> {
    check_weight(t, target)?;
    let mut classes: BTreeMap<CanonicalCode, RootedWeightedTree> = BTreeMap::new();
    for h in hanging_subtrees(t) {
        if h.weight <= *target {
            classes.entry(h.code).or_insert(h.component);
        }
    }
    let classes: Vec<(Weight, RootedWeightedTree)> =
        classes.into_values().map(|c| (c.total_weight(), c)).collect();
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    multisets(&classes, 0, target.clone(), &mut chosen, &mut out)?;
    out.sort_by(|a: &Situation, b| a.codes().cmp(b.codes()));
    Ok(out)
}

fn multisets(
    classes: &[(Weight, RootedWeightedTree)],
    from: usize,
    remaining: Weight,
    chosen: &mut Vec<usize>,
    out: &mut Vec<Situation>,
) -> Result<()> {
    if remaining.is_zero() {
        if chosen.len() >= 2 {
            out.push(Situation::new(chosen.iter().map(|&i| classes[i].1.clone()).collect())?);
        }
        return Ok(());
    }
    for i in from..classes.len() {
        if classes[i].0 <= remaining {
            chosen.push(i);
            multisets(classes, i, &remaining - &classes[i].0, chosen, out)?;
            chosen.pop();
        }
    }
    Ok(())
}

/// Checks of the disjoint-or-nested property made while enumerating.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OracleStats {
    pub pairs_checked: usize,
    /// Pairs of candidate subtrees that overlap without nesting.
    pub nesting_violations: usize,
}

pub fn occurrence_count_oracle(t: &WeightedTree, s: &Situation) -> Result<BigUint> {
    occurrence_count_oracle_with_stats(t, s).map(|(c, _)| c)
}

pub fn occurrence_count_oracle_with_stats(t: &WeightedTree, s: &Situation) -> Result<(BigUint, OracleStats)> {
    check_weight(t, s.total_weight())?;
    let all = hanging_subtrees(t);
    let candidates: Vec<Vec<&HangingSubtree>> =
        s.codes().iter().map(|c| all.iter().filter(|h| h.code == *c).collect()).collect();

    let mut stats = OracleStats::default();
    for i in 0..candidates.len() {
        for j in i + 1..candidates.len() {
            for a in &candidates[i] {
                for b in &candidates[j] {
                    stats.pairs_checked += 1;
                    if !(a.contains(b) || b.contains(a) || a.is_disjoint(b)) {
                        stats.nesting_violations += 1;
                    }
                }
            }
        }
    }

    let mut used = vec![false; t.n()];
    let mut count = BigUint::zero();
    place(t, &candidates, 0, &mut used, &mut count);
    Ok((count, stats))
}

fn place(t: &WeightedTree, candidates: &[Vec<&HangingSubtree>], i: usize, used: &mut [bool], count: &mut BigUint) {
    if i == candidates.len() {
        if remainder_connected(t, used) {
            *count += 1u32;
        }
        return;
    }
    for h in &candidates[i] {
        if h.vertices.iter().any(|&v| used[v]) {
            continue;
        }
        for &v in &h.vertices {
            used[v] = true;
        }
        place(t, candidates, i + 1, used, count);
        for &v in &h.vertices {
            used[v] = false;
        }
    }
}

fn remainder_connected(t: &WeightedTree, used: &[bool]) -> bool {
    let Some(start) = (0..t.n()).find(|&v| !used[v]) else { return false };
    let mut seen = used.to_vec();
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &u in t.neighbours(v) {
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    seen.iter().all(|&b| b)
}

/// What the inclusion–exclusion visited.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MCountStats {
    pub lambda0: BigUint,
    /// Non-empty pair sets made only of contributing pairs.
    pub contributing_sets: usize,
    /// Of those, how many collapsed to an empty intersection while building the forest.
    pub empty_intersections: usize,
    /// Forests built (each checked against the forest invariants).
    pub forests: usize,
    pub memo_hits: usize,
}

pub fn m_count(t: &WeightedTree, s: &Situation, tbl: &ContainmentTable) -> Result<BigUint> {
    m_count_with_stats(t, s, tbl).map(|(c, _)| c)
}

pub fn m_count_with_stats(t: &WeightedTree, s: &Situation, tbl: &ContainmentTable) -> Result<(BigUint, MCountStats)> {
    check_weight(t, s.total_weight())?;
    let k = s.len();
    if k > MAX_COMPONENTS {
        return Err(Error::Resource(format!(
            "{k} components exceed the inclusion–exclusion limit of {MAX_COMPONENTS}"
        )));
    }
    let mut stats = MCountStats::default();
    let mut lambda0 = BigUint::one();
    for c in s.codes() {
        lambda0 *= tbl.get(c, &Host::Tree)?;
    }
    stats.lambda0 = lambda0.clone();
    if lambda0.is_zero() {
        return Ok((lambda0, stats));
    }

    // Pairs (i, j) whose intersection can be non-empty: σ_i fits inside σ_j.
    let mut pairs = Vec::new();
    for i in 0..k {
        for j in 0..k {
            if i != j && !tbl.get(s.code(i), &Host::Class(s.code(j).clone()))?.is_zero() {
                pairs.push((i, j));
            }
        }
    }

    let mut memo = Procedure3Memo::default();
    let mut total = BigInt::from(lambda0.clone());
    for mask in 1u32..1 << pairs.len() {
        stats.contributing_sets += 1;
        let f: Vec<(usize, usize)> =
            pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &p)| p).collect();
        let forest = match build_containment_forest(&f, s)? {
            ForestOutcome::Forest(w) => w,
            ForestOutcome::Empty(_) => {
                stats.empty_intersections += 1;
                continue;
            }
        };
        stats.forests += 1;
        let (size, hit) = memo.count(&Host::Tree, &forest, tbl)?;
        if hit {
            stats.memo_hits += 1;
        }
        if f.len() % 2 == 1 {
            total -= BigInt::from(size);
        } else {
            total += BigInt::from(size);
        }
    }
    if total.is_negative() || total > BigInt::from(lambda0.clone()) {
        return Err(Error::Internal(format!("inclusion–exclusion gave {total} outside 0..={lambda0}")));
    }
    Ok((total.to_biguint().expect("checked non-negative"), stats))
}
