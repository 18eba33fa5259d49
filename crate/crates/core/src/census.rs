//! Fingerprint censuses: does the U-polynomial tell apart every pair of
//! non-isomorphic trees in a family?
//!
//! `Stanley` runs over every free tree with up to `max_n` vertices (unit
//! weights). `GoodSet` draws seeded random trees, embeds each into the good
//! class and runs over the embeddings, also checking the good-set axioms.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::canon::canonicalize_free;
use crate::document::TreeDocument;
use crate::error::{Error, Result};
use crate::generate::{enumerate_trees, random_encodable_tree};
use crate::goodclass::{check_good, good_encode};
use crate::partitions::{u_polynomial, UMode};
use crate::tree::WeightedTree;

pub const MAX_STANLEY_N: usize = 10;
pub const MAX_GOODSET_SOURCE_N: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CensusMode {
    Stanley,
    GoodSet,
}

impl fmt::Display for CensusMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CensusMode::Stanley => "stanley",
            CensusMode::GoodSet => "goodset",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusParams {
    pub max_n: usize,
    pub mode: CensusMode,
    /// Largest random weight (good-set mode).
    pub weight_bound: u64,
    pub seed: u64,
    /// Number of random source trees (good-set mode).
    pub samples: usize,
}

impl Default for CensusParams {
    fn default() -> Self {
        CensusParams { max_n: 8, mode: CensusMode::Stanley, weight_bound: 8, seed: 0, samples: 30 }
    }
}

#[derive(Clone, Debug)]
pub struct CensusReport {
    pub params: CensusParams,
    pub trees: usize,
    pub distinct_fingerprints: usize,
    /// Non-isomorphic pairs sharing a fingerprint.
    pub collisions: Vec<(TreeDocument, TreeDocument)>,
    /// Good-set mode: whether the embeddings passed the good-set axioms.
    pub good: Option<bool>,
    /// Not part of [`CensusReport::render`], which stays byte-stable.
    pub elapsed: Duration,
}

impl CensusReport {
    pub fn holds(&self) -> bool {
        self.collisions.is_empty() && self.good != Some(false)
    }

    /// Deterministic text form of everything but the timing.
    pub fn render(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        writeln!(s, "mode: {}", p.mode).unwrap();
        writeln!(s, "max_n: {}", p.max_n).unwrap();
        if p.mode == CensusMode::GoodSet {
            writeln!(s, "weight_bound: {}", p.weight_bound).unwrap();
            writeln!(s, "seed: {}", p.seed).unwrap();
            writeln!(s, "samples: {}", p.samples).unwrap();
        }
        writeln!(s, "trees: {}", self.trees).unwrap();
        writeln!(s, "fingerprints: {}", self.distinct_fingerprints).unwrap();
        if let Some(good) = self.good {
            writeln!(s, "good: {}", if good { "pass" } else { "FAIL" }).unwrap();
        }
        writeln!(s, "collisions: {}", self.collisions.len()).unwrap();
        for (a, b) in &self.collisions {
            writeln!(s, "  {}\n  {}", a.to_json(), b.to_json()).unwrap();
        }
        s
    }
}

/// Seeded random trees of the encodable class, source sizes `3..=max_n`.
pub fn goodset_sources(max_n: usize, weight_bound: u64, seed: u64, samples: usize) -> Vec<WeightedTree> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let n = rng.gen_range(3..=max_n);
            random_encodable_tree(&mut rng, n, weight_bound)
        })
        .collect()
}

pub fn run_census(params: &CensusParams) -> Result<CensusReport> {
    let start = Instant::now();
    let (trees, good) = match params.mode {
        CensusMode::Stanley => {
            if params.max_n > MAX_STANLEY_N {
                return Err(Error::Resource(format!("stanley census is limited to n <= {MAX_STANLEY_N}")));
            }
            let mut all = Vec::new();
            for n in 1..=params.max_n {
                all.extend(enumerate_trees(n)?);
            }
            (all, None)
        }
        CensusMode::GoodSet => {
            if params.max_n > MAX_GOODSET_SOURCE_N {
                return Err(Error::Resource(format!(
                    "good-set census is limited to source n <= {MAX_GOODSET_SOURCE_N}"
                )));
            }
            if params.max_n < 3 || params.weight_bound == 0 {
                return Err(Error::Domain("good-set census needs max_n >= 3 and a positive weight bound".into()));
            }
            let embedded = goodset_sources(params.max_n, params.weight_bound, params.seed, params.samples)
                .iter()
                .map(|t| good_encode(t).map(|g| g.t_prime))
                .collect::<Result<Vec<_>>>()?;
            let good = check_good(&embedded).is_good();
            (embedded, Some(good))
        }
    };

    let keyed: Vec<(String, crate::canon::CanonicalCode)> = trees
        .par_iter()
        .map(|t| Ok((u_polynomial(t, UMode::Dp)?.fingerprint(), canonicalize_free(t))))
        .collect::<Result<_>>()?;
    // fingerprint -> first tree index per isomorphism class
    let mut groups: BTreeMap<&str, BTreeMap<&crate::canon::CanonicalCode, usize>> = BTreeMap::new();
    for (i, (fp, code)) in keyed.iter().enumerate() {
        groups.entry(fp.as_str()).or_default().entry(code).or_insert(i);
    }
    let mut collisions = Vec::new();
    for classes in groups.values() {
        let reps: Vec<usize> = classes.values().copied().collect();
        for a in 0..reps.len() {
            for b in a + 1..reps.len() {
                collisions.push((TreeDocument::from_tree(&trees[reps[a]]), TreeDocument::from_tree(&trees[reps[b]])));
            }
        }
    }
    Ok(CensusReport {
        params: params.clone(),
        trees: trees.len(),
        distinct_fingerprints: groups.len(),
        collisions,
        good,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_and_small_censuses() {
        let one = run_census(&CensusParams { max_n: 1, ..Default::default() }).unwrap();
        assert_eq!((one.trees, one.collisions.len()), (1, 0));
        let six = run_census(&CensusParams { max_n: 6, ..Default::default() }).unwrap();
        assert_eq!(six.trees, 1 + 1 + 1 + 2 + 3 + 6);
        assert_eq!(six.distinct_fingerprints, six.trees);
        assert!(six.holds());
        assert!(run_census(&CensusParams { max_n: 11, ..Default::default() }).is_err());
    }

    #[test]
    fn goodset_is_reproducible() {
        let p = CensusParams { max_n: 5, mode: CensusMode::GoodSet, weight_bound: 6, seed: 9, samples: 8 };
        let a = run_census(&p).unwrap();
        let b = run_census(&p).unwrap();
        assert_eq!(a.render(), b.render());
        assert!(a.holds());
        assert_eq!(a.good, Some(true));
    }
}
