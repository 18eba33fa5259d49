//! Expressions: integer partitions of a weight, parts kept in descending order.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::tree::Weight;

/// A multiset of positive parts, stored sorted descending.
///
/// The derived order is lexicographic on the descending part list, so the
/// largest expression of `W` is `(W)` and the smallest is `(1, 1, .., 1)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expression(Vec<Weight>);

impl Expression {
    pub fn new(mut parts: Vec<Weight>) -> Result<Self> {
        if parts.iter().any(Zero::is_zero) {
            return Err(Error::Precondition("expression parts must be positive".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Expression(parts))
    }

    pub fn from_u64(parts: &[u64]) -> Result<Self> {
        Self::new(parts.iter().map(|&p| Weight::from(p)).collect())
    }

    /// Builds from parts that are already known to be positive.
    pub(crate) fn from_parts_unchecked(mut parts: Vec<Weight>) -> Self {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Expression(parts)
    }

    pub fn empty() -> Self {
        Expression(Vec::new())
    }

    pub fn parts(&self) -> &[Weight] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> Weight {
        self.0.iter().sum()
    }

    pub fn multiplicity(&self, part: &Weight) -> usize {
        self.0.iter().filter(|p| *p == part).count()
    }

    /// A copy with one occurrence of `part` removed.
    pub fn without_one(&self, part: &Weight) -> Option<Expression> {
        let i = self.0.iter().position(|p| p == part)?;
        let mut parts = self.0.clone();
        parts.remove(i);
        Some(Expression(parts))
    }

    pub fn with_part(&self, part: Weight) -> Expression {
        let mut parts = self.0.clone();
        let at = parts.partition_point(|p| *p >= part);
        parts.insert(at, part);
        Expression(parts)
    }

    /// Multiset union.
    pub fn merge(&self, other: &Expression) -> Expression {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            if a[i] >= b[j] {
                out.push(a[i].clone());
                i += 1;
            } else {
                out.push(b[j].clone());
                j += 1;
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Expression(out)
    }

    /// True when this is an expression of `w_total` with a part of size `w_total - j`.
    pub fn is_j_expression(&self, j: &Weight, w_total: &Weight) -> bool {
        if j.is_zero() || j >= w_total || self.total() != *w_total {
            return false;
        }
        self.multiplicity(&(w_total - j)) > 0
    }

    /// The parts other than one copy of the `w_total - j` part.
    pub fn j_side(&self, j: &Weight, w_total: &Weight) -> Result<Expression> {
        if !self.is_j_expression(j, w_total) {
            return Err(Error::Precondition(format!(
                "({self}) is not a {j}-expression of {w_total}"
            )));
        }
        Ok(self.without_one(&(w_total - j)).expect("checked above"))
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for Expression {
    type Err = Error;

    /// Accepts comma- or space-separated parts, optionally in parentheses.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts = inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|p| !p.is_empty())
            .map(|p| p.parse::<Weight>().map_err(|_| Error::Parse(format!("bad part {p:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if parts.is_empty() {
            return Err(Error::Parse("empty expression".into()));
        }
        Expression::new(parts)
    }
}
