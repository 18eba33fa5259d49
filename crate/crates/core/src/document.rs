//! JSON tree documents: `{"n": 3, "edges": [[0,1],[1,2]], "weights": ["1","3","1"], "root": 1}`.
//!
//! Weights are written as decimal strings so that arbitrarily large weights
//! survive a round trip; plain JSON numbers are accepted on input.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{RootedWeightedTree, Weight, WeightedTree};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightValue {
    Text(String),
    Number(u64),
}

impl WeightValue {
    fn to_weight(&self) -> Result<Weight> {
        match self {
            WeightValue::Text(s) => s.trim().parse().map_err(|_| Error::Parse(format!("weight {s:?} is not a decimal integer"))),
            WeightValue::Number(v) => Ok(Weight::from(*v)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeDocument {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    pub weights: Vec<WeightValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<usize>,
}

impl TreeDocument {
    pub fn from_tree(t: &WeightedTree) -> Self {
        TreeDocument {
            n: t.n(),
            edges: t.edges().iter().map(|&(a, b)| [a, b]).collect(),
            weights: t.weights().iter().map(|w| WeightValue::Text(w.to_string())).collect(),
            root: None,
        }
    }

    pub fn from_rooted(t: &RootedWeightedTree) -> Self {
        TreeDocument { root: Some(t.root()), ..Self::from_tree(t.tree()) }
    }

    pub fn to_tree(&self) -> Result<WeightedTree> {
        let weights = self.weights.iter().map(WeightValue::to_weight).collect::<Result<Vec<_>>>()?;
        WeightedTree::new(self.n, self.edges.iter().map(|e| (e[0], e[1])).collect(), weights)
    }

    /// The tree rooted at `root`, which must be present.
    pub fn to_rooted(&self) -> Result<RootedWeightedTree> {
        let root = self.root.ok_or_else(|| Error::Parse("document has no root".into()))?;
        RootedWeightedTree::new(self.to_tree()?, root)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("documents always serialize")
    }
}

/// One document, or a whitespace/newline separated stream of them.
pub fn parse_documents(text: &str) -> Result<Vec<TreeDocument>> {
    let docs = serde_json::Deserializer::from_str(text)
        .into_iter::<TreeDocument>()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Parse(e.to_string()))?;
    if docs.is_empty() {
        return Err(Error::Parse("no tree document found".into()));
    }
    Ok(docs)
}
