//! Exact U-polynomials of vertex-weighted trees, plus the machinery for
//! recovering a tree's shapes from its polynomial: good-class embeddings,
//! situation occurrence counting and marked-partition counting.
//!
//! All arithmetic is exact (`BigUint`/`BigInt`); nothing here uses floats.

pub mod canon;
pub mod census;
pub mod document;
pub mod error;
pub mod expression;
pub mod forest;
pub mod generate;
pub mod goodclass;
pub mod hanging;
pub mod partitions;
pub mod potts;
pub mod procedure1;
pub mod situations;
pub mod tree;

pub use canon::{canonicalize_free, canonicalize_rooted, is_isomorphic, CanonicalCode};
pub use census::{run_census, CensusMode, CensusParams, CensusReport};
pub use document::{parse_documents, TreeDocument};
pub use error::{Error, Result};
pub use expression::Expression;
pub use goodclass::{check_good, good_decode, good_encode, GoodEmbedding};
pub use partitions::{u_polynomial, ExpressionCounts, UMode};
pub use potts::{EvalMode, PottsParams};
pub use procedure1::{reconstruct_from_census, shape_census, Procedure1};
pub use situations::{m_count, ContainmentTable, Situation};
pub use tree::{RootedWeightedTree, Weight, WeightedTree};
