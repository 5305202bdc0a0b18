//! Join covers and packings under Hamming distance.
//!
//! A join cover for a query instance `Q` and radius parameter `delta` is a
//! subset of the join output within Hamming distance `delta - 1` of every
//! output tuple; a join packing is a subset with pairwise distance at least
//! `delta`. This crate computes covers and packings exactly at desk scale,
//! the LP upper bounds that control their worst-case sizes (fractional edge
//! cover, polymatroid degree bounds, and the covering/packing LP pair), the
//! arity-two case analysis with its subset-picking procedures, code-based
//! worst-case instance generators, and dependent randomized rounding for the
//! general-arity gap analysis.
//!
//! All bound computations use arbitrary-precision rational arithmetic; every
//! randomized routine takes an explicit seed.

pub mod codes;
pub mod cover;
pub mod error;
pub mod graphs;
pub mod lpbounds;
pub mod pick;
pub mod rational;
pub mod relation;
pub mod rounding;

pub use error::{Error, Result};
pub use rational::Rat;
pub use relation::{
    attr_set, generic_join, hamming_dist, join_is_nonempty, naive_join, projected_query, AttrSet,
    Domain, QueryInstance, Relation, Tuple,
};
