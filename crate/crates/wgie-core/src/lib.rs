//! Weighted generalized interval entropy of doubly truncated lifetime
//! distributions: closed forms and quadrature, theorem-backed bounds and
//! uniqueness diagnostics, maximum-likelihood estimation, Monte-Carlo
//! reproduction, and entropy-based model comparison.

pub mod bounds;
pub mod data;
pub mod dist;
pub mod estimate;
pub mod entropy;
pub mod numerics;
