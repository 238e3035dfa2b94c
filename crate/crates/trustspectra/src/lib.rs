//! Mining qualitative trust concepts from quantitative trust-score matrices.
//!
//! A trust network of trustors rating trustees is treated as a dense matrix
//! over a complete block of scores. Its singular value decomposition yields
//! the concept spectrum: pairs of correlated trustor/trustee communities,
//! each weighted by a singular value. From there the crate derives rank-1
//! qualified trust matrices, per-edge decompositions of individual ratings,
//! and per-concept recommendations, together with the similarity-network
//! view that justifies the construction.
//!
//! The SVD is implemented in-crate: Householder bidiagonalization followed
//! by implicit-shift QR sweeps, with a one-sided Jacobi variant as an
//! independent cross-check and a power iteration for the top singular pair.

pub mod concepts;
pub mod error;
pub mod fixture;
pub mod mat;
pub mod model;
pub mod recommend;
pub mod similarity;
pub mod spectral;

pub use error::{Error, Result};
