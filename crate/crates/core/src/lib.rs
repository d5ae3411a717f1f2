//! Frank-Wolfe over the convex hull of a finite point set, with the
//! per-iteration direction search served by a maximum-inner-product oracle.
//!
//! The search `argmin_s ⟨∇f(w), s⟩` over the vertices is lifted by
//! [`geometry::TransformPair`] to a MaxIP query between unit vectors, then
//! answered by one of three oracles:
//!
//! - an exact scan ([`fw::ExactOracle`]),
//! - sign-hyperplane LSH on JL sketches with quantized queries
//!   ([`lsh_jl::LshJlIndex`]),
//! - adaptive inner-product estimation from medians of sketched distances
//!   ([`aipe::AipeIndex`]).
//!
//! [`fw::fw_accelerated`] drives the search with a threshold that halves on
//! a miss. [`herding`] casts kernel herding as Frank-Wolfe on `½‖w - μ‖²`.
//! [`experiment`] backs the `fwmips` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aipe;
pub mod calibrate;
pub mod calibration;
pub mod counters;
pub mod error;
pub mod experiment;
pub mod fw;
pub mod geometry;
pub mod herding;
pub mod instances;
pub mod linalg;
pub mod lsh;
pub mod lsh_jl;
pub mod pointset_io;
pub mod rng;
pub mod sketch;

pub use error::{Error, Result};
