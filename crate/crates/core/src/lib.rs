//! Numerical laboratory for multilinear spherical averages over simplex
//! configurations in dense subsets of R^d.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod averages;
pub mod bessel;
pub mod cli;
pub mod config;
pub mod corpus;
pub mod dichotomy;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod manifest;
pub mod maximal;
pub mod mollifier;
pub mod numeric;
pub mod rotation;
pub mod simplex;
pub mod sphere;

pub use error::{Result, SlabError};
