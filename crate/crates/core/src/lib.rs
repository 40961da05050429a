//! Conformal invariants of four-dimensional submanifolds.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod ambient;
pub mod error;
pub mod euler_lagrange;
pub mod geometry;
pub mod invariants;
pub mod renvol;
pub mod series;

pub use error::{GwError, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/products.md")]
    mod products {}
    #[doc = include_str!("../../../book/src/coefficients.md")]
    mod coefficients {}
    #[doc = include_str!("../../../book/src/ambient.md")]
    mod ambient {}
    #[doc = include_str!("../../../book/src/critical.md")]
    mod critical {}
    #[doc = include_str!("../../../book/src/renormalized-volume.md")]
    mod renormalized_volume {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
