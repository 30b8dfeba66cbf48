//! Parallel transport for connections with values in a strict Lie 2-group.
//!
//! The 2-group is presented as a crossed module `(G, H, t, α)`. Connections
//! are pairs `(A, B)` of a 𝔤-valued 1-form and an 𝔥-valued 2-form on a chart
//! of ℝᵈ (d ≤ 3). Path transport is the path-ordered exponential of `A`,
//! surface transport the surface-ordered exponential of `(A, B)`, and gauge
//! transformations, 2-transformations and cocycle gluing act on both.
//!
//! The crate is `no_std` (with `alloc`); file formats and the command line
//! live in the `gerbe` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bundle;
pub mod error;
pub mod fields;
pub mod functor;
pub mod gauge;
pub mod lie;
pub mod linalg;
pub mod math;
pub mod transport;
pub mod two_group;

pub use error::{Error, Result};
