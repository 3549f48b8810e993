//! Exact combinatorics of almost-toric base diagrams and ellipsoid-embedding staircases.
//!
//! The crate is organised by subsystem:
//!
//! - [`lattice`]: integer and rational plane linear algebra (wedges, shears, affine lengths).
//! - [`atbd`]: almost-toric base diagrams, their validation, mutation and canonical form.
//! - [`diophantine`]: Markov-type equations, Vieta jumping and solution trees.
//! - [`staircase`]: manifold presets and alternating mutation sequences with sharp points.
//! - [`tropical`]: symplectic-tropical curve validation, tripods, dimers and chain certificates.
//! - [`quiver`]: quivers from fans, seed mutation and the alternating set recipe.

pub mod atbd;
pub mod diophantine;
pub mod error;
pub mod lattice;
pub mod quiver;
pub mod staircase;
pub mod tropical;

pub use error::{Error, Result};
