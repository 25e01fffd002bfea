//! Intersection complexes of 2-dimensional square complexes.
//!
//! Two families are covered: Salvetti complexes of right-angled Artin groups
//! on triangle-free graphs, and ordered 2-point discrete configuration spaces
//! of simplicial graphs. For each, the crate builds the reduced intersection
//! complex (a finite complex of join groups), compares such complexes up to
//! semi-isomorphism, and derives quasi-isometry verdicts.

pub mod cactus;
pub mod classifier;
pub mod corpus;
pub mod development;
pub mod error;
pub mod graph;
pub mod homology;
pub mod join;
pub mod products;
pub mod semiiso;
pub mod square;
pub mod words;

pub use error::{Error, Result};
