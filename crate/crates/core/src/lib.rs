//! Approximate categories over finite fields: truncated coordinate-ring
//! ideals, Hom spaces between affine subspaces, constructible functors, and
//! the graph-isomorphism pipeline built on them.

pub mod affcat;
pub mod cfi;
pub mod error;
pub mod functors;
pub mod ffla;
pub mod graph;
pub mod hopf;
pub mod logic;
pub mod modiso;
pub mod oracle;
pub mod rep;
pub mod sym_model;
pub mod torus_model;
pub mod wl;

pub use error::{Error, Result};
