//! Continuous-time quantum walk search on two complete graphs whose vertices
//! are paired by links of weight `w`.
//!
//! The walk from the uniform superposition stays in a four-dimensional
//! subspace ([`reduced`]), which is evolved exactly ([`evolve`]) and checked
//! against the full vertex space ([`fullspace`]). [`perturbation`] holds the
//! analytic predictions for each weight scale and [`analysis`] the sweeps
//! that compare the two.

// fixed-size matrix code reads best with explicit indices
#![allow(clippy::needless_range_loop)]

pub mod analysis;
pub mod cli;
pub mod error;
pub mod evolve;
pub mod fullspace;
pub mod graph;
pub mod output;
pub mod perturbation;
pub mod reduced;

pub use error::{Error, Result};
