//! Sampling, star discrepancy and negative-dependence tools for Latin
//! hypercube and padded Latin hypercube point sets.

pub mod bounds;
pub mod cli;
pub mod covers;
pub mod discrepancy;
pub mod error;
pub mod experiments;
pub mod negdep;
pub mod pointset;
pub mod rng;
pub mod samplers;

pub use error::{Error, Result};
pub use pointset::PointSet;
pub use samplers::{SampleSpec, SamplerKind};
