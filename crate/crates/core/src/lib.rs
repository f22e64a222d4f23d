//! Exact chart-level constructions for spectral data of SO(p+q,p) Higgs bundles.
pub mod census;
pub mod charclass;
pub mod error;
pub mod exact;
pub mod higgs;
pub mod langlands;
pub mod random;
pub mod report;
pub mod selftest;
pub mod spectral;
pub mod split;
pub use error::{Error, Result};
