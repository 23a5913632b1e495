//! Command-line companion of [`iqp_core`]: file formats, exports, diagrams
//! built from drawings, and the verification suites behind the `iqp` binary.

pub mod embedding;
pub mod export;
pub mod formats;
pub mod suites;

pub use iqp_core;
