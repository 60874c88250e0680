//! Enumeration of repeated patterns in finite point sets.
//!
//! Three engines share one toolkit of exact rationals, rank labels and
//! radix-sorted query matching:
//!
//! * [`squares`]: all axis-parallel squares of a planar set in `O(n sqrt n)`.
//! * [`hypercubes`]: all axis-parallel hypercubes in `R^d` in `O(n^(1+1/d))`.
//! * [`copies`]: all homothetic copies `s * Q + t` of a fixed
//!   full-dimensional pattern `Q`.
//!
//! Every engine streams its output through a [`Reporter`] and works in
//! linear space. [`testkit`] holds brute-force oracles and instance
//! generators, [`bench`] the scaling harness.

mod batch;
pub mod bench;
pub mod compile;
pub mod copies;
pub mod error;
pub mod geometry;
pub mod hypercubes;
pub mod io;
pub mod label;
pub mod linalg;
mod lines;
pub mod report;
pub mod scalar;
pub mod squares;
pub mod testkit;

pub use compile::{compile_pattern, CompileConfig, CompiledPattern, Safety};
pub use copies::{enumerate_copies, enumerate_copies_with, enumerate_two_point_pattern, find_copies, Execution, Mode};
pub use error::{Error, Result};
pub use geometry::{normalize_input, LinearFunctional, Pattern, Point, PointSet, D_MAX, K_MAX};
pub use hypercubes::{enumerate_hypercubes, enumerate_hypercubes_with};
pub use report::{CopyReport, CountingReporter, EngineOptions, EngineStats, Occurrence, Reporter};
pub use scalar::{parse_scalar, Scalar};
pub use squares::{baseline_squares, enumerate_squares};
