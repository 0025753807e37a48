//! Reeb graphs of ε-thickened point clouds under affine functions.
//!
//! Given a finite set of points `A ⊂ ℝ^d`, a radius `ε > 0` and an affine
//! function `f(x) = w·x + b`, the union of the closed ε-balls around the
//! points is an ℝ-space whose Reeb graph this crate computes exactly:
//!
//! 1. [`geometry`] turns the point cloud into closed intervals: the image
//!    `f(B_ε(p))` of every ball and the image of every nonempty pairwise
//!    ball intersection, both in closed form.
//! 2. [`sweep`] runs a left-to-right sweep over the sorted intervals,
//!    maintaining a partition of ℝ into cells, a union-find forest per
//!    cell and bipartite link graphs between consecutive cells.
//! 3. [`reeb`] turns the final sweep state into an explicit graph with
//!    one vertex per connected component per cell, and serializes it to
//!    JSON or Graphviz DOT.
//!
//! [`oracle`] holds independent brute-force reference implementations
//! used to validate the sweep, [`approx`] desk-scale reconstruction
//! experiments on sampled shapes, and [`bench`] a scaling harness that
//! records union-find operation counts and wall times.

pub mod approx;
pub mod bench;
pub mod error;
pub mod geometry;
pub mod input;
pub mod oracle;
pub mod reeb;
pub mod sweep;

pub use error::{InputError, SweepError};
pub use geometry::{build_inputs, AffineFunctional, IntervalLabel, LabeledInterval, Point};
pub use reeb::ReebGraph;
pub use sweep::{sweep, Bound, OpCounters, PointId, Sweep, SweepOptions, SweepState};
