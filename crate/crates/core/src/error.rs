//! Error types shared across the crate.

use thiserror::Error;

/// Problems with user-supplied data: point clouds, functionals, radii,
/// or files being parsed into them.
#[derive(Debug, Error)]
pub enum InputError {
    #[error("point {id}: coordinate {axis} is not finite")]
    NonFiniteCoordinate { id: u32, axis: usize },

    #[error("point {id}: empty coordinate vector")]
    EmptyPoint { id: u32 },

    #[error("point {id} has {got} coordinates, expected {expected}")]
    DimensionMismatch { id: u32, got: usize, expected: usize },

    #[error("functional gradient has {got} components, points have {expected}")]
    FunctionalDimension { got: usize, expected: usize },

    #[error("functional has a non-finite component")]
    NonFiniteFunctional,

    #[error("constant functional (zero gradient) requires the explicit constant-mode flag")]
    ConstantFunctional,

    #[error("eps must be positive and finite, got {0}")]
    BadEps(f64),

    #[error("duplicate points: {}", format_duplicates(.0))]
    DuplicatePoints(Vec<(u32, u32)>),

    #[error("point ids must be 0..n-1 and unique (n = {n}), saw id {id}")]
    BadPointId { id: u32, n: usize },

    #[error("interval {label}: {msg}")]
    BadInterval { label: String, msg: String },

    #[error("{context} row {row}: {msg}")]
    Parse { context: String, row: usize, msg: String },

    #[error("unsupported functional for this experiment: {0}")]
    UnsupportedFunctional(String),
}

fn format_duplicates(pairs: &[(u32, u32)]) -> String {
    pairs
        .iter()
        .map(|(a, b)| format!("({a},{b})"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Violations of the sweep input contract detected before or during a run.
#[derive(Debug, Error)]
pub enum SweepError {
    #[error("interval [{lo},{hi}] is invalid: {msg}")]
    BadInterval { lo: f64, hi: f64, msg: String },

    #[error("ball interval list must have exactly one interval per point id 0..n-1; {msg}")]
    BadBallSet { msg: String },

    #[error("pair interval {{{p},{q}}} listed more than once")]
    DuplicatePair { p: u32, q: u32 },

    #[error("pair interval {{{p},{q}}} is not contained in the intersection of its ball intervals")]
    PairNotContained { p: u32, q: u32 },

    #[error("pair interval {{{p},{q}}} touched a cell missing one of its points; input violates containment in the ball intervals")]
    PairNotCovered { p: u32, q: u32 },
}
