//! Deterministic minimum-cut toolkit for weighted undirected graphs.
//!
//! The crate is organized around a decomposition pipeline: a height-capped
//! push-relabel routine ([`unit_flow`]), a strength certification procedure
//! ([`strong`]), cluster refinement for small and large clusters
//! ([`small_cluster`], [`large_cluster`]), a derandomized skeleton sparsifier
//! ([`sparsifier`]) and the end-to-end driver ([`pipeline`]). Brute-force
//! references used by tests and verification commands live in [`oracle`].

pub mod graph;
pub mod large_cluster;
pub mod oracle;
pub mod packing;
pub mod pipeline;
pub mod rng;
pub mod small_cluster;
pub mod sparsifier;
pub mod strong;
pub mod unit_flow;

use thiserror::Error;

/// Relative tolerance for comparisons against derived thresholds.
/// Weights are finite-precision reals; exact integer arithmetic is a non-goal.
pub const REL_TOL: f64 = 1e-9;

/// `a <= b` up to relative tolerance.
pub fn approx_le(a: f64, b: f64) -> bool {
    a <= b + REL_TOL * (1.0 + a.abs() + b.abs())
}

/// `a >= b` up to relative tolerance.
pub fn approx_ge(a: f64, b: f64) -> bool {
    b <= a + REL_TOL * (1.0 + a.abs() + b.abs())
}

/// `a == b` up to relative tolerance.
pub fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * (1.0 + a.abs() + b.abs())
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parameter regime: {0}")]
    ParameterRegime(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("internal assertion failed: {0}")]
    Assertion(String),
    #[error("graph is disconnected")]
    Disconnected,
}

pub type Result<T> = std::result::Result<T, Error>;

/// Deterministic work budget threaded through the heavy routines. Budgets are
/// counted in abstract operations, never wall-clock time, so identical inputs
/// exhaust identical budgets regardless of thread count or machine.
#[derive(Debug, Clone)]
pub struct Budget {
    remaining: u64,
}

impl Budget {
    pub fn new(ops: u64) -> Self {
        Budget { remaining: ops }
    }

    /// A budget large enough to never trip in tests of individual modules.
    pub fn unlimited() -> Self {
        Budget {
            remaining: u64::MAX,
        }
    }

    pub fn charge(&mut self, ops: u64, what: &str) -> Result<()> {
        if self.remaining < ops {
            self.remaining = 0;
            return Err(Error::BudgetExceeded(what.to_string()));
        }
        self.remaining -= ops;
        Ok(())
    }

    pub fn remaining(&self) -> u64 {
        self.remaining
    }
}
