//! Exact-arithmetic quantum Schubert calculus on generalized flag varieties.
//!
//! The crate computes genus-zero three-pointed Gromov-Witten structure
//! constants `N_{u,v}^{w,λ}` of complete flag varieties `G/B` over exact
//! integers, transports constants of partial flag varieties `G/P` through
//! the Peterson-Woodward lift, rewrites quantum constants into classical
//! intersection numbers, and ships exhaustive verification harnesses for
//! every identity it relies on.
//!
//! Module layout:
//! - [`cartan`]: root-system arithmetic (Cartan data, positive roots, pairings).
//! - [`weyl`]: Weyl group elements, lengths, descents, coset combinatorics.
//! - [`qhring`]: the quantum cohomology engine for `G/B` (Chevalley rule,
//!   divisor-expansion recursion, structure-constant extraction).
//! - [`pw`]: Peterson-Woodward comparison (`λ_B`, `ω_P ω_{P'}`, `G/P` constants).
//! - [`reduce`]: the two-variable grading, vanishing criteria, rewrite rules
//!   with audit traces, and the quantum-to-classical reduction loop.
//! - [`grassmann`]: type-A Grassmannian specialization with an independent
//!   quantum Pieri oracle and the two-step flag correspondence.
//! - [`cli`]: command-line surface.

pub mod cartan;
pub mod cli;
pub mod grassmann;
pub mod pw;
pub mod qhring;
pub mod reduce;
pub mod weyl;

use thiserror::Error;

/// Crate-wide error type.
///
/// `Config`, `Parse` and `Precondition` map to CLI exit code 1;
/// `Invariant` maps to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid root-system configuration (unknown type, bad rank).
    #[error("configuration error: {0}")]
    Config(String),
    /// Malformed user input (element words, coroot vectors, partitions).
    #[error("parse error: {0}")]
    Parse(String),
    /// An operation was called outside its stated precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A rewrite rule was applied where its applicability condition fails.
    #[error("rule not applicable: {0}")]
    RuleNotApplicable(String),
    /// An internal invariant failed; this is a bug or a corrupted cache.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Outcome of one verification sweep: how many facts were checked and a
/// deterministic (sorted) list of violations, empty on success.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub checks: usize,
    pub violations: Vec<String>,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(mut self, other: Report) -> Report {
        self.checks += other.checks;
        self.violations.extend(other.violations);
        self
    }

    /// Sort and dedup violations so reports are byte-identical across
    /// worker counts and scheduling.
    pub fn finalize(mut self) -> Report {
        self.violations.sort();
        self.violations.dedup();
        self
    }
}
