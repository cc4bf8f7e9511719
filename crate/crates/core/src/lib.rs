//! Limit sets of algebraic flows in commutative complex Lie groups `E/Γ`.
//!
//! The crate is organised around a small exact kernel and the analyses built
//! on top of it:
//!
//! * [`exact`], [`ball`], [`mat`] — Gaussian-rational scalars, certified
//!   complex balls and generic dense matrices over either.
//! * [`linalg`] — canonical echelon subspaces, quotient projections,
//!   realification and rational saturation.
//! * [`lll`] — integer-relation detection used by saturation and by the
//!   certified (ball) code paths.
//! * [`lattice`] — the discrete subgroup `Γ`, reduction to the quotient
//!   group, closures of subspace images and dual characters.
//! * [`series`], [`curve`] — one-variable Laurent data: stratification,
//!   radius analysis and limit sets of one-dimensional flows.
//! * [`cones`] — exact rational polyhedral cones (double description).
//! * [`multiflow`] — several singular variables: leading powers, complete
//!   leading sequences, good discs and limit components.
//! * [`harness`] — Monte-Carlo verification: mass asymptotics, Weyl sums,
//!   sector geometry and cluster scans.

pub mod ball;
pub mod cones;
pub mod curve;
pub mod exact;
pub mod harness;
pub mod lattice;
pub mod linalg;
pub mod lll;
pub mod mat;
pub mod multiflow;
pub mod series;

use thiserror::Error;

/// Errors shared by all analysis stages.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// Hypothesis (H0) fails: the map is bounded near the puncture and the
    /// limit set is the single point `f(0)`.
    #[error("map has no poles; the flow extends through the puncture")]
    NoPoles,
    #[error("truncation insufficient: {0}")]
    TruncationInsufficient(String),
    #[error("certification failure: {0}")]
    CertificationFailure(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("enumeration depth bound exceeded")]
    DepthExceeded,
    #[error("rank condition not reached with N0 <= {0}")]
    RankNotReached(usize),
    #[error("alpha vector has a zero component")]
    AlphaDegenerate,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Three-valued answer for membership questions decided over balls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trilean {
    In,
    Out,
    Undecided,
}

impl Trilean {
    pub fn is_in(self) -> bool {
        self == Trilean::In
    }
    pub fn is_out(self) -> bool {
        self == Trilean::Out
    }
}

/// Default working precision for certified (ball) computations, in bits.
pub const DEFAULT_PREC: u32 = 256;

/// Default height bound for integer-relation reconstruction.
pub const DEFAULT_HEIGHT_BOUND: i64 = 1_000_000;
