//! Capacities, cut-set bounds, achievable rates and cardinality certificates
//! for finite-alphabet networks with in-block memory (NiBMs).
//!
//! A NiBM has `K` nodes that interact over blocks of `L` letters. Inside a
//! block the channel may have arbitrary causal memory; across blocks it is
//! memoryless. Every node encodes with a *code function* (a code tree) that
//! maps its own past outputs in the block to its next input, so most results
//! reduce to information quantities of the joint law of code functions,
//! inputs and outputs over one block.
//!
//! Layout:
//! - [`prob`]: labelled joint tables, entropies, causal conditioning, directed information.
//! - [`model`]: channels, code functions, sessions and the standard embeddings.
//! - [`cutset`]: the cut-set bound, its weakened forms and the causal-relay bound.
//! - [`optimizer`]: Blahut–Arimoto, max-min subgradient ascent, grids, support reduction.
//! - [`strategies`]: relay, quantize-forward, MAC-with-feedback and broadcast rates.
//! - [`gaussian`]: linear Gaussian networks and the quantize-forward gap certificate.
//! - [`cli`]: the `nibm` command-line front end.

pub mod cli;
pub mod cutset;
pub mod gaussian;
pub mod model;
pub mod optimizer;
pub mod prob;
pub mod scalar;
pub mod strategies;

pub use scalar::Real;

/// Joint table with double-precision weights; the workhorse instantiation.
pub type Joint = prob::JointTable<f64>;
/// Single-precision joint table.
pub type JointF32 = prob::JointTable<f32>;
/// Double-precision finite distribution.
pub type Distribution = prob::FiniteDistribution<f64>;
/// Double-precision Gaussian network.
pub type Gaussian = gaussian::GaussianNetwork<f64>;

/// Absolute tolerance used for normalization and equality checks.
pub const TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("block length mismatch: expected {expected}, found {found}")]
    BlockLength { expected: usize, found: usize },
    #[error("table too large: {0} cells exceeds the cap of {1}")]
    TooLarge(u128, u128),
    #[error("enumeration cap exceeded: {count} code functions for node {node} (cap {cap}); restrict the support or raise --cap")]
    CapExceeded { node: usize, count: u128, cap: u128 },
    #[error("not normalized: {what} sums to {sum}")]
    NotNormalized { what: String, sum: f64 },
    #[error("negative probability {value} in {what}")]
    Negative { what: String, value: f64 },
    #[error("invalid cut: {0}")]
    InvalidCut(String),
    #[error("shape violation: {0}")]
    Shape(String),
    #[error("bound kind does not fit the channel: {0}")]
    KindMismatch(String),
    #[error("factorization violated: {0}")]
    Factorization(String),
    #[error("invalid partition: {0}")]
    Partition(String),
    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error("matrix is not lower triangular: {0}")]
    NotLowerTriangular(String),
    #[error("spec error at {field}: {msg}")]
    Spec { field: String, msg: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
