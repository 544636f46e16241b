//! Secure distributed matrix multiplication (SDMM) over prime fields.
//!
//! A user wants the products `A_s * B_s` of `S` matrix pairs held, in coded
//! form, by `N` servers, such that no set of `X` colluding servers learns
//! anything about the secured inputs. This crate provides the pieces of that
//! pipeline as a library:
//!
//! * [`field`]: exact arithmetic in `F_q` (q prime), discrete-log tables, and
//!   the prime window used by the scalar multiplication scheme.
//! * [`matrix`]: row-major matrices over a prime field, exact Gaussian
//!   elimination, and the Cauchy/Vandermonde decoding matrix used by
//!   cross-subspace alignment.
//! * [`sharing`]: problem configuration (which inputs are secured, which side
//!   information the user holds), seeded noise, the two share encoders, and
//!   per-secret reconstruction.
//! * [`schemes`]: end-to-end retrieval sessions (polynomial sharing, cross
//!   subspace alignment, scalar, outer product, Hadamard, block partition,
//!   and a private-information-retrieval demo), each returning decoded
//!   products plus an exact download ledger.
//! * [`capacity`]: exact rational capacity values and upper bounds per
//!   version of the problem, converse bounds for multi-message X-secure
//!   T-private information retrieval, and achieved-rate accounting.
//! * [`analysis`]: exhaustive collusion audits (exact mutual information),
//!   product-entropy measurement, and rate-versus-capacity sweeps.
//!
//! The `sdmm` binary is a thin command-line wrapper over these modules; the
//! `examples/` directory shows one runnable walkthrough per capability.

pub mod analysis;
pub mod capacity;
pub mod cli;
pub mod field;
pub mod ledger;
pub mod matrix;
pub mod schemes;
pub mod sharing;

use thiserror::Error;

/// Crate-wide error type. Validation failures map to process exit code 2 in
/// the CLI; enumeration-budget refusals map to exit code 3.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("zero has no multiplicative inverse in F_{0}")]
    ZeroInverse(u64),
    #[error("singular linear system")]
    SingularSystem,
    #[error("inconsistent linear system (shares do not fit the declared code)")]
    InconsistentSystem,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("field too small: need q > {min}, got q = {got}")]
    FieldTooSmall { min: u64, got: u64 },
    #[error(
        "exhaustive enumeration needs {base}^{exponent} \u{2248} {approx:.3e} states, \
         which exceeds the budget of {budget}"
    )]
    EnumerationBudget {
        base: u64,
        exponent: u32,
        approx: f64,
        budget: u64,
    },
}

impl Error {
    /// Process exit code the CLI maps this error to.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::EnumerationBudget { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub use field::{FieldElement, MultIsomorphism, PrimeField};
pub use matrix::{CsaDecodeMatrix, Matrix};
pub use sharing::{NoiseBatch, SdmmConfig, SdmmVersion, SecretBatch, ShareSet, SideInfo};
