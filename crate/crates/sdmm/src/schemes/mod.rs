//! Retrieval sessions: encode a batch of secrets, collect one answer per
//! server, decode the products, and account for every downloaded symbol.
//!
//! A session plays all three parties of the protocol (user, servers,
//! decoder) in one process. That sounds pointless until you look at what it
//! yields: the decoder only ever touches the answer payloads, so a passing
//! session is a machine-checked proof that the downloads determine the
//! products, and the ledger attached to the result is the exact price paid.
//!
//! Sessions are deterministic in `(config, batch, seed)`; all noise comes
//! from the keyed stream in [`crate::sharing`].

mod csa;
mod general;
mod logdomain;
mod oneshot;
mod outer;
mod pir;

pub use csa::{csa_alphas, csa_scheme_session};
pub use general::general_scheme_session;
pub use logdomain::{hadamard_session, scalar_exhaustive_check, scalar_mul_session};
pub use oneshot::{oneshot_partition_result, oneshot_partition_session, PartitionOutput};
pub use outer::outer_product_session;
pub use pir::{pir_reduction_demo, PirDemoOutput};

use crate::capacity::RateValue;
use crate::ledger::DownloadLedger;
use crate::matrix::Matrix;
use crate::sharing::{splitmix64, SdmmConfig};

/// Which retrieval construction a session ran.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SessionKind {
    General,
    Csa,
    Scalar,
    OuterProduct,
    Hadamard,
    Partition,
}

impl std::fmt::Display for SessionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SessionKind::General => write!(f, "general"),
            SessionKind::Csa => write!(f, "csa"),
            SessionKind::Scalar => write!(f, "scalar"),
            SessionKind::OuterProduct => write!(f, "outer-product"),
            SessionKind::Hadamard => write!(f, "hadamard"),
            SessionKind::Partition => write!(f, "partition"),
        }
    }
}

/// Everything one server sent back, flattened in a documented order (each
/// session's docs state the layout). Values are residues in whatever field
/// each segment lives in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ServerAnswer {
    pub server: usize,
    pub payload: Vec<u64>,
}

/// Answers from all servers, in server order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnswerSet {
    pub answers: Vec<ServerAnswer>,
}

impl AnswerSet {
    pub fn new(servers: usize) -> Self {
        AnswerSet {
            answers: (0..servers).map(|server| ServerAnswer { server, payload: Vec::new() }).collect(),
        }
    }

    pub fn push_symbols(&mut self, server: usize, symbols: impl IntoIterator<Item = u64>) {
        self.answers[server].payload.extend(symbols);
    }

    pub fn total_symbols(&self) -> usize {
        self.answers.iter().map(|a| a.payload.len()).sum()
    }
}

/// One line of a session transcript: what a server transmitted and what it
/// was charged for it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranscriptRecord {
    pub server: usize,
    pub symbols: usize,
    pub charged: String,
}

/// Outcome of a retrieval session.
#[derive(Clone, Debug)]
pub struct SessionResult {
    pub kind: SessionKind,
    pub config: SdmmConfig,
    /// Number of products decoded in this session.
    pub batch: usize,
    pub products: Vec<Matrix>,
    pub answers: AnswerSet,
    pub ledger: DownloadLedger,
    pub rate: RateValue,
}

impl SessionResult {
    pub fn transcript(&self) -> Vec<TranscriptRecord> {
        self.answers
            .answers
            .iter()
            .zip(self.ledger.per_server())
            .map(|(answer, charged)| TranscriptRecord {
                server: answer.server,
                symbols: answer.payload.len(),
                charged: charged.to_string(),
            })
            .collect()
    }
}

/// Independent seed for a sub-stream, so nested constructions never reuse
/// the noise of their callers.
pub(crate) fn sub_seed(seed: u64, label: u64) -> u64 {
    splitmix64(seed ^ splitmix64(label ^ 0x517c_c1b7_2722_0a95))
}

/// Rows `[points[i]^exps[j]]` over `field`; the coefficient matrices of
/// every polynomial-evaluation decode in this module.
pub(crate) fn power_matrix(
    field: crate::field::PrimeField,
    points: &[u64],
    exps: &[u64],
) -> Matrix {
    let mut m = Matrix::zero(field, points.len(), exps.len());
    for (r, &p) in points.iter().enumerate() {
        let base = field.elem(p);
        for (c, &e) in exps.iter().enumerate() {
            m.set(r, c, base.pow(e).value());
        }
    }
    m
}
