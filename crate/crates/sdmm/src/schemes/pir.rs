//! Private information retrieval as a special case of secure
//! multiplication.
//!
//! Set `B` to identity columns and the product `A_s B` is nothing but the
//! selected columns of `A_s`. Because `B` is secured (`X_B = X > 0`), no
//! group of up to `X` servers learns which columns were touched, and
//! because the download ledger depends only on shapes, never on values, the
//! session costs byte for byte what a generic multiplication of the same
//! shape costs. The demo runs both and compares the ledgers to make that
//! concrete.

use super::csa::csa_scheme_session;
use super::general::general_scheme_session;
use super::{sub_seed, SessionResult};
use crate::ledger::DownloadLedger;
use crate::matrix::Matrix;
use crate::sharing::{random_matrix, SdmmConfig, SecretBatch, ShareScheme, SideInfo};
use crate::{Error, Result};

/// Outcome of the retrieval demo.
#[derive(Clone, Debug)]
pub struct PirDemoOutput {
    /// Requested column indices (0-based).
    pub wanted: Vec<usize>,
    /// The data matrices the columns were pulled from.
    pub sources: Vec<Matrix>,
    /// Decoded column bundles, one `L x |wanted|` matrix per secret.
    pub retrieved: Vec<Matrix>,
    /// Whether every retrieved bundle equals the selected source columns.
    pub columns_match: bool,
    /// The retrieval session itself.
    pub session: SessionResult,
    /// Ledger of a generic multiplication of identical shape.
    pub generic_ledger: DownloadLedger,
    /// Whether the retrieval ledger is indistinguishable from the generic
    /// one, per server and per category.
    pub ledger_matches: bool,
}

/// Retrieves columns `wanted` of each `A_s` by multiplying with an identity
/// column selection matrix. The config's `m` is replaced by the number of
/// requested columns; its version must not hand `A` to the user and must
/// secure `B` (that is `X > 0`), or there is nothing private about the
/// query.
pub fn pir_reduction_demo(
    config: &SdmmConfig,
    scheme: ShareScheme,
    wanted: &[usize],
    seed: u64,
) -> Result<PirDemoOutput> {
    if config.version.side_info() == SideInfo::A {
        return Err(Error::InvalidConfig(
            "retrieval from A requires the user not to hold A already".into(),
        ));
    }
    if config.x == 0 {
        return Err(Error::InvalidConfig(
            "private retrieval needs X > 0, otherwise the selection leaks".into(),
        ));
    }
    if wanted.is_empty() {
        return Err(Error::InvalidConfig("no columns requested".into()));
    }
    for (i, &w) in wanted.iter().enumerate() {
        if w >= config.k {
            return Err(Error::InvalidConfig(format!(
                "column {w} out of range for K = {}",
                config.k
            )));
        }
        if wanted[..i].contains(&w) {
            return Err(Error::InvalidConfig(format!("column {w} requested twice")));
        }
    }

    let demo = SdmmConfig::new(
        config.version,
        config.l,
        config.k,
        wanted.len(),
        config.n,
        config.x,
        config.q,
    )?;
    let field = demo.field();
    let s = match scheme {
        ShareScheme::General => demo.general_batch()?,
        ShareScheme::Csa => demo.csa_batch()?,
    };

    let mut selection = Matrix::zero(field, demo.k, demo.m);
    for (j, &w) in wanted.iter().enumerate() {
        selection.set(w, j, 1);
    }
    let sources: Vec<Matrix> =
        (0..s).map(|i| random_matrix(field, demo.l, demo.k, seed, 900, i as u64)).collect();
    let batch = SecretBatch::new(&demo, sources.clone(), vec![selection; s])?;

    let run = |batch: &SecretBatch, seed: u64| -> Result<SessionResult> {
        match scheme {
            ShareScheme::General => general_scheme_session(&demo, batch, seed),
            ShareScheme::Csa => csa_scheme_session(&demo, batch, seed),
        }
    };
    let session = run(&batch, seed)?;

    let retrieved = session.products.clone();
    let columns_match = sources.iter().zip(&retrieved).all(|(src, got)| {
        wanted
            .iter()
            .enumerate()
            .all(|(j, &w)| (0..demo.l).all(|r| got.get(r, j) == src.get(r, w)))
    });

    // Same shapes, generic values: the servers' bill must not move.
    let generic_batch = SecretBatch::random(&demo, s, sub_seed(seed, 7));
    let generic = run(&generic_batch, sub_seed(seed, 8))?;
    let ledger_matches = session.ledger == generic.ledger;

    Ok(PirDemoOutput {
        wanted: wanted.to_vec(),
        sources,
        retrieved,
        columns_match,
        session,
        generic_ledger: generic.ledger,
        ledger_matches,
    })
}
