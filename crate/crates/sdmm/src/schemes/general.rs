//! The general matrix retrieval session, built on the Reed-Solomon style
//! encoder: batch size `S = N - max(X_A, X_B)`, evaluation points
//! `alpha_n = n`.
//!
//! Each server returns its batch-summed share blocks. Which blocks, and from
//! how many servers, depends on the version:
//!
//! * side information `A` elides the `A` block, side information `B` elides
//!   the `B` block (the user multiplies locally);
//! * a downloaded block whose factor is unsecured (`X = 0` on that side)
//!   carries only `S` unknowns, so the first `S` servers suffice for it.
//!
//! The resulting download totals, in field elements:
//!
//! | version | A block        | B block | total                |
//! |---------|----------------|---------|----------------------|
//! | AB_phi  | all `N`        | all `N` | `N (L K + K M)`      |
//! | AB_B    | all `N`        | elided  | `N L K`              |
//! | B_phi   | first `S` only | all `N` | `S L K + N K M`      |
//! | B_A     | elided         | all `N` | `N K M`              |
//! | B_B     | first `S` only | elided  | `S L K`              |
//!
//! Answer payload layout per server: the summed `A` block in row-major
//! order (if present), then the summed `B` block (if present).

use super::{sub_seed, AnswerSet, SessionKind, SessionResult};
use crate::capacity::achieved_rate;
use crate::ledger::{big_int, DownloadLedger, PayloadCategory, QarySymbols};
use crate::matrix::{eliminate, Matrix};
use crate::sharing::{general_share, NoiseBatch, SdmmConfig, SecretBatch, SideInfo};
use crate::{Error, Result};

/// Decodes the per-secret coefficient matrices out of batch-summed shares.
///
/// The sum of the shares at point `alpha` is a polynomial with the `S`
/// secrets on exponents `1..=S` and the summed noise on `S+1..=S+X`, so
/// `rows` evaluations against exponents `1..=S+X` pin everything down.
/// Overdetermined systems (more evaluations than unknowns) are checked for
/// consistency, which is what catches a corrupted answer.
pub(crate) fn decode_summed(
    summed: &[Matrix],
    alphas: &[u64],
    s: usize,
    x: usize,
    rows: usize,
    cols: usize,
) -> Result<Vec<Matrix>> {
    let field = summed[0].field();
    let unknowns: Vec<u64> = (1..=(s + x) as u64).collect();
    let coeffs = super::power_matrix(field, &alphas[..summed.len()], &unknowns);
    let rhs: Vec<Vec<u64>> = (0..rows * cols)
        .map(|cell| summed.iter().map(|m| m.values()[cell]).collect())
        .collect();
    let solutions = eliminate(&coeffs, &rhs)?;
    let mut out = vec![Matrix::zero(field, rows, cols); s];
    for (cell, solution) in solutions.iter().enumerate() {
        for (si, mat) in out.iter_mut().enumerate() {
            mat.set(cell / cols, cell % cols, solution[si]);
        }
    }
    Ok(out)
}

/// Runs one full session of the general scheme and returns the decoded
/// products together with the download ledger and achieved rate.
pub fn general_scheme_session(
    config: &SdmmConfig,
    batch: &SecretBatch,
    seed: u64,
) -> Result<SessionResult> {
    let s = config.general_batch()?;
    config.require_field_size(s)?;
    if batch.len() != s {
        return Err(Error::InvalidConfig(format!(
            "batch of {} secrets, but N = {}, X = {} fixes S = {s}",
            batch.len(),
            config.n,
            config.x
        )));
    }
    let field = config.field();
    let n = config.n;
    let alphas: Vec<u64> = (1..=n as u64).collect();
    let noise = NoiseBatch::for_config(config, s, sub_seed(seed, 0));
    let shares = general_share(batch, &noise, field, &alphas)?;

    let psi = config.version.side_info();
    let download_a = psi != SideInfo::A;
    let download_b = psi != SideInfo::B;
    let a_servers = if config.x_a() == 0 { s } else { n };
    let b_servers = if config.x_b() == 0 { s } else { n };

    let sum_blocks = |blocks: &[Vec<Matrix>], servers: usize| -> Vec<Matrix> {
        blocks[..servers]
            .iter()
            .map(|per_secret| {
                per_secret[1..]
                    .iter()
                    .fold(per_secret[0].clone(), |acc, m| &acc + m)
            })
            .collect()
    };

    let mut answers = AnswerSet::new(n);
    let mut ledger = DownloadLedger::new(config.q, n);

    let summed_a = if download_a {
        let summed = sum_blocks(&shares.a_shares, a_servers);
        for (srv, block) in summed.iter().enumerate() {
            answers.push_symbols(srv, block.values().iter().copied());
            ledger.charge(
                PayloadCategory::FieldData,
                srv,
                QarySymbols::from_count((config.l * config.k) as u64),
                big_int((config.l * config.k) as u64),
            );
        }
        Some(summed)
    } else {
        None
    };
    let summed_b = if download_b {
        let summed = sum_blocks(&shares.b_shares, b_servers);
        for (srv, block) in summed.iter().enumerate() {
            answers.push_symbols(srv, block.values().iter().copied());
            ledger.charge(
                PayloadCategory::FieldData,
                srv,
                QarySymbols::from_count((config.k * config.m) as u64),
                big_int((config.k * config.m) as u64),
            );
        }
        Some(summed)
    } else {
        None
    };

    let a_mats = match summed_a {
        Some(summed) => decode_summed(&summed, &alphas, s, config.x_a(), config.l, config.k)?,
        None => batch.a_mats.clone(),
    };
    let b_mats = match summed_b {
        Some(summed) => decode_summed(&summed, &alphas, s, config.x_b(), config.k, config.m)?,
        None => batch.b_mats.clone(),
    };

    let products: Vec<Matrix> = a_mats
        .iter()
        .zip(&b_mats)
        .map(|(a, b)| a.matmul(b))
        .collect::<Result<_>>()?;
    #[cfg(debug_assertions)]
    for (si, product) in products.iter().enumerate() {
        let direct = batch.a_mats[si].matmul(&batch.b_mats[si])?;
        assert_eq!(*product, direct, "decoded product {si} disagrees with direct multiplication");
    }

    let rate = achieved_rate(&ledger, config, s)?;
    Ok(SessionResult {
        kind: SessionKind::General,
        config: *config,
        batch: s,
        products,
        answers,
        ledger,
        rate,
    })
}
