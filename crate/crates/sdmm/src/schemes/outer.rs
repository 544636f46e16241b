//! Outer products (`K = 1`) below the naive download floor.
//!
//! An `L x 1` by `1 x M` product has `L M` entries but only `L + M - 1`
//! q-ary units of entropy, and the naive general session pays for the
//! entries. This session pays for the entropy instead, by splitting each
//! factor into three cheap pieces:
//!
//! * the position of its first nonzero entry (`0` for the zero vector),
//! * the leading value itself,
//! * the normalized tail: the factor scaled to make the leading entry `1`,
//!   with that entry dropped.
//!
//! Tails (`L - 1` plus `M - 1` elements) travel through the general scheme;
//! positions are scalars among `L + 1` (resp. `M + 1`) values, charged at
//! their information content; leading values are nonzero by construction,
//! so their product comes through the log-domain core with no indicator
//! bits at all. Per server that is `L + M - 2` field elements plus
//! `log_q(L+1) + log_q(M+1) + log_q(p)`.
//!
//! Answer payload layout per server: summed A-tail block (`L - 1` values),
//! summed B-tail block (`M - 1`), the two summed position shares, the `F_p`
//! log symbol.

use super::general::decode_summed;
use super::{sub_seed, AnswerSet, SessionKind, SessionResult};
use crate::capacity::achieved_rate;
use crate::field::{FieldElement, MultIsomorphism, PrimeField};
use crate::ledger::{big_int, DownloadLedger, PayloadCategory, QarySymbols};
use crate::matrix::Matrix;
use crate::schemes::logdomain::log_domain_multiply;
use crate::sharing::{general_share, NoiseBatch, SdmmConfig, SdmmVersion, SecretBatch};
use crate::{Error, Result};

/// One factor split into position, leading value, and normalized tail.
struct Decomposed {
    /// 1-based position of the first nonzero entry; 0 for the zero vector.
    position: u64,
    lead: FieldElement,
    tail: Vec<u64>,
}

fn decompose(values: &[u64], field: PrimeField) -> Result<Decomposed> {
    match values.iter().position(|&v| v != 0) {
        Some(pos) => {
            let lead = field.elem(values[pos]);
            let inv = lead.inverse()?;
            let tail = values
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != pos)
                .map(|(_, &v)| (field.elem(v) * inv).value())
                .collect();
            Ok(Decomposed { position: pos as u64 + 1, lead, tail })
        }
        None => Ok(Decomposed { position: 0, lead: field.one(), tail: vec![0; values.len() - 1] }),
    }
}

/// Rebuilds the normalized factor from its decoded position and tail.
fn reassemble(field: PrimeField, len: usize, position: u64, tail: &[u64]) -> Vec<u64> {
    if position == 0 {
        return vec![0; len];
    }
    let lead_at = position as usize - 1;
    let mut out = Vec::with_capacity(len);
    let mut tail_iter = tail.iter();
    for i in 0..len {
        if i == lead_at {
            out.push(1);
        } else {
            out.push(*tail_iter.next().expect("tail covers all non-leading entries"));
        }
    }
    debug_assert!(out.iter().all(|&v| v < field.order()));
    out
}

/// Runs one outer product session (`K = 1`, both factors secured, batch
/// `S = N - X`).
pub fn outer_product_session(
    config: &SdmmConfig,
    batch: &SecretBatch,
    seed: u64,
) -> Result<SessionResult> {
    if config.version != SdmmVersion::AbPhi {
        return Err(Error::InvalidConfig(
            "the outer product session covers the fully secured version without side information"
                .into(),
        ));
    }
    if config.k != 1 {
        return Err(Error::InvalidConfig("outer products need K = 1".into()));
    }
    let s = config.general_batch()?;
    if batch.len() != s {
        return Err(Error::InvalidConfig(format!(
            "batch of {} secrets, but N = {}, X = {} fixes S = {s}",
            batch.len(),
            config.n,
            config.x
        )));
    }
    // Positions embed into F_q (q > max(L, M)) and the share codes evaluate
    // at points 1..=N (q > N).
    let needed = config.l.max(config.m).max(config.n) as u64;
    if config.q <= needed {
        return Err(Error::FieldTooSmall { min: needed, got: config.q });
    }
    let field = config.field();
    let (l, m, n, x) = (config.l, config.m, config.n, config.x);
    let iso = MultIsomorphism::new(field)?;
    let points: Vec<u64> = (1..=n as u64).collect();

    let a_parts: Vec<Decomposed> =
        batch.a_mats.iter().map(|mat| decompose(mat.values(), field)).collect::<Result<_>>()?;
    let b_parts: Vec<Decomposed> =
        batch.b_mats.iter().map(|mat| decompose(mat.values(), field)).collect::<Result<_>>()?;

    let column = |vals: &[u64]| {
        let mut mat = Matrix::zero(field, vals.len(), 1);
        for (r, &v) in vals.iter().enumerate() {
            mat.set(r, 0, v);
        }
        mat
    };
    let rowvec = |vals: &[u64]| {
        let mut mat = Matrix::zero(field, 1, vals.len());
        for (c, &v) in vals.iter().enumerate() {
            mat.set(0, c, v);
        }
        mat
    };
    let scalar = |v: u64| {
        let mut mat = Matrix::zero(field, 1, 1);
        mat.set(0, 0, v);
        mat
    };

    // Tails ride the general scheme as (L-1) x 1 by 1 x (M-1) batches.
    let tail_batch = SecretBatch {
        a_mats: a_parts.iter().map(|p| column(&p.tail)).collect(),
        b_mats: b_parts.iter().map(|p| rowvec(&p.tail)).collect(),
    };
    let tail_noise =
        NoiseBatch::generate(field, s, x, x, (l - 1, 1), (1, m - 1), sub_seed(seed, 1));
    let tail_shares = general_share(&tail_batch, &tail_noise, field, &points)?;

    // Positions ride it as 1 x 1 scalars.
    let index_batch = SecretBatch {
        a_mats: a_parts.iter().map(|p| scalar(p.position)).collect(),
        b_mats: b_parts.iter().map(|p| scalar(p.position)).collect(),
    };
    let index_noise = NoiseBatch::generate(field, s, x, x, (1, 1), (1, 1), sub_seed(seed, 2));
    let index_shares = general_share(&index_batch, &index_noise, field, &points)?;

    // Leading values are nonzero, so no indicator bits are needed.
    let lead_a: Vec<FieldElement> = a_parts.iter().map(|p| p.lead).collect();
    let lead_b: Vec<FieldElement> = b_parts.iter().map(|p| p.lead).collect();
    let leads = log_domain_multiply(&iso, &lead_a, &lead_b, n, x, false, sub_seed(seed, 3))?;

    let sum_side = |blocks: &[Vec<Matrix>]| -> Vec<Matrix> {
        blocks
            .iter()
            .map(|per_secret| {
                per_secret[1..].iter().fold(per_secret[0].clone(), |acc, mat| &acc + mat)
            })
            .collect()
    };
    let tail_a_sum = sum_side(&tail_shares.a_shares);
    let tail_b_sum = sum_side(&tail_shares.b_shares);
    let index_a_sum = sum_side(&index_shares.a_shares);
    let index_b_sum = sum_side(&index_shares.b_shares);

    let mut answers = AnswerSet::new(n);
    let mut ledger = DownloadLedger::new(config.q, n);
    for srv in 0..n {
        answers.push_symbols(srv, tail_a_sum[srv].values().iter().copied());
        answers.push_symbols(srv, tail_b_sum[srv].values().iter().copied());
        answers.push_symbols(srv, [index_a_sum[srv].get(0, 0).value()]);
        answers.push_symbols(srv, [index_b_sum[srv].get(0, 0).value()]);
        answers.push_symbols(srv, [leads.fp_answers[srv]]);
        if l + m > 2 {
            ledger.charge(
                PayloadCategory::FieldData,
                srv,
                QarySymbols::from_count((l + m - 2) as u64),
                big_int((l + m - 2) as u64),
            );
        }
        ledger.charge(
            PayloadCategory::Indices,
            srv,
            QarySymbols::log_term(l as u64 + 1, big_int(1))
                + &QarySymbols::log_term(m as u64 + 1, big_int(1)),
            big_int(2),
        );
        ledger.charge(
            PayloadCategory::AuxScalars,
            srv,
            QarySymbols::log_term(leads.p, big_int(1)),
            big_int(1),
        );
    }

    let tails_a = if l > 1 {
        decode_summed(&tail_a_sum, &points, s, x, l - 1, 1)?
    } else {
        vec![Matrix::zero(field, 0, 1); s]
    };
    let tails_b = if m > 1 {
        decode_summed(&tail_b_sum, &points, s, x, 1, m - 1)?
    } else {
        vec![Matrix::zero(field, 1, 0); s]
    };
    let idx_a = decode_summed(&index_a_sum, &points, s, x, 1, 1)?;
    let idx_b = decode_summed(&index_b_sum, &points, s, x, 1, 1)?;

    let mut products = Vec::with_capacity(s);
    for si in 0..s {
        let col_vals = reassemble(field, l, idx_a[si].get(0, 0).value(), tails_a[si].values());
        let row_vals = reassemble(field, m, idx_b[si].get(0, 0).value(), tails_b[si].values());
        let outer = column(&col_vals).matmul(&rowvec(&row_vals))?;
        products.push(outer.scale(leads.products[si]));
    }
    #[cfg(debug_assertions)]
    for (si, product) in products.iter().enumerate() {
        let direct = batch.a_mats[si].matmul(&batch.b_mats[si])?;
        assert_eq!(*product, direct, "decoded outer product {si} disagrees");
    }

    let rate = achieved_rate(&ledger, config, s)?;
    Ok(SessionResult {
        kind: SessionKind::OuterProduct,
        config: *config,
        batch: s,
        products,
        answers,
        ledger,
        rate,
    })
}
