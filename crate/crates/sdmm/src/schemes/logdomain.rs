//! Scalar products through the multiplicative structure of `F_q`, and the
//! entrywise (Hadamard) session built out of them.
//!
//! Multiplying nonzero scalars is adding their discrete logs, and adding is
//! something the additive schemes already do for free. So each server gets
//! Reed-Solomon style shares of `f(A_s)` and `f(B_s)` (logs with `f(0) = 0`)
//! over an auxiliary prime field `F_p`, `p` the smallest prime above
//! `2(q-1)`, and returns the single `F_p` value `sum_s A~ + sum_s B~`. The
//! decoded coefficient `f(A_s) + f(B_s)` never wraps modulo `p`, because it
//! is at most `2(q-2) < p`, so reducing it mod `q-1` and exponentiating
//! recovers `A_s B_s` whenever both factors are nonzero.
//!
//! Zero factors are invisible in log space (`f(0) = f(1) = 0`), so each
//! secret also ships two zero-indicator bits, shared with the same noise
//! budget. A bit is charged at its information content, `log_q(2)`, and the
//! `F_p` value at `log_q(p) < log_q(4(q-1))`, which is what makes the
//! per-product download approach one symbol as `q` grows.
//!
//! Indicator shares also live in `F_p`: the construction needs `N` distinct
//! nonzero evaluation points, and `F_p` always has them here (`p > N` is
//! checked), while tiny `q` may not.

use super::{sub_seed, AnswerSet, SessionKind, SessionResult};
use crate::capacity::{achieved_rate, rate_with_numerator};
use crate::field::{FieldElement, MultIsomorphism, PrimeField};
use crate::ledger::{big_int, DownloadLedger, PayloadCategory, QarySymbols};
use crate::matrix::{eliminate, solve_linear_system, Matrix};
use crate::sharing::{general_share, keyed_uniform, NoiseBatch, SdmmConfig, SdmmVersion, SecretBatch};
use crate::{Error, Result};

/// Raw material of one log-domain batch: per-server payloads plus the
/// decoded products. The caller owns charging the ledger.
pub(crate) struct LogDomainOutcome {
    /// One `F_p` residue per server: the summed log-share value.
    pub fp_answers: Vec<u64>,
    /// Per server, `2S` indicator shares in `F_p`, ordered `(A_1, B_1, A_2,
    /// B_2, ...)`. Empty when indicators are skipped.
    pub eta_answers: Vec<Vec<u64>>,
    /// Decoded products in `F_q`.
    pub products: Vec<FieldElement>,
    /// The auxiliary prime, for ledger charges.
    pub p: u64,
}

/// Retrieves the products of two scalar batches via log-domain addition.
/// With `with_eta` the zero-indicator sub-scheme runs too; without it every
/// input must be nonzero (the caller guarantees this).
pub(crate) fn log_domain_multiply(
    iso: &MultIsomorphism,
    a_vals: &[FieldElement],
    b_vals: &[FieldElement],
    n: usize,
    x: usize,
    with_eta: bool,
    seed: u64,
) -> Result<LogDomainOutcome> {
    let field = iso.field();
    let s = a_vals.len();
    assert_eq!(s, b_vals.len(), "factor batches must pair up");
    assert_eq!(s + x, n, "need N = S + X");
    let p = iso.aux_prime();
    if p <= n as u64 {
        return Err(Error::FieldTooSmall { min: n as u64, got: p });
    }
    let fp = PrimeField::new(p)?;
    let points: Vec<u64> = (1..=n as u64).collect();

    if !with_eta {
        debug_assert!(
            a_vals.iter().chain(b_vals).all(|v| !v.is_zero()),
            "log-domain retrieval without indicators requires nonzero factors"
        );
    }

    let scalar_mat = |v: u64| {
        let mut m = Matrix::zero(fp, 1, 1);
        m.set(0, 0, v);
        m
    };
    let log_batch = SecretBatch {
        a_mats: a_vals.iter().map(|&v| scalar_mat(iso.log(v))).collect(),
        b_mats: b_vals.iter().map(|&v| scalar_mat(iso.log(v))).collect(),
    };
    let noise = NoiseBatch::generate(fp, s, x, x, (1, 1), (1, 1), sub_seed(seed, 1));
    let shares = general_share(&log_batch, &noise, fp, &points)?;

    let fp_answers: Vec<u64> = (0..n)
        .map(|srv| {
            let mut acc = fp.zero();
            for si in 0..s {
                acc = acc + shares.a_shares[srv][si].get(0, 0);
                acc = acc + shares.b_shares[srv][si].get(0, 0);
            }
            acc.value()
        })
        .collect();

    // One square solve recovers the S log-sums (exponents 1..=S) and the X
    // aggregated noise terms (exponents S+1..=S+X = N).
    let exps: Vec<u64> = (1..=n as u64).collect();
    let coeffs = super::power_matrix(fp, &points, &exps);
    let rhs: Vec<FieldElement> = fp_answers.iter().map(|&v| fp.elem(v)).collect();
    let log_sums = solve_linear_system(&coeffs, &rhs)?;

    let mut eta_answers = vec![Vec::new(); n];
    let mut zero_flags = vec![false; s];
    if with_eta {
        let eta_seed = sub_seed(seed, 2);
        let bits: Vec<u64> = (0..s)
            .flat_map(|si| {
                [
                    u64::from(a_vals[si].is_zero()),
                    u64::from(b_vals[si].is_zero()),
                ]
            })
            .collect();
        for (srv, &point) in points.iter().enumerate() {
            let alpha = fp.elem(point);
            for (bi, &bit) in bits.iter().enumerate() {
                let mut share = alpha * fp.elem(bit);
                for xi in 0..x {
                    let z = keyed_uniform(eta_seed, [bi as u64, xi as u64, 0, 0], p);
                    share = share + alpha.pow(xi as u64 + 2) * fp.elem(z);
                }
                eta_answers[srv].push(share.value());
            }
        }
        // Each bit rides a one-secret share with X noise terms: exponents
        // 1..=X+1, decoded from all N evaluations with a consistency check.
        let bit_exps: Vec<u64> = (1..=(x + 1) as u64).collect();
        let bit_coeffs = super::power_matrix(fp, &points, &bit_exps);
        let bit_rhs: Vec<Vec<u64>> = (0..2 * s)
            .map(|bi| eta_answers.iter().map(|row| row[bi]).collect())
            .collect();
        let decoded = eliminate(&bit_coeffs, &bit_rhs)?;
        for (si, flag) in zero_flags.iter_mut().enumerate() {
            let (ba, bb) = (decoded[2 * si][0], decoded[2 * si + 1][0]);
            if ba > 1 || bb > 1 {
                return Err(Error::InconsistentSystem);
            }
            *flag = ba == 1 || bb == 1;
        }
    }

    let products = (0..s)
        .map(|si| {
            if zero_flags[si] {
                field.zero()
            } else {
                // The log-sum decoded exactly (it is below p), so reducing
                // mod q-1 inside exp lands on the product.
                iso.exp(log_sums[si].value())
            }
        })
        .collect();

    Ok(LogDomainOutcome { fp_answers, eta_answers, products, p })
}

fn require_fully_secured(config: &SdmmConfig, what: &str) -> Result<()> {
    if config.version != SdmmVersion::AbPhi {
        return Err(Error::InvalidConfig(format!(
            "the {what} session covers the fully secured version without side information"
        )));
    }
    Ok(())
}

/// Scalar multiplication session: `L = K = M = 1`, both factors secured,
/// batch `S = N - X`. Downloads one `F_p` symbol plus `2S` indicator shares
/// per server, charged `log_q(p) + 2S log_q(2)`.
///
/// Answer payload layout per server: the `F_p` symbol, then the `2S`
/// indicator shares.
pub fn scalar_mul_session(
    config: &SdmmConfig,
    batch: &SecretBatch,
    seed: u64,
) -> Result<SessionResult> {
    require_fully_secured(config, "scalar")?;
    if (config.l, config.k, config.m) != (1, 1, 1) {
        return Err(Error::InvalidConfig("scalar session needs L = K = M = 1".into()));
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
    let field = config.field();
    let iso = MultIsomorphism::new(field)?;
    let a_vals: Vec<FieldElement> = batch.a_mats.iter().map(|m| m.get(0, 0)).collect();
    let b_vals: Vec<FieldElement> = batch.b_mats.iter().map(|m| m.get(0, 0)).collect();
    let outcome = log_domain_multiply(&iso, &a_vals, &b_vals, config.n, config.x, true, seed)?;

    let mut answers = AnswerSet::new(config.n);
    let mut ledger = DownloadLedger::new(config.q, config.n);
    for srv in 0..config.n {
        answers.push_symbols(srv, std::iter::once(outcome.fp_answers[srv]));
        answers.push_symbols(srv, outcome.eta_answers[srv].iter().copied());
        ledger.charge(
            PayloadCategory::AuxScalars,
            srv,
            QarySymbols::log_term(outcome.p, big_int(1)),
            big_int(1),
        );
        ledger.charge(
            PayloadCategory::ZeroIndicators,
            srv,
            QarySymbols::log_term(2, big_int(2 * s as u64)),
            big_int(2 * s as u64),
        );
    }

    let products: Vec<Matrix> = outcome
        .products
        .iter()
        .map(|&v| {
            let mut m = Matrix::zero(field, 1, 1);
            m.set(0, 0, v.value());
            m
        })
        .collect();
    #[cfg(debug_assertions)]
    for (si, product) in products.iter().enumerate() {
        assert_eq!(
            product.get(0, 0),
            a_vals[si] * b_vals[si],
            "decoded scalar product {si} disagrees with direct multiplication"
        );
    }

    let rate = achieved_rate(&ledger, config, s)?;
    Ok(SessionResult {
        kind: SessionKind::Scalar,
        config: *config,
        batch: s,
        products,
        answers,
        ledger,
        rate,
    })
}

/// Runs the scalar session for every `(a, b)` pair in `F_q^2` and verifies
/// each decoded batch against direct multiplication. Slot 0 carries the
/// pair under test; remaining batch slots are seeded fillers, verified too.
/// Returns the number of pairs checked.
pub fn scalar_exhaustive_check(n: usize, x: usize, q: u64, seed: u64) -> Result<usize> {
    let config = SdmmConfig::new(SdmmVersion::AbPhi, 1, 1, 1, n, x, q)?;
    let s = config.general_batch()?;
    let field = config.field();
    let mut checked = 0;
    for a in 0..q {
        for b in 0..q {
            let scalar_mat = |v: u64| {
                let mut m = Matrix::zero(field, 1, 1);
                m.set(0, 0, v);
                m
            };
            let mut a_mats = vec![scalar_mat(a)];
            let mut b_mats = vec![scalar_mat(b)];
            for si in 1..s {
                a_mats.push(scalar_mat(keyed_uniform(seed, [300, a, b, si as u64], q)));
                b_mats.push(scalar_mat(keyed_uniform(seed, [301, a, b, si as u64], q)));
            }
            let batch = SecretBatch { a_mats, b_mats };
            let result = scalar_mul_session(&config, &batch, sub_seed(seed, a * q + b))?;
            for si in 0..s {
                let expect = batch.a_mats[si].get(0, 0) * batch.b_mats[si].get(0, 0);
                if result.products[si].get(0, 0) != expect {
                    return Err(Error::InconsistentSystem);
                }
            }
            checked += 1;
        }
    }
    Ok(checked)
}

/// Entrywise (Hadamard) product session: both factors are `L x M`, every
/// entry pair runs through its own log-domain instance, and the batch pays
/// `L M (log_q(p) + 2S log_q(2))` per server for `S L M` q-ary units of
/// product entropy. The config's inner dimension `K` plays no part.
///
/// Answer payload layout per server: `L M` `F_p` symbols in cell order,
/// then `2S` indicator shares per cell, cell-major.
pub fn hadamard_session(
    config: &SdmmConfig,
    a_mats: &[Matrix],
    b_mats: &[Matrix],
    seed: u64,
) -> Result<SessionResult> {
    require_fully_secured(config, "entrywise")?;
    let s = config.general_batch()?;
    if a_mats.len() != s || b_mats.len() != s {
        return Err(Error::InvalidConfig(format!(
            "batch of {} secrets, but N = {}, X = {} fixes S = {s}",
            a_mats.len(),
            config.n,
            config.x
        )));
    }
    let field = config.field();
    let (l, m) = (config.l, config.m);
    for mat in a_mats.iter().chain(b_mats) {
        if mat.rows() != l || mat.cols() != m {
            return Err(Error::DimensionMismatch(format!(
                "entrywise factors must all be {l} x {m}, got {} x {}",
                mat.rows(),
                mat.cols()
            )));
        }
        if mat.field() != field {
            return Err(Error::DimensionMismatch("factor field differs from config".into()));
        }
    }
    let iso = MultIsomorphism::new(field)?;

    let cells = l * m;
    let mut products = vec![Matrix::zero(field, l, m); s];
    let mut fp_payload = vec![Vec::with_capacity(cells); config.n];
    let mut eta_payload = vec![Vec::with_capacity(cells * 2 * s); config.n];
    let mut p_seen = 0;
    for cell in 0..cells {
        let (r, c) = (cell / m, cell % m);
        let a_vals: Vec<FieldElement> = a_mats.iter().map(|mat| mat.get(r, c)).collect();
        let b_vals: Vec<FieldElement> = b_mats.iter().map(|mat| mat.get(r, c)).collect();
        let outcome = log_domain_multiply(
            &iso,
            &a_vals,
            &b_vals,
            config.n,
            config.x,
            true,
            sub_seed(seed, (1 << 32) | cell as u64),
        )?;
        p_seen = outcome.p;
        for srv in 0..config.n {
            fp_payload[srv].push(outcome.fp_answers[srv]);
            eta_payload[srv].extend(outcome.eta_answers[srv].iter().copied());
        }
        for (si, product) in products.iter_mut().enumerate() {
            product.set(r, c, outcome.products[si].value());
        }
    }

    let mut answers = AnswerSet::new(config.n);
    let mut ledger = DownloadLedger::new(config.q, config.n);
    for srv in 0..config.n {
        answers.push_symbols(srv, fp_payload[srv].iter().copied());
        answers.push_symbols(srv, eta_payload[srv].iter().copied());
        ledger.charge(
            PayloadCategory::AuxScalars,
            srv,
            QarySymbols::log_term(p_seen, big_int(cells as u64)),
            big_int(cells as u64),
        );
        ledger.charge(
            PayloadCategory::ZeroIndicators,
            srv,
            QarySymbols::log_term(2, big_int((cells * 2 * s) as u64)),
            big_int((cells * 2 * s) as u64),
        );
    }

    #[cfg(debug_assertions)]
    for (si, product) in products.iter().enumerate() {
        let direct = a_mats[si].hadamard(&b_mats[si])?;
        assert_eq!(*product, direct, "decoded entrywise product {si} disagrees");
    }

    let rate = rate_with_numerator(&ledger, (s * l * m) as u64)?;
    Ok(SessionResult {
        kind: SessionKind::Hadamard,
        config: *config,
        batch: s,
        products,
        answers,
        ledger,
        rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::smallest_prime_above;

    fn scalar_config(n: usize, x: usize, q: u64) -> SdmmConfig {
        SdmmConfig::new(SdmmVersion::AbPhi, 1, 1, 1, n, x, q).unwrap()
    }

    fn scalar_batch(field: PrimeField, pairs: &[(u64, u64)]) -> SecretBatch {
        let mat = |v: u64| {
            let mut m = Matrix::zero(field, 1, 1);
            m.set(0, 0, v);
            m
        };
        SecretBatch {
            a_mats: pairs.iter().map(|&(a, _)| mat(a)).collect(),
            b_mats: pairs.iter().map(|&(_, b)| mat(b)).collect(),
        }
    }

    #[test]
    fn worked_scalar_trace() {
        // q = 5, N = 3, X = 1, S = 2, so p = 11. Logs base 2 in F_5:
        // f(2) = 1, f(4) = 2, f(3) = 3, f(1) = 0. The pair (2, 4) decodes
        // through log-sum 3 to 2^3 = 3, and (3, 1) through 3 + 0 to 3.
        let config = scalar_config(3, 1, 5);
        let batch = scalar_batch(config.field(), &[(2, 4), (3, 1)]);
        let result = scalar_mul_session(&config, &batch, 42).unwrap();
        assert_eq!(result.products[0].get(0, 0).value(), 3);
        assert_eq!(result.products[1].get(0, 0).value(), 3);
        // One F_11 symbol and 4 indicator shares per server.
        let lens: Vec<usize> = result.answers.answers.iter().map(|a| a.payload.len()).collect();
        assert_eq!(lens, vec![5, 5, 5]);
    }

    #[test]
    fn zero_factors_are_caught_by_indicators() {
        let config = scalar_config(3, 1, 5);
        for pairs in [[(0, 4), (2, 3)], [(2, 0), (0, 0)], [(1, 1), (0, 2)]] {
            let batch = scalar_batch(config.field(), &pairs);
            let result = scalar_mul_session(&config, &batch, 7).unwrap();
            for (si, &(a, b)) in pairs.iter().enumerate() {
                assert_eq!(result.products[si].get(0, 0).value(), (a * b) % 5);
            }
        }
    }

    #[test]
    fn ledger_charges_match_the_construction() {
        let config = scalar_config(3, 1, 5);
        let batch = scalar_batch(config.field(), &[(2, 4), (3, 1)]);
        let result = scalar_mul_session(&config, &batch, 42).unwrap();
        // Charged: 3 log_5(11) + 12 log_5(2); raw: 3 + 12 F_p symbols.
        let total = result.ledger.total();
        assert!(total.as_exact().is_none());
        let expect = (3.0 * (11f64).ln() + 12.0 * (2f64).ln()) / (5f64).ln();
        assert!((total.to_f64(5) - expect).abs() < 1e-12);
        let raw: Vec<(String, String)> = result
            .ledger
            .entries()
            .iter()
            .map(|e| (e.category.to_string(), e.raw_symbols.to_string()))
            .collect();
        assert_eq!(
            raw,
            vec![
                ("aux-scalars".to_string(), "3".to_string()),
                ("zero-indicators".to_string(), "12".to_string())
            ]
        );
        // Rate is real-valued (log terms) and strictly positive.
        assert!(matches!(result.rate, crate::capacity::RateValue::Real(v) if v > 0.0));
    }

    #[test]
    fn exhaustive_small_fields() {
        // Every (a, b) pair over the three smallest usable fields; the
        // auxiliary prime stays under 4(q-1).
        for q in [3u64, 5, 7] {
            let p = smallest_prime_above(2 * (q - 1));
            assert!(p < 4 * (q - 1) + 1);
            let checked = scalar_exhaustive_check(3, 1, q, 1234).unwrap();
            assert_eq!(checked, (q * q) as usize);
        }
    }

    #[test]
    fn rejects_wrong_shapes_and_versions() {
        let config = SdmmConfig::new(SdmmVersion::BB, 1, 1, 1, 3, 1, 5).unwrap();
        let batch = scalar_batch(config.field(), &[(1, 1), (2, 2)]);
        assert!(scalar_mul_session(&config, &batch, 0).is_err());
        let config = SdmmConfig::new(SdmmVersion::AbPhi, 2, 1, 1, 3, 1, 5).unwrap();
        let batch = SecretBatch::random(&config, 2, 0);
        assert!(scalar_mul_session(&config, &batch, 0).is_err());
    }

    #[test]
    fn entrywise_products_round_trip() {
        let config = SdmmConfig::new(SdmmVersion::AbPhi, 2, 1, 2, 3, 1, 11).unwrap();
        let field = config.field();
        let a0 = Matrix::from_rows(field, &[vec![1, 0], vec![5, 7]]).unwrap();
        let b0 = Matrix::from_rows(field, &[vec![3, 9], vec![0, 4]]).unwrap();
        let a1 = Matrix::from_rows(field, &[vec![10, 2], vec![0, 0]]).unwrap();
        let b1 = Matrix::from_rows(field, &[vec![6, 6], vec![1, 8]]).unwrap();
        let result =
            hadamard_session(&config, &[a0.clone(), a1.clone()], &[b0.clone(), b1.clone()], 5)
                .unwrap();
        assert_eq!(result.products[0], a0.hadamard(&b0).unwrap());
        assert_eq!(result.products[1], a1.hadamard(&b1).unwrap());
        // 4 cells: per server 4 F_p symbols + 4 * 2 * 2 indicator shares.
        assert_eq!(result.answers.answers[0].payload.len(), 4 + 16);
        // Raw download: N * (LM + 2 S LM) F_p symbols.
        let raw: num_rational::BigRational =
            result.ledger.entries().iter().map(|e| e.raw_symbols.clone()).sum();
        assert_eq!(raw, big_int(3 * (4 + 16)));
    }
}
