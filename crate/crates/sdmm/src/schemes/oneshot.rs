//! One-shot multiplication of a single pair through batching: partition `A`
//! into `S' = N - X_A - X_B` row blocks and feed them to one alignment
//! session against a shared `B`.
//!
//! `L` rarely divides `S'`, so the leftover rows (fewer than `S'`) are
//! zero-padded into a second, one-row-per-secret alignment batch. The
//! padding is the entire price of using a batch scheme on a single product:
//! relative to the ideal `N L M / S'` download it wastes at most a factor
//! `S'/L`, which vanishes for tall `A`.

use super::csa::csa_scheme_session;
use super::{sub_seed, AnswerSet, SessionKind, SessionResult};
use crate::capacity::{product_entropy_formula, rate_with_numerator, Conditioning};
use crate::ledger::DownloadLedger;
use crate::matrix::Matrix;
use crate::sharing::{SdmmConfig, SdmmVersion, SecretBatch};
use crate::{Error, Result};

/// Outcome of a one-shot partitioned multiplication.
#[derive(Clone, Debug)]
pub struct PartitionOutput {
    pub product: Matrix,
    pub ledger: DownloadLedger,
    pub rate: crate::capacity::RateValue,
    /// Rows per main-batch block (0 when `L < S'`).
    pub block_rows: usize,
    /// Rows handled by the zero-padded remainder batch.
    pub remainder_rows: usize,
    /// Answers of the underlying alignment sessions, main then remainder.
    pub answers: Vec<AnswerSet>,
}

/// Multiplies one `L x K` by `K x M` pair via partitioned alignment
/// sessions. Both factors are secured (`X` each side); `S' = N - 2X`.
pub fn oneshot_partition_session(
    config: &SdmmConfig,
    a: &Matrix,
    b: &Matrix,
    seed: u64,
) -> Result<PartitionOutput> {
    if config.version != SdmmVersion::AbPhi {
        return Err(Error::InvalidConfig(
            "the one-shot session covers the fully secured version without side information"
                .into(),
        ));
    }
    let s_prime = config.csa_batch()?;
    if (a.rows(), a.cols()) != (config.l, config.k) || (b.rows(), b.cols()) != (config.k, config.m)
    {
        return Err(Error::DimensionMismatch(format!(
            "expected {}x{} times {}x{}, got {}x{} times {}x{}",
            config.l,
            config.k,
            config.k,
            config.m,
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    if a.field() != config.field() || b.field() != config.field() {
        return Err(Error::DimensionMismatch("factor field differs from config".into()));
    }
    let field = config.field();
    let block_rows = config.l / s_prime;
    let main_rows = block_rows * s_prime;
    let remainder_rows = config.l - main_rows;

    let mut ledger = DownloadLedger::new(config.q, config.n);
    let mut answers = Vec::new();
    let mut row_blocks: Vec<Matrix> = Vec::new();

    if block_rows > 0 {
        let sub = SdmmConfig::new(
            SdmmVersion::AbPhi,
            block_rows,
            config.k,
            config.m,
            config.n,
            config.x,
            config.q,
        )?;
        let batch = SecretBatch::new(
            &sub,
            (0..s_prime)
                .map(|i| a.row_slice(i * block_rows, (i + 1) * block_rows))
                .collect(),
            vec![b.clone(); s_prime],
        )?;
        let main = csa_scheme_session(&sub, &batch, sub_seed(seed, 1))?;
        ledger.absorb(&main.ledger);
        row_blocks.extend(main.products);
        answers.push(main.answers);
    }

    if remainder_rows > 0 {
        let sub = SdmmConfig::new(
            SdmmVersion::AbPhi,
            1,
            config.k,
            config.m,
            config.n,
            config.x,
            config.q,
        )?;
        // The last rows of A, padded with zero rows up to a full batch.
        let batch = SecretBatch::new(
            &sub,
            (0..s_prime)
                .map(|i| {
                    if i < remainder_rows {
                        a.row_slice(main_rows + i, main_rows + i + 1)
                    } else {
                        Matrix::zero(field, 1, config.k)
                    }
                })
                .collect(),
            vec![b.clone(); s_prime],
        )?;
        let rest = csa_scheme_session(&sub, &batch, sub_seed(seed, 2))?;
        ledger.absorb(&rest.ledger);
        row_blocks.extend(rest.products.into_iter().take(remainder_rows));
        answers.push(rest.answers);
    }

    let refs: Vec<&Matrix> = row_blocks.iter().collect();
    let product = Matrix::vstack(field, &refs)?;
    #[cfg(debug_assertions)]
    assert_eq!(product, a.matmul(b)?, "stitched product disagrees with direct multiplication");

    let numerator = product_entropy_formula(config.l, config.k, config.m, Conditioning::None);
    let rate = rate_with_numerator(&ledger, numerator)?;
    Ok(PartitionOutput { product, ledger, rate, block_rows, remainder_rows, answers })
}

/// [`oneshot_partition_session`] wrapped as a [`SessionResult`] with a
/// single decoded product.
pub fn oneshot_partition_result(
    config: &SdmmConfig,
    a: &Matrix,
    b: &Matrix,
    seed: u64,
) -> Result<SessionResult> {
    let out = oneshot_partition_session(config, a, b, seed)?;
    let mut merged = AnswerSet::new(config.n);
    for set in &out.answers {
        for answer in &set.answers {
            merged.push_symbols(answer.server, answer.payload.iter().copied());
        }
    }
    Ok(SessionResult {
        kind: SessionKind::Partition,
        config: *config,
        batch: 1,
        products: vec![out.product],
        answers: merged,
        ledger: out.ledger,
        rate: out.rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::RateValue;
    use crate::ledger::{big_int, big_ratio};
    use crate::sharing::random_matrix;

    fn run(l: usize, k: usize, m: usize, n: usize, x: usize, q: u64, seed: u64) -> PartitionOutput {
        let config = SdmmConfig::new(SdmmVersion::AbPhi, l, k, m, n, x, q).unwrap();
        let field = config.field();
        let a = random_matrix(field, l, k, seed, 61, 0);
        let b = random_matrix(field, k, m, seed, 62, 0);
        let out = oneshot_partition_session(&config, &a, &b, seed).unwrap();
        assert_eq!(out.product, a.matmul(&b).unwrap());
        out
    }

    #[test]
    fn worked_partition_with_remainder() {
        // L=5, N=4, X=1: S'=2, main blocks of 2 rows cover 4 rows, one row
        // remains. D = N*2*M + N*1*M = 24 field elements.
        let out = run(5, 3, 2, 4, 1, 11, 3);
        assert_eq!((out.block_rows, out.remainder_rows), (2, 1));
        assert_eq!(out.ledger.total().as_exact(), Some(&big_int(24)));
        // K >= min(L, M), so the pair carries LM = 10 q-ary units.
        assert_eq!(out.rate, RateValue::Exact(big_ratio(10, 24)));
    }

    #[test]
    fn exact_division_skips_the_remainder() {
        let out = run(6, 2, 3, 4, 1, 11, 5);
        assert_eq!((out.block_rows, out.remainder_rows), (3, 0));
        assert_eq!(out.answers.len(), 1);
        assert_eq!(out.ledger.total().as_exact(), Some(&big_int(4 * 3 * 3)));
    }

    #[test]
    fn short_matrices_use_only_the_padded_batch() {
        // L = 1 < S' = 2: everything goes through the remainder path.
        let out = run(1, 4, 3, 4, 1, 11, 8);
        assert_eq!((out.block_rows, out.remainder_rows), (0, 1));
        assert_eq!(out.ledger.total().as_exact(), Some(&big_int(4 * 3)));
    }

    #[test]
    fn padding_overhead_stays_below_s_prime_over_l() {
        for (l, n, x) in [(5, 4, 1), (7, 5, 1), (9, 7, 2), (4, 4, 1), (3, 5, 2)] {
            let out = run(l, 2, 2, n, x, 101, 1);
            let s_prime = (n - 2 * x) as f64;
            let ideal = (n * l * 2) as f64 / s_prime;
            let overhead = out.ledger.total_f64() / ideal - 1.0;
            assert!(
                overhead <= s_prime / l as f64 + 1e-9,
                "overhead {overhead} exceeds S'/L at L={l}, N={n}, X={x}"
            );
        }
    }

    #[test]
    fn grid_of_shapes_round_trips() {
        for l in 1..=7 {
            for (k, m) in [(1, 1), (3, 2)] {
                let _ = run(l, k, m, 5, 1, 101, 21);
            }
        }
    }
}
