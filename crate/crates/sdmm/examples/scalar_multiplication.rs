//! Scalar products below one field element per server.
//!
//! For `L = K = M = 1` the products `a_s b_s` carry less than one `F_q`
//! symbol of entropy each, so shipping field elements is wasteful. This
//! scheme moves multiplication into the exponent: discrete logs add, and a
//! sum of two logs fits inside `F_p` for the smallest prime `p > 2(q - 1)`.
//! Zeros have no logarithm, so each factor also contributes one secret-shared
//! indicator bit. The per-server download is `log_q(p) + 2S log_q(2)` q-ary
//! units, below the one-plus units a field element would cost.

use sdmm::field::{MultIsomorphism, PrimeField};
use sdmm::schemes::{scalar_exhaustive_check, scalar_mul_session};
use sdmm::sharing::{SdmmConfig, SdmmVersion, SecretBatch};

fn main() -> Result<(), sdmm::Error> {
    let (n, x, q) = (3, 1, 5);
    let field = PrimeField::new(q)?;
    let iso = MultIsomorphism::new(field)?;
    println!("q = {q}, generator g = {}, auxiliary prime p = {}", iso.generator(), iso.aux_prime());
    println!("log table: {:?}\n", (1..q).map(|a| (a, iso.log(field.elem(a)))).collect::<Vec<_>>());

    let config = SdmmConfig::new(SdmmVersion::AbPhi, 1, 1, 1, n, x, q)?;
    let s = config.general_batch()?;
    println!("N = {n}, X = {x}: batch of S = {s} scalar products per session");

    let batch = SecretBatch::random(&config, s, 3);
    let result = scalar_mul_session(&config, &batch, 3)?;
    for i in 0..s {
        let a = batch.a_mats[i].get(0, 0);
        let b = batch.b_mats[i].get(0, 0);
        let got = result.products[i].get(0, 0);
        println!("  {} * {} = {}", a.value(), b.value(), got.value());
        assert_eq!(got, a * b);
    }
    println!(
        "\nper-server payload: {} symbols ({} F_p value + {} indicator bits)",
        result.transcript()[0].symbols,
        1,
        2 * s
    );
    println!("download charged: {} q-ary units, rate {}", result.ledger.total(), result.rate);

    // Every factor pair in F_q x F_q decodes correctly, zeros included.
    for q in [3u64, 5, 7] {
        let pairs = scalar_exhaustive_check(n, x, q, 99)?;
        println!("exhaustive q={q}: {pairs}/{} pairs correct", q * q);
    }
    Ok(())
}
