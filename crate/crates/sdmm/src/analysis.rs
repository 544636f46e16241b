//! Empirical verification: security audits, finite-field entropy
//! measurements, and rate-versus-capacity sweeps.
//!
//! Everything here checks claims the rest of the crate makes by
//! construction. The audit does not trust the encoders' algebra: it
//! enumerates every secret and noise assignment, tallies the joint
//! distribution of secrets and colluding shares, and reports mutual
//! information straight from the counts, flagging exact independence with
//! an integer identity rather than a float threshold. The entropy probe
//! measures how much information a product actually carries at finite field
//! size, which is what separates the asymptotic rate formulas from what a
//! finite session delivers.
//!
//! Exhaustive enumeration is kept honest by an explicit state budget; runs
//! that would exceed it are refused with [`Error::EnumerationBudget`]
//! instead of silently sampling.

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;

use crate::capacity::{
    product_entropy_formula, sdmm_capacity, CapacityStatus, Conditioning, LimitFlags, RateValue,
    RequestedVersion,
};
use crate::matrix::Matrix;
use crate::schemes::{csa_scheme_session, general_scheme_session, sub_seed};
use crate::sharing::{
    csa_share, general_share, keyed_uniform, NoiseBatch, SdmmConfig, SdmmVersion, SecretBatch,
    ShareScheme,
};
use crate::{Error, Result};

/// Default ceiling on exhaustively enumerated states.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 100_000_000;

/// Refuses enumerations of `base^exponent` states beyond `budget`.
fn check_budget(base: u64, exponent: u32, budget: u64) -> Result<u64> {
    let log_states = exponent as f64 * (base as f64).ln();
    if log_states > (budget as f64).ln() + 1e-9 {
        return Err(Error::EnumerationBudget {
            base,
            exponent,
            approx: log_states.exp(),
            budget,
        });
    }
    let mut states: u64 = 1;
    for _ in 0..exponent {
        states = states.saturating_mul(base);
    }
    Ok(states)
}

/// Counts through all `base^len` digit vectors.
struct Odometer {
    digits: Vec<u64>,
    base: u64,
}

impl Odometer {
    fn new(len: usize, base: u64) -> Self {
        Odometer { digits: vec![0; len], base }
    }

    fn values(&self) -> &[u64] {
        &self.digits
    }

    /// Advances to the next assignment; false once all have been visited.
    fn advance(&mut self) -> bool {
        for d in self.digits.iter_mut() {
            *d += 1;
            if *d < self.base {
                return true;
            }
            *d = 0;
        }
        false
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return Vec::new();
    }
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Mutual information between the secrets and one server subset's stored
/// shares, measured from exhaustive counts.
#[derive(Clone, Debug)]
pub struct SubsetFinding {
    pub servers: Vec<usize>,
    /// In q-ary units.
    pub mutual_information: f64,
    /// True when the counts satisfy exact independence as integers:
    /// `count(x, y) * total == count(x) * count(y)` for every pair.
    pub exactly_zero: bool,
}

/// Result of a collusion audit at one subset size.
#[derive(Clone, Debug)]
pub struct AuditReport {
    pub config: SdmmConfig,
    pub scheme: ShareScheme,
    pub subset_size: usize,
    /// Assignments enumerated per subset.
    pub states: u64,
    pub findings: Vec<SubsetFinding>,
}

impl AuditReport {
    /// True when every audited subset saw exactly nothing.
    pub fn all_exactly_zero(&self) -> bool {
        self.findings.iter().all(|f| f.exactly_zero)
    }
}

/// Enumerates every (secrets, noise) assignment, encodes it with the real
/// encoder, and measures what each subset of `subset_size` servers learns
/// about the secrets from its stored shares.
///
/// The enumeration covers `q^(secret cells + noise cells)` states and is
/// refused beyond `budget`. Noise varies innermost, so each secret
/// assignment's share distribution accumulates contiguously.
pub fn audit_collusion(
    config: &SdmmConfig,
    scheme: ShareScheme,
    subset_size: usize,
    budget: u64,
    ) -> Result<AuditReport> {
    if subset_size > config.n {
        return Err(Error::InvalidConfig(format!(
            "subset of {subset_size} servers out of {}",
            config.n
        )));
    }
    let s = match scheme {
        ShareScheme::General => config.general_batch()?,
        ShareScheme::Csa => config.csa_batch()?,
    };
    let field = config.field();
    let q = config.q;
    let (a_cells, b_cells) = (config.l * config.k, config.k * config.m);
    let secret_cells = s * (a_cells + b_cells);
    let noise_cells = s * (config.x_a() * a_cells + config.x_b() * b_cells);
    let states = check_budget(q, (secret_cells + noise_cells) as u32, budget)?;
    let noise_states = {
        let mut acc: u64 = 1;
        for _ in 0..noise_cells {
            acc *= q;
        }
        acc
    };

    // Share geometry mirrors the sessions: points 1..=N, and for alignment
    // the N smallest pole-free points with f_s = s. Feasibility (enough
    // distinct points in F_q) is the only field-size requirement here.
    let alphas: Vec<u64> = match scheme {
        ShareScheme::General => {
            if q <= config.n as u64 {
                return Err(Error::FieldTooSmall { min: config.n as u64, got: q });
            }
            (1..=config.n as u64).collect()
        }
        ShareScheme::Csa => {
            crate::schemes::csa_alphas(q, &(1..=s as u64).collect::<Vec<_>>(), config.n)?
        }
    };
    let f_consts: Vec<u64> = (1..=s as u64).collect();

    let fill_mats = |values: &[u64], per_mat: &[(usize, usize)]| -> Vec<Matrix> {
        let mut mats = Vec::with_capacity(per_mat.len());
        let mut offset = 0;
        for &(rows, cols) in per_mat {
            let mut mat = Matrix::zero(field, rows, cols);
            for r in 0..rows {
                for c in 0..cols {
                    mat.set(r, c, values[offset]);
                    offset += 1;
                }
            }
            mats.push(mat);
        }
        mats
    };
    let a_shapes = vec![(config.l, config.k); s];
    let b_shapes = vec![(config.k, config.m); s];

    let mut findings = Vec::new();
    for subset in combinations(config.n, subset_size) {
        let mut y_counts: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
        let mut xy_counts: BTreeMap<(u64, Vec<u64>), u64> = BTreeMap::new();

        let mut secrets = Odometer::new(secret_cells, q);
        let mut xs: u64 = 0;
        loop {
            let secret_vals = secrets.values();
            let batch = SecretBatch {
                a_mats: fill_mats(&secret_vals[..s * a_cells], &a_shapes),
                b_mats: fill_mats(&secret_vals[s * a_cells..], &b_shapes),
            };
            let mut noise_odo = Odometer::new(noise_cells, q);
            loop {
                let noise_vals = noise_odo.values();
                let (za, zb) = noise_vals.split_at(s * config.x_a() * a_cells);
                let z: Vec<Vec<Matrix>> = (0..s)
                    .map(|si| {
                        fill_mats(
                            &za[si * config.x_a() * a_cells..(si + 1) * config.x_a() * a_cells],
                            &vec![(config.l, config.k); config.x_a()],
                        )
                    })
                    .collect();
                let z_prime: Vec<Vec<Matrix>> = (0..s)
                    .map(|si| {
                        fill_mats(
                            &zb[si * config.x_b() * b_cells..(si + 1) * config.x_b() * b_cells],
                            &vec![(config.k, config.m); config.x_b()],
                        )
                    })
                    .collect();
                let noise = NoiseBatch::from_parts(z, z_prime);
                let shares = match scheme {
                    ShareScheme::General => general_share(&batch, &noise, field, &alphas)?,
                    ShareScheme::Csa => csa_share(&batch, &noise, field, &f_consts, &alphas)?,
                };
                let mut observed = Vec::new();
                for &srv in &subset {
                    for si in 0..s {
                        observed.extend_from_slice(shares.a_shares[srv][si].values());
                        observed.extend_from_slice(shares.b_shares[srv][si].values());
                    }
                }
                *y_counts.entry(observed.clone()).or_insert(0) += 1;
                *xy_counts.entry((xs, observed)).or_insert(0) += 1;
                if !noise_odo.advance() {
                    break;
                }
            }
            xs += 1;
            if !secrets.advance() {
                break;
            }
        }

        // Every secret assignment occurs exactly noise_states times, by
        // construction of the enumeration.
        let c_x = noise_states;
        let total = states;
        let mut exactly_zero = true;
        let mut mi_nats = 0.0;
        for ((_, y), &c_xy) in &xy_counts {
            let c_y = y_counts[y];
            if (c_xy as u128) * (total as u128) != (c_x as u128) * (c_y as u128) {
                exactly_zero = false;
            }
            mi_nats += (c_xy as f64 / total as f64)
                * ((total as f64 * c_xy as f64) / (c_x as f64 * c_y as f64)).ln();
        }
        let mutual_information = if exactly_zero { 0.0 } else { mi_nats / (q as f64).ln() };
        findings.push(SubsetFinding { servers: subset, mutual_information, exactly_zero });
    }

    Ok(AuditReport { config: *config, scheme, subset_size, states, findings })
}

/// Product alphabet for entropy measurements: a prime field, or a binary
/// extension field `GF(2^m)` used when callers want power-of-two sizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductAlphabet {
    Prime(u64),
    Binary(u32),
}

impl ProductAlphabet {
    /// Interprets a raw size: primes stay prime fields, powers of two
    /// become binary fields, anything else is rejected.
    pub fn from_size(q: u64) -> Result<Self> {
        if crate::field::is_prime(q) {
            return Ok(ProductAlphabet::Prime(q));
        }
        if q >= 2 && q.is_power_of_two() {
            return ProductAlphabet::binary(q.trailing_zeros());
        }
        Err(Error::InvalidConfig(format!(
            "alphabet size {q} is neither prime nor a power of two"
        )))
    }

    pub fn binary(degree: u32) -> Result<Self> {
        if !(1..=8).contains(&degree) {
            return Err(Error::InvalidConfig(format!(
                "binary field degree {degree} unsupported (1..=8)"
            )));
        }
        Ok(ProductAlphabet::Binary(degree))
    }

    pub fn size(&self) -> u64 {
        match self {
            ProductAlphabet::Prime(q) => *q,
            ProductAlphabet::Binary(m) => 1 << m,
        }
    }
}

/// Carryless multiplication in `GF(2^m)`, reduced by a fixed irreducible
/// polynomial per degree (degree 6 uses `x^6 + x + 1`).
fn gf2m_mul(mut a: u64, mut b: u64, degree: u32) -> u64 {
    // Irreducible polynomials, bit `m` included, for m = 1..=8.
    const POLYS: [u64; 9] = [0, 0b11, 0b111, 0b1011, 0b10011, 0b100101, 0b1000011, 0b10000011, 0b100011011];
    let poly = POLYS[degree as usize];
    let mut acc = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if (a >> degree) & 1 == 1 {
            a ^= poly;
        }
    }
    acc
}

/// How to traverse the factor space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntropyMode {
    /// Visit all `q^(LK + KM)` factor pairs; refused beyond the budget.
    Exhaustive,
    /// Draw this many seeded uniform pairs instead.
    Sampled(u64),
}

/// Measured entropy of a matrix product at finite field size.
#[derive(Clone, Debug)]
pub struct EntropyReport {
    pub l: usize,
    pub k: usize,
    pub m: usize,
    pub q: u64,
    /// Plug-in entropy of `A B` in q-ary units.
    pub entropy: f64,
    /// The large-field formula value for the same shape.
    pub asymptotic: u64,
    /// `asymptotic - entropy`; small-field effects can push it either way.
    pub gap: f64,
    /// Factor pairs visited.
    pub states: u64,
    pub exhaustive: bool,
}

/// Measures the entropy of `A B` for uniform `L x K` and `K x M` factors
/// over the given alphabet, by counting products.
pub fn measure_product_entropy(
    l: usize,
    k: usize,
    m: usize,
    alphabet: ProductAlphabet,
    mode: EntropyMode,
    budget: u64,
    seed: u64,
) -> Result<EntropyReport> {
    if l == 0 || k == 0 || m == 0 {
        return Err(Error::InvalidConfig("matrix dimensions must be positive".into()));
    }
    let q = alphabet.size();
    let cells = l * k + k * m;
    if (l * m) as u32 * (64 - q.leading_zeros()) > 127 {
        return Err(Error::InvalidConfig("product alphabet too large to index".into()));
    }
    let mul = |a: u64, b: u64| -> u64 {
        match alphabet {
            ProductAlphabet::Prime(p) => ((a as u128 * b as u128) % p as u128) as u64,
            ProductAlphabet::Binary(deg) => gf2m_mul(a, b, deg),
        }
    };
    let add = |a: u64, b: u64| -> u64 {
        match alphabet {
            ProductAlphabet::Prime(p) => (a + b) % p,
            ProductAlphabet::Binary(_) => a ^ b,
        }
    };

    let product_key = |vals: &[u64]| -> u128 {
        let mut prod = vec![0u64; l * m];
        let (a, b) = vals.split_at(l * k);
        for i in 0..l {
            for j in 0..m {
                let mut acc = 0;
                for t in 0..k {
                    acc = add(acc, mul(a[i * k + t], b[t * m + j]));
                }
                prod[i * m + j] = acc;
            }
        }
        prod.iter().fold(0u128, |key, &v| key * q as u128 + v as u128)
    };

    let mut counts: HashMap<u128, u64> = HashMap::new();
    let states = match mode {
        EntropyMode::Exhaustive => {
            let states = check_budget(q, cells as u32, budget)?;
            let mut odo = Odometer::new(cells, q);
            loop {
                *counts.entry(product_key(odo.values())).or_insert(0) += 1;
                if !odo.advance() {
                    break;
                }
            }
            states
        }
        EntropyMode::Sampled(samples) => {
            if samples == 0 {
                return Err(Error::InvalidConfig("need at least one sample".into()));
            }
            let mut vals = vec![0u64; cells];
            for i in 0..samples {
                for (c, v) in vals.iter_mut().enumerate() {
                    *v = keyed_uniform(seed, [400, i, c as u64, 0], q);
                }
                *counts.entry(product_key(&vals)).or_insert(0) += 1;
            }
            samples
        }
    };

    // Accumulate in key order so the float result is reproducible.
    let mut sorted: Vec<(u128, u64)> = counts.into_iter().collect();
    sorted.sort_unstable_by_key(|&(key, _)| key);
    let total = states as f64;
    let sum_c_ln_c: f64 = sorted.iter().map(|&(_, c)| c as f64 * (c as f64).ln()).sum();
    let entropy = (total.ln() - sum_c_ln_c / total) / (q as f64).ln();
    let asymptotic = product_entropy_formula(l, k, m, Conditioning::None);

    Ok(EntropyReport {
        l,
        k,
        m,
        q,
        entropy,
        asymptotic,
        gap: asymptotic as f64 - entropy,
        states,
        exhaustive: matches!(mode, EntropyMode::Exhaustive),
    })
}

/// One grid point of a rate sweep.
#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub version: SdmmVersion,
    pub scheme: ShareScheme,
    pub l: usize,
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub x: usize,
    pub q: u64,
    pub flags: LimitFlags,
}

impl SweepPoint {
    pub fn new(
        version: SdmmVersion,
        scheme: ShareScheme,
        (l, k, m): (usize, usize, usize),
        n: usize,
        x: usize,
        q: u64,
    ) -> Self {
        SweepPoint { version, scheme, l, k, m, n, x, q, flags: LimitFlags::none() }
    }

    pub fn with_flags(mut self, flags: LimitFlags) -> Self {
        self.flags = flags;
        self
    }
}

/// One row of sweep output: the rate a real session achieved next to the
/// capacity statement for the same point.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub point: SweepPoint,
    pub batch: usize,
    pub rate: RateValue,
    pub capacity: BigRational,
    pub status: CapacityStatus,
    pub regime: String,
    /// True when the capacity is exact and the session achieves it on the
    /// nose.
    pub matched: bool,
}

/// Runs a session at every point and pairs the achieved rate with the
/// capacity statement.
pub fn sweep_rate_vs_capacity(points: &[SweepPoint], seed: u64) -> Result<Vec<SweepRow>> {
    points
        .iter()
        .enumerate()
        .map(|(i, point)| {
            let config =
                SdmmConfig::new(point.version, point.l, point.k, point.m, point.n, point.x, point.q)?;
            let session_seed = sub_seed(seed, i as u64);
            let result = match point.scheme {
                ShareScheme::General => {
                    let s = config.general_batch()?;
                    general_scheme_session(
                        &config,
                        &SecretBatch::random(&config, s, session_seed),
                        session_seed,
                    )?
                }
                ShareScheme::Csa => {
                    let s = config.csa_batch()?;
                    csa_scheme_session(
                        &config,
                        &SecretBatch::random(&config, s, session_seed),
                        session_seed,
                    )?
                }
            };
            let cap = sdmm_capacity(
                RequestedVersion::Canonical(point.version),
                point.l,
                point.k,
                point.m,
                point.n,
                point.x,
                &point.flags,
            )?;
            let matched = cap.status == CapacityStatus::Exact
                && result.rate.as_exact() == Some(&cap.value);
            Ok(SweepRow {
                point: point.clone(),
                batch: result.batch,
                rate: result.rate,
                capacity: cap.value,
                status: cap.status,
                regime: cap.regime,
                matched,
            })
        })
        .collect()
}

/// A representative grid: every version, both encoders, regimes that hit
/// capacity exactly and regimes that leave a gap.
pub fn default_sweep_grid() -> Vec<SweepPoint> {
    use crate::capacity::DimLimit;
    use SdmmVersion::*;
    use ShareScheme::*;
    vec![
        // Rows that land exactly on known capacity.
        SweepPoint::new(BA, General, (2, 2, 2), 4, 1, 11),
        SweepPoint::new(BA, Csa, (2, 2, 2), 5, 1, 11),
        SweepPoint::new(AbB, General, (2, 2, 3), 4, 1, 11),
        SweepPoint::new(BB, General, (2, 2, 3), 4, 1, 11),
        SweepPoint::new(AbPhi, Csa, (2, 3, 2), 6, 1, 13)
            .with_flags(LimitFlags::from_flags(&[DimLimit::KOverMinLm])),
        SweepPoint::new(AbPhi, Csa, (2, 3, 2), 8, 2, 17)
            .with_flags(LimitFlags::from_flags(&[DimLimit::KOverMinLm])),
        // Rows below an exact capacity.
        SweepPoint::new(AbPhi, General, (3, 1, 3), 4, 1, 11),
        SweepPoint::new(AbPhi, Csa, (1, 1, 1), 3, 1, 7),
        SweepPoint::new(BPhi, General, (2, 3, 2), 4, 1, 11),
        SweepPoint::new(BA, General, (3, 2, 2), 5, 2, 11),
        // Rows against upper bounds only.
        SweepPoint::new(BB, Csa, (2, 4, 2), 5, 1, 11),
        SweepPoint::new(AbB, Csa, (2, 3, 1), 6, 1, 13),
        SweepPoint::new(AbPhi, General, (2, 2, 2), 4, 1, 11),
        SweepPoint::new(AbB, General, (2, 4, 2), 6, 2, 17),
        // An open regime, reported as such.
        SweepPoint::new(BPhi, General, (3, 1, 2), 4, 1, 11),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn audit_config(version: SdmmVersion, n: usize, x: usize, q: u64) -> SdmmConfig {
        SdmmConfig::new(version, 1, 1, 1, n, x, q).unwrap()
    }

    #[test]
    fn single_servers_learn_exactly_nothing() {
        // General encoder: N = 2, S = 1, X = 1. Alignment: N = 3, S = 1.
        for q in [3u64, 5] {
            let report = audit_collusion(
                &audit_config(SdmmVersion::AbPhi, 2, 1, q),
                ShareScheme::General,
                1,
                DEFAULT_ENUMERATION_BUDGET,
            )
            .unwrap();
            assert_eq!(report.findings.len(), 2);
            assert!(report.all_exactly_zero(), "general q={q}");
            assert!(report.findings.iter().all(|f| f.mutual_information == 0.0));
        }
        let report = audit_collusion(
            &audit_config(SdmmVersion::AbPhi, 3, 1, 5),
            ShareScheme::Csa,
            1,
            DEFAULT_ENUMERATION_BUDGET,
        )
        .unwrap();
        assert_eq!(report.findings.len(), 3);
        assert!(report.all_exactly_zero(), "csa q=5");
    }

    #[test]
    fn all_servers_together_learn_plenty() {
        let report = audit_collusion(
            &audit_config(SdmmVersion::AbPhi, 2, 1, 3),
            ShareScheme::General,
            2,
            DEFAULT_ENUMERATION_BUDGET,
        )
        .unwrap();
        assert_eq!(report.findings.len(), 1);
        let finding = &report.findings[0];
        assert!(!finding.exactly_zero);
        // Two evaluations of a degree-2 polynomial pin down both secrets:
        // the shares carry the full H(A, B) = 2 q-ary units.
        assert!((finding.mutual_information - 2.0).abs() < 1e-9);
    }

    #[test]
    fn budget_refusal_is_a_distinct_error() {
        let config = SdmmConfig::new(SdmmVersion::AbPhi, 3, 3, 3, 6, 2, 101).unwrap();
        let err = audit_collusion(&config, ShareScheme::General, 1, DEFAULT_ENUMERATION_BUDGET)
            .unwrap_err();
        assert!(matches!(err, Error::EnumerationBudget { .. }));
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn unsecured_side_is_reported_leaky() {
        // B_B leaves A unprotected (X_A = 0): one server's stored A share
        // is A itself, so a singleton subset must show positive leakage.
        let report = audit_collusion(
            &audit_config(SdmmVersion::BB, 2, 1, 3),
            ShareScheme::General,
            1,
            DEFAULT_ENUMERATION_BUDGET,
        )
        .unwrap();
        assert!(!report.all_exactly_zero());
    }

    #[test]
    fn binary_field_multiplication_tables() {
        // GF(4): x * x = x + 1, x * (x + 1) = 1.
        assert_eq!(gf2m_mul(2, 2, 2), 3);
        assert_eq!(gf2m_mul(2, 3, 2), 1);
        // GF(64) with x^6 + x + 1: x^5 * x = x^6 = x + 1.
        assert_eq!(gf2m_mul(32, 2, 6), 3);
        // x^6 + x + 1 is primitive: powers of x cycle through all 63
        // nonzero elements.
        let mut seen = std::collections::BTreeSet::new();
        let mut v = 1u64;
        for _ in 0..63 {
            v = gf2m_mul(v, 2, 6);
            seen.insert(v);
        }
        assert_eq!(seen.len(), 63);
        assert_eq!(v, 1);
        // Field laws on all of GF(8): commutativity, associativity,
        // distributivity over xor.
        for a in 0..8u64 {
            for b in 0..8 {
                assert_eq!(gf2m_mul(a, b, 3), gf2m_mul(b, a, 3));
                for c in 0..8 {
                    assert_eq!(
                        gf2m_mul(a, gf2m_mul(b, c, 3), 3),
                        gf2m_mul(gf2m_mul(a, b, 3), c, 3)
                    );
                    assert_eq!(
                        gf2m_mul(a, b ^ c, 3),
                        gf2m_mul(a, b, 3) ^ gf2m_mul(a, c, 3)
                    );
                }
            }
        }
    }

    #[test]
    fn scalar_entropy_matches_the_closed_form() {
        // For L = K = M = 1 the product distribution is known exactly:
        // P(0) = (2q - 1)/q^2 and each nonzero value gets (q - 1)/q^2.
        for q in [5u64, 17] {
            let report = measure_product_entropy(
                1,
                1,
                1,
                ProductAlphabet::Prime(q),
                EntropyMode::Exhaustive,
                DEFAULT_ENUMERATION_BUDGET,
                0,
            )
            .unwrap();
            let qf = q as f64;
            let p0 = (2.0 * qf - 1.0) / (qf * qf);
            let pc = (qf - 1.0) / (qf * qf);
            let expect = -(p0 * p0.ln() + (qf - 1.0) * pc * pc.ln()) / qf.ln();
            assert!((report.entropy - expect).abs() < 1e-12, "q={q}");
            assert!(report.gap > 0.0);
        }
    }

    #[test]
    fn entropy_gap_shrinks_along_the_q_ladder() {
        let mut last_gap = f64::INFINITY;
        for q in [5u64, 17, 67] {
            let report = measure_product_entropy(
                1,
                1,
                1,
                ProductAlphabet::Prime(q),
                EntropyMode::Exhaustive,
                DEFAULT_ENUMERATION_BUDGET,
                0,
            )
            .unwrap();
            assert!(report.gap < last_gap);
            last_gap = report.gap;
        }
        assert!(last_gap < 0.01);
    }

    #[test]
    fn binary_alphabet_parsing() {
        assert_eq!(ProductAlphabet::from_size(64).unwrap(), ProductAlphabet::Binary(6));
        assert_eq!(ProductAlphabet::from_size(13).unwrap(), ProductAlphabet::Prime(13));
        assert_eq!(ProductAlphabet::from_size(2).unwrap(), ProductAlphabet::Prime(2));
        assert!(ProductAlphabet::from_size(12).is_err());
        assert!(ProductAlphabet::from_size(512).is_err());
    }

    #[test]
    fn sampled_mode_tracks_exhaustive_on_small_fields() {
        let exact = measure_product_entropy(
            1,
            1,
            1,
            ProductAlphabet::Prime(5),
            EntropyMode::Exhaustive,
            DEFAULT_ENUMERATION_BUDGET,
            0,
        )
        .unwrap();
        let sampled = measure_product_entropy(
            1,
            1,
            1,
            ProductAlphabet::Prime(5),
            EntropyMode::Sampled(200_000),
            DEFAULT_ENUMERATION_BUDGET,
            42,
        )
        .unwrap();
        assert!((exact.entropy - sampled.entropy).abs() < 0.01);
        assert!(!sampled.exhaustive);
    }

    #[test]
    fn entropy_budget_refusal() {
        let err = measure_product_entropy(
            3,
            3,
            3,
            ProductAlphabet::Prime(101),
            EntropyMode::Exhaustive,
            DEFAULT_ENUMERATION_BUDGET,
            0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::EnumerationBudget { .. }));
    }

    #[test]
    fn sweep_grid_runs_and_never_exceeds_capacity() {
        let rows = sweep_rate_vs_capacity(&default_sweep_grid(), 7).unwrap();
        assert_eq!(rows.len(), default_sweep_grid().len());
        let mut matched = 0;
        for row in &rows {
            let rate = row.rate.to_f64();
            let cap = row.capacity.to_f64().unwrap();
            assert!(
                rate <= cap + 1e-9,
                "rate {rate} exceeds capacity {cap} at {:?}",
                row.point
            );
            if row.matched {
                matched += 1;
                assert_eq!(row.status, CapacityStatus::Exact);
            }
        }
        assert!(matched >= 5, "expected several capacity-achieving rows, got {matched}");
    }

    #[test]
    fn sweep_is_deterministic() {
        let a = sweep_rate_vs_capacity(&default_sweep_grid(), 7).unwrap();
        let b = sweep_rate_vs_capacity(&default_sweep_grid(), 7).unwrap();
        for (ra, rb) in a.iter().zip(&b) {
            assert_eq!(format!("{}", ra.rate), format!("{}", rb.rate));
            assert_eq!(ra.matched, rb.matched);
        }
    }
}
