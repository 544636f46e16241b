//! Problem configuration and the two share encoders.
//!
//! A configuration names the batch shape (`S` pairs of `L x K` by `K x M`
//! matrices), the server count `N`, the collusion threshold `X`, and the
//! *version* of the problem: which inputs are secured and which factor the
//! user already holds as side information. Two encoders produce the coded
//! shares:
//!
//! * [`general_share`]: Reed-Solomon style sharing. Secret `s` rides on
//!   `alpha^s` and noise term `x` on `alpha^(S+x)`, so each server's answer
//!   block is one evaluation of a polynomial whose low coefficients are the
//!   secrets. Batch size `S = N - max(X_A, X_B)`.
//! * [`csa_share`]: cross-subspace alignment. Shares of `A_s` are polynomials
//!   in `(f_s + alpha)` with constant term `A_s`; shares of `B_s` carry a
//!   `1/(f_s + alpha)` prefactor, so the per-server products align all
//!   interference onto shared monomials. Batch size `S = N - X_A - X_B`.
//!
//! Noise matrices are derived from a 64-bit seed through a keyed splitmix
//! stream, one draw per (side, secret, noise index, cell), so share
//! generation is reproducible and audits can substitute explicit noise.

use crate::field::PrimeField;
use crate::matrix::{eliminate, Matrix};
use crate::{Error, Result};

/// Which factor the user already holds (the side information `psi`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SideInfo {
    None,
    A,
    B,
}

impl std::fmt::Display for SideInfo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SideInfo::None => write!(f, "phi"),
            SideInfo::A => write!(f, "A"),
            SideInfo::B => write!(f, "B"),
        }
    }
}

/// The five canonical problem versions, written `<secured>_<side info>`.
/// `AB_phi` secures both inputs with no side information; `B_A` secures only
/// `B` while the user holds `A`; and so on. Versions that secure only `A`
/// reduce to these by swapping the roles of the factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SdmmVersion {
    AbPhi,
    AbB,
    BPhi,
    BA,
    BB,
}

pub const ALL_VERSIONS: [SdmmVersion; 5] = [
    SdmmVersion::AbPhi,
    SdmmVersion::AbB,
    SdmmVersion::BPhi,
    SdmmVersion::BA,
    SdmmVersion::BB,
];

impl SdmmVersion {
    pub fn secures_a(&self) -> bool {
        matches!(self, SdmmVersion::AbPhi | SdmmVersion::AbB)
    }

    pub fn secures_b(&self) -> bool {
        true
    }

    pub fn side_info(&self) -> SideInfo {
        match self {
            SdmmVersion::AbPhi | SdmmVersion::BPhi => SideInfo::None,
            SdmmVersion::BA => SideInfo::A,
            SdmmVersion::AbB | SdmmVersion::BB => SideInfo::B,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SdmmVersion::AbPhi => "AB_phi",
            SdmmVersion::AbB => "AB_B",
            SdmmVersion::BPhi => "B_phi",
            SdmmVersion::BA => "B_A",
            SdmmVersion::BB => "B_B",
        }
    }
}

impl std::fmt::Display for SdmmVersion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for SdmmVersion {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "ab_phi" => Ok(SdmmVersion::AbPhi),
            "ab_b" => Ok(SdmmVersion::AbB),
            "b_phi" => Ok(SdmmVersion::BPhi),
            "b_a" => Ok(SdmmVersion::BA),
            "b_b" => Ok(SdmmVersion::BB),
            other => Err(Error::InvalidConfig(format!("unknown version '{other}'"))),
        }
    }
}

/// Full problem configuration. `x` is the collusion threshold; the version
/// decides whether it applies to `A`, `B`, or both.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SdmmConfig {
    pub version: SdmmVersion,
    pub l: usize,
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub x: usize,
    pub q: u64,
}

impl SdmmConfig {
    pub fn new(
        version: SdmmVersion,
        l: usize,
        k: usize,
        m: usize,
        n: usize,
        x: usize,
        q: u64,
    ) -> Result<Self> {
        if l == 0 || k == 0 || m == 0 {
            return Err(Error::InvalidConfig("matrix dimensions must be positive".into()));
        }
        if n == 0 {
            return Err(Error::InvalidConfig("need at least one server".into()));
        }
        PrimeField::new(q)?;
        Ok(SdmmConfig { version, l, k, m, n, x, q })
    }

    pub fn field(&self) -> PrimeField {
        PrimeField::new(self.q).expect("validated at construction")
    }

    /// Noise terms protecting `A` (zero when `A` is not secured).
    pub fn x_a(&self) -> usize {
        if self.version.secures_a() {
            self.x
        } else {
            0
        }
    }

    /// Noise terms protecting `B`.
    pub fn x_b(&self) -> usize {
        self.x
    }

    /// Batch size of the Reed-Solomon style code: `S = N - max(X_A, X_B)`.
    pub fn general_batch(&self) -> Result<usize> {
        let x = self.x_a().max(self.x_b());
        if self.n <= x {
            return Err(Error::InvalidConfig(format!(
                "general scheme needs N > X, got N = {}, X = {x}",
                self.n
            )));
        }
        Ok(self.n - x)
    }

    /// Batch size of cross-subspace alignment: `S = N - X_A - X_B`.
    pub fn csa_batch(&self) -> Result<usize> {
        let used = self.x_a() + self.x_b();
        if self.n <= used {
            return Err(Error::InvalidConfig(format!(
                "cross-subspace alignment needs N > X_A + X_B, got N = {}, X_A + X_B = {used}",
                self.n
            )));
        }
        Ok(self.n - used)
    }

    /// Sessions insist on `q > N + S` so the deterministic evaluation points
    /// (and, for alignment, the pole-free alphas) always exist.
    pub fn require_field_size(&self, s: usize) -> Result<()> {
        let min = (self.n + s) as u64;
        if self.q <= min {
            return Err(Error::FieldTooSmall { min, got: self.q });
        }
        Ok(())
    }
}

/// splitmix64 finalizer; the basis of all seeded randomness in this crate.
pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58476D1CE4E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D049BB133111EB);
    z ^= z >> 31;
    z
}

/// Uniform draw from `0..bound` keyed by `(seed, tags)`, via rejection
/// sampling on a splitmix chain. Identical inputs give identical outputs on
/// every platform, which is what makes sessions and CSV output replayable.
pub fn keyed_uniform(seed: u64, tags: [u64; 4], bound: u64) -> u64 {
    assert!(bound > 0, "empty sampling range");
    if bound == 1 {
        return 0;
    }
    let mut state = splitmix64(seed);
    for t in tags {
        state = splitmix64(state ^ t);
    }
    let zone = u64::MAX - u64::MAX % bound;
    let mut counter = 0u64;
    loop {
        let v = splitmix64(state ^ counter.wrapping_mul(0xD1B54A32D192ED03));
        if v < zone {
            return v % bound;
        }
        counter += 1;
    }
}

/// Deterministic uniform matrix keyed by `(seed, tag, index)`.
pub fn random_matrix(
    field: PrimeField,
    rows: usize,
    cols: usize,
    seed: u64,
    tag: u64,
    index: u64,
) -> Matrix {
    let mut m = Matrix::zero(field, rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m.set(
                r,
                c,
                keyed_uniform(seed, [tag, index, r as u64, c as u64], field.order()),
            );
        }
    }
    m
}

/// The `S` secret pairs `(A_s, B_s)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecretBatch {
    pub a_mats: Vec<Matrix>,
    pub b_mats: Vec<Matrix>,
}

impl SecretBatch {
    pub fn new(config: &SdmmConfig, a_mats: Vec<Matrix>, b_mats: Vec<Matrix>) -> Result<Self> {
        if a_mats.len() != b_mats.len() || a_mats.is_empty() {
            return Err(Error::DimensionMismatch(
                "batch needs matching, non-empty A and B lists".into(),
            ));
        }
        for m in &a_mats {
            if (m.rows(), m.cols()) != (config.l, config.k) || m.field() != config.field() {
                return Err(Error::DimensionMismatch(format!(
                    "A secrets must be {}x{} over F_{}",
                    config.l, config.k, config.q
                )));
            }
        }
        for m in &b_mats {
            if (m.rows(), m.cols()) != (config.k, config.m) || m.field() != config.field() {
                return Err(Error::DimensionMismatch(format!(
                    "B secrets must be {}x{} over F_{}",
                    config.k, config.m, config.q
                )));
            }
        }
        Ok(SecretBatch { a_mats, b_mats })
    }

    /// Seeded uniform batch, used by simulations and tests.
    pub fn random(config: &SdmmConfig, s: usize, seed: u64) -> Self {
        let field = config.field();
        SecretBatch {
            a_mats: (0..s)
                .map(|i| random_matrix(field, config.l, config.k, seed, 100, i as u64))
                .collect(),
            b_mats: (0..s)
                .map(|i| random_matrix(field, config.k, config.m, seed, 101, i as u64))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.a_mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a_mats.is_empty()
    }
}

/// Noise matrices: `z[s][x]` protects `A_s`, `z_prime[s][x']` protects `B_s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoiseBatch {
    pub z: Vec<Vec<Matrix>>,
    pub z_prime: Vec<Vec<Matrix>>,
    pub seed: u64,
}

impl NoiseBatch {
    /// Draws all noise from the keyed stream. Stream key layout: side tag
    /// (0 for A-side, 1 for B-side), secret index, noise index, cell.
    #[allow(clippy::too_many_arguments)]
    pub fn generate(
        field: PrimeField,
        s: usize,
        x_a: usize,
        x_b: usize,
        a_shape: (usize, usize),
        b_shape: (usize, usize),
        seed: u64,
    ) -> Self {
        let draw = |side: u64, s_idx: usize, x_idx: usize, (rows, cols): (usize, usize)| {
            let mut m = Matrix::zero(field, rows, cols);
            for r in 0..rows {
                for c in 0..cols {
                    let cell = ((r as u64) << 32) | c as u64;
                    m.set(
                        r,
                        c,
                        keyed_uniform(
                            seed,
                            [side, s_idx as u64, x_idx as u64, cell],
                            field.order(),
                        ),
                    );
                }
            }
            m
        };
        NoiseBatch {
            z: (0..s)
                .map(|si| (0..x_a).map(|xi| draw(0, si, xi, a_shape)).collect())
                .collect(),
            z_prime: (0..s)
                .map(|si| (0..x_b).map(|xi| draw(1, si, xi, b_shape)).collect())
                .collect(),
            seed,
        }
    }

    pub fn for_config(config: &SdmmConfig, s: usize, seed: u64) -> Self {
        NoiseBatch::generate(
            config.field(),
            s,
            config.x_a(),
            config.x_b(),
            (config.l, config.k),
            (config.k, config.m),
            seed,
        )
    }

    /// Explicit noise, for audits that enumerate every assignment.
    pub fn from_parts(z: Vec<Vec<Matrix>>, z_prime: Vec<Vec<Matrix>>) -> Self {
        NoiseBatch { z, z_prime, seed: 0 }
    }
}

/// Which encoder produced a share set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShareScheme {
    General,
    Csa,
}

impl std::fmt::Display for ShareScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ShareScheme::General => write!(f, "general"),
            ShareScheme::Csa => write!(f, "csa"),
        }
    }
}

impl std::str::FromStr for ShareScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "general" => Ok(ShareScheme::General),
            "csa" => Ok(ShareScheme::Csa),
            other => Err(Error::InvalidConfig(format!("unknown share scheme '{other}'"))),
        }
    }
}

/// Coded shares, indexed `[server][secret]`, plus the evaluation geometry
/// needed to decode them again.
#[derive(Clone, Debug)]
pub struct ShareSet {
    pub scheme: ShareScheme,
    pub a_shares: Vec<Vec<Matrix>>,
    pub b_shares: Vec<Vec<Matrix>>,
    pub alphas: Vec<u64>,
    /// Code constants `f_s`; empty for the Reed-Solomon style encoder.
    pub f_consts: Vec<u64>,
    pub x_a: usize,
    pub x_b: usize,
}

impl ShareSet {
    pub fn servers(&self) -> usize {
        self.a_shares.len()
    }

    pub fn batch(&self) -> usize {
        self.a_shares.first().map_or(0, Vec::len)
    }
}

fn check_noise_shape(batch: &SecretBatch, noise: &NoiseBatch) -> Result<(usize, usize)> {
    let s = batch.len();
    if noise.z.len() != s || noise.z_prime.len() != s {
        return Err(Error::DimensionMismatch(
            "noise batch size differs from secret batch size".into(),
        ));
    }
    let x_a = noise.z[0].len();
    let x_b = noise.z_prime[0].len();
    if noise.z.iter().any(|v| v.len() != x_a) || noise.z_prime.iter().any(|v| v.len() != x_b) {
        return Err(Error::DimensionMismatch("ragged noise batch".into()));
    }
    let (a, b) = (&batch.a_mats[0], &batch.b_mats[0]);
    for zs in noise.z.iter().flatten() {
        if (zs.rows(), zs.cols()) != (a.rows(), a.cols()) {
            return Err(Error::DimensionMismatch("A-side noise shape".into()));
        }
    }
    for zs in noise.z_prime.iter().flatten() {
        if (zs.rows(), zs.cols()) != (b.rows(), b.cols()) {
            return Err(Error::DimensionMismatch("B-side noise shape".into()));
        }
    }
    Ok((x_a, x_b))
}

/// Reed-Solomon style encoder. Server `n` receives, for each secret `s`,
///
/// ```text
/// A~_s^n = alpha_n^s A_s + sum_x alpha_n^(S+x) Z_sx
/// B~_s^n = alpha_n^s B_s + sum_x alpha_n^(S+x) Z'_sx
/// ```
///
/// with `s` running 1..=S and `x` running 1..=X over 1-based positions.
/// Requires distinct non-zero alphas and `N = S + max(X_A, X_B)`.
pub fn general_share(
    batch: &SecretBatch,
    noise: &NoiseBatch,
    field: PrimeField,
    alphas: &[u64],
) -> Result<ShareSet> {
    let (x_a, x_b) = check_noise_shape(batch, noise)?;
    let s = batch.len();
    let n = alphas.len();
    if n != s + x_a.max(x_b) {
        return Err(Error::InvalidConfig(format!(
            "need N = S + max(X_A, X_B), got N = {n}, S = {s}, X_A = {x_a}, X_B = {x_b}"
        )));
    }
    let q = field.order();
    let points: Vec<u64> = alphas.iter().map(|&a| a % q).collect();
    for (i, &a) in points.iter().enumerate() {
        if a == 0 {
            return Err(Error::InvalidConfig("evaluation point 0 carries no secret".into()));
        }
        if points[..i].contains(&a) {
            return Err(Error::InvalidConfig(format!("duplicate evaluation point {a}")));
        }
    }

    let encode_side = |mats: &[Matrix], noise_side: &[Vec<Matrix>]| -> Vec<Vec<Matrix>> {
        points
            .iter()
            .map(|&a| {
                let alpha = field.elem(a);
                (0..s)
                    .map(|si| {
                        let mut share = mats[si].scale(alpha.pow(si as u64 + 1));
                        for (xi, z) in noise_side[si].iter().enumerate() {
                            share = &share + &z.scale(alpha.pow((s + xi + 1) as u64));
                        }
                        share
                    })
                    .collect()
            })
            .collect()
    };

    Ok(ShareSet {
        scheme: ShareScheme::General,
        a_shares: encode_side(&batch.a_mats, &noise.z),
        b_shares: encode_side(&batch.b_mats, &noise.z_prime),
        alphas: points,
        f_consts: Vec::new(),
        x_a,
        x_b,
    })
}

/// Cross-subspace alignment encoder. Server `n` receives, for each secret,
///
/// ```text
/// A~_s^n = A_s + sum_x (f_s + alpha_n)^x Z_sx
/// B~_s^n = (f_s + alpha_n)^(-1) (B_s + sum_x (f_s + alpha_n)^x Z'_sx)
/// ```
///
/// The `1/(f_s + alpha_n)` prefactor stays on the B share even with no noise
/// terms, so the per-server product always exposes the Cauchy structure the
/// decoder expects. Requires distinct `f_s`, distinct alphas, no pole hits,
/// and `N = S + X_A + X_B`.
pub fn csa_share(
    batch: &SecretBatch,
    noise: &NoiseBatch,
    field: PrimeField,
    f_consts: &[u64],
    alphas: &[u64],
) -> Result<ShareSet> {
    let (x_a, x_b) = check_noise_shape(batch, noise)?;
    let s = batch.len();
    if f_consts.len() != s {
        return Err(Error::InvalidConfig(format!(
            "need one code constant per secret, got {} for S = {s}",
            f_consts.len()
        )));
    }
    let n = alphas.len();
    if n != s + x_a + x_b {
        return Err(Error::InvalidConfig(format!(
            "need N = S + X_A + X_B, got N = {n}, S = {s}, X_A = {x_a}, X_B = {x_b}"
        )));
    }
    let q = field.order();
    let f_red: Vec<u64> = f_consts.iter().map(|&f| f % q).collect();
    let a_red: Vec<u64> = alphas.iter().map(|&a| a % q).collect();
    for (i, &f) in f_red.iter().enumerate() {
        if f_red[..i].contains(&f) {
            return Err(Error::InvalidConfig(format!("duplicate code constant {f}")));
        }
    }
    for (i, &a) in a_red.iter().enumerate() {
        if a_red[..i].contains(&a) {
            return Err(Error::InvalidConfig(format!("duplicate evaluation point {a}")));
        }
        for &f in &f_red {
            if (a + f) % q == 0 {
                return Err(Error::InvalidConfig(format!(
                    "evaluation point {a} hits the pole of f = {f}"
                )));
            }
        }
    }

    let mut a_shares = Vec::with_capacity(n);
    let mut b_shares = Vec::with_capacity(n);
    for &a in &a_red {
        let alpha = field.elem(a);
        let mut a_row = Vec::with_capacity(s);
        let mut b_row = Vec::with_capacity(s);
        for si in 0..s {
            let beta = field.elem(f_red[si]) + alpha;
            let mut a_share = batch.a_mats[si].clone();
            for (xi, z) in noise.z[si].iter().enumerate() {
                a_share = &a_share + &z.scale(beta.pow(xi as u64 + 1));
            }
            let mut b_inner = batch.b_mats[si].clone();
            for (xi, z) in noise.z_prime[si].iter().enumerate() {
                b_inner = &b_inner + &z.scale(beta.pow(xi as u64 + 1));
            }
            a_row.push(a_share);
            b_row.push(b_inner.scale(beta.inverse()?));
        }
        a_shares.push(a_row);
        b_shares.push(b_row);
    }

    Ok(ShareSet {
        scheme: ShareScheme::Csa,
        a_shares,
        b_shares,
        alphas: a_red,
        f_consts: f_red,
        x_a,
        x_b,
    })
}

/// Which factor's shares to reconstruct.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Recovers secret `s_idx` from its shares across all servers by fitting the
/// declared code: the coefficient system uses every server, so with more
/// equations than unknowns a corrupted share fails the consistency check
/// instead of decoding to a wrong matrix.
pub fn reconstruct_from_shares(shares: &ShareSet, side: Side, s_idx: usize) -> Result<Matrix> {
    let s = shares.batch();
    let n = shares.servers();
    if s_idx >= s {
        return Err(Error::InvalidConfig(format!("no secret {s_idx} in a batch of {s}")));
    }
    let per_secret: Vec<&Matrix> = match side {
        Side::A => shares.a_shares.iter().map(|row| &row[s_idx]).collect(),
        Side::B => shares.b_shares.iter().map(|row| &row[s_idx]).collect(),
    };
    let field = per_secret[0].field();
    let x_side = match side {
        Side::A => shares.x_a,
        Side::B => shares.x_b,
    };
    let (rows, cols) = (per_secret[0].rows(), per_secret[0].cols());
    if rows * cols == 0 {
        return Ok(Matrix::zero(field, rows, cols));
    }

    // Build one coefficient system for all cells of this secret.
    let mut coeffs = Matrix::zero(field, n, x_side + 1);
    let mut values: Vec<Vec<u64>> = vec![Vec::with_capacity(n); rows * cols];
    for (srv, share) in per_secret.iter().enumerate() {
        let alpha = field.elem(shares.alphas[srv]);
        match shares.scheme {
            ShareScheme::General => {
                // Unknowns: [secret, noise_1..noise_X] on monomials
                // alpha^(s+1), alpha^(S+1)..alpha^(S+X).
                coeffs.set(srv, 0, alpha.pow(s_idx as u64 + 1).value());
                for xi in 0..x_side {
                    coeffs.set(srv, xi + 1, alpha.pow((s + xi + 1) as u64).value());
                }
                for (cell, v) in share.values().iter().enumerate() {
                    values[cell].push(*v);
                }
            }
            ShareScheme::Csa => {
                // Polynomial in beta = f_s + alpha with the secret as the
                // constant term; B shares are first cleared of the 1/beta
                // prefactor.
                let beta = field.elem(shares.f_consts[s_idx]) + alpha;
                for xi in 0..=x_side {
                    coeffs.set(srv, xi, beta.pow(xi as u64).value());
                }
                let clear = match side {
                    Side::A => field.one(),
                    Side::B => beta,
                };
                for (cell, v) in share.values().iter().enumerate() {
                    values[cell].push((field.elem(*v) * clear).value());
                }
            }
        }
    }
    let solved = eliminate(&coeffs, &values)?;
    let mut out = Matrix::zero(field, rows, cols);
    for (cell, coefs) in solved.iter().enumerate() {
        out.set(cell / cols, cell % cols, coefs[0]);
    }
    Ok(out)
}
