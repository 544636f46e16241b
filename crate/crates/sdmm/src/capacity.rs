//! Capacity values, converse bounds, and rate accounting.
//!
//! Capacity here is the supremum, over growing field size, of decoded
//! product entropy per downloaded q-ary symbol. For each version of the
//! problem the known results split into regimes: some have matching
//! achievability and converse (exact), some only a converse (upper bound
//! only), some collapse to zero, and a few are genuinely uncharacterized
//! (open). The calculator reports which regime fired and never silently
//! substitutes a guess for an open value.
//!
//! All bound arithmetic is exact rational; geometric series are summed term
//! by term rather than through closed forms, so no rounding enters before
//! the caller asks for a decimal.

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::ledger::{big_int, big_ratio, DownloadLedger};
use crate::sharing::{SdmmConfig, SdmmVersion, SideInfo};
use crate::{Error, Result};

/// What the user already knows when entropy of the products is assessed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Conditioning {
    None,
    OnA,
    OnB,
}

impl From<SideInfo> for Conditioning {
    fn from(psi: SideInfo) -> Self {
        match psi {
            SideInfo::None => Conditioning::None,
            SideInfo::A => Conditioning::OnA,
            SideInfo::B => Conditioning::OnB,
        }
    }
}

/// Large-field entropy of one product `A B` (uniform `L x K` by `K x M`
/// factors), in q-ary units:
///
/// * unconditioned: `L M` if `K >= min(L, M)`, else `L K + K M - K^2`
/// * given `A`: `min(L M, K M)`
/// * given `B`: `min(L M, L K)`
pub fn product_entropy_formula(l: usize, k: usize, m: usize, cond: Conditioning) -> u64 {
    let (l, k, m) = (l as u64, k as u64, m as u64);
    match cond {
        Conditioning::None => {
            if k >= l.min(m) {
                l * m
            } else {
                l * k + k * m - k * k
            }
        }
        Conditioning::OnA => (l * m).min(k * m),
        Conditioning::OnB => (l * m).min(l * k),
    }
}

/// A rate: exact rational when the download total is rational, otherwise a
/// real number (log terms evaluated once, at the end).
#[derive(Clone, Debug, PartialEq)]
pub enum RateValue {
    Exact(BigRational),
    Real(f64),
}

impl RateValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            RateValue::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            RateValue::Real(v) => *v,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            RateValue::Exact(r) => Some(r),
            RateValue::Real(_) => None,
        }
    }
}

impl std::fmt::Display for RateValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RateValue::Exact(r) => write!(f, "{r}"),
            RateValue::Real(v) => write!(f, "{v:.12}"),
        }
    }
}

/// Rate of a download against an explicit entropy numerator (q-ary units).
/// Exact when the ledger total is log-free, real otherwise.
pub fn rate_with_numerator(ledger: &DownloadLedger, numerator: u64) -> Result<RateValue> {
    let total = ledger.total();
    if total.is_zero() {
        return Err(Error::InvalidConfig("empty download ledger has no rate".into()));
    }
    let numerator = big_int(numerator);
    match total.as_exact() {
        Some(exact) => Ok(RateValue::Exact(numerator / exact)),
        None => Ok(RateValue::Real(
            numerator.to_f64().unwrap_or(f64::NAN) / total.to_f64(ledger.q()),
        )),
    }
}

/// Rate achieved by a finished session: decoded product entropy (asymptotic
/// formula, `S` products, conditioning taken from the version's side
/// information) over the ledger's download total.
pub fn achieved_rate(ledger: &DownloadLedger, config: &SdmmConfig, s: usize) -> Result<RateValue> {
    let numerator = s as u64
        * product_entropy_formula(config.l, config.k, config.m, config.version.side_info().into());
    rate_with_numerator(ledger, numerator)
}

/// Converse bound for multi-message X-secure T-private information
/// retrieval with `K` messages of `M` columns each, `N` servers, `X`-secure
/// storage, and `T`-private queries:
///
/// * `N <= X`: zero
/// * `X < N <= X + T`: `M (N - X) / (K N)`
/// * `N > X + T`: `((N - X) / N) / sum_{i < floor(K/M)} (T / (N - X))^i`
///
/// Requires `K >= M >= 1`.
pub fn mm_xstpir_upper_bound(
    n: usize,
    x: usize,
    t: usize,
    k: usize,
    m: usize,
) -> Result<BigRational> {
    if m == 0 || k < m {
        return Err(Error::InvalidConfig(format!(
            "retrieval bound needs K >= M >= 1, got K = {k}, M = {m}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidConfig("need at least one server".into()));
    }
    if n <= x {
        return Ok(BigRational::zero());
    }
    let (nn, xx, tt, kk, mm) = (n as i64, x as i64, t as i64, k as i64, m as i64);
    if n <= x + t {
        return Ok(big_ratio(mm * (nn - xx), kk * nn));
    }
    let ratio = big_ratio(tt, nn - xx);
    let mut term = BigRational::one();
    let mut series = BigRational::one();
    for _ in 1..(k / m) {
        term *= &ratio;
        series += &term;
    }
    Ok(big_ratio(nn - xx, nn) / series)
}

/// How much of a capacity statement a regime carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CapacityStatus {
    /// Matching achievability and converse.
    Exact,
    /// Only a converse is known; the value is a ceiling, not the capacity.
    UpperBoundOnly,
    /// Exactly zero (a degenerate regime, e.g. all servers may collude).
    Zero,
    /// No characterized regime covers the input; value is the trivial
    /// ceiling 1.
    Open,
}

impl std::fmt::Display for CapacityStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CapacityStatus::Exact => write!(f, "exact"),
            CapacityStatus::UpperBoundOnly => write!(f, "upper-bound-only"),
            CapacityStatus::Zero => write!(f, "zero"),
            CapacityStatus::Open => write!(f, "open"),
        }
    }
}

/// A capacity statement: the value, how strong it is, which regime produced
/// it, and any asymptotic assumptions that regime leans on.
#[derive(Clone, Debug, PartialEq)]
pub struct CapacityResult {
    pub value: BigRational,
    pub status: CapacityStatus,
    pub regime: String,
    pub assumptions: Vec<String>,
}

impl CapacityResult {
    fn new(value: BigRational, status: CapacityStatus, regime: &str) -> Self {
        debug_assert!(!value.is_negative() && value <= BigRational::one());
        debug_assert!(status != CapacityStatus::Zero || value.is_zero());
        CapacityResult { value, status, regime: regime.to_string(), assumptions: Vec::new() }
    }

    fn with_assumption(mut self, note: String) -> Self {
        self.assumptions.push(note);
        self
    }
}

/// Asymptotic regime selectors: each flag asserts that the named dimension
/// ratio grows without bound. The finite dimensions supplied alongside must
/// point the same way (a `K/M -> inf` claim with `K <= M` is rejected).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum DimLimit {
    /// `K / min(L, M) -> inf`
    KOverMinLm,
    /// `max(L, M) / K -> inf`
    MaxLmOverK,
    /// `K / M -> inf`
    KOverM,
    /// `K / L -> inf`
    KOverL,
    /// `L / M -> inf`
    LOverM,
    /// `M / L -> inf`
    MOverL,
}

impl DimLimit {
    pub fn slug(&self) -> &'static str {
        match self {
            DimLimit::KOverMinLm => "k-over-min-lm",
            DimLimit::MaxLmOverK => "max-lm-over-k",
            DimLimit::KOverM => "k-over-m",
            DimLimit::KOverL => "k-over-l",
            DimLimit::LOverM => "l-over-m",
            DimLimit::MOverL => "m-over-l",
        }
    }

    /// The same limit after the factor roles (and so L and M) swap.
    fn swapped(&self) -> DimLimit {
        match self {
            DimLimit::KOverM => DimLimit::KOverL,
            DimLimit::KOverL => DimLimit::KOverM,
            DimLimit::LOverM => DimLimit::MOverL,
            DimLimit::MOverL => DimLimit::LOverM,
            other => *other,
        }
    }
}

impl std::str::FromStr for DimLimit {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "k-over-min-lm" => Ok(DimLimit::KOverMinLm),
            "max-lm-over-k" => Ok(DimLimit::MaxLmOverK),
            "k-over-m" => Ok(DimLimit::KOverM),
            "k-over-l" => Ok(DimLimit::KOverL),
            "l-over-m" => Ok(DimLimit::LOverM),
            "m-over-l" => Ok(DimLimit::MOverL),
            other => Err(Error::InvalidConfig(format!("unknown limit flag '{other}'"))),
        }
    }
}

impl std::fmt::Display for DimLimit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.slug())
    }
}

/// A set of limit flags.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LimitFlags {
    flags: Vec<DimLimit>,
}

impl LimitFlags {
    pub fn none() -> Self {
        LimitFlags::default()
    }

    pub fn from_flags(flags: &[DimLimit]) -> Self {
        let mut v: Vec<DimLimit> = flags.to_vec();
        v.sort_unstable();
        v.dedup();
        LimitFlags { flags: v }
    }

    pub fn has(&self, flag: DimLimit) -> bool {
        self.flags.contains(&flag)
    }

    pub fn iter(&self) -> impl Iterator<Item = DimLimit> + '_ {
        self.flags.iter().copied()
    }

    fn swapped(&self) -> LimitFlags {
        LimitFlags::from_flags(&self.flags.iter().map(|f| f.swapped()).collect::<Vec<_>>())
    }

    /// Rejects flags whose direction contradicts the finite dimensions, and
    /// directly opposed pairs.
    fn validate(&self, l: usize, k: usize, m: usize) -> Result<()> {
        for flag in &self.flags {
            let consistent = match flag {
                DimLimit::KOverMinLm => k > l.min(m),
                DimLimit::MaxLmOverK => l.max(m) > k,
                DimLimit::KOverM => k > m,
                DimLimit::KOverL => k > l,
                DimLimit::LOverM => l > m,
                DimLimit::MOverL => m > l,
            };
            if !consistent {
                return Err(Error::InvalidConfig(format!(
                    "limit flag {flag} contradicts dimensions L={l}, K={k}, M={m}"
                )));
            }
        }
        if self.has(DimLimit::LOverM) && self.has(DimLimit::MOverL) {
            return Err(Error::InvalidConfig("flags l-over-m and m-over-l conflict".into()));
        }
        Ok(())
    }
}

/// A problem version as requested, before normalization. Versions securing
/// only `A` are mirror images of the canonical five: swapping the roles of
/// the factors (transposing the product) maps them onto `B`-secured
/// versions with `L` and `M` exchanged.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RequestedVersion {
    Canonical(SdmmVersion),
    /// Both secured, side information `A`.
    AbA,
    /// Only `A` secured, no side information.
    APhi,
    /// Only `A` secured, side information `A`.
    AA,
    /// Only `A` secured, side information `B`.
    AB,
}

impl RequestedVersion {
    /// Canonical version plus whether `L` and `M` (and L/M-directional limit
    /// flags) must swap.
    pub fn normalize(&self) -> (SdmmVersion, bool) {
        match self {
            RequestedVersion::Canonical(v) => (*v, false),
            RequestedVersion::AbA => (SdmmVersion::AbB, true),
            RequestedVersion::APhi => (SdmmVersion::BPhi, true),
            RequestedVersion::AA => (SdmmVersion::BB, true),
            RequestedVersion::AB => (SdmmVersion::BA, true),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            RequestedVersion::Canonical(v) => v.label(),
            RequestedVersion::AbA => "AB_A",
            RequestedVersion::APhi => "A_phi",
            RequestedVersion::AA => "A_A",
            RequestedVersion::AB => "A_B",
        }
    }
}

impl std::str::FromStr for RequestedVersion {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if let Ok(v) = s.parse::<SdmmVersion>() {
            return Ok(RequestedVersion::Canonical(v));
        }
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "ab_a" => Ok(RequestedVersion::AbA),
            "a_phi" => Ok(RequestedVersion::APhi),
            "a_a" => Ok(RequestedVersion::AA),
            "a_b" => Ok(RequestedVersion::AB),
            other => Err(Error::InvalidConfig(format!("unknown version '{other}'"))),
        }
    }
}

fn one_minus(x: usize, n: usize) -> BigRational {
    big_ratio((n - x) as i64, n as i64)
}

/// `sum_{i=0}^{count-1} ratio^i`, summed term by term.
fn geometric_sum(ratio: BigRational, count: usize) -> BigRational {
    let mut term = BigRational::one();
    let mut acc = BigRational::one();
    for _ in 1..count {
        term *= &ratio;
        acc += &term;
    }
    acc
}

/// Capacity (or best known bound) of a problem version at finite dimensions,
/// optionally inside an asymptotic regime. Exactly one regime fires per
/// input; inputs no characterized regime covers come back as `Open`.
pub fn sdmm_capacity(
    version: RequestedVersion,
    l: usize,
    k: usize,
    m: usize,
    n: usize,
    x: usize,
    flags: &LimitFlags,
) -> Result<CapacityResult> {
    if l == 0 || k == 0 || m == 0 || n == 0 {
        return Err(Error::InvalidConfig("dimensions and server count must be positive".into()));
    }
    let (canonical, swap) = version.normalize();
    let (l, m) = if swap { (m, l) } else { (l, m) };
    let flags = if swap { flags.swapped() } else { flags.clone() };
    flags.validate(l, k, m)?;

    let mut result = capacity_of_canonical(canonical, l, k, m, n, x, &flags);
    if swap {
        result = result.with_assumption(format!(
            "normalized from {} by swapping factor roles (L and M exchanged)",
            version.label()
        ));
    }
    for flag in flags.iter() {
        result = result.with_assumption(format!("asymptotic regime: {flag} -> inf"));
    }
    Ok(result)
}

fn capacity_of_canonical(
    version: SdmmVersion,
    l: usize,
    k: usize,
    m: usize,
    n: usize,
    x: usize,
    flags: &LimitFlags,
) -> CapacityResult {
    use CapacityStatus::*;
    let min_lm = l.min(m);
    match version {
        SdmmVersion::BA => {
            if n <= x {
                CapacityResult::new(BigRational::zero(), Zero, "N<=X: colluders cover every server")
            } else {
                CapacityResult::new(one_minus(x, n), Exact, "N>X")
            }
        }
        SdmmVersion::AbPhi => {
            if n <= x {
                CapacityResult::new(BigRational::zero(), Zero, "N<=X: colluders cover every server")
            } else if flags.has(DimLimit::KOverMinLm) {
                if n <= 2 * x {
                    CapacityResult::new(BigRational::zero(), Exact, "X<N<=2X, K/min(L,M)->inf")
                } else {
                    CapacityResult::new(
                        big_ratio((n - 2 * x) as i64, n as i64),
                        Exact,
                        "N>2X, K/min(L,M)->inf",
                    )
                }
            } else if k == 1 {
                CapacityResult::new(one_minus(x, n), Exact, "K=1")
            } else if flags.has(DimLimit::MaxLmOverK) && k <= min_lm {
                CapacityResult::new(one_minus(x, n), Exact, "K<=min(L,M), max(L,M)/K->inf")
            } else if k < min_lm {
                CapacityResult::new(one_minus(x, n), UpperBoundOnly, "K<min(L,M)")
            } else if n <= 2 * x {
                CapacityResult::new(
                    one_minus(x, n) * big_ratio(min_lm as i64, k as i64),
                    UpperBoundOnly,
                    "X<N<=2X, K>=min(L,M)",
                )
            } else {
                let series = geometric_sum(big_ratio(x as i64, (n - x) as i64), k / min_lm);
                CapacityResult::new(
                    one_minus(x, n) / series,
                    UpperBoundOnly,
                    "N>2X, K>=min(L,M)",
                )
            }
        }
        SdmmVersion::BB => {
            if k <= m {
                CapacityResult::new(BigRational::one(), Exact, "K<=M")
            } else if n <= x {
                CapacityResult::new(big_ratio(m as i64, k as i64), Exact, "K>M, N<=X")
            } else if flags.has(DimLimit::KOverM) {
                CapacityResult::new(one_minus(x, n), Exact, "N>X, K/M->inf")
            } else {
                let series = geometric_sum(big_ratio(x as i64, n as i64), k / m);
                CapacityResult::new(series.recip(), UpperBoundOnly, "N>X, K>M")
            }
        }
        SdmmVersion::BPhi => {
            if n <= x {
                CapacityResult::new(BigRational::zero(), Zero, "N<=X: colluders cover every server")
            } else if k >= l {
                CapacityResult::new(one_minus(x, n), Exact, "N>X, K>=L")
            } else if flags.has(DimLimit::KOverM) {
                CapacityResult::new(one_minus(x, n), Exact, "N>X, K<L, K/M->inf")
            } else if flags.has(DimLimit::LOverM) && k <= m {
                CapacityResult::new(BigRational::one(), Exact, "N>X, K<=M, L/M->inf")
            } else if flags.has(DimLimit::MOverL) {
                CapacityResult::new(one_minus(x, n), Exact, "N>X, K<L, M/L->inf")
            } else if k >= m {
                let series = geometric_sum(big_ratio(x as i64, n as i64), k / m);
                CapacityResult::new(series.recip(), UpperBoundOnly, "N>X, L>K>=M")
            } else {
                CapacityResult::new(
                    BigRational::one(),
                    Open,
                    "N>X, K<min(L,M): no characterized regime at finite ratios",
                )
            }
        }
        SdmmVersion::AbB => {
            if n <= x {
                CapacityResult::new(BigRational::zero(), Zero, "N<=X: colluders cover every server")
            } else if k <= m {
                CapacityResult::new(one_minus(x, n), Exact, "N>X, K<=M")
            } else if flags.has(DimLimit::KOverM) && n > 2 * x {
                CapacityResult::new(
                    big_ratio((n - 2 * x) as i64, n as i64),
                    Exact,
                    "N>2X, K/M->inf",
                )
            } else if n <= 2 * x {
                CapacityResult::new(
                    big_ratio((m * (n - x)) as i64, (k * n) as i64),
                    Exact,
                    "X<N<=2X, K>M",
                )
            } else {
                let series = geometric_sum(big_ratio(x as i64, (n - x) as i64), k / m);
                CapacityResult::new(
                    one_minus(x, n) / series,
                    UpperBoundOnly,
                    "N>2X, K>M",
                )
            }
        }
    }
}

/// Entrywise (Hadamard) product capacity: `1 - X/N` for `N > X`, zero
/// otherwise, independent of the matrix shape.
pub fn hadamard_capacity(n: usize, x: usize) -> CapacityResult {
    if n <= x {
        CapacityResult::new(
            BigRational::zero(),
            CapacityStatus::Zero,
            "N<=X: colluders cover every server",
        )
    } else {
        CapacityResult::new(one_minus(x, n), CapacityStatus::Exact, "N>X, entrywise")
    }
}

/// Finite-field floor of the scalar multiplication scheme's rate: shipping
/// one `F_p` symbol per server (`p < 4(q-1)`) plus `2S` indicator bits per
/// server retrieves `S` scalar products whose conditional entropy is
/// `(q-1)/q` q-ary units each. Tends to `1 - X/N` as `q` grows.
pub fn scalar_rate_floor(n: usize, x: usize, q: u64) -> f64 {
    assert!(n > x && q >= 3, "need N > X and q >= 3");
    let s = (n - x) as f64;
    let n = n as f64;
    let lq = (q as f64).ln();
    let numerator = s * (q as f64 - 1.0) / q as f64;
    let denominator = n * (4.0 * (q as f64 - 1.0)).ln() / lq + 2.0 * s * n * 2f64.ln() / lq;
    numerator / denominator
}

/// Report on the one-secret simple scheme at `L = K = M`, `N = X + 1`: its
/// rate `1/(2N)` beats the conjectural floor `(1 - 2X/N)^+ = 0` whenever
/// `X > 1`, showing that floor is not a lower bound for the fully secured,
/// no-side-information version.
#[derive(Clone, Debug, PartialEq)]
pub struct CounterexampleReport {
    pub simple_rate: BigRational,
    pub prior_bound: BigRational,
    pub exceeds: bool,
}

pub fn counterexample_check(
    l: usize,
    k: usize,
    m: usize,
    n: usize,
    x: usize,
) -> Result<CounterexampleReport> {
    if !(l == k && k == m) {
        return Err(Error::InvalidConfig("the construction needs L = K = M".into()));
    }
    if n != x + 1 || x <= 1 {
        return Err(Error::InvalidConfig("the construction needs N = X + 1 with X > 1".into()));
    }
    let simple_rate = big_ratio(1, 2 * n as i64);
    let prior = big_ratio(n as i64 - 2 * x as i64, n as i64);
    let prior_bound = if prior.is_negative() { BigRational::zero() } else { prior };
    let exceeds = simple_rate > prior_bound;
    Ok(CounterexampleReport { simple_rate, prior_bound, exceeds })
}
