//! Command-line front end: capacity queries, retrieval sessions, collusion
//! audits, entropy measurements, rate sweeps, and the private-retrieval
//! demo.
//!
//! Output is a human-oriented table or CSV with a fixed header per
//! subcommand. Exact rationals print as `p/q` next to a fixed-precision
//! decimal column so runs diff cleanly; identical arguments and seed give
//! byte-identical output. Exit codes: 0 success, 2 invalid arguments,
//! 3 refused enumeration budget.
//!
//! Defaults may also come from a plain `key=value` file passed with
//! `--config`; explicit flags win, and the `SDMM_SEED` environment variable
//! seeds any run that does not pin one.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::analysis::{
    audit_collusion, default_sweep_grid, measure_product_entropy, sweep_rate_vs_capacity,
    EntropyMode, ProductAlphabet, DEFAULT_ENUMERATION_BUDGET,
};
use crate::capacity::{sdmm_capacity, DimLimit, LimitFlags, RateValue, RequestedVersion};
use crate::matrix::Matrix;
use crate::schemes::{
    csa_scheme_session, general_scheme_session, hadamard_session, oneshot_partition_result,
    outer_product_session, pir_reduction_demo, scalar_exhaustive_check, scalar_mul_session,
    SessionResult,
};
use crate::sharing::{random_matrix, SdmmConfig, SecretBatch, ShareScheme};
use crate::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "sdmm",
    about = "Secure distributed matrix multiplication: sessions, capacity, audits"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Capacity of a problem version at given dimensions.
    Capacity(CapacityArgs),
    /// Run one retrieval session and report its transcript and rate.
    Simulate(SimulateArgs),
    /// Exhaustively audit what colluding servers learn.
    Audit(AuditArgs),
    /// Measure the entropy of a matrix product at finite field size.
    Entropy(EntropyArgs),
    /// Run sessions across a grid and compare rates against capacity.
    Sweep(SweepArgs),
    /// Retrieve chosen columns of a matrix without revealing which.
    PirDemo(PirDemoArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Plain key=value defaults file; explicit flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CapacityArgs {
    /// Problem version: AB_phi, AB_B, B_phi, B_A, B_B, AB_A, A_phi, A_A, A_B.
    #[arg(long)]
    pub version: Option<String>,
    #[arg(long)]
    pub l: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub x: Option<usize>,
    /// Dimension-limit flag (repeatable), e.g. k-over-min-lm, l-over-m.
    #[arg(long = "flag")]
    pub flags: Vec<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Session: general, csa, scalar, outer-product, hadamard, partition.
    #[arg(long)]
    pub scheme: Option<String>,
    /// Problem version for the session.
    #[arg(long)]
    pub version: Option<String>,
    #[arg(long)]
    pub l: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub x: Option<usize>,
    #[arg(long)]
    pub q: Option<u64>,
    /// Expected batch size; rejected if the scheme derives a different one.
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Scalar scheme only: verify every factor pair in F_q x F_q.
    #[arg(long)]
    pub exhaustive: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct AuditArgs {
    /// Encoder to audit: general or csa.
    #[arg(long)]
    pub scheme: Option<String>,
    #[arg(long)]
    pub version: Option<String>,
    #[arg(long)]
    pub l: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub x: Option<usize>,
    #[arg(long)]
    pub q: Option<u64>,
    /// Colluding-subset size; defaults to X.
    #[arg(long)]
    pub subset: Option<usize>,
    /// Ceiling on exhaustively enumerated states.
    #[arg(long)]
    pub budget: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct EntropyArgs {
    #[arg(long)]
    pub l: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Field size: a prime, or a power of two for a binary field.
    #[arg(long)]
    pub q: Option<u64>,
    /// Sample this many factor pairs instead of enumerating all of them.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Ceiling on exhaustively enumerated states.
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct PirDemoArgs {
    /// Encoder: general or csa.
    #[arg(long)]
    pub scheme: Option<String>,
    /// Problem version; its side information must not be the data matrix.
    #[arg(long)]
    pub version: Option<String>,
    #[arg(long)]
    pub l: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub x: Option<usize>,
    #[arg(long)]
    pub q: Option<u64>,
    /// Wanted column indices, comma-separated, each below K.
    #[arg(long)]
    pub want: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Defaults loaded from a `key=value` file. Blank lines and `#` comments
/// are ignored.
struct FileDefaults(BTreeMap<String, String>);

impl FileDefaults {
    fn load(path: Option<&PathBuf>) -> Result<Self> {
        let mut map = BTreeMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Error::InvalidConfig(format!("cannot read {}: {e}", path.display()))
            })?;
            for (idx, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    Error::InvalidConfig(format!(
                        "{} line {}: expected key=value, got '{line}'",
                        path.display(),
                        idx + 1
                    ))
                })?;
                map.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(FileDefaults(map))
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }
}

fn parse_val<T: FromStr>(key: &str, raw: &str) -> Result<T>
where
    T::Err: Display,
{
    raw.parse()
        .map_err(|e| Error::InvalidConfig(format!("bad value for {key}: '{raw}' ({e})")))
}

fn pick<T: FromStr>(key: &str, flag: Option<T>, file: &FileDefaults, default: T) -> Result<T>
where
    T::Err: Display,
{
    if let Some(v) = flag {
        return Ok(v);
    }
    match file.raw(key) {
        Some(raw) => parse_val(key, raw),
        None => Ok(default),
    }
}

fn pick_opt<T: FromStr>(key: &str, flag: Option<T>, file: &FileDefaults) -> Result<Option<T>>
where
    T::Err: Display,
{
    if let Some(v) = flag {
        return Ok(Some(v));
    }
    match file.raw(key) {
        Some(raw) => parse_val(key, raw).map(Some),
        None => Ok(None),
    }
}

fn required<T: FromStr>(key: &str, flag: Option<&str>, file: &FileDefaults) -> Result<T>
where
    T::Err: Display,
{
    match flag.or_else(|| file.raw(key)) {
        Some(raw) => parse_val(key, raw),
        None => Err(Error::InvalidConfig(format!("--{key} is required"))),
    }
}

fn resolve_seed(flag: Option<u64>, file: &FileDefaults) -> Result<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    if let Some(raw) = file.raw("seed") {
        return parse_val("seed", raw);
    }
    match std::env::var("SDMM_SEED") {
        Ok(raw) => parse_val("SDMM_SEED", &raw),
        Err(_) => Ok(0),
    }
}

fn emit(out: Option<&PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| Error::InvalidConfig(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn csv_field(raw: &str) -> String {
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}

fn csv_row(buf: &mut String, fields: &[String]) {
    let line: Vec<String> = fields.iter().map(|f| csv_field(f)).collect();
    let _ = writeln!(buf, "{}", line.join(","));
}

fn kv(buf: &mut String, key: &str, value: impl Display) {
    let _ = writeln!(buf, "{key:<20} {value}");
}

fn dec(v: f64) -> String {
    format!("{v:.12}")
}

fn ratio_str(r: &BigRational) -> String {
    r.to_string()
}

/// Exact and decimal renderings of a rate, `-` when no exact form exists.
fn rate_columns(rate: &RateValue) -> (String, String) {
    let decimal = dec(rate.to_f64());
    match rate.as_exact() {
        Some(r) => (ratio_str(r), decimal),
        None => ("-".to_string(), decimal),
    }
}

fn join_or_dash<I: IntoIterator<Item = String>>(items: I, sep: &str) -> String {
    let joined: Vec<String> = items.into_iter().collect();
    if joined.is_empty() {
        "-".to_string()
    } else {
        joined.join(sep)
    }
}

/// Entry point used by the binary; errors map to exit codes 2 or 3.
pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Capacity(args) => cmd_capacity(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Audit(args) => cmd_audit(args),
        Command::Entropy(args) => cmd_entropy(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::PirDemo(args) => cmd_pir_demo(args),
    }
}

fn parse_flags(flag_args: &[String], file: &FileDefaults) -> Result<LimitFlags> {
    let raws: Vec<String> = if !flag_args.is_empty() {
        flag_args.to_vec()
    } else {
        match file.raw("flags") {
            Some(raw) => raw
                .split([',', '+'])
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(String::from)
                .collect(),
            None => Vec::new(),
        }
    };
    let mut flags = Vec::new();
    for raw in &raws {
        flags.push(raw.parse::<DimLimit>()?);
    }
    Ok(LimitFlags::from_flags(&flags))
}

fn cmd_capacity(args: &CapacityArgs) -> Result<()> {
    let file = FileDefaults::load(args.output.config.as_ref())?;
    let version: RequestedVersion = required("version", args.version.as_deref(), &file)?;
    let l = pick("l", args.l, &file, 1)?;
    let k = pick("k", args.k, &file, 1)?;
    let m = pick("m", args.m, &file, 1)?;
    let n = pick("n", args.n, &file, 2)?;
    let x = pick("x", args.x, &file, 1)?;
    let flags = parse_flags(&args.flags, &file)?;

    let cap = sdmm_capacity(version, l, k, m, n, x, &flags)?;
    let flags_str = join_or_dash(flags.iter().map(|f| f.slug().to_string()), "+");
    let assumptions = join_or_dash(cap.assumptions.iter().cloned(), "; ");
    let value = ratio_str(&cap.value);
    let decimal = dec(cap.value.to_f64().unwrap_or(f64::NAN));

    let mut out = String::new();
    match args.output.format {
        Format::Csv => {
            csv_row(
                &mut out,
                &[
                    "version".into(),
                    "l".into(),
                    "k".into(),
                    "m".into(),
                    "n".into(),
                    "x".into(),
                    "flags".into(),
                    "regime".into(),
                    "status".into(),
                    "capacity".into(),
                    "capacity_decimal".into(),
                    "assumptions".into(),
                ],
            );
            csv_row(
                &mut out,
                &[
                    version.label().to_string(),
                    l.to_string(),
                    k.to_string(),
                    m.to_string(),
                    n.to_string(),
                    x.to_string(),
                    flags_str,
                    cap.regime.clone(),
                    cap.status.to_string(),
                    value,
                    decimal,
                    assumptions,
                ],
            );
        }
        Format::Table => {
            kv(&mut out, "version", version.label());
            kv(&mut out, "dimensions", format!("L={l} K={k} M={m}"));
            kv(&mut out, "servers", format!("N={n} X={x}"));
            kv(&mut out, "flags", &flags_str);
            kv(&mut out, "regime", &cap.regime);
            kv(&mut out, "status", cap.status);
            kv(&mut out, "capacity", format!("{value} ({decimal})"));
            kv(&mut out, "assumptions", &assumptions);
        }
    }
    emit(args.output.out.as_ref(), &out)
}

/// Sessions the simulate subcommand can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SimScheme {
    General,
    Csa,
    Scalar,
    Outer,
    Hadamard,
    Partition,
}

impl FromStr for SimScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "general" => Ok(SimScheme::General),
            "csa" => Ok(SimScheme::Csa),
            "scalar" => Ok(SimScheme::Scalar),
            "outer" | "outer-product" => Ok(SimScheme::Outer),
            "hadamard" | "entrywise" => Ok(SimScheme::Hadamard),
            "partition" | "one-shot" | "oneshot" => Ok(SimScheme::Partition),
            other => Err(Error::InvalidConfig(format!("unknown session scheme '{other}'"))),
        }
    }
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let file = FileDefaults::load(args.output.config.as_ref())?;
    let scheme = match args.scheme.as_deref().or_else(|| file.raw("scheme")) {
        Some(raw) => parse_val::<SimScheme>("scheme", raw)?,
        None => SimScheme::General,
    };
    let version: RequestedVersion = match args.version.as_deref().or_else(|| file.raw("version")) {
        Some(raw) => parse_val("version", raw)?,
        None => RequestedVersion::Canonical(crate::sharing::SdmmVersion::AbPhi),
    };
    let (canonical, swapped) = version.normalize();
    let l_in = pick("l", args.l, &file, 1)?;
    let k = pick("k", args.k, &file, 1)?;
    let m_in = pick("m", args.m, &file, 1)?;
    let (l, m) = if swapped { (m_in, l_in) } else { (l_in, m_in) };
    let n = pick("n", args.n, &file, 4)?;
    let x = pick("x", args.x, &file, 1)?;
    let q = pick("q", args.q, &file, 11)?;
    let seed = resolve_seed(args.seed, &file)?;
    let exhaustive = args.exhaustive
        || matches!(file.raw("exhaustive"), Some(raw) if parse_val::<bool>("exhaustive", raw)?);

    let config = SdmmConfig::new(canonical, l, k, m, n, x, q)?;
    let derived = match scheme {
        SimScheme::Csa | SimScheme::Partition => config.csa_batch()?,
        _ => config.general_batch()?,
    };
    let s_flag = pick_opt("s", args.s, &file)?;
    if let Some(s) = s_flag {
        if s != derived {
            return Err(Error::InvalidConfig(format!(
                "batch size S = {s} is invalid here: the {scheme:?} scheme derives S = {derived} \
                 from N = {n} and X = {x}"
            )));
        }
    }

    if exhaustive {
        if scheme != SimScheme::Scalar {
            return Err(Error::InvalidConfig(
                "--exhaustive applies only to the scalar scheme".into(),
            ));
        }
        let correct = scalar_exhaustive_check(n, x, q, seed)?;
        let total = q * q;
        let mut out = String::new();
        match args.output.format {
            Format::Csv => {
                csv_row(&mut out, &["field".into(), "value".into()]);
                for (key, value) in [
                    ("scheme", "scalar".to_string()),
                    ("mode", "exhaustive".to_string()),
                    ("n", n.to_string()),
                    ("x", x.to_string()),
                    ("q", q.to_string()),
                    ("seed", seed.to_string()),
                    ("checked_pairs", total.to_string()),
                    ("correct_pairs", correct.to_string()),
                ] {
                    csv_row(&mut out, &[key.to_string(), value]);
                }
            }
            Format::Table => {
                kv(&mut out, "scheme", "scalar (exhaustive)");
                kv(&mut out, "parameters", format!("N={n} X={x} q={q}"));
                kv(&mut out, "checked pairs", total);
                kv(&mut out, "correct pairs", correct);
                kv(&mut out, "result", if correct as u64 == total { "ok" } else { "MISMATCH" });
            }
        }
        return emit(args.output.out.as_ref(), &out);
    }

    let field = config.field();
    let (result, direct): (SessionResult, Vec<Matrix>) = match scheme {
        SimScheme::General | SimScheme::Csa | SimScheme::Scalar | SimScheme::Outer => {
            let batch = SecretBatch::random(&config, derived, seed);
            let direct: Result<Vec<Matrix>> = batch
                .a_mats
                .iter()
                .zip(&batch.b_mats)
                .map(|(a, b)| a.matmul(b))
                .collect();
            let result = match scheme {
                SimScheme::General => general_scheme_session(&config, &batch, seed)?,
                SimScheme::Csa => csa_scheme_session(&config, &batch, seed)?,
                SimScheme::Scalar => scalar_mul_session(&config, &batch, seed)?,
                SimScheme::Outer => outer_product_session(&config, &batch, seed)?,
                _ => unreachable!(),
            };
            (result, direct?)
        }
        SimScheme::Hadamard => {
            let a_mats: Vec<Matrix> =
                (0..derived).map(|i| random_matrix(field, l, m, seed, 11, i as u64)).collect();
            let b_mats: Vec<Matrix> =
                (0..derived).map(|i| random_matrix(field, l, m, seed, 12, i as u64)).collect();
            let direct: Vec<Matrix> = a_mats
                .iter()
                .zip(&b_mats)
                .map(|(a, b)| {
                    let mut prod = Matrix::zero(field, l, m);
                    for r in 0..l {
                        for c in 0..m {
                            prod.set(r, c, (a.get(r, c) * b.get(r, c)).value());
                        }
                    }
                    prod
                })
                .collect();
            (hadamard_session(&config, &a_mats, &b_mats, seed)?, direct)
        }
        SimScheme::Partition => {
            let a = random_matrix(field, l, k, seed, 11, 0);
            let b = random_matrix(field, k, m, seed, 12, 0);
            let direct = vec![a.matmul(&b)?];
            (oneshot_partition_result(&config, &a, &b, seed)?, direct)
        }
    };

    let correct = result.products == direct;
    let (rate, rate_decimal) = rate_columns(&result.rate);
    let total = result.ledger.total();
    let mut out = String::new();
    match args.output.format {
        Format::Csv => {
            csv_row(&mut out, &["field".into(), "value".into()]);
            let mut push = |key: String, value: String| {
                csv_row(&mut out, &[key, value]);
            };
            push("scheme".into(), result.kind.to_string());
            push("version".into(), canonical.label().to_string());
            push("l".into(), l.to_string());
            push("k".into(), k.to_string());
            push("m".into(), m.to_string());
            push("n".into(), n.to_string());
            push("x".into(), x.to_string());
            push("q".into(), q.to_string());
            push("s".into(), result.batch.to_string());
            push("seed".into(), seed.to_string());
            push("correct".into(), correct.to_string());
            push("download_charged".into(), total.to_string());
            push("download_decimal".into(), dec(result.ledger.total_f64()));
            push("rate".into(), rate.clone());
            push("rate_decimal".into(), rate_decimal.clone());
            for record in result.transcript() {
                push(format!("server_{}_symbols", record.server), record.symbols.to_string());
                push(format!("server_{}_charged", record.server), record.charged);
            }
            for entry in result.ledger.entries() {
                push(format!("ledger_{}_charged", entry.category), entry.charged.to_string());
                push(format!("ledger_{}_raw", entry.category), entry.raw_symbols.to_string());
            }
        }
        Format::Table => {
            kv(&mut out, "scheme", result.kind);
            kv(&mut out, "version", canonical.label());
            kv(&mut out, "dimensions", format!("L={l} K={k} M={m}"));
            kv(&mut out, "servers", format!("N={n} X={x} q={q}"));
            kv(&mut out, "batch", result.batch);
            kv(&mut out, "seed", seed);
            kv(&mut out, "correct", correct);
            kv(&mut out, "download charged", &total);
            kv(&mut out, "download decimal", dec(result.ledger.total_f64()));
            kv(&mut out, "rate", format!("{rate} ({rate_decimal})"));
            for record in result.transcript() {
                kv(
                    &mut out,
                    &format!("server {}", record.server),
                    format!("{} symbols, charged {}", record.symbols, record.charged),
                );
            }
            for entry in result.ledger.entries() {
                kv(
                    &mut out,
                    &format!("ledger {}", entry.category),
                    format!("charged {}, raw {}", entry.charged, entry.raw_symbols),
                );
            }
        }
    }
    emit(args.output.out.as_ref(), &out)
}

fn cmd_audit(args: &AuditArgs) -> Result<()> {
    let file = FileDefaults::load(args.output.config.as_ref())?;
    let scheme = match args.scheme.as_deref().or_else(|| file.raw("scheme")) {
        Some(raw) => parse_val::<ShareScheme>("scheme", raw)?,
        None => ShareScheme::General,
    };
    let version: RequestedVersion = match args.version.as_deref().or_else(|| file.raw("version")) {
        Some(raw) => parse_val("version", raw)?,
        None => RequestedVersion::Canonical(crate::sharing::SdmmVersion::AbPhi),
    };
    let (canonical, _) = version.normalize();
    let l = pick("l", args.l, &file, 1)?;
    let k = pick("k", args.k, &file, 1)?;
    let m = pick("m", args.m, &file, 1)?;
    let n = pick("n", args.n, &file, 2)?;
    let x = pick("x", args.x, &file, 1)?;
    let q = pick("q", args.q, &file, 3)?;
    let subset = pick("subset", args.subset, &file, x)?;
    let budget = pick("budget", args.budget, &file, DEFAULT_ENUMERATION_BUDGET)?;

    let config = SdmmConfig::new(canonical, l, k, m, n, x, q)?;
    let report = audit_collusion(&config, scheme, subset, budget)?;
    let max_mi = report
        .findings
        .iter()
        .map(|f| f.mutual_information)
        .fold(0.0_f64, f64::max);

    let mut out = String::new();
    match args.output.format {
        Format::Csv => {
            csv_row(
                &mut out,
                &[
                    "scheme".into(),
                    "version".into(),
                    "l".into(),
                    "k".into(),
                    "m".into(),
                    "n".into(),
                    "x".into(),
                    "q".into(),
                    "subset".into(),
                    "states".into(),
                    "mi".into(),
                    "exactly_zero".into(),
                ],
            );
            for finding in &report.findings {
                csv_row(
                    &mut out,
                    &[
                        scheme.to_string(),
                        canonical.label().to_string(),
                        l.to_string(),
                        k.to_string(),
                        m.to_string(),
                        n.to_string(),
                        x.to_string(),
                        q.to_string(),
                        join_or_dash(finding.servers.iter().map(ToString::to_string), "+"),
                        report.states.to_string(),
                        dec(finding.mutual_information),
                        finding.exactly_zero.to_string(),
                    ],
                );
            }
        }
        Format::Table => {
            kv(&mut out, "scheme", scheme);
            kv(&mut out, "version", canonical.label());
            kv(&mut out, "dimensions", format!("L={l} K={k} M={m}"));
            kv(&mut out, "servers", format!("N={n} X={x} q={q}"));
            kv(
                &mut out,
                "enumeration",
                format!("{} subsets of {subset}, {} states each", report.findings.len(), report.states),
            );
            for finding in &report.findings {
                kv(
                    &mut out,
                    &format!(
                        "subset {}",
                        join_or_dash(finding.servers.iter().map(ToString::to_string), "+")
                    ),
                    format!(
                        "MI {}{}",
                        dec(finding.mutual_information),
                        if finding.exactly_zero { " (exactly zero)" } else { "" }
                    ),
                );
            }
            kv(
                &mut out,
                "result",
                format!(
                    "{} (max MI {})",
                    if report.all_exactly_zero() { "pass" } else { "leak" },
                    dec(max_mi)
                ),
            );
        }
    }
    emit(args.output.out.as_ref(), &out)
}

fn cmd_entropy(args: &EntropyArgs) -> Result<()> {
    let file = FileDefaults::load(args.output.config.as_ref())?;
    let l = pick("l", args.l, &file, 1)?;
    let k = pick("k", args.k, &file, 1)?;
    let m = pick("m", args.m, &file, 1)?;
    let q = pick("q", args.q, &file, 5)?;
    let samples = pick_opt("samples", args.samples, &file)?;
    let budget = pick("budget", args.budget, &file, DEFAULT_ENUMERATION_BUDGET)?;
    let seed = resolve_seed(args.seed, &file)?;

    let alphabet = ProductAlphabet::from_size(q)?;
    let mode = match samples {
        Some(count) => EntropyMode::Sampled(count),
        None => EntropyMode::Exhaustive,
    };
    let report = measure_product_entropy(l, k, m, alphabet, mode, budget, seed)?;
    let mode_str = if report.exhaustive { "exhaustive" } else { "sampled" };

    let mut out = String::new();
    match args.output.format {
        Format::Csv => {
            csv_row(
                &mut out,
                &[
                    "l".into(),
                    "k".into(),
                    "m".into(),
                    "q".into(),
                    "states".into(),
                    "mode".into(),
                    "entropy".into(),
                    "asymptotic".into(),
                    "gap".into(),
                ],
            );
            csv_row(
                &mut out,
                &[
                    report.l.to_string(),
                    report.k.to_string(),
                    report.m.to_string(),
                    report.q.to_string(),
                    report.states.to_string(),
                    mode_str.to_string(),
                    dec(report.entropy),
                    report.asymptotic.to_string(),
                    dec(report.gap),
                ],
            );
        }
        Format::Table => {
            kv(&mut out, "dimensions", format!("L={l} K={k} M={m}"));
            kv(&mut out, "field size", report.q);
            kv(&mut out, "mode", format!("{mode_str} ({} factor pairs)", report.states));
            kv(&mut out, "entropy", dec(report.entropy));
            kv(&mut out, "asymptotic", report.asymptotic);
            kv(&mut out, "gap", dec(report.gap));
        }
    }
    emit(args.output.out.as_ref(), &out)
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let file = FileDefaults::load(args.output.config.as_ref())?;
    let seed = resolve_seed(args.seed, &file)?;
    let rows = sweep_rate_vs_capacity(&default_sweep_grid(), seed)?;

    let mut out = String::new();
    match args.output.format {
        Format::Csv => {
            csv_row(
                &mut out,
                &[
                    "version".into(),
                    "scheme".into(),
                    "l".into(),
                    "k".into(),
                    "m".into(),
                    "n".into(),
                    "x".into(),
                    "q".into(),
                    "s".into(),
                    "flags".into(),
                    "rate".into(),
                    "rate_decimal".into(),
                    "capacity".into(),
                    "capacity_decimal".into(),
                    "status".into(),
                    "regime".into(),
                    "matched".into(),
                ],
            );
            for row in &rows {
                let (rate, rate_decimal) = rate_columns(&row.rate);
                csv_row(
                    &mut out,
                    &[
                        row.point.version.label().to_string(),
                        row.point.scheme.to_string(),
                        row.point.l.to_string(),
                        row.point.k.to_string(),
                        row.point.m.to_string(),
                        row.point.n.to_string(),
                        row.point.x.to_string(),
                        row.point.q.to_string(),
                        row.batch.to_string(),
                        join_or_dash(row.point.flags.iter().map(|f| f.slug().to_string()), "+"),
                        rate,
                        rate_decimal,
                        ratio_str(&row.capacity),
                        dec(row.capacity.to_f64().unwrap_or(f64::NAN)),
                        row.status.to_string(),
                        row.regime.clone(),
                        row.matched.to_string(),
                    ],
                );
            }
        }
        Format::Table => {
            for row in &rows {
                let (rate, _) = rate_columns(&row.rate);
                let _ = writeln!(
                    out,
                    "{:<7} {:<8} L={} K={} M={} N={} X={} q={:<4} S={} rate {:<6} capacity {:<6} {:<16} {}",
                    row.point.version.label(),
                    row.point.scheme.to_string(),
                    row.point.l,
                    row.point.k,
                    row.point.m,
                    row.point.n,
                    row.point.x,
                    row.point.q,
                    row.batch,
                    rate,
                    ratio_str(&row.capacity),
                    row.status.to_string(),
                    if row.matched { "matched" } else { "-" },
                );
            }
        }
    }
    emit(args.output.out.as_ref(), &out)
}

fn cmd_pir_demo(args: &PirDemoArgs) -> Result<()> {
    let file = FileDefaults::load(args.output.config.as_ref())?;
    let scheme = match args.scheme.as_deref().or_else(|| file.raw("scheme")) {
        Some(raw) => parse_val::<ShareScheme>("scheme", raw)?,
        None => ShareScheme::General,
    };
    let version: RequestedVersion = match args.version.as_deref().or_else(|| file.raw("version")) {
        Some(raw) => parse_val("version", raw)?,
        None => RequestedVersion::Canonical(crate::sharing::SdmmVersion::BPhi),
    };
    let (canonical, _) = version.normalize();
    let l = pick("l", args.l, &file, 2)?;
    let k = pick("k", args.k, &file, 3)?;
    let n = pick("n", args.n, &file, 3)?;
    let x = pick("x", args.x, &file, 1)?;
    let q = pick("q", args.q, &file, 11)?;
    let seed = resolve_seed(args.seed, &file)?;
    let want_raw = args
        .want
        .clone()
        .or_else(|| file.raw("want").map(String::from))
        .unwrap_or_else(|| "0".to_string());
    let mut wanted = Vec::new();
    for part in want_raw.split([',', '+']) {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        wanted.push(parse_val::<usize>("want", part)?);
    }

    let config = SdmmConfig::new(canonical, l, k, wanted.len().max(1), n, x, q)?;
    let demo = pir_reduction_demo(&config, scheme, &wanted, seed)?;
    let wanted_str = join_or_dash(wanted.iter().map(ToString::to_string), "+");
    let total = demo.session.ledger.total();

    let mut out = String::new();
    match args.output.format {
        Format::Csv => {
            csv_row(
                &mut out,
                &[
                    "scheme".into(),
                    "version".into(),
                    "l".into(),
                    "k".into(),
                    "n".into(),
                    "x".into(),
                    "q".into(),
                    "wanted".into(),
                    "columns_match".into(),
                    "ledger_matches_generic".into(),
                    "download_charged".into(),
                    "download_decimal".into(),
                ],
            );
            csv_row(
                &mut out,
                &[
                    scheme.to_string(),
                    canonical.label().to_string(),
                    l.to_string(),
                    k.to_string(),
                    n.to_string(),
                    x.to_string(),
                    q.to_string(),
                    wanted_str,
                    demo.columns_match.to_string(),
                    demo.ledger_matches.to_string(),
                    total.to_string(),
                    dec(demo.session.ledger.total_f64()),
                ],
            );
        }
        Format::Table => {
            kv(&mut out, "scheme", scheme);
            kv(&mut out, "version", canonical.label());
            kv(&mut out, "data shape", format!("L={l} K={k}"));
            kv(&mut out, "servers", format!("N={n} X={x} q={q}"));
            kv(&mut out, "wanted columns", &wanted_str);
            for (si, (src, got)) in demo.sources.iter().zip(&demo.retrieved).enumerate() {
                for (j, &w) in demo.wanted.iter().enumerate() {
                    let source: Vec<String> =
                        (0..src.rows()).map(|r| src.get(r, w).value().to_string()).collect();
                    let retrieved: Vec<String> =
                        (0..got.rows()).map(|r| got.get(r, j).value().to_string()).collect();
                    kv(
                        &mut out,
                        &format!("secret {si} column {w}"),
                        format!("source [{}] retrieved [{}]", source.join(" "), retrieved.join(" ")),
                    );
                }
            }
            kv(&mut out, "columns match", demo.columns_match);
            kv(&mut out, "ledger matches generic", demo.ledger_matches);
            kv(&mut out, "download charged", &total);
        }
    }
    emit(args.output.out.as_ref(), &out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_parses_every_subcommand() {
        for argv in [
            vec!["sdmm", "capacity", "--version", "B_A", "--n", "4", "--x", "1"],
            vec!["sdmm", "simulate", "--scheme", "csa", "--l", "2", "--k", "2", "--m", "2"],
            vec!["sdmm", "audit", "--scheme", "csa", "--n", "3", "--x", "1", "--q", "5"],
            vec!["sdmm", "entropy", "--l", "2", "--k", "1", "--m", "2", "--q", "64"],
            vec!["sdmm", "sweep", "--format", "csv"],
            vec!["sdmm", "pir-demo", "--k", "3", "--want", "2"],
        ] {
            Cli::try_parse_from(&argv).unwrap();
        }
    }

    #[test]
    fn csv_fields_with_commas_are_quoted() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a, b"), "\"a, b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn key_value_files_merge_under_flags() {
        let dir = std::env::temp_dir().join(format!("sdmm-cli-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("defaults.conf");
        std::fs::write(&path, "# comment\nn = 5\nq=13\n").unwrap();
        let file = FileDefaults::load(Some(&path)).unwrap();
        assert_eq!(pick("n", None, &file, 2).unwrap(), 5usize);
        assert_eq!(pick("q", Some(7u64), &file, 3).unwrap(), 7);
        assert_eq!(pick("x", None, &file, 1).unwrap(), 1usize);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn malformed_defaults_are_rejected() {
        let dir = std::env::temp_dir().join(format!("sdmm-cli-bad-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.conf");
        std::fs::write(&path, "just words\n").unwrap();
        assert!(FileDefaults::load(Some(&path)).is_err());
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
