//! Download accounting in exact q-ary symbols.
//!
//! Everything a server transmits is charged to a ledger. Plain field symbols
//! cost exactly 1 q-ary unit and stay rational; payloads drawn from other
//! alphabets (an auxiliary prime field `F_p`, index alphabets, single bits)
//! cost `log_q(alphabet)` per symbol and are kept symbolic, as an exact
//! rational coefficient per `log_q(arg)` term. Logarithms are only evaluated
//! when a decimal is requested, so totals compare exactly whenever they are
//! exact rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

pub fn big_ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn big_int(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// A symbol count of the form `exact + sum_i coeff_i * log_q(arg_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct QarySymbols {
    pub exact: BigRational,
    pub logs: BTreeMap<u64, BigRational>,
}

impl QarySymbols {
    pub fn zero() -> Self {
        QarySymbols::default()
    }

    pub fn from_count(n: u64) -> Self {
        QarySymbols { exact: big_int(n), logs: BTreeMap::new() }
    }

    pub fn from_rational(r: BigRational) -> Self {
        QarySymbols { exact: r, logs: BTreeMap::new() }
    }

    /// `coeff * log_q(arg)` symbols. Terms with `arg = 1` vanish.
    pub fn log_term(arg: u64, coeff: BigRational) -> Self {
        let mut logs = BTreeMap::new();
        if arg > 1 && !coeff.is_zero() {
            logs.insert(arg, coeff);
        }
        QarySymbols { exact: BigRational::zero(), logs }
    }

    pub fn is_zero(&self) -> bool {
        self.exact.is_zero() && self.logs.is_empty()
    }

    /// The exact rational value, available only when no log terms remain.
    pub fn as_exact(&self) -> Option<&BigRational> {
        if self.logs.is_empty() {
            Some(&self.exact)
        } else {
            None
        }
    }

    /// Decimal value with logs evaluated in base q. The only floating-point
    /// step in the accounting.
    pub fn to_f64(&self, q: u64) -> f64 {
        let base = (q as f64).ln();
        self.exact.to_f64().unwrap_or(f64::NAN)
            + self
                .logs
                .iter()
                .map(|(arg, c)| c.to_f64().unwrap_or(f64::NAN) * (*arg as f64).ln() / base)
                .sum::<f64>()
    }

    pub fn is_nonnegative(&self) -> bool {
        !self.exact.is_negative() && self.logs.values().all(|c| !c.is_negative())
    }
}

impl std::ops::Add<&QarySymbols> for QarySymbols {
    type Output = QarySymbols;
    fn add(mut self, rhs: &QarySymbols) -> QarySymbols {
        self.exact += &rhs.exact;
        for (arg, c) in &rhs.logs {
            let slot = self.logs.entry(*arg).or_insert_with(BigRational::zero);
            *slot += c;
            if slot.is_zero() {
                self.logs.remove(arg);
            }
        }
        self
    }
}

impl std::iter::Sum for QarySymbols {
    fn sum<I: Iterator<Item = QarySymbols>>(iter: I) -> QarySymbols {
        iter.fold(QarySymbols::zero(), |acc, x| acc + &x)
    }
}

impl std::fmt::Display for QarySymbols {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        if !self.exact.is_zero() || self.logs.is_empty() {
            parts.push(format!("{}", self.exact));
        }
        for (arg, c) in &self.logs {
            parts.push(format!("{c}*log_q({arg})"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Payload categories a download breaks down into.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PayloadCategory {
    /// Coded matrix entries in `F_q`.
    FieldData,
    /// Zero-indicator bits (shipped embedded as `F_q` elements).
    ZeroIndicators,
    /// Leading-entry positions for the outer-product scheme.
    Indices,
    /// Scalars from the auxiliary prime field `F_p`.
    AuxScalars,
}

impl std::fmt::Display for PayloadCategory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PayloadCategory::FieldData => write!(f, "field-data"),
            PayloadCategory::ZeroIndicators => write!(f, "zero-indicators"),
            PayloadCategory::Indices => write!(f, "indices"),
            PayloadCategory::AuxScalars => write!(f, "aux-scalars"),
        }
    }
}

/// One breakdown line: the charged q-ary cost of a category, plus the raw
/// number of transmitted symbols it stands for. The two differ exactly when
/// a payload is charged at its information content rather than its carrier
/// (a zero-indicator bit rides a whole `F_q` element but is charged
/// `log_q(2)`, since a production system would pack bits).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerEntry {
    pub category: PayloadCategory,
    pub charged: QarySymbols,
    pub raw_symbols: BigRational,
}

/// Per-server and per-category download totals for one session.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DownloadLedger {
    q: u64,
    per_server: Vec<QarySymbols>,
    entries: Vec<LedgerEntry>,
}

impl DownloadLedger {
    pub fn new(q: u64, servers: usize) -> Self {
        DownloadLedger {
            q,
            per_server: vec![QarySymbols::zero(); servers],
            entries: Vec::new(),
        }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn servers(&self) -> usize {
        self.per_server.len()
    }

    /// Charges `server` with `charged` q-ary symbols of `category`, covering
    /// `raw_symbols` transmitted field elements.
    pub fn charge(
        &mut self,
        category: PayloadCategory,
        server: usize,
        charged: QarySymbols,
        raw_symbols: BigRational,
    ) {
        assert!(charged.is_nonnegative(), "negative download charge");
        self.per_server[server] = std::mem::take(&mut self.per_server[server]) + &charged;
        match self.entries.iter_mut().find(|e| e.category == category) {
            Some(entry) => {
                entry.charged = std::mem::take(&mut entry.charged) + &charged;
                entry.raw_symbols += raw_symbols;
            }
            None => self.entries.push(LedgerEntry { category, charged, raw_symbols }),
        }
    }

    /// Folds another ledger (same field, same server count) into this one,
    /// as when a session is stitched together from sub-sessions.
    pub fn absorb(&mut self, other: &DownloadLedger) {
        assert_eq!(self.q, other.q, "cannot merge ledgers over different fields");
        assert_eq!(self.per_server.len(), other.per_server.len(), "server counts differ");
        for (mine, theirs) in self.per_server.iter_mut().zip(&other.per_server) {
            *mine = std::mem::take(mine) + theirs;
        }
        for entry in &other.entries {
            match self.entries.iter_mut().find(|e| e.category == entry.category) {
                Some(mine) => {
                    mine.charged = std::mem::take(&mut mine.charged) + &entry.charged;
                    mine.raw_symbols += &entry.raw_symbols;
                }
                None => self.entries.push(entry.clone()),
            }
        }
    }

    pub fn per_server(&self) -> &[QarySymbols] {
        &self.per_server
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    /// Total download `D` in q-ary symbols. The per-server totals and the
    /// category breakdown are two views of the same charges; they must agree.
    pub fn total(&self) -> QarySymbols {
        let by_server: QarySymbols = self.per_server.iter().cloned().sum();
        let by_category: QarySymbols =
            self.entries.iter().map(|e| e.charged.clone()).sum();
        debug_assert_eq!(by_server, by_category, "ledger views disagree");
        by_server
    }

    pub fn total_f64(&self) -> f64 {
        self.total().to_f64(self.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_counts_stay_rational() {
        let mut ledger = DownloadLedger::new(11, 3);
        for srv in 0..3 {
            ledger.charge(
                PayloadCategory::FieldData,
                srv,
                QarySymbols::from_count(4),
                big_int(4),
            );
        }
        let total = ledger.total();
        assert_eq!(total.as_exact(), Some(&big_int(12)));
        assert_eq!(total.to_f64(11), 12.0);
        assert_eq!(format!("{total}"), "12");
    }

    #[test]
    fn log_terms_fold_and_evaluate() {
        let mut count = QarySymbols::from_count(3);
        count = count + &QarySymbols::log_term(2, big_int(4));
        count = count + &QarySymbols::log_term(2, big_int(2));
        count = count + &QarySymbols::log_term(11, big_ratio(1, 2));
        assert_eq!(count.as_exact(), None);
        let expected = 3.0 + 6.0 * 2f64.ln() / 5f64.ln() + 0.5 * 11f64.ln() / 5f64.ln();
        assert!((count.to_f64(5) - expected).abs() < 1e-12);
        assert_eq!(format!("{count}"), "3 + 6*log_q(2) + 1/2*log_q(11)");
    }

    #[test]
    fn log_of_one_and_zero_coefficients_vanish() {
        assert!(QarySymbols::log_term(1, big_int(5)).is_zero());
        assert!(QarySymbols::log_term(7, big_int(0)).is_zero());
        let cancel = QarySymbols::log_term(2, big_int(3))
            + &QarySymbols::log_term(2, big_ratio(-3, 1));
        assert!(cancel.is_zero());
    }

    #[test]
    fn breakdown_and_per_server_views_agree() {
        let mut ledger = DownloadLedger::new(5, 2);
        ledger.charge(
            PayloadCategory::AuxScalars,
            0,
            QarySymbols::log_term(11, big_int(1)),
            big_int(1),
        );
        ledger.charge(
            PayloadCategory::ZeroIndicators,
            1,
            QarySymbols::log_term(2, big_int(2)),
            big_int(2),
        );
        ledger.charge(
            PayloadCategory::AuxScalars,
            1,
            QarySymbols::log_term(11, big_int(1)),
            big_int(1),
        );
        let total = ledger.total();
        assert_eq!(total.logs.len(), 2);
        assert_eq!(ledger.entries().len(), 2);
        let aux = ledger
            .entries()
            .iter()
            .find(|e| e.category == PayloadCategory::AuxScalars)
            .unwrap();
        assert_eq!(aux.raw_symbols, big_int(2));
    }
}
