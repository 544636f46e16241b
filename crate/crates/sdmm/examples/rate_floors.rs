//! Two cautionary results about rate floors.
//!
//! First, the scalar scheme's finite-field rate climbs toward `1 - X/N` as
//! `q` grows, so the asymptotic story is reachable in practice. Second, the
//! tempting conjecture that `(1 - 2X/N)^+` lower-bounds every fully secured
//! configuration fails: at `N = X + 1` with `X > 1` that expression is zero,
//! yet a simple one-secret scheme already achieves rate `1/(2N)` by coding
//! each factor across all servers and multiplying shares pointwise.

use sdmm::capacity::{counterexample_check, scalar_rate_floor};

fn main() -> Result<(), sdmm::Error> {
    let (n, x) = (3usize, 1usize);
    println!("scalar-scheme rate floor at N={n}, X={x} (asymptote 1 - X/N = {:.4}):\n", 1.0 - x as f64 / n as f64);
    println!("{:>8} {:>12}", "q", "rate floor");
    let mut last = 0.0;
    for q in [5u64, 101, 1009, 65537, 1_000_003] {
        let floor = scalar_rate_floor(n, x, q);
        println!("{q:>8} {floor:>12.6}");
        assert!(floor > last);
        last = floor;
    }

    println!("\nthe (1 - 2X/N)^+ floor fails under full security without side information:");
    for x in [2usize, 3, 5] {
        let n = x + 1;
        let report = counterexample_check(2, 2, 2, n, x)?;
        println!(
            "  N={n}, X={x}: simple scheme rate {} vs conjectured floor {} -> exceeds: {}",
            report.simple_rate, report.prior_bound, report.exceeds
        );
        assert!(report.exceeds);
    }
    Ok(())
}
