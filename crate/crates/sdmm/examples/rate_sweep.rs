//! Achieved rates against capacity across a grid of configurations.
//!
//! Each grid point runs a real session, takes the exact achieved rate off
//! its download ledger, and looks up the capacity statement for the same
//! point. Where capacity is exact and the session meets it, the row is
//! marked; everywhere the achieved rate must stay at or below the stated
//! value, bounds included.

use num_traits::ToPrimitive;
use sdmm::analysis::{default_sweep_grid, sweep_rate_vs_capacity};

fn main() -> Result<(), sdmm::Error> {
    let rows = sweep_rate_vs_capacity(&default_sweep_grid(), 7)?;
    println!(
        "{:<8} {:<8} {:<14} {:<12} {:>7} {:>9} {:<18} {}",
        "version", "scheme", "shape", "servers", "rate", "capacity", "status", "matched"
    );
    let mut matched = 0;
    for row in &rows {
        let rate = row.rate.to_f64();
        let cap = row.capacity.to_f64().unwrap();
        assert!(rate <= cap + 1e-9, "a session may never beat capacity");
        if row.matched {
            matched += 1;
        }
        println!(
            "{:<8} {:<8} {:<14} {:<12} {:>7} {:>9} {:<18} {}",
            row.point.version.label(),
            row.point.scheme.to_string(),
            format!("L={} K={} M={}", row.point.l, row.point.k, row.point.m),
            format!("N={} X={}", row.point.n, row.point.x),
            row.rate.to_string(),
            row.capacity.to_string(),
            row.status.to_string(),
            if row.matched { "yes" } else { "-" }
        );
    }
    println!("\n{matched}/{} rows meet an exact capacity on the nose", rows.len());
    Ok(())
}
