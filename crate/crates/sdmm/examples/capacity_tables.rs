//! Capacity of each problem version, exact where known.
//!
//! For every version the result carries a status: `exact` when matching
//! upper and lower bounds are known, `upper-bound-only` when only a
//! converse is known at these dimensions, `zero` when colluders cover every
//! server that would have to help, and `open` where no finite-dimension
//! characterization exists. Dimension-limit flags ask for asymptotic
//! regimes, where more cases become exact.

use sdmm::capacity::{
    mm_xstpir_upper_bound, sdmm_capacity, DimLimit, LimitFlags, RequestedVersion,
};
use sdmm::sharing::ALL_VERSIONS;

fn main() -> Result<(), sdmm::Error> {
    let (l, k, m, n, x) = (2, 3, 2, 4, 1);
    println!("finite dimensions L={l} K={k} M={m}, N={n}, X={x}:\n");
    println!("{:<8} {:>9} {:<18} regime", "version", "capacity", "status");
    for version in ALL_VERSIONS {
        let cap = sdmm_capacity(RequestedVersion::Canonical(version), l, k, m, n, x, &LimitFlags::none())?;
        println!(
            "{:<8} {:>9} {:<18} {}",
            version.label(),
            cap.value.to_string(),
            cap.status.to_string(),
            cap.regime
        );
    }

    println!("\nmirrored versions reduce by swapping the factor roles (L <-> M):");
    for (label, raw) in [("A_phi", "a_phi"), ("A_B", "a_b")] {
        let version: RequestedVersion = raw.parse()?;
        let cap = sdmm_capacity(version, l, k, m, n, x, &LimitFlags::none())?;
        println!("  {:<6} capacity {} ({}), regime {}", label, cap.value, cap.status, cap.regime);
    }

    println!("\nasymptotic regime K >> min(L, M), fully secured, no side information:");
    let flags = LimitFlags::from_flags(&[DimLimit::KOverMinLm]);
    for (n, x) in [(4usize, 1usize), (6, 2), (3, 1), (2, 1)] {
        let cap = sdmm_capacity(RequestedVersion::Canonical(ALL_VERSIONS[0]), l, k, m, n, x, &flags)?;
        println!("  N={n} X={x}: capacity {} ({}) [{}]", cap.value, cap.status, cap.regime);
    }

    println!("\nretrieval converse (X-secure, T-private, K messages, M wanted):");
    for (n, x, t, k, m) in [(8usize, 2usize, 2usize, 4usize, 2usize), (4, 1, 1, 3, 1), (3, 3, 1, 2, 1)] {
        let bound = mm_xstpir_upper_bound(n, x, t, k, m)?;
        println!("  N={n} X={x} T={t} K={k} M={m}: rate <= {bound}");
    }
    Ok(())
}
