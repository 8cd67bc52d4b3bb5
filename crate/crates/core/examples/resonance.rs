//! Sampled check of the KP-II resonance identity and its lower bound.

use kplab::probes::resonance_scan;

fn main() -> kplab::Result<()> {
    let scan = resonance_scan(10_000, 2024)?;
    println!("samples {}  seed {}", scan.samples, scan.seed);
    println!("max relative error {:.3e}", scan.max_rel_error);
    println!(
        "min |rhs| / 3|xi xi1 (xi - xi1)| = {:.6}",
        scan.min_coercivity
    );
    Ok(())
}
