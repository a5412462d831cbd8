//! Mean photon number that maximizes Chernoff information per detected photon.

use vistest::energyopt::{info_per_photon, optimal_energy, ScanOptions, StatisticsMode};

fn main() -> vistest::Result<()> {
    let opts = ScanOptions::default();
    let scan = optimal_energy(0.98, 0.56, &opts)?;
    println!(
        "V = 0.98 vs 0.56: optimum E = {:.4}, C/E = {:.6e} (K = {})",
        scan.optimum_energy, scan.optimum_ratio, scan.truncation
    );

    println!(
        "{:>8} {:>12} {:>12} {:>12}",
        "E", "joint", "k<=2", "difference"
    );
    for e in [0.5, 2.0, 6.3, 15.0] {
        let joint = info_per_photon(0.98, 0.56, e, 15, StatisticsMode::Joint)?;
        let trunc = info_per_photon(0.98, 0.56, e, 2, StatisticsMode::Truncated)?;
        let diff = info_per_photon(0.98, 0.56, e, 15, StatisticsMode::Difference)?;
        println!("{e:>8.2} {joint:>12.4e} {trunc:>12.4e} {diff:>12.4e}");
    }
    Ok(())
}
