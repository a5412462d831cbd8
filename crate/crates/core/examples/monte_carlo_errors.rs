//! Seeded Monte Carlo Neyman-Pearson tests compared with the Chernoff bound.

use vistest::simkit::{error_curve, ExperimentConfig};

fn main() -> vistest::Result<()> {
    let base = ExperimentConfig {
        true_visibility: 0.98,
        energy: 6.3,
        truncation: 15,
        repetitions: 1,
        ensemble_size: 4000,
        seed: 42,
    };
    let points = error_curve(0.98, 0.56, &[5, 10, 20, 40], &base, None)?;
    println!(
        "{:>4} {:>10} {:>10} {:>10} {:>10}",
        "N", "error", "std", "bound", "refined"
    );
    for p in &points {
        println!(
            "{:>4} {:>10.4e} {:>10.2e} {:>10.4e} {:>10.4e}",
            p.repetitions,
            p.estimate.error_mean,
            p.estimate.error_std,
            p.chernoff_bound,
            p.refined_bound
        );
    }
    Ok(())
}
