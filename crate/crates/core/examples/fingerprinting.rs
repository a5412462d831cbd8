//! Code rates and the input length at which visibility-based quantum
//! fingerprinting reveals fewer bits than classical protocols.

use vistest::fingerprint::{
    best_classical, classical_lower_bound, crossover, gv_rate, modified_rate_at,
};

fn main() -> vistest::Result<()> {
    println!("GV rate at delta = 0.22: {:.4}", gv_rate(0.22)?);
    println!(
        "modified rate at Delta = 0.22: {:.4}",
        modified_rate_at(0.22)?
    );

    let r = crossover(0.98, 0.56, 0.001, 15)?;
    println!("V = 0.98 vs 0.56, eps = 0.001");
    println!(
        "  code rate {:.4}, delta_min {:.4}",
        r.code.rate, r.code.delta_min
    );
    println!(
        "  {:.4} photons per repetition, {} repetitions",
        r.energy_per_rep, r.repetitions
    );
    println!(
        "  crossover vs best classical: n = {:.3e}",
        r.n_vs_best_classical
    );
    println!(
        "  crossover vs classical limit: n = {:.3e}",
        r.n_vs_classical_limit
    );

    let n = 1e10;
    println!(
        "classical bits at n = 1e10: best {:.3e}, limit {:.3e}",
        best_classical(n, 0.001)?,
        classical_lower_bound(n, 0.001)?
    );
    Ok(())
}
