//! Chernoff information between two visibility hypotheses and the error
//! bounds it implies.

use vistest::chernoff::{
    chernoff_coherent_closed_form, chernoff_information, OutcomeDistributionPair,
};
use vistest::photostat::{
    joint_fixed_phase, joint_random_phase, ComplexVisibility, DetectionParams,
};

fn main() -> vistest::Result<()> {
    let params = DetectionParams::ideal(6.3, 15)?;

    let random = OutcomeDistributionPair::from_joint(
        &joint_random_phase(params, 0.98)?,
        &joint_random_phase(params, 0.56)?,
    )?;
    let r = chernoff_information(&random);
    println!("random phase, V = 0.98 vs 0.56 at E = 6.3");
    println!(
        "  C = {:.6e} nats, alpha* = {:.6}, sigma = {:.4}",
        r.nats(),
        r.alpha_star,
        r.sigma
    );
    for n in [10u64, 50, 100, 200] {
        println!(
            "  N = {n:>3}: bound {:.4e}, refined {:.4e}",
            r.bound(n),
            r.refined_bound(n)?
        );
    }

    let wide = DetectionParams::ideal(6.3, 40)?;
    let coherent = OutcomeDistributionPair::from_joint(
        &joint_fixed_phase(wide, ComplexVisibility::real(0.98)?)?,
        &joint_fixed_phase(wide, ComplexVisibility::real(0.56)?)?,
    )?;
    let c = chernoff_information(&coherent);
    let closed = chernoff_coherent_closed_form(6.3, 0.98, 0.56)?;
    println!("fixed phase, same pair, K = 40");
    println!(
        "  C = {:.10} (table) vs {:.10} (closed form)",
        c.nats(),
        closed.nats()
    );
    Ok(())
}
