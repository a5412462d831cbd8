//! Joint photocount tables at the two output ports, with and without a
//! shared phase reference.

use vistest::photostat::{
    joint_fixed_phase, joint_random_phase, marginal_difference, ComplexVisibility, DetectionParams,
};

fn main() -> vistest::Result<()> {
    let params = DetectionParams::ideal(6.3, 15)?;

    let fixed = joint_fixed_phase(params, ComplexVisibility::real(0.56)?)?;
    let random = joint_random_phase(params, 0.56)?;
    println!("E = 6.3, |V| = 0.56, K = 15");
    println!("{:>3} {:>3} {:>12} {:>12}", "k", "k'", "fixed", "random");
    for (k, kp) in [(0, 0), (3, 3), (5, 1), (1, 5), (8, 0), (15, 15)] {
        println!(
            "{k:>3} {kp:>3} {:>12.4e} {:>12.4e}",
            fixed.get(k, kp),
            random.get(k, kp)
        );
    }
    println!(
        "totals: fixed {:.15}, random {:.15}",
        fixed.total(),
        random.total()
    );
    println!("random-phase asymmetry: {:.2e}", random.asymmetry());

    let with_dark = joint_random_phase(DetectionParams::new(6.3, 0.2, 15)?, 0.56)?;
    println!(
        "P(0,0) with 0.2 dark counts per port: {:.4e}",
        with_dark.get(0, 0)
    );

    let diff = marginal_difference(&random);
    println!(
        "P(k - k' = 0) = {:.4}, P(k - k' = 4) = {:.4}",
        diff.get(0),
        diff.get(4)
    );
    Ok(())
}
