//! Time-tag stream round trip: synthesize, write, parse, bin into windows and
//! compare the count histogram with the random-phase prediction.

use vistest::photostat::{joint_random_phase, DetectionParams};
use vistest::simkit::dataset_rng;
use vistest::tagio::{
    bin_counts, compare_to_theory, histogram, parse_tags, synthesize_tags, BinningConfig,
};

fn main() -> vistest::Result<()> {
    let config = BinningConfig::default();
    let mut rng = dataset_rng(7, 0);
    let synthetic = synthesize_tags(&mut rng, 3.0, 0.9, &config, 5000)?;

    let mut csv = Vec::new();
    synthetic.stream.write_csv(&mut csv)?;
    let stream = parse_tags(csv.as_slice())?;
    println!(
        "{} tags over {:?} ns",
        stream.records.len(),
        stream.duration.map(|d| d as f64 / 10.0)
    );

    let outcomes = bin_counts(&stream, &config);
    let hist = histogram(&outcomes, config.truncation);
    let theory = joint_random_phase(DetectionParams::ideal(3.0, config.truncation)?, 0.9)?;
    let cmp = compare_to_theory(&hist, &theory)?;
    println!(
        "{} windows, {} occupied cells, {:.1}% within 2 sigma, TV distance {:.4}",
        hist.total(),
        cmp.occupied_cells,
        100.0 * cmp.within_two,
        cmp.total_variation
    );
    println!("consistent: {}", cmp.is_consistent());
    Ok(())
}
