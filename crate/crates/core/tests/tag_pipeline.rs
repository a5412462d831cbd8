use vistest::photostat::{joint_random_phase, DetectionParams};
use vistest::simkit::{dataset_rng, sample_outcome};
use vistest::tagio::{
    bin_counts, compare_to_theory, histogram, parse_tags_checked, synthesize_tags, window_counts,
    BinningConfig, AGREEMENT_FRACTION,
};

#[test]
fn round_trip_reproduces_synthesis_counts() {
    let cfg = BinningConfig::default();
    for seed in 0..3 {
        let mut rng = dataset_rng(seed, 0);
        let syn = synthesize_tags(&mut rng, 9.0, 0.9, &cfg, 5000).unwrap();
        let mut csv = Vec::new();
        syn.stream.write_csv(&mut csv).unwrap();
        let back = parse_tags_checked(csv.as_slice(), cfg.resolution_tenths).unwrap();
        assert_eq!(window_counts(&back, &cfg), syn.counts);
        let clamped = bin_counts(&back, &cfg);
        assert!(clamped.iter().all(|o| o.k_plus <= 15 && o.k_minus <= 15));
        assert_eq!(histogram(&clamped, 15).total(), 5000);
    }
}

#[test]
fn synthetic_window_totals_have_the_requested_mean() {
    let cfg = BinningConfig::default();
    let windows = 40_000;
    let mut rng = dataset_rng(77, 0);
    let syn = synthesize_tags(&mut rng, 6.3, 0.56, &cfg, windows).unwrap();
    let counts = window_counts(&syn.stream, &cfg);
    let mean = counts
        .iter()
        .map(|o| (o.k_plus + o.k_minus) as f64)
        .sum::<f64>()
        / windows as f64;
    assert!(
        (mean - 6.3).abs() <= 3.0 * (6.3 / windows as f64).sqrt(),
        "{mean}"
    );
}

#[test]
fn wrong_visibility_is_flagged() {
    let cfg = BinningConfig::default();
    let mut rng = dataset_rng(78, 0);
    let syn = synthesize_tags(&mut rng, 6.3, 0.56, &cfg, 100_000).unwrap();
    let hist = histogram(&bin_counts(&syn.stream, &cfg), 15);
    let right = joint_random_phase(DetectionParams::ideal(6.3, 15).unwrap(), 0.56).unwrap();
    let wrong = joint_random_phase(DetectionParams::ideal(6.3, 15).unwrap(), 0.98).unwrap();
    let good = compare_to_theory(&hist, &right).unwrap();
    let bad = compare_to_theory(&hist, &wrong).unwrap();
    assert!(!bad.is_consistent());
    assert!(bad.within_two < 0.5);
    assert!(bad.total_variation > 10.0 * good.total_variation);
}

/// Self-sampled histograms of 1.5×10⁶ windows should pass the 95 %-within-2
/// criterion on every one of 20 seeds.
#[test]
fn self_sampled_histograms_pass_on_twenty_seeds() {
    let k = 15;
    let windows = 1_500_000;
    let theory = joint_random_phase(DetectionParams::ideal(6.3, k).unwrap(), 0.56).unwrap();
    let mut failures = Vec::new();
    for seed in 0..20u64 {
        let mut rng = dataset_rng(seed, 0);
        let outcomes: Vec<_> = (0..windows)
            .map(|_| sample_outcome(&mut rng, 6.3, 0.56, k))
            .collect();
        let cmp = compare_to_theory(&histogram(&outcomes, k), &theory).unwrap();
        if cmp.within_two < AGREEMENT_FRACTION {
            failures.push((seed, cmp.within_two));
        }
    }
    assert!(
        failures.is_empty(),
        "seeds below {AGREEMENT_FRACTION}: {failures:?}"
    );
}
