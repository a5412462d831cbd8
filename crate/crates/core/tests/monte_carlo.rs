use vistest::chernoff::{chernoff_information, OutcomeDistributionPair};
use vistest::photostat::{joint_random_phase, DetectionParams};
use vistest::simkit::{
    dataset_rng, estimate_error, hypothesis_tables, sample_outcome, worst_case_sweep,
    ExperimentConfig,
};

fn config(v: f64, n: usize, m: usize) -> ExperimentConfig {
    ExperimentConfig {
        true_visibility: v,
        energy: 6.3,
        truncation: 15,
        repetitions: n,
        ensemble_size: m,
        seed: 2024,
    }
}

#[test]
fn sampled_histogram_matches_closed_form() {
    let k = 15;
    let n = 1_000_000;
    let theory = joint_random_phase(DetectionParams::ideal(6.3, k).unwrap(), 0.56).unwrap();
    let mut rng = dataset_rng(11, 0);
    let mut counts = vec![0u64; (k + 1) * (k + 1)];
    for _ in 0..n {
        let o = sample_outcome(&mut rng, 6.3, 0.56, k);
        counts[o.k_plus * (k + 1) + o.k_minus] += 1;
    }
    for (cell, (&c, &p)) in counts.iter().zip(theory.probs()).enumerate() {
        let expected = n as f64 * p;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt().max(1.0);
        assert!(
            (c as f64 - expected).abs() <= 4.0 * sigma,
            "cell {cell}: {c} vs {expected}"
        );
    }
}

#[test]
fn unit_visibility_total_is_poisson() {
    let mut rng = dataset_rng(12, 0);
    let n = 200_000;
    let totals: Vec<f64> = (0..n)
        .map(|_| {
            let o = sample_outcome(&mut rng, 3.0, 1.0, 40);
            (o.k_plus + o.k_minus) as f64
        })
        .collect();
    let mean = totals.iter().sum::<f64>() / n as f64;
    let var = totals.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    assert!((mean - 3.0).abs() < 4.0 * (3.0 / n as f64).sqrt());
    assert!((var / 3.0 - 1.0).abs() < 0.03);
}

#[test]
fn error_respects_chernoff_bound() {
    let base = config(0.98, 1, 4000);
    let (p1, p2) = hypothesis_tables(0.98, 0.56, &base).unwrap();
    let c = chernoff_information(&OutcomeDistributionPair::from_joint(&p1, &p2).unwrap());
    for n in [1, 3, 10, 25] {
        let under_v1 = config(0.98, n, 4000);
        let e = estimate_error(&under_v1, &config(0.56, n, 4000), &p1, &p2).unwrap();
        assert!(
            e.error_mean <= c.bound(n as u64) + 3.0 * e.error_std,
            "N = {n}"
        );
        assert!((0.0..=1.0).contains(&e.conditional_v1_given_v2));
        assert!((0.0..=1.0).contains(&e.conditional_v2_given_v1));
    }
}

#[test]
fn lower_true_visibility_is_easier_to_reject() {
    let base = config(0.98, 6, 4000);
    let grid = [0.0, 0.2, 0.4, 0.56];
    let sweep = worst_case_sweep(0.98, &grid, 0.56, &base).unwrap();
    let conditional: Vec<f64> = sweep
        .estimates
        .iter()
        .map(|e| e.conditional_v1_given_v2)
        .collect();
    let designed = conditional[3];
    assert!(conditional.iter().all(|&c| c <= designed));
    assert!(conditional.iter().all(|&c| c >= conditional[0]));
    assert!(sweep.band_lo <= sweep.band_hi);
}
