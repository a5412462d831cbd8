use proptest::prelude::*;
use vistest::fingerprint::{
    best_classical, best_classical_coefficient, bpsk_overlap, classical_lower_bound, crossover,
    gv_rate, hamming, implied_repetitions, modified_rate, modified_rate_at,
    visibility_from_hamming,
};

#[test]
fn rates_at_the_experimental_distance() {
    assert!((gv_rate(0.2143).unwrap() - 0.2505).abs() <= 0.005);
    assert!((modified_rate_at(0.2143).unwrap() - 0.1215).abs() <= 0.005);
    assert!(modified_rate(0.3).unwrap() < gv_rate(0.3).unwrap());
}

#[test]
fn crossover_lengths_and_pulse_counts() {
    let r = crossover(0.98, 0.56, 1e-4, 15).unwrap();
    let within_two = |x: f64, target: f64| x / target <= 2.0 && target / x <= 2.0;
    assert!(
        within_two(r.n_vs_best_classical, 2.3e5),
        "{}",
        r.n_vs_best_classical
    );
    assert!(
        within_two(r.n_vs_classical_limit, 6.3e8),
        "{}",
        r.n_vs_classical_limit
    );
    assert!(within_two(r.pulses_vs_best_classical(), 1.9e6));
    assert!(within_two(r.pulses_vs_classical_limit(), 5.2e9));
    assert_eq!(r.total_energy, r.repetitions as f64 * r.energy_per_rep);
}

#[test]
fn accounting_reproduces_both_reported_lengths_with_one_repetition_count() {
    let r = crossover(0.98, 0.56, 1e-4, 15).unwrap();
    let n_best = implied_repetitions(
        2.3e5,
        r.code.rate,
        r.energy_per_rep,
        best_classical(2.3e5, 1e-4).unwrap(),
    );
    let n_limit = implied_repetitions(
        6.3e8,
        r.code.rate,
        r.energy_per_rep,
        classical_lower_bound(6.3e8, 1e-4).unwrap(),
    );
    for n in [n_best, n_limit] {
        assert!((93.0 * 0.9..=95.0 * 1.1).contains(&n), "{n}");
    }
}

#[test]
fn crossover_lengths_grow_as_eps_falls_between_coefficient_steps() {
    // The best-classical coefficient 4⌈½log₂(1/ε)⌉ is 24 on (4⁻⁶, 4⁻⁵].
    let band = [9e-4, 7e-4, 5e-4, 3e-4, 2.5e-4];
    let mut prev = crossover(0.98, 0.56, band[0], 15).unwrap();
    for &eps in &band[1..] {
        assert_eq!(best_classical_coefficient(eps).unwrap(), 24.0);
        let next = crossover(0.98, 0.56, eps, 15).unwrap();
        assert!(
            next.n_vs_best_classical >= prev.n_vs_best_classical,
            "eps {eps}"
        );
        assert!(
            next.n_vs_classical_limit >= prev.n_vs_classical_limit,
            "eps {eps}"
        );
        prev = next;
    }
}

#[test]
fn best_classical_crossover_drops_at_coefficient_step() {
    // Crossing ε = 4⁻⁵ raises the classical coefficient from 20 to 24 while
    // N grows by only a few percent.
    let before = crossover(0.98, 0.56, 1e-3, 15).unwrap();
    let after = crossover(0.98, 0.56, 9e-4, 15).unwrap();
    assert!(after.n_vs_best_classical < before.n_vs_best_classical);
    assert!(after.n_vs_classical_limit > before.n_vs_classical_limit);
}

fn bits(len: usize) -> impl Strategy<Value = Vec<bool>> {
    prop::collection::vec(any::<bool>(), len)
}

proptest! {
    #[test]
    fn overlap_is_visibility_of_relative_distance(
        (a, b) in (1usize..64).prop_flat_map(|m| (bits(m), bits(m)))
    ) {
        let expected = visibility_from_hamming(hamming(&a, &b) as f64 / a.len() as f64);
        prop_assert_eq!(bpsk_overlap(&a, &b).unwrap(), expected);
    }

    #[test]
    fn rates_decrease_with_distance(x in 0.001f64..0.49, y in 0.001f64..0.49) {
        prop_assume!(x < y);
        prop_assert!(gv_rate(x).unwrap() > gv_rate(y).unwrap());
        prop_assert!(modified_rate(x).unwrap() > modified_rate(y).unwrap());
        prop_assert!(modified_rate(x).unwrap() < gv_rate(x).unwrap());
    }

    #[test]
    fn lower_bound_stays_below_best_protocol(n in 1.0f64..1e12) {
        prop_assert!(classical_lower_bound(n, 1e-4).unwrap() < best_classical(n, 1e-4).unwrap());
    }
}
