//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::TAU;

/// Mean of a `2π`-periodic function over one period by the trapezoid rule,
/// doubling the node count until successive estimates differ by less than
/// `1e-13` (absolute).
pub fn periodic_mean<F: Fn(f64) -> f64>(f: F) -> f64 {
    let mut n = 8usize;
    let mut prev = trapezoid(&f, n);
    loop {
        n *= 2;
        let next = trapezoid(&f, n);
        if (next - prev).abs() < 1e-13 || n > 1 << 16 {
            return next;
        }
        prev = next;
    }
}

fn trapezoid<F: Fn(f64) -> f64>(f: &F, n: usize) -> f64 {
    (0..n).map(|i| f(TAU * i as f64 / n as f64)).sum::<f64>() / n as f64
}

/// Truncated Poisson law with the last entry holding the tail, from the
/// plain recurrence.
pub fn poisson(intensity: f64, truncation: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(truncation + 1);
    let mut term = (-intensity).exp();
    let mut head = 0.0;
    for k in 0..truncation {
        out.push(term);
        head += term;
        term *= intensity / (k + 1) as f64;
    }
    out.push((1.0 - head).max(0.0));
    out
}

/// Phase-averaged joint counts, `(K+1)²` row-major, by the trapezoid rule
/// over the global phase of the fixed-phase product law. Node counts double
/// until no entry moves by `1e-13` or more.
pub fn random_phase_by_quadrature(energy: f64, vis: f64, truncation: usize) -> Vec<f64> {
    let side = truncation + 1;
    let table = |n: usize| {
        let mut out = vec![0.0; side * side];
        for i in 0..n {
            let c = (TAU * i as f64 / n as f64).cos();
            let plus = poisson(0.5 * energy * (1.0 + vis * c), truncation);
            let minus = poisson(0.5 * energy * (1.0 - vis * c), truncation);
            for k in 0..side {
                for kp in 0..side {
                    out[k * side + kp] += plus[k] * minus[kp] / n as f64;
                }
            }
        }
        out
    };
    let mut n = 8;
    let mut prev = table(n);
    loop {
        n *= 2;
        let next = table(n);
        let change = next
            .iter()
            .zip(&prev)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if change < 1e-13 || n > 1 << 16 {
            return next;
        }
        prev = next;
    }
}

/// Chernoff information by dense scan of `α` followed by ternary search.
pub fn chernoff_by_scan(p1: &[f64], p2: &[f64]) -> f64 {
    let g = |a: f64| -> f64 {
        p1.iter()
            .zip(p2)
            .map(|(&x, &y)| {
                if x == 0.0 || y == 0.0 {
                    0.0
                } else {
                    x.powf(1.0 - a) * y.powf(a)
                }
            })
            .sum::<f64>()
            .ln()
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if g(m1) < g(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    -g(0.5 * (lo + hi))
}
