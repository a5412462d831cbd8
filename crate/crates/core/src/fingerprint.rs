//! Resource planning for quantum fingerprinting without a shared phase
//! reference: code rates, visibility and Hamming-distance maps, revealed
//! information, classical benchmarks and the input lengths at which the
//! quantum protocol wins.
//!
//! Revealed information of the quantum protocol is counted as
//! `N · n̄ · log₂(2m)` bits for `N` repetitions of `n̄` photons spread over
//! `m = n/R` time bins.

use std::f64::consts::LN_2;
use std::io::{self, Write};

use crate::energyopt::{log_grid, optimal_energy, ScanOptions};
use crate::error::{Error, Result};

pub const CROSSOVER_RANGE: (f64, f64) = (10.0, 1e12);
pub const CROSSOVER_ITERATIONS: usize = 50;

/// `h₂(x)` in bits.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!(
            "h2 argument must be in [0, 1], got {x}"
        )));
    }
    Ok(h2(x))
}

fn h2(x: f64) -> f64 {
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    term(x) + term(1.0 - x)
}

/// Gilbert–Varshamov rate `1 − h₂(δ_min)`.
pub fn gv_rate(delta_min: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&delta_min) {
        return Err(Error::domain(format!(
            "delta_min must be in [0, 0.5), got {delta_min}"
        )));
    }
    Ok(1.0 - h2(delta_min))
}

/// `Δ_min = δ_min / (1 + δ_min)` of the code with appended bits.
pub fn modified_distance(delta_min: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&delta_min) {
        return Err(Error::domain(format!(
            "delta_min must be in [0, 0.5), got {delta_min}"
        )));
    }
    Ok(delta_min / (1.0 + delta_min))
}

/// Rate of the modified code built from an original code with relative
/// distance `delta_min`.
pub fn modified_rate(delta_min: f64) -> Result<f64> {
    modified_rate_at(modified_distance(delta_min)?)
}

/// `R = (1 − Δ)[1 − h₂(Δ/(1 − Δ))]` for the modified code's distance `Δ`.
pub fn modified_rate_at(big_delta: f64) -> Result<f64> {
    if !(0.0..1.0 / 3.0).contains(&big_delta) {
        return Err(Error::domain(format!(
            "modified distance must be in [0, 1/3), got {big_delta}"
        )));
    }
    Ok((1.0 - big_delta) * (1.0 - h2(big_delta / (1.0 - big_delta))))
}

/// Relative distance for which `v2 = v1 (1 − 2Δ)`.
pub fn delta_from_visibilities(v1: f64, v2: f64) -> Result<f64> {
    if !(v1 > 0.0 && v1 <= 1.0 && v2 >= 0.0) {
        return Err(Error::domain(format!(
            "visibilities must satisfy 0 <= v2 <= v1 <= 1 with v1 > 0, got ({v1}, {v2})"
        )));
    }
    if v2 > v1 {
        return Err(Error::domain(format!("v2 = {v2} exceeds v1 = {v1}")));
    }
    Ok(0.5 * (1.0 - v2 / v1))
}

/// Signed overlap `1 − 2δ` of two BPSK codewords at relative distance `δ`.
pub fn visibility_from_hamming(delta: f64) -> f64 {
    1.0 - 2.0 * delta
}

/// `(1/m) Σ (−1)^{a_j ⊕ b_j}`.
pub fn bpsk_overlap(a: &[bool], b: &[bool]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::domain("codewords must be non-empty"));
    }
    let distance = hamming(a, b);
    Ok(visibility_from_hamming(distance as f64 / a.len() as f64))
}

pub fn hamming(a: &[bool], b: &[bool]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

fn check_benchmark(n: f64, eps: f64) -> Result<()> {
    if !(n >= 1.0 && n.is_finite()) {
        return Err(Error::domain(format!("input length must be >= 1, got {n}")));
    }
    if !(eps > 0.0 && eps <= 0.25) {
        return Err(Error::domain(format!(
            "error rate must be in (0, 0.25], got {eps}"
        )));
    }
    Ok(())
}

/// Lower bound on the bits any classical protocol must reveal:
/// `(1 − 2√ε)(√(n / 2ln2) − 1)`.
pub fn classical_lower_bound(n: f64, eps: f64) -> Result<f64> {
    check_benchmark(n, eps)?;
    Ok(lower_bound_bits(n, eps))
}

fn lower_bound_bits(n: f64, eps: f64) -> f64 {
    (1.0 - 2.0 * eps.sqrt()) * ((n / (2.0 * LN_2)).sqrt() - 1.0)
}

/// `4⌈½ log₂(1/ε)⌉`.
pub fn best_classical_coefficient(eps: f64) -> Result<f64> {
    check_benchmark(1.0, eps)?;
    Ok(coefficient(eps))
}

fn coefficient(eps: f64) -> f64 {
    4.0 * (0.5 * (1.0 / eps).log2()).ceil()
}

/// Bits revealed by the best known classical protocol: `4⌈½ log₂(1/ε)⌉ √n`.
pub fn best_classical(n: f64, eps: f64) -> Result<f64> {
    check_benchmark(n, eps)?;
    Ok(coefficient(eps) * n.sqrt())
}

/// Smallest `N` with `e^{−NC}/2 ≤ ε`; an infinite `C` needs one repetition.
pub fn repetitions_needed(chernoff_info: f64, eps: f64) -> Result<u64> {
    if !(chernoff_info > 0.0) {
        return Err(Error::domain(format!(
            "Chernoff information must be > 0, got {chernoff_info}"
        )));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::domain(format!(
            "error rate must be in (0, 0.5), got {eps}"
        )));
    }
    if chernoff_info.is_infinite() {
        return Ok(1);
    }
    Ok(((1.0 / (2.0 * eps)).ln() / chernoff_info).ceil().max(1.0) as u64)
}

/// `N · n̄ · log₂(2n/R)` bits.
pub fn quantum_revealed(n: f64, rate: f64, energy_per_rep: f64, repetitions: u64) -> Result<f64> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::domain(format!("rate must be in (0, 1], got {rate}")));
    }
    if n / rate < 2.0 {
        return Err(Error::domain(format!(
            "need m = n/R >= 2, got {}",
            n / rate
        )));
    }
    if !(energy_per_rep >= 0.0) {
        return Err(Error::domain("energy per repetition must be >= 0"));
    }
    Ok(revealed_bits(n, rate, repetitions as f64 * energy_per_rep))
}

fn revealed_bits(n: f64, rate: f64, total_energy: f64) -> f64 {
    total_energy * (2.0 * n / rate).log2()
}

/// Repetitions at which `N · n̄ · log₂(2n/R)` equals `benchmark_bits`.
pub fn implied_repetitions(n: f64, rate: f64, energy_per_rep: f64, benchmark_bits: f64) -> f64 {
    benchmark_bits / (energy_per_rep * (2.0 * n / rate).log2())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodeSpec {
    pub delta_min: f64,
    pub rate: f64,
    pub modified: bool,
}

impl CodeSpec {
    pub fn gilbert_varshamov(delta_min: f64) -> Result<Self> {
        Ok(Self {
            delta_min,
            rate: gv_rate(delta_min)?,
            modified: false,
        })
    }

    /// Modified code with relative distance `big_delta`.
    pub fn modified(big_delta: f64) -> Result<Self> {
        Ok(Self {
            delta_min: big_delta,
            rate: modified_rate_at(big_delta)?,
            modified: true,
        })
    }

    /// Pulses per input bit inverse: `m = n / rate`.
    pub fn pulses(&self, n: f64) -> f64 {
        n / self.rate
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossoverResult {
    pub code: CodeSpec,
    /// Photons per repetition maximizing information per photon.
    pub energy_per_rep: f64,
    pub chernoff_info: f64,
    pub repetitions: u64,
    /// `N · n̄`.
    pub total_energy: f64,
    pub n_vs_best_classical: f64,
    pub n_vs_classical_limit: f64,
}

impl CrossoverResult {
    pub fn pulses_vs_best_classical(&self) -> f64 {
        self.code.pulses(self.n_vs_best_classical)
    }

    pub fn pulses_vs_classical_limit(&self) -> f64 {
        self.code.pulses(self.n_vs_classical_limit)
    }
}

/// Input lengths beyond which the random-phase quantum protocol reveals
/// fewer bits than the best known classical protocol and than the classical
/// lower bound.
pub fn crossover(v1: f64, v2: f64, eps: f64, truncation: usize) -> Result<CrossoverResult> {
    check_benchmark(1.0, eps)?;
    let code = CodeSpec::modified(delta_from_visibilities(v1, v2)?)?;
    let scan = optimal_energy(
        v1,
        v2,
        &ScanOptions {
            truncation,
            ..ScanOptions::default()
        },
    )?;
    let energy = scan.optimum_energy;
    let info = scan.optimum_ratio * energy;
    let repetitions = repetitions_needed(info, eps)?;
    let total_energy = repetitions as f64 * energy;
    let quantum = |n: f64| revealed_bits(n, code.rate, total_energy);
    let best = solve_crossover("best known classical protocol", |n| {
        coefficient(eps) * n.sqrt() - quantum(n)
    })?;
    let limit = solve_crossover("classical lower bound", |n| {
        lower_bound_bits(n, eps) - quantum(n)
    })?;
    Ok(CrossoverResult {
        code,
        energy_per_rep: energy,
        chernoff_info: info,
        repetitions,
        total_energy,
        n_vs_best_classical: best,
        n_vs_classical_limit: limit,
    })
}

/// Bisection on `ln n` for the sign change of `classical − quantum` from
/// negative to positive.
fn solve_crossover<F: Fn(f64) -> f64>(what: &str, gap: F) -> Result<f64> {
    let (lo, hi) = CROSSOVER_RANGE;
    let (mut a, mut b) = (lo.ln(), hi.ln());
    if !(gap(lo) < 0.0 && gap(hi) > 0.0) {
        return Err(Error::NoCrossover {
            what: what.to_string(),
            lo,
            hi,
        });
    }
    for _ in 0..CROSSOVER_ITERATIONS {
        let m = 0.5 * (a + b);
        if gap(m.exp()) < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok((0.5 * (a + b)).exp())
}

/// One row of the revealed-information comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevealedPoint {
    pub n: f64,
    pub quantum_incoherent: f64,
    /// `None` unless a coherent photon budget was supplied.
    pub quantum_coherent: Option<f64>,
    pub classical_best: f64,
    pub classical_bound: f64,
}

/// Revealed information against input length on `points` log-spaced values
/// of `n` in `range`. The coherent curve uses the Gilbert–Varshamov code at
/// the original distance and a total photon budget `coherent_energy`.
pub fn revealed_information_curves(
    result: &CrossoverResult,
    v1: f64,
    v2: f64,
    eps: f64,
    coherent_energy: Option<f64>,
    range: (f64, f64),
    points: usize,
) -> Result<Vec<RevealedPoint>> {
    check_benchmark(range.0, eps)?;
    if !(range.1 > range.0) || points < 2 {
        return Err(Error::domain("need range lo < hi and at least 2 points"));
    }
    let gv = CodeSpec::gilbert_varshamov(delta_from_visibilities(v1, v2)?)?;
    if let Some(e) = coherent_energy {
        if !(e > 0.0 && e.is_finite()) {
            return Err(Error::domain(format!(
                "coherent photon budget must be > 0, got {e}"
            )));
        }
    }
    Ok(log_grid(range.0, range.1, points)
        .into_iter()
        .map(|n| RevealedPoint {
            n,
            quantum_incoherent: revealed_bits(n, result.code.rate, result.total_energy),
            quantum_coherent: coherent_energy.map(|e| revealed_bits(n, gv.rate, e)),
            classical_best: coefficient(eps) * n.sqrt(),
            classical_bound: lower_bound_bits(n, eps),
        })
        .collect())
}

pub fn write_revealed_csv<W: Write>(points: &[RevealedPoint], mut out: W) -> io::Result<()> {
    writeln!(
        out,
        "n,I_quantum_incoherent,I_quantum_coherent,I_classical_best,I_classical_bound"
    )?;
    for p in points {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            p.n,
            p.quantum_incoherent,
            p.quantum_coherent.unwrap_or(f64::NAN),
            p.classical_best,
            p.classical_bound
        )?;
    }
    Ok(())
}
