//! Photocount statistics at the two output ports of a balanced beam splitter.
//!
//! Two regimes are covered: a fixed global phase, where the joint counts are
//! a product of Poisson laws, and a uniformly random global phase, where the
//! product has to be averaged over the phase. Dark counts enter only through
//! [`effective_params`], which maps them onto an energy increase and a
//! visibility reduction before any distribution is built.

use std::f64::consts::{LN_2, PI, TAU};
use std::fmt;
use std::io::{self, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Magnitudes above 1 by at most this much are clamped to 1.
const MAGNITUDE_SLACK: f64 = 1e-9;

/// Poisson tail mass of the conserved total count that may be dropped before
/// folding the random-phase table.
const FOLD_TAIL: f64 = 1e-18;

/// Interference visibility stored in polar form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexVisibility {
    magnitude: f64,
    phase: f64,
}

impl ComplexVisibility {
    /// Builds a visibility from polar parts. A negative magnitude is folded
    /// into the phase.
    pub fn new(magnitude: f64, phase: f64) -> Result<Self> {
        if !magnitude.is_finite() || !phase.is_finite() {
            return Err(Error::domain("visibility components must be finite"));
        }
        let (magnitude, phase) = if magnitude < 0.0 {
            (-magnitude, phase + PI)
        } else {
            (magnitude, phase)
        };
        Ok(Self {
            magnitude: clamp_magnitude(magnitude)?,
            phase: normalize_phase(phase),
        })
    }

    /// Real-valued visibility; negative values carry phase π.
    pub fn real(value: f64) -> Result<Self> {
        Self::new(value, 0.0)
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        let (r, theta) = z.to_polar();
        Self::new(r, if r == 0.0 { 0.0 } else { theta })
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn re(&self) -> f64 {
        self.magnitude * self.phase.cos()
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.magnitude, self.phase)
    }

    fn with_magnitude(self, magnitude: f64) -> Self {
        Self { magnitude, ..self }
    }
}

fn clamp_magnitude(m: f64) -> Result<f64> {
    if m <= 1.0 {
        Ok(m)
    } else if m <= 1.0 + MAGNITUDE_SLACK {
        Ok(1.0)
    } else {
        Err(Error::domain(format!("visibility magnitude {m} exceeds 1")))
    }
}

/// Maps any finite angle into `[0, 2π)`.
pub fn normalize_phase(phase: f64) -> f64 {
    let p = phase.rem_euclid(TAU);
    if p >= TAU {
        0.0
    } else {
        p
    }
}

/// Detector-side parameters of one measurement realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionParams {
    /// Mean detected photon number ηn̄ summed over both ports.
    pub mean_detected_energy: f64,
    /// Mean dark counts per detector per realization.
    pub dark_mean: f64,
    /// Largest resolvable count; the last bucket absorbs the tail.
    pub truncation: usize,
}

impl DetectionParams {
    pub fn new(mean_detected_energy: f64, dark_mean: f64, truncation: usize) -> Result<Self> {
        if !mean_detected_energy.is_finite() || mean_detected_energy < 0.0 {
            return Err(Error::domain(format!(
                "mean detected energy must be finite and >= 0, got {mean_detected_energy}"
            )));
        }
        if !dark_mean.is_finite() || dark_mean < 0.0 {
            return Err(Error::domain(format!(
                "dark count mean must be finite and >= 0, got {dark_mean}"
            )));
        }
        if truncation < 1 {
            return Err(Error::domain("truncation K must be >= 1"));
        }
        Ok(Self {
            mean_detected_energy,
            dark_mean,
            truncation,
        })
    }

    /// Dark-count-free parameters.
    pub fn ideal(energy: f64, truncation: usize) -> Result<Self> {
        Self::new(energy, 0.0, truncation)
    }
}

/// Joint distribution of counts `(k, k′)` on the '+' and '−' ports, stored
/// row-major over `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPhotocountDistribution {
    truncation: usize,
    probs: Vec<f64>,
}

impl JointPhotocountDistribution {
    /// Wraps a row-major `(K+1)×(K+1)` table after validating it.
    pub fn from_table(truncation: usize, probs: Vec<f64>) -> Result<Self> {
        let side = truncation + 1;
        if probs.len() != side * side {
            return Err(Error::ShapeMismatch {
                left: probs.len(),
                right: side * side,
            });
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::domain("probabilities must be finite and >= 0"));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Unnormalized { sum });
        }
        Ok(Self { truncation, probs })
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn side(&self) -> usize {
        self.truncation + 1
    }

    pub fn get(&self, k: usize, k_prime: usize) -> f64 {
        self.probs[k * self.side() + k_prime]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Largest `|P[k][k′] − P[k′][k]|` over the table.
    pub fn asymmetry(&self) -> f64 {
        let n = self.side();
        let mut worst = 0.0_f64;
        for k in 0..n {
            for kp in (k + 1)..n {
                worst = worst.max((self.get(k, kp) - self.get(kp, k)).abs());
            }
        }
        worst
    }

    /// Writes `k,kprime,prob` rows in row-major order with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "k,kprime,prob")?;
        let n = self.side();
        for k in 0..n {
            for kp in 0..n {
                writeln!(out, "{k},{kp},{:.16e}", self.get(k, kp))?;
            }
        }
        Ok(())
    }
}

/// Distribution of the count difference `Δk = k′ − k` over `−K..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountDifferenceDistribution {
    truncation: usize,
    probs: Vec<f64>,
}

impl CountDifferenceDistribution {
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Probability of `Δk`; zero outside `−K..=K`.
    pub fn get(&self, delta: i64) -> f64 {
        let k = self.truncation as i64;
        if delta < -k || delta > k {
            0.0
        } else {
            self.probs[(delta + k) as usize]
        }
    }

    /// Probabilities indexed from `Δk = −K` upwards.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Time-integrated intensities `(I⁺, I⁻)` at the two ports for a global phase
/// offset `phase_offset` added to the visibility phase.
pub fn port_intensities(
    energy: f64,
    vis: ComplexVisibility,
    phase_offset: f64,
) -> Result<(f64, f64)> {
    if !energy.is_finite() || energy < 0.0 {
        return Err(Error::domain(format!(
            "energy must be finite and >= 0, got {energy}"
        )));
    }
    let plus = intensity_plus(energy, vis.magnitude * (vis.phase + phase_offset).cos());
    Ok((plus, energy - plus))
}

#[inline]
fn intensity_plus(energy: f64, re_v: f64) -> f64 {
    0.5 * energy * (1.0 + re_v)
}

/// Folds Poissonian dark counts into an equivalent dark-count-free setting.
///
/// Adding `n̄_dark` to both port intensities is the same as raising the energy
/// to `ηn̄ + 2n̄_dark` and scaling `|𝒱|` by `ηn̄ / (ηn̄ + 2n̄_dark)`.
pub fn effective_params(
    params: DetectionParams,
    vis: ComplexVisibility,
) -> (DetectionParams, ComplexVisibility) {
    if params.dark_mean == 0.0 {
        return (params, vis);
    }
    let energy = params.mean_detected_energy + 2.0 * params.dark_mean;
    let magnitude = vis.magnitude * params.mean_detected_energy / energy;
    (
        DetectionParams {
            mean_detected_energy: energy,
            dark_mean: 0.0,
            truncation: params.truncation,
        },
        vis.with_magnitude(magnitude),
    )
}

/// Truncated Poisson law: entries `0..K` are `e^{−I} I^k / k!`, entry `K`
/// holds the remaining tail mass.
pub fn poisson_counts(intensity: f64, truncation: usize) -> Result<Vec<f64>> {
    if truncation < 1 {
        return Err(Error::domain("truncation K must be >= 1"));
    }
    if !intensity.is_finite() || intensity < 0.0 {
        return Err(Error::domain(format!(
            "intensity must be finite and >= 0, got {intensity}"
        )));
    }
    let mut out = vec![0.0; truncation + 1];
    if intensity == 0.0 {
        out[0] = 1.0;
        return Ok(out);
    }
    let ln_i = intensity.ln();
    let mut ln_fact = 0.0;
    for (k, slot) in out.iter_mut().take(truncation).enumerate() {
        if k > 0 {
            ln_fact += (k as f64).ln();
        }
        *slot = (-intensity + k as f64 * ln_i - ln_fact).exp();
    }
    out[truncation] = poisson_upper_tail(intensity, truncation, &out[..truncation]);
    Ok(out)
}

/// `P(X ≥ K)` for `X ~ Poisson(intensity)`. Summed directly when the tail is
/// small so that it keeps full relative precision.
fn poisson_upper_tail(intensity: f64, truncation: usize, head: &[f64]) -> f64 {
    if intensity < truncation as f64 {
        let ln_i = intensity.ln();
        let mut ln_term = -intensity + truncation as f64 * ln_i - ln_factorial(truncation);
        let mut tail = 0.0;
        let mut k = truncation;
        loop {
            let term = ln_term.exp();
            tail += term;
            if term <= tail * 1e-18 || term == 0.0 {
                break;
            }
            k += 1;
            ln_term += ln_i - (k as f64).ln();
        }
        tail
    } else {
        (1.0 - head.iter().sum::<f64>()).max(0.0)
    }
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Table of `ln n!` for `n ≤ max`.
#[derive(Debug, Clone)]
pub(crate) struct LnFactorials(Vec<f64>);

impl LnFactorials {
    pub(crate) fn up_to(max: usize) -> Self {
        let mut table = Vec::with_capacity(max + 1);
        let mut acc = 0.0;
        table.push(0.0);
        for n in 1..=max {
            acc += (n as f64).ln();
            table.push(acc);
        }
        Self(table)
    }

    #[inline]
    pub(crate) fn get(&self, n: usize) -> f64 {
        self.0[n]
    }

    #[inline]
    fn ln_binomial(&self, n: usize, k: usize) -> f64 {
        self.0[n] - self.0[k] - self.0[n - k]
    }
}

/// Fixed-phase joint distribution `p⁺_k · p⁻_{k′}`. Dark counts in `params`
/// are folded in first via [`effective_params`].
pub fn joint_fixed_phase(
    params: DetectionParams,
    vis: ComplexVisibility,
) -> Result<JointPhotocountDistribution> {
    let (params, vis) = effective_params(params, vis);
    let (plus, minus) = port_intensities(params.mean_detected_energy, vis, 0.0)?;
    let k = params.truncation;
    let p_plus = poisson_counts(plus, k)?;
    let p_minus = poisson_counts(minus, k)?;
    let probs = p_plus
        .iter()
        .flat_map(|a| p_minus.iter().map(move |b| a * b))
        .collect();
    Ok(JointPhotocountDistribution {
        truncation: k,
        probs,
    })
}

/// Random-phase joint distribution: the fixed-phase product averaged over a
/// uniform global phase, truncated at `K`. Only `|𝒱|` matters. Dark counts in
/// `params` are folded in first via [`effective_params`].
pub fn joint_random_phase(
    params: DetectionParams,
    vis_magnitude: f64,
) -> Result<JointPhotocountDistribution> {
    if !vis_magnitude.is_finite() || vis_magnitude < 0.0 {
        return Err(Error::domain(format!(
            "visibility magnitude must be in [0, 1], got {vis_magnitude}"
        )));
    }
    let vis = ComplexVisibility::new(clamp_magnitude(vis_magnitude)?, 0.0)?;
    let (params, vis) = effective_params(params, vis);
    Ok(
        RandomPhaseTable::new(params.mean_detected_energy, vis.magnitude)
            .truncate(params.truncation),
    )
}

/// Untruncated random-phase probabilities for all `(k, k′)` with
/// `k + k′ ≤ limit`, where `limit` leaves at most [`FOLD_TAIL`] of the total
/// count distribution outside.
struct RandomPhaseTable {
    limit: usize,
    /// `rows[k][k′]` for `k′ ≤ limit − k`.
    rows: Vec<Vec<f64>>,
}

impl RandomPhaseTable {
    fn new(energy: f64, vis_magnitude: f64) -> Self {
        let limit = total_count_limit(energy);
        let lf = LnFactorials::up_to(2 * limit + 2);
        let rows = (0..=limit)
            .map(|k| {
                (0..=(limit - k))
                    .map(|kp| random_phase_entry_with(energy, vis_magnitude, k, kp, &lf))
                    .collect()
            })
            .collect();
        Self { limit, rows }
    }

    fn cell(&self, k: usize, kp: usize) -> f64 {
        if k + kp > self.limit {
            0.0
        } else {
            self.rows[k][kp]
        }
    }

    /// Folds all counts `≥ K` into the boundary buckets.
    fn truncate(&self, truncation: usize) -> JointPhotocountDistribution {
        let side = truncation + 1;
        let mut probs = vec![0.0; side * side];
        for k in 0..=self.limit {
            for kp in 0..=(self.limit - k) {
                let i = k.min(truncation);
                let j = kp.min(truncation);
                probs[i * side + j] += self.cell(k, kp);
            }
        }
        let kept: f64 = probs.iter().sum();
        // Dropped mass lies at large total counts.
        probs[side * side - 1] += (1.0 - kept).max(0.0);
        JointPhotocountDistribution { truncation, probs }
    }
}

/// Smallest `L` such that `P(T > L) < FOLD_TAIL` for `T ~ Poisson(energy)`,
/// the conserved total count `k + k′`.
fn total_count_limit(energy: f64) -> usize {
    if energy == 0.0 {
        return 0;
    }
    let ln_e = energy.ln();
    let mut ln_term = -energy;
    let mut cdf = 0.0;
    let mut n = 0usize;
    loop {
        cdf += ln_term.exp();
        // Past the mode the remaining tail is bounded by a geometric series.
        let next = (ln_term + ln_e - ((n + 1) as f64).ln()).exp();
        let ratio = energy / (n + 2) as f64;
        if (n as f64) > energy && ratio < 1.0 && next / (1.0 - ratio) < FOLD_TAIL {
            return n.max(1);
        }
        if 1.0 - cdf < FOLD_TAIL * 1e-2 && n as f64 > energy {
            return n.max(1);
        }
        n += 1;
        ln_term += ln_e - (n as f64).ln();
    }
}

/// Untruncated random-phase probability `P^rnd_{kk′}` for a single cell.
///
/// Evaluated without sign cancellation: with `j = min(k, k′)` and
/// `d = |k − k′|` the phase average of `(1+v cos)^k (1−v cos)^{k′}` equals the
/// average of `((1−v²) + v² sin²)^j (1 + v cos)^d`, whose expansion has only
/// nonnegative terms.
pub fn random_phase_entry(energy: f64, vis_magnitude: f64, k: usize, k_prime: usize) -> f64 {
    let lf = LnFactorials::up_to(2 * (k + k_prime) + 2);
    random_phase_entry_with(energy, vis_magnitude, k, k_prime, &lf)
}

fn random_phase_entry_with(energy: f64, v: f64, k: usize, kp: usize, lf: &LnFactorials) -> f64 {
    if energy == 0.0 {
        return if k == 0 && kp == 0 { 1.0 } else { 0.0 };
    }
    let j = k.min(kp);
    let d = k.max(kp) - j;
    let ln_v = v.ln();
    let one_minus_v2 = (1.0 - v) * (1.0 + v);
    let ln_w = one_minus_v2.ln();

    let mut avg = 0.0;
    for i in 0..=j {
        // ((1 − v²)^{j−i}) vanishes at v = 1 unless i = j.
        let w_part = match j - i {
            0 => 0.0,
            p if one_minus_v2 > 0.0 => p as f64 * ln_w,
            _ => continue,
        };
        let base = lf.ln_binomial(j, i) + w_part;
        for t in 0..=(d / 2) {
            let power = 2 * (i + t);
            let v_part = match power {
                0 => 0.0,
                p if v > 0.0 => p as f64 * ln_v,
                _ => continue,
            };
            let ln_term = base + v_part + lf.ln_binomial(d, 2 * t) + ln_mixed_moment(i, t, lf);
            avg += ln_term.exp();
        }
    }
    let prefactor = -energy + (k + kp) as f64 * (0.5 * energy).ln() - lf.get(k) - lf.get(kp);
    prefactor.exp() * avg
}

/// `ln ⟨sin^{2i} φ cos^{2t} φ⟩` over a uniform phase.
#[inline]
fn ln_mixed_moment(i: usize, t: usize, lf: &LnFactorials) -> f64 {
    lf.get(2 * i) - 2.0 * i as f64 * LN_2 - lf.get(i) + lf.get(2 * t)
        - 2.0 * t as f64 * LN_2
        - lf.get(t)
        - lf.get(i + t)
}

/// Phase average of `cos^j φ` over a uniform phase.
pub fn cosine_moment(j: usize) -> f64 {
    if j % 2 == 1 {
        return 0.0;
    }
    // binom(j, j/2) / 2^j = Π_{i=1}^{j/2} (2i − 1) / (2i)
    (1..=j / 2).fold(1.0, |acc, i| acc * (2 * i - 1) as f64 / (2 * i) as f64)
}

/// Untruncated `P^rnd_{kk′}` from the double binomial expansion over
/// `(1+v cos)^k (1−v cos)^{k′}` with cosine moments.
///
/// The sum alternates in sign and loses roughly `k + k′` bits to
/// cancellation, so it is only reliable for small counts.
/// [`random_phase_entry`] computes the same quantity stably.
pub fn binomial_moment_entry(energy: f64, vis_magnitude: f64, k: usize, k_prime: usize) -> f64 {
    if energy == 0.0 {
        return if k == 0 && k_prime == 0 { 1.0 } else { 0.0 };
    }
    let lf = LnFactorials::up_to(k + k_prime);
    let mut sum = 0.0;
    for m in 0..=k {
        for n in 0..=k_prime {
            let j = m + n;
            if j % 2 == 1 {
                continue;
            }
            let v_pow = if j == 0 {
                1.0
            } else {
                vis_magnitude.powi(j as i32)
            };
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let ln_coeff = -lf.get(m) - lf.get(k - m) - lf.get(n) - lf.get(k_prime - n);
            sum += sign * v_pow * ln_coeff.exp() * cosine_moment(j);
        }
    }
    let total = (k + k_prime) as f64;
    (-energy + total * energy.ln() - total * LN_2).exp() * sum
}

/// Marginal of `Δk = k′ − k`: `P_{Δk} = Σ_k P[k][k + Δk]`.
pub fn marginal_difference(dist: &JointPhotocountDistribution) -> CountDifferenceDistribution {
    let kmax = dist.truncation;
    let mut probs = vec![0.0; 2 * kmax + 1];
    for k in 0..=kmax {
        for kp in 0..=kmax {
            probs[kp + kmax - k] += dist.get(k, kp);
        }
    }
    CountDifferenceDistribution {
        truncation: kmax,
        probs,
    }
}

/// Visibility set by quarter-wave (`theta`) and half-wave (`phi`) plate
/// angles ahead of a Wollaston polarizer: `e^{i(4φ−2θ)} cos 2θ`.
pub fn waveplate_visibility(theta: f64, phi: f64) -> ComplexVisibility {
    let c = (2.0 * theta).cos();
    let phase = 4.0 * phi - 2.0 * theta;
    ComplexVisibility {
        magnitude: c.abs().min(1.0),
        phase: normalize_phase(if c < 0.0 { phase + PI } else { phase }),
    }
}

/// `𝒱 = 2αβ* / (|α|² + |β|²) · overlap` for input amplitudes `α`, `β` and the
/// modal overlap of the two normalized waveforms.
pub fn visibility_from_amplitudes(
    amp_a: Complex64,
    amp_b: Complex64,
    modal_overlap: Complex64,
) -> Result<ComplexVisibility> {
    let power = amp_a.norm_sqr() + amp_b.norm_sqr();
    if !(power > 0.0) {
        return Err(Error::domain("both amplitudes are zero"));
    }
    if modal_overlap.norm() > 1.0 + MAGNITUDE_SLACK {
        return Err(Error::domain(format!(
            "modal overlap magnitude {} exceeds 1",
            modal_overlap.norm()
        )));
    }
    ComplexVisibility::from_complex(amp_a * amp_b.conj() * 2.0 / power * modal_overlap)
}

impl fmt::Display for ComplexVisibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·e^(i{})", self.magnitude, self.phase)
    }
}
