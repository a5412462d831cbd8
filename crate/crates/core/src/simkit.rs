//! Monte Carlo simulation of random-phase trials and Neyman–Pearson
//! decisions between two visibility hypotheses.
//!
//! Every dataset draws from its own ChaCha stream addressed by the seed, a
//! label for the experiment, and the dataset index, so ensembles give the
//! same result regardless of how they are scheduled across threads.

use std::f64::consts::TAU;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::chernoff::{chernoff_information, OutcomeDistributionPair};
use crate::error::{Error, Result};
use crate::photostat::{joint_random_phase, DetectionParams, JointPhotocountDistribution};

/// Probabilities below this are raised to it before taking logarithms.
pub const PROBABILITY_FLOOR: f64 = 1e-300;

pub const DEFAULT_ENSEMBLE: usize = 15_000;
pub const DEFAULT_SEED: u64 = 42;

/// Poisson means sampled in one sequential search stay below this.
const POISSON_CHUNK: f64 = 30.0;

/// Default `N` values for the error-versus-repetitions curve.
pub fn default_repetition_grid() -> Vec<usize> {
    let mut grid: Vec<usize> = (1..=10).collect();
    grid.extend([15, 20, 30, 40, 50]);
    grid
}

/// Counts `(k, k′)` registered at the `+` and `−` ports in one realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrialOutcome {
    pub k_plus: usize,
    pub k_minus: usize,
}

impl TrialOutcome {
    pub fn new(k_plus: usize, k_minus: usize) -> Self {
        Self { k_plus, k_minus }
    }

    pub fn clamped(self, truncation: usize) -> Self {
        Self::new(self.k_plus.min(truncation), self.k_minus.min(truncation))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    V1,
    V2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    pub true_visibility: f64,
    pub energy: f64,
    pub truncation: usize,
    /// Realizations per dataset, `N`.
    pub repetitions: usize,
    /// Datasets per estimate, `M`.
    pub ensemble_size: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.true_visibility) {
            return Err(Error::domain(format!(
                "visibility magnitude must be in [0, 1], got {}",
                self.true_visibility
            )));
        }
        if !self.energy.is_finite() || self.energy < 0.0 {
            return Err(Error::domain(format!(
                "energy must be >= 0, got {}",
                self.energy
            )));
        }
        if self.truncation < 1 {
            return Err(Error::domain("truncation K must be >= 1"));
        }
        if self.repetitions < 1 || self.ensemble_size < 1 {
            return Err(Error::domain("N and M must both be >= 1"));
        }
        Ok(())
    }

    fn with_visibility(&self, v: f64) -> Self {
        Self {
            true_visibility: v,
            ..*self
        }
    }

    /// Key of the stream family used for the datasets of this configuration
    /// when `truth` holds.
    fn stream_key(&self, truth: Hypothesis) -> u64 {
        let tag = match truth {
            Hypothesis::V1 => 1,
            Hypothesis::V2 => 2,
        };
        [
            tag,
            self.repetitions as u64,
            self.true_visibility.to_bits(),
            self.energy.to_bits(),
            self.truncation as u64,
        ]
        .into_iter()
        .fold(splitmix64(self.seed), |acc, x| splitmix64(acc ^ x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorEstimate {
    pub error_mean: f64,
    /// `√(ε(1−ε)/M)`.
    pub error_std: f64,
    /// Fraction of datasets generated under `V2` decided as `V1`.
    pub conditional_v1_given_v2: f64,
    /// Fraction of datasets generated under `V1` decided as `V2`.
    pub conditional_v2_given_v1: f64,
}

impl ErrorEstimate {
    fn from_conditionals(v1_given_v2: f64, v2_given_v1: f64, ensemble: usize) -> Self {
        let mean = 0.5 * (v1_given_v2 + v2_given_v1);
        Self {
            error_mean: mean,
            error_std: (mean * (1.0 - mean) / ensemble as f64).sqrt(),
            conditional_v1_given_v2: v1_given_v2,
            conditional_v2_given_v1: v2_given_v1,
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Independent generator for dataset `index` of the family `key`.
pub fn dataset_rng(key: u64, index: u64) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    let mut state = key;
    for chunk in seed.chunks_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(seed);
    rng.set_stream(index);
    rng
}

/// Poisson variate by inversion with sequential search. Means of
/// [`POISSON_CHUNK`] or more are split into smaller independent parts.
pub fn sample_poisson<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> usize {
    if !(mean > 0.0) {
        return 0;
    }
    let parts = (mean / POISSON_CHUNK).floor() as usize + 1;
    let part = mean / parts as f64;
    (0..parts).map(|_| poisson_inversion(rng, part)).sum()
}

fn poisson_inversion<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> usize {
    let u: f64 = rng.random();
    let mut k = 0;
    let mut p = (-mean).exp();
    let mut cdf = p;
    while u > cdf {
        k += 1;
        p *= mean / k as f64;
        let next = cdf + p;
        if next == cdf {
            break;
        }
        cdf = next;
    }
    k
}

/// One random-phase realization: `φ` uniform on `[0, 2π)`, then independent
/// Poisson counts at `I±(φ)`, each clamped at `K`.
pub fn sample_outcome<R: Rng + ?Sized>(
    rng: &mut R,
    energy: f64,
    vis_magnitude: f64,
    truncation: usize,
) -> TrialOutcome {
    let phi = rng.random::<f64>() * TAU;
    let plus = 0.5 * energy * (1.0 + vis_magnitude * phi.cos());
    let minus = (energy - plus).max(0.0);
    TrialOutcome::new(sample_poisson(rng, plus), sample_poisson(rng, minus)).clamped(truncation)
}

/// `N` realizations of the configuration.
pub fn sample_dataset<R: Rng + ?Sized>(
    rng: &mut R,
    config: &ExperimentConfig,
) -> Vec<TrialOutcome> {
    (0..config.repetitions)
        .map(|_| {
            sample_outcome(
                rng,
                config.energy,
                config.true_visibility,
                config.truncation,
            )
        })
        .collect()
}

/// Per-cell `ln p1 − ln p2` with both probabilities floored at
/// [`PROBABILITY_FLOOR`].
#[derive(Debug, Clone)]
pub struct LogRatioTable {
    truncation: usize,
    cells: Vec<f64>,
}

impl LogRatioTable {
    pub fn new(p1: &JointPhotocountDistribution, p2: &JointPhotocountDistribution) -> Result<Self> {
        if p1.truncation() != p2.truncation() {
            return Err(Error::ShapeMismatch {
                left: p1.probs().len(),
                right: p2.probs().len(),
            });
        }
        let cells = p1
            .probs()
            .iter()
            .zip(p2.probs())
            .map(|(&a, &b)| a.max(PROBABILITY_FLOOR).ln() - b.max(PROBABILITY_FLOOR).ln())
            .collect();
        Ok(Self {
            truncation: p1.truncation(),
            cells,
        })
    }

    pub fn get(&self, outcome: TrialOutcome) -> Result<f64> {
        let k = self.truncation;
        if outcome.k_plus > k || outcome.k_minus > k {
            return Err(Error::domain(format!(
                "outcome ({}, {}) outside the table with K = {k}",
                outcome.k_plus, outcome.k_minus
            )));
        }
        Ok(self.cells[outcome.k_plus * (k + 1) + outcome.k_minus])
    }

    pub fn sum(&self, dataset: &[TrialOutcome]) -> Result<f64> {
        dataset.iter().map(|&o| self.get(o)).sum()
    }

    /// `V1` iff the summed log-ratio is strictly positive.
    pub fn decide(&self, dataset: &[TrialOutcome]) -> Result<Hypothesis> {
        Ok(if self.sum(dataset)? > 0.0 {
            Hypothesis::V1
        } else {
            Hypothesis::V2
        })
    }
}

/// `Σ ln p1(outcome) − ln p2(outcome)` over the dataset.
pub fn log_likelihood_ratio(
    dataset: &[TrialOutcome],
    p1: &JointPhotocountDistribution,
    p2: &JointPhotocountDistribution,
) -> Result<f64> {
    LogRatioTable::new(p1, p2)?.sum(dataset)
}

/// Decides `V1` iff `Π p1 > Π p2`; ties go to `V2`.
pub fn neyman_pearson(
    dataset: &[TrialOutcome],
    p1: &JointPhotocountDistribution,
    p2: &JointPhotocountDistribution,
) -> Result<Hypothesis> {
    LogRatioTable::new(p1, p2)?.decide(dataset)
}

/// Fraction of `M` datasets from `config` for which the test decides `wrong`.
fn error_fraction(
    config: &ExperimentConfig,
    truth: Hypothesis,
    table: &LogRatioTable,
) -> Result<f64> {
    config.validate()?;
    let wrong = match truth {
        Hypothesis::V1 => Hypothesis::V2,
        Hypothesis::V2 => Hypothesis::V1,
    };
    let key = config.stream_key(truth);
    let errors = (0..config.ensemble_size)
        .into_par_iter()
        .map(|i| {
            let mut rng = dataset_rng(key, i as u64);
            let data = sample_dataset(&mut rng, config);
            Ok(usize::from(table.decide(&data)? == wrong))
        })
        .sum::<Result<usize>>()?;
    Ok(errors as f64 / config.ensemble_size as f64)
}

/// Conditional and average error rates of the test `(p1, p2)`, with datasets
/// drawn from `under_v1` and `under_v2`.
pub fn estimate_error(
    under_v1: &ExperimentConfig,
    under_v2: &ExperimentConfig,
    p1: &JointPhotocountDistribution,
    p2: &JointPhotocountDistribution,
) -> Result<ErrorEstimate> {
    if under_v1.repetitions != under_v2.repetitions
        || under_v1.ensemble_size != under_v2.ensemble_size
    {
        return Err(Error::domain("both hypotheses need the same N and M"));
    }
    let table = LogRatioTable::new(p1, p2)?;
    let v2_given_v1 = error_fraction(under_v1, Hypothesis::V1, &table)?;
    let v1_given_v2 = error_fraction(under_v2, Hypothesis::V2, &table)?;
    Ok(ErrorEstimate::from_conditionals(
        v1_given_v2,
        v2_given_v1,
        under_v1.ensemble_size,
    ))
}

/// Random-phase tables for `v1` and `v2` at the configuration's energy and
/// truncation.
pub fn hypothesis_tables(
    v1: f64,
    v2: f64,
    config: &ExperimentConfig,
) -> Result<(JointPhotocountDistribution, JointPhotocountDistribution)> {
    let params = DetectionParams::ideal(config.energy, config.truncation)?;
    Ok((
        joint_random_phase(params, v1)?,
        joint_random_phase(params, v2)?,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub true_v2: Vec<f64>,
    pub estimates: Vec<ErrorEstimate>,
    pub band_lo: f64,
    pub band_hi: f64,
}

/// Tests fixed at `(v1, designed_v2)` while the true second visibility ranges
/// over `v2_grid`. The band is the range of the average error across the
/// grid. `config.true_visibility` is ignored.
pub fn worst_case_sweep(
    v1: f64,
    v2_grid: &[f64],
    designed_v2: f64,
    config: &ExperimentConfig,
) -> Result<SweepResult> {
    let max = v2_grid.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if v2_grid.is_empty() || max != designed_v2 {
        return Err(Error::domain(format!(
            "designed visibility {designed_v2} must be the largest grid value"
        )));
    }
    if v2_grid.iter().any(|v| !(0.0..=designed_v2).contains(v)) {
        return Err(Error::domain("grid values must lie in [0, designed_v2]"));
    }
    let (p1, p2) = hypothesis_tables(v1, designed_v2, config)?;
    let table = LogRatioTable::new(&p1, &p2)?;
    let v2_given_v1 = error_fraction(&config.with_visibility(v1), Hypothesis::V1, &table)?;
    let estimates = v2_grid
        .iter()
        .map(|&v| {
            let v1_given_v2 = error_fraction(&config.with_visibility(v), Hypothesis::V2, &table)?;
            Ok(ErrorEstimate::from_conditionals(
                v1_given_v2,
                v2_given_v1,
                config.ensemble_size,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let means = estimates.iter().map(|e| e.error_mean);
    let band_lo = means.clone().fold(f64::INFINITY, f64::min);
    let band_hi = means.fold(f64::NEG_INFINITY, f64::max);
    Ok(SweepResult {
        true_v2: v2_grid.to_vec(),
        estimates,
        band_lo,
        band_hi,
    })
}

/// One row of the error-versus-`N` curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorCurvePoint {
    pub repetitions: usize,
    pub estimate: ErrorEstimate,
    pub chernoff_bound: f64,
    pub refined_bound: f64,
    /// `None` when no band grid was requested.
    pub band: Option<(f64, f64)>,
}

/// Simulated error for every `N` in `repetitions`, next to the Chernoff
/// bound and its refinement. `band_grid`, when given, adds the worst-case
/// envelope for true `V2` values in the grid.
pub fn error_curve(
    v1: f64,
    v2: f64,
    repetitions: &[usize],
    base: &ExperimentConfig,
    band_grid: Option<&[f64]>,
) -> Result<Vec<ErrorCurvePoint>> {
    let (p1, p2) = hypothesis_tables(v1, v2, base)?;
    let info = chernoff_information(&OutcomeDistributionPair::from_joint(&p1, &p2)?);
    repetitions
        .iter()
        .map(|&n| {
            let config = ExperimentConfig {
                repetitions: n,
                ..*base
            };
            let estimate = estimate_error(
                &config.with_visibility(v1),
                &config.with_visibility(v2),
                &p1,
                &p2,
            )?;
            let band = match band_grid {
                Some(grid) => {
                    let sweep = worst_case_sweep(v1, grid, v2, &config)?;
                    Some((sweep.band_lo, sweep.band_hi))
                }
                None => None,
            };
            Ok(ErrorCurvePoint {
                repetitions: n,
                estimate,
                chernoff_bound: info.bound(n as u64),
                refined_bound: info.refined_bound(n as u64).unwrap_or(f64::NAN),
                band,
            })
        })
        .collect()
}

pub fn write_error_curve_csv<W: Write>(points: &[ErrorCurvePoint], mut out: W) -> io::Result<()> {
    writeln!(
        out,
        "N,eps_mean,eps_std,chernoff_bound,refined_bound,band_lo,band_hi"
    )?;
    for p in points {
        let (lo, hi) = p.band.unwrap_or((f64::NAN, f64::NAN));
        writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            p.repetitions,
            p.estimate.error_mean,
            p.estimate.error_std,
            p.chernoff_bound,
            p.refined_bound,
            lo,
            hi
        )?;
    }
    Ok(())
}
