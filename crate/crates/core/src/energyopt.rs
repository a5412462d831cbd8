//! Information gained per detected photon, `C/ηn̄`, as a function of the
//! energy spent in one realization, and the energy that maximizes it.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::chernoff::{
    chernoff_coherent_closed_form, chernoff_information, OutcomeDistributionPair,
};
use crate::error::{Error, Result};
use crate::optim::golden_section_max;
use crate::photostat::{
    joint_random_phase, marginal_difference, DetectionParams, JointPhotocountDistribution,
};

/// Poisson tail mass of the total count allowed beyond the truncation.
pub const TRUNCATION_TAIL: f64 = 1e-9;

pub const DEFAULT_RANGE: (f64, f64) = (0.1, 30.0);
pub const DEFAULT_TOL: f64 = 0.05;
pub const DEFAULT_GRID_POINTS: usize = 60;
pub const DEFAULT_MAP_SIZE: usize = 50;

/// Which statistics the receiver uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatisticsMode {
    /// Full joint counts, truncation raised until it is negligible.
    Joint,
    /// Joint counts resolved only up to the given truncation.
    Truncated,
    /// Only the count difference `k′ − k`.
    Difference,
}

/// `max(15, ⌈ηn̄ + 8√ηn̄⌉)`.
pub fn adaptive_truncation(energy: f64) -> usize {
    15.max((energy + 8.0 * energy.sqrt()).ceil() as usize)
}

/// Smallest `K ≥ start` with `P(T > K) < TRUNCATION_TAIL` for
/// `T ~ Poisson(energy)`.
fn negligible_truncation(energy: f64, start: usize) -> usize {
    let mut k = start.max(1);
    // Upper tail P(T ≥ k + 1) is the last bucket at truncation k + 1.
    while tail_beyond(energy, k) >= TRUNCATION_TAIL {
        k += 1;
    }
    k
}

fn tail_beyond(energy: f64, k: usize) -> f64 {
    if energy == 0.0 {
        return 0.0;
    }
    let ln_e = energy.ln();
    let mut ln_term = -energy;
    let mut head = 0.0;
    for i in 0..=k {
        if i > 0 {
            ln_term += ln_e - (i as f64).ln();
        }
        head += ln_term.exp();
    }
    (1.0 - head).max(0.0)
}

fn truncation_for(mode: StatisticsMode, energy: f64, truncation: usize) -> usize {
    match mode {
        StatisticsMode::Truncated => truncation,
        StatisticsMode::Joint | StatisticsMode::Difference => {
            truncation.max(adaptive_truncation(energy))
        }
    }
}

fn check_magnitude(v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::domain(format!(
            "visibility magnitude must be in [0, 1], got {v}"
        )));
    }
    Ok(())
}

fn ratio_from_tables(
    a: &JointPhotocountDistribution,
    b: &JointPhotocountDistribution,
    mode: StatisticsMode,
    energy: f64,
) -> Result<f64> {
    let pair = match mode {
        StatisticsMode::Difference => OutcomeDistributionPair::from_difference(
            &marginal_difference(a),
            &marginal_difference(b),
        )?,
        _ => OutcomeDistributionPair::from_joint(a, b)?,
    };
    Ok(chernoff_information(&pair).nats() / energy)
}

fn ratio_at(v1: f64, v2: f64, energy: f64, truncation: usize, mode: StatisticsMode) -> Result<f64> {
    let params = DetectionParams::ideal(energy, truncation)?;
    let a = joint_random_phase(params, v1)?;
    let b = joint_random_phase(params, v2)?;
    ratio_from_tables(&a, &b, mode, energy)
}

/// `C^rnd / ηn̄` for the random-phase pair `(v1, v2)` at one energy.
///
/// In [`StatisticsMode::Joint`] and [`StatisticsMode::Difference`] the
/// truncation is raised to [`adaptive_truncation`] when that is larger.
pub fn info_per_photon(
    v1: f64,
    v2: f64,
    energy: f64,
    truncation: usize,
    mode: StatisticsMode,
) -> Result<f64> {
    check_magnitude(v1)?;
    check_magnitude(v2)?;
    if !energy.is_finite() || energy <= 0.0 {
        return Err(Error::domain(format!("energy must be > 0, got {energy}")));
    }
    if v1 == v2 {
        return Ok(0.0);
    }
    let (hi, lo) = ordered(v1, v2);
    ratio_at(
        hi,
        lo,
        energy,
        truncation_for(mode, energy, truncation),
        mode,
    )
}

/// Larger magnitude first so that swapped arguments run the same arithmetic.
fn ordered(v1: f64, v2: f64) -> (f64, f64) {
    if v1 >= v2 {
        (v1, v2)
    } else {
        (v2, v1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOptions {
    pub range: (f64, f64),
    /// Absolute tolerance of the refined optimum energy.
    pub tol: f64,
    pub grid_points: usize,
    pub truncation: usize,
    pub mode: StatisticsMode,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            range: DEFAULT_RANGE,
            tol: DEFAULT_TOL,
            grid_points: DEFAULT_GRID_POINTS,
            truncation: 15,
            mode: StatisticsMode::Joint,
        }
    }
}

impl ScanOptions {
    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.range;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::domain(format!(
                "energy range must satisfy 0 < lo < hi, got [{lo}, {hi}]"
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::domain("tolerance must be > 0"));
        }
        if self.grid_points < 3 {
            return Err(Error::domain("at least 3 grid points are required"));
        }
        if self.truncation < 1 {
            return Err(Error::domain("truncation K must be >= 1"));
        }
        Ok(())
    }

    /// Truncation used for the whole scan.
    pub fn scan_truncation(&self) -> usize {
        match self.mode {
            StatisticsMode::Truncated => self.truncation,
            _ => negligible_truncation(self.range.1, self.truncation),
        }
    }

    /// Log-spaced coarse grid over the range.
    pub fn grid(&self) -> Vec<f64> {
        log_grid(self.range.0, self.range.1, self.grid_points)
    }
}

pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / (points - 1) as f64;
    let mut out: Vec<f64> = (0..points).map(|i| (a + step * i as f64).exp()).collect();
    out[0] = lo;
    out[points - 1] = hi;
    out
}

/// `n` evenly spaced values covering `[lo, hi]`.
pub fn linear_lattice(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyScanResult {
    /// Scanned energies, strictly increasing, including the refined optimum.
    pub energies: Vec<f64>,
    pub ratios: Vec<f64>,
    pub optimum_energy: f64,
    pub optimum_ratio: f64,
    pub truncation: usize,
}

impl EnergyScanResult {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "energy,ratio")?;
        for (e, r) in self.energies.iter().zip(&self.ratios) {
            writeln!(out, "{e:.16e},{r:.16e}")?;
        }
        Ok(())
    }
}

/// Energy per realization maximizing `C^rnd/ηn̄`: a log-spaced coarse scan
/// followed by golden-section refinement between the neighbours of the best
/// grid point.
pub fn optimal_energy(v1: f64, v2: f64, opts: &ScanOptions) -> Result<EnergyScanResult> {
    check_magnitude(v1)?;
    check_magnitude(v2)?;
    opts.validate()?;
    if v1 == v2 {
        return Err(Error::Indistinguishable(format!(
            "|V1| = |V2| = {v1}; the two hypotheses are indistinguishable"
        )));
    }
    let (a, b) = ordered(v1, v2);
    let k = opts.scan_truncation();
    let grid = opts.grid();
    let ratios = grid
        .iter()
        .map(|&e| ratio_at(a, b, e, k, opts.mode))
        .collect::<Result<Vec<_>>>()?;
    refine(a, b, grid, ratios, k, opts)
}

fn refine(
    v1: f64,
    v2: f64,
    mut energies: Vec<f64>,
    mut ratios: Vec<f64>,
    truncation: usize,
    opts: &ScanOptions,
) -> Result<EnergyScanResult> {
    let best = argmax(&ratios);
    let lo = energies[best.saturating_sub(1)];
    let hi = energies[(best + 1).min(energies.len() - 1)];
    let mut failure = None;
    let (x, fx) = golden_section_max(
        |e| match ratio_at(v1, v2, e, truncation, opts.mode) {
            Ok(r) => r,
            Err(err) => {
                failure.get_or_insert(err);
                f64::NEG_INFINITY
            }
        },
        lo,
        hi,
        opts.tol,
        200,
    );
    if let Some(err) = failure {
        return Err(err);
    }
    let (optimum_energy, optimum_ratio) = if fx > ratios[best] {
        (x, fx)
    } else {
        (energies[best], ratios[best])
    };
    if let Err(pos) = energies.binary_search_by(|e| e.total_cmp(&optimum_energy)) {
        energies.insert(pos, optimum_energy);
        ratios.insert(pos, optimum_ratio);
    }
    Ok(EnergyScanResult {
        energies,
        ratios,
        optimum_energy,
        optimum_ratio,
        truncation,
    })
}

fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in xs.iter().enumerate() {
        if *x > xs[best] {
            best = i;
        }
    }
    best
}

/// Maximum ratio and optimal energy over a square lattice of `|𝒱|` values.
/// Diagonal cells are indistinguishable and hold `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomPhaseMap {
    pub lattice: Vec<f64>,
    pub max_ratio: Vec<Option<f64>>,
    pub opt_energy: Vec<Option<f64>>,
}

impl RandomPhaseMap {
    pub fn size(&self) -> usize {
        self.lattice.len()
    }

    pub fn max_ratio_at(&self, i: usize, j: usize) -> Option<f64> {
        self.max_ratio[i * self.size() + j]
    }

    pub fn opt_energy_at(&self, i: usize, j: usize) -> Option<f64> {
        self.opt_energy[i * self.size() + j]
    }

    /// `v1,v2,max_ratio,opt_energy` rows; flagged cells print `NaN`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "v1,v2,max_ratio,opt_energy")?;
        let n = self.size();
        for i in 0..n {
            for j in 0..n {
                writeln!(
                    out,
                    "{:.16e},{:.16e},{},{}",
                    self.lattice[i],
                    self.lattice[j],
                    fmt_opt(self.max_ratio_at(i, j)),
                    fmt_opt(self.opt_energy_at(i, j)),
                )?;
            }
        }
        Ok(())
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    match x {
        Some(v) => format!("{v:.16e}"),
        None => "NaN".to_string(),
    }
}

/// Runs [`optimal_energy`] for every off-diagonal lattice pair. The coarse
/// scan shares one table per `(|𝒱|, energy)` across all pairs; cells are
/// independent and assembled by index.
pub fn random_phase_map(lattice: &[f64], opts: &ScanOptions) -> Result<RandomPhaseMap> {
    for &v in lattice {
        check_magnitude(v)?;
    }
    opts.validate()?;
    let n = lattice.len();
    let k = opts.scan_truncation();
    let grid = opts.grid();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .filter(|&(i, j)| lattice[i] != lattice[j])
        .collect();

    // coarse[e][p] = ratio of pair p at grid energy e
    let coarse = grid
        .iter()
        .map(|&e| {
            let params = DetectionParams::ideal(e, k)?;
            let tables = lattice
                .par_iter()
                .map(|&v| joint_random_phase(params, v))
                .collect::<Result<Vec<_>>>()?;
            pairs
                .par_iter()
                .map(|&(i, j)| {
                    let (a, b) = if lattice[i] >= lattice[j] {
                        (i, j)
                    } else {
                        (j, i)
                    };
                    ratio_from_tables(&tables[a], &tables[b], opts.mode, e)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let results = pairs
        .par_iter()
        .enumerate()
        .map(|(p, &(i, j))| {
            let ratios: Vec<f64> = coarse.iter().map(|row| row[p]).collect();
            let (a, b) = ordered(lattice[i], lattice[j]);
            refine(a, b, grid.clone(), ratios, k, opts)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut max_ratio = vec![None; n * n];
    let mut opt_energy = vec![None; n * n];
    for (&(i, j), r) in pairs.iter().zip(&results) {
        for cell in [i * n + j, j * n + i] {
            max_ratio[cell] = Some(r.optimum_ratio);
            opt_energy[cell] = Some(r.optimum_energy);
        }
    }
    Ok(RandomPhaseMap {
        lattice: lattice.to_vec(),
        max_ratio,
        opt_energy,
    })
}

/// `C^coh/ηn̄` over a square lattice of real visibility parts. The ratio
/// does not depend on the energy.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentMap {
    pub lattice: Vec<f64>,
    pub ratio: Vec<f64>,
}

impl CoherentMap {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.ratio[i * self.lattice.len() + j]
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "re_v1,re_v2,ratio")?;
        let n = self.lattice.len();
        for i in 0..n {
            for j in 0..n {
                writeln!(
                    out,
                    "{:.16e},{:.16e},{:.16e}",
                    self.lattice[i],
                    self.lattice[j],
                    self.at(i, j)
                )?;
            }
        }
        Ok(())
    }
}

pub fn coherent_map(lattice: &[f64]) -> Result<CoherentMap> {
    let n = lattice.len();
    let ratio = (0..n * n)
        .into_par_iter()
        .map(|c| {
            let (i, j) = (c / n, c % n);
            let (a, b) = if i <= j { (i, j) } else { (j, i) };
            Ok(chernoff_coherent_closed_form(1.0, lattice[a], lattice[b])?.nats())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoherentMap {
        lattice: lattice.to_vec(),
        ratio,
    })
}

/// One row of the information-per-photon curves for full statistics,
/// two-photon resolution and the count difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub energy: f64,
    pub joint: f64,
    pub truncated: f64,
    pub difference: f64,
}

pub fn resolution_curves(
    v1: f64,
    v2: f64,
    energies: &[f64],
    resolved: usize,
) -> Result<Vec<CurvePoint>> {
    energies
        .par_iter()
        .map(|&e| {
            Ok(CurvePoint {
                energy: e,
                joint: info_per_photon(v1, v2, e, 15, StatisticsMode::Joint)?,
                truncated: info_per_photon(v1, v2, e, resolved, StatisticsMode::Truncated)?,
                difference: info_per_photon(v1, v2, e, 15, StatisticsMode::Difference)?,
            })
        })
        .collect()
}

pub fn write_curves_csv<W: Write>(points: &[CurvePoint], mut out: W) -> io::Result<()> {
    writeln!(out, "energy,ratio_joint,ratio_k2,ratio_diff")?;
    for p in points {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e}",
            p.energy, p.joint, p.truncated, p.difference
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation_rules() {
        assert_eq!(adaptive_truncation(1.0), 15);
        assert_eq!(adaptive_truncation(30.0), 74);
        let k = negligible_truncation(30.0, 15);
        assert!(tail_beyond(30.0, k) < TRUNCATION_TAIL);
        assert!(tail_beyond(30.0, k - 1) >= TRUNCATION_TAIL);
    }

    #[test]
    fn equal_visibilities_carry_no_information() {
        for &e in &[0.1, 2.0, 9.0] {
            assert_eq!(
                info_per_photon(0.7, 0.7, e, 15, StatisticsMode::Joint).unwrap(),
                0.0
            );
        }
        assert!(info_per_photon(0.9, 0.5, 0.0, 15, StatisticsMode::Joint).is_err());
        assert!(info_per_photon(1.2, 0.5, 1.0, 15, StatisticsMode::Joint).is_err());
    }

    #[test]
    fn ratio_grows_linearly_at_low_energy() {
        let a = info_per_photon(0.98, 0.56, 1e-3, 15, StatisticsMode::Joint).unwrap();
        let b = info_per_photon(0.98, 0.56, 2e-3, 15, StatisticsMode::Joint).unwrap();
        assert!((b / a - 2.0).abs() < 0.01, "{}", b / a);
    }

    #[test]
    fn resolution_ordering_at_operating_point() {
        let joint = info_per_photon(0.98, 0.56, 6.3, 15, StatisticsMode::Joint).unwrap();
        let k2 = info_per_photon(0.98, 0.56, 6.3, 2, StatisticsMode::Truncated).unwrap();
        let diff = info_per_photon(0.98, 0.56, 6.3, 15, StatisticsMode::Difference).unwrap();
        assert!(joint > k2 && k2 > diff, "{joint} {k2} {diff}");
    }

    #[test]
    fn optimum_is_swap_symmetric_and_flags_diagonal() {
        let opts = ScanOptions {
            grid_points: 20,
            range: (1.0, 15.0),
            ..ScanOptions::default()
        };
        let a = optimal_energy(0.98, 0.56, &opts).unwrap();
        let b = optimal_energy(0.56, 0.98, &opts).unwrap();
        assert_eq!(a, b);
        assert!(a.energies.windows(2).all(|w| w[0] < w[1]));
        let max = a.ratios.iter().cloned().fold(f64::MIN, f64::max);
        assert_eq!(max, a.optimum_ratio);
        assert!(matches!(
            optimal_energy(0.4, 0.4, &opts),
            Err(Error::Indistinguishable(_))
        ));
    }

    #[test]
    fn small_random_phase_map() {
        let lattice = [0.0, 0.5, 1.0];
        let opts = ScanOptions {
            grid_points: 12,
            range: (0.5, 12.0),
            ..ScanOptions::default()
        };
        let map = random_phase_map(&lattice, &opts).unwrap();
        for i in 0..3 {
            assert!(map.max_ratio_at(i, i).is_none());
            for j in 0..3 {
                assert_eq!(map.max_ratio_at(i, j), map.max_ratio_at(j, i));
            }
        }
        let direct = optimal_energy(1.0, 0.5, &opts).unwrap();
        assert_eq!(map.max_ratio_at(2, 1), Some(direct.optimum_ratio));
        assert_eq!(map.opt_energy_at(1, 2), Some(direct.optimum_energy));
        assert!(map.max_ratio_at(2, 0).unwrap() > map.max_ratio_at(2, 1).unwrap());

        let mut buf = Vec::new();
        map.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 10);
        assert!(text.lines().nth(1).unwrap().ends_with("NaN,NaN"));
    }

    #[test]
    fn coherent_map_values() {
        let lattice = linear_lattice(-1.0, 1.0, 5);
        let map = coherent_map(&lattice).unwrap();
        assert!((map.at(4, 0) - 1.0).abs() < 1e-12);
        for i in 0..5 {
            assert_eq!(map.at(i, i), 0.0);
            for j in 0..5 {
                assert_eq!(map.at(i, j), map.at(j, i));
            }
        }
    }

    #[test]
    fn random_phase_never_beats_coherent() {
        let lattice = [0.0, 0.3, 0.56, 0.98, 1.0];
        for &a in &lattice {
            for &b in &lattice {
                for &e in &[0.5, 3.0, 8.0] {
                    let rnd = info_per_photon(a, b, e, 15, StatisticsMode::Joint).unwrap();
                    let coh = chernoff_coherent_closed_form(e, a, b).unwrap().nats() / e;
                    assert!(rnd <= coh + 1e-12, "({a},{b},{e}): {rnd} > {coh}");
                }
            }
        }
    }

    #[test]
    fn grids() {
        let g = log_grid(0.1, 30.0, 60);
        assert_eq!(g.len(), 60);
        assert_eq!((g[0], g[59]), (0.1, 30.0));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(linear_lattice(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
    }
}
