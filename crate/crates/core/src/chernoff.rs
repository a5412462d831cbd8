//! Chernoff information between two outcome distributions and the error
//! bounds built from it.
//!
//! Conventions: logarithms are natural. The optimal exponent `alpha_star` is
//! the weight on the *second* hypothesis in the tilted distribution
//! `p*(x) ∝ p1(x)^{1−α} p2(x)^α`, so that [`tilted_distribution`] evaluated at
//! `alpha_star` is equidistant in relative entropy from both hypotheses. The
//! minimized mixture `Σ p1^{1−α} p2^α` is the same family as
//! `Σ p1^α p2^{1−α}` with `α ↦ 1 − α`, so the information itself does not
//! depend on the labelling.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::optim::{bisect_increasing, golden_section_min};
use crate::photostat::{CountDifferenceDistribution, JointPhotocountDistribution};

/// Absolute tolerance on `alpha_star`.
pub const ALPHA_TOL: f64 = 1e-10;
/// Iteration cap of the golden-section search over `α`.
pub const ALPHA_MAX_ITER: usize = 200;

const NORMALIZATION_TOL: f64 = 1e-12;
const IDENTICAL_TOL: f64 = 1e-15;

/// Two probability tables over the same finite outcome set.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistributionPair {
    p1: Vec<f64>,
    p2: Vec<f64>,
}

impl OutcomeDistributionPair {
    pub fn new(p1: Vec<f64>, p2: Vec<f64>) -> Result<Self> {
        if p1.len() != p2.len() {
            return Err(Error::ShapeMismatch {
                left: p1.len(),
                right: p2.len(),
            });
        }
        check_table(&p1)?;
        check_table(&p2)?;
        Ok(Self { p1, p2 })
    }

    pub fn from_joint(
        first: &JointPhotocountDistribution,
        second: &JointPhotocountDistribution,
    ) -> Result<Self> {
        Self::new(first.probs().to_vec(), second.probs().to_vec())
    }

    pub fn from_difference(
        first: &CountDifferenceDistribution,
        second: &CountDifferenceDistribution,
    ) -> Result<Self> {
        Self::new(first.probs().to_vec(), second.probs().to_vec())
    }

    pub fn first(&self) -> &[f64] {
        &self.p1
    }

    pub fn second(&self) -> &[f64] {
        &self.p2
    }

    pub fn swapped(&self) -> Self {
        Self {
            p1: self.p2.clone(),
            p2: self.p1.clone(),
        }
    }

    fn identical(&self) -> bool {
        self.p1
            .iter()
            .zip(&self.p2)
            .all(|(a, b)| (a - b).abs() <= IDENTICAL_TOL)
    }

    fn has_common_support(&self) -> bool {
        self.p1
            .iter()
            .zip(&self.p2)
            .any(|(a, b)| *a > 0.0 && *b > 0.0)
    }

    /// `ln Σ p1^{1−α} p2^α`. Near zero it is evaluated as
    /// `ln(1 + Σ p1 (e^{α ln(p2/p1)} − 1))` to keep relative precision.
    pub fn log_mixture(&self, alpha: f64) -> f64 {
        Prepared::new(self).log_mixture(alpha)
    }

    /// Derivative of [`Self::log_mixture`]: mean of `ln(p2/p1)` under the
    /// tilted distribution, i.e. `D(p*‖p1) − D(p*‖p2)`.
    pub fn tilted_mean_log_ratio(&self, alpha: f64) -> f64 {
        Prepared::new(self).tilted_moments(alpha).0
    }
}

/// Cells of a pair reduced to what the α-objective needs.
struct Prepared {
    /// `(p1, ln(p2/p1))` over the common support.
    common: Vec<(f64, f64)>,
    /// Mass of `p1` where `p2` vanishes, and vice versa.
    only_first: f64,
    only_second: f64,
}

impl Prepared {
    fn new(pair: &OutcomeDistributionPair) -> Self {
        let mut common = Vec::new();
        let (mut only_first, mut only_second) = (0.0, 0.0);
        for (&a, &b) in pair.p1.iter().zip(&pair.p2) {
            match (a > 0.0, b > 0.0) {
                (true, true) => common.push((a, (b / a).ln())),
                (true, false) => only_first += a,
                (false, true) => only_second += b,
                (false, false) => {}
            }
        }
        Self {
            common,
            only_first,
            only_second,
        }
    }

    /// Near 1 the mixture is summed as an excess over 1; far below 1 that
    /// form cancels, so the plain positive sum is used instead.
    fn log_mixture(&self, alpha: f64) -> f64 {
        let mut direct: f64 = self
            .common
            .iter()
            .map(|&(a, lr)| a * (alpha * lr).exp())
            .sum();
        if alpha <= 0.0 {
            direct += self.only_first;
        }
        if alpha >= 1.0 {
            direct += self.only_second;
        }
        if direct < 0.5 {
            return direct.ln();
        }
        let mut excess: f64 = self
            .common
            .iter()
            .map(|&(a, lr)| a * (alpha * lr).exp_m1())
            .sum();
        if alpha > 0.0 {
            excess -= self.only_first;
        }
        if alpha >= 1.0 {
            excess += self.only_second;
        }
        excess.ln_1p()
    }

    /// First and second moments of `ln(p2/p1)` under the tilted distribution.
    fn tilted_moments(&self, alpha: f64) -> (f64, f64) {
        let (mut norm, mut first, mut second) = (0.0, 0.0, 0.0);
        for &(a, lr) in &self.common {
            let w = a * (alpha * lr).exp();
            norm += w;
            first += w * lr;
            second += w * lr * lr;
        }
        (first / norm, second / norm)
    }
}

/// Half-width of the window around the golden-section estimate in which the
/// stationary point is polished by bisection.
const POLISH_WINDOW: f64 = 1e-6;

/// Golden-section estimate of the minimizer, refined by bisection on the
/// derivative. Comparisons of objective values alone resolve a flat minimum
/// only to about the square root of machine precision.
fn minimize_exponent<F, D>(objective: F, derivative: D) -> f64
where
    F: FnMut(f64) -> f64,
    D: FnMut(f64) -> f64,
{
    let (guess, _) = golden_section_min(objective, 0.0, 1.0, ALPHA_TOL, ALPHA_MAX_ITER);
    let lo = (guess - POLISH_WINDOW).max(0.0);
    let hi = (guess + POLISH_WINDOW).min(1.0);
    bisect_increasing(derivative, lo, hi, 80).unwrap_or(guess)
}

fn check_table(p: &[f64]) -> Result<()> {
    if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::domain("probabilities must be finite and >= 0"));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::Unnormalized { sum });
    }
    Ok(())
}

/// Chernoff information, either finite or the flagged perfectly
/// distinguishable case (disjoint supports).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Information {
    Finite(f64),
    Infinite,
}

impl Information {
    /// Value in nats; `f64::INFINITY` for the flagged case.
    pub fn nats(self) -> f64 {
        match self {
            Information::Finite(c) => c,
            Information::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Information::Infinite)
    }
}

impl fmt::Display for Information {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Information::Finite(c) => write!(f, "{c}"),
            Information::Infinite => f.write_str("infinite"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChernoffResult {
    pub information: Information,
    /// Weight on the second hypothesis at the optimum.
    pub alpha_star: f64,
    /// Standard deviation of `ln(p1/p2)` under the tilted distribution at
    /// `alpha_star`.
    pub sigma: f64,
}

impl ChernoffResult {
    fn indistinguishable() -> Self {
        Self {
            information: Information::Finite(0.0),
            alpha_star: 0.5,
            sigma: 0.0,
        }
    }

    pub fn nats(&self) -> f64 {
        self.information.nats()
    }

    /// `e^{−NC}/2`.
    pub fn bound(&self, repetitions: u64) -> f64 {
        chernoff_bound(self.nats(), repetitions)
    }

    /// Second-order refinement of [`ChernoffResult::bound`].
    pub fn refined_bound(&self, repetitions: u64) -> Result<f64> {
        let c = match self.information {
            Information::Infinite => {
                return Err(Error::DegeneratePair(
                    "perfectly distinguishable pair".into(),
                ))
            }
            Information::Finite(c) if c <= 0.0 => {
                return Err(Error::DegeneratePair("zero Chernoff information".into()))
            }
            Information::Finite(c) => c,
        };
        if !(self.sigma > 0.0) {
            return Err(Error::DegeneratePair("zero tilted spread".into()));
        }
        let a = self.alpha_star;
        if a <= ALPHA_TOL || a >= 1.0 - ALPHA_TOL {
            return Err(Error::DegeneratePair(format!(
                "optimal exponent {a} at the boundary"
            )));
        }
        if repetitions == 0 {
            return Err(Error::domain("repetitions must be >= 1"));
        }
        let n = repetitions as f64;
        Ok((-n * c).exp() / ((2.0 * PI * n).sqrt() * 2.0 * a * (1.0 - a) * self.sigma))
    }
}

/// Chernoff information `C = −min_α ln Σ p1^{1−α} p2^α` with the optimal
/// exponent and the tilted log-likelihood spread.
pub fn chernoff_information(pair: &OutcomeDistributionPair) -> ChernoffResult {
    if pair.identical() {
        return ChernoffResult::indistinguishable();
    }
    if !pair.has_common_support() {
        return ChernoffResult {
            information: Information::Infinite,
            alpha_star: 0.5,
            sigma: 0.0,
        };
    }
    let prepared = Prepared::new(pair);
    let alpha = minimize_exponent(
        |a| prepared.log_mixture(a),
        |a| prepared.tilted_moments(a).0,
    );
    let min = prepared.log_mixture(alpha);
    let sigma = prepared.tilted_moments(alpha).1.sqrt();
    ChernoffResult {
        information: Information::Finite((-min).max(0.0)),
        alpha_star: alpha,
        sigma,
    }
}

/// Chernoff information of product-Poisson statistics with unlimited photon
/// number resolution, for real visibility parts `re_v1`, `re_v2`.
///
/// `C = ηn̄ (1 − ½ min_α [(1+Re𝒱₁)^{1−α}(1+Re𝒱₂)^α + (1−Re𝒱₁)^{1−α}(1−Re𝒱₂)^α])`.
/// The tilted distribution of a Poisson product is again a Poisson product
/// with geometric-mean intensities, which gives `sigma` in closed form.
pub fn chernoff_coherent_closed_form(
    energy: f64,
    re_v1: f64,
    re_v2: f64,
) -> Result<ChernoffResult> {
    if !energy.is_finite() || energy < 0.0 {
        return Err(Error::domain(format!(
            "energy must be finite and >= 0, got {energy}"
        )));
    }
    let r1 = clamp_re(re_v1)?;
    let r2 = clamp_re(re_v2)?;
    if r1 == r2 {
        return Ok(ChernoffResult::indistinguishable());
    }
    let (up1, up2, dn1, dn2) = (1.0 + r1, 1.0 + r2, 1.0 - r1, 1.0 - r2);
    let objective = |a: f64| 0.5 * (geometric(up1, up2, a) + geometric(dn1, dn2, a));
    let slope = |a: f64| {
        let part = |x: f64, y: f64| {
            let g = geometric(x, y, a);
            if g > 0.0 {
                g * (y / x).ln()
            } else {
                0.0
            }
        };
        part(up1, up2) + part(dn1, dn2)
    };
    let alpha = minimize_exponent(objective, slope);
    let min = objective(alpha);

    let half = 0.5 * energy;
    let lam_up = half * geometric(up1, up2, alpha);
    let lam_dn = half * geometric(dn1, dn2, alpha);
    let term = |lam: f64, x: f64, y: f64| {
        if lam > 0.0 {
            let l = (x / y).ln();
            (lam * l, lam * l * l)
        } else {
            (0.0, 0.0)
        }
    };
    let (m_up, v_up) = term(lam_up, up1, up2);
    let (m_dn, v_dn) = term(lam_dn, dn1, dn2);
    let mean = m_up + m_dn;
    let sigma = (v_up + v_dn + mean * mean).sqrt();

    Ok(ChernoffResult {
        information: Information::Finite((energy * (1.0 - min)).max(0.0)),
        alpha_star: alpha,
        sigma,
    })
}

fn clamp_re(r: f64) -> Result<f64> {
    if !r.is_finite() || r.abs() > 1.0 + 1e-9 {
        return Err(Error::domain(format!(
            "real part of visibility must lie in [-1, 1], got {r}"
        )));
    }
    Ok(r.clamp(-1.0, 1.0))
}

/// `x^{1−a} y^a` for interior `a`, zero if either base vanishes.
#[inline]
fn geometric(x: f64, y: f64, a: f64) -> f64 {
    if x <= 0.0 || y <= 0.0 {
        0.0
    } else {
        ((1.0 - a) * x.ln() + a * y.ln()).exp()
    }
}

/// Standard Chernoff bound `e^{−NC}/2` on the average error probability.
pub fn chernoff_bound(information: f64, repetitions: u64) -> f64 {
    if information.is_infinite() {
        return 0.0;
    }
    0.5 * (-(repetitions as f64) * information).exp()
}

/// Normalized `p1^{1−α} p2^α`.
pub fn tilted_distribution(pair: &OutcomeDistributionPair, alpha: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::domain(format!(
            "alpha must lie in [0, 1], got {alpha}"
        )));
    }
    if alpha == 0.0 {
        return Ok(pair.p1.clone());
    }
    if alpha == 1.0 {
        return Ok(pair.p2.clone());
    }
    let mut out: Vec<f64> = pair
        .p1
        .iter()
        .zip(&pair.p2)
        .map(|(&a, &b)| geometric(a, b, alpha))
        .collect();
    let norm: f64 = out.iter().sum();
    if !(norm > 0.0) {
        return Err(Error::DegeneratePair(
            "distributions have disjoint supports".into(),
        ));
    }
    out.iter_mut().for_each(|x| *x /= norm);
    Ok(out)
}

/// `D(p‖q) = Σ p ln(p/q)` in nats; `+∞` when `p` has mass where `q` has none.
pub fn relative_entropy(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::ShapeMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let mut d = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if b <= 0.0 {
                return Ok(f64::INFINITY);
            }
            d += a * (a / b).ln();
        }
    }
    Ok(d)
}

/// Second-order bound `e^{−NC} / (√(2πN) · 2α*(1−α*) · σ)`.
pub fn refined_bound(pair: &OutcomeDistributionPair, repetitions: u64) -> Result<f64> {
    chernoff_information(pair).refined_bound(repetitions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::photostat::{
        joint_fixed_phase, joint_random_phase, marginal_difference, ComplexVisibility,
        DetectionParams,
    };
    use proptest::prelude::*;

    fn random_phase_pair(e: f64, v1: f64, v2: f64, k: usize) -> OutcomeDistributionPair {
        let p = DetectionParams::ideal(e, k).unwrap();
        OutcomeDistributionPair::from_joint(
            &joint_random_phase(p, v1).unwrap(),
            &joint_random_phase(p, v2).unwrap(),
        )
        .unwrap()
    }

    fn product_pair(e: f64, r1: f64, r2: f64, k: usize) -> OutcomeDistributionPair {
        let p = DetectionParams::ideal(e, k).unwrap();
        OutcomeDistributionPair::from_joint(
            &joint_fixed_phase(p, ComplexVisibility::real(r1).unwrap()).unwrap(),
            &joint_fixed_phase(p, ComplexVisibility::real(r2).unwrap()).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn identical_pair() {
        let p = vec![0.2, 0.3, 0.5];
        let r = chernoff_information(&OutcomeDistributionPair::new(p.clone(), p).unwrap());
        assert_eq!(r.information, Information::Finite(0.0));
        assert_eq!(r.alpha_star, 0.5);
        assert!(r.refined_bound(10).is_err());
    }

    #[test]
    fn disjoint_supports_are_flagged() {
        let pair = OutcomeDistributionPair::new(vec![1.0, 0.0], vec![0.0, 1.0]).unwrap();
        let r = chernoff_information(&pair);
        assert!(r.information.is_infinite());
        assert_eq!(r.bound(1), 0.0);
        assert!(matches!(r.refined_bound(3), Err(Error::DegeneratePair(_))));
    }

    #[test]
    fn relabelled_pair_has_half_exponent() {
        let pair = OutcomeDistributionPair::new(vec![0.7, 0.2, 0.1], vec![0.2, 0.7, 0.1]).unwrap();
        let r = chernoff_information(&pair);
        assert!((r.alpha_star - 0.5).abs() < 1e-9);
        // −ln(√(0.14)·2 + 0.1)
        let expect = -(2.0 * 0.14f64.sqrt() + 0.1).ln();
        assert!((r.nats() - expect).abs() < 1e-14);
    }

    #[test]
    fn input_validation() {
        assert!(matches!(
            OutcomeDistributionPair::new(vec![1.0], vec![0.5, 0.5]),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(matches!(
            OutcomeDistributionPair::new(vec![0.5, 0.6], vec![0.5, 0.5]),
            Err(Error::Unnormalized { .. })
        ));
        assert!(chernoff_coherent_closed_form(1.0, 1.2, 0.0).is_err());
        assert!(tilted_distribution(
            &OutcomeDistributionPair::new(vec![1.0], vec![1.0]).unwrap(),
            1.5
        )
        .is_err());
    }

    #[test]
    fn coherent_closed_form_examples() {
        let r = chernoff_coherent_closed_form(3.7, 1.0, -1.0).unwrap();
        assert!((r.nats() - 3.7).abs() < 1e-12);
        let r = chernoff_coherent_closed_form(5.0, 0.3, 0.3).unwrap();
        assert_eq!(r.nats(), 0.0);
        let a = chernoff_coherent_closed_form(1.0, 0.98, 0.56)
            .unwrap()
            .nats();
        let b = chernoff_coherent_closed_form(10.0, 0.98, 0.56)
            .unwrap()
            .nats();
        assert!((b - 10.0 * a).abs() < 1e-12);
    }

    #[test]
    fn coherent_closed_form_matches_generic_information() {
        // Generic route on product-Poisson tables with K = 60 as the oracle.
        let pair = product_pair(10.0, 0.98, 0.56, 60);
        let generic = chernoff_information(&pair);
        let closed = chernoff_coherent_closed_form(10.0, 0.98, 0.56).unwrap();
        assert!((generic.nats() - closed.nats()).abs() < 1e-6);
        assert!((generic.alpha_star - closed.alpha_star).abs() < 1e-6);
        assert!((generic.sigma - closed.sigma).abs() < 1e-6);
    }

    #[test]
    fn nearly_disjoint_pairs_keep_precision() {
        // Mixture sums near e^{-20}: the excess-over-one form would cancel.
        for &(a, b) in &[(1.0, -1.0), (-1.0, 0.98), (0.98, -1.0)] {
            let generic = chernoff_information(&product_pair(20.0, a, b, 60)).nats();
            let closed = chernoff_coherent_closed_form(20.0, a, b).unwrap().nats();
            assert!(
                (generic - closed).abs() < 1e-9,
                "({a}, {b}): {generic} vs {closed}"
            );
        }
    }

    #[test]
    fn bound_examples() {
        assert_eq!(chernoff_bound(0.0, 17), 0.5);
        assert!((chernoff_bound(2f64.ln(), 1) - 0.25).abs() < 1e-16);
        let b = chernoff_bound(0.0916, 93);
        assert!((b / 1e-4 - 1.0).abs() < 0.02, "{b}");
    }

    #[test]
    fn tilted_endpoints_and_equidistance() {
        let pair = random_phase_pair(6.3, 0.98, 0.56, 15);
        assert_eq!(tilted_distribution(&pair, 0.0).unwrap(), pair.first());
        assert_eq!(tilted_distribution(&pair, 1.0).unwrap(), pair.second());
        let r = chernoff_information(&pair);
        let star = tilted_distribution(&pair, r.alpha_star).unwrap();
        let d1 = relative_entropy(&star, pair.first()).unwrap();
        let d2 = relative_entropy(&star, pair.second()).unwrap();
        assert!((d1 - d2).abs() < 1e-8);
        // At the optimum both divergences equal C.
        assert!((d1 - r.nats()).abs() < 1e-8);
    }

    #[test]
    fn relative_entropy_examples() {
        let p = [0.1, 0.9];
        assert_eq!(relative_entropy(&p, &p).unwrap(), 0.0);
        let d = relative_entropy(&[1.0, 0.0], &[0.5, 0.5]).unwrap();
        assert!((d - 2f64.ln()).abs() < 1e-16);
        let d = relative_entropy(&[0.5, 0.5], &[0.9, 0.1]).unwrap();
        let expect = 0.5 * (0.5f64 / 0.9).ln() + 0.5 * (0.5f64 / 0.1).ln();
        assert!((d - expect).abs() < 1e-16);
        assert_eq!(
            relative_entropy(&[0.5, 0.5], &[1.0, 0.0]).unwrap(),
            f64::INFINITY
        );
    }

    #[test]
    fn refined_bound_behaviour() {
        let sym = OutcomeDistributionPair::new(vec![0.6, 0.4], vec![0.4, 0.6]).unwrap();
        let r = chernoff_information(&sym);
        let expect = (-4.0 * r.nats()).exp() / ((2.0 * PI * 4.0).sqrt() * 2.0 * 0.25 * r.sigma);
        assert!((refined_bound(&sym, 4).unwrap() / expect - 1.0).abs() < 1e-9);

        let ratio = |n: u64| r.refined_bound(n).unwrap() / r.bound(n);
        assert!((ratio(100) / ratio(25) - 0.5).abs() < 1e-12);

        let pair = random_phase_pair(6.3, 0.98, 0.56, 15);
        let r = chernoff_information(&pair);
        let factor = (2.0 * PI * 30.0).sqrt() * 2.0 * r.alpha_star * (1.0 - r.alpha_star) * r.sigma;
        assert!(factor > 1.0);
        assert!(r.refined_bound(30).unwrap() < r.bound(30));
        assert!(r.refined_bound(0).is_err());
    }

    #[test]
    fn marginal_and_truncation_lose_information() {
        let joint = random_phase_pair(6.3, 0.98, 0.56, 15);
        let k2 = random_phase_pair(6.3, 0.98, 0.56, 2);
        let p = DetectionParams::ideal(6.3, 15).unwrap();
        let diff = OutcomeDistributionPair::from_difference(
            &marginal_difference(&joint_random_phase(p, 0.98).unwrap()),
            &marginal_difference(&joint_random_phase(p, 0.56).unwrap()),
        )
        .unwrap();
        let c_joint = chernoff_information(&joint).nats();
        assert!(chernoff_information(&k2).nats() <= c_joint);
        assert!(chernoff_information(&diff).nats() <= c_joint);
    }

    fn distribution(len: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.01f64..1.0, len).prop_map(|w| {
            let s: f64 = w.iter().sum();
            let mut p: Vec<f64> = w.iter().map(|x| x / s).collect();
            let rest: f64 = p[1..].iter().sum();
            p[0] = 1.0 - rest;
            p
        })
    }

    proptest! {
        #[test]
        fn information_is_symmetric((p, q) in (2usize..8).prop_flat_map(|n| (distribution(n), distribution(n)))) {
            let pair = OutcomeDistributionPair::new(p, q).unwrap();
            let a = chernoff_information(&pair);
            let b = chernoff_information(&pair.swapped());
            prop_assert!(a.nats() >= 0.0);
            prop_assert!((a.nats() - b.nats()).abs() < 1e-12);
            if a.nats() > 1e-6 {
                prop_assert!((a.alpha_star - (1.0 - b.alpha_star)).abs() < 1e-7);
            }
        }

        #[test]
        fn objective_is_log_convex(
            (p, q) in (2usize..8).prop_flat_map(|n| (distribution(n), distribution(n))),
            a in 0.0f64..1.0,
            b in 0.0f64..1.0,
        ) {
            let pair = OutcomeDistributionPair::new(p, q).unwrap();
            let mid = pair.log_mixture(0.5 * (a + b));
            let chord = 0.5 * (pair.log_mixture(a) + pair.log_mixture(b));
            prop_assert!(mid <= chord + 1e-12);
        }
    }
}
