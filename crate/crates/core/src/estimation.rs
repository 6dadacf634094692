//! Monte-Carlo estimation of the dephasing strength `p`.
//!
//! Each trial measures `μ` copies of `Φ^{p,U}(ρ)` with a fixed POVM and
//! forms the maximum-likelihood estimate of `p`. Outcome probabilities are
//! affine in `p`, so the log-likelihood is concave and golden-section search
//! on `[0, 1]` finds its maximum.

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::goldensectionsearch::GoldenSectionSearch;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::channels::{self, DephasingChannel};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::qstate::{seeded_rng, DensityMatrix, Unitary};

pub const MLE_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct EstimationRun {
    pub p_true: f64,
    /// Copies measured per trial.
    pub mu: u64,
    pub trials: usize,
    pub povm: Vec<CMatrix>,
    pub estimates: Vec<f64>,
    pub mean: f64,
    /// Unbiased sample variance of `estimates`.
    pub variance: f64,
    /// False when outcome statistics do not depend on `p`.
    pub informative: bool,
}

impl EstimationRun {
    pub fn standard_error(&self) -> f64 {
        (self.variance / self.trials as f64).sqrt()
    }
}

/// Outcome probabilities at `p = 0` and `p = 1`; at any `p` they are
/// `(1 − p) q₀ + p q₁`.
pub fn affine_outcome_probabilities(rho: &DensityMatrix, u: &Unitary, povm: &[CMatrix]) -> Result<(Vec<f64>, Vec<f64>)> {
    channels::validate_povm(povm, rho.dim())?;
    let dephased = channels::dephase(rho, u)?;
    let born = |state: &CMatrix| -> Vec<f64> {
        povm.iter().map(|m| linalg::trace(&(m * state)).re.max(0.0)).collect()
    };
    Ok((born(rho.matrix()), born(dephased.matrix())))
}

pub fn outcome_probabilities(rho: &DensityMatrix, ch: &DephasingChannel, povm: &[CMatrix]) -> Result<Vec<f64>> {
    let (q0, q1) = affine_outcome_probabilities(rho, ch.basis(), povm)?;
    let p = ch.p();
    Ok(q0.iter().zip(&q1).map(|(a, b)| (1.0 - p) * a + p * b).collect())
}

/// Classical Fisher information of the POVM statistics with respect to `p`.
pub fn classical_fisher_information(rho: &DensityMatrix, ch: &DephasingChannel, povm: &[CMatrix]) -> Result<f64> {
    let (q0, q1) = affine_outcome_probabilities(rho, ch.basis(), povm)?;
    let p = ch.p();
    Ok(q0
        .iter()
        .zip(&q1)
        .filter_map(|(a, b)| {
            let prob = (1.0 - p) * a + p * b;
            (prob > 0.0).then(|| (b - a).powi(2) / prob)
        })
        .sum())
}

struct NegLogLikelihood<'a> {
    counts: &'a [u64],
    q0: &'a [f64],
    q1: &'a [f64],
}

impl CostFunction for NegLogLikelihood<'_> {
    type Param = f64;
    type Output = f64;

    fn cost(&self, p: &f64) -> std::result::Result<f64, argmin::core::Error> {
        let mut nll = 0.0;
        for ((&n, a), b) in self.counts.iter().zip(self.q0).zip(self.q1) {
            if n == 0 {
                continue;
            }
            let prob = (1.0 - p) * a + p * b;
            if prob <= 0.0 {
                return Ok(f64::INFINITY);
            }
            nll -= n as f64 * prob.ln();
        }
        Ok(nll)
    }
}

fn maximum_likelihood(counts: &[u64], q0: &[f64], q1: &[f64]) -> Result<f64> {
    let solver = GoldenSectionSearch::new(0.0, 1.0)
        .and_then(|s| s.with_tolerance(MLE_TOL))
        .map_err(|e| Error::Numerical(e.to_string()))?;
    let res = Executor::new(NegLogLikelihood { counts, q0, q1 }, solver)
        .configure(|state| state.param(0.5).max_iters(500))
        .run()
        .map_err(|e| Error::Numerical(e.to_string()))?;
    let p = res.state().get_best_param().copied().unwrap_or(0.5);
    Ok(p.clamp(0.0, 1.0))
}

/// Multinomial sample of `n` draws via sequential conditional binomials.
fn sample_counts(n: u64, probs: &[f64], rng: &mut impl Rng) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; probs.len()];
    let mut remaining = n;
    let mut mass = 1.0f64;
    for (k, &prob) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if k + 1 == probs.len() {
            counts[k] = remaining;
            break;
        }
        let cond = if mass > 0.0 { (prob / mass).clamp(0.0, 1.0) } else { 0.0 };
        let draw = Binomial::new(remaining, cond).map_err(|e| Error::Numerical(e.to_string()))?.sample(rng);
        counts[k] = draw;
        remaining -= draw;
        mass -= prob;
    }
    Ok(counts)
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = seeded_rng(seed);
    rng.set_stream(trial as u64);
    rng
}

pub fn simulate_estimation(
    rho: &DensityMatrix,
    u: &Unitary,
    p_true: f64,
    mu: u64,
    trials: usize,
    povm: &[CMatrix],
    seed: u64,
) -> Result<EstimationRun> {
    if !(p_true > 0.0 && p_true < 1.0) {
        return Err(Error::param(format!("p_true = {p_true} outside (0, 1)")));
    }
    if mu == 0 || trials < 2 {
        return Err(Error::param("need μ ≥ 1 and at least 2 trials"));
    }
    let (q0, q1) = affine_outcome_probabilities(rho, u, povm)?;
    let informative = q0.iter().zip(&q1).any(|(a, b)| (a - b).abs() > 1e-12);
    let probs: Vec<f64> = q0.iter().zip(&q1).map(|(a, b)| (1.0 - p_true) * a + p_true * b).collect();

    let estimates = (0..trials)
        .map(|t| {
            let counts = sample_counts(mu, &probs, &mut trial_rng(seed, t))?;
            maximum_likelihood(&counts, &q0, &q1)
        })
        .collect::<Result<Vec<f64>>>()?;
    let n = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / n;
    let variance = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(EstimationRun { p_true, mu, trials, povm: povm.to_vec(), estimates, mean, variance, informative })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::projective_povm;
    use crate::coherence::{crb_bound, qfi_dephasing};
    use crate::qstate::maximally_coherent;
    use approx::assert_abs_diff_eq;

    fn plus() -> DensityMatrix {
        maximally_coherent(2, &[0.0, 0.0]).unwrap()
    }

    #[test]
    fn plus_minus_statistics_are_affine() {
        let povm = projective_povm(&Unitary::hadamard());
        let (q0, q1) = affine_outcome_probabilities(&plus(), &Unitary::identity(2), &povm).unwrap();
        assert_abs_diff_eq!(q0[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(q0[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(q1[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(q1[1], 0.5, epsilon = 1e-15);
        // P(+) = 1 − p/2
        let ch = DephasingChannel::computational(2, 0.3).unwrap();
        let probs = outcome_probabilities(&plus(), &ch, &povm).unwrap();
        assert_abs_diff_eq!(probs[0], 0.85, epsilon = 1e-15);
    }

    #[test]
    fn plus_minus_povm_is_optimal() {
        let povm = projective_povm(&Unitary::hadamard());
        for p in [0.2, 0.5, 0.9] {
            let ch = DephasingChannel::computational(2, p).unwrap();
            let cfi = classical_fisher_information(&plus(), &ch, &povm).unwrap();
            let qfi = qfi_dephasing(&plus(), &ch).unwrap().value;
            assert_abs_diff_eq!(cfi, qfi, epsilon = 1e-12);
        }
    }

    #[test]
    fn mle_recovers_exact_frequencies() {
        let q0 = [1.0, 0.0];
        let q1 = [0.5, 0.5];
        // frequencies of p = 0.4: (0.8, 0.2)
        let p = maximum_likelihood(&[800, 200], &q0, &q1).unwrap();
        assert_abs_diff_eq!(p, 0.4, epsilon = 1e-6);
        let p = maximum_likelihood(&[1000, 0], &q0, &q1).unwrap();
        assert!(p < 1e-6);
    }

    #[test]
    fn incoherent_probe_is_uninformative() {
        let rho = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let povm = projective_povm(&Unitary::hadamard());
        let run = simulate_estimation(&rho, &Unitary::identity(2), 0.5, 100, 10, &povm, 1).unwrap();
        assert!(!run.informative);
    }

    #[test]
    fn estimates_are_seeded_and_bounded() {
        let povm = projective_povm(&Unitary::hadamard());
        let a = simulate_estimation(&plus(), &Unitary::identity(2), 0.5, 1000, 50, &povm, 42).unwrap();
        let b = simulate_estimation(&plus(), &Unitary::identity(2), 0.5, 1000, 50, &povm, 42).unwrap();
        assert_eq!(a.estimates, b.estimates);
        assert!(a.informative);
        assert!(a.estimates.iter().all(|e| (0.0..=1.0).contains(e)));
        assert!((a.mean - 0.5).abs() <= 3.0 * a.standard_error());
        let crb = crb_bound(4.0 / 3.0, 1000).unwrap();
        assert!(a.variance >= 0.5 * crb);
    }

    #[test]
    fn rejects_bad_arguments() {
        let povm = projective_povm(&Unitary::hadamard());
        let id = Unitary::identity(2);
        assert!(simulate_estimation(&plus(), &id, 0.0, 10, 10, &povm, 0).is_err());
        assert!(simulate_estimation(&plus(), &id, 0.5, 0, 10, &povm, 0).is_err());
        // Two identities sum to 2·I, not a POVM.
        let bad = [linalg::identity(2), linalg::identity(2)];
        assert!(simulate_estimation(&plus(), &id, 0.5, 10, 10, &bad, 0).is_err());
    }
}
