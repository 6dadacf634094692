//! The coherence measure `C_p(ρ)`: quantum Fisher information of `ρ` with
//! respect to the dephasing strength `p` of `Φ^p`.
//!
//! The canonical evaluation is the spectral sum
//!
//! ```text
//! F = 2 Σ_{i,j} |⟨ψ_i|∂_p ρ_p|ψ_j⟩|² / (λ_i + λ_j),   ρ_p = Σ_i λ_i |ψ_i⟩⟨ψ_i|
//! ```
//!
//! with `∂_p Φ^p(ρ) = Δ(ρ) − ρ`, independent of `p`. Pairs with
//! `λ_i + λ_j ≤ rank_tol` are excluded; if any such pair carries a
//! non-negligible numerator the measure diverges and is reported as `+∞`.
//! A fidelity finite-difference estimate is provided as an independent check.

use std::collections::BTreeMap;

use crate::channels::{dephase_a_matrix, dephase_matrix, DephasingChannel};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::qstate::{fidelity_unchecked, BipartiteState, BlochVector, DensityMatrix, Unitary};

pub const DEFAULT_RANK_TOL: f64 = 1e-10;
pub const DEFAULT_SUPPORT_TOL: f64 = 1e-8;
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Extended-real measure value with diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureResult {
    /// Finite and nonnegative, or `f64::INFINITY` on divergence.
    pub value: f64,
    /// Ordered `(i, j)` pairs excluded by the rank cutoff.
    pub dropped_terms: usize,
    pub diagnostics: BTreeMap<String, f64>,
}

impl MeasureResult {
    pub fn is_divergent(&self) -> bool {
        self.value.is_infinite()
    }
}

/// Spectral-sum QFI for a family with state `state` and tangent `deriv`.
pub(crate) fn spectral_qfi(state: &CMatrix, deriv: &CMatrix, rank_tol: f64) -> MeasureResult {
    let (lambda, vectors) = linalg::eigh(state);
    let tangent = vectors.adjoint() * deriv * &vectors;
    let n = lambda.len();
    let mut sum = 0.0;
    let mut dropped = 0usize;
    let mut divergent = false;
    let mut worst_excluded = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let num = tangent[(i, j)].norm_sqr();
            let denom = lambda[i] + lambda[j];
            if denom > rank_tol {
                sum += num / denom;
            } else {
                dropped += 1;
                worst_excluded = worst_excluded.max(num);
                if num > rank_tol {
                    divergent = true;
                }
            }
        }
    }
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("rank".to_string(), lambda.iter().filter(|&&l| l > rank_tol).count() as f64);
    diagnostics.insert("min_eigenvalue".to_string(), lambda.last().copied().unwrap_or(0.0));
    diagnostics.insert("max_excluded_numerator".to_string(), worst_excluded);
    MeasureResult {
        value: if divergent { f64::INFINITY } else { 2.0 * sum },
        dropped_terms: dropped,
        diagnostics,
    }
}

fn check_rank_tol(rank_tol: f64) -> Result<()> {
    if !(rank_tol > 0.0) {
        return Err(Error::param(format!("rank_tol = {rank_tol} must be positive")));
    }
    Ok(())
}

/// `C_p(ρ)` for `Φ^{p,U}`, evaluated as `C_p(U†ρU)` for `Φ^{p,I}`.
pub fn qfi_dephasing(rho: &DensityMatrix, ch: &DephasingChannel) -> Result<MeasureResult> {
    qfi_dephasing_with_tol(rho, ch, DEFAULT_RANK_TOL)
}

pub fn qfi_dephasing_with_tol(rho: &DensityMatrix, ch: &DephasingChannel, rank_tol: f64) -> Result<MeasureResult> {
    if ch.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(ch.dim(), rho.dim()));
    }
    check_rank_tol(rank_tol)?;
    let u = ch.basis().matrix();
    let local = u.adjoint() * rho.matrix() * u;
    Ok(qfi_for(&local, ch.p(), dephase_matrix, rank_tol))
}

/// QFI of `ρ_AB` under `Φ^{p,U}_A = Φ^{p,U} ⊗ id`.
pub fn qfi_local_dephasing(rho: &BipartiteState, ch: &DephasingChannel) -> Result<MeasureResult> {
    qfi_local_dephasing_with_tol(rho, ch, DEFAULT_RANK_TOL)
}

pub fn qfi_local_dephasing_with_tol(
    rho: &BipartiteState,
    ch: &DephasingChannel,
    rank_tol: f64,
) -> Result<MeasureResult> {
    if ch.dim() != rho.dim_a() {
        return Err(Error::DimensionMismatch(ch.dim(), rho.dim_a()));
    }
    check_rank_tol(rank_tol)?;
    let u = ch.basis().kron(&Unitary::identity(rho.dim_b()));
    let local = u.matrix().adjoint() * rho.matrix() * u.matrix();
    let dims = rho.dims();
    Ok(qfi_for(&local, ch.p(), |m| dephase_a_matrix(m, dims), rank_tol))
}

fn qfi_for(rho: &CMatrix, p: f64, dephaser: impl Fn(&CMatrix) -> CMatrix, rank_tol: f64) -> MeasureResult {
    let deriv = dephaser(rho) - rho;
    let state = rho + deriv.scale(p);
    spectral_qfi(&state, &deriv, rank_tol)
}

/// Qubit closed form `(x² + y²) / (1 − (1 − p)²(x² + y²)/(1 − z²))`.
pub fn coherence_qubit_closed_form(v: &BlochVector, p: f64) -> Result<f64> {
    let v = BlochVector::new(v.x, v.y, v.z)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("p = {p} outside [0, 1]")));
    }
    let r2 = v.transverse_sqr();
    if r2 == 0.0 {
        return Ok(0.0);
    }
    let denom = 1.0 - (1.0 - p).powi(2) * r2 / (1.0 - v.z * v.z);
    if denom <= 1e-14 {
        return Ok(f64::INFINITY);
    }
    Ok(r2 / denom)
}

/// `(d − 1) / (p [d − (d − 1) p])`, attained by maximally coherent states.
pub fn max_coherence(d: usize, p: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::param("dimension must be positive"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("p = {p} outside [0, 1]")));
    }
    if p == 0.0 {
        return Ok(if d > 1 { f64::INFINITY } else { 0.0 });
    }
    let d = d as f64;
    Ok((d - 1.0) / (p * (d - (d - 1.0) * p)))
}

/// `C_0(ρ)` is finite iff `supp Δ_U(ρ) = supp ρ`.
pub fn c0_is_finite(rho: &DensityMatrix, u: &Unitary) -> Result<bool> {
    c0_is_finite_with_tol(rho, u, DEFAULT_SUPPORT_TOL)
}

pub fn c0_is_finite_with_tol(rho: &DensityMatrix, u: &Unitary, tol: f64) -> Result<bool> {
    if u.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(u.dim(), rho.dim()));
    }
    let local = u.matrix().adjoint() * rho.matrix() * u.matrix();
    let dephased = dephase_matrix(&local);
    let (lambda, vectors) = linalg::eigh(&local);
    let rank_rho = lambda.iter().filter(|&&l| l > tol).count();
    let rank_dephased = dephased.diagonal().iter().filter(|z| z.re > tol).count();
    // projector onto the kernel of ρ
    let d = rho.dim();
    let mut kernel = CMatrix::zeros(d, d);
    for (k, &l) in lambda.iter().enumerate() {
        if l <= tol {
            let v = vectors.column(k);
            kernel += v * v.adjoint();
        }
    }
    let leak = linalg::frobenius(&(&kernel * &dephased * &kernel));
    Ok(rank_rho == rank_dephased && leak <= tol)
}

/// Finite-difference estimate `8 (1 − F(ρ_a, ρ_b)) / ε²` with root fidelity
/// and `b − a = ε`, centred on `p` when the interval fits in `[0, 1]`.
pub fn qfi_fd_oracle(rho: &DensityMatrix, ch: &DephasingChannel, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param(format!("step {eps} outside (0, 1)")));
    }
    let exact = qfi_dephasing(rho, ch)?;
    if exact.is_divergent() {
        return Err(Error::Divergent(format!("QFI diverges at p = {}", ch.p())));
    }
    let p = ch.p();
    let (a, b) = if p - eps / 2.0 >= 0.0 && p + eps / 2.0 <= 1.0 {
        (p - eps / 2.0, p + eps / 2.0)
    } else if p + eps <= 1.0 {
        (p, p + eps)
    } else {
        (p - eps, p)
    };
    let u = ch.basis().matrix();
    let local = u.adjoint() * rho.matrix() * u;
    let deriv = dephase_matrix(&local) - &local;
    let rho_a = &local + deriv.scale(a);
    let rho_b = &local + deriv.scale(b);
    let f = fidelity_unchecked(&rho_a, &rho_b);
    Ok(8.0 * (1.0 - f) / (eps * eps))
}

/// `p = 1 − exp(−t / T₂)`.
pub fn p_from_time(t: f64, t2: f64) -> Result<f64> {
    if !(t >= 0.0) || !(t2 > 0.0) {
        return Err(Error::param(format!("need t ≥ 0 and T2 > 0, got t = {t}, T2 = {t2}")));
    }
    Ok(-(-t / t2).exp_m1())
}

/// Cramér–Rao bound `1 / (μ F)` on the variance of an unbiased estimator.
pub fn crb_bound(fisher: f64, mu: u64) -> Result<f64> {
    if !(fisher > 0.0) || mu == 0 {
        return Err(Error::param(format!("need F > 0 and μ ≥ 1, got F = {fisher}, μ = {mu}")));
    }
    Ok(1.0 / (mu as f64 * fisher))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{maximally_coherent, qubit_from_bloch, random_density, random_pure, random_unitary};
    use approx::assert_abs_diff_eq;

    fn plus() -> DensityMatrix {
        maximally_coherent(2, &[0.0, 0.0]).unwrap()
    }

    fn comp(d: usize, p: f64) -> DephasingChannel {
        DephasingChannel::computational(d, p).unwrap()
    }

    #[test]
    fn incoherent_states_have_zero_coherence() {
        let rho = DensityMatrix::diagonal(&[0.1, 0.6, 0.3]).unwrap();
        for p in [0.0, 0.3, 1.0] {
            let r = qfi_dephasing(&rho, &comp(3, p)).unwrap();
            assert_eq!(r.value, 0.0);
        }
    }

    #[test]
    fn plus_state_values() {
        let r = qfi_dephasing(&plus(), &comp(2, 0.5)).unwrap();
        assert_abs_diff_eq!(r.value, 4.0 / 3.0, epsilon = 1e-12);
        assert_eq!(r.dropped_terms, 0);

        let r = qfi_dephasing(&plus(), &comp(2, 0.0)).unwrap();
        assert!(r.is_divergent());
        assert!(r.dropped_terms > 0);
    }

    #[test]
    fn fourier_state_value() {
        let psi0 = maximally_coherent(3, &[0.0; 3]).unwrap();
        let r = qfi_dephasing(&psi0, &comp(3, 0.5)).unwrap();
        assert_abs_diff_eq!(r.value, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn closed_form_examples() {
        let c = coherence_qubit_closed_form(&BlochVector { x: 1.0, y: 0.0, z: 0.0 }, 0.5).unwrap();
        assert_abs_diff_eq!(c, 4.0 / 3.0, epsilon = 1e-14);
        for z in [0.0, 0.5, -0.8] {
            let c = coherence_qubit_closed_form(&BlochVector { x: 0.6, y: 0.0, z }, 1.0).unwrap();
            assert_abs_diff_eq!(c, 0.36, epsilon = 1e-14);
        }
        let v = BlochVector { x: 0.5, y: 0.0, z: 0.3 };
        let expected = 0.25 / (1.0 - 0.49 * 0.25 / 0.91);
        let c = coherence_qubit_closed_form(&v, 0.3).unwrap();
        assert_abs_diff_eq!(c, expected, epsilon = 1e-14);
        assert_abs_diff_eq!(c, 0.288889, epsilon = 1e-6);
        let spectral = qfi_dephasing(&qubit_from_bloch(&v).unwrap(), &comp(2, 0.3)).unwrap();
        assert_abs_diff_eq!(spectral.value, expected, epsilon = 1e-8);

        assert_eq!(coherence_qubit_closed_form(&BlochVector { x: 0.0, y: 0.0, z: 1.0 }, 0.0).unwrap(), 0.0);
        assert!(coherence_qubit_closed_form(&BlochVector { x: 0.0, y: 1.0, z: 0.0 }, 0.0).unwrap().is_infinite());
    }

    #[test]
    fn max_coherence_examples() {
        assert_abs_diff_eq!(max_coherence(2, 0.5).unwrap(), 4.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(max_coherence(3, 0.5).unwrap(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(max_coherence(2, 1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert!(max_coherence(2, 0.0).unwrap().is_infinite());
        assert!(max_coherence(2, 1.1).is_err());
    }

    #[test]
    fn c0_finiteness_examples() {
        let id = Unitary::identity(3);
        assert!(c0_is_finite(&random_density(3, 3, 1).unwrap(), &id).unwrap());
        assert!(!c0_is_finite(&random_pure(3, 2).unwrap(), &id).unwrap());
        assert!(c0_is_finite(&DensityMatrix::diagonal(&[0.5, 0.0, 0.5]).unwrap(), &id).unwrap());
        assert!(c0_is_finite(&DensityMatrix::basis_state(3, 1), &id).unwrap());
        // |+⟩ is incoherent in the Hadamard basis
        assert!(c0_is_finite(&plus(), &Unitary::hadamard()).unwrap());
        assert!(!c0_is_finite(&plus(), &Unitary::identity(2)).unwrap());
    }

    #[test]
    fn fd_oracle_examples() {
        let v = BlochVector { x: 0.5, y: 0.0, z: 0.3 };
        let rho = qubit_from_bloch(&v).unwrap();
        let fd = qfi_fd_oracle(&rho, &comp(2, 0.3), DEFAULT_FD_STEP).unwrap();
        assert_abs_diff_eq!(fd, 0.25 / (1.0 - 0.49 * 0.25 / 0.91), epsilon = 1e-3);

        let diag = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        assert_abs_diff_eq!(qfi_fd_oracle(&diag, &comp(2, 0.4), DEFAULT_FD_STEP).unwrap(), 0.0, epsilon = 1e-9);

        assert!(matches!(qfi_fd_oracle(&plus(), &comp(2, 0.0), DEFAULT_FD_STEP), Err(Error::Divergent(_))));
    }

    #[test]
    fn fd_oracle_at_boundaries() {
        let rho = random_density(3, 3, 4).unwrap();
        for p in [0.0, 1.0] {
            let exact = qfi_dephasing(&rho, &comp(3, p)).unwrap().value;
            let fd = qfi_fd_oracle(&rho, &comp(3, p), DEFAULT_FD_STEP).unwrap();
            assert!((fd - exact).abs() / exact < 1e-3, "p = {p}: {fd} vs {exact}");
        }
    }

    #[test]
    fn basis_covariance() {
        let rho = random_density(3, 3, 7).unwrap();
        let u = random_unitary(3, 8).unwrap();
        let a = qfi_dephasing(&rho, &DephasingChannel::new(0.4, u.clone()).unwrap()).unwrap();
        let rotated = rho.conjugate_by(&u.adjoint()).unwrap();
        let b = qfi_dephasing(&rotated, &comp(3, 0.4)).unwrap();
        assert_abs_diff_eq!(a.value, b.value, epsilon = 1e-10);
    }

    #[test]
    fn time_parameterization() {
        assert_eq!(p_from_time(0.0, 2.0).unwrap(), 0.0);
        assert_abs_diff_eq!(p_from_time(200.0, 2.0).unwrap(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(p_from_time(3.0 * std::f64::consts::LN_2, 3.0).unwrap(), 0.5, epsilon = 1e-15);
        assert!(p_from_time(-1.0, 1.0).is_err());
        assert!(p_from_time(1.0, 0.0).is_err());
    }

    #[test]
    fn cramer_rao_examples() {
        assert_abs_diff_eq!(crb_bound(4.0 / 3.0, 1).unwrap(), 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(crb_bound(1.0, 100).unwrap(), 0.01, epsilon = 1e-15);
        assert_eq!(crb_bound(f64::INFINITY, 1).unwrap(), 0.0);
        assert!(crb_bound(0.0, 1).is_err());
    }

    #[test]
    fn rank_tol_must_be_positive() {
        assert!(qfi_dephasing_with_tol(&plus(), &comp(2, 0.5), 0.0).is_err());
        assert!(qfi_dephasing(&plus(), &comp(3, 0.5)).is_err());
    }
}
