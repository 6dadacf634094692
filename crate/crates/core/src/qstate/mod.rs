//! Density matrices, unitaries and bipartite states.
//!
//! Every [`DensityMatrix`] is validated on construction: Hermitian to
//! [`HERMITIAN_TOL`], unit trace to [`TRACE_TOL`] and positive semidefinite
//! down to `-`[`PSD_TOL`]. Bipartite states use A-major ordering, i.e. the
//! basis vector `|i⟩_A|j⟩_B` has index `i * d_B + j`.

mod random;

pub use random::{
    random_density, random_density_with, random_pure, random_pure_with, random_unitary,
    random_unitary_with, seeded_rng, standard_complex_gaussian,
};

use crate::error::{Error, Result};
use crate::linalg::{self, real, CMatrix, CVector, C64, ONE, ZERO};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;
pub const UNITARY_TOL: f64 = 1e-10;
pub const MAX_DIM: usize = 64;

/// A validated quantum state.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(Error::NotSquare(rows, cols));
        }
        if rows == 0 || rows > MAX_DIM {
            return Err(Error::param(format!("dimension {rows} outside 1..={MAX_DIM}")));
        }
        let herm = linalg::hermiticity_error(&matrix);
        if herm > HERMITIAN_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let matrix = linalg::hermitian_part(&matrix);
        let tr = linalg::trace(&matrix).re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr));
        }
        let (values, _) = linalg::eigh(&matrix);
        let min = values.last().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::NotPsd(min));
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix produced by a trace-preserving, positivity-preserving
    /// pipeline. The matrix is Hermitized; debug builds re-run validation.
    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        let matrix = linalg::hermitian_part(&matrix);
        debug_assert!(
            (linalg::trace(&matrix).re - 1.0).abs() < 1e-9,
            "trusted matrix has trace {}",
            linalg::trace(&matrix).re
        );
        Self { matrix }
    }

    /// `|ψ⟩⟨ψ|` for the normalized version of `psi`.
    pub fn pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::param("state vector has zero or non-finite norm"));
        }
        let v = psi.unscale(norm);
        Self::new(&v * v.adjoint())
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self::from_trusted(linalg::identity(d).unscale(d as f64))
    }

    /// `Σ_i p_i |i⟩⟨i|`.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let d = probs.len();
        let mut m = CMatrix::zeros(d, d);
        for (i, &p) in probs.iter().enumerate() {
            m[(i, i)] = real(p);
        }
        Self::new(m)
    }

    /// Computational basis state `|k⟩⟨k|`.
    pub fn basis_state(d: usize, k: usize) -> Self {
        Self::from_trusted(linalg::matrix_unit(d, k, k))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i, j)]
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &Unitary) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch(u.dim(), self.dim()));
        }
        Ok(Self::from_trusted(u.matrix() * &self.matrix * u.matrix().adjoint()))
    }

    /// Convex combination `Σ_k w_k ρ_k`.
    pub fn mixture(weights: &[f64], states: &[DensityMatrix]) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::param("mixture needs one weight per state"));
        }
        let d = states[0].dim();
        let mut m = CMatrix::zeros(d, d);
        for (w, s) in weights.iter().zip(states) {
            if s.dim() != d {
                return Err(Error::DimensionMismatch(s.dim(), d));
            }
            m += s.matrix().scale(*w);
        }
        Self::new(m)
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn distance(&self, other: &DensityMatrix) -> f64 {
        linalg::frobenius(&(&self.matrix - &other.matrix))
    }
}

/// A validated unitary matrix. Its columns define a basis `{U|i⟩}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary {
    matrix: CMatrix,
}

impl Unitary {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(Error::NotSquare(rows, cols));
        }
        let err = linalg::unitarity_error(&matrix);
        if err > UNITARY_TOL {
            return Err(Error::NotUnitary(err));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        debug_assert!(linalg::unitarity_error(&matrix) < 1e-8);
        Self { matrix }
    }

    pub fn identity(d: usize) -> Self {
        Self { matrix: linalg::identity(d) }
    }

    pub fn hadamard() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self { matrix: CMatrix::from_row_slice(2, 2, &[real(s), real(s), real(s), real(-s)]) }
    }

    /// Pauli X, i.e. the relabeling `|0⟩ ↔ |1⟩`.
    pub fn pauli_x() -> Self {
        Self { matrix: CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]) }
    }

    /// Permutation unitary sending `|i⟩` to `|perm[i]⟩`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        check_permutation(perm)?;
        let d = perm.len();
        let mut m = CMatrix::zeros(d, d);
        for (i, &fi) in perm.iter().enumerate() {
            m[(fi, i)] = ONE;
        }
        Ok(Self { matrix: m })
    }

    /// Discrete Fourier transform; column `n` is `Σ_k e^{2πink/d}|k⟩/√d`.
    pub fn fourier(d: usize) -> Self {
        let norm = (d as f64).sqrt();
        let m = CMatrix::from_fn(d, d, |k, n| {
            C64::from_polar(1.0 / norm, 2.0 * std::f64::consts::PI * (n * k) as f64 / d as f64)
        });
        Self { matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint() }
    }

    pub fn compose(&self, other: &Unitary) -> Self {
        Self::from_trusted(&self.matrix * &other.matrix)
    }

    pub fn kron(&self, other: &Unitary) -> Self {
        Self { matrix: linalg::kron(&self.matrix, &other.matrix) }
    }

    pub fn column(&self, i: usize) -> CVector {
        self.matrix.column(i).into_owned()
    }
}

pub(crate) fn check_permutation(perm: &[usize]) -> Result<()> {
    let mut seen = vec![false; perm.len()];
    for &f in perm {
        if f >= perm.len() || seen[f] {
            return Err(Error::param(format!("{perm:?} is not a permutation")));
        }
        seen[f] = true;
    }
    Ok(())
}

/// Eigenvalues (descending) and orthonormal eigenvectors of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Column `i` is the eigenvector for `eigenvalues[i]`.
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    /// Decomposes an arbitrary Hermitian matrix without clamping.
    pub fn of_hermitian(m: &CMatrix) -> Result<Self> {
        let (rows, cols) = m.shape();
        if rows != cols {
            return Err(Error::NotSquare(rows, cols));
        }
        let herm = linalg::hermiticity_error(m);
        if herm > HERMITIAN_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let (eigenvalues, eigenvectors) = linalg::eigh(m);
        Ok(Self { eigenvalues, eigenvectors })
    }

    pub fn eigenvector(&self, i: usize) -> CVector {
        self.eigenvectors.column(i).into_owned()
    }

    /// `Σ_i λ_i |ψ_i⟩⟨ψ_i|`.
    pub fn reconstruct(&self) -> CMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(k).scale_mut(lambda);
        }
        scaled * self.eigenvectors.adjoint()
    }

    /// Number of eigenvalues strictly above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.eigenvalues.iter().filter(|&&l| l > tol).count()
    }
}

/// Spectral decomposition of a state. Eigenvalues within `PSD_TOL` below
/// zero are clamped to zero.
pub fn spectral_decomposition(rho: &DensityMatrix) -> SpectralDecomposition {
    let (mut eigenvalues, eigenvectors) = linalg::eigh(rho.matrix());
    for l in &mut eigenvalues {
        if *l < 0.0 && *l >= -PSD_TOL {
            *l = 0.0;
        }
    }
    SpectralDecomposition { eigenvalues, eigenvectors }
}

/// Root fidelity `Tr √(√ρ σ √ρ)`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    Ok(fidelity_unchecked(rho.matrix(), sigma.matrix()))
}

pub(crate) fn fidelity_unchecked(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let root = linalg::sqrt_psd(rho);
    let inner = &root * sigma * &root;
    let (values, _) = linalg::eigh(&inner);
    let f: f64 = values.iter().map(|l| l.max(0.0).sqrt()).sum();
    f.clamp(0.0, 1.0)
}

/// Real Bloch coordinates of a qubit state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = Self { x, y, z };
        if v.norm_sqr() > 1.0 + 1e-12 {
            return Err(Error::param(format!("Bloch vector ({x}, {y}, {z}) outside unit ball")));
        }
        Ok(v)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// `R² = x² + y²`, the squared transverse length.
    pub fn transverse_sqr(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }
}

pub fn bloch_from_qubit(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(rho.dim(), 2));
    }
    let off = rho.entry(0, 1);
    Ok(BlochVector {
        x: 2.0 * off.re,
        y: -2.0 * off.im,
        z: (rho.entry(0, 0) - rho.entry(1, 1)).re,
    })
}

/// `½(I + xσ_x + yσ_y + zσ_z)`.
pub fn qubit_from_bloch(v: &BlochVector) -> Result<DensityMatrix> {
    let v = BlochVector::new(v.x, v.y, v.z)?;
    let m = CMatrix::from_row_slice(
        2,
        2,
        &[
            real((1.0 + v.z) / 2.0),
            C64::new(v.x / 2.0, -v.y / 2.0),
            C64::new(v.x / 2.0, v.y / 2.0),
            real((1.0 - v.z) / 2.0),
        ],
    );
    DensityMatrix::new(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// A state on `A ⊗ B` together with its factor dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteState {
    state: DensityMatrix,
    dims: (usize, usize),
}

impl BipartiteState {
    pub fn new(state: DensityMatrix, dims: (usize, usize)) -> Result<Self> {
        if dims.0 == 0 || dims.1 == 0 || dims.0 * dims.1 != state.dim() {
            return Err(Error::DimensionMismatch(dims.0 * dims.1, state.dim()));
        }
        Ok(Self { state, dims })
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn matrix(&self) -> &CMatrix {
        self.state.matrix()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn dim_a(&self) -> usize {
        self.dims.0
    }

    pub fn dim_b(&self) -> usize {
        self.dims.1
    }

    pub fn into_state(self) -> DensityMatrix {
        self.state
    }

    /// `(U_A ⊗ V_B) ρ (U_A ⊗ V_B)†`.
    pub fn local_unitary(&self, ua: &Unitary, vb: &Unitary) -> Result<Self> {
        if ua.dim() != self.dims.0 || vb.dim() != self.dims.1 {
            return Err(Error::DimensionMismatch(ua.dim() * vb.dim(), self.state.dim()));
        }
        Ok(Self { state: self.state.conjugate_by(&ua.kron(vb))?, dims: self.dims })
    }
}

/// Kronecker product `ρ_A ⊗ ρ_B`.
pub fn tensor(rho_a: &DensityMatrix, rho_b: &DensityMatrix) -> BipartiteState {
    let m = linalg::kron(rho_a.matrix(), rho_b.matrix());
    BipartiteState { state: DensityMatrix::from_trusted(m), dims: (rho_a.dim(), rho_b.dim()) }
}

/// Reduced state on the `keep` side.
pub fn partial_trace(rho: &BipartiteState, keep: Subsystem) -> DensityMatrix {
    DensityMatrix::from_trusted(partial_trace_matrix(rho.matrix(), rho.dims, keep))
}

pub(crate) fn partial_trace_matrix(m: &CMatrix, (da, db): (usize, usize), keep: Subsystem) -> CMatrix {
    match keep {
        Subsystem::A => CMatrix::from_fn(da, da, |i, k| {
            (0..db).map(|j| m[(i * db + j, k * db + j)]).sum()
        }),
        Subsystem::B => CMatrix::from_fn(db, db, |j, l| {
            (0..da).map(|i| m[(i * db + j, i * db + l)]).sum()
        }),
    }
}

/// `Σ_i e^{iθ_i}/√d |i⟩`.
pub fn maximally_coherent(d: usize, phases: &[f64]) -> Result<DensityMatrix> {
    if d == 0 || phases.len() != d {
        return Err(Error::param(format!("need {d} phases, got {}", phases.len())));
    }
    let norm = (d as f64).sqrt();
    let psi = CVector::from_iterator(d, phases.iter().map(|&t| C64::from_polar(1.0 / norm, t)));
    DensityMatrix::pure(&psi)
}

/// `Σ_i |i⟩_A|i⟩_B / √d`.
pub fn maximally_entangled(d: usize) -> BipartiteState {
    let mut psi = CVector::zeros(d * d);
    let amp = real(1.0 / (d as f64).sqrt());
    for i in 0..d {
        psi[i * d + i] = amp;
    }
    let state = DensityMatrix::from_trusted(&psi * psi.adjoint());
    BipartiteState { state, dims: (d, d) }
}

/// `Σ_i p_i |ψ_i⟩⟨ψ_i| ⊗ ρ_{B|i}` with `|ψ_i⟩` the columns of `basis_a`.
pub fn cq_state(
    probs: &[f64],
    basis_a: &Unitary,
    conditionals: &[DensityMatrix],
) -> Result<BipartiteState> {
    let da = basis_a.dim();
    if probs.len() != da || conditionals.len() != da {
        return Err(Error::param(format!(
            "need {da} probabilities and conditionals, got {} and {}",
            probs.len(),
            conditionals.len()
        )));
    }
    if probs.iter().any(|&p| p < 0.0) || (probs.iter().sum::<f64>() - 1.0).abs() > TRACE_TOL {
        return Err(Error::param("probabilities must be nonnegative and sum to 1"));
    }
    let db = conditionals[0].dim();
    let mut m = CMatrix::zeros(da * db, da * db);
    for (i, (&p, cond)) in probs.iter().zip(conditionals).enumerate() {
        if cond.dim() != db {
            return Err(Error::DimensionMismatch(cond.dim(), db));
        }
        let psi = basis_a.column(i);
        let proj = &psi * psi.adjoint();
        m += linalg::kron(&proj, cond.matrix()).scale(p);
    }
    BipartiteState::new(DensityMatrix::new(m)?, (da, db))
}
