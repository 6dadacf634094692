//! Kraus-operator channels: dephasing, strictly incoherent operations (SIO),
//! extendible commutativity-preserving operations (ECPO), Choi matrices and
//! selective measurement.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, real, CMatrix, CVector, ONE};
use crate::qstate::{
    self, check_permutation, random_density_with, seeded_rng, standard_complex_gaussian,
    BipartiteState, DensityMatrix, Subsystem, Unitary, MAX_DIM,
};

pub const TP_TOL: f64 = 1e-10;
pub const CHOI_PSD_TOL: f64 = 1e-10;
/// Ensemble branches with probability at or below this are dropped.
pub const BRANCH_CUTOFF: f64 = 1e-14;

/// `E(ρ) = Σ_k K_k ρ K_k†`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<CMatrix>,
}

impl KrausChannel {
    /// Builds a channel and checks trace preservation.
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let ch = Self::from_operators_unchecked(kraus)?;
        let err = ch.trace_preservation_error();
        if err > TP_TOL {
            return Err(Error::NotTracePreserving(err));
        }
        Ok(ch)
    }

    /// Checks only that the operators share a shape. The result may fail
    /// [`is_cptp`].
    pub fn from_operators_unchecked(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::param("channel needs at least one Kraus operator"))?;
        let (dim_out, dim_in) = first.shape();
        if dim_in == 0 || dim_out == 0 || dim_in > MAX_DIM || dim_out > MAX_DIM {
            return Err(Error::param(format!("Kraus shape {dim_out}x{dim_in} out of range")));
        }
        if let Some(bad) = kraus.iter().find(|k| k.shape() != (dim_out, dim_in)) {
            return Err(Error::param(format!(
                "Kraus operator shape {:?} differs from {:?}",
                bad.shape(),
                (dim_out, dim_in)
            )));
        }
        Ok(Self { dim_in, dim_out, kraus })
    }

    pub fn identity(d: usize) -> Self {
        Self { dim_in: d, dim_out: d, kraus: vec![linalg::identity(d)] }
    }

    pub fn unitary(u: &Unitary) -> Self {
        Self { dim_in: u.dim(), dim_out: u.dim(), kraus: vec![u.matrix().clone()] }
    }

    /// Qubit phase flip `(1 − p/2)ρ + (p/2) σ_z ρ σ_z`.
    pub fn phase_flip(p: f64) -> Result<Self> {
        check_probability(p)?;
        let z = CMatrix::from_row_slice(2, 2, &[ONE, real(0.0), real(0.0), -ONE]);
        Self::new(vec![linalg::identity(2).scale((1.0 - p / 2.0).sqrt()), z.scale((p / 2.0).sqrt())])
    }

    /// CNOT on two qubits, control A, target B.
    pub fn cnot() -> Self {
        let u = Unitary::permutation(&[0, 1, 3, 2]).expect("valid permutation");
        Self::unitary(&u)
    }

    /// Kraus operators recovered from a Choi matrix in the
    /// `Σ_{jk} E(|j⟩⟨k|) ⊗ |j⟩⟨k|` convention.
    pub fn from_choi(choi: &CMatrix, dim_in: usize, dim_out: usize) -> Result<Self> {
        if choi.shape() != (dim_in * dim_out, dim_in * dim_out) {
            return Err(Error::DimensionMismatch(choi.nrows(), dim_in * dim_out));
        }
        let (values, vectors) = linalg::eigh(choi);
        if let Some(&min) = values.last() {
            if min < -CHOI_PSD_TOL {
                return Err(Error::NotPsd(min));
            }
        }
        let kraus: Vec<CMatrix> = values
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > CHOI_PSD_TOL)
            .map(|(k, &l)| {
                let v = vectors.column(k);
                CMatrix::from_fn(dim_out, dim_in, |a, j| v[a * dim_in + j] * l.sqrt())
            })
            .collect();
        Self::new(kraus)
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// `‖Σ_k K_k†K_k − I‖_F`.
    pub fn trace_preservation_error(&self) -> f64 {
        let mut sum = CMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            sum += k.adjoint() * k;
        }
        linalg::frobenius(&(sum - linalg::identity(self.dim_in)))
    }

    /// Applies the channel to an arbitrary matrix.
    pub fn apply_matrix(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out += k * m * k.adjoint();
        }
        out
    }

    /// `E ⊗ id` or `id ⊗ E` on a bipartite space where the other factor has
    /// dimension `other`.
    pub fn extend(&self, other: usize, side: Subsystem) -> Self {
        let id = linalg::identity(other);
        let kraus = self
            .kraus
            .iter()
            .map(|k| match side {
                Subsystem::A => linalg::kron(k, &id),
                Subsystem::B => linalg::kron(&id, k),
            })
            .collect();
        Self { dim_in: self.dim_in * other, dim_out: self.dim_out * other, kraus }
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("p = {p} outside [0, 1]")));
    }
    Ok(())
}

/// `Φ^{p,U}(ρ) = (1 − p)ρ + p Δ_U(ρ)`, dephasing in the basis `{U|i⟩}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DephasingChannel {
    p: f64,
    basis: Unitary,
}

impl DephasingChannel {
    pub fn new(p: f64, basis: Unitary) -> Result<Self> {
        check_probability(p)?;
        Ok(Self { p, basis })
    }

    /// Dephasing in the computational basis.
    pub fn computational(d: usize, p: f64) -> Result<Self> {
        Self::new(p, Unitary::identity(d))
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn basis(&self) -> &Unitary {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn with_p(&self, p: f64) -> Result<Self> {
        Self::new(p, self.basis.clone())
    }

}

/// Zeroes the off-diagonal entries.
pub(crate) fn dephase_matrix(m: &CMatrix) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| if i == j { m[(i, j)] } else { real(0.0) })
}

/// `Δ ⊗ id` in the computational basis of A: keeps the blocks `⟨i|_A · |i⟩_A`.
pub(crate) fn dephase_a_matrix(m: &CMatrix, (_da, db): (usize, usize)) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| if r / db == c / db { m[(r, c)] } else { real(0.0) })
}

fn in_basis(m: &CMatrix, u: &Unitary, f: impl Fn(&CMatrix) -> CMatrix) -> CMatrix {
    let ud = u.matrix().adjoint();
    u.matrix() * f(&(&ud * m * u.matrix())) * &ud
}

/// Full dephasing `Δ_U(ρ) = Σ_i U|i⟩⟨i|U†ρU|i⟩⟨i|U†`.
pub fn dephase(rho: &DensityMatrix, u: &Unitary) -> Result<DensityMatrix> {
    if u.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(u.dim(), rho.dim()));
    }
    Ok(DensityMatrix::from_trusted(in_basis(rho.matrix(), u, dephase_matrix)))
}

pub fn apply_dephasing(rho: &DensityMatrix, ch: &DephasingChannel) -> Result<DensityMatrix> {
    let full = dephase(rho, ch.basis())?;
    Ok(DensityMatrix::from_trusted(rho.matrix().scale(1.0 - ch.p()) + full.matrix().scale(ch.p())))
}

/// `Φ^{p,U}_A = Φ^{p,U} ⊗ id` on a bipartite state.
pub fn apply_local_dephasing(rho: &BipartiteState, ch: &DephasingChannel) -> Result<BipartiteState> {
    if ch.dim() != rho.dim_a() {
        return Err(Error::DimensionMismatch(ch.dim(), rho.dim_a()));
    }
    let dims = rho.dims();
    let u = ch.basis().kron(&Unitary::identity(dims.1));
    let full = in_basis(rho.matrix(), &u, |m| dephase_a_matrix(m, dims));
    let out = rho.matrix().scale(1.0 - ch.p()) + full.scale(ch.p());
    BipartiteState::new(DensityMatrix::from_trusted(out), dims)
}

pub fn apply_kraus(rho: &DensityMatrix, ch: &KrausChannel) -> Result<DensityMatrix> {
    if ch.dim_in != rho.dim() {
        return Err(Error::DimensionMismatch(ch.dim_in, rho.dim()));
    }
    DensityMatrix::new(ch.apply_matrix(rho.matrix()))
}

/// Applies `ch` to one side of a bipartite state, identity on the other.
pub fn apply_local(rho: &BipartiteState, ch: &KrausChannel, side: Subsystem) -> Result<BipartiteState> {
    let (da, db) = rho.dims();
    let (acted, other) = match side {
        Subsystem::A => (da, db),
        Subsystem::B => (db, da),
    };
    if ch.dim_in != acted {
        return Err(Error::DimensionMismatch(ch.dim_in, acted));
    }
    let out = apply_kraus(rho.state(), &ch.extend(other, side))?;
    let dims = match side {
        Subsystem::A => (ch.dim_out, db),
        Subsystem::B => (da, ch.dim_out),
    };
    BipartiteState::new(out, dims)
}

/// Selective measurement: branch `k` occurs with `p_k = Tr(K_k ρ K_k†)` and
/// leaves `σ_k = K_k ρ K_k† / p_k`. Branches with `p_k ≤ 1e-14` are omitted.
pub fn measure_ensemble(rho: &DensityMatrix, ch: &KrausChannel) -> Result<Vec<(f64, DensityMatrix)>> {
    if ch.dim_in != rho.dim() {
        return Err(Error::DimensionMismatch(ch.dim_in, rho.dim()));
    }
    let tp = ch.trace_preservation_error();
    if tp > TP_TOL {
        return Err(Error::NotTracePreserving(tp));
    }
    let mut branches = Vec::with_capacity(ch.kraus.len());
    for k in &ch.kraus {
        let out = k * rho.matrix() * k.adjoint();
        let prob = linalg::trace(&out).re;
        if prob > BRANCH_CUTOFF {
            branches.push((prob, DensityMatrix::new(out.unscale(prob))?));
        }
    }
    Ok(branches)
}

/// Strictly incoherent operation `K_k = Σ_i c_{k,i} |f_k(i)⟩⟨i|`.
#[derive(Clone, Debug, PartialEq)]
pub struct SioSpec {
    perms: Vec<Vec<usize>>,
    /// `coeffs[(k, i)] = c_{k,i}`.
    coeffs: CMatrix,
}

impl SioSpec {
    pub fn new(perms: Vec<Vec<usize>>, coeffs: CMatrix) -> Result<Self> {
        let d = coeffs.ncols();
        if perms.len() != coeffs.nrows() || perms.is_empty() || d == 0 {
            return Err(Error::param("SIO needs one permutation per coefficient row"));
        }
        for f in &perms {
            if f.len() != d {
                return Err(Error::DimensionMismatch(f.len(), d));
            }
            check_permutation(f)?;
        }
        for i in 0..d {
            let norm: f64 = coeffs.column(i).iter().map(|z| z.norm_sqr()).sum();
            if (norm - 1.0).abs() > TP_TOL {
                return Err(Error::NotTracePreserving((norm - 1.0).abs()));
            }
        }
        Ok(Self { perms, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.coeffs.ncols()
    }

    pub fn num_kraus(&self) -> usize {
        self.perms.len()
    }

    pub fn perms(&self) -> &[Vec<usize>] {
        &self.perms
    }

    pub fn coeffs(&self) -> &CMatrix {
        &self.coeffs
    }
}

pub fn sio_to_kraus(s: &SioSpec) -> KrausChannel {
    let d = s.dim();
    let kraus = s
        .perms
        .iter()
        .enumerate()
        .map(|(k, f)| {
            let mut m = CMatrix::zeros(d, d);
            for (i, &fi) in f.iter().enumerate() {
                m[(fi, i)] = s.coeffs[(k, i)];
            }
            m
        })
        .collect();
    KrausChannel { dim_in: d, dim_out: d, kraus }
}

/// Column `i` of the result is a uniformly random unit vector in `C^rows`.
fn random_unit_columns<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let mut m = CMatrix::from_fn(rows, cols, |_, _| standard_complex_gaussian(rng));
    for mut col in m.column_iter_mut() {
        let n = col.norm();
        col.unscale_mut(n);
    }
    m
}

fn random_permutation<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<usize> {
    let mut f: Vec<usize> = (0..d).collect();
    f.shuffle(rng);
    f
}

pub fn random_sio_with<R: Rng + ?Sized>(d: usize, num_kraus: usize, rng: &mut R) -> Result<SioSpec> {
    if d == 0 || d > MAX_DIM || num_kraus == 0 {
        return Err(Error::param(format!("invalid SIO size d = {d}, num_kraus = {num_kraus}")));
    }
    let perms = (0..num_kraus).map(|_| random_permutation(d, rng)).collect();
    let coeffs = random_unit_columns(num_kraus, d, rng);
    SioSpec::new(perms, coeffs)
}

pub fn random_sio(d: usize, num_kraus: usize, seed: u64) -> Result<SioSpec> {
    random_sio_with(d, num_kraus, &mut seeded_rng(seed))
}

/// Random bipartite SIO built from controlled permutations
/// `|i, j⟩ ↦ |a_k(i), b_{k,i}(j)⟩`, so that it commutes with dephasing on A.
pub fn random_commuting_bipartite_sio_with<R: Rng + ?Sized>(
    da: usize,
    db: usize,
    num_kraus: usize,
    rng: &mut R,
) -> Result<KrausChannel> {
    let d = da * db;
    if da == 0 || db == 0 || d > MAX_DIM {
        return Err(Error::param(format!("bipartite dimension {da}x{db} exceeds {MAX_DIM}")));
    }
    if num_kraus == 0 {
        return Err(Error::param("num_kraus must be positive"));
    }
    let coeffs = random_unit_columns(num_kraus, d, rng);
    let mut kraus = Vec::with_capacity(num_kraus);
    for k in 0..num_kraus {
        let a = random_permutation(da, rng);
        let mut m = CMatrix::zeros(d, d);
        for (i, &ai) in a.iter().enumerate() {
            let b = random_permutation(db, rng);
            for (j, &bj) in b.iter().enumerate() {
                m[(ai * db + bj, i * db + j)] = coeffs[(k, i * db + j)];
            }
        }
        kraus.push(m);
    }
    KrausChannel::new(kraus)
}

pub fn random_commuting_bipartite_sio(da: usize, db: usize, num_kraus: usize, seed: u64) -> Result<KrausChannel> {
    random_commuting_bipartite_sio_with(da, db, num_kraus, &mut seeded_rng(seed))
}

/// Largest Frobenius residual `‖E(Φ^p_A(ρ)) − Φ^p_A(E(ρ))‖` over a fixed
/// set of random probe states.
pub fn local_dephasing_commutator(ch: &KrausChannel, dims: (usize, usize), p: f64) -> Result<f64> {
    if ch.dim_in != dims.0 * dims.1 || ch.dim_out != ch.dim_in {
        return Err(Error::DimensionMismatch(ch.dim_in, dims.0 * dims.1));
    }
    check_probability(p)?;
    let mut rng = seeded_rng(0x5eed_c0de);
    let phi = |m: &CMatrix| m.scale(1.0 - p) + dephase_a_matrix(m, dims).scale(p);
    let mut worst = 0.0f64;
    for _ in 0..8 {
        let probe = random_density_with(ch.dim_in, ch.dim_in, &mut rng)?;
        let lhs = ch.apply_matrix(&phi(probe.matrix()));
        let rhs = phi(&ch.apply_matrix(probe.matrix()));
        worst = worst.max(linalg::frobenius(&(lhs - rhs)));
    }
    Ok(worst)
}

/// The two families of local operations that cannot create discord and
/// admit free extensions.
#[derive(Clone, Debug, PartialEq)]
pub enum EcpoSpec {
    /// `E(ρ) = Σ_i Tr(M_i ρ) |b_i⟩⟨b_i|` with `b_i` the columns of `out_basis`.
    Semiclassical { povm: Vec<CMatrix>, out_basis: Unitary },
    /// `E(ρ) = t UρU† + (1 − t) I/d`.
    Isotropic { t: f64, unitary: Unitary },
}

impl EcpoSpec {
    pub fn semiclassical(povm: Vec<CMatrix>, out_basis: Unitary) -> Result<Self> {
        let d = out_basis.dim();
        if povm.is_empty() || povm.len() > d {
            return Err(Error::param(format!("semiclassical channel needs 1..={d} effects")));
        }
        validate_povm(&povm, d)?;
        Ok(EcpoSpec::Semiclassical { povm, out_basis })
    }

    pub fn isotropic(t: f64, unitary: Unitary) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::param(format!("isotropic weight t = {t} outside [0, 1]")));
        }
        Ok(EcpoSpec::Isotropic { t, unitary })
    }
}

/// Checks that every effect is PSD and that they sum to the identity.
pub fn validate_povm(povm: &[CMatrix], d: usize) -> Result<()> {
    let mut sum = CMatrix::zeros(d, d);
    for m in povm {
        if m.shape() != (d, d) {
            return Err(Error::DimensionMismatch(m.nrows(), d));
        }
        let herm = linalg::hermiticity_error(m);
        if herm > qstate::HERMITIAN_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let (values, _) = linalg::eigh(m);
        let min = values.last().copied().unwrap_or(0.0);
        if min < -qstate::PSD_TOL {
            return Err(Error::NotPsd(min));
        }
        sum += m;
    }
    let err = linalg::frobenius(&(sum - linalg::identity(d)));
    if err > TP_TOL {
        return Err(Error::NotTracePreserving(err));
    }
    Ok(())
}

/// Projective measurement onto the columns of `u`.
pub fn projective_povm(u: &Unitary) -> Vec<CMatrix> {
    (0..u.dim())
        .map(|i| {
            let v: CVector = u.column(i);
            &v * v.adjoint()
        })
        .collect()
}

pub fn ecpo_to_channel(e: &EcpoSpec, d: usize) -> Result<KrausChannel> {
    match e {
        EcpoSpec::Semiclassical { povm, out_basis } => {
            if out_basis.dim() != d {
                return Err(Error::DimensionMismatch(out_basis.dim(), d));
            }
            let mut kraus = Vec::with_capacity(povm.len() * d);
            for (i, m) in povm.iter().enumerate() {
                let root = linalg::sqrt_psd(m);
                let b = out_basis.column(i);
                for j in 0..d {
                    // |b_i⟩⟨j| √M_i
                    kraus.push(&b * root.row(j));
                }
            }
            KrausChannel::new(kraus)
        }
        EcpoSpec::Isotropic { t, unitary } => {
            if unitary.dim() != d {
                return Err(Error::DimensionMismatch(unitary.dim(), d));
            }
            let mut kraus = vec![unitary.matrix().scale(t.sqrt())];
            if *t < 1.0 {
                let w = ((1.0 - t) / d as f64).sqrt();
                for i in 0..d {
                    for j in 0..d {
                        kraus.push(linalg::matrix_unit(d, i, j).scale(w));
                    }
                }
            }
            KrausChannel::new(kraus)
        }
    }
}

/// `Σ_{jk} E(|j⟩⟨k|) ⊗ |j⟩⟨k|` for an arbitrary linear map `E`.
pub fn choi_of_map(dim_in: usize, map: impl Fn(&CMatrix) -> CMatrix) -> CMatrix {
    let mut choi: Option<CMatrix> = None;
    for j in 0..dim_in {
        for k in 0..dim_in {
            let unit = linalg::matrix_unit(dim_in, j, k);
            let term = linalg::kron(&map(&unit), &unit);
            match choi.as_mut() {
                Some(c) => *c += term,
                None => choi = Some(term),
            }
        }
    }
    choi.expect("dim_in > 0")
}

pub fn choi_matrix(ch: &KrausChannel) -> CMatrix {
    choi_of_map(ch.dim_in, |m| ch.apply_matrix(m))
}

/// CPTP test on a Choi matrix: PSD to `-1e-10` and `Tr_out = I`.
pub fn choi_is_cptp(choi: &CMatrix, dim_in: usize, dim_out: usize) -> bool {
    if choi.shape() != (dim_in * dim_out, dim_in * dim_out) || linalg::hermiticity_error(choi) > 1e-10 {
        return false;
    }
    let (values, _) = linalg::eigh(choi);
    if values.last().copied().unwrap_or(0.0) < -CHOI_PSD_TOL {
        return false;
    }
    let reduced = qstate::partial_trace_matrix(choi, (dim_out, dim_in), Subsystem::B);
    linalg::frobenius(&(reduced - linalg::identity(dim_in))) <= TP_TOL
}

pub fn is_cptp(ch: &KrausChannel) -> bool {
    ch.trace_preservation_error() <= TP_TOL && choi_is_cptp(&choi_matrix(ch), ch.dim_in, ch.dim_out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{
        bloch_from_qubit, maximally_coherent, maximally_entangled, random_density, random_unitary, tensor,
    };
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn plus() -> DensityMatrix {
        maximally_coherent(2, &[0.0, 0.0]).unwrap()
    }

    fn minus() -> DensityMatrix {
        maximally_coherent(2, &[0.0, PI]).unwrap()
    }

    #[test]
    fn dephase_examples() {
        let out = dephase(&plus(), &Unitary::identity(2)).unwrap();
        assert!(out.distance(&DensityMatrix::maximally_mixed(2)) < 1e-15);
        let diag = DensityMatrix::diagonal(&[0.2, 0.5, 0.3]).unwrap();
        assert!(dephase(&diag, &Unitary::identity(3)).unwrap().distance(&diag) < 1e-15);
        let out = dephase(&plus(), &Unitary::hadamard()).unwrap();
        assert!(out.distance(&plus()) < 1e-15);
    }

    #[test]
    fn dephase_is_idempotent() {
        let rho = random_density(4, 3, 5).unwrap();
        let u = random_unitary(4, 6).unwrap();
        let once = dephase(&rho, &u).unwrap();
        let twice = dephase(&once, &u).unwrap();
        assert!(once.distance(&twice) < 1e-14);
    }

    #[test]
    fn apply_dephasing_examples() {
        let rho = random_density(3, 3, 1).unwrap();
        let ch = DephasingChannel::computational(3, 0.0).unwrap();
        assert!(apply_dephasing(&rho, &ch).unwrap().distance(&rho) < 1e-15);

        let full = DephasingChannel::computational(2, 1.0).unwrap();
        assert!(apply_dephasing(&plus(), &full).unwrap().distance(&DensityMatrix::maximally_mixed(2)) < 1e-15);

        let half = DephasingChannel::computational(2, 0.5).unwrap();
        let v = bloch_from_qubit(&apply_dephasing(&plus(), &half).unwrap()).unwrap();
        assert_abs_diff_eq!(v.x, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(v.y, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.z, 0.0, epsilon = 1e-15);

        assert!(DephasingChannel::computational(2, 1.5).is_err());
        assert!(DephasingChannel::computational(2, -0.1).is_err());
    }

    #[test]
    fn kraus_examples() {
        let rho = random_density(3, 2, 2).unwrap();
        assert!(apply_kraus(&rho, &KrausChannel::identity(3)).unwrap().distance(&rho) < 1e-15);

        let p = 0.3;
        let out = apply_kraus(&plus(), &KrausChannel::phase_flip(p).unwrap()).unwrap();
        let v = bloch_from_qubit(&out).unwrap();
        assert_abs_diff_eq!(v.x, 1.0 - p, epsilon = 1e-15);
        assert_abs_diff_eq!(v.y, 0.0, epsilon = 1e-15);

        let a = random_density(2, 2, 3).unwrap();
        let b = random_density(3, 3, 4).unwrap();
        let ch = sio_to_kraus(&random_sio(2, 2, 5).unwrap());
        let lhs = apply_local(&tensor(&a, &b), &ch, Subsystem::A).unwrap();
        let rhs = tensor(&apply_kraus(&a, &ch).unwrap(), &b);
        assert!(lhs.state().distance(rhs.state()) < 1e-14);

        let ch_b = sio_to_kraus(&random_sio(3, 2, 6).unwrap());
        let lhs = apply_local(&tensor(&a, &b), &ch_b, Subsystem::B).unwrap();
        let rhs = tensor(&a, &apply_kraus(&b, &ch_b).unwrap());
        assert!(lhs.state().distance(rhs.state()) < 1e-14);

        assert!(apply_kraus(&rho, &KrausChannel::identity(2)).is_err());
    }

    #[test]
    fn non_tp_operators_rejected() {
        let k = linalg::identity(2).scale(0.9);
        assert!(matches!(KrausChannel::new(vec![k.clone()]), Err(Error::NotTracePreserving(_))));
        let ch = KrausChannel::from_operators_unchecked(vec![k]).unwrap();
        assert!(!is_cptp(&ch));
        assert!(measure_ensemble(&plus(), &ch).is_err());
    }

    #[test]
    fn ensemble_examples() {
        let u = random_unitary(3, 8).unwrap();
        let rho = random_density(3, 3, 9).unwrap();
        let branches = measure_ensemble(&rho, &KrausChannel::unitary(&u)).unwrap();
        assert_eq!(branches.len(), 1);
        assert_abs_diff_eq!(branches[0].0, 1.0, epsilon = 1e-14);
        assert!(branches[0].1.distance(&rho.conjugate_by(&u).unwrap()) < 1e-14);

        let branches = measure_ensemble(&plus(), &KrausChannel::phase_flip(1.0).unwrap()).unwrap();
        assert_eq!(branches.len(), 2);
        assert_abs_diff_eq!(branches[0].0, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(branches[1].0, 0.5, epsilon = 1e-15);
        assert!(branches[0].1.distance(&plus()) < 1e-15);
        assert!(branches[1].1.distance(&minus()) < 1e-15);
    }

    #[test]
    fn ensemble_average_matches_channel() {
        let rho = random_density(3, 3, 10).unwrap();
        let ch = sio_to_kraus(&random_sio(3, 3, 11).unwrap());
        let branches = measure_ensemble(&rho, &ch).unwrap();
        let total: f64 = branches.iter().map(|b| b.0).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-13);
        let mut avg = CMatrix::zeros(3, 3);
        for (p, s) in &branches {
            avg += s.matrix().scale(*p);
        }
        assert!(linalg::frobenius(&(avg - apply_kraus(&rho, &ch).unwrap().matrix())) < 1e-14);
    }

    #[test]
    fn zero_probability_branches_are_dropped() {
        let p0 = linalg::matrix_unit(2, 0, 0);
        let p1 = linalg::matrix_unit(2, 1, 1);
        let ch = KrausChannel::new(vec![p0, p1]).unwrap();
        let branches = measure_ensemble(&DensityMatrix::basis_state(2, 0), &ch).unwrap();
        assert_eq!(branches.len(), 1);
    }

    #[test]
    fn sio_examples() {
        let id = SioSpec::new(vec![vec![0, 1, 2]], CMatrix::from_element(1, 3, ONE)).unwrap();
        assert_eq!(sio_to_kraus(&id), KrausChannel::identity(3));

        let swap = SioSpec::new(vec![vec![1, 0]], CMatrix::from_element(1, 2, ONE)).unwrap();
        assert_eq!(sio_to_kraus(&swap).kraus()[0], *Unitary::pauli_x().matrix());

        assert!(SioSpec::new(vec![vec![0, 0]], CMatrix::from_element(1, 2, ONE)).is_err());
        assert!(SioSpec::new(vec![vec![0, 1]], CMatrix::from_element(1, 2, real(0.5))).is_err());
    }

    #[test]
    fn random_sio_is_dephasing_covariant() {
        for seed in 0..10 {
            let spec = random_sio(4, 4, seed).unwrap();
            let ch = sio_to_kraus(&spec);
            assert!(is_cptp(&ch));
            let rho = random_density(4, 4, 1000 + seed).unwrap();
            let id = Unitary::identity(4);
            let lhs = apply_kraus(&dephase(&rho, &id).unwrap(), &ch).unwrap();
            let rhs = dephase(&apply_kraus(&rho, &ch).unwrap(), &id).unwrap();
            assert!(lhs.distance(&rhs) < 1e-10);
        }
    }

    #[test]
    fn cnot_commutes_with_dephasing_on_control() {
        let cnot = KrausChannel::cnot();
        assert!(local_dephasing_commutator(&cnot, (2, 2), 1.0).unwrap() < 1e-12);
        let local = KrausChannel::unitary(
            &Unitary::permutation(&[1, 2, 0]).unwrap().kron(&Unitary::permutation(&[1, 0]).unwrap()),
        );
        assert!(local_dephasing_commutator(&local, (3, 2), 0.4).unwrap() < 1e-12);
    }

    #[test]
    fn label_mixing_sio_does_not_commute() {
        // |i, j⟩ ↦ |j, i⟩ is a product-basis SIO that moves B labels into A.
        let swap = KrausChannel::unitary(&Unitary::permutation(&[0, 2, 1, 3]).unwrap());
        assert!(local_dephasing_commutator(&swap, (2, 2), 1.0).unwrap() > 1e-3);
    }

    #[test]
    fn commuting_generator_guards_size() {
        assert!(random_commuting_bipartite_sio(8, 9, 2, 0).is_err());
        let ch = random_commuting_bipartite_sio(2, 3, 6, 0).unwrap();
        assert!(is_cptp(&ch));
        assert!(local_dephasing_commutator(&ch, (2, 3), 0.7).unwrap() < 1e-10);
    }

    #[test]
    fn isotropic_examples() {
        let rho = random_density(3, 3, 12).unwrap();
        let id = ecpo_to_channel(&EcpoSpec::isotropic(1.0, Unitary::identity(3)).unwrap(), 3).unwrap();
        assert!(apply_kraus(&rho, &id).unwrap().distance(&rho) < 1e-14);
        let u = random_unitary(3, 13).unwrap();
        let dep = ecpo_to_channel(&EcpoSpec::isotropic(0.0, u.clone()).unwrap(), 3).unwrap();
        assert!(apply_kraus(&rho, &dep).unwrap().distance(&DensityMatrix::maximally_mixed(3)) < 1e-14);
        let t = 0.35;
        let ch = ecpo_to_channel(&EcpoSpec::isotropic(t, u.clone()).unwrap(), 3).unwrap();
        let expected = rho.conjugate_by(&u).unwrap().matrix().scale(t) + linalg::identity(3).scale((1.0 - t) / 3.0);
        assert!(linalg::frobenius(&(apply_kraus(&rho, &ch).unwrap().matrix() - expected)) < 1e-14);
        assert!(EcpoSpec::isotropic(1.2, u).is_err());
    }

    #[test]
    fn semiclassical_examples() {
        let id = Unitary::identity(3);
        let e = EcpoSpec::semiclassical(projective_povm(&id), id.clone()).unwrap();
        let ch = ecpo_to_channel(&e, 3).unwrap();
        let rho = random_density(3, 3, 14).unwrap();
        assert!(apply_kraus(&rho, &ch).unwrap().distance(&dephase(&rho, &id).unwrap()) < 1e-14);

        let bad = vec![linalg::identity(2), linalg::identity(2)];
        assert!(EcpoSpec::semiclassical(bad, Unitary::identity(2)).is_err());
    }

    #[test]
    fn choi_examples() {
        let choi = choi_matrix(&KrausChannel::identity(2));
        let bell = maximally_entangled(2);
        assert!(linalg::frobenius(&(choi - bell.matrix().scale(2.0))) < 1e-15);

        let delta = EcpoSpec::semiclassical(projective_povm(&Unitary::identity(2)), Unitary::identity(2)).unwrap();
        let choi = choi_matrix(&ecpo_to_channel(&delta, 2).unwrap());
        let mut expected = CMatrix::zeros(4, 4);
        expected[(0, 0)] = ONE;
        expected[(3, 3)] = ONE;
        assert!(linalg::frobenius(&(choi - expected)) < 1e-15);
    }

    #[test]
    fn anti_unitary_isotropic_positivity_range() {
        // tρ^T + (1 − t)I/2 is CP only for t ∈ [−1, 1/3].
        let map = |t: f64| {
            move |m: &CMatrix| m.transpose().scale(t) + linalg::identity(2) * (linalg::trace(m) * real((1.0 - t) / 2.0))
        };
        for (t, cp) in [(0.25, true), (1.0 / 3.0, true), (0.5, false), (1.0, false), (-1.0, true)] {
            let choi = choi_of_map(2, map(t));
            assert_eq!(choi_is_cptp(&choi, 2, 2), cp, "t = {t}");
            if cp {
                let ch = KrausChannel::from_choi(&choi, 2, 2).unwrap();
                assert!(is_cptp(&ch));
            }
        }
        assert!(KrausChannel::from_choi(&choi_of_map(2, map(0.5)), 2, 2).is_err());
    }
}
