//! Seeded random states and unitaries.
//!
//! Pure states and unitaries are Haar distributed. Mixed states use the
//! normalized Wishart construction `G G† / Tr(G G†)` with `G` a `d × rank`
//! standard complex Gaussian matrix.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{DensityMatrix, Unitary, MAX_DIM};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex normal with unit variance (`E|z|² = 1`).
pub fn standard_complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| standard_complex_gaussian(rng))
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 || d > MAX_DIM {
        return Err(Error::param(format!("dimension {d} outside 1..={MAX_DIM}")));
    }
    Ok(())
}

pub fn random_pure_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<DensityMatrix> {
    check_dim(d)?;
    let psi = CVector::from_fn(d, |_, _| standard_complex_gaussian(rng));
    DensityMatrix::pure(&psi)
}

pub fn random_pure(d: usize, seed: u64) -> Result<DensityMatrix> {
    random_pure_with(d, &mut seeded_rng(seed))
}

pub fn random_density_with<R: Rng + ?Sized>(
    d: usize,
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    check_dim(d)?;
    if rank == 0 || rank > d {
        return Err(Error::param(format!("rank {rank} outside 1..={d}")));
    }
    let g = ginibre(d, rank, rng);
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    DensityMatrix::new(w.unscale(tr))
}

pub fn random_density(d: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_with(d, rank, &mut seeded_rng(seed))
}

/// Haar unitary from the QR decomposition of a Ginibre matrix, with the
/// phases of `R`'s diagonal absorbed into `Q`.
pub fn random_unitary_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Unitary> {
    check_dim(d)?;
    let qr = ginibre(d, d, rng).qr();
    let (mut q, r) = qr.unpack();
    for k in 0..d {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() > 0.0 { rkk / rkk.norm() } else { C64::new(1.0, 0.0) };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    Unitary::new(q)
}

pub fn random_unitary(d: usize, seed: u64) -> Result<Unitary> {
    random_unitary_with(d, &mut seeded_rng(seed))
}
