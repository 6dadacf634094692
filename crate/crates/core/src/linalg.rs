//! Small dense complex linear-algebra helpers shared by the state, channel
//! and measure modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `(M + M†) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Largest entrywise deviation `|M_ij - conj(M_ji)|`.
pub fn hermiticity_error(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted in
/// descending order. Eigenvectors are the columns of the returned matrix.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// `V diag(f(λ)) V†` for Hermitian `m`.
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> C64) -> CMatrix {
    let (values, vectors) = eigh(m);
    let mut scaled = vectors.clone();
    for (k, &lambda) in values.iter().enumerate() {
        let mut col = scaled.column_mut(k);
        col *= f(lambda);
    }
    &scaled * vectors.adjoint()
}

/// Principal square root of a PSD matrix; tiny negative eigenvalues are clamped.
pub fn sqrt_psd(m: &CMatrix) -> CMatrix {
    hermitian_function(m, |x| real(x.max(0.0).sqrt()))
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// `‖U†U − I‖_F`.
pub fn unitarity_error(u: &CMatrix) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    frobenius(&(u.adjoint() * u - identity(u.nrows())))
}

/// `AB − BA`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Matrix that is zero except for a one at `(row, col)`.
pub fn matrix_unit(n: usize, row: usize, col: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(row, col)] = ONE;
    m
}
