//! Dense complex linear algebra used throughout the crate.
//!
//! Matrices are small (at most [`MAX_DIM`] on a side), so everything here
//! works on owned `nalgebra` matrices and favours clarity over blocking.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Tolerance for the Hermiticity check.
pub const H_TOL: f64 = 1e-10;
/// Eigenvalues in `[-P_TOL, 0)` are clamped to zero.
pub const P_TOL: f64 = 1e-10;
/// Residual tolerance for reconstructions.
pub const R_TOL: f64 = 1e-10;
pub const MAX_DIM: usize = 64;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Largest entrywise modulus of `A - A^H`.
pub fn hermiticity_defect(a: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_hermitian(a: &ComplexMatrix, tol: f64) -> bool {
    a.is_square() && hermiticity_defect(a) <= tol
}

pub fn is_psd(a: &ComplexMatrix, tol: f64) -> bool {
    match hermitian_eig(a) {
        Ok(eig) => eig.values.last().is_none_or(|&v| v >= -tol),
        Err(_) => false,
    }
}

pub fn is_unit_trace(a: &ComplexMatrix, tol: f64) -> bool {
    (a.trace() - C64::new(1.0, 0.0)).norm() <= tol
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn check_square(a: &ComplexMatrix) -> Result<usize> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    if a.nrows() > MAX_DIM {
        return Err(Error::DimensionTooLarge(a.nrows()));
    }
    Ok(a.nrows())
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    /// Column `i` is the eigenvector for `values[i]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut scaled = self.vectors.clone();
        for (j, &v) in self.values.iter().enumerate() {
            scaled.column_mut(j).scale_mut(v);
        }
        &scaled * self.vectors.adjoint()
    }
}

pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEig> {
    let n = check_square(a)?;
    let defect = hermiticity_defect(a);
    if defect > H_TOL {
        return Err(Error::NonHermitianInput(defect));
    }
    if n == 0 {
        return Ok(HermitianEig {
            values: Vec::new(),
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let sym = (a + a.adjoint()).scale(0.5);
    let eig = sym
        .try_symmetric_eigen(f64::EPSILON, 0)
        .ok_or(Error::EigenFailure)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    Ok(HermitianEig { values, vectors })
}

fn clamp_nonnegative(v: f64) -> Result<f64> {
    if v < -P_TOL {
        Err(Error::NotPositive(v))
    } else {
        Ok(v.max(0.0))
    }
}

/// Principal square root of a positive semidefinite matrix.
pub fn psd_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(a)?;
    let roots = eig
        .values
        .iter()
        .map(|&v| clamp_nonnegative(v).map(f64::sqrt))
        .collect::<Result<Vec<_>>>()?;
    Ok(HermitianEig {
        values: roots,
        vectors: eig.vectors,
    }
    .reconstruct())
}

/// Square roots of the eigenvalues of `A·B` for PSD `A`, `B`, descending.
///
/// `A·B` is not Hermitian, but its spectrum is real and nonnegative. The 2×2
/// case uses trace/determinant identities so that a vanishing root is not
/// polluted by cancellation; larger inputs go through a complex Schur form.
pub fn product_eig_sqrt(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Vec<f64>> {
    let n = check_square(a)?;
    let m = check_square(b)?;
    if n != m {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: m,
        });
    }
    for x in [a, b] {
        let eig = hermitian_eig(x)?;
        if let Some(&min) = eig.values.last() {
            clamp_nonnegative(min)?;
        }
    }
    let ab = a * b;
    let mut roots = if n == 2 {
        let tr = ab.trace().re;
        let det_a = clamp_nonnegative(det2(a).re)?;
        let det_b = clamp_nonnegative(det2(b).re)?;
        let geo = (det_a * det_b).sqrt();
        let sum = clamp_nonnegative(tr + 2.0 * geo)?.sqrt();
        let diff = (tr - 2.0 * geo).max(0.0).sqrt();
        vec![0.5 * (sum + diff), (0.5 * (sum - diff)).max(0.0)]
    } else {
        let values = Schur::try_new(ab, f64::EPSILON, 0)
            .ok_or(Error::EigenFailure)?
            .eigenvalues()
            .ok_or(Error::EigenFailure)?;
        values
            .iter()
            .map(|z| clamp_nonnegative(z.re).map(f64::sqrt))
            .collect::<Result<Vec<_>>>()?
    };
    roots.sort_by(|x, y| y.total_cmp(x));
    Ok(roots)
}

fn det2(a: &ComplexMatrix) -> C64 {
    a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)]
}

/// `ρ̃ = X ρ* X` for a qubit, conjugation in the number basis.
pub fn spin_flip(rho: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |i, j| rho[(1 - i, 1 - j)].conj())
}

/// Direct evaluation: eigenvalues of `√(√A·B·√A)`, descending.
pub fn product_eig_sqrt_direct(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Vec<f64>> {
    let ra = psd_sqrt(a)?;
    let inner = &ra * b * &ra;
    let inner = (&inner + inner.adjoint()).scale(0.5);
    Ok(hermitian_eig(&psd_sqrt(&inner)?)?.values)
}

/// Outer product `|u⟩⟨v|`.
pub fn outer(u: &ComplexVector, v: &ComplexVector) -> ComplexMatrix {
    u * v.adjoint()
}
