//! Thin wrappers over the dense LAPACK backend.
//!
//! The backend's Hermitian eigendecomposition hands back the eigenvectors of
//! the *conjugated* matrix (a row-major/column-major artifact that is invisible
//! for real-symmetric input). The wrappers here re-conjugate so that column `k`
//! of the returned matrix is the eigenvector of eigenvalue `k`, ascending —
//! pinned by a unit test so a dependency bump cannot silently flip it back.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, EigValsh, UPLO};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Hermitian eigendecomposition: ascending eigenvalues and a unitary matrix
/// whose columns are the matching eigenvectors (A = V Λ V†).
pub(crate) fn eigh_hermitian(m: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    let (evals, v) = m
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Backend(format!("hermitian eigendecomposition: {e}")))?;
    Ok((evals, v.mapv(|z| z.conj())))
}

/// Eigenvalues only, ascending. (Spectra of A and conj(A) coincide for
/// Hermitian A, so no correction is needed.)
pub(crate) fn eigvalsh_hermitian(m: &Array2<C64>) -> Result<Array1<f64>> {
    m.eigvalsh(UPLO::Lower)
        .map_err(|e| Error::Backend(format!("hermitian eigenvalues: {e}")))
}
